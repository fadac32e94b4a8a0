//! Network construction and the forward graph.
//!
//! The backbone is a VGG16-style stack truncated after block S, with the
//! pooling after the last retained block removed. Every backbone convolution
//! is followed by a scale enhancement module (SEM): one 3x3 reduction to the
//! block's SEM width, then K parallel 3x3 dilated convolutions at rates
//! max(1, r0*k) whose outputs are summed. Per block the SEM outputs are
//! summed and fed to two independent 1x1 head stacks producing the
//! shallow-to-deep and deep-to-shallow logits; both are upsampled to input
//! resolution with fixed bilinear interpolation. A single 1x1 convolution
//! over the 2S concatenated side logits yields the fused logit, and sigmoids
//! turn all 2S+1 logits into probability maps.

use bdcn_tensor::checkpoint::{Checkpoint, ParamRecord};
use bdcn_tensor::{ConvSpec, EdgeProbMap, Graph, NodeId, Shape4, Tensor4};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use std::path::Path;

use crate::config::{BdcnConfig, WeightInit};
use crate::error::{NetError, Result};

/// All prediction maps of one forward pass, at input resolution, in (0, 1).
#[derive(Debug, Clone)]
pub struct BdcnOutputs {
    pub side_s2d: Vec<EdgeProbMap>,
    pub side_d2s: Vec<EdgeProbMap>,
    pub fused: EdgeProbMap,
}

impl BdcnOutputs {
    pub fn map_count(&self) -> usize {
        self.side_s2d.len() + self.side_d2s.len() + 1
    }
}

/// Graph handles of one recorded forward pass; used by the training loss.
pub struct ForwardPass {
    /// Probability-map nodes, one per block, shallow to deep.
    pub side_s2d: Vec<NodeId>,
    pub side_d2s: Vec<NodeId>,
    pub fused: NodeId,
    /// Leaf node of every parameter, aligned with `Network::params`.
    pub param_ids: Vec<NodeId>,
}

impl ForwardPass {
    /// Extract plain probability maps (batch item 0).
    pub fn outputs(&self, graph: &Graph) -> BdcnOutputs {
        let map = |id: &NodeId| EdgeProbMap::from_tensor(graph.value(*id), 0, 0);
        BdcnOutputs {
            side_s2d: self.side_s2d.iter().map(map).collect(),
            side_d2s: self.side_d2s.iter().map(map).collect(),
            fused: map(&self.fused),
        }
    }
}

pub struct Network {
    config: BdcnConfig,
    params: Vec<(String, Tensor4)>,
}

impl Network {
    /// Build and initialize from a config. Initialization is deterministic
    /// in `config.seed`: backbone and SEM convolutions draw from the
    /// configured Gaussian, score heads start at zero (all predictions 0.5)
    /// and the fusion kernel at 1/(2S).
    pub fn build(config: BdcnConfig) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut params = Vec::new();
        let s = config.num_blocks;
        let rates = config.rate_schedule();

        let mut c_in = config.input_channels;
        for b in 0..s {
            let widths = config.vgg_channel_plan[b].clone();
            let mid = config.sem_width(b);
            for (l, &c_out) in widths.iter().enumerate() {
                push_conv(
                    &mut params,
                    &mut rng,
                    &format!("backbone.b{b}.c{l}"),
                    c_out,
                    c_in,
                    3,
                    config.weight_init,
                )?;
                if config.sem_branches > 0 {
                    push_conv(
                        &mut params,
                        &mut rng,
                        &format!("sem.b{b}.c{l}.reduce"),
                        mid,
                        c_out,
                        3,
                        config.weight_init,
                    )?;
                    for (k, _) in rates.iter().enumerate() {
                        push_conv(
                            &mut params,
                            &mut rng,
                            &format!("sem.b{b}.c{l}.branch{k}"),
                            mid,
                            mid,
                            3,
                            config.weight_init,
                        )?;
                    }
                }
                c_in = c_out;
            }
            let head_in = config.head_input_width(b);
            for dir in ["s2d", "d2s"] {
                push_zero_conv(&mut params, &format!("head.b{b}.{dir}.reduce"), config.head_channels, head_in, 1)?;
                push_zero_conv(&mut params, &format!("head.b{b}.{dir}.score"), 1, config.head_channels, 1)?;
            }
        }
        let fuse_w = Tensor4::filled(Shape4::new(1, 2 * s, 1, 1)?, 1.0 / (2 * s) as f32).with_grad();
        params.push(("fuse.weight".into(), fuse_w));
        params.push(("fuse.bias".into(), Tensor4::zeros(Shape4::new(1, 1, 1, 1)?).with_grad()));

        Ok(Self { config, params })
    }

    pub fn config(&self) -> &BdcnConfig {
        &self.config
    }

    pub fn params(&self) -> &[(String, Tensor4)] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [(String, Tensor4)] {
        &mut self.params
    }

    /// Exact number of trainable scalars.
    pub fn param_count(&self) -> u64 {
        self.params.iter().map(|(_, p)| p.numel() as u64).sum()
    }

    /// Record one forward pass on `graph`. The image must be a (n, c, h, w)
    /// tensor with c = input_channels and h, w >= 2^(S-1).
    pub fn forward(&self, graph: &mut Graph, image: &Tensor4) -> Result<ForwardPass> {
        let ishape = image.shape();
        if ishape.c != self.config.input_channels {
            return Err(NetError::Config(format!(
                "expected {} input channels, got {}",
                self.config.input_channels, ishape.c
            )));
        }
        let min_side = self.config.min_input_side();
        if ishape.h < min_side || ishape.w < min_side {
            return Err(NetError::Config(format!(
                "input {}x{} too small for {} blocks (needs >= {}x{})",
                ishape.h, ishape.w, self.config.num_blocks, min_side, min_side
            )));
        }

        let param_ids: Vec<NodeId> = self.params.iter().map(|(_, p)| graph.leaf(p.clone())).collect();
        let by_name = |name: &str| -> NodeId {
            let idx = self
                .params
                .iter()
                .position(|(n, _)| n == name)
                .unwrap_or_else(|| panic!("parameter '{name}' not found"));
            param_ids[idx]
        };

        let s = self.config.num_blocks;
        let rates = self.config.rate_schedule();
        let (full_h, full_w) = (ishape.h, ishape.w);
        let mut x = graph.leaf(image.clone());
        let mut s2d_logits = Vec::with_capacity(s);
        let mut d2s_logits = Vec::with_capacity(s);

        for b in 0..s {
            if b > 0 {
                x = graph.maxpool2(x);
            }
            let widths = &self.config.vgg_channel_plan[b];
            let mut block_feats: Vec<NodeId> = Vec::with_capacity(widths.len());
            for (l, _) in widths.iter().enumerate() {
                let conv = graph.conv2d(
                    x,
                    by_name(&format!("backbone.b{b}.c{l}.weight")),
                    Some(by_name(&format!("backbone.b{b}.c{l}.bias"))),
                    ConvSpec::same3x3(1),
                )?;
                x = graph.relu(conv);
                let feat = if self.config.sem_branches == 0 {
                    x
                } else {
                    let reduce = graph.conv2d(
                        x,
                        by_name(&format!("sem.b{b}.c{l}.reduce.weight")),
                        Some(by_name(&format!("sem.b{b}.c{l}.reduce.bias"))),
                        ConvSpec::same3x3(1),
                    )?;
                    let reduced = graph.relu(reduce);
                    let mut sum = None;
                    for (k, &rate) in rates.iter().enumerate() {
                        let branch = graph.conv2d(
                            reduced,
                            by_name(&format!("sem.b{b}.c{l}.branch{k}.weight")),
                            Some(by_name(&format!("sem.b{b}.c{l}.branch{k}.bias"))),
                            ConvSpec::same3x3(rate),
                        )?;
                        let branch = graph.relu(branch);
                        sum = Some(match sum {
                            None => branch,
                            Some(acc) => graph.add(acc, branch)?,
                        });
                    }
                    sum.expect("K >= 1 here")
                };
                block_feats.push(feat);
            }
            let mut block_sum = block_feats[0];
            for &f in &block_feats[1..] {
                block_sum = graph.add(block_sum, f)?;
            }
            for (dir, dst) in [("s2d", &mut s2d_logits), ("d2s", &mut d2s_logits)] {
                let reduce = graph.conv2d(
                    block_sum,
                    by_name(&format!("head.b{b}.{dir}.reduce.weight")),
                    Some(by_name(&format!("head.b{b}.{dir}.reduce.bias"))),
                    ConvSpec::pointwise(),
                )?;
                let logit = graph.conv2d(
                    reduce,
                    by_name(&format!("head.b{b}.{dir}.score.weight")),
                    Some(by_name(&format!("head.b{b}.{dir}.score.bias"))),
                    ConvSpec::pointwise(),
                )?;
                let logit = if b == 0 {
                    logit
                } else {
                    graph.upsample_bilinear(logit, full_h, full_w)?
                };
                dst.push(logit);
            }
        }

        let mut all_logits = s2d_logits.clone();
        all_logits.extend_from_slice(&d2s_logits);
        let stacked = graph.concat_channels(&all_logits)?;
        let fused_logit = graph.conv2d(
            stacked,
            by_name("fuse.weight"),
            Some(by_name("fuse.bias")),
            ConvSpec::pointwise(),
        )?;

        Ok(ForwardPass {
            side_s2d: s2d_logits.iter().map(|&l| graph.sigmoid(l)).collect(),
            side_d2s: d2s_logits.iter().map(|&l| graph.sigmoid(l)).collect(),
            fused: graph.sigmoid(fused_logit),
            param_ids,
        })
    }

    /// Forward pass returning plain probability maps.
    pub fn predict(&self, image: &Tensor4) -> Result<BdcnOutputs> {
        let mut graph = Graph::new();
        let pass = self.forward(&mut graph, image)?;
        Ok(pass.outputs(&graph))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let ckpt = Checkpoint {
            meta: self.config.to_meta(),
            params: self
                .params
                .iter()
                .map(|(name, p)| {
                    let s = p.shape();
                    ParamRecord {
                        name: name.clone(),
                        dims: vec![s.n as u64, s.c as u64, s.h as u64, s.w as u64],
                        data: p.data().to_vec(),
                    }
                })
                .collect(),
        };
        ckpt.save(path)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let ckpt = Checkpoint::load(path)?;
        Self::from_checkpoint(&ckpt)
    }

    pub fn from_checkpoint(ckpt: &Checkpoint) -> Result<Self> {
        let config = BdcnConfig::from_meta(&ckpt.meta)?;
        let mut net = Self::build(config)?;
        if ckpt.params.len() != net.params.len() {
            return Err(NetError::Config(format!(
                "checkpoint has {} parameters, architecture needs {}",
                ckpt.params.len(),
                net.params.len()
            )));
        }
        for ((name, tensor), rec) in net.params.iter_mut().zip(&ckpt.params) {
            if *name != rec.name {
                return Err(NetError::Config(format!(
                    "checkpoint parameter '{}' does not match expected '{}'",
                    rec.name, name
                )));
            }
            if rec.data.len() != tensor.numel() {
                return Err(NetError::Config(format!(
                    "checkpoint parameter '{}' has {} values, expected {}",
                    rec.name,
                    rec.data.len(),
                    tensor.numel()
                )));
            }
            tensor.data_mut().copy_from_slice(&rec.data);
        }
        Ok(net)
    }
}

fn push_conv(
    params: &mut Vec<(String, Tensor4)>,
    rng: &mut ChaCha8Rng,
    prefix: &str,
    c_out: usize,
    c_in: usize,
    k: usize,
    init: WeightInit,
) -> Result<()> {
    let shape = Shape4::new(c_out, c_in, k, k)?;
    let std = match init {
        WeightInit::Gaussian { std } => std,
        WeightInit::FanIn => (2.0 / (c_in * k * k) as f32).sqrt(),
    };
    let normal = Normal::new(0.0f32, std).expect("std > 0");
    let data = (0..shape.numel()).map(|_| normal.sample(rng)).collect();
    let weight = Tensor4::from_vec(shape, data)?.with_grad();
    params.push((format!("{prefix}.weight"), weight));
    params.push((
        format!("{prefix}.bias"),
        Tensor4::zeros(Shape4::new(1, 1, 1, c_out)?).with_grad(),
    ));
    Ok(())
}

fn push_zero_conv(
    params: &mut Vec<(String, Tensor4)>,
    prefix: &str,
    c_out: usize,
    c_in: usize,
    k: usize,
) -> Result<()> {
    params.push((
        format!("{prefix}.weight"),
        Tensor4::zeros(Shape4::new(c_out, c_in, k, k)?).with_grad(),
    ));
    params.push((
        format!("{prefix}.bias"),
        Tensor4::zeros(Shape4::new(1, 1, 1, c_out)?).with_grad(),
    ));
    Ok(())
}
