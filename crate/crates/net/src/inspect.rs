//! Architecture arithmetic: exact parameter counts, per-layer summaries and
//! per-block receptive-field extents, all computed from the config without
//! building a network.

use std::fmt;

use crate::config::BdcnConfig;

#[derive(Debug, Clone)]
pub struct LayerLine {
    pub name: String,
    pub detail: String,
    pub params: u64,
}

#[derive(Debug, Clone)]
pub struct BlockSummary {
    /// 1-based block index.
    pub index: usize,
    pub rates: Vec<usize>,
    /// Receptive-field side length of this block's side output, in input px.
    pub receptive_field: usize,
    /// Spatial downsampling factor relative to the input.
    pub downsample: usize,
}

#[derive(Debug, Clone)]
pub struct ArchReport {
    pub layers: Vec<LayerLine>,
    pub blocks: Vec<BlockSummary>,
    pub total_params: u64,
}

fn conv_params(c_out: usize, c_in: usize, k: usize) -> u64 {
    (c_out * c_in * k * k + c_out) as u64
}

/// Exact count of trainable scalars for a config.
pub fn param_count(config: &BdcnConfig) -> u64 {
    architecture_report(config).total_params
}

pub fn architecture_report(config: &BdcnConfig) -> ArchReport {
    let s = config.num_blocks;
    let rates = config.rate_schedule();
    let mut layers = Vec::new();
    let mut blocks = Vec::new();
    let mut total = 0u64;

    let mut c_in = config.input_channels;
    let mut rf = 1usize; // receptive field side of the current feature map
    let mut jump = 1usize; // input-pixel distance between adjacent features
    for b in 0..s {
        if b > 0 {
            rf += jump;
            jump *= 2;
        }
        let mid = config.sem_width(b);
        for (l, &c_out) in config.vgg_channel_plan[b].iter().enumerate() {
            let p = conv_params(c_out, c_in, 3);
            layers.push(LayerLine {
                name: format!("backbone.b{}.c{}", b, l),
                detail: format!("3x3 conv {}->{} + ReLU", c_in, c_out),
                params: p,
            });
            total += p;
            rf += 2 * jump;
            if config.sem_branches > 0 {
                let p = conv_params(mid, c_out, 3);
                layers.push(LayerLine {
                    name: format!("sem.b{}.c{}.reduce", b, l),
                    detail: format!("3x3 conv {}->{}", c_out, mid),
                    params: p,
                });
                total += p;
                for (k, &rate) in rates.iter().enumerate() {
                    let p = conv_params(mid, mid, 3);
                    layers.push(LayerLine {
                        name: format!("sem.b{}.c{}.branch{}", b, l, k),
                        detail: format!("3x3 conv {}->{} rate {}", mid, mid, rate),
                        params: p,
                    });
                    total += p;
                }
            }
            c_in = c_out;
        }
        let head_in = config.head_input_width(b);
        for dir in ["s2d", "d2s"] {
            let p = conv_params(config.head_channels, head_in, 1) + conv_params(1, config.head_channels, 1);
            layers.push(LayerLine {
                name: format!("head.b{}.{}", b, dir),
                detail: format!("1x1 conv {}->{} -> 1x1 conv ->1", head_in, config.head_channels),
                params: p,
            });
            total += p;
        }
        let sem_reach = rates.iter().max().map_or(0, |&rmax| 2 * rmax * jump);
        blocks.push(BlockSummary {
            index: b + 1,
            rates: rates.clone(),
            receptive_field: rf + sem_reach,
            downsample: jump,
        });
    }
    let fuse = (2 * s + 1) as u64;
    layers.push(LayerLine {
        name: "fuse".into(),
        detail: format!("1x1 conv {}->1 over concatenated side logits", 2 * s),
        params: fuse,
    });
    total += fuse;

    ArchReport {
        layers,
        blocks,
        total_params: total,
    }
}

impl fmt::Display for ArchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<28} {:<38} {:>12}", "layer", "detail", "params")?;
        for l in &self.layers {
            writeln!(f, "{:<28} {:<38} {:>12}", l.name, l.detail, l.params)?;
        }
        writeln!(f)?;
        for b in &self.blocks {
            let rates = b
                .rates
                .iter()
                .map(|r| r.to_string())
                .collect::<Vec<_>>()
                .join(",");
            writeln!(
                f,
                "block {}: sem rates [{}]  receptive field {} px  stride {}",
                b.index, rates, b.receptive_field, b.downsample
            )?;
        }
        writeln!(
            f,
            "total parameters: {} ({:.2}M)",
            self.total_params,
            self.total_params as f64 / 1.0e6
        )
    }
}
