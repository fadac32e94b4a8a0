//! Training loop: load -> augment -> forward -> cascade targets -> loss ->
//! backward -> SGD step, with step learning-rate decay. Batches accumulate
//! per-sample gradients and the step uses their mean, so the learning rate
//! is decoupled from the batch size. Everything is driven by one seed:
//! initialization, batch order and per-iteration augmentation draws, making
//! checkpoints bit-reproducible for a fixed (seed, config, dataset).

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use bdcn_data::{augment, load_sample, AugmentSpec, Manifest, Sample};
use bdcn_loss::{build_cascade_targets, total_loss};
use bdcn_net::Network;
use bdcn_tensor::{sgd_step, Graph, OptimState};

use crate::config::RunConfig;
use crate::error::{CliError, Result};

fn splitmix(seed: u64, i: u64) -> u64 {
    let mut z = seed.wrapping_add(i.wrapping_mul(0x9e3779b97f4a7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Deterministic in-place shuffle (Fisher-Yates on a splitmix stream).
fn shuffle(indices: &mut [usize], seed: u64) {
    for i in (1..indices.len()).rev() {
        let j = (splitmix(seed, i as u64) % (i as u64 + 1)) as usize;
        indices.swap(i, j);
    }
}

#[derive(Debug, Clone)]
pub struct StepStats {
    pub iter: usize,
    pub total: f64,
    pub side: f64,
    pub fuse: f64,
    pub lr: f32,
}

pub struct Trainer {
    pub net: Network,
    dataset: Vec<Sample>,
    cfg: RunConfig,
    aug: Option<AugmentSpec>,
    state: OptimState,
    order: Vec<usize>,
    cursor: usize,
    epoch: u64,
}

impl Trainer {
    pub fn new(net: Network, dataset: Vec<Sample>, cfg: RunConfig) -> Result<Self> {
        if dataset.is_empty() {
            return Err(CliError::Usage("training dataset is empty".into()));
        }
        let aug = cfg.augment_spec()?;
        let state = OptimState::new(
            cfg.optim.learning_rate,
            cfg.optim.momentum,
            cfg.optim.weight_decay,
        );
        let mut order: Vec<usize> = (0..dataset.len()).collect();
        shuffle(&mut order, splitmix(cfg.seed, 0xB01));
        Ok(Self {
            net,
            dataset,
            cfg,
            aug,
            state,
            order,
            cursor: 0,
            epoch: 0,
        })
    }

    fn next_index(&mut self) -> usize {
        if self.cursor >= self.order.len() {
            self.epoch += 1;
            shuffle(&mut self.order, splitmix(self.cfg.seed, 0xB01 + self.epoch));
            self.cursor = 0;
        }
        let idx = self.order[self.cursor];
        self.cursor += 1;
        idx
    }

    pub fn learning_rate_at(&self, iter: usize) -> f32 {
        let k = (iter / self.cfg.optim.lr_decay_step.max(1)) as i32;
        self.cfg.optim.learning_rate * self.cfg.optim.lr_decay_factor.powi(k)
    }

    /// One optimization step (`iter` is 0-based).
    pub fn step(&mut self, iter: usize) -> Result<StepStats> {
        let batch = self.cfg.optim.batch_size.max(1);
        let mut acc: Vec<Vec<f64>> = self
            .net
            .params()
            .iter()
            .map(|(_, p)| vec![0.0f64; p.numel()])
            .collect();
        let mut total = 0.0f64;
        let mut side = 0.0f64;
        let mut fuse = 0.0f64;

        for slot in 0..batch {
            let idx = self.next_index();
            let sample = if let Some(spec) = &self.aug {
                let mut spec = spec.clone();
                spec.seed = splitmix(self.cfg.seed, 0xA000_0000 + (iter * batch + slot) as u64);
                augment(&self.dataset[idx], &spec)?
            } else {
                self.dataset[idx].clone()
            };

            let mut graph = Graph::new();
            let pass = self.net.forward(&mut graph, &sample.image)?;
            let outputs = pass.outputs(&graph);
            let targets = build_cascade_targets(&sample.gt, &outputs.side_s2d, &outputs.side_d2s)?;
            let loss = total_loss(
                &mut graph,
                &pass.side_s2d,
                &pass.side_d2s,
                pass.fused,
                &targets,
                &sample.gt,
                self.cfg.loss.w_side,
                self.cfg.loss.w_fuse,
                self.cfg.loss.lambda,
            )?;
            if let Some(term) = loss.non_finite_term() {
                return Err(CliError::Training(format!(
                    "non-finite loss term '{term}' at iteration {iter} on sample '{}'",
                    sample.id
                )));
            }
            total += loss.total;
            side += loss.side;
            fuse += loss.fuse;

            let grads = graph.backward(loss.node)?;
            for (p_idx, node) in pass.param_ids.iter().enumerate() {
                if let Some(g) = grads.get(*node) {
                    for (a, &v) in acc[p_idx].iter_mut().zip(g) {
                        *a += v as f64;
                    }
                }
            }
        }

        let inv = 1.0 / batch as f64;
        let grads: Vec<Vec<f32>> = acc
            .into_iter()
            .map(|g| g.into_iter().map(|v| (v * inv) as f32).collect())
            .collect();
        let lr = self.learning_rate_at(iter);
        self.state.learning_rate = lr;
        sgd_step(self.net.params_mut(), &grads, &mut self.state)?;

        Ok(StepStats {
            iter,
            total: total * inv,
            side: side * inv,
            fuse: fuse * inv,
            lr,
        })
    }
}

#[derive(Debug)]
pub struct TrainOutcome {
    pub initial_checkpoint: PathBuf,
    pub final_checkpoint: PathBuf,
    pub log_path: PathBuf,
    pub iterations: usize,
}

pub fn load_dataset(manifest_path: &Path, gamma: f32) -> Result<Vec<Sample>> {
    let manifest = Manifest::load(manifest_path)?;
    if manifest.is_empty() {
        return Err(CliError::Usage(format!(
            "manifest {} lists no samples",
            manifest_path.display()
        )));
    }
    manifest
        .entries
        .iter()
        .map(|e| load_sample(e, gamma).map_err(CliError::from))
        .collect()
}

pub fn cmd_train(cfg: &RunConfig) -> Result<TrainOutcome> {
    if cfg.data.manifest.as_os_str().is_empty() {
        return Err(CliError::Usage("train needs data.manifest (or --manifest)".into()));
    }
    let dataset = load_dataset(&cfg.data.manifest, cfg.loss.gamma)?;
    let out_dir = cfg.output.dir.clone();
    std::fs::create_dir_all(&out_dir)?;

    let net = Network::build(cfg.network_config()?)?;
    let initial = out_dir.join("ckpt_0000000.bdcn");
    net.save(&initial)?;

    let iterations = cfg.optim.iterations;
    let log_path = out_dir.join("training.log");
    let mut log = BufWriter::new(File::create(&log_path)?);

    let mut trainer = Trainer::new(net, dataset, cfg.clone())?;
    let mut last_ckpt = initial.clone();
    for iter in 0..iterations {
        let stats = trainer.step(iter)?;
        writeln!(
            log,
            "{}\t{:.6}\t{:.6}\t{:.6}\t{:.3e}",
            stats.iter, stats.total, stats.side, stats.fuse, stats.lr
        )?;
        let done = iter + 1;
        if cfg.output.checkpoint_every > 0 && done % cfg.output.checkpoint_every == 0 && done < iterations {
            let path = out_dir.join(format!("ckpt_{done:07}.bdcn"));
            trainer.net.save(&path)?;
            last_ckpt = path;
        }
    }
    log.flush()?;

    let final_path = if iterations > 0 {
        let path = out_dir.join("final.bdcn");
        trainer.net.save(&path)?;
        path
    } else {
        initial.clone()
    };
    let _ = last_ckpt;

    Ok(TrainOutcome {
        initial_checkpoint: initial,
        final_checkpoint: final_path,
        log_path,
        iterations,
    })
}
