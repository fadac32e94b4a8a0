//! Run configuration: structured text (key = value sections, TOML syntax).
//! Every field has a default, so a bare `train` run uses the standard
//! recipe: lr 1e-6, momentum 0.9, weight decay 2e-4, batch 10, lr x0.1
//! every 10k iterations, w_side 0.5, w_fuse 1.1, lambda 1.1, gamma 0.3.

use std::path::{Path, PathBuf};

use bdcn_data::AugmentSpec;
use bdcn_net::{BdcnConfig, WeightInit};
use serde::Deserialize;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Deserialize, Default, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub network: NetworkSection,
    pub optim: OptimSection,
    pub loss: LossSection,
    pub data: DataSection,
    pub output: OutputSection,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkSection {
    pub num_blocks: usize,
    pub sem_branches: usize,
    pub dilation_factor: usize,
    pub sem_mid_channels: usize,
    pub head_channels: usize,
    pub input_channels: usize,
    /// Per-block widths as "64,64|128,128|..."; empty selects the VGG16 plan.
    pub vgg_channel_plan: String,
    /// "gaussian:<std>" or "fan_in".
    pub weight_init: String,
}

impl Default for NetworkSection {
    fn default() -> Self {
        Self {
            num_blocks: 2,
            sem_branches: 3,
            dilation_factor: 4,
            sem_mid_channels: 32,
            head_channels: 21,
            input_channels: 3,
            vgg_channel_plan: String::new(),
            weight_init: String::new(),
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct OptimSection {
    pub learning_rate: f32,
    pub momentum: f32,
    pub weight_decay: f32,
    pub batch_size: usize,
    pub iterations: usize,
    pub lr_decay_step: usize,
    pub lr_decay_factor: f32,
}

impl Default for OptimSection {
    fn default() -> Self {
        Self {
            learning_rate: 1e-6,
            momentum: 0.9,
            weight_decay: 2e-4,
            batch_size: 10,
            iterations: 1000,
            lr_decay_step: 10_000,
            lr_decay_factor: 0.1,
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct LossSection {
    pub w_side: f32,
    pub w_fuse: f32,
    pub lambda: f32,
    pub gamma: f32,
}

impl Default for LossSection {
    fn default() -> Self {
        Self {
            w_side: 0.5,
            w_fuse: 1.1,
            lambda: 1.1,
            gamma: 0.3,
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct DataSection {
    pub manifest: PathBuf,
    pub augment: bool,
    pub flip: bool,
    pub rotations: Vec<i32>,
    pub scales: Vec<f32>,
    /// Optional crop "h,w" applied after scaling.
    pub crop: String,
}

impl Default for DataSection {
    fn default() -> Self {
        Self {
            manifest: PathBuf::new(),
            augment: false,
            flip: true,
            rotations: vec![0, 90, 180, 270],
            scales: vec![0.75, 1.0, 1.25],
            crop: String::new(),
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub checkpoint_every: usize,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            checkpoint_every: 1000,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
        let mut cfg: RunConfig = toml::from_str(&text).map_err(|e| CliError::Config {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
        // Relative manifest paths resolve against the config file.
        if !cfg.data.manifest.as_os_str().is_empty() && cfg.data.manifest.is_relative() {
            if let Some(base) = path.parent() {
                cfg.data.manifest = base.join(&cfg.data.manifest);
            }
        }
        Ok(cfg)
    }

    pub fn network_config(&self) -> Result<BdcnConfig> {
        let mut cfg = BdcnConfig {
            num_blocks: self.network.num_blocks,
            sem_branches: self.network.sem_branches,
            dilation_factor: self.network.dilation_factor,
            sem_mid_channels: self.network.sem_mid_channels,
            head_channels: self.network.head_channels,
            input_channels: self.network.input_channels,
            seed: self.seed,
            ..BdcnConfig::default()
        };
        if !self.network.vgg_channel_plan.is_empty() {
            cfg.vgg_channel_plan = self
                .network
                .vgg_channel_plan
                .split('|')
                .map(|blk| {
                    blk.split(',')
                        .map(|c| c.trim().parse::<usize>())
                        .collect::<std::result::Result<Vec<_>, _>>()
                })
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| CliError::Usage("bad vgg_channel_plan, expected \"64,64|128,128\"".into()))?;
        }
        if !self.network.weight_init.is_empty() {
            cfg.weight_init = if self.network.weight_init == "fan_in" {
                WeightInit::FanIn
            } else if let Some(s) = self.network.weight_init.strip_prefix("gaussian:") {
                WeightInit::Gaussian {
                    std: s
                        .parse()
                        .map_err(|_| CliError::Usage(format!("bad weight_init '{}'", self.network.weight_init)))?,
                }
            } else {
                return Err(CliError::Usage(format!(
                    "bad weight_init '{}', expected \"gaussian:<std>\" or \"fan_in\"",
                    self.network.weight_init
                )));
            };
        }
        Ok(cfg)
    }

    pub fn augment_spec(&self) -> Result<Option<AugmentSpec>> {
        if !self.data.augment {
            return Ok(None);
        }
        let crop = if self.data.crop.is_empty() {
            None
        } else {
            let parts: Vec<&str> = self.data.crop.split(',').map(str::trim).collect();
            if parts.len() != 2 {
                return Err(CliError::Usage("crop must be \"h,w\"".into()));
            }
            let h = parts[0].parse().map_err(|_| CliError::Usage("bad crop height".into()))?;
            let w = parts[1].parse().map_err(|_| CliError::Usage("bad crop width".into()))?;
            Some((h, w))
        };
        Ok(Some(AugmentSpec {
            flip: self.data.flip,
            rotations: self.data.rotations.clone(),
            scales: self.data.scales.clone(),
            crop,
            seed: 0, // reseeded per iteration by the trainer
        }))
    }
}
