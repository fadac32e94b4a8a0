use crate::error::{NetError, Result};

/// Channel plan of the 13 VGG16 convolution layers grouped into 5 blocks.
pub const VGG16_PLAN: [&[usize]; 5] = [
    &[64, 64],
    &[128, 128],
    &[256, 256, 256],
    &[512, 512, 512],
    &[512, 512, 512],
];

/// Weight initialization for backbone and SEM convolutions. Score heads are
/// always zero-initialized and the fusion layer starts at 1/(2S), so a fresh
/// network predicts 0.5 everywhere and the cascade targets start stable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightInit {
    /// Zero-mean Gaussian with fixed standard deviation.
    Gaussian { std: f32 },
    /// Zero-mean Gaussian scaled by sqrt(2 / fan_in).
    FanIn,
}

impl Default for WeightInit {
    fn default() -> Self {
        WeightInit::Gaussian { std: 0.01 }
    }
}

/// Full architecture description.
#[derive(Debug, Clone, PartialEq)]
pub struct BdcnConfig {
    /// Number of ID blocks S, between 2 and 5.
    pub num_blocks: usize,
    /// Number of dilated branches K per SEM; 0 turns each SEM into a
    /// pass-through that copies its input.
    pub sem_branches: usize,
    /// Dilation rate factor r0; branch k uses rate max(1, r0 * k).
    pub dilation_factor: usize,
    /// Base SEM width. Blocks 3..5 use it as-is; blocks 1 and 2 use a quarter
    /// of it (their features are cheap and wide, and the slimmer modules keep
    /// the shallow model sizes in line with the deeper ones).
    pub sem_mid_channels: usize,
    /// Intermediate width of the two 1x1 score-head convolutions per block.
    pub head_channels: usize,
    /// Per-block convolution widths; defaults to the VGG16 plan.
    pub vgg_channel_plan: Vec<Vec<usize>>,
    pub input_channels: usize,
    pub seed: u64,
    pub weight_init: WeightInit,
}

impl Default for BdcnConfig {
    fn default() -> Self {
        Self {
            num_blocks: 5,
            sem_branches: 3,
            dilation_factor: 4,
            sem_mid_channels: 32,
            head_channels: 21,
            vgg_channel_plan: VGG16_PLAN.iter().map(|b| b.to_vec()).collect(),
            input_channels: 3,
            seed: 0,
            weight_init: WeightInit::default(),
        }
    }
}

impl BdcnConfig {
    /// Default architecture truncated to `s` blocks.
    pub fn with_blocks(s: usize) -> Self {
        Self {
            num_blocks: s,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=5).contains(&self.num_blocks) {
            return Err(NetError::Config(format!(
                "num_blocks must be in [2, 5], got {}",
                self.num_blocks
            )));
        }
        if self.vgg_channel_plan.len() < self.num_blocks {
            return Err(NetError::Config(format!(
                "channel plan covers {} blocks, need {}",
                self.vgg_channel_plan.len(),
                self.num_blocks
            )));
        }
        for (b, widths) in self.vgg_channel_plan.iter().take(self.num_blocks).enumerate() {
            if widths.is_empty() || widths.iter().any(|&c| c == 0) {
                return Err(NetError::Config(format!("block {} has an empty/zero width", b + 1)));
            }
        }
        if self.sem_mid_channels == 0 || self.head_channels == 0 || self.input_channels == 0 {
            return Err(NetError::Config(
                "sem_mid_channels, head_channels and input_channels must be >= 1".into(),
            ));
        }
        Ok(())
    }

    /// Dilation rates r_k = max(1, r0 * k) for k = 1..=K; non-decreasing.
    pub fn rate_schedule(&self) -> Vec<usize> {
        (1..=self.sem_branches)
            .map(|k| (self.dilation_factor * k).max(1))
            .collect()
    }

    /// SEM width for 0-based block index.
    pub fn sem_width(&self, block: usize) -> usize {
        if block < 2 {
            (self.sem_mid_channels / 4).max(1)
        } else {
            self.sem_mid_channels
        }
    }

    /// Width of the feature map the score heads of `block` consume.
    pub fn head_input_width(&self, block: usize) -> usize {
        if self.sem_branches == 0 {
            self.vgg_channel_plan[block].last().copied().unwrap_or(1)
        } else {
            self.sem_width(block)
        }
    }

    /// Smallest input side length the pooling pyramid supports.
    pub fn min_input_side(&self) -> usize {
        1 << (self.num_blocks - 1)
    }

    /// Serialize to checkpoint meta key/value pairs.
    pub fn to_meta(&self) -> Vec<(String, String)> {
        let plan = self
            .vgg_channel_plan
            .iter()
            .map(|b| b.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(","))
            .collect::<Vec<_>>()
            .join("|");
        let init = match self.weight_init {
            WeightInit::Gaussian { std } => format!("gaussian:{std}"),
            WeightInit::FanIn => "fan_in".to_string(),
        };
        vec![
            ("num_blocks".into(), self.num_blocks.to_string()),
            ("sem_branches".into(), self.sem_branches.to_string()),
            ("dilation_factor".into(), self.dilation_factor.to_string()),
            ("sem_mid_channels".into(), self.sem_mid_channels.to_string()),
            ("head_channels".into(), self.head_channels.to_string()),
            ("vgg_channel_plan".into(), plan),
            ("input_channels".into(), self.input_channels.to_string()),
            ("seed".into(), self.seed.to_string()),
            ("weight_init".into(), init),
        ]
    }

    /// Rebuild a config from checkpoint meta pairs.
    pub fn from_meta(meta: &[(String, String)]) -> Result<Self> {
        let get = |key: &str| -> Result<&str> {
            meta.iter()
                .find(|(k, _)| k == key)
                .map(|(_, v)| v.as_str())
                .ok_or_else(|| NetError::Config(format!("checkpoint meta missing '{key}'")))
        };
        let parse_usize = |key: &str| -> Result<usize> {
            get(key)?
                .parse()
                .map_err(|_| NetError::Config(format!("bad value for '{key}'")))
        };
        let plan = get("vgg_channel_plan")?
            .split('|')
            .map(|blk| {
                blk.split(',')
                    .map(|c| c.parse::<usize>())
                    .collect::<std::result::Result<Vec<_>, _>>()
            })
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| NetError::Config("bad value for 'vgg_channel_plan'".into()))?;
        let init_str = get("weight_init")?;
        let weight_init = if init_str == "fan_in" {
            WeightInit::FanIn
        } else if let Some(s) = init_str.strip_prefix("gaussian:") {
            WeightInit::Gaussian {
                std: s
                    .parse()
                    .map_err(|_| NetError::Config("bad value for 'weight_init'".into()))?,
            }
        } else {
            return Err(NetError::Config(format!("unknown weight_init '{init_str}'")));
        };
        let cfg = Self {
            num_blocks: parse_usize("num_blocks")?,
            sem_branches: parse_usize("sem_branches")?,
            dilation_factor: parse_usize("dilation_factor")?,
            sem_mid_channels: parse_usize("sem_mid_channels")?,
            head_channels: parse_usize("head_channels")?,
            vgg_channel_plan: plan,
            input_channels: parse_usize("input_channels")?,
            seed: get("seed")?
                .parse()
                .map_err(|_| NetError::Config("bad value for 'seed'".into()))?,
            weight_init,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_schedule_matches_rate_table() {
        let mut cfg = BdcnConfig::default();
        let rows: [(usize, [usize; 3]); 5] = [
            (0, [1, 1, 1]),
            (1, [1, 2, 3]),
            (2, [2, 4, 6]),
            (4, [4, 8, 12]),
            (8, [8, 16, 24]),
        ];
        for (r0, expect) in rows {
            cfg.dilation_factor = r0;
            assert_eq!(cfg.rate_schedule(), expect.to_vec(), "r0 = {r0}");
        }
    }

    #[test]
    fn schedule_is_non_decreasing() {
        for r0 in 0..9 {
            for k in 0..6 {
                let cfg = BdcnConfig {
                    dilation_factor: r0,
                    sem_branches: k,
                    ..BdcnConfig::default()
                };
                let sched = cfg.rate_schedule();
                assert!(sched.windows(2).all(|w| w[0] <= w[1]));
                assert!(sched.iter().all(|&r| r >= 1));
            }
        }
    }

    #[test]
    fn validation_bounds_num_blocks() {
        assert!(BdcnConfig::with_blocks(1).validate().is_err());
        assert!(BdcnConfig::with_blocks(6).validate().is_err());
        for s in 2..=5 {
            assert!(BdcnConfig::with_blocks(s).validate().is_ok());
        }
    }

    #[test]
    fn meta_round_trip() {
        let cfg = BdcnConfig {
            num_blocks: 3,
            seed: 42,
            weight_init: WeightInit::FanIn,
            ..BdcnConfig::default()
        };
        let meta = cfg.to_meta();
        let back = BdcnConfig::from_meta(&meta).unwrap();
        assert_eq!(back, cfg);
    }
}
