//! Architecture report from a config file or a checkpoint: per-layer shapes
//! and parameter counts, SEM rate schedules, receptive-field extents, and
//! the checkpoint's echoed configuration.

use std::fmt::Write as _;
use std::path::Path;

use bdcn_net::{architecture_report, BdcnConfig};
use bdcn_tensor::checkpoint::Checkpoint;

use crate::config::RunConfig;
use crate::error::Result;

pub fn inspect_config(cfg: &BdcnConfig) -> String {
    let report = architecture_report(cfg);
    format!(
        "architecture: {} blocks, K={}, r0={}, rates [{}]\n\n{}",
        cfg.num_blocks,
        cfg.sem_branches,
        cfg.dilation_factor,
        cfg.rate_schedule()
            .iter()
            .map(|r| r.to_string())
            .collect::<Vec<_>>()
            .join(","),
        report
    )
}

pub fn cmd_inspect_config(path: &Path) -> Result<String> {
    let run = RunConfig::load(path)?;
    Ok(inspect_config(&run.network_config()?))
}

pub fn cmd_inspect_checkpoint(path: &Path) -> Result<String> {
    let ckpt = Checkpoint::load(path)?;
    let cfg = BdcnConfig::from_meta(&ckpt.meta)?;
    let mut out = String::new();
    writeln!(out, "checkpoint: {}", path.display()).unwrap();
    writeln!(out, "stored parameters: {}", ckpt.params.len()).unwrap();
    writeln!(out, "config echo:").unwrap();
    for (k, v) in &ckpt.meta {
        writeln!(out, "  {k} = {v}").unwrap();
    }
    writeln!(out).unwrap();
    out.push_str(&inspect_config(&cfg));
    Ok(out)
}
