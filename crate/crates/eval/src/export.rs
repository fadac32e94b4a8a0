//! CSV and summary-text writers for evaluation results.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::summary::{EvalSummary, PRPoint};

pub fn write_pr_csv(path: &Path, points: &[PRPoint]) -> std::io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "threshold,tp,fp,fn,precision,recall,f_measure")?;
    for p in points {
        writeln!(
            w,
            "{:.2},{},{},{},{:.6},{:.6},{:.6}",
            p.threshold, p.tp, p.fp, p.false_neg, p.precision, p.recall, p.f_measure
        )?;
    }
    w.flush()
}

pub fn summary_text(s: &EvalSummary) -> String {
    format!(
        "ODS\t{:.4}\nOIS\t{:.4}\nAP\t{:.4}\n",
        s.ods_f, s.ois_f, s.ap
    )
}

pub fn write_summary(path: &Path, s: &EvalSummary) -> std::io::Result<()> {
    std::fs::write(path, summary_text(s))
}

pub fn write_per_image_csv(path: &Path, ids: &[String], s: &EvalSummary) -> std::io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "id,best_threshold,best_f")?;
    for best in &s.per_image_best {
        let id = ids.get(best.image).map(String::as_str).unwrap_or("?");
        writeln!(w, "{},{:.2},{:.6}", id, best.threshold, best.f_measure)?;
    }
    w.flush()
}
