//! Training samples and the dataset manifest.
//!
//! Manifest format: plain text, one record per line,
//! `image_path<TAB>gt_path[,gt_path2,...]`. Paths are resolved relative to
//! the manifest's directory. Multiple GT paths are annotator maps that get
//! averaged into the consensus ground truth.

use std::path::{Path, PathBuf};

use bdcn_loss::ConsensusGT;
use bdcn_tensor::{EdgeProbMap, Tensor4};

use crate::error::{DataError, Result};
use crate::raster::{load_image_rgb, load_map};

/// One image with its consensus ground truth.
#[derive(Debug, Clone)]
pub struct Sample {
    pub id: String,
    pub image: Tensor4,
    pub gt: ConsensusGT,
}

impl Sample {
    pub fn dims(&self) -> (usize, usize) {
        let s = self.image.shape();
        (s.h, s.w)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestEntry {
    pub id: String,
    pub image: PathBuf,
    pub gts: Vec<PathBuf>,
}

#[derive(Debug, Clone, Default)]
pub struct Manifest {
    pub entries: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| DataError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        let mut entries = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split('\t');
            let image = fields.next().filter(|s| !s.is_empty()).ok_or_else(|| {
                DataError::Ingest(format!("{}:{}: missing image path", path.display(), lineno + 1))
            })?;
            let gts: Vec<PathBuf> = fields
                .next()
                .map(|gt_field| gt_field.split(',').map(|g| base.join(g.trim())).collect())
                .unwrap_or_default();
            let image = base.join(image);
            let id = image
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| format!("line{}", lineno + 1));
            entries.push(ManifestEntry { id, image, gts });
        }
        Ok(Self { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Average annotator maps into a consensus map.
pub fn consensus_of(maps: &[EdgeProbMap]) -> Result<EdgeProbMap> {
    let first = maps
        .first()
        .ok_or_else(|| DataError::Ingest("no annotator maps given".into()))?;
    let (h, w) = (first.height(), first.width());
    let mut acc = vec![0.0f64; h * w];
    for m in maps {
        if m.height() != h || m.width() != w {
            return Err(DataError::Ingest(format!(
                "annotator map {}x{} does not match {}x{}",
                m.height(),
                m.width(),
                h,
                w
            )));
        }
        for (a, &v) in acc.iter_mut().zip(m.data()) {
            *a += v as f64;
        }
    }
    let inv = 1.0 / maps.len() as f64;
    Ok(EdgeProbMap::from_vec(h, w, acc.iter().map(|&v| (v * inv) as f32).collect())?)
}

/// Load one sample: image plus consensus of one or more annotator rasters.
pub fn load_sample(entry: &ManifestEntry, gamma: f32) -> Result<Sample> {
    let image = load_image_rgb(&entry.image)?;
    if entry.gts.is_empty() {
        return Err(DataError::Ingest(format!(
            "entry '{}' has no ground-truth paths",
            entry.id
        )));
    }
    let maps = entry
        .gts
        .iter()
        .map(|p| load_map(p))
        .collect::<Result<Vec<_>>>()?;
    let consensus = consensus_of(&maps)?;
    let ishape = image.shape();
    if consensus.height() != ishape.h || consensus.width() != ishape.w {
        return Err(DataError::Ingest(format!(
            "entry '{}': image {}x{} vs ground truth {}x{}",
            entry.id,
            ishape.h,
            ishape.w,
            consensus.height(),
            consensus.width()
        )));
    }
    let gt = ConsensusGT::new(
        consensus.height(),
        consensus.width(),
        consensus.data().to_vec(),
        gamma,
    )?;
    Ok(Sample {
        id: entry.id.clone(),
        image,
        gt,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn consensus_averages_annotators() {
        // Two annotators agree on one pixel; one marks an extra pixel.
        let a = EdgeProbMap::from_vec(1, 2, vec![1.0, 1.0]).unwrap();
        let b = EdgeProbMap::from_vec(1, 2, vec![1.0, 0.0]).unwrap();
        let c = consensus_of(&[a.clone(), b.clone()]).unwrap();
        assert_eq!(c.data(), &[1.0, 0.5]);
        // Order-invariant.
        let c2 = consensus_of(&[b, a]).unwrap();
        assert_eq!(c.data(), c2.data());
    }

    #[test]
    fn single_annotator_is_identity() {
        let a = EdgeProbMap::from_vec(1, 3, vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(consensus_of(std::slice::from_ref(&a)).unwrap().data(), a.data());
    }

    #[test]
    fn three_annotator_consensus_matches_hand_mean() {
        let maps = [
            EdgeProbMap::from_vec(1, 3, vec![1.0, 0.0, 1.0]).unwrap(),
            EdgeProbMap::from_vec(1, 3, vec![1.0, 1.0, 0.0]).unwrap(),
            EdgeProbMap::from_vec(1, 3, vec![0.0, 0.0, 1.0]).unwrap(),
        ];
        let c = consensus_of(&maps).unwrap();
        let expect = [2.0 / 3.0, 1.0 / 3.0, 2.0 / 3.0];
        for (a, e) in c.data().iter().zip(expect) {
            assert!((a - e).abs() < 1e-6);
        }
    }

    #[test]
    fn manifest_parses_relative_paths() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = dir.path().join("set.tsv");
        std::fs::write(&manifest, "img/a.png\tgt/a.png\nimg/b.png\tgt/b1.png,gt/b2.png\n").unwrap();
        let m = Manifest::load(&manifest).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m.entries[0].id, "a");
        assert_eq!(m.entries[0].image, dir.path().join("img/a.png"));
        assert_eq!(m.entries[1].gts.len(), 2);
        assert_eq!(m.entries[1].gts[1], dir.path().join("gt/b2.png"));
    }

    #[test]
    fn mismatched_gt_dims_fail_ingest() {
        let dir = tempfile::tempdir().unwrap();
        let img = EdgeProbMap::from_vec(2, 2, vec![0.5; 4]).unwrap();
        let gt = EdgeProbMap::from_vec(2, 3, vec![0.0; 6]).unwrap();
        crate::raster::save_map_png(&dir.path().join("i.png"), &img).unwrap();
        crate::raster::save_map_png(&dir.path().join("g.png"), &gt).unwrap();
        let entry = ManifestEntry {
            id: "i".into(),
            image: dir.path().join("i.png"),
            gts: vec![dir.path().join("g.png")],
        };
        assert!(matches!(load_sample(&entry, 0.3), Err(DataError::Ingest(_))));
    }
}
