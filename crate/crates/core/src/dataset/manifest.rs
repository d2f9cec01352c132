use std::borrow::Cow;
use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{is_safe_sample_id, write_atomic};
use crate::error::{Error, Result};
use crate::mask::{ensure_same_dims, BinaryMask};
use crate::noise::{NoiseConfig, NoiseSpec};
use crate::ranking::{self, Ranking};
use crate::scoring::LabelSource;

pub const MANIFEST_FORMAT: &str = "segnoise-manifest";
pub const MANIFEST_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestHeader {
    pub format: String,
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub master_seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_config: Option<NoiseConfig>,
}

impl Default for ManifestHeader {
    fn default() -> Self {
        Self {
            format: MANIFEST_FORMAT.to_owned(),
            version: MANIFEST_VERSION,
            master_seed: None,
            noise_config: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleRecord {
    pub sample_id: String,
    pub clean_mask_path: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noisy_mask_path: Option<String>,
    /// Opaque reference to the source image; never opened.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image_path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_spec: Option<NoiseSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gt_iou: Option<f64>,
}

impl SampleRecord {
    pub fn new(sample_id: impl Into<String>, clean_mask_path: impl Into<String>) -> Self {
        Self {
            sample_id: sample_id.into(),
            clean_mask_path: clean_mask_path.into(),
            noisy_mask_path: None,
            image_path: None,
            noise_spec: None,
            gt_iou: None,
        }
    }
}

/// Parsed manifest. `base_dir` is the directory relative paths resolve against.
#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub header: ManifestHeader,
    pub records: Vec<SampleRecord>,
    pub base_dir: PathBuf,
}

impl Manifest {
    pub fn new(base_dir: impl Into<PathBuf>) -> Self {
        Self {
            header: ManifestHeader::default(),
            records: Vec::new(),
            base_dir: base_dir.into(),
        }
    }

    pub fn resolve(&self, relative: &str) -> PathBuf {
        self.base_dir.join(relative)
    }

    pub fn ids(&self) -> Vec<&str> {
        self.records.iter().map(|r| r.sample_id.as_str()).collect()
    }

    pub fn record(&self, sample_id: &str) -> Option<&SampleRecord> {
        self.records.iter().find(|r| r.sample_id == sample_id)
    }

    pub fn load_clean(&self, record: &SampleRecord) -> Result<BinaryMask> {
        BinaryMask::load_png(self.resolve(&record.clean_mask_path))
            .map_err(|e| Error::sample(&record.sample_id, e))
    }

    pub fn load_noisy(&self, record: &SampleRecord) -> Result<BinaryMask> {
        let rel = record
            .noisy_mask_path
            .as_deref()
            .ok_or_else(|| Error::sample(&record.sample_id, "no noisy mask recorded"))?;
        BinaryMask::load_png(self.resolve(rel)).map_err(|e| Error::sample(&record.sample_id, e))
    }

    /// Same records with every path rewritten relative to `new_base`.
    pub fn rebased(&self, new_base: &Path) -> Result<Manifest> {
        let from = absolute(&self.base_dir)?;
        let to = absolute(new_base)?;
        let rewrite = |rel: &str| -> Result<String> {
            let target = from.join(rel);
            let relative = pathdiff::diff_paths(&target, &to).unwrap_or(target);
            relative
                .to_str()
                .map(str::to_owned)
                .ok_or_else(|| Error::invalid(format!("non-UTF-8 path {}", relative.display())))
        };
        let records = self
            .records
            .iter()
            .map(|r| {
                Ok(SampleRecord {
                    clean_mask_path: rewrite(&r.clean_mask_path)?,
                    noisy_mask_path: r.noisy_mask_path.as_deref().map(rewrite).transpose()?,
                    image_path: r.image_path.as_deref().map(rewrite).transpose()?,
                    ..r.clone()
                })
            })
            .collect::<Result<_>>()?;
        Ok(Manifest {
            header: self.header.clone(),
            records,
            base_dir: new_base.to_path_buf(),
        })
    }

    fn validate(&self, path: &Path) -> Result<()> {
        let parse_err = |line: usize, message: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            message,
        };
        if self.header.format != MANIFEST_FORMAT {
            return Err(parse_err(
                1,
                format!("unknown format {:?}", self.header.format),
            ));
        }
        if self.header.version != MANIFEST_VERSION {
            return Err(parse_err(
                1,
                format!("unsupported version {}", self.header.version),
            ));
        }
        if let Some(cfg) = &self.header.noise_config {
            cfg.validate().map_err(|e| parse_err(1, e.to_string()))?;
        }
        let mut seen = BTreeSet::new();
        for (i, r) in self.records.iter().enumerate() {
            let line = i + 2;
            if !is_safe_sample_id(&r.sample_id) {
                return Err(parse_err(
                    line,
                    format!("unsafe sample id {:?}", r.sample_id),
                ));
            }
            if !seen.insert(r.sample_id.as_str()) {
                return Err(parse_err(
                    line,
                    format!("duplicate sample id {:?}", r.sample_id),
                ));
            }
            if r.gt_iou.is_some_and(|v| !(0.0..=1.0).contains(&v)) {
                return Err(parse_err(
                    line,
                    format!("gt_iou outside [0, 1] for {:?}", r.sample_id),
                ));
            }
        }
        Ok(())
    }

    fn check_files(&self, path: &Path) -> Result<()> {
        let row_err = |i: usize, e: Error| Error::Parse {
            path: path.to_path_buf(),
            line: i + 2,
            message: e.to_string(),
        };
        let outcomes: Vec<Result<()>> = self
            .records
            .par_iter()
            .enumerate()
            .map(|(i, r)| {
                let clean = self.load_clean(r).map_err(|e| row_err(i, e))?;
                if r.noisy_mask_path.is_some() {
                    let noisy = self.load_noisy(r).map_err(|e| row_err(i, e))?;
                    ensure_same_dims(&clean, &noisy)
                        .map_err(|e| row_err(i, Error::sample(&r.sample_id, e)))?;
                }
                Ok(())
            })
            .collect();
        outcomes.into_iter().collect()
    }

    pub fn to_jsonl(&self) -> Result<String> {
        let mut out =
            serde_json::to_string(&self.header).map_err(|e| Error::invalid(e.to_string()))?;
        out.push('\n');
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).map_err(|e| Error::invalid(e.to_string()))?);
            out.push('\n');
        }
        Ok(out)
    }
}

fn absolute(p: &Path) -> Result<PathBuf> {
    std::path::absolute(p).map_err(|e| Error::io(p, e))
}

/// Reads and validates a manifest. With `strict`, every referenced mask is
/// opened and clean/noisy dimensions are compared.
pub fn load_manifest(path: impl AsRef<Path>, strict: bool) -> Result<Manifest> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let (hi, header_line) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty manifest (missing header)".into()))?;
    let header: ManifestHeader =
        serde_json::from_str(header_line).map_err(|e| parse_err(hi + 1, e.to_string()))?;
    let records = lines
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| parse_err(i + 1, e.to_string())))
        .collect::<Result<Vec<SampleRecord>>>()?;
    let base_dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let manifest = Manifest {
        header,
        records,
        base_dir,
    };
    manifest.validate(path)?;
    if strict {
        manifest.check_files(path)?;
    }
    Ok(manifest)
}

/// Writes the manifest atomically. Record paths are written as stored, so
/// they should already be relative to `path`'s directory (see
/// [`Manifest::rebased`]).
pub fn save_manifest(manifest: &Manifest, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    manifest.validate(path)?;
    write_atomic(path, manifest.to_jsonl()?.as_bytes())
}

/// Ground-truth ranking of a manifest whose records all carry noisy masks.
pub fn gt_ranking(manifest: &Manifest) -> Result<Ranking> {
    let pairs: Vec<(String, BinaryMask, BinaryMask)> = manifest
        .records
        .par_iter()
        .map(|r| {
            Ok((
                r.sample_id.clone(),
                manifest.load_clean(r)?,
                manifest.load_noisy(r)?,
            ))
        })
        .collect::<Result<_>>()?;
    let borrowed: Vec<(&str, &BinaryMask, &BinaryMask)> =
        pairs.iter().map(|(id, c, n)| (id.as_str(), c, n)).collect();
    ranking::gt_ranking(&borrowed)
}

/// Serves the noisy masks of a manifest as labels, loading on demand.
pub struct NoisyLabels<'a>(pub &'a Manifest);

impl LabelSource for NoisyLabels<'_> {
    fn label(&self, sample_id: &str) -> Result<Cow<'_, BinaryMask>> {
        let record = self
            .0
            .record(sample_id)
            .ok_or_else(|| Error::sample(sample_id, "not in manifest"))?;
        self.0.load_noisy(record).map(Cow::Owned)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::{Axis, ShapePlacement, SkippedShape, VertexPlacement};

    fn every_variant() -> Vec<NoiseSpec> {
        vec![
            NoiseSpec::GlobalScale { factor: 0.1 + 0.2 },
            NoiseSpec::OneSidedScale {
                axis: Axis::Vertical,
                factor: 2.4999999999999996,
            },
            NoiseSpec::Rotation {
                angle: -89.12345678901234,
            },
            NoiseSpec::Translation { dx: -20, dy: 7 },
            NoiseSpec::Deletion {
                ratio: 0.4567,
                deleted_indices: vec![0, 4],
            },
            NoiseSpec::VertexAddition {
                n_vertices: 2,
                placements: vec![
                    VertexPlacement {
                        component: 0,
                        edge: 3,
                        offset: -1.0e-17,
                    },
                    VertexPlacement {
                        component: 1,
                        edge: 0,
                        offset: std::f64::consts::PI,
                    },
                ],
            },
            NoiseSpec::FalsePositiveAddition {
                count: 2,
                placements: vec![ShapePlacement {
                    bank_index: 12,
                    source_id: "other".into(),
                    row: 3,
                    col: 250,
                }],
                skipped: vec![SkippedShape {
                    bank_index: 1,
                    source_id: "huge".into(),
                }],
            },
        ]
    }

    #[test]
    fn round_trip_with_every_variant() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.jsonl");
        let mut m = Manifest::new(dir.path());
        m.header.master_seed = Some(u64::MAX);
        m.header.noise_config = Some(NoiseConfig::with_seed(u64::MAX));
        for (i, spec) in every_variant().into_iter().enumerate() {
            let mut r = SampleRecord::new(format!("s{i}"), format!("clean/s{i}.png"));
            r.noisy_mask_path = Some(format!("noisy/s{i}.png"));
            r.noise_spec = Some(spec);
            r.gt_iou = Some(1.0 / 3.0);
            m.records.push(r);
        }
        m.records.push(SampleRecord::new("bare", "clean/bare.png"));
        m.records[0].image_path = Some("img/s0.tif".into());
        save_manifest(&m, &path).unwrap();
        let back = load_manifest(&path, false).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn empty_manifest_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.jsonl");
        let m = Manifest::new(dir.path());
        save_manifest(&m, &path).unwrap();
        assert!(load_manifest(&path, true).unwrap().records.is_empty());
    }

    #[test]
    fn duplicate_ids_are_named() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.jsonl");
        std::fs::write(
            &path,
            "{\"format\":\"segnoise-manifest\",\"version\":1}\n\
             {\"sample_id\":\"a\",\"clean_mask_path\":\"a.png\"}\n\
             {\"sample_id\":\"a\",\"clean_mask_path\":\"b.png\"}\n",
        )
        .unwrap();
        let err = load_manifest(&path, false).unwrap_err().to_string();
        assert!(err.contains("duplicate sample id \"a\""), "{err}");
        assert!(err.contains(":3:"), "{err}");
    }

    #[test]
    fn unknown_version_and_missing_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.jsonl");
        std::fs::write(&path, "{\"format\":\"segnoise-manifest\",\"version\":9}\n").unwrap();
        assert!(load_manifest(&path, false).is_err());

        std::fs::write(
            &path,
            "{\"format\":\"segnoise-manifest\",\"version\":1}\n\
             {\"sample_id\":\"a\",\"clean_mask_path\":\"a.png\"}\n",
        )
        .unwrap();
        assert!(load_manifest(&path, false).is_ok());
        let err = load_manifest(&path, true).unwrap_err();
        assert!(err.to_string().contains(":2:"), "{err}");
    }

    #[test]
    fn strict_load_catches_dimension_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        BinaryMask::new(256, 256)
            .save_png(dir.path().join("c.png"))
            .unwrap();
        BinaryMask::new(128, 128)
            .save_png(dir.path().join("n.png"))
            .unwrap();
        let path = dir.path().join("m.jsonl");
        let mut m = Manifest::new(dir.path());
        let mut r = SampleRecord::new("a", "c.png");
        r.noisy_mask_path = Some("n.png".into());
        m.records.push(r);
        save_manifest(&m, &path).unwrap();
        assert!(load_manifest(&path, false).is_ok());
        let err = load_manifest(&path, true).unwrap_err().to_string();
        assert!(err.contains("dimension mismatch"), "{err}");
    }

    #[test]
    fn save_to_unwritable_location_fails() {
        let err = save_manifest(&Manifest::new("."), "/nonexistent-dir/sub/m.jsonl").unwrap_err();
        assert_eq!(err.kind(), crate::ErrorKind::Io);
    }

    #[test]
    fn rebasing_rewrites_paths() {
        let dir = tempfile::tempdir().unwrap();
        let mut m = Manifest::new(dir.path().join("a"));
        m.records.push(SampleRecord::new("x", "masks/x.png"));
        let moved = m.rebased(&dir.path().join("b/c")).unwrap();
        assert_eq!(moved.records[0].clean_mask_path, "../../a/masks/x.png");
    }
}
