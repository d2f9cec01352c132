//! On-disk formats.
//!
//! * Manifest: JSON Lines. Line 1 is a [`ManifestHeader`], every further
//!   line one [`SampleRecord`]. Mask paths are relative to the manifest's
//!   directory.
//! * Rankings: CSV with header `sample_id,score,rank`.
//! * Scores: CSV with header
//!   `sample_id,method,score,vote_iou,best_member,max_iou,mean_variance`.
//! * Predictions: `<root>/member_<k>/<sample_id>.png`, `k = 0..K`.
//! * Masks: 8-bit grayscale PNG, 0 = background, 255 = building.

mod manifest;
mod predictions;
mod tables;

pub use manifest::{
    gt_ranking, load_manifest, save_manifest, Manifest, ManifestHeader, NoisyLabels, SampleRecord,
    MANIFEST_FORMAT, MANIFEST_VERSION,
};
pub use predictions::{member_dir_name, write_stack, PredictionDir};
pub use tables::{
    read_ranking_csv, read_selection_jsonl, write_ranking_csv, write_scores_csv,
    write_selection_jsonl, SelectionRow,
};

use std::path::Path;

use crate::error::{Error, Result};

/// Writes `bytes` to `path` through a temp file in the same directory and
/// an atomic rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    use std::io::Write;

    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(path, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

/// Sample ids double as file names, so they are restricted to
/// `[A-Za-z0-9._-]`, may not start with `.`, and may not be empty.
pub fn is_safe_sample_id(id: &str) -> bool {
    !id.is_empty()
        && !id.starts_with('.')
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-'))
}
