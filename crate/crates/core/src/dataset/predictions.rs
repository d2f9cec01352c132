use std::borrow::Cow;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::mask::BinaryMask;
use crate::scoring::{EnsembleStack, StackSource};

pub fn member_dir_name(k: usize) -> String {
    format!("member_{k}")
}

/// Ensemble predictions stored as `<root>/member_<k>/<sample_id>.png`.
#[derive(Debug, Clone)]
pub struct PredictionDir {
    root: PathBuf,
    k: usize,
}

impl PredictionDir {
    /// Scans `root` for `member_0 .. member_{K-1}`; the numbering must be gap-free.
    pub fn open(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        let entries = std::fs::read_dir(&root).map_err(|e| Error::io(&root, e))?;
        let mut found = Vec::new();
        for entry in entries {
            let entry = entry.map_err(|e| Error::io(&root, e))?;
            if !entry.path().is_dir() {
                continue;
            }
            let name = entry.file_name();
            let Some(k) = name
                .to_str()
                .and_then(|n| n.strip_prefix("member_"))
                .and_then(|k| k.parse::<usize>().ok())
            else {
                continue;
            };
            found.push(k);
        }
        found.sort_unstable();
        if found.is_empty() {
            return Err(Error::invalid(format!(
                "{}: no member_<k> directories",
                root.display()
            )));
        }
        if found.iter().enumerate().any(|(i, &k)| i != k) {
            return Err(Error::invalid(format!(
                "{}: member directories must be numbered 0..K without gaps, found {found:?}",
                root.display()
            )));
        }
        Ok(Self {
            root,
            k: found.len(),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn member_path(&self, k: usize, sample_id: &str) -> PathBuf {
        self.root
            .join(member_dir_name(k))
            .join(format!("{sample_id}.png"))
    }

    pub fn load_stack(&self, sample_id: &str) -> Result<EnsembleStack> {
        let members = (0..self.k)
            .map(|k| {
                BinaryMask::load_png(self.member_path(k, sample_id))
                    .map_err(|e| Error::sample(sample_id, e))
            })
            .collect::<Result<_>>()?;
        EnsembleStack::new(sample_id, members)
    }
}

impl StackSource for PredictionDir {
    fn stack(&self, sample_id: &str) -> Result<Cow<'_, EnsembleStack>> {
        self.load_stack(sample_id).map(Cow::Owned)
    }
}

/// Writes every member of `stack` under `root`, creating member directories.
pub fn write_stack(root: &Path, stack: &EnsembleStack) -> Result<()> {
    for (k, member) in stack.members().iter().enumerate() {
        let dir = root.join(member_dir_name(k));
        std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        member.save_png(dir.join(format!("{}.png", stack.sample_id())))?;
    }
    Ok(())
}
