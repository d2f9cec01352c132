//! Noise rankings: construction, comparison, averaging, stratification and
//! top-fraction selection.
//!
//! A [`Ranking`] is always stored best (least noisy) first. Equal scores are
//! ordered by ascending sample id, which makes every ranking canonical and
//! every derived quantity reproducible.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mask::{iou, BinaryMask};
use crate::metrics::CorrelationReport;
use crate::noise::NoiseType;
use crate::seed::sample_stream;

/// Which end of the score scale means "clean".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// Quality scores such as IoU.
    HigherIsCleaner,
    /// Noise scores and mean rank positions.
    LowerIsCleaner,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankEntry {
    pub sample_id: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ranking {
    entries: Vec<RankEntry>,
    orientation: Orientation,
}

impl Ranking {
    /// Sorts `(sample_id, score)` pairs best-first. Duplicate ids and NaN
    /// scores are rejected.
    pub fn from_scores<I, S>(scores: I, orientation: Orientation) -> Result<Self>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        let mut entries: Vec<RankEntry> = scores
            .into_iter()
            .map(|(id, score)| RankEntry {
                sample_id: id.into(),
                score,
            })
            .collect();
        if let Some(bad) = entries.iter().find(|e| e.score.is_nan()) {
            return Err(Error::sample(&bad.sample_id, "score is NaN"));
        }
        let mut seen = BTreeSet::new();
        for e in &entries {
            if !seen.insert(e.sample_id.as_str()) {
                return Err(Error::invalid(format!(
                    "duplicate sample id {:?}",
                    e.sample_id
                )));
            }
        }
        entries.sort_by(|a, b| {
            let by_score = match orientation {
                Orientation::HigherIsCleaner => b.score.total_cmp(&a.score),
                Orientation::LowerIsCleaner => a.score.total_cmp(&b.score),
            };
            by_score.then_with(|| a.sample_id.cmp(&b.sample_id))
        });
        Ok(Self {
            entries,
            orientation,
        })
    }

    pub fn entries(&self) -> &[RankEntry] {
        &self.entries
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sample ids best-first.
    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.sample_id.as_str())
    }

    pub fn positions(&self) -> RankPositions {
        RankPositions(
            self.entries
                .iter()
                .enumerate()
                .map(|(i, e)| (e.sample_id.clone(), i + 1))
                .collect(),
        )
    }
}

/// Sample id → 1-based rank position (1 = least noisy).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankPositions(BTreeMap<String, usize>);

impl RankPositions {
    pub fn get(&self, sample_id: &str) -> Option<usize> {
        self.0.get(sample_id).copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Entries in sample-id order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> {
        self.0.iter().map(|(k, &v)| (k.as_str(), v))
    }

    fn id_set(&self) -> BTreeSet<&str> {
        self.0.keys().map(String::as_str).collect()
    }
}

fn ensure_same_ids(left: &RankPositions, right: &RankPositions) -> Result<()> {
    let (a, b) = (left.id_set(), right.id_set());
    if a != b {
        return Err(Error::IdMismatch {
            only_left: a.difference(&b).map(|s| s.to_string()).collect(),
            only_right: b.difference(&a).map(|s| s.to_string()).collect(),
        });
    }
    Ok(())
}

/// Ground-truth ranking: IoU between clean and noisy mask per sample,
/// highest first.
pub fn gt_ranking(samples: &[(&str, &BinaryMask, &BinaryMask)]) -> Result<Ranking> {
    let scores: Vec<(String, f64)> = samples
        .par_iter()
        .map(|&(id, clean, noisy)| {
            iou(clean, noisy)
                .map(|v| (id.to_owned(), v))
                .map_err(|e| Error::sample(id, e))
        })
        .collect::<Result<_>>()?;
    Ranking::from_scores(scores, Orientation::HigherIsCleaner)
}

/// Tau-b and rho between the rank positions of two rankings over the same ids.
pub fn compare(predicted: &Ranking, reference: &Ranking) -> Result<CorrelationReport> {
    let (p, r) = (predicted.positions(), reference.positions());
    ensure_same_ids(&p, &r)?;
    let (x, y): (Vec<f64>, Vec<f64>) = p
        .iter()
        .map(|(id, pos)| (pos as f64, r.get(id).expect("same id set") as f64))
        .unzip();
    CorrelationReport::compute(&x, &y)
}

/// Uniform `[0, 1)` score for one id under `seed`.
pub fn random_score(seed: u64, sample_id: &str) -> f64 {
    sample_stream(seed, "random", sample_id).random::<f64>()
}

/// Random-baseline ranking. Each id's score depends only on `(seed, id)`.
pub fn random_ranking<S: AsRef<str>>(sample_ids: &[S], seed: u64) -> Result<Ranking> {
    Ranking::from_scores(
        sample_ids
            .iter()
            .map(|id| (id.as_ref().to_owned(), random_score(seed, id.as_ref()))),
        Orientation::HigherIsCleaner,
    )
}

/// Combines rankings by each sample's mean rank position (lower = cleaner).
pub fn combine_average(rankings: &[Ranking]) -> Result<Ranking> {
    if rankings.len() < 2 {
        return Err(Error::invalid("rank averaging needs at least two rankings"));
    }
    let positions: Vec<RankPositions> = rankings.iter().map(Ranking::positions).collect();
    for other in &positions[1..] {
        ensure_same_ids(&positions[0], other)?;
    }
    let k = positions.len() as f64;
    let means = positions[0].iter().map(|(id, _)| {
        let total: usize = positions
            .iter()
            .map(|p| p.get(id).expect("same id set"))
            .sum();
        (id.to_owned(), total as f64 / k)
    });
    Ranking::from_scores(means, Orientation::LowerIsCleaner)
}

/// Per-noise-type correlations between two rankings.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Stratification {
    pub reports: BTreeMap<NoiseType, CorrelationReport>,
    /// Types left out because they had fewer than two samples.
    pub omitted: BTreeMap<NoiseType, usize>,
}

/// Restricts both rankings to each noise type's samples and correlates the
/// restricted rank positions.
pub fn stratify_by_noise_type<'a, I>(
    combined: &Ranking,
    reference: &Ranking,
    noise_types: I,
) -> Result<Stratification>
where
    I: IntoIterator<Item = (&'a str, NoiseType)>,
{
    let (p, r) = (combined.positions(), reference.positions());
    ensure_same_ids(&p, &r)?;
    let types: BTreeMap<&str, NoiseType> = noise_types.into_iter().collect();
    let mut groups: BTreeMap<NoiseType, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for (id, pos) in p.iter() {
        let ty = types
            .get(id)
            .ok_or_else(|| Error::sample(id, "no noise type recorded"))?;
        let g = groups.entry(*ty).or_default();
        g.0.push(pos as f64);
        g.1.push(r.get(id).expect("same id set") as f64);
    }
    let mut out = Stratification::default();
    for ty in NoiseType::ALL {
        match groups.get(&ty) {
            Some((x, y)) if x.len() >= 2 => {
                out.reports.insert(ty, CorrelationReport::compute(x, y)?);
            }
            other => {
                out.omitted.insert(ty, other.map_or(0, |g| g.0.len()));
            }
        }
    }
    Ok(out)
}

/// First `floor(fraction * n)` ids, best first. `fraction` must lie in `(0, 1]`.
pub fn select_top(ranking: &Ranking, fraction: f64) -> Result<Vec<String>> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::OutOfRange {
            name: "fraction",
            value: fraction,
            min: 0.0,
            max: 1.0,
        });
    }
    // absorb representation error such as 0.29 * 100 = 28.999999999999996
    let keep = ((fraction * ranking.len() as f64) + 1e-9).floor() as usize;
    Ok(ranking
        .ids()
        .take(keep.min(ranking.len()))
        .map(str::to_owned)
        .collect())
}
