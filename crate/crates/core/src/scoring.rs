//! Ensemble-based noise scores.
//!
//! * [`aer_score`]: one minus the IoU between the pixel-wise majority vote
//!   of the ensemble and the (possibly noisy) label. Lower is cleaner.
//! * [`rvr_score`]: the best member IoU against the label, regularized by
//!   the mean per-pixel vote variance:
//!   `S = IoU - (0.5 - IoU) * mean_var`. Higher is cleaner.
//! * Random: uniform scores, the lower-bound baseline.

use std::borrow::Cow;
use std::collections::{BTreeMap, HashMap};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mask::{ensure_same_dims, iou, BinaryMask};
use crate::ranking::{random_score, Orientation, Ranking};

/// `K >= 1` binary predictions of one sample, all the same size.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleStack {
    sample_id: String,
    members: Vec<BinaryMask>,
}

impl EnsembleStack {
    pub fn new(sample_id: impl Into<String>, members: Vec<BinaryMask>) -> Result<Self> {
        let sample_id = sample_id.into();
        let first = members
            .first()
            .ok_or_else(|| Error::sample(&sample_id, "ensemble stack is empty"))?;
        for m in &members[1..] {
            ensure_same_dims(first, m).map_err(|e| Error::sample(&sample_id, e))?;
        }
        Ok(Self { sample_id, members })
    }

    pub fn sample_id(&self) -> &str {
        &self.sample_id
    }

    pub fn members(&self) -> &[BinaryMask] {
        &self.members
    }

    pub fn k(&self) -> usize {
        self.members.len()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.members[0].dims()
    }

    /// Per-pixel count of members marking building.
    pub fn vote_counts(&self) -> Vec<u32> {
        let mut counts = vec![0u32; self.members[0].pixels().len()];
        for m in &self.members {
            for (c, &p) in counts.iter_mut().zip(m.pixels()) {
                *c += u32::from(p);
            }
        }
        counts
    }
}

/// Building iff strictly more than half the members agree; an even split
/// is background.
pub fn majority_vote(stack: &EnsembleStack) -> BinaryMask {
    let k = stack.k() as u32;
    let (w, h) = stack.dims();
    let pixels = stack.vote_counts().into_iter().map(|c| 2 * c > k).collect();
    BinaryMask::from_pixels(w, h, pixels).expect("dimensions come from the stack")
}

/// Per-pixel population variance of the member votes, `p(1 - p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct VarianceMap {
    pub width: usize,
    pub height: usize,
    pub values: Vec<f64>,
}

/// Returns the variance map and its mean over all pixels (in `[0, 0.25]`).
pub fn pixel_variance(stack: &EnsembleStack) -> (VarianceMap, f64) {
    let k = stack.k() as f64;
    let (w, h) = stack.dims();
    let values: Vec<f64> = stack
        .vote_counts()
        .into_iter()
        .map(|c| {
            let p = c as f64 / k;
            p * (1.0 - p)
        })
        .collect();
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    (
        VarianceMap {
            width: w,
            height: h,
            values,
        },
        mean,
    )
}

/// `max_iou - (0.5 - max_iou) * mean_variance`, rounded once.
pub fn rvr_formula(max_iou: f64, mean_variance: f64) -> f64 {
    (max_iou - 0.5).mul_add(mean_variance, max_iou)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Aer,
    Rvr,
    Random,
}

impl Method {
    pub fn orientation(self) -> Orientation {
        match self {
            Method::Aer => Orientation::LowerIsCleaner,
            Method::Rvr | Method::Random => Orientation::HigherIsCleaner,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::Aer => "aer",
            Method::Rvr => "rvr",
            Method::Random => "random",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "aer" => Ok(Method::Aer),
            "rvr" => Ok(Method::Rvr),
            "random" => Ok(Method::Random),
            other => Err(Error::Usage(format!(
                "unknown method {other:?} (expected aer, rvr or random)"
            ))),
        }
    }
}

/// Method-specific by-products of a score.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScoreAux {
    Aer {
        vote_iou: f64,
    },
    Rvr {
        best_member: usize,
        max_iou: f64,
        mean_variance: f64,
    },
    Random,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRecord {
    pub sample_id: String,
    pub method: Method,
    pub score: f64,
    pub aux: ScoreAux,
}

fn check_label(stack: &EnsembleStack, label: &BinaryMask) -> Result<()> {
    ensure_same_dims(&stack.members[0], label).map_err(|e| Error::sample(&stack.sample_id, e))
}

pub fn aer_score(stack: &EnsembleStack, noisy_label: &BinaryMask) -> Result<ScoreRecord> {
    check_label(stack, noisy_label)?;
    let vote_iou = iou(&majority_vote(stack), noisy_label)?;
    Ok(ScoreRecord {
        sample_id: stack.sample_id.clone(),
        method: Method::Aer,
        score: 1.0 - vote_iou,
        aux: ScoreAux::Aer { vote_iou },
    })
}

pub fn rvr_score(stack: &EnsembleStack, noisy_label: &BinaryMask) -> Result<ScoreRecord> {
    check_label(stack, noisy_label)?;
    let mut best_member = 0;
    let mut max_iou = f64::NEG_INFINITY;
    for (k, member) in stack.members.iter().enumerate() {
        let v = iou(member, noisy_label)?;
        // strict: earliest member wins ties
        if v > max_iou {
            max_iou = v;
            best_member = k;
        }
    }
    let (_, mean_variance) = pixel_variance(stack);
    Ok(ScoreRecord {
        sample_id: stack.sample_id.clone(),
        method: Method::Rvr,
        score: rvr_formula(max_iou, mean_variance),
        aux: ScoreAux::Rvr {
            best_member,
            max_iou,
            mean_variance,
        },
    })
}

/// Where [`score_dataset`] gets ensemble predictions from.
pub trait StackSource: Sync {
    fn stack(&self, sample_id: &str) -> Result<Cow<'_, EnsembleStack>>;
}

/// Where [`score_dataset`] gets the labels under evaluation from.
pub trait LabelSource: Sync {
    fn label(&self, sample_id: &str) -> Result<Cow<'_, BinaryMask>>;
}

macro_rules! map_source {
    ($map:ident) => {
        impl StackSource for $map<String, EnsembleStack> {
            fn stack(&self, sample_id: &str) -> Result<Cow<'_, EnsembleStack>> {
                self.get(sample_id)
                    .map(Cow::Borrowed)
                    .ok_or_else(|| Error::sample(sample_id, "no ensemble stack"))
            }
        }

        impl LabelSource for $map<String, BinaryMask> {
            fn label(&self, sample_id: &str) -> Result<Cow<'_, BinaryMask>> {
                self.get(sample_id)
                    .map(Cow::Borrowed)
                    .ok_or_else(|| Error::sample(sample_id, "no label mask"))
            }
        }
    };
}

map_source!(HashMap);
map_source!(BTreeMap);

/// Stand-in source for methods that need no predictions.
pub struct NoStacks;

impl StackSource for NoStacks {
    fn stack(&self, sample_id: &str) -> Result<Cow<'_, EnsembleStack>> {
        Err(Error::sample(sample_id, "no ensemble stack"))
    }
}

/// Scores every id with `method` and ranks the result. `seed` is only used
/// by [`Method::Random`], which also reads neither stacks nor labels.
pub fn score_dataset<S: AsRef<str> + Sync>(
    method: Method,
    sample_ids: &[S],
    stacks: &dyn StackSource,
    labels: &dyn LabelSource,
    seed: u64,
) -> Result<(Vec<ScoreRecord>, Ranking)> {
    let records: Vec<ScoreRecord> = sample_ids
        .par_iter()
        .map(|id| {
            let id = id.as_ref();
            match method {
                Method::Random => Ok(ScoreRecord {
                    sample_id: id.to_owned(),
                    method,
                    score: random_score(seed, id),
                    aux: ScoreAux::Random,
                }),
                Method::Aer | Method::Rvr => {
                    let stack = stacks.stack(id)?;
                    if stack.sample_id() != id {
                        return Err(Error::sample(id, "stack belongs to another sample"));
                    }
                    let label = labels.label(id)?;
                    if method == Method::Aer {
                        aer_score(&stack, &label)
                    } else {
                        rvr_score(&stack, &label)
                    }
                }
            }
        })
        .collect::<Result<_>>()?;
    let ranking = Ranking::from_scores(
        records.iter().map(|r| (r.sample_id.clone(), r.score)),
        method.orientation(),
    )?;
    Ok((records, ranking))
}
