use super::{ensure_same_dims, BinaryMask};
use crate::error::Result;

/// Pixel confusion counts of `pred` against `reference`, building = positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    pub tn: u64,
}

impl ConfusionCounts {
    pub fn between(pred: &BinaryMask, reference: &BinaryMask) -> Result<Self> {
        ensure_same_dims(pred, reference)?;
        let mut counts = Self::default();
        for (&p, &r) in pred.pixels().iter().zip(reference.pixels()) {
            match (p, r) {
                (true, true) => counts.tp += 1,
                (true, false) => counts.fp += 1,
                (false, true) => counts.fn_ += 1,
                (false, false) => counts.tn += 1,
            }
        }
        Ok(counts)
    }

    /// `tp / (tp + fp + fn)`, or 1 when both masks are empty.
    pub fn iou(&self) -> f64 {
        let union = self.tp + self.fp + self.fn_;
        if union == 0 {
            1.0
        } else {
            self.tp as f64 / union as f64
        }
    }

    /// `2tp / (2tp + fp + fn)`, or 1 when both masks are empty.
    pub fn f1(&self) -> f64 {
        let denom = 2 * self.tp + self.fp + self.fn_;
        if denom == 0 {
            1.0
        } else {
            (2 * self.tp) as f64 / denom as f64
        }
    }
}

/// Intersection over union of the building pixels. Two empty masks agree
/// perfectly and score 1.
pub fn iou(a: &BinaryMask, b: &BinaryMask) -> Result<f64> {
    Ok(ConfusionCounts::between(a, b)?.iou())
}

/// F1 (Dice) score of `pred` against `reference`; 1 when both are empty.
pub fn f1(pred: &BinaryMask, reference: &BinaryMask) -> Result<f64> {
    Ok(ConfusionCounts::between(pred, reference)?.f1())
}
