//! Rank correlation: Kendall's tau-b and Spearman's rho.
//!
//! Both statistics reject inputs where either side is entirely tied, since
//! the correlation is undefined there.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Kendall's tau-b and Spearman's rho for one pair of score vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub kendall_tau: f64,
    pub spearman_rho: f64,
    pub n: usize,
    /// Number of tied pairs within `x`.
    pub tie_count_x: u64,
    /// Number of tied pairs within `y`.
    pub tie_count_y: u64,
}

impl CorrelationReport {
    pub fn compute(x: &[f64], y: &[f64]) -> Result<Self> {
        Ok(Self {
            kendall_tau: kendall_tau_b(x, y)?,
            spearman_rho: spearman_rho(x, y)?,
            n: x.len(),
            tie_count_x: tied_pairs(x),
            tie_count_y: tied_pairs(y),
        })
    }
}

fn validate(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::invalid(format!(
            "length mismatch: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::invalid(
            "correlation needs at least two observations",
        ));
    }
    if x.iter().chain(y).any(|v| v.is_nan()) {
        return Err(Error::invalid("NaN in correlation input"));
    }
    Ok(())
}

fn cmp(a: f64, b: f64) -> Ordering {
    a.partial_cmp(&b).expect("NaN rejected by validate")
}

/// Sum of `t(t-1)/2` over runs of equal values in an already sorted sequence.
fn tied_pairs_sorted(sorted: impl Iterator<Item = f64>) -> u64 {
    let mut total = 0u64;
    let mut run = 0u64;
    let mut prev: Option<f64> = None;
    for v in sorted {
        if prev == Some(v) {
            run += 1;
        } else {
            total += run * (run.saturating_sub(1)) / 2;
            run = 1;
        }
        prev = Some(v);
    }
    total + run * run.saturating_sub(1) / 2
}

/// Number of pairs `i < j` with `values[i] == values[j]`.
pub fn tied_pairs(values: &[f64]) -> u64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    tied_pairs_sorted(sorted.into_iter())
}

/// Sorts `values` ascending and returns the number of strict inversions.
fn sort_counting_inversions(values: &mut [f64]) -> u64 {
    let n = values.len();
    if n < 2 {
        return 0;
    }
    let mut buf = values.to_vec();
    let mut swaps = 0u64;
    let mut width = 1;
    // bottom-up merge sort, ping-ponging between `values` and `buf`
    let mut src_is_values = true;
    while width < n {
        {
            let (src, dst): (&[f64], &mut [f64]) = if src_is_values {
                (&*values, &mut buf[..])
            } else {
                (&buf[..], &mut *values)
            };
            let mut start = 0;
            while start < n {
                let mid = (start + width).min(n);
                let end = (start + 2 * width).min(n);
                let (mut i, mut j, mut k) = (start, mid, start);
                while i < mid && j < end {
                    if cmp(src[j], src[i]) == Ordering::Less {
                        dst[k] = src[j];
                        swaps += (mid - i) as u64;
                        j += 1;
                    } else {
                        dst[k] = src[i];
                        i += 1;
                    }
                    k += 1;
                }
                dst[k..k + (mid - i)].copy_from_slice(&src[i..mid]);
                k += mid - i;
                dst[k..k + (end - j)].copy_from_slice(&src[j..end]);
                start = end;
            }
        }
        src_is_values = !src_is_values;
        width *= 2;
    }
    if !src_is_values {
        values.copy_from_slice(&buf);
    }
    swaps
}

/// Kendall's tau-b in `O(n log n)`:
/// `(C - D) / sqrt((T0 - Tx)(T0 - Ty))` with `T0 = n(n-1)/2` and `Tx`,
/// `Ty` the tied pairs within each input.
pub fn kendall_tau_b(x: &[f64], y: &[f64]) -> Result<f64> {
    validate(x, y)?;
    let n = x.len() as u64;
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| cmp(x[a], x[b]).then(cmp(y[a], y[b])));

    let total = n * (n - 1) / 2;
    let x_ties = tied_pairs_sorted(order.iter().map(|&i| x[i]));
    // pairs tied on both coordinates sit next to each other after the joint sort
    let mut joint_ties = 0u64;
    let mut run = 1u64;
    for w in order.windows(2) {
        if x[w[0]] == x[w[1]] && y[w[0]] == y[w[1]] {
            run += 1;
        } else {
            joint_ties += run * (run - 1) / 2;
            run = 1;
        }
    }
    joint_ties += run * (run - 1) / 2;

    let mut ys: Vec<f64> = order.iter().map(|&i| y[i]).collect();
    let discordant = sort_counting_inversions(&mut ys);
    let y_ties = tied_pairs_sorted(ys.into_iter());

    if x_ties == total || y_ties == total {
        return Err(Error::invalid("all values tied; tau-b undefined"));
    }
    let numerator = total as i128 - x_ties as i128 - y_ties as i128 + joint_ties as i128
        - 2 * discordant as i128;
    let denom = ((total - x_ties) as f64 * (total - y_ties) as f64).sqrt();
    Ok((numerator as f64 / denom).clamp(-1.0, 1.0))
}

/// 1-based ranks; tied values share the mean of the positions they cover.
pub fn fractional_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start+1 ..= end
        let mean = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = mean;
        }
        start = end;
    }
    ranks
}

fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (&u, &v) in a.iter().zip(b) {
        let (du, dv) = (u - ma, v - mb);
        sab += du * dv;
        saa += du * du;
        sbb += dv * dv;
    }
    if saa == 0.0 || sbb == 0.0 {
        return None;
    }
    Some((sab / (saa * sbb).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman's rho: Pearson correlation of fractional ranks.
pub fn spearman_rho(x: &[f64], y: &[f64]) -> Result<f64> {
    validate(x, y)?;
    pearson(&fractional_ranks(x), &fractional_ranks(y))
        .ok_or_else(|| Error::invalid("all values tied; rho undefined"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kendall_examples() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(kendall_tau_b(&x, &x).unwrap(), 1.0);
        let y = [1.0, 2.0, 3.0, 5.0, 4.0];
        assert!((kendall_tau_b(&x, &y).unwrap() - 0.8).abs() < 1e-15);
        let rev: Vec<f64> = x.iter().rev().copied().collect();
        assert_eq!(kendall_tau_b(&x, &rev).unwrap(), -1.0);
    }

    #[test]
    fn spearman_examples() {
        let x = [1.0, 2.0, 3.0];
        assert_eq!(spearman_rho(&x, &x).unwrap(), 1.0);
        assert!((spearman_rho(&x, &[3.0, 1.0, 2.0]).unwrap() + 0.5).abs() < 1e-15);
        let rho = spearman_rho(&[1.0, 1.0, 2.0], &[1.0, 2.0, 3.0]).unwrap();
        assert!((rho - 3f64.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn fractional_ranks_average_ties() {
        assert_eq!(
            fractional_ranks(&[10.0, 5.0, 10.0, 1.0]),
            vec![3.5, 2.0, 3.5, 1.0]
        );
    }

    #[test]
    fn inversion_count() {
        let mut v = [3.0, 1.0, 2.0, 2.0, 0.0];
        assert_eq!(sort_counting_inversions(&mut v), 7);
        assert_eq!(v, [0.0, 1.0, 2.0, 2.0, 3.0]);
    }

    #[test]
    fn error_paths() {
        assert!(kendall_tau_b(&[1.0, 2.0], &[1.0]).is_err());
        assert!(kendall_tau_b(&[1.0], &[1.0]).is_err());
        assert!(kendall_tau_b(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
        assert!(spearman_rho(&[1.0, 2.0, 3.0], &[4.0, 4.0, 4.0]).is_err());
        assert!(spearman_rho(&[1.0, f64::NAN], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn report_counts_ties() {
        let r = CorrelationReport::compute(&[1.0, 1.0, 2.0, 2.0], &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!((r.tie_count_x, r.tie_count_y, r.n), (2, 0, 4));
    }
}
