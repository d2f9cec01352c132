use super::BinaryMask;

/// Dilation with a `(2 * radius + 1)` square structuring element.
/// Pixels outside the canvas count as background.
pub fn dilate_square(mask: &BinaryMask, radius: usize) -> BinaryMask {
    sliding(mask, radius, true)
}

/// Erosion with a `(2 * radius + 1)` square structuring element.
/// Only in-canvas neighbours are considered, so objects touching the border
/// are not eaten from outside.
pub fn erode_square(mask: &BinaryMask, radius: usize) -> BinaryMask {
    sliding(mask, radius, false)
}

// square element is separable: a row pass then a column pass
fn sliding(mask: &BinaryMask, radius: usize, dilate: bool) -> BinaryMask {
    if radius == 0 {
        return mask.clone();
    }
    let (w, h) = mask.dims();
    let src = mask.pixels();
    let mut rows = vec![false; w * h];
    for r in 0..h {
        let line = &src[r * w..(r + 1) * w];
        let prefix = prefix_counts(line.iter().copied());
        for c in 0..w {
            let lo = c.saturating_sub(radius);
            let hi = (c + radius + 1).min(w);
            rows[r * w + c] = window_hit(&prefix, lo, hi, dilate);
        }
    }
    let mut out = BinaryMask::new(w, h);
    let dst = out.pixels_mut();
    for c in 0..w {
        let prefix = prefix_counts((0..h).map(|r| rows[r * w + c]));
        for r in 0..h {
            let lo = r.saturating_sub(radius);
            let hi = (r + radius + 1).min(h);
            dst[r * w + c] = window_hit(&prefix, lo, hi, dilate);
        }
    }
    out
}

fn prefix_counts(values: impl Iterator<Item = bool>) -> Vec<usize> {
    let mut prefix = vec![0];
    let mut acc = 0;
    for v in values {
        acc += usize::from(v);
        prefix.push(acc);
    }
    prefix
}

fn window_hit(prefix: &[usize], lo: usize, hi: usize, dilate: bool) -> bool {
    let ones = prefix[hi] - prefix[lo];
    if dilate {
        ones > 0
    } else {
        ones == hi - lo
    }
}
