mod common;

use proptest::prelude::*;

use common::{brute_kendall, brute_spearman};
use segnoise::dataset::{load_manifest, save_manifest, Manifest, SampleRecord};
use segnoise::mask::{
    connected_components, dilate_square, erode_square, f1, iou, rasterize, trace_boundary,
    transform_component, Affine,
};
use segnoise::metrics::{kendall_tau_b, spearman_rho};
use segnoise::noise::{Axis, NoiseSpec};
use segnoise::ranking::{combine_average, select_top};
use segnoise::scoring::{aer_score, majority_vote, pixel_variance, rvr_score};
use segnoise::{BinaryMask, Component, EnsembleStack, Orientation, Ranking};

fn mask(max_side: usize, density: f64) -> impl Strategy<Value = BinaryMask> {
    (1..=max_side, 1..=max_side).prop_flat_map(move |(w, h)| {
        prop::collection::vec(prop::bool::weighted(density), w * h)
            .prop_map(move |px| BinaryMask::from_pixels(w, h, px).unwrap())
    })
}

fn mask_pair(max_side: usize) -> impl Strategy<Value = (BinaryMask, BinaryMask)> {
    (1..=max_side, 1..=max_side).prop_flat_map(|(w, h)| {
        let px = || prop::collection::vec(any::<bool>(), w * h);
        (px(), px()).prop_map(move |(a, b)| {
            (
                BinaryMask::from_pixels(w, h, a).unwrap(),
                BinaryMask::from_pixels(w, h, b).unwrap(),
            )
        })
    })
}

fn tied_vectors() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (2usize..60).prop_flat_map(|n| {
        (
            prop::collection::vec((0..6u8).prop_map(f64::from), n),
            prop::collection::vec((0..6u8).prop_map(f64::from), n),
        )
    })
}

/// Pixels of a component's outer outline fill: everything in its bbox that
/// the outside cannot reach by 4-connected background steps.
fn outline_fill(c: &Component, w: usize, h: usize) -> BinaryMask {
    let b = c.bbox();
    let (bw, bh) = (b.width() + 2, b.height() + 2);
    let mut outside = vec![false; bw * bh];
    let solid = |r: usize, c_: usize| {
        r >= 1
            && c_ >= 1
            && r <= bh - 2
            && c_ <= bw - 2
            && c.contains(b.min_row + r - 1, b.min_col + c_ - 1)
    };
    let mut stack = vec![(0usize, 0usize)];
    outside[0] = true;
    while let Some((r, col)) = stack.pop() {
        let nbrs = [
            (r.wrapping_sub(1), col),
            (r + 1, col),
            (r, col.wrapping_sub(1)),
            (r, col + 1),
        ];
        for (nr, nc) in nbrs {
            if nr < bh && nc < bw && !outside[nr * bw + nc] && !solid(nr, nc) {
                outside[nr * bw + nc] = true;
                stack.push((nr, nc));
            }
        }
    }
    let mut out = BinaryMask::new(w, h);
    for r in 1..bh - 1 {
        for col in 1..bw - 1 {
            if !outside[r * bw + col] {
                out.set(b.min_row + r - 1, b.min_col + col - 1, true);
            }
        }
    }
    out
}

proptest! {
    #[test]
    fn iou_is_symmetric_and_tied_to_f1((a, b) in mask_pair(24)) {
        let ab = iou(&a, &b).unwrap();
        prop_assert_eq!(ab, iou(&b, &a).unwrap());
        prop_assert!((0.0..=1.0).contains(&ab));
        let f = f1(&a, &b).unwrap();
        prop_assert!((ab - f / (2.0 - f)).abs() <= 1e-12);
        prop_assert_eq!(iou(&a, &a).unwrap(), 1.0);
    }

    #[test]
    fn components_partition_the_foreground(m in mask(24, 0.35)) {
        let comps = connected_components(&m);
        let mut owner = vec![usize::MAX; m.width() * m.height()];
        for (k, c) in comps.iter().enumerate() {
            for &(r, col) in c.pixels() {
                prop_assert!(m.get(r, col));
                prop_assert_eq!(owner[r * m.width() + col], usize::MAX);
                owner[r * m.width() + col] = k;
            }
        }
        prop_assert_eq!(comps.iter().map(Component::area).sum::<usize>(), m.count());
        // maximality: no 8-neighbours in different components
        for (r, col) in m.coords() {
            for dr in -1i64..=1 {
                for dc in -1i64..=1 {
                    let (nr, nc) = (r as i64 + dr, col as i64 + dc);
                    if nr < 0 || nc < 0 || nr >= m.height() as i64 || nc >= m.width() as i64 {
                        continue;
                    }
                    let (nr, nc) = (nr as usize, nc as usize);
                    if m.get(nr, nc) {
                        prop_assert_eq!(owner[r * m.width() + col], owner[nr * m.width() + nc]);
                    }
                }
            }
        }
    }

    #[test]
    fn trace_then_rasterize_fills_the_outline(m in mask(20, 0.45)) {
        for c in connected_components(&m) {
            let ring = trace_boundary(&c);
            prop_assert!(ring.signed_area() != 0.0);
            let back = rasterize(&[ring], m.width(), m.height()).unwrap();
            prop_assert_eq!(back, outline_fill(&c, m.width(), m.height()));
        }
    }

    #[test]
    fn transform_matches_whole_canvas_inverse_mapping(
        m in mask(16, 0.5),
        sx in 0.3f64..2.5,
        sy in 0.3f64..2.5,
        angle in -90.0f64..90.0,
    ) {
        let (sin, cos) = angle.to_radians().sin_cos();
        let matrix = Affine::new([[sx * cos, sx * sin, 0.0], [-sy * sin, sy * cos, 0.0]]);
        let inverse = matrix.inverse().unwrap();
        let (w, h) = (m.width() + 8, m.height() + 8);
        let mut canvas = BinaryMask::new(w, h);
        for (r, col) in m.coords() {
            canvas.set(r + 4, col + 4, true);
        }
        for c in connected_components(&canvas) {
            let anchor = c.centroid();
            let got = transform_component(&canvas, &c, &matrix, anchor).unwrap();
            let (ax, ay) = (anchor.1 + 0.5, anchor.0 + 0.5);
            let mut want = Vec::new();
            for r in 0..h {
                for col in 0..w {
                    let (x, y) = inverse.apply(col as f64 + 0.5 - ax, r as f64 + 0.5 - ay);
                    let (sx_, sy_) = ((x + ax).floor(), (y + ay).floor());
                    if sx_ >= 0.0 && sy_ >= 0.0 && c.contains(sy_ as usize, sx_ as usize) {
                        want.push((r, col));
                    }
                }
            }
            prop_assert_eq!(got, want);
        }
    }

    #[test]
    fn morphology_brackets_the_mask(m in mask(20, 0.5), radius in 0usize..4) {
        let d = dilate_square(&m, radius);
        let e = erode_square(&m, radius);
        for i in 0..m.pixels().len() {
            prop_assert!(!e.pixels()[i] || m.pixels()[i]);
            prop_assert!(!m.pixels()[i] || d.pixels()[i]);
        }
        if radius == 0 {
            prop_assert_eq!(&d, &m);
            prop_assert_eq!(&e, &m);
        }
    }

    #[test]
    fn correlations_match_brute_force((x, y) in tied_vectors()) {
        if let (Ok(t), Ok(r)) = (kendall_tau_b(&x, &y), spearman_rho(&x, &y)) {
            prop_assert!((t - brute_kendall(&x, &y)).abs() <= 1e-12);
            prop_assert!((r - brute_spearman(&x, &y)).abs() <= 1e-12);
        }
    }

    #[test]
    fn correlation_symmetries((x, y) in tied_vectors(), seed in any::<u64>()) {
        let (Ok(t), Ok(r)) = (kendall_tau_b(&x, &y), spearman_rho(&x, &y)) else {
            return Ok(());
        };
        prop_assert!((-1.0..=1.0).contains(&t) && (-1.0..=1.0).contains(&r));
        prop_assert_eq!(t, kendall_tau_b(&y, &x).unwrap());
        let neg: Vec<f64> = y.iter().map(|v| -v).collect();
        prop_assert!((kendall_tau_b(&x, &neg).unwrap() + t).abs() <= 1e-12);
        prop_assert!((spearman_rho(&x, &neg).unwrap() + r).abs() <= 1e-12);
        // strictly increasing transform leaves both unchanged
        let warped: Vec<f64> = x.iter().map(|v| v.exp() * 3.0 - 7.0).collect();
        prop_assert!((kendall_tau_b(&warped, &y).unwrap() - t).abs() <= 1e-12);
        prop_assert!((spearman_rho(&warped, &y).unwrap() - r).abs() <= 1e-12);
        // joint permutation
        let mut idx: Vec<usize> = (0..x.len()).collect();
        let mut s = seed;
        for i in (1..idx.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            idx.swap(i, (s >> 33) as usize % (i + 1));
        }
        let px: Vec<f64> = idx.iter().map(|&i| x[i]).collect();
        let py: Vec<f64> = idx.iter().map(|&i| y[i]).collect();
        prop_assert!((kendall_tau_b(&px, &py).unwrap() - t).abs() <= 1e-12);
        prop_assert!((spearman_rho(&px, &py).unwrap() - r).abs() <= 1e-12);
    }

    #[test]
    fn rankings_ignore_record_order(
        scores in prop::collection::vec(0u8..20, 1..80),
        rotate_by in 0usize..80,
        higher in any::<bool>(),
    ) {
        let orientation = if higher { Orientation::HigherIsCleaner } else { Orientation::LowerIsCleaner };
        let records: Vec<(String, f64)> = scores
            .iter()
            .enumerate()
            .map(|(i, s)| (format!("id{i:03}"), f64::from(*s)))
            .collect();
        let mut shuffled = records.clone();
        shuffled.rotate_left(rotate_by % records.len());
        shuffled.reverse();
        let a = Ranking::from_scores(records, orientation).unwrap();
        let b = Ranking::from_scores(shuffled, orientation).unwrap();
        prop_assert_eq!(&a, &b);
        for pair in a.entries().windows(2) {
            let (p, q) = (&pair[0], &pair[1]);
            let ok = match orientation {
                Orientation::HigherIsCleaner => p.score > q.score,
                Orientation::LowerIsCleaner => p.score < q.score,
            } || (p.score == q.score && p.sample_id < q.sample_id);
            prop_assert!(ok);
        }
    }

    #[test]
    fn selections_are_nested(n in 1usize..300, f1_ in 0.001f64..=1.0, f2 in 0.001f64..=1.0) {
        let ranking = Ranking::from_scores(
            (0..n).map(|i| (format!("s{i:04}"), ((i * 7919) % 97) as f64)),
            Orientation::HigherIsCleaner,
        ).unwrap();
        let (lo, hi) = if f1_ <= f2 { (f1_, f2) } else { (f2, f1_) };
        let small = select_top(&ranking, lo).unwrap();
        let large = select_top(&ranking, hi).unwrap();
        prop_assert!(large.starts_with(&small));
        prop_assert_eq!(small.len(), (lo * n as f64 + 1e-9).floor() as usize);
    }

    #[test]
    fn combined_ranking_of_copies_is_the_ranking(scores in prop::collection::vec(0u8..50, 2..60)) {
        let ranking = Ranking::from_scores(
            scores.iter().enumerate().map(|(i, s)| (format!("x{i:02}"), f64::from(*s))),
            Orientation::HigherIsCleaner,
        ).unwrap();
        let combined = combine_average(&[ranking.clone(), ranking.clone()]).unwrap();
        prop_assert!(combined.ids().eq(ranking.ids()));
    }

    #[test]
    fn scores_are_bounded_and_member_order_free(
        members in (1usize..8, 1usize..10, 1usize..10).prop_flat_map(|(k, w, h)| {
            (
                prop::collection::vec(prop::collection::vec(any::<bool>(), w * h), k),
                prop::collection::vec(any::<bool>(), w * h),
                Just((w, h)),
            )
        })
    ) {
        let (stack_px, label_px, (w, h)) = members;
        let masks: Vec<BinaryMask> = stack_px
            .into_iter()
            .map(|p| BinaryMask::from_pixels(w, h, p).unwrap())
            .collect();
        let label = BinaryMask::from_pixels(w, h, label_px).unwrap();
        let mut reversed = masks.clone();
        reversed.reverse();
        let a = EnsembleStack::new("s", masks).unwrap();
        let b = EnsembleStack::new("s", reversed).unwrap();

        let aer = aer_score(&a, &label).unwrap();
        prop_assert!((0.0..=1.0).contains(&aer.score));
        prop_assert_eq!(aer.score, aer_score(&b, &label).unwrap().score);
        prop_assert_eq!(majority_vote(&a), majority_vote(&b));

        let rvr = rvr_score(&a, &label).unwrap();
        prop_assert!((-0.125..=1.125).contains(&rvr.score));
        prop_assert_eq!(rvr.score, rvr_score(&b, &label).unwrap().score);

        let (map, mean) = pixel_variance(&a);
        prop_assert!(map.values.iter().all(|v| (0.0..=0.25).contains(v)));
        prop_assert!((0.0..=0.25).contains(&mean));
    }

    #[test]
    fn manifest_round_trips_exact_floats(
        factor in any::<f64>().prop_filter("finite", |v| v.is_finite()),
        angle in any::<f64>().prop_filter("finite", |v| v.is_finite()),
        gt in prop::option::of(0.0f64..=1.0),
    ) {
        let dir = tempfile::tempdir().unwrap();
        let mut m = Manifest::new(dir.path());
        let mut a = SampleRecord::new("a", "a.png");
        a.noise_spec = Some(NoiseSpec::OneSidedScale { axis: Axis::Vertical, factor });
        a.gt_iou = gt;
        let mut b = SampleRecord::new("b", "b.png");
        b.noise_spec = Some(NoiseSpec::Rotation { angle });
        m.records = vec![a, b];
        let path = dir.path().join("m.jsonl");
        save_manifest(&m, &path).unwrap();
        let back = load_manifest(&path, false).unwrap();
        prop_assert_eq!(back.records, m.records);
    }
}

#[test]
fn tau_b_handles_a_hand_counted_tie_pattern() {
    // pairs: 4 concordant, 1 discordant, 1 tied in x only
    let x = [1.0, 1.0, 2.0, 3.0];
    let y = [1.0, 2.0, 3.0, 2.5];
    let t = kendall_tau_b(&x, &y).unwrap();
    assert!((t - 3.0 / 30f64.sqrt()).abs() < 1e-15);
}
