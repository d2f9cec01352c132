//! Kendall's tau-b and Spearman's rho, with and without ties.

use segnoise::metrics::{fractional_ranks, CorrelationReport};

fn main() -> segnoise::Result<()> {
    let cases: [(&str, Vec<f64>, Vec<f64>); 3] = [
        (
            "identical order",
            vec![1.0, 2.0, 3.0, 4.0, 5.0],
            vec![10.0, 20.0, 30.0, 40.0, 50.0],
        ),
        (
            "reversed",
            vec![1.0, 2.0, 3.0, 4.0],
            vec![4.0, 3.0, 2.0, 1.0],
        ),
        (
            "with ties",
            vec![1.0, 1.0, 2.0, 3.0, 3.0, 4.0],
            vec![2.0, 1.0, 2.0, 4.0, 3.0, 3.0],
        ),
    ];
    for (name, x, y) in &cases {
        let r = CorrelationReport::compute(x, y)?;
        println!(
            "{name:<16} tau-b {:+.4}  rho {:+.4}  tied pairs {}/{}",
            r.kendall_tau, r.spearman_rho, r.tie_count_x, r.tie_count_y
        );
    }
    println!(
        "midranks of {:?}: {:?}",
        cases[2].1,
        fractional_ranks(&cases[2].1)
    );
    match CorrelationReport::compute(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]) {
        Ok(_) => unreachable!(),
        Err(e) => println!("all-tied input is rejected: {e}"),
    }
    Ok(())
}
