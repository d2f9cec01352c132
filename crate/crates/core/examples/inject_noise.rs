//! Applies every noise operator to one synthetic scene, then shows the
//! seeded random pipeline and replay of a recorded spec.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use segnoise::mask::iou;
use segnoise::noise::{
    add_false_positives, add_vertices, apply_random_noise, delete_components, global_scale,
    one_sided_scale, rotate, translate, Axis,
};
use segnoise::sim::scene::random_scene;
use segnoise::{NoiseConfig, ShapeBank};

fn main() -> segnoise::Result<()> {
    let ids: Vec<String> = (0..20).map(|i| format!("tile_{i:02}")).collect();
    let scenes: Vec<_> = ids.iter().map(|id| random_scene(128, 128, 7, id)).collect();
    let bank = ShapeBank::from_masks(ids.iter().map(String::as_str).zip(&scenes));
    println!(
        "shape bank holds {} buildings from {} scenes",
        bank.len(),
        ids.len()
    );

    let clean = scenes
        .iter()
        .find(|m| m.count() > 0)
        .expect("a non-empty scene");
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let report = |name: &str, noisy: &segnoise::BinaryMask| -> segnoise::Result<()> {
        println!("{name:<28} IoU vs clean {:.3}", iou(clean, noisy)?);
        Ok(())
    };
    report("scale x1.5", &global_scale(clean, 1.5)?)?;
    report(
        "vertical stretch x2.0",
        &one_sided_scale(clean, Axis::Vertical, 2.0)?,
    )?;
    report("rotation 30 deg", &rotate(clean, 30.0)?)?;
    report("shift (+12, -5)", &translate(clean, 12, -5)?)?;
    let (deleted, gone) = delete_components(clean, 0.5, &mut rng)?;
    report(&format!("deleted buildings {gone:?}"), &deleted)?;
    let (warped, _) = add_vertices(clean, 6, &mut rng)?;
    report("6 extra outline vertices", &warped)?;
    let (extra, outcome) = add_false_positives(clean, 3, &bank, None, &mut rng)?;
    report(
        &format!("{} pasted shapes", outcome.placements.len()),
        &extra,
    )?;

    let cfg = NoiseConfig::with_seed(2024);
    for id in &ids[..5] {
        let scene = random_scene(128, 128, 7, id);
        let (noisy, spec) = apply_random_noise(&scene, &cfg, &bank, id)?;
        let again = spec.replay(&scene, &bank)?;
        println!(
            "{id}: {:<24} replay identical: {}",
            spec.noise_type(),
            again == noisy
        );
    }
    Ok(())
}
