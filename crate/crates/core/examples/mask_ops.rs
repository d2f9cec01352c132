//! Components, outlines, rasterization, affine warps and overlap on a toy mask.

use segnoise::mask::{
    connected_components, dilate_square, iou, rasterize, trace_boundary, transform_component,
    Affine,
};
use segnoise::BinaryMask;

fn main() -> segnoise::Result<()> {
    let mask = BinaryMask::from_ascii(
        "\
............
.####....#..
.#..#...###.
.####....#..
............
......##....
.......##...
............",
    )?;
    println!("input:\n{mask}");

    let comps = connected_components(&mask);
    for (i, c) in comps.iter().enumerate() {
        let ring = trace_boundary(c);
        println!(
            "building {i}: area {}, bbox {:?}, {} outline vertices, outline area {}",
            c.area(),
            c.bbox(),
            ring.len(),
            ring.signed_area().abs()
        );
    }

    // rasterizing the outlines fills the hole in the first building
    let rings: Vec<_> = comps.iter().map(trace_boundary).collect();
    let filled = rasterize(&rings, mask.width(), mask.height())?;
    println!("outlines rasterized:\n{filled}");

    let mut rotated = BinaryMask::new(mask.width(), mask.height());
    for c in &comps {
        for (r, col) in
            transform_component(&mask, c, &Affine::rotation_degrees(90.0), c.centroid())?
        {
            rotated.set(r, col, true);
        }
    }
    println!("each building rotated 90 degrees about its centroid:\n{rotated}");

    let grown = dilate_square(&mask, 1);
    println!("IoU(mask, dilated) = {:.4}", iou(&mask, &grown)?);
    println!("IoU(mask, rotated) = {:.4}", iou(&mask, &rotated)?);
    Ok(())
}
