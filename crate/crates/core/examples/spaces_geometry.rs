//! Distances, group operations and ball volumes on each space kind.

use hlmax::spaces::{SpaceInstance, SpacePoint};

fn main() -> hlmax::Result<()> {
    let spaces = [
        SpaceInstance::real_line(),
        SpaceInstance::euclidean(3)?,
        SpaceInstance::affine_left(),
        SpaceInstance::affine_right(),
    ];
    for space in &spaces {
        let e = space.identity().expect("all kinds are groups");
        let x = space.parse_point(if space.is_affine() { "1,2" } else if space.dim() == 1 { "1" } else { "1,0,0" })?;
        println!(
            "{:<14} d(e,x) = {:.6}  |B(x,1)| = {:.6}  Δ(x) = {}",
            space.descriptor(),
            space.distance(&e, &x)?,
            space.ball_volume(&x, 1.0)?,
            space.modular(&x)?
        );
    }

    let h = SpaceInstance::affine_left();
    let g = SpacePoint::affine(0.5, 3.0)?;
    let (x, y) = (SpacePoint::affine(-1.0, 0.5)?, SpacePoint::affine(2.0, 1.5)?);
    let before = h.distance(&x, &y)?;
    let after = h.distance(&h.translate(&g, &x)?, &h.translate(&g, &y)?)?;
    println!("left translation keeps distances: {before:.12} -> {after:.12}");
    println!("g·g⁻¹ = {}", h.translate(&g, &h.inverse(&g)?)?);
    Ok(())
}
