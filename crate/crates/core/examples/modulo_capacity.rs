//! Capacity region of the binary modulo-additive channel with a
//! Bernoulli(1/2) state, from the closed form and from the general
//! deterministic-channel region optimized over a grid of input laws.

use icregion::channels::expand_modulo;
use icregion::figures::{det_capacity_region, inner_noise_region, modulo_capacity_region};
use icregion::geometry::{boundary_csv, hausdorff_2d, max_weighted_sum};

fn main() -> anyhow::Result<()> {
    let closed = modulo_capacity_region(2, 0.5, 0.01)?;
    println!(
        "max sum-rate {:.6}",
        max_weighted_sum(&closed, &[1.0, 1.0])?
    );
    println!(
        "corner (0.5, 1) present: {}",
        closed.has_extreme_point(&[0.5, 1.0], 1e-12)
    );

    let ch = expand_modulo(2, 1, 0.5)?;
    let general = det_capacity_region(&ch, 0.05)?;
    let noise = inner_noise_region(&ch, 0.05)?;
    println!(
        "closed form vs general region: {:.2e}",
        hausdorff_2d(&closed, &general)?
    );
    println!(
        "interference as noise vs capacity: {:.2e}",
        hausdorff_2d(&closed, &noise)?
    );

    print!(
        "{}",
        boundary_csv(&closed)
            .lines()
            .take(6)
            .collect::<Vec<_>>()
            .join("\n")
    );
    println!("\n...");
    Ok(())
}
