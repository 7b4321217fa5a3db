//! Multi-level binary channel: capacity against the two simple schemes
//! (level-by-level coding and reserving one level for the state).

use icregion::figures::{figure, gap, FigureOptions};
use icregion::geometry::{excess, max_weighted_sum};

fn main() -> anyhow::Result<()> {
    for name in ["fig9a", "fig9b"] {
        let fig = figure(name, FigureOptions::default())?;
        let cap = &fig.series[0].1;
        println!("{name}");
        for (label, b) in &fig.series {
            println!(
                "  {label:18} max sum-rate {:.4}, outside capacity by {:.1e}",
                max_weighted_sum(b, &[1.0, 1.0])?,
                excess(b, cap)?
            );
        }
        for (label, b) in &fig.series[1..] {
            println!("  gap to {label}: {:.4}", gap(cap, b)?);
        }
    }
    Ok(())
}
