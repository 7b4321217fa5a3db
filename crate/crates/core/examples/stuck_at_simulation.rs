//! Monte-Carlo error rates of binned stuck-at multicoding against the
//! analytic error probability, swept over blocklength and rate.

use icregion::sim::{rate_sweep, sweep_csv, SimConfig};

fn main() -> anyhow::Result<()> {
    let base = SimConfig {
        n: 12,
        r1: 0.25,
        r1p: 0.6,
        lambda: 0.5,
        trials: 500,
        seed: 7,
    };
    let rows = rate_sweep(&base, &[8, 12, 16], &[0.2, 0.35])?;
    print!("{}", sweep_csv(&rows));
    Ok(())
}
