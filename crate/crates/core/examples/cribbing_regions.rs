//! Partial cribbing on a XOR Z-channel: capacity without a cribbing link,
//! with full cribbing, and with a state that gates the interference.

use std::path::Path;

use icregion::channels::{Channel, ChannelFile};
use icregion::figures::{cribbing_region, state_cribbing_region};
use icregion::geometry::{boundary_csv, max_weighted_sum};
use icregion::regions::default_w_cap;

fn load(name: &str) -> anyhow::Result<Channel> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("data/channels")
        .join(name);
    let file: ChannelFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    Ok(file.into_channel()?)
}

fn main() -> anyhow::Result<()> {
    let Channel::Cribbing(full) = load("cribbing.json")? else {
        anyhow::bail!("expected a cribbing channel")
    };
    let region = cribbing_region(&full, 2, 0.25)?;
    println!(
        "full cribbing, |W| = 2: max sum-rate {:.4}",
        max_weighted_sum(&region, &[1.0, 1.0])?
    );
    print!("{}", boundary_csv(&region));

    let Channel::StateCribbing(sc) = load("state-cribbing.json")? else {
        anyhow::bail!("expected a state-cribbing channel")
    };
    let region = state_cribbing_region(&sc, 2, default_w_cap(sc.y2.len()), 0.25)?;
    println!(
        "state-gated, |W| = 2: max sum-rate {:.4}",
        max_weighted_sum(&region, &[1.0, 1.0])?
    );
    print!("{}", boundary_csv(&region));
    Ok(())
}
