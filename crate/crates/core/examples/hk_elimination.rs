//! Project the ten rate-splitting conditions of a Han-Kobayashi slice onto
//! the message rates with Fourier-Motzkin elimination and compare the
//! result with the directly evaluated region.

use icregion::channels::GeneralDmic;
use icregion::fm::{hk_conditions, HK_SPLIT_VARS};
use icregion::geometry::polytope_vertices;
use icregion::prob::random_probs;
use icregion::regions::{eval_bound_terms, eval_hk, HkSlice};
use rand::SeedableRng;

fn main() -> anyhow::Result<()> {
    let mut rng = rand_pcg::Pcg64::seed_from_u64(13);
    let ch = GeneralDmic::random(&mut rng, 2, 2, 2, 2);
    let slice = HkSlice::new(
        &ch,
        2,
        2,
        random_probs(&mut rng, 4),
        random_probs(&mut rng, 4),
    )?;
    let conditions = hk_conditions(&eval_bound_terms(&slice)?);
    println!("conditions:\n{conditions}");

    let projected = conditions.eliminate(&HK_SPLIT_VARS)?;
    println!("{} rows after elimination", projected.rows().len());
    let reduced = projected.remove_redundant();
    println!("after redundancy removal:\n{}", reduced.system);

    let fm = polytope_vertices(&reduced.system.to_polytope()?)?;
    let direct = polytope_vertices(&eval_hk(&slice)?)?;
    println!("vertices (eliminated): {fm:.4?}");
    println!("vertices (direct):     {direct:.4?}");
    Ok(())
}
