//! Decide linear information inequalities: the pairwise relations among the
//! Han-Kobayashi bound terms under their Markov and independence structure,
//! and a false inequality refuted by a polymatroid counterexample.

use icregion::prover::{
    check_ray, hk_relations, prove, restricted_hk_constraints, EntropySpace, Query, Verdict,
    HK_VARIABLES,
};

fn main() -> anyhow::Result<()> {
    let space = EntropySpace::new(&HK_VARIABLES)?;
    for (label, expr, side) in hk_relations(&space)? {
        let sub = EntropySpace::new(&side)?;
        let target = expr.restrict(&space, &sub)?;
        let verdict = prove(&sub, &target, &restricted_hk_constraints(&sub, side)?)?;
        println!(
            "{label:8} {}",
            if verdict.is_provable() {
                "provable"
            } else {
                "NOT provable"
            }
        );
    }

    let q = Query::parse("vars X Y Z\ntarget I(X;Y|Z) <= I(X;Y)")?;
    if let Verdict::NotProvable(ray) = q.prove()? {
        let chk = check_ray(&q.space, &q.target, &q.constraints, &ray);
        println!(
            "`{}` fails: target {:.3} at a polymatroid point",
            q.target_text, chk.target
        );
        for (i, h) in ray.h.iter().enumerate() {
            println!("  H({}) = {h:.3}", q.space.subset_label(i as u32 + 1));
        }
    }
    Ok(())
}
