//! Entropies and mutual informations of a joint law built from kernels:
//! a uniform bit sent through a binary symmetric channel.

use icregion::prob::{product_joint, Alphabet, Kernel, Pmf};

fn main() -> anyhow::Result<()> {
    let bit = Alphabet::indexed("X", 2);
    let x = Pmf::uniform(bit.clone());
    let flip = 0.11;
    let joint = product_joint(&[
        Kernel::marginal("X", &x),
        Kernel::conditional(
            "Y",
            bit.renamed("Y"),
            &["X"],
            vec![vec![1.0 - flip, flip], vec![flip, 1.0 - flip]],
        )?,
    ])?;
    println!("H(X)    = {:.6}", joint.entropy(&["X"])?);
    println!(
        "H(Y|X)  = {:.6}",
        joint.conditional_entropy(&["Y"], &["X"])?
    );
    println!(
        "I(X;Y)  = {:.6}  (1 - h({flip}))",
        joint.mutual_information(&["X"], &["Y"], &[])?
    );
    Ok(())
}
