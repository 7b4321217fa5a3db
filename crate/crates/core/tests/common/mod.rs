//! Random channel generators shared by the integration tests.
#![allow(dead_code)]

use icregion::channels::{CribbingZic, DeterministicSdzic};
use icregion::prob::{random_probs, Alphabet, Pmf};
use rand::seq::SliceRandom;
use rand::{Rng, RngExt};

pub fn alphabet(name: &str, n: usize) -> Alphabet {
    Alphabet::indexed(name, n)
}

fn table<R: Rng + ?Sized>(rng: &mut R, len: usize, out: usize) -> Vec<usize> {
    (0..len).map(|_| rng.random_range(0..out)).collect()
}

/// `y2(x2, ·)` is a random permutation of `T1` for each `x2`, so the channel
/// is injective in `t1` by construction.
fn injective_y2<R: Rng + ?Sized>(rng: &mut R, x2: usize, t1: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(x2 * t1);
    for _ in 0..x2 {
        let mut perm: Vec<usize> = (0..t1).collect();
        perm.shuffle(rng);
        out.extend(perm);
    }
    out
}

/// Random injective deterministic S-D Z-IC with the given alphabet sizes
/// `(X1, X2, S, T1, Y1)`; `|Y2| = |T1|`.
pub fn random_sdzic<R: Rng + ?Sized>(rng: &mut R, sizes: [usize; 5]) -> DeterministicSdzic {
    let [x1, x2, s, t1, y1] = sizes;
    let state = Pmf::new(alphabet("S", s), random_probs(rng, s)).unwrap();
    DeterministicSdzic::new(
        alphabet("X1", x1),
        alphabet("X2", x2),
        alphabet("T1", t1),
        alphabet("Y1", y1),
        alphabet("Y2", t1),
        state,
        table(rng, x1 * s, y1),
        table(rng, x1 * s, t1),
        injective_y2(rng, x2, t1),
    )
    .unwrap()
}

/// Like [`random_sdzic`] but `t1` depends on the state only, so every slice
/// has `H(T1|S) = 0`.
pub fn random_state_driven_sdzic<R: Rng + ?Sized>(
    rng: &mut R,
    sizes: [usize; 5],
) -> DeterministicSdzic {
    let [x1, x2, s, t1, y1] = sizes;
    let f = table(rng, s, t1);
    let state = Pmf::new(alphabet("S", s), random_probs(rng, s)).unwrap();
    DeterministicSdzic::new(
        alphabet("X1", x1),
        alphabet("X2", x2),
        alphabet("T1", t1),
        alphabet("Y1", y1),
        alphabet("Y2", t1),
        state,
        table(rng, x1 * s, y1),
        (0..x1 * s).map(|k| f[k % s]).collect(),
        injective_y2(rng, x2, t1),
    )
    .unwrap()
}

/// Random injective cribbing Z-IC with binary alphabets except `|T1| = 2`,
/// `|Z2|` as given.
pub fn random_cribbing<R: Rng + ?Sized>(rng: &mut R, z2: usize) -> CribbingZic {
    CribbingZic::new(
        alphabet("X1", 2),
        alphabet("X2", 2),
        alphabet("T1", 2),
        alphabet("Y1", 2),
        alphabet("Y2", 2),
        alphabet("Z2", z2),
        table(rng, 2, 2),
        table(rng, 2, 2),
        injective_y2(rng, 2, 2),
        table(rng, 2, z2),
    )
    .unwrap()
}

pub fn random_rows<R: Rng + ?Sized>(rng: &mut R, rows: usize, n: usize) -> Vec<Vec<f64>> {
    (0..rows).map(|_| random_probs(rng, n)).collect()
}
