//! Monte-Carlo simulation of stuck-at-zero multicoding on the binary
//! modulo-additive state-dependent Z-interference channel, with an exact
//! analytic error oracle.
//!
//! Transmitter 1 must send zeros wherever the state is 1 so that receiver 2
//! sees a clean channel. Its codebook has `M = ⌈2^{nR1}⌉` bins of
//! `B = ⌈2^{nR1'}⌉` uniform binary words; the encoder sends the first word in
//! the message's bin that is zero on every stuck position. Receiver 1 sees
//! the word exactly and decodes the bin of the matching codeword, failing if
//! matches occur in more than one bin.

use rand::{RngExt, SeedableRng};
use rand_pcg::{Pcg64, Pcg64Mcg};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

/// Largest blocklength; a word is one `u64`.
pub const MAX_BLOCKLENGTH: u32 = 64;
/// Upper bound on `M·B`, the total number of codewords.
pub const MAX_CODEWORDS: u64 = 1 << 26;
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("blocklength must be in 1..={MAX_BLOCKLENGTH}, got {0}")]
    Blocklength(u32),
    #[error("rate {name} = {value} must be finite and nonnegative")]
    Rate { name: &'static str, value: f64 },
    #[error("state probability {0} outside [0, 1]")]
    Lambda(f64),
    #[error("trial count must be positive")]
    NoTrials,
    #[error("codebook of {bins} bins x {per_bin} words exceeds the cap of 2^26 codewords")]
    TooLarge { bins: f64, per_bin: f64 },
}

pub type Result<T> = std::result::Result<T, SimError>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimConfig {
    pub n: u32,
    pub r1: f64,
    /// Multicoding excess rate `R1'`.
    pub r1p: f64,
    pub lambda: f64,
    pub trials: u64,
    pub seed: u64,
}

impl SimConfig {
    /// Check ranges and return `(M, B)`.
    pub fn validate(&self) -> Result<(u64, u64)> {
        if self.n == 0 || self.n > MAX_BLOCKLENGTH {
            return Err(SimError::Blocklength(self.n));
        }
        for (name, value) in [("R1", self.r1), ("R1'", self.r1p)] {
            if !value.is_finite() || value < 0.0 {
                return Err(SimError::Rate { name, value });
            }
        }
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(SimError::Lambda(self.lambda));
        }
        if self.trials == 0 {
            return Err(SimError::NoTrials);
        }
        let bins = (self.n as f64 * self.r1).exp2().ceil();
        let per_bin = (self.n as f64 * self.r1p).exp2().ceil();
        if bins * per_bin > MAX_CODEWORDS as f64 {
            return Err(SimError::TooLarge { bins, per_bin });
        }
        Ok((bins as u64, per_bin as u64))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimResult {
    pub trials: u64,
    pub enc_fail: u64,
    pub dec_err: u64,
    pub err_rate: f64,
    /// Wilson 95% interval for the error probability.
    pub ci_lo: f64,
    pub ci_hi: f64,
}

impl SimResult {
    fn new(trials: u64, enc_fail: u64, dec_err: u64) -> Self {
        let errors = enc_fail + dec_err;
        let (ci_lo, ci_hi) = wilson_interval(errors, trials);
        Self {
            trials,
            enc_fail,
            dec_err,
            err_rate: errors as f64 / trials as f64,
            ci_lo,
            ci_hi,
        }
    }

    pub fn errors(&self) -> u64 {
        self.enc_fail + self.dec_err
    }
}

/// Wilson score interval at 95% confidence.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Standard deviation of an error-rate estimate over `trials` when the true
/// error probability is `p`.
pub fn binomial_sigma(p: f64, trials: u64) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}

/// Per-trial generators. The codebook stream supports jumping to a bin, so
/// codewords are regenerated instead of stored.
fn trial_key(seed: u64, trial: u64) -> u64 {
    seed ^ trial.wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

fn codebook_rng(key: u64) -> Pcg64Mcg {
    Pcg64Mcg::seed_from_u64(key ^ 0x636f_6465_626f_6f6b)
}

fn side_rng(key: u64) -> Pcg64 {
    Pcg64::seed_from_u64(key ^ 0x7374_6174_652b_6d73)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Ok,
    EncodingFailure,
    DecodingError,
}

fn run_trial(n: u32, m_bins: u64, b: u64, lambda: f64, key: u64) -> Outcome {
    let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut side = side_rng(key);
    let stuck = (0..n).fold(0u64, |s, i| s | (side.random_bool(lambda) as u64) << i);
    let message = side.random_range(0..m_bins);

    let mut book = codebook_rng(key);
    book.advance(u128::from(message * b));
    let Some(x) = (0..b)
        .map(|_| book.random::<u64>() & mask)
        .find(|&w| w & stuck == 0)
    else {
        return Outcome::EncodingFailure;
    };
    assert_eq!(
        x & stuck,
        0,
        "transmitted word must be zero on stuck positions"
    );

    // matches at receiver 1 in any bin other than the message's
    let mut book = codebook_rng(key);
    for bin in 0..m_bins {
        if bin == message {
            book.advance(u128::from(b));
            continue;
        }
        if (0..b).any(|_| book.random::<u64>() & mask == x) {
            return Outcome::DecodingError;
        }
    }
    Outcome::Ok
}

/// Run `cfg.trials` independent trials, each with a fresh state sequence,
/// message and codebook. Trials are seeded from `(seed, trial)`, so the
/// result does not depend on thread count.
pub fn simulate(cfg: &SimConfig) -> Result<SimResult> {
    let (m_bins, b) = cfg.validate()?;
    let (enc, dec) = (0..cfg.trials)
        .into_par_iter()
        .map(
            |t| match run_trial(cfg.n, m_bins, b, cfg.lambda, trial_key(cfg.seed, t)) {
                Outcome::Ok => (0u64, 0u64),
                Outcome::EncodingFailure => (1, 0),
                Outcome::DecodingError => (0, 1),
            },
        )
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(SimResult::new(cfg.trials, enc, dec))
}

/// Error probability of the scheme, averaged over codebooks:
/// `P_enc + (1 - P_enc)(1 - (1 - 2^{-n})^{MB-1})` with
/// `P_enc = E_k[(1 - 2^{-k})^B]`, `k ~ Bin(n, λ)`. Counting every other
/// codeword as a potential collision, including words of the message's own
/// bin, biases it upward by at most `B·2^{-n}`.
pub fn analytic_error(cfg: &SimConfig) -> Result<f64> {
    let (m_bins, b) = cfg.validate()?;
    let n = cfg.n;
    let p_enc: f64 = (0..=n)
        .map(|k| {
            let all_fail = if k == 0 {
                0.0
            } else {
                (b as f64 * (-(-(k as f64)).exp2()).ln_1p()).exp()
            };
            binomial_pmf(n, k, cfg.lambda) * all_fail
        })
        .sum();
    let others = (m_bins * b - 1) as f64;
    let collision = -(others * (-(-(n as f64)).exp2()).ln_1p()).exp_m1();
    Ok(p_enc + (1.0 - p_enc) * collision)
}

fn binomial_pmf(n: u32, k: u32, p: f64) -> f64 {
    let mut c = 1.0f64;
    for i in 0..k {
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    c * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub config: SimConfig,
    pub result: SimResult,
    pub analytic: f64,
}

/// Simulate every `(n, R1)` cell of a grid built from `base`. Cell seeds are
/// derived from `(base.seed, n, R1)`.
pub fn rate_sweep(base: &SimConfig, ns: &[u32], r1s: &[f64]) -> Result<Vec<SweepRow>> {
    let cells: Vec<SimConfig> = ns
        .iter()
        .flat_map(|&n| {
            r1s.iter().map(move |&r1| SimConfig {
                n,
                r1,
                seed: base.seed
                    ^ u64::from(n).wrapping_mul(0xd6e8_feb8_6659_fd93)
                    ^ r1.to_bits()
                        .rotate_left(29)
                        .wrapping_mul(0xa076_1d64_78bd_642f),
                ..*base
            })
        })
        .collect();
    for c in &cells {
        c.validate()?;
    }
    cells
        .iter()
        .map(|c| {
            Ok(SweepRow {
                config: *c,
                result: simulate(c)?,
                analytic: analytic_error(c)?,
            })
        })
        .collect()
}

pub const CSV_HEADER: &str =
    "n,R1,R1p,lambda,trials,enc_fail,dec_err,err_rate,ci_lo,ci_hi,analytic";

pub fn csv_row(row: &SweepRow) -> String {
    let (c, r) = (&row.config, &row.result);
    format!(
        "{},{},{},{},{},{},{},{},{},{},{}",
        c.n,
        c.r1,
        c.r1p,
        c.lambda,
        r.trials,
        r.enc_fail,
        r.dec_err,
        r.err_rate,
        r.ci_lo,
        r.ci_hi,
        row.analytic
    )
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&csv_row(r));
        out.push('\n');
    }
    out
}
