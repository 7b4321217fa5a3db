//! Decision procedure for Shannon-type linear information inequalities,
//! optionally under independence, Markov and functional-dependence
//! constraints, plus numerical checks on sampled distributions.
//!
//! Entropy vectors have one coordinate per nonempty subset of the ground set;
//! subset `mask` (bit `i` = variable `i`) lives at index `mask - 1`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::Rational64;
use rand::SeedableRng;
use rand_pcg::Pcg64;
use rayon::prelude::*;
use thiserror::Error;

use crate::channels::GeneralDmic;
use crate::lp::{LinearProgram, LpError, LpSolution, Relation};
use crate::prob::{random_probs, Alphabet, Axis, JointDistribution, ProbError};
use crate::regions::HkSlice;

pub const MAX_VARS: usize = 8;
/// Decision threshold on the normalized cone LP and certificate residuals.
pub const PROVER_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum ProverError {
    #[error("entropy space needs 1..={MAX_VARS} variables, got {0}")]
    VarCount(usize),
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("expression has {got} coordinates, space has {expected}")]
    SpaceMismatch { expected: usize, got: usize },
    #[error("target expression is identically zero")]
    ZeroExpression,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("query has no `target` line")]
    MissingTarget,
    #[error("linear program failed: {0}")]
    Lp(#[from] LpError),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("no registered sampler covers variables {vars:?} under the given constraints")]
    NoSampler { vars: Vec<String> },
    #[error(transparent)]
    Prob(#[from] ProbError),
}

pub type Result<T> = std::result::Result<T, ProverError>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntropySpace {
    names: Vec<String>,
}

impl EntropySpace {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        if names.is_empty() || names.len() > MAX_VARS {
            return Err(ProverError::VarCount(names.len()));
        }
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(ProverError::DuplicateVariable(n.clone()));
            }
        }
        Ok(Self { names })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn k(&self) -> usize {
        self.names.len()
    }

    /// Number of coordinates, `2^k - 1`.
    pub fn dim(&self) -> usize {
        (1 << self.k()) - 1
    }

    fn full(&self) -> u32 {
        (1u32 << self.k()) - 1
    }

    pub fn mask_of<S: AsRef<str>>(&self, vars: &[S]) -> Result<u32> {
        vars.iter().try_fold(0u32, |m, v| {
            let v = v.as_ref();
            self.names
                .iter()
                .position(|n| n == v)
                .map(|i| m | 1 << i)
                .ok_or_else(|| ProverError::UnknownVariable(v.to_string()))
        })
    }

    pub fn subset_label(&self, mask: u32) -> String {
        (0..self.k())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| self.names[i].as_str())
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn zero(&self) -> EntropyExpression {
        EntropyExpression {
            coeffs: vec![Rational64::from_integer(0); self.dim()],
        }
    }

    fn h_mask(&self, mask: u32) -> EntropyExpression {
        let mut e = self.zero();
        if mask != 0 {
            e.coeffs[mask as usize - 1] = Rational64::from_integer(1);
        }
        e
    }

    fn cond_h_mask(&self, a: u32, given: u32) -> EntropyExpression {
        self.h_mask(a | given) - self.h_mask(given)
    }

    fn mi_mask(&self, a: u32, b: u32, given: u32) -> EntropyExpression {
        self.h_mask(a | given) + self.h_mask(b | given)
            - self.h_mask(a | b | given)
            - self.h_mask(given)
    }

    /// `H(vars)`.
    pub fn h<S: AsRef<str>>(&self, vars: &[S]) -> Result<EntropyExpression> {
        Ok(self.h_mask(self.mask_of(vars)?))
    }

    /// `H(a | given)`.
    pub fn cond_h<S: AsRef<str>>(&self, a: &[S], given: &[S]) -> Result<EntropyExpression> {
        Ok(self.cond_h_mask(self.mask_of(a)?, self.mask_of(given)?))
    }

    /// `I(a ; b | given)`.
    pub fn mi<S: AsRef<str>>(&self, a: &[S], b: &[S], given: &[S]) -> Result<EntropyExpression> {
        Ok(self.mi_mask(self.mask_of(a)?, self.mask_of(b)?, self.mask_of(given)?))
    }

    /// The elemental Shannon inequalities, each as an expression `≥ 0`:
    /// `H(X_i | rest)` for every `i`, then `I(X_i ; X_j | X_A)` for `i < j`
    /// and every `A` avoiding both.
    pub fn elemental(&self) -> Vec<Elemental> {
        let k = self.k();
        let full = self.full();
        let mut out = Vec::with_capacity(elemental_count(k));
        for i in 0..k {
            let rest = full & !(1 << i);
            out.push(Elemental {
                expr: self.cond_h_mask(1 << i, rest),
                label: format!("H({}|{})", self.names[i], self.subset_label(rest)),
            });
        }
        for i in 0..k {
            for j in i + 1..k {
                let others = full & !(1 << i) & !(1 << j);
                // enumerate subsets of `others`, smallest first
                let mut a = 0u32;
                loop {
                    out.push(Elemental {
                        expr: self.mi_mask(1 << i, 1 << j, a),
                        label: if a == 0 {
                            format!("I({};{})", self.names[i], self.names[j])
                        } else {
                            format!(
                                "I({};{}|{})",
                                self.names[i],
                                self.names[j],
                                self.subset_label(a)
                            )
                        },
                    });
                    if a == others {
                        break;
                    }
                    a = (a.wrapping_sub(others)) & others;
                }
            }
        }
        out
    }

    fn check(&self, e: &EntropyExpression) -> Result<()> {
        if e.coeffs.len() != self.dim() {
            return Err(ProverError::SpaceMismatch {
                expected: self.dim(),
                got: e.coeffs.len(),
            });
        }
        Ok(())
    }
}

/// `k + C(k,2) 2^(k-2)`.
pub fn elemental_count(k: usize) -> usize {
    if k < 2 {
        k
    } else {
        k + k * (k - 1) / 2 * (1 << (k - 2))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Elemental {
    pub expr: EntropyExpression,
    pub label: String,
}

/// A rational combination of joint entropies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntropyExpression {
    coeffs: Vec<Rational64>,
}

impl EntropyExpression {
    pub fn coeffs(&self) -> &[Rational64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs
            .iter()
            .all(|c| *c == Rational64::from_integer(0))
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coeffs
            .iter()
            .map(|c| *c.numer() as f64 / *c.denom() as f64)
            .collect()
    }

    /// Value on an entropy vector in the same space.
    pub fn eval(&self, h: &[f64]) -> f64 {
        self.to_f64().iter().zip(h).map(|(c, x)| c * x).sum()
    }

    /// Re-express over a larger space containing every variable of `from`.
    pub fn embed(&self, from: &EntropySpace, to: &EntropySpace) -> Result<Self> {
        from.check(self)?;
        let map: Vec<u32> = from
            .names()
            .iter()
            .map(|n| to.mask_of(&[n]))
            .collect::<Result<_>>()?;
        let mut out = to.zero();
        for (idx, c) in self.coeffs.iter().enumerate() {
            let mask = idx as u32 + 1;
            let image = (0..from.k())
                .filter(|i| mask >> i & 1 == 1)
                .fold(0u32, |m, i| m | map[i]);
            out.coeffs[image as usize - 1] += *c;
        }
        Ok(out)
    }

    /// Re-express over a smaller space; every subset with a nonzero
    /// coefficient must lie inside `to`.
    pub fn restrict(&self, from: &EntropySpace, to: &EntropySpace) -> Result<Self> {
        from.check(self)?;
        let mut out = to.zero();
        for (idx, c) in self.coeffs.iter().enumerate() {
            if *c == Rational64::from_integer(0) {
                continue;
            }
            let mask = idx as u32 + 1;
            let names: Vec<&str> = (0..from.k())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| from.names[i].as_str())
                .collect();
            out.coeffs[to.mask_of(&names)? as usize - 1] += *c;
        }
        Ok(out)
    }

    pub fn display<'a>(&'a self, space: &'a EntropySpace) -> impl fmt::Display + 'a {
        ExprDisplay { expr: self, space }
    }
}

struct ExprDisplay<'a> {
    expr: &'a EntropyExpression,
    space: &'a EntropySpace,
}

impl fmt::Display for ExprDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (idx, c) in self.expr.coeffs.iter().enumerate() {
            if *c == Rational64::from_integer(0) {
                continue;
            }
            let label = self.space.subset_label(idx as u32 + 1);
            let negative = *c < Rational64::from_integer(0);
            let mag = if negative { -*c } else { *c };
            let sign = if negative { "-" } else { "+" };
            if first {
                if sign == "-" {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if mag != Rational64::from_integer(1) {
                write!(f, "{mag}*")?;
            }
            write!(f, "H({label})")?;
            first = false;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl Add for EntropyExpression {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self.coeffs
            .iter_mut()
            .zip(rhs.coeffs)
            .for_each(|(a, b)| *a += b);
        self
    }
}

impl Sub for EntropyExpression {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + -rhs
    }
}

impl Neg for EntropyExpression {
    type Output = Self;
    fn neg(mut self) -> Self {
        self.coeffs.iter_mut().for_each(|a| *a = -*a);
        self
    }
}

impl Mul<Rational64> for EntropyExpression {
    type Output = Self;
    fn mul(mut self, k: Rational64) -> Self {
        self.coeffs.iter_mut().for_each(|a| *a *= k);
        self
    }
}

/// Equalities `expr = 0`, each with a readable label.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConstraintSet {
    items: Vec<(String, EntropyExpression)>,
}

impl ConstraintSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn items(&self) -> &[(String, EntropyExpression)] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn push(&mut self, label: impl Into<String>, expr: EntropyExpression) {
        self.items.push((label.into(), expr));
    }

    /// Mutual independence of the groups: `Σ H(G_i) - H(∪ G_i) = 0`.
    pub fn indep<S: AsRef<str>>(&mut self, space: &EntropySpace, groups: &[&[S]]) -> Result<()> {
        let masks: Vec<u32> = groups
            .iter()
            .map(|g| space.mask_of(g))
            .collect::<Result<_>>()?;
        let union = masks.iter().fold(0, |m, g| m | g);
        let expr =
            masks.iter().fold(space.zero(), |e, &g| e + space.h_mask(g)) - space.h_mask(union);
        let label = groups_label(space, &masks, " ; ");
        self.push(format!("indep {label}"), expr);
        Ok(())
    }

    /// `G_0 - G_1 - ... - G_n`: for each interior `G_i`, the past and the
    /// future are independent given `G_i`.
    pub fn markov<S: AsRef<str>>(&mut self, space: &EntropySpace, groups: &[&[S]]) -> Result<()> {
        let masks: Vec<u32> = groups
            .iter()
            .map(|g| space.mask_of(g))
            .collect::<Result<_>>()?;
        let label = groups_label(space, &masks, " - ");
        for i in 1..masks.len().saturating_sub(1) {
            let past = masks[..i].iter().fold(0, |m, g| m | g);
            let future = masks[i + 1..].iter().fold(0, |m, g| m | g);
            self.push(
                format!("markov {label}"),
                space.mi_mask(past, future, masks[i]),
            );
        }
        Ok(())
    }

    /// `a` is a function of `given`: `H(a | given) = 0`.
    pub fn functional<S: AsRef<str>>(
        &mut self,
        space: &EntropySpace,
        a: &[S],
        given: &[S],
    ) -> Result<()> {
        let (a, g) = (space.mask_of(a)?, space.mask_of(given)?);
        self.push(
            format!("func {} | {}", space.subset_label(a), space.subset_label(g)),
            space.cond_h_mask(a, g),
        );
        Ok(())
    }

    fn embed(&self, from: &EntropySpace, to: &EntropySpace) -> Result<Self> {
        Ok(Self {
            items: self
                .items
                .iter()
                .map(|(l, e)| Ok((l.clone(), e.embed(from, to)?)))
                .collect::<Result<_>>()?,
        })
    }
}

fn groups_label(space: &EntropySpace, masks: &[u32], sep: &str) -> String {
    masks
        .iter()
        .map(|&m| space.subset_label(m))
        .collect::<Vec<_>>()
        .join(sep)
}

/// Dual multipliers: `target = Σ λ_i elemental_i + Σ μ_j constraint_j` with
/// `λ ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    /// `(index into EntropySpace::elemental, λ)` for nonzero `λ`.
    pub elemental: Vec<(usize, f64)>,
    /// One `μ` per constraint.
    pub constraints: Vec<f64>,
}

/// A polymatroid-cone point satisfying the constraints with `target = -1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ray {
    pub h: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Provable(Certificate),
    NotProvable(Ray),
}

impl Verdict {
    pub fn is_provable(&self) -> bool {
        matches!(self, Verdict::Provable(_))
    }
}

/// Decide `target ≥ 0` over the polymatroid cone cut by `constraints`.
pub fn prove(
    space: &EntropySpace,
    target: &EntropyExpression,
    constraints: &ConstraintSet,
) -> Result<Verdict> {
    space.check(target)?;
    for (_, c) in &constraints.items {
        space.check(c)?;
    }
    if target.is_zero() {
        return Err(ProverError::ZeroExpression);
    }
    let elemental = space.elemental();
    let n = space.dim();
    let obj = target.to_f64();

    // the cone is pointed and h(ground) bounds every coordinate, so
    // normalizing it to ≤ 1 keeps the LP bounded
    let mut lp = LinearProgram::minimize(obj.clone());
    for e in &elemental {
        lp.add(e.expr.to_f64(), Relation::Ge, 0.0)?;
    }
    for (_, c) in &constraints.items {
        lp.add(c.to_f64(), Relation::Eq, 0.0)?;
    }
    let mut top = vec![0.0; n];
    top[n - 1] = 1.0;
    lp.add(top, Relation::Le, 1.0)?;
    match lp.solve()? {
        LpSolution::Optimal { x, value } if value < -PROVER_TOL => {
            let h = x.iter().map(|v| v / -value).collect();
            return Ok(Verdict::NotProvable(Ray { h }));
        }
        LpSolution::Optimal { .. } => {}
        other => {
            return Err(ProverError::Numerical(format!(
                "normalized cone program returned {other:?}"
            )))
        }
    }

    // target = Σ λ_i g_i + Σ (μ⁺ - μ⁻)_j c_j, minimizing Σ λ for sparsity
    let m = elemental.len();
    let nc = constraints.len();
    let mut cost = vec![1.0; m];
    cost.extend(std::iter::repeat_n(0.0, 2 * nc));
    let mut cert = LinearProgram::minimize(cost);
    let g: Vec<Vec<f64>> = elemental.iter().map(|e| e.expr.to_f64()).collect();
    let c: Vec<Vec<f64>> = constraints.items.iter().map(|(_, e)| e.to_f64()).collect();
    for t in 0..n {
        let mut row: Vec<f64> = g.iter().map(|r| r[t]).collect();
        row.extend(c.iter().map(|r| r[t]));
        row.extend(c.iter().map(|r| -r[t]));
        cert.add(row, Relation::Eq, obj[t])?;
    }
    match cert.solve()? {
        LpSolution::Optimal { x, .. } => {
            let certificate = Certificate {
                elemental: x[..m]
                    .iter()
                    .enumerate()
                    .filter(|(_, &v)| v > PROVER_TOL)
                    .map(|(i, &v)| (i, v))
                    .collect(),
                constraints: (0..nc).map(|j| x[m + j] - x[m + nc + j]).collect(),
            };
            let residual = certificate_residual(space, target, constraints, &certificate);
            if residual > PROVER_TOL {
                return Err(ProverError::Numerical(format!(
                    "certificate residual {residual:e}"
                )));
            }
            Ok(Verdict::Provable(certificate))
        }
        other => Err(ProverError::Numerical(format!(
            "cone program is bounded but the certificate program returned {other:?}"
        ))),
    }
}

/// `max_t |target_t - Σ λ g_t - Σ μ c_t|`.
pub fn certificate_residual(
    space: &EntropySpace,
    target: &EntropyExpression,
    constraints: &ConstraintSet,
    cert: &Certificate,
) -> f64 {
    let elemental = space.elemental();
    let mut r = target.to_f64();
    for &(i, l) in &cert.elemental {
        for (ri, g) in r.iter_mut().zip(elemental[i].expr.to_f64()) {
            *ri -= l * g;
        }
    }
    for ((_, c), mu) in constraints.items.iter().zip(&cert.constraints) {
        for (ri, g) in r.iter_mut().zip(c.to_f64()) {
            *ri -= mu * g;
        }
    }
    r.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// How a ray sits relative to the cone: worst elemental value (should be
/// ≥ 0), worst constraint magnitude (should be 0), and the target value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayCheck {
    pub min_elemental: f64,
    pub max_constraint: f64,
    pub target: f64,
}

pub fn check_ray(
    space: &EntropySpace,
    target: &EntropyExpression,
    constraints: &ConstraintSet,
    ray: &Ray,
) -> RayCheck {
    RayCheck {
        min_elemental: space
            .elemental()
            .iter()
            .map(|e| e.expr.eval(&ray.h))
            .fold(f64::INFINITY, f64::min),
        max_constraint: constraints
            .items
            .iter()
            .map(|(_, c)| c.eval(&ray.h).abs())
            .fold(0.0, f64::max),
        target: target.eval(&ray.h),
    }
}

/// A parsed query file.
#[derive(Debug, Clone, PartialEq)]
pub struct Query {
    pub space: EntropySpace,
    pub constraints: ConstraintSet,
    /// The target as a `≥ 0` statement.
    pub target: EntropyExpression,
    pub target_text: String,
}

impl Query {
    pub fn prove(&self) -> Result<Verdict> {
        prove(&self.space, &self.target, &self.constraints)
    }

    /// Parse:
    ///
    /// ```text
    /// vars U1 X1 U2 Y1
    /// markov U1 - X1 - U2,Y1
    /// indep U1,X1 ; U2
    /// func Y1 | X1,U2
    /// target I(X1;U1,U2,Y1) <= I(U1;X1) + I(U1,X1;U2,Y1)
    /// ```
    ///
    /// `vars` must come first; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut space: Option<EntropySpace> = None;
        let mut constraints = ConstraintSet::new();
        let mut target = None;
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| ProverError::Parse { line: n + 1, msg };
            let (kw, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            if kw == "vars" {
                let names: Vec<&str> = rest
                    .split(|c: char| c.is_whitespace() || c == ',')
                    .filter(|s| !s.is_empty())
                    .collect();
                space = Some(EntropySpace::new(&names)?);
                continue;
            }
            let sp = space
                .as_ref()
                .ok_or_else(|| err("`vars` must precede other lines".into()))?;
            match kw {
                "indep" => {
                    let groups = split_groups(rest, ';');
                    if groups.len() < 2 {
                        return Err(err("indep needs at least two groups".into()));
                    }
                    let refs: Vec<&[&str]> = groups.iter().map(|g| g.as_slice()).collect();
                    constraints.indep(sp, &refs)?;
                }
                "markov" => {
                    let groups = split_groups(rest, '-');
                    if groups.len() < 3 {
                        return Err(err("markov needs at least three groups".into()));
                    }
                    let refs: Vec<&[&str]> = groups.iter().map(|g| g.as_slice()).collect();
                    constraints.markov(sp, &refs)?;
                }
                "func" => {
                    let (a, g) = rest.split_once('|').unwrap_or((rest, ""));
                    constraints.functional(sp, &names_of(a), &names_of(g))?;
                }
                "target" => {
                    let (lhs, rhs, ge) = if let Some((l, r)) = rest.split_once(">=") {
                        (l, r, true)
                    } else if let Some((l, r)) = rest.split_once("<=") {
                        (l, r, false)
                    } else {
                        return Err(err("target needs `>=` or `<=`".into()));
                    };
                    let l = parse_expression(sp, lhs).map_err(err)?;
                    let r = parse_expression(sp, rhs).map_err(err)?;
                    target = Some((if ge { l - r } else { r - l }, rest.to_string()));
                }
                other => return Err(err(format!("unknown directive `{other}`"))),
            }
        }
        let space = space.ok_or(ProverError::MissingTarget)?;
        let (target, target_text) = target.ok_or(ProverError::MissingTarget)?;
        Ok(Self {
            space,
            constraints,
            target,
            target_text,
        })
    }
}

fn names_of(s: &str) -> Vec<&str> {
    s.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .collect()
}

fn split_groups(s: &str, sep: char) -> Vec<Vec<&str>> {
    s.split(sep).map(names_of).collect()
}

/// Parse `2 I(A;B|C) - H(X|Y) + 1/2 H(Z)`; `0` is the empty sum.
pub fn parse_expression(
    space: &EntropySpace,
    text: &str,
) -> std::result::Result<EntropyExpression, String> {
    let s: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err("empty expression".into());
    }
    if s == ['0'] {
        return Ok(space.zero());
    }
    let mut pos = 0;
    let mut out = space.zero();
    while pos < s.len() {
        let mut sign = 1i64;
        if pos > 0 || matches!(s[pos], '+' | '-') {
            match s[pos] {
                '+' => pos += 1,
                '-' => {
                    sign = -1;
                    pos += 1
                }
                c => return Err(format!("expected `+` or `-`, found `{c}`")),
            }
        }
        let start = pos;
        while pos < s.len() && (s[pos].is_ascii_digit() || s[pos] == '/') {
            pos += 1;
        }
        let coeff = if pos == start {
            Rational64::from_integer(1)
        } else {
            let lit: String = s[start..pos].iter().collect();
            parse_rational(&lit).ok_or_else(|| format!("bad coefficient `{lit}`"))?
        };
        if pos < s.len() && s[pos] == '*' {
            pos += 1;
        }
        let kind = *s.get(pos).ok_or("expected H(...) or I(...)")?;
        if !matches!(kind, 'H' | 'I') || s.get(pos + 1) != Some(&'(') {
            return Err(format!(
                "expected H(...) or I(...) at `{}`",
                s[pos..].iter().collect::<String>()
            ));
        }
        let close = s[pos..]
            .iter()
            .position(|&c| c == ')')
            .ok_or("unclosed parenthesis")?
            + pos;
        let body: String = s[pos + 2..close].iter().collect();
        let (main, given) = body.split_once('|').unwrap_or((&body, ""));
        let given = space.mask_of(&names_of(given)).map_err(|e| e.to_string())?;
        let term = if kind == 'H' {
            let a = space.mask_of(&names_of(main)).map_err(|e| e.to_string())?;
            if a == 0 {
                return Err("H() needs at least one variable".into());
            }
            space.cond_h_mask(a, given)
        } else {
            let (a, b) = main.split_once(';').ok_or("I(...) needs `;`")?;
            let a = space.mask_of(&names_of(a)).map_err(|e| e.to_string())?;
            let b = space.mask_of(&names_of(b)).map_err(|e| e.to_string())?;
            if a == 0 || b == 0 {
                return Err("I(;) needs variables on both sides".into());
            }
            space.mi_mask(a, b, given)
        };
        out = out + term * (coeff * Rational64::from_integer(sign));
        pos = close + 1;
    }
    Ok(out)
}

fn parse_rational(s: &str) -> Option<Rational64> {
    match s.split_once('/') {
        Some((n, d)) => {
            let (n, d): (i64, i64) = (n.parse().ok()?, d.parse().ok()?);
            (d != 0).then(|| Rational64::new(n, d))
        }
        None => Some(Rational64::from_integer(s.parse().ok()?)),
    }
}

/// A constructive source of joint distributions with known structure.
pub trait Sampler: Send + Sync {
    fn name(&self) -> &str;
    fn variables(&self) -> Vec<String>;
    /// Constraints every sample satisfies, over `EntropySpace::new(variables)`.
    fn guarantees(&self, space: &EntropySpace) -> Result<ConstraintSet>;
    fn sample(&self, rng: &mut Pcg64) -> Result<JointDistribution>;
}

/// Random HK slices: `p(u1,x1) p(u2,x2) p(y1,y2|x1,x2)` over a random DM-IC.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HkSampler {
    /// Sizes of `U1, X1, U2, X2, Y1, Y2`.
    pub sizes: [usize; 6],
}

impl Default for HkSampler {
    fn default() -> Self {
        Self { sizes: [2; 6] }
    }
}

pub const HK_VARIABLES: [&str; 6] = ["U1", "X1", "U2", "X2", "Y1", "Y2"];

impl Sampler for HkSampler {
    fn name(&self) -> &str {
        "hk"
    }

    fn variables(&self) -> Vec<String> {
        HK_VARIABLES.iter().map(|s| s.to_string()).collect()
    }

    fn guarantees(&self, space: &EntropySpace) -> Result<ConstraintSet> {
        hk_constraints(space)
    }

    fn sample(&self, rng: &mut Pcg64) -> Result<JointDistribution> {
        let [u1, x1, u2, x2, y1, y2] = self.sizes;
        let ch = GeneralDmic::random(rng, x1, x2, y1, y2);
        let slice = HkSlice::new(
            &ch,
            u1,
            u2,
            random_probs(rng, u1 * x1),
            random_probs(rng, u2 * x2),
        )
        .map_err(|e| ProverError::Numerical(e.to_string()))?;
        slice
            .joint()
            .map_err(|e| ProverError::Numerical(e.to_string()))
    }
}

/// Unstructured random joints over given variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeSampler {
    pub names: Vec<String>,
    pub size: usize,
}

impl Sampler for FreeSampler {
    fn name(&self) -> &str {
        "free"
    }

    fn variables(&self) -> Vec<String> {
        self.names.clone()
    }

    fn guarantees(&self, _: &EntropySpace) -> Result<ConstraintSet> {
        Ok(ConstraintSet::new())
    }

    fn sample(&self, rng: &mut Pcg64) -> Result<JointDistribution> {
        let axes: Vec<Axis> = self
            .names
            .iter()
            .map(|n| Axis {
                name: n.clone(),
                alphabet: Alphabet::indexed(n.clone(), self.size),
            })
            .collect();
        let cells = self.size.pow(self.names.len() as u32);
        Ok(JointDistribution::new(axes, random_probs(rng, cells))?)
    }
}

/// The independence and Markov structure of an HK slice over the variables
/// `U1 X1 U2 X2 Y1 Y2` (all must be present in `space`).
pub fn hk_constraints(space: &EntropySpace) -> Result<ConstraintSet> {
    let mut c = ConstraintSet::new();
    c.indep(space, &[&["U1", "X1"][..], &["U2", "X2"]])?;
    c.markov(space, &[&["U1", "U2"][..], &["X1", "X2"], &["Y1", "Y2"]])?;
    Ok(c)
}

/// Registered samplers, tried in order; a free sampler over the query's own
/// variables is the fallback.
pub struct SamplerRegistry {
    samplers: Vec<Box<dyn Sampler>>,
}

impl Default for SamplerRegistry {
    fn default() -> Self {
        Self {
            samplers: vec![Box::new(HkSampler::default())],
        }
    }
}

impl SamplerRegistry {
    pub fn register(&mut self, s: Box<dyn Sampler>) {
        self.samplers.push(s);
    }

    /// A sampler whose variables include `space` and whose guaranteed
    /// structure implies every constraint (checked with the prover).
    pub fn find(
        &self,
        space: &EntropySpace,
        constraints: &ConstraintSet,
    ) -> Result<Box<dyn Sampler + '_>> {
        for s in &self.samplers {
            if covers(s.as_ref(), space, constraints)? {
                return Ok(Box::new(Borrowed(s.as_ref())));
            }
        }
        let free = FreeSampler {
            names: space.names().to_vec(),
            size: if space.k() <= 5 { 3 } else { 2 },
        };
        if covers(&free, space, constraints)? {
            return Ok(Box::new(free));
        }
        Err(ProverError::NoSampler {
            vars: space.names().to_vec(),
        })
    }
}

struct Borrowed<'a>(&'a dyn Sampler);

impl Sampler for Borrowed<'_> {
    fn name(&self) -> &str {
        self.0.name()
    }
    fn variables(&self) -> Vec<String> {
        self.0.variables()
    }
    fn guarantees(&self, space: &EntropySpace) -> Result<ConstraintSet> {
        self.0.guarantees(space)
    }
    fn sample(&self, rng: &mut Pcg64) -> Result<JointDistribution> {
        self.0.sample(rng)
    }
}

fn covers(s: &dyn Sampler, space: &EntropySpace, constraints: &ConstraintSet) -> Result<bool> {
    let vars = s.variables();
    if !space.names().iter().all(|n| vars.contains(n)) {
        return Ok(false);
    }
    let own = EntropySpace::new(&vars)?;
    let given = s.guarantees(&own)?;
    for (_, c) in constraints.embed(space, &own)?.items {
        // c ≥ 0 holds for every constraint kind, so c = 0 iff -c ≥ 0
        if c.is_zero() {
            continue;
        }
        if !prove(&own, &-c, &given)?.is_provable() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Range of an expression over sampled distributions.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericReport {
    pub sampler: String,
    pub trials: usize,
    pub min: f64,
    pub max: f64,
}

impl NumericReport {
    /// How far the `≥ 0` statement is violated, or 0.
    pub fn violation(&self) -> f64 {
        (-self.min).max(0.0)
    }

    /// Largest magnitude, for identities.
    pub fn max_abs(&self) -> f64 {
        self.min.abs().max(self.max.abs())
    }
}

/// Evaluate `expr` on `trials` sampled distributions satisfying
/// `constraints` by construction. Trial `t` is seeded from `(seed, t)`, so
/// the report does not depend on thread count.
pub fn check_numeric(
    space: &EntropySpace,
    expr: &EntropyExpression,
    constraints: &ConstraintSet,
    trials: usize,
    seed: u64,
    registry: &SamplerRegistry,
) -> Result<NumericReport> {
    space.check(expr)?;
    let sampler = registry.find(space, constraints)?;
    let names: Vec<&str> = space.names().iter().map(String::as_str).collect();
    let values: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t as u64);
            let joint = sampler.sample(&mut rng)?;
            Ok(expr.eval(&joint.entropy_vector(&names)?))
        })
        .collect::<Result<_>>()?;
    Ok(NumericReport {
        sampler: sampler.name().to_string(),
        trials,
        min: values.iter().copied().fold(f64::INFINITY, f64::min),
        max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    })
}

fn trial_rng(seed: u64, t: u64) -> Pcg64 {
    Pcg64::seed_from_u64(seed ^ t.wrapping_mul(0x9e37_79b9_7f4a_7c15).rotate_left(17))
}

/// The ten bound terms `a..j` of the HK coding conditions as entropy
/// expressions over a space containing the HK variables.
pub fn hk_bound_terms(space: &EntropySpace) -> Result<[EntropyExpression; 10]> {
    let i = |a: &[&str], b: &[&str], c: &[&str]| space.mi(a, b, c);
    let a = i(&["U1"], &["X1"], &[])?;
    let b = i(&["U2"], &["X2"], &[])?;
    let c = i(&["X1"], &["U1", "U2", "Y1"], &[])?;
    let d = i(&["X1", "U2"], &["U1", "Y1"], &[])?;
    let e = a.clone() + i(&["U1", "X1"], &["U2", "Y1"], &[])?;
    let f = e.clone() + i(&["U2"], &["Y1"], &[])?;
    let g = i(&["X2"], &["U2", "U1", "Y2"], &[])?;
    let h = i(&["X2", "U1"], &["U2", "Y2"], &[])?;
    let ii = b.clone() + i(&["U2", "X2"], &["U1", "Y2"], &[])?;
    let j = ii.clone() + i(&["U1"], &["Y2"], &[])?;
    Ok([a, b, c, d, e, f, g, h, ii, j])
}

/// The pairwise relations among the bound terms, each as `(label, rhs - lhs)`
/// to be shown `≥ 0`, together with the variables it mentions.
pub fn hk_relations(
    space: &EntropySpace,
) -> Result<Vec<(&'static str, EntropyExpression, [&'static str; 4])>> {
    let [a, b, c, d, e, f, g, h, i, j] = hk_bound_terms(space)?;
    const S1: [&str; 4] = ["U1", "X1", "U2", "Y1"];
    const S2: [&str; 4] = ["U2", "X2", "U1", "Y2"];
    Ok(vec![
        ("e-a<=c", c.clone() - (e.clone() - a.clone()), S1),
        ("e-a<=d", d.clone() - (e.clone() - a.clone()), S1),
        ("f-a<=d", d.clone() - (f.clone() - a.clone()), S1),
        ("d<=f", f.clone() - d.clone(), S1),
        ("c<=e", e.clone() - c.clone(), S1),
        ("e<=f", f - e, S1),
        ("i-b<=g", g.clone() - (i.clone() - b.clone()), S2),
        ("i-b<=h", h.clone() - (i.clone() - b.clone()), S2),
        ("j-b<=h", h.clone() - (j.clone() - b.clone()), S2),
        ("h<=j", j.clone() - h.clone(), S2),
        ("g<=i", i.clone() - g.clone(), S2),
        ("i<=j", j - i, S2),
    ])
}

/// The HK structure restricted to one receiver's side: `[U, X, U', Y]` gives
/// `U - X - (U', Y)` and `(U, X) ⊥ U'`.
pub fn restricted_hk_constraints(space: &EntropySpace, side: [&str; 4]) -> Result<ConstraintSet> {
    let [u, x, v, y] = side;
    let mut c = ConstraintSet::new();
    c.markov(space, &[&[u][..], &[x], &[v, y]])?;
    c.indep(space, &[&[u, x][..], &[v]])?;
    Ok(c)
}

/// Identities equating each row of the eliminated region with the direct HK
/// form, as `(label, row - direct)`; each should vanish on HK slices.
pub fn hk_identity_chain(space: &EntropySpace) -> Result<Vec<(&'static str, EntropyExpression)>> {
    let [a, b, c, d, e, f, g, h, i, j] = hk_bound_terms(space)?;
    let mi = |x: &[&str], y: &[&str], z: &[&str]| space.mi(x, y, z);
    let two = Rational64::from_integer(2);
    Ok(vec![
        (
            "R1: e-a",
            e.clone() - a.clone() - mi(&["X1"], &["Y1"], &["U2"])?,
        ),
        ("R2: i-b", i - b.clone() - mi(&["X2"], &["Y2"], &["U1"])?),
        (
            "R1+R2: c+j-a-b",
            c.clone() + j.clone()
                - a.clone()
                - b.clone()
                - mi(&["X1"], &["Y1"], &["U1", "U2"])?
                - mi(&["X2", "U1"], &["Y2"], &[])?,
        ),
        (
            "R1+R2: d+h-a-b",
            d.clone() + h.clone()
                - a.clone()
                - b.clone()
                - mi(&["X1", "U2"], &["Y1"], &["U1"])?
                - mi(&["X2", "U1"], &["Y2"], &["U2"])?,
        ),
        (
            "R1+R2: f+g-a-b",
            f.clone() + g.clone()
                - a.clone()
                - b.clone()
                - mi(&["X1", "U2"], &["Y1"], &[])?
                - mi(&["X2"], &["Y2"], &["U1", "U2"])?,
        ),
        (
            "2R1+R2: c+h+f-2a-b",
            c + h + f
                - a.clone() * two
                - b.clone()
                - mi(&["X1"], &["Y1"], &["U1", "U2"])?
                - mi(&["X2", "U1"], &["Y2"], &["U2"])?
                - mi(&["X1", "U2"], &["Y1"], &[])?,
        ),
        (
            "R1+2R2: d+g+j-a-2b",
            d + g + j
                - a
                - b * two
                - mi(&["X2"], &["Y2"], &["U1", "U2"])?
                - mi(&["X1", "U2"], &["Y1"], &["U1"])?
                - mi(&["X2", "U1"], &["Y2"], &[])?,
        ),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(names: &[&str]) -> EntropySpace {
        EntropySpace::new(names).unwrap()
    }

    #[test]
    fn elemental_counts() {
        assert_eq!(space(&["X"]).elemental().len(), 1);
        assert_eq!(space(&["X", "Y"]).elemental().len(), 3);
        assert_eq!(space(&["X", "Y", "Z"]).elemental().len(), 9);
        for k in 1..=6 {
            let names: Vec<String> = (0..k).map(|i| format!("V{i}")).collect();
            let s = EntropySpace::new(&names).unwrap();
            assert_eq!(s.elemental().len(), elemental_count(k));
        }
        assert!(EntropySpace::new(&[] as &[&str]).is_err());
        let nine: Vec<String> = (0..9).map(|i| format!("V{i}")).collect();
        assert!(matches!(
            EntropySpace::new(&nine),
            Err(ProverError::VarCount(9))
        ));
    }

    #[test]
    fn mutual_information_is_provable() {
        let s = space(&["X", "Y"]);
        let t = s.mi(&["X"], &["Y"], &[]).unwrap();
        let v = prove(&s, &t, &ConstraintSet::new()).unwrap();
        let Verdict::Provable(cert) = v else {
            panic!("{v:?}")
        };
        assert!(certificate_residual(&s, &t, &ConstraintSet::new(), &cert) < 1e-12);
    }

    #[test]
    fn negative_mutual_information_is_refuted() {
        let s = space(&["X", "Y"]);
        let t = -s.mi(&["X"], &["Y"], &[]).unwrap();
        let Verdict::NotProvable(ray) = prove(&s, &t, &ConstraintSet::new()).unwrap() else {
            panic!()
        };
        let chk = check_ray(&s, &t, &ConstraintSet::new(), &ray);
        assert!(chk.min_elemental >= -1e-9);
        assert!((chk.target + 1.0).abs() < 1e-9);
    }

    #[test]
    fn independence_makes_negative_mi_provable() {
        let s = space(&["X", "Y"]);
        let mut c = ConstraintSet::new();
        c.indep(&s, &[&["X"][..], &["Y"]]).unwrap();
        let t = -s.mi(&["X"], &["Y"], &[]).unwrap();
        assert!(prove(&s, &t, &c).unwrap().is_provable());
    }

    #[test]
    fn zero_target_is_an_error() {
        let s = space(&["X"]);
        assert!(matches!(
            prove(&s, &s.zero(), &ConstraintSet::new()),
            Err(ProverError::ZeroExpression)
        ));
    }

    #[test]
    fn parse_query_and_prove() {
        let q = Query::parse(
            "# f - e >= 0\nvars U1 X1 U2 Y1\nmarkov U1 - X1 - U2,Y1\nindep U1,X1 ; U2\n\
             target I(U1;X1) + I(U2;Y1) + I(U1,X1;U2,Y1) >= I(U1;X1) + I(U1,X1;U2,Y1)\n",
        )
        .unwrap();
        assert_eq!(q.constraints.len(), 2);
        assert!(q.prove().unwrap().is_provable());
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            Query::parse("target H(X) >= 0"),
            Err(ProverError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            Query::parse("vars X Y\n"),
            Err(ProverError::MissingTarget)
        ));
        assert!(Query::parse("vars X\ntarget H(Z) >= 0").is_err());
        assert!(Query::parse("vars X Y\ntarget I(X) >= 0").is_err());
        assert!(Query::parse("vars X Y\nindep X\ntarget H(X) >= 0").is_err());
    }

    #[test]
    fn expression_coefficients() {
        let s = space(&["X", "Y"]);
        let e = parse_expression(&s, "2 H(X) - 1/2*H(X,Y) + H(Y|X)").unwrap();
        assert_eq!(
            e.coeffs(),
            &[
                Rational64::from_integer(1),
                Rational64::from_integer(0),
                Rational64::new(1, 2)
            ]
        );
        // H(Y|X) - H(Y|X) cancels
        assert!(parse_expression(&s, "H(Y|X) - H(X,Y) + H(X)")
            .unwrap()
            .is_zero());
        assert_eq!(e.display(&s).to_string(), "H(X) + 1/2*H(X,Y)");
        assert_eq!((-e).display(&s).to_string(), "-H(X) - 1/2*H(X,Y)");
    }

    #[test]
    fn embedding_preserves_values() {
        let small = space(&["Y", "X"]);
        let big = space(&["X", "Z", "Y"]);
        let e = small.mi(&["X"], &["Y"], &[]).unwrap();
        let f = big.mi(&["X"], &["Y"], &[]).unwrap();
        assert_eq!(e.embed(&small, &big).unwrap(), f);
    }

    #[test]
    fn actual_entropy_vectors_are_polymatroids() {
        let s = space(&["A", "B", "C", "D"]);
        let reg = SamplerRegistry::default();
        for g in s.elemental() {
            let r = check_numeric(&s, &g.expr, &ConstraintSet::new(), 50, 3, &reg).unwrap();
            assert!(r.min >= -1e-10, "{}: {}", g.label, r.min);
        }
    }

    #[test]
    fn hk_sampler_is_chosen_for_hk_structure() {
        let s = space(&HK_VARIABLES);
        let c = hk_constraints(&s).unwrap();
        let reg = SamplerRegistry::default();
        let [a, ..] = hk_bound_terms(&s).unwrap();
        let r = check_numeric(&s, &a, &c, 10, 1, &reg).unwrap();
        assert_eq!(r.sampler, "hk");
        // a functional dependence is not guaranteed by any sampler
        let mut f = c.clone();
        f.functional(&s, &["Y1"], &["X1", "X2"]).unwrap();
        assert!(matches!(
            check_numeric(&s, &a, &f, 10, 1, &reg),
            Err(ProverError::NoSampler { .. })
        ));
    }

    #[test]
    fn numeric_check_is_seeded() {
        let s = space(&["X", "Y", "Z"]);
        let e = s.mi(&["X"], &["Y"], &["Z"]).unwrap();
        let reg = SamplerRegistry::default();
        let a = check_numeric(&s, &e, &ConstraintSet::new(), 64, 9, &reg).unwrap();
        let b = check_numeric(&s, &e, &ConstraintSet::new(), 64, 9, &reg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn hk_relations_are_provable_on_each_side() {
        let full = space(&HK_VARIABLES);
        for (label, expr, side) in hk_relations(&full).unwrap() {
            let s = EntropySpace::new(&side).unwrap();
            let e = expr.restrict(&full, &s).unwrap();
            assert_eq!(e.embed(&s, &full).unwrap(), expr);
            let c = restricted_hk_constraints(&s, side).unwrap();
            assert!(prove(&s, &e, &c).unwrap().is_provable(), "{label}");
        }
        let x = space(&["U1", "X1"]);
        assert!(full.h(&["Y1"]).unwrap().restrict(&full, &x).is_err());
    }

    #[test]
    fn hk_identities_hold_numerically_and_formally() {
        let s = space(&HK_VARIABLES);
        let c = hk_constraints(&s).unwrap();
        let reg = SamplerRegistry::default();
        for (label, e) in hk_identity_chain(&s).unwrap() {
            let r = check_numeric(&s, &e, &c, 100, 11, &reg).unwrap();
            assert!(r.max_abs() <= 1e-9, "{label}: {r:?}");
            assert!(prove(&s, &e, &c).unwrap().is_provable(), "{label} >=");
            assert!(prove(&s, &-e, &c).unwrap().is_provable(), "{label} <=");
        }
    }
}
