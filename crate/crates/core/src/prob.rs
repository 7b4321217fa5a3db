//! Finite-alphabet distributions and the entropy primitives every region
//! formula is built from. All information quantities are in bits.

use rand::{Rng, RngExt};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Allowed deviation of total mass from 1 when constructing distributions.
pub const NORMALIZATION_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProbError {
    #[error("alphabet `{0}` is empty")]
    EmptyAlphabet(String),
    #[error("alphabet `{name}` repeats symbol `{symbol}`")]
    DuplicateSymbol { name: String, symbol: String },
    #[error("expected {expected} weights, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("weight {value} at position {index} is negative or not finite")]
    BadWeight { index: usize, value: f64 },
    #[error("weights sum to {0}, not 1")]
    NotNormalized(f64),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable `{0}` appears twice")]
    DuplicateVariable(String),
    #[error("variable sets overlap on `{0}`")]
    Overlap(String),
    #[error("empty variable set")]
    EmptyVars,
    #[error("kernel for {kernel} conditions on `{var}`, which is not defined earlier")]
    DanglingCondition { kernel: String, var: String },
}

pub type Result<T> = std::result::Result<T, ProbError>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    name: String,
    symbols: Vec<String>,
}

impl Alphabet {
    pub fn new(name: impl Into<String>, symbols: Vec<String>) -> Result<Self> {
        let name = name.into();
        if symbols.is_empty() {
            return Err(ProbError::EmptyAlphabet(name));
        }
        for (i, s) in symbols.iter().enumerate() {
            if symbols[..i].contains(s) {
                return Err(ProbError::DuplicateSymbol {
                    name,
                    symbol: s.clone(),
                });
            }
        }
        Ok(Self { name, symbols })
    }

    /// Alphabet `{0, 1, ..., size-1}` with decimal labels.
    pub fn indexed(name: impl Into<String>, size: usize) -> Self {
        assert!(size >= 1, "alphabet size must be positive");
        Self {
            name: name.into(),
            symbols: (0..size).map(|i| i.to_string()).collect(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn index_of(&self, symbol: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s == symbol)
    }

    pub fn renamed(&self, name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            symbols: self.symbols.clone(),
        }
    }
}

/// Reject negative or non-finite weights and totals off by more than
/// [`NORMALIZATION_TOL`].
pub fn validate_weights(probs: &[f64]) -> Result<()> {
    for (index, &value) in probs.iter().enumerate() {
        if !(value.is_finite() && value >= 0.0) {
            return Err(ProbError::BadWeight { index, value });
        }
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > NORMALIZATION_TOL {
        return Err(ProbError::NotNormalized(total));
    }
    Ok(())
}

/// `-Σ p log₂ p` with the convention `0 log 0 = 0`.
pub fn entropy_bits(probs: &[f64]) -> f64 {
    let h: f64 = probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum();
    // rounding can leave -0.0 or a few ulps below zero for point masses
    h.max(0.0)
}

/// A draw from the flat Dirichlet distribution on `n` cells.
pub fn random_probs<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    // -ln(1-u) with u ∈ [0,1) is Exp(1) and never infinite
    let w: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let total: f64 = w.iter().sum();
    if total > 0.0 {
        w.iter().map(|x| x / total).collect()
    } else {
        vec![1.0 / n as f64; n]
    }
}

/// A probability mass function over a single alphabet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PmfJson", into = "PmfJson")]
pub struct Pmf {
    alphabet: Alphabet,
    probs: Vec<f64>,
}

impl Pmf {
    pub fn new(alphabet: Alphabet, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != alphabet.len() {
            return Err(ProbError::ShapeMismatch {
                expected: alphabet.len(),
                got: probs.len(),
            });
        }
        validate_weights(&probs)?;
        Ok(Self { alphabet, probs })
    }

    /// Pmf over the indexed alphabet `{0..probs.len()-1}`.
    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(ProbError::EmptyAlphabet("X".into()));
        }
        Self::new(Alphabet::indexed("X", probs.len()), probs)
    }

    pub fn uniform(alphabet: Alphabet) -> Self {
        let n = alphabet.len();
        Self {
            alphabet,
            probs: vec![1.0 / n as f64; n],
        }
    }

    pub fn point_mass(alphabet: Alphabet, index: usize) -> Self {
        assert!(index < alphabet.len(), "point mass outside alphabet");
        let mut probs = vec![0.0; alphabet.len()];
        probs[index] = 1.0;
        Self { alphabet, probs }
    }

    /// Bernoulli(`p`) over `{0, 1}`.
    pub fn bernoulli(p: f64) -> Result<Self> {
        Self::new(Alphabet::indexed("B", 2), vec![1.0 - p, p])
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn entropy(&self) -> f64 {
        entropy_bits(&self.probs)
    }

    /// The mixture `weight·self + (1-weight)·other` over the same alphabet.
    pub fn mix(&self, weight: f64, other: &Pmf) -> Result<Pmf> {
        if other.len() != self.len() {
            return Err(ProbError::ShapeMismatch {
                expected: self.len(),
                got: other.len(),
            });
        }
        let probs = self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| weight * a + (1.0 - weight) * b)
            .collect();
        Pmf::new(self.alphabet.clone(), probs)
    }
}

/// Wire form of a [`Pmf`]: `{"alphabet": [...], "probs": [...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PmfJson {
    pub alphabet: Vec<String>,
    pub probs: Vec<f64>,
}

impl TryFrom<PmfJson> for Pmf {
    type Error = ProbError;

    fn try_from(value: PmfJson) -> Result<Self> {
        Pmf::new(Alphabet::new("X", value.alphabet)?, value.probs)
    }
}

impl From<Pmf> for PmfJson {
    fn from(p: Pmf) -> Self {
        PmfJson {
            alphabet: p.alphabet.symbols,
            probs: p.probs,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: String,
    pub alphabet: Alphabet,
}

/// Dense joint law over named finite random variables, stored row-major
/// with the last axis varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    axes: Vec<Axis>,
    tensor: Vec<f64>,
}

impl JointDistribution {
    pub fn new(axes: Vec<Axis>, tensor: Vec<f64>) -> Result<Self> {
        for (i, a) in axes.iter().enumerate() {
            if axes[..i].iter().any(|b| b.name == a.name) {
                return Err(ProbError::DuplicateVariable(a.name.clone()));
            }
        }
        let expected: usize = axes.iter().map(|a| a.alphabet.len()).product();
        if tensor.len() != expected {
            return Err(ProbError::ShapeMismatch {
                expected,
                got: tensor.len(),
            });
        }
        validate_weights(&tensor)?;
        Ok(Self { axes, tensor })
    }

    pub fn from_pmf(name: impl Into<String>, pmf: &Pmf) -> Self {
        Self {
            axes: vec![Axis {
                name: name.into(),
                alphabet: pmf.alphabet.clone(),
            }],
            tensor: pmf.probs.clone(),
        }
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn tensor(&self) -> &[f64] {
        &self.tensor
    }

    pub fn names(&self) -> Vec<&str> {
        self.axes.iter().map(|a| a.name.as_str()).collect()
    }

    pub fn axis_index(&self, name: &str) -> Result<usize> {
        self.axes
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| ProbError::UnknownVariable(name.to_string()))
    }

    fn indices(&self, vars: &[&str]) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(vars.len());
        for v in vars {
            let i = self.axis_index(v)?;
            if !out.contains(&i) {
                out.push(i);
            }
        }
        Ok(out)
    }

    /// Probability of one full joint assignment (one symbol index per axis).
    pub fn prob(&self, assignment: &[usize]) -> f64 {
        let mut flat = 0;
        for (axis, &i) in self.axes.iter().zip(assignment) {
            flat = flat * axis.alphabet.len() + i;
        }
        self.tensor[flat]
    }

    /// Marginal weights over the given axes (in the order given), row-major.
    pub fn marginal_weights(&self, axes: &[usize]) -> Vec<f64> {
        let sizes: Vec<usize> = self.axes.iter().map(|a| a.alphabet.len()).collect();
        let out_len: usize = axes.iter().map(|&a| sizes[a]).product();
        // contribution of each source axis digit to the output index
        let mut weight = vec![0usize; sizes.len()];
        let mut stride = 1;
        for &a in axes.iter().rev() {
            weight[a] = stride;
            stride *= sizes[a];
        }
        let mut out = vec![0.0; out_len];
        let mut digits = vec![0usize; sizes.len()];
        let mut target = 0usize;
        for &p in &self.tensor {
            out[target] += p;
            // odometer increment, last axis fastest
            for k in (0..sizes.len()).rev() {
                digits[k] += 1;
                target += weight[k];
                if digits[k] < sizes[k] {
                    break;
                }
                target -= weight[k] * digits[k];
                digits[k] = 0;
            }
        }
        out
    }

    pub fn marginal(&self, vars: &[&str]) -> Result<JointDistribution> {
        if vars.is_empty() {
            return Err(ProbError::EmptyVars);
        }
        let idx = self.indices(vars)?;
        Ok(JointDistribution {
            axes: idx.iter().map(|&i| self.axes[i].clone()).collect(),
            tensor: self.marginal_weights(&idx),
        })
    }

    fn entropy_of_axes(&self, axes: &[usize]) -> f64 {
        if axes.is_empty() {
            return 0.0;
        }
        entropy_bits(&self.marginal_weights(axes))
    }

    /// Joint entropy `H(vars)`.
    pub fn entropy(&self, vars: &[&str]) -> Result<f64> {
        if vars.is_empty() {
            return Err(ProbError::EmptyVars);
        }
        let idx = self.indices(vars)?;
        Ok(self.entropy_of_axes(&idx))
    }

    /// `H(vars | given) = H(vars, given) - H(given)`. Zero-mass conditioning
    /// events contribute nothing.
    pub fn conditional_entropy(&self, vars: &[&str], given: &[&str]) -> Result<f64> {
        if vars.is_empty() {
            return Err(ProbError::EmptyVars);
        }
        check_disjoint(vars, given)?;
        let a = self.indices(vars)?;
        let g = self.indices(given)?;
        let mut both = g.clone();
        both.extend(&a);
        Ok((self.entropy_of_axes(&both) - self.entropy_of_axes(&g)).max(0.0))
    }

    /// `I(a; b | given)`, clamped at zero.
    pub fn mutual_information(&self, a: &[&str], b: &[&str], given: &[&str]) -> Result<f64> {
        if a.is_empty() || b.is_empty() {
            return Err(ProbError::EmptyVars);
        }
        check_disjoint(a, b)?;
        check_disjoint(a, given)?;
        check_disjoint(b, given)?;
        let ia = self.indices(a)?;
        let ib = self.indices(b)?;
        let ig = self.indices(given)?;
        let join = |x: &[usize]| {
            let mut v = ig.clone();
            v.extend_from_slice(x);
            v
        };
        let mut ab = ia.clone();
        ab.extend(&ib);
        let value = self.entropy_of_axes(&join(&ia)) + self.entropy_of_axes(&join(&ib))
            - self.entropy_of_axes(&join(&ab))
            - self.entropy_of_axes(&ig);
        Ok(value.max(0.0))
    }

    /// Joint entropies of every nonempty subset of `order`, indexed by
    /// `mask - 1` where bit `i` of `mask` selects `order[i]`.
    pub fn entropy_vector(&self, order: &[&str]) -> Result<Vec<f64>> {
        let idx: Vec<usize> = order
            .iter()
            .map(|v| self.axis_index(v))
            .collect::<Result<_>>()?;
        let k = idx.len();
        Ok((1usize..(1 << k))
            .map(|mask| {
                let sel: Vec<usize> = (0..k)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| idx[i])
                    .collect();
                self.entropy_of_axes(&sel)
            })
            .collect())
    }
}

fn check_disjoint(a: &[&str], b: &[&str]) -> Result<()> {
    match a.iter().find(|x| b.contains(x)) {
        Some(x) => Err(ProbError::Overlap(x.to_string())),
        None => Ok(()),
    }
}

/// A conditional law `p(outputs | given)`. Rows are indexed row-major by
/// the conditioning tuple; each row is a pmf over the output tuple
/// (row-major, last output fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    outputs: Vec<Axis>,
    given: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl Kernel {
    pub fn joint(outputs: Vec<Axis>, given: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let width: usize = outputs.iter().map(|a| a.alphabet.len()).product();
        for row in &rows {
            if row.len() != width {
                return Err(ProbError::ShapeMismatch {
                    expected: width,
                    got: row.len(),
                });
            }
            validate_weights(row)?;
        }
        Ok(Self {
            outputs,
            given,
            rows,
        })
    }

    pub fn marginal(name: impl Into<String>, pmf: &Pmf) -> Self {
        Self {
            outputs: vec![Axis {
                name: name.into(),
                alphabet: pmf.alphabet.clone(),
            }],
            given: vec![],
            rows: vec![pmf.probs.clone()],
        }
    }

    pub fn conditional(
        name: impl Into<String>,
        alphabet: Alphabet,
        given: &[&str],
        rows: Vec<Vec<f64>>,
    ) -> Result<Self> {
        Self::joint(
            vec![Axis {
                name: name.into(),
                alphabet,
            }],
            given.iter().map(|s| s.to_string()).collect(),
            rows,
        )
    }

    /// Kernel of a deterministic map; `table[r]` is the output index for
    /// conditioning row `r`.
    pub fn deterministic(
        name: impl Into<String>,
        alphabet: Alphabet,
        given: &[&str],
        table: &[usize],
    ) -> Self {
        let rows = table
            .iter()
            .map(|&o| {
                let mut row = vec![0.0; alphabet.len()];
                row[o] = 1.0;
                row
            })
            .collect();
        Self {
            outputs: vec![Axis {
                name: name.into(),
                alphabet,
            }],
            given: given.iter().map(|s| s.to_string()).collect(),
            rows,
        }
    }

    pub fn outputs(&self) -> &[Axis] {
        &self.outputs
    }

    pub fn given(&self) -> &[String] {
        &self.given
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    fn label(&self) -> String {
        let names: Vec<&str> = self.outputs.iter().map(|a| a.name.as_str()).collect();
        format!("p({}|{})", names.join(","), self.given.join(","))
    }
}

/// Multiply kernels in declaration order into a dense joint distribution.
pub fn product_joint(kernels: &[Kernel]) -> Result<JointDistribution> {
    let mut axes: Vec<Axis> = Vec::new();
    let mut tensor = vec![1.0];
    for kernel in kernels {
        let given_idx: Vec<usize> = kernel
            .given
            .iter()
            .map(|g| {
                axes.iter()
                    .position(|a| &a.name == g)
                    .ok_or_else(|| ProbError::DanglingCondition {
                        kernel: kernel.label(),
                        var: g.clone(),
                    })
            })
            .collect::<Result<_>>()?;
        for o in &kernel.outputs {
            if axes.iter().any(|a| a.name == o.name) {
                return Err(ProbError::DuplicateVariable(o.name.clone()));
            }
        }
        let expected_rows: usize = given_idx.iter().map(|&i| axes[i].alphabet.len()).product();
        if kernel.rows.len() != expected_rows {
            return Err(ProbError::ShapeMismatch {
                expected: expected_rows,
                got: kernel.rows.len(),
            });
        }
        let sizes: Vec<usize> = axes.iter().map(|a| a.alphabet.len()).collect();
        let width = kernel.rows.first().map_or(1, Vec::len);
        let mut next = Vec::with_capacity(tensor.len() * width);
        let mut digits = vec![0usize; sizes.len()];
        for &p in &tensor {
            let mut row = 0;
            for &g in &given_idx {
                row = row * sizes[g] + digits[g];
            }
            next.extend(kernel.rows[row].iter().map(|q| p * q));
            for k in (0..sizes.len()).rev() {
                digits[k] += 1;
                if digits[k] < sizes[k] {
                    break;
                }
                digits[k] = 0;
            }
        }
        tensor = next;
        axes.extend(kernel.outputs.iter().cloned());
    }
    JointDistribution::new(axes, tensor)
}

/// Wire form of one kernel inside a factored joint.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelJson {
    pub vars: Vec<AxisJson>,
    #[serde(default)]
    pub given: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AxisJson {
    pub name: String,
    pub alphabet: Vec<String>,
}

/// An ordered list of kernels, e.g. `p(s) p(x1|s) p(x2)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FactoredJoint {
    pub kernels: Vec<KernelJson>,
}

impl FactoredJoint {
    pub fn to_kernels(&self) -> Result<Vec<Kernel>> {
        self.kernels
            .iter()
            .map(|k| {
                let outputs = k
                    .vars
                    .iter()
                    .map(|a| {
                        Ok(Axis {
                            name: a.name.clone(),
                            alphabet: Alphabet::new(a.name.clone(), a.alphabet.clone())?,
                        })
                    })
                    .collect::<Result<_>>()?;
                Kernel::joint(outputs, k.given.clone(), k.rows.clone())
            })
            .collect()
    }

    pub fn to_joint(&self) -> Result<JointDistribution> {
        product_joint(&self.to_kernels()?)
    }

    pub fn from_kernels(kernels: &[Kernel]) -> Self {
        Self {
            kernels: kernels
                .iter()
                .map(|k| KernelJson {
                    vars: k
                        .outputs
                        .iter()
                        .map(|a| AxisJson {
                            name: a.name.clone(),
                            alphabet: a.alphabet.symbols.clone(),
                        })
                        .collect(),
                    given: k.given.clone(),
                    rows: k.rows.clone(),
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bin(name: &str) -> Alphabet {
        Alphabet::indexed(name, 2)
    }

    fn pair(tensor: Vec<f64>) -> JointDistribution {
        JointDistribution::new(
            vec![
                Axis {
                    name: "X".into(),
                    alphabet: bin("X"),
                },
                Axis {
                    name: "Y".into(),
                    alphabet: bin("Y"),
                },
            ],
            tensor,
        )
        .unwrap()
    }

    #[test]
    fn entropy_examples() {
        let u = JointDistribution::from_pmf("X", &Pmf::uniform(bin("X")));
        assert!((u.entropy(&["X"]).unwrap() - 1.0).abs() < 1e-15);
        let d = JointDistribution::from_pmf("X", &Pmf::point_mass(bin("X"), 0));
        assert_eq!(d.entropy(&["X"]).unwrap(), 0.0);
        let p = Pmf::from_probs(vec![0.75, 0.25]).unwrap();
        // -0.75 log2 0.75 - 0.25 log2 0.25 = 0.811278124459132...
        assert!((p.entropy() - 0.811_278_124_459_132_9).abs() < 1e-12);
    }

    #[test]
    fn unknown_variable_is_an_error() {
        let d = pair(vec![0.25; 4]);
        assert_eq!(
            d.entropy(&["Z"]),
            Err(ProbError::UnknownVariable("Z".into()))
        );
        assert_eq!(d.entropy(&[]), Err(ProbError::EmptyVars));
    }

    #[test]
    fn conditional_entropy_examples() {
        let indep = pair(vec![0.25; 4]);
        assert!((indep.conditional_entropy(&["X"], &["Y"]).unwrap() - 1.0).abs() < 1e-15);
        let equal = pair(vec![0.5, 0.0, 0.0, 0.5]);
        assert!(equal.conditional_entropy(&["X"], &["Y"]).unwrap().abs() < 1e-15);
        assert_eq!(
            equal.conditional_entropy(&["X"], &["X"]),
            Err(ProbError::Overlap("X".into()))
        );
    }

    #[test]
    fn mutual_information_examples() {
        let indep = pair(vec![0.25; 4]);
        assert!(indep.mutual_information(&["X"], &["Y"], &[]).unwrap().abs() < 1e-15);
        let equal = pair(vec![0.5, 0.0, 0.0, 0.5]);
        assert!((equal.mutual_information(&["X"], &["Y"], &[]).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(
            equal.mutual_information(&["X"], &["Y"], &["Y"]),
            Err(ProbError::Overlap(_))
        ));
    }

    #[test]
    fn normalization_is_enforced_not_repaired() {
        assert!(matches!(
            Pmf::from_probs(vec![0.5, 0.4]),
            Err(ProbError::NotNormalized(_))
        ));
        assert!(matches!(
            Pmf::from_probs(vec![1.5, -0.5]),
            Err(ProbError::BadWeight { .. })
        ));
        assert!(Alphabet::new("A", vec!["a".into(), "a".into()]).is_err());
        assert!(Alphabet::new("A", vec![]).is_err());
    }

    #[test]
    fn product_joint_examples() {
        let half = Pmf::uniform(bin("S"));
        let single = product_joint(&[Kernel::marginal("S", &half)]).unwrap();
        assert_eq!(single.tensor(), half.probs());

        let two =
            product_joint(&[Kernel::marginal("A", &half), Kernel::marginal("B", &half)]).unwrap();
        assert_eq!(two.tensor(), &[0.25; 4]);

        // p(x1 | s=0) uniform, p(x1 | s=1) = point mass at 0
        let forced = product_joint(&[
            Kernel::marginal("S", &half),
            Kernel::conditional(
                "X1",
                bin("X1"),
                &["S"],
                vec![vec![0.5, 0.5], vec![1.0, 0.0]],
            )
            .unwrap(),
        ])
        .unwrap();
        assert_eq!(forced.prob(&[1, 1]), 0.0);
        assert_eq!(forced.prob(&[1, 0]), 0.5);
    }

    #[test]
    fn dangling_condition_is_rejected() {
        let k = Kernel::conditional("X", bin("X"), &["S"], vec![vec![1.0, 0.0]; 2]).unwrap();
        assert!(matches!(
            product_joint(&[k]),
            Err(ProbError::DanglingCondition { .. })
        ));
    }

    #[test]
    fn pmf_json_schema() {
        let p: Pmf = serde_json::from_str(r#"{"alphabet":["a","b"],"probs":[0.25,0.75]}"#).unwrap();
        assert_eq!(p.probs(), &[0.25, 0.75]);
        let back = serde_json::to_string(&p).unwrap();
        assert_eq!(back, r#"{"alphabet":["a","b"],"probs":[0.25,0.75]}"#);
        assert!(serde_json::from_str::<Pmf>(r#"{"alphabet":["a"],"probs":[0.9]}"#).is_err());
    }

    #[test]
    fn factored_joint_json() {
        let text = r#"{"kernels":[
            {"vars":[{"name":"S","alphabet":["0","1"]}],"rows":[[0.5,0.5]]},
            {"vars":[{"name":"X","alphabet":["0","1"]}],"given":["S"],"rows":[[0.5,0.5],[1.0,0.0]]}
        ]}"#;
        let fj: FactoredJoint = serde_json::from_str(text).unwrap();
        let joint = fj.to_joint().unwrap();
        assert_eq!(joint.names(), vec!["S", "X"]);
        assert_eq!(joint.tensor(), &[0.25, 0.25, 0.5, 0.0]);
        let again = FactoredJoint::from_kernels(&fj.to_kernels().unwrap());
        assert_eq!(again.to_joint().unwrap(), joint);
    }

    #[test]
    fn entropy_vector_ordering() {
        let equal = pair(vec![0.5, 0.0, 0.0, 0.5]);
        let v = equal.entropy_vector(&["X", "Y"]).unwrap();
        // masks 1 = {X}, 2 = {Y}, 3 = {X,Y}
        assert_eq!(v.len(), 3);
        for h in v {
            assert!((h - 1.0).abs() < 1e-15);
        }
    }
}
