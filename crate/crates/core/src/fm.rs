//! Fourier-Motzkin elimination over small linear inequality systems with
//! integer coefficients and real right-hand sides.
//!
//! Rows are stored as `Σ c_k x_k ≤ rhs`; `≥` rows are negated on input. An
//! empty projection is represented by the single marker row `0 ≤ -1`.

use std::fmt;

use thiserror::Error;

use crate::lp::{LinearProgram, LpSolution, Relation};
use crate::regions::{BoundTerms, Inequality, RatePolytope, RegionError};

/// Largest coefficient magnitude accepted in input rows.
pub const MAX_INPUT_COEFF: i64 = 16;
/// Slack used when deciding infeasibility and redundancy.
pub const FM_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FmError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("row has {got} coefficients, system has {expected} variables")]
    Shape { expected: usize, got: usize },
    #[error("coefficient {0} exceeds the input bound of {MAX_INPUT_COEFF}")]
    CoefficientTooLarge(i64),
    #[error("right-hand side {0} is not finite")]
    NonFinite(f64),
    #[error("coefficient overflow during elimination")]
    Overflow,
    #[error(transparent)]
    Region(#[from] RegionError),
}

pub type Result<T> = std::result::Result<T, FmError>;

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub coeffs: Vec<i64>,
    pub rhs: f64,
}

impl Row {
    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Divide by the gcd of the coefficients (a positive scaling).
    fn normalized(mut self) -> Self {
        let g = self.coeffs.iter().fold(0i64, |g, &c| gcd(g, c.abs()));
        if g > 1 {
            self.coeffs.iter_mut().for_each(|c| *c /= g);
            self.rhs /= g as f64;
        }
        self
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearInequalitySystem {
    vars: Vec<String>,
    rows: Vec<Row>,
}

/// Output of [`LinearInequalitySystem::remove_redundant`].
#[derive(Debug, Clone, PartialEq)]
pub struct Reduced {
    pub system: LinearInequalitySystem,
    /// False when the LP check failed and only duplicate/dominance pruning
    /// was applied.
    pub exhaustive: bool,
}

impl LinearInequalitySystem {
    pub fn new(vars: Vec<String>) -> Result<Self> {
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].contains(v) {
                return Err(FmError::DuplicateVariable(v.clone()));
            }
        }
        Ok(Self {
            vars,
            rows: Vec::new(),
        })
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    fn check_row(&self, coeffs: &[i64], rhs: f64) -> Result<()> {
        if coeffs.len() != self.vars.len() {
            return Err(FmError::Shape {
                expected: self.vars.len(),
                got: coeffs.len(),
            });
        }
        if let Some(&c) = coeffs.iter().find(|c| c.abs() > MAX_INPUT_COEFF) {
            return Err(FmError::CoefficientTooLarge(c));
        }
        if !rhs.is_finite() {
            return Err(FmError::NonFinite(rhs));
        }
        Ok(())
    }

    /// Add `coeffs · x ≤ rhs`.
    pub fn add_le(&mut self, coeffs: Vec<i64>, rhs: f64) -> Result<()> {
        self.check_row(&coeffs, rhs)?;
        self.rows.push(Row { coeffs, rhs });
        Ok(())
    }

    /// Add `coeffs · x ≥ rhs`.
    pub fn add_ge(&mut self, coeffs: Vec<i64>, rhs: f64) -> Result<()> {
        self.check_row(&coeffs, rhs)?;
        self.rows.push(Row {
            coeffs: coeffs.into_iter().map(|c| -c).collect(),
            rhs: -rhs,
        });
        Ok(())
    }

    /// Add `x_k ≥ 0` for each named variable.
    pub fn add_nonnegative(&mut self, names: &[&str]) -> Result<()> {
        for name in names {
            let k = self.var_index(name)?;
            let mut c = vec![0; self.vars.len()];
            c[k] = -1;
            self.rows.push(Row {
                coeffs: c,
                rhs: 0.0,
            });
        }
        Ok(())
    }

    fn var_index(&self, name: &str) -> Result<usize> {
        self.vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| FmError::UnknownVariable(name.to_string()))
    }

    fn infeasible(vars: Vec<String>) -> Self {
        let n = vars.len();
        Self {
            vars,
            rows: vec![Row {
                coeffs: vec![0; n],
                rhs: -1.0,
            }],
        }
    }

    /// Whether this system is the empty-projection marker `0 ≤ -1`.
    pub fn is_infeasible_marker(&self) -> bool {
        self.rows.len() == 1 && self.rows[0].is_zero() && self.rows[0].rhs < 0.0
    }

    /// Project onto the variables not in `names`, eliminating in the given
    /// order.
    pub fn eliminate(&self, names: &[&str]) -> Result<Self> {
        let mut sys = self.clone();
        for name in names {
            let k = sys.var_index(name)?;
            sys = sys.eliminate_one(k)?;
            if sys.is_infeasible_marker() {
                let vars = sys.vars.clone();
                return Ok(Self::infeasible(vars));
            }
        }
        Ok(sys)
    }

    fn eliminate_one(&self, k: usize) -> Result<Self> {
        let (mut pos, mut neg, mut out) = (Vec::new(), Vec::new(), Vec::new());
        for row in &self.rows {
            match row.coeffs[k].signum() {
                1 => pos.push(row),
                -1 => neg.push(row),
                _ => out.push(row.clone()),
            }
        }
        for p in &pos {
            for n in &neg {
                let (a, b) = (p.coeffs[k], -n.coeffs[k]);
                let coeffs = p
                    .coeffs
                    .iter()
                    .zip(&n.coeffs)
                    .map(|(&x, &y)| {
                        b.checked_mul(x)
                            .zip(a.checked_mul(y))
                            .and_then(|(u, v)| u.checked_add(v))
                            .ok_or(FmError::Overflow)
                    })
                    .collect::<Result<Vec<i64>>>()?;
                out.push(
                    Row {
                        coeffs,
                        rhs: b as f64 * p.rhs + a as f64 * n.rhs,
                    }
                    .normalized(),
                );
            }
        }
        let mut vars = self.vars.clone();
        vars.remove(k);
        let mut rows = Vec::with_capacity(out.len());
        for mut row in out {
            row.coeffs.remove(k);
            if row.is_zero() {
                if row.rhs < -FM_TOL {
                    return Ok(Self::infeasible(vars));
                }
                continue;
            }
            rows.push(row.normalized());
        }
        Ok(Self {
            vars,
            rows: dedup(rows),
        })
    }

    /// Remove rows that do not change the feasible set: duplicates up to
    /// positive scaling, rows dominated coefficient-wise by another row over
    /// nonnegative variables, and rows whose maximum over the remaining rows
    /// does not exceed their rhs (checked by LP, one row at a time).
    pub fn remove_redundant(&self) -> Reduced {
        self.remove_redundant_with(FM_TOL)
    }

    /// [`Self::remove_redundant`] with an explicit LP slack.
    pub fn remove_redundant_with(&self, tol: f64) -> Reduced {
        if self.is_infeasible_marker() {
            return Reduced {
                system: self.clone(),
                exhaustive: true,
            };
        }
        let mut rows = dedup(
            self.rows
                .iter()
                .filter(|r| !(r.is_zero() && r.rhs >= -tol))
                .cloned()
                .map(Row::normalized)
                .collect(),
        );
        let nonneg: Vec<bool> = (0..self.vars.len())
            .map(|k| {
                rows.iter().any(|r| {
                    r.rhs <= 0.0
                        && r.coeffs[k] < 0
                        && r.coeffs.iter().enumerate().all(|(j, &c)| j == k || c == 0)
                })
            })
            .collect();
        // dominance: s·x ≤ c implies a·x ≤ b when a ≤ s on nonnegative
        // coordinates (equal elsewhere) and c ≤ b
        let dominated = |a: &Row, s: &Row| {
            a != s
                && s.rhs <= a.rhs
                && a.coeffs
                    .iter()
                    .zip(&s.coeffs)
                    .enumerate()
                    .all(|(k, (&x, &y))| x == y || (x < y && nonneg[k]))
        };
        let mut keep = vec![true; rows.len()];
        for i in 0..rows.len() {
            for j in 0..rows.len() {
                if i != j && keep[j] && dominated(&rows[i], &rows[j]) {
                    keep[i] = false;
                    break;
                }
            }
        }
        rows = rows
            .into_iter()
            .zip(&keep)
            .filter_map(|(r, &k)| k.then_some(r))
            .collect();
        let mut exhaustive = true;
        let mut i = 0;
        while i < rows.len() {
            match max_over_others(&rows, i) {
                Ok(Some(max)) if max <= rows[i].rhs + tol => {
                    rows.remove(i);
                    continue;
                }
                Ok(_) => {}
                Err(()) => exhaustive = false,
            }
            i += 1;
        }
        Reduced {
            system: Self {
                vars: self.vars.clone(),
                rows,
            },
            exhaustive,
        }
    }

    /// The system as a rate polytope over its variables; nonnegativity rows
    /// are re-added by the polytope itself.
    pub fn to_polytope(&self) -> Result<RatePolytope> {
        let rows = self
            .rows
            .iter()
            .filter(|r| !r.is_zero())
            .map(|r| {
                let c = r
                    .coeffs
                    .iter()
                    .map(|&c| i32::try_from(c).map_err(|_| FmError::Overflow))
                    .collect::<Result<Vec<i32>>>()?;
                Ok(Inequality::new(c, r.rhs))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(RatePolytope::new(self.vars.clone(), rows)?)
    }

    /// Whether `point` (one value per variable) satisfies every row within
    /// `tol`.
    pub fn satisfied_by(&self, point: &[f64], tol: f64) -> bool {
        self.rows.iter().all(|r| {
            let s: f64 = r
                .coeffs
                .iter()
                .zip(point)
                .map(|(&c, &x)| c as f64 * x)
                .sum();
            s <= r.rhs + tol
        })
    }

    /// Parse the text format: one inequality per line, `#` comments, and an
    /// optional leading `vars a b c` line fixing the variable order
    /// (otherwise variables are ordered by first appearance).
    pub fn parse(text: &str) -> Result<Self> {
        let mut vars: Vec<String> = Vec::new();
        let mut parsed: Vec<(usize, Vec<(String, i64)>, bool, f64)> = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| FmError::Parse { line: n + 1, msg };
            if let Some(rest) = line.strip_prefix("vars") {
                if rest.starts_with(char::is_whitespace) || rest.is_empty() {
                    for v in rest.split(|c: char| c.is_whitespace() || c == ',') {
                        if v.is_empty() {
                            continue;
                        }
                        if !is_ident(v) {
                            return Err(err(format!("bad variable name `{v}`")));
                        }
                        if vars.iter().any(|x| x == v) {
                            return Err(FmError::DuplicateVariable(v.to_string()));
                        }
                        vars.push(v.to_string());
                    }
                    continue;
                }
            }
            let (lhs, rhs, le) = if let Some((l, r)) = line.split_once("<=") {
                (l, r, true)
            } else if let Some((l, r)) = line.split_once(">=") {
                (l, r, false)
            } else {
                return Err(err("expected `<=` or `>=`".into()));
            };
            let rhs: f64 = rhs
                .trim()
                .parse()
                .map_err(|_| err(format!("bad right-hand side `{}`", rhs.trim())))?;
            let terms = parse_terms(lhs).map_err(err)?;
            for (v, _) in &terms {
                if !vars.contains(v) {
                    vars.push(v.clone());
                }
            }
            parsed.push((n + 1, terms, le, rhs));
        }
        let mut sys = Self::new(vars)?;
        for (_, terms, le, rhs) in parsed {
            let mut coeffs = vec![0i64; sys.vars.len()];
            for (v, c) in terms {
                let k = sys.var_index(&v)?;
                coeffs[k] += c;
            }
            if coeffs.iter().all(|&c| c == 0) {
                // only the infeasibility marker is meaningful here
                let violated = if le { rhs < 0.0 } else { rhs > 0.0 };
                if violated {
                    return Ok(Self::infeasible(sys.vars));
                }
                continue;
            }
            if le {
                sys.add_le(coeffs, rhs)?;
            } else {
                sys.add_ge(coeffs, rhs)?;
            }
        }
        Ok(sys)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("vars {}\n", self.vars.join(" "));
        for r in &self.rows {
            out.push_str(&format_row(&self.vars, r));
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for LinearInequalitySystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn format_row(vars: &[String], r: &Row) -> String {
    let mut lhs = String::new();
    for (v, &c) in vars.iter().zip(&r.coeffs) {
        if c == 0 {
            continue;
        }
        if lhs.is_empty() {
            lhs = format!("{c}*{v}");
        } else if c < 0 {
            lhs.push_str(&format!(" - {}*{v}", -c));
        } else {
            lhs.push_str(&format!(" + {c}*{v}"));
        }
    }
    if lhs.is_empty() {
        lhs.push('0');
    }
    format!("{lhs} <= {}", r.rhs)
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Parse `2*R1 - R1p + 3*R2c` (also `0`) into `(variable, coefficient)`.
fn parse_terms(lhs: &str) -> std::result::Result<Vec<(String, i64)>, String> {
    let compact: String = lhs.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err("empty left-hand side".into());
    }
    if compact == "0" {
        return Ok(vec![]);
    }
    let mut terms = Vec::new();
    let mut start = 0;
    let bytes = compact.as_bytes();
    for i in 1..=bytes.len() {
        if i == bytes.len() || bytes[i] == b'+' || bytes[i] == b'-' {
            terms.push(&compact[start..i]);
            start = i;
        }
    }
    let mut out = Vec::new();
    for t in terms {
        let (sign, body) = match t.as_bytes()[0] {
            b'+' => (1, &t[1..]),
            b'-' => (-1, &t[1..]),
            _ => (1, t),
        };
        let (coeff, var) = match body.split_once('*') {
            Some((c, v)) => (
                c.parse::<i64>()
                    .map_err(|_| format!("bad coefficient `{c}`"))?,
                v,
            ),
            None => {
                let split = body
                    .find(|c: char| !c.is_ascii_digit())
                    .unwrap_or(body.len());
                let c = if split == 0 {
                    1
                } else {
                    body[..split]
                        .parse::<i64>()
                        .map_err(|_| format!("bad coefficient in `{body}`"))?
                };
                (c, &body[split..])
            }
        };
        if !is_ident(var) {
            return Err(format!("bad term `{t}`"));
        }
        out.push((var.to_string(), sign * coeff));
    }
    Ok(out)
}

/// Exact-coefficient duplicates collapse to the tightest rhs; first
/// occurrence order is kept.
fn dedup(rows: Vec<Row>) -> Vec<Row> {
    let mut out: Vec<Row> = Vec::with_capacity(rows.len());
    for r in rows {
        match out.iter_mut().find(|o| o.coeffs == r.coeffs) {
            Some(o) => o.rhs = o.rhs.min(r.rhs),
            None => out.push(r),
        }
    }
    out
}

/// `max rows[i] · x` over the other rows, with free variables split into
/// positive and negative parts. `Ok(None)` when unbounded, `Err` on solver
/// failure or an infeasible remainder.
fn max_over_others(rows: &[Row], i: usize) -> std::result::Result<Option<f64>, ()> {
    let n = rows[i].coeffs.len();
    let split = |c: &[i64]| -> Vec<f64> {
        c.iter()
            .map(|&x| x as f64)
            .chain(c.iter().map(|&x| -(x as f64)))
            .collect()
    };
    let mut lp = LinearProgram::maximize(split(&rows[i].coeffs));
    for (j, r) in rows.iter().enumerate() {
        if j != i {
            lp.add(split(&r.coeffs), Relation::Le, r.rhs)
                .map_err(|_| ())?;
        }
    }
    debug_assert_eq!(lp.num_vars(), 2 * n);
    match lp.solve() {
        Ok(LpSolution::Optimal { value, .. }) => Ok(Some(value)),
        Ok(LpSolution::Unbounded { .. }) => Ok(None),
        _ => Err(()),
    }
}

/// Variables of the rate-splitting system: message rates, then the split
/// rates to be eliminated.
pub const HK_VARS: [&str; 6] = ["R1", "R2", "R1c", "R1p", "R2c", "R2p"];
pub const HK_SPLIT_VARS: [&str; 4] = ["R1c", "R1p", "R2c", "R2p"];

/// The ten random-coding conditions of the multicoding scheme for the
/// interference channel, plus nonnegativity of all six rates.
pub fn hk_conditions(t: &BoundTerms) -> LinearInequalitySystem {
    let mut s = LinearInequalitySystem::new(HK_VARS.iter().map(|s| s.to_string()).collect())
        .expect("distinct names");
    //            R1 R2 R1c R1p R2c R2p
    let rows: [([i64; 6], f64); 10] = [
        ([0, 0, -1, -1, 0, 0], -t.a),
        ([0, 0, 0, 0, -1, -1], -t.b),
        ([1, 0, 0, 1, 0, 0], t.c),
        ([1, 0, 0, 1, 1, 0], t.d),
        ([1, 0, 1, 1, 0, 0], t.e),
        ([1, 0, 1, 1, 1, 0], t.f),
        ([0, 1, 0, 0, 0, 1], t.g),
        ([0, 1, 1, 0, 0, 1], t.h),
        ([0, 1, 0, 0, 1, 1], t.i),
        ([0, 1, 1, 0, 1, 1], t.j),
    ];
    for (c, rhs) in rows {
        s.add_le(c.to_vec(), rhs).expect("well-formed row");
    }
    s.add_nonnegative(&HK_VARS).expect("known names");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(text: &str) -> LinearInequalitySystem {
        LinearInequalitySystem::parse(text).unwrap()
    }

    #[test]
    fn eliminate_simple() {
        let s = sys("x + y <= 1\n-y <= 0");
        let p = s.eliminate(&["y"]).unwrap();
        assert_eq!(p.vars(), &["x".to_string()]);
        assert_eq!(
            p.rows(),
            &[Row {
                coeffs: vec![1],
                rhs: 1.0
            }]
        );
    }

    #[test]
    fn eliminate_to_infeasible() {
        let s = sys("vars x y\ny >= 2\ny <= 1");
        let p = s.eliminate(&["y"]).unwrap();
        assert!(p.is_infeasible_marker());
        assert_eq!(p.to_text(), "vars x\n0 <= -1\n");
    }

    #[test]
    fn remove_redundant_examples() {
        let r = sys("x <= 1\nx <= 2").remove_redundant();
        assert_eq!(r.system.rows().len(), 1);
        assert!(r.exhaustive);
        let r = sys("x <= 1\n2*x <= 2").remove_redundant();
        assert_eq!(
            r.system.rows(),
            &[Row {
                coeffs: vec![1],
                rhs: 1.0
            }]
        );
        // weakly redundant sum bound
        let r = sys("x <= 1\ny <= 1\nx + y <= 2\n-x <= 0\n-y <= 0").remove_redundant();
        assert_eq!(r.system.rows().len(), 4);
    }

    #[test]
    fn dominated_rows_need_nonnegativity() {
        // with x, y ≥ 0, x ≤ 1 is implied by x + y ≤ 1
        let r = sys("x + y <= 1\nx <= 1\n-x <= 0\n-y <= 0").remove_redundant();
        assert_eq!(r.system.rows().len(), 3);
        // without y ≥ 0 it is not
        let r = sys("x + y <= 1\nx <= 1\n-x <= 0").remove_redundant();
        assert_eq!(r.system.rows().len(), 3);
    }

    #[test]
    fn text_round_trip() {
        let s = sys("# split rates\n2*R1 - R1p + 3*R2c <= 0.125\nR1 >= -1e-3\n");
        let again = LinearInequalitySystem::parse(&s.to_text()).unwrap();
        assert_eq!(s, again);
        assert_eq!(s.vars(), &["R1", "R1p", "R2c"]);
        assert_eq!(
            s.rows()[1],
            Row {
                coeffs: vec![-1, 0, 0],
                rhs: 1e-3
            }
        );
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            LinearInequalitySystem::parse("x + y < 1"),
            Err(FmError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            LinearInequalitySystem::parse("\n17*x <= 1"),
            Err(FmError::CoefficientTooLarge(17))
        ));
        assert!(LinearInequalitySystem::parse("x <= abc").is_err());
        assert!(LinearInequalitySystem::parse("2*3x <= 1").is_err());
    }

    #[test]
    fn combined_rows_are_gcd_normalized() {
        let s = sys("vars x y\n2*x + 2*y <= 4\n-2*y <= 0");
        let p = s.eliminate(&["y"]).unwrap();
        assert_eq!(
            p.rows(),
            &[Row {
                coeffs: vec![1],
                rhs: 2.0
            }]
        );
    }

    #[test]
    fn hk_conditions_project_to_the_seven_row_region() {
        use crate::channels::GeneralDmic;
        use crate::geometry::polytope_vertices;
        use crate::prob::random_probs;
        use crate::regions::{eval_bound_terms, eval_hk, HkSlice};
        use rand::SeedableRng;

        let mut rng = rand_pcg::Pcg64::seed_from_u64(7);
        for _ in 0..20 {
            let ch = GeneralDmic::random(&mut rng, 2, 2, 2, 2);
            let s = HkSlice::new(
                &ch,
                2,
                2,
                random_probs(&mut rng, 4),
                random_probs(&mut rng, 4),
            )
            .unwrap();
            let terms = eval_bound_terms(&s).unwrap();
            let projected = hk_conditions(&terms).eliminate(&HK_SPLIT_VARS).unwrap();
            let reduced = projected.remove_redundant();
            assert!(reduced.exhaustive);
            let a = polytope_vertices(&reduced.system.to_polytope().unwrap()).unwrap();
            let b = polytope_vertices(&eval_hk(&s).unwrap()).unwrap();
            assert_eq!(a.len(), b.len(), "{a:?} vs {b:?}");
            for (p, q) in a.iter().zip(&b) {
                assert!(
                    p.iter().zip(q).all(|(x, y)| (x - y).abs() < 1e-9),
                    "{a:?} vs {b:?}"
                );
            }
        }
    }
}
