//! Rate-region formulas evaluated on a single input-distribution slice.
//!
//! Every evaluator returns a [`RatePolytope`] of closed `≤` constraints with
//! rate nonnegativity appended. Time sharing is not a slice parameter; it is
//! realized later as convex closure over many slices.

use serde::Serialize;
use thiserror::Error;

use crate::channels::{
    ChannelError, CribbingZic, DeterministicSdzic, GeneralDmic, InjectiveInterference,
    StateCribbingZic,
};
use crate::prob::{
    entropy_bits, product_joint, validate_weights, Axis, JointDistribution, Kernel, Pmf, ProbError,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegionError {
    #[error(transparent)]
    Prob(#[from] ProbError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error("{what}: expected {expected}, got {got}")]
    Shape {
        what: String,
        expected: usize,
        got: usize,
    },
    #[error("auxiliary alphabet has {got} symbols, cap is {cap}")]
    AuxiliaryCap { got: usize, cap: usize },
    #[error("inequality has all-zero coefficients")]
    ZeroRow,
    #[error("inequality right-hand side {0} is not finite")]
    NonFiniteRhs(f64),
    #[error("invalid parameter: {0}")]
    Parameter(String),
}

pub type Result<T> = std::result::Result<T, RegionError>;

/// `Σ coeffs[k]·R_k ≤ rhs`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Inequality {
    pub coeffs: Vec<i32>,
    pub rhs: f64,
}

impl Inequality {
    pub fn new(coeffs: Vec<i32>, rhs: f64) -> Self {
        Self { coeffs, rhs }
    }

    pub fn lhs(&self, point: &[f64]) -> f64 {
        self.coeffs
            .iter()
            .zip(point)
            .map(|(&c, &x)| c as f64 * x)
            .sum()
    }
}

/// Intersection of half-spaces in rate coordinates. The last `dim()` rows are
/// always the nonnegativity constraints `-R_k ≤ 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatePolytope {
    rates: Vec<String>,
    inequalities: Vec<Inequality>,
}

impl RatePolytope {
    pub fn new(rates: Vec<String>, bounds: Vec<Inequality>) -> Result<Self> {
        let dim = rates.len();
        let mut inequalities = Vec::with_capacity(bounds.len() + dim);
        for row in bounds {
            if row.coeffs.len() != dim {
                return Err(RegionError::Shape {
                    what: "inequality coefficients".into(),
                    expected: dim,
                    got: row.coeffs.len(),
                });
            }
            if row.coeffs.iter().all(|&c| c == 0) {
                return Err(RegionError::ZeroRow);
            }
            if !row.rhs.is_finite() {
                return Err(RegionError::NonFiniteRhs(row.rhs));
            }
            inequalities.push(row);
        }
        for k in 0..dim {
            let mut coeffs = vec![0; dim];
            coeffs[k] = -1;
            inequalities.push(Inequality::new(coeffs, 0.0));
        }
        Ok(Self {
            rates,
            inequalities,
        })
    }

    pub(crate) fn two_user(bounds: &[([i32; 2], f64)]) -> Self {
        Self::new(
            vec!["R1".into(), "R2".into()],
            bounds
                .iter()
                .map(|(c, r)| Inequality::new(c.to_vec(), *r))
                .collect(),
        )
        .expect("evaluator rows are well formed")
    }

    pub fn rates(&self) -> &[String] {
        &self.rates
    }

    pub fn dim(&self) -> usize {
        self.rates.len()
    }

    /// All rows including nonnegativity.
    pub fn inequalities(&self) -> &[Inequality] {
        &self.inequalities
    }

    /// Rows produced by the region formula, without nonnegativity.
    pub fn bounds(&self) -> &[Inequality] {
        &self.inequalities[..self.inequalities.len() - self.dim()]
    }

    /// Tightest rhs among rows with exactly these coefficients.
    pub fn rhs_of(&self, coeffs: &[i32]) -> Option<f64> {
        self.inequalities
            .iter()
            .filter(|r| r.coeffs == coeffs)
            .map(|r| r.rhs)
            .reduce(f64::min)
    }

    pub fn contains(&self, point: &[f64], tol: f64) -> bool {
        point.len() == self.dim()
            && self
                .inequalities
                .iter()
                .all(|r| r.lhs(point) <= r.rhs + tol)
    }
}

fn check_pmf(what: &str, probs: &[f64], len: usize) -> Result<()> {
    if probs.len() != len {
        return Err(RegionError::Shape {
            what: what.to_string(),
            expected: len,
            got: probs.len(),
        });
    }
    validate_weights(probs)?;
    Ok(())
}

fn check_rows(what: &str, rows: &[Vec<f64>], count: usize, len: usize) -> Result<()> {
    if rows.len() != count {
        return Err(RegionError::Shape {
            what: format!("{what} rows"),
            expected: count,
            got: rows.len(),
        });
    }
    rows.iter().try_for_each(|r| check_pmf(what, r, len))
}

fn axis(name: &str, size: usize) -> Axis {
    Axis {
        name: name.to_string(),
        alphabet: crate::prob::Alphabet::indexed(name, size),
    }
}

// ---------------------------------------------------------------------------
// Han-Kobayashi region on a general DM-IC

/// One time-sharing slice of the Han-Kobayashi region:
/// `p(u1,x1)·p(u2,x2)·p(y1,y2|x1,x2)`, with joint pmfs flattened `u`-major.
#[derive(Debug, Clone)]
pub struct HkSlice<'a> {
    pub channel: &'a GeneralDmic,
    pub u1_size: usize,
    pub u2_size: usize,
    pub p_u1x1: Vec<f64>,
    pub p_u2x2: Vec<f64>,
}

impl<'a> HkSlice<'a> {
    pub fn new(
        channel: &'a GeneralDmic,
        u1_size: usize,
        u2_size: usize,
        p_u1x1: Vec<f64>,
        p_u2x2: Vec<f64>,
    ) -> Result<Self> {
        check_pmf("p(u1,x1)", &p_u1x1, u1_size * channel.x1.len())?;
        check_pmf("p(u2,x2)", &p_u2x2, u2_size * channel.x2.len())?;
        Ok(Self {
            channel,
            u1_size,
            u2_size,
            p_u1x1,
            p_u2x2,
        })
    }

    /// Joint law over `(U1, X1, U2, X2, Y1, Y2)`.
    pub fn joint(&self) -> Result<JointDistribution> {
        let c = self.channel;
        let pair = |u: &str, x: &str, nu: usize, nx: usize, p: &[f64]| {
            Kernel::joint(vec![axis(u, nu), axis(x, nx)], vec![], vec![p.to_vec()])
        };
        Ok(product_joint(&[
            pair("U1", "X1", self.u1_size, c.x1.len(), &self.p_u1x1)?,
            pair("U2", "X2", self.u2_size, c.x2.len(), &self.p_u2x2)?,
            c.kernel(),
        ])?)
    }
}

/// Right-hand sides of the ten random-coding conditions of the multicoding
/// scheme, with vanishing slack terms dropped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundTerms {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
    pub g: f64,
    pub h: f64,
    pub i: f64,
    pub j: f64,
}

impl BoundTerms {
    /// Right-hand sides of the seven-row region left after eliminating the
    /// split rates, in the row order of [`HK_COEFFS`].
    pub fn region_rhs(&self) -> [f64; 7] {
        let BoundTerms {
            a,
            b,
            c,
            d,
            e,
            f,
            g,
            h,
            i,
            j,
        } = *self;
        [
            e - a,
            i - b,
            c + j - a - b,
            d + h - a - b,
            f + g - a - b,
            c + h + f - 2.0 * a - b,
            d + g + j - a - 2.0 * b,
        ]
    }

    /// The pairwise relations `lhs ≤ rhs` among the terms, as
    /// `(label, lhs, rhs)`.
    pub fn relations(&self) -> Vec<(&'static str, f64, f64)> {
        let t = *self;
        vec![
            ("e-a <= c", t.e - t.a, t.c),
            ("e-a <= d", t.e - t.a, t.d),
            ("f-a <= d", t.f - t.a, t.d),
            ("d <= f", t.d, t.f),
            ("c <= e", t.c, t.e),
            ("e <= f", t.e, t.f),
            ("i-b <= g", t.i - t.b, t.g),
            ("i-b <= h", t.i - t.b, t.h),
            ("j-b <= h", t.j - t.b, t.h),
            ("h <= j", t.h, t.j),
            ("g <= i", t.g, t.i),
            ("i <= j", t.i, t.j),
        ]
    }

    /// Smallest `rhs - lhs` over [`BoundTerms::relations`].
    pub fn min_relation_slack(&self) -> f64 {
        self.relations()
            .iter()
            .map(|(_, l, r)| r - l)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Coefficients `(R1, R2)` of the seven Han-Kobayashi rows.
pub const HK_COEFFS: [[i32; 2]; 7] = [[1, 0], [0, 1], [1, 1], [1, 1], [1, 1], [2, 1], [1, 2]];

pub fn eval_bound_terms(slice: &HkSlice) -> Result<BoundTerms> {
    let p = slice.joint()?;
    let mi = |a: &[&str], b: &[&str]| p.mutual_information(a, b, &[]);
    let a = mi(&["U1"], &["X1"])?;
    let b = mi(&["U2"], &["X2"])?;
    Ok(BoundTerms {
        a,
        b,
        c: mi(&["X1"], &["U1", "U2", "Y1"])?,
        d: mi(&["X1", "U2"], &["U1", "Y1"])?,
        e: a + mi(&["U1", "X1"], &["U2", "Y1"])?,
        f: a + mi(&["U2"], &["Y1"])? + mi(&["U1", "X1"], &["U2", "Y1"])?,
        g: mi(&["X2"], &["U2", "U1", "Y2"])?,
        h: mi(&["X2", "U1"], &["U2", "Y2"])?,
        i: b + mi(&["U2", "X2"], &["U1", "Y2"])?,
        j: b + mi(&["U1"], &["Y2"])? + mi(&["U2", "X2"], &["U1", "Y2"])?,
    })
}

/// Han-Kobayashi region of one slice, each bound written directly as
/// conditional mutual informations of the induced joint.
pub fn eval_hk(slice: &HkSlice) -> Result<RatePolytope> {
    let p = slice.joint()?;
    let mi = |a: &[&str], b: &[&str], c: &[&str]| p.mutual_information(a, b, c);
    let y1_given_u1u2 = mi(&["X1"], &["Y1"], &["U1", "U2"])?;
    let y2_given_u1u2 = mi(&["X2"], &["Y2"], &["U1", "U2"])?;
    let x1u2_y1 = mi(&["X1", "U2"], &["Y1"], &[])?;
    let x2u1_y2 = mi(&["X2", "U1"], &["Y2"], &[])?;
    let x1u2_y1_u1 = mi(&["X1", "U2"], &["Y1"], &["U1"])?;
    let x2u1_y2_u2 = mi(&["X2", "U1"], &["Y2"], &["U2"])?;
    let rhs = [
        mi(&["X1"], &["Y1"], &["U2"])?,
        mi(&["X2"], &["Y2"], &["U1"])?,
        y1_given_u1u2 + x2u1_y2,
        x1u2_y1_u1 + x2u1_y2_u2,
        x1u2_y1 + y2_given_u1u2,
        y1_given_u1u2 + x2u1_y2_u2 + x1u2_y1,
        y2_given_u1u2 + x1u2_y1_u1 + x2u1_y2,
    ];
    let rows: Vec<([i32; 2], f64)> = HK_COEFFS.iter().copied().zip(rhs).collect();
    Ok(RatePolytope::two_user(&rows))
}

// ---------------------------------------------------------------------------
// State-dependent Z-IC: general inner bound

/// One slice of the general inner bound for the S-D Z-IC:
/// `p(s)·p(u,v|s)·p(x1|u,v,s)·p(x2)` followed by the channel kernels
/// `p(y1|x1,s)` and `p(y2|x1,x2,s)`.
#[derive(Debug, Clone)]
pub struct SdzicInnerSlice {
    pub state: Pmf,
    pub uv_given_s: Kernel,
    pub x1_given_uvs: Kernel,
    pub x2: Pmf,
    pub y1_given_x1s: Kernel,
    pub y2_given_x1x2s: Kernel,
}

impl SdzicInnerSlice {
    /// Validates kernel shapes by building the induced joint once.
    pub fn new(
        state: Pmf,
        uv_given_s: Kernel,
        x1_given_uvs: Kernel,
        x2: Pmf,
        y1_given_x1s: Kernel,
        y2_given_x1x2s: Kernel,
    ) -> Result<Self> {
        let slice = Self {
            state,
            uv_given_s,
            x1_given_uvs,
            x2,
            y1_given_x1s,
            y2_given_x1x2s,
        };
        slice.joint()?;
        Ok(slice)
    }

    /// Joint law over `(S, U, V, X1, X2, Y1, Y2)`.
    pub fn joint(&self) -> Result<JointDistribution> {
        Ok(product_joint(&[
            Kernel::marginal("S", &self.state),
            self.uv_given_s.clone(),
            self.x1_given_uvs.clone(),
            Kernel::marginal("X2", &self.x2),
            self.y1_given_x1s.clone(),
            self.y2_given_x1x2s.clone(),
        ])?)
    }

    /// Inner-bound slice whose auxiliaries are deterministic functions
    /// `u(x1,s)` and `v(x1,s)` of a capacity slice's input.
    pub fn from_functions(
        slice: &DetCapSlice,
        u_size: usize,
        u_of: impl Fn(usize, usize) -> usize,
        v_size: usize,
        v_of: impl Fn(usize, usize) -> usize,
    ) -> Result<Self> {
        let ch = slice.channel;
        let (ns, nx) = (ch.s.len(), ch.x1.len());
        let nuv = u_size * v_size;
        let mut uv_rows = vec![vec![0.0; nuv]; ns];
        for (s, row) in uv_rows.iter_mut().enumerate() {
            for x1 in 0..nx {
                row[u_of(x1, s) * v_size + v_of(x1, s)] += slice.x1_given_s[s][x1];
            }
        }
        // p(x1|u,v,s) ∝ p(x1|s)·[u(x1,s)=u, v(x1,s)=v]; rows with p(u,v|s)=0
        // are unreachable and get a uniform placeholder.
        let mut x1_rows = Vec::with_capacity(nuv * ns);
        for u in 0..u_size {
            for v in 0..v_size {
                for s in 0..ns {
                    let mass = uv_rows[s][u * v_size + v];
                    let row: Vec<f64> = if mass > 0.0 {
                        (0..nx)
                            .map(|x1| {
                                if u_of(x1, s) == u && v_of(x1, s) == v {
                                    slice.x1_given_s[s][x1] / mass
                                } else {
                                    0.0
                                }
                            })
                            .collect()
                    } else {
                        vec![1.0 / nx as f64; nx]
                    };
                    x1_rows.push(normalize(row));
                }
            }
        }
        let uv_rows = uv_rows.into_iter().map(normalize).collect();
        let (y1, y2) = ch.output_kernels();
        Self::new(
            ch.state().clone(),
            Kernel::joint(
                vec![axis("U", u_size), axis("V", v_size)],
                vec!["S".into()],
                uv_rows,
            )?,
            Kernel::conditional("X1", ch.x1.clone(), &["U", "V", "S"], x1_rows)?,
            Pmf::new(ch.x2.clone(), slice.x2.clone())?,
            y1,
            y2,
        )
    }

    /// The capacity-achieving choice `U = Y1`, `V = T1`.
    pub fn with_u_y1_v_t1(slice: &DetCapSlice) -> Result<Self> {
        let ch = slice.channel;
        Self::from_functions(
            slice,
            ch.y1.len(),
            |x1, s| ch.y1_map().get(&[x1, s]),
            ch.t1.len(),
            |x1, s| ch.t1_map().get(&[x1, s]),
        )
    }

    /// Gelfand-Pinsker coding with interference treated as noise: `U = Y1`,
    /// `V` constant.
    pub fn with_constant_v(slice: &DetCapSlice) -> Result<Self> {
        let ch = slice.channel;
        Self::from_functions(
            slice,
            ch.y1.len(),
            |x1, s| ch.y1_map().get(&[x1, s]),
            1,
            |_, _| 0,
        )
    }
}

// Grid weights may miss 1 by an ulp or two after division; kernels require
// exact normalization within NORMALIZATION_TOL, so renormalize explicitly.
fn normalize(mut row: Vec<f64>) -> Vec<f64> {
    let total: f64 = row.iter().sum();
    row.iter_mut().for_each(|p| *p /= total);
    row
}

pub fn eval_sdzic_inner(slice: &SdzicInnerSlice) -> Result<RatePolytope> {
    let p = slice.joint()?;
    let mi = |a: &[&str], b: &[&str], c: &[&str]| p.mutual_information(a, b, c);
    let u_y1 = mi(&["U"], &["Y1"], &[])?;
    let u_s = mi(&["U"], &["S"], &[])?;
    let vx2_y2 = mi(&["V", "X2"], &["Y2"], &[])?;
    Ok(RatePolytope::two_user(&[
        ([1, 0], u_y1 - u_s),
        ([0, 1], mi(&["X2"], &["Y2"], &["V"])?),
        ([0, 1], vx2_y2 - mi(&["V"], &["S"], &[])?),
        ([1, 1], u_y1 + vx2_y2 - u_s - mi(&["U", "S"], &["V"], &[])?),
    ]))
}

// ---------------------------------------------------------------------------
// Injective deterministic S-D Z-IC: capacity and Z-channel

/// One slice `p(x1|s)·p(x2)` of the deterministic S-D Z-IC capacity region.
/// `x1_given_s[s]` is a pmf over `X1`.
#[derive(Debug, Clone)]
pub struct DetCapSlice<'a> {
    pub channel: &'a DeterministicSdzic,
    pub x1_given_s: Vec<Vec<f64>>,
    pub x2: Vec<f64>,
}

impl<'a> DetCapSlice<'a> {
    pub fn new(
        channel: &'a DeterministicSdzic,
        x1_given_s: Vec<Vec<f64>>,
        x2: Vec<f64>,
    ) -> Result<Self> {
        check_rows("p(x1|s)", &x1_given_s, channel.s.len(), channel.x1.len())?;
        check_pmf("p(x2)", &x2, channel.x2.len())?;
        Ok(Self {
            channel,
            x1_given_s,
            x2,
        })
    }
}

/// Entropies of a deterministic S-D Z-IC slice, computed directly from the
/// lookup tables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetTerms {
    /// `H(Y1|S)`
    pub h_y1_s: f64,
    /// `H(T1|S)`
    pub h_t1_s: f64,
    /// `H(T1,Y1|S)`
    pub h_t1y1_s: f64,
    /// `H(Y1|T1,S)`
    pub h_y1_t1s: f64,
    /// `I(T1;S)`
    pub i_t1_s: f64,
    /// `H(Y2|T1)`
    pub h_y2_t1: f64,
    /// `H(Y2)`
    pub h_y2: f64,
}

pub fn det_terms(slice: &DetCapSlice) -> DetTerms {
    let ch = slice.channel;
    let ps = ch.state().probs();
    let (ns, nx1, nt, ny1, ny2) = (
        ch.s.len(),
        ch.x1.len(),
        ch.t1.len(),
        ch.y1.len(),
        ch.y2.len(),
    );
    let mut p_sy1 = vec![0.0; ns * ny1];
    let mut p_st = vec![0.0; ns * nt];
    let mut p_sty1 = vec![0.0; ns * nt * ny1];
    let mut p_t = vec![0.0; nt];
    for s in 0..ns {
        for x1 in 0..nx1 {
            let w = ps[s] * slice.x1_given_s[s][x1];
            if w == 0.0 {
                continue;
            }
            let y1 = ch.y1_map().get(&[x1, s]);
            let t1 = ch.t1_map().get(&[x1, s]);
            p_sy1[s * ny1 + y1] += w;
            p_st[s * nt + t1] += w;
            p_sty1[(s * nt + t1) * ny1 + y1] += w;
            p_t[t1] += w;
        }
    }
    let h_s = entropy_bits(ps);
    let h_st = entropy_bits(&p_st);
    let mut p_y2 = vec![0.0; ny2];
    let mut h_y2_t1 = 0.0;
    let mut row = vec![0.0; ny2];
    for (t1, &pt) in p_t.iter().enumerate() {
        if pt == 0.0 {
            continue;
        }
        row.iter_mut().for_each(|r| *r = 0.0);
        for (x2, &px) in slice.x2.iter().enumerate() {
            row[ch.y2_map().get(&[x2, t1])] += px;
        }
        h_y2_t1 += pt * entropy_bits(&row);
        for (acc, &r) in p_y2.iter_mut().zip(&row) {
            *acc += pt * r;
        }
    }
    DetTerms {
        h_y1_s: entropy_bits(&p_sy1) - h_s,
        h_t1_s: h_st - h_s,
        h_t1y1_s: entropy_bits(&p_sty1) - h_s,
        h_y1_t1s: entropy_bits(&p_sty1) - h_st,
        i_t1_s: (entropy_bits(&p_t) - (h_st - h_s)).max(0.0),
        h_y2_t1,
        h_y2: entropy_bits(&p_y2),
    }
}

pub fn eval_det_capacity(slice: &DetCapSlice) -> Result<RatePolytope> {
    slice.channel.require_injective()?;
    Ok(det_capacity_polytope(&det_terms(slice)))
}

pub fn det_capacity_polytope(t: &DetTerms) -> RatePolytope {
    RatePolytope::two_user(&[
        ([1, 0], t.h_y1_s),
        ([0, 1], t.h_y2_t1),
        ([0, 1], t.h_y2 - t.i_t1_s),
        ([1, 1], t.h_y1_t1s + t.h_y2 - t.i_t1_s),
    ])
}

/// Capacity slice of the deterministic S-D Z-channel over `(R1, R21, R2)`,
/// where `R21` is the rate from transmitter 1 to receiver 2.
pub fn eval_zchannel_capacity(slice: &DetCapSlice) -> Result<RatePolytope> {
    slice.channel.require_injective()?;
    let t = det_terms(slice);
    let row = |c: [i32; 3], rhs: f64| Inequality::new(c.to_vec(), rhs);
    RatePolytope::new(
        vec!["R1".into(), "R21".into(), "R2".into()],
        vec![
            row([1, 0, 0], t.h_y1_s),
            row([0, 0, 1], t.h_y2_t1),
            row([0, 1, 0], t.h_t1_s),
            row([1, 1, 0], t.h_t1y1_s),
            row([0, 1, 1], t.h_y2 - t.i_t1_s),
            row([1, 1, 1], t.h_y1_t1s + t.h_y2 - t.i_t1_s),
        ],
    )
}

// ---------------------------------------------------------------------------
// Modulo-additive closed forms and the multi-level schemes

fn log2(m: usize) -> f64 {
    (m as f64).log2()
}

/// `λ·p + (1-λ)·δ0`.
fn mix_with_zero(lambda: f64, p: &[f64]) -> Vec<f64> {
    let mut q: Vec<f64> = p.iter().map(|x| lambda * x).collect();
    q[0] += 1.0 - lambda;
    q
}

/// Closed-form capacity slice of the modulo-additive channel for the
/// interfering-symbol law `p` (the law of `X1` when `S = 1`).
pub fn eval_modulo_closed_form(m: usize, lambda: f64, p: &[f64]) -> Result<RatePolytope> {
    check_pmf("p", p, m)?;
    check_lambda(lambda)?;
    Ok(RatePolytope::two_user(&[
        ([1, 0], (1.0 - lambda) * log2(m) + lambda * entropy_bits(p)),
        ([0, 1], log2(m) - entropy_bits(&mix_with_zero(lambda, p))),
    ]))
}

fn check_lambda(lambda: f64) -> Result<()> {
    if (0.0..=1.0).contains(&lambda) {
        Ok(())
    } else {
        Err(RegionError::Parameter(format!(
            "lambda {lambda} outside [0,1]"
        )))
    }
}

/// Cyclic convolution `p̃(k) = Σ_i a(i)·b(k-i mod m)`.
pub fn cyclic_convolution(a: &[f64], b: &[f64]) -> Vec<f64> {
    let m = a.len();
    (0..m)
        .map(|k| (0..m).map(|i| a[i] * b[(k + m - i) % m]).sum())
        .collect()
}

/// The modulo channel's capacity slice written in terms of
/// `p10 = p(x1|s=0)`, `p11 = p(x1|s=1)` and `p2 = p(x2)`.
pub fn eval_modulo_intermediate(
    lambda: f64,
    p10: &[f64],
    p11: &[f64],
    p2: &[f64],
) -> Result<RatePolytope> {
    let m = p10.len();
    check_lambda(lambda)?;
    check_pmf("p10", p10, m)?;
    check_pmf("p11", p11, m)?;
    check_pmf("p2", p2, m)?;
    let tilde = cyclic_convolution(p11, p2);
    let y2: Vec<f64> = p2
        .iter()
        .zip(&tilde)
        .map(|(a, b)| (1.0 - lambda) * a + lambda * b)
        .collect();
    let h_y2 = entropy_bits(&y2);
    let h10 = entropy_bits(p10);
    let h11 = entropy_bits(p11);
    let h_t1 = entropy_bits(&mix_with_zero(lambda, p11));
    Ok(RatePolytope::two_user(&[
        ([1, 0], (1.0 - lambda) * h10 + lambda * h11),
        ([0, 1], entropy_bits(p2)),
        ([0, 1], h_y2 + lambda * h11 - h_t1),
        ([1, 1], (1.0 - lambda) * h10 + h_y2 + lambda * h11 - h_t1),
    ]))
}

/// Level-by-level coding over `L = pmfs.len()` binary levels sharing a
/// Bernoulli(1/2) state; `pmfs[i]` is the interfering-symbol law on level `i`.
pub fn eval_separation(pmfs: &[Vec<f64>]) -> Result<RatePolytope> {
    if pmfs.is_empty() {
        return Err(RegionError::Parameter("need at least one level".into()));
    }
    let (mut r1, mut r2) = (0.0, 0.0);
    for p in pmfs {
        check_pmf("level pmf", p, 2)?;
        r1 += 0.5 + 0.5 * entropy_bits(p);
        r2 += 1.0 - entropy_bits(&mix_with_zero(0.5, p));
    }
    Ok(RatePolytope::two_user(&[([1, 0], r1), ([0, 1], r2)]))
}

/// Reserve one of `levels` binary levels to convey the state to receiver 2;
/// `p` is a pmf over the remaining `2^(levels-1)` symbols.
pub fn eval_communicate_state(levels: u32, p: &[f64]) -> Result<RatePolytope> {
    if levels < 2 {
        return Err(RegionError::Parameter(format!(
            "communicating the state needs at least 2 levels, got {levels}"
        )));
    }
    check_pmf("p", p, 1 << (levels - 1))?;
    let l = levels as f64;
    let h = entropy_bits(p);
    Ok(RatePolytope::two_user(&[
        ([1, 0], l / 2.0 + 0.5 * h),
        ([0, 1], l - 1.0 - 0.5 * h),
    ]))
}

// ---------------------------------------------------------------------------
// Cribbing

/// Default cap on the time-sharing/cooperation auxiliary `W`: `|Y2| + 3`.
pub fn default_w_cap(y2_size: usize) -> usize {
    y2_size + 3
}

/// One slice `p(w)·p(x1|w)·p(x2|w)` of the partial-cribbing capacity region.
#[derive(Debug, Clone)]
pub struct CribbingSlice<'a> {
    pub channel: &'a CribbingZic,
    pub w: Vec<f64>,
    pub x1_given_w: Vec<Vec<f64>>,
    pub x2_given_w: Vec<Vec<f64>>,
}

impl<'a> CribbingSlice<'a> {
    pub fn new(
        channel: &'a CribbingZic,
        w: Vec<f64>,
        x1_given_w: Vec<Vec<f64>>,
        x2_given_w: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let cap = default_w_cap(channel.y2.len());
        if w.len() > cap {
            return Err(RegionError::AuxiliaryCap { got: w.len(), cap });
        }
        check_pmf("p(w)", &w, w.len())?;
        check_rows("p(x1|w)", &x1_given_w, w.len(), channel.x1.len())?;
        check_rows("p(x2|w)", &x2_given_w, w.len(), channel.x2.len())?;
        Ok(Self {
            channel,
            w,
            x1_given_w,
            x2_given_w,
        })
    }

    /// Joint law over `(W, X1, X2, Y1, T1, Y2, Z2)`.
    pub fn joint(&self) -> Result<JointDistribution> {
        let c = self.channel;
        let nw = self.w.len();
        Ok(product_joint(&[
            Kernel::conditional(
                "W",
                crate::prob::Alphabet::indexed("W", nw),
                &[],
                vec![self.w.clone()],
            )?,
            Kernel::conditional("X1", c.x1.clone(), &["W"], self.x1_given_w.clone())?,
            Kernel::conditional("X2", c.x2.clone(), &["W"], self.x2_given_w.clone())?,
            Kernel::deterministic("Y1", c.y1.clone(), &["X1"], c.y1_map().table()),
            Kernel::deterministic("T1", c.t1.clone(), &["X1"], c.t1_map().table()),
            Kernel::deterministic("Y2", c.y2.clone(), &["X2", "T1"], c.y2_map().table()),
            Kernel::deterministic("Z2", c.z2.clone(), &["X2"], c.z2_map().table()),
        ])?)
    }
}

pub fn eval_cribbing_capacity(slice: &CribbingSlice) -> Result<RatePolytope> {
    slice.channel.require_injective()?;
    let p = slice.joint()?;
    let h = |a: &[&str], b: &[&str]| p.conditional_entropy(a, b);
    let h_y2 = h(&["Y2"], &[])?;
    let h_y2z2_t1w = h(&["Y2", "Z2"], &["T1", "W"])?;
    let h_y2z2_w = h(&["Y2", "Z2"], &["W"])?;
    let h_y1_t1w = h(&["Y1"], &["T1", "W"])?;
    Ok(RatePolytope::two_user(&[
        ([1, 0], h(&["Y1"], &["W"])?),
        ([0, 1], h_y2),
        ([0, 1], h_y2z2_t1w),
        ([1, 1], h_y1_t1w + h_y2),
        ([1, 1], h_y1_t1w + h_y2z2_w),
    ]))
}

/// One slice `p(w)·p(x2|w)·p(x1|w,s)` of the state-dependent cribbing
/// capacity region. `x1_given_ws[w * |S| + s]` is a pmf over `X1`.
#[derive(Debug, Clone)]
pub struct StateCribbingSlice<'a> {
    pub channel: &'a StateCribbingZic,
    pub w: Vec<f64>,
    pub x1_given_ws: Vec<Vec<f64>>,
    pub x2_given_w: Vec<Vec<f64>>,
}

impl<'a> StateCribbingSlice<'a> {
    /// `w_cap` bounds `|W|`; [`default_w_cap`] mirrors the partial-cribbing
    /// bound.
    pub fn new(
        channel: &'a StateCribbingZic,
        w: Vec<f64>,
        x1_given_ws: Vec<Vec<f64>>,
        x2_given_w: Vec<Vec<f64>>,
        w_cap: usize,
    ) -> Result<Self> {
        if w.len() > w_cap {
            return Err(RegionError::AuxiliaryCap {
                got: w.len(),
                cap: w_cap,
            });
        }
        check_pmf("p(w)", &w, w.len())?;
        check_rows(
            "p(x1|w,s)",
            &x1_given_ws,
            w.len() * channel.s.len(),
            channel.x1.len(),
        )?;
        check_rows("p(x2|w)", &x2_given_w, w.len(), channel.x2.len())?;
        Ok(Self {
            channel,
            w,
            x1_given_ws,
            x2_given_w,
        })
    }

    /// Joint law over `(W, S, X1, X2, Y1, T1, Y2, Z2)`.
    pub fn joint(&self) -> Result<JointDistribution> {
        let c = self.channel;
        let nw = self.w.len();
        Ok(product_joint(&[
            Kernel::conditional(
                "W",
                crate::prob::Alphabet::indexed("W", nw),
                &[],
                vec![self.w.clone()],
            )?,
            Kernel::marginal("S", c.state()),
            Kernel::conditional("X1", c.x1.clone(), &["W", "S"], self.x1_given_ws.clone())?,
            Kernel::conditional("X2", c.x2.clone(), &["W"], self.x2_given_w.clone())?,
            Kernel::deterministic("Y1", c.y1.clone(), &["X1", "S"], c.y1_map().table()),
            Kernel::deterministic("T1", c.t1.clone(), &["X1", "S"], c.t1_map().table()),
            Kernel::deterministic("Y2", c.y2.clone(), &["X2", "T1"], c.y2_map().table()),
            Kernel::deterministic("Z2", c.z2.clone(), &["X2"], c.z2_map().table()),
        ])?)
    }
}

pub fn eval_state_cribbing_capacity(slice: &StateCribbingSlice) -> Result<RatePolytope> {
    slice.channel.require_injective()?;
    let p = slice.joint()?;
    let h = |a: &[&str], b: &[&str]| p.conditional_entropy(a, b);
    let i_t1_s_w = p.mutual_information(&["T1"], &["S"], &["W"])?;
    let h_y2 = h(&["Y2"], &[])?;
    let h_y2z2_w = h(&["Y2", "Z2"], &["W"])?;
    let h_y1_wt1s = h(&["Y1"], &["W", "T1", "S"])?;
    Ok(RatePolytope::two_user(&[
        ([1, 0], h(&["Y1"], &["W", "S"])?),
        ([0, 1], h(&["Y2", "Z2"], &["T1", "W"])?),
        ([0, 1], h_y2 - i_t1_s_w),
        ([0, 1], h_y2z2_w - i_t1_s_w),
        ([1, 1], h_y1_wt1s + h_y2 - i_t1_s_w),
        ([1, 1], h_y1_wt1s + h_y2z2_w - i_t1_s_w),
    ]))
}
