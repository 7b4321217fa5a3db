//! Convex closures of the rate regions over grids of input laws, and the
//! figure bundles built from them.
//!
//! Slices are addressed by index into a product of simplex grids, so large
//! grids are never materialized.

use serde_json::{json, Value};
use thiserror::Error;

use crate::channels::{
    ChannelError, CribbingZic, DeterministicSdzic, GeneralDmic, InjectiveInterference,
    StateCribbingZic,
};
use crate::geometry::{convex_closure, excess, GeometryError, RegionBoundary, SimplexGrid};
use crate::regions::{
    det_capacity_polytope, det_terms, eval_communicate_state, eval_cribbing_capacity, eval_hk,
    eval_modulo_closed_form, eval_sdzic_inner, eval_separation, eval_state_cribbing_capacity,
    eval_zchannel_capacity, CribbingSlice, DetCapSlice, HkSlice, RatePolytope, RegionError,
    SdzicInnerSlice, StateCribbingSlice,
};

/// Refuse grids with more slices than this.
pub const MAX_SLICES: usize = 5_000_000;

#[derive(Debug, Error)]
pub enum FigureError {
    #[error("grid has {0} slices, more than {MAX_SLICES}; use a coarser grid step")]
    TooManySlices(u128),
    #[error("unknown figure `{0}` (expected fig8, fig9a or fig9b)")]
    UnknownFigure(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Region(#[from] RegionError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

pub type Result<T> = std::result::Result<T, FigureError>;

/// Cartesian product of pmf lists; index `i` picks one pmf from each factor,
/// last factor fastest.
#[derive(Debug, Clone)]
pub struct ProductGrid {
    factors: Vec<Vec<Vec<f64>>>,
    len: usize,
}

impl ProductGrid {
    pub fn new(factors: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let len = factors
            .iter()
            .fold(1u128, |n, f| n.saturating_mul(f.len() as u128));
        if len > MAX_SLICES as u128 {
            return Err(FigureError::TooManySlices(len));
        }
        Ok(Self {
            factors,
            len: len as usize,
        })
    }

    /// `count` copies of the simplex grid over `size` symbols.
    pub fn simplex_power(size: usize, count: usize, step: f64) -> Result<Vec<Vec<Vec<f64>>>> {
        let g = SimplexGrid::new(size, step)?.points();
        Ok(vec![g; count])
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn pick(&self, mut idx: usize) -> Vec<&[f64]> {
        let mut out = vec![&[][..]; self.factors.len()];
        for (k, f) in self.factors.iter().enumerate().rev() {
            out[k] = &f[idx % f.len()];
            idx /= f.len();
        }
        out
    }
}

fn owned(rows: &[&[f64]]) -> Vec<Vec<f64>> {
    rows.iter().map(|r| r.to_vec()).collect()
}

fn uniform(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}

/// An indexed family of rate-region slices.
pub trait SliceFamily: Sync {
    fn len(&self) -> usize;
    fn eval(&self, i: usize) -> std::result::Result<RatePolytope, RegionError>;
    /// The input law behind slice `i`.
    fn law(&self, i: usize) -> Value;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Convex closure of every slice in the family.
pub fn closure<F: SliceFamily + ?Sized>(family: &F) -> Result<RegionBoundary> {
    let idx: Vec<usize> = (0..family.len()).collect();
    Ok(convex_closure(&idx, |&i| family.eval(i))?)
}

/// JSON for slice `i`: its index, input law and polytope.
pub fn describe_slice<F: SliceFamily + ?Sized>(family: &F, i: usize) -> Value {
    let polytope = match family.eval(i) {
        Ok(p) => serde_json::to_value(p).unwrap_or(Value::Null),
        Err(e) => json!({ "error": e.to_string() }),
    };
    json!({ "slice": i, "law": family.law(i), "polytope": polytope })
}

/// Closed-form capacity slices of the `m`-ary modulo-additive channel, one
/// per interfering-symbol law.
pub struct ModuloFamily {
    pub m: usize,
    pub lambda: f64,
    pub pmfs: Vec<Vec<f64>>,
}

impl ModuloFamily {
    pub fn grid(m: usize, lambda: f64, step: f64) -> Result<Self> {
        Ok(Self {
            m,
            lambda,
            pmfs: SimplexGrid::new(m, step)?.points(),
        })
    }
}

impl SliceFamily for ModuloFamily {
    fn len(&self) -> usize {
        self.pmfs.len()
    }
    fn eval(&self, i: usize) -> std::result::Result<RatePolytope, RegionError> {
        eval_modulo_closed_form(self.m, self.lambda, &self.pmfs[i])
    }
    fn law(&self, i: usize) -> Value {
        json!({ "p(x1|s=1)": self.pmfs[i] })
    }
}

/// Which region of the deterministic S-D Z-IC to evaluate per slice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetRegion {
    Capacity,
    ZChannel,
    /// Gelfand-Pinsker at transmitter 1, interference treated as noise.
    InnerNoise,
}

/// Slices `p(x1|s)·p(x2)` of a deterministic S-D Z-IC.
pub struct DetFamily<'a> {
    pub channel: &'a DeterministicSdzic,
    pub region: DetRegion,
    grid: ProductGrid,
}

impl<'a> DetFamily<'a> {
    pub fn new(channel: &'a DeterministicSdzic, region: DetRegion, step: f64) -> Result<Self> {
        if region != DetRegion::InnerNoise {
            channel.require_injective()?;
        }
        let mut factors = ProductGrid::simplex_power(channel.x1.len(), channel.s.len(), step)?;
        factors.push(SimplexGrid::new(channel.x2.len(), step)?.points());
        Ok(Self {
            channel,
            region,
            grid: ProductGrid::new(factors)?,
        })
    }

    pub fn slice(&self, i: usize) -> std::result::Result<DetCapSlice<'a>, RegionError> {
        let rows = self.grid.pick(i);
        let (x2, x1) = rows.split_last().expect("grid has an X2 factor");
        DetCapSlice::new(self.channel, owned(x1), x2.to_vec())
    }
}

impl SliceFamily for DetFamily<'_> {
    fn len(&self) -> usize {
        self.grid.len()
    }
    fn eval(&self, i: usize) -> std::result::Result<RatePolytope, RegionError> {
        let s = self.slice(i)?;
        match self.region {
            DetRegion::Capacity => Ok(det_capacity_polytope(&det_terms(&s))),
            DetRegion::ZChannel => eval_zchannel_capacity(&s),
            DetRegion::InnerNoise => eval_sdzic_inner(&SdzicInnerSlice::with_constant_v(&s)?),
        }
    }
    fn law(&self, i: usize) -> Value {
        let rows = self.grid.pick(i);
        let (x2, x1) = rows.split_last().expect("grid has an X2 factor");
        json!({ "p(x1|s)": x1, "p(x2)": x2 })
    }
}

/// Slices `p(u1,x1)·p(u2,x2)` of the HK region.
pub struct HkFamily<'a> {
    pub channel: &'a GeneralDmic,
    pub u1: usize,
    pub u2: usize,
    grid: ProductGrid,
}

impl<'a> HkFamily<'a> {
    pub fn new(channel: &'a GeneralDmic, u1: usize, u2: usize, step: f64) -> Result<Self> {
        Ok(Self {
            channel,
            u1,
            u2,
            grid: ProductGrid::new(vec![
                SimplexGrid::new(u1 * channel.x1.len(), step)?.points(),
                SimplexGrid::new(u2 * channel.x2.len(), step)?.points(),
            ])?,
        })
    }
}

impl SliceFamily for HkFamily<'_> {
    fn len(&self) -> usize {
        self.grid.len()
    }
    fn eval(&self, i: usize) -> std::result::Result<RatePolytope, RegionError> {
        let r = self.grid.pick(i);
        eval_hk(&HkSlice::new(
            self.channel,
            self.u1,
            self.u2,
            r[0].to_vec(),
            r[1].to_vec(),
        )?)
    }
    fn law(&self, i: usize) -> Value {
        let r = self.grid.pick(i);
        json!({ "p(u1,x1)": r[0], "p(u2,x2)": r[1] })
    }
}

/// Slices `p(w)·p(x1|w)·p(x2|w)` of the partial-cribbing capacity region.
pub struct CribbingFamily<'a> {
    pub channel: &'a CribbingZic,
    pub w_size: usize,
    grid: ProductGrid,
}

impl<'a> CribbingFamily<'a> {
    pub fn new(channel: &'a CribbingZic, w_size: usize, step: f64) -> Result<Self> {
        channel.require_injective()?;
        // reject an oversized W before building the grid
        CribbingSlice::new(
            channel,
            uniform(w_size),
            vec![uniform(channel.x1.len()); w_size],
            vec![uniform(channel.x2.len()); w_size],
        )?;
        let mut factors = vec![SimplexGrid::new(w_size, step)?.points()];
        factors.extend(ProductGrid::simplex_power(channel.x1.len(), w_size, step)?);
        factors.extend(ProductGrid::simplex_power(channel.x2.len(), w_size, step)?);
        Ok(Self {
            channel,
            w_size,
            grid: ProductGrid::new(factors)?,
        })
    }
}

impl SliceFamily for CribbingFamily<'_> {
    fn len(&self) -> usize {
        self.grid.len()
    }
    fn eval(&self, i: usize) -> std::result::Result<RatePolytope, RegionError> {
        let r = self.grid.pick(i);
        let w = self.w_size;
        eval_cribbing_capacity(&CribbingSlice::new(
            self.channel,
            r[0].to_vec(),
            owned(&r[1..1 + w]),
            owned(&r[1 + w..]),
        )?)
    }
    fn law(&self, i: usize) -> Value {
        let r = self.grid.pick(i);
        let w = self.w_size;
        json!({ "p(w)": r[0], "p(x1|w)": &r[1..1 + w], "p(x2|w)": &r[1 + w..] })
    }
}

/// Slices `p(w)·p(x2|w)·p(x1|w,s)` of the state-dependent cribbing region.
pub struct StateCribbingFamily<'a> {
    pub channel: &'a StateCribbingZic,
    pub w_size: usize,
    pub w_cap: usize,
    grid: ProductGrid,
}

impl<'a> StateCribbingFamily<'a> {
    pub fn new(
        channel: &'a StateCribbingZic,
        w_size: usize,
        w_cap: usize,
        step: f64,
    ) -> Result<Self> {
        channel.require_injective()?;
        let ns = channel.s.len();
        StateCribbingSlice::new(
            channel,
            uniform(w_size),
            vec![uniform(channel.x1.len()); w_size * ns],
            vec![uniform(channel.x2.len()); w_size],
            w_cap,
        )?;
        let mut factors = vec![SimplexGrid::new(w_size, step)?.points()];
        factors.extend(ProductGrid::simplex_power(
            channel.x1.len(),
            w_size * ns,
            step,
        )?);
        factors.extend(ProductGrid::simplex_power(channel.x2.len(), w_size, step)?);
        Ok(Self {
            channel,
            w_size,
            w_cap,
            grid: ProductGrid::new(factors)?,
        })
    }

    fn rows(&self) -> usize {
        self.w_size * self.channel.s.len()
    }
}

impl SliceFamily for StateCribbingFamily<'_> {
    fn len(&self) -> usize {
        self.grid.len()
    }
    fn eval(&self, i: usize) -> std::result::Result<RatePolytope, RegionError> {
        let r = self.grid.pick(i);
        let k = self.rows();
        eval_state_cribbing_capacity(&StateCribbingSlice::new(
            self.channel,
            r[0].to_vec(),
            owned(&r[1..1 + k]),
            owned(&r[1 + k..]),
            self.w_cap,
        )?)
    }
    fn law(&self, i: usize) -> Value {
        let r = self.grid.pick(i);
        let k = self.rows();
        json!({ "p(w)": r[0], "p(x1|w,s)": &r[1..1 + k], "p(x2|w)": &r[1 + k..] })
    }
}

/// Level-by-level coding on the `levels`-level binary channel.
pub struct SeparationFamily {
    pub levels: u32,
    grid: ProductGrid,
}

impl SeparationFamily {
    pub fn new(levels: u32, step: f64) -> Result<Self> {
        Ok(Self {
            levels,
            grid: ProductGrid::new(ProductGrid::simplex_power(2, levels as usize, step)?)?,
        })
    }
}

impl SliceFamily for SeparationFamily {
    fn len(&self) -> usize {
        self.grid.len()
    }
    fn eval(&self, i: usize) -> std::result::Result<RatePolytope, RegionError> {
        eval_separation(&owned(&self.grid.pick(i)))
    }
    fn law(&self, i: usize) -> Value {
        json!({ "level laws": self.grid.pick(i) })
    }
}

/// One level reserved to convey the state to receiver 2.
pub struct CommunicateStateFamily {
    pub levels: u32,
    pub pmfs: Vec<Vec<f64>>,
}

impl CommunicateStateFamily {
    pub fn new(levels: u32, step: f64) -> Result<Self> {
        if levels < 2 {
            return Err(RegionError::Parameter(format!(
                "communicating the state needs at least 2 levels, got {levels}"
            ))
            .into());
        }
        Ok(Self {
            levels,
            pmfs: SimplexGrid::new(1 << (levels - 1), step)?.points(),
        })
    }
}

impl SliceFamily for CommunicateStateFamily {
    fn len(&self) -> usize {
        self.pmfs.len()
    }
    fn eval(&self, i: usize) -> std::result::Result<RatePolytope, RegionError> {
        eval_communicate_state(self.levels, &self.pmfs[i])
    }
    fn law(&self, i: usize) -> Value {
        json!({ "p": self.pmfs[i] })
    }
}

/// Capacity region of the `m`-ary modulo-additive channel from the closed
/// form, over the simplex grid for the interfering-symbol law.
pub fn modulo_capacity_region(m: usize, lambda: f64, step: f64) -> Result<RegionBoundary> {
    closure(&ModuloFamily::grid(m, lambda, step)?)
}

/// Capacity region of an injective deterministic S-D Z-IC.
pub fn det_capacity_region(ch: &DeterministicSdzic, step: f64) -> Result<RegionBoundary> {
    closure(&DetFamily::new(ch, DetRegion::Capacity, step)?)
}

/// Capacity region of the Z-channel extension over `(R1, R21, R2)`.
pub fn zchannel_capacity_region(ch: &DeterministicSdzic, step: f64) -> Result<RegionBoundary> {
    closure(&DetFamily::new(ch, DetRegion::ZChannel, step)?)
}

pub fn inner_noise_region(ch: &DeterministicSdzic, step: f64) -> Result<RegionBoundary> {
    closure(&DetFamily::new(ch, DetRegion::InnerNoise, step)?)
}

pub fn hk_region(ch: &GeneralDmic, u1: usize, u2: usize, step: f64) -> Result<RegionBoundary> {
    closure(&HkFamily::new(ch, u1, u2, step)?)
}

pub fn cribbing_region(ch: &CribbingZic, w_size: usize, step: f64) -> Result<RegionBoundary> {
    closure(&CribbingFamily::new(ch, w_size, step)?)
}

pub fn state_cribbing_region(
    ch: &StateCribbingZic,
    w_size: usize,
    w_cap: usize,
    step: f64,
) -> Result<RegionBoundary> {
    closure(&StateCribbingFamily::new(ch, w_size, w_cap, step)?)
}

pub fn separation_region(levels: u32, step: f64) -> Result<RegionBoundary> {
    closure(&SeparationFamily::new(levels, step)?)
}

pub fn communicate_state_region(levels: u32, step: f64) -> Result<RegionBoundary> {
    closure(&CommunicateStateFamily::new(levels, step)?)
}

/// Law of the `levels`-bit input when every level uses its own binary law.
pub fn product_pmf(levels: &[&[f64]]) -> Vec<f64> {
    (0..1usize << levels.len())
        .map(|x| {
            levels
                .iter()
                .enumerate()
                .map(|(l, p)| p[x >> l & 1])
                .product()
        })
        .collect()
}

/// Law of the `levels`-bit input that puts a 1 on the top (reserved) level
/// and `p` on the rest.
pub fn lifted_pmf(levels: u32, p: &[f64]) -> Vec<f64> {
    let half = 1usize << (levels - 1);
    let mut q = vec![0.0; 2 * half];
    q[half..].copy_from_slice(p);
    q
}

/// Capacity slices of the `levels`-level binary channel. The grid over
/// input laws is augmented with the laws the two simple schemes use, so the
/// schemes' slices are reproduced exactly rather than approximated.
pub fn multilevel_capacity_family(
    levels: u32,
    lambda: f64,
    step: f64,
    scheme_step: f64,
) -> Result<ModuloFamily> {
    let m = 1usize << levels;
    let mut pmfs = SimplexGrid::new(m, step)?.points();
    let sep = ProductGrid::new(ProductGrid::simplex_power(2, levels as usize, scheme_step)?)?;
    pmfs.extend((0..sep.len()).map(|i| product_pmf(&sep.pick(i))));
    if levels >= 2 {
        let half = SimplexGrid::new(1 << (levels - 1), scheme_step)?.points();
        pmfs.extend(half.iter().map(|p| lifted_pmf(levels, p)));
    }
    Ok(ModuloFamily { m, lambda, pmfs })
}

pub fn multilevel_capacity_region(
    levels: u32,
    lambda: f64,
    step: f64,
    scheme_step: f64,
) -> Result<RegionBoundary> {
    closure(&multilevel_capacity_family(
        levels,
        lambda,
        step,
        scheme_step,
    )?)
}

/// Largest distance from an extreme point of `reference` to `scheme`.
pub fn gap(reference: &RegionBoundary, scheme: &RegionBoundary) -> Result<f64> {
    Ok(excess(reference, scheme)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FigureOptions {
    /// Grid step for the capacity region; per-figure default when `None`.
    pub step: Option<f64>,
    /// Grid step for the simple-scheme regions of the multi-level figures.
    pub scheme_step: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Figure {
    pub name: String,
    pub series: Vec<(String, RegionBoundary)>,
}

/// Grid steps used by default: 0.01 for the single-level figure, 0.05 for
/// the multi-level capacity regions and 0.02 for the scheme regions.
pub fn figure(name: &str, opts: FigureOptions) -> Result<Figure> {
    let series = match name {
        "fig8" => vec![(
            "capacity".to_string(),
            modulo_capacity_region(2, 0.5, opts.step.unwrap_or(0.01))?,
        )],
        "fig9a" | "fig9b" => {
            let levels = if name == "fig9a" { 2 } else { 3 };
            let step = opts.step.unwrap_or(0.05);
            let scheme_step = opts.scheme_step.unwrap_or(0.02);
            vec![
                (
                    "capacity".to_string(),
                    multilevel_capacity_region(levels, 0.5, step, scheme_step)?,
                ),
                (
                    "separation".to_string(),
                    separation_region(levels, scheme_step)?,
                ),
                (
                    "communicate-state".to_string(),
                    communicate_state_region(levels, scheme_step)?,
                ),
            ]
        }
        other => return Err(FigureError::UnknownFigure(other.to_string())),
    };
    Ok(Figure {
        name: name.to_string(),
        series,
    })
}
