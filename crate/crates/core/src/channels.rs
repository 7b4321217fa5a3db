//! Finite channel models: the injective deterministic state-dependent
//! Z-interference channel, its modulo-additive special case, the cribbing
//! variants, and the general two-user DM interference channel.
//!
//! Channels are stored as explicit lookup tables so arbitrary models can be
//! loaded from JSON.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::prob::{random_probs, Alphabet, Kernel, Pmf, PmfJson, ProbError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("map `{map}` has {got} entries, expected {expected}")]
    TableSize {
        map: String,
        expected: usize,
        got: usize,
    },
    #[error("map `{map}` outputs {value}, outside an alphabet of size {size}")]
    OutputRange {
        map: String,
        value: usize,
        size: usize,
    },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("missing alphabet `{0}`")]
    MissingAlphabet(String),
    #[error(transparent)]
    Prob(#[from] ProbError),
    #[error("channel is not injective: {0}")]
    NotInjective(InjectivityViolation),
}

pub type Result<T> = std::result::Result<T, ChannelError>;

/// Dense table for a deterministic map over a product of finite inputs,
/// indexed row-major (last input fastest).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapTable {
    input_sizes: Vec<usize>,
    output_size: usize,
    table: Vec<usize>,
}

impl MapTable {
    pub fn new(
        name: &str,
        input_sizes: Vec<usize>,
        output_size: usize,
        table: Vec<usize>,
    ) -> Result<Self> {
        let expected: usize = input_sizes.iter().product();
        if table.len() != expected {
            return Err(ChannelError::TableSize {
                map: name.to_string(),
                expected,
                got: table.len(),
            });
        }
        if let Some(&value) = table.iter().find(|&&v| v >= output_size) {
            return Err(ChannelError::OutputRange {
                map: name.to_string(),
                value,
                size: output_size,
            });
        }
        Ok(Self {
            input_sizes,
            output_size,
            table,
        })
    }

    pub fn from_fn(
        input_sizes: Vec<usize>,
        output_size: usize,
        f: impl Fn(&[usize]) -> usize,
    ) -> Self {
        let total: usize = input_sizes.iter().product();
        let mut digits = vec![0usize; input_sizes.len()];
        let mut table = Vec::with_capacity(total);
        for _ in 0..total {
            let v = f(&digits);
            assert!(v < output_size, "map output out of range");
            table.push(v);
            for k in (0..digits.len()).rev() {
                digits[k] += 1;
                if digits[k] < input_sizes[k] {
                    break;
                }
                digits[k] = 0;
            }
        }
        Self {
            input_sizes,
            output_size,
            table,
        }
    }

    pub fn get(&self, inputs: &[usize]) -> usize {
        let mut flat = 0;
        for (&i, &n) in inputs.iter().zip(&self.input_sizes) {
            flat = flat * n + i;
        }
        self.table[flat]
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn input_sizes(&self) -> &[usize] {
        &self.input_sizes
    }

    pub fn output_size(&self) -> usize {
        self.output_size
    }
}

/// Two interference values that collide at receiver 2 for the same `x2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InjectivityViolation {
    pub x2: usize,
    pub t1_a: usize,
    pub t1_b: usize,
    pub y2: usize,
}

impl std::fmt::Display for InjectivityViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "y2(x2={}, t1={}) = y2(x2={}, t1={}) = {}",
            self.x2, self.t1_a, self.x2, self.t1_b, self.y2
        )
    }
}

/// First `(x2, t1, t1')` with `y2(x2, t1) = y2(x2, t1')`, scanning `x2`
/// then `t1` in index order. `y2_map` is indexed `(x2, t1)`.
pub fn injectivity_violation(y2_map: &MapTable) -> Option<InjectivityViolation> {
    let (nx2, nt1) = (y2_map.input_sizes[0], y2_map.input_sizes[1]);
    for x2 in 0..nx2 {
        let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
        for t1 in 0..nt1 {
            let y2 = y2_map.get(&[x2, t1]);
            if let Some(&t1_a) = seen.get(&y2) {
                return Some(InjectivityViolation {
                    x2,
                    t1_a,
                    t1_b: t1,
                    y2,
                });
            }
            seen.insert(y2, t1);
        }
    }
    None
}

/// Models whose receiver-2 output must be injective in the interference.
pub trait InjectiveInterference {
    fn y2_map(&self) -> &MapTable;

    fn check_injectivity(&self) -> Option<InjectivityViolation> {
        injectivity_violation(self.y2_map())
    }

    fn is_injective(&self) -> bool {
        self.check_injectivity().is_none()
    }

    fn require_injective(&self) -> Result<()> {
        match self.check_injectivity() {
            Some(w) => Err(ChannelError::NotInjective(w)),
            None => Ok(()),
        }
    }
}

/// Injective deterministic state-dependent Z-interference channel:
/// `y1(x1,s)`, `t1(x1,s)`, `y2(x2,t1)` with state law `p(s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeterministicSdzic {
    pub x1: Alphabet,
    pub x2: Alphabet,
    pub s: Alphabet,
    pub t1: Alphabet,
    pub y1: Alphabet,
    pub y2: Alphabet,
    y1_map: MapTable,
    t1_map: MapTable,
    y2_map: MapTable,
    state: Pmf,
}

impl DeterministicSdzic {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        x1: Alphabet,
        x2: Alphabet,
        t1: Alphabet,
        y1: Alphabet,
        y2: Alphabet,
        state: Pmf,
        y1_table: Vec<usize>,
        t1_table: Vec<usize>,
        y2_table: Vec<usize>,
    ) -> Result<Self> {
        let s = state.alphabet().renamed("S");
        let y1_map = MapTable::new("y1", vec![x1.len(), s.len()], y1.len(), y1_table)?;
        let t1_map = MapTable::new("t1", vec![x1.len(), s.len()], t1.len(), t1_table)?;
        let y2_map = MapTable::new("y2", vec![x2.len(), t1.len()], y2.len(), y2_table)?;
        Ok(Self {
            x1,
            x2,
            s,
            t1,
            y1,
            y2,
            y1_map,
            t1_map,
            y2_map,
            state,
        })
    }

    pub fn state(&self) -> &Pmf {
        &self.state
    }

    pub fn y1_map(&self) -> &MapTable {
        &self.y1_map
    }

    pub fn t1_map(&self) -> &MapTable {
        &self.t1_map
    }

    /// Same maps with a different state law over the same state alphabet.
    pub fn with_state(&self, state: Pmf) -> Result<Self> {
        if state.len() != self.s.len() {
            return Err(ChannelError::Parameter(format!(
                "state law has {} symbols, channel has {}",
                state.len(),
                self.s.len()
            )));
        }
        let mut c = self.clone();
        c.state = state;
        Ok(c)
    }

    /// Kernels `p(y1|x1,s)` and `p(y2|x1,x2,s)` of the channel, for use with
    /// general (auxiliary-variable) evaluators.
    pub fn output_kernels(&self) -> (Kernel, Kernel) {
        let y1 = Kernel::deterministic("Y1", self.y1.clone(), &["X1", "S"], self.y1_map.table());
        let y2_table = MapTable::from_fn(
            vec![self.x1.len(), self.x2.len(), self.s.len()],
            self.y2.len(),
            |d| self.y2_map.get(&[d[1], self.t1_map.get(&[d[0], d[2]])]),
        );
        let y2 = Kernel::deterministic("Y2", self.y2.clone(), &["X1", "X2", "S"], y2_table.table());
        (y1, y2)
    }
}

impl InjectiveInterference for DeterministicSdzic {
    fn y2_map(&self) -> &MapTable {
        &self.y2_map
    }
}

/// Modulo-additive S-D Z-IC with `levels` parallel `m`-ary levels sharing one
/// Bernoulli(`lambda`) state: `Y1 = X1`, `Y2 = X2 ⊕ (S·X1)` per level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModuloAdditiveSdzic {
    pub m: usize,
    pub levels: u32,
    pub lambda: f64,
}

impl ModuloAdditiveSdzic {
    pub fn new(m: usize, levels: u32, lambda: f64) -> Result<Self> {
        if m < 2 {
            return Err(ChannelError::Parameter(format!(
                "base alphabet size {m} < 2"
            )));
        }
        if levels < 1 {
            return Err(ChannelError::Parameter("need at least one level".into()));
        }
        if !(0.0..=1.0).contains(&lambda) {
            return Err(ChannelError::Parameter(format!(
                "lambda {lambda} outside [0,1]"
            )));
        }
        let size = (m as u64).checked_pow(levels).filter(|&s| s <= 1 << 16);
        if size.is_none() {
            return Err(ChannelError::Parameter(format!(
                "m^L = {m}^{levels} too large"
            )));
        }
        Ok(Self { m, levels, lambda })
    }

    pub fn alphabet_size(&self) -> usize {
        self.m.pow(self.levels)
    }

    /// Per-level modulo-`m` addition of two symbols written in base `m`.
    pub fn add(&self, a: usize, b: usize) -> usize {
        let (mut a, mut b, mut place, mut out) = (a, b, 1, 0);
        for _ in 0..self.levels {
            out += ((a % self.m + b % self.m) % self.m) * place;
            a /= self.m;
            b /= self.m;
            place *= self.m;
        }
        out
    }

    pub fn expand(&self) -> DeterministicSdzic {
        let n = self.alphabet_size();
        let x = |name: &str| Alphabet::indexed(name, n);
        let state = Pmf::new(
            Alphabet::indexed("S", 2),
            vec![1.0 - self.lambda, self.lambda],
        )
        .expect("lambda validated");
        let y1 = MapTable::from_fn(vec![n, 2], n, |d| d[0]);
        let t1 = MapTable::from_fn(vec![n, 2], n, |d| if d[1] == 1 { d[0] } else { 0 });
        let y2 = MapTable::from_fn(vec![n, n], n, |d| self.add(d[0], d[1]));
        DeterministicSdzic {
            x1: x("X1"),
            x2: x("X2"),
            s: Alphabet::indexed("S", 2),
            t1: x("T1"),
            y1: x("Y1"),
            y2: x("Y2"),
            y1_map: y1,
            t1_map: t1,
            y2_map: y2,
            state,
        }
    }
}

/// Validated expansion of the modulo-additive model into lookup tables.
pub fn expand_modulo(m: usize, levels: u32, lambda: f64) -> Result<DeterministicSdzic> {
    Ok(ModuloAdditiveSdzic::new(m, levels, lambda)?.expand())
}

/// Injective deterministic Z-IC where encoder 1 cribs `z2(x2)` strictly
/// causally: `y1(x1)`, `t1(x1)`, `y2(x2,t1)`, `z2(x2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CribbingZic {
    pub x1: Alphabet,
    pub x2: Alphabet,
    pub t1: Alphabet,
    pub y1: Alphabet,
    pub y2: Alphabet,
    pub z2: Alphabet,
    y1_map: MapTable,
    t1_map: MapTable,
    y2_map: MapTable,
    z2_map: MapTable,
}

impl CribbingZic {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        x1: Alphabet,
        x2: Alphabet,
        t1: Alphabet,
        y1: Alphabet,
        y2: Alphabet,
        z2: Alphabet,
        y1_table: Vec<usize>,
        t1_table: Vec<usize>,
        y2_table: Vec<usize>,
        z2_table: Vec<usize>,
    ) -> Result<Self> {
        Ok(Self {
            y1_map: MapTable::new("y1", vec![x1.len()], y1.len(), y1_table)?,
            t1_map: MapTable::new("t1", vec![x1.len()], t1.len(), t1_table)?,
            y2_map: MapTable::new("y2", vec![x2.len(), t1.len()], y2.len(), y2_table)?,
            z2_map: MapTable::new("z2", vec![x2.len()], z2.len(), z2_table)?,
            x1,
            x2,
            t1,
            y1,
            y2,
            z2,
        })
    }

    pub fn y1_map(&self) -> &MapTable {
        &self.y1_map
    }

    pub fn t1_map(&self) -> &MapTable {
        &self.t1_map
    }

    pub fn z2_map(&self) -> &MapTable {
        &self.z2_map
    }

    /// The same channel seen as a state-cribbing channel with a constant state.
    pub fn with_constant_state(&self) -> StateCribbingZic {
        let s = Alphabet::indexed("S", 1);
        StateCribbingZic {
            x1: self.x1.clone(),
            x2: self.x2.clone(),
            s: s.clone(),
            t1: self.t1.clone(),
            y1: self.y1.clone(),
            y2: self.y2.clone(),
            z2: self.z2.clone(),
            y1_map: MapTable::from_fn(vec![self.x1.len(), 1], self.y1.len(), |d| {
                self.y1_map.get(&[d[0]])
            }),
            t1_map: MapTable::from_fn(vec![self.x1.len(), 1], self.t1.len(), |d| {
                self.t1_map.get(&[d[0]])
            }),
            y2_map: self.y2_map.clone(),
            z2_map: self.z2_map.clone(),
            state: Pmf::point_mass(s, 0),
        }
    }
}

impl InjectiveInterference for CribbingZic {
    fn y2_map(&self) -> &MapTable {
        &self.y2_map
    }
}

/// State-dependent injective deterministic Z-IC with unidirectional partial
/// cribbing: `y1(x1,s)`, `t1(x1,s)`, `y2(x2,t1)`, `z2(x2)`, state law `p(s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateCribbingZic {
    pub x1: Alphabet,
    pub x2: Alphabet,
    pub s: Alphabet,
    pub t1: Alphabet,
    pub y1: Alphabet,
    pub y2: Alphabet,
    pub z2: Alphabet,
    y1_map: MapTable,
    t1_map: MapTable,
    y2_map: MapTable,
    z2_map: MapTable,
    state: Pmf,
}

impl StateCribbingZic {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        x1: Alphabet,
        x2: Alphabet,
        t1: Alphabet,
        y1: Alphabet,
        y2: Alphabet,
        z2: Alphabet,
        state: Pmf,
        y1_table: Vec<usize>,
        t1_table: Vec<usize>,
        y2_table: Vec<usize>,
        z2_table: Vec<usize>,
    ) -> Result<Self> {
        let s = state.alphabet().renamed("S");
        Ok(Self {
            y1_map: MapTable::new("y1", vec![x1.len(), s.len()], y1.len(), y1_table)?,
            t1_map: MapTable::new("t1", vec![x1.len(), s.len()], t1.len(), t1_table)?,
            y2_map: MapTable::new("y2", vec![x2.len(), t1.len()], y2.len(), y2_table)?,
            z2_map: MapTable::new("z2", vec![x2.len()], z2.len(), z2_table)?,
            x1,
            x2,
            s,
            t1,
            y1,
            y2,
            z2,
            state,
        })
    }

    /// Attach a cribbing link `z2(x2)` to a state-dependent channel.
    pub fn from_sdzic(
        channel: &DeterministicSdzic,
        z2: Alphabet,
        z2_table: Vec<usize>,
    ) -> Result<Self> {
        Ok(Self {
            z2_map: MapTable::new("z2", vec![channel.x2.len()], z2.len(), z2_table)?,
            x1: channel.x1.clone(),
            x2: channel.x2.clone(),
            s: channel.s.clone(),
            t1: channel.t1.clone(),
            y1: channel.y1.clone(),
            y2: channel.y2.clone(),
            z2,
            y1_map: channel.y1_map.clone(),
            t1_map: channel.t1_map.clone(),
            y2_map: channel.y2_map.clone(),
            state: channel.state.clone(),
        })
    }

    pub fn state(&self) -> &Pmf {
        &self.state
    }

    pub fn y1_map(&self) -> &MapTable {
        &self.y1_map
    }

    pub fn t1_map(&self) -> &MapTable {
        &self.t1_map
    }

    pub fn z2_map(&self) -> &MapTable {
        &self.z2_map
    }
}

impl InjectiveInterference for StateCribbingZic {
    fn y2_map(&self) -> &MapTable {
        &self.y2_map
    }
}

/// Two-user discrete memoryless interference channel `p(y1,y2|x1,x2)`.
/// `rows[x1 * |X2| + x2]` is a pmf over `(y1, y2)` row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralDmic {
    pub x1: Alphabet,
    pub x2: Alphabet,
    pub y1: Alphabet,
    pub y2: Alphabet,
    rows: Vec<Vec<f64>>,
}

impl GeneralDmic {
    pub fn new(
        x1: Alphabet,
        x2: Alphabet,
        y1: Alphabet,
        y2: Alphabet,
        rows: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if rows.len() != x1.len() * x2.len() {
            return Err(ChannelError::TableSize {
                map: "p(y1,y2|x1,x2)".into(),
                expected: x1.len() * x2.len(),
                got: rows.len(),
            });
        }
        for row in &rows {
            if row.len() != y1.len() * y2.len() {
                return Err(ChannelError::TableSize {
                    map: "p(y1,y2|x1,x2) row".into(),
                    expected: y1.len() * y2.len(),
                    got: row.len(),
                });
            }
            Pmf::from_probs(row.clone())?;
        }
        Ok(Self {
            x1,
            x2,
            y1,
            y2,
            rows,
        })
    }

    /// A DM-IC whose transition rows are independent flat Dirichlet draws.
    pub fn random<R: rand::Rng + ?Sized>(
        rng: &mut R,
        x1: usize,
        x2: usize,
        y1: usize,
        y2: usize,
    ) -> Self {
        let rows = (0..x1 * x2).map(|_| random_probs(rng, y1 * y2)).collect();
        Self::new(
            Alphabet::indexed("X1", x1),
            Alphabet::indexed("X2", x2),
            Alphabet::indexed("Y1", y1),
            Alphabet::indexed("Y2", y2),
            rows,
        )
        .expect("dirichlet rows are normalized")
    }

    /// Deterministic DM-IC with `y1 = f1(x1,x2)` and `y2 = f2(x1,x2)`.
    pub fn deterministic(
        x1: Alphabet,
        x2: Alphabet,
        y1: Alphabet,
        y2: Alphabet,
        f1: impl Fn(usize, usize) -> usize,
        f2: impl Fn(usize, usize) -> usize,
    ) -> Result<Self> {
        let mut rows = Vec::with_capacity(x1.len() * x2.len());
        for a in 0..x1.len() {
            for b in 0..x2.len() {
                let mut row = vec![0.0; y1.len() * y2.len()];
                row[f1(a, b) * y2.len() + f2(a, b)] = 1.0;
                rows.push(row);
            }
        }
        Self::new(x1, x2, y1, y2, rows)
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn kernel(&self) -> Kernel {
        use crate::prob::Axis;
        Kernel::joint(
            vec![
                Axis {
                    name: "Y1".into(),
                    alphabet: self.y1.clone(),
                },
                Axis {
                    name: "Y2".into(),
                    alphabet: self.y2.clone(),
                },
            ],
            vec!["X1".into(), "X2".into()],
            self.rows.clone(),
        )
        .expect("rows validated at construction")
    }
}

/// JSON channel file. Alphabets are symbol lists; maps are dense output-index
/// tables indexed row-major by input tuple; the state law is inline.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ChannelFile {
    /// Maps: `y1`, `t1` over `(X1, S)`; `y2` over `(X2, T1)`.
    DeterministicSdzic {
        alphabets: BTreeMap<String, Vec<String>>,
        maps: BTreeMap<String, Vec<usize>>,
        state: PmfJson,
    },
    Modulo {
        m: usize,
        levels: u32,
        lambda: f64,
    },
    /// Maps: `y1`, `t1` over `X1`; `y2` over `(X2, T1)`; `z2` over `X2`.
    Cribbing {
        alphabets: BTreeMap<String, Vec<String>>,
        maps: BTreeMap<String, Vec<usize>>,
    },
    /// Maps: `y1`, `t1` over `(X1, S)`; `y2` over `(X2, T1)`; `z2` over `X2`.
    StateCribbing {
        alphabets: BTreeMap<String, Vec<String>>,
        maps: BTreeMap<String, Vec<usize>>,
        state: PmfJson,
    },
    /// `rows[x1 * |X2| + x2]` is `p(y1, y2 | x1, x2)` flattened row-major.
    GeneralDmic {
        alphabets: BTreeMap<String, Vec<String>>,
        rows: Vec<Vec<f64>>,
    },
}

/// A parsed channel of any supported kind.
#[derive(Debug, Clone, PartialEq)]
pub enum Channel {
    Sdzic(DeterministicSdzic),
    Modulo(ModuloAdditiveSdzic),
    Cribbing(CribbingZic),
    StateCribbing(StateCribbingZic),
    General(GeneralDmic),
}

impl Channel {
    pub fn kind(&self) -> &'static str {
        match self {
            Channel::Sdzic(_) => "deterministic-sdzic",
            Channel::Modulo(_) => "modulo",
            Channel::Cribbing(_) => "cribbing",
            Channel::StateCribbing(_) => "state-cribbing",
            Channel::General(_) => "general-dmic",
        }
    }
}

fn alphabet(map: &BTreeMap<String, Vec<String>>, name: &str) -> Result<Alphabet> {
    let symbols = map
        .get(name)
        .ok_or_else(|| ChannelError::MissingAlphabet(name.to_string()))?;
    Ok(Alphabet::new(name, symbols.clone())?)
}

fn table(map: &BTreeMap<String, Vec<usize>>, name: &str) -> Result<Vec<usize>> {
    map.get(name)
        .cloned()
        .ok_or_else(|| ChannelError::Parameter(format!("missing map `{name}`")))
}

impl ChannelFile {
    pub fn into_channel(self) -> Result<Channel> {
        Ok(match self {
            ChannelFile::DeterministicSdzic {
                alphabets,
                maps,
                state,
            } => Channel::Sdzic(DeterministicSdzic::new(
                alphabet(&alphabets, "X1")?,
                alphabet(&alphabets, "X2")?,
                alphabet(&alphabets, "T1")?,
                alphabet(&alphabets, "Y1")?,
                alphabet(&alphabets, "Y2")?,
                Pmf::try_from(state)?,
                table(&maps, "y1")?,
                table(&maps, "t1")?,
                table(&maps, "y2")?,
            )?),
            ChannelFile::Modulo { m, levels, lambda } => {
                Channel::Modulo(ModuloAdditiveSdzic::new(m, levels, lambda)?)
            }
            ChannelFile::Cribbing { alphabets, maps } => Channel::Cribbing(CribbingZic::new(
                alphabet(&alphabets, "X1")?,
                alphabet(&alphabets, "X2")?,
                alphabet(&alphabets, "T1")?,
                alphabet(&alphabets, "Y1")?,
                alphabet(&alphabets, "Y2")?,
                alphabet(&alphabets, "Z2")?,
                table(&maps, "y1")?,
                table(&maps, "t1")?,
                table(&maps, "y2")?,
                table(&maps, "z2")?,
            )?),
            ChannelFile::StateCribbing {
                alphabets,
                maps,
                state,
            } => Channel::StateCribbing(StateCribbingZic::new(
                alphabet(&alphabets, "X1")?,
                alphabet(&alphabets, "X2")?,
                alphabet(&alphabets, "T1")?,
                alphabet(&alphabets, "Y1")?,
                alphabet(&alphabets, "Y2")?,
                alphabet(&alphabets, "Z2")?,
                Pmf::try_from(state)?,
                table(&maps, "y1")?,
                table(&maps, "t1")?,
                table(&maps, "y2")?,
                table(&maps, "z2")?,
            )?),
            ChannelFile::GeneralDmic { alphabets, rows } => Channel::General(GeneralDmic::new(
                alphabet(&alphabets, "X1")?,
                alphabet(&alphabets, "X2")?,
                alphabet(&alphabets, "Y1")?,
                alphabet(&alphabets, "Y2")?,
                rows,
            )?),
        })
    }

    pub fn from_sdzic(c: &DeterministicSdzic) -> Self {
        let mut alphabets = BTreeMap::new();
        for a in [&c.x1, &c.x2, &c.t1, &c.y1, &c.y2] {
            alphabets.insert(a.name().to_string(), a.symbols().to_vec());
        }
        let mut maps = BTreeMap::new();
        maps.insert("y1".into(), c.y1_map.table().to_vec());
        maps.insert("t1".into(), c.t1_map.table().to_vec());
        maps.insert("y2".into(), c.y2_map.table().to_vec());
        ChannelFile::DeterministicSdzic {
            alphabets,
            maps,
            state: c.state.clone().into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modulo_models_are_injective() {
        assert!(expand_modulo(2, 1, 0.5).unwrap().is_injective());
        assert!(expand_modulo(2, 3, 0.5).unwrap().is_injective());
        assert!(expand_modulo(3, 2, 0.3).unwrap().is_injective());
    }

    #[test]
    fn ignoring_interference_is_not_injective() {
        let c = DeterministicSdzic::new(
            Alphabet::indexed("X1", 2),
            Alphabet::indexed("X2", 2),
            Alphabet::indexed("T1", 2),
            Alphabet::indexed("Y1", 2),
            Alphabet::indexed("Y2", 2),
            Pmf::uniform(Alphabet::indexed("S", 2)),
            vec![0, 0, 1, 1],
            vec![0, 0, 0, 1],
            // y2(x2, t1) = x2
            vec![0, 0, 1, 1],
        )
        .unwrap();
        let w = c.check_injectivity().unwrap();
        assert_eq!(
            w,
            InjectivityViolation {
                x2: 0,
                t1_a: 0,
                t1_b: 1,
                y2: 0
            }
        );
        assert!(matches!(
            c.require_injective(),
            Err(ChannelError::NotInjective(_))
        ));
    }

    #[test]
    fn binary_modulo_expansion() {
        let c = expand_modulo(2, 1, 0.5).unwrap();
        assert_eq!(c.state().probs(), &[0.5, 0.5]);
        assert_eq!(c.x1.len(), 2);
        // y2 = x2 xor (s·x1)
        for x1 in 0..2 {
            for x2 in 0..2 {
                for s in 0..2 {
                    let t1 = c.t1_map().get(&[x1, s]);
                    assert_eq!(c.y2_map().get(&[x2, t1]), x2 ^ (s & x1));
                    assert_eq!(c.y1_map().get(&[x1, s]), x1);
                }
            }
        }
    }

    #[test]
    fn zero_lambda_means_no_interference() {
        let c = expand_modulo(2, 1, 0.0).unwrap();
        assert_eq!(c.state().probs(), &[1.0, 0.0]);
        for x1 in 0..2 {
            assert_eq!(c.t1_map().get(&[x1, 0]), 0);
            for x2 in 0..2 {
                assert_eq!(c.y2_map().get(&[x2, c.t1_map().get(&[x1, 0])]), x2);
            }
        }
    }

    #[test]
    fn two_level_table_matches_per_level_xor() {
        let c = expand_modulo(2, 2, 0.5).unwrap();
        assert_eq!(c.x1.len(), 4);
        // exhaustive check against bitwise XOR gated by the single shared state
        for x1 in 0..4 {
            for x2 in 0..4 {
                for s in 0..2 {
                    let gated = if s == 1 { x1 } else { 0 };
                    let t1 = c.t1_map().get(&[x1, s]);
                    assert_eq!(t1, gated);
                    assert_eq!(c.y2_map().get(&[x2, t1]), x2 ^ gated);
                }
            }
        }
    }

    #[test]
    fn invalid_modulo_parameters() {
        assert!(expand_modulo(1, 1, 0.5).is_err());
        assert!(expand_modulo(2, 0, 0.5).is_err());
        assert!(expand_modulo(2, 1, 1.5).is_err());
        assert!(expand_modulo(2, 1, -0.1).is_err());
    }

    #[test]
    fn maps_are_total_and_in_range() {
        assert!(matches!(
            MapTable::new("f", vec![2, 2], 2, vec![0, 1, 0]),
            Err(ChannelError::TableSize { .. })
        ));
        assert!(matches!(
            MapTable::new("f", vec![2], 2, vec![0, 2]),
            Err(ChannelError::OutputRange { .. })
        ));
    }

    #[test]
    fn channel_file_roundtrip() {
        let c = expand_modulo(3, 1, 0.25).unwrap();
        let text = serde_json::to_string(&ChannelFile::from_sdzic(&c)).unwrap();
        let parsed: ChannelFile = serde_json::from_str(&text).unwrap();
        match parsed.into_channel().unwrap() {
            Channel::Sdzic(back) => {
                assert_eq!(back.y1_map(), c.y1_map());
                assert_eq!(back.t1_map(), c.t1_map());
                assert_eq!(back.y2_map(), c.y2_map());
                assert_eq!(back.state().probs(), c.state().probs());
            }
            other => panic!("unexpected {}", other.kind()),
        }
    }

    #[test]
    fn modulo_file() {
        let f: ChannelFile =
            serde_json::from_str(r#"{"kind":"modulo","m":2,"levels":2,"lambda":0.5}"#).unwrap();
        assert_eq!(f.into_channel().unwrap().kind(), "modulo");
    }
}
