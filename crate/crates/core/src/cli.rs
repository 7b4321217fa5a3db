//! Command-line front end. Every subcommand computes its full output before
//! touching the filesystem, so invalid input never leaves partial files.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use crate::channels::{Channel, ChannelFile, DeterministicSdzic, ModuloAdditiveSdzic};
use crate::figures::{
    closure, describe_slice, figure, gap, multilevel_capacity_family, CommunicateStateFamily,
    CribbingFamily, DetFamily, DetRegion, FigureOptions, HkFamily, ModuloFamily, SeparationFamily,
    SliceFamily, StateCribbingFamily,
};
use crate::fm::LinearInequalitySystem;
use crate::geometry::{boundary_csv, boundary_json, max_weighted_sum, RegionBoundary};
use crate::prover::{
    certificate_residual, check_numeric, check_ray, Query, SamplerRegistry, Verdict,
};
use crate::regions::default_w_cap;
use crate::sim::{analytic_error, rate_sweep, sweep_csv, SimConfig};

/// Exit code for a negative semantic verdict (an unprovable inequality).
pub const EXIT_NEGATIVE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "icregion",
    version,
    about = "Rate regions of interference channels with state and cribbing"
)]
pub struct Cli {
    /// Numerical slack for redundancy and numeric checks.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tolerance: f64,
    /// Simplex grid step for input laws (must divide 1).
    #[arg(long, global = true)]
    pub grid_step: Option<f64>,
    /// Seed for randomized subcommands.
    #[arg(long, global = true, default_value_t = 7)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Theorem {
    /// Closed-form capacity of the modulo-additive channel.
    Modulo,
    /// Capacity of an injective deterministic S-D Z-IC.
    DetCap,
    /// Capacity of the Z-channel extension (R1, R21, R2).
    Zchannel,
    /// Gelfand-Pinsker with interference treated as noise.
    InnerNoise,
    /// HK region of a general DM-IC.
    Hk,
    /// Partial-cribbing capacity.
    Cribbing,
    /// State-dependent cribbing capacity.
    StateCribbing,
    /// Level-by-level coding on the multi-level binary channel.
    Separation,
    /// One level reserved for the state on the multi-level binary channel.
    CommunicateState,
    /// Capacity of the multi-level binary channel.
    Multilevel,
}

impl Theorem {
    pub fn name(self) -> String {
        self.to_possible_value()
            .map(|v| v.get_name().to_string())
            .unwrap_or_default()
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convex closure of a rate region over a grid of input laws.
    Region {
        /// Channel file (JSON); optional for the modulo and multi-level theorems.
        channel: Option<PathBuf>,
        #[arg(long, value_enum)]
        theorem: Theorem,
        /// Base alphabet size of the modulo channel.
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        levels: u32,
        #[arg(long, default_value_t = 0.5)]
        lambda: f64,
        #[arg(long, default_value_t = 2)]
        u1: usize,
        #[arg(long, default_value_t = 2)]
        u2: usize,
        /// Size of the cooperation auxiliary W.
        #[arg(long, default_value_t = 1)]
        w_size: usize,
        /// Cap on |W| for the state-dependent cribbing region (default |Y2|+3).
        #[arg(long)]
        w_cap: Option<usize>,
        /// Output prefix: writes PREFIX.csv and PREFIX.json. Prints CSV when absent.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Emit the boundaries of a named figure as CSV files.
    Figure {
        /// fig8, fig9a or fig9b.
        name: String,
        /// Grid step for the simple-scheme regions of fig9a/fig9b.
        #[arg(long)]
        scheme_step: Option<f64>,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Fourier-Motzkin elimination on a linear inequality file.
    Fm {
        file: PathBuf,
        /// Comma-separated variables to eliminate, in order.
        #[arg(long, value_delimiter = ',')]
        eliminate: Vec<String>,
        /// Skip redundancy removal.
        #[arg(long)]
        no_reduce: bool,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Decide a Shannon-type inequality query (exit 0 provable, 2 not).
    Prove {
        query: PathBuf,
        /// Also evaluate the target on this many sampled distributions.
        #[arg(long, default_value_t = 0)]
        check: usize,
    },
    /// Monte-Carlo simulation of stuck-at multicoding.
    Simulate {
        /// Blocklengths (comma-separated for a sweep).
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<u32>,
        /// Message rates (comma-separated for a sweep).
        #[arg(long, value_delimiter = ',', required = true)]
        r1: Vec<f64>,
        #[arg(long)]
        r1p: f64,
        #[arg(long)]
        lambda: f64,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

/// Parse arguments and run; returns the process exit code. Usage errors
/// exit 1, `--help` and `--version` exit 0.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(stdout, "{text}")
            } else {
                write!(stderr, "{text}")
            };
            return code;
        }
    };
    match run(&cli, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e:#}");
            1
        }
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::Region { .. } => region(cli, out),
        Command::Figure {
            name,
            scheme_step,
            out_dir,
        } => figure_cmd(cli, name, *scheme_step, out_dir, out),
        Command::Fm {
            file,
            eliminate,
            no_reduce,
            out: dest,
        } => fm_cmd(cli, file, eliminate, *no_reduce, dest.as_deref(), out),
        Command::Prove { query, check } => prove_cmd(cli, query, *check, out),
        Command::Simulate {
            n,
            r1,
            r1p,
            lambda,
            trials,
            out: dest,
        } => {
            let base = SimConfig {
                n: n[0],
                r1: r1[0],
                r1p: *r1p,
                lambda: *lambda,
                trials: *trials,
                seed: cli.seed,
            };
            let rows = if n.len() == 1 && r1.len() == 1 {
                let result = crate::sim::simulate(&base)?;
                vec![crate::sim::SweepRow {
                    config: base,
                    result,
                    analytic: analytic_error(&base)?,
                }]
            } else {
                rate_sweep(&base, n, r1)?
            };
            emit(dest.as_deref(), &sweep_csv(&rows), out)?;
            Ok(0)
        }
    }
}

fn emit(dest: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<()> {
    match dest {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => Ok(out.write_all(text.as_bytes())?),
    }
}

fn load_channel(path: Option<&Path>) -> Result<Option<Channel>> {
    let Some(path) = path else { return Ok(None) };
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file: ChannelFile =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok(Some(file.into_channel()?))
}

fn sdzic_of(channel: Option<Channel>, theorem: Theorem) -> Result<DeterministicSdzic> {
    match channel {
        Some(Channel::Sdzic(c)) => Ok(c),
        Some(Channel::Modulo(m)) => Ok(m.expand()),
        Some(other) => bail!(
            "theorem {} does not apply to a {} channel",
            theorem.name(),
            other.kind()
        ),
        None => bail!("theorem {} needs a channel file", theorem.name()),
    }
}

fn region(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let Command::Region {
        channel,
        theorem,
        m,
        levels,
        lambda,
        u1,
        u2,
        w_size,
        w_cap,
        out: dest,
    } = &cli.command
    else {
        unreachable!("dispatched on Region")
    };
    let channel = load_channel(channel.as_deref())?;
    let step = cli.grid_step;
    let theorem = *theorem;
    let mismatch = |c: &Channel| {
        anyhow::anyhow!(
            "theorem {} does not apply to a {} channel",
            theorem.name(),
            c.kind()
        )
    };
    // channels borrowed by the family must outlive it
    let sdzic;
    let general;
    let cribbing;
    let state_cribbing;
    let family: Box<dyn SliceFamily + '_>;
    match theorem {
        Theorem::Modulo => {
            let (m, levels, lambda) = match &channel {
                Some(Channel::Modulo(c)) => (c.m, c.levels, c.lambda),
                Some(c) => return Err(mismatch(c)),
                None => (*m, *levels, *lambda),
            };
            let size = ModuloAdditiveSdzic::new(m, levels, lambda)?.alphabet_size();
            family = Box::new(ModuloFamily::grid(size, lambda, step.unwrap_or(0.01))?);
        }
        Theorem::DetCap | Theorem::Zchannel | Theorem::InnerNoise => {
            sdzic = sdzic_of(channel, theorem)?;
            let kind = match theorem {
                Theorem::DetCap => DetRegion::Capacity,
                Theorem::Zchannel => DetRegion::ZChannel,
                _ => DetRegion::InnerNoise,
            };
            family = Box::new(DetFamily::new(&sdzic, kind, step.unwrap_or(0.05))?);
        }
        Theorem::Hk => {
            general = match channel {
                Some(Channel::General(g)) => g,
                Some(c) => return Err(mismatch(&c)),
                None => bail!("theorem hk needs a channel file"),
            };
            family = Box::new(HkFamily::new(&general, *u1, *u2, step.unwrap_or(0.1))?);
        }
        Theorem::Cribbing => {
            cribbing = match channel {
                Some(Channel::Cribbing(c)) => c,
                Some(c) => return Err(mismatch(&c)),
                None => bail!("theorem cribbing needs a channel file"),
            };
            family = Box::new(CribbingFamily::new(
                &cribbing,
                *w_size,
                step.unwrap_or(0.1),
            )?);
        }
        Theorem::StateCribbing => {
            state_cribbing = match channel {
                Some(Channel::StateCribbing(c)) => c,
                Some(c) => return Err(mismatch(&c)),
                None => bail!("theorem state-cribbing needs a channel file"),
            };
            let cap = w_cap.unwrap_or_else(|| default_w_cap(state_cribbing.y2.len()));
            family = Box::new(StateCribbingFamily::new(
                &state_cribbing,
                *w_size,
                cap,
                step.unwrap_or(0.25),
            )?);
        }
        Theorem::Separation => {
            family = Box::new(SeparationFamily::new(*levels, step.unwrap_or(0.02))?);
        }
        Theorem::CommunicateState => {
            family = Box::new(CommunicateStateFamily::new(*levels, step.unwrap_or(0.02))?);
        }
        Theorem::Multilevel => {
            family = Box::new(multilevel_capacity_family(
                *levels,
                *lambda,
                step.unwrap_or(0.05),
                0.02,
            )?);
        }
    }
    let boundary = closure(family.as_ref())?;
    let csv = boundary_csv(&boundary);
    match dest {
        Some(prefix) => {
            let json = boundary_json(&boundary, |i| describe_slice(family.as_ref(), i));
            let text = serde_json::to_string_pretty(&json)?;
            fs::write(prefix.with_extension("csv"), &csv)
                .with_context(|| format!("writing {}.csv", prefix.display()))?;
            fs::write(prefix.with_extension("json"), text + "\n")
                .with_context(|| format!("writing {}.json", prefix.display()))?;
            summarize(&boundary, out)?;
        }
        None => out.write_all(csv.as_bytes())?,
    }
    Ok(0)
}

fn summarize(b: &RegionBoundary, out: &mut dyn Write) -> Result<()> {
    let ones = vec![1.0; b.dim()];
    writeln!(
        out,
        "{} extreme points, max sum-rate {}",
        b.points().len(),
        max_weighted_sum(b, &ones)?
    )?;
    Ok(())
}

fn figure_cmd(
    cli: &Cli,
    name: &str,
    scheme_step: Option<f64>,
    dir: &Path,
    out: &mut dyn Write,
) -> Result<i32> {
    let fig = figure(
        name,
        FigureOptions {
            step: cli.grid_step,
            scheme_step,
        },
    )?;
    let files: Vec<(PathBuf, String)> = fig
        .series
        .iter()
        .map(|(label, b)| {
            (
                dir.join(format!("{}-{label}.csv", fig.name)),
                boundary_csv(b),
            )
        })
        .collect();
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for (path, text) in &files {
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    for (label, b) in &fig.series {
        write!(out, "{label}: ")?;
        summarize(b, out)?;
    }
    if let [(_, cap), (_, sep), (_, comm)] = fig.series.as_slice() {
        writeln!(out, "gap to separation: {}", gap(cap, sep)?)?;
        writeln!(out, "gap to communicate-state: {}", gap(cap, comm)?)?;
    }
    Ok(0)
}

fn fm_cmd(
    cli: &Cli,
    file: &Path,
    eliminate: &[String],
    no_reduce: bool,
    dest: Option<&Path>,
    out: &mut dyn Write,
) -> Result<i32> {
    let text = fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let sys = LinearInequalitySystem::parse(&text)?;
    let names: Vec<&str> = eliminate.iter().map(String::as_str).collect();
    let mut projected = sys.eliminate(&names)?;
    let mut note = String::new();
    if !no_reduce {
        let reduced = projected.remove_redundant_with(cli.tolerance);
        if !reduced.exhaustive {
            note = "# redundancy removal was not exhaustive\n".into();
        }
        projected = reduced.system;
    }
    let body = format!("{note}{}", projected.to_text());
    emit(dest, &body, out)?;
    if dest.is_some() {
        writeln!(out, "{} rows", projected.rows().len())?;
    }
    Ok(0)
}

fn prove_cmd(cli: &Cli, path: &Path, trials: usize, out: &mut dyn Write) -> Result<i32> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let q = Query::parse(&text)?;
    let verdict = q.prove()?;
    let elemental = q.space.elemental();
    let code = match &verdict {
        Verdict::Provable(cert) => {
            writeln!(out, "PROVABLE: {}", q.target_text)?;
            for &(i, l) in &cert.elemental {
                writeln!(out, "  {l:.6} * {} >= 0", elemental[i].label)?;
            }
            for ((label, _), mu) in q.constraints.items().iter().zip(&cert.constraints) {
                if mu.abs() > cli.tolerance {
                    writeln!(out, "  {mu:.6} * [{label}] = 0")?;
                }
            }
            let r = certificate_residual(&q.space, &q.target, &q.constraints, cert);
            writeln!(out, "  residual {r:e}")?;
            0
        }
        Verdict::NotProvable(ray) => {
            let chk = check_ray(&q.space, &q.target, &q.constraints, ray);
            writeln!(out, "NOT PROVABLE: {}", q.target_text)?;
            writeln!(out, "  polymatroid point with target {:.6}:", chk.target)?;
            for (i, h) in ray.h.iter().enumerate() {
                if h.abs() > cli.tolerance {
                    writeln!(out, "  H({}) = {h:.6}", q.space.subset_label(i as u32 + 1))?;
                }
            }
            EXIT_NEGATIVE
        }
    };
    if trials > 0 {
        let report = check_numeric(
            &q.space,
            &q.target,
            &q.constraints,
            trials,
            cli.seed,
            &SamplerRegistry::default(),
        )?;
        writeln!(
            out,
            "numeric check ({} sampler, {} trials): min {:e}, max {:e}",
            report.sampler, report.trials, report.min, report.max
        )?;
        if verdict.is_provable() && report.violation() > cli.tolerance {
            bail!(
                "provable target violated numerically by {:e}",
                report.violation()
            );
        }
    }
    Ok(code)
}
