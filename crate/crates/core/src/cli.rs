//! `spin-corr` command-line front end.
//!
//! Every subcommand writes CSV to stdout or `--output`; a `key=value`
//! manifest goes next to it (`<output>.manifest`) or to `--manifest`.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bethe;
use crate::closedform::{self, MgGroundState};
use crate::correlator::{pure_correlator_with, SignPattern};
use crate::eigensolver::{ground_state_with, LanczosConfig, PureState, DEFAULT_SEED};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::hamiltonian::{ChainSpec, Hamiltonian};
use crate::hierarchy::{self, DepthCertificate};
use crate::output::{emit_csv, Cell, RunManifest, Table};
use crate::scaling::{self, PeakSearch, SweepConfig};

/// Environment variable overriding the number of worker threads.
pub const WORKERS_ENV: &str = "SPIN_CORR_WORKERS";

#[derive(Parser, Debug)]
#[command(name = "spin-corr", version, about = "Formation-probability correlators of spin-1/2 chains")]
struct Cli {
    /// Write CSV here instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    /// Manifest path; defaults to `<output>.manifest` when `--output` is set.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    /// Run every loop sequentially.
    #[arg(long, global = true)]
    serial: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Transverse-field Ising chain (open), alternating correlators vs g.
    Ising(IsingArgs),
    /// XXZ ring, E_N and E_{N-2} vs anisotropy.
    Xxz(XxzArgs),
    /// Four-site XXZ ring at finite temperature (closed form).
    Thermal4(Thermal4Args),
    /// Majumdar-Ghosh ring: closed form against exact diagonalization.
    Mg(MgArgs),
    /// Entanglement and non-locality depth needed to explain a value of E.
    Certify(CertifyArgs),
    /// Peak positions of E_{N/2}(g) and their 1/N extrapolation.
    Scaling(ScalingArgs),
}

#[derive(Args, Debug)]
struct IsingArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1e-3)]
    g_min: f64,
    #[arg(long, default_value_t = 5.0)]
    g_max: f64,
    #[arg(long, default_value_t = 100)]
    steps: usize,
    /// Next-nearest-neighbour coupling K.
    #[arg(long, default_value_t = 0.0)]
    k: f64,
    /// Correlator orders; defaults to 2..=N.
    #[arg(long, value_delimiter = ',')]
    orders: Vec<usize>,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    Ed,
    Bethe,
}

#[derive(Args, Debug)]
struct XxzArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, allow_hyphen_values = true, default_value_t = -0.9)]
    delta_min: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.9)]
    delta_max: f64,
    #[arg(long, default_value_t = 19)]
    steps: usize,
    #[arg(long, value_enum, default_value_t = Method::Ed)]
    method: Method,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
}

#[derive(Args, Debug)]
struct Thermal4Args {
    /// Inverse temperatures, conjugate to the Pauli-matrix Hamiltonian.
    #[arg(long, value_delimiter = ',', default_value = "1,2,5,10")]
    beta_list: Vec<f64>,
    /// `MIN:MAX` range of the anisotropy.
    #[arg(long, allow_hyphen_values = true, default_value = "-1:5")]
    delta_range: String,
    #[arg(long, default_value_t = 121)]
    steps: usize,
    /// Evaluate the printed finite-temperature expression instead.
    #[arg(long)]
    printed: bool,
}

#[derive(Args, Debug)]
struct MgArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
}

#[derive(Args, Debug)]
struct CertifyArgs {
    #[arg(long)]
    value: f64,
    #[arg(long)]
    n: usize,
}

#[derive(Args, Debug)]
struct ScalingArgs {
    #[arg(long, default_value_t = 0.0)]
    k: f64,
    #[arg(long, value_delimiter = ',', default_value = "8,12,16,20")]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 0.2)]
    g_min: f64,
    #[arg(long, default_value_t = 2.0)]
    g_max: f64,
    #[arg(long, default_value_t = 61)]
    points: usize,
    /// Points in the refinement window around the coarse maximum; 0 disables it.
    #[arg(long, default_value_t = 21)]
    refine_points: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

/// Parse `argv` (program name first), run, and return the exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stderr = &mut std::io::stderr();
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Ok(v) = std::env::var(WORKERS_ENV) {
        match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => exec::set_workers(n),
            _ => {
                let _ = writeln!(stderr, "error: {WORKERS_ENV} must be a positive integer, got {v:?}");
                return 2;
            }
        }
    }
    match execute(&cli, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli, log: &mut dyn Write) -> Result<()> {
    let exec = if cli.serial {
        Execution::Serial
    } else {
        Execution::default()
    };
    let started = Instant::now();
    let (name, params, body) = match &cli.command {
        Command::Ising(a) => ("ising", ising_params(a), ising(a, exec, log)?),
        Command::Xxz(a) => ("xxz", xxz_params(a), xxz(a, exec)?),
        Command::Thermal4(a) => ("thermal4", thermal4_params(a), thermal4(a)?),
        Command::Mg(a) => ("mg", mg_params(a), mg(a, exec)?),
        Command::Certify(a) => (
            "certify",
            vec![kv("value", a.value), kv("n", a.n)],
            certify(a)?,
        ),
        Command::Scaling(a) => ("scaling", scaling_params(a), scaling(a, exec, log)?),
    };
    match &cli.output {
        Some(path) => std::fs::write(path, &body)?,
        None => std::io::stdout().lock().write_all(&body)?,
    }
    let manifest_path = cli.manifest.clone().or_else(|| {
        cli.output.as_ref().map(|p| {
            let mut s = p.clone().into_os_string();
            s.push(".manifest");
            PathBuf::from(s)
        })
    });
    if let Some(path) = manifest_path {
        RunManifest {
            subcommand: name.to_owned(),
            parameters: params,
            seed: DEFAULT_SEED,
            version: env!("CARGO_PKG_VERSION").to_owned(),
            wall_time_s: started.elapsed().as_secs_f64(),
        }
        .write_to(&path)?;
    }
    Ok(())
}

fn kv(key: &str, value: impl ToString) -> (String, String) {
    (key.to_owned(), value.to_string())
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn csv(table: &Table) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    emit_csv(table, &mut buf)?;
    Ok(buf)
}

fn grid(lo: f64, hi: f64, steps: usize, what: &str) -> Result<Vec<f64>> {
    if steps == 0 || !lo.is_finite() || !hi.is_finite() || lo > hi || (steps > 1 && lo == hi) {
        return Err(Error::arg(format!("{what} grid needs finite min < max and steps ≥ 1")));
    }
    Ok(if steps == 1 {
        vec![lo]
    } else {
        scaling::linspace(lo, hi, steps)
    })
}

/// Lanczos settings shared by the subcommands: symmetry sector from the
/// model, grid points parallelized outside the solver.
fn solve(h: &Hamiltonian, tol: f64, exec: Execution) -> Result<PureState> {
    let mut cfg = LanczosConfig::new(tol);
    cfg.symmetry = h.natural_symmetry();
    cfg.exec = exec;
    ground_state_with(h, &cfg)
}

fn ising_params(a: &IsingArgs) -> Vec<(String, String)> {
    vec![
        kv("n", a.n),
        kv("g_min", a.g_min),
        kv("g_max", a.g_max),
        kv("steps", a.steps),
        kv("k", a.k),
        kv("orders", join(&a.orders)),
        kv("tol", a.tol),
    ]
}

fn ising(a: &IsingArgs, exec: Execution, log: &mut dyn Write) -> Result<Vec<u8>> {
    let orders: Vec<usize> = if a.orders.is_empty() {
        (2..=a.n).collect()
    } else {
        a.orders.clone()
    };
    let patterns = orders
        .iter()
        .map(|&m| {
            let p = SignPattern::alternating(m)?;
            p.check_fits(a.n)?;
            Ok(p)
        })
        .collect::<Result<Vec<_>>>()?;
    let gs = grid(a.g_min, a.g_max, a.steps, "g")?;
    ChainSpec::ising(a.n, gs[0], a.k)?;
    let rows = exec::map_jobs(exec, &gs, |&g| -> Result<(Vec<f64>, bool)> {
        let h = Hamiltonian::build(ChainSpec::ising(a.n, g, a.k)?, None)?;
        let state = solve(&h, a.tol, Execution::Serial)?;
        let es = patterns
            .iter()
            .map(|p| pure_correlator_with(Execution::Serial, &state, p).map(|c| c.e_value))
            .collect::<Result<Vec<_>>>()?;
        Ok((es, state.is_degenerate()))
    });
    let mut table = Table::new(
        std::iter::once("g".to_owned()).chain(orders.iter().map(|m| format!("E{m}"))),
    );
    for (g, row) in gs.iter().zip(rows) {
        let (es, degenerate) = row?;
        if degenerate {
            let _ = writeln!(log, "warning: ground state is degenerate at g = {g}");
        }
        table.push(std::iter::once(Cell::from(*g)).chain(es.into_iter().map(Cell::from)).collect());
    }
    csv(&table)
}

fn xxz_params(a: &XxzArgs) -> Vec<(String, String)> {
    vec![
        kv("n", a.n),
        kv("delta_min", a.delta_min),
        kv("delta_max", a.delta_max),
        kv("steps", a.steps),
        kv("method", format!("{:?}", a.method).to_lowercase()),
        kv("tol", a.tol),
    ]
}

fn xxz(a: &XxzArgs, exec: Execution) -> Result<Vec<u8>> {
    if !a.n.is_multiple_of(2) || a.n < 4 {
        return Err(Error::arg(format!("XXZ ring needs an even N ≥ 4, got {}", a.n)));
    }
    let deltas = grid(a.delta_min, a.delta_max, a.steps, "Δ")?;
    let rows = exec::map_jobs(exec, &deltas, |&d| -> Result<(f64, f64)> {
        match a.method {
            Method::Bethe => {
                let st = bethe::solve_ground(a.n, d)?;
                Ok((st.e_n()?, st.e_n_minus_2()?))
            }
            Method::Ed => {
                let h = Hamiltonian::build(ChainSpec::xxz(a.n, d)?, Some(a.n / 2))?;
                let state = solve(&h, a.tol, Execution::Serial)?;
                let e = |m| {
                    pure_correlator_with(Execution::Serial, &state, &SignPattern::alternating(m)?)
                        .map(|c| c.e_value)
                };
                Ok((e(a.n)?, e(a.n - 2)?))
            }
        }
    });
    let mut table = Table::new(["delta".to_owned(), format!("E{}", a.n), format!("E{}", a.n - 2)]);
    for (d, row) in deltas.iter().zip(rows) {
        let (en, en2) = row?;
        table.push(vec![(*d).into(), en.into(), en2.into()]);
    }
    csv(&table)
}

fn thermal4_params(a: &Thermal4Args) -> Vec<(String, String)> {
    vec![
        kv("beta_list", join(&a.beta_list)),
        kv("delta_range", &a.delta_range),
        kv("steps", a.steps),
        kv("printed", a.printed),
    ]
}

fn parse_range(s: &str) -> Result<(f64, f64)> {
    let bad = || Error::arg(format!("expected MIN:MAX, got {s:?}"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    Ok((
        lo.trim().parse().map_err(|_| bad())?,
        hi.trim().parse().map_err(|_| bad())?,
    ))
}

fn thermal4(a: &Thermal4Args) -> Result<Vec<u8>> {
    if a.beta_list.is_empty() {
        return Err(Error::arg("empty --beta-list"));
    }
    let (lo, hi) = parse_range(&a.delta_range)?;
    let deltas = grid(lo, hi, a.steps, "Δ")?;
    let f = if a.printed {
        closedform::xxz4_thermal_printed
    } else {
        closedform::xxz4_thermal
    };
    let mut table = Table::new(
        std::iter::once("delta".to_owned()).chain(a.beta_list.iter().map(|b| format!("E4[beta={b}]"))),
    );
    for &d in &deltas {
        let mut row = vec![Cell::from(d)];
        for &b in &a.beta_list {
            row.push(f(d, b)?.into());
        }
        table.push(row);
    }
    csv(&table)
}

fn mg_params(a: &MgArgs) -> Vec<(String, String)> {
    vec![kv("n", a.n), kv("tol", a.tol)]
}

fn mg(a: &MgArgs, exec: Execution) -> Result<Vec<u8>> {
    let closed = MgGroundState::new(a.n)?;
    let h = Hamiltonian::build(ChainSpec::majumdar_ghosh(a.n)?, Some(a.n / 2))?;
    let state = solve(&h, a.tol, exec)?;
    let mut table = Table::new(["quantity", "closed_form", "ed", "abs_diff"]);
    for (label, m, cf) in [
        (format!("E{}", a.n), a.n, closed.a_n().powi(2)),
        (format!("E{}", a.n - 2), a.n - 2, closed.a_n_minus_2().powi(2)),
        (format!("E{}_printed", a.n - 2), a.n - 2, closed.a_n_minus_2_printed().powi(2)),
    ] {
        let ed = pure_correlator_with(exec, &state, &SignPattern::alternating(m)?)?.e_value;
        table.push(vec![label.into(), cf.into(), ed.into(), (cf - ed).abs().into()]);
    }
    csv(&table)
}

fn certify(a: &CertifyArgs) -> Result<Vec<u8>> {
    let cert: DepthCertificate = hierarchy::certify(a.value, a.n)?;
    let mut out = format!(
        "e_value={}\nn={}\nent_depth={}\nnl_depth={}\n\n",
        a.value, a.n, cert.ent_depth, cert.nl_depth
    )
    .into_bytes();
    let mut ladder = Table::new(["k", "entanglement_bound", "nonlocality_bound"]);
    for ((k, eb), (_, nb)) in cert.ent_ladder.iter().zip(&cert.nl_ladder) {
        ladder.push(vec![(*k).into(), (*eb).into(), (*nb).into()]);
    }
    out.extend(csv(&ladder)?);
    if !cert.ent_rungs.is_empty() {
        let mut rungs = Table::new(["ladder", "shape", "depth", "bound"]);
        for (kind, list) in [("entanglement", &cert.ent_rungs), ("nonlocality", &cert.nl_rungs)] {
            for r in list.iter() {
                rungs.push(vec![kind.into(), r.label().into(), r.depth.into(), r.bound.into()]);
            }
        }
        out.push(b'\n');
        out.extend(csv(&rungs)?);
    }
    Ok(out)
}

fn scaling_params(a: &ScalingArgs) -> Vec<(String, String)> {
    vec![
        kv("k", a.k),
        kv("sizes", join(&a.sizes)),
        kv("g_min", a.g_min),
        kv("g_max", a.g_max),
        kv("points", a.points),
        kv("refine_points", a.refine_points),
        kv("tol", a.tol),
    ]
}

fn scaling(a: &ScalingArgs, exec: Execution, log: &mut dyn Write) -> Result<Vec<u8>> {
    if a.points < 3 {
        return Err(Error::arg("the coarse grid needs at least 3 points"));
    }
    let search = PeakSearch {
        coarse: grid(a.g_min, a.g_max, a.points, "g")?,
        refine_points: a.refine_points,
        ..PeakSearch::default()
    };
    let cfg = SweepConfig {
        tol: a.tol,
        exec,
        ..SweepConfig::default()
    };
    let mut peaks = Vec::with_capacity(a.sizes.len());
    let mut table = Table::new(["n", "g_star"]);
    for &n in &a.sizes {
        let est = scaling::locate_peak(a.k, n, &search, &cfg)?;
        let _ = writeln!(log, "N = {n}: peak at g = {:.6}", est.g_star);
        table.push(vec![n.into(), est.g_star.into()]);
        peaks.push((n, est.g_star));
    }
    let mut out = csv(&table)?;
    let fit = scaling::extrapolate(&peaks)?;
    let mut summary = Table::new(["quantity", "value"]);
    summary.push(vec!["intercept".into(), fit.intercept.into()]);
    summary.push(vec!["confidence_90".into(), fit.confidence.into()]);
    summary.push(vec!["intercept_stderr".into(), fit.intercept_stderr.into()]);
    summary.push(vec!["slope".into(), fit.slope.into()]);
    summary.push(vec!["monotone".into(), Cell::Int(fit.monotone as i64)]);
    out.push(b'\n');
    out.extend(csv(&summary)?);
    Ok(out)
}
