//! The `randsing` command line: one subcommand per experiment.

pub mod args;
pub mod config;
pub mod report;

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use clap::Parser;
use randsing::bernoulli_decomp::{decompose, pushforward_law, Variant};
use randsing::bounds::{optimize_thresholds, scan_rows, singularity_bound, singularity_bound_scan, BoundParams};
use randsing::concentration::{default_lo_constant, envelope_violations, sweep, write_sweep_csv};
use randsing::distributions::DistributionSpec;
use randsing::exact_linalg::{rank, strong_rank, RationalMatrix};
use randsing::montecarlo::{
    ensemble_bound, estimate_singular_prob, scaling_study, write_estimates_csv, EnsembleSpec, EnsembleTemplate,
    EntryLaws, RunManifest, ScalingRow, Verdict,
};
use randsing::rational::{in_open_unit, q, Rational};

use args::{
    BoundArgs, CheckLawArgs, Cli, Command, DecomposeArgs, EnsembleArgs, LawArgs, LoSweepArgs, ScalingArgs,
    SimulateArgs, StrongRankArgs,
};
use report::{BoundRecord, CheckLawReport, DecomposeReport, Provenance, StrongRankRecord};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "RANDSING_OUT_DIR";

pub const EXIT_INVALID: u8 = 2;
pub const EXIT_COMPUTE: u8 = 3;

/// Failure classes with distinct exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Bad input, rejected before any computation.
    Invalid(anyhow::Error),
    /// The computation itself failed, e.g. no witness exists.
    Compute(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => EXIT_INVALID,
            CliError::Compute(_) => EXIT_COMPUTE,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Invalid(e) => write!(f, "invalid input: {e:#}"),
            CliError::Compute(e) => write!(f, "computation failed: {e:#}"),
        }
    }
}

fn invalid(msg: impl std::fmt::Display) -> CliError {
    CliError::Invalid(anyhow!("{msg}"))
}

fn compute<E: Into<anyhow::Error>>(e: E) -> CliError {
    CliError::Compute(e.into())
}

type Result<T> = std::result::Result<T, CliError>;

/// Parses `args` (including the program name), runs the subcommand and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let args = match config::expand_config(args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return EXIT_INVALID;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code().clamp(0, 255) as u8;
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: Command) -> Result<()> {
    match command {
        Command::Decompose(a) => cmd_decompose(a),
        Command::CheckLaw(a) => cmd_check_law(a),
        Command::LoSweep(a) => cmd_lo_sweep(a),
        Command::Bound(a) => cmd_bound(a),
        Command::StrongRank(a) => cmd_strong_rank(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Scaling(a) => cmd_scaling(a),
    }
}

/// Explicit path, else `$RANDSING_OUT_DIR/<default_name>`, else stdout.
fn resolve_output(explicit: Option<PathBuf>, default_name: &str) -> Option<PathBuf> {
    explicit.or_else(|| {
        std::env::var_os(OUT_DIR_ENV)
            .filter(|d| !d.is_empty())
            .map(|d| PathBuf::from(d).join(default_name))
    })
}

fn write_output(path: Option<&Path>, body: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<()> {
    let io_err = |e: io::Error, p: Option<&Path>| {
        let target = p.map_or_else(|| "stdout".to_string(), |p| p.display().to_string());
        CliError::Compute(anyhow::Error::new(e).context(format!("writing {target}")))
    };
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(|e| io_err(e, Some(dir)))?;
            }
            let file = File::create(p).map_err(|e| io_err(e, Some(p)))?;
            let mut w = BufWriter::new(file);
            body(&mut w).and_then(|_| w.flush()).map_err(|e| io_err(e, Some(p)))
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            // A reader that closed early (e.g. `| head`) is not an error.
            match body(&mut w).and_then(|_| w.flush()) {
                Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
                r => r.map_err(|e| io_err(e, None)),
            }
        }
    }
}

fn write_json<T: serde::Serialize>(path: Option<&Path>, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(compute)?;
    write_output(path, |w| writeln!(w, "{text}"))
}

fn check_rho(rho: &Rational) -> Result<()> {
    if !in_open_unit(rho) || rho >= &q(1, 2) {
        return Err(invalid(format!("--rho must lie in ]0, 1/2[, got {rho}")));
    }
    Ok(())
}

fn check_p0(p0: &Rational) -> Result<()> {
    if !in_open_unit(p0) || p0 <= &q(1, 2) {
        return Err(invalid(format!("--p0 must lie in ]1/2, 1[, got {p0}")));
    }
    Ok(())
}

fn check_c(c: Option<f64>) -> Result<()> {
    match c {
        Some(c) if !(c.is_finite() && c > 0.0) => Err(invalid(format!("--c must be positive, got {c}"))),
        _ => Ok(()),
    }
}

fn law_and_witness(law: &LawArgs) -> Result<randsing::NonDegeneracyWitness> {
    check_rho(&law.rho)?;
    law.dist.find_witness(&law.rho).map_err(compute)
}

fn cmd_decompose(a: DecomposeArgs) -> Result<()> {
    let witness = law_and_witness(&a.law)?;
    let decomposition = decompose(&a.law.dist, &witness, a.variant.into()).map_err(compute)?;
    let pushforward = pushforward_law(&decomposition).ok();
    let report = DecomposeReport { dist: a.law.dist, decomposition, pushforward };
    write_json(resolve_output(a.output.out, "decompose.json").as_deref(), &report)
}

fn cmd_check_law(a: CheckLawArgs) -> Result<()> {
    let witness = law_and_witness(&a.law)?;
    let dist = &a.law.dist;
    let dec = decompose(dist, &witness, Variant::Unshifted).map_err(compute)?;
    let shifted = decompose(dist, &witness, Variant::Shifted).map_err(compute)?;
    let report = CheckLawReport {
        dist: dist.clone(),
        kind: dist.kind(),
        p0: witness.p0(),
        witness,
        p: dec.p.clone(),
        gap_case: dec.is_gap_case(),
        gap: dec.gap.clone(),
        delta_lower_bound: dec.delta_inf.clone(),
        reconstructs_law: dec.reconstructs_law,
        shifted_reconstructs_law: shifted.reconstructs_law,
        t1: dec.t1.clone(),
        t2: dec.t2.clone(),
        t2_within_bound: dec.t2_within_bound(),
        t2_bound: dec.t2_bound.clone(),
    };
    write_json(resolve_output(a.output.out, "check-law.json").as_deref(), &report)
}

fn cmd_lo_sweep(a: LoSweepArgs) -> Result<()> {
    check_p0(&a.p0)?;
    check_c(a.c)?;
    let sizes: Vec<usize> = a.s.0.iter().map(|&s| s as usize).collect();
    if sizes.contains(&0) {
        return Err(invalid("--s values must be positive"));
    }
    let reports = sweep(&sizes, &a.weights, &a.probs, &a.p0).map_err(|e| invalid(e))?;
    let c = a.c.unwrap_or_else(|| default_lo_constant(&a.p0));
    let path = resolve_output(a.output.out, "lo-sweep.csv");
    write_output(path.as_deref(), |w| write_sweep_csv(&reports, w))?;
    let violations = envelope_violations(&reports, c);
    let worst = reports.iter().map(|r| r.scaled).fold(0.0, f64::max);
    eprintln!("envelope C = {c:.6}: max scaled atom {worst:.6}, {} violation(s)", violations.len());
    for v in violations {
        eprintln!("  s = {}: max_atom·√s = {:.6} > C", v.s, v.scaled);
    }
    Ok(())
}

fn cmd_bound(a: BoundArgs) -> Result<()> {
    check_p0(&a.p0)?;
    check_c(a.c)?;
    let (alpha, beta, thresholds) = if a.auto_thresholds {
        let t = optimize_thresholds(&a.p0).map_err(compute)?;
        (t.alpha, t.beta, Provenance::Optimized)
    } else {
        let (alpha, beta) = (a.alpha.expect("required by clap"), a.beta.expect("required by clap"));
        if !(0.0 < beta && beta < alpha && alpha < 1.0) {
            return Err(invalid(format!("need 0 < beta < alpha < 1, got alpha={alpha} beta={beta}")));
        }
        (alpha, beta, Provenance::Given)
    };
    let (c, c_source) = match a.c {
        Some(c) => (c, Provenance::Given),
        None => (default_lo_constant(&a.p0), Provenance::Default),
    };
    let template = BoundParams { n: 1, p0: a.p0.clone(), alpha, beta, c };
    if let Some(scan) = a.scan {
        if scan.0.contains(&0) {
            return Err(invalid("scan sizes must be positive"));
        }
        let reports = singularity_bound_scan(&template, scan.0).map_err(compute)?;
        let path = resolve_output(a.output.out, "bound-scan.csv");
        return write_output(path.as_deref(), |w| {
            writeln!(w, "n,total,total_sqrt_n")?;
            for (n, total, scaled) in scan_rows(&reports) {
                writeln!(w, "{n},{total:.6e},{scaled:.6e}")?;
            }
            Ok(())
        });
    }
    let n = a.n.expect("required by clap");
    if n == 0 {
        return Err(invalid("--n must be positive"));
    }
    let report = singularity_bound(&BoundParams { n, ..template }).map_err(compute)?;
    let record = BoundRecord { report, thresholds, c_source };
    write_json(resolve_output(a.output.out, "bound.json").as_deref(), &record)
}

fn cmd_strong_rank(a: StrongRankArgs) -> Result<()> {
    let text = fs::read_to_string(&a.matrix)
        .with_context(|| format!("reading {}", a.matrix.display()))
        .map_err(CliError::Invalid)?;
    let m: RationalMatrix = text.parse().map_err(|e| invalid(format!("{}: {e}", a.matrix.display())))?;
    let sr = strong_rank(&m, a.axis.into());
    let record = StrongRankRecord {
        rows: m.rows(),
        cols: m.cols(),
        axis: a.axis.into(),
        rank: rank(&m),
        strong_rank: sr.value,
        witness_circuit: sr.witness_circuit,
    };
    write_json(resolve_output(a.output.out, "strong-rank.json").as_deref(), &record)
}

fn read_grid(path: &Path, entries: usize) -> Result<Vec<DistributionSpec>> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(CliError::Invalid)?;
    let laws = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(|l| l.parse::<DistributionSpec>().map_err(|e| invalid(format!("{}: {e}", path.display()))))
        .collect::<Result<Vec<_>>>()?;
    if laws.len() != entries {
        return Err(invalid(format!("{} lists {} laws, expected {entries}", path.display(), laws.len())));
    }
    Ok(laws)
}

/// Shared validation for `simulate` and `scaling`.
fn check_ensemble(e: &EnsembleArgs, sizes: &[u64]) -> Result<()> {
    check_rho(&e.rho)?;
    check_c(e.c)?;
    if e.trials == 0 {
        return Err(invalid("--trials must be at least 1"));
    }
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(invalid("matrix sizes must be positive"));
    }
    Ok(())
}

fn manifest_path(e: &EnsembleArgs, csv: Option<&Path>) -> Option<PathBuf> {
    e.manifest.clone().or_else(|| csv.map(|p| p.with_extension("manifest.json")))
}

fn emit_estimates(e: &EnsembleArgs, manifest: RunManifest, rows: &[ScalingRow]) -> Result<()> {
    let csv = resolve_output(e.output.out.clone(), &format!("{}.csv", manifest.subcommand));
    write_output(csv.as_deref(), |w| write_estimates_csv(rows, w))?;
    if let Some(path) = manifest_path(e, csv.as_deref()) {
        write_json(Some(&path), &manifest)?;
    }
    for r in rows.iter().filter(|r| r.verdict == Verdict::Violated) {
        eprintln!("warning: n = {}: estimate {:.6} exceeds bound {:.6} beyond the CI width", r.n, r.estimate.p_hat, r.bound.total);
    }
    Ok(())
}

fn cmd_simulate(a: SimulateArgs) -> Result<()> {
    let e = &a.ensemble;
    check_ensemble(e, &[a.n])?;
    let n = a.n as usize;
    let laws = match (&e.dist, &e.grid) {
        (Some(d), _) => EntryLaws::Shared(d.clone()),
        (None, Some(path)) => EntryLaws::Grid(read_grid(path, n * n)?),
        (None, None) => unreachable!("clap requires --dist or --grid"),
    };
    let spec = EnsembleSpec::new(n, n, laws.clone(), e.rho.clone(), e.seed, e.mode.into()).map_err(compute)?;
    let estimate = estimate_singular_prob(&spec, e.trials, e.workers).map_err(compute)?;
    let bound = ensemble_bound(n, &e.rho, e.c).map_err(compute)?;
    let verdict = Verdict::judge(&estimate, bound.total);
    let (law, grid) = match laws {
        EntryLaws::Shared(d) => (d, None),
        EntryLaws::Grid(g) => (g[0].clone(), Some(g)),
    };
    let template = EnsembleTemplate { law, rho: e.rho.clone(), seed: e.seed, mode: e.mode.into() };
    let mut manifest = RunManifest::new("simulate", &template, &[n], e.trials);
    manifest.grid = grid;
    emit_estimates(e, manifest, &[ScalingRow { n, estimate, bound, verdict }])
}

fn cmd_scaling(a: ScalingArgs) -> Result<()> {
    let e = &a.ensemble;
    check_ensemble(e, &a.n_values.0)?;
    let Some(dist) = e.dist.clone() else {
        return Err(invalid("scaling needs --dist; per-entry grids fix the matrix size"));
    };
    let template = EnsembleTemplate { law: dist, rho: e.rho.clone(), seed: e.seed, mode: e.mode.into() };
    let sizes: Vec<usize> = a.n_values.0.iter().map(|&n| n as usize).collect();
    let rows = scaling_study(&template, &sizes, e.trials, e.workers, e.c).map_err(compute)?;
    emit_estimates(e, RunManifest::new("scaling", &template, &sizes, e.trials), &rows)
}
