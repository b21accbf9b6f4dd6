//! `moyal`: verification suites, star products, curvatures and one-loop fits.
//!
//! Exit status: 0 when every check passes, 1 when a numerical check fails,
//! 2 on invalid input.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use moyal_core::config::{ConnectionConfig, GradedConfig};
use moyal_core::oneloop::bessel::{bessel_i, bessel_k};
use moyal_core::oneloop::ir::log_window;
use moyal_core::oneloop::{ir_coefficient, LoopConfig};
use moyal_core::verify::{run_verify, Scope};
use moyal_core::{parse_expression, Error, SymplecticStructure};

#[derive(Parser, Debug)]
#[command(name = "moyal", version, about = "Gauge theory on Moyal space: algebra checks and one-loop infrared fits")]
struct Cli {
    /// Even dimension D.
    #[arg(long, global = true)]
    dim: Option<usize>,
    /// Noncommutativity θ > 0.
    #[arg(long, global = true)]
    theta: Option<f64>,
    /// Mass scale μ (Higgs mass in `oneloop`).
    #[arg(long, global = true)]
    mu: Option<f64>,
    /// Graded scale m.
    #[arg(long, global = true)]
    m: Option<f64>,
    /// Coupling α.
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Number of Higgs fields; defaults to D(D+1)/2.
    #[arg(long = "n-higgs", global = true)]
    n_higgs: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// JSON configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (CSV for `oneloop`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Pass/fail tolerance; the meaning depends on the subcommand.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the invariant suites: core, derivations, connections, graded or all.
    Verify {
        scope: String,
        /// Random draws per sampled check.
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
    /// Star product, commutator and anticommutator of two expressions.
    Star { left: String, right: String },
    /// Curvature table of a connection read from --config.
    Curvature,
    /// Curvature table of a graded connection read from --config.
    Graded,
    /// Fit the infrared coefficient of the vacuum polarisation.
    Oneloop {
        #[arg(long = "p-min", default_value_t = 1e-2)]
        p_min: f64,
        #[arg(long = "p-max", default_value_t = 1e-1)]
        p_max: f64,
        #[arg(long, default_value_t = 8)]
        points: usize,
    },
    /// Self-test of the modified Bessel functions.
    BesselCheck,
}

/// Failure modes mapped onto exit codes.
enum Failure {
    Numerical(String),
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Numerical(_) => Failure::Numerical(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

type Outcome = Result<bool, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Verify { scope, samples } => verify(&cli, scope, *samples),
        Command::Star { left, right } => star(&cli, left, right),
        Command::Curvature => curvature(&cli),
        Command::Graded => graded(&cli),
        Command::Oneloop { p_min, p_max, points } => oneloop(&cli, *p_min, *p_max, *points),
        Command::BesselCheck => bessel_check(&cli),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("input error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn input(msg: impl Into<String>) -> Failure {
    Failure::Input(msg.into())
}

fn read_config(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| input(format!("cannot read {}: {e}", path.display())))
}

fn emit(cli: &Cli, text: &str) -> Result<(), Failure> {
    print!("{text}");
    if let Some(path) = &cli.out {
        fs::write(path, text).map_err(|e| input(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn structure(cli: &Cli) -> Result<Arc<SymplecticStructure>, Failure> {
    Ok(Arc::new(SymplecticStructure::new(cli.dim.unwrap_or(2), cli.theta.unwrap_or(1.0))?))
}

/// (D, θ) from the flags, reconciled with --config when one is given.
fn dim_theta(cli: &Cli) -> Result<(usize, f64), Failure> {
    let Some(path) = &cli.config else {
        return Ok((cli.dim.unwrap_or(2), cli.theta.unwrap_or(1.0)));
    };
    let text = read_config(path)?;
    let (d, th) = match ConnectionConfig::from_json(&text) {
        Ok(c) => (c.dim, c.theta),
        Err(_) => {
            let g = GradedConfig::from_json(&text)?;
            (g.dim, g.theta)
        }
    };
    SymplecticStructure::new(d, th)?;
    if cli.dim.is_some_and(|x| x != d) || cli.theta.is_some_and(|x| x != th) {
        return Err(input(format!(
            "--dim/--theta disagree with {} (D = {d}, theta = {th})",
            path.display()
        )));
    }
    Ok((d, th))
}

fn verify(cli: &Cli, scope: &str, samples: usize) -> Outcome {
    let scope: Scope = scope.parse()?;
    let (d, th) = dim_theta(cli)?;
    let report = run_verify(scope, d, th, cli.seed, samples)?;
    emit(cli, &report.render())?;
    Ok(report.passed())
}

fn star(cli: &Cli, left: &str, right: &str) -> Outcome {
    let s = structure(cli)?;
    let a = parse_expression(left, &s)?;
    let b = parse_expression(right, &s)?;
    let mut text = s.convention_sheet();
    text += &format!("a * b   = {}\n", a.star(&b)?);
    text += &format!("[a, b]  = {}\n", a.commutator(&b)?);
    text += &format!("{{a, b}} = {}\n", a.anticommutator(&b)?);
    emit(cli, &text)?;
    Ok(true)
}

fn curvature(cli: &Cli) -> Outcome {
    let path = cli.config.as_ref().ok_or_else(|| input("curvature needs --config <file>"))?;
    dim_theta(cli)?;
    let form = ConnectionConfig::from_json(&read_config(path)?)?.build()?;
    let tol = cli.tol.unwrap_or(1e-11);
    let table = form.curvature()?;
    let dual = table.max_rel_distance(&form.curvature_generic()?)?;
    let mut text = form.structure().convention_sheet();
    text += &format!("# mu = {}, alpha = {}\n", form.mu(), form.alpha());
    for (x, y, f) in table.iter() {
        text += &format!("F({}, {}) = {}\n", x.name(), y.name(), f);
    }
    text += &format!("action density = {}\n", form.action_density()?.total);
    let ok = dual <= tol;
    text += &format!(
        "{} closed form vs generic curvature: residual {dual:.3e}, tol {tol:.0e}\n",
        if ok { "PASS" } else { "FAIL" }
    );
    emit(cli, &text)?;
    Ok(ok)
}

fn graded(cli: &Cli) -> Outcome {
    let path = cli.config.as_ref().ok_or_else(|| input("graded needs --config <file>"))?;
    dim_theta(cli)?;
    let form = GradedConfig::from_json(&read_config(path)?)?.build()?;
    let tol = cli.tol.unwrap_or(1e-11);
    let table = form.curvature()?;
    let dual = table.max_distance(&form.curvature_generic()?)?;
    let alg = form.algebra();
    let mut text = alg.structure().convention_sheet();
    text += &format!("# s_J = {}, s_M = {}, alpha = {}\n", alg.s_j(), alg.s_m(), form.alpha());
    for (x, y, f) in table.iter() {
        text += &format!("F({}, {}) = ({}) + ({}) e\n", x.name(), y.name(), f.even, f.odd);
    }
    match form.action_density(1e-12) {
        Ok(dens) => text += &format!("action density = {}\n", dens.total),
        Err(e) => text += &format!("# action density not evaluated: {e}\n"),
    }
    let ok = dual <= tol;
    text += &format!(
        "{} closed form vs generic curvature: residual {dual:.3e}, tol {tol:.0e}\n",
        if ok { "PASS" } else { "FAIL" }
    );
    emit(cli, &text)?;
    Ok(ok)
}

fn oneloop(cli: &Cli, p_min: f64, p_max: f64, points: usize) -> Outcome {
    const WINDOW: (f64, f64) = (1e-2, 1e-1);
    let eps = 1e-12;
    if !(p_min >= WINDOW.0 * (1.0 - eps) && p_max <= WINDOW.1 * (1.0 + eps) && p_min < p_max) {
        return Err(input(format!(
            "p-window [{p_min}, {p_max}] must lie inside [{}, {}]",
            WINDOW.0, WINDOW.1
        )));
    }
    let dim = cli.dim.unwrap_or(4);
    let theta = cli.theta.unwrap_or(1.0);
    let mut cfg = LoopConfig::new(dim, theta)?.with_mu(cli.mu.unwrap_or(1.0));
    if let Some(n) = cli.n_higgs {
        cfg = cfg.with_n_higgs(n);
    }
    let tol = cli.tol.unwrap_or(0.02);
    let fit = ir_coefficient(&cfg, &log_window(p_min, p_max, points))?;
    let s = cfg.structure()?;
    let mut text = s.convention_sheet();
    text += &format!(
        "# D = {}, N = {}, mu = {}, theta = {}, IR regulator = {:e}\n",
        cfg.dim, cfg.n_higgs, cfg.mu, cfg.theta, cfg.ir_regulator
    );
    text += &format!("# diagram weights {:?}\n", fit.weights);
    text += &format!(
        "target {:.5}, fitted {:.5} (fit residual {:.2e}, relative error {:.2e})\n",
        fit.target,
        fit.result.value,
        fit.result.abs_error,
        fit.relative_error()
    );
    text += &format!("unit-weight coefficient {:.5}\n", fit.verbatim);
    let ok = fit.passes(tol);
    text += &format!("{} within {:.0}% of target\n", if ok { "PASS" } else { "FAIL" }, tol * 100.0);
    print!("{text}");
    if let Some(path) = &cli.out {
        let mut w = csv::Writer::from_path(path).map_err(|e| input(format!("cannot write {}: {e}", path.display())))?;
        let write_err = |e: csv::Error| input(format!("cannot write {}: {e}", path.display()));
        w.write_record(["ptilde_norm", "c_fit", "residual", "D", "N", "mu", "theta"])
            .map_err(write_err)?;
        for p in &fit.points {
            w.write_record([
                format!("{:e}", p.ptilde_norm),
                format!("{:.12e}", p.c),
                format!("{:.12e}", p.c - fit.result.value),
                cfg.dim.to_string(),
                cfg.n_higgs.to_string(),
                cfg.mu.to_string(),
                cfg.theta.to_string(),
            ])
            .map_err(write_err)?;
        }
        w.flush().map_err(|e| input(format!("cannot write {}: {e}", path.display())))?;
    }
    std::io::stdout().flush().ok();
    Ok(ok)
}

fn bessel_check(cli: &Cli) -> Outcome {
    let tol = cli.tol.unwrap_or(1e-9);
    let mut text = String::from("# K_{n+1}(z) = K_{n-1}(z) + (2n/z) K_n(z);  I_n K_{n+1} + I_{n+1} K_n = 1/z\n");
    let mut worst: f64 = 0.0;
    for &z in &[1e-3, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0] {
        for n in 0..4 {
            let k = |m: i32| bessel_k(m, z);
            let rec = (k(n + 1) - k(n - 1) - 2.0 * f64::from(n) / z * k(n)).abs() / k(n + 1);
            let wr = (bessel_i(n, z) * k(n + 1) + bessel_i(n + 1, z) * k(n)) * z - 1.0;
            worst = worst.max(rec).max(wr.abs());
            text += &format!(
                "z = {z:<6} n = {n}  K_n = {:.15e}  recurrence {rec:.2e}  wronskian {:.2e}\n",
                k(n),
                wr.abs()
            );
        }
    }
    let ok = worst <= tol;
    text += &format!("{} worst residual {worst:.3e}, tol {tol:.0e}\n", if ok { "PASS" } else { "FAIL" });
    emit(cli, &text)?;
    Ok(ok)
}
