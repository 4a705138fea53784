mod args;
mod config;
mod export;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use config::{Format, RunConfig};
use export::Artifact;
use num_complex::Complex64;
use qftorus::conjecture::{self, ReportRow, SweepReport, Verdict};
use qftorus::pleating::{self, PleatingPoint};
use qftorus::teich::{self, MinimaLine};
use qftorus::{IrrationalSlope, Lamination, Slope, TraceTriple};
use serde_json::json;
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "qftorus", version, about = "Pleating coordinates of quasifuchsian punctured-torus groups")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Flat key=value file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Threads for parallel grid evaluation.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long = "out", global = true)]
    output_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    format: Option<Format>,
    #[arg(long, global = true)]
    inner_tolerance: Option<f64>,
    #[arg(long, global = true)]
    outer_tolerance: Option<f64>,
    #[arg(long, global = true)]
    residual_bound: Option<f64>,
    #[arg(long, global = true)]
    bowditch_depth: Option<usize>,
    #[arg(long, global = true)]
    bowditch_bound: Option<f64>,
    #[arg(long, global = true)]
    convergent_budget: Option<usize>,
    #[arg(long, global = true)]
    grid_points: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Trace of a simple closed curve from a trace triple.
    Trace {
        #[arg(long, value_parser = args::triple)]
        triple: [Complex64; 3],
        #[arg(long, value_parser = args::slope)]
        slope: Slope,
    },
    /// Length of a measured lamination.
    Length {
        #[arg(long, value_parser = args::triple)]
        triple: [Complex64; 3],
        #[arg(long, value_parser = args::lamination)]
        lamination: Lamination,
    },
    /// Samples of the line of minima of `l_mu + c·l_nu`.
    Minline {
        #[arg(long, value_parser = args::lamination)]
        mu: Lamination,
        #[arg(long, value_parser = args::lamination)]
        nu: Lamination,
        /// Explicit values of c; otherwise a log grid on [cmin, cmax].
        #[arg(long, value_delimiter = ',')]
        c: Option<Vec<f64>>,
        #[arg(long, default_value_t = 0.01)]
        cmin: f64,
        #[arg(long, default_value_t = 100.0)]
        cmax: f64,
    },
    /// Points of the pleating variety with given bending lengths.
    Pleat {
        #[command(subcommand)]
        action: Pleat,
    },
    /// The inverse problem: bending angles to lengths.
    Bend {
        #[command(subcommand)]
        action: Bend,
    },
    /// Numerical checks of the structural claims.
    Verify {
        #[command(subcommand)]
        check: Verify,
    },
}

#[derive(Args, Debug, Clone)]
struct PairArgs {
    #[arg(long, value_parser = args::slope)]
    gamma: Slope,
    #[arg(long, value_parser = args::slope)]
    delta: Slope,
}

#[derive(Subcommand, Debug)]
enum Pleat {
    Solve {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        lmu: f64,
        #[arg(long)]
        lnu: f64,
    },
    /// Warm-started sweep in `l_mu` at fixed `l_nu`.
    Sweep {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        lnu: f64,
        #[arg(long)]
        lmu_min: Option<f64>,
        /// Defaults to the region boundary, approached on a square-root grid.
        #[arg(long)]
        lmu_max: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
    },
}

#[derive(Subcommand, Debug)]
enum Bend {
    Solve {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, value_parser = args::pair)]
        theta: (f64, f64),
        #[arg(long, value_parser = args::pair)]
        start: Option<(f64, f64)>,
    },
}

#[derive(Subcommand, Debug)]
enum Verify {
    /// Symmetry and negativity of the length-angle Jacobian.
    Jacobian {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        lmu: f64,
        #[arg(long)]
        lnu: f64,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        /// Relative asymmetry allowed.
        #[arg(long, default_value_t = 1e-4)]
        tolerance: f64,
    },
    /// Monotone angles along a line of constant `l_nu`.
    Monotone {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        c: f64,
        #[arg(long)]
        n: Option<usize>,
    },
    /// The constant-angle variety: root counts and monotone angle.
    Variety {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        a: f64,
        #[arg(long, value_delimiter = ',')]
        cs: Option<Vec<f64>>,
        #[arg(long, default_value_t = 0.2)]
        cmin: f64,
        #[arg(long, default_value_t = 3.5)]
        cmax: f64,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Clustering of inverse solutions from random starts.
    Unique {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, value_parser = args::pair)]
        theta: (f64, f64),
        #[arg(long, default_value_t = 20)]
        starts: usize,
    },
    /// Supremum of `l_mu·sin(xi_mu/2)` and its stability under refinement.
    Bridgeman {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value_t = 8)]
        n: usize,
    },
    /// Growth of `l_nu` at constant angle as `l_mu` shrinks.
    Blowup {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        a: f64,
        #[arg(long, value_delimiter = ',')]
        eps: Option<Vec<f64>>,
        #[arg(long, default_value_t = 3.0)]
        eps0: f64,
        #[arg(long, default_value_t = 8)]
        halvings: usize,
    },
    /// Length ratios along the line of minima as `c → 0`.
    Thurston {
        #[arg(long, value_parser = args::lamination)]
        m: Lamination,
        #[arg(long, value_parser = args::lamination)]
        zeta1: Lamination,
        #[arg(long, value_parser = args::lamination)]
        zeta2: Lamination,
        #[arg(long, value_parser = args::lamination)]
        nu_prime: Option<Lamination>,
        #[arg(long, value_delimiter = ',', default_values_t = [1.0, 0.1, 0.01, 0.001])]
        c: Vec<f64>,
    },
    /// Convergence of groups bent along the convergents of an irrational slope.
    Irrational {
        #[arg(long, value_parser = args::irrational)]
        slope: IrrationalSlope,
        #[arg(long, value_parser = args::slope, default_value = "1/0")]
        delta: Slope,
        #[arg(long)]
        b: f64,
        #[arg(long)]
        c: f64,
        /// Number of convergents; defaults to the convergent budget.
        #[arg(long)]
        n: Option<usize>,
    },
}

#[derive(Debug)]
enum Outcome {
    Done,
    Violated,
}

/// Marks errors that exit with the solver-failure code.
struct SolverFailure(anyhow::Error);

fn run_config(g: &Global) -> Result<RunConfig> {
    let mut cfg = match &g.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    macro_rules! take {
        ($($field:ident),*) => {
            $(if let Some(v) = g.$field.clone() { cfg.$field = v; })*
        };
    }
    take!(seed, format, inner_tolerance, outer_tolerance, residual_bound, bowditch_depth, bowditch_bound, convergent_budget, grid_points);
    if let Some(dir) = &g.output_dir {
        cfg.output_dir = Some(dir.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Lifts core errors, sorting bad input from numerical failure.
fn core<T>(r: qftorus::Result<T>) -> Result<T> {
    use qftorus::Error as E;
    r.map_err(|e| match e {
        E::Optimizer(_)
        | E::LadderBudget { .. }
        | E::Newton(_)
        | E::NotDiscrete(_)
        | E::Parabolic(_)
        | E::NotOnVariety(_)
        | E::NoBracket(_)
        | E::PathTooLong { .. } => anyhow::Error::new(SolverFailure(anyhow!(e.to_string()))),
        other => anyhow!(other.to_string()),
    })
}

impl std::fmt::Debug for SolverFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.0)
    }
}

impl std::fmt::Display for SolverFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.0)
    }
}

impl std::error::Error for SolverFailure {}

fn solver_failure(msg: String) -> anyhow::Error {
    anyhow::Error::new(SolverFailure(anyhow!(msg)))
}

fn to_triple(t: [Complex64; 3]) -> Result<TraceTriple> {
    core(TraceTriple::new(t[0], t[1], t[2]))
}

fn report_artifact(r: &SweepReport) -> Result<Artifact> {
    Ok(Artifact {
        id: r.experiment.clone(),
        csv: r.to_csv(),
        json: serde_json::to_value(r)?,
    })
}

fn reports(cfg: &RunConfig, rs: &[SweepReport]) -> Result<Outcome> {
    let arts = rs.iter().map(report_artifact).collect::<Result<Vec<_>>>()?;
    export::emit(cfg, &arts)?;
    for r in rs {
        eprintln!("{}: {:?} (margin {:e})", r.experiment, r.verdict, r.margin);
        for note in &r.notes {
            eprintln!("  {note}");
        }
    }
    Ok(if rs.iter().any(|r| r.verdict == Verdict::Violated) {
        Outcome::Violated
    } else {
        Outcome::Done
    })
}

fn point_artifact(id: &str, p: &PleatingPoint) -> Result<Artifact> {
    Ok(Artifact {
        id: id.to_string(),
        csv: format!("{}\n{}\n", PleatingPoint::csv_header(), p.csv_row()),
        json: serde_json::to_value(p)?,
    })
}

fn geometric(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp()).collect()
}

fn linear(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

fn execute(cli: Cli) -> Result<Outcome> {
    let cfg = run_config(&cli.global)?;
    if let Some(w) = cli.global.workers {
        if w == 0 {
            bail!("--workers must be positive");
        }
        rayon::ThreadPoolBuilder::new().num_threads(w).build_global().context("cannot size the worker pool")?;
    }
    let solver = cfg.solver();
    let exp = cfg.experiment();
    match cli.command {
        Command::Trace { triple, slope } => {
            let t = to_triple(triple)?;
            let v = core(t.trace_of_slope_capped(slope, cfg.bowditch_depth.max(1) as i64 * 1_000_000))?;
            println!("{}", args::format_trace(v));
            Ok(Outcome::Done)
        }
        Command::Length { triple, lamination } => {
            let t = to_triple(triple)?;
            let e = core(teich::length_estimate_with(&t, &lamination, cfg.convergent_budget))?;
            println!("{}", e.value);
            Ok(Outcome::Done)
        }
        Command::Minline { mu, nu, c, cmin, cmax } => {
            let cs = match c {
                Some(cs) => cs,
                None => {
                    if !(cmin > 0.0 && cmax >= cmin) {
                        bail!("need 0 < cmin <= cmax");
                    }
                    geometric(cmin, cmax, cfg.grid_points)
                }
            };
            let line = core(MinimaLine::sample(&mu, &nu, &cs))?;
            let art = Artifact {
                id: "minline".into(),
                csv: line.to_csv(),
                json: serde_json::to_value(&line)?,
            };
            export::emit(&cfg, &[art])?;
            Ok(Outcome::Done)
        }
        Command::Pleat { action: Pleat::Solve { pair, lmu, lnu } } => {
            let p = core(pleating::solve_pleating_with(pair.gamma, pair.delta, lmu, lnu, &solver))?;
            export::emit(&cfg, &[point_artifact("pleat", &p)?])?;
            Ok(Outcome::Done)
        }
        Command::Pleat {
            action: Pleat::Sweep { pair, lnu, lmu_min, lmu_max, n },
        } => {
            let n = n.unwrap_or(cfg.grid_points);
            let bs = match lmu_max {
                Some(hi) => linear(lmu_min.unwrap_or(0.05 * hi), hi, n),
                None => {
                    let hi = core(conjecture::b_max(pair.gamma, pair.delta, lnu))?;
                    conjecture::boundary_grid(lmu_min.unwrap_or(0.05 * hi), hi, n)
                }
            };
            let results = conjecture::sweep_lengths(pair.gamma, pair.delta, lnu, &bs, &exp);
            let mut csv = format!("index,target_l_mu,target_l_nu,{},status\n", PleatingPoint::csv_header());
            let blank = ",".repeat(PleatingPoint::csv_header().matches(',').count());
            let mut rows = Vec::new();
            for (i, (b, r)) in bs.iter().zip(&results).enumerate() {
                match r {
                    Ok(p) => {
                        csv.push_str(&format!("{i},{b:.15e},{lnu:.15e},{},ok\n", p.csv_row()));
                        rows.push(json!({"index": i, "target": [b, lnu], "point": p}));
                    }
                    Err(e) => {
                        let msg = e.to_string().replace(',', ";");
                        csv.push_str(&format!("{i},{b:.15e},{lnu:.15e},{blank},{msg}\n"));
                        rows.push(json!({"index": i, "target": [b, lnu], "error": e.to_string()}));
                    }
                }
            }
            export::emit(&cfg, &[Artifact { id: "sweep".into(), csv, json: json!(rows) }])?;
            if results.iter().all(|r| r.is_err()) {
                return Err(solver_failure("no point of the sweep could be solved".into()));
            }
            Ok(Outcome::Done)
        }
        Command::Bend {
            action: Bend::Solve { pair, theta, start },
        } => {
            let p = core(pleating::solve_angles_with(pair.gamma, pair.delta, theta.0, theta.1, start, &solver))?;
            export::emit(&cfg, &[point_artifact("bend", &p)?])?;
            Ok(Outcome::Done)
        }
        Command::Verify { check } => verify(&cfg, check),
    }
}

fn verify(cfg: &RunConfig, check: Verify) -> Result<Outcome> {
    let exp = cfg.experiment();
    let solver = cfg.solver();
    let report = match check {
        Verify::Jacobian {
            pair,
            lmu,
            lnu,
            step,
            tolerance,
        } => {
            let p = core(pleating::solve_pleating_with(pair.gamma, pair.delta, lmu, lnu, &solver))?;
            let j = core(pleating::jacobian_lengths_angles_with(&p, step, &solver))?;
            jacobian_report(&j, &pair, lmu, lnu, step, tolerance, cfg)
        }
        Verify::Monotone { pair, c, n } => {
            core(conjecture::monotone_on_lc(pair.gamma, pair.delta, c, n.unwrap_or(cfg.grid_points), &exp))?
        }
        Verify::Variety {
            pair,
            a,
            cs,
            cmin,
            cmax,
            n,
        } => {
            let cs = cs.unwrap_or_else(|| linear(cmin, cmax, n.unwrap_or(cfg.grid_points)));
            let trace = core(conjecture::trace_constant_angle(pair.gamma, pair.delta, a, &cs, &exp))?;
            let rs = [conjecture::variety_report(&trace, &exp), conjecture::angle_monotone_on_va(&trace, &exp)];
            return reports(cfg, &rs);
        }
        Verify::Unique { pair, theta, starts } => {
            core(conjecture::uniqueness_trial(pair.gamma, pair.delta, theta.0, theta.1, starts, &exp))?
        }
        Verify::Bridgeman { pair, n } => core(conjecture::bridgeman_refinement(pair.gamma, pair.delta, n, &exp))?,
        Verify::Blowup {
            pair,
            a,
            eps,
            eps0,
            halvings,
        } => {
            let eps = eps.unwrap_or_else(|| (0..=halvings).map(|k| eps0 * 0.5f64.powi(k as i32)).collect());
            core(conjecture::blowup_probe(pair.gamma, pair.delta, a, &eps, &exp))?
        }
        Verify::Thurston {
            m,
            zeta1,
            zeta2,
            nu_prime,
            c,
        } => core(conjecture::thurston_probe(&m, &c, [&zeta1, &zeta2], nu_prime.as_ref(), &exp))?,
        Verify::Irrational { slope, delta, b, c, n } => {
            let n = n.unwrap_or(cfg.convergent_budget.min(slope.truncation()));
            core(conjecture::irrational_limit(&slope, delta, b, c, n, &exp))?
        }
    };
    if report.successes() == 0 && !report.rows.is_empty() {
        reports(cfg, std::slice::from_ref(&report))?;
        return Err(solver_failure(format!("{}: every point failed", report.experiment)));
    }
    reports(cfg, &[report])
}

fn jacobian_report(
    j: &pleating::AngleJacobian,
    pair: &PairArgs,
    lmu: f64,
    lnu: f64,
    step: f64,
    tolerance: f64,
    cfg: &RunConfig,
) -> SweepReport {
    let m = j.matrix;
    let relative = j.asymmetry / j.norm.max(f64::MIN_POSITIVE);
    let largest = j.eigenvalues[0].max(j.eigenvalues[1]);
    let symmetric = relative <= tolerance;
    let negative = largest < 0.0;
    let mut parameters = BTreeMap::new();
    parameters.insert("gamma".to_string(), json!(pair.gamma));
    parameters.insert("delta".to_string(), json!(pair.delta));
    parameters.insert("l_mu".to_string(), json!(lmu));
    parameters.insert("l_nu".to_string(), json!(lnu));
    parameters.insert("step".to_string(), json!(step));
    parameters.insert("tolerance".to_string(), json!(tolerance));
    parameters.insert("seed".to_string(), json!(cfg.seed));
    let mut notes = Vec::new();
    if !symmetric {
        notes.push(format!("relative asymmetry {relative:e} exceeds {tolerance:e}"));
    }
    if !negative {
        notes.push(format!("eigenvalue {largest} is not negative"));
    }
    SweepReport {
        experiment: "jacobian".into(),
        parameters,
        columns: ["j00", "j01", "j10", "j11", "eig0", "eig1", "asymmetry"].map(String::from).to_vec(),
        rows: vec![ReportRow {
            index: 0,
            values: vec![m[0][0], m[0][1], m[1][0], m[1][1], j.eigenvalues[0], j.eigenvalues[1], j.asymmetry],
            status: "ok".into(),
        }],
        verdict: if symmetric && negative { Verdict::Confirmed } else { Verdict::Violated },
        margin: (tolerance - relative).min(-largest),
        notes,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::Violated) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<SolverFailure>().is_some() {
                ExitCode::from(3)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
