//! `tariffot` command-line front end.
//!
//! Exit codes: 0 success, 1 other failure, 2 infeasible or unreachable,
//! 3 no-arbitrage violation, 4 parse or usage error, 5 internal invariant
//! failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use tariffot::config::parse_config;
use tariffot::cost::compute_cost_matrix;
use tariffot::eulerian::{continuity_residual, stopping_marginal_residual};
use tariffot::example1d::{closed_form_example, optimal_x1};
use tariffot::hjb::{free_boundary, transport_maps};
use tariffot::io::{self, RenderData};
use tariffot::model::{validate_problem, CheckStatus, RateProfile};
use tariffot::transport::{check_complementary_slackness, relative_gap};
use tariffot::{pipeline, Error, ProblemSpec};

#[derive(Parser)]
#[command(name = "tariffot", version, about = "Optimal transport with boundary tariffs and free end time")]
struct Cli {
    /// Accepted for harness compatibility; every stage is deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Control cost matrix and assumption checks; writes cost.csv.
    Cost(Run),
    /// Transport plan and dual potentials; writes plan.csv and dual.csv.
    Solve(Run),
    /// Eulerian lift of the optimal plan; writes rho.csv, eta.csv and residuals.csv.
    Eulerian(Run),
    /// Value function, free boundary and characteristic flows; writes
    /// value.csv, freeboundary.csv and flows.csv.
    Hjb {
        #[command(flatten)]
        run: Run,
        /// Keep every n-th forward and reverse trajectory in flows.csv.
        #[arg(long, default_value_t = 1)]
        flow_stride: usize,
    },
    /// Closed-form solution of the one-dimensional example.
    Example1d {
        #[arg(long, value_enum)]
        g: Profile,
        #[arg(long, allow_hyphen_values = true)]
        p_minus: f64,
        #[arg(long, allow_hyphen_values = true)]
        p_plus: f64,
        /// Evaluate at this split point instead of the optimal one.
        #[arg(long)]
        x1: Option<f64>,
        /// Write the closed-form free boundary and φ⁻ to example1d.csv here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// SVG figure from the CSV files written by `hjb`.
    Render {
        /// Directory holding flows.csv, freeboundary.csv and value.csv.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value = "")]
        title: String,
        /// Top of the time axis.
        #[arg(long)]
        t_max: Option<f64>,
    },
}

#[derive(clap::Args)]
struct Run {
    /// Problem file (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Profile {
    Quadratic,
    ExpSaturating,
    Linear,
}

impl From<Profile> for RateProfile {
    fn from(p: Profile) -> RateProfile {
        match p {
            Profile::Quadratic => RateProfile::Quadratic,
            Profile::ExpSaturating => RateProfile::ExpSaturating,
            Profile::Linear => RateProfile::Linear,
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Infeasible(_) | Error::Unreachable { .. } => 2,
        Error::NoArbitrage { .. } => 3,
        Error::Parse(_) | Error::Input(_) | Error::Parameter(_) => 4,
        Error::Invariant(_) => 5,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 4 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn load(run: &Run) -> tariffot::Result<ProblemSpec> {
    let text = std::fs::read_to_string(&run.config)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", run.config.display())))?;
    let spec = parse_config(&text)?;
    std::fs::create_dir_all(&run.out)?;
    Ok(spec)
}

fn out(run: &Run, name: &str) -> PathBuf {
    run.out.join(name)
}

fn run(command: Command) -> tariffot::Result<u8> {
    match command {
        Command::Cost(r) => {
            let spec = load(&r)?;
            let cost = compute_cost_matrix(&spec)?;
            let report = validate_problem(&spec, Some(&cost));
            for c in &report.checks {
                let status = match c.status {
                    CheckStatus::Pass => "PASS",
                    CheckStatus::Fail => "FAIL",
                    CheckStatus::Skipped => "SKIP",
                };
                println!("{status} {}: {}", c.name, c.detail);
            }
            io::write_csv(out(&r, "cost.csv"), &io::cost_records(&cost, &spec.grid))?;
            let arbitrage = report.get("no-arbitrage").is_some_and(|c| c.status == CheckStatus::Fail);
            Ok(if arbitrage { 3 } else { 0 })
        }
        Command::Solve(r) => {
            let spec = load(&r)?;
            let res = pipeline::solve(&spec)?;
            let gap = relative_gap(&res.plan, &res.duals, &spec);
            let slack = check_complementary_slackness(&res.plan, &res.duals, &res.cost, &spec);
            println!("objective={:.9}", res.plan.objective);
            println!("dual_objective={:.9}", res.duals.objective(&spec));
            println!("relative_gap={gap:.3e}");
            println!("slackness={:.3e}", slack.max());
            io::write_csv(out(&r, "plan.csv"), &io::plan_records(&res.plan, &spec.grid))?;
            io::write_csv(out(&r, "dual.csv"), &io::dual_records(&res.duals, &spec))?;
            Ok(0)
        }
        Command::Eulerian(r) => {
            let spec = load(&r)?;
            let res = pipeline::solve(&spec)?;
            let pair = res.eulerian(&spec)?;
            let cont = continuity_residual(&pair, &spec);
            let stop = stopping_marginal_residual(&pair, &spec);
            println!("objective={:.9}", pair.objective(&res.cost, &spec));
            println!("conservation_defect={:.3e}", pair.conservation_defect(&spec));
            println!("continuity_max_normalized={:.3e}", cont.max_normalized());
            println!("stopping_max_abs={:.3e}", stop.max_abs());
            io::write_csv(out(&r, "rho.csv"), &io::rho_records(&pair, &spec.grid))?;
            io::write_csv(out(&r, "eta.csv"), &io::eta_records(&pair, &spec.grid))?;
            let mut rows = io::residual_records("continuity", &cont);
            rows.extend(io::residual_records("stopping", &stop));
            io::write_csv(out(&r, "residuals.csv"), &rows)?;
            Ok(0)
        }
        Command::Hjb { run: r, flow_stride } => {
            let spec = load(&r)?;
            let res = pipeline::solve(&spec)?;
            let field = res.value_field();
            let fb = free_boundary(&field, spec.dynamics.monotonicity)?;
            let mut maps = transport_maps(&field, &res.duals.phi_minus, &spec)?;
            let stride = flow_stride.max(1);
            for map in [&mut maps.t_plus, &mut maps.t_minus] {
                let mut k = 0;
                for e in map.iter_mut().filter(|e| e.is_some()) {
                    if k % stride != 0 {
                        *e = None;
                    }
                    k += 1;
                }
            }
            println!("dual_value={:.9}", res.dual_value_eulerian(&field, &spec)?);
            println!("objective={:.9}", res.plan.objective);
            let worst_h = maps.transversality_residuals().into_iter().fold(0.0, f64::max);
            println!("max_transversality_residual={worst_h:.3e}");
            io::write_csv(out(&r, "value.csv"), &io::value_records(&field, &res.duals.phi_minus, &spec.grid))?;
            let support = spec.mu_minus.support();
            io::write_csv(out(&r, "freeboundary.csv"), &io::free_boundary_records(&fb, &spec.grid, &support))?;
            io::write_csv(out(&r, "flows.csv"), &io::flow_records(&maps))?;
            Ok(0)
        }
        Command::Example1d { g, p_minus, p_plus, x1, out } => {
            let profile = RateProfile::from(g);
            let (x1, clamped) = match x1 {
                Some(x) => (x, false),
                None => {
                    let s = optimal_x1(profile, p_minus, p_plus)?;
                    (s.x1, s.clamped)
                }
            };
            let s = closed_form_example(profile, p_minus, p_plus, x1)?;
            println!("x1={}", fmt6(s.x1));
            println!("total_cost={}", fmt6(s.total_cost()));
            println!("phi_minus(2)={}", fmt6(s.phi_minus(2.0)));
            if clamped {
                println!("clamped=true");
            }
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir)?;
                write_example(&dir, &s)?;
            }
            Ok(0)
        }
        Command::Render { input, output, title, t_max } => {
            let flows = io::read_csv(input.join("flows.csv"))?;
            let free_boundary = io::read_csv(input.join("freeboundary.csv"))?;
            let value_path = input.join("value.csv");
            let value = if value_path.exists() { io::read_csv(value_path)? } else { vec![] };
            let svg = io::render_svg(&RenderData { flows, free_boundary, value, title, t_max })?;
            std::fs::write(&output, svg)?;
            Ok(0)
        }
    }
}

/// Six decimals with trailing zeros dropped.
fn fmt6(v: f64) -> String {
    let s = format!("{v:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

#[derive(serde::Serialize)]
struct ExampleRow {
    y: f64,
    tau_inv: f64,
    phi_minus: f64,
    origin: f64,
}

fn write_example(dir: &Path, s: &tariffot::example1d::Example1DSolution) -> tariffot::Result<()> {
    let rows: Vec<ExampleRow> = (0..=200)
        .map(|k| {
            let y = 1.0 + k as f64 / 200.0;
            ExampleRow { y, tau_inv: s.tau_inv(y), phi_minus: s.phi_minus(y), origin: s.map_minus(y) }
        })
        .collect();
    io::write_csv(dir.join("example1d.csv"), &rows)
}
