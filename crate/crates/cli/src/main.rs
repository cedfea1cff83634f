//! `triline`: run scenarios, verify the transport theorems, check equations
//! of state, and render reports.
//!
//! Exit codes: 0 success, 2 invalid input (bad arguments, scenario or file),
//! 3 runtime failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use triline::dynamics::{equilibrium_report, run, stability_terms, RunParams, SimState, StopReason};
use triline::output::{read_checkpoint, read_table, render_report, report_charts, CsvObserver, RunWriter};
use triline::scenario::{resolve_scenario, ScenarioConfig};
use triline::thermo::{check_bulk_eos, check_surface_eos};
use triline::transport::{case_by_name, catalog, convergence_study, study_passes, AnalyticCase};

#[derive(Parser)]
#[command(name = "triline", version, about = "Dynamic triple-line simulator with interface formation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario (file path or preset name) and write CSV output.
    Run {
        scenario: String,
        /// Output directory; defaults to $TRILINE_OUT, then ./triline_out/<name>.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write a checkpoint every N steps.
        #[arg(long)]
        checkpoint_every: Option<u64>,
        /// Continue from a checkpoint written by an earlier run of the same scenario.
        #[arg(long)]
        resume: Option<PathBuf>,
        /// Override the scenario's step cap.
        #[arg(long)]
        max_steps: Option<u64>,
    },
    /// Convergence table of the transport-theorem catalog as CSV.
    VerifyTransport {
        #[arg(long)]
        case: Option<String>,
        #[arg(long, default_value_t = 3)]
        refinements: u32,
    },
    /// Gibbs–Duhem and monotonicity checks of every EOS in a scenario.
    CheckEos { scenario: String },
    /// Run to convergence and print the equilibrium residuals.
    Equilibrium {
        scenario: String,
        #[arg(long)]
        max_steps: Option<u64>,
    },
    /// Summarise a time-series CSV; with --svg also write charts next to it.
    Report {
        csv: PathBuf,
        #[arg(long)]
        svg: bool,
        #[arg(long, default_value_t = 20)]
        rows: usize,
    },
}

const INVALID: u8 = 2;
const RUNTIME: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { scenario, out, checkpoint_every, resume, max_steps } => {
            cmd_run(&scenario, out, checkpoint_every, resume.as_deref(), max_steps)
        }
        Command::VerifyTransport { case, refinements } => cmd_verify(case.as_deref(), refinements),
        Command::CheckEos { scenario } => cmd_check_eos(&scenario),
        Command::Equilibrium { scenario, max_steps } => cmd_equilibrium(&scenario, max_steps),
        Command::Report { csv, svg, rows } => cmd_report(&csv, svg, rows),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

type CmdResult = Result<(), (u8, String)>;

fn load(scenario: &str) -> Result<ScenarioConfig, (u8, String)> {
    resolve_scenario(scenario).map_err(|e| (INVALID, e.to_string()))
}

fn output_dir(out: Option<PathBuf>, name: &str) -> PathBuf {
    out.or_else(|| std::env::var_os("TRILINE_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("triline_out").join(name))
}

fn cmd_run(
    scenario: &str,
    out: Option<PathBuf>,
    checkpoint_every: Option<u64>,
    resume: Option<&Path>,
    max_steps: Option<u64>,
) -> CmdResult {
    let cfg = load(scenario)?;
    let mut params = cfg.run_params();
    if let Some(n) = checkpoint_every {
        params.checkpoint_every = n;
    }
    if let Some(n) = max_steps {
        params.max_steps = n;
    }
    let state = match resume {
        Some(path) => read_checkpoint(path).map_err(|e| (INVALID, format!("{}: {e}", path.display())))?,
        None => cfg.initial_state().map_err(|e| (INVALID, e.to_string()))?,
    };
    let dir = output_dir(out, &cfg.name);
    let mut csv = CsvObserver::new(&dir).map_err(|e| (INVALID, e.to_string()))?;
    let outcome = execute(state, &params, &mut csv);
    csv.finish().map_err(|e| (RUNTIME, e.to_string()))?;
    match outcome {
        Ok(summary) => {
            println!("scenario: {}", cfg.name);
            println!("stopped: {:?} after {} steps at t = {:.6e}", summary.0, summary.1, summary.2.t);
            println!("timeseries: {}", csv.timeseries_path().display());
            println!("snapshots: {}", csv.snapshots.len());
            if let Some(c) = &csv.last_checkpoint {
                println!("last checkpoint: {}", c.display());
            }
            Ok(())
        }
        Err(failure) => {
            let path = csv
                .emergency_checkpoint(&failure.1)
                .map(|p| p.display().to_string())
                .unwrap_or_else(|e| format!("<could not write checkpoint: {e}>"));
            let mut msg = failure.0.to_string();
            if matches!(failure.0, triline::Error::StepRejected { .. }) {
                if let Some((source, bound)) = stability_terms(&failure.1).ok().and_then(|t| t.into_iter().next()) {
                    msg.push_str(&format!("\nlimiting term: {source:?} allows dt <= {bound:.3e}"));
                }
            }
            Err((RUNTIME, format!("{msg}\ncheckpoint: {path}")))
        }
    }
}

fn execute(
    state: SimState,
    params: &RunParams,
    csv: &mut CsvObserver,
) -> Result<(StopReason, u64, SimState), (triline::Error, SimState)> {
    let layout = state.clone();
    let mut writer = RunWriter { csv, layout };
    run(state, params, &mut writer)
        .map(|s| (s.reason, s.steps, s.state))
        .map_err(|f| (f.error, *f.state))
}

fn cmd_verify(case: Option<&str>, refinements: u32) -> CmdResult {
    let cases: Vec<AnalyticCase> = match case {
        Some(name) => vec![case_by_name(name).ok_or_else(|| {
            let names: Vec<_> = catalog().iter().map(|c| c.name).collect();
            (INVALID, format!("unknown case {name}; known: {}", names.join(", ")))
        })?],
        None => catalog(),
    };
    let studies: Vec<_> = std::thread::scope(|s| {
        let handles: Vec<_> = cases.iter().map(|c| s.spawn(move || convergence_study(c, refinements))).collect();
        handles.into_iter().map(|h| h.join().expect("study thread panicked")).collect()
    });
    println!("case,level,h,residual,order");
    let mut failed = vec![];
    for (c, study) in cases.iter().zip(studies) {
        let rows = study.map_err(|e| (RUNTIME, format!("{}: {e}", c.name)))?;
        for r in &rows {
            let order = r.order.map_or(String::new(), |o| format!("{o:.4}"));
            println!("{},{},{:e},{:e},{}", r.case, r.level, r.h, r.residual, order);
        }
        if !study_passes(c, &rows) {
            failed.push(c.name);
        }
    }
    if failed.is_empty() {
        eprintln!("all {} case(s) meet their expectation", cases.len());
        Ok(())
    } else {
        Err((RUNTIME, format!("cases below expectation: {}", failed.join(", "))))
    }
}

fn cmd_check_eos(scenario: &str) -> CmdResult {
    let cfg = load(scenario)?;
    let state = cfg.initial_state().map_err(|e| (INVALID, e.to_string()))?;
    println!("eos,kind,samples,max_gibbs_duhem,mu_increasing");
    let mut ok = true;
    for p in &state.phases {
        let c = check_bulk_eos(&p.eos, 100).map_err(|e| (RUNTIME, e.to_string()))?;
        ok &= c.max_residual <= 1e-8 && c.mu_increasing;
        println!("{},bulk,{},{:e},{}", p.label, c.samples, c.max_residual, c.mu_increasing);
    }
    let mut seen = vec![];
    for (name, spec) in &cfg.interface {
        let eos = triline::thermo::SurfaceEos { gamma0: spec.gamma0, rho_star: spec.rho_star, psi_offset: spec.psi_offset };
        if seen.contains(&eos) {
            continue;
        }
        seen.push(eos);
        let c = check_surface_eos(&eos, 100).map_err(|e| (RUNTIME, e.to_string()))?;
        ok &= c.max_residual <= 1e-8 && c.mu_increasing;
        println!("{name},surface,{},{:e},{}", c.samples, c.max_residual, c.mu_increasing);
    }
    if ok {
        Ok(())
    } else {
        Err((RUNTIME, "an equation of state failed its consistency check".into()))
    }
}

fn cmd_equilibrium(scenario: &str, max_steps: Option<u64>) -> CmdResult {
    let cfg = load(scenario)?;
    let mut params = cfg.run_params();
    params.record_every = 0;
    params.snapshot_every = 0;
    params.checkpoint_every = 0;
    if let Some(n) = max_steps {
        params.max_steps = n;
    }
    let state = cfg.initial_state().map_err(|e| (INVALID, e.to_string()))?;
    let summary = run(state, &params, &mut ()).map_err(|f| (RUNTIME, f.error.to_string()))?;
    println!("scenario: {}", cfg.name);
    println!(
        "stopped: {:?} after {} steps at t = {:.6e}, max speed {:.3e}, max flux {:.3e}",
        summary.reason, summary.steps, summary.state.t, summary.last.max_speed, summary.last.max_flux
    );
    let rep = equilibrium_report(&summary.state).map_err(|e| (RUNTIME, e.to_string()))?;
    for j in &rep.junctions {
        let angles: Vec<String> = j.angles.iter().map(|a| format!("{} {:.4} deg", a.phase, a.degrees())).collect();
        println!("junction {}: {}; kirchhoff residual {:.3e}", j.junction, angles.join(", "), j.kirchhoff);
        if let Some(a) = j.affinity {
            println!("junction {}: max |mu_k - mu_C| = {a:.3e}", j.junction);
        }
    }
    for l in &rep.laplace {
        let rel = l.relative.map_or("flat".to_string(), |r| format!("{r:.3e}"));
        println!("curve {}: jump {:.6e}, gamma*kappa {:.6e}, relative residual {rel}", l.curve, l.jump, l.gamma_kappa);
    }
    if let Some(a) = rep.sorption_affinity {
        println!("sorption: max |mu_k - mu_S| = {a:.3e}");
    }
    if summary.reason != StopReason::Converged {
        eprintln!("warning: run stopped before reaching the convergence threshold");
    }
    Ok(())
}

fn cmd_report(csv: &Path, svg: bool, rows: usize) -> CmdResult {
    let table = read_table(csv).map_err(|e| (INVALID, format!("{}: {e}", csv.display())))?;
    print!("{}", render_report(&table, rows).map_err(|e| (INVALID, e.to_string()))?);
    if svg {
        let (energy, channels) = report_charts(&table).map_err(|e| (INVALID, e.to_string()))?;
        let stem = csv.file_stem().and_then(|s| s.to_str()).unwrap_or("report");
        let dir = csv.parent().unwrap_or(Path::new("."));
        for (suffix, body) in [("energy", energy), ("channels", channels)] {
            let path = dir.join(format!("{stem}_{suffix}.svg"));
            std::fs::write(&path, body).map_err(|e| (RUNTIME, format!("{}: {e}", path.display())))?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}
