use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use swarm_morph::io::{default_out_dir, load_scenario, run_experiment, sweep_argmin, ExperimentResult, Mode};

#[derive(Parser)]
#[command(name = "swarm-morph", version, about = "Swarm obstacle-passing simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment named by the scenario's `experiment.mode`.
    Run(Common),
    /// Force every two-way split through the engine and tabulate transit times.
    Sweep(Common),
    /// Run the optimized plan and the nearest-corner baseline side by side.
    Compare(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    scenario: PathBuf,
    /// Output directory [default: out/<scenario stem>]
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override `swarm.dt`, seconds.
    #[arg(long)]
    dt: Option<f64>,
    /// Override `experiment.seed`.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (args, forced) = match cli.command {
        Command::Run(a) => (a, None),
        Command::Sweep(a) => (a, Some(Mode::SweepSplits)),
        Command::Compare(a) => (a, Some(Mode::CompareBaseline)),
    };
    match execute(&args, forced) {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}

fn execute(args: &Common, forced: Option<Mode>) -> Result<(), String> {
    let origin = args.scenario.display();
    let mut file = load_scenario(&args.scenario).map_err(|e| format!("{origin}: {e}"))?;
    if let Some(dt) = args.dt {
        file.swarm.dt = dt;
    }
    if let Some(seed) = args.seed {
        file.experiment.seed = seed;
    }
    let mode = forced.unwrap_or(file.experiment.mode);
    file.experiment.mode = mode;
    let dir = args.out.clone().unwrap_or_else(|| default_out_dir(&args.scenario));
    let result = run_experiment(&file, mode, &dir).map_err(|e| format!("{origin}: {e}"))?;

    match result {
        ExperimentResult::Single(out) => {
            report_run("run", &out);
            if !out.complete {
                eprintln!("warning: time budget expired before the goal was reached; trace is partial");
            }
        }
        ExperimentResult::Sweep(rows) => {
            for r in &rows {
                match r.time_s {
                    Some(t) => println!("split {}/{}: {t:.1} s", r.k_left, r.k_right),
                    None => println!("split {}/{}: infeasible", r.k_left, r.k_right),
                }
            }
            if let Some(best) = sweep_argmin(&rows) {
                println!("fastest split: {}/{}", best.k_left, best.k_right);
            }
        }
        ExperimentResult::Compare(c) => {
            report_run("proposed", &c.proposed);
            report_run("baseline", &c.baseline);
            if let Some(d) = c.energy_delta_pct() {
                println!("baseline energy vs proposed: {d:+.2}% (full mission)");
            }
            if let Some(d) = c.transit_energy_delta_pct() {
                println!("baseline energy vs proposed: {d:+.2}% (avoidance only)");
            }
        }
    }
    println!("outputs written to {}", dir.display());
    Ok(())
}

fn report_run(label: &str, out: &swarm_morph::engine::RunOutput) {
    let splits: Vec<String> =
        out.events.iter().map(|e| format!("{}@{:.1}s {:?}", e.group, e.tick as f64 * out.dt, e.plan.sizes)).collect();
    let transit = out.first_transit_time().map_or_else(|| "n/a".to_string(), |t| format!("{t:.1} s"));
    println!(
        "{label}: {} ticks, complete={}, energy {:.1} J, first transit {transit}, splits [{}]",
        out.final_state.tick,
        out.complete,
        out.energy.swarm_total(),
        splits.join(", ")
    );
}
