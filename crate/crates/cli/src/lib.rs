//! Command-line driver for the SPZF Monte Carlo experiments.

pub mod args;
pub mod config;
pub mod csv;
pub mod experiments;
pub mod solve;

use std::fs::File;
use std::io::{self, BufWriter};
use std::time::Instant;

use anyhow::{Context, Result};

use args::{Cli, Command, GridArgs};
use experiments::{run_experiment, Experiment, Grid};

pub fn run(cli: Cli) -> Result<()> {
    let (exp, args) = match &cli.command {
        Command::Solve(a) => return solve::run(a, &mut io::stdout().lock()),
        Command::Fray(a) => (Experiment::Fray, a),
        Command::Outage(a) => (Experiment::Outage, a),
        Command::MinOutage(a) => (Experiment::MinOutage, a),
        Command::Secrecy(a) => (Experiment::Secrecy, a),
        Command::Runtime(a) => (Experiment::Runtime, a),
    };
    run_grid(exp, args)
}

fn run_grid(exp: Experiment, args: &GridArgs) -> Result<()> {
    let settings = args.settings()?;
    let grid = Grid::resolve(exp, &settings)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = settings.threads()? {
        pool = pool.num_threads(t);
    }
    let pool = pool.build().context("cannot start worker threads")?;

    let start = Instant::now();
    let rows = pool.install(|| run_experiment(exp, &grid))?;
    let elapsed = start.elapsed().as_secs_f64();

    match settings.get("out") {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("cannot write {path}"))?;
            csv::write_csv(&mut BufWriter::new(file), &rows).with_context(|| format!("cannot write {path}"))?;
            println!("{}: {} rows in {elapsed:.2} s -> {path}", exp.id(), rows.len());
        }
        None => {
            csv::write_csv(&mut io::stdout().lock(), &rows)?;
            eprintln!("{}: {} rows in {elapsed:.2} s", exp.id(), rows.len());
        }
    }
    Ok(())
}
