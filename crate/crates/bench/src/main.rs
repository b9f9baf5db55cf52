use std::process::ExitCode;

use clap::Parser;
use ipg_bench::cli::Args;
use ipg_bench::run_and_write;
use log::{error, info};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let result = Args::parse().into_config().and_then(|cfg| {
        let out = run_and_write(&cfg)?;
        info!("{} solver runs, results in {}", out.invocations, cfg.out.display());
        Ok(out)
    });
    match result {
        Ok(out) if out.all_completed => ExitCode::SUCCESS,
        Ok(_) => {
            error!("some runs hit the iteration cap without converging");
            ExitCode::from(2)
        }
        Err(e) => {
            error!("{e:#}");
            ExitCode::FAILURE
        }
    }
}
