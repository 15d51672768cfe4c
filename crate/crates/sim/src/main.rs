use clap::Parser;
use twr_sim::{output, run, Cli, ScenarioSpec, SimResult};

fn main_inner() -> SimResult<()> {
    let cli = Cli::parse();
    let spec = ScenarioSpec::from_cli(&cli)?;
    let report = run(&spec)?;
    output::emit(&report, &spec)
}

fn main() {
    if let Err(e) = main_inner() {
        eprintln!("twr-sim: {e}");
        std::process::exit(e.exit_code());
    }
}
