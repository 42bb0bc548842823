use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use satqkd_planner::{
    parse_scenario, run_command, write_reports, CliError, Command, ErrorKind, OutputFormat,
};

/// Satellite QKD feasibility planner.
#[derive(Parser, Debug)]
#[command(name = "satqkd-planner", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,

    /// Scenario file (TOML).
    #[arg(long)]
    config: PathBuf,

    /// Output directory; overrides `output_dir` from the scenario.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Output format; overrides `output_format` from the scenario.
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
}

fn run(args: Args) -> Result<(), CliError> {
    let config = parse_scenario(&args.config)?;
    let dir = args.out.unwrap_or_else(|| config.output_dir.clone());
    let format = args.format.unwrap_or(config.output_format);
    let reports = run_command(&config, args.command)?;
    let paths = write_reports(&reports, &dir, format)?;
    for (report, path) in reports.iter().zip(paths) {
        println!("{}: {} rows, {}", path.display(), report.data.len(), report.summary);
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::new(ErrorKind::Usage, e.render().to_string().trim_end());
            eprintln!("{}", err.to_json());
            return ExitCode::from(err.exit_code() as u8);
        }
    };
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", err.to_json());
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
