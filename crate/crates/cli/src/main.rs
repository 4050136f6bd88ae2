use std::path::PathBuf;
use std::process::ExitCode;

use clap::{CommandFactory, Parser};
use holocomp_cli::{command_list, run, Options};

#[derive(Parser)]
#[command(
    name = "holocomp",
    version,
    about = "Numerical checks for composition operators on the disc and bidisc",
    after_help = command_list(),
    override_usage = "holocomp <command> --config <path> [--out <dir>] [--seed <u64>] [--resolution <n>]"
)]
struct Cli {
    /// Check to run.
    command: Option<String>,
    /// JSON job config.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (default `holocomp-out`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for every random draw.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the command's main discretisation parameter.
    #[arg(long)]
    resolution: Option<usize>,
}

fn threads() -> Result<(), String> {
    let Ok(v) = std::env::var("HOLOCOMP_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| format!("HOLOCOMP_THREADS must be a positive integer, got `{v}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let Some(command) = cli.command else {
        let _ = Cli::command().print_help();
        return ExitCode::SUCCESS;
    };
    if let Err(e) = threads() {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    if holocomp_cli::COMMANDS.iter().all(|(c, _)| *c != command) {
        match holocomp_cli::suggest(&command) {
            Some(s) => eprintln!("error: unknown command `{command}`; did you mean `{s}`?"),
            None => eprintln!("error: unknown command `{command}`"),
        }
        eprint!("{}", command_list());
        return ExitCode::from(1);
    }
    let Some(config) = cli.config else {
        eprintln!("error: `{command}` needs --config <path>");
        return ExitCode::from(1);
    };
    let opts = Options {
        config,
        out: cli.out,
        seed: cli.seed,
        resolution: cli.resolution,
    };
    match run(&command, &opts) {
        Ok(s) => {
            println!("{command}: {:?} -> {}", s.status, s.dir.display());
            if s.status.success() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
