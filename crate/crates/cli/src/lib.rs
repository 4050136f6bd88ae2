//! Command-line driver: loads a JSON job config, runs the matching check and
//! writes `report.json`, `grid.csv` and `heatmap.svg` atomically.

pub mod error;
pub mod heatmap;
pub mod jobs;

use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde_json::{json, Value};

pub use error::{CliError, Result};
use jobs::*;

/// Schema tag carried by every report.
pub const SCHEMA: &str = "holocomp/1";

/// Seed used when neither the config nor the command line sets one.
pub const DEFAULT_SEED: u64 = 1;

/// Every command with a one-line description.
pub const COMMANDS: [(&str, &str); 14] = [
    ("norm", "coefficient and integral Dirichlet-type norms of a polynomial"),
    ("energy", "norm of a composition directly and through counting functions"),
    ("cov-verify", "change-of-variables identity for a separated symbol"),
    ("separated-verdict", "counting-function sup profiles of both coordinate maps"),
    ("kernel-ratio", "kernel-ratio necessary condition on a polar grid"),
    ("balooch-wu", "double-integral norm against the coefficient norm"),
    ("box-volume", "weighted volume of Carleson boxes"),
    ("pullback-volume", "pull-back volume of a box union by sampling"),
    ("psi-check", "admissibility of a gauge function psi"),
    ("one-box-check", "dyadic one-box sweep of the pull-back measure"),
    ("kernel-integral", "kernel-integral sufficient condition on probe points"),
    ("capacity", "discrete Bessel capacity of a rectangle union"),
    ("capacity-condition", "pull-back volumes against capacities of matching rectangles"),
    ("aleman", "sub-mean-value diagnostic of the counting function"),
];

/// Command-line settings that override the config.
#[derive(Debug, Clone, Default)]
pub struct Options {
    pub config: PathBuf,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub resolution: Option<usize>,
}

/// What a finished run produced.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub status: Status,
    pub dir: PathBuf,
    pub files: Vec<PathBuf>,
}

/// Closest known command, if any is reasonably similar.
pub fn suggest(name: &str) -> Option<&'static str> {
    COMMANDS
        .iter()
        .map(|(c, _)| (*c, strsim::jaro_winkler(name, c)))
        .filter(|(_, s)| *s > 0.7)
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(c, _)| c)
}

pub fn command_list() -> String {
    let mut s = String::from("Commands:\n");
    for (c, d) in COMMANDS {
        s.push_str(&format!("  {c:<20}{d}\n"));
    }
    s
}

fn parse<J: DeserializeOwned>(path: &Path, text: &str) -> Result<J> {
    serde_json::from_str(text).map_err(|e| CliError::config(path, e))
}

/// Runs `command` with the config at `opts.config`.
pub fn run(command: &str, opts: &Options) -> Result<RunSummary> {
    let text = std::fs::read_to_string(&opts.config)
        .map_err(|e| CliError::io(format!("cannot read {}", opts.config.display()), e))?;
    let p = opts.config.as_path();
    match command {
        "norm" => execute(command, parse::<NormJob>(p, &text)?, opts),
        "energy" => execute(command, parse::<EnergyJob>(p, &text)?, opts),
        "cov-verify" => execute(command, parse::<CovJob>(p, &text)?, opts),
        "separated-verdict" => execute(command, parse::<SeparatedJob>(p, &text)?, opts),
        "kernel-ratio" => execute(command, parse::<KernelRatioJob>(p, &text)?, opts),
        "balooch-wu" => execute(command, parse::<BaloochWuJob>(p, &text)?, opts),
        "box-volume" => execute(command, parse::<BoxVolumeJob>(p, &text)?, opts),
        "pullback-volume" => execute(command, parse::<PullbackVolumeJob>(p, &text)?, opts),
        "psi-check" => execute(command, parse::<PsiJob>(p, &text)?, opts),
        "one-box-check" => execute(command, parse::<OneBoxJob>(p, &text)?, opts),
        "kernel-integral" => execute(command, parse::<KernelIntegralJob>(p, &text)?, opts),
        "capacity" => execute(command, parse::<CapacityJob>(p, &text)?, opts),
        "capacity-condition" => execute(command, parse::<CapacityConditionJob>(p, &text)?, opts),
        "aleman" => execute(command, parse::<AlemanJob>(p, &text)?, opts),
        other => Err(CliError::Usage(match suggest(other) {
            Some(s) => format!("unknown command `{other}`; did you mean `{s}`?"),
            None => format!("unknown command `{other}`"),
        })),
    }
}

fn execute<J: Job>(command: &str, job: J, opts: &Options) -> Result<RunSummary> {
    if let Some(c) = job.command() {
        if c != command {
            return Err(CliError::Usage(format!(
                "config {} is for `{c}`, not `{command}`",
                opts.config.display()
            )));
        }
    }
    let ctx = Context {
        seed: opts.seed.or(job.seed()).unwrap_or(DEFAULT_SEED),
        resolution: opts.resolution.or(job.resolution()),
    };
    let dir = opts
        .out
        .clone()
        .or_else(|| job.out().map(Path::to_path_buf))
        .unwrap_or_else(|| PathBuf::from("holocomp-out"));
    let outcome = job.execute(ctx)?;
    let report = json!({
        "schema": SCHEMA,
        "command": command,
        "status": outcome.status,
        "seed": ctx.seed,
        "resolution": ctx.resolution,
        "resolution_meaning": J::RESOLUTION,
        "config": serde_json::to_value(&job).unwrap_or(Value::Null),
        "result": outcome.result,
        "warnings": outcome.warnings,
    });
    std::fs::create_dir_all(&dir).map_err(|e| CliError::io(format!("cannot create {}", dir.display()), e))?;
    let mut files = Vec::new();
    let mut body = serde_json::to_string_pretty(&report).expect("JSON values serialise");
    body.push('\n');
    files.push(write_atomic(&dir, "report.json", &body)?);
    let csv = outcome.csv.or_else(|| outcome.field.as_ref().map(|f| f.to_csv()));
    if let Some(csv) = csv {
        files.push(write_atomic(&dir, "grid.csv", &csv)?);
    }
    if let Some(field) = &outcome.field {
        let svg = heatmap::render(field, command)?;
        files.push(write_atomic(&dir, "heatmap.svg", &svg)?);
    }
    Ok(RunSummary {
        status: outcome.status,
        dir,
        files,
    })
}

/// Writes through a temporary file in the same directory and renames it.
pub fn write_atomic(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    let target = dir.join(name);
    let ctx = || format!("cannot write {}", target.display());
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(ctx(), e))?;
    tmp.write_all(contents.as_bytes()).map_err(|e| CliError::io(ctx(), e))?;
    // temporary files are created owner-only; reports are ordinary files
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        tmp.as_file()
            .set_permissions(std::fs::Permissions::from_mode(0o644))
            .map_err(|e| CliError::io(ctx(), e))?;
    }
    tmp.persist(&target).map_err(|e| CliError::io(ctx(), e.error))?;
    Ok(target)
}
