//! Scenario-driven experiment runner for RIS-link performance analysis.
//!
//! Exit codes: 0 success, 1 validation failures present, 2 configuration
//! error, 3 numerical non-convergence.

mod figures;
mod runner;
mod scenario;
mod validate;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rislink::cascade::Which;
use rislink::Error;

use runner::{Row, RunMethod, CSV_HEADER};
use scenario::Settings;
use validate::Suite;

#[derive(Parser)]
#[command(name = "rislink", version, about = "RIS-assisted link performance analysis")]
struct Cli {
    /// Scenario file (flat `key = value`, `#` comments); defaults to the
    /// built-in reference scenario.
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,
    /// Override the scenario's Monte Carlo seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the scenario's Monte Carlo trial count.
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Comma-separated method list: exact,bound,asymptotic,mc.
    #[arg(long, global = true)]
    method: Option<String>,
    /// Output directory for CSV artifacts and the run manifest.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker thread count (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Outage probability swept over transmit power.
    Outage,
    /// Average bit-error rate swept over transmit power.
    Ber,
    /// Combined-SNR probability density on the scenario grid.
    Pdf,
    /// Combined-SNR distribution function on the scenario grid.
    Cdf,
    /// Run the analytic validation suite and emit a report.
    Validate {
        /// fast: identities and normalizations; full: adds million-sample
        /// Monte Carlo cross-checks.
        #[arg(default_value = "fast")]
        suite: String,
    },
    /// Emit the data series of a published figure (2..=7) as CSV.
    ReproduceFigure { figure: u8 },
}

fn load_settings(cli: &Cli) -> Result<Settings, scenario::ConfigError> {
    let mut s = match &cli.scenario {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| {
                scenario::ConfigError(format!("cannot read scenario file {}: {e}", path.display()))
            })?;
            Settings::parse(&text)?
        }
        None => Settings::default(),
    };
    if let Some(seed) = cli.seed {
        s.seed = seed;
    }
    if let Some(trials) = cli.trials {
        if trials == 0 {
            return Err(scenario::ConfigError("--trials must be >= 1".into()));
        }
        s.trials = trials;
    }
    Ok(s)
}

fn write_artifacts(
    out: &Path,
    name: &str,
    rows: &[Row],
    settings: &Settings,
    command: &str,
) -> std::io::Result<PathBuf> {
    fs::create_dir_all(out)?;
    let csv_path = out.join(format!("{name}.csv"));
    let mut body = String::from(CSV_HEADER);
    body.push('\n');
    for row in rows {
        body.push_str(&row.csv_line());
        body.push('\n');
    }
    fs::write(&csv_path, body)?;
    let manifest = format!(
        "command = {command}\nscenario_hash = {}\nseed = {}\ntrials = {}\nversion = {}\n",
        settings.hash(),
        settings.seed,
        settings.trials,
        env!("CARGO_PKG_VERSION"),
    );
    fs::write(out.join("manifest.txt"), manifest)?;
    fs::write(out.join("scenario.resolved"), settings.render())?;
    Ok(csv_path)
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::NonConvergentIntegral { .. }
        | Error::QuadratureFailure(_)
        | Error::TruncationNotConverged { .. } => 3,
        _ => 2,
    }
}

fn run() -> Result<u8, (u8, String)> {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| (2, format!("thread pool: {e}")))?;
    }
    let settings = load_settings(&cli).map_err(|e| (2, e.to_string()))?;
    let methods = match &cli.method {
        Some(list) => RunMethod::parse_list(list).map_err(|e| (2, e))?,
        None => vec![RunMethod::Bound, RunMethod::Mc],
    };

    let (name, result): (String, Result<(Vec<Row>, Vec<String>), Error>) = match &cli.command {
        Command::Outage => ("outage".into(), runner::run_outage(&settings, &methods)),
        Command::Ber => ("ber".into(), runner::run_ber(&settings, &methods)),
        Command::Pdf => ("pdf".into(), runner::run_density(&settings, &methods, Which::Pdf)),
        Command::Cdf => ("cdf".into(), runner::run_density(&settings, &methods, Which::Cdf)),
        Command::Validate { suite } => {
            let suite = match suite.as_str() {
                "fast" => Suite::Fast,
                "full" => Suite::Full,
                other => return Err((2, format!("unknown suite `{other}` (want fast|full)"))),
            };
            let report = validate::run(suite);
            print!("{}", report.render_text());
            fs::create_dir_all(&cli.out).map_err(|e| (2, format!("output dir: {e}")))?;
            fs::write(cli.out.join("validation.csv"), report.render_csv())
                .map_err(|e| (2, format!("write report: {e}")))?;
            let manifest = format!(
                "command = validate\nscenario_hash = {}\nseed = {}\ntrials = {}\nversion = {}\n",
                settings.hash(),
                settings.seed,
                settings.trials,
                env!("CARGO_PKG_VERSION"),
            );
            fs::write(cli.out.join("manifest.txt"), manifest)
                .map_err(|e| (2, format!("write manifest: {e}")))?;
            return Ok(if report.all_pass() { 0 } else { 1 });
        }
        Command::ReproduceFigure { figure } => (
            format!("figure{figure}"),
            figures::reproduce(*figure, &settings),
        ),
    };

    match result {
        Ok((rows, notes)) => {
            for note in notes {
                eprintln!("note: {note}");
            }
            let path = write_artifacts(&cli.out, &name, &rows, &settings, &name)
                .map_err(|e| (2, format!("write artifacts: {e}")))?;
            println!("wrote {} rows to {}", rows.len(), path.display());
            Ok(0)
        }
        Err(e) => Err((exit_code_for(&e), e.to_string())),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
