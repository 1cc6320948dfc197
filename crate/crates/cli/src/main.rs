use clap::{Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use slit_fringe::fringe::{compare, find_extrema, DEFAULT_NOISE_FLOOR};
use slit_fringe_cli::scenario::{resolve_out_dir, ExtremaOut};
use slit_fringe_cli::{check_bounds, parse_config, run_scenario, CliError, Result, ScenarioConfig, Table};

#[derive(Parser)]
#[command(name = "slit-fringe", version, about = "Two-slit density simulations: Schrödinger vs nonlocal advection-diffusion")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write profile CSVs plus summary.json.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's output_dir.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Locate extrema of one CSV column inside a window.
    Extrema {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        column: String,
        /// lo:hi
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
        window: (f64, f64),
        #[arg(long, default_value_t = DEFAULT_NOISE_FLOOR)]
        noise_floor: f64,
    },
    /// Check the space-time dilation bound for pairs t:T.
    CheckBounds {
        #[arg(long)]
        config: PathBuf,
        /// Comma separated t:T pairs; T follows the config's pi_units.
        #[arg(long, value_parser = parse_window, value_delimiter = ',', required = true)]
        pairs: Vec<(f64, f64)>,
    },
    /// Sup and L1 differences between the shared columns of two CSVs.
    Compare {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// Restrict to one column.
        #[arg(long)]
        column: Option<String>,
    },
}

fn parse_window(s: &str) -> std::result::Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(':').ok_or("expected lo:hi")?;
    let lo: f64 = lo.trim().parse().map_err(|_| format!("bad lower bound `{lo}`"))?;
    let hi: f64 = hi.trim().parse().map_err(|_| format!("bad upper bound `{hi}`"))?;
    Ok((lo, hi))
}

fn load_config(path: &Path) -> Result<ScenarioConfig> {
    let text = std::fs::read(path).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    parse_config(&text)
}

fn print_json<T: serde::Serialize>(v: &T) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate { config, out } => {
            let cfg = load_config(&config)?;
            let dir = resolve_out_dir(&cfg, out);
            let summary = run_scenario(&cfg, &dir)?;
            for t in &summary.times {
                println!("{} ({} nodes on [{}, {}])", t.file, t.n, t.x_min, t.x_max);
            }
            if summary.passed() {
                println!("wrote {}", dir.display());
                Ok(())
            } else {
                Err(CliError::ChecksFailed(summary.failures))
            }
        }
        Command::Extrema {
            input,
            column,
            window,
            noise_floor,
        } => {
            let table = Table::read(&input)?;
            let p = table.profile(&column, 0.0).ok_or_else(|| CliError::Input {
                path: input.clone(),
                message: format!("no column `{column}`"),
            })??;
            let report = find_extrema(&p, window, noise_floor)?;
            print_json(&ExtremaOut::from_report(&report));
            Ok(())
        }
        Command::CheckBounds { config, pairs } => {
            let cfg = load_config(&config)?;
            let report = check_bounds(&cfg, &pairs)?;
            print_json(&report);
            if report.passed {
                Ok(())
            } else {
                Err(CliError::ChecksFailed(vec!["dilation bound violated".into()]))
            }
        }
        Command::Compare { a, b, column } => {
            let (ta, tb) = (Table::read(&a)?, Table::read(&b)?);
            let names: Vec<String> = match column {
                Some(c) => vec![c],
                None => ta
                    .columns
                    .iter()
                    .map(|(n, _)| n.clone())
                    .filter(|n| tb.column(n).is_some())
                    .collect(),
            };
            let mut out = serde_json::Map::new();
            for name in names {
                let missing = |path: &Path| CliError::Input {
                    path: path.to_path_buf(),
                    message: format!("no column `{name}`"),
                };
                let pa = ta.profile(&name, 0.0).ok_or_else(|| missing(&a))??;
                let pb = tb.profile(&name, 0.0).ok_or_else(|| missing(&b))??;
                let (sup, l1) = compare(&pa, &pb)?;
                out.insert(name, serde_json::json!({ "sup": sup, "l1": l1 }));
            }
            print_json(&out);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
