use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qnet_energy::catalog::{Catalog, ValueMode};
use qnet_energy::reproduce::{reproduce, Exhibit};
use qnet_energy::scenario::{
    rows_to_csv, rows_to_json, run_scenario, OutputFormat, RowStatus, Scenario,
};
use qnet_energy::svg::{emit_svg, AxesSpec, Series};
use qnet_energy::Error;

/// Rate and energy simulator for photonic quantum-network protocols.
#[derive(Parser)]
#[command(name = "qnet-energy", version, about)]
struct Cli {
    #[command(flatten)]
    common: Common,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Catalog file (TOML); defaults to $QNET_CATALOG or the builtin set.
    #[arg(long, global = true)]
    catalog: Option<String>,

    /// Prefer measured component values over datasheet ratings.
    #[arg(long, global = true)]
    measured: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect the component catalog.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Run a scenario file (single point or sweep).
    Run {
        /// Scenario file (TOML).
        scenario: PathBuf,
        /// Output format override.
        #[arg(long)]
        format: Option<CliFormat>,
        /// Write the table here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also render the sweep as an SVG chart at this path.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Regenerate a reference table or figure (or `all`).
    Reproduce {
        /// Exhibit name, e.g. `table4`, `fig_ee`; `all` runs every one.
        exhibit: String,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    /// List every component with its headline numbers.
    List,
    /// Show one component in full.
    Show { id: String },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum CliFormat {
    Csv,
    Json,
}

fn load_catalog(common: &Common) -> Result<Catalog, Error> {
    let path = common
        .catalog
        .clone()
        .or_else(|| std::env::var("QNET_CATALOG").ok())
        .unwrap_or_else(|| "builtin".to_string());
    let cat = Catalog::load(&path)?;
    Ok(if common.measured {
        cat.with_value_mode(ValueMode::MeasuredPreferred)
    } else {
        cat
    })
}

fn real_main(cli: Cli) -> Result<u8, Error> {
    let cat = load_catalog(&cli.common)?;
    match cli.command {
        Command::Catalog { action } => match action {
            CatalogAction::List => {
                for c in cat.components() {
                    println!("{c}");
                }
                for (wl, loss) in cat.fibers() {
                    println!("fiber {wl} nm: {loss} dB/km");
                }
                Ok(0)
            }
            CatalogAction::Show { id } => {
                let c = cat.component(&id)?;
                println!("{}", serde_json::to_string_pretty(c).expect("component serializes"));
                Ok(0)
            }
        },
        Command::Run {
            scenario,
            format,
            out,
            svg,
        } => {
            let mut sc = Scenario::load(&scenario)?;
            if cli.common.measured {
                sc.value_mode = ValueMode::MeasuredPreferred;
            }
            let rows = run_scenario(&sc, &cat)?;
            let column = sc
                .sweep
                .map(|s| s.parameter.column_name())
                .unwrap_or("distance_km");
            let format = match format {
                Some(CliFormat::Csv) => OutputFormat::Csv,
                Some(CliFormat::Json) => OutputFormat::Json,
                None => sc.output.format,
            };
            let rendered = match format {
                OutputFormat::Csv => rows_to_csv(column, &rows),
                OutputFormat::Json => rows_to_json(&rows),
            };
            match out {
                Some(path) => std::fs::write(path, rendered)?,
                None => print!("{rendered}"),
            }
            let svg_path = svg.or_else(|| sc.output.svg.as_ref().map(PathBuf::from));
            if let Some(path) = svg_path {
                let points: Vec<(f64, f64)> = rows
                    .iter()
                    .filter_map(|r| r.total_j.map(|t| (r.value, t)))
                    .collect();
                let doc = emit_svg(
                    &[Series::new("total energy (J)", points)],
                    &AxesSpec {
                        title: format!("{:?}", sc.protocol.family).to_lowercase(),
                        x_label: column.to_string(),
                        y_label: "energy (J)".into(),
                        x_log: false,
                        y_log: true,
                    },
                )?;
                std::fs::write(path, doc.content)?;
            }
            if rows.iter().all(|r| r.status == RowStatus::Infeasible) {
                return Ok(2);
            }
            Ok(0)
        }
        Command::Reproduce { exhibit, out } => {
            let exhibits: Vec<Exhibit> = if exhibit == "all" {
                Exhibit::all().to_vec()
            } else {
                vec![exhibit.parse()?]
            };
            for e in exhibits {
                let files = reproduce(e, &cat, &out)?;
                for f in files {
                    println!("{}", f.display());
                }
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match real_main(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Io(_) => 3u8,
                _ => 1u8,
            };
            ExitCode::from(code)
        }
    }
}
