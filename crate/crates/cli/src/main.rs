use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dashlang_core::compare::diff;
use dashlang_core::compose::{compose_page_with, export_html, ComposeError, ComposeOptions};
use dashlang_core::edit::{apply_edit_script, parse_edit_script};
use dashlang_core::metrics::{generate_series, GeneratorSpec, MetricSeries, SeriesKind, SeriesStore};
use dashlang_core::model::{parse_model, serialize_model, validate_model, DashboardModel, PageMode};
use dashlang_service::{serve, ServeConfig, ServeError};

#[derive(Parser)]
#[command(name = "dashlang", version, about = "Validate, render, edit and compare dashboard documents")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a dashboard document and list every rule violation.
    Validate { file: PathBuf },
    /// Render one page to a standalone HTML file.
    Render {
        file: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        /// Page id or index; defaults to the first page.
        #[arg(long)]
        page: Option<String>,
        #[arg(long, default_value = "full")]
        mode: String,
        /// Seed of placeholder data for unbound widgets.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Directory of metric series JSON files.
        #[arg(long)]
        metrics: Option<PathBuf>,
    },
    /// Serve the HTTP API over a data directory.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "data")]
        data_dir: PathBuf,
        #[arg(long)]
        cors_origin: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Apply a JSON array of edit commands.
    Edit {
        file: PathBuf,
        #[arg(long)]
        script: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Compare the design decisions of an original and a replica.
    Diff {
        original: PathBuf,
        replica: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Write a minimal valid dashboard.
    New {
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long, default_value = "dashboard")]
        id: String,
        #[arg(long, default_value = "Untitled")]
        name: String,
    },
    /// Write a synthetic metric series.
    GenData {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "categorical")]
        kind: String,
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[arg(long, default_value = "generated")]
        id: String,
        #[arg(short, long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

/// Failure carrying its exit code: 1 for bad input, 2 for usage problems.
struct Failure {
    code: u8,
    message: String,
}

fn input(message: impl ToString) -> Failure {
    Failure { code: 1, message: message.to_string() }
}

fn usage(message: impl ToString) -> Failure {
    Failure { code: 2, message: message.to_string() }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<DashboardModel, Failure> {
    parse_model(&read(path)?).map_err(|e| input(format!("{}: {e}", path.display())))
}

/// Load and refuse documents with violations, printing them first.
fn load_valid(path: &Path) -> Result<DashboardModel, Failure> {
    let model = load(path)?;
    let report = validate_model(&model);
    if !report.is_valid() {
        for v in &report.violations {
            eprintln!("{} {} {}", v.rule.as_str(), v.path, v.message);
        }
        return Err(input(format!("{}: {} violation(s)", path.display(), report.violations.len())));
    }
    Ok(model)
}

fn load_metrics(dir: &Path) -> Result<SeriesStore, Failure> {
    let store = SeriesStore::new();
    let entries = fs::read_dir(dir).map_err(|e| usage(format!("{}: {e}", dir.display())))?;
    for entry in entries {
        let path = entry.map_err(usage)?.path();
        if path.extension().is_some_and(|e| e == "json") {
            let series = MetricSeries::from_json(&read(&path)?).map_err(|e| input(format!("{}: {e}", path.display())))?;
            store.put(series).map_err(|e| input(format!("{}: {e}", path.display())))?;
        }
    }
    Ok(store)
}

fn run(cmd: Cmd) -> Result<(), Failure> {
    match cmd {
        Cmd::Validate { file } => {
            load_valid(&file)?;
            println!("{}: ok", file.display());
        }
        Cmd::Render { file, out, page, mode, seed, metrics } => {
            let model = load_valid(&file)?;
            let mode: PageMode = mode.parse().map_err(usage)?;
            let data = match metrics {
                Some(dir) => load_metrics(&dir)?,
                None => SeriesStore::new(),
            };
            let page = page.unwrap_or_else(|| model.pages[0].id.clone());
            let options = ComposeOptions { seed, ..ComposeOptions::default() };
            let tree = compose_page_with(&model, &page, &data, mode, options).map_err(|e| match e {
                ComposeError::UnknownPage(_) => usage(e),
            })?;
            write(&out, &export_html(&tree))?;
        }
        Cmd::Serve { port, data_dir, cors_origin, seed } => {
            let runtime = tokio::runtime::Runtime::new().map_err(usage)?;
            runtime
                .block_on(serve(ServeConfig { port, data_dir, cors_origin, seed }))
                .map_err(|e| match e {
                    ServeError::PortInUse(_) => usage(e),
                    other => input(other),
                })?;
        }
        Cmd::Edit { file, script, out } => {
            let model = load_valid(&file)?;
            let cmds = parse_edit_script(&read(&script)?).map_err(|e| input(format!("{}: {e}", script.display())))?;
            let next = apply_edit_script(&model, &cmds).map_err(|e| match e.error.rule() {
                Some(rule) => input(format!("{rule}: {e}")),
                None => input(e),
            })?;
            write(&out, &serialize_model(&next))?;
        }
        Cmd::Diff { original, replica, format } => {
            let report = diff(&load(&original)?, &load(&replica)?);
            match format {
                Format::Text => println!("{report}"),
                Format::Json => println!("{}", serde_json::to_string_pretty(&report).expect("plain data")),
            }
        }
        Cmd::New { out, id, name } => {
            write(&out, &serialize_model(&DashboardModel::minimal(id, name)))?;
        }
        Cmd::GenData { seed, kind, n, id, out } => {
            let kind: SeriesKind = kind.parse().map_err(usage)?;
            let mut series = generate_series(seed, kind, n, GeneratorSpec::default()).map_err(usage)?;
            series.name = id.clone();
            series.id = id;
            write(&out, &series.to_json())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::from_default_env())
        .with_writer(std::io::stderr)
        .init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
