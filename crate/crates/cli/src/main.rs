use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use adjsim::{
    build_figures, catalog_json, enumerate_catalog, estimand_table, export_simulation, figure_file_name,
    lemma_check, read_raw, read_summary, render_figure, run_simulation, write_estimand_csv, Format, GraphSelection,
    SimConfig,
};
use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

/// Simulations of statistical adjustment with three continuous variables.
#[derive(Debug, Parser)]
#[command(name = "adjsim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Options,
}

#[derive(Debug, Args)]
struct Options {
    /// Observations per dataset.
    #[arg(long, global = true, default_value_t = 30)]
    n: usize,
    /// Replications per graph.
    #[arg(long, global = true, default_value_t = 1000)]
    reps: usize,
    /// Master seed for the per-replication random streams.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Catalog id, comma-separated ids, graph notation, or `all`.
    #[arg(long, global = true, default_value = "all")]
    graph: String,
    /// Output directory.
    #[arg(long, global = true, default_value = "results")]
    out: PathBuf,
    /// Table format: csv or json.
    #[arg(long, global = true, default_value = "csv", value_parser = parse_format)]
    format: Format,
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse()
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the 33-graph catalog as JSON and write catalog.json.
    Catalog,
    /// Write the population estimand table.
    Oracle,
    /// Run the Monte Carlo study and write raw and summary tables.
    Simulate,
    /// Check that Residual X and Residual X&Y reproduce Multiple Regression.
    LemmaCheck,
    /// Render SVG figures from a summary and raw file pair.
    Plot {
        /// Summary file (defaults to <out>/summary.<format>).
        #[arg(long)]
        summary: Option<PathBuf>,
        /// Raw estimates file (defaults to <out>/raw.<format>).
        #[arg(long)]
        raw: Option<PathBuf>,
    },
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("{}: cannot create directory", dir.display()))
}

fn catalog(opts: &Options) -> Result<()> {
    let json = catalog_json(&enumerate_catalog());
    ensure_dir(&opts.out)?;
    let path = opts.out.join("catalog.json");
    fs::write(&path, format!("{json}\n")).with_context(|| format!("{}: write failed", path.display()))?;
    let mut stdout = io::stdout().lock();
    writeln!(stdout, "{json}")?;
    Ok(())
}

fn oracle(opts: &Options) -> Result<()> {
    let selection: GraphSelection = opts.graph.parse()?;
    let entries = selection.resolve(&enumerate_catalog())?;
    let table = estimand_table(&entries);
    ensure_dir(&opts.out)?;
    let path = opts.out.join(format!("oracle.{}", opts.format.extension()));
    let file = fs::File::create(&path).with_context(|| format!("{}: cannot create", path.display()))?;
    match opts.format {
        Format::Csv => write_estimand_csv(&table, io::BufWriter::new(file))
            .with_context(|| format!("{}: write failed", path.display()))?,
        Format::Json => serde_json::to_writer_pretty(io::BufWriter::new(file), &table)
            .with_context(|| format!("{}: write failed", path.display()))?,
    }
    println!("wrote {} estimand rows to {}", table.len(), path.display());
    Ok(())
}

fn simulate(opts: &Options) -> Result<()> {
    let config = SimConfig {
        n: opts.n,
        reps: opts.reps,
        master_seed: opts.seed,
        selection: opts.graph.parse()?,
    };
    let output = run_simulation(&config)?;
    let files = export_simulation(&opts.out, &output, opts.format)?;
    println!(
        "wrote {} estimate rows to {} and {} summary rows to {}",
        output.raw.len(),
        files.raw.display(),
        output.summaries.len(),
        files.summary.display()
    );
    Ok(())
}

fn lemma(opts: &Options) -> Result<()> {
    const TOLERANCE: f64 = 1e-9;
    let report = lemma_check(opts.reps, opts.n, opts.seed)?;
    println!("datasets: {} (skipped {} collinear)", report.datasets, report.skipped);
    println!("max |Multiple - ResidualX|:  {:e}", report.max_residual_x_gap);
    println!("max |Multiple - ResidualXY|: {:e}", report.max_residual_xy_gap);
    if report.max_residual_x_gap >= TOLERANCE || report.max_residual_xy_gap >= TOLERANCE {
        bail!("estimators disagree beyond {TOLERANCE:e}");
    }
    println!("ok: all three estimators agree within {TOLERANCE:e}");
    Ok(())
}

fn plot(opts: &Options, summary: Option<&Path>, raw: Option<&Path>) -> Result<()> {
    let ext = opts.format.extension();
    let summary_path = summary.map_or_else(|| opts.out.join(format!("summary.{ext}")), Path::to_path_buf);
    let raw_path = raw.map_or_else(|| opts.out.join(format!("raw.{ext}")), Path::to_path_buf);
    let summaries = read_summary(&summary_path)?;
    let raw_rows = read_raw(&raw_path)?;
    let figures = build_figures(&summaries, &raw_rows)?;
    if figures.is_empty() {
        bail!("{}: no catalog graphs to plot", summary_path.display());
    }
    let dir = opts.out.join("figures");
    ensure_dir(&dir)?;
    let mut panels = 0;
    for figure in &figures {
        let svg = render_figure(figure)?;
        let path = dir.join(figure_file_name(figure));
        fs::write(&path, svg).with_context(|| format!("{}: write failed", path.display()))?;
        panels += figure.panels.len();
    }
    println!("wrote {} figures ({} panels) to {}", figures.len(), panels, dir.display());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Catalog => catalog(&cli.opts),
        Command::Oracle => oracle(&cli.opts),
        Command::Simulate => simulate(&cli.opts),
        Command::LemmaCheck => lemma(&cli.opts),
        Command::Plot { summary, raw } => plot(&cli.opts, summary.as_deref(), raw.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) if !err.use_stderr() => {
            // --help and --version
            let _ = err.print();
            return ExitCode::SUCCESS;
        }
        Err(err) => {
            let rendered = err.to_string();
            let line = rendered.lines().next().unwrap_or("error: invalid arguments");
            eprintln!("{line}");
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            // our error types already embed their source in the message
            let mut message = err.to_string();
            for cause in err.chain().skip(1).map(ToString::to_string) {
                if !message.contains(&cause) {
                    message = format!("{message}: {cause}");
                }
            }
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}
