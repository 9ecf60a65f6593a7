use std::fs;
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use marv::codec::{serialize_scene, to_canonical_string};
use marv::ingest::{load_manifest, write_study, TableFormat};
use marv::palette_file::PaletteFile;
use marv::study::{open_study, parse_log, replay};
use marv::synth::{demo_spec, generate_fiber_study};
use marv::wire::{serve, Hub, PROTOCOL};
use marv_core::charts::rank_drift;
use marv_core::session::{Session, SessionConfig};
use marv_core::stats::DriftNormalization;
use marv_core::GeometryBinding;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "marv", version, about = "Distribution glyphs and drift analysis for fiber studies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone, Copy)]
struct TableArgs {
    /// Field delimiter of the step tables.
    #[arg(long, default_value_t = ',', value_parser = parse_delimiter)]
    delimiter: char,
}

impl TableArgs {
    fn format(self) -> TableFormat {
        TableFormat {
            delimiter: self.delimiter as u8,
        }
    }
}

fn parse_delimiter(s: &str) -> Result<char, String> {
    let s = if s == "\\t" || s == "tab" { "\t" } else { s };
    let mut chars = s.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) if c.is_ascii() => Ok(c),
        _ => Err("delimiter must be a single ASCII character".into()),
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DriftNorm {
    Global,
    PerAttribute,
}

impl From<DriftNorm> for DriftNormalization {
    fn from(d: DriftNorm) -> Self {
        match d {
            DriftNorm::Global => DriftNormalization::Global,
            DriftNorm::PerAttribute => DriftNormalization::PerAttribute,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Table,
    /// Canonical JSON.
    #[value(alias = "json")]
    Machine,
}

#[derive(Subcommand)]
enum Command {
    /// Load a manifest and summarize its time steps.
    Ingest {
        manifest: PathBuf,
        #[command(flatten)]
        table: TableArgs,
    },
    /// Per-step statistics and the drift ranking.
    Stats {
        manifest: PathBuf,
        #[arg(long, value_enum, default_value = "global")]
        drift_norm: DriftNorm,
        #[arg(long, value_enum, default_value = "table")]
        format: OutputFormat,
        #[command(flatten)]
        table: TableArgs,
    },
    /// Write one chart as a scene document.
    Scene {
        manifest: PathBuf,
        /// `mdd`, `tet` or `chrono:<attribute>`.
        #[arg(long)]
        chart: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "global")]
        drift_norm: DriftNorm,
        #[command(flatten)]
        table: TableArgs,
    },
    /// Serve the study over marv-wire/1.
    Serve {
        manifest: PathBuf,
        #[arg(long, default_value_t = 7878)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Directory of static viewer files served over plain HTTP.
        #[arg(long)]
        assets: Option<PathBuf>,
        #[command(flatten)]
        table: TableArgs,
    },
    /// Replay a request log (one JSON mutation per line).
    Replay {
        manifest: PathBuf,
        log: PathBuf,
        /// Write the snapshot of every version as `v<version>.json` here.
        #[arg(long)]
        snapshots: Option<PathBuf>,
        #[command(flatten)]
        table: TableArgs,
    },
    /// Write a synthetic in-situ study (manifest plus tables).
    Synth {
        dir: PathBuf,
        #[arg(long, default_value_t = 27_000)]
        records: usize,
        #[arg(long, default_value_t = 25)]
        attributes: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        table: TableArgs,
    },
    /// Print the palette file.
    Palette,
}

fn config(norm: DriftNorm) -> SessionConfig {
    SessionConfig {
        drift_normalization: norm.into(),
        ..SessionConfig::default()
    }
}

fn open(manifest: &Path, table: TableArgs, norm: DriftNorm) -> Result<Session> {
    open_study(manifest, table.format(), config(norm)).with_context(|| format!("opening {}", manifest.display()))
}

fn ingest(manifest: &Path, table: TableArgs) -> Result<()> {
    let study = load_manifest(manifest, table.format())?;
    let s = &study.series;
    println!("study      {}", s.name());
    println!("steps      {}", s.len());
    println!("attributes {}", s.attribute_count());
    for (i, ds) in s.time_steps().iter().enumerate() {
        println!("  [{i}] {:<16} {:>9.1} N {:>8} fibers", ds.label(), ds.load_newtons(), ds.len());
    }
    let names: Vec<String> = s
        .attributes()
        .iter()
        .map(|a| if a.unit.is_empty() { a.name.clone() } else { format!("{} [{}]", a.name, a.unit) })
        .collect();
    println!("columns    {}", names.join(", "));
    Ok(())
}

#[derive(Serialize)]
struct StatsReport<'a> {
    study: &'a str,
    steps: Vec<StepReport<'a>>,
    drift: Option<DriftReport<'a>>,
}

#[derive(Serialize)]
struct StepReport<'a> {
    label: &'a str,
    load_newtons: f64,
    records: usize,
    attributes: Vec<AttrReport<'a>>,
}

#[derive(Serialize)]
struct AttrReport<'a> {
    name: &'a str,
    #[serde(flatten)]
    stats: &'a marv_core::stats::AttributeStats,
}

#[derive(Serialize)]
struct DriftReport<'a> {
    normalization: DriftNormalization,
    /// `[pair][attribute]` normalized drift.
    normalized: &'a [Vec<f64>],
    raw: &'a [Vec<f64>],
    ranking: Vec<RankReport<'a>>,
}

#[derive(Serialize)]
struct RankReport<'a> {
    attribute: &'a str,
    pair: [usize; 2],
    value: f64,
}

fn stats(manifest: &Path, table: TableArgs, norm: DriftNorm, format: OutputFormat) -> Result<()> {
    let session = open(manifest, table, norm)?;
    let series = session.series();
    let analysis = session.analysis();
    let attrs = series.attributes();
    let report = StatsReport {
        study: series.name(),
        steps: series
            .time_steps()
            .iter()
            .enumerate()
            .map(|(t, ds)| StepReport {
                label: ds.label(),
                load_newtons: ds.load_newtons(),
                records: ds.len(),
                attributes: attrs
                    .iter()
                    .zip(analysis.stats.step(t))
                    .map(|(a, stats)| AttrReport { name: &a.name, stats })
                    .collect(),
            })
            .collect(),
        drift: analysis.drift.as_ref().map(|d| DriftReport {
            normalization: d.normalization(),
            normalized: d.normalized(),
            raw: d.raw(),
            ranking: rank_drift(d)
                .into_iter()
                .map(|r| RankReport {
                    attribute: &attrs[r.attribute].name,
                    pair: [r.pair, r.pair + 1],
                    value: r.value,
                })
                .collect(),
        }),
    };
    match format {
        OutputFormat::Machine => println!("{}", to_canonical_string(&report)),
        OutputFormat::Table => print_stats_table(&report),
    }
    Ok(())
}

fn print_stats_table(r: &StatsReport<'_>) {
    println!("study {}", r.study);
    for s in &r.steps {
        println!();
        println!("{} ({} N, {} fibers)", s.label, s.load_newtons, s.records);
        println!(
            "  {:<20} {:>12} {:>12} {:>9} {:>9} {:<11} {:>5}",
            "attribute", "median", "iqr", "skew", "kurt", "modality", "peaks"
        );
        for a in &s.attributes {
            let (sk, ku) = match a.stats.shape {
                Some(sh) => (format!("{:.3}", sh.skewness), format!("{:.3}", sh.kurtosis_excess)),
                None => ("-".into(), "-".into()),
            };
            println!(
                "  {:<20} {:>12.4} {:>12.4} {:>9} {:>9} {:<11} {:>5}",
                a.name,
                a.stats.median,
                a.stats.iqr,
                sk,
                ku,
                a.stats.modality.name(),
                a.stats.peak_count
            );
        }
    }
    if let Some(d) = &r.drift {
        println!();
        println!("drift ranking ({:?} normalization), top 10", d.normalization);
        for e in d.ranking.iter().take(10) {
            println!("  {:<20} {} -> {}  {:.4}", e.attribute, e.pair[0], e.pair[1], e.value);
        }
    }
}

fn scene(manifest: &Path, table: TableArgs, norm: DriftNorm, chart: &str, out: &Path) -> Result<()> {
    let session = open(manifest, table, norm)?;
    let scene = session.chart_scene(chart)?;
    let text = serialize_scene(&scene)?;
    fs::write(out, text).with_context(|| format!("writing {}", out.display()))?;
    println!("{} nodes written to {}", scene.nodes.len(), out.display());
    Ok(())
}

fn run_serve(manifest: &Path, table: TableArgs, host: &str, port: u16, assets: Option<PathBuf>) -> Result<()> {
    let session = open(manifest, table, DriftNorm::Global)?;
    let path = manifest.to_path_buf();
    let format = table.format();
    let reopen = Box::new(move || open_study(&path, format, SessionConfig::default()).map_err(|e| e.to_string()));
    let hub = Hub::new(session, Some(reopen));
    let listener =
        TcpListener::bind((host, port)).with_context(|| format!("binding {host}:{port}"))?;
    eprintln!("{PROTOCOL} listening on ws://{}", listener.local_addr()?);
    serve(listener, hub, assets)?;
    Ok(())
}

fn run_replay(manifest: &Path, table: TableArgs, log: &Path, snapshots: Option<&Path>) -> Result<()> {
    let text = fs::read_to_string(log).with_context(|| format!("reading {}", log.display()))?;
    let requests = parse_log(&text).map_err(|(line, e)| anyhow::anyhow!("{}:{line}: {e}", log.display()))?;
    let mut session = open(manifest, table, DriftNorm::Global)?;
    if let Some(dir) = snapshots {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("v0.json"), serialize_scene(session.scene())?)?;
    }
    for (i, step) in replay(&mut session, &requests).iter().enumerate() {
        match &step.outcome {
            Ok(patch) => println!("{:>4} v{} ok {} bytes", i + 1, step.version, patch.len()),
            Err(e) => println!("{:>4} v{} rejected: {e}", i + 1, step.version),
        }
        if let (Some(dir), Ok(_)) = (snapshots, &step.outcome) {
            fs::write(dir.join(format!("v{}.json", step.version)), &step.snapshot)?;
        }
    }
    Ok(())
}

fn synth(dir: &Path, table: TableArgs, records: usize, attributes: usize, seed: u64) -> Result<()> {
    if attributes < 7 {
        bail!("a fiber study needs at least 7 attributes (geometry and diameter)");
    }
    let series = generate_fiber_study(&demo_spec(records, attributes), seed)?;
    let path = write_study(dir, &series, &GeometryBinding::standard(), table.format())?;
    println!("{}", path.display());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ingest { manifest, table } => ingest(&manifest, table),
        Command::Stats {
            manifest,
            drift_norm,
            format,
            table,
        } => stats(&manifest, table, drift_norm, format),
        Command::Scene {
            manifest,
            chart,
            out,
            drift_norm,
            table,
        } => scene(&manifest, table, drift_norm, &chart, &out),
        Command::Serve {
            manifest,
            port,
            host,
            assets,
            table,
        } => run_serve(&manifest, table, &host, port, assets),
        Command::Replay {
            manifest,
            log,
            snapshots,
            table,
        } => run_replay(&manifest, table, &log, snapshots.as_deref()),
        Command::Synth {
            dir,
            records,
            attributes,
            seed,
            table,
        } => synth(&dir, table, records, attributes, seed),
        Command::Palette => {
            print!("{}", PaletteFile::current().to_json());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
