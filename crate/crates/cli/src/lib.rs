//! Subcommands behind the `insight` binary.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use insight_core::store::Store;
use insight_core::synth::{self, Plant, SynthSpec};
use insight_core::{
    bench, ingest_csv, write_csv, CsvOptions, Engine, EngineConfig, InsightClass,
    InsightDescriptor, InsightQuery, MetricId, Mode, Overview,
};

#[derive(Debug, Parser)]
#[command(
    name = "insight",
    version,
    about = "Rank and explore insights in tabular data"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Read a CSV into a store directory with per-column summaries.
    Ingest(IngestArgs),
    /// Build and persist hyperplane sketches for every numeric column.
    Sketch(SketchArgs),
    /// Print the top insights of one class.
    Query(QueryArgs),
    /// Print every tuple's metric value for one class.
    Overview(OverviewArgs),
    /// Time exact against sketch-based all-pairs correlation.
    Bench(BenchArgs),
    /// Write a synthetic CSV with planted structure and its ground truth.
    Synth(SynthArgs),
    /// Serve the HTTP API with the store preloaded as dataset `default`.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    pub csv: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Dataset name; defaults to the file stem.
    #[arg(long)]
    pub name: Option<String>,
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
    #[arg(long)]
    pub no_header: bool,
    /// Field text treated as missing, besides the empty field.
    #[arg(long, default_value = "")]
    pub null_token: String,
}

#[derive(Debug, Args)]
pub struct SketchArgs {
    pub store: PathBuf,
    /// Sign bits per column; defaults to max(64, ⌈log₂²n⌉) rounded up to 64.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    pub store: PathBuf,
    #[arg(long)]
    pub class: String,
    /// Attribute every result must contain (repeatable).
    #[arg(long)]
    pub fix: Vec<String>,
    /// Keep values in `lo,hi` (inclusive).
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    pub range: Option<(f64, f64)>,
    #[arg(long, default_value_t = 10, value_parser = parse_top)]
    pub top: usize,
    #[arg(long, default_value = "auto")]
    pub mode: String,
    /// Rank pairs by another metric (`pearson_abs`, `spearman_abs`).
    #[arg(long)]
    pub metric: Option<String>,
    /// Print line-delimited JSON instead of a table.
    #[arg(long)]
    pub jsonl: bool,
    /// Also write line-delimited JSON to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub engine: EngineArgs,
}

#[derive(Debug, Args)]
pub struct OverviewArgs {
    pub store: PathBuf,
    #[arg(long)]
    pub class: String,
    #[arg(long, default_value = "auto")]
    pub mode: String,
    /// Also write the overview as JSON to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub engine: EngineArgs,
}

#[derive(Debug, Args)]
pub struct EngineArgs {
    /// Seed for sampling and for sketches built on the fly.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    pub store: PathBuf,
    #[arg(long, default_value_t = 256)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 3)]
    pub repeats: usize,
    /// Print the report as JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub rows: usize,
    #[arg(long)]
    pub cols: usize,
    /// `rho:0.9:a,b`, `skew:2:a`, `tails:5:a`, `hh:0.4:a` or `outlier:8:a` (repeatable).
    #[arg(long)]
    pub plant: Vec<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV path; the ground truth goes next to it as `<stem>.truth.json`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    pub store: PathBuf,
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: std::net::IpAddr,
}

fn parse_top(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(k) => Ok(k),
        Err(e) => Err(e.to_string()),
    }
}

fn parse_range(s: &str) -> std::result::Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(',').ok_or("expected lo,hi")?;
    let lo: f64 = lo
        .trim()
        .parse()
        .map_err(|e| format!("bad lower bound: {e}"))?;
    let hi: f64 = hi
        .trim()
        .parse()
        .map_err(|e| format!("bad upper bound: {e}"))?;
    if !(lo <= hi) {
        return Err(format!("empty range {lo},{hi}"));
    }
    Ok((lo, hi))
}

pub fn run(cli: Cli) -> Result<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Ingest(a) => ingest(&a, &mut out),
        Command::Sketch(a) => sketch(&a, &mut out),
        Command::Query(a) => query(&a, &mut out),
        Command::Overview(a) => overview(&a, &mut out),
        Command::Bench(a) => run_bench(&a, &mut out),
        Command::Synth(a) => run_synth(&a, &mut out),
        Command::Serve(a) => serve(&a),
    }
}

fn open_store(dir: &Path) -> Result<Store> {
    Store::open(dir).with_context(|| format!("cannot open store {}", dir.display()))
}

/// Engine over a store, reusing its persisted sketches.
pub fn store_engine(dir: &Path, seed: u64) -> Result<Engine> {
    let config = EngineConfig {
        seed,
        ..EngineConfig::default()
    };
    Ok(open_store(dir)?.engine(config)?)
}

fn ingest(a: &IngestArgs, out: &mut impl Write) -> Result<()> {
    if !a.delimiter.is_ascii() {
        bail!("delimiter must be a single ASCII character");
    }
    let options = CsvOptions {
        delimiter: a.delimiter as u8,
        has_header: !a.no_header,
        null_token: a.null_token.clone(),
    };
    let name = match &a.name {
        Some(n) => n.clone(),
        None => a
            .csv
            .file_stem()
            .map_or("dataset".into(), |s| s.to_string_lossy().into_owned()),
    };
    let file = File::open(&a.csv).with_context(|| format!("cannot read {}", a.csv.display()))?;
    let ds = ingest_csv(&name, io::BufReader::new(file), &options)
        .with_context(|| format!("cannot ingest {}", a.csv.display()))?;
    let store = Store::create(&a.out, ds)?;
    let m = &store.manifest;
    writeln!(
        out,
        "stored {} rows × {} columns as `{}` in {}",
        m.n_rows,
        m.columns.len(),
        m.name,
        a.out.display()
    )?;
    writeln!(out, "fingerprint {}", m.fingerprint)?;
    for c in &m.columns {
        writeln!(
            out,
            "  {:<24} {:<11} {} valid",
            c.name,
            format!("{:?}", c.kind).to_lowercase(),
            c.valid_count
        )?;
    }
    Ok(())
}

fn sketch(a: &SketchArgs, out: &mut impl Write) -> Result<()> {
    let store = open_store(&a.store)?;
    let config = EngineConfig {
        seed: a.seed,
        sketch_k: a.k,
        ..EngineConfig::default()
    };
    if let Some(k) = a.k {
        if k == 0 || k % 64 != 0 {
            bail!("--k must be a positive multiple of 64, got {k}");
        }
    }
    let engine = Engine::new(store.dataset.clone(), config);
    let t = Instant::now();
    let sketches = engine.hyperplane_sketches();
    let build_ms = t.elapsed().as_secs_f64() * 1e3;
    let m = store.write_sketches(sketches, build_ms)?;
    writeln!(
        out,
        "sketched {} numeric columns, k = {}, seed = {}",
        m.columns.len(),
        m.k,
        m.seed
    )?;
    writeln!(out, "build time    {build_ms:.1} ms")?;
    writeln!(
        out,
        "sign vectors  {} bytes ({} columns × {} bits)",
        m.sign_bytes,
        m.columns.len(),
        m.k
    )?;
    writeln!(out, "on disk       {} bytes", m.file_bytes)?;
    Ok(())
}

/// The query a `query` invocation runs.
pub fn build_query(a: &QueryArgs) -> Result<InsightQuery> {
    let class: InsightClass = a.class.parse()?;
    let mut q = InsightQuery::new(class)
        .limit(a.top)
        .mode(a.mode.parse::<Mode>()?);
    for f in &a.fix {
        q = q.fix(f.clone());
    }
    if let Some((lo, hi)) = a.range {
        q = q.range(lo, hi);
    }
    if let Some(m) = &a.metric {
        q = q.metric(m.parse::<MetricId>().map_err(anyhow::Error::msg)?);
    }
    Ok(q)
}

fn write_jsonl(sink: &mut impl Write, rows: &[InsightDescriptor]) -> Result<()> {
    for d in rows {
        serde_json::to_writer(&mut *sink, d)?;
        sink.write_all(b"\n")?;
    }
    Ok(())
}

fn query(a: &QueryArgs, out: &mut impl Write) -> Result<()> {
    let q = build_query(a)?;
    let engine = store_engine(&a.store, a.engine.seed)?;
    let rows = engine.rank(&q)?;
    if let Some(path) = &a.out {
        let mut w = BufWriter::new(
            File::create(path).with_context(|| format!("cannot write {}", path.display()))?,
        );
        write_jsonl(&mut w, &rows)?;
        w.flush()?;
    }
    if a.jsonl {
        return write_jsonl(out, &rows);
    }
    writeln!(
        out,
        "{:>4}  {:<40} {:<14} {:>10} {:>10}  source",
        "rank", "tuple", "metric", "value", "signed"
    )?;
    for (i, d) in rows.iter().enumerate() {
        let signed = d.signed_aux.map_or("-".to_string(), |s| format!("{s:.4}"));
        writeln!(
            out,
            "{:>4}  {:<40} {:<14} {:>10.4} {:>10}  {}",
            i + 1,
            d.tuple.join(", "),
            d.metric_id.as_str(),
            d.value,
            signed,
            if d.approximate { "sketch" } else { "exact" }
        )?;
    }
    if rows.is_empty() {
        writeln!(out, "(no insights match)")?;
    }
    Ok(())
}

fn cell(v: Option<f64>) -> String {
    v.map_or("-".into(), |x| format!("{x:.3}"))
}

fn overview(a: &OverviewArgs, out: &mut impl Write) -> Result<()> {
    let class: InsightClass = a.class.parse()?;
    let mode: Mode = a.mode.parse()?;
    let engine = store_engine(&a.store, a.engine.seed)?;
    let view = engine.overview(class, mode);
    if let Some(path) = &a.out {
        let w = BufWriter::new(
            File::create(path).with_context(|| format!("cannot write {}", path.display()))?,
        );
        serde_json::to_writer_pretty(w, &view)?;
    }
    match &view {
        Overview::Matrix {
            metric_id,
            attributes,
            approximate,
            ..
        } => {
            writeln!(
                out,
                "{class} by signed {}{}",
                metric_id.as_str(),
                if *approximate { " (sketch)" } else { "" }
            )?;
            let w = attributes
                .iter()
                .map(|s| s.len())
                .max()
                .unwrap_or(0)
                .clamp(6, 24);
            write!(out, "{:w$}", "")?;
            for name in attributes {
                write!(out, " {:>8.8}", name)?;
            }
            writeln!(out)?;
            for (i, name) in attributes.iter().enumerate() {
                write!(out, "{:w$.w$}", name)?;
                for j in 0..attributes.len() {
                    write!(out, " {:>8}", cell(view.cell(i, j)))?;
                }
                writeln!(out)?;
            }
        }
        Overview::List {
            metric_id,
            entries,
            approximate,
            ..
        } => {
            writeln!(
                out,
                "{class} by {}{}",
                metric_id.as_str(),
                if *approximate { " (sketch)" } else { "" }
            )?;
            for e in entries {
                writeln!(
                    out,
                    "  {:<24} {:>12}",
                    e.attribute,
                    cell(e.signed.or(e.value))
                )?;
            }
        }
    }
    Ok(())
}

fn run_bench(a: &BenchArgs, out: &mut impl Write) -> Result<()> {
    if a.k == 0 || a.k % 64 != 0 {
        bail!("--k must be a positive multiple of 64, got {}", a.k);
    }
    let store = open_store(&a.store)?;
    let r = bench::run(&store.dataset, a.k, a.seed, a.repeats.max(1));
    if a.json {
        serde_json::to_writer_pretty(&mut *out, &r)?;
        writeln!(out)?;
        return Ok(());
    }
    writeln!(
        out,
        "{} rows, {} numeric columns, {} pairs, k = {}",
        r.n_rows, r.n_numeric, r.pairs, r.k
    )?;
    writeln!(out, "exact all-pairs      {:>10.2} ms", r.exact_pairwise_ms)?;
    writeln!(out, "sketch build         {:>10.2} ms", r.sketch_build_ms)?;
    writeln!(
        out,
        "sketch all-pairs     {:>10.2} ms",
        r.sketch_pairwise_ms
    )?;
    writeln!(out, "pairwise speedup     {:>10.1}x", r.pairwise_speedup)?;
    writeln!(out, "end-to-end speedup   {:>10.2}x", r.end_to_end_speedup)?;
    writeln!(out, "mean |error|         {:>10.4}", r.mean_abs_error)?;
    writeln!(out, "sign vector memory   {:>10} bytes", r.sign_bytes)?;
    Ok(())
}

/// Where `synth --out data.csv` puts the ground truth.
pub fn truth_path(csv: &Path) -> PathBuf {
    let stem = csv
        .file_stem()
        .map_or("synth".into(), |s| s.to_string_lossy().into_owned());
    csv.with_file_name(format!("{stem}.truth.json"))
}

fn run_synth(a: &SynthArgs, out: &mut impl Write) -> Result<()> {
    let plants = a
        .plant
        .iter()
        .map(|p| p.parse::<Plant>())
        .collect::<Result<Vec<_>, _>>()?;
    let spec = SynthSpec {
        rows: a.rows,
        cols: a.cols,
        plants,
        seed: a.seed,
    };
    let (ds, truth) = synth::generate(&spec)?;
    let mut w = BufWriter::new(
        File::create(&a.out).with_context(|| format!("cannot write {}", a.out.display()))?,
    );
    write_csv(&ds, &mut w, &CsvOptions::default())?;
    w.flush()?;
    let tp = truth_path(&a.out);
    let mut tw = BufWriter::new(
        File::create(&tp).with_context(|| format!("cannot write {}", tp.display()))?,
    );
    serde_json::to_writer_pretty(&mut tw, &truth)?;
    tw.flush()?;
    writeln!(
        out,
        "wrote {} rows × {} columns to {}",
        ds.n_rows(),
        ds.n_cols(),
        a.out.display()
    )?;
    for r in &truth.realized {
        writeln!(
            out,
            "  {:<32} measured {}",
            serde_json::to_string(&r.plant)?,
            cell(r.measured)
        )?;
    }
    writeln!(out, "ground truth in {}", tp.display())?;
    Ok(())
}

fn serve(a: &ServeArgs) -> Result<()> {
    let _ = tracing_subscriber::fmt().try_init();
    let store = open_store(&a.store)?;
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(async {
        let state = insight_service::AppState::new(EngineConfig::default());
        state.add_engine(
            store.engine(EngineConfig::default())?,
            Some("default".into()),
        );
        insight_service::serve((a.host, a.port).into(), state)
            .await
            .with_context(|| format!("cannot serve on {}:{}", a.host, a.port))
    })
}
