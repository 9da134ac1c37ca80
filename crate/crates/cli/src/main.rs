use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::info;
use serde::Serialize;
use shapemine::matcher::WitnessSegment;
use shapemine::pipeline::{plot_data_csv, DEFAULT_K_MAX, DEFAULT_WCSS_THRESHOLD};
use shapemine::{
    load_traces, mine, noisy_match, parse_lse, segment_fixed_count, segment_min_count,
    MineConfig, PrefixSums, Signal, TraceFormat,
};

/// Mine linear shape expressions from time series and check signals against them.
#[derive(Parser)]
#[command(name = "shapemine", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mine an expression from a set of traces and write a JSON report.
    Mine(MineArgs),
    /// Check traces against an expression (exit 0 if all match, 1 otherwise).
    Match(MatchArgs),
    /// Print the piecewise-linear segmentation of each trace as CSV.
    Segment(SegmentArgs),
}

#[derive(Args)]
struct TraceInput {
    /// `ucr-tsv` or `csv`; guessed from the extension when omitted.
    #[arg(long)]
    format: Option<TraceFormat>,
    /// Sampling period used to synthesize timestamps.
    #[arg(long, default_value_t = 1.0)]
    period: f64,
    /// Keep only traces with this class label.
    #[arg(long)]
    class: Option<String>,
}

impl TraceInput {
    fn load(&self, path: &Path) -> Result<Vec<Signal>> {
        if !(self.period > 0.0 && self.period.is_finite()) {
            bail!("--period must be positive, got {}", self.period);
        }
        let format = self.format.unwrap_or_else(|| guess_format(path));
        let mut traces = load_traces(path, format, self.period)?;
        if let Some(class) = &self.class {
            traces.retain(|s| s.label().is_some_and(|l| same_label(l, class)));
            if traces.is_empty() {
                bail!("no trace of class {class} in {}", path.display());
            }
        }
        info!("loaded {} traces from {}", traces.len(), path.display());
        Ok(traces)
    }
}

/// UCR labels are sometimes written as floats (`1` vs `1.0000000e+00`).
fn same_label(label: &str, wanted: &str) -> bool {
    match (label.parse::<f64>(), wanted.parse::<f64>()) {
        (Ok(x), Ok(y)) => x == y,
        _ => label == wanted,
    }
}

fn guess_format(path: &Path) -> TraceFormat {
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("csv") => TraceFormat::Csv,
        _ => TraceFormat::UcrTsv,
    }
}

#[derive(Args)]
struct MineArgs {
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    traces: TraceInput,
    /// Largest MSE allowed for a segment.
    #[arg(long)]
    max_mse: f64,
    #[arg(long, default_value_t = DEFAULT_WCSS_THRESHOLD)]
    wcss_threshold: f64,
    #[arg(long, default_value_t = DEFAULT_K_MAX)]
    kmax: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Report path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the expression text, ready for `match --lse`.
    #[arg(long)]
    lse_out: Option<PathBuf>,
    /// Write per-sample fitted values as CSV.
    #[arg(long)]
    plot_data: Option<PathBuf>,
    /// Write the learned automaton in Graphviz format.
    #[arg(long)]
    dfa_dot: Option<PathBuf>,
    /// Include phase timings in the report (makes it non-reproducible).
    #[arg(long)]
    timings: bool,
}

#[derive(Args)]
struct MatchArgs {
    /// File holding the expression text.
    #[arg(long)]
    lse: PathBuf,
    #[arg(long)]
    trace: PathBuf,
    #[command(flatten)]
    traces: TraceInput,
    /// Noise tolerance: largest MSE allowed per segment.
    #[arg(long)]
    nu: f64,
}

#[derive(Args)]
#[group(id = "mode", required = true, multiple = false, args = ["max_mse", "count"])]
struct SegmentArgs {
    #[arg(long)]
    trace: PathBuf,
    #[command(flatten)]
    traces: TraceInput,
    /// Fewest segments with every MSE at most this value.
    #[arg(long)]
    max_mse: Option<f64>,
    /// Exactly this many segments, minimizing the largest MSE.
    #[arg(long)]
    count: Option<usize>,
}

#[derive(Serialize)]
struct MatchRow<'a> {
    trace: &'a str,
    matched: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<Vec<WitnessSegment>>,
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn cmd_mine(args: &MineArgs) -> Result<ExitCode> {
    let signals = args.traces.load(&args.input)?;
    let config = MineConfig {
        eps_max: args.max_mse,
        wcss_threshold: args.wcss_threshold,
        k_max: args.kmax,
        seed: args.seed,
    };
    let run = mine(&signals, &config)?;
    let t = run.timings;
    eprintln!(
        "{} traces, {} letters, t_s={:.3}s t_c={:.3}s t_l={:.3}s total={:.3}s",
        signals.len(),
        run.letters.len(),
        t.t_s,
        t.t_c,
        t.t_l,
        t.t_total
    );
    let mut report = run.report;
    if !args.timings {
        report.timings = None;
    }
    let mut json = serde_json::to_string_pretty(&report)?;
    json.push('\n');
    write_output(args.out.as_deref(), &json)?;
    if let Some(p) = &args.lse_out {
        write_output(Some(p), &format!("{}\n", report.lse))?;
    }
    if let Some(p) = &args.plot_data {
        write_output(Some(p), &plot_data_csv(&signals, &run.segmentations))?;
    }
    if let Some(p) = &args.dfa_dot {
        let names: Vec<String> = report.alphabet.iter().map(|l| l.name.clone()).collect();
        write_output(Some(p), &report.dfa.to_dot(&names))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_match(args: &MatchArgs) -> Result<ExitCode> {
    if args.nu.is_nan() || args.nu < 0.0 {
        bail!("--nu must be non-negative, got {}", args.nu);
    }
    let text = fs::read_to_string(&args.lse)
        .with_context(|| format!("cannot read {}", args.lse.display()))?;
    let lse = parse_lse(&text).with_context(|| format!("in {}", args.lse.display()))?;
    let signals = args.traces.load(&args.trace)?;
    let rows: Vec<MatchRow> = signals
        .iter()
        .map(|s| {
            let out = noisy_match(s, &lse, args.nu);
            MatchRow {
                trace: s.id(),
                matched: out.matched,
                witness: out.witness,
            }
        })
        .collect();
    let all = rows.iter().all(|r| r.matched);
    let mut json = serde_json::to_string_pretty(&rows)?;
    json.push('\n');
    write_output(None, &json)?;
    Ok(if all { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_segment(args: &SegmentArgs) -> Result<ExitCode> {
    let signals = args.traces.load(&args.trace)?;
    let mut out = String::from("trace,segment,start,end,a,b,d,mse\n");
    let mut total = 0;
    for s in &signals {
        let ps = PrefixSums::new(s);
        let seg = match (args.max_mse, args.count) {
            (Some(eps), None) => {
                if eps.is_nan() || eps < 0.0 {
                    bail!("--max-mse must be non-negative, got {eps}");
                }
                segment_min_count(&ps, eps)
            }
            (None, Some(m)) => segment_fixed_count(&ps, m)
                .with_context(|| format!("trace {}", s.id()))?,
            _ => unreachable!("clap enforces exactly one mode"),
        };
        for (k, (start, end, fit)) in seg.segments().enumerate() {
            out.push_str(&format!(
                "{},{k},{start},{end},{},{},{},{}\n",
                s.id(),
                fit.a,
                fit.b,
                fit.d,
                fit.mse
            ));
        }
        total += seg.len();
    }
    write_output(None, &out)?;
    eprintln!("{total} segments over {} traces", signals.len());
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SHAPEMINE_LOG", "warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Mine(args) => cmd_mine(args),
        Command::Match(args) => cmd_match(args),
        Command::Segment(args) => cmd_segment(args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
