//! `ers`: score images for EasyRead conformity, batch-evaluate directories
//! and compare score distributions between corpora.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 data error.

mod dump;
mod svg;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use ers_core::corpus::{
    compare_corpora, format_significant, scan_corpus, score_corpus, summarize, write_records, write_records_to,
    CorpusRun, RecordFormat, DEFAULT_BINS,
};
use ers_core::scoring::contributions;
use ers_core::{decode_image, RunConfig, Scorer};

#[derive(Debug, Parser)]
#[command(name = "ers", version, about = "EasyRead score for pictogram-style images")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ConfigArg {
    /// JSON file with `analysis` and `scoring` sections; omitted keys keep defaults.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Score a single image and print its record.
    Score {
        image: PathBuf,
        /// Print a CSV header and row instead of JSON.
        #[arg(long)]
        csv: bool,
        #[command(flatten)]
        config: ConfigArg,
    },
    /// Score every image under a directory and write the records.
    Batch {
        dir: PathBuf,
        /// Records file; `.csv` or `.jsonl`.
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
        /// Overrides the format implied by the `--out` extension.
        #[arg(long, value_name = "csv|jsonl")]
        format: Option<String>,
        #[arg(long, default_value_t = default_jobs())]
        jobs: usize,
        /// Comma-separated glob patterns (default: *.png,*.jpg,*.jpeg).
        #[arg(long, value_delimiter = ',')]
        patterns: Vec<String>,
        #[command(flatten)]
        config: ConfigArg,
    },
    /// Compare score distributions of two directories.
    Compare {
        dir_a: PathBuf,
        dir_b: PathBuf,
        /// Prefix for `<prefix>_<field>.csv` reports and `<prefix>.svg`.
        #[arg(long, value_name = "PATH")]
        out_prefix: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BINS)]
        bins: usize,
        #[arg(long, default_value_t = default_jobs())]
        jobs: usize,
        #[arg(long, value_delimiter = ',')]
        patterns: Vec<String>,
        #[command(flatten)]
        config: ConfigArg,
    },
    /// Show the per-metric breakdown of one image's score.
    Explain {
        image: PathBuf,
        /// Write debug images (edges, saliency, mask, strokes, distances) here.
        #[arg(long, value_name = "DIR")]
        dump: Option<PathBuf>,
        #[command(flatten)]
        config: ConfigArg,
    },
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

enum Failure {
    Usage(anyhow::Error),
    Data(anyhow::Error),
}

type CmdResult = Result<(), Failure>;

fn usage(err: impl Into<anyhow::Error>) -> Failure {
    Failure::Usage(err.into())
}

fn data(err: impl Into<anyhow::Error>) -> Failure {
    Failure::Data(err.into())
}

fn load_scorer(arg: &ConfigArg) -> Result<Scorer, Failure> {
    let config = match &arg.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("cannot read config {}", path.display()))
                .map_err(usage)?;
            RunConfig::from_json(&text)
                .with_context(|| format!("invalid config {}", path.display()))
                .map_err(usage)?
        }
        None => RunConfig::default(),
    };
    Scorer::new(config).map_err(usage)
}

fn load_image(path: &Path, scorer: &Scorer) -> Result<ers_core::PixelImage, Failure> {
    let bytes = fs::read(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(data)?;
    decode_image(&bytes, &scorer.config().analysis)
        .with_context(|| format!("cannot decode {}", path.display()))
        .map_err(data)
}

fn check_jobs(jobs: usize) -> CmdResult {
    if jobs == 0 {
        return Err(usage(anyhow!("--jobs must be at least 1")));
    }
    Ok(())
}

fn score_dir(dir: &Path, patterns: &[String], scorer: &Scorer, jobs: usize) -> Result<CorpusRun, Failure> {
    let manifest = scan_corpus(dir, patterns).map_err(data)?;
    let run = score_corpus(&manifest, scorer, jobs).map_err(data)?;
    if !run.errors.is_empty() {
        eprintln!("{}: {} file(s) failed", dir.display(), run.errors.len());
        for err in &run.errors {
            eprintln!("  {err}");
        }
    }
    if run.records.is_empty() {
        return Err(data(anyhow!("no images scored under {}", dir.display())));
    }
    Ok(run)
}

fn cmd_score(image: &Path, csv: bool, config: &ConfigArg) -> CmdResult {
    let scorer = load_scorer(config)?;
    let img = load_image(image, &scorer)?;
    let record = scorer.score(&img, &image.display().to_string());
    let stdout = io::stdout().lock();
    if csv {
        write_records_to(std::slice::from_ref(&record), RecordFormat::Csv, stdout).map_err(data)?;
    } else {
        let mut stdout = stdout;
        serde_json::to_writer_pretty(&mut stdout, &record).map_err(data)?;
        writeln!(stdout).map_err(data)?;
    }
    Ok(())
}

fn cmd_batch(
    dir: &Path,
    out: &Path,
    format: Option<&str>,
    jobs: usize,
    patterns: &[String],
    config: &ConfigArg,
) -> CmdResult {
    check_jobs(jobs)?;
    let format = match format {
        Some(name) => RecordFormat::parse(name).ok_or_else(|| usage(anyhow!("unknown format {name:?}")))?,
        None => RecordFormat::from_path(out)
            .ok_or_else(|| usage(anyhow!("cannot infer format from {}; use --format", out.display())))?,
    };
    let scorer = load_scorer(config)?;
    let run = score_dir(dir, patterns, &scorer, jobs)?;
    write_records(&run.records, format, out).map_err(data)?;
    let summary = summarize(&run.records).map_err(data)?;
    print!("{summary}");
    Ok(())
}

fn dir_label(dir: &Path) -> String {
    dir.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| dir.display().to_string())
}

fn report_path(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix.as_os_str().to_owned();
    name.push(suffix);
    PathBuf::from(name)
}

fn cmd_compare(
    dir_a: &Path,
    dir_b: &Path,
    prefix: &Path,
    bins: usize,
    jobs: usize,
    patterns: &[String],
    config: &ConfigArg,
) -> CmdResult {
    check_jobs(jobs)?;
    if bins < 2 {
        return Err(usage(anyhow!("--bins must be at least 2")));
    }
    let scorer = load_scorer(config)?;
    let a = score_dir(dir_a, patterns, &scorer, jobs)?;
    let b = score_dir(dir_b, patterns, &scorer, jobs)?;

    let (mut label_a, mut label_b) = (dir_label(dir_a), dir_label(dir_b));
    if label_a == label_b {
        label_a.push_str(" (A)");
        label_b.push_str(" (B)");
    }
    let reports = compare_corpora(&a.records, &b.records, bins, [&label_a, &label_b]).map_err(data)?;

    if let Some(parent) = prefix.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)
            .with_context(|| format!("cannot create {}", parent.display()))
            .map_err(data)?;
    }
    for report in &reports {
        let path = report_path(prefix, &format!("_{}.csv", report.field));
        let mut text = String::from("bin_lo,bin_hi,pct_A,pct_B\n");
        for i in 0..report.bins() {
            text.push_str(&format!(
                "{},{},{},{}\n",
                format_significant(report.edges[i], 9),
                format_significant(report.edges[i + 1], 9),
                format_significant(report.percentages[0][i], 9),
                format_significant(report.percentages[1][i], 9),
            ));
        }
        fs::write(&path, text)
            .with_context(|| format!("cannot write {}", path.display()))
            .map_err(data)?;
    }
    let svg_path = report_path(prefix, ".svg");
    fs::write(&svg_path, svg::render(&reports))
        .with_context(|| format!("cannot write {}", svg_path.display()))
        .map_err(data)?;

    for (label, run) in [(&label_a, &a), (&label_b, &b)] {
        println!("== {label}");
        print!("{}", summarize(&run.records).map_err(data)?);
    }
    Ok(())
}

fn cmd_explain(image: &Path, dump_dir: Option<&Path>, config: &ConfigArg) -> CmdResult {
    let scorer = load_scorer(config)?;
    let img = load_image(image, &scorer)?;
    let (record, analysis) = scorer.analyze(&img, &image.display().to_string());
    let raw = &record.raw;
    let raw_text = [
        raw.palette_count.to_string(),
        format!("{:.6}", raw.edge_density),
        format!("{:.6}", raw.saliency_fraction),
        format!("{:.6}", raw.contrast_delta),
        raw.stroke_rel.map_or("absent".to_string(), |t| format!("{t:.6}")),
        format!("{:.6}", raw.centering_error),
    ];
    let names = [
        "palette_count",
        "edge_density",
        "saliency_fraction",
        "contrast_delta",
        "stroke_rel",
        "centering_error",
    ];

    println!("{}", record.source);
    println!(
        "{:<10} {:<18} {:>12} {:>15} {:>7} {:>15}",
        "metric", "measure", "value", "score", "weight", "contribution"
    );
    let parts = contributions(&record.scores, &scorer.config().scoring.weights);
    for ((part, name), value) in parts.iter().zip(names).zip(&raw_text) {
        println!(
            "{:<10} {:<18} {:>12} {:>15.12} {:>7.2} {:>15.12}",
            part.metric, name, value, part.score, part.weight, part.contribution
        );
    }
    println!("{:<10} {:>71.12}", "ERS", record.ers);
    println!(
        "flags: {}",
        if raw.flags.any() {
            raw.flags.to_string()
        } else {
            "none".into()
        }
    );

    if let Some(dir) = dump_dir {
        let written = dump::write_artifacts(&analysis, dir).map_err(data)?;
        for path in written {
            eprintln!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Score { image, csv, config } => cmd_score(&image, csv, &config),
        Command::Batch {
            dir,
            out,
            format,
            jobs,
            patterns,
            config,
        } => cmd_batch(&dir, &out, format.as_deref(), jobs, &patterns, &config),
        Command::Compare {
            dir_a,
            dir_b,
            out_prefix,
            bins,
            jobs,
            patterns,
            config,
        } => cmd_compare(&dir_a, &dir_b, &out_prefix, bins, jobs, &patterns, &config),
        Command::Explain { image, dump, config } => cmd_explain(&image, dump.as_deref(), &config),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(err)) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
        Err(Failure::Data(err)) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
