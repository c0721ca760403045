//! Batch scoring of image directories and distribution comparison between
//! corpora.

mod histogram;
mod records;

use std::fmt;
use std::path::{Path, PathBuf};

use globset::{GlobBuilder, GlobSet, GlobSetBuilder};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use walkdir::WalkDir;

use crate::error::{Error, Result};
use crate::scoring::{ErsRecord, Scorer, METRIC_NAMES};

pub use histogram::{bin_edges, bin_index, compare_corpora, HistogramReport, DEFAULT_BINS};
pub use records::{
    format_significant, read_records, read_records_from, write_records, write_records_to, RecordFormat, RecordRow,
    CSV_COLUMNS,
};

pub const DEFAULT_PATTERNS: [&str; 3] = ["*.png", "*.jpg", "*.jpeg"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    /// Path relative to the corpus root, `/`-separated.
    pub relative_path: String,
    pub size: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub root: PathBuf,
    pub entries: Vec<ManifestEntry>,
    pub patterns: Vec<String>,
}

impl CorpusManifest {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn path_of(&self, entry: &ManifestEntry) -> PathBuf {
        self.root.join(&entry.relative_path)
    }
}

fn build_globs(patterns: &[String]) -> Result<GlobSet> {
    let mut builder = GlobSetBuilder::new();
    for pattern in patterns {
        let glob = GlobBuilder::new(pattern)
            .case_insensitive(true)
            .build()
            .map_err(|e| Error::Config(format!("bad pattern {pattern:?}: {e}")))?;
        builder.add(glob);
    }
    builder.build().map_err(|e| Error::Config(e.to_string()))
}

/// Recursively lists files under `root` whose relative path or file name
/// matches any pattern (case-insensitive). Entries are sorted by relative
/// path. An empty pattern list selects the default image extensions.
pub fn scan_corpus(root: &Path, patterns: &[String]) -> Result<CorpusManifest> {
    let patterns: Vec<String> = if patterns.is_empty() {
        DEFAULT_PATTERNS.iter().map(|p| p.to_string()).collect()
    } else {
        patterns.to_vec()
    };
    let globs = build_globs(&patterns)?;
    let meta = std::fs::metadata(root).map_err(|e| Error::io(root, e))?;
    if !meta.is_dir() {
        return Err(Error::io(root, std::io::Error::other("not a directory")));
    }

    let mut entries = Vec::new();
    for item in WalkDir::new(root).follow_links(true) {
        let item = item.map_err(|e| {
            let path = e.path().unwrap_or(root).to_path_buf();
            Error::io(path, e.into())
        })?;
        if !item.file_type().is_file() {
            continue;
        }
        let relative = item.path().strip_prefix(root).unwrap_or(item.path());
        let relative_path = relative
            .components()
            .map(|c| c.as_os_str().to_string_lossy())
            .collect::<Vec<_>>()
            .join("/");
        if !globs.is_match(&relative_path) && !globs.is_match(item.file_name()) {
            continue;
        }
        let size = item.metadata().map_err(|e| Error::io(item.path(), e.into()))?.len();
        entries.push(ManifestEntry { relative_path, size });
    }
    entries.sort_by(|a, b| a.relative_path.cmp(&b.relative_path));
    entries.dedup_by(|a, b| a.relative_path == b.relative_path);

    Ok(CorpusManifest {
        root: root.to_path_buf(),
        entries,
        patterns,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for FileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone, Default)]
pub struct CorpusRun {
    /// Successfully scored entries, in manifest order.
    pub records: Vec<ErsRecord>,
    pub errors: Vec<FileError>,
}

/// Scores every manifest entry on up to `jobs` worker threads. Output order
/// follows the manifest regardless of `jobs`; unreadable or undecodable
/// files are reported without aborting the run.
pub fn score_corpus(manifest: &CorpusManifest, scorer: &Scorer, jobs: usize) -> Result<CorpusRun> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let outcomes: Vec<std::result::Result<ErsRecord, FileError>> = pool.install(|| {
        manifest
            .entries
            .par_iter()
            .map(|entry| {
                let path = manifest.path_of(entry);
                let fail = |message: String| FileError {
                    path: path.display().to_string(),
                    message,
                };
                let bytes = std::fs::read(&path).map_err(|e| fail(e.to_string()))?;
                scorer
                    .score_bytes(&bytes, &entry.relative_path)
                    .map_err(|e| fail(e.to_string()))
            })
            .collect()
    });

    let mut run = CorpusRun::default();
    for outcome in outcomes {
        match outcome {
            Ok(record) => run.records.push(record),
            Err(err) => run.errors.push(err),
        }
    }
    Ok(run)
}

/// Names of the summarized fields: the aggregate, then each sub-score.
pub fn summary_fields() -> [String; 7] {
    std::array::from_fn(|i| {
        if i == 0 {
            "ers".to_string()
        } else {
            format!("s_{}", METRIC_NAMES[i - 1])
        }
    })
}

pub(crate) fn field_values(record: &ErsRecord) -> [f64; 7] {
    let s = record.scores.as_array();
    [record.ers, s[0], s[1], s[2], s[3], s[4], s[5]]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldStats {
    pub field: String,
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub count: usize,
    pub degenerate_count: usize,
    /// Shared config fingerprint, `None` if records disagree.
    pub fingerprint: Option<String>,
    pub fields: Vec<FieldStats>,
}

impl CorpusSummary {
    pub fn field(&self, name: &str) -> Option<&FieldStats> {
        self.fields.iter().find(|f| f.field == name)
    }
}

impl fmt::Display for CorpusSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "records: {}  degenerate: {}  fingerprint: {}",
            self.count,
            self.degenerate_count,
            self.fingerprint.as_deref().unwrap_or("mixed")
        )?;
        writeln!(
            f,
            "{:<12} {:>10} {:>10} {:>10} {:>10}",
            "field", "mean", "std", "min", "max"
        )?;
        for s in &self.fields {
            writeln!(
                f,
                "{:<12} {:>10.6} {:>10.6} {:>10.6} {:>10.6}",
                s.field, s.mean, s.std, s.min, s.max
            )?;
        }
        Ok(())
    }
}

/// Mean, population standard deviation and range of the aggregate and each
/// sub-score.
pub fn summarize(records: &[ErsRecord]) -> Result<CorpusSummary> {
    if records.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let n = records.len() as f64;
    let values: Vec<[f64; 7]> = records.iter().map(field_values).collect();
    let fields = summary_fields()
        .into_iter()
        .enumerate()
        .map(|(i, field)| {
            let column = values.iter().map(|v| v[i]);
            let mean = column.clone().sum::<f64>() / n;
            let var = column.clone().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
            FieldStats {
                field,
                mean,
                std: var.sqrt(),
                min: column.clone().fold(f64::INFINITY, f64::min),
                max: column.fold(f64::NEG_INFINITY, f64::max),
            }
        })
        .collect();
    let first = &records[0].fingerprint;
    let fingerprint = records.iter().all(|r| &r.fingerprint == first).then(|| first.clone());
    Ok(CorpusSummary {
        count: records.len(),
        degenerate_count: records.iter().filter(|r| r.raw.flags.any()).count(),
        fingerprint,
        fields,
    })
}
