//! Versioned JSON run reports. Reports are written atomically
//! (temp-file-then-rename) and must parse back into the same structure;
//! everything except the `timings` block is a pure function of config and
//! seed.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use fedkt_core::privacy::PrivacyReport;

use crate::experiment::ExperimentConfig;
use crate::{Error, Result};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub dataset: DatasetSummary,
    /// Per-party example counts and class histograms from the first trial.
    pub partition: Vec<PartySummary>,
    pub methods: MethodResults,
    /// One ledger summary per trial.
    pub privacy: Vec<PrivacyReport>,
    pub communication: CommunicationSummary,
    pub gap_stats: GapStats,
    pub sweep: Option<SweepReport>,
    /// Wall-clock seconds; the only block allowed to differ between
    /// identical runs.
    pub timings: Timings,
    /// Known departures from the reference experimental setup.
    pub deviations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub examples: usize,
    pub input_columns: usize,
    pub encoded_dim: usize,
    pub num_classes: usize,
    pub label_mapping: Vec<String>,
    pub train_size: usize,
    pub public_size: usize,
    pub test_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartySummary {
    pub size: usize,
    pub class_histogram: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodResults {
    pub fedkt: MethodSummary,
    pub solo: Option<MethodSummary>,
    pub pate: Option<MethodSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub accuracy_mean: f64,
    pub accuracy_std: f64,
    pub per_trial: Vec<f64>,
}

impl MethodSummary {
    pub fn from_trials(per_trial: Vec<f64>) -> Self {
        Self {
            accuracy_mean: crate::mean(&per_trial),
            accuracy_std: crate::std_dev(&per_trial),
            per_trial,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommunicationSummary {
    /// Σ student sizes over all n·s students (bytes uploaded once).
    pub fedkt_total_bytes: u64,
    pub students: usize,
    pub mean_student_bytes: f64,
    /// Comparison line: 2·n·M̄·r for the configured round count r.
    pub fedavg_rounds: usize,
    pub fedavg_total_bytes: u64,
}

/// Top-2 gap statistics over the server tier's pre-noise histograms.
/// Raw per-query gaps are only included when no privacy level is active.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapStats {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    /// counts of ⌊gap⌋ per integer bucket, 0..=max
    pub histogram: Vec<usize>,
    pub raw: Option<Vec<f64>>,
    pub zero_vote_queries: usize,
}

impl GapStats {
    pub fn from_gaps(gaps: &[f64], zero_vote_queries: usize, include_raw: bool) -> Self {
        let mean = crate::mean(gaps);
        let min = gaps.iter().copied().fold(f64::INFINITY, f64::min);
        let max = gaps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut histogram = vec![0usize; max.max(0.0) as usize + 1];
        for &g in gaps {
            histogram[g.max(0.0) as usize] += 1;
        }
        Self {
            mean,
            min,
            max,
            histogram,
            raw: include_raw.then(|| gaps.to_vec()),
            zero_vote_queries,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub parameter: String,
    pub points: Vec<SweepPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub value: f64,
    pub accuracy_mean: f64,
    pub accuracy_per_trial: Vec<f64>,
    pub epsilon_mean: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub total_secs: f64,
    pub stages: BTreeMap<String, f64>,
}

impl RunReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Parse and check the schema version; this is the report validation
    /// used by tests and downstream tooling.
    pub fn from_json(json: &str) -> Result<Self> {
        let report: RunReport = serde_json::from_str(json)?;
        if report.schema_version != REPORT_SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported report schema version {}",
                report.schema_version
            )));
        }
        Ok(report)
    }

    /// Copy with zeroed timings, for determinism comparisons.
    pub fn without_timings(&self) -> Self {
        let mut copy = self.clone();
        copy.timings = Timings::default();
        copy
    }
}

/// Write-temp-then-rename so readers never observe a partial report.
pub fn write_report_atomic(report: &RunReport, path: &Path) -> Result<()> {
    let json = report.to_json()?;
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = match dir {
        Some(dir) => tempfile::NamedTempFile::new_in(dir),
        None => tempfile::NamedTempFile::new_in("."),
    }
    .map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    tmp.write_all(json.as_bytes()).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    tmp.persist(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e.error,
    })?;
    Ok(())
}
