//! Result-file schemas, dataset hashing, and atomic JSON output.
//!
//! Result files are deliberately deterministic: rerunning a command on the
//! same manifest and configuration reproduces them byte for byte. Wall-clock
//! timing is therefore reported on stderr and never serialized.

use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use minimax_fcm::baselines::FcmResult;
use minimax_fcm::solver::ClusteringResult;
use minimax_fcm::{DistanceMeasure, EvaluationReport, MultiViewDataset, SolverConfig};

pub const SCHEMA_VERSION: u32 = 1;

/// Everything needed to reproduce a run: solver settings plus the identity of
/// the data they ran on.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub k: usize,
    pub gamma: f64,
    pub m: f64,
    pub epsilon: f64,
    pub max_iter: usize,
    pub distance: DistanceMeasure,
    pub manifest: String,
    pub dataset_sha256: String,
}

impl ConfigEcho {
    pub fn new(config: &SolverConfig, manifest: &Path, dataset_sha256: String) -> Self {
        ConfigEcho {
            k: config.k,
            gamma: config.gamma,
            m: config.m,
            epsilon: config.epsilon,
            max_iter: config.max_iter,
            distance: config.measure,
            manifest: manifest.display().to_string(),
            dataset_sha256,
        }
    }
}

/// One clustering run: configuration echo, solver outputs, and metrics when
/// ground truth was available.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema_version: u32,
    pub algorithm: String,
    pub algorithm_version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub view: Option<String>,
    pub config: ConfigEcho,
    pub iterations: usize,
    pub converged: bool,
    pub objective_trace: Vec<f64>,
    pub per_view_cost: Vec<f64>,
    pub alpha: Vec<f64>,
    pub effective_weights: Vec<f64>,
    pub labels: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub memberships: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metrics: Option<EvaluationReport>,
    /// Populated for stderr reporting only; never serialized, so result files
    /// stay bitwise reproducible.
    #[serde(skip)]
    pub wall_time_ms: Option<f64>,
}

impl RunRecord {
    pub fn from_clustering(
        algorithm: &str,
        config: ConfigEcho,
        result: &ClusteringResult,
        metrics: Option<EvaluationReport>,
        emit_memberships: bool,
        wall_time_ms: f64,
    ) -> Self {
        RunRecord {
            schema_version: SCHEMA_VERSION,
            algorithm: algorithm.to_string(),
            algorithm_version: env!("CARGO_PKG_VERSION").to_string(),
            view: None,
            config,
            iterations: result.iterations,
            converged: result.converged,
            objective_trace: result.objective_trace.clone(),
            per_view_cost: result.per_view_cost.clone(),
            alpha: result.weights.alpha().to_vec(),
            effective_weights: result.weights.effective(),
            labels: result.labels.clone(),
            memberships: emit_memberships.then(|| matrix_rows(result.partition.matrix())),
            metrics,
            wall_time_ms: Some(wall_time_ms),
        }
    }

    pub fn from_fcm(
        algorithm: &str,
        view: Option<String>,
        config: ConfigEcho,
        result: &FcmResult,
        metrics: Option<EvaluationReport>,
        emit_memberships: bool,
        wall_time_ms: f64,
    ) -> Self {
        let final_cost = result.objective_trace.last().copied().unwrap_or(0.0);
        RunRecord {
            schema_version: SCHEMA_VERSION,
            algorithm: algorithm.to_string(),
            algorithm_version: env!("CARGO_PKG_VERSION").to_string(),
            view,
            config,
            iterations: result.iterations,
            converged: result.converged,
            objective_trace: result.objective_trace.clone(),
            per_view_cost: vec![final_cost],
            alpha: vec![1.0],
            effective_weights: vec![1.0],
            labels: result.labels.clone(),
            memberships: emit_memberships.then(|| matrix_rows(result.partition.matrix())),
            metrics,
            wall_time_ms: Some(wall_time_ms),
        }
    }
}

fn matrix_rows(matrix: &ndarray::Array2<f64>) -> Vec<Vec<f64>> {
    matrix.rows().into_iter().map(|r| r.to_vec()).collect()
}

/// Min/max of each metric over a set of runs, mirroring the worst/best
/// single-view summary rows of a comparison table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricsRow {
    pub accuracy: f64,
    pub nmi: f64,
    pub f_measure: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BaselineSummary {
    pub worst: MetricsRow,
    pub best: MetricsRow,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BaselineFile {
    pub schema_version: u32,
    pub mode: String,
    pub records: Vec<RunRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary: Option<BaselineSummary>,
}

/// Per-metric min/max across records that carry metrics; `None` when none do.
pub fn summarize(records: &[RunRecord]) -> Option<BaselineSummary> {
    let reports: Vec<&EvaluationReport> =
        records.iter().filter_map(|r| r.metrics.as_ref()).collect();
    if reports.is_empty() {
        return None;
    }
    let fold = |f: fn(f64, f64) -> f64, init: f64, get: fn(&EvaluationReport) -> f64| {
        reports.iter().map(|r| get(r)).fold(init, f)
    };
    Some(BaselineSummary {
        worst: MetricsRow {
            accuracy: fold(f64::min, f64::MAX, |r| r.accuracy),
            nmi: fold(f64::min, f64::MAX, |r| r.nmi),
            f_measure: fold(f64::min, f64::MAX, |r| r.f_measure),
        },
        best: MetricsRow {
            accuracy: fold(f64::max, f64::MIN, |r| r.accuracy),
            nmi: fold(f64::max, f64::MIN, |r| r.nmi),
            f_measure: fold(f64::max, f64::MIN, |r| r.f_measure),
        },
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BestPoint {
    pub value: f64,
    pub accuracy: f64,
    pub nmi: f64,
    pub f_measure: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepFile {
    pub schema_version: u32,
    pub param: String,
    pub records: Vec<RunRecord>,
    /// Grid point with the highest NMI, when ground truth was available.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub best_by_nmi: Option<BestPoint>,
}

/// SHA-256 over the parsed numeric content of a dataset (dims, row-major
/// values as little-endian doubles, labels), so the hash identifies the data
/// independent of CSV formatting quirks.
pub fn dataset_sha256(dataset: &MultiViewDataset) -> String {
    let mut hasher = Sha256::new();
    hasher.update(b"mmfcm-dataset-v1");
    hasher.update((dataset.n_views() as u64).to_le_bytes());
    for view in dataset.views() {
        hasher.update(view.name().as_bytes());
        hasher.update([0u8]);
        hasher.update((view.n_rows() as u64).to_le_bytes());
        hasher.update((view.dim() as u64).to_le_bytes());
        for &v in view.data().iter() {
            hasher.update(v.to_le_bytes());
        }
    }
    match dataset.labels() {
        Some(labels) => {
            hasher.update([1u8]);
            for &l in labels {
                hasher.update((l as u64).to_le_bytes());
            }
        }
        None => hasher.update([0u8]),
    }
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Writes via a temp file in the same directory plus a rename, so readers
/// never observe a half-written record.
pub fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    let file_name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "output".to_string());
    let tmp = path.with_file_name(format!("{file_name}.tmp"));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)
}
