//! Multi-view dataset container, manifest loading, per-view normalization,
//! and the concatenated-view baseline input.
//!
//! A dataset is described by a JSON manifest:
//!
//! ```json
//! {
//!   "name": "example",
//!   "views": [
//!     { "name": "color", "path": "color.csv", "normalization": "unit_variance_inv_sqrt_dim", "header": false }
//!   ],
//!   "labels": { "path": "labels.csv", "header": false },
//!   "distance": "euclidean"
//! }
//! ```
//!
//! Matrix files are CSV with rows as objects and columns as features; the
//! labels file holds one integer class id per line. Paths are resolved
//! relative to the manifest's directory. Loading records each view's
//! normalization tag without applying it; call [`MultiViewDataset::normalize`]
//! before clustering.

use std::fs;
use std::path::{Path, PathBuf};

use ndarray::{Array2, Axis};
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distance::DistanceMeasure;
use crate::error::{Error, Result};

/// Per-view normalization recipe named in the manifest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Use the data as-is.
    None,
    /// Center each feature, scale it to unit variance (population, divisor N),
    /// then multiply the whole view by `1/sqrt(D)`.
    UnitVarianceInvSqrtDim,
    /// Divide each row by its l1 norm; all-zero rows stay zero.
    L1Rows,
}

/// One feature representation of the N objects: an N x D matrix plus its
/// normalization state.
#[derive(Debug, Clone)]
pub struct ViewMatrix {
    data: Array2<f64>,
    name: String,
    normalization: Normalization,
    applied: bool,
}

impl ViewMatrix {
    /// Builds a view, rejecting non-finite entries.
    pub fn new(
        name: impl Into<String>,
        data: Array2<f64>,
        normalization: Normalization,
    ) -> Result<Self> {
        let name = name.into();
        for ((row, column), &v) in data.indexed_iter() {
            if !v.is_finite() {
                return Err(Error::NonFiniteInput { view: name, row, column });
            }
        }
        Ok(ViewMatrix {
            data,
            name,
            normalization,
            applied: false,
        })
    }

    pub fn data(&self) -> &Array2<f64> {
        &self.data
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Feature dimension D of this view.
    pub fn dim(&self) -> usize {
        self.data.ncols()
    }

    pub fn n_rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn is_applied(&self) -> bool {
        self.applied
    }

    /// True once the view can be clustered: either its normalization has been
    /// applied or none was requested.
    pub fn is_ready(&self) -> bool {
        self.applied || self.normalization == Normalization::None
    }

    /// Applies the view's own normalization tag.
    pub fn normalized(self) -> Result<ViewMatrix> {
        match self.normalization {
            Normalization::None => Ok(self),
            Normalization::UnitVarianceInvSqrtDim => normalize_unit_variance_inv_sqrt_dim(self),
            Normalization::L1Rows => l1_normalize_rows(self),
        }
    }

    fn guard_unapplied(&self) -> Result<()> {
        if self.applied {
            return Err(Error::AlreadyNormalized {
                view: self.name.clone(),
            });
        }
        Ok(())
    }
}

/// Centers each feature, scales nonconstant features to unit variance
/// (population variance, divisor N), then multiplies the whole matrix by
/// `1/sqrt(D)`. Constant columns are centered only.
pub fn normalize_unit_variance_inv_sqrt_dim(view: ViewMatrix) -> Result<ViewMatrix> {
    view.guard_unapplied()?;
    let (n, d) = view.data.dim();
    if n < 2 {
        return Err(Error::DegenerateView {
            view: view.name,
            rows: n,
        });
    }
    let mut data = view.data;
    let scale = 1.0 / (d as f64).sqrt();
    for mut col in data.axis_iter_mut(Axis(1)) {
        let first = col[0];
        let constant = col.iter().all(|&x| x == first);
        let mean = col.sum() / n as f64;
        col.mapv_inplace(|x| x - mean);
        if !constant {
            let var = col.iter().map(|&x| x * x).sum::<f64>() / n as f64;
            if var > 0.0 {
                let sd = var.sqrt();
                col.mapv_inplace(|x| x / sd);
            }
        }
        col.mapv_inplace(|x| x * scale);
    }
    Ok(ViewMatrix {
        data,
        name: view.name,
        normalization: Normalization::UnitVarianceInvSqrtDim,
        applied: true,
    })
}

/// Divides each row by its l1 norm. Requires nonnegative entries; all-zero
/// rows are left untouched.
pub fn l1_normalize_rows(view: ViewMatrix) -> Result<ViewMatrix> {
    view.guard_unapplied()?;
    for ((row, column), &v) in view.data.indexed_iter() {
        if v < 0.0 {
            return Err(Error::NegativeEntry {
                view: view.name,
                row,
                column,
            });
        }
    }
    let mut data = view.data;
    for mut row in data.axis_iter_mut(Axis(0)) {
        let sum: f64 = row.sum();
        if sum > 0.0 {
            row.mapv_inplace(|x| x / sum);
        }
    }
    Ok(ViewMatrix {
        data,
        name: view.name,
        normalization: Normalization::L1Rows,
        applied: true,
    })
}

/// P feature matrices over the same N objects, with optional ground-truth
/// class labels. Immutable after construction.
#[derive(Debug, Clone)]
pub struct MultiViewDataset {
    name: String,
    views: Vec<ViewMatrix>,
    labels: Option<Vec<usize>>,
    distance: DistanceMeasure,
}

impl MultiViewDataset {
    pub fn new(
        name: impl Into<String>,
        views: Vec<ViewMatrix>,
        labels: Option<Vec<usize>>,
        distance: DistanceMeasure,
    ) -> Result<Self> {
        if views.is_empty() {
            return Err(Error::InvalidConfig("dataset needs at least one view".into()));
        }
        let n = views[0].n_rows();
        if n == 0 {
            return Err(Error::InvalidConfig("dataset needs at least one object".into()));
        }
        for view in &views {
            if view.n_rows() != n {
                return Err(Error::RowCountMismatch {
                    subject: format!("view {:?}", view.name()),
                    expected: n,
                    found: view.n_rows(),
                });
            }
        }
        if let Some(labels) = &labels {
            if labels.len() != n {
                return Err(Error::RowCountMismatch {
                    subject: "labels".into(),
                    expected: n,
                    found: labels.len(),
                });
            }
            check_contiguous(labels)?;
        }
        Ok(MultiViewDataset {
            name: name.into(),
            views,
            labels,
            distance,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn views(&self) -> &[ViewMatrix] {
        &self.views
    }

    pub fn view(&self, p: usize) -> &ViewMatrix {
        &self.views[p]
    }

    pub fn n_views(&self) -> usize {
        self.views.len()
    }

    pub fn n_objects(&self) -> usize {
        self.views[0].n_rows()
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    pub fn distance(&self) -> DistanceMeasure {
        self.distance
    }

    /// Number of ground-truth classes, when labels are present.
    pub fn num_classes(&self) -> Option<usize> {
        self.labels
            .as_ref()
            .map(|l| l.iter().copied().max().map_or(0, |m| m + 1))
    }

    /// Applies every view's recorded normalization. Views are independent, so
    /// they are normalized concurrently under the `parallel` feature.
    pub fn normalize(self) -> Result<Self> {
        let MultiViewDataset {
            name,
            views,
            labels,
            distance,
        } = self;
        #[cfg(feature = "parallel")]
        let views = views
            .into_par_iter()
            .map(ViewMatrix::normalized)
            .collect::<Result<Vec<_>>>()?;
        #[cfg(not(feature = "parallel"))]
        let views = views
            .into_iter()
            .map(ViewMatrix::normalized)
            .collect::<Result<Vec<_>>>()?;
        Ok(MultiViewDataset {
            name,
            views,
            labels,
            distance,
        })
    }

    /// True when every view is ready for clustering.
    pub fn all_ready(&self) -> bool {
        self.views.iter().all(ViewMatrix::is_ready)
    }

    pub(crate) fn ensure_ready(&self) -> Result<()> {
        for view in &self.views {
            if !view.is_ready() {
                return Err(Error::NotNormalized {
                    view: view.name().to_string(),
                });
            }
        }
        Ok(())
    }
}

fn check_contiguous(labels: &[usize]) -> Result<()> {
    let max = labels.iter().copied().max().unwrap_or(0);
    let mut seen = vec![false; max + 1];
    for &l in labels {
        seen[l] = true;
    }
    if let Some(missing) = seen.iter().position(|&s| !s) {
        return Err(Error::LabelsNotContiguous {
            message: format!("class {missing} has no objects but class {max} exists"),
        });
    }
    Ok(())
}

/// Stacks all views side by side into one N x (sum of D) matrix, in manifest
/// order with feature order preserved inside each view. Every view must be
/// ready (normalized, or tagged `none`).
pub fn concatenate_views(dataset: &MultiViewDataset) -> Result<ViewMatrix> {
    dataset.ensure_ready()?;
    let n = dataset.n_objects();
    let total: usize = dataset.views().iter().map(ViewMatrix::dim).sum();
    let mut out = Array2::<f64>::zeros((n, total));
    let mut offset = 0;
    for view in dataset.views() {
        let d = view.dim();
        out.slice_mut(ndarray::s![.., offset..offset + d])
            .assign(view.data());
        offset += d;
    }
    Ok(ViewMatrix {
        data: out,
        name: "concatenated".into(),
        normalization: Normalization::None,
        applied: false,
    })
}

#[derive(Serialize, Deserialize)]
struct ManifestFile {
    name: String,
    views: Vec<ManifestView>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<ManifestLabels>,
    distance: DistanceMeasure,
}

#[derive(Serialize, Deserialize)]
struct ManifestView {
    name: String,
    path: String,
    normalization: Normalization,
    header: bool,
}

#[derive(Serialize, Deserialize)]
struct ManifestLabels {
    path: String,
    header: bool,
}

/// Loads a dataset described by a JSON manifest. Normalization tags are
/// recorded but not applied; row counts are validated across views and labels.
pub fn load_manifest(path: impl AsRef<Path>) -> Result<MultiViewDataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let manifest: ManifestFile = serde_json::from_str(&text).map_err(|e| Error::Manifest {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));

    let mut views = Vec::with_capacity(manifest.views.len());
    for mv in &manifest.views {
        let file = base.join(&mv.path);
        let data = read_matrix_csv(&file, mv.header)?;
        views.push(ViewMatrix::new(mv.name.clone(), data, mv.normalization)?);
    }
    let labels = match &manifest.labels {
        Some(ml) => Some(read_labels_file(base.join(&ml.path), ml.header)?),
        None => None,
    };
    MultiViewDataset::new(manifest.name, views, labels, manifest.distance)
}

/// Reads a CSV matrix file: rows are objects, columns are features.
pub fn read_matrix_csv(path: impl AsRef<Path>, header: bool) -> Result<Array2<f64>> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(header)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| io_or_csv(path, e))?;
    let mut values = Vec::new();
    let mut ncols = None;
    let offset = if header { 2 } else { 1 };
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| io_or_csv(path, e))?;
        match ncols {
            None => ncols = Some(record.len()),
            Some(c) if c != record.len() => {
                return Err(Error::Csv {
                    path: path.to_path_buf(),
                    message: format!(
                        "row {} has {} columns, expected {}",
                        i + offset,
                        record.len(),
                        c
                    ),
                })
            }
            _ => {}
        }
        for (column, field) in record.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| Error::NonNumericCell {
                path: path.to_path_buf(),
                line: i + offset,
                column,
                value: field.to_string(),
            })?;
            values.push(v);
        }
    }
    let rows = if values.is_empty() {
        0
    } else {
        values.len() / ncols.unwrap_or(1)
    };
    Array2::from_shape_vec((rows, ncols.unwrap_or(0)), values).map_err(|e| Error::Csv {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Reads a labels file: one nonnegative integer per line (a single CSV column
/// parses identically).
pub fn read_labels_file(path: impl AsRef<Path>, header: bool) -> Result<Vec<usize>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut labels = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if header && i == 0 {
            continue;
        }
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let value: i64 = line.parse().map_err(|_| Error::InvalidLabel {
            path: path.to_path_buf(),
            line: i + 1,
            message: format!("not an integer: {line:?}"),
        })?;
        if value < 0 {
            return Err(Error::InvalidLabel {
                path: path.to_path_buf(),
                line: i + 1,
                message: format!("negative class id: {value}"),
            });
        }
        labels.push(value as usize);
    }
    Ok(labels)
}

fn io_or_csv(path: &Path, e: csv::Error) -> Error {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(source) => Error::Io {
                path: path.to_path_buf(),
                source,
            },
            other => Error::Csv {
                path: path.to_path_buf(),
                message: format!("{other:?}"),
            },
        }
    } else {
        Error::Csv {
            path: path.to_path_buf(),
            message: e.to_string(),
        }
    }
}

/// Persists a dataset as `manifest.json` plus one CSV per view (and
/// `labels.csv` when labels exist) inside `dir`. Views that were already
/// normalized are written with tag `none` so a reload does not normalize
/// twice. Returns the manifest path.
pub fn write_dataset(dataset: &MultiViewDataset, dir: impl AsRef<Path>) -> Result<PathBuf> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut views = Vec::new();
    for (p, view) in dataset.views().iter().enumerate() {
        let file_name = format!("view{p}.csv");
        write_matrix_csv(&dir.join(&file_name), view.data())?;
        let tag = if view.is_applied() {
            Normalization::None
        } else {
            view.normalization()
        };
        views.push(ManifestView {
            name: view.name().to_string(),
            path: file_name,
            normalization: tag,
            header: false,
        });
    }
    let labels = match dataset.labels() {
        Some(labels) => {
            let mut text = String::new();
            for l in labels {
                text.push_str(&l.to_string());
                text.push('\n');
            }
            let path = dir.join("labels.csv");
            fs::write(&path, text).map_err(|source| Error::Io { path, source })?;
            Some(ManifestLabels {
                path: "labels.csv".into(),
                header: false,
            })
        }
        None => None,
    };
    let manifest = ManifestFile {
        name: dataset.name().to_string(),
        views,
        labels,
        distance: dataset.distance(),
    };
    let manifest_path = dir.join("manifest.json");
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    fs::write(&manifest_path, text).map_err(|source| Error::Io {
        path: manifest_path.clone(),
        source,
    })?;
    Ok(manifest_path)
}

fn write_matrix_csv(path: &Path, data: &Array2<f64>) -> Result<()> {
    let mut text = String::new();
    for row in data.rows() {
        let mut first = true;
        for v in row {
            if !first {
                text.push(',');
            }
            text.push_str(&v.to_string());
            first = false;
        }
        text.push('\n');
    }
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
