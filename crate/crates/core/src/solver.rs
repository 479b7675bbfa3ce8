//! The minimax multi-view fuzzy c-means solver.
//!
//! The optimizer alternates three closed-form block updates: consensus
//! memberships (min step), per-view centroids (min step), and simplex view
//! weights (max step). The weighted cost of each view enters the objective as
//! `alpha_p^gamma * Q_p`, so the view with the largest cost receives the
//! largest weight and the membership/centroid steps are pushed to shrink it.
//!
//! Per-object membership updates and per-(view, cluster) centroid updates are
//! independent and run data-parallel under the `parallel` feature. All sums
//! over objects run in ascending index order inside a single task, so results
//! are bitwise identical with and without the feature.

use ndarray::Array2;

use crate::dataset::{MultiViewDataset, ViewMatrix};
use crate::distance::{self, DistanceMeasure};
use crate::error::{Error, Result};
use crate::par;

/// Hyperparameters for one solver run.
#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    /// Number of clusters.
    pub k: usize,
    /// Weight-distribution exponent, in `[0, 1)`. Near 0 the effective view
    /// weights flatten toward uniform; near 1 the max-cost view takes all the
    /// weight.
    pub gamma: f64,
    /// Fuzzifier, strictly greater than 1.
    pub m: f64,
    /// Convergence threshold on the Frobenius norm of successive membership
    /// matrices.
    pub epsilon: f64,
    /// Iteration cap; the solver reports non-convergence instead of looping
    /// forever.
    pub max_iter: usize,
    pub measure: DistanceMeasure,
}

impl SolverConfig {
    /// Defaults: gamma 0.5, m 1.5, epsilon 1e-5, max_iter 100.
    pub fn new(k: usize, measure: DistanceMeasure) -> Self {
        SolverConfig {
            k,
            gamma: 0.5,
            m: 1.5,
            epsilon: 1e-5,
            max_iter: 100,
            measure,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 1 {
            return Err(Error::InvalidConfig("K must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.gamma) {
            return Err(Error::InvalidConfig(format!(
                "gamma must lie in [0, 1), got {}",
                self.gamma
            )));
        }
        if self.m.is_nan() || self.m <= 1.0 {
            return Err(Error::InvalidConfig(format!(
                "fuzzifier m must exceed 1, got {}",
                self.m
            )));
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be positive".into()));
        }
        Ok(())
    }
}

/// K x N consensus membership matrix; every column lies on the probability
/// simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyPartition {
    u: Array2<f64>,
}

impl FuzzyPartition {
    /// Validates entries in `[0, 1]` and column sums near 1.
    pub fn new(u: Array2<f64>) -> Result<Self> {
        for &v in u.iter() {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidConfig(format!(
                    "membership {v} outside [0, 1]"
                )));
            }
        }
        for (i, col) in u.columns().into_iter().enumerate() {
            let sum: f64 = col.sum();
            if (sum - 1.0).abs() > 1e-8 {
                return Err(Error::InvalidConfig(format!(
                    "membership column {i} sums to {sum}, expected 1"
                )));
            }
        }
        Ok(FuzzyPartition { u })
    }

    pub(crate) fn from_matrix_unchecked(u: Array2<f64>) -> Self {
        FuzzyPartition { u }
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.u
    }

    pub fn k(&self) -> usize {
        self.u.nrows()
    }

    pub fn n(&self) -> usize {
        self.u.ncols()
    }

    /// Frobenius norm of the difference to another partition of equal shape.
    pub fn frobenius_delta(&self, other: &FuzzyPartition) -> f64 {
        let mut acc = 0.0;
        for (a, b) in self.u.iter().zip(other.u.iter()) {
            let d = a - b;
            acc += d * d;
        }
        acc.sqrt()
    }
}

/// Per-view centroid matrices, each K x D_p.
#[derive(Debug, Clone, PartialEq)]
pub struct CentroidSet {
    per_view: Vec<Array2<f64>>,
}

impl CentroidSet {
    pub fn new(per_view: Vec<Array2<f64>>) -> Self {
        CentroidSet { per_view }
    }

    pub fn views(&self) -> &[Array2<f64>] {
        &self.per_view
    }

    pub fn view(&self, p: usize) -> &Array2<f64> {
        &self.per_view[p]
    }

    pub fn n_views(&self) -> usize {
        self.per_view.len()
    }

    pub fn k(&self) -> usize {
        self.per_view.first().map_or(0, |v| v.nrows())
    }
}

/// Simplex-constrained view weights together with the exponent that turns
/// them into effective weights `alpha_p^gamma`.
#[derive(Debug, Clone, PartialEq)]
pub struct ViewWeights {
    alpha: Vec<f64>,
    gamma: f64,
}

impl ViewWeights {
    pub fn new(alpha: Vec<f64>, gamma: f64) -> Result<Self> {
        if alpha.is_empty() {
            return Err(Error::InvalidConfig("weights need at least one view".into()));
        }
        let sum: f64 = alpha.iter().sum();
        if alpha.iter().any(|&a| !a.is_finite() || a < 0.0) || (sum - 1.0).abs() > 1e-8 {
            return Err(Error::InvalidConfig(format!(
                "view weights must be nonnegative and sum to 1, got {alpha:?}"
            )));
        }
        Ok(ViewWeights { alpha, gamma })
    }

    /// Uniform weights `1/P`, the starting point of the optimization.
    pub fn uniform(p: usize, gamma: f64) -> Result<Self> {
        if p < 1 {
            return Err(Error::InvalidConfig("view count must be at least 1".into()));
        }
        ViewWeights::new(vec![1.0 / p as f64; p], gamma)
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn n_views(&self) -> usize {
        self.alpha.len()
    }

    /// Effective weights `alpha_p^gamma`.
    pub fn effective(&self) -> Vec<f64> {
        self.alpha.iter().map(|a| a.powf(self.gamma)).collect()
    }

    pub(crate) fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }
}

/// A cluster whose membership mass vanished during a centroid update; the
/// previous centroid was kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DegenerateEvent {
    pub iteration: usize,
    pub view: usize,
    pub cluster: usize,
}

/// Everything a finished run produces.
#[derive(Debug, Clone)]
pub struct ClusteringResult {
    /// Hard labels, per-object argmax over clusters (lowest index on ties).
    pub labels: Vec<usize>,
    pub partition: FuzzyPartition,
    pub centroids: CentroidSet,
    pub weights: ViewWeights,
    /// Final per-view costs Q_p.
    pub per_view_cost: Vec<f64>,
    /// Objective after each full sweep; length equals `iterations`.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub degenerate_clusters: Vec<DegenerateEvent>,
}

/// Per-iteration view of the solver state, handed to observers after each
/// full sweep.
pub struct IterationSnapshot<'a> {
    pub iteration: usize,
    pub partition: &'a FuzzyPartition,
    pub centroids: &'a CentroidSet,
    pub weights: &'a ViewWeights,
    pub per_view_cost: &'a [f64],
    pub objective: f64,
    /// Frobenius distance to the previous sweep's memberships; `None` on the
    /// first sweep.
    pub delta: Option<f64>,
}

/// Flat row-major access to a view plus cached row norms for cosine.
struct PreparedView<'a> {
    flat: &'a [f64],
    d: usize,
    row_norms: Option<Vec<f64>>,
}

impl<'a> PreparedView<'a> {
    fn new(view: &'a ViewMatrix, measure: DistanceMeasure) -> Self {
        let flat = view
            .data()
            .as_slice()
            .expect("view matrices are row-major");
        let d = view.dim();
        let row_norms = match measure {
            DistanceMeasure::SquaredEuclidean => None,
            DistanceMeasure::Cosine => Some(
                (0..view.n_rows())
                    .map(|i| distance::l2_norm(&flat[i * d..(i + 1) * d]))
                    .collect(),
            ),
        };
        PreparedView { flat, d, row_norms }
    }

    #[inline]
    fn row(&self, i: usize) -> &[f64] {
        &self.flat[i * self.d..(i + 1) * self.d]
    }
}

fn centroid_norms(centroids: &Array2<f64>, measure: DistanceMeasure) -> Option<Vec<f64>> {
    match measure {
        DistanceMeasure::SquaredEuclidean => None,
        DistanceMeasure::Cosine => Some(
            centroids
                .rows()
                .into_iter()
                .map(|r| distance::l2_norm(r.as_slice().expect("row-major centroids")))
                .collect(),
        ),
    }
}

#[inline]
fn pair_distance(
    measure: DistanceMeasure,
    x: &[f64],
    x_norm: Option<f64>,
    v: &[f64],
    v_norm: Option<f64>,
) -> f64 {
    match measure {
        DistanceMeasure::SquaredEuclidean => distance::squared_euclidean(x, v),
        DistanceMeasure::Cosine => distance::cosine_from_parts(
            distance::dot(x, v),
            x_norm.expect("cached row norm"),
            v_norm.expect("cached centroid norm"),
        ),
    }
}

/// Cost of one view: `sum_c sum_i u_ci^m * dist^2(x_i, v_c)`.
pub fn view_cost(
    partition: &FuzzyPartition,
    centroids: &Array2<f64>,
    view: &ViewMatrix,
    m: f64,
    measure: DistanceMeasure,
) -> f64 {
    let k = partition.k();
    let n = partition.n();
    assert_eq!(n, view.n_rows(), "partition and view row counts differ");
    assert_eq!(k, centroids.nrows(), "partition and centroid counts differ");
    assert_eq!(view.dim(), centroids.ncols(), "view and centroid dims differ");

    let prepared = PreparedView::new(view, measure);
    let c_norms = centroid_norms(centroids, measure);
    let u = partition.matrix();
    let per_cluster = par::map_indexed(k, |c| {
        let weights = u.row(c);
        let weights = weights.as_slice().expect("row-major memberships");
        let vc = centroids.row(c);
        let vc = vc.as_slice().expect("row-major centroids");
        let vc_norm = c_norms.as_ref().map(|ns| ns[c]);
        let mut acc = 0.0;
        for i in 0..n {
            let x_norm = prepared.row_norms.as_ref().map(|ns| ns[i]);
            let d2 = pair_distance(measure, prepared.row(i), x_norm, vc, vc_norm);
            acc += weights[i].powf(m) * d2;
        }
        acc
    });
    per_cluster.iter().sum()
}

/// All per-view costs, in view order.
pub fn per_view_costs(
    partition: &FuzzyPartition,
    centroids: &CentroidSet,
    dataset: &MultiViewDataset,
    m: f64,
    measure: DistanceMeasure,
) -> Vec<f64> {
    par::map_indexed(dataset.n_views(), |p| {
        view_cost(partition, centroids.view(p), dataset.view(p), m, measure)
    })
}

pub(crate) fn weighted_cost_sum(costs: &[f64], weights: &ViewWeights) -> f64 {
    let effective = weights.effective();
    let mut acc = 0.0;
    for (w, q) in effective.iter().zip(costs.iter()) {
        acc += w * q;
    }
    acc
}

/// The minimax objective `sum_p alpha_p^gamma * Q_p` at the given state.
pub fn objective(
    partition: &FuzzyPartition,
    centroids: &CentroidSet,
    weights: &ViewWeights,
    dataset: &MultiViewDataset,
    config: &SolverConfig,
) -> f64 {
    let costs = per_view_costs(partition, centroids, dataset, config.m, config.measure);
    weighted_cost_sum(&costs, weights)
}

/// Closed-form membership update with centroids and weights fixed.
///
/// For each object, `a_c = sum_p alpha_p^gamma * dist^2(x_i, v_c)` and
/// `u_c = [sum_j (a_c / a_j)^(1/(m-1))]^(-1)`. When some `a_c` are exactly
/// zero, the unit mass is split evenly over those clusters.
pub fn update_membership(
    dataset: &MultiViewDataset,
    centroids: &CentroidSet,
    weights: &ViewWeights,
    config: &SolverConfig,
) -> FuzzyPartition {
    let k = config.k;
    let n = dataset.n_objects();
    let n_views = dataset.n_views();
    assert_eq!(centroids.n_views(), n_views);
    assert_eq!(weights.n_views(), n_views);

    let effective = weights.effective();
    let exponent = 1.0 / (config.m - 1.0);
    let prepared: Vec<PreparedView> = dataset
        .views()
        .iter()
        .map(|v| PreparedView::new(v, config.measure))
        .collect();
    let c_flat: Vec<&Array2<f64>> = centroids.views().iter().collect();
    let c_norms: Vec<Option<Vec<f64>>> = c_flat
        .iter()
        .map(|c| centroid_norms(c, config.measure))
        .collect();

    // Object-major buffer, transposed into the K x N matrix afterwards.
    let mut buf = vec![0.0f64; n * k];
    par::for_each_row_mut(&mut buf, k, |i, out| {
        let mut agg = vec![0.0f64; k];
        for p in 0..n_views {
            let view = &prepared[p];
            let x = view.row(i);
            let x_norm = view.row_norms.as_ref().map(|ns| ns[i]);
            let w = effective[p];
            let cents = c_flat[p];
            let cents_flat = cents.as_slice().expect("row-major centroids");
            let d = view.d;
            for (c, cell) in agg.iter_mut().enumerate() {
                let vc = &cents_flat[c * d..(c + 1) * d];
                let vc_norm = c_norms[p].as_ref().map(|ns| ns[c]);
                *cell += w * pair_distance(config.measure, x, x_norm, vc, vc_norm);
            }
        }
        let zeros = agg.iter().filter(|&&a| a == 0.0).count();
        if zeros > 0 {
            let share = 1.0 / zeros as f64;
            for (c, cell) in out.iter_mut().enumerate() {
                *cell = if agg[c] == 0.0 { share } else { 0.0 };
            }
        } else {
            for (c, cell) in out.iter_mut().enumerate() {
                let mut sum = 0.0;
                for &aj in &agg {
                    sum += (agg[c] / aj).powf(exponent);
                }
                *cell = 1.0 / sum;
            }
        }
    });
    let u = Array2::from_shape_fn((k, n), |(c, i)| buf[i * k + c]);
    FuzzyPartition::from_matrix_unchecked(u)
}

/// Closed-form centroid update with memberships fixed: each centroid is the
/// `u^m`-weighted mean of its view's rows. The view weights cancel out of the
/// stationarity condition, so they do not appear here. A cluster whose weight
/// mass sums to zero keeps its previous centroid and is reported.
pub fn update_centroids(
    partition: &FuzzyPartition,
    dataset: &MultiViewDataset,
    previous: &CentroidSet,
    m: f64,
) -> (CentroidSet, Vec<(usize, usize)>) {
    let k = partition.k();
    let n = partition.n();
    assert_eq!(n, dataset.n_objects());
    assert_eq!(previous.n_views(), dataset.n_views());

    let um = partition.matrix().mapv(|x| x.powf(m));
    let mut per_view = Vec::with_capacity(dataset.n_views());
    let mut degenerate = Vec::new();
    for (p, view) in dataset.views().iter().enumerate() {
        let d = view.dim();
        let flat = view.data().as_slice().expect("row-major view data");
        let rows = par::map_indexed(k, |c| {
            let w = um.row(c);
            let w = w.as_slice().expect("row-major memberships");
            let mut numerator = vec![0.0f64; d];
            let mut denominator = 0.0f64;
            for i in 0..n {
                let wi = w[i];
                denominator += wi;
                let x = &flat[i * d..(i + 1) * d];
                for (acc, &xv) in numerator.iter_mut().zip(x.iter()) {
                    *acc += wi * xv;
                }
            }
            if denominator == 0.0 {
                (previous.view(p).row(c).to_vec(), true)
            } else {
                for v in numerator.iter_mut() {
                    *v /= denominator;
                }
                (numerator, false)
            }
        });
        let mut matrix = Array2::<f64>::zeros((k, d));
        for (c, (row, flagged)) in rows.into_iter().enumerate() {
            if flagged {
                degenerate.push((p, c));
            }
            for (j, v) in row.into_iter().enumerate() {
                matrix[[c, j]] = v;
            }
        }
        per_view.push(matrix);
    }
    (CentroidSet::new(per_view), degenerate)
}

/// Closed-form weight update with memberships and centroids fixed:
/// `alpha_p = [sum_j (Q_p / Q_j)^(1/(gamma-1))]^(-1)`, the maximizer of the
/// weighted cost over the simplex. Costs are clamped below at 1e-12 so a
/// zero-cost view cannot divide by zero. The max-cost view receives the
/// largest weight.
pub fn update_view_weights(per_view_cost: &[f64], gamma: f64) -> Result<ViewWeights> {
    if per_view_cost.is_empty() {
        return Err(Error::InvalidConfig("weights need at least one view".into()));
    }
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::InvalidConfig(format!(
            "gamma must lie in [0, 1), got {gamma}"
        )));
    }
    let q: Vec<f64> = per_view_cost.iter().map(|&c| c.max(1e-12)).collect();
    let exponent = 1.0 / (gamma - 1.0);
    let alpha: Vec<f64> = q
        .iter()
        .map(|&qp| {
            let mut sum = 0.0;
            for &qj in &q {
                sum += (qp / qj).powf(exponent);
            }
            1.0 / sum
        })
        .collect();
    ViewWeights::new(alpha, gamma)
}

/// Crisp labels: per-object argmax over clusters, lowest index on ties.
pub fn harden(partition: &FuzzyPartition) -> Vec<usize> {
    let u = partition.matrix();
    (0..partition.n())
        .map(|i| {
            let mut best = 0;
            let mut best_val = u[[0, i]];
            for c in 1..partition.k() {
                let v = u[[c, i]];
                if v > best_val {
                    best = c;
                    best_val = v;
                }
            }
            best
        })
        .collect()
}

/// Runs the full alternating optimization from the given initial state.
pub fn fit(
    dataset: &MultiViewDataset,
    config: &SolverConfig,
    initial: crate::init::InitialState,
) -> Result<ClusteringResult> {
    fit_with_observer(dataset, config, initial, |_| {})
}

/// [`fit`], invoking `observe` after every full sweep. Sweeps update
/// memberships, then centroids, then weights; the loop stops when the
/// Frobenius norm of successive membership matrices drops below epsilon or
/// the iteration cap is reached.
pub fn fit_with_observer(
    dataset: &MultiViewDataset,
    config: &SolverConfig,
    initial: crate::init::InitialState,
    mut observe: impl FnMut(&IterationSnapshot),
) -> Result<ClusteringResult> {
    config.validate()?;
    dataset.ensure_ready()?;
    let n = dataset.n_objects();
    if config.k > n {
        return Err(Error::KExceedsN { k: config.k, n });
    }
    if initial.centroids.n_views() != dataset.n_views()
        || initial.weights.n_views() != dataset.n_views()
    {
        return Err(Error::InvalidConfig(
            "initial state does not match the dataset's view count".into(),
        ));
    }
    for (p, c) in initial.centroids.views().iter().enumerate() {
        if c.nrows() != config.k || c.ncols() != dataset.view(p).dim() {
            return Err(Error::InvalidConfig(format!(
                "initial centroids for view {p} have shape {:?}, expected ({}, {})",
                c.dim(),
                config.k,
                dataset.view(p).dim()
            )));
        }
    }

    let mut centroids = initial.centroids;
    let mut weights = initial.weights.with_gamma(config.gamma);
    let mut previous_u: Option<FuzzyPartition> = None;
    let mut trace = Vec::new();
    let mut costs = Vec::new();
    let mut degenerate_clusters = Vec::new();
    let mut iterations = 0;
    let mut converged = false;

    for t in 0..config.max_iter {
        let partition = update_membership(dataset, &centroids, &weights, config);
        ensure_finite(partition.matrix().iter(), t, "consensus membership")?;

        let (new_centroids, degenerate) = update_centroids(&partition, dataset, &centroids, config.m);
        centroids = new_centroids;
        for view in centroids.views() {
            ensure_finite(view.iter(), t, "centroid")?;
        }
        degenerate_clusters.extend(degenerate.into_iter().map(|(view, cluster)| DegenerateEvent {
            iteration: t,
            view,
            cluster,
        }));

        costs = per_view_costs(&partition, &centroids, dataset, config.m, config.measure);
        ensure_finite(costs.iter(), t, "per-view cost")?;

        weights = update_view_weights(&costs, config.gamma)?;
        ensure_finite(weights.alpha().iter(), t, "view weight")?;

        let objective = weighted_cost_sum(&costs, &weights);
        if !objective.is_finite() {
            return Err(Error::NonFinite {
                iteration: t,
                quantity: "objective",
            });
        }
        trace.push(objective);
        iterations = t + 1;

        let delta = previous_u.as_ref().map(|prev| partition.frobenius_delta(prev));
        observe(&IterationSnapshot {
            iteration: t,
            partition: &partition,
            centroids: &centroids,
            weights: &weights,
            per_view_cost: &costs,
            objective,
            delta,
        });

        let done = delta.is_some_and(|d| d < config.epsilon);
        previous_u = Some(partition);
        if done {
            converged = true;
            break;
        }
    }

    let partition = previous_u.expect("max_iter >= 1 guarantees one sweep");
    let labels = harden(&partition);
    Ok(ClusteringResult {
        labels,
        partition,
        centroids,
        weights,
        per_view_cost: costs,
        objective_trace: trace,
        iterations,
        converged,
        degenerate_clusters,
    })
}

fn ensure_finite<'a>(
    values: impl Iterator<Item = &'a f64>,
    iteration: usize,
    quantity: &'static str,
) -> Result<()> {
    for v in values {
        if !v.is_finite() {
            return Err(Error::NonFinite { iteration, quantity });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Normalization;
    use crate::init;
    use ndarray::array;

    fn dataset_1d(points: &[f64]) -> MultiViewDataset {
        let data = Array2::from_shape_vec((points.len(), 1), points.to_vec()).unwrap();
        let view = ViewMatrix::new("v", data, Normalization::None).unwrap();
        MultiViewDataset::new("toy", vec![view], None, DistanceMeasure::SquaredEuclidean).unwrap()
    }

    fn partition(u: Array2<f64>) -> FuzzyPartition {
        FuzzyPartition::new(u).unwrap()
    }

    #[test]
    fn view_cost_zero_for_crisp_perfect_fit() {
        let ds = dataset_1d(&[0.0, 3.0]);
        let u = partition(array![[1.0, 0.0], [0.0, 1.0]]);
        let centroids = array![[0.0], [3.0]];
        let q = view_cost(&u, &centroids, ds.view(0), 2.0, DistanceMeasure::SquaredEuclidean);
        assert_eq!(q, 0.0);
    }

    #[test]
    fn view_cost_single_term() {
        let ds = dataset_1d(&[0.0]);
        let u = partition(array![[1.0]]);
        let centroids = array![[2.0]];
        let q = view_cost(&u, &centroids, ds.view(0), 2.0, DistanceMeasure::SquaredEuclidean);
        assert_eq!(q, 4.0);
    }

    #[test]
    fn view_cost_hand_example() {
        // Points {0, 3} against centroids {1, 2} give the squared-distance
        // matrix [[1, 4], [4, 1]].
        let ds = dataset_1d(&[0.0, 3.0]);
        let u = partition(array![[0.8, 0.2], [0.2, 0.8]]);
        let centroids = array![[1.0], [2.0]];
        let q = view_cost(&u, &centroids, ds.view(0), 2.0, DistanceMeasure::SquaredEuclidean);
        assert!((q - 1.6).abs() < 1e-15);
    }

    #[test]
    fn objective_single_view_equals_cost() {
        let ds = dataset_1d(&[0.0, 3.0]);
        let u = partition(array![[0.8, 0.2], [0.2, 0.8]]);
        let centroids = CentroidSet::new(vec![array![[1.0], [2.0]]]);
        let weights = ViewWeights::new(vec![1.0], 0.7).unwrap();
        let config = SolverConfig {
            m: 2.0,
            ..SolverConfig::new(2, DistanceMeasure::SquaredEuclidean)
        };
        let obj = objective(&u, &centroids, &weights, &ds, &config);
        let q = view_cost(&u, centroids.view(0), ds.view(0), 2.0, config.measure);
        assert_eq!(obj, q);
    }

    #[test]
    fn objective_gamma_zero_is_plain_sum() {
        let weights = ViewWeights::new(vec![0.9, 0.1], 0.0).unwrap();
        let costs = [2.0, 4.0];
        assert_eq!(weighted_cost_sum(&costs, &weights), 6.0);
    }

    #[test]
    fn objective_weighted_hand_example() {
        let weights = ViewWeights::new(vec![0.25, 0.75], 0.5).unwrap();
        let costs = [2.0, 4.0];
        let expect = 0.5 * 2.0 + 0.75f64.sqrt() * 4.0;
        assert_eq!(weighted_cost_sum(&costs, &weights), expect);
        assert!((expect - 4.4641).abs() < 1e-4);
    }

    #[test]
    fn membership_equal_distances_gives_uniform() {
        let ds = dataset_1d(&[0.0]);
        let centroids = CentroidSet::new(vec![array![[1.0], [-1.0]]]);
        let weights = ViewWeights::uniform(1, 0.5).unwrap();
        let config = SolverConfig::new(2, DistanceMeasure::SquaredEuclidean);
        let u = update_membership(&ds, &centroids, &weights, &config);
        assert_eq!(u.matrix()[[0, 0]], 0.5);
        assert_eq!(u.matrix()[[1, 0]], 0.5);
    }

    #[test]
    fn membership_zero_distance_takes_all_mass() {
        let ds = dataset_1d(&[1.0]);
        let centroids = CentroidSet::new(vec![array![[1.0], [5.0]]]);
        let weights = ViewWeights::uniform(1, 0.5).unwrap();
        let config = SolverConfig::new(2, DistanceMeasure::SquaredEuclidean);
        let u = update_membership(&ds, &centroids, &weights, &config);
        assert_eq!(u.matrix()[[0, 0]], 1.0);
        assert_eq!(u.matrix()[[1, 0]], 0.0);
    }

    #[test]
    fn membership_hand_example_m2() {
        // Single object with aggregated distances [1, 4] and m = 2.
        let ds = dataset_1d(&[0.0]);
        let centroids = CentroidSet::new(vec![array![[1.0], [2.0]]]);
        let weights = ViewWeights::uniform(1, 0.5).unwrap();
        let config = SolverConfig {
            m: 2.0,
            ..SolverConfig::new(2, DistanceMeasure::SquaredEuclidean)
        };
        let u = update_membership(&ds, &centroids, &weights, &config);
        assert_eq!(u.matrix()[[0, 0]], 0.8);
        assert_eq!(u.matrix()[[1, 0]], 0.2);
    }

    #[test]
    fn centroid_crisp_membership_recovers_row() {
        let ds = dataset_1d(&[2.5, -1.0]);
        let u = partition(array![[1.0, 0.0], [0.0, 1.0]]);
        let prev = CentroidSet::new(vec![array![[0.0], [0.0]]]);
        let (cents, flags) = update_centroids(&u, &ds, &prev, 2.0);
        assert!(flags.is_empty());
        assert_eq!(cents.view(0), &array![[2.5], [-1.0]]);
    }

    #[test]
    fn centroid_uniform_membership_gives_mean() {
        let ds = dataset_1d(&[0.0, 1.0, 5.0]);
        let u = partition(Array2::from_elem((2, 3), 0.5));
        let prev = CentroidSet::new(vec![array![[0.0], [0.0]]]);
        let (cents, _) = update_centroids(&u, &ds, &prev, 1.7);
        let mean = 2.0;
        assert!((cents.view(0)[[0, 0]] - mean).abs() < 1e-12);
        assert!((cents.view(0)[[1, 0]] - mean).abs() < 1e-12);
    }

    #[test]
    fn centroid_hand_example() {
        let ds = dataset_1d(&[0.0, 3.0]);
        let u = partition(array![
            [2.0 / 3.0, 1.0 / 3.0],
            [1.0 / 3.0, 2.0 / 3.0]
        ]);
        let prev = CentroidSet::new(vec![array![[0.0], [0.0]]]);
        let (cents, _) = update_centroids(&u, &ds, &prev, 2.0);
        assert!((cents.view(0)[[0, 0]] - 0.6).abs() < 1e-15);
    }

    #[test]
    fn centroid_degenerate_cluster_keeps_previous() {
        let ds = dataset_1d(&[0.0, 3.0]);
        let u = partition(array![[1.0, 1.0], [0.0, 0.0]]);
        let prev = CentroidSet::new(vec![array![[9.0], [7.0]]]);
        let (cents, flags) = update_centroids(&u, &ds, &prev, 2.0);
        assert_eq!(flags, vec![(0, 1)]);
        assert_eq!(cents.view(0)[[1, 0]], 7.0);
    }

    #[test]
    fn weights_equal_costs_are_uniform() {
        let w = update_view_weights(&[3.0, 3.0, 3.0], 0.4).unwrap();
        for &a in w.alpha() {
            assert!((a - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn weights_hand_example() {
        let w = update_view_weights(&[1.0, 4.0], 0.5).unwrap();
        assert!((w.alpha()[0] - 1.0 / 17.0).abs() < 1e-15);
        assert!((w.alpha()[1] - 16.0 / 17.0).abs() < 1e-15);
    }

    #[test]
    fn weights_gamma_near_one_concentrate_on_max_cost() {
        let w = update_view_weights(&[1.0, 2.0], 0.99).unwrap();
        assert!(w.alpha()[1] > 0.99);
        assert!(w.alpha()[0] < 0.01);
    }

    #[test]
    fn weights_gamma_zero_is_cost_share() {
        let w = update_view_weights(&[1.0, 3.0], 0.0).unwrap();
        assert!((w.alpha()[0] - 0.25).abs() < 1e-15);
        assert!((w.alpha()[1] - 0.75).abs() < 1e-15);
    }

    #[test]
    fn weights_zero_cost_is_clamped() {
        let w = update_view_weights(&[0.0, 1.0], 0.5).unwrap();
        assert!(w.alpha().iter().all(|a| a.is_finite()));
        assert!(w.alpha()[1] > w.alpha()[0]);
    }

    #[test]
    fn weights_survive_extreme_cost_ratios() {
        // Ratio powers overflow/underflow gracefully to 0 and 1.
        let w = update_view_weights(&[1e-12, 1e6], 0.99).unwrap();
        assert_eq!(w.alpha()[0], 0.0);
        assert_eq!(w.alpha()[1], 1.0);
    }

    #[test]
    fn weights_reject_gamma_outside_unit_interval() {
        assert!(update_view_weights(&[1.0, 2.0], 1.0).is_err());
        assert!(update_view_weights(&[1.0, 2.0], -0.1).is_err());
        assert!(update_view_weights(&[], 0.5).is_err());
    }

    #[test]
    fn harden_examples() {
        let u = partition(array![
            [0.7, 0.5, 0.1],
            [0.3, 0.5, 0.2],
            [0.0, 0.0, 0.7]
        ]);
        assert_eq!(harden(&u), vec![0, 0, 2]);
    }

    #[test]
    fn fit_rejects_k_above_n() {
        let ds = dataset_1d(&[0.0, 1.0]);
        let config = SolverConfig::new(3, DistanceMeasure::SquaredEuclidean);
        // Build a syntactically valid initial state by hand.
        let initial = crate::init::InitialState {
            centroids: CentroidSet::new(vec![array![[0.0], [1.0], [2.0]]]),
            weights: ViewWeights::uniform(1, 0.5).unwrap(),
        };
        assert!(matches!(
            fit(&ds, &config, initial),
            Err(Error::KExceedsN { k: 3, n: 2 })
        ));
    }

    #[test]
    fn fit_reports_non_finite_membership() {
        // Distances overflow to infinity, which poisons the first sweep.
        let ds = dataset_1d(&[-1e200, 1e200]);
        let config = SolverConfig {
            m: 2.0,
            ..SolverConfig::new(2, DistanceMeasure::SquaredEuclidean)
        };
        let initial = init::initial_state(&ds, &config).unwrap();
        match fit(&ds, &config, initial) {
            Err(Error::NonFinite { iteration, quantity }) => {
                assert_eq!(iteration, 0);
                assert!(!quantity.is_empty());
            }
            other => panic!("expected non-finite error, got {other:?}"),
        }
    }

    #[test]
    fn fit_on_identical_views_keeps_uniform_weights() {
        let data = array![[0.0], [0.2], [5.0], [5.3]];
        let v1 = ViewMatrix::new("a", data.clone(), Normalization::None).unwrap();
        let v2 = ViewMatrix::new("b", data, Normalization::None).unwrap();
        let ds = MultiViewDataset::new("twin", vec![v1, v2], None, DistanceMeasure::SquaredEuclidean)
            .unwrap();
        let config = SolverConfig {
            m: 2.0,
            gamma: 0.3,
            ..SolverConfig::new(2, DistanceMeasure::SquaredEuclidean)
        };
        let initial = init::initial_state(&ds, &config).unwrap();
        let mut saw_iteration = false;
        let result = fit_with_observer(&ds, &config, initial, |snap| {
            saw_iteration = true;
            assert_eq!(snap.weights.alpha(), &[0.5, 0.5]);
        })
        .unwrap();
        assert!(saw_iteration);
        assert_eq!(result.weights.alpha(), &[0.5, 0.5]);
    }

    #[test]
    fn fit_trace_length_matches_iterations() {
        let ds = dataset_1d(&[0.0, 0.1, 4.0, 4.1]);
        let config = SolverConfig {
            m: 2.0,
            ..SolverConfig::new(2, DistanceMeasure::SquaredEuclidean)
        };
        let initial = init::initial_state(&ds, &config).unwrap();
        let result = fit(&ds, &config, initial).unwrap();
        assert_eq!(result.objective_trace.len(), result.iterations);
        assert!(result.converged);
        assert_eq!(result.labels.len(), 4);
        assert_eq!(result.labels[0], result.labels[1]);
        assert_eq!(result.labels[2], result.labels[3]);
        assert_ne!(result.labels[0], result.labels[2]);
    }

    #[test]
    fn fit_is_deterministic() {
        let data = array![[0.0, 1.0], [0.5, 0.2], [4.0, 4.2], [3.8, 4.4], [10.0, -2.0]];
        let view = ViewMatrix::new("v", data, Normalization::None).unwrap();
        let ds = MultiViewDataset::new("det", vec![view], None, DistanceMeasure::SquaredEuclidean)
            .unwrap();
        let config = SolverConfig::new(2, DistanceMeasure::SquaredEuclidean);
        let a = fit(&ds, &config, init::initial_state(&ds, &config).unwrap()).unwrap();
        let b = fit(&ds, &config, init::initial_state(&ds, &config).unwrap()).unwrap();
        assert_eq!(a.partition.matrix(), b.partition.matrix());
        assert_eq!(a.weights.alpha(), b.weights.alpha());
        assert_eq!(a.labels, b.labels);
        assert_eq!(a.objective_trace, b.objective_trace);
    }

    #[test]
    fn fit_single_object_single_cluster() {
        let ds = dataset_1d(&[3.5]);
        let config = SolverConfig::new(1, DistanceMeasure::SquaredEuclidean);
        let initial = init::initial_state(&ds, &config).unwrap();
        let result = fit(&ds, &config, initial).unwrap();
        assert_eq!(result.labels, vec![0]);
        assert_eq!(result.partition.matrix()[[0, 0]], 1.0);
        assert_eq!(result.centroids.view(0)[[0, 0]], 3.5);
        assert!(result.converged);
    }

    #[test]
    fn fit_with_k_equal_n_hits_zero_distance_singularities() {
        // Every point starts as its own centroid, so the zero-distance rule
        // fires on the first sweep and the crisp assignment is a fixed point.
        let ds = dataset_1d(&[0.0, 2.0, 7.0]);
        let config = SolverConfig {
            m: 2.0,
            ..SolverConfig::new(3, DistanceMeasure::SquaredEuclidean)
        };
        let initial = init::initial_state(&ds, &config).unwrap();
        let result = fit(&ds, &config, initial).unwrap();
        assert!(result.converged);
        let mut sorted = result.labels.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![0, 1, 2]);
        for col in result.partition.matrix().columns() {
            assert_eq!(col.iter().filter(|&&v| v == 1.0).count(), 1);
        }
    }

    #[test]
    fn fit_handles_duplicate_rows() {
        let ds = dataset_1d(&[1.0, 1.0, 1.0, 6.0, 6.0]);
        let config = SolverConfig {
            m: 2.0,
            ..SolverConfig::new(2, DistanceMeasure::SquaredEuclidean)
        };
        let initial = init::initial_state(&ds, &config).unwrap();
        let result = fit(&ds, &config, initial).unwrap();
        assert_eq!(result.labels[0], result.labels[1]);
        assert_eq!(result.labels[3], result.labels[4]);
        assert_ne!(result.labels[0], result.labels[3]);
    }

    #[test]
    fn fit_with_gamma_zero_sums_costs_plainly() {
        let data = array![[0.0], [0.3], [5.0], [5.2]];
        let v1 = ViewMatrix::new("a", data.clone(), Normalization::None).unwrap();
        let v2 = ViewMatrix::new("b", data.mapv(|x| x * 2.0), Normalization::None).unwrap();
        let ds = MultiViewDataset::new("g0", vec![v1, v2], None, DistanceMeasure::SquaredEuclidean)
            .unwrap();
        let config = SolverConfig {
            gamma: 0.0,
            m: 2.0,
            ..SolverConfig::new(2, DistanceMeasure::SquaredEuclidean)
        };
        let initial = init::initial_state(&ds, &config).unwrap();
        let result = fit(&ds, &config, initial).unwrap();
        // With gamma 0, effective weights are 1 and the objective is the
        // plain cost sum; alpha itself is the cost share.
        let expect: f64 = result.per_view_cost.iter().sum();
        let last = *result.objective_trace.last().unwrap();
        assert!((last - expect).abs() <= 1e-12 * expect.max(1.0));
        assert_eq!(result.weights.effective(), vec![1.0, 1.0]);
    }

    #[test]
    fn update_centroids_ignores_weights_by_construction() {
        // The stationarity condition divides out the view weight, so the
        // update takes no alpha at all; calling it twice on the same
        // partition must be bitwise identical.
        let ds = dataset_1d(&[0.0, 1.0, 2.0]);
        let u = partition(array![[0.6, 0.3, 0.1], [0.4, 0.7, 0.9]]);
        let prev = CentroidSet::new(vec![array![[0.0], [0.0]]]);
        let (a, _) = update_centroids(&u, &ds, &prev, 1.8);
        let (b, _) = update_centroids(&u, &ds, &prev, 1.8);
        assert_eq!(a.view(0), b.view(0));
    }
}
