//! Deterministic centroid seeding and uniform initial view weights.
//!
//! Seeding is farthest-first: the first centroid is the object with the
//! smallest total distance to all objects, and each subsequent centroid is
//! the object maximizing its minimum distance to those already chosen. Ties
//! break toward the lowest row index, so the selection is fully deterministic.

use ndarray::Array2;

use crate::dataset::{MultiViewDataset, ViewMatrix};
use crate::distance::{self, DistanceMeasure};
use crate::error::{Error, Result};
use crate::par;
use crate::solver::{CentroidSet, SolverConfig, ViewWeights};

/// Starting point for [`crate::solver::fit`]: per-view centroids drawn from
/// the data rows, plus uniform view weights.
#[derive(Debug, Clone)]
pub struct InitialState {
    pub centroids: CentroidSet,
    pub weights: ViewWeights,
}

/// Uniform view weights `1/P`.
pub fn init_view_weights(p: usize, gamma: f64) -> Result<ViewWeights> {
    ViewWeights::uniform(p, gamma)
}

/// Row indices chosen by the farthest-first rule, in selection order.
pub fn select_initial_centroid_indices(
    data: &Array2<f64>,
    k: usize,
    measure: DistanceMeasure,
) -> Result<Vec<usize>> {
    let n = data.nrows();
    let d = data.ncols();
    if k < 1 {
        return Err(Error::InvalidConfig("K must be at least 1".into()));
    }
    if k > n {
        return Err(Error::KExceedsN { k, n });
    }
    let flat = data.as_slice().expect("row-major data");
    let row = |i: usize| &flat[i * d..(i + 1) * d];

    // Total distance from each row to all rows, via the algebraic expansion
    // so the scan stays O(N * D) instead of O(N^2 * D).
    let totals: Vec<f64> = match measure {
        DistanceMeasure::SquaredEuclidean => {
            // sum_i |x_i - x_j|^2 = S2 - 2 x_j . S1 + N |x_j|^2
            let mut coord_sum = vec![0.0f64; d];
            let mut sq_sum = 0.0f64;
            for i in 0..n {
                let r = row(i);
                for (acc, &x) in coord_sum.iter_mut().zip(r.iter()) {
                    *acc += x;
                }
                sq_sum += distance::dot(r, r);
            }
            par::map_indexed(n, |j| {
                let r = row(j);
                sq_sum - 2.0 * distance::dot(r, &coord_sum) + n as f64 * distance::dot(r, r)
            })
        }
        DistanceMeasure::Cosine => {
            // sum_i (1 - xhat_i . xhat_j) = N - xhat_j . (sum_i xhat_i),
            // with all-zero rows contributing distance 1 to everything.
            let mut unit = vec![0.0f64; n * d];
            for i in 0..n {
                let r = row(i);
                let norm = distance::l2_norm(r);
                if norm > 0.0 {
                    for (u, &x) in unit[i * d..(i + 1) * d].iter_mut().zip(r.iter()) {
                        *u = x / norm;
                    }
                }
            }
            let mut unit_sum = vec![0.0f64; d];
            for i in 0..n {
                for (acc, &x) in unit_sum.iter_mut().zip(unit[i * d..(i + 1) * d].iter()) {
                    *acc += x;
                }
            }
            par::map_indexed(n, |j| {
                n as f64 - distance::dot(&unit[j * d..(j + 1) * d], &unit_sum)
            })
        }
    };

    let mut first = 0;
    for (i, &t) in totals.iter().enumerate() {
        if t < totals[first] {
            first = i;
        }
    }

    let mut chosen = vec![false; n];
    chosen[first] = true;
    let mut order = vec![first];
    let mut min_dist: Vec<f64> =
        par::map_indexed(n, |i| distance::distance_raw(measure, row(i), row(first)));

    while order.len() < k {
        let mut best: Option<usize> = None;
        for i in 0..n {
            if chosen[i] {
                continue;
            }
            if best.is_none_or(|b| min_dist[i] > min_dist[b]) {
                best = Some(i);
            }
        }
        let next = best.expect("k <= n leaves an unchosen row");
        chosen[next] = true;
        order.push(next);
        let updated = par::map_indexed(n, |i| {
            let d2 = distance::distance_raw(measure, row(i), row(next));
            if d2 < min_dist[i] {
                d2
            } else {
                min_dist[i]
            }
        });
        min_dist = updated;
    }
    Ok(order)
}

/// K initial centroids for one view, copied bit-exactly from its rows.
pub fn select_initial_centroids(
    view: &ViewMatrix,
    k: usize,
    measure: DistanceMeasure,
) -> Result<Array2<f64>> {
    let order = select_initial_centroid_indices(view.data(), k, measure)?;
    let d = view.dim();
    Ok(Array2::from_shape_fn((k, d), |(c, j)| {
        view.data()[[order[c], j]]
    }))
}

/// Full initial state for a dataset: farthest-first centroids per view and
/// uniform weights.
pub fn initial_state(dataset: &MultiViewDataset, config: &SolverConfig) -> Result<InitialState> {
    let selections = par::map_indexed(dataset.n_views(), |p| {
        select_initial_centroids(dataset.view(p), config.k, config.measure)
    });
    let centroids = selections.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(InitialState {
        centroids: CentroidSet::new(centroids),
        weights: ViewWeights::uniform(dataset.n_views(), config.gamma)?,
    })
}
