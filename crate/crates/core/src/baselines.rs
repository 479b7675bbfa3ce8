//! Classical single-view fuzzy c-means and the concatenated-view baseline.
//!
//! `fcm_fit` is written as its own alternation loop rather than a wrapper
//! around the multi-view solver, so the two can cross-check each other: on a
//! single-view dataset the multi-view updates reduce exactly to these.

use ndarray::Array2;

use crate::dataset::{concatenate_views, MultiViewDataset, ViewMatrix};
use crate::distance::{self, DistanceMeasure};
use crate::error::{Error, Result};
use crate::par;
use crate::solver::{harden, FuzzyPartition, SolverConfig};

/// Output of a classical FCM run on one matrix.
#[derive(Debug, Clone)]
pub struct FcmResult {
    pub labels: Vec<usize>,
    pub partition: FuzzyPartition,
    pub centroids: Array2<f64>,
    /// Objective after each sweep; non-increasing for classical FCM.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Classical fuzzy c-means on one view: alternate the membership and centroid
/// updates until the Frobenius norm of successive membership matrices drops
/// below epsilon or the iteration cap is reached. `config.gamma` is unused.
pub fn fcm_fit(
    view: &ViewMatrix,
    config: &SolverConfig,
    initial_centroids: &Array2<f64>,
) -> Result<FcmResult> {
    config.validate()?;
    if !view.is_ready() {
        return Err(Error::NotNormalized {
            view: view.name().to_string(),
        });
    }
    let n = view.n_rows();
    let d = view.dim();
    let k = config.k;
    if k > n {
        return Err(Error::KExceedsN { k, n });
    }
    if initial_centroids.nrows() != k || initial_centroids.ncols() != d {
        return Err(Error::InvalidConfig(format!(
            "initial centroids have shape {:?}, expected ({k}, {d})",
            initial_centroids.dim()
        )));
    }

    let flat = view.data().as_slice().expect("row-major view data");
    let row = |i: usize| &flat[i * d..(i + 1) * d];
    let row_norms: Option<Vec<f64>> = match config.measure {
        DistanceMeasure::SquaredEuclidean => None,
        DistanceMeasure::Cosine => Some((0..n).map(|i| distance::l2_norm(row(i))).collect()),
    };
    let exponent = 1.0 / (config.m - 1.0);

    let mut centroids = initial_centroids.clone();
    let mut previous_u: Option<Array2<f64>> = None;
    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut converged = false;

    for t in 0..config.max_iter {
        // Membership update, one object at a time.
        let cent_flat: Vec<f64> = centroids.iter().copied().collect();
        let cent_norms: Vec<f64> = match config.measure {
            DistanceMeasure::SquaredEuclidean => Vec::new(),
            DistanceMeasure::Cosine => (0..k)
                .map(|c| distance::l2_norm(&cent_flat[c * d..(c + 1) * d]))
                .collect(),
        };
        let mut buf = vec![0.0f64; n * k];
        par::for_each_row_mut(&mut buf, k, |i, out| {
            let x = row(i);
            let mut dist = vec![0.0f64; k];
            for (c, slot) in dist.iter_mut().enumerate() {
                let vc = &cent_flat[c * d..(c + 1) * d];
                *slot = match config.measure {
                    DistanceMeasure::SquaredEuclidean => distance::squared_euclidean(x, vc),
                    DistanceMeasure::Cosine => distance::cosine_from_parts(
                        distance::dot(x, vc),
                        row_norms.as_ref().expect("cached norms")[i],
                        cent_norms[c],
                    ),
                };
            }
            let zeros = dist.iter().filter(|&&v| v == 0.0).count();
            if zeros > 0 {
                let share = 1.0 / zeros as f64;
                for (c, cell) in out.iter_mut().enumerate() {
                    *cell = if dist[c] == 0.0 { share } else { 0.0 };
                }
            } else {
                for (c, cell) in out.iter_mut().enumerate() {
                    let mut sum = 0.0;
                    for &dj in &dist {
                        sum += (dist[c] / dj).powf(exponent);
                    }
                    *cell = 1.0 / sum;
                }
            }
        });
        let u = Array2::from_shape_fn((k, n), |(c, i)| buf[i * k + c]);
        for &v in u.iter() {
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    iteration: t,
                    quantity: "membership",
                });
            }
        }

        // Centroid update: u^m weighted means; empty clusters keep the
        // previous centroid.
        let rows = par::map_indexed(k, |c| {
            let mut numerator = vec![0.0f64; d];
            let mut denominator = 0.0f64;
            for i in 0..n {
                let w = u[[c, i]].powf(config.m);
                denominator += w;
                for (acc, &xv) in numerator.iter_mut().zip(row(i).iter()) {
                    *acc += w * xv;
                }
            }
            if denominator == 0.0 {
                centroids.row(c).to_vec()
            } else {
                numerator.iter_mut().for_each(|v| *v /= denominator);
                numerator
            }
        });
        for (c, values) in rows.into_iter().enumerate() {
            for (j, v) in values.into_iter().enumerate() {
                centroids[[c, j]] = v;
            }
        }
        for &v in centroids.iter() {
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    iteration: t,
                    quantity: "centroid",
                });
            }
        }

        // Objective after the sweep.
        let per_cluster = par::map_indexed(k, |c| {
            let vc: Vec<f64> = centroids.row(c).to_vec();
            let vc_norm = match config.measure {
                DistanceMeasure::SquaredEuclidean => 0.0,
                DistanceMeasure::Cosine => distance::l2_norm(&vc),
            };
            let mut acc = 0.0;
            for i in 0..n {
                let d2 = match config.measure {
                    DistanceMeasure::SquaredEuclidean => distance::squared_euclidean(row(i), &vc),
                    DistanceMeasure::Cosine => distance::cosine_from_parts(
                        distance::dot(row(i), &vc),
                        row_norms.as_ref().expect("cached norms")[i],
                        vc_norm,
                    ),
                };
                acc += u[[c, i]].powf(config.m) * d2;
            }
            acc
        });
        trace.push(per_cluster.iter().sum());
        iterations = t + 1;

        let delta = previous_u.as_ref().map(|prev| {
            let mut acc = 0.0;
            for (a, b) in u.iter().zip(prev.iter()) {
                let diff = a - b;
                acc += diff * diff;
            }
            acc.sqrt()
        });
        let done = delta.is_some_and(|dl| dl < config.epsilon);
        previous_u = Some(u);
        if done {
            converged = true;
            break;
        }
    }

    let u = previous_u.expect("max_iter >= 1 guarantees one sweep");
    let partition = FuzzyPartition::new(u)?;
    let labels = harden(&partition);
    Ok(FcmResult {
        labels,
        partition,
        centroids,
        objective_trace: trace,
        iterations,
        converged,
    })
}

/// Classical FCM on the concatenation of all (normalized) views.
pub fn fcm_concatenated(
    dataset: &MultiViewDataset,
    config: &SolverConfig,
    initial_centroids: &Array2<f64>,
) -> Result<FcmResult> {
    let concatenated = concatenate_views(dataset)?;
    fcm_fit(&concatenated, config, initial_centroids)
}
