//! Object-to-centroid dissimilarity measures.
//!
//! Two measures are supported: squared Euclidean distance, and cosine distance
//! (one minus cosine similarity). Cosine is intended for nonnegative
//! bag-of-words style data and substitutes directly for the squared Euclidean
//! term everywhere the solvers use a distance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dissimilarity measure used by the solvers and by centroid initialization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DistanceMeasure {
    /// `sum_d (x_d - v_d)^2`
    #[serde(rename = "euclidean")]
    SquaredEuclidean,
    /// `1 - x.v / (|x| |v|)`; defined as 1 when either vector is all-zero.
    #[serde(rename = "cosine")]
    Cosine,
}

impl std::fmt::Display for DistanceMeasure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DistanceMeasure::SquaredEuclidean => f.write_str("euclidean"),
            DistanceMeasure::Cosine => f.write_str("cosine"),
        }
    }
}

/// Squared dissimilarity between two equal-length vectors.
///
/// For `SquaredEuclidean` this is the squared L2 distance; for `Cosine` it is
/// the cosine distance itself (the quantity that replaces the squared term in
/// the solver formulas).
pub fn squared_distance(measure: DistanceMeasure, x: &[f64], v: &[f64]) -> Result<f64> {
    if x.len() != v.len() {
        return Err(Error::DimensionMismatch {
            left: x.len(),
            right: v.len(),
        });
    }
    Ok(distance_raw(measure, x, v))
}

#[inline]
pub(crate) fn distance_raw(measure: DistanceMeasure, x: &[f64], v: &[f64]) -> f64 {
    match measure {
        DistanceMeasure::SquaredEuclidean => squared_euclidean(x, v),
        DistanceMeasure::Cosine => cosine_from_parts(dot(x, v), l2_norm(x), l2_norm(v)),
    }
}

#[inline]
pub(crate) fn squared_euclidean(x: &[f64], v: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (a, b) in x.iter().zip(v.iter()) {
        let d = a - b;
        acc += d * d;
    }
    acc
}

#[inline]
pub(crate) fn dot(x: &[f64], v: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (a, b) in x.iter().zip(v.iter()) {
        acc += a * b;
    }
    acc
}

#[inline]
pub(crate) fn l2_norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

/// Cosine distance given a precomputed dot product and the two norms. Solver
/// loops cache the norms; the formula here must stay the single source of the
/// arithmetic so cached and uncached paths agree bitwise.
#[inline]
pub(crate) fn cosine_from_parts(dot: f64, norm_x: f64, norm_v: f64) -> f64 {
    if norm_x == 0.0 || norm_v == 0.0 {
        return 1.0;
    }
    (1.0 - dot / (norm_x * norm_v)).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn euclidean_three_four_five() {
        let d = squared_distance(DistanceMeasure::SquaredEuclidean, &[0.0, 0.0], &[3.0, 4.0])
            .unwrap();
        assert_eq!(d, 25.0);
    }

    #[test]
    fn cosine_identical_direction_is_zero() {
        let d = squared_distance(DistanceMeasure::Cosine, &[1.0, 0.0], &[1.0, 0.0]).unwrap();
        assert_eq!(d, 0.0);
    }

    #[test]
    fn cosine_orthogonal_is_one() {
        let d = squared_distance(DistanceMeasure::Cosine, &[1.0, 0.0], &[0.0, 1.0]).unwrap();
        assert_eq!(d, 1.0);
    }

    #[test]
    fn cosine_zero_vector_is_one() {
        let d = squared_distance(DistanceMeasure::Cosine, &[0.0, 0.0], &[2.0, 1.0]).unwrap();
        assert_eq!(d, 1.0);
        let d = squared_distance(DistanceMeasure::Cosine, &[0.0, 0.0], &[0.0, 0.0]).unwrap();
        assert_eq!(d, 1.0);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let err = squared_distance(DistanceMeasure::SquaredEuclidean, &[1.0], &[1.0, 2.0])
            .unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { left: 1, right: 2 }));
    }

    fn vec_strategy(len: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-100.0f64..100.0, len)
    }

    fn nonneg_strategy(len: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.0f64..100.0, len)
    }

    proptest! {
        #[test]
        fn symmetry_exact(x in vec_strategy(6), v in vec_strategy(6)) {
            for m in [DistanceMeasure::SquaredEuclidean, DistanceMeasure::Cosine] {
                let a = squared_distance(m, &x, &v).unwrap();
                let b = squared_distance(m, &v, &x).unwrap();
                prop_assert_eq!(a, b);
            }
        }

        #[test]
        fn nonnegative(x in vec_strategy(5), v in vec_strategy(5)) {
            let e = squared_distance(DistanceMeasure::SquaredEuclidean, &x, &v).unwrap();
            prop_assert!(e >= 0.0);
        }

        #[test]
        fn cosine_in_unit_range_on_nonneg_data(x in nonneg_strategy(5), v in nonneg_strategy(5)) {
            let c = squared_distance(DistanceMeasure::Cosine, &x, &v).unwrap();
            prop_assert!((0.0..=1.0).contains(&c));
        }

        #[test]
        fn cosine_self_distance_near_zero(x in vec_strategy(5)) {
            prop_assume!(x.iter().any(|&e| e != 0.0));
            let c = squared_distance(DistanceMeasure::Cosine, &x, &x).unwrap();
            prop_assert!(c <= 1e-12);
        }

        #[test]
        fn cosine_scale_invariant(x in vec_strategy(5), v in vec_strategy(5), s in 0.01f64..100.0) {
            prop_assume!(x.iter().any(|&e| e != 0.0) && v.iter().any(|&e| e != 0.0));
            let a = squared_distance(DistanceMeasure::Cosine, &x, &v).unwrap();
            let xs: Vec<f64> = x.iter().map(|e| e * s).collect();
            let b = squared_distance(DistanceMeasure::Cosine, &xs, &v).unwrap();
            prop_assert!((a - b).abs() <= 1e-12);
        }

        #[test]
        fn euclidean_scales_quadratically(x in vec_strategy(5), v in vec_strategy(5), s in 0.1f64..10.0) {
            let a = squared_distance(DistanceMeasure::SquaredEuclidean, &x, &v).unwrap();
            let xs: Vec<f64> = x.iter().map(|e| e * s).collect();
            let vs: Vec<f64> = v.iter().map(|e| e * s).collect();
            let b = squared_distance(DistanceMeasure::SquaredEuclidean, &xs, &vs).unwrap();
            prop_assert!((b - s * s * a).abs() <= 1e-9 * (1.0 + a.abs() * s * s));
        }
    }
}
