//! End-to-end library flow: generate, persist, reload through the manifest,
//! normalize, cluster, evaluate.

use minimax_fcm::solver::SolverConfig;
use minimax_fcm::synth::{self, SynthSpec};
use minimax_fcm::{init, load_manifest, metrics, solver, write_dataset, DistanceMeasure, ViewKind};

#[test]
fn persisted_dataset_round_trips_through_the_manifest() {
    let spec = SynthSpec::new(2, 40, 3, 8.0, 21).with_views(vec![
        ViewKind::Informative,
        ViewKind::Informative,
        ViewKind::Noise,
    ]);
    let generated = synth::generate(&spec).unwrap();

    let dir = tempfile::tempdir().unwrap();
    let manifest = write_dataset(&generated, dir.path()).unwrap();
    let loaded = load_manifest(&manifest).unwrap();

    assert_eq!(loaded.n_views(), 3);
    assert_eq!(loaded.n_objects(), 80);
    assert_eq!(loaded.labels(), generated.labels());
    for (a, b) in loaded.views().iter().zip(generated.views().iter()) {
        assert_eq!(a.data(), b.data());
        assert_eq!(a.normalization(), b.normalization());
    }

    let loaded = loaded.normalize().unwrap();
    let config = SolverConfig {
        m: 1.5,
        ..SolverConfig::new(2, DistanceMeasure::SquaredEuclidean)
    };
    let initial = init::initial_state(&loaded, &config).unwrap();
    let result = solver::fit(&loaded, &config, initial).unwrap();
    let report = metrics::evaluate(&result.labels, loaded.labels().unwrap()).unwrap();
    assert!(report.accuracy >= 0.95, "accuracy {}", report.accuracy);
    assert!(report.nmi > 0.5);
    assert!(report.f_measure >= 0.95);
}

#[test]
fn fit_result_reports_weights_on_both_scales() {
    let spec = SynthSpec::new(2, 30, 2, 6.0, 3).with_views(vec![
        ViewKind::Informative,
        ViewKind::Noise,
    ]);
    let ds = synth::generate(&spec).unwrap().normalize().unwrap();
    let config = SolverConfig::new(2, DistanceMeasure::SquaredEuclidean);
    let initial = init::initial_state(&ds, &config).unwrap();
    let result = solver::fit(&ds, &config, initial).unwrap();

    let alpha_sum: f64 = result.weights.alpha().iter().sum();
    assert!((alpha_sum - 1.0).abs() < 1e-12);
    let effective = result.weights.effective();
    for (a, e) in result.weights.alpha().iter().zip(effective.iter()) {
        assert!((a.powf(config.gamma) - e).abs() < 1e-15);
    }
    assert_eq!(result.per_view_cost.len(), 2);

    // The costlier view carries the larger weight.
    let (max_cost_view, _) = result
        .per_view_cost
        .iter()
        .enumerate()
        .fold((0, f64::MIN), |acc, (i, &q)| if q > acc.1 { (i, q) } else { acc });
    let (max_alpha_view, _) = result
        .weights
        .alpha()
        .iter()
        .enumerate()
        .fold((0, f64::MIN), |acc, (i, &a)| if a > acc.1 { (i, a) } else { acc });
    assert_eq!(max_cost_view, max_alpha_view);
}
