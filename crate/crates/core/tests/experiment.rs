use nsdecay_core::decay::{
    default_tolerance, predicted_exponent, run_experiment, ExperimentConfig, FitConfig, GridConfig, InitialDataSpec,
    NormsConfig, PhaseModel,
};
use nsdecay_core::solver::TrackedNorm;
use nsdecay_core::SolverConfig;

#[test]
fn predicted_exponents() {
    let cases = [
        // (sigma, theta, p, linear, expected)
        (1.0, 0.0, 2.0, false, 0.5),
        (1.0, 1.0, 2.0, false, 1.0),
        (1.0, 0.0, 4.0, false, 0.75),
        (2.0, 0.0, 2.0, false, 1.0),
        (0.5, 0.0, 2.0, true, 0.25),
        (2.0, 0.0, 2.0, true, 1.0),
        (1.0, 0.0, 4.0, true, 0.75),
    ];
    for (s, th, p, lin, want) in cases {
        assert!((predicted_exponent(s, th, p, lin) - want).abs() < 1e-15, "{s} {th} {p} {lin}");
    }
    // Small sigma, large p: the cap at sigma binds.
    assert!((predicted_exponent(0.2, 0.0, 8.0, false) - 0.2).abs() < 1e-15);
    assert_eq!(default_tolerance(1.0, 0.0, 2.0, true, true), 0.05);
    assert_eq!(default_tolerance(1.0, 1.0, 2.0, false, false), 0.15);
    assert_eq!(default_tolerance(1.0, 0.0, 2.0, false, false), 0.1);
}

fn small(linear: bool, rho: f64) -> ExperimentConfig {
    ExperimentConfig {
        grid: GridConfig { n: 128, l_over_2pi: 16.0 },
        data: InitialDataSpec {
            sigma: 1.0,
            amplitude: 0.1,
            rho_amplitude: rho,
            seed: 3,
            phases: PhaseModel::Localized,
            p_report: vec![TrackedNorm { theta: 1.0, p: 2.0 }],
        },
        solver: SolverConfig::new(0.25, 25.0).linear(linear),
        norms: NormsConfig::default(),
        fit: FitConfig { t_min: 1.0, t_max: None, tolerance: Some(0.1) },
    }
}

#[test]
fn small_box_heat_run_fits_predicted_exponents() {
    let rep = run_experiment(&small(true, 0.0)).unwrap();
    assert!((rep.torus_horizon - 25.6).abs() < 1e-9);
    for f in &rep.fits {
        let fit = f.fit.expect("fit");
        assert!(fit.samples >= 8);
        assert!(f.pass, "{} fitted {} predicted {}", f.norm, fit.exponent, f.predicted);
    }
    assert!(rep.energy.monotone);
    assert_eq!(rep.pressure.max_iterations, 0);
}

#[test]
fn small_box_inhomogeneous_run_is_consistent() {
    let rep = run_experiment(&small(false, 0.05)).unwrap();
    assert!(rep.energy.monotone);
    assert!(rep.density.relative_drift <= 1e-3, "{:?}", rep.density);
    assert!(rep.pressure.max_iterations >= 2);
    assert!(rep.pressure.max_contraction <= 0.05 + rep.smallness.a_sup);
    assert!(rep.smallness.indicator < 1.0);
    let json = serde_json::to_string(&rep).unwrap();
    let back: nsdecay_core::decay::DecayReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back.config, rep.config);
}

#[test]
fn window_beyond_horizon_is_refused() {
    let mut cfg = small(true, 0.0);
    cfg.fit.t_max = Some(25.0);
    cfg.grid = GridConfig { n: 64, l_over_2pi: 8.0 };
    let rep = run_experiment(&cfg).unwrap();
    let err = rep.fits[0].error.as_deref().expect("refused");
    assert!(err.contains("6.4"), "{err}");
    assert!(!rep.pass);
}

#[test]
fn unknown_keys_are_rejected() {
    let cfg = small(true, 0.0);
    let mut v = serde_json::to_value(&cfg).unwrap();
    v["solver"]["dtt"] = serde_json::json!(0.1);
    assert!(serde_json::from_value::<ExperimentConfig>(v).is_err());
}
