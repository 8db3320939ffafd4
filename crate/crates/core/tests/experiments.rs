use cavityq::experiments::{
    enumerate_branches, estimate_process_fidelity, run_trials, stationarity_scan, Backend,
    ExperimentConfig, GateRunner, JointInput, NoiseConfig, Protocol, SummaryStats, SweepAxis,
    TrialResult,
};
use cavityq::protocols::GateNoise;
use cavityq::Error;

fn noise(backend: Backend, eta_local: f64, eta_transmission: f64) -> NoiseConfig {
    NoiseConfig {
        backend,
        eta_local,
        eta_transmission,
        ..Default::default()
    }
}

fn joint(backend: Backend, eta: f64, trials: usize) -> ExperimentConfig {
    ExperimentConfig {
        input: Some(JointInput {
            alpha: 0.6,
            beta: 0.8,
            gamma: 0.0,
        }),
        ..ExperimentConfig::new(Protocol::JointMeasure, noise(backend, eta, 0.0), trials, 11)
    }
}

#[test]
fn epr_ideal_always_succeeds() {
    let cfg = ExperimentConfig::new(Protocol::Epr, NoiseConfig::default(), 100, 1);
    let (s, trials) = run_trials(&cfg, Some(2)).unwrap();
    assert_eq!(s.success_probability, 1.0);
    assert_eq!(s.standard_error, 0.0);
    assert!((s.mean_fidelity.unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(s.attempts_histogram, vec![(1, 100)]);
    assert_eq!(trials.len(), 100);
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let cfg = ExperimentConfig::new(Protocol::Epr, noise(Backend::Analytic, 0.05, 0.2), 300, 42);
    let (s1, t1) = run_trials(&cfg, Some(1)).unwrap();
    let (s4, t4) = run_trials(&cfg, Some(4)).unwrap();
    assert_eq!(t1, t4);
    assert_eq!(s1, s4);
    let other = ExperimentConfig { seed: 43, ..cfg };
    assert_ne!(run_trials(&other, Some(4)).unwrap().1, t1);
}

#[test]
fn trial_records_are_well_formed() {
    let cfg = ExperimentConfig::new(
        Protocol::GatePurified,
        noise(Backend::Analytic, 0.2, 0.0),
        200,
        5,
    );
    let (_, trials) = run_trials(&cfg, None).unwrap();
    for (k, t) in trials.iter().enumerate() {
        assert_eq!(t.trial, k);
        assert!(t.attempts >= 1);
        assert!((0.0..=1.0).contains(&t.fidelity));
        assert!(!t.outcomes.is_empty());
    }
}

#[test]
fn summary_standard_error_formula() {
    let t = |trial, success| TrialResult {
        trial,
        success,
        attempts: 1,
        fidelity: 1.0,
        outcomes: vec![],
    };
    let trials: Vec<_> = (0..10).map(|k| t(k, k < 3)).collect();
    let s = SummaryStats::from_trials(&trials);
    assert_eq!(s.successes, 3);
    assert!((s.standard_error - (0.3f64 * 0.7 / 10.0).sqrt()).abs() < 1e-15);
}

fn assert_oracle_consistent(cfg: &ExperimentConfig) {
    let e = enumerate_branches(cfg).unwrap();
    assert!(
        (e.total_weight - 1.0).abs() < 1e-10,
        "{cfg:?}: total {}",
        e.total_weight
    );
    let (s, _) = run_trials(cfg, None).unwrap();
    let p = e.success_probability;
    let sigma = (p * (1.0 - p) / cfg.trials as f64).sqrt().max(1e-12);
    assert!(
        (s.success_probability - p).abs() < 4.0 * sigma,
        "{:?}: sampled {} vs enumerated {p}",
        cfg.protocol,
        s.success_probability
    );
}

#[test]
fn sampling_agrees_with_enumeration() {
    let mut epr =
        ExperimentConfig::new(Protocol::Epr, noise(Backend::Analytic, 0.05, 0.2), 4000, 2);
    epr.max_attempts = 1;
    assert_oracle_consistent(&epr);
    assert_oracle_consistent(&ExperimentConfig::new(
        Protocol::GatePurified,
        noise(Backend::Analytic, 0.05, 0.0),
        4000,
        3,
    ));
    assert_oracle_consistent(&joint(Backend::Analytic, 0.2, 4000));
    assert_oracle_consistent(&joint(Backend::Bath, 0.05, 2000));
}

#[test]
fn enumeration_of_ideal_joint_measure_is_a_single_branch() {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let cfg = ExperimentConfig {
        input: Some(JointInput {
            alpha: h,
            beta: h,
            gamma: 0.0,
        }),
        ..ExperimentConfig::new(Protocol::JointMeasure, NoiseConfig::default(), 1, 0)
    };
    let e = enumerate_branches(&cfg).unwrap();
    assert_eq!(e.branches.len(), 1);
    assert!((e.branches[0].weight - 1.0).abs() < 1e-12);
}

#[test]
fn epr_enumeration_matches_hand_computation() {
    let mut cfg = ExperimentConfig::new(Protocol::Epr, noise(Backend::Analytic, 0.05, 0.2), 1, 0);
    cfg.max_attempts = 1;
    let e = enumerate_branches(&cfg).unwrap();
    assert!((e.success_probability - 0.8 * 0.95).abs() < 1e-12);
    assert!(e.min_success_fidelity.unwrap() > 1.0 - 1e-9);
    cfg.max_attempts = 3;
    let e = enumerate_branches(&cfg).unwrap();
    let q: f64 = 1.0 - 0.76;
    assert!((e.success_probability - (1.0 - q.powi(3))).abs() < 1e-12);
}

#[test]
fn gate_enumeration_weights() {
    let cfg = ExperimentConfig::new(
        Protocol::GatePurified,
        noise(Backend::Analytic, 0.05, 0.0),
        1,
        0,
    );
    let e = enumerate_branches(&cfg).unwrap();
    assert!((e.total_weight - 1.0).abs() < 1e-10);
    assert!((e.success_probability - 0.95f64.powi(5)).abs() < 1e-10);
    assert!(e.min_success_fidelity.unwrap() > 1.0 - 1e-9);
}

#[test]
fn process_fidelity_estimates() {
    let ideal = estimate_process_fidelity(GateRunner::Raw, &GateNoise::Ideal).unwrap();
    assert!((ideal.0 - 1.0).abs() < 1e-12);
    let noisy = GateNoise::Analytic {
        eta: 0.05,
        detuning_phase: 0.0,
    };
    assert!(
        estimate_process_fidelity(GateRunner::Purified, &noisy)
            .unwrap()
            .0
            > 1.0 - 1e-9
    );
    assert!(
        estimate_process_fidelity(GateRunner::Raw, &noisy)
            .unwrap()
            .0
            < 1.0 - 1e-4
    );
}

#[test]
fn thermal_gate_is_not_purified() {
    let mut n = noise(Backend::Bath, 0.05, 0.0);
    n.p_therm = 0.1;
    let (f, _) = estimate_process_fidelity(GateRunner::Purified, &n.gate_noise().unwrap()).unwrap();
    assert!(f < 1.0, "{f}");
}

#[test]
fn stationarity_scan_is_nondecreasing() {
    let cfg = ExperimentConfig::new(
        Protocol::StationarityScan,
        noise(Backend::Bath, 0.05, 0.0),
        2,
        0,
    );
    let points = stationarity_scan(&cfg).unwrap();
    assert_eq!(points.len(), 4);
    assert!(points[0].deviation < 1e-12);
    for w in points.windows(2) {
        assert!(w[1].deviation >= w[0].deviation);
    }
    let (s, _) = run_trials(&cfg, None).unwrap();
    assert_eq!(s.stationarity.unwrap(), points);
}

#[test]
fn config_round_trip_and_errors() {
    let cfg = ExperimentConfig {
        sweep: Some(SweepAxis {
            parameter: "eta_transmission".into(),
            values: vec![0.0, 0.1],
        }),
        ..ExperimentConfig::new(Protocol::Epr, noise(Backend::Analytic, 0.05, 0.2), 10, 7)
    };
    assert_eq!(ExperimentConfig::from_json(&cfg.to_json()).unwrap(), cfg);

    let bad = [
        r#"{"protocol":"epr","trials":10,"seed":1,"colour":"red"}"#,
        r#"{"protocol":"teleport","trials":10,"seed":1}"#,
        r#"{"protocol":"epr","trials":0,"seed":1}"#,
        r#"{"protocol":"epr","trials":1,"seed":1,"noise":{"backend":"analytic","eta_local":1.5}}"#,
        r#"{"protocol":"epr","trials":1,"seed":1,"noise":{"backend":"analytic","p_therm":0.1}}"#,
        r#"{"protocol":"epr","trials":1,"seed":1,"noise":{"eta_local":0.1}}"#,
        r#"{"protocol":"epr","trials":1,"seed":1,"sweep":{"parameter":"p_therm","values":[]}}"#,
        r#"{"protocol":"epr","trials":1,"seed":1,"sweep":{"parameter":"g","values":[1]}}"#,
    ];
    for text in bad {
        assert!(
            matches!(ExperimentConfig::from_json(text), Err(Error::Config(_))),
            "{text}"
        );
    }
    assert!(cfg.with_parameter("nope", 1.0).is_err());
    assert_eq!(
        cfg.with_parameter("eta_local", 0.1)
            .unwrap()
            .noise
            .eta_local,
        0.1
    );
}
