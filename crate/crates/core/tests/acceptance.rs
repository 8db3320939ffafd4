//! Acceptance criteria, one line each. Exits nonzero if any fails.

use std::path::Path;
use std::time::{Duration, Instant};

use cavityq::channels::{
    check_stationarity, local_channel_apply, preset_bath, BathChannel, ChannelBackend,
    LocalChannel, PulseErrors, DEFAULT_ETA_LOCAL,
};
use cavityq::dynamics::{run_pulses, CavityEnv, PulseSchedule};
use cavityq::experiments::{
    enumerate_branches, enumerate_paths, env_product_spread, estimate_process_fidelity,
    purified_env_products, run_trials, Backend, ExperimentConfig, GateRunner, NoiseConfig,
    Protocol,
};
use cavityq::hilbert::{make_state, reduced_fidelity, StateVector, SubsystemSpec};
use cavityq::protocols::{joint_measure_00, universal_gate_raw, GateNoise, JointFlag};
use cavityq::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, u64);

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn fail<E: std::fmt::Debug>(e: E) -> String {
    format!("{e:?}")
}

fn ideal_map() -> Outcome {
    let spec = SubsystemSpec::builder()
        .atom("1")
        .atom("2")
        .cavity("cav")
        .build()
        .map_err(fail)?;
    let sched = PulseSchedule::transfer("1", 1.0, "2", 1.0);
    let cases = [
        ((0, 0), (0, 0, 0), C64::new(1.0, 0.0)),
        ((0, 2), (0, 2, 0), C64::new(1.0, 0.0)),
        ((1, 0), (2, 0, 1), C64::new(0.0, -1.0)),
        ((1, 2), (2, 1, 0), C64::new(-1.0, 0.0)),
    ];
    let mut worst = 0.0f64;
    for ((a, b), (x, y, n), amp) in cases {
        let s = make_state::<f64>(spec.clone(), &[("1", a), ("2", b), ("cav", 0)]).map_err(fail)?;
        let out = run_pulses(&s, &sched, &CavityEnv::bare("cav")).map_err(fail)?;
        let want = make_state(spec.clone(), &[("1", x), ("2", y), ("cav", n)])
            .map_err(fail)?
            .scaled(amp);
        worst = worst.max(out.max_abs_diff(&want).map_err(fail)?);
    }
    ensure(worst < 1e-12, format!("max amplitude error {worst:e}"))?;
    Ok(format!("max amplitude error {worst:.1e}"))
}

fn channel_construction() -> Outcome {
    let spec = SubsystemSpec::builder()
        .atom("1")
        .atom("2")
        .build()
        .map_err(fail)?;
    let input = make_state::<f64>(spec, &[("1", 1), ("2", 0)]).map_err(fail)?;
    let mut notes = Vec::new();
    for eta in [0.01, 0.05, 0.2] {
        let bath = preset_bath(eta).map_err(fail)?;
        let stray = bath.stray_weight(0).map_err(fail)?;
        ensure(stray < 1e-12, format!("eta {eta}: stray weight {stray:e}"))?;
        let out = local_channel_apply(&input, &LocalChannel::bath(eta).map_err(fail)?, "1", "2", 0)
            .map_err(fail)?;
        let (p1, p2) = (
            out.spec().position("1").map_err(fail)?,
            out.spec().position("2").map_err(fail)?,
        );
        let mut w = [[0.0f64; 3]; 3];
        for (d, z) in out.nonzero() {
            w[d[p1]][d[p2]] += z.norm_sqr();
        }
        let other: f64 = (0..3)
            .flat_map(|a| (0..3).map(move |b| (a, b)))
            .filter(|c| *c != (1, 1) && *c != (1, 0))
            .map(|(a, b)| w[a][b])
            .sum();
        ensure(
            other < 1e-12,
            format!("eta {eta}: weight {other:e} outside the two branches"),
        )?;
        ensure(
            (w[1][0] - eta).abs() < 1e-10,
            format!("eta {eta}: loss branch weight {}", w[1][0]),
        )?;
        ensure(
            (w[1][1] - (1.0 - eta)).abs() < 1e-10,
            format!("eta {eta}: copy branch weight {}", w[1][1]),
        )?;
        notes.push(format!("{eta}:{:.3}", w[1][1]));
    }
    Ok(format!("copy weights {}", notes.join(" ")))
}

fn systematic_presets() -> Result<Vec<BathChannel>, String> {
    [
        PulseErrors {
            detuning: 0.1,
            ..Default::default()
        },
        PulseErrors {
            phase: 0.3,
            ..Default::default()
        },
        PulseErrors {
            detuning: -0.05,
            phase: 0.2,
            ..Default::default()
        },
    ]
    .into_iter()
    .map(|e| BathChannel::systematic(1.0, e).map_err(fail))
    .collect()
}

fn stationarity() -> Outcome {
    let mut stationary: Vec<BathChannel> = [0.01, 0.05, 0.2]
        .iter()
        .map(|&e| preset_bath(e).map_err(fail))
        .collect::<Result<_, _>>()?;
    stationary.extend(systematic_presets()?);
    let mut worst = 0.0f64;
    for ch in stationary {
        for slots in [(0, 1), (1, 3)] {
            worst = worst
                .max(check_stationarity(&ChannelBackend::Bath(ch.clone()), slots).map_err(fail)?);
        }
    }
    ensure(worst < 1e-12, format!("stationary deviation {worst:e}"))?;
    let base = preset_bath(DEFAULT_ETA_LOCAL).map_err(fail)?;
    let mut devs = Vec::new();
    for p in [0.0, 0.02, 0.05, 0.1] {
        let b = ChannelBackend::Bath(base.clone().with_p_therm(p).map_err(fail)?);
        devs.push(check_stationarity(&b, (0, 1)).map_err(fail)?);
    }
    ensure(
        devs.windows(2).all(|w| w[1] >= w[0]),
        format!("not monotone: {devs:?}"),
    )?;
    ensure(devs[3] > 1e-4, format!("thermal deviation {:e}", devs[3]))?;
    Ok(format!(
        "stationary max {worst:.1e}, thermal {:.4}",
        devs[3]
    ))
}

fn joint_purification() -> Outcome {
    let spec = SubsystemSpec::builder()
        .atom("1")
        .atom("2")
        .atom("R")
        .build()
        .map_err(fail)?;
    let pair = SubsystemSpec::builder()
        .atom("1")
        .atom("2")
        .build()
        .map_err(fail)?;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 1.0f64;
    let mut branches = 0;
    for eta in [0.05, 0.2] {
        let channels = [
            LocalChannel::analytic(eta).map_err(fail)?,
            LocalChannel::bath(eta).map_err(fail)?,
        ];
        for _ in 0..20 {
            let mut z = || C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let (alpha, beta, gamma) = (z(), z(), z());
            let k = |a, b| make_state::<f64>(spec.clone(), &[("1", a), ("2", b), ("R", 0)]);
            let s = k(0, 0)
                .map_err(fail)?
                .scaled(gamma)
                .add(&k(0, 1).map_err(fail)?.scaled(alpha))
                .map_err(fail)?
                .add(&k(1, 0).map_err(fail)?.scaled(beta))
                .map_err(fail)?
                .normalized()
                .map_err(fail)?;
            let p = |a, b| make_state::<f64>(pair.clone(), &[("1", a), ("2", b)]);
            let target = p(0, 1)
                .map_err(fail)?
                .scaled(alpha)
                .add(&p(1, 0).map_err(fail)?.scaled(beta))
                .map_err(fail)?;
            for ch in &channels {
                let leaves =
                    enumerate_paths(|src| joint_measure_00(&s, ("1", "2"), "R", ch, 0, src))
                        .map_err(fail)?;
                let total: f64 = leaves.iter().map(|(sc, _)| sc.weight()).sum();
                ensure(
                    (total - 1.0).abs() < 1e-10,
                    format!("branch weights sum to {total}"),
                )?;
                for (_, o) in leaves
                    .iter()
                    .filter(|(_, o)| o.flag == JointFlag::SubspaceOk)
                {
                    worst = worst.min(reduced_fidelity(&o.post_state, &target).map_err(fail)?);
                    branches += 1;
                }
            }
        }
    }
    ensure(worst >= 1.0 - 1e-9, format!("min fidelity {worst}"))?;
    Ok(format!(
        "{branches} accepted branches, min fidelity 1 - {:.1e}",
        1.0 - worst
    ))
}

fn epr_noise(backend: Backend) -> NoiseConfig {
    NoiseConfig {
        backend,
        eta_local: 0.05,
        eta_transmission: 0.2,
        ..Default::default()
    }
}

fn epr_establishment() -> Outcome {
    let mut single = ExperimentConfig::new(Protocol::Epr, epr_noise(Backend::Analytic), 10_000, 2);
    single.max_attempts = 1;
    let e = enumerate_branches(&single).map_err(fail)?;
    let p = e.success_probability;
    let mut min_f = e.min_success_fidelity.unwrap_or(0.0);
    let mut bath = single.clone();
    bath.noise.backend = Backend::Bath;
    let eb = enumerate_branches(&bath).map_err(fail)?;
    min_f = min_f.min(eb.min_success_fidelity.unwrap_or(0.0));
    ensure(
        (eb.success_probability - p).abs() < 1e-10,
        format!("bath per-attempt {}", eb.success_probability),
    )?;
    ensure(
        min_f >= 1.0 - 1e-9,
        format!("min enumerated fidelity {min_f}"),
    )?;

    let n = single.trials as f64;
    let (s1, _) = run_trials(&single, None).map_err(fail)?;
    let sigma = (p * (1.0 - p) / n).sqrt();
    ensure(
        (s1.success_probability - p).abs() < 3.0 * sigma,
        format!("frequency {} vs {p}", s1.success_probability),
    )?;

    let mut repeat = single.clone();
    repeat.max_attempts = 50;
    let (s50, _) = run_trials(&repeat, None).map_err(fail)?;
    ensure(
        s50.min_fidelity.unwrap_or(0.0) >= 1.0 - 1e-9,
        "repeated attempts lost fidelity",
    )?;
    let mean = 1.0 / p;
    let sigma_att = ((1.0 - p) / (p * p) / n).sqrt();
    ensure(
        (s50.mean_attempts - mean).abs() < 3.0 * sigma_att,
        format!("mean attempts {} vs {mean}", s50.mean_attempts),
    )?;

    let mut thermal = bath;
    thermal.noise.p_therm = 0.1;
    let et = enumerate_branches(&thermal).map_err(fail)?;
    let ft = et.min_success_fidelity.unwrap_or(1.0);
    ensure(ft < 1.0, "thermal bath reached fidelity 1")?;
    Ok(format!(
        "p = {p:.4}, sampled {:.4}, attempts {:.4} vs {mean:.4}, thermal fidelity {ft:.4}",
        s1.success_probability, s50.mean_attempts
    ))
}

fn gate_purification() -> Outcome {
    let pair = SubsystemSpec::builder()
        .atom("1")
        .atom("2")
        .build()
        .map_err(fail)?;
    for (a, b, sign) in [(0, 0, 1.0), (0, 1, 1.0), (1, 0, -1.0), (1, 1, 1.0)] {
        let s: StateVector<f64> = make_state(pair.clone(), &[("1", a), ("2", b)]).map_err(fail)?;
        let out = universal_gate_raw(&s, ("1", "2"), &GateNoise::Ideal).map_err(fail)?;
        let amp = out
            .amplitude(&[("1", a), ("2", b), ("env", 0)])
            .map_err(fail)?;
        ensure(
            (amp - C64::new(sign, 0.0)).norm() < 1e-12,
            format!("raw gate on |{a}{b}>: {amp}"),
        )?;
        ensure((out.norm_squared() - 1.0).abs() < 1e-12, "raw gate leaked")?;
    }
    let mut notes = Vec::new();
    for noise in [
        GateNoise::Analytic {
            eta: 0.05,
            detuning_phase: 0.0,
        },
        GateNoise::Analytic {
            eta: 0.0,
            detuning_phase: 0.1,
        },
    ] {
        let (f, probs) = estimate_process_fidelity(GateRunner::Purified, &noise).map_err(fail)?;
        ensure(f >= 1.0 - 1e-9, format!("{noise:?}: process fidelity {f}"))?;
        let (products, leak) = purified_env_products(&noise).map_err(fail)?;
        let spread = env_product_spread(&products);
        ensure(
            spread < 1e-10 && leak < 1e-10,
            format!("{noise:?}: spread {spread:e}, leak {leak:e}"),
        )?;
        notes.push(format!("p_ok {:.4}", probs[0]));
    }
    Ok(format!(
        "raw exact, purified fidelity >= 1 - 1e-9 ({})",
        notes.join(", ")
    ))
}

fn backend_equivalence() -> Outcome {
    let mut presets: Vec<BathChannel> = [0.01, 0.05, 0.2]
        .iter()
        .map(|&e| preset_bath(e).map_err(fail))
        .collect::<Result<_, _>>()?;
    presets.extend(systematic_presets()?);
    let mut worst = 0.0f64;
    let mut count = 0;
    for ch in &presets {
        for slot in 0..3 {
            let bath = ch.branch_map(slot).map_err(fail)?;
            let analytic = ch.derive_analytic(slot).map_err(fail)?.branch_map();
            worst = worst.max(bath.gram_distance(&analytic));
            count += 1;
        }
    }
    ensure(worst < 1e-10, format!("max distance {worst:e}"))?;
    Ok(format!("{count} maps, max amplitude distance {worst:.1e}"))
}

fn cli_contract() -> Outcome {
    use cavityq::cli::run_cli;
    let dir = tempfile::tempdir().map_err(fail)?;
    let sub = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    let run = |args: &[&str]| run_cli(std::iter::once("cavityq").chain(args.iter().copied()));
    ensure(
        run(&[
            "run",
            "--config",
            "epr_ideal.json",
            "--check",
            "--out",
            &sub("a"),
        ]) == 0,
        "epr_ideal --check",
    )?;
    ensure(
        run(&[
            "run",
            "--config",
            "gate_eta05.json",
            "--check",
            "--out",
            &sub("b"),
        ]) == 0,
        "gate_eta05 --check",
    )?;
    ensure(
        run(&[
            "run",
            "--config",
            "gate_eta05.json",
            "--check",
            "--out",
            &sub("c"),
        ]) == 0,
        "second run",
    )?;
    let corrupt = dir.path().join("corrupt.json");
    std::fs::write(
        &corrupt,
        r#"{"protocol": "epr", "trials": "many", "seed": 1}"#,
    )
    .map_err(fail)?;
    ensure(
        run(&[
            "run",
            "--config",
            &corrupt.to_string_lossy(),
            "--out",
            &sub("d"),
        ]) == 1,
        "corrupt config",
    )?;

    let first = std::fs::read(dir.path().join("b/report.json")).map_err(fail)?;
    let second = std::fs::read(dir.path().join("c/report.json")).map_err(fail)?;
    ensure(first == second, "report.json differs between runs")?;
    let schema_path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas/report.schema.json");
    let schema: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(schema_path).map_err(fail)?).map_err(fail)?;
    let validator = jsonschema::validator_for(&schema).map_err(fail)?;
    for d in ["a", "b"] {
        let report: serde_json::Value = serde_json::from_slice(
            &std::fs::read(dir.path().join(d).join("report.json")).map_err(fail)?,
        )
        .map_err(fail)?;
        ensure(
            validator.is_valid(&report),
            format!("report {d} fails the schema"),
        )?;
    }
    Ok("exit codes 0/0/1, schema-valid, byte-identical".into())
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("ideal map golden test", ideal_map, 1),
        ("channel construction", channel_construction, 5),
        ("stationarity", stationarity, 10),
        ("joint-measurement purification", joint_purification, 30),
        ("EPR establishment", epr_establishment, 120),
        ("gate purification", gate_purification, 120),
        ("backend oracle equivalence", backend_equivalence, 30),
        ("CLI contract", cli_contract, 60),
    ];
    let mut failed = 0;
    for (k, (name, check, limit)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let result = match result {
            Ok(msg) if elapsed > Duration::from_secs(limit) => {
                Err(format!("{msg}; took {elapsed:.1?} > {limit} s"))
            }
            other => other,
        };
        match result {
            Ok(msg) => println!("PASS [{}] {name} ({elapsed:.2?}): {msg}", k + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL [{}] {name} ({elapsed:.2?}): {msg}", k + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
