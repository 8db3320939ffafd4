use std::f64::consts::FRAC_1_SQRT_2;

use crate::channels::{compress_environment, ENV_REGISTER};
use crate::error::Result;
use crate::hilbert::{reduced_fidelity, StateVector, SubsystemSpec};
use crate::protocols::{purified_gate_projected, universal_gate_raw, GateNoise};
use crate::C64;

/// Number of probe inputs used for process fidelity.
pub const PROBE_COUNT: usize = 10;

fn pair_spec() -> SubsystemSpec {
    SubsystemSpec::builder()
        .atom("1")
        .atom("2")
        .build()
        .expect("static spec")
}

/// Amplitudes over (00, 01, 10, 11) of probe `k`: the four computational
/// states, then six superpositions sensitive to relative phases.
fn probe_amplitudes(k: usize) -> [C64; 4] {
    let o = C64::new(0.0, 0.0);
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    let q = C64::new(0.5, 0.0);
    match k % PROBE_COUNT {
        0 => [C64::new(1.0, 0.0), o, o, o],
        1 => [o, C64::new(1.0, 0.0), o, o],
        2 => [o, o, C64::new(1.0, 0.0), o],
        3 => [o, o, o, C64::new(1.0, 0.0)],
        4 => [h, o, h, o],
        5 => [o, h, o, h],
        6 => [h, h, o, o],
        7 => [o, o, h, h],
        8 => [q, q, q, q],
        _ => [h, o, o, C64::new(0.0, FRAC_1_SQRT_2)],
    }
}

fn pair_state(amps: [C64; 4]) -> StateVector<f64> {
    let spec = pair_spec();
    let mut s = StateVector::zero(spec.clone());
    for (j, a) in amps.into_iter().enumerate() {
        let idx = spec.compose(&[j / 2, j % 2]);
        s.amplitudes_mut()[idx] = a;
    }
    s
}

/// Probe input `k` on atoms 1 and 2.
pub fn probe_state(k: usize) -> StateVector<f64> {
    pair_state(probe_amplitudes(k))
}

/// Ideal gate action: `-1` on `|10>`, identity otherwise.
pub fn ideal_gate_output(k: usize) -> StateVector<f64> {
    let mut a = probe_amplitudes(k);
    a[2] = -a[2];
    pair_state(a)
}

/// Which gate runner a fidelity estimate uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateRunner {
    Raw,
    Purified,
}

/// Minimum over the probe set of the conditional output fidelity with the
/// ideal gate (no-error branch for the purified gate), with the success
/// probability of each probe.
pub fn estimate_process_fidelity(runner: GateRunner, noise: &GateNoise) -> Result<(f64, Vec<f64>)> {
    let mut worst = 1.0f64;
    let mut probs = Vec::with_capacity(PROBE_COUNT);
    for k in 0..PROBE_COUNT {
        let out = match runner {
            GateRunner::Raw => universal_gate_raw(&probe_state(k), ("1", "2"), noise)?,
            GateRunner::Purified => purified_gate_projected(&probe_state(k), ("1", "2"), noise)?,
        };
        probs.push(out.norm_squared());
        worst = worst.min(reduced_fidelity(&out, &ideal_gate_output(k))?);
    }
    Ok((worst, probs))
}

/// Environment vectors left by the no-error branch of the purified gate for
/// the four computational inputs, with the ideal sign divided out, in one
/// common register basis. Also returns the largest amplitude that leaked
/// to a different atomic configuration.
pub fn purified_env_products(noise: &GateNoise) -> Result<(Vec<Vec<C64>>, f64)> {
    let spec = SubsystemSpec::builder()
        .atom("1")
        .atom("2")
        .register("ref", 4)
        .build()?;
    let mut s = StateVector::zero(spec.clone());
    for j in 0..4 {
        s.amplitudes_mut()[spec.compose(&[j / 2, j % 2, j])] = C64::new(0.5, 0.0);
    }
    let out = compress_environment(&purified_gate_projected(&s, ("1", "2"), noise)?)?;
    let ospec = out.spec();
    let env_dim = ospec.entry(ENV_REGISTER)?.dim;
    let (p1, p2, pr, pe) = (
        ospec.position("1")?,
        ospec.position("2")?,
        ospec.position("ref")?,
        ospec.position(ENV_REGISTER)?,
    );
    let mut products = vec![vec![C64::new(0.0, 0.0); env_dim]; 4];
    let mut leak = 0.0f64;
    for (i, a) in out.amplitudes().iter().enumerate() {
        let d = ospec.digits(i);
        let j = d[pr];
        if d[p1] == j / 2 && d[p2] == j % 2 {
            let sign = if j == 2 { -2.0 } else { 2.0 };
            products[j][d[pe]] = a * sign;
        } else {
            leak = leak.max(a.norm() * 2.0);
        }
    }
    Ok((products, leak))
}

/// Largest pairwise distance between the four environment products.
pub fn env_product_spread(products: &[Vec<C64>]) -> f64 {
    let mut worst = 0.0f64;
    for a in products {
        for b in products {
            let d: f64 = a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y).norm_sqr())
                .sum::<f64>()
                .sqrt();
            worst = worst.max(d);
        }
    }
    worst
}
