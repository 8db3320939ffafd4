use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::hilbert::{StateVector, Subsystem, SubsystemKind, SubsystemSpec};
use crate::scalar::Real;

/// Rewrites `s` over `keep` plus one register holding an orthonormal basis
/// of everything else.
///
/// Rows of the amplitude matrix (kept index x rest index) are
/// orthogonalized with twice-iterated Gram-Schmidt; the register dimension is
/// the numerical rank. All observables on `keep` are preserved.
pub fn fold_environment<T: Real>(
    s: &StateVector<T>,
    keep: &[&str],
    register: &str,
) -> Result<StateVector<T>> {
    let spec = s.spec();
    let keep_pos: Vec<usize> = keep
        .iter()
        .map(|l| spec.position(l))
        .collect::<Result<_>>()?;
    if keep.contains(&register) {
        return Err(Error::DuplicateLabel(register.to_string()));
    }
    let rest_pos: Vec<usize> = (0..spec.len()).filter(|p| !keep_pos.contains(p)).collect();
    let keep_spec = SubsystemSpec::new(
        keep_pos
            .iter()
            .map(|&p| spec.entries()[p].clone())
            .collect(),
    )?;
    let rest_dims: Vec<usize> = rest_pos.iter().map(|&p| spec.entries()[p].dim).collect();
    let n_rest: usize = rest_dims.iter().product();

    let mut rows: Vec<Vec<Complex<T>>> = vec![Vec::new(); keep_spec.dim()];
    for (i, a) in s.amplitudes().iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let digits = spec.digits(i);
        let k = keep_pos
            .iter()
            .fold(0, |acc, &p| acc * spec.entries()[p].dim + digits[p]);
        let r = rest_pos
            .iter()
            .fold(0, |acc, &p| acc * spec.entries()[p].dim + digits[p]);
        let row = &mut rows[k];
        if row.is_empty() {
            row.resize(n_rest, Complex::zero());
        }
        row[r] = *a;
    }

    let scale = rows
        .iter()
        .flatten()
        .fold(T::zero(), |m, z| m.max(z.norm()));
    let cutoff = T::lit(1e-13) * scale;
    let mut basis: Vec<Vec<Complex<T>>> = Vec::new();
    let mut coeffs: Vec<(usize, Vec<Complex<T>>)> = Vec::new();
    for (k, row) in rows.iter().enumerate() {
        if row.is_empty() {
            continue;
        }
        let mut resid = row.clone();
        let mut c = vec![Complex::zero(); basis.len()];
        for _ in 0..2 {
            for (j, q) in basis.iter().enumerate() {
                let ip = dot(q, &resid);
                c[j] += ip;
                for (x, y) in resid.iter_mut().zip(q) {
                    *x -= *y * ip;
                }
            }
        }
        let norm = resid
            .iter()
            .map(|z| z.norm_sqr())
            .fold(T::zero(), |a, b| a + b)
            .sqrt();
        if norm > cutoff {
            let ph = gauge(&resid);
            for x in resid.iter_mut() {
                *x /= ph * norm;
            }
            basis.push(resid);
            c.push(ph * norm);
        }
        coeffs.push((k, c));
    }

    let r = basis.len().max(1);
    let out_spec = keep_spec.push(Subsystem {
        label: register.to_string(),
        dim: r,
        kind: SubsystemKind::Register,
    })?;
    let mut amps = vec![Complex::zero(); out_spec.dim()];
    for (k, c) in coeffs {
        for (j, z) in c.into_iter().enumerate() {
            amps[k * r + j] = z;
        }
    }
    StateVector::from_amplitudes(out_spec, amps)
}

/// Unit phase of the largest component: dividing by it makes that component
/// real and positive, which fixes the basis gauge.
pub(crate) fn gauge<T: Real>(v: &[Complex<T>]) -> Complex<T> {
    let mut best = Complex::zero();
    for z in v {
        if z.norm() > best.norm() * (T::one() + T::lit(1e-9)) {
            best = *z;
        }
    }
    best / best.norm()
}

fn dot<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter()
        .zip(b)
        .fold(Complex::zero(), |acc, (x, y)| acc + x.conj() * y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{make_state, reduced_fidelity};
    use crate::C64;

    #[test]
    fn fold_preserves_reduced_state() {
        let spec = SubsystemSpec::builder()
            .atom("1")
            .cavity("c")
            .atom("2")
            .register("e", 3)
            .build()
            .unwrap();
        let amps: Vec<C64> = (0..spec.dim())
            .map(|i| C64::new(((i * 7) % 5) as f64 - 2.0, ((i * 3) % 4) as f64 - 1.5))
            .collect();
        let s = StateVector::from_amplitudes(spec, amps)
            .unwrap()
            .normalized()
            .unwrap();
        let f = fold_environment(&s, &["2", "1"], "env").unwrap();
        assert_eq!(f.spec().labels().collect::<Vec<_>>(), vec!["2", "1", "env"]);
        assert!(f.spec().entry("env").unwrap().dim <= 9);
        assert!((f.norm_squared() - 1.0).abs() < 1e-12);
        // reduced density matrices agree
        let rho = |st: &StateVector<f64>, labels: &[&str]| {
            let sp = st.spec();
            let pos: Vec<usize> = labels.iter().map(|l| sp.position(l).unwrap()).collect();
            let mut m = vec![C64::new(0.0, 0.0); 81];
            for (i, a) in st.amplitudes().iter().enumerate() {
                for (j, b) in st.amplitudes().iter().enumerate() {
                    let (di, dj) = (sp.digits(i), sp.digits(j));
                    let rest_eq = (0..sp.len())
                        .filter(|p| !pos.contains(p))
                        .all(|p| di[p] == dj[p]);
                    if rest_eq {
                        let ki = di[pos[0]] * 3 + di[pos[1]];
                        let kj = dj[pos[0]] * 3 + dj[pos[1]];
                        m[ki * 9 + kj] += a * b.conj();
                    }
                }
            }
            m
        };
        let (a, b) = (rho(&s, &["1", "2"]), rho(&f, &["1", "2"]));
        assert!(a.iter().zip(&b).all(|(x, y)| (x - y).norm() < 1e-12));
    }

    #[test]
    fn fold_of_product_state_has_rank_one() {
        let spec = SubsystemSpec::builder()
            .atom("1")
            .cavity("c")
            .build()
            .unwrap();
        let s: StateVector<f64> = make_state(spec, &[("1", 2), ("c", 1)]).unwrap();
        let f = fold_environment(&s, &["1"], "env").unwrap();
        assert_eq!(f.spec().entry("env").unwrap().dim, 1);
        let t = make_state(
            SubsystemSpec::builder().atom("1").build().unwrap(),
            &[("1", 2)],
        )
        .unwrap();
        assert!((reduced_fidelity(&f, &t).unwrap() - 1.0).abs() < 1e-14);
    }
}
