use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::hilbert::{LinearOp, StateVector};
use crate::linalg::expm_hermitian;
use crate::scalar::Real;

/// `exp(-i h dt)` as a sparse operator on `h`'s support.
///
/// The support matrix is split into connected blocks (`h` conserves the
/// excitation number, so blocks stay small) and each block is exponentiated
/// exactly by diagonalization.
pub fn propagator<T: Real>(h: &LinearOp<T>, dt: T) -> Result<LinearOp<T>> {
    let defect = h.hermiticity_defect();
    if defect > T::lit(1e-12) {
        return Err(Error::NonHermitian(defect.to_f64().unwrap_or(f64::NAN)));
    }
    let d = h.support_dim();
    let mut parent: Vec<usize> = (0..d).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for &(r, c, _) in h.entries() {
        let (a, b) = (find(&mut parent, r), find(&mut parent, c));
        if a != b {
            parent[a] = b;
        }
    }
    let mut blocks: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..d {
        let root = find(&mut parent, i);
        blocks.entry(root).or_default().push(i);
    }
    let mut local = vec![usize::MAX; d];
    let mut block_of = vec![0usize; d];
    let blocks: Vec<Vec<usize>> = blocks.into_values().collect();
    for (b, members) in blocks.iter().enumerate() {
        for (k, &i) in members.iter().enumerate() {
            local[i] = k;
            block_of[i] = b;
        }
    }
    let mut mats: Vec<Vec<Complex<T>>> = blocks
        .iter()
        .map(|m| vec![Complex::zero(); m.len() * m.len()])
        .collect();
    for &(r, c, v) in h.entries() {
        let b = block_of[r];
        let n = blocks[b].len();
        mats[b][local[r] * n + local[c]] += v;
    }
    let one = Complex::new(T::one(), T::zero());
    let mut triples = Vec::new();
    for (members, m) in blocks.iter().zip(&mats) {
        let n = members.len();
        if n == 1 {
            let lambda = m[0].re;
            let theta = -lambda * dt;
            let u = if lambda == T::zero() {
                one
            } else {
                Complex::new(theta.cos(), theta.sin())
            };
            triples.push((members[0], members[0], u));
            continue;
        }
        let u = expm_hermitian(m, n, dt)?;
        for r in 0..n {
            for c in 0..n {
                let v = u[r * n + c];
                if !v.is_zero() {
                    triples.push((members[r], members[c], v));
                }
            }
        }
    }
    let labels = h.support_labels();
    LinearOp::from_triples(h.spec(), &labels, triples)
}

/// `exp(-i h dt) s`.
pub fn evolve<T: Real>(s: &StateVector<T>, h: &LinearOp<T>, dt: T) -> Result<StateVector<T>> {
    propagator(h, dt)?.apply(s)
}
