//! Dense Hermitian kernels for small blocks.
//!
//! A complex Hermitian `H = A + iB` is diagonalized through its real
//! symmetric embedding `[[A, -B], [B, A]]` with cyclic Jacobi rotations.
//! Any real function of `H` then follows from the embedding's spectral
//! decomposition, read back from the left column of blocks.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Real symmetric eigendecomposition: eigenvalues and column-major
/// eigenvectors (`vectors[k * n + i]` is component `i` of vector `k`).
pub struct SymmetricEigen<T> {
    pub values: Vec<T>,
    pub vectors: Vec<T>,
    pub n: usize,
}

/// Cyclic Jacobi on a row-major symmetric `n x n` matrix.
pub fn jacobi_eigen<T: Real>(matrix: &[T], n: usize) -> SymmetricEigen<T> {
    assert_eq!(matrix.len(), n * n);
    let mut a = matrix.to_vec();
    let mut v = vec![T::zero(); n * n];
    for i in 0..n {
        v[i * n + i] = T::one();
    }
    let scale = a.iter().fold(T::zero(), |m, x| m.max(x.abs()));
    if scale > T::zero() {
        let thresh = T::epsilon() * scale * T::lit(1e-2);
        for _sweep in 0..100 {
            let mut off = T::zero();
            for p in 0..n {
                for q in (p + 1)..n {
                    off = off.max(a[p * n + q].abs());
                }
            }
            if off <= thresh {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[p * n + q];
                    if apq.abs() <= thresh {
                        continue;
                    }
                    let app = a[p * n + p];
                    let aqq = a[q * n + q];
                    let theta = (aqq - app) / (T::lit(2.0) * apq);
                    let sign = if theta >= T::zero() {
                        T::one()
                    } else {
                        -T::one()
                    };
                    let t = sign / (theta.abs() + (theta * theta + T::one()).sqrt());
                    let c = T::one() / (t * t + T::one()).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[k * n + p];
                        let akq = a[k * n + q];
                        a[k * n + p] = c * akp - s * akq;
                        a[k * n + q] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[p * n + k];
                        let aqk = a[q * n + k];
                        a[p * n + k] = c * apk - s * aqk;
                        a[q * n + k] = s * apk + c * aqk;
                    }
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = c * vkp - s * vkq;
                        v[k * n + q] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }
    let values: Vec<T> = (0..n).map(|i| a[i * n + i]).collect();
    // transpose v (row-major with eigenvectors as columns) to column-major storage
    let mut vectors = vec![T::zero(); n * n];
    for k in 0..n {
        for i in 0..n {
            vectors[k * n + i] = v[i * n + k];
        }
    }
    SymmetricEigen { values, vectors, n }
}

fn check_hermitian<T: Real>(h: &[Complex<T>], n: usize, tol: T) -> Result<()> {
    let mut worst = T::zero();
    for r in 0..n {
        for c in r..n {
            worst = worst.max((h[r * n + c] - h[c * n + r].conj()).norm());
        }
    }
    if worst > tol {
        return Err(Error::NonHermitian(worst.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(())
}

fn embed<T: Real>(h: &[Complex<T>], n: usize) -> Vec<T> {
    let m = 2 * n;
    let mut e = vec![T::zero(); m * m];
    for r in 0..n {
        for c in 0..n {
            // symmetrize so rounding in the input cannot break the embedding
            let z = (h[r * n + c] + h[c * n + r].conj()) * T::lit(0.5);
            e[r * m + c] = z.re;
            e[(r + n) * m + (c + n)] = z.re;
            e[r * m + (c + n)] = -z.im;
            e[(r + n) * m + c] = z.im;
        }
    }
    e
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues<T: Real>(h: &[Complex<T>], n: usize) -> Result<Vec<T>> {
    check_hermitian(h, n, T::lit(1e-12) * (T::one() + max_abs(h)))?;
    let eig = jacobi_eigen(&embed(h, n), 2 * n);
    let mut vals = eig.values;
    vals.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    // each eigenvalue appears twice in the embedding
    Ok(vals.into_iter().step_by(2).collect())
}

fn max_abs<T: Real>(h: &[Complex<T>]) -> T {
    h.iter().fold(T::zero(), |m, z| m.max(z.norm()))
}

/// `f(H)` for a Hermitian `H` and a real-to-complex spectral function `f`.
pub fn hermitian_function<T: Real>(
    h: &[Complex<T>],
    n: usize,
    f: impl Fn(T) -> Complex<T>,
) -> Result<Vec<Complex<T>>> {
    check_hermitian(h, n, T::lit(1e-12) * (T::one() + max_abs(h)))?;
    let m = 2 * n;
    let eig = jacobi_eigen(&embed(h, n), m);
    // Re f and Im f are real functions; each maps the embedding of H to the
    // embedding of the corresponding complex matrix function.
    let mut out = vec![Complex::zero(); n * n];
    for k in 0..m {
        let fv = f(eig.values[k]);
        let u = &eig.vectors[k * m..(k + 1) * m];
        for r in 0..n {
            for c in 0..n {
                // top-left block gives the real part, bottom-left the imaginary part
                let tl = u[r] * u[c];
                let bl = u[r + n] * u[c];
                let re_block = Complex::new(tl, bl);
                out[r * n + c] +=
                    re_block * fv.re + re_block * Complex::new(T::zero(), T::one()) * fv.im;
            }
        }
    }
    Ok(out)
}

/// `exp(-i H t)` for a Hermitian `H`.
pub fn expm_hermitian<T: Real>(h: &[Complex<T>], n: usize, t: T) -> Result<Vec<Complex<T>>> {
    hermitian_function(h, n, |lambda| {
        let theta = -lambda * t;
        Complex::new(theta.cos(), theta.sin())
    })
}
