//! Lowest eigenpair of a Hermitian sparse matrix.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result, StallKind};
use crate::scalar::Real;

use super::hamiltonian::CsrMatrix;

/// Eigen-decomposition of a real symmetric tridiagonal matrix by implicit QL.
///
/// `diag` has length m, `off` length m − 1. Returns ascending eigenvalues and
/// the eigenvectors as columns of a row-major m×m matrix.
pub fn tridiagonal_eigen<T: Real>(diag: &[T], off: &[T]) -> Result<(Vec<T>, Vec<T>)> {
    let m = diag.len();
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(T::zero());
    let mut z = vec![T::zero(); m * m];
    for i in 0..m {
        z[i * m + i] = T::one();
    }
    let two = T::lit(2.0);
    for l in 0..m {
        let mut iter = 0;
        loop {
            let mut mm = l;
            while mm + 1 < m {
                let dd = d[mm].abs() + d[mm + 1].abs();
                if e[mm].abs() <= T::epsilon() * dd {
                    break;
                }
                mm += 1;
            }
            if mm == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::NonConvergence { iterations: iter, kind: StallKind::Slow, last_update: e[l].as_f64() });
            }
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            g = d[mm] - d[l] + e[l] / (g + if g >= T::zero() { r.abs() } else { -r.abs() });
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut i = mm;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] -= p;
                    e[mm] = T::zero();
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..m {
                    let f = z[k * m + i + 1];
                    z[k * m + i + 1] = s * z[k * m + i] + c * f;
                    z[k * m + i] = c * z[k * m + i] - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[mm] = T::zero();
        }
    }
    // sort ascending
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).unwrap_or(std::cmp::Ordering::Equal));
    let vals = order.iter().map(|&i| d[i]).collect();
    let mut vecs = vec![T::zero(); m * m];
    for (new, &old) in order.iter().enumerate() {
        for k in 0..m {
            vecs[k * m + new] = z[k * m + old];
        }
    }
    Ok((vals, vecs))
}

#[derive(Debug, Clone, Copy)]
pub struct LanczosConfig {
    /// Krylov dimension per cycle.
    pub krylov: usize,
    pub max_restarts: usize,
    /// Target residual ‖Hv − Ev‖.
    pub tol: f64,
    pub seed: u64,
}

impl Default for LanczosConfig {
    fn default() -> Self {
        LanczosConfig { krylov: 120, max_restarts: 200, tol: 1e-9, seed: 7 }
    }
}

#[derive(Debug, Clone)]
pub struct Eigenpair<T> {
    pub value: T,
    pub vector: Vec<Complex<T>>,
    pub residual: f64,
    pub restarts: usize,
}

fn dot<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter().zip(b).fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| acc + x.conj() * y)
}

fn norm<T: Real>(a: &[Complex<T>]) -> T {
    a.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
}

fn scale<T: Real>(a: &mut [Complex<T>], s: T) {
    a.iter_mut().for_each(|z| *z *= s);
}

/// Restarted Lanczos with full reorthogonalization, restarting from the current Ritz vector.
pub fn lowest_eigenpair<T: Real>(
    h: &CsrMatrix<T>,
    start: Option<&[Complex<T>]>,
    cfg: &LanczosConfig,
) -> Result<Eigenpair<T>> {
    let n = h.dim;
    let mut v: Vec<Complex<T>> = match start {
        Some(s) => s.to_vec(),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            (0..n).map(|_| Complex::new(T::lit(rng.gen_range(-1.0..1.0)), T::lit(rng.gen_range(-1.0..1.0)))).collect()
        }
    };
    let nv = norm(&v);
    if nv == T::zero() {
        return Err(Error::InvalidParam("zero start vector".into()));
    }
    scale(&mut v, T::one() / nv);
    let m = cfg.krylov.min(n).max(1);
    let mut w = vec![Complex::new(T::zero(), T::zero()); n];
    let mut last_res = f64::INFINITY;

    for restart in 0..=cfg.max_restarts {
        let mut basis: Vec<Vec<Complex<T>>> = vec![v.clone()];
        let mut alpha = Vec::with_capacity(m);
        let mut beta: Vec<T> = Vec::with_capacity(m);
        for j in 0..m {
            h.mul_vec(&basis[j], &mut w);
            let a = dot(&basis[j], &w).re;
            alpha.push(a);
            // two passes of classical Gram-Schmidt against the whole basis
            for _ in 0..2 {
                for b in &basis {
                    let c = dot(b, &w);
                    for (wi, bi) in w.iter_mut().zip(b) {
                        *wi -= *bi * c;
                    }
                }
            }
            if j + 1 == m {
                break;
            }
            let bn = norm(&w);
            if bn.as_f64() < 1e-12 * a.abs().as_f64().max(1.0) {
                break;
            }
            beta.push(bn);
            let mut next = w.clone();
            scale(&mut next, T::one() / bn);
            basis.push(next);
        }
        let k = alpha.len();
        let (vals, vecs) = tridiagonal_eigen(&alpha, &beta[..k - 1])?;
        let theta = vals[0];
        let mut x = vec![Complex::new(T::zero(), T::zero()); n];
        for (i, b) in basis.iter().take(k).enumerate() {
            let s = vecs[i * k];
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi += *bi * s;
            }
        }
        let nx = norm(&x);
        scale(&mut x, T::one() / nx);
        h.mul_vec(&x, &mut w);
        let res = w
            .iter()
            .zip(&x)
            .fold(T::zero(), |acc, (hw, xi)| acc + (*hw - *xi * theta).norm_sqr())
            .sqrt()
            .as_f64();
        last_res = res;
        if res < cfg.tol || k == n {
            return Ok(Eigenpair { value: theta, vector: x, residual: res, restarts: restart });
        }
        v = x;
    }
    Err(Error::NonConvergence { iterations: cfg.max_restarts, kind: StallKind::Slow, last_update: last_res })
}
