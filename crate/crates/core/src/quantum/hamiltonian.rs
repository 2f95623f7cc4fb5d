//! Single-atom Hamiltonian on |x_j⟩ ⊗ |n+⟩ ⊗ |n−⟩.
//!
//! H = p² − Δc(n+ + n−) + U0[n+ + n− + a+†a− e^{−2ix} + a−†a+ e^{2ix}]
//!     + η0(a+ e^{ix} + a− e^{−ix} + h.c.) + (grav/2π)x
//!
//! The position register holds one lattice period [0, 2π) with the kinetic
//! term discretized spectrally.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantumConfig {
    pub n_sites: usize,
    pub fock_cutoff: usize,
    pub delta_c: f64,
    /// Single-atom couplings U0 and η0 in ħω_r.
    pub u0: f64,
    pub eta0: f64,
    pub grav: f64,
    #[serde(default = "default_cap")]
    pub dim_cap: usize,
}

fn default_cap() -> usize {
    10_000
}

impl Default for QuantumConfig {
    /// Desk-scale superradiant configuration.
    fn default() -> Self {
        QuantumConfig { n_sites: 16, fock_cutoff: 4, delta_c: -8.0, u0: -0.1, eta0: 11.0, grav: 0.0, dim_cap: default_cap() }
    }
}

impl QuantumConfig {
    /// 64 sites and 11 Fock states per mode (dimension 7744).
    pub fn full_scale() -> Self {
        QuantumConfig { n_sites: 64, fock_cutoff: 10, ..Self::default() }
    }

    pub fn fock_dim(&self) -> usize {
        self.fock_cutoff + 1
    }

    pub fn dim(&self) -> usize {
        self.n_sites * self.fock_dim() * self.fock_dim()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites < 2 {
            return Err(Error::InvalidParam(format!("n_sites must be >= 2, got {}", self.n_sites)));
        }
        if self.dim() > self.dim_cap {
            return Err(Error::DimensionCap { dim: self.dim(), cap: self.dim_cap });
        }
        for (name, v) in [("delta_c", self.delta_c), ("u0", self.u0), ("eta0", self.eta0), ("grav", self.grav)] {
            if !v.is_finite() {
                return Err(Error::InvalidParam(format!("{name} must be finite")));
            }
        }
        Ok(())
    }

    /// Basis index of |x_j, n+, n−⟩.
    #[inline]
    pub fn index(&self, j: usize, np: usize, nm: usize) -> usize {
        (j * self.fock_dim() + np) * self.fock_dim() + nm
    }

    /// Inverse of [`index`](Self::index).
    #[inline]
    pub fn split(&self, i: usize) -> (usize, usize, usize) {
        let f = self.fock_dim();
        (i / (f * f), (i / f) % f, i % f)
    }

    pub fn spacing(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.n_sites as f64
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.n_sites).map(|j| j as f64 * self.spacing()).collect()
    }
}

/// Compressed sparse row matrix.
#[derive(Debug, Clone)]
pub struct CsrMatrix<T> {
    pub dim: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<Complex<T>>,
}

impl<T: Real> CsrMatrix<T> {
    /// Builds from per-row (column, value) lists; duplicate columns are summed.
    pub fn from_rows(rows: Vec<Vec<(usize, Complex<T>)>>) -> Self {
        let dim = rows.len();
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_by_key(|e| e.0);
            for (c, v) in row {
                if cols.len() > *row_ptr.last().expect("non-empty") && *cols.last().expect("non-empty") == c {
                    let last = vals.len() - 1;
                    vals[last] += v;
                } else {
                    cols.push(c);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        CsrMatrix { dim, row_ptr, cols, vals }
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn mul_vec(&self, x: &[Complex<T>], y: &mut [Complex<T>]) {
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = Complex::new(T::zero(), T::zero());
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *out = acc;
        }
    }

    pub fn apply(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut y = vec![Complex::new(T::zero(), T::zero()); self.dim];
        self.mul_vec(x, &mut y);
        y
    }

    pub fn get(&self, r: usize, c: usize) -> Complex<T> {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[range.clone()].binary_search(&c) {
            Ok(k) => self.vals[range.start + k],
            Err(_) => Complex::new(T::zero(), T::zero()),
        }
    }

    /// max |H_rc − conj(H_cr)| over stored entries.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..self.dim {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let c = self.cols[k];
                worst = worst.max((self.vals[k] - self.get(c, r).conj()).norm().as_f64());
            }
        }
        worst
    }
}

/// Spectral kinetic matrix K_jl = (1/N) Σ_k k² cos(k(x_j − x_l)) on one period.
fn kinetic_matrix(n: usize) -> Vec<f64> {
    let ks: Vec<f64> = (0..n).map(|i| if i <= n / 2 { i as f64 } else { i as f64 - n as f64 }).collect();
    let dx = 2.0 * std::f64::consts::PI / n as f64;
    let mut k = vec![0.0; n * n];
    for d in 0..n {
        let v: f64 = ks.iter().map(|&q| q * q * (q * d as f64 * dx).cos()).sum::<f64>() / n as f64;
        for j in 0..n {
            k[j * n + (j + d) % n] = v;
        }
    }
    k
}

pub fn build_hamiltonian<T: Real>(cfg: &QuantumConfig) -> Result<CsrMatrix<T>> {
    cfg.validate()?;
    let n = cfg.n_sites;
    let f = cfg.fock_dim();
    let kin = kinetic_matrix(n);
    let xs = cfg.positions();
    let c = |z: Complex<f64>| Complex::new(T::lit(z.re), T::lit(z.im));
    let sqrt: Vec<f64> = (0..=f).map(|k| (k as f64).sqrt()).collect();

    let rows = (0..cfg.dim())
        .map(|i| {
            let (j, np, nm) = cfg.split(i);
            let x = xs[j];
            let e1 = Complex::from_polar(1.0, x);
            let e2 = Complex::from_polar(1.0, 2.0 * x);
            let mut row = Vec::with_capacity(n + 8);
            for l in 0..n {
                let v = kin[j * n + l];
                if v != 0.0 {
                    row.push((cfg.index(l, np, nm), c(Complex::new(v, 0.0))));
                }
            }
            let photons = (np + nm) as f64;
            let diag = (cfg.u0 - cfg.delta_c) * photons + cfg.grav / (2.0 * std::f64::consts::PI) * x;
            row.push((i, c(Complex::new(diag, 0.0))));
            // ⟨j, np, nm| a+†a− e^{−2ix} |j, np−1, nm+1⟩ and its conjugate
            if np > 0 && nm + 1 < f {
                row.push((cfg.index(j, np - 1, nm + 1), c(e2.conj() * (cfg.u0 * sqrt[np] * sqrt[nm + 1]))));
            }
            if nm > 0 && np + 1 < f {
                row.push((cfg.index(j, np + 1, nm - 1), c(e2 * (cfg.u0 * sqrt[np + 1] * sqrt[nm]))));
            }
            // η0 a+ e^{ix}: |np+1⟩ → |np⟩; η0 a+† e^{−ix}: |np−1⟩ → |np⟩
            if np + 1 < f {
                row.push((cfg.index(j, np + 1, nm), c(e1 * (cfg.eta0 * sqrt[np + 1]))));
            }
            if np > 0 {
                row.push((cfg.index(j, np - 1, nm), c(e1.conj() * (cfg.eta0 * sqrt[np]))));
            }
            if nm + 1 < f {
                row.push((cfg.index(j, np, nm + 1), c(e1.conj() * (cfg.eta0 * sqrt[nm + 1]))));
            }
            if nm > 0 {
                row.push((cfg.index(j, np, nm - 1), c(e1 * (cfg.eta0 * sqrt[nm]))));
            }
            row
        })
        .collect();
    Ok(CsrMatrix::from_rows(rows))
}

/// Discrete U(1) map: translation by `shift` sites with a± → a± e^{∓iδ}, δ = shift·dx.
///
/// On basis states, |j, n+, n−⟩ → e^{−iδ(n+ − n−)} |j + shift, n+, n−⟩.
pub fn u1_apply<T: Real>(cfg: &QuantumConfig, v: &[Complex<T>], shift: usize) -> Vec<Complex<T>> {
    let delta = shift as f64 * cfg.spacing();
    let f = cfg.fock_dim();
    let mut out = vec![Complex::new(T::zero(), T::zero()); v.len()];
    for (i, z) in v.iter().enumerate() {
        let (j, np, nm) = cfg.split(i);
        let ph = Complex::from_polar(1.0, -delta * (np as f64 - nm as f64));
        let to = cfg.index((j + shift) % cfg.n_sites, np, nm);
        debug_assert!(np < f && nm < f);
        out[to] = *z * Complex::new(T::lit(ph.re), T::lit(ph.im));
    }
    out
}
