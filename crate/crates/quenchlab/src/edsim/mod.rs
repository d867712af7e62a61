//! Brute-force spin-basis engine: exact time evolution and ground-state
//! observables for open or periodic chains with NN and NNN couplings.
//! Serves as the oracle for the free-fermion engine and as the engine for
//! the nonintegrable chain at small N.
//!
//! Basis convention: σ^z product states indexed by bit pattern, bit r = 0
//! meaning spin up (σ^z = +1) at site r, so the polarized state |↑↑…↑⟩ is
//! index 0.

mod evolve;
mod lanczos;

pub use evolve::{evolve_map, evolve_states, magnetization_site, otoc_site, zz_correlator, InitialState};
pub use lanczos::ground_state;

use crate::error::{Error, Result};
use crate::model::{Boundary, ChainSpec};
use num_complex::Complex64;

/// Hard cap on chain length for the spin-basis engine.
pub const MAX_SITES: usize = 20;

/// σ^z eigenvalue of site `i` in basis state `s`.
#[inline]
pub fn zval(s: usize, i: usize) -> f64 {
    1.0 - 2.0 * ((s >> i) & 1) as f64
}

/// Spin Hamiltonian stored as its diagonal (all σ^z σ^z couplings) plus the
/// uniform transverse-field flip amplitude; off-diagonal structure is
/// implicit (exactly N single-bit flips per row).
#[derive(Debug, Clone)]
pub struct SparseHamiltonian {
    pub n: usize,
    pub dim: usize,
    pub diag: Vec<f64>,
    pub h_field: f64,
}

/// Build the Hamiltonian of `spec` (see [`crate::model::ChainSpec`] for the
/// sign convention; Δ = -1 reinforces the ferromagnetic order).
pub fn build_hamiltonian(spec: &ChainSpec) -> Result<SparseHamiltonian> {
    build_hamiltonian_with_cap(spec, MAX_SITES)
}

pub fn build_hamiltonian_with_cap(spec: &ChainSpec, cap: usize) -> Result<SparseHamiltonian> {
    let n = spec.n;
    if n > cap {
        return Err(Error::Resource(format!(
            "N = {n} exceeds the spin-basis cap of {cap} sites"
        )));
    }
    let dim = 1usize << n;
    let periodic = spec.boundary == Boundary::Periodic;
    let mut diag = vec![0.0; dim];
    for (s, d) in diag.iter_mut().enumerate() {
        let mut acc = 0.0;
        let nn_bonds = if periodic { n } else { n - 1 };
        for r in 0..nn_bonds {
            acc += -spec.j * zval(s, r) * zval(s, (r + 1) % n);
        }
        if spec.delta != 0.0 {
            let nnn_bonds = if periodic { n } else { n - 2 };
            for r in 0..nnn_bonds {
                acc += spec.delta * zval(s, r) * zval(s, (r + 2) % n);
            }
        }
        *d = acc;
    }
    Ok(SparseHamiltonian { n, dim, diag, h_field: spec.h })
}

impl SparseHamiltonian {
    /// y = H x.
    pub fn matvec(&self, x: &[Complex64], y: &mut [Complex64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(y.len(), self.dim);
        let h = self.h_field;
        for s in 0..self.dim {
            let mut acc = x[s] * self.diag[s];
            if h != 0.0 {
                let mut flip = Complex64::new(0.0, 0.0);
                for b in 0..self.n {
                    flip += x[s ^ (1 << b)];
                }
                acc += flip * h;
            }
            y[s] = acc;
        }
    }

    /// ⟨x|H|x⟩ (real for Hermitian H).
    pub fn expectation(&self, x: &[Complex64]) -> f64 {
        let mut y = vec![Complex64::new(0.0, 0.0); self.dim];
        self.matvec(x, &mut y);
        x.iter().zip(y.iter()).map(|(a, b)| (a.conj() * b).re).sum()
    }

    /// Dense symmetric matrix form; only sensible for small N.
    pub fn to_dense(&self) -> ndarray::Array2<f64> {
        let mut m = ndarray::Array2::zeros((self.dim, self.dim));
        for s in 0..self.dim {
            m[(s, s)] = self.diag[s];
            for b in 0..self.n {
                m[(s ^ (1 << b), s)] += self.h_field;
            }
        }
        m
    }
}

/// Normalized many-body state over the σ^z product basis.
#[derive(Debug, Clone)]
pub struct StateVector {
    pub amps: Vec<Complex64>,
}

impl StateVector {
    pub fn polarized(n: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        Self { amps }
    }

    /// (|↑↑…↑⟩ + |↓↓…↓⟩)/√2 — the even-parity combination that the
    /// free-fermion vacuum at h_i = 0 actually is.
    pub fn even_cat(n: usize) -> Self {
        let dim = 1usize << n;
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        let a = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        amps[0] = a;
        amps[dim - 1] = a;
        Self { amps }
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            for a in &mut self.amps {
                *a /= n;
            }
        }
    }

    /// ⟨σ^z_i⟩.
    pub fn magnetization(&self, site: usize) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .map(|(s, a)| a.norm_sqr() * zval(s, site))
            .sum()
    }

    /// ⟨σ^z_i σ^z_j⟩.
    pub fn zz(&self, i: usize, j: usize) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .map(|(s, a)| a.norm_sqr() * zval(s, i) * zval(s, j))
            .sum()
    }

    /// ⟨Π_r σ^x_r⟩ — the global spin-flip parity.
    pub fn parity(&self) -> f64 {
        let mask = self.amps.len() - 1;
        self.amps
            .iter()
            .enumerate()
            .map(|(s, a)| (a.conj() * self.amps[s ^ mask]).re)
            .sum()
    }
}

/// Binder cumulant U = (3/2)(1 - ⟨S_z⁴⟩ / 3⟨S_z²⟩²) of the total
/// magnetization, computed from exact diagonal moments.
pub fn binder_cumulant(state: &StateVector) -> Result<f64> {
    let dim = state.amps.len();
    let n = dim.trailing_zeros() as usize;
    let mut s2 = 0.0;
    let mut s4 = 0.0;
    for (s, a) in state.amps.iter().enumerate() {
        let w = a.norm_sqr();
        let m = (n as f64) - 2.0 * (s.count_ones() as f64);
        let m2 = m * m;
        s2 += w * m2;
        s4 += w * m2 * m2;
    }
    if s2 <= 1e-300 {
        return Err(Error::Domain("⟨S_z²⟩ vanishes; Binder cumulant undefined".into()));
    }
    Ok(1.5 * (1.0 - s4 / (3.0 * s2 * s2)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Boundary;
    use approx::assert_relative_eq;
    use ndarray_linalg::Eigh;

    #[test]
    fn two_site_spectrum() {
        // open N=2 chain is below the N>=4 floor of ChainSpec, so build the
        // Hamiltonian pieces directly: eigenvalues of -J σ^z σ^z are ±J
        // (each twice).
        let ham = SparseHamiltonian {
            n: 2,
            dim: 4,
            diag: vec![-1.0, 1.0, 1.0, -1.0],
            h_field: 0.0,
        };
        let (ev, _) = ham.to_dense().eigh(ndarray_linalg::UPLO::Lower).unwrap();
        let mut ev = ev.to_vec();
        ev.sort_by(f64::total_cmp);
        assert_relative_eq!(ev[0], -1.0);
        assert_relative_eq!(ev[1], -1.0);
        assert_relative_eq!(ev[2], 1.0);
        assert_relative_eq!(ev[3], 1.0);
    }

    #[test]
    fn classical_ground_energy() {
        // N=4, h=0, Δ=0, open: 3 satisfied bonds
        let spec = ChainSpec::new(4, Boundary::Open, 1.0, 0.0, 0.0).unwrap();
        let ham = build_hamiltonian(&spec).unwrap();
        let e0 = ham.diag.iter().copied().fold(f64::INFINITY, f64::min);
        assert_relative_eq!(e0, -3.0);
    }

    #[test]
    fn hermitian_under_random_vectors() {
        let spec = ChainSpec::new(8, Boundary::Periodic, 1.0, -1.0, 0.9).unwrap();
        let ham = build_hamiltonian(&spec).unwrap();
        let dim = ham.dim;
        let x: Vec<Complex64> = (0..dim)
            .map(|k| Complex64::new((k as f64 * 0.37).sin(), (k as f64 * 0.11).cos()))
            .collect();
        let y: Vec<Complex64> = (0..dim)
            .map(|k| Complex64::new((k as f64 * 0.73).cos(), (k as f64 * 0.59).sin()))
            .collect();
        let mut hx = vec![Complex64::new(0.0, 0.0); dim];
        let mut hy = vec![Complex64::new(0.0, 0.0); dim];
        ham.matvec(&x, &mut hx);
        ham.matvec(&y, &mut hy);
        let a: Complex64 = x.iter().zip(hy.iter()).map(|(p, q)| p.conj() * q).sum();
        let b: Complex64 = hx.iter().zip(y.iter()).map(|(p, q)| p.conj() * q).sum();
        assert_relative_eq!(a.re, b.re, max_relative = 1e-12);
        assert_relative_eq!(a.im, b.im, max_relative = 1e-12);
    }

    #[test]
    fn over_cap_rejected() {
        let spec = ChainSpec::new(22, Boundary::Open, 1.0, 0.0, 1.0).unwrap();
        assert!(matches!(build_hamiltonian(&spec), Err(Error::Resource(_))));
    }

    #[test]
    fn binder_ghz_is_one() {
        let state = StateVector::even_cat(8);
        assert_relative_eq!(binder_cumulant(&state).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn binder_x_polarized_is_one_over_n() {
        // |→…→⟩: uniform amplitudes over the z basis; ⟨S_z²⟩ = N,
        // ⟨S_z⁴⟩ = 3N² - 2N from binomial moments.
        for n in [6usize, 10] {
            let dim = 1usize << n;
            let amp = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
            let state = StateVector { amps: vec![amp; dim] };
            assert_relative_eq!(
                binder_cumulant(&state).unwrap(),
                1.0 / n as f64,
                max_relative = 1e-10
            );
        }
    }

    #[test]
    fn binder_rejects_zero_moment() {
        // equal-weight two-state superposition with S_z = 0 everywhere:
        // N=4 states ↑↑↓↓ and ↓↓↑↑
        let mut amps = vec![Complex64::new(0.0, 0.0); 16];
        amps[0b0011] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        amps[0b1100] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let state = StateVector { amps };
        assert!(matches!(binder_cumulant(&state), Err(Error::Domain(_))));
    }
}
