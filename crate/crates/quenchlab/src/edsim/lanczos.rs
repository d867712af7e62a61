use super::{build_hamiltonian, SparseHamiltonian, StateVector};
use crate::error::{Error, Result};
use crate::model::ChainSpec;
use ndarray::Array2;
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MAX_LANCZOS: usize = 500;
const RITZ_TOL: f64 = 1e-12;

/// Two lowest eigenpairs by Lanczos with full reorthogonalization.
///
/// The lowest pair (E₀, gs) comes from a first run; E₁ comes from a second
/// run restricted to the orthogonal complement of gs, which resolves the
/// degenerate ferromagnetic ground space that a single Krylov sequence
/// cannot see.
pub fn ground_state(spec: &ChainSpec) -> Result<(f64, f64, StateVector)> {
    let ham = build_hamiltonian(spec)?;
    let (e0, gs) = lowest_in_complement(&ham, &[], 0x51EE_D0 + spec.n as u64)?;
    let (e1, _) = lowest_in_complement(&ham, &[&gs], 0xBEEF_11 + spec.n as u64)?;
    Ok((e0, e1, StateVector { amps: gs }))
}

fn project_out(v: &mut [Complex64], excluded: &[&Vec<Complex64>]) {
    for ex in excluded {
        let ov: Complex64 = ex.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
        for (vi, ei) in v.iter_mut().zip(ex.iter()) {
            *vi -= ei * ov;
        }
    }
}

fn lowest_in_complement(
    ham: &SparseHamiltonian,
    excluded: &[&Vec<Complex64>],
    seed: u64,
) -> Result<(f64, Vec<Complex64>)> {
    let dim = ham.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, 0.0))
        .collect();
    project_out(&mut v, excluded);
    let nrm = norm(&v);
    if nrm < 1e-14 {
        return Err(Error::Domain("start vector vanishes in the complement".into()));
    }
    for a in v.iter_mut() {
        *a /= nrm;
    }

    let mut basis: Vec<Vec<Complex64>> = vec![v];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut w = vec![Complex64::new(0.0, 0.0); dim];
    let mut last_e0 = f64::INFINITY;
    let mut stable = 0;

    for j in 0..MAX_LANCZOS.min(dim) {
        ham.matvec(&basis[j], &mut w);
        project_out(&mut w, excluded);
        let alpha = basis[j]
            .iter()
            .zip(w.iter())
            .map(|(a, b)| (a.conj() * b).re)
            .sum::<f64>();
        alphas.push(alpha);
        for (wi, vi) in w.iter_mut().zip(basis[j].iter()) {
            *wi -= vi * alpha;
        }
        if j > 0 {
            let b = betas[j - 1];
            for (wi, vi) in w.iter_mut().zip(basis[j - 1].iter()) {
                *wi -= vi * b;
            }
        }
        for vprev in &basis {
            let ov: Complex64 = vprev.iter().zip(w.iter()).map(|(a, b)| a.conj() * b).sum();
            for (wi, vi) in w.iter_mut().zip(vprev.iter()) {
                *wi -= vi * ov;
            }
        }
        let beta = norm(&w);

        // periodic Ritz check
        if j % 5 == 4 || beta < 1e-13 || j + 1 == MAX_LANCZOS.min(dim) {
            let (theta, s) = tridiag_eigh(&alphas, &betas);
            let e0 = theta[0];
            let scale = theta.iter().fold(1.0f64, |m, &x| m.max(x.abs()));
            if (last_e0 - e0).abs() <= RITZ_TOL * scale {
                stable += 1;
            } else {
                stable = 0;
            }
            last_e0 = e0;
            if stable >= 2 || beta < 1e-13 {
                let mut gs = vec![Complex64::new(0.0, 0.0); dim];
                for (k, vk) in basis.iter().enumerate() {
                    let c = s[(k, 0)];
                    for (g, vi) in gs.iter_mut().zip(vk.iter()) {
                        *g += vi * c;
                    }
                }
                let nrm = norm(&gs);
                for a in gs.iter_mut() {
                    *a /= nrm;
                }
                return Ok((e0, gs));
            }
        }
        if beta < 1e-13 {
            break;
        }
        betas.push(beta);
        basis.push(w.iter().map(|a| a / beta).collect());
    }
    Err(Error::NonConvergence(format!(
        "Lanczos did not converge within {MAX_LANCZOS} iterations"
    )))
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

fn tridiag_eigh(alphas: &[f64], betas: &[f64]) -> (Vec<f64>, Array2<f64>) {
    let m = alphas.len();
    let mut t = Array2::zeros((m, m));
    for j in 0..m {
        t[(j, j)] = alphas[j];
        if j + 1 < m && j < betas.len() {
            t[(j, j + 1)] = betas[j];
            t[(j + 1, j)] = betas[j];
        }
    }
    let (ev, s) = t.eigh(UPLO::Lower).expect("tridiagonal eigensolve");
    (ev.to_vec(), s)
}
