use crate::error::{Error, Result};
use crate::numerics::matrix::{FitResult, ModelId};
use ndarray::{Array1, Array2};
use ndarray_linalg::Solve;

const LAMBDA_INIT: f64 = 1e-3;
const LAMBDA_FACTOR: f64 = 10.0;
const LAMBDA_MAX: f64 = 1e12;
const REL_COST_TOL: f64 = 1e-12;
const MAX_ITER: usize = 500;
const FD_SCALE: f64 = 1e-6;

/// Levenberg–Marquardt least squares for a scalar model y = model(x, params).
///
/// Hyperparameters are fixed: central finite-difference Jacobian with step
/// 1e-6·max(1, |p|); damping starts at 1e-3, ×10 on a rejected step, ÷10 on
/// an accepted one; stops when the relative cost change drops below 1e-12 or
/// after 500 iterations. `fixed_mask[i] = true` pins parameter i at its
/// initial value. 1σ half-widths come from the diagonal of the
/// residual-variance-scaled inverse normal matrix (zero for pinned
/// parameters).
pub fn levenberg_marquardt(
    model: &dyn Fn(f64, &[f64]) -> f64,
    xs: &[f64],
    ys: &[f64],
    init: &[f64],
    fixed_mask: &[bool],
    model_id: ModelId,
) -> Result<FitResult> {
    if xs.len() != ys.len() {
        return Err(Error::Shape(format!(
            "x ({}) and y ({}) lengths differ",
            xs.len(),
            ys.len()
        )));
    }
    if !fixed_mask.is_empty() && fixed_mask.len() != init.len() {
        return Err(Error::Shape("fixed_mask length must match init".into()));
    }
    if init.iter().any(|p| !p.is_finite()) {
        return Err(Error::Domain("initial parameters must be finite".into()));
    }
    let np = init.len();
    let free: Vec<usize> = (0..np)
        .filter(|&i| fixed_mask.get(i).copied() != Some(true))
        .collect();
    let nf = free.len();
    let n = xs.len();
    if n < nf {
        return Err(Error::Domain(format!(
            "need at least {nf} data points for {nf} free parameters, got {n}"
        )));
    }

    let residuals = |p: &[f64]| -> Result<Array1<f64>> {
        let mut r = Array1::zeros(n);
        for (k, (&x, &y)) in xs.iter().zip(ys.iter()).enumerate() {
            let v = model(x, p);
            if !v.is_finite() {
                return Err(Error::Domain(format!(
                    "model returned a non-finite value at x = {x}"
                )));
            }
            r[k] = v - y;
        }
        Ok(r)
    };

    let jacobian = |p: &[f64]| -> Result<Array2<f64>> {
        let mut j = Array2::zeros((n, nf));
        let mut pp = p.to_vec();
        for (c, &pi) in free.iter().enumerate() {
            let h = FD_SCALE * p[pi].abs().max(1.0);
            pp[pi] = p[pi] + h;
            let rp = residuals(&pp)?;
            pp[pi] = p[pi] - h;
            let rm = residuals(&pp)?;
            pp[pi] = p[pi];
            for k in 0..n {
                j[(k, c)] = (rp[k] - rm[k]) / (2.0 * h);
            }
        }
        Ok(j)
    };

    let mut p = init.to_vec();
    let mut r = residuals(&p)?;
    let mut cost = r.dot(&r);
    let mut lambda = LAMBDA_INIT;
    let mut converged = false;
    let mut singular = false;

    if nf > 0 {
        for _ in 0..MAX_ITER {
            let j = jacobian(&p)?;
            let jt = j.t();
            let h = jt.dot(&j);
            let g = jt.dot(&r);

            // damped normal equations (H + λ diag H) δ = -g
            let mut accepted = false;
            loop {
                let mut hd = h.clone();
                for i in 0..nf {
                    let d = h[(i, i)];
                    hd[(i, i)] = d + lambda * d.max(1e-12);
                }
                let step = match hd.solve(&g.mapv(|x| -x)) {
                    Ok(s) => s,
                    Err(_) => {
                        singular = true;
                        break;
                    }
                };
                let mut trial = p.clone();
                for (c, &pi) in free.iter().enumerate() {
                    trial[pi] += step[c];
                }
                let (rt, ct) = match residuals(&trial) {
                    Ok(rt) => {
                        let ct = rt.dot(&rt);
                        (rt, ct)
                    }
                    Err(e) => return Err(e),
                };
                if ct.is_finite() && ct <= cost {
                    let rel_drop = (cost - ct) / cost.max(f64::MIN_POSITIVE);
                    p = trial;
                    r = rt;
                    cost = ct;
                    lambda = (lambda / LAMBDA_FACTOR).max(1e-15);
                    accepted = true;
                    if rel_drop < REL_COST_TOL {
                        converged = true;
                    }
                    break;
                }
                lambda *= LAMBDA_FACTOR;
                if lambda > LAMBDA_MAX {
                    // no downhill direction left at machine precision
                    converged = true;
                    break;
                }
            }
            if singular || converged || !accepted {
                break;
            }
        }
    } else {
        converged = true;
    }

    // 1σ from s² (JᵀJ)⁻¹ at the solution
    let mut sigma = vec![0.0; np];
    if nf > 0 && !singular {
        if let Ok(j) = jacobian(&p) {
            let h = j.t().dot(&j);
            let dof = (n.saturating_sub(nf)).max(1) as f64;
            let s2 = cost / dof;
            match invert(&h) {
                Some(hinv) => {
                    for (c, &pi) in free.iter().enumerate() {
                        sigma[pi] = (s2 * hinv[(c, c)]).max(0.0).sqrt();
                    }
                }
                None => singular = true,
            }
        }
    }
    if singular {
        converged = false;
    }

    Ok(FitResult {
        model_id,
        params: p,
        sigma,
        residual_rms: (cost / n as f64).sqrt(),
        window: (
            xs.iter().copied().fold(f64::INFINITY, f64::min),
            xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        ),
        converged,
    })
}

fn invert(a: &Array2<f64>) -> Option<Array2<f64>> {
    let n = a.nrows();
    let mut inv = Array2::zeros((n, n));
    for k in 0..n {
        let mut e = Array1::zeros(n);
        e[k] = 1.0;
        match a.solve(&e) {
            Ok(col) => inv.column_mut(k).assign(&col),
            Err(_) => return None,
        }
    }
    Some(inv)
}
