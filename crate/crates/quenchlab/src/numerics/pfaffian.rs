use crate::error::{Error, Result};
use crate::numerics::det::ln_abs_det;
use crate::numerics::matrix::ComplexMatrix;
use ndarray::Array2;
use num_complex::Complex64;

const ANTISYM_TOL: f64 = 1e-10;

/// |Pf(T)| of an antisymmetric matrix of even dimension, via
/// |Pf(T)| = sqrt(|det(T)|).
///
/// The input is antisymmetrized as (T - Tᵀ)/2 after checking that the
/// symmetric part is below tolerance; the determinant magnitude is
/// accumulated in log space so string correlators deep in an exponential
/// decay do not underflow.
pub fn pfaffian_abs(t: &ComplexMatrix) -> Result<f64> {
    if !t.is_square() {
        return Err(Error::Shape(format!(
            "pfaffian expects a square matrix, got {}x{}",
            t.rows(),
            t.cols()
        )));
    }
    let n = t.rows();
    if n % 2 != 0 {
        return Err(Error::Shape(format!("pfaffian needs even dimension, got {n}")));
    }
    let a = t.array();
    let scale = a.iter().map(|z| z.norm()).fold(1.0f64, f64::max);
    let mut asym: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            asym = asym.max((a[(i, j)] + a[(j, i)]).norm());
        }
    }
    if asym > ANTISYM_TOL * scale {
        return Err(Error::Domain(format!(
            "matrix is not antisymmetric: max|T + Tᵀ| = {asym:.3e} exceeds {ANTISYM_TOL:.0e} * {scale:.3e}"
        )));
    }
    let s: Array2<Complex64> = (a - &a.t()) * Complex64::new(0.5, 0.0);
    match ln_abs_det(&s) {
        Some(ln) => Ok((0.5 * ln).exp()),
        None => Ok(0.0),
    }
}
