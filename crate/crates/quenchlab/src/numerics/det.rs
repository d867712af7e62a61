use crate::error::{Error, Result};
use crate::numerics::matrix::ComplexMatrix;
use ndarray::Array2;
use ndarray_linalg::Determinant;
use num_complex::Complex64;

/// Determinant of a square complex matrix via partially pivoted LU.
/// Singular input yields 0.
pub fn lu_det(m: &ComplexMatrix) -> Result<Complex64> {
    if !m.is_square() {
        return Err(Error::Shape(format!(
            "determinant expects a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(m.array().det().unwrap_or(Complex64::new(0.0, 0.0)))
}

/// ln|det| of a square complex matrix, `None` when the matrix is singular.
/// Used where the determinant itself would under- or overflow.
pub(crate) fn ln_abs_det(a: &Array2<Complex64>) -> Option<f64> {
    match a.sln_det() {
        Ok((sign, ln)) => {
            if sign.norm() == 0.0 {
                None
            } else {
                Some(ln)
            }
        }
        Err(_) => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use ndarray::Array2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Cofactor expansion, exponential cost; oracle for n <= 6.
    fn det_cofactor(a: &Array2<Complex64>) -> Complex64 {
        let n = a.nrows();
        if n == 1 {
            return a[(0, 0)];
        }
        let mut acc = c(0.0, 0.0);
        for j in 0..n {
            let mut minor = Array2::zeros((n - 1, n - 1));
            for r in 1..n {
                let mut cc = 0;
                for col in 0..n {
                    if col == j {
                        continue;
                    }
                    minor[(r - 1, cc)] = a[(r, col)];
                    cc += 1;
                }
            }
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            acc += a[(0, j)] * sign * det_cofactor(&minor);
        }
        acc
    }

    #[test]
    fn identity() {
        let m = ComplexMatrix::new(Array2::eye(4)).unwrap();
        let d = lu_det(&m).unwrap();
        assert_relative_eq!(d.re, 1.0, epsilon = 1e-12);
        assert_relative_eq!(d.im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn diagonal() {
        let m = ComplexMatrix::from_fn(2, 2, |i, j| {
            if i == 0 && j == 0 {
                c(0.0, 2.0)
            } else if i == 1 && j == 1 {
                c(3.0, 0.0)
            } else {
                c(0.0, 0.0)
            }
        })
        .unwrap();
        let d = lu_det(&m).unwrap();
        assert_relative_eq!(d.re, 0.0, epsilon = 1e-12);
        assert_relative_eq!(d.im, 6.0, epsilon = 1e-12);
    }

    #[test]
    fn matches_cofactor_expansion() {
        let m = ComplexMatrix::from_fn(6, 6, |i, j| {
            c(
                ((3 * i + j) as f64 * 0.41).sin(),
                ((i + 5 * j) as f64 * 0.23).cos(),
            )
        })
        .unwrap();
        let d = lu_det(&m).unwrap();
        let oracle = det_cofactor(m.array());
        assert_relative_eq!(d.re, oracle.re, max_relative = 1e-10);
        assert_relative_eq!(d.im, oracle.im, max_relative = 1e-10);
    }

    #[test]
    fn singular_gives_zero() {
        // two identical rows
        let m = ComplexMatrix::from_fn(3, 3, |i, j| {
            let i = if i == 2 { 0 } else { i };
            c((i + j) as f64, 0.0)
        })
        .unwrap();
        let d = lu_det(&m).unwrap();
        assert!(d.norm() < 1e-12);
    }

    #[test]
    fn ln_abs_det_agrees() {
        let m = ComplexMatrix::from_fn(5, 5, |i, j| {
            c(
                ((i * 2 + j) as f64 * 0.3).cos() + if i == j { 1.5 } else { 0.0 },
                ((i + j * 3) as f64 * 0.7).sin(),
            )
        })
        .unwrap();
        let d = lu_det(&m).unwrap();
        let ln = ln_abs_det(m.array()).unwrap();
        assert_relative_eq!(ln, d.norm().ln(), max_relative = 1e-10);
    }
}
