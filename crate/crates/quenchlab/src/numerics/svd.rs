use crate::error::{Error, Result};
use crate::numerics::matrix::{RealMatrix, SVDResult};
use ndarray_linalg::SVD;

/// Full SVD of a square real matrix with a deterministic sign gauge: in each
/// left-vector column the first component of largest magnitude is made
/// positive and the right vector's sign is slaved to it, so repeated calls on
/// the same input are bit-identical.
pub fn svd(m: &RealMatrix) -> Result<SVDResult> {
    if !m.is_square() {
        return Err(Error::Shape(format!(
            "svd expects a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let (u, s, vt) = m
        .array()
        .svd(true, true)
        .map_err(|e| Error::Accuracy(format!("SVD failed: {e}")))?;
    let mut u = u.expect("requested U");
    let vt = vt.expect("requested VT");
    let mut v = vt.t().to_owned(); // columns are right singular vectors

    let n = m.rows();
    for k in 0..n {
        let col = u.column(k);
        let mut idx = 0;
        let mut best = -1.0;
        for (i, &x) in col.iter().enumerate() {
            if x.abs() > best {
                best = x.abs();
                idx = i;
            }
        }
        if u[(idx, k)] < 0.0 {
            u.column_mut(k).mapv_inplace(|x| -x);
            v.column_mut(k).mapv_inplace(|x| -x);
        }
    }

    Ok(SVDResult {
        singular_values: s.to_vec(),
        left_vectors: u,
        right_vectors: v,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use ndarray::{array, Array2};

    #[test]
    fn identity_singular_values() {
        let m = RealMatrix::new(Array2::eye(3)).unwrap();
        let r = svd(&m).unwrap();
        for &s in &r.singular_values {
            assert_relative_eq!(s, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn diagonal_case() {
        let m = RealMatrix::new(array![[3.0, 0.0], [0.0, -2.0]]).unwrap();
        let r = svd(&m).unwrap();
        assert_relative_eq!(r.singular_values[0], 3.0, epsilon = 1e-12);
        assert_relative_eq!(r.singular_values[1], 2.0, epsilon = 1e-12);
    }

    #[test]
    fn rejects_non_square() {
        let m = RealMatrix::from_fn(2, 3, |_, _| 1.0).unwrap();
        assert!(matches!(svd(&m), Err(Error::Shape(_))));
    }

    #[test]
    fn reconstruction_and_orthonormality() {
        let m = RealMatrix::from_fn(8, 8, |i, j| {
            ((i * 13 + j * 7) as f64 * 0.37).sin() + if i == j { 2.0 } else { 0.0 }
        })
        .unwrap();
        let r = svd(&m).unwrap();
        let norm = m.array().iter().map(|x| x * x).sum::<f64>().sqrt();
        let err = (&r.reconstruct() - m.array())
            .iter()
            .map(|x| x * x)
            .sum::<f64>()
            .sqrt();
        assert!(err <= 1e-10 * norm, "reconstruction error {err}");

        let utu = r.left_vectors.t().dot(&r.left_vectors);
        let vtv = r.right_vectors.t().dot(&r.right_vectors);
        for i in 0..8 {
            for j in 0..8 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((utu[(i, j)] - e).abs() < 1e-10);
                assert!((vtv[(i, j)] - e).abs() < 1e-10);
            }
        }
        // nonincreasing
        for w in r.singular_values.windows(2) {
            assert!(w[0] >= w[1]);
        }
    }

    #[test]
    fn deterministic_gauge() {
        let m = RealMatrix::from_fn(6, 6, |i, j| ((i + 2 * j) as f64 * 0.91).cos()).unwrap();
        let a = svd(&m).unwrap();
        let b = svd(&m).unwrap();
        assert_eq!(a.left_vectors, b.left_vectors);
        assert_eq!(a.right_vectors, b.right_vectors);
        assert_eq!(a.singular_values, b.singular_values);
        // gauge: largest-magnitude component of each left column is positive
        for k in 0..6 {
            let col = a.left_vectors.column(k);
            let mut idx = 0;
            let mut best = -1.0;
            for (i, &x) in col.iter().enumerate() {
                if x.abs() > best {
                    best = x.abs();
                    idx = i;
                }
            }
            assert!(col[idx] > 0.0);
        }
    }
}
