use crate::error::{Error, Result};
use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

fn check_dims(rows: usize, cols: usize) -> Result<()> {
    if rows == 0 || cols == 0 {
        return Err(Error::Shape(format!("matrix dimensions must be positive, got {rows}x{cols}")));
    }
    Ok(())
}

/// Dense real matrix with finite entries, row-major indexing (i, j).
#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix {
    data: Array2<f64>,
}

impl RealMatrix {
    pub fn new(data: Array2<f64>) -> Result<Self> {
        let (r, c) = data.dim();
        check_dims(r, c)?;
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("matrix entries must be finite".into()));
        }
        Ok(Self { data })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        Self::new(Array2::from_shape_fn((rows, cols), |(i, j)| f(i, j)))
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn array(&self) -> &Array2<f64> {
        &self.data
    }

    pub fn into_array(self) -> Array2<f64> {
        self.data
    }
}

/// Dense complex matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    data: Array2<Complex64>,
}

impl ComplexMatrix {
    pub fn new(data: Array2<Complex64>) -> Result<Self> {
        let (r, c) = data.dim();
        check_dims(r, c)?;
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Domain("matrix entries must be finite".into()));
        }
        Ok(Self { data })
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        f: impl Fn(usize, usize) -> Complex64,
    ) -> Result<Self> {
        Self::new(Array2::from_shape_fn((rows, cols), |(i, j)| f(i, j)))
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn array(&self) -> &Array2<Complex64> {
        &self.data
    }

    pub fn into_array(self) -> Array2<Complex64> {
        self.data
    }
}

/// Full singular value decomposition `M = U Σ Vᵀ` with a deterministic
/// sign gauge (see [`crate::numerics::svd`]).
#[derive(Debug, Clone)]
pub struct SVDResult {
    /// Nonincreasing, nonnegative.
    pub singular_values: Vec<f64>,
    /// Columns are the left singular vectors u_k.
    pub left_vectors: Array2<f64>,
    /// Columns are the right singular vectors v_k.
    pub right_vectors: Array2<f64>,
}

impl SVDResult {
    /// U Σ Vᵀ, for reconstruction checks.
    pub fn reconstruct(&self) -> Array2<f64> {
        let mut us = self.left_vectors.clone();
        for (k, &s) in self.singular_values.iter().enumerate() {
            us.column_mut(k).mapv_inplace(|x| x * s);
        }
        us.dot(&self.right_vectors.t())
    }
}

/// Fit model identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelId {
    /// C(t) = γ exp(f t)
    Exp,
    /// C(t) = γ cos(ω t) exp(f t)
    OscExp,
    /// C(t) = γ₁ exp(f₁ t) + γ₂ exp(f₂ t) cos(ω t)
    TwoTerm,
    /// f(h_n) = log(γ h_nᵝ exp(-h_n/Λ) + C₀)
    LogRate,
    /// y = γ xᵝ (fitted log-log)
    PowerLaw,
    /// y = a + b x
    Linear,
}

impl ModelId {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelId::Exp => "exp",
            ModelId::OscExp => "osc_exp",
            ModelId::TwoTerm => "two_term",
            ModelId::LogRate => "log_rate",
            ModelId::PowerLaw => "power_law",
            ModelId::Linear => "linear",
        }
    }
}

/// Result of a least-squares fit: parameter vector, 1σ half-widths from the
/// residual-variance-scaled inverse normal matrix, and the fitted window.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitResult {
    pub model_id: ModelId,
    pub params: Vec<f64>,
    pub sigma: Vec<f64>,
    pub residual_rms: f64,
    pub window: (f64, f64),
    pub converged: bool,
}
