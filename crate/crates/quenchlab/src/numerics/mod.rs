//! Dense linear-algebra and optimization kernels shared by the engines and
//! the analysis layer. All functions are pure; no global state.

mod det;
mod freq;
mod lm;
mod matrix;
mod pfaffian;
mod svd;

pub use det::lu_det;
pub use freq::{dominant_angular_frequency, dominant_frequency};
pub use lm::levenberg_marquardt;
pub use matrix::{ComplexMatrix, FitResult, ModelId, RealMatrix, SVDResult};
pub use pfaffian::pfaffian_abs;
pub use svd::svd;
