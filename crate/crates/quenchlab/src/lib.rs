//! quenchlab: quench dynamics of short-range transverse-field Ising chains.
//!
//! Two engines compute the single-site magnetization decay C(t) after a
//! quench from the polarized state: an exact free-fermion/Pfaffian engine
//! for the integrable periodic chain, and a brute-force spin-basis engine
//! for small open or periodic chains with next-nearest-neighbor coupling.
//! The analysis layer extracts decay rates, crossover scaling exponents and
//! the dynamical order-parameter-like quantity; the pipeline layer runs
//! parameter sweeps and writes CSV/JSONL/SVG artifacts.

pub mod analysis;
pub mod edsim;
pub mod error;
pub mod freefermion;
pub mod model;
pub mod numerics;
pub mod pipeline;

pub use error::{Error, Result};
