//! Shared problem-definition types: Hamiltonian parameters, quench protocol,
//! time grids, observable series and lightcone windows.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Chain boundary condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Open,
    Periodic,
}

impl std::fmt::Display for Boundary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Boundary::Open => write!(f, "open"),
            Boundary::Periodic => write!(f, "periodic"),
        }
    }
}

impl std::str::FromStr for Boundary {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "open" | "obc" => Ok(Boundary::Open),
            "periodic" | "pbc" => Ok(Boundary::Periodic),
            other => Err(Error::Config(format!("unknown boundary '{other}'"))),
        }
    }
}

/// Ising chain with nearest- and next-nearest-neighbor couplings and a
/// transverse field:
///
/// `H = -J Σ_r σ^z_r σ^z_{r+1} + Δ Σ_r σ^z_r σ^z_{r+2} + h Σ_r σ^x_r`
///
/// `J > 0` is ferromagnetic; `Δ = -1` strengthens the ferromagnetic order
/// (the nonintegrable chain studied here), `Δ = 0` is the integrable chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    pub n: usize,
    pub boundary: Boundary,
    pub j: f64,
    pub delta: f64,
    pub h: f64,
}

impl ChainSpec {
    pub fn new(n: usize, boundary: Boundary, j: f64, delta: f64, h: f64) -> Result<Self> {
        if n < 4 || n % 2 != 0 {
            return Err(Error::Domain(format!("N must be even and >= 4, got {n}")));
        }
        if !(j > 0.0) {
            return Err(Error::Domain(format!("J must be positive, got {j}")));
        }
        if !delta.is_finite() || !h.is_finite() {
            return Err(Error::Domain("couplings must be finite".into()));
        }
        Ok(Self { n, boundary, j, delta, h })
    }

    /// Integrable chain (Δ = 0) with unit coupling.
    pub fn integrable(n: usize, boundary: Boundary, h: f64) -> Result<Self> {
        Self::new(n, boundary, 1.0, 0.0, h)
    }

    /// Same chain at a different transverse field.
    pub fn with_h(&self, h: f64) -> Self {
        Self { h, ..*self }
    }
}

/// Uniform time grid in units of 1/J.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t0: f64,
    pub t1: f64,
    pub dt: f64,
}

impl TimeGrid {
    pub fn new(t0: f64, t1: f64, dt: f64) -> Result<Self> {
        if !(t0 >= 0.0) || !(t1 > t0) || !(dt > 0.0) {
            return Err(Error::Domain(format!(
                "time grid needs 0 <= t0 < t1 and dt > 0, got t0={t0}, t1={t1}, dt={dt}"
            )));
        }
        Ok(Self { t0, t1, dt })
    }

    /// Grid from 0 to `t1` with step `dt`.
    pub fn to_time(t1: f64, dt: f64) -> Result<Self> {
        Self::new(0.0, t1, dt)
    }

    pub fn len(&self) -> usize {
        ((self.t1 - self.t0) / self.dt + 1.0 + 1e-9).floor() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.t0 + k as f64 * self.dt).collect()
    }
}

/// Sudden quench from the polarized state |↑↑…↑⟩ (initial field fixed to 0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuenchSpec {
    /// Chain evolved after the quench; `chain.h` is the final field.
    pub chain: ChainSpec,
    /// Initial transverse field; the protocol pins this at 0.
    pub h_i: f64,
    /// Measured site (0-indexed).
    pub site: usize,
    pub tgrid: TimeGrid,
}

impl QuenchSpec {
    pub fn new(chain: ChainSpec, site: usize, tgrid: TimeGrid) -> Result<Self> {
        if site >= chain.n {
            return Err(Error::Domain(format!(
                "site {site} out of range for N={}",
                chain.n
            )));
        }
        Ok(Self { chain, h_i: 0.0, site, tgrid })
    }

    /// Quench measured at the default site N/2.
    pub fn middle(chain: ChainSpec, tgrid: TimeGrid) -> Result<Self> {
        let site = chain.n / 2;
        Self::new(chain, site, tgrid)
    }
}

/// What a time series measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Magnetization,
    Otoc,
    Sop,
}

/// Sampled observable with a trust horizon.
///
/// `valid_to` is the time beyond which values are contaminated by
/// finite-size or cluster-factorization effects and must not be fitted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub valid_to: f64,
    pub label: Label,
}

impl TimeSeries {
    pub fn new(times: Vec<f64>, values: Vec<f64>, valid_to: f64, label: Label) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::Shape(format!(
                "times ({}) and values ({}) differ in length",
                times.len(),
                values.len()
            )));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("times must be strictly increasing".into()));
        }
        let t_end = times.last().copied().unwrap_or(0.0);
        Ok(Self { times, values, valid_to: valid_to.min(t_end), label })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Index of the grid sample nearest to `t`.
    pub fn nearest_index(&self, t: f64) -> usize {
        let mut best = 0;
        let mut dmin = f64::INFINITY;
        for (k, &tk) in self.times.iter().enumerate() {
            let d = (tk - t).abs();
            if d < dmin {
                dmin = d;
                best = k;
            }
        }
        best
    }
}

/// Maximal quasiparticle group velocity `v_q = 2 J min(h, 1)`.
pub fn quasiparticle_velocity(h: f64, j: f64) -> Result<f64> {
    if h < 0.0 {
        return Err(Error::Domain(format!("field must be nonnegative, got {h}")));
    }
    if !(j > 0.0) {
        return Err(Error::Domain(format!("J must be positive, got {j}")));
    }
    Ok(2.0 * j * h.min(1.0))
}

/// Default ultraviolet-cutoff coefficient κ in `t* = κ / v_q`.
pub const DEFAULT_KAPPA: f64 = 5.0;

/// Temporal window inside which finite-size data emulate the thermodynamic
/// limit: `t* < t < τ_s`, with the revival at `τ_r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LightconeWindow {
    /// Ultraviolet cutoff κ / v_q.
    pub t_star: f64,
    /// Separation time N / (2 v_q): excitations reach the chain end.
    pub tau_s: f64,
    /// Revival time N / v_q.
    pub tau_r: f64,
    pub kappa: f64,
    pub v_q: f64,
}

/// Lightcone window for a chain at field `spec.h`.
pub fn lightcone_window(spec: &ChainSpec, kappa: f64) -> Result<LightconeWindow> {
    if !(spec.h > 0.0) {
        return Err(Error::Domain(format!(
            "lightcone window needs h > 0, got h={}",
            spec.h
        )));
    }
    if !(kappa > 0.0) {
        return Err(Error::Domain(format!("kappa must be positive, got {kappa}")));
    }
    let v_q = quasiparticle_velocity(spec.h, spec.j)?;
    let t_star = kappa / v_q;
    let tau_s = spec.n as f64 / (2.0 * v_q);
    let tau_r = spec.n as f64 / v_q;
    if t_star >= tau_s {
        return Err(Error::Domain(format!(
            "empty lightcone window: t* = {t_star} >= tau_s = {tau_s} (kappa too large for N={})",
            spec.n
        )));
    }
    Ok(LightconeWindow { t_star, tau_s, tau_r, kappa, v_q })
}

/// Lightcone window aware of the measured site.
///
/// For an off-center site of an open chain the separation time shortens to
/// `a / v_q` with `a = 2 min(site, N-1-site)`: excitations reach the nearer
/// edge first. The bound never exceeds the bulk value `N / (2 v_q)`.
pub fn lightcone_window_for_site(
    spec: &ChainSpec,
    kappa: f64,
    site: usize,
) -> Result<LightconeWindow> {
    let mut w = lightcone_window(spec, kappa)?;
    if spec.boundary == Boundary::Open {
        let a = 2.0 * site.min(spec.n - 1 - site) as f64;
        let tau_site = a / w.v_q;
        if tau_site < w.tau_s {
            w.tau_s = tau_site;
            if w.t_star >= w.tau_s {
                return Err(Error::Domain(format!(
                    "empty lightcone window: t* = {} >= tau_s = {} at site {site}",
                    w.t_star, w.tau_s
                )));
            }
        }
    }
    Ok(w)
}
