use crate::error::{Error, Result};
use crate::model::TimeSeries;
use num_complex::Complex64;
use rustfft::FftPlanner;

/// Angular frequency of the largest nonzero spectral peak of the detrended
/// signal. Intended only to seed oscillatory fits; resolution is one
/// frequency bin 2π/(n·dt). A flat signal returns 0.
pub fn dominant_angular_frequency(dt: f64, values: &[f64]) -> Result<f64> {
    let n = values.len();
    if n < 8 {
        return Err(Error::Domain(format!(
            "dominant frequency needs at least 8 samples, got {n}"
        )));
    }
    if !(dt > 0.0) {
        return Err(Error::Domain("dt must be positive".into()));
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let mut buf: Vec<Complex64> = values
        .iter()
        .map(|&v| Complex64::new(v - mean, 0.0))
        .collect();
    let scale: f64 = buf.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale <= 1e-14 {
        return Ok(0.0); // no peak
    }
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let half = n / 2;
    let mut kbest = 1;
    let mut best = 0.0;
    for (k, z) in buf.iter().enumerate().take(half + 1).skip(1) {
        let a = z.norm();
        if a > best {
            best = a;
            kbest = k;
        }
    }
    Ok(2.0 * std::f64::consts::PI * kbest as f64 / (n as f64 * dt))
}

/// [`dominant_angular_frequency`] on a sampled series; rejects non-uniform
/// grids.
pub fn dominant_frequency(series: &TimeSeries) -> Result<f64> {
    let times = &series.times;
    if times.len() < 2 {
        return Err(Error::Domain("series too short".into()));
    }
    let dt = times[1] - times[0];
    for w in times.windows(2) {
        if ((w[1] - w[0]) - dt).abs() > 1e-9 * dt.max(1e-300) {
            return Err(Error::Domain("series grid is not uniform".into()));
        }
    }
    dominant_angular_frequency(dt, &series.values)
}
