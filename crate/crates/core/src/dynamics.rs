//! Orbit distance series and distributional functions.
//!
//! For a pair `(x, y)` the distance at step `i` is `‖Tⁱx - Tⁱy‖ = ‖Tⁱ(x-y)‖`,
//! so a pair reduces to a single orbit. Limits (`liminf`, `limsup`) cannot be
//! computed from a finite series; every estimate below is a tail-window
//! min/max and is labelled as such.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::numlin::SparseVector;
use crate::operators::{orbit_norms, OperatorDescription};

/// `d_0, …, d_N` with `d_i = ‖Tⁱ(x - y)‖`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceSeries {
    pub values: Vec<f64>,
    pub source: String,
}

impl DistanceSeries {
    /// Wraps a precomputed series; values must be finite and nonnegative.
    pub fn from_values(values: Vec<f64>, source: impl Into<String>) -> Result<Self> {
        if values.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
            return Err(Error::NonFinite("distance series"));
        }
        Ok(Self { values, source: source.into() })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Second half of the series, `d_{⌊len/2⌋}, …`.
    pub fn tail(&self) -> &[f64] {
        &self.values[self.values.len() / 2..]
    }
}

pub fn distance_series(
    op: &OperatorDescription,
    x: &SparseVector,
    y: &SparseVector,
    steps: usize,
) -> Result<DistanceSeries> {
    let z = x.sub(y);
    if z.is_zero() {
        return Err(Error::DegeneratePair);
    }
    let values = orbit_norms(op, &z, steps)?;
    Ok(DistanceSeries { values, source: String::from("orbit of x - y") })
}

/// `F^n(τ) = #{0 ≤ i < n : d_i < τ} / n`, strict inequality.
pub fn dist_fn(series: &DistanceSeries, n: usize, tau: f64) -> Result<f64> {
    if n == 0 {
        return Err(invalid("n", "must be positive"));
    }
    if n > series.len() {
        return Err(Error::SeriesTooShort { n, len: series.len() });
    }
    let count = series.values[..n].iter().filter(|&&d| d < tau).count();
    Ok(count as f64 / n as f64)
}

/// `F^n(τ)` over a τ-grid and an n-schedule, with windowed bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionProfile {
    pub tau_grid: Vec<f64>,
    pub n_schedule: Vec<usize>,
    /// `f_values[s][t] = F^{n_schedule[s]}(tau_grid[t])`.
    pub f_values: Vec<Vec<f64>>,
    /// Min over the tail window of the schedule, per τ.
    pub f_lower_est: Vec<f64>,
    /// Max over the tail window of the schedule, per τ.
    pub f_upper_est: Vec<f64>,
    /// Min of `d_i` over the second half of the series.
    pub liminf_orbit_norm_est: f64,
    /// Schedule entries `n ≥ n_max/2` used for the bounds.
    pub window: Vec<usize>,
}

/// Geometric grid of `points` values from `lo` to `hi` inclusive.
pub fn geometric_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => alloc::vec![lo],
        _ => {
            let ratio = libm::log(hi / lo) / (points - 1) as f64;
            (0..points).map(|k| if k + 1 == points { hi } else { lo * libm::exp(ratio * k as f64) }).collect()
        }
    }
}

/// 13 points from `1e-4` to `1e2`.
pub fn default_tau_grid() -> Vec<f64> {
    (0..13).map(|k| libm::pow(10.0, -4.0 + 0.5 * k as f64)).collect()
}

/// `8, 16, 32, …` up to `n_max`, always ending at `n_max`.
pub fn default_n_schedule(n_max: usize) -> Vec<usize> {
    if n_max == 0 {
        return Vec::new();
    }
    let mut schedule = Vec::new();
    let mut n = 8;
    while n < n_max {
        schedule.push(n);
        n *= 2;
    }
    schedule.push(n_max);
    schedule
}

pub fn distribution_profile(
    series: &DistanceSeries,
    tau_grid: &[f64],
    n_schedule: &[usize],
) -> Result<DistributionProfile> {
    if tau_grid.is_empty() {
        return Err(invalid("tau_grid", "must not be empty"));
    }
    if n_schedule.is_empty() {
        return Err(invalid("n_schedule", "must not be empty"));
    }
    if tau_grid.iter().any(|t| !(t.is_finite() && *t > 0.0)) || tau_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("tau_grid", "must be positive and strictly increasing"));
    }
    if n_schedule[0] == 0 || n_schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("n_schedule", "must be positive and strictly increasing"));
    }
    let f_values = n_schedule
        .iter()
        .map(|&n| tau_grid.iter().map(|&tau| dist_fn(series, n, tau)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;

    let n_max = *n_schedule.last().expect("non-empty");
    let first = n_schedule.partition_point(|&n| 2 * n < n_max);
    let window = n_schedule[first..].to_vec();
    let rows = &f_values[first..];
    let column = |t: usize| rows.iter().map(move |row| row[t]);
    let f_lower_est = (0..tau_grid.len()).map(|t| column(t).fold(f64::INFINITY, f64::min)).collect();
    let f_upper_est = (0..tau_grid.len()).map(|t| column(t).fold(f64::NEG_INFINITY, f64::max)).collect();
    let liminf_orbit_norm_est = series.tail().iter().copied().fold(f64::INFINITY, f64::min);

    Ok(DistributionProfile {
        tau_grid: tau_grid.to_vec(),
        n_schedule: n_schedule.to_vec(),
        f_values,
        f_lower_est,
        f_upper_est,
        liminf_orbit_norm_est,
        window,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiYorkeEvidence {
    pub pass: bool,
    pub sup_tail: f64,
    pub inf_tail: f64,
}

/// Passes when the tail half reaches above `delta` and dips below `eta`.
pub fn li_yorke_evidence(series: &DistanceSeries, delta: f64, eta: f64) -> Result<LiYorkeEvidence> {
    if !(eta > 0.0 && delta > eta) {
        return Err(invalid("delta", "requires delta > eta > 0"));
    }
    let tail = series.tail();
    if tail.is_empty() {
        return Err(Error::SeriesTooShort { n: 1, len: 0 });
    }
    let sup_tail = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let inf_tail = tail.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(LiYorkeEvidence { pass: sup_tail >= delta && inf_tail <= eta, sup_tail, inf_tail })
}
