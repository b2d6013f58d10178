//! Measured constants of the cutoff functions under rescaling sweeps.

use serde::Serialize;

use crate::cutoffs::{verify_spatial, verify_temporal, SpatialCutoff, TemporalCutoff};
use crate::error::Result;

/// Samples per cutoff measurement.
pub const CUTOFF_POINTS: usize = 100_000;

/// Allowed relative spread of a constant across a sweep.
pub const CUTOFF_SPREAD: f64 = 0.02;

#[derive(Debug, Clone, Serialize)]
pub struct CutoffReport {
    pub theta: f64,
    /// `(R, ρ, C)` per spatial sweep point.
    pub spatial: Vec<[f64; 3]>,
    /// `(T, δ, C)` per temporal sweep point.
    pub temporal: Vec<[f64; 3]>,
    pub spatial_spread: f64,
    pub temporal_spread: f64,
    pub well_formed: bool,
    pub pass: bool,
}

fn spread(cs: &[f64]) -> f64 {
    let lo = cs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = cs.iter().copied().fold(0.0, f64::max);
    if lo > 0.0 && hi.is_finite() {
        hi / lo - 1.0
    } else {
        f64::INFINITY
    }
}

/// Measures the spatial constant over `(R, ρ) = (s R0, s ρ0)` and the temporal
/// one over `(T, δ) = (s T0, s δ0)` for each scale `s`.
pub fn check_cutoffs(
    theta: f64,
    base: (f64, f64, f64, f64),
    scales: &[f64],
) -> Result<CutoffReport> {
    let (r0, rho0, t0_span, delta0) = base;
    let mut spatial = Vec::new();
    let mut temporal = Vec::new();
    let mut well_formed = true;
    for &s in scales {
        let sc = SpatialCutoff::new(s * r0, s * rho0, theta)?;
        let m = verify_spatial(&sc, CUTOFF_POINTS);
        well_formed &= m.well_formed();
        spatial.push([s * r0, s * rho0, m.constant]);
        let tc = TemporalCutoff::new(0.0, s * t0_span, s * delta0, theta)?;
        let m = verify_temporal(&tc, CUTOFF_POINTS);
        well_formed &= m.well_formed();
        temporal.push([s * t0_span, s * delta0, m.constant]);
    }
    let spatial_spread = spread(&spatial.iter().map(|p| p[2]).collect::<Vec<_>>());
    let temporal_spread = spread(&temporal.iter().map(|p| p[2]).collect::<Vec<_>>());
    Ok(CutoffReport {
        theta,
        pass: well_formed && spatial_spread <= CUTOFF_SPREAD && temporal_spread <= CUTOFF_SPREAD,
        spatial,
        temporal,
        spatial_spread,
        temporal_spread,
        well_formed,
    })
}
