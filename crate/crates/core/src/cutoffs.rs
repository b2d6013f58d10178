//! Spatial and temporal cutoff functions built from a quintic smoothstep
//! raised to a power, and numerical measurement of their derivative bounds.

use crate::error::{LabError, Result};

/// Denominator floor used when forming the defining ratios.
const RATIO_FLOOR: f64 = 1e-300;

/// Offset from a junction, relative to the transition width, used for the
/// continuity check.
const JUNCTION_OFFSET: f64 = 1e-12;

/// `6z^5 - 15z^4 + 10z^3` and its first two derivatives.
pub fn smoothstep(z: f64) -> (f64, f64, f64) {
    let z = z.clamp(0.0, 1.0);
    let s = z * z * z * (10.0 + z * (-15.0 + 6.0 * z));
    let s1 = 30.0 * z * z * (z - 1.0) * (z - 1.0);
    let s2 = 60.0 * z * (2.0 * z - 1.0) * (z - 1.0);
    (s, s1, s2)
}

/// Power `m = ceil(2/(1-θ))` making `S^m` satisfy the fractional bound.
pub fn exponent_for(theta: f64) -> u32 {
    (2.0 / (1.0 - theta) - 1e-12).ceil() as u32
}

/// `S(z)^m` and its derivatives with respect to `z`.
fn powered(z: f64, m: u32) -> (f64, f64, f64) {
    let (s, s1, s2) = smoothstep(z);
    let mf = m as f64;
    let v = s.powi(m as i32);
    let d1 = mf * s.powi(m as i32 - 1) * s1;
    let d2 = mf * (mf - 1.0) * s.powi(m as i32 - 2) * s1 * s1 + mf * s.powi(m as i32 - 1) * s2;
    (v, d1, d2)
}

fn check_theta(theta: f64) -> Result<()> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(LabError::Domain(format!(
            "theta must lie in (0, 1), got {theta}"
        )));
    }
    Ok(())
}

/// `ψ̄(r) = S(clamp((R - r)/ρ, 0, 1))^m`: equal to 1 on `[0, R - ρ]`, 0 from `R` on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialCutoff {
    pub radius: f64,
    pub rho: f64,
    pub theta: f64,
    pub m: u32,
}

impl SpatialCutoff {
    pub fn new(radius: f64, rho: f64, theta: f64) -> Result<Self> {
        check_theta(theta)?;
        if !(rho > 0.0 && rho < radius) {
            return Err(LabError::Domain(format!(
                "rho = {rho} must lie in (0, R) with R = {radius}"
            )));
        }
        Ok(Self {
            radius,
            rho,
            theta,
            m: exponent_for(theta),
        })
    }

    /// `(ψ̄, ψ̄', ψ̄'')` at `r`.
    pub fn eval(&self, r: f64) -> (f64, f64, f64) {
        let z = (self.radius - r) / self.rho;
        if z >= 1.0 {
            return (1.0, 0.0, 0.0);
        }
        if z <= 0.0 {
            return (0.0, 0.0, 0.0);
        }
        let (v, d1, d2) = powered(z, self.m);
        let dz = -1.0 / self.rho;
        (v, d1 * dz, d2 * dz * dz)
    }

    /// `(ρ|ψ̄'| + ρ^2|ψ̄''|) / ψ̄^θ`.
    pub fn ratio(&self, r: f64) -> Option<f64> {
        let (v, d1, d2) = self.eval(r);
        if v < RATIO_FLOOR {
            return None;
        }
        Some((self.rho * d1.abs() + self.rho * self.rho * d2.abs()) / v.powf(self.theta))
    }

    /// Largest jump of `ρψ̄'` and `ρ^2ψ̄''` across the two junctions.
    pub fn junction_jump(&self) -> f64 {
        let e = JUNCTION_OFFSET * self.rho;
        let mut worst: f64 = 0.0;
        for r in [self.radius - self.rho, self.radius] {
            let (_, a1, a2) = self.eval(r - e);
            let (_, b1, b2) = self.eval(r + e);
            worst = worst
                .max(self.rho * (a1 - b1).abs())
                .max(self.rho * self.rho * (a2 - b2).abs());
        }
        worst
    }
}

/// `φ(t) = S(clamp((t - (t0 - T))/δ, 0, 1))^m`: 0 up to `t0 - T`, 1 from
/// `t0 - T + δ` on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemporalCutoff {
    pub t0: f64,
    pub span: f64,
    pub delta: f64,
    pub theta: f64,
    pub m: u32,
}

impl TemporalCutoff {
    pub fn new(t0: f64, span: f64, delta: f64, theta: f64) -> Result<Self> {
        check_theta(theta)?;
        if !(delta > 0.0 && delta < span) {
            return Err(LabError::Domain(format!(
                "delta = {delta} must lie in (0, T) with T = {span}"
            )));
        }
        Ok(Self {
            t0,
            span,
            delta,
            theta,
            m: exponent_for(theta),
        })
    }

    pub fn start(&self) -> f64 {
        self.t0 - self.span
    }

    /// `(φ, φ')` at `t`.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        let z = (t - self.start()) / self.delta;
        if z >= 1.0 {
            return (1.0, 0.0);
        }
        if z <= 0.0 {
            return (0.0, 0.0);
        }
        let (v, d1, _) = powered(z, self.m);
        (v, d1 / self.delta)
    }

    fn second(&self, t: f64) -> f64 {
        let z = (t - self.start()) / self.delta;
        if !(z > 0.0 && z < 1.0) {
            return 0.0;
        }
        powered(z, self.m).2 / (self.delta * self.delta)
    }

    /// `δ|φ'| / φ^{(1+θ)/2}`.
    pub fn ratio(&self, t: f64) -> Option<f64> {
        let (v, d1) = self.eval(t);
        if v < RATIO_FLOOR {
            return None;
        }
        Some(self.delta * d1.abs() / v.powf(0.5 * (1.0 + self.theta)))
    }

    /// Largest jump of `δφ'` and `δ^2φ''` across the two junctions.
    pub fn junction_jump(&self) -> f64 {
        let e = JUNCTION_OFFSET * self.delta;
        let mut worst: f64 = 0.0;
        for t in [self.start(), self.start() + self.delta] {
            let (_, a1) = self.eval(t - e);
            let (_, b1) = self.eval(t + e);
            let (a2, b2) = (self.second(t - e), self.second(t + e));
            worst = worst
                .max(self.delta * (a1 - b1).abs())
                .max(self.delta * self.delta * (a2 - b2).abs());
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffMeasurement {
    /// Sup of the defining ratio over the grid; `+∞` if unbounded.
    pub constant: f64,
    pub junction_jump: f64,
    pub monotone: bool,
}

impl CutoffMeasurement {
    /// C² junctions within `1e-8` and monotone samples.
    pub fn well_formed(&self) -> bool {
        self.junction_jump <= 1e-8 && self.monotone
    }
}

fn measure(
    points: usize,
    lo: f64,
    hi: f64,
    value: impl Fn(f64) -> f64,
    ratio: impl Fn(f64) -> Option<f64>,
    increasing: bool,
    jump: f64,
) -> CutoffMeasurement {
    let mut constant: f64 = 0.0;
    let mut monotone = true;
    let mut prev = value(lo);
    for i in 0..points {
        let x = lo + (hi - lo) * i as f64 / (points - 1) as f64;
        let v = value(x);
        if (increasing && v < prev) || (!increasing && v > prev) {
            monotone = false;
        }
        prev = v;
        if let Some(q) = ratio(x) {
            constant = if q.is_finite() {
                constant.max(q)
            } else {
                f64::INFINITY
            };
        }
    }
    CutoffMeasurement {
        constant,
        junction_jump: jump,
        monotone,
    }
}

/// Sup of `(ρ|ψ̄'| + ρ^2|ψ̄''|)/ψ̄^θ` over `points` samples of `[0, R]`.
pub fn verify_spatial(cut: &SpatialCutoff, points: usize) -> CutoffMeasurement {
    measure(
        points.max(2),
        0.0,
        cut.radius,
        |r| cut.eval(r).0,
        |r| cut.ratio(r),
        false,
        cut.junction_jump(),
    )
}

/// Sup of `δ|φ'|/φ^{(1+θ)/2}` over `points` samples of `[t0 - T, t0]`.
pub fn verify_temporal(cut: &TemporalCutoff, points: usize) -> CutoffMeasurement {
    measure(
        points.max(2),
        cut.start(),
        cut.t0,
        |t| cut.eval(t).0,
        |t| cut.ratio(t),
        true,
        cut.junction_jump(),
    )
}
