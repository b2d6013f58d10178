//! Diffusion coefficients `a(x, t, u)` with their partial derivatives.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Diffusion {
    Constant {
        #[serde(default = "unit")]
        value: f64,
    },
    /// `1 + 0.5 sin t`, clamped to `[a0, 1/a0]`.
    TimeSine {
        #[serde(default = "half")]
        a0: f64,
    },
    /// `1 + 0.1 tanh u`.
    SolutionTanh,
    /// `1 + amp cos(s)` in the first coordinate (radius on radial domains).
    SpaceCosine { amp: f64 },
}

fn unit() -> f64 {
    1.0
}

fn half() -> f64 {
    0.5
}

impl Default for Diffusion {
    fn default() -> Self {
        Diffusion::Constant { value: 1.0 }
    }
}

impl Diffusion {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Diffusion::Constant { value } if !(value > 0.0 && value.is_finite()) => Err(
                LabError::Config(format!("constant diffusion must be positive, got {value}")),
            ),
            Diffusion::TimeSine { a0 } if !(a0 > 0.0 && a0 <= 0.5) => Err(LabError::Config(
                format!("time_sine needs a0 in (0, 0.5], got {a0}"),
            )),
            Diffusion::SpaceCosine { amp } if !(amp.abs() < 1.0) => Err(LabError::Config(format!(
                "space_cosine needs |amp| < 1, got {amp}"
            ))),
            _ => Ok(()),
        }
    }

    /// Lower bound `a0` with `a ∈ [a0, 1/a0]`.
    pub fn a0(&self) -> f64 {
        match *self {
            Diffusion::Constant { value } => value.min(1.0 / value),
            Diffusion::TimeSine { a0 } => a0,
            Diffusion::SolutionTanh => 0.9,
            Diffusion::SpaceCosine { amp } => (1.0 - amp.abs()).min(1.0 / (1.0 + amp.abs())),
        }
    }

    pub fn eval(&self, coords: [f64; 2], t: f64, u: f64) -> f64 {
        match *self {
            Diffusion::Constant { value } => value,
            Diffusion::TimeSine { a0 } => (1.0 + 0.5 * t.sin()).clamp(a0, 1.0 / a0),
            Diffusion::SolutionTanh => 1.0 + 0.1 * u.tanh(),
            Diffusion::SpaceCosine { amp } => 1.0 + amp * coords[0].cos(),
        }
    }

    /// `∂_u a`.
    pub fn du(&self, _coords: [f64; 2], _t: f64, u: f64) -> f64 {
        match *self {
            Diffusion::SolutionTanh => 0.1 / u.cosh().powi(2),
            _ => 0.0,
        }
    }

    /// `|∇_x a|`.
    pub fn grad_x_norm(&self, coords: [f64; 2], _t: f64, _u: f64) -> f64 {
        match *self {
            Diffusion::SpaceCosine { amp } => (amp * coords[0].sin()).abs(),
            _ => 0.0,
        }
    }

    /// True when `a` depends on `t` alone.
    pub fn is_time_only(&self) -> bool {
        matches!(
            self,
            Diffusion::Constant { .. } | Diffusion::TimeSine { .. }
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stays_in_band() {
        let families = [
            Diffusion::Constant { value: 2.0 },
            Diffusion::TimeSine { a0: 0.5 },
            Diffusion::SolutionTanh,
            Diffusion::SpaceCosine { amp: 0.3 },
        ];
        for a in &families {
            let a0 = a.a0();
            for i in 0..200 {
                let x = -3.0 + 0.03 * i as f64;
                let val = a.eval([x, 0.0], 5.0 * x, 0.01 + (x + 3.0));
                assert!(val >= a0 - 1e-15 && val <= 1.0 / a0 + 1e-15, "{a:?} {val}");
            }
        }
    }

    #[test]
    fn partials_match_differences() {
        let e = 1e-6;
        let a = Diffusion::SolutionTanh;
        let fd = (a.eval([0.0; 2], 0.0, 0.7 + e) - a.eval([0.0; 2], 0.0, 0.7 - e)) / (2.0 * e);
        assert!((a.du([0.0; 2], 0.0, 0.7) - fd).abs() < 1e-9);
        let a = Diffusion::SpaceCosine { amp: 0.2 };
        let fd = (a.eval([0.4 + e, 0.0], 0.0, 1.0) - a.eval([0.4 - e, 0.0], 0.0, 1.0)) / (2.0 * e);
        assert!((a.grad_x_norm([0.4, 0.0], 0.0, 1.0) - fd.abs()).abs() < 1e-9);
    }

    #[test]
    fn invalid_parameters() {
        assert!(Diffusion::TimeSine { a0: 0.8 }.validate().is_err());
        assert!(Diffusion::SpaceCosine { amp: 1.0 }.validate().is_err());
    }
}
