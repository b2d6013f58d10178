//! Source terms `H(x, t, u, ∇u, D²u)`.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Source {
    #[default]
    Zero,
    /// `H(x, t)` defined as the residual of a target; stored as a table.
    Manufactured,
    /// `eps |ω|^q`.
    GradientPower { eps: f64, q: f64 },
    /// `coef u^power`.
    Reaction { coef: f64, power: f64 },
}

/// Magnitudes of the partial derivatives of `H` at one point:
/// `∂_u H`, `|∇_x H|`, `|∇_ω H|`, `|D_Ω H|`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SourcePartials {
    pub du: f64,
    pub grad_x: f64,
    pub grad_omega: f64,
    pub d_omega: f64,
}

impl Source {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Source::GradientPower { eps, q } if !(eps >= 0.0 && q > 0.0) => Err(LabError::Config(
                format!("gradient_power needs eps >= 0 and q > 0, got eps = {eps}, q = {q}"),
            )),
            Source::Reaction { coef, power } if !(coef.is_finite() && power.is_finite()) => Err(
                LabError::Config("reaction coefficients must be finite".into()),
            ),
            _ => Ok(()),
        }
    }

    /// True if `H` depends on `∇u`.
    pub fn depends_on_gradient(&self) -> bool {
        matches!(self, Source::GradientPower { .. })
    }

    /// Value of an explicit source at `u` with gradient norm `|ω|`.
    /// Zero for the manufactured kind, whose values live in a table.
    pub fn explicit_value(&self, u: f64, omega_norm: f64) -> f64 {
        match *self {
            Source::GradientPower { eps, q } => eps * omega_norm.powf(q),
            Source::Reaction { coef, power } => coef * u.powf(power),
            Source::Zero | Source::Manufactured => 0.0,
        }
    }

    /// `∇_ω H` at `ω`.
    pub fn grad_omega(&self, omega: &[f64]) -> Result<Vec<f64>> {
        match *self {
            Source::GradientPower { eps, q } => {
                let norm = omega.iter().map(|w| w * w).sum::<f64>().sqrt();
                if norm == 0.0 {
                    return if q > 1.0 {
                        Ok(vec![0.0; omega.len()])
                    } else {
                        Err(LabError::NonDifferentiable(format!(
                            "|ω|^q with q = {q} at ω = 0"
                        )))
                    };
                }
                let scale = eps * q * norm.powf(q - 2.0);
                Ok(omega.iter().map(|w| scale * w).collect())
            }
            _ => Ok(vec![0.0; omega.len()]),
        }
    }

    /// Partials of an explicit source; `grad_x` of manufactured sources is
    /// filled in by the scenario.
    pub fn explicit_partials(&self, u: f64, omega_norm: f64) -> Result<SourcePartials> {
        match *self {
            Source::GradientPower { eps, q } => {
                if omega_norm == 0.0 && q <= 1.0 {
                    return Err(LabError::NonDifferentiable(format!(
                        "|ω|^q with q = {q} at ω = 0"
                    )));
                }
                let grad_omega = if omega_norm == 0.0 {
                    0.0
                } else {
                    eps * q * omega_norm.powf(q - 1.0)
                };
                Ok(SourcePartials {
                    grad_omega,
                    ..SourcePartials::default()
                })
            }
            Source::Reaction { coef, power } => Ok(SourcePartials {
                du: coef * power * u.powf(power - 1.0),
                ..SourcePartials::default()
            }),
            Source::Zero | Source::Manufactured => Ok(SourcePartials::default()),
        }
    }
}
