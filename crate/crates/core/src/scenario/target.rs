//! Closed-form solution families used to manufacture scenarios.
//!
//! Every family is a profile `P(s, t)` of one spatial variable `s`; derivatives
//! come from forward-mode dual numbers, so no finite differences enter the
//! manufactured source.

use num_dual::{first_derivative, third_derivative, Dual3, DualNum};
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::geometry::{Domain, DomainKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Target {
    /// `u ≡ value`.
    Constant { value: f64 },
    /// `amplitude (4π(t + shift))^{-n/2} exp(-d^2 / (4(t + shift))) + floor`.
    GaussianFloor {
        floor: f64,
        shift: f64,
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// `base + amp e^{-t/scale^2} cos(x/scale - phase)` in the first coordinate.
    Wave {
        base: f64,
        amp: f64,
        #[serde(default = "one")]
        scale: f64,
        #[serde(default)]
        phase: f64,
    },
    /// `base + amp e^{-decay t} ((1 + cos(π d / support)) / 2)^4`, constant for
    /// `d >= support`.
    RadialBump {
        base: f64,
        amp: f64,
        #[serde(default)]
        decay: f64,
        support: f64,
    },
    /// Fast-diffusion Barenblatt profile solving `u_t = Δ u^m` on flat space:
    /// `t^{-α} (c + K d^2 t^{-2β})^{-1/(1-m)}`.
    Barenblatt { m: f64, c: f64 },
}

fn one() -> f64 {
    1.0
}

/// Analytic values of a target at one point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TargetSample {
    pub value: f64,
    pub time_derivative: f64,
    pub grad: [f64; 2],
    pub grad_norm: f64,
    pub laplacian: f64,
    /// Profile derivatives `P_s, P_ss, P_sss`.
    pub profile: [f64; 3],
}

impl Target {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(LabError::Config(format!("target: {msg}")));
        match *self {
            Target::Constant { value } if !(value > 0.0) => bad("constant must be positive"),
            Target::GaussianFloor {
                floor,
                shift,
                amplitude,
            } if !(floor > 0.0 && shift > 0.0 && amplitude >= 0.0) => {
                bad("gaussian_floor needs floor > 0, shift > 0, amplitude >= 0")
            }
            Target::Wave {
                base, amp, scale, ..
            } if !(scale > 0.0 && base - amp.abs() > 0.0) => {
                bad("wave needs scale > 0 and base > |amp|")
            }
            Target::RadialBump {
                base, amp, support, ..
            } if !(support > 0.0 && base > 0.0 && base + amp.min(0.0) > 0.0) => {
                bad("radial_bump needs support > 0 and a positive range")
            }
            Target::Barenblatt { m, c } if !(m > 0.0 && m < 1.0 && c > 0.0) => {
                bad("barenblatt needs 0 < m < 1 and c > 0")
            }
            _ => Ok(()),
        }
    }

    /// True for families that depend on the distance to the centre.
    pub fn is_radial(&self) -> bool {
        !matches!(self, Target::Wave { .. })
    }

    /// The profile `P(s, t)` on any dual number type.
    pub fn profile<D: DualNum<Primitive = f64> + Copy>(&self, n: usize, s: D, t: D) -> D {
        match *self {
            Target::Constant { value } => D::from(value),
            Target::GaussianFloor {
                floor,
                shift,
                amplitude,
            } => {
                let tau = t + shift;
                let norm = (tau * (4.0 * std::f64::consts::PI)).powf(-(n as f64) / 2.0);
                norm * (-(s * s) / (tau * 4.0)).exp() * amplitude + floor
            }
            Target::Wave {
                base,
                amp,
                scale,
                phase,
            } => (-t / (scale * scale)).exp() * (s / scale - phase).cos() * amp + base,
            Target::RadialBump {
                base,
                amp,
                decay,
                support,
            } => {
                if s.re().abs() >= support {
                    return D::from(base);
                }
                let bell = ((s * (std::f64::consts::PI / support)).cos() + 1.0) * 0.5;
                (-t * decay).exp() * bell.powi(4) * amp + base
            }
            Target::Barenblatt { m, c } => {
                let nf = n as f64;
                let alpha = nf / (nf * (m - 1.0) + 2.0);
                let beta = alpha / nf;
                let k = (1.0 - m) * beta / (2.0 * m);
                let inner = s * s * t.powf(-2.0 * beta) * k + c;
                t.powf(-alpha) * inner.powf(-1.0 / (1.0 - m))
            }
        }
    }

    /// Profile variable of a node: the first coordinate for waves, otherwise
    /// the signed (segment) or plain distance to the centre.
    pub fn profile_variable(&self, dom: &Domain, coords: [f64; 2]) -> f64 {
        match dom.kind() {
            DomainKind::Radial => coords[0],
            DomainKind::Segment if self.is_radial() => coords[0] - dom.center()[0],
            DomainKind::Segment => coords[0],
            DomainKind::Cartesian2d if self.is_radial() => dom.geodesic_distance(coords),
            DomainKind::Cartesian2d => coords[0],
        }
    }

    pub fn value(&self, dom: &Domain, coords: [f64; 2], t: f64) -> f64 {
        self.profile(dom.n(), self.profile_variable(dom, coords), t)
    }

    /// `(P, P_s, P_ss, P_sss)` at `(s, t)`.
    pub fn profile_derivatives(&self, n: usize, s: f64, t: f64) -> (f64, f64, f64, f64) {
        third_derivative(|x: Dual3<f64>| self.profile(n, x, Dual3::from(t)), s)
    }

    /// Analytic value, time derivative, gradient and Laplacian at a node.
    pub fn sample(&self, dom: &Domain, coords: [f64; 2], t: f64) -> TargetSample {
        let n = dom.n();
        let s = self.profile_variable(dom, coords);
        let (value, p1, p2, p3) = self.profile_derivatives(n, s, t);
        let (_, ut) = first_derivative(|tt| self.profile(n, num_dual::Dual64::from(s), tt), t);
        let mut out = TargetSample {
            value,
            time_derivative: ut,
            profile: [p1, p2, p3],
            ..TargetSample::default()
        };
        let (grad, lap) = profile_to_space(dom, coords, s, self.is_radial(), p1, p2);
        out.grad = grad;
        out.grad_norm = grad[0].hypot(grad[1]);
        out.laplacian = lap;
        out
    }
}

/// Gradient (frame components) and Laplacian of `P(s)` placed on the domain.
pub fn profile_to_space(
    dom: &Domain,
    coords: [f64; 2],
    s: f64,
    radial_profile: bool,
    p1: f64,
    p2: f64,
) -> ([f64; 2], f64) {
    let n = dom.n() as f64;
    match dom.kind() {
        DomainKind::Segment => ([p1, 0.0], p2),
        DomainKind::Radial => {
            if s == 0.0 {
                ([0.0, 0.0], n * p2)
            } else {
                ([p1, 0.0], p2 + (n - 1.0) * dom.metric_ratio(s) * p1)
            }
        }
        DomainKind::Cartesian2d if radial_profile => {
            if s == 0.0 {
                ([0.0, 0.0], n * p2)
            } else {
                let c = dom.center();
                let (ex, ey) = ((coords[0] - c[0]) / s, (coords[1] - c[1]) / s);
                ([p1 * ex, p1 * ey], p2 + p1 / s)
            }
        }
        DomainKind::Cartesian2d => ([p1, 0.0], p2),
    }
}
