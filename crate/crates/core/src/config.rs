//! JSON run configuration and construction of scenarios from it.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::geometry::{Domain, DomainKind};
use crate::nonlinearity::{admissible_power_range, Family, Nonlinearity};
use crate::scenario::{
    solve_forward, Boundary, Diffusion, Scenario, SolverOptions, Source, Target, Window,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    pub kind: DomainKind,
    #[serde(default = "one_usize")]
    pub n: usize,
    #[serde(rename = "R")]
    pub radius: f64,
    #[serde(default)]
    pub k: f64,
    pub h: f64,
    #[serde(default)]
    pub center: [f64; 2],
}

fn one_usize() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonlinearityConfig {
    #[serde(flatten)]
    pub family: Family,
    #[serde(rename = "M")]
    pub m_bound: f64,
    #[serde(default)]
    pub s0: Option<f64>,
    #[serde(default)]
    pub xi: Option<f64>,
}

impl NonlinearityConfig {
    /// Defaults: `ξ = 1, s0 = M` for the identity, `ξ = 0, s0 = 2^{1/(1-p)}`
    /// for powers. Custom families must state both.
    pub fn build(&self, n: usize) -> Result<Nonlinearity> {
        match &self.family {
            Family::Identity => Nonlinearity::new(
                Family::Identity,
                self.m_bound,
                self.s0.unwrap_or(self.m_bound),
                self.xi.unwrap_or(1.0),
            ),
            Family::Power { p } => {
                let (lo, hi) = admissible_power_range(n);
                if !(*p > lo && *p < hi) {
                    return Err(LabError::Domain(format!(
                        "p = {p} outside the admissible range (1 - 1/sqrt(n), 1] = ({lo:.6}, 1] \
                         for n = {n}; p = 1 is the identity family"
                    )));
                }
                let s0 = self.s0.unwrap_or_else(|| 2f64.powf(1.0 / (1.0 - p)));
                Nonlinearity::power(*p, self.m_bound, s0, self.xi.unwrap_or(0.0))
            }
            Family::Custom { coeffs } => {
                let (Some(s0), Some(xi)) = (self.s0, self.xi) else {
                    return Err(LabError::Config("custom families need s0 and xi".into()));
                };
                Nonlinearity::custom(coeffs.clone(), self.m_bound, s0, xi)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum SolutionConfig {
    /// `H` is defined as the residual of the target.
    Manufactured { target: Target },
    /// The target solves the equation with `H = 0`.
    Analytic { target: Target },
    /// Forward solve from the target's values at the initial time; the
    /// lateral boundary keeps its initial values.
    Solved {
        initial: Target,
        #[serde(default = "default_cfl")]
        cfl: f64,
        #[serde(default)]
        floor: Option<f64>,
    },
}

fn default_cfl() -> f64 {
    0.9
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub domain: DomainConfig,
    pub window: Window,
    /// Time step of sampled targets; solved scenarios pick theirs from the
    /// stability limit.
    #[serde(default)]
    pub dt: Option<f64>,
    pub nonlinearity: NonlinearityConfig,
    #[serde(default)]
    pub a: Diffusion,
    #[serde(rename = "H", default)]
    pub h_source: Source,
    pub solution: SolutionConfig,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        let d = &self.domain;
        Domain::new(d.kind, d.n, d.radius, d.k, d.h, d.center)?;
        Window::new(self.window.t0, self.window.span)?;
        self.nonlinearity.build(d.n)?;
        self.a.validate()?;
        self.h_source.validate()?;
        match &self.solution {
            SolutionConfig::Manufactured { target } | SolutionConfig::Analytic { target } => {
                target.validate()?;
                if !matches!(self.dt, Some(dt) if dt > 0.0) {
                    return Err(LabError::Config("sampled targets need dt > 0".into()));
                }
                if !matches!(self.h_source, Source::Zero) {
                    return Err(LabError::Config(
                        "H is implied by the target; leave it as zero".into(),
                    ));
                }
            }
            SolutionConfig::Solved { initial, cfl, .. } => {
                initial.validate()?;
                if !(*cfl > 0.0 && *cfl < 1.0) {
                    return Err(LabError::Config(format!(
                        "cfl must lie in (0, 1), got {cfl}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Builds the scenario with `h` and `Δt` multiplied by the given factors.
    pub fn build_scaled(&self, h_factor: f64, dt_factor: f64) -> Result<Scenario> {
        let d = &self.domain;
        let domain = Arc::new(Domain::new(
            d.kind,
            d.n,
            d.radius,
            d.k,
            d.h * h_factor,
            d.center,
        )?);
        let nl = self.nonlinearity.build(d.n)?;
        match &self.solution {
            SolutionConfig::Manufactured { target } => Scenario::manufacture(
                domain,
                self.window,
                self.dt.unwrap_or(0.0) * dt_factor,
                target.clone(),
                self.a.clone(),
                nl,
            ),
            SolutionConfig::Analytic { target } => Scenario::analytic(
                domain,
                self.window,
                self.dt.unwrap_or(0.0) * dt_factor,
                target.clone(),
                self.a.clone(),
                nl,
            ),
            SolutionConfig::Solved {
                initial,
                cfl,
                floor,
            } => {
                let dom = domain.clone();
                let start = self.window.start();
                let init = move |c: [f64; 2]| initial.value(&dom, c, start);
                solve_forward(
                    domain,
                    self.window,
                    &init,
                    Boundary::Hold,
                    self.a.clone(),
                    nl,
                    self.h_source.clone(),
                    SolverOptions {
                        cfl: cfl * dt_factor,
                        floor: *floor,
                    },
                )
            }
        }
    }

    pub fn build(&self) -> Result<Scenario> {
        self.build_scaled(1.0, 1.0)
    }

    /// The same family on `B_r` with `T = r²`, `t0 = 0`: spacing scaled by
    /// `r/R`, time step by `(r/R)²`, and wave lengths by `r/R`.
    pub fn with_window_radius(&self, r: f64) -> Self {
        let mut c = self.clone();
        let s = r / self.domain.radius;
        c.domain.radius = r;
        c.domain.h *= s;
        c.window = Window {
            t0: 0.0,
            span: r * r,
        };
        c.dt = c.dt.map(|dt| dt * s * s);
        let stretch = |t: &mut Target| {
            if let Target::Wave { scale, .. } = t {
                *scale *= s;
            }
        };
        match &mut c.solution {
            SolutionConfig::Manufactured { target } | SolutionConfig::Analytic { target } => {
                stretch(target)
            }
            SolutionConfig::Solved { initial, .. } => stretch(initial),
        }
        c
    }
}

/// `C_cal`: a number or `"auto"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Calibration {
    Fixed(f64),
    Auto(AutoTag),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AutoTag {
    Auto,
}

impl Default for Calibration {
    fn default() -> Self {
        Calibration::Auto(AutoTag::Auto)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionConfig {
    /// Width of the lateral ring; defaults to `R/2`.
    #[serde(default)]
    pub rho: Option<f64>,
    /// Length of the early window; defaults to `T/2`.
    #[serde(default)]
    pub delta: Option<f64>,
    #[serde(rename = "C_cal", default)]
    pub c_cal: Calibration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    Hypotheses,
    Lemma21,
    Theorem,
    Corollary,
    Regimes,
    #[serde(rename = "appendixA")]
    AppendixA,
    #[serde(rename = "appendixB")]
    AppendixB,
    Liouville,
    Cutoffs,
}

impl CheckKind {
    pub fn key(&self) -> &'static str {
        match self {
            CheckKind::Hypotheses => "hypotheses",
            CheckKind::Lemma21 => "lemma21",
            CheckKind::Theorem => "theorem",
            CheckKind::Corollary => "corollary",
            CheckKind::Regimes => "regimes",
            CheckKind::AppendixA => "appendixA",
            CheckKind::AppendixB => "appendixB",
            CheckKind::Liouville => "liouville",
            CheckKind::Cutoffs => "cutoffs",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_dir")]
    pub dir: String,
    #[serde(default)]
    pub pernode: bool,
}

fn default_dir() -> String {
    "out".into()
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: default_dir(),
            pernode: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: ScenarioConfig,
    #[serde(default)]
    pub partition: PartitionConfig,
    pub checks: Vec<CheckKind>,
    /// Number of grid levels `h, h/2, ...` for refinement studies.
    #[serde(default = "default_levels")]
    pub refinement_levels: usize,
    /// Base points for the `s0 → ∞` path.
    #[serde(default = "default_s0")]
    pub s0_sweep: Vec<f64>,
    /// Window radii of the decay sweep.
    #[serde(default = "default_radii")]
    pub liouville_radii: Vec<f64>,
    #[serde(default = "default_thetas")]
    pub cutoff_thetas: Vec<f64>,
    #[serde(default = "default_scales")]
    pub cutoff_scales: Vec<f64>,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_levels() -> usize {
    3
}

fn default_s0() -> Vec<f64> {
    vec![16.0, 64.0, 256.0]
}

fn default_radii() -> Vec<f64> {
    vec![1.0, 2.0, 4.0, 8.0]
}

fn default_thetas() -> Vec<f64> {
    vec![0.5, 0.75]
}

fn default_scales() -> Vec<f64> {
    vec![1.0, 2.0, 4.0]
}

impl RunConfig {
    /// Parses JSON; syntax errors carry line and column.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self =
            serde_json::from_str(text).map_err(|e| LabError::Config(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        let radius = self.scenario.domain.radius;
        let span = self.scenario.window.span;
        if let Some(rho) = self.partition.rho {
            if !(rho > 0.0 && rho < radius) {
                return Err(LabError::Domain(format!(
                    "rho = {rho} must lie in (0, {radius})"
                )));
            }
        }
        if let Some(delta) = self.partition.delta {
            if !(delta > 0.0 && delta < span) {
                return Err(LabError::Domain(format!(
                    "delta = {delta} must lie in (0, {span})"
                )));
            }
        }
        if let Calibration::Fixed(c) = self.partition.c_cal {
            if !(c > 0.0 && c.is_finite()) {
                return Err(LabError::Config(format!("C_cal must be positive, got {c}")));
            }
        }
        if self.refinement_levels == 0 {
            return Err(LabError::Config(
                "refinement_levels must be at least 1".into(),
            ));
        }
        if self.cutoff_thetas.iter().any(|t| !(*t > 0.0 && *t < 1.0)) {
            return Err(LabError::Config("cutoff thetas must lie in (0, 1)".into()));
        }
        if self.cutoff_scales.iter().any(|s| !(*s > 0.0))
            || self.liouville_radii.iter().any(|r| !(*r > 0.0))
        {
            return Err(LabError::Config(
                "sweep scales and radii must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn rho(&self) -> f64 {
        self.partition
            .rho
            .unwrap_or(self.scenario.domain.radius / 2.0)
    }

    pub fn delta(&self) -> f64 {
        self.partition
            .delta
            .unwrap_or(self.scenario.window.span / 2.0)
    }

    /// Sets one sweep parameter.
    pub fn with_param(&self, name: &str, value: f64) -> Result<Self> {
        let mut c = self.clone();
        let s = &mut c.scenario;
        match name {
            "R" => s.domain.radius = value,
            "T" => s.window.span = value,
            "rho" => c.partition.rho = Some(value),
            "delta" => c.partition.delta = Some(value),
            "k" => s.domain.k = value,
            "h" => s.domain.h = value,
            "epsilon" => match &mut s.h_source {
                Source::GradientPower { eps, .. } => *eps = value,
                _ => return Err(LabError::Config("epsilon needs a gradient_power H".into())),
            },
            "p" => match &mut s.nonlinearity.family {
                Family::Power { p } => {
                    *p = value;
                    s.nonlinearity.s0 = None;
                }
                _ => return Err(LabError::Config("p needs a power nonlinearity".into())),
            },
            other => {
                return Err(LabError::Config(format!(
                    "unknown sweep parameter {other}; use R, T, rho, delta, epsilon, p, k or h"
                )))
            }
        }
        c.validate()?;
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"{
        "scenario": {
            "domain": {"kind": "segment", "R": 1.0, "h": 0.1},
            "window": {"t0": 1.0, "T": 1.0},
            "dt": 0.1,
            "nonlinearity": {"family": "power", "p": 0.75, "M": 1.0},
            "solution": {"source": "manufactured",
                         "target": {"family": "wave", "base": 0.5, "amp": 0.25}}
        },
        "checks": ["hypotheses", "theorem"]
    }"#;

    #[test]
    fn parses_with_defaults() {
        let cfg = RunConfig::from_json(BASE).unwrap();
        assert_eq!(cfg.partition.c_cal, Calibration::Auto(AutoTag::Auto));
        assert_eq!(cfg.rho(), 0.5);
        assert_eq!(cfg.refinement_levels, 3);
        let nl = cfg.scenario.nonlinearity.build(1).unwrap();
        assert_eq!(nl.s0(), 16.0);
        assert_eq!(nl.xi(), 0.0);
        assert!(cfg.scenario.build().is_ok());
    }

    #[test]
    fn parse_errors_have_positions() {
        let err = RunConfig::from_json("{\n  \"scenario\": 3,\n}").unwrap_err();
        assert!(err.to_string().contains("line"), "{err}");
    }

    #[test]
    fn power_outside_range_cites_it() {
        let text = BASE.replace("\"p\": 0.75", "\"p\": 1.5");
        let err = RunConfig::from_json(&text).unwrap_err();
        assert!(err.to_string().contains("admissible range"), "{err}");
    }

    #[test]
    fn sweep_parameters() {
        let cfg = RunConfig::from_json(BASE).unwrap();
        assert_eq!(cfg.with_param("rho", 0.25).unwrap().rho(), 0.25);
        assert!(cfg.with_param("rho", 1.5).is_err());
        assert!(cfg.with_param("epsilon", 0.1).is_err());
        assert!(cfg.with_param("bogus", 1.0).is_err());
        let wide = cfg.scenario.with_window_radius(4.0);
        assert_eq!(wide.window.span, 16.0);
        assert!((wide.domain.h - 0.4).abs() < 1e-15);
    }
}
