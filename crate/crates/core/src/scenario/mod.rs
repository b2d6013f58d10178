//! Scenarios: a solution `u` on `Q_{R,T}` together with `a`, `F` and `H`.

mod coefficient;
mod solver;
mod source;
mod target;

use std::sync::Arc;

use num_dual::{third_derivative, Dual3};
use serde::{Deserialize, Serialize};

pub use coefficient::Diffusion;
pub use solver::{solve_forward, Boundary, SolverOptions};
pub use source::{Source, SourcePartials};
pub use target::{profile_to_space, Target, TargetSample};

use crate::error::{LabError, Result};
use crate::fields::{Jet, SpaceTimeField};
use crate::geometry::{Domain, DomainKind};
use crate::nonlinearity::{check_hypotheses, HypothesisReport, Nonlinearity, DEFAULT_SAMPLES};

/// Relative step of the fourth-order differences behind `∇_x H`.
const SOURCE_GRADIENT_STEP: f64 = 1e-3;

/// The time window `[t0 - T, t0]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub t0: f64,
    #[serde(rename = "T")]
    pub span: f64,
}

impl Window {
    pub fn new(t0: f64, span: f64) -> Result<Self> {
        if !(span > 0.0 && span.is_finite() && t0.is_finite()) {
            return Err(LabError::Domain(format!(
                "window length must be positive, got {span}"
            )));
        }
        Ok(Self { t0, span })
    }

    pub fn start(&self) -> f64 {
        self.t0 - self.span
    }

    /// Uniform time nodes with step at most `dt`, ending exactly at `t0`.
    pub fn uniform_times(&self, dt: f64) -> Result<Vec<f64>> {
        if !(dt > 0.0) {
            return Err(LabError::Domain(format!(
                "time step must be positive, got {dt}"
            )));
        }
        let steps = ((self.span / dt) - 1e-9).ceil().max(2.0) as usize;
        let step = self.span / steps as f64;
        let start = self.start();
        Ok((0..=steps)
            .map(|j| {
                if j == steps {
                    self.t0
                } else {
                    start + j as f64 * step
                }
            })
            .collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Manufactured,
    Solved,
    Analytic,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub domain: Arc<Domain>,
    pub window: Window,
    pub nl: Nonlinearity,
    pub diffusion: Diffusion,
    pub source: Source,
    pub u: SpaceTimeField,
    pub provenance: Provenance,
    /// `inf u` over the ball.
    pub floor: f64,
    pub target: Option<Target>,
    /// Values of a manufactured `H` at every node and slice.
    pub source_table: Option<SpaceTimeField>,
    /// `|∇_x H|` of a manufactured `H`.
    pub source_grad_table: Option<SpaceTimeField>,
    pub hypotheses: HypothesisReport,
}

/// Checks `u ∈ (0, M]` on every stored node.
fn check_range(u: &SpaceTimeField, m_bound: f64) -> Result<()> {
    let limit = m_bound * (1.0 + 1e-12);
    for (j, slice) in u.slices().iter().enumerate() {
        for (id, &v) in slice.iter().enumerate() {
            if !(v > 0.0 && v <= limit) {
                return Err(LabError::Range {
                    node: id,
                    time: u.times()[j],
                    value: v,
                    bound: m_bound,
                });
            }
        }
    }
    Ok(())
}

/// `u_t - a (F'(u) Δu + F''(u) |∇u|^2)` from analytic target data.
fn manufactured_source(
    target: &Target,
    dom: &Domain,
    nl: &Nonlinearity,
    diffusion: &Diffusion,
    coords: [f64; 2],
    t: f64,
) -> f64 {
    let smp = target.sample(dom, coords, t);
    let u = smp.value;
    let a = diffusion.eval(coords, t, u);
    smp.time_derivative - a * (nl.df(u) * smp.laplacian + nl.d2f(u) * smp.grad_norm.powi(2))
}

/// Fourth-order central difference of `f` with step `e`.
fn diff4(f: impl Fn(f64) -> f64, x: f64, e: f64) -> f64 {
    (f(x - 2.0 * e) - 8.0 * f(x - e) + 8.0 * f(x + e) - f(x + 2.0 * e)) / (12.0 * e)
}

/// `|∇_x H|` of a manufactured source by fourth-order differences of the
/// closed form.
fn manufactured_source_gradient(
    target: &Target,
    dom: &Domain,
    nl: &Nonlinearity,
    diffusion: &Diffusion,
    coords: [f64; 2],
    t: f64,
) -> f64 {
    let e = SOURCE_GRADIENT_STEP * dom.radius();
    let h = |c: [f64; 2]| manufactured_source(target, dom, nl, diffusion, c, t);
    match dom.kind() {
        DomainKind::Segment => diff4(|x| h([x, 0.0]), coords[0], e).abs(),
        // radial sources are even in r
        DomainKind::Radial => diff4(|r| h([r.abs(), 0.0]), coords[0], e).abs(),
        DomainKind::Cartesian2d => {
            let gx = diff4(|x| h([x, coords[1]]), coords[0], e);
            let gy = diff4(|y| h([coords[0], y]), coords[1], e);
            gx.hypot(gy)
        }
    }
}

impl Scenario {
    /// Assembles a scenario around a given solution field.
    pub fn from_field(
        window: Window,
        nl: Nonlinearity,
        diffusion: Diffusion,
        source: Source,
        u: SpaceTimeField,
        provenance: Provenance,
    ) -> Result<Self> {
        diffusion.validate()?;
        source.validate()?;
        check_range(&u, nl.m_bound())?;
        let domain = u.domain().clone();
        let hypotheses = check_hypotheses(&nl, domain.n(), DEFAULT_SAMPLES)?;
        Ok(Self {
            floor: u.inf(),
            domain,
            window,
            nl,
            diffusion,
            source,
            u,
            provenance,
            target: None,
            source_table: None,
            source_grad_table: None,
            hypotheses,
        })
    }

    /// Exact solution by construction: `H := u_t - a Δ(F(u))` for the target.
    pub fn manufacture(
        domain: Arc<Domain>,
        window: Window,
        dt: f64,
        target: Target,
        diffusion: Diffusion,
        nl: Nonlinearity,
    ) -> Result<Self> {
        target.validate()?;
        let times = window.uniform_times(dt)?;
        let dom = domain.clone();
        let u = SpaceTimeField::from_fn(domain.clone(), times.clone(), |c, t| {
            target.value(&dom, c, t)
        })?;
        let table = SpaceTimeField::from_fn(domain.clone(), times.clone(), |c, t| {
            manufactured_source(&target, &dom, &nl, &diffusion, c, t)
        })?;
        let grad_table = SpaceTimeField::from_fn(domain, times, |c, t| {
            manufactured_source_gradient(&target, &dom, &nl, &diffusion, c, t)
        })?;
        let mut sc = Self::from_field(
            window,
            nl,
            diffusion,
            Source::Manufactured,
            u,
            Provenance::Manufactured,
        )?;
        sc.target = Some(target);
        sc.source_table = Some(table);
        sc.source_grad_table = Some(grad_table);
        Ok(sc)
    }

    /// A target that solves the equation with `H = 0` exactly; verified on the
    /// grid before the scenario is accepted.
    pub fn analytic(
        domain: Arc<Domain>,
        window: Window,
        dt: f64,
        target: Target,
        diffusion: Diffusion,
        nl: Nonlinearity,
    ) -> Result<Self> {
        let mut sc = Self::manufacture(domain, window, dt, target, diffusion, nl)?;
        let table = sc.source_table.take().unwrap();
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 1.0;
        for j in 0..table.times().len() {
            for &id in sc.domain.ball() {
                worst = worst.max(table.value(id, j).abs());
                let t = table.times()[j];
                let smp =
                    sc.target
                        .as_ref()
                        .unwrap()
                        .sample(&sc.domain, sc.domain.node(id).coords, t);
                scale = scale.max(smp.time_derivative.abs());
            }
        }
        if worst > 1e-9 * scale {
            return Err(LabError::Config(format!(
                "target does not solve the equation with H = 0 (residual {worst:e})"
            )));
        }
        sc.source = Source::Zero;
        sc.source_grad_table = None;
        sc.provenance = Provenance::Analytic;
        Ok(sc)
    }

    pub fn m_bound(&self) -> f64 {
        self.nl.m_bound()
    }

    /// Fails with the first structural condition on `F` that does not hold.
    pub fn require_hypotheses(&self) -> Result<()> {
        match self.hypotheses.failure() {
            Some(msg) => Err(LabError::Hypothesis(msg)),
            None => Ok(()),
        }
    }

    pub fn coords(&self, id: usize) -> [f64; 2] {
        self.domain.node(id).coords
    }

    pub fn time(&self, j: usize) -> f64 {
        self.u.times()[j]
    }

    /// `a(x, t, u)` at a node.
    pub fn a_at(&self, id: usize, j: usize) -> f64 {
        self.diffusion
            .eval(self.coords(id), self.time(j), self.u.value(id, j))
    }

    /// `H` at a node, given the derivative data of `u` there.
    pub fn source_value(&self, id: usize, j: usize, jet: &Jet) -> f64 {
        match (&self.source, &self.source_table) {
            (Source::Manufactured, Some(table)) => table.value(id, j),
            _ => self.source.explicit_value(jet.value, jet.grad_norm),
        }
    }

    /// Partial derivatives of `H` at a node, given the derivative data of `u`.
    pub fn source_partials(&self, id: usize, j: usize, jet: &Jet) -> Result<SourcePartials> {
        let mut p = self.source.explicit_partials(jet.value, jet.grad_norm)?;
        if let Some(table) = &self.source_grad_table {
            p.grad_x = table.value(id, j);
        }
        Ok(p)
    }

    /// `(∂_u H, |∇_x H|, |∇_ω H|, |D_Ω H|)` at a node.
    pub fn eval_h_partials(&self, id: usize, j: usize) -> Result<SourcePartials> {
        let jet = self.u.jet(id, j)?;
        self.source_partials(id, j, &jet)
    }

    /// `u_t - a Δ(F(u)) - H` with all derivatives taken by finite differences.
    pub fn discrete_residual(&self, id: usize, j: usize) -> Result<f64> {
        let jet = self.u.jet(id, j)?;
        let ut = self.u.time_derivative(id, j)?;
        let div = crate::fields::div_fprime_grad_from_jet(&self.nl, &jet);
        Ok(ut - self.a_at(id, j) * div - self.source_value(id, j, &jet))
    }

    /// Largest discrete residual over ball nodes at the given slices.
    pub fn max_discrete_residual(&self, slices: impl Iterator<Item = usize>) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for j in slices {
            for &id in self.domain.ball() {
                worst = worst.max(self.discrete_residual(id, j)?.abs());
            }
        }
        Ok(worst)
    }

    /// Residual of the continuous equation at a node, with `Δ(F(u))` computed
    /// by differentiating the composition `F ∘ P` directly. Only available for
    /// scenarios built from a target.
    pub fn analytic_residual(&self, id: usize, j: usize) -> Result<f64> {
        let target = self
            .target
            .as_ref()
            .ok_or_else(|| LabError::Config("no analytic target".into()))?;
        let dom = &*self.domain;
        let coords = self.coords(id);
        let t = self.time(j);
        let n = dom.n();
        let s = target.profile_variable(dom, coords);
        let (_, f1, f2, _) = third_derivative(
            |x: Dual3<f64>| self.nl.f_generic(target.profile(n, x, Dual3::from(t))),
            s,
        );
        let (_, lap_f) = profile_to_space(dom, coords, s, target.is_radial(), f1, f2);
        let smp = target.sample(dom, coords, t);
        let a = self.diffusion.eval(coords, t, smp.value);
        let h = match &self.source_table {
            Some(table) => table.value(id, j),
            None => 0.0,
        };
        Ok(smp.time_derivative - a * lap_f - h)
    }
}
