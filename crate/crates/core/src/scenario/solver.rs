//! Explicit Euler integration of `u_t = a Δ(F(u)) + H` on segments and radial
//! model manifolds.

use std::sync::Arc;

use rayon::prelude::*;

use super::{Diffusion, Provenance, Scenario, Source, Window};
use crate::error::{LabError, Result};
use crate::fields::{div_fprime_grad_from_jet, jet_of, SpaceTimeField};
use crate::geometry::{Domain, DomainKind};
use crate::nonlinearity::Nonlinearity;

/// Lateral boundary data.
pub enum Boundary<'a> {
    /// Keep the initial values.
    Hold,
    /// Prescribed values `g(x, t)`.
    Data(&'a (dyn Fn([f64; 2], f64) -> f64 + Sync)),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Fraction of the explicit stability limit, in `(0, 1)`.
    pub cfl: f64,
    /// Optional positivity floor `m`; the run fails if `u` drops below it.
    pub floor: Option<f64>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            cfl: 0.9,
            floor: None,
        }
    }
}

#[allow(clippy::too_many_arguments)]
pub fn solve_forward(
    domain: Arc<Domain>,
    window: Window,
    initial: &(dyn Fn([f64; 2]) -> f64 + Sync),
    boundary: Boundary<'_>,
    diffusion: Diffusion,
    nl: Nonlinearity,
    source: Source,
    opts: SolverOptions,
) -> Result<Scenario> {
    if domain.kind() == DomainKind::Cartesian2d {
        return Err(LabError::Domain(
            "the forward solver supports segment and radial domains".into(),
        ));
    }
    if matches!(source, Source::Manufactured) {
        return Err(LabError::Config(
            "manufactured sources come from a target, not from the solver".into(),
        ));
    }
    if !(opts.cfl > 0.0 && opts.cfl < 1.0) {
        return Err(LabError::Config(format!(
            "cfl safety must lie in (0, 1), got {}",
            opts.cfl
        )));
    }
    let dom = &*domain;
    let m_bound = nl.m_bound();
    let ceiling = m_bound * (1.0 + 1e-6);
    let floor = opts.floor.unwrap_or(0.0);
    let h = dom.h();
    let n = dom.n() as f64;

    let u0: Vec<f64> = dom.nodes().iter().map(|nd| initial(nd.coords)).collect();
    for (id, &v) in u0.iter().enumerate() {
        if !(v > 0.0 && v <= m_bound * (1.0 + 1e-12)) {
            return Err(LabError::Range {
                node: id,
                time: window.start(),
                value: v,
                bound: m_bound,
            });
        }
    }

    let mut times = vec![window.start()];
    let mut slices = vec![u0];
    let mut t = window.start();
    let mut step = 0usize;
    while t < window.t0 {
        let cur = slices.last().unwrap();
        let speed = dom
            .nodes()
            .iter()
            .enumerate()
            .map(|(id, nd)| diffusion.eval(nd.coords, t, cur[id]) * nl.df(cur[id]))
            .fold(0.0_f64, f64::max);
        if !(speed > 0.0 && speed.is_finite()) {
            return Err(LabError::DegenerateDiffusion(format!(
                "sup a F'(u) = {speed} at t = {t}"
            )));
        }
        let limit = opts.cfl * h * h / (2.0 * n * speed);
        let remaining = window.t0 - t;
        let dt = remaining / (remaining / limit).ceil();
        let next_t = if dt >= remaining { window.t0 } else { t + dt };

        let next: Vec<f64> = (0..dom.len())
            .into_par_iter()
            .map(|id| -> Result<f64> {
                let nd = dom.node(id);
                if nd.boundary {
                    return Ok(match boundary {
                        Boundary::Hold => slices[0][id],
                        Boundary::Data(g) => g(nd.coords, next_t),
                    });
                }
                let jet = jet_of(dom, cur, id)?;
                let a = diffusion.eval(nd.coords, t, jet.value);
                let rhs = a * div_fprime_grad_from_jet(&nl, &jet)
                    + source.explicit_value(jet.value, jet.grad_norm);
                Ok(jet.value + dt * rhs)
            })
            .collect::<Result<Vec<f64>>>()?;
        step += 1;
        for (id, &v) in next.iter().enumerate() {
            if !(v.is_finite() && v > floor && v <= ceiling) {
                return Err(LabError::BlowUp {
                    step,
                    reason: format!(
                        "u = {v} at node {id} leaves ({floor}, {ceiling}] at t = {next_t}"
                    ),
                });
            }
        }
        times.push(next_t);
        slices.push(next);
        t = next_t;
    }

    let u = SpaceTimeField::new(domain.clone(), times, slices)?;
    Scenario::from_field(window, nl, diffusion, source, u, Provenance::Solved)
}
