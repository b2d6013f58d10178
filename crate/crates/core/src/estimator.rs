//! Structural quantities of a scenario: the barrier `w`, the constants `μ`
//! and `γ`, the parabolic data `τ_u`, `σ_u`, and the piecewise bound `Z`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::fields::{
    div_fprime_grad_from_jet, space_ids, time_ids, SpaceRegion, SpaceTimeField, TimeRegion,
};
use crate::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Default)]
pub struct StructuralConstants {
    pub mu1: f64,
    pub mu2: f64,
    pub mu: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    pub gamma: f64,
    /// Nodes where a third-derivative stencil dropped to first order.
    #[serde(skip)]
    pub degraded_nodes: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Default)]
pub struct ParabolicData {
    pub tau_u: f64,
    pub sigma_u: f64,
}

/// Node-wise fields shared by every check.
#[derive(Debug, Clone)]
pub struct Analysis {
    /// `F'(u)|∇u| / u`.
    pub lhs: SpaceTimeField,
    /// `ξ - G(u)`.
    pub gap: SpaceTimeField,
    /// `w = (F'(u)|∇u| / (u (ξ - G(u))))^2`.
    pub w: SpaceTimeField,
    pub structural: StructuralConstants,
    pub parabolic: ParabolicData,
}

/// Builds `lhs`, `gap` and `w` at every grid node.
fn gradient_fields(sc: &Scenario) -> Result<(SpaceTimeField, SpaceTimeField, SpaceTimeField)> {
    let u = &sc.u;
    let nl = &sc.nl;
    let nodes = sc.domain.len();
    let per_slice = |j: usize| -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
        let rows: Vec<(f64, f64, f64)> = (0..nodes)
            .into_par_iter()
            .map(|id| -> Result<(f64, f64, f64)> {
                let jet = u.jet(id, j)?;
                let v = jet.value;
                let gap = nl.xi_minus_g(v)?;
                if !(gap > 0.0) {
                    return Err(LabError::Hypothesis(format!(
                        "xi - G(u) = {gap} at node {id}, slice {j}"
                    )));
                }
                let lhs = nl.df(v) * jet.grad_norm / v;
                let ratio = lhs / gap;
                Ok((lhs, gap, ratio * ratio))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((
            rows.iter().map(|r| r.0).collect(),
            rows.iter().map(|r| r.1).collect(),
            rows.iter().map(|r| r.2).collect(),
        ))
    };
    let mut lhs = Vec::new();
    let mut gap = Vec::new();
    let mut w = Vec::new();
    for j in 0..u.times().len() {
        let (a, b, c) = per_slice(j)?;
        lhs.push(a);
        gap.push(b);
        w.push(c);
    }
    let dom = sc.domain.clone();
    let times = u.times().to_vec();
    Ok((
        SpaceTimeField::new(dom.clone(), times.clone(), lhs)?,
        SpaceTimeField::new(dom.clone(), times.clone(), gap)?,
        SpaceTimeField::new(dom, times, w)?,
    ))
}

/// `w` at every grid node.
pub fn compute_barrier_w(sc: &Scenario) -> Result<SpaceTimeField> {
    Ok(gradient_fields(sc)?.2)
}

#[derive(Debug, Clone, Copy, Default)]
struct StructuralTerms {
    mu1: f64,
    gamma1: f64,
    mu2: f64,
    gamma2: f64,
    gamma3: f64,
    degraded: usize,
}

impl StructuralTerms {
    fn merge(self, o: Self) -> Self {
        Self {
            mu1: self.mu1.max(o.mu1),
            gamma1: self.gamma1.max(o.gamma1),
            mu2: self.mu2.max(o.mu2),
            gamma2: self.gamma2.max(o.gamma2),
            gamma3: self.gamma3.max(o.gamma3),
            degraded: self.degraded + o.degraded,
        }
    }
}

fn structural_at(sc: &Scenario, id: usize, j: usize) -> Result<StructuralTerms> {
    let nl = &sc.nl;
    let jet = sc.u.jet(id, j)?;
    let v = jet.value;
    let d1 = nl.df(v);
    if d1 == 0.0 {
        return Err(LabError::Hypothesis(format!(
            "F'(u) = 0 at node {id}, slice {j}"
        )));
    }
    let d2 = nl.d2f(v);
    let gap = nl.xi_minus_g(v)?;
    let coords = sc.coords(id);
    let t = sc.time(j);
    let a = sc.diffusion.eval(coords, t, v);
    let hval = sc.source_value(id, j, &jet);
    let hp = sc.source_partials(id, j, &jet)?;
    let div = div_fprime_grad_from_jet(nl, &jet);
    let k = sc.domain.k();
    let mu1 = k * a * d1 + hval * d2 / d1 + hp.du - hval / v + hval * d1 / (gap * v);
    let weight = d1 / v;
    Ok(StructuralTerms {
        mu1: mu1.max(0.0),
        gamma1: weight * hp.grad_x,
        mu2: sc.diffusion.du(coords, t, v).abs() * div.abs(),
        gamma2: weight * sc.diffusion.grad_x_norm(coords, t, v) * div.abs(),
        gamma3: weight * (hp.grad_omega * jet.hess_norm + hp.d_omega * jet.d3_norm),
        degraded: usize::from(jet.degraded && hp.d_omega != 0.0),
    })
}

/// `μ1, μ2, μ, γ1, γ2, γ3, γ` as sups over the ball and the whole window.
pub fn compute_structural(sc: &Scenario) -> Result<StructuralConstants> {
    let ball = sc.domain.ball();
    let nt = sc.u.times().len();
    let terms = (0..nt)
        .into_par_iter()
        .flat_map_iter(|j| ball.iter().map(move |&id| (id, j)))
        .map(|(id, j)| structural_at(sc, id, j))
        .try_reduce(StructuralTerms::default, |a, b| Ok(a.merge(b)))?;
    Ok(StructuralConstants {
        mu1: terms.mu1,
        mu2: terms.mu2,
        mu: terms.mu1 + terms.mu2,
        gamma1: terms.gamma1,
        gamma2: terms.gamma2,
        gamma3: terms.gamma3,
        gamma: terms.gamma1 + terms.gamma2 + terms.gamma3,
        degraded_nodes: terms.degraded,
    })
}

fn parabolic_from(lhs: &SpaceTimeField, gap: &SpaceTimeField) -> Result<ParabolicData> {
    let ratio = |id: usize, j: usize| Ok(lhs.value(id, j) / gap.value(id, j));
    let tau = lhs.sup_over(
        crate::fields::Region::new(SpaceRegion::Ball, TimeRegion::Initial),
        ratio,
    )?;
    let sigma = lhs.sup_over(
        crate::fields::Region::new(SpaceRegion::Lateral, TimeRegion::All),
        ratio,
    )?;
    Ok(ParabolicData {
        tau_u: tau,
        sigma_u: sigma,
    })
}

/// `τ_u` over the initial slice and `σ_u` over the lateral boundary.
pub fn compute_parabolic_data(sc: &Scenario) -> Result<ParabolicData> {
    let (lhs, gap, _) = gradient_fields(sc)?;
    parabolic_from(&lhs, &gap)
}

/// Everything above in one pass.
pub fn analyze(sc: &Scenario) -> Result<Analysis> {
    let (lhs, gap, w) = gradient_fields(sc)?;
    let structural = compute_structural(sc)?;
    let parabolic = parabolic_from(&lhs, &gap)?;
    Ok(Analysis {
        lhs,
        gap,
        w,
        structural,
        parabolic,
    })
}

/// Scalars of the piecewise bound for a partition `(ρ, δ)` and constant `C`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeScalars {
    pub rho: f64,
    pub delta: f64,
    #[serde(rename = "C_cal")]
    pub c_cal: f64,
    #[serde(rename = "C_scalar")]
    pub c_scalar: f64,
    #[serde(rename = "T_scalar")]
    pub t_scalar: f64,
    #[serde(rename = "S_scalar")]
    pub s_scalar: f64,
    #[serde(rename = "C_tilde")]
    pub c_tilde: f64,
    #[serde(rename = "T_tilde")]
    pub t_tilde: f64,
    #[serde(rename = "S_tilde")]
    pub s_tilde: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub beta3: f64,
    pub iota: f64,
}

impl RegimeScalars {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        structural: &StructuralConstants,
        parabolic: &ParabolicData,
        radius: f64,
        span: f64,
        k: f64,
        rho: f64,
        delta: f64,
        c_cal: f64,
    ) -> Result<Self> {
        if !(rho > 0.0 && rho < radius) {
            return Err(LabError::Domain(format!(
                "rho = {rho} must lie in (0, R) with R = {radius}"
            )));
        }
        if !(delta > 0.0 && delta < span) {
            return Err(LabError::Domain(format!(
                "delta = {delta} must lie in (0, T) with T = {span}"
            )));
        }
        if !(c_cal >= 0.0) {
            return Err(LabError::Domain(format!(
                "C must be nonnegative, got {c_cal}"
            )));
        }
        let kp = k.max(0.0);
        let (mu, gamma) = (structural.mu, structural.gamma);
        let (tau, sigma) = (parabolic.tau_u, parabolic.sigma_u);
        let c_scalar = mu.sqrt() + gamma.cbrt();
        let t_scalar = 1.0 / delta.sqrt();
        let s_scalar = 1.0 / rho + 1.0 / (rho * (radius - rho)).sqrt() + kp.powf(0.25) / rho.sqrt();
        Ok(Self {
            rho,
            delta,
            c_cal,
            c_scalar,
            t_scalar,
            s_scalar,
            c_tilde: mu + gamma.powf(2.0 / 3.0),
            t_tilde: 1.0 / delta,
            s_tilde: 1.0 / (rho * rho) + 1.0 / (rho * (radius - rho)) + kp.sqrt() / rho,
            beta1: tau + sigma.min(c_cal * s_scalar),
            beta2: sigma + tau.min(c_cal * t_scalar),
            beta3: sigma + tau,
            iota: (sigma + tau).min(c_cal * (t_scalar + s_scalar)),
        })
    }

    pub fn z(&self, regime: Regime) -> f64 {
        match regime {
            Regime::B1 => self.beta1,
            Regime::B2 => self.beta2,
            Regime::B3 => self.beta3,
            Regime::I => self.iota,
        }
    }

    /// Same partition, new constant.
    pub fn with_c(
        &self,
        structural: &StructuralConstants,
        parabolic: &ParabolicData,
        radius: f64,
        span: f64,
        k: f64,
        c_cal: f64,
    ) -> Result<Self> {
        Self::new(
            structural, parabolic, radius, span, k, self.rho, self.delta, c_cal,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Regime {
    /// Inner ball, early times.
    B1,
    /// Ring, late times.
    B2,
    /// Ring, early times.
    B3,
    /// Inner ball, late times.
    I,
}

impl Regime {
    pub fn of(inner: bool, late: bool) -> Self {
        match (inner, late) {
            (true, false) => Regime::B1,
            (false, true) => Regime::B2,
            (false, false) => Regime::B3,
            (true, true) => Regime::I,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Regime::B1 => "B1",
            Regime::B2 => "B2",
            Regime::B3 => "B3",
            Regime::I => "I",
        }
    }
}

/// Assignment of every grid node of `Q_{R,T}` to one of the four regions.
#[derive(Debug, Clone)]
pub struct Partition {
    inner: Vec<bool>,
    late: Vec<bool>,
}

impl Partition {
    pub fn new(u: &SpaceTimeField, rho: f64, delta: f64) -> Result<Self> {
        let dom = u.domain();
        let mut inner = vec![false; dom.len()];
        for id in space_ids(dom, SpaceRegion::Inner(rho))? {
            inner[id] = true;
        }
        let mut late = vec![false; u.times().len()];
        for j in time_ids(u.times(), TimeRegion::Late(delta))? {
            late[j] = true;
        }
        Ok(Self { inner, late })
    }

    pub fn regime(&self, id: usize, j: usize) -> Regime {
        Regime::of(self.inner[id], self.late[j])
    }

    pub fn is_inner(&self, id: usize) -> bool {
        self.inner[id]
    }

    pub fn is_late(&self, j: usize) -> bool {
        self.late[j]
    }
}

/// Scalars together with the partition they act on.
#[derive(Debug, Clone)]
pub struct RegimeBound {
    pub scalars: RegimeScalars,
    pub partition: Partition,
}

impl RegimeBound {
    /// `Z(x, t)` at a node.
    pub fn z(&self, id: usize, j: usize) -> f64 {
        self.scalars.z(self.partition.regime(id, j))
    }
}

pub fn compute_regime_bound(
    sc: &Scenario,
    analysis: &Analysis,
    rho: f64,
    delta: f64,
    c_cal: f64,
) -> Result<RegimeBound> {
    let scalars = RegimeScalars::new(
        &analysis.structural,
        &analysis.parabolic,
        sc.domain.radius(),
        sc.window.span,
        sc.domain.k(),
        rho,
        delta,
        c_cal,
    )?;
    Ok(RegimeBound {
        scalars,
        partition: Partition::new(&sc.u, rho, delta)?,
    })
}
