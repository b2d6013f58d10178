//! The global estimate, its local form, and the four regional bounds.

use rayon::prelude::*;
use serde::Serialize;

use super::{CheckReport, NodeMargin};
use crate::error::{LabError, Result};
use crate::estimator::{compute_regime_bound, Analysis, Partition, Regime, RegimeScalars};
use crate::fields::{space_ids, time_ids, SpaceRegion, TimeRegion};
use crate::scenario::Scenario;

/// Relative width at which the bisection for `C` stops.
pub const BISECTION_WIDTH: f64 = 1e-10;

/// Largest constant tried before reporting `+∞`.
const C_CEILING: f64 = 1e300;

struct TheoremNodes {
    /// `(id, j, lhs, gap, regime)` over the ball and the whole window.
    rows: Vec<(usize, usize, f64, f64, Regime)>,
}

impl TheoremNodes {
    fn new(sc: &Scenario, an: &Analysis, part: &Partition) -> Self {
        let nt = sc.u.times().len();
        let rows = (0..nt)
            .flat_map(|j| {
                sc.domain.ball().iter().map(move |&id| {
                    (
                        id,
                        j,
                        an.lhs.value(id, j),
                        an.gap.value(id, j),
                        part.regime(id, j),
                    )
                })
            })
            .collect();
        Self { rows }
    }

    fn passes(&self, s: &RegimeScalars) -> bool {
        self.rows
            .par_iter()
            .all(|&(_, _, lhs, gap, reg)| lhs <= (s.c_cal * s.c_scalar + s.z(reg)) * gap)
    }
}

fn scalars_at(sc: &Scenario, an: &Analysis, rho: f64, delta: f64, c: f64) -> Result<RegimeScalars> {
    RegimeScalars::new(
        &an.structural,
        &an.parabolic,
        sc.domain.radius(),
        sc.window.span,
        sc.domain.k(),
        rho,
        delta,
        c,
    )
}

/// `F'(u)|∇u|/u <= (C 𝒞 + Z)(ξ - G(u))` on the whole grid, at tolerance 0.
pub fn check_theorem(
    sc: &Scenario,
    an: &Analysis,
    rho: f64,
    delta: f64,
    c_cal: f64,
) -> Result<CheckReport> {
    let bound = compute_regime_bound(sc, an, rho, delta, c_cal)?;
    let s = bound.scalars;
    let nodes = TheoremNodes::new(sc, an, &bound.partition)
        .rows
        .into_iter()
        .map(|(id, j, lhs, gap, reg)| {
            let rhs = (s.c_cal * s.c_scalar + s.z(reg)) * gap;
            NodeMargin {
                id,
                slice: j,
                coords: sc.coords(id),
                t: sc.time(j),
                lhs,
                rhs,
                margin: rhs - lhs,
                regime: Some(reg),
            }
        })
        .collect();
    let mut r = CheckReport::from_nodes("theorem", sc, nodes, 0.0);
    r.extras.insert("C_cal".into(), c_cal);
    r.extras.insert("C_scalar".into(), s.c_scalar);
    r.extras.insert("T_scalar".into(), s.t_scalar);
    r.extras.insert("S_scalar".into(), s.s_scalar);
    r.extras.insert("beta1".into(), s.beta1);
    r.extras.insert("beta2".into(), s.beta2);
    r.extras.insert("beta3".into(), s.beta3);
    r.extras.insert("iota".into(), s.iota);
    Ok(r)
}

/// Smallest `C` for which [`check_theorem`] passes, by bisection. `0` when
/// the left side vanishes, `+∞` when no finite constant works.
pub fn empirical_constant(sc: &Scenario, an: &Analysis, rho: f64, delta: f64) -> Result<f64> {
    let part = Partition::new(&sc.u, rho, delta)?;
    let nodes = TheoremNodes::new(sc, an, &part);
    if nodes.rows.iter().all(|r| r.2 == 0.0) {
        return Ok(0.0);
    }
    let ok = |c: f64| -> Result<bool> { Ok(nodes.passes(&scalars_at(sc, an, rho, delta, c)?)) };
    if ok(0.0)? {
        return Ok(0.0);
    }
    let mut hi = 1.0;
    while !ok(hi)? {
        hi *= 2.0;
        if hi > C_CEILING {
            return Ok(f64::INFINITY);
        }
    }
    let mut lo = if hi > 1.0 { hi / 2.0 } else { 0.0 };
    while hi - lo > BISECTION_WIDTH * hi {
        let mid = 0.5 * (lo + hi);
        if ok(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// `max lhs / bound` over the given rows; `0` if every lhs vanishes and `+∞`
/// if some positive lhs meets a zero bound.
fn ratio_constant(rows: impl Iterator<Item = (f64, f64)>) -> f64 {
    rows.fold(0.0, |acc: f64, (lhs, bound)| {
        if lhs <= 0.0 {
            acc
        } else if bound <= 0.0 {
            f64::INFINITY
        } else {
            acc.max(lhs / bound)
        }
    })
}

/// The local estimate on `Q_{R/2, T/2}` with its own constant, together with
/// the variant that keeps the parabolic data.
pub fn check_corollary(sc: &Scenario, an: &Analysis) -> Result<CheckReport> {
    let radius = sc.domain.radius();
    let span = sc.window.span;
    let kp = sc.domain.k_plus();
    let (mu, gamma) = (an.structural.mu, an.structural.gamma);
    let (tau, sigma) = (an.parabolic.tau_u, an.parabolic.sigma_u);
    let structural = mu.sqrt() + gamma.cbrt();
    let bracket = structural + 1.0 / radius + 1.0 / span.sqrt() + kp.powf(0.25) / radius.sqrt();
    let sharp = structural + sigma + tau;

    let s = scalars_at(sc, an, radius / 2.0, span / 2.0, 1.0)?;
    let t_expected = (2.0 / span).sqrt();
    let s_expected = 4.0 / radius + 2f64.sqrt() * kp.powf(0.25) / radius.sqrt();
    let t_err = (s.t_scalar - t_expected).abs();
    let s_err = (s.s_scalar - s_expected).abs();

    let ids = space_ids(&sc.domain, SpaceRegion::Within(radius / 2.0))?;
    let js = time_ids(sc.u.times(), TimeRegion::Late(span / 2.0))?;
    let rows: Vec<(usize, usize, f64, f64)> = js
        .iter()
        .flat_map(|&j| ids.iter().map(move |&id| (id, j)))
        .map(|(id, j)| (id, j, an.lhs.value(id, j), an.gap.value(id, j)))
        .collect();
    let c_emp = ratio_constant(rows.iter().map(|r| (r.2, bracket * r.3)));
    let c_sharp = ratio_constant(rows.iter().map(|r| (r.2, sharp * r.3)));
    let nodes: Vec<NodeMargin> = rows
        .iter()
        .map(|&(id, j, lhs, gap)| {
            let rhs = c_emp * bracket * gap;
            NodeMargin {
                id,
                slice: j,
                coords: sc.coords(id),
                t: sc.time(j),
                lhs,
                rhs,
                margin: rhs - lhs,
                regime: None,
            }
        })
        .collect();
    let sharper = rows
        .iter()
        .filter(|r| c_emp * sharp * r.3 < c_emp * bracket * r.3)
        .count();
    let fraction = sharper as f64 / rows.len() as f64;
    let mut r = CheckReport::from_nodes("corollary", sc, nodes, 0.0);
    r.c_emp = Some(c_emp);
    let identities = t_err <= 1e-12 * t_expected.max(1.0) && s_err <= 1e-12 * s_expected.max(1.0);
    r.pass = r.violations == 0 && c_emp.is_finite() && identities;
    Ok(r.with_extra("bracket", bracket)
        .with_extra("bracket_sharp", sharp)
        .with_extra("c_emp_sharp", c_sharp)
        .with_extra("sharper_fraction", fraction)
        .with_extra("T_scalar", s.t_scalar)
        .with_extra("S_scalar", s.s_scalar)
        .with_extra("T_identity_error", t_err)
        .with_extra("S_identity_error", s_err))
}

/// The four regional bounds on `w`, each with its own constant, and their
/// per-node combination.
#[derive(Debug, Clone, Serialize)]
pub struct RegimeLemmaReport {
    pub lemmas: Vec<CheckReport>,
    pub combination: CheckReport,
}

impl RegimeLemmaReport {
    pub fn pass(&self) -> bool {
        self.lemmas.iter().all(|r| r.pass) && self.combination.pass
    }
}

#[derive(Clone, Copy)]
struct RegionalBound {
    name: &'static str,
    space_inner: bool,
    time_late: bool,
    /// Constant part `A` and the coefficient `B` of `C` in `w <= A + C B`.
    fixed: f64,
    slope: f64,
}

impl RegionalBound {
    fn applies(&self, part: &Partition, id: usize, j: usize) -> bool {
        (!self.space_inner || part.is_inner(id)) && (!self.time_late || part.is_late(j))
    }
}

/// Verifies
/// `w <= τ² + C(𝒞̃ + 𝒮̃)` on the inner ball,
/// `w <= σ² + C(𝒞̃ + 𝒯̃)` at late times,
/// `w <= σ² + τ² + C 𝒞̃` everywhere and
/// `w <= C(𝒞̃ + 𝒮̃ + 𝒯̃)` on the inner ball at late times.
/// `tol` absorbs discretisation error where a bound has no `C` term.
pub fn check_regime_lemmas(
    sc: &Scenario,
    an: &Analysis,
    rho: f64,
    delta: f64,
    tol: f64,
) -> Result<RegimeLemmaReport> {
    let s = scalars_at(sc, an, rho, delta, 1.0)?;
    let part = Partition::new(&sc.u, rho, delta)?;
    let (tau2, sigma2) = (an.parabolic.tau_u.powi(2), an.parabolic.sigma_u.powi(2));
    let bounds = [
        RegionalBound {
            name: "regime_inner",
            space_inner: true,
            time_late: false,
            fixed: tau2,
            slope: s.c_tilde + s.s_tilde,
        },
        RegionalBound {
            name: "regime_late",
            space_inner: false,
            time_late: true,
            fixed: sigma2,
            slope: s.c_tilde + s.t_tilde,
        },
        RegionalBound {
            name: "regime_global",
            space_inner: false,
            time_late: false,
            fixed: sigma2 + tau2,
            slope: s.c_tilde,
        },
        RegionalBound {
            name: "regime_interior",
            space_inner: true,
            time_late: true,
            fixed: 0.0,
            slope: s.c_tilde + s.s_tilde + s.t_tilde,
        },
    ];
    let nt = sc.u.times().len();
    let all: Vec<(usize, usize)> = (0..nt)
        .flat_map(|j| sc.domain.ball().iter().map(move |&id| (id, j)))
        .collect();
    let mut lemmas = Vec::new();
    let mut constants = Vec::new();
    for b in &bounds {
        let rows: Vec<(usize, usize)> = all
            .iter()
            .copied()
            .filter(|&(id, j)| b.applies(&part, id, j))
            .collect();
        if rows.is_empty() {
            return Err(LabError::Domain(format!("{} has no grid nodes", b.name)));
        }
        let excess = rows
            .iter()
            .map(|&(id, j)| an.w.value(id, j) - b.fixed)
            .fold(f64::NEG_INFINITY, f64::max);
        let c = if excess <= 0.0 {
            0.0
        } else if b.slope > 0.0 {
            excess / b.slope
        } else if excess <= tol {
            0.0
        } else {
            f64::INFINITY
        };
        let nodes = rows
            .iter()
            .map(|&(id, j)| {
                let w = an.w.value(id, j);
                let rhs = b.fixed + if c == 0.0 { 0.0 } else { c * b.slope };
                NodeMargin {
                    id,
                    slice: j,
                    coords: sc.coords(id),
                    t: sc.time(j),
                    lhs: w,
                    rhs,
                    margin: rhs - w,
                    regime: Some(part.regime(id, j)),
                }
            })
            .collect();
        let mut r = CheckReport::from_nodes(b.name, sc, nodes, tol);
        r.c_emp = Some(c);
        r.pass = r.violations == 0 && c.is_finite();
        lemmas.push(r.with_extra("fixed", b.fixed).with_extra("slope", b.slope));
        constants.push(c);
    }

    let common = constants
        .iter()
        .copied()
        .filter(|c| c.is_finite())
        .fold(0.0, f64::max);
    let c_thm = empirical_constant(sc, an, rho, delta)?;
    let thm = scalars_at(
        sc,
        an,
        rho,
        delta,
        if c_thm.is_finite() { c_thm } else { 0.0 },
    )?;
    let mut consistent = 0usize;
    let nodes: Vec<NodeMargin> = all
        .iter()
        .map(|&(id, j)| {
            let w = an.w.value(id, j);
            let best = bounds
                .iter()
                .zip(&constants)
                .filter(|(b, c)| c.is_finite() && b.applies(&part, id, j))
                .map(|(b, _)| b.fixed + common * b.slope)
                .fold(f64::INFINITY, f64::min);
            let reg = part.regime(id, j);
            if c_thm.is_finite() && thm.c_cal * thm.c_scalar + thm.z(reg) >= best.sqrt() - tol {
                consistent += 1;
            }
            NodeMargin {
                id,
                slice: j,
                coords: sc.coords(id),
                t: sc.time(j),
                lhs: w,
                rhs: best,
                margin: best - w,
                regime: Some(reg),
            }
        })
        .collect();
    let total = nodes.len() as f64;
    let mut combination = CheckReport::from_nodes("regime_combination", sc, nodes, tol);
    combination.c_emp = Some(common);
    Ok(RegimeLemmaReport {
        lemmas,
        combination: combination.with_extra("theorem_consistency", consistent as f64 / total),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimator::analyze;
    use crate::geometry::Domain;
    use crate::nonlinearity::Nonlinearity;
    use crate::scenario::{Diffusion, Target, Window};
    use std::sync::Arc;

    fn constant() -> Scenario {
        Scenario::manufacture(
            Arc::new(Domain::segment(0.0, 1.0, 0.1).unwrap()),
            Window::new(1.0, 1.0).unwrap(),
            0.1,
            Target::Constant { value: 0.5 },
            Diffusion::default(),
            Nonlinearity::identity(1.0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn constant_solution_is_trivial_everywhere() {
        let sc = constant();
        let an = analyze(&sc).unwrap();
        let r = check_theorem(&sc, &an, 0.5, 0.5, 1.0).unwrap();
        assert!(r.pass);
        assert_eq!(r.worst_margin, 0.0);
        assert_eq!(empirical_constant(&sc, &an, 0.5, 0.5).unwrap(), 0.0);
        let c = check_corollary(&sc, &an).unwrap();
        assert!(c.pass);
        assert_eq!(c.c_emp, Some(0.0));
        let reg = check_regime_lemmas(&sc, &an, 0.5, 0.5, 0.0).unwrap();
        assert!(reg.pass());
        assert!(reg.lemmas.iter().all(|r| r.c_emp == Some(0.0)));
    }

    #[test]
    fn ratio_constant_edge_cases() {
        assert_eq!(ratio_constant([(0.0, 0.0)].into_iter()), 0.0);
        assert_eq!(ratio_constant([(1.0, 0.0)].into_iter()), f64::INFINITY);
        assert_eq!(ratio_constant([(1.0, 4.0), (1.0, 2.0)].into_iter()), 0.5);
    }
}
