//! The differential inequality satisfied by the barrier `w`.

use rayon::prelude::*;

use super::{CheckReport, NodeMargin, ToleranceModel};
use crate::error::{LabError, Result};
use crate::estimator::Analysis;
use crate::fields::jet_of;
use crate::geometry::{Domain, DomainKind};
use crate::nonlinearity::lambda_from_parts;
use crate::scenario::Scenario;

/// True if `Δw` at `id` only uses values of `w` that were themselves built
/// from centred stencils of `u`.
pub fn lemma21_interior(dom: &Domain, id: usize) -> bool {
    let node = dom.node(id);
    if !node.in_ball {
        return false;
    }
    let full = |axis: crate::stencil::Axis, i: usize| {
        let below = if i == 0 { 1 } else { i - 1 };
        axis.centered(i) && axis.centered(below) && i + 1 < axis.len() && axis.centered(i + 1)
    };
    let Ok(ax) = dom.axis_x() else {
        return false;
    };
    if !full(ax, node.ix) {
        return false;
    }
    if dom.kind() == DomainKind::Cartesian2d {
        match dom.axis_y() {
            Ok(ay) => full(ay, node.iy),
            Err(_) => false,
        }
    } else {
        true
    }
}

/// Evaluates `(a g' Δw - w_t)/2 - [a κ (ξ-g) w^2 + a λ <∇w, ∇g> - μ w - γ |∇g| / (ξ-g)^2]`
/// at interior nodes and interior times.
pub fn check_lemma21(sc: &Scenario, an: &Analysis, tol: ToleranceModel) -> Result<CheckReport> {
    sc.require_hypotheses()?;
    let kappa = sc.hypotheses.kappa_min;
    let (mu, gamma) = (an.structural.mu, an.structural.gamma);
    let dom = &*sc.domain;
    let n = dom.n();
    let nt = sc.u.times().len();
    if nt < 3 {
        return Err(LabError::GridTooCoarse("need three time slices".into()));
    }
    let interior: Vec<usize> = dom
        .ball()
        .iter()
        .copied()
        .filter(|&id| lemma21_interior(dom, id))
        .collect();
    if interior.is_empty() {
        return Err(LabError::GridTooCoarse(
            "no interior nodes for the barrier".into(),
        ));
    }
    let pairs: Vec<(usize, usize)> = (1..nt - 1)
        .flat_map(|j| interior.iter().map(move |&id| (id, j)))
        .collect();
    let nodes = pairs
        .par_iter()
        .map(|&(id, j)| -> Result<NodeMargin> {
            let ju = sc.u.jet(id, j)?;
            let jw = jet_of(dom, an.w.slice(j), id)?;
            let u = ju.value;
            let g1 = sc.nl.df(u);
            let g2 = u * sc.nl.d2f(u);
            let gap = an.gap.value(id, j);
            let lambda = lambda_from_parts(n, g1, g2, gap)?;
            let w = jw.value;
            let wt = an.w.time_derivative(id, j)?;
            let a = sc.a_at(id, j);
            let scale = g1 / u;
            let inner = scale * (jw.grad[0] * ju.grad[0] + jw.grad[1] * ju.grad[1]);
            let grad_g = an.lhs.value(id, j);
            let lhs = 0.5 * (a * g1 * jw.laplacian - wt);
            let rhs = a * kappa * gap * w * w + a * lambda * inner
                - mu * w
                - gamma * grad_g / (gap * gap);
            Ok(NodeMargin {
                id,
                slice: j,
                coords: sc.coords(id),
                t: sc.time(j),
                lhs,
                rhs,
                margin: lhs - rhs,
                regime: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let tolerance = tol.tol(dom.h(), sc.u.max_dt());
    let mut report = CheckReport::from_nodes("lemma21", sc, nodes, tolerance);
    report.skipped_nodes = dom.ball().len() * nt - report.checked_nodes;
    Ok(report
        .with_extra("kappa", kappa)
        .with_extra("tol_a", tol.a)
        .with_extra("tol_b", tol.b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimator::analyze;
    use crate::nonlinearity::Nonlinearity;
    use crate::scenario::{Diffusion, Target, Window};
    use std::sync::Arc;

    #[test]
    fn constant_solution_has_zero_margin() {
        let sc = Scenario::manufacture(
            Arc::new(Domain::segment(0.0, 1.0, 0.1).unwrap()),
            Window::new(1.0, 1.0).unwrap(),
            0.1,
            Target::Constant { value: 0.5 },
            Diffusion::default(),
            Nonlinearity::identity(1.0).unwrap(),
        )
        .unwrap();
        let an = analyze(&sc).unwrap();
        let r = check_lemma21(&sc, &an, ToleranceModel::zero()).unwrap();
        assert!(r.pass);
        assert_eq!(r.worst_margin, 0.0);
        assert!(r.skipped_nodes > 0);
    }

    #[test]
    fn interior_excludes_two_layers() {
        let dom = Domain::segment(0.0, 1.0, 0.1).unwrap();
        let flags: Vec<bool> = (0..dom.len())
            .map(|id| lemma21_interior(&dom, id))
            .collect();
        assert!(!flags[0] && !flags[1] && flags[2]);
        assert!(!flags[dom.len() - 1] && !flags[dom.len() - 2] && flags[dom.len() - 3]);
        let rad = Domain::radial(2, 1.0, 0.0, 0.1).unwrap();
        assert!(lemma21_interior(&rad, 0));
    }
}
