//! Pointwise verification of the estimates on discrete scenarios.
//!
//! Every check produces a [`CheckReport`]. Margins are signed so that a
//! nonnegative margin means the inequality holds at that node.

mod appendix;
mod cutoff;
mod lemma;
mod theorem;

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

pub use appendix::{
    check_appendix_a, check_appendix_b, check_liouville_decay, gradient_sup, hessian_sup,
    rescale_power_law, AppendixAReport, AppendixBReport, LiouvilleReport, Premise,
};
pub use cutoff::{check_cutoffs, CutoffReport};
pub use lemma::{check_lemma21, lemma21_interior};
pub use theorem::{
    check_corollary, check_regime_lemmas, check_theorem, empirical_constant, RegimeLemmaReport,
    BISECTION_WIDTH,
};

use crate::error::Result;
use crate::estimator::Regime;
use crate::geometry::{Domain, DomainKind};
use crate::report::{num, num_map, num_opt};
use crate::scenario::Scenario;

/// One evaluated node of a check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeMargin {
    pub id: usize,
    pub slice: usize,
    pub coords: [f64; 2],
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub regime: Option<Regime>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub name: String,
    /// Smallest margin over the checked nodes.
    #[serde(serialize_with = "num")]
    pub worst_margin: f64,
    pub worst_node: Option<[f64; 3]>,
    pub violations: usize,
    #[serde(serialize_with = "num_opt")]
    pub c_emp: Option<f64>,
    #[serde(serialize_with = "num")]
    pub tolerance: f64,
    pub level: usize,
    pub h: f64,
    pub dt: f64,
    pub checked_nodes: usize,
    pub skipped_nodes: usize,
    pub pass: bool,
    #[serde(serialize_with = "num_map")]
    pub extras: BTreeMap<String, f64>,
    #[serde(skip)]
    pub nodes: Vec<NodeMargin>,
}

impl CheckReport {
    /// Summarises node margins against a tolerance.
    pub fn from_nodes(
        name: impl Into<String>,
        sc: &Scenario,
        nodes: Vec<NodeMargin>,
        tolerance: f64,
    ) -> Self {
        let mut worst = f64::INFINITY;
        let mut worst_node = None;
        let mut violations = 0;
        for nm in &nodes {
            if nm.margin < worst || (worst_node.is_none() && nm.margin.is_nan()) {
                worst = nm.margin;
                worst_node = Some([nm.coords[0], nm.coords[1], nm.t]);
            }
            if !(nm.margin >= -tolerance) {
                violations += 1;
            }
        }
        if nodes.is_empty() {
            worst = 0.0;
        }
        Self {
            name: name.into(),
            worst_margin: worst,
            worst_node,
            violations,
            c_emp: None,
            tolerance,
            level: 0,
            h: sc.domain.h(),
            dt: sc.u.max_dt(),
            checked_nodes: nodes.len(),
            skipped_nodes: 0,
            pass: violations == 0,
            extras: BTreeMap::new(),
            nodes,
        }
    }

    /// `max(0, -worst_margin)`.
    pub fn worst_violation(&self) -> f64 {
        (-self.worst_margin).max(0.0)
    }

    pub fn with_extra(mut self, key: &str, value: f64) -> Self {
        self.extras.insert(key.to_string(), value);
        self
    }

    /// Per-node CSV with columns `x[,y],t,lhs,rhs,margin,regime`.
    pub fn write_csv<W: Write>(&self, kind: DomainKind, mut out: W) -> Result<()> {
        let space = if kind == DomainKind::Cartesian2d {
            "x,y"
        } else {
            "x"
        };
        writeln!(out, "{space},t,lhs,rhs,margin,regime")?;
        for nm in &self.nodes {
            let regime = nm.regime.map(|r| r.label()).unwrap_or("");
            if kind == DomainKind::Cartesian2d {
                write!(out, "{},{},", nm.coords[0], nm.coords[1])?;
            } else {
                write!(out, "{},", nm.coords[0])?;
            }
            writeln!(
                out,
                "{},{},{},{},{}",
                nm.t, nm.lhs, nm.rhs, nm.margin, regime
            )?;
        }
        Ok(())
    }
}

/// `tol(h, Δt) = A h^2 + B Δt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Default)]
pub struct ToleranceModel {
    pub a: f64,
    pub b: f64,
}

/// Inflation applied to fitted coefficients.
pub const TOLERANCE_SAFETY: f64 = 2.0;

impl ToleranceModel {
    pub fn new(a: f64, b: f64) -> Self {
        Self { a, b }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn tol(&self, h: f64, dt: f64) -> f64 {
        self.a * h * h + self.b * dt
    }

    /// Fits `A` and `B` from three pilot reports: the base level, the base
    /// with `h` halved, and the base with `Δt` halved. Each coefficient is the
    /// observed change of the margin field divided by the change of its
    /// monomial, inflated by [`TOLERANCE_SAFETY`].
    pub fn fit(base: &CheckReport, half_h: &CheckReport, half_dt: &CheckReport) -> Self {
        let (h, dt) = (base.h, base.dt);
        let eh = margin_difference(base, half_h);
        let et = margin_difference(base, half_dt);
        let dh2 = h * h - half_h.h * half_h.h;
        let ddt = dt - half_dt.dt;
        let a = if dh2 > 0.0 {
            TOLERANCE_SAFETY * eh / dh2
        } else {
            0.0
        };
        let b = if ddt > 0.0 {
            TOLERANCE_SAFETY * et / ddt
        } else {
            0.0
        };
        Self { a, b }
    }
}

fn space_key(coords: [f64; 2], scale: f64) -> (i64, i64) {
    let q = |v: f64| (v / scale).round() as i64;
    (q(coords[0]), q(coords[1]))
}

/// Largest `|margin_a - margin_b|` over the nodes of `a` whose spatial point
/// `b` also has. Margins of `b` are interpolated linearly in time, so grids
/// with unrelated time steps can be compared; times outside the range of `b`
/// are skipped.
pub fn margin_difference(a: &CheckReport, b: &CheckReport) -> f64 {
    let scale = 1e-9 * a.h.min(b.h).min(a.dt.min(b.dt)).max(f64::MIN_POSITIVE);
    let mut index: BTreeMap<(i64, i64), Vec<(f64, f64)>> = BTreeMap::new();
    for nm in &b.nodes {
        index
            .entry(space_key(nm.coords, scale))
            .or_default()
            .push((nm.t, nm.margin));
    }
    for series in index.values_mut() {
        series.sort_by(|x, y| x.0.total_cmp(&y.0));
    }
    let t_eps = 1e-9 * a.dt.min(b.dt);
    a.nodes
        .iter()
        .filter_map(|nm| {
            let series = index.get(&space_key(nm.coords, scale))?;
            let k = series.partition_point(|p| p.0 < nm.t - t_eps);
            let hi = series.get(k)?;
            if (hi.0 - nm.t).abs() <= t_eps {
                return Some((hi.1 - nm.margin).abs());
            }
            let lo = series.get(k.checked_sub(1)?)?;
            let s = (nm.t - lo.0) / (hi.0 - lo.0);
            Some((lo.1 + s * (hi.1 - lo.1) - nm.margin).abs())
        })
        .fold(0.0, f64::max)
}

/// A check repeated on successively halved grids.
#[derive(Debug, Clone, Serialize)]
pub struct RefinementStudy {
    pub reports: Vec<CheckReport>,
    /// Worst violation `max(0, -worst_margin)` per level.
    pub worst_violations: Vec<f64>,
    /// `log2` ratios of successive worst violations, where both are nonzero.
    #[serde(serialize_with = "crate::report::num_vec")]
    pub violation_orders: Vec<f64>,
    /// Largest change of the margin field between successive levels.
    pub margin_changes: Vec<f64>,
    /// `log2` ratios of successive margin changes.
    #[serde(serialize_with = "crate::report::num_vec")]
    pub margin_orders: Vec<f64>,
    #[serde(serialize_with = "num_opt")]
    pub convergence_order: Option<f64>,
    pub c_emp: Vec<Option<f64>>,
}

impl RefinementStudy {
    pub fn new(reports: Vec<CheckReport>) -> Self {
        let worst: Vec<f64> = reports.iter().map(|r| r.worst_violation()).collect();
        let violation_orders: Vec<f64> = worst
            .windows(2)
            .filter(|w| w[0] > 0.0 && w[1] > 0.0)
            .map(|w| (w[0] / w[1]).log2())
            .collect();
        let margin_changes: Vec<f64> = reports
            .windows(2)
            .map(|w| margin_difference(&w[0], &w[1]))
            .collect();
        let margin_orders: Vec<f64> = margin_changes
            .windows(2)
            .filter(|w| w[0] > 0.0 && w[1] > 0.0)
            .map(|w| (w[0] / w[1]).log2())
            .collect();
        let convergence_order = violation_orders
            .iter()
            .chain(margin_orders.iter())
            .copied()
            .reduce(f64::min);
        Self {
            c_emp: reports.iter().map(|r| r.c_emp).collect(),
            reports,
            worst_violations: worst,
            violation_orders,
            margin_changes,
            margin_orders,
            convergence_order,
        }
    }

    /// Each worst violation is at most `1/factor` of the previous one.
    pub fn violations_shrink_by(&self, factor: f64) -> bool {
        self.worst_violations
            .windows(2)
            .all(|w| w[1] * factor <= w[0])
    }

    /// Largest over smallest of the finite empirical constants.
    pub fn c_emp_ratio(&self) -> Option<f64> {
        let cs: Vec<f64> = self.c_emp.iter().flatten().copied().collect();
        if cs.len() < 2 || cs.iter().any(|c| !c.is_finite() || *c <= 0.0) {
            return None;
        }
        let (lo, hi) = cs.iter().fold((f64::INFINITY, 0.0_f64), |(lo, hi), &c| {
            (lo.min(c), hi.max(c))
        });
        Some(hi / lo)
    }
}

/// Node of `dom` at `coords`, if the grid has one there.
pub fn locate(dom: &Domain, coords: [f64; 2]) -> Option<usize> {
    let first = dom.node(0).coords;
    let h = dom.h();
    let (nx, ny) = dom.shape();
    let ix = ((coords[0] - first[0]) / h).round();
    let iy = if dom.kind() == DomainKind::Cartesian2d {
        ((coords[1] - first[1]) / h).round()
    } else {
        0.0
    };
    if ix < 0.0 || iy < 0.0 || ix as usize >= nx || iy as usize >= ny {
        return None;
    }
    let id = dom.id(ix as usize, iy as usize);
    let c = dom.node(id).coords;
    let close = (c[0] - coords[0]).abs() <= 1e-9 * h && (c[1] - coords[1]).abs() <= 1e-9 * h;
    close.then_some(id)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(h: f64, dt: f64, rows: &[(f64, f64, f64)]) -> CheckReport {
        CheckReport {
            name: "t".into(),
            worst_margin: rows.iter().map(|r| r.2).fold(f64::INFINITY, f64::min),
            worst_node: None,
            violations: 0,
            c_emp: None,
            tolerance: 0.0,
            level: 0,
            h,
            dt,
            checked_nodes: rows.len(),
            skipped_nodes: 0,
            pass: true,
            extras: BTreeMap::new(),
            nodes: rows
                .iter()
                .map(|&(x, t, m)| NodeMargin {
                    id: 0,
                    slice: 0,
                    coords: [x, 0.0],
                    t,
                    lhs: 0.0,
                    rhs: m,
                    margin: m,
                    regime: None,
                })
                .collect(),
        }
    }

    #[test]
    fn shared_nodes_compared_exactly() {
        let a = report(
            0.1,
            0.1,
            &[(0.0, 0.0, 1.0), (0.1, 0.0, 2.0), (0.3, 0.0, 9.0)],
        );
        let b = report(
            0.05,
            0.1,
            &[(0.0, 0.0, 1.5), (0.05, 0.0, 7.0), (0.1, 0.0, 2.25)],
        );
        assert_eq!(margin_difference(&a, &b), 0.5);
    }

    #[test]
    fn times_are_interpolated() {
        // b is linear in t, so interpolation is exact
        let b = report(
            0.1,
            0.03,
            &[(0.0, 0.0, 0.0), (0.0, 0.03, 0.3), (0.0, 0.07, 0.7)],
        );
        let a = report(0.1, 0.05, &[(0.0, 0.05, 0.5), (0.0, 0.1, 5.0)]);
        assert!(margin_difference(&a, &b).abs() < 1e-15);
    }

    #[test]
    fn tolerance_fit_recovers_monomials() {
        // margins shift by exactly 3 h^2 + 5 dt between levels
        let base = report(0.1, 0.1, &[(0.0, 0.0, 0.03 + 0.5)]);
        let half_h = report(0.05, 0.1, &[(0.0, 0.0, 0.0075 + 0.5)]);
        let half_dt = report(0.1, 0.05, &[(0.0, 0.0, 0.03 + 0.25)]);
        let m = ToleranceModel::fit(&base, &half_h, &half_dt);
        assert!((m.a - TOLERANCE_SAFETY * 3.0).abs() < 1e-12);
        assert!((m.b - TOLERANCE_SAFETY * 5.0).abs() < 1e-12);
    }

    #[test]
    fn refinement_orders() {
        let lv = |h: f64, e: f64| report(h, h, &[(0.0, 0.0, -e)]);
        let study = RefinementStudy::new(vec![lv(0.1, 0.04), lv(0.05, 0.01), lv(0.025, 0.0025)]);
        assert_eq!(study.violation_orders, vec![2.0, 2.0]);
        assert!(study.violations_shrink_by(4.0));
        assert!(!study.violations_shrink_by(4.1));
        assert!((study.convergence_order.unwrap() - 2.0).abs() < 1e-12);
    }
}
