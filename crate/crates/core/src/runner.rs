//! Executes a [`RunConfig`]: builds the scenario, runs the requested checks
//! and writes `report.json`, `pernode.csv` and `plotdata.csv`.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::checker::{
    check_appendix_a, check_appendix_b, check_corollary, check_cutoffs, check_lemma21,
    check_liouville_decay, check_regime_lemmas, check_theorem, empirical_constant, CheckReport,
    RefinementStudy, ToleranceModel, TOLERANCE_SAFETY,
};
use crate::config::{Calibration, CheckKind, RunConfig};
use crate::error::{LabError, Result};
use crate::estimator::{analyze, compute_regime_bound, Analysis, RegimeScalars};
use crate::fields::{Region, SpaceRegion, SpaceTimeField, TimeRegion};
use crate::geometry::DomainKind;
use crate::report::value;
use crate::scenario::Scenario;

/// Scenario and analysis at one grid level `h/2^l, Δt/2^l`.
struct Level {
    sc: Scenario,
    an: Analysis,
}

/// Grid levels built on demand.
struct Levels<'a> {
    cfg: &'a RunConfig,
    built: Vec<Level>,
}

impl<'a> Levels<'a> {
    fn new(cfg: &'a RunConfig) -> Result<Self> {
        let sc = cfg.scenario.build()?;
        let an = analyze(&sc)?;
        Ok(Self {
            cfg,
            built: vec![Level { sc, an }],
        })
    }

    fn get(&mut self, l: usize) -> Result<&Level> {
        while self.built.len() <= l {
            let f = 0.5f64.powi(self.built.len() as i32);
            let sc = self.cfg.scenario.build_scaled(f, f)?;
            let an = analyze(&sc)?;
            self.built.push(Level { sc, an });
        }
        Ok(&self.built[l])
    }

    fn base(&self) -> &Level {
        &self.built[0]
    }
}

/// Fits `tol(h, Δt) = A h² + B Δt` for the barrier inequality from the base
/// level and one-sided refinements in `h` and `Δt`.
pub fn fit_lemma_tolerance(
    cfg: &RunConfig,
    base: &Scenario,
    base_an: &Analysis,
) -> Result<ToleranceModel> {
    let pilot = |sc: &Scenario, an: &Analysis| check_lemma21(sc, an, ToleranceModel::zero());
    let r0 = pilot(base, base_an)?;
    let sh = cfg.scenario.build_scaled(0.5, 1.0)?;
    let rh = pilot(&sh, &analyze(&sh)?)?;
    let st = cfg.scenario.build_scaled(1.0, 0.5)?;
    let rt = pilot(&st, &analyze(&st)?)?;
    Ok(ToleranceModel::fit(&r0, &rh, &rt))
}

/// Slack for regional bounds without a `C` term: the movement of `sup w`
/// between two grid levels, inflated by the tolerance safety factor.
pub fn regime_tolerance(coarse: &SpaceTimeField, fine: &SpaceTimeField) -> Result<f64> {
    let all = Region::new(SpaceRegion::Ball, TimeRegion::All);
    Ok(TOLERANCE_SAFETY * (coarse.sup(all)? - fine.sup(all)?).abs())
}

/// `C_cal` from the config; `"auto"` uses the empirical constant.
fn calibrate(cfg: &RunConfig, lv: &Level) -> Result<(f64, f64)> {
    let c_emp = empirical_constant(&lv.sc, &lv.an, cfg.rho(), cfg.delta())?;
    let c_cal = match cfg.partition.c_cal {
        Calibration::Fixed(c) => c,
        Calibration::Auto(_) => c_emp,
    };
    if !c_cal.is_finite() {
        return Err(LabError::Numerical(
            "no finite constant satisfies the estimate".into(),
        ));
    }
    Ok((c_cal, c_emp))
}

/// Outcome of a run, before anything is written.
pub struct RunOutcome {
    pub report: Value,
    pub pass: bool,
    /// Node-level reports in check order.
    pub node_reports: Vec<CheckReport>,
    pub plot: Vec<PlotRow>,
    pub kind: DomainKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlotRow {
    pub coords: [f64; 2],
    pub t: f64,
    pub u: f64,
    pub w: f64,
    pub z: f64,
    pub theorem_margin: f64,
    pub lemma21_margin: Option<f64>,
}

fn to_value<T: Serialize>(x: &T) -> Result<Value> {
    serde_json::to_value(x).map_err(|e| LabError::Numerical(format!("serialisation: {e}")))
}

fn check_entry(r: &CheckReport) -> Result<Value> {
    to_value(r)
}

pub fn run(cfg: &RunConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    let mut levels = Levels::new(cfg)?;
    let (rho, delta) = (cfg.rho(), cfg.delta());
    let kind = levels.base().sc.domain.kind();

    let mut out = Map::new();
    let mut checks = Map::new();
    let mut pass = true;
    let mut node_reports = Vec::new();

    {
        let base = levels.base();
        let sc = &base.sc;
        let st = &base.an.structural;
        let pd = &base.an.parabolic;
        for (k, v) in [
            ("mu1", st.mu1),
            ("mu2", st.mu2),
            ("mu", st.mu),
            ("gamma1", st.gamma1),
            ("gamma2", st.gamma2),
            ("gamma3", st.gamma3),
            ("gamma", st.gamma),
            ("tau_u", pd.tau_u),
            ("sigma_u", pd.sigma_u),
        ] {
            out.insert(k.into(), value(v));
        }
        out.insert(
            "scenario".into(),
            json!({
                "kind": kind,
                "n": sc.domain.n(),
                "R": sc.domain.radius(),
                "k": sc.domain.k(),
                "h": sc.domain.h(),
                "dt": sc.u.max_dt(),
                "nodes": sc.domain.len(),
                "slices": sc.u.times().len(),
                "provenance": sc.provenance,
                "floor": value(sc.floor),
                "M": sc.m_bound(),
            }),
        );
    }

    let needs_c = cfg.checks.iter().any(|c| matches!(c, CheckKind::Theorem));
    let calibration = if needs_c {
        Some(calibrate(cfg, levels.base())?)
    } else {
        None
    };
    let c_for_scalars = calibration.map(|c| c.0).unwrap_or(0.0);
    let scalars = {
        let b = levels.base();
        RegimeScalars::new(
            &b.an.structural,
            &b.an.parabolic,
            b.sc.domain.radius(),
            b.sc.window.span,
            b.sc.domain.k(),
            rho,
            delta,
            c_for_scalars,
        )?
    };
    if let Value::Object(m) = to_value(&scalars)? {
        for (k, v) in m {
            out.insert(k, v);
        }
    }

    let mut lemma_tol: Option<ToleranceModel> = None;
    let mut lemma_last_slice: BTreeMap<usize, f64> = BTreeMap::new();
    let mut theorem_margins: Option<Vec<(usize, usize, f64)>> = None;

    for check in &cfg.checks {
        let key = check.key();
        let entry = match check {
            CheckKind::Hypotheses => {
                let h = &levels.base().sc.hypotheses;
                let ok = h.failure().is_none();
                pass &= ok;
                json!({"report": to_value(h)?, "failure": h.failure(), "pass": ok})
            }
            CheckKind::Lemma21 => {
                let tol = {
                    let b = levels.base();
                    fit_lemma_tolerance(cfg, &b.sc, &b.an)?
                };
                lemma_tol = Some(tol);
                let mut reports = Vec::new();
                for l in 0..cfg.refinement_levels {
                    let lv = levels.get(l)?;
                    let mut r = check_lemma21(&lv.sc, &lv.an, tol)?;
                    r.level = l;
                    reports.push(r);
                }
                let study = RefinementStudy::new(reports);
                let base_report = study.reports[0].clone();
                let last = base_report.nodes.iter().map(|n| n.slice).max().unwrap_or(0);
                for nm in base_report.nodes.iter().filter(|n| n.slice == last) {
                    lemma_last_slice.insert(nm.id, nm.margin);
                }
                let ok = study.reports.last().map(|r| r.pass).unwrap_or(false);
                pass &= ok;
                let v = json!({
                    "report": check_entry(&base_report)?,
                    "tolerance": {"A": tol.a, "B": tol.b},
                    "refinement": to_value(&study)?,
                    "convergence_order": study.convergence_order.map(value),
                    "pass": ok,
                });
                node_reports.push(base_report);
                v
            }
            CheckKind::Theorem => {
                let (c_cal, c_emp) = calibration.expect("calibrated above");
                let lv = levels.base();
                let mut r = check_theorem(&lv.sc, &lv.an, rho, delta, c_cal)?;
                r.c_emp = Some(c_emp);
                theorem_margins = Some(r.nodes.iter().map(|n| (n.id, n.slice, n.margin)).collect());
                let mut per_level = vec![value(c_emp)];
                for l in 1..cfg.refinement_levels {
                    let lv = levels.get(l)?;
                    per_level.push(value(empirical_constant(&lv.sc, &lv.an, rho, delta)?));
                }
                pass &= r.pass;
                let v = json!({
                    "report": check_entry(&r)?,
                    "C_emp": value(c_emp),
                    "C_emp_levels": per_level,
                    "pass": r.pass,
                });
                node_reports.push(r);
                v
            }
            CheckKind::Corollary => {
                let lv = levels.base();
                let r = check_corollary(&lv.sc, &lv.an)?;
                pass &= r.pass;
                let v = check_entry(&r)?;
                node_reports.push(r);
                v
            }
            CheckKind::Regimes => {
                let tol = if cfg.refinement_levels >= 2 {
                    let coarse = levels.base().an.w.clone();
                    regime_tolerance(&coarse, &levels.get(1)?.an.w)?
                } else {
                    0.0
                };
                let lv = levels.base();
                let r = check_regime_lemmas(&lv.sc, &lv.an, rho, delta, tol)?;
                pass &= r.pass();
                let mut lemmas = Map::new();
                for l in &r.lemmas {
                    lemmas.insert(l.name.clone(), check_entry(l)?);
                }
                let v = json!({
                    "lemmas": lemmas,
                    "combination": check_entry(&r.combination)?,
                    "tolerance": tol,
                    "pass": r.pass(),
                });
                node_reports.extend(r.lemmas);
                node_reports.push(r.combination);
                v
            }
            CheckKind::AppendixA => {
                let r = check_appendix_a(&levels.base().sc, &cfg.s0_sweep)?;
                pass &= r.pass;
                to_value(&r)?
            }
            CheckKind::AppendixB => {
                let lv = levels.base();
                let r = check_appendix_b(&lv.sc, lv.an.structural.gamma3)?;
                pass &= r.pass;
                to_value(&r)?
            }
            CheckKind::Liouville => {
                let r = check_liouville_decay(&cfg.liouville_radii, |rad| {
                    cfg.scenario.with_window_radius(rad).build()
                })?;
                pass &= r.pass;
                to_value(&r)?
            }
            CheckKind::Cutoffs => {
                let sc = &levels.base().sc;
                let base = (sc.domain.radius(), rho, sc.window.span, delta);
                let mut per = Vec::new();
                let mut ok = true;
                for &theta in &cfg.cutoff_thetas {
                    let r = check_cutoffs(theta, base, &cfg.cutoff_scales)?;
                    ok &= r.pass;
                    per.push(to_value(&r)?);
                }
                pass &= ok;
                json!({"thetas": per, "pass": ok})
            }
        };
        checks.insert(key.into(), entry);
    }
    if let Some(tol) = lemma_tol {
        out.insert("lemma21_tolerance".into(), json!({"A": tol.a, "B": tol.b}));
    }
    out.insert("checks".into(), Value::Object(checks));
    out.insert("pass".into(), Value::Bool(pass));

    let plot = plot_rows(
        cfg,
        levels.base(),
        c_for_scalars,
        theorem_margins,
        &lemma_last_slice,
    )?;
    Ok(RunOutcome {
        report: Value::Object(out),
        pass,
        node_reports,
        plot,
        kind,
    })
}

/// Ball nodes at the last interior slice.
fn plot_rows(
    cfg: &RunConfig,
    lv: &Level,
    c_cal: f64,
    theorem: Option<Vec<(usize, usize, f64)>>,
    lemma: &BTreeMap<usize, f64>,
) -> Result<Vec<PlotRow>> {
    let (sc, an) = (&lv.sc, &lv.an);
    let nt = sc.u.times().len();
    let j = nt.saturating_sub(2);
    let bound = compute_regime_bound(sc, an, cfg.rho(), cfg.delta(), c_cal)?;
    let thm: BTreeMap<usize, f64> = theorem
        .unwrap_or_default()
        .into_iter()
        .filter(|r| r.1 == j)
        .map(|r| (r.0, r.2))
        .collect();
    let s = bound.scalars;
    Ok(sc
        .domain
        .ball()
        .iter()
        .map(|&id| {
            let z = bound.z(id, j);
            let margin = thm.get(&id).copied().unwrap_or_else(|| {
                (s.c_cal * s.c_scalar + z) * an.gap.value(id, j) - an.lhs.value(id, j)
            });
            PlotRow {
                coords: sc.coords(id),
                t: sc.time(j),
                u: sc.u.value(id, j),
                w: an.w.value(id, j),
                z,
                theorem_margin: margin,
                lemma21_margin: lemma.get(&id).copied(),
            }
        })
        .collect())
}

fn space_header(kind: DomainKind) -> &'static str {
    if kind == DomainKind::Cartesian2d {
        "x,y"
    } else {
        "x"
    }
}

fn write_space<W: Write>(out: &mut W, kind: DomainKind, c: [f64; 2]) -> std::io::Result<()> {
    if kind == DomainKind::Cartesian2d {
        write!(out, "{},{}", c[0], c[1])
    } else {
        write!(out, "{}", c[0])
    }
}

/// `check,x[,y],t,lhs,rhs,margin,regime` for every node of every node-level check.
pub fn write_pernode<W: Write>(outcome: &RunOutcome, mut out: W) -> Result<()> {
    writeln!(
        out,
        "check,{},t,lhs,rhs,margin,regime",
        space_header(outcome.kind)
    )?;
    for r in &outcome.node_reports {
        for nm in &r.nodes {
            write!(out, "{},", r.name)?;
            write_space(&mut out, outcome.kind, nm.coords)?;
            let regime = nm.regime.map(|g| g.label()).unwrap_or("");
            writeln!(
                out,
                ",{},{},{},{},{}",
                nm.t, nm.lhs, nm.rhs, nm.margin, regime
            )?;
        }
    }
    Ok(())
}

pub fn write_plotdata<W: Write>(outcome: &RunOutcome, mut out: W) -> Result<()> {
    writeln!(
        out,
        "{},t,u,w,Z,theorem_margin,lemma21_margin",
        space_header(outcome.kind)
    )?;
    for row in &outcome.plot {
        write_space(&mut out, outcome.kind, row.coords)?;
        write!(
            out,
            ",{},{},{},{},{},",
            row.t, row.u, row.w, row.z, row.theorem_margin
        )?;
        match row.lemma21_margin {
            Some(m) => writeln!(out, "{m}")?,
            None => writeln!(out)?,
        }
    }
    Ok(())
}

/// Pretty JSON with sorted keys.
pub fn report_json(report: &Value) -> Result<String> {
    serde_json::to_string_pretty(report)
        .map_err(|e| LabError::Numerical(format!("serialisation: {e}")))
}

pub fn write_outputs(outcome: &RunOutcome, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(
        dir.join("report.json"),
        report_json(&outcome.report)? + "\n",
    )?;
    let mut f = BufWriter::new(fs::File::create(dir.join("pernode.csv"))?);
    write_pernode(outcome, &mut f)?;
    f.flush()?;
    let mut f = BufWriter::new(fs::File::create(dir.join("plotdata.csv"))?);
    write_plotdata(outcome, &mut f)?;
    f.flush()?;
    Ok(())
}

/// One row of a parameter sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub param: String,
    pub value: f64,
    pub c_emp: f64,
    pub corollary_c_emp: f64,
    pub worst_margin: f64,
    pub tol: f64,
    pub tol_space: f64,
    pub c_scalar: f64,
    pub t_scalar: f64,
    pub s_scalar: f64,
    pub pass: bool,
}

/// Re-runs the barrier inequality and the estimate for each value of one
/// parameter. The tolerance model is fitted once, on the base config.
pub fn sweep(cfg: &RunConfig, param: &str, values: &[f64]) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    let configs: Vec<RunConfig> = values
        .iter()
        .map(|&v| cfg.with_param(param, v))
        .collect::<Result<_>>()?;
    let base = cfg.scenario.build()?;
    let base_an = analyze(&base)?;
    let tol = fit_lemma_tolerance(cfg, &base, &base_an)?;
    let mut rows = Vec::new();
    for (c, &v) in configs.iter().zip(values) {
        let sc = c.scenario.build()?;
        let an = analyze(&sc)?;
        let (rho, delta) = (c.rho(), c.delta());
        let lemma = check_lemma21(&sc, &an, tol)?;
        let c_emp = empirical_constant(&sc, &an, rho, delta)?;
        let cor = check_corollary(&sc, &an)?;
        let s = RegimeScalars::new(
            &an.structural,
            &an.parabolic,
            sc.domain.radius(),
            sc.window.span,
            sc.domain.k(),
            rho,
            delta,
            c_emp.min(f64::MAX),
        )?;
        let theorem_ok = match c.partition.c_cal {
            Calibration::Fixed(cc) => check_theorem(&sc, &an, rho, delta, cc)?.pass,
            Calibration::Auto(_) => c_emp.is_finite(),
        };
        let h = sc.domain.h();
        rows.push(SweepRow {
            param: param.to_string(),
            value: v,
            c_emp,
            corollary_c_emp: cor.c_emp.unwrap_or(f64::NAN),
            worst_margin: lemma.worst_margin,
            tol: lemma.tolerance,
            tol_space: tol.a * h * h,
            c_scalar: s.c_scalar,
            t_scalar: s.t_scalar,
            s_scalar: s.s_scalar,
            pass: lemma.pass && theorem_ok,
        });
    }
    Ok(rows)
}

pub fn write_sweep<W: Write>(rows: &[SweepRow], mut out: W) -> Result<()> {
    writeln!(
        out,
        "param,value,C_emp,corollary_C_emp,worst_margin,tol,tol_space,C_scalar,T_scalar,S_scalar,pass"
    )?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.param,
            r.value,
            r.c_emp,
            r.corollary_c_emp,
            r.worst_margin,
            r.tol,
            r.tol_space,
            r.c_scalar,
            r.t_scalar,
            r.s_scalar,
            r.pass
        )?;
    }
    Ok(())
}
