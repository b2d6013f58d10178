//! One line per acceptance criterion; exits nonzero if any fails.

use std::path::PathBuf;
use std::process::Command;

use estimate_lab::checker::{
    check_appendix_a, check_appendix_b, check_corollary, check_cutoffs, check_lemma21,
    check_liouville_decay, check_regime_lemmas, check_theorem, empirical_constant, gradient_sup,
    hessian_sup, Premise, RefinementStudy,
};
use estimate_lab::config::RunConfig;
use estimate_lab::estimator::analyze;
use estimate_lab::fields::{jet_of, Region, SpaceRegion, TimeRegion};
use estimate_lab::geometry::Domain;
use estimate_lab::nonlinearity::{check_hypotheses, power_law_constants, DEFAULT_SAMPLES};
use estimate_lab::runner::{fit_lemma_tolerance, regime_tolerance, report_json, run};
use estimate_lab::scenario::Target;
use estimate_lab::Result;

fn config(name: &str) -> RunConfig {
    let path = repo().join("configs").join(name);
    RunConfig::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap()
}

fn repo() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Result<Outcome>);

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

/// Gaussian heat kernel: `t|∇u|²/u² = x²/(4t)`.
fn gaussian_identity() -> Result<Outcome> {
    let h = 0.02;
    let t = 1.0;
    let dom = Domain::segment(0.0, 2.0, h)?;
    let kernel = Target::GaussianFloor {
        floor: 0.0,
        shift: 0.0,
        amplitude: 1.0,
    };
    let slice: Vec<f64> = dom
        .nodes()
        .iter()
        .map(|nd| kernel.value(&dom, nd.coords, t))
        .collect();
    let (mut exact_err, mut fd_err) = (0.0_f64, 0.0_f64);
    for &id in dom.ball() {
        let x = dom.node(id).coords[0];
        if x == 0.0 || dom.node(id).boundary {
            continue;
        }
        let want = x * x / (4.0 * t);
        let s = kernel.sample(&dom, [x, 0.0], t);
        let analytic = t * s.grad_norm.powi(2) / s.value.powi(2);
        exact_err = exact_err.max((analytic / want - 1.0).abs());
        let jet = jet_of(&dom, &slice, id)?;
        let fd = t * jet.grad_norm.powi(2) / jet.value.powi(2);
        fd_err = fd_err.max((fd / want - 1.0).abs());
    }
    outcome(
        exact_err <= 1e-10 && fd_err <= 5.0 * h * h,
        format!(
            "analytic rel err {exact_err:.2e} (<= 1e-10), differences {fd_err:.2e} (<= {:.2e})",
            5.0 * h * h
        ),
    )
}

fn hypothesis_constants() -> Result<Outcome> {
    let c = power_law_constants(2, 0.75, 1.0)?;
    let want = 1.0 - 2f64.sqrt() / 4.0;
    let kappa_err = (c.kappa - want).abs();
    let nl = c.nonlinearity(0.75, 1.0)?;
    let rep = check_hypotheses(&nl, 2, DEFAULT_SAMPLES)?;
    let sampled = rep.kappa_min >= c.kappa - 1e-9;
    let rejected = power_law_constants(2, 0.25, 1.0).is_err();
    outcome(
        kappa_err <= 1e-12 && sampled && rejected && rep.sample_count >= 10_000,
        format!(
            "kappa err {kappa_err:.1e}, sampled inf {:.12} on {} points, p = 0.25 rejected: {rejected}",
            rep.kappa_min, rep.sample_count
        ),
    )
}

/// Barrier inequality on the manufactured cosine scenario at three levels.
fn barrier_certification() -> Result<Outcome> {
    let cfg = config("wave_power.json");
    let base = cfg.scenario.build()?;
    let tol = fit_lemma_tolerance(&cfg, &base, &analyze(&base)?)?;
    let mut reports = Vec::new();
    for l in 0..3 {
        let f = 0.5f64.powi(l);
        let sc = cfg.scenario.build_scaled(f, f)?;
        reports.push(check_lemma21(&sc, &analyze(&sc)?, tol)?);
    }
    let study = RefinementStudy::new(reports);
    let shrink = study.violations_shrink_by(2.8);
    let final_violations = study.reports.last().unwrap().violations;
    let cauchy = study.margin_changes.windows(2).all(|w| w[0] >= 2.8 * w[1]);
    outcome(
        shrink && final_violations == 0 && cauchy,
        format!(
            "worst violations {:?}, final violations beyond tol {final_violations}, margin changes {:?} (ratio >= 2.8: {cauchy})",
            study.worst_violations, study.margin_changes
        ),
    )
}

fn theorem_non_vacuity() -> Result<Outcome> {
    let cfg = config("gaussian_heat.json");
    let (rho, delta) = (cfg.rho(), cfg.delta());
    let mut cs = Vec::new();
    let mut brackets = true;
    for l in 0..3 {
        let f = 0.5f64.powi(l);
        let sc = cfg.scenario.build_scaled(f, f)?;
        let an = analyze(&sc)?;
        let c = empirical_constant(&sc, &an, rho, delta)?;
        if l == 0 {
            brackets = c.is_finite()
                && c > 0.0
                && check_theorem(&sc, &an, rho, delta, c * 1.000001)?.pass
                && !check_theorem(&sc, &an, rho, delta, c * 0.999)?.pass;
        }
        cs.push(c);
    }
    let ratio =
        cs.iter().cloned().fold(0.0, f64::max) / cs.iter().cloned().fold(f64::INFINITY, f64::min);
    outcome(
        brackets && (0.8..=1.25).contains(&ratio),
        format!("C_emp per level {cs:?}, passes above / fails below: {brackets}, ratio {ratio:.6}"),
    )
}

fn corollary_structure() -> Result<Outcome> {
    let cfg = config("gaussian_heat.json");
    let mut cs = Vec::new();
    let mut identities = 0.0_f64;
    let mut all_pass = true;
    for l in 0..3 {
        let f = 0.5f64.powi(l);
        let sc = cfg.scenario.build_scaled(f, f)?;
        let r = check_corollary(&sc, &analyze(&sc)?)?;
        identities = identities
            .max(r.extras["T_identity_error"])
            .max(r.extras["S_identity_error"]);
        all_pass &= r.pass;
        cs.push(r.c_emp.unwrap_or(f64::INFINITY));
    }
    let finite = cs.iter().all(|c| c.is_finite());
    let ratio =
        cs.iter().cloned().fold(0.0, f64::max) / cs.iter().cloned().fold(f64::INFINITY, f64::min);
    outcome(
        identities <= 1e-12 && all_pass && finite && (0.8..=1.25).contains(&ratio),
        format!("identity err {identities:.1e}, C_emp per level {cs:?}, ratio {ratio:.6}"),
    )
}

fn regime_lemmas() -> Result<Outcome> {
    let mut ok = true;
    let mut parts = Vec::new();
    for name in ["wave_power.json", "gaussian_heat.json"] {
        let cfg = config(name);
        let sc = cfg.scenario.build()?;
        let an = analyze(&sc)?;
        let fine = cfg.scenario.build_scaled(0.5, 0.5)?;
        let tol = regime_tolerance(&an.w, &analyze(&fine)?.w)?;
        let r = check_regime_lemmas(&sc, &an, cfg.rho(), cfg.delta(), tol)?;
        let finite = r.lemmas.iter().all(|l| l.c_emp.is_some_and(f64::is_finite));
        ok &= r.pass() && finite && r.combination.violations == 0;
        let cs: Vec<String> = r
            .lemmas
            .iter()
            .map(|l| format!("{:.3e}", l.c_emp.unwrap_or(f64::NAN)))
            .collect();
        parts.push(format!(
            "{name}: C [{}], combination worst margin {:.2e}",
            cs.join(", "),
            r.combination.worst_margin
        ));
    }
    outcome(ok, parts.join("; "))
}

fn cutoff_constants() -> Result<Outcome> {
    let mut ok = true;
    let mut parts = Vec::new();
    for theta in [0.5, 0.75] {
        let r = check_cutoffs(theta, (1.0, 0.5, 1.0, 0.25), &[0.25, 1.0, 4.0, 16.0])?;
        let finite = r
            .spatial
            .iter()
            .chain(&r.temporal)
            .all(|p| p[2].is_finite());
        ok &= r.pass && finite;
        parts.push(format!(
            "theta {theta}: spatial C {:.4} spread {:.1e}, temporal C {:.4} spread {:.1e}",
            r.spatial[0][2], r.spatial_spread, r.temporal[0][2], r.temporal_spread
        ));
    }
    outcome(ok, parts.join("; "))
}

fn appendix_a() -> Result<Outcome> {
    let cfg = config("barenblatt.json");
    let mut cs = Vec::new();
    let mut ok = true;
    let mut detail = String::new();
    for l in 0..2 {
        let f = 0.5f64.powi(l);
        let sc = cfg.scenario.build_scaled(f, f)?;
        let r = check_appendix_a(&sc, &[16.0, 64.0, 256.0])?;
        ok &= r.residual_ok && r.s0_monotone && r.m_bound == 2.0 && r.p == 0.75;
        cs.push(r.c_emp);
        if l == 0 {
            detail = format!(
                "residuals {:.2e} vs {:.2e}, s0 constants {:?} -> {:.4}",
                r.residual_rescaled, r.residual_original, r.s0_constants, r.s0_limit
            );
        }
    }
    let ratio = cs[1] / cs[0];
    outcome(
        ok && (0.8..=1.2).contains(&ratio),
        format!("{detail}, C_emp {cs:?}"),
    )
}

fn appendix_b() -> Result<Outcome> {
    let cfg = config("gradient_source.json");
    let mut cs = Vec::new();
    let mut ok = true;
    for eps in [0.001, 0.01, 0.1] {
        let sc = cfg.with_param("epsilon", eps)?.scenario.build()?;
        let an = analyze(&sc)?;
        let r = check_appendix_b(&sc, an.structural.gamma3)?;
        let full = Region::new(SpaceRegion::Ball, TimeRegion::All);
        let f_sup = gradient_sup(&sc.u, full)?;
        let h_sup = hessian_sup(&sc.u, full, 3.0 - r.p - r.q)?;
        ok &= r.pass && f_sup.is_finite() && h_sup.is_finite() && r.c_emp.is_finite();
        cs.push(r.c_emp);
    }
    let lo = cs.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = cs.iter().cloned().fold(0.0, f64::max);
    let spread = hi / lo - 1.0;
    outcome(
        ok && spread < 0.5,
        format!("C_emp over eps {cs:?}, spread {spread:.3}"),
    )
}

fn liouville_decay() -> Result<Outcome> {
    let cfg = config("liouville.json");
    let r = check_liouville_decay(&[1.0, 2.0, 4.0, 8.0], |rad| {
        cfg.scenario.with_window_radius(rad).build()
    })?;
    outcome(
        r.premise == Premise::Holds && r.nonincreasing,
        format!(
            "R sup |grad u|/u = {:?}, slope {:.3}",
            r.scaled, r.decay_slope
        ),
    )
}

fn determinism() -> Result<Outcome> {
    let cfg = config("wave_power.json");
    let a = report_json(&run(&cfg)?.report)?;
    let b = report_json(&run(&cfg)?.report)?;
    let dir = tempfile::tempdir()?;
    let bin = env!("CARGO_BIN_EXE_estimate-lab");
    let path = repo().join("configs/gaussian_heat.json");
    let mut files = Vec::new();
    for i in 0..2 {
        let out = dir.path().join(i.to_string());
        let res = Command::new(bin)
            .arg("run")
            .arg(&path)
            .arg("--out")
            .arg(&out)
            .output()?;
        if !res.status.success() {
            return outcome(false, format!("cli exit {}", res.status));
        }
        files.push(std::fs::read(out.join("report.json"))?);
    }
    outcome(
        a == b && files[0] == files[1],
        format!(
            "library reports identical: {}, cli report.json identical: {}",
            a == b,
            files[0] == files[1]
        ),
    )
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("gaussian identity", gaussian_identity),
        ("hypothesis constants", hypothesis_constants),
        ("barrier inequality certification", barrier_certification),
        ("global estimate non-vacuity", theorem_non_vacuity),
        ("local estimate structure", corollary_structure),
        ("regional bounds", regime_lemmas),
        ("cutoff constants", cutoff_constants),
        ("porous medium rescaling", appendix_a),
        ("gradient source", appendix_b),
        ("gradient decay", liouville_decay),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let (pass, detail) = match f() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {}: {name}: {detail}",
            i + 1,
            if pass { "PASS" } else { "FAIL" }
        );
    }
    println!(
        "acceptance: {} of {} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
