//! Specialisations to the porous medium equation, to a gradient-dependent
//! source, and the decay behind the Liouville-type statement.

use serde::Serialize;

use crate::error::{LabError, Result};
use crate::fields::{Region, SpaceRegion, SpaceTimeField, TimeRegion};
use crate::nonlinearity::{power_law_constants, Family, Nonlinearity};
use crate::report::{num, num_vec};
use crate::scenario::{Diffusion, Scenario, Source, Window};

fn power_exponent(sc: &Scenario) -> Result<f64> {
    match *sc.nl.family() {
        Family::Power { p } => {
            power_law_constants(sc.domain.n(), p, 1.0)?;
            Ok(p)
        }
        _ => Err(LabError::Config(
            "a power-law nonlinearity is required".into(),
        )),
    }
}

/// `sup |∇u|/u` over a region.
pub fn gradient_sup(u: &SpaceTimeField, region: Region) -> Result<f64> {
    u.sup_over(region, |id, j| {
        let jet = u.jet(id, j)?;
        Ok(jet.grad_norm / jet.value)
    })
}

/// `sup |D²u| / u^e` over a region.
pub fn hessian_sup(u: &SpaceTimeField, region: Region, e: f64) -> Result<f64> {
    u.sup_over(region, |id, j| {
        let jet = u.jet(id, j)?;
        Ok(jet.hess_norm / jet.value.powf(e))
    })
}

fn half_region(sc: &Scenario) -> Region {
    Region::new(
        SpaceRegion::Within(sc.domain.radius() / 2.0),
        TimeRegion::Late(sc.window.span / 2.0),
    )
}

/// `ũ(x, t) = u(x, M^{1-p}(t - t0) + t0) / M` on the dilated window
/// `T̃ = M^{p-1} T`, as a scenario with `M = 1` and base point `s0`.
pub fn rescale_power_law(sc: &Scenario, s0: f64) -> Result<Scenario> {
    let p = power_exponent(sc)?;
    if sc.diffusion != (Diffusion::Constant { value: 1.0 }) {
        return Err(LabError::Config("rescaling needs a = 1".into()));
    }
    let m = sc.m_bound();
    let dilation = m.powf(1.0 - p);
    let t0 = sc.window.t0;
    let window = Window::new(t0, sc.window.span / dilation)?;
    let times: Vec<f64> =
        sc.u.times()
            .iter()
            .map(|t| t0 + (t - t0) / dilation)
            .collect();
    let scale = |f: &SpaceTimeField, c: f64| -> Result<SpaceTimeField> {
        SpaceTimeField::new(
            f.domain().clone(),
            times.clone(),
            f.slices()
                .iter()
                .map(|s| s.iter().map(|v| v * c).collect())
                .collect(),
        )
    };
    let u = scale(&sc.u, 1.0 / m)?;
    let nl = Nonlinearity::power(p, 1.0, s0, 0.0)?;
    let mut out = Scenario::from_field(
        window,
        nl,
        sc.diffusion.clone(),
        sc.source.clone(),
        u,
        sc.provenance,
    )?;
    let hs = m.powf(-p);
    out.source_table = sc.source_table.as_ref().map(|t| scale(t, hs)).transpose()?;
    out.source_grad_table = sc
        .source_grad_table
        .as_ref()
        .map(|t| scale(t, hs))
        .transpose()?;
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct AppendixAReport {
    pub p: f64,
    #[serde(rename = "M")]
    pub m_bound: f64,
    pub dilation: f64,
    pub rescaled_span: f64,
    pub residual_original: f64,
    pub residual_rescaled: f64,
    pub residual_ok: bool,
    pub bracket: f64,
    #[serde(serialize_with = "num")]
    pub c_emp: f64,
    pub s0_values: Vec<f64>,
    #[serde(serialize_with = "num_vec")]
    pub s0_constants: Vec<f64>,
    #[serde(serialize_with = "num")]
    pub s0_limit: f64,
    pub s0_monotone: bool,
    pub pass: bool,
}

/// Rescaling, the porous-medium gradient bound, and the `s0 → ∞` path.
pub fn check_appendix_a(sc: &Scenario, s0_values: &[f64]) -> Result<AppendixAReport> {
    let p = power_exponent(sc)?;
    let m = sc.m_bound();
    let s0_min = 2f64.powf(1.0 / (1.0 - p));
    let rescaled = rescale_power_law(sc, s0_min)?;
    let nt = sc.u.times().len();
    let res_u = sc.max_discrete_residual(0..nt)?;
    let res_t = rescaled.max_discrete_residual(0..nt)?;
    let residual_ok = res_t <= m.powf(-p) * res_u + 1e-10;

    let radius = sc.domain.radius();
    let bracket =
        1.0 / radius + m.powf((1.0 - p) / 2.0) / sc.window.span.sqrt() + sc.domain.k_plus().sqrt();
    let region = half_region(&rescaled);
    let sup = gradient_sup(&rescaled.u, region)?;
    let c_emp = sup / bracket;

    let mut s0_constants = Vec::new();
    for &s0 in s0_values {
        if s0 < s0_min {
            return Err(LabError::Domain(format!("s0 = {s0} is below {s0_min}")));
        }
        let nl = rescaled.nl.with_s0(s0)?;
        let ratio = rescaled.u.sup_over(region, |id, j| {
            let jet = rescaled.u.jet(id, j)?;
            let v = jet.value;
            let gp = nl.big_g_prime(v);
            Ok((1.0 - p) * gp * jet.grad_norm / (v * gp - p * s0.powf(p - 1.0)))
        })?;
        s0_constants.push(ratio / bracket);
    }
    let s0_limit = (1.0 - p) * c_emp;
    let dist: Vec<f64> = s0_constants.iter().map(|c| c - s0_limit).collect();
    let s0_monotone = dist.iter().all(|d| *d >= -0.05 * s0_limit)
        && dist.windows(2).all(|w| w[1] <= w[0] + 0.05 * s0_limit);
    Ok(AppendixAReport {
        p,
        m_bound: m,
        dilation: m.powf(1.0 - p),
        rescaled_span: rescaled.window.span,
        residual_original: res_u,
        residual_rescaled: res_t,
        residual_ok,
        bracket,
        c_emp,
        pass: residual_ok && c_emp.is_finite() && s0_monotone,
        s0_values: s0_values.to_vec(),
        s0_constants,
        s0_limit,
        s0_monotone,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct AppendixBReport {
    pub p: f64,
    pub q: f64,
    pub eps: f64,
    pub m: f64,
    #[serde(rename = "M")]
    pub m_bound: f64,
    /// `sup |∇u|/u` over the full window.
    pub grad_sup: f64,
    /// `sup |D²u| / u^{3-p-q}` over the full window.
    pub hess_sup: f64,
    /// `sup |∇u|/u` on the half ball and half window.
    pub grad_sup_half: f64,
    pub bracket: f64,
    #[serde(serialize_with = "num")]
    pub c_emp: f64,
    pub gamma3: f64,
    pub pass: bool,
}

/// Bound on `sup |∇u|/u` over the half cylinder for `u_t = a Δu^p + ε|∇u|^q`.
pub fn check_appendix_b(sc: &Scenario, gamma3: f64) -> Result<AppendixBReport> {
    let p = power_exponent(sc)?;
    let Source::GradientPower { eps, q } = sc.source else {
        return Err(LabError::Config(
            "a gradient_power source is required".into(),
        ));
    };
    if !(q > 1.0 && q < 4.0) {
        return Err(LabError::Domain(format!("q = {q} must lie in (1, 4)")));
    }
    let full = Region::new(SpaceRegion::Ball, TimeRegion::All);
    let m_lo = sc.u.sup_over(full, |id, j| Ok(-sc.u.value(id, j)))?.abs();
    let m_hi = sc.u.sup(full)?;
    let grad_sup = gradient_sup(&sc.u, full)?;
    let hess_sup = hessian_sup(&sc.u, full, 3.0 - p - q)?;
    let grad_sup_half = gradient_sup(&sc.u, half_region(sc))?;
    let k = sc.domain.k();
    let radius = sc.domain.radius();
    let e = (1.0 - p) / 2.0;
    let bracket = k.max(0.0).sqrt() * m_hi.powf(e) / m_lo.powf(e)
        + eps.cbrt()
            * m_hi.powf((2.0 - 2.0 * p) / 3.0)
            * grad_sup.powf((q - 1.0) / 3.0)
            * hess_sup.cbrt()
        + 1.0 / radius
        + m_hi.powf(e) / sc.window.span.sqrt()
        + sc.domain.k_plus().powf(0.25) / radius.sqrt();
    let c_emp = grad_sup_half / bracket;
    Ok(AppendixBReport {
        p,
        q,
        eps,
        m: m_lo,
        m_bound: m_hi,
        grad_sup,
        hess_sup,
        grad_sup_half,
        bracket,
        c_emp,
        gamma3,
        pass: grad_sup.is_finite() && hess_sup.is_finite() && c_emp.is_finite(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", content = "reason", rename_all = "snake_case")]
pub enum Premise {
    Holds,
    Violated(String),
}

#[derive(Debug, Clone, Serialize)]
pub struct LiouvilleReport {
    pub radii: Vec<f64>,
    /// `sup u` over each full window.
    pub u_sups: Vec<f64>,
    /// `sup |∇u|/u` on `B_{R/2} × [t0 - R²/2, t0]`.
    pub grad_sups: Vec<f64>,
    /// `R · sup |∇u|/u`.
    pub scaled: Vec<f64>,
    /// Least-squares slope of `log sup` against `log(1/R)`.
    #[serde(serialize_with = "num")]
    pub decay_slope: f64,
    /// `sup |∇u|` at the largest window.
    #[serde(serialize_with = "num")]
    pub final_gradient: f64,
    pub premise: Premise,
    pub nonincreasing: bool,
    pub pass: bool,
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let cov: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    cov / var
}

/// Gradient decay over nested windows `R`, `T = R²`. A family that cannot be
/// built on a window, or whose `sup u / R` does not decrease, is reported as
/// violating the growth premise rather than failing.
pub fn check_liouville_decay(
    radii: &[f64],
    family: impl Fn(f64) -> Result<Scenario>,
) -> Result<LiouvilleReport> {
    let mut u_sups = Vec::new();
    let mut grad_sups = Vec::new();
    let mut final_gradient = f64::NAN;
    let mut premise = Premise::Holds;
    for &r in radii {
        let sc = match family(r) {
            Ok(sc) => sc,
            Err(
                e @ (LabError::Range { .. }
                | LabError::Positivity { .. }
                | LabError::Config(_)
                | LabError::Domain(_)),
            ) => {
                premise = Premise::Violated(format!("R = {r}: {e}"));
                break;
            }
            Err(e) => return Err(e),
        };
        if !(matches!(sc.source, Source::Zero)
            && sc.diffusion.is_time_only()
            && sc.domain.k() == 0.0)
        {
            return Err(LabError::Config(
                "decay check needs H = 0, a = a(t) and k = 0".into(),
            ));
        }
        let full = Region::new(SpaceRegion::Ball, TimeRegion::All);
        u_sups.push(sc.u.sup(full)?);
        grad_sups.push(gradient_sup(&sc.u, half_region(&sc))?);
        final_gradient =
            sc.u.sup_over(full, |id, j| Ok(sc.u.jet(id, j)?.grad_norm))?;
    }
    if premise == Premise::Holds {
        let growth: Vec<f64> = u_sups.iter().zip(radii).map(|(s, r)| s / r).collect();
        if !growth.windows(2).all(|w| w[1] < w[0]) {
            premise = Premise::Violated("sup u / R does not decrease".into());
        }
    }
    let scaled: Vec<f64> = grad_sups.iter().zip(radii).map(|(g, r)| g * r).collect();
    let nonincreasing = scaled.windows(2).all(|w| w[1] <= 1.1 * w[0]);
    let decay_slope = if grad_sups.len() >= 2 && grad_sups.iter().all(|g| *g > 0.0) {
        let xs: Vec<f64> = radii[..grad_sups.len()]
            .iter()
            .map(|r| (1.0 / r).ln())
            .collect();
        let ys: Vec<f64> = grad_sups.iter().map(|g| g.ln()).collect();
        slope(&xs, &ys)
    } else {
        f64::NAN
    };
    let pass = match premise {
        Premise::Holds => nonincreasing,
        Premise::Violated(_) => true,
    };
    Ok(LiouvilleReport {
        radii: radii.to_vec(),
        u_sups,
        grad_sups,
        scaled,
        decay_slope,
        final_gradient,
        premise,
        nonincreasing,
        pass,
    })
}
