//! The diffusion nonlinearity `F` and everything derived from it.
//!
//! `G(s) = ∫_{s0}^{s} F'(h)/h dh`, `g(r) = G(e^r)` and the weight
//! `λ(r) = g'/(ξ - g) - 1 + √n |g''| / (2 g')` all live here, together with the
//! sampled check of the structural conditions on `F` over `(0, M]`.

use num_dual::DualNum;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::quadrature::adaptive_simpson;

/// Relative tolerance for the quadrature behind `G` of custom families.
pub const QUADRATURE_REL_TOL: f64 = 1e-10;

/// Default number of geometric samples used by [`check_hypotheses`].
pub const DEFAULT_SAMPLES: usize = 10_000;

/// Smallest sampled `s`, relative to `M`.
const SAMPLE_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Family {
    /// `F(s) = s`.
    Identity,
    /// `F(s) = s^p`, `p < 1`.
    Power { p: f64 },
    /// `F(s) = Σ c_i s^i`; `G` is obtained by quadrature.
    Custom { coeffs: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Nonlinearity {
    family: Family,
    m_bound: f64,
    s0: f64,
    xi: f64,
}

impl Nonlinearity {
    /// Identity family with the canonical choice `ξ = 1`, `s0 = M`.
    pub fn identity(m_bound: f64) -> Result<Self> {
        Self::new(Family::Identity, m_bound, m_bound, 1.0)
    }

    /// Power family with caller-chosen `s0` and `ξ`. See [`power_law_constants`]
    /// for the admissible choice.
    pub fn power(p: f64, m_bound: f64, s0: f64, xi: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(LabError::Domain(format!(
                "power family needs p in (0, 1), got {p}; p = 1 is the identity family"
            )));
        }
        Self::new(Family::Power { p }, m_bound, s0, xi)
    }

    /// Polynomial `F(s) = Σ coeffs[i] s^i`.
    pub fn custom(coeffs: Vec<f64>, m_bound: f64, s0: f64, xi: f64) -> Result<Self> {
        if coeffs.len() < 2 || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(LabError::Domain(
                "custom family needs at least two finite coefficients".into(),
            ));
        }
        Self::new(Family::Custom { coeffs }, m_bound, s0, xi)
    }

    pub fn new(family: Family, m_bound: f64, s0: f64, xi: f64) -> Result<Self> {
        if !(m_bound > 0.0 && m_bound.is_finite()) {
            return Err(LabError::Domain(format!(
                "M must be positive, got {m_bound}"
            )));
        }
        if !(s0 > 0.0 && s0.is_finite()) {
            return Err(LabError::Domain(format!("s0 must be positive, got {s0}")));
        }
        if !xi.is_finite() {
            return Err(LabError::Domain("xi must be finite".into()));
        }
        Ok(Self {
            family,
            m_bound,
            s0,
            xi,
        })
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn m_bound(&self) -> f64 {
        self.m_bound
    }

    pub fn s0(&self) -> f64 {
        self.s0
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    /// Same `F`, new base point `s0`.
    pub fn with_s0(&self, s0: f64) -> Result<Self> {
        Self::new(self.family.clone(), self.m_bound, s0, self.xi)
    }

    /// `F` evaluated on any dual number type; used for independent
    /// composition checks of `Δ(F(u))`.
    pub fn f_generic<D: DualNum<Primitive = f64> + Copy>(&self, s: D) -> D {
        match &self.family {
            Family::Identity => s,
            Family::Power { p } => s.powf(*p),
            Family::Custom { coeffs } => {
                let mut acc = D::from(0.0);
                for c in coeffs.iter().rev() {
                    acc = acc * s + D::from(*c);
                }
                acc
            }
        }
    }

    pub fn f(&self, s: f64) -> f64 {
        self.f_generic(s)
    }

    pub fn df(&self, s: f64) -> f64 {
        match &self.family {
            Family::Identity => 1.0,
            Family::Power { p } => p * s.powf(p - 1.0),
            Family::Custom { coeffs } => {
                let mut acc = 0.0;
                for (i, c) in coeffs.iter().enumerate().skip(1).rev() {
                    acc = acc * s + i as f64 * c;
                }
                acc
            }
        }
    }

    pub fn d2f(&self, s: f64) -> f64 {
        match &self.family {
            Family::Identity => 0.0,
            Family::Power { p } => p * (p - 1.0) * s.powf(p - 2.0),
            Family::Custom { coeffs } => {
                let mut acc = 0.0;
                for (i, c) in coeffs.iter().enumerate().skip(2).rev() {
                    acc = acc * s + (i * (i - 1)) as f64 * c;
                }
                acc
            }
        }
    }

    /// `G(s) = ∫_{s0}^{s} F'(h)/h dh`.
    pub fn eval_big_g(&self, s: f64) -> Result<f64> {
        if !(s > 0.0) {
            return Err(LabError::Domain(format!("G is defined for s > 0, got {s}")));
        }
        match &self.family {
            Family::Identity => Ok((s / self.s0).ln()),
            Family::Power { p } => Ok(p / (1.0 - p) * (self.s0.powf(p - 1.0) - s.powf(p - 1.0))),
            // substituting h = e^y turns F'(h)/h dh into F'(e^y) dy
            Family::Custom { .. } => adaptive_simpson(
                |y| self.df(y.exp()),
                self.s0.ln(),
                s.ln(),
                QUADRATURE_REL_TOL,
            ),
        }
    }

    /// `ξ - G(s)`, with the power family evaluated without cancellation.
    pub fn xi_minus_g(&self, s: f64) -> Result<f64> {
        match &self.family {
            Family::Power { p } if s > 0.0 => {
                Ok(self.xi + p / (1.0 - p) * (s.powf(p - 1.0) - self.s0.powf(p - 1.0)))
            }
            _ => Ok(self.xi - self.eval_big_g(s)?),
        }
    }

    /// `G'(s) = F'(s)/s`.
    pub fn big_g_prime(&self, s: f64) -> f64 {
        self.df(s) / s
    }

    fn check_log_domain(&self, r: f64) -> Result<f64> {
        let s = r.exp();
        if s > self.m_bound * (1.0 + 1e-12) {
            return Err(LabError::Domain(format!(
                "e^r = {s} exceeds the solution bound M = {}",
                self.m_bound
            )));
        }
        Ok(s)
    }

    /// `g(r) = G(e^r)`.
    pub fn eval_g(&self, r: f64) -> Result<f64> {
        let s = self.check_log_domain(r)?;
        self.eval_big_g(s)
    }

    /// `(g'(r), g''(r)) = (F'(e^r), e^r F''(e^r))`.
    pub fn eval_g_derivs(&self, r: f64) -> Result<(f64, f64)> {
        let s = self.check_log_domain(r)?;
        Ok((self.df(s), s * self.d2f(s)))
    }

    /// `λ(r) = g'/(ξ - g) - 1 + √n |g''| / (2 g')`.
    pub fn eval_lambda(&self, n: usize, r: f64) -> Result<f64> {
        let s = self.check_log_domain(r)?;
        let gap = self.xi_minus_g(s)?;
        let (g1, g2) = (self.df(s), s * self.d2f(s));
        lambda_from_parts(n, g1, g2, gap)
    }
}

/// `λ` from its ingredients; shared by the node-wise checks.
pub fn lambda_from_parts(n: usize, g1: f64, g2: f64, gap: f64) -> Result<f64> {
    if !(gap > 0.0) {
        return Err(LabError::Hypothesis(format!(
            "xi - g = {gap} is not positive"
        )));
    }
    if !(g1 > 0.0) {
        return Err(LabError::Hypothesis(format!("g' = {g1} is not positive")));
    }
    Ok(g1 / gap - 1.0 + (n as f64).sqrt() * g2.abs() / (2.0 * g1))
}

/// Sampled structural conditions on `F` over `(0, M]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisReport {
    /// inf of `1 - √n |F''| s / F'`.
    pub kappa_min: f64,
    /// inf of `ξ - G`.
    pub eta_min: f64,
    /// sup of `F' / (ξ - G)`.
    pub gamma_max: f64,
    /// inf of `2F' - √n |F''| s (ξ - G) / F'`.
    pub xi_min: f64,
    pub sample_count: usize,
    pub fprime_positive: bool,
    pub all_satisfied: bool,
}

impl HypothesisReport {
    /// First failing condition, phrased for error messages.
    pub fn failure(&self) -> Option<String> {
        if !self.fprime_positive {
            Some("F' > 0 fails on (0, M]".into())
        } else if !(self.kappa_min > 0.0) {
            Some(format!(
                "1 - sqrt(n)|F''|s/F' >= kappa > 0 fails (inf = {})",
                self.kappa_min
            ))
        } else if !(self.eta_min > 0.0) {
            Some(format!("xi - G >= eta > 0 fails (inf = {})", self.eta_min))
        } else if !self.gamma_max.is_finite() {
            Some("F'/(xi - G) <= Gamma fails (unbounded)".into())
        } else if !(self.xi_min >= 0.0) {
            Some(format!(
                "2F' - sqrt(n)|F''|s(xi - G)/F' >= 0 fails (inf = {})",
                self.xi_min
            ))
        } else {
            None
        }
    }
}

/// Geometric sample grid of `(0, M]` plus `M` and `min(s0, M)`.
pub fn hypothesis_samples(nl: &Nonlinearity, samples: usize) -> Vec<f64> {
    let m = nl.m_bound();
    let lo = m * SAMPLE_FLOOR;
    let ratio = (m / lo).ln();
    let mut out: Vec<f64> = (0..samples)
        .map(|i| lo * (ratio * i as f64 / (samples - 1) as f64).exp())
        .collect();
    out.push(m);
    out.push(nl.s0().min(m));
    out
}

/// Evaluates the four structural conditions on a geometric grid of `(0, M]`.
pub fn check_hypotheses(nl: &Nonlinearity, n: usize, samples: usize) -> Result<HypothesisReport> {
    if samples < 2 {
        return Err(LabError::Domain("need at least 2 samples".into()));
    }
    let sqrt_n = (n as f64).sqrt();
    let grid = hypothesis_samples(nl, samples);
    let mut kappa_min = f64::INFINITY;
    let mut eta_min = f64::INFINITY;
    let mut gamma_max = 0.0_f64;
    let mut xi_min = f64::INFINITY;
    let mut fprime_positive = true;
    for &s in &grid {
        let d1 = nl.df(s);
        let d2 = nl.d2f(s);
        if !(d1 > 0.0) {
            fprime_positive = false;
            continue;
        }
        let gap = nl.xi_minus_g(s).unwrap_or(f64::NAN);
        let ratio = sqrt_n * d2.abs() * s / d1;
        kappa_min = kappa_min.min(1.0 - ratio);
        if gap.is_nan() {
            eta_min = f64::NAN;
            gamma_max = f64::INFINITY;
            continue;
        }
        eta_min = eta_min.min(gap);
        gamma_max = if gap > 0.0 {
            gamma_max.max(d1 / gap)
        } else {
            f64::INFINITY
        };
        xi_min = xi_min.min(2.0 * d1 - ratio * gap);
    }
    let all_satisfied = fprime_positive
        && kappa_min > 0.0
        && eta_min > 0.0
        && gamma_max.is_finite()
        && xi_min >= 0.0;
    Ok(HypothesisReport {
        kappa_min,
        eta_min,
        gamma_max,
        xi_min,
        sample_count: grid.len(),
        fprime_positive,
        all_satisfied,
    })
}

/// Structural constants for `F(s) = s^p` on `(0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLawConstants {
    pub kappa: f64,
    pub eta: f64,
    pub gamma_bound: f64,
    pub xi: f64,
    pub s0: f64,
}

/// Admissible open range of exponents in dimension `n`.
pub fn admissible_power_range(n: usize) -> (f64, f64) {
    (1.0 - 1.0 / (n as f64).sqrt(), 1.0)
}

/// Closed-form constants `ξ = 0`, `s0 = 2^{1/(1-p)}`, `η = p / (2(1-p))`,
/// `κ = √n (p - 1 + 1/√n)`, `Γ = 2(1 - p)` for a solution bounded by `M <= 1`.
pub fn power_law_constants(n: usize, p: f64, m_bound: f64) -> Result<PowerLawConstants> {
    if n == 0 {
        return Err(LabError::Domain("dimension must be at least 1".into()));
    }
    if n > 4 {
        return Err(LabError::Domain(format!(
            "power-law constants need n <= 4 for 2F' - sqrt(n)|F''|s(xi - G)/F' >= 0, got n = {n}"
        )));
    }
    let (lo, hi) = admissible_power_range(n);
    if p == 1.0 {
        return Err(LabError::Domain(
            "p = 1 is the identity family; use it instead of the power family".into(),
        ));
    }
    if !(p > lo && p < hi) {
        return Err(LabError::Domain(format!(
            "p = {p} outside the admissible range (1 - 1/sqrt(n), 1] = ({lo:.6}, 1] for n = {n}"
        )));
    }
    if !(m_bound > 0.0 && m_bound <= 1.0) {
        return Err(LabError::Domain(format!(
            "power-law constants need 0 < M <= 1 (rescale u by M first), got M = {m_bound}"
        )));
    }
    let sqrt_n = (n as f64).sqrt();
    Ok(PowerLawConstants {
        kappa: sqrt_n * (p - 1.0 + 1.0 / sqrt_n),
        eta: p / (2.0 * (1.0 - p)),
        gamma_bound: 2.0 * (1.0 - p),
        xi: 0.0,
        s0: 2f64.powf(1.0 / (1.0 - p)),
    })
}

impl PowerLawConstants {
    pub fn nonlinearity(&self, p: f64, m_bound: f64) -> Result<Nonlinearity> {
        Nonlinearity::power(p, m_bound, self.s0, self.xi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn identity_g_vanishes_at_base_point() {
        let nl = Nonlinearity::identity(2.0).unwrap();
        assert_eq!(nl.eval_big_g(2.0).unwrap(), 0.0);
        // ξ - G(u) = 1 + ln(M/u)
        let u = 0.3;
        assert_relative_eq!(
            nl.xi_minus_g(u).unwrap(),
            1.0 + (2.0f64 / u).ln(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn power_gap_closed_form() {
        let p = 0.75;
        let c = power_law_constants(2, p, 1.0).unwrap();
        let nl = c.nonlinearity(p, 1.0).unwrap();
        for &s in &[1e-6, 0.01, 0.5, 1.0] {
            let expected = p / (1.0 - p) * (1.0 / s.powf(1.0 - p) - 1.0 / c.s0.powf(1.0 - p));
            assert_relative_eq!(nl.xi_minus_g(s).unwrap(), expected, max_relative = 1e-13);
            assert_relative_eq!(
                nl.xi_minus_g(s).unwrap(),
                nl.xi() - nl.eval_big_g(s).unwrap(),
                max_relative = 1e-10
            );
        }
    }

    #[test]
    fn g_rejects_nonpositive_argument() {
        let nl = Nonlinearity::identity(1.0).unwrap();
        assert!(matches!(nl.eval_big_g(0.0), Err(LabError::Domain(_))));
        assert!(matches!(nl.eval_big_g(-1.0), Err(LabError::Domain(_))));
    }

    #[test]
    fn custom_g_against_composite_gauss_legendre() {
        // F(s) = s + s^2, s0 = 1, s = e
        let nl = Nonlinearity::custom(vec![0.0, 1.0, 1.0], 3.0, 1.0, 10.0).unwrap();
        let e = std::f64::consts::E;
        let value = nl.eval_big_g(e).unwrap();
        let integrand = |h: f64| (1.0 + 2.0 * h) / h;
        let coarse = gauss_legendre_composite(integrand, 1.0, e, 64);
        let fine = gauss_legendre_composite(integrand, 1.0, e, 128);
        assert!((coarse - fine).abs() < 1e-13);
        assert_relative_eq!(value, fine, max_relative = 1e-10);
        // and the exact antiderivative ln s + 2(s - 1)
        assert_relative_eq!(value, 1.0 + 2.0 * (e - 1.0), max_relative = 1e-10);
    }

    fn gauss_legendre_composite<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
        // 5-point rule
        let nodes = [
            0.0,
            -0.538_469_310_105_683_1,
            0.538_469_310_105_683_1,
            -0.906_179_845_938_664,
            0.906_179_845_938_664,
        ];
        let weights = [
            0.568_888_888_888_888_9,
            0.478_628_670_499_366_5,
            0.478_628_670_499_366_5,
            0.236_926_885_056_189_1,
            0.236_926_885_056_189_1,
        ];
        let width = (b - a) / panels as f64;
        (0..panels)
            .map(|k| {
                let mid = a + (k as f64 + 0.5) * width;
                nodes
                    .iter()
                    .zip(weights.iter())
                    .map(|(x, w)| w * f(mid + 0.5 * width * x))
                    .sum::<f64>()
                    * 0.5
                    * width
            })
            .sum()
    }

    #[test]
    fn identity_has_flat_g_second_derivative() {
        let nl = Nonlinearity::identity(1.0).unwrap();
        for r in [-5.0, -1.0, 0.0] {
            let (g1, g2) = nl.eval_g_derivs(r).unwrap();
            assert_eq!(g1, 1.0);
            assert_eq!(g2, 0.0);
        }
    }

    #[test]
    fn power_g_prime_closed_form() {
        let p = 0.75;
        let nl = power_law_constants(2, p, 1.0)
            .unwrap()
            .nonlinearity(p, 1.0)
            .unwrap();
        for r in [-3.0, -0.5, 0.0] {
            let (g1, _) = nl.eval_g_derivs(r).unwrap();
            assert_relative_eq!(g1, p * (r * (p - 1.0)).exp(), max_relative = 1e-14);
        }
    }

    #[test]
    fn g_beyond_bound_is_domain_error() {
        let nl = Nonlinearity::identity(1.0).unwrap();
        assert!(matches!(nl.eval_g(0.1), Err(LabError::Domain(_))));
        assert!(matches!(nl.eval_g_derivs(0.1), Err(LabError::Domain(_))));
    }

    #[test]
    fn g_derivatives_match_central_differences() {
        let p = 0.8;
        let power = power_law_constants(3, p, 1.0)
            .unwrap()
            .nonlinearity(p, 1.0)
            .unwrap();
        let custom = Nonlinearity::custom(vec![0.0, 1.0, 0.5], 1.0, 1.0, 6.0).unwrap();
        let identity = Nonlinearity::identity(1.0).unwrap();
        let step = 1e-4;
        for nl in [&power, &custom, &identity] {
            for r in [-4.0, -1.3, -0.2] {
                let (g1, g2) = nl.eval_g_derivs(r).unwrap();
                let gp = nl.eval_g(r + step).unwrap();
                let g0 = nl.eval_g(r).unwrap();
                let gm = nl.eval_g(r - step).unwrap();
                let fd1 = (gp - gm) / (2.0 * step);
                let fd2 = (gp - 2.0 * g0 + gm) / (step * step);
                assert_relative_eq!(g1, fd1, max_relative = 1e-6);
                if g2.abs() > 1e-3 {
                    assert_relative_eq!(g2, fd2, max_relative = 1e-4);
                }
            }
        }
    }

    #[test]
    fn lambda_identity_at_bound_is_zero() {
        let m = 1.7;
        let nl = Nonlinearity::identity(m).unwrap();
        assert!(nl.eval_lambda(2, m.ln()).unwrap().abs() < 1e-12);
    }

    #[test]
    fn lambda_bounded_by_two_gamma_plus_one() {
        let p = 0.75;
        let c = power_law_constants(2, p, 1.0).unwrap();
        let nl = c.nonlinearity(p, 1.0).unwrap();
        for i in 0..200 {
            let r = -18.0 + 18.0 * i as f64 / 199.0;
            let lambda = nl.eval_lambda(2, r).unwrap();
            assert!(
                lambda.abs() <= 2.0 * c.gamma_bound + 1.0 + 1e-12,
                "r={r} λ={lambda}"
            );
        }
    }

    #[test]
    fn lambda_recomposes_from_g_parts() {
        let nl = Nonlinearity::custom(vec![0.0, 1.0, 0.5], 1.0, 1.0, 6.0).unwrap();
        for r in [-2.0, -0.7, 0.0] {
            let (g1, g2) = nl.eval_g_derivs(r).unwrap();
            let gap = nl.xi() - nl.eval_g(r).unwrap();
            let expected = g1 / gap - 1.0 + 3f64.sqrt() * g2.abs() / (2.0 * g1);
            assert_relative_eq!(
                nl.eval_lambda(3, r).unwrap(),
                expected,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn lambda_rejects_nonpositive_gap() {
        // ξ = 0 with identity: ξ - G(M) = 0
        let nl = Nonlinearity::new(Family::Identity, 1.0, 1.0, 0.0).unwrap();
        assert!(matches!(
            nl.eval_lambda(1, 0.0),
            Err(LabError::Hypothesis(_))
        ));
    }

    #[test]
    fn identity_hypotheses() {
        let nl = Nonlinearity::identity(3.0).unwrap();
        let rep = check_hypotheses(&nl, 2, 1000).unwrap();
        assert_eq!(rep.kappa_min, 1.0);
        assert_eq!(rep.xi_min, 2.0);
        assert_eq!(rep.eta_min, 1.0);
        assert!(rep.all_satisfied);
    }

    #[test]
    fn power_hypotheses_n2() {
        let p = 0.75;
        let c = power_law_constants(2, p, 1.0).unwrap();
        assert_eq!(c.s0, 16.0);
        let nl = c.nonlinearity(p, 1.0).unwrap();
        let rep = check_hypotheses(&nl, 2, DEFAULT_SAMPLES).unwrap();
        assert!((rep.kappa_min - (1.0 - 2f64.sqrt() / 4.0)).abs() < 1e-12);
        assert!(rep.eta_min >= 1.5 - 1e-12);
        assert!(rep.gamma_max <= 0.5 + 1e-12);
        assert!(rep.all_satisfied);
    }

    #[test]
    fn power_hypotheses_fail_below_range() {
        // p = 0.4 with n = 4 sits below (0.5, 1]
        let nl = Nonlinearity::power(0.4, 1.0, 2f64.powf(1.0 / 0.6), 0.0).unwrap();
        let rep = check_hypotheses(&nl, 4, 1000).unwrap();
        assert!((rep.kappa_min - (-0.2)).abs() < 1e-12);
        assert!(!rep.all_satisfied);
        assert!(rep.failure().unwrap().contains("kappa"));
    }

    #[test]
    fn decreasing_f_is_reported_not_raised() {
        let nl = Nonlinearity::custom(vec![0.0, -1.0], 1.0, 1.0, 1.0).unwrap();
        let rep = check_hypotheses(&nl, 1, 100).unwrap();
        assert!(!rep.fprime_positive);
        assert!(!rep.all_satisfied);
    }

    #[test]
    fn power_law_constant_values() {
        let c = power_law_constants(2, 0.75, 1.0).unwrap();
        assert!((c.kappa - 0.646_446_609_406_726_2).abs() < 1e-12);
        assert_eq!(c.eta, 1.5);
        assert_eq!(c.gamma_bound, 0.5);
        assert_eq!(c.xi, 0.0);
        let c = power_law_constants(3, 0.9, 1.0).unwrap();
        assert!((c.kappa - (1.0 - 0.1 * 3f64.sqrt())).abs() < 1e-12);
        assert!((c.kappa - 0.826_794_919_243_112_3).abs() < 1e-12);
    }

    #[test]
    fn power_law_range_errors() {
        let err = power_law_constants(2, 0.25, 1.0).unwrap_err();
        assert!(err.to_string().contains("admissible range"));
        assert!(power_law_constants(2, 1.0, 1.0).is_err());
        assert!(power_law_constants(2, 0.75, 2.0).is_err());
    }

    #[test]
    fn big_g_is_increasing_on_samples() {
        let c = power_law_constants(2, 0.75, 1.0).unwrap();
        let nl = c.nonlinearity(0.75, 1.0).unwrap();
        let mut grid = hypothesis_samples(&nl, 500);
        grid.truncate(500);
        let values: Vec<f64> = grid.iter().map(|&s| nl.eval_big_g(s).unwrap()).collect();
        assert!(values.windows(2).all(|w| w[1] > w[0]));
    }
}
