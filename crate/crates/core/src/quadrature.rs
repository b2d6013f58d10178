//! Adaptive Simpson quadrature.

use crate::error::{LabError, Result};

const MAX_DEPTH: u32 = 48;

/// Integrates `f` over `[a, b]` to relative tolerance `rel_tol`.
///
/// The tolerance is measured against the integral of `|f|` so that integrals
/// close to zero (e.g. `G(s)` near `s0`) do not demand impossible accuracy.
pub fn adaptive_simpson<F>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if a == b {
        return Ok(0.0);
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let fa = f(lo);
    let fb = f(hi);
    let m = 0.5 * (lo + hi);
    let fm = f(m);
    if !(fa.is_finite() && fb.is_finite() && fm.is_finite()) {
        return Err(LabError::Numerical(format!(
            "integrand not finite on [{lo}, {hi}]"
        )));
    }
    let whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
    let scale = (hi - lo) / 6.0 * (fa.abs() + 4.0 * fm.abs() + fb.abs());
    let tol = rel_tol * scale.max(f64::MIN_POSITIVE);
    let mut converged = true;
    let value = recurse(
        &f,
        lo,
        hi,
        fa,
        fm,
        fb,
        whole,
        tol,
        MAX_DEPTH,
        &mut converged,
    );
    if !converged || !value.is_finite() {
        return Err(LabError::Numerical(format!(
            "adaptive Simpson did not converge on [{lo}, {hi}]"
        )));
    }
    Ok(sign * value)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    converged: &mut bool,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 {
        *converged = false;
        return left + right;
    }
    if delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, converged)
        + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, converged)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomial_exactly() {
        let v = adaptive_simpson(|x| x * x * x - 2.0 * x, 0.0, 2.0, 1e-12).unwrap();
        assert!((v - 0.0).abs() < 1e-12);
        let v = adaptive_simpson(|x| x * x, 0.0, 3.0, 1e-12).unwrap();
        assert!((v - 9.0).abs() < 1e-12);
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let a = adaptive_simpson(f64::exp, 0.0, 1.0, 1e-12).unwrap();
        let b = adaptive_simpson(f64::exp, 1.0, 0.0, 1e-12).unwrap();
        assert!((a + b).abs() < 1e-14);
        assert!((a - (std::f64::consts::E - 1.0)).abs() < 1e-11);
    }

    #[test]
    fn non_finite_integrand_is_an_error() {
        assert!(adaptive_simpson(|x| 1.0 / x, 0.0, 1.0, 1e-10).is_err());
    }
}
