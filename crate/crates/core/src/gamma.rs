//! Complex gamma machinery: log-gamma, |Γ|², Γ-brackets and Pochhammer symbols.
//!
//! The right half-plane uses a Lanczos approximation with fixed coefficients;
//! the left half-plane is reached through the reflection formula.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Lanczos shift parameter.
const LANCZOS_G: f64 = 607.0 / 128.0;

/// Lanczos series coefficients for `LANCZOS_G`.
#[allow(clippy::excessive_precision)]
const LANCZOS_COEFFS: [f64; 15] = [
    0.999_999_999_999_997_091_82,
    57.156_235_665_862_923_517,
    -59.597_960_355_475_491_248,
    14.136_097_974_741_747_174,
    -0.491_913_816_097_620_199_78,
    0.339_946_499_848_118_886_99e-4,
    0.465_236_289_270_485_756_65e-4,
    -0.983_744_753_048_795_646_77e-4,
    0.158_088_703_224_912_488_84e-3,
    -0.210_264_441_724_104_883_19e-3,
    0.217_439_618_115_212_643_20e-3,
    -0.164_318_106_536_763_890_22e-3,
    0.844_182_239_838_527_432_93e-4,
    -0.261_908_384_015_814_086_70e-4,
    0.368_991_826_595_316_227_04e-5,
];

/// Distance to a non-positive integer below which an argument counts as a pole.
pub const POLE_TOLERANCE: f64 = 1e-12;

/// `0.5 * ln(2π)`.
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_741_8;

/// Returns true when `z` lies within [`POLE_TOLERANCE`] of 0, −1, −2, ….
pub fn is_pole(z: Complex64) -> bool {
    if z.im.abs() > POLE_TOLERANCE || z.re > POLE_TOLERANCE {
        return false;
    }
    (z.re - z.re.round()).abs() <= POLE_TOLERANCE
}

fn pole_error(z: Complex64) -> Error {
    Error::Pole { re: z.re, im: z.im }
}

/// Lanczos evaluation of log Γ(z) for Re z ≥ 0.5 (imaginary part not yet branch-fixed).
fn lanczos_log_gamma(z: Complex64) -> Complex64 {
    let zm1 = z - 1.0;
    let mut a = Complex64::new(LANCZOS_COEFFS[0], 0.0);
    for (k, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        a += c / (zm1 + k as f64);
    }
    let t = zm1 + LANCZOS_G + 0.5;
    (zm1 + 0.5) * t.ln() - t + HALF_LN_2PI + a.ln()
}

/// Stirling estimate of log Γ(z) used only to select the branch of the imaginary part.
fn stirling_estimate(z: Complex64) -> Complex64 {
    const SHIFT: usize = 8;
    let mut w = z;
    let mut acc = Complex64::new(0.0, 0.0);
    for _ in 0..SHIFT {
        acc += w.ln();
        w += 1.0;
    }
    let inv = w.inv();
    let series = inv / 12.0 - inv * inv * inv / 360.0;
    (w - 0.5) * w.ln() - w + HALF_LN_2PI + series - acc
}

fn fix_branch(value: Complex64, estimate: f64) -> Complex64 {
    let k = ((estimate - value.im) / (2.0 * PI)).round();
    Complex64::new(value.re, value.im + 2.0 * PI * k)
}

/// ln|sin(πz)| computed without overflow for large |Im z|.
fn ln_abs_sin_pi(z: Complex64) -> f64 {
    let y = z.im.abs();
    if y > 20.0 {
        PI * y - std::f64::consts::LN_2
    } else {
        let s = (PI * z.re).sin();
        let sh = (PI * y).sinh();
        0.5 * (s * s + sh * sh).ln()
    }
}

/// Principal-branch log Γ(z).
///
/// Re z ≥ 0.5 uses the Lanczos approximation; the left half-plane uses the
/// reflection formula for the real part and the argument recurrence for the
/// imaginary part, so the result is continuous off the negative real axis.
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain(format!("log_gamma of non-finite argument {z}")));
    }
    if is_pole(z) {
        return Err(pole_error(z));
    }
    if z.re >= 0.5 {
        let v = lanczos_log_gamma(z);
        return Ok(fix_branch(v, stirling_estimate(z).im));
    }
    let w = Complex64::new(1.0, 0.0) - z;
    let lw = fix_branch(lanczos_log_gamma(w), stirling_estimate(w).im);
    let re = PI.ln() - ln_abs_sin_pi(z) - lw.re;
    // Imaginary part: Im log Γ(z) = Im log Γ(z + n) − Σ arg(z + k).
    let n = (0.5 - z.re).ceil().max(1.0) as usize;
    let mut shifted = z;
    let mut args = 0.0;
    for _ in 0..n {
        args += shifted.arg();
        shifted += 1.0;
    }
    let lshift = fix_branch(lanczos_log_gamma(shifted), stirling_estimate(shifted).im);
    Ok(Complex64::new(re, lshift.im - args))
}

/// log Γ at a real argument (imaginary part encodes the sign as 0 or −kπ).
pub fn log_gamma_real(x: f64) -> Result<Complex64> {
    log_gamma(Complex64::new(x, 0.0))
}

/// Γ(z) = exp(log Γ(z)).
pub fn gamma(z: Complex64) -> Result<Complex64> {
    Ok(log_gamma(z)?.exp())
}

/// Γ(x) for real x, returned as a real number with correct sign.
pub fn gamma_real(x: f64) -> Result<f64> {
    let l = log_gamma_real(x)?;
    let sign = if x > 0.0 || ((-x).floor() as i64) % 2 == 1 { 1.0 } else { -1.0 };
    Ok(sign * l.re.exp())
}

/// 1/Γ(x) for real x; exactly 0 at the poles.
pub fn rgamma_real(x: f64) -> f64 {
    match gamma_real(x) {
        Ok(g) => 1.0 / g,
        Err(_) => 0.0,
    }
}

/// |Γ(z)|² = exp(2 Re log Γ(z)).
pub fn abs_gamma_sq(z: Complex64) -> Result<f64> {
    Ok((2.0 * log_gamma(z)?.re).exp())
}

/// ln |Γ(z)|.
pub fn ln_abs_gamma(z: Complex64) -> Result<f64> {
    Ok(log_gamma(z)?.re)
}

/// One Γ-factor `Γ(offset + mult·t)` of a [`GammaRatioSpec`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaArg {
    pub offset: Complex64,
    pub mult: f64,
}

impl GammaArg {
    /// Argument value at the point `t`.
    pub fn at(&self, t: Complex64) -> Complex64 {
        self.offset + t * self.mult
    }
}

/// Symbolic Γ-bracket: ∏ Γ(aₖ + mₖ t) / ∏ Γ(bₗ + mₗ t).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GammaRatioSpec {
    pub numerator: Vec<GammaArg>,
    pub denominator: Vec<GammaArg>,
}

impl GammaRatioSpec {
    pub fn new() -> Self {
        Self::default()
    }

    /// Bracket with constant arguments only.
    pub fn constant(num: &[f64], den: &[f64]) -> Self {
        let mut s = Self::new();
        for &a in num {
            s = s.num(a, 0.0);
        }
        for &b in den {
            s = s.den(b, 0.0);
        }
        s
    }

    /// Appends a numerator factor Γ(offset + mult·t).
    pub fn num(mut self, offset: impl Into<Complex64>, mult: f64) -> Self {
        self.numerator.push(GammaArg { offset: offset.into(), mult });
        self
    }

    /// Appends a denominator factor Γ(offset + mult·t).
    pub fn den(mut self, offset: impl Into<Complex64>, mult: f64) -> Self {
        self.denominator.push(GammaArg { offset: offset.into(), mult });
        self
    }

    /// Logarithm of the bracket, or `None` when a denominator factor sits on a pole.
    pub fn log_value(&self, at: Complex64) -> Result<Option<Complex64>> {
        let mut acc = Complex64::new(0.0, 0.0);
        for g in &self.denominator {
            let z = g.at(at);
            if is_pole(z) {
                return Ok(None);
            }
            acc -= log_gamma(z)?;
        }
        for g in &self.numerator {
            acc += log_gamma(g.at(at))?;
        }
        Ok(Some(acc))
    }
}

/// Evaluates the bracket in log space with a single final exponentiation.
///
/// A denominator pole yields exactly zero; a numerator pole is an error.
pub fn gamma_bracket(spec: &GammaRatioSpec, at: Complex64) -> Result<Complex64> {
    for g in &spec.numerator {
        let z = g.at(at);
        if is_pole(z) {
            return Err(pole_error(z));
        }
    }
    match spec.log_value(at)? {
        Some(l) => Ok(l.exp()),
        None => Ok(Complex64::new(0.0, 0.0)),
    }
}

/// Real Γ-product ∏Γ(num)/∏Γ(den) for real arguments, computed in log space.
pub fn gamma_ratio_real(num: &[f64], den: &[f64]) -> Result<f64> {
    Ok(gamma_bracket(&GammaRatioSpec::constant(num, den), Complex64::new(0.0, 0.0))?.re)
}

/// Pochhammer symbol (a)ₙ by direct product.
pub fn pochhammer(a: Complex64, n: usize) -> Complex64 {
    let mut p = Complex64::new(1.0, 0.0);
    for k in 0..n {
        p *= a + k as f64;
    }
    p
}

/// Real Pochhammer symbol (a)ₙ.
pub fn pochhammer_real(a: f64, n: usize) -> f64 {
    (0..n).fold(1.0, |p, k| p * (a + k as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn trivial_values() {
        assert!(log_gamma(c(1.0, 0.0)).unwrap().norm() < 1e-15);
        assert_relative_eq!(log_gamma(c(0.5, 0.0)).unwrap().re, 0.572_364_942_924_700_1, max_relative = 1e-14);
        assert_relative_eq!(log_gamma(c(5.0, 0.0)).unwrap().re, 24f64.ln(), max_relative = 1e-14);
        assert_relative_eq!(abs_gamma_sq(c(2.0, 0.0)).unwrap(), 1.0, max_relative = 1e-14);
    }

    #[test]
    fn abs_gamma_sq_reflection_values() {
        assert_relative_eq!(abs_gamma_sq(c(0.0, 1.0)).unwrap(), PI / PI.sinh(), max_relative = 1e-13);
        assert_relative_eq!(abs_gamma_sq(c(0.5, 0.5)).unwrap(), PI / (PI / 2.0).cosh(), max_relative = 1e-13);
    }

    #[test]
    fn poles_are_errors() {
        assert!(matches!(log_gamma(c(0.0, 0.0)), Err(Error::Pole { .. })));
        assert!(matches!(log_gamma(c(-3.0, 0.0)), Err(Error::Pole { .. })));
        assert!(log_gamma(c(-3.0, 1e-6)).is_ok());
    }

    #[test]
    fn negative_real_gamma_sign() {
        // Γ(−0.5) = −2√π, Γ(−1.5) = 4√π/3.
        let sp = PI.sqrt();
        assert_relative_eq!(gamma_real(-0.5).unwrap(), -2.0 * sp, max_relative = 1e-13);
        assert_relative_eq!(gamma_real(-1.5).unwrap(), 4.0 * sp / 3.0, max_relative = 1e-13);
        assert_relative_eq!(gamma(c(-0.5, 0.0)).unwrap().re, -2.0 * sp, max_relative = 1e-13);
    }

    #[test]
    fn imaginary_part_is_continuous_across_half_plane_boundary() {
        // Im log Γ(x + 10i) should change smoothly through x = 0.5.
        let a = log_gamma(c(0.5 - 1e-9, 10.0)).unwrap();
        let b = log_gamma(c(0.5 + 1e-9, 10.0)).unwrap();
        assert!((a - b).norm() < 1e-7);
    }

    #[test]
    fn large_imaginary_argument_matches_stirling() {
        let z = c(0.3, 150.0);
        let l = log_gamma(z).unwrap();
        let st = (z - 0.5) * z.ln() - z + HALF_LN_2PI + z.inv() / 12.0;
        assert!((l - st).norm() < 1e-9);
    }

    #[test]
    fn brackets() {
        let z = c(0.0, 0.0);
        assert_relative_eq!(gamma_bracket(&GammaRatioSpec::constant(&[1.0, 1.0], &[2.0]), z).unwrap().re, 1.0, max_relative = 1e-14);
        assert_relative_eq!(gamma_bracket(&GammaRatioSpec::constant(&[3.0], &[2.0, 2.0]), z).unwrap().re, 2.0, max_relative = 1e-14);
        let s = GammaRatioSpec::new().num(0.0, 1.0).den(1.0, 1.0);
        assert_relative_eq!(gamma_bracket(&s, c(0.7, 0.0)).unwrap().re, 1.0 / 0.7, max_relative = 1e-13);
        let zero = GammaRatioSpec::constant(&[1.5], &[-2.0]);
        assert_eq!(gamma_bracket(&zero, z).unwrap(), c(0.0, 0.0));
        let bad = GammaRatioSpec::constant(&[-1.0], &[1.0]);
        assert!(gamma_bracket(&bad, z).is_err());
    }

    #[test]
    fn pochhammer_values() {
        assert_eq!(pochhammer(c(0.3, 0.2), 0), c(1.0, 0.0));
        assert_eq!(pochhammer_real(1.0, 5), 120.0);
        assert_relative_eq!(pochhammer_real(0.5, 2), 0.75);
    }
}
