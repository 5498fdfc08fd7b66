//! Barnes-type integrals (1/2πi)∫ Γ[…](t)·zᵗ dt along a vertical line.

use crate::error::{Error, Result};
use crate::gamma::{is_pole, GammaRatioSpec};
use crate::quad::{integrate, QuadratureConfig};
use num_complex::Complex64;

const PANEL: f64 = 2.0;
const Y_LIMIT: f64 = 1000.0;

/// (1/2πi)∫_{Re t = line} spec(t)·power_base^t dt.
///
/// The line must keep every numerator Γ-argument in the right half-plane,
/// which is the straight-contour form of the separation condition between
/// ascending and descending pole families.
pub fn barnes_line_integral(spec: &GammaRatioSpec, power_base: Complex64, line: f64, tol: f64) -> Result<Complex64> {
    if power_base.norm() == 0.0 || !power_base.norm().is_finite() {
        return Err(Error::Domain("power base must be finite and nonzero".into()));
    }
    for g in &spec.numerator {
        if g.mult == 0.0 {
            continue;
        }
        let z = g.at(Complex64::new(line, 0.0));
        if is_pole(Complex64::new(z.re, 0.0)) && (g.offset.im.abs() < 1e-12) {
            return Err(Error::Contour(format!("line Re t = {line} passes through a pole of Γ({}{:+}t)", g.offset, g.mult)));
        }
        if z.re <= 0.0 {
            return Err(Error::Contour(format!(
                "line Re t = {line} does not separate the poles of Γ({}{:+}t)",
                g.offset, g.mult
            )));
        }
    }
    let lnz = power_base.ln();
    let integrand = |y: f64| -> Complex64 {
        let t = Complex64::new(line, y);
        match spec.log_value(t) {
            Ok(Some(l)) => (l + t * lnz).exp(),
            _ => Complex64::new(0.0, 0.0),
        }
    };
    let cfg = QuadratureConfig { tol_rel: 0.1 * tol, tol_abs: 1e-300, ..QuadratureConfig::default() };
    let mut total = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    let mut scale = 0.0f64;
    for dir in [1.0, -1.0] {
        let mut quiet = 0;
        let mut k = 0usize;
        loop {
            let (a, b) = (dir * PANEL * k as f64, dir * PANEL * (k + 1) as f64);
            let r = integrate(&integrand, a.min(b), a.max(b), &cfg);
            total += r.value;
            error += r.error_estimate;
            scale = scale.max(total.norm());
            if r.value.norm() <= 1e-3 * tol * scale {
                quiet += 1;
                if quiet >= 3 {
                    break;
                }
            } else {
                quiet = 0;
            }
            k += 1;
            if PANEL * k as f64 >= Y_LIMIT {
                return Err(Error::no_conv("barnes_line_integral", "integrand does not decay along the contour"));
            }
        }
    }
    let value = total / (2.0 * std::f64::consts::PI);
    if error / (2.0 * std::f64::consts::PI) > tol * value.norm().max(1e-300) {
        return Err(Error::no_conv("barnes_line_integral", format!("error estimate {error:.3e} above tolerance")));
    }
    Ok(value)
}
