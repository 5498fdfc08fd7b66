//! Green function of D − λ and the resolvent.

use super::{Regime, TransformParams, WeightedFunction};
use crate::error::{Error, Result};
use crate::hyper::{connection_coeff, phi_with_derivative, solution, solution_with_derivative, Sign, SolutionKind};
use crate::quad::{integrate, integrate_halfline, Decay, QuadratureConfig};
use num_complex::Complex64;

/// Abscissa at which the Wronskian constant is evaluated.
const WRONSKIAN_POINT: f64 = 1.0;

/// Green function K(x, y; λ) = φ(x<)u₊(x>)/C with C = p(x)·W[φ, u₊](x), p = x(x+1)w.
#[derive(Debug, Clone, Copy)]
pub struct GreenFunction {
    pub params: TransformParams,
    pub lambda: Complex64,
    /// √λ on the principal branch.
    pub nu: Complex64,
    /// Spectral point s = −i√λ, so that −s² = λ.
    pub s: Complex64,
    /// Numerically evaluated Wronskian constant p·(φu₊′ − φ′u₊).
    pub wronskian: Complex64,
}

impl GreenFunction {
    /// Prepares the Green function; λ must lie off (−∞, 0] and off the discrete eigenvalues.
    pub fn new(params: TransformParams, lambda: Complex64) -> Result<Self> {
        if lambda.im == 0.0 && lambda.re <= 0.0 {
            return Err(Error::Domain(format!("λ = {lambda} lies on the continuous spectrum (−∞, 0]")));
        }
        if params.regime == Regime::Mixed {
            for m in 0..params.discrete_count() {
                let ev = (params.b + m as f64).powi(2);
                if (lambda - ev).norm() < 1e-8 {
                    return Err(Error::Domain(format!("λ = {lambda} is the discrete eigenvalue {ev}")));
                }
            }
        }
        let nu = lambda.sqrt();
        let s = Complex64::new(0.0, -1.0) * nu;
        let kp = params.kernel();
        let x0 = WRONSKIAN_POINT;
        let (f, df) = phi_with_derivative(kp, x0, s)?;
        let (u, du) = solution_with_derivative(kp, SolutionKind::UPlus, x0, s)?;
        let pw = x0 * (x0 + 1.0) * params.weight(x0);
        let wronskian = (f * du - df * u) * pw;
        Ok(Self { params, lambda, nu, s, wronskian })
    }

    /// Closed form −2√λ·B₋ of the Wronskian constant.
    pub fn wronskian_closed_form(&self) -> Result<Complex64> {
        Ok(self.nu * connection_coeff(self.params.kernel(), self.s, Sign::Minus)? * -2.0)
    }

    /// Ratio of the calibrated kernel constant 1/C to the factor 2/(√λ·B₋).
    pub fn calibration_against(&self, factor: f64) -> Result<Complex64> {
        let bm = connection_coeff(self.params.kernel(), self.s, Sign::Minus)?;
        Ok(self.nu * bm / (self.wronskian * factor))
    }

    /// K(x, y; λ).
    pub fn kernel(&self, x: f64, y: f64) -> Result<Complex64> {
        if !(x > 0.0 && y > 0.0) {
            return Err(Error::Domain("the Green function needs x, y > 0".into()));
        }
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        let kp = self.params.kernel();
        let f = crate::hyper::phi(kp, lo, self.s)?;
        let u = solution(kp, SolutionKind::UPlus, hi, self.s)?;
        Ok(f * u / self.wronskian)
    }
}

/// K(x, y; λ) for one-off evaluations.
pub fn green_kernel(p: &TransformParams, x: f64, y: f64, lambda: Complex64) -> Result<Complex64> {
    GreenFunction::new(*p, lambda)?.kernel(x, y)
}

/// g(x) = ∫K(x, y; λ)f(y)w(y)dy, solving (D − λ)g = f.
pub fn resolvent_apply(p: &TransformParams, f: &WeightedFunction, lambda: Complex64, x: f64, cfg: &QuadratureConfig) -> Result<Complex64> {
    let green = GreenFunction::new(*p, lambda)?;
    resolvent_with(&green, f, x, cfg)
}

pub(crate) fn resolvent_with(green: &GreenFunction, f: &WeightedFunction, x: f64, cfg: &QuadratureConfig) -> Result<Complex64> {
    if !(x > 0.0) {
        return Err(Error::Domain("the resolvent is evaluated at x > 0".into()));
    }
    let p = green.params;
    let kp = p.kernel();
    let s = green.s;
    let zero = Complex64::new(0.0, 0.0);
    let left_integrand = |y: f64| -> Complex64 {
        let fy = f.eval(y);
        if fy == 0.0 || y == 0.0 {
            return zero;
        }
        crate::hyper::phi(kp, y, s).unwrap_or(Complex64::new(f64::NAN, 0.0)) * (fy * p.weight(y))
    };
    let right_integrand = |y: f64| -> Complex64 {
        let fy = f.eval(y);
        if fy == 0.0 {
            return zero;
        }
        solution(kp, SolutionKind::UPlus, y, s).unwrap_or(Complex64::new(f64::NAN, 0.0)) * (fy * p.weight(y))
    };
    // [0, x] with the endpoint factor y^e removed by y = x·u^{1/(1+e)}.
    let e = f.zero_exponent + p.b + p.c - 1.0;
    let q = 1.0 / (1.0 + e);
    let head = |u: f64| -> Complex64 {
        if u <= 0.0 {
            return zero;
        }
        let y = x * u.powf(q);
        left_integrand(y) * (x * q * u.powf(q - 1.0))
    };
    let left = integrate(&head, 0.0, 1.0, cfg);
    let upper = match f.decay {
        Decay::Compact(h) => Some(h),
        _ => None,
    };
    let right = match upper {
        Some(h) if h <= x => crate::quad::QuadResult { value: zero, error_estimate: 0.0, evaluations: 0, converged: true },
        Some(h) => integrate(&right_integrand, x, h, cfg),
        None => {
            let decay = match f.decay {
                Decay::Algebraic(d) => Decay::Algebraic(d - p.b + 1.0 + green.nu.re),
                other => other,
            };
            integrate_halfline(&|t: f64| right_integrand(x + t), 0.0, decay, cfg)
        }
    };
    if !(left.converged && right.converged) {
        return Err(Error::no_conv(
            "resolvent",
            format!("error estimates {:.3e}, {:.3e}", left.error_estimate, right.error_estimate),
        ));
    }
    let ux = solution(kp, SolutionKind::UPlus, x, s)?;
    let fx = crate::hyper::phi(kp, x, s)?;
    Ok((ux * left.value + fx * right.value) / green.wronskian)
}
