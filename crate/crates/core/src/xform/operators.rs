//! The differential operator D and the spectral difference operators P and H.

use super::TransformParams;
use crate::error::{Error, Result};
use crate::funlang::Jet2;
use num_complex::Complex64;

/// D f = x(x+1)f″ + [(b+c)+(2b+1)x]f′ + b²f from a jet of f at x.
///
/// With this sign D φ(·, s) = −s²φ and D p_m = (b+m)²p_m.
pub fn apply_d_jet(j: Jet2, p: &TransformParams, x: f64) -> f64 {
    x * (x + 1.0) * j.d2 + ((p.b + p.c) + (2.0 * p.b + 1.0) * x) * j.d1 + p.b * p.b * j.v
}

/// D applied to a jet-valued function at x.
pub fn apply_d(f: &dyn Fn(f64) -> Jet2, p: &TransformParams, x: f64) -> f64 {
    apply_d_jet(f(x), p, x)
}

fn shift_coefficients(p: &TransformParams, s: f64, extra: bool) -> Result<(Complex64, Complex64)> {
    if s == 0.0 {
        return Err(Error::Pole { re: 0.0, im: 0.0 });
    }
    let is = Complex64::new(0.0, s);
    let b = Complex64::new(p.b, 0.0);
    let c = Complex64::new(p.c, 0.0);
    let mut up = (b - is) * (c - is) / ((-is * 2.0) * (Complex64::new(1.0, 0.0) - is * 2.0));
    let mut down = (b + is) * (c + is) / ((is * 2.0) * (Complex64::new(1.0, 0.0) + is * 2.0));
    if extra {
        up *= b + 1.0 - is;
        down *= b + 1.0 + is;
    }
    Ok((up, down))
}

/// (P g)(s): image of multiplication by x under the transform.
pub fn apply_p(g: &dyn Fn(Complex64) -> Result<Complex64>, p: &TransformParams, s: f64) -> Result<Complex64> {
    let (up, down) = shift_coefficients(p, s, false)?;
    let g0 = g(Complex64::new(s, 0.0))?;
    let gp = g(Complex64::new(s, 1.0))?;
    let gm = g(Complex64::new(s, -1.0))?;
    Ok(up * (gp - g0) + down * (gm - g0))
}

/// (H g)(s): image of f ↦ x(x+1)f′ under the transform.
pub fn apply_h(g: &dyn Fn(Complex64) -> Result<Complex64>, p: &TransformParams, s: f64) -> Result<Complex64> {
    let (up, down) = shift_coefficients(p, s, true)?;
    let g0 = g(Complex64::new(s, 0.0))?;
    let gp = g(Complex64::new(s, 1.0))?;
    let gm = g(Complex64::new(s, -1.0))?;
    Ok(-(up * (gp - g0) + down * (gm - g0)) - g0 * (p.b + p.c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyper::phi;

    #[test]
    fn constants() {
        let p = TransformParams::new(0.8, 0.6).unwrap();
        let one = Jet2 { v: 1.0, d1: 0.0, d2: 0.0 };
        assert!((apply_d_jet(one, &p, 2.3) - 0.64).abs() < 1e-15);
        let g = |_s: Complex64| Ok(Complex64::new(2.0, 0.0));
        assert_eq!(apply_p(&g, &p, 1.1).unwrap(), Complex64::new(0.0, 0.0));
        let h = apply_h(&g, &p, 1.1).unwrap();
        assert!((h - Complex64::new(-2.8, 0.0)).norm() < 1e-15);
        assert!(apply_p(&g, &p, 0.0).is_err());
    }

    #[test]
    fn kernel_shift_identities() {
        let p = TransformParams::new(0.8, 0.6).unwrap();
        let kp = p.kernel();
        for &x in &[0.5, 1.7, 3.0] {
            let g = |s: Complex64| phi(kp, x, s);
            let s = 1.3;
            let ph = phi(kp, x, Complex64::new(s, 0.0)).unwrap();
            let pv = apply_p(&g, &p, s).unwrap();
            assert!((pv - ph * x).norm() < 1e-10 * ph.norm().max(1e-3), "x={x}");
            // H φ = −(1/w)(x(x+1)wφ)′ = −x(x+1)φ′ − [(b+c)+(2b+1)x]φ.
            let (v, d) = crate::hyper::phi_real_with_derivative(kp, x, s).unwrap();
            let want = -x * (x + 1.0) * d - ((p.b + p.c) + (2.0 * p.b + 1.0) * x) * v;
            let hv = apply_h(&g, &p, s).unwrap();
            assert!((hv.re - want).abs() < 1e-10 * want.abs().max(1e-3), "x={x}: {hv} vs {want}");
        }
    }
}
