//! Scalar abstraction, Gauss-type power series and the Taylor-series marcher
//! for second-order equations P(v)y″ + Q(v)y′ + R y = 0 with quadratic P and
//! linear Q (the hypergeometric equation in either of its two normal forms).

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

/// Real or complex scalar used by the generic series and marcher.
pub(crate) trait Field:
    Copy
    + Debug
    + Add<Output = Self>
    + AddAssign
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
    + Add<f64, Output = Self>
    + Send
    + Sync
{
    fn from_re(x: f64) -> Self;
    fn modulus(self) -> f64;
    /// Real part for the real scalar, identity for the complex one.
    fn from_complex(z: Complex64) -> Self;
}

impl Field for f64 {
    fn from_re(x: f64) -> Self {
        x
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn from_complex(z: Complex64) -> Self {
        z.re
    }
}

impl Field for Complex64 {
    fn from_re(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn from_complex(z: Complex64) -> Self {
        z
    }
}

/// Result of a power-series summation Σ tₖ with tₖ₊₁ = tₖ·ratio(k)·z.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SeriesOut<T> {
    pub sum: T,
    /// d/dz of the series.
    pub deriv: T,
    /// Largest |tₖ| encountered (|t₀| = 1); large values signal cancellation.
    pub max_term: f64,
}

impl<T: Field> SeriesOut<T> {
    /// Number of significant digits lost to cancellation.
    pub fn digits_lost(&self) -> f64 {
        let s = self.sum.modulus().max(f64::MIN_POSITIVE);
        (self.max_term / s).max(1.0).log10()
    }
}

/// Maximum number of series terms before giving up.
pub(crate) const SERIES_CAP: usize = 100_000;

/// Sums a hypergeometric-type series.
///
/// Stops once three consecutive terms fall below `tol·|partial sum|`.
pub(crate) fn hyp_series<T: Field>(ratio: impl Fn(usize) -> T, z: f64, tol: f64) -> Result<SeriesOut<T>> {
    let one = T::from_re(1.0);
    if z == 0.0 {
        return Ok(SeriesOut { sum: one, deriv: ratio(0), max_term: 1.0 });
    }
    let mut term = one;
    let mut sum = one;
    let mut deriv = T::from_re(0.0);
    let mut max_term: f64 = 1.0;
    let mut small = 0;
    for k in 0..SERIES_CAP {
        term = term * ratio(k) * z;
        let tm = term.modulus();
        if tm == 0.0 {
            return Ok(SeriesOut { sum, deriv, max_term });
        }
        sum += term;
        deriv += term * ((k + 1) as f64 / z);
        max_term = max_term.max(tm);
        if tm <= tol * sum.modulus() {
            small += 1;
            if small >= 3 {
                return Ok(SeriesOut { sum, deriv, max_term });
            }
        } else {
            small = 0;
        }
        if !tm.is_finite() {
            break;
        }
    }
    Err(Error::no_conv("hypergeometric series", format!("no convergence at z = {z}")))
}

/// The equation (p₀ + p₁v + p₂v²)y″ + (q₀ + q₁v)y′ + r·y = 0.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Ode<T> {
    pub p: [f64; 3],
    pub q: [T; 2],
    pub r: T,
    /// Finite singular points (roots of P).
    pub sing: [f64; 2],
}

/// One Taylor segment: y(v₀ + τh) = Σ coef[n]·τⁿ for τ in [0, 1].
#[derive(Debug, Clone)]
pub(crate) struct Piece<T> {
    pub v0: f64,
    pub h: f64,
    pub coef: Vec<T>,
}

impl<T: Field> Piece<T> {
    pub fn eval(&self, v: f64) -> T {
        let t = (v - self.v0) / self.h;
        let mut acc = T::from_re(0.0);
        for c in self.coef.iter().rev() {
            acc = acc * t + *c;
        }
        acc
    }

    pub fn eval_with_derivative(&self, v: f64) -> (T, T) {
        let t = (v - self.v0) / self.h;
        let mut acc = T::from_re(0.0);
        let mut dacc = T::from_re(0.0);
        for c in self.coef.iter().rev() {
            dacc = dacc * t + acc;
            acc = acc * t + *c;
        }
        (acc, dacc * (1.0 / self.h))
    }
}

const TAYLOR_CAP: usize = 160;
const STEP_SING_FRACTION: f64 = 0.4;
const STEP_PHASE: f64 = 2.0;

impl<T: Field> Ode<T> {
    fn p_at(&self, v: f64) -> f64 {
        self.p[0] + v * (self.p[1] + v * self.p[2])
    }

    fn step_size(&self, v: f64) -> f64 {
        let dist = self.sing.iter().map(|s| (v - s).abs()).fold(f64::INFINITY, f64::min);
        let pv = self.p_at(v).abs();
        let qv = (self.q[0] + self.q[1] * v).modulus();
        let k = (self.r.modulus() / pv).sqrt() + 0.5 * qv / pv;
        (STEP_SING_FRACTION * dist).min(STEP_PHASE / k.max(1e-300))
    }

    /// Scaled Taylor coefficients aₙhⁿ about `v0` for initial data (y, y′) and signed step `h`.
    fn taylor(&self, v0: f64, y: T, dy: T, h: f64) -> Option<Vec<T>> {
        let p0 = self.p_at(v0);
        let p1 = self.p[1] + 2.0 * self.p[2] * v0;
        let p2 = self.p[2];
        let q0 = self.q[0] + self.q[1] * v0;
        let q1 = self.q[1];
        let mut a: Vec<T> = Vec::with_capacity(48);
        a.push(y);
        a.push(dy * h);
        let mut scale = a[0].modulus().max(a[1].modulus());
        let mut small = 0;
        for n in 0..TAYLOR_CAP {
            let nf = n as f64;
            // Dividing by p(v0) first keeps the factors O(1) at very large v0.
            let denom = p0 * (nf + 1.0) * (nf + 2.0);
            let c1 = (q0 + p1 * nf) * ((nf + 1.0) * h / denom);
            let c0 = (self.r + q1 * nf + p2 * nf * (nf - 1.0)) * (h / denom * h);
            let next = -(c1 * a[n + 1] + c0 * a[n]);
            a.push(next);
            let tm = next.modulus();
            if !tm.is_finite() {
                return None;
            }
            scale = scale.max(tm);
            if tm <= 1e-17 * scale {
                small += 1;
                if small >= 3 {
                    return Some(a);
                }
            } else {
                small = 0;
            }
        }
        None
    }

    /// Marches (y, y′) from `v0` to `v1`, optionally recording each Taylor segment.
    pub fn march(&self, v0: f64, y0: T, dy0: T, v1: f64, mut tape: Option<&mut Vec<Piece<T>>>) -> Result<(T, T)> {
        let mut v = v0;
        let mut y = y0;
        let mut dy = dy0;
        let dir = if v1 >= v0 { 1.0 } else { -1.0 };
        let mut steps = 0usize;
        while (v1 - v) * dir > 0.0 {
            let mut h = self.step_size(v).min((v1 - v).abs());
            let coef = loop {
                if let Some(c) = self.taylor(v, y, dy, h * dir) {
                    break c;
                }
                h *= 0.5;
                if h < 1e-14 * v.abs().max(1e-300) {
                    return Err(Error::no_conv("ode march", format!("step underflow at v = {v}")));
                }
            };
            let hs = h * dir;
            let piece = Piece { v0: v, h: hs, coef };
            let last = (v1 - v).abs() <= h;
            let vn = if last { v1 } else { v + hs };
            let (yn, dyn_) = piece.eval_with_derivative(vn);
            if let Some(t) = tape.as_deref_mut() {
                t.push(piece);
            }
            y = yn;
            dy = dyn_;
            v = vn;
            steps += 1;
            if steps > 2_000_000 {
                return Err(Error::no_conv("ode march", "step budget exhausted"));
            }
        }
        Ok((y, dy))
    }
}

/// Looks up the segment containing `v` in an upward tape.
pub(crate) fn tape_lookup<T>(pieces: &[Piece<T>], v: f64) -> Option<&Piece<T>> {
    if pieces.is_empty() {
        return None;
    }
    let idx = pieces.partition_point(|p| p.v0 <= v);
    if idx == 0 {
        return None;
    }
    let p = &pieces[idx - 1];
    if v <= p.v0 + p.h * (1.0 + 1e-12) {
        Some(p)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_geometric() {
        // ₂F₁(1,1;1;z) = 1/(1−z) via ratio (1+k)(1+k)/((1+k)(k+1)) = 1.
        let out = hyp_series(|_k| 1.0f64, 0.3, 1e-17).unwrap();
        assert!((out.sum - 1.0 / 0.7).abs() < 1e-15);
        assert!((out.deriv - 1.0 / 0.49).abs() < 1e-13);
    }

    #[test]
    fn marcher_solves_exponential_equation() {
        // (1)y″ + 0·y′ − y = 0 would need P with no roots; use P = 1 + 0v + 0v², singularities far away.
        let ode = Ode { p: [1.0, 0.0, 0.0], q: [0.0, 0.0], r: -1.0f64, sing: [1e9, -1e9] };
        let (y, dy) = ode.march(0.0, 1.0, 1.0, 3.0, None).unwrap();
        assert!((y - 3f64.exp()).abs() < 1e-12 * 3f64.exp());
        assert!((dy - 3f64.exp()).abs() < 1e-12 * 3f64.exp());
    }

    #[test]
    fn marcher_tape_reproduces_solution() {
        let ode = Ode { p: [1.0, 0.0, 0.0], q: [0.0, 0.0], r: 25.0f64, sing: [1e9, -1e9] };
        let mut tape = Vec::new();
        ode.march(0.0, 0.0, 5.0, 4.0, Some(&mut tape)).unwrap();
        for &v in &[0.1, 1.3, 2.77, 3.99] {
            let p = tape_lookup(&tape, v).unwrap();
            assert!((p.eval(v) - (5.0 * v).sin()).abs() < 1e-12);
        }
    }
}
