//! Transform kernel φ, the auxiliary solution bases ψ and u±, connection
//! coefficients, the Gauss function ₂F₁ on z < 1, generalized hypergeometric
//! sums and Barnes vertical-line integrals.
//!
//! The kernel is φ_{b,c}(x, s) = ₂F₁(b+is, b−is; b+c; −x). Depending on x and
//! |s| it is evaluated by its power series, by the Pfaff-transformed series in
//! x/(1+x), by the large-x connection formula, or by Taylor-series integration
//! of the hypergeometric equation started from one of those anchors.

mod barnes;
mod ode;
mod pfq;

pub use barnes::barnes_line_integral;
pub use pfq::{pfq_sum, pfq_terminating, PfqSum};

pub(crate) use ode::Field;
use ode::{hyp_series, tape_lookup, Ode, Piece};

use crate::error::{Error, Result};
use crate::gamma::{gamma_bracket, is_pole, GammaRatioSpec};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Default Pfaff/connection switch point.
pub const DEFAULT_X_SWITCH: f64 = 4.0;

/// Minimal distance of 2is from the integers for the connection formula to be used.
const DEGENERACY_GAP: f64 = 0.2;
/// Series are accepted when at most this many digits cancel.
const MAX_DIGITS_LOST: f64 = 2.5;
/// Largest abscissa reached by the kernel tape when no connection formula is available.
const TAPE_CEILING: f64 = 1e100;
const SERIES_TOL: f64 = 1e-17;

/// Kernel parameters (b, c).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    pub b: f64,
    pub c: f64,
}

impl KernelParams {
    /// Validates b + c > 0 and c > 0.
    pub fn new(b: f64, c: f64) -> Result<Self> {
        if !(b.is_finite() && c.is_finite()) || b + c <= 0.0 || c <= 0.0 {
            return Err(Error::Domain(format!("kernel parameters need b + c > 0 and c > 0 (b = {b}, c = {c})")));
        }
        Ok(Self { b, c })
    }
}

/// Solution bases of the eigenvalue equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolutionKind {
    Phi,
    Psi,
    UPlus,
    UMinus,
}

/// Sign selector for the connection coefficients B±.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Distance of 2is to the nearest integer.
fn degeneracy_distance(s: Complex64) -> f64 {
    let z = c64(0.0, 2.0) * s;
    (z - z.re.round()).norm()
}

fn phase(smod: f64, x: f64) -> f64 {
    2.0 * smod * x.sqrt().asinh()
}

/// Rough count of Taylor steps needed to march between two abscissae.
fn march_cost(smod: f64, x1: f64, x2: f64) -> f64 {
    (phase(smod, x2) - phase(smod, x1)).abs() / 2.0 + (x2 / x1).ln().abs() / 0.34
}

/// Kernel evaluator specialised to the scalar type of the spectral variable.
#[derive(Debug, Clone, Copy)]
struct Kern<T> {
    b: f64,
    c: f64,
    /// b² + s², the product (b+is)(b−is).
    ab: T,
    s: Complex64,
    smod: f64,
    x_switch: f64,
}

impl<T: Field> Kern<T> {
    fn ode(&self) -> Ode<T> {
        Ode {
            p: [0.0, 1.0, 1.0],
            q: [T::from_re(self.b + self.c), T::from_re(2.0 * self.b + 1.0)],
            r: self.ab,
            sing: [0.0, -1.0],
        }
    }

    fn x_direct_max(&self) -> f64 {
        if self.smod > 0.0 {
            0.5f64.min((1.5 / self.smod).powi(2))
        } else {
            0.5
        }
    }

    fn nondegenerate(&self) -> bool {
        degeneracy_distance(self.s) >= DEGENERACY_GAP
    }

    fn connection_threshold(&self) -> f64 {
        self.x_switch.max(2.0).max(self.smod / 3.0)
    }

    /// Power series in −x with its x-derivative.
    fn direct(&self, x: f64) -> Result<(T, T, f64)> {
        let b = self.b;
        let bc = self.b + self.c;
        let ab = self.ab;
        let out = hyp_series(
            |k| {
                let kf = k as f64;
                (ab + (2.0 * b * kf + kf * kf)) / ((bc + kf) * (kf + 1.0))
            },
            -x,
            SERIES_TOL,
        )?;
        Ok((out.sum, -out.deriv, out.digits_lost()))
    }

    /// Pfaff form (1+x)^{−A}·₂F₁(A, c+is; b+c; x/(1+x)) with A = b+is.
    fn pfaff(&self, x: f64) -> Result<(T, T, f64)> {
        let a = c64(self.b, 0.0) + c64(0.0, 1.0) * self.s;
        let bb = c64(self.c, 0.0) + c64(0.0, 1.0) * self.s;
        let cc = self.b + self.c;
        let w = x / (1.0 + x);
        let out = hyp_series(
            |k| {
                let kf = k as f64;
                (a + kf) * (bb + kf) / ((cc + kf) * (kf + 1.0))
            },
            w,
            SERIES_TOL,
        )?;
        let pre = (-a * (1.0 + x).ln()).exp();
        let val = pre * out.sum;
        let der = -a * val / (1.0 + x) + pre * out.deriv / ((1.0 + x) * (1.0 + x));
        Ok((T::from_complex(val), T::from_complex(der), out.digits_lost()))
    }

    fn connection(&self, x: f64) -> Result<(T, T)> {
        let (v, d) = connection_eval(self.b, self.c, self.s, x)?;
        Ok((T::from_complex(v), T::from_complex(d)))
    }

    /// Value and x-derivative of φ at `x`.
    fn eval(&self, x: f64) -> Result<(T, T)> {
        if x == 0.0 {
            return Ok((T::from_re(1.0), -self.ab / (self.b + self.c)));
        }
        let xl = self.x_direct_max();
        if x <= xl {
            let (v, d, lost) = self.direct(x)?;
            if lost <= MAX_DIGITS_LOST {
                return Ok((v, d));
            }
        }
        if x <= self.x_switch && 2.0 * self.smod * (x / (1.0 + x)).sqrt() <= 3.0 {
            if let Ok((v, d, lost)) = self.pfaff(x) {
                if lost <= MAX_DIGITS_LOST {
                    return Ok((v, d));
                }
            }
        }
        let xc = self.connection_threshold();
        let nondeg = self.nondegenerate();
        if nondeg && x >= xc {
            return self.connection(x);
        }
        let up = march_cost(self.smod, xl, x);
        let down = if nondeg { march_cost(self.smod, x, xc) } else { f64::INFINITY };
        let ode = self.ode();
        if down < up {
            let (y0, dy0) = self.connection(xc)?;
            ode.march(xc, y0, dy0, x, None)
        } else {
            let (y0, dy0, _) = self.direct(xl)?;
            ode.march(xl, y0, dy0, x, None)
        }
    }
}

fn kern_real(p: KernelParams, s: f64, x_switch: f64) -> Kern<f64> {
    let s = s.abs();
    Kern { b: p.b, c: p.c, ab: p.b * p.b + s * s, s: c64(s, 0.0), smod: s, x_switch }
}

fn kern_complex(p: KernelParams, s: Complex64, x_switch: f64) -> Kern<Complex64> {
    Kern { b: p.b, c: p.c, ab: c64(p.b * p.b, 0.0) + s * s, s, smod: s.norm(), x_switch }
}

fn check_x(x: f64) -> Result<()> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("kernel abscissa must be finite and ≥ 0, got {x}")));
    }
    Ok(())
}

/// The kernel φ_{b,c}(x, s); real output for real s.
pub fn phi(p: KernelParams, x: f64, s: Complex64) -> Result<Complex64> {
    phi_with_switch(p, x, s, DEFAULT_X_SWITCH)
}

/// [`phi`] with an explicit Pfaff/connection switch point.
pub fn phi_with_switch(p: KernelParams, x: f64, s: Complex64, x_switch: f64) -> Result<Complex64> {
    check_x(x)?;
    if s.im == 0.0 {
        return Ok(c64(kern_real(p, s.re, x_switch).eval(x)?.0, 0.0));
    }
    Ok(kern_complex(p, s, x_switch).eval(x)?.0)
}

/// Real kernel for real spectral argument.
pub fn phi_real(p: KernelParams, x: f64, s: f64) -> Result<f64> {
    check_x(x)?;
    Ok(kern_real(p, s, DEFAULT_X_SWITCH).eval(x)?.0)
}

/// Kernel value and x-derivative for real spectral argument.
pub fn phi_real_with_derivative(p: KernelParams, x: f64, s: f64) -> Result<(f64, f64)> {
    check_x(x)?;
    kern_real(p, s, DEFAULT_X_SWITCH).eval(x)
}

/// Kernel value and x-derivative for complex spectral argument.
pub fn phi_with_derivative(p: KernelParams, x: f64, s: Complex64) -> Result<(Complex64, Complex64)> {
    check_x(x)?;
    if s.im == 0.0 {
        let (v, d) = kern_real(p, s.re, DEFAULT_X_SWITCH).eval(x)?;
        return Ok((c64(v, 0.0), c64(d, 0.0)));
    }
    kern_complex(p, s, DEFAULT_X_SWITCH).eval(x)
}

/// φ through the Pfaff transformation (1+x)^{−b−is}·₂F₁(b+is, c+is; b+c; x/(1+x)).
pub fn phi_pfaff(p: KernelParams, x: f64, s: Complex64) -> Result<Complex64> {
    check_x(x)?;
    let i = c64(0.0, 1.0);
    let a = c64(p.b, 0.0) + i * s;
    let f = gauss_2f1(a, c64(p.c, 0.0) + i * s, c64(p.b + p.c, 0.0), x / (1.0 + x))?;
    let v = (-a * (1.0 + x).ln()).exp() * f;
    Ok(if s.im == 0.0 { c64(v.re, 0.0) } else { v })
}

/// φ through the connection formula B₊u₊ + B₋u₋.
pub fn phi_connection(p: KernelParams, x: f64, s: Complex64) -> Result<Complex64> {
    if !(x > 0.0) {
        return Err(Error::Domain("the connection formula needs x > 0".into()));
    }
    if degeneracy_distance(s) < 1e-12 {
        return Err(Error::Degenerate(format!("2is is an integer for s = {s}")));
    }
    if x > 1.0 {
        return Ok(connection_eval(p.b, p.c, s, x)?.0);
    }
    let bp = connection_coeff(p, s, Sign::Plus)?;
    let bm = connection_coeff(p, s, Sign::Minus)?;
    let up = solution(p, SolutionKind::UPlus, x, s)?;
    if s.im == 0.0 {
        return Ok(c64(2.0 * (bp * up).re, 0.0));
    }
    let um = solution(p, SolutionKind::UMinus, x, s)?;
    Ok(bp * up + bm * um)
}

/// Connection coefficient B± = Γ(b+c)Γ(∓2is)/(Γ(b∓is)Γ(c∓is)).
pub fn connection_coeff(p: KernelParams, s: Complex64, sign: Sign) -> Result<Complex64> {
    let is = c64(0.0, 1.0) * s * sign.value();
    let spec = GammaRatioSpec::new()
        .num(p.b + p.c, 0.0)
        .num(-2.0 * is, 0.0)
        .den(c64(p.b, 0.0) - is, 0.0)
        .den(c64(p.c, 0.0) - is, 0.0);
    gamma_bracket(&spec, c64(0.0, 0.0))
}

/// u_ν(x) = x^{−b−ν}·₂F₁(b+ν, 1+ν−c; 1+2ν; −1/x) and its derivative, for x > 1.
fn u_series(b: f64, c: f64, nu: Complex64, x: f64) -> Result<(Complex64, Complex64)> {
    let a1 = nu + b;
    let a2 = nu + 1.0 - c;
    let c1 = nu * 2.0 + 1.0;
    let z = -1.0 / x;
    let out = hyp_series(
        |k| {
            let kf = k as f64;
            (a1 + kf) * (a2 + kf) / ((c1 + kf) * (kf + 1.0))
        },
        z,
        SERIES_TOL,
    )?;
    let pre = (-a1 * x.ln()).exp();
    let val = pre * out.sum;
    let der = -a1 * val / x + pre * out.deriv / (x * x);
    Ok((val, der))
}

/// φ and φ′ from the connection formula, x > 1.
fn connection_eval(b: f64, c: f64, s: Complex64, x: f64) -> Result<(Complex64, Complex64)> {
    let p = KernelParams { b, c };
    let nu = c64(0.0, 1.0) * s;
    let bp = connection_coeff(p, s, Sign::Plus)?;
    let (up, dup) = u_series(b, c, nu, x)?;
    if s.im == 0.0 {
        return Ok((c64(2.0 * (bp * up).re, 0.0), c64(2.0 * (bp * dup).re, 0.0)));
    }
    let bm = connection_coeff(p, s, Sign::Minus)?;
    let (um, dum) = u_series(b, c, -nu, x)?;
    Ok((bp * up + bm * um, bp * dup + bm * dum))
}

/// u_ν(x) for any x > 0 via the series in −1/x (x > 2) or the Pfaff form in 1/(1+x).
fn u_any(b: f64, c: f64, nu: Complex64, x: f64) -> Result<(Complex64, Complex64)> {
    if x > 2.0 {
        return u_series(b, c, nu, x);
    }
    // u_ν = (1+x)^{−b−ν}·₂F₁(b+ν, c+ν; 1+2ν; 1/(1+x)).
    let a1 = nu + b;
    let a2 = nu + c;
    let c1 = nu * 2.0 + 1.0;
    let w = 1.0 / (1.0 + x);
    let f = gauss_2f1(a1, a2, c1, w)?;
    let fd = a1 * a2 / c1 * gauss_2f1(a1 + 1.0, a2 + 1.0, c1 + 1.0, w)?;
    let pre = (-a1 * (1.0 + x).ln()).exp();
    let val = pre * f;
    let der = -a1 * val * w - pre * fd * w * w;
    Ok((val, der))
}

/// ψ = x^{1−b−c}·₂F₁(1+is−c, 1−is−c; 2−b−c; −x) and its derivative.
fn psi_eval(p: KernelParams, x: f64, s: Complex64) -> Result<(Complex64, Complex64)> {
    let cc = 2.0 - p.b - p.c;
    if is_pole(c64(cc, 0.0)) || (p.b + p.c - 1.0).abs() < 1e-12 {
        return Err(Error::Degenerate(format!("ψ is not independent of φ for b + c = {}", p.b + p.c)));
    }
    let is = c64(0.0, 1.0) * s;
    let a1 = is + 1.0 - p.c;
    let a2 = -is + 1.0 - p.c;
    let f = gauss_2f1(a1, a2, c64(cc, 0.0), -x)?;
    let fd = a1 * a2 / cc * gauss_2f1(a1 + 1.0, a2 + 1.0, c64(cc + 1.0, 0.0), -x)?;
    let e = 1.0 - p.b - p.c;
    let pre = (e * x.ln()).exp();
    Ok((pre * f, c64(e * pre / x, 0.0) * f - pre * fd))
}

/// Evaluates one of the solution bases at x > 0.
pub fn solution(p: KernelParams, kind: SolutionKind, x: f64, s: Complex64) -> Result<Complex64> {
    Ok(solution_with_derivative(p, kind, x, s)?.0)
}

/// Value and x-derivative of one of the solution bases at x > 0.
pub fn solution_with_derivative(p: KernelParams, kind: SolutionKind, x: f64, s: Complex64) -> Result<(Complex64, Complex64)> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("solution bases need finite x > 0, got {x}")));
    }
    match kind {
        SolutionKind::Phi => phi_with_derivative(p, x, s),
        SolutionKind::Psi => psi_eval(p, x, s),
        SolutionKind::UPlus | SolutionKind::UMinus => {
            if degeneracy_distance(s) < 1e-12 {
                return Err(Error::Degenerate(format!("2is is an integer for s = {s}; logarithmic case")));
            }
            let sign = if kind == SolutionKind::UPlus { 1.0 } else { -1.0 };
            u_any(p.b, p.c, c64(0.0, sign) * s, x)
        }
    }
}

fn nonpositive_integer(z: Complex64) -> Option<usize> {
    if z.im.abs() <= 1e-14 && z.re <= 0.5 {
        let r = z.re.round();
        if (z.re - r).abs() <= 1e-12 && r <= 0.0 {
            return Some((-r) as usize);
        }
    }
    None
}

/// Gauss hypergeometric function ₂F₁(A, B; C; z) for real z < 1.
pub fn gauss_2f1(a: Complex64, b: Complex64, c: Complex64, z: f64) -> Result<Complex64> {
    if !(z < 1.0) || !z.is_finite() {
        return Err(Error::Domain(format!("gauss_2f1 needs z < 1, got {z}")));
    }
    let term = [a, b].iter().filter_map(|&v| nonpositive_integer(v)).min();
    if let Some(cn) = nonpositive_integer(c) {
        if term.map_or(true, |n| n > cn) {
            return Err(Error::Pole { re: c.re, im: c.im });
        }
    }
    if z == 0.0 {
        return Ok(c64(1.0, 0.0));
    }
    if let Some(n) = term {
        let mut t = c64(1.0, 0.0);
        let mut sum = t;
        for k in 0..n {
            let kf = k as f64;
            t = t * (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * z;
            sum += t;
        }
        return Ok(sum);
    }
    if z <= INVERSION_POINT {
        if let Some(v) = gauss_inverted(a, b, c, z)? {
            return Ok(v);
        }
    }
    if z < 0.0 {
        if z >= -0.5 {
            let out = hyp_series(|k| ratio_2f1(a, b, c, k), z, SERIES_TOL)?;
            if out.digits_lost() <= MAX_DIGITS_LOST {
                return Ok(out.sum);
            }
        }
        let w = z / (z - 1.0);
        let pre = (-a * (1.0 - z).ln()).exp();
        return Ok(pre * gauss_unit(a, c - b, c, w)?);
    }
    gauss_unit(a, b, c, z)
}

/// Below this argument ₂F₁ is evaluated through the 1/z connection formula.
const INVERSION_POINT: f64 = -2.0;

/// ₂F₁ on z ≤ −2 from the two series in 1/z; `None` when a − b is too close to
/// an integer for the two terms to be computed without cancellation.
fn gauss_inverted(a: Complex64, b: Complex64, c: Complex64, z: f64) -> Result<Option<Complex64>> {
    let d = b - a;
    if d.im.abs() < 1e-3 && (d.re - d.re.round()).abs() < 1e-3 {
        return Ok(None);
    }
    let one = c64(1.0, 0.0);
    let term = |a: Complex64, b: Complex64| -> Result<Option<Complex64>> {
        let spec = GammaRatioSpec::new().num(c, 0.0).num(b - a, 0.0).den(b, 0.0).den(c - a, 0.0);
        let pre = gamma_bracket(&spec, c64(0.0, 0.0))?;
        if pre == c64(0.0, 0.0) {
            return Ok(Some(pre));
        }
        let out = hyp_series(|k| ratio_2f1(a, a - c + one, a - b + one, k), 1.0 / z, SERIES_TOL)?;
        if out.digits_lost() > MAX_DIGITS_LOST {
            return Ok(None);
        }
        Ok(Some(pre * (-a * (-z).ln()).exp() * out.sum))
    };
    match (term(a, b)?, term(b, a)?) {
        (Some(x), Some(y)) => Ok(Some(x + y)),
        _ => Ok(None),
    }
}

fn ratio_2f1(a: Complex64, b: Complex64, c: Complex64, k: usize) -> Complex64 {
    let kf = k as f64;
    (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0))
}

/// ₂F₁ on 0 ≤ w < 1: series near the origin, Taylor marching toward 1.
fn gauss_unit(a: Complex64, b: Complex64, c: Complex64, w: f64) -> Result<Complex64> {
    if w <= 0.5 {
        let out = hyp_series(|k| ratio_2f1(a, b, c, k), w, SERIES_TOL)?;
        if out.digits_lost() <= MAX_DIGITS_LOST {
            return Ok(out.sum);
        }
    }
    let mut wa = w.min(0.5);
    let anchor = loop {
        let out = hyp_series(|k| ratio_2f1(a, b, c, k), wa, SERIES_TOL)?;
        if out.digits_lost() <= 1.0 || wa < 1e-8 {
            break out;
        }
        wa *= 0.25;
    };
    let ode = Ode { p: [0.0, 1.0, -1.0], q: [c, -(a + b + 1.0)], r: -(a * b), sing: [0.0, 1.0] };
    Ok(ode.march(wa, anchor.sum, anchor.deriv, w, None)?.0)
}

/// Holds the Taylor tape of φ(·, s) for repeated evaluation at fixed s.
///
/// Below the direct-series radius the power series is used, above the
/// connection threshold the connection formula, and in between the recorded
/// Taylor segments of one upward march.
#[derive(Debug, Clone)]
pub struct KernelTape {
    inner: TapeInner,
}

#[derive(Debug, Clone)]
enum TapeInner {
    Real(TapeCore<f64>),
    Complex(TapeCore<Complex64>),
}

#[derive(Debug, Clone)]
struct TapeCore<T> {
    kern: Kern<T>,
    x_lo: f64,
    x_top: f64,
    pieces: Vec<Piece<T>>,
    conn_from: Option<f64>,
    top_value: T,
}

impl<T: Field> TapeCore<T> {
    fn build(kern: Kern<T>, x_needed: f64) -> Result<Self> {
        let x_lo = kern.x_direct_max();
        let conn_from = if kern.nondegenerate() { Some(kern.connection_threshold()) } else { None };
        let top = match conn_from {
            Some(xc) => x_needed.min(xc),
            None => x_needed.min(TAPE_CEILING),
        };
        let mut pieces = Vec::new();
        let (y0, dy0, _) = kern.direct(x_lo)?;
        let mut top_value = y0;
        let mut x_top = x_lo;
        if top > x_lo {
            top_value = kern.ode().march(x_lo, y0, dy0, top, Some(&mut pieces))?.0;
            x_top = top;
        }
        Ok(Self { kern, x_lo, x_top, pieces, conn_from, top_value })
    }

    fn eval(&self, x: f64) -> Result<T> {
        check_x(x)?;
        if x <= self.x_lo {
            return Ok(self.kern.direct(x)?.0);
        }
        if x <= self.x_top {
            if let Some(piece) = tape_lookup(&self.pieces, x) {
                return Ok(piece.eval(x));
            }
        }
        match self.conn_from {
            Some(xc) if x >= xc => Ok(self.kern.connection(x)?.0),
            None if self.x_top >= TAPE_CEILING => Ok(self.top_value * (self.x_top / x).powf(self.kern.b)),
            _ => Ok(self.kern.eval(x)?.0),
        }
    }
}

impl KernelTape {
    /// Prepares the kernel at fixed `s` for abscissae up to `x_needed`.
    pub fn new(p: KernelParams, s: Complex64, x_needed: f64, x_switch: f64) -> Result<Self> {
        let inner = if s.im == 0.0 {
            TapeInner::Real(TapeCore::build(kern_real(p, s.re, x_switch), x_needed)?)
        } else {
            TapeInner::Complex(TapeCore::build(kern_complex(p, s, x_switch), x_needed)?)
        };
        Ok(Self { inner })
    }

    /// φ(x, s).
    pub fn eval(&self, x: f64) -> Result<Complex64> {
        match &self.inner {
            TapeInner::Real(t) => Ok(c64(t.eval(x)?, 0.0)),
            TapeInner::Complex(t) => t.eval(x),
        }
    }

    /// φ(x, s) for a tape built at real s.
    pub fn eval_real(&self, x: f64) -> Result<f64> {
        match &self.inner {
            TapeInner::Real(t) => t.eval(x),
            TapeInner::Complex(t) => Ok(t.eval(x)?.re),
        }
    }

    /// Number of recorded Taylor segments.
    pub fn segments(&self) -> usize {
        match &self.inner {
            TapeInner::Real(t) => t.pieces.len(),
            TapeInner::Complex(t) => t.pieces.len(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma::gamma;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    /// Conical Legendre function P_{−1/2+is}(cosh t) from its Mehler–Fock
    /// integral (√2/π)∫₀ᵗ cos(su)/√(cosh t − cosh u) du, with u = t(1 − v²).
    fn legendre_conical(t: f64, s: f64) -> f64 {
        let (nodes, weights) = crate::quad::gauss_legendre_nodes(64).unwrap();
        let mut acc = 0.0;
        let panels = 16;
        for j in 0..panels {
            let lo = j as f64 / panels as f64;
            let hi = (j + 1) as f64 / panels as f64;
            for (xn, wn) in nodes.iter().zip(&weights) {
                let v = 0.5 * (lo + hi) + 0.5 * (hi - lo) * xn;
                let u = t * (1.0 - v * v);
                // cosh t − cosh u = 2 sinh((t+u)/2) sinh((t−u)/2) avoids cancellation near u = t.
                let denom = (2.0 * (0.5 * (t + u)).sinh() * (0.5 * (t - u)).sinh()).sqrt();
                acc += 0.5 * (hi - lo) * wn * (s * u).cos() * 2.0 * t * v / denom;
            }
        }
        std::f64::consts::SQRT_2 / std::f64::consts::PI * acc
    }

    #[test]
    fn phi_at_origin_and_parameter_collapse() {
        let p = KernelParams::new(1.3, 0.6).unwrap();
        assert_eq!(phi(p, 0.0, c64(2.0, 0.0)).unwrap(), c64(1.0, 0.0));
        for &x in &[0.2, 1.0, 3.0, 12.0, 150.0] {
            let v = phi(p, x, c64(0.0, p.c)).unwrap();
            let want = (1.0 + x).powf(p.c - p.b);
            assert!((v - want).norm() < 1e-11 * want, "x={x}: {v} vs {want}");
        }
    }

    #[test]
    fn phi_matches_legendre_oracle() {
        let p = KernelParams::new(0.5, 0.5).unwrap();
        for &x in &[0.1f64, 0.7, 2.0, 6.5, 30.0] {
            for &s in &[0.3, 1.0, 2.5, 6.0] {
                let t = (1.0 + 2.0 * x).acosh();
                let want = legendre_conical(t, s);
                let got = phi_real(p, x, s).unwrap();
                assert!((got - want).abs() < 1e-10 * want.abs().max(1e-3), "x={x} s={s}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn phi_is_even_in_s() {
        let p = KernelParams::new(0.8, 1.7).unwrap();
        for &x in &[0.05, 1.0, 7.0, 80.0, 2e4] {
            for &s in &[0.0, 0.4, 3.0, 25.0] {
                let a = phi(p, x, c64(s, 0.0)).unwrap();
                let b = phi(p, x, c64(-s, 0.0)).unwrap();
                assert_eq!(a, b);
                assert_eq!(a.im, 0.0);
            }
        }
    }

    #[test]
    fn connection_identity_holds() {
        let p = KernelParams::new(1.1, 0.7).unwrap();
        for &x in &[2.0, 5.0, 20.0, 100.0] {
            for &s in &[0.5, 1.5, 4.0] {
                let sc = c64(s, 0.0);
                let bp = connection_coeff(p, sc, Sign::Plus).unwrap();
                let bm = connection_coeff(p, sc, Sign::Minus).unwrap();
                assert!((bm - bp.conj()).norm() < 1e-13 * bp.norm());
                let up = solution(p, SolutionKind::UPlus, x, sc).unwrap();
                let um = solution(p, SolutionKind::UMinus, x, sc).unwrap();
                let mut tape = Vec::new();
                let d = kern_real(p, s, 1e9);
                let (y0, dy0, _) = d.direct(0.5).unwrap();
                d.ode().march(0.5, y0, dy0, x, Some(&mut tape)).unwrap();
                let marched = tape.last().unwrap().eval(x);
                let resid = (bp * up + bm * um - marched).norm();
                assert!(resid < 1e-10 * (bp * up).norm(), "x={x} s={s}: resid {resid}");
            }
        }
    }

    #[test]
    fn pfaff_and_connection_agree_on_overlap() {
        let p = KernelParams::new(0.9, 1.4).unwrap();
        for &x in &[2.0, 3.5, 6.0, 10.0] {
            for &s in &[0.3, 1.0, 2.7] {
                let sc = c64(s, 0.0);
                let a = phi_pfaff(p, x, sc).unwrap().re;
                let b = phi_connection(p, x, sc).unwrap().re;
                assert!(rel(a, b) < 1e-10, "x={x} s={s}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn complex_s_matches_pfaff() {
        let p = KernelParams::new(0.7, 0.9).unwrap();
        for &x in &[0.3, 2.0, 9.0, 40.0] {
            for &s in &[c64(1.0, 0.3), c64(4.0, -0.5), c64(12.0, 0.2)] {
                let a = phi(p, x, s).unwrap();
                let b = phi_pfaff(p, x, s).unwrap();
                assert!((a - b).norm() < 1e-10 * b.norm(), "x={x} s={s}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn eigenfunction_equation_by_finite_differences() {
        let p = KernelParams::new(0.6, 1.2).unwrap();
        for &s in &[0.5, 1.0, 3.0, 7.0] {
            for &x in &[0.1, 0.9, 4.0, 17.0, 50.0] {
                let h = 0.01 * x;
                let f = |t: f64| phi_real(p, t, s).unwrap();
                let d1 = (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h);
                let d2 = (-f(x - 2.0 * h) + 16.0 * f(x - h) - 30.0 * f(x) + 16.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h * h);
                let v = f(x);
                let dv = x * (x + 1.0) * d2 + ((p.b + p.c) + (2.0 * p.b + 1.0) * x) * d1 + p.b * p.b * v;
                let (_, der) = phi_real_with_derivative(p, x, s).unwrap();
                let scale = (v * v + der * der * x * (1.0 + x) / (s * s)).sqrt();
                assert!((dv + s * s * v).abs() < 1e-6 * s * s * scale, "s={s} x={x}");
            }
        }
    }

    #[test]
    fn derivative_matches_shifted_kernel() {
        let p = KernelParams::new(0.6, 1.2).unwrap();
        let q = KernelParams::new(1.6, 1.2).unwrap();
        for &s in &[0.0, 0.8, 5.0, 30.0] {
            for &x in &[0.01, 0.6, 3.0, 40.0, 900.0] {
                let (_, d) = phi_real_with_derivative(p, x, s).unwrap();
                let want = -(p.b * p.b + s * s) / (p.b + p.c) * phi_real(q, x, s).unwrap();
                assert!((d - want).abs() < 1e-10 * want.abs().max(1e-12), "s={s} x={x}: {d} vs {want}");
            }
        }
    }

    #[test]
    fn large_x_decay_is_bounded() {
        let p = KernelParams::new(0.75, 0.5).unwrap();
        for &s in &[0.0, 0.5, 2.0] {
            let vals: Vec<f64> = [1e3, 1e4, 1e5].iter().map(|&x| (phi_real(p, x, s).unwrap() * x.powf(p.b)).abs()).collect();
            let bound = if s == 0.0 { 10.0 * (1e5f64).ln() } else { 10.0 };
            assert!(vals.iter().all(|v| *v < bound), "s={s}: {vals:?}");
        }
    }

    #[test]
    fn degenerate_tape_reaches_the_ceiling() {
        // At s = 0 the tape marches to the far ceiling; φ grows like x^{1.3} here.
        let p = KernelParams::new(-1.3, 2.0).unwrap();
        let tape = KernelTape::new(p, c64(0.0, 0.0), f64::INFINITY, DEFAULT_X_SWITCH).unwrap();
        let far = tape.eval_real(1e50).unwrap();
        assert!(far.is_finite() && far != 0.0);
        let near = phi_real(p, 3.0, 0.0).unwrap();
        assert!((tape.eval_real(3.0).unwrap() - near).abs() < 1e-9 * near.abs());
    }

    #[test]
    fn tape_agrees_with_pointwise() {
        let p = KernelParams::new(1.2, 0.8).unwrap();
        for &s in &[0.0, 0.05, 2.0, 40.0] {
            let tape = KernelTape::new(p, c64(s, 0.0), 1e6, 4.0).unwrap();
            for &x in &[1e-3, 0.3, 2.0, 9.9, 14.0, 300.0, 1e5] {
                let a = tape.eval_real(x).unwrap();
                let b = phi_real(p, x, s).unwrap();
                assert!((a - b).abs() < 1e-10 * b.abs().max(1e-8 * x.powf(-p.b)), "s={s} x={x}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn gauss_2f1_identities() {
        let a = c64(0.7, 0.2);
        let b = c64(1.3, 0.0);
        for &z in &[-30.0, -2.0, -0.3, 0.4, 0.9, 0.999] {
            let v = gauss_2f1(a, b, b, z).unwrap();
            let want = (-a * (1.0 - z).ln()).exp();
            assert!((v - want).norm() < 1e-11 * want.norm(), "z={z}");
        }
        assert_eq!(gauss_2f1(a, b, c64(2.0, 0.0), 0.0).unwrap(), c64(1.0, 0.0));
        // Gauss summation as w → 1⁻.
        let (a, b, c) = (0.4, 0.9, 2.6);
        let want = gamma(c64(c, 0.0)).unwrap() * gamma(c64(c - a - b, 0.0)).unwrap()
            / (gamma(c64(c - a, 0.0)).unwrap() * gamma(c64(c - b, 0.0)).unwrap());
        let v = gauss_2f1(c64(a, 0.0), c64(b, 0.0), c64(c, 0.0), 1.0 - 1e-13).unwrap();
        assert!((v - want).norm() < 1e-11 * want.norm(), "{v} vs {want}");
        // Terminating polynomial.
        let v = gauss_2f1(c64(-1.0, 0.0), c64(2.5, 0.0), c64(1.5, 0.0), 0.3).unwrap();
        assert!((v.re - (1.0 - 2.5 * 0.3 / 1.5)).abs() < 1e-15);
        assert!(matches!(gauss_2f1(a.into(), b.into(), c64(-2.0, 0.0), 0.3), Err(Error::Pole { .. })));
    }

    #[test]
    fn inversion_branch_matches_pfaff_march() {
        let (a, b, c) = (c64(0.35, 0.0), c64(0.8, 0.4), c64(1.4, 0.0));
        for &z in &[-2.0, -5.0, -80.0] {
            let v = gauss_2f1(a, b, c, z).unwrap();
            let w = z / (z - 1.0);
            let want = (-a * (1.0 - z).ln()).exp() * gauss_unit(a, c - b, c, w).unwrap();
            assert!((v - want).norm() < 1e-12 * want.norm(), "z={z}: {v} vs {want}");
        }
    }

    #[test]
    fn gauss_2f1_large_parameters() {
        // Legendre: ₂F₁(−ν, ν+1; 1; (1−z)/2) = P_ν(z); compare against the kernel with b=c=1/2.
        let p = KernelParams::new(0.5, 0.5).unwrap();
        let s = 20.0;
        for &x in &[0.3, 3.0] {
            let f = gauss_2f1(c64(0.5, s), c64(0.5, -s), c64(1.0, 0.0), -x).unwrap();
            let k = phi_real(p, x, s).unwrap();
            assert!((f.re - k).abs() < 1e-10 * k.abs().max(1e-6), "x={x}: {f} vs {k}");
        }
    }

    #[test]
    fn psi_solves_the_equation() {
        let p = KernelParams::new(0.6, 0.7).unwrap();
        let s = c64(1.3, 0.0);
        for &x in &[0.4, 2.0, 8.0] {
            let h = 1e-3 * x;
            let f = |t: f64| solution(p, SolutionKind::Psi, t, s).unwrap();
            let d1 = (f(x + h) - f(x - h)) / (2.0 * h);
            let d2 = (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
            let (_, der) = solution_with_derivative(p, SolutionKind::Psi, x, s).unwrap();
            assert!((der - d1).norm() < 1e-6 * (der.norm() + f(x).norm() / x), "x={x}: {der} vs {d1}");
            let r = d2 * x * (x + 1.0) + d1 * ((p.b + p.c) + (2.0 * p.b + 1.0) * x) + f(x) * (p.b * p.b + 1.69);
            assert!(r.norm() < 1e-5 * f(x).norm().max(1.0), "x={x}: {r}");
        }
    }

    #[test]
    fn u_plus_leading_behaviour_and_symmetry() {
        let p = KernelParams::new(0.9, 0.4).unwrap();
        let s = c64(1.7, 0.0);
        let x: f64 = 1e7;
        let u = solution(p, SolutionKind::UPlus, x, s).unwrap();
        let lead = (c64(p.b, 1.7) * x.ln()).exp();
        assert!((u * lead - 1.0).norm() < 1e-6);
        for &x in &[0.5, 1.5, 3.0, 40.0] {
            let a = solution(p, SolutionKind::UMinus, x, s).unwrap();
            let b = solution(p, SolutionKind::UPlus, x, -s).unwrap();
            assert!((a - b).norm() < 1e-12 * a.norm());
        }
        // Pfaff branch and −1/x series agree around the switch.
        let (a, _) = u_any(p.b, p.c, c64(0.0, 1.7), 1.99).unwrap();
        let (b, _) = u_series(p.b, p.c, c64(0.0, 1.7), 1.99).unwrap();
        assert!((a - b).norm() < 1e-11 * a.norm());
        assert!(matches!(solution(p, SolutionKind::UPlus, 3.0, c64(0.0, 0.5)), Err(Error::Degenerate(_))));
    }
}
