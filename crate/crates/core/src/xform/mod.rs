//! The index hypergeometric transform on the weighted half-line
//! x^{b+c−1}(1+x)^{b−c}dx: Plancherel density, forward and inverse maps,
//! the Plancherel pairing, the discrete spectrum of the mixed regime, the
//! operator calculus and the resolvent.

mod green;
mod operators;
mod table;

pub use green::{green_kernel, resolvent_apply, GreenFunction};
pub use operators::{apply_d, apply_d_jet, apply_h, apply_p};
pub use table::SpectralTable;

use crate::error::{Error, Result};
use crate::gamma::{ln_abs_gamma, log_gamma_real};
use crate::hyper::{phi_real, KernelParams, KernelTape};
use crate::poly::romanovski_poly;
use crate::quad::{integrate_halfline_with, integrate_spectral, integrate_spectral_with, Decay, HalflineSpec, QuadResult, QuadratureConfig};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Spectral regime of the parameter pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// b ≥ 0: purely continuous spectrum.
    Continuous,
    /// b < 0 < b + c: continuous spectrum plus the eigenvalues (b+m)².
    Mixed,
}

/// Transform parameters (b, c) with their regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformParams {
    pub b: f64,
    pub c: f64,
    pub regime: Regime,
}

impl TransformParams {
    /// Validates b + c > 0, c > 0 and, for b < 0, that −b is not an integer.
    pub fn new(b: f64, c: f64) -> Result<Self> {
        KernelParams::new(b, c)?;
        let regime = if b >= 0.0 { Regime::Continuous } else { Regime::Mixed };
        if regime == Regime::Mixed && ((-b) - (-b).round()).abs() < 1e-9 {
            return Err(Error::Domain(format!("mixed regime needs −b outside the integers (b = {b})")));
        }
        Ok(Self { b, c, regime })
    }

    pub fn kernel(&self) -> KernelParams {
        KernelParams { b: self.b, c: self.c }
    }

    /// Number of discrete modes m = 0…⌊−b⌋ (zero in the continuous regime).
    pub fn discrete_count(&self) -> usize {
        match self.regime {
            Regime::Continuous => 0,
            Regime::Mixed => (-self.b).floor() as usize + 1,
        }
    }

    /// The weight x^{b+c−1}(1+x)^{b−c}.
    pub fn weight(&self, x: f64) -> f64 {
        if x == 0.0 {
            return if self.b + self.c == 1.0 { 1.0 } else if self.b + self.c > 1.0 { 0.0 } else { f64::INFINITY };
        }
        ((self.b + self.c - 1.0) * x.ln() + (self.b - self.c) * x.ln_1p()).exp()
    }

    fn inv_gamma_bc(&self) -> f64 {
        (-log_gamma_real(self.b + self.c).map(|l| l.re).unwrap_or(0.0)).exp()
    }
}

/// Parameters of the rank-one symmetric-space presets: b = (n+1)r/4 − 1/2, c = (n−1)r/4 + 1/2.
pub fn preset_hyperbolic(r: u32, n: u32) -> Result<TransformParams> {
    if !matches!(r, 1 | 2 | 4) || n < 1 {
        return Err(Error::Domain(format!("preset needs r ∈ {{1, 2, 4}} and n ≥ 1 (r = {r}, n = {n})")));
    }
    let (r, n) = (r as f64, n as f64);
    TransformParams::new((n + 1.0) * r / 4.0 - 0.5, (n - 1.0) * r / 4.0 + 0.5)
}

/// A function on the half-line with its asymptotic metadata.
pub struct WeightedFunction<'a> {
    f: Box<dyn Fn(f64) -> f64 + Send + Sync + 'a>,
    /// f(x) ~ x^{zero_exponent} as x → 0.
    pub zero_exponent: f64,
    /// Behaviour at infinity.
    pub decay: Decay,
}

impl<'a> WeightedFunction<'a> {
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'a, zero_exponent: f64, decay: Decay) -> Self {
        Self { f: Box::new(f), zero_exponent, decay }
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    /// Algebraic decay rate d in f = o(x^{−d}); infinite for faster decay.
    pub fn decay_exponent(&self) -> f64 {
        match self.decay {
            Decay::Algebraic(d) => d,
            _ => f64::INFINITY,
        }
    }
}

impl std::fmt::Debug for WeightedFunction<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WeightedFunction")
            .field("zero_exponent", &self.zero_exponent)
            .field("decay", &self.decay)
            .finish_non_exhaustive()
    }
}

/// A spectral function on s ≥ 0 plus discrete coefficients ⟨f, p_m⟩_w.
pub struct SpectralData<'a> {
    continuous: Box<dyn Fn(f64) -> f64 + Send + Sync + 'a>,
    pub discrete: Vec<(usize, f64)>,
    /// Points where the continuous part is not smooth (interpolation knots).
    pub breakpoints: Vec<f64>,
}

impl<'a> SpectralData<'a> {
    pub fn new(continuous: impl Fn(f64) -> f64 + Send + Sync + 'a, discrete: Vec<(usize, f64)>) -> Self {
        Self { continuous: Box::new(continuous), discrete, breakpoints: Vec::new() }
    }

    pub fn with_breakpoints(mut self, breakpoints: Vec<f64>) -> Self {
        self.breakpoints = breakpoints;
        self
    }

    pub fn continuous(&self, s: f64) -> f64 {
        (self.continuous)(s)
    }
}

/// Plancherel density (1/2π)|Γ(b+is)Γ(c+is)/Γ(2is)|².
pub fn density(p: &TransformParams, s: f64) -> f64 {
    let s = s.abs();
    if s == 0.0 {
        // Only b = 0 cancels the double zero coming from 1/Γ(2is).
        if p.b == 0.0 {
            return 2.0 * (2.0 * ln_abs_gamma(Complex64::new(p.c, 0.0)).unwrap_or(f64::NEG_INFINITY)).exp() / PI;
        }
        return 0.0;
    }
    let l = ln_abs_gamma(Complex64::new(p.b, s)).unwrap_or(f64::NEG_INFINITY)
        + ln_abs_gamma(Complex64::new(p.c, s)).unwrap_or(f64::NEG_INFINITY)
        - ln_abs_gamma(Complex64::new(0.0, 2.0 * s)).unwrap_or(f64::INFINITY);
    (2.0 * l).exp() / (2.0 * PI)
}

/// Abscissae where the kernel phase 2|s|·asinh√x crosses multiples of π.
fn phase_breakpoints(s: f64, upper: f64) -> Vec<f64> {
    let s = s.abs();
    if s < 0.5 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut k = 1.0;
    loop {
        let x = (k * PI / (2.0 * s)).sinh().powi(2);
        if x >= upper || out.len() >= 20_000 {
            break;
        }
        out.push(x);
        k += 1.0;
    }
    out
}

fn halfline_spec(p: &TransformParams, f: &WeightedFunction, growth: f64, s: f64, cfg: &QuadratureConfig) -> HalflineSpec {
    let decay = match f.decay {
        Decay::Algebraic(d) => Decay::Algebraic(d - p.b + 1.0 - growth),
        other => other,
    };
    let upper = match f.decay {
        Decay::Compact(h) => h,
        _ => cfg.x_max,
    };
    HalflineSpec {
        endpoint_exponent: f.zero_exponent + p.b + p.c - 1.0,
        decay,
        breakpoints: phase_breakpoints(s, upper),
    }
}

fn check_strip(p: &TransformParams, f: &WeightedFunction, s: Complex64) -> Result<()> {
    let bound = f.decay_exponent() - p.b;
    if s.im != 0.0 && !(s.im.abs() < bound) {
        return Err(Error::Strip { im: s.im, bound });
    }
    if f.decay_exponent() <= p.b {
        return Err(Error::Domain(format!(
            "f must decay faster than x^{{-{}}} for the transform integral to converge",
            p.b
        )));
    }
    Ok(())
}

fn tape_for(p: &TransformParams, f: &WeightedFunction, s: Complex64, cfg: &QuadratureConfig) -> Result<KernelTape> {
    let x_needed = match f.decay {
        Decay::Compact(h) => h,
        _ => f64::INFINITY,
    };
    KernelTape::new(p.kernel(), s, x_needed, cfg.series_switch)
}

/// Forward transform at real s with full quadrature diagnostics.
pub fn forward_real_result(p: &TransformParams, f: &WeightedFunction, s: f64, cfg: &QuadratureConfig) -> Result<QuadResult<f64>> {
    check_strip(p, f, Complex64::new(s, 0.0))?;
    let tape = tape_for(p, f, Complex64::new(s, 0.0), cfg)?;
    let spec = halfline_spec(p, f, 0.0, s, cfg);
    let norm = p.inv_gamma_bc();
    let integrand = |x: f64| -> f64 {
        let fx = f.eval(x);
        if fx == 0.0 || x == 0.0 {
            return 0.0;
        }
        fx * tape.eval_real(x).unwrap_or(f64::NAN) * p.weight(x)
    };
    let mut r = integrate_halfline_with(&integrand, &spec, cfg);
    r.value *= norm;
    r.error_estimate *= norm;
    if !r.value.is_finite() {
        return Err(Error::no_conv("forward transform", format!("non-finite value at s = {s}")));
    }
    Ok(r)
}

/// Forward transform at complex s inside the holomorphy strip.
pub fn forward_result(p: &TransformParams, f: &WeightedFunction, s: Complex64, cfg: &QuadratureConfig) -> Result<QuadResult<Complex64>> {
    if s.im == 0.0 {
        let r = forward_real_result(p, f, s.re, cfg)?;
        return Ok(QuadResult { value: Complex64::new(r.value, 0.0), error_estimate: r.error_estimate, evaluations: r.evaluations, converged: r.converged });
    }
    check_strip(p, f, s)?;
    let tape = tape_for(p, f, s, cfg)?;
    let spec = halfline_spec(p, f, s.im.abs(), s.norm(), cfg);
    let norm = p.inv_gamma_bc();
    let integrand = |x: f64| -> Complex64 {
        let fx = f.eval(x);
        if fx == 0.0 || x == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        tape.eval(x).unwrap_or(Complex64::new(f64::NAN, 0.0)) * (fx * p.weight(x))
    };
    let mut r = integrate_halfline_with(&integrand, &spec, cfg);
    r.value *= norm;
    r.error_estimate *= norm;
    if !(r.value.re.is_finite() && r.value.im.is_finite()) {
        return Err(Error::no_conv("forward transform", format!("non-finite value at s = {s}")));
    }
    Ok(r)
}

fn require_converged<T>(r: QuadResult<T>, context: &str) -> Result<T> {
    if r.converged {
        Ok(r.value)
    } else {
        Err(Error::no_conv(context, format!("error estimate {:.3e}", r.error_estimate)))
    }
}

/// (1/Γ(b+c))∫₀^∞ f(x)φ(x,s)x^{b+c−1}(1+x)^{b−c}dx.
pub fn forward(p: &TransformParams, f: &WeightedFunction, s: Complex64, cfg: &QuadratureConfig) -> Result<Complex64> {
    require_converged(forward_result(p, f, s, cfg)?, "forward transform")
}

/// Spectral s-integral of the inverse map with diagnostics (continuous part only).
pub fn inverse_continuous_result(p: &TransformParams, g: &SpectralData, x: f64, cfg: &QuadratureConfig) -> Result<QuadResult<f64>> {
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("inverse needs x ≥ 0, got {x}")));
    }
    let kp = p.kernel();
    let norm = p.inv_gamma_bc();
    let integrand = |s: f64| -> f64 {
        let gs = g.continuous(s);
        if gs == 0.0 {
            return 0.0;
        }
        gs * phi_real(kp, x, s).unwrap_or(f64::NAN) * density(p, s)
    };
    let freq = 2.0 * x.sqrt().asinh();
    let mut r = integrate_spectral_with(&integrand, 0.0, cfg.s_max, freq, &g.breakpoints, cfg);
    r.value *= norm;
    r.error_estimate *= norm;
    Ok(r)
}

/// Discrete part Σ coeff_m·p_m(x)/‖p_m‖².
pub fn inverse_discrete(p: &TransformParams, g: &SpectralData, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if g.discrete.is_empty() {
        return Ok(0.0);
    }
    let modes = discrete_spectrum(p, cfg)?;
    let mut acc = 0.0;
    for &(m, coeff) in &g.discrete {
        let mode = modes
            .iter()
            .find(|d| d.m == m)
            .ok_or_else(|| Error::Domain(format!("discrete index m = {m} outside the spectrum")))?;
        acc += coeff * romanovski_poly(p, m)?.eval(x) / mode.norm_sq;
    }
    Ok(acc)
}

/// Inverse transform: continuous spectral integral plus the discrete Romanovski terms.
pub fn inverse(p: &TransformParams, g: &SpectralData, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let cont = require_converged(inverse_continuous_result(p, g, x, cfg)?, "inverse transform")?;
    Ok(cont + inverse_discrete(p, g, x, cfg)?)
}

/// One discrete eigenmode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscreteMode {
    pub m: usize,
    pub eigenvalue: f64,
    pub norm_sq: f64,
}

/// The eigenvalues (b+m)² and quadrature norms ‖p_m‖²_w of the mixed regime.
pub fn discrete_spectrum(p: &TransformParams, cfg: &QuadratureConfig) -> Result<Vec<DiscreteMode>> {
    if p.regime != Regime::Mixed {
        return Err(Error::Domain("the discrete spectrum exists only in the mixed regime".into()));
    }
    let mut out = Vec::new();
    for m in 0..p.discrete_count() {
        let pm = romanovski_poly(p, m)?;
        let spec = HalflineSpec {
            endpoint_exponent: p.b + p.c - 1.0,
            decay: Decay::Algebraic(1.0 - 2.0 * p.b - 2.0 * m as f64),
            breakpoints: Vec::new(),
        };
        let r = integrate_halfline_with(&|x: f64| pm.eval(x).powi(2) * p.weight(x), &spec, cfg);
        let norm_sq = require_converged(r, "discrete norm")?;
        out.push(DiscreteMode { m, eigenvalue: (p.b + m as f64).powi(2), norm_sq });
    }
    Ok(out)
}

/// Discrete coefficients ⟨f, p_m⟩_w for every mode (empty in the continuous regime).
pub fn discrete_coefficients(p: &TransformParams, f: &WeightedFunction, cfg: &QuadratureConfig) -> Result<Vec<(usize, f64)>> {
    let mut out = Vec::new();
    for m in 0..p.discrete_count() {
        let pm = romanovski_poly(p, m)?;
        let decay = match f.decay {
            Decay::Algebraic(d) => Decay::Algebraic(d + 1.0 - 2.0 * p.b - m as f64),
            other => other,
        };
        let spec = HalflineSpec { endpoint_exponent: f.zero_exponent + p.b + p.c - 1.0, decay, breakpoints: Vec::new() };
        // Absolute tolerance scaled by ∫|f p_m| w, since c_m may vanish by cancellation.
        let size = integrate_halfline_with(&|x: f64| (f.eval(x) * pm.eval(x)).abs() * p.weight(x), &spec, cfg);
        let local = QuadratureConfig { tol_abs: cfg.tol_abs.max(cfg.tol_rel * size.value), ..cfg.clone() };
        let r = integrate_halfline_with(&|x: f64| f.eval(x) * pm.eval(x) * p.weight(x), &spec, &local);
        out.push((m, require_converged(r, "discrete coefficient")?));
    }
    Ok(out)
}

/// Returns (∫f₁f₂w dx, ∫f̂₁f̂₂ρ ds + Σ c_m(f₁)c_m(f₂)/‖p_m‖²).
pub fn plancherel_pairing(p: &TransformParams, f1: &WeightedFunction, f2: &WeightedFunction, cfg: &QuadratureConfig) -> Result<(f64, f64)> {
    let decay = match (f1.decay, f2.decay) {
        (Decay::Compact(a), Decay::Compact(b)) => Decay::Compact(a.min(b)),
        (Decay::Compact(a), _) | (_, Decay::Compact(a)) => Decay::Compact(a),
        (Decay::Superpolynomial, _) | (_, Decay::Superpolynomial) => Decay::Superpolynomial,
        (Decay::Algebraic(a), Decay::Algebraic(b)) => Decay::Algebraic(a + b + 1.0 - 2.0 * p.b),
    };
    let spec = HalflineSpec {
        endpoint_exponent: f1.zero_exponent + f2.zero_exponent + p.b + p.c - 1.0,
        decay,
        breakpoints: Vec::new(),
    };
    let lhs = require_converged(
        integrate_halfline_with(&|x: f64| f1.eval(x) * f2.eval(x) * p.weight(x), &spec, cfg),
        "plancherel pairing (x side)",
    )?;
    let t1 = SpectralTable::build(p, f1, cfg)?;
    let t2 = SpectralTable::build(p, f2, cfg)?;
    let freq = 0.0;
    let cont = integrate_spectral(&|s: f64| t1.eval(s) * t2.eval(s) * density(p, s), freq, cfg).value;
    let mut rhs = cont;
    if p.regime == Regime::Mixed {
        let modes = discrete_spectrum(p, cfg)?;
        let c1 = discrete_coefficients(p, f1, cfg)?;
        let c2 = discrete_coefficients(p, f2, cfg)?;
        for ((mode, a), b) in modes.iter().zip(&c1).zip(&c2) {
            rhs += a.1 * b.1 / mode.norm_sq;
        }
    }
    Ok((lhs, rhs))
}

/// Tabulates the forward transform of `f` and returns it as spectral data with discrete coefficients.
pub fn spectral_data<'a>(p: &TransformParams, f: &WeightedFunction, cfg: &QuadratureConfig) -> Result<SpectralData<'a>> {
    let table = SpectralTable::build(p, f, cfg)?;
    let discrete = discrete_coefficients(p, f, cfg)?;
    let edges = table.panel_edges();
    Ok(SpectralData::new(move |s| table.eval(s), discrete).with_breakpoints(edges))
}
