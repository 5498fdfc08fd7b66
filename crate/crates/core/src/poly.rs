//! Jacobi, Wilson and Romanovski polynomials as exact coefficient sequences.

use crate::error::{Error, Result};
use crate::gamma::{gamma_ratio_real, ln_abs_gamma, pochhammer_real};
use crate::xform::TransformParams;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Variable in which a coefficient sequence is expressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariableTag {
    X,
    SSquared,
    InvOnePlusX,
}

/// Polynomial in ascending powers; the zero polynomial has no coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyCoeffs {
    pub coefficients: Vec<f64>,
    pub variable_tag: VariableTag,
}

impl PolyCoeffs {
    /// Builds the canonical form by dropping trailing zero coefficients.
    pub fn new(mut coefficients: Vec<f64>, variable_tag: VariableTag) -> Self {
        while coefficients.last() == Some(&0.0) {
            coefficients.pop();
        }
        Self { coefficients, variable_tag }
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coefficients.len().checked_sub(1)
    }

    /// Horner evaluation at `t`.
    pub fn eval(&self, t: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }

    /// Value and first two derivatives at `t`.
    pub fn eval_jet(&self, t: f64) -> (f64, f64, f64) {
        let (mut v, mut d1, mut d2) = (0.0, 0.0, 0.0);
        for c in self.coefficients.iter().rev() {
            d2 = d2 * t + 2.0 * d1;
            d1 = d1 * t + v;
            v = v * t + c;
        }
        (v, d1, d2)
    }

    /// Linear combination α·self + β·other (same variable).
    pub fn combine(&self, alpha: f64, other: &PolyCoeffs, beta: f64) -> Result<PolyCoeffs> {
        if self.variable_tag != other.variable_tag {
            return Err(Error::Domain("cannot combine polynomials in different variables".into()));
        }
        let n = self.coefficients.len().max(other.coefficients.len());
        let get = |v: &[f64], k: usize| v.get(k).copied().unwrap_or(0.0);
        let c = (0..n)
            .map(|k| alpha * get(&self.coefficients, k) + beta * get(&other.coefficients, k))
            .collect();
        Ok(PolyCoeffs::new(c, self.variable_tag))
    }
}

/// Coefficients of ₂F₁(−n, B; C; κx) times `scale`.
fn terminating_2f1_coeffs(n: usize, b: f64, c: f64, kappa: f64, scale: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut t = scale;
    out.push(t);
    for k in 0..n {
        let kf = k as f64;
        t *= (kf - n as f64) * (b + kf) / ((c + kf) * (kf + 1.0)) * kappa;
        out.push(t);
    }
    out
}

/// Shifted Jacobi polynomial on [0, 1], orthogonal for x^β(1−x)^α.
pub fn jacobi_poly(alpha: f64, beta: f64, n: usize) -> Result<PolyCoeffs> {
    if !(alpha > -1.0 && beta > -1.0) {
        return Err(Error::Domain(format!("Jacobi parameters need α, β > −1 (α = {alpha}, β = {beta})")));
    }
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let pre = sign * pochhammer_real(beta + 1.0, n) / pochhammer_real(1.0, n);
    let c = terminating_2f1_coeffs(n, n as f64 + alpha + beta + 1.0, beta + 1.0, 1.0, pre);
    Ok(PolyCoeffs::new(c, VariableTag::X))
}

/// Squared norm of [`jacobi_poly`] for the weight x^β(1−x)^α on [0, 1].
pub fn jacobi_norm_sq(alpha: f64, beta: f64, n: usize) -> Result<f64> {
    if !(alpha > -1.0 && beta > -1.0) {
        return Err(Error::Domain(format!("Jacobi parameters need α, β > −1 (α = {alpha}, β = {beta})")));
    }
    let nf = n as f64;
    if n == 0 {
        return gamma_ratio_real(&[alpha + 1.0, beta + 1.0], &[alpha + beta + 2.0]);
    }
    let g = gamma_ratio_real(&[nf + alpha + 1.0, nf + beta + 1.0], &[nf + 1.0, nf + alpha + beta + 1.0])?;
    Ok(g / (2.0 * nf + alpha + beta + 1.0))
}

fn check_wilson(params: [f64; 4]) -> Result<()> {
    if params.iter().any(|p| !(*p > 0.0)) {
        return Err(Error::Domain(format!("Wilson parameters must be positive, got {params:?}")));
    }
    Ok(())
}

/// Wilson polynomial W_n(a,b,c,d; s²) as a terminating ₄F₃ sum in real arithmetic.
pub fn wilson_poly(a: f64, b: f64, c: f64, d: f64, n: usize, s: f64) -> Result<f64> {
    check_wilson([a, b, c, d])?;
    let nf = n as f64;
    let top = nf + a + b + c + d - 1.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..n {
        let kf = k as f64;
        let conj = (a + kf) * (a + kf) + s * s;
        term *= (kf - nf) * (top + kf) * conj / ((a + b + kf) * (a + c + kf) * (a + d + kf) * (kf + 1.0));
        sum += term;
    }
    Ok(pochhammer_real(a + b, n) * pochhammer_real(a + c, n) * pochhammer_real(a + d, n) * sum)
}

/// Coefficients of W_n(a,b,c,d; t) in the variable t = s².
pub fn wilson_poly_coeffs(a: f64, b: f64, c: f64, d: f64, n: usize) -> Result<PolyCoeffs> {
    check_wilson([a, b, c, d])?;
    let nf = n as f64;
    let top = nf + a + b + c + d - 1.0;
    let pre = pochhammer_real(a + b, n) * pochhammer_real(a + c, n) * pochhammer_real(a + d, n);
    let mut acc = vec![0.0; n + 1];
    // prod holds ∏_{j<k}((a+j)² + t) as coefficients in t.
    let mut prod = vec![1.0];
    let mut scal = 1.0;
    for k in 0..=n {
        for (i, p) in prod.iter().enumerate() {
            acc[i] += pre * scal * p;
        }
        if k == n {
            break;
        }
        let kf = k as f64;
        scal *= (kf - nf) * (top + kf) / ((a + b + kf) * (a + c + kf) * (a + d + kf) * (kf + 1.0));
        let r = (a + kf) * (a + kf);
        let mut next = vec![0.0; prod.len() + 1];
        for (i, p) in prod.iter().enumerate() {
            next[i] += r * p;
            next[i + 1] += p;
        }
        prod = next;
    }
    Ok(PolyCoeffs::new(acc, VariableTag::SSquared))
}

/// Wilson weight (1/π)|Γ(a+is)Γ(b+is)Γ(c+is)Γ(d+is)/Γ(2is)|².
pub fn wilson_weight(a: f64, b: f64, c: f64, d: f64, s: f64) -> Result<f64> {
    check_wilson([a, b, c, d])?;
    if s == 0.0 {
        return Ok(0.0);
    }
    let s = s.abs();
    let mut l = -ln_abs_gamma(Complex64::new(0.0, 2.0 * s))?;
    for p in [a, b, c, d] {
        l += ln_abs_gamma(Complex64::new(p, s))?;
    }
    Ok((2.0 * l).exp() / std::f64::consts::PI)
}

/// Romanovski polynomial p_m = ₂F₁(−m, 2b+m; b+c; −x) of the discrete spectrum.
pub fn romanovski_poly(p: &TransformParams, m: usize) -> Result<PolyCoeffs> {
    let count = p.discrete_count();
    if count == 0 {
        return Err(Error::Domain("Romanovski polynomials exist only in the mixed regime (b < 0)".into()));
    }
    if m >= count {
        return Err(Error::Domain(format!("degree m = {m} outside 0..={} for b = {}", count - 1, p.b)));
    }
    let c = terminating_2f1_coeffs(m, 2.0 * p.b + m as f64, p.b + p.c, -1.0, 1.0);
    Ok(PolyCoeffs::new(c, VariableTag::X))
}

/// Exact action of D f = x(x+1)f″ + [(b+c)+(2b+1)x]f′ + b²f on a polynomial in x.
pub fn apply_d_to_poly(p: &TransformParams, q: &PolyCoeffs) -> Result<PolyCoeffs> {
    if q.variable_tag != VariableTag::X {
        return Err(Error::Domain("apply_d_to_poly needs a polynomial in x".into()));
    }
    let a = &q.coefficients;
    let (b, c) = (p.b, p.c);
    let out = (0..a.len())
        .map(|k| {
            let kf = k as f64;
            let diag = (b + kf) * (b + kf) * a[k];
            let upper = a.get(k + 1).map_or(0.0, |n| n * (kf + 1.0) * (kf + b + c));
            diag + upper
        })
        .collect();
    Ok(PolyCoeffs::new(out, VariableTag::X))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate, integrate_spectral, QuadratureConfig};

    /// ∫₀¹ g(x) x^β (1−x)^α dx with both endpoint factors removed by substitution.
    fn jacobi_weighted(g: impl Fn(f64) -> f64, alpha: f64, beta: f64) -> f64 {
        let cfg = QuadratureConfig { tol_rel: 1e-14, ..QuadratureConfig::default() };
        let qb = 1.0 / (1.0 + beta);
        let qa = 1.0 / (1.0 + alpha);
        let ub = 0.5f64.powf(1.0 + beta);
        let ua = 0.5f64.powf(1.0 + alpha);
        let left = integrate(&|u: f64| {
            let x = u.powf(qb);
            g(x) * (1.0 - x).powf(alpha) * qb
        }, 0.0, ub, &cfg);
        let right = integrate(&|v: f64| {
            let y = v.powf(qa);
            let x = 1.0 - y;
            g(x) * x.powf(beta) * qa
        }, 0.0, ua, &cfg);
        left.value + right.value
    }

    #[test]
    fn jacobi_examples() {
        assert_eq!(jacobi_poly(0.3, 0.2, 0).unwrap().coefficients, vec![1.0]);
        assert_eq!(jacobi_poly(0.0, 0.0, 1).unwrap().coefficients, vec![-1.0, 2.0]);
        for n in 0..6 {
            let lead = *jacobi_poly(0.5, 0.5, n).unwrap().coefficients.last().unwrap();
            assert!(lead > 0.0);
            let low = jacobi_poly(0.5, 0.5, n).unwrap().coefficients[0];
            assert_eq!(low.signum(), if n % 2 == 0 { 1.0 } else { -1.0 });
        }
        assert!((jacobi_norm_sq(0.0, 0.0, 0).unwrap() - 1.0).abs() < 1e-15);
        assert!((jacobi_norm_sq(0.0, 0.0, 1).unwrap() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn jacobi_orthogonality() {
        for &(alpha, beta) in &[(0.0, 0.0), (1.5, 0.3)] {
            let polys: Vec<PolyCoeffs> = (0..=6).map(|n| jacobi_poly(alpha, beta, n).unwrap()).collect();
            for n in 0..=6 {
                for k in 0..=n {
                    let v = jacobi_weighted(|x| polys[n].eval(x) * polys[k].eval(x), alpha, beta);
                    let want = if n == k { jacobi_norm_sq(alpha, beta, n).unwrap() } else { 0.0 };
                    let scale = (jacobi_norm_sq(alpha, beta, n).unwrap() * jacobi_norm_sq(alpha, beta, k).unwrap()).sqrt();
                    assert!((v - want).abs() < 1e-10 * scale, "α={alpha} β={beta} n={n} k={k}: {v} vs {want}");
                }
            }
        }
    }

    #[test]
    fn wilson_basics_and_coefficients() {
        assert_eq!(wilson_poly(0.7, 0.9, 1.1, 1.3, 0, 2.0).unwrap(), 1.0);
        for n in 0..5 {
            let coeffs = wilson_poly_coeffs(0.7, 0.9, 1.1, 1.3, n).unwrap();
            assert_eq!(coeffs.degree(), Some(n));
            for &s in &[0.0, 0.4, 1.7, 3.0] {
                let a = wilson_poly(0.7, 0.9, 1.1, 1.3, n, s).unwrap();
                assert_eq!(a, wilson_poly(0.7, 0.9, 1.1, 1.3, n, -s).unwrap());
                let b = coeffs.eval(s * s);
                assert!((a - b).abs() < 1e-11 * a.abs().max(1.0), "n={n} s={s}");
            }
        }
    }

    #[test]
    fn wilson_symmetry_all_permutations() {
        let base = [0.7, 0.9, 1.1, 1.3];
        let mut perms = Vec::new();
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    for l in 0..4 {
                        let set = [i, j, k, l];
                        if (0..4).all(|v| set.contains(&v)) {
                            perms.push([base[i], base[j], base[k], base[l]]);
                        }
                    }
                }
            }
        }
        assert_eq!(perms.len(), 24);
        for n in 0..=4 {
            for &s in &[0.3, 1.2] {
                let w0 = wilson_poly(base[0], base[1], base[2], base[3], n, s).unwrap();
                for p in &perms {
                    let w = wilson_poly(p[0], p[1], p[2], p[3], n, s).unwrap();
                    assert!((w - w0).abs() < 1e-9 * w0.abs().max(1.0), "n={n} s={s} {p:?}");
                }
            }
        }
    }

    #[test]
    fn wilson_weight_total_mass_is_twice_dbw() {
        let (a, b, c, d) = (0.7, 0.9, 1.1, 1.3);
        assert_eq!(wilson_weight(a, b, c, d, 0.0).unwrap(), 0.0);
        let cfg = QuadratureConfig { s_max: 60.0, tol_rel: 1e-13, ..QuadratureConfig::default() };
        let r = integrate_spectral(&|s| wilson_weight(a, b, c, d, s).unwrap(), 0.0, &cfg);
        let dbw = gamma_ratio_real(&[a + b, a + c, a + d, b + c, b + d, c + d], &[a + b + c + d]).unwrap();
        assert!((r.value / 2.0 - dbw).abs() < 1e-10 * dbw);
    }

    #[test]
    fn romanovski_examples_and_eigenrelation() {
        let p = TransformParams::new(-1.3, 2.0).unwrap();
        assert_eq!(romanovski_poly(&p, 0).unwrap().coefficients, vec![1.0]);
        let p1 = romanovski_poly(&p, 1).unwrap();
        assert!((p1.coefficients[1] + 1.6 / 0.7).abs() < 1e-15);
        assert!(romanovski_poly(&p, 2).is_err());
        assert!(romanovski_poly(&TransformParams::new(0.5, 0.5).unwrap(), 0).is_err());
        for m in 0..2 {
            let q = romanovski_poly(&p, m).unwrap();
            let dq = apply_d_to_poly(&p, &q).unwrap();
            let lam = (p.b + m as f64).powi(2);
            for (x, y) in dq.coefficients.iter().zip(&q.coefficients) {
                assert!((x - lam * y).abs() < 1e-12 * y.abs().max(1.0));
            }
        }
        let one = PolyCoeffs::new(vec![1.0], VariableTag::X);
        assert_eq!(apply_d_to_poly(&p, &one).unwrap().coefficients, vec![p.b * p.b]);
    }

    #[test]
    fn d_action_is_linear_and_matches_jets() {
        let p = TransformParams::new(0.4, 0.9).unwrap();
        let q1 = PolyCoeffs::new(vec![1.0, -2.0, 0.5, 3.0], VariableTag::X);
        let q2 = PolyCoeffs::new(vec![0.2, 1.0], VariableTag::X);
        let lhs = apply_d_to_poly(&p, &q1.combine(2.0, &q2, -3.0).unwrap()).unwrap();
        let rhs = apply_d_to_poly(&p, &q1).unwrap().combine(2.0, &apply_d_to_poly(&p, &q2).unwrap(), -3.0).unwrap();
        for (a, b) in lhs.coefficients.iter().zip(&rhs.coefficients) {
            assert!((a - b).abs() < 1e-13);
        }
        let x = 1.7;
        let (v, d1, d2) = q1.eval_jet(x);
        let direct = x * (x + 1.0) * d2 + ((p.b + p.c) + (2.0 * p.b + 1.0) * x) * d1 + p.b * p.b * v;
        assert!((apply_d_to_poly(&p, &q1).unwrap().eval(x) - direct).abs() < 1e-12 * direct.abs());
    }
}
