//! Generalized hypergeometric sums ₚF_q.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Value of a (possibly nonterminating) ₚF_q sum with its estimated error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PfqSum {
    pub value: Complex64,
    pub tail_estimate: f64,
    pub terms: usize,
}

fn terminating_degree(num: &[Complex64]) -> Option<usize> {
    num.iter()
        .filter_map(|a| {
            let r = a.re.round();
            (a.im.abs() <= 1e-14 && r <= 0.0 && (a.re - r).abs() <= 1e-12).then_some((-r) as usize)
        })
        .min()
}

fn term_ratio(num: &[Complex64], den: &[Complex64], z: Complex64, k: usize) -> Result<Complex64> {
    let kf = k as f64;
    let mut r = z / (kf + 1.0);
    for a in num {
        r *= a + kf;
    }
    for b in den {
        let d = b + kf;
        if d.norm() < 1e-300 {
            return Err(Error::Pole { re: b.re, im: b.im });
        }
        r /= d;
    }
    Ok(r)
}

/// Exact finite sum of a terminating ₚF_q (one numerator parameter equal to −n, n ≤ nmax).
pub fn pfq_terminating(num: &[Complex64], den: &[Complex64], z: Complex64, nmax: usize) -> Result<Complex64> {
    let n = terminating_degree(num)
        .ok_or_else(|| Error::Domain("no numerator parameter is a non-positive integer".into()))?;
    if n > nmax {
        return Err(Error::Domain(format!("series terminates after {n} terms, above the limit {nmax}")));
    }
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for k in 0..n {
        term *= term_ratio(num, den, z, k)?;
        sum += term;
    }
    Ok(sum)
}

const DIRECT_TERMS: usize = 4000;
const LEVIN_ORDER: usize = 32;

/// Sums ₚF_q(z) for |z| ≤ 1, accelerating slowly convergent series with the Levin u-transform.
///
/// Fails with a non-convergence error when the estimated error exceeds `tol·|value|`.
pub fn pfq_sum(num: &[Complex64], den: &[Complex64], z: Complex64, tol: f64) -> Result<PfqSum> {
    if let Some(n) = terminating_degree(num) {
        let v = pfq_terminating(num, den, z, n)?;
        return Ok(PfqSum { value: v, tail_estimate: 0.0, terms: n + 1 });
    }
    if z.norm() > 1.0 + 1e-15 {
        return Err(Error::Domain(format!("pfq_sum needs |z| ≤ 1, got {z}")));
    }
    if num.len() > den.len() + 1 {
        return Err(Error::Domain("nonterminating series with p > q + 1 diverges".into()));
    }
    if num.len() == den.len() + 1 && z.norm() > 1.0 - 1e-12 {
        let excess: f64 = den.iter().map(|b| b.re).sum::<f64>() - num.iter().map(|a| a.re).sum::<f64>();
        if excess <= 0.0 {
            return Err(Error::Domain(format!("series diverges on |z| = 1 (parameter excess {excess})")));
        }
    }
    let mut terms = Vec::with_capacity(64);
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    terms.push(term);
    let mut small = 0;
    for k in 0..DIRECT_TERMS {
        term *= term_ratio(num, den, z, k)?;
        if terms.len() <= LEVIN_ORDER + 1 {
            terms.push(term);
        }
        sum += term;
        if term.norm() <= 0.25 * f64::EPSILON * sum.norm() {
            small += 1;
            if small >= 3 {
                return Ok(PfqSum { value: sum, tail_estimate: 4.0 * f64::EPSILON * sum.norm(), terms: k + 2 });
            }
        } else {
            small = 0;
        }
    }
    let (value, tail) = levin_u(&terms);
    let tail = tail.max(16.0 * f64::EPSILON * value.norm());
    if !(tail <= tol * value.norm()) {
        return Err(Error::no_conv("pfq_sum", format!("tail bound {tail:.3e} exceeds tolerance at value {value}")));
    }
    Ok(PfqSum { value, tail_estimate: tail, terms: terms.len() })
}

/// Levin u-transform (β = 1) of the series with the given terms.
///
/// Returns the estimate of lowest successive difference and that difference.
pub(crate) fn levin_u(terms: &[Complex64]) -> (Complex64, f64) {
    let beta = 1.0;
    let mut partial = Vec::with_capacity(terms.len());
    let mut acc = Complex64::new(0.0, 0.0);
    for t in terms {
        acc += t;
        partial.push(acc);
    }
    let mut prev: Option<Complex64> = None;
    let mut best = (partial[partial.len() - 1], f64::INFINITY);
    for k in 1..terms.len() {
        let mut num = Complex64::new(0.0, 0.0);
        let mut den = Complex64::new(0.0, 0.0);
        let mut binom = 1.0;
        for j in 0..=k {
            let w = terms[j] * (beta + j as f64);
            let c = binom * ((beta + j as f64) / (beta + k as f64)).powi(k as i32 - 1);
            let c = if j % 2 == 0 { c } else { -c };
            num += partial[j] * c / w;
            den += c / w;
            binom = binom * (k - j) as f64 / (j + 1) as f64;
        }
        let est = num / den;
        if let Some(p) = prev {
            let d = (est - p).norm();
            if d < best.1 {
                best = (est, d);
            }
        }
        prev = Some(est);
    }
    best
}
