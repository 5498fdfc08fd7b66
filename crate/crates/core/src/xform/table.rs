//! Piecewise Chebyshev tabulation of a forward transform on [0, s_max].

use super::{forward_real_result, TransformParams, WeightedFunction};
use crate::error::Result;
use crate::quad::QuadratureConfig;

const PANEL_WIDTH: f64 = 2.0;
const NODES: usize = 24;

/// Chebyshev points of the second kind on [lo, hi] in increasing order.
fn cheb_nodes(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|j| {
            let t = -(std::f64::consts::PI * j as f64 / (n - 1) as f64).cos();
            0.5 * (lo + hi) + 0.5 * (hi - lo) * t
        })
        .collect()
}

/// Barycentric interpolation through Chebyshev points of the second kind.
pub(crate) fn cheb_interp(nodes: &[f64], values: &[f64], s: f64) -> f64 {
    let n = nodes.len();
    let mut num = 0.0;
    let mut den = 0.0;
    for j in 0..n {
        let d = s - nodes[j];
        if d == 0.0 {
            return values[j];
        }
        let mut w = if j % 2 == 0 { 1.0 } else { -1.0 };
        if j == 0 || j == n - 1 {
            w *= 0.5;
        }
        num += w * values[j] / d;
        den += w / d;
    }
    num / den
}

/// Forward-transform samples on Chebyshev panels, evaluated by barycentric interpolation.
///
/// The table is zero beyond `s_max` and reflects evenly for negative s.
#[derive(Debug, Clone)]
pub struct SpectralTable {
    s_max: f64,
    width: f64,
    nodes: Vec<Vec<f64>>,
    values: Vec<Vec<f64>>,
    max_error: f64,
}

impl SpectralTable {
    /// Samples the transform of `f` on [0, cfg.s_max].
    pub fn build(p: &TransformParams, f: &WeightedFunction, cfg: &QuadratureConfig) -> Result<Self> {
        let panels = (cfg.s_max / PANEL_WIDTH).ceil().max(1.0) as usize;
        let width = cfg.s_max / panels as f64;
        let mut nodes = Vec::with_capacity(panels);
        let mut values = Vec::with_capacity(panels);
        let mut max_error: f64 = 0.0;
        let mut shared_left: Option<f64> = None;
        for k in 0..panels {
            let lo = k as f64 * width;
            let pts = cheb_nodes(lo, lo + width, NODES);
            let mut vals = Vec::with_capacity(NODES);
            for (j, &s) in pts.iter().enumerate() {
                if j == 0 {
                    if let Some(v) = shared_left {
                        vals.push(v);
                        continue;
                    }
                }
                let r = forward_real_result(p, f, s, cfg)?;
                max_error = max_error.max(r.error_estimate);
                vals.push(r.value);
            }
            shared_left = vals.last().copied();
            nodes.push(pts);
            values.push(vals);
        }
        Ok(Self { s_max: cfg.s_max, width, nodes, values, max_error })
    }

    /// Interpolated transform value at s.
    pub fn eval(&self, s: f64) -> f64 {
        let s = s.abs();
        if s > self.s_max {
            return 0.0;
        }
        let k = ((s / self.width) as usize).min(self.nodes.len() - 1);
        cheb_interp(&self.nodes[k], &self.values[k], s)
    }

    /// Largest quadrature error estimate among the samples.
    pub fn max_error_estimate(&self) -> f64 {
        self.max_error
    }

    pub fn s_max(&self) -> f64 {
        self.s_max
    }

    /// Boundaries between interpolation panels, where the interpolant is only continuous.
    pub fn panel_edges(&self) -> Vec<f64> {
        (1..self.nodes.len()).map(|k| k as f64 * self.width).collect()
    }

    /// All sample abscissae and values in increasing order.
    pub fn samples(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for (k, (n, v)) in self.nodes.iter().zip(&self.values).enumerate() {
            let skip = usize::from(k > 0);
            out.extend(n.iter().copied().zip(v.iter().copied()).skip(skip));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn barycentric_reproduces_polynomials() {
        let nodes = cheb_nodes(1.0, 3.0, NODES);
        let vals: Vec<f64> = nodes.iter().map(|s| s.powi(7) - 2.0 * s).collect();
        for &s in &[1.0, 1.37, 2.5, 3.0] {
            let v = cheb_interp(&nodes, &vals, s);
            assert!((v - (s.powi(7) - 2.0 * s)).abs() < 1e-11 * s.powi(7));
        }
    }
}
