//! Chebyshev points of the first kind, barycentric interpolation and
//! Chebyshev coefficients.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::math;

/// `n` first-kind points on `[lo, hi]` in increasing order.
pub fn nodes(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n)
        .map(|j| {
            let x = -math::cos(PI * (j as f64 + 0.5) / n as f64);
            0.5 * (lo + hi) + 0.5 * (hi - lo) * x
        })
        .collect()
}

/// Barycentric weights matching [`nodes`] (increasing order).
pub fn barycentric_weights(n: usize) -> Vec<f64> {
    (0..n)
        .map(|j| {
            let theta = PI * (j as f64 + 0.5) / n as f64;
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sign * math::sin(theta)
        })
        .collect()
}

/// Values at `x` of the Lagrange basis polynomials on `nodes`, written into
/// `out`. Exact (a unit vector) when `x` coincides with a node.
pub fn lagrange_row(nodes: &[f64], weights: &[f64], x: f64, out: &mut [f64]) {
    for (j, &xj) in nodes.iter().enumerate() {
        if x == xj {
            out.iter_mut().for_each(|v| *v = 0.0);
            out[j] = 1.0;
            return;
        }
    }
    let mut total = 0.0;
    for ((o, &xj), &wj) in out.iter_mut().zip(nodes).zip(weights) {
        *o = wj / (x - xj);
        total += *o;
    }
    out.iter_mut().for_each(|v| *v /= total);
}

/// Evaluates the interpolant of `values` on `nodes` at `x`.
pub fn interpolate(nodes: &[f64], weights: &[f64], values: &[f64], x: f64) -> f64 {
    let mut row = alloc::vec![0.0; nodes.len()];
    lagrange_row(nodes, weights, x, &mut row);
    row.iter().zip(values).map(|(r, v)| r * v).sum()
}

/// Chebyshev coefficients `c_0..c_{n-1}` of the interpolant through samples
/// taken at [`nodes`] (increasing order), so that `f ≈ Σ c_k T_k(x)`.
pub fn coefficients(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    (0..n)
        .map(|k| {
            // Node j in increasing order is x = -cos(θ_j) = cos(π - θ_j), so
            // T_k(x_j) = (-1)^k cos(k θ_j).
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let s: f64 = values
                .iter()
                .enumerate()
                .map(|(j, v)| v * math::cos(PI * k as f64 * (j as f64 + 0.5) / n as f64))
                .sum();
            let scale = if k == 0 { 1.0 } else { 2.0 };
            sign * scale * s / n as f64
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolation_is_exact_for_polynomials() {
        let xs = nodes(6, 0.0, 2.0);
        let ws = barycentric_weights(6);
        let f = |x: f64| 1.0 - 2.0 * x + 0.5 * x * x * x;
        let vals: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
        for x in [0.0, 0.37, 1.2, 2.0] {
            assert!((interpolate(&xs, &ws, &vals, x) - f(x)).abs() < 1e-13);
        }
    }

    #[test]
    fn coefficients_recover_chebyshev_polynomials() {
        let xs = nodes(8, -1.0, 1.0);
        // T_3(x) = 4x³ - 3x
        let vals: Vec<f64> = xs.iter().map(|&x| 4.0 * x * x * x - 3.0 * x).collect();
        let c = coefficients(&vals);
        for (k, ck) in c.iter().enumerate() {
            let want = if k == 3 { 1.0 } else { 0.0 };
            assert!((ck - want).abs() < 1e-14, "c_{k} = {ck}");
        }
    }
}
