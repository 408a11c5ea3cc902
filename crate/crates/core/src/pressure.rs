//! Topological pressure `P(σ) = lim (1/n) ln ψ_n(σ)` and the Bowen equation
//! `P(σ) = 0`.
//!
//! Two independent routes are provided:
//!
//! * [`pressure_direct`] brackets `P` from partition sums. The upper bound is
//!   `min_n (1/n) ln ψ_n` (subadditivity); the lower bound is
//!   `max_n (1/n) ln ρ(V_n)`, where `V_n` collects infima of `|φ'_ω|^σ` between
//!   base sets, each infimum obtained from the sup norm and the distortion
//!   constant of the system.
//! * [`transfer_eigenvalue`] discretises `L_σ h = Σ |φ'_i|^σ h∘φ_i` by
//!   Chebyshev collocation on each base set and takes the log of its leading
//!   eigenvalue. Countable tails enter as rank-one terms built from the lower
//!   or the upper envelope, giving two operators whose eigenvalues bracket
//!   the pressure.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::chebyshev;
use crate::error::{Error, Result};
use crate::ifs::IfsSystem;
use crate::math;
use crate::tail::Bound;

pub use crate::dimension::DimensionResult;

const POWER_TOL: f64 = 1e-13;
const POWER_MAX_ITER: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PressureMethod {
    DirectSubadditive,
    TransferSpectral,
}

impl PressureMethod {
    pub fn name(self) -> &'static str {
        match self {
            PressureMethod::DirectSubadditive => "direct-subadditive",
            PressureMethod::TransferSpectral => "transfer-spectral",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PressureEstimate {
    pub sigma: f64,
    /// `+∞` when the partition sums diverge.
    pub value: f64,
    pub method: PressureMethod,
    /// Word length `n_max` or collocation size.
    pub size: usize,
    pub bracket: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regularity {
    Regular,
    Irregular,
    FiniteAlphabet,
}

fn tail_weights(sys: &IfsSystem, sigma: f64, bound: Bound) -> Result<Vec<f64>> {
    let w: Vec<f64> = sys.tails().iter().map(|t| t.law.sum(sigma, bound)).collect();
    if w.iter().any(|x| !x.is_finite()) {
        return Err(Error::TailDiverges { sigma, theta: sys.theta_number().value });
    }
    Ok(w)
}

/// Subadditive bracket of `P(σ)` from words of length `1..=n_max`.
pub fn pressure_direct(sys: &IfsSystem, sigma: f64, n_max: usize) -> Result<PressureEstimate> {
    if n_max < 2 {
        return Err(Error::InvalidArgument("n_max must be at least 2".into()));
    }
    let upper_w = tail_weights(sys, sigma, Bound::Upper)?;
    let lower_w = tail_weights(sys, sigma, Bound::Lower)?;
    let log_k = sys.log_distortion()?;
    let k_sigma = math::exp(-sigma * log_k);
    let nsets = sys.base_sets().len();
    let mut psi = vec![0.0; n_max + 1];
    let mut vertex = vec![vec![0.0; nsets * nsets]; n_max + 1];
    let nl = sys.letters().len();
    sys.walk_words(n_max, &mut |node| {
        psi[node.len] += sys.node_upper(node, sigma, &upper_w);
        let target = sys.symbol_target(node.first);
        let mut base = math::powf(node.closed, sigma) * math::powi(k_sigma, node.closed_segments);
        for (c, w) in node.tail_counts.iter().zip(&lower_w) {
            base *= math::powi(*w, *c);
        }
        let v = &mut vertex[node.len];
        match &node.open {
            Some(open) => {
                for &j in &sys.letters()[node.last].sources {
                    let sup = sys.derivative_range(open, &sys.base_sets()[j]).map_or(0.0, |r| r.1);
                    v[j * nsets + target] += base * math::powf(sup, sigma) * k_sigma;
                }
            }
            None => {
                for &j in &sys.tails()[node.last - nl].sources {
                    v[j * nsets + target] += base;
                }
            }
        }
        Ok(())
    })?;
    let mut upper = f64::INFINITY;
    let mut lower = f64::NEG_INFINITY;
    for n in 1..=n_max {
        upper = upper.min(math::ln(psi[n]) / n as f64);
        lower = lower.max(math::ln(spectral_radius(&vertex[n], nsets)) / n as f64);
    }
    // Both bounds are exact up to rounding; equal-ratio systems can cross by an ulp.
    debug_assert!(lower <= upper + 1e-9 * (1.0 + upper.abs()), "lower {lower} > upper {upper}");
    let lower = lower.min(upper);
    let value = math::ln(psi[n_max] / psi[n_max - 1]).clamp(lower, upper);
    Ok(PressureEstimate {
        sigma,
        value,
        method: PressureMethod::DirectSubadditive,
        size: n_max,
        bracket: (lower, upper),
    })
}

/// Perron root of a nonnegative `n × n` matrix by shifted power iteration.
fn spectral_radius(m: &[f64], n: usize) -> f64 {
    let scale = m.iter().fold(0.0f64, |a, &b| a.max(b));
    if !(scale > 0.0) {
        return 0.0;
    }
    // ρ(A + I) = ρ(A) + 1 for A ≥ 0; the shift removes periodicity.
    let a: Vec<f64> = m.iter().map(|x| x / scale).collect();
    let mut v = vec![1.0; n];
    let mut lambda = 0.0;
    for _ in 0..POWER_MAX_ITER {
        let mut w = v.clone();
        for i in 0..n {
            for j in 0..n {
                w[i] += a[i * n + j] * v[j];
            }
        }
        let l = w.iter().fold(0.0f64, |x, &y| x.max(y));
        w.iter_mut().for_each(|x| *x /= l);
        v = w;
        if (l - lambda).abs() <= 1e-15 * l {
            lambda = l;
            break;
        }
        lambda = l;
    }
    (lambda - 1.0).max(0.0) * scale
}

/// Transfer operator collocated at `size` Chebyshev points per base set.
#[derive(Debug, Clone)]
pub struct TransferOperator<'a> {
    sys: &'a IfsSystem,
    size: usize,
    /// `(row, target set, ln |φ'_i(x_row)|, offset into basis)`.
    entries: Vec<(usize, usize, f64, usize)>,
    basis: Vec<f64>,
    /// Lagrange rows at each tail's accumulation point.
    tail_basis: Vec<Vec<f64>>,
}

impl<'a> TransferOperator<'a> {
    pub fn new(sys: &'a IfsSystem, size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidArgument("collocation size must be positive".into()));
        }
        let sets = sys.base_sets();
        let nodes: Vec<Vec<f64>> = sets.iter().map(|b| chebyshev::nodes(size, b.lo, b.hi)).collect();
        let weights = chebyshev::barycentric_weights(size);
        let mut entries = Vec::new();
        let mut basis = Vec::new();
        let mut row = vec![0.0; size];
        for (i, letter) in sys.letters().iter().enumerate() {
            for &j in &letter.sources {
                for (m, &x) in nodes[j].iter().enumerate() {
                    let z = sys.chart().to_plane(x);
                    let d = letter.map.derivative_modulus(z)?;
                    let y = sys.apply_letter(i, x)?;
                    chebyshev::lagrange_row(&nodes[letter.target], &weights, y, &mut row);
                    entries.push((j * size + m, letter.target, math::ln(d), basis.len()));
                    basis.extend_from_slice(&row);
                }
            }
        }
        let tail_basis = sys
            .tails()
            .iter()
            .map(|t| {
                let mut r = vec![0.0; size];
                chebyshev::lagrange_row(&nodes[t.target], &weights, t.accumulation, &mut r);
                r
            })
            .collect();
        Ok(TransferOperator { sys, size, entries, basis, tail_basis })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    fn matrix(&self, sigma: f64, bound: Bound) -> Result<Vec<f64>> {
        let n = self.sys.base_sets().len() * self.size;
        let mut mat = vec![0.0; n * n];
        for &(r, t, logd, off) in &self.entries {
            let w = math::exp(sigma * logd);
            let dst = &mut mat[r * n + t * self.size..r * n + (t + 1) * self.size];
            for (d, b) in dst.iter_mut().zip(&self.basis[off..off + self.size]) {
                *d += w * b;
            }
        }
        let weights = tail_weights(self.sys, sigma, bound)?;
        for ((tail, w), row) in self.sys.tails().iter().zip(weights).zip(&self.tail_basis) {
            for &j in &tail.sources {
                for m in 0..self.size {
                    let r = j * self.size + m;
                    let dst = &mut mat[r * n + tail.target * self.size..r * n + (tail.target + 1) * self.size];
                    for (d, b) in dst.iter_mut().zip(row) {
                        *d += w * b;
                    }
                }
            }
        }
        Ok(mat)
    }

    /// `ln` of the leading eigenvalue, by power iteration from the constant
    /// function 1.
    pub fn pressure(&self, sigma: f64, bound: Bound) -> Result<f64> {
        let mat = self.matrix(sigma, bound)?;
        let n = self.sys.base_sets().len() * self.size;
        let mut v = vec![1.0; n];
        let mut w = vec![0.0; n];
        let mut prev = f64::NAN;
        for _ in 0..POWER_MAX_ITER {
            for (i, wi) in w.iter_mut().enumerate() {
                *wi = mat[i * n..(i + 1) * n].iter().zip(&v).map(|(a, b)| a * b).sum();
            }
            let l = w.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
            if !(l > 0.0) || !l.is_finite() {
                return Err(Error::NoConvergence { iterations: 0 });
            }
            for (vi, wi) in v.iter_mut().zip(&w) {
                *vi = wi / l;
            }
            if (l - prev).abs() <= POWER_TOL * l {
                return Ok(math::ln(l));
            }
            prev = l;
        }
        Err(Error::NoConvergence { iterations: POWER_MAX_ITER })
    }
}

/// Spectral estimate of `P(σ)`; for countable systems the bracket comes from
/// the lower- and upper-envelope operators.
pub fn transfer_eigenvalue(sys: &IfsSystem, sigma: f64, size: usize) -> Result<PressureEstimate> {
    let op = TransferOperator::new(sys, size)?;
    let hi = op.pressure(sigma, Bound::Upper)?;
    let lo = if sys.is_finite() { hi } else { op.pressure(sigma, Bound::Lower)? };
    Ok(PressureEstimate {
        sigma,
        value: 0.5 * (lo + hi),
        method: PressureMethod::TransferSpectral,
        size,
        bracket: (lo, hi),
    })
}

pub fn regularity_check(sys: &IfsSystem) -> Regularity {
    if sys.is_finite() {
        Regularity::FiniteAlphabet
    } else if sys.theta_number().regular {
        Regularity::Regular
    } else {
        Regularity::Irregular
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BowenOptions {
    /// Collocation points per base set.
    pub size: usize,
    /// Final bisection width.
    pub tolerance: f64,
}

impl Default for BowenOptions {
    fn default() -> Self {
        BowenOptions { size: 24, tolerance: 1e-10 }
    }
}

pub fn bowen_dimension(sys: &IfsSystem) -> Result<DimensionResult> {
    bowen_dimension_with(sys, &BowenOptions::default())
}

/// Root of `σ ↦ P(σ)` by bisection on the spectral pressure.
pub fn bowen_dimension_with(sys: &IfsSystem, opts: &BowenOptions) -> Result<DimensionResult> {
    if !(opts.tolerance > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    if regularity_check(sys) == Regularity::Irregular {
        return Err(Error::NotRegular);
    }
    sys.contraction()?;
    let op = TransferOperator::new(sys, opts.size)?;
    let theta = sys.theta_number().value;
    let method = format!("transfer-spectral bisection (size {})", opts.size);
    if sys.is_finite() {
        let (lo, hi) = solve(|s| op.pressure(s, Bound::Upper), None, opts.tolerance)?;
        return Ok(DimensionResult::from_bracket(lo, hi, method));
    }
    let (lo, _) = solve(|s| op.pressure(s, Bound::Lower), Some(theta), opts.tolerance)?;
    let (_, hi) = solve(|s| op.pressure(s, Bound::Upper), Some(theta), opts.tolerance)?;
    Ok(DimensionResult::from_bracket(lo, hi, method))
}

/// Brackets and bisects the zero of a decreasing function. `theta` is the
/// divergence threshold of a countable system (`None` for finite ones).
fn solve(p: impl Fn(f64) -> Result<f64>, theta: Option<f64>, tol: f64) -> Result<(f64, f64)> {
    const SIGMA_MAX: f64 = 2.0;
    let start = theta.map_or(0.01, |t| t.max(0.0) + 0.01);
    let (mut lo, mut hi);
    if p(start)? <= 0.0 {
        if theta.is_some() {
            return Err(Error::BracketFailure { lo: theta.unwrap_or(0.0), hi: start });
        }
        if p(0.0)? <= 0.0 {
            return Ok((0.0, 0.0));
        }
        lo = 0.0;
        hi = start;
    } else {
        lo = start;
        let mut step = 0.01;
        loop {
            hi = (lo + step).min(SIGMA_MAX);
            if p(hi)? <= 0.0 {
                break;
            }
            if hi >= SIGMA_MAX {
                return Err(Error::BracketFailure { lo: theta.unwrap_or(0.0), hi: SIGMA_MAX });
            }
            lo = hi;
            step *= 2.0;
        }
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if p(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cantor() -> IfsSystem {
        IfsSystem::similarity(&[(1.0 / 3.0, 0.0), (1.0 / 3.0, 2.0 / 3.0)]).unwrap()
    }

    #[test]
    fn cantor_pressure_is_exact() {
        let s = cantor();
        for sigma in [0.2, 0.5, 0.9] {
            let exact = 2f64.ln() - sigma * 3f64.ln();
            let d = pressure_direct(&s, sigma, 6).unwrap();
            assert!((d.value - exact).abs() < 1e-12);
            assert!((d.bracket.0 - exact).abs() < 1e-12 && (d.bracket.1 - exact).abs() < 1e-12);
            for size in [1, 4, 16] {
                let t = transfer_eigenvalue(&s, sigma, size).unwrap();
                assert!((t.value - exact).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn cantor_dimension() {
        let d = bowen_dimension(&cantor()).unwrap();
        assert!((d.value - 2f64.ln() / 3f64.ln()).abs() < 1e-10);
        assert!(d.error >= 0.5 * (d.bracket.1 - d.bracket.0));
    }

    #[test]
    fn spectral_radius_of_periodic_matrix() {
        // [[0, 2], [8, 0]] has eigenvalues ±4.
        assert!((spectral_radius(&[0.0, 2.0, 8.0, 0.0], 2) - 4.0).abs() < 1e-12);
        assert_eq!(spectral_radius(&[0.0; 4], 2), 0.0);
    }

    #[test]
    fn regularity_classes() {
        assert_eq!(regularity_check(&cantor()), Regularity::FiniteAlphabet);
        let g = IfsSystem::gauss_parabolic(20).unwrap();
        assert_eq!(regularity_check(&g), Regularity::Regular);
        assert!(matches!(pressure_direct(&g, 0.5, 2), Err(Error::TailDiverges { .. })));
    }

    #[test]
    fn jenkinson_pollicott_value() {
        // dim E_2 = 0.531280506277205141624468647368471785493059109018398779...
        let s = IfsSystem::continued_fraction(&[1, 2]).unwrap();
        let d = bowen_dimension_with(&s, &BowenOptions { size: 32, tolerance: 1e-12 }).unwrap();
        assert!((d.value - 0.531_280_506_277_205_1).abs() < 1e-9, "{}", d.value);
    }
}
