//! Hurwitz zeta `ζ(s, a) = Σ_{k≥0} (k + a)^{-s}` and the log-weighted series
//! `Σ_{k≥a} k^{-s} (ln k)^{-r}` used for countable tails.

use crate::math;

/// `B_{2j}/(2j)!` for `j = 1..=8`.
const BERNOULLI_OVER_FACTORIAL: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
    -3617.0 / 10670622842880000.0,
];

/// Hurwitz zeta for `s > 1`, `a > 0`, by Euler–Maclaurin summation.
/// Returns `+∞` for `s ≤ 1`.
pub fn hurwitz(s: f64, a: f64) -> f64 {
    if !(s > 1.0) {
        return f64::INFINITY;
    }
    const N: usize = 12;
    let mut sum = 0.0;
    for k in 0..N {
        sum += math::powf(a + k as f64, -s);
    }
    let x = a + N as f64;
    sum += math::powf(x, 1.0 - s) / (s - 1.0);
    sum += 0.5 * math::powf(x, -s);
    // Σ B_{2j}/(2j)! · s(s+1)…(s+2j-2) · x^{-s-2j+1}
    let mut rising = s;
    let mut xpow = math::powf(x, -s - 1.0);
    let x2 = x * x;
    for (j, b) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        let term = b * rising * xpow;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
        let m = 2.0 * j as f64;
        rising *= (s + m + 1.0) * (s + m + 2.0);
        xpow /= x2;
    }
    sum
}

/// `Σ_{k ≥ first} k^{-s} (ln k)^{-r}` for `r ≥ 0`, `first ≥ 2` when `r > 0`.
/// Returns `+∞` when the series diverges.
pub fn log_weighted(s: f64, r: f64, first: u64) -> f64 {
    if r == 0.0 {
        return hurwitz(s, first as f64);
    }
    if s < 1.0 - 1e-12 || ((s - 1.0).abs() <= 1e-12 && r <= 1.0 + 1e-12) {
        return f64::INFINITY;
    }
    let term = |k: f64| math::powf(k, -s) * math::powf(math::ln(k), -r);
    const DIRECT: u64 = 4000;
    let mut sum = 0.0;
    for k in first..first + DIRECT {
        sum += term(k as f64);
    }
    let x = (first + DIRECT) as f64;
    let fx = term(x);
    let lx = math::ln(x);
    // Euler–Maclaurin: ∫_x^∞ f + f(x)/2 - f'(x)/12.
    let dfx = -fx * (s + r / lx) / x;
    sum + tail_integral(s, r, x) + 0.5 * fx - dfx / 12.0
}

/// `∫_x^∞ t^{-s} (ln t)^{-r} dt`.
fn tail_integral(s: f64, r: f64, x: f64) -> f64 {
    let lx = math::ln(x);
    if (s - 1.0).abs() <= 1e-12 {
        return math::powf(lx, 1.0 - r) / (r - 1.0);
    }
    // u = ln t, v = (s-1)(u - ln x): x^{1-s}/(s-1) ∫_0^∞ e^{-v} (ln x + v/(s-1))^{-r} dv
    let k = s - 1.0;
    let g = |v: f64| math::exp(-v) * math::powf(lx + v / k, -r);
    let (upper, n) = (60.0, 6000usize);
    let h = upper / n as f64;
    let mut acc = g(0.0) + g(upper);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * g(i as f64 * h);
    }
    math::powf(x, -k) / k * acc * h / 3.0
}
