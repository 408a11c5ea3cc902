//! Analytic tail laws for countable alphabets.
//!
//! Tail letters are indexed by a level `n` and a depth `k`. Their derivative
//! norms are only known through envelopes
//!
//! ```text
//! lower.constant · 2^{-n·lower.exponent} · w(k)  ≤  ‖φ'_{n,k}‖  ≤  upper.constant · 2^{-n·upper.exponent} · w(k)
//! w(k) = k^{-k_power} · (ln k)^{-log_power}
//! ```
//!
//! and every quantity the rest of the crate needs from the tail (partition
//! sums, the θ number, regularity) is evaluated in closed form from them.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::zeta;

/// `constant · 2^{-n·exponent}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelope {
    pub constant: f64,
    pub exponent: f64,
}

/// Which levels `n` a tail law sums over.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Levels {
    /// A single cusp: the level factor is 1.
    Single,
    /// `n = from..=to` (`to = None` for all `n ≥ from`), each weighted by `2^{-n·exponent}`.
    Dyadic { from: u32, to: Option<u32> },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailLaw {
    pub lower: Envelope,
    pub upper: Envelope,
    pub k_power: f64,
    pub log_power: f64,
    /// First tail index in `k`.
    pub k_from: u64,
    pub levels: Levels,
    /// Number of symmetric copies (e.g. 2 for `±k`).
    pub multiplicity: u32,
}

/// Which envelope to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    Lower,
    Upper,
}

impl TailLaw {
    /// The `k^{-2}` law of a single parabolic cusp with constants `A = lower`,
    /// `B = upper` starting at `k_from`.
    pub fn parabolic(lower: f64, upper: f64, k_from: u64) -> Result<Self> {
        TailLaw {
            lower: Envelope { constant: lower, exponent: 1.0 },
            upper: Envelope { constant: upper, exponent: 1.0 },
            k_power: 2.0,
            log_power: 0.0,
            k_from,
            levels: Levels::Single,
            multiplicity: 1,
        }
        .validated()
    }

    pub fn validated(self) -> Result<Self> {
        let bad = |msg: &str| Err(Error::InvalidSystem(format!("tail law: {msg}")));
        for env in [self.lower, self.upper] {
            if !(env.constant > 0.0) || !env.constant.is_finite() {
                return bad("envelope constants must be positive");
            }
            if !(env.exponent > 0.0 && env.exponent <= 1.0) {
                return bad("envelope exponents must lie in (0, 1]");
            }
        }
        if !(self.k_power > 0.0) || !(self.log_power >= 0.0) {
            return bad("k_power must be positive and log_power nonnegative");
        }
        if self.k_from < 1 || (self.log_power > 0.0 && self.k_from < 2) {
            return bad("k_from must be ≥ 1 (≥ 2 with a log factor)");
        }
        if self.multiplicity == 0 {
            return bad("multiplicity must be positive");
        }
        // lower ≤ upper at every index: with levels unbounded this forces the
        // lower exponent to be at least the upper one.
        let ratio_at = |n: f64| {
            self.lower.constant / self.upper.constant
                * math::powf(2.0, -n * (self.lower.exponent - self.upper.exponent))
        };
        match self.levels {
            Levels::Single => {
                if self.lower.constant > self.upper.constant {
                    return bad("lower envelope exceeds upper envelope");
                }
            }
            Levels::Dyadic { from, to } => {
                if let Some(to) = to {
                    if to < from {
                        return bad("empty level range");
                    }
                }
                let unbounded_growth = self.lower.exponent < self.upper.exponent && to.is_none();
                let worst = if self.lower.exponent >= self.upper.exponent {
                    ratio_at(from as f64)
                } else {
                    ratio_at(to.unwrap_or(u32::MAX) as f64)
                };
                if unbounded_growth || worst > 1.0 + 1e-15 {
                    return bad("lower envelope exceeds upper envelope at some index");
                }
            }
        }
        Ok(self)
    }

    /// `inf { σ : Σ ‖φ'‖^σ < ∞ }` for this law.
    pub fn theta(&self) -> f64 {
        let k_theta = 1.0 / self.k_power;
        match self.levels {
            Levels::Dyadic { to: None, .. } => k_theta.max(0.0),
            _ => k_theta,
        }
    }

    /// Whether the series diverges at its own θ.
    pub fn diverges_at_theta(&self) -> bool {
        // Σ k^{-1} (ln k)^{-qθ} diverges iff qθ ≤ 1.
        self.log_power * self.theta() <= 1.0 + 1e-12
    }

    /// `Σ_{tail} envelope^σ`, `+∞` when divergent.
    pub fn sum(&self, sigma: f64, bound: Bound) -> f64 {
        let env = match bound {
            Bound::Lower => self.lower,
            Bound::Upper => self.upper,
        };
        let level = self.level_factor(sigma * env.exponent);
        let k = zeta::log_weighted(self.k_power * sigma, self.log_power * sigma, self.k_from);
        if !level.is_finite() || !k.is_finite() {
            return f64::INFINITY;
        }
        self.multiplicity as f64 * math::powf(env.constant, sigma) * level * k
    }

    /// Largest single envelope value (upper bound on any tail letter's norm).
    pub fn max_norm(&self) -> f64 {
        let level = match self.levels {
            Levels::Single => 1.0,
            Levels::Dyadic { from, .. } => math::powf(2.0, -(from as f64) * self.upper.exponent),
        };
        let k = self.k_from as f64;
        let log = if self.log_power > 0.0 { math::powf(math::ln(k), -self.log_power) } else { 1.0 };
        self.upper.constant * level * math::powf(k, -self.k_power) * log
    }

    /// `Σ_{n} 2^{-n s}` over the level set.
    fn level_factor(&self, s: f64) -> f64 {
        match self.levels {
            Levels::Single => 1.0,
            Levels::Dyadic { from, to } => {
                let q = math::powf(2.0, -s);
                let first = math::powf(q, from as f64);
                match to {
                    Some(to) => {
                        let count = (to - from + 1) as f64;
                        if (1.0 - q).abs() < 1e-15 {
                            count
                        } else {
                            first * (1.0 - math::powf(q, count)) / (1.0 - q)
                        }
                    }
                    None if s > 0.0 => first / (1.0 - q),
                    None => f64::INFINITY,
                }
            }
        }
    }

    /// Envelope value of a single index, for brute-force checks.
    pub fn term(&self, n: u32, k: u64, bound: Bound) -> f64 {
        let env = match bound {
            Bound::Lower => self.lower,
            Bound::Upper => self.upper,
        };
        let level = match self.levels {
            Levels::Single => 1.0,
            Levels::Dyadic { .. } => math::powf(2.0, -(n as f64) * env.exponent),
        };
        let kf = k as f64;
        let log = if self.log_power > 0.0 { math::powf(math::ln(kf), -self.log_power) } else { 1.0 };
        env.constant * level * math::powf(kf, -self.k_power) * log
    }
}

/// A countable family of branches described only by its [`TailLaw`]: all of
/// them act on `sources` and land in base set `target`, accumulating at
/// `accumulation` (a parameter value inside the target set).
#[derive(Debug, Clone, PartialEq)]
pub struct TailBranch {
    pub law: TailLaw,
    pub target: usize,
    pub sources: Vec<usize>,
    pub accumulation: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parabolic_law_threshold() {
        let law = TailLaw::parabolic(1.0, 1.0, 1).unwrap();
        assert_eq!(law.theta(), 0.5);
        assert!(law.diverges_at_theta());
        assert!(law.sum(0.5, Bound::Upper).is_infinite());
        let pi2 = core::f64::consts::PI * core::f64::consts::PI;
        assert!((law.sum(1.0, Bound::Upper) - pi2 / 6.0).abs() < 1e-14);
    }

    #[test]
    fn dyadic_levels_sum_geometrically() {
        let law = TailLaw {
            levels: Levels::Dyadic { from: 1, to: None },
            multiplicity: 2,
            ..TailLaw::parabolic(0.5, 1.0, 1).unwrap()
        }
        .validated()
        .unwrap();
        // σ = 1: 2 · (Σ 2^{-n}) · ζ(2) = 2 · 1 · π²/6
        let pi2 = core::f64::consts::PI * core::f64::consts::PI;
        assert!((law.sum(1.0, Bound::Upper) - pi2 / 3.0).abs() < 1e-13);
        let mut brute = 0.0;
        for n in 1..60 {
            for k in 1..200_000u64 {
                brute += 2.0 * law.term(n, k, Bound::Upper).powf(1.0);
            }
        }
        assert!((law.sum(1.0, Bound::Upper) - brute).abs() < 1e-4);
    }

    #[test]
    fn envelope_ordering_is_enforced() {
        let crossing = TailLaw {
            lower: Envelope { constant: 1.0, exponent: 0.5 },
            upper: Envelope { constant: 1.0, exponent: 1.0 },
            levels: Levels::Dyadic { from: 1, to: None },
            ..TailLaw::parabolic(1.0, 1.0, 1).unwrap()
        };
        assert!(crossing.validated().is_err());
        assert!(TailLaw::parabolic(2.0, 1.0, 1).is_err());
    }
}
