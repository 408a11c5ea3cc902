//! Analytic one-parameter families of systems and the analyticity test for
//! their dimension curves.
//!
//! Generators move by polynomials in `t` (degree ≤ 8); the dimension is
//! sampled at Chebyshev points and the decay of the Chebyshev coefficients of
//! the samples is the numerical stand-in for real-analyticity.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use crate::chebyshev;
use crate::error::{Error, Result};
use crate::fit::line_fit;
use crate::group::GroupPresentation;
use crate::ifs::{Branch, IfsSystem};
use crate::math;
use crate::moebius::{Complex, MoebiusMap};
use crate::pressure::{bowen_dimension_with, BowenOptions};
use crate::tail::TailBranch;

pub const MAX_DEGREE: usize = 8;
/// Number of uniformly spaced parameters at which validity is checked.
pub const VALIDITY_GRID: usize = 65;

/// Real polynomial `Σ c_k t^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() > MAX_DEGREE + 1 {
            return Err(Error::InvalidArgument(format!("polynomial degree exceeds {MAX_DEGREE}")));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("polynomial coefficients must be finite".into()));
        }
        Ok(Polynomial { coeffs })
    }

    pub fn constant(c: f64) -> Self {
        Polynomial { coeffs: alloc::vec![c] }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPolynomial {
    pub re: Polynomial,
    pub im: Polynomial,
}

impl ComplexPolynomial {
    pub fn real(p: Polynomial) -> Self {
        ComplexPolynomial { re: p, im: Polynomial::constant(0.0) }
    }

    pub fn constant(z: Complex) -> Self {
        ComplexPolynomial { re: Polynomial::constant(z.re), im: Polynomial::constant(z.im) }
    }

    pub fn eval(&self, t: f64) -> Complex {
        Complex::new(self.re.eval(t), self.im.eval(t))
    }
}

/// Coefficients `a, b, c, d` of a moving Möbius map.
pub type MapPolynomials = [ComplexPolynomial; 4];

fn eval_map(p: &MapPolynomials, t: f64, orientation: crate::moebius::Orientation) -> Result<MoebiusMap> {
    MoebiusMap::new(p[0].eval(t), p[1].eval(t), p[2].eval(t), p[3].eval(t), orientation)
}

#[derive(Debug, Clone, PartialEq)]
pub enum FamilyKind {
    /// The head letters of `template` move by `coefficients` (one entry per
    /// letter, same orientation, targets and sources); tail laws take their
    /// upper and lower exponents from `tail_exponents` when given.
    Letters {
        template: Box<IfsSystem>,
        coefficients: Vec<MapPolynomials>,
        tail_exponents: Option<(Polynomial, Polynomial)>,
    },
    /// Symmetric two-generator Schottky group with circle radius `r(t)`.
    SymmetricSchottky { radius: Polynomial },
    /// Schottky group on moving disk automorphisms.
    Schottky { generators: Vec<MapPolynomials> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeformationFamily {
    interval: (f64, f64),
    kind: FamilyKind,
}

impl DeformationFamily {
    /// Validates the family on a uniform grid of [`VALIDITY_GRID`] parameters.
    pub fn new(interval: (f64, f64), kind: FamilyKind) -> Result<Self> {
        if !(interval.0 < interval.1) || !interval.0.is_finite() || !interval.1.is_finite() {
            return Err(Error::InvalidArgument("parameter interval must satisfy t_lo < t_hi".into()));
        }
        if let FamilyKind::Letters { template, coefficients, .. } = &kind {
            if coefficients.len() != template.letters().len() {
                return Err(Error::InvalidArgument(format!(
                    "{} coefficient maps for {} letters",
                    coefficients.len(),
                    template.letters().len()
                )));
            }
        }
        let family = DeformationFamily { interval, kind };
        for k in 0..VALIDITY_GRID {
            let t = interval.0 + (interval.1 - interval.0) * k as f64 / (VALIDITY_GRID - 1) as f64;
            family.eval(t)?;
        }
        Ok(family)
    }

    /// `{x·r(t), x·r(t) + 1 - r(t)}` on `[0, 1]`.
    pub fn similarity(ratio: Polynomial, interval: (f64, f64)) -> Result<Self> {
        let r0 = ratio.eval(0.0).clamp(0.01, 0.49);
        let template = IfsSystem::similarity(&[(r0, 0.0), (r0, 1.0 - r0)])?;
        let one = ComplexPolynomial::constant(Complex::new(1.0, 0.0));
        let zero = ComplexPolynomial::constant(Complex::new(0.0, 0.0));
        let mut shift = ratio.coefficients().iter().map(|c| -c).collect::<Vec<_>>();
        shift[0] += 1.0;
        let r = ComplexPolynomial::real(ratio.clone());
        let coefficients = alloc::vec![
            [r.clone(), zero.clone(), zero.clone(), one.clone()],
            [r, ComplexPolynomial::real(Polynomial::new(shift)?), zero, one],
        ];
        Self::new(interval, FamilyKind::Letters { template: Box::new(template), coefficients, tail_exponents: None })
    }

    /// The family that stays at `sys` for every `t`.
    pub fn constant(sys: IfsSystem, interval: (f64, f64)) -> Result<Self> {
        let coefficients =
            sys.letters().iter().map(|l| l.map.coefficients().map(ComplexPolynomial::constant)).collect();
        Self::new(interval, FamilyKind::Letters { template: Box::new(sys), coefficients, tail_exponents: None })
    }

    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    pub fn kind(&self) -> &FamilyKind {
        &self.kind
    }

    /// The system at parameter `t`.
    pub fn eval(&self, t: f64) -> Result<IfsSystem> {
        let (lo, hi) = self.interval;
        if !(lo <= t && t <= hi) {
            return Err(Error::ParameterOutOfRange { t, lo, hi });
        }
        let violated = |e: Error| Error::ValidityViolated { t, reason: e.to_string() };
        let sys = self.build(t).map_err(violated)?;
        sys.contraction().map_err(violated)?;
        Ok(sys)
    }

    fn build(&self, t: f64) -> Result<IfsSystem> {
        match &self.kind {
            FamilyKind::Letters { template, coefficients, tail_exponents } => {
                let letters = template
                    .letters()
                    .iter()
                    .zip(coefficients)
                    .map(|(l, p)| {
                        Ok(Branch {
                            map: eval_map(p, t, l.map.orientation())?,
                            target: l.target,
                            sources: l.sources.clone(),
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                let tails = template
                    .tails()
                    .iter()
                    .map(|tail| {
                        let mut law = tail.law;
                        if let Some((alpha, beta)) = tail_exponents {
                            law.upper.exponent = alpha.eval(t);
                            law.lower.exponent = beta.eval(t);
                        }
                        TailBranch { law, ..tail.clone() }
                    })
                    .collect();
                IfsSystem::new(template.chart(), template.base_sets().to_vec(), letters, tails)
            }
            FamilyKind::SymmetricSchottky { radius } => {
                IfsSystem::from_schottky(&GroupPresentation::symmetric_schottky(radius.eval(t))?)
            }
            FamilyKind::Schottky { generators } => {
                let maps = generators
                    .iter()
                    .map(|p| eval_map(p, t, crate::moebius::Orientation::Conformal))
                    .collect::<Result<Vec<_>>>()?;
                IfsSystem::from_schottky(&GroupPresentation::schottky(&maps)?)
            }
        }
    }

    /// Bowen dimension at `t`; errors carry the offending parameter.
    pub fn dimension_at(&self, t: f64, opts: &BowenOptions) -> Result<(f64, f64)> {
        let at = |e: Error| match e {
            e @ Error::ValidityViolated { .. } | e @ Error::ParameterOutOfRange { .. } => e,
            e => Error::AtParameter { t, source: Box::new(e) },
        };
        let sys = self.eval(t).map_err(at)?;
        let d = bowen_dimension_with(&sys, opts).map_err(at)?;
        Ok((d.value, d.error))
    }
}

/// Dimension samples at Chebyshev points of the family's interval.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionCurve {
    pub interval: (f64, f64),
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
}

/// The `m` Chebyshev points at which [`dimension_curve`] samples a family.
pub fn curve_nodes(family: &DeformationFamily, m: usize) -> Result<Vec<f64>> {
    if m < 8 {
        return Err(Error::InvalidArgument("a dimension curve needs m ≥ 8 nodes".into()));
    }
    Ok(chebyshev::nodes(m, family.interval.0, family.interval.1))
}

pub fn dimension_curve(family: &DeformationFamily, m: usize, opts: &BowenOptions) -> Result<DimensionCurve> {
    let nodes = curve_nodes(family, m)?;
    let samples = nodes.iter().map(|&t| family.dimension_at(t, opts)).collect::<Result<Vec<_>>>()?;
    Ok(DimensionCurve::from_samples(family.interval, nodes, samples))
}

impl DimensionCurve {
    pub fn from_samples(interval: (f64, f64), nodes: Vec<f64>, samples: Vec<(f64, f64)>) -> Self {
        let (values, errors) = samples.into_iter().unzip();
        DimensionCurve { interval, nodes, values, errors }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnalyticityVerdict {
    ConsistentWithAnalytic,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticityReport {
    pub coefficients: Vec<f64>,
    /// Coefficients at or below this level are indistinguishable from noise.
    pub floor: f64,
    /// Fitted geometric decay rate of `|c_k|` above the floor.
    pub rho_fit: f64,
    /// Number of coefficients used in the fit.
    pub fitted: usize,
    pub verdict: AnalyticityVerdict,
}

/// Fits `|c_k| ≈ C ρ^k` over the coefficients above the noise floor; the
/// curve is consistent with analyticity when `ρ < 0.95` and the last quarter
/// of the coefficients is below the floor. Never claims non-analyticity.
pub fn analyticity_diagnostic(curve: &DimensionCurve) -> Result<AnalyticityReport> {
    let m = curve.values.len();
    if m < 16 {
        return Err(Error::InsufficientData(format!("{m} nodes, need at least 16")));
    }
    let max_err = curve.errors.iter().fold(0.0f64, |a, &b| a.max(b));
    if max_err > 1e-8 {
        return Err(Error::ErrorFloorTooHigh(max_err));
    }
    let coefficients = chebyshev::coefficients(&curve.values);
    let scale = coefficients.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let floor = 2.0 * max_err + 64.0 * f64::EPSILON * scale.max(f64::MIN_POSITIVE);
    let significant: Vec<usize> = (1..m).filter(|&k| coefficients[k].abs() > floor).collect();
    let rho_fit = if significant.len() < 2 {
        0.0
    } else {
        let xs: Vec<f64> = significant.iter().map(|&k| k as f64).collect();
        let ys: Vec<f64> = significant.iter().map(|&k| math::ln(coefficients[k].abs())).collect();
        line_fit(&xs, &ys).map_or(0.0, |f| math::exp(f.slope))
    };
    let tail_len = m.div_ceil(4);
    let tail_below = coefficients[m - tail_len..].iter().all(|c| c.abs() <= floor);
    let verdict = if rho_fit < 0.95 && tail_below {
        AnalyticityVerdict::ConsistentWithAnalytic
    } else {
        AnalyticityVerdict::Inconclusive
    };
    Ok(AnalyticityReport { coefficients, floor, rho_fit, fitted: significant.len(), verdict })
}
