//! Experiment configuration files (TOML, schema version 1).
//!
//! A config holds exactly one of `[system]`, `[family]` or `[group]`, selected
//! by its `kind` key, plus an optional `[params]` table of numeric settings.
//!
//! ```toml
//! schema_version = 1
//!
//! [system]
//! kind = "similarity"
//! maps = [[0.3333333333333333, 0.0], [0.3333333333333333, 0.6666666666666666]]
//!
//! [params]
//! tolerance = 1e-12
//! ```

use cifs_core::deform::{ComplexPolynomial, DeformationFamily, FamilyKind, MapPolynomials, Polynomial};
use cifs_core::group::{build_section5_group, GroupPresentation};
use cifs_core::ifs::{BaseSet, Branch, Chart, IfsSystem};
use cifs_core::tail::{Envelope, Levels, TailBranch, TailLaw};
use cifs_core::{Circle, Complex, MoebiusMap};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::Command;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    /// Subcommand the config is meant for; checked against the one invoked.
    #[serde(default)]
    pub experiment: Option<String>,
    #[serde(default)]
    pub name: Option<String>,
    pub system: Option<SystemSpec>,
    pub family: Option<FamilySpec>,
    pub group: Option<GroupSpec>,
    #[serde(default)]
    pub params: Params,
}

/// Real Möbius letters on one interval (`interval`) or one of the built-in
/// systems.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SystemSpec {
    /// `x ↦ r x + t` on `[0, 1]`, one `[r, t]` pair per letter.
    Similarity { maps: Vec<[f64; 2]> },
    /// `x ↦ 1/(k + x)` on `[0, 1]`.
    ContinuedFraction { digits: Vec<u64> },
    /// Gauss branches up to `head` plus the parabolic `k^{-2}` tail.
    GaussParabolic { head: u64 },
    /// Dyadic chain of parabolic blocks.
    DyadicParabolic { levels: u32, head: u64 },
    /// `x ↦ (a x + b)/(c x + d)` on `[lo, hi]`, with optional tails.
    Interval {
        lo: f64,
        hi: f64,
        #[serde(default)]
        maps: Vec<[f64; 4]>,
        #[serde(default)]
        tails: Vec<TailSpec>,
    },
}

/// Envelopes `lower · 2^{-n·lower_exponent} · w(k) ≤ ‖φ'‖ ≤ upper · 2^{-n·upper_exponent} · w(k)`
/// with `w(k) = k^{-k_power} (ln k)^{-log_power}`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailSpec {
    pub lower: f64,
    pub upper: f64,
    #[serde(default = "one")]
    pub lower_exponent: f64,
    #[serde(default = "one")]
    pub upper_exponent: f64,
    #[serde(default = "two")]
    pub k_power: f64,
    #[serde(default)]
    pub log_power: f64,
    pub k_from: u64,
    /// First dyadic level; omit for a single cusp.
    #[serde(default)]
    pub level_from: Option<u32>,
    #[serde(default)]
    pub level_to: Option<u32>,
    #[serde(default = "one_u32")]
    pub multiplicity: u32,
    pub accumulation: f64,
}

fn one() -> f64 {
    1.0
}

fn two() -> f64 {
    2.0
}

fn one_u32() -> u32 {
    1
}

/// Complex Möbius coefficients as `[re, im]` pairs.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub a: [f64; 2],
    pub b: [f64; 2],
    pub c: [f64; 2],
    pub d: [f64; 2],
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GroupSpec {
    /// Two generators pairing circles of radius `radius` orthogonal to the
    /// unit circle, centred on the axes.
    SymmetricSchottky {
        radius: f64,
    },
    Schottky {
        generators: Vec<MapSpec>,
    },
    /// Reflections in circles `[center_re, center_im, radius]`.
    Reflection {
        circles: Vec<[f64; 3]>,
    },
    Cyclic {
        generator: MapSpec,
    },
    /// The truncated parabolic-chain group of the given depth.
    Section5 {
        depth: usize,
    },
}

/// Polynomial coefficients (constant term first) of a complex coefficient.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapPolySpec {
    pub a: Vec<[f64; 2]>,
    pub b: Vec<[f64; 2]>,
    pub c: Vec<[f64; 2]>,
    pub d: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FamilySpec {
    /// `{x r(t), x r(t) + 1 - r(t)}` with `r` given by its coefficients.
    Similarity {
        ratio: Vec<f64>,
        interval: [f64; 2],
    },
    SymmetricSchottky {
        radius: Vec<f64>,
        interval: [f64; 2],
    },
    Schottky {
        generators: Vec<MapPolySpec>,
        interval: [f64; 2],
    },
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub n_max: Option<usize>,
    pub size: Option<usize>,
    pub sizes: Option<Vec<usize>>,
    pub tolerance: Option<f64>,
    pub m: Option<usize>,
    pub max_len: Option<usize>,
    pub sigma: Option<[f64; 2]>,
    pub sigma_steps: Option<usize>,
    pub depth: Option<usize>,
    pub sample_depth: Option<usize>,
    pub tail_cut: Option<usize>,
    pub box_exponents: Option<Vec<i32>>,
    pub max_rows: Option<usize>,
}

/// [`Params`] with defaults filled in and ranges checked.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Resolved {
    pub n_max: usize,
    pub size: usize,
    pub sizes: Vec<usize>,
    pub tolerance: f64,
    pub m: usize,
    pub max_len: usize,
    pub sigma: [f64; 2],
    pub sigma_steps: usize,
    pub depth: Option<usize>,
    pub sample_depth: Option<usize>,
    pub tail_cut: usize,
    pub box_exponents: Vec<i32>,
    pub max_rows: usize,
}

fn in_range<T: PartialOrd + std::fmt::Display + Copy>(name: &str, v: T, lo: T, hi: T) -> Result<T, CliError> {
    if v < lo || v > hi {
        return Err(CliError::Config(format!("params.{name} = {v} outside [{lo}, {hi}]")));
    }
    Ok(v)
}

impl Params {
    /// `tolerance` and `depth` from the command line take precedence.
    pub fn resolve(&self, tolerance: Option<f64>, depth: Option<usize>) -> Result<Resolved, CliError> {
        let size = in_range("size", self.size.unwrap_or(24), 1, 256)?;
        let sizes = match &self.sizes {
            Some(s) if s.is_empty() => return Err(CliError::Config("params.sizes is empty".into())),
            Some(s) => s.iter().map(|&v| in_range("sizes", v, 1, 256)).collect::<Result<_, _>>()?,
            None => vec![size],
        };
        let tolerance = tolerance.or(self.tolerance).unwrap_or(1e-10);
        if !(tolerance > 0.0 && tolerance <= 1e-2) {
            return Err(CliError::Config(format!("tolerance {tolerance} outside (0, 0.01]")));
        }
        let sigma = self.sigma.unwrap_or([0.0, 1.0]);
        if !(sigma[0].is_finite() && sigma[1].is_finite() && sigma[0] < sigma[1] && sigma[0] >= 0.0) {
            return Err(CliError::Config(format!("params.sigma = {sigma:?} must be 0 ≤ from < to")));
        }
        let box_exponents = self.box_exponents.clone().unwrap_or_else(|| (2..=12).collect());
        if box_exponents.len() < 4 || box_exponents.iter().any(|&k| !(0..=60).contains(&k)) {
            return Err(CliError::Config("params.box_exponents needs ≥ 4 entries in 0..=60".into()));
        }
        Ok(Resolved {
            n_max: in_range("n_max", self.n_max.unwrap_or(10), 2, 16)?,
            size,
            sizes,
            tolerance,
            m: in_range("m", self.m.unwrap_or(24), 8, 512)?,
            max_len: in_range("max_len", self.max_len.unwrap_or(10), 1, 20)?,
            sigma,
            sigma_steps: in_range("sigma_steps", self.sigma_steps.unwrap_or(11), 2, 10_001)?,
            depth: depth.or(self.depth).map(|d| in_range("depth", d, 1, 30)).transpose()?,
            sample_depth: self.sample_depth.map(|d| in_range("sample_depth", d, 1, 24)).transpose()?,
            tail_cut: in_range("tail_cut", self.tail_cut.unwrap_or(64), 1, 1 << 20)?,
            box_exponents,
            max_rows: in_range("max_rows", self.max_rows.unwrap_or(100_000), 0, 100_000_000)?,
        })
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                cfg.schema_version
            )));
        }
        let present: Vec<&str> = [
            cfg.system.as_ref().map(|_| "[system]"),
            cfg.family.as_ref().map(|_| "[family]"),
            cfg.group.as_ref().map(|_| "[group]"),
        ]
        .into_iter()
        .flatten()
        .collect();
        if let Some(e) = &cfg.experiment {
            if Command::from_name(e).is_none() {
                return Err(CliError::Config(format!("unknown experiment \"{e}\"")));
            }
        }
        if present.len() > 1 {
            return Err(CliError::Config(format!(
                "conflicting definitions: {} (exactly one system, family or group is allowed)",
                present.join(" and ")
            )));
        }
        Ok(cfg)
    }
}

fn complex(p: [f64; 2]) -> Complex {
    Complex::new(p[0], p[1])
}

impl MapSpec {
    pub fn build(&self) -> cifs_core::Result<MoebiusMap> {
        MoebiusMap::conformal(complex(self.a), complex(self.b), complex(self.c), complex(self.d))
    }
}

impl TailSpec {
    pub fn build(&self) -> cifs_core::Result<TailBranch> {
        let levels = match self.level_from {
            Some(from) => Levels::Dyadic { from, to: self.level_to },
            None => Levels::Single,
        };
        let law = TailLaw {
            lower: Envelope { constant: self.lower, exponent: self.lower_exponent },
            upper: Envelope { constant: self.upper, exponent: self.upper_exponent },
            k_power: self.k_power,
            log_power: self.log_power,
            k_from: self.k_from,
            levels,
            multiplicity: self.multiplicity,
        }
        .validated()?;
        Ok(TailBranch { law, target: 0, sources: vec![0], accumulation: self.accumulation })
    }
}

impl SystemSpec {
    pub fn build(&self) -> cifs_core::Result<IfsSystem> {
        match self {
            SystemSpec::Similarity { maps } => {
                IfsSystem::similarity(&maps.iter().map(|m| (m[0], m[1])).collect::<Vec<_>>())
            }
            SystemSpec::ContinuedFraction { digits } => IfsSystem::continued_fraction(digits),
            SystemSpec::GaussParabolic { head } => IfsSystem::gauss_parabolic(*head),
            SystemSpec::DyadicParabolic { levels, head } => IfsSystem::dyadic_parabolic(*levels, *head),
            SystemSpec::Interval { lo, hi, maps, tails } => {
                let letters = maps
                    .iter()
                    .map(|m| Ok(Branch { map: MoebiusMap::real(m[0], m[1], m[2], m[3])?, target: 0, sources: vec![0] }))
                    .collect::<cifs_core::Result<Vec<_>>>()?;
                let tails = tails.iter().map(TailSpec::build).collect::<cifs_core::Result<Vec<_>>>()?;
                IfsSystem::new(Chart::Line, vec![BaseSet::new(*lo, *hi)], letters, tails)
            }
        }
    }
}

impl GroupSpec {
    pub fn build(&self) -> cifs_core::Result<GroupPresentation> {
        match self {
            GroupSpec::SymmetricSchottky { radius } => GroupPresentation::symmetric_schottky(*radius),
            GroupSpec::Schottky { generators } => GroupPresentation::schottky(
                &generators.iter().map(MapSpec::build).collect::<cifs_core::Result<Vec<_>>>()?,
            ),
            GroupSpec::Reflection { circles } => GroupPresentation::reflection(
                &circles
                    .iter()
                    .map(|c| Circle::new(Complex::new(c[0], c[1]), c[2]))
                    .collect::<cifs_core::Result<Vec<_>>>()?,
            ),
            GroupSpec::Cyclic { generator } => GroupPresentation::cyclic(generator.build()?),
            GroupSpec::Section5 { depth } => Ok(build_section5_group(*depth)?.group),
        }
    }
}

fn poly(coeffs: &[f64]) -> cifs_core::Result<Polynomial> {
    Polynomial::new(coeffs.to_vec())
}

fn complex_poly(coeffs: &[[f64; 2]]) -> cifs_core::Result<ComplexPolynomial> {
    let re: Vec<f64> = coeffs.iter().map(|c| c[0]).collect();
    let im: Vec<f64> = coeffs.iter().map(|c| c[1]).collect();
    Ok(ComplexPolynomial { re: poly(&re)?, im: poly(&im)? })
}

impl FamilySpec {
    pub fn build(&self) -> cifs_core::Result<DeformationFamily> {
        match self {
            FamilySpec::Similarity { ratio, interval } => {
                DeformationFamily::similarity(poly(ratio)?, (interval[0], interval[1]))
            }
            FamilySpec::SymmetricSchottky { radius, interval } => DeformationFamily::new(
                (interval[0], interval[1]),
                FamilyKind::SymmetricSchottky { radius: poly(radius)? },
            ),
            FamilySpec::Schottky { generators, interval } => {
                let generators = generators
                    .iter()
                    .map(|g| -> cifs_core::Result<MapPolynomials> {
                        Ok([complex_poly(&g.a)?, complex_poly(&g.b)?, complex_poly(&g.c)?, complex_poly(&g.d)?])
                    })
                    .collect::<cifs_core::Result<Vec<_>>>()?;
                DeformationFamily::new((interval[0], interval[1]), FamilyKind::Schottky { generators })
            }
        }
    }
}
