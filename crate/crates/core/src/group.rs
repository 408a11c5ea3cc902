//! Schottky and reflection groups acting on the unit disk.
//!
//! Every presentation here is free (Schottky) or a free product of order-two
//! reflections, so reduced words are canonical: a word never contains a letter
//! followed by its inverse, and distinct reduced words are distinct elements.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use crate::dimension::DimensionResult;
use crate::error::{Error, Result};
use crate::fit::line_fit;
use crate::math;
use crate::moebius::{one_minus_modulus, Circle, Complex, MoebiusMap, Point};

const SEPARATION_TOL: f64 = 1e-9;
const BOUNDARY_SAMPLES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupKind {
    SchottkyFree,
    Reflection,
}

/// One generator (or inverse, or reflection) with its ping-pong circles: the
/// map sends the exterior of `source` into the closed disk bounded by `target`.
#[derive(Debug, Clone, PartialEq)]
pub struct Letter {
    pub map: MoebiusMap,
    pub inverse: usize,
    pub source: Circle,
    pub target: Circle,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupPresentation {
    letters: Vec<Letter>,
    basepoint: Complex,
    kind: GroupKind,
}

impl GroupPresentation {
    /// Schottky group on hyperbolic disk automorphisms, paired through their
    /// isometric circles. Letters come in pairs `2i` (generator), `2i + 1`
    /// (its inverse).
    pub fn schottky(generators: &[MoebiusMap]) -> Result<Self> {
        let mut letters = Vec::with_capacity(2 * generators.len());
        for (i, g) in generators.iter().enumerate() {
            if !g.is_conformal() || !g.preserves_unit_circle(16, 1e-9) {
                return Err(Error::NotAnIsometry(format!("generator {i} does not preserve the unit disk")));
            }
            let inv = g.inverse();
            let (source, target) = match (g.isometric_circle(), inv.isometric_circle()) {
                (Some(s), Some(t)) => (s, t),
                _ => return Err(Error::SeparationViolated(format!("generator {i} fixes the origin"))),
            };
            letters.push(Letter { map: *g, inverse: 2 * i + 1, source, target });
            letters.push(Letter { map: inv, inverse: 2 * i, source: target, target: source });
        }
        Self::from_letters(letters, GroupKind::SchottkyFree)
    }

    /// Group generated by reflections in circles orthogonal to the unit circle.
    pub fn reflection(circles: &[Circle]) -> Result<Self> {
        let mut letters = Vec::with_capacity(circles.len());
        for (i, c) in circles.iter().enumerate() {
            if !c.is_orthogonal_to_unit(1e-9) {
                return Err(Error::NotAnIsometry(format!("circle {i} is not orthogonal to the unit circle")));
            }
            letters.push(Letter { map: MoebiusMap::reflect(c), inverse: i, source: *c, target: *c });
        }
        Self::from_letters(letters, GroupKind::Reflection)
    }

    /// Cyclic group generated by a single hyperbolic automorphism.
    pub fn cyclic(generator: MoebiusMap) -> Result<Self> {
        Self::schottky(&[generator])
    }

    /// The identity-only group (no generators).
    pub fn trivial() -> Self {
        GroupPresentation { letters: Vec::new(), basepoint: Complex::new(0.0, 0.0), kind: GroupKind::SchottkyFree }
    }

    /// Two-generator Schottky group whose four isometric circles have
    /// Euclidean radius `radius`, orthogonal to the unit circle and centered on
    /// the real and imaginary axes.
    pub fn symmetric_schottky(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius < 1.0) {
            return Err(Error::SeparationViolated(format!("radius {radius} outside (0, 1): adjacent circles overlap")));
        }
        let a = MoebiusMap::disk_translation(2.0 * math::asinh(1.0 / radius));
        let b = a.conjugate_by(&MoebiusMap::rotation(FRAC_PI_2));
        Self::schottky(&[a, b])
    }

    pub(crate) fn from_letters(letters: Vec<Letter>, kind: GroupKind) -> Result<Self> {
        let g = GroupPresentation { letters, basepoint: Complex::new(0.0, 0.0), kind };
        g.check_separation()?;
        Ok(g)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn basepoint(&self) -> Complex {
        self.basepoint
    }

    /// Generators without their inverses.
    pub fn generators(&self) -> impl Iterator<Item = &MoebiusMap> {
        self.letters.iter().enumerate().filter(|(i, l)| l.inverse >= *i).map(|(_, l)| &l.map)
    }

    /// Ping-pong check: the letter disks have disjoint interiors (tangency is
    /// allowed), the basepoint lies outside all of them, every letter carries
    /// its source circle onto its target circle and the basepoint into the
    /// target disk.
    pub fn check_separation(&self) -> Result<()> {
        check_disjoint(&self.letters)?;
        check_ping_pong(&self.letters, self.basepoint)
    }

    /// Breadth-first walk over reduced words of length `1..=max_len`. The
    /// visitor receives the new element's index, its parent's index, the last
    /// letter, the word length and the element's map; indices count from 1
    /// (0 is the identity) in shortlex order.
    fn walk<F: FnMut(usize, usize, usize, usize, &MoebiusMap)>(&self, max_len: usize, mut visit: F) {
        let mut frontier: Vec<(usize, usize, MoebiusMap)> = vec![(0, usize::MAX, MoebiusMap::identity())];
        let mut next_index = 1usize;
        for len in 1..=max_len {
            let keep = len < max_len;
            let mut next = Vec::new();
            for (idx, last, map) in &frontier {
                for (l, letter) in self.letters.iter().enumerate() {
                    if *last != usize::MAX && self.letters[*last].inverse == l {
                        continue;
                    }
                    let g = map.compose(&letter.map);
                    visit(next_index, *idx, l, len, &g);
                    if keep {
                        next.push((next_index, l, g));
                    }
                    next_index += 1;
                }
            }
            frontier = next;
        }
    }

    /// All reduced words up to `max_len` with their orbit points `g(0)`.
    pub fn enumerate_orbit(&self, max_len: usize) -> Result<OrbitBall> {
        if max_len == 0 {
            return Err(Error::InvalidArgument("max_len must be at least 1".into()));
        }
        let mut ball = OrbitBall {
            parent: vec![u32::MAX],
            letter: vec![u16::MAX],
            length: vec![0],
            points: vec![self.basepoint],
            rho: vec![0.0],
            max_len,
            letters: self.letters.iter().map(|l| l.map).collect(),
        };
        self.walk(max_len, |idx, parent, letter, len, g| {
            debug_assert_eq!(idx, ball.parent.len());
            ball.parent.push(parent as u32);
            ball.letter.push(letter as u16);
            ball.length.push(len as u8);
            ball.points.push(g.image_of_origin());
            ball.rho.push(g.disk_displacement());
        });
        Ok(ball)
    }

    /// Partial sums of `Σ (1 - |g(0)|)` by word length and a growth verdict.
    pub fn convergence_type_probe(&self, max_len: usize) -> Result<TypeReport> {
        if max_len < 4 {
            return Err(Error::InvalidArgument("max_len must be at least 4".into()));
        }
        let mut shells = vec![0.0; max_len + 1];
        self.walk(max_len, |_, _, _, len, g| {
            shells[len] += one_minus_modulus(g.disk_displacement());
        });
        let mut partial = 1.0;
        let rows: Vec<ShellRow> = (1..=max_len)
            .map(|k| {
                partial += shells[k];
                ShellRow { length: k, shell_sum: shells[k], partial_sum: partial }
            })
            .collect();
        let verdict = shell_verdict(&rows);
        Ok(TypeReport { rows, verdict })
    }
}

fn check_disjoint(letters: &[Letter]) -> Result<()> {
    for (i, a) in letters.iter().enumerate() {
        if letters[a.inverse].inverse != i {
            return Err(Error::SeparationViolated(format!("inverse table is not an involution at {i}")));
        }
        for (j, b) in letters.iter().enumerate().skip(i + 1) {
            if a.source != b.source && disks_overlap(&a.source, &b.source) {
                return Err(Error::SeparationViolated(format!("disks of letters {i} and {j} overlap")));
            }
        }
    }
    Ok(())
}

fn check_ping_pong(letters: &[Letter], basepoint: Complex) -> Result<()> {
    for (i, a) in letters.iter().enumerate() {
        if a.source.signed_distance(basepoint) < -SEPARATION_TOL * a.source.radius().max(1.0) {
            return Err(Error::SeparationViolated(format!("basepoint lies inside the disk of letter {i}")));
        }
        let tol = SEPARATION_TOL * a.target.radius().max(1.0);
        for k in 0..BOUNDARY_SAMPLES {
            let z = a.source.point_at(2.0 * PI * (k as f64 + 0.25) / BOUNDARY_SAMPLES as f64);
            match a.map.apply_point(Point::Finite(z)) {
                Point::Finite(w) if a.target.signed_distance(w).abs() <= tol => {}
                _ => {
                    return Err(Error::SeparationViolated(format!(
                        "letter {i} does not map its source circle onto its target circle"
                    )))
                }
            }
        }
        let img = a.map.apply(basepoint)?;
        if a.target.signed_distance(img) > tol {
            return Err(Error::SeparationViolated(format!("letter {i} maps the exterior outside its target")));
        }
    }
    Ok(())
}

/// Interior overlap, tolerating tangency up to a relative 1e-9 plus an
/// absolute slack of a few ulps at unit scale (tiny disks near the boundary).
fn disks_overlap(a: &Circle, b: &Circle) -> bool {
    let gap = (a.center() - b.center()).norm();
    let sum = a.radius() + b.radius();
    let slack = SEPARATION_TOL * sum + 1e-13;
    gap < sum - slack || gap <= (a.radius() - b.radius()).abs()
}

/// The ratio test on the last (up to five) successive shell sums.
fn shell_verdict(rows: &[ShellRow]) -> ConvergenceVerdict {
    if rows.len() < 2 || rows.iter().any(|r| !(r.shell_sum > 0.0)) {
        return ConvergenceVerdict::Inconclusive;
    }
    let ratios: Vec<f64> = rows.windows(2).map(|w| w[1].shell_sum / w[0].shell_sum).collect();
    let last = &ratios[ratios.len().saturating_sub(5)..];
    if last.iter().all(|&r| r > 0.9) {
        ConvergenceVerdict::AppearsDivergent
    } else if last.iter().all(|&r| r < 0.6) {
        ConvergenceVerdict::AppearsConvergent
    } else {
        ConvergenceVerdict::Inconclusive
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvergenceVerdict {
    AppearsConvergent,
    AppearsDivergent,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShellRow {
    pub length: usize,
    pub shell_sum: f64,
    pub partial_sum: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypeReport {
    pub rows: Vec<ShellRow>,
    pub verdict: ConvergenceVerdict,
}

/// Reduced words up to a fixed length, stored as a prefix tree.
///
/// Element 0 is the identity. Maps are not stored; [`OrbitBall::map`] rebuilds
/// them from the word.
#[derive(Debug, Clone)]
pub struct OrbitBall {
    parent: Vec<u32>,
    letter: Vec<u16>,
    length: Vec<u8>,
    points: Vec<Complex>,
    rho: Vec<f64>,
    max_len: usize,
    letters: Vec<MoebiusMap>,
}

impl OrbitBall {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn word(&self, i: usize) -> Vec<usize> {
        let mut w = Vec::with_capacity(self.length[i] as usize);
        let mut k = i;
        while self.parent[k] != u32::MAX {
            w.push(self.letter[k] as usize);
            k = self.parent[k] as usize;
        }
        w.reverse();
        w
    }

    /// Index of the parent element (the word with its last letter removed).
    pub fn parent(&self, i: usize) -> Option<usize> {
        (self.parent[i] != u32::MAX).then(|| self.parent[i] as usize)
    }

    pub fn word_length(&self, i: usize) -> usize {
        self.length[i] as usize
    }

    pub fn map(&self, i: usize) -> MoebiusMap {
        self.word(i).iter().fold(MoebiusMap::identity(), |acc, &l| acc.compose(&self.letters[l]))
    }

    pub fn point(&self, i: usize) -> Complex {
        self.points[i]
    }

    pub fn points(&self) -> &[Complex] {
        &self.points
    }

    /// Hyperbolic distances `ρ(0, g(0))`.
    pub fn distances(&self) -> &[f64] {
        &self.rho
    }

    /// `1 - |g(0)|` of element `i`, accurate even when `|g(0)|` rounds to 1.
    pub fn one_minus_modulus(&self, i: usize) -> f64 {
        one_minus_modulus(self.rho[i])
    }

    /// Word rendered as dot-separated letter indices (`e` for the identity).
    pub fn word_label(&self, i: usize) -> String {
        let w = self.word(i);
        if w.is_empty() {
            return String::from("e");
        }
        let mut s = String::new();
        for (k, l) in w.iter().enumerate() {
            if k > 0 {
                s.push('.');
            }
            s.push_str(&format!("{l}"));
        }
        s
    }

    /// Radius up to which the ball contains every group element: the smallest
    /// displacement among the longest words. `None` for the trivial group.
    pub fn complete_radius(&self) -> Option<f64> {
        self.rho
            .iter()
            .zip(&self.length)
            .filter(|(_, &l)| l as usize == self.max_len)
            .map(|(&r, _)| r)
            .fold(None, |acc: Option<f64>, r| Some(acc.map_or(r, |a| a.min(r))))
    }

    /// `Σ (1 - |g(0)|)^t` over the ball.
    pub fn poincare_partial_sum(&self, t: f64) -> f64 {
        self.rho.iter().map(|&r| math::powf(one_minus_modulus(r), t)).sum()
    }

    /// Orbit-counting estimate of the critical exponent: least-squares slope of
    /// `ln N(R)` against `R` over the distinct shells in the outer half
    /// `[R_c/2, R_c]` of the complete radius `R_c`.
    pub fn critical_exponent_estimate(&self) -> Result<DimensionResult> {
        let rc = self
            .complete_radius()
            .ok_or_else(|| Error::InsufficientData("orbit ball has no elements beyond the identity".into()))?;
        let mut radii: Vec<f64> = self.rho.iter().copied().filter(|&r| r <= rc * (1.0 + 1e-12)).collect();
        radii.sort_by(|a, b| a.total_cmp(b));
        // Distinct shells: (radius, count of points with ρ ≤ radius).
        let mut shells: Vec<(f64, f64)> = Vec::new();
        for (k, &r) in radii.iter().enumerate() {
            let n = (k + 1) as f64;
            match shells.last_mut() {
                Some(last) if (r - last.0).abs() <= 1e-9 * r.max(1.0) => last.1 = n,
                _ => shells.push((r, n)),
            }
        }
        let window: Vec<&(f64, f64)> = shells.iter().filter(|(r, _)| *r >= 0.5 * rc).collect();
        if window.len() < 4 {
            return Err(Error::InsufficientData(format!(
                "{} distance shells in [R_c/2, R_c], need at least 4",
                window.len()
            )));
        }
        let xs: Vec<f64> = window.iter().map(|(r, _)| *r).collect();
        let ys: Vec<f64> = window.iter().map(|(_, n)| math::ln(*n)).collect();
        let fit = line_fit(&xs, &ys).ok_or_else(|| Error::InsufficientData("degenerate shell radii".into()))?;
        let se = fit.slope_stderr;
        Ok(DimensionResult::new(fit.slope, (fit.slope - se, fit.slope + se), "orbit-counting slope", se))
    }
}

/// One disk of the dyadic construction: `D*_n` in the half-plane, its image
/// `D_n` in the disk and the mirror image `η(-D*_n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Section5Disk {
    pub n: usize,
    pub half_plane: Circle,
    pub disk: Circle,
    pub mirror: Circle,
}

/// The dyadic-disk reflection construction truncated at a finite depth.
#[derive(Debug, Clone, PartialEq)]
pub struct Section5 {
    pub group: GroupPresentation,
    pub disks: Vec<Section5Disk>,
    /// `τ∘σ_n` in the upper half-plane, before conjugation to the disk.
    pub half_plane_generators: Vec<MoebiusMap>,
}

/// Half-plane disks `D*_1` on `[0, 2]` and `D*_n` on `[2^{n-1}, 2^n]`, the
/// generators `τ∘σ_n` (σ_n the reflection in `D*_n`, `τ(z) = -z̄`), moved to
/// the unit disk by the Cayley map `η`.
pub fn build_section5_group(depth: usize) -> Result<Section5> {
    if !(1..=30).contains(&depth) {
        return Err(Error::DepthOutOfRange(depth));
    }
    let eta = MoebiusMap::cayley_to_disk();
    let tau = MoebiusMap::tau();
    let mut disks = Vec::with_capacity(depth);
    let mut generators = Vec::with_capacity(depth);
    let mut half_plane = Vec::with_capacity(2 * depth);
    let mut letters = Vec::with_capacity(2 * depth);
    for n in 1..=depth {
        let (lo, hi) = if n == 1 { (0.0, 2.0) } else { (math::powf(2.0, (n - 1) as f64), math::powf(2.0, n as f64)) };
        let upper = Circle::with_real_diameter(lo, hi)?;
        let mirrored = Circle::with_real_diameter(-hi, -lo)?;
        let gamma = tau.compose(&MoebiusMap::reflect(&upper));
        let disk = eta.image_circle(&upper)?;
        let mirror = eta.image_circle(&mirrored)?;
        let g = gamma.conjugate_by(&eta);
        let k = letters.len();
        half_plane.push(Letter { map: gamma, inverse: k + 1, source: upper, target: mirrored });
        half_plane.push(Letter { map: gamma.inverse(), inverse: k, source: mirrored, target: upper });
        letters.push(Letter { map: g, inverse: k + 1, source: disk, target: mirror });
        letters.push(Letter { map: g.inverse(), inverse: k, source: mirror, target: disk });
        disks.push(Section5Disk { n, half_plane: upper, disk, mirror });
        generators.push(gamma);
    }
    // Near i the disk model loses about n bits, so the mapping part of the
    // ping-pong test runs in the half-plane (basepoint i = η⁻¹(0)), where it
    // is well conditioned; η carries the verified configuration over.
    check_disjoint(&half_plane)?;
    check_ping_pong(&half_plane, Complex::new(0.0, 1.0))?;
    check_disjoint(&letters)?;
    let group = GroupPresentation { letters, basepoint: Complex::new(0.0, 0.0), kind: GroupKind::SchottkyFree };
    Ok(Section5 { group, disks, half_plane_generators: generators })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moebius::Classification;

    fn cyclic4() -> GroupPresentation {
        // z ↦ 4z on the half-plane, conjugated to the disk with axis (-1, 1).
        GroupPresentation::cyclic(MoebiusMap::disk_translation(4f64.ln())).unwrap()
    }

    #[test]
    fn free_group_sphere_sizes() {
        let g = cyclic4();
        assert_eq!(g.enumerate_orbit(3).unwrap().len(), 7);
        let s = GroupPresentation::symmetric_schottky(0.3).unwrap();
        for n in 1..=5 {
            let expected = 1 + (1..=n).map(|k| 4 * 3usize.pow(k as u32 - 1)).sum::<usize>();
            assert_eq!(s.enumerate_orbit(n).unwrap().len(), expected);
        }
    }

    #[test]
    fn reflection_group_count() {
        let circles: Vec<Circle> = (0..3)
            .map(|k| {
                let r = 0.4f64;
                let dir = Complex::from_polar((1.0 + r * r).sqrt(), 2.0 * PI * k as f64 / 3.0);
                Circle::new(dir, r).unwrap()
            })
            .collect();
        let g = GroupPresentation::reflection(&circles).unwrap();
        assert_eq!(g.enumerate_orbit(2).unwrap().len(), 1 + 3 + 6);
    }

    #[test]
    fn identity_only_ball() {
        let ball = GroupPresentation::trivial().enumerate_orbit(3).unwrap();
        assert_eq!(ball.len(), 1);
        assert_eq!(ball.poincare_partial_sum(0.7), 1.0);
        assert!(matches!(ball.critical_exponent_estimate(), Err(Error::InsufficientData(_))));
        let report = GroupPresentation::trivial().convergence_type_probe(6).unwrap();
        assert_eq!(report.verdict, ConvergenceVerdict::Inconclusive);
    }

    #[test]
    fn partial_sum_at_zero_counts_elements() {
        let ball = GroupPresentation::symmetric_schottky(0.2).unwrap().enumerate_orbit(4).unwrap();
        assert_eq!(ball.poincare_partial_sum(0.0), ball.len() as f64);
    }

    #[test]
    fn overlapping_circles_are_rejected() {
        assert!(matches!(GroupPresentation::symmetric_schottky(1.2), Err(Error::SeparationViolated(_))));
        let r = 1.2f64;
        let c = |z: Complex| Circle::new(z * (1.0 + r * r).sqrt(), r).unwrap();
        let res = GroupPresentation::reflection(&[c(Complex::new(1.0, 0.0)), c(Complex::new(0.0, 1.0))]);
        assert!(matches!(res, Err(Error::SeparationViolated(_))));
    }

    #[test]
    fn section5_depth_one_generator() {
        let s = build_section5_group(1).unwrap();
        assert_eq!(s.group.letters().len(), 2);
        // The disk on [0, 2] is tangent to the imaginary axis, so τ∘σ_1 is parabolic.
        assert_eq!(s.half_plane_generators[0].classify().unwrap(), Classification::Parabolic);
        assert!(s.half_plane_generators[0].is_conformal());
        assert!(matches!(build_section5_group(0), Err(Error::DepthOutOfRange(0))));
        assert!(matches!(build_section5_group(31), Err(Error::DepthOutOfRange(31))));
    }

    #[test]
    fn word_labels() {
        let ball = cyclic4().enumerate_orbit(2).unwrap();
        assert_eq!(ball.word_label(0), "e");
        assert_eq!(ball.word_label(1), "0");
        let labels: Vec<String> = (0..ball.len()).map(|i| ball.word_label(i)).collect();
        assert!(labels.contains(&String::from("1.1")));
    }
}
