//! Möbius and anti-Möbius maps of the extended plane.
//!
//! A [`MoebiusMap`] stores four complex coefficients normalised to `ad - bc = 1`
//! together with an [`Orientation`]. Anticonformal maps act through complex
//! conjugation of the argument, `z ↦ (a z̄ + b)/(c z̄ + d)`, so that products of
//! two reflections come out conformal without any special casing.

use alloc::format;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math;

pub type Complex = Complex64;

/// Coordinates above this modulus are evaluated in the `1/z` chart.
const CHART_SWAP: f64 = 1e12;
const POLE_EPS: f64 = 1e-300;
const CLASSIFY_TOL: f64 = 1e-9;

#[inline]
fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

/// A point of the Riemann sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Point {
    Finite(Complex),
    Infinity,
}

impl Point {
    pub fn finite(self) -> Option<Complex> {
        match self {
            Point::Finite(z) => Some(z),
            Point::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Point::Infinity)
    }
}

impl From<Complex> for Point {
    fn from(z: Complex) -> Self {
        Point::Finite(z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Conformal,
    Anticonformal,
}

impl Orientation {
    /// Orientation of a composition: parities add mod 2.
    pub fn then(self, other: Orientation) -> Orientation {
        if self == other {
            Orientation::Conformal
        } else {
            Orientation::Anticonformal
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    Identity,
    Elliptic,
    Parabolic,
    Hyperbolic,
}

/// A circle in the plane with positive radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    center: Complex,
    radius: f64,
}

impl Circle {
    pub fn new(center: Complex, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() || !center.re.is_finite() || !center.im.is_finite() {
            return Err(Error::InvalidCircle(format!("center {center}, radius {radius}")));
        }
        Ok(Circle { center, radius })
    }

    pub fn unit() -> Self {
        Circle { center: c(0.0, 0.0), radius: 1.0 }
    }

    /// Circle with the real segment `[lo, hi]` as a diameter.
    pub fn with_real_diameter(lo: f64, hi: f64) -> Result<Self> {
        Circle::new(c(0.5 * (lo + hi), 0.0), 0.5 * (hi - lo))
    }

    /// Circumcircle of three points; fails if they are collinear.
    pub fn through(p: Complex, q: Complex, r: Complex) -> Result<Self> {
        // Solve |z - p| = |z - q| = |z - r| as a 2x2 linear system.
        let (ax, ay) = (q.re - p.re, q.im - p.im);
        let (bx, by) = (r.re - p.re, r.im - p.im);
        let det = 2.0 * (ax * by - ay * bx);
        let scale = (ax * ax + ay * ay).max(bx * bx + by * by);
        if det.abs() <= 1e-14 * scale {
            return Err(Error::InvalidCircle(format!("points {p}, {q}, {r} are collinear")));
        }
        let a2 = ax * ax + ay * ay;
        let b2 = bx * bx + by * by;
        let ux = (by * a2 - ay * b2) / det;
        let uy = (ax * b2 - bx * a2) / det;
        Circle::new(c(p.re + ux, p.im + uy), math::sqrt(ux * ux + uy * uy))
    }

    pub fn center(&self) -> Complex {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn diameter(&self) -> f64 {
        2.0 * self.radius
    }

    /// Point of the circle at angle `theta` (measured from its center).
    pub fn point_at(&self, theta: f64) -> Complex {
        self.center + Complex::from_polar(self.radius, theta)
    }

    /// Signed distance from `z` to the circle (negative inside).
    pub fn signed_distance(&self, z: Complex) -> f64 {
        (z - self.center).norm() - self.radius
    }

    /// Whether the two closed disks share interior points, allowing tangency
    /// up to a relative tolerance.
    pub fn overlaps(&self, other: &Circle, rel_tol: f64) -> bool {
        let gap = (self.center - other.center).norm();
        let sum = self.radius + other.radius;
        let diff = (self.radius - other.radius).abs();
        // Nested disks overlap as well.
        gap < sum * (1.0 - rel_tol) || gap <= diff
    }

    /// Whether the circle meets the unit circle at a right angle.
    pub fn is_orthogonal_to_unit(&self, tol: f64) -> bool {
        (self.center.norm_sqr() - 1.0 - self.radius * self.radius).abs() <= tol
    }

    /// Angular interval `(mid, half_width)` of the arc of the unit circle that
    /// lies inside this disk.
    pub fn unit_arc(&self) -> Result<(f64, f64)> {
        let dist = self.center.norm();
        if dist == 0.0 {
            return Err(Error::InvalidCircle("circle concentric with the unit circle".into()));
        }
        let cos_half = (1.0 + dist * dist - self.radius * self.radius) / (2.0 * dist);
        if !(-1.0..=1.0).contains(&cos_half) {
            return Err(Error::InvalidCircle(format!(
                "circle (center {}, radius {}) does not cross the unit circle",
                self.center, self.radius
            )));
        }
        Ok((self.center.arg(), math::acos(cos_half)))
    }
}

/// A conformal or anticonformal fractional-linear map with `ad - bc = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoebiusMap {
    a: Complex,
    b: Complex,
    c: Complex,
    d: Complex,
    orientation: Orientation,
}

impl MoebiusMap {
    /// Builds and normalises a map; rejects `ad - bc = 0`.
    pub fn new(a: Complex, b: Complex, c: Complex, d: Complex, orientation: Orientation) -> Result<Self> {
        let det = a * d - b * c;
        let scale = a.norm().max(b.norm()).max(c.norm()).max(d.norm());
        if !(det.norm() > 1e-28 * scale * scale) || !det.re.is_finite() || !det.im.is_finite() {
            return Err(Error::Degenerate);
        }
        let s = det.sqrt();
        Ok(MoebiusMap { a: a / s, b: b / s, c: c / s, d: d / s, orientation })
    }

    pub fn conformal(a: Complex, b: Complex, c: Complex, d: Complex) -> Result<Self> {
        Self::new(a, b, c, d, Orientation::Conformal)
    }

    /// Conformal map with real coefficients.
    pub fn real(a: f64, b: f64, cc: f64, d: f64) -> Result<Self> {
        Self::conformal(c(a, 0.0), c(b, 0.0), c(cc, 0.0), c(d, 0.0))
    }

    pub fn identity() -> Self {
        MoebiusMap {
            a: c(1.0, 0.0),
            b: c(0.0, 0.0),
            c: c(0.0, 0.0),
            d: c(1.0, 0.0),
            orientation: Orientation::Conformal,
        }
    }

    pub fn translation(t: Complex) -> Self {
        MoebiusMap { a: c(1.0, 0.0), b: t, c: c(0.0, 0.0), d: c(1.0, 0.0), orientation: Orientation::Conformal }
    }

    /// `z ↦ k z`.
    pub fn dilation(k: Complex) -> Result<Self> {
        Self::conformal(k, c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0))
    }

    /// Affine map `x ↦ r x + t` with real coefficients.
    pub fn affine(r: f64, t: f64) -> Result<Self> {
        Self::real(r, t, 0.0, 1.0)
    }

    /// Rotation of the disk `z ↦ e^{iθ} z`.
    pub fn rotation(theta: f64) -> Self {
        let h = Complex::from_polar(1.0, 0.5 * theta);
        MoebiusMap { a: h, b: c(0.0, 0.0), c: c(0.0, 0.0), d: h.conj(), orientation: Orientation::Conformal }
    }

    /// Hyperbolic translation of the disk along the real diameter by hyperbolic
    /// distance `length`.
    pub fn disk_translation(length: f64) -> Self {
        let ch = math::cosh(0.5 * length);
        let sh = math::sinh(0.5 * length);
        MoebiusMap { a: c(ch, 0.0), b: c(sh, 0.0), c: c(sh, 0.0), d: c(ch, 0.0), orientation: Orientation::Conformal }
    }

    /// `τ(z) = -z̄`, the reflection in the imaginary axis.
    pub fn tau() -> Self {
        // Matrix diag(-1, 1) acting on z̄; det -1 is normalised away.
        MoebiusMap {
            a: c(-1.0, 0.0),
            b: c(0.0, 0.0),
            c: c(0.0, 0.0),
            d: c(1.0, 0.0),
            orientation: Orientation::Anticonformal,
        }
        .renormalized()
    }

    /// Reflection (inversion) in a circle: `z ↦ center + r²/(z̄ - c̄enter)`.
    pub fn reflect(circle: &Circle) -> Self {
        let z0 = circle.center;
        let r2 = circle.radius * circle.radius;
        // Matrix [z0, r² - |z0|²; 1, -z̄0] acting on z̄.
        MoebiusMap::new(z0, c(r2 - z0.norm_sqr(), 0.0), c(1.0, 0.0), -z0.conj(), Orientation::Anticonformal)
            .expect("reflection matrix has determinant -r² ≠ 0")
    }

    /// The map `η` of the upper half-plane onto the unit disk with
    /// `η(∞) = i`, `η(1) = 1`, `η(0) = -i`; explicitly `η(z) = (iz + 1)/(z + i)`.
    pub fn cayley_to_disk() -> Self {
        MoebiusMap::conformal(c(0.0, 1.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)).expect("det = -2")
    }

    pub fn coefficients(&self) -> [Complex; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn is_conformal(&self) -> bool {
        self.orientation == Orientation::Conformal
    }

    pub fn determinant(&self) -> Complex {
        self.a * self.d - self.b * self.c
    }

    fn renormalized(self) -> Self {
        MoebiusMap::new(self.a, self.b, self.c, self.d, self.orientation).unwrap_or(self)
    }

    /// `self ∘ g`. Both factors have unit determinant, so the product does
    /// too; recomputing `ad - bc` would only add cancellation error.
    pub fn compose(&self, g: &MoebiusMap) -> MoebiusMap {
        let [ga, gb, gc, gd] = match self.orientation {
            Orientation::Conformal => [g.a, g.b, g.c, g.d],
            Orientation::Anticonformal => [g.a.conj(), g.b.conj(), g.c.conj(), g.d.conj()],
        };
        MoebiusMap {
            a: self.a * ga + self.b * gc,
            b: self.a * gb + self.b * gd,
            c: self.c * ga + self.d * gc,
            d: self.c * gb + self.d * gd,
            orientation: self.orientation.then(g.orientation),
        }
    }

    pub fn inverse(&self) -> MoebiusMap {
        let (a, b, cc, d) = (self.d, -self.b, -self.c, self.a);
        match self.orientation {
            Orientation::Conformal => MoebiusMap { a, b, c: cc, d, orientation: Orientation::Conformal },
            // z = conj(M⁻¹(u)) = conj(M⁻¹)(ū)
            Orientation::Anticonformal => MoebiusMap {
                a: a.conj(),
                b: b.conj(),
                c: cc.conj(),
                d: d.conj(),
                orientation: Orientation::Anticonformal,
            },
        }
    }

    /// `h ∘ self ∘ h⁻¹`.
    pub fn conjugate_by(&self, h: &MoebiusMap) -> MoebiusMap {
        h.compose(self).compose(&h.inverse())
    }

    #[inline]
    fn argument(&self, z: Complex) -> Complex {
        match self.orientation {
            Orientation::Conformal => z,
            Orientation::Anticonformal => z.conj(),
        }
    }

    /// Image of a finite point; `Err(PoleHit)` at the pole.
    pub fn apply(&self, z: Complex) -> Result<Complex> {
        let w = self.argument(z);
        if w.norm() > CHART_SWAP {
            let u = w.inv();
            let den = self.c + self.d * u;
            if den.norm() < POLE_EPS {
                return Err(Error::PoleHit);
            }
            return Ok((self.a + self.b * u) / den);
        }
        let den = self.c * w + self.d;
        if den.norm() < POLE_EPS {
            return Err(Error::PoleHit);
        }
        Ok((self.a * w + self.b) / den)
    }

    /// Image of a point of the sphere; the pole goes to [`Point::Infinity`].
    pub fn apply_point(&self, p: Point) -> Point {
        match p {
            Point::Infinity => {
                if self.c.norm() < POLE_EPS {
                    Point::Infinity
                } else {
                    Point::Finite(self.a / self.c)
                }
            }
            Point::Finite(z) => match self.apply(z) {
                Ok(w) => Point::Finite(w),
                Err(_) => Point::Infinity,
            },
        }
    }

    /// Real part of the image of a real point; convenient for interval charts.
    #[inline]
    pub fn apply_real(&self, x: f64) -> Result<f64> {
        self.apply(c(x, 0.0)).map(|w| w.re)
    }

    /// `|f'(z)| = 1/|c w + d|²` with `w = z` or `z̄`.
    pub fn derivative_modulus(&self, z: Complex) -> Result<f64> {
        let den = self.c * self.argument(z) + self.d;
        let m = den.norm_sqr();
        if math::sqrt(m) < POLE_EPS {
            return Err(Error::PoleHit);
        }
        Ok(1.0 / m)
    }

    /// Modulus of the logarithmic derivative of `|f'|`, i.e. `2|c|/|cw + d|`;
    /// bounds the distortion of `f` along any curve.
    pub fn log_derivative_modulus(&self, z: Complex) -> Result<f64> {
        let den = (self.c * self.argument(z) + self.d).norm();
        if den < POLE_EPS {
            return Err(Error::PoleHit);
        }
        Ok(2.0 * self.c.norm() / den)
    }

    /// The preimage of `∞`.
    pub fn pole(&self) -> Point {
        if self.c.norm() < POLE_EPS {
            return Point::Infinity;
        }
        let p = -self.d / self.c;
        match self.orientation {
            Orientation::Conformal => Point::Finite(p),
            Orientation::Anticonformal => Point::Finite(p.conj()),
        }
    }

    pub fn trace(&self) -> Complex {
        self.a + self.d
    }

    /// Elliptic / parabolic / hyperbolic by comparing `|tr|` with 2.
    pub fn classify(&self) -> Result<Classification> {
        if !self.is_conformal() {
            return Err(Error::NotAnIsometry("anticonformal maps have no trace class".into()));
        }
        let tr = self.trace();
        if tr.im.abs() > CLASSIFY_TOL {
            return Err(Error::NotAnIsometry(format!("trace {tr} is not real")));
        }
        let t = tr.re.abs();
        let is_identity =
            self.b.norm() <= CLASSIFY_TOL && self.c.norm() <= CLASSIFY_TOL && (self.a - self.d).norm() <= CLASSIFY_TOL;
        Ok(if is_identity {
            Classification::Identity
        } else if (t - 2.0).abs() <= CLASSIFY_TOL {
            Classification::Parabolic
        } else if t < 2.0 {
            Classification::Elliptic
        } else {
            Classification::Hyperbolic
        })
    }

    /// Isometric circle `{ |c w + d| = 1 }`, where `|f'| = 1`.
    pub fn isometric_circle(&self) -> Option<Circle> {
        if self.c.norm() < 1e-14 {
            return None;
        }
        let center = -self.d / self.c;
        let center = match self.orientation {
            Orientation::Conformal => center,
            Orientation::Anticonformal => center.conj(),
        };
        Circle::new(center, 1.0 / self.c.norm()).ok()
    }

    /// Image of a circle, provided it is again a circle (the pole is not on it).
    pub fn image_circle(&self, circle: &Circle) -> Result<Circle> {
        let pts =
            [0.0, 2.0 * core::f64::consts::FRAC_PI_3, 4.0 * core::f64::consts::FRAC_PI_3].map(|t| circle.point_at(t));
        let imgs = [self.apply(pts[0])?, self.apply(pts[1])?, self.apply(pts[2])?];
        Circle::through(imgs[0], imgs[1], imgs[2])
    }

    /// Whether the map preserves the unit circle (checked at `samples` points).
    pub fn preserves_unit_circle(&self, samples: usize, tol: f64) -> bool {
        (0..samples).all(|k| {
            let z = Complex::from_polar(1.0, 2.0 * core::f64::consts::PI * (k as f64 + 0.5) / samples as f64);
            match self.apply(z) {
                Ok(w) => (w.norm() - 1.0).abs() <= tol,
                Err(_) => false,
            }
        })
    }

    /// Compares two maps up to the sign ambiguity of the normalisation.
    pub fn approx_eq(&self, other: &MoebiusMap, tol: f64) -> bool {
        if self.orientation != other.orientation {
            return false;
        }
        let dist = |s: f64| {
            (self.a - other.a * s).norm()
                + (self.b - other.b * s).norm()
                + (self.c - other.c * s).norm()
                + (self.d - other.d * s).norm()
        };
        dist(1.0) <= tol || dist(-1.0) <= tol
    }

    /// Hyperbolic distance `ρ(0, f(0))` in the unit disk, computed from the
    /// coefficients so that it stays accurate when `|f(0)|` rounds to 1.
    ///
    /// Valid for isometries of the disk, where `|d|² - |b|² = 1`.
    pub fn disk_displacement(&self) -> f64 {
        2.0 * math::ln(self.d.norm() + self.b.norm())
    }

    /// `f(0) = b/d` (the conjugation of anticonformal maps fixes 0).
    pub fn image_of_origin(&self) -> Complex {
        self.b / self.d
    }
}

impl Point {
    /// Applies `f` to the point (alias of [`MoebiusMap::apply_point`]).
    pub fn mapped_by(self, f: &MoebiusMap) -> Point {
        f.apply_point(self)
    }
}

/// `1 - |g(0)|` from the hyperbolic displacement, without cancellation.
#[inline]
pub fn one_minus_modulus(rho: f64) -> f64 {
    2.0 / (math::exp(rho) + 1.0)
}
