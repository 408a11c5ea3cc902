//! Graph-directed conformal iterated function systems on an interval or on
//! arcs of the unit circle.
//!
//! A system has base sets `X_0, X_1, ...` (parameter intervals in one chart),
//! head letters given by explicit Möbius maps and, optionally, countable tails
//! known only through a [`TailLaw`]. Letter `i` maps each of its source sets
//! into its target set; a word `ω = ω_1 … ω_n` is admissible when
//! `target(ω_{k+1}) ∈ sources(ω_k)`, and then `φ_ω = φ_{ω_1} ∘ … ∘ φ_{ω_n}`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::dimension::DimensionResult;
use crate::error::{Error, Result};
use crate::fit::line_fit;
use crate::group::{GroupKind, GroupPresentation};
use crate::math;
use crate::moebius::{Complex, MoebiusMap, Orientation};
use crate::tail::{Bound, TailBranch, TailLaw};

const MARKOV_TOL: f64 = 1e-9;
const OSC_TOL: f64 = 1e-10;
/// Largest number of words examined per level when searching for a
/// contracting iterate.
const CONTRACTION_BUDGET: usize = 200_000;
const CONTRACTION_MAX_LEVEL: usize = 8;

/// Coordinates on the phase space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chart {
    /// Real line, parameter `x`.
    Line,
    /// Unit circle, parameter the angle `θ` (point `e^{iθ}`).
    Circle,
}

impl Chart {
    pub fn to_plane(self, x: f64) -> Complex {
        match self {
            Chart::Line => Complex::new(x, 0.0),
            Chart::Circle => Complex::from_polar(1.0, x),
        }
    }

    /// Parameter of `w`; on the circle the angle is unwrapped next to `near`.
    pub fn from_plane(self, w: Complex, near: f64) -> f64 {
        match self {
            Chart::Line => w.re,
            Chart::Circle => near + (w * Complex::from_polar(1.0, -near)).arg(),
        }
    }

    /// Distance of `w` from the chart's curve.
    fn off_chart(self, w: Complex) -> f64 {
        match self {
            Chart::Line => w.im.abs() / (1.0 + w.re.abs()),
            Chart::Circle => (w.norm() - 1.0).abs(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaseSet {
    pub lo: f64,
    pub hi: f64,
}

impl BaseSet {
    pub fn new(lo: f64, hi: f64) -> Self {
        BaseSet { lo, hi }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    fn contains(&self, x: f64, tol: f64) -> bool {
        self.lo - tol <= x && x <= self.hi + tol
    }
}

/// A head letter: `map` sends every base set in `sources` into `target`.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub map: MoebiusMap,
    pub target: usize,
    pub sources: Vec<usize>,
}

/// Smallest level `N` at which every admissible word satisfies
/// `‖φ'_ω‖ < 1`, with the per-level maxima `q_0 = 1, q_1, …, q_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Contraction {
    pub level: usize,
    pub norms: Vec<f64>,
}

impl Contraction {
    pub fn ratio(&self) -> f64 {
        self.norms[self.level]
    }

    /// Upper bound on `Σ_{m ≥ 0} q_m` from submultiplicativity.
    pub fn norm_series(&self) -> f64 {
        let head: f64 = self.norms[..self.level].iter().sum();
        head / (1.0 - self.ratio())
    }
}

/// The θ number of a system with its regularity flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theta {
    /// `-∞` for finite alphabets.
    pub value: f64,
    pub regular: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IfsSystem {
    chart: Chart,
    base_sets: Vec<BaseSet>,
    letters: Vec<Branch>,
    tails: Vec<TailBranch>,
    successors: Vec<Vec<usize>>,
    osc_overlaps: Vec<(usize, usize)>,
    contraction: Option<Contraction>,
    log_distortion: f64,
}

/// State of a word during enumeration. Head letters are composed into `open`;
/// a tail symbol closes the current segment, whose sup norm (over the tail's
/// target set) is multiplied into `closed`.
pub(crate) struct WordNode<'a> {
    pub len: usize,
    pub first: usize,
    pub last: usize,
    pub open: Option<MoebiusMap>,
    pub closed: f64,
    pub closed_segments: u32,
    pub tail_counts: &'a [u32],
}

impl IfsSystem {
    pub fn new(chart: Chart, base_sets: Vec<BaseSet>, letters: Vec<Branch>, tails: Vec<TailBranch>) -> Result<Self> {
        let invalid = |msg: alloc::string::String| Err(Error::InvalidSystem(msg));
        if base_sets.is_empty() {
            return invalid("no base sets".into());
        }
        for (k, b) in base_sets.iter().enumerate() {
            if !(b.lo < b.hi) || !b.lo.is_finite() || !b.hi.is_finite() {
                return invalid(format!("base set {k} is not a nondegenerate interval"));
            }
            if chart == Chart::Circle && b.width() >= 2.0 * PI {
                return invalid(format!("arc {k} covers the whole circle"));
            }
        }
        if letters.is_empty() && tails.is_empty() {
            return invalid("empty alphabet".into());
        }
        let nsets = base_sets.len();
        let check_indices = |target: usize, sources: &[usize], what: &str| -> Result<()> {
            if target >= nsets || sources.is_empty() || sources.iter().any(|&s| s >= nsets) {
                return Err(Error::InvalidSystem(format!("{what}: base-set indices out of range or empty")));
            }
            Ok(())
        };
        let mut sys = IfsSystem {
            chart,
            base_sets,
            letters,
            tails,
            successors: Vec::new(),
            osc_overlaps: Vec::new(),
            contraction: None,
            log_distortion: 0.0,
        };
        for (i, l) in sys.letters.iter().enumerate() {
            check_indices(l.target, &l.sources, &format!("letter {i}"))?;
            let target = sys.base_sets[l.target];
            let tol = MARKOV_TOL * (1.0 + target.width());
            for &j in &l.sources {
                let set = sys.base_sets[j];
                if sys.derivative_range(&l.map, &set).is_none() {
                    return Err(Error::PoleInDomain { letter: i, set: j });
                }
                for x in [set.lo, set.mid(), set.hi] {
                    let w = l.map.apply(chart.to_plane(x)).map_err(|_| Error::PoleInDomain { letter: i, set: j })?;
                    if chart.off_chart(w) > tol {
                        return invalid(format!("letter {i} leaves the chart curve on base set {j}"));
                    }
                    let y = chart.from_plane(w, target.mid());
                    if !target.contains(y, tol) {
                        return invalid(format!("letter {i} does not map base set {j} into base set {}", l.target));
                    }
                }
            }
        }
        for (b, t) in sys.tails.iter().enumerate() {
            check_indices(t.target, &t.sources, &format!("tail {b}"))?;
            t.law.validated()?;
            if !sys.base_sets[t.target].contains(t.accumulation, MARKOV_TOL) {
                return invalid(format!("tail {b} accumulates outside its target set"));
            }
        }
        let nsym = sys.symbol_count();
        sys.successors = (0..nsym)
            .map(|a| (0..nsym).filter(|&b| sys.symbol_sources(a).contains(&sys.symbol_target(b))).collect())
            .collect();
        sys.osc_overlaps = sys.open_set_overlaps();
        sys.contraction = sys.find_contraction();
        if let Some(c) = &sys.contraction {
            sys.log_distortion = sys.distortion_lipschitz() * sys.max_width() * c.norm_series();
        }
        Ok(sys)
    }

    /// Affine maps `x ↦ r_i x + t_i` on `[0, 1]`.
    pub fn similarity(maps: &[(f64, f64)]) -> Result<Self> {
        let letters = maps
            .iter()
            .map(|&(r, t)| Ok(Branch { map: MoebiusMap::affine(r, t)?, target: 0, sources: vec![0] }))
            .collect::<Result<Vec<_>>>()?;
        Self::new(Chart::Line, vec![BaseSet::new(0.0, 1.0)], letters, Vec::new())
    }

    /// Möbius maps of a single interval `[lo, hi]` into itself.
    pub fn interval(maps: &[MoebiusMap], lo: f64, hi: f64) -> Result<Self> {
        let letters = maps.iter().map(|&map| Branch { map, target: 0, sources: vec![0] }).collect();
        Self::new(Chart::Line, vec![BaseSet::new(lo, hi)], letters, Vec::new())
    }

    /// Continued-fraction branches `x ↦ 1/(k + x)` on `[0, 1]`.
    pub fn continued_fraction(digits: &[u64]) -> Result<Self> {
        let maps = digits.iter().map(|&k| gauss_branch(k)).collect::<Result<Vec<_>>>()?;
        Self::interval(&maps, 0.0, 1.0)
    }

    /// Gauss branches `1/(k + x)` for `k ≤ head` plus the parabolic tail
    /// `k > head` with `‖φ'_k‖ ≍ k^{-2}`. Lebesgue measure is conformal at
    /// exponent 1, so the dimension is 1.
    pub fn gauss_parabolic(head: u64) -> Result<Self> {
        let h = head as f64;
        let lower = ((h + 1.0) / (h + 2.0)) * ((h + 1.0) / (h + 2.0));
        let law = TailLaw::parabolic(lower, 1.0, head + 1)?;
        let digits: Vec<u64> = (1..=head).collect();
        let maps = digits.iter().map(|&k| gauss_branch(k)).collect::<Result<Vec<_>>>()?;
        let letters = maps.into_iter().map(|map| Branch { map, target: 0, sources: vec![0] }).collect();
        let tail = TailBranch { law, target: 0, sources: vec![0], accumulation: 0.0 };
        Self::new(Chart::Line, vec![BaseSet::new(0.0, 1.0)], letters, vec![tail])
    }

    /// Dyadic-block model of a doubly infinite chain of cusps: the blocks
    /// `[1 - 2^{-n}, 1 - 2^{-n-1}]` (`n ≥ 1`) and their mirrors
    /// `[2^{-n-1}, 2^{-n}]` each carry a rescaled copy of the Gauss system, so
    /// `‖φ'_{n,k}‖ = 2^{-|n|-1} k^{-2}`. Levels up to `levels` keep `head`
    /// explicit letters and a per-block tail; deeper levels form one tail per
    /// side. The blocks tile `(0, 1)`, so the dimension is 1.
    pub fn dyadic_parabolic(levels: u32, head: u64) -> Result<Self> {
        if levels == 0 || head == 0 {
            return Err(Error::InvalidArgument("dyadic model needs levels ≥ 1 and head ≥ 1".into()));
        }
        let kf = (head + 1) as f64;
        let ratio = (kf / (kf + 1.0)) * (kf / (kf + 1.0));
        let mut letters = Vec::new();
        let mut tails = Vec::new();
        for n in 1..=levels {
            let scale = math::powf(2.0, -(n as f64) - 1.0);
            for start in [1.0 - 2.0 * scale, scale] {
                for k in 1..=head {
                    // start + scale/(k + x)
                    let kk = k as f64;
                    let map = MoebiusMap::real(start, start * kk + scale, 1.0, kk)?;
                    letters.push(Branch { map, target: 0, sources: vec![0] });
                }
                let law = TailLaw::parabolic(scale * ratio, scale, head + 1)?;
                tails.push(TailBranch { law, target: 0, sources: vec![0], accumulation: start });
            }
        }
        // All levels n > `levels`, k ≥ 1, on each side: 2^{-n-1} k^{-2} ≥ ‖φ'‖ ≥ 2^{-n-1} (k+1)^{-2}.
        let deep = crate::tail::TailLaw {
            levels: crate::tail::Levels::Dyadic { from: levels + 1, to: None },
            ..TailLaw::parabolic(0.5 * 0.25, 0.5, 1)?
        }
        .validated()?;
        tails.push(TailBranch { law: deep, target: 0, sources: vec![0], accumulation: 1.0 });
        tails.push(TailBranch { law: deep, target: 0, sources: vec![0], accumulation: 0.0 });
        Self::new(Chart::Line, vec![BaseSet::new(0.0, 1.0)], letters, tails)
    }

    /// The boundary system of a Schottky or reflection group: base sets are
    /// the arcs cut out by the letters' target disks, letter `i` acts on every
    /// arc except the one of its inverse (for reflections: except its own).
    pub fn from_schottky(group: &GroupPresentation) -> Result<Self> {
        let mut base_sets = Vec::with_capacity(group.letters().len());
        for l in group.letters() {
            let (mid, half) = l.target.unit_arc()?;
            base_sets.push(BaseSet::new(mid - half, mid + half));
        }
        let n = group.letters().len();
        let letters = group
            .letters()
            .iter()
            .enumerate()
            .map(|(i, l)| {
                let excluded = match group.kind() {
                    GroupKind::SchottkyFree => l.inverse,
                    GroupKind::Reflection => i,
                };
                Branch { map: l.map, target: i, sources: (0..n).filter(|&j| j != excluded).collect() }
            })
            .collect();
        Self::new(Chart::Circle, base_sets, letters, Vec::new())
    }

    /// `h φ h^{-1}` on the image arcs, for circle systems without tails and
    /// `h` a conformal automorphism of the disk.
    pub fn conjugated(&self, h: &MoebiusMap) -> Result<Self> {
        if self.chart != Chart::Circle || !self.tails.is_empty() || !h.is_conformal() {
            return Err(Error::InvalidArgument("conjugation needs a finite circle system and a conformal map".into()));
        }
        if !h.preserves_unit_circle(16, 1e-12) {
            return Err(Error::NotAnIsometry("conjugating map does not preserve the unit circle".into()));
        }
        let hinv = h.inverse();
        let mut base_sets = Vec::with_capacity(self.base_sets.len());
        for b in &self.base_sets {
            let mid = Chart::Circle.from_plane(h.apply(Chart::Circle.to_plane(b.mid()))?, 0.0);
            let lo = Chart::Circle.from_plane(h.apply(Chart::Circle.to_plane(b.lo))?, mid);
            let hi = Chart::Circle.from_plane(h.apply(Chart::Circle.to_plane(b.hi))?, mid);
            base_sets.push(BaseSet::new(lo.min(hi), lo.max(hi)));
        }
        let letters = self
            .letters
            .iter()
            .map(|l| Branch { map: h.compose(&l.map).compose(&hinv), target: l.target, sources: l.sources.clone() })
            .collect();
        Self::new(Chart::Circle, base_sets, letters, Vec::new())
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn base_sets(&self) -> &[BaseSet] {
        &self.base_sets
    }

    pub fn letters(&self) -> &[Branch] {
        &self.letters
    }

    pub fn tails(&self) -> &[TailBranch] {
        &self.tails
    }

    pub fn is_finite(&self) -> bool {
        self.tails.is_empty()
    }

    /// Pairs of head letters with a common target whose images overlap in
    /// their interiors (open set condition failures; advisory only).
    pub fn osc_overlaps(&self) -> &[(usize, usize)] {
        &self.osc_overlaps
    }

    pub fn contraction(&self) -> Result<&Contraction> {
        self.contraction.as_ref().ok_or_else(|| {
            Error::NotContracting(format!(
                "no admissible iterate of length ≤ {CONTRACTION_MAX_LEVEL} has all derivative norms below 1"
            ))
        })
    }

    /// `ln K` where `|φ'_ω(x)| ≤ K |φ'_ω(y)|` for `x, y` in a common base set.
    pub fn log_distortion(&self) -> Result<f64> {
        self.contraction()?;
        Ok(self.log_distortion)
    }

    /// Head letters and tails together: symbols `0..letters`, then the tails.
    pub(crate) fn symbol_count(&self) -> usize {
        self.letters.len() + self.tails.len()
    }

    pub(crate) fn symbol_target(&self, s: usize) -> usize {
        match s.checked_sub(self.letters.len()) {
            None => self.letters[s].target,
            Some(t) => self.tails[t].target,
        }
    }

    pub(crate) fn symbol_sources(&self, s: usize) -> &[usize] {
        match s.checked_sub(self.letters.len()) {
            None => &self.letters[s].sources,
            Some(t) => &self.tails[t].sources,
        }
    }

    /// Whether `b` may follow `a` in a word.
    pub fn admissible(&self, a: usize, b: usize) -> bool {
        self.symbol_sources(a).contains(&self.symbol_target(b))
    }

    /// Image of a parameter value under a head letter.
    pub fn apply_letter(&self, letter: usize, x: f64) -> Result<f64> {
        let l = &self.letters[letter];
        self.apply_map(&l.map, l.target, x)
    }

    fn apply_map(&self, map: &MoebiusMap, target: usize, x: f64) -> Result<f64> {
        let w = map.apply(self.chart.to_plane(x))?;
        Ok(self.chart.from_plane(w, self.base_sets[target].mid()))
    }

    /// Exact `(inf, sup)` of `|φ'|` over a base set, or `None` when the pole
    /// of `φ` lies in the set.
    pub(crate) fn derivative_range(&self, map: &MoebiusMap, set: &BaseSet) -> Option<(f64, f64)> {
        let [_, _, c, d] = map.coefficients();
        let q = |x: f64| {
            let z = self.chart.to_plane(x);
            let w = if map.orientation() == Orientation::Anticonformal { z.conj() } else { z };
            (c * w + d).norm_sqr()
        };
        let (mut fmin, mut fmax) = {
            let (a, b) = (q(set.lo), q(set.hi));
            (a.min(b), a.max(b))
        };
        match self.chart {
            Chart::Line => {
                let cc = c.norm_sqr();
                if cc > 0.0 {
                    let vertex = -(c * d.conj()).re / cc;
                    if set.lo < vertex && vertex < set.hi {
                        fmin = fmin.min(q(vertex));
                    }
                }
            }
            Chart::Circle => {
                // |c w + d|² = |c|² + |d|² + 2|c d̄| cos(±θ + arg(c d̄)).
                let psi = (c * d.conj()).arg();
                let s = if map.orientation() == Orientation::Anticonformal { -1.0 } else { 1.0 };
                let at_max = -s * psi;
                let at_min = PI - s * psi;
                if angle_in(at_min, set) {
                    let m = c.norm() - d.norm();
                    fmin = fmin.min(m * m);
                }
                if angle_in(at_max, set) {
                    let m = c.norm() + d.norm();
                    fmax = fmax.max(m * m);
                }
            }
        }
        let scale = c.norm_sqr() + d.norm_sqr();
        if !(fmin > 1e-28 * scale) {
            return None;
        }
        Some((1.0 / fmax, 1.0 / fmin))
    }

    fn sup_over(&self, map: &MoebiusMap, sets: &[usize]) -> f64 {
        sets.iter()
            .map(|&j| self.derivative_range(map, &self.base_sets[j]).map_or(f64::INFINITY, |r| r.1))
            .fold(0.0, f64::max)
    }

    pub fn check_word(&self, word: &[usize]) -> Result<()> {
        if word.is_empty() {
            return Err(Error::InadmissibleWord("empty word".into()));
        }
        if let Some(&bad) = word.iter().find(|&&l| l >= self.letters.len()) {
            return Err(Error::InadmissibleWord(format!("letter {bad} is not a head letter")));
        }
        for (k, w) in word.windows(2).enumerate() {
            if !self.admissible(w[0], w[1]) {
                return Err(Error::InadmissibleWord(format!("{} cannot follow {} at position {}", w[1], w[0], k + 1)));
            }
        }
        Ok(())
    }

    /// `φ_ω = φ_{ω_1} ∘ … ∘ φ_{ω_n}`; it acts on `sources(ω_n)` and lands in
    /// `target(ω_1)`.
    pub fn cylinder_map(&self, word: &[usize]) -> Result<MoebiusMap> {
        self.check_word(word)?;
        Ok(word.iter().fold(MoebiusMap::identity(), |acc, &l| acc.compose(&self.letters[l].map)))
    }

    /// `sup |φ'_ω|` over the source sets of the last letter.
    pub fn derivative_norm(&self, word: &[usize]) -> Result<f64> {
        let map = self.cylinder_map(word)?;
        let last = *word.last().expect("checked nonempty");
        let mut sup = 0.0f64;
        for &j in &self.letters[last].sources {
            let r =
                self.derivative_range(&map, &self.base_sets[j]).ok_or(Error::PoleInDomain { letter: last, set: j })?;
            sup = sup.max(r.1);
        }
        Ok(sup)
    }

    /// Depth-first enumeration of admissible symbol words of lengths
    /// `1..=n_max`.
    pub(crate) fn walk_words(&self, n_max: usize, visit: &mut dyn FnMut(&WordNode) -> Result<()>) -> Result<()> {
        let mut counts = vec![0u32; self.tails.len()];
        for s in 0..self.symbol_count() {
            self.descend(s, s, 1, None, 1.0, 0, &mut counts, n_max, visit)?;
        }
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn descend(
        &self,
        first: usize,
        s: usize,
        len: usize,
        open: Option<MoebiusMap>,
        closed: f64,
        closed_segments: u32,
        counts: &mut [u32],
        n_max: usize,
        visit: &mut dyn FnMut(&WordNode) -> Result<()>,
    ) -> Result<()> {
        let nl = self.letters.len();
        let (open, closed, segments) = if s < nl {
            let m = &self.letters[s].map;
            (Some(open.map_or(*m, |o| o.compose(m))), closed, closed_segments)
        } else {
            counts[s - nl] += 1;
            match open {
                Some(o) => {
                    let target = &self.base_sets[self.tails[s - nl].target];
                    let sup = self.derivative_range(&o, target).map_or(f64::INFINITY, |r| r.1);
                    (None, closed * sup, closed_segments + 1)
                }
                None => (None, closed, closed_segments),
            }
        };
        let node = WordNode { len, first, last: s, open, closed, closed_segments: segments, tail_counts: counts };
        visit(&node)?;
        if len < n_max {
            for &b in &self.successors[s] {
                self.descend(first, b, len + 1, open, closed, segments, counts, n_max, visit)?;
            }
        }
        if s >= nl {
            counts[s - nl] -= 1;
        }
        Ok(())
    }

    /// Upper bound on `‖φ'_ω‖` for the word ending at `node`, tails counted
    /// with `weights[b]` each (already raised to the power `sigma`).
    pub(crate) fn node_upper(&self, node: &WordNode, sigma: f64, weights: &[f64]) -> f64 {
        let mut v = math::powf(node.closed, sigma);
        for (c, w) in node.tail_counts.iter().zip(weights) {
            for _ in 0..*c {
                v *= w;
            }
        }
        if let Some(o) = &node.open {
            v *= math::powf(self.sup_over(o, self.symbol_sources(node.last)), sigma);
        }
        v
    }

    /// `ψ_n(σ) = Σ_{|ω| = n} ‖φ'_ω‖^σ`; tails enter through their upper
    /// envelopes. `+∞` when a tail sum diverges at `sigma`.
    pub fn psi_n(&self, sigma: f64, n: usize) -> Result<f64> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be at least 1".into()));
        }
        let weights: Vec<f64> = self.tails.iter().map(|t| t.law.sum(sigma, Bound::Upper)).collect();
        if weights.iter().any(|w| !w.is_finite()) {
            return Ok(f64::INFINITY);
        }
        let mut total = 0.0;
        self.walk_words(n, &mut |node| {
            if node.len == n {
                total += self.node_upper(node, sigma, &weights);
            }
            Ok(())
        })?;
        Ok(total)
    }

    pub fn theta_number(&self) -> Theta {
        if self.tails.is_empty() {
            return Theta { value: f64::NEG_INFINITY, regular: true };
        }
        let value = self.tails.iter().map(|t| t.law.theta()).fold(f64::NEG_INFINITY, f64::max);
        let regular = self.tails.iter().any(|t| (t.law.theta() - value).abs() < 1e-15 && t.law.diverges_at_theta());
        Theta { value, regular }
    }

    /// One point per admissible word of length `depth` over the first
    /// `tail_cut` head letters: the midpoint of the cylinder image.
    pub fn limit_set_sample(&self, depth: usize, tail_cut: usize) -> Result<Vec<f64>> {
        if depth == 0 {
            return Err(Error::InvalidArgument("depth must be at least 1".into()));
        }
        let used = self.letters.len().min(tail_cut);
        let mut out = Vec::new();
        let mut stack: Vec<(usize, usize, MoebiusMap, usize)> =
            (0..used).rev().map(|l| (l, l, self.letters[l].map, 1)).collect();
        while let Some((first, last, map, len)) = stack.pop() {
            if len == depth {
                let target = self.letters[first].target;
                let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
                for &j in &self.letters[last].sources {
                    let b = self.base_sets[j];
                    for x in [b.lo, b.hi] {
                        let y = self.apply_map(&map, target, x)?;
                        lo = lo.min(y);
                        hi = hi.max(y);
                    }
                }
                out.push(0.5 * (lo + hi));
                continue;
            }
            for &b in self.successors[last].iter().rev() {
                if b < used {
                    stack.push((first, b, map.compose(&self.letters[b].map), len + 1));
                }
            }
        }
        Ok(out)
    }

    fn max_width(&self) -> f64 {
        self.base_sets.iter().map(BaseSet::width).fold(0.0, f64::max)
    }

    /// `max sup |(ln |φ'|)'| = 2|c| sup 1/|c w + d|` over letters and sources.
    fn distortion_lipschitz(&self) -> f64 {
        let mut l = 0.0f64;
        for b in &self.letters {
            let c = b.map.coefficients()[2].norm();
            let sup = self.sup_over(&b.map, &b.sources);
            l = l.max(2.0 * c * math::sqrt(sup));
        }
        l
    }

    fn find_contraction(&self) -> Option<Contraction> {
        let tail_max: Vec<f64> = self.tails.iter().map(|t| t.law.max_norm()).collect();
        let mut norms = vec![1.0];
        let mut level_size = self.symbol_count();
        for level in 1..=CONTRACTION_MAX_LEVEL {
            if level > 1 && level_size > CONTRACTION_BUDGET {
                return None;
            }
            let mut q = 0.0f64;
            let mut count = 0usize;
            self.walk_words(level, &mut |node| {
                if node.len == level {
                    q = q.max(self.node_upper(node, 1.0, &tail_max));
                    count += 1;
                }
                Ok(())
            })
            .ok()?;
            norms.push(q);
            if q < 1.0 {
                return Some(Contraction { level, norms });
            }
            level_size = count * self.symbol_count();
        }
        None
    }

    fn open_set_overlaps(&self) -> Vec<(usize, usize)> {
        let hulls: Vec<(f64, f64)> = self
            .letters
            .iter()
            .map(|l| {
                let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
                for &j in &l.sources {
                    let b = self.base_sets[j];
                    for x in [b.lo, b.hi] {
                        if let Ok(y) = self.apply_map(&l.map, l.target, x) {
                            lo = lo.min(y);
                            hi = hi.max(y);
                        }
                    }
                }
                (lo, hi)
            })
            .collect();
        let mut out = Vec::new();
        for i in 0..self.letters.len() {
            for k in i + 1..self.letters.len() {
                if self.letters[i].target != self.letters[k].target {
                    continue;
                }
                let overlap = hulls[i].1.min(hulls[k].1) - hulls[i].0.max(hulls[k].0);
                if overlap > OSC_TOL {
                    out.push((i, k));
                }
            }
        }
        out
    }
}

fn gauss_branch(k: u64) -> Result<MoebiusMap> {
    if k == 0 {
        return Err(Error::InvalidArgument("continued-fraction digits start at 1".into()));
    }
    MoebiusMap::real(0.0, 1.0, 1.0, k as f64)
}

/// Whether the angle `t` (mod 2π) lies strictly inside the arc.
fn angle_in(t: f64, set: &BaseSet) -> bool {
    let two_pi = 2.0 * PI;
    let r = t - set.lo;
    let shifted = set.lo + (r - two_pi * math::floor(r / two_pi));
    shifted > set.lo && shifted < set.hi
}

/// Box-counting slope of a one-dimensional point set: least squares of
/// `ln N(ε)` against `ln(1/ε)`, `N(ε)` the number of occupied grid cells.
pub fn box_dimension_estimate(points: &[f64], scales: &[f64]) -> Result<DimensionResult> {
    if points.len() < 100 {
        return Err(Error::InsufficientData(format!("{} points, need at least 100", points.len())));
    }
    if scales.len() < 4 || scales.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::InsufficientData("need at least 4 positive scales".into()));
    }
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let mut xs = Vec::with_capacity(scales.len());
    let mut ys = Vec::with_capacity(scales.len());
    for &eps in scales {
        let mut count = 0usize;
        let mut prev = None;
        for &p in &sorted {
            let cell = math::floor(p / eps);
            if prev != Some(cell) {
                count += 1;
                prev = Some(cell);
            }
        }
        xs.push(-math::ln(eps));
        ys.push(math::ln(count as f64));
    }
    let fit = line_fit(&xs, &ys).ok_or_else(|| Error::InsufficientData("scales are not distinct".into()))?;
    let se = fit.slope_stderr;
    Ok(DimensionResult::new(fit.slope, (fit.slope - se, fit.slope + se), "box-counting slope", se))
}
