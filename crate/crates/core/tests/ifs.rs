use cifs_core::group::GroupPresentation;
use cifs_core::ifs::{box_dimension_estimate, BaseSet, Branch, Chart, IfsSystem};
use cifs_core::pressure::bowen_dimension;
use cifs_core::tail::{TailBranch, TailLaw};
use cifs_core::{Error, MoebiusMap};
use proptest::prelude::*;

fn cantor() -> IfsSystem {
    IfsSystem::similarity(&[(1.0 / 3.0, 0.0), (1.0 / 3.0, 2.0 / 3.0)]).unwrap()
}

fn schottky(r: f64) -> IfsSystem {
    IfsSystem::from_schottky(&GroupPresentation::symmetric_schottky(r).unwrap()).unwrap()
}

/// Admissible word of length `n` built greedily from a stream of choices.
fn admissible_word(sys: &IfsSystem, choices: &[usize], n: usize) -> Vec<usize> {
    let k = sys.letters().len();
    let mut word = vec![choices[0] % k];
    for &c in &choices[1..] {
        if word.len() == n {
            break;
        }
        let last = *word.last().unwrap();
        let next = (0..k).map(|j| (c + j) % k).find(|&b| sys.admissible(last, b)).unwrap();
        word.push(next);
    }
    word
}

/// Brute-force `sup |φ'|` over the source arcs of the last letter.
fn sampled_sup(sys: &IfsSystem, word: &[usize], samples: usize) -> f64 {
    let map = sys.cylinder_map(word).unwrap();
    let last = *word.last().unwrap();
    let mut best = 0.0f64;
    for &j in &sys.letters()[last].sources {
        let b = sys.base_sets()[j];
        for i in 0..samples {
            let x = b.lo + (b.hi - b.lo) * i as f64 / (samples - 1) as f64;
            best = best.max(map.derivative_modulus(sys.chart().to_plane(x)).unwrap());
        }
    }
    best
}

#[test]
fn single_letter_norm() {
    let s = IfsSystem::similarity(&[(1.0 / 3.0, 0.0)]).unwrap();
    assert!((s.derivative_norm(&[0]).unwrap() - 1.0 / 3.0).abs() < 1e-15);
    assert!((s.derivative_norm(&[0, 0, 0]).unwrap() - 1.0 / 27.0).abs() < 1e-16);
}

#[test]
fn schottky_word_norm_matches_dense_sampling() {
    let s = schottky(0.3);
    let word = admissible_word(&s, &[0, 2, 2, 1, 3, 3, 0, 2, 1, 1], 10);
    assert_eq!(word.len(), 10);
    let exact = s.derivative_norm(&word).unwrap();
    let sampled = sampled_sup(&s, &word, 1000);
    assert!((exact - sampled).abs() <= 1e-9 * exact, "{exact} vs {sampled}");
}

#[test]
fn inadmissible_words_are_rejected() {
    let s = schottky(0.3);
    // letter 1 is the inverse of letter 0
    assert!(matches!(s.cylinder_map(&[0, 1]), Err(Error::InadmissibleWord(_))));
    assert!(matches!(s.cylinder_map(&[]), Err(Error::InadmissibleWord(_))));
    assert!(matches!(s.cylinder_map(&[9]), Err(Error::InadmissibleWord(_))));
}

#[test]
fn cantor_sample_midpoints() {
    let pts = cantor().limit_set_sample(2, usize::MAX).unwrap();
    let expected: Vec<f64> = [1.0, 5.0, 13.0, 17.0].iter().map(|k| k / 18.0).collect();
    for (p, e) in pts.iter().zip(&expected) {
        assert!((p - e).abs() < 1e-15);
    }
}

#[test]
fn sample_recursion_stays_close() {
    // depth n+1 sample lies within s·diam(X)·s^n of ∪ φ_i(depth-n sample).
    for sys in [cantor(), IfsSystem::similarity(&[(0.25, 0.0), (0.25, 0.375), (0.25, 0.75)]).unwrap()] {
        let s: f64 = sys
            .letters()
            .iter()
            .map(|l| sys.derivative_norm(&[0]).unwrap().max(l.map.derivative_modulus(0.0.into()).unwrap()))
            .fold(0.0, f64::max);
        for n in 1..6 {
            let prev = sys.limit_set_sample(n, usize::MAX).unwrap();
            let images: Vec<f64> = (0..sys.letters().len())
                .flat_map(|i| prev.iter().map(move |&x| (i, x)))
                .map(|(i, x)| sys.apply_letter(i, x).unwrap())
                .collect();
            let bound = s * s.powi(n as i32) + 1e-14;
            for p in sys.limit_set_sample(n + 1, usize::MAX).unwrap() {
                let d = images.iter().map(|y| (y - p).abs()).fold(f64::INFINITY, f64::min);
                assert!(d <= bound, "n = {n}: {d} > {bound}");
            }
        }
    }
}

#[test]
fn parabolic_tail_partition_sum() {
    let s = IfsSystem::gauss_parabolic(20).unwrap();
    assert!(s.psi_n(0.5, 1).unwrap().is_infinite());
    // Head sup |φ_k'|^{3/4} = k^{-3/2}; the tail envelope is k^{-3/2} as well.
    let n = 1_000_000u64;
    let direct: f64 = (1..=n).map(|k| (k as f64).powf(-1.5)).sum();
    let remainder = 2.0 / (n as f64 + 0.5).sqrt();
    let psi = s.psi_n(0.75, 1).unwrap();
    assert!((psi - (direct + remainder)).abs() < 1e-6, "{psi} vs {}", direct + remainder);
    // ζ(3/2)
    assert!((psi - 2.612_375_348_685_488).abs() < 1e-12);
}

#[test]
fn theta_numbers() {
    let finite = cantor().theta_number();
    assert_eq!(finite.value, f64::NEG_INFINITY);
    assert!(finite.regular);

    let gauss = IfsSystem::gauss_parabolic(10).unwrap().theta_number();
    assert_eq!(gauss.value, 0.5);
    assert!(gauss.regular);

    let cubic = TailLaw { k_power: 3.0, ..TailLaw::parabolic(0.5, 1.0, 3).unwrap() }.validated().unwrap();
    let letters = [1.0, 2.0]
        .iter()
        .map(|&k| Branch { map: MoebiusMap::real(0.0, 1.0, 1.0, k).unwrap(), target: 0, sources: vec![0] })
        .collect();
    let tail = TailBranch { law: cubic, target: 0, sources: vec![0], accumulation: 0.0 };
    let sys = IfsSystem::new(Chart::Line, vec![BaseSet::new(0.0, 1.0)], letters, vec![tail]).unwrap();
    let theta = sys.theta_number();
    assert!((theta.value - 1.0 / 3.0).abs() < 1e-15);
    assert!(theta.regular);
    assert!(sys.psi_n(1.0 / 3.0, 1).unwrap().is_infinite());
    assert!(sys.psi_n(0.34, 1).unwrap().is_finite());
}

#[test]
fn box_dimension_examples() {
    let cantor_pts = cantor().limit_set_sample(10, usize::MAX).unwrap();
    let scales: Vec<f64> = (2..=12).map(|k| 2f64.powi(-k)).collect();
    let d = box_dimension_estimate(&cantor_pts, &scales).unwrap();
    assert!((d.value - 2f64.ln() / 3f64.ln()).abs() < 0.03, "{d:?}");

    let line: Vec<f64> = (0..20_000).map(|i| i as f64 / 20_000.0).collect();
    let d = box_dimension_estimate(&line, &scales).unwrap();
    assert!((d.value - 1.0).abs() < 0.02, "{d:?}");

    let point = vec![0.3; 200];
    assert_eq!(box_dimension_estimate(&point, &scales).unwrap().value, 0.0);

    assert!(matches!(box_dimension_estimate(&line[..50], &scales), Err(Error::InsufficientData(_))));
    assert!(matches!(box_dimension_estimate(&line, &scales[..3]), Err(Error::InsufficientData(_))));
}

#[test]
fn schottky_box_count_matches_bowen() {
    let s = schottky(0.1);
    let pts = s.limit_set_sample(12, usize::MAX).unwrap();
    let scales: Vec<f64> = (5..=20).map(|k| 2f64.powi(-2 * k)).collect();
    let boxed = box_dimension_estimate(&pts, &scales).unwrap();
    let bowen = bowen_dimension(&s).unwrap();
    assert!((boxed.value - bowen.value).abs() < 0.03, "{} vs {}", boxed.value, bowen.value);
}

#[test]
fn open_set_condition_warnings() {
    assert!(cantor().osc_overlaps().is_empty());
    let overlapping = IfsSystem::similarity(&[(0.6, 0.0), (0.6, 0.4)]).unwrap();
    assert_eq!(overlapping.osc_overlaps(), &[(0, 1)]);
}

#[test]
fn construction_errors() {
    let pole_inside = MoebiusMap::real(0.0, 1.0, 1.0, -0.5).unwrap();
    assert!(matches!(IfsSystem::interval(&[pole_inside], 0.0, 1.0), Err(Error::PoleInDomain { .. })));
    let outside = MoebiusMap::affine(0.5, 0.8).unwrap();
    assert!(IfsSystem::interval(&[outside], 0.0, 1.0).is_err());
    let expanding = IfsSystem::similarity(&[(1.0, 0.0)]).unwrap();
    assert!(matches!(expanding.contraction(), Err(Error::NotContracting(_))));
}

#[test]
fn continued_fraction_needs_two_steps_to_contract() {
    // |d/dx 1/(1+x)| = 1 at x = 0, so level one is not contracting.
    let s = IfsSystem::continued_fraction(&[1, 2]).unwrap();
    let c = s.contraction().unwrap();
    assert_eq!(c.level, 2);
    assert_eq!(c.norms[1], 1.0);
    assert!(c.ratio() < 1.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norms_are_submultiplicative(choices in prop::collection::vec(0usize..4, 12), split in 1usize..11, r in 0.05..0.8f64) {
        let s = schottky(r);
        let word = admissible_word(&s, &choices, 12);
        let (a, b) = word.split_at(split);
        let whole = s.derivative_norm(&word).unwrap();
        prop_assert!(whole <= s.derivative_norm(a).unwrap() * s.derivative_norm(b).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn cylinder_maps_compose(choices in prop::collection::vec(0usize..4, 8), split in 1usize..7, x in 0.0..1.0f64) {
        let s = schottky(0.4);
        let word = admissible_word(&s, &choices, 8);
        let (a, b) = word.split_at(split);
        let whole = s.cylinder_map(&word).unwrap();
        let parts = s.cylinder_map(a).unwrap().compose(&s.cylinder_map(b).unwrap());
        prop_assert!(whole.approx_eq(&parts, 1e-9));
        // chain rule at a point of the last source arc
        let last = *word.last().unwrap();
        let arc = s.base_sets()[s.letters()[last].sources[0]];
        let z = s.chart().to_plane(arc.lo + x * arc.width());
        let inner = s.cylinder_map(b).unwrap();
        let lhs = whole.derivative_modulus(z).unwrap();
        let rhs = s.cylinder_map(a).unwrap().derivative_modulus(inner.apply(z).unwrap()).unwrap() * inner.derivative_modulus(z).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * rhs);
    }

    #[test]
    fn cylinder_images_are_nested(choices in prop::collection::vec(0usize..4, 7)) {
        let s = schottky(0.3);
        let word = admissible_word(&s, &choices, 7);
        let hull = |w: &[usize]| {
            let map = s.cylinder_map(w).unwrap();
            let target = s.base_sets()[s.letters()[w[0]].target];
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for &j in &s.letters()[*w.last().unwrap()].sources {
                let b = s.base_sets()[j];
                for x in [b.lo, b.mid(), b.hi] {
                    let y = s.chart().from_plane(map.apply(s.chart().to_plane(x)).unwrap(), target.mid());
                    lo = lo.min(y);
                    hi = hi.max(y);
                }
            }
            (lo, hi)
        };
        for n in 2..=word.len() {
            let (lo, hi) = hull(&word[..n]);
            let (plo, phi) = hull(&word[..n - 1]);
            prop_assert!(lo >= plo - 1e-12 && hi <= phi + 1e-12, "{:?} ⊄ {:?}", (lo, hi), (plo, phi));
        }
    }
}
