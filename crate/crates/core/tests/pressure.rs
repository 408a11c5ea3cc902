use cifs_core::group::GroupPresentation;
use cifs_core::ifs::{BaseSet, Chart, IfsSystem};
use cifs_core::pressure::{
    bowen_dimension, bowen_dimension_with, pressure_direct, regularity_check, transfer_eigenvalue, BowenOptions,
    Regularity,
};
use cifs_core::tail::{TailBranch, TailLaw};
use cifs_core::{Complex, Error, MoebiusMap};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn schottky(r: f64) -> IfsSystem {
    IfsSystem::from_schottky(&GroupPresentation::symmetric_schottky(r).unwrap()).unwrap()
}

fn finite_systems() -> Vec<(&'static str, IfsSystem)> {
    vec![
        ("schottky 0.3", schottky(0.3)),
        ("schottky 0.6", schottky(0.6)),
        ("schottky 0.9", schottky(0.9)),
        ("cf 1,2", IfsSystem::continued_fraction(&[1, 2]).unwrap()),
        ("cf 2,3,5", IfsSystem::continued_fraction(&[2, 3, 5]).unwrap()),
    ]
}

/// Root of `r1^s + r2^s = 1` by safeguarded Newton iteration.
fn moran_root(r1: f64, r2: f64) -> f64 {
    let f = |s: f64| r1.powf(s) + r2.powf(s) - 1.0;
    let df = |s: f64| r1.powf(s) * r1.ln() + r2.powf(s) * r2.ln();
    let (mut lo, mut hi, mut s) = (0.0, 1.0, 0.5);
    for _ in 0..100 {
        let next = s - f(s) / df(s);
        s = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
        if f(s) > 0.0 {
            lo = s;
        } else {
            hi = s;
        }
        if hi - lo < 1e-15 || f(s).abs() < 1e-16 {
            break;
        }
    }
    s
}

#[test]
fn moran_sweep_matches_scalar_root() {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_611);
    for _ in 0..50 {
        let r1: f64 = rng.gen_range(0.02..0.6);
        let r2 = rng.gen_range(0.02..(0.98 - r1).min(0.6));
        let sys = IfsSystem::similarity(&[(r1, 0.0), (r2, 1.0 - r2)]).unwrap();
        let d = bowen_dimension(&sys).unwrap();
        let s = moran_root(r1, r2);
        assert!((d.value - s).abs() < 1e-8, "r = ({r1}, {r2}): {} vs {s}", d.value);
    }
}

#[test]
fn direct_bracket_contains_spectral_value() {
    for (name, sys) in finite_systems() {
        for k in 0..10 {
            let sigma = 0.05 + 0.1 * k as f64;
            let direct = pressure_direct(&sys, sigma, 10).unwrap();
            let spectral = transfer_eigenvalue(&sys, sigma, 24).unwrap().value;
            let (lo, hi) = direct.bracket;
            assert!(lo <= spectral && spectral <= hi, "{name} σ = {sigma}: {spectral} ∉ [{lo}, {hi}]");
        }
    }
}

#[test]
fn collocation_size_converges() {
    for (name, sys) in finite_systems() {
        let a = bowen_dimension_with(&sys, &BowenOptions { size: 16, tolerance: 1e-12 }).unwrap();
        let b = bowen_dimension_with(&sys, &BowenOptions { size: 32, tolerance: 1e-12 }).unwrap();
        assert!((a.value - b.value).abs() < 1e-8, "{name}: {} vs {}", a.value, b.value);
    }
}

#[test]
fn pressure_is_strictly_decreasing() {
    for (name, sys) in finite_systems() {
        let values: Vec<f64> = (0..=20).map(|k| transfer_eigenvalue(&sys, 0.1 * k as f64, 24).unwrap().value).collect();
        for w in values.windows(2) {
            assert!(w[1] < w[0], "{name}: {values:?}");
        }
    }
}

#[test]
fn relabelling_letters_keeps_the_dimension() {
    let maps = [(0.2, 0.0), (0.3, 0.35), (0.25, 0.75)];
    let a = bowen_dimension(&IfsSystem::similarity(&maps).unwrap()).unwrap();
    let b = bowen_dimension(&IfsSystem::similarity(&[maps[2], maps[0], maps[1]]).unwrap()).unwrap();
    assert!((a.value - b.value).abs() < 1e-9);
}

#[test]
fn conjugation_keeps_the_dimension() {
    let sys = schottky(0.4);
    let base = bowen_dimension(&sys).unwrap().value;
    for (x, y) in [(0.1, 0.0), (0.0, -0.2), (0.15, 0.1)] {
        let a = Complex::new(x, y);
        let h = MoebiusMap::conformal(Complex::new(1.0, 0.0), -a, -a.conj(), Complex::new(1.0, 0.0)).unwrap();
        let moved = bowen_dimension(&sys.conjugated(&h).unwrap()).unwrap().value;
        assert!((moved - base).abs() < 1e-9, "{moved} vs {base}");
    }
}

#[test]
fn adding_a_letter_increases_the_dimension() {
    let two = bowen_dimension(&IfsSystem::continued_fraction(&[1, 2]).unwrap()).unwrap().value;
    let three = bowen_dimension(&IfsSystem::continued_fraction(&[1, 2, 3]).unwrap()).unwrap().value;
    assert!(three > two);
}

#[test]
fn parabolic_models_have_dimension_one() {
    let gauss = bowen_dimension(&IfsSystem::gauss_parabolic(20).unwrap()).unwrap();
    assert!(gauss.contains(1.0), "{gauss:?}");
    assert!(gauss.bracket.1 - gauss.bracket.0 < 0.01);
    let dyadic = bowen_dimension(&IfsSystem::dyadic_parabolic(4, 20).unwrap()).unwrap();
    assert!(dyadic.contains(1.0), "{dyadic:?}");
    assert!(dyadic.bracket.1 - dyadic.bracket.0 < 0.05);
}

fn tail_only(law: TailLaw) -> IfsSystem {
    let tail = TailBranch { law: law.validated().unwrap(), target: 0, sources: vec![0], accumulation: 0.0 };
    IfsSystem::new(Chart::Line, vec![BaseSet::new(0.0, 1.0)], Vec::new(), vec![tail]).unwrap()
}

#[test]
fn irregular_and_unbracketable_tails() {
    let irregular = tail_only(TailLaw { log_power: 4.0, k_from: 2, ..TailLaw::parabolic(0.5, 0.5, 2).unwrap() });
    assert_eq!(regularity_check(&irregular), Regularity::Irregular);
    assert!(matches!(bowen_dimension(&irregular), Err(Error::NotRegular)));

    let tiny = tail_only(TailLaw::parabolic(1e-6, 1e-6, 1).unwrap());
    assert_eq!(regularity_check(&tiny), Regularity::Regular);
    assert!(matches!(bowen_dimension(&tiny), Err(Error::BracketFailure { .. })));
}

#[test]
fn divergent_sigma_is_reported() {
    let g = IfsSystem::gauss_parabolic(10).unwrap();
    assert!(matches!(transfer_eigenvalue(&g, 0.4, 16), Err(Error::TailDiverges { .. })));
    assert!(g.psi_n(0.5, 2).unwrap().is_infinite());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn psi_is_submultiplicative(idx in 0usize..5, m in 1usize..4, n in 1usize..4, sigma in 0.0..1.5f64) {
        let (_, sys) = finite_systems().swap_remove(idx);
        let lhs = sys.psi_n(sigma, m + n).unwrap();
        let rhs = sys.psi_n(sigma, m).unwrap() * sys.psi_n(sigma, n).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-12));
    }

    #[test]
    fn log_psi_is_convex(idx in 0usize..5, n in 1usize..5, s in 0.0..1.5f64, h in 0.01..0.5f64) {
        let (_, sys) = finite_systems().swap_remove(idx);
        let l = |x: f64| sys.psi_n(x, n).unwrap().ln();
        prop_assert!(2.0 * l(s + h) <= l(s) + l(s + 2.0 * h) + 1e-12);
    }

    #[test]
    fn psi_strictly_decreases_past_the_contraction_level(idx in 0usize..5, extra in 0usize..3, s in 0.0..1.5f64, h in 0.01..0.5f64) {
        let (_, sys) = finite_systems().swap_remove(idx);
        let n = sys.contraction().unwrap().level + extra;
        prop_assert!(sys.psi_n(s + h, n).unwrap() < sys.psi_n(s, n).unwrap());
    }
}
