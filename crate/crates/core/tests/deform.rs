use cifs_core::deform::{
    analyticity_diagnostic, curve_nodes, dimension_curve, AnalyticityVerdict, ComplexPolynomial, DeformationFamily,
    FamilyKind, Polynomial,
};
use cifs_core::group::GroupPresentation;
use cifs_core::ifs::IfsSystem;
use cifs_core::pressure::{bowen_dimension, BowenOptions};
use cifs_core::Error;

fn moran(t: f64) -> f64 {
    let r = 1.0 / 3.0 + t / 10.0;
    2f64.ln() / (1.0 / r).ln()
}

#[test]
fn moran_family_curve_matches_closed_form() {
    let family = DeformationFamily::similarity(Polynomial::new(vec![1.0 / 3.0, 0.1]).unwrap(), (-0.5, 0.5)).unwrap();
    let curve = dimension_curve(&family, 24, &BowenOptions::default()).unwrap();
    for (t, v) in curve.nodes.iter().zip(&curve.values) {
        assert!((v - moran(*t)).abs() < 1e-7, "t = {t}: {v} vs {}", moran(*t));
    }
    let report = analyticity_diagnostic(&curve).unwrap();
    assert_eq!(report.verdict, AnalyticityVerdict::ConsistentWithAnalytic);
    assert!(report.rho_fit <= 0.8, "{}", report.rho_fit);
}

#[test]
fn affine_reparametrisation_keeps_the_verdict() {
    // s ∈ [0, 1] ↦ t = s - 1/2
    let family =
        DeformationFamily::similarity(Polynomial::new(vec![1.0 / 3.0 - 0.05, 0.1]).unwrap(), (0.0, 1.0)).unwrap();
    let curve = dimension_curve(&family, 24, &BowenOptions::default()).unwrap();
    for (s, v) in curve.nodes.iter().zip(&curve.values) {
        assert!((v - moran(s - 0.5)).abs() < 1e-7);
    }
    let report = analyticity_diagnostic(&curve).unwrap();
    assert_eq!(report.verdict, AnalyticityVerdict::ConsistentWithAnalytic);
}

#[test]
fn constant_family_gives_a_flat_curve() {
    let sys = IfsSystem::continued_fraction(&[1, 2]).unwrap();
    let expected = bowen_dimension(&sys).unwrap().value;
    let family = DeformationFamily::constant(sys, (0.0, 1.0)).unwrap();
    let curve = dimension_curve(&family, 16, &BowenOptions::default()).unwrap();
    for v in &curve.values {
        assert!((v - expected).abs() < 1e-12);
    }
    let report = analyticity_diagnostic(&curve).unwrap();
    assert_eq!(report.verdict, AnalyticityVerdict::ConsistentWithAnalytic);
}

#[test]
fn schottky_dimension_grows_with_the_radius() {
    let radius = Polynomial::new(vec![0.1, 0.4]).unwrap();
    let family = DeformationFamily::new((0.0, 1.0), FamilyKind::SymmetricSchottky { radius }).unwrap();
    let opts = BowenOptions::default();
    let dims: Vec<f64> = [0.0, 0.5, 1.0].iter().map(|&t| family.dimension_at(t, &opts).unwrap().0).collect();
    assert!(dims[0] < dims[1] && dims[1] < dims[2], "{dims:?}");
}

#[test]
fn moving_generators_family() {
    let g = GroupPresentation::symmetric_schottky(0.3).unwrap();
    let generators = g.generators().map(|m| m.coefficients().map(ComplexPolynomial::constant)).collect::<Vec<_>>();
    let family = DeformationFamily::new((0.0, 1.0), FamilyKind::Schottky { generators }).unwrap();
    let direct = bowen_dimension(&IfsSystem::from_schottky(&g).unwrap()).unwrap().value;
    let (at, _) = family.dimension_at(0.7, &BowenOptions::default()).unwrap();
    assert!((at - direct).abs() < 1e-12);
}

#[test]
fn parameter_errors() {
    let family = DeformationFamily::similarity(Polynomial::new(vec![0.3]).unwrap(), (0.0, 1.0)).unwrap();
    assert!(matches!(family.eval(1.5), Err(Error::ParameterOutOfRange { .. })));
    assert!(matches!(curve_nodes(&family, 4), Err(Error::InvalidArgument(_))));
    let bad = DeformationFamily::similarity(Polynomial::new(vec![0.3, 0.8]).unwrap(), (0.0, 1.0));
    assert!(matches!(bad, Err(Error::ValidityViolated { .. })));
    assert!(Polynomial::new(vec![0.0; 10]).is_err());
}

#[test]
fn curves_are_reproducible() {
    let family = DeformationFamily::similarity(Polynomial::new(vec![0.3, 0.05, -0.02]).unwrap(), (-1.0, 1.0)).unwrap();
    let a = dimension_curve(&family, 16, &BowenOptions::default()).unwrap();
    let b = dimension_curve(&family, 16, &BowenOptions::default()).unwrap();
    assert_eq!(a, b);
    assert_eq!(analyticity_diagnostic(&a).unwrap(), analyticity_diagnostic(&b).unwrap());
}
