use cifs_core::moebius::one_minus_modulus;
use cifs_core::{Circle, Classification, Complex, MoebiusMap};
use proptest::prelude::*;

fn disk_automorphism() -> impl Strategy<Value = MoebiusMap> {
    // z ↦ e^{iθ} (z - a)/(1 - ā z), |a| < 0.95.
    (0.0..0.95f64, -3.2..3.2f64, -3.2..3.2f64).prop_map(|(r, arg, theta)| {
        let a = Complex::from_polar(r, arg);
        let m = MoebiusMap::conformal(Complex::new(1.0, 0.0), -a, -a.conj(), Complex::new(1.0, 0.0)).unwrap();
        MoebiusMap::rotation(theta).compose(&m)
    })
}

fn point_in_disk() -> impl Strategy<Value = Complex> {
    (0.0..0.99f64, -3.2..3.2f64).prop_map(|(r, a)| Complex::from_polar(r, a))
}

fn close(a: Complex, b: Complex, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + a.norm())
}

proptest! {
    #[test]
    fn composition_is_associative(f in disk_automorphism(), g in disk_automorphism(), h in disk_automorphism(), z in point_in_disk()) {
        let left = f.compose(&g).compose(&h).apply(z).unwrap();
        let right = f.compose(&g.compose(&h)).apply(z).unwrap();
        prop_assert!(close(left, right, 1e-10));
        let direct = f.apply(g.apply(h.apply(z).unwrap()).unwrap()).unwrap();
        prop_assert!(close(left, direct, 1e-10));
    }

    #[test]
    fn inverse_undoes_the_map(f in disk_automorphism(), z in point_in_disk()) {
        let back = f.inverse().apply(f.apply(z).unwrap()).unwrap();
        prop_assert!(close(back, z, 1e-10));
        prop_assert!(f.compose(&f.inverse()).approx_eq(&MoebiusMap::identity(), 1e-9));
    }

    #[test]
    fn chain_rule_for_derivative_moduli(f in disk_automorphism(), g in disk_automorphism(), z in point_in_disk()) {
        let fg = f.compose(&g).derivative_modulus(z).unwrap();
        let prod = f.derivative_modulus(g.apply(z).unwrap()).unwrap() * g.derivative_modulus(z).unwrap();
        prop_assert!((fg - prod).abs() <= 1e-9 * prod.max(1.0));
    }

    #[test]
    fn automorphisms_preserve_the_circle_and_displacement(f in disk_automorphism()) {
        prop_assert!(f.preserves_unit_circle(32, 1e-12));
        let w = f.image_of_origin();
        prop_assert!(w.norm() < 1.0);
        let rho = f.disk_displacement();
        prop_assert!((one_minus_modulus(rho) - (1.0 - w.norm())).abs() < 1e-12);
        // Hyperbolic distance from its closed form.
        let expected = ((1.0 + w.norm()) / (1.0 - w.norm())).ln();
        prop_assert!((rho - expected).abs() < 1e-9 * expected.max(1.0));
    }

    #[test]
    fn reflections_are_involutions(cx in -2.0..2.0f64, cy in -2.0..2.0f64, r in 0.1..2.0f64, z in point_in_disk()) {
        let c = Circle::new(Complex::new(cx, cy), r).unwrap();
        let s = MoebiusMap::reflect(&c);
        prop_assume!((z - c.center()).norm() > 1e-3);
        let back = s.apply(s.apply(z).unwrap()).unwrap();
        prop_assert!(close(back, z, 1e-9));
        prop_assert!(s.compose(&s).approx_eq(&MoebiusMap::identity(), 1e-9));
    }

    #[test]
    fn isometric_circle_has_unit_derivative(f in disk_automorphism(), t in 0.0..6.3f64) {
        if let Some(c) = f.isometric_circle() {
            let d = f.derivative_modulus(c.point_at(t)).unwrap();
            prop_assert!((d - 1.0).abs() < 1e-9);
        }
    }
}

#[test]
fn cayley_checkpoints() {
    let eta = MoebiusMap::cayley_to_disk();
    let i = Complex::new(0.0, 1.0);
    assert!((eta.apply(Complex::new(1.0, 0.0)).unwrap() - 1.0).norm() < 1e-12);
    assert!((eta.apply(Complex::new(0.0, 0.0)).unwrap() + i).norm() < 1e-12);
    assert!((eta.apply(i).unwrap()).norm() < 1e-12);
    match eta.apply_point(cifs_core::Point::Infinity) {
        cifs_core::Point::Finite(w) => assert!((w - i).norm() < 1e-12),
        cifs_core::Point::Infinity => panic!("η(∞) must be finite"),
    }
}

#[test]
fn trace_classes_of_standard_maps() {
    assert_eq!(MoebiusMap::disk_translation(1.0).classify().unwrap(), Classification::Hyperbolic);
    assert_eq!(MoebiusMap::rotation(0.5).classify().unwrap(), Classification::Elliptic);
    assert_eq!(MoebiusMap::translation(Complex::new(1.0, 0.0)).classify().unwrap(), Classification::Parabolic);
    assert_eq!(MoebiusMap::identity().classify().unwrap(), Classification::Identity);
}
