use std::f64::consts::PI;

use gnslab_core::corpus::{perturbed, BumpShape};
use gnslab_core::functionals::{
    c1_constant, c1_quadrature, deficit_identity, extremal_f, extremal_v, gn_deficit, gn_leading_term, lift,
    normalize_mass, normalize_ratio, scale_u, sharp_a, sharp_s, sobolev_deficit, GnNorms,
};
use gnslab_core::params::beta_moment;
use gnslab_core::quad::{h1_seminorm, lp_norm};
use gnslab_core::{build_grid, derive_params, Error, ParamSet, QuadratureGrid};

fn setup(n: u32, t: f64) -> (ParamSet, QuadratureGrid) {
    let p = derive_params(n, t).unwrap();
    let g = build_grid(&p, 64).unwrap();
    (p, g)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn sharp_gn_constant_planar_case() {
    let (p, g) = setup(2, 3.0);
    assert!(rel(sharp_a(&p, &g).unwrap(), PI.powf(-1.0 / 6.0)) < 1e-8);
}

#[test]
fn sharp_gn_constant_from_beta_moments() {
    // n = 2, t = 2: ‖v‖_4^4 = π/3, ‖v‖_3^3 = π/2, ‖∇v‖² = 2π/3, μ = 1/4
    let (p, g) = setup(2, 2.0);
    let high = (2.0 * PI * beta_moment(2.0, 4.0).unwrap()).powf(0.25);
    let low = (2.0 * PI * beta_moment(2.0, 3.0).unwrap()).powf(1.0 / 3.0);
    let grad = (8.0 * PI * beta_moment(4.0, 4.0).unwrap()).sqrt();
    assert!(rel(high.powi(4), PI / 3.0) < 1e-13);
    assert!(rel(grad * grad, 2.0 * PI / 3.0) < 1e-13);
    let expected = high / (grad.powf(0.25) * low.powf(0.75));
    assert!(rel(sharp_a(&p, &g).unwrap(), expected) < 1e-8);
}

#[test]
fn sharp_sobolev_constant_planar_case() {
    let (p, g) = setup(2, 3.0);
    let s = sharp_s(&p, &g).unwrap();
    assert!(rel(s * s, 6f64.sqrt() / (8.0 * PI)) < 1e-8);
    // ‖F‖_4^4 = π²/6 and ‖∇F‖² = 4π²/3 for m = n = 2
    let f = extremal_f(&p, 1.0, 1.0);
    assert!(rel(lp_norm(&f, 4.0, &p, &g).unwrap().powi(4), PI * PI / 6.0) < 1e-10);
    assert!(rel(h1_seminorm(&f, &p, &g).unwrap().powi(2), 4.0 * PI * PI / 3.0) < 1e-10);
}

#[test]
fn c1_planar_value() {
    let (p, g) = setup(2, 3.0);
    assert!(rel(c1_constant(&p), (PI / 3.0).sqrt()) < 1e-14);
    assert!(rel(c1_quadrature(&p, &g).unwrap(), c1_constant(&p)) < 1e-8);
}

#[test]
fn extremal_norms_do_not_depend_on_scale() {
    let (p, g) = setup(2, 3.0);
    let base = lp_norm(&extremal_v(&p, 1.0), 6.0, &p, &g).unwrap();
    for lambda in [0.5, 2.0] {
        assert!(rel(lp_norm(&extremal_v(&p, lambda), 6.0, &p, &g).unwrap(), base) < 1e-10);
    }
    let f1 = lp_norm(&extremal_f(&p, 1.0, 1.0), 4.0, &p, &g).unwrap();
    for s in [0.5, 2.0] {
        assert!(rel(lp_norm(&extremal_f(&p, s, 1.0), 4.0, &p, &g).unwrap(), f1) < 1e-8);
    }
    assert!(rel(lp_norm(&extremal_f(&p, 1.0, -2.5), 4.0, &p, &g).unwrap(), 2.5 * f1) < 1e-12);
}

#[test]
fn extremals_have_zero_deficit() {
    for (n, t) in [(2, 3.0), (3, 2.0), (4, 1.5), (3, 2.5)] {
        let (p, g) = setup(n, t);
        for lambda in [1.0, 3.0] {
            let v = extremal_v(&p, lambda);
            let d = gn_deficit(&v, &p, &g).unwrap();
            assert!(d.abs() <= 1e-8 * gn_leading_term(&v, &p, &g).unwrap(), "{} λ={lambda}: {d}", p.label());
        }
        for (s, z) in [(1.0, 1.0), (2.0, 1.0), (0.7, -3.0)] {
            let f = extremal_f(&p, s, z);
            let d = sobolev_deficit(&f, &p, &g).unwrap();
            assert!(d.abs() <= 1e-8 * lp_norm(&f, p.two_star(), &p, &g).unwrap().powi(2));
        }
    }
}

#[test]
fn perturbed_profiles_have_positive_deficit() {
    for (n, t) in [(2, 3.0), (2, 2.0), (3, 2.0), (4, 1.5)] {
        let (p, g) = setup(n, t);
        for shape in BumpShape::ALL {
            let u = normalize_mass(&perturbed(&p, &[(shape, 0.1)]), &p, &g).unwrap();
            assert!(gn_deficit(&u, &p, &g).unwrap() > 0.0, "{} {shape}", p.label());
        }
    }
}

#[test]
fn lift_of_extremal_is_sobolev_extremal() {
    for (n, t) in [(2, 3.0), (3, 2.0), (2, 1.5)] {
        let (p, g) = setup(n, t);
        let phi = lift(&extremal_v(&p, 1.0), &p, &g).unwrap();
        for (r, rho) in [(0.0, 0.0), (0.5, 1.5), (3.0, 0.2)] {
            let f = extremal_f(&p, 1.0, 1.0);
            assert!(rel(phi.eval(r, rho), f.eval(r, rho)) < 1e-12);
        }
        let s = p.two_star();
        let a = lp_norm(&phi, s, &p, &g).unwrap();
        let b = lp_norm(&extremal_f(&p, 1.0, 1.0), s, &p, &g).unwrap();
        assert!(rel(a, b) < 1e-8);
    }
}

#[test]
fn lift_weight_for_planar_case() {
    let (p, g) = setup(2, 3.0);
    let phi = lift(&extremal_v(&p, 1.0), &p, &g).unwrap();
    let gnslab_core::CylField::Lifted(l) = phi else {
        panic!("lift must produce a lifted field");
    };
    for r in [0.0, 1.0, 2.5] {
        assert!(rel(l.w(r), 1.0 + r * r) < 1e-14);
    }
}

#[test]
fn lift_rejects_sign_change() {
    let (p, g) = setup(2, 3.0);
    let u = perturbed(&p, &[(BumpShape::Core, -2.0)]);
    assert!(matches!(lift(&u, &p, &g), Err(Error::Domain(_))));
}

#[test]
fn lift_of_dilated_extremal_has_finite_norm() {
    let (p, g) = setup(3, 2.0);
    let phi = lift(&extremal_v(&p, 2.0), &p, &g).unwrap();
    assert!(lp_norm(&phi, p.two_star(), &p, &g).unwrap().is_finite());
}

#[test]
fn scale_u_preserves_mass_and_deficit() {
    let (p, g) = setup(2, 3.0);
    let u = normalize_mass(&perturbed(&p, &[(BumpShape::Wide, 0.05)]), &p, &g).unwrap();
    assert_eq!(scale_u(&u, 1.0, &p), u);
    let m0 = lp_norm(&u, 6.0, &p, &g).unwrap();
    let d0 = gn_deficit(&u, &p, &g).unwrap();
    for lambda in [0.25, 0.5, 2.0, 4.0, 5.0] {
        let ul = scale_u(&u, lambda, &p);
        assert!(rel(lp_norm(&ul, 6.0, &p, &g).unwrap(), m0) < 1e-8);
        assert!((gn_deficit(&ul, &p, &g).unwrap() - d0).abs() <= 1e-7 * d0.max(1.0));
    }
}

#[test]
fn normalize_ratio_hits_extremal_ratio() {
    let (p, g) = setup(2, 3.0);
    let target = GnNorms::of(&extremal_v(&p, 1.0), &p, &g).unwrap();
    // ‖∇v‖² = π/2, ‖v‖_4^4 = π, so the ratio is 2 and ‖∇v‖²/‖v‖_4^4 = 1/2
    assert!(rel(target.ratio(&p), 2.0) < 1e-10);
    for u in [extremal_v(&p, 2.0), perturbed(&p, &[(BumpShape::Shell, 0.2)])] {
        let un = normalize_ratio(&u, &p, &g).unwrap();
        let norms = GnNorms::of(&un, &p, &g).unwrap();
        assert!(rel(norms.ratio(&p), target.ratio(&p)) < 1e-8);
        assert!(rel(norms.grad.powi(2) / norms.low.powi(4), 0.5) < 1e-8);
    }
    let v = normalize_ratio(&extremal_v(&p, 1.0), &p, &g).unwrap();
    assert!((v.eval(0.3) - extremal_v(&p, 1.0).eval(0.3)).abs() < 1e-12);
}

#[test]
fn normalize_mass_examples() {
    let (p, g) = setup(3, 2.0);
    let v = extremal_v(&p, 1.0);
    let seven = normalize_mass(&v.scaled(7.0), &p, &g).unwrap();
    assert!(rel(seven.eval(0.7), v.eval(0.7)) < 1e-12);
    let u = normalize_mass(&perturbed(&p, &[(BumpShape::Core, 0.3)]), &p, &g).unwrap();
    assert!(rel(lp_norm(&u, 4.0, &p, &g).unwrap(), lp_norm(&v, 4.0, &p, &g).unwrap()) < 1e-8);
    assert!(normalize_mass(&v.scaled(0.0), &p, &g).is_err());
}

#[test]
fn deficit_identity_examples() {
    let (p, g) = setup(2, 3.0);
    let rep = deficit_identity(&extremal_v(&p, 1.0), &p, &g).unwrap();
    assert!(rep.identity_residual <= 1e-8 * rep.scale);
    assert!(rep.gn_deficit.abs() <= 1e-8 * rep.scale);
    for (n, t) in [(2, 3.0), (3, 2.0)] {
        let (p, g) = setup(n, t);
        let u = normalize_ratio(&perturbed(&p, &[(BumpShape::Core, 0.05)]), &p, &g).unwrap();
        let rep = deficit_identity(&u, &p, &g).unwrap();
        assert!(rep.relative_residual() <= 1e-6, "{}: {rep:?}", p.label());
        assert!(rep.gn_deficit > 0.0 && rep.sobolev_deficit > 0.0);
    }
}

#[test]
fn deficit_identity_requires_normalization() {
    let (p, g) = setup(2, 3.0);
    let u = perturbed(&p, &[(BumpShape::Core, 0.05)]);
    let u = scale_u(&u, 1.7, &p);
    assert!(matches!(deficit_identity(&u, &p, &g), Err(Error::Precondition(_))));
}
