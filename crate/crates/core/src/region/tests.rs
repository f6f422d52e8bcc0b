use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;
use proptest::prelude::*;

use super::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn assert_hermitian(r: &LmiRegion, z: Complex64) {
    let f = r.char_fn_eval(z);
    let asym = (&f - f.adjoint()).iter().map(|v| v.norm()).fold(0.0, f64::max);
    assert!(asym < 1e-12, "{} not Hermitian at {z}", r.label);
}

#[test]
fn stability_circle_at_origin_is_identity() {
    let f = stability_circle().char_fn_eval(c(0.0, 0.0));
    assert_eq!(f[(0, 0)], c(1.0, 0.0));
    assert_eq!(f[(1, 1)], c(1.0, 0.0));
    assert_eq!(f[(0, 1)], c(0.0, 0.0));
}

#[test]
fn circle_char_fn_expansion() {
    let (r, p) = circle(0.3, 0.5, "c").unwrap();
    let z = c(0.1, -0.7);
    let f = r.char_fn_eval(z);
    assert_eq!(f[(0, 0)], c(p.r, 0.0));
    assert!((f[(0, 1)] - (z - 0.3)).norm() < 1e-15);
    assert!((f[(1, 0)] - (z.conj() - 0.3)).norm() < 1e-15);
}

#[test]
fn conic_char_fn_at_real_point() {
    let r = conic_region(FRAC_PI_4).unwrap();
    let f = r.char_fn_eval(c(0.5, 0.0));
    let s = FRAC_PI_4.sin();
    assert!((f[(0, 0)].re - s).abs() < 1e-15 && (f[(1, 1)].re - s).abs() < 1e-15);
    assert!(f[(0, 1)].norm() < 1e-15);
    assert!((s - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
}

#[test]
fn stability_membership() {
    let r = stability_circle();
    assert!(r.contains(c(0.99, 0.0), 0.0));
    assert!(!r.contains(c(1.01, 0.0), 0.0));
}

#[test]
fn cardioid_circle_parameters() {
    let (_, p) = cardioid_circle(0.5).unwrap();
    // β = π/3, γ = exp(−β/tan β)
    let beta = PI / 3.0;
    let gamma = (-beta / beta.tan()).exp();
    assert!((p.c - gamma * 0.5).abs() < 1e-15);
    assert!((p.r - gamma * 3f64.sqrt() / 2.0).abs() < 1e-15);
    assert!((p.c - 0.273147).abs() < 1e-6);
    assert!((p.r - 0.473104).abs() < 1e-6);
}

#[test]
fn cardioid_circle_limits() {
    let (_, lo) = cardioid_circle(1e-7).unwrap();
    assert!(lo.c.abs() < 1e-6 && (lo.r - 1.0).abs() < 1e-6);
    let (_, hi) = cardioid_circle(1.0 - 1e-10).unwrap();
    assert!((hi.c - (-1f64).exp()).abs() < 1e-6 && hi.r < 1e-4);
    assert!(cardioid_circle(0.0).is_err());
    assert!(cardioid_circle(1.0).is_err());
    assert!(cardioid_circle(-0.2).is_err());
}

#[test]
fn inner_ellipse_orientation() {
    let (_, p) = cardioid_ellipse_inner(0.5).unwrap();
    assert!((p.a - 0.436180).abs() < 1e-6);
    assert!((p.b - 0.473104).abs() < 1e-6);
    assert!(!p.is_horizontal());
    assert!((p.e * p.a - 1.0).abs() < 1e-12 && (p.f * p.b - 1.0).abs() < 1e-12);
    assert!(cardioid_ellipse_inner(0.9).unwrap().1.is_horizontal());
    let (_, lim) = cardioid_ellipse_inner(1e-7).unwrap();
    assert!((lim.a - 1.0).abs() < 1e-5 && (lim.b - 1.0).abs() < 1e-5);
    assert!(cardioid_ellipse_inner(1.5).is_err());
}

#[test]
fn conservative_ellipse_parameters() {
    let (r, p) = cardioid_ellipse_conservative(0.5).unwrap();
    assert!((p.mu.unwrap() - 1.409788).abs() < 1e-6);
    assert!((p.a - 0.614921).abs() < 1e-6);
    assert!((p.c - 0.385079).abs() < 1e-6);
    assert!((p.a + p.c - 1.0).abs() < 1e-12);
    assert!(p.is_horizontal());
    assert!(r.min_eig(c(1.0, 0.0)).abs() < 1e-9);
    assert!(!r.contains(c(1.0 + 1e-6, 0.0), 0.0));
}

#[test]
fn conservative_ellipse_horizontal_everywhere() {
    for i in 1..200 {
        let z = i as f64 / 200.0;
        let (_, p) = cardioid_ellipse_conservative(z).unwrap();
        assert!(p.is_horizontal(), "ζ = {z}");
        assert!((p.a + p.c - 1.0).abs() < 1e-12);
    }
}

#[test]
fn conic_membership_examples() {
    let r = conic_region(FRAC_PI_4).unwrap();
    assert!(r.contains(c(0.3, 0.29), 0.0));
    assert!(!r.contains(c(0.3, 0.31), 0.0));
    for theta in [0.01, 0.381, 1.0, FRAC_PI_2] {
        let r = conic_region(theta).unwrap();
        for x in [1e-6, 0.2, 0.9, 3.0] {
            assert!(r.contains(c(x, 0.0), 0.0));
        }
    }
    let half = conic_region(FRAC_PI_2).unwrap();
    assert!(half.contains(c(0.01, 5.0), 0.0));
    assert!(!half.contains(c(-0.01, 0.0), 0.0));
}

#[test]
fn conic_rejects_undersampling() {
    assert!(matches!(
        conic_region(FRAC_PI_2 + 0.01),
        Err(crate::SidError::SamplingRate(msg)) if msg.contains("Td_max/4")
    ));
    assert!(conic_region(0.0).is_err());
    assert!((1.27f64 * 0.3 - 0.381).abs() < 1e-12);
}

#[test]
fn settling_circle_radii() {
    let (_, p) = settling_circle(0.48, 0.05).unwrap();
    assert!((p.r - (-0.024f64).exp()).abs() < 1e-15);
    assert!((p.r - 0.976286).abs() < 1e-6);
    assert_eq!(p.c, 0.0);
    let (_, p) = settling_circle(0.55, 0.05).unwrap();
    assert!((p.r - 0.972875).abs() < 1e-6);
    let (_, p) = settling_circle(1e-12, 0.05).unwrap();
    assert!((p.r - 1.0).abs() < 1e-12);
    assert!(settling_circle(0.0, 0.05).is_err());
    assert!(settling_circle(0.5, 0.0).is_err());
}

#[test]
fn intersect_bookkeeping() {
    let (circ, _) = cardioid_circle(0.3).unwrap();
    assert_eq!(intersect(std::slice::from_ref(&circ)).unwrap(), circ);
    let cone = conic_region(0.5).unwrap();
    let (settle, _) = settling_circle(0.5, 0.1).unwrap();
    let both = intersect(&[circ.clone(), cone.clone()]).unwrap();
    assert_eq!(both.size(), 4);
    assert_eq!(intersect(&[circ, cone, settle]).unwrap().size(), 6);
    assert!(intersect(&[]).is_err());
}

#[test]
fn critical_damping_ratio() {
    let crit = critical_zeta();
    assert!((crit.zeta - 0.6128).abs() < 5e-4);
    assert!((crit.beta.to_degrees() - 52.2).abs() < 0.1);
    let g = CardioidGeometry::new(crit.zeta).unwrap();
    assert!((g.ellipse_a() - g.r_max).abs() < 1e-9);
    let a_minus_b = |z: f64| {
        let g = CardioidGeometry::new(z).unwrap();
        g.ellipse_a() - g.r_max
    };
    assert!(a_minus_b(0.8) > 0.0);
    assert!(a_minus_b(0.4) < 0.0);
}

#[test]
fn critical_damping_is_unique_sign_change() {
    let a_minus_b = |z: f64| {
        let g = CardioidGeometry::new(z).unwrap();
        g.ellipse_a() - g.r_max
    };
    let grid: Vec<f64> = (0..=9000).map(|i| 0.05 + 0.9 * i as f64 / 9000.0).collect();
    let changes = grid
        .windows(2)
        .filter(|w| a_minus_b(w[0]).signum() != a_minus_b(w[1]).signum())
        .count();
    assert_eq!(changes, 1);
}

#[test]
fn critical_ellipse_degenerates_to_circle() {
    let crit = critical_zeta();
    let (_, e) = cardioid_ellipse_inner(crit.zeta).unwrap();
    assert!((e.a - e.b).abs() < 1e-9);
}

#[test]
fn zplane_round_trip() {
    let ts = 0.3;
    let s = c(-0.2, 0.96f64.sqrt());
    let z = (s * ts).exp();
    let k = zplane_coords(z, ts).unwrap();
    assert!((k.zeta - 0.2).abs() < 1e-12);
    assert!((k.wd - 0.96f64.sqrt()).abs() < 1e-12);
    assert!((k.zeta_wn - 0.2).abs() < 1e-12);

    let k = zplane_coords(c(0.901372, 0.272852), ts).unwrap();
    assert!((k.zeta - 0.2).abs() < 1e-4 && (k.wd - 0.9798).abs() < 1e-4 && (k.zeta_wn - 0.2).abs() < 1e-4);

    let real = zplane_coords(c(0.5, 0.0), ts).unwrap();
    assert_eq!(real.zeta, 1.0);
    assert!(real.is_overdamped());

    assert!(zplane_coords(c(0.0, 0.0), ts).is_err());
    assert!(zplane_coords(c(1.0, 0.0), ts).is_err());
}

#[test]
fn exact_cardioid_examples() {
    let z = c(0.99, 0.0) * Complex64::from_polar(1.0, 3.0);
    assert!(!exact_cardioid_contains(0.9, z).unwrap());
    assert!(exact_cardioid_contains(0.9, c(0.4, 0.0)).unwrap());
    assert!(exact_cardioid_contains(0.3, c(0.0, 0.0)).unwrap());
    assert!(exact_cardioid_contains(0.3, c(1.0, 0.0)).is_err());

    // boundary point of ζ = 0.4 from the forward map
    let beta = 0.4f64.acos();
    let theta = 0.7;
    let zb = Complex64::from_polar((-theta / beta.tan()).exp(), theta);
    let k = zplane_coords(zb, 1.0).unwrap();
    assert!((k.zeta - 0.4).abs() < 1e-12);
    assert!(exact_cardioid_contains(0.4 - 1e-9, zb).unwrap());
}

fn circle_boundary_inside(zeta: f64, right_half_only: bool) -> bool {
    let (_, p) = cardioid_circle(zeta).unwrap();
    (0..2000).all(|i| {
        let t = 2.0 * PI * i as f64 / 2000.0;
        let z = (c(p.c, 0.0) + Complex64::from_polar(p.r, t)) * (1.0 - 1e-9);
        (right_half_only && z.re < 0.0) || exact_cardioid_contains(zeta - 1e-7, z).unwrap()
    })
}

#[test]
fn inscribed_circles_lie_inside_cardioids() {
    for zeta in [0.1, 0.5, 0.9] {
        assert!(circle_boundary_inside(zeta, true), "ζ = {zeta}");
    }
    assert!(circle_boundary_inside(0.9, false));
    assert!(circle_boundary_inside(0.65, false));
}

#[test]
fn low_damping_circle_overshoots_cardioid_tail() {
    // the leftmost circle point c − r passes the tail e^{−π/tan β} on the negative axis
    for zeta in [0.1, 0.5] {
        assert!(!circle_boundary_inside(zeta, false));
        let g = CardioidGeometry::new(zeta).unwrap();
        assert!(g.r_max - g.c_max > g.tail());
    }
}

#[test]
fn horizontal_inner_ellipses_lie_inside_cardioids() {
    let crit = critical_zeta().zeta;
    for zeta in [0.65, 0.75, 0.9] {
        assert!(zeta > crit);
        let (_, p) = cardioid_ellipse_inner(zeta).unwrap();
        for i in 0..2000 {
            let t = 2.0 * PI * i as f64 / 2000.0;
            let z = c(p.c + p.a * t.cos(), p.b * t.sin()) * (1.0 - 1e-9);
            assert!(exact_cardioid_contains(zeta - 1e-6, z).unwrap(), "ζ = {zeta}, t = {t}");
        }
    }
}

#[test]
fn boundary_polylines_have_720_points() {
    assert_eq!(boundary::cardioid(0.5).len(), 720);
    assert_eq!(boundary::conic(0.4).len(), 720);
    let (_, p) = cardioid_ellipse_conservative(0.36).unwrap();
    let pts = boundary::ellipse(&p);
    let (r, _) = cardioid_ellipse_conservative(0.36).unwrap();
    assert!(pts.iter().all(|z| r.min_eig(*z).abs() < 1e-9));
}

#[test]
fn region_file_round_trip() {
    let r = intersect(&[cardioid_ellipse_conservative(0.36).unwrap().0, conic_region(0.381).unwrap()]).unwrap();
    let json = serde_json::to_string(&r.to_file()).unwrap();
    let back: RegionFile = serde_json::from_str(&json).unwrap();
    assert_eq!(back.to_region().unwrap(), r);
}

#[test]
fn asymmetric_lambda_rejected() {
    let l = nalgebra::DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.4, 1.0]);
    assert!(LmiRegion::new(l, nalgebra::DMatrix::zeros(2, 2), "bad").is_err());
}

const BAND: f64 = 1e-8;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn circle_matches_geometry(cx in -0.5f64..0.5, r in 0.05f64..1.0, x in -2.0f64..2.0, y in -2.0f64..2.0) {
        let (reg, _) = circle(cx, r, "c").unwrap();
        let z = c(x, y);
        let d = (z - cx).norm() - r;
        prop_assume!(d.abs() > BAND);
        prop_assert_eq!(reg.contains(z, 1e-10), d <= 0.0);
        assert_hermitian(&reg, z);
    }

    #[test]
    fn ellipse_matches_geometry(zeta in 0.02f64..0.98, x in -2.0f64..2.0, y in -2.0f64..2.0, conservative in any::<bool>()) {
        let (reg, p) = if conservative {
            cardioid_ellipse_conservative(zeta).unwrap()
        } else {
            cardioid_ellipse_inner(zeta).unwrap()
        };
        let q = ((x - p.c) / p.a).powi(2) + (y / p.b).powi(2);
        prop_assume!((q.sqrt() - 1.0).abs() > BAND);
        prop_assert_eq!(reg.contains(c(x, y), 1e-10), q <= 1.0);
    }

    #[test]
    fn conic_matches_geometry(theta in 0.01f64..1.5, x in -2.0f64..2.0, y in -2.0f64..2.0) {
        let reg = conic_region(theta).unwrap();
        let margin = theta.tan() * x - y.abs();
        prop_assume!(margin.abs() > BAND && x.abs() > BAND);
        let inside = x >= 0.0 && margin >= 0.0;
        prop_assert_eq!(reg.contains(c(x, y), 1e-10), inside);
    }

    #[test]
    fn conjugate_symmetry(zeta in 0.05f64..0.95, theta in 0.05f64..1.5, x in -1.5f64..1.5, y in -1.5f64..1.5) {
        let z = c(x, y);
        for reg in [
            cardioid_circle(zeta).unwrap().0,
            cardioid_ellipse_inner(zeta).unwrap().0,
            cardioid_ellipse_conservative(zeta).unwrap().0,
            conic_region(theta).unwrap(),
            settling_circle(zeta, theta).unwrap().0,
        ] {
            prop_assert!((reg.min_eig(z) - reg.min_eig(z.conj())).abs() < 1e-12);
        }
    }

    #[test]
    fn intersection_is_conjunction(zeta in 0.05f64..0.95, theta in 0.05f64..1.5, zwn in 0.05f64..3.0, x in -1.2f64..1.2, y in -1.2f64..1.2) {
        let parts = [
            cardioid_ellipse_conservative(zeta).unwrap().0,
            conic_region(theta).unwrap(),
            settling_circle(zwn, 0.3).unwrap().0,
        ];
        let all = intersect(&parts).unwrap();
        let z = c(x, y);
        let tol = 1e-10;
        prop_assume!(parts.iter().all(|p| p.min_eig(z).abs() > 1e-8));
        prop_assert_eq!(all.contains(z, tol), parts.iter().all(|p| p.contains(z, tol)));
    }

    #[test]
    fn lower_damping_bound_widens_region(zeta in 0.1f64..0.9, delta in 0.01f64..0.09, x in -1.0f64..1.0, y in -1.0f64..1.0) {
        let (tight, _) = cardioid_ellipse_conservative(zeta).unwrap();
        let (loose, _) = cardioid_ellipse_conservative(zeta - delta).unwrap();
        let z = c(x, y);
        if tight.contains(z, 0.0) {
            prop_assert!(loose.contains(z, 1e-12));
        }
    }
}
