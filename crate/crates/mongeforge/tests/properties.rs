use mongeforge::analyze::{classify, verify_scene, DirectionFan, VerifyConfig};
use mongeforge::plane::{convex_hull, norm_angle, Point2};
use mongeforge::profile::{
    default_cone_basis, solve_kappa_cone, ConeProfile, ConeSpan, CylProfile, PolySeries,
    TrigSeries, TrigTerm,
};
use mongeforge::randgen::{generate, random_gauge, scene_rng, Family, ALL_FAMILIES};
use mongeforge::ProfileError;
use proptest::prelude::*;
use std::f64::consts::TAU;

fn trig_series_strategy() -> impl Strategy<Value = TrigSeries> {
    proptest::collection::vec((0u32..6, -1.0f64..1.0, -1.0f64..1.0), 1..4).prop_map(|terms| {
        TrigSeries::new(
            terms
                .into_iter()
                .map(|(w, c, s)| TrigTerm {
                    omega: w as f64,
                    cos: c,
                    sin: s,
                })
                .collect(),
        )
    })
}

proptest! {
    #[test]
    fn hull_idempotent_and_interior_invariant(
        pts in proptest::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 4..16)
    ) {
        let pts: Vec<Point2> = pts.into_iter().map(|(x, y)| Point2::new(x, y)).collect();
        let Ok(hull) = convex_hull(&pts) else { return Ok(()) };
        let verts: Vec<Point2> = (0..hull.n()).map(|i| hull.vertex(i as isize)).collect();
        prop_assert_eq!(convex_hull(&verts).unwrap(), hull.clone());
        // the vertex centroid is interior, so adding it changes nothing
        let n = verts.len() as f64;
        let c = verts.iter().fold(Point2::ORIGIN, |a, p| {
            Point2::new(a.x + p.x / n, a.y + p.y / n)
        });
        let mut with_c = verts;
        with_c.push(c);
        prop_assert_eq!(convex_hull(&with_c).unwrap(), hull);
    }

    #[test]
    fn cone_profile_solves_its_ode(
        kappa in trig_series_strategy(),
        alpha_b in -2.0f64..2.0,
        dalpha_b in -2.0f64..2.0,
        theta_b in -3.0f64..3.0,
        t in 0.05f64..5.0,
    ) {
        let profile = ConeProfile {
            theta_b,
            span: ConeSpan::UpTo(theta_b + 5.5),
            alpha_b,
            dalpha_b,
            kappa: kappa.clone(),
        };
        let theta = theta_b + t;
        let (a, da, dda) = profile.eval(theta);
        prop_assert!((dda - (kappa.eval(theta) - a)).abs() < 1e-12);
        // finite differences of the closed form against the reported derivatives
        let h = 1e-5;
        let (am, _, _) = profile.eval(theta - h);
        let (ap, _, _) = profile.eval(theta + h);
        let scale = 1.0 + a.abs() + da.abs() + dda.abs();
        prop_assert!(((ap - am) / (2.0 * h) - da).abs() < 1e-6 * scale);
        prop_assert!(((ap - 2.0 * a + am) / (h * h) - dda).abs() < 1e-4 * scale);
        // initial data reproduced exactly at the anchor
        let (a0, da0, _) = profile.eval(theta_b);
        prop_assert!((a0 - alpha_b).abs() < 1e-12);
        prop_assert!((da0 - dalpha_b).abs() < 1e-12);
    }

    #[test]
    fn cyl_profile_solves_its_ode(
        coeffs in proptest::collection::vec(-1.0f64..1.0, 1..5),
        alpha_b in -2.0f64..2.0,
        dalpha_b in -2.0f64..2.0,
        x_b in -2.0f64..2.0,
        t in -3.0f64..3.0,
    ) {
        let kappa = PolySeries::new(coeffs);
        let profile = CylProfile { x_b, alpha_b, dalpha_b, kappa: kappa.clone() };
        let x = x_b + t;
        let (a, da, dda) = profile.eval(x);
        prop_assert!((dda - kappa.eval(x)).abs() < 1e-12);
        let h = 1e-5;
        let (am, _, _) = profile.eval(x - h);
        let (ap, _, _) = profile.eval(x + h);
        let scale = 1.0 + a.abs() + da.abs() + dda.abs();
        prop_assert!(((ap - am) / (2.0 * h) - da).abs() < 1e-6 * scale);
        prop_assert!(((ap - 2.0 * a + am) / (h * h) - dda).abs() < 1e-3 * scale);
    }

    #[test]
    fn moment_solve_reaches_the_far_boundary(
        a in -3.0f64..3.0,
        len in 0.5f64..3.0,
        v in -2.0f64..2.0,
        d in -2.0f64..2.0,
    ) {
        let b = a + len;
        let basis = default_cone_basis(a, b);
        let coeffs = match solve_kappa_cone(&basis, a, b, (v, d), true) {
            Ok(c) => c,
            Err(ProfileError::Infeasible(_)) | Err(ProfileError::TrivialOnly) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(format!("solve failed: {e}"))),
        };
        let kappa = TrigSeries::combine(&basis, &coeffs);
        // the density vanishes at both ends of the span
        prop_assert!(kappa.eval(a).abs() < 1e-9);
        prop_assert!(kappa.eval(b).abs() < 1e-9);
        // evolving zero data from a accumulates exactly the requested defect
        let profile = ConeProfile {
            theta_b: a,
            span: ConeSpan::UpTo(b),
            alpha_b: 0.0,
            dalpha_b: 0.0,
            kappa,
        };
        let (ab, dab, _) = profile.eval(b);
        prop_assert!((ab - v).abs() < 1e-9 * (1.0 + v.abs()));
        prop_assert!((dab - d).abs() < 1e-9 * (1.0 + d.abs()));
    }

    #[test]
    fn conical_hessian_annihilates_the_radial_direction(
        seed in 0u64..500,
        theta in 0.0f64..TAU,
        rho in 0.1f64..3.0,
    ) {
        let scene = generate(Family::FullCone, &mut scene_rng(seed));
        let v = scene.singularities[0];
        let p = v.add(mongeforge::plane::unit(theta).scale(rho));
        let r = scene.evaluate(p).unwrap();
        let h = r.hessian;
        let e = p.sub(v);
        // H e = 0 both as a quadratic form and against the orthogonal vector
        let he_x = h.xx * e.x + h.xy * e.y;
        let he_y = h.xy * e.x + h.yy * e.y;
        let tol = 1e-10 * (1.0 + h.frob()) * e.norm();
        prop_assert!((he_x * he_x + he_y * he_y).sqrt() < tol);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn classification_is_gauge_invariant(
        pick in 0usize..8,
        seed in 0u64..1000,
        gauge_seed in 0u64..1000,
    ) {
        let family = ALL_FAMILIES[pick];
        let cfg = VerifyConfig {
            samples: 1500,
            traces: 120,
            iface_samples: 12,
            ..VerifyConfig::default()
        };
        let mut scene = generate(family, &mut scene_rng(seed));
        let before = classify(&scene, &verify_scene(&scene, &cfg)).unwrap();
        scene.gauge_shift(&random_gauge(&mut scene_rng(gauge_seed)));
        let after = classify(&scene, &verify_scene(&scene, &cfg)).unwrap();
        prop_assert_eq!(before, after);
    }
}

proptest! {
    #[test]
    fn separate_fans_means_no_shared_direction(
        arcs_a in proptest::collection::vec((0.0f64..TAU, 0.1f64..1.2), 1..4),
        arcs_b in proptest::collection::vec((0.0f64..TAU, 0.1f64..1.2), 1..4),
    ) {
        let mk = |arcs: &[(f64, f64)], sing: usize| DirectionFan {
            singularity: sing,
            arcs: arcs
                .iter()
                .map(|&(s, w)| (norm_angle(s), norm_angle(s) + w))
                .collect(),
        };
        let fa = mk(&arcs_a, 0);
        let fb = mk(&arcs_b, 1);
        if !mongeforge::analyze::separate_fans(&fa, &fb) {
            return Ok(());
        }
        // separability implies no direction lies strictly inside both fans
        let inside = |f: &DirectionFan, t: f64| {
            f.arcs.iter().any(|&(b, e)| {
                let local = norm_angle(t - b);
                local > 1e-6 && local < (e - b) - 1e-6
            })
        };
        for k in 0..5000 {
            let t = TAU * k as f64 / 5000.0;
            prop_assert!(!(inside(&fa, t) && inside(&fb, t)),
                "direction {t} lies inside both supposedly separate fans");
        }
    }
}
