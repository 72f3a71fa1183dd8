//! Seeded random scene generators, one per solution family. Used by the
//! round-trip classification and structure test suites.

use crate::analyze::Classification;
use crate::plane::{unit, Point2, Vec2};
use crate::profile::{AffineData, CylProfile, PolySeries, TrigSeries, TrigTerm};
use crate::scene::{
    build_cylinder, build_full_cone, build_half_cone, build_polyhedral, build_two_singular, Scene,
    TwoSingularParams,
};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, TAU};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Cylinder,
    FullCone,
    HalfCone,
    TwoSingularStrip,
    TwoSingularHalfStrip,
    TwoSingularOffLine,
    TwoSingularSectors,
    Polyhedral,
}

pub const ALL_FAMILIES: [Family; 8] = [
    Family::Cylinder,
    Family::FullCone,
    Family::HalfCone,
    Family::TwoSingularStrip,
    Family::TwoSingularHalfStrip,
    Family::TwoSingularOffLine,
    Family::TwoSingularSectors,
    Family::Polyhedral,
];

impl Family {
    pub fn label(&self) -> &'static str {
        match self {
            Family::Cylinder => "cylinder",
            Family::FullCone => "full_cone",
            Family::HalfCone => "half_cone",
            Family::TwoSingularStrip => "two_singular_strip",
            Family::TwoSingularHalfStrip => "two_singular_half_strip",
            Family::TwoSingularOffLine => "two_singular_off_line",
            Family::TwoSingularSectors => "two_singular_sectors",
            Family::Polyhedral => "polyhedral",
        }
    }

    /// Does `c` carry the label this family generates?
    #[allow(clippy::match_like_matches_macro)]
    pub fn matches(&self, c: &Classification) -> bool {
        match (self, c) {
            (Family::Cylinder, Classification::Cylinder) => true,
            (Family::FullCone, Classification::FullCone) => true,
            (Family::HalfCone, Classification::HalfCylinderHalfCone) => true,
            (Family::TwoSingularStrip, Classification::TwoSingular { variant: 1 }) => true,
            (Family::TwoSingularHalfStrip, Classification::TwoSingular { variant: 2 }) => true,
            (Family::TwoSingularOffLine, Classification::TwoSingular { variant: 3 }) => true,
            (Family::TwoSingularSectors, Classification::TwoSingular { variant: 4 }) => true,
            (Family::Polyhedral, Classification::Polyhedral(_)) => true,
            _ => false,
        }
    }
}

pub fn scene_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn upt(rng: &mut ChaCha8Rng) -> Point2 {
    Point2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// magnitude in `[0.2, 1)` with random sign, bounded away from zero
fn coeff(rng: &mut ChaCha8Rng) -> f64 {
    let m = rng.gen_range(0.2..1.0);
    if rng.gen_bool(0.5) {
        m
    } else {
        -m
    }
}

/// polynomial density `q * (s - r1) * (s - r2) * ...` as coefficients
fn poly_with_roots(roots: &[f64], q: &[f64]) -> PolySeries {
    let mut c = q.to_vec();
    for &r in roots {
        let mut next = vec![0.0; c.len() + 1];
        for (k, &a) in c.iter().enumerate() {
            next[k] -= r * a;
            next[k + 1] += a;
        }
        c = next;
    }
    PolySeries::new(c)
}

fn rand_cyl_profile(rng: &mut ChaCha8Rng, roots: &[f64]) -> CylProfile {
    let q = if rng.gen_bool(0.5) {
        vec![coeff(rng)]
    } else {
        vec![coeff(rng), rng.gen_range(-0.5..0.5)]
    };
    CylProfile {
        x_b: roots.first().copied().unwrap_or(0.0),
        alpha_b: rng.gen_range(-1.0..1.0),
        dalpha_b: rng.gen_range(-1.0..1.0),
        kappa: poly_with_roots(roots, &q),
    }
}

fn rand_trig_kappa(rng: &mut ChaCha8Rng) -> TrigSeries {
    // integer frequencies, no first harmonic (periodic solvability)
    let freqs = [0.0, 2.0, 3.0, 4.0, 5.0];
    let n = rng.gen_range(1..=3usize);
    let mut picked: Vec<f64> = Vec::new();
    while picked.len() < n {
        let f = freqs[rng.gen_range(0..freqs.len())];
        if !picked.contains(&f) {
            picked.push(f);
        }
    }
    let terms = picked
        .into_iter()
        .map(|omega| TrigTerm {
            omega,
            cos: coeff(rng),
            sin: if omega == 0.0 {
                0.0
            } else {
                rng.gen_range(-1.0..1.0)
            },
        })
        .collect();
    TrigSeries::new(terms)
}

/// Random polygon for the polyhedral family: an affine image of points on
/// the unit circle, strictly convex by construction.
pub fn random_polygon(rng: &mut ChaCha8Rng, n: usize) -> Vec<Point2> {
    assert!(n >= 3);
    let angles = loop {
        let mut a: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..TAU)).collect();
        a.sort_by(f64::total_cmp);
        let min_gap = (0..n)
            .map(|k| {
                if k + 1 < n {
                    a[k + 1] - a[k]
                } else {
                    a[0] + TAU - a[k]
                }
            })
            .fold(f64::INFINITY, f64::min);
        if min_gap > 0.25 {
            break a;
        }
    };
    let r1 = rng.gen_range(0.0..TAU);
    let r2 = rng.gen_range(0.0..TAU);
    let (s1, s2) = (rng.gen_range(0.7..1.4), rng.gen_range(0.7..1.4));
    let shift = upt(rng).to_vec();
    angles
        .into_iter()
        .map(|t| {
            let p = unit(t + r1);
            let q = Vec2::new(s1 * p.x, s2 * p.y);
            let (c, s) = (r2.cos(), r2.sin());
            Point2::new(c * q.x - s * q.y + shift.x, s * q.x + c * q.y + shift.y)
        })
        .collect()
}

pub fn random_gauge(rng: &mut ChaCha8Rng) -> AffineData {
    AffineData::new(
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
    )
}

fn try_generate(family: Family, rng: &mut ChaCha8Rng) -> Result<Scene, crate::BuildError> {
    match family {
        Family::Cylinder => {
            let profile = CylProfile {
                x_b: rng.gen_range(-0.5..0.5),
                alpha_b: rng.gen_range(-1.0..1.0),
                dalpha_b: rng.gen_range(-1.0..1.0),
                kappa: PolySeries::new(vec![
                    coeff(rng),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                ]),
            };
            build_cylinder(rng.gen_range(-PI..PI), rng.gen_range(-1.0..1.0), profile)
        }
        Family::FullCone => {
            let kappa = rand_trig_kappa(rng);
            build_full_cone(upt(rng), rng.gen_range(-1.0..1.0), &kappa)
        }
        Family::HalfCone => {
            let vertex = upt(rng);
            let line_theta = rng.gen_range(-PI..PI);
            let x_r = unit(line_theta - PI / 2.0).dot(vertex.to_vec());
            let cyl = rand_cyl_profile(rng, &[x_r]);
            build_half_cone(vertex, line_theta, cyl, rng.gen_range(-1.0..1.0), None)
        }
        Family::TwoSingularStrip => {
            let t = rng.gen_range(-PI..PI);
            let e1 = unit(t + PI / 2.0);
            let p1 = upt(rng);
            let w = rng.gen_range(0.6..1.8);
            let p2 = p1
                .add(e1.scale(w))
                .add(unit(t).scale(rng.gen_range(-1.0..1.0)));
            let c1 = e1.dot(p1.to_vec());
            let cyl = rand_cyl_profile(rng, &[c1, c1 + w]);
            build_two_singular(&TwoSingularParams::Strip {
                p1,
                p2,
                theta1: t,
                theta2: t,
                v0: rng.gen_range(-1.0..1.0),
                cyl,
            })
        }
        Family::TwoSingularHalfStrip => {
            let p1 = upt(rng);
            let omega = rng.gen_range(-PI..PI);
            let p2 = p1.add(unit(omega).scale(rng.gen_range(0.6..1.8)));
            let side = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let h = omega + side * rng.gen_range(0.4..PI - 0.4);
            let psi = if (h - omega).sin() > 0.0 {
                omega
            } else {
                omega + PI
            };
            let x_r = unit(psi + PI / 2.0).dot(p1.to_vec());
            let cyl = rand_cyl_profile(rng, &[x_r]);
            build_two_singular(&TwoSingularParams::HalfStrip {
                p1,
                p2,
                h_theta1: h,
                h_theta2: h,
                v0: rng.gen_range(-1.0..1.0),
                cyl,
            })
        }
        Family::TwoSingularOffLine => {
            let p1 = upt(rng);
            let psi = rng.gen_range(-PI..PI);
            let theta1: f64 = rng.gen_range(0.25..1.0);
            let hi = (theta1 + 1.6).min(PI - 0.25);
            let theta2 = rng.gen_range(theta1 + 0.5..hi.max(theta1 + 0.55));
            let rel = rng.gen_range(theta1 + 0.1..theta2 - 0.1);
            let p2 = p1.add(unit(psi + rel).scale(rng.gen_range(0.6..1.6)));
            let x_r = unit(psi + PI / 2.0).dot(p1.to_vec());
            let cyl = rand_cyl_profile(rng, &[x_r]);
            build_two_singular(&TwoSingularParams::OffLine {
                p1,
                p2,
                r_theta: psi,
                theta1,
                theta2,
                g_lin: None,
                v0: rng.gen_range(-1.0..1.0),
                cyl,
            })
        }
        Family::TwoSingularSectors => {
            let p1 = upt(rng);
            let phi = rng.gen_range(-PI..PI);
            let p2 = p1.add(unit(phi).scale(rng.gen_range(1.2..2.5)));
            // sector at p1 inside the half-plane facing away from p2, sector
            // at p2 inside the opposite one; disjoint by construction
            let d1 = rng.gen_range(0.05..0.3);
            let t1 = phi + PI / 2.0 + d1;
            let t2 = t1 + rng.gen_range(0.6..(PI - d1 - 0.1).min(1.8));
            let t3 = phi + 3.0 * PI / 2.0 + rng.gen_range(0.05..0.3);
            let w2: f64 = rng.gen_range(0.6..1.6);
            let t4 = t3 + w2.min(t1 + TAU - t3 - 0.1);
            build_two_singular(&TwoSingularParams::Sectors {
                p1,
                p2,
                thetas: [t1, t2, t3, t4],
                g: Vec2::new(rng.gen_range(-0.7..0.7), rng.gen_range(-0.7..0.7)),
                base: rng.gen_range(-1.0..1.0),
            })
        }
        Family::Polyhedral => {
            let n = rng.gen_range(3..=8usize);
            let poly = random_polygon(rng, n);
            build_polyhedral(&poly, None)
        }
    }
}

/// Draws a random scene of the given family with a random gauge applied.
/// Deterministic for a fixed rng state; retries internally on the rare
/// infeasible draw.
pub fn generate(family: Family, rng: &mut ChaCha8Rng) -> Scene {
    for _ in 0..200 {
        match try_generate(family, rng) {
            Ok(mut scene) => {
                scene.gauge_shift(&random_gauge(rng));
                return scene;
            }
            Err(_) => continue,
        }
    }
    panic!("no feasible {} draw in 200 attempts", family.label());
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poly_with_roots_vanishes_at_roots() {
        let p = poly_with_roots(&[0.3, -1.2], &[2.0, -0.5]);
        assert!(p.eval(0.3).abs() < 1e-12);
        assert!(p.eval(-1.2).abs() < 1e-12);
        assert!(p.eval(1.0).abs() > 1e-3);
    }

    #[test]
    fn generators_are_deterministic() {
        for family in ALL_FAMILIES {
            let a = generate(family, &mut scene_rng(7));
            let b = generate(family, &mut scene_rng(7));
            assert_eq!(
                crate::shell::emit_scene(&a),
                crate::shell::emit_scene(&b),
                "{} not deterministic",
                family.label()
            );
        }
    }

    #[test]
    fn five_draws_per_family_build() {
        let mut rng = scene_rng(42);
        for family in ALL_FAMILIES {
            for _ in 0..5 {
                let scene = generate(family, &mut rng);
                assert!(!scene.pieces.is_empty(), "{}", family.label());
            }
        }
    }
}
