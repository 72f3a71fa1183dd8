//! End-to-end acceptance checks, one line of output per criterion.
//! Run with `cargo test --test acceptance -- --nocapture` to see all lines.

use mongeforge::analyze::{
    classify, verify_scene, Classification, VerificationReport, VerifyConfig,
};
use mongeforge::exec::Mode;
use mongeforge::grid::{infer_structure, max_grid_residual, GridField, InferConfig};
use mongeforge::plane::{convex_hull, exterior_sector, Point2};
use mongeforge::profile::{CylProfile, PolySeries, TrigSeries};
use mongeforge::randgen::{generate, random_polygon, scene_rng, Family, ALL_FAMILIES};
use mongeforge::scene::{build_full_cone, build_half_cone, build_polyhedral, Piece, Scene};
use mongeforge::shell::sample_grid;
use mongeforge::{AnalyzeError, BuildError};
use rand::Rng;
use std::f64::consts::FRAC_PI_2;
use std::time::Instant;

struct Outcome {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn record(out: &mut Vec<Outcome>, name: &'static str, pass: bool, detail: String) {
    out.push(Outcome { name, pass, detail });
}

/// Half-plane cylinder `u = 0` on `x < 0` glued to the cone with density
/// `cos 3theta`, giving `u = -x^3 / (2 rho^2)` on `x >= 0`.
fn oracle_half_cone() -> Scene {
    let cyl = CylProfile {
        x_b: 0.0,
        alpha_b: 0.0,
        dalpha_b: 0.0,
        kappa: PolySeries::new(vec![0.0]),
    };
    build_half_cone(
        Point2::ORIGIN,
        FRAC_PI_2,
        cyl,
        0.0,
        Some(&[TrigSeries::single(3.0, 1.0, 0.0)]),
    )
    .expect("half-cone oracle scene")
}

fn oracle_half_cone_value(p: Point2) -> f64 {
    if p.x <= 0.0 {
        0.0
    } else {
        -p.x.powi(3) / (2.0 * (p.x * p.x + p.y * p.y))
    }
}

fn criterion_1(out: &mut Vec<Outcome>) {
    let t0 = Instant::now();
    let scene = oracle_half_cone();
    let mut rng = scene_rng(11);
    let mut max_err = 0.0f64;
    for _ in 0..10_000 {
        let p = Point2::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        if p.dist(Point2::ORIGIN) < 1e-9 {
            continue;
        }
        let got = scene.evaluate(p).expect("evaluable").value;
        max_err = max_err.max((got - oracle_half_cone_value(p)).abs());
    }
    // FD residual on a grid straddling the gluing line, away from the vertex
    let grid = sample_grid(&scene, (-0.5, 0.5, 1.5, 2.5), 513, 513, Mode::default())
        .expect("sampled grid");
    let fd = max_grid_residual(&grid, Mode::default());
    let dt = t0.elapsed().as_secs_f64();
    record(
        out,
        "1 closed-form half-cone oracle",
        max_err <= 1e-12 && fd <= 1e-6 && dt < 10.0,
        format!("max |u - oracle| {max_err:.2e} (<=1e-12), FD residual {fd:.2e} (<=1e-6), {dt:.1}s (<10s)"),
    );
}

fn criterion_2(out: &mut Vec<Outcome>) {
    let t0 = Instant::now();
    let mut worst = 0.0f64;
    let mut count = 0usize;
    for (fi, family) in ALL_FAMILIES.iter().enumerate() {
        let mut rng = scene_rng(1000 + fi as u64);
        for _ in 0..100 {
            let scene = generate(*family, &mut rng);
            let scale = scene.scale();
            let r = 3.0 * scale;
            for _ in 0..10_000 {
                let p = Point2::new(rng.gen_range(-r..r), rng.gen_range(-r..r));
                if scene
                    .singularities
                    .iter()
                    .any(|s| s.dist(p) <= 1e-6 * scale)
                {
                    continue;
                }
                match mongeforge::analyze::pde_residual(&scene, p) {
                    Ok(v) => worst = worst.max(v.abs()),
                    Err(AnalyzeError::SingularPoint) | Err(AnalyzeError::TooCloseToSingularity) => {
                    }
                    Err(e) => panic!("residual failed at ({}, {}): {e}", p.x, p.y),
                }
            }
            count += 1;
        }
    }
    let dt = t0.elapsed().as_secs_f64();
    record(
        out,
        "2 exact residual on random scenes",
        worst <= 1e-10 && dt < 60.0,
        format!("{count} scenes, max |residual| {worst:.2e} (<=1e-10), {dt:.1}s (<60s)"),
    );
}

struct SuiteEntry {
    family: Family,
    scene: Scene,
    report: VerificationReport,
    classification: Result<Classification, AnalyzeError>,
}

fn run_suite() -> (Vec<SuiteEntry>, f64) {
    let t0 = Instant::now();
    let cfg = VerifyConfig::default();
    let mut entries = Vec::new();
    for (fi, family) in ALL_FAMILIES.iter().enumerate() {
        let mut rng = scene_rng(2000 + fi as u64);
        for _ in 0..100 {
            let scene = generate(*family, &mut rng);
            let report = verify_scene(&scene, &cfg);
            let classification = classify(&scene, &report);
            entries.push(SuiteEntry {
                family: *family,
                scene,
                report,
                classification,
            });
        }
    }
    (entries, t0.elapsed().as_secs_f64())
}

fn criterion_3(out: &mut Vec<Outcome>, suite: &[SuiteEntry]) {
    let mut value = 0.0f64;
    let mut grad = 0.0f64;
    let mut hess = 0.0f64;
    let mut transverse = 0.0f64;
    for e in suite {
        value = value.max(e.report.max_value_jump);
        grad = grad.max(e.report.max_grad_jump);
        hess = hess.max(e.report.max_hess_jump);
        transverse = transverse.max(e.report.max_transverse_hess);
    }
    record(
        out,
        "3 interface gluing jumps",
        value <= 1e-9 && grad <= 1e-9 && hess <= 1e-9 && transverse <= 1e-12,
        format!(
            "relative jumps: value {value:.2e}, gradient {grad:.2e}, Hessian {hess:.2e} (<=1e-9); transverse {transverse:.2e} (<=1e-12)"
        ),
    );
}

fn criterion_4(out: &mut Vec<Outcome>, suite: &[SuiteEntry]) {
    let unbounded = suite
        .iter()
        .flat_map(|e| e.report.gradient_bounds.iter())
        .filter(|b| !b.bounded)
        .count();
    // sup |grad u| over any circle around the half-cone vertex: the field is
    // 1-homogeneous, so every radius gives max_theta sqrt(alpha^2 + alpha'^2)
    let scene = oracle_half_cone();
    let radii = [1.0, 0.1, 0.01, 0.001];
    let gb = mongeforge::analyze::gradient_bound(&scene, 0, &radii);
    // oracle: dense 1-D maximization of alpha^2 + alpha'^2 for alpha = -cos^3(t)/2
    let mut oracle = 0.0f64;
    for k in 0..2_000_000 {
        let t = std::f64::consts::TAU * k as f64 / 2e6;
        let a = -t.cos().powi(3) / 2.0;
        let da = 1.5 * t.cos().powi(2) * t.sin();
        oracle = oracle.max(a * a + da * da);
    }
    let oracle = oracle.sqrt();
    let closed_form = 3.0 * 3.0f64.sqrt() / 8.0;
    let sup_err = gb
        .sups
        .iter()
        .map(|s| (s - closed_form).abs())
        .fold(0.0f64, f64::max);
    let monotone = gb.sups.windows(2).all(|w| w[1] <= w[0] + 1e-9);
    record(
        out,
        "4 gradient bounds toward singularities",
        unbounded == 0 && sup_err <= 1e-9 && monotone && (oracle - closed_form).abs() <= 1e-9,
        format!(
            "{unbounded} unbounded of {} checks; half-cone sup error {sup_err:.2e} vs 3*sqrt(3)/8 (oracle gap {:.2e})",
            suite.iter().map(|e| e.report.gradient_bounds.len()).sum::<usize>(),
            (oracle - closed_form).abs()
        ),
    );
}

fn criterion_5(out: &mut Vec<Outcome>, suite: &[SuiteEntry], suite_secs: f64) {
    let mut mismatches = Vec::new();
    for (i, e) in suite.iter().enumerate() {
        match &e.classification {
            Ok(c) if e.family.matches(c) => {}
            Ok(c) => mismatches.push(format!("{i}: {} -> {}", e.family.label(), c.label())),
            Err(err) => mismatches.push(format!("{i}: {} -> error {err}", e.family.label())),
        }
    }
    record(
        out,
        "5 round-trip classification",
        mismatches.is_empty() && suite_secs < 120.0,
        format!(
            "{} of {} draws exact, {suite_secs:.1}s (<120s){}",
            suite.len() - mismatches.len(),
            suite.len(),
            if mismatches.is_empty() {
                String::new()
            } else {
                format!("; first mismatch: {}", mismatches[0])
            }
        ),
    );
}

fn criterion_6(out: &mut Vec<Outcome>, suite: &[SuiteEntry]) {
    let violations: usize = suite.iter().map(|e| e.report.violations.len()).sum();
    let mut line_ruling_excess = 0usize;
    for e in suite {
        if e.scene.has_line_rulings()
            && mongeforge::analyze::admissible(&e.scene)
            && e.scene.singularities.len() > 2
        {
            line_ruling_excess += 1;
        }
    }
    let first = suite
        .iter()
        .flat_map(|e| e.report.violations.first())
        .next();
    record(
        out,
        "6 ruling structure theorems",
        violations == 0 && line_ruling_excess == 0,
        format!(
            "{violations} structure violations over {} scenes{}",
            suite.len(),
            first.map(|v| format!("; first: {v}")).unwrap_or_default()
        ),
    );
}

fn criterion_7(out: &mut Vec<Outcome>) {
    let mut pass = true;
    let mut details = Vec::new();
    for family in ALL_FAMILIES {
        let scene = if family == Family::Polyhedral {
            // a polygon with well-separated vertices and wide exterior
            // sectors; vertex localization degrades for nearly flat corners
            let verts: Vec<Point2> = (0..5)
                .map(|k| {
                    let t = std::f64::consts::TAU * k as f64 / 5.0 + 0.3;
                    Point2::new(1.3 * t.cos() + 0.2, 1.1 * t.sin() - 0.1)
                })
                .collect();
            build_polyhedral(&verts, None).expect("pentagon scene")
        } else {
            generate(family, &mut scene_rng(700))
        };
        let scale = scene.scale();
        let c = if scene.singularities.is_empty() {
            Point2::ORIGIN
        } else {
            let n = scene.singularities.len() as f64;
            let (sx, sy) = scene
                .singularities
                .iter()
                .fold((0.0, 0.0), |(ax, ay), p| (ax + p.x, ay + p.y));
            Point2::new(sx / n, sy / n)
        };
        let w = 2.0 * scale;
        let grid = sample_grid(
            &scene,
            (c.x - w, c.x + w, c.y - w, c.y + w),
            513,
            513,
            Mode::default(),
        )
        .expect("sampled grid");
        let t0 = Instant::now();
        let rep = infer_structure(&grid, &InferConfig::default());
        let dt = t0.elapsed().as_secs_f64();
        let cell = grid.hx().max(grid.hy());
        match rep {
            Ok(rep) => {
                let label_ok = family.matches(&rep.classification)
                    && rep.singular_estimates.len() == scene.singularities.len();
                let worst = scene
                    .singularities
                    .iter()
                    .map(|s| {
                        rep.singular_estimates
                            .iter()
                            .map(|e| e.dist(*s))
                            .fold(f64::INFINITY, f64::min)
                    })
                    .fold(0.0f64, f64::max);
                let ok = label_ok && worst <= cell && dt < 30.0;
                pass &= ok;
                details.push(format!(
                    "{} {} ({:.2} cells, {dt:.1}s)",
                    family.label(),
                    if ok { "ok" } else { "FAIL" },
                    worst / cell
                ));
            }
            Err(e) => {
                pass = false;
                details.push(format!("{} FAIL ({e})", family.label()));
            }
        }
    }
    record(
        out,
        "7 structure inference from grids",
        pass,
        details.join(", "),
    );
}

fn criterion_8(out: &mut Vec<Outcome>) {
    let mut rng = scene_rng(8000);
    let mut bad = Vec::new();
    for i in 0..100 {
        let n = 3 + i % 6;
        let verts = random_polygon(&mut rng, n);
        let hull = convex_hull(&verts).expect("input polygon");
        let scene = match build_polyhedral(&verts, None) {
            Ok(s) => s,
            Err(e) => {
                bad.push(format!("draw {i}: build failed: {e}"));
                continue;
            }
        };
        let sing_hull = convex_hull(&scene.singularities).expect("singularity hull");
        if sing_hull != hull {
            bad.push(format!("draw {i}: singularity hull differs from input"));
            continue;
        }
        for k in 0..hull.n() {
            let expect = exterior_sector(&hull, k);
            let found = scene.pieces.iter().any(|p| match p {
                Piece::Conical { vertex, sector, .. } => {
                    *vertex == expect.vertex
                        && (sector.theta_b - expect.theta_b).abs() <= 1e-12
                        && (sector.theta_f - expect.theta_f).abs() <= 1e-12
                }
                _ => false,
            });
            if !found {
                bad.push(format!("draw {i}: no cone matches exterior sector {k}"));
            }
        }
        // u vanishes on the hull: centroid mixtures and edge midpoints
        let mut max_u = 0.0f64;
        for _ in 0..20 {
            let mut p = Point2::ORIGIN;
            let mut total = 0.0;
            for k in 0..hull.n() {
                let w: f64 = rng.gen_range(0.05..1.0);
                let v = hull.vertex(k as isize);
                p = Point2::new(p.x + w * v.x, p.y + w * v.y);
                total += w;
            }
            p = Point2::new(p.x / total, p.y / total);
            max_u = max_u.max(scene.evaluate(p).expect("interior point").value.abs());
        }
        for k in 0..hull.n() {
            let (a, b) = (hull.vertex(k as isize), hull.vertex(k as isize + 1));
            let mid = Point2::new(0.5 * (a.x + b.x), 0.5 * (a.y + b.y));
            max_u = max_u.max(scene.evaluate(mid).expect("edge midpoint").value.abs());
        }
        if max_u > 1e-12 {
            bad.push(format!("draw {i}: |u| = {max_u:.2e} on the hull"));
        }
    }
    record(
        out,
        "8 polyhedral construction",
        bad.is_empty(),
        if bad.is_empty() {
            "100 polygons: hull, sectors and interior zero all exact".into()
        } else {
            format!("{} failures; first: {}", bad.len(), bad[0])
        },
    );
}

fn criterion_9(out: &mut Vec<Outcome>) {
    let mut checks = Vec::new();

    // genuinely non-developable fields must be rejected
    for (name, f) in [
        (
            "x^2+y^2",
            (|p: Point2| p.x * p.x + p.y * p.y) as fn(Point2) -> f64,
        ),
        ("xy", |p: Point2| p.x * p.y),
    ] {
        let grid = GridField::sample(f, (-2.0, 2.0, -2.0, 2.0), 129, 129, vec![]).unwrap();
        let residual = max_grid_residual(&grid, Mode::default());
        let rejected = matches!(
            infer_structure(&grid, &InferConfig::default()),
            Err(AnalyzeError::InconsistentField(_))
        );
        checks.push((
            residual > 1e-6 && rejected,
            format!("{name}: residual {residual:.2e}, inference rejects: {rejected}"),
        ));
    }

    // first-harmonic density violates the periodic solvability condition
    let cone = build_full_cone(Point2::ORIGIN, 0.0, &TrigSeries::single(1.0, 1.0, 0.0));
    checks.push((
        matches!(cone, Err(BuildError::Profile(_))),
        format!("cos(theta) full cone rejected: {}", cone.is_err()),
    ));

    // collinear input has no strictly convex hull
    let collinear = build_polyhedral(
        &[
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(2.0, 0.0),
        ],
        None,
    );
    checks.push((
        matches!(collinear, Err(BuildError::NonConvexInput(_))),
        format!("collinear polyhedral rejected: {}", collinear.is_err()),
    ));

    let pass = checks.iter().all(|(ok, _)| *ok);
    let detail = checks
        .iter()
        .map(|(_, d)| d.as_str())
        .collect::<Vec<_>>()
        .join("; ");
    record(out, "9 negative controls", pass, detail);
}

#[test]
fn acceptance() {
    let mut out = Vec::new();
    criterion_1(&mut out);
    criterion_2(&mut out);
    let (suite, suite_secs) = run_suite();
    criterion_3(&mut out, &suite);
    criterion_4(&mut out, &suite);
    criterion_5(&mut out, &suite, suite_secs);
    criterion_6(&mut out, &suite);
    criterion_7(&mut out);
    criterion_8(&mut out);
    criterion_9(&mut out);

    let mut all = true;
    for o in &out {
        println!(
            "criterion {}: {} - {}",
            o.name,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        all &= o.pass;
    }
    assert!(all, "acceptance criteria failed; see the lines above");
}
