//! Verification and classification of piecewise solutions: PDE residual,
//! ruling tracing, direction fans, strip detection, admissibility, gradient
//! bounds and the case taxonomy.

use crate::error::AnalyzeError;
use crate::exec::{self, Mode};
use crate::plane::{
    convex_hull, exterior_sector, norm_angle, unit, ConvexPolygon, Line, Point2, Ray, Strip, Vec2,
};
use crate::scene::{Piece, Scene, SymMat2};
use rand::Rng;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum RulingGeom {
    Line(Line),
    Ray(Ray),
    /// Invalid for a genuine solution: recorded so the violation can surface.
    Segment(crate::plane::Segment),
}

/// Maximal constant-gradient line through a non-umbilic point.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Ruling {
    pub geometry: RulingGeom,
    pub gradient: Vec2,
    /// Singularity ids at the finite endpoints (0, 1 or 2 entries).
    pub endpoints: Vec<usize>,
    pub piece: usize,
    pub violation: Option<String>,
}

/// Directions of half-line rulings emanating from one singularity, grouped
/// into disjoint arcs `(theta_b, theta_f)` of positive width.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DirectionFan {
    pub singularity: usize,
    pub arcs: Vec<(f64, f64)>,
}

/// Taxonomy of entire solutions by singularity count and ruling structure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Classification {
    Cylinder,
    FullCone,
    HalfCylinderHalfCone,
    TwoSingular { variant: u8 },
    Polyhedral(ConvexPolygon),
    NonAdmissibleOther,
}

impl Classification {
    pub fn label(&self) -> String {
        match self {
            Classification::Cylinder => "Cylinder".into(),
            Classification::FullCone => "FullCone".into(),
            Classification::HalfCylinderHalfCone => "HalfCylinderHalfCone".into(),
            Classification::TwoSingular { variant } => format!("TwoSingular{{{variant}}}"),
            Classification::Polyhedral(p) => format!("Polyhedral{{{} vertices}}", p.n()),
            Classification::NonAdmissibleOther => "NonAdmissibleOther".into(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GradientBound {
    pub singularity: usize,
    pub radii: Vec<f64>,
    pub sups: Vec<f64>,
    /// sup over the smallest circle does not exceed the largest one's.
    pub bounded: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerificationReport {
    pub max_residual: f64,
    pub max_value_jump: f64,
    pub max_grad_jump: f64,
    pub max_hess_jump: f64,
    pub max_transverse_hess: f64,
    pub gradient_bounds: Vec<GradientBound>,
    pub violations: Vec<String>,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub samples: usize,
    pub traces: usize,
    pub seed: u64,
    pub tol_residual: f64,
    pub tol_value_jump: f64,
    pub tol_grad_jump: f64,
    pub tol_hess_jump: f64,
    pub tol_transverse: f64,
    /// samples per interface for the gluing checks
    pub iface_samples: usize,
    pub mode: Mode,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            samples: 10_000,
            traces: 400,
            seed: 0,
            tol_residual: 1e-10,
            tol_value_jump: 1e-9,
            tol_grad_jump: 1e-9,
            tol_hess_jump: 1e-9,
            tol_transverse: 1e-12,
            iface_samples: 100,
            mode: Mode::default(),
        }
    }
}

/// Signed normalized residual `det H / (1 + ||H||^2)` of the exact field.
pub fn pde_residual(scene: &Scene, p: Point2) -> Result<f64, AnalyzeError> {
    let r = scene.evaluate(p)?;
    Ok(r.hessian.det() / (1.0 + r.hessian.frob2()))
}

/// Traces the constant-gradient line through a non-umbilic point of an exact
/// scene: a ray from the vertex on conical pieces, a full line on genuinely
/// cylindrical ones.
pub fn trace_ruling(scene: &Scene, p: Point2) -> Result<Ruling, AnalyzeError> {
    let r = scene.evaluate(p)?;
    if r.umbilic {
        return Err(AnalyzeError::UmbilicPoint);
    }
    let eps = scene.eps_geo();
    match &scene.pieces[r.piece] {
        Piece::Conical { vertex, .. } => {
            let theta = p.sub(*vertex).angle();
            let endpoint = scene
                .singularities
                .iter()
                .position(|s| s.dist(*vertex) <= eps);
            let violation = endpoint.is_none().then(|| {
                format!(
                    "ruling terminates at ({}, {}) inside the smooth region",
                    vertex.x, vertex.y
                )
            });
            Ok(Ruling {
                geometry: RulingGeom::Ray(Ray::new(*vertex, theta)),
                gradient: r.gradient,
                endpoints: endpoint.into_iter().collect(),
                piece: r.piece,
                violation,
            })
        }
        Piece::Cylindrical { frame_theta, .. } => Ok(Ruling {
            geometry: RulingGeom::Line(Line::through(p, frame_theta + PI / 2.0)),
            gradient: r.gradient,
            endpoints: vec![],
            piece: r.piece,
            violation: None,
        }),
        Piece::Linear { .. } => Err(AnalyzeError::UmbilicPoint),
    }
}

/// Groups half-line rulings by terminal singularity and merges their
/// directions into arcs; directions further apart than `gap_tol` start a new
/// arc. Returns the fans plus violations (singularities with no rulings).
pub fn build_fans(
    rulings: &[Ruling],
    n_singularities: usize,
    gap_tol: f64,
) -> (Vec<DirectionFan>, Vec<String>) {
    let mut dirs: Vec<Vec<f64>> = vec![Vec::new(); n_singularities];
    for r in rulings {
        if let (RulingGeom::Ray(ray), Some(&id)) = (&r.geometry, r.endpoints.first()) {
            dirs[id].push(ray.dir.theta);
        }
    }
    let mut fans = Vec::new();
    let mut violations = Vec::new();
    for (id, d) in dirs.into_iter().enumerate() {
        let arcs = cluster_directions(&d, gap_tol);
        if arcs.is_empty() {
            violations.push(format!("singularity {id} has no ruling fan"));
        }
        fans.push(DirectionFan {
            singularity: id,
            arcs,
        });
    }
    (fans, violations)
}

/// Merges a direction sample into circular arcs split at gaps above `gap_tol`.
fn cluster_directions(dirs: &[f64], gap_tol: f64) -> Vec<(f64, f64)> {
    if dirs.is_empty() {
        return vec![];
    }
    let mut d: Vec<f64> = dirs.iter().map(|&t| norm_angle(t)).collect();
    d.sort_by(f64::total_cmp);
    d.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let n = d.len();
    if n == 1 {
        return vec![(d[0] - 1e-6, d[0] + 1e-6)];
    }
    // largest circular gap decides where the chain starts
    let mut gap_at = 0;
    let mut gap = -1.0;
    for i in 0..n {
        let g = norm_angle(d[(i + 1) % n] - d[i]);
        if g > gap {
            gap = g;
            gap_at = (i + 1) % n;
        }
    }
    if gap <= gap_tol {
        return vec![(0.0, TAU)];
    }
    let chain: Vec<f64> = (0..n).map(|k| d[(gap_at + k) % n]).collect();
    let mut arcs = Vec::new();
    let mut start = chain[0];
    let mut prev = chain[0];
    let mut prev_abs = chain[0];
    let mut start_abs = chain[0];
    for &t in &chain[1..] {
        let step = norm_angle(t - prev);
        let t_abs = prev_abs + step;
        if step > gap_tol {
            arcs.push(pad_arc(start_abs, prev_abs));
            start = t;
            start_abs = t_abs;
        }
        let _ = start;
        prev = t;
        prev_abs = t_abs;
    }
    arcs.push(pad_arc(start_abs, prev_abs));
    arcs
}

fn pad_arc(a: f64, b: f64) -> (f64, f64) {
    if b - a < 2e-6 {
        (a - 1e-6, b + 1e-6)
    } else {
        (a, b)
    }
}

/// Exact fans of a scene: one arc per genuinely conical piece at each
/// singular vertex.
pub fn exact_fans(scene: &Scene) -> (Vec<DirectionFan>, Vec<String>) {
    let eps = scene.eps_geo();
    let mut fans: Vec<DirectionFan> = (0..scene.singularities.len())
        .map(|id| DirectionFan {
            singularity: id,
            arcs: vec![],
        })
        .collect();
    for piece in &scene.pieces {
        if let Piece::Conical {
            vertex,
            sector,
            profile,
            ..
        } = piece
        {
            if profile.kappa.is_zero(1e-12) {
                continue;
            }
            if let Some(id) = scene
                .singularities
                .iter()
                .position(|s| s.dist(*vertex) <= eps)
            {
                fans[id].arcs.push((sector.theta_b, sector.theta_f));
            }
        }
    }
    let violations = fans
        .iter()
        .filter(|f| f.arcs.is_empty())
        .map(|f| format!("singularity {} has no ruling fan", f.singularity))
        .collect();
    (fans, violations)
}

fn arcs_overlap(a: (f64, f64), b: (f64, f64)) -> bool {
    let (s1, w1) = (norm_angle(a.0), a.1 - a.0);
    let (s2, w2) = (norm_angle(b.0), b.1 - b.0);
    if w1 >= TAU - 1e-12 || w2 >= TAU - 1e-12 {
        return true;
    }
    // angular slack: arcs sharing an endpoint up to rounding do not overlap
    let eps = 1e-9;
    norm_angle(s2 - s1) < w1 - eps || norm_angle(s1 - s2) < w2 - eps
}

/// True iff two disjoint open arcs of the circle can cover the two fans
/// separately: no arc overlap, and at most two label changes around the
/// circle.
pub fn separate_fans(a: &DirectionFan, b: &DirectionFan) -> bool {
    if a.arcs.is_empty() || b.arcs.is_empty() {
        return true;
    }
    for &x in &a.arcs {
        for &y in &b.arcs {
            if arcs_overlap(x, y) {
                return false;
            }
        }
    }
    let mut starts: Vec<(f64, u8)> = a
        .arcs
        .iter()
        .map(|&(s, _)| (norm_angle(s), 0u8))
        .chain(b.arcs.iter().map(|&(s, _)| (norm_angle(s), 1u8)))
        .collect();
    starts.sort_by(|x, y| x.0.total_cmp(&y.0));
    let n = starts.len();
    let transitions = (0..n)
        .filter(|&i| starts[i].1 != starts[(i + 1) % n].1)
        .count();
    transitions <= 2
}

/// Maximal strip of parallel full-line rulings, if the scene has any.
pub fn max_strip(scene: &Scene) -> Option<Strip> {
    scene.cylinder_strip()
}

/// A solution is admissible when no half-strip of the punctured plane is
/// affine; for a scene this means every umbilic piece occupies a bounded
/// region (an unbounded convex region with interior contains a half-strip).
pub fn admissible(scene: &Scene) -> bool {
    !scene.pieces.iter().any(|p| {
        let umbilic = match p {
            Piece::Linear { .. } => true,
            Piece::Conical { profile, .. } => profile.kappa.is_zero(1e-12),
            Piece::Cylindrical { profile, .. } => profile.kappa.is_zero(1e-12),
        };
        umbilic && !p.region().is_bounded()
    })
}

/// Sup of the gradient norm over circles of the given radii around a
/// singularity, each refined near the maximizing angle.
pub fn gradient_bound(scene: &Scene, singularity: usize, radii: &[f64]) -> GradientBound {
    let c = scene.singularities[singularity];
    let scale = scene.scale();
    let sup_at = |rho: f64| -> f64 {
        let g2 = |theta: f64| -> f64 {
            let p = c.add(unit(theta).scale(rho));
            match scene.evaluate(p) {
                Ok(r) => r.gradient.dot(r.gradient),
                Err(_) => f64::NEG_INFINITY,
            }
        };
        let n0 = 256;
        let coarse: Vec<f64> = (0..n0).map(|k| g2(TAU * k as f64 / n0 as f64)).collect();
        // refine every local maximum of the coarse scan; the global sup can
        // sit in a narrow peak that a single-seed refinement would miss
        let mut best = f64::NEG_INFINITY;
        for k in 0..n0 {
            let v = coarse[k];
            if !v.is_finite() || v < coarse[(k + n0 - 1) % n0] || v < coarse[(k + 1) % n0] {
                continue;
            }
            let mut seed_t = TAU * k as f64 / n0 as f64;
            let mut seed_v = v;
            let mut half = TAU / n0 as f64;
            for _ in 0..4 {
                let (lo, hi) = (seed_t - half, seed_t + half);
                for j in 0..=32 {
                    let t = lo + (hi - lo) * j as f64 / 32.0;
                    let w = g2(t);
                    if w > seed_v {
                        seed_v = w;
                        seed_t = t;
                    }
                }
                half /= 16.0;
            }
            best = best.max(seed_v);
        }
        best.max(0.0).sqrt()
    };
    let sups: Vec<f64> = radii.iter().map(|&r| sup_at(r)).collect();
    let bounded = match (sups.first(), sups.last()) {
        (Some(&f), Some(&l)) => l <= f + 1e-9 * scale,
        _ => true,
    };
    GradientBound {
        singularity,
        radii: radii.to_vec(),
        sups,
        bounded,
    }
}

/// Deterministic non-umbilic sample points covering every curved piece.
fn piece_samples(scene: &Scene, per_piece: usize) -> Vec<Point2> {
    let scale = scene.scale();
    let mut out = Vec::new();
    for piece in &scene.pieces {
        match piece {
            Piece::Conical {
                vertex,
                sector,
                profile,
                ..
            } => {
                if profile.kappa.is_zero(1e-12) {
                    continue;
                }
                let w = sector.width();
                for k in 0..per_piece {
                    let t = sector.theta_b + w * (k as f64 + 0.5) / per_piece as f64;
                    out.push(vertex.add(unit(t).scale(0.7 * scale)));
                }
            }
            Piece::Cylindrical {
                frame_theta,
                strip,
                profile,
                ..
            } => {
                if profile.kappa.is_zero(1e-12) {
                    continue;
                }
                let lo = strip.c_lo.unwrap_or(-3.0 * scale);
                let hi = strip.c_hi.unwrap_or(3.0 * scale);
                let e1 = unit(*frame_theta);
                let e2 = e1.perp();
                for k in 0..per_piece {
                    let x = lo + (hi - lo) * (k as f64 + 0.5) / per_piece as f64;
                    out.push(Point2::ORIGIN.add(e1.scale(x)).add(e2.scale(0.3 * scale)));
                }
            }
            Piece::Linear { .. } => {}
        }
    }
    out
}

/// Full numerical verification: residual sampling, interface jump checks,
/// ruling traces with structure checks, fans, strip and gradient bounds.
pub fn verify_scene(scene: &Scene, cfg: &VerifyConfig) -> VerificationReport {
    let scale = scene.scale();
    let mut violations: Vec<String> = Vec::new();

    // residual over random samples
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(cfg.seed);
    let r = 3.0 * scale;
    let pts: Vec<Point2> = (0..cfg.samples)
        .map(|_| Point2::new(rng.gen_range(-r..r), rng.gen_range(-r..r)))
        .filter(|p| {
            scene
                .singularities
                .iter()
                .all(|s| s.dist(*p) > 1e-6 * scale)
        })
        .collect();
    let max_residual = exec::max_f64(
        pts.len(),
        |i| match pde_residual(scene, pts[i]) {
            Ok(v) => v.abs(),
            Err(_) => f64::INFINITY,
        },
        cfg.mode,
    )
    .max(0.0);

    // interface jumps
    let mut max_value_jump: f64 = 0.0;
    let mut max_grad_jump: f64 = 0.0;
    let mut max_hess_jump: f64 = 0.0;
    let mut max_transverse: f64 = 0.0;
    for f in &scene.interfaces {
        let tangent = f.geometry.tangent();
        let normal = tangent.perp();
        // conical Hessians carry a 1/rho factor that amplifies the atan2
        // rounding of sample points near the vertex; compare the curvature
        // densities (rho-weighted Hessians) instead, with the angle snapped
        // to the sector boundary when within rounding distance. On a valid
        // interface both densities vanish, so this still checks the gluing
        // condition directly.
        let weighted_hess = |idx: usize, p: Point2| -> SymMat2 {
            match &scene.pieces[idx] {
                Piece::Conical {
                    vertex,
                    sector,
                    profile,
                    ..
                } => {
                    let v = p.sub(*vertex);
                    if v.norm() == 0.0 {
                        return SymMat2::ZERO;
                    }
                    let mut th = sector.local_angle(v.angle());
                    if th > sector.theta_f {
                        // wrap noise: clamp to the nearest sector endpoint
                        let beyond_far = th - sector.theta_f;
                        let below_near = std::f64::consts::TAU - (th - sector.theta_b);
                        th = if below_near < beyond_far {
                            sector.theta_b
                        } else {
                            sector.theta_f
                        };
                    }
                    for b in [sector.theta_b, sector.theta_f] {
                        if (th - b).abs() < 1e-9 {
                            th = b;
                        }
                    }
                    let e_theta = crate::plane::unit(th + std::f64::consts::FRAC_PI_2);
                    SymMat2::outer(e_theta, profile.kappa_at(th))
                }
                Piece::Cylindrical { .. } => match scene.pieces[idx].eval_raw(p) {
                    Ok((_, _, h)) => h,
                    Err(_) => SymMat2::ZERO,
                },
                Piece::Linear { .. } => SymMat2::ZERO,
            }
        };
        let m = cfg.iface_samples.max(2);
        for k in 1..=m {
            let p = f.geometry.point_at(k as f64 / (m + 1) as f64, 3.0 * scale);
            let ea = scene.pieces[f.a].eval_raw(p);
            let eb = scene.pieces[f.b].eval_raw(p);
            let (Ok((va, ga, _)), Ok((vb, gb, _))) = (ea, eb) else {
                violations.push(format!(
                    "interface {}-{} not evaluable at ({}, {})",
                    f.a, f.b, p.x, p.y
                ));
                continue;
            };
            max_value_jump = max_value_jump.max((va - vb).abs() / (1.0 + va.abs().max(vb.abs())));
            max_grad_jump = max_grad_jump.max((ga - gb).norm() / (1.0 + ga.norm().max(gb.norm())));
            let (ha, hb) = (weighted_hess(f.a, p), weighted_hess(f.b, p));
            max_hess_jump =
                max_hess_jump.max(ha.sub(&hb).frob() / (1.0 + ha.frob().max(hb.frob())));
            max_transverse = max_transverse
                .max(ha.quad(normal).abs())
                .max(hb.quad(normal).abs());
        }
    }

    // ruling traces: deterministic per-piece coverage plus random samples
    let mut pts = piece_samples(scene, 48);
    for _ in 0..cfg.traces {
        pts.push(Point2::new(rng.gen_range(-r..r), rng.gen_range(-r..r)));
    }
    let mut rulings = Vec::new();
    for p in pts {
        match trace_ruling(scene, p) {
            Ok(ru) => {
                if let Some(v) = &ru.violation {
                    violations.push(v.clone());
                }
                if let RulingGeom::Segment(_) = ru.geometry {
                    violations.push("segment ruling traced".into());
                }
                rulings.push(ru);
            }
            Err(AnalyzeError::UmbilicPoint) | Err(AnalyzeError::SingularPoint) => {}
            Err(e) => violations.push(format!("trace failed: {e}")),
        }
    }
    // one smooth component is one piece: its rulings must be all concurrent
    // (cone) or all parallel (cylinder)
    for i in 0..scene.pieces.len() {
        let of_piece: Vec<&Ruling> = rulings.iter().filter(|ru| ru.piece == i).collect();
        for w in of_piece.windows(2) {
            let ok = match (&w[0].geometry, &w[1].geometry) {
                (RulingGeom::Ray(a), RulingGeom::Ray(b)) => a.origin.dist(b.origin) <= 1e-9 * scale,
                (RulingGeom::Line(a), RulingGeom::Line(b)) => {
                    crate::plane::angle_diff(2.0 * a.normal.theta, 2.0 * b.normal.theta).abs()
                        < 1e-9
                }
                _ => false,
            };
            if !ok {
                violations.push(format!(
                    "rulings of piece {i} are neither concurrent nor parallel"
                ));
                break;
            }
        }
    }

    // fans and their pairwise separation
    let (fans, fan_violations) = exact_fans(scene);
    violations.extend(fan_violations);
    for i in 0..fans.len() {
        for j in (i + 1)..fans.len() {
            if !separate_fans(&fans[i], &fans[j]) {
                violations.push(format!(
                    "fans of singularities {i} and {j} are not separable"
                ));
            }
        }
    }

    // strip structure
    if let Some(strip) = max_strip(scene) {
        for c in [strip.c_lo, strip.c_hi].into_iter().flatten() {
            let carried = scene
                .singularities
                .iter()
                .any(|s| (strip.coord(*s) - c).abs() <= 1e-9 * scale);
            if !carried {
                violations.push(format!(
                    "strip boundary at offset {c} carries no singularity"
                ));
            }
        }
        if admissible(scene) && scene.singularities.len() > 2 {
            violations.push(
                "admissible scene with a full-line ruling has more than 2 singularities".into(),
            );
        }
    }

    // gradient bounds near each singularity
    let radii = [scale, 0.1 * scale, 0.01 * scale, 0.001 * scale];
    let gradient_bounds: Vec<GradientBound> = (0..scene.singularities.len())
        .map(|id| gradient_bound(scene, id, &radii))
        .collect();
    for gb in &gradient_bounds {
        if !gb.bounded {
            violations.push(format!(
                "gradient sup grows toward singularity {}",
                gb.singularity
            ));
        }
    }

    let pass = max_residual <= cfg.tol_residual
        && max_value_jump <= cfg.tol_value_jump
        && max_grad_jump <= cfg.tol_grad_jump
        && max_hess_jump <= cfg.tol_hess_jump
        && max_transverse <= cfg.tol_transverse
        && violations.is_empty();
    VerificationReport {
        max_residual,
        max_value_jump,
        max_grad_jump,
        max_hess_jump,
        max_transverse_hess: max_transverse,
        gradient_bounds,
        violations,
        pass,
    }
}

/// Decision tree over singularity count, strip structure and admissibility.
/// Refuses unverified input.
pub fn classify(
    scene: &Scene,
    report: &VerificationReport,
) -> Result<Classification, AnalyzeError> {
    if !report.pass {
        return Err(AnalyzeError::Unverified(
            "verification report does not pass".into(),
        ));
    }
    let n = scene.singularities.len();
    let scale = scene.scale();
    match n {
        0 => Ok(Classification::Cylinder),
        1 => {
            if scene.has_line_rulings() {
                Ok(Classification::HalfCylinderHalfCone)
            } else {
                Ok(Classification::FullCone)
            }
        }
        2 => {
            let variant = match max_strip(scene) {
                Some(strip) => match (strip.c_lo, strip.c_hi) {
                    (Some(_), Some(_)) => 1,
                    (Some(c), None) | (None, Some(c)) => {
                        let on_line = scene
                            .singularities
                            .iter()
                            .filter(|s| (strip.coord(**s) - c).abs() <= 1e-9 * scale)
                            .count();
                        match on_line {
                            2 => 2,
                            1 => 3,
                            _ => {
                                return Err(AnalyzeError::StructureViolation(
                                    "half-plane strip without a boundary singularity".into(),
                                ))
                            }
                        }
                    }
                    (None, None) => {
                        return Err(AnalyzeError::StructureViolation(
                            "whole-plane cylinder with singularities".into(),
                        ))
                    }
                },
                None => 4,
            };
            Ok(Classification::TwoSingular { variant })
        }
        _ => {
            if !admissible(scene) {
                return Ok(Classification::NonAdmissibleOther);
            }
            let hull = convex_hull(&scene.singularities).map_err(|e| {
                AnalyzeError::StructureViolation(format!("singularities are degenerate: {e}"))
            })?;
            if hull.n() != n {
                return Err(AnalyzeError::StructureViolation(
                    "some singularities are not hull vertices".into(),
                ));
            }
            if scene.has_line_rulings() {
                return Err(AnalyzeError::StructureViolation(
                    "full-line ruling with 3 or more singularities".into(),
                ));
            }
            // each hull vertex carries exactly the exterior sector as its cone
            for i in 0..hull.n() {
                let want = exterior_sector(&hull, i);
                let found = scene.pieces.iter().any(|p| match p {
                    Piece::Conical { vertex, sector, .. } => {
                        vertex.dist(want.vertex) <= 1e-9 * scale
                            && crate::plane::angle_diff(sector.theta_b, want.theta_b).abs() < 1e-9
                            && (sector.width() - want.width()).abs() < 1e-9
                    }
                    _ => false,
                });
                if !found {
                    return Err(AnalyzeError::StructureViolation(format!(
                        "vertex {i}: cone sector does not match the exterior sector"
                    )));
                }
            }
            Ok(Classification::Polyhedral(hull))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::TrigSeries;
    use crate::scene::build_full_cone;

    fn distance_cone() -> Scene {
        // kappa = 1 gives alpha = 1: u = |p|
        build_full_cone(Point2::ORIGIN, 0.0, &TrigSeries::constant(1.0)).unwrap()
    }

    #[test]
    fn distance_cone_rulings_and_fan() {
        let scene = distance_cone();
        let ru = trace_ruling(&scene, Point2::new(1.0, 1.0)).unwrap();
        match &ru.geometry {
            RulingGeom::Ray(r) => {
                assert!(r.origin.dist(Point2::ORIGIN) < 1e-12);
                assert!((r.dir.theta - PI / 4.0).abs() < 1e-12);
            }
            _ => panic!("expected a half-line"),
        }
        let s = 0.5_f64.sqrt();
        assert!((ru.gradient - Vec2::new(s, s)).norm() < 1e-12);
        assert_eq!(ru.endpoints, vec![0]);
        let (fans, viol) = exact_fans(&scene);
        assert!(viol.is_empty());
        assert_eq!(fans.len(), 1);
        assert_eq!(fans[0].arcs.len(), 1);
        assert!((fans[0].arcs[0].1 - fans[0].arcs[0].0 - TAU).abs() < 1e-12);
    }

    #[test]
    fn distance_cone_gradient_bound_is_one() {
        let scene = distance_cone();
        let gb = gradient_bound(&scene, 0, &[1.0, 0.1, 0.01]);
        for s in &gb.sups {
            assert!((s - 1.0).abs() < 1e-12, "sup {s}");
        }
        assert!(gb.bounded);
    }

    #[test]
    fn residual_vanishes_on_cone() {
        let scene = distance_cone();
        let v = pde_residual(&scene, Point2::new(3.0, 4.0)).unwrap();
        assert!(v.abs() < 1e-15);
    }

    #[test]
    fn fan_separation_examples() {
        let f = |id, arcs: Vec<(f64, f64)>| DirectionFan {
            singularity: id,
            arcs,
        };
        assert!(separate_fans(
            &f(0, vec![(0.0, PI / 4.0)]),
            &f(1, vec![(PI, 5.0 * PI / 4.0)])
        ));
        assert!(!separate_fans(
            &f(0, vec![(0.0, PI)]),
            &f(1, vec![(PI / 2.0, 3.0 * PI / 2.0)])
        ));
        assert!(separate_fans(&f(0, vec![]), &f(1, vec![(0.0, 1.0)])));
        // split fan around an enclosed one: still separable (wraps to two
        // transitions)
        assert!(separate_fans(
            &f(0, vec![(0.0, 1.0), (2.0, 3.0)]),
            &f(1, vec![(1.2, 1.8)])
        ));
        // interleaved arcs are not
        assert!(!separate_fans(
            &f(0, vec![(0.0, 1.0), (2.0, 3.0)]),
            &f(1, vec![(1.2, 1.8), (3.5, 4.5)])
        ));
    }

    #[test]
    fn direction_clustering() {
        let dirs: Vec<f64> = (0..64)
            .map(|k| 0.3 + 1.0 * k as f64 / 63.0)
            .chain((0..64).map(|k| 2.5 + 1.0 * k as f64 / 63.0))
            .collect();
        let arcs = cluster_directions(&dirs, 0.2);
        assert_eq!(arcs.len(), 2);
        assert!((arcs[0].0 - 0.3).abs() < 1e-9 && (arcs[0].1 - 1.3).abs() < 1e-9);
        // wrap-around cluster stays one arc
        let dirs: Vec<f64> = (0..64).map(|k| 6.0 + 0.6 * k as f64 / 63.0).collect();
        let arcs = cluster_directions(&dirs, 0.2);
        assert_eq!(arcs.len(), 1);
        assert!(arcs[0].1 - arcs[0].0 > 0.59 && arcs[0].1 - arcs[0].0 < 0.61);
    }

    #[test]
    fn full_cone_verifies_and_classifies() {
        let scene = distance_cone();
        let report = verify_scene(&scene, &VerifyConfig::default());
        assert!(report.pass, "violations: {:?}", report.violations);
        assert_eq!(classify(&scene, &report).unwrap(), Classification::FullCone);
    }
}
