//! Scene builders for the known solution families: cylinders, full cones,
//! the half-cylinder / half-cone split, the four two-singularity families and
//! polyhedral scenes over a strictly convex polygon.
//!
//! Every builder solves the gluing conditions exactly: a conical piece
//! between two affine neighbors takes its initial data from the harmonic
//! profile of one neighbor and a density whose moment defect bridges to the
//! other; densities vanish at interface angles so the transverse Hessian is
//! continuous.

use super::{IfaceGeom, Interface, Piece, Scene};
use crate::error::BuildError;
use crate::plane::{
    angle_diff, convex_hull, intersect_intervals, norm_angle, unit, ConvexCell, Direction,
    HalfPlane, Line, Point2, Ray, Sector, Segment, Strip, Vec2,
};
use crate::profile::{
    default_cone_basis, harmonic_profile, periodic_profile, solve_kappa_cone, AffineData,
    ConeProfile, ConeSpan, CylProfile, TrigSeries,
};
use std::f64::consts::{PI, TAU};

/// Boundary affine data of a cylindrical piece along the line `x = x_r`
/// (frame coordinates): the first-order expansion of the piece there.
fn cyl_boundary_affine(frame_theta: f64, v0: f64, profile: &CylProfile, x_r: f64) -> AffineData {
    let e1 = unit(frame_theta);
    let e2 = e1.perp();
    let (a, da, _) = profile.eval(x_r);
    AffineData {
        g: e1.scale(da) + e2.scale(v0),
        c: a - da * x_r,
    }
}

/// Builds a conical piece on the sector `(theta_b, theta_f)` at `vertex`
/// whose boundary data match `aff_b` at `theta_b` and `aff_f` at `theta_f`,
/// with an endpoint-vanishing density from `basis`.
fn cone_between_affines(
    vertex: Point2,
    theta_b: f64,
    theta_f: f64,
    aff_b: &AffineData,
    aff_f: &AffineData,
    basis: Option<&[TrigSeries]>,
) -> Result<Piece, BuildError> {
    let scale = 1.0 + vertex.to_vec().norm();
    let vb = aff_b.eval(vertex);
    let vf = aff_f.eval(vertex);
    if (vb - vf).abs() > 1e-9 * scale {
        return Err(BuildError::GluingInfeasible(format!(
            "neighboring affine data disagree at the vertex ({vb} vs {vf})"
        )));
    }
    let (alpha_b, dalpha_b) = harmonic_profile(aff_b, theta_b);
    let (hb_f, dhb_f) = harmonic_profile(aff_b, theta_f);
    let (hf_f, dhf_f) = harmonic_profile(aff_f, theta_f);
    let target = (hf_f - hb_f, dhf_f - dhb_f);
    let default = default_cone_basis(theta_b, theta_f);
    let basis = basis.unwrap_or(&default);
    let coeffs = solve_kappa_cone(basis, theta_b, theta_f, target, true)?;
    let kappa = TrigSeries::combine(basis, &coeffs);
    if kappa.is_zero(1e-9) {
        return Err(BuildError::NotSingular);
    }
    let profile = ConeProfile {
        theta_b,
        span: ConeSpan::UpTo(theta_f),
        alpha_b,
        dalpha_b,
        kappa,
    };
    // confirm the far end actually matches
    let (af, daf, _) = profile.eval(theta_f);
    if (af - hf_f).abs() > 1e-9 * scale || (daf - dhf_f).abs() > 1e-9 * scale {
        return Err(BuildError::GluingInfeasible(
            "moment solve did not reach the far boundary data".into(),
        ));
    }
    Ok(Piece::Conical {
        vertex,
        sector: Sector::new(vertex, theta_b, theta_f),
        u0: vb,
        profile,
    })
}

/// Computes all pairwise interfaces from region closures along the support
/// lines of the piece boundaries, then validates the assembled scene.
fn finish_scene(pieces: Vec<Piece>, singularities: Vec<Point2>) -> Result<Scene, BuildError> {
    let mut scene = Scene {
        pieces,
        interfaces: Vec::new(),
        singularities,
    };
    let scale = scene.scale();
    let eps = 1e-9 * scale;
    let mut lines: Vec<Line> = Vec::new();
    for piece in &scene.pieces {
        for l in piece.region().support_lines() {
            if !lines.iter().any(|m| m.same_line(&l, 1e-7 * scale)) {
                lines.push(l);
            }
        }
    }
    let min_len = 1e-6 * scale;
    let mut interfaces = Vec::new();
    for i in 0..scene.pieces.len() {
        for j in (i + 1)..scene.pieces.len() {
            let ri = scene.pieces[i].region();
            let rj = scene.pieces[j].region();
            for line in &lines {
                let ia = ri.closure_on_line(line, eps);
                let ib = rj.closure_on_line(line, eps);
                for (t0, t1) in intersect_intervals(&ia, &ib) {
                    if t1 - t0 <= min_len {
                        continue;
                    }
                    let tangent_theta = line.tangent().angle();
                    let geometry = match (t0.is_finite(), t1.is_finite()) {
                        (false, false) => IfaceGeom::Line(*line),
                        (true, false) => IfaceGeom::Ray(Ray::new(line.at(t0), tangent_theta)),
                        (false, true) => IfaceGeom::Ray(Ray::new(line.at(t1), tangent_theta + PI)),
                        (true, true) => IfaceGeom::Segment(Segment::new(line.at(t0), line.at(t1))),
                    };
                    interfaces.push(Interface {
                        a: i,
                        b: j,
                        geometry,
                    });
                }
            }
        }
    }
    scene.interfaces = interfaces;
    scene.validate()?;
    Ok(scene)
}

/// Cylindrical solution `u = alpha(x) + v0 y` over the whole plane.
pub fn build_cylinder(frame_theta: f64, v0: f64, profile: CylProfile) -> Result<Scene, BuildError> {
    let base = profile.alpha_b;
    let piece = Piece::Cylindrical {
        frame_theta,
        strip: Strip {
            normal: Direction::new(frame_theta),
            c_lo: None,
            c_hi: None,
        },
        v0,
        profile,
        base,
    };
    finish_scene(vec![piece], vec![])
}

/// Conical solution over the punctured plane with a 2pi-periodic density.
pub fn build_full_cone(vertex: Point2, u0: f64, kappa: &TrigSeries) -> Result<Scene, BuildError> {
    if kappa.is_zero(1e-14) {
        return Err(BuildError::NotSingular);
    }
    let profile = periodic_profile(kappa)?;
    let piece = Piece::Conical {
        vertex,
        sector: Sector::new(vertex, 0.0, TAU),
        u0,
        profile,
    };
    finish_scene(vec![piece], vec![vertex])
}

/// Half-plane cylinder glued to a half-plane cone across the line through
/// `vertex` with tangent direction `line_theta`. The cone occupies the side
/// the direction `line_theta - pi/2` points into.
pub fn build_half_cone(
    vertex: Point2,
    line_theta: f64,
    cyl: CylProfile,
    v0: f64,
    cone_basis: Option<&[TrigSeries]>,
) -> Result<Scene, BuildError> {
    let frame_theta = line_theta - PI / 2.0;
    let e1 = unit(frame_theta);
    let x_r = e1.dot(vertex.to_vec());
    let kr = cyl.kappa_at(x_r);
    if kr.abs() > 1e-9 * (1.0 + cyl.kappa.coeff_norm()) {
        return Err(BuildError::GluingInfeasible(format!(
            "cylindrical density must vanish on the gluing line (kappa({x_r}) = {kr})"
        )));
    }
    let aff = cyl_boundary_affine(frame_theta, v0, &cyl, x_r);
    let cone = cone_between_affines(vertex, line_theta - PI, line_theta, &aff, &aff, cone_basis)?;
    let base = cyl.eval(cyl.x_b).0;
    let cyl_piece = Piece::Cylindrical {
        frame_theta,
        strip: Strip {
            normal: Direction::new(frame_theta),
            c_lo: None,
            c_hi: Some(x_r),
        },
        v0,
        profile: cyl,
        base,
    };
    finish_scene(vec![cyl_piece, cone], vec![vertex])
}

/// Parameters for the four two-singularity families.
#[derive(Clone, Debug)]
pub enum TwoSingularParams {
    /// Cylinder on a genuine strip, cones on both outer half-planes.
    /// `theta1`, `theta2` are the tangent directions of the boundary lines
    /// through `p1` and `p2` (they must be parallel).
    Strip {
        p1: Point2,
        p2: Point2,
        theta1: f64,
        theta2: f64,
        v0: f64,
        cyl: CylProfile,
    },
    /// Cylinder on a half-plane with both singularities on the boundary
    /// line; parallel half-lines `h1`, `h2` (absolute directions) bound an
    /// affine half-strip between the cones.
    HalfStrip {
        p1: Point2,
        p2: Point2,
        h_theta1: f64,
        h_theta2: f64,
        v0: f64,
        cyl: CylProfile,
    },
    /// Cylinder on a half-plane with `p1` on the boundary line (tangent
    /// `r_theta`) and `p2` strictly off it; an affine wedge region between
    /// relative angles `theta1 < theta2` (in `[0, pi]`) separates the cones.
    /// `g_lin` is the gradient of the affine region (defaults to the
    /// cylinder boundary gradient; forced to it when the wedge touches the
    /// boundary line).
    OffLine {
        p1: Point2,
        p2: Point2,
        r_theta: f64,
        theta1: f64,
        theta2: f64,
        g_lin: Option<Vec2>,
        v0: f64,
        cyl: CylProfile,
    },
    /// No cylinder: disjoint conical sectors at `p1` (absolute angles
    /// `thetas[0]..thetas[1]`) and `p2` (`thetas[2]..thetas[3]`, with
    /// `thetas[0] < thetas[1] <= thetas[2] < thetas[3] <= thetas[0] + 2pi`),
    /// affine `u = g . p + base` on the complement.
    Sectors {
        p1: Point2,
        p2: Point2,
        thetas: [f64; 4],
        g: Vec2,
        base: f64,
    },
}

/// Enumerates the convex cells cut out by `lines` whose interior satisfies
/// `class`, as half-plane intersections.
fn classified_cells(lines: &[Line], scale: f64, class: impl Fn(Point2) -> bool) -> Vec<ConvexCell> {
    let r = 100.0 * scale;
    let delta = 1e-6 * scale;
    let mut out = Vec::new();
    for mask in 0..(1u32 << lines.len()) {
        let halfplanes: Vec<HalfPlane> = lines
            .iter()
            .enumerate()
            .map(|(k, l)| {
                if mask & (1 << k) != 0 {
                    HalfPlane {
                        normal: l.normal,
                        offset: l.offset,
                    }
                } else {
                    HalfPlane {
                        normal: l.normal.opposite(),
                        offset: -l.offset,
                    }
                }
            })
            .collect();
        // interior sample by clipping a large box against shifted planes
        let mut poly = vec![
            Point2::new(-r, -r),
            Point2::new(r, -r),
            Point2::new(r, r),
            Point2::new(-r, r),
        ];
        for h in &halfplanes {
            poly = clip_polygon(&poly, h, delta);
            if poly.len() < 3 {
                break;
            }
        }
        if poly.len() < 3 {
            continue;
        }
        let area = polygon_area(&poly);
        if area < (10.0 * delta) * (10.0 * delta) {
            continue;
        }
        let c = polygon_centroid(&poly);
        if class(c) {
            out.push(ConvexCell { halfplanes });
        }
    }
    out
}

fn clip_polygon(poly: &[Point2], h: &HalfPlane, shift: f64) -> Vec<Point2> {
    let mut out = Vec::new();
    let n = poly.len();
    let inside = |p: Point2| h.slack(p) >= shift;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let ia = inside(a);
        let ib = inside(b);
        if ia {
            out.push(a);
        }
        if ia != ib {
            let sa = h.slack(a) - shift;
            let sb = h.slack(b) - shift;
            let t = sa / (sa - sb);
            out.push(a.add(b.sub(a).scale(t)));
        }
    }
    out
}

fn polygon_area(poly: &[Point2]) -> f64 {
    let n = poly.len();
    let mut s = 0.0;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        s += a.x * b.y - b.x * a.y;
    }
    0.5 * s.abs()
}

fn polygon_centroid(poly: &[Point2]) -> Point2 {
    let n = poly.len() as f64;
    let (sx, sy) = poly
        .iter()
        .fold((0.0, 0.0), |(sx, sy), p| (sx + p.x, sy + p.y));
    Point2::new(sx / n, sy / n)
}

pub fn build_two_singular(params: &TwoSingularParams) -> Result<Scene, BuildError> {
    match params {
        TwoSingularParams::Strip {
            p1,
            p2,
            theta1,
            theta2,
            v0,
            cyl,
        } => build_ts_strip(*p1, *p2, *theta1, *theta2, *v0, cyl),
        TwoSingularParams::HalfStrip {
            p1,
            p2,
            h_theta1,
            h_theta2,
            v0,
            cyl,
        } => build_ts_halfstrip(*p1, *p2, *h_theta1, *h_theta2, *v0, cyl),
        TwoSingularParams::OffLine {
            p1,
            p2,
            r_theta,
            theta1,
            theta2,
            g_lin,
            v0,
            cyl,
        } => build_ts_offline(*p1, *p2, *r_theta, *theta1, *theta2, *g_lin, *v0, cyl),
        TwoSingularParams::Sectors {
            p1,
            p2,
            thetas,
            g,
            base,
        } => build_ts_sectors(*p1, *p2, *thetas, *g, *base),
    }
}

fn build_ts_strip(
    p1: Point2,
    p2: Point2,
    theta1: f64,
    theta2: f64,
    v0: f64,
    cyl: &CylProfile,
) -> Result<Scene, BuildError> {
    let dpar = angle_diff(2.0 * theta1, 2.0 * theta2).abs();
    if dpar > 1e-9 {
        return Err(BuildError::BadGeometry(
            "strip boundary lines are not parallel".into(),
        ));
    }
    let n_theta = theta1 + PI / 2.0;
    let e1 = unit(n_theta);
    let c1 = e1.dot(p1.to_vec());
    let c2 = e1.dot(p2.to_vec());
    let scale = 1.0 + p1.to_vec().norm().max(p2.to_vec().norm());
    if (c1 - c2).abs() < 1e-9 * scale {
        return Err(BuildError::BadGeometry(
            "the two boundary lines coincide".into(),
        ));
    }
    let (c_lo, c_hi, p_lo, p_hi) = if c1 < c2 {
        (c1, c2, p1, p2)
    } else {
        (c2, c1, p2, p1)
    };
    for c in [c_lo, c_hi] {
        if cyl.kappa_at(c).abs() > 1e-9 * (1.0 + cyl.kappa.coeff_norm()) {
            return Err(BuildError::GluingInfeasible(format!(
                "cylindrical density must vanish on the boundary line x = {c}"
            )));
        }
    }
    let aff_lo = cyl_boundary_affine(n_theta, v0, cyl, c_lo);
    let aff_hi = cyl_boundary_affine(n_theta, v0, cyl, c_hi);
    let cone_lo = cone_between_affines(
        p_lo,
        n_theta + PI / 2.0,
        n_theta + 3.0 * PI / 2.0,
        &aff_lo,
        &aff_lo,
        None,
    )?;
    let cone_hi = cone_between_affines(
        p_hi,
        n_theta - PI / 2.0,
        n_theta + PI / 2.0,
        &aff_hi,
        &aff_hi,
        None,
    )?;
    let base = cyl.alpha_b;
    let cyl_piece = Piece::Cylindrical {
        frame_theta: n_theta,
        strip: Strip {
            normal: Direction::new(n_theta),
            c_lo: Some(c_lo),
            c_hi: Some(c_hi),
        },
        v0,
        profile: cyl.clone(),
        base,
    };
    finish_scene(vec![cyl_piece, cone_lo, cone_hi], vec![p1, p2])
}

fn build_ts_halfstrip(
    p1: Point2,
    p2: Point2,
    h_theta1: f64,
    h_theta2: f64,
    v0: f64,
    cyl: &CylProfile,
) -> Result<Scene, BuildError> {
    let scale = 1.0 + p1.to_vec().norm().max(p2.to_vec().norm());
    if p1.dist(p2) < 1e-9 * scale {
        return Err(BuildError::BadGeometry("singularities coincide".into()));
    }
    if angle_diff(h_theta1, h_theta2).abs() > 1e-9 {
        return Err(BuildError::BadGeometry(
            "the two half-lines are not parallel".into(),
        ));
    }
    let omega = p2.sub(p1).angle();
    let s = (h_theta1 - omega).sin();
    if s.abs() < 1e-9 {
        return Err(BuildError::BadGeometry(
            "half-lines are parallel to the boundary line".into(),
        ));
    }
    // orient the boundary so the half-lines point to the positive side
    let psi = if s > 0.0 {
        omega
    } else {
        norm_angle(omega + PI)
    };
    let t_rel = norm_angle(h_theta1 - psi); // in (0, pi)
    let u_dir = unit(psi);
    let (p_l, p_r) = if p1.sub(Point2::ORIGIN).dot(u_dir) <= p2.sub(Point2::ORIGIN).dot(u_dir) {
        (p1, p2)
    } else {
        (p2, p1)
    };
    let frame_theta = psi + PI / 2.0;
    let e1 = unit(frame_theta);
    let x_r = e1.dot(p1.to_vec());
    if cyl.kappa_at(x_r).abs() > 1e-9 * (1.0 + cyl.kappa.coeff_norm()) {
        return Err(BuildError::GluingInfeasible(
            "cylindrical density must vanish on the boundary line".into(),
        ));
    }
    let aff = cyl_boundary_affine(frame_theta, v0, cyl, x_r);
    let cone_r = cone_between_affines(p_r, psi, psi + t_rel, &aff, &aff, None)?;
    let cone_l = cone_between_affines(p_l, psi + t_rel, psi + PI, &aff, &aff, None)?;
    // affine half-strip between the two half-lines, above the boundary
    let toward_r = p_r.sub(p_l);
    let n_h = unit(h_theta1 + PI / 2.0);
    let sgn = if toward_r.dot(n_h) > 0.0 { 1.0 } else { -1.0 };
    let region = ConvexCell {
        halfplanes: vec![
            HalfPlane::at_point(p_l, frame_theta),
            HalfPlane::at_point(p_l, n_h.scale(sgn).angle()),
            HalfPlane::at_point(p_r, n_h.scale(-sgn).angle()),
        ],
    };
    let linear = Piece::Linear { aff, region };
    let base = cyl.alpha_b;
    let cyl_piece = Piece::Cylindrical {
        frame_theta,
        strip: Strip {
            normal: Direction::new(frame_theta),
            c_lo: None,
            c_hi: Some(x_r),
        },
        v0,
        profile: cyl.clone(),
        base,
    };
    finish_scene(vec![cyl_piece, cone_r, cone_l, linear], vec![p1, p2])
}

#[allow(clippy::too_many_arguments)]
fn build_ts_offline(
    p1: Point2,
    p2: Point2,
    r_theta: f64,
    theta1: f64,
    theta2: f64,
    g_lin: Option<Vec2>,
    v0: f64,
    cyl: &CylProfile,
) -> Result<Scene, BuildError> {
    let scale = 1.0 + p1.to_vec().norm().max(p2.to_vec().norm());
    let cr = unit(r_theta).cross(p2.sub(p1));
    if cr.abs() < 1e-9 * scale {
        return Err(BuildError::BadGeometry(
            "the off-line singularity lies on the boundary line".into(),
        ));
    }
    let psi = if cr > 0.0 {
        r_theta
    } else {
        norm_angle(r_theta + PI)
    };
    let tol = 1e-9;
    if !(theta1 >= -tol && theta1 < theta2 && theta2 <= PI + tol) {
        return Err(BuildError::BadGeometry(format!(
            "wedge angles must satisfy 0 <= {theta1} < {theta2} <= pi"
        )));
    }
    let t1_zero = theta1 <= tol;
    let t2_pi = theta2 >= PI - tol;
    if t1_zero && t2_pi {
        return Err(BuildError::BadGeometry(
            "no conical sector remains at the on-line singularity".into(),
        ));
    }
    let rel = norm_angle(p2.sub(p1).angle() - psi);
    if rel < theta1 - 1e-9 || rel > theta2 + 1e-9 {
        return Err(BuildError::BadGeometry(
            "the off-line singularity is outside the affine wedge".into(),
        ));
    }
    let frame_theta = psi + PI / 2.0;
    let e1 = unit(frame_theta);
    let x_r = e1.dot(p1.to_vec());
    if cyl.kappa_at(x_r).abs() > 1e-9 * (1.0 + cyl.kappa.coeff_norm()) {
        return Err(BuildError::GluingInfeasible(
            "cylindrical density must vanish on the boundary line".into(),
        ));
    }
    let aff_a = cyl_boundary_affine(frame_theta, v0, cyl, x_r);
    let g_l = g_lin.unwrap_or(aff_a.g);
    if (t1_zero || t2_pi) && (g_l - aff_a.g).norm() > 1e-9 {
        return Err(BuildError::GluingInfeasible(
            "the affine wedge touches the boundary line; its gradient is forced".into(),
        ));
    }
    let aff_l = AffineData {
        g: g_l,
        c: aff_a.eval(p1) - g_l.dot(p1.to_vec()),
    };
    let mut pieces = Vec::new();
    let base = cyl.alpha_b;
    pieces.push(Piece::Cylindrical {
        frame_theta,
        strip: Strip {
            normal: Direction::new(frame_theta),
            c_lo: None,
            c_hi: Some(x_r),
        },
        v0,
        profile: cyl.clone(),
        base,
    });
    if !t1_zero {
        pieces.push(cone_between_affines(
            p1,
            psi,
            psi + theta1,
            &aff_a,
            &aff_l,
            None,
        )?);
    }
    if !t2_pi {
        pieces.push(cone_between_affines(
            p1,
            psi + theta2,
            psi + PI,
            &aff_l,
            &aff_a,
            None,
        )?);
    }
    pieces.push(cone_between_affines(
        p2,
        psi + theta1,
        psi + theta2,
        &aff_l,
        &aff_l,
        None,
    )?);
    // affine cells: inside the wedge at p1, outside the translated wedge at p2
    let s1 = Sector::new(p1, psi + theta1, psi + theta2);
    let s2 = Sector::new(p2, psi + theta1, psi + theta2);
    let lines = dedup_lines(
        vec![
            Line::through(p1, psi),
            Line::through(p1, psi + theta1),
            Line::through(p1, psi + theta2),
            Line::through(p2, psi + theta1),
            Line::through(p2, psi + theta2),
        ],
        scale,
    );
    let above = HalfPlane::at_point(p1, frame_theta);
    let cells = classified_cells(&lines, scale, |p| {
        above.slack(p) > 0.0 && s1.contains_open(p, 0.0) && !s2.contains_closed(p, 0.0)
    });
    if cells.is_empty() {
        return Err(BuildError::BadGeometry(
            "the affine wedge region is empty".into(),
        ));
    }
    for region in cells {
        pieces.push(Piece::Linear { aff: aff_l, region });
    }
    finish_scene(pieces, vec![p1, p2])
}

fn dedup_lines(lines: Vec<Line>, scale: f64) -> Vec<Line> {
    let mut out: Vec<Line> = Vec::new();
    for l in lines {
        if !out.iter().any(|m| m.same_line(&l, 1e-9 * scale)) {
            out.push(l);
        }
    }
    out
}

fn build_ts_sectors(
    p1: Point2,
    p2: Point2,
    thetas: [f64; 4],
    g: Vec2,
    base: f64,
) -> Result<Scene, BuildError> {
    let scale = 1.0 + p1.to_vec().norm().max(p2.to_vec().norm());
    if p1.dist(p2) < 1e-9 * scale {
        return Err(BuildError::BadGeometry("singularities coincide".into()));
    }
    let [t1, t2, t3, t4] = thetas;
    let tol = 1e-9;
    if !(t1 < t2 - tol && t2 <= t3 + tol && t3 < t4 - tol && t4 <= t1 + TAU + tol) {
        return Err(BuildError::BadGeometry(format!(
            "sector angles must be ordered t1 < t2 <= t3 < t4 <= t1 + 2pi, got {thetas:?}"
        )));
    }
    let s1 = Sector::new(p1, t1, t2);
    let s2 = Sector::new(p2, t3, t4);
    if s1.contains_open(p2, 1e-9 * scale) || s2.contains_open(p1, 1e-9 * scale) {
        return Err(BuildError::BadGeometry(
            "a sector contains the other singularity".into(),
        ));
    }
    // sampled disjointness check
    for k in 0..40 {
        let th = t1 + (t2 - t1) * (k as f64 + 0.5) / 40.0;
        for rho in [0.1 * scale, scale, 10.0 * scale] {
            let p = p1.add(unit(th).scale(rho));
            if s2.contains_open(p, 0.0) {
                return Err(BuildError::BadGeometry(
                    "the two conical sectors overlap".into(),
                ));
            }
        }
    }
    let aff = AffineData { g, c: base };
    let cone1 = cone_between_affines(p1, t1, t2, &aff, &aff, None)?;
    let cone2 = cone_between_affines(p2, t3, t4, &aff, &aff, None)?;
    let lines = dedup_lines(
        vec![
            Line::through(p1, t1),
            Line::through(p1, t2),
            Line::through(p2, t3),
            Line::through(p2, t4),
        ],
        scale,
    );
    let cells = classified_cells(&lines, scale, |p| {
        !s1.contains_closed(p, 0.0) && !s2.contains_closed(p, 0.0)
    });
    let mut pieces = vec![cone1, cone2];
    for region in cells {
        pieces.push(Piece::Linear { aff, region });
    }
    finish_scene(pieces, vec![p1, p2])
}

/// Polyhedral scene: `u = 0` on the convex hull of the given points (which
/// must all be hull vertices), a cone on each exterior sector.
pub fn build_polyhedral(
    vertices: &[Point2],
    bases: Option<&[Vec<TrigSeries>]>,
) -> Result<Scene, BuildError> {
    let hull = convex_hull(vertices).map_err(|e| BuildError::NonConvexInput(e.to_string()))?;
    if hull.n() != vertices.len() {
        return Err(BuildError::NonConvexInput(
            "some input points are not vertices of the hull".into(),
        ));
    }
    if let Some(b) = bases {
        if b.len() != hull.n() {
            return Err(BuildError::BadGeometry(
                "one density basis per vertex is required".into(),
            ));
        }
    }
    let zero = AffineData::default();
    let mut pieces = vec![Piece::Linear {
        aff: zero,
        region: hull.cell(),
    }];
    for i in 0..hull.n() {
        let sector = crate::plane::exterior_sector(&hull, i);
        let basis = bases.map(|b| b[i].as_slice());
        pieces.push(cone_between_affines(
            sector.vertex,
            sector.theta_b,
            sector.theta_f,
            &zero,
            &zero,
            basis,
        )?);
    }
    finish_scene(pieces, hull.vertices.clone())
}
