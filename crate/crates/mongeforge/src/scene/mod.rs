//! Scenes: exact piecewise solutions assembled from conical, cylindrical and
//! affine pieces glued C^2 along lines, rays and segments.

pub mod builders;

use crate::error::{AnalyzeError, BuildError};
use crate::plane::{
    norm_angle, ConvexCell, Line, Point2, Ray, Region, Sector, Segment, Strip, Vec2,
};
use crate::profile::{AffineData, ConeProfile, ConeSpan, CylProfile};
use rand::Rng;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Symmetric 2x2 matrix.
#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct SymMat2 {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl SymMat2 {
    pub const ZERO: SymMat2 = SymMat2 {
        xx: 0.0,
        xy: 0.0,
        yy: 0.0,
    };

    /// `s * d (x) d` for a direction `d`.
    pub fn outer(d: Vec2, s: f64) -> SymMat2 {
        SymMat2 {
            xx: s * d.x * d.x,
            xy: s * d.x * d.y,
            yy: s * d.y * d.y,
        }
    }

    pub fn det(&self) -> f64 {
        self.xx * self.yy - self.xy * self.xy
    }

    pub fn frob2(&self) -> f64 {
        self.xx * self.xx + 2.0 * self.xy * self.xy + self.yy * self.yy
    }

    pub fn frob(&self) -> f64 {
        self.frob2().sqrt()
    }

    pub fn apply(&self, v: Vec2) -> Vec2 {
        Vec2::new(self.xx * v.x + self.xy * v.y, self.xy * v.x + self.yy * v.y)
    }

    pub fn quad(&self, v: Vec2) -> f64 {
        self.apply(v).dot(v)
    }

    pub fn scaled(&self, s: f64) -> SymMat2 {
        SymMat2 {
            xx: s * self.xx,
            xy: s * self.xy,
            yy: s * self.yy,
        }
    }

    pub fn sub(&self, o: &SymMat2) -> SymMat2 {
        SymMat2 {
            xx: self.xx - o.xx,
            xy: self.xy - o.xy,
            yy: self.yy - o.yy,
        }
    }

    /// Eigenvalues ordered by absolute value: `(|small|, |large|)` signed.
    pub fn eigen(&self) -> (f64, f64) {
        let tr = self.xx + self.yy;
        let disc = ((self.xx - self.yy) * 0.5).hypot(self.xy);
        let l1 = 0.5 * tr + disc;
        let l2 = 0.5 * tr - disc;
        if l1.abs() < l2.abs() {
            (l1, l2)
        } else {
            (l2, l1)
        }
    }

    /// Unit eigenvector of the eigenvalue closest to zero (the ruling
    /// direction of a rank-one Hessian).
    pub fn kernel_dir(&self) -> Vec2 {
        let (_, big) = self.eigen();
        // eigenvector for `big` is (xy, big - xx) or (big - yy, xy); kernel
        // direction is its perpendicular
        let v1 = Vec2::new(self.xy, big - self.xx);
        let v2 = Vec2::new(big - self.yy, self.xy);
        let v = if v1.norm() >= v2.norm() { v1 } else { v2 };
        let n = v.norm();
        if n == 0.0 {
            Vec2::new(1.0, 0.0)
        } else {
            v.perp().scale(1.0 / n)
        }
    }
}

/// A single smooth piece of a scene.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum Piece {
    Conical {
        vertex: Point2,
        sector: Sector,
        u0: f64,
        profile: ConeProfile,
    },
    Cylindrical {
        /// direction of the frame axis `e_1` (the strip normal); rulings run
        /// along `e_2 = e_1` rotated by +pi/2
        frame_theta: f64,
        strip: Strip,
        v0: f64,
        profile: CylProfile,
        /// profile value at the anchor (duplicated for readability)
        base: f64,
    },
    Linear {
        aff: AffineData,
        region: ConvexCell,
    },
}

#[derive(Clone, Copy, Debug)]
pub struct EvalResult {
    pub value: f64,
    pub gradient: Vec2,
    pub hessian: SymMat2,
    pub piece: usize,
    pub umbilic: bool,
}

impl Piece {
    pub fn region(&self) -> Region {
        match self {
            Piece::Conical { sector, .. } => Region::Sector(*sector),
            Piece::Cylindrical { strip, .. } => Region::Strip(*strip),
            Piece::Linear { region, .. } => Region::Cell(region.clone()),
        }
    }

    /// Evaluates the closed form of the piece at `p` (defined on the closure
    /// of its region; conical pieces are singular at the vertex).
    pub fn eval_raw(&self, p: Point2) -> Result<(f64, Vec2, SymMat2), AnalyzeError> {
        match self {
            Piece::Conical {
                vertex,
                sector,
                u0,
                profile,
            } => {
                let v = p.sub(*vertex);
                let rho = v.norm();
                if rho == 0.0 {
                    return Err(AnalyzeError::SingularPoint);
                }
                // fold into the span; boundary points whose angle noise wraps
                // past theta_b land near theta_b + 2pi and must be clamped to
                // the nearest sector endpoint
                let mut theta = sector.local_angle(v.angle());
                if theta > sector.theta_f {
                    let beyond_far = theta - sector.theta_f;
                    let below_near = std::f64::consts::TAU - (theta - sector.theta_b);
                    theta = if below_near < beyond_far {
                        sector.theta_b
                    } else {
                        sector.theta_f
                    };
                }
                let (a, da, dda) = profile.eval(theta);
                let e_rho = v.scale(1.0 / rho);
                let e_theta = e_rho.perp();
                let value = u0 + rho * a;
                let gradient = e_rho.scale(a) + e_theta.scale(da);
                let hessian = SymMat2::outer(e_theta, (dda + a) / rho);
                Ok((value, gradient, hessian))
            }
            Piece::Cylindrical {
                frame_theta,
                v0,
                profile,
                ..
            } => {
                let e1 = crate::plane::unit(*frame_theta);
                let e2 = e1.perp();
                let x = e1.dot(p.to_vec());
                let y = e2.dot(p.to_vec());
                let (a, da, dda) = profile.eval(x);
                let value = a + v0 * y;
                let gradient = e1.scale(da) + e2.scale(*v0);
                let hessian = SymMat2::outer(e1, dda);
                Ok((value, gradient, hessian))
            }
            Piece::Linear { aff, .. } => Ok((aff.eval(p), aff.g, SymMat2::ZERO)),
        }
    }

    pub fn gauge_shift(&mut self, aff: &AffineData) {
        match self {
            Piece::Conical {
                vertex,
                u0,
                profile,
                ..
            } => {
                *u0 += aff.eval(*vertex);
                let (h, dh) = crate::profile::harmonic_profile(aff, profile.theta_b);
                profile.alpha_b += h;
                profile.dalpha_b += dh;
            }
            Piece::Cylindrical {
                frame_theta,
                v0,
                profile,
                base,
                ..
            } => {
                let e1 = crate::plane::unit(*frame_theta);
                let e2 = e1.perp();
                let g1 = aff.g.dot(e1);
                profile.alpha_b += g1 * profile.x_b + aff.c;
                profile.dalpha_b += g1;
                *v0 += aff.g.dot(e2);
                *base = profile.alpha_b;
            }
            Piece::Linear { aff: a, .. } => {
                a.g = a.g + aff.g;
                a.c += aff.c;
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum IfaceGeom {
    Line(Line),
    Ray(Ray),
    Segment(Segment),
}

impl IfaceGeom {
    /// Point at parameter `t in (0, 1)`, mapped over the finite part (rays
    /// and lines are sampled within `span` of their anchor).
    pub fn point_at(&self, t: f64, span: f64) -> Point2 {
        match self {
            IfaceGeom::Line(l) => l.at((t - 0.5) * 2.0 * span),
            IfaceGeom::Ray(r) => r.at(t * span),
            IfaceGeom::Segment(s) => s.at(t),
        }
    }

    pub fn tangent(&self) -> Vec2 {
        match self {
            IfaceGeom::Line(l) => l.tangent(),
            IfaceGeom::Ray(r) => r.dir.unit(),
            IfaceGeom::Segment(s) => {
                let v = s.b.sub(s.a);
                v.scale(1.0 / v.norm())
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Interface {
    pub a: usize,
    pub b: usize,
    pub geometry: IfaceGeom,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Scene {
    pub pieces: Vec<Piece>,
    pub interfaces: Vec<Interface>,
    pub singularities: Vec<Point2>,
}

impl Scene {
    /// Characteristic length: anchors, vertices and singularities.
    pub fn scale(&self) -> f64 {
        let mut s: f64 = 1.0;
        for p in &self.singularities {
            s = s.max(p.x.abs()).max(p.y.abs());
        }
        for piece in &self.pieces {
            match piece {
                Piece::Conical { vertex, .. } => {
                    s = s.max(vertex.x.abs()).max(vertex.y.abs());
                }
                Piece::Cylindrical { strip, .. } => {
                    if let Some(c) = strip.c_lo {
                        s = s.max(c.abs());
                    }
                    if let Some(c) = strip.c_hi {
                        s = s.max(c.abs());
                    }
                }
                Piece::Linear { region, .. } => {
                    for h in &region.halfplanes {
                        s = s.max(h.offset.abs());
                    }
                }
            }
        }
        s
    }

    pub fn eps_geo(&self) -> f64 {
        1e-9 * 2.0 * self.scale()
    }

    /// Finds the piece containing `p`. Returns `(piece index, on_interface)`;
    /// on interfaces the lowest-indexed adjacent piece is reported.
    pub fn locate(&self, p: Point2) -> Result<(usize, bool), AnalyzeError> {
        let eps = self.eps_geo();
        let mut hits = Vec::new();
        for (i, piece) in self.pieces.iter().enumerate() {
            if piece.region().contains_closed(p, eps) {
                hits.push(i);
            }
        }
        match hits.len() {
            0 => Err(AnalyzeError::InconsistentField(format!(
                "point ({}, {}) is not covered by any piece",
                p.x, p.y
            ))),
            1 => {
                let on_iface = self.interfaces.iter().any(|f| {
                    let (line, lo, hi) = match &f.geometry {
                        IfaceGeom::Line(l) => (*l, f64::NEG_INFINITY, f64::INFINITY),
                        IfaceGeom::Ray(r) => {
                            let l = Line::through(r.origin, r.dir.theta);
                            let t0 = l.param_of(r.origin);
                            if r.dir.unit().dot(l.tangent()) > 0.0 {
                                (l, t0, f64::INFINITY)
                            } else {
                                (l, f64::NEG_INFINITY, t0)
                            }
                        }
                        IfaceGeom::Segment(s) => {
                            let l = Line::through(s.a, s.b.sub(s.a).angle());
                            let (t0, t1) = (l.param_of(s.a), l.param_of(s.b));
                            (l, t0.min(t1), t0.max(t1))
                        }
                    };
                    line.signed_dist(p).abs() <= eps && {
                        let t = line.param_of(p);
                        t >= lo - eps && t <= hi + eps
                    }
                });
                Ok((hits[0], on_iface))
            }
            _ => Ok((hits[0], true)),
        }
    }

    /// Evaluates the solution at `p`. Errors exactly on singular points.
    pub fn evaluate(&self, p: Point2) -> Result<EvalResult, AnalyzeError> {
        if self.singularities.iter().any(|s| s.x == p.x && s.y == p.y) {
            return Err(AnalyzeError::SingularPoint);
        }
        let (i, _) = self.locate(p)?;
        let (value, gradient, hessian) = self.pieces[i].eval_raw(p)?;
        let umbilic = hessian.frob() <= 1e-9;
        Ok(EvalResult {
            value,
            gradient,
            hessian,
            piece: i,
            umbilic,
        })
    }

    /// Value of the continuous extension (defined at singular points too).
    pub fn evaluate_extended(&self, p: Point2) -> f64 {
        match self.evaluate(p) {
            Ok(r) => r.value,
            Err(_) => {
                for piece in &self.pieces {
                    if let Piece::Conical { vertex, u0, .. } = piece {
                        if vertex.dist(p) <= self.eps_geo() {
                            return *u0;
                        }
                    }
                }
                f64::NAN
            }
        }
    }

    /// Adds an affine function to the solution in place.
    pub fn gauge_shift(&mut self, aff: &AffineData) {
        for piece in &mut self.pieces {
            piece.gauge_shift(aff);
        }
    }

    /// Structural invariants: coverage, disjoint interiors, interface
    /// adjacency, singular vertices, profile/sector agreement.
    pub fn validate(&self) -> Result<(), BuildError> {
        if self.pieces.is_empty() {
            return Err(BuildError::Validation("scene has no pieces".into()));
        }
        for (i, piece) in self.pieces.iter().enumerate() {
            if let Piece::Conical {
                sector, profile, ..
            } = piece
            {
                let w = sector.width();
                if !(w > 0.0 && w <= 2.0 * PI + 1e-12) {
                    return Err(BuildError::Validation(format!(
                        "piece {i}: sector width {w} out of range"
                    )));
                }
                match profile.span {
                    ConeSpan::Periodic => {
                        if !sector.is_full() {
                            return Err(BuildError::Validation(format!(
                                "piece {i}: periodic profile on a partial sector"
                            )));
                        }
                    }
                    ConeSpan::UpTo(tf) => {
                        if (profile.theta_b - sector.theta_b).abs() > 1e-9
                            || (tf - sector.theta_f).abs() > 1e-9
                        {
                            return Err(BuildError::Validation(format!(
                                "piece {i}: profile span does not match the sector"
                            )));
                        }
                    }
                }
            }
            if let Piece::Cylindrical { profile, base, .. } = piece {
                if (profile.alpha_b - base).abs() > 1e-9 * (1.0 + base.abs()) {
                    return Err(BuildError::Validation(format!(
                        "piece {i}: base does not match the profile anchor value"
                    )));
                }
            }
        }
        // sampled coverage / overlap checks
        let scale = self.scale();
        let eps = self.eps_geo();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
        let r = 3.0 * scale;
        for _ in 0..2000 {
            let p = Point2::new(rng.gen_range(-r..r), rng.gen_range(-r..r));
            if self.singularities.iter().any(|s| s.dist(p) < 1e-6 * scale) {
                continue;
            }
            let open_hits = self
                .pieces
                .iter()
                .filter(|piece| piece.region().contains_open(p, eps))
                .count();
            if open_hits > 1 {
                return Err(BuildError::Validation(format!(
                    "piece interiors overlap at ({}, {})",
                    p.x, p.y
                )));
            }
            let closed_hits = self
                .pieces
                .iter()
                .filter(|piece| piece.region().contains_closed(p, eps))
                .count();
            if closed_hits == 0 {
                return Err(BuildError::Validation(format!(
                    "pieces do not cover ({}, {})",
                    p.x, p.y
                )));
            }
        }
        // interfaces lie in the closures of both named pieces
        for (k, f) in self.interfaces.iter().enumerate() {
            if f.a >= self.pieces.len() || f.b >= self.pieces.len() || f.a == f.b {
                return Err(BuildError::Validation(format!(
                    "interface {k}: bad piece ids"
                )));
            }
            let ra = self.pieces[f.a].region();
            let rb = self.pieces[f.b].region();
            for step in 1..8 {
                let p = f.geometry.point_at(step as f64 / 8.0, scale);
                if !ra.contains_closed(p, 1e-6 * scale) || !rb.contains_closed(p, 1e-6 * scale) {
                    return Err(BuildError::Validation(format!(
                        "interface {k} leaves the closure of its pieces at ({}, {})",
                        p.x, p.y
                    )));
                }
            }
            // adjacent affine pieces must carry identical affine data
            if let (Piece::Linear { aff: a1, .. }, Piece::Linear { aff: a2, .. }) =
                (&self.pieces[f.a], &self.pieces[f.b])
            {
                let d = (a1.g.x - a2.g.x).abs() + (a1.g.y - a2.g.y).abs() + (a1.c - a2.c).abs();
                if d > 1e-9 * (1.0 + scale) {
                    return Err(BuildError::Validation(format!(
                        "interface {k}: adjacent affine pieces disagree"
                    )));
                }
            }
        }
        // every singularity is the vertex of at least one conical piece
        for (i, s) in self.singularities.iter().enumerate() {
            let ok = self.pieces.iter().any(|p| match p {
                Piece::Conical { vertex, .. } => vertex.dist(*s) <= eps,
                _ => false,
            });
            if !ok {
                return Err(BuildError::Validation(format!(
                    "singularity {i} is not the vertex of any conical piece"
                )));
            }
        }
        Ok(())
    }

    /// Cylindrical pieces with a density that is not identically zero carry
    /// full-line rulings.
    pub fn has_line_rulings(&self) -> bool {
        self.pieces.iter().any(|p| match p {
            Piece::Cylindrical { profile, .. } => !profile.kappa.is_zero(1e-12),
            _ => false,
        })
    }

    /// The strip of the (unique) genuinely cylindrical piece, if any.
    pub fn cylinder_strip(&self) -> Option<Strip> {
        self.pieces.iter().find_map(|p| match p {
            Piece::Cylindrical { strip, profile, .. } if !profile.kappa.is_zero(1e-12) => {
                Some(*strip)
            }
            _ => None,
        })
    }
}

/// Folds an angle so the sector at `vertex` sees `p`; helper for tests.
pub fn angle_at(vertex: Point2, p: Point2) -> f64 {
    norm_angle(p.sub(vertex).angle())
}

pub use builders::{
    build_cylinder, build_full_cone, build_half_cone, build_polyhedral, build_two_singular,
    TwoSingularParams,
};

/// Frame of a cylindrical piece: `(e_1, e_2)` with rulings along `e_2`.
pub fn cyl_frame(frame_theta: f64) -> (Vec2, Vec2) {
    let e1 = crate::plane::unit(frame_theta);
    (e1, e1.perp())
}
