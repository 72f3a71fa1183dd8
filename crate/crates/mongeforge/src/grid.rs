//! Black-box grid fields: finite-difference residuals and structure
//! inference (rulings, fans, strip, singular point estimates and
//! classification) from sampled values alone.

use crate::analyze::{build_fans, Classification, DirectionFan, Ruling, RulingGeom};
use crate::error::AnalyzeError;
use crate::exec::{self, Mode};
use crate::plane::{angle_diff, convex_hull, norm_angle, Direction, Point2, Ray, Strip, Vec2};
use crate::scene::SymMat2;
use serde::{Deserialize, Serialize};

/// Uniform sample grid of a scalar field; `values` row-major with the y
/// index outermost. `marks` are known singular points (values there may be
/// non-finite).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GridField {
    pub bbox: (f64, f64, f64, f64),
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<f64>,
    pub marks: Vec<Point2>,
}

impl GridField {
    pub fn new(
        bbox: (f64, f64, f64, f64),
        nx: usize,
        ny: usize,
        values: Vec<f64>,
        marks: Vec<Point2>,
    ) -> Result<GridField, AnalyzeError> {
        if nx < 8 || ny < 8 {
            return Err(AnalyzeError::ResolutionTooLow(format!(
                "{nx} x {ny} grid; need at least 8 x 8"
            )));
        }
        if values.len() != nx * ny {
            return Err(AnalyzeError::InconsistentField(format!(
                "expected {} values, got {}",
                nx * ny,
                values.len()
            )));
        }
        if !(bbox.1 > bbox.0 && bbox.3 > bbox.2) {
            return Err(AnalyzeError::InconsistentField("empty bbox".into()));
        }
        Ok(GridField {
            bbox,
            nx,
            ny,
            values,
            marks,
        })
    }

    pub fn sample<F: Fn(Point2) -> f64>(
        f: F,
        bbox: (f64, f64, f64, f64),
        nx: usize,
        ny: usize,
        marks: Vec<Point2>,
    ) -> Result<GridField, AnalyzeError> {
        let hx = (bbox.1 - bbox.0) / (nx - 1) as f64;
        let hy = (bbox.3 - bbox.2) / (ny - 1) as f64;
        let mut values = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                values.push(f(Point2::new(
                    bbox.0 + hx * i as f64,
                    bbox.2 + hy * j as f64,
                )));
            }
        }
        GridField::new(bbox, nx, ny, values, marks)
    }

    pub fn hx(&self) -> f64 {
        (self.bbox.1 - self.bbox.0) / (self.nx - 1) as f64
    }
    pub fn hy(&self) -> f64 {
        (self.bbox.3 - self.bbox.2) / (self.ny - 1) as f64
    }
    pub fn pos(&self, i: usize, j: usize) -> Point2 {
        Point2::new(
            self.bbox.0 + self.hx() * i as f64,
            self.bbox.2 + self.hy() * j as f64,
        )
    }
    fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx + i]
    }

    /// Central-difference Hessian at node `(i, j)` with stencil stride `k`.
    pub fn fd_hessian(&self, i: usize, j: usize, k: usize) -> Option<SymMat2> {
        if i < k || j < k || i + k >= self.nx || j + k >= self.ny {
            return None;
        }
        let (hx, hy) = (self.hx() * k as f64, self.hy() * k as f64);
        let v = |a: usize, b: usize| self.at(a, b);
        let c = v(i, j);
        let m = SymMat2 {
            xx: (v(i + k, j) - 2.0 * c + v(i - k, j)) / (hx * hx),
            yy: (v(i, j + k) - 2.0 * c + v(i, j - k)) / (hy * hy),
            xy: (v(i + k, j + k) - v(i + k, j - k) - v(i - k, j + k) + v(i - k, j - k))
                / (4.0 * hx * hy),
        };
        [m.xx, m.xy, m.yy]
            .iter()
            .all(|t| t.is_finite())
            .then_some(m)
    }

    fn fd_gradient(&self, i: usize, j: usize) -> Option<Vec2> {
        if i < 1 || j < 1 || i + 1 >= self.nx || j + 1 >= self.ny {
            return None;
        }
        let g = Vec2::new(
            (self.at(i + 1, j) - self.at(i - 1, j)) / (2.0 * self.hx()),
            (self.at(i, j + 1) - self.at(i, j - 1)) / (2.0 * self.hy()),
        );
        (g.x.is_finite() && g.y.is_finite()).then_some(g)
    }

    fn near_mark(&self, p: Point2, radius: f64) -> bool {
        self.marks.iter().any(|m| m.dist(p) <= radius)
    }
}

/// Normalized FD residual `det H / (1 + ||H||^2)` at the node nearest `p`,
/// with stencil stride chosen so the step is at least `h`.
pub fn pde_residual_grid(grid: &GridField, p: Point2, h: f64) -> Result<f64, AnalyzeError> {
    let (hx, hy) = (grid.hx(), grid.hy());
    let i = ((p.x - grid.bbox.0) / hx).round() as isize;
    let j = ((p.y - grid.bbox.2) / hy).round() as isize;
    let k = (h / hx.min(hy)).round().max(1.0) as usize;
    let step = hx.max(hy) * k as f64;
    if grid.near_mark(p, 2.0 * step) {
        return Err(AnalyzeError::TooCloseToSingularity);
    }
    if i < k as isize
        || j < k as isize
        || i + (k as isize) >= grid.nx as isize
        || j + (k as isize) >= grid.ny as isize
    {
        return Err(AnalyzeError::TooCloseToSingularity);
    }
    let m = grid
        .fd_hessian(i as usize, j as usize, k)
        .ok_or(AnalyzeError::TooCloseToSingularity)?;
    Ok(m.det() / (1.0 + m.frob2()))
}

/// Largest normalized FD residual over interior nodes, skipping a 2-stencil
/// margin around marks and the boundary.
pub fn max_grid_residual(grid: &GridField, mode: Mode) -> f64 {
    let h = grid.hx().max(grid.hy());
    let n = grid.nx * grid.ny;
    exec::max_f64(
        n,
        |idx| {
            let (i, j) = (idx % grid.nx, idx / grid.nx);
            if i < 2 || j < 2 || i + 2 >= grid.nx || j + 2 >= grid.ny {
                return f64::NEG_INFINITY;
            }
            if grid.near_mark(grid.pos(i, j), 4.0 * h) {
                return f64::NEG_INFINITY;
            }
            match grid.fd_hessian(i, j, 1) {
                Some(m) => (m.det() / (1.0 + m.frob2())).abs(),
                None => f64::NEG_INFINITY,
            }
        },
        mode,
    )
    .max(0.0)
}

#[derive(Clone, Debug)]
pub struct InferConfig {
    /// rank-1 acceptance: |lambda_2| <= eps_rank * max(|lambda_1|, field scale)
    pub eps_rank: f64,
    /// gradient deviation (relative to the gradient scale) that ends a march
    pub grad_tol: f64,
    /// angular gap starting a new fan arc
    pub gap_tol: f64,
    /// cap on the number of traced rulings
    pub max_seeds: usize,
    /// fraction of full-rank cells above which the field is rejected
    pub full_rank_frac: f64,
    pub mode: Mode,
}

impl Default for InferConfig {
    fn default() -> Self {
        InferConfig {
            eps_rank: 1e-3,
            grad_tol: 0.02,
            gap_tol: 0.35,
            max_seeds: 3000,
            full_rank_frac: 0.02,
            mode: Mode::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StructureReport {
    pub rulings: Vec<Ruling>,
    pub fans: Vec<DirectionFan>,
    pub strip: Option<Strip>,
    pub singular_estimates: Vec<Point2>,
    pub classification: Classification,
    pub violations: Vec<String>,
}

struct Fields {
    grad: Vec<Option<Vec2>>,
    hess: Vec<Option<SymMat2>>,
    /// stride-2 Hessians; disagreement with `hess` marks cells whose stencil
    /// straddles an interface or sits too close to a singularity
    hess2: Vec<Option<SymMat2>>,
    /// rounding-noise floor for FD Hessian entries
    floor: f64,
}

fn fd_fields(grid: &GridField) -> Fields {
    let n = grid.nx * grid.ny;
    let h = grid.hx().max(grid.hy());
    let mut grad = vec![None; n];
    let mut hess = vec![None; n];
    let mut hess2 = vec![None; n];
    for j in 1..grid.ny - 1 {
        for i in 1..grid.nx - 1 {
            let idx = j * grid.nx + i;
            if grid.near_mark(grid.pos(i, j), 2.0 * h) {
                continue;
            }
            grad[idx] = grid.fd_gradient(i, j);
            hess[idx] = grid.fd_hessian(i, j, 1);
            if i >= 2 && j >= 2 && i + 2 < grid.nx && j + 2 < grid.ny {
                hess2[idx] = grid.fd_hessian(i, j, 2);
            }
        }
    }
    let uscale = grid
        .values
        .iter()
        .filter(|v| v.is_finite())
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(1.0);
    let floor = 100.0 * f64::EPSILON * uscale / (grid.hx() * grid.hy());
    Fields {
        grad,
        hess,
        hess2,
        floor,
    }
}

/// Per-node curvature class from the FD Hessian eigenvalues: the ratio test
/// is gated by agreement between the stride-1 and stride-2 stencils, which
/// rules out cells contaminated by an interface or a nearby singularity.
#[derive(Clone, Copy, PartialEq)]
enum NodeClass {
    Flat,
    Rank1,
    FullRank,
    Unreliable,
}

fn node_class(fields: &Fields, idx: usize, eps_rank: f64) -> NodeClass {
    let (Some(m), Some(m2)) = (&fields.hess[idx], &fields.hess2[idx]) else {
        return NodeClass::Unreliable;
    };
    let (small, big) = m.eigen();
    if big.abs() <= fields.floor {
        return NodeClass::Flat;
    }
    if m.sub(m2).frob() > 0.25 * m.frob() + fields.floor {
        return NodeClass::Unreliable;
    }
    if small.abs() <= eps_rank * big.abs() {
        NodeClass::Rank1
    } else if small.abs() > 0.1 * big.abs() {
        NodeClass::FullRank
    } else {
        NodeClass::Unreliable
    }
}

fn interp_grad(grid: &GridField, fields: &Fields, p: Point2) -> Option<Vec2> {
    let fx = (p.x - grid.bbox.0) / grid.hx();
    let fy = (p.y - grid.bbox.2) / grid.hy();
    let i = fx.floor() as isize;
    let j = fy.floor() as isize;
    if i < 0 || j < 0 || i + 1 >= grid.nx as isize || j + 1 >= grid.ny as isize {
        return None;
    }
    let (i, j) = (i as usize, j as usize);
    let (tx, ty) = (fx - i as f64, fy - j as f64);
    let g = |a: usize, b: usize| fields.grad[b * grid.nx + a];
    let (g00, g10, g01, g11) = (g(i, j)?, g(i + 1, j)?, g(i, j + 1)?, g(i + 1, j + 1)?);
    let lerp = |a: Vec2, b: Vec2, t: f64| a.scale(1.0 - t) + b.scale(t);
    Some(lerp(lerp(g00, g10, tx), lerp(g01, g11, tx), ty))
}

struct Trace {
    seed: Point2,
    dir: Vec2,
    /// per direction: (terminated inside the window, end point)
    ends: [(bool, Point2); 2],
}

/// Infers the ruling structure of a sampled field and classifies it.
pub fn infer_structure(
    grid: &GridField,
    cfg: &InferConfig,
) -> Result<StructureReport, AnalyzeError> {
    if grid.nx < 64 || grid.ny < 64 {
        return Err(AnalyzeError::ResolutionTooLow(format!(
            "{} x {} grid; structure inference needs 64 x 64",
            grid.nx, grid.ny
        )));
    }
    let fields = fd_fields(grid);
    let h = grid.hx().max(grid.hy());
    let mut violations: Vec<String> = Vec::new();

    // scales and per-node rank classification
    let mut hscale: f64 = 0.0;
    let mut gscale: f64 = 0.0;
    for idx in 0..grid.nx * grid.ny {
        if let Some(m) = &fields.hess[idx] {
            hscale = hscale.max(m.eigen().1.abs());
        }
        if let Some(g) = &fields.grad[idx] {
            gscale = gscale.max(g.norm());
        }
    }
    if hscale <= fields.floor {
        // an affine field is a degenerate cylinder
        return Ok(StructureReport {
            rulings: vec![],
            fans: vec![],
            strip: Some(Strip {
                normal: Direction::new(0.0),
                c_lo: None,
                c_hi: None,
            }),
            singular_estimates: vec![],
            classification: Classification::Cylinder,
            violations,
        });
    }
    let mut rank1_nodes: Vec<usize> = Vec::new();
    let mut full_rank = 0usize;
    let mut curved = 0usize;
    for idx in 0..grid.nx * grid.ny {
        match node_class(&fields, idx, cfg.eps_rank) {
            NodeClass::Rank1 => {
                curved += 1;
                rank1_nodes.push(idx);
            }
            NodeClass::FullRank => {
                curved += 1;
                full_rank += 1;
            }
            NodeClass::Flat | NodeClass::Unreliable => {}
        }
    }
    if curved > 0 && full_rank as f64 > cfg.full_rank_frac * curved as f64 {
        return Err(AnalyzeError::InconsistentField(format!(
            "{full_rank} of {curved} curved cells have a full-rank Hessian"
        )));
    }

    // trace rulings from a subsample of rank-1 nodes
    let stride = (rank1_nodes.len() / cfg.max_seeds).max(1);
    let seeds: Vec<usize> = rank1_nodes.iter().copied().step_by(stride).collect();
    let tol_g = cfg.grad_tol * (1.0 + gscale);
    let step = 0.5 * grid.hx().min(grid.hy());
    let safe = |p: Point2| {
        p.x >= grid.bbox.0 + 1.5 * grid.hx()
            && p.x <= grid.bbox.1 - 1.5 * grid.hx()
            && p.y >= grid.bbox.2 + 1.5 * grid.hy()
            && p.y <= grid.bbox.3 - 1.5 * grid.hy()
    };
    let traces: Vec<Option<Trace>> = exec::map_collect(
        seeds.len(),
        |s| {
            let idx = seeds[s];
            let (i, j) = (idx % grid.nx, idx / grid.nx);
            let p0 = grid.pos(i, j);
            if !safe(p0) {
                return None;
            }
            let g0 = fields.grad[idx]?;
            let m = fields.hess[idx].as_ref()?;
            let dir = m.kernel_dir();
            let mut ends = [(false, p0); 2];
            for (slot, sgn) in [(0usize, 1.0), (1usize, -1.0)] {
                let d = dir.scale(sgn);
                let mut q = p0;
                loop {
                    let next = q.add(d.scale(step));
                    if !safe(next) {
                        ends[slot] = (false, q);
                        break;
                    }
                    match interp_grad(grid, &fields, next) {
                        Some(g) if (g - g0).norm() <= tol_g => q = next,
                        _ => {
                            ends[slot] = (true, next);
                            break;
                        }
                    }
                }
            }
            // too-short traces carry no directional information
            if ends[0].1.dist(ends[1].1) < 6.0 * grid.hx().max(grid.hy()) {
                return None;
            }
            Some(Trace {
                seed: p0,
                dir,
                ends,
            })
        },
        cfg.mode,
    );
    let traces: Vec<Trace> = traces.into_iter().flatten().collect();

    // singular points: cluster intersections of terminated ruling lines
    let r_assoc = 8.0 * h;
    let terminated: Vec<(usize, usize)> = traces
        .iter()
        .enumerate()
        .flat_map(|(t, tr)| (0..2).filter(move |&e| tr.ends[e].0).map(move |e| (t, e)))
        .collect();
    let mut cluster_pts: Vec<Point2> = Vec::new();
    {
        let m = terminated.len();
        let cap = 20_000usize;
        let stride = (m * m / cap.max(1)).max(1);
        let mut count = 0usize;
        'outer: for a in 0..m {
            for b in (a + 1)..m {
                count += 1;
                if !count.is_multiple_of(stride) {
                    continue;
                }
                let (ta, ea) = terminated[a];
                let (tb, eb) = terminated[b];
                let (la, lb) = (&traces[ta], &traces[tb]);
                if let Some(q) = line_intersect(la.seed, la.dir, lb.seed, lb.dir) {
                    if q.dist(la.ends[ea].1) <= r_assoc && q.dist(lb.ends[eb].1) <= r_assoc {
                        cluster_pts.push(q);
                    }
                }
                if cluster_pts.len() > 50_000 {
                    break 'outer;
                }
            }
        }
    }
    let mut centers = greedy_cluster(&cluster_pts, 3.0 * h, 3);
    // refine each center by least-squares concurrency of its rulings; the
    // second pass reselects the contributing lines around the moved center
    for _ in 0..2 {
        for c in centers.iter_mut() {
            let mut a = [0.0f64; 3];
            let mut b = Vec2::new(0.0, 0.0);
            let mut used = 0;
            for &(t, e) in &terminated {
                let tr = &traces[t];
                if tr.ends[e].1.dist(*c) > r_assoc {
                    continue;
                }
                let n = tr.dir.perp();
                if line_point_dist(tr.seed, tr.dir, *c) > 3.0 * h {
                    continue;
                }
                a[0] += n.x * n.x;
                a[1] += n.x * n.y;
                a[2] += n.y * n.y;
                let rhs = n.dot(tr.seed.to_vec());
                b = b + n.scale(rhs);
                used += 1;
            }
            let det = a[0] * a[2] - a[1] * a[1];
            if used >= 3 && det.abs() > 1e-9 * (a[0] + a[2]).powi(2).max(1e-300) {
                *c = Point2::new(
                    (a[2] * b.x - a[1] * b.y) / det,
                    (a[0] * b.y - a[1] * b.x) / det,
                );
            }
        }
    }
    centers = merge_centers(centers, 4.0 * h);
    let singular_estimates = centers.clone();

    // convert traces to rulings with endpoint assignment
    let mut rulings: Vec<Ruling> = Vec::new();
    let mut stray_ends = 0usize;
    for tr in &traces {
        let assign = |e: usize| -> Option<usize> {
            if !tr.ends[e].0 {
                return None;
            }
            centers
                .iter()
                .enumerate()
                .filter(|(_, c)| {
                    c.dist(tr.ends[e].1) <= r_assoc
                        && line_point_dist(tr.seed, tr.dir, **c) <= 4.0 * h
                })
                .min_by(|(_, c1), (_, c2)| c1.dist(tr.ends[e].1).total_cmp(&c2.dist(tr.ends[e].1)))
                .map(|(k, _)| k)
        };
        let term0 = tr.ends[0].0;
        let term1 = tr.ends[1].0;
        let (s0, s1) = (assign(0), assign(1));
        if (term0 && s0.is_none()) || (term1 && s1.is_none()) {
            stray_ends += 1;
            continue;
        }
        let gradient = Vec2::new(0.0, 0.0); // filled below when available
        let geometry = match (s0, s1) {
            (None, None) => RulingGeom::Line(crate::plane::Line::through(tr.seed, tr.dir.angle())),
            (Some(k), None) => {
                let c = centers[k];
                RulingGeom::Ray(Ray::new(c, tr.seed.sub(c).angle()))
            }
            (None, Some(k)) => {
                let c = centers[k];
                RulingGeom::Ray(Ray::new(c, tr.seed.sub(c).angle()))
            }
            (Some(k1), Some(k2)) => {
                violations.push("traced ruling is a segment".into());
                RulingGeom::Segment(crate::plane::Segment::new(centers[k1], centers[k2]))
            }
        };
        let endpoints = [s0, s1].into_iter().flatten().collect();
        rulings.push(Ruling {
            geometry,
            gradient,
            endpoints,
            piece: usize::MAX,
            violation: None,
        });
    }
    if stray_ends * 10 > traces.len().max(1) {
        violations.push(format!(
            "{stray_ends} of {} traces terminate away from any singular point",
            traces.len()
        ));
    }

    // fans over ray rulings
    let (fans, fan_violations) = build_fans(&rulings, centers.len(), cfg.gap_tol);
    violations.extend(fan_violations);

    // strip from full-line rulings
    let lines: Vec<&Ruling> = rulings
        .iter()
        .filter(|r| matches!(r.geometry, RulingGeom::Line(_)))
        .collect();
    let strip = if lines.is_empty() {
        None
    } else {
        let RulingGeom::Line(l0) = &lines[0].geometry else {
            unreachable!()
        };
        let normal = l0.normal;
        let mut c_min = f64::INFINITY;
        let mut c_max = f64::NEG_INFINITY;
        for r in &lines {
            let RulingGeom::Line(l) = &r.geometry else {
                unreachable!()
            };
            if angle_diff(2.0 * l.normal.theta, 2.0 * normal.theta).abs() > 0.05 {
                violations.push("full-line rulings are not mutually parallel".into());
            }
            let c = if angle_diff(l.normal.theta, normal.theta).abs() < 1.0 {
                l.offset
            } else {
                -l.offset
            };
            c_min = c_min.min(c);
            c_max = c_max.max(c);
        }
        let coord = |p: &Point2| normal.unit().dot(p.to_vec());
        let margin = 6.0 * h;
        let c_hi = centers
            .iter()
            .map(coord)
            .filter(|&c| c >= c_max - margin)
            .min_by(f64::total_cmp);
        let c_lo = centers
            .iter()
            .map(coord)
            .filter(|&c| c <= c_min + margin)
            .max_by(f64::total_cmp);
        Some(Strip { normal, c_lo, c_hi })
    };

    // within each connected non-umbilic component the rulings must be
    // all parallel or all concurrent
    check_components(grid, &fields, cfg, &traces, &centers, h, &mut violations);

    let classification = classify_grid(&centers, &strip, &rulings, h, &mut violations);
    Ok(StructureReport {
        rulings,
        fans,
        strip,
        singular_estimates,
        classification,
        violations,
    })
}

fn classify_grid(
    centers: &[Point2],
    strip: &Option<Strip>,
    rulings: &[Ruling],
    h: f64,
    violations: &mut Vec<String>,
) -> Classification {
    let has_lines = rulings
        .iter()
        .any(|r| matches!(r.geometry, RulingGeom::Line(_)));
    match centers.len() {
        0 => {
            if !has_lines && !rulings.is_empty() {
                violations.push("only half-line rulings but no singular point".into());
            }
            Classification::Cylinder
        }
        1 => {
            if has_lines {
                Classification::HalfCylinderHalfCone
            } else {
                Classification::FullCone
            }
        }
        2 => {
            let variant = match strip {
                Some(s) => match (s.c_lo, s.c_hi) {
                    (Some(_), Some(_)) => 1,
                    (Some(c), None) | (None, Some(c)) => {
                        let on_line = centers
                            .iter()
                            .filter(|p| (s.coord(**p) - c).abs() <= 5.0 * h)
                            .count();
                        match on_line {
                            2 => 2,
                            1 => 3,
                            _ => {
                                violations
                                    .push("half-plane strip with no boundary singularity".into());
                                3
                            }
                        }
                    }
                    (None, None) => {
                        violations.push("unbounded strip with singular points".into());
                        4
                    }
                },
                None => 4,
            };
            Classification::TwoSingular { variant }
        }
        _ => {
            if has_lines {
                violations.push("full-line rulings with 3 or more singular points".into());
                return Classification::NonAdmissibleOther;
            }
            match convex_hull(centers) {
                Ok(hull) if hull.n() == centers.len() => Classification::Polyhedral(hull),
                _ => Classification::NonAdmissibleOther,
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn check_components(
    grid: &GridField,
    fields: &Fields,
    cfg: &InferConfig,
    traces: &[Trace],
    centers: &[Point2],
    h: f64,
    violations: &mut Vec<String>,
) {
    // label connected components of the non-umbilic rank-1 mask
    let n = grid.nx * grid.ny;
    let mut label = vec![u32::MAX; n];
    let is_rank1 = |idx: usize| node_class(fields, idx, cfg.eps_rank) == NodeClass::Rank1;
    let mut next = 0u32;
    let mut stack = Vec::new();
    for start in 0..n {
        if label[start] != u32::MAX || !is_rank1(start) {
            continue;
        }
        label[start] = next;
        stack.push(start);
        while let Some(idx) = stack.pop() {
            let (i, j) = (idx % grid.nx, idx / grid.nx);
            for (di, dj) in [
                (-1i64, 0i64),
                (1, 0),
                (0, -1),
                (0, 1),
                (1, 1),
                (1, -1),
                (-1, 1),
                (-1, -1),
            ] {
                let (ii, jj) = (i as i64 + di, j as i64 + dj);
                if ii < 0 || jj < 0 || ii >= grid.nx as i64 || jj >= grid.ny as i64 {
                    continue;
                }
                let nb = jj as usize * grid.nx + ii as usize;
                if label[nb] == u32::MAX && is_rank1(nb) {
                    label[nb] = next;
                    stack.push(nb);
                }
            }
        }
        next += 1;
    }
    // group traces by the component of their seed
    let mut by_comp: Vec<Vec<&Trace>> = vec![Vec::new(); next as usize];
    for tr in traces {
        let i = ((tr.seed.x - grid.bbox.0) / grid.hx()).round() as usize;
        let j = ((tr.seed.y - grid.bbox.2) / grid.hy()).round() as usize;
        let idx = j * grid.nx + i;
        if label[idx] != u32::MAX {
            by_comp[label[idx] as usize].push(tr);
        }
    }
    for (comp, trs) in by_comp.iter().enumerate() {
        if trs.len() < 2 {
            continue;
        }
        let parallel = trs
            .iter()
            .all(|t| angle_diff(2.0 * t.dir.angle(), 2.0 * trs[0].dir.angle()).abs() < 0.05);
        if parallel {
            continue;
        }
        let concurrent = centers.iter().any(|c| {
            trs.iter()
                .all(|t| line_point_dist(t.seed, t.dir, *c) <= 5.0 * h)
        });
        if !concurrent {
            violations.push(format!(
                "component {comp}: rulings neither parallel nor concurrent"
            ));
        }
    }
}

fn line_intersect(p1: Point2, d1: Vec2, p2: Point2, d2: Vec2) -> Option<Point2> {
    let denom = d1.cross(d2);
    if denom.abs() < 0.05 {
        return None; // nearly parallel: intersection too ill-conditioned
    }
    let t = p2.sub(p1).cross(d2) / denom;
    Some(p1.add(d1.scale(t)))
}

fn line_point_dist(p: Point2, d: Vec2, q: Point2) -> f64 {
    d.cross(q.sub(p)).abs() / d.norm()
}

fn greedy_cluster(points: &[Point2], radius: f64, min_support: usize) -> Vec<Point2> {
    let mut centers: Vec<(Point2, usize)> = Vec::new();
    for p in points {
        match centers.iter_mut().find(|(c, _)| c.dist(*p) <= radius * 3.0) {
            Some((c, k)) => {
                // running mean keeps the center stable
                let w = *k as f64;
                *c = Point2::new((c.x * w + p.x) / (w + 1.0), (c.y * w + p.y) / (w + 1.0));
                *k += 1;
            }
            None => centers.push((*p, 1)),
        }
    }
    centers
        .into_iter()
        .filter(|(_, k)| *k >= min_support)
        .map(|(c, _)| c)
        .collect()
}

fn merge_centers(mut centers: Vec<Point2>, radius: f64) -> Vec<Point2> {
    let mut out: Vec<Point2> = Vec::new();
    centers.sort_by(|a, b| (a.x, a.y).partial_cmp(&(b.x, b.y)).unwrap());
    for c in centers {
        if !out.iter().any(|o| o.dist(c) <= radius) {
            out.push(c);
        }
    }
    out
}

/// Grid fan direction helper shared with the CLI: groups ruling directions
/// (already clustered) into arcs.
pub fn fan_arcs(dirs: &[f64], gap_tol: f64) -> Vec<(f64, f64)> {
    let dummy: Vec<Ruling> = dirs
        .iter()
        .map(|&t| Ruling {
            geometry: RulingGeom::Ray(Ray::new(Point2::ORIGIN, norm_angle(t))),
            gradient: Vec2::new(0.0, 0.0),
            endpoints: vec![0],
            piece: usize::MAX,
            violation: None,
        })
        .collect();
    let (fans, _) = build_fans(&dummy, 1, gap_tol);
    fans.into_iter().next().map(|f| f.arcs).unwrap_or_default()
}
