//! File formats and exports: versioned scene JSON, grid CSV, OBJ surface
//! meshes and SVG ruling figures.

use crate::error::ShellError;
use crate::exec::{self, Mode};
use crate::grid::GridField;
use crate::plane::{Point2, Vec2};
use crate::profile::{CylProfile, PolySeries, TrigSeries, TrigTerm};
use crate::scene::{
    build_cylinder, build_full_cone, build_half_cone, build_polyhedral, build_two_singular,
    IfaceGeom, Scene, TwoSingularParams,
};
use serde::{Deserialize, Serialize};

pub const SCENE_VERSION: &str = "mongeforge/1";

#[derive(Serialize, Deserialize)]
struct SceneDoc {
    version: String,
    scene: Scene,
}

#[derive(Deserialize)]
struct CylDoc {
    #[serde(default)]
    x_b: f64,
    #[serde(default)]
    alpha_b: f64,
    #[serde(default)]
    dalpha_b: f64,
    kappa: Vec<f64>,
}

impl CylDoc {
    fn profile(&self) -> CylProfile {
        CylProfile {
            x_b: self.x_b,
            alpha_b: self.alpha_b,
            dalpha_b: self.dalpha_b,
            kappa: PolySeries::new(self.kappa.clone()),
        }
    }
}

fn trig(terms: Vec<TrigTerm>) -> TrigSeries {
    TrigSeries::new(terms)
}

fn pt(p: [f64; 2]) -> Point2 {
    Point2::new(p[0], p[1])
}

#[derive(Deserialize)]
#[serde(tag = "builder", rename_all = "snake_case", deny_unknown_fields)]
enum BuilderDoc {
    FullCone {
        #[serde(default)]
        vertex: [f64; 2],
        #[serde(default)]
        u0: f64,
        kappa: Vec<TrigTerm>,
    },
    Cylinder {
        #[serde(default)]
        frame_theta: f64,
        #[serde(default)]
        v0: f64,
        profile: CylDoc,
    },
    HalfCone {
        #[serde(default)]
        vertex: [f64; 2],
        line_theta: f64,
        cyl: CylDoc,
        #[serde(default)]
        v0: f64,
        cone_basis: Option<Vec<Vec<TrigTerm>>>,
    },
    TwoSingularStrip {
        p1: [f64; 2],
        p2: [f64; 2],
        theta1: f64,
        theta2: f64,
        #[serde(default)]
        v0: f64,
        cyl: CylDoc,
    },
    TwoSingularHalfStrip {
        p1: [f64; 2],
        p2: [f64; 2],
        h_theta1: f64,
        h_theta2: f64,
        #[serde(default)]
        v0: f64,
        cyl: CylDoc,
    },
    TwoSingularOffLine {
        p1: [f64; 2],
        p2: [f64; 2],
        r_theta: f64,
        theta1: f64,
        theta2: f64,
        g_lin: Option<[f64; 2]>,
        #[serde(default)]
        v0: f64,
        cyl: CylDoc,
    },
    TwoSingularSectors {
        p1: [f64; 2],
        p2: [f64; 2],
        thetas: [f64; 4],
        g: [f64; 2],
        #[serde(default)]
        base: f64,
    },
    Polyhedral {
        vertices: Vec<[f64; 2]>,
        bases: Option<Vec<Vec<Vec<TrigTerm>>>>,
    },
}

fn build_from_doc(doc: BuilderDoc) -> Result<Scene, ShellError> {
    let scene = match doc {
        BuilderDoc::FullCone { vertex, u0, kappa } => {
            build_full_cone(pt(vertex), u0, &trig(kappa))?
        }
        BuilderDoc::Cylinder {
            frame_theta,
            v0,
            profile,
        } => build_cylinder(frame_theta, v0, profile.profile())?,
        BuilderDoc::HalfCone {
            vertex,
            line_theta,
            cyl,
            v0,
            cone_basis,
        } => {
            let basis: Option<Vec<TrigSeries>> =
                cone_basis.map(|b| b.into_iter().map(trig).collect());
            build_half_cone(pt(vertex), line_theta, cyl.profile(), v0, basis.as_deref())?
        }
        BuilderDoc::TwoSingularStrip {
            p1,
            p2,
            theta1,
            theta2,
            v0,
            cyl,
        } => build_two_singular(&TwoSingularParams::Strip {
            p1: pt(p1),
            p2: pt(p2),
            theta1,
            theta2,
            v0,
            cyl: cyl.profile(),
        })?,
        BuilderDoc::TwoSingularHalfStrip {
            p1,
            p2,
            h_theta1,
            h_theta2,
            v0,
            cyl,
        } => build_two_singular(&TwoSingularParams::HalfStrip {
            p1: pt(p1),
            p2: pt(p2),
            h_theta1,
            h_theta2,
            v0,
            cyl: cyl.profile(),
        })?,
        BuilderDoc::TwoSingularOffLine {
            p1,
            p2,
            r_theta,
            theta1,
            theta2,
            g_lin,
            v0,
            cyl,
        } => build_two_singular(&TwoSingularParams::OffLine {
            p1: pt(p1),
            p2: pt(p2),
            r_theta,
            theta1,
            theta2,
            g_lin: g_lin.map(|g| Vec2::new(g[0], g[1])),
            v0,
            cyl: cyl.profile(),
        })?,
        BuilderDoc::TwoSingularSectors {
            p1,
            p2,
            thetas,
            g,
            base,
        } => build_two_singular(&TwoSingularParams::Sectors {
            p1: pt(p1),
            p2: pt(p2),
            thetas,
            g: Vec2::new(g[0], g[1]),
            base,
        })?,
        BuilderDoc::Polyhedral { vertices, bases } => {
            let pts: Vec<Point2> = vertices.into_iter().map(pt).collect();
            let bases: Option<Vec<Vec<TrigSeries>>> = bases.map(|bs| {
                bs.into_iter()
                    .map(|b| b.into_iter().map(trig).collect())
                    .collect()
            });
            build_polyhedral(&pts, bases.as_deref())?
        }
    };
    Ok(scene)
}

/// Parses a scene document: either a builder invocation
/// (`{"builder": "full_cone", ...}`) or an explicit versioned scene
/// (`{"version": "mongeforge/1", "scene": {...}}`). The result always
/// passes scene validation.
pub fn parse_scene(text: &str) -> Result<Scene, ShellError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| ShellError::Parse(e.to_string()))?;
    if value.get("builder").is_some() {
        let doc: BuilderDoc =
            serde_json::from_value(value).map_err(|e| ShellError::Parse(e.to_string()))?;
        return build_from_doc(doc);
    }
    let doc: SceneDoc =
        serde_json::from_value(value).map_err(|e| ShellError::Parse(e.to_string()))?;
    if doc.version != SCENE_VERSION {
        return Err(ShellError::Parse(format!(
            "unsupported version {:?}; expected {SCENE_VERSION:?}",
            doc.version
        )));
    }
    doc.scene
        .validate()
        .map_err(|e| ShellError::Validation(e.to_string()))?;
    Ok(doc.scene)
}

pub fn emit_scene(scene: &Scene) -> String {
    let doc = SceneDoc {
        version: SCENE_VERSION.to_string(),
        scene: scene.clone(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("scene serializes");
    s.push('\n');
    s
}

/// Samples `scene` on a uniform grid; singularities become grid marks.
pub fn sample_grid(
    scene: &Scene,
    bbox: (f64, f64, f64, f64),
    nx: usize,
    ny: usize,
    mode: Mode,
) -> Result<GridField, ShellError> {
    if nx < 8 || ny < 8 {
        return Err(ShellError::Validation(format!(
            "grid must be at least 8 x 8, got {nx} x {ny}"
        )));
    }
    // node coordinates must match GridField::pos bit for bit
    let hx = (bbox.1 - bbox.0) / (nx - 1) as f64;
    let hy = (bbox.3 - bbox.2) / (ny - 1) as f64;
    let values = exec::map_collect(
        nx * ny,
        |idx| {
            let (i, j) = (idx % nx, idx / nx);
            let x = bbox.0 + hx * i as f64;
            let y = bbox.2 + hy * j as f64;
            scene.evaluate_extended(Point2::new(x, y))
        },
        mode,
    );
    GridField::new(bbox, nx, ny, values, scene.singularities.clone())
        .map_err(|e| ShellError::Validation(e.to_string()))
}

/// `x,y,u` CSV, row-major with y outermost, full round-trip precision.
pub fn grid_to_csv(grid: &GridField) -> String {
    let mut out = String::with_capacity(grid.values.len() * 64 + 8);
    out.push_str("x,y,u\n");
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let p = grid.pos(i, j);
            let u = grid.values[j * grid.nx + i];
            out.push_str(&format!("{:.16e},{:.16e},{:.16e}\n", p.x, p.y, u));
        }
    }
    out
}

pub fn grid_from_csv(text: &str) -> Result<GridField, ShellError> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == "x,y,u" => {}
        other => {
            return Err(ShellError::Parse(format!(
                "expected header 'x,y,u', got {other:?}"
            )))
        }
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut us = Vec::new();
    for (ln, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut it = line.split(',');
        let mut next = || -> Result<f64, ShellError> {
            it.next()
                .ok_or_else(|| ShellError::Parse(format!("line {}: missing field", ln + 2)))?
                .trim()
                .parse::<f64>()
                .map_err(|e| ShellError::Parse(format!("line {}: {e}", ln + 2)))
        };
        xs.push(next()?);
        ys.push(next()?);
        us.push(next()?);
    }
    let nx = ys.iter().position(|&y| y != ys[0]).unwrap_or(ys.len());
    if nx == 0 || !us.len().is_multiple_of(nx) {
        return Err(ShellError::Parse(
            "rows do not form a rectangular grid".into(),
        ));
    }
    let ny = us.len() / nx;
    let bbox = (xs[0], xs[nx - 1], ys[0], ys[us.len() - 1]);
    GridField::new(bbox, nx, ny, us, vec![]).map_err(|e| ShellError::Parse(e.to_string()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Obj,
    Svg,
    Csv,
}

impl std::str::FromStr for ExportFormat {
    type Err = ShellError;
    fn from_str(s: &str) -> Result<Self, ShellError> {
        match s {
            "obj" => Ok(ExportFormat::Obj),
            "svg" => Ok(ExportFormat::Svg),
            "csv" => Ok(ExportFormat::Csv),
            other => Err(ShellError::Unsupported(format!("format {other:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExportConfig {
    pub format: ExportFormat,
    pub bbox: (f64, f64, f64, f64),
    pub nx: usize,
    pub ny: usize,
    /// clip radius around singularities (OBJ only)
    pub clip: f64,
    pub mode: Mode,
}

impl ExportConfig {
    pub fn check(&self) -> Result<(), ShellError> {
        if self.nx < 2 || self.ny < 2 {
            return Err(ShellError::Validation(
                "resolution must be at least 2".into(),
            ));
        }
        if !(self.bbox.1 > self.bbox.0 && self.bbox.3 > self.bbox.2) {
            return Err(ShellError::Validation("degenerate bbox".into()));
        }
        Ok(())
    }
}

pub fn export(scene: &Scene, cfg: &ExportConfig) -> Result<String, ShellError> {
    cfg.check()?;
    match cfg.format {
        ExportFormat::Obj => export_obj(scene, cfg),
        ExportFormat::Svg => Ok(export_svg(scene, cfg.bbox)),
        ExportFormat::Csv => {
            let grid = sample_grid(scene, cfg.bbox, cfg.nx.max(8), cfg.ny.max(8), cfg.mode)?;
            Ok(grid_to_csv(&grid))
        }
    }
}

/// ASCII OBJ mesh of the graph surface over the bbox, minus clip disks
/// around singularities; triangles counterclockwise seen from above.
fn export_obj(scene: &Scene, cfg: &ExportConfig) -> Result<String, ShellError> {
    let (nx, ny) = (cfg.nx, cfg.ny);
    let mut index = vec![0usize; nx * ny];
    let mut out = String::new();
    let mut count = 0usize;
    for j in 0..ny {
        for i in 0..nx {
            let x = cfg.bbox.0 + (cfg.bbox.1 - cfg.bbox.0) * i as f64 / (nx - 1) as f64;
            let y = cfg.bbox.2 + (cfg.bbox.3 - cfg.bbox.2) * j as f64 / (ny - 1) as f64;
            let p = Point2::new(x, y);
            if cfg.clip > 0.0 && scene.singularities.iter().any(|s| s.dist(p) < cfg.clip) {
                continue;
            }
            let u = scene.evaluate_extended(p);
            out.push_str(&format!("v {x} {y} {u}\n"));
            count += 1;
            index[j * nx + i] = count; // 1-based; 0 means clipped
        }
    }
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let a = index[j * nx + i];
            let b = index[j * nx + i + 1];
            let c = index[(j + 1) * nx + i + 1];
            let d = index[(j + 1) * nx + i];
            if a > 0 && b > 0 && c > 0 && d > 0 {
                out.push_str(&format!("f {a} {b} {c}\n"));
                out.push_str(&format!("f {a} {c} {d}\n"));
            }
        }
    }
    Ok(out)
}

/// Clips an anchored parametrized line `anchor + t dir`, `t` in `[t0, t1]`
/// (possibly infinite), to the bbox; returns the clipped endpoints.
fn clip_param_line(
    anchor: Point2,
    dir: Vec2,
    mut t0: f64,
    mut t1: f64,
    bbox: (f64, f64, f64, f64),
) -> Option<(Point2, Point2)> {
    for (a0, d, lo, hi) in [
        (anchor.x, dir.x, bbox.0, bbox.1),
        (anchor.y, dir.y, bbox.2, bbox.3),
    ] {
        if d.abs() < 1e-300 {
            if a0 < lo || a0 > hi {
                return None;
            }
            continue;
        }
        let (mut ta, mut tb) = ((lo - a0) / d, (hi - a0) / d);
        if ta > tb {
            std::mem::swap(&mut ta, &mut tb);
        }
        t0 = t0.max(ta);
        t1 = t1.min(tb);
    }
    (t0 < t1 && t0.is_finite() && t1.is_finite())
        .then(|| (anchor.add(dir.scale(t0)), anchor.add(dir.scale(t1))))
}

/// SVG figure of the ruling configuration: shaded cylinder strip,
/// interfaces as lines, singularities as dots. World y points up.
fn export_svg(scene: &Scene, bbox: (f64, f64, f64, f64)) -> String {
    let (x0, x1, y0, y1) = bbox;
    let (w, h) = (x1 - x0, y1 - y0);
    let fy = move |y: f64| y0 + y1 - y; // flip into SVG's downward y
    let stroke = 0.004 * w.max(h);
    let mut out =
        format!("<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{x0} {y0} {w} {h}\">\n");
    if let Some(strip) = scene.cylinder_strip() {
        // intersect the strip slab with the bbox rectangle
        let n = strip.normal.unit();
        let mut poly = vec![
            Point2::new(x0, y0),
            Point2::new(x1, y0),
            Point2::new(x1, y1),
            Point2::new(x0, y1),
        ];
        for (sgn, c) in [(1.0, strip.c_lo), (-1.0, strip.c_hi)] {
            let Some(c) = c else { continue };
            let inside = |p: &Point2| sgn * (n.dot(p.to_vec()) - c) >= 0.0;
            let mut next = Vec::new();
            for k in 0..poly.len() {
                let (a, b) = (poly[k], poly[(k + 1) % poly.len()]);
                let (ia, ib) = (inside(&a), inside(&b));
                if ia {
                    next.push(a);
                }
                if ia != ib {
                    let fa = sgn * (n.dot(a.to_vec()) - c);
                    let fb = sgn * (n.dot(b.to_vec()) - c);
                    let t = fa / (fa - fb);
                    next.push(Point2::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)));
                }
            }
            poly = next;
        }
        if poly.len() >= 3 {
            let pts: Vec<String> = poly
                .iter()
                .map(|p| format!("{},{}", p.x, fy(p.y)))
                .collect();
            out.push_str(&format!(
                "  <polygon points=\"{}\" fill=\"#d0d8f0\" stroke=\"none\"/>\n",
                pts.join(" ")
            ));
        }
    }
    let big = 10.0 * (w + h) + x0.abs() + x1.abs() + y0.abs() + y1.abs();
    for iface in &scene.interfaces {
        let clipped = match &iface.geometry {
            IfaceGeom::Line(l) => clip_param_line(l.anchor(), l.tangent(), -big, big, bbox),
            IfaceGeom::Ray(r) => clip_param_line(r.origin, r.dir.unit(), 0.0, big, bbox),
            IfaceGeom::Segment(s) => clip_param_line(s.a, s.b.sub(s.a), 0.0, 1.0, bbox),
        };
        if let Some((a, b)) = clipped {
            out.push_str(&format!(
                "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#333\" stroke-width=\"{stroke}\"/>\n",
                a.x, fy(a.y), b.x, fy(b.y)
            ));
        }
    }
    for s in &scene.singularities {
        out.push_str(&format!(
            "  <circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"#c00\"/>\n",
            s.x,
            fy(s.y),
            2.5 * stroke
        ));
    }
    out.push_str("</svg>\n");
    out
}
