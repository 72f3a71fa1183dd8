//! Exact piecewise solutions of the degenerate Monge-Ampere equation
//! `u_xx u_yy - u_xy^2 = 0` on the plane with finitely many singular points.
//!
//! A scene is a finite set of pieces (conical, cylindrical, affine) glued C^2
//! along lines, rays and segments. Builders construct exact solutions for the
//! known families; the analysis layer verifies a scene numerically and
//! classifies it, either from the closed form or from a sampled grid.

pub mod analyze;
pub mod error;
pub mod exec;
pub mod grid;
pub mod plane;
pub mod profile;
pub mod randgen;
pub mod scene;
pub mod shell;

pub use error::{AnalyzeError, BuildError, GeometryError, ProfileError, ShellError};
