use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("degenerate hull: input is collinear along ({0:.6}, {1:.6}) -- ({2:.6}, {3:.6})")]
    DegenerateHull(f64, f64, f64, f64),
    #[error("need at least {0} points")]
    TooFewPoints(usize),
    #[error("invalid geometry: {0}")]
    Invalid(String),
}

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error("no nontrivial kappa in the basis satisfies the moment conditions")]
    TrivialOnly,
    #[error("moment conditions are infeasible for this basis (residual {0:.3e})")]
    Infeasible(f64),
    #[error("no 2pi-periodic solution: {0}")]
    Unsolvable(String),
    #[error("invalid profile: {0}")]
    Invalid(String),
}

#[derive(Debug, Error)]
pub enum BuildError {
    #[error("bad geometry: {0}")]
    BadGeometry(String),
    #[error("gluing infeasible: {0}")]
    GluingInfeasible(String),
    #[error("curvature density vanishes identically; the point would not be singular")]
    NotSingular,
    #[error("input polygon is not strictly convex: {0}")]
    NonConvexInput(String),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("scene validation failed: {0}")]
    Validation(String),
}

#[derive(Debug, Error)]
pub enum AnalyzeError {
    #[error("point coincides with a singularity")]
    SingularPoint,
    #[error("point is too close to a singularity for a finite-difference stencil")]
    TooCloseToSingularity,
    #[error("umbilic point: the Hessian vanishes, no unique ruling direction")]
    UmbilicPoint,
    #[error("grid resolution too low: {0}")]
    ResolutionTooLow(String),
    #[error("field is inconsistent with a developable solution: {0}")]
    InconsistentField(String),
    #[error("classification refused: {0}")]
    Unverified(String),
    #[error("structure violation: {0}")]
    StructureViolation(String),
}

#[derive(Debug, Error)]
pub enum ShellError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("unsupported combination: {0}")]
    Unsupported(String),
}
