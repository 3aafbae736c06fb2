use thiserror::Error;

/// Everything that can go wrong while evaluating norms, tensors, or surfaces.
#[derive(Debug, Error)]
pub enum Error {
    /// The point is inside the exclusion ball around the origin where the
    /// norm is not differentiable.
    #[error("degenerate point: |y| = {0:.3e} is inside the exclusion radius {1:.1e}")]
    DegeneratePoint(f64, f64),

    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    #[error("parse error: {0}")]
    ParseError(String),

    #[error("unsupported jet order {0}: supported orders are 2, 3, 4")]
    UnsupportedOrder(usize),

    #[error("metric is not positive definite at the evaluated point")]
    NotPositiveDefinite,

    #[error("degenerate 2-plane: Gram determinant {0:.3e} below threshold")]
    DegeneratePlane(f64),

    #[error("projection onto the surface failed: {0}")]
    ProjectionFailed(String),

    #[error("point is not on the surface: |phi(y)| = {0:.3e}")]
    NotOnSurface(f64),

    #[error("tangent frame degenerate: Gram-Schmidt pivot {0:.3e} below threshold")]
    FrameDegenerate(f64),

    #[error("dimension {0} too small: {1}")]
    DimensionTooSmall(usize, &'static str),

    #[error("surface is not proper: sampled |H| = {0:.3e} is below 1e-6")]
    NotProper(f64),

    #[error("zero vector given for {0}")]
    ZeroVector(&'static str),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
