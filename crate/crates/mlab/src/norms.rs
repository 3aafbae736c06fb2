//! The norm catalog and its axioms.
//!
//! A Minkowski norm F on R̂ⁿ = Rⁿ∖{0} is smooth, positive, positively
//! 1-homogeneous, and strongly convex (the induced metric
//! g_ij = ½ ∂²F²/∂yⁱ∂yʲ is positive definite). Three families are supported:
//!
//! * `euclidean`   — F = √(yᵀAy) with A symmetric positive definite,
//! * `randers`     — F = √(yᵀAy) + b·y with drift bᵀA⁻¹b < 1; positively but
//!   not absolutely homogeneous,
//! * `quartic_reg` — F = ((Σyᵢ²)² + ε Σyᵢ⁴)^¼ with ε > 0; absolutely
//!   homogeneous and non-euclidean (min metric eigenvalue 1/√(1+ε) on the
//!   axis directions, so strongly convex for every ε > 0).
//!
//! `check_axioms` measures the axioms over a sample plan rather than proving
//! them: positivity, the homogeneity residual, the minimum metric eigenvalue,
//! and the absolute-homogeneity residual.

use nalgebra::{DMatrix, DVector};

use crate::deriv::jet_of_f2;
use crate::error::{Error, Result};
use crate::verify::SamplePlan;

/// Points with |y| below this radius are rejected as degenerate: every
/// Minkowski norm is non-differentiable at the origin.
pub const EXCLUSION_RADIUS: f64 = 1e-8;

/// Admission threshold for a validated absolute-homogeneity claim.
pub const ABS_HOMOGENEITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub enum Family {
    Euclidean { a: DMatrix<f64> },
    Randers { a: DMatrix<f64>, b: DVector<f64> },
    QuarticReg { eps: f64 },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Euclidean { .. } => "euclidean",
            Family::Randers { .. } => "randers",
            Family::QuarticReg { .. } => "quartic_reg",
        }
    }
}

/// A validated norm specification: dimension plus family parameters.
#[derive(Debug, Clone)]
pub struct NormSpec {
    dim: usize,
    family: Family,
}

impl NormSpec {
    pub fn euclidean(a: DMatrix<f64>) -> Result<Self> {
        let dim = a.nrows();
        let spec = NormSpec { dim, family: Family::Euclidean { a } };
        spec.validate()?;
        Ok(spec)
    }

    pub fn randers(a: DMatrix<f64>, b: DVector<f64>) -> Result<Self> {
        let dim = a.nrows();
        let spec = NormSpec { dim, family: Family::Randers { a, b } };
        spec.validate()?;
        Ok(spec)
    }

    pub fn quartic_reg(dim: usize, eps: f64) -> Result<Self> {
        let spec = NormSpec { dim, family: Family::QuarticReg { eps } };
        spec.validate()?;
        Ok(spec)
    }

    /// Bypasses all invariant validation. Exists so tests can probe how the
    /// pipeline degrades on out-of-regime parameters (e.g. a randers drift
    /// ≥ 1, whose "norm" takes non-positive values and whose metric loses
    /// positive definiteness). Never construct production specs this way.
    pub fn new_unchecked(dim: usize, family: Family) -> Self {
        NormSpec { dim, family }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::InvalidSpec(format!(
                "dim = {} but at least 2 is required",
                self.dim
            )));
        }
        match &self.family {
            Family::Euclidean { a } => validate_spd(a, self.dim)?,
            Family::Randers { a, b } => {
                validate_spd(a, self.dim)?;
                if b.len() != self.dim {
                    return Err(Error::InvalidSpec(format!(
                        "drift vector has length {} but dim = {}",
                        b.len(),
                        self.dim
                    )));
                }
                // positivity of F on R̂ⁿ is equivalent to bᵀA⁻¹b < 1
                let chol = nalgebra::Cholesky::new(a.clone()).ok_or(Error::NotPositiveDefinite)?;
                let drift = b.dot(&chol.solve(b));
                if !(drift < 1.0) {
                    return Err(Error::InvalidSpec(format!(
                        "randers drift b'A^-1 b = {drift:.6} must be < 1 for positivity"
                    )));
                }
            }
            Family::QuarticReg { eps } => {
                if !(eps.is_finite() && *eps > 0.0) {
                    return Err(Error::InvalidSpec(format!("eps = {eps} must be finite and > 0")));
                }
            }
        }
        Ok(())
    }

    /// Rejects points outside the admissible domain of this spec.
    pub fn check_point(&self, y: &DVector<f64>) -> Result<()> {
        if y.len() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "point has length {} but spec dim = {}",
                y.len(),
                self.dim
            )));
        }
        let r = y.norm();
        if r < EXCLUSION_RADIUS {
            return Err(Error::DegeneratePoint(r, EXCLUSION_RADIUS));
        }
        Ok(())
    }
}

impl std::fmt::Display for NormSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.family {
            Family::Euclidean { .. } => write!(f, "euclidean n={}", self.dim),
            Family::Randers { a, b } => {
                let drift = nalgebra::Cholesky::new(a.clone())
                    .map(|c| b.dot(&c.solve(b)))
                    .unwrap_or(f64::NAN);
                write!(f, "randers n={} drift={:.6}", self.dim, drift)
            }
            Family::QuarticReg { eps } => write!(f, "quartic_reg n={} eps={}", self.dim, eps),
        }
    }
}

fn validate_spd(a: &DMatrix<f64>, dim: usize) -> Result<()> {
    if a.nrows() != dim || a.ncols() != dim {
        return Err(Error::InvalidSpec(format!(
            "matrix is {}x{} but dim = {}",
            a.nrows(),
            a.ncols(),
            dim
        )));
    }
    let asym = (a - a.transpose()).amax();
    if asym > 1e-12 * (1.0 + a.amax()) {
        return Err(Error::InvalidSpec(format!("matrix is not symmetric: |A - A'| = {asym:.3e}")));
    }
    let min_eig = a.clone().symmetric_eigenvalues().iter().fold(f64::INFINITY, |m, &v| m.min(v));
    if !(min_eig > 0.0) {
        return Err(Error::InvalidSpec(format!(
            "matrix is not positive definite: min eigenvalue = {min_eig:.3e}"
        )));
    }
    Ok(())
}

/// F(y), by the family's closed form. Errors on inadmissible points; for
/// validated specs the result is strictly positive.
pub fn evaluate(spec: &NormSpec, y: &DVector<f64>) -> Result<f64> {
    spec.check_point(y)?;
    Ok(match spec.family() {
        Family::Euclidean { a } => quad(a, y).sqrt(),
        Family::Randers { a, b } => quad(a, y).sqrt() + b.dot(y),
        Family::QuarticReg { eps } => {
            let s: f64 = y.iter().map(|v| v * v).sum();
            let p: f64 = y.iter().map(|v| v.powi(4)).sum();
            (s * s + eps * p).powf(0.25)
        }
    })
}

fn quad(a: &DMatrix<f64>, y: &DVector<f64>) -> f64 {
    (y.transpose() * a * y)[0]
}

/// Measured axiom diagnostics over a sample plan.
#[derive(Debug, Clone)]
pub struct AxiomReport {
    /// F(y) > 0 at every sample.
    pub positivity_ok: bool,
    /// sup over samples and λ ∈ {1/2, 2, 7} of |F(λy) − λF(y)| / (λ F(y)).
    pub homogeneity_residual: f64,
    /// Minimum eigenvalue of g_ij(y) over all samples.
    pub min_metric_eigenvalue: f64,
    /// sup over samples of |F(−y) − F(y)| / F(y).
    pub abs_homogeneity_residual: f64,
    pub samples_used: usize,
}

/// Samples the plan and measures the Minkowski-norm axioms: positivity,
/// positive 1-homogeneity, strong convexity (via the metric spectrum), and —
/// informationally — absolute homogeneity. The metric eigenvalues come
/// straight from the order-2 jet so that indefinite metrics are *reported*,
/// not rejected.
pub fn check_axioms(spec: &NormSpec, plan: &SamplePlan) -> Result<AxiomReport> {
    let points = plan.sample_points(spec.dim());
    let mut positivity_ok = true;
    let mut homog: f64 = 0.0;
    let mut min_eig = f64::INFINITY;
    let mut abs_homog: f64 = 0.0;
    for y in &points {
        let f = evaluate(spec, y)?;
        if !(f > 0.0) {
            positivity_ok = false;
        }
        if f != 0.0 {
            for lambda in [0.5, 2.0, 7.0] {
                let fl = evaluate(spec, &(y * lambda))?;
                homog = homog.max((fl - lambda * f).abs() / (lambda * f.abs()));
            }
            let fm = evaluate(spec, &(-y))?;
            abs_homog = abs_homog.max((fm - f).abs() / f.abs());
        }
        let jet = jet_of_f2(spec, y, 2)?;
        let g = jet.hess / 2.0;
        let eig = g.symmetric_eigenvalues();
        min_eig = min_eig.min(eig.iter().fold(f64::INFINITY, |m, &v| m.min(v)));
    }
    Ok(AxiomReport {
        positivity_ok,
        homogeneity_residual: homog,
        min_metric_eigenvalue: min_eig,
        abs_homogeneity_residual: abs_homog,
        samples_used: points.len(),
    })
}

/// Whether F(−y) = F(y) within [`ABS_HOMOGENEITY_TOL`] over the plan's
/// samples; returns the decision together with the measured residual.
pub fn is_absolutely_homogeneous(spec: &NormSpec, plan: &SamplePlan) -> Result<(bool, f64)> {
    let report = check_axioms(spec, plan)?;
    Ok((report.abs_homogeneity_residual < ABS_HOMOGENEITY_TOL, report.abs_homogeneity_residual))
}

/// Parses a norm spec from its JSON document form, e.g.
/// `{"dim": 2, "family": "euclidean", "A": [[1,0],[0,1]]}`. Field sets are
/// exact per family (`A` for euclidean, `A`+`b` for randers, `eps` for
/// quartic_reg); unknown fields are rejected, and all family invariants are
/// enforced before the spec is returned.
pub fn parse_spec(text: &str) -> Result<NormSpec> {
    let doc: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::ParseError(format!("invalid JSON: {e}")))?;
    let obj = doc
        .as_object()
        .ok_or_else(|| Error::ParseError("top level must be a JSON object".into()))?;

    let family = get_str(obj, "family")?;
    let allowed: &[&str] = match family {
        "euclidean" => &["dim", "family", "A"],
        "randers" => &["dim", "family", "A", "b"],
        "quartic_reg" => &["dim", "family", "eps"],
        other => {
            return Err(Error::ParseError(format!(
                "unknown family {other:?}; expected euclidean, randers, or quartic_reg"
            )))
        }
    };
    for key in obj.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(Error::ParseError(format!("unknown field {key:?} for family {family:?}")));
        }
    }

    let dim = get_dim(obj)?;
    match family {
        "euclidean" => NormSpec::euclidean(get_matrix(obj, "A", dim)?),
        "randers" => NormSpec::randers(get_matrix(obj, "A", dim)?, get_vector(obj, "b", dim)?),
        "quartic_reg" => {
            let eps = obj
                .get("eps")
                .and_then(|v| v.as_f64())
                .ok_or_else(|| Error::ParseError("missing or non-numeric field \"eps\"".into()))?;
            NormSpec::quartic_reg(dim, eps)
        }
        _ => unreachable!(),
    }
}

/// Reads and parses a norm spec file.
pub fn parse_spec_file(path: &std::path::Path) -> Result<NormSpec> {
    let text = std::fs::read_to_string(path)?;
    parse_spec(&text)
}

fn get_str<'a>(obj: &'a serde_json::Map<String, serde_json::Value>, key: &str) -> Result<&'a str> {
    obj.get(key)
        .and_then(|v| v.as_str())
        .ok_or_else(|| Error::ParseError(format!("missing or non-string field {key:?}")))
}

fn get_dim(obj: &serde_json::Map<String, serde_json::Value>) -> Result<usize> {
    let v = obj.get("dim").ok_or_else(|| Error::ParseError("missing field \"dim\"".into()))?;
    let dim = v
        .as_u64()
        .ok_or_else(|| Error::ParseError(format!("\"dim\" must be a positive integer, got {v}")))?;
    Ok(dim as usize)
}

fn get_vector(
    obj: &serde_json::Map<String, serde_json::Value>,
    key: &str,
    dim: usize,
) -> Result<DVector<f64>> {
    let arr = obj
        .get(key)
        .and_then(|v| v.as_array())
        .ok_or_else(|| Error::ParseError(format!("missing or non-array field {key:?}")))?;
    if arr.len() != dim {
        return Err(Error::ParseError(format!(
            "field {key:?} has {} entries but dim = {dim}",
            arr.len()
        )));
    }
    let vals: Option<Vec<f64>> = arr.iter().map(|v| v.as_f64()).collect();
    let vals =
        vals.ok_or_else(|| Error::ParseError(format!("field {key:?} has non-numeric entries")))?;
    Ok(DVector::from_vec(vals))
}

fn get_matrix(
    obj: &serde_json::Map<String, serde_json::Value>,
    key: &str,
    dim: usize,
) -> Result<DMatrix<f64>> {
    let rows = obj
        .get(key)
        .and_then(|v| v.as_array())
        .ok_or_else(|| Error::ParseError(format!("missing or non-array field {key:?}")))?;
    if rows.len() != dim {
        return Err(Error::ParseError(format!(
            "field {key:?} has {} rows but dim = {dim}",
            rows.len()
        )));
    }
    let mut m = DMatrix::zeros(dim, dim);
    for (i, row) in rows.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| Error::ParseError(format!("row {i} of {key:?} is not an array")))?;
        if row.len() != dim {
            return Err(Error::ParseError(format!(
                "row {i} of {key:?} has {} entries but dim = {dim}",
                row.len()
            )));
        }
        for (j, v) in row.iter().enumerate() {
            m[(i, j)] = v.as_f64().ok_or_else(|| {
                Error::ParseError(format!("entry ({i},{j}) of {key:?} is not numeric"))
            })?;
        }
    }
    Ok(m)
}
