//! Numerical differential geometry of Minkowski norms on R̂ⁿ = Rⁿ∖{0}.
//!
//! A Minkowski norm F induces a Riemannian metric ĝ = g_ij(y) dyⁱ dyʲ on the
//! punctured space via g_ij = ½ ∂²F²/∂yⁱ∂yʲ. This crate computes that metric
//! and the tensors built from it — Cartan torsion, Christoffel symbols,
//! curvature, sectional curvature — from exact truncated-Taylor jets of F²,
//! and verifies the classical structure results for (Rⁿ, F) numerically:
//! curvature as a quadratic expression in the torsion, the geometry of the
//! level hypersurfaces S(r) = F⁻¹(r), and the rigidity statements that force
//! F to be euclidean.
//!
//! Entry points: [`norms`] for the norm catalog, [`tensors`] for pointwise
//! geometry, [`hypersurfaces`] for induced surface geometry, [`verify`] for
//! the theorem suites, and [`cli`] for the `mlab` binary's implementation.

// Validation gates are written `!(x > 0.0)` on purpose: the negated form also
// rejects NaN, which `x <= 0.0` would wave through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dense;
pub mod deriv;
pub mod error;
pub mod hypersurfaces;
pub mod norms;
pub mod report;
pub mod tensors;
pub mod verify;
