//! Shared helpers for the integration tests: catalog builders, fixture
//! paths, and a finite-difference oracle that touches nothing of the
//! crate's jet machinery beyond the closed-form norm evaluator.
#![allow(dead_code)]

use mlab::norms::{evaluate, NormSpec};
use nalgebra::{DMatrix, DVector};

pub fn euclid(n: usize) -> NormSpec {
    NormSpec::euclidean(DMatrix::identity(n, n)).unwrap()
}

pub fn euclid_aniso3() -> NormSpec {
    let a = DMatrix::from_row_slice(3, 3, &[2.0, 0.3, 0.0, 0.3, 1.5, -0.2, 0.0, -0.2, 1.0]);
    NormSpec::euclidean(a).unwrap()
}

pub fn randers2() -> NormSpec {
    NormSpec::randers(DMatrix::identity(2, 2), DVector::from_column_slice(&[0.5, 0.0])).unwrap()
}

pub fn randers3() -> NormSpec {
    NormSpec::randers(DMatrix::identity(3, 3), DVector::from_column_slice(&[0.3, 0.0, 0.1]))
        .unwrap()
}

pub fn quartic(n: usize) -> NormSpec {
    NormSpec::quartic_reg(n, 0.2).unwrap()
}

/// Path of a spec fixture shipped with the crate.
pub fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("specs").join(name)
}

fn f2(spec: &NormSpec, y: &DVector<f64>) -> f64 {
    let f = evaluate(spec, y).unwrap();
    f * f
}

/// ∂²F²/∂yᵢ∂yⱼ by central differences with one Richardson level; accuracy
/// around 1e−8 relative on the catalog families.
pub fn fd_second(spec: &NormSpec, y: &DVector<f64>, i: usize, j: usize) -> f64 {
    let h = 1e-2 * (1.0 + y.norm());
    if i == j {
        let shift = |t: f64| {
            let mut p = y.clone();
            p[i] += t;
            f2(spec, &p)
        };
        (-shift(2.0 * h) + 16.0 * shift(h) - 30.0 * shift(0.0) + 16.0 * shift(-h) - shift(-2.0 * h))
            / (12.0 * h * h)
    } else {
        let shift = |s: f64, t: f64| {
            let mut p = y.clone();
            p[i] += s;
            p[j] += t;
            f2(spec, &p)
        };
        let d = |hh: f64| {
            (shift(hh, hh) - shift(hh, -hh) - shift(-hh, hh) + shift(-hh, -hh)) / (4.0 * hh * hh)
        };
        (4.0 * d(h / 2.0) - d(h)) / 3.0
    }
}

/// Metric g = ½ ∂²F² assembled purely from function values.
pub fn fd_metric(spec: &NormSpec, y: &DVector<f64>) -> DMatrix<f64> {
    let n = y.len();
    DMatrix::from_fn(n, n, |i, j| 0.5 * fd_second(spec, y, i, j))
}

/// ∂³F²/∂yᵢ∂yⱼ∂yₖ by differencing the second-derivative stencil; accuracy
/// around 1e−6 — coarse, but independent of the Taylor-jet code path.
pub fn fd_third(spec: &NormSpec, y: &DVector<f64>, i: usize, j: usize, k: usize) -> f64 {
    let h = 5e-3 * (1.0 + y.norm());
    let d = |hh: f64| {
        let mut plus = y.clone();
        plus[k] += hh;
        let mut minus = y.clone();
        minus[k] -= hh;
        (fd_second(spec, &plus, i, j) - fd_second(spec, &minus, i, j)) / (2.0 * hh)
    };
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}
