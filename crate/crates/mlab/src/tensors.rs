//! Pointwise Riemannian structure of (R̂ⁿ, ĝ).
//!
//! Everything here is an exact function of one jet of F² at the query point:
//!
//! * metric          g_ij  = ½ ∂²F²                       (order-2 jet)
//! * Cartan torsion  C_ijk = (F/4) ∂³F²                   (order-3 jet)
//! * Christoffel     γ̂ⁱ_jk = (gⁱˢ/2)(∂g_sj + ∂g_sk − ∂g_jk)
//! * curvature       R̂ⁱ_jkl, by two independent routes
//!
//! # Curvature convention
//!
//! The coordinate curvature is defined by R̂(∂_k, ∂_l)∂_j = R̂ⁱ_jkl ∂_i, i.e.
//! (R̂(U,V)W)ⁱ = R̂ⁱ_jkl Wʲ Uᵏ Vˡ with
//!
//! ```text
//! R̂ⁱ_jkl = ∂_k γ̂ⁱ_lj − ∂_l γ̂ⁱ_kj + γ̂ⁱ_km γ̂ᵐ_lj − γ̂ⁱ_lm γ̂ᵐ_kj.
//! ```
//!
//! Under this convention the connection route was calibrated against the
//! torsion-product route R̂ⁱ_jkl = (Cˢ_jk Cⁱ_sl − Cˢ_jl Cⁱ_sk)/F² on non-flat
//! samples: they agree entrywise with the *identity* mapping — no sign flip
//! and no index permutation. (Sketch: γ̂ = C♯/F gives ∂_k γ̂ⁱ_lj − ∂_l γ̂ⁱ_kj =
//! −(2/F²)(Cⁱ_bk C♭ᵇ_lj − Cⁱ_bl C♭ᵇ_kj) after the ∂(1/F) terms cancel by the
//! Euler identity C·y = 0, which is −2× the γ̂γ̂ bracket; the sum is then
//! exactly the product formula.) Both routes are kept live and compared in
//! the verification suites; neither is ever rewritten in terms of the other.

use nalgebra::{DMatrix, DVector};

use crate::dense::{Tensor3, Tensor4};
use crate::deriv::{jet_of_f2, Jet};
use crate::error::{Error, Result};
use crate::norms::NormSpec;

/// Relative Gram-determinant floor below which a 2-plane is rejected as
/// degenerate for sectional curvature.
pub const PLANE_DEGENERACY_TOL: f64 = 1e-12;

/// The induced metric at a point: g_ij = ½ ∂²F²/∂yⁱ∂yʲ and its inverse.
#[derive(Debug, Clone)]
pub struct MetricAtPoint {
    pub point: DVector<f64>,
    /// F(y) at the point.
    pub norm_value: f64,
    pub g: DMatrix<f64>,
    pub g_inv: DMatrix<f64>,
}

impl MetricAtPoint {
    /// ĝ(u, v) at this point.
    pub fn inner(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        (u.transpose() * &self.g * v)[0]
    }

    /// ĝ-norm of `u`.
    pub fn norm(&self, u: &DVector<f64>) -> f64 {
        self.inner(u, u).max(0.0).sqrt()
    }
}

/// Cartan torsion in all index positions used downstream: fully lowered
/// C_ijk, mixed Cⁱ_jk = gⁱˢC_sjk, and the mean torsion A_k = gⁱʲC_ijk.
#[derive(Debug, Clone)]
pub struct CartanAtPoint {
    pub c_low: Tensor3,
    pub c_mixed: Tensor3,
    pub a_mean: DVector<f64>,
}

/// Which formula produced a curvature tensor. Both must agree; keeping the
/// tag lets reports say which route they exercised.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurvatureRoute {
    CartanFormula,
    ConnectionFormula,
}

impl CurvatureRoute {
    pub fn as_str(self) -> &'static str {
        match self {
            CurvatureRoute::CartanFormula => "cartan_formula",
            CurvatureRoute::ConnectionFormula => "connection_formula",
        }
    }
}

/// Curvature R̂ⁱ_jkl at a point, tagged with the route that produced it.
#[derive(Debug, Clone)]
pub struct CurvatureAtPoint {
    pub r: Tensor4,
    pub route: CurvatureRoute,
}

/// Everything the downstream modules need at one point, computed from a
/// single shared order-3 jet so the pieces are mutually consistent. The
/// curvature field uses the torsion-product route; call
/// [`curvature_connection`] for the independent order-4 route.
#[derive(Debug, Clone)]
pub struct PointGeometry {
    pub metric: MetricAtPoint,
    pub cartan: CartanAtPoint,
    /// γ̂ⁱ_jk with index layout `[(i, j, k)]`, symmetric in (j, k).
    pub christoffel: Tensor3,
    pub curvature: CurvatureAtPoint,
}

impl PointGeometry {
    pub fn at(spec: &NormSpec, y: &DVector<f64>) -> Result<Self> {
        let jet = jet_of_f2(spec, y, 3)?;
        let metric = metric_from_jet(&jet)?;
        let cartan = cartan_from_jet(&jet, &metric);
        let christoffel = christoffel_from_jet(&jet, &metric);
        let curvature = curvature_from_torsion(&cartan, metric.norm_value);
        Ok(PointGeometry { metric, cartan, christoffel, curvature })
    }

    pub fn dim(&self) -> usize {
        self.metric.g.nrows()
    }
}

fn metric_from_jet(jet: &Jet) -> Result<MetricAtPoint> {
    let g = &jet.hess / 2.0;
    let chol = nalgebra::Cholesky::new(g.clone()).ok_or(Error::NotPositiveDefinite)?;
    let g_inv = chol.inverse();
    Ok(MetricAtPoint { point: jet.point.clone(), norm_value: jet.norm_value(), g, g_inv })
}

fn cartan_from_jet(jet: &Jet, metric: &MetricAtPoint) -> CartanAtPoint {
    let n = jet.point.len();
    let t3 = jet.third();
    let f = metric.norm_value;
    let c_low = Tensor3::from_fn(n, |i, j, k| f / 4.0 * t3[(i, j, k)]);
    let c_mixed = Tensor3::from_fn(n, |i, j, k| {
        (0..n).map(|s| metric.g_inv[(i, s)] * c_low[(s, j, k)]).sum()
    });
    let a_mean = DVector::from_fn(n, |k, _| (0..n).map(|i| c_mixed[(i, i, k)]).sum());
    CartanAtPoint { c_low, c_mixed, a_mean }
}

fn christoffel_from_jet(jet: &Jet, metric: &MetricAtPoint) -> Tensor3 {
    let n = jet.point.len();
    let t3 = jet.third();
    // ∂_k g_ab = ½ ∂³F²/∂yᵃ∂yᵇ∂yᵏ; first kind Γ_s,jk from the usual
    // three-term combination (its terms coincide here because the third
    // derivative is totally symmetric, but the definition is kept literal).
    let gamma_low =
        Tensor3::from_fn(n, |s, j, k| 0.25 * (t3[(s, j, k)] + t3[(s, k, j)] - t3[(j, k, s)]));
    Tensor3::from_fn(n, |i, j, k| (0..n).map(|s| metric.g_inv[(i, s)] * gamma_low[(s, j, k)]).sum())
}

fn curvature_from_torsion(cartan: &CartanAtPoint, f: f64) -> CurvatureAtPoint {
    let n = cartan.a_mean.len();
    let c = &cartan.c_mixed;
    let f2 = f * f;
    let r = Tensor4::from_fn(n, |i, j, k, l| {
        let pos: f64 = (0..n).map(|s| c[(s, j, k)] * c[(i, s, l)]).sum();
        let neg: f64 = (0..n).map(|s| c[(s, j, l)] * c[(i, s, k)]).sum();
        (pos - neg) / f2
    });
    CurvatureAtPoint { r, route: CurvatureRoute::CartanFormula }
}

/// Metric at `y`: g, its inverse (positive-definite factorization — failure
/// means the spec is outside its strong-convexity regime), and F(y).
pub fn metric(spec: &NormSpec, y: &DVector<f64>) -> Result<MetricAtPoint> {
    metric_from_jet(&jet_of_f2(spec, y, 2)?)
}

/// Cartan torsion at `y` in lowered, mixed, and mean (trace) forms.
pub fn cartan(spec: &NormSpec, y: &DVector<f64>) -> Result<CartanAtPoint> {
    let jet = jet_of_f2(spec, y, 3)?;
    let metric = metric_from_jet(&jet)?;
    Ok(cartan_from_jet(&jet, &metric))
}

/// Mean Cartan torsion A_k = gⁱʲ C_ijk; degree-0 homogeneous in y. Deicke's
/// theorem: A ≡ 0 iff F comes from an inner product.
pub fn mean_cartan(spec: &NormSpec, y: &DVector<f64>) -> Result<DVector<f64>> {
    Ok(cartan(spec, y)?.a_mean)
}

/// Christoffel symbols γ̂ⁱ_jk of ĝ at `y`, layout `[(i, j, k)]`.
pub fn christoffel(spec: &NormSpec, y: &DVector<f64>) -> Result<Tensor3> {
    let jet = jet_of_f2(spec, y, 3)?;
    let metric = metric_from_jet(&jet)?;
    Ok(christoffel_from_jet(&jet, &metric))
}

/// Curvature by the torsion-product route:
/// R̂ⁱ_jkl = (Cˢ_jk Cⁱ_sl − Cˢ_jl Cⁱ_sk)/F². Needs only an order-3 jet.
pub fn curvature_cartan(spec: &NormSpec, y: &DVector<f64>) -> Result<CurvatureAtPoint> {
    let jet = jet_of_f2(spec, y, 3)?;
    let metric = metric_from_jet(&jet)?;
    let cartan = cartan_from_jet(&jet, &metric);
    Ok(curvature_from_torsion(&cartan, metric.norm_value))
}

/// Curvature by the connection route: ∂γ̂ terms from the order-4 jet plus the
/// γ̂γ̂ commutator, under the convention in the module docs. Independent of
/// [`curvature_cartan`] except for sharing the jet engine.
pub fn curvature_connection(spec: &NormSpec, y: &DVector<f64>) -> Result<CurvatureAtPoint> {
    let jet = jet_of_f2(spec, y, 4)?;
    let metric = metric_from_jet(&jet)?;
    let n = y.len();
    let t3 = jet.third();
    let t4 = jet.fourth();
    let g_inv = &metric.g_inv;

    // ∂_l g_ab and ∂_l ∂_k g_sj, straight from the jet.
    let dg = Tensor3::from_fn(n, |a, b, l| 0.5 * t3[(a, b, l)]);
    // ∂_l gⁱˢ = −gⁱᵃ (∂_l g_ab) g^bs.
    let dg_inv = Tensor3::from_fn(n, |i, s, l| {
        -(0..n)
            .map(|a| (0..n).map(|b| g_inv[(i, a)] * dg[(a, b, l)] * g_inv[(b, s)]).sum::<f64>())
            .sum::<f64>()
    });
    // First kind Γ_s,jk and its derivative ∂_l Γ_s,jk (three-term forms).
    let gamma_low =
        Tensor3::from_fn(n, |s, j, k| 0.5 * (dg[(s, j, k)] + dg[(s, k, j)] - dg[(j, k, s)]));
    let dgamma_low = Tensor4::from_fn(n, |s, j, k, l| {
        0.25 * (t4[(s, j, k, l)] + t4[(s, k, j, l)] - t4[(j, k, s, l)])
    });
    let gamma =
        Tensor3::from_fn(n, |i, j, k| (0..n).map(|s| g_inv[(i, s)] * gamma_low[(s, j, k)]).sum());
    // ∂_l γ̂ⁱ_jk = (∂_l gⁱˢ) Γ_s,jk + gⁱˢ ∂_l Γ_s,jk, layout [(i, j, k, l)].
    let dgamma = Tensor4::from_fn(n, |i, j, k, l| {
        (0..n)
            .map(|s| {
                dg_inv[(i, s, l)] * gamma_low[(s, j, k)] + g_inv[(i, s)] * dgamma_low[(s, j, k, l)]
            })
            .sum()
    });
    let r = Tensor4::from_fn(n, |i, j, k, l| {
        let quad: f64 = (0..n)
            .map(|m| gamma[(i, k, m)] * gamma[(m, l, j)] - gamma[(i, l, m)] * gamma[(m, k, j)])
            .sum();
        dgamma[(i, l, j, k)] - dgamma[(i, k, j, l)] + quad
    });
    Ok(CurvatureAtPoint { r, route: CurvatureRoute::ConnectionFormula })
}

/// Sectional curvature of the 2-plane span{U, V} at a precomputed point:
/// K̂ = ĝ(R̂(U,V)V, U) / (ĝ(U,U) ĝ(V,V) − ĝ(U,V)²).
pub fn sectional_at(geom: &PointGeometry, u: &DVector<f64>, v: &DVector<f64>) -> Result<f64> {
    let n = geom.dim();
    if u.len() != n || v.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "plane vectors have lengths {} and {} but dim = {n}",
            u.len(),
            v.len()
        )));
    }
    let m = &geom.metric;
    let guu = m.inner(u, u);
    let gvv = m.inner(v, v);
    let guv = m.inner(u, v);
    let gram = guu * gvv - guv * guv;
    if !(gram > PLANE_DEGENERACY_TOL * guu * gvv) {
        return Err(Error::DegeneratePlane(gram));
    }
    // (R̂(U,V)W)ⁱ = R̂ⁱ_jkl Wʲ Uᵏ Vˡ with W = V.
    let r = &geom.curvature.r;
    let w = DVector::from_fn(n, |i, _| {
        let mut acc = 0.0;
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    acc += r[(i, j, k, l)] * v[j] * u[k] * v[l];
                }
            }
        }
        acc
    });
    Ok(m.inner(&w, u) / gram)
}

/// Sectional curvature at `y` (computes the geometry bundle first).
pub fn sectional(
    spec: &NormSpec,
    y: &DVector<f64>,
    u: &DVector<f64>,
    v: &DVector<f64>,
) -> Result<f64> {
    sectional_at(&PointGeometry::at(spec, y)?, u, v)
}

/// Relative residual of the identity γ̂ⁱ_jk = Cⁱ_jk / F:
/// ‖γ̂ − C♯/F‖_∞ / (1 + ‖γ̂‖_∞).
pub fn torsion_scaling_residual(geom: &PointGeometry) -> f64 {
    let n = geom.dim();
    let f = geom.metric.norm_value;
    let mut sup = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let diff = geom.christoffel[(i, j, k)] - geom.cartan.c_mixed[(i, j, k)] / f;
                sup = sup.max(diff.abs());
            }
        }
    }
    sup / (1.0 + geom.christoffel.sup_norm())
}

/// Sup over (j,k,l) of the first-Bianchi cyclic sum |R̂ⁱ_jkl + R̂ⁱ_klj + R̂ⁱ_ljk|,
/// normalized by 1 + ‖R̂‖_∞.
pub fn bianchi_residual(curv: &CurvatureAtPoint) -> f64 {
    let n = curv.r.dim();
    let r = &curv.r;
    let mut sup = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let cyc = r[(i, j, k, l)] + r[(i, k, l, j)] + r[(i, l, j, k)];
                    sup = sup.max(cyc.abs());
                }
            }
        }
    }
    sup / (1.0 + r.sup_norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::Family;
    use approx::assert_relative_eq;
    use nalgebra::{dmatrix, dvector};

    fn spd3() -> DMatrix<f64> {
        dmatrix![2.0, 0.3, 0.1; 0.3, 1.5, -0.2; 0.1, -0.2, 1.0]
    }

    #[test]
    fn euclidean_metric_is_the_defining_matrix() {
        let a = spd3();
        let spec = NormSpec::euclidean(a.clone()).unwrap();
        let y = dvector![0.3, -1.1, 0.7];
        let m = metric(&spec, &y).unwrap();
        assert_relative_eq!(m.g, a, epsilon = 1e-14);
        assert_relative_eq!((&m.g * &m.g_inv), DMatrix::identity(3, 3), epsilon = 1e-12);
    }

    #[test]
    fn euclidean_torsion_connection_curvature_all_vanish() {
        let spec = NormSpec::euclidean(spd3()).unwrap();
        let y = dvector![1.2, 0.4, -0.9];
        let geom = PointGeometry::at(&spec, &y).unwrap();
        assert!(geom.cartan.c_low.sup_norm() < 1e-12);
        assert!(geom.christoffel.sup_norm() < 1e-12);
        assert!(geom.curvature.r.sup_norm() < 1e-12);
        assert!(curvature_connection(&spec, &y).unwrap().r.sup_norm() < 1e-10);
    }

    #[test]
    fn metric_is_scale_invariant() {
        let spec = NormSpec::quartic_reg(3, 0.2).unwrap();
        let y = dvector![0.7, -0.3, 1.1];
        let g1 = metric(&spec, &y).unwrap().g;
        let g2 = metric(&spec, &(&y * 2.0)).unwrap().g;
        assert_relative_eq!(g1, g2, epsilon = 1e-10);
    }

    #[test]
    fn routes_agree_on_a_nonflat_point() {
        let spec = NormSpec::quartic_reg(3, 0.2).unwrap();
        let y = dvector![0.7, -0.3, 1.1];
        let a = curvature_cartan(&spec, &y).unwrap();
        let b = curvature_connection(&spec, &y).unwrap();
        assert!(a.r.sup_norm() > 1e-4, "witness point should be non-flat");
        let gap = a.r.sup_distance(&b.r);
        assert!(gap < 1e-10 * (1.0 + a.r.sup_norm()), "route gap {gap}");
        assert_eq!(a.route.as_str(), "cartan_formula");
        assert_eq!(b.route.as_str(), "connection_formula");
    }

    #[test]
    fn sectional_rejects_degenerate_planes() {
        let spec = NormSpec::quartic_reg(3, 0.2).unwrap();
        let y = dvector![1.0, 1.0, 1.0];
        let u = dvector![1.0, 0.0, 0.0];
        let err = sectional(&spec, &y, &u, &(&u * 3.0));
        assert!(matches!(err, Err(Error::DegeneratePlane(_))));
    }

    #[test]
    fn sectional_is_plane_invariant() {
        let spec = NormSpec::quartic_reg(3, 0.2).unwrap();
        let geom = PointGeometry::at(&spec, &dvector![1.0, 1.0, 1.0]).unwrap();
        let u = dvector![1.0, 0.0, 0.0];
        let v = dvector![0.0, 1.0, 0.0];
        let k1 = sectional_at(&geom, &u, &v).unwrap();
        let k2 = sectional_at(&geom, &v, &u).unwrap();
        let k3 = sectional_at(&geom, &u, &(&u + &v)).unwrap();
        let k4 = sectional_at(&geom, &(&u * 2.0), &(&v - &u * 0.5)).unwrap();
        assert_relative_eq!(k1, k2, max_relative = 1e-9);
        assert_relative_eq!(k1, k3, max_relative = 1e-9);
        assert_relative_eq!(k1, k4, max_relative = 1e-9);
    }

    #[test]
    fn indefinite_metric_fails_factorization_loudly() {
        // drift 1.5 > 1: F is not a norm and g loses positive definiteness on
        // a cone of directions around −b.
        let spec = NormSpec::new_unchecked(
            2,
            Family::Randers { a: DMatrix::identity(2, 2), b: dvector![1.5, 0.0] },
        );
        let mut failures = 0;
        for t in 0..16 {
            let theta = std::f64::consts::TAU * t as f64 / 16.0;
            let y = dvector![theta.cos(), theta.sin()];
            if let Err(Error::NotPositiveDefinite) = metric(&spec, &y) {
                failures += 1;
            }
        }
        assert!(failures > 0, "expected factorization failures somewhere on the circle");
    }
}
