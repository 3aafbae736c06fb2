//! Exact partial derivatives of F² up to order four.
//!
//! Every norm family in the catalog is a composition of polynomials and a
//! single square root, so instead of differentiating numerically we propagate
//! truncated Taylor expansions (order ≤ 4) through the family's expression.
//! A [`TaylorPoly`] stores the coefficients of F²(y + δ) in the offset δ over
//! all multi-indices of total degree ≤ k; partial derivatives are then read
//! off as `coefficient × multi-index factorial`. The result is exact up to
//! floating-point rounding — no truncation error at any order.
//!
//! [`fd_cross_check`] provides the independent numerical route: nested central
//! differences of `evaluate(spec, ·)²` with one Richardson level, used to
//! guard the algebra above against wrong closed forms.

use std::collections::HashMap;
use std::ops::{Add, Mul, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, DVector};

use crate::dense::{Tensor3, Tensor4};
use crate::error::{Error, Result};
use crate::norms::{evaluate, Family, NormSpec};

/// Shared combinatorial data for truncated Taylor arithmetic in `n` variables
/// up to total degree `order`: the multi-index basis, a multiplication table,
/// and per-index factorials. Built once per (n, order) and cached globally.
#[derive(Debug)]
struct JetSpace {
    n: usize,
    order: usize,
    /// Multi-indices in graded lexicographic order; `basis[0]` is the constant.
    basis: Vec<Vec<u8>>,
    /// Position of each multi-index in `basis`.
    pos: HashMap<Vec<u8>, usize>,
    /// `prod[a * len + b]` = position of `basis[a] + basis[b]`, or `u32::MAX`
    /// when the product degree exceeds `order`.
    prod: Vec<u32>,
    /// Multi-index factorial of each basis element.
    factorial: Vec<f64>,
}

impl JetSpace {
    fn new(n: usize, order: usize) -> Self {
        let mut basis: Vec<Vec<u8>> = Vec::new();
        let mut stack = vec![0u8; n];
        for deg in 0..=order {
            enumerate(&mut basis, &mut stack, 0, deg as u8);
        }
        let pos: HashMap<Vec<u8>, usize> =
            basis.iter().enumerate().map(|(i, b)| (b.clone(), i)).collect();
        let len = basis.len();
        let mut prod = vec![u32::MAX; len * len];
        for a in 0..len {
            for b in 0..len {
                let deg: u8 = basis[a].iter().sum::<u8>() + basis[b].iter().sum::<u8>();
                if deg as usize <= order {
                    let sum: Vec<u8> = basis[a].iter().zip(&basis[b]).map(|(x, y)| x + y).collect();
                    prod[a * len + b] = pos[&sum] as u32;
                }
            }
        }
        let factorial =
            basis.iter().map(|alpha| alpha.iter().map(|&m| fact(m)).product()).collect();
        JetSpace { n, order, basis, pos, prod, factorial }
    }

    fn cached(n: usize, order: usize) -> Arc<JetSpace> {
        type Cache = Mutex<HashMap<(usize, usize), Arc<JetSpace>>>;
        static SPACES: OnceLock<Cache> = OnceLock::new();
        let mut map = SPACES.get_or_init(|| Mutex::new(HashMap::new())).lock().unwrap();
        map.entry((n, order)).or_insert_with(|| Arc::new(JetSpace::new(n, order))).clone()
    }

    fn len(&self) -> usize {
        self.basis.len()
    }

    /// Position of the multi-index formed by the (unordered) variable tuple.
    fn pos_of(&self, vars: &[usize]) -> usize {
        let mut alpha = vec![0u8; self.n];
        for &v in vars {
            alpha[v] += 1;
        }
        self.pos[&alpha]
    }
}

/// Fills `out` with all multi-indices of exact degree `remaining` starting at
/// variable slot `at`, in lexicographic order.
fn enumerate(out: &mut Vec<Vec<u8>>, stack: &mut Vec<u8>, at: usize, remaining: u8) {
    if at == stack.len() - 1 {
        stack[at] = remaining;
        out.push(stack.clone());
        stack[at] = 0;
        return;
    }
    for take in (0..=remaining).rev() {
        stack[at] = take;
        enumerate(out, stack, at + 1, remaining - take);
        stack[at] = 0;
    }
}

fn fact(m: u8) -> f64 {
    (1..=m as u64).product::<u64>() as f64
}

/// Truncated multivariate Taylor expansion around a point. Coefficient `c[α]`
/// is ∂^α f / α! evaluated at the expansion point.
#[derive(Clone)]
struct TaylorPoly {
    space: Arc<JetSpace>,
    c: Vec<f64>,
}

impl TaylorPoly {
    fn constant(space: &Arc<JetSpace>, v: f64) -> Self {
        let mut c = vec![0.0; space.len()];
        c[0] = v;
        TaylorPoly { space: space.clone(), c }
    }

    /// Affine expression `value + Σ grad_i δ_i`.
    fn affine(space: &Arc<JetSpace>, value: f64, grad: &[f64]) -> Self {
        let mut p = TaylorPoly::constant(space, value);
        for (i, &gi) in grad.iter().enumerate() {
            p.c[space.pos_of(&[i])] = gi;
        }
        p
    }

    fn scale(mut self, s: f64) -> Self {
        for v in &mut self.c {
            *v *= s;
        }
        self
    }

    /// Truncated square root. Requires a positive constant term: writes
    /// f = c₀(1 + u) and composes the binomial series for √(1+u) through
    /// order 4 (exact for the truncation order, since u has no constant term).
    fn sqrt(&self) -> Result<TaylorPoly> {
        let c0 = self.c[0];
        if !(c0 > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "square root of non-positive value {c0:.3e} in norm evaluation"
            )));
        }
        let mut u = self.clone().scale(1.0 / c0);
        u.c[0] = 0.0;
        // binomial(1/2, k) for k = 0..4
        const B: [f64; 5] = [1.0, 0.5, -0.125, 0.0625, -0.0390625];
        let mut acc = TaylorPoly::constant(&self.space, B[0]);
        let mut upow = TaylorPoly::constant(&self.space, 1.0);
        for bk in B.iter().take(self.space.order + 1).skip(1) {
            upow = &upow * &u;
            for (a, p) in acc.c.iter_mut().zip(&upow.c) {
                *a += bk * p;
            }
        }
        Ok(acc.scale(c0.sqrt()))
    }
}

impl Add for &TaylorPoly {
    type Output = TaylorPoly;
    fn add(self, rhs: &TaylorPoly) -> TaylorPoly {
        let c = self.c.iter().zip(&rhs.c).map(|(a, b)| a + b).collect();
        TaylorPoly { space: self.space.clone(), c }
    }
}

impl Sub for &TaylorPoly {
    type Output = TaylorPoly;
    fn sub(self, rhs: &TaylorPoly) -> TaylorPoly {
        let c = self.c.iter().zip(&rhs.c).map(|(a, b)| a - b).collect();
        TaylorPoly { space: self.space.clone(), c }
    }
}

impl Mul for &TaylorPoly {
    type Output = TaylorPoly;
    fn mul(self, rhs: &TaylorPoly) -> TaylorPoly {
        let len = self.space.len();
        let mut c = vec![0.0; len];
        for a in 0..len {
            let ca = self.c[a];
            if ca == 0.0 {
                continue;
            }
            let row = &self.space.prod[a * len..(a + 1) * len];
            for (&target, &cb) in row.iter().zip(&rhs.c) {
                if target != u32::MAX {
                    c[target as usize] += ca * cb;
                }
            }
        }
        TaylorPoly { space: self.space.clone(), c }
    }
}

/// Dense symmetric partial derivatives of F² at a point, through `order`.
#[derive(Debug, Clone)]
pub struct Jet {
    pub order: usize,
    pub point: DVector<f64>,
    /// F²(y).
    pub value: f64,
    /// ∂F²/∂yⁱ.
    pub grad: DVector<f64>,
    /// ∂²F²/∂yⁱ∂yʲ.
    pub hess: DMatrix<f64>,
    /// ∂³F², present for order ≥ 3.
    pub third: Option<Tensor3>,
    /// ∂⁴F², present for order = 4.
    pub fourth: Option<Tensor4>,
}

impl Jet {
    /// The norm value F(y) = √(F²).
    pub fn norm_value(&self) -> f64 {
        self.value.sqrt()
    }

    pub fn third(&self) -> &Tensor3 {
        self.third.as_ref().expect("jet order < 3")
    }

    pub fn fourth(&self) -> &Tensor4 {
        self.fourth.as_ref().expect("jet order < 4")
    }
}

/// Computes the jet of F² at `y` by Taylor propagation through the family's
/// closed-form expression. Supported orders: 2, 3, 4.
pub fn jet_of_f2(spec: &NormSpec, y: &DVector<f64>, order: usize) -> Result<Jet> {
    if !(2..=4).contains(&order) {
        return Err(Error::UnsupportedOrder(order));
    }
    spec.check_point(y)?;
    let n = spec.dim();
    let space = JetSpace::cached(n, order);

    // coordinate expansions Y_i = y_i + δ_i
    let coord = |i: usize| {
        let mut g = vec![0.0; n];
        g[i] = 1.0;
        TaylorPoly::affine(&space, y[i], &g)
    };

    let f2 = match spec.family() {
        Family::Euclidean { a } => {
            // F² = yᵀA y  =  Σ_i Y_i (A Y)_i
            quadratic_form(&space, a, y, &coord)
        }
        Family::Randers { a, b } => {
            // F² = q + β² + 2βα  with q = yᵀA y, β = b·y, α = √q
            let q = quadratic_form(&space, a, y, &coord);
            let alpha = q.sqrt()?;
            let beta = TaylorPoly::affine(&space, b.dot(y), b.as_slice());
            let beta_sq = &beta * &beta;
            let cross = (&beta * &alpha).scale(2.0);
            &(&q + &beta_sq) + &cross
        }
        Family::QuarticReg { eps } => {
            // F² = √((Σ Y_i²)² + ε Σ Y_i⁴)
            let mut s = TaylorPoly::constant(&space, 0.0);
            let mut p = TaylorPoly::constant(&space, 0.0);
            for i in 0..n {
                let yi = coord(i);
                let sq = &yi * &yi;
                p = &p + &(&sq * &sq);
                s = &s + &sq;
            }
            let q = &(&s * &s) + &p.scale(*eps);
            q.sqrt()?
        }
    };

    extract_jet(&space, &f2, y, order)
}

fn quadratic_form(
    space: &Arc<JetSpace>,
    a: &DMatrix<f64>,
    y: &DVector<f64>,
    coord: &impl Fn(usize) -> TaylorPoly,
) -> TaylorPoly {
    let n = y.len();
    let ay = a * y;
    let mut q = TaylorPoly::constant(space, 0.0);
    for i in 0..n {
        // (A Y)_i as an affine expression
        let row: Vec<f64> = (0..n).map(|j| a[(i, j)]).collect();
        let wi = TaylorPoly::affine(space, ay[i], &row);
        q = &q + &(&coord(i) * &wi);
    }
    q
}

fn extract_jet(
    space: &Arc<JetSpace>,
    f2: &TaylorPoly,
    y: &DVector<f64>,
    order: usize,
) -> Result<Jet> {
    let n = space.n;
    let deriv = |vars: &[usize]| {
        let p = space.pos_of(vars);
        f2.c[p] * space.factorial[p]
    };
    let grad = DVector::from_fn(n, |i, _| deriv(&[i]));
    let hess = DMatrix::from_fn(n, n, |i, j| deriv(&[i, j]));
    let third = (order >= 3).then(|| Tensor3::from_fn(n, |i, j, k| deriv(&[i, j, k])));
    let fourth = (order >= 4).then(|| Tensor4::from_fn(n, |i, j, k, l| deriv(&[i, j, k, l])));
    Ok(Jet { order, point: y.clone(), value: f2.c[0], grad, hess, third, fourth })
}

/// Maximum relative discrepancy between the jet partials of F² and nested
/// central finite differences of `evaluate(spec, ·)²`, over all derivative
/// orders 1..=`order`. Each order k is normalized by (1 + sup‖∂ᵏF²‖) and uses
/// its own step `h_k · max(1, |y|)` with one Richardson level; the steps are
/// tuned so rounding and truncation balance in f64 at every order.
pub fn fd_cross_check(spec: &NormSpec, y: &DVector<f64>, order: usize) -> Result<f64> {
    if !(2..=4).contains(&order) {
        return Err(Error::UnsupportedOrder(order));
    }
    let jet = jet_of_f2(spec, y, order)?;
    let n = spec.dim();
    let f = |p: &DVector<f64>| -> Result<f64> { Ok(evaluate(spec, p)?.powi(2)) };

    const STEP: [f64; 4] = [5e-3, 5e-3, 5e-3, 1e-2];
    let scale = y.norm().max(1.0);

    let mut worst: f64 = 0.0;
    for k in 1..=order {
        let h = STEP[k - 1] * scale;
        let jet_sup = jet_order_sup(&jet, k);
        let mut disc: f64 = 0.0;
        for vars in sorted_tuples(n, k) {
            let coarse = fd_partial(&f, y, &vars, h)?;
            let fine = fd_partial(&f, y, &vars, h / 2.0)?;
            let richardson = (4.0 * fine - coarse) / 3.0;
            disc = disc.max((richardson - jet_entry(&jet, &vars)).abs());
        }
        worst = worst.max(disc / (1.0 + jet_sup));
    }
    Ok(worst)
}

/// Nested central difference: ∂_{vars} f by recursing one index at a time,
/// all levels sharing the same step.
fn fd_partial(
    f: &impl Fn(&DVector<f64>) -> Result<f64>,
    y: &DVector<f64>,
    vars: &[usize],
    h: f64,
) -> Result<f64> {
    match vars.split_last() {
        None => f(y),
        Some((&i, rest)) => {
            let mut yp = y.clone();
            let mut ym = y.clone();
            yp[i] += h;
            ym[i] -= h;
            Ok((fd_partial(f, &yp, rest, h)? - fd_partial(f, &ym, rest, h)?) / (2.0 * h))
        }
    }
}

fn sorted_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(out: &mut Vec<Vec<usize>>, cur: &mut Vec<usize>, from: usize, n: usize, left: usize) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for v in from..n {
            cur.push(v);
            rec(out, cur, v, n, left - 1);
            cur.pop();
        }
    }
    rec(&mut out, &mut cur, 0, n, k);
    out
}

fn jet_entry(jet: &Jet, vars: &[usize]) -> f64 {
    match *vars {
        [i] => jet.grad[i],
        [i, j] => jet.hess[(i, j)],
        [i, j, k] => jet.third()[(i, j, k)],
        [i, j, k, l] => jet.fourth()[(i, j, k, l)],
        _ => unreachable!("derivative order outside 1..=4"),
    }
}

fn jet_order_sup(jet: &Jet, k: usize) -> f64 {
    match k {
        1 => jet.grad.amax(),
        2 => jet.hess.amax(),
        3 => jet.third().sup_norm(),
        4 => jet.fourth().sup_norm(),
        _ => unreachable!(),
    }
}
