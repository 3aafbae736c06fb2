//! Small dense tensors of rank 3 and 4 with full index storage.
//!
//! The dimensions involved are tiny (n = 2..4 in practice), so we store every
//! entry in a flat `Vec<f64>` and index arithmetically. Symmetric tensors are
//! stored densely too; symmetry is a property of the values, which keeps all
//! contraction code free of special cases.

use std::ops::{Index, IndexMut};

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    n: usize,
    data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(n: usize) -> Self {
        Tensor3 { n, data: vec![0.0; n * n * n] }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut t = Tensor3::zeros(n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    t[(i, j, k)] = f(i, j, k);
                }
            }
        }
        t
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Largest entry in absolute value.
    pub fn sup_norm(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl Index<(usize, usize, usize)> for Tensor3 {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j, k): (usize, usize, usize)) -> &f64 {
        &self.data[(i * self.n + j) * self.n + k]
    }
}

impl IndexMut<(usize, usize, usize)> for Tensor3 {
    #[inline]
    fn index_mut(&mut self, (i, j, k): (usize, usize, usize)) -> &mut f64 {
        &mut self.data[(i * self.n + j) * self.n + k]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor4 {
    n: usize,
    data: Vec<f64>,
}

impl Tensor4 {
    pub fn zeros(n: usize) -> Self {
        Tensor4 { n, data: vec![0.0; n * n * n * n] }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize, usize) -> f64) -> Self {
        let mut t = Tensor4::zeros(n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        t[(i, j, k, l)] = f(i, j, k, l);
                    }
                }
            }
        }
        t
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn sup_norm(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Entrywise difference sup norm against another tensor of the same size.
    pub fn sup_distance(&self, other: &Tensor4) -> f64 {
        assert_eq!(self.n, other.n, "tensor dimensions differ");
        self.data.iter().zip(&other.data).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

impl Index<(usize, usize, usize, usize)> for Tensor4 {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j, k, l): (usize, usize, usize, usize)) -> &f64 {
        &self.data[((i * self.n + j) * self.n + k) * self.n + l]
    }
}

impl IndexMut<(usize, usize, usize, usize)> for Tensor4 {
    #[inline]
    fn index_mut(&mut self, (i, j, k, l): (usize, usize, usize, usize)) -> &mut f64 {
        &mut self.data[((i * self.n + j) * self.n + k) * self.n + l]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexing_round_trips() {
        let mut t = Tensor3::zeros(3);
        t[(2, 1, 0)] = 5.0;
        assert_eq!(t[(2, 1, 0)], 5.0);
        assert_eq!(t[(0, 1, 2)], 0.0);
        assert_eq!(t.sup_norm(), 5.0);

        let mut q = Tensor4::zeros(2);
        q[(1, 0, 1, 1)] = -3.0;
        assert_eq!(q[(1, 0, 1, 1)], -3.0);
        assert_eq!(q.sup_norm(), 3.0);
    }

    #[test]
    fn sup_distance_is_entrywise() {
        let a = Tensor4::from_fn(2, |i, j, k, l| (i + j + k + l) as f64);
        let mut b = a.clone();
        b[(1, 1, 1, 1)] += 0.25;
        assert_eq!(a.sup_distance(&b), 0.25);
    }
}
