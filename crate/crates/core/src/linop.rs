//! Linear operators acting on grid sample vectors.
//!
//! Operators act on raw coordinate vectors. `apply_adjoint` is the
//! conjugate transpose with respect to the plain Euclidean pairing, not the
//! grid-weighted one; norm estimation only needs this form.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{LabError, Result};
use crate::par;
use crate::rng::{stream_rng, streams};

pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[Complex64]) -> Vec<Complex64>;
    fn apply_adjoint(&self, y: &[Complex64]) -> Vec<Complex64>;
}

impl<T: LinearOperator + ?Sized> LinearOperator for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        (**self).apply(x)
    }
    fn apply_adjoint(&self, y: &[Complex64]) -> Vec<Complex64> {
        (**self).apply_adjoint(y)
    }
}

impl<T: LinearOperator + ?Sized + Send> LinearOperator for Box<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        (**self).apply(x)
    }
    fn apply_adjoint(&self, y: &[Complex64]) -> Vec<Complex64> {
        (**self).apply_adjoint(y)
    }
}

/// Square complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        DenseMatrix {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn diagonal(d: &[Complex64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &v) in d.iter().enumerate() {
            m.data[i * d.len() + i] = v;
        }
        m
    }

    pub fn from_rows(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(LabError::Config(format!(
                "matrix data has {} entries, expected {}",
                data.len(),
                n * n
            )));
        }
        Ok(DenseMatrix { n, data })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        DenseMatrix { n, data }
    }

    /// Assembles the matrix of `op` column by column.
    pub fn from_operator(op: &dyn LinearOperator) -> Self {
        let n = op.dim();
        let cols = par::map_indexed(n, |j| {
            let mut e = vec![Complex64::new(0.0, 0.0); n];
            e[j] = Complex64::new(1.0, 0.0);
            op.apply(&e)
        });
        Self::from_fn(n, |i, j| cols[j][i])
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }

    pub fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.n, self.n, &self.data)
    }

    /// All singular values, descending.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self.to_nalgebra().singular_values().iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }
}

impl LinearOperator for DenseMatrix {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.data
            .chunks_exact(self.n)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    fn apply_adjoint(&self, y: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.n];
        for (row, &yi) in self.data.chunks_exact(self.n).zip(y) {
            for (o, a) in out.iter_mut().zip(row) {
                *o += a.conj() * yi;
            }
        }
        out
    }
}

/// Pointwise multiplication `aI`.
#[derive(Debug, Clone)]
pub struct Multiplication {
    pub values: Vec<Complex64>,
}

impl LinearOperator for Multiplication {
    fn dim(&self) -> usize {
        self.values.len()
    }
    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.values.iter().zip(x).map(|(a, b)| a * b).collect()
    }
    fn apply_adjoint(&self, y: &[Complex64]) -> Vec<Complex64> {
        self.values.iter().zip(y).map(|(a, b)| a.conj() * b).collect()
    }
}

/// `A - B`.
pub struct Difference<A, B>(pub A, pub B);

impl<A: LinearOperator, B: LinearOperator> LinearOperator for Difference<A, B> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut a = self.0.apply(x);
        for (u, v) in a.iter_mut().zip(self.1.apply(x)) {
            *u -= v;
        }
        a
    }
    fn apply_adjoint(&self, y: &[Complex64]) -> Vec<Complex64> {
        let mut a = self.0.apply_adjoint(y);
        for (u, v) in a.iter_mut().zip(self.1.apply_adjoint(y)) {
            *u -= v;
        }
        a
    }
}

/// `A ∘ B`, applying `B` first.
pub struct Composition<A, B>(pub A, pub B);

impl<A: LinearOperator, B: LinearOperator> LinearOperator for Composition<A, B> {
    fn dim(&self) -> usize {
        self.1.dim()
    }
    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.0.apply(&self.1.apply(x))
    }
    fn apply_adjoint(&self, y: &[Complex64]) -> Vec<Complex64> {
        self.1.apply_adjoint(&self.0.apply_adjoint(y))
    }
}

/// Operator given by a pair of closures.
pub struct FnOperator<F, G> {
    pub n: usize,
    pub forward: F,
    pub adjoint: G,
}

impl<F, G> LinearOperator for FnOperator<F, G>
where
    F: Fn(&[Complex64]) -> Vec<Complex64> + Sync,
    G: Fn(&[Complex64]) -> Vec<Complex64> + Sync,
{
    fn dim(&self) -> usize {
        self.n
    }
    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        (self.forward)(x)
    }
    fn apply_adjoint(&self, y: &[Complex64]) -> Vec<Complex64> {
        (self.adjoint)(y)
    }
}

/// Leading `count` singular values (Euclidean) by randomized subspace iteration.
pub fn leading_singular_values(
    op: &dyn LinearOperator,
    count: usize,
    power_steps: usize,
    seed: u64,
) -> Vec<f64> {
    let n = op.dim();
    let k = (count + 8).min(n);
    let mut rng = stream_rng(seed, streams::SUBSPACE, 0);
    let mut q = DMatrix::<Complex64>::from_fn(n, k, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let apply_cols = |m: &DMatrix<Complex64>, adjoint: bool| -> DMatrix<Complex64> {
        let cols = par::map_indexed(m.ncols(), |j| {
            let col: Vec<Complex64> = m.column(j).iter().copied().collect();
            if adjoint {
                op.apply_adjoint(&col)
            } else {
                op.apply(&col)
            }
        });
        DMatrix::from_fn(n, m.ncols(), |i, j| cols[j][i])
    };
    q = apply_cols(&q, false).qr().q();
    for _ in 0..power_steps {
        let z = apply_cols(&q, true).qr().q();
        q = apply_cols(&z, false).qr().q();
    }
    // B = Q* A, so B* = A* Q and σ(B) approximates the top of σ(A).
    let bt = apply_cols(&q, true);
    let mut s: Vec<f64> = bt.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s.truncate(count.min(n));
    s
}
