//! One-particle distributional kernels `K(p, k) = A(p)·δ(p − k) + B(p)·δ(p + k)`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::tensor::AuxMatrix;

type KernelFn = dyn Fn(f64) -> Result<AuxMatrix> + Send + Sync;

#[derive(Clone)]
pub struct OneParticleKernel {
    dim: usize,
    a: Arc<KernelFn>,
    b: Arc<KernelFn>,
}

impl fmt::Debug for OneParticleKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OneParticleKernel").field("dim", &self.dim).finish_non_exhaustive()
    }
}

impl OneParticleKernel {
    pub fn new(
        dim: usize,
        a: impl Fn(f64) -> Result<AuxMatrix> + Send + Sync + 'static,
        b: impl Fn(f64) -> Result<AuxMatrix> + Send + Sync + 'static,
    ) -> Self {
        Self { dim, a: Arc::new(a), b: Arc::new(b) }
    }

    /// `δ(p − k)·I`.
    pub fn identity(dim: usize) -> Self {
        Self::new(dim, move |_| Ok(AuxMatrix::identity(dim)), move |_| Ok(AuxMatrix::zeros(dim)))
    }

    pub fn zero(dim: usize) -> Self {
        Self::new(dim, move |_| Ok(AuxMatrix::zeros(dim)), move |_| Ok(AuxMatrix::zeros(dim)))
    }

    /// `δ(p + k)·I`.
    pub fn flip(dim: usize) -> Self {
        Self::new(dim, move |_| Ok(AuxMatrix::zeros(dim)), move |_| Ok(AuxMatrix::identity(dim)))
    }

    /// `p^n·δ(p − k)·I`.
    pub fn moment(dim: usize, n: u32) -> Self {
        Self::new(
            dim,
            move |p| Ok(AuxMatrix::scalar(dim, C64::new(p.powi(n as i32), 0.0))),
            move |_| Ok(AuxMatrix::zeros(dim)),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Coefficient of `δ(p − k)`.
    pub fn a(&self, p: f64) -> Result<AuxMatrix> {
        let m = (self.a)(p)?;
        self.check(&m)?;
        Ok(m)
    }

    /// Coefficient of `δ(p + k)`.
    pub fn b(&self, p: f64) -> Result<AuxMatrix> {
        let m = (self.b)(p)?;
        self.check(&m)?;
        Ok(m)
    }

    fn check(&self, m: &AuxMatrix) -> Result<()> {
        if m.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: m.dim() });
        }
        Ok(())
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        Ok(())
    }

    /// `(K1∘K2)(p, k) = ∫ dq K1(p, q) K2(q, k)`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        let (k1a, k1b, k2a, k2b) = (self.clone(), self.clone(), other.clone(), other.clone());
        Ok(Self::new(
            self.dim,
            move |p| Ok(&(&k1a.a(p)? * &k2a.a(p)?) + &(&k1a.b(p)? * &k2a.b(-p)?)),
            move |p| Ok(&(&k1b.a(p)? * &k2b.b(p)?) + &(&k1b.b(p)? * &k2b.a(-p)?)),
        ))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, C64::new(1.0, 0.0))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, C64::new(-1.0, 0.0))
    }

    fn combine(&self, other: &Self, w: C64) -> Result<Self> {
        self.same_dim(other)?;
        let (x, y, u, v) = (self.clone(), other.clone(), self.clone(), other.clone());
        Ok(Self::new(self.dim, move |p| Ok(&x.a(p)? + &y.a(p)?.scale(w)), move |p| Ok(&u.b(p)? + &v.b(p)?.scale(w))))
    }

    pub fn scale(&self, z: C64) -> Self {
        let (x, y) = (self.clone(), self.clone());
        Self::new(self.dim, move |p| Ok(x.a(p)?.scale(z)), move |p| Ok(y.b(p)?.scale(z)))
    }

    /// `‖ΔA(p)‖∞ + ‖ΔB(p)‖∞`.
    pub fn distance(&self, other: &Self, p: f64) -> Result<f64> {
        self.same_dim(other)?;
        Ok((&self.a(p)? - &other.a(p)?).norm_inf() + (&self.b(p)? - &other.b(p)?).norm_inf())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// Bounded smooth kernel with coefficients built from trigonometric seeds.
    fn smooth_kernel(dim: usize, seed: [f64; 4]) -> OneParticleKernel {
        let entry = move |p: f64, r: usize, col: usize, phase: f64, amp: f64| {
            let x = phase + p * (1.0 + r as f64) - 0.7 * col as f64;
            c(amp * x.sin(), amp * (0.5 * x).cos())
        };
        OneParticleKernel::new(
            dim,
            move |p| Ok(AuxMatrix::from_fn(dim, |r, col| entry(p, r, col, seed[0], seed[1]))),
            move |p| Ok(AuxMatrix::from_fn(dim, |r, col| entry(p, r, col, seed[2], seed[3]))),
        )
    }

    /// Dense matrix of a kernel on the symmetric grid `{±q}` ⊗ components, δ as Kronecker delta.
    fn grid_matrix(k: &OneParticleKernel, grid: &[f64]) -> AuxMatrix {
        let d = k.dim();
        let m = grid.len();
        let mut entries = vec![c(0.0, 0.0); (m * d) * (m * d)];
        for (pi, &p) in grid.iter().enumerate() {
            let a = k.a(p).unwrap();
            let b = k.b(p).unwrap();
            for (ki, &q) in grid.iter().enumerate() {
                for r in 0..d {
                    for col in 0..d {
                        let mut v = c(0.0, 0.0);
                        if p == q {
                            v += a.get(r, col);
                        }
                        if p == -q {
                            v += b.get(r, col);
                        }
                        entries[(pi * d + r) * (m * d) + ki * d + col] = v;
                    }
                }
            }
        }
        AuxMatrix::from_row_slice(m * d, &entries).unwrap()
    }

    const GRID: [f64; 6] = [-2.5, -1.0, -0.3, 0.3, 1.0, 2.5];

    #[test]
    fn compose_matches_grid_matrix_product() {
        let k1 = smooth_kernel(2, [0.1, 1.0, -0.4, 0.6]);
        let k2 = smooth_kernel(2, [1.3, 0.8, 0.2, -1.1]);
        let lhs = grid_matrix(&k1.compose(&k2).unwrap(), &GRID);
        let rhs = &grid_matrix(&k1, &GRID) * &grid_matrix(&k2, &GRID);
        assert!((&lhs - &rhs).norm_inf() < 1e-14);
    }

    #[test]
    fn identity_and_double_flip() {
        let k = smooth_kernel(2, [0.5, 1.0, 0.3, 0.9]);
        let id = OneParticleKernel::identity(2);
        for p in [-1.2, 0.4, 3.0] {
            assert_eq!(id.compose(&k).unwrap().distance(&k, p).unwrap(), 0.0);
            assert_eq!(k.compose(&id).unwrap().distance(&k, p).unwrap(), 0.0);
            let ff = OneParticleKernel::flip(3).compose(&OneParticleKernel::flip(3)).unwrap();
            assert_eq!(ff.distance(&OneParticleKernel::identity(3), p).unwrap(), 0.0);
        }
    }

    #[test]
    fn add_sub_scale() {
        let k = smooth_kernel(1, [0.5, 1.0, 0.3, 0.9]);
        let two = k.add(&k).unwrap();
        assert!(two.distance(&k.scale(c(2.0, 0.0)), 0.7).unwrap() < 1e-15);
        assert_eq!(k.sub(&k).unwrap().distance(&OneParticleKernel::zero(1), 0.7).unwrap(), 0.0);
        assert!(k.compose(&OneParticleKernel::identity(2)).is_err());
    }

    #[test]
    fn moment_kernel() {
        let m = OneParticleKernel::moment(2, 3);
        assert_eq!(m.a(2.0).unwrap(), AuxMatrix::scalar(2, c(8.0, 0.0)));
        assert_eq!(m.b(2.0).unwrap(), AuxMatrix::zeros(2));
    }

    proptest! {
        #[test]
        fn composition_is_associative(
            s1 in prop::array::uniform4(-2.0..2.0f64),
            s2 in prop::array::uniform4(-2.0..2.0f64),
            s3 in prop::array::uniform4(-2.0..2.0f64),
            p in -3.0..3.0f64,
        ) {
            let (a, b, cc) = (smooth_kernel(2, s1), smooth_kernel(2, s2), smooth_kernel(2, s3));
            let left = a.compose(&b).unwrap().compose(&cc).unwrap();
            let right = a.compose(&b.compose(&cc).unwrap()).unwrap();
            prop_assert!(left.distance(&right, p).unwrap() < 1e-12);
        }
    }
}
