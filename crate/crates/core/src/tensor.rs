//! Dense complex linear algebra on C^d, C^d⊗C^d and C^d⊗C^d⊗C^d.
//!
//! Multi-leg indices are flattened row-major with leg 1 slowest:
//! `(i1, i2) ↦ i1·d + i2` and `(i1, i2, i3) ↦ (i1·d + i2)·d + i3`.
//! Every module in the crate relies on this single convention.

use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<C64>;

fn check_finite(m: &CMat) -> Result<()> {
    for c in 0..m.ncols() {
        for r in 0..m.nrows() {
            let z = m[(r, c)];
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::NonFinite { row: r, col: c });
            }
        }
    }
    Ok(())
}

/// Largest entry modulus; NaN entries propagate instead of being skipped by `f64::max`.
fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| {
        let x = z.norm();
        if x.is_nan() || acc.is_nan() {
            f64::NAN
        } else {
            acc.max(x)
        }
    })
}

macro_rules! dense_operator {
    ($name:ident, $legs:expr) => {
        impl $name {
            /// Number of tensor legs.
            pub const LEGS: u32 = $legs;

            /// Wraps a square matrix whose side is `leg_dim^LEGS`.
            pub fn from_matrix(leg_dim: usize, m: CMat) -> Result<Self> {
                let side = leg_dim.pow(Self::LEGS);
                if leg_dim == 0 {
                    return Err(Error::InvalidParameter("leg dimension must be positive".into()));
                }
                if m.nrows() != side || m.ncols() != side {
                    return Err(Error::DimensionMismatch { expected: side, found: m.nrows().max(m.ncols()) });
                }
                check_finite(&m)?;
                Ok(Self { leg_dim, m })
            }

            /// Builds the operator from row-major entries.
            pub fn from_row_slice(leg_dim: usize, entries: &[C64]) -> Result<Self> {
                let side = leg_dim.pow(Self::LEGS);
                if entries.len() != side * side {
                    return Err(Error::DimensionMismatch { expected: side * side, found: entries.len() });
                }
                Self::from_matrix(leg_dim, CMat::from_row_slice(side, side, entries))
            }

            pub fn from_fn(leg_dim: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
                let side = leg_dim.pow(Self::LEGS);
                Self { leg_dim, m: CMat::from_fn(side, side, f) }
            }

            pub fn identity(leg_dim: usize) -> Self {
                let side = leg_dim.pow(Self::LEGS);
                Self { leg_dim, m: CMat::identity(side, side) }
            }

            pub fn zeros(leg_dim: usize) -> Self {
                let side = leg_dim.pow(Self::LEGS);
                Self { leg_dim, m: CMat::zeros(side, side) }
            }

            pub fn leg_dim(&self) -> usize {
                self.leg_dim
            }

            /// Side length of the underlying square matrix.
            pub fn side(&self) -> usize {
                self.m.nrows()
            }

            pub fn matrix(&self) -> &CMat {
                &self.m
            }

            pub fn get(&self, row: usize, col: usize) -> C64 {
                self.m[(row, col)]
            }

            /// Largest absolute entry.
            pub fn norm_inf(&self) -> f64 {
                max_abs(&self.m)
            }

            /// Conjugate transpose.
            pub fn dagger(&self) -> Self {
                Self { leg_dim: self.leg_dim, m: self.m.adjoint() }
            }

            pub fn scale(&self, z: C64) -> Self {
                Self { leg_dim: self.leg_dim, m: &self.m * z }
            }

            pub fn is_finite(&self) -> bool {
                check_finite(&self.m).is_ok()
            }

            fn assert_compatible(&self, other: &Self) {
                assert_eq!(self.leg_dim, other.leg_dim, concat!(stringify!($name), " leg dimensions differ"));
            }
        }

        impl Mul for &$name {
            type Output = $name;
            fn mul(self, rhs: &$name) -> $name {
                self.assert_compatible(rhs);
                $name { leg_dim: self.leg_dim, m: &self.m * &rhs.m }
            }
        }

        impl Add for &$name {
            type Output = $name;
            fn add(self, rhs: &$name) -> $name {
                self.assert_compatible(rhs);
                $name { leg_dim: self.leg_dim, m: &self.m + &rhs.m }
            }
        }

        impl Sub for &$name {
            type Output = $name;
            fn sub(self, rhs: &$name) -> $name {
                self.assert_compatible(rhs);
                $name { leg_dim: self.leg_dim, m: &self.m - &rhs.m }
            }
        }
    };
}

/// Operator on C^d.
#[derive(Clone, Debug, PartialEq)]
pub struct AuxMatrix {
    leg_dim: usize,
    m: CMat,
}

/// Operator on C^d⊗C^d.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoLegOperator {
    leg_dim: usize,
    m: CMat,
}

/// Operator on C^d⊗C^d⊗C^d.
#[derive(Clone, Debug, PartialEq)]
pub struct ThreeLegOperator {
    leg_dim: usize,
    m: CMat,
}

dense_operator!(AuxMatrix, 1);
dense_operator!(TwoLegOperator, 2);
dense_operator!(ThreeLegOperator, 3);

impl AuxMatrix {
    pub fn dim(&self) -> usize {
        self.leg_dim
    }

    /// `z·I_d`.
    pub fn scalar(dim: usize, z: C64) -> Self {
        Self::identity(dim).scale(z)
    }

    /// Assembles a `2d×2d` matrix from four `d×d` blocks `[[a, b], [c, d]]`.
    pub fn from_blocks(a: &AuxMatrix, b: &AuxMatrix, c: &AuxMatrix, d: &AuxMatrix) -> Result<Self> {
        let n = a.dim();
        for blk in [b, c, d] {
            if blk.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, found: blk.dim() });
            }
        }
        let mut m = CMat::zeros(2 * n, 2 * n);
        m.view_mut((0, 0), (n, n)).copy_from(&a.m);
        m.view_mut((0, n), (n, n)).copy_from(&b.m);
        m.view_mut((n, 0), (n, n)).copy_from(&c.m);
        m.view_mut((n, n), (n, n)).copy_from(&d.m);
        Ok(Self { leg_dim: 2 * n, m })
    }

    /// Extracts the `size×size` block starting at `(row, col)`.
    pub fn block(&self, row: usize, col: usize, size: usize) -> AuxMatrix {
        AuxMatrix { leg_dim: size, m: self.m.view((row, col), (size, size)).into_owned() }
    }

    /// `X ⊗ I` on C^d⊗C^d.
    pub fn on_leg1(&self) -> TwoLegOperator {
        TwoLegOperator { leg_dim: self.leg_dim, m: self.m.kronecker(&CMat::identity(self.leg_dim, self.leg_dim)) }
    }

    /// `I ⊗ X` on C^d⊗C^d.
    pub fn on_leg2(&self) -> TwoLegOperator {
        TwoLegOperator { leg_dim: self.leg_dim, m: CMat::identity(self.leg_dim, self.leg_dim).kronecker(&self.m) }
    }
}

/// Kronecker product `a ⊗ b` with `(a⊗b)[(i1,i2),(j1,j2)] = a[i1,j1]·b[i2,j2]`.
pub fn kron(a: &AuxMatrix, b: &AuxMatrix) -> Result<TwoLegOperator> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    Ok(TwoLegOperator { leg_dim: a.dim(), m: a.m.kronecker(&b.m) })
}

/// `a ⊗ b ⊗ c` on three legs.
pub fn kron3(a: &AuxMatrix, b: &AuxMatrix, c: &AuxMatrix) -> Result<ThreeLegOperator> {
    let ab = kron(a, b)?;
    if c.dim() != a.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: c.dim() });
    }
    Ok(ThreeLegOperator { leg_dim: a.dim(), m: ab.m.kronecker(&c.m) })
}

/// Transposition `P[(i1,i2),(j1,j2)] = δ(i1,j2)·δ(i2,j1)`.
pub fn permutation_operator(d: usize) -> TwoLegOperator {
    TwoLegOperator::from_fn(d, |r, c| {
        let (i1, i2) = (r / d, r % d);
        let (j1, j2) = (c / d, c % d);
        if i1 == j2 && i2 == j1 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// `P·X·P`, computed as an exact index relabelling.
pub fn swap_legs(x: &TwoLegOperator) -> TwoLegOperator {
    let d = x.leg_dim;
    let flip = |r: usize| (r % d) * d + r / d;
    TwoLegOperator::from_fn(d, |r, c| x.m[(flip(r), flip(c))])
}

/// Places a two-leg operator on the given ordered pair of legs of C^d⊗C^d⊗C^d.
///
/// The first entry of `legs` receives the operator's first leg.
pub fn embed_pair(x: &TwoLegOperator, legs: (usize, usize)) -> Result<ThreeLegOperator> {
    let (la, lb) = legs;
    if la == lb || !(1..=3).contains(&la) || !(1..=3).contains(&lb) {
        return Err(Error::InvalidLegPair(la, lb));
    }
    let lc = 6 - la - lb;
    let d = x.leg_dim;
    let split = |r: usize| [r / (d * d), (r / d) % d, r % d];
    Ok(ThreeLegOperator::from_fn(d, |r, c| {
        let ri = split(r);
        let ci = split(c);
        if ri[lc - 1] != ci[lc - 1] {
            return C64::new(0.0, 0.0);
        }
        x.m[(ri[la - 1] * d + ri[lb - 1], ci[la - 1] * d + ci[lb - 1])]
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn aux(d: usize, v: &[f64]) -> AuxMatrix {
        let entries: Vec<C64> = v.chunks(2).map(|p| c(p[0], p[1])).collect();
        AuxMatrix::from_row_slice(d, &entries).unwrap()
    }

    fn arb_aux(d: usize) -> impl Strategy<Value = AuxMatrix> {
        prop::collection::vec(-2.0..2.0f64, 2 * d * d).prop_map(move |v| aux(d, &v))
    }

    fn arb_two(d: usize) -> impl Strategy<Value = TwoLegOperator> {
        prop::collection::vec(-2.0..2.0f64, 2 * d.pow(4)).prop_map(move |v| {
            let e: Vec<C64> = v.chunks(2).map(|p| c(p[0], p[1])).collect();
            TwoLegOperator::from_row_slice(d, &e).unwrap()
        })
    }

    #[test]
    fn kron_identities() {
        assert_eq!(kron(&AuxMatrix::identity(2), &AuxMatrix::identity(2)).unwrap(), TwoLegOperator::identity(2));
        let d12 = aux(2, &[1., 0., 0., 0., 0., 0., 2., 0.]);
        let k = kron(&d12, &AuxMatrix::identity(2)).unwrap();
        let expect = [1.0, 1.0, 2.0, 2.0];
        for (r, &diag) in expect.iter().enumerate() {
            for col in 0..4 {
                let want = if r == col { diag } else { 0.0 };
                assert_eq!(k.get(r, col), c(want, 0.0));
            }
        }
    }

    #[test]
    fn kron_rejects_mismatch() {
        assert!(matches!(kron(&AuxMatrix::identity(2), &AuxMatrix::identity(3)), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn permutation_small_cases() {
        assert_eq!(permutation_operator(1), TwoLegOperator::identity(1));
        let p = permutation_operator(2);
        let rows = [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]];
        for (r, row) in rows.iter().enumerate() {
            for (col, &v) in row.iter().enumerate() {
                assert_eq!(p.get(r, col), c(v as f64, 0.0));
            }
        }
        assert_eq!(&p * &p, TwoLegOperator::identity(2));
        assert_eq!(swap_legs(&p), p);
    }

    #[test]
    fn non_finite_rejected() {
        let r = AuxMatrix::from_row_slice(1, &[c(f64::NAN, 0.0)]);
        assert_eq!(r, Err(Error::NonFinite { row: 0, col: 0 }));
    }

    #[test]
    fn norm_propagates_nan() {
        let m = AuxMatrix::from_fn(2, |i, j| if i == 1 && j == 0 { c(f64::NAN, 0.0) } else { c(3.0, 0.0) });
        assert!(m.norm_inf().is_nan());
        assert_eq!(AuxMatrix::scalar(2, c(0.0, -2.0)).norm_inf(), 2.0);
    }

    #[test]
    fn embed_pair_identity_and_invalid_legs() {
        let i = TwoLegOperator::identity(2);
        assert_eq!(embed_pair(&i, (1, 2)).unwrap(), ThreeLegOperator::identity(2));
        assert_eq!(embed_pair(&i, (2, 2)), Err(Error::InvalidLegPair(2, 2)));
        assert_eq!(embed_pair(&i, (0, 2)), Err(Error::InvalidLegPair(0, 2)));
        assert_eq!(embed_pair(&i, (1, 4)), Err(Error::InvalidLegPair(1, 4)));
    }

    #[test]
    fn embed_p13_permutes_basis_vectors() {
        let d = 3;
        let p13 = embed_pair(&permutation_operator(d), (1, 3)).unwrap();
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let src = (i * d + j) * d + k;
                    let dst = (k * d + j) * d + i;
                    for r in 0..d * d * d {
                        let want = if r == dst { 1.0 } else { 0.0 };
                        assert_eq!(p13.get(r, src), c(want, 0.0));
                    }
                }
            }
        }
    }

    #[test]
    fn norm_and_dagger_trivia() {
        assert_eq!(TwoLegOperator::zeros(2).norm_inf(), 0.0);
        assert_eq!(AuxMatrix::identity(3).dagger(), AuxMatrix::identity(3));
    }

    #[test]
    fn blocks_round_trip() {
        let a = aux(1, &[1., 0.]);
        let b = aux(1, &[2., 1.]);
        let cc = aux(1, &[3., 0.]);
        let d = aux(1, &[4., -1.]);
        let m = AuxMatrix::from_blocks(&a, &b, &cc, &d).unwrap();
        assert_eq!(m.block(0, 1, 1), b);
        assert_eq!(m.block(1, 0, 1), cc);
        assert_eq!(m.get(1, 1), c(4.0, -1.0));
    }

    proptest! {
        #[test]
        fn kron_matches_index_loop(a in arb_aux(2), b in arb_aux(2)) {
            let k = kron(&a, &b).unwrap();
            for i1 in 0..2 { for i2 in 0..2 { for j1 in 0..2 { for j2 in 0..2 {
                prop_assert_eq!(k.get(i1 * 2 + i2, j1 * 2 + j2), a.get(i1, j1) * b.get(i2, j2));
            }}}}
        }

        #[test]
        fn permutation_conjugation_swaps_factors(a in arb_aux(3), b in arb_aux(3)) {
            let p = permutation_operator(3);
            let lhs = &(&p * &kron(&a, &b).unwrap()) * &p;
            prop_assert!((&lhs - &kron(&b, &a).unwrap()).norm_inf() < 1e-14);
            prop_assert_eq!(swap_legs(&kron(&a, &b).unwrap()), kron(&b, &a).unwrap());
        }

        #[test]
        fn swap_legs_is_involution_and_matches_pxp(x in arb_two(2)) {
            prop_assert_eq!(swap_legs(&swap_legs(&x)), x.clone());
            let p = permutation_operator(2);
            prop_assert!((&swap_legs(&x) - &(&(&p * &x) * &p)).norm_inf() < 1e-14);
        }

        #[test]
        fn embed_pair_relabelling(x in arb_two(2)) {
            prop_assert_eq!(embed_pair(&x, (2, 1)).unwrap(), embed_pair(&swap_legs(&x), (1, 2)).unwrap());
            prop_assert_eq!(embed_pair(&x, (3, 1)).unwrap(), embed_pair(&swap_legs(&x), (1, 3)).unwrap());
        }

        #[test]
        fn embed_pair_tensor_placement(a in arb_aux(2), b in arb_aux(2)) {
            let ab = kron(&a, &b).unwrap();
            let i = AuxMatrix::identity(2);
            prop_assert_eq!(embed_pair(&ab, (2, 3)).unwrap(), kron3(&i, &a, &b).unwrap());
            prop_assert_eq!(embed_pair(&ab, (1, 2)).unwrap(), kron3(&a, &b, &i).unwrap());
            prop_assert_eq!(embed_pair(&ab, (1, 3)).unwrap(), kron3(&a, &i, &b).unwrap());
        }

        #[test]
        fn kron3_matches_flattening(a in arb_aux(2), b in arb_aux(2), cc in arb_aux(2)) {
            let t = kron3(&a, &b, &cc).unwrap();
            for r in 0..8 { for col in 0..8 {
                let want = a.get(r / 4, col / 4) * b.get((r / 2) % 2, (col / 2) % 2) * cc.get(r % 2, col % 2);
                prop_assert!((t.get(r, col) - want).norm() < 1e-14);
            }}
        }

        #[test]
        fn dagger_reverses_products(x in arb_two(2), y in arb_two(2)) {
            let lhs = (&x * &y).dagger();
            let rhs = &y.dagger() * &x.dagger();
            prop_assert!((&lhs - &rhs).norm_inf() < 1e-13);
            prop_assert_eq!(x.dagger().dagger(), x.clone());
            prop_assert_eq!((&x - &x).norm_inf(), 0.0);
        }

        #[test]
        fn leg_embeddings_match_kron(a in arb_aux(2)) {
            let i = AuxMatrix::identity(2);
            prop_assert_eq!(a.on_leg1(), kron(&a, &i).unwrap());
            prop_assert_eq!(a.on_leg2(), kron(&i, &a).unwrap());
        }
    }
}
