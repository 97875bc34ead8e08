//! Bulk two-body S-matrices, a small catalog, and Yang–Baxter / unitarity residuals.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::tensor::{embed_pair, permutation_operator, swap_legs, TwoLegOperator};

type Evaluator = dyn Fn(f64, f64) -> TwoLegOperator + Send + Sync;
type PolePredicate = dyn Fn(f64, f64) -> bool + Send + Sync;

/// Momentum-dependent operator `S₁₂(k1, k2)` on C^d⊗C^d.
#[derive(Clone)]
pub struct BulkSMatrix {
    name: String,
    leg_dim: usize,
    translation_invariant: bool,
    eval: Arc<Evaluator>,
    pole: Arc<PolePredicate>,
}

impl fmt::Debug for BulkSMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BulkSMatrix")
            .field("name", &self.name)
            .field("leg_dim", &self.leg_dim)
            .field("translation_invariant", &self.translation_invariant)
            .finish()
    }
}

impl BulkSMatrix {
    /// The evaluator must return operators with the declared leg dimension.
    pub fn new(
        name: impl Into<String>,
        leg_dim: usize,
        translation_invariant: bool,
        eval: impl Fn(f64, f64) -> TwoLegOperator + Send + Sync + 'static,
    ) -> Self {
        Self { name: name.into(), leg_dim, translation_invariant, eval: Arc::new(eval), pole: Arc::new(|_, _| false) }
    }

    pub fn with_pole_predicate(mut self, pred: impl Fn(f64, f64) -> bool + Send + Sync + 'static) -> Self {
        self.pole = Arc::new(pred);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn leg_dim(&self) -> usize {
        self.leg_dim
    }

    pub fn translation_invariant(&self) -> bool {
        self.translation_invariant
    }

    pub fn is_pole(&self, k1: f64, k2: f64) -> bool {
        (self.pole)(k1, k2)
    }

    /// `S₁₂(k1, k2)`.
    pub fn eval(&self, k1: f64, k2: f64) -> Result<TwoLegOperator> {
        self.eval_named("S", k1, k2)
    }

    /// `S₂₁(k1, k2) = P·S₁₂(k1, k2)·P`.
    pub fn eval_21(&self, k1: f64, k2: f64) -> Result<TwoLegOperator> {
        Ok(swap_legs(&self.eval_named("S21", k1, k2)?))
    }

    pub(crate) fn eval_named(&self, pair: &str, k1: f64, k2: f64) -> Result<TwoLegOperator> {
        if self.is_pole(k1, k2) {
            return Err(Error::Pole { pair: format!("{}({})", pair, self.name), k1, k2 });
        }
        let s = (self.eval)(k1, k2);
        debug_assert_eq!(s.leg_dim(), self.leg_dim);
        Ok(s)
    }
}

/// `S ≡ I`.
pub fn identity_s(d: usize) -> BulkSMatrix {
    BulkSMatrix::new(format!("identity(d={d})"), d, true, move |_, _| TwoLegOperator::identity(d))
}

/// `S ≡ P`.
pub fn permutation_s(d: usize) -> BulkSMatrix {
    let p = permutation_operator(d);
    BulkSMatrix::new(format!("permutation(d={d})"), d, true, move |_, _| p.clone())
}

/// Rational solution `s(u) = (u·I + i·c·P)/(u + i·c)` with `u = k1 − k2`.
pub fn rational_s(n: usize, c: f64) -> Result<BulkSMatrix> {
    if n == 0 {
        return Err(Error::InvalidParameter("rational S needs N ≥ 1".into()));
    }
    if c == 0.0 || !c.is_finite() {
        return Err(Error::InvalidParameter(format!("rational S needs a finite nonzero c, got {c}")));
    }
    let p = permutation_operator(n);
    let id = TwoLegOperator::identity(n);
    let s = BulkSMatrix::new(format!("rational(N={n},c={c})"), n, true, move |k1, k2| {
        let u = k1 - k2;
        let ic = C64::new(0.0, c);
        let num = &id.scale(C64::new(u, 0.0)) + &p.scale(ic);
        num.scale(1.0 / (C64::new(u, 0.0) + ic))
    });
    // the only pole sits at k1 − k2 = −ic, which is off the real axis
    Ok(s.with_pole_predicate(move |k1, k2| C64::new(k1 - k2, c).norm() == 0.0))
}

/// `‖S₁₂S₁₃S₂₃ − S₂₃S₁₃S₁₂‖∞` at `(k1, k2, k3)`.
pub fn ybe_residual(s: &BulkSMatrix, k1: f64, k2: f64, k3: f64) -> Result<f64> {
    let s12 = embed_pair(&s.eval_named("S12", k1, k2)?, (1, 2))?;
    let s13 = embed_pair(&s.eval_named("S13", k1, k3)?, (1, 3))?;
    let s23 = embed_pair(&s.eval_named("S23", k2, k3)?, (2, 3))?;
    let lhs = &(&s12 * &s13) * &s23;
    let rhs = &(&s23 * &s13) * &s12;
    Ok((&lhs - &rhs).norm_inf())
}

/// `‖S₁₂(k1,k2)·S₂₁(k2,k1) − I‖∞`.
pub fn unitarity_residual(s: &BulkSMatrix, k1: f64, k2: f64) -> Result<f64> {
    let a = s.eval_named("S12", k1, k2)?;
    let b = swap_legs(&s.eval_named("S21", k2, k1)?);
    Ok((&(&a * &b) - &TwoLegOperator::identity(s.leg_dim())).norm_inf())
}

/// `‖S(k1+c, k2+c) − S(k1, k2)‖∞`; zero for translation-invariant S.
pub fn shift_residual(s: &BulkSMatrix, k1: f64, k2: f64, c: f64) -> Result<f64> {
    Ok((&s.eval(k1 + c, k2 + c)? - &s.eval(k1, k2)?).norm_inf())
}

/// Half-width of the interval momenta are drawn from.
pub const SAMPLE_RANGE: f64 = 4.0;

/// Default minimum distance from 0 and from pairwise `±` coincidences.
pub const DEFAULT_EXCLUSION_RADIUS: f64 = 1e-3;

const DRAWS_PER_MOMENTUM: usize = 1000;

/// Deterministic momentum sample avoiding 0 and `k_i = ±k_j` coincidences.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentumSample {
    pub values: Vec<f64>,
    pub exclusion_radius: f64,
    pub seed: u64,
}

impl MomentumSample {
    /// Consecutive disjoint pairs `(k0,k1), (k2,k3), …`.
    pub fn pairs(&self) -> Vec<(f64, f64)> {
        self.values.chunks_exact(2).map(|c| (c[0], c[1])).collect()
    }

    /// Consecutive disjoint triples.
    pub fn triples(&self) -> Vec<(f64, f64, f64)> {
        self.values.chunks_exact(3).map(|c| (c[0], c[1], c[2])).collect()
    }
}

fn admissible(k: f64, taken: &[f64], radius: f64) -> bool {
    k.abs() >= radius && taken.iter().all(|&q| (k - q).abs() >= radius && (k + q).abs() >= radius)
}

/// Draws `n` momenta uniformly from `(-SAMPLE_RANGE, SAMPLE_RANGE)` by rejection.
pub fn sample_momenta(n: usize, exclusion_radius: f64, seed: u64) -> Result<MomentumSample> {
    if n == 0 {
        return Err(Error::InvalidParameter("sample size must be at least 1".into()));
    }
    if !(exclusion_radius > 0.0 && exclusion_radius.is_finite()) {
        return Err(Error::InvalidParameter(format!("exclusion radius must be positive, got {exclusion_radius}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let budget = n * DRAWS_PER_MOMENTUM;
    let mut values = Vec::with_capacity(n);
    let mut attempts = 0;
    while values.len() < n {
        if attempts == budget {
            return Err(Error::SamplingExhausted { requested: n, radius: exclusion_radius, attempts });
        }
        attempts += 1;
        let k = rng.random_range(-SAMPLE_RANGE..SAMPLE_RANGE);
        if admissible(k, &values, exclusion_radius) {
            values.push(k);
        }
    }
    Ok(MomentumSample { values, exclusion_radius, seed })
}
