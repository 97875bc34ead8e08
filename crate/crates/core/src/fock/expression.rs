//! Formal sums of contraction terms with lazily evaluated coefficients.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64 as C64;

use super::engine::EnginePath;
use crate::error::{Error, Result};

/// Relative tolerance used when checking that a substitution respects a pairing.
pub const PAIRING_TOLERANCE: f64 = 1e-9;

/// One δ-contraction: `δ(q − p)` for `sign = +1`, `δ(q + p)` for `sign = −1`,
/// with `q` the annihilator and `p` the creator momentum.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Contraction {
    pub annihilator: String,
    pub creator: String,
    pub sign: i8,
}

impl Contraction {
    pub fn new(annihilator: impl Into<String>, creator: impl Into<String>, sign: i8) -> Self {
        Self { annihilator: annihilator.into(), creator: creator.into(), sign }
    }
}

/// Momentum values and optional component indices per label.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Substitution {
    pub momenta: BTreeMap<String, f64>,
    pub components: BTreeMap<String, usize>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn momentum(mut self, label: impl Into<String>, k: f64) -> Self {
        self.momenta.insert(label.into(), k);
        self
    }

    pub fn component(mut self, label: impl Into<String>, index: usize) -> Self {
        self.components.insert(label.into(), index);
        self
    }

    pub fn momentum_of(&self, label: &str) -> Result<f64> {
        self.momenta.get(label).copied().ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// Sets every annihilator momentum to `sign·p` of its partner creator.
    pub fn on_pairing(mut self, pairing: &[Contraction]) -> Result<Self> {
        for c in pairing {
            let p = self.momentum_of(&c.creator)?;
            self.momenta.insert(c.annihilator.clone(), f64::from(c.sign) * p);
        }
        Ok(self)
    }
}

type CoefficientFn = dyn Fn(&Substitution) -> Result<C64> + Send + Sync;

/// Evaluable coefficient tree.
#[derive(Clone)]
pub enum Coefficient {
    One,
    /// Recorded normal-ordering path, replayed against the model on evaluation.
    Path(Arc<EnginePath>),
    Function(Arc<CoefficientFn>),
    Product(Vec<Coefficient>),
    Sum(Vec<Coefficient>),
}

impl Coefficient {
    pub fn function(f: impl Fn(&Substitution) -> Result<C64> + Send + Sync + 'static) -> Self {
        Coefficient::Function(Arc::new(f))
    }

    pub fn evaluate(&self, subst: &Substitution) -> Result<C64> {
        match self {
            Coefficient::One => Ok(C64::new(1.0, 0.0)),
            Coefficient::Path(p) => p.evaluate(subst),
            Coefficient::Function(f) => f(subst),
            Coefficient::Product(fs) => fs.iter().try_fold(C64::new(1.0, 0.0), |acc, f| Ok(acc * f.evaluate(subst)?)),
            Coefficient::Sum(fs) => fs.iter().try_fold(C64::new(0.0, 0.0), |acc, f| Ok(acc + f.evaluate(subst)?)),
        }
    }
}

impl PartialEq for Coefficient {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Coefficient::One, Coefficient::One) => true,
            (Coefficient::Path(a), Coefficient::Path(b)) => Arc::ptr_eq(a, b),
            (Coefficient::Function(a), Coefficient::Function(b)) => Arc::ptr_eq(a, b),
            (Coefficient::Product(a), Coefficient::Product(b)) | (Coefficient::Sum(a), Coefficient::Sum(b)) => a == b,
            _ => false,
        }
    }
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::One => write!(f, "1"),
            Coefficient::Path(p) => write!(f, "Path({} steps)", p.len()),
            Coefficient::Function(_) => write!(f, "Function"),
            Coefficient::Product(v) => f.debug_tuple("Product").field(v).finish(),
            Coefficient::Sum(v) => f.debug_tuple("Sum").field(v).finish(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContractionTerm {
    pub pairing: Vec<Contraction>,
    pub coefficient: Coefficient,
    /// Power of 2π multiplying the coefficient.
    pub delta_normalization: i32,
}

impl ContractionTerm {
    /// Errors unless every annihilator momentum equals `sign·creator` momentum.
    pub fn check_substitution(&self, subst: &Substitution) -> Result<()> {
        for c in &self.pairing {
            let q = subst.momentum_of(&c.annihilator)?;
            let p = subst.momentum_of(&c.creator)?;
            let target = f64::from(c.sign) * p;
            if (q - target).abs() > PAIRING_TOLERANCE * q.abs().max(p.abs()).max(1.0) {
                return Err(Error::InconsistentSubstitution {
                    annihilator: c.annihilator.clone(),
                    creator: c.creator.clone(),
                    sign: c.sign,
                    annihilator_value: q,
                    creator_value: p,
                });
            }
        }
        Ok(())
    }

    /// Coefficient times `(2π)^delta_normalization` at a pairing-consistent substitution.
    pub fn value(&self, subst: &Substitution) -> Result<C64> {
        self.check_substitution(subst)?;
        Ok(self.coefficient.evaluate(subst)? * (2.0 * PI).powi(self.delta_normalization))
    }

    fn key(&self) -> &[Contraction] {
        &self.pairing
    }
}

/// Largest particle number for which full component tensors are produced.
pub const MAX_TENSOR_PARTICLES: usize = 3;

#[derive(Clone, Debug, PartialEq)]
pub struct AmplitudeExpression {
    /// Component dimension per leg.
    pub dim: usize,
    pub particles: usize,
    /// False when the query violated the physical ordering conditions.
    pub physical: bool,
    terms: Vec<ContractionTerm>,
}

impl AmplitudeExpression {
    pub fn from_terms(dim: usize, particles: usize, terms: Vec<ContractionTerm>) -> Self {
        Self { dim, particles, physical: true, terms }
    }

    /// The canonical zero: no terms.
    pub fn zero(dim: usize, particles: usize) -> Self {
        Self::from_terms(dim, particles, Vec::new())
    }

    pub fn terms(&self) -> &[ContractionTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Sorts pairings and terms, merging terms with equal pairings by summing coefficients.
    pub fn canonicalize(mut self) -> Self {
        for t in &mut self.terms {
            if !t.pairing.windows(2).all(|w| w[0] <= w[1]) {
                t.pairing.sort();
            }
        }
        if !self.terms.windows(2).all(|w| w[0].key() < w[1].key()) {
            self.terms.sort_by(|a, b| a.pairing.cmp(&b.pairing));
            let mut merged: Vec<ContractionTerm> = Vec::with_capacity(self.terms.len());
            for t in self.terms.drain(..) {
                match merged.last_mut() {
                    Some(last) if last.pairing == t.pairing && last.delta_normalization == t.delta_normalization => {
                        let prev = std::mem::replace(&mut last.coefficient, Coefficient::One);
                        last.coefficient = match prev {
                            Coefficient::Sum(mut v) => {
                                v.push(t.coefficient);
                                Coefficient::Sum(v)
                            }
                            other => Coefficient::Sum(vec![other, t.coefficient]),
                        };
                    }
                    _ => merged.push(t),
                }
            }
            self.terms = merged;
        }
        self
    }

    /// Term with the given pairing, in any order.
    pub fn term(&self, pairing: &[Contraction]) -> Option<&ContractionTerm> {
        let mut key = pairing.to_vec();
        key.sort();
        self.terms.iter().find(|t| {
            let mut tk = t.pairing.clone();
            tk.sort();
            tk == key
        })
    }

    /// Attaches one factor of 2π per contraction.
    pub fn with_two_pi(mut self) -> Self {
        for t in &mut self.terms {
            t.delta_normalization = t.pairing.len() as i32;
        }
        self
    }

    /// Formal product; label sets must be disjoint.
    pub fn product(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                for c in &b.pairing {
                    if a.pairing.iter().any(|x| x.annihilator == c.annihilator || x.creator == c.creator) {
                        return Err(Error::DuplicateLabel(c.annihilator.clone()));
                    }
                }
                let mut pairing = a.pairing.clone();
                pairing.extend(b.pairing.iter().cloned());
                terms.push(ContractionTerm {
                    pairing,
                    coefficient: Coefficient::Product(vec![a.coefficient.clone(), b.coefficient.clone()]),
                    delta_normalization: a.delta_normalization + b.delta_normalization,
                });
            }
        }
        Ok(Self {
            dim: self.dim,
            particles: self.particles + other.particles,
            physical: self.physical && other.physical,
            terms,
        })
    }

    /// All component values of one term for the labels in `free`, row-major over `free`.
    pub fn component_tensor(&self, term: &ContractionTerm, subst: &Substitution, free: &[String]) -> Result<Vec<C64>> {
        if self.particles > MAX_TENSOR_PARTICLES {
            return Err(Error::TooManyParticles { requested: self.particles, max: MAX_TENSOR_PARTICLES });
        }
        let total = self.dim.pow(free.len() as u32);
        let mut out = Vec::with_capacity(total);
        for flat in 0..total {
            let mut s = subst.clone();
            let mut rem = flat;
            for label in free.iter().rev() {
                s.components.insert(label.clone(), rem % self.dim);
                rem /= self.dim;
            }
            out.push(term.value(&s)?);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn konst(z: f64) -> Coefficient {
        Coefficient::function(move |_| Ok(C64::new(z, 0.0)))
    }

    fn term(pairs: &[(&str, &str, i8)], coef: Coefficient) -> ContractionTerm {
        ContractionTerm {
            pairing: pairs.iter().map(|&(a, c, s)| Contraction::new(a, c, s)).collect(),
            coefficient: coef,
            delta_normalization: 0,
        }
    }

    #[test]
    fn canonicalization_merges_and_is_idempotent() {
        let e = AmplitudeExpression::from_terms(
            2,
            2,
            vec![
                term(&[("q2", "p2", 1), ("q1", "p1", -1)], konst(1.0)),
                term(&[("q1", "p2", 1), ("q2", "p1", 1)], konst(3.0)),
                term(&[("q1", "p1", -1), ("q2", "p2", 1)], konst(2.0)),
            ],
        );
        let once = e.canonicalize();
        assert_eq!(once.terms().len(), 2);
        let twice = once.clone().canonicalize();
        assert_eq!(once, twice);
        let s = Substitution::new().momentum("p1", 1.0).momentum("p2", 2.0).momentum("q1", -1.0).momentum("q2", 2.0);
        let merged = once.term(&[Contraction::new("q1", "p1", -1), Contraction::new("q2", "p2", 1)]).unwrap();
        assert_eq!(merged.value(&s).unwrap(), C64::new(3.0, 0.0));
    }

    #[test]
    fn inconsistent_substitution_is_rejected() {
        let t = term(&[("q", "p", -1)], Coefficient::One);
        let bad = Substitution::new().momentum("q", 1.0).momentum("p", 1.0);
        assert!(matches!(t.value(&bad), Err(Error::InconsistentSubstitution { .. })));
        let missing = Substitution::new().momentum("p", 1.0);
        assert_eq!(t.value(&missing), Err(Error::UnknownLabel("q".into())));
        let good = Substitution::new().momentum("p", 1.0).on_pairing(&t.pairing).unwrap();
        assert_eq!(t.value(&good).unwrap(), C64::new(1.0, 0.0));
    }

    #[test]
    fn two_pi_normalization() {
        let e = AmplitudeExpression::from_terms(1, 1, vec![term(&[("q", "p", 1)], konst(0.5))]).with_two_pi();
        let s = Substitution::new().momentum("p", 0.3).momentum("q", 0.3);
        assert!((e.terms()[0].value(&s).unwrap() - C64::new(PI, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn product_concatenates_pairings() {
        let a = AmplitudeExpression::from_terms(
            1,
            1,
            vec![term(&[("q1", "p1", 1)], konst(2.0)), term(&[("q1", "p1", -1)], konst(3.0))],
        );
        let b = AmplitudeExpression::from_terms(1, 1, vec![term(&[("q2", "p2", 1)], konst(5.0))]);
        let ab = a.product(&b).unwrap();
        assert_eq!(ab.terms().len(), 2);
        assert_eq!(ab.particles, 2);
        let s = Substitution::new().momentum("p1", 1.0).momentum("p2", 2.0).on_pairing(&ab.terms()[1].pairing).unwrap();
        assert_eq!(ab.terms()[1].value(&s).unwrap(), C64::new(15.0, 0.0));
        assert!(a.product(&a).is_err());
    }
}
