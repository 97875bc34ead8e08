//! Reflection/transmission defect data and the relation residuals built from it.
//!
//! All relation checkers evaluate the printed left- and right-hand sides verbatim
//! and return `‖LHS − RHS‖∞`. Subscripts 1 and 2 denote the leg an operator acts on.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::smatrix::BulkSMatrix;
use crate::tensor::{AuxMatrix, TwoLegOperator};

type MatrixEvaluator = dyn Fn(f64) -> AuxMatrix + Send + Sync;

/// Half-line label `ξ = ±`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Side {
        match self {
            Side::Plus => Side::Minus,
            Side::Minus => Side::Plus,
        }
    }

    /// Side of a nonzero momentum, `ε(k)`.
    pub fn of(k: f64) -> Result<Side> {
        if k > 0.0 {
            Ok(Side::Plus)
        } else if k < 0.0 {
            Ok(Side::Minus)
        } else {
            Err(Error::ZeroMomentum(k))
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Side::Plus => '+',
            Side::Minus => '-',
        }
    }
}

/// `θ(k)`, undefined at 0.
pub fn heaviside(k: f64) -> Result<f64> {
    Ok(match Side::of(k)? {
        Side::Plus => 1.0,
        Side::Minus => 0.0,
    })
}

/// Reflection and transmission evaluators on `ℝ∖{0}`.
#[derive(Clone)]
pub struct DefectPair {
    name: String,
    dim: usize,
    reflection: Arc<MatrixEvaluator>,
    transmission: Arc<MatrixEvaluator>,
}

impl fmt::Debug for DefectPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DefectPair").field("name", &self.name).field("dim", &self.dim).finish()
    }
}

impl DefectPair {
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        reflection: impl Fn(f64) -> AuxMatrix + Send + Sync + 'static,
        transmission: impl Fn(f64) -> AuxMatrix + Send + Sync + 'static,
    ) -> Self {
        Self { name: name.into(), dim, reflection: Arc::new(reflection), transmission: Arc::new(transmission) }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `R(k)`.
    pub fn r(&self, k: f64) -> Result<AuxMatrix> {
        if k == 0.0 {
            return Err(Error::ZeroMomentum(k));
        }
        Ok((self.reflection)(k))
    }

    /// `T(k)`.
    pub fn t(&self, k: f64) -> Result<AuxMatrix> {
        if k == 0.0 {
            return Err(Error::ZeroMomentum(k));
        }
        Ok((self.transmission)(k))
    }

    /// Same data with `R` multiplied by `factor` (negative controls).
    pub fn with_scaled_reflection(&self, factor: f64) -> DefectPair {
        let r = self.reflection.clone();
        DefectPair {
            name: format!("{}*R{factor}", self.name),
            dim: self.dim,
            reflection: Arc::new(move |k| r(k).scale(C64::new(factor, 0.0))),
            transmission: self.transmission.clone(),
        }
    }

    /// Promotes scalar data to `R(k)·I_n`, `T(k)·I_n`.
    pub fn lift_scalar(&self, n: usize) -> Result<DefectPair> {
        if self.dim != 1 {
            return Err(Error::DimensionMismatch { expected: 1, found: self.dim });
        }
        if n == 1 {
            return Ok(self.clone());
        }
        let (r, t) = (self.reflection.clone(), self.transmission.clone());
        Ok(DefectPair {
            name: format!("{}⊗I{n}", self.name),
            dim: n,
            reflection: Arc::new(move |k| AuxMatrix::scalar(n, r(k).get(0, 0))),
            transmission: Arc::new(move |k| AuxMatrix::scalar(n, t(k).get(0, 0))),
        })
    }
}

/// Raw δ-impurity amplitudes `(T(k), R(k)) = (k, −iη)/(k + iη)`, total on ℝ.
///
/// At `k = 0` with `η > 0` this gives the limits `T = 0`, `R = −1`; with `η = 0`
/// the free values `T = 1`, `R = 0` are returned everywhere.
pub fn delta_amplitudes(eta: f64, k: f64) -> (C64, C64) {
    if eta == 0.0 {
        return (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
    }
    let den = C64::new(k, eta);
    (C64::new(k, 0.0) / den, C64::new(0.0, -eta) / den)
}

/// Scalar δ-impurity defect.
pub fn delta_defect(eta: f64) -> Result<DefectPair> {
    if !(eta >= 0.0 && eta.is_finite()) {
        return Err(Error::InvalidParameter(format!("δ coupling must be finite and nonnegative, got {eta}")));
    }
    Ok(DefectPair::new(
        format!("delta(eta={eta})"),
        1,
        move |k| AuxMatrix::scalar(1, delta_amplitudes(eta, k).1),
        move |k| AuxMatrix::scalar(1, delta_amplitudes(eta, k).0),
    ))
}

/// `T = I`, `R = 0`.
pub fn pure_transmission(d: usize) -> DefectPair {
    DefectPair::new(
        format!("pure-transmission(d={d})"),
        d,
        move |_| AuxMatrix::zeros(d),
        move |_| AuxMatrix::identity(d),
    )
}

/// `T = 0`, `R = I`.
pub fn pure_reflection(d: usize) -> DefectPair {
    DefectPair::new(format!("pure-reflection(d={d})"), d, move |_| AuxMatrix::identity(d), move |_| AuxMatrix::zeros(d))
}

/// Defect data restricted to one half-line: `X^ξ(k) = θ(ξk)·X(k)`.
#[derive(Clone, Debug)]
pub struct ProjectedDefect {
    pub pair: DefectPair,
    pub xi: Side,
}

impl ProjectedDefect {
    pub fn new(pair: DefectPair, xi: Side) -> Self {
        Self { pair, xi }
    }

    fn weight(&self, k: f64) -> Result<f64> {
        heaviside(self.xi.sign() * k)
    }

    pub fn r(&self, k: f64) -> Result<AuxMatrix> {
        let w = self.weight(k)?;
        Ok(if w == 0.0 { AuxMatrix::zeros(self.pair.dim()) } else { self.pair.r(k)? })
    }

    pub fn t(&self, k: f64) -> Result<AuxMatrix> {
        let w = self.weight(k)?;
        Ok(if w == 0.0 { AuxMatrix::zeros(self.pair.dim()) } else { self.pair.t(k)? })
    }
}

fn check_dims(s: &BulkSMatrix, d: &DefectPair) -> Result<()> {
    if s.leg_dim() != d.dim() {
        return Err(Error::DimensionMismatch { expected: s.leg_dim(), found: d.dim() });
    }
    Ok(())
}

fn prod(ops: &[&TwoLegOperator]) -> TwoLegOperator {
    let mut acc = ops[0].clone();
    for op in &ops[1..] {
        acc = &acc * op;
    }
    acc
}

fn diff(lhs: &TwoLegOperator, rhs: &TwoLegOperator) -> f64 {
    (lhs - rhs).norm_inf()
}

/// `‖T(k)T(k) + R(k)R(−k) − I‖∞ + ‖T(k)R(k) + R(k)T(−k)‖∞`.
pub fn defect_unitarity_residual(d: &DefectPair, k: f64) -> Result<f64> {
    let (t, r, tm, rm) = (d.t(k)?, d.r(k)?, d.t(-k)?, d.r(-k)?);
    let first = &(&(&t * &t) + &(&r * &rm)) - &AuxMatrix::identity(d.dim());
    let second = &(&t * &r) + &(&r * &tm);
    Ok(first.norm_inf() + second.norm_inf())
}

/// `‖T(k)† − T(k)‖∞ + ‖R(k)† − R(−k)‖∞`.
pub fn hermitian_analyticity_residual(d: &DefectPair, k: f64) -> Result<f64> {
    let t = d.t(k)?;
    let r = d.r(k)?;
    Ok((&t.dagger() - &t).norm_inf() + (&r.dagger() - &d.r(-k)?).norm_inf())
}

/// Pure-reflection relations on `ℝ₊` (`Plus`) or `ℝ₋` (`Minus`).
pub fn reflection_relation_residual(s: &BulkSMatrix, d: &DefectPair, k1: f64, k2: f64, xi: Side) -> Result<f64> {
    check_dims(s, d)?;
    let p = ProjectedDefect::new(d.clone(), xi);
    Ok(match xi {
        Side::Plus => {
            // S12(k1,k2) R2+(k1) S12(k2,-k1) R2+(k2) = R2+(k2) S12(k1,-k2) R2+(k1) S12(-k2,-k1)
            let r_k1 = p.r(k1)?.on_leg2();
            let r_k2 = p.r(k2)?.on_leg2();
            let lhs = prod(&[&s.eval(k1, k2)?, &r_k1, &s.eval(k2, -k1)?, &r_k2]);
            let rhs = prod(&[&r_k2, &s.eval(k1, -k2)?, &r_k1, &s.eval(-k2, -k1)?]);
            diff(&lhs, &rhs)
        }
        Side::Minus => {
            // S12(k1,k2) R1-(k2) S12(-k2,k1) R1-(k1) = R1-(k1) S12(-k1,k2) R1-(k2) S12(-k2,-k1)
            let r_k1 = p.r(k1)?.on_leg1();
            let r_k2 = p.r(k2)?.on_leg1();
            let lhs = prod(&[&s.eval(k1, k2)?, &r_k2, &s.eval(-k2, k1)?, &r_k1]);
            let rhs = prod(&[&r_k1, &s.eval(-k1, k2)?, &r_k2, &s.eval(-k2, -k1)?]);
            diff(&lhs, &rhs)
        }
    })
}

/// Variants of the pure-transmission relations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TransmissionVariant {
    Tst,
    SttMinus,
    SttPlus,
}

impl TransmissionVariant {
    pub const ALL: [TransmissionVariant; 3] = [Self::Tst, Self::SttMinus, Self::SttPlus];

    pub fn id(self) -> &'static str {
        match self {
            Self::Tst => "TST",
            Self::SttMinus => "STT-",
            Self::SttPlus => "STT+",
        }
    }
}

pub fn transmission_relation_residual(
    s: &BulkSMatrix,
    d: &DefectPair,
    k1: f64,
    k2: f64,
    variant: TransmissionVariant,
) -> Result<f64> {
    check_dims(s, d)?;
    let tp = ProjectedDefect::new(d.clone(), Side::Plus);
    let tm = ProjectedDefect::new(d.clone(), Side::Minus);
    let s12 = s.eval(k1, k2)?;
    Ok(match variant {
        TransmissionVariant::Tst => {
            // T1+(k1) S12(k1,k2) T1-(k2) = T2-(k2) S12(k1,k2) T2+(k1)
            let lhs = prod(&[&tp.t(k1)?.on_leg1(), &s12, &tm.t(k2)?.on_leg1()]);
            let rhs = prod(&[&tm.t(k2)?.on_leg2(), &s12, &tp.t(k1)?.on_leg2()]);
            diff(&lhs, &rhs)
        }
        TransmissionVariant::SttMinus | TransmissionVariant::SttPlus => {
            // S12(k1,k2) T1(k2) T2(k1) = T1(k1) T2(k2) S12(k1,k2), both T projected on the same side
            let proj = if variant == TransmissionVariant::SttMinus { &tm } else { &tp };
            let lhs = prod(&[&s12, &proj.t(k2)?.on_leg1(), &proj.t(k1)?.on_leg2()]);
            let rhs = prod(&[&proj.t(k1)?.on_leg1(), &proj.t(k2)?.on_leg2(), &s12]);
            diff(&lhs, &rhs)
        }
    })
}

/// Variants of the mixed reflection/transmission relations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MixedVariant {
    TsrsPlus,
    TsrsMinus,
    SrstPlus,
    SrstMinus,
    TsrPlus,
    TsrMinus,
    RstPlus,
    RstMinus,
}

impl MixedVariant {
    pub const ALL: [MixedVariant; 8] = [
        Self::TsrsPlus,
        Self::TsrsMinus,
        Self::SrstPlus,
        Self::SrstMinus,
        Self::TsrPlus,
        Self::TsrMinus,
        Self::RstPlus,
        Self::RstMinus,
    ];

    /// First printed set.
    pub const FOUR_FACTOR: [MixedVariant; 4] = [Self::TsrsPlus, Self::TsrsMinus, Self::SrstPlus, Self::SrstMinus];

    /// Second printed set, stated to be equivalent to the first.
    pub const THREE_FACTOR: [MixedVariant; 4] = [Self::TsrPlus, Self::TsrMinus, Self::RstPlus, Self::RstMinus];

    pub fn id(self) -> &'static str {
        match self {
            Self::TsrsPlus => "TSRS+",
            Self::TsrsMinus => "TSRS-",
            Self::SrstPlus => "SRST+",
            Self::SrstMinus => "SRST-",
            Self::TsrPlus => "TSR+",
            Self::TsrMinus => "TSR-",
            Self::RstPlus => "RST+",
            Self::RstMinus => "RST-",
        }
    }
}

pub fn mixed_relation_residual(
    s: &BulkSMatrix,
    d: &DefectPair,
    k1: f64,
    k2: f64,
    variant: MixedVariant,
) -> Result<f64> {
    check_dims(s, d)?;
    let plus = ProjectedDefect::new(d.clone(), Side::Plus);
    let minus = ProjectedDefect::new(d.clone(), Side::Minus);
    use MixedVariant::*;
    let (lhs, rhs) = match variant {
        TsrsPlus => (
            // R1+(k1) T2-(k2) = T2-(k2) S12(k1,k2) R2+(k1) S12(k2,-k1)
            prod(&[&plus.r(k1)?.on_leg1(), &minus.t(k2)?.on_leg2()]),
            prod(&[&minus.t(k2)?.on_leg2(), &s.eval(k1, k2)?, &plus.r(k1)?.on_leg2(), &s.eval(k2, -k1)?]),
        ),
        TsrsMinus => (
            // T1+(k1) R2-(k2) = T1+(k1) S12(k1,k2) R1-(k2) S12(-k2,k1)
            prod(&[&plus.t(k1)?.on_leg1(), &minus.r(k2)?.on_leg2()]),
            prod(&[&plus.t(k1)?.on_leg1(), &s.eval(k1, k2)?, &minus.r(k2)?.on_leg1(), &s.eval(-k2, k1)?]),
        ),
        SrstPlus => (
            // R1+(k1) T2+(k2) = S12(k1,k2) R2+(k1) S12(k2,-k1) T2+(k2)
            prod(&[&plus.r(k1)?.on_leg1(), &plus.t(k2)?.on_leg2()]),
            prod(&[&s.eval(k1, k2)?, &plus.r(k1)?.on_leg2(), &s.eval(k2, -k1)?, &plus.t(k2)?.on_leg2()]),
        ),
        SrstMinus => (
            // T1-(k1) R2-(k2) = S12(k1,k2) R1-(k2) S12(-k2,k1) T1-(k1)
            prod(&[&minus.t(k1)?.on_leg1(), &minus.r(k2)?.on_leg2()]),
            prod(&[&s.eval(k1, k2)?, &minus.r(k2)?.on_leg1(), &s.eval(-k2, k1)?, &minus.t(k1)?.on_leg1()]),
        ),
        TsrPlus => (
            // R1+(k1) T2-(k2) S12(-k1,k2) = T2-(k2) S12(k1,k2) R2+(k1)
            prod(&[&plus.r(k1)?.on_leg1(), &minus.t(k2)?.on_leg2(), &s.eval(-k1, k2)?]),
            prod(&[&minus.t(k2)?.on_leg2(), &s.eval(k1, k2)?, &plus.r(k1)?.on_leg2()]),
        ),
        TsrMinus => (
            // T1+(k1) R2-(k2) S12(k1,-k2) = T1+(k1) S12(k1,k2) R1-(k2)
            prod(&[&plus.t(k1)?.on_leg1(), &minus.r(k2)?.on_leg2(), &s.eval(k1, -k2)?]),
            prod(&[&plus.t(k1)?.on_leg1(), &s.eval(k1, k2)?, &minus.r(k2)?.on_leg1()]),
        ),
        RstPlus => (
            // R2+(k1) S12(k2,-k1) T2+(k2) = S12(k2,k1) R1+(k1) T2+(k2)
            prod(&[&plus.r(k1)?.on_leg2(), &s.eval(k2, -k1)?, &plus.t(k2)?.on_leg2()]),
            prod(&[&s.eval(k2, k1)?, &plus.r(k1)?.on_leg1(), &plus.t(k2)?.on_leg2()]),
        ),
        RstMinus => (
            // R1-(k2) S12(-k2,k1) T1-(k1) = S12(k2,k1) T1-(k1) R2-(k2)
            prod(&[&minus.r(k2)?.on_leg1(), &s.eval(-k2, k1)?, &minus.t(k1)?.on_leg1()]),
            prod(&[&s.eval(k2, k1)?, &minus.t(k1)?.on_leg1(), &minus.r(k2)?.on_leg2()]),
        ),
    };
    Ok(diff(&lhs, &rhs))
}

/// Consistency relations between doubled-space `𝓢`, `𝓡`, `𝓣`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ConsistencyVariant {
    Rr1,
    Tt1,
    Tr1,
}

impl ConsistencyVariant {
    pub const ALL: [ConsistencyVariant; 3] = [Self::Rr1, Self::Tt1, Self::Tr1];

    pub fn id(self) -> &'static str {
        match self {
            Self::Rr1 => "rr1",
            Self::Tt1 => "tt1",
            Self::Tr1 => "tr1",
        }
    }
}

/// `cal_rt` carries `𝓡` as its reflection and `𝓣` as its transmission evaluator.
pub fn consistency_relation_residual(
    cal_s: &BulkSMatrix,
    cal_rt: &DefectPair,
    k1: f64,
    k2: f64,
    variant: ConsistencyVariant,
) -> Result<f64> {
    check_dims(cal_s, cal_rt)?;
    let s12 = cal_s.eval(k1, k2)?;
    let (lhs, rhs) = match variant {
        ConsistencyVariant::Rr1 => {
            // S12(k1,k2) R1(k1) S21(k2,-k1) R2(k2) = R2(k2) S12(k1,-k2) R1(k1) S21(-k2,-k1)
            let r1 = cal_rt.r(k1)?.on_leg1();
            let r2 = cal_rt.r(k2)?.on_leg2();
            (
                prod(&[&s12, &r1, &cal_s.eval_21(k2, -k1)?, &r2]),
                prod(&[&r2, &cal_s.eval(k1, -k2)?, &r1, &cal_s.eval_21(-k2, -k1)?]),
            )
        }
        ConsistencyVariant::Tt1 => {
            // S12(k1,k2) T1(k1) S21(k2,k1) T2(k2) = T2(k2) S12(k1,k2) T1(k1) S21(k2,k1)
            let t1 = cal_rt.t(k1)?.on_leg1();
            let t2 = cal_rt.t(k2)?.on_leg2();
            let s21 = cal_s.eval_21(k2, k1)?;
            (prod(&[&s12, &t1, &s21, &t2]), prod(&[&t2, &s12, &t1, &s21]))
        }
        ConsistencyVariant::Tr1 => {
            // S12(k1,k2) R1(k1) S21(k2,-k1) T2(k2) = T2(k2) S12(k1,k2) R1(k1) S21(k2,-k1)
            let r1 = cal_rt.r(k1)?.on_leg1();
            let t2 = cal_rt.t(k2)?.on_leg2();
            let s21 = cal_s.eval_21(k2, -k1)?;
            (prod(&[&s12, &r1, &s21, &t2]), prod(&[&t2, &s12, &r1, &s21]))
        }
    };
    Ok(diff(&lhs, &rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smatrix::{identity_s, permutation_s, rational_s, sample_momenta};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn delta_reference_values() {
        let (t, r) = delta_amplitudes(1.0, 1.0);
        assert!((t - c(0.5, -0.5)).norm() < 1e-15);
        assert!((r - c(-0.5, -0.5)).norm() < 1e-15);
        assert!((t.norm_sqr() + r.norm_sqr() - 1.0).abs() < 1e-15);
        let (t0, r0) = delta_amplitudes(2.0, 0.0);
        assert_eq!((t0, r0), (c(0.0, 0.0), c(-1.0, 0.0)));
        let free = delta_defect(0.0).unwrap();
        for k in [-3.0, -0.1, 0.2, 5.0] {
            assert_eq!(free.t(k).unwrap().get(0, 0), c(1.0, 0.0));
            assert_eq!(free.r(k).unwrap().get(0, 0), c(0.0, 0.0));
        }
    }

    #[test]
    fn delta_rejects_negative_coupling_and_zero_momentum() {
        assert!(delta_defect(-1.0).is_err());
        assert!(delta_defect(f64::NAN).is_err());
        let d = delta_defect(1.0).unwrap();
        assert_eq!(d.r(0.0), Err(Error::ZeroMomentum(0.0)));
        assert!(defect_unitarity_residual(&d, 0.0).is_err());
        assert!(hermitian_analyticity_residual(&d, 0.0).is_err());
    }

    #[test]
    fn delta_probability_conservation_sweep() {
        let sample = sample_momenta(100, 1e-3, 5).unwrap();
        for eta in [0.5, 1.0, 3.0] {
            for &k in &sample.values {
                let (t, r) = delta_amplitudes(eta, k);
                assert!((t.norm_sqr() + r.norm_sqr() - 1.0).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn projections_have_disjoint_supports() {
        let d = delta_defect(1.3).unwrap();
        let p = ProjectedDefect::new(d.clone(), Side::Plus);
        let m = ProjectedDefect::new(d, Side::Minus);
        for k in [-2.0, -0.3, 0.4, 1.7] {
            assert_eq!(&p.r(k).unwrap() * &m.r(k).unwrap(), AuxMatrix::zeros(1));
            assert_eq!(&p.t(k).unwrap() * &m.t(k).unwrap(), AuxMatrix::zeros(1));
        }
        assert_eq!(p.r(-1.0).unwrap(), AuxMatrix::zeros(1));
        assert_eq!(m.t(1.0).unwrap(), AuxMatrix::zeros(1));
        assert!(p.r(0.0).is_err());
    }

    #[test]
    fn pure_defects_are_unitary() {
        for d in [pure_transmission(2), pure_reflection(2)] {
            assert_eq!(defect_unitarity_residual(&d, 0.8).unwrap(), 0.0);
            assert_eq!(hermitian_analyticity_residual(&d, 0.8).unwrap(), 0.0);
        }
    }

    #[test]
    fn scalar_delta_is_not_hermitian() {
        // the undoubled scalar T(k) is complex, so only the doubled form can satisfy Hermitian analyticity
        let d = delta_defect(1.0).unwrap();
        assert!(hermitian_analyticity_residual(&d, 0.7).unwrap() > 0.1);
    }

    #[test]
    fn relations_vanish_for_identity_bulk_and_scalar_defect() {
        let s = identity_s(1);
        let d = delta_defect(1.0).unwrap();
        let sample = sample_momenta(40, 1e-3, 3).unwrap();
        for (k1, k2) in sample.pairs() {
            for xi in [Side::Plus, Side::Minus] {
                assert!(reflection_relation_residual(&s, &d, k1, k2, xi).unwrap() <= 1e-15);
            }
            for v in TransmissionVariant::ALL {
                assert!(transmission_relation_residual(&s, &d, k1, k2, v).unwrap() <= 1e-15);
            }
            for v in MixedVariant::ALL {
                assert!(mixed_relation_residual(&s, &d, k1, k2, v).unwrap() <= 1e-15);
            }
        }
    }

    #[test]
    fn zero_reflection_kills_reflection_relations() {
        let s = rational_s(2, 1.0).unwrap();
        let d = pure_transmission(2);
        for xi in [Side::Plus, Side::Minus] {
            assert_eq!(reflection_relation_residual(&s, &d, 0.4, -1.2, xi).unwrap(), 0.0);
        }
        for v in [MixedVariant::TsrsPlus, MixedVariant::SrstMinus, MixedVariant::TsrPlus, MixedVariant::RstMinus] {
            assert_eq!(mixed_relation_residual(&s, &d, 0.4, -1.2, v).unwrap(), 0.0);
        }
    }

    #[test]
    fn full_transmission_tst_with_unitary_bulk() {
        let s = rational_s(2, 1.0).unwrap();
        let d = pure_transmission(2);
        // k1 > 0 > k2 makes both projections nonzero
        assert!(transmission_relation_residual(&s, &d, 1.1, -0.6, TransmissionVariant::Tst).unwrap() <= 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let s = permutation_s(2);
        let d = delta_defect(1.0).unwrap();
        assert!(matches!(
            reflection_relation_residual(&s, &d, 0.3, 0.5, Side::Plus),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn identity_consistency_with_commuting_scalars() {
        let s = identity_s(1);
        let d = delta_defect(0.8).unwrap();
        for v in ConsistencyVariant::ALL {
            assert!(consistency_relation_residual(&s, &d, 0.3, -1.4, v).unwrap() <= 1e-15);
        }
    }

    #[test]
    fn lift_scalar_and_scaled_reflection() {
        let d = delta_defect(1.0).unwrap();
        let lifted = d.lift_scalar(3).unwrap();
        assert_eq!(lifted.dim(), 3);
        assert_eq!(lifted.r(0.5).unwrap(), AuxMatrix::scalar(3, delta_amplitudes(1.0, 0.5).1));
        let scaled = d.with_scaled_reflection(1.1);
        assert!((scaled.r(0.5).unwrap().get(0, 0) - delta_amplitudes(1.0, 0.5).1 * 1.1).norm() < 1e-15);
        assert!(lifted.lift_scalar(2).is_err());
    }
}
