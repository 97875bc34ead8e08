//! Doubled auxiliary space `C^{2N}` with index `α = (ξ, i)`.
//!
//! Flattening: `α ↦ ξ·N + i` with the `ξ = +` block first. Doubled matrices are
//! indexed `M[α, β]` with the lower (annihilator-side) index as row.

use std::fmt;

use num_complex::Complex64 as C64;

use crate::defect::{
    consistency_relation_residual, defect_unitarity_residual, hermitian_analyticity_residual, ConsistencyVariant,
    DefectPair, Side,
};
use crate::error::{Error, Result};
use crate::smatrix::{unitarity_residual, ybe_residual, BulkSMatrix};
use crate::tensor::{swap_legs, AuxMatrix, TwoLegOperator};

/// Doubled index `(ξ, i)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HalfLineIndex {
    pub xi: Side,
    pub iso: usize,
}

impl HalfLineIndex {
    pub fn new(xi: Side, iso: usize) -> Self {
        Self { xi, iso }
    }

    pub fn offset(self, n: usize) -> Result<usize> {
        if self.iso >= n {
            return Err(Error::ComponentOutOfRange { index: self.iso, dim: n });
        }
        Ok(match self.xi {
            Side::Plus => self.iso,
            Side::Minus => n + self.iso,
        })
    }

    pub fn from_offset(offset: usize, n: usize) -> Result<Self> {
        if offset >= 2 * n {
            return Err(Error::ComponentOutOfRange { index: offset, dim: 2 * n });
        }
        Ok(if offset < n { Self::new(Side::Plus, offset) } else { Self::new(Side::Minus, offset - n) })
    }
}

fn split(alpha: usize, n: usize) -> (Side, usize) {
    if alpha < n {
        (Side::Plus, alpha)
    } else {
        (Side::Minus, alpha - n)
    }
}

/// Index order used when lifting a bulk S to the doubled space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CalSOrder {
    /// `δ^{η2}_{ξ1} δ^{η1}_{ξ2} S^{j2 j1}_{i1 i2}`, exactly as printed.
    Printed,
    /// `δ^{η1}_{ξ1} δ^{η2}_{ξ2} S^{j1 j2}_{i1 i2}`: ξ labels are spectators.
    Uncrossed,
}

/// Lifts `S` on C^N⊗C^N to `𝓢` on C^{2N}⊗C^{2N}.
pub fn embed_cal_s(s: &BulkSMatrix, order: CalSOrder) -> BulkSMatrix {
    let n = s.leg_dim();
    let d = 2 * n;
    let inner = s.clone();
    let name = format!("calS[{order:?}]({})", s.name());
    BulkSMatrix::new(name, d, s.translation_invariant(), move |k1, k2| {
        let sm = inner.eval(k1, k2).expect("pole excluded by predicate");
        TwoLegOperator::from_fn(d, |r, c| {
            let ((x1, i1), (x2, i2)) = (split(r / d, n), split(r % d, n));
            let ((e1, j1), (e2, j2)) = (split(c / d, n), split(c % d, n));
            match order {
                CalSOrder::Printed if x1 == e2 && x2 == e1 => sm.get(i1 * n + i2, j2 * n + j1),
                CalSOrder::Uncrossed if x1 == e1 && x2 == e2 => sm.get(i1 * n + i2, j1 * n + j2),
                _ => C64::new(0.0, 0.0),
            }
        })
    })
    .with_pole_predicate({
        let s = s.clone();
        move |k1, k2| s.is_pole(k1, k2)
    })
}

/// `diag(ρ(k), ρ(−k))` and `antidiag(τ(k), τ(−k))` from `N×N` data.
fn reflected_blocks(d: &DefectPair, name: String) -> DefectPair {
    let n = d.dim();
    let (dr, dt) = (d.clone(), d.clone());
    DefectPair::new(
        name,
        2 * n,
        move |k| {
            let z = AuxMatrix::zeros(n);
            AuxMatrix::from_blocks(&dr.r(k).unwrap(), &z, &z, &dr.r(-k).unwrap()).unwrap()
        },
        move |k| {
            let z = AuxMatrix::zeros(n);
            AuxMatrix::from_blocks(&z, &dt.t(k).unwrap(), &dt.t(-k).unwrap(), &z).unwrap()
        },
    )
}

/// `(𝓡, 𝓣)` on the doubled space, lower blocks evaluated at `−k`.
///
/// This reproduces the 2×2 δ-model matrices, whose lower entries are the
/// conjugates `T̄(k) = T(−k)` and `R̄(k) = R(−k)`.
pub fn embed_cal_rt(d: &DefectPair) -> DefectPair {
    reflected_blocks(d, format!("calRT({})", d.name()))
}

/// `(𝓡, 𝓣)` with every block evaluated at the same `k`, i.e. the index formula read literally.
pub fn embed_cal_rt_printed(d: &DefectPair) -> DefectPair {
    let n = d.dim();
    let (dr, dt) = (d.clone(), d.clone());
    DefectPair::new(
        format!("calRT[Printed]({})", d.name()),
        2 * n,
        move |k| {
            let r = dr.r(k).unwrap();
            let z = AuxMatrix::zeros(n);
            AuxMatrix::from_blocks(&r, &z, &z, &r).unwrap()
        },
        move |k| {
            let t = dt.t(k).unwrap();
            let z = AuxMatrix::zeros(n);
            AuxMatrix::from_blocks(&z, &t, &t, &z).unwrap()
        },
    )
}

/// Momentum arguments of the `(ξ1, ξ2)` sector block of the doubled S-matrix.
///
/// Sector `(ξ1, ξ2)` carries `s(ξ1·k1, ξ2·k2)`; for translation-invariant `s` this is
/// `s(k1−k2)`, `s(k1+k2)`, `s(−k1−k2)`, `s(k2−k1)` for `++`, `+−`, `−+`, `−−`.
pub fn sector_momenta(xi1: Side, xi2: Side, k1: f64, k2: f64) -> (f64, f64) {
    (xi1.sign() * k1, xi2.sign() * k2)
}

/// Block-diagonal doubled S-matrix built from a bulk `s`.
pub fn double_s_bulk(s: &BulkSMatrix, allow_non_translation_invariant: bool) -> Result<BulkSMatrix> {
    if !s.translation_invariant() && !allow_non_translation_invariant {
        return Err(Error::NotTranslationInvariant(s.name().to_string()));
    }
    let n = s.leg_dim();
    let d = 2 * n;
    let inner = s.clone();
    let pole_src = s.clone();
    let sides = [Side::Plus, Side::Minus];
    Ok(BulkSMatrix::new(format!("doubled({})", s.name()), d, false, move |k1, k2| {
        let mut blocks = Vec::with_capacity(4);
        for x1 in sides {
            for x2 in sides {
                let (a, b) = sector_momenta(x1, x2, k1, k2);
                blocks.push(((x1, x2), inner.eval(a, b).expect("pole excluded by predicate")));
            }
        }
        TwoLegOperator::from_fn(d, |r, c| {
            let ((x1, i1), (x2, i2)) = (split(r / d, n), split(r % d, n));
            let ((e1, j1), (e2, j2)) = (split(c / d, n), split(c % d, n));
            if x1 != e1 || x2 != e2 {
                return C64::new(0.0, 0.0);
            }
            let blk = &blocks.iter().find(|(key, _)| *key == (x1, x2)).unwrap().1;
            blk.get(i1 * n + i2, j1 * n + j2)
        })
    })
    .with_pole_predicate(move |k1, k2| {
        sides.iter().any(|&x1| {
            sides.iter().any(|&x2| {
                let (a, b) = sector_momenta(x1, x2, k1, k2);
                pole_src.is_pole(a, b)
            })
        })
    }))
}

/// `t = antidiag(τ(k), τ(−k))`, `r = diag(ρ(k), ρ(−k))`; τ and ρ are read from the
/// transmission and reflection evaluators of `tau_rho`.
pub fn double_defect(tau_rho: &DefectPair) -> DefectPair {
    reflected_blocks(tau_rho, format!("doubled({})", tau_rho.name()))
}

/// The three relations for `(τ, ρ)` that follow from the doubled construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ReducedVariant {
    TauTau,
    TauRho,
    RhoRho,
}

impl ReducedVariant {
    pub const ALL: [ReducedVariant; 3] = [Self::TauTau, Self::TauRho, Self::RhoRho];

    pub fn id(self) -> &'static str {
        match self {
            Self::TauTau => "reduced-tau-tau",
            Self::TauRho => "reduced-tau-rho",
            Self::RhoRho => "reduced-rho-rho",
        }
    }
}

/// Literal residual of the reduced relation, with `s₁₂(u) = s(u, 0)` and `s₂₁(u) = P·s(u)·P`.
pub fn reduced_relation_residual(
    s: &BulkSMatrix,
    tau_rho: &DefectPair,
    k1: f64,
    k2: f64,
    variant: ReducedVariant,
) -> Result<f64> {
    if s.leg_dim() != tau_rho.dim() {
        return Err(Error::DimensionMismatch { expected: s.leg_dim(), found: tau_rho.dim() });
    }
    let s12 = |u: f64| s.eval(u, 0.0);
    let s21 = |u: f64| s.eval(u, 0.0).map(|m| swap_legs(&m));
    let tau1 = tau_rho.t(k1)?.on_leg1();
    let tau2 = tau_rho.t(k2)?.on_leg2();
    let rho1 = tau_rho.r(k1)?.on_leg1();
    let rho2 = tau_rho.r(k2)?.on_leg2();
    let chain = |ops: &[&TwoLegOperator]| {
        let mut acc = ops[0].clone();
        for op in &ops[1..] {
            acc = &acc * op;
        }
        acc
    };
    let (lhs, rhs) = match variant {
        ReducedVariant::TauTau => (
            chain(&[&s12(k1 - k2)?, &tau1, &s21(k2 - k1)?, &tau2]),
            chain(&[&tau2, &s12(k1 - k2)?, &tau1, &s21(k2 - k1)?]),
        ),
        ReducedVariant::TauRho => (
            chain(&[&s12(k1 - k2)?, &tau1, &s21(k2 - k1)?, &rho2]),
            chain(&[&rho2, &s12(k1 + k2)?, &tau1, &s21(-k2 - k1)?]),
        ),
        ReducedVariant::RhoRho => (
            chain(&[&s12(k1 - k2)?, &rho1, &s21(k2 + k1)?, &rho2]),
            chain(&[&rho2, &s12(k1 + k2)?, &rho1, &s21(k1 - k2)?]),
        ),
    };
    Ok((&lhs - &rhs).norm_inf())
}

/// `‖τ(k)τ(−k) + ρ(k)ρ(−k) − I‖∞ + ‖τ(k)ρ(−k) + ρ(k)τ(−k)‖∞`.
pub fn symmetrized_unitarity_residual(tau_rho: &DefectPair, k: f64) -> Result<f64> {
    let (tau, taum, rho, rhom) = (tau_rho.t(k)?, tau_rho.t(-k)?, tau_rho.r(k)?, tau_rho.r(-k)?);
    let first = &(&(&tau * &taum) + &(&rho * &rhom)) - &AuxMatrix::identity(tau_rho.dim());
    let second = &(&tau * &rhom) + &(&rho * &taum);
    Ok(first.norm_inf() + second.norm_inf())
}

/// `U(k) = [[𝓣(k), 𝓡(k)], [𝓡(−k), 𝓣(−k)]]` acting on the `(k, −k)` doublet.
pub fn involution_matrix(cal_rt: &DefectPair, k: f64) -> Result<AuxMatrix> {
    AuxMatrix::from_blocks(&cal_rt.t(k)?, &cal_rt.r(k)?, &cal_rt.r(-k)?, &cal_rt.t(-k)?)
}

/// How a doubled model was assembled.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    /// `𝓢 = calS(S)`, `(𝓡, 𝓣) = calRT(R, T)`.
    Embedding(CalSOrder),
    /// Block-diagonal doubled `s`, `(t, r)` from `(τ, ρ)`.
    Impurity,
}

/// Inputs a model was built from.
#[derive(Clone, Debug)]
pub struct Provenance {
    pub route: Route,
    pub bulk: BulkSMatrix,
    /// `(R, T)` for the embedding route, `(ρ, τ)` for the impurity route.
    pub bulk_defect: DefectPair,
}

/// `𝓢`, `𝓡`, `𝓣` on the doubled space plus the undoubled inputs.
#[derive(Clone)]
pub struct DoubledModel {
    bulk_dim: usize,
    cal_s: BulkSMatrix,
    cal_rt: DefectPair,
    provenance: Provenance,
}

impl fmt::Debug for DoubledModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DoubledModel")
            .field("bulk_dim", &self.bulk_dim)
            .field("cal_s", &self.cal_s.name())
            .field("cal_rt", &self.cal_rt.name())
            .field("route", &self.provenance.route)
            .finish()
    }
}

impl DoubledModel {
    /// Lifts undoubled `{S, R, T}` through `calS`/`calRT`.
    pub fn from_embedding(s: &BulkSMatrix, defect: &DefectPair, order: CalSOrder) -> Result<Self> {
        if s.leg_dim() != defect.dim() {
            return Err(Error::DimensionMismatch { expected: s.leg_dim(), found: defect.dim() });
        }
        Ok(Self {
            bulk_dim: s.leg_dim(),
            cal_s: embed_cal_s(s, order),
            cal_rt: embed_cal_rt(defect),
            provenance: Provenance { route: Route::Embedding(order), bulk: s.clone(), bulk_defect: defect.clone() },
        })
    }

    /// Doubles a bulk `s` and a `(τ, ρ)` pair.
    pub fn from_impurity(s: &BulkSMatrix, tau_rho: &DefectPair, allow_non_translation_invariant: bool) -> Result<Self> {
        if s.leg_dim() != tau_rho.dim() {
            return Err(Error::DimensionMismatch { expected: s.leg_dim(), found: tau_rho.dim() });
        }
        Ok(Self {
            bulk_dim: s.leg_dim(),
            cal_s: double_s_bulk(s, allow_non_translation_invariant)?,
            cal_rt: double_defect(tau_rho),
            provenance: Provenance { route: Route::Impurity, bulk: s.clone(), bulk_defect: tau_rho.clone() },
        })
    }

    /// Same `𝓢` with `𝓡 = 𝓣 = 0`.
    pub fn without_impurity(&self) -> Self {
        let d = self.doubled_dim();
        let mut out = self.clone();
        out.cal_rt = DefectPair::new("no-impurity", d, move |_| AuxMatrix::zeros(d), move |_| AuxMatrix::zeros(d));
        out
    }

    /// Same model with the doubled reflection multiplied by `factor`.
    pub fn with_scaled_reflection(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.cal_rt = self.cal_rt.with_scaled_reflection(factor);
        out.provenance.bulk_defect = self.provenance.bulk_defect.with_scaled_reflection(factor);
        out
    }

    pub fn bulk_dim(&self) -> usize {
        self.bulk_dim
    }

    pub fn doubled_dim(&self) -> usize {
        2 * self.bulk_dim
    }

    pub fn cal_s(&self) -> &BulkSMatrix {
        &self.cal_s
    }

    pub fn cal_rt(&self) -> &DefectPair {
        &self.cal_rt
    }

    pub fn cal_r(&self, k: f64) -> Result<AuxMatrix> {
        self.cal_rt.r(k)
    }

    pub fn cal_t(&self, k: f64) -> Result<AuxMatrix> {
        self.cal_rt.t(k)
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }
}

/// Worst residuals of one `calS` index order over a sample.
#[derive(Clone, Debug, PartialEq)]
pub struct CalSOrderReport {
    pub order: CalSOrder,
    pub ybe: f64,
    pub unitarity: f64,
    pub rr1: f64,
    pub tt1: f64,
    pub tr1: f64,
}

impl CalSOrderReport {
    pub fn passes(&self, tol: f64) -> bool {
        [self.ybe, self.unitarity, self.rr1, self.tt1, self.tr1].iter().all(|&r| r <= tol)
    }
}

/// Compares the printed and uncrossed `calS` orders on the same data.
#[derive(Clone, Debug, PartialEq)]
pub struct CalSDiagnostic {
    pub printed: CalSOrderReport,
    pub uncrossed: CalSOrderReport,
}

/// Runs both `calS` orders against `calRT(R, T)` on the given momenta (used in consecutive triples).
pub fn cal_s_diagnostic(s: &BulkSMatrix, defect: &DefectPair, momenta: &[f64]) -> Result<CalSDiagnostic> {
    let cal_rt = embed_cal_rt(defect);
    let run = |order: CalSOrder| -> Result<CalSOrderReport> {
        let cs = embed_cal_s(s, order);
        let mut rep = CalSOrderReport { order, ybe: 0.0, unitarity: 0.0, rr1: 0.0, tt1: 0.0, tr1: 0.0 };
        for w in momenta.chunks_exact(3) {
            let (a, b, c) = (w[0], w[1], w[2]);
            rep.ybe = rep.ybe.max(ybe_residual(&cs, a, b, c)?);
            rep.unitarity = rep.unitarity.max(unitarity_residual(&cs, a, b)?);
            rep.rr1 = rep.rr1.max(consistency_relation_residual(&cs, &cal_rt, a, b, ConsistencyVariant::Rr1)?);
            rep.tt1 = rep.tt1.max(consistency_relation_residual(&cs, &cal_rt, a, b, ConsistencyVariant::Tt1)?);
            rep.tr1 = rep.tr1.max(consistency_relation_residual(&cs, &cal_rt, a, b, ConsistencyVariant::Tr1)?);
        }
        Ok(rep)
    };
    Ok(CalSDiagnostic { printed: run(CalSOrder::Printed)?, uncrossed: run(CalSOrder::Uncrossed)? })
}

/// Unitarity and Hermitian analyticity of the doubled `(𝓡, 𝓣)` at `k`.
pub fn doubled_defect_residuals(model: &DoubledModel, k: f64) -> Result<(f64, f64)> {
    Ok((defect_unitarity_residual(model.cal_rt(), k)?, hermitian_analyticity_residual(model.cal_rt(), k)?))
}
