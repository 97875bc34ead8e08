//! Check identifiers and the verification runner.

use std::fmt;

use rayon::prelude::*;
use rtcheck_core::defect::{
    consistency_relation_residual, defect_unitarity_residual, hermitian_analyticity_residual, mixed_relation_residual,
    reflection_relation_residual, transmission_relation_residual, ConsistencyVariant, DefectPair, MixedVariant, Side,
    TransmissionVariant,
};
use rtcheck_core::doubling::{
    cal_s_diagnostic, reduced_relation_residual, symmetrized_unitarity_residual, CalSOrderReport, DoubledModel,
    ReducedVariant,
};
use rtcheck_core::fock::{
    factorization_residual, hierarchy_commutator_residual, involution_residual, relation_residual,
};
use rtcheck_core::smatrix::{sample_momenta, unitarity_residual, ybe_residual, BulkSMatrix, MomentumSample};

use crate::config::{ConfigError, ModelConfig};
use crate::report::{CalSOrderSummary, CheckResult, Diagnostics, VerificationReport, SCHEMA_VERSION};

/// Largest particle number accepted by `factorization(n)`.
pub const MAX_FACTORIZATION_PARTICLES: u32 = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckId {
    Ybe,
    UnitarityS,
    DefectUnitarity,
    HermitianAnalyticity,
    Reflection(Side),
    Transmission(TransmissionVariant),
    Mixed(MixedVariant),
    Consistency(ConsistencyVariant),
    Reduced(ReducedVariant),
    SymmetrizedUnitarity,
    JSquared,
    HierarchyCommutator(u32, u32),
    HierarchyRelation(u32),
    Factorization(u32),
}

/// Commutator index pairs run by default.
pub const DEFAULT_COMMUTATORS: [(u32, u32); 5] = [(0, 2), (1, 3), (2, 4), (0, 1), (1, 2)];

impl CheckId {
    pub fn parse(s: &str) -> Result<Self, ConfigError> {
        let unknown = || ConfigError::UnknownName { kind: "check", name: s.to_string() };
        let fixed = match s {
            "ybe" => Some(Self::Ybe),
            "unitarity-S" => Some(Self::UnitarityS),
            "defect-unitarity" => Some(Self::DefectUnitarity),
            "hermitian-analyticity" => Some(Self::HermitianAnalyticity),
            "SRSR+" => Some(Self::Reflection(Side::Plus)),
            "SRSR-" => Some(Self::Reflection(Side::Minus)),
            "symmetrized-unitarity" => Some(Self::SymmetrizedUnitarity),
            "J-squared" => Some(Self::JSquared),
            _ => None,
        };
        if let Some(id) = fixed {
            return Ok(id);
        }
        if let Some(v) = TransmissionVariant::ALL.into_iter().find(|v| v.id() == s) {
            return Ok(Self::Transmission(v));
        }
        if let Some(v) = MixedVariant::ALL.into_iter().find(|v| v.id() == s) {
            return Ok(Self::Mixed(v));
        }
        if let Some(v) = ConsistencyVariant::ALL.into_iter().find(|v| v.id() == s) {
            return Ok(Self::Consistency(v));
        }
        if let Some(v) = ReducedVariant::ALL.into_iter().find(|v| v.id() == s) {
            return Ok(Self::Reduced(v));
        }
        let args = |prefix: &str| -> Option<Vec<u32>> {
            let inner = s.strip_prefix(prefix)?.strip_prefix('(')?.strip_suffix(')')?;
            inner.split(',').map(|a| a.trim().parse::<u32>().ok()).collect()
        };
        if let Some(a) = args("hierarchy-commutator") {
            if let [m, n] = a[..] {
                return Ok(Self::HierarchyCommutator(m, n));
            }
        }
        if let Some(a) = args("hierarchy-relation") {
            if let [n] = a[..] {
                return Ok(Self::HierarchyRelation(n));
            }
        }
        if let Some(a) = args("factorization") {
            if let [n] = a[..] {
                if (1..=MAX_FACTORIZATION_PARTICLES).contains(&n) {
                    return Ok(Self::Factorization(n));
                }
            }
        }
        Err(unknown())
    }

    /// Every check applicable to a model; factorization only for trivial bulk scattering.
    pub fn defaults(doubled: bool, identity_bulk: bool) -> Vec<Self> {
        let mut v = vec![
            Self::Ybe,
            Self::UnitarityS,
            Self::DefectUnitarity,
            Self::HermitianAnalyticity,
            Self::Reflection(Side::Plus),
            Self::Reflection(Side::Minus),
        ];
        v.extend(TransmissionVariant::ALL.map(Self::Transmission));
        v.extend(MixedVariant::ALL.map(Self::Mixed));
        v.extend(ConsistencyVariant::ALL.map(Self::Consistency));
        if doubled {
            v.extend(ReducedVariant::ALL.map(Self::Reduced));
            v.push(Self::SymmetrizedUnitarity);
        }
        v.push(Self::JSquared);
        v.extend(DEFAULT_COMMUTATORS.map(|(m, n)| Self::HierarchyCommutator(m, n)));
        v.extend((0..=3).map(Self::HierarchyRelation));
        if identity_bulk {
            v.extend((1..=4).map(Self::Factorization));
        }
        v
    }

    /// Every identifier accepted in `checks`, with parameterized forms shown generically.
    pub fn catalog() -> Vec<String> {
        let mut v: Vec<String> = Self::defaults(true, false)
            .into_iter()
            .filter(|c| !matches!(c, Self::HierarchyCommutator(..) | Self::HierarchyRelation(_)))
            .map(|c| c.to_string())
            .collect();
        v.extend(["hierarchy-commutator(m,n)".into(), "hierarchy-relation(n)".into(), "factorization(n)".into()]);
        v
    }
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Ybe => f.write_str("ybe"),
            Self::UnitarityS => f.write_str("unitarity-S"),
            Self::DefectUnitarity => f.write_str("defect-unitarity"),
            Self::HermitianAnalyticity => f.write_str("hermitian-analyticity"),
            Self::Reflection(side) => write!(f, "SRSR{}", side.symbol()),
            Self::Transmission(v) => f.write_str(v.id()),
            Self::Mixed(v) => f.write_str(v.id()),
            Self::Consistency(v) => f.write_str(v.id()),
            Self::Reduced(v) => f.write_str(v.id()),
            Self::SymmetrizedUnitarity => f.write_str("symmetrized-unitarity"),
            Self::JSquared => f.write_str("J-squared"),
            Self::HierarchyCommutator(m, n) => write!(f, "hierarchy-commutator({m},{n})"),
            Self::HierarchyRelation(n) => write!(f, "hierarchy-relation({n})"),
            Self::Factorization(n) => write!(f, "factorization({n})"),
        }
    }
}

/// Data a check runs against.
struct Subject {
    /// `S` and `{R, T}` entering the three-body relations: the starting data on the
    /// embedding route, the constructed doubled data otherwise.
    s: BulkSMatrix,
    d: DefectPair,
    model: DoubledModel,
}

impl Subject {
    fn new(model: DoubledModel, doubled: bool) -> Self {
        let (s, d) = if doubled {
            (model.cal_s().clone(), model.cal_rt().clone())
        } else {
            (model.provenance().bulk.clone(), model.provenance().bulk_defect.clone())
        };
        Self { s, d, model }
    }
}

/// Sample points per check, derived from one deterministic draw of `3·samples` momenta.
struct Points {
    sample: MomentumSample,
    count: usize,
}

impl Points {
    fn singles(&self) -> Vec<Vec<f64>> {
        self.sample.values.iter().take(self.count).map(|&k| vec![k]).collect()
    }

    fn pairs(&self) -> Vec<Vec<f64>> {
        self.sample.pairs().into_iter().take(self.count).map(|(a, b)| vec![a, b]).collect()
    }

    fn triples(&self) -> Vec<Vec<f64>> {
        self.sample.triples().into_iter().take(self.count).map(|(a, b, c)| vec![a, b, c]).collect()
    }

    /// Sorted incoming momenta followed by outgoing momenta `±kᵢ` in decreasing order;
    /// the sign pattern cycles with the chunk index.
    fn scattering(&self, n: usize) -> Vec<Vec<f64>> {
        self.sample
            .values
            .chunks_exact(n)
            .take(self.count)
            .enumerate()
            .map(|(idx, chunk)| {
                let mut k = chunk.to_vec();
                k.sort_by(f64::total_cmp);
                let pattern = idx % (1 << n);
                let mut p: Vec<f64> =
                    k.iter().enumerate().map(|(i, &x)| if pattern >> i & 1 == 1 { -x } else { x }).collect();
                p.sort_by(|a, b| b.total_cmp(a));
                k.extend(p);
                k
            })
            .collect()
    }
}

type Residual = rtcheck_core::Result<f64>;
type Evaluator<'a> = Box<dyn Fn(&[f64]) -> Residual + 'a>;

fn evaluate(id: CheckId, sub: &Subject, pts: &Points, tol: f64) -> CheckResult {
    let (points, f): (Vec<Vec<f64>>, Evaluator<'_>) = match id {
        CheckId::Ybe => (pts.triples(), Box::new(|x| ybe_residual(&sub.s, x[0], x[1], x[2]))),
        CheckId::UnitarityS => (pts.pairs(), Box::new(|x| unitarity_residual(&sub.s, x[0], x[1]))),
        CheckId::DefectUnitarity => (pts.singles(), Box::new(|x| defect_unitarity_residual(sub.model.cal_rt(), x[0]))),
        CheckId::HermitianAnalyticity => {
            (pts.singles(), Box::new(|x| hermitian_analyticity_residual(sub.model.cal_rt(), x[0])))
        }
        CheckId::Reflection(side) => {
            (pts.pairs(), Box::new(move |x| reflection_relation_residual(&sub.s, &sub.d, x[0], x[1], side)))
        }
        CheckId::Transmission(v) => {
            (pts.pairs(), Box::new(move |x| transmission_relation_residual(&sub.s, &sub.d, x[0], x[1], v)))
        }
        CheckId::Mixed(v) => (pts.pairs(), Box::new(move |x| mixed_relation_residual(&sub.s, &sub.d, x[0], x[1], v))),
        CheckId::Consistency(v) => (
            pts.pairs(),
            Box::new(move |x| consistency_relation_residual(sub.model.cal_s(), sub.model.cal_rt(), x[0], x[1], v)),
        ),
        CheckId::Reduced(v) => {
            let prov = sub.model.provenance();
            (pts.pairs(), Box::new(move |x| reduced_relation_residual(&prov.bulk, &prov.bulk_defect, x[0], x[1], v)))
        }
        CheckId::SymmetrizedUnitarity => {
            (pts.singles(), Box::new(|x| symmetrized_unitarity_residual(&sub.model.provenance().bulk_defect, x[0])))
        }
        CheckId::JSquared => (pts.singles(), Box::new(|x| involution_residual(&sub.model, x[0]))),
        CheckId::HierarchyCommutator(m, n) => {
            (pts.singles(), Box::new(move |x| hierarchy_commutator_residual(m, n, &sub.model, x[0])))
        }
        CheckId::HierarchyRelation(n) => (pts.singles(), Box::new(move |x| relation_residual(n, &sub.model, x[0]))),
        CheckId::Factorization(n) => {
            let n = n as usize;
            (pts.scattering(n), Box::new(move |x| factorization_residual(n, &x[..n], &x[n..], &sub.model)))
        }
    };
    let mut result = CheckResult {
        id: id.to_string(),
        max_residual: None,
        worst_momenta: Vec::new(),
        samples: points.len(),
        pass: false,
        error: None,
    };
    let mut worst = f64::NEG_INFINITY;
    for x in &points {
        match f(x) {
            Ok(r) if r.is_finite() => {
                if r > worst {
                    worst = r;
                    result.worst_momenta = x.clone();
                }
            }
            Ok(r) => {
                result.error = Some(format!("non-finite residual {r} at {x:?}"));
                result.worst_momenta = x.clone();
                return result;
            }
            Err(e) => {
                result.error = Some(format!("{e} at {x:?}"));
                result.worst_momenta = x.clone();
                return result;
            }
        }
    }
    if points.is_empty() {
        result.error = Some("no sample points available".into());
        return result;
    }
    result.max_residual = Some(worst);
    result.pass = worst <= tol;
    result
}

fn summarize(r: &CalSOrderReport, tol: f64) -> CalSOrderSummary {
    CalSOrderSummary { ybe: r.ybe, unitarity: r.unitarity, rr1: r.rr1, tt1: r.tt1, tr1: r.tr1, pass: r.passes(tol) }
}

/// Runs every requested check; failures are recorded, never aborted on.
pub fn run_suite(config: &ModelConfig) -> Result<VerificationReport, ConfigError> {
    config.validate()?;
    let ids = config.check_ids()?;
    let model = config.build()?;
    let sample = sample_momenta(3 * config.samples, config.exclusion_radius, config.seed)?;
    let pts = Points { sample, count: config.samples };
    let sub = Subject::new(model, config.doubled);
    let tol = config.tolerance;

    let checks: Vec<CheckResult> = ids.par_iter().map(|&id| evaluate(id, &sub, &pts, tol)).collect();

    let diagnostics = if config.doubled {
        None
    } else {
        let prov = sub.model.provenance();
        cal_s_diagnostic(&prov.bulk, &prov.bulk_defect, &pts.sample.values).ok().map(|d| Diagnostics {
            cal_s_selected: config.cal_s_order,
            cal_s_printed: summarize(&d.printed, tol),
            cal_s_uncrossed: summarize(&d.uncrossed, tol),
        })
    };

    Ok(VerificationReport {
        schema: SCHEMA_VERSION.to_string(),
        toolkit_version: env!("CARGO_PKG_VERSION").to_string(),
        pass: checks.iter().all(|c| c.pass),
        tolerance: tol,
        config: config.clone(),
        diagnostics,
        checks,
    })
}
