//! Normal ordering of creation/annihilation words in the central Fock representation.
//!
//! Exchange rule for an annihilator `a_α(q)` standing left of a creator `a†^β(p)`:
//!
//! ```text
//! a_α(q) a†^β(p) = Σ_{γδ} 𝓢[(α,γ),(δ,β)](q,p) a†^γ(p) a_δ(q)
//!                 + δ(q − p)·(I + 𝓣(q))[α,β] + δ(q + p)·𝓡(q)[α,β]
//! ```
//!
//! δ-functions are bare here; callers that want the 2π-per-contraction convention
//! use [`AmplitudeExpression::with_two_pi`].

use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use num_complex::Complex64 as C64;

use super::expression::{AmplitudeExpression, Coefficient, Contraction, ContractionTerm, Substitution};
use crate::doubling::DoubledModel;
use crate::error::{Error, Result};
use crate::tensor::AuxMatrix;

/// Largest particle number the engine accepts.
pub const MAX_PARTICLES: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OpKind {
    Creator,
    Annihilator,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Symbol {
    pub kind: OpKind,
    pub label: String,
    /// Flattened doubled index, if fixed in the word.
    pub component: Option<usize>,
}

/// Ordered product of generators; the VEV `⟨Ω, word Ω⟩` is what the engine computes.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GeneratorWord {
    symbols: Vec<Symbol>,
}

impl GeneratorWord {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn annihilator(mut self, label: impl Into<String>) -> Self {
        self.symbols.push(Symbol { kind: OpKind::Annihilator, label: label.into(), component: None });
        self
    }

    pub fn creator(mut self, label: impl Into<String>) -> Self {
        self.symbols.push(Symbol { kind: OpKind::Creator, label: label.into(), component: None });
        self
    }

    /// Fixes the component of the most recently pushed symbol.
    pub fn with_component(mut self, index: usize) -> Self {
        if let Some(s) = self.symbols.last_mut() {
            s.component = Some(index);
        }
        self
    }

    /// `a(p_n)…a(p_1) a†(k_1)…a†(k_n)` with labels `p1…pn`, `k1…kn`.
    pub fn amplitude(n: usize) -> Self {
        let mut w = Self::new();
        for j in (1..=n).rev() {
            w = w.annihilator(format!("p{j}"));
        }
        for i in 1..=n {
            w = w.creator(format!("k{i}"));
        }
        w
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    fn count(&self, kind: OpKind) -> usize {
        self.symbols.iter().filter(|s| s.kind == kind).count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Step {
    /// Exchange the annihilator at `pos` with the creator at `pos + 1`.
    Braid(usize),
    /// Contract the adjacent pair at `pos` with the given δ sign.
    Contract(usize, i8),
}

/// One recorded route from the input word to the vacuum.
#[derive(Clone, Debug)]
pub struct EnginePath {
    model: DoubledModel,
    word: Vec<Symbol>,
    steps: Vec<Step>,
}

impl EnginePath {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Replays the path on sparse component assignments of the current word.
    pub fn evaluate(&self, subst: &Substitution) -> Result<C64> {
        let d = self.model.doubled_dim();
        let mut labels: Vec<&str> = self.word.iter().map(|s| s.label.as_str()).collect();
        let mut init = Vec::with_capacity(self.word.len());
        for s in &self.word {
            let idx = match s.component.or_else(|| subst.components.get(&s.label).copied()) {
                Some(i) => i,
                None => return Err(Error::MissingComponent(s.label.clone())),
            };
            if idx >= d {
                return Err(Error::ComponentOutOfRange { index: idx, dim: d });
            }
            init.push(idx as u16);
        }
        // BTreeMap keeps the summation order, and hence the rounding, reproducible
        let mut state: BTreeMap<Vec<u16>, C64> = BTreeMap::new();
        state.insert(init, C64::new(1.0, 0.0));
        for &step in &self.steps {
            let mut next: BTreeMap<Vec<u16>, C64> = BTreeMap::new();
            match step {
                Step::Braid(i) => {
                    let q = subst.momentum_of(labels[i])?;
                    let p = subst.momentum_of(labels[i + 1])?;
                    let s = self.model.cal_s().eval(q, p)?;
                    for (idx, amp) in &state {
                        let (alpha, beta) = (idx[i] as usize, idx[i + 1] as usize);
                        for gamma in 0..d {
                            for delta in 0..d {
                                let w = s.get(alpha * d + gamma, delta * d + beta);
                                if w == C64::new(0.0, 0.0) {
                                    continue;
                                }
                                let mut key = idx.clone();
                                key[i] = gamma as u16;
                                key[i + 1] = delta as u16;
                                *next.entry(key).or_default() += amp * w;
                            }
                        }
                    }
                    labels.swap(i, i + 1);
                }
                Step::Contract(i, sign) => {
                    let q = subst.momentum_of(labels[i])?;
                    let m =
                        if sign > 0 { &AuxMatrix::identity(d) + &self.model.cal_t(q)? } else { self.model.cal_r(q)? };
                    for (idx, amp) in &state {
                        let w = m.get(idx[i] as usize, idx[i + 1] as usize);
                        if w == C64::new(0.0, 0.0) {
                            continue;
                        }
                        let mut key = idx.clone();
                        key.drain(i..i + 2);
                        *next.entry(key).or_default() += amp * w;
                    }
                    labels.drain(i..i + 2);
                }
            }
            state = next;
        }
        Ok(state.get(&Vec::new()).copied().unwrap_or_default())
    }
}

struct Frame {
    word: Vec<usize>,
    steps: Vec<Step>,
    pairing: Vec<Contraction>,
}

/// Expands `⟨Ω, word Ω⟩` into a sum over decorated matchings.
pub fn normal_order_vev(word: &GeneratorWord, model: &DoubledModel) -> Result<AmplitudeExpression> {
    let symbols = word.symbols();
    let d = model.doubled_dim();
    let mut seen = HashSet::new();
    for s in symbols {
        if s.label.is_empty() {
            return Err(Error::UnknownLabel(String::new()));
        }
        if !seen.insert(s.label.as_str()) {
            return Err(Error::DuplicateLabel(s.label.clone()));
        }
        if let Some(c) = s.component {
            if c >= d {
                return Err(Error::ComponentOutOfRange { index: c, dim: d });
            }
        }
    }
    let n_cre = word.count(OpKind::Creator);
    let n_ann = word.count(OpKind::Annihilator);
    if n_cre != n_ann {
        return Ok(AmplitudeExpression::zero(d, n_cre.max(n_ann)));
    }
    if n_cre > MAX_PARTICLES {
        return Err(Error::TooManyParticles { requested: n_cre, max: MAX_PARTICLES });
    }

    let mut terms = Vec::new();
    let mut stack = vec![Frame { word: (0..symbols.len()).collect(), steps: Vec::new(), pairing: Vec::new() }];
    while let Some(frame) = stack.pop() {
        let w = &frame.word;
        if w.is_empty() {
            let coefficient = if frame.steps.is_empty() {
                Coefficient::One
            } else {
                Coefficient::Path(Arc::new(EnginePath {
                    model: model.clone(),
                    word: symbols.to_vec(),
                    steps: frame.steps,
                }))
            };
            terms.push(ContractionTerm { pairing: frame.pairing, coefficient, delta_normalization: 0 });
            continue;
        }
        // a creator against the bra or an annihilator against the ket can never be removed
        if symbols[w[0]].kind == OpKind::Creator || symbols[*w.last().unwrap()].kind == OpKind::Annihilator {
            continue;
        }
        let Some(i) = (0..w.len() - 1)
            .find(|&i| symbols[w[i]].kind == OpKind::Annihilator && symbols[w[i + 1]].kind == OpKind::Creator)
        else {
            continue;
        };
        let (ann, cre) = (&symbols[w[i]].label, &symbols[w[i + 1]].label);
        for sign in [1i8, -1] {
            let mut word = w.clone();
            word.drain(i..i + 2);
            let mut steps = frame.steps.clone();
            steps.push(Step::Contract(i, sign));
            let mut pairing = frame.pairing.clone();
            pairing.push(Contraction::new(ann.clone(), cre.clone(), sign));
            stack.push(Frame { word, steps, pairing });
        }
        let mut word = w.clone();
        word.swap(i, i + 1);
        let mut steps = frame.steps;
        steps.push(Step::Braid(i));
        stack.push(Frame { word, steps, pairing: frame.pairing });
    }
    Ok(AmplitudeExpression::from_terms(d, n_cre, terms).canonicalize())
}
