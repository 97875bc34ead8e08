//! Physical in/out amplitudes and their factorization into one-particle kernels.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use super::engine::{normal_order_vev, GeneratorWord};
use super::expression::{AmplitudeExpression, Contraction, Substitution, PAIRING_TOLERANCE};
use super::kernel::OneParticleKernel;
use crate::defect::{ProjectedDefect, Side};
use crate::doubling::{DoubledModel, HalfLineIndex};
use crate::error::{Error, Result};
use crate::tensor::AuxMatrix;

/// `⟨p|k⟩ = A(p)δ(p − k) + B(p)δ(p + k)` with `A(p) = θ(p)T(p) + θ(−p)T(−p)`
/// and `B(p) = θ(p)R(p) + θ(−p)R(−p)`, on the undoubled space.
pub fn one_particle_amplitude(model: &DoubledModel, two_pi: bool) -> OneParticleKernel {
    let plus = ProjectedDefect::new(model.provenance().bulk_defect.clone(), Side::Plus);
    let factor = C64::new(if two_pi { 2.0 * PI } else { 1.0 }, 0.0);
    let pb = plus.clone();
    OneParticleKernel::new(
        model.bulk_dim(),
        move |p| Ok((&plus.t(p)? + &plus.t(-p)?).scale(factor)),
        move |p| Ok((&pb.r(p)? + &pb.r(-p)?).scale(factor)),
    )
}

/// Doubled index of an incoming particle: `ξ = −ε(k)`.
pub fn in_component(k: f64, iso: usize, bulk_dim: usize) -> Result<usize> {
    HalfLineIndex::new(Side::of(k)?.flip(), iso).offset(bulk_dim)
}

/// Doubled index of an outgoing particle: `ε = ε(p)`.
pub fn out_component(p: f64, iso: usize, bulk_dim: usize) -> Result<usize> {
    HalfLineIndex::new(Side::of(p)?, iso).offset(bulk_dim)
}

/// True when `k₁ < … < kₙ` and `p₁ > … > pₙ` with no zero momenta.
pub fn is_physical_ordering(in_momenta: &[f64], out_momenta: &[f64]) -> bool {
    check_ordering(in_momenta, out_momenta).is_ok()
}

pub fn check_ordering(in_momenta: &[f64], out_momenta: &[f64]) -> Result<()> {
    if in_momenta.len() != out_momenta.len() {
        return Err(Error::DimensionMismatch { expected: in_momenta.len(), found: out_momenta.len() });
    }
    if let Some(&z) = in_momenta.iter().chain(out_momenta).find(|k| **k == 0.0 || !k.is_finite()) {
        return Err(Error::ZeroMomentum(z));
    }
    if !in_momenta.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::Ordering(format!("incoming momenta must increase: {in_momenta:?}")));
    }
    if !out_momenta.windows(2).all(|w| w[0] > w[1]) {
        return Err(Error::Ordering(format!("outgoing momenta must decrease: {out_momenta:?}")));
    }
    Ok(())
}

/// Momentum substitution for the labels of [`GeneratorWord::amplitude`].
pub fn amplitude_substitution(in_momenta: &[f64], out_momenta: &[f64]) -> Substitution {
    let mut s = Substitution::new();
    for (i, &k) in in_momenta.iter().enumerate() {
        s = s.momentum(format!("k{}", i + 1), k);
    }
    for (j, &p) in out_momenta.iter().enumerate() {
        s = s.momentum(format!("p{}", j + 1), p);
    }
    s
}

/// The unique pairing with support at the given momenta: each `p_j` is matched
/// with the `k_i` satisfying `p_j = ±k_i`.
pub fn matched_pairing(in_momenta: &[f64], out_momenta: &[f64]) -> Result<Vec<Contraction>> {
    let close = |a: f64, b: f64| (a - b).abs() <= PAIRING_TOLERANCE * a.abs().max(b.abs()).max(1.0);
    let mut used = vec![false; in_momenta.len()];
    let mut pairing = Vec::with_capacity(out_momenta.len());
    for (j, &p) in out_momenta.iter().enumerate() {
        let mut hits = Vec::new();
        for (i, &k) in in_momenta.iter().enumerate() {
            for sign in [1i8, -1] {
                if close(p, f64::from(sign) * k) {
                    hits.push((i, sign));
                }
            }
        }
        match hits.as_slice() {
            [(i, sign)] if !used[*i] => {
                used[*i] = true;
                pairing.push(Contraction::new(format!("p{}", j + 1), format!("k{}", i + 1), *sign));
            }
            [] => return Err(Error::Degenerate(format!("p{} = {p} matches no incoming momentum", j + 1))),
            _ => return Err(Error::Degenerate(format!("p{} = {p} matches ambiguously", j + 1))),
        }
    }
    pairing.sort();
    Ok(pairing)
}

/// Engine amplitude `⟨Ω, a(pₙ)…a(p₁) a†(k₁)…a†(kₙ) Ω⟩`, flagged by ordering.
pub fn n_particle_amplitude(
    model: &DoubledModel,
    in_momenta: &[f64],
    out_momenta: &[f64],
) -> Result<AmplitudeExpression> {
    let n = in_momenta.len();
    if out_momenta.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: out_momenta.len() });
    }
    let mut e = normal_order_vev(&GeneratorWord::amplitude(n), model)?;
    e.physical = is_physical_ordering(in_momenta, out_momenta);
    Ok(e)
}

/// Maximal discrepancy between the engine coefficient of the matched pairing and
/// the product of one-particle kernels, over all iso-spin assignments, in the 2π convention.
pub fn factorization_residual(n: usize, in_momenta: &[f64], out_momenta: &[f64], model: &DoubledModel) -> Result<f64> {
    if in_momenta.len() != n || out_momenta.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: in_momenta.len().max(out_momenta.len()) });
    }
    check_ordering(in_momenta, out_momenta)?;
    let pairing = matched_pairing(in_momenta, out_momenta)?;
    let engine = n_particle_amplitude(model, in_momenta, out_momenta)?.with_two_pi();
    let kernel = one_particle_amplitude(model, true);
    let subst = amplitude_substitution(in_momenta, out_momenta);
    let nb = model.bulk_dim();

    // one kernel matrix per contraction, indexed [out iso, in iso]
    let mut factors: Vec<(usize, usize, AuxMatrix)> = Vec::with_capacity(n);
    for c in &pairing {
        let j = label_index(&c.annihilator)?;
        let i = label_index(&c.creator)?;
        let p = out_momenta[j];
        let m = if c.sign > 0 { kernel.a(p)? } else { kernel.b(p)? };
        factors.push((j, i, m));
    }

    let term = engine.term(&pairing);
    let mut worst: f64 = 0.0;
    for flat in 0..nb.pow(2 * n as u32) {
        let mut rem = flat;
        let mut iso_in = vec![0; n];
        let mut iso_out = vec![0; n];
        for slot in iso_in.iter_mut().chain(iso_out.iter_mut()) {
            *slot = rem % nb;
            rem /= nb;
        }
        let mut s = subst.clone();
        for i in 0..n {
            s = s.component(format!("k{}", i + 1), in_component(in_momenta[i], iso_in[i], nb)?);
            s = s.component(format!("p{}", i + 1), out_component(out_momenta[i], iso_out[i], nb)?);
        }
        let lhs = match term {
            Some(t) => t.value(&s)?,
            None => C64::new(0.0, 0.0),
        };
        let rhs: C64 = factors.iter().map(|(j, i, m)| m.get(iso_out[*j], iso_in[*i])).product();
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(worst)
}

/// One-particle kernel read off the engine expansion of `a(p) a†(k)` at physical
/// components, to be compared with [`one_particle_amplitude`].
pub fn engine_one_particle_amplitude(model: &DoubledModel, two_pi: bool) -> Result<OneParticleKernel> {
    let mut e = normal_order_vev(&GeneratorWord::amplitude(1), model)?;
    if two_pi {
        e = e.with_two_pi();
    }
    let nb = model.bulk_dim();
    let pick = move |e: &AmplitudeExpression, p: f64, sign: i8| -> Result<AuxMatrix> {
        let k = f64::from(sign) * p;
        let pairing = [Contraction::new("p1", "k1", sign)];
        let Some(t) = e.term(&pairing) else {
            return Ok(AuxMatrix::zeros(nb));
        };
        let s = Substitution::new().momentum("p1", p).momentum("k1", k);
        let mut entries = Vec::with_capacity(nb * nb);
        for r in 0..nb {
            for c in 0..nb {
                let sc = s.clone().component("p1", out_component(p, r, nb)?).component("k1", in_component(k, c, nb)?);
                entries.push(t.value(&sc)?);
            }
        }
        AuxMatrix::from_row_slice(nb, &entries)
    };
    let ea = e.clone();
    Ok(OneParticleKernel::new(nb, move |p| pick(&ea, p, 1), move |p| pick(&e, p, -1)))
}

fn label_index(label: &str) -> Result<usize> {
    label
        .get(1..)
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&i| i >= 1)
        .map(|i| i - 1)
        .ok_or_else(|| Error::UnknownLabel(label.to_string()))
}
