//! One-particle restrictions of the hierarchy `H^(n) = ∫ dk kⁿ a†(k) a(k)`.

use num_complex::Complex64 as C64;

use super::engine::{normal_order_vev, GeneratorWord};
use super::expression::{AmplitudeExpression, Contraction, Substitution};
use super::kernel::OneParticleKernel;
use crate::defect::delta_defect;
use crate::doubling::DoubledModel;
use crate::error::{Error, Result};
use crate::smatrix::identity_s;
use crate::tensor::AuxMatrix;

/// `σ` in `[H^(m), H^(n)] = σ·[(−1)^m − (−1)^n]·N^(m+n)`, fixed by [`calibrate_commutator_sign`].
pub const COMMUTATOR_SIGN: f64 = -1.0;

/// Kernel of `⟨a(p) a†(k)⟩` read off the engine: `A = I + 𝓣`, `B = 𝓡`.
pub fn contraction_kernel(model: &DoubledModel) -> Result<OneParticleKernel> {
    let e = normal_order_vev(&GeneratorWord::new().annihilator("q").creator("k"), model)?;
    let d = model.doubled_dim();
    let pick = move |e: &AmplitudeExpression, p: f64, sign: i8| -> Result<AuxMatrix> {
        if p == 0.0 {
            return Err(Error::ZeroMomentum(p));
        }
        let Some(t) = e.term(&[Contraction::new("q", "k", sign)]) else {
            return Ok(AuxMatrix::zeros(d));
        };
        let s = Substitution::new().momentum("q", p).momentum("k", f64::from(sign) * p);
        let mut entries = Vec::with_capacity(d * d);
        for a in 0..d {
            for b in 0..d {
                entries.push(t.value(&s.clone().component("q", a).component("k", b))?);
            }
        }
        AuxMatrix::from_row_slice(d, &entries)
    };
    let ea = e.clone();
    Ok(OneParticleKernel::new(d, move |p| pick(&ea, p, 1), move |p| pick(&e, p, -1)))
}

/// `J` with `A(k) = 𝓣(k)`, `B(k) = 𝓡(k)`.
pub fn involution_kernel(model: &DoubledModel) -> OneParticleKernel {
    let (mt, mr) = (model.clone(), model.clone());
    OneParticleKernel::new(model.doubled_dim(), move |k| mt.cal_t(k), move |k| mr.cal_r(k))
}

/// `‖J∘J − id‖` at `k`.
pub fn involution_residual(model: &DoubledModel, k: f64) -> Result<f64> {
    let j = involution_kernel(model);
    j.compose(&j)?.distance(&OneParticleKernel::identity(model.doubled_dim()), k)
}

/// One-particle kernel of `H^(n)`: `pⁿ` times the engine contraction kernel.
pub fn hamiltonian_kernel(n: u32, model: &DoubledModel) -> Result<OneParticleKernel> {
    OneParticleKernel::moment(model.doubled_dim(), n).compose(&contraction_kernel(model)?)
}

/// `pⁿ(𝓣(p)δ(p − k) + 𝓡(p)δ(p + k))`.
pub fn impurity_term_kernel(n: u32, model: &DoubledModel) -> Result<OneParticleKernel> {
    OneParticleKernel::moment(model.doubled_dim(), n).compose(&involution_kernel(model))
}

/// `‖K(H_RT^(n)) − K(H_ZF^(n)) − K(impurity term)‖` at `p`.
pub fn relation_residual(n: u32, model: &DoubledModel, p: f64) -> Result<f64> {
    let rt = hamiltonian_kernel(n, model)?;
    let zf = hamiltonian_kernel(n, &model.without_impurity())?;
    rt.sub(&zf)?.distance(&impurity_term_kernel(n, model)?, p)
}

/// Kernel of `∫ dk k^{m+n} A†(k) r(k) A(−k)`: the flip part of the contraction kernel
/// composed with the full contraction kernel, weighted by the moment.
pub fn reflection_term_kernel(power: u32, model: &DoubledModel) -> Result<OneParticleKernel> {
    let g = contraction_kernel(model)?;
    let d = model.doubled_dim();
    let gb = g.clone();
    let flip_part = OneParticleKernel::new(d, move |_| Ok(AuxMatrix::zeros(d)), move |p| gb.b(p));
    OneParticleKernel::moment(d, power).compose(&flip_part.compose(&g)?)
}

/// Kernel of `[H^(m), H^(n)]`.
pub fn commutator_kernel(m: u32, n: u32, model: &DoubledModel) -> Result<OneParticleKernel> {
    let hm = hamiltonian_kernel(m, model)?;
    let hn = hamiltonian_kernel(n, model)?;
    hm.compose(&hn)?.sub(&hn.compose(&hm)?)
}

fn parity_prefactor(m: u32, n: u32) -> f64 {
    let sgn = |k: u32| if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    sgn(m) - sgn(n)
}

fn signed_residual(m: u32, n: u32, model: &DoubledModel, p: f64, sign: f64) -> Result<f64> {
    if p == 0.0 {
        return Err(Error::ZeroMomentum(p));
    }
    let lhs = commutator_kernel(m, n, model)?;
    let rhs = reflection_term_kernel(m + n, model)?.scale(C64::new(sign * parity_prefactor(m, n), 0.0));
    lhs.distance(&rhs, p)
}

/// `‖K([H^(m), H^(n)]) − σ[(−1)^m − (−1)^n]·K(reflection term)‖` at `p`.
pub fn hierarchy_commutator_residual(m: u32, n: u32, model: &DoubledModel, p: f64) -> Result<f64> {
    signed_residual(m, n, model, p, COMMUTATOR_SIGN)
}

/// Sign `σ` that makes the `m = 0, n = 1` commutator match for the δ-model with `η = 1` at `p = 2`.
pub fn calibrate_commutator_sign() -> Result<f64> {
    let model = DoubledModel::from_impurity(&identity_s(1), &delta_defect(1.0)?, false)?;
    let plus = signed_residual(0, 1, &model, 2.0, 1.0)?;
    let minus = signed_residual(0, 1, &model, 2.0, -1.0)?;
    Ok(if minus < plus { -1.0 } else { 1.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::defect::{delta_amplitudes, pure_reflection, pure_transmission};
    use crate::smatrix::rational_s;

    fn delta(eta: f64) -> DoubledModel {
        DoubledModel::from_impurity(&identity_s(1), &delta_defect(eta).unwrap(), false).unwrap()
    }

    #[test]
    fn calibration_agrees_with_pinned_sign() {
        assert_eq!(calibrate_commutator_sign().unwrap(), COMMUTATOR_SIGN);
        let m = delta(1.0);
        assert!(hierarchy_commutator_residual(0, 1, &m, 2.0).unwrap() <= 1e-11);
        assert!(signed_residual(0, 1, &m, 2.0, -COMMUTATOR_SIGN).unwrap() > 1e-3);
    }

    #[test]
    fn contraction_kernel_is_one_plus_t_and_r() {
        let m = delta(1.0);
        let g = contraction_kernel(&m).unwrap();
        for p in [-1.1, 0.6, 2.0] {
            let a = &AuxMatrix::identity(2) + &m.cal_t(p).unwrap();
            assert!((&g.a(p).unwrap() - &a).norm_inf() < 1e-15);
            assert!((&g.b(p).unwrap() - &m.cal_r(p).unwrap()).norm_inf() < 1e-15);
        }
        assert!(g.a(0.0).is_err());
    }

    #[test]
    fn hamiltonian_kernel_example() {
        let m = delta(1.0);
        let h = hamiltonian_kernel(2, &m).unwrap();
        let (t, r) = delta_amplitudes(1.0, 1.5);
        let a = h.a(1.5).unwrap();
        assert!((a.get(0, 0) - C64::new(2.25, 0.0)).norm() < 1e-14);
        assert!((a.get(0, 1) - t * 2.25).norm() < 1e-14);
        assert!((h.b(1.5).unwrap().get(0, 0) - r * 2.25).norm() < 1e-14);
        let free = hamiltonian_kernel(0, &m.without_impurity()).unwrap();
        assert_eq!(free.a(0.4).unwrap(), AuxMatrix::identity(2));
        assert_eq!(free.b(0.4).unwrap(), AuxMatrix::zeros(2));
    }

    #[test]
    fn involution_squares_to_identity() {
        let models = [
            delta(1.0),
            delta(0.0),
            DoubledModel::from_impurity(&identity_s(2), &pure_transmission(2), false).unwrap(),
            DoubledModel::from_impurity(&identity_s(2), &pure_reflection(2), false).unwrap(),
        ];
        for m in &models {
            for k in [-2.5, -0.7, 0.7, 1.9] {
                assert!(involution_residual(m, k).unwrap() <= 1e-13);
            }
        }
        // free model: J is the pure ξ flip
        let free = involution_kernel(&delta(0.0));
        let flip = AuxMatrix::from_row_slice(
            2,
            &[C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        )
        .unwrap();
        assert_eq!(free.a(0.3).unwrap(), flip);
        // reflection scaled away from unitarity breaks J²
        assert!(involution_residual(&delta(1.0).with_scaled_reflection(1.1), 0.7).unwrap() > 1e-3);
    }

    #[test]
    fn hierarchy_identities_on_delta_model() {
        let m = delta(1.0);
        for p in [-1.7, 0.9, 2.0] {
            for (a, b) in [(0, 2), (1, 3), (2, 4)] {
                assert!(
                    commutator_kernel(a, b, &m).unwrap().distance(&OneParticleKernel::zero(2), p).unwrap() <= 1e-12
                );
                assert!(hierarchy_commutator_residual(a, b, &m, p).unwrap() <= 1e-12);
            }
            for (a, b) in [(0, 1), (1, 2)] {
                assert!(hierarchy_commutator_residual(a, b, &m, p).unwrap() <= 1e-11);
            }
            for n in 0..4 {
                assert!(relation_residual(n, &m, p).unwrap() <= 1e-12);
            }
        }
        assert_eq!(hierarchy_commutator_residual(0, 1, &m, 0.0), Err(Error::ZeroMomentum(0.0)));
    }

    #[test]
    fn free_and_transmitting_hierarchies_commute() {
        let s = rational_s(2, 1.0).unwrap();
        let pt = DoubledModel::from_impurity(&s, &pure_transmission(2), false).unwrap();
        for m in [delta(1.0).without_impurity(), pt] {
            for (a, b) in [(0, 1), (1, 2), (0, 3)] {
                let k = commutator_kernel(a, b, &m).unwrap();
                assert!(k.distance(&OneParticleKernel::zero(m.doubled_dim()), 1.3).unwrap() <= 1e-12);
            }
        }
    }
}
