//! The δ-impurity Schrödinger model `H = −½∂² + ηδ(x)`.

use num_complex::Complex64 as C64;

use crate::defect::{delta_amplitudes, delta_defect, DefectPair, Side};
use crate::doubling::DoubledModel;
use crate::error::{Error, Result};
use crate::fock::{
    amplitude_substitution, check_ordering, matched_pairing, AmplitudeExpression, Coefficient, Contraction,
    ContractionTerm, Substitution,
};
use crate::smatrix::identity_s;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeltaModel {
    eta: f64,
}

impl DeltaModel {
    pub fn new(eta: f64) -> Result<Self> {
        if !eta.is_finite() || eta < 0.0 {
            return Err(Error::InvalidParameter(format!("eta must be finite and nonnegative, got {eta}")));
        }
        Ok(Self { eta })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// `(T(k), R(k))`.
    pub fn amplitudes(&self, k: f64) -> Result<(C64, C64)> {
        if k == 0.0 {
            return Err(Error::ZeroMomentum(k));
        }
        Ok(delta_amplitudes(self.eta, k))
    }

    pub fn defect(&self) -> DefectPair {
        delta_defect(self.eta).expect("eta validated")
    }

    /// Doubled model with trivial bulk scattering.
    pub fn doubled_model(&self) -> DoubledModel {
        DoubledModel::from_impurity(&identity_s(1), &self.defect(), false).expect("dimensions agree")
    }

    pub fn wavefunction(&self, k: f64, branch: Side) -> Result<Wavefunction> {
        if k == 0.0 {
            return Err(Error::ZeroMomentum(k));
        }
        Ok(Wavefunction { model: *self, k, branch })
    }
}

/// `ψ_k^±(x) = θ(∓k){θ(∓x)T(∓k)e^{ikx} + θ(±x)[e^{ikx} + R(∓k)e^{−ikx}]}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Wavefunction {
    model: DeltaModel,
    k: f64,
    branch: Side,
}

impl Wavefunction {
    pub fn momentum(&self) -> f64 {
        self.k
    }

    pub fn branch(&self) -> Side {
        self.branch
    }

    /// False when `θ(∓k)` kills the branch.
    pub fn is_nonzero(&self) -> bool {
        -self.branch.sign() * self.k > 0.0
    }

    /// Amplitudes at `∓k` for this branch.
    fn coefficients(&self) -> (C64, C64) {
        delta_amplitudes(self.model.eta, -self.branch.sign() * self.k)
    }

    /// True when `x` lies on the transmitted side `θ(∓x)`.
    fn transmitted_side(&self, x: f64) -> bool {
        -self.branch.sign() * x > 0.0
    }

    fn plane(&self, x: f64, s: f64) -> C64 {
        C64::from_polar(1.0, s * self.k * x)
    }

    /// Value at `x`; at `x = 0` the common one-sided limit.
    pub fn value(&self, x: f64) -> C64 {
        if !self.is_nonzero() {
            return C64::new(0.0, 0.0);
        }
        let (t, r) = self.coefficients();
        if x == 0.0 {
            return t;
        }
        if self.transmitted_side(x) {
            t * self.plane(x, 1.0)
        } else {
            self.plane(x, 1.0) + r * self.plane(x, -1.0)
        }
    }

    /// Analytic derivative for `x ≠ 0`.
    pub fn derivative(&self, x: f64) -> Result<C64> {
        if x == 0.0 {
            return Err(Error::InvalidParameter("derivative is discontinuous at x = 0".into()));
        }
        Ok(self.derivative_on(if x > 0.0 { Side::Plus } else { Side::Minus }, x))
    }

    /// One-sided derivative `ψ′(0±)`.
    pub fn derivative_limit(&self, side: Side) -> C64 {
        self.derivative_on(side, 0.0)
    }

    fn derivative_on(&self, side: Side, x: f64) -> C64 {
        if !self.is_nonzero() {
            return C64::new(0.0, 0.0);
        }
        let ik = C64::new(0.0, self.k);
        let (t, r) = self.coefficients();
        if side != self.branch {
            ik * t * self.plane(x, 1.0)
        } else {
            ik * (self.plane(x, 1.0) - r * self.plane(x, -1.0))
        }
    }

    /// One-sided values `ψ(0±)`.
    pub fn value_limit(&self, side: Side) -> C64 {
        if !self.is_nonzero() {
            return C64::new(0.0, 0.0);
        }
        let (t, r) = self.coefficients();
        if side != self.branch {
            t
        } else {
            C64::new(1.0, 0.0) + r
        }
    }
}

/// `|ψ′(0⁺) − ψ′(0⁻) − 2ηψ(0)|`.
pub fn boundary_condition_residual(model: &DeltaModel, k: f64, branch: Side) -> Result<f64> {
    let w = model.wavefunction(k, branch)?;
    let jump = w.derivative_limit(Side::Plus) - w.derivative_limit(Side::Minus);
    Ok((jump - 2.0 * model.eta * w.value(0.0)).norm())
}

/// Same residual for the free plane wave `e^{ikx}`: its derivative is continuous and `ψ(0) = 1`.
pub fn plane_wave_boundary_residual(model: &DeltaModel, k: f64) -> Result<f64> {
    if k == 0.0 {
        return Err(Error::ZeroMomentum(k));
    }
    let derivative = |_x: f64| C64::new(0.0, k);
    let jump = derivative(0.0) - derivative(-0.0);
    Ok((jump - C64::new(2.0 * model.eta, 0.0)).norm())
}

/// Points `±(gap + j·h)` up to `extent`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FdGrid {
    pub h: f64,
    pub extent: f64,
    /// Distance of the innermost points from the origin.
    pub gap: f64,
}

impl FdGrid {
    /// Grid whose innermost stencil stays a full spacing away from the origin.
    pub fn new(h: f64, extent: f64) -> Self {
        Self { h, extent, gap: 2.0 * h }
    }

    pub fn points(&self) -> Result<Vec<f64>> {
        if !(self.h > 0.0 && self.h.is_finite() && self.extent > self.gap) {
            return Err(Error::InvalidParameter(format!("bad grid {self:?}")));
        }
        if self.gap - self.h <= 0.0 {
            return Err(Error::GridTouchesOrigin(format!("gap {} with spacing {}", self.gap, self.h)));
        }
        let count = ((self.extent - self.gap) / self.h).floor() as usize + 1;
        let mut pts = Vec::with_capacity(2 * count);
        for j in 0..count {
            let x = self.gap + j as f64 * self.h;
            pts.push(-x);
            pts.push(x);
        }
        Ok(pts)
    }
}

/// `max |−½·FD₂[ψ](x) − (k²/2)ψ(x)|` with central second differences.
pub fn schrodinger_residual(model: &DeltaModel, k: f64, branch: Side, grid: &FdGrid) -> Result<f64> {
    let w = model.wavefunction(k, branch)?;
    let h = grid.h;
    let mut worst: f64 = 0.0;
    for x in grid.points()? {
        let fd2 = (w.value(x + h) - 2.0 * w.value(x) + w.value(x - h)) / (h * h);
        worst = worst.max((-0.5 * fd2 - 0.5 * k * k * w.value(x)).norm());
    }
    Ok(worst)
}

/// Same residual for `e^{ikx}` on the grid.
pub fn plane_wave_schrodinger_residual(k: f64, grid: &FdGrid) -> Result<f64> {
    let h = grid.h;
    let f = |x: f64| C64::from_polar(1.0, k * x);
    let mut worst: f64 = 0.0;
    for x in grid.points()? {
        let fd2 = (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
        worst = worst.max((-0.5 * fd2 - 0.5 * k * k * f(x)).norm());
    }
    Ok(worst)
}

fn overlap_terms(model: &DeltaModel, p_label: &str, k_label: &str) -> Vec<ContractionTerm> {
    let eta = model.eta;
    let mut terms = Vec::with_capacity(2);
    for sign in [1i8, -1] {
        let pl = p_label.to_string();
        let coefficient = Coefficient::function(move |s: &Substitution| {
            let p = s.momentum_of(&pl)?;
            if p == 0.0 {
                return Err(Error::ZeroMomentum(p));
            }
            let (t, r) = delta_amplitudes(eta, p.abs());
            Ok(if sign > 0 { t } else { r })
        });
        terms.push(ContractionTerm {
            pairing: vec![Contraction::new(p_label, k_label, sign)],
            coefficient,
            delta_normalization: 1,
        });
    }
    terms
}

/// `⟨p|k⟩` with labels `p`, `k` in the 2π convention.
pub fn in_out_overlap(model: &DeltaModel, p: f64, k: f64) -> Result<AmplitudeExpression> {
    if p == 0.0 || k == 0.0 {
        return Err(Error::ZeroMomentum(if p == 0.0 { p } else { k }));
    }
    Ok(AmplitudeExpression::from_terms(1, 1, overlap_terms(model, "p", "k")).canonicalize())
}

/// `∏ⱼ ⟨pⱼ|k_σ(j)⟩` over the kinematically matched partners, labelled `p1…`, `k1…`.
pub fn n_particle_product(model: &DeltaModel, p_list: &[f64], k_list: &[f64]) -> Result<AmplitudeExpression> {
    check_ordering(k_list, p_list)?;
    let pairing = matched_pairing(k_list, p_list)?;
    let mut out = AmplitudeExpression::from_terms(
        1,
        0,
        vec![ContractionTerm { pairing: Vec::new(), coefficient: Coefficient::One, delta_normalization: 0 }],
    );
    for c in &pairing {
        let one = AmplitudeExpression::from_terms(1, 1, overlap_terms(model, &c.annihilator, &c.creator));
        out = out.product(&one)?;
    }
    Ok(out.canonicalize())
}

/// Substitution placing the δ-model physical components on every label.
pub fn physical_substitution(p_list: &[f64], k_list: &[f64]) -> Result<Substitution> {
    let mut s = amplitude_substitution(k_list, p_list);
    for (i, &k) in k_list.iter().enumerate() {
        s = s.component(format!("k{}", i + 1), crate::fock::in_component(k, 0, 1)?);
    }
    for (j, &p) in p_list.iter().enumerate() {
        s = s.component(format!("p{}", j + 1), crate::fock::out_component(p, 0, 1)?);
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{n_particle_amplitude, one_particle_amplitude};
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn eigenfunction_reference_value() {
        let m = DeltaModel::new(1.0).unwrap();
        let w = m.wavefunction(-1.0, Side::Plus).unwrap();
        let (_, r1) = delta_amplitudes(1.0, 1.0);
        let expect = C64::from_polar(1.0, -1.0) + r1 * C64::from_polar(1.0, 1.0);
        assert!((w.value(1.0) - expect).norm() < 1e-15);
        let dead = m.wavefunction(1.0, Side::Plus).unwrap();
        for x in [-2.0, 0.0, 0.5] {
            assert_eq!(dead.value(x), c(0.0, 0.0));
        }
        let free = DeltaModel::new(0.0).unwrap().wavefunction(-1.3, Side::Plus).unwrap();
        assert!((free.value(-0.8) - C64::from_polar(1.0, 1.04)).norm() < 1e-15);
        assert!(m.wavefunction(0.0, Side::Minus).is_err());
        assert!(DeltaModel::new(-0.5).is_err());
    }

    #[test]
    fn eigenfunctions_are_continuous_and_satisfy_the_jump_condition() {
        for eta in [0.0, 0.5, 1.0, 3.0] {
            let m = DeltaModel::new(eta).unwrap();
            for k in [-2.7, -0.4, 0.3, 1.9] {
                for branch in [Side::Plus, Side::Minus] {
                    let w = m.wavefunction(k, branch).unwrap();
                    assert!((w.value_limit(Side::Plus) - w.value_limit(Side::Minus)).norm() < 1e-15);
                    assert!(boundary_condition_residual(&m, k, branch).unwrap() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn derivative_matches_central_difference() {
        let w = DeltaModel::new(1.2).unwrap().wavefunction(0.9, Side::Minus).unwrap();
        let h = 1e-6;
        for x in [-1.5, -0.2, 0.7] {
            let fd = (w.value(x + h) - w.value(x - h)) / (2.0 * h);
            assert!((fd - w.derivative(x).unwrap()).norm() < 1e-8);
        }
        assert!(w.derivative(0.0).is_err());
    }

    #[test]
    fn plane_wave_control() {
        for eta in [0.0, 1.0, 2.5] {
            let m = DeltaModel::new(eta).unwrap();
            assert_eq!(plane_wave_boundary_residual(&m, 1.1).unwrap(), 2.0 * eta);
        }
    }

    #[test]
    fn finite_difference_residual_and_convergence() {
        let m = DeltaModel::new(1.0).unwrap();
        assert!(schrodinger_residual(&m, -2.0, Side::Plus, &FdGrid::new(1e-3, 5.0)).unwrap() <= 1e-4);
        assert!(plane_wave_schrodinger_residual(1.5, &FdGrid::new(1e-3, 5.0)).unwrap() <= 1e-4);
        let coarse = schrodinger_residual(&m, -2.0, Side::Plus, &FdGrid::new(2e-2, 5.0)).unwrap();
        let fine = schrodinger_residual(&m, -2.0, Side::Plus, &FdGrid::new(1e-2, 5.0)).unwrap();
        let order = (coarse / fine).log2();
        assert!((order - 2.0).abs() < 0.1, "observed order {order}");
        let touching = FdGrid { h: 1e-2, extent: 1.0, gap: 1e-2 };
        assert!(matches!(schrodinger_residual(&m, -2.0, Side::Plus, &touching), Err(Error::GridTouchesOrigin(_))));
    }

    #[test]
    fn overlap_reference_values() {
        let m = DeltaModel::new(1.0).unwrap();
        let e = in_out_overlap(&m, 2.0, 2.0).unwrap();
        let plus = e.term(&[Contraction::new("p", "k", 1)]).unwrap();
        let s = Substitution::new().momentum("p", 2.0).momentum("k", 2.0);
        assert!((plus.value(&s).unwrap() - c(0.8, -0.4) * (2.0 * PI)).norm() < 1e-14);
        let minus = e.term(&[Contraction::new("p", "k", -1)]).unwrap();
        let s = Substitution::new().momentum("p", -2.0).momentum("k", 2.0);
        assert!((minus.value(&s).unwrap() - c(-0.2, -0.4) * (2.0 * PI)).norm() < 1e-14);
        let free = in_out_overlap(&DeltaModel::new(0.0).unwrap(), 1.0, 1.0).unwrap();
        let s = Substitution::new().momentum("p", 1.0).momentum("k", 1.0);
        assert!(
            (free.term(&[Contraction::new("p", "k", 1)]).unwrap().value(&s).unwrap() - c(2.0 * PI, 0.0)).norm() < 1e-14
        );
        assert!(in_out_overlap(&m, 0.0, 1.0).is_err());
    }

    #[test]
    fn overlap_agrees_with_fock_kernel() {
        let m = DeltaModel::new(0.7).unwrap();
        let kernel = one_particle_amplitude(&m.doubled_model(), true);
        let e = in_out_overlap(&m, 1.0, 1.0).unwrap();
        for p in [-2.4, -0.3, 0.6, 1.8] {
            for (sign, expect) in [(1i8, kernel.a(p).unwrap()), (-1, kernel.b(p).unwrap())] {
                let s = Substitution::new().momentum("p", p).momentum("k", f64::from(sign) * p);
                let v = e.term(&[Contraction::new("p", "k", sign)]).unwrap().value(&s).unwrap();
                assert!((v - expect.get(0, 0)).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn product_matches_engine() {
        let m = DeltaModel::new(1.0).unwrap();
        let cases: [(&[f64], &[f64]); 3] =
            [(&[0.8], &[-0.8]), (&[-1.3, 2.1], &[2.1, -1.3]), (&[-2.0, 0.5, 1.4], &[2.0, 1.4, -0.5])];
        for (k, p) in cases {
            let product = n_particle_product(&m, p, k).unwrap();
            let engine = n_particle_amplitude(&m.doubled_model(), k, p).unwrap().with_two_pi();
            let pairing = matched_pairing(k, p).unwrap();
            let s = physical_substitution(p, k).unwrap();
            let a = product.term(&pairing).unwrap().value(&s).unwrap();
            let b = engine.term(&pairing).unwrap().value(&s).unwrap();
            assert!((a - b).norm() <= 1e-11, "{k:?} {p:?}");
        }
        assert!(n_particle_product(&m, &[-1.3, 2.1], &[-1.3, 2.1]).is_err());
    }
}
