//! Fock-space representation of the reflection-transmission algebra with central defect data.

mod amplitude;
mod engine;
mod expression;
mod hierarchy;
mod kernel;

pub use amplitude::{
    amplitude_substitution, check_ordering, engine_one_particle_amplitude, factorization_residual, in_component,
    is_physical_ordering, matched_pairing, n_particle_amplitude, one_particle_amplitude, out_component,
};
pub use engine::{normal_order_vev, EnginePath, GeneratorWord, OpKind, Symbol, MAX_PARTICLES};
pub use expression::{
    AmplitudeExpression, Coefficient, Contraction, ContractionTerm, Substitution, MAX_TENSOR_PARTICLES,
    PAIRING_TOLERANCE,
};
pub use hierarchy::{
    calibrate_commutator_sign, commutator_kernel, contraction_kernel, hamiltonian_kernel,
    hierarchy_commutator_residual, impurity_term_kernel, involution_kernel, involution_residual,
    reflection_term_kernel, relation_residual, COMMUTATOR_SIGN,
};
pub use kernel::OneParticleKernel;
