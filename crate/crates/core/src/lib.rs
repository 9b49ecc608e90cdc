//! Summing norms on finite-dimensional Banach lattices.
//!
//! The crate works with weighted `l_r^n` lattices and evaluates the sequence
//! norms built on them (strong, weak, positive weak, Cohen and positive strong
//! `p`-summing norms), the operator ideal norms defined through those sequence
//! norms, and the Wittstock, Fremlin and Grothendieck tensor norms on
//! `l_p^m (x) X`.
//!
//! Exact values are produced by vertex enumeration whenever the relevant ball
//! is polyhedral; everything else is a certified lower bound from a seeded
//! multistart search, flagged with `exact = false`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
pub mod ideal;
pub mod lattice;
mod math;
mod ratio;
pub mod oracles;
pub mod rng;
pub mod search;
pub mod seq;
pub mod tensor;

pub use error::{Error, Result};
pub use ideal::{
    adjoint, cohen_nuclear_norm, dplus_bilinear, dplus_norm, dplus_sequence, induced_map_constant,
    lambda_norm, majorizing_norm, operator_norm, CnSide, IdealKind, LinearOperator, NormParams,
};
pub use lattice::{Exponent, LatticeSpace, LatticeVector, VectorSequence};
pub use search::{
    maximize_convex_over_ball, maximize_convex_over_positive_ball, maximize_linear_over_norm_body,
    ConvexObjective, FnOracle, Method, NormEstimate, NormOracle, SearchConfig,
};
pub use seq::{
    cohen_norm, dual_witness_sampler, duality_pairing, positive_strong_norm, positive_weak_norm,
    strong_norm, tail_profile, weak_norm, SeqNorm, SeqNormKind,
};
pub use tensor::{
    fremlin_norm, grothendieck_norms, induced_tensor_constant, injective_cone_member,
    tensor_norm, wittstock_norm, GrothendieckNorms, PositiveBilinearForm, TensorElement, TensorNorm,
    TensorNormKind,
};
