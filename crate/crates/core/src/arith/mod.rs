//! Foundational integer arithmetic: factorization sieve, classical
//! multiplicative functions, Dirichlet character groups and Ramanujan sums.

mod character;
mod factor;
mod ramanujan;

pub use character::{
    character_group, primitive_characters_up_to, reduced_residues, CharGroup, DirichletCharacter,
};
pub use factor::{
    divisors, euler_phi, eval_basic, factorize_small, ikroot, isqrt, ArithKind, FactorTable,
};
pub use ramanujan::ramanujan_sum;
