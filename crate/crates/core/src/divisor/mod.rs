//! Generalized divisor functions `tau_z`, z-fold convolutions, sieving of
//! multiplicative functions, and Dirichlet convolution of value tables.

mod spec;
mod table;

pub use spec::{
    sieve_from_prime_powers, z_fold_convolution_prime_power, z_fold_from_values, FunctionSpec,
};
pub use table::{
    convolve_slices, dirichlet_convolve, omega_table, sieve_multiplicative, spec_digest,
    tau_table, TableData, ValueTable,
};
