//! Exact integer linear algebra: Hermite and Smith normal forms, integer kernels,
//! saturation and lattice indices. Everything is arbitrary precision.

mod lattice;
mod matrix;
mod normal_form;

pub use lattice::{integer_kernel, lattice_index, saturate, LatticeBasis, LatticeChart, LatticeIndex};
pub use matrix::{
    add, content, dot, is_primitive, is_zero_vector, neg, primitive, rank_of_rows, scale, sub, vector, IntMatrix,
    Vector,
};
pub use normal_form::{hnf, invariant_factors, snf, solve_integer, solve_rational};
