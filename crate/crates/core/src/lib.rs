//! Exact computations for unitary Virasoro minimal models and their coset towers:
//! Kac tables and fusion rules, GKO branching, braiding matrices over cyclotomic
//! fields, and certificates for the nonvanishing of the braiding entries that
//! pin down the vertex operator algebra structure.

pub mod arith;
pub mod affine;
pub mod braiding;
pub mod certify;
pub mod error;
pub mod kac;
pub mod tower;

pub use error::{Error, Result};
