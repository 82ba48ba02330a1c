//! Bit-level linear algebra over GF(2), algebraic normal forms, binary
//! extension fields and permutation parity.

mod anf;
mod bitvec;
mod field;
mod matrix;
mod perm;
mod truth;

pub use anf::{anf, anf_of, anf_to_string, degree};
pub use bitvec::BitVec;
pub use field::{gf2n_pow, is_irreducible, FieldGF2n, DEFAULT_MODULI};
pub use matrix::{gf2_solve, Gf2Matrix, Gf2Solution};
pub use perm::{perm_sign, tau, Permutation, Sign};
pub use truth::{VectorialBoolFn, MAX_IN_BITS};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Gf2Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("table length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("extension degree {0} outside 2..=16")]
    FieldDegree(u32),
    #[error("modulus {modulus:#x} is not an irreducible polynomial of degree {n}")]
    Reducible { n: u32, modulus: u32 },
    #[error("map is not a bijection")]
    NotAPermutation,
    #[error("truth table: {0}")]
    TableShape(String),
    #[error("parse error: {0}")]
    Parse(String),
}
