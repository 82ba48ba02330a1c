//! Arithmetic puzzles: bit-generation cost, Fibonacci strings, related
//! passwords and quadratic residues on elliptic curves.

mod cost;
mod ec;
mod fibstring;
mod passwords;

pub use cost::{
    min_generation_cost, CostTable, GenerationPlan, GrowOp, APPEND_COST, START_COST, TRIPLE_COST,
};
pub use ec::{
    ec_add, ec_point_order, ec_qr_sweep, ec_scalar_mul, halving_x, odd_subgroup_qr_property,
    EcCurve, EcPoint, QrReport, QrSweepReport, MAX_ENUM_PRIME,
};
pub use fibstring::{
    fib_residues, fib_string_balanced, fib_string_build, BalanceVerdict, FibStringState,
    MAX_BUILD_INDEX,
};
pub use passwords::{is_related, related_passwords_enumerate, Side};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PuzzleError {
    #[error("length must be at least 1")]
    ZeroLength,
    #[error("index {n} outside 1..={max}")]
    IndexOutOfRange { n: u32, max: u32 },
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("invalid curve: {0}")]
    BadCurve(String),
    #[error("point {0:?} is not on the curve")]
    NotOnCurve(EcPoint),
    #[error("generator must not be the point at infinity")]
    TrivialPoint,
    #[error("generator has even order {0}")]
    EvenOrder(u64),
}
