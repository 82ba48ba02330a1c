//! S-box analysis: differential uniformity, distance to affine maps, and
//! linear components.

mod affine;
mod apn;
mod rounds;

pub use affine::{distance_to_affine, AffineMap, AffineDistance, MAX_AFFINE_BITS};
pub use apn::{
    apn_catalog, differential_uniformity, is_apn, power_map, ApnExponent, ApnFamily, MAX_DU_BITS,
};
pub use rounds::{
    component_check, parse_pairs, students_contradiction, ComponentAnf, PairConstant, RoundsVerdict,
    StudentsCipher, CHALLENGE_PAIRS, CHALLENGE_SBOX, CHALLENGE_U, STUDENT_ROUNDS,
};

use serde::Serialize;

use crate::gf2::{Gf2Error, VectorialBoolFn};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SboxError {
    #[error("{0} bits is outside the supported range 1..={1}")]
    Size(u32, u32),
    #[error("entry {index} = {value:#x} does not fit in {n} bits")]
    Entry { index: usize, value: u32, n: u32 },
    #[error("table has {0} entries, expected a power of two")]
    Length(usize),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}

/// An `n`-bit to `n`-bit lookup table; not necessarily bijective.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Sbox {
    n: u32,
    table: Vec<u32>,
}

impl Sbox {
    pub fn new(table: Vec<u32>) -> Result<Self, SboxError> {
        if !table.len().is_power_of_two() {
            return Err(SboxError::Length(table.len()));
        }
        let n = table.len().trailing_zeros();
        if !(1..=20).contains(&n) {
            return Err(SboxError::Size(n, 20));
        }
        if let Some((index, &value)) = table.iter().enumerate().find(|(_, &v)| v >> n != 0) {
            return Err(SboxError::Entry { index, value, n });
        }
        Ok(Sbox { n, table })
    }

    pub fn from_fn<F: Fn(u32) -> u32>(n: u32, f: F) -> Result<Self, SboxError> {
        if !(1..=20).contains(&n) {
            return Err(SboxError::Size(n, 20));
        }
        Self::new((0..1u32 << n).map(f).collect())
    }

    /// Reads the truth-table text format; input and output widths must match.
    pub fn parse(text: &str) -> Result<Self, SboxError> {
        let f = VectorialBoolFn::parse(text)?;
        if f.in_bits() != f.out_bits() {
            return Err(SboxError::Malformed(format!(
                "expected n -> n, found {} -> {}",
                f.in_bits(),
                f.out_bits()
            )));
        }
        Self::new(f.table().iter().map(|&v| v as u32).collect())
    }

    pub fn to_text(&self) -> String {
        self.to_vectorial().to_text()
    }

    pub fn to_vectorial(&self) -> VectorialBoolFn {
        VectorialBoolFn::new(self.n, self.n, self.table.iter().map(|&v| v as u64).collect())
            .expect("entries fit")
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn table(&self) -> &[u32] {
        &self.table
    }

    #[inline]
    pub fn apply(&self, x: u32) -> u32 {
        self.table[x as usize]
    }

    pub fn is_permutation(&self) -> bool {
        let mut seen = vec![false; self.table.len()];
        self.table.iter().all(|&v| !std::mem::replace(&mut seen[v as usize], true))
    }
}

/// `x ↦ L1(x) ⊕ L2(F(x))` for tables of equal width.
pub fn combine_linear(l1: &Sbox, l2: &Sbox, f: &Sbox) -> Result<Sbox, SboxError> {
    if l1.n != f.n || l2.n != f.n {
        return Err(SboxError::Malformed("tables differ in width".into()));
    }
    Sbox::from_fn(f.n, |x| l1.apply(x) ^ l2.apply(f.apply(x)))
}

/// Whether `L1 + L2∘F` is a bijection.
pub fn is_permutation_combined(l1: &Sbox, l2: &Sbox, f: &Sbox) -> Result<bool, SboxError> {
    Ok(combine_linear(l1, l2, f)?.is_permutation())
}

/// The GF(2)-linear map with `L(e_j) = columns[j]`, as a table.
pub fn linear_table(n: u32, columns: &[u32]) -> Result<Sbox, SboxError> {
    if columns.len() != n as usize {
        return Err(SboxError::Malformed(format!("{} columns for width {n}", columns.len())));
    }
    Sbox::from_fn(n, |x| {
        columns
            .iter()
            .enumerate()
            .filter(|(j, _)| x >> j & 1 == 1)
            .fold(0, |acc, (_, &c)| acc ^ c)
    })
}
