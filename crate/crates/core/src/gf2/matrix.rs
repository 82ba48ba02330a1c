use rand::Rng;

use super::{BitVec, Gf2Error};

/// Dense row-major matrix over GF(2).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gf2Matrix {
    rows: usize,
    cols: usize,
    data: Vec<BitVec>,
}

/// Affine solution set of `A·x = b`.
///
/// `particular` is `None` when the system is inconsistent. Otherwise every
/// solution is `particular ⊕ span(nullspace_basis)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gf2Solution {
    pub particular: Option<BitVec>,
    pub nullspace_basis: Vec<BitVec>,
}

impl Gf2Solution {
    pub fn is_consistent(&self) -> bool {
        self.particular.is_some()
    }

    /// Whether `x` belongs to the solution set.
    pub fn contains(&self, a: &Gf2Matrix, b: &BitVec, x: &BitVec) -> bool {
        self.particular.is_some() && a.mul_vec(x) == *b
    }

    pub fn dimension(&self) -> Option<usize> {
        self.particular.as_ref().map(|_| self.nullspace_basis.len())
    }
}

impl Gf2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Gf2Matrix {
            rows,
            cols,
            data: vec![BitVec::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows(rows: Vec<BitVec>, cols: usize) -> Result<Self, Gf2Error> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Gf2Error::DimensionMismatch {
                expected: cols,
                found: bad.len(),
            });
        }
        Ok(Gf2Matrix {
            rows: rows.len(),
            cols,
            data: rows,
        })
    }

    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        Gf2Matrix {
            rows,
            cols,
            data: (0..rows).map(|_| BitVec::random(cols, rng)).collect(),
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &BitVec {
        &self.data[i]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut BitVec {
        &mut self.data[i]
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        self.data[r].set(c, v)
    }

    pub fn push_row(&mut self, row: BitVec) -> Result<(), Gf2Error> {
        if row.len() != self.cols {
            return Err(Gf2Error::DimensionMismatch {
                expected: self.cols,
                found: row.len(),
            });
        }
        self.data.push(row);
        self.rows += 1;
        Ok(())
    }

    pub fn mul_vec(&self, x: &BitVec) -> BitVec {
        assert_eq!(x.len(), self.cols, "vector length must equal column count");
        BitVec::from_bools(self.data.iter().map(|r| r.dot(x)))
    }

    /// Applies the matrix to the `cols` low bits of `x`, returning the
    /// `rows` low bits of the image. Only for matrices up to 64×64.
    pub fn apply_u64(&self, x: u64) -> u64 {
        debug_assert!(self.rows <= 64 && self.cols <= 64);
        let xv = x & mask(self.cols);
        self.data
            .iter()
            .enumerate()
            .fold(0, |acc, (i, r)| acc | (((r.to_u64() & xv).count_ones() as u64 & 1) << i))
    }

    pub fn rank(&self) -> usize {
        let mut m = self.data.clone();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(p) = (rank..self.rows).find(|&r| m[r].get(col)) else {
                continue;
            };
            m.swap(rank, p);
            let pivot = m[rank].clone();
            for row in m.iter_mut().skip(rank + 1) {
                if row.get(col) {
                    row.xor_assign(&pivot);
                }
            }
            rank += 1;
        }
        rank
    }
}

fn mask(bits: usize) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

/// Solves `A·x = b` over GF(2) by Gauss–Jordan elimination.
///
/// Rows are xored a word at a time. The pivot for each column is the
/// lowest-indexed remaining row with that bit set, which makes the output
/// (particular solution with free variables at zero, and the nullspace basis
/// ordered by free column) a deterministic function of the input.
pub fn gf2_solve(a: &Gf2Matrix, b: &BitVec) -> Result<Gf2Solution, Gf2Error> {
    if b.len() != a.rows {
        return Err(Gf2Error::DimensionMismatch {
            expected: a.rows,
            found: b.len(),
        });
    }
    let cols = a.cols;
    // Augmented rows: bits 0..cols are coefficients, bit `cols` is the rhs.
    let mut rows: Vec<BitVec> = a
        .data
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut aug = BitVec::zeros(cols + 1);
            for c in r.iter_ones() {
                aug.set(c, true);
            }
            if b.get(i) {
                aug.set(cols, true);
            }
            aug
        })
        .collect();

    let mut pivot_cols = Vec::new();
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r].get(col)) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row.get(col) {
                row.xor_assign(&pivot);
            }
        }
        pivot_cols.push(col);
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }

    // A zero row with rhs 1 means 0 = 1.
    if rows[rank..].iter().any(|r| r.get(cols)) {
        return Ok(Gf2Solution {
            particular: None,
            nullspace_basis: Vec::new(),
        });
    }

    let mut is_pivot = vec![false; cols];
    for &c in &pivot_cols {
        is_pivot[c] = true;
    }

    let mut particular = BitVec::zeros(cols);
    for (r, &c) in pivot_cols.iter().enumerate() {
        if rows[r].get(cols) {
            particular.set(c, true);
        }
    }

    let mut basis = Vec::new();
    for free in (0..cols).filter(|&c| !is_pivot[c]) {
        let mut v = BitVec::zeros(cols);
        v.set(free, true);
        for (r, &c) in pivot_cols.iter().enumerate() {
            if rows[r].get(free) {
                v.set(c, true);
            }
        }
        basis.push(v);
    }

    Ok(Gf2Solution {
        particular: Some(particular),
        nullspace_basis: basis,
    })
}
