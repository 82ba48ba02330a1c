//! Closeness to permutations of `F_α(x) = x ⊕ (x ⊞ α)` on `F_2^n`.
//!
//! `C(F) = #{(x, y) : F(x) = F(y)}` over ordered pairs, `x = y` included.
//! Bit 1 of `α` is its least significant bit; `αb` denotes the vector with
//! one more low bit, i.e. the integer `2α + b`.

use rayon::prelude::*;
use serde::Serialize;

pub const MAX_WIDTH: u32 = 32;
pub const MAX_BRUTE_WIDTH: u32 = 16;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PermCloseError {
    #[error("width {n} outside 1..={max}")]
    Width { n: u32, max: u32 },
    #[error("alpha {value:#x} does not fit in {n} bits")]
    ValueTooWide { n: u32, value: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AlphaVec {
    n: u32,
    value: u32,
}

impl AlphaVec {
    pub fn new(n: u32, value: u64) -> Result<Self, PermCloseError> {
        if !(1..=MAX_WIDTH).contains(&n) {
            return Err(PermCloseError::Width { n, max: MAX_WIDTH });
        }
        if value >> n != 0 {
            return Err(PermCloseError::ValueTooWide { n, value });
        }
        Ok(AlphaVec { n, value: value as u32 })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn value(&self) -> u32 {
        self.value
    }

    fn mask(&self) -> u64 {
        (1u64 << self.n) - 1
    }

    pub fn complement(&self) -> Self {
        AlphaVec { n: self.n, value: (!self.value as u64 & self.mask()) as u32 }
    }

    /// Additive inverse `⊟α` modulo `2^n`.
    pub fn negate(&self) -> Self {
        AlphaVec { n: self.n, value: ((self.value as u64).wrapping_neg() & self.mask()) as u32 }
    }

    /// `F_α(x)`.
    pub fn apply(&self, x: u64) -> u64 {
        x ^ (x.wrapping_add(self.value as u64) & self.mask())
    }
}

/// Sum of squared image-histogram counts.
pub fn closeness_bruteforce(alpha: AlphaVec) -> Result<u128, PermCloseError> {
    if alpha.n > MAX_BRUTE_WIDTH {
        return Err(PermCloseError::Width { n: alpha.n, max: MAX_BRUTE_WIDTH });
    }
    let size = 1usize << alpha.n;
    let mut hist = vec![0u32; size];
    for x in 0..size as u64 {
        hist[alpha.apply(x) as usize] += 1;
    }
    Ok(hist.iter().map(|&c| c as u128 * c as u128).sum())
}

/// Via `C(α0) = 4C(α)` and `C(α1) = C(α) + C(ᾱ)` from `C(0) = C(1) = 4`
/// at `n = 1`. Tracks `(C(β), C(β̄))` for ever longer high prefixes `β`.
pub fn closeness_recursive(alpha: AlphaVec) -> u128 {
    let mut pair = (4u128, 4u128);
    for k in (0..alpha.n - 1).rev() {
        let (c, cbar) = pair;
        pair = if alpha.value >> k & 1 == 0 {
            // complement of β0 is β̄1
            (4 * c, cbar + c)
        } else {
            (c + cbar, 4 * cbar)
        };
    }
    pair.0
}

/// `C` for every `α` of width `n`, indexed by `α`.
pub fn closeness_table(n: u32) -> Result<Vec<u128>, PermCloseError> {
    if !(1..=24).contains(&n) {
        return Err(PermCloseError::Width { n, max: 24 });
    }
    Ok((0..1u64 << n)
        .into_par_iter()
        .map(|a| closeness_recursive(AlphaVec { n, value: a as u32 }))
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Minimizers {
    pub n: u32,
    pub alphas: Vec<u32>,
    pub c_min: u128,
}

/// Minimizers `(1, α_2, ᾱ_2, α_2, ᾱ_2, ..., α_n)`: low bit set, bits
/// 3..n−1 alternate starting from the complement of bit 2, bit n free.
pub fn best_alphas(n: u32) -> Result<Minimizers, PermCloseError> {
    if !(1..=MAX_WIDTH).contains(&n) {
        return Err(PermCloseError::Width { n, max: MAX_WIDTH });
    }
    let alphas = match n {
        1 => vec![0, 1],
        2 => vec![1, 3],
        _ => {
            let mut out = Vec::with_capacity(4);
            for a2 in 0..2u32 {
                let mut v = 1 | a2 << 1;
                for k in 3..n {
                    // bit k (1-based) sits at shift k - 1
                    let bit = if k % 2 == 1 { 1 - a2 } else { a2 };
                    v |= bit << (k - 1);
                }
                for last in 0..2u32 {
                    out.push(v | last << (n - 1));
                }
            }
            out.sort();
            out
        }
    };
    Ok(Minimizers { n, alphas, c_min: min_closeness(n)?.value })
}

/// Exhaustive argmin over all `α` of width `n` (n ≤ 24).
pub fn best_alphas_exhaustive(n: u32) -> Result<Minimizers, PermCloseError> {
    let table = closeness_table(n)?;
    let c_min = *table.iter().min().expect("non-empty");
    let alphas = (0..table.len() as u32).filter(|&a| table[a as usize] == c_min).collect();
    Ok(Minimizers { n, alphas, c_min })
}

/// `a + b√17`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct ZSqrt17 {
    a: i128,
    b: i128,
}

impl ZSqrt17 {
    fn checked_mul(self, o: Self) -> Option<Self> {
        let a = self.a.checked_mul(o.a)?.checked_add(self.b.checked_mul(o.b)?.checked_mul(17)?)?;
        let b = self.a.checked_mul(o.b)?.checked_add(self.b.checked_mul(o.a)?)?;
        Some(ZSqrt17 { a, b })
    }
}

/// `((17 + 7√17)(1 + √17)^n + (17 − 7√17)(1 − √17)^n) / (34·2^n)` in exact
/// arithmetic. The two terms are conjugate, so the sum is twice the rational
/// part of the first. `None` once intermediate values overflow `i128`.
pub fn min_closeness_closed_form(n: u32) -> Option<u128> {
    let base = ZSqrt17 { a: 1, b: 1 };
    let mut pw = ZSqrt17 { a: 1, b: 0 };
    for _ in 0..n {
        pw = pw.checked_mul(base)?;
    }
    let t = ZSqrt17 { a: 17, b: 7 }.checked_mul(pw)?;
    let num = t.a.checked_mul(2)?;
    let den = 34i128.checked_mul(1i128.checked_shl(n)?)?;
    (num % den == 0 && num > 0).then(|| (num / den) as u128)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MinCloseness {
    pub n: u32,
    pub value: u128,
    /// Whether the closed form agrees, if it could be evaluated.
    pub closed_form_agrees: Option<bool>,
}

/// `C*_n = C*_{n−1} + 4C*_{n−2}` with `C*_1 = 4`, `C*_2 = 8`.
pub fn min_closeness(n: u32) -> Result<MinCloseness, PermCloseError> {
    if !(1..=90).contains(&n) {
        return Err(PermCloseError::Width { n, max: 90 });
    }
    let (mut prev, mut cur) = (4u128, 8u128);
    let value = if n == 1 {
        4
    } else {
        for _ in 2..n {
            (prev, cur) = (cur, cur + 4 * prev);
        }
        cur
    };
    Ok(MinCloseness {
        n,
        value,
        closed_form_agrees: min_closeness_closed_form(n).map(|c| c == value),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn av(n: u32, v: u64) -> AlphaVec {
        AlphaVec::new(n, v).unwrap()
    }

    /// Literal O(4^n) pair count.
    fn pair_count(alpha: AlphaVec) -> u128 {
        let size = 1u64 << alpha.n();
        let mut c = 0;
        for x in 0..size {
            for y in 0..size {
                c += u128::from(alpha.apply(x) == alpha.apply(y));
            }
        }
        c
    }

    #[test]
    fn challenge_small_values() {
        assert_eq!(closeness_bruteforce(av(1, 0)).unwrap(), 4);
        assert_eq!(closeness_bruteforce(av(1, 1)).unwrap(), 4);
        let n2: Vec<u128> = (0..4).map(|a| closeness_bruteforce(av(2, a)).unwrap()).collect();
        assert_eq!(n2, vec![16, 8, 16, 8]);
    }

    #[test]
    fn histogram_matches_pair_loop() {
        for n in 1..=6 {
            for a in 0..1u64 << n {
                assert_eq!(closeness_bruteforce(av(n, a)).unwrap(), pair_count(av(n, a)));
            }
        }
    }

    #[test]
    fn recursive_matches_brute_exhaustive_to_10() {
        for n in 1..=10 {
            for a in 0..1u64 << n {
                assert_eq!(
                    closeness_recursive(av(n, a)),
                    closeness_bruteforce(av(n, a)).unwrap(),
                    "n = {n}, α = {a}"
                );
            }
        }
    }

    #[test]
    fn recursive_matches_brute_sampled_12_16() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for n in [12, 14, 16] {
            for _ in 0..20 {
                let a = av(n, rng.random_range(0..1u64 << n));
                assert_eq!(closeness_recursive(a), closeness_bruteforce(a).unwrap());
            }
        }
    }

    #[test]
    fn zero_alpha_is_4_pow_n() {
        for n in 1..=32 {
            assert_eq!(closeness_recursive(av(n, 0)), 4u128.pow(n));
        }
    }

    #[test]
    fn structural_properties_to_12() {
        for n in 1..=12 {
            let table = closeness_table(n).unwrap();
            for (a, &c) in table.iter().enumerate() {
                let alpha = av(n, a as u64);
                assert_eq!(c, table[alpha.negate().value() as usize], "negation, n = {n}");
                assert_eq!(c % 4, 0);
                assert!(c < 3 * table[alpha.complement().value() as usize], "n = {n}, α = {a}");
                if n < 12 {
                    let c1 = closeness_recursive(av(n + 1, 2 * a as u64 + 1));
                    let c0 = closeness_recursive(av(n + 1, 2 * a as u64));
                    assert!(c1 < c0);
                }
            }
        }
    }

    #[test]
    fn minimizers_match_exhaustive() {
        for n in 1..=14 {
            let formula = best_alphas(n).unwrap();
            let exhaustive = best_alphas_exhaustive(n).unwrap();
            assert_eq!(formula, exhaustive, "n = {n}");
            assert_eq!(formula.alphas.len(), if n <= 2 { 2 } else { 4 });
        }
        assert_eq!(best_alphas(2).unwrap().c_min, 8);
    }

    #[test]
    fn closed_form() {
        assert_eq!(min_closeness(1).unwrap().value, 4);
        assert_eq!(min_closeness(2).unwrap().value, 8);
        assert_eq!(min_closeness(3).unwrap().value, 24);
        for n in 1..=40 {
            assert_eq!(min_closeness(n).unwrap().closed_form_agrees, Some(true), "n = {n}");
        }
    }

    #[test]
    fn bad_widths() {
        assert!(AlphaVec::new(0, 0).is_err());
        assert!(AlphaVec::new(33, 0).is_err());
        assert!(AlphaVec::new(3, 8).is_err());
        assert!(closeness_bruteforce(av(17, 0)).is_err());
    }
}
