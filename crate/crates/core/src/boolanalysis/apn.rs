use rayon::prelude::*;
use serde::Serialize;

use super::{Sbox, SboxError};
use crate::arith::gcd;
use crate::gf2::FieldGF2n;

pub const MAX_DU_BITS: u32 = 16;

/// `max_{a≠0, b} #{x : F(x) ⊕ F(x ⊕ a) = b}`.
pub fn differential_uniformity(f: &Sbox) -> Result<u32, SboxError> {
    if f.n() > MAX_DU_BITS {
        return Err(SboxError::Size(f.n(), MAX_DU_BITS));
    }
    let size = 1usize << f.n();
    let t = f.table();
    let du = (1..size)
        .into_par_iter()
        .map_init(
            || vec![0u32; size],
            |counts, a| {
                counts.fill(0);
                for x in 0..size {
                    counts[(t[x] ^ t[x ^ a]) as usize] += 1;
                }
                counts.iter().copied().max().unwrap_or(0)
            },
        )
        .max()
        .unwrap_or(0);
    Ok(du)
}

pub fn is_apn(f: &Sbox) -> Result<bool, SboxError> {
    Ok(differential_uniformity(f)? == 2)
}

/// `x ↦ x^d` over the given field.
pub fn power_map(field: &FieldGF2n, d: u64) -> Sbox {
    Sbox::new(field.power_table(d)).expect("field elements fit")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ApnFamily {
    /// `2^{2i} − 2^i + 1`, `gcd(i, n) = 1`, `2 ≤ i ≤ n/2`.
    Kasami,
    /// `2^t + 3`, `n = 2t + 1`.
    Welch,
    /// `2^t + 2^{t/2} − 1` (t even) or `2^t + 2^{(3t+1)/2} − 1` (t odd),
    /// `n = 2t + 1`.
    Niho,
    /// `2^{2t} − 1`, `n = 2t + 1`.
    Inverse,
    /// `2^{4i} + 2^{3i} + 2^{2i} + 2^i − 1`, `n = 5i`.
    Dobbertin,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ApnExponent {
    pub family: ApnFamily,
    pub n: u32,
    /// `i` or `t`, depending on the family.
    pub param: u32,
    pub d: u64,
}

/// Every exponent the five families give for `n`.
pub fn apn_catalog(n: u32) -> Vec<ApnExponent> {
    let mut out = Vec::new();
    let p2 = |k: u32| 1u64 << k;
    for i in 2..=n / 2 {
        if gcd(i as u64, n as u64) == 1 {
            out.push(ApnExponent {
                family: ApnFamily::Kasami,
                n,
                param: i,
                d: p2(2 * i) - p2(i) + 1,
            });
        }
    }
    if n % 2 == 1 && n >= 3 {
        let t = (n - 1) / 2;
        out.push(ApnExponent { family: ApnFamily::Welch, n, param: t, d: p2(t) + 3 });
        let niho = if t % 2 == 0 { p2(t) + p2(t / 2) - 1 } else { p2(t) + p2((3 * t + 1) / 2) - 1 };
        out.push(ApnExponent { family: ApnFamily::Niho, n, param: t, d: niho });
        out.push(ApnExponent { family: ApnFamily::Inverse, n, param: t, d: p2(2 * t) - 1 });
    }
    if n % 5 == 0 {
        let i = n / 5;
        out.push(ApnExponent {
            family: ApnFamily::Dobbertin,
            n,
            param: i,
            d: p2(4 * i) + p2(3 * i) + p2(2 * i) + p2(i) - 1,
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Direct count over (a, b, x) without the per-a histogram.
    fn du_naive(f: &Sbox) -> u32 {
        let size = 1u32 << f.n();
        let mut best = 0;
        for a in 1..size {
            for b in 0..size {
                let c = (0..size).filter(|&x| f.apply(x) ^ f.apply(x ^ a) == b).count() as u32;
                best = best.max(c);
            }
        }
        best
    }

    #[test]
    fn identity_is_worst_case() {
        let f = power_map(&FieldGF2n::new(5).unwrap(), 1);
        assert_eq!(differential_uniformity(&f).unwrap(), 32);
    }

    #[test]
    fn listed_exponents_over_gf32() {
        let field = FieldGF2n::new(5).unwrap();
        for d in [13, 7, 15] {
            assert!(is_apn(&power_map(&field, d)).unwrap(), "x^{d}");
        }
    }

    #[test]
    fn catalog_entries() {
        let five: Vec<(ApnFamily, u64)> = apn_catalog(5).iter().map(|e| (e.family, e.d)).collect();
        assert_eq!(
            five,
            vec![
                (ApnFamily::Kasami, 13),
                (ApnFamily::Welch, 7),
                (ApnFamily::Niho, 5),
                (ApnFamily::Inverse, 15),
                (ApnFamily::Dobbertin, 29),
            ]
        );
        let seven: Vec<(ApnFamily, u64)> = apn_catalog(7).iter().map(|e| (e.family, e.d)).collect();
        assert_eq!(
            seven,
            vec![
                (ApnFamily::Kasami, 13),
                (ApnFamily::Kasami, 57),
                (ApnFamily::Welch, 11),
                (ApnFamily::Niho, 39),
                (ApnFamily::Inverse, 63),
            ]
        );
        // gcd(2, 8) = 2 excludes i = 2 and i = 4.
        let eight: Vec<u32> = apn_catalog(8).iter().map(|e| e.param).collect();
        assert_eq!(eight, vec![3]);
    }

    #[test]
    fn catalog_is_apn_for_5_and_7() {
        for n in [5, 7] {
            let field = FieldGF2n::new(n).unwrap();
            for e in apn_catalog(n) {
                assert_eq!(differential_uniformity(&power_map(&field, e.d)).unwrap(), 2, "{e:?}");
            }
        }
    }

    #[test]
    fn agrees_with_naive_count() {
        let field = FieldGF2n::new(4).unwrap();
        for d in 0..15 {
            let f = power_map(&field, d);
            assert_eq!(differential_uniformity(&f).unwrap(), du_naive(&f), "d = {d}");
        }
        let s = Sbox::new(super::super::CHALLENGE_SBOX.to_vec()).unwrap();
        assert_eq!(differential_uniformity(&s).unwrap(), du_naive(&s));
    }

    #[test]
    fn apn_does_not_depend_on_modulus() {
        // x^5 + x^3 + 1, the reciprocal of the default modulus.
        let other = FieldGF2n::with_modulus(5, 0x29).unwrap();
        for e in apn_catalog(5) {
            assert!(is_apn(&power_map(&other, e.d)).unwrap());
        }
    }
}
