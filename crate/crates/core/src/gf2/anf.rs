use super::{BitVec, Gf2Error};

/// Masks selecting, within a 64-bit word, the positions whose bit `k` is 0.
const LOW_HALVES: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0f0f_0f0f_0f0f_0f0f,
    0x00ff_00ff_00ff_00ff,
    0x0000_ffff_0000_ffff,
    0x0000_0000_ffff_ffff,
];

/// Möbius transform of a Boolean truth table of length `2^n`.
///
/// Entry `x` of the result is the coefficient of the monomial
/// `Π_{i ∈ x} x_i` (bit `i` of the index selects variable `i`). The
/// transform is its own inverse.
pub fn anf(table: &BitVec) -> Result<BitVec, Gf2Error> {
    let len = table.len();
    if !len.is_power_of_two() {
        return Err(Gf2Error::NotPowerOfTwo(len));
    }
    let n = len.trailing_zeros() as usize;
    let mut words = table.words().to_vec();

    for (k, &low) in LOW_HALVES.iter().enumerate().take(n.min(6)) {
        let shift = 1 << k;
        for w in words.iter_mut() {
            *w ^= (*w & low) << shift;
        }
    }
    for k in 6..n {
        let step = 1 << (k - 6);
        for block in (0..words.len()).step_by(2 * step) {
            for i in block..block + step {
                words[i + step] ^= words[i];
            }
        }
    }

    let mut out = BitVec::zeros(len);
    for (w, &word) in words.iter().enumerate() {
        let mut bits = word;
        while bits != 0 {
            let tz = bits.trailing_zeros() as usize;
            out.set(w * 64 + tz, true);
            bits &= bits - 1;
        }
    }
    Ok(out)
}

/// ANF of a function given as a `u8`/`bool`-style table: convenience for
/// component functions built from integer lookups.
pub fn anf_of<F: Fn(usize) -> bool>(n: usize, f: F) -> BitVec {
    let table = BitVec::from_bools((0..1usize << n).map(f));
    anf(&table).expect("length is a power of two")
}

/// Renders an ANF coefficient vector as a polynomial, e.g. `x1x2 + x3`.
///
/// `names[i]` is the printed name of variable `i`. Monomials are listed by
/// increasing degree, then by index.
pub fn anf_to_string(coeffs: &BitVec, names: &[String]) -> String {
    let mut monos: Vec<usize> = coeffs.iter_ones().collect();
    monos.sort_by_key(|&m| (m.count_ones(), m));
    if monos.is_empty() {
        return "0".to_string();
    }
    monos
        .iter()
        .map(|&m| {
            if m == 0 {
                "1".to_string()
            } else {
                (0..names.len())
                    .filter(|i| m >> i & 1 == 1)
                    .map(|i| names[i].as_str())
                    .collect::<String>()
            }
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

/// Algebraic degree (max monomial weight); `None` for the zero function.
pub fn degree(coeffs: &BitVec) -> Option<u32> {
    coeffs.iter_ones().map(|m| (m as u64).count_ones()).max()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive_anf(table: &[bool]) -> Vec<bool> {
        let n = table.len();
        (0..n)
            .map(|u| {
                (0..n)
                    .filter(|&x| x & !u == 0)
                    .fold(false, |acc, x| acc ^ table[x])
            })
            .collect()
    }

    #[test]
    fn constant_zero() {
        assert!(anf(&BitVec::zeros(16)).unwrap().is_zero());
    }

    #[test]
    fn single_monomial() {
        let t = BitVec::from_bools([false, false, false, true]);
        let a = anf(&t).unwrap();
        assert_eq!(a.iter_ones().collect::<Vec<_>>(), vec![3]);
    }

    #[test]
    fn rejects_bad_length() {
        assert_eq!(anf(&BitVec::zeros(12)), Err(Gf2Error::NotPowerOfTwo(12)));
    }

    #[test]
    fn rendering() {
        let names: Vec<String> = (1..=4).map(|i| format!("x{i}")).collect();
        let mut c = BitVec::zeros(16);
        c.set(0b0011, true);
        c.set(0b0100, true);
        assert_eq!(anf_to_string(&c, &names), "x3 + x1x2");
        assert_eq!(degree(&c), Some(2));
    }

    proptest! {
        #[test]
        fn involution(n in 0usize..=9, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let t = BitVec::from_bools((0..1usize << n).map(|_| rng.random::<bool>()));
            prop_assert_eq!(anf(&anf(&t).unwrap()).unwrap(), t);
        }

        #[test]
        fn matches_subset_sum(bits in proptest::collection::vec(any::<bool>(), 128)) {
            let t = BitVec::from_bools(bits.clone());
            let expect = BitVec::from_bools(naive_anf(&bits));
            prop_assert_eq!(anf(&t).unwrap(), expect);
        }
    }
}
