use rayon::prelude::*;
use serde::Serialize;

use super::{Sbox, SboxError};

pub const MAX_AFFINE_BITS: u32 = 4;

/// `A(x) = L·x ⊕ c` with `L(e_j) = columns[j]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AffineMap {
    pub columns: Vec<u32>,
    pub constant: u32,
}

impl AffineMap {
    pub fn apply(&self, x: u32) -> u32 {
        self.columns
            .iter()
            .enumerate()
            .filter(|(j, _)| x >> j & 1 == 1)
            .fold(self.constant, |acc, (_, &c)| acc ^ c)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AffineDistance {
    pub n: u32,
    pub distance: u32,
    pub witness: AffineMap,
    /// Linear parts examined (`2^{n²}`).
    pub linear_maps: u64,
}

impl AffineDistance {
    /// Recounts `#{x : F(x) ≠ A(x)}` for the witness.
    pub fn verify(&self, f: &Sbox) -> bool {
        (0..1u32 << f.n()).filter(|&x| f.apply(x) != self.witness.apply(x)).count() as u32
            == self.distance
    }
}

fn unpack(n: u32, index: u64) -> Vec<u32> {
    let mask = (1u64 << n) - 1;
    (0..n).map(|j| (index >> (j * n) & mask) as u32).collect()
}

/// Minimum Hamming distance from `F` to any affine map.
///
/// For each linear part `L` the best constant is the most frequent value
/// of `F(x) ⊕ L·x`, so only the `2^{n²}` linear parts are enumerated. Ties
/// go to the smallest `(L, c)` with `L` indexed by its packed columns.
pub fn distance_to_affine(f: &Sbox) -> Result<AffineDistance, SboxError> {
    let n = f.n();
    if n > MAX_AFFINE_BITS {
        return Err(SboxError::Size(n, MAX_AFFINE_BITS));
    }
    let size = 1usize << n;
    let maps = 1u64 << (n * n);
    let (distance, index, constant) = (0..maps)
        .into_par_iter()
        .map_init(
            || vec![0u32; size],
            |hist, index| {
                hist.fill(0);
                let cols = unpack(n, index);
                // Gray-code walk keeps L·x incremental.
                let mut lx = 0u32;
                for step in 0..size {
                    if step > 0 {
                        lx ^= cols[step.trailing_zeros() as usize];
                    }
                    let x = step ^ (step >> 1);
                    hist[(f.apply(x as u32) ^ lx) as usize] += 1;
                }
                let (c, &best) = hist
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
                    .expect("nonempty");
                (size as u32 - best, index, c as u32)
            },
        )
        .min()
        .expect("at least one map");
    Ok(AffineDistance {
        n,
        distance,
        witness: AffineMap { columns: unpack(n, index), constant },
        linear_maps: maps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolanalysis::CHALLENGE_SBOX;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Plain enumeration over every (L, c) pair.
    fn distance_naive(f: &Sbox) -> u32 {
        let n = f.n();
        let mut best = u32::MAX;
        for index in 0..1u64 << (n * n) {
            for c in 0..1u32 << n {
                let a = AffineMap { columns: unpack(n, index), constant: c };
                let d = (0..1u32 << n).filter(|&x| f.apply(x) != a.apply(x)).count() as u32;
                best = best.min(d);
            }
        }
        best
    }

    #[test]
    fn affine_maps_have_distance_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let a = AffineMap {
                columns: (0..4).map(|_| rng.random_range(0..16)).collect(),
                constant: rng.random_range(0..16),
            };
            let f = Sbox::from_fn(4, |x| a.apply(x)).unwrap();
            let d = distance_to_affine(&f).unwrap();
            assert_eq!(d.distance, 0);
            assert!(d.verify(&f));
        }
    }

    #[test]
    fn witness_satisfies_affine_identity() {
        let d = distance_to_affine(&Sbox::new(CHALLENGE_SBOX.to_vec()).unwrap()).unwrap();
        let a = &d.witness;
        for x in 0..16 {
            for y in 0..16 {
                for z in 0..16 {
                    assert_eq!(a.apply(x) ^ a.apply(y) ^ a.apply(z), a.apply(x ^ y ^ z));
                }
            }
        }
    }

    #[test]
    fn matches_naive_on_small_widths() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 1..=3 {
            for _ in 0..20 {
                let t: Vec<u32> = (0..1 << n).map(|_| rng.random_range(0..1 << n)).collect();
                let f = Sbox::new(t).unwrap();
                let d = distance_to_affine(&f).unwrap();
                assert_eq!(d.distance, distance_naive(&f));
                assert!(d.verify(&f));
            }
        }
        let s = Sbox::new(CHALLENGE_SBOX.to_vec()).unwrap();
        let d = distance_to_affine(&s).unwrap();
        assert_eq!(d.distance, distance_naive(&s));
        assert_eq!(d.distance, 9);
    }

    #[test]
    fn random_four_bit_functions_respect_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let t: Vec<u32> = (0..16).map(|_| rng.random_range(0..16)).collect();
            let f = Sbox::new(t).unwrap();
            let d = distance_to_affine(&f).unwrap();
            assert!(d.distance < 16 - 4 - 1, "distance {}", d.distance);
            assert!(d.verify(&f));
        }
    }

    #[test]
    fn width_limit() {
        let f = Sbox::from_fn(5, |x| x).unwrap();
        assert!(matches!(distance_to_affine(&f), Err(SboxError::Size(5, 4))));
    }
}
