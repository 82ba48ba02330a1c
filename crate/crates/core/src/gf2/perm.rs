use serde::Serialize;

use super::Gf2Error;

/// Bijection on `{0, …, n-1}`; `map[i]` is the image of `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Permutation {
    map: Vec<u32>,
}

/// ±1
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Sign {
    Even,
    Odd,
}

impl Sign {
    pub fn from_parity(odd: bool) -> Self {
        if odd {
            Sign::Odd
        } else {
            Sign::Even
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Even => 1,
            Sign::Odd => -1,
        }
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        Sign::from_parity((self == Sign::Odd) ^ (rhs == Sign::Odd))
    }
}

impl Permutation {
    pub fn new(map: Vec<u32>) -> Result<Self, Gf2Error> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &v in &map {
            let v = v as usize;
            if v >= n || seen[v] {
                return Err(Gf2Error::NotAPermutation);
            }
            seen[v] = true;
        }
        Ok(Permutation { map })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            map: (0..n as u32).collect(),
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.map.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.map[i] as usize
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.map
    }

    /// `(self ∘ other)(x) = self(other(x))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.len(), other.len());
        Permutation {
            map: other.map.iter().map(|&x| self.map[x as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (i, &v) in self.map.iter().enumerate() {
            inv[v as usize] = i as u32;
        }
        Permutation { map: inv }
    }

    /// Lengths of the disjoint cycles, fixed points included, in order of
    /// their smallest element.
    pub fn cycle_lengths(&self) -> Vec<usize> {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.map[x] as usize;
                len += 1;
            }
            out.push(len);
        }
        out
    }

    /// Histogram `cycle length → count`, ascending by length.
    pub fn cycle_census(&self) -> Vec<(usize, usize)> {
        let mut lens = self.cycle_lengths();
        lens.sort_unstable();
        let mut out: Vec<(usize, usize)> = Vec::new();
        for l in lens {
            match out.last_mut() {
                Some((len, count)) if *len == l => *count += 1,
                _ => out.push((l, 1)),
            }
        }
        out
    }

    /// Sum of cycle lengths minus the number of cycles.
    pub fn tau(&self) -> u64 {
        let lens = self.cycle_lengths();
        (self.len() - lens.len()) as u64
    }

    pub fn sign(&self) -> Sign {
        Sign::from_parity(self.tau() % 2 == 1)
    }

    /// Number of pairs `i < j` with `p(i) > p(j)`.
    pub fn inversions(&self) -> u64 {
        // merge sort count
        fn count(v: &mut [u32], buf: &mut Vec<u32>) -> u64 {
            let n = v.len();
            if n < 2 {
                return 0;
            }
            let mid = n / 2;
            let mut inv = count(&mut v[..mid], buf) + count(&mut v[mid..], buf);
            buf.clear();
            let (mut i, mut j) = (0, mid);
            while i < mid && j < n {
                if v[i] <= v[j] {
                    buf.push(v[i]);
                    i += 1;
                } else {
                    buf.push(v[j]);
                    inv += (mid - i) as u64;
                    j += 1;
                }
            }
            buf.extend_from_slice(&v[i..mid]);
            buf.extend_from_slice(&v[j..n]);
            v.copy_from_slice(buf);
            inv
        }
        let mut v = self.map.clone();
        let mut buf = Vec::with_capacity(v.len());
        count(&mut v, &mut buf)
    }
}

pub fn perm_sign(p: &Permutation) -> Sign {
    p.sign()
}

pub fn tau(p: &Permutation) -> u64 {
    p.tau()
}
