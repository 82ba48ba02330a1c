//! The 4-bit iterated cipher `E_k = (⊕k_{r+1}) ∘ S∘(⊕k_r) ∘ … ∘ S∘(⊕k_1)`
//! and the linear-component argument against its reported pairs.
//!
//! Nibbles are written `(x1, x2, x3, x4)` with `x1` the most significant
//! bit, so `0xa = (1, 0, 1, 0)`. A mask `u` selects bits the same way.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{Sbox, SboxError};
use crate::gf2::{anf_of, BitVec};

pub const CHALLENGE_SBOX: [u32; 16] = [
    0x3, 0xe, 0x6, 0x8, 0x0, 0xc, 0xb, 0x4, 0x1, 0xd, 0x5, 0xa, 0x7, 0x9, 0xf, 0x2,
];

/// `u = (1, 1, 0, 0)`.
pub const CHALLENGE_U: u32 = 0b1100;

/// `(plaintext, ciphertext)` as reported for 10 and 12 rounds.
pub const CHALLENGE_PAIRS: [(u32, u32); 2] = [(0xa, 0x5), (0xc, 0x0)];

/// `10·12·14 + 1`.
pub const STUDENT_ROUNDS: usize = 1681;

/// High two bits of every ASCII letter's high nibble: `(0, 1, a, b)`.
const LETTER_PREFIX: u32 = 0b0100;

fn dot(u: u32, x: u32) -> u32 {
    (u & x).count_ones() & 1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentAnf {
    pub u: u32,
    #[serde(skip)]
    pub coeffs: BitVec,
    /// E.g. `x1x2 + x3`, variables numbered from the most significant bit.
    pub text: String,
}

/// ANF of `x ↦ u·S(x)`.
pub fn component_check(s: &Sbox, u: u32) -> Result<ComponentAnf, SboxError> {
    if u >> s.n() != 0 {
        return Err(SboxError::Malformed(format!("mask {u:#x} wider than {} bits", s.n())));
    }
    let coeffs = anf_of(s.n() as usize, |x| dot(u, s.apply(x as u32)) == 1);
    Ok(ComponentAnf { u, text: render(&coeffs, s.n()), coeffs })
}

fn render(coeffs: &BitVec, n: u32) -> String {
    // Variable x_j is bit n - j.
    let vars = |m: usize| -> Vec<u32> { (1..=n).filter(|j| m >> (n - j) & 1 == 1).collect() };
    let mut monos: Vec<Vec<u32>> = coeffs.iter_ones().map(vars).collect();
    if monos.is_empty() {
        return "0".into();
    }
    monos.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
    monos
        .iter()
        .map(|m| {
            if m.is_empty() {
                "1".to_string()
            } else {
                m.iter().map(|j| format!("x{j}")).collect()
            }
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

/// Checks `f(S(x) ⊕ (0, 1, a, b)) = u·x ⊕ a ⊕ 1` for all `x, a, b`, where
/// `f = u·S`. Returns the first failing `(x, a, b)`.
pub fn letter_key_identity(s: &Sbox, u: u32) -> Option<(u32, u32, u32)> {
    let f = |x: u32| dot(u, s.apply(x));
    for x in 0..16 {
        for a in 0..2 {
            for b in 0..2 {
                let k = LETTER_PREFIX | a << 1 | b;
                if f(s.apply(x) ^ k) != dot(u, x) ^ a ^ 1 {
                    return Some((x, a, b));
                }
            }
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairConstant {
    pub plaintext: u32,
    pub ciphertext: u32,
    /// `f(x) ⊕ u·y`.
    pub c_literal: u32,
    /// `f(x ⊕ (0, 1, 0, 0)) ⊕ u·y`, accounting for the first key nibble.
    pub c: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RoundsVerdict {
    pub u: u32,
    pub component: String,
    pub pairs: Vec<PairConstant>,
    /// Pairs disagree on `c`: no letter key can produce them.
    pub contradiction: bool,
    /// Same test with `c_literal`.
    pub literal_contradiction: bool,
}

/// For an odd round count and key nibbles `k_i = (0, 1, a_i, b_i)` at odd
/// `i`, `u·E_k(x) = f(x ⊕ k_1) ⊕ c'` and `f(x ⊕ k_1) = f(x ⊕ (0,1,0,0)) ⊕ a_1`,
/// so `c` must be the same for every pair.
pub fn students_contradiction(s: &Sbox, u: u32, pairs: &[(u32, u32)]) -> Result<RoundsVerdict, SboxError> {
    if s.n() != 4 {
        return Err(SboxError::Malformed(format!("expected a 4-bit S-box, found {} bits", s.n())));
    }
    if let Some((x, a, b)) = letter_key_identity(s, u) {
        return Err(SboxError::Malformed(format!(
            "mask {u:#x} does not give the letter-key identity (fails at x = {x:#x}, a = {a}, b = {b})"
        )));
    }
    if let Some(&(x, y)) = pairs.iter().find(|(x, y)| x >> 4 != 0 || y >> 4 != 0) {
        return Err(SboxError::Malformed(format!("pair ({x:#x}, {y:#x}) is not two nibbles")));
    }
    let f = |x: u32| dot(u, s.apply(x));
    let pairs: Vec<PairConstant> = pairs
        .iter()
        .map(|&(x, y)| PairConstant {
            plaintext: x,
            ciphertext: y,
            c_literal: f(x) ^ dot(u, y),
            c: f(x ^ LETTER_PREFIX) ^ dot(u, y),
        })
        .collect();
    let differ = |g: fn(&PairConstant) -> u32| pairs.windows(2).any(|w| g(&w[0]) != g(&w[1]));
    Ok(RoundsVerdict {
        u,
        component: component_check(s, u)?.text,
        contradiction: differ(|p| p.c),
        literal_contradiction: differ(|p| p.c_literal),
        pairs,
    })
}

/// Reads one `plaintext ciphertext` pair per line. Each nibble is a hex
/// digit or four binary digits; `->` between them and `#` comments are
/// allowed.
pub fn parse_pairs(text: &str) -> Result<Vec<(u32, u32)>, SboxError> {
    let nibble = |t: &str| -> Result<u32, SboxError> {
        let v = if t.len() == 4 && t.chars().all(|c| c == '0' || c == '1') {
            u32::from_str_radix(t, 2)
        } else {
            u32::from_str_radix(t.trim_start_matches("0x"), 16)
        }
        .map_err(|e| SboxError::Malformed(format!("bad nibble {t:?}: {e}")))?;
        if v > 0xf {
            return Err(SboxError::Malformed(format!("{t:?} is not a nibble")));
        }
        Ok(v)
    };
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(|l| {
            let toks: Vec<&str> = l.split_whitespace().filter(|t| *t != "->").collect();
            match toks.as_slice() {
                [x, y] => Ok((nibble(x)?, nibble(y)?)),
                _ => Err(SboxError::Malformed(format!("expected two nibbles in {l:?}"))),
            }
        })
        .collect()
}

/// The students' cipher with an explicit nibble key of length `r + 1`.
#[derive(Clone, Debug)]
pub struct StudentsCipher {
    sbox: Sbox,
    key: Vec<u32>,
}

impl StudentsCipher {
    pub fn new(sbox: Sbox, key: Vec<u32>) -> Result<Self, SboxError> {
        if sbox.n() != 4 || key.len() < 2 || key.iter().any(|&k| k > 0xf) {
            return Err(SboxError::Malformed("need a 4-bit S-box and at least two key nibbles".into()));
        }
        Ok(StudentsCipher { sbox, key })
    }

    /// Key nibbles from an ASCII passphrase, high nibble of each byte first.
    pub fn from_passphrase(sbox: Sbox, passphrase: &str) -> Result<Self, SboxError> {
        if !passphrase.bytes().all(|b| b.is_ascii_alphabetic()) {
            return Err(SboxError::Malformed("passphrase must be ASCII letters".into()));
        }
        let key = passphrase.bytes().flat_map(|b| [(b >> 4) as u32, (b & 0xf) as u32]).collect();
        Self::new(sbox, key)
    }

    /// A random letter passphrase long enough for `rounds` rounds.
    pub fn random_letters(seed: u64, rounds: usize) -> String {
        const LETTERS: &[u8] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz";
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..(rounds + 2) / 2).map(|_| LETTERS[rng.random_range(0..LETTERS.len())] as char).collect()
    }

    /// Round count; a passphrase of `L` letters gives `2L − 1`.
    pub fn rounds(&self) -> usize {
        self.key.len() - 1
    }

    pub fn encrypt(&self, x: u32) -> u32 {
        let (last, rounds) = self.key.split_last().expect("two or more nibbles");
        rounds.iter().fold(x, |s, &k| self.sbox.apply(s ^ k)) ^ last
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn challenge() -> Sbox {
        Sbox::new(CHALLENGE_SBOX.to_vec()).unwrap()
    }

    #[test]
    fn component_is_x1x2_plus_x3() {
        let c = component_check(&challenge(), CHALLENGE_U).unwrap();
        assert_eq!(c.text, "x1x2 + x3");
        // Direct evaluation of x1x2 ⊕ x3 with x1 the top bit.
        for x in 0..16u32 {
            let (x1, x2, x3) = (x >> 3 & 1, x >> 2 & 1, x >> 1 & 1);
            assert_eq!(dot(CHALLENGE_U, challenge().apply(x)), x1 & x2 ^ x3);
        }
        assert_eq!(component_check(&challenge(), 0).unwrap().text, "0");
        assert!(component_check(&challenge(), 0x10).is_err());
    }

    #[test]
    fn components_add() {
        let s = challenge();
        for u in 0..16 {
            for v in 0..16 {
                let mut sum = component_check(&s, u).unwrap().coeffs;
                sum.xor_assign(&component_check(&s, v).unwrap().coeffs);
                assert_eq!(sum, component_check(&s, u ^ v).unwrap().coeffs);
            }
        }
    }

    #[test]
    fn letter_key_identity_holds() {
        assert_eq!(letter_key_identity(&challenge(), CHALLENGE_U), None);
        assert!(letter_key_identity(&challenge(), 0b0011).is_some());
    }

    #[test]
    fn reported_pairs_contradict() {
        let v = students_contradiction(&challenge(), CHALLENGE_U, &CHALLENGE_PAIRS).unwrap();
        let literal: Vec<u32> = v.pairs.iter().map(|p| p.c_literal).collect();
        assert_eq!(literal, vec![0, 1]);
        let corrected: Vec<u32> = v.pairs.iter().map(|p| p.c).collect();
        assert_eq!(corrected, vec![1, 0]);
        assert!(v.contradiction && v.literal_contradiction);

        let one = students_contradiction(&challenge(), CHALLENGE_U, &CHALLENGE_PAIRS[..1]).unwrap();
        assert!(!one.contradiction && !one.literal_contradiction);
    }

    #[test]
    fn honest_cipher_is_consistent() {
        for seed in 0..20 {
            let pass = StudentsCipher::random_letters(seed, STUDENT_ROUNDS);
            let e = StudentsCipher::from_passphrase(challenge(), &pass).unwrap();
            assert_eq!(e.rounds(), STUDENT_ROUNDS);
            let pairs: Vec<(u32, u32)> = (0..16).map(|x| (x, e.encrypt(x))).collect();
            let v = students_contradiction(&challenge(), CHALLENGE_U, &pairs).unwrap();
            assert!(!v.contradiction, "seed {seed}");
            // The first key nibble's fixed bit moves x1 into the constant.
            assert!(v.literal_contradiction);
        }
    }

    #[test]
    fn cipher_structure() {
        let e = StudentsCipher::new(challenge(), vec![0x4, 0x1, 0x6]).unwrap();
        assert_eq!(e.rounds(), 2);
        let x = 0x9;
        assert_eq!(e.encrypt(x), challenge().apply(challenge().apply(x ^ 0x4) ^ 0x1) ^ 0x6);
        let p = StudentsCipher::from_passphrase(challenge(), "Az").unwrap();
        assert_eq!(p.key, vec![0x4, 0x1, 0x7, 0xa]);
        assert!(StudentsCipher::from_passphrase(challenge(), "a1").is_err());
    }

    #[test]
    fn pair_file() {
        let text = "# reported\n1010 -> 0101\nc 0\n";
        assert_eq!(parse_pairs(text).unwrap(), vec![(0xa, 0x5), (0xc, 0x0)]);
        assert!(parse_pairs("1 2 3").is_err());
        assert!(parse_pairs("10 2").is_err());
    }
}
