use serde::{Deserialize, Serialize};

use super::PuzzleError;

pub const DIGITS: usize = 9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// Unknown `D`; substituting each `e_i` into `D` gives a multiple of 7.
    Tim,
    /// Unknown `F`; substituting each `f_i` into `E` gives a multiple of 7.
    Ann,
}

impl std::str::FromStr for Side {
    type Err = PuzzleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "tim" => Ok(Side::Tim),
            "ann" => Ok(Side::Ann),
            _ => Err(PuzzleError::Malformed(format!("unknown side {s:?}"))),
        }
    }
}

fn parse_digits(s: &str) -> Result<[u8; DIGITS], PuzzleError> {
    let bytes = s.as_bytes();
    if bytes.len() != DIGITS || !bytes.iter().all(u8::is_ascii_digit) {
        return Err(PuzzleError::Malformed(format!(
            "expected {DIGITS} decimal digits, got {s:?}"
        )));
    }
    let mut out = [0u8; DIGITS];
    for (o, b) in out.iter_mut().zip(bytes) {
        *o = b - b'0';
    }
    Ok(out)
}

/// `10^{8-i} mod 7` for position `i` (0 = most significant).
fn weights() -> [u8; DIGITS] {
    let mut w = [0u8; DIGITS];
    let mut acc = 1u8;
    for i in (0..DIGITS).rev() {
        w[i] = acc;
        acc = acc * 10 % 7;
    }
    w
}

fn inv7(x: u8) -> u8 {
    (1..7).find(|&y| x * y % 7 == 1).expect("weights are units mod 7")
}

fn value_mod7(d: &[u8; DIGITS]) -> u8 {
    d.iter().fold(0u8, |acc, &x| (acc * 10 + x) % 7)
}

/// Definition check: every single-digit substitution is a multiple of 7.
pub fn is_related(side: Side, candidate: &str, e: &str) -> Result<bool, PuzzleError> {
    let c = parse_digits(candidate)?;
    let e = parse_digits(e)?;
    let (base, donor) = match side {
        Side::Tim => (c, e),
        Side::Ann => (e, c),
    };
    Ok((0..DIGITS).all(|i| {
        let mut m = base;
        m[i] = donor[i];
        value_mod7(&m) == 0
    }))
}

/// All digits `0..=9` congruent to `r` mod 7.
fn class(r: u8) -> impl Iterator<Item = u8> {
    (0..10u8).filter(move |d| d % 7 == r)
}

fn expand(classes: &[u8; DIGITS], keep: impl Fn(&[u8; DIGITS]) -> bool, out: &mut Vec<String>) {
    fn rec(
        i: usize,
        cur: &mut [u8; DIGITS],
        classes: &[u8; DIGITS],
        keep: &dyn Fn(&[u8; DIGITS]) -> bool,
        out: &mut Vec<String>,
    ) {
        if i == DIGITS {
            if keep(cur) {
                out.push(cur.iter().map(|d| (b'0' + d) as char).collect());
            }
            return;
        }
        for d in class(classes[i]) {
            cur[i] = d;
            rec(i + 1, cur, classes, keep, out);
        }
    }
    rec(0, &mut [0; DIGITS], classes, &keep, out);
}

/// Every password related to `e` on the given side, sorted.
///
/// Fixing the residue `r` of the unknown number forces each digit's class
/// mod 7; candidates within those classes are then filtered for consistency.
pub fn related_passwords_enumerate(e: &str, side: Side) -> Result<Vec<String>, PuzzleError> {
    let e = parse_digits(e)?;
    let w = weights();
    let mut out = Vec::new();
    match side {
        Side::Tim => {
            for r in 0..7u8 {
                // D + (e_i - d_i) w_i ≡ 0  ⇒  d_i ≡ e_i + r / w_i
                let mut classes = [0u8; DIGITS];
                for i in 0..DIGITS {
                    classes[i] = (e[i] % 7 + r * inv7(w[i])) % 7;
                }
                expand(&classes, |d| value_mod7(d) == r, &mut out);
            }
        }
        Side::Ann => {
            let r = value_mod7(&e);
            // E + (f_i - e_i) w_i ≡ 0  ⇒  f_i ≡ e_i - r / w_i
            let mut classes = [0u8; DIGITS];
            for i in 0..DIGITS {
                classes[i] = (e[i] % 7 + 7 - r * inv7(w[i]) % 7) % 7;
            }
            expand(&classes, |_| true, &mut out);
        }
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_e(rng: &mut ChaCha8Rng) -> String {
        (0..DIGITS).map(|_| (b'0' + rng.random_range(0..10u8)) as char).collect()
    }

    #[test]
    fn outputs_satisfy_definition() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let e = random_e(&mut rng);
            for side in [Side::Tim, Side::Ann] {
                let list = related_passwords_enumerate(&e, side).unwrap();
                assert!(!list.is_empty());
                for c in &list {
                    assert!(is_related(side, c, &e).unwrap(), "{side:?} {c} for {e}");
                }
            }
        }
    }

    #[test]
    fn enumeration_is_complete_on_a_slice() {
        // Every D starting with 123, checked against the definition.
        let e = "314159265";
        let tim = related_passwords_enumerate(e, Side::Tim).unwrap();
        let brute: Vec<String> = (0..1_000_000u32)
            .map(|k| format!("{:03}{k:06}", 123))
            .filter(|c| is_related(Side::Tim, c, e).unwrap())
            .collect();
        for c in &brute {
            assert!(tim.binary_search(c).is_ok(), "missing {c}");
        }
    }

    #[test]
    fn zero_password() {
        let ann = related_passwords_enumerate("000000000", Side::Ann).unwrap();
        assert!(ann.contains(&"000000000".to_string()));
        assert!(ann.contains(&"777777777".to_string()));
        assert_eq!(ann.len(), 1 << DIGITS);
    }

    #[test]
    fn congruence_theorem() {
        let mut rng = ChaCha8Rng::seed_from_u64(2021);
        for _ in 0..100 {
            let e = random_e(&mut rng);
            let tim = related_passwords_enumerate(&e, Side::Tim).unwrap();
            let ann = related_passwords_enumerate(&e, Side::Ann).unwrap();
            let classes = |s: &String| s.bytes().map(|b| (b - b'0') % 7).collect::<Vec<_>>();
            let want = classes(&ann[0]);
            assert!(tim.iter().chain(&ann).all(|p| classes(p) == want), "e = {e}");
        }
    }

    #[test]
    fn malformed() {
        assert!(related_passwords_enumerate("12345678", Side::Tim).is_err());
        assert!(related_passwords_enumerate("12345678x", Side::Ann).is_err());
        assert!("bob".parse::<Side>().is_err());
    }
}
