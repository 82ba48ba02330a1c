use serde::Serialize;

use super::PuzzleError;

pub const MAX_BUILD_INDEX: u32 = 30;

/// `A_1 = "0"`, `A_2 = "1"`, `A_n = A_{n-1} A_{n-2}`, and the ternary string
/// `B_n` of pairwise digit differences (`b_i = a_{2i-1} - a_{2i}`, with a
/// trailing odd digit copied as is).
pub fn fib_string_build(n: u32) -> Result<(String, Vec<i8>), PuzzleError> {
    if !(1..=MAX_BUILD_INDEX).contains(&n) {
        return Err(PuzzleError::IndexOutOfRange { n, max: MAX_BUILD_INDEX });
    }
    let (mut prev, mut cur) = (String::from("1"), String::from("0"));
    for _ in 1..n {
        let next = format!("{prev}{cur}");
        cur = prev;
        prev = next;
    }
    // After n - 1 steps `cur` holds A_n.
    let a = cur;
    let digits: Vec<i8> = a.bytes().map(|c| (c - b'0') as i8).collect();
    let b = digits
        .chunks(2)
        .map(|pair| if pair.len() == 2 { pair[0] - pair[1] } else { pair[0] })
        .collect();
    Ok((a, b))
}

/// Residue of `A_n` (read as a decimal number) modulo 11.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FibStringState {
    pub n: u64,
    pub residue: u8,
    /// Parity of `F_{n-2}` (1 = odd), with `F_{-1} = 1`, `F_0 = 0`.
    pub fib_parity: u8,
}

fn fib_parity(k: i64) -> u8 {
    // F_k is even exactly when 3 divides k.
    u8::from(k.rem_euclid(3) != 0)
}

/// States for `n = 1, 2, ...` via `A_n = 10^{F_{n-2}} A_{n-1} + A_{n-2}`.
/// Since `10 ≡ -1 (mod 11)` only the parity of `F_{n-2}` matters.
pub fn fib_residues() -> impl Iterator<Item = FibStringState> {
    let mut state: (u8, u8) = (0, 0);
    (1u64..).map(move |n| {
        let parity = fib_parity(n as i64 - 2);
        let residue = match n {
            1 => 0,
            2 => 1,
            _ => {
                let (a2, a1) = state;
                let lead = if parity == 1 { (11 - a1) % 11 } else { a1 };
                (lead + a2) % 11
            }
        };
        if n >= 2 {
            state = (state.1, residue);
        }
        FibStringState { n, residue, fib_parity: parity }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BalanceVerdict {
    pub n: u32,
    pub by_recurrence: bool,
    /// Present only when `A_n` is small enough to build.
    pub by_construction: Option<bool>,
}

impl BalanceVerdict {
    pub fn consistent(&self) -> bool {
        self.by_construction.is_none_or(|b| b == self.by_recurrence)
    }
}

/// Whether `B_n` has as many `+1` as `-1` entries.
pub fn fib_string_balanced(n: u32) -> Result<BalanceVerdict, PuzzleError> {
    if n == 0 {
        return Err(PuzzleError::IndexOutOfRange { n, max: u32::MAX });
    }
    let state = fib_residues().nth(n as usize - 1).expect("unbounded iterator");
    let by_construction = if n <= MAX_BUILD_INDEX {
        let (_, b) = fib_string_build(n)?;
        Some(b.iter().map(|&v| v as i64).sum::<i64>() == 0)
    } else {
        None
    };
    Ok(BalanceVerdict {
        n,
        by_recurrence: state.residue == 0,
        by_construction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_strings() {
        assert_eq!(fib_string_build(1).unwrap(), ("0".into(), vec![0]));
        assert_eq!(fib_string_build(5).unwrap(), ("10110".into(), vec![1, 0, 0]));
        assert_eq!(
            fib_string_build(6).unwrap(),
            ("10110101".into(), vec![1, 0, -1, -1])
        );
        assert!(fib_string_build(0).is_err());
        assert!(fib_string_build(31).is_err());
    }

    #[test]
    fn residues_first_eight() {
        let r: Vec<u8> = fib_residues().take(8).map(|s| s.residue).collect();
        assert_eq!(r, vec![0, 1, 10, 2, 1, 1, 0, 1]);
    }

    #[test]
    fn residues_match_long_division() {
        for n in 1..=25 {
            let (a, _) = fib_string_build(n).unwrap();
            let direct = a.bytes().fold(0u32, |acc, c| (acc * 10 + (c - b'0') as u32) % 11);
            let rec = fib_residues().nth(n as usize - 1).unwrap().residue as u32;
            assert_eq!(direct, rec, "n = {n}");
        }
    }

    #[test]
    fn verdicts_agree() {
        for n in 1..=25 {
            let v = fib_string_balanced(n).unwrap();
            assert!(v.consistent(), "n = {n}");
        }
        assert!(fib_string_balanced(7).unwrap().by_recurrence);
        assert!(!fib_string_balanced(6).unwrap().by_recurrence);
        for n in 1..=100 {
            assert_eq!(fib_string_balanced(n).unwrap().by_recurrence, n % 6 == 1);
        }
    }
}
