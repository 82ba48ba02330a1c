//! Vectorial Boolean functions and their text format.
//!
//! ```text
//! n m
//! <F(0) in lowercase hex>
//! <F(1)>
//! ...
//! <F(2^n - 1)>
//! ```
//!
//! Input `x` is the integer whose bit `i` is input variable `i`.

use std::fmt::Write as _;

use serde::Serialize;

use super::Gf2Error;

/// A function `F_2^in_bits → F_2^out_bits` stored as a lookup table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VectorialBoolFn {
    in_bits: u32,
    out_bits: u32,
    table: Vec<u64>,
}

pub const MAX_IN_BITS: u32 = 24;

impl VectorialBoolFn {
    pub fn new(in_bits: u32, out_bits: u32, table: Vec<u64>) -> Result<Self, Gf2Error> {
        if in_bits > MAX_IN_BITS || out_bits > 64 {
            return Err(Gf2Error::TableShape(format!(
                "unsupported size {in_bits} -> {out_bits}"
            )));
        }
        if table.len() != 1usize << in_bits {
            return Err(Gf2Error::TableShape(format!(
                "expected {} entries, found {}",
                1usize << in_bits,
                table.len()
            )));
        }
        let limit = if out_bits == 64 { u64::MAX } else { (1u64 << out_bits) - 1 };
        if let Some((x, v)) = table.iter().enumerate().find(|(_, &v)| v > limit) {
            return Err(Gf2Error::TableShape(format!(
                "entry {x} = {v:#x} exceeds {out_bits} output bits"
            )));
        }
        Ok(VectorialBoolFn {
            in_bits,
            out_bits,
            table,
        })
    }

    pub fn from_fn<F: Fn(u64) -> u64>(in_bits: u32, out_bits: u32, f: F) -> Result<Self, Gf2Error> {
        Self::new(in_bits, out_bits, (0..1u64 << in_bits).map(f).collect())
    }

    #[inline]
    pub fn in_bits(&self) -> u32 {
        self.in_bits
    }

    #[inline]
    pub fn out_bits(&self) -> u32 {
        self.out_bits
    }

    #[inline]
    pub fn eval(&self, x: u64) -> u64 {
        self.table[x as usize]
    }

    pub fn table(&self) -> &[u64] {
        &self.table
    }

    /// Coordinate function `j` as a Boolean truth table.
    pub fn coordinate(&self, j: u32) -> super::BitVec {
        super::BitVec::from_bools(self.table.iter().map(|v| v >> j & 1 == 1))
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.in_bits, self.out_bits);
        for v in &self.table {
            writeln!(s, "{v:x}").unwrap();
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self, Gf2Error> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Gf2Error::Parse("empty input".into()))?;
        let mut parts = header.split_whitespace();
        let mut field = |name: &str| -> Result<u32, Gf2Error> {
            parts
                .next()
                .ok_or_else(|| Gf2Error::Parse(format!("missing {name} in header")))?
                .parse()
                .map_err(|e| Gf2Error::Parse(format!("bad {name}: {e}")))
        };
        let n = field("n")?;
        let m = field("m")?;
        if n > MAX_IN_BITS {
            return Err(Gf2Error::TableShape(format!("n = {n} too large")));
        }
        let table = lines
            .map(|l| {
                u64::from_str_radix(l, 16).map_err(|e| Gf2Error::Parse(format!("bad entry {l:?}: {e}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(n, m, table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let f = VectorialBoolFn::from_fn(3, 4, |x| (x * 5) & 0xf).unwrap();
        let text = f.to_text();
        assert!(text.starts_with("3 4\n0\n5\na\nf\n"));
        assert_eq!(VectorialBoolFn::parse(&text).unwrap(), f);
    }

    #[test]
    fn shape_errors() {
        assert!(VectorialBoolFn::parse("2 1\n0\n1\n1\n").is_err());
        assert!(VectorialBoolFn::parse("1 1\n0\n2\n").is_err());
        assert!(VectorialBoolFn::parse("1 1\n0\nzz\n").is_err());
        assert!(VectorialBoolFn::parse("").is_err());
    }
}
