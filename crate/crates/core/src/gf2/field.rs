use serde::Serialize;

use super::Gf2Error;

/// Default irreducible modulus per extension degree (bit `i` = coefficient
/// of `X^i`). Index is the degree.
///
/// Low-weight irreducible trinomials/pentanomials; n = 8 is the AES
/// polynomial. Results that depend on the modulus report it.
pub const DEFAULT_MODULI: [u32; 17] = [
    0, 0, 0x7, 0xb, 0x13, 0x25, 0x43, 0x83, 0x11b, 0x211, 0x409, 0x805, 0x1053, 0x201b, 0x4443,
    0x8003, 0x1002d,
];

/// The finite field GF(2^n) in polynomial basis, 2 ≤ n ≤ 16.
///
/// Elements are integers below `2^n`; addition is xor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FieldGF2n {
    n: u32,
    modulus: u32,
}

/// Carry-less product of two polynomials of degree < 32.
fn clmul(a: u32, b: u32) -> u64 {
    let mut acc = 0u64;
    let a = a as u64;
    let mut b = b;
    let mut shift = 0;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a << shift;
        }
        b >>= 1;
        shift += 1;
    }
    acc
}

fn poly_degree(p: u64) -> i32 {
    63 - p.leading_zeros() as i32
}

fn poly_rem(mut a: u64, m: u64) -> u64 {
    let dm = poly_degree(m);
    while a != 0 && poly_degree(a) >= dm {
        a ^= m << (poly_degree(a) - dm);
    }
    a
}

/// Irreducibility by trial division by every polynomial of degree
/// 1..=deg/2. Exhaustive, fine for degree ≤ 16.
pub fn is_irreducible(modulus: u32) -> bool {
    let m = modulus as u64;
    let deg = poly_degree(m);
    if deg < 1 {
        return false;
    }
    for d in 1..=deg / 2 {
        for low in 0u64..(1 << d) {
            let divisor = (1u64 << d) | low;
            if poly_rem(m, divisor) == 0 {
                return false;
            }
        }
    }
    true
}

impl FieldGF2n {
    pub fn new(n: u32) -> Result<Self, Gf2Error> {
        if !(2..=16).contains(&n) {
            return Err(Gf2Error::FieldDegree(n));
        }
        Self::with_modulus(n, DEFAULT_MODULI[n as usize])
    }

    pub fn with_modulus(n: u32, modulus: u32) -> Result<Self, Gf2Error> {
        if !(2..=16).contains(&n) {
            return Err(Gf2Error::FieldDegree(n));
        }
        if poly_degree(modulus as u64) != n as i32 || !is_irreducible(modulus) {
            return Err(Gf2Error::Reducible { n, modulus });
        }
        Ok(FieldGF2n { n, modulus })
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.n
    }

    #[inline]
    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    #[inline]
    pub fn order(&self) -> u32 {
        1 << self.n
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        debug_assert!(a < self.order() && b < self.order());
        poly_rem(clmul(a, b), self.modulus as u64) as u32
    }

    /// `x^d` by square-and-multiply. `x^0 = 1` (including `0^0`).
    pub fn pow(&self, x: u32, d: u64) -> u32 {
        let mut base = x;
        let mut e = d;
        let mut acc = 1;
        while e != 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, x: u32) -> Option<u32> {
        (x != 0).then(|| self.pow(x, (self.order() - 2) as u64))
    }

    /// Multiplicative order of a nonzero element, by direct stepping.
    pub fn mult_order(&self, x: u32) -> Option<u32> {
        if x == 0 {
            return None;
        }
        let mut acc = x;
        let mut k = 1;
        while acc != 1 {
            acc = self.mul(acc, x);
            k += 1;
        }
        Some(k)
    }

    /// Lookup table of the power map `x ↦ x^d`.
    pub fn power_table(&self, d: u64) -> Vec<u32> {
        (0..self.order()).map(|x| self.pow(x, d)).collect()
    }
}

/// `gf2n_pow` as a free function.
pub fn gf2n_pow(field: &FieldGF2n, x: u32, d: u64) -> u32 {
    field.pow(x, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn default_moduli_irreducible() {
        for n in 2..=16 {
            FieldGF2n::new(n).unwrap();
        }
    }

    #[test]
    fn reducible_rejected() {
        // X^4 + 1 = (X + 1)^4
        assert!(matches!(
            FieldGF2n::with_modulus(4, 0x11),
            Err(Gf2Error::Reducible { .. })
        ));
        assert!(FieldGF2n::with_modulus(5, 0x13).is_err());
        assert!(matches!(FieldGF2n::new(17), Err(Gf2Error::FieldDegree(17))));
    }

    #[test]
    fn aes_field_known_product() {
        let f = FieldGF2n::new(8).unwrap();
        assert_eq!(f.mul(0x57, 0x83), 0xc1);
        assert_eq!(f.inv(0x53), Some(0xca));
    }

    #[test]
    fn power_basics_gf32() {
        let f = FieldGF2n::new(5).unwrap();
        for x in 0..32 {
            assert_eq!(f.pow(x, 1), x);
            assert_eq!(f.pow(x, 0), 1);
            if x != 0 {
                assert_eq!(f.pow(x, 31), 1);
            } else {
                assert_eq!(f.pow(0, 7), 0);
            }
        }
        // 31 is prime, so every element other than 0 and 1 generates.
        let orders: Vec<u32> = (1..32).map(|x| f.mult_order(x).unwrap()).collect();
        assert!(orders.contains(&31));
        assert_eq!(orders.iter().filter(|&&o| o == 31).count(), 30);
    }

    proptest! {
        #[test]
        fn ring_axioms(n in 2u32..=16, a in any::<u32>(), b in any::<u32>(), c in any::<u32>()) {
            let f = FieldGF2n::new(n).unwrap();
            let m = f.order() - 1;
            let (a, b, c) = (a & m, b & m, c & m);
            prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
            prop_assert_eq!(f.mul(a, b ^ c), f.mul(a, b) ^ f.mul(a, c));
            prop_assert_eq!(f.mul(a, b), f.mul(b, a));
        }
    }
}
