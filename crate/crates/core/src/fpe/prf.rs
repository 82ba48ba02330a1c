use std::cell::Cell;
use std::sync::atomic::{AtomicU64, Ordering};

use aes::cipher::{BlockEncrypt, KeyInit};
use serde::{Deserialize, Serialize};

use super::FpeError;

/// A keyed function on 128-bit blocks. Blocks are big-endian integers.
pub trait Prf: Sync {
    fn eval(&self, block: u128) -> u128;
}

impl<P: Prf + ?Sized> Prf for &P {
    fn eval(&self, block: u128) -> u128 {
        (**self).eval(block)
    }
}

const SPECK_ROUNDS: usize = 32;

/// Speck128/128: 64-bit words, rotations 8 and 3, 32 rounds.
#[derive(Clone, Debug)]
pub struct Speck128 {
    round_keys: [u64; SPECK_ROUNDS],
}

impl Speck128 {
    /// Key as a big-endian integer: high word `l_0`, low word `k_0`.
    pub fn new(key: u128) -> Self {
        let mut l = (key >> 64) as u64;
        let mut k = key as u64;
        let mut round_keys = [0u64; SPECK_ROUNDS];
        for (i, rk) in round_keys.iter_mut().enumerate() {
            *rk = k;
            l = k.wrapping_add(l.rotate_right(8)) ^ i as u64;
            k = k.rotate_left(3) ^ l;
        }
        Speck128 { round_keys }
    }

    pub fn encrypt(&self, block: u128) -> u128 {
        let mut x = (block >> 64) as u64;
        let mut y = block as u64;
        for &k in &self.round_keys {
            x = x.rotate_right(8).wrapping_add(y) ^ k;
            y = y.rotate_left(3) ^ x;
        }
        (x as u128) << 64 | y as u128
    }

    pub fn decrypt(&self, block: u128) -> u128 {
        let mut x = (block >> 64) as u64;
        let mut y = block as u64;
        for &k in self.round_keys.iter().rev() {
            y = (y ^ x).rotate_right(3);
            x = (x ^ k).wrapping_sub(y).rotate_left(8);
        }
        (x as u128) << 64 | y as u128
    }
}

impl Prf for Speck128 {
    fn eval(&self, block: u128) -> u128 {
        self.encrypt(block)
    }
}

/// AES-128 on big-endian blocks.
#[derive(Clone)]
pub struct Aes128Prf {
    cipher: aes::Aes128,
}

impl Aes128Prf {
    pub fn new(key: u128) -> Self {
        Aes128Prf { cipher: aes::Aes128::new(&key.to_be_bytes().into()) }
    }
}

impl std::fmt::Debug for Aes128Prf {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("Aes128Prf")
    }
}

impl Prf for Aes128Prf {
    fn eval(&self, block: u128) -> u128 {
        let mut b = block.to_be_bytes().into();
        self.cipher.encrypt_block(&mut b);
        u128::from_be_bytes(b.into())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrfBackend {
    #[default]
    Speck,
    Aes,
}

impl std::str::FromStr for PrfBackend {
    type Err = FpeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "speck" => Ok(PrfBackend::Speck),
            "aes" => Ok(PrfBackend::Aes),
            _ => Err(FpeError::BadKey(format!("unknown backend {s:?}"))),
        }
    }
}

/// A keyed PRF with a selectable backend.
#[derive(Clone, Debug)]
pub enum PrfHandle {
    Speck(Speck128),
    Aes(Aes128Prf),
}

impl PrfHandle {
    pub fn new(key: u128, backend: PrfBackend) -> Self {
        match backend {
            PrfBackend::Speck => PrfHandle::Speck(Speck128::new(key)),
            PrfBackend::Aes => PrfHandle::Aes(Aes128Prf::new(key)),
        }
    }

    /// Key from 32 hex digits.
    pub fn from_hex(key: &str, backend: PrfBackend) -> Result<Self, FpeError> {
        Ok(Self::new(parse_key(key)?, backend))
    }
}

pub fn parse_key(key: &str) -> Result<u128, FpeError> {
    let bytes: [u8; 16] = hex::decode(key.trim())
        .map_err(|e| FpeError::BadKey(e.to_string()))?
        .try_into()
        .map_err(|v: Vec<u8>| FpeError::BadKey(format!("expected 16 bytes, got {}", v.len())))?;
    Ok(u128::from_be_bytes(bytes))
}

impl Prf for PrfHandle {
    fn eval(&self, block: u128) -> u128 {
        match self {
            PrfHandle::Speck(p) => p.eval(block),
            PrfHandle::Aes(p) => p.eval(block),
        }
    }
}

/// Thread-safe call counter around another PRF.
#[derive(Debug)]
pub struct CountingPrf<P> {
    inner: P,
    calls: AtomicU64,
}

impl<P: Prf> CountingPrf<P> {
    pub fn new(inner: P) -> Self {
        CountingPrf { inner, calls: AtomicU64::new(0) }
    }

    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    pub fn reset(&self) -> u64 {
        self.calls.swap(0, Ordering::Relaxed)
    }
}

impl<P: Prf> Prf for CountingPrf<P> {
    fn eval(&self, block: u128) -> u128 {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.inner.eval(block)
    }
}

/// Single-thread call meter used inside sweeps.
pub(crate) struct Metered<'a, P: ?Sized> {
    pub inner: &'a P,
    pub calls: Cell<u64>,
}

impl<P: Prf + ?Sized> Metered<'_, P> {
    pub fn eval(&self, block: u128) -> u128 {
        self.calls.set(self.calls.get() + 1);
        self.inner.eval(block)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn speck_test_vector() {
        let c = Speck128::new(0x0f0e0d0c0b0a0908_0706050403020100);
        let pt = 0x6c61766975716520_7469206564616d20;
        let ct = 0xa65d985179783265_7860fedf5c570d18;
        assert_eq!(c.encrypt(pt), ct);
        assert_eq!(c.decrypt(ct), pt);
    }

    #[test]
    fn aes_fips197_vector() {
        let c = Aes128Prf::new(0x000102030405060708090a0b0c0d0e0f);
        assert_eq!(
            c.eval(0x00112233445566778899aabbccddeeff),
            0x69c4e0d86a7b0430d8cdb78070b4c55a
        );
    }

    #[test]
    fn key_parsing() {
        assert_eq!(parse_key("000102030405060708090a0b0c0d0e0f").unwrap(), 0x0102030405060708090a0b0c0d0e0f);
        assert!(parse_key("0011").is_err());
        assert!(parse_key("zz").is_err());
    }

    #[test]
    fn counter_counts() {
        let p = CountingPrf::new(Speck128::new(1));
        let a = p.eval(5);
        assert_eq!(p.eval(5), a);
        assert_eq!(p.calls(), 2);
        assert_eq!(p.reset(), 2);
        assert_eq!(p.calls(), 0);
    }
}
