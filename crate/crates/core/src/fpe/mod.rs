//! Format-preserving encryption of identifiers in `{0, ..., n − 1}` with the
//! Unbalanced Number Feistel scheme and two reductions for prime `n`.

mod prf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::is_prime;
pub use prf::{parse_key, Aes128Prf, CountingPrf, Prf, PrfBackend, PrfHandle, Speck128};
use prf::Metered;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FpeError {
    #[error("input {x} outside [0, {n})")]
    OutOfRange { x: u64, n: u64 },
    #[error("{0} has no split into two factors greater than 1")]
    Unsplittable(u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("at least {min} rounds required, got {rounds}")]
    TooFewRounds { rounds: u32, min: u32 },
    #[error("round constant list has {got} entries for {rounds} rounds")]
    ConstantCount { rounds: u32, got: usize },
    #[error("special point {a} outside [0, {n})")]
    SpecialPoint { a: u64, n: u64 },
    #[error("domain size {0} exceeds the sweep limit")]
    TooLarge(u64),
    #[error("bad key: {0}")]
    BadKey(String),
}

/// `n = n1·n2` with `n1 ≥ n2 > 1` as close as possible.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SplitDomain {
    pub n: u64,
    pub n1: u64,
    pub n2: u64,
}

impl SplitDomain {
    pub fn new(n: u64) -> Result<Self, FpeError> {
        let mut d = n.isqrt();
        while d >= 2 {
            if n % d == 0 {
                return Ok(SplitDomain { n, n1: n / d, n2: d });
            }
            d -= 1;
        }
        Err(FpeError::Unsplittable(n))
    }

    pub fn with_factors(n1: u64, n2: u64) -> Result<Self, FpeError> {
        let n = n1.checked_mul(n2).ok_or(FpeError::TooLarge(u64::MAX))?;
        if n1 < 2 || n2 < 2 {
            return Err(FpeError::Unsplittable(n));
        }
        Ok(SplitDomain { n, n1, n2 })
    }

    pub fn split(&self, x: u64) -> (u64, u64) {
        (x / self.n2, x % self.n2)
    }

    pub fn join(&self, x1: u64, x2: u64) -> u64 {
        x1 * self.n2 + x2
    }
}

pub const MIN_ROUNDS: u32 = 3;

/// Number of rounds, per-round constants `(α, β)` and the optional special
/// point used by the decrement reduction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeistelParams {
    constants: Vec<(u32, u32)>,
    special_point: Option<u64>,
}

impl FeistelParams {
    /// `d ≥ 3` rounds with `α = 2r`, `β = 2r + 1` for round `r`.
    pub fn new(rounds: u32) -> Result<Self, FpeError> {
        if rounds < MIN_ROUNDS {
            return Err(FpeError::TooFewRounds { rounds, min: MIN_ROUNDS });
        }
        Ok(Self::default_constants(rounds))
    }

    /// Like `new` but allows 1 or 2 rounds, for analysis only.
    pub fn reduced(rounds: u32) -> Result<Self, FpeError> {
        if rounds == 0 {
            return Err(FpeError::TooFewRounds { rounds, min: 1 });
        }
        Ok(Self::default_constants(rounds))
    }

    fn default_constants(rounds: u32) -> Self {
        FeistelParams {
            constants: (0..rounds).map(|r| (2 * r, 2 * r + 1)).collect(),
            special_point: None,
        }
    }

    pub fn with_constants(mut self, constants: Vec<(u32, u32)>) -> Result<Self, FpeError> {
        if constants.len() != self.constants.len() {
            return Err(FpeError::ConstantCount { rounds: self.rounds(), got: constants.len() });
        }
        self.constants = constants;
        Ok(self)
    }

    pub fn with_special_point(mut self, a: u64) -> Self {
        self.special_point = Some(a);
        self
    }

    pub fn rounds(&self) -> u32 {
        self.constants.len() as u32
    }

    pub fn constants(&self) -> &[(u32, u32)] {
        &self.constants
    }

    pub fn special_point(&self) -> Option<u64> {
        self.special_point
    }
}

/// Round function input: constant in the top 32 bits, value zero-extended.
#[inline]
fn block(constant: u32, value: u64) -> u128 {
    (constant as u128) << 96 | value as u128
}

#[inline]
fn round_value(f: &impl Fn(u128) -> u128, constant: u32, value: u64, m: u64) -> u64 {
    (f(block(constant, value)) % m as u128) as u64
}

fn unf_encrypt(x: u64, dom: &SplitDomain, params: &FeistelParams, f: &impl Fn(u128) -> u128) -> u64 {
    let (mut x1, mut x2) = dom.split(x);
    for &(alpha, beta) in &params.constants {
        let y1 = (x1 + round_value(f, alpha, x2, dom.n1)) % dom.n1;
        x2 = (x2 + round_value(f, beta, y1, dom.n2)) % dom.n2;
        x1 = y1;
    }
    dom.join(x1, x2)
}

fn unf_decrypt(y: u64, dom: &SplitDomain, params: &FeistelParams, f: &impl Fn(u128) -> u128) -> u64 {
    let (mut y1, mut x2) = dom.split(y);
    for &(alpha, beta) in params.constants.iter().rev() {
        x2 = (x2 + dom.n2 - round_value(f, beta, y1, dom.n2)) % dom.n2;
        y1 = (y1 + dom.n1 - round_value(f, alpha, x2, dom.n1)) % dom.n1;
    }
    dom.join(y1, x2)
}

fn check_range(x: u64, n: u64) -> Result<(), FpeError> {
    if x < n {
        Ok(())
    } else {
        Err(FpeError::OutOfRange { x, n })
    }
}

/// `d` UNF rounds on `x = x1·n2 + x2`; two PRF calls per round.
pub fn fpe_encrypt_composite<P: Prf + ?Sized>(
    x: u64,
    domain: &SplitDomain,
    params: &FeistelParams,
    prf: &P,
) -> Result<u64, FpeError> {
    check_range(x, domain.n)?;
    Ok(unf_encrypt(x, domain, params, &|b| prf.eval(b)))
}

pub fn fpe_decrypt_composite<P: Prf + ?Sized>(
    y: u64,
    domain: &SplitDomain,
    params: &FeistelParams,
    prf: &P,
) -> Result<u64, FpeError> {
    check_range(y, domain.n)?;
    Ok(unf_decrypt(y, domain, params, &|b| prf.eval(b)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Composite,
    PrimeDec,
    PrimeInc,
}

impl std::str::FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "composite" => Ok(Variant::Composite),
            "prime-dec" => Ok(Variant::PrimeDec),
            "prime-inc" => Ok(Variant::PrimeInc),
            _ => Err(format!("unknown variant {s:?}")),
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Variant::Composite => "composite",
            Variant::PrimeDec => "prime-dec",
            Variant::PrimeInc => "prime-inc",
        })
    }
}

/// Block used to derive the special point when none is configured. Round
/// inputs have bits 64..96 clear, so none can equal it.
const SPECIAL_POINT_BLOCK: u128 = u128::MAX;

/// Encryption on `{0, ..., n − 1}`; the key is supplied per call.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FpeScheme {
    n: u64,
    variant: Variant,
    /// Domain of the underlying UNF: `n`, `n − 1` or `n + 1`.
    inner: SplitDomain,
    params: FeistelParams,
}

impl FpeScheme {
    pub fn new(n: u64, variant: Variant, params: FeistelParams) -> Result<Self, FpeError> {
        if variant != Variant::Composite && !is_prime(n) {
            return Err(FpeError::NotPrime(n));
        }
        let inner = match variant {
            Variant::Composite => SplitDomain::new(n)?,
            Variant::PrimeDec => SplitDomain::new(n - 1)?,
            Variant::PrimeInc => SplitDomain::new(n.checked_add(1).ok_or(FpeError::TooLarge(n))?)?,
        };
        if let Some(a) = params.special_point {
            if variant == Variant::PrimeDec {
                check_range(a, n).map_err(|_| FpeError::SpecialPoint { a, n })?;
            }
        }
        Ok(FpeScheme { n, variant, inner, params })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn rounds(&self) -> u32 {
        self.params.rounds()
    }

    pub fn inner_domain(&self) -> &SplitDomain {
        &self.inner
    }

    /// PRF calls per encryption or decryption, independent of input and key.
    pub fn calls_per_op(&self) -> u64 {
        let per_unf = 2 * self.params.rounds() as u64;
        match self.variant {
            Variant::Composite | Variant::PrimeDec => per_unf,
            Variant::PrimeInc => 2 * per_unf,
        }
    }

    /// The special point of the decrement reduction, derived from the key
    /// when not configured. Costs one PRF call in the derived case.
    pub fn special_point<P: Prf + ?Sized>(&self, prf: &P) -> u64 {
        self.params
            .special_point
            .unwrap_or_else(|| (prf.eval(SPECIAL_POINT_BLOCK) % self.n as u128) as u64)
    }

    pub fn encrypt<P: Prf + ?Sized>(&self, x: u64, prf: &P) -> Result<u64, FpeError> {
        check_range(x, self.n)?;
        let a = (self.variant == Variant::PrimeDec).then(|| self.special_point(prf));
        Ok(self.encrypt_with(x, a, &|b| prf.eval(b)))
    }

    pub fn decrypt<P: Prf + ?Sized>(&self, y: u64, prf: &P) -> Result<u64, FpeError> {
        check_range(y, self.n)?;
        let a = (self.variant == Variant::PrimeDec).then(|| self.special_point(prf));
        Ok(self.decrypt_with(y, a, &|b| prf.eval(b)))
    }

    fn encrypt_with(&self, x: u64, a: Option<u64>, f: &impl Fn(u128) -> u128) -> u64 {
        let dom = &self.inner;
        match self.variant {
            Variant::Composite => unf_encrypt(x, dom, &self.params, f),
            Variant::PrimeDec => {
                let a = a.expect("special point resolved");
                if x == a {
                    // Dummy rounds keep the call count constant.
                    let _ = unf_encrypt(0, dom, &self.params, f);
                    self.n - 1
                } else {
                    let shifted = if x < a { x } else { x - 1 };
                    unf_encrypt(shifted, dom, &self.params, f)
                }
            }
            Variant::PrimeInc => {
                let y = unf_encrypt(x, dom, &self.params, f);
                let z = unf_encrypt(y, dom, &self.params, f);
                if y == self.n {
                    z
                } else {
                    y
                }
            }
        }
    }

    fn decrypt_with(&self, y: u64, a: Option<u64>, f: &impl Fn(u128) -> u128) -> u64 {
        let dom = &self.inner;
        match self.variant {
            Variant::Composite => unf_decrypt(y, dom, &self.params, f),
            Variant::PrimeDec => {
                let a = a.expect("special point resolved");
                if y == self.n - 1 {
                    let _ = unf_decrypt(0, dom, &self.params, f);
                    a
                } else {
                    let x = unf_decrypt(y, dom, &self.params, f);
                    if x < a {
                        x
                    } else {
                        x + 1
                    }
                }
            }
            Variant::PrimeInc => {
                let w = unf_decrypt(y, dom, &self.params, f);
                let v = unf_decrypt(w, dom, &self.params, f);
                if w == self.n {
                    v
                } else {
                    w
                }
            }
        }
    }
}

/// Decrement reduction for prime `n`: the special point maps to `n − 1`,
/// every other input goes through UNF on `n − 1` after closing the gap.
pub fn fpe_encrypt_prime<P: Prf + ?Sized>(
    x: u64,
    n: u64,
    params: &FeistelParams,
    prf: &P,
) -> Result<u64, FpeError> {
    FpeScheme::new(n, Variant::PrimeDec, params.clone())?.encrypt(x, prf)
}

/// Increment reduction for prime `n`: cycle-walk once through UNF on `n + 1`.
pub fn fpe_encrypt_prime_inc<P: Prf + ?Sized>(
    x: u64,
    n: u64,
    params: &FeistelParams,
    prf: &P,
) -> Result<u64, FpeError> {
    FpeScheme::new(n, Variant::PrimeInc, params.clone())?.encrypt(x, prf)
}

pub const MAX_SWEEP: u64 = 1 << 26;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepReport {
    pub n: u64,
    pub variant: Variant,
    pub rounds: u32,
    pub bijective: bool,
    pub round_trip: bool,
    pub prf_calls_min: u64,
    pub prf_calls_max: u64,
}

/// Encrypts every input, checks the image is all of `[0, n)`, decrypts
/// every output and records the per-input PRF call count range.
pub fn fpe_sweep<P: Prf + ?Sized>(scheme: &FpeScheme, prf: &P) -> Result<SweepReport, FpeError> {
    let n = scheme.n;
    if n > MAX_SWEEP {
        return Err(FpeError::TooLarge(n));
    }
    let a = (scheme.variant == Variant::PrimeDec).then(|| scheme.special_point(prf));
    let results: Vec<(u64, u64, bool)> = (0..n)
        .into_par_iter()
        .map(|x| {
            let meter = Metered { inner: prf, calls: Default::default() };
            let y = scheme.encrypt_with(x, a, &|b| meter.eval(b));
            let enc_calls = meter.calls.replace(0);
            let back = scheme.decrypt_with(y, a, &|b| meter.eval(b));
            debug_assert_eq!(meter.calls.get(), enc_calls);
            (y, enc_calls, back == x)
        })
        .collect();
    let mut seen = vec![false; n as usize];
    let mut bijective = true;
    let (mut lo, mut hi) = (u64::MAX, 0);
    let mut round_trip = true;
    for &(y, calls, ok) in &results {
        if y >= n || std::mem::replace(&mut seen[y as usize], true) {
            bijective = false;
        }
        lo = lo.min(calls);
        hi = hi.max(calls);
        round_trip &= ok;
    }
    Ok(SweepReport {
        n,
        variant: scheme.variant,
        rounds: scheme.rounds(),
        bijective,
        round_trip,
        prf_calls_min: lo,
        prf_calls_max: hi,
    })
}
