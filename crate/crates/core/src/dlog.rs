//! Secret-exponent recovery through an oracle that only returns an
//! injective encoding of `x^d mod n`.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{ext_gcd, factorize, inv_mod, is_prime, mul_mod, pow_mod};
use crate::fpe::{parse_key, Speck128};

/// Modulus of the challenge instance.
pub const CHALLENGE_N: u64 = 1_060_105_447_831;
/// Primitive root used for the challenge instance.
pub const CHALLENGE_G: u64 = 12;
/// Exponent recovered for the challenge instance.
pub const CHALLENGE_K: u64 = 856_182_870_494;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DlogError {
    #[error("{x} outside [0, {n})")]
    OutOfRange { x: u64, n: u64 },
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("n − 1 = {0} is not squarefree")]
    NotSquarefree(u64),
    #[error("{g} is not a primitive root modulo {n}")]
    NotPrimitive { g: u64, n: u64 },
    #[error("no code match for prime {p}")]
    NoMatch { p: u64 },
    #[error("recovered exponent fails verification")]
    VerificationFailed,
    #[error("machine spec: {0}")]
    BadSpec(String),
}

/// The secret side of the oracle as a serialisable file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MachineSpec {
    pub n: u64,
    pub k: u64,
    /// Encoding key, 32 hex digits.
    pub key: String,
}

impl MachineSpec {
    /// Random key from `seed`; random `k` too unless given.
    pub fn simulate(n: u64, k: Option<u64>, seed: u64) -> Result<Self, DlogError> {
        if !is_prime(n) {
            return Err(DlogError::NotPrime(n));
        }
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let key: u128 = rng.random();
        let k = match k {
            Some(k) if k >= n => return Err(DlogError::OutOfRange { x: k, n }),
            Some(k) => k,
            None => rng.random_range(0..n),
        };
        Ok(MachineSpec { n, k, key: format!("{key:032x}") })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain struct")
    }

    pub fn from_json(text: &str) -> Result<Self, DlogError> {
        serde_json::from_str(text).map_err(|e| DlogError::BadSpec(e.to_string()))
    }
}

/// `query(x, d) = Enc(x^d mod n)`, `query_secret(d) = Enc(k^d mod n)`, with
/// `Enc` a keyed block cipher (injective) and an atomic query counter.
#[derive(Debug)]
pub struct OracleMachine {
    n: u64,
    k: u64,
    enc: Speck128,
    queries: AtomicU64,
}

impl OracleMachine {
    pub fn new(spec: &MachineSpec) -> Result<Self, DlogError> {
        if !is_prime(spec.n) {
            return Err(DlogError::NotPrime(spec.n));
        }
        if spec.k >= spec.n {
            return Err(DlogError::OutOfRange { x: spec.k, n: spec.n });
        }
        let key = parse_key(&spec.key).map_err(|e| DlogError::BadSpec(e.to_string()))?;
        Ok(OracleMachine { n: spec.n, k: spec.k, enc: Speck128::new(key), queries: AtomicU64::new(0) })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn queries(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }

    fn encode(&self, v: u64) -> u128 {
        self.queries.fetch_add(1, Ordering::Relaxed);
        self.enc.encrypt(v as u128)
    }

    pub fn query(&self, x: u64, d: u64) -> Result<u128, DlogError> {
        if x >= self.n {
            return Err(DlogError::OutOfRange { x, n: self.n });
        }
        Ok(self.encode(pow_mod(x, d, self.n)))
    }

    pub fn query_secret(&self, d: u64) -> u128 {
        self.encode(pow_mod(self.k, d, self.n))
    }
}

/// Distinct primes of a squarefree `n − 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SmoothFactorization {
    pub n: u64,
    pub primes: Vec<u64>,
}

impl SmoothFactorization {
    pub fn new(n: u64) -> Result<Self, DlogError> {
        if !is_prime(n) {
            return Err(DlogError::NotPrime(n));
        }
        let f = factorize(n - 1);
        if f.iter().any(|&(_, e)| e > 1) {
            return Err(DlogError::NotSquarefree(n - 1));
        }
        Ok(SmoothFactorization { n, primes: f.into_iter().map(|(p, _)| p).collect() })
    }

    pub fn cofactor(&self, p: u64) -> u64 {
        (self.n - 1) / p
    }
}

pub fn is_primitive_root(g: u64, f: &SmoothFactorization) -> bool {
    g % f.n != 0 && f.primes.iter().all(|&p| pow_mod(g, f.cofactor(p), f.n) != 1)
}

pub fn find_primitive_root(f: &SmoothFactorization) -> u64 {
    (2..f.n).find(|&g| is_primitive_root(g, f)).unwrap_or(1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Pohlig–Hellman with a linear scan per prime.
    Ph,
    /// Pohlig–Hellman with equality-only baby-step giant-step per prime.
    PhBsgs,
    /// Roots of unity per prime, combined with Bezout coefficients.
    Bezout,
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ph" => Ok(Strategy::Ph),
            "ph-bsgs" => Ok(Strategy::PhBsgs),
            "bezout" => Ok(Strategy::Bezout),
            _ => Err(format!("unknown strategy {s:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PrimeResult {
    pub p: u64,
    /// `x mod p` for the PH strategies, the root-of-unity exponent for Bezout.
    pub x_p: u64,
    pub queries: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Recovery {
    pub strategy: Strategy,
    pub k: u64,
    pub queries: u64,
    pub per_prime: Vec<PrimeResult>,
}

/// Counts queries made by one subproblem, independent of other threads.
struct Local<'a> {
    m: &'a OracleMachine,
    count: u64,
}

impl Local<'_> {
    fn query(&mut self, x: u64, d: u64) -> Result<u128, DlogError> {
        self.count += 1;
        self.m.query(x, d)
    }

    fn query_secret(&mut self, d: u64) -> u128 {
        self.count += 1;
        self.m.query_secret(d)
    }
}

/// Scan `i = 0..p` for `Enc(g^{ie}) = Enc(k^e)`.
pub fn naive_subproblem(m: &OracleMachine, g: u64, p: u64, e: u64) -> Result<PrimeResult, DlogError> {
    let mut q = Local { m, count: 0 };
    let target = q.query_secret(e);
    for i in 0..p {
        if q.query(g, i * e)? == target {
            return Ok(PrimeResult { p, x_p: i, queries: q.count });
        }
    }
    Err(DlogError::NoMatch { p })
}

/// Equality-only BSGS. With `h = k^e = γ^x`, `γ = g^e` of order `p`, baby
/// steps store `h^j` for `1 ≤ j ≤ J = ⌈√p⌉` and giant steps test `γ^l` for
/// `|l| ≤ J`. Some pair satisfies `xj ≡ l (mod p)` because `J² ≥ p`, so
/// `x = l·j⁻¹`. One further query confirms.
pub fn bsgs_subproblem(m: &OracleMachine, g: u64, p: u64, e: u64) -> Result<PrimeResult, DlogError> {
    let mut q = Local { m, count: 0 };
    let big_j = p.isqrt() + u64::from(p.isqrt() * p.isqrt() < p);
    let mut baby: HashMap<u128, u64> = HashMap::new();
    let mut first = None;
    for j in 1..=big_j {
        if j % p == 0 {
            continue;
        }
        let code = q.query_secret(j * e);
        first.get_or_insert(code);
        baby.entry(code).or_insert(j);
    }
    let first = first.ok_or(DlogError::NoMatch { p })?;
    let mut tried = Vec::with_capacity(2 * big_j as usize + 1);
    let mut found = None;
    'giant: for mag in 0..=big_j {
        for l in [mag as i64, -(mag as i64)] {
            let r = l.rem_euclid(p as i64) as u64;
            if tried.contains(&r) {
                continue;
            }
            tried.push(r);
            if let Some(&j) = baby.get(&q.query(g, r * e)?) {
                found = Some(mul_mod(r, inv_mod(j, p).expect("j < p"), p));
                break 'giant;
            }
        }
    }
    let x_p = found.ok_or(DlogError::NoMatch { p })?;
    if q.query(g, x_p * e)? != first {
        return Err(DlogError::NoMatch { p });
    }
    Ok(PrimeResult { p, x_p, queries: q.count })
}

fn check_zero(m: &OracleMachine) -> Result<bool, DlogError> {
    Ok(m.query(0, 1)? == m.query_secret(1))
}

fn verify(m: &OracleMachine, k: u64) -> Result<(), DlogError> {
    if m.query(k, 1)? == m.query_secret(1) {
        Ok(())
    } else {
        Err(DlogError::VerificationFailed)
    }
}

/// CRT for pairwise coprime moduli.
fn crt(residues: &[(u64, u64)], modulus: u64) -> u64 {
    let mut x = 0u64;
    for &(r, p) in residues {
        let mp = modulus / p;
        let coef = mul_mod(mp, inv_mod(mp % p, p).expect("coprime"), modulus);
        x = (x + mul_mod(r, coef, modulus)) % modulus;
    }
    x
}

pub fn pohlig_hellman_recover(
    m: &OracleMachine,
    g: u64,
    f: &SmoothFactorization,
    use_bsgs: bool,
) -> Result<Recovery, DlogError> {
    let strategy = if use_bsgs { Strategy::PhBsgs } else { Strategy::Ph };
    let start = m.queries();
    if check_zero(m)? {
        return Ok(Recovery { strategy, k: 0, queries: m.queries() - start, per_prime: Vec::new() });
    }
    let per_prime = f
        .primes
        .par_iter()
        .map(|&p| {
            let e = f.cofactor(p);
            if use_bsgs {
                bsgs_subproblem(m, g, p, e)
            } else {
                naive_subproblem(m, g, p, e)
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    let residues: Vec<(u64, u64)> = per_prime.iter().map(|r| (r.x_p, r.p)).collect();
    let x = crt(&residues, f.n - 1);
    let k = pow_mod(g, x, f.n);
    verify(m, k)?;
    Ok(Recovery { strategy, k, queries: m.queries() - start, per_prime })
}

/// Bezout coefficients `b_i` with `Σ a_i b_i ≡ 1 (mod n − 1)`, as signed
/// representatives of least magnitude.
pub fn bezout_coefficients(a: &[u64], modulus: u64) -> Vec<i128> {
    let m = modulus as i128;
    let mut g = a[0] as i128;
    let mut coeffs = vec![1i128];
    for &ai in &a[1..] {
        let (ng, s, t) = ext_gcd(g, ai as i128);
        for c in coeffs.iter_mut() {
            *c = (*c * s).rem_euclid(m);
        }
        coeffs.push(t.rem_euclid(m));
        g = ng;
    }
    debug_assert_eq!(g, 1);
    coeffs
        .into_iter()
        .map(|c| if c > m / 2 { c - m } else { c })
        .collect()
}

pub fn bezout_recover(m: &OracleMachine, g: u64, f: &SmoothFactorization) -> Result<Recovery, DlogError> {
    let start = m.queries();
    if check_zero(m)? {
        return Ok(Recovery { strategy: Strategy::Bezout, k: 0, queries: m.queries() - start, per_prime: Vec::new() });
    }
    let n = f.n;
    // k_i = k^{a_i} is a p_i-th root of unity, i.e. some g^{j a_i}.
    let roots = f
        .primes
        .par_iter()
        .map(|&p| {
            let a = f.cofactor(p);
            let mut q = Local { m, count: 0 };
            let target = q.query_secret(a);
            for j in 0..p {
                if q.query(g, j * a)? == target {
                    return Ok((PrimeResult { p, x_p: j, queries: q.count }, pow_mod(g, j * a, n)));
                }
            }
            Err(DlogError::NoMatch { p })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let a: Vec<u64> = f.primes.iter().map(|&p| f.cofactor(p)).collect();
    let b = bezout_coefficients(&a, n - 1);
    let mut k = 1u64;
    for ((_, ki), &bi) in roots.iter().zip(&b) {
        let base = if bi < 0 { inv_mod(*ki, n).expect("unit") } else { *ki };
        k = mul_mod(k, pow_mod(base, bi.unsigned_abs() as u64, n), n);
    }
    verify(m, k)?;
    Ok(Recovery {
        strategy: Strategy::Bezout,
        k,
        queries: m.queries() - start,
        per_prime: roots.into_iter().map(|(r, _)| r).collect(),
    })
}

/// Runs a strategy end to end. `g` defaults to the smallest primitive root.
pub fn recover(m: &OracleMachine, strategy: Strategy, g: Option<u64>) -> Result<Recovery, DlogError> {
    let f = SmoothFactorization::new(m.n())?;
    let g = g.unwrap_or_else(|| find_primitive_root(&f));
    if !is_primitive_root(g, &f) {
        return Err(DlogError::NotPrimitive { g, n: f.n });
    }
    match strategy {
        Strategy::Ph => pohlig_hellman_recover(m, g, &f, false),
        Strategy::PhBsgs => pohlig_hellman_recover(m, g, &f, true),
        Strategy::Bezout => bezout_recover(m, g, &f),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: [u64; 7] = [31, 43, 67, 79, 139, 211, 2311];

    fn machine(n: u64, k: u64, seed: u64) -> OracleMachine {
        OracleMachine::new(&MachineSpec::simulate(n, Some(k), seed).unwrap()).unwrap()
    }

    /// Exponent search by direct powering.
    fn brute_dlog(g: u64, k: u64, n: u64) -> Option<u64> {
        (0..n - 1).find(|&x| pow_mod(g, x, n) == k)
    }

    #[test]
    fn challenge_factorisation_and_root() {
        let f = SmoothFactorization::new(CHALLENGE_N).unwrap();
        assert_eq!(f.primes, vec![2, 3, 5, 11, 13, 17, 19, 23, 29, 31, 37]);
        assert!(is_primitive_root(CHALLENGE_G, &f));
        assert_eq!(find_primitive_root(&f), CHALLENGE_G);
    }

    #[test]
    fn oracle_basics() {
        let m = machine(2311, 1234, 1);
        let one = m.query(1, 0).unwrap();
        for x in 1..50 {
            assert_eq!(m.query(x, 0).unwrap(), one);
        }
        assert_ne!(m.query(0, 1).unwrap(), m.query_secret(1));
        let mut codes: Vec<u128> = (0..2311).map(|x| m.query(x, 1).unwrap()).collect();
        codes.sort();
        codes.dedup();
        assert_eq!(codes.len(), 2311);
        assert!(m.query(2311, 1).is_err());
    }

    #[test]
    fn all_strategies_small_moduli() {
        let mut rng = ChaCha20Rng::seed_from_u64(99);
        for (i, &n) in SMALL.iter().cycle().take(100).enumerate() {
            let k = rng.random_range(0..n);
            let m = machine(n, k, i as u64);
            let f = SmoothFactorization::new(n).unwrap();
            let g = find_primitive_root(&f);
            if k != 0 {
                assert_eq!(pow_mod(g, brute_dlog(g, k, n).unwrap(), n), k);
            }
            for s in [Strategy::Ph, Strategy::PhBsgs, Strategy::Bezout] {
                assert_eq!(recover(&m, s, None).unwrap().k, k, "n = {n}, k = {k}, {s:?}");
            }
        }
    }

    #[test]
    fn zero_secret() {
        let m = machine(211, 0, 5);
        for s in [Strategy::Ph, Strategy::PhBsgs, Strategy::Bezout] {
            let r = recover(&m, s, None).unwrap();
            assert_eq!((r.k, r.queries), (0, 2));
        }
    }

    #[test]
    fn degenerate_single_prime() {
        // n − 1 = 2
        let m = machine(3, 2, 0);
        assert_eq!(bezout_coefficients(&[1], 2), vec![1]);
        assert_eq!(recover(&m, Strategy::Bezout, None).unwrap().k, 2);
    }

    #[test]
    fn bsgs_matches_naive_per_prime() {
        let m = machine(CHALLENGE_N, CHALLENGE_K, 7);
        let f = SmoothFactorization::new(CHALLENGE_N).unwrap();
        for &p in &f.primes {
            let e = f.cofactor(p);
            let a = naive_subproblem(&m, CHALLENGE_G, p, e).unwrap();
            let b = bsgs_subproblem(&m, CHALLENGE_G, p, e).unwrap();
            assert_eq!(a.x_p, b.x_p, "p = {p}");
            let j = p.isqrt() + u64::from(p.isqrt() * p.isqrt() < p);
            assert!(b.queries <= 3 * j + 2);
        }
    }

    #[test]
    fn bsgs_zero_residue() {
        // k a p-th power residue ⇒ x_p = 0 for that p.
        let n = 211;
        let f = SmoothFactorization::new(n).unwrap();
        let g = find_primitive_root(&f);
        let k = pow_mod(g, 7, n);
        let m = machine(n, k, 3);
        let r = bsgs_subproblem(&m, g, 7, f.cofactor(7)).unwrap();
        assert_eq!(r.x_p, 0);
    }

    #[test]
    fn bezout_identity() {
        let f = SmoothFactorization::new(CHALLENGE_N).unwrap();
        let a: Vec<u64> = f.primes.iter().map(|&p| f.cofactor(p)).collect();
        let b = bezout_coefficients(&a, CHALLENGE_N - 1);
        let m = (CHALLENGE_N - 1) as i128;
        let s = a.iter().zip(&b).fold(0i128, |acc, (&ai, &bi)| (acc + ai as i128 * bi).rem_euclid(m));
        assert_eq!(s, 1);
        assert!(b.iter().any(|&x| x < 0));
    }

    #[test]
    fn challenge_instance_three_ways() {
        let m = machine(CHALLENGE_N, CHALLENGE_K, 2021);
        let naive = recover(&m, Strategy::Ph, Some(CHALLENGE_G)).unwrap();
        let bsgs = recover(&m, Strategy::PhBsgs, Some(CHALLENGE_G)).unwrap();
        let bez = recover(&m, Strategy::Bezout, Some(CHALLENGE_G)).unwrap();
        assert_eq!([naive.k, bsgs.k, bez.k], [CHALLENGE_K; 3]);
        assert!(bsgs.queries < naive.queries);
        // Worst case for the scan: one target query plus p codes per prime.
        assert!(naive.queries <= 2 + 190 + 11);
    }

    #[test]
    fn spec_errors() {
        assert!(MachineSpec::simulate(100, None, 0).is_err());
        assert!(MachineSpec::simulate(31, Some(31), 0).is_err());
        let m = machine(31, 3, 0);
        assert_eq!(recover(&m, Strategy::Ph, Some(1)).unwrap_err(), DlogError::NotPrimitive { g: 1, n: 31 });
        let spec = MachineSpec::simulate(2311, None, 4).unwrap();
        assert_eq!(MachineSpec::from_json(&spec.to_json()).unwrap(), spec);
        assert!(SmoothFactorization::new(37).is_err()); // 36 = 2²·3²
    }
}
