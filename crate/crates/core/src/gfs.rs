//! Parity of NLFSR, Type-II and Target-Heavy Feistel round maps over
//! additive groups of order `2^t`.
//!
//! Only addition enters these maps, so a ring is represented by its additive
//! group `Z_{2^e_1} × ... × Z_{2^e_u}`. An element is packed as bit fields,
//! `e_1` least significant, and a state `(α_1, ..., α_m)` packs `α_1` lowest.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::gf2::{Permutation, Sign};

/// Largest `t·m` for which the permutation is built explicitly.
pub const MAX_STATE_BITS: u32 = 20;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GfsError {
    #[error("cannot parse group {0:?}")]
    GroupSyntax(String),
    #[error("state of {0} bits exceeds the limit of {MAX_STATE_BITS}")]
    TooLarge(u32),
    #[error("malformed spec: {0}")]
    Malformed(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Group2t {
    exponents: Vec<u32>,
}

impl Group2t {
    pub fn new(mut exponents: Vec<u32>) -> Result<Self, GfsError> {
        exponents.retain(|&e| e > 0);
        let t: u32 = exponents.iter().sum();
        if exponents.is_empty() || t > 16 {
            return Err(GfsError::Malformed(format!("group exponents {exponents:?}")));
        }
        Ok(Group2t { exponents })
    }

    pub fn cyclic(t: u32) -> Result<Self, GfsError> {
        Self::new(vec![t])
    }

    pub fn elementary(t: u32) -> Result<Self, GfsError> {
        Self::new(vec![1; t as usize])
    }

    /// `"z4"`, `"z2^2"`, `"z2xz4"`, `"gf8"` (additive group of GF(8)).
    pub fn parse(s: &str) -> Result<Self, GfsError> {
        let bad = || GfsError::GroupSyntax(s.to_string());
        let log2 = |n: &str| -> Result<u32, GfsError> {
            let v: u32 = n.parse().map_err(|_| bad())?;
            if v < 2 || !v.is_power_of_two() {
                return Err(bad());
            }
            Ok(v.trailing_zeros())
        };
        let mut exps = Vec::new();
        for factor in s.trim().to_ascii_lowercase().split(['x', '×']) {
            let factor = factor.trim();
            if let Some(rest) = factor.strip_prefix("gf") {
                let e = log2(rest)?;
                exps.extend(std::iter::repeat_n(1, e as usize));
            } else if let Some(rest) = factor.strip_prefix('z') {
                let (base, rep) = match rest.split_once('^') {
                    Some((b, r)) => (b, r.parse::<usize>().map_err(|_| bad())?),
                    None => (rest, 1),
                };
                let e = log2(base)?;
                exps.extend(std::iter::repeat_n(e, rep));
            } else {
                return Err(bad());
            }
        }
        Self::new(exps).map_err(|_| bad())
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    /// `log2 |R|`.
    pub fn t(&self) -> u32 {
        self.exponents.iter().sum()
    }

    /// `log2 char(R)`.
    pub fn c(&self) -> u32 {
        *self.exponents.iter().max().expect("non-empty")
    }

    pub fn size(&self) -> u32 {
        1 << self.t()
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        let mut out = 0;
        let mut shift = 0;
        for &e in &self.exponents {
            let mask = (1u32 << e) - 1;
            out |= (((a >> shift & mask) + (b >> shift & mask)) & mask) << shift;
            shift += e;
        }
        out
    }

    /// `i` with `ord(v) = 2^i`.
    pub fn order_exp(&self, v: u32) -> u32 {
        let mut shift = 0;
        let mut best = 0;
        for &e in &self.exponents {
            let x = v >> shift & ((1u32 << e) - 1);
            if x != 0 {
                best = best.max(e - x.trailing_zeros());
            }
            shift += e;
        }
        best
    }
}

impl std::fmt::Display for Group2t {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.exponents.iter().map(|e| format!("z{}", 1u32 << e)).collect();
        f.write_str(&parts.join("x"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GfsVariant {
    Nlfsr,
    Gfs2,
    Th,
}

impl std::str::FromStr for GfsVariant {
    type Err = GfsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "nlfsr" => Ok(GfsVariant::Nlfsr),
            "gfs2" => Ok(GfsVariant::Gfs2),
            "th" => Ok(GfsVariant::Th),
            _ => Err(GfsError::Malformed(format!("unknown variant {s:?}"))),
        }
    }
}

/// How to fill `h` tables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HProfile {
    Random,
    Zero,
    Constant(u32),
    /// Random permutation of `R` (tables with domain `R` only).
    Bijective,
    /// Random values of order exactly `2^i`.
    OrderExactly(u32),
}

/// Round map description: `m` blocks, lookup tables `h` and keys `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GfsSpec {
    pub variant: GfsVariant,
    pub m: u32,
    /// NLFSR: one table on `R^{m−1}` indexed by the packed `(α_2, ..., α_m)`;
    /// GFS2: `m/2` tables on `R`; TH: `m − 1` tables on `R` (`h_2..h_m`).
    pub h: Vec<Vec<u32>>,
    /// NLFSR: one key; GFS2: `m/2`; TH: `m − 1`.
    pub k: Vec<u32>,
}

fn table_shape(variant: GfsVariant, m: u32, t: u32) -> (usize, usize) {
    match variant {
        GfsVariant::Nlfsr => (1, 1usize << (t * (m - 1))),
        GfsVariant::Gfs2 => ((m / 2) as usize, 1usize << t),
        GfsVariant::Th => ((m - 1) as usize, 1usize << t),
    }
}

fn check_m(variant: GfsVariant, m: u32) -> Result<(), GfsError> {
    let min = if variant == GfsVariant::Nlfsr { 2 } else { 4 };
    if m < min || !m.is_power_of_two() {
        return Err(GfsError::Malformed(format!("m = {m} must be a power of two ≥ {min}")));
    }
    Ok(())
}

fn random_of_order<R: Rng>(group: &Group2t, i: u32, rng: &mut R) -> Result<u32, GfsError> {
    let candidates: Vec<u32> = (0..group.size()).filter(|&v| group.order_exp(v) == i).collect();
    if candidates.is_empty() {
        return Err(GfsError::Malformed(format!("no element of order 2^{i} in {group}")));
    }
    Ok(candidates[rng.random_range(0..candidates.len())])
}

impl GfsSpec {
    /// Tables from `profile` seeded by `h_seed`; keys uniform from `k_seed`.
    pub fn generate(
        variant: GfsVariant,
        group: &Group2t,
        m: u32,
        profile: HProfile,
        h_seed: u64,
        k_seed: u64,
    ) -> Result<Self, GfsError> {
        check_m(variant, m)?;
        let t = group.t();
        if t * (m - 1) > MAX_STATE_BITS {
            return Err(GfsError::TooLarge(t * m));
        }
        let (count, len) = table_shape(variant, m, t);
        let mut rng = ChaCha8Rng::seed_from_u64(h_seed);
        let size = group.size();
        let mut h = Vec::with_capacity(count);
        for _ in 0..count {
            let table = match profile {
                HProfile::Random => (0..len).map(|_| rng.random_range(0..size)).collect(),
                HProfile::Zero => vec![0; len],
                HProfile::Constant(v) => vec![v % size; len],
                HProfile::Bijective => {
                    if variant == GfsVariant::Nlfsr && m > 2 {
                        return Err(GfsError::Malformed("bijective h needs domain R".into()));
                    }
                    let mut p: Vec<u32> = (0..size).collect();
                    rand::seq::SliceRandom::shuffle(p.as_mut_slice(), &mut rng);
                    p
                }
                HProfile::OrderExactly(i) => {
                    (0..len).map(|_| random_of_order(group, i, &mut rng)).collect::<Result<_, _>>()?
                }
            };
            h.push(table);
        }
        let mut krng = ChaCha8Rng::seed_from_u64(k_seed);
        let k = (0..count).map(|_| krng.random_range(0..size)).collect();
        Ok(GfsSpec { variant, m, h, k })
    }

    pub fn validate(&self, group: &Group2t) -> Result<(), GfsError> {
        check_m(self.variant, self.m)?;
        let (count, len) = table_shape(self.variant, self.m, group.t());
        if self.h.len() != count || self.k.len() != count {
            return Err(GfsError::Malformed(format!("expected {count} tables and keys")));
        }
        if self.h.iter().any(|t| t.len() != len) {
            return Err(GfsError::Malformed(format!("tables must have {len} entries")));
        }
        let size = group.size();
        if self.h.iter().flatten().chain(&self.k).any(|&v| v >= size) {
            return Err(GfsError::Malformed("table value outside R".into()));
        }
        Ok(())
    }

    /// Image of one packed state.
    pub fn apply(&self, group: &Group2t, state: u32) -> u32 {
        let t = group.t();
        let m = self.m as usize;
        let mask = (1u32 << t) - 1;
        let a: Vec<u32> = (0..m).map(|i| state >> (t * i as u32) & mask).collect();
        let mut out = vec![0u32; m];
        match self.variant {
            GfsVariant::Nlfsr => {
                out[..m - 1].copy_from_slice(&a[1..]);
                let idx = state >> t;
                out[m - 1] = group.add(group.add(a[0], self.h[0][idx as usize]), self.k[0]);
            }
            GfsVariant::Gfs2 => {
                for p in 0..m / 2 {
                    let (even, odd) = (a[2 * p], a[2 * p + 1]);
                    out[2 * p] = group.add(group.add(odd, self.h[p][even as usize]), self.k[p]);
                    out[2 * p + 1] = if 2 * p + 2 < m { a[2 * p + 2] } else { a[0] };
                }
            }
            GfsVariant::Th => {
                for i in 1..m {
                    out[i - 1] = group.add(group.add(a[i], self.h[i - 1][a[0] as usize]), self.k[i - 1]);
                }
                out[m - 1] = a[0];
            }
        }
        out.iter().enumerate().fold(0, |acc, (i, &v)| acc | v << (t * i as u32))
    }
}

/// Explicit permutation table of the round map.
pub fn build_permutation(spec: &GfsSpec, group: &Group2t) -> Result<Permutation, GfsError> {
    spec.validate(group)?;
    let bits = group.t() * spec.m;
    if bits > MAX_STATE_BITS {
        return Err(GfsError::TooLarge(bits));
    }
    let map = (0..1u32 << bits).map(|s| spec.apply(group, s)).collect();
    Permutation::new(map).map_err(|_| GfsError::Malformed("round map is not bijective".into()))
}

pub fn sign_bruteforce(spec: &GfsSpec, group: &Group2t) -> Result<Sign, GfsError> {
    Ok(build_permutation(spec, group)?.sign())
}

/// Block rotation `(α_1, ..., α_m) ↦ (α_2, ..., α_m, α_1)`, `m = 2^ℓ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TauRho {
    pub t: u32,
    pub l: u32,
    pub tau: u64,
    /// `(cycle length, count)`, lengths ascending.
    pub census: Vec<(u64, u64)>,
}

impl TauRho {
    pub fn sign(&self) -> Sign {
        Sign::from_parity(self.tau % 2 == 1)
    }
}

/// `τ(ρ) = Σ_{j=1..ℓ} 2^{t2^{j−1}−j}(2^j − 1)(2^{t2^{j−1}} − 1)` and the cycle
/// census: `2^t` fixed points and `(2^{t2^j} − 2^{t2^{j−1}})/2^j` cycles of
/// length `2^j`.
pub fn tau_rho(t: u32, l: u32) -> Result<TauRho, GfsError> {
    if t == 0 || t.checked_shl(l).is_none_or(|b| b > 24) {
        return Err(GfsError::TooLarge(t << l.min(8)));
    }
    let mut tau = 0u64;
    let mut census = vec![(1u64, 1u64 << t)];
    for j in 1..=l {
        let half = t << (j - 1);
        tau += (1u64 << (half - j)) * ((1u64 << j) - 1) * ((1u64 << half) - 1);
        census.push((1u64 << j, ((1u64 << (2 * half)) - (1u64 << half)) >> j));
    }
    Ok(TauRho { t, l, tau, census })
}

/// Parity of `τ(ρ)` for any size: term `j` is odd iff `t·2^{j−1} = j`,
/// which happens only for `t = 1, j ∈ {1, 2}`.
pub fn rotation_sign(t: u32, l: u32) -> Sign {
    let odd_terms = (1..=l.min(2)).filter(|&j| t << (j - 1) == j).count();
    Sign::from_parity(odd_terms % 2 == 1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SignReport {
    pub variant: GfsVariant,
    pub group: String,
    pub t: u32,
    pub c: u32,
    pub l: u32,
    pub sign: i8,
    /// `r_i` for `i = 0..=c` (NLFSR only).
    pub r: Option<Vec<u64>>,
    pub case: String,
    /// False when the theorem does not cover the input.
    pub in_scope: bool,
}

/// Sign from the classification. NLFSR: `sign(ρ)·sign(θ_h)`, where
/// `sign(ρ) = −1` iff `ℓ = t = 1` and `sign(θ_h) = −1` iff `c = t` and
/// `r_c` is odd. GFS2 and TH: `+1` for `t ≥ 2`; for `t = 1` the result is
/// outside the theorem and is taken from brute force when the size allows.
pub fn sign_formula(spec: &GfsSpec, group: &Group2t) -> Result<SignReport, GfsError> {
    spec.validate(group)?;
    let (t, c) = (group.t(), group.c());
    let l = spec.m.trailing_zeros();
    let mut report = SignReport {
        variant: spec.variant,
        group: group.to_string(),
        t,
        c,
        l,
        sign: 1,
        r: None,
        case: String::new(),
        in_scope: true,
    };
    match spec.variant {
        GfsVariant::Nlfsr => {
            let mut r = vec![0u64; c as usize + 1];
            for &v in &spec.h[0] {
                r[group.order_exp(v) as usize] += 1;
            }
            let rc_odd = r[c as usize] % 2 == 1;
            let unit_rotation = l == 1 && t == 1;
            let (sign, case) = if c < t {
                (Sign::Even, "c < t")
            } else if rc_odd && unit_rotation {
                (Sign::Even, "t = c, r_c odd, ℓ = t = 1")
            } else if !rc_odd && !unit_rotation {
                (Sign::Even, "t = c, r_c even, ℓ·t ≥ 2")
            } else if rc_odd {
                (Sign::Odd, "t = c, r_c odd, ℓ·t ≥ 2")
            } else {
                (Sign::Odd, "t = c, r_c even, ℓ = t = 1")
            };
            debug_assert_eq!(
                sign,
                rotation_sign(t, l) * Sign::from_parity(c == t && rc_odd)
            );
            report.sign = sign.as_i8();
            report.r = Some(r);
            report.case = case.into();
        }
        GfsVariant::Gfs2 | GfsVariant::Th => {
            if t >= 2 {
                report.case = "t ≥ 2: always even".into();
            } else {
                report.in_scope = false;
                let brute = sign_bruteforce(spec, group)?;
                report.sign = brute.as_i8();
                report.case = "t = 1: outside the theorem, brute force".into();
            }
        }
    }
    Ok(report)
}
