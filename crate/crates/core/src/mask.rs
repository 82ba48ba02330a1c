//! Recovery of a message hidden by xor sharing among decoy rows under a
//! secret 5-bit encoding, by linearising `w_{i,c} = t_i · m_c`.
//!
//! Row `i` of an instance is a string of symbols, one per 5-bit chunk of a
//! hidden vector. Share rows xor to the message `y`; the others are random.
//! For a fixed bit offset `b` inside a chunk, `y_{5j+b} = ⊕_i w_{i, Z_{i,j}}`
//! with `t_i` the share indicator and `m_c` bit `b` of the preimage of
//! symbol `c`. Each known chunk gives one linear equation in the `w`.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::gf2::{gf2_solve, BitVec, Gf2Matrix};

pub const CHUNK: usize = 5;
pub const ALPHABET_SIZE: usize = 1 << CHUNK;
/// Symbol set of the challenge instance: base-32 digits with `y` for `v`.
pub const ALPHABET: &[u8; ALPHABET_SIZE] = b"0123456789abcdefghijklmnopqrstuy";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MaskError {
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("instance format: {0}")]
    Format(String),
    #[error("linear system for bit offset {0} is inconsistent")]
    Inconsistent(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SharingParams {
    pub message_bits: usize,
    /// Number of share rows; the same number of decoy rows is added.
    pub shares: usize,
    pub prefix_known: usize,
}

impl SharingParams {
    pub const CHALLENGE: SharingParams = SharingParams { message_bits: 6560, shares: 20, prefix_known: 6432 };

    pub fn rows(&self) -> usize {
        2 * self.shares
    }

    pub fn chunks(&self) -> usize {
        self.message_bits / CHUNK
    }

    pub fn variables(&self) -> usize {
        self.rows() * ALPHABET_SIZE
    }

    fn validate(&self) -> Result<(), MaskError> {
        if self.message_bits == 0 || self.message_bits % CHUNK != 0 {
            return Err(MaskError::Params(format!(
                "message length {} is not a positive multiple of {CHUNK}",
                self.message_bits
            )));
        }
        if self.shares == 0 {
            return Err(MaskError::Params("need at least one share".into()));
        }
        if self.prefix_known > self.message_bits {
            return Err(MaskError::Params("prefix longer than message".into()));
        }
        Ok(())
    }
}

/// What the attacker sees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SharingInstance {
    pub prefix: BitVec,
    /// Symbol indices into [`ALPHABET`].
    pub rows: Vec<Vec<u8>>,
}

/// Generator-side secrets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecretWitness {
    pub y: BitVec,
    /// Published row indices holding shares, ascending.
    pub share_rows: Vec<usize>,
    /// `sigma[i]` is the published position of hidden vector `i`; vectors
    /// `0..K` are the shares.
    pub sigma: Vec<usize>,
    /// `rho[v]` is the symbol index encoding chunk value `v`.
    pub rho: Vec<u8>,
}

impl SecretWitness {
    /// Xor of the decoded share rows.
    pub fn decode_shares(&self, inst: &SharingInstance) -> BitVec {
        let mut inv = [0u8; ALPHABET_SIZE];
        for (v, &s) in self.rho.iter().enumerate() {
            inv[s as usize] = v as u8;
        }
        let mut acc = BitVec::zeros(inst.message_bits());
        for &r in &self.share_rows {
            acc.xor_assign(&chunks_to_bits(inst.rows[r].iter().map(|&s| inv[s as usize])));
        }
        acc
    }
}

fn chunks_to_bits(chunks: impl Iterator<Item = u8>) -> BitVec {
    BitVec::from_bools(chunks.flat_map(|c| (0..CHUNK).map(move |b| c >> b & 1 == 1)))
}

fn bits_to_chunks(v: &BitVec) -> Vec<u8> {
    (0..v.len() / CHUNK)
        .map(|j| (0..CHUNK).fold(0u8, |acc, b| acc | (v.get(j * CHUNK + b) as u8) << b))
        .collect()
}

pub fn generate_instance(seed: u64, params: SharingParams) -> Result<(SharingInstance, SecretWitness), MaskError> {
    params.validate()?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let w = params.message_bits;
    let k = params.shares;
    let y = BitVec::random(w, &mut rng);
    let mut hidden: Vec<BitVec> = (0..2 * k - 1).map(|_| BitVec::random(w, &mut rng)).collect();
    // Last share completes the xor; decoys (indices k..2k) stay random.
    let mut last = y.clone();
    for s in &hidden[..k - 1] {
        last.xor_assign(s);
    }
    hidden.insert(k - 1, last);

    let mut sigma: Vec<usize> = (0..2 * k).collect();
    sigma.shuffle(&mut rng);
    let mut rho: Vec<u8> = (0..ALPHABET_SIZE as u8).collect();
    rho.shuffle(&mut rng);

    let mut rows = vec![Vec::new(); 2 * k];
    for (i, v) in hidden.iter().enumerate() {
        rows[sigma[i]] = bits_to_chunks(v).into_iter().map(|c| rho[c as usize]).collect();
    }
    let mut share_rows: Vec<usize> = sigma[..k].to_vec();
    share_rows.sort_unstable();
    let inst = SharingInstance { prefix: y.slice(0, params.prefix_known), rows };
    Ok((inst, SecretWitness { y, share_rows, sigma, rho }))
}

impl SharingInstance {
    pub fn message_bits(&self) -> usize {
        self.rows.first().map_or(0, |r| r.len() * CHUNK)
    }

    /// Line 1: prefix bits; then one line of symbols per row.
    pub fn to_text(&self) -> String {
        let mut s = self.prefix.to_bit_string();
        s.push('\n');
        for r in &self.rows {
            s.extend(r.iter().map(|&c| ALPHABET[c as usize] as char));
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self, MaskError> {
        let mut lines = text.lines();
        let first = lines.next().ok_or_else(|| MaskError::Format("empty file".into()))?;
        let prefix = BitVec::from_bit_str(first)
            .ok_or_else(|| MaskError::Format("first line must contain only 0 and 1".into()))?;
        let mut rows = Vec::new();
        for (n, line) in lines.enumerate() {
            if line.is_empty() {
                continue;
            }
            let row = line
                .bytes()
                .map(|b| {
                    ALPHABET.iter().position(|&a| a == b).map(|p| p as u8).ok_or_else(|| {
                        MaskError::Format(format!("line {}: symbol {:?} not in alphabet", n + 2, b as char))
                    })
                })
                .collect::<Result<Vec<u8>, _>>()?;
            rows.push(row);
        }
        let inst = SharingInstance { prefix, rows };
        inst.validate()?;
        Ok(inst)
    }

    fn validate(&self) -> Result<(), MaskError> {
        let len = self.rows.first().map(Vec::len).ok_or_else(|| MaskError::Format("no rows".into()))?;
        if let Some(i) = self.rows.iter().position(|r| r.len() != len) {
            return Err(MaskError::Format(format!("row {} has length {}, expected {len}", i + 1, self.rows[i].len())));
        }
        if self.rows.iter().flatten().any(|&c| c as usize >= ALPHABET_SIZE) {
            return Err(MaskError::Format("symbol index out of range".into()));
        }
        if self.prefix.len() > len * CHUNK {
            return Err(MaskError::Format("prefix longer than message".into()));
        }
        Ok(())
    }

    /// Applies a symbol bijection to every row.
    pub fn relabel(&self, perm: &[u8]) -> Self {
        SharingInstance {
            prefix: self.prefix.clone(),
            rows: self.rows.iter().map(|r| r.iter().map(|&c| perm[c as usize]).collect()).collect(),
        }
    }

    /// Keeps only the first `chunks` fully known chunks of the prefix.
    pub fn truncate_prefix(&self, chunks: usize) -> Self {
        SharingInstance {
            prefix: self.prefix.slice(0, (chunks * CHUNK).min(self.prefix.len())),
            rows: self.rows.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OffsetReport {
    pub offset: usize,
    pub equations: usize,
    pub rank: usize,
    /// Rows whose `w` block is non-constant, when every solution agrees.
    pub share_rows: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AttackReport {
    pub prefix_bits: usize,
    pub message_bits: usize,
    /// Predicted bits from `prefix_bits` on; `None` where undetermined.
    #[serde(skip)]
    pub predicted: Vec<Option<bool>>,
    /// The unknown suffix as a `'0'`/`'1'` string, only if fully determined.
    pub suffix_bits: Option<String>,
    /// Absolute indices of undetermined bits.
    pub ambiguous_bits: Vec<usize>,
    /// Share rows when identified consistently by every offset.
    pub share_rows: Option<Vec<usize>>,
    pub offsets: Vec<OffsetReport>,
}

impl AttackReport {
    pub fn suffix(&self) -> Option<BitVec> {
        self.suffix_bits.as_deref().and_then(BitVec::from_bit_str)
    }
}

fn functional(inst: &SharingInstance, j: usize) -> BitVec {
    let mut f = BitVec::zeros(inst.rows.len() * ALPHABET_SIZE);
    for (i, row) in inst.rows.iter().enumerate() {
        f.set(i * ALPHABET_SIZE + row[j] as usize, true);
    }
    f
}

struct OffsetResult {
    report: OffsetReport,
    /// `(absolute bit, prediction)` for every unknown bit at this offset.
    predictions: Vec<(usize, Option<bool>)>,
}

fn attack_offset(inst: &SharingInstance, b: usize) -> Result<OffsetResult, MaskError> {
    let nrows = inst.rows.len();
    let chunks = inst.rows[0].len();
    let known = inst.prefix.len() / CHUNK;
    let vars = nrows * ALPHABET_SIZE;
    let a = Gf2Matrix::from_rows((0..known).map(|j| functional(inst, j)).collect(), vars)
        .expect("functional width matches");
    let rhs = BitVec::from_bools((0..known).map(|j| inst.prefix.get(j * CHUNK + b)));
    let sol = gf2_solve(&a, &rhs).expect("rhs length matches");
    let particular = sol.particular.as_ref().ok_or(MaskError::Inconsistent(b))?;
    let null = &sol.nullspace_basis;

    let predictions = (0..chunks)
        .map(|j| j * CHUNK + b)
        .filter(|&bit| bit >= inst.prefix.len())
        .map(|bit| {
            let f = functional(inst, bit / CHUNK);
            let determined = null.iter().all(|v| !f.dot(v));
            (bit, determined.then(|| f.dot(particular)))
        })
        .collect();

    // A row's share status is fixed across solutions iff every nullspace
    // vector is constant on that row's block.
    let block_constant = |v: &BitVec, i: usize| {
        let first = v.get(i * ALPHABET_SIZE);
        (1..ALPHABET_SIZE).all(|c| v.get(i * ALPHABET_SIZE + c) == first)
    };
    let share_rows = null
        .iter()
        .all(|v| (0..nrows).all(|i| block_constant(v, i)))
        .then(|| (0..nrows).filter(|&i| !block_constant(particular, i)).collect());

    Ok(OffsetResult {
        report: OffsetReport { offset: b, equations: known, rank: vars - null.len(), share_rows },
        predictions,
    })
}

/// Solves one system per bit offset and predicts every unknown bit.
pub fn attack(inst: &SharingInstance) -> Result<AttackReport, MaskError> {
    inst.validate()?;
    let results = (0..CHUNK)
        .into_par_iter()
        .map(|b| attack_offset(inst, b))
        .collect::<Result<Vec<_>, _>>()?;
    let message_bits = inst.message_bits();
    let prefix_bits = inst.prefix.len();
    let mut predicted = vec![None; message_bits - prefix_bits];
    for r in &results {
        for &(bit, p) in &r.predictions {
            predicted[bit - prefix_bits] = p;
        }
    }
    let ambiguous_bits: Vec<usize> =
        (0..predicted.len()).filter(|&i| predicted[i].is_none()).map(|i| i + prefix_bits).collect();
    let suffix_bits = ambiguous_bits
        .is_empty()
        .then(|| predicted.iter().map(|p| if p.unwrap() { '1' } else { '0' }).collect());
    let first = results[0].report.share_rows.clone();
    let share_rows = first.filter(|s| results.iter().all(|r| r.report.share_rows.as_ref() == Some(s)));
    Ok(AttackReport {
        prefix_bits,
        message_bits,
        predicted,
        suffix_bits,
        ambiguous_bits,
        share_rows,
        offsets: results.into_iter().map(|r| r.report).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: SharingParams = SharingParams { message_bits: 1500, shares: 4, prefix_known: 1400 };

    #[test]
    fn witness_consistent() {
        let (inst, wit) = generate_instance(1, SharingParams::CHALLENGE).unwrap();
        assert_eq!(inst.rows.len(), 40);
        assert!(inst.rows.iter().all(|r| r.len() == 1312));
        assert_eq!(inst.prefix.len(), 6432);
        assert_eq!(wit.decode_shares(&inst), wit.y);
        assert_eq!(wit.share_rows.len(), 20);
        let (_, other) = generate_instance(2, SharingParams::CHALLENGE).unwrap();
        assert_ne!(wit.sigma, other.sigma);
        assert_ne!(wit.rho, other.rho);
    }

    #[test]
    fn text_round_trip() {
        let (inst, _) = generate_instance(3, SMALL).unwrap();
        let text = inst.to_text();
        assert!(text.lines().all(|l| l == l.trim_end()));
        assert_eq!(text.lines().count(), 9);
        assert_eq!(SharingInstance::parse(&text).unwrap(), inst);
        assert!(SharingInstance::parse("01\nabv\n").is_err());
        assert!(SharingInstance::parse("01\nab\nabc\n").is_err());
        assert!(SharingInstance::parse("0x\nab\n").is_err());
    }

    #[test]
    fn small_instance_recovered() {
        for seed in 0..5 {
            let (inst, wit) = generate_instance(seed, SMALL).unwrap();
            let rep = attack(&inst).unwrap();
            assert_eq!(rep.suffix().unwrap(), wit.y.slice(1400, 100), "seed {seed}");
            assert_eq!(rep.share_rows.as_ref(), Some(&wit.share_rows));
        }
    }

    #[test]
    fn underdetermined_reports_ambiguity() {
        let (inst, wit) = generate_instance(9, SMALL).unwrap();
        let short = inst.truncate_prefix(40);
        let rep = attack(&short).unwrap();
        assert!(rep.suffix_bits.is_none());
        assert!(!rep.ambiguous_bits.is_empty());
        for (i, p) in rep.predicted.iter().enumerate() {
            if let Some(v) = p {
                assert_eq!(*v, wit.y.get(short.prefix.len() + i));
            }
        }
    }

    #[test]
    fn in_band_identity_encoding() {
        let (inst, wit) = generate_instance(4, SMALL).unwrap();
        // Re-encode with ρ = identity: symbols become the raw chunk values.
        let mut inv = [0u8; ALPHABET_SIZE];
        for (v, &s) in wit.rho.iter().enumerate() {
            inv[s as usize] = v as u8;
        }
        let plain = inst.relabel(&inv);
        let rep = attack(&plain).unwrap();
        assert_eq!(rep.suffix().unwrap(), wit.y.slice(1400, 100));
    }

    #[test]
    fn inconsistent_prefix_detected() {
        let (mut inst, _) = generate_instance(5, SharingParams { message_bits: 200, shares: 1, prefix_known: 150 })
            .unwrap();
        // With one share and no decoys w is a function of the symbol only;
        // two chunks with the same symbol and different bits contradict it.
        inst.rows = vec![vec![0; 40]];
        inst.prefix = BitVec::from_bools((0..150).map(|i| i == 0));
        assert_eq!(attack(&inst).unwrap_err(), MaskError::Inconsistent(0));
    }
}
