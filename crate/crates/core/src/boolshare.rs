//! Deciding whether `G: F_2^{sn} → F_2^{sm}` is an `s`-Boolean sharing.
//!
//! Share `i` (from 0) occupies input bits `[i·n, (i+1)·n)` and output bits
//! `[i·m, (i+1)·m)`. A search over input orders is described by
//! `input_order`: canonical bit `k` (share `k / n`, coordinate `k % n`) is
//! read from input bit `input_order[k]` of `G`.

use rayon::prelude::*;
use serde::Serialize;

use crate::gf2::{anf, BitVec, VectorialBoolFn};

/// Largest `sn` accepted by the permutation search.
pub const MAX_SEARCH_BITS: u32 = 9;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ShareError {
    #[error("s must be at least 1")]
    ZeroShares,
    #[error("{what} = {bits} is not divisible by s = {s}")]
    Indivisible { what: &'static str, bits: u32, s: u32 },
    #[error("{bits} input bits exceed the search limit of {max}")]
    TooLarge { bits: u32, max: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ShareMode {
    Ordered,
    Any,
    Anf,
}

impl std::str::FromStr for ShareMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ordered" => Ok(ShareMode::Ordered),
            "any" => Ok(ShareMode::Any),
            "anf" => Ok(ShareMode::Anf),
            _ => Err(format!("unknown mode {s:?} (ordered|any|anf)")),
        }
    }
}

/// Size of the input-order search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchSpace {
    /// `(sn)!`
    pub permutations: u64,
    /// `(sn)! / (s!·n!)`: orders up to reordering whole shares and
    /// relabelling coordinates uniformly in every share.
    pub representatives: u64,
    pub checked: u64,
    pub quotient: &'static str,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SharingVerdict {
    pub mode: ShareMode,
    pub s: u32,
    pub n: u32,
    pub m: u32,
    pub is_sharing: bool,
    /// The unshared function, present iff `is_sharing`.
    pub f: Option<VectorialBoolFn>,
    pub input_order: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchSpace>,
    /// Why the answer is negative, when known.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl SharingVerdict {
    /// Re-checks `⊕ G_i(z) = F(⊕ z_i)` on every input. Negative verdicts
    /// re-check trivially.
    pub fn verify(&self, g: &VectorialBoolFn) -> bool {
        let Some(f) = &self.f else { return !self.is_sharing };
        let shape = Shape { s: self.s, n: self.n, m: self.m };
        let scatter = Scatter::new(&self.input_order);
        (0..1u64 << (self.s * self.n)).all(|z| {
            shape.fold_out(g.eval(scatter.apply(z))) == f.eval(shape.fold_in(z))
        })
    }
}

#[derive(Clone, Copy, Debug)]
struct Shape {
    s: u32,
    n: u32,
    m: u32,
}

impl Shape {
    fn of(g: &VectorialBoolFn, s: u32) -> Result<Self, ShareError> {
        if s == 0 {
            return Err(ShareError::ZeroShares);
        }
        let (ib, ob) = (g.in_bits(), g.out_bits());
        if ib % s != 0 || ib == 0 {
            return Err(ShareError::Indivisible { what: "in_bits", bits: ib, s });
        }
        if ob % s != 0 || ob == 0 {
            return Err(ShareError::Indivisible { what: "out_bits", bits: ob, s });
        }
        Ok(Shape { s, n: ib / s, m: ob / s })
    }

    fn fold(v: u64, s: u32, w: u32) -> u64 {
        let mask = if w == 64 { u64::MAX } else { (1u64 << w) - 1 };
        (0..s).fold(0, |acc, i| acc ^ (v >> (i * w) & mask))
    }

    fn fold_in(&self, z: u64) -> u64 {
        Self::fold(z, self.s, self.n)
    }

    fn fold_out(&self, y: u64) -> u64 {
        Self::fold(y, self.s, self.m)
    }
}

/// Moves canonical bit `k` to position `order[k]`.
struct Scatter {
    identity: bool,
    order: Vec<u32>,
}

impl Scatter {
    fn new(order: &[usize]) -> Self {
        Scatter {
            identity: order.iter().enumerate().all(|(k, &p)| k == p),
            order: order.iter().map(|&p| p as u32).collect(),
        }
    }

    fn apply(&self, z: u64) -> u64 {
        if self.identity {
            return z;
        }
        self.order
            .iter()
            .enumerate()
            .fold(0, |acc, (k, &p)| acc | (z >> k & 1) << p)
    }
}

/// One pass over `2^{sn}` inputs with a `2^n` memo.
fn check_order(g: &VectorialBoolFn, shape: Shape, order: &[usize]) -> Option<VectorialBoolFn> {
    const UNSET: u64 = u64::MAX;
    let scatter = Scatter::new(order);
    let mut memo = vec![UNSET; 1 << shape.n];
    for z in 0..1u64 << (shape.s * shape.n) {
        let x = shape.fold_in(z) as usize;
        let v = shape.fold_out(g.eval(scatter.apply(z)));
        if memo[x] == UNSET {
            memo[x] = v;
        } else if memo[x] != v {
            return None;
        }
    }
    Some(VectorialBoolFn::new(shape.n, shape.m, memo).expect("shape is consistent"))
}

fn verdict(mode: ShareMode, shape: Shape, f: Option<VectorialBoolFn>, order: Vec<usize>) -> SharingVerdict {
    SharingVerdict {
        mode,
        s: shape.s,
        n: shape.n,
        m: shape.m,
        is_sharing: f.is_some(),
        f,
        input_order: order,
        search: None,
        detail: None,
    }
}

pub fn is_sharing_ordered(g: &VectorialBoolFn, s: u32) -> Result<SharingVerdict, ShareError> {
    let shape = Shape::of(g, s)?;
    let order: Vec<usize> = (0..g.in_bits() as usize).collect();
    let f = check_order(g, shape, &order);
    let mut v = verdict(ShareMode::Ordered, shape, f, order);
    if !v.is_sharing {
        v.detail = Some("xor of output shares is not a function of the xor of input shares".into());
    }
    Ok(v)
}

fn factorial(k: u64) -> u64 {
    (1..=k).product()
}

/// All input orders with the block holding input bit 0 first and sorted,
/// and later blocks ordered by their smallest input bit.
/// Exactly one order per orbit of (share permutations × coordinate
/// relabellings).
pub fn coset_representatives(s: u32, n: u32) -> Vec<Vec<usize>> {
    let (s, n) = (s as usize, n as usize);
    let total = s * n;
    let mut out = Vec::new();

    // The block holding the smallest unused bit comes next; that bit may
    // sit at any coordinate.
    fn later_blocks(rest: &mut Vec<usize>, n: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(prefix.clone());
            return;
        }
        let lead = rest.remove(0);
        for pos in 0..n {
            let mut block = vec![usize::MAX; n];
            block[pos] = lead;
            fill(rest, &mut block, n, prefix, out);
        }
        rest.insert(0, lead);
    }

    fn fill(rest: &mut Vec<usize>, block: &mut [usize], n: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let Some(slot) = block.iter().position(|&b| b == usize::MAX) else {
            let len = prefix.len();
            prefix.extend_from_slice(block);
            later_blocks(rest, n, prefix, out);
            prefix.truncate(len);
            return;
        };
        for i in 0..rest.len() {
            let b = rest.remove(i);
            block[slot] = b;
            fill(rest, block, n, prefix, out);
            block[slot] = usize::MAX;
            rest.insert(i, b);
        }
    }

    // First block: {0} plus an ascending choice of n - 1 others.
    fn first_block(
        start: usize,
        k: usize,
        total: usize,
        n: usize,
        chosen: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if k == 0 {
            let mut rest: Vec<usize> = (0..total).filter(|b| !chosen.contains(b)).collect();
            let mut prefix = chosen.clone();
            later_blocks(&mut rest, n, &mut prefix, out);
            return;
        }
        for b in start..total {
            chosen.push(b);
            first_block(b + 1, k - 1, total, n, chosen, out);
            chosen.pop();
        }
    }

    let mut chosen = vec![0];
    first_block(1, n - 1, total, n, &mut chosen, &mut out);
    out
}

pub fn is_sharing_any(g: &VectorialBoolFn, s: u32) -> Result<SharingVerdict, ShareError> {
    let shape = Shape::of(g, s)?;
    if g.in_bits() > MAX_SEARCH_BITS {
        return Err(ShareError::TooLarge { bits: g.in_bits(), max: MAX_SEARCH_BITS });
    }
    let reps = coset_representatives(shape.s, shape.n);
    let hit = reps
        .par_iter()
        .enumerate()
        .find_map_first(|(i, order)| check_order(g, shape, order).map(|f| (i, f)));
    let space = |checked: usize| SearchSpace {
        permutations: factorial(g.in_bits() as u64),
        representatives: reps.len() as u64,
        checked: checked as u64,
        quotient: "share blocks unordered; coordinates fixed by sorting the block holding input bit 0",
    };
    let v = match hit {
        Some((i, f)) => {
            let mut v = verdict(ShareMode::Any, shape, Some(f), reps[i].clone());
            v.search = Some(space(i + 1));
            v
        }
        None => {
            let mut v = verdict(ShareMode::Any, shape, None, Vec::new());
            v.search = Some(space(reps.len()));
            v.detail = Some("no input order makes the output xor a function of the input xor".into());
            v
        }
    };
    Ok(v)
}

/// Monomial peeling on the ANF of `⊕ G_i` with the ordered partition.
///
/// Each monomial `Π_{c∈S} x_c` of `F` expands into the `s^|S|` monomials
/// that pick one share per coordinate of `S`. Monomials of `⊕ G_i` are
/// grouped by their coordinate set and a group is peeled when complete.
/// A monomial touching one coordinate twice, or an incomplete group, ends
/// the search with a negative answer naming that monomial.
pub fn anf_sharing_heuristic(g: &VectorialBoolFn, s: u32) -> Result<SharingVerdict, ShareError> {
    let shape = Shape::of(g, s)?;
    let (n, m) = (shape.n as usize, shape.m as usize);
    let sn = s as usize * n;
    let order: Vec<usize> = (0..sn).collect();
    let h: Vec<u64> = g.table().iter().map(|&y| shape.fold_out(y)).collect();
    let mut f_anf: Vec<BitVec> = vec![BitVec::zeros(1 << n); m];

    let coord_set = |mono: usize| -> Option<usize> {
        let mut set = 0usize;
        for b in (0..sn).filter(|b| mono >> b & 1 == 1) {
            let c = b % n;
            if set >> c & 1 == 1 {
                return None;
            }
            set |= 1 << c;
        }
        Some(set)
    };

    for j in 0..m {
        let table = BitVec::from_bools(h.iter().map(|v| v >> j & 1 == 1));
        let mut coeffs = anf(&table).expect("power-of-two length");
        // Highest degree first, as a hand peel would go.
        let mut monos: Vec<usize> = coeffs.iter_ones().collect();
        monos.sort_by_key(|&mu| (std::cmp::Reverse(mu.count_ones()), mu));
        for mu in monos {
            if !coeffs.get(mu) {
                continue;
            }
            let Some(set) = coord_set(mu) else {
                return Ok(anf_failure(shape, order, j, mu, "repeats a coordinate"));
            };
            let family = expand(set, shape);
            if family.iter().any(|&t| !coeffs.get(t)) {
                return Ok(anf_failure(shape, order, j, mu, "has an incomplete share family"));
            }
            for t in family {
                coeffs.flip(t);
            }
            f_anf[j].flip(set);
        }
    }

    let tables: Vec<BitVec> = f_anf.iter().map(|c| anf(c).expect("power-of-two length")).collect();
    let f = VectorialBoolFn::from_fn(shape.n, shape.m, |x| {
        (0..m).fold(0, |acc, j| acc | (tables[j].get(x as usize) as u64) << j)
    })
    .expect("shape is consistent");
    Ok(verdict(ShareMode::Anf, shape, Some(f), order))
}

fn anf_failure(shape: Shape, order: Vec<usize>, j: usize, mu: usize, why: &str) -> SharingVerdict {
    let mut v = verdict(ShareMode::Anf, shape, None, order);
    let vars: Vec<String> = (0..shape.s * shape.n)
        .filter(|b| mu >> b & 1 == 1)
        .map(|b| format!("x{}_{}", b / shape.n + 1, b % shape.n + 1))
        .collect();
    let name = if vars.is_empty() { "1".to_string() } else { vars.join("") };
    v.detail = Some(format!("output bit {j}: monomial {name} {why}"));
    v
}

/// Monomials of `Π_{c∈set} (⊕_i x_c^{(i)})` as sets of input bits.
fn expand(set: usize, shape: Shape) -> Vec<usize> {
    let coords: Vec<usize> = (0..shape.n as usize).filter(|c| set >> c & 1 == 1).collect();
    let s = shape.s as usize;
    let n = shape.n as usize;
    let mut out = vec![0usize];
    for &c in &coords {
        out = out
            .iter()
            .flat_map(|&mono| (0..s).map(move |i| mono | 1 << (i * n + c)))
            .collect();
    }
    out
}

/// The standard three-share example: `G_1 = ad ⊕ ae ⊕ bd`,
/// `G_2 = be ⊕ bf ⊕ ce`, `G_3 = cf ⊕ cd ⊕ af`, a sharing of `xy`.
///
/// With `interleaved` the input bits are `(a, d, b, e, c, f)` so the shares
/// are consecutive; otherwise they are `(a, b, c, d, e, f)`.
pub fn example_g(interleaved: bool) -> VectorialBoolFn {
    let pos: [u32; 6] = if interleaved { [0, 2, 4, 1, 3, 5] } else { [0, 1, 2, 3, 4, 5] };
    VectorialBoolFn::from_fn(6, 3, |z| {
        let [a, b, c, d, e, f] = pos.map(|p| z >> p & 1);
        let g1 = a & d ^ a & e ^ b & d;
        let g2 = b & e ^ b & f ^ c & e;
        let g3 = c & f ^ c & d ^ a & f;
        g1 | g2 << 1 | g3 << 2
    })
    .expect("6 -> 3 table")
}

/// A random sharing of `f` with `s` shares: shares 2..s are uniform, share 1
/// makes the xor come out right.
pub fn random_sharing<R: rand::Rng + ?Sized>(f: &VectorialBoolFn, s: u32, rng: &mut R) -> VectorialBoolFn {
    let (n, m) = (f.in_bits(), f.out_bits());
    let shape = Shape { s, n, m };
    let mask = (1u64 << m) - 1;
    let table = (0..1u64 << (s * n))
        .map(|z| {
            let (mut out, mut acc) = (0u64, 0u64);
            for i in 1..s {
                let r = rng.random::<u64>() & mask;
                acc ^= r;
                out |= r << (i * m);
            }
            out | (f.eval(shape.fold_in(z)) ^ acc)
        })
        .collect();
    VectorialBoolFn::new(s * n, s * m, table).expect("shape is consistent")
}

/// `G` with its inputs moved so canonical bit `k` sits at `order[k]`.
pub fn permute_inputs(g: &VectorialBoolFn, order: &[usize]) -> VectorialBoolFn {
    let mut table = vec![0u64; g.table().len()];
    let scatter = Scatter::new(order);
    for (z, &y) in g.table().iter().enumerate() {
        table[scatter.apply(z as u64) as usize] = y;
    }
    VectorialBoolFn::new(g.in_bits(), g.out_bits(), table).expect("same shape")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Definition oracle: group every input by its xor and see whether each
    /// group's outputs agree.
    fn oracle_ordered(g: &VectorialBoolFn, s: u32) -> bool {
        let n = g.in_bits() / s;
        let m = g.out_bits() / s;
        let mut groups: std::collections::BTreeMap<u64, std::collections::BTreeSet<u64>> =
            Default::default();
        for z in 0..1u64 << g.in_bits() {
            let x = (0..s).map(|i| z >> (i * n) & ((1 << n) - 1)).fold(0, |a, b| a ^ b);
            let y = g.eval(z);
            let v = (0..s).map(|i| y >> (i * m) & ((1 << m) - 1)).fold(0, |a, b| a ^ b);
            groups.entry(x).or_default().insert(v);
        }
        groups.values().all(|vs| vs.len() == 1)
    }

    fn all_perms(k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in all_perms(k - 1) {
            for i in 0..=p.len() {
                let mut q = p.clone();
                q.insert(i, k - 1);
                out.push(q);
            }
        }
        out
    }

    fn oracle_any(g: &VectorialBoolFn, s: u32) -> bool {
        all_perms(g.in_bits() as usize).iter().any(|p| {
            let mut inv = vec![0; p.len()];
            for (k, &q) in p.iter().enumerate() {
                inv[q] = k;
            }
            oracle_ordered(&permute_inputs(g, &inv), s)
        })
    }

    fn random_fn(n: u32, m: u32, rng: &mut ChaCha8Rng) -> VectorialBoolFn {
        let t = (0..1u64 << n).map(|_| rng.random::<u64>() & ((1 << m) - 1)).collect();
        VectorialBoolFn::new(n, m, t).unwrap()
    }

    fn xy() -> VectorialBoolFn {
        VectorialBoolFn::from_fn(2, 1, |x| x & 1 & (x >> 1)).unwrap()
    }

    #[test]
    fn example_is_sharing_of_xy() {
        let g = example_g(true);
        let v = is_sharing_ordered(&g, 3).unwrap();
        assert!(v.is_sharing);
        assert_eq!(v.f.as_ref().unwrap(), &xy());
        assert!(v.verify(&g));

        let a = anf_sharing_heuristic(&g, 3).unwrap();
        assert_eq!(a.f.as_ref().unwrap(), &xy());
    }

    #[test]
    fn example_in_natural_order_needs_search() {
        let g = example_g(false);
        assert!(!is_sharing_ordered(&g, 3).unwrap().is_sharing);
        let v = is_sharing_any(&g, 3).unwrap();
        assert!(v.is_sharing);
        assert!(v.verify(&g));
        assert_eq!(v.search.as_ref().unwrap().representatives, 720 / (6 * 2));
        // Up to relabelling x and y, F is still the product.
        assert_eq!(v.f.as_ref().unwrap(), &xy());
    }

    #[test]
    fn representative_counts() {
        for (s, n) in [(1, 1), (1, 5), (2, 2), (3, 2), (2, 3), (3, 3), (4, 2), (9, 1)] {
            let reps = coset_representatives(s, n);
            let expect = factorial((s * n) as u64) / (factorial(s as u64) * factorial(n as u64));
            assert_eq!(reps.len() as u64, expect, "s = {s}, n = {n}");
            let distinct: std::collections::HashSet<_> = reps.iter().collect();
            assert_eq!(distinct.len(), reps.len());
        }
    }

    #[test]
    fn representatives_cover_every_orbit() {
        // Complete orbit invariant: the blocks as sets together with the
        // coordinate classes as sets.
        fn canon(order: &[usize], s: usize, n: usize) -> Vec<Vec<usize>> {
            let sorted = |mut v: Vec<usize>| {
                v.sort_unstable();
                v
            };
            let mut blocks: Vec<Vec<usize>> =
                (0..s).map(|i| sorted(order[i * n..(i + 1) * n].to_vec())).collect();
            blocks.sort();
            let mut classes: Vec<Vec<usize>> =
                (0..n).map(|c| sorted((0..s).map(|i| order[i * n + c]).collect())).collect();
            classes.sort();
            blocks.into_iter().chain(classes).collect()
        }
        let (s, n) = (2usize, 3usize);
        let reps: std::collections::HashSet<_> = coset_representatives(s as u32, n as u32)
            .iter()
            .map(|o| canon(o, s, n))
            .collect();
        let all: std::collections::HashSet<_> =
            all_perms(s * n).iter().map(|o| canon(o, s, n)).collect();
        assert_eq!(reps, all);
        assert_eq!(reps.len(), coset_representatives(s as u32, n as u32).len());
    }

    #[test]
    fn single_share_is_always_a_sharing() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let g = random_fn(4, 3, &mut rng);
            let v = is_sharing_ordered(&g, 1).unwrap();
            assert_eq!(v.f.unwrap(), g);
            assert!(anf_sharing_heuristic(&g, 1).unwrap().is_sharing);
        }
    }

    #[test]
    fn random_tables_are_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let g = random_fn(6, 3, &mut rng);
            assert!(!oracle_ordered(&g, 3));
            assert!(!is_sharing_ordered(&g, 3).unwrap().is_sharing);
            assert!(!anf_sharing_heuristic(&g, 3).unwrap().is_sharing);
            assert!(!is_sharing_any(&g, 3).unwrap().is_sharing);
        }
    }

    #[test]
    fn search_matches_full_permutation_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for trial in 0..40 {
            let (s, n) = [(2, 2), (3, 2), (2, 3), (3, 1)][trial % 4];
            let f = random_fn(n, 1, &mut rng);
            let mut g = random_sharing(&f, s, &mut rng);
            if trial % 3 == 0 {
                // Break it in one place.
                let mut t = g.table().to_vec();
                let i = rng.random_range(0..t.len());
                t[i] ^= 1;
                g = VectorialBoolFn::new(g.in_bits(), g.out_bits(), t).unwrap();
            }
            let mut order: Vec<usize> = (0..(s * n) as usize).collect();
            order.shuffle(&mut rng);
            let g = permute_inputs(&g, &order);
            let v = is_sharing_any(&g, s).unwrap();
            assert_eq!(v.is_sharing, oracle_any(&g, s), "trial {trial}");
            assert!(v.verify(&g));
        }
    }

    #[test]
    fn shuffled_example_is_found() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10 {
            let mut order: Vec<usize> = (0..6).collect();
            order.shuffle(&mut rng);
            let g = permute_inputs(&example_g(true), &order);
            let v = is_sharing_any(&g, 3).unwrap();
            assert!(v.is_sharing);
            assert!(v.verify(&g));
        }
    }

    #[test]
    fn constructed_sharings_are_accepted() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let shapes = [(1, 1, 3), (2, 1, 2), (2, 2, 1), (3, 2, 1), (2, 3, 1), (3, 1, 2), (6, 1, 1)];
        for i in 0..1000 {
            let (s, n, m) = shapes[i % shapes.len()];
            let f = random_fn(n, m, &mut rng);
            let g = random_sharing(&f, s, &mut rng);
            let o = is_sharing_ordered(&g, s).unwrap();
            assert_eq!(o.f.as_ref(), Some(&f));
            let a = anf_sharing_heuristic(&g, s).unwrap();
            assert_eq!(a.f.as_ref(), Some(&f));
            if i % 10 == 0 {
                let v = is_sharing_any(&g, s).unwrap();
                assert!(v.is_sharing && v.verify(&g));
            }
        }
    }

    #[test]
    fn heuristic_agrees_on_every_four_bit_xor() {
        // The verdict depends on G only through the xor of its output
        // shares, so G = (H, 0, ..) ranges over every case.
        for (s, n) in [(2u32, 2u32), (4, 1)] {
            for h in 0u64..1 << 16 {
                let g = VectorialBoolFn::from_fn(4, s, |z| h >> z & 1).unwrap();
                let exact = is_sharing_ordered(&g, s).unwrap();
                let heur = anf_sharing_heuristic(&g, s).unwrap();
                assert_eq!(heur.is_sharing, exact.is_sharing, "s = {s}, n = {n}, h = {h:#06x}");
                assert_eq!(heur.f, exact.f);
            }
        }
    }

    #[test]
    fn shape_errors() {
        let g = VectorialBoolFn::from_fn(5, 2, |_| 0).unwrap();
        assert!(matches!(is_sharing_ordered(&g, 2), Err(ShareError::Indivisible { what: "in_bits", .. })));
        let g = VectorialBoolFn::from_fn(4, 3, |_| 0).unwrap();
        assert!(matches!(is_sharing_ordered(&g, 2), Err(ShareError::Indivisible { what: "out_bits", .. })));
        assert_eq!(is_sharing_ordered(&g, 0), Err(ShareError::ZeroShares));
        let g = VectorialBoolFn::from_fn(10, 2, |_| 0).unwrap();
        assert!(matches!(is_sharing_any(&g, 2), Err(ShareError::TooLarge { .. })));
    }

    proptest! {
        #[test]
        fn positive_verdicts_verify(seed in any::<u64>(), corrupt in any::<bool>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = random_fn(2, 2, &mut rng);
            let mut g = random_sharing(&f, 3, &mut rng);
            if corrupt {
                let mut t = g.table().to_vec();
                t[rng.random_range(0..64)] ^= 1 << rng.random_range(0..6);
                g = VectorialBoolFn::new(6, 6, t).unwrap();
            }
            for v in [
                is_sharing_ordered(&g, 3).unwrap(),
                anf_sharing_heuristic(&g, 3).unwrap(),
                is_sharing_any(&g, 3).unwrap(),
            ] {
                prop_assert!(v.verify(&g));
            }
            prop_assert_eq!(is_sharing_ordered(&g, 3).unwrap().is_sharing, !corrupt);
        }
    }
}
