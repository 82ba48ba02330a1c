//! The ten end-to-end checks run by `cryptkit selftest` and the acceptance
//! test target. Quick mode shrinks the sweeps; the full mode runs the
//! full challenge sizes.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::boolanalysis::{
    component_check, differential_uniformity, distance_to_affine, power_map, students_contradiction, Sbox,
    CHALLENGE_PAIRS, CHALLENGE_SBOX, CHALLENGE_U,
};
use crate::boolshare::{example_g, is_sharing_any, is_sharing_ordered, permute_inputs, random_sharing};
use crate::dlog::{recover, MachineSpec, OracleMachine, Strategy, CHALLENGE_G, CHALLENGE_K, CHALLENGE_N};
use crate::fpe::{fpe_sweep, FeistelParams, FpeScheme, PrfBackend, PrfHandle, Variant};
use crate::gf2::{FieldGF2n, VectorialBoolFn};
use crate::gfs::{sign_bruteforce, sign_formula, GfsSpec, GfsVariant, Group2t, HProfile};
use crate::mask::{attack, generate_instance, SharingParams};
use crate::permclose::{
    best_alphas, best_alphas_exhaustive, closeness_bruteforce, closeness_recursive, min_closeness,
    min_closeness_closed_form, AlphaVec,
};
use crate::puzzles::{ec_qr_sweep, fib_string_balanced, min_generation_cost, related_passwords_enumerate, Side};
use crate::quantum::{
    bell_prep, bell_to_singlet, correct, distinguish_bell, inject_bitflip, repetition_encode, BellState, Corrector,
    StateVector,
};
use crate::routing::{min_layers, render_svg, route_two_layer, verify_plan, BitPermutation};

pub const CRITERIA: u8 = 10;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl std::fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "criterion {:>2} {:<18} {}  {}",
            self.id,
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.detail
        )
    }
}

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($arg:tt)+) => {
        if !($cond) {
            return Err(format!($($arg)+));
        }
    };
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

pub fn name(id: u8) -> &'static str {
    match id {
        1 => "discrete-log",
        2 => "fpe",
        3 => "mask-recovery",
        4 => "perm-closeness",
        5 => "gfs-parity",
        6 => "boolean-sharing",
        7 => "boolean-analysis",
        8 => "quantum",
        9 => "routing",
        10 => "puzzles",
        _ => "unknown",
    }
}

/// Runs criterion `id` (1..=10). Panics inside a check count as failures.
pub fn run(id: u8, quick: bool) -> CriterionResult {
    let start = Instant::now();
    let outcome = std::panic::catch_unwind(|| match id {
        1 => discrete_log(),
        2 => fpe(quick),
        3 => mask(quick),
        4 => closeness(quick),
        5 => gfs(quick),
        6 => sharing(quick),
        7 => boolean(quick),
        8 => quantum(quick),
        9 => routing(),
        10 => puzzles(quick),
        _ => Err(format!("no criterion {id}")),
    })
    .unwrap_or_else(|_| Err("panicked".into()));
    let (passed, detail) = match outcome {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    CriterionResult { id, name: name(id), passed, detail, elapsed: start.elapsed() }
}

pub fn run_all(quick: bool) -> Vec<CriterionResult> {
    (1..=CRITERIA).map(|id| run(id, quick)).collect()
}

fn discrete_log() -> Outcome {
    let spec = MachineSpec::simulate(CHALLENGE_N, Some(CHALLENGE_K), 1).map_err(err)?;
    let mut queries = Vec::new();
    for strategy in [Strategy::PhBsgs, Strategy::Bezout, Strategy::Ph] {
        let m = OracleMachine::new(&spec).map_err(err)?;
        let t = Instant::now();
        let r = recover(&m, strategy, Some(CHALLENGE_G)).map_err(err)?;
        let dt = t.elapsed();
        ensure!(r.k == CHALLENGE_K, "{strategy:?} returned {} instead of {CHALLENGE_K}", r.k);
        if strategy != Strategy::Ph {
            ensure!(dt < Duration::from_secs(5), "{strategy:?} took {:.2} s", dt.as_secs_f64());
        }
        queries.push(r.queries);
    }
    ensure!(queries[0] < queries[2], "bsgs used {} queries, scan {}", queries[0], queries[2]);
    Ok(format!("k = {CHALLENGE_K}; queries bsgs {} bezout {} scan {}", queries[0], queries[1], queries[2]))
}

fn fpe(quick: bool) -> Outcome {
    let (composite, prime) = if quick { (10_403, 10_007) } else { (5_818_342, 5_818_343) };
    let prf = PrfHandle::new(0x0123_4567_89ab_cdef_fedc_ba98_7654_3210, PrfBackend::Speck);
    let params = FeistelParams::new(3).map_err(err)?;
    let mut parts = Vec::new();
    for (n, variant) in [(composite, Variant::Composite), (prime, Variant::PrimeDec), (prime, Variant::PrimeInc)] {
        let scheme = FpeScheme::new(n, variant, params.clone()).map_err(err)?;
        if !quick && variant == Variant::Composite {
            let d = scheme.inner_domain();
            ensure!((d.n1, d.n2) == (2594, 2243), "split {}×{}", d.n1, d.n2);
        }
        let t = Instant::now();
        let rep = fpe_sweep(&scheme, &prf).map_err(err)?;
        let dt = t.elapsed();
        ensure!(rep.bijective && rep.round_trip, "{variant} on {n}: not a bijection");
        ensure!(
            rep.prf_calls_min == rep.prf_calls_max,
            "{variant} on {n}: PRF calls vary {}..{}",
            rep.prf_calls_min,
            rep.prf_calls_max
        );
        ensure!(dt < Duration::from_secs(60), "{variant} sweep took {:.1} s", dt.as_secs_f64());
        parts.push(format!("{variant}/{n}: {} calls", rep.prf_calls_min));
    }
    Ok(parts.join(", "))
}

fn mask(quick: bool) -> Outcome {
    let count = if quick { 2 } else { 20 };
    let params = SharingParams::CHALLENGE;
    let suffix_len = params.message_bits - params.prefix_known;
    let mut slowest = Duration::ZERO;
    for seed in 0..count {
        let (inst, wit) = generate_instance(seed, params).map_err(err)?;
        let t = Instant::now();
        let rep = attack(&inst).map_err(err)?;
        let dt = t.elapsed();
        slowest = slowest.max(dt);
        let got = rep.suffix().ok_or_else(|| format!("seed {seed}: suffix not determined"))?;
        let want = wit.y.slice(params.prefix_known, suffix_len);
        let errors = (0..suffix_len).filter(|&i| got.get(i) != want.get(i)).count();
        ensure!(errors == 0, "seed {seed}: {errors} bit errors");
        ensure!(dt < Duration::from_secs(60), "seed {seed} took {:.1} s", dt.as_secs_f64());
    }
    Ok(format!("{count} instances, {suffix_len} bits each, slowest {:.2} s", slowest.as_secs_f64()))
}

fn closeness(quick: bool) -> Outcome {
    let (brute_max, argmin_max) = if quick { (8, 10) } else { (12, 14) };
    for n in 1..=brute_max {
        for a in 0..1u64 << n {
            let alpha = AlphaVec::new(n, a).map_err(err)?;
            let b = closeness_bruteforce(alpha).map_err(err)?;
            let r = closeness_recursive(alpha);
            ensure!(b == r, "n = {n}, α = {a:#b}: brute {b}, recursive {r}");
        }
    }
    let firsts = (min_closeness(1).map_err(err)?.value, min_closeness(2).map_err(err)?.value);
    ensure!(firsts == (4, 8), "C*_1, C*_2 = {firsts:?}");
    for n in 1..=40 {
        let rec = min_closeness(n).map_err(err)?.value;
        ensure!(min_closeness_closed_form(n) == Some(rec), "closed form differs at n = {n}");
    }
    for n in 1..=argmin_max {
        let formula = best_alphas(n).map_err(err)?;
        let exhaustive = best_alphas_exhaustive(n).map_err(err)?;
        let want = if n <= 2 { 2 } else { 4 };
        ensure!(formula.alphas.len() == want, "n = {n}: {} minimizers", formula.alphas.len());
        ensure!(formula == exhaustive, "n = {n}: minimizers differ from exhaustive argmin");
    }
    Ok(format!("brute = recursive for n ≤ {brute_max}, closed form n ≤ 40, argmin n ≤ {argmin_max}"))
}

fn gfs(quick: bool) -> Outcome {
    let per_cell = if quick { 20 } else { 200 };
    let groups: Vec<Group2t> =
        ["z2", "z4", "z2^2", "z2xz4"].iter().map(|s| Group2t::parse(s)).collect::<Result<_, _>>().map_err(err)?;
    let (mut cells, mut in_scope, mut outside) = (0, 0, 0);
    for g in &groups {
        let mut profiles = vec![HProfile::Random, HProfile::Zero, HProfile::Constant(1), HProfile::Bijective];
        profiles.extend((0..=g.c()).map(HProfile::OrderExactly));
        for variant in [GfsVariant::Nlfsr, GfsVariant::Gfs2, GfsVariant::Th] {
            for l in 1..=2u32 {
                let m = 1u32 << l;
                if variant != GfsVariant::Nlfsr && m < 4 {
                    continue;
                }
                let mut draws = 0;
                let mut seed = 0u64;
                while draws < per_cell {
                    ensure!(seed < 100 * per_cell as u64, "{variant:?} {g} m = {m}: too few valid draws");
                    let profile = profiles[seed as usize % profiles.len()];
                    seed += 1;
                    let Ok(spec) = GfsSpec::generate(variant, g, m, profile, seed, seed.wrapping_mul(0x9e37_79b9))
                    else {
                        continue;
                    };
                    let rep = sign_formula(&spec, g).map_err(err)?;
                    let brute = sign_bruteforce(&spec, g).map_err(err)?.as_i8();
                    if rep.in_scope {
                        ensure!(rep.sign == brute, "{variant:?} {g} m = {m} {profile:?}: formula {} brute {brute}", rep.sign);
                        in_scope += 1;
                    } else {
                        outside += 1;
                    }
                    draws += 1;
                }
                cells += 1;
            }
        }
    }
    Ok(format!("{cells} cells, {in_scope} draws agree, {outside} outside the theorem"))
}

fn random_table<R: Rng>(n: u32, m: u32, rng: &mut R) -> VectorialBoolFn {
    let table = (0..1u64 << n).map(|_| rng.random_range(0..1u64 << m)).collect();
    VectorialBoolFn::new(n, m, table).expect("shape is consistent")
}

fn sharing(quick: bool) -> Outcome {
    let xy = [0u64, 0, 0, 1];
    let ordered = is_sharing_ordered(&example_g(true), 3).map_err(err)?;
    let natural = is_sharing_any(&example_g(false), 3).map_err(err)?;
    for (label, v) in [("interleaved", &ordered), ("natural", &natural)] {
        ensure!(v.is_sharing, "{label} example rejected");
        let f = v.f.as_ref().ok_or("no F returned")?;
        ensure!(f.table() == xy, "{label} example: F = {:?}", f.table());
    }
    let count = if quick { 10 } else { 100 };
    let shapes = [(2u32, 2u32, 1u32), (2, 3, 2), (2, 4, 1), (3, 2, 1), (3, 3, 1), (3, 3, 2), (4, 2, 1)];
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for trial in 0..count {
        let (s, n, m) = shapes[trial % shapes.len()];
        let f = random_table(n, m, &mut rng);
        let g = random_sharing(&f, s, &mut rng);
        let mut order: Vec<usize> = (0..(s * n) as usize).collect();
        order.shuffle(&mut rng);
        let shuffled = permute_inputs(&g, &order);
        let v = is_sharing_any(&shuffled, s).map_err(err)?;
        ensure!(v.is_sharing && v.verify(&shuffled), "trial {trial} (s = {s}, n = {n}) not detected");
    }
    Ok(format!("example F = xy; {count} shuffled sharings detected"))
}

fn boolean(quick: bool) -> Outcome {
    let field = FieldGF2n::new(5).map_err(err)?;
    for d in [13, 7, 15] {
        let du = differential_uniformity(&power_map(&field, d)).map_err(err)?;
        ensure!(du == 2, "x^{d}: differential uniformity {du}");
    }
    let s = Sbox::new(CHALLENGE_SBOX.to_vec()).map_err(err)?;
    for x in 0..16u32 {
        let (x1, x2, x3) = (x >> 3 & 1, x >> 2 & 1, x >> 1 & 1);
        ensure!(((CHALLENGE_U & s.apply(x)).count_ones() & 1) == (x1 & x2 ^ x3), "u·S fails at x = {x:#06b}");
    }
    let anf = component_check(&s, CHALLENGE_U).map_err(err)?;
    ensure!(anf.text == "x1x2 + x3", "component ANF {}", anf.text);
    let v = students_contradiction(&s, CHALLENGE_U, &CHALLENGE_PAIRS).map_err(err)?;
    let literal: Vec<u32> = v.pairs.iter().map(|p| p.c_literal).collect();
    ensure!(literal == [0, 1], "pair constants {literal:?}");
    ensure!(v.contradiction && v.literal_contradiction, "no contradiction reported");
    let count = if quick { 100 } else { 1000 };
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0;
    for _ in 0..count {
        let f = Sbox::new((0..16).map(|_| rng.random_range(0..16)).collect()).map_err(err)?;
        let d = distance_to_affine(&f).map_err(err)?;
        ensure!(d.distance < 11 && d.verify(&f), "random function at distance {}", d.distance);
        worst = worst.max(d.distance);
    }
    Ok(format!("APN x^13, x^7, x^15; u·S = {}; c = {literal:?}; max distance {worst}/{count}", anf.text))
}

fn close(a: &StateVector, b: &StateVector) -> bool {
    a.amplitudes().iter().zip(b.amplitudes()).all(|(x, y)| (x - y).norm() < 1e-10)
}

fn quantum(quick: bool) -> Outcome {
    let mut s = StateVector::zero(2).map_err(err)?;
    bell_prep().run(&mut s).map_err(err)?;
    ensure!(close(&s, &BellState::Psi1.state()), "bell prep gives {:?}", s.amplitudes());
    let singlet = bell_to_singlet(&s).map_err(err)?;
    ensure!(close(&singlet, &BellState::Psi3.state()), "singlet transform gives {:?}", singlet.amplitudes());
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for b in BellState::ALL {
        let d = distinguish_bell(&b.state(), &mut rng).map_err(err)?;
        let certain = (d.probabilities[b.outcome()] - 1.0).abs() < 1e-10;
        ensure!(certain, "{b:?}: {:?}", d.probabilities);
        ensure!(d.measured == b.outcome() && d.identified == Some(b), "{b:?} misidentified");
    }
    let count = if quick { 10 } else { 100 };
    for corrector in [Corrector::ThreeToffoli, Corrector::OneToffoli] {
        let circuit = corrector.circuit();
        for trial in 0..count {
            let psi = StateVector::random(1, &mut rng).map_err(err)?;
            let [alpha, beta]: [Complex64; 2] = psi.amplitudes().try_into().map_err(|_| "not one qubit")?;
            let enc = repetition_encode(alpha, beta).map_err(err)?;
            for wire in [None, Some(0), Some(1), Some(2)] {
                let mut noisy = enc.clone();
                if let Some(w) = wire {
                    inject_bitflip(&mut noisy, w).map_err(err)?;
                }
                let fid = correct(&noisy, &circuit).map_err(err)?.top_fidelity(&enc);
                let restored = fid >= 1.0 - 1e-12;
                ensure!(restored, "{corrector:?} trial {trial} flip {wire:?}: fidelity {fid}");
            }
        }
    }
    let tof = Corrector::OneToffoli.circuit().count("TOFFOLI");
    ensure!(tof == 1, "single-Toffoli variant has {tof} Toffolis");
    Ok(format!("Bell states exact; {count} states × 4 error cases × 2 correctors restored"))
}

fn routing() -> Outcome {
    let p = BitPermutation::present();
    let plan = route_two_layer(&p);
    let conflicts = verify_plan(&plan).map_err(err)?;
    ensure!(conflicts.is_empty(), "{} conflicts, first {:?}", conflicts.len(), conflicts[0]);
    let layers = plan.nets.iter().flat_map(|n| n.segments.iter().map(|s| s.layer)).max().unwrap_or(0);
    ensure!(layers <= 2, "plan uses {layers} layers");
    let bound = min_layers(&p);
    ensure!(bound.layers == 2, "min_layers(PRESENT) = {}", bound.layers);
    let id = min_layers(&BitPermutation::identity(64)).layers;
    ensure!(id == 1, "min_layers(identity) = {id}");
    let svg = render_svg(&plan);
    ensure!(svg == render_svg(&route_two_layer(&p)), "SVG differs between runs");
    Ok(format!("64 nets on 2 layers, {} inversions, SVG {} bytes", bound.inversions, svg.len()))
}

fn puzzles(quick: bool) -> Outcome {
    let cost = min_generation_cost(2021).map_err(err)?.map(|p| p.cost);
    ensure!(cost == Some(47), "cost(2021) = {cost:?}");
    for n in 1..=100 {
        let v = fib_string_balanced(n).map_err(err)?;
        if n <= 24 {
            ensure!(v.by_construction.is_some() && v.consistent(), "n = {n}: construction disagrees");
        }
        ensure!(v.by_recurrence == (n % 6 == 1), "n = {n}: balanced = {}", v.by_recurrence);
    }
    let p_max = if quick { 60 } else { 200 };
    let sweep = ec_qr_sweep(p_max).map_err(err)?;
    ensure!(sweep.violations.is_empty(), "{} violations, first {:?}", sweep.violations.len(), sweep.violations[0]);
    let mut rng = ChaCha8Rng::seed_from_u64(2021);
    let count = if quick { 10 } else { 100 };
    for _ in 0..count {
        let e: String = (0..9).map(|_| (b'0' + rng.random_range(0..10u8)) as char).collect();
        let tim = related_passwords_enumerate(&e, Side::Tim).map_err(err)?;
        let ann = related_passwords_enumerate(&e, Side::Ann).map_err(err)?;
        let classes = |s: &String| s.bytes().map(|b| (b - b'0') % 7).collect::<Vec<_>>();
        let want = classes(ann.first().ok_or_else(|| format!("no F for e = {e}"))?);
        ensure!(!tim.is_empty(), "no D for e = {e}");
        ensure!(tim.iter().chain(&ann).all(|p| classes(p) == want), "congruence fails for e = {e}");
    }
    Ok(format!(
        "cost(2021) = 47; balance n ≤ 100; {} curves, {} odd-order points; {count} passwords",
        sweep.curves, sweep.odd_order_points
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_routing_and_boolean() {
        for id in [7, 9] {
            let r = run(id, true);
            assert!(r.passed, "{r}");
        }
    }

    #[test]
    fn unknown_id_fails() {
        assert!(!run(11, true).passed);
    }
}
