use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use cryptkit_core::boolanalysis::{
    apn_catalog, differential_uniformity, distance_to_affine, parse_pairs, power_map, students_contradiction, Sbox,
    CHALLENGE_PAIRS, CHALLENGE_SBOX,
};
use cryptkit_core::boolshare::{anf_sharing_heuristic, is_sharing_any, is_sharing_ordered, ShareMode};
use cryptkit_core::dlog::{recover, MachineSpec, OracleMachine};
use cryptkit_core::fpe::{fpe_sweep, FeistelParams, FpeScheme, PrfHandle};
use cryptkit_core::gf2::{FieldGF2n, VectorialBoolFn};
use cryptkit_core::gfs::{sign_bruteforce, sign_formula, GfsSpec, Group2t, HProfile};
use cryptkit_core::mask::{attack, generate_instance, SharingInstance, SharingParams};
use cryptkit_core::permclose::{
    best_alphas, best_alphas_exhaustive, closeness_bruteforce, closeness_recursive, min_closeness, AlphaVec,
};
use cryptkit_core::puzzles::{
    ec_qr_sweep, fib_string_balanced, fib_string_build, min_generation_cost, odd_subgroup_qr_property,
    related_passwords_enumerate, EcCurve, EcPoint,
};
use cryptkit_core::quantum::{
    correct, noise_csv, noise_sweep, exact_logical_rate, qubit, repetition_encode, inject_bitflip, syndrome_of,
    Circuit, StateVector,
};
use cryptkit_core::routing::{emit_svg, min_layers, route_two_layer, verify_plan, BitPermutation};
use cryptkit_core::selftest;

use crate::args::*;

pub struct Outcome {
    pub result: Value,
    /// Replaces the generic `key: value` rendering in text mode.
    pub text: Option<String>,
    pub seeded: bool,
    pub failed: bool,
}

impl Outcome {
    fn of<T: Serialize>(result: &T) -> Result<Self> {
        Ok(Outcome { result: serde_json::to_value(result)?, text: None, seeded: false, failed: false })
    }

    fn seeded(mut self) -> Self {
        self.seeded = true;
        self
    }

    fn text(mut self, text: String) -> Self {
        self.text = Some(text);
        self
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// JSON numbers stop at 64 bits; larger values become strings.
fn big(v: u128) -> Value {
    u64::try_from(v).map_or_else(|_| Value::String(v.to_string()), Value::from)
}

pub fn dispatch(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Puzzle(c) => puzzle(c),
        Command::Fpe(c) => fpe(c),
        Command::Dlog(c) => dlog(c, cli.seed),
        Command::Mask(c) => mask(c, cli.seed),
        Command::Permclose(c) => permclose(c),
        Command::Gfs(GfsCmd::Sign(a)) => gfs_sign(a),
        Command::Share(ShareCmd::Check { s, table, mode }) => share_check(*s, table, *mode),
        Command::Sbox(c) => sbox(c),
        Command::Qsim(c) => qsim(c, cli.seed),
        Command::Route(a) => route(a),
        Command::Selftest(a) => run_selftest(a, cli.timing),
    }
}

fn puzzle(cmd: &PuzzleCmd) -> Result<Outcome> {
    match cmd {
        PuzzleCmd::Cost { len } => match min_generation_cost(*len)? {
            Some(plan) => Outcome::of(&plan),
            None => Outcome::of(&json!({ "length": len, "reachable": false })),
        },
        PuzzleCmd::Fibstring { n, check } => {
            let v = fib_string_balanced(*n)?;
            let mut out = serde_json::to_value(v)?;
            if *check {
                let (a, b) = fib_string_build(*n)?;
                let plus = b.iter().filter(|&&d| d == 1).count();
                let minus = b.iter().filter(|&&d| d == -1).count();
                out["length"] = a.len().into();
                out["plus"] = plus.into();
                out["minus"] = minus.into();
                if a.len() <= 256 {
                    out["a"] = a.into();
                }
            }
            Outcome::of(&out)
        }
        PuzzleCmd::Passwords { e, side } => {
            let list = related_passwords_enumerate(e, *side)?;
            Outcome::of(&json!({ "e": e, "side": side, "count": list.len(), "passwords": list }))
        }
        PuzzleCmd::EcQr(a) => match (a.p, a.a, a.p_max) {
            (_, _, Some(p_max)) => {
                let rep = ec_qr_sweep(p_max)?;
                let mut out = Outcome::of(&rep)?;
                out.failed = !rep.violations.is_empty();
                Ok(out)
            }
            (Some(p), Some(coef), None) => ec_curve(p, coef),
            _ => bail!("give --p and --a, or --p-max"),
        },
    }
}

fn ec_curve(p: u64, a: u64) -> Result<Outcome> {
    let curve = EcCurve::new(p, a, 0)?;
    let points = curve.points()?;
    let (mut odd, mut checked) = (0, 0);
    let mut failures = Vec::new();
    for &pt in &points {
        if pt == EcPoint::Infinity || curve.point_order(pt)? % 2 == 0 {
            continue;
        }
        odd += 1;
        let rep = odd_subgroup_qr_property(&curve, pt)?;
        checked += rep.points_checked;
        failures.extend(rep.residue_failures);
        failures.extend(rep.halving_failures);
    }
    failures.sort();
    failures.dedup();
    let mut out = Outcome::of(&json!({
        "p": p,
        "a": a,
        "group_order": points.len(),
        "odd_order_points": odd,
        "subgroup_points_checked": checked,
        "holds": failures.is_empty(),
        "failures": failures,
    }))?;
    out.failed = !failures.is_empty();
    Ok(out)
}

fn scheme(c: &FpeCommon) -> Result<(FpeScheme, PrfHandle)> {
    let scheme = FpeScheme::new(c.n, c.variant, FeistelParams::new(c.rounds)?)?;
    Ok((scheme, PrfHandle::from_hex(&c.key, c.backend)?))
}

fn fpe(cmd: &FpeCmd) -> Result<Outcome> {
    match cmd {
        FpeCmd::Encrypt { common, x } => {
            let (s, prf) = scheme(common)?;
            Outcome::of(&json!({ "x": x, "y": s.encrypt(*x, &prf)? }))
        }
        FpeCmd::Decrypt { common, y } => {
            let (s, prf) = scheme(common)?;
            Outcome::of(&json!({ "y": y, "x": s.decrypt(*y, &prf)? }))
        }
        FpeCmd::Sweep { common } => {
            let (s, prf) = scheme(common)?;
            let rep = fpe_sweep(&s, &prf)?;
            let mut out = Outcome::of(&rep)?;
            out.failed = !(rep.bijective && rep.round_trip);
            Ok(out)
        }
    }
}

fn dlog(cmd: &DlogCmd, seed: u64) -> Result<Outcome> {
    match cmd {
        DlogCmd::Simulate { n, k, output } => {
            let spec = MachineSpec::simulate(*n, *k, seed)?;
            let out = match output {
                Some(path) => {
                    write(path, &spec.to_json())?;
                    Outcome::of(&json!({ "n": spec.n, "machine": path }))?
                }
                None => Outcome::of(&spec)?,
            };
            Ok(out.seeded())
        }
        DlogCmd::Solve { machine, strategy, g } => {
            let spec = MachineSpec::from_json(&read(machine)?)?;
            let m = OracleMachine::new(&spec)?;
            Outcome::of(&recover(&m, *strategy, *g)?)
        }
    }
}

fn mask(cmd: &MaskCmd, seed: u64) -> Result<Outcome> {
    match cmd {
        MaskCmd::Gen { output, witness, message_bits, shares, prefix_known } => {
            let params = SharingParams { message_bits: *message_bits, shares: *shares, prefix_known: *prefix_known };
            let (inst, wit) = generate_instance(seed, params)?;
            write(output, &inst.to_text())?;
            if let Some(path) = witness {
                let suffix = wit.y.slice(*prefix_known, message_bits - prefix_known);
                write(path, &format!("{}\n", suffix.to_bit_string()))?;
            }
            Ok(Outcome::of(&json!({
                "instance": output,
                "rows": params.rows(),
                "message_bits": message_bits,
                "prefix_known": prefix_known,
            }))?
            .seeded())
        }
        MaskCmd::Attack { file } => {
            let inst = SharingInstance::parse(&read(file)?)?;
            let rep = attack(&inst)?;
            let mut out = Outcome::of(&json!({
                "suffix_bits": rep.suffix_bits,
                "share_rows": rep.share_rows,
                "ambiguous_bits": rep.ambiguous_bits,
            }))?;
            out.failed = rep.suffix_bits.is_none();
            Ok(out)
        }
    }
}

fn permclose(cmd: &PermcloseCmd) -> Result<Outcome> {
    match cmd {
        PermcloseCmd::Value { n, alpha, method } => {
            let a = AlphaVec::new(*n, *alpha)?;
            let brute = matches!(method, CloseMethod::Brute | CloseMethod::Both)
                .then(|| closeness_bruteforce(a))
                .transpose()?;
            let rec = matches!(method, CloseMethod::Rec | CloseMethod::Both).then(|| closeness_recursive(a));
            if let (Some(b), Some(r)) = (brute, rec) {
                ensure!(b == r, "brute force {b} and recursion {r} disagree");
            }
            let value = brute.or(rec).expect("one method ran");
            Outcome::of(&json!({ "n": n, "alpha": alpha, "closeness": big(value), "is_permutation": value == 1u128 << n }))
        }
        PermcloseCmd::Min { n, exhaustive } => {
            let best = best_alphas(*n)?;
            let m = min_closeness(*n)?;
            let mut out = json!({
                "n": n,
                "c_min": big(best.c_min),
                "minimizers": best.alphas,
                "minimizers_binary": best.alphas.iter().map(|a| format!("{a:0w$b}", w = *n as usize)).collect::<Vec<_>>(),
                "closed_form_agrees": m.closed_form_agrees,
            });
            if *exhaustive {
                let ex = best_alphas_exhaustive(*n)?;
                out["exhaustive_agrees"] = (ex == best).into();
            }
            Outcome::of(&out)
        }
    }
}

fn parse_profile(s: &str) -> Result<HProfile> {
    let num = |v: &str| v.parse::<u32>().with_context(|| format!("bad profile value {v:?}"));
    Ok(match s.split_once(':') {
        None if s == "random" => HProfile::Random,
        None if s == "zero" => HProfile::Zero,
        None if s == "bijective" => HProfile::Bijective,
        Some(("const", v)) => HProfile::Constant(num(v)?),
        Some(("order", v)) => HProfile::OrderExactly(num(v)?),
        _ => bail!("unknown profile {s:?}"),
    })
}

fn gfs_sign(a: &GfsSignArgs) -> Result<Outcome> {
    let group = Group2t::parse(&a.group)?;
    let spec = GfsSpec::generate(a.variant, &group, a.m, parse_profile(&a.profile)?, a.h_seed, a.k_seed)?;
    let formula = (a.method != SignMethod::Brute).then(|| sign_formula(&spec, &group)).transpose()?;
    let brute = (a.method != SignMethod::Formula).then(|| sign_bruteforce(&spec, &group)).transpose()?;
    let mut out = json!({ "variant": a.variant, "group": group.to_string(), "m": a.m });
    if let Some(f) = &formula {
        out["sign"] = f.sign.into();
        out["formula"] = serde_json::to_value(f)?;
    }
    if let Some(b) = brute {
        out["sign"] = b.as_i8().into();
        out["brute_sign"] = b.as_i8().into();
    }
    if let (Some(f), Some(b)) = (&formula, brute) {
        out["agree"] = (f.sign == b.as_i8()).into();
    }
    Outcome::of(&out)
}

fn share_check(s: u32, table: &Path, mode: ShareMode) -> Result<Outcome> {
    let g = VectorialBoolFn::parse(&read(table)?)?;
    let v = match mode {
        ShareMode::Ordered => is_sharing_ordered(&g, s)?,
        ShareMode::Any => is_sharing_any(&g, s)?,
        ShareMode::Anf => anf_sharing_heuristic(&g, s)?,
    };
    let mut out = serde_json::to_value(&v)?;
    out["f_table"] = v.f.as_ref().map(|f| f.to_text()).into();
    Outcome::of(&out)
}

fn sbox(cmd: &SboxCmd) -> Result<Outcome> {
    match cmd {
        SboxCmd::Apn { n, d, poly } => {
            let field = match poly {
                Some(p) => FieldGF2n::with_modulus(*n, u32::try_from(*p)?)?,
                None => FieldGF2n::new(*n)?,
            };
            let du = differential_uniformity(&power_map(&field, *d))?;
            let families: Vec<_> = apn_catalog(*n).into_iter().filter(|e| e.d == *d).collect();
            Outcome::of(&json!({
                "n": n,
                "d": d,
                "differential_uniformity": du,
                "apn": du == 2,
                "families": families,
            }))
        }
        SboxCmd::Dist { table } => {
            let s = Sbox::parse(&read(table)?)?;
            let d = distance_to_affine(&s)?;
            Outcome::of(&d)
        }
        SboxCmd::RoundsCheck { pairs, table, u } => {
            let s = match table {
                Some(t) => Sbox::parse(&read(t)?)?,
                None => Sbox::new(CHALLENGE_SBOX.to_vec())?,
            };
            let pairs = match pairs {
                Some(p) => parse_pairs(&read(p)?)?,
                None => CHALLENGE_PAIRS.to_vec(),
            };
            Outcome::of(&students_contradiction(&s, u32::try_from(*u)?, &pairs)?)
        }
    }
}

fn qsim(cmd: &QsimCmd, seed: u64) -> Result<Outcome> {
    match cmd {
        QsimCmd::Run { circuit, shots } => {
            let c = Circuit::parse(&read(circuit)?)?;
            let mut state = StateVector::zero(c.qubits())?;
            c.run(&mut state)?;
            let w = c.qubits();
            let amps: Vec<Value> = state
                .amplitudes()
                .iter()
                .enumerate()
                .filter(|(_, a)| a.norm_sqr() > 1e-24)
                .map(|(i, a)| json!({ "basis": format!("{i:0w$b}"), "re": a.re, "im": a.im, "probability": a.norm_sqr() }))
                .collect();
            let mut text: String = amps
                .iter()
                .map(|a| format!("|{}⟩  {:+.6} {:+.6}i  p = {:.6}\n", scalar(&a["basis"]), a["re"], a["im"], a["probability"]))
                .collect();
            let mut out = json!({ "qubits": w, "gates": c.gates().len(), "amplitudes": amps });
            let mut outcome_seeded = false;
            if *shots > 0 {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut counts = BTreeMap::new();
                for _ in 0..*shots {
                    *counts.entry(format!("{:0w$b}", state.measure(&mut rng))).or_insert(0u64) += 1;
                }
                for (k, v) in &counts {
                    text.push_str(&format!("{k}: {v}\n"));
                }
                out["counts"] = serde_json::to_value(counts)?;
                outcome_seeded = true;
            }
            let mut o = Outcome::of(&out)?.text(text);
            o.seeded = outcome_seeded;
            Ok(o)
        }
        QsimCmd::QecDemo(a) => qec_demo(a),
        QsimCmd::Noise { eps, trials, corrector, exact } => {
            let rows = noise_sweep(*corrector, eps, *trials, seed)?;
            let exact_rates =
                exact.then(|| eps.iter().map(|&e| exact_logical_rate(*corrector, e)).collect::<Result<Vec<_>, _>>()).transpose()?;
            let mut csv = noise_csv(&rows);
            if let Some(rates) = &exact_rates {
                let mut lines: Vec<String> = csv.lines().map(str::to_string).collect();
                lines[0].push_str(",exact_rate");
                for (line, r) in lines[1..].iter_mut().zip(rates) {
                    line.push_str(&format!(",{r}"));
                }
                csv = lines.join("\n") + "\n";
            }
            Ok(Outcome::of(&json!({ "corrector": corrector, "rows": rows, "exact_rates": exact_rates }))?
                .text(csv)
                .seeded())
        }
    }
}

fn scalar(v: &Value) -> String {
    v.as_str().map_or_else(|| v.to_string(), str::to_string)
}

fn qec_demo(a: &QecArgs) -> Result<Outcome> {
    let (alpha, beta) = (Complex64::new(a.alpha_re, a.alpha_im), Complex64::new(a.beta_re, a.beta_im));
    let norm = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
    ensure!(norm > 0.0, "alpha and beta are both zero");
    let (alpha, beta) = (alpha / norm, beta / norm);
    qubit(alpha, beta)?;
    let enc = repetition_encode(alpha, beta)?;
    let mut noisy = enc.clone();
    if let Some(w) = a.flip {
        ensure!(w < 3, "data wires are 0, 1 and 2");
        inject_bitflip(&mut noisy, w)?;
    }
    let circuit = a.corrector.circuit();
    let syndrome = syndrome_of(&noisy).map(|(s1, s2)| format!("{s1}{s2}"));
    let after = correct(&noisy, &circuit)?;
    Outcome::of(&json!({
        "alpha": [alpha.re, alpha.im],
        "beta": [beta.re, beta.im],
        "flip": a.flip,
        "corrector": a.corrector,
        "syndrome": syndrome,
        "fidelity_before": noisy.fidelity(&enc),
        "fidelity_after": after.top_fidelity(&enc),
        "toffolis": circuit.count("TOFFOLI"),
        "gates": circuit.gates().len(),
    }))
}

fn route(a: &RouteArgs) -> Result<Outcome> {
    let p = if a.present {
        BitPermutation::present()
    } else if a.present16 {
        BitPermutation::present16()
    } else {
        let spec = a.perm.as_deref().expect("clap requires an input");
        let text = if Path::new(spec).is_file() { read(Path::new(spec))? } else { spec.to_string() };
        let map: Vec<usize> = serde_json::from_str(&text).context("permutation must be a JSON array of integers")?;
        BitPermutation::new(map)?
    };
    let plan = route_two_layer(&p);
    let bound = min_layers(&p);
    let layers_used = plan.nets.iter().flat_map(|n| n.segments.iter().map(|s| s.layer)).max().unwrap_or(0);
    let mut out = json!({
        "n": p.len(),
        "inversions": bound.inversions,
        "min_layers": bound.layers,
        "layers_used": layers_used,
        "segments": plan.nets.iter().map(|n| n.segments.len()).sum::<usize>(),
        "vias": plan.nets.iter().map(|n| n.vias.len()).sum::<usize>(),
    });
    let mut failed = false;
    if a.verify {
        let conflicts = verify_plan(&plan)?;
        failed = !conflicts.is_empty();
        out["conflicts"] = conflicts.len().into();
        if failed {
            out["conflict_list"] = serde_json::to_value(&conflicts)?;
        }
    }
    if let Some(path) = &a.svg {
        emit_svg(&plan, path)?;
        out["svg"] = json!(path);
    }
    let mut o = Outcome::of(&out)?;
    o.failed = failed;
    Ok(o)
}

fn run_selftest(a: &SelftestArgs, timing: bool) -> Result<Outcome> {
    let ids: Vec<u8> = if a.only.is_empty() { (1..=selftest::CRITERIA).collect() } else { a.only.clone() };
    let mut text = String::new();
    let mut rows = Vec::new();
    let mut passed = 0;
    for &id in &ids {
        let r = selftest::run(id, a.quick);
        let mut line = r.to_string();
        let mut row = serde_json::to_value(&r)?;
        if timing {
            line.push_str(&format!(" [{:.1} s]", r.elapsed.as_secs_f64()));
            row["elapsed_ms"] = (r.elapsed.as_millis() as u64).into();
        }
        text.push_str(&line);
        text.push('\n');
        rows.push(row);
        passed += usize::from(r.passed);
    }
    text.push_str(&format!("{passed}/{} criteria passed{}\n", ids.len(), if a.quick { " (quick)" } else { "" }));
    let mut out = Outcome::of(&json!({ "quick": a.quick, "passed": passed, "total": ids.len(), "criteria": rows }))?
        .text(text);
    out.failed = passed != ids.len();
    Ok(out)
}
