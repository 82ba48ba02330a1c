use cryptkit_core::dlog::{recover, MachineSpec, OracleMachine, Strategy, CHALLENGE_G, CHALLENGE_K, CHALLENGE_N};
use cryptkit_core::fpe::{fpe_sweep, FeistelParams, FpeScheme, PrfBackend, PrfHandle, SplitDomain, Variant};
use cryptkit_core::puzzles::{ec_qr_sweep, min_generation_cost};
use cryptkit_core::routing::{min_layers, route_two_layer, verify_plan, BitPermutation};

#[test]
fn discrete_log_answer() {
    let spec = MachineSpec::simulate(CHALLENGE_N, Some(CHALLENGE_K), 11).unwrap();
    for strategy in [Strategy::PhBsgs, Strategy::Bezout, Strategy::Ph] {
        let m = OracleMachine::new(&spec).unwrap();
        assert_eq!(recover(&m, strategy, Some(CHALLENGE_G)).unwrap().k, CHALLENGE_K, "{strategy:?}");
    }
}

#[test]
fn ballot_domain_split() {
    let d = SplitDomain::new(5_818_342).unwrap();
    assert_eq!((d.n1, d.n2), (2594, 2243));
}

#[test]
fn full_ballot_sweeps() {
    let prf = PrfHandle::new(0x5eed, PrfBackend::Aes);
    for (n, variant) in [(5_818_342, Variant::Composite), (5_818_343, Variant::PrimeDec), (5_818_343, Variant::PrimeInc)] {
        let s = FpeScheme::new(n, variant, FeistelParams::new(3).unwrap()).unwrap();
        let rep = fpe_sweep(&s, &prf).unwrap();
        assert!(rep.bijective && rep.round_trip, "{variant}");
        assert_eq!(rep.prf_calls_min, rep.prf_calls_max, "{variant}");
    }
}

#[test]
fn curve_sweep_to_200() {
    let rep = ec_qr_sweep(200).unwrap();
    assert!(rep.violations.is_empty(), "{:?}", &rep.violations[..rep.violations.len().min(3)]);
    assert!(rep.odd_order_points > 0);
}

#[test]
fn cost_and_present() {
    assert_eq!(min_generation_cost(2021).unwrap().unwrap().cost, 47);
    let p = BitPermutation::present();
    assert!(verify_plan(&route_two_layer(&p)).unwrap().is_empty());
    assert_eq!(min_layers(&p).layers, 2);
}
