use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use cryptkit_core::boolanalysis::{differential_uniformity, distance_to_affine, power_map, Sbox, CHALLENGE_SBOX};
use cryptkit_core::dlog::{recover, MachineSpec, OracleMachine, Strategy, CHALLENGE_G, CHALLENGE_K, CHALLENGE_N};
use cryptkit_core::fpe::{FeistelParams, FpeScheme, PrfBackend, PrfHandle, Variant};
use cryptkit_core::gf2::FieldGF2n;
use cryptkit_core::mask::{attack, generate_instance, SharingParams};
use cryptkit_core::permclose::closeness_table;
use cryptkit_core::quantum::{noise_sweep, Corrector};
use cryptkit_core::routing::{route_two_layer, verify_plan, BitPermutation};

fn dlog(c: &mut Criterion) {
    let spec = MachineSpec::simulate(CHALLENGE_N, Some(CHALLENGE_K), 1).unwrap();
    let mut g = c.benchmark_group("dlog");
    g.sample_size(10);
    for strategy in [Strategy::PhBsgs, Strategy::Bezout] {
        g.bench_function(format!("{strategy:?}"), |b| {
            b.iter(|| {
                let m = OracleMachine::new(&spec).unwrap();
                recover(&m, strategy, Some(CHALLENGE_G)).unwrap().k
            })
        });
    }
    g.finish();
}

fn fpe(c: &mut Criterion) {
    let prf = PrfHandle::new(7, PrfBackend::Speck);
    let mut g = c.benchmark_group("fpe_encrypt");
    for (n, variant) in [(5_818_342, Variant::Composite), (5_818_343, Variant::PrimeDec), (5_818_343, Variant::PrimeInc)] {
        let s = FpeScheme::new(n, variant, FeistelParams::new(3).unwrap()).unwrap();
        g.bench_function(variant.to_string(), |b| b.iter(|| s.encrypt(black_box(1_234_567), &prf).unwrap()));
    }
    g.finish();
}

fn mask(c: &mut Criterion) {
    let (inst, _) = generate_instance(0, SharingParams::CHALLENGE).unwrap();
    let mut g = c.benchmark_group("mask");
    g.sample_size(10);
    g.bench_function("attack_challenge_shape", |b| b.iter(|| attack(&inst).unwrap().suffix_bits));
    g.finish();
}

fn boolean(c: &mut Criterion) {
    let field = FieldGF2n::new(10).unwrap();
    let f = power_map(&field, 7);
    c.bench_function("differential_uniformity_n10", |b| b.iter(|| differential_uniformity(&f).unwrap()));
    let s = Sbox::new(CHALLENGE_SBOX.to_vec()).unwrap();
    c.bench_function("distance_to_affine_n4", |b| b.iter(|| distance_to_affine(&s).unwrap().distance));
    c.bench_function("closeness_table_n16", |b| b.iter(|| closeness_table(16).unwrap().len()));
}

fn simulation(c: &mut Criterion) {
    c.bench_function("noise_sweep_4096", |b| {
        b.iter(|| noise_sweep(Corrector::ThreeToffoli, &[0.01], 4096, 1).unwrap()[0].logical_errors)
    });
    let p = BitPermutation::present();
    c.bench_function("route_and_verify_present", |b| b.iter(|| verify_plan(&route_two_layer(&p)).unwrap().len()));
}

criterion_group!(benches, dlog, fpe, mask, boolean, simulation);
criterion_main!(benches);
