use criterion::{black_box, criterion_group, criterion_main, Criterion};
use moebius_core::constructions::{spiral_kappa, CurveSpec, FrenetCurve};
use moebius_core::scenario::{run, Plan, Scenario};
use moebius_core::{build_family, evaluate_jet, FamilySpec, MoebiusState, SpiralCase};

fn moebius_state(c: &mut Criterion) {
    for (n, p) in [(3, 1), (5, 2)] {
        let fam = build_family(&FamilySpec::spiral(SpiralCase::FlatCneg, -1.0, 1.0, n, p)).unwrap();
        let x = fam.chart.domain.grid(&vec![1; n], 0.05).remove(0);
        c.bench_function(&format!("jet order 4, n={n}"), |b| {
            b.iter(|| evaluate_jet(&fam.chart, black_box(&x), 4).unwrap())
        });
        c.bench_function(&format!("moebius state, n={n}"), |b| {
            b.iter(|| MoebiusState::at(&fam.chart, black_box(&x)).unwrap())
        });
    }
}

fn frenet(c: &mut Criterion) {
    let kappa = spiral_kappa(SpiralCase::HypCneg, -1.0, 1.0).unwrap();
    let spec = CurveSpec::new(-1, kappa, SpiralCase::HypCneg.default_domain());
    c.bench_function("frenet curve build", |b| b.iter(|| FrenetCurve::new(black_box(spec)).unwrap()));
}

fn scenario(c: &mut Criterion) {
    let text = r#"{
        "family": {"kind": "cylinder", "core": {"type": "spiral", "case": "flat_cneg", "c": -1.0}, "n": 3, "p": 1, "ell": 0},
        "grid": {"counts": 3},
        "seed": 1
    }"#;
    let plan = Plan::new(Scenario::from_json(text).unwrap(), &[]).unwrap();
    let mut group = c.benchmark_group("scenario");
    group.sample_size(10);
    group.bench_function("27 points, default checks", |b| b.iter(|| run(&plan, 1).unwrap()));
    group.finish();
}

criterion_group!(benches, moebius_state, frenet, scenario);
criterion_main!(benches);
