use criterion::{black_box, criterion_group, criterion_main, Criterion};
use mrhinf::design::first_order_lag;
use mrhinf::ltisys::{c2d_step_invariant, hinf_norm, lift};
use mrhinf::{build_plant, design_filter, search, BaseSpec, DecimationPattern, DesignSpec, SynthesisOptions};

fn spec(pattern: &str) -> DesignSpec {
    let p: DecimationPattern = pattern.parse().unwrap();
    let m = p.len();
    DesignSpec::new(p, 1.0, m, 4, first_order_lag(10.0)).unwrap()
}

fn lifting(c: &mut Criterion) {
    let fd = c2d_step_invariant(&first_order_lag(10.0), 0.25).unwrap();
    let wide = build_plant(&spec("1101010")).unwrap().g11;
    c.bench_function("lift/lag_by_28", |b| b.iter(|| lift(black_box(&fd), 28).unwrap()));
    c.bench_function("lift/plant_block_by_3", |b| b.iter(|| lift(black_box(&wide), 3).unwrap()));
}

fn norms(c: &mut Criterion) {
    let plant = build_plant(&spec("1100")).unwrap();
    let design = design_filter(&spec("1100"), &SynthesisOptions::default()).unwrap();
    let closed = mrhinf::close_loop(&plant, &design.result.filter).unwrap();
    c.bench_function("hinf_norm/g11_1100", |b| b.iter(|| hinf_norm(black_box(&plant.g11), 1e-6).unwrap()));
    c.bench_function("hinf_norm/closed_loop_1100", |b| b.iter(|| hinf_norm(black_box(&closed), 1e-6).unwrap()));
}

fn synthesis(c: &mut Criterion) {
    let opts = SynthesisOptions::default();
    let mut group = c.benchmark_group("synthesis");
    group.sample_size(10);
    for pattern in ["1100", "1010"] {
        let s = spec(pattern);
        group.bench_function(pattern, |b| b.iter(|| design_filter(black_box(&s), &opts).unwrap()));
    }
    let base = BaseSpec { h: 1.0, m: None, n: 4, f: first_order_lag(10.0) };
    group.bench_function("search_5_2", |b| b.iter(|| search::search(5, 2, &base, &opts, None).unwrap()));
    group.finish();
}

criterion_group!(benches, lifting, norms, synthesis);
criterion_main!(benches);
