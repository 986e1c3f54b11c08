use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rug::Rational;

use ksol::catalog;
use ksol::geometry::{self, linalg, FiberChoice, MarkedPoint};
use ksol::par::Parallelism;
use ksol::stability::{self, Prepared};
use ksol::{IntervalVector, Precision};

const MODES: [(&str, Parallelism); 2] = [("sequential", Parallelism::Sequential), ("parallel", Parallelism::Parallel)];

fn boundary_sweep(c: &mut Criterion) {
    let e = catalog::find("3fold/3.23").unwrap();
    let prep = Prepared::new(&e.dp).unwrap();
    let basis = linalg::identity(2);
    let mut group = c.benchmark_group("candidate_box_3.23_200_segments");
    group.sample_size(10);
    for (name, mode) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                stability::candidate_box_prepared(&prep, &basis, &[0.26617786, 0.67164063], 1e-5, 200, Precision::DEFAULT, mode)
                    .unwrap()
            })
        });
    }
    group.finish();
}

fn discrete_sum(c: &mut Criterion) {
    let e = catalog::find("3fold/2.30").unwrap();
    let delta = geometry::special_fiber(&e.dp, &FiberChoice::Point(MarkedPoint::Zero)).unwrap();
    let xi = [Rational::new(), Rational::from((103, 200)), Rational::new()];
    let xi = IntervalVector::from_rationals(&xi, Precision::DEFAULT);
    let v = [Rational::new(), Rational::new(), Rational::from(1)];
    let mut group = c.benchmark_group("discrete_futaki_2.30_k20");
    group.sample_size(10);
    for (name, mode) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| stability::discrete_futaki(&delta, &xi, &v, 20, 50_000_000, mode).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, boundary_sweep, discrete_sum);
criterion_main!(benches);
