use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use dtam_cli::instance::gen_instance;
use dtam_core::linalg::{least_squares_on_support, SupportSet};
use dtam_core::qp::{project_capped_simplex, solve_w_subproblem, CappedSimplexSpec, SumMode};
use dtam_core::rng::SplitMix64;
use dtam_core::theory::ric_bruteforce;
use dtam_core::{solve, AlgoConfig, Algorithm, DenseMatrix};

fn pursuit(c: &mut Criterion) {
    let mut group = c.benchmark_group("pursuit_100x400");
    group.sample_size(10);
    let cfg = AlgoConfig::default();
    for k in [10, 25] {
        let problem = gen_instance(400, 100, k, 1).unwrap();
        for alg in Algorithm::ALL {
            group.bench_with_input(BenchmarkId::new(alg.name(), k), &problem, |b, p| {
                b.iter(|| solve(alg, black_box(p), &cfg).unwrap())
            });
        }
    }
    group.finish();
}

fn kernels(c: &mut Criterion) {
    let mut rng = SplitMix64::new(2);
    let v = rng.gaussian_vec(64);
    let spec = CappedSimplexSpec::new(64, 10, SumMode::Equality);
    c.bench_function("project_capped_simplex_64", |b| {
        b.iter(|| project_capped_simplex(black_box(&v), &spec).unwrap())
    });

    let problem = gen_instance(400, 100, 10, 3).unwrap();
    let support = SupportSet::from_indices((0..20).collect());
    c.bench_function("least_squares_20_of_400", |b| {
        b.iter(|| least_squares_on_support(&problem.a, black_box(&problem.y), &support).unwrap())
    });

    let u = rng.gaussian_vec(400);
    c.bench_function("w_subproblem_20", |b| {
        b.iter(|| solve_w_subproblem(&problem.a, black_box(&problem.y), &u, &support, 10, SumMode::Equality).unwrap())
    });

    let small = DenseMatrix::new(8, 12, rng.gaussian_vec(96)).unwrap();
    c.bench_function("ric_bruteforce_8x12_k3", |b| b.iter(|| ric_bruteforce(black_box(&small), 3).unwrap()));
}

criterion_group!(benches, pursuit, kernels);
criterion_main!(benches);
