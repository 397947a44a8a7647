use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use torus_vortex::energy::CoreProfile;
use torus_vortex::harmonic::build_harmonic_map;
use torus_vortex::pde::{init_field, Fft2, PdeMode, PdeSolver};
use torus_vortex::reduced::mu_sweep;
use torus_vortex::{ExecPolicy, GreenEvaluator, MomentumVector, SimParams, VortexConfig};

const POLICIES: [(&str, ExecPolicy); 2] = [
    ("sequential", ExecPolicy::Sequential),
    ("parallel", ExecPolicy::Parallel),
];

fn setup() -> (GreenEvaluator, VortexConfig, MomentumVector) {
    let cfg = VortexConfig::dipole_default();
    let q = MomentumVector::canonical(&cfg);
    (GreenEvaluator::default(), cfg, q)
}

fn sweep(c: &mut Criterion) {
    let (g, cfg, q) = setup();
    let p = SimParams::new(0.01, 0.05, 1e-4, 0.02).unwrap();
    let mus = [1.0 / 100.0, 1.0 / 400.0, 1.0 / 1600.0, 0.0];
    let mut grp = c.benchmark_group("mu_sweep");
    grp.sample_size(10);
    for (name, policy) in POLICIES {
        grp.bench_function(name, |b| {
            b.iter(|| black_box(mu_sweep(&g, &cfg, &q, &mus, &p, 0.01, policy).unwrap()))
        });
    }
    grp.finish();
}

fn harmonic(c: &mut Criterion) {
    let (g, cfg, q) = setup();
    let mut grp = c.benchmark_group("harmonic_map");
    grp.sample_size(10);
    for (name, policy) in POLICIES {
        grp.bench_with_input(BenchmarkId::new(name, 128), &128, |b, &n| {
            b.iter(|| black_box(build_harmonic_map(&g, n, &cfg, &q, policy).unwrap()))
        });
    }
    grp.finish();
}

fn fft(c: &mut Criterion) {
    let mut grp = c.benchmark_group("fft2");
    for (name, policy) in POLICIES {
        let f = Fft2::new(512, policy);
        let mut data = vec![num_complex::Complex64::new(1.0, 0.5); 512 * 512];
        grp.bench_with_input(BenchmarkId::new(name, 512), &512, |b, _| {
            b.iter(|| {
                f.forward(&mut data);
                f.inverse(&mut data);
            })
        });
    }
    grp.finish();
}

fn nlsw_steps(c: &mut Criterion) {
    let (g, cfg, q) = setup();
    let p = SimParams::new(0.01, 0.05, 1e-4, 0.1).unwrap();
    let mut grp = c.benchmark_group("nlsw_10_steps");
    grp.sample_size(10);
    for (name, policy) in POLICIES {
        let s0 = init_field(&g, 256, &cfg, &q, &p, 1e-4, PdeMode::Nlsw, &CoreProfile::Tanh, policy).unwrap();
        let solver = PdeSolver::for_state(&s0, policy);
        grp.bench_with_input(BenchmarkId::new(name, 256), &256, |b, _| {
            b.iter(|| {
                let mut s = s0.clone();
                for _ in 0..10 {
                    solver.step(&mut s).unwrap();
                }
                black_box(s.t)
            })
        });
    }
    grp.finish();
}

criterion_group!(benches, sweep, harmonic, fft, nlsw_steps);
criterion_main!(benches);
