//! Compares the rayon-backed batch paths against their sequential
//! counterparts on the two sweeps that dominate verification workloads:
//! lasso satisfaction batches and policy audits.
//!
//! Run with `cargo bench` (parallel feature on by default); with
//! `cargo bench --no-default-features` both groups collapse to the
//! sequential path, which is the baseline.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use fairplan::domain::Domain;
use fairplan::logic::{parse_formula, Dialect};
use fairplan::pipeline::{self, Fairness};
use fairplan::{par, Lasso};

fn d1() -> Domain {
    Domain::example_d1()
}

/// All lassos of the domain with bounded prefix and cycle, the workload the
/// verifier fans out over.
fn lasso_batch(bound: usize) -> Vec<Lasso> {
    d1().enumerate_lassos(bound, bound)
}

fn bench_lasso_eval(c: &mut Criterion) {
    let goal = parse_formula("!l | F (l & X X !r) | F (l & X X X X !l)").unwrap();
    let mut group = c.benchmark_group("lasso_eval");
    for bound in [5usize, 6] {
        let batch = lasso_batch(bound);
        group.bench_with_input(BenchmarkId::new("seq", bound), &batch, |b, batch| {
            b.iter(|| {
                par::map_seq(batch, |w| {
                    fairplan::logic::eval_ltl_lasso(w, &goal, Dialect::Ltl)
                })
            })
        });
        group.bench_with_input(BenchmarkId::new("default", bound), &batch, |b, batch| {
            b.iter(|| {
                par::map(batch, |w| {
                    fairplan::logic::eval_ltl_lasso(w, &goal, Dialect::Ltl)
                })
            })
        });
    }
    group.finish();
}

fn bench_verify_audit(c: &mut Criterion) {
    let domain = d1();
    let goal = parse_formula("F (l & X X l)").unwrap();
    let policy = domain.unique_policy().expect("d1 has a single policy");
    let mut group = c.benchmark_group("verify_audit");
    for bound in [6usize, 8] {
        group.bench_with_input(BenchmarkId::new("seq", bound), &bound, |b, &bound| {
            b.iter(|| {
                pipeline::verify_policy_seq(
                    &domain,
                    &policy,
                    &goal,
                    Dialect::Ltlf,
                    Fairness::StateAction,
                    bound,
                )
            })
        });
        group.bench_with_input(BenchmarkId::new("default", bound), &bound, |b, &bound| {
            b.iter(|| {
                pipeline::verify_policy(
                    &domain,
                    &policy,
                    &goal,
                    Dialect::Ltlf,
                    Fairness::StateAction,
                    bound,
                )
            })
        });
    }
    group.finish();
}

criterion_group!(benches, bench_lasso_eval, bench_verify_audit);
criterion_main!(benches);
