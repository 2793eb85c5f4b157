use std::collections::{BTreeMap, BTreeSet};

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use ietlang::iet::{build_iet, IetKind, IetSpec};
use ietlang::language::language_from_iet;
use ietlang::order::{all_flip_sets, search_orders};
use ietlang::par::{self, Execution};
use ietlang::sequence::fixed_point_prefix;
use ietlang::{Alphabet, ExactScalar};

fn five_letter_iet() -> ietlang::iet::IntervalExchange {
    let q = ExactScalar::ratio;
    let s5 = ExactScalar::sqrt(5);
    build_iet(IetSpec {
        alphabet: Alphabet::from_chars("12345"),
        lengths: vec![q(1, 3), &s5 / &ExactScalar::from_int(7), q(1, 5), q(2, 9), q(1, 11)],
        image_lengths: None,
        order_d: vec![0, 1, 2, 3, 4],
        order_a: vec![4, 2, 0, 3, 1],
        flips: BTreeSet::new(),
        kind: IetKind::Standard,
    })
    .expect("valid bench IET")
}

fn bench_search(c: &mut Criterion) {
    let t = five_letter_iet();
    let lang = language_from_iet(&t, 8).unwrap();
    let flips = all_flip_sets(5).unwrap();
    let mut g = c.benchmark_group("search_orders");
    for exec in [Execution::Sequential, Execution::Parallel] {
        g.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &exec| {
            b.iter(|| search_orders(black_box(&lang), &flips, exec).unwrap())
        });
    }
    g.finish();
}

fn bench_windows(c: &mut Criterion) {
    let mut rules = BTreeMap::new();
    rules.insert(0u8, vec![0, 1]);
    rules.insert(1u8, vec![0]);
    let word = fixed_point_prefix(&rules, 0, 20_000);
    let starts: Vec<usize> = (0..512).map(|i| i * 37).collect();
    let mut g = c.benchmark_group("window_factors");
    for exec in [Execution::Sequential, Execution::Parallel] {
        g.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &exec| {
            b.iter(|| {
                par::map(exec, &starts, |&s| {
                    let w = &word[s..s + 256];
                    w.windows(12).map(|f| f.to_vec()).collect::<BTreeSet<_>>().len()
                })
            })
        });
    }
    g.finish();
}

criterion_group!(benches, bench_search, bench_windows);
criterion_main!(benches);
