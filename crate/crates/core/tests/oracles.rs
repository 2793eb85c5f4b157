//! Cross-checks of the main algorithms against slow, independent reimplementations.

use std::collections::BTreeSet;

use ietlang::corpus::{list, load_example};
use ietlang::exactnum::ExactScalar;
use ietlang::iet::CodedMap;
use ietlang::language::{language_from_iet, language_from_sequences, FiniteLanguage};
use ietlang::order::{all_flip_sets, search_orders, OrderSpec};
use ietlang::par::Execution;
use ietlang::Word;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const POINTS: usize = 200;

/// Codings of `POINTS` random points, `4n` letters each, read as windows.
fn sampled_language<M: CodedMap>(
    map: &M,
    coding: impl Fn(&ExactScalar, usize) -> Option<Word>,
    total: &ExactScalar,
    n: usize,
    seed: u64,
) -> FiniteLanguage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut windows = Vec::new();
    let mut attempts = 0;
    while windows.len() < POINTS {
        attempts += 1;
        assert!(attempts < 20 * POINTS, "too many points hit a discontinuity");
        // Denominator 10007 is prime, so orbits of these points avoid the corpus endpoints.
        let x = &ExactScalar::ratio(rng.gen_range(1..10007), 10007) * total;
        if let Some(w) = coding(&x, n) {
            windows.push(w);
        }
    }
    language_from_sequences(map.coding_alphabet(), &windows, n, 0).unwrap()
}

fn untruncated(c: ietlang::iet::Coding) -> Option<Word> {
    (c.forward_truncated_at.is_none() && c.backward_truncated_at.is_none()).then_some(c.window.letters)
}

#[test]
fn cylinder_refinement_matches_sampled_orbits() {
    let mut checked = 0;
    for name in list().unwrap() {
        let f = load_example(&name).unwrap();
        let Some(t) = f.map().unwrap() else { continue };
        for n in [4, 7, 10] {
            let exact = language_from_iet(&t, n).unwrap();
            let sampled =
                sampled_language(&t, |x, n| untruncated(t.natural_coding(x, 2 * n, 2 * n).ok()?), t.total(), n, 7);
            if let Some((k, w)) = exact.first_divergence(&sampled) {
                panic!("{name} at depth {n}: languages differ at length {k} on {:?}", t.alphabet().render(&w));
            }
        }
        checked += 1;
    }
    assert!(checked >= 5);
}

#[test]
fn blown_up_map_matches_sampled_orbits() {
    let f = load_example("mon-fibonacci").unwrap();
    let b = f.blowup_map().unwrap().unwrap();
    let n = 8;
    let exact = language_from_iet(&b, n).unwrap();
    let sampled = sampled_language(&b, |x, n| untruncated(b.natural_coding(x, 2 * n, 2 * n).ok()?), b.total(), n, 11);
    assert_eq!(exact.first_divergence(&sampled), None);
}

/// The order condition straight from its definition, on raw word sets.
fn brute_force_holds(levels: &[BTreeSet<Word>], spec: &OrderSpec) -> bool {
    let depth = levels.len() - 1;
    let pos = |order: &[u8], l: u8| order.iter().position(|&x| x == l).unwrap();
    for k in 0..=depth.saturating_sub(2) {
        for w in &levels[k] {
            let pairs: Vec<(u8, u8)> = levels[k + 2]
                .iter()
                .filter(|u| &u[1..=k] == w.as_slice())
                .map(|u| (u[0], u[k + 1]))
                .collect();
            let lefts: BTreeSet<u8> = pairs.iter().map(|p| p.0).collect();
            let rights: BTreeSet<u8> = pairs.iter().map(|p| p.1).collect();
            if lefts.len() < 2 || rights.len() < 2 {
                continue;
            }
            let odd = w.iter().filter(|l| spec.flips.contains(l)).count() % 2 == 1;
            for &(a, c) in &pairs {
                for &(b, d) in &pairs {
                    if a != b && c != d {
                        let arrival = pos(&spec.order_a, a) < pos(&spec.order_a, b);
                        let departure = (pos(&spec.order_d, c) < pos(&spec.order_d, d)) ^ odd;
                        if arrival != departure {
                            return false;
                        }
                    }
                }
            }
        }
    }
    true
}

fn permutations(n: u8) -> Vec<Vec<u8>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Every holding spec, reduced to one representative per reversal pair and
/// with letters that occur in no bispecial dropped from the flip set.
fn brute_force_classes(lang: &FiniteLanguage, flip_sets: &[BTreeSet<u8>]) -> BTreeSet<(Vec<u8>, Vec<u8>, Vec<u8>)> {
    let levels: Vec<BTreeSet<Word>> = (0..=lang.depth()).map(|k| lang.level(k).clone()).collect();
    let n = lang.alphabet().len() as u8;
    let bispecial_letters: BTreeSet<u8> = lang.bispecials().into_iter().flatten().collect();
    let mut out = BTreeSet::new();
    for flips in flip_sets {
        let flips: BTreeSet<u8> = flips.intersection(&bispecial_letters).copied().collect();
        for d in permutations(n) {
            for a in permutations(n) {
                let spec = OrderSpec { order_d: d.clone(), order_a: a.clone(), flips: flips.clone() };
                if brute_force_holds(&levels, &spec) {
                    let rd: Vec<u8> = d.iter().rev().copied().collect();
                    let ra: Vec<u8> = a.iter().rev().copied().collect();
                    let (d, a) = if rd < d { (rd, ra) } else { (d.clone(), a) };
                    out.insert((flips.iter().copied().collect(), d, a));
                }
            }
        }
    }
    out
}

#[test]
fn order_search_matches_exhaustive_enumeration() {
    for name in list().unwrap() {
        let f = load_example(&name).unwrap();
        let n = f.alphabet().unwrap().len();
        if n > 4 {
            continue;
        }
        let lang = f.language(f.depth.min(9)).unwrap();
        let flip_sets = all_flip_sets(n).unwrap();
        let found: BTreeSet<_> = search_orders(&lang, &flip_sets, Execution::Sequential)
            .unwrap()
            .into_iter()
            .map(|s| (s.flips.into_iter().collect::<Vec<_>>(), s.order_d, s.order_a))
            .collect();
        assert_eq!(found, brute_force_classes(&lang, &flip_sets), "{name}");
    }
}

#[test]
fn parallel_and_sequential_search_agree() {
    let f = load_example("mon-fibonacci").unwrap();
    let lang = f.language(10).unwrap();
    let sets = all_flip_sets(3).unwrap();
    assert_eq!(
        search_orders(&lang, &sets, Execution::Sequential).unwrap(),
        search_orders(&lang, &sets, Execution::Parallel).unwrap()
    );
}
