//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::collections::BTreeSet;
use std::process::Command;

use ietlang::constructions::{splitting_check, standard_from_language, theta_search, Measure, SplitVerdict, SplittingSpec, ThetaOutcome};
use ietlang::corpus::{list, load_example};
use ietlang::exactnum::ExactScalar;
use ietlang::iet::{build_iet, CodedMap, Direction, IetKind, IetSpec, IntervalExchange, Step};
use ietlang::language::{
    bispecial_report, classify_bispecials, complexity_profile, language_from_iet, language_from_sequences,
    Classification, FiniteLanguage,
};
use ietlang::order::{all_flip_sets, check_order_condition, find_connections, search_orders, OrderSpec, OrderVerdict};
use ietlang::par::Execution;
use ietlang::{Alphabet, Word};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Verdict = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn sturmian_complexity() -> Verdict {
    let t = load_example("sturmian").map_err(s)?.map().map_err(s)?.ok_or("no map")?;
    let lang = language_from_iet(&t, 20).map_err(s)?;
    let p = complexity_profile(&lang).p;
    let want: Vec<usize> = (2..=21).collect();
    ensure(p == want, format!("p = {p:?}"))?;
    Ok("p(n) = n + 1 for n = 1..20".into())
}

fn random_length(rng: &mut ChaCha8Rng, quadratic: bool) -> ExactScalar {
    loop {
        let x = if quadratic && rng.gen_bool(0.7) {
            ExactScalar::quad(rng.gen_range(-4..9), rng.gen_range(1..4), rng.gen_range(-3..4), rng.gen_range(1..4), 5)
        } else {
            ExactScalar::ratio(rng.gen_range(1..30), rng.gen_range(1..7))
        };
        if x.is_positive() {
            return x;
        }
    }
}

/// The fixed suite of 100 exchanges: 2 to 5 letters, random permutations and
/// flips, half standard and half affine, lengths in Q or Q(sqrt 5).
fn random_suite() -> Vec<IntervalExchange> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1e7);
    (0..100)
        .map(|i| {
            let n = 2 + i % 4;
            let quadratic = i % 3 != 0;
            let mut order_d: Word = (0..n as u8).collect();
            let mut order_a = order_d.clone();
            order_d.shuffle(&mut rng);
            order_a.shuffle(&mut rng);
            let flips: BTreeSet<u8> = (0..n as u8).filter(|_| rng.gen_bool(0.3)).collect();
            let lengths: Vec<ExactScalar> = (0..n).map(|_| random_length(&mut rng, quadratic)).collect();
            let affine = i % 2 == 1;
            let image_lengths = affine.then(|| {
                let raw: Vec<ExactScalar> = (0..n).map(|_| random_length(&mut rng, quadratic)).collect();
                let scale = &lengths.iter().sum::<ExactScalar>() / &raw.iter().sum::<ExactScalar>();
                raw.iter().map(|x| x * &scale).collect()
            });
            build_iet(IetSpec {
                alphabet: Alphabet::from_chars(&"12345"[..n]),
                lengths,
                image_lengths,
                order_d,
                order_a,
                flips,
                kind: if affine { IetKind::Affine } else { IetKind::Standard },
            })
            .expect("suite exchanges are valid")
        })
        .collect()
}

fn order_property(suite: &[(IntervalExchange, FiniteLanguage)]) -> Verdict {
    let mut flipped = 0;
    for (i, (t, lang)) in suite.iter().enumerate() {
        let spec = OrderSpec::from_iet(t);
        if !spec.flips.is_empty() {
            flipped += 1;
        }
        if let OrderVerdict::Counterexample { w, .. } = check_order_condition(lang, &spec) {
            return Err(format!("exchange {i}: own order fails at {:?}", t.alphabet().render(&w)));
        }
        if let Some(r) = classify_bispecials(lang)
            .into_iter()
            .find(|r| matches!(r.classification, Classification::Strong | Classification::LocallyStrongOnly))
        {
            return Err(format!("exchange {i}: {:?} is {:?}", t.alphabet().render(&r.word), r.classification));
        }
    }
    Ok(format!("{} exchanges ({flipped} with flips): order holds, no strong or locally strong bispecial", suite.len()))
}

fn connection_property(suite: &[(IntervalExchange, FiniteLanguage)]) -> Verdict {
    let mut without = 0;
    for (i, (t, lang)) in suite.iter().enumerate() {
        let spec = OrderSpec::from_iet(t);
        let weak: BTreeSet<Word> = classify_bispecials(lang)
            .into_iter()
            .filter(|r| r.classification == Classification::Weak)
            .map(|r| r.word)
            .collect();
        let connected: BTreeSet<Word> = find_connections(lang, &spec).witnesses.into_iter().map(|c| c.w).collect();
        ensure(weak == connected, format!("exchange {i}: weak {weak:?} but connections at {connected:?}"))?;
        if connected.is_empty() {
            without += 1;
            let c = complexity_profile(lang);
            let k = t.alphabet().len() as i64 - 1;
            // Stable range: the longest constant stretch of s ending at N - 2.
            let last = *c.s.last().unwrap();
            let start = c.s.iter().rposition(|&x| x != last).map_or(0, |p| p + 1);
            ensure(last == k, format!("exchange {i}: s = {:?}, expected {k} from index {}", c.s, start + 1))?;
        }
    }
    Ok(format!("weak words = connection words on all {}; {without} without connections have s(n) = #A - 1", suite.len()))
}

fn sturmian_roundtrip() -> Verdict {
    let f = load_example("sturmian").map_err(s)?;
    let lang = f.language(14).map_err(s)?;
    let alpha = ExactScalar::quad(3, 2, -1, 2, 5);
    let mu = Measure::new(vec![&ExactScalar::one() - &alpha, alpha]).map_err(s)?;
    let spec = OrderSpec::parse(lang.alphabet(), "12", "21", "").map_err(s)?;
    let (t, report) = standard_from_language(&lang, &spec, &mu).map_err(s)?;
    ensure(report.agrees(), format!("{report:?}"))?;
    let again = language_from_iet(&t, 14).map_err(s)?;
    ensure(again == lang, "rebuilt language differs")?;
    Ok("depth-14 language rebuilt exactly from measure (1 - alpha, alpha)".into())
}

fn oracle_equivalence() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut names = Vec::new();
    for name in list().map_err(s)? {
        let f = load_example(&name).map_err(s)?;
        let Some(t) = f.map().map_err(s)? else { continue };
        let n = 10;
        let mut windows = Vec::new();
        while windows.len() < 200 {
            let x = &ExactScalar::ratio(rng.gen_range(1..10007), 10007) * t.total();
            let c = t.natural_coding(&x, 2 * n, 2 * n).map_err(s)?;
            if c.forward_truncated_at.is_none() && c.backward_truncated_at.is_none() {
                windows.push(c.window.letters);
            }
        }
        let sampled = language_from_sequences(t.coding_alphabet(), &windows, n, 0).map_err(s)?;
        for k in 1..=n {
            let exact = language_from_iet(&t, k).map_err(s)?;
            ensure(exact == sampled.truncated(k), format!("{name}: differs at depth {k}"))?;
        }
        names.push(name);
    }
    ensure(names.len() >= 5, format!("only {} corpus maps", names.len()))?;
    Ok(format!("refinement = 200 sampled orbits at every depth <= 10 for {}", names.join(", ")))
}

fn mon_unique_order() -> Verdict {
    let lang = load_example("mon-fibonacci").map_err(s)?.language(12).map_err(s)?;
    let a = lang.alphabet().clone();
    let sets: Vec<BTreeSet<u8>> = vec![BTreeSet::new(), [0].into(), [1].into(), [2].into()];
    let found = search_orders(&lang, &sets, Execution::default()).map_err(s)?;
    let want = OrderSpec::parse(&a, "132", "231", "").map_err(s)?.canonical();
    let shown: Vec<String> = found.iter().map(|c| c.render(&a)).collect();
    ensure(found == vec![want], format!("classes: {shown:?}"))?;
    Ok(format!("exactly one class: {}", shown[0]))
}

fn seven_words() -> Verdict {
    let lang = load_example("no-order-7words").map_err(s)?.language(3).map_err(s)?;
    let found = search_orders(&lang, &all_flip_sets(4).map_err(s)?, Execution::default()).map_err(s)?;
    ensure(found.is_empty(), format!("{} classes found", found.len()))?;
    let r = bispecial_report(&lang, &[]);
    ensure(r.classification == Classification::Neutral && r.witness.is_none(), format!("{:?}", r.classification))?;
    Ok("no order for any flip set; empty word Neutral without witness".into())
}

fn mon_blowup() -> Verdict {
    let f = load_example("mon-fibonacci").map_err(s)?;
    let b = f.blowup_map().map_err(s)?.ok_or("no blow-up")?;
    let total = b.closed_form_total();
    ensure(total == ExactScalar::from_int(4), format!("M = {total}"))?;
    let (lo, hi) = b.blown_interval(0, 0).ok_or("no J_0")?;
    let x = &(&lo + &hi) / &ExactScalar::from_int(2);
    let c = b.natural_coding(&x, 12, 12).map_err(s)?;
    let z = &f.sequence_seqs().map_err(s)?[0];
    let around = z.window_between(-200, 200, 0).letters;
    let w = &c.window.letters;
    ensure(w.len() == 24 && around.windows(24).any(|u| u == w.as_slice()), "coding is not a factor of y'3y")?;
    ensure(matches!(b.apply(&x, Direction::Forward).map_err(s)?, Step::Defined(_)), "J_0 is not mapped")?;
    let a = b.coding_alphabet();
    Ok(format!("M = 4; coding of the middle of J_0 is {}|{}", a.render(&w[..12]), a.render(&w[12..])))
}

fn birkhoff_verdicts() -> Verdict {
    let outcome = |name: &str| -> Result<(ThetaOutcome, Option<String>), String> {
        let f = load_example(name).map_err(s)?;
        let r = theta_search(&f.sequence_seqs().map_err(s)?, f.alphabet().map_err(s)?.len());
        Ok((r.outcome, r.sample.map(|t| t.render(&f.alphabet().unwrap()))))
    };
    let (fake, sample) = outcome("fake-sturmian")?;
    ensure(fake == ThetaOutcome::Feasible && sample.is_some(), format!("fake-sturmian {fake:?}"))?;
    let (skew, _) = outcome("skew-sturmian")?;
    ensure(skew == ThetaOutcome::Infeasible, format!("skew-sturmian {skew:?}"))?;
    let (split, _) = outcome("skew-sturmian-split")?;
    ensure(split == ThetaOutcome::Feasible, format!("skew-sturmian-split {split:?}"))?;
    let (mon, _) = outcome("mon-fibonacci")?;
    ensure(mon == ThetaOutcome::BoundaryOnly, format!("mon-fibonacci {mon:?}"))?;

    let base = load_example("skew-sturmian").map_err(s)?;
    let hat = load_example("skew-sturmian-split").map_err(s)?;
    let phi = SplittingSpec::from_blocks(&hat.alphabet().map_err(s)?, &base.alphabet().map_err(s)?, &["13".into(), "2".into()])
        .map_err(s)?;
    let verdict = splitting_check(
        &base.language(12).map_err(s)?,
        &base.order_spec().map_err(s)?.ok_or("no base orders")?,
        &hat.language(12).map_err(s)?,
        &hat.order_spec().map_err(s)?.ok_or("no split orders")?,
        &phi,
    )
    .map_err(s)?;
    ensure(verdict == SplitVerdict::Valid, format!("{verdict:?}"))?;
    Ok(format!("fake-sturmian Feasible ({}), skew-sturmian Infeasible, its split Feasible and Valid, mon-fibonacci BoundaryOnly", sample.unwrap()))
}

fn exaf_language() -> Verdict {
    let f = load_example("exaf").map_err(s)?;
    let t = f.map().map_err(s)?.ok_or("no map")?;
    let a = t.alphabet();
    let slopes: Vec<String> = t.order_d().iter().map(|&l| format!("{}:{}", a.char_of(l), t.slope(l))).collect();
    let coded = language_from_iet(&t, 12).map_err(s)?;
    let seq = f.language(12).map_err(s)?;
    ensure(coded == seq, format!("differ: {:?}", coded.first_divergence(&seq)))?;
    Ok(format!("slopes {}; depth-12 languages equal ({} words)", slopes.join(" "), (1..=12).map(|k| coded.level(k).len()).sum::<usize>()))
}

const MATRIX: &[&[&str]] = &[
    &["corpus", "list"],
    &["corpus", "check"],
    &["corpus", "show", "mon-fibonacci"],
    &["language", "--example", "sturmian", "--depth", "10", "--format", "tsv"],
    &["language", "--example", "ttrok-fibonacci", "--format", "json"],
    &["analyze", "--example", "weak-demo", "--format", "json"],
    &["analyze", "--example", "no-order-7words"],
    &["orders", "--example", "no-order-7words"],
    &["orders", "--example", "mon-fibonacci", "--flips", "singletons"],
    &["orders", "--example", "exaf", "--all-flips", "--format", "json"],
    &["rauzy", "--example", "fake-sturmian", "-n", "3", "--format", "dot"],
    &["construct", "--example", "sturmian", "-n", "14", "--format", "json"],
    &["blowup", "--example", "mon-fibonacci", "--format", "json"],
    &["blowup", "--affine", "--example", "skew-sturmian-split"],
    &["blowup", "--affine", "--example", "exaf"],
    &["birkhoff", "--example", "mon-fibonacci", "--format", "json"],
    &["split", "--example", "skew-sturmian-split"],
    &["ttrok", "--example", "sturmian", "-n", "8"],
    &["code", "--example", "sturmian", "--x", "1/3", "--back", "20", "--fwd", "20"],
];

fn determinism() -> Verdict {
    let bin = env!("CARGO_BIN_EXE_iet-lang");
    let run = |args: &[&str]| Command::new(bin).args(args).output().map_err(s);
    for args in MATRIX {
        let first = run(args)?;
        let second = run(args)?;
        ensure(first.status.success(), format!("{args:?} exited with {}", first.status))?;
        ensure(
            first.stdout == second.stdout && first.stderr == second.stderr && first.status == second.status,
            format!("{args:?} differs between runs"),
        )?;
    }
    Ok(format!("{} invocations byte-identical across two runs", MATRIX.len()))
}

fn main() {
    let suite: Vec<(IntervalExchange, FiniteLanguage)> = random_suite()
        .into_iter()
        .map(|t| {
            let lang = language_from_iet(&t, 12).expect("depth 12 language");
            (t, lang)
        })
        .collect();
    type Criterion<'a> = (&'static str, Box<dyn Fn() -> Verdict + 'a>);
    let criteria: Vec<Criterion> = vec![
        ("Sturmian complexity n + 1 up to depth 20", Box::new(sturmian_complexity)),
        ("order condition of random exchanges, no strong bispecials", Box::new(|| order_property(&suite))),
        ("weak bispecials are exactly the connections", Box::new(|| connection_property(&suite))),
        ("Sturmian language rebuilt from its measure", Box::new(sturmian_roundtrip)),
        ("cylinder refinement matches sampled orbits", Box::new(oracle_equivalence)),
        ("unique order class for the Fibonacci blow-up language", Box::new(mon_unique_order)),
        ("seven-word language has no order", Box::new(seven_words)),
        ("Denjoy blow-up: length 4 and wandering coding", Box::new(mon_blowup)),
        ("log-slope feasibility verdicts and splitting", Box::new(birkhoff_verdicts)),
        ("affine four-interval example codes its sequences", Box::new(exaf_language)),
        ("CLI output is deterministic", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
