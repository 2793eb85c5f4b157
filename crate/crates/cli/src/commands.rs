use std::fmt::Write as _;

use ietlang::constructions::{
    affine_blowup, birkhoff_feasibility, default_omega, splitting_check, standard_from_language, theta_search,
    ttrok_language, ConstructionError, Measure, SplitVerdict, SplittingSpec, ThetaVector, DEFAULT_AFFINE_DEPTH,
};
use ietlang::corpus::{list, load_example, Fixture};
use ietlang::exactnum::ExactScalar;
use ietlang::iet::{CodedMap, Coding, LazyBlowupMap};
use ietlang::language::{
    classify_bispecials, complexity_profile, decompose_components, left_special_profile, rauzy_graph,
    recurrence_report, FiniteLanguage, Recurrence,
};
use ietlang::order::{all_flip_sets, check_order_condition, find_connections, search_orders, OrderSpec, OrderVerdict};
use ietlang::par::Execution;
use ietlang::{Alphabet, Letter};
use serde_json::{json, Value};

use crate::input::{parse_scalar, parse_spec, read_json, Resolved};
use crate::{Cli, CliError, Command, CorpusAction, FlipChoice, Format};

type Out = Result<String, CliError>;

pub fn run(cli: &Cli) -> Out {
    match &cli.command {
        Command::Corpus { action } => corpus(cli, action),
        Command::Code { x, back, fwd } => code(cli, x, *back, *fwd),
        Command::Language => language(cli),
        Command::Analyze => analyze(cli),
        Command::Orders { flips, all_flips, expect_none, expect_class } => {
            let flips = if *all_flips { FlipChoice::All } else { *flips };
            orders(cli, flips, *expect_none, expect_class.as_deref())
        }
        Command::Rauzy => rauzy(cli),
        Command::Construct { measure } => construct(cli, measure.as_deref()),
        Command::Blowup { affine, theta, max_orbit_depth, radius } => {
            if *affine {
                affine_cmd(cli, theta.as_deref(), *max_orbit_depth)
            } else {
                denjoy_cmd(cli, *max_orbit_depth, *radius)
            }
        }
        Command::Birkhoff { theta } => birkhoff(cli, theta.as_deref()),
        Command::Split { base, blocks } => split(cli, base.as_deref(), blocks.as_deref()),
        Command::Ttrok { omega } => ttrok(cli, *omega),
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialise");
    s.push('\n');
    s
}

fn unsupported(cmd: &str, f: Format) -> CliError {
    CliError::Input(format!("{cmd} cannot write {f:?} output").to_lowercase())
}

fn word(alphabet: &Alphabet, w: &[Letter]) -> String {
    if w.is_empty() {
        "ε".into()
    } else {
        alphabet.render(w)
    }
}

fn set(alphabet: &Alphabet, s: impl IntoIterator<Item = Letter>) -> String {
    format!("{{{}}}", s.into_iter().map(|l| alphabet.char_of(l).to_string()).collect::<Vec<_>>().join(","))
}

/// Mathematical dead ends are negative results; anything else is bad input.
fn construction_error(e: ConstructionError) -> CliError {
    match e {
        ConstructionError::OrderConditionFails(_)
        | ConstructionError::NonRecurrentInput(_)
        | ConstructionError::DivergentBirkhoffSums(_)
        | ConstructionError::TruncationTooCoarse(_)
        | ConstructionError::NoBispecialChain(_) => {
            CliError::Negative { output: String::new(), reason: e.to_string() }
        }
        other => CliError::Input(other.to_string()),
    }
}

fn depth_or(cli: &Cli, r: &Resolved) -> usize {
    cli.depth.unwrap_or_else(|| r.default_depth())
}

fn corpus(cli: &Cli, action: &CorpusAction) -> Out {
    match action {
        CorpusAction::List => {
            let mut rows = Vec::new();
            for name in list()? {
                let f = load_example(&name)?;
                rows.push((name, f.description));
            }
            Ok(match cli.format {
                Format::Json => {
                    pretty(&Value::Array(rows.iter().map(|(n, d)| json!({"name": n, "description": d})).collect()))
                }
                Format::Text | Format::Tsv => rows.iter().map(|(n, d)| format!("{n}\t{d}\n")).collect(),
                f => return Err(unsupported("corpus list", f)),
            })
        }
        CorpusAction::Show { name } => {
            let f = load_example(name)?;
            Ok(pretty(&serde_json::to_value(&f).map_err(CliError::input)?))
        }
        CorpusAction::Check { names } => {
            let names = if names.is_empty() { list()? } else { names.clone() };
            let mut out = String::new();
            let mut results = Vec::new();
            let mut failed = 0;
            for name in &names {
                let f = load_example(name)?;
                for o in f.check_all() {
                    if !o.passed {
                        failed += 1;
                    }
                    let _ = writeln!(out, "{name:22} {o}");
                    results.push(json!({"example": name, "check": o.check, "passed": o.passed, "detail": o.detail}));
                }
            }
            if cli.format == Format::Json {
                out = pretty(&Value::Array(results));
            }
            if failed > 0 {
                return Err(CliError::Negative { output: out, reason: format!("{failed} expectation(s) failed") });
            }
            Ok(out)
        }
    }
}

fn coding_of(r: &Resolved, x: &ExactScalar, back: usize, fwd: usize) -> Result<(Alphabet, Coding), CliError> {
    if let Some(f) = r.fixture() {
        if f.iet.is_none() {
            if let Some(b) = f.blowup_map()? {
                let c = b.natural_coding(x, back, fwd).map_err(CliError::input)?;
                return Ok((b.coding_alphabet().clone(), c));
            }
        }
    }
    let t = r.map()?;
    let c = t.natural_coding(x, back, fwd).map_err(CliError::input)?;
    Ok((t.alphabet().clone(), c))
}

fn code(cli: &Cli, x: &str, back: usize, fwd: usize) -> Out {
    let r = cli.source.resolve()?;
    let x = parse_scalar(x)?;
    let (alphabet, c) = coding_of(&r, &x, back, fwd)?;
    let letters = &c.window.letters;
    let o = c.window.origin;
    let past = alphabet.render(&letters[..o]);
    let future = alphabet.render(&letters[o..]);
    Ok(match cli.format {
        Format::Json => pretty(&json!({
            "x": x,
            "past": past,
            "future": future,
            "forwardTruncatedAt": c.forward_truncated_at,
            "backwardTruncatedAt": c.backward_truncated_at,
        })),
        Format::Text => {
            let mut s = format!("{past}|{future}\n");
            if let Some(k) = c.backward_truncated_at {
                let _ = writeln!(s, "backward orbit undefined at index {k}");
            }
            if let Some(k) = c.forward_truncated_at {
                let _ = writeln!(s, "forward orbit undefined at index {k}");
            }
            s
        }
        f => return Err(unsupported("code", f)),
    })
}

fn language(cli: &Cli) -> Out {
    let r = cli.source.resolve()?;
    let lang = r.language(depth_or(cli, &r))?;
    let a = lang.alphabet();
    Ok(match cli.format {
        Format::Json => pretty(&serde_json::to_value(lang.to_json()).map_err(CliError::input)?),
        Format::Tsv => complexity_profile(&lang).to_tsv(),
        Format::Text => {
            let mut s = String::new();
            for k in 1..=lang.depth() {
                let words: Vec<String> = lang.level(k).iter().map(|w| a.render(w)).collect();
                let _ = writeln!(s, "{k}\t{}\t{}", words.len(), words.join(" "));
            }
            s
        }
        f => return Err(unsupported("language", f)),
    })
}

fn analyze(cli: &Cli) -> Out {
    let r = cli.source.resolve()?;
    let lang = r.language(depth_or(cli, &r))?;
    let a = lang.alphabet();
    let n = lang.depth();
    let c = complexity_profile(&lang);
    let check_depth = (n / 4).max(1);
    let recurrence = match recurrence_report(&lang, check_depth) {
        Recurrence::RecurrentUpTo(_) => None,
        Recurrence::Violation(w) => Some(word(a, &w)),
    };
    let reports = classify_bispecials(&lang);
    let ls = left_special_profile(&lang);
    let g = (n / 2).max(1);
    let comps = decompose_components(&lang, g);
    match cli.format {
        Format::Json => {
            let bis: Vec<Value> = reports
                .iter()
                .map(|b| {
                    json!({
                        "word": a.render(&b.word),
                        "class": b.classification,
                        "arrivals": a.render(&b.arrivals.iter().copied().collect::<Vec<_>>()),
                        "departures": a.render(&b.departures.iter().copied().collect::<Vec<_>>()),
                        "pairs": b.pairs.iter().map(|(x, y)| a.render(&[*x, *y])).collect::<Vec<_>>(),
                        "witness": b.witness.as_ref().map(|(x, y)| json!({
                            "arrivals": a.render(&x.iter().copied().collect::<Vec<_>>()),
                            "departures": a.render(&y.iter().copied().collect::<Vec<_>>()),
                        })),
                    })
                })
                .collect();
            Ok(pretty(&json!({
                "depth": n,
                "complexity": c,
                "recurrence": {"checkDepth": check_depth, "violation": recurrence},
                "bispecials": bis,
                "leftSpecial": {"counts": ls.counts, "weighted": ls.weighted, "chainsBounded": ls.holds()},
                "components": {"n": g, "kinds": comps.iter().map(|c| c.1).collect::<Vec<_>>()},
            })))
        }
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "depth {n}");
            let _ = writeln!(s, "p = {:?}", c.p);
            let _ = writeln!(s, "s = {:?}", c.s);
            match &recurrence {
                None => {
                    let _ = writeln!(s, "recurrence: every word of length <= {check_depth} returns within depth {n}");
                }
                Some(w) => {
                    let _ = writeln!(s, "recurrence: {w} never returns within depth {n}");
                }
            }
            let _ = writeln!(s, "bispecial words ({}):", reports.len());
            for b in &reports {
                let _ = write!(
                    s,
                    "  {:14} {:?}  A={} D={} pairs={}",
                    word(a, &b.word),
                    b.classification,
                    set(a, b.arrivals.iter().copied()),
                    set(a, b.departures.iter().copied()),
                    b.pairs.len()
                );
                if let Some((x, y)) = &b.witness {
                    let _ = write!(s, "  witness {} x {}", set(a, x.iter().copied()), set(a, y.iter().copied()));
                }
                s.push('\n');
            }
            let _ = writeln!(
                s,
                "left special counts {:?}, weighted {:?}: {}",
                ls.counts,
                ls.weighted,
                if ls.holds() { "chains bounded" } else { "chain count grows" }
            );
            let kinds: Vec<String> = comps.iter().map(|c| format!("{:?}", c.1).to_lowercase()).collect();
            let _ = writeln!(s, "components of G_{g}: {} [{}]", comps.len(), kinds.join(", "));
            Ok(s)
        }
        f => Err(unsupported("analyze", f)),
    }
}

fn flip_sets(choice: FlipChoice, n: usize) -> Result<Vec<std::collections::BTreeSet<Letter>>, CliError> {
    Ok(match choice {
        FlipChoice::None => vec![Default::default()],
        FlipChoice::Singletons => {
            std::iter::once(Default::default()).chain((0..n as Letter).map(|l| [l].into_iter().collect())).collect()
        }
        FlipChoice::All => all_flip_sets(n).map_err(CliError::input)?,
    })
}

fn orders(cli: &Cli, flips: FlipChoice, expect_none: bool, expect_class: Option<&str>) -> Out {
    let r = cli.source.resolve()?;
    let lang = r.language(depth_or(cli, &r))?;
    let a = lang.alphabet().clone();
    if let Some(path) = &cli.orders {
        let spec = r.orders(Some(path))?.expect("file given");
        return check_spec(cli, &lang, &spec);
    }
    let sets = flip_sets(flips, a.len())?;
    let classes = search_orders(&lang, &sets, Execution::default()).map_err(CliError::input)?;
    let out = match cli.format {
        Format::Json => pretty(&json!({
            "depth": lang.depth(),
            "classes": classes.iter().map(|c| c.to_json(&a)).collect::<Vec<_>>(),
        })),
        Format::Text => {
            if classes.is_empty() {
                "no order condition (0 classes)\n".to_string()
            } else {
                let mut s = format!("{} class(es) up to depth {}\n", classes.len(), lang.depth());
                for c in &classes {
                    let _ = writeln!(s, "  {}", c.render(&a));
                }
                s
            }
        }
        f => return Err(unsupported("orders", f)),
    };
    if expect_none && !classes.is_empty() {
        return Err(CliError::Negative { output: out, reason: format!("{} order class(es) found", classes.len()) });
    }
    if let Some(want) = expect_class {
        let want = parse_spec(&a, want)?.canonical();
        if !classes.contains(&want) {
            return Err(CliError::Negative { output: out, reason: format!("{} not found", want.render(&a)) });
        }
    }
    Ok(out)
}

fn check_spec(cli: &Cli, lang: &FiniteLanguage, spec: &OrderSpec) -> Out {
    let a = lang.alphabet();
    let verdict = check_order_condition(lang, spec);
    let conns = find_connections(lang, spec);
    let (holds, detail) = match &verdict {
        OrderVerdict::Holds => (true, None),
        OrderVerdict::Counterexample { w, a: x, b: y, c: u, d: v } => (
            false,
            Some(format!(
                "at {} with arrivals {},{} and departures {},{}",
                word(a, w),
                a.char_of(*x),
                a.char_of(*y),
                a.char_of(*u),
                a.char_of(*v)
            )),
        ),
    };
    let conn_words: Vec<String> = conns
        .witnesses
        .iter()
        .map(|c| format!("{} ({}{} / {}{})", word(a, &c.w), a.char_of(c.a), a.char_of(c.a2), a.char_of(c.b), a.char_of(c.b2)))
        .collect();
    let out = match cli.format {
        Format::Json => pretty(&json!({
            "spec": spec.to_json(a),
            "holds": holds,
            "counterexample": detail,
            "connections": conn_words,
        })),
        Format::Text => {
            let mut s = format!("{}: ", spec.render(a));
            match &detail {
                None => s.push_str(&format!("holds up to depth {}\n", lang.depth())),
                Some(d) => s.push_str(&format!("fails {d}\n")),
            }
            if holds {
                let _ = writeln!(s, "connections: {}", if conn_words.is_empty() { "none".into() } else { conn_words.join(", ") });
            }
            s
        }
        f => return Err(unsupported("orders", f)),
    };
    if !holds {
        return Err(CliError::Negative { output: out, reason: "order condition fails".into() });
    }
    Ok(out)
}

fn rauzy(cli: &Cli) -> Out {
    let r = cli.source.resolve()?;
    let n = cli.depth.unwrap_or(3);
    if n == 0 {
        return Err(CliError::Input("Rauzy graphs need n >= 1".into()));
    }
    let lang = r.language(n + 1)?;
    let a = lang.alphabet();
    let g = rauzy_graph(&lang, n);
    Ok(match cli.format {
        Format::Dot => g.to_dot(a),
        Format::Json => pretty(&json!({
            "n": n,
            "vertices": g.vertices.iter().map(|v| a.render(v)).collect::<Vec<_>>(),
            "edges": g.edge_words.iter().map(|e| a.render(e)).collect::<Vec<_>>(),
            "component": g.component,
        })),
        Format::Text => {
            let mut s = format!("G_{n}: {} vertices, {} edges, {} component(s)\n", g.vertices.len(), g.edges.len(), g.component_count);
            for (i, (from, to)) in g.edges.iter().enumerate() {
                let _ = writeln!(s, "  {} -> {}  [{}]", a.render(&g.vertices[*from]), a.render(&g.vertices[*to]), a.render(&g.edge_words[i]));
            }
            s
        }
        Format::Tsv => {
            let mut s = String::from("from\tto\tword\n");
            for (i, (from, to)) in g.edges.iter().enumerate() {
                let _ = writeln!(s, "{}\t{}\t{}", a.render(&g.vertices[*from]), a.render(&g.vertices[*to]), a.render(&g.edge_words[i]));
            }
            s
        }
    })
}

/// The single class found by an unflipped search, when there is exactly one.
fn unique_class(lang: &FiniteLanguage) -> Result<OrderSpec, CliError> {
    let classes = search_orders(lang, &[Default::default()], Execution::default()).map_err(CliError::input)?;
    match classes.as_slice() {
        [one] => Ok(one.clone()),
        _ => Err(CliError::Input(format!("{} unflipped order classes; pass --orders", classes.len()))),
    }
}

fn construct(cli: &Cli, measure: Option<&std::path::Path>) -> Out {
    let r = cli.source.resolve()?;
    let lang = r.language(depth_or(cli, &r))?;
    let a = lang.alphabet().clone();
    let spec = match r.orders(cli.orders.as_deref())? {
        Some(s) => s,
        None => unique_class(&lang)?,
    };
    let mu = match measure {
        Some(path) => {
            let w: Vec<ExactScalar> = read_json(path)?;
            Measure::new(w).map_err(CliError::input)?
        }
        None => default_measure(&r, &a)?,
    };
    let (t, report) = standard_from_language(&lang, &spec, &mu).map_err(construction_error)?;
    Ok(match cli.format {
        Format::Json => pretty(&json!({"iet": t.to_json(), "verification": report})),
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "orders {}", spec.render(&a));
            for l in a.letters() {
                let _ = writeln!(s, "  |I_{}| = {}", a.char_of(l), t.lengths()[l as usize]);
            }
            match &report.first_divergence {
                None => {
                    let _ = writeln!(s, "language reproduced up to depth {}", report.depth);
                }
                Some((k, w)) => {
                    let _ = writeln!(s, "languages agree up to length {}, first difference at {k}: {w}", report.agreement_depth);
                }
            }
            s
        }
        f => return Err(unsupported("construct", f)),
    })
}

fn default_measure(r: &Resolved, a: &Alphabet) -> Result<Measure, CliError> {
    if let Ok(t) = r.map() {
        return Measure::new(t.lengths().to_vec()).map_err(CliError::input);
    }
    let window = match r.fixture() {
        Some(f) => f.windows(ietlang::constructions::DEFAULT_MIN_WINDOW / 8)?.into_iter().max_by_key(|w| w.len()),
        None => match r {
            Resolved::Windows { windows, .. } => windows.iter().max_by_key(|w| w.len()).cloned(),
            _ => None,
        },
    };
    let window = window.ok_or_else(|| CliError::Input("no window to estimate a measure from; pass --measure".into()))?;
    ietlang::constructions::estimate_measure(a, &window, ietlang::constructions::DEFAULT_MIN_WINDOW)
        .map_err(CliError::input)
}

fn fixture_of<'a>(r: &'a Resolved, what: &str) -> Result<&'a Fixture, CliError> {
    r.fixture().ok_or_else(|| CliError::Input(format!("{what} needs --example or a --windows file with sequences")))
}

fn denjoy_cmd(cli: &Cli, max_orbit_depth: Option<usize>, radius: i64) -> Out {
    let r = cli.source.resolve()?;
    let f = fixture_of(&r, "blowup")?;
    let mut f = f.clone();
    let b = f.blowup.as_mut().ok_or_else(|| CliError::Input(format!("example {} has no blow-up; try --affine", f.name)))?;
    if let Some(d) = max_orbit_depth {
        b.max_orbit_depth = d;
    }
    let map: LazyBlowupMap = f.blowup_map()?.expect("blow-up present");
    let a = map.alphabet().clone();
    let radius = radius.min(map.max_orbit_depth() as i64);
    let mut orbits = Vec::new();
    for o in 0..map.orbits().len() {
        let mut rows = Vec::new();
        for m in -radius..=radius {
            if let Some((lo, hi)) = map.blown_interval(o, m) {
                rows.push((m, lo, hi));
            }
        }
        orbits.push(rows);
    }
    Ok(match cli.format {
        Format::Json => pretty(&json!({
            "baseTotal": map.base().total(),
            "total": map.total(),
            "closedFormTotal": map.closed_form_total(),
            "maxOrbitDepth": map.max_orbit_depth(),
            "alphabet": a.names(),
            "orbits": orbits.iter().map(|rows| rows.iter().map(|(m, lo, hi)| json!({"m": m, "lo": lo, "hi": hi})).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })),
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "base length {}", map.base().total());
            let _ = writeln!(s, "blown-up length {} (orbits kept to depth {})", map.total(), map.max_orbit_depth());
            let _ = writeln!(s, "closed-form length {}", map.closed_form_total());
            for (o, rows) in orbits.iter().enumerate() {
                let _ = writeln!(s, "orbit {o}:");
                for (m, lo, hi) in rows {
                    let _ = writeln!(s, "  J_{m:<3} = ({lo}, {hi})  ~ ({:.6}, {:.6})", lo.to_f64(), hi.to_f64());
                }
            }
            s
        }
        f => return Err(unsupported("blowup", f)),
    })
}

fn theta_for(r: &Resolved, f: &Fixture, file: Option<&std::path::Path>) -> Result<ThetaVector, CliError> {
    let n = r.alphabet()?.len();
    match file {
        Some(path) => {
            let t: Vec<ExactScalar> = read_json(path)?;
            if t.len() != n {
                return Err(CliError::Input(format!("{} log-slopes for {n} letters", t.len())));
            }
            Ok(ThetaVector(t))
        }
        None => {
            let search = theta_search(&f.sequence_seqs()?, n);
            search.sample.ok_or_else(|| CliError::Negative {
                output: String::new(),
                reason: format!("no admissible log-slopes ({:?})", search.outcome),
            })
        }
    }
}

fn affine_cmd(cli: &Cli, theta: Option<&std::path::Path>, depth: Option<usize>) -> Out {
    let r = cli.source.resolve()?;
    let f = fixture_of(&r, "blowup --affine")?;
    let a = f.alphabet()?;
    let seqs = f.sequence_seqs()?;
    let z = seqs.first().ok_or_else(|| CliError::Input("no sequence to blow up".into()))?;
    let spec = match r.orders(cli.orders.as_deref())? {
        Some(s) => s,
        None => unique_class(&r.language(depth_or(cli, &r))?)?,
    };
    let theta = theta_for(&r, f, theta)?;
    let periodic = f.periodic.iter().map(|p| a.parse(p)).collect::<Result<Vec<_>, _>>().map_err(CliError::input)?;
    let b = affine_blowup(&a, &spec, &theta, z, &periodic, depth.unwrap_or(DEFAULT_AFFINE_DEPTH))
        .map_err(construction_error)?;
    let groups: Vec<String> = b.scheme.groups().iter().map(|g| b.iet.alphabet().render(g)).collect();
    Ok(match cli.format {
        Format::Json => pretty(&json!({
            "theta": theta,
            "thetaScale": b.theta_scale.to_string(),
            "iet": b.iet.to_json(),
            "groups": groups,
            "summary": b.summary(),
            "truncationError": b.truncation_error,
            "birkhoff": b.birkhoff,
        })),
        Format::Text => {
            let t = &b.iet;
            let ta = t.alphabet();
            let mut s = format!("theta {} (scaled by {})\n", theta.render(&a), b.theta_scale);
            for &l in t.order_d() {
                let (lo, hi) = t.interval(l);
                let (ilo, ihi) = t.image_interval(l);
                let _ = writeln!(s, "  {}: ({lo}, {hi}) -> ({ilo}, {ihi}), slope {}", ta.char_of(l), t.slope(l));
            }
            let sum = b.summary();
            let _ = writeln!(s, "{} pieces, total length {}, coding {}", sum.pieces, sum.total, if sum.natural { "natural" } else { "grouped" });
            if !sum.natural {
                let _ = writeln!(s, "groups: {}", groups.join(" "));
            }
            s
        }
        f => return Err(unsupported("blowup", f)),
    })
}

fn birkhoff(cli: &Cli, theta: Option<&std::path::Path>) -> Out {
    let r = cli.source.resolve()?;
    let f = fixture_of(&r, "birkhoff")?;
    let a = f.alphabet()?;
    let seqs = f.sequence_seqs()?;
    if seqs.is_empty() {
        return Err(CliError::Input(format!("{} has no two-sided sequences", f.name)));
    }
    if theta.is_some() {
        let th = theta_for(&r, f, theta)?;
        let reports = seqs.iter().map(|z| birkhoff_feasibility(z, &th)).collect::<Result<Vec<_>, _>>().map_err(construction_error)?;
        return Ok(match cli.format {
            Format::Json => pretty(&json!({"theta": th, "reports": reports})),
            Format::Text => {
                let mut s = format!("theta {}\n", th.render(&a));
                for (i, rep) in reports.iter().enumerate() {
                    let _ = writeln!(
                        s,
                        "sequence {i}: right {:?} (rate {}), left {:?} (rate {})",
                        rep.right.verdict, rep.right.rate, rep.left.verdict, rep.left.rate
                    );
                }
                s
            }
            f => return Err(unsupported("birkhoff", f)),
        });
    }
    let search = theta_search(&seqs, a.len());
    Ok(match cli.format {
        Format::Json => pretty(&serde_json::to_value(&search).map_err(CliError::input)?),
        Format::Text => {
            let mut s = format!("{:?}\n", search.outcome);
            for c in &search.system {
                let _ = writeln!(s, "  {}", c.render(&a));
            }
            if let Some(t) = &search.sample {
                let _ = writeln!(s, "sample theta {}", t.render(&a));
            }
            s
        }
        f => return Err(unsupported("birkhoff", f)),
    })
}

fn split(cli: &Cli, base: Option<&str>, blocks: Option<&str>) -> Out {
    let r = cli.source.resolve()?;
    let f = r.fixture();
    let base_name = base
        .map(str::to_string)
        .or_else(|| f.and_then(|f| f.splitting.as_ref()).map(|s| s.base.clone()))
        .ok_or_else(|| CliError::Input("pass --base".into()))?;
    let blocks: Vec<String> = match blocks {
        Some(b) => b.split(',').map(|s| s.trim().to_string()).collect(),
        None => f
            .and_then(|f| f.splitting.as_ref())
            .map(|s| s.blocks.clone())
            .ok_or_else(|| CliError::Input("pass --blocks".into()))?,
    };
    let base = load_example(&base_name)?;
    let n = depth_or(cli, &r);
    let hat = r.language(n)?;
    let hat_spec = r.orders(cli.orders.as_deref())?.ok_or_else(|| CliError::Input("pass --orders for the refined language".into()))?;
    let base_spec = base.order_spec()?.ok_or_else(|| CliError::Input(format!("{base_name} has no orders")))?;
    let phi = SplittingSpec::from_blocks(hat.alphabet(), &base.alphabet()?, &blocks).map_err(CliError::input)?;
    let verdict = splitting_check(&base.language(n)?, &base_spec, &hat, &hat_spec, &phi).map_err(construction_error)?;
    let out = match cli.format {
        Format::Json => pretty(&json!({"base": base_name, "blocks": blocks, "depth": n, "verdict": verdict})),
        Format::Text => match &verdict {
            SplitVerdict::Valid => format!("valid splitting of {base_name} through [{}] up to depth {n}\n", blocks.join(", ")),
            SplitVerdict::Violation { bullet, witness } => {
                format!("not a splitting of {base_name}: requirement {bullet} fails at {witness}\n")
            }
        },
        f => return Err(unsupported("split", f)),
    };
    if let SplitVerdict::Violation { bullet, .. } = verdict {
        return Err(CliError::Negative { output: out, reason: format!("splitting requirement {bullet} fails") });
    }
    Ok(out)
}

fn ttrok(cli: &Cli, omega: Option<char>) -> Out {
    let r = cli.source.resolve()?;
    let n = depth_or(cli, &r);
    let lprime = r.language(2 * n + 2)?;
    let omega = omega.unwrap_or_else(|| default_omega(lprime.alphabet()));
    let t = ttrok_language(&lprime, n, omega).map_err(construction_error)?;
    let a = t.language.alphabet().clone();
    Ok(match cli.format {
        Format::Json => pretty(&json!({"construction": t, "language": t.language.to_json()})),
        Format::Tsv => complexity_profile(&t.language).to_tsv(),
        Format::Text => {
            let mut s = format!("chain: {}\n", t.chain.iter().map(|w| if w.is_empty() { "ε" } else { w.as_str() }).collect::<Vec<_>>().join(" < "));
            let _ = writeln!(s, "window: {}", t.window);
            for k in 1..=t.language.depth() {
                let words: Vec<String> = t.language.level(k).iter().map(|w| a.render(w)).collect();
                let _ = writeln!(s, "{k}\t{}\t{}", words.len(), words.join(" "));
            }
            s
        }
        f => return Err(unsupported("ttrok", f)),
    })
}
