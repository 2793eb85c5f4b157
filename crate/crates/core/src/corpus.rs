//! Named example languages with the analysis results they are known to have.
//!
//! Fixtures are JSON files embedded at build time from `corpus/`. Setting
//! `IETLANG_CORPUS_DIR` makes [`load_example`] and [`list`] read that
//! directory instead, which is handy when editing fixtures without rebuilding.

use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::alphabet::{Alphabet, Word};
use crate::constructions::{
    denjoy_blowup, splitting_check, theta_search, ttrok_language, BlowupOrbitJson, SplitVerdict,
    SplittingSpec, ThetaOutcome,
};
use crate::exactnum::ExactScalar;
use crate::iet::{grouped_coding_map, Direction, IetJson, IntervalExchange, LazyBlowupMap, Step};
use crate::iet::blowup::DEFAULT_MAX_ORBIT_DEPTH;
use crate::language::{
    bispecial_report, classify_bispecials, complexity_profile, decompose_components, language_from_iet,
    language_from_sequences, rauzy_graph, recurrence_report, Classification, ComponentKind, FiniteLanguage,
    Recurrence,
};
use crate::order::{all_flip_sets, check_order_condition, search_orders, OrderSpec, OrderSpecJson, OrderVerdict};
use crate::par::Execution;
use crate::sequence::{TwoSidedJson, TwoSidedSeq};

pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable naming a directory of fixtures to use instead of the embedded ones.
pub const CORPUS_DIR_VAR: &str = "IETLANG_CORPUS_DIR";

const EMBEDDED: &[(&str, &str)] = &[
    ("exaf", include_str!("../corpus/exaf.json")),
    ("fake-sturmian", include_str!("../corpus/fake-sturmian.json")),
    ("mon-fibonacci", include_str!("../corpus/mon-fibonacci.json")),
    ("no-order-7words", include_str!("../corpus/no-order-7words.json")),
    ("skew-sturmian", include_str!("../corpus/skew-sturmian.json")),
    ("skew-sturmian-split", include_str!("../corpus/skew-sturmian-split.json")),
    ("sturmian", include_str!("../corpus/sturmian.json")),
    ("ttrok-fibonacci", include_str!("../corpus/ttrok-fibonacci.json")),
    ("two-loops", include_str!("../corpus/two-loops.json")),
    ("weak-demo", include_str!("../corpus/weak-demo.json")),
];

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("unknown example {0:?}")]
    UnknownExample(String),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("fixture {name}: {message}")]
    Parse { name: String, message: String },
    #[error("fixture {name} has schema {found}, expected {expected}")]
    Schema { name: String, found: u32, expected: u32 },
    #[error("fixture {name}: {message}")]
    Invalid { name: String, message: String },
}

/// Where an expected value comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// Stated in the literature for this example.
    Literature,
    /// Computed once by an independent method and frozen.
    Derived,
    /// Immediate from the definition of the example.
    Definitional,
}

/// Which flip sets an order search ranges over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FlipScope {
    Unflipped,
    Singletons,
    All,
}

impl FlipScope {
    pub fn flip_sets(self, n: usize) -> Result<Vec<BTreeSet<u8>>, crate::order::OrderError> {
        match self {
            FlipScope::Unflipped => Ok(vec![BTreeSet::new()]),
            FlipScope::Singletons => {
                Ok(std::iter::once(BTreeSet::new()).chain((0..n as u8).map(|l| BTreeSet::from([l]))).collect())
            }
            FlipScope::All => all_flip_sets(n),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "camelCase")]
pub enum Check {
    /// `p(1), ..., p(depth)`.
    Complexity { depth: usize, p: Vec<usize> },
    OrderClasses { depth: usize, flips: FlipScope, classes: Vec<OrderSpecJson> },
    /// First word of length at most `checkDepth` that never returns, or none.
    Recurrence {
        depth: usize,
        #[serde(rename = "checkDepth")]
        check_depth: usize,
        violation: Option<String>,
    },
    Classification { depth: usize, word: String, class: Classification, witness: bool },
    /// The weak bispecial words, shortest first.
    WeakWords { depth: usize, words: Vec<String> },
    ThetaSearch {
        outcome: ThetaOutcome,
        #[serde(default)]
        sample: Option<Vec<ExactScalar>>,
    },
    /// Closed-form total length of the blown-up map.
    BlowupTotal { depth: usize, total: ExactScalar },
    /// Each blown-up interval `J_m`, `|m| < radius`, is mapped affinely onto `J_(m+1)`.
    BlowupWandering { depth: usize, radius: i64 },
    /// The blown-up map codes the fixture's language.
    BlowupLanguage { depth: usize },
    /// This fixture's language splits the fixture named in `splitting`.
    Splitting { depth: usize, verdict: SplitVerdict },
    /// The fixture's map codes the language of its sequences.
    LanguageMatchesIet { depth: usize },
    /// Coding the fixture's map by the blocks of `splitting` gives the base fixture's language.
    GroupedCodingMatches { depth: usize },
    SameLanguageAs { depth: usize, fixture: String },
    OrderHolds { depth: usize },
    RauzyComponents { depth: usize, n: usize, periodic: usize, aperiodic: usize },
    RauzyVertices { depth: usize, n: usize, vertices: usize },
}

impl Check {
    pub fn kind(&self) -> &'static str {
        match self {
            Check::Complexity { .. } => "complexity",
            Check::OrderClasses { .. } => "orderClasses",
            Check::Recurrence { .. } => "recurrence",
            Check::Classification { .. } => "classification",
            Check::WeakWords { .. } => "weakWords",
            Check::ThetaSearch { .. } => "thetaSearch",
            Check::BlowupTotal { .. } => "blowupTotal",
            Check::BlowupWandering { .. } => "blowupWandering",
            Check::BlowupLanguage { .. } => "blowupLanguage",
            Check::Splitting { .. } => "splitting",
            Check::LanguageMatchesIet { .. } => "languageMatchesIet",
            Check::GroupedCodingMatches { .. } => "groupedCodingMatches",
            Check::SameLanguageAs { .. } => "sameLanguageAs",
            Check::OrderHolds { .. } => "orderHolds",
            Check::RauzyComponents { .. } => "rauzyComponents",
            Check::RauzyVertices { .. } => "rauzyVertices",
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Expectation {
    #[serde(flatten)]
    pub check: Check,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BlowupJson {
    pub base: IetJson,
    pub orbits: Vec<BlowupOrbitJson>,
    #[serde(default = "default_orbit_depth")]
    pub max_orbit_depth: usize,
}

fn default_orbit_depth() -> usize {
    DEFAULT_MAX_ORBIT_DEPTH
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SplittingJson {
    /// Name of the fixture being split.
    pub base: String,
    /// `blocks[i]` lists the letters sent to the i-th letter of the base.
    pub blocks: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TtrokJson {
    pub base: String,
    pub omega: char,
}

/// One example: an alphabet, a way to produce its language, and expectations.
///
/// The language comes from the first available source among `words`,
/// `sequences` (with `periodic`), `ttrok`, `iet` and `blowup`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Fixture {
    pub schema: u32,
    pub name: String,
    pub description: String,
    pub alphabet: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub words: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sequences: Vec<TwoSidedJson>,
    /// Purely periodic orbits, each given by one period.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub periodic: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iet: Option<IetJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orders: Option<OrderSpecJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blowup: Option<BlowupJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub splitting: Option<SplittingJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ttrok: Option<TtrokJson>,
    /// Default depth for the `language` and `show` commands.
    pub depth: usize,
    pub expected: Vec<Expectation>,
}

/// Result of one expectation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub check: String,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "ok" } else { "FAILED" };
        write!(f, "{tag:6} {:22} {}", self.check, self.detail)
    }
}

fn corpus_dir() -> Option<PathBuf> {
    std::env::var_os(CORPUS_DIR_VAR).filter(|v| !v.is_empty()).map(PathBuf::from)
}

/// Names of the available fixtures, sorted.
pub fn list() -> Result<Vec<String>, CorpusError> {
    match corpus_dir() {
        None => Ok(EMBEDDED.iter().map(|(n, _)| n.to_string()).collect()),
        Some(dir) => {
            let io = |e: std::io::Error| CorpusError::Io { path: dir.display().to_string(), message: e.to_string() };
            let mut names = Vec::new();
            for entry in std::fs::read_dir(&dir).map_err(io)? {
                let path = entry.map_err(io)?.path();
                if path.extension().is_some_and(|e| e == "json") {
                    if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                        names.push(stem.to_string());
                    }
                }
            }
            names.sort();
            Ok(names)
        }
    }
}

/// Load and validate the fixture called `name`.
pub fn load_example(name: &str) -> Result<Fixture, CorpusError> {
    let text = match corpus_dir() {
        None => EMBEDDED
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, t)| t.to_string())
            .ok_or_else(|| CorpusError::UnknownExample(name.to_string()))?,
        Some(dir) => {
            if name.contains(['/', '\\']) || name.starts_with('.') {
                return Err(CorpusError::UnknownExample(name.to_string()));
            }
            let path = dir.join(format!("{name}.json"));
            if !path.is_file() {
                return Err(CorpusError::UnknownExample(name.to_string()));
            }
            std::fs::read_to_string(&path)
                .map_err(|e| CorpusError::Io { path: path.display().to_string(), message: e.to_string() })?
        }
    };
    parse_fixture(name, &text)
}

/// Parse fixture text; `name` must match the fixture's own `name` field.
pub fn parse_fixture(name: &str, text: &str) -> Result<Fixture, CorpusError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| CorpusError::Parse { name: name.into(), message: e.to_string() })?;
    let schema = value.get("schema").and_then(|s| s.as_u64()).unwrap_or(0) as u32;
    if schema != SCHEMA_VERSION {
        return Err(CorpusError::Schema { name: name.into(), found: schema, expected: SCHEMA_VERSION });
    }
    let fixture: Fixture =
        serde_json::from_value(value).map_err(|e| CorpusError::Parse { name: name.into(), message: e.to_string() })?;
    if fixture.name != name {
        return Err(fixture.invalid(format!("file is named {name:?} but declares {:?}", fixture.name)));
    }
    fixture.validate()?;
    Ok(fixture)
}

/// Generous window radius: long enough for every factor of length `n` of
/// the tails used in the corpus to appear away from the window edges.
fn window_radius(n: usize) -> i64 {
    (8 * n + 64) as i64
}

impl Fixture {
    fn invalid(&self, message: impl Into<String>) -> CorpusError {
        CorpusError::Invalid { name: self.name.clone(), message: message.into() }
    }

    fn err<E: fmt::Display>(&self) -> impl Fn(E) -> CorpusError + '_ {
        move |e| self.invalid(e.to_string())
    }

    fn validate(&self) -> Result<(), CorpusError> {
        let alphabet = self.alphabet()?;
        let has_source = !self.words.is_empty()
            || !self.sequences.is_empty()
            || !self.periodic.is_empty()
            || self.ttrok.is_some()
            || self.iet.is_some()
            || self.blowup.is_some();
        if !has_source {
            return Err(self.invalid("no words, sequences, map or construction to take the language from"));
        }
        if self.depth == 0 {
            return Err(self.invalid("depth must be positive"));
        }
        if let Some(iet) = &self.iet {
            if iet.alphabet != self.alphabet {
                return Err(self.invalid("map alphabet differs from the fixture alphabet"));
            }
        }
        self.sequence_seqs()?;
        self.order_spec()?;
        for w in self.words.iter().chain(&self.periodic) {
            alphabet.parse(w).map_err(self.err())?;
        }
        Ok(())
    }

    pub fn alphabet(&self) -> Result<Alphabet, CorpusError> {
        Alphabet::from_names(&self.alphabet).map_err(self.err())
    }

    pub fn order_spec(&self) -> Result<Option<OrderSpec>, CorpusError> {
        let alphabet = self.alphabet()?;
        self.orders.as_ref().map(|o| o.resolve(&alphabet)).transpose().map_err(self.err())
    }

    fn require_orders(&self) -> Result<OrderSpec, CorpusError> {
        self.order_spec()?.ok_or_else(|| self.invalid("no orders given"))
    }

    pub fn sequence_seqs(&self) -> Result<Vec<TwoSidedSeq>, CorpusError> {
        let alphabet = self.alphabet()?;
        self.sequences.iter().map(|s| s.resolve(&alphabet)).collect::<Result<_, _>>().map_err(self.err())
    }

    pub fn map(&self) -> Result<Option<IntervalExchange>, CorpusError> {
        self.iet.as_ref().map(|j| j.build()).transpose().map_err(self.err())
    }

    pub fn blowup_map(&self) -> Result<Option<LazyBlowupMap>, CorpusError> {
        let Some(b) = &self.blowup else { return Ok(None) };
        let alphabet = self.alphabet()?;
        let base = b.base.build().map_err(self.err())?;
        let orbits = b.orbits.iter().map(|o| o.resolve(&alphabet)).collect::<Result<Vec<_>, _>>().map_err(self.err())?;
        let orders = self.require_orders()?;
        denjoy_blowup(&base, &alphabet, &orders, orbits, b.max_orbit_depth).map(Some).map_err(self.err())
    }

    /// Windows reading every factor of length `<= n` of the sequences and periodic orbits.
    pub fn windows(&self, n: usize) -> Result<Vec<Word>, CorpusError> {
        let alphabet = self.alphabet()?;
        let r = window_radius(n);
        let mut out: Vec<Word> =
            self.sequence_seqs()?.iter().map(|z| z.window_between(-r, z.middle.len() as i64 + r, 0).letters).collect();
        for p in &self.periodic {
            let w = alphabet.parse(p).map_err(self.err())?;
            let need = 2 * r as usize;
            out.push(w.iter().copied().cycle().take(need.div_ceil(w.len()) * w.len()).collect());
        }
        Ok(out)
    }

    /// The fixture's language up to length `n`, from its primary source.
    pub fn language(&self, n: usize) -> Result<FiniteLanguage, CorpusError> {
        if let Some(lang) = self.described_language(n)? {
            return Ok(lang);
        }
        if let Some(t) = self.map()? {
            return language_from_iet(&t, n).map_err(self.err());
        }
        if let Some(b) = self.blowup_map()? {
            return language_from_iet(&b, n).map_err(self.err());
        }
        Err(self.invalid("no language source"))
    }

    /// The language as described combinatorially, ignoring any map.
    fn described_language(&self, n: usize) -> Result<Option<FiniteLanguage>, CorpusError> {
        let alphabet = self.alphabet()?;
        if !self.words.is_empty() {
            let words = self.words.iter().map(|w| alphabet.parse(w)).collect::<Result<Vec<_>, _>>().map_err(self.err())?;
            return Ok(Some(FiniteLanguage::from_words(alphabet, &words, n)));
        }
        if !self.sequences.is_empty() || !self.periodic.is_empty() {
            let windows = self.windows(n)?;
            return language_from_sequences(&alphabet, &windows, n, n).map(Some).map_err(self.err());
        }
        if let Some(t) = &self.ttrok {
            let base = load_example(&t.base)?;
            let lprime = base.language(2 * n + 2)?;
            let built = ttrok_language(&lprime, n, t.omega).map_err(self.err())?;
            if built.language.alphabet().chars() != alphabet.chars() {
                return Err(self.invalid("construction alphabet differs from the fixture alphabet"));
            }
            return Ok(Some(built.language));
        }
        Ok(None)
    }

    /// Evaluate every expectation.
    pub fn check_all(&self) -> Vec<CheckOutcome> {
        self.expected
            .iter()
            .map(|e| {
                self.verify(e).unwrap_or_else(|err| CheckOutcome {
                    check: e.check.kind().to_string(),
                    passed: false,
                    detail: format!("error: {err}"),
                })
            })
            .collect()
    }

    pub fn verify(&self, e: &Expectation) -> Result<CheckOutcome, CorpusError> {
        let alphabet = self.alphabet()?;
        let outcome = |passed: bool, detail: String| CheckOutcome { check: e.check.kind().to_string(), passed, detail };
        let render = |w: &[u8]| alphabet.render(w);
        Ok(match &e.check {
            Check::Complexity { depth, p } => {
                let got = complexity_profile(&self.language(*depth)?).p;
                outcome(&got == p, format!("p = {got:?}"))
            }
            Check::OrderClasses { depth, flips, classes } => {
                let lang = self.language(*depth)?;
                let sets = flips.flip_sets(alphabet.len()).map_err(self.err())?;
                let found = search_orders(&lang, &sets, Execution::default()).map_err(self.err())?;
                let want: BTreeSet<(Vec<u8>, Vec<u8>, Vec<u8>)> = classes
                    .iter()
                    .map(|c| c.resolve(&alphabet).map(|s| key(&s.canonical())))
                    .collect::<Result<_, _>>()
                    .map_err(self.err())?;
                let got: BTreeSet<_> = found.iter().map(key).collect();
                let shown: Vec<String> = found.iter().map(|s| s.render(&alphabet)).collect();
                outcome(got == want, format!("{} classes [{}]", found.len(), shown.join("; ")))
            }
            Check::Recurrence { depth, check_depth, violation } => {
                let got = match recurrence_report(&self.language(*depth)?, *check_depth) {
                    Recurrence::RecurrentUpTo(_) => None,
                    Recurrence::Violation(w) => Some(render(&w)),
                };
                let detail = match &got {
                    None => format!("recurrent up to length {check_depth}"),
                    Some(w) => format!("{w:?} never returns"),
                };
                outcome(&got == violation, detail)
            }
            Check::Classification { depth, word, class, witness } => {
                let lang = self.language(*depth)?;
                let w = alphabet.parse(word).map_err(self.err())?;
                let r = bispecial_report(&lang, &w);
                outcome(
                    r.classification == *class && r.witness.is_some() == *witness,
                    format!("{word:?} is {:?}, witness {}", r.classification, r.witness.is_some()),
                )
            }
            Check::WeakWords { depth, words } => {
                let got: Vec<String> = classify_bispecials(&self.language(*depth)?)
                    .into_iter()
                    .filter(|r| r.classification == Classification::Weak)
                    .map(|r| render(&r.word))
                    .collect();
                outcome(&got == words, format!("weak: {got:?}"))
            }
            Check::ThetaSearch { outcome: want, sample } => {
                let seqs = self.sequence_seqs()?;
                let got = theta_search(&seqs, alphabet.len());
                let sample_ok = match (sample, &got.sample) {
                    (None, _) => true,
                    (Some(s), Some(g)) => *s == g.0,
                    (Some(_), None) => false,
                };
                let shown = got.sample.as_ref().map(|s| s.render(&alphabet)).unwrap_or_else(|| "none".into());
                outcome(got.outcome == *want && sample_ok, format!("{:?}, sample {shown}", got.outcome))
            }
            Check::BlowupTotal { depth, total } => {
                let b = self.blowup_with_depth(*depth)?;
                let got = b.closed_form_total();
                outcome(&got == total, format!("total {got}"))
            }
            Check::BlowupWandering { depth, radius } => {
                let b = self.blowup_with_depth(*depth)?;
                match wandering_failure(&b, *radius) {
                    None => outcome(true, format!("J_m -> J_(m+1) for |m| < {radius}")),
                    Some(msg) => outcome(false, msg),
                }
            }
            Check::BlowupLanguage { depth } => {
                let b = self.blowup_map()?.ok_or_else(|| self.invalid("no blow-up given"))?;
                let got = language_from_iet(&b, *depth).map_err(self.err())?;
                self.compare(&alphabet, &got, &self.language(*depth)?, outcome)?
            }
            Check::Splitting { depth, verdict } => {
                let s = self.splitting.as_ref().ok_or_else(|| self.invalid("no splitting given"))?;
                let base = load_example(&s.base)?;
                let base_alphabet = base.alphabet()?;
                let split = SplittingSpec::from_blocks(&alphabet, &base_alphabet, &s.blocks).map_err(self.err())?;
                let got = splitting_check(
                    &base.language(*depth)?,
                    &base.require_orders()?,
                    &self.language(*depth)?,
                    &self.require_orders()?,
                    &split,
                )
                .map_err(self.err())?;
                outcome(&got == verdict, format!("{got:?}"))
            }
            Check::LanguageMatchesIet { depth } => {
                let t = self.map()?.ok_or_else(|| self.invalid("no map given"))?;
                let want = self.described_language(*depth)?.ok_or_else(|| self.invalid("no sequences or words"))?;
                let got = language_from_iet(&t, *depth).map_err(self.err())?;
                self.compare(&alphabet, &got, &want, outcome)?
            }
            Check::GroupedCodingMatches { depth } => {
                let s = self.splitting.as_ref().ok_or_else(|| self.invalid("no splitting given"))?;
                let t = self.map()?.ok_or_else(|| self.invalid("no map given"))?;
                let base = load_example(&s.base)?;
                let base_alphabet = base.alphabet()?;
                let groups = s
                    .blocks
                    .iter()
                    .map(|b| alphabet.parse(b))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(self.err())?;
                let scheme = grouped_coding_map(&t, base_alphabet.clone(), groups).map_err(self.err())?;
                let got = language_from_iet(&scheme, *depth).map_err(self.err())?;
                self.compare(&base_alphabet, &got, &base.language(*depth)?, outcome)?
            }
            Check::SameLanguageAs { depth, fixture } => {
                let other = load_example(fixture)?;
                self.compare(&alphabet, &self.language(*depth)?, &other.language(*depth)?, outcome)?
            }
            Check::OrderHolds { depth } => {
                let spec = self.require_orders()?;
                match check_order_condition(&self.language(*depth)?, &spec) {
                    OrderVerdict::Holds => outcome(true, format!("{} holds", spec.render(&alphabet))),
                    OrderVerdict::Counterexample { w, .. } => {
                        outcome(false, format!("{} fails at {:?}", spec.render(&alphabet), render(&w)))
                    }
                }
            }
            Check::RauzyComponents { depth, n, periodic, aperiodic } => {
                let comps = decompose_components(&self.language(*depth)?, *n);
                let p = comps.iter().filter(|c| c.1 == ComponentKind::Periodic).count();
                let a = comps.len() - p;
                outcome(p == *periodic && a == *aperiodic, format!("{p} periodic, {a} aperiodic"))
            }
            Check::RauzyVertices { depth, n, vertices } => {
                let g = rauzy_graph(&self.language(*depth)?, *n);
                outcome(g.vertices.len() == *vertices, format!("{} vertices", g.vertices.len()))
            }
        })
    }

    fn blowup_with_depth(&self, depth: usize) -> Result<LazyBlowupMap, CorpusError> {
        let mut f = self.clone();
        let b = f.blowup.as_mut().ok_or_else(|| self.invalid("no blow-up given"))?;
        b.max_orbit_depth = depth;
        Ok(f.blowup_map()?.expect("blow-up present"))
    }

    fn compare(
        &self,
        alphabet: &Alphabet,
        got: &FiniteLanguage,
        want: &FiniteLanguage,
        outcome: impl Fn(bool, String) -> CheckOutcome,
    ) -> Result<CheckOutcome, CorpusError> {
        Ok(match got.first_divergence(want) {
            None => outcome(true, format!("equal up to length {}", got.depth())),
            Some((k, w)) => outcome(false, format!("differ at length {k}: {:?}", alphabet.render(&w))),
        })
    }
}

fn key(s: &OrderSpec) -> (Vec<u8>, Vec<u8>, Vec<u8>) {
    (s.flips.iter().copied().collect(), s.order_d.clone(), s.order_a.clone())
}

/// First `J_m` (|m| < radius) whose midpoint is not sent to the midpoint of
/// `J_(m+1)`, or two of these intervals that overlap.
fn wandering_failure(b: &LazyBlowupMap, radius: i64) -> Option<String> {
    let two = ExactScalar::from_int(2);
    for o in 0..b.orbits().len() {
        let mut seen: Vec<(ExactScalar, ExactScalar)> = Vec::new();
        for m in -radius..=radius {
            let Some((lo, hi)) = b.blown_interval(o, m) else {
                return Some(format!("J_{m} of orbit {o} is beyond the depth budget"));
            };
            if seen.iter().any(|(a, c)| lo < *c && *a < hi) {
                return Some(format!("J_{m} of orbit {o} overlaps an earlier interval"));
            }
            seen.push((lo.clone(), hi.clone()));
            if m == radius {
                break;
            }
            let Some((nlo, nhi)) = b.blown_interval(o, m + 1) else {
                return Some(format!("J_{} of orbit {o} is beyond the depth budget", m + 1));
            };
            let mid = &(&lo + &hi) / &two;
            let want = &(&nlo + &nhi) / &two;
            match b.apply(&mid, Direction::Forward) {
                Ok(Step::Defined(y)) if y == want => {}
                other => return Some(format!("midpoint of J_{m} of orbit {o} goes to {other:?}, not {want}")),
            }
        }
    }
    None
}
