//! Resolving the single input source of an invocation into a language or a map.

use std::path::{Path, PathBuf};

use clap::Args;
use ietlang::corpus::{load_example, Fixture, SCHEMA_VERSION};
use ietlang::exactnum::ExactScalar;
use ietlang::iet::{IetJson, IntervalExchange};
use ietlang::language::{language_from_iet, language_from_sequences, FiniteLanguage, LanguageJson};
use ietlang::order::{OrderSpec, OrderSpecJson};
use ietlang::sequence::TwoSidedJson;
use ietlang::Alphabet;
use serde::Deserialize;

use crate::CliError;

#[derive(Args, Debug, Clone, Default)]
pub struct Source {
    /// Named corpus example.
    #[arg(long, global = true)]
    pub example: Option<String>,
    /// Interval exchange description (JSON).
    #[arg(long, global = true, value_name = "FILE")]
    pub iet: Option<PathBuf>,
    /// Windows or two-sided sequences to read factors from (JSON).
    #[arg(long, global = true, value_name = "FILE")]
    pub windows: Option<PathBuf>,
    /// A finite language as written by `language --format json`.
    #[arg(long, global = true, value_name = "FILE")]
    pub language: Option<PathBuf>,
}

/// `--windows` file: literal windows, and/or sequences and periodic words.
#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct WindowsFile {
    alphabet: Vec<String>,
    #[serde(default)]
    windows: Vec<String>,
    #[serde(default)]
    sequences: Vec<TwoSidedJson>,
    #[serde(default)]
    periodic: Vec<String>,
    #[serde(default)]
    margin: usize,
}

/// What the source resolved to.
pub enum Resolved {
    Fixture(Box<Fixture>),
    Map(Box<IntervalExchange>),
    Windows { alphabet: Alphabet, windows: Vec<ietlang::Word>, margin: usize, fixture: Option<Box<Fixture>> },
    Language(FiniteLanguage),
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    serde_json::from_str(&read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

impl Source {
    pub fn resolve(&self) -> Result<Resolved, CliError> {
        let given = [self.example.is_some(), self.iet.is_some(), self.windows.is_some(), self.language.is_some()];
        match given.iter().filter(|&&g| g).count() {
            0 => return Err(CliError::Input("give one of --example, --iet, --windows, --language".into())),
            1 => {}
            _ => return Err(CliError::Input("give only one of --example, --iet, --windows, --language".into())),
        }
        if let Some(name) = &self.example {
            return Ok(Resolved::Fixture(Box::new(load_example(name)?)));
        }
        if let Some(path) = &self.iet {
            let j: IetJson = read_json(path)?;
            return Ok(Resolved::Map(Box::new(j.build().map_err(CliError::input)?)));
        }
        if let Some(path) = &self.language {
            let j: LanguageJson = read_json(path)?;
            return Ok(Resolved::Language(j.resolve().map_err(CliError::input)?));
        }
        let path = self.windows.as_ref().expect("one source is set");
        let f: WindowsFile = read_json(path)?;
        let alphabet = Alphabet::from_names(&f.alphabet).map_err(CliError::input)?;
        let windows = f.windows.iter().map(|w| alphabet.parse(w)).collect::<Result<Vec<_>, _>>().map_err(CliError::input)?;
        let fixture = if f.sequences.is_empty() && f.periodic.is_empty() {
            None
        } else {
            Some(Box::new(ad_hoc_fixture(&f)?))
        };
        Ok(Resolved::Windows { alphabet, windows, margin: f.margin, fixture })
    }
}

fn ad_hoc_fixture(f: &WindowsFile) -> Result<Fixture, CliError> {
    let value = serde_json::json!({
        "schema": SCHEMA_VERSION,
        "name": "input",
        "description": "",
        "alphabet": f.alphabet,
        "sequences": f.sequences,
        "periodic": f.periodic,
        "depth": 1,
        "expected": [],
    });
    let text = value.to_string();
    ietlang::corpus::parse_fixture("input", &text).map_err(CliError::from)
}

impl Resolved {
    pub fn default_depth(&self) -> usize {
        match self {
            Resolved::Fixture(f) => f.depth,
            Resolved::Language(l) => l.depth(),
            _ => 10,
        }
    }

    pub fn alphabet(&self) -> Result<Alphabet, CliError> {
        Ok(match self {
            Resolved::Fixture(f) => f.alphabet()?,
            Resolved::Map(t) => t.alphabet().clone(),
            Resolved::Windows { alphabet, .. } => alphabet.clone(),
            Resolved::Language(l) => l.alphabet().clone(),
        })
    }

    pub fn language(&self, n: usize) -> Result<FiniteLanguage, CliError> {
        if n == 0 {
            return Err(CliError::Input("depth must be at least 1".into()));
        }
        match self {
            Resolved::Fixture(f) => Ok(f.language(n)?),
            Resolved::Map(t) => language_from_iet(t.as_ref(), n).map_err(CliError::input),
            Resolved::Windows { alphabet, windows, margin, fixture } => {
                let mut all = windows.clone();
                if let Some(f) = fixture {
                    all.extend(f.windows(n)?);
                }
                language_from_sequences(alphabet, &all, n, *margin).map_err(CliError::input)
            }
            Resolved::Language(l) => {
                if n > l.depth() {
                    return Err(CliError::Input(format!("language file only has depth {}", l.depth())));
                }
                Ok(l.truncated(n))
            }
        }
    }

    pub fn map(&self) -> Result<IntervalExchange, CliError> {
        match self {
            Resolved::Map(t) => Ok((**t).clone()),
            Resolved::Fixture(f) => f.map()?.ok_or_else(|| CliError::Input(format!("example {} has no map", f.name))),
            _ => Err(CliError::Input("this command needs --iet or an example with a map".into())),
        }
    }

    pub fn fixture(&self) -> Option<&Fixture> {
        match self {
            Resolved::Fixture(f) => Some(f),
            Resolved::Windows { fixture: Some(f), .. } => Some(f),
            _ => None,
        }
    }

    /// Orders from `--orders`, else from the example, else read off the map.
    pub fn orders(&self, file: Option<&Path>) -> Result<Option<OrderSpec>, CliError> {
        let alphabet = self.alphabet()?;
        if let Some(path) = file {
            let j: OrderSpecJson = read_json(path)?;
            return j.resolve(&alphabet).map(Some).map_err(CliError::input);
        }
        if let Resolved::Fixture(f) = self {
            if let Some(s) = f.order_spec()? {
                return Ok(Some(s));
            }
        }
        match self {
            Resolved::Map(t) => Ok(Some(OrderSpec::from_iet(t))),
            Resolved::Fixture(f) => Ok(f.map()?.map(|t| OrderSpec::from_iet(&t))),
            _ => Ok(None),
        }
    }
}

/// A scalar given as JSON (`{"p":1,"q":3}`), an integer or `p/q`.
pub fn parse_scalar(s: &str) -> Result<ExactScalar, CliError> {
    if let Ok(x) = serde_json::from_str::<ExactScalar>(s) {
        return Ok(x);
    }
    let bad = || CliError::Input(format!("cannot read {s:?} as a number (use p/q or exact JSON)"));
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim().parse::<i64>().map_err(|_| bad())?, q.trim().parse::<i64>().map_err(|_| bad())?),
        None => (s.trim().parse::<i64>().map_err(|_| bad())?, 1),
    };
    if q == 0 {
        return Err(bad());
    }
    Ok(ExactScalar::ratio(p, q))
}

/// An order spec written `D/A` or `D/A/F`, e.g. `132/231` or `12/21/1`.
pub fn parse_spec(alphabet: &Alphabet, s: &str) -> Result<OrderSpec, CliError> {
    let parts: Vec<&str> = s.split('/').collect();
    let (d, a, f) = match parts.as_slice() {
        [d, a] => (*d, *a, ""),
        [d, a, f] => (*d, *a, *f),
        _ => return Err(CliError::Input(format!("order spec {s:?} should look like 132/231 or 132/231/1"))),
    };
    OrderSpec::parse(alphabet, d, a, f).map_err(CliError::input)
}
