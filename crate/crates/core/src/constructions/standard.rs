use serde::Serialize;

use super::{ConstructionError, Measure};
use crate::iet::{build_iet, IetKind, IetSpec, IntervalExchange};
use crate::language::{language_from_iet, recurrence_report, FiniteLanguage, Recurrence};
use crate::order::{check_order_condition, OrderSpec, OrderVerdict};

/// Level-by-level comparison of a rebuilt map's language with the input.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub depth: usize,
    /// Largest `k` such that levels `0..=k` coincide.
    pub agreement_depth: usize,
    /// Shortest word (rendered) in the symmetric difference, with its length.
    pub first_divergence: Option<(usize, String)>,
}

impl VerificationReport {
    pub fn agrees(&self) -> bool {
        self.first_divergence.is_none()
    }
}

/// Lay out intervals of length `μ[e]` in `orderD` and their translates in
/// `orderA`, then compare the resulting language with `lang`.
///
/// Recurrence is only checked on words of length up to `N / 4`: longer
/// words may legitimately need more than `N` letters to come back.
pub fn standard_from_language(
    lang: &FiniteLanguage,
    spec: &OrderSpec,
    mu: &Measure,
) -> Result<(IntervalExchange, VerificationReport), ConstructionError> {
    let alphabet = lang.alphabet();
    if let OrderVerdict::Counterexample { w, a, b, c, d } = check_order_condition(lang, spec) {
        let r = |l| alphabet.char_of(l);
        return Err(ConstructionError::OrderConditionFails(format!(
            "at {:?} with arrivals {}/{} and departures {}/{}",
            alphabet.render(&w),
            r(a),
            r(b),
            r(c),
            r(d)
        )));
    }
    if let Recurrence::Violation(w) = recurrence_report(lang, lang.depth() / 4) {
        return Err(ConstructionError::NonRecurrentInput(alphabet.render(&w)));
    }
    if mu.weights().len() != alphabet.len() {
        return Err(ConstructionError::InvalidMeasure);
    }
    let t = build_iet(IetSpec {
        alphabet: alphabet.clone(),
        lengths: mu.weights().to_vec(),
        image_lengths: None,
        order_d: spec.order_d.clone(),
        order_a: spec.order_a.clone(),
        flips: spec.flips.clone(),
        kind: IetKind::Standard,
    })?;
    let rebuilt = language_from_iet(&t, lang.depth())?;
    let report = compare_languages(lang, &rebuilt);
    Ok((t, report))
}

pub(crate) fn compare_languages(expected: &FiniteLanguage, got: &FiniteLanguage) -> VerificationReport {
    let depth = expected.depth().min(got.depth());
    let first_divergence = expected
        .truncated(depth)
        .first_divergence(&got.truncated(depth))
        .map(|(k, w)| (k, expected.alphabet().render(&w)));
    let agreement_depth = first_divergence.as_ref().map_or(depth, |(k, _)| k - 1);
    VerificationReport { depth, agreement_depth, first_divergence }
}
