use serde::Serialize;

use super::ConstructionError;
use crate::alphabet::{Alphabet, Letter, Word};
use crate::language::FiniteLanguage;

/// A language with one extra letter inserted between the two limits of a
/// nested chain of bispecial words.
#[derive(Clone, Debug, Serialize)]
pub struct TtrokLanguage {
    #[serde(skip)]
    pub language: FiniteLanguage,
    /// The chain, each word both a prefix and a suffix of the next.
    pub chain: Vec<String>,
    pub omega: char,
    /// The window `w omega w` whose factors were added, `w` the last chain word.
    pub window: String,
}

/// The character following the largest letter of `alphabet`, if unused; a
/// lowercase letter otherwise.
pub fn default_omega(alphabet: &Alphabet) -> char {
    let max = alphabet.chars().iter().copied().max().unwrap_or('0');
    char::from_u32(max as u32 + 1)
        .filter(|c| c.is_alphanumeric() && !alphabet.chars().contains(c))
        .or_else(|| ('a'..='z').find(|c| !alphabet.chars().contains(c)))
        .unwrap_or('#')
}

/// Follow bispecials from the empty word, each time taking the shortest
/// bispecial that starts and ends with the current one (lexicographically
/// least among equals), and add the factors of `w omega w` for the last
/// chain word `w`.
///
/// The last chain word must have length at least `n - 1`, so `lprime`
/// usually needs a few more levels than `n`.
pub fn ttrok_language(lprime: &FiniteLanguage, n: usize, omega: char) -> Result<TtrokLanguage, ConstructionError> {
    let base = lprime.alphabet();
    if base.chars().contains(&omega) {
        return Err(ConstructionError::NoBispecialChain(format!("{omega} is already a letter")));
    }
    if n == 0 || lprime.depth() < n {
        return Err(ConstructionError::NoBispecialChain(format!(
            "language has depth {}, {n} requested",
            lprime.depth()
        )));
    }
    let bis = lprime.bispecials();
    let mut chain: Vec<Word> = vec![Vec::new()];
    loop {
        let cur = chain.last().unwrap();
        let next = bis
            .iter()
            .filter(|w| w.len() > cur.len() && w.starts_with(cur) && w.ends_with(cur))
            .min_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        match next {
            Some(w) => chain.push(w.clone()),
            None => break,
        }
        if chain.last().unwrap().len() + 1 >= n {
            break;
        }
    }
    let last = chain.last().unwrap().clone();
    if chain.len() == 1 {
        return Err(ConstructionError::NoBispecialChain("no nonempty bispecial extends the empty word".into()));
    }
    if last.len() + 1 < n {
        return Err(ConstructionError::NoBispecialChain(format!(
            "longest chain word has length {}, need {} (use a deeper language)",
            last.len(),
            n - 1
        )));
    }
    let alphabet = base.extended(&[omega]);
    let w_letter = (alphabet.len() - 1) as Letter;
    let mut window = last.clone();
    window.push(w_letter);
    window.extend(&last);
    let added = FiniteLanguage::from_words(alphabet.clone(), &[window.clone()], n);
    let language = lprime.truncated(n).with_alphabet(alphabet.clone()).union(&added);
    Ok(TtrokLanguage {
        language,
        chain: chain.iter().map(|w| base.render(w)).collect(),
        omega,
        window: alphabet.render(&window),
    })
}
