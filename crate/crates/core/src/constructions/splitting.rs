use serde::{Deserialize, Serialize};

use super::ConstructionError;
use crate::alphabet::{Alphabet, Letter};
use crate::language::FiniteLanguage;
use crate::order::{check_order_condition, OrderSpec, OrderVerdict};

/// A letter-to-letter map from a refined alphabet onto a base alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplittingSpec {
    /// `phi[e]` is the base letter of refined letter `e`.
    pub phi: Vec<Letter>,
}

impl SplittingSpec {
    /// Parse blocks like `["13", "2"]`: the i-th block lists the refined
    /// letters sent to the i-th base letter.
    pub fn from_blocks(refined: &Alphabet, base: &Alphabet, blocks: &[String]) -> Result<Self, ConstructionError> {
        if blocks.len() != base.len() {
            return Err(ConstructionError::InvalidOrbit(format!(
                "{} blocks for {} base letters",
                blocks.len(),
                base.len()
            )));
        }
        let mut phi = vec![Letter::MAX; refined.len()];
        for (b, block) in blocks.iter().enumerate() {
            for l in refined.parse(block).map_err(crate::language::LanguageError::from)? {
                if phi[l as usize] != Letter::MAX {
                    return Err(ConstructionError::InvalidOrbit(format!(
                        "letter {} appears in two blocks",
                        refined.char_of(l)
                    )));
                }
                phi[l as usize] = b as Letter;
            }
        }
        if let Some(l) = phi.iter().position(|&b| b == Letter::MAX) {
            return Err(ConstructionError::InvalidOrbit(format!(
                "letter {} is in no block",
                refined.char_of(l as Letter)
            )));
        }
        Ok(SplittingSpec { phi })
    }

    pub fn identity(n: usize) -> Self {
        SplittingSpec { phi: (0..n as Letter).collect() }
    }

    fn block(&self, base: Letter) -> Vec<Letter> {
        (0..self.phi.len() as Letter).filter(|&l| self.phi[l as usize] == base).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SplitVerdict {
    Valid,
    /// `bullet` numbers the failed requirement: 0 for the language and order
    /// preconditions, 1 for the flip set, 2 and 3 for unflipped and flipped
    /// blocks, 4 for compatibility of the block order with the base order.
    Violation { bullet: u8, witness: String },
}

fn violation(bullet: u8, witness: String) -> Result<SplitVerdict, ConstructionError> {
    Ok(SplitVerdict::Violation { bullet, witness })
}

fn rank(order: &[Letter]) -> Vec<usize> {
    let mut r = vec![0; order.len()];
    for (i, &l) in order.iter().enumerate() {
        r[l as usize] = i;
    }
    r
}

/// Check that `hat` (with order spec `hat_spec`) is a splitting of `lang`
/// (with `spec`) through `split`.
pub fn splitting_check(
    lang: &FiniteLanguage,
    spec: &OrderSpec,
    hat: &FiniteLanguage,
    hat_spec: &OrderSpec,
    split: &SplittingSpec,
) -> Result<SplitVerdict, ConstructionError> {
    let base = lang.alphabet();
    let refined = hat.alphabet();
    if split.phi.len() != refined.len() || split.phi.iter().any(|&b| b as usize >= base.len()) {
        return Err(ConstructionError::InvalidOrbit("splitting map does not match the alphabets".into()));
    }
    let render_letters = |a: &Alphabet, ls: &[Letter]| a.render(ls);
    let depth = lang.depth().min(hat.depth());
    let image = hat.truncated(depth).map_letters(base, &split.phi);
    if let Some((k, w)) = image.first_divergence(&lang.truncated(depth)) {
        return violation(0, format!("image of the refined language differs at length {k}: {}", base.render(&w)));
    }
    for (l, s, name) in [(lang, spec, "base"), (hat, hat_spec, "refined")] {
        if let OrderVerdict::Counterexample { w, .. } = check_order_condition(l, s) {
            return violation(0, format!("{name} order condition fails at {:?}", l.alphabet().render(&w)));
        }
    }
    for e in refined.letters() {
        let want = spec.flips.contains(&split.phi[e as usize]);
        if hat_spec.flips.contains(&e) != want {
            return violation(1, refined.char_of(e).to_string());
        }
    }
    let rd = rank(&hat_spec.order_d);
    let ra = rank(&hat_spec.order_a);
    for b in base.letters() {
        let block = split.block(b);
        let flipped = spec.flips.contains(&b);
        let bullet = if flipped { 3 } else { 2 };
        let mut by_d = block.clone();
        by_d.sort_by_key(|&l| rd[l as usize]);
        let mut by_a = block.clone();
        by_a.sort_by_key(|&l| ra[l as usize]);
        let consecutive = |v: &[Letter], r: &[usize]| v.windows(2).all(|w| r[w[1] as usize] == r[w[0] as usize] + 1);
        if !consecutive(&by_d, &rd) || !consecutive(&by_a, &ra) {
            return violation(bullet, render_letters(refined, &block));
        }
        let mut expect_a = by_d.clone();
        if flipped {
            expect_a.reverse();
        }
        if expect_a != by_a {
            return violation(bullet, render_letters(refined, &block));
        }
    }
    let bd = rank(&spec.order_d);
    let ba = rank(&spec.order_a);
    for x in refined.letters() {
        for y in refined.letters() {
            let (bx, by) = (split.phi[x as usize] as usize, split.phi[y as usize] as usize);
            if bx == by {
                continue;
            }
            if (bd[bx] < bd[by]) != (rd[x as usize] < rd[y as usize])
                || (ba[bx] < ba[by]) != (ra[x as usize] < ra[y as usize])
            {
                return violation(4, format!("{}{}", refined.char_of(x), refined.char_of(y)));
            }
        }
    }
    Ok(SplitVerdict::Valid)
}
