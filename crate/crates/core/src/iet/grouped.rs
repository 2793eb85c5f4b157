//! Coding an interval exchange by blocks of adjacent defining intervals.

use crate::alphabet::{Alphabet, Letter};
use crate::iet::{CodedMap, IetError, IntervalExchange, Piece, PiecewiseMap};

/// A partition of the base alphabet into labelled blocks, together with the
/// relabelled evaluation engine.
///
/// Junction points between two intervals of one block stay undefined, exactly
/// like other endpoints; this changes no cylinder with nonempty interior.
#[derive(Clone, Debug)]
pub struct CodingScheme {
    grouped_alphabet: Alphabet,
    groups: Vec<Vec<Letter>>,
    group_of: Vec<Letter>,
    map: PiecewiseMap,
}

impl CodingScheme {
    /// Every letter in its own block, labelled by itself.
    pub fn identity(t: &IntervalExchange) -> Self {
        let groups = t.alphabet().letters().map(|l| vec![l]).collect();
        grouped_coding_map(t, t.alphabet().clone(), groups).expect("singleton groups are always valid")
    }

    pub fn grouped_alphabet(&self) -> &Alphabet {
        &self.grouped_alphabet
    }

    /// Base letters of each group, listed in `orderD` order.
    pub fn groups(&self) -> &[Vec<Letter>] {
        &self.groups
    }

    pub fn group_of(&self, base: Letter) -> Letter {
        self.group_of[base as usize]
    }

    pub fn is_identity(&self) -> bool {
        self.groups.iter().enumerate().all(|(i, g)| g.len() == 1 && g[0] as usize == i)
    }
}

impl CodedMap for CodingScheme {
    fn coding_alphabet(&self) -> &Alphabet {
        &self.grouped_alphabet
    }
    fn engine(&self) -> &PiecewiseMap {
        &self.map
    }
}

/// Check that `groups[g]` (the base letters labelled by `grouped_alphabet[g]`)
/// form valid blocks and build the grouped coding.
pub fn grouped_coding_map(
    t: &IntervalExchange,
    grouped_alphabet: Alphabet,
    groups: Vec<Vec<Letter>>,
) -> Result<CodingScheme, IetError> {
    let n = t.alphabet().len();
    if groups.len() != grouped_alphabet.len() {
        return Err(IetError::InvalidSpec(format!(
            "{} groups for {} group labels",
            groups.len(),
            grouped_alphabet.len()
        )));
    }
    let mut group_of = vec![Letter::MAX; n];
    for (g, members) in groups.iter().enumerate() {
        if members.is_empty() {
            return Err(IetError::InvalidSpec(format!("group {} is empty", grouped_alphabet.char_of(g as Letter))));
        }
        for &l in members {
            if l as usize >= n || group_of[l as usize] != Letter::MAX {
                return Err(IetError::InvalidSpec("groups do not partition the alphabet".into()));
            }
            group_of[l as usize] = g as Letter;
        }
    }
    if group_of.contains(&Letter::MAX) {
        return Err(IetError::InvalidSpec("groups do not partition the alphabet".into()));
    }
    let pos = |order: &[Letter], l: Letter| order.iter().position(|&x| x == l).unwrap();
    let mut sorted_groups = Vec::with_capacity(groups.len());
    for (g, members) in groups.iter().enumerate() {
        let label = grouped_alphabet.char_of(g as Letter);
        let mut in_d: Vec<Letter> = members.clone();
        in_d.sort_by_key(|&l| pos(t.order_d(), l));
        let d_pos: Vec<usize> = in_d.iter().map(|&l| pos(t.order_d(), l)).collect();
        if d_pos.windows(2).any(|w| w[1] != w[0] + 1) {
            return Err(IetError::NonContiguousGroup(label));
        }
        let flipped = t.is_flipped(in_d[0]);
        if in_d.iter().any(|&l| t.is_flipped(l) != flipped) {
            return Err(IetError::MixedFlipGroup(label));
        }
        let a_pos: Vec<usize> = in_d.iter().map(|&l| pos(t.order_a(), l)).collect();
        let adjacent = a_pos.windows(2).all(|w| if flipped { w[0] == w[1] + 1 } else { w[1] == w[0] + 1 });
        if !adjacent {
            return Err(IetError::NonContiguousImage(label));
        }
        sorted_groups.push(in_d);
    }
    let pieces: Vec<Piece> = t
        .map()
        .pieces()
        .iter()
        .map(|p| Piece { letter: group_of[p.letter as usize], ..p.clone() })
        .collect();
    let map = PiecewiseMap::new(pieces, t.total().clone());
    Ok(CodingScheme { grouped_alphabet, groups: sorted_groups, group_of, map })
}
