use serde::{Deserialize, Serialize};

use super::ConstructionError;
use crate::alphabet::Alphabet;
use crate::exactnum::ExactScalar;
use crate::iet::{BasePoint, BlowupOrbit, IntervalExchange, LazyBlowupMap, Side};
use crate::order::OrderSpec;
use crate::sequence::TwoSidedJson;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BasePointJson {
    pub x: ExactScalar,
    #[serde(default = "exact_side")]
    pub side: Side,
}

fn exact_side() -> Side {
    Side::Exact
}

impl From<&BasePointJson> for BasePoint {
    fn from(p: &BasePointJson) -> Self {
        BasePoint::new(p.x.clone(), p.side)
    }
}

/// JSON form of one orbit to blow up: its sequence and where it sits in the base map.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BlowupOrbitJson {
    pub sequence: TwoSidedJson,
    #[serde(default)]
    pub middle_points: Vec<BasePointJson>,
    pub right_start: BasePointJson,
    pub left_start: BasePointJson,
}

impl BlowupOrbitJson {
    pub fn resolve(&self, alphabet: &Alphabet) -> Result<BlowupOrbit, ConstructionError> {
        Ok(BlowupOrbit {
            z: self.sequence.resolve(alphabet)?,
            middle_points: self.middle_points.iter().map(BasePoint::from).collect(),
            right_start: (&self.right_start).into(),
            left_start: (&self.left_start).into(),
        })
    }
}

/// Blow up the given orbits of the standard map `base` into intervals,
/// stacking coincident points by the order of their sequences under `orders`.
///
/// With no orbits the result is `base` itself, relabelled over `alphabet`.
pub fn denjoy_blowup(
    base: &IntervalExchange,
    alphabet: &Alphabet,
    orders: &OrderSpec,
    orbits: Vec<BlowupOrbit>,
    max_orbit_depth: usize,
) -> Result<LazyBlowupMap, ConstructionError> {
    Ok(LazyBlowupMap::new(base.clone(), alphabet.clone(), orders.clone(), orbits, max_orbit_depth)?)
}
