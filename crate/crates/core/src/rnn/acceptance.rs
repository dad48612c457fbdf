use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{BigFloat, Rational};

/// The set `S` of final outputs that count as acceptance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AcceptanceSet {
    ExactZero,
    OpenInterval(Rational, Rational),
    FiniteSet(Vec<Rational>),
}

impl AcceptanceSet {
    pub fn contains(&self, o: &Rational) -> bool {
        match self {
            AcceptanceSet::ExactZero => o.is_zero(),
            AcceptanceSet::OpenInterval(lo, hi) => lo < o && o < hi,
            AcceptanceSet::FiniteSet(values) => values.contains(o),
        }
    }

    pub fn contains_float(&self, o: &BigFloat) -> bool {
        match self {
            AcceptanceSet::ExactZero => o.is_zero(),
            _ => self.contains(&o.to_rational()),
        }
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let j = match self {
            AcceptanceSet::ExactZero => AcceptanceJson::ExactZero,
            AcceptanceSet::OpenInterval(lo, hi) => AcceptanceJson::OpenInterval {
                lo: lo.to_string(),
                hi: hi.to_string(),
            },
            AcceptanceSet::FiniteSet(v) => AcceptanceJson::FiniteSet {
                values: v.iter().map(Rational::to_string).collect(),
            },
        };
        serde_json::to_value(j).expect("acceptance set serializes")
    }

    pub fn from_json_value(v: serde_json::Value) -> Result<Self> {
        let j: AcceptanceJson = serde_json::from_value(v)?;
        Ok(match j {
            AcceptanceJson::ExactZero => AcceptanceSet::ExactZero,
            AcceptanceJson::OpenInterval { lo, hi } => {
                let (lo, hi) = (Rational::parse(&lo)?, Rational::parse(&hi)?);
                if lo >= hi {
                    return Err(Error::Parse(format!("empty acceptance interval ({lo}, {hi})")));
                }
                AcceptanceSet::OpenInterval(lo, hi)
            }
            AcceptanceJson::FiniteSet { values } => {
                AcceptanceSet::FiniteSet(values.iter().map(|s| Rational::parse(s)).collect::<Result<_>>()?)
            }
        })
    }
}

impl fmt::Display for AcceptanceSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AcceptanceSet::ExactZero => write!(f, "{{0}}"),
            AcceptanceSet::OpenInterval(lo, hi) => write!(f, "({lo}, {hi})"),
            AcceptanceSet::FiniteSet(v) => {
                let items: Vec<String> = v.iter().map(Rational::to_string).collect();
                write!(f, "{{{}}}", items.join(", "))
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum AcceptanceJson {
    ExactZero,
    OpenInterval { lo: String, hi: String },
    FiniteSet { values: Vec<String> },
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn membership() {
        let s = AcceptanceSet::OpenInterval(Rational::zero(), Rational::ratio(1, 5));
        assert!(s.contains(&Rational::ratio(3, 125)));
        assert!(!s.contains(&Rational::zero()));
        assert!(!s.contains(&Rational::ratio(1, 5)));
        assert!(AcceptanceSet::ExactZero.contains(&Rational::zero()));
        assert!(AcceptanceSet::FiniteSet(vec![Rational::one()]).contains(&Rational::one()));
    }

    #[test]
    fn json_roundtrip() {
        for s in [
            AcceptanceSet::ExactZero,
            AcceptanceSet::OpenInterval(Rational::zero(), Rational::ratio(1, 5)),
            AcceptanceSet::FiniteSet(vec![Rational::ratio(-1, 2), Rational::from_i64(3)]),
        ] {
            assert_eq!(AcceptanceSet::from_json_value(s.to_json_value()).unwrap(), s);
        }
        let bad = serde_json::json!({"type": "open_interval", "lo": "1", "hi": "0"});
        assert!(AcceptanceSet::from_json_value(bad).is_err());
    }
}
