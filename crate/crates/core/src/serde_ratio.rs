//! `Rational` as `{"num": …, "den": …}`.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::Rational;

#[derive(Serialize, Deserialize)]
struct Repr {
    num: u64,
    den: u64,
}

pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    Repr {
        num: *r.numer(),
        den: *r.denom(),
    }
    .serialize(s)
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
    let Repr { num, den } = Repr::deserialize(d)?;
    if den == 0 {
        return Err(serde::de::Error::custom("zero denominator"));
    }
    Ok(Rational::new(num, den))
}

pub mod option {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        r.map(|r| Repr {
            num: *r.numer(),
            den: *r.denom(),
        })
        .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        match Option::<Repr>::deserialize(d)? {
            None => Ok(None),
            Some(Repr { den: 0, .. }) => Err(serde::de::Error::custom("zero denominator")),
            Some(Repr { num, den }) => Ok(Some(Rational::new(num, den))),
        }
    }
}
