//! Serde adapters that write vectors as plain JSON arrays.

use crate::Vector;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Coordinates as written: negative zero prints as zero.
fn plain(v: &Vector) -> Vec<f64> {
    v.iter().map(|x| x + 0.0).collect()
}

pub fn serialize<S: Serializer>(v: &Vector, s: S) -> Result<S::Ok, S::Error> {
    plain(v).serialize(s)
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vector, D::Error> {
    let xs = Vec::<f64>::deserialize(d)?;
    Ok(Vector::from_vec(xs))
}

pub mod list {
    use super::*;

    pub fn serialize<S: Serializer>(vs: &[Vector], s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<f64>> = vs.iter().map(super::plain).collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vector>, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        Ok(rows.into_iter().map(Vector::from_vec).collect())
    }
}

pub mod option {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<Vector>, s: S) -> Result<S::Ok, S::Error> {
        v.as_ref().map(super::plain).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vector>, D::Error> {
        Ok(Option::<Vec<f64>>::deserialize(d)?.map(Vector::from_vec))
    }
}
