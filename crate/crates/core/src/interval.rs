//! Closed intervals with possibly infinite endpoints, and normalized unions of them.
//!
//! An [`IntervalSet`] is always kept sorted, disjoint and non-adjacent: any
//! overlapping or touching inputs are merged when the set is built. Because
//! the intervals are closed, `[a, b]` and `[b, c]` collapse into `[a, c]`.

use std::fmt;

use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{HdrError, Result};
use crate::format::round_sig;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lower: f64,
    upper: f64,
}

impl Interval {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if lower.is_nan() || upper.is_nan() || lower > upper {
            return Err(HdrError::InvalidInterval { lower, upper });
        }
        Ok(Self { lower, upper })
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn width(&self) -> f64 {
        if self.lower.is_infinite() || self.upper.is_infinite() {
            f64::INFINITY
        } else {
            self.upper - self.lower
        }
    }

    pub fn is_bounded(&self) -> bool {
        self.lower.is_finite() && self.upper.is_finite()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    /// Multiply both endpoints by a positive factor.
    pub fn scaled(&self, factor: f64) -> Interval {
        Interval {
            lower: self.lower * factor,
            upper: self.upper * factor,
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}, {}]",
            crate::format::fmt_sig(self.lower, 15),
            crate::format::fmt_sig(self.upper, 15)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct IntervalSet {
    parts: Vec<Interval>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        Self { parts: Vec::new() }
    }

    pub fn single(interval: Interval) -> Self {
        Self {
            parts: vec![interval],
        }
    }

    /// Build a set from raw `(lower, upper)` pairs.
    pub fn from_pairs<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        let raw = pairs
            .into_iter()
            .map(|(l, u)| Interval::new(l, u))
            .collect::<Result<Vec<_>>>()?;
        Ok(normalize(raw))
    }

    pub fn parts(&self) -> &[Interval] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn measure(&self) -> f64 {
        measure(self)
    }

    pub fn contains(&self, x: f64) -> bool {
        contains(self, x)
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        normalize(self.parts.iter().chain(other.parts.iter()).copied())
    }

    pub fn scaled(&self, factor: f64) -> IntervalSet {
        normalize(self.parts.iter().map(|p| p.scaled(factor)))
    }

    /// Every finite endpoint, in ascending order.
    pub fn boundary_points(&self) -> Vec<f64> {
        self.parts
            .iter()
            .flat_map(|p| [p.lower, p.upper])
            .filter(|x| x.is_finite())
            .collect()
    }

    pub fn lower(&self) -> Option<f64> {
        self.parts.first().map(|p| p.lower)
    }

    pub fn upper(&self) -> Option<f64> {
        self.parts.last().map(|p| p.upper)
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "{{}}");
        }
        for (i, part) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, " U ")?;
            }
            write!(f, "{part}")?;
        }
        Ok(())
    }
}

/// Sort and merge raw intervals into a canonical [`IntervalSet`].
pub fn normalize<I>(raw: I) -> IntervalSet
where
    I: IntoIterator<Item = Interval>,
{
    let mut parts: Vec<Interval> = raw.into_iter().collect();
    parts.sort_by(|a, b| {
        a.lower
            .total_cmp(&b.lower)
            .then(a.upper.total_cmp(&b.upper))
    });

    let mut merged: Vec<Interval> = Vec::with_capacity(parts.len());
    for part in parts {
        match merged.last_mut() {
            Some(last) if part.lower <= last.upper => {
                if part.upper > last.upper {
                    last.upper = part.upper;
                }
            }
            _ => merged.push(part),
        }
    }
    IntervalSet { parts: merged }
}

pub fn measure(set: &IntervalSet) -> f64 {
    set.parts.iter().map(Interval::width).sum()
}

pub fn contains(set: &IntervalSet, x: f64) -> bool {
    // parts are sorted, so the candidate is the last part starting at or before x
    let idx = set.parts.partition_point(|p| p.lower <= x);
    idx > 0 && set.parts[idx - 1].contains(x)
}

fn endpoint_to_json<S: SerializeSeq>(seq: &mut S, x: f64) -> std::result::Result<(), S::Error> {
    if x == f64::INFINITY {
        seq.serialize_element("inf")
    } else if x == f64::NEG_INFINITY {
        seq.serialize_element("-inf")
    } else {
        seq.serialize_element(&round_sig(x, 15))
    }
}

struct PairRef<'a>(&'a Interval);

impl Serialize for PairRef<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(2))?;
        endpoint_to_json(&mut seq, self.0.lower)?;
        endpoint_to_json(&mut seq, self.0.upper)?;
        seq.end()
    }
}

/// JSON form: an array of `[lower, upper]` pairs, with `"-inf"` / `"inf"` for
/// infinite endpoints and finite values rounded to 15 significant digits.
impl Serialize for IntervalSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.parts.len()))?;
        for part in &self.parts {
            seq.serialize_element(&PairRef(part))?;
        }
        seq.end()
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Endpoint {
    Number(f64),
    Sentinel(String),
}

impl Endpoint {
    fn value<E: de::Error>(self) -> std::result::Result<f64, E> {
        match self {
            Endpoint::Number(x) => Ok(x),
            Endpoint::Sentinel(s) => match s.as_str() {
                "inf" | "+inf" | "Inf" => Ok(f64::INFINITY),
                "-inf" | "-Inf" => Ok(f64::NEG_INFINITY),
                other => Err(E::custom(format!("unrecognised endpoint '{other}'"))),
            },
        }
    }
}

impl<'de> Deserialize<'de> for IntervalSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct SetVisitor;

        impl<'de> Visitor<'de> for SetVisitor {
            type Value = IntervalSet;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an array of [lower, upper] pairs")
            }

            fn visit_seq<A: SeqAccess<'de>>(
                self,
                mut seq: A,
            ) -> std::result::Result<IntervalSet, A::Error> {
                let mut raw = Vec::new();
                while let Some((lo, hi)) = seq.next_element::<(Endpoint, Endpoint)>()? {
                    let interval = Interval::new(lo.value()?, hi.value()?)
                        .map_err(|e| de::Error::custom(e.to_string()))?;
                    raw.push(interval);
                }
                Ok(normalize(raw))
            }
        }

        deserializer.deserialize_seq(SetVisitor)
    }
}
