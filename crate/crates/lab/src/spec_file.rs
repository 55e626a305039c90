//! Versioned JSON set specifications.
//!
//! ```json
//! {"version": 1, "type": "intervals", "intervals": [[0.0, 0.5]]}
//! {"version": 1, "type": "cantor", "q": 0.25, "a": 1.0, "depth": "auto"}
//! {"version": 1, "type": "fermi", "samples": [[0.0, -1.0], [0.5, 1.0]], "filling": 0.5}
//! ```
//!
//! Intervals may carry an optional `metadata` object (written by the `cantor`
//! and `fermi` commands). Unknown keys are rejected everywhere.

use std::fmt;
use std::path::Path;

use entropy_lab_core::scaling::{cantor_depth_policy, predicted_alpha};
use entropy_lab_core::{CantorSpec, DispersionSamples, SymbolFunction, TorusIntervalSet};
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};
use serde_json::Value;

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, thiserror::Error)]
pub enum SpecError {
    #[error("cannot read spec: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed spec: {0}")]
    Json(#[from] serde_json::Error),
    #[error("spec must be a JSON object")]
    NotObject,
    #[error("spec has no \"version\" field")]
    MissingVersion,
    #[error("unsupported spec version {0} (expected {SCHEMA_VERSION})")]
    UnsupportedVersion(Value),
    #[error("spec has no string \"type\" field")]
    MissingType,
    #[error("unknown spec type {0:?}")]
    UnknownType(String),
    #[error("cantor depth \"auto\" needs N_max")]
    AutoDepthWithoutNmax,
    #[error("invalid set: {0}")]
    Set(#[from] entropy_lab_core::Error),
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation_error: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predicted_alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncated_measure: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fermi_energy: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub filling: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntervalsSpec {
    pub intervals: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Metadata>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Depth {
    Fixed(u32),
    Auto,
}

impl Serialize for Depth {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Depth::Fixed(d) => s.serialize_u32(*d),
            Depth::Auto => s.serialize_str("auto"),
        }
    }
}

impl<'de> Deserialize<'de> for Depth {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct DepthVisitor;
        impl Visitor<'_> for DepthVisitor {
            type Value = Depth;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a nonnegative integer or \"auto\"")
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Depth, E> {
                u32::try_from(v).map(Depth::Fixed).map_err(|_| E::custom("depth out of range"))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Depth, E> {
                match v {
                    "auto" => Ok(Depth::Auto),
                    other => Err(E::invalid_value(de::Unexpected::Str(other), &self)),
                }
            }
        }
        d.deserialize_any(DepthVisitor)
    }
}

impl std::str::FromStr for Depth {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(Depth::Auto);
        }
        s.parse().map(Depth::Fixed).map_err(|_| format!("expected an integer or \"auto\", got {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CantorFileSpec {
    pub q: f64,
    pub a: f64,
    pub depth: Depth,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FermiFileSpec {
    pub samples: Vec<[f64; 2]>,
    pub filling: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SetSpec {
    Intervals(IntervalsSpec),
    Cantor(CantorFileSpec),
    Fermi(FermiFileSpec),
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    version: u64,
    #[serde(rename = "type")]
    kind: &'a str,
    #[serde(flatten)]
    body: &'a T,
}

/// A spec turned into a concrete set, with whatever the spec says about it.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedSet {
    pub set: TorusIntervalSet,
    pub cantor: Option<CantorSpec>,
    pub predicted_alpha: Option<f64>,
    pub fermi_energy: Option<f64>,
}

impl ResolvedSet {
    pub fn symbol(&self) -> SymbolFunction {
        SymbolFunction::indicator(&self.set)
    }
}

impl SetSpec {
    pub fn from_json(text: &str) -> Result<Self, SpecError> {
        let mut value: Value = serde_json::from_str(text)?;
        let obj = value.as_object_mut().ok_or(SpecError::NotObject)?;
        match obj.remove("version") {
            None => return Err(SpecError::MissingVersion),
            Some(v) if v.as_u64() == Some(SCHEMA_VERSION) => {}
            Some(v) => return Err(SpecError::UnsupportedVersion(v)),
        }
        let kind = match obj.remove("type") {
            Some(Value::String(s)) => s,
            _ => return Err(SpecError::MissingType),
        };
        Ok(match kind.as_str() {
            "intervals" => SetSpec::Intervals(serde_json::from_value(value)?),
            "cantor" => SetSpec::Cantor(serde_json::from_value(value)?),
            "fermi" => SetSpec::Fermi(serde_json::from_value(value)?),
            _ => return Err(SpecError::UnknownType(kind)),
        })
    }

    pub fn load(path: &Path) -> Result<Self, SpecError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            SetSpec::Intervals(_) => "intervals",
            SetSpec::Cantor(_) => "cantor",
            SetSpec::Fermi(_) => "fermi",
        }
    }

    /// Pretty JSON with `version` and `type` first, newline-terminated.
    pub fn to_json(&self) -> String {
        let kind = self.kind();
        let mut text = match self {
            SetSpec::Intervals(b) => to_pretty(&Envelope { version: SCHEMA_VERSION, kind, body: b }),
            SetSpec::Cantor(b) => to_pretty(&Envelope { version: SCHEMA_VERSION, kind, body: b }),
            SetSpec::Fermi(b) => to_pretty(&Envelope { version: SCHEMA_VERSION, kind, body: b }),
        };
        text.push('\n');
        text
    }

    /// `n_max` is only consulted for Cantor specs with `"depth": "auto"`.
    pub fn resolve(&self, n_max: Option<usize>) -> Result<ResolvedSet, SpecError> {
        match self {
            SetSpec::Intervals(spec) => {
                let raw: Vec<(f64, f64)> = spec.intervals.iter().map(|p| (p[0], p[1])).collect();
                let meta = spec.metadata.as_ref();
                Ok(ResolvedSet {
                    set: TorusIntervalSet::canonicalize(&raw)?,
                    cantor: None,
                    predicted_alpha: meta.and_then(|m| m.predicted_alpha),
                    fermi_energy: meta.and_then(|m| m.fermi_energy),
                })
            }
            SetSpec::Cantor(spec) => {
                let cantor = resolve_cantor(spec, n_max)?;
                Ok(ResolvedSet {
                    set: cantor.generate()?,
                    cantor: Some(cantor),
                    predicted_alpha: Some(predicted_alpha(&cantor)),
                    fermi_energy: None,
                })
            }
            SetSpec::Fermi(spec) => {
                let samples = spec.samples.iter().map(|p| (p[0], p[1])).collect();
                let sea = DispersionSamples::new(samples)?.fermi_sea(spec.filling)?;
                Ok(ResolvedSet { set: sea.set, cantor: None, predicted_alpha: None, fermi_energy: Some(sea.fermi_energy) })
            }
        }
    }
}

fn to_pretty<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("spec serialisation cannot fail")
}

pub fn resolve_cantor(spec: &CantorFileSpec, n_max: Option<usize>) -> Result<CantorSpec, SpecError> {
    let base = CantorSpec::new(spec.q, spec.a, 0)?;
    let depth = match spec.depth {
        Depth::Fixed(d) => d,
        Depth::Auto => cantor_depth_policy(&base, n_max.ok_or(SpecError::AutoDepthWithoutNmax)?)?,
    };
    Ok(CantorSpec::new(spec.q, spec.a, depth)?)
}

/// An explicit interval list for `set`, annotated with `metadata`.
pub fn intervals_spec(set: &TorusIntervalSet, metadata: Option<Metadata>) -> SetSpec {
    SetSpec::Intervals(IntervalsSpec { intervals: set.intervals().iter().map(|&(s, e)| [s, e]).collect(), metadata })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_each_type() {
        let s = SetSpec::from_json(r#"{"version":1,"type":"intervals","intervals":[[0,0.5]]}"#).unwrap();
        assert_eq!(s.resolve(None).unwrap().set.measure(), 0.5);
        let c = SetSpec::from_json(r#"{"type":"cantor","version":1,"q":0.25,"a":1,"depth":1}"#).unwrap();
        let r = c.resolve(None).unwrap();
        assert_eq!(r.set.intervals(), &[(0.0, 0.375), (0.625, 1.0)]);
        assert_eq!(r.predicted_alpha, Some(0.5));
        let auto = SetSpec::from_json(r#"{"type":"cantor","version":1,"q":0.25,"a":1,"depth":"auto"}"#).unwrap();
        assert!(matches!(auto.resolve(None), Err(SpecError::AutoDepthWithoutNmax)));
        assert_eq!(auto.resolve(Some(1 << 14)).unwrap().cantor.unwrap().depth(), 7);
        let f = SetSpec::from_json(
            r#"{"version":1,"type":"fermi","samples":[[0,1],[0.25,0],[0.5,-1],[0.75,0]],"filling":0.5}"#,
        )
        .unwrap();
        let r = f.resolve(None).unwrap();
        assert!((r.set.measure() - 0.5).abs() < 1e-9);
        assert!(r.fermi_energy.unwrap().abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_documents() {
        let cases = [
            r#"[1,2]"#,
            r#"{"type":"intervals","intervals":[[0,0.5]]}"#,
            r#"{"version":2,"type":"intervals","intervals":[[0,0.5]]}"#,
            r#"{"version":"1","type":"intervals","intervals":[[0,0.5]]}"#,
            r#"{"version":1,"intervals":[[0,0.5]]}"#,
            r#"{"version":1,"type":"disc","intervals":[[0,0.5]]}"#,
            r#"{"version":1,"type":"intervals","intervals":[[0,0.5]],"colour":"red"}"#,
            r#"{"version":1,"type":"intervals","intervals":[[0,0.5]],"metadata":{"author":"x"}}"#,
            r#"{"version":1,"type":"cantor","q":0.25,"a":1,"depth":"deep"}"#,
            r#"{"version":1,"type":"cantor","q":0.25,"a":1}"#,
            r#"{"version":1,"type":"intervals","intervals":[[0,0.5,0.7]]}"#,
        ];
        for text in cases {
            assert!(SetSpec::from_json(text).is_err(), "{text}");
        }
        let bad_q = SetSpec::from_json(r#"{"version":1,"type":"cantor","q":0.6,"a":1,"depth":1}"#).unwrap();
        assert!(matches!(bad_q.resolve(None), Err(SpecError::Set(_))));
    }

    #[test]
    fn round_trips_through_text() {
        let set = CantorSpec::new(1.0 / 3.0, 0.7, 4).unwrap().generate().unwrap();
        let meta = Metadata { source: Some("cantor".into()), q: Some(1.0 / 3.0), depth: Some(4), ..Default::default() };
        let spec = intervals_spec(&set, Some(meta));
        let text = spec.to_json();
        assert!(text.starts_with("{\n  \"version\": 1,\n  \"type\": \"intervals\""));
        let back = SetSpec::from_json(&text).unwrap();
        assert_eq!(back, spec);
        assert_eq!(back.resolve(None).unwrap().set, set);

        let cantor = SetSpec::Cantor(CantorFileSpec { q: 0.25, a: 1.0, depth: Depth::Auto });
        assert_eq!(SetSpec::from_json(&cantor.to_json()).unwrap(), cantor);
    }
}
