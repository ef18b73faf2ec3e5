//! The `tfan/1` document format and serde helpers for exact integers.
//!
//! Documents are JSON objects with integers written as decimal strings. Canonical
//! documents list keys in the order `format, ambient_rank, rays, cones, weights,
//! signed, pl_functions, metadata` and only maximal cones, so `write(read(doc))`
//! reproduces a canonical document byte for byte.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Signed;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactlin::Vector;
use crate::plfun::PLFunction;
use crate::polyfan::Fan;
use crate::tropcycle::WeightedFan;

pub const FORMAT_TAG: &str = "tfan/1";

pub fn serialize_bigint<S: Serializer>(x: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

pub fn deserialize_bigint<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigInt, D::Error> {
    let text = String::deserialize(d)?;
    parse_int(&text).map_err(D::Error::custom)
}

pub fn serialize_bigints<S: Serializer>(xs: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(|x| x.to_string()))
}

pub fn deserialize_bigints<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<BigInt>, D::Error> {
    let texts = Vec::<String>::deserialize(d)?;
    texts.iter().map(|t| parse_int(t).map_err(D::Error::custom)).collect()
}

pub fn serialize_vectors<S: Serializer>(xs: &[Vector], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(|v| v.iter().map(|x| x.to_string()).collect::<Vec<_>>()))
}

pub fn deserialize_vectors<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Vector>, D::Error> {
    let texts = Vec::<Vec<String>>::deserialize(d)?;
    texts
        .iter()
        .map(|v| v.iter().map(|t| parse_int(t).map_err(D::Error::custom)).collect())
        .collect()
}

/// Strict decimal integers: optional minus sign, no leading zeros, no plus sign.
fn parse_int(text: &str) -> std::result::Result<BigInt, String> {
    let digits = text.strip_prefix('-').unwrap_or(text);
    let ok = !digits.is_empty()
        && digits.bytes().all(|b| b.is_ascii_digit())
        && (digits == "0" || !digits.starts_with('0'))
        && text != "-0";
    if !ok {
        return Err(format!("invalid integer {text:?}"));
    }
    text.parse().map_err(|_| format!("invalid integer {text:?}"))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeEntry {
    pub rays: Vec<usize>,
    #[serde(default = "yes", skip_serializing_if = "is_true")]
    pub maximal: bool,
}

fn yes() -> bool {
    true
}

fn is_true(b: &bool) -> bool {
    *b
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlEntry {
    pub name: String,
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        serialize_with = "ser_opt_ints",
        deserialize_with = "de_opt_ints"
    )]
    pub ray_values: Option<Vec<BigInt>>,
    /// Cone-entry index ↦ ambient covector.
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        serialize_with = "ser_opt_covectors",
        deserialize_with = "de_opt_covectors"
    )]
    pub covectors: Option<BTreeMap<usize, Vector>>,
}

fn ser_opt_ints<S: Serializer>(x: &Option<Vec<BigInt>>, s: S) -> std::result::Result<S::Ok, S::Error> {
    serialize_bigints(x.as_deref().unwrap_or_default(), s)
}

fn de_opt_ints<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Vec<BigInt>>, D::Error> {
    deserialize_bigints(d).map(Some)
}

fn ser_opt_covectors<S: Serializer>(x: &Option<BTreeMap<usize, Vector>>, s: S) -> std::result::Result<S::Ok, S::Error> {
    let empty = BTreeMap::new();
    s.collect_map(
        x.as_ref().unwrap_or(&empty).iter().map(|(k, v)| (k, v.iter().map(|x| x.to_string()).collect::<Vec<_>>())),
    )
}

fn de_opt_covectors<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<BTreeMap<usize, Vector>>, D::Error> {
    let raw = BTreeMap::<usize, Vec<String>>::deserialize(d)?;
    raw.into_iter()
        .map(|(k, v)| Ok((k, v.iter().map(|t| parse_int(t).map_err(D::Error::custom)).collect::<std::result::Result<_, _>>()?)))
        .collect::<std::result::Result<_, _>>()
        .map(Some)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TfanDocument {
    pub format: String,
    pub ambient_rank: usize,
    #[serde(serialize_with = "serialize_vectors", deserialize_with = "deserialize_vectors")]
    pub rays: Vec<Vector>,
    pub cones: Vec<ConeEntry>,
    /// Cone-entry index ↦ weight; all weights are one when absent.
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        serialize_with = "ser_opt_weights",
        deserialize_with = "de_opt_weights"
    )]
    pub weights: Option<BTreeMap<usize, BigInt>>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub signed: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pl_functions: Vec<PlEntry>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, String>,
}

fn ser_opt_weights<S: Serializer>(x: &Option<BTreeMap<usize, BigInt>>, s: S) -> std::result::Result<S::Ok, S::Error> {
    let empty = BTreeMap::new();
    s.collect_map(x.as_ref().unwrap_or(&empty).iter().map(|(k, v)| (k, v.to_string())))
}

fn de_opt_weights<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<BTreeMap<usize, BigInt>>, D::Error> {
    let raw = BTreeMap::<usize, String>::deserialize(d)?;
    raw.into_iter().map(|(k, v)| Ok((k, parse_int(&v).map_err(D::Error::custom)?))).collect::<std::result::Result<_, _>>().map(Some)
}

/// A parsed document: the weighted fan and its named functions.
#[derive(Clone, Debug)]
pub struct TfanFile {
    pub fan: WeightedFan,
    pub pl_functions: Vec<(String, PLFunction)>,
    pub metadata: BTreeMap<String, String>,
}

impl TfanFile {
    pub fn pl(&self, name: &str) -> Option<&PLFunction> {
        self.pl_functions.iter().find(|(n, _)| n == name).map(|(_, p)| p)
    }
}

pub fn parse_document(text: &str) -> Result<TfanDocument> {
    let doc: TfanDocument = serde_json::from_str(text)
        .map_err(|e| Error::Parse { line: e.line(), column: e.column(), message: e.to_string() })?;
    if doc.format != FORMAT_TAG {
        return Err(Error::InvalidDocument(format!("unsupported format {:?}", doc.format)));
    }
    Ok(doc)
}

pub fn read_tfan(text: &str) -> Result<TfanFile> {
    build(&parse_document(text)?)
}

/// Validates a document and builds its weighted fan.
pub fn build(doc: &TfanDocument) -> Result<TfanFile> {
    if let Some(bad) = doc.rays.iter().find(|r| r.len() != doc.ambient_rank) {
        return Err(Error::DimensionMismatch(format!("ray of length {} in rank {}", bad.len(), doc.ambient_rank)));
    }
    let maximal: Vec<Vec<usize>> = doc.cones.iter().filter(|c| c.maximal).map(|c| c.rays.clone()).collect();
    let fan = Fan::new(doc.ambient_rank, doc.rays.clone(), maximal)?;
    let mut position = Vec::with_capacity(doc.cones.len());
    for c in &doc.cones {
        let mut rays = c.rays.clone();
        rays.sort_unstable();
        let idx = fan.index_of(&rays).ok_or_else(|| Error::ConeNotInFan(c.rays.clone()))?;
        position.push(idx);
    }
    let mut weights = BTreeMap::new();
    match &doc.weights {
        None => {
            for c in fan.maximal_cones() {
                weights.insert(c, BigInt::from(1));
            }
        }
        Some(w) => {
            for (&entry, value) in w {
                let &idx = position.get(entry).ok_or_else(|| Error::InvalidDocument(format!("weight for missing cone entry {entry}")))?;
                weights.insert(idx, value.clone());
            }
        }
    }
    let fan_w = if doc.signed { WeightedFan::new_signed(fan, weights)? } else { WeightedFan::new(fan, weights)? };
    let mut pl_functions = Vec::new();
    for p in &doc.pl_functions {
        let f = fan_w.fan();
        let phi = match (&p.ray_values, &p.covectors) {
            (Some(v), None) => {
                if v.len() != f.rays().len() {
                    return Err(Error::DimensionMismatch(format!("function {} has {} ray values", p.name, v.len())));
                }
                PLFunction::from_heights(f, v)?
            }
            (None, Some(cov)) => {
                let mut by_cone = BTreeMap::new();
                for (&entry, u) in cov {
                    let &idx = position
                        .get(entry)
                        .ok_or_else(|| Error::InvalidDocument(format!("covector for missing cone entry {entry}")))?;
                    by_cone.insert(idx, u.clone());
                }
                PLFunction::from_covectors(f, &by_cone)?
            }
            _ => {
                return Err(Error::InvalidDocument(format!(
                    "function {} needs exactly one of ray_values and covectors",
                    p.name
                )))
            }
        };
        pl_functions.push((p.name.clone(), phi));
    }
    Ok(TfanFile { fan: fan_w, pl_functions, metadata: doc.metadata.clone() })
}

/// The canonical document of a weighted fan with optional named functions.
pub fn to_document(wf: &WeightedFan, pl: &[(String, PLFunction)], metadata: &BTreeMap<String, String>) -> TfanDocument {
    let f = wf.fan();
    let maximal = f.maximal_cones();
    let cones = maximal.iter().map(|&c| ConeEntry { rays: f.cone(c).rays().to_vec(), maximal: true }).collect();
    let weights = maximal.iter().enumerate().map(|(i, &c)| (i, wf.weight(c).clone())).collect();
    let pl_functions = pl
        .iter()
        .map(|(name, phi)| {
            if f.is_simplicial() {
                let values = (0..f.rays().len()).map(|r| phi.ray_value(f, r)).collect();
                PlEntry { name: name.clone(), ray_values: Some(values), covectors: None }
            } else {
                let cov = maximal.iter().enumerate().map(|(i, &c)| (i, phi.covector(f, c))).collect();
                PlEntry { name: name.clone(), ray_values: None, covectors: Some(cov) }
            }
        })
        .collect();
    TfanDocument {
        format: FORMAT_TAG.to_string(),
        ambient_rank: f.ambient_rank(),
        rays: f.rays().to_vec(),
        cones,
        weights: Some(weights),
        signed: wf.is_signed() && wf.weights().values().any(|w| !w.is_positive()),
        pl_functions,
        metadata: metadata.clone(),
    }
}

pub fn write_document(doc: &TfanDocument) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}

pub fn write_tfan(wf: &WeightedFan) -> String {
    write_document(&to_document(wf, &[], &BTreeMap::new()))
}

/// Matroid files: `{"ground_size": n, "bases": [[…], …]}` or `{"uniform": [r, n]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatroidDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bases: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uniform: Option<(usize, usize)>,
}

pub fn read_matroid(text: &str) -> Result<crate::matroid::Matroid> {
    let doc: MatroidDocument = serde_json::from_str(text)
        .map_err(|e| Error::Parse { line: e.line(), column: e.column(), message: e.to_string() })?;
    match doc {
        MatroidDocument { uniform: Some((r, n)), ground_size: None, bases: None } => crate::matroid::Matroid::uniform(r, n),
        MatroidDocument { uniform: None, ground_size: Some(n), bases: Some(b) } => crate::matroid::Matroid::from_bases(n, &b),
        _ => Err(Error::InvalidMatroid("give either uniform or ground_size with bases".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::vector;

    const LINE: &str = r#"{
  "format": "tfan/1",
  "ambient_rank": 2,
  "rays": [
    [
      "1",
      "0"
    ],
    [
      "0",
      "1"
    ],
    [
      "-1",
      "-1"
    ]
  ],
  "cones": [
    {
      "rays": [
        0
      ]
    },
    {
      "rays": [
        1
      ]
    },
    {
      "rays": [
        2
      ]
    }
  ],
  "weights": {
    "0": "1",
    "1": "1",
    "2": "1"
  }
}
"#;

    #[test]
    fn canonical_round_trip() {
        let file = read_tfan(LINE).unwrap();
        assert_eq!(file.fan.fan().rays()[2], vector(&[-1, -1]));
        assert_eq!(write_tfan(&file.fan), LINE);
    }

    #[test]
    fn parse_errors_carry_positions() {
        let err = read_tfan("{\n  \"format\": \"tfan/1\",\n  \"ambient_rank\": 2,\n  \"rays\": [[1, 0]]\n}").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
        let err = read_tfan(r#"{"format":"tfan/1","ambient_rank":1,"rays":[["01"]],"cones":[]}"#).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = read_tfan(r#"{"format":"tfan/1","ambient_rank":1,"rays":[],"cones":[],"extra":1}"#).unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
    }

    #[test]
    fn semantic_errors_are_named() {
        let bad = r#"{"format":"tfan/1","ambient_rank":2,"rays":[["2","0"]],"cones":[{"rays":[0]}]}"#;
        assert!(matches!(read_tfan(bad), Err(Error::NonPrimitiveRay { index: 0 })));
        let wrong_tag = r#"{"format":"tfan/2","ambient_rank":0,"rays":[],"cones":[]}"#;
        assert!(matches!(read_tfan(wrong_tag), Err(Error::InvalidDocument(_))));
    }

    #[test]
    fn pl_functions_and_faces() {
        let doc = r#"{"format":"tfan/1","ambient_rank":2,
            "rays":[["1","0"],["0","1"],["-1","-1"]],
            "cones":[{"rays":[0,1]},{"rays":[0,2]},{"rays":[1,2]},{"rays":[0],"maximal":false}],
            "pl_functions":[{"name":"minxy0","ray_values":["0","0","-1"]},
                            {"name":"x","covectors":{"0":["1","0"],"1":["1","0"],"2":["1","0"]}}]}"#;
        let file = read_tfan(doc).unwrap();
        let f = file.fan.fan();
        assert_eq!(file.pl("minxy0").unwrap().eval(f, &vector(&[2, 3])).unwrap(), BigInt::from(0));
        assert_eq!(file.pl("x").unwrap().eval(f, &vector(&[-2, 3])).unwrap(), BigInt::from(-2));
        let text = write_document(&to_document(&file.fan, &file.pl_functions, &file.metadata));
        let again = read_tfan(&text).unwrap();
        assert_eq!(write_document(&to_document(&again.fan, &again.pl_functions, &again.metadata)), text);
    }

    #[test]
    fn matroid_documents() {
        let m = read_matroid(r#"{"uniform":[2,4]}"#).unwrap();
        assert_eq!(m.bases().len(), 6);
        let m = read_matroid(r#"{"ground_size":3,"bases":[[0,1],[0,2],[1,2]]}"#).unwrap();
        assert_eq!(m.rank(), 2);
        assert!(read_matroid(r#"{"uniform":[2,4],"ground_size":4}"#).is_err());
    }
}
