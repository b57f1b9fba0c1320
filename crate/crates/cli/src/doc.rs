//! JSON document schema for fusion systems and weight assignments, with
//! conversions to and from the core types.

use std::collections::BTreeMap;
use std::fmt;

use bmpa_core::fusion::{Completeness, FusionSystem, Multiplicity, SystemBuilder};
use bmpa_core::perturb::{Constituent, DimensionData};
use bmpa_core::Dims;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub const SCHEMA_VERSION: u32 = 1;

/// Serialized fusion system, optionally carrying dimension data, bridge
/// generators, and a source descriptor.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDocument {
    pub schema_version: u32,
    pub algebras: Vec<String>,
    pub objects: Vec<ObjectDoc>,
    pub tensor: Vec<EntryDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<String>,
    pub completeness: CompletenessDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gen_ab: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gen_bc: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<Vec<DimDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<serde_json::Value>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectDoc {
    pub id: String,
    pub left: String,
    pub right: String,
    pub dual: String,
    pub unit: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryDoc {
    pub a: String,
    pub b: String,
    pub contains: Vec<ContainsDoc>,
    pub truncated: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContainsDoc {
    pub c: String,
    pub mult: MultDoc,
}

/// Multiplicity: an exact count, or `"?"` for support-only tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MultDoc {
    Known(u32),
    Unknown,
}

impl Serialize for MultDoc {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            MultDoc::Known(m) => s.serialize_u32(*m),
            MultDoc::Unknown => s.serialize_str("?"),
        }
    }
}

impl<'de> Deserialize<'de> for MultDoc {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = MultDoc;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a positive integer or \"?\"")
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<MultDoc, E> {
                u32::try_from(v)
                    .map(MultDoc::Known)
                    .map_err(|_| E::custom("multiplicity does not fit in 32 bits"))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<MultDoc, E> {
                if v == "?" {
                    Ok(MultDoc::Unknown)
                } else {
                    Err(E::custom(format!("unknown multiplicity marker `{v}`")))
                }
            }
        }
        d.deserialize_any(V)
    }
}

/// Completeness: the literal `"complete"` or `{"truncated": depth}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CompletenessDoc {
    Complete,
    Truncated(u32),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimDoc {
    pub id: String,
    pub left: f64,
    pub right: f64,
    pub mult: u32,
}

/// Weight assignment on object ids.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightDocument {
    pub schema_version: u32,
    pub weights: BTreeMap<String, f64>,
}

/// A parsed document with its derived core values.
pub struct Parsed {
    pub document: SystemDocument,
    pub system: FusionSystem,
    pub dims: Option<Dims>,
}

impl From<MultDoc> for Multiplicity {
    fn from(m: MultDoc) -> Multiplicity {
        match m {
            MultDoc::Known(v) => Multiplicity::Known(v),
            MultDoc::Unknown => Multiplicity::Unknown,
        }
    }
}

impl From<Multiplicity> for MultDoc {
    fn from(m: Multiplicity) -> MultDoc {
        match m {
            Multiplicity::Known(v) => MultDoc::Known(v),
            Multiplicity::Unknown => MultDoc::Unknown,
        }
    }
}

/// Builds the core system (and dimension data) from a parsed document.
pub fn to_core(document: SystemDocument) -> Result<Parsed, String> {
    if document.schema_version != SCHEMA_VERSION {
        return Err(format!(
            "unsupported schema_version {} (expected {})",
            document.schema_version, SCHEMA_VERSION
        ));
    }
    let mut b = SystemBuilder::new();
    for a in &document.algebras {
        b.algebra(a);
    }
    for o in &document.objects {
        b.object(&o.id, &o.left, &o.right, &o.dual, o.unit);
    }
    for e in &document.tensor {
        let contains = e
            .contains
            .iter()
            .map(|c| (c.c.clone(), c.mult.into()))
            .collect();
        b.entry(&e.a, &e.b, contains, e.truncated);
    }
    if let Some(g) = &document.generator {
        b.generator(g);
    }
    b.completeness(match document.completeness {
        CompletenessDoc::Complete => Completeness::Complete,
        CompletenessDoc::Truncated(d) => Completeness::Truncated(d),
    });
    let system = b.finish().map_err(|e| e.to_string())?;
    let dims = match &document.dims {
        None => None,
        Some(rows) => {
            for row in rows {
                if system.index_of(&row.id).is_none() {
                    return Err(format!("dims row names unknown object `{}`", row.id));
                }
            }
            Some(
                DimensionData::new(
                    rows.iter()
                        .map(|r| Constituent {
                            id: r.id.clone(),
                            dim_left: r.left,
                            dim_right: r.right,
                            mult: r.mult,
                        })
                        .collect(),
                )
                .map_err(|e| e.to_string())?,
            )
        }
    };
    for gen in [&document.gen_ab, &document.gen_bc].into_iter().flatten() {
        if system.index_of(gen).is_none() {
            return Err(format!("bridge generator `{gen}` is not an object"));
        }
    }
    Ok(Parsed {
        document,
        system,
        dims,
    })
}

/// Parses document text, reporting serde errors with their positions.
pub fn parse_system(text: &str) -> Result<Parsed, String> {
    let document: SystemDocument =
        serde_json::from_str(text).map_err(|e| e.to_string())?;
    to_core(document)
}

pub fn parse_weights(text: &str) -> Result<BTreeMap<String, f64>, String> {
    let doc: WeightDocument = serde_json::from_str(text).map_err(|e| e.to_string())?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(format!(
            "unsupported schema_version {} (expected {})",
            doc.schema_version, SCHEMA_VERSION
        ));
    }
    Ok(doc.weights)
}

/// Renders a core system back into document form.
pub fn from_core(
    sys: &FusionSystem,
    dims: Option<&Dims>,
    gens: Option<(&str, &str)>,
    metadata: Option<serde_json::Value>,
) -> SystemDocument {
    let objects = sys
        .objects()
        .iter()
        .map(|o| ObjectDoc {
            id: o.id.clone(),
            left: sys.algebras()[o.left].clone(),
            right: sys.algebras()[o.right].clone(),
            dual: sys.object(o.dual).id.clone(),
            unit: o.unit,
        })
        .collect();
    let tensor = sys
        .entries()
        .map(|((a, b), e)| EntryDoc {
            a: sys.object(*a).id.clone(),
            b: sys.object(*b).id.clone(),
            contains: e
                .constituents
                .iter()
                .map(|&(c, m)| ContainsDoc {
                    c: sys.object(c).id.clone(),
                    mult: m.into(),
                })
                .collect(),
            truncated: e.truncated,
        })
        .collect();
    SystemDocument {
        schema_version: SCHEMA_VERSION,
        algebras: sys.algebras().to_vec(),
        objects,
        tensor,
        generator: sys.generator().map(|g| sys.object(g).id.clone()),
        completeness: match sys.completeness() {
            Completeness::Complete => CompletenessDoc::Complete,
            Completeness::Truncated(d) => CompletenessDoc::Truncated(d),
        },
        gen_ab: gens.map(|(a, _)| a.to_string()),
        gen_bc: gens.map(|(_, b)| b.to_string()),
        dims: dims.map(|d| {
            d.constituents()
                .iter()
                .map(|c| DimDoc {
                    id: c.id.clone(),
                    left: crate::report::canon_f64(c.dim_left),
                    right: crate::report::canon_f64(c.dim_right),
                    mult: c.mult,
                })
                .collect()
        }),
        metadata,
    }
}
