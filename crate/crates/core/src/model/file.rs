//! JSON model files.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{
    Delta, ElemId, GsnKind, GsnModel, Link, ProductInputs, ProductSysModel, SplInputs, SysModel,
};
use crate::pcalc::{Feature, FeatureSpace, Formula, PcError};
use crate::vset::VSet;

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("cannot read {}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed model file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid feature declaration: {0}")]
    Features(#[source] PcError),
    #[error("{location}: {source}")]
    Pc {
        location: String,
        #[source]
        source: PcError,
    },
    #[error("{location}: reference to unknown element `{id}`")]
    DanglingReference { location: String, id: String },
    #[error("{location}: duplicate element `{id}`")]
    DuplicateElement { location: String, id: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElemEntry {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pc: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeEntry {
    pub src: String,
    pub dst: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pc: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    #[serde(default)]
    pub elements: Vec<ElemEntry>,
    #[serde(default)]
    pub impact_edges: Vec<EdgeEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GsnElemEntry {
    pub id: String,
    pub kind: GsnKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pc: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupportEntry {
    pub parent: String,
    pub child: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pc: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GsnSection {
    #[serde(default)]
    pub elements: Vec<GsnElemEntry>,
    #[serde(default)]
    pub support_edges: Vec<SupportEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkEntry {
    pub sys: String,
    pub gsn: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pc: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeltaSection {
    #[serde(default)]
    pub added: Vec<ElemEntry>,
    #[serde(default)]
    pub deleted: Vec<ElemEntry>,
    #[serde(default)]
    pub modified: Vec<ElemEntry>,
}

/// On-disk layout of [`SplInputs`]. Omitted `pc` fields mean `true`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub features: Vec<String>,
    #[serde(default = "default_pc")]
    pub feature_model: String,
    pub system: SystemSection,
    pub system_prime: SystemSection,
    pub gsn: GsnSection,
    #[serde(default)]
    pub trace: Vec<LinkEntry>,
    #[serde(default)]
    pub delta: DeltaSection,
}

fn default_pc() -> String {
    "true".to_string()
}

fn render_pc(f: &Formula) -> Option<String> {
    (!f.is_true()).then(|| f.to_string())
}

pub fn load_inputs(path: impl AsRef<Path>) -> Result<SplInputs, ModelError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ModelError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    ModelFile::parse(&text)?.build()
}

impl ModelFile {
    pub fn parse(text: &str) -> Result<ModelFile, ModelError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("model file serializes");
        s.push('\n');
        s
    }

    /// Parses every condition and resolves every reference.
    pub fn build(&self) -> Result<SplInputs, ModelError> {
        let features = self
            .features
            .iter()
            .map(|n| Feature::new(n))
            .collect::<Result<Vec<_>, _>>()
            .map_err(ModelError::Features)?;
        let known: BTreeSet<&str> = self.features.iter().map(String::as_str).collect();
        let fm = crate::pcalc::parse_formula(&self.feature_model, &|n| known.contains(n)).map_err(
            |source| ModelError::Pc {
                location: "feature_model".into(),
                source,
            },
        )?;
        let space = FeatureSpace::new(features, fm).map_err(ModelError::Features)?;

        let pc = |location: String, text: &Option<String>| -> Result<Formula, ModelError> {
            match text {
                None => Ok(Formula::True),
                Some(t) => space
                    .parse(t)
                    .map_err(|source| ModelError::Pc { location, source }),
            }
        };

        let (system, sys_ids) = build_system(&self.system, "system", &pc)?;
        let (system_prime, prime_ids) = build_system(&self.system_prime, "system_prime", &pc)?;

        let mut gsn = GsnModel::default();
        for (i, e) in self.gsn.elements.iter().enumerate() {
            let loc = format!("gsn.elements[{i}]");
            let id = ElemId::new(&e.id);
            if gsn.kinds.insert(id.clone(), e.kind).is_some() {
                return Err(ModelError::DuplicateElement {
                    location: loc,
                    id: e.id.clone(),
                });
            }
            gsn.elements.insert(id, pc(format!("{loc}.pc"), &e.pc)?);
        }
        for (i, e) in self.gsn.support_edges.iter().enumerate() {
            let loc = format!("gsn.support_edges[{i}]");
            let link = (
                resolve(&gsn.kinds, &e.parent, &loc)?,
                resolve(&gsn.kinds, &e.child, &loc)?,
            );
            gsn.support_edges
                .insert(link, pc(format!("{loc}.pc"), &e.pc)?);
        }

        let mut trace = VSet::new();
        for (i, l) in self.trace.iter().enumerate() {
            let loc = format!("trace[{i}]");
            let link = (
                resolve(&sys_ids, &l.sys, &loc)?,
                resolve(&gsn.kinds, &l.gsn, &loc)?,
            );
            trace.insert(link, pc(format!("{loc}.pc"), &l.pc)?);
        }

        let mut delta = Delta::default();
        for (name, entries, target, known) in [
            ("added", &self.delta.added, &mut delta.added, &prime_ids),
            ("deleted", &self.delta.deleted, &mut delta.deleted, &sys_ids),
            (
                "modified",
                &self.delta.modified,
                &mut delta.modified,
                &sys_ids,
            ),
        ] {
            for (i, e) in entries.iter().enumerate() {
                let loc = format!("delta.{name}[{i}]");
                let id = resolve(known, &e.id, &loc)?;
                target.insert(id, pc(format!("{loc}.pc"), &e.pc)?);
            }
        }

        Ok(SplInputs {
            space,
            system,
            system_prime,
            gsn,
            trace,
            delta,
        })
    }

    pub fn from_inputs(inputs: &SplInputs) -> ModelFile {
        let elems = |s: &VSet<ElemId>| -> Vec<ElemEntry> {
            s.iter()
                .map(|(id, f)| ElemEntry {
                    id: id.to_string(),
                    pc: render_pc(f),
                })
                .collect()
        };
        let system = |m: &SysModel| SystemSection {
            elements: elems(&m.elements),
            impact_edges: m
                .impact_edges
                .iter()
                .map(|((s, d), f)| EdgeEntry {
                    src: s.to_string(),
                    dst: d.to_string(),
                    pc: render_pc(f),
                })
                .collect(),
        };
        ModelFile {
            features: inputs
                .space
                .features()
                .iter()
                .map(|f| f.name().to_string())
                .collect(),
            feature_model: inputs.space.feature_model().to_string(),
            system: system(&inputs.system),
            system_prime: system(&inputs.system_prime),
            gsn: GsnSection {
                elements: inputs
                    .gsn
                    .kinds
                    .iter()
                    .map(|(id, kind)| GsnElemEntry {
                        id: id.to_string(),
                        kind: *kind,
                        pc: render_pc(&inputs.gsn.elements.pc(id)),
                    })
                    .collect(),
                support_edges: inputs
                    .gsn
                    .support_edges
                    .iter()
                    .map(|((p, c), f)| SupportEntry {
                        parent: p.to_string(),
                        child: c.to_string(),
                        pc: render_pc(f),
                    })
                    .collect(),
            },
            trace: inputs
                .trace
                .iter()
                .map(|((s, g), f)| LinkEntry {
                    sys: s.to_string(),
                    gsn: g.to_string(),
                    pc: render_pc(f),
                })
                .collect(),
            delta: DeltaSection {
                added: elems(&inputs.delta.added),
                deleted: elems(&inputs.delta.deleted),
                modified: elems(&inputs.delta.modified),
            },
        }
    }

    /// A single product as a model file: every condition is `true`.
    pub fn from_product(product: &ProductInputs, space: &FeatureSpace) -> ModelFile {
        let elems = |s: &BTreeSet<ElemId>| -> Vec<ElemEntry> {
            s.iter()
                .map(|id| ElemEntry {
                    id: id.to_string(),
                    pc: None,
                })
                .collect()
        };
        let system = |m: &ProductSysModel| SystemSection {
            elements: elems(&m.elements),
            impact_edges: m
                .impact_edges
                .iter()
                .map(|(s, d)| EdgeEntry {
                    src: s.to_string(),
                    dst: d.to_string(),
                    pc: None,
                })
                .collect(),
        };
        ModelFile {
            features: space
                .features()
                .iter()
                .map(|f| f.name().to_string())
                .collect(),
            feature_model: space.feature_model().to_string(),
            system: system(&product.system),
            system_prime: system(&product.system_prime),
            gsn: GsnSection {
                elements: product
                    .gsn
                    .kinds
                    .iter()
                    .map(|(id, kind)| GsnElemEntry {
                        id: id.to_string(),
                        kind: *kind,
                        pc: None,
                    })
                    .collect(),
                support_edges: product
                    .gsn
                    .support_edges
                    .iter()
                    .map(|(p, c)| SupportEntry {
                        parent: p.to_string(),
                        child: c.to_string(),
                        pc: None,
                    })
                    .collect(),
            },
            trace: product
                .trace
                .iter()
                .map(|(s, g)| LinkEntry {
                    sys: s.to_string(),
                    gsn: g.to_string(),
                    pc: None,
                })
                .collect(),
            delta: DeltaSection {
                added: elems(&product.delta.added),
                deleted: elems(&product.delta.deleted),
                modified: elems(&product.delta.modified),
            },
        }
    }
}

/// Builds a system model and returns it with its declared ids, which include
/// elements whose condition is `false` and thus absent from the element map.
type PcParser<'a> = dyn Fn(String, &Option<String>) -> Result<Formula, ModelError> + 'a;

fn build_system(
    section: &SystemSection,
    name: &str,
    pc: &PcParser<'_>,
) -> Result<(SysModel, BTreeMap<ElemId, ()>), ModelError> {
    let mut model = SysModel::default();
    let mut declared = BTreeMap::new();
    for (i, e) in section.elements.iter().enumerate() {
        let loc = format!("{name}.elements[{i}]");
        let id = ElemId::new(&e.id);
        if declared.insert(id.clone(), ()).is_some() {
            return Err(ModelError::DuplicateElement {
                location: loc,
                id: e.id.clone(),
            });
        }
        model.elements.insert(id, pc(format!("{loc}.pc"), &e.pc)?);
    }
    for (i, e) in section.impact_edges.iter().enumerate() {
        let loc = format!("{name}.impact_edges[{i}]");
        let link: Link = (
            resolve(&declared, &e.src, &loc)?,
            resolve(&declared, &e.dst, &loc)?,
        );
        model
            .impact_edges
            .insert(link, pc(format!("{loc}.pc"), &e.pc)?);
    }
    Ok((model, declared))
}

fn resolve<V>(known: &BTreeMap<ElemId, V>, id: &str, location: &str) -> Result<ElemId, ModelError> {
    let id = ElemId::new(id);
    if known.contains_key(&id) {
        Ok(id)
    } else {
        Err(ModelError::DanglingReference {
            location: location.to_string(),
            id: id.to_string(),
        })
    }
}
