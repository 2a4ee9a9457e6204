use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::model::{AnnotatedResult, Annotation, ElemId, Link, TraceRel};
use crate::pcalc::{FeatureSpace, Formula, PcError};
use crate::vset::{PlainSet, VSet};

use super::{LiftedTrace, ProductTrace};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PcEntry {
    pub id: String,
    pub pc: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkEntry {
    pub sys: String,
    pub gsn: String,
    pub pc: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceFile {
    #[serde(rename = "R_restricted")]
    pub r_restricted: Vec<LinkEntry>,
    #[serde(rename = "C1dm")]
    pub c1dm: Vec<PcEntry>,
    #[serde(rename = "C1am")]
    pub c1am: Vec<PcEntry>,
    #[serde(rename = "C2recheck")]
    pub c2recheck: Vec<PcEntry>,
    #[serde(rename = "C2revise")]
    pub c2revise: Vec<PcEntry>,
    #[serde(rename = "C3recheck1")]
    pub c3recheck1: Vec<PcEntry>,
    #[serde(rename = "C3recheck2")]
    pub c3recheck2: Vec<PcEntry>,
}

/// Serialized analysis result. Presence conditions are normalized and
/// entries that hold in no valid configuration are left out.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultFile {
    pub revise: Vec<PcEntry>,
    pub recheck: Vec<PcEntry>,
    pub reuse: Vec<PcEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<TraceFile>,
}

fn elems(set: &VSet<ElemId>, space: &FeatureSpace) -> Result<Vec<PcEntry>, PcError> {
    let mut out = Vec::new();
    for (id, pc) in set.iter() {
        let pc = space.normalize(pc)?;
        if !pc.is_false() {
            out.push(PcEntry {
                id: id.to_string(),
                pc: pc.to_string(),
            });
        }
    }
    Ok(out)
}

fn links(rel: &TraceRel, space: &FeatureSpace) -> Result<Vec<LinkEntry>, PcError> {
    let mut out = Vec::new();
    for ((s, g), pc) in rel.iter() {
        let pc = space.normalize(pc)?;
        if !pc.is_false() {
            out.push(LinkEntry {
                sys: s.to_string(),
                gsn: g.to_string(),
                pc: pc.to_string(),
            });
        }
    }
    Ok(out)
}

fn plain_elems(set: &PlainSet<ElemId>) -> Vec<PcEntry> {
    set.iter()
        .map(|id| PcEntry {
            id: id.to_string(),
            pc: Formula::True.to_string(),
        })
        .collect()
}

impl TraceFile {
    pub fn from_lifted(t: &LiftedTrace, space: &FeatureSpace) -> Result<Self, PcError> {
        Ok(TraceFile {
            r_restricted: links(&t.restricted, space)?,
            c1dm: elems(&t.c1dm, space)?,
            c1am: elems(&t.c1am, space)?,
            c2recheck: elems(&t.c2recheck, space)?,
            c2revise: elems(&t.c2revise, space)?,
            c3recheck1: elems(&t.c3recheck1, space)?,
            c3recheck2: elems(&t.c3recheck2, space)?,
        })
    }

    pub fn from_product(t: &ProductTrace) -> Self {
        let link = |(s, g): &Link| LinkEntry {
            sys: s.to_string(),
            gsn: g.to_string(),
            pc: Formula::True.to_string(),
        };
        TraceFile {
            r_restricted: t.restricted.iter().map(link).collect(),
            c1dm: plain_elems(&t.c1dm),
            c1am: plain_elems(&t.c1am),
            c2recheck: plain_elems(&t.c2recheck),
            c2revise: plain_elems(&t.c2revise),
            c3recheck1: plain_elems(&t.c3recheck1),
            c3recheck2: plain_elems(&t.c3recheck2),
        }
    }
}

impl ResultFile {
    pub fn from_lifted(
        result: &AnnotatedResult,
        trace: Option<&LiftedTrace>,
        space: &FeatureSpace,
    ) -> Result<Self, PcError> {
        let class = |a| elems(&result.with_annotation(a), space);
        Ok(ResultFile {
            revise: class(Annotation::Revise)?,
            recheck: class(Annotation::Recheck)?,
            reuse: class(Annotation::Reuse)?,
            trace: trace
                .map(|t| TraceFile::from_lifted(t, space))
                .transpose()?,
        })
    }

    pub fn from_product(
        result: &BTreeMap<ElemId, Annotation>,
        trace: Option<&ProductTrace>,
    ) -> Self {
        let class = |a| -> Vec<PcEntry> {
            plain_elems(
                &result
                    .iter()
                    .filter(|(_, x)| **x == a)
                    .map(|(g, _)| g.clone())
                    .collect(),
            )
        };
        ResultFile {
            revise: class(Annotation::Revise),
            recheck: class(Annotation::Recheck),
            reuse: class(Annotation::Reuse),
            trace: trace.map(TraceFile::from_product),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("result serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cia::gsn_ia_lifted;
    use crate::model::tests::fixture;
    use crate::slicer::SlicerConfig;

    #[test]
    fn ex1_result_file() {
        let inputs = fixture("lms_ex1.json");
        let (r, t) = gsn_ia_lifted(&inputs, &SlicerConfig::default()).unwrap();
        let file = ResultFile::from_lifted(&r, Some(&t), &inputs.space).unwrap();
        assert!(file.revise.is_empty());
        let recheck: Vec<(&str, &str)> = file
            .recheck
            .iter()
            .map(|e| (e.id.as_str(), e.pc.as_str()))
            .collect();
        assert_eq!(
            recheck,
            [
                ("G19", "Visual"),
                ("G20", "Visual"),
                ("Sn11", "Visual"),
                ("Sn18", "Visual"),
                ("Sn4", "Visual")
            ]
        );
        let g20_reuse = file.reuse.iter().find(|e| e.id == "G20").unwrap();
        assert_eq!(g20_reuse.pc, "!Visual");
        // G18 is reused exactly where it exists
        assert_eq!(
            file.reuse.iter().find(|e| e.id == "G18").unwrap().pc,
            "Audio"
        );
        let trace = file.trace.as_ref().unwrap();
        assert_eq!(trace.r_restricted.len(), 2);
        assert!(trace.c2revise.is_empty());

        let json = file.to_json();
        let back: ResultFile = serde_json::from_str(&json).unwrap();
        assert_eq!(back, file);
        assert!(!ResultFile::from_lifted(&r, None, &inputs.space)
            .unwrap()
            .to_json()
            .contains("trace"));
    }
}
