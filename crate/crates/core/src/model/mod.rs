//! Annotated product-line inputs for impact assessment: system models before
//! and after a change, the GSN safety case, the traceability relation and
//! the change delta. Each lifted type projects onto its single-product
//! counterpart through [`Project`].

mod file;
mod validate;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::pcalc::{Config, FeatureSpace, PcError};
use crate::vset::{PlainSet, Project, VSet};

pub use file::{load_inputs, ModelError, ModelFile};
pub use validate::{validate, Diagnostic, Severity};

/// Identifier of a system-model or GSN element.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElemId(Arc<str>);

impl ElemId {
    pub fn new(id: &str) -> Self {
        ElemId(Arc::from(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for ElemId {
    fn from(id: &str) -> Self {
        ElemId::new(id)
    }
}

impl Serialize for ElemId {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

impl fmt::Display for ElemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Ordered pair of element ids: an impact edge, a support edge or a
/// traceability link `(system, gsn)`.
pub type Link = (ElemId, ElemId);

pub type TraceRel = VSet<Link>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GsnKind {
    #[serde(alias = "Goal")]
    Goal,
    #[serde(alias = "Strategy")]
    Strategy,
    #[serde(alias = "Solution")]
    Solution,
    #[serde(alias = "Context")]
    Context,
}

/// Elements plus directed impact edges: a change to `src` may impact `dst`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SysModel {
    pub elements: VSet<ElemId>,
    pub impact_edges: VSet<Link>,
}

/// Safety case with parent → child "supported by" edges.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GsnModel {
    pub elements: VSet<ElemId>,
    pub kinds: BTreeMap<ElemId, GsnKind>,
    pub support_edges: VSet<Link>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Delta {
    pub added: VSet<ElemId>,
    pub deleted: VSet<ElemId>,
    pub modified: VSet<ElemId>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplInputs {
    pub space: FeatureSpace,
    pub system: SysModel,
    pub system_prime: SysModel,
    pub gsn: GsnModel,
    pub trace: TraceRel,
    pub delta: Delta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Annotation {
    Revise,
    Recheck,
    Reuse,
}

impl Annotation {
    pub const ALL: [Annotation; 3] = [Annotation::Revise, Annotation::Recheck, Annotation::Reuse];
}

impl fmt::Display for Annotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Annotation::Revise => "revise",
            Annotation::Recheck => "recheck",
            Annotation::Reuse => "reuse",
        })
    }
}

/// Lifted annotation map: `(element, annotation)` pairs with the
/// configurations in which the element carries that annotation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AnnotatedResult {
    pub entries: VSet<(ElemId, Annotation)>,
}

impl AnnotatedResult {
    pub fn pc(&self, id: &ElemId, annotation: Annotation) -> crate::pcalc::Formula {
        self.entries.pc(&(id.clone(), annotation))
    }

    /// Elements carrying `annotation` in some configuration, with its condition.
    pub fn with_annotation(&self, annotation: Annotation) -> VSet<ElemId> {
        self.entries
            .iter()
            .filter(|((_, a), _)| *a == annotation)
            .map(|((id, _), pc)| (id.clone(), pc.clone()))
            .collect()
    }
}

impl Project for AnnotatedResult {
    type Product = PlainSet<(ElemId, Annotation)>;

    fn project(&self, rho: &Config) -> Self::Product {
        self.entries.project(rho)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ProductSysModel {
    pub elements: PlainSet<ElemId>,
    pub impact_edges: PlainSet<Link>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ProductGsnModel {
    pub elements: PlainSet<ElemId>,
    pub kinds: BTreeMap<ElemId, GsnKind>,
    pub support_edges: PlainSet<Link>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ProductDelta {
    pub added: PlainSet<ElemId>,
    pub deleted: PlainSet<ElemId>,
    pub modified: PlainSet<ElemId>,
}

/// Inputs of the single-product algorithm.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ProductInputs {
    pub system: ProductSysModel,
    pub system_prime: ProductSysModel,
    pub gsn: ProductGsnModel,
    pub trace: PlainSet<Link>,
    pub delta: ProductDelta,
}

impl Project for SysModel {
    type Product = ProductSysModel;

    fn project(&self, rho: &Config) -> ProductSysModel {
        ProductSysModel {
            elements: self.elements.project(rho),
            impact_edges: self.impact_edges.project(rho),
        }
    }
}

impl Project for GsnModel {
    type Product = ProductGsnModel;

    fn project(&self, rho: &Config) -> ProductGsnModel {
        let elements = self.elements.project(rho);
        let kinds = self
            .kinds
            .iter()
            .filter(|(id, _)| elements.contains(*id))
            .map(|(id, k)| (id.clone(), *k))
            .collect();
        ProductGsnModel {
            elements,
            kinds,
            support_edges: self.support_edges.project(rho),
        }
    }
}

impl Project for Delta {
    type Product = ProductDelta;

    fn project(&self, rho: &Config) -> ProductDelta {
        ProductDelta {
            added: self.added.project(rho),
            deleted: self.deleted.project(rho),
            modified: self.modified.project(rho),
        }
    }
}

impl Project for SplInputs {
    type Product = ProductInputs;

    fn project(&self, rho: &Config) -> ProductInputs {
        ProductInputs {
            system: self.system.project(rho),
            system_prime: self.system_prime.project(rho),
            gsn: self.gsn.project(rho),
            trace: self.trace.project(rho),
            delta: self.delta.project(rho),
        }
    }
}

/// The single product selected by `rho`.
pub fn index_inputs(inputs: &SplInputs, rho: &Config) -> Result<ProductInputs, PcError> {
    inputs.space.require_valid(rho)?;
    Ok(inputs.project(rho))
}
