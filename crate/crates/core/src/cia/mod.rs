//! GSN impact assessment, for one product and lifted to a product line.
//!
//! Both pipelines run the same steps:
//!
//! 1. restrict the traceability relation to links leaving changed elements;
//! 2. slice the original system by deleted ∪ modified elements and the
//!    changed system by added ∪ modified elements;
//! 3. trace both slices to GSN elements through the full relation (recheck);
//! 4. trace deleted elements through the restricted relation (revise);
//! 5. take direct supports of the revise set, then the transitive support
//!    closure of everything to recheck;
//! 6. annotate: revise wins over recheck, which wins over reuse.

mod output;

use std::collections::BTreeMap;

use crate::model::{
    validate, AnnotatedResult, Annotation, Delta, Diagnostic, ElemId, GsnModel, Link, ProductDelta,
    ProductInputs, SplInputs, SysModel, TraceRel,
};
use crate::pcalc::{Config, FeatureSpace, Formula, PcError};
use crate::slicer::{slice_lifted, slice_plain, SliceDepth, SliceError, SlicerConfig};
use crate::vset::{PlainSet, Project, VSet};

pub use output::{LinkEntry, PcEntry, ResultFile, TraceFile};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CiaError {
    #[error(transparent)]
    Slice(#[from] SliceError),
    #[error("`{0}` is not an element of the GSN model")]
    UnknownElement(ElemId),
    #[error("inputs failed validation with {} error(s)", .0.iter().filter(|d| d.is_error()).count())]
    ValidationFailed(Vec<Diagnostic>),
    #[error(transparent)]
    Pc(#[from] PcError),
}

/// Intermediate sets of a single-product run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ProductTrace {
    pub restricted: PlainSet<Link>,
    pub c1dm: PlainSet<ElemId>,
    pub c1am: PlainSet<ElemId>,
    pub c2recheck: PlainSet<ElemId>,
    pub c2revise: PlainSet<ElemId>,
    pub c3recheck1: PlainSet<ElemId>,
    pub c3recheck2: PlainSet<ElemId>,
}

impl ProductTrace {
    /// Names of the intermediates that differ from `other`.
    pub fn differences(&self, other: &ProductTrace) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.restricted != other.restricted {
            out.push("R_restricted");
        }
        for (name, a, b) in [
            ("C1dm", &self.c1dm, &other.c1dm),
            ("C1am", &self.c1am, &other.c1am),
            ("C2recheck", &self.c2recheck, &other.c2recheck),
            ("C2revise", &self.c2revise, &other.c2revise),
            ("C3recheck1", &self.c3recheck1, &other.c3recheck1),
            ("C3recheck2", &self.c3recheck2, &other.c3recheck2),
        ] {
            if a != b {
                out.push(name);
            }
        }
        out
    }
}

/// Intermediate sets of a lifted run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LiftedTrace {
    pub restricted: TraceRel,
    pub c1dm: VSet<ElemId>,
    pub c1am: VSet<ElemId>,
    pub c2recheck: VSet<ElemId>,
    pub c2revise: VSet<ElemId>,
    pub c3recheck1: VSet<ElemId>,
    pub c3recheck2: VSet<ElemId>,
}

impl Project for LiftedTrace {
    type Product = ProductTrace;

    fn project(&self, rho: &Config) -> ProductTrace {
        ProductTrace {
            restricted: self.restricted.project(rho),
            c1dm: self.c1dm.project(rho),
            c1am: self.c1am.project(rho),
            c2recheck: self.c2recheck.project(rho),
            c2revise: self.c2revise.project(rho),
            c3recheck1: self.c3recheck1.project(rho),
            c3recheck2: self.c3recheck2.project(rho),
        }
    }
}

pub fn restrict(trace: &PlainSet<Link>, delta: &ProductDelta) -> PlainSet<Link> {
    trace
        .iter()
        .filter(|(s, _)| {
            delta.added.contains(s) || delta.deleted.contains(s) || delta.modified.contains(s)
        })
        .cloned()
        .collect()
}

/// `result(s, g) = t(s, g) ∧ (added(s) ∨ deleted(s) ∨ modified(s))`.
pub fn restrict_lifted(trace: &TraceRel, delta: &Delta) -> TraceRel {
    let relevant = delta.added.union(&delta.deleted).union(&delta.modified);
    trace
        .iter()
        .map(|(link, pc)| (link.clone(), pc.and(&relevant.pc(&link.0))))
        .collect()
}

pub fn trace(links: &PlainSet<Link>, es: &PlainSet<ElemId>) -> PlainSet<ElemId> {
    links
        .iter()
        .filter(|(s, _)| es.contains(s))
        .map(|(_, g)| g.clone())
        .collect()
}

/// `result(g) = ⋁_s es(s) ∧ t(s, g)`.
pub fn trace_lifted(links: &TraceRel, es: &VSet<ElemId>) -> VSet<ElemId> {
    links
        .iter()
        .map(|((s, g), pc)| (g.clone(), es.pc(s).and(pc)))
        .collect()
}

pub fn create_annotation(
    gsn: &PlainSet<ElemId>,
    recheck: &PlainSet<ElemId>,
    revise: &PlainSet<ElemId>,
) -> Result<BTreeMap<ElemId, Annotation>, CiaError> {
    if let Some(unknown) = recheck.iter().chain(revise).find(|g| !gsn.contains(*g)) {
        return Err(CiaError::UnknownElement(unknown.clone()));
    }
    Ok(gsn
        .iter()
        .map(|g| {
            let a = if revise.contains(g) {
                Annotation::Revise
            } else if recheck.contains(g) {
                Annotation::Recheck
            } else {
                Annotation::Reuse
            };
            (g.clone(), a)
        })
        .collect())
}

/// Lifted annotation built from lifted set operations only.
pub fn create_annotation_lifted(
    gsn: &VSet<ElemId>,
    recheck: &VSet<ElemId>,
    revise: &VSet<ElemId>,
) -> AnnotatedResult {
    let revised = gsn.inter(revise);
    let rechecked = gsn.inter(recheck).diff(revise);
    let reused = gsn.diff(recheck).diff(revise);
    let tag = |s: &VSet<ElemId>, a: Annotation| s.image(move |g| (g.clone(), a));
    AnnotatedResult {
        entries: tag(&revised, Annotation::Revise)
            .union(&tag(&rechecked, Annotation::Recheck))
            .union(&tag(&reused, Annotation::Reuse)),
    }
}

/// Single-product impact assessment.
pub fn gsn_ia(
    inputs: &ProductInputs,
    config: &SlicerConfig,
) -> Result<(BTreeMap<ElemId, Annotation>, ProductTrace), CiaError> {
    let d = &inputs.delta;
    let restricted = restrict(&inputs.trace, d);
    let c1dm = slice_plain(
        &inputs.system.elements,
        &inputs.system.impact_edges,
        &d.deleted.union(&d.modified).cloned().collect(),
        config.sys_depth,
    )?;
    let c1am = slice_plain(
        &inputs.system_prime.elements,
        &inputs.system_prime.impact_edges,
        &d.added.union(&d.modified).cloned().collect(),
        config.sys_depth,
    )?;
    let c2recheck = trace(&inputs.trace, &c1dm.union(&c1am).cloned().collect());
    let c2revise = trace(&restricted, &d.deleted);
    let gsn = &inputs.gsn;
    let c3recheck1 = slice_plain(
        &gsn.elements,
        &gsn.support_edges,
        &c2revise,
        SlicerConfig::GSN_V_DEPTH,
    )?;
    let c3recheck2 = slice_plain(
        &gsn.elements,
        &gsn.support_edges,
        &c2recheck.union(&c3recheck1).cloned().collect(),
        SlicerConfig::GSN_R_DEPTH,
    )?;
    let annotations = create_annotation(&gsn.elements, &c3recheck2, &c2revise)?;
    Ok((
        annotations,
        ProductTrace {
            restricted,
            c1dm,
            c1am,
            c2recheck,
            c2revise,
            c3recheck1,
            c3recheck2,
        },
    ))
}

/// The replaceable steps of the lifted pipeline. [`Lifted`] uses the
/// correct liftings; other implementations exist to exercise the oracle.
pub trait LiftedStages: Sync {
    fn restrict(&self, trace: &TraceRel, delta: &Delta) -> TraceRel {
        restrict_lifted(trace, delta)
    }

    /// Slices a system model by the set of changed elements.
    fn slice_system(
        &self,
        model: &SysModel,
        changed: &VSet<ElemId>,
        depth: SliceDepth,
        space: &FeatureSpace,
    ) -> Result<VSet<ElemId>, SliceError> {
        slice_lifted(&model.elements, &model.impact_edges, changed, depth, space)
    }

    fn trace(&self, trace: &TraceRel, es: &VSet<ElemId>) -> VSet<ElemId> {
        trace_lifted(trace, es)
    }

    fn slice_gsn(
        &self,
        model: &GsnModel,
        criterion: &VSet<ElemId>,
        depth: SliceDepth,
        space: &FeatureSpace,
    ) -> Result<VSet<ElemId>, SliceError> {
        slice_lifted(
            &model.elements,
            &model.support_edges,
            criterion,
            depth,
            space,
        )
    }

    fn annotate(
        &self,
        gsn: &GsnModel,
        recheck: &VSet<ElemId>,
        revise: &VSet<ElemId>,
    ) -> AnnotatedResult {
        create_annotation_lifted(&gsn.elements, recheck, revise)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Lifted;

impl LiftedStages for Lifted {}

/// Lifted impact assessment; fails if `inputs` do not validate.
pub fn gsn_ia_lifted(
    inputs: &SplInputs,
    config: &SlicerConfig,
) -> Result<(AnnotatedResult, LiftedTrace), CiaError> {
    gsn_ia_lifted_with(inputs, config, &Lifted)
}

pub fn gsn_ia_lifted_with(
    inputs: &SplInputs,
    config: &SlicerConfig,
    stages: &dyn LiftedStages,
) -> Result<(AnnotatedResult, LiftedTrace), CiaError> {
    let diagnostics = validate(inputs);
    if diagnostics.iter().any(Diagnostic::is_error) {
        return Err(CiaError::ValidationFailed(diagnostics));
    }
    run_lifted(inputs, config, stages)
}

pub(crate) fn run_lifted(
    inputs: &SplInputs,
    config: &SlicerConfig,
    stages: &dyn LiftedStages,
) -> Result<(AnnotatedResult, LiftedTrace), CiaError> {
    let space = &inputs.space;
    let d = &inputs.delta;
    let restricted = stages.restrict(&inputs.trace, d);
    let c1dm = stages.slice_system(
        &inputs.system,
        &d.deleted.union(&d.modified),
        config.sys_depth,
        space,
    )?;
    let c1am = stages.slice_system(
        &inputs.system_prime,
        &d.added.union(&d.modified),
        config.sys_depth,
        space,
    )?;
    let c2recheck = stages.trace(&inputs.trace, &c1dm.union(&c1am));
    let c2revise = stages.trace(&restricted, &d.deleted);
    let c3recheck1 = stages.slice_gsn(&inputs.gsn, &c2revise, SlicerConfig::GSN_V_DEPTH, space)?;
    let c3recheck2 = stages.slice_gsn(
        &inputs.gsn,
        &c2recheck.union(&c3recheck1),
        SlicerConfig::GSN_R_DEPTH,
        space,
    )?;
    let result = stages.annotate(&inputs.gsn, &c3recheck2, &c2revise);
    Ok((
        result,
        LiftedTrace {
            restricted,
            c1dm,
            c1am,
            c2recheck,
            c2revise,
            c3recheck1,
            c3recheck2,
        },
    ))
}

/// Conditions under which each element is in each annotation class,
/// checked to partition every element's presence condition.
pub fn check_partition(
    result: &AnnotatedResult,
    gsn: &VSet<ElemId>,
    space: &FeatureSpace,
) -> Result<bool, PcError> {
    for (g, pc) in gsn.iter() {
        let parts: Vec<Formula> = Annotation::ALL.iter().map(|a| result.pc(g, *a)).collect();
        if !space.equiv(&Formula::any(&parts), pc)? {
            return Ok(false);
        }
        for i in 0..parts.len() {
            for j in i + 1..parts.len() {
                if space.sat(&parts[i].and(&parts[j]))? {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}
