//! Well-formedness checks for annotated inputs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use super::{ElemId, Link, SplInputs, SysModel};
use crate::pcalc::{FeatureSpace, Formula, PcError};
use crate::vset::VSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: &'static str,
    pub message: String,
    pub location: String,
}

impl Diagnostic {
    fn error(code: &'static str, location: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            code,
            message: message.into(),
            location: location.into(),
        }
    }

    fn warning(
        code: &'static str,
        location: impl Into<String>,
        message: impl Into<String>,
    ) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            code,
            message: message.into(),
            location: location.into(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(
            f,
            "{sev}[{}] {}: {}",
            self.code, self.location, self.message
        )
    }
}

/// Reports every violated invariant of `inputs`. An empty result means the
/// inputs are ready for lifted analysis.
pub fn validate(inputs: &SplInputs) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if let Err(e) = check(inputs, &mut out) {
        let code = match e {
            PcError::TooManyFeatures { .. } => "TOO_MANY_FEATURES",
            PcError::UnknownFeature { .. } => "UNKNOWN_FEATURE",
            _ => "INVALID_PC",
        };
        out.push(Diagnostic::error(code, "features", e.to_string()));
    }
    out
}

fn check(inputs: &SplInputs, out: &mut Vec<Diagnostic>) -> Result<(), PcError> {
    let space = &inputs.space;
    for (location, f) in all_formulas(inputs) {
        if let Err(e) = space.check(f) {
            out.push(Diagnostic::error(
                "UNKNOWN_FEATURE",
                location,
                e.to_string(),
            ));
        }
    }
    if !out.is_empty() {
        return Ok(());
    }
    if !space.sat(space.feature_model())? {
        out.push(Diagnostic::error(
            "VACUOUS_FEATURE_MODEL",
            "feature_model",
            "no configuration satisfies the feature model",
        ));
        return Ok(());
    }

    for (name, model) in [
        ("system", &inputs.system),
        ("system_prime", &inputs.system_prime),
    ] {
        check_elements(space, name, &model.elements, out)?;
        check_edges(space, name, model, out)?;
    }
    check_elements(space, "gsn", &inputs.gsn.elements, out)?;
    for id in inputs.gsn.elements.keys() {
        if !inputs.gsn.kinds.contains_key(id) {
            out.push(Diagnostic::error(
                "MISSING_KIND",
                format!("gsn.elements[{id}]"),
                "GSN element has no kind",
            ));
        }
    }
    for ((parent, child), pc) in inputs.gsn.support_edges.iter() {
        let ends = inputs
            .gsn
            .elements
            .pc(parent)
            .and(&inputs.gsn.elements.pc(child));
        subsumed(
            space,
            pc,
            &ends,
            format!("gsn.support_edges[{parent}->{child}]"),
            "support edge",
            out,
        )?;
    }
    check_acyclic(space, &inputs.gsn.support_edges, out)?;

    for ((sys, gsn), pc) in inputs.trace.iter() {
        let ends = inputs
            .system
            .elements
            .pc(sys)
            .and(&inputs.gsn.elements.pc(gsn));
        subsumed(
            space,
            pc,
            &ends,
            format!("trace[{sys}->{gsn}]"),
            "trace link",
            out,
        )?;
    }

    check_delta(inputs, out)
}

fn all_formulas(inputs: &SplInputs) -> Vec<(String, &Formula)> {
    let mut out = vec![("feature_model".to_string(), inputs.space.feature_model())];
    for (name, m) in [
        ("system", &inputs.system),
        ("system_prime", &inputs.system_prime),
    ] {
        out.extend(
            m.elements
                .iter()
                .map(|(id, f)| (format!("{name}.elements[{id}]"), f)),
        );
        out.extend(
            m.impact_edges
                .iter()
                .map(|((s, d), f)| (format!("{name}.impact_edges[{s}->{d}]"), f)),
        );
    }
    out.extend(
        inputs
            .gsn
            .elements
            .iter()
            .map(|(id, f)| (format!("gsn.elements[{id}]"), f)),
    );
    out.extend(
        inputs
            .gsn
            .support_edges
            .iter()
            .map(|((p, c), f)| (format!("gsn.support_edges[{p}->{c}]"), f)),
    );
    out.extend(
        inputs
            .trace
            .iter()
            .map(|((s, g), f)| (format!("trace[{s}->{g}]"), f)),
    );
    for (name, set) in [
        ("added", &inputs.delta.added),
        ("deleted", &inputs.delta.deleted),
        ("modified", &inputs.delta.modified),
    ] {
        out.extend(
            set.iter()
                .map(move |(id, f)| (format!("delta.{name}[{id}]"), f)),
        );
    }
    out
}

fn subsumed(
    space: &FeatureSpace,
    pc: &Formula,
    bound: &Formula,
    location: String,
    what: &str,
    out: &mut Vec<Diagnostic>,
) -> Result<(), PcError> {
    if !space.entails(pc, bound)? {
        out.push(Diagnostic::error(
            "PC_SUBSUMPTION",
            location,
            format!("{what} condition `{pc}` is not subsumed by `{bound}`"),
        ));
    }
    Ok(())
}

fn check_elements(
    space: &FeatureSpace,
    model: &str,
    elements: &VSet<ElemId>,
    out: &mut Vec<Diagnostic>,
) -> Result<(), PcError> {
    for (id, pc) in elements.iter() {
        if !space.sat(pc)? {
            out.push(Diagnostic::warning(
                "DEAD_ELEMENT",
                format!("{model}.elements[{id}]"),
                format!("condition `{pc}` holds in no valid configuration"),
            ));
        }
    }
    Ok(())
}

fn check_edges(
    space: &FeatureSpace,
    model: &str,
    sys: &SysModel,
    out: &mut Vec<Diagnostic>,
) -> Result<(), PcError> {
    for ((src, dst), pc) in sys.impact_edges.iter() {
        let ends = sys.elements.pc(src).and(&sys.elements.pc(dst));
        subsumed(
            space,
            pc,
            &ends,
            format!("{model}.impact_edges[{src}->{dst}]"),
            "impact edge",
            out,
        )?;
    }
    Ok(())
}

fn check_acyclic(
    space: &FeatureSpace,
    edges: &VSet<Link>,
    out: &mut Vec<Diagnostic>,
) -> Result<(), PcError> {
    let mut adj: BTreeMap<&ElemId, Vec<&ElemId>> = BTreeMap::new();
    for ((p, c), pc) in edges.iter() {
        if space.sat(pc)? {
            adj.entry(p).or_default().push(c);
        }
    }
    // Iterative DFS with white/grey/black marking.
    let mut state: BTreeMap<&ElemId, u8> = BTreeMap::new();
    let mut reported = BTreeSet::new();
    for &root in adj.keys() {
        if state.contains_key(root) {
            continue;
        }
        let mut stack: Vec<(&ElemId, usize)> = vec![(root, 0)];
        state.insert(root, 1);
        while let Some((node, next)) = stack.pop() {
            let children = adj.get(node).map(Vec::as_slice).unwrap_or(&[]);
            if next < children.len() {
                stack.push((node, next + 1));
                let child = children[next];
                match state.get(child) {
                    None => {
                        state.insert(child, 1);
                        stack.push((child, 0));
                    }
                    Some(1) if reported.insert(child) => {
                        out.push(Diagnostic::error(
                            "GSN_CYCLE",
                            format!("gsn.support_edges[{node}->{child}]"),
                            format!("support graph has a cycle through `{child}`"),
                        ));
                    }
                    _ => {}
                }
            } else {
                state.insert(node, 2);
            }
        }
    }
    Ok(())
}

fn check_delta(inputs: &SplInputs, out: &mut Vec<Diagnostic>) -> Result<(), PcError> {
    let space = &inputs.space;
    let delta = &inputs.delta;
    let s = &inputs.system.elements;
    let sp = &inputs.system_prime.elements;

    for (id, pc) in delta.deleted.iter() {
        subsumed(
            space,
            pc,
            &s.pc(id),
            format!("delta.deleted[{id}]"),
            "deletion",
            out,
        )?;
        if sp.is_mapped(id) {
            out.push(Diagnostic::error(
                "DELTA_PRESENCE",
                format!("delta.deleted[{id}]"),
                "deleted element still present in the changed system model",
            ));
        }
    }
    for (id, pc) in delta.modified.iter() {
        let both = s.pc(id).and(&sp.pc(id));
        subsumed(
            space,
            pc,
            &both,
            format!("delta.modified[{id}]"),
            "modification",
            out,
        )?;
    }
    for (id, pc) in delta.added.iter() {
        subsumed(
            space,
            pc,
            &sp.pc(id),
            format!("delta.added[{id}]"),
            "addition",
            out,
        )?;
        if s.is_mapped(id) {
            out.push(Diagnostic::error(
                "DELTA_PRESENCE",
                format!("delta.added[{id}]"),
                "added element already present in the original system model",
            ));
        }
    }
    for (a_name, a, b_name, b) in [
        ("added", &delta.added, "deleted", &delta.deleted),
        ("added", &delta.added, "modified", &delta.modified),
        ("deleted", &delta.deleted, "modified", &delta.modified),
    ] {
        for (id, pc) in a.iter() {
            let both = pc.and(&b.pc(id));
            if space.sat(&both)? {
                out.push(Diagnostic::error(
                    "DELTA_OVERLAP",
                    format!("delta.{a_name}[{id}]"),
                    format!("`{id}` is both {a_name} and {b_name} in some configuration"),
                ));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::fixture;

    fn codes(d: &[Diagnostic]) -> Vec<&'static str> {
        d.iter().filter(|d| d.is_error()).map(|d| d.code).collect()
    }

    #[test]
    fn clean_fixture() {
        assert!(validate(&fixture("lms_ex1.json")).is_empty());
    }

    #[test]
    fn link_broader_than_endpoint() {
        let mut inputs = fixture("lms_ex1.json");
        inputs
            .trace
            .insert((ElemId::new("Visual"), ElemId::new("G19")), Formula::True);
        assert_eq!(codes(&validate(&inputs)), ["PC_SUBSUMPTION"]);
    }

    #[test]
    fn vacuous_feature_model() {
        let mut inputs = fixture("lms_ex1.json");
        inputs.space = FeatureSpace::from_names(&["LDWS", "Audio", "Visual"], "false").unwrap();
        let d = validate(&inputs);
        assert_eq!(codes(&d), ["VACUOUS_FEATURE_MODEL"]);
    }

    #[test]
    fn cycle_is_reported_once() {
        let mut inputs = fixture("lms_ex1.json");
        inputs
            .gsn
            .support_edges
            .insert((ElemId::new("Sn4"), ElemId::new("G5")), Formula::True);
        assert_eq!(codes(&validate(&inputs)), ["GSN_CYCLE"]);
    }

    #[test]
    fn delta_overlap_and_presence() {
        let mut inputs = fixture("lms_ex1.json");
        inputs
            .delta
            .deleted
            .insert(ElemId::new("Visual"), Formula::var("Visual"));
        let c = codes(&validate(&inputs));
        assert!(c.contains(&"DELTA_OVERLAP"), "{c:?}");
        assert!(c.contains(&"DELTA_PRESENCE"), "{c:?}");
    }

    #[test]
    fn disjoint_conditions_do_not_overlap() {
        let mut inputs = fixture("lms_ex1.json");
        inputs.delta.modified = [(ElemId::new("Alarm"), Formula::var("Visual"))]
            .into_iter()
            .collect();
        inputs.delta.added = VSet::new();
        inputs
            .system_prime
            .elements
            .insert(ElemId::new("Horn"), Formula::var("Audio"));
        inputs
            .delta
            .added
            .insert(ElemId::new("Horn"), Formula::var("Audio"));
        assert!(validate(&inputs).is_empty());
    }

    #[test]
    fn dead_element_is_a_warning() {
        let mut inputs = fixture("lms_ex1.json");
        inputs.gsn.elements.insert(
            ElemId::new("G99"),
            Formula::var("LDWS").and(&Formula::var("LDWS").negate()),
        );
        inputs
            .gsn
            .kinds
            .insert(ElemId::new("G99"), super::super::GsnKind::Goal);
        let d = validate(&inputs);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].severity, Severity::Warning);
        assert_eq!(d[0].code, "DEAD_ELEMENT");
    }

    #[test]
    fn undeclared_feature() {
        let mut inputs = fixture("lms_ex1.json");
        inputs
            .gsn
            .elements
            .insert(ElemId::new("G98"), Formula::var("Radar"));
        inputs
            .gsn
            .kinds
            .insert(ElemId::new("G98"), super::super::GsnKind::Goal);
        assert_eq!(codes(&validate(&inputs)), ["UNKNOWN_FEATURE"]);
    }
}
