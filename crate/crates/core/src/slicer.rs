//! Reachability slicers, plain and lifted.
//!
//! A slice is the criterion plus every node reachable from it along edges,
//! optionally bounded to a number of steps. The lifted slicer tracks, for
//! every node, the configurations in which it is reached: conditions are
//! conjoined along a path and disjoined across paths.

use std::collections::BTreeMap;
use std::fmt;
use std::num::NonZeroU32;
use std::str::FromStr;

use crate::model::{ElemId, Link};
use crate::pcalc::{FeatureSpace, Formula, PcError, TruthTable};
use crate::vset::{PlainSet, VSet};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SliceError {
    #[error("slicing criterion `{0}` is not an element of the model")]
    CriterionNotInModel(ElemId),
    #[error(transparent)]
    Pc(#[from] PcError),
}

/// How many edge steps a slice follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SliceDepth {
    Steps(NonZeroU32),
    Unbounded,
}

impl SliceDepth {
    pub const ONE: SliceDepth = SliceDepth::Steps(NonZeroU32::MIN);

    fn rounds(self) -> Option<u32> {
        match self {
            SliceDepth::Steps(n) => Some(n.get()),
            SliceDepth::Unbounded => None,
        }
    }
}

impl Default for SliceDepth {
    fn default() -> Self {
        SliceDepth::ONE
    }
}

impl fmt::Display for SliceDepth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SliceDepth::Steps(n) => write!(f, "{n}"),
            SliceDepth::Unbounded => f.write_str("unbounded"),
        }
    }
}

impl FromStr for SliceDepth {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("unbounded") {
            return Ok(SliceDepth::Unbounded);
        }
        s.parse::<NonZeroU32>()
            .map(SliceDepth::Steps)
            .map_err(|_| format!("expected a positive integer or `unbounded`, got `{s}`"))
    }
}

/// Slicer parameters. Only the system slicer depth is configurable; the
/// GSN slicers follow direct supports (one step) and the transitive closure.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SlicerConfig {
    pub sys_depth: SliceDepth,
}

impl SlicerConfig {
    pub const GSN_V_DEPTH: SliceDepth = SliceDepth::ONE;
    pub const GSN_R_DEPTH: SliceDepth = SliceDepth::Unbounded;
}

pub fn slice_plain(
    nodes: &PlainSet<ElemId>,
    edges: &PlainSet<Link>,
    criterion: &PlainSet<ElemId>,
    depth: SliceDepth,
) -> Result<PlainSet<ElemId>, SliceError> {
    if let Some(missing) = criterion.iter().find(|c| !nodes.contains(*c)) {
        return Err(SliceError::CriterionNotInModel(missing.clone()));
    }
    let mut adj: BTreeMap<&ElemId, Vec<&ElemId>> = BTreeMap::new();
    for (src, dst) in edges {
        if nodes.contains(src) && nodes.contains(dst) {
            adj.entry(src).or_default().push(dst);
        }
    }
    let mut result = criterion.clone();
    let mut frontier: Vec<&ElemId> = criterion.iter().collect();
    let mut round = 0;
    while !frontier.is_empty() && depth.rounds().is_none_or(|max| round < max) {
        let mut next = Vec::new();
        for u in frontier {
            for &v in adj.get(u).into_iter().flatten() {
                if result.insert(v.clone()) {
                    next.push(v);
                }
            }
        }
        frontier = next;
        round += 1;
    }
    Ok(result)
}

/// Lifted slice: for every valid configuration, indexing the result gives
/// the plain slice of the indexed arguments.
///
/// Each round propagates the conditions gained in the previous round across
/// one edge step. A contribution already entailed by a node's condition is
/// dropped, so the unbounded slice reaches a fixpoint.
pub fn slice_lifted(
    nodes: &VSet<ElemId>,
    edges: &VSet<Link>,
    criterion: &VSet<ElemId>,
    depth: SliceDepth,
    space: &FeatureSpace,
) -> Result<VSet<ElemId>, SliceError> {
    if let Some(missing) = criterion.keys().find(|c| !nodes.is_mapped(c)) {
        return Err(SliceError::CriterionNotInModel(missing.clone()));
    }
    let mut adj: BTreeMap<&ElemId, Vec<(&ElemId, &Formula)>> = BTreeMap::new();
    for ((src, dst), pc) in edges.iter() {
        if nodes.is_mapped(src) && nodes.is_mapped(dst) {
            adj.entry(src).or_default().push((dst, pc));
        }
    }

    let mut result: BTreeMap<ElemId, (Formula, TruthTable)> = BTreeMap::new();
    let mut frontier: BTreeMap<ElemId, Formula> = BTreeMap::new();
    for (id, pc) in criterion.iter() {
        let f = pc.and(&nodes.pc(id));
        let table = space.table(&f)?;
        if table.any() {
            result.insert(id.clone(), (f.clone(), table));
            frontier.insert(id.clone(), f);
        }
    }

    let mut round = 0;
    while !frontier.is_empty() && depth.rounds().is_none_or(|max| round < max) {
        let mut pending: BTreeMap<&ElemId, Formula> = BTreeMap::new();
        for (u, fu) in &frontier {
            for &(v, edge_pc) in adj.get(u).into_iter().flatten() {
                let contribution = fu.and(edge_pc).and(&nodes.pc(v));
                let slot = pending.entry(v).or_insert(Formula::False);
                *slot = slot.or(&contribution);
            }
        }
        let mut next = BTreeMap::new();
        for (v, contribution) in pending {
            let table = space.table(&contribution)?;
            match result.get_mut(v) {
                Some((f, t)) => {
                    if table.is_subset_of(t) {
                        continue;
                    }
                    *f = f.or(&contribution);
                    t.or_assign(&table);
                }
                None => {
                    if !table.any() {
                        continue;
                    }
                    result.insert(v.clone(), (contribution.clone(), table));
                }
            }
            next.insert(v.clone(), contribution);
        }
        frontier = next;
        round += 1;
    }

    Ok(result.into_iter().map(|(id, (f, _))| (id, f)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::fixture;
    use crate::vset::Project;

    fn id(s: &str) -> ElemId {
        ElemId::new(s)
    }

    fn ids(items: &[&str]) -> PlainSet<ElemId> {
        items.iter().map(|s| id(s)).collect()
    }

    fn lifted(space: &FeatureSpace, items: &[(&str, &str)]) -> VSet<ElemId> {
        items
            .iter()
            .map(|(v, pc)| (id(v), space.parse(pc).unwrap()))
            .collect()
    }

    #[test]
    fn depth_parsing() {
        assert_eq!("1".parse::<SliceDepth>().unwrap(), SliceDepth::ONE);
        assert_eq!(
            "unbounded".parse::<SliceDepth>().unwrap(),
            SliceDepth::Unbounded
        );
        assert!("0".parse::<SliceDepth>().is_err());
        assert!("-3".parse::<SliceDepth>().is_err());
        assert_eq!(SliceDepth::Unbounded.to_string(), "unbounded");
    }

    #[test]
    fn plain_ex1_neighbourhood() {
        let inputs = fixture("lms_ex1.json");
        let rho = inputs.space.parse_config("LDWS,Visual").unwrap();
        let s = inputs.system.project(&rho);
        let slice = slice_plain(
            &s.elements,
            &s.impact_edges,
            &ids(&["Visual"]),
            SliceDepth::ONE,
        )
        .unwrap();
        assert_eq!(slice, ids(&["Visual", "Alarm", "LDWS"]));
    }

    #[test]
    fn plain_trivial_cases() {
        let inputs = fixture("lms_ex1.json");
        let rho = inputs.space.parse_config("LDWS,Audio,Visual").unwrap();
        let s = inputs.system.project(&rho);
        for depth in [SliceDepth::ONE, SliceDepth::Unbounded] {
            assert!(
                slice_plain(&s.elements, &s.impact_edges, &PlainSet::new(), depth)
                    .unwrap()
                    .is_empty()
            );
            assert_eq!(
                slice_plain(&s.elements, &s.impact_edges, &s.elements, depth).unwrap(),
                s.elements
            );
        }
        assert_eq!(
            slice_plain(
                &s.elements,
                &s.impact_edges,
                &ids(&["Ghost"]),
                SliceDepth::ONE
            ),
            Err(SliceError::CriterionNotInModel(id("Ghost")))
        );
    }

    #[test]
    fn plain_unbounded_is_transitive() {
        let nodes = ids(&["a", "b", "c", "d"]);
        let edges: PlainSet<Link> = [("a", "b"), ("b", "c"), ("c", "a")]
            .iter()
            .map(|(x, y)| (id(x), id(y)))
            .collect();
        let crit = ids(&["a"]);
        assert_eq!(
            slice_plain(&nodes, &edges, &crit, SliceDepth::ONE).unwrap(),
            ids(&["a", "b"])
        );
        assert_eq!(
            slice_plain(&nodes, &edges, &crit, SliceDepth::Unbounded).unwrap(),
            ids(&["a", "b", "c"])
        );
    }

    #[test]
    fn lifted_ex1_sys_slice() {
        let inputs = fixture("lms_ex1.json");
        let sp = &inputs.space;
        let crit = lifted(sp, &[("Visual", "Visual")]);
        let slice = slice_lifted(
            &inputs.system.elements,
            &inputs.system.impact_edges,
            &crit,
            SliceDepth::ONE,
            sp,
        )
        .unwrap();
        let expected = lifted(
            sp,
            &[
                ("Visual", "Visual"),
                ("Alarm", "Visual"),
                ("LDWS", "Visual & LDWS"),
            ],
        );
        assert!(slice.equiv(&expected, sp).unwrap(), "{slice:?}");
    }

    #[test]
    fn lifted_ex2_sys_slice() {
        let inputs = fixture("lms_ex2.json");
        let sp = &inputs.space;
        let crit = lifted(sp, &[("Alarm", "true")]);
        let slice = slice_lifted(
            &inputs.system.elements,
            &inputs.system.impact_edges,
            &crit,
            SliceDepth::ONE,
            sp,
        )
        .unwrap();
        let expected = lifted(
            sp,
            &[
                ("Alarm", "true"),
                ("Visual", "Visual"),
                ("Audio", "Audio"),
                ("LDWS", "LDWS"),
            ],
        );
        assert!(slice.equiv(&expected, sp).unwrap());
    }

    #[test]
    fn lifted_ex1_gsn_closure() {
        let inputs = fixture("lms_ex1.json");
        let sp = &inputs.space;
        let crit = lifted(sp, &[("G19", "Visual"), ("G20", "Visual")]);
        let slice = slice_lifted(
            &inputs.gsn.elements,
            &inputs.gsn.support_edges,
            &crit,
            SliceDepth::Unbounded,
            sp,
        )
        .unwrap();
        let expected = lifted(
            sp,
            &[
                ("G19", "Visual"),
                ("G20", "Visual"),
                ("Sn11", "Visual"),
                ("Sn4", "Visual"),
                ("Sn18", "Visual"),
            ],
        );
        assert!(slice.equiv(&expected, sp).unwrap());
    }

    #[test]
    fn lifted_commutes_on_fixture_for_all_depths() {
        let inputs = fixture("lms_ex1.json");
        let sp = &inputs.space;
        let crits = [
            lifted(sp, &[("Visual", "Visual")]),
            lifted(sp, &[("Alarm", "true")]),
            lifted(
                sp,
                &[("Audio", "Audio & !LDWS"), ("UserInterface", "Visual")],
            ),
        ];
        for crit in &crits {
            for depth in [
                SliceDepth::ONE,
                SliceDepth::Steps(NonZeroU32::new(2).unwrap()),
                SliceDepth::Unbounded,
            ] {
                let slice = slice_lifted(
                    &inputs.system.elements,
                    &inputs.system.impact_edges,
                    crit,
                    depth,
                    sp,
                )
                .unwrap();
                for rho in sp.configs().unwrap() {
                    let s = inputs.system.project(&rho);
                    let plain =
                        slice_plain(&s.elements, &s.impact_edges, &crit.project(&rho), depth)
                            .unwrap();
                    assert_eq!(slice.project(&rho), plain, "{rho} {depth}");
                }
            }
        }
    }

    #[test]
    fn lifted_requires_mapped_criterion() {
        let inputs = fixture("lms_ex1.json");
        let sp = &inputs.space;
        let crit = lifted(sp, &[("Ghost", "true")]);
        assert_eq!(
            slice_lifted(
                &inputs.system.elements,
                &inputs.system.impact_edges,
                &crit,
                SliceDepth::ONE,
                sp
            ),
            Err(SliceError::CriterionNotInModel(id("Ghost")))
        );
        let empty = slice_lifted(
            &inputs.system.elements,
            &inputs.system.impact_edges,
            &VSet::new(),
            SliceDepth::Unbounded,
            sp,
        )
        .unwrap();
        assert!(empty.is_empty());
    }
}
