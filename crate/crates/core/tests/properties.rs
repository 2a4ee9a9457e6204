use proptest::prelude::*;

use spl_impact::cia::{check_partition, gsn_ia_lifted, Lifted};
use spl_impact::exec::Execution;
use spl_impact::model::{ModelFile, SplInputs};
use spl_impact::oracle::{check_commutation_with, gen_random_inputs, Limits};
use spl_impact::pcalc::{FeatureSpace, Formula};
use spl_impact::slicer::{slice_lifted, SliceDepth, SlicerConfig};
use spl_impact::vset::VSet;

const NAMES: [&str; 4] = ["A", "B", "C", "D"];

fn space(fm: &str) -> FeatureSpace {
    FeatureSpace::from_names(&NAMES, fm).unwrap()
}

/// Raw ASTs, including constants below connectives.
fn raw_formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        Just(Formula::True),
        Just(Formula::False),
        prop::sample::select(NAMES.to_vec()).prop_map(Formula::var),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|f| Formula::Not(f.into())),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::And(a.into(), b.into())),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::Or(a.into(), b.into())),
        ]
    })
}

fn vset() -> impl Strategy<Value = VSet<u8>> {
    prop::collection::vec((0u8..6, raw_formula()), 0..6).prop_map(|v| v.into_iter().collect())
}

fn same_vset<T: Ord + Clone>(a: &VSet<T>, b: &VSet<T>, sp: &FeatureSpace) -> bool {
    a.equiv(b, sp).unwrap()
}

fn same_inputs(a: &SplInputs, b: &SplInputs) -> bool {
    let sp = &a.space;
    a.space.features() == b.space.features()
        && sp
            .equiv(a.space.feature_model(), b.space.feature_model())
            .unwrap()
        && same_vset(&a.system.elements, &b.system.elements, sp)
        && same_vset(&a.system.impact_edges, &b.system.impact_edges, sp)
        && same_vset(&a.system_prime.elements, &b.system_prime.elements, sp)
        && same_vset(
            &a.system_prime.impact_edges,
            &b.system_prime.impact_edges,
            sp,
        )
        && same_vset(&a.gsn.elements, &b.gsn.elements, sp)
        && same_vset(&a.gsn.support_edges, &b.gsn.support_edges, sp)
        && a.gsn.kinds == b.gsn.kinds
        && same_vset(&a.trace, &b.trace, sp)
        && same_vset(&a.delta.added, &b.delta.added, sp)
        && same_vset(&a.delta.deleted, &b.delta.deleted, sp)
        && same_vset(&a.delta.modified, &b.delta.modified, sp)
}

proptest! {
    #[test]
    fn render_then_parse_is_identity(f in raw_formula()) {
        let sp = space("true");
        prop_assert_eq!(sp.parse(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn normalize_is_equivalent_and_idempotent(f in raw_formula(), fm in raw_formula()) {
        let fm_text = fm.to_string();
        let sp = space(&fm_text);
        let n = sp.normalize(&f).unwrap();
        prop_assert!(sp.equiv(&n, &f).unwrap());
        prop_assert_eq!(sp.normalize(&n).unwrap(), n.clone());
        // Equivalent inputs normalize to the same formula.
        let g = Formula::Not(Formula::Not(f.clone().into()).into());
        prop_assert_eq!(sp.normalize(&g).unwrap(), n);
    }

    #[test]
    fn union_and_inter_laws(s in vset(), t in vset(), u in vset()) {
        let sp = space("true");
        prop_assert!(same_vset(&s.union(&t), &t.union(&s), &sp));
        prop_assert!(same_vset(&s.inter(&t), &t.inter(&s), &sp));
        prop_assert!(same_vset(&s.union(&t).union(&u), &s.union(&t.union(&u)), &sp));
        prop_assert!(same_vset(&s.inter(&t).inter(&u), &s.inter(&t.inter(&u)), &sp));
        prop_assert!(same_vset(&s.union(&s), &s, &sp));
        prop_assert!(same_vset(&s.inter(&s), &s, &sp));
        prop_assert!(s.diff(&t).is_subset_of(&s, &sp).unwrap());
        prop_assert!(s.inter(&t).is_subset_of(&s.union(&t), &sp).unwrap());
    }

    #[test]
    fn slicing_is_monotone(seed in 0u64..10_000, extra in 0usize..4, steps in 1u32..4) {
        let inputs = gen_random_inputs(seed, &Limits::default());
        let sp = &inputs.space;
        let nodes = &inputs.system.elements;
        let small: VSet<_> = nodes.iter().take(1).map(|(k, f)| (k.clone(), f.clone())).collect();
        let large: VSet<_> = nodes.iter().take(1 + extra).map(|(k, f)| (k.clone(), f.clone())).collect();
        let depth = SliceDepth::Steps(steps.try_into().unwrap());
        for d in [depth, SliceDepth::Unbounded] {
            let a = slice_lifted(nodes, &inputs.system.impact_edges, &small, d, sp).unwrap();
            let b = slice_lifted(nodes, &inputs.system.impact_edges, &large, d, sp).unwrap();
            prop_assert!(a.is_subset_of(&b, sp).unwrap());
            prop_assert!(small.is_subset_of(&a, sp).unwrap());
            prop_assert!(a.is_subset_of(nodes, sp).unwrap());
        }
        let edges = &inputs.system.impact_edges;
        let shallow = slice_lifted(nodes, edges, &large, depth, sp).unwrap();
        let deeper = SliceDepth::Steps((steps + 1).try_into().unwrap());
        let deep = slice_lifted(nodes, edges, &large, deeper, sp).unwrap();
        let closure = slice_lifted(nodes, edges, &large, SliceDepth::Unbounded, sp).unwrap();
        prop_assert!(shallow.is_subset_of(&deep, sp).unwrap());
        prop_assert!(deep.is_subset_of(&closure, sp).unwrap());
    }

    #[test]
    fn model_file_round_trip(seed in 0u64..10_000) {
        let inputs = gen_random_inputs(seed, &Limits::default());
        let json = ModelFile::from_inputs(&inputs).to_json();
        let back = ModelFile::parse(&json).unwrap().build().unwrap();
        prop_assert!(same_inputs(&inputs, &back));
        prop_assert_eq!(ModelFile::from_inputs(&back).to_json(), json);
    }

    #[test]
    fn lifted_result_partitions_every_element(seed in 0u64..10_000) {
        let inputs = gen_random_inputs(seed, &Limits::default());
        let (r, t) = gsn_ia_lifted(&inputs, &SlicerConfig::default()).unwrap();
        prop_assert!(check_partition(&r, &inputs.gsn.elements, &inputs.space).unwrap());
        prop_assert!(t.c3recheck1.is_subset_of(&t.c3recheck2, &inputs.space).unwrap());
        prop_assert!(t.restricted.is_subset_of(&inputs.trace, &inputs.space).unwrap());
    }

    #[test]
    fn commutes_for_every_slice_depth(seed in 0u64..10_000, steps in 1u32..4, unbounded in any::<bool>()) {
        let inputs = gen_random_inputs(seed, &Limits::default());
        let sys_depth = if unbounded {
            SliceDepth::Unbounded
        } else {
            SliceDepth::Steps(steps.try_into().unwrap())
        };
        let cfg = SlicerConfig { sys_depth };
        let seq = check_commutation_with(&inputs, &cfg, &Lifted, Execution::Sequential).unwrap();
        prop_assert!(seq.overall(), "{}", seq.to_json());
        let par = check_commutation_with(&inputs, &cfg, &Lifted, Execution::Parallel).unwrap();
        prop_assert_eq!(seq, par);
    }
}
