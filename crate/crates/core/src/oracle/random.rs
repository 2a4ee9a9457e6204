//! Seeded generator of well-formed product-line inputs.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{Delta, ElemId, GsnKind, GsnModel, SplInputs, SysModel, TraceRel};
use crate::pcalc::{Feature, FeatureSpace, Formula};
use crate::vset::VSet;

/// Upper bounds for generated inputs. Counts are drawn uniformly up to
/// each bound; `edges` bounds each edge relation and the trace separately.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub features: usize,
    pub sys_elements: usize,
    pub gsn_elements: usize,
    pub edges: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            features: 4,
            sys_elements: 10,
            gsn_elements: 10,
            edges: 20,
        }
    }
}

struct Gen {
    rng: ChaCha8Rng,
    names: Vec<String>,
}

impl Gen {
    fn literal(&mut self) -> Formula {
        let v = Formula::var(
            self.names
                .choose(&mut self.rng)
                .expect("at least one feature"),
        );
        if self.rng.gen_bool(0.3) {
            v.negate()
        } else {
            v
        }
    }

    fn formula(&mut self, depth: u32) -> Formula {
        match self.rng.gen_range(0..10) {
            0..=2 => Formula::True,
            3..=6 => self.literal(),
            _ if depth == 0 => self.literal(),
            7 | 8 => self.formula(depth - 1).and(&self.formula(depth - 1)),
            _ => self.formula(depth - 1).or(&self.formula(depth - 1)),
        }
    }

    /// A condition satisfiable under the feature model of `space`.
    fn live(&mut self, space: &FeatureSpace) -> Formula {
        for _ in 0..8 {
            let f = self.formula(2);
            if space.sat(&f).unwrap_or(false) {
                return f;
            }
        }
        Formula::True
    }

    fn count(&mut self, max: usize) -> usize {
        self.rng.gen_range(0..=max)
    }

    fn edges(
        &mut self,
        elements: &VSet<ElemId>,
        n: usize,
        ordered: bool,
    ) -> VSet<(ElemId, ElemId)> {
        let ids: Vec<ElemId> = elements.keys().cloned().collect();
        let mut out = VSet::new();
        if ids.len() < 2 {
            return out;
        }
        for _ in 0..n {
            let mut i = self.rng.gen_range(0..ids.len());
            let mut j = self.rng.gen_range(0..ids.len());
            if i == j {
                continue;
            }
            if ordered && i > j {
                std::mem::swap(&mut i, &mut j);
            }
            let pc = elements
                .pc(&ids[i])
                .and(&elements.pc(&ids[j]))
                .and(&self.formula(1));
            out.insert((ids[i].clone(), ids[j].clone()), pc);
        }
        out
    }
}

/// Deterministic random inputs for `seed` that pass validation without
/// diagnostics.
///
/// Edge and link conditions are endpoint conjunctions narrowed by a random
/// condition. Support edges only run from lower to higher element index, so
/// the GSN graph is acyclic. Deleted elements are dropped from the changed
/// system and added elements are fresh.
pub fn gen_random_inputs(seed: u64, limits: &Limits) -> SplInputs {
    let n_features = limits.features.max(1);
    let mut g = Gen {
        rng: ChaCha8Rng::seed_from_u64(seed),
        names: Vec::new(),
    };
    g.names = (0..g.rng.gen_range(1..=n_features))
        .map(|i| format!("F{i}"))
        .collect();
    let features: Vec<Feature> = g
        .names
        .iter()
        .map(|n| Feature::new(n).expect("valid name"))
        .collect();
    let trivial = FeatureSpace::new(features.clone(), Formula::True).expect("within cap");
    let fm = if g.rng.gen_bool(0.5) {
        g.live(&trivial)
    } else {
        Formula::True
    };
    let space = FeatureSpace::new(features, fm).expect("within cap");

    let max_sys = limits.sys_elements.max(1);
    let n_sys = g.rng.gen_range(1..=max_sys);
    let mut system = SysModel::default();
    for i in 0..n_sys {
        let pc = g.live(&space);
        system.elements.insert(ElemId::new(&format!("s{i}")), pc);
    }
    let n = g.count(limits.edges);
    system.impact_edges = g.edges(&system.elements, n, false);

    let mut delta = Delta::default();
    let mut prime = SysModel::default();
    for (id, pc) in system.elements.iter() {
        match g.rng.gen_range(0..6) {
            0 => {
                let d = pc.and(&g.formula(1));
                delta.deleted.insert(id.clone(), d);
                continue;
            }
            1 | 2 => {
                let pc2 = if g.rng.gen_bool(0.3) {
                    let narrowed = pc.and(&g.formula(1));
                    if space.sat(&narrowed).unwrap_or(false) {
                        narrowed
                    } else {
                        pc.clone()
                    }
                } else {
                    pc.clone()
                };
                delta
                    .modified
                    .insert(id.clone(), pc.and(&pc2).and(&g.formula(1)));
                prime.elements.insert(id.clone(), pc2);
            }
            _ => prime.elements.insert(id.clone(), pc.clone()),
        }
    }
    let room = max_sys.saturating_sub(prime.elements.len());
    for i in 0..g.count(room.min(3)) {
        let id = ElemId::new(&format!("n{i}"));
        let pc = g.live(&space);
        delta.added.insert(id.clone(), pc.and(&g.formula(1)));
        prime.elements.insert(id, pc);
    }
    // Surviving edges carry over; a few fresh ones model the change.
    for ((s, d), pc) in system.impact_edges.iter() {
        if prime.elements.is_mapped(s) && prime.elements.is_mapped(d) && g.rng.gen_bool(0.8) {
            let ends = prime.elements.pc(s).and(&prime.elements.pc(d));
            prime
                .impact_edges
                .insert((s.clone(), d.clone()), pc.and(&ends));
        }
    }
    let fresh = g.count(limits.edges.saturating_sub(prime.impact_edges.len()).min(4));
    for (link, pc) in g.edges(&prime.elements, fresh, false).iter() {
        prime.impact_edges.insert(link.clone(), pc.clone());
    }

    let n_gsn = g.rng.gen_range(1..=limits.gsn_elements.max(1));
    let mut gsn = GsnModel::default();
    const KINDS: [GsnKind; 4] = [
        GsnKind::Goal,
        GsnKind::Strategy,
        GsnKind::Solution,
        GsnKind::Context,
    ];
    for i in 0..n_gsn {
        let id = ElemId::new(&format!("g{i:02}"));
        let pc = g.live(&space);
        gsn.kinds
            .insert(id.clone(), *KINDS.choose(&mut g.rng).expect("nonempty"));
        gsn.elements.insert(id, pc);
    }
    let n = g.count(limits.edges);
    gsn.support_edges = g.edges(&gsn.elements, n, true);

    let sys_ids: Vec<ElemId> = system.elements.keys().cloned().collect();
    let gsn_ids: Vec<ElemId> = gsn.elements.keys().cloned().collect();
    let mut trace = TraceRel::new();
    for _ in 0..g.count(limits.edges) {
        let s = sys_ids.choose(&mut g.rng).expect("nonempty").clone();
        let t = gsn_ids.choose(&mut g.rng).expect("nonempty").clone();
        let pc = system
            .elements
            .pc(&s)
            .and(&gsn.elements.pc(&t))
            .and(&g.formula(1));
        trace.insert((s, t), pc);
    }

    SplInputs {
        space,
        system,
        system_prime: prime,
        gsn,
        trace,
        delta,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate;

    #[test]
    fn same_seed_same_inputs() {
        let l = Limits::default();
        assert_eq!(gen_random_inputs(7, &l), gen_random_inputs(7, &l));
        assert_ne!(gen_random_inputs(7, &l), gen_random_inputs(8, &l));
    }

    #[test]
    fn generated_inputs_validate_cleanly() {
        let l = Limits::default();
        for seed in 0..300 {
            let inputs = gen_random_inputs(seed, &l);
            assert_eq!(validate(&inputs), vec![], "seed {seed}");
            assert!(inputs.space.features().len() <= l.features);
            assert!(inputs.system.elements.len() <= l.sys_elements);
            assert!(inputs.system_prime.elements.len() <= l.sys_elements);
            assert!(inputs.gsn.elements.len() <= l.gsn_elements);
            assert!(inputs.system.impact_edges.len() <= l.edges);
            assert!(inputs.gsn.support_edges.len() <= l.edges);
            assert!(inputs.trace.len() <= l.edges);
        }
    }

    #[test]
    fn generated_inputs_exercise_every_delta_kind() {
        let l = Limits::default();
        let (mut a, mut d, mut m) = (0, 0, 0);
        for seed in 0..100 {
            let inputs = gen_random_inputs(seed, &l);
            a += inputs.delta.added.len();
            d += inputs.delta.deleted.len();
            m += inputs.delta.modified.len();
        }
        assert!(a > 0 && d > 0 && m > 0, "{a} {d} {m}");
    }
}
