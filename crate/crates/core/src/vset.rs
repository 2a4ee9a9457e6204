//! Variational sets.
//!
//! A [`VSet`] maps each element to the presence condition under which it is
//! in the set. Unmapped elements have condition `false`. The set operations
//! combine conditions pointwise, so indexing a result at a configuration
//! gives the same plain set as applying the plain operation to the indexed
//! arguments.

use std::collections::{BTreeMap, BTreeSet};

use crate::pcalc::{Config, FeatureSpace, Formula, PcError};

pub type PlainSet<T> = BTreeSet<T>;

/// Projection of a lifted value onto a single product.
pub trait Project {
    type Product;

    /// Indexes at `rho` without checking it against the feature model.
    fn project(&self, rho: &Config) -> Self::Product;
}

impl<A: Project, B: Project> Project for (A, B) {
    type Product = (A::Product, B::Product);

    fn project(&self, rho: &Config) -> Self::Product {
        (self.0.project(rho), self.1.project(rho))
    }
}

/// A value paired with its presence condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarElem<T> {
    pub value: T,
    pub pc: Formula,
}

impl<T> VarElem<T> {
    pub fn new(value: T, pc: Formula) -> Self {
        VarElem { value, pc }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VSet<T: Ord> {
    entries: BTreeMap<T, Formula>,
}

impl<T: Ord> Default for VSet<T> {
    fn default() -> Self {
        VSet {
            entries: BTreeMap::new(),
        }
    }
}

impl<T: Ord + Clone> VSet<T> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `pc` to the condition of `value` by disjunction.
    pub fn insert(&mut self, value: T, pc: Formula) {
        if pc.is_false() {
            return;
        }
        match self.entries.get_mut(&value) {
            Some(existing) => *existing = existing.or(&pc),
            None => {
                self.entries.insert(value, pc);
            }
        }
    }

    /// Condition of `value`; `false` when unmapped.
    pub fn pc(&self, value: &T) -> Formula {
        self.entries.get(value).cloned().unwrap_or(Formula::False)
    }

    pub fn is_mapped(&self, value: &T) -> bool {
        self.entries.contains_key(value)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&T, &Formula)> {
        self.entries.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &T> {
        self.entries.keys()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `{ e | s(e) holds at rho }` after checking `rho` against the feature model.
    pub fn index_config(&self, rho: &Config, space: &FeatureSpace) -> Result<PlainSet<T>, PcError> {
        space.require_valid(rho)?;
        for pc in self.entries.values() {
            space.check(pc)?;
        }
        Ok(self.project(rho))
    }

    pub fn restrict_by_pc(&self, pc: &Formula) -> VSet<T> {
        self.iter().map(|(v, f)| (v.clone(), f.and(pc))).collect()
    }

    pub fn union(&self, other: &VSet<T>) -> VSet<T> {
        let mut out = self.clone();
        for (v, f) in other.iter() {
            out.insert(v.clone(), f.clone());
        }
        out
    }

    pub fn inter(&self, other: &VSet<T>) -> VSet<T> {
        self.iter()
            .map(|(v, f)| (v.clone(), f.and(&other.pc(v))))
            .collect()
    }

    pub fn diff(&self, other: &VSet<T>) -> VSet<T> {
        self.iter()
            .map(|(v, f)| (v.clone(), f.and(&other.pc(v).negate())))
            .collect()
    }

    /// `result(b) = OR { s(a) | f(a) = b }`.
    pub fn image<U: Ord + Clone>(&self, f: impl Fn(&T) -> U) -> VSet<U> {
        self.iter().map(|(v, pc)| (f(v), pc.clone())).collect()
    }

    /// Elements whose condition is satisfiable; conditions are kept as is.
    pub fn support(&self, space: &FeatureSpace) -> Result<Vec<&T>, PcError> {
        let mut out = Vec::new();
        for (v, f) in self.iter() {
            if space.sat(f)? {
                out.push(v);
            }
        }
        Ok(out)
    }

    /// Lifted membership: `elem` is in the set wherever it exists.
    pub fn contains(&self, elem: &VarElem<T>, space: &FeatureSpace) -> Result<bool, PcError> {
        space.entails(&elem.pc, &self.pc(&elem.value))
    }

    pub fn is_subset_of(&self, other: &VSet<T>, space: &FeatureSpace) -> Result<bool, PcError> {
        for (v, f) in self.iter() {
            if !space.entails(f, &other.pc(v))? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Same condition for every element, under the feature model.
    pub fn equiv(&self, other: &VSet<T>, space: &FeatureSpace) -> Result<bool, PcError> {
        Ok(self.is_subset_of(other, space)? && other.is_subset_of(self, space)?)
    }

    /// Drops entries whose condition is unsatisfiable under the feature model.
    pub fn prune(&self, space: &FeatureSpace) -> Result<VSet<T>, PcError> {
        let mut out = VSet::new();
        for (v, f) in self.iter() {
            if space.sat(f)? {
                out.insert(v.clone(), f.clone());
            }
        }
        Ok(out)
    }

    /// Normalizes every condition and drops unsatisfiable entries.
    pub fn normalized(&self, space: &FeatureSpace) -> Result<VSet<T>, PcError> {
        let mut out = VSet::new();
        for (v, f) in self.iter() {
            out.insert(v.clone(), space.normalize(f)?);
        }
        Ok(out)
    }
}

impl<T: Ord + Clone> FromIterator<(T, Formula)> for VSet<T> {
    fn from_iter<I: IntoIterator<Item = (T, Formula)>>(iter: I) -> Self {
        let mut out = VSet::new();
        for (v, f) in iter {
            out.insert(v, f);
        }
        out
    }
}

impl<T: Ord + Clone> Project for VSet<T> {
    type Product = PlainSet<T>;

    fn project(&self, rho: &Config) -> PlainSet<T> {
        self.iter()
            .filter(|(_, f)| f.eval(rho))
            .map(|(v, _)| v.clone())
            .collect()
    }
}

pub fn index_config<T: Ord + Clone>(
    s: &VSet<T>,
    rho: &Config,
    space: &FeatureSpace,
) -> Result<PlainSet<T>, PcError> {
    s.index_config(rho, space)
}

pub fn restrict_by_pc<T: Ord + Clone>(s: &VSet<T>, pc: &Formula) -> VSet<T> {
    s.restrict_by_pc(pc)
}

pub fn vmem<T: Ord + Clone>(
    v: &VarElem<T>,
    s: &VSet<T>,
    space: &FeatureSpace,
) -> Result<bool, PcError> {
    s.contains(v, space)
}

pub fn vsubset<T: Ord + Clone>(
    s: &VSet<T>,
    t: &VSet<T>,
    space: &FeatureSpace,
) -> Result<bool, PcError> {
    s.is_subset_of(t, space)
}

pub fn vunion<T: Ord + Clone>(s: &VSet<T>, t: &VSet<T>) -> VSet<T> {
    s.union(t)
}

pub fn vinter<T: Ord + Clone>(s: &VSet<T>, t: &VSet<T>) -> VSet<T> {
    s.inter(t)
}

pub fn vdiff<T: Ord + Clone>(s: &VSet<T>, t: &VSet<T>) -> VSet<T> {
    s.diff(t)
}

pub fn vimage<T: Ord + Clone, U: Ord + Clone>(f: impl Fn(&T) -> U, s: &VSet<T>) -> VSet<U> {
    s.image(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space() -> FeatureSpace {
        FeatureSpace::from_names(&["LDWS", "Audio", "Visual"], "true").unwrap()
    }

    fn vs(space: &FeatureSpace, items: &[(&str, &str)]) -> VSet<String> {
        items
            .iter()
            .map(|(v, pc)| (v.to_string(), space.parse(pc).unwrap()))
            .collect()
    }

    fn set(items: &[&str]) -> PlainSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn unmapped_is_false_and_false_is_pruned() {
        let s = space();
        let v = vs(&s, &[("e", "false")]);
        assert!(v.is_empty());
        assert_eq!(v.pc(&"e".to_string()), Formula::False);
        let rho: Config = ["LDWS"].iter().collect();
        assert!(v.index_config(&rho, &s).unwrap().is_empty());
        assert!(VSet::<String>::new()
            .index_config(&rho, &s)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn index_rejects_invalid_config() {
        let s = FeatureSpace::from_names(&["A", "B"], "A").unwrap();
        let v = vs(&s, &[("x", "true")]);
        let rho: Config = ["B"].iter().collect();
        assert_eq!(
            v.index_config(&rho, &s).unwrap_err(),
            PcError::InvalidConfig("B".into())
        );
    }

    #[test]
    fn restrict_examples() {
        let s = space();
        let a = vs(&s, &[("a", "Visual")]);
        assert_eq!(a.restrict_by_pc(&Formula::True), a);
        assert_eq!(
            a.restrict_by_pc(&Formula::var("Audio")),
            vs(&s, &[("a", "Visual & Audio")])
        );
        assert!(a.restrict_by_pc(&Formula::False).is_empty());
    }

    #[test]
    fn membership_examples() {
        let s = space();
        let t = vs(&s, &[("a", "Visual | Audio")]);
        let a = |pc: Formula| VarElem::new("a".to_string(), pc);
        assert!(t.contains(&a(Formula::var("Visual")), &s).unwrap());
        assert!(!vs(&s, &[("a", "Visual")])
            .contains(&a(Formula::True), &s)
            .unwrap());
        let b = VarElem::new("b".to_string(), Formula::False);
        assert!(t.contains(&b, &s).unwrap());
        assert!(VSet::new().contains(&b, &s).unwrap());
    }

    #[test]
    fn subset_examples() {
        let s = space();
        let x = vs(&s, &[("a", "Visual"), ("b", "Audio")]);
        assert!(x.is_subset_of(&x, &s).unwrap());
        assert!(vs(&s, &[("a", "Visual")])
            .is_subset_of(&vs(&s, &[("a", "true")]), &s)
            .unwrap());
        assert!(!vs(&s, &[("a", "true")])
            .is_subset_of(&vs(&s, &[("a", "Visual")]), &s)
            .unwrap());
    }

    #[test]
    fn union_examples() {
        let s = space();
        let u = vs(&s, &[("a", "Visual")]).union(&vs(&s, &[("a", "Audio")]));
        assert!(u.equiv(&vs(&s, &[("a", "Visual | Audio")]), &s).unwrap());
        let x = vs(&s, &[("a", "Visual"), ("b", "LDWS")]);
        assert!(x.union(&VSet::new()).equiv(&x, &s).unwrap());
    }

    #[test]
    fn inter_and_diff_examples() {
        let s = space();
        let x = vs(&s, &[("a", "Visual"), ("b", "true")]);
        assert!(x.diff(&VSet::new()).equiv(&x, &s).unwrap());
        let d = vs(&s, &[("a", "true")]).diff(&vs(&s, &[("a", "Visual")]));
        assert!(d.equiv(&vs(&s, &[("a", "!Visual")]), &s).unwrap());
        let i = vs(&s, &[("a", "Visual")]).inter(&vs(&s, &[("a", "Audio")]));
        assert!(i.equiv(&vs(&s, &[("a", "Visual & Audio")]), &s).unwrap());
    }

    #[test]
    fn image_examples() {
        let s = space();
        let x = vs(&s, &[("a", "Visual"), ("b", "Audio")]);
        assert!(x.image(|v| v.clone()).equiv(&x, &s).unwrap());
        let c = x.image(|_| "c".to_string());
        assert!(c.equiv(&vs(&s, &[("c", "Visual | Audio")]), &s).unwrap());
    }

    #[test]
    fn union_distributes_over_index_for_all_configs() {
        let s = space();
        let x = vs(&s, &[("Visual", "Visual"), ("Alarm", "true")]);
        let y = vs(&s, &[("Alarm", "Visual"), ("LDWS", "Visual & LDWS")]);
        let u = x.union(&y);
        for rho in s.configs().unwrap() {
            let expected: PlainSet<String> = x
                .index_config(&rho, &s)
                .unwrap()
                .union(&y.index_config(&rho, &s).unwrap())
                .cloned()
                .collect();
            assert_eq!(u.index_config(&rho, &s).unwrap(), expected, "at {rho}");
        }
    }

    #[test]
    fn normalized_drops_unsat() {
        let s = space();
        let x = vs(&s, &[("a", "Visual & !Visual"), ("b", "Audio & Audio")]);
        let n = x.normalized(&s).unwrap();
        assert_eq!(n.len(), 1);
        assert_eq!(n.pc(&"b".to_string()), Formula::var("Audio"));
        assert_eq!(x.prune(&s).unwrap().len(), 1);
        assert_eq!(x.support(&s).unwrap(), vec![&"b".to_string()]);
        let rho: Config = ["Audio"].iter().collect();
        assert_eq!(n.project(&rho), set(&["b"]));
    }
}
