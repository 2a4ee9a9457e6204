use std::collections::HashMap;
use std::rc::Rc;

use super::{FeatureSpace, Formula, PcError};

/// One bit per valid configuration.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TruthTable {
    words: Vec<u64>,
    len: usize,
}

impl TruthTable {
    pub(crate) fn zeros(len: usize) -> Self {
        TruthTable {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub(crate) fn ones(len: usize) -> Self {
        let mut t = TruthTable {
            words: vec![u64::MAX; len.div_ceil(64)],
            len,
        };
        t.clear_tail();
        t
    }

    fn clear_tail(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub(crate) fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn any(&self) -> bool {
        self.words.iter().any(|&w| w != 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_subset_of(&self, other: &TruthTable) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn and(&self, other: &TruthTable) -> TruthTable {
        self.zip(other, |a, b| a & b)
    }

    pub fn or(&self, other: &TruthTable) -> TruthTable {
        self.zip(other, |a, b| a | b)
    }

    pub fn not(&self) -> TruthTable {
        let mut t = TruthTable {
            words: self.words.iter().map(|w| !w).collect(),
            len: self.len,
        };
        t.clear_tail();
        t
    }

    pub(crate) fn or_assign(&mut self, other: &TruthTable) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    fn zip(&self, other: &TruthTable, op: impl Fn(u64, u64) -> u64) -> TruthTable {
        TruthTable {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(&a, &b)| op(a, b))
                .collect(),
            len: self.len,
        }
    }

    /// Indices of the set bits.
    pub fn ones_iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }
}

/// The valid configurations of a feature space, as bit masks over declared
/// feature positions, plus one column per feature.
#[derive(Debug)]
pub(crate) struct Universe {
    masks: Vec<u32>,
    columns: Vec<TruthTable>,
}

impl Universe {
    pub(crate) fn build(space: &FeatureSpace) -> Universe {
        let n = space.features.len();
        let mut masks: Vec<u32> = (0..1u64 << n)
            .map(|m| m as u32)
            .filter(|&m| eval_mask(&space.feature_model, space, m))
            .collect();
        masks.sort_by_cached_key(|&m| selected_positions(m, n));
        let mut columns = vec![TruthTable::zeros(masks.len()); n];
        for (i, &mask) in masks.iter().enumerate() {
            for (f, column) in columns.iter_mut().enumerate() {
                if mask & (1 << f) != 0 {
                    column.set(i);
                }
            }
        }
        Universe { masks, columns }
    }

    pub(crate) fn masks(&self) -> &[u32] {
        &self.masks
    }

    pub(crate) fn table(&self, f: &Formula, space: &FeatureSpace) -> Result<TruthTable, PcError> {
        let mut memo = HashMap::new();
        self.eval(f, space, &mut memo).map(|t| (*t).clone())
    }

    // Shared subformulas are evaluated once; node addresses are stable while
    // `f` is borrowed.
    fn eval(
        &self,
        f: &Formula,
        space: &FeatureSpace,
        memo: &mut HashMap<usize, Rc<TruthTable>>,
    ) -> Result<Rc<TruthTable>, PcError> {
        let key = f as *const Formula as usize;
        if let Some(t) = memo.get(&key) {
            return Ok(t.clone());
        }
        let t = match f {
            Formula::True => TruthTable::ones(self.masks.len()),
            Formula::False => TruthTable::zeros(self.masks.len()),
            Formula::Var(name) => match space.position(name) {
                Some(i) => self.columns[i].clone(),
                None => {
                    return Err(PcError::UnknownFeature {
                        name: name.to_string(),
                        position: None,
                    })
                }
            },
            Formula::Not(g) => self.eval(g, space, memo)?.not(),
            Formula::And(g, h) => {
                let a = self.eval(g, space, memo)?;
                let b = self.eval(h, space, memo)?;
                a.and(&b)
            }
            Formula::Or(g, h) => {
                let a = self.eval(g, space, memo)?;
                let b = self.eval(h, space, memo)?;
                a.or(&b)
            }
        };
        let t = Rc::new(t);
        if matches!(f, Formula::Not(_) | Formula::And(..) | Formula::Or(..)) {
            memo.insert(key, t.clone());
        }
        Ok(t)
    }
}

fn selected_positions(mask: u32, n: usize) -> Vec<u8> {
    (0..n as u8).filter(|i| mask & (1 << i) != 0).collect()
}

/// Evaluates `f` with variables read from declared-position bits of `mask`.
/// Callers guarantee every variable is declared.
pub(crate) fn eval_mask(f: &Formula, space: &FeatureSpace, mask: u32) -> bool {
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Var(name) => space.position(name).is_some_and(|i| mask & (1 << i) != 0),
        Formula::Not(g) => !eval_mask(g, space, mask),
        Formula::And(g, h) => eval_mask(g, space, mask) && eval_mask(h, space, mask),
        Formula::Or(g, h) => eval_mask(g, space, mask) || eval_mask(h, space, mask),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_bits_stay_clear() {
        let t = TruthTable::ones(70);
        assert_eq!(t.count_ones(), 70);
        assert_eq!(t.not().count_ones(), 0);
        assert_eq!(TruthTable::zeros(70).not().count_ones(), 70);
    }

    #[test]
    fn subset_and_ops() {
        let mut a = TruthTable::zeros(10);
        a.set(3);
        let mut b = a.clone();
        b.set(7);
        assert!(a.is_subset_of(&b));
        assert!(!b.is_subset_of(&a));
        assert_eq!(a.and(&b), a);
        assert_eq!(a.or(&b), b);
        assert_eq!(b.ones_iter().collect::<Vec<_>>(), vec![3, 7]);
    }
}
