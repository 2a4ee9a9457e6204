//! Canonical sum-of-products.
//!
//! Input is the on/off partition of the valid configurations; configurations
//! excluded by the feature model are don't-cares. Features are dropped greedily
//! in declared order while no valid on/off pair differs only in that feature,
//! then prime implicants of the reduced function are computed and a cover is
//! picked by a fixed rule. Every step reads only the partition, so
//! equivalent formulas yield the same AST.

use std::collections::{BTreeSet, HashSet};
use std::sync::Arc;

use super::{FeatureSpace, Formula, PcError};

const OFF: u8 = 0;
const ON: u8 = 1;
const DC: u8 = 2;

/// Above this many remaining features the cover is the plain minterm list.
const PRIME_LIMIT: usize = 14;

/// A product term over reduced positions: bits in `care` are fixed to the
/// corresponding bits of `value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Cube {
    value: u32,
    free: u32,
}

impl Cube {
    fn covers(&self, cell: u32) -> bool {
        cell & !self.free == self.value
    }
}

pub(super) fn normalize(space: &FeatureSpace, f: &Formula) -> Result<Formula, PcError> {
    let table = space.table(f)?;
    let universe = space.universe()?;
    if !table.any() {
        return Ok(Formula::False);
    }
    if table.count_ones() == table.len() {
        return Ok(Formula::True);
    }

    let n = space.features().len();
    let mut cells = vec![DC; 1usize << n];
    for (i, &mask) in universe.masks().iter().enumerate() {
        cells[mask as usize] = if table.get(i) { ON } else { OFF };
    }

    let mut vars: Vec<usize> = (0..n).collect();
    let mut j = 0;
    while j < vars.len() {
        match eliminate(&cells, j) {
            Some(reduced) => {
                cells = reduced;
                vars.remove(j);
            }
            None => j += 1,
        }
    }

    let cubes = if vars.len() <= PRIME_LIMIT {
        cover(&cells, vars.len())
    } else {
        (0..cells.len() as u32)
            .filter(|&c| cells[c as usize] == ON)
            .map(|value| Cube { value, free: 0 })
            .collect()
    };

    let mut terms: Vec<Vec<(usize, bool)>> = cubes
        .iter()
        .map(|cube| {
            (0..vars.len())
                .filter(|b| cube.free & (1 << b) == 0)
                .map(|b| (vars[b], cube.value & (1 << b) == 0))
                .collect()
        })
        .collect();
    terms.sort();

    let features = space.features();
    let term_formula = |term: &Vec<(usize, bool)>| {
        term.iter()
            .map(|&(idx, negated)| {
                let v = Formula::var(features[idx].name());
                if negated {
                    Formula::Not(Arc::new(v))
                } else {
                    v
                }
            })
            .reduce(|acc, lit| Formula::And(Arc::new(acc), Arc::new(lit)))
            .unwrap_or(Formula::True)
    };
    Ok(terms
        .iter()
        .map(term_formula)
        .reduce(|acc, t| Formula::Or(Arc::new(acc), Arc::new(t)))
        .unwrap_or(Formula::False))
}

/// Merges the two halves split by position `j`, or `None` when some on cell
/// and off cell differ only there.
fn eliminate(cells: &[u8], j: usize) -> Option<Vec<u8>> {
    let bit = 1usize << j;
    let half = cells.len() / 2;
    let mut out = Vec::with_capacity(half);
    for idx in 0..half {
        let base = ((idx >> j) << (j + 1)) | (idx & (bit - 1));
        let merged = match (cells[base], cells[base | bit]) {
            (ON, OFF) | (OFF, ON) => return None,
            (DC, x) | (x, DC) => x,
            (x, _) => x,
        };
        out.push(merged);
    }
    Some(out)
}

fn cover(cells: &[u8], width: usize) -> Vec<Cube> {
    let mut level: HashSet<Cube> = (0..cells.len() as u32)
        .filter(|&c| cells[c as usize] != OFF)
        .map(|value| Cube { value, free: 0 })
        .collect();
    let mut primes = Vec::new();
    while !level.is_empty() {
        let mut next = HashSet::new();
        let mut merged = HashSet::new();
        for cube in &level {
            for b in 0..width {
                let bit = 1u32 << b;
                if cube.free & bit != 0 || cube.value & bit != 0 {
                    continue;
                }
                let partner = Cube {
                    value: cube.value | bit,
                    free: cube.free,
                };
                if level.contains(&partner) {
                    merged.insert(*cube);
                    merged.insert(partner);
                    next.insert(Cube {
                        value: cube.value,
                        free: cube.free | bit,
                    });
                }
            }
        }
        primes.extend(level.iter().filter(|c| !merged.contains(c)).copied());
        level = next;
    }

    let minterms: Vec<u32> = (0..cells.len() as u32)
        .filter(|&c| cells[c as usize] == ON)
        .collect();
    primes.retain(|p| minterms.iter().any(|&m| p.covers(m)));
    // Fewer literals first, then by literal sequence.
    primes.sort_by_key(|p| (width - p.free.count_ones() as usize, literal_key(p, width)));

    let mut chosen: BTreeSet<usize> = BTreeSet::new();
    for &m in &minterms {
        let mut covering = primes.iter().enumerate().filter(|(_, p)| p.covers(m));
        if let (Some((i, _)), None) = (covering.next(), covering.next()) {
            chosen.insert(i);
        }
    }
    let mut uncovered: Vec<u32> = minterms
        .iter()
        .copied()
        .filter(|&m| !chosen.iter().any(|&i| primes[i].covers(m)))
        .collect();
    while !uncovered.is_empty() {
        let (best, _) = primes
            .iter()
            .enumerate()
            .filter(|(i, _)| !chosen.contains(i))
            .map(|(i, p)| (i, uncovered.iter().filter(|&&m| p.covers(m)).count()))
            .fold(
                (usize::MAX, 0),
                |acc, (i, n)| if n > acc.1 { (i, n) } else { acc },
            );
        chosen.insert(best);
        uncovered.retain(|&m| !primes[best].covers(m));
    }
    chosen.into_iter().map(|i| primes[i]).collect()
}

fn literal_key(cube: &Cube, width: usize) -> Vec<(usize, bool)> {
    (0..width)
        .filter(|b| cube.free & (1 << b) == 0)
        .map(|b| (b, cube.value & (1 << b) == 0))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lms() -> FeatureSpace {
        FeatureSpace::from_names(&["LDWS", "Audio", "Visual"], "true").unwrap()
    }

    #[test]
    fn constants_fold() {
        let s = FeatureSpace::from_names(&["A"], "true").unwrap();
        assert_eq!(
            s.normalize(&s.parse("A & true").unwrap()).unwrap(),
            Formula::var("A")
        );
        assert_eq!(
            s.normalize(&s.parse("false | false").unwrap()).unwrap(),
            Formula::False
        );
        assert_eq!(
            s.normalize(&s.parse("A | !A").unwrap()).unwrap(),
            Formula::True
        );
    }

    #[test]
    fn idempotent_disjunction_in_declared_order() {
        let s = lms();
        let f = s.parse("(Visual & Visual) | (Audio & Audio)").unwrap();
        let n = s.normalize(&f).unwrap();
        assert_eq!(n.to_string(), "Audio | Visual");
    }

    #[test]
    fn feature_model_dont_cares() {
        // Under A -> B, `A & B` is just `A`.
        let s = FeatureSpace::from_names(&["A", "B"], "!A | B").unwrap();
        let n = s.normalize(&s.parse("A & B").unwrap()).unwrap();
        assert_eq!(n, Formula::var("A"));
    }

    #[test]
    fn xor_keeps_minterms() {
        let s = FeatureSpace::from_names(&["A", "B"], "true").unwrap();
        let n = s.normalize(&s.parse("A & !B | !A & B").unwrap()).unwrap();
        assert_eq!(n.to_string(), "A & !B | !A & B");
    }

    #[test]
    fn equivalent_inputs_share_normal_form() {
        let s = lms();
        let a = s.parse("Visual & (Audio | LDWS)").unwrap();
        let b = s.parse("Visual & LDWS | Audio & Visual & !false").unwrap();
        assert_eq!(s.normalize(&a).unwrap(), s.normalize(&b).unwrap());
        assert_eq!(
            s.normalize(&a).unwrap().to_string(),
            "LDWS & Visual | Audio & Visual"
        );
    }
}
