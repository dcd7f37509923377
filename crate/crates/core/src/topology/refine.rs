use std::collections::BTreeMap;

use super::constructible::ConstructibleSet;
use super::dfa::Graph;
use super::open::OpenSet;
use super::{Space, UPPoint};
use crate::error::Result;

/// One atom of the partition generated by a family of sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Atom {
    /// Membership of the atom in each input set.
    pub pattern: Vec<bool>,
    /// A deterministic point of the atom.
    pub sample: UPPoint,
    pub set: ConstructibleSet,
}

/// The nonempty atoms of the Boolean algebra generated by a family of sets,
/// kept symbolically: atom sets are only built on request.
///
/// Atoms are ordered by pattern, with membership sorting before
/// non-membership, so the atom inside every set comes first.
#[derive(Clone, Debug)]
pub struct Refinement {
    space: Space,
    sets: Vec<ConstructibleSet>,
    patterns: Vec<Vec<bool>>,
    samples: Vec<UPPoint>,
}

impl Refinement {
    pub fn new(space: &Space, sets: &[ConstructibleSet]) -> Result<Refinement> {
        for s in sets {
            space.check_same(s.space())?;
        }
        let mut found: BTreeMap<Vec<bool>, (Vec<bool>, UPPoint)> = BTreeMap::new();
        let sort_key = |p: &[bool]| p.iter().map(|b| !b).collect::<Vec<bool>>();
        match space {
            Space::Finite(_) => {
                for x in space.points().expect("finite space") {
                    let pattern: Vec<bool> = sets.iter().map(|s| s.contains(&x)).collect();
                    found.entry(sort_key(&pattern)).or_insert((pattern, x));
                }
            }
            Space::Cantor(_) => {
                let refs: Vec<&ConstructibleSet> = sets.iter().collect();
                let (product, ranges) = ConstructibleSet::product_of(space, &refs);
                let graph = Graph::new(product.k, product.delta.clone());
                let mut state_pattern = Vec::with_capacity(product.len());
                let mut buf = vec![false; sets.len()];
                for t in &product.tuples {
                    ConstructibleSet::fill_pattern(&refs, &ranges, t, &mut buf);
                    state_pattern.push(buf.clone());
                }
                let mut distinct: Vec<Vec<bool>> = (0..graph.len())
                    .filter(|&q| graph.cyclic[q])
                    .map(|q| state_pattern[q].clone())
                    .collect();
                distinct.sort();
                distinct.dedup();
                let mut labelled = super::constructible::Labelled::new(graph, Vec::new());
                for pattern in distinct {
                    labelled.label = state_pattern.iter().map(|p| *p == pattern).collect();
                    let sample = labelled.sample().expect("pattern taken on a cycle state");
                    found.insert(sort_key(&pattern), (pattern, sample));
                }
            }
        }
        let (patterns, samples) = found.into_values().unzip();
        Ok(Refinement {
            space: space.clone(),
            sets: sets.to_vec(),
            patterns,
            samples,
        })
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn patterns(&self) -> &[Vec<bool>] {
        &self.patterns
    }

    pub fn samples(&self) -> &[UPPoint] {
        &self.samples
    }

    pub fn sets(&self) -> &[ConstructibleSet] {
        &self.sets
    }

    /// Index of the atom containing `x`.
    pub fn atom_of(&self, x: &UPPoint) -> Option<usize> {
        let pattern: Vec<bool> = self.sets.iter().map(|s| s.contains(x)).collect();
        self.patterns.iter().position(|p| *p == pattern)
    }

    pub fn atom_set(&self, i: usize) -> ConstructibleSet {
        self.union_of(&[i])
    }

    /// Union of the atoms with the given indices.
    pub fn union_of(&self, ids: &[usize]) -> ConstructibleSet {
        let wanted: Vec<&Vec<bool>> = ids.iter().map(|&i| &self.patterns[i]).collect();
        let refs: Vec<&ConstructibleSet> = self.sets.iter().collect();
        ConstructibleSet::combine(&self.space, &refs, |p| wanted.iter().any(|w| w.as_slice() == p))
            .expect("sets share the space")
    }

    pub fn atoms(&self) -> Vec<Atom> {
        (0..self.len())
            .map(|i| Atom {
                pattern: self.patterns[i].clone(),
                sample: self.samples[i].clone(),
                set: self.atom_set(i),
            })
            .collect()
    }
}

/// The nonempty atoms of the Boolean algebra generated by `sets`.
pub fn atoms(space: &Space, sets: &[OpenSet]) -> Result<Vec<Atom>> {
    let sets: Vec<ConstructibleSet> = sets.iter().cloned().map(ConstructibleSet::from).collect();
    Ok(Refinement::new(space, &sets)?.atoms())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Space {
        Space::cantor("01").unwrap()
    }

    #[test]
    fn atoms_of_a_cylinder() {
        let s = x();
        let a = atoms(&s, &[OpenSet::cylinder(&s, &[0]).unwrap()]).unwrap();
        assert_eq!(a.len(), 2);
        assert_eq!(a[0].set, OpenSet::cylinder(&s, &[0]).unwrap().into());
        assert_eq!(a[1].set, OpenSet::cylinder(&s, &[1]).unwrap().into());
    }

    #[test]
    fn atoms_of_a_dense_open_set() {
        let s = x();
        let l = OpenSet::from_regex(&s, "0*1").unwrap();
        let a = atoms(&s, std::slice::from_ref(&l)).unwrap();
        assert_eq!(a.len(), 2);
        assert_eq!(a[0].set, l.into());
        let zero = UPPoint::parse(&s, "(0)").unwrap();
        assert_eq!(a[1].set, ConstructibleSet::point(&s, &zero).unwrap());
        assert_eq!(a[1].sample, zero);
    }

    #[test]
    fn finite_atoms() {
        let s = Space::finite(3).unwrap();
        let a = atoms(&s, &[OpenSet::from_points(&s, [0, 2]).unwrap()]).unwrap();
        assert_eq!(a.len(), 2);
        assert_eq!(a[0].sample, UPPoint::Index(0));
        assert_eq!(a[1].sample, UPPoint::Index(1));
    }
}
