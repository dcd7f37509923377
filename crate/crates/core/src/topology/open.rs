use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use super::constructible::ConstructibleSet;
use super::dfa::{Dfa, Graph, Product};
use super::{regex, Space, UPPoint, Word};
use crate::error::{Error, Result};

/// An open subset of a [`Space`], in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OpenSet {
    space: Space,
    repr: OpenRepr,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) enum OpenRepr {
    Finite(BTreeSet<usize>),
    Cantor(Dfa),
}

impl OpenSet {
    pub(crate) fn from_dfa(space: &Space, dfa: Dfa) -> OpenSet {
        OpenSet {
            space: space.clone(),
            repr: OpenRepr::Cantor(dfa),
        }
    }

    pub(crate) fn repr(&self) -> &OpenRepr {
        &self.repr
    }

    pub fn empty(space: &Space) -> OpenSet {
        let repr = match space {
            Space::Finite(_) => OpenRepr::Finite(BTreeSet::new()),
            Space::Cantor(a) => OpenRepr::Cantor(Dfa::constant(a.len(), false)),
        };
        OpenSet {
            space: space.clone(),
            repr,
        }
    }

    pub fn full(space: &Space) -> OpenSet {
        let repr = match space {
            Space::Finite(n) => OpenRepr::Finite((0..*n).collect()),
            Space::Cantor(a) => OpenRepr::Cantor(Dfa::constant(a.len(), true)),
        };
        OpenSet {
            space: space.clone(),
            repr,
        }
    }

    /// The cylinder `[word]` of the Cantor backend.
    pub fn cylinder(space: &Space, word: &[u8]) -> Result<OpenSet> {
        match space {
            Space::Cantor(a) => {
                if word.iter().any(|&s| s as usize >= a.len()) {
                    return Err(Error::Parse("symbol outside the alphabet".into()));
                }
                Ok(OpenSet::from_dfa(space, Dfa::cylinder(a.len(), word)))
            }
            Space::Finite(_) => Err(Error::Unsupported("a Cantor space for cylinders")),
        }
    }

    /// Union of the cylinders of the given words.
    pub fn from_words<'a>(space: &Space, words: impl IntoIterator<Item = &'a [u8]>) -> Result<OpenSet> {
        let mut acc = OpenSet::empty(space);
        for w in words {
            acc = acc.union(&OpenSet::cylinder(space, w)?)?;
        }
        Ok(acc)
    }

    /// A subset of a finite space (every subset is open there).
    pub fn from_points(space: &Space, points: impl IntoIterator<Item = usize>) -> Result<OpenSet> {
        match space {
            Space::Finite(n) => {
                let set: BTreeSet<usize> = points.into_iter().collect();
                if let Some(&bad) = set.iter().find(|&&i| i >= *n) {
                    return Err(Error::Parse(format!("point {bad} outside space of size {n}")));
                }
                Ok(OpenSet {
                    space: space.clone(),
                    repr: OpenRepr::Finite(set),
                })
            }
            Space::Cantor(_) => Err(Error::Unsupported("a finite space for point lists")),
        }
    }

    /// Scenario syntax: `X` for the whole space, `{i,j}` for points of a
    /// finite space, otherwise a regular expression over the alphabet.
    pub fn parse(space: &Space, text: &str) -> Result<OpenSet> {
        match (space, text.trim()) {
            (_, "X") => Ok(OpenSet::full(space)),
            (Space::Finite(_), t) => OpenSet::from_points(space, crate::partial_map::parse_point_set(t)?),
            (Space::Cantor(_), t) => OpenSet::from_regex(space, t),
        }
    }

    /// `⋃ { [w] : w ∈ L(regex) }`.
    pub fn from_regex(space: &Space, text: &str) -> Result<OpenSet> {
        match space {
            Space::Cantor(a) => Ok(OpenSet::from_dfa(space, regex::compile(a, text)?)),
            Space::Finite(_) => Err(Error::Unsupported("a Cantor space for regular expressions")),
        }
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    /// Members of a finite-space open set.
    pub fn members(&self) -> Option<&BTreeSet<usize>> {
        match &self.repr {
            OpenRepr::Finite(s) => Some(s),
            OpenRepr::Cantor(_) => None,
        }
    }

    fn combine(&self, other: &OpenSet, both: bool) -> Result<OpenSet> {
        self.space.check_same(&other.space)?;
        let repr = match (&self.repr, &other.repr) {
            (OpenRepr::Finite(a), OpenRepr::Finite(b)) => OpenRepr::Finite(if both {
                a.intersection(b).copied().collect()
            } else {
                a.union(b).copied().collect()
            }),
            (OpenRepr::Cantor(a), OpenRepr::Cantor(b)) => {
                let p = Product::new(a.k, &[a, b]);
                let accept = p
                    .tuples
                    .iter()
                    .map(|t| {
                        let (x, y) = (a.accept[t[0] as usize], b.accept[t[1] as usize]);
                        if both {
                            x && y
                        } else {
                            x || y
                        }
                    })
                    .collect();
                OpenRepr::Cantor(p.open_from(accept))
            }
            _ => return Err(Error::SpaceMismatch),
        };
        Ok(OpenSet {
            space: self.space.clone(),
            repr,
        })
    }

    pub fn union(&self, other: &OpenSet) -> Result<OpenSet> {
        self.combine(other, false)
    }

    pub fn intersect(&self, other: &OpenSet) -> Result<OpenSet> {
        self.combine(other, true)
    }

    pub fn minus(&self, other: &OpenSet) -> Result<ConstructibleSet> {
        self.to_constructible().minus(&other.to_constructible())
    }

    pub fn complement(&self) -> ConstructibleSet {
        self.to_constructible().complement()
    }

    pub fn to_constructible(&self) -> ConstructibleSet {
        ConstructibleSet::from(self.clone())
    }

    pub fn is_empty(&self) -> bool {
        match &self.repr {
            OpenRepr::Finite(s) => s.is_empty(),
            OpenRepr::Cantor(d) => !d.accept.iter().any(|&a| a),
        }
    }

    pub fn is_full(&self) -> bool {
        match &self.repr {
            OpenRepr::Finite(s) => Some(s.len()) == self.space.points().map(|p| p.len()),
            OpenRepr::Cantor(d) => d.accept[d.start as usize],
        }
    }

    pub fn is_subset(&self, other: &OpenSet) -> Result<bool> {
        Ok(&self.intersect(other)? == self)
    }

    pub fn contains(&self, x: &UPPoint) -> bool {
        match (&self.repr, x) {
            (OpenRepr::Finite(s), UPPoint::Index(i)) => s.contains(i),
            (OpenRepr::Cantor(d), UPPoint::Periodic { prefix, period }) => {
                let mut q = d.run(prefix);
                for _ in 0..=d.len() {
                    q = d.run_from(q, period);
                }
                d.accept[q as usize]
            }
            _ => false,
        }
    }

    /// Largest open set disjoint from `self`: the interior of its complement.
    pub fn exterior(&self) -> OpenSet {
        match &self.repr {
            OpenRepr::Finite(s) => OpenSet {
                space: self.space.clone(),
                repr: OpenRepr::Finite(
                    (0..self.space.points().map_or(0, |p| p.len()))
                        .filter(|i| !s.contains(i))
                        .collect(),
                ),
            },
            OpenRepr::Cantor(d) => {
                let dead = d.dead_states();
                OpenSet::from_dfa(
                    &self.space,
                    Dfa {
                        accept: dead,
                        ..d.clone()
                    }
                    .canonical_open(),
                )
            }
        }
    }

    /// Topological closure.
    pub fn closure(&self) -> ConstructibleSet {
        self.exterior().complement()
    }

    pub fn is_clopen(&self) -> bool {
        match &self.repr {
            OpenRepr::Finite(_) => true,
            OpenRepr::Cantor(d) => {
                let dead = d.dead_states();
                let g = Graph::new(d.k, d.delta.clone());
                (0..d.len()).all(|q| d.accept[q] || dead[q] || !g.cyclic[q])
            }
        }
    }

    /// The minimal words `w` with `[w] ⊆ U`, which partition a clopen set
    /// into cylinders. Errors for non-clopen sets.
    pub fn cylinders(&self) -> Result<Vec<Word>> {
        let OpenRepr::Cantor(d) = &self.repr else {
            return Err(Error::Unsupported("a Cantor space for cylinder decompositions"));
        };
        if !self.is_clopen() {
            return Err(Error::NotClopen(self.to_string()));
        }
        let dead = d.dead_states();
        let mut out = Vec::new();
        let mut queue = VecDeque::from([(d.start, Vec::new())]);
        while let Some((q, w)) = queue.pop_front() {
            if d.accept[q as usize] {
                out.push(w);
                continue;
            }
            if dead[q as usize] {
                continue;
            }
            for a in 0..d.k as u8 {
                let mut w2 = w.clone();
                w2.push(a);
                queue.push_back((d.step(q, a), w2));
            }
        }
        Ok(out)
    }

    /// The first `limit` minimal words of the set in breadth-first order,
    /// and whether more exist.
    pub fn minimal_words(&self, limit: usize) -> (Vec<Word>, bool) {
        let OpenRepr::Cantor(d) = &self.repr else {
            return (Vec::new(), false);
        };
        let dead = d.dead_states();
        let mut out = Vec::new();
        let mut queue = VecDeque::from([(d.start, Vec::new())]);
        while let Some((q, w)) = queue.pop_front() {
            if d.accept[q as usize] {
                if out.len() == limit {
                    return (out, true);
                }
                out.push(w);
                continue;
            }
            if dead[q as usize] {
                continue;
            }
            for a in 0..d.k as u8 {
                let mut w2 = w.clone();
                w2.push(a);
                queue.push_back((d.step(q, a), w2));
            }
        }
        (out, false)
    }

    /// Deterministic sample: the shortest, lexicographically least word `w`
    /// with `[w] ⊆ U`, continued by the least letter forever.
    pub fn sample_point(&self) -> Result<UPPoint> {
        match &self.repr {
            OpenRepr::Finite(s) => s.iter().next().map(|&i| UPPoint::Index(i)).ok_or(Error::EmptySet),
            OpenRepr::Cantor(_) => {
                let (words, _) = self.minimal_words(1);
                let w = words.into_iter().next().ok_or(Error::EmptySet)?;
                UPPoint::periodic(w, vec![0])
            }
        }
    }

    /// `⋃_i [from_i] ∩ { from_i·w : to_i·w ∈ U }` for prefix-free `from_i`:
    /// the preimage of `self` under the prefix exchange `from_i·w ↦ to_i·w`.
    pub(crate) fn pull_back(&self, rules: &[(Word, Word)]) -> OpenSet {
        let OpenRepr::Cantor(d) = &self.repr else {
            unreachable!("pull_back is only used on the Cantor backend")
        };
        let k = d.k;
        // trie of the `from` words, then a copy of `d`, then a dead state
        let mut trie: Vec<Vec<Option<usize>>> = vec![vec![None; k]];
        let mut leaf_target: Vec<Option<u32>> = vec![None];
        for (from, to) in rules {
            let mut node = 0;
            for &a in from {
                node = match trie[node][a as usize] {
                    Some(c) => c,
                    None => {
                        trie.push(vec![None; k]);
                        leaf_target.push(None);
                        let c = trie.len() - 1;
                        trie[node][a as usize] = Some(c);
                        c
                    }
                };
            }
            leaf_target[node] = Some(d.run(to));
        }
        let t = trie.len() as u32;
        let dead = t + d.len() as u32;
        let resolve = |node: usize| -> u32 {
            match leaf_target[node] {
                Some(q) => t + q,
                None => node as u32,
            }
        };
        let mut delta = Vec::with_capacity((dead as usize + 1) * k);
        for node in 0..trie.len() {
            for a in 0..k {
                delta.push(match trie[node][a] {
                    Some(c) => resolve(c),
                    None => dead,
                });
            }
        }
        for q in 0..d.len() {
            for a in 0..k {
                delta.push(t + d.delta[q * k + a]);
            }
        }
        delta.extend(std::iter::repeat_n(dead, k));
        let mut accept = vec![false; trie.len()];
        accept.extend(d.accept.iter().copied());
        accept.push(false);
        OpenSet::from_dfa(
            &self.space,
            Dfa {
                k,
                start: resolve(0),
                delta,
                accept,
            }
            .canonical_open(),
        )
    }
}

impl fmt::Display for OpenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            OpenRepr::Finite(s) => {
                let items: Vec<String> = s.iter().map(|i| i.to_string()).collect();
                write!(f, "{{{}}}", items.join(","))
            }
            OpenRepr::Cantor(_) => {
                if self.is_empty() {
                    return write!(f, "∅");
                }
                if self.is_full() {
                    return write!(f, "X");
                }
                let alpha = self.space.alphabet().expect("cantor space");
                let (words, more) = self.minimal_words(8);
                let parts: Vec<String> = words.iter().map(|w| format!("[{}]", alpha.format_word(w))).collect();
                write!(f, "{}", parts.join(" ∪ "))?;
                if more {
                    write!(f, " ∪ …")?;
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Space {
        Space::cantor("01").unwrap()
    }

    fn pt(s: &str) -> UPPoint {
        UPPoint::parse(&x(), s).unwrap()
    }

    #[test]
    fn depth_one_cylinders_cover() {
        let s = x();
        let u = OpenSet::cylinder(&s, &[0]).unwrap().union(&OpenSet::cylinder(&s, &[1]).unwrap()).unwrap();
        assert_eq!(u, OpenSet::full(&s));
    }

    #[test]
    fn intersection_with_cylinder() {
        let s = x();
        let l = OpenSet::from_regex(&s, "0*1").unwrap();
        let one = OpenSet::cylinder(&s, &[1]).unwrap();
        assert_eq!(l.intersect(&one).unwrap(), one);
    }

    #[test]
    fn membership_and_samples() {
        let s = x();
        let l = OpenSet::from_regex(&s, "0*1").unwrap();
        assert!(!l.contains(&pt("(0)")));
        assert!(l.contains(&pt("01(1)")));
        assert!(l.contains(&pt("000(01)")));
        assert_eq!(OpenSet::full(&s).sample_point().unwrap(), pt("(0)"));
        assert_eq!(l.sample_point().unwrap(), pt("1(0)"));
        assert!(matches!(OpenSet::empty(&s).sample_point(), Err(Error::EmptySet)));
    }

    #[test]
    fn clopen_detection() {
        let s = x();
        assert!(OpenSet::cylinder(&s, &[0, 1]).unwrap().is_clopen());
        assert!(!OpenSet::from_regex(&s, "0*1").unwrap().is_clopen());
        let c = OpenSet::from_regex(&s, "00|1").unwrap();
        assert_eq!(c.cylinders().unwrap(), vec![vec![1], vec![0, 0]]);
        assert!(OpenSet::from_regex(&s, "0*1").unwrap().cylinders().is_err());
    }

    #[test]
    fn mixed_spaces_rejected() {
        let a = OpenSet::full(&x());
        let b = OpenSet::full(&Space::cantor("ab").unwrap());
        assert!(matches!(a.union(&b), Err(Error::SpaceMismatch)));
        let c = OpenSet::full(&Space::finite(2).unwrap());
        assert!(matches!(a.intersect(&c), Err(Error::SpaceMismatch)));
    }

    #[test]
    fn pull_back_strips_prefix() {
        let s = x();
        let l = OpenSet::from_regex(&s, "0*1").unwrap();
        // the map w ↦ 0w, written as {0 -> 00, 1 -> 01}
        let pre = l.pull_back(&[(vec![0], vec![0, 0]), (vec![1], vec![0, 1])]);
        assert_eq!(pre, l);
        let pre2 = l.pull_back(&[(vec![], vec![1])]);
        assert!(pre2.is_full());
    }

    #[test]
    fn display_lists_minimal_words() {
        let s = x();
        assert_eq!(OpenSet::from_regex(&s, "00|1").unwrap().to_string(), "[1] ∪ [00]");
        assert_eq!(
            OpenSet::from_regex(&s, "0*1").unwrap().to_string(),
            "[1] ∪ [01] ∪ [001] ∪ [0001] ∪ [00001] ∪ [000001] ∪ [0000001] ∪ [00000001] ∪ …"
        );
    }
}
