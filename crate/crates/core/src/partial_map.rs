//! Partial homeomorphisms: finite partial injections and prefix exchanges.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::topology::{ConstructibleSet, OpenSet, Space, UPPoint, Word};

/// A partial homeomorphism of a [`Space`], in canonical form.
///
/// On the Cantor backend it is a prefix exchange: rules `a_i → b_i` with
/// pairwise incomparable `a_i` and pairwise incomparable `b_i`, sending
/// `a_i·w ↦ b_i·w`. Canonical rule lists have no mergeable sibling groups
/// and are sorted, so map equality is structural equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialMap {
    space: Space,
    repr: MapRepr,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum MapRepr {
    Finite(BTreeMap<usize, usize>),
    Prefix(Vec<(Word, Word)>),
}

/// Fixed points `{x ∈ dom h : h(x) = x}` of a partial map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixRegion {
    pub clopen_part: OpenSet,
    pub isolated_points: Vec<UPPoint>,
}

impl FixRegion {
    pub fn to_set(&self) -> ConstructibleSet {
        let points = ConstructibleSet::from_points(self.clopen_part.space(), &self.isolated_points)
            .expect("points live in the space of the map");
        ConstructibleSet::from(self.clopen_part.clone())
            .union(&points)
            .expect("same space")
    }
}

fn is_prefix(p: &[u8], w: &[u8]) -> bool {
    w.len() >= p.len() && &w[..p.len()] == p
}

fn comparable(a: &[u8], b: &[u8]) -> bool {
    is_prefix(a, b) || is_prefix(b, a)
}

/// Merges sibling groups `{pσ → qσ : σ ∈ Σ}` into `p → q` until none is
/// left, then sorts.
fn canonical_rules(k: usize, mut rules: Vec<(Word, Word)>) -> Vec<(Word, Word)> {
    loop {
        let mut groups: HashMap<(&[u8], &[u8]), Vec<usize>> = HashMap::new();
        for (i, (a, b)) in rules.iter().enumerate() {
            if let (Some(&x), Some(&y)) = (a.last(), b.last()) {
                if x == y {
                    groups.entry((&a[..a.len() - 1], &b[..b.len() - 1])).or_default().push(i);
                }
            }
        }
        let mut merged: Vec<(Word, Word)> = Vec::new();
        let mut drop = vec![false; rules.len()];
        for ((p, q), members) in &groups {
            if members.len() == k {
                merged.push((p.to_vec(), q.to_vec()));
                for &i in members {
                    drop[i] = true;
                }
            }
        }
        if merged.is_empty() {
            break;
        }
        let mut next: Vec<(Word, Word)> = rules
            .into_iter()
            .zip(drop)
            .filter(|(_, d)| !d)
            .map(|(r, _)| r)
            .collect();
        next.extend(merged);
        rules = next;
    }
    rules.sort();
    rules
}

impl PartialMap {
    pub fn identity(space: &Space) -> PartialMap {
        match space {
            Space::Finite(n) => PartialMap {
                space: space.clone(),
                repr: MapRepr::Finite((0..*n).map(|i| (i, i)).collect()),
            },
            Space::Cantor(_) => PartialMap {
                space: space.clone(),
                repr: MapRepr::Prefix(vec![(Vec::new(), Vec::new())]),
            },
        }
    }

    pub fn empty(space: &Space) -> PartialMap {
        match space {
            Space::Finite(_) => PartialMap {
                space: space.clone(),
                repr: MapRepr::Finite(BTreeMap::new()),
            },
            Space::Cantor(_) => PartialMap {
                space: space.clone(),
                repr: MapRepr::Prefix(Vec::new()),
            },
        }
    }

    /// A partial injection of a finite space.
    pub fn finite(space: &Space, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<PartialMap> {
        let Space::Finite(n) = space else {
            return Err(Error::Unsupported("a finite space for point maps"));
        };
        let mut map = BTreeMap::new();
        let mut seen = BTreeSet::new();
        for (i, j) in pairs {
            if i >= *n || j >= *n {
                return Err(Error::InvalidMap(format!("{i} -> {j} leaves a space of size {n}")));
            }
            if map.insert(i, j).is_some_and(|old| old != j) {
                return Err(Error::InvalidMap(format!("point {i} has two images")));
            }
            if !seen.insert(j) && map.values().filter(|&&v| v == j).count() > 1 {
                return Err(Error::InvalidMap(format!("point {j} has two preimages")));
            }
        }
        Ok(PartialMap {
            space: space.clone(),
            repr: MapRepr::Finite(map),
        })
    }

    /// A prefix exchange from its rules.
    pub fn prefix_exchange(space: &Space, rules: Vec<(Word, Word)>) -> Result<PartialMap> {
        let Space::Cantor(alpha) = space else {
            return Err(Error::Unsupported("a Cantor space for prefix exchanges"));
        };
        let k = alpha.len();
        for (a, b) in &rules {
            if a.iter().chain(b).any(|&s| s as usize >= k) {
                return Err(Error::InvalidMap("symbol outside the alphabet".into()));
            }
        }
        for i in 0..rules.len() {
            for j in 0..i {
                let ((a1, b1), (a2, b2)) = (&rules[i], &rules[j]);
                if comparable(a1, a2) {
                    return Err(Error::InvalidMap(format!(
                        "domains [{}] and [{}] overlap",
                        alpha.format_word(a1),
                        alpha.format_word(a2)
                    )));
                }
                if comparable(b1, b2) {
                    return Err(Error::InvalidMap(format!(
                        "ranges [{}] and [{}] overlap",
                        alpha.format_word(b1),
                        alpha.format_word(b2)
                    )));
                }
            }
        }
        Ok(PartialMap {
            space: space.clone(),
            repr: MapRepr::Prefix(canonical_rules(k, rules)),
        })
    }

    /// The identity restricted to a clopen set.
    pub fn identity_on(u: &OpenSet) -> Result<PartialMap> {
        PartialMap::identity(u.space()).restrict(u)
    }

    /// Parses one rule per entry: `a -> b`, `id`, `id on <regex>`
    /// (Cantor), or `i -> j`, `id`, `id on {i,j}` (finite).
    pub fn parse(space: &Space, rules: &[String]) -> Result<PartialMap> {
        let mut acc = PartialMap::empty(space);
        for text in rules {
            let text = text.trim();
            let piece = if text == "id" {
                PartialMap::identity(space)
            } else if let Some(set) = text.strip_prefix("id on") {
                let u = match space {
                    Space::Cantor(_) => OpenSet::from_regex(space, set.trim())?,
                    Space::Finite(_) => OpenSet::from_points(space, parse_point_set(set)?)?,
                };
                PartialMap::identity_on(&u)?
            } else {
                let (a, b) = text
                    .split_once("->")
                    .ok_or_else(|| Error::InvalidMap(format!("rule {text:?} must look like a -> b")))?;
                match space {
                    Space::Cantor(alpha) => {
                        PartialMap::prefix_exchange(space, vec![(alpha.parse_word(a)?, alpha.parse_word(b)?)])?
                    }
                    Space::Finite(_) => {
                        let parse = |s: &str| {
                            s.trim()
                                .parse::<usize>()
                                .map_err(|_| Error::InvalidMap(format!("bad point {s:?} in rule {text:?}")))
                        };
                        PartialMap::finite(space, [(parse(a)?, parse(b)?)])?
                    }
                }
            };
            acc = acc.disjoint_union(&piece)?;
        }
        Ok(acc)
    }

    /// Union of two maps with disjoint domains and disjoint ranges.
    pub fn disjoint_union(&self, other: &PartialMap) -> Result<PartialMap> {
        self.space.check_same(&other.space)?;
        match (&self.repr, &other.repr) {
            (MapRepr::Finite(a), MapRepr::Finite(b)) => {
                PartialMap::finite(&self.space, a.iter().chain(b).map(|(&i, &j)| (i, j)))
            }
            (MapRepr::Prefix(a), MapRepr::Prefix(b)) => {
                PartialMap::prefix_exchange(&self.space, a.iter().chain(b).cloned().collect())
            }
            _ => Err(Error::SpaceMismatch),
        }
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    /// The rules of a prefix exchange.
    pub fn rules(&self) -> Option<&[(Word, Word)]> {
        match &self.repr {
            MapRepr::Prefix(r) => Some(r),
            MapRepr::Finite(_) => None,
        }
    }

    /// The pairs of a finite partial injection.
    pub fn pairs(&self) -> Option<&BTreeMap<usize, usize>> {
        match &self.repr {
            MapRepr::Finite(m) => Some(m),
            MapRepr::Prefix(_) => None,
        }
    }

    fn k(&self) -> usize {
        self.space.alphabet().map_or(0, |a| a.len())
    }

    pub fn is_identity(&self) -> bool {
        *self == PartialMap::identity(&self.space)
    }

    pub fn domain(&self) -> OpenSet {
        match &self.repr {
            MapRepr::Finite(m) => OpenSet::from_points(&self.space, m.keys().copied()).expect("points in range"),
            MapRepr::Prefix(r) => {
                OpenSet::from_words(&self.space, r.iter().map(|(a, _)| a.as_slice())).expect("valid words")
            }
        }
    }

    pub fn range(&self) -> OpenSet {
        self.invert().domain()
    }

    pub fn invert(&self) -> PartialMap {
        let repr = match &self.repr {
            MapRepr::Finite(m) => MapRepr::Finite(m.iter().map(|(&i, &j)| (j, i)).collect()),
            MapRepr::Prefix(r) => {
                MapRepr::Prefix(canonical_rules(self.k(), r.iter().map(|(a, b)| (b.clone(), a.clone())).collect()))
            }
        };
        PartialMap {
            space: self.space.clone(),
            repr,
        }
    }

    /// `self ∘ g`: apply `g` first, then `self`, on `g⁻¹(dom self ∩ ran g)`.
    pub fn compose(&self, g: &PartialMap) -> Result<PartialMap> {
        self.space.check_same(&g.space)?;
        let repr = match (&self.repr, &g.repr) {
            (MapRepr::Finite(f), MapRepr::Finite(gm)) => {
                MapRepr::Finite(gm.iter().filter_map(|(&x, y)| f.get(y).map(|&z| (x, z))).collect())
            }
            (MapRepr::Prefix(f), MapRepr::Prefix(gr)) => {
                let mut rules = Vec::new();
                for (a, b) in gr {
                    for (c, d) in f {
                        if is_prefix(b, c) {
                            // c = b·e: the rule applies on [a·e]
                            let mut ae = a.clone();
                            ae.extend_from_slice(&c[b.len()..]);
                            rules.push((ae, d.clone()));
                        } else if is_prefix(c, b) {
                            // b = c·e: all of [a] lands in [c]
                            let mut de = d.clone();
                            de.extend_from_slice(&b[c.len()..]);
                            rules.push((a.clone(), de));
                        }
                    }
                }
                MapRepr::Prefix(canonical_rules(self.k(), rules))
            }
            _ => return Err(Error::SpaceMismatch),
        };
        Ok(PartialMap {
            space: self.space.clone(),
            repr,
        })
    }

    /// Restriction to a clopen set.
    pub fn restrict(&self, u: &OpenSet) -> Result<PartialMap> {
        self.space.check_same(u.space())?;
        match &self.repr {
            MapRepr::Finite(m) => {
                let keep = u.members().expect("finite backend");
                PartialMap::finite(&self.space, m.iter().filter(|(i, _)| keep.contains(i)).map(|(&i, &j)| (i, j)))
            }
            MapRepr::Prefix(r) => {
                let words = u.cylinders()?;
                let mut rules = Vec::new();
                for (a, b) in r {
                    for w in &words {
                        if is_prefix(a, w) {
                            let mut bw = b.clone();
                            bw.extend_from_slice(&w[a.len()..]);
                            rules.push((w.clone(), bw));
                        } else if is_prefix(w, a) {
                            rules.push((a.clone(), b.clone()));
                        }
                    }
                }
                Ok(PartialMap {
                    space: self.space.clone(),
                    repr: MapRepr::Prefix(canonical_rules(self.k(), rules)),
                })
            }
        }
    }

    /// The rule whose domain contains `x`.
    pub fn rule_at(&self, x: &UPPoint) -> Option<(&[u8], &[u8])> {
        match &self.repr {
            MapRepr::Prefix(r) => r.iter().find(|(a, _)| x.has_prefix(a)).map(|(a, b)| (a.as_slice(), b.as_slice())),
            MapRepr::Finite(_) => None,
        }
    }

    pub fn contains(&self, x: &UPPoint) -> bool {
        match (&self.repr, x) {
            (MapRepr::Finite(m), UPPoint::Index(i)) => m.contains_key(i),
            (MapRepr::Prefix(_), UPPoint::Periodic { .. }) => self.rule_at(x).is_some(),
            _ => false,
        }
    }

    pub fn apply(&self, x: &UPPoint) -> Result<UPPoint> {
        let outside = || Error::OutsideDomain {
            point: x.display(&self.space).to_string(),
        };
        match (&self.repr, x) {
            (MapRepr::Finite(m), UPPoint::Index(i)) => m.get(i).map(|&j| UPPoint::Index(j)).ok_or_else(outside),
            (MapRepr::Prefix(_), UPPoint::Periodic { .. }) => {
                let (a, b) = self.rule_at(x).ok_or_else(outside)?;
                Ok(x.shift(a.len()).prepend(b))
            }
            _ => Err(Error::SpaceMismatch),
        }
    }

    /// `{x ∈ dom f : f(x) ∈ u}`.
    pub fn preimage(&self, u: &OpenSet) -> Result<OpenSet> {
        self.space.check_same(u.space())?;
        match &self.repr {
            MapRepr::Finite(m) => {
                let members = u.members().expect("finite backend");
                OpenSet::from_points(&self.space, m.iter().filter(|(_, j)| members.contains(j)).map(|(&i, _)| i))
            }
            MapRepr::Prefix(r) => Ok(u.pull_back(r)),
        }
    }

    /// `f(u ∩ dom f)`.
    pub fn image(&self, u: &OpenSet) -> Result<OpenSet> {
        self.invert().preimage(u)
    }

    /// Largest open set on which `self` and `g` agree as maps.
    pub fn local_agreement(&self, g: &PartialMap) -> Result<OpenSet> {
        self.space.check_same(&g.space)?;
        match (&self.repr, &g.repr) {
            (MapRepr::Finite(f), MapRepr::Finite(gm)) => OpenSet::from_points(
                &self.space,
                f.iter().filter(|(i, j)| gm.get(i) == Some(j)).map(|(&i, _)| i),
            ),
            (MapRepr::Prefix(f), MapRepr::Prefix(gr)) => {
                let mut words: Vec<&[u8]> = Vec::new();
                for (a, b) in f {
                    for (c, d) in gr {
                        if is_prefix(a, c) {
                            // on [c] = [a·e], f sends to b·e
                            if is_prefix(b, d) && d[b.len()..] == c[a.len()..] {
                                words.push(c);
                            }
                        } else if is_prefix(c, a) && is_prefix(d, b) && b[d.len()..] == a[c.len()..] {
                            words.push(a);
                        }
                    }
                }
                OpenSet::from_words(&self.space, words)
            }
            _ => Err(Error::SpaceMismatch),
        }
    }

    pub fn fix_region(&self) -> FixRegion {
        match &self.repr {
            MapRepr::Finite(m) => FixRegion {
                clopen_part: OpenSet::from_points(&self.space, m.iter().filter(|(i, j)| i == j).map(|(&i, _)| i))
                    .expect("points in range"),
                isolated_points: Vec::new(),
            },
            MapRepr::Prefix(r) => {
                let mut clopen = Vec::new();
                let mut points = Vec::new();
                for (a, b) in r {
                    if a == b {
                        clopen.push(a.as_slice());
                    } else if comparable(a, b) {
                        // shorter·c^ω solves w = c·w after the common prefix
                        let (short, long) = if a.len() < b.len() { (a, b) } else { (b, a) };
                        let c = long[short.len()..].to_vec();
                        points.push(UPPoint::periodic(short.clone(), c).expect("nonempty period"));
                    }
                }
                points.sort();
                FixRegion {
                    clopen_part: OpenSet::from_words(&self.space, clopen).expect("valid words"),
                    isolated_points: points,
                }
            }
        }
    }

    /// Germ of the map at `x` as a single stripped rule: the rule at `x`
    /// with the longest common suffix of its two sides removed. Two maps
    /// agree near `x` iff their stripped rules at `x` coincide.
    pub fn germ_rule(&self, x: &UPPoint) -> Option<(Word, Word)> {
        let (a, b) = self.rule_at(x)?;
        let mut n = 0;
        while n < a.len() && n < b.len() && a[a.len() - 1 - n] == b[b.len() - 1 - n] {
            n += 1;
        }
        Some((a[..a.len() - n].to_vec(), b[..b.len() - n].to_vec()))
    }
}

pub(crate) fn parse_point_set(text: &str) -> Result<Vec<usize>> {
    let inner = text
        .trim()
        .strip_prefix('{')
        .and_then(|t| t.strip_suffix('}'))
        .ok_or_else(|| Error::Parse(format!("point set {text:?} must look like {{i,j}}")))?;
    inner
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad point {s:?}")))
        })
        .collect()
}

impl fmt::Display for PartialMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = match &self.repr {
            MapRepr::Finite(m) => m.iter().map(|(i, j)| format!("{i} -> {j}")).collect(),
            MapRepr::Prefix(r) => {
                let alpha = self.space.alphabet().expect("cantor space");
                r.iter()
                    .map(|(a, b)| format!("{} -> {}", alpha.format_word(a), alpha.format_word(b)))
                    .collect()
            }
        };
        write!(f, "{{{}}}", items.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Space {
        Space::cantor("01").unwrap()
    }

    fn map(rules: &[&str]) -> PartialMap {
        PartialMap::parse(&x(), &rules.iter().map(|s| s.to_string()).collect::<Vec<_>>()).unwrap()
    }

    fn pt(s: &str) -> UPPoint {
        UPPoint::parse(&x(), s).unwrap()
    }

    #[test]
    fn siblings_merge() {
        assert_eq!(map(&["0 -> 00", "1 -> 01"]), map(&["ε -> 0"]));
        assert_eq!(map(&["0 -> 0", "1 -> 1"]), PartialMap::identity(&x()));
        assert_eq!(map(&["00 -> 00", "01 -> 01", "1 -> 1"]), PartialMap::identity(&x()));
        assert_ne!(map(&["0 -> 1", "1 -> 0"]), PartialMap::identity(&x()));
    }

    #[test]
    fn overlapping_rules_rejected() {
        let s = x();
        assert!(PartialMap::prefix_exchange(&s, vec![(vec![0], vec![0]), (vec![0, 1], vec![1])]).is_err());
        assert!(PartialMap::prefix_exchange(&s, vec![(vec![0], vec![1]), (vec![1], vec![1, 0])]).is_err());
        assert!(PartialMap::finite(&Space::finite(2).unwrap(), [(0, 1), (1, 1)]).is_err());
    }

    #[test]
    fn compose_and_invert() {
        let v0 = map(&["ε -> 0"]);
        assert!(v0.invert().compose(&v0).unwrap().is_identity());
        assert_eq!(v0.compose(&v0).unwrap(), map(&["ε -> 00"]));
        assert_eq!(v0.compose(&v0.invert()).unwrap(), map(&["0 -> 0"]));
        let v1 = map(&["ε -> 1"]);
        assert_eq!(v0.invert().compose(&v1).unwrap(), PartialMap::empty(&x()));
    }

    #[test]
    fn restriction() {
        let s = x();
        let one = OpenSet::cylinder(&s, &[1]).unwrap();
        assert_eq!(PartialMap::identity(&s).restrict(&one).unwrap(), map(&["1 -> 1"]));
        let l = OpenSet::from_regex(&s, "0*1").unwrap();
        assert!(matches!(PartialMap::identity(&s).restrict(&l), Err(Error::NotClopen(_))));
    }

    #[test]
    fn fixed_points() {
        let f = map(&["ε -> 0"]).fix_region();
        assert!(f.clopen_part.is_empty());
        assert_eq!(f.isolated_points, vec![pt("(0)")]);
        let g = map(&["1 -> 1"]).fix_region();
        assert_eq!(g.clopen_part, OpenSet::cylinder(&x(), &[1]).unwrap());
        assert!(g.isolated_points.is_empty());
        let h = map(&["0 -> 1"]).fix_region();
        assert!(h.clopen_part.is_empty() && h.isolated_points.is_empty());
        // 01·w ↦ 0·w fixes exactly 0·1^ω
        let k = map(&["01 -> 0"]).fix_region();
        assert_eq!(k.isolated_points, vec![pt("0(1)")]);
    }

    #[test]
    fn agreement_loci() {
        let s = x();
        let v0 = map(&["ε -> 0"]);
        assert!(v0.local_agreement(&map(&["0 -> 00", "1 -> 01"])).unwrap().is_full());
        let swap = map(&["0 -> 1", "1 -> 0"]);
        assert!(PartialMap::identity(&s).local_agreement(&swap).unwrap().is_empty());
        assert_eq!(swap.local_agreement(&swap).unwrap(), swap.domain());
        let half = map(&["0 -> 1", "1 -> 0"]).local_agreement(&map(&["0 -> 1", "1 -> 00"])).unwrap();
        assert_eq!(half, OpenSet::cylinder(&s, &[0]).unwrap());
    }

    #[test]
    fn apply_image_preimage() {
        let s = x();
        let v0 = map(&["ε -> 0"]);
        assert_eq!(v0.apply(&pt("(1)")).unwrap(), pt("0(1)"));
        assert_eq!(v0.image(&OpenSet::full(&s)).unwrap(), OpenSet::cylinder(&s, &[0]).unwrap());
        let l = OpenSet::from_regex(&s, "0*1").unwrap();
        let pre = map(&["0 -> 00", "1 -> 01"]).preimage(&l).unwrap();
        assert_eq!(pre, l.union(&OpenSet::cylinder(&s, &[1]).unwrap()).unwrap());
        assert!(matches!(map(&["0 -> 1"]).apply(&pt("(1)")), Err(Error::OutsideDomain { .. })));
    }

    #[test]
    fn germ_rules_strip_common_suffix() {
        let f = map(&["00 -> 10", "01 -> 11"]);
        assert_eq!(f, map(&["0 -> 1"]));
        let g = map(&["ε -> 0"]);
        assert_eq!(g.germ_rule(&pt("1(0)")), Some((vec![], vec![0])));
    }
}
