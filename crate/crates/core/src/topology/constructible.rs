use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use super::dfa::{Dfa, Graph, Product};
use super::open::{OpenRepr, OpenSet};
use super::{Space, UPPoint};
use crate::error::{Error, Result};

/// Boolean operations on constructible sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SetOp {
    Union,
    Intersect,
    Minus,
}

impl SetOp {
    fn eval(self, a: bool, b: bool) -> bool {
        match self {
            SetOp::Union => a || b,
            SetOp::Intersect => a && b,
            SetOp::Minus => a && !b,
        }
    }
}

/// A set in the Boolean algebra generated by the open sets of a space.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConstructibleSet {
    space: Space,
    repr: ConsRepr,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum ConsRepr {
    Finite(BTreeSet<usize>),
    /// Canonical open sets `O1 ⊆ O2 ⊆ ...` with `Fi = X∖Oi` the difference
    /// chain. A point lies in the set iff it misses an odd number of them.
    Cantor(Vec<Dfa>),
}

/// Maximum length of a difference chain before the computation is declared
/// broken. Chains of sets arising from automata with `n` states are shorter
/// than `2n + 2`, so this only trips on internal errors.
fn chain_cap(states: usize) -> usize {
    2 * states + 2
}

/// Transition graph of a product automaton together with a per-state label.
/// The label is constant on strongly connected components, and the point
/// `x` belongs to the set iff the component its run eventually stays in is
/// labelled `true`.
pub(crate) struct Labelled {
    pub graph: Graph,
    pub label: Vec<bool>,
}

impl Labelled {
    pub fn new(graph: Graph, label: Vec<bool>) -> Labelled {
        Labelled { graph, label }
    }

    fn dfa(&self, accept: Vec<bool>) -> Dfa {
        Dfa {
            k: self.graph.k,
            start: 0,
            delta: self.graph.delta.clone(),
            accept,
        }
        .canonical_open()
    }

    /// Kuratowski difference chain of the set, as canonical complements.
    pub fn chain(&self) -> Vec<Dfa> {
        let n = self.graph.len();
        let mut pred = self.label.clone();
        let mut keep_members = false;
        let mut out = Vec::new();
        for _ in 0..chain_cap(n) {
            // reach = closure of the current set, as a set of states
            let reach = self.graph.reaches_cycle(|q| pred[q]);
            if !reach[0] {
                return out;
            }
            out.push(self.dfa(reach.iter().map(|r| !r).collect()));
            pred = (0..n).map(|q| reach[q] && self.label[q] == keep_members).collect();
            keep_members = !keep_members;
        }
        panic!("difference chain exceeded {} steps", chain_cap(n));
    }

    /// Interior: points with a prefix after which every continuation stays
    /// in the set.
    pub fn interior(&self) -> Dfa {
        let outside = self.graph.reaches_cycle(|q| !self.label[q]);
        self.dfa(outside.iter().map(|o| !o).collect())
    }

    /// Open complement of the closure.
    pub fn exterior(&self) -> Dfa {
        let inside = self.graph.reaches_cycle(|q| self.label[q]);
        self.dfa(inside.iter().map(|o| !o).collect())
    }

    /// Meagre iff no bottom component is labelled `true`: a bottom component
    /// carries a nonempty open set of points that stay in it, and a union of
    /// non-bottom components is a countable union of nowhere dense sets.
    pub fn is_meagre(&self) -> bool {
        let bottom = self.graph.bottom();
        !(0..self.graph.len()).any(|q| bottom[q] && self.label[q])
    }

    /// Shortlex-least access word of a `true` cycle state, followed by the
    /// greedy least-letter cycle inside that state's component.
    pub fn sample(&self) -> Option<UPPoint> {
        let g = &self.graph;
        let mut parent: Vec<Option<(u32, u8)>> = vec![None; g.len()];
        let mut seen = vec![false; g.len()];
        seen[0] = true;
        let mut queue = VecDeque::from([0u32]);
        let mut target = None;
        while let Some(q) = queue.pop_front() {
            if g.cyclic[q as usize] && self.label[q as usize] {
                target = Some(q);
                break;
            }
            for a in 0..g.k as u8 {
                let t = g.step(q, a);
                if !seen[t as usize] {
                    seen[t as usize] = true;
                    parent[t as usize] = Some((q, a));
                    queue.push_back(t);
                }
            }
        }
        let s = target?;
        let mut access = Vec::new();
        let mut q = s;
        while let Some((p, a)) = parent[q as usize] {
            access.push(a);
            q = p;
        }
        access.reverse();
        let c = g.comp[s as usize];
        let mut visited = vec![s];
        let mut word = Vec::new();
        let mut q = s;
        loop {
            let a = (0..g.k as u8)
                .find(|&a| g.comp[g.step(q, a) as usize] == c)
                .expect("cycle state has an edge inside its component");
            word.push(a);
            q = g.step(q, a);
            if let Some(j) = visited.iter().position(|&v| v == q) {
                access.extend_from_slice(&word[..j]);
                return Some(UPPoint::periodic(access, word[j..].to_vec()).expect("nonempty period"));
            }
            visited.push(q);
        }
    }

    /// All points of the set if there are finitely many (at most `cap`).
    pub fn finite_points(&self, cap: usize) -> Option<Vec<UPPoint>> {
        let g = &self.graph;
        let n = g.len();
        let mut comps: Vec<u32> = (0..n)
            .filter(|&q| g.cyclic[q] && self.label[q])
            .map(|q| g.comp[q])
            .collect();
        comps.sort_unstable();
        comps.dedup();
        let mut out = Vec::new();
        for c in comps {
            let members: Vec<usize> = (0..n).filter(|&q| g.comp[q] == c).collect();
            // a simple cycle: each member has exactly one edge inside
            let mut next_in = HashMap::new();
            for &q in &members {
                let inside: Vec<u8> = (0..g.k as u8)
                    .filter(|&a| g.comp[g.step(q as u32, a) as usize] == c)
                    .collect();
                if inside.len() != 1 {
                    return None;
                }
                next_in.insert(q, inside[0]);
            }
            let in_c: Vec<bool> = (0..n).map(|q| g.comp[q] == c).collect();
            let reach = g.backward_reach(&in_c);
            if (0..n).any(|q| reach[q] && !in_c[q] && g.cyclic[q]) {
                return None;
            }
            // enumerate paths through the acyclic part into the cycle
            let mut stack = vec![(0u32, Vec::new())];
            while let Some((q, w)) = stack.pop() {
                if in_c[q as usize] {
                    let mut period = Vec::new();
                    let mut r = q;
                    loop {
                        let a = next_in[&(r as usize)];
                        period.push(a);
                        r = g.step(r, a);
                        if r == q {
                            break;
                        }
                    }
                    out.push(UPPoint::periodic(w, period).expect("nonempty period"));
                    if out.len() > cap {
                        return None;
                    }
                    continue;
                }
                for a in (0..g.k as u8).rev() {
                    let t = g.step(q, a);
                    if reach[t as usize] {
                        let mut w2 = w.clone();
                        w2.push(a);
                        stack.push((t, w2));
                    }
                }
            }
        }
        out.sort();
        Some(out)
    }
}

/// Parity of the number of chain members missed by a product state.
fn chain_member(chain: &[Dfa], tuple: &[u32]) -> bool {
    chain
        .iter()
        .zip(tuple)
        .filter(|(d, &q)| !d.accept[q as usize])
        .count()
        % 2
        == 1
}

impl ConstructibleSet {
    fn cantor(space: &Space, chain: Vec<Dfa>) -> ConstructibleSet {
        ConstructibleSet {
            space: space.clone(),
            repr: ConsRepr::Cantor(chain),
        }
    }

    fn finite(space: &Space, set: BTreeSet<usize>) -> ConstructibleSet {
        ConstructibleSet {
            space: space.clone(),
            repr: ConsRepr::Finite(set),
        }
    }

    pub fn empty(space: &Space) -> ConstructibleSet {
        OpenSet::empty(space).into()
    }

    pub fn full(space: &Space) -> ConstructibleSet {
        OpenSet::full(space).into()
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    /// The singleton `{x}`.
    pub fn point(space: &Space, x: &UPPoint) -> Result<ConstructibleSet> {
        match (space, x) {
            (Space::Finite(n), UPPoint::Index(i)) if i < n => Ok(ConstructibleSet::finite(space, BTreeSet::from([*i]))),
            (Space::Cantor(a), UPPoint::Periodic { prefix, period }) => {
                // states 0..len track the position along x; `len` is the
                // accepting sink reached on the first mismatch
                let k = a.len();
                let (u, v) = (prefix.len(), period.len());
                let len = u + v;
                let sink = len as u32;
                let mut delta = vec![sink; (len + 1) * k];
                for i in 0..len {
                    let (letter, next) = if i < u {
                        (prefix[i], i + 1)
                    } else {
                        (period[i - u], if i + 1 == len { u } else { i + 1 })
                    };
                    delta[i * k + letter as usize] = next as u32;
                }
                let mut accept = vec![false; len + 1];
                accept[len] = true;
                let others = Dfa {
                    k,
                    start: 0,
                    delta,
                    accept,
                }
                .canonical_open();
                Ok(OpenSet::from_dfa(space, others).complement())
            }
            _ => Err(Error::SpaceMismatch),
        }
    }

    pub fn from_points<'a>(space: &Space, points: impl IntoIterator<Item = &'a UPPoint>) -> Result<ConstructibleSet> {
        let mut acc = ConstructibleSet::empty(space);
        for p in points {
            acc = acc.union(&ConstructibleSet::point(space, p)?)?;
        }
        Ok(acc)
    }

    /// The set of points whose membership pattern in `sets` satisfies `f`.
    pub fn combine(space: &Space, sets: &[&ConstructibleSet], f: impl Fn(&[bool]) -> bool) -> Result<ConstructibleSet> {
        for s in sets {
            space.check_same(&s.space)?;
        }
        match space {
            Space::Finite(n) => {
                let mut pattern = vec![false; sets.len()];
                let members = (0..*n)
                    .filter(|i| {
                        for (slot, s) in pattern.iter_mut().zip(sets) {
                            *slot = s.finite_set().contains(i);
                        }
                        f(&pattern)
                    })
                    .collect();
                Ok(ConstructibleSet::finite(space, members))
            }
            Space::Cantor(_) => Ok(ConstructibleSet::cantor(space, Self::labelled_of(space, sets, f).chain())),
        }
    }

    /// Product automaton of the chains of `sets`, labelled by `f` applied to
    /// the membership pattern. Cantor backend only.
    pub(crate) fn labelled_of(space: &Space, sets: &[&ConstructibleSet], f: impl Fn(&[bool]) -> bool) -> Labelled {
        let (product, ranges) = Self::product_of(space, sets);
        let mut pattern = vec![false; sets.len()];
        let label = product
            .tuples
            .iter()
            .map(|t| {
                Self::fill_pattern(sets, &ranges, t, &mut pattern);
                f(&pattern)
            })
            .collect();
        Labelled::new(Graph::new(product.k, product.delta), label)
    }

    pub(crate) fn product_of(space: &Space, sets: &[&ConstructibleSet]) -> (Product, Vec<(usize, usize)>) {
        let k = space.alphabet().expect("cantor space").len();
        let mut parts: Vec<&Dfa> = Vec::new();
        let mut ranges = Vec::with_capacity(sets.len());
        for s in sets {
            let chain = s.chain();
            ranges.push((parts.len(), parts.len() + chain.len()));
            parts.extend(chain.iter());
        }
        (Product::new(k, &parts), ranges)
    }

    pub(crate) fn fill_pattern(sets: &[&ConstructibleSet], ranges: &[(usize, usize)], tuple: &[u32], out: &mut [bool]) {
        for ((slot, s), &(lo, hi)) in out.iter_mut().zip(sets).zip(ranges) {
            *slot = chain_member(s.chain(), &tuple[lo..hi]);
        }
    }

    fn finite_set(&self) -> &BTreeSet<usize> {
        match &self.repr {
            ConsRepr::Finite(s) => s,
            ConsRepr::Cantor(_) => unreachable!("finite backend expected"),
        }
    }

    pub(crate) fn chain(&self) -> &[Dfa] {
        match &self.repr {
            ConsRepr::Cantor(c) => c,
            ConsRepr::Finite(_) => unreachable!("cantor backend expected"),
        }
    }

    fn labelled(&self) -> Labelled {
        Self::labelled_of(&self.space, &[self], |p| p[0])
    }

    pub fn apply(&self, op: SetOp, other: &ConstructibleSet) -> Result<ConstructibleSet> {
        Self::combine(&self.space, &[self, other], |p| op.eval(p[0], p[1]))
    }

    pub fn union(&self, other: &ConstructibleSet) -> Result<ConstructibleSet> {
        self.apply(SetOp::Union, other)
    }

    pub fn intersect(&self, other: &ConstructibleSet) -> Result<ConstructibleSet> {
        self.apply(SetOp::Intersect, other)
    }

    pub fn minus(&self, other: &ConstructibleSet) -> Result<ConstructibleSet> {
        self.apply(SetOp::Minus, other)
    }

    pub fn complement(&self) -> ConstructibleSet {
        Self::combine(&self.space, &[self], |p| !p[0]).expect("same space")
    }

    pub fn contains(&self, x: &UPPoint) -> bool {
        match (&self.repr, x) {
            (ConsRepr::Finite(s), UPPoint::Index(i)) => s.contains(i),
            (ConsRepr::Cantor(chain), UPPoint::Periodic { .. }) => {
                let missed = chain
                    .iter()
                    .filter(|d| !OpenSet::from_dfa(&self.space, (*d).clone()).contains(x))
                    .count();
                missed % 2 == 1
            }
            _ => false,
        }
    }

    pub fn is_empty(&self) -> bool {
        match &self.repr {
            ConsRepr::Finite(s) => s.is_empty(),
            ConsRepr::Cantor(c) => c.is_empty(),
        }
    }

    pub fn is_subset(&self, other: &ConstructibleSet) -> Result<bool> {
        Ok(self.minus(other)?.is_empty())
    }

    pub fn interior(&self) -> OpenSet {
        match &self.repr {
            ConsRepr::Finite(s) => OpenSet::from_points(&self.space, s.iter().copied()).expect("points in range"),
            ConsRepr::Cantor(_) => OpenSet::from_dfa(&self.space, self.labelled().interior()),
        }
    }

    pub fn closure(&self) -> ConstructibleSet {
        match &self.repr {
            ConsRepr::Finite(_) => self.clone(),
            ConsRepr::Cantor(_) => OpenSet::from_dfa(&self.space, self.labelled().exterior()).complement(),
        }
    }

    /// The set as an open set, if it is open.
    pub fn as_open(&self) -> Option<OpenSet> {
        let interior = self.interior();
        (ConstructibleSet::from(interior.clone()) == *self).then_some(interior)
    }

    pub fn is_open(&self) -> bool {
        self.as_open().is_some()
    }

    pub fn is_closed(&self) -> bool {
        self.complement().is_open()
    }

    pub fn is_clopen(&self) -> bool {
        self.as_open().is_some_and(|o| o.is_clopen())
    }

    /// Decided on the automaton directly: some state has only `true` cycle
    /// states below it.
    pub fn has_empty_interior(&self) -> bool {
        match &self.repr {
            ConsRepr::Finite(s) => s.is_empty(),
            ConsRepr::Cantor(_) => {
                let l = self.labelled();
                let outside = l.graph.reaches_cycle(|q| !l.label[q]);
                outside.iter().all(|&o| o)
            }
        }
    }

    /// Decided through the closure: `int(cl S) = ∅` iff the exterior of `S`
    /// is dense, i.e. its canonical automaton has no dead state.
    pub fn is_nowhere_dense(&self) -> bool {
        match &self.repr {
            ConsRepr::Finite(s) => s.is_empty(),
            ConsRepr::Cantor(_) => {
                let ext = self.labelled().exterior();
                !ext.dead_states().iter().any(|&d| d)
            }
        }
    }

    /// Decided through bottom components. In a Baire space a constructible
    /// set is meagre iff it has empty interior, and the test suite checks
    /// that both routes agree.
    pub fn is_meagre(&self) -> bool {
        match &self.repr {
            ConsRepr::Finite(s) => s.is_empty(),
            ConsRepr::Cantor(_) => self.labelled().is_meagre(),
        }
    }

    /// A deterministic point of the set, `None` if it is empty.
    pub fn sample_point(&self) -> Option<UPPoint> {
        match &self.repr {
            ConsRepr::Finite(s) => s.iter().next().map(|&i| UPPoint::Index(i)),
            ConsRepr::Cantor(_) => self.labelled().sample(),
        }
    }

    /// All points of the set in sorted order, if there are at most `cap`.
    pub fn finite_points(&self, cap: usize) -> Option<Vec<UPPoint>> {
        match &self.repr {
            ConsRepr::Finite(s) => (s.len() <= cap).then(|| s.iter().map(|&i| UPPoint::Index(i)).collect()),
            ConsRepr::Cantor(c) if c.is_empty() => Some(Vec::new()),
            ConsRepr::Cantor(_) => self.labelled().finite_points(cap),
        }
    }
}

impl From<OpenSet> for ConstructibleSet {
    fn from(u: OpenSet) -> ConstructibleSet {
        let space = u.space().clone();
        match u.repr() {
            OpenRepr::Finite(s) => ConstructibleSet::finite(&space, s.clone()),
            OpenRepr::Cantor(d) => {
                let l = Labelled::new(Graph::new(d.k, d.delta.clone()), d.accept.clone());
                ConstructibleSet::cantor(&space, l.chain())
            }
        }
    }
}

impl fmt::Display for ConstructibleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(open) = self.as_open() {
            let text = open.to_string();
            if text.ends_with('…') {
                if let Some(points) = self.complement().finite_points(16) {
                    let items: Vec<String> = points.iter().map(|p| p.display(&self.space).to_string()).collect();
                    return write!(f, "X ∖ {{{}}}", items.join(", "));
                }
            }
            return write!(f, "{text}");
        }
        if let Some(points) = self.finite_points(16) {
            let items: Vec<String> = points.iter().map(|p| p.display(&self.space).to_string()).collect();
            return write!(f, "{{{}}}", items.join(", "));
        }
        let complement = self.complement();
        if let Some(open) = complement.as_open() {
            return write!(f, "X ∖ ({open})");
        }
        // (F1 ∖ F2) ∪ (F3 ∖ F4) ∪ ... with Fi = X ∖ Oi
        let chain = self.chain();
        let closed: Vec<String> = chain
            .iter()
            .map(|d| format!("X∖({})", OpenSet::from_dfa(&self.space, d.clone())))
            .collect();
        let terms: Vec<String> = closed
            .chunks(2)
            .map(|pair| match pair {
                [a, b] => format!("({a}) ∖ ({b})"),
                [a] => format!("({a})"),
                _ => unreachable!(),
            })
            .collect();
        write!(f, "{}", terms.join(" ∪ "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Space {
        Space::cantor("01").unwrap()
    }

    fn open(re: &str) -> OpenSet {
        OpenSet::from_regex(&x(), re).unwrap()
    }

    fn pt(s: &str) -> UPPoint {
        UPPoint::parse(&x(), s).unwrap()
    }

    #[test]
    fn closure_of_open_cylinder_family() {
        let l = open("0*1");
        let cl = l.closure();
        assert_eq!(cl, ConstructibleSet::full(&x()));
        let boundary = cl.minus(&l.into()).unwrap();
        assert_eq!(boundary.finite_points(4), Some(vec![pt("(0)")]));
    }

    #[test]
    fn singleton_round_trip() {
        let p = pt("1(01)");
        let s = ConstructibleSet::point(&x(), &p).unwrap();
        assert!(s.contains(&p));
        assert!(s.contains(&pt("(10)")));
        assert!(!s.contains(&pt("(1)")));
        assert_eq!(s.finite_points(4), Some(vec![p.clone()]));
        assert_eq!(s.sample_point(), Some(p));
        assert!(s.is_closed());
        assert!(!s.is_open());
        assert!(s.has_empty_interior());
        assert!(s.is_nowhere_dense());
        assert!(s.is_meagre());
    }

    #[test]
    fn three_routes_on_a_dense_codense_set() {
        // a dense open set and its nowhere dense complement {0^ω}
        let l: ConstructibleSet = open("0*1").into();
        assert!(!l.has_empty_interior());
        assert!(!l.is_nowhere_dense());
        assert!(!l.is_meagre());
        let c = l.complement();
        assert!(c.has_empty_interior());
        assert!(c.is_nowhere_dense());
        assert!(c.is_meagre());
    }

    #[test]
    fn chain_of_open_minus_point() {
        let u: ConstructibleSet = open("0").into();
        let p = ConstructibleSet::point(&x(), &pt("(0)")).unwrap();
        let s = u.minus(&p).unwrap();
        assert!(s.is_open());
        let t = s.union(&ConstructibleSet::point(&x(), &pt("(1)")).unwrap()).unwrap();
        assert!(!t.is_open());
        assert!(!t.is_closed());
        assert!(t.contains(&pt("(1)")));
        assert!(t.contains(&pt("0(1)")));
        assert!(!t.contains(&pt("(0)")));
        assert!(!t.contains(&pt("10(1)")));
        assert_eq!(t.chain().len(), 2);
    }

    #[test]
    fn finite_backend() {
        let s = Space::finite(4).unwrap();
        let a: ConstructibleSet = OpenSet::from_points(&s, [0, 1]).unwrap().into();
        let b: ConstructibleSet = OpenSet::from_points(&s, [1, 2]).unwrap().into();
        let m = a.minus(&b).unwrap();
        assert_eq!(m.finite_points(8), Some(vec![UPPoint::Index(0)]));
        assert!(m.is_clopen());
        assert!(!m.is_meagre());
        assert!(ConstructibleSet::empty(&s).is_meagre());
    }

    #[test]
    fn infinite_sets_have_no_point_list() {
        let l: ConstructibleSet = open("0*1").into();
        assert_eq!(l.finite_points(100), None);
    }
}
