//! Germ systems: presentations of étale groupoids of germs.
//!
//! A system has labels `t` with partial homeomorphisms `h_t`, a label
//! multiplication with `h_{tu} = h_t ∘ h_u`, and witness open sets
//! `D_{t,u}`: the germs `[t,x]` and `[u,x]` coincide iff `x ∈ D_{t,u}`.
//!
//! * Regime A: labels are the elements of a finite inverse semigroup acting
//!   by partial maps, and `D_{t,u}` is the union of the domains of the
//!   elements below both `t` and `u`.
//! * Regime B: labels are the prefix exchanges generated by finitely many
//!   generators, with `D_{t,u}` the local agreement set of `h_t` and `h_u`.
//!   The label set is infinite in general and enumerated up to a bound.
//! * Regime C: a finite label table with user supplied witness sets,
//!   checked against every axiom.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::error::{Error, Result};
use crate::partial_map::PartialMap;
use crate::semigroup::{InverseSemigroup, MapMonoid, TableViolation};
use crate::topology::{ConstructibleSet, OpenSet, Space, UPPoint};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Regime {
    A,
    B,
    C,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Regime::A => "A",
            Regime::B => "B",
            Regime::C => "C",
        };
        f.write_str(s)
    }
}

/// A label of a germ system: an index into the label table (regimes A and
/// C) or a canonical prefix exchange (regime B).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Index(usize),
    Map(Arc<PartialMap>),
}

/// A germ `[t, x]`, stored with the canonical label of its class.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Arrow {
    pub label: Label,
    pub source: UPPoint,
}

/// The open bisection `{[t,x] : x ∈ U}` for clopen `U ⊆ dom h_t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slice {
    pub label: Label,
    pub set: OpenSet,
}

/// A failed germ system axiom. Points are rendered in scenario syntax.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("the label table axioms: {0}")]
    Table(TableViolation),
    #[error("the unit axiom: h_{unit} is {map}, not the identity")]
    UnitMap { unit: String, map: String },
    #[error("the diagonal axiom: D_{{{t},{t}}} differs from dom h_{t}")]
    Diagonal { t: String },
    #[error("the symmetry axiom: D_{{{t},{u}}} ≠ D_{{{u},{t}}} at {point}")]
    Symmetry { t: String, u: String, point: String },
    #[error("the containment axiom: D_{{{t},{u}}} contains {point} outside dom h_{t} ∩ dom h_{u}")]
    Containment { t: String, u: String, point: String },
    #[error("the agreement axiom: D_{{{t},{u}}} contains {point}, where h_{t} and h_{u} do not agree locally")]
    Agreement { t: String, u: String, point: String },
    #[error("the transitivity axiom: {point} lies in D_{{{t},{u}}} ∩ D_{{{u},{w}}} but not in D_{{{t},{w}}}")]
    Transitivity { t: String, u: String, w: String, point: String },
    #[error("the action axiom: h_{tu} ≠ h_{t} ∘ h_{u} (they differ at {point})")]
    Action { t: String, u: String, tu: String, point: String },
    #[error("the star axiom: h_{tstar} is not the inverse of h_{t}")]
    StarMap { t: String, tstar: String },
    #[error("the right multiplicativity axiom: {point} lies in h_{w}⁻¹(D_{{{t},{u}}}) but not in D_{{{tw},{uw}}} (t={t}, u={u}, w={w})")]
    RightMultiplicativity { t: String, u: String, w: String, tw: String, uw: String, point: String },
    #[error("the star compatibility axiom: h_{t}(D_{{{t},{u}}}) contains {point} outside D_{{{tstar},{ustar}}}")]
    StarCompatibility { t: String, u: String, tstar: String, ustar: String, point: String },
}

#[derive(Clone, Debug)]
struct Table {
    names: Vec<String>,
    unit: usize,
    mul: Vec<usize>,
    star: Vec<usize>,
    maps: Vec<PartialMap>,
    doms: Vec<OpenSet>,
    witness: Vec<OpenSet>,
    semigroup: Option<InverseSemigroup>,
}

#[derive(Clone, Debug)]
struct Pseudo {
    gens: Vec<(String, PartialMap)>,
    bound: usize,
    /// Shortest generator word of each map reachable within `bound`.
    words: OnceLock<HashMap<PartialMap, String>>,
}

#[derive(Clone, Debug)]
enum Body {
    Table(Table),
    Pseudo(Pseudo),
}

/// A groupoid presentation in one of the three regimes.
#[derive(Clone, Debug)]
pub struct GermSystem {
    space: Space,
    regime: Regime,
    body: Body,
}

fn show(space: &Space, x: &UPPoint) -> String {
    x.display(space).to_string()
}

impl GermSystem {
    /// Regime A from a finite inverse semigroup acting by `maps`.
    pub fn regime_a(space: &Space, semigroup: InverseSemigroup, maps: Vec<PartialMap>) -> Result<GermSystem> {
        let n = semigroup.len();
        if maps.len() != n {
            return Err(Error::Parse(format!("{} maps given for {n} elements", maps.len())));
        }
        for m in &maps {
            space.check_same(m.space())?;
        }
        let doms: Vec<OpenSet> = maps.iter().map(|m| m.domain()).collect();
        let mut witness = Vec::with_capacity(n * n);
        let masks: Option<Vec<u64>> = match space {
            Space::Finite(points) if *points <= 64 => Some(
                doms.iter()
                    .map(|d| d.members().expect("finite backend").iter().fold(0u64, |m, &i| m | 1 << i))
                    .collect(),
            ),
            _ => None,
        };
        for t in 0..n {
            for u in 0..n {
                let below = semigroup.meet_witnesses(t, u);
                let d = match &masks {
                    Some(masks) => {
                        let m = below.iter().fold(0u64, |acc, &v| acc | masks[v]);
                        OpenSet::from_points(space, (0..64).filter(|i| m >> i & 1 == 1))?
                    }
                    None => below
                        .into_iter()
                        .fold(OpenSet::empty(space), |acc, v| acc.union(&doms[v]).expect("same space")),
                };
                witness.push(d);
            }
        }
        let table = Table {
            names: semigroup.names().to_vec(),
            unit: semigroup.unit(),
            mul: (0..n).flat_map(|t| (0..n).map(move |u| (t, u))).map(|(t, u)| semigroup.mul(t, u)).collect(),
            star: (0..n).map(|t| semigroup.star(t)).collect(),
            maps,
            doms,
            witness,
            semigroup: Some(semigroup),
        };
        let gs = GermSystem {
            space: space.clone(),
            regime: Regime::A,
            body: Body::Table(table),
        };
        gs.validate()?;
        Ok(gs)
    }

    /// Regime A from a monoid of partial maps.
    pub fn from_monoid(monoid: MapMonoid) -> Result<GermSystem> {
        let space = monoid.maps[0].space().clone();
        GermSystem::regime_a(&space, monoid.semigroup, monoid.maps)
    }

    /// Regime B: the pseudogroup generated by prefix exchanges. `bound` is
    /// the default composition length for enumerations.
    pub fn regime_b(space: &Space, gens: Vec<(String, PartialMap)>, bound: usize) -> Result<GermSystem> {
        if !matches!(space, Space::Cantor(_)) {
            return Err(Error::Unsupported("a Cantor space for regime B"));
        }
        for (name, g) in &gens {
            space.check_same(g.space())?;
            if name.is_empty() || name == "1" || name.contains(char::is_whitespace) || name.contains('*') {
                return Err(Error::Parse(format!("bad generator name {name:?}")));
            }
        }
        let gs = GermSystem {
            space: space.clone(),
            regime: Regime::B,
            body: Body::Pseudo(Pseudo {
                gens,
                bound: bound.max(1),
                words: OnceLock::new(),
            }),
        };
        gs.validate()?;
        Ok(gs)
    }

    /// Regime C: explicit label table, maps, and witness sets. Pairs not
    /// listed in `witnesses` get `D_{t,u} = ∅` off the diagonal and
    /// `D_{t,t} = dom h_t` on it. The result is validated.
    pub fn regime_c(
        space: &Space,
        names: Vec<String>,
        table: Vec<Vec<usize>>,
        stars: Option<Vec<usize>>,
        maps: Vec<PartialMap>,
        witnesses: Vec<((usize, usize), OpenSet)>,
    ) -> Result<GermSystem> {
        let gs = GermSystem::regime_c_unchecked(space, names, table, stars, maps, witnesses)?;
        gs.validate()?;
        Ok(gs)
    }

    /// As [`GermSystem::regime_c`], but without running the axiom checks
    /// beyond those needed to build the system. Used by `validate`.
    pub fn regime_c_unchecked(
        space: &Space,
        names: Vec<String>,
        table: Vec<Vec<usize>>,
        stars: Option<Vec<usize>>,
        maps: Vec<PartialMap>,
        witnesses: Vec<((usize, usize), OpenSet)>,
    ) -> Result<GermSystem> {
        let n = names.len();
        if maps.len() != n {
            return Err(Error::Parse(format!("{} maps given for {n} labels", maps.len())));
        }
        let unit = names
            .iter()
            .position(|s| s == "1")
            .ok_or_else(|| Error::Parse("label set must contain the unit label 1".into()))?;
        let semigroup = InverseSemigroup::new(names.clone(), &table, unit, stars.as_deref()).map_err(Violation::Table)?;
        for m in &maps {
            space.check_same(m.space())?;
        }
        let doms: Vec<OpenSet> = maps.iter().map(|m| m.domain()).collect();
        let mut witness: Vec<Option<OpenSet>> = vec![None; n * n];
        for ((t, u), d) in witnesses {
            space.check_same(d.space())?;
            if t >= n || u >= n {
                return Err(Error::Parse("witness names an unknown label".into()));
            }
            for (a, b) in [(t, u), (u, t)] {
                if witness[a * n + b].as_ref().is_some_and(|old| *old != d) {
                    return Err(Error::Parse(format!("witness for ({}, {}) given twice", names[t], names[u])));
                }
                witness[a * n + b] = Some(d.clone());
            }
        }
        let witness = witness
            .into_iter()
            .enumerate()
            .map(|(i, d)| {
                d.unwrap_or_else(|| {
                    if i / n == i % n {
                        doms[i / n].clone()
                    } else {
                        OpenSet::empty(space)
                    }
                })
            })
            .collect();
        Ok(GermSystem {
            space: space.clone(),
            regime: Regime::C,
            body: Body::Table(Table {
                names,
                unit,
                mul: table.iter().flatten().copied().collect(),
                star: (0..n).map(|t| semigroup.star(t)).collect(),
                maps,
                doms,
                witness,
                semigroup: None,
            }),
        })
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    /// Default composition bound (regime B), `None` for finite label sets.
    pub fn default_bound(&self) -> Option<usize> {
        match &self.body {
            Body::Pseudo(p) => Some(p.bound),
            Body::Table(_) => None,
        }
    }

    /// Whether the label set is finite and fully enumerated.
    pub fn is_exact(&self) -> bool {
        matches!(self.body, Body::Table(_))
    }

    /// The abstract semigroup of a regime A system.
    pub fn semigroup(&self) -> Option<&InverseSemigroup> {
        match &self.body {
            Body::Table(t) => t.semigroup.as_ref(),
            Body::Pseudo(_) => None,
        }
    }

    pub fn generators(&self) -> Option<&[(String, PartialMap)]> {
        match &self.body {
            Body::Pseudo(p) => Some(&p.gens),
            Body::Table(_) => None,
        }
    }

    pub fn unit(&self) -> Label {
        match &self.body {
            Body::Table(t) => Label::Index(t.unit),
            Body::Pseudo(_) => Label::Map(Arc::new(PartialMap::identity(&self.space))),
        }
    }

    /// All labels (regimes A, C), or the distinct compositions of at most
    /// `bound` generators and inverses (regime B), identity first.
    pub fn labels(&self, bound: usize) -> Vec<Label> {
        self.named_labels(bound).into_iter().map(|(_, l)| l).collect()
    }

    /// Labels with display names. Regime B names are generator words.
    pub fn named_labels(&self, bound: usize) -> Vec<(String, Label)> {
        match &self.body {
            Body::Table(t) => t.names.iter().cloned().enumerate().map(|(i, n)| (n, Label::Index(i))).collect(),
            Body::Pseudo(p) => {
                let mut letters = Vec::new();
                for (name, g) in &p.gens {
                    letters.push((name.clone(), g.clone()));
                    letters.push((format!("{name}*"), g.invert()));
                }
                let identity = PartialMap::identity(&self.space);
                let mut out = vec![("1".to_string(), identity.clone())];
                let mut seen: HashMap<PartialMap, ()> = HashMap::from([(identity, ())]);
                let mut queue = VecDeque::from([(0usize, 0usize)]);
                while let Some((i, len)) = queue.pop_front() {
                    if len == bound {
                        continue;
                    }
                    for (lname, l) in &letters {
                        let next = out[i].1.compose(l).expect("same space");
                        if seen.insert(next.clone(), ()).is_none() {
                            let name = if i == 0 { lname.clone() } else { format!("{} {lname}", out[i].0) };
                            out.push((name, next));
                            queue.push_back((out.len() - 1, len + 1));
                        }
                    }
                }
                out.into_iter().map(|(n, m)| (n, Label::Map(Arc::new(m)))).collect()
            }
        }
    }

    /// Display name of a label.
    pub fn name(&self, t: &Label) -> String {
        match (t, &self.body) {
            (Label::Index(i), Body::Table(tb)) => tb.names[*i].clone(),
            (Label::Map(m), Body::Pseudo(p)) => {
                let words = p.words.get_or_init(|| {
                    self.named_labels(p.bound)
                        .into_iter()
                        .filter_map(|(n, l)| match l {
                            Label::Map(m) => Some((PartialMap::clone(&m), n)),
                            Label::Index(_) => None,
                        })
                        .collect()
                });
                words.get(m.as_ref()).cloned().unwrap_or_else(|| m.to_string())
            }
            (Label::Map(m), _) => m.to_string(),
            (Label::Index(i), Body::Pseudo(_)) => format!("#{i}"),
        }
    }

    /// Parses a label name, or a space separated word of names (regimes A,
    /// C) or generators (regime B) such as `v0* v1`, read as the product
    /// `v0*·v1` acting by `h_{v0*} ∘ h_{v1}`.
    pub fn parse_label(&self, text: &str) -> Result<Label> {
        let text = text.trim();
        match &self.body {
            Body::Table(t) => {
                let find = |name: &str| {
                    t.names
                        .iter()
                        .position(|n| n == name)
                        .ok_or_else(|| Error::UnknownLabel(name.to_string()))
                };
                if let Ok(i) = find(text) {
                    return Ok(Label::Index(i));
                }
                let mut acc = t.unit;
                for tok in text.split_whitespace() {
                    acc = t.mul[acc * t.names.len() + find(tok)?];
                }
                Ok(Label::Index(acc))
            }
            Body::Pseudo(p) => {
                let mut acc = PartialMap::identity(&self.space);
                for tok in text.split_whitespace() {
                    if tok == "1" {
                        continue;
                    }
                    let (base, inverse) = match tok.strip_suffix('*') {
                        Some(b) => (b, true),
                        None => (tok, false),
                    };
                    let g = p
                        .gens
                        .iter()
                        .find(|(n, _)| n == base)
                        .map(|(_, g)| g)
                        .ok_or_else(|| Error::UnknownLabel(tok.to_string()))?;
                    let g = if inverse { g.invert() } else { g.clone() };
                    acc = acc.compose(&g)?;
                }
                Ok(Label::Map(Arc::new(acc)))
            }
        }
    }

    fn index(&self, t: &Label) -> usize {
        match t {
            Label::Index(i) => *i,
            Label::Map(_) => panic!("map label used with a label table"),
        }
    }

    pub fn map<'a>(&'a self, t: &'a Label) -> &'a PartialMap {
        match (t, &self.body) {
            (Label::Index(i), Body::Table(tb)) => &tb.maps[*i],
            (Label::Map(m), _) => m,
            (Label::Index(_), Body::Pseudo(_)) => panic!("index label used in regime B"),
        }
    }

    pub fn dom(&self, t: &Label) -> OpenSet {
        match &self.body {
            Body::Table(tb) => tb.doms[self.index(t)].clone(),
            Body::Pseudo(_) => self.map(t).domain(),
        }
    }

    pub fn mul(&self, t: &Label, u: &Label) -> Label {
        match &self.body {
            Body::Table(tb) => {
                let n = tb.names.len();
                Label::Index(tb.mul[self.index(t) * n + self.index(u)])
            }
            Body::Pseudo(_) => Label::Map(Arc::new(self.map(t).compose(self.map(u)).expect("same space"))),
        }
    }

    pub fn star(&self, t: &Label) -> Label {
        match &self.body {
            Body::Table(tb) => Label::Index(tb.star[self.index(t)]),
            Body::Pseudo(_) => Label::Map(Arc::new(self.map(t).invert())),
        }
    }

    /// The witness set `D_{t,u}`.
    pub fn witness(&self, t: &Label, u: &Label) -> OpenSet {
        match &self.body {
            Body::Table(tb) => tb.witness[self.index(t) * tb.names.len() + self.index(u)].clone(),
            Body::Pseudo(_) => self.map(t).local_agreement(self.map(u)).expect("same space"),
        }
    }

    /// `[t,x] = [u,x]`.
    pub fn germ_eq(&self, t: &Label, u: &Label, x: &UPPoint) -> bool {
        match &self.body {
            Body::Table(_) => self.witness(t, u).contains(x),
            Body::Pseudo(_) => match (self.map(t).germ_rule(x), self.map(u).germ_rule(x)) {
                (Some(a), Some(b)) => a == b,
                _ => false,
            },
        }
    }

    /// The germ `[t, x]` with its canonical label: the least label index
    /// germ-equal to `t` at `x` (regimes A, C) or the single stripped rule
    /// of `h_t` at `x` (regime B).
    pub fn arrow(&self, t: &Label, x: &UPPoint) -> Result<Arrow> {
        let m = self.map(t);
        if !m.contains(x) {
            return Err(Error::OutsideDomain { point: show(&self.space, x) });
        }
        let label = match &self.body {
            Body::Table(tb) => {
                let i = self.index(t);
                let n = tb.names.len();
                let s = (0..n)
                    .find(|&s| tb.witness[i * n + s].contains(x))
                    .ok_or_else(|| Error::Invariant(format!("{x:?} lies in dom but not in D_{{t,t}}")))?;
                Label::Index(s)
            }
            Body::Pseudo(_) => {
                let (a, b) = m.germ_rule(x).expect("x in domain");
                Label::Map(Arc::new(PartialMap::prefix_exchange(&self.space, vec![(a, b)])?))
            }
        };
        Ok(Arrow {
            label,
            source: x.clone(),
        })
    }

    pub fn range(&self, a: &Arrow) -> UPPoint {
        self.map(&a.label).apply(&a.source).expect("arrow source lies in the domain")
    }

    /// `[t, h_u(x)] · [u, x] = [tu, x]`.
    pub fn arrow_mul(&self, a1: &Arrow, a2: &Arrow) -> Result<Arrow> {
        let r = self.range(a2);
        if a1.source != r {
            return Err(Error::NotComposable {
                source_point: show(&self.space, &a1.source),
                range_point: show(&self.space, &r),
            });
        }
        self.arrow(&self.mul(&a1.label, &a2.label), &a2.source)
    }

    /// `[t, x]⁻¹ = [t*, h_t(x)]`.
    pub fn arrow_inv(&self, a: &Arrow) -> Result<Arrow> {
        self.arrow(&self.star(&a.label), &self.range(a))
    }

    pub fn unit_arrow(&self, x: &UPPoint) -> Result<Arrow> {
        self.arrow(&self.unit(), x)
    }

    pub fn describe_arrow(&self, a: &Arrow) -> String {
        format!("[{}, {}]", self.name(&a.label), show(&self.space, &a.source))
    }

    /// All arrows of a regime A system on a finite space, sorted by source
    /// then label.
    pub fn enumerate_arrows(&self) -> Result<Vec<Arrow>> {
        if self.regime != Regime::A {
            return Err(Error::Unsupported("a regime A system for arrow enumeration"));
        }
        let points = self
            .space
            .points()
            .ok_or(Error::Unsupported("a finite space for arrow enumeration"))?;
        let mut out = BTreeSet::new();
        for t in self.labels(0) {
            for x in &points {
                if self.map(&t).contains(x) {
                    out.insert(self.arrow(&t, x)?);
                }
            }
        }
        let mut v: Vec<Arrow> = out.into_iter().collect();
        v.sort_by(|a, b| (&a.source, &a.label).cmp(&(&b.source, &b.label)));
        Ok(v)
    }

    /// Arrows with source `x`: one per germ class among the labels
    /// (enumerated up to `bound` in regime B), unit germ first.
    pub fn arrows_from(&self, x: &UPPoint, bound: usize) -> Vec<Arrow> {
        let unit = self.unit_arrow(x).ok();
        let mut out: Vec<Arrow> = unit.iter().cloned().collect();
        for t in self.labels(bound) {
            if self.map(&t).contains(x) {
                let a = self.arrow(&t, x).expect("x in domain");
                if !out.contains(&a) {
                    out.push(a);
                }
            }
        }
        out
    }

    /// Isotropy at `x`: germ classes of labels fixing `x`, each flagged
    /// `true` if it is the unit germ.
    pub fn isotropy_at(&self, x: &UPPoint, bound: usize) -> Vec<(Arrow, bool)> {
        let unit = self.unit_arrow(x).ok();
        self.arrows_from(x, bound)
            .into_iter()
            .filter(|a| self.range(a) == *x)
            .map(|a| {
                let trivial = Some(&a) == unit.as_ref();
                (a, trivial)
            })
            .collect()
    }

    /// `cl(D_{t,u}) ∩ dom h_t ∩ dom h_u ∖ D_{t,u}`.
    pub fn witness_boundary(&self, t: &Label, u: &Label) -> ConstructibleSet {
        let d = self.witness(t, u);
        if d.is_clopen() {
            return ConstructibleSet::empty(&self.space);
        }
        let common = self.dom(t).intersect(&self.dom(u)).expect("same space");
        d.closure()
            .intersect(&common.into())
            .and_then(|s| s.minus(&d.into()))
            .expect("same space")
    }

    /// Hausdorff iff every `D_{t,u}` is closed in `dom h_t ∩ dom h_u`
    /// (checked over labels up to `bound` in regime B).
    pub fn is_hausdorff(&self, bound: usize) -> bool {
        let labels = self.labels(bound);
        for (i, t) in labels.iter().enumerate() {
            for u in &labels[i + 1..] {
                if !self.witness_boundary(t, u).is_empty() {
                    return false;
                }
            }
        }
        true
    }

    /// Alias of [`GermSystem::is_hausdorff`].
    pub fn units_closed(&self, bound: usize) -> bool {
        self.is_hausdorff(bound)
    }

    /// `⋃_{t≠u} cl(D_{t,u}) ∩ dom h_t ∩ dom h_u ∖ D_{t,u}`.
    pub fn dangerous_set(&self, bound: usize) -> ConstructibleSet {
        let labels = self.labels(bound);
        let mut acc = ConstructibleSet::empty(&self.space);
        for (i, t) in labels.iter().enumerate() {
            for u in &labels[i + 1..] {
                let b = self.witness_boundary(t, u);
                if !b.is_empty() {
                    acc = acc.union(&b).expect("same space");
                }
            }
        }
        acc
    }

    /// Checks every axiom, returning the first violation in a fixed order.
    #[allow(clippy::result_large_err)]
    pub fn validate(&self) -> Result<(), Violation> {
        match &self.body {
            Body::Table(tb) => self.validate_table(tb),
            Body::Pseudo(_) => self.validate_pseudo(),
        }
    }

    #[allow(clippy::result_large_err)]
    fn validate_table(&self, tb: &Table) -> Result<(), Violation> {
        let n = tb.names.len();
        let name = |i: usize| tb.names[i].clone();
        let table: Vec<Vec<usize>> = tb.mul.chunks(n).map(|r| r.to_vec()).collect();
        InverseSemigroup::new(tb.names.clone(), &table, tb.unit, Some(&tb.star)).map_err(Violation::Table)?;
        if !tb.maps[tb.unit].is_identity() {
            return Err(Violation::UnitMap {
                unit: name(tb.unit),
                map: tb.maps[tb.unit].to_string(),
            });
        }
        match &self.space {
            Space::Finite(points) if *points <= 64 => {
                let ops = MaskOps::new(*points, &tb.maps);
                let doms: Vec<u64> = tb.doms.iter().map(|d| ops.mask(d)).collect();
                let witness: Vec<u64> = tb.witness.iter().map(|d| ops.mask(d)).collect();
                check_axioms(tb, &doms, &witness, &ops)
            }
            _ => {
                let ops = OpenOps { space: &self.space, maps: &tb.maps };
                check_axioms(tb, &tb.doms, &tb.witness, &ops)
            }
        }
    }

    /// Regime B witness sets are local agreement sets, so the axioms hold
    /// by construction; this re-checks them on labels of length ≤ 2.
    #[allow(clippy::result_large_err)]
    fn validate_pseudo(&self) -> Result<(), Violation> {
        let labels = self.named_labels(2);
        let sample = |s: &ConstructibleSet| s.sample_point().map(|p| show(&self.space, &p)).unwrap_or_default();
        let outside = |a: &OpenSet, b: &OpenSet| -> Option<String> {
            let diff = a.minus(b).expect("same space");
            (!diff.is_empty()).then(|| sample(&diff))
        };
        for (tn, t) in &labels {
            if self.witness(t, t) != self.dom(t) {
                return Err(Violation::Diagonal { t: tn.clone() });
            }
            for (un, u) in &labels {
                let d = self.witness(t, u);
                let common = self.dom(t).intersect(&self.dom(u)).expect("same space");
                if let Some(point) = outside(&d, &common) {
                    return Err(Violation::Containment {
                        t: tn.clone(),
                        u: un.clone(),
                        point,
                    });
                }
                let img = self.map(t).image(&d).expect("same space");
                let starred = self.witness(&self.star(t), &self.star(u));
                if let Some(point) = outside(&img, &starred) {
                    return Err(Violation::StarCompatibility {
                        t: tn.clone(),
                        u: un.clone(),
                        tstar: format!("{tn}*"),
                        ustar: format!("{un}*"),
                        point,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Set operations used by the witness axioms, so that finite spaces can
/// run them on bitmasks.
trait SetOps {
    type Set: Clone + PartialEq;
    fn inter(&self, a: &Self::Set, b: &Self::Set) -> Self::Set;
    /// A rendered point of `a ∖ b`, if there is one.
    fn outside(&self, a: &Self::Set, b: &Self::Set) -> Option<String>;
    fn agree(&self, t: usize, u: usize) -> Self::Set;
    fn preimage(&self, w: usize, a: &Self::Set) -> Self::Set;
    fn image(&self, t: usize, a: &Self::Set) -> Self::Set;
}

struct OpenOps<'a> {
    space: &'a Space,
    maps: &'a [PartialMap],
}

impl SetOps for OpenOps<'_> {
    type Set = OpenSet;

    fn inter(&self, a: &OpenSet, b: &OpenSet) -> OpenSet {
        a.intersect(b).expect("same space")
    }

    fn outside(&self, a: &OpenSet, b: &OpenSet) -> Option<String> {
        let diff = a.minus(b).expect("same space");
        diff.sample_point().map(|p| show(self.space, &p))
    }

    fn agree(&self, t: usize, u: usize) -> OpenSet {
        self.maps[t].local_agreement(&self.maps[u]).expect("same space")
    }

    fn preimage(&self, w: usize, a: &OpenSet) -> OpenSet {
        self.maps[w].preimage(a).expect("same space")
    }

    fn image(&self, t: usize, a: &OpenSet) -> OpenSet {
        self.maps[t].image(a).expect("same space")
    }
}

/// Subsets of a space with at most 64 points as bitmasks; maps as image
/// tables with `usize::MAX` for undefined points.
struct MaskOps {
    images: Vec<Vec<usize>>,
}

impl MaskOps {
    fn new(points: usize, maps: &[PartialMap]) -> MaskOps {
        let images = maps
            .iter()
            .map(|m| {
                let pairs = m.pairs().expect("finite backend");
                (0..points).map(|i| pairs.get(&i).copied().unwrap_or(usize::MAX)).collect()
            })
            .collect();
        MaskOps { images }
    }

    fn mask(&self, u: &OpenSet) -> u64 {
        u.members().expect("finite backend").iter().fold(0, |m, &i| m | 1 << i)
    }
}

impl SetOps for MaskOps {
    type Set = u64;

    fn inter(&self, a: &u64, b: &u64) -> u64 {
        a & b
    }

    fn outside(&self, a: &u64, b: &u64) -> Option<String> {
        let diff = a & !b;
        (diff != 0).then(|| diff.trailing_zeros().to_string())
    }

    fn agree(&self, t: usize, u: usize) -> u64 {
        let (ht, hu) = (&self.images[t], &self.images[u]);
        (0..ht.len()).filter(|&i| ht[i] != usize::MAX && ht[i] == hu[i]).fold(0, |m, i| m | 1 << i)
    }

    fn preimage(&self, w: usize, a: &u64) -> u64 {
        let hw = &self.images[w];
        (0..hw.len()).filter(|&i| hw[i] != usize::MAX && a >> hw[i] & 1 == 1).fold(0, |m, i| m | 1 << i)
    }

    fn image(&self, t: usize, a: &u64) -> u64 {
        let ht = &self.images[t];
        (0..ht.len()).filter(|&i| ht[i] != usize::MAX && a >> i & 1 == 1).fold(0, |m, i| m | 1 << ht[i])
    }
}

/// The witness and action axioms of a label table, in a fixed order.
#[allow(clippy::result_large_err)]
fn check_axioms<O: SetOps>(tb: &Table, doms: &[O::Set], witness: &[O::Set], ops: &O) -> Result<(), Violation> {
    let n = tb.names.len();
    let name = |i: usize| tb.names[i].clone();
    let d = |t: usize, u: usize| &witness[t * n + u];
    for t in 0..n {
        if *d(t, t) != doms[t] {
            return Err(Violation::Diagonal { t: name(t) });
        }
    }
    for t in 0..n {
        for u in 0..n {
            if d(t, u) != d(u, t) {
                let point = ops
                    .outside(d(t, u), d(u, t))
                    .or_else(|| ops.outside(d(u, t), d(t, u)))
                    .unwrap_or_default();
                return Err(Violation::Symmetry { t: name(t), u: name(u), point });
            }
        }
    }
    for t in 0..n {
        for u in 0..n {
            let common = ops.inter(&doms[t], &doms[u]);
            if let Some(point) = ops.outside(d(t, u), &common) {
                return Err(Violation::Containment { t: name(t), u: name(u), point });
            }
        }
    }
    for t in 0..n {
        for u in 0..n {
            if let Some(point) = ops.outside(d(t, u), &ops.agree(t, u)) {
                return Err(Violation::Agreement { t: name(t), u: name(u), point });
            }
        }
    }
    for t in 0..n {
        for u in 0..n {
            for w in 0..n {
                let both = ops.inter(d(t, u), d(u, w));
                if let Some(point) = ops.outside(&both, d(t, w)) {
                    return Err(Violation::Transitivity {
                        t: name(t),
                        u: name(u),
                        w: name(w),
                        point,
                    });
                }
            }
        }
    }
    for t in 0..n {
        for u in 0..n {
            let tu = tb.mul[t * n + u];
            let composed = tb.maps[t].compose(&tb.maps[u]).expect("same space");
            if composed != tb.maps[tu] {
                let point = map_difference(composed.space(), &composed, &tb.maps[tu]);
                return Err(Violation::Action {
                    t: name(t),
                    u: name(u),
                    tu: name(tu),
                    point,
                });
            }
        }
    }
    for t in 0..n {
        if tb.maps[tb.star[t]] != tb.maps[t].invert() {
            return Err(Violation::StarMap {
                t: name(t),
                tstar: name(tb.star[t]),
            });
        }
    }
    for t in 0..n {
        for u in 0..n {
            for w in 0..n {
                let (tw, uw) = (tb.mul[t * n + w], tb.mul[u * n + w]);
                let pulled = ops.preimage(w, d(t, u));
                let lhs = ops.inter(&ops.inter(&pulled, &doms[tw]), &doms[uw]);
                if let Some(point) = ops.outside(&lhs, d(tw, uw)) {
                    return Err(Violation::RightMultiplicativity {
                        t: name(t),
                        u: name(u),
                        w: name(w),
                        tw: name(tw),
                        uw: name(uw),
                        point,
                    });
                }
            }
        }
    }
    for t in 0..n {
        for u in 0..n {
            let (ts, us) = (tb.star[t], tb.star[u]);
            if let Some(point) = ops.outside(&ops.image(t, d(t, u)), d(ts, us)) {
                return Err(Violation::StarCompatibility {
                    t: name(t),
                    u: name(u),
                    tstar: name(ts),
                    ustar: name(us),
                    point,
                });
            }
        }
    }
    Ok(())
}

/// A point where two different maps differ, rendered, or empty if none is
/// found.
fn map_difference(space: &Space, f: &PartialMap, g: &PartialMap) -> String {
    let (df, dg) = (f.domain(), g.domain());
    let pick = |s: ConstructibleSet| s.sample_point().map(|p| show(space, &p));
    let one_sided = pick(df.minus(&dg).expect("same space")).or_else(|| pick(dg.minus(&df).expect("same space")));
    one_sided
        .or_else(|| pick(df.minus(&f.local_agreement(g).expect("same space")).expect("same space")))
        .unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cantor() -> Space {
        Space::cantor("01").unwrap()
    }

    fn pt(s: &str) -> UPPoint {
        UPPoint::parse(&cantor(), s).unwrap()
    }

    fn dbl(witness: &str, g_map: &[&str]) -> Result<GermSystem> {
        let s = cantor();
        let rules: Vec<String> = g_map.iter().map(|r| r.to_string()).collect();
        GermSystem::regime_c(
            &s,
            vec!["1".into(), "g".into()],
            vec![vec![0, 1], vec![1, 0]],
            None,
            vec![PartialMap::identity(&s), PartialMap::parse(&s, &rules)?],
            vec![((1, 0), OpenSet::from_regex(&s, witness)?)],
        )
    }

    #[test]
    fn doubled_point() {
        let gs = dbl("0*1", &["id"]).unwrap();
        let (one, g) = (Label::Index(0), Label::Index(1));
        assert!(gs.germ_eq(&g, &one, &pt("0(1)")));
        assert!(!gs.germ_eq(&g, &one, &pt("(0)")));
        assert!(!gs.is_hausdorff(1));
        let dangerous = gs.dangerous_set(1);
        assert_eq!(dangerous.finite_points(4), Some(vec![pt("(0)")]));
        assert!(dangerous.is_meagre());
        let iso = gs.isotropy_at(&pt("(0)"), 1);
        assert_eq!(iso.len(), 2);
        assert!(iso[0].1 && !iso[1].1);
        let a = gs.arrow(&g, &pt("(0)")).unwrap();
        assert_eq!(gs.arrow_inv(&a).unwrap(), a);
        // away from 0^ω the two germs merge into the unit class
        assert_eq!(gs.arrow(&g, &pt("0(1)")).unwrap().label, one);
    }

    #[test]
    fn disagreeing_witness_rejected() {
        let err = dbl("0", &["0 -> 1", "1 -> 0"]).unwrap_err();
        assert!(matches!(&err, Error::System(v) if matches!(**v, Violation::Agreement { .. })), "{err}");
        assert!(matches!(dbl("0|(", &["id"]), Err(Error::Regex { .. })));
    }

    #[test]
    fn pair_groupoids() {
        for n in 2..=4 {
            let gs = GermSystem::from_monoid(MapMonoid::symmetric(n).unwrap()).unwrap();
            assert_eq!(gs.enumerate_arrows().unwrap().len(), n * n);
            assert!(gs.is_hausdorff(0));
        }
    }

    #[test]
    fn meet_witness_germs() {
        let gs = GermSystem::from_monoid(MapMonoid::symmetric(2).unwrap()).unwrap();
        let id = gs.parse_label("1").unwrap();
        let p0 = gs.parse_label("[0-]").unwrap();
        assert!(gs.germ_eq(&id, &p0, &UPPoint::Index(0)));
        let swap = gs.parse_label("[10]").unwrap();
        assert!(!gs.germ_eq(&id, &swap, &UPPoint::Index(0)));
    }

    #[test]
    fn group_on_a_point() {
        let s = Space::finite(1).unwrap();
        let z2 = InverseSemigroup::new(vec!["1".into(), "g".into()], &[vec![0, 1], vec![1, 0]], 0, None).unwrap();
        let id = PartialMap::identity(&s);
        let gs = GermSystem::regime_a(&s, z2, vec![id.clone(), id]).unwrap();
        assert_eq!(gs.enumerate_arrows().unwrap().len(), 2);
    }

    #[test]
    fn cuntz_pseudogroup() {
        let s = cantor();
        let v0 = PartialMap::parse(&s, &["ε -> 0".into()]).unwrap();
        let v1 = PartialMap::parse(&s, &["ε -> 1".into()]).unwrap();
        let gs = GermSystem::regime_b(&s, vec![("v0".into(), v0), ("v1".into(), v1)], 2).unwrap();
        assert!(gs.is_hausdorff(2));
        assert!(gs.dangerous_set(2).is_empty());
        let t = gs.parse_label("v0* v0").unwrap();
        assert_eq!(t, gs.unit());
        let labels = gs.named_labels(2);
        assert_eq!(labels[0].0, "1");
        assert!(labels.iter().any(|(n, _)| n == "v0 v1*"));
        // germs of v0 and of its restriction {0 -> 00} agree on [0]
        let r = Label::Map(Arc::new(PartialMap::parse(&s, &["0 -> 00".into()]).unwrap()));
        let v0l = gs.parse_label("v0").unwrap();
        assert!(gs.germ_eq(&v0l, &r, &pt("(0)")));
        assert!(!gs.germ_eq(&v0l, &r, &pt("(1)")));
        let a = gs.arrow(&v0l, &pt("(1)")).unwrap();
        let b = gs.arrow(&gs.star(&v0l), &pt("0(1)")).unwrap();
        assert_eq!(gs.arrow_mul(&b, &a).unwrap(), gs.unit_arrow(&pt("(1)")).unwrap());
        assert!(gs.arrow_mul(&a, &a).is_err());
    }
}
