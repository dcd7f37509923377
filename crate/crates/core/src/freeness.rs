//! Non-triviality conditions, invariance, minimality, and the
//! pure-infiniteness witness search.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::groupoid::{GermSystem, Label};
use crate::partial_map::PartialMap;
use crate::topology::{ConstructibleSet, OpenSet, Space, UPPoint};

/// Outcome of a universally quantified check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails { witness: String },
    /// No counterexample among labels of composition length ≤ the bound.
    VerifiedUpTo(usize),
}

impl Verdict {
    /// `true` unless refuted.
    pub fn passes(&self) -> bool {
        !matches!(self, Verdict::Fails { .. })
    }

    fn universal(exact: bool, bound: usize, failure: Option<String>) -> Verdict {
        match failure {
            Some(witness) => Verdict::Fails { witness },
            None if exact => Verdict::Holds,
            None => Verdict::VerifiedUpTo(bound),
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Holds => write!(f, "true"),
            Verdict::Fails { witness } => write!(f, "false ({witness})"),
            Verdict::VerifiedUpTo(b) => write!(f, "verified up to {b}"),
        }
    }
}

/// `Fix` and underlined `Fix` of one label.
#[derive(Clone, Debug)]
pub struct FixSets {
    pub label: String,
    /// `{x : h_t(x) = x} ∖ D_{t,1}`.
    pub fix: ConstructibleSet,
    /// `Fix ∖ cl(D_{t,1})`.
    pub underline: ConstructibleSet,
}

/// `(Fix(h_t), underlined Fix(h_t))` at germ level.
pub fn fix_sets(gs: &GermSystem, t: &Label) -> (ConstructibleSet, ConstructibleSet) {
    let d = gs.witness(t, &gs.unit());
    let fixed = gs.map(t).fix_region().to_set();
    let fix = fixed.minus(&d.clone().into()).expect("same space");
    let underline = fix.minus(&d.closure()).expect("same space");
    (fix, underline)
}

#[derive(Clone, Debug)]
pub struct FreenessReport {
    /// Composition bound of the label enumeration, regime B only.
    pub bound: Option<usize>,
    pub fix: Vec<FixSets>,
    pub hausdorff: bool,
    pub effective: Verdict,
    pub topologically_free: Verdict,
    pub as_topologically_free: Verdict,
    pub topologically_principal: Verdict,
}

impl FreenessReport {
    /// The recorded implications: effective ⇒ free, principal ⇒ AS ⇒ free,
    /// AS ⟺ free, and free ⟺ effective on Hausdorff systems.
    pub fn check_implications(&self) -> std::result::Result<(), String> {
        let (e, f, a, p) = (
            self.effective.passes(),
            self.topologically_free.passes(),
            self.as_topologically_free.passes(),
            self.topologically_principal.passes(),
        );
        if e && !f {
            return Err("effective but not topologically free".into());
        }
        if p && !a {
            return Err("topologically principal but not AS topologically free".into());
        }
        if a != f {
            return Err("AS topological freeness differs from topological freeness".into());
        }
        if self.hausdorff && e != f {
            return Err("Hausdorff system where effectiveness differs from topological freeness".into());
        }
        Ok(())
    }
}

fn sample_text(space: &Space, s: &ConstructibleSet) -> String {
    s.sample_point().map(|p| p.display(space).to_string()).unwrap_or_default()
}

/// The four non-triviality verdicts, Hausdorffness, and every label's fix
/// sets. `bound` limits the label enumeration in regime B.
pub fn freeness_report(gs: &GermSystem, bound: usize) -> FreenessReport {
    let space = gs.space();
    let exact = gs.is_exact();
    let unit = gs.unit();
    let mut fix = Vec::new();
    let mut effective = None;
    let mut free = None;
    let mut nowhere_dense = None;
    let mut union_fix = ConstructibleSet::empty(space);
    let mut union_underline = ConstructibleSet::empty(space);
    for (name, t) in gs.named_labels(bound) {
        let (f, u) = fix_sets(gs, &t);
        let clopen = gs.map(&t).fix_region().clopen_part;
        let outside = clopen.minus(&gs.witness(&t, &unit)).expect("same space");
        if effective.is_none() && !outside.is_empty() {
            effective = Some(format!("{name} fixes {} outside D_{{{name},1}}", sample_text(space, &outside)));
        }
        if free.is_none() && !f.has_empty_interior() {
            let inner = f.interior();
            free = Some(format!(
                "Fix({name}) has interior, e.g. {}",
                inner.sample_point().map(|p| p.display(space).to_string()).unwrap_or_default()
            ));
        }
        if nowhere_dense.is_none() && !u.is_nowhere_dense() {
            nowhere_dense = Some(format!("underlined Fix({name}) is not nowhere dense"));
        }
        union_fix = union_fix.union(&f).expect("same space");
        union_underline = union_underline.union(&u).expect("same space");
        fix.push(FixSets {
            label: name,
            fix: f,
            underline: u,
        });
    }
    let as_failure = nowhere_dense.or_else(|| {
        (!union_underline.has_empty_interior()).then(|| "the union of underlined Fix sets has interior".to_string())
    });
    let principal_failure = (!union_fix.has_empty_interior()).then(|| {
        format!(
            "the union of Fix sets has interior, e.g. {}",
            union_fix.interior().sample_point().map(|p| p.display(space).to_string()).unwrap_or_default()
        )
    });
    FreenessReport {
        bound: (!exact).then_some(bound),
        fix,
        hausdorff: gs.is_hausdorff(bound),
        effective: Verdict::universal(exact, bound, effective),
        topologically_free: Verdict::universal(exact, bound, free),
        as_topologically_free: Verdict::universal(exact, bound, as_failure),
        topologically_principal: Verdict::universal(exact, bound, principal_failure),
    }
}

/// Labels whose images generate all others: every label in regimes A and
/// C, generators and their inverses in regime B.
fn movers(gs: &GermSystem) -> Vec<Label> {
    match gs.generators() {
        Some(gens) => gens
            .iter()
            .flat_map(|(_, g)| [g.clone(), g.invert()])
            .map(|m| Label::Map(Arc::new(m)))
            .collect(),
        None => gs.labels(0),
    }
}

fn image_under(gs: &GermSystem, t: &Label, u: &OpenSet) -> OpenSet {
    gs.map(t).image(u).expect("same space")
}

/// `h_t(U ∩ dom h_t) ⊆ U` for every label `t`.
pub fn invariant(gs: &GermSystem, u: &OpenSet) -> bool {
    movers(gs)
        .iter()
        .all(|t| image_under(gs, t, u).is_subset(u).expect("same space"))
}

/// Least invariant open set containing `u`, or [`Error::Unstable`] if
/// `iter_cap` rounds of adding images do not reach a fixpoint.
pub fn saturate(gs: &GermSystem, u: &OpenSet, iter_cap: usize) -> Result<OpenSet> {
    gs.space().check_same(u.space())?;
    let ts = movers(gs);
    let mut cur = u.clone();
    for _ in 0..iter_cap {
        let next = ts
            .iter()
            .fold(cur.clone(), |acc, t| acc.union(&image_under(gs, t, &cur)).expect("same space"));
        if next == cur {
            return Ok(cur);
        }
        cur = next;
    }
    Err(Error::Unstable(iter_cap))
}

/// Every cylinder of length ≤ `depth` (every point of a finite space)
/// saturates to the whole space. Refutations are exact; on the Cantor
/// space a positive answer is only verified up to `depth`.
pub fn is_minimal(gs: &GermSystem, depth: usize, iter_cap: usize) -> Result<Verdict> {
    let space = gs.space();
    let full = OpenSet::full(space);
    let candidates: Vec<(String, OpenSet)> = match space {
        Space::Finite(n) => (0..*n)
            .map(|i| Ok((format!("{{{i}}}"), OpenSet::from_points(space, [i])?)))
            .collect::<Result<_>>()?,
        Space::Cantor(alpha) => words_up_to(alpha.len(), depth)
            .into_iter()
            .map(|w| Ok((format!("[{}]", alpha.format_word(&w)), OpenSet::cylinder(space, &w)?)))
            .collect::<Result<_>>()?,
    };
    for (name, set) in candidates {
        let sat = saturate(gs, &set, iter_cap)?;
        if sat != full {
            return Ok(Verdict::Fails {
                witness: format!("the saturation of {name} is the proper invariant set {sat}"),
            });
        }
    }
    Ok(if space.is_finite() {
        Verdict::Holds
    } else {
        Verdict::VerifiedUpTo(depth)
    })
}

/// All words of length ≤ `depth` in shortlex order.
pub fn words_up_to(k: usize, depth: usize) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for w in &layer {
            for a in 0..k as u8 {
                let mut w2: Vec<u8> = w.clone();
                w2.push(a);
                next.push(w2);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// A certificate for the combinatorial pure-infiniteness hypothesis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PureInfiniteness {
    Witness {
        v: OpenSet,
        labels: Vec<String>,
        sources: Vec<OpenSet>,
        ranges: Vec<OpenSet>,
        /// The ranges are pairwise disjoint.
        disjoint_ranges: bool,
        /// The sources cover `V`.
        sources_cover: bool,
        /// The closure of the union of the ranges is a proper subset of `V`.
        strict_shrinking: bool,
    },
    NotFoundUpTo { depth: usize, len: usize },
}

struct SliceCand {
    label: String,
    source: OpenSet,
    range: OpenSet,
}

/// Searches cylinders `V ⊆ u` of length ≤ `depth` (nonempty subsets on a
/// finite space) and tuples of at most two slices `(t, V ∩ h_t⁻¹(V))`, with
/// labels of composition length ≤ `len` in regime B, for ranges that are
/// pairwise disjoint, sources covering `V`, and `cl(⋃ ranges) ⊊ V`.
pub fn pure_infiniteness_witness(gs: &GermSystem, u: &OpenSet, depth: usize, len: usize) -> Result<PureInfiniteness> {
    let space = gs.space();
    space.check_same(u.space())?;
    if u.is_empty() {
        return Err(Error::EmptySet);
    }
    let candidates: Vec<OpenSet> = match space {
        Space::Finite(_) => {
            let members: Vec<usize> = u.members().expect("finite backend").iter().copied().collect();
            if members.len() > 16 {
                return Err(Error::Unsupported("at most 16 points for the finite witness search"));
            }
            let mut subsets: Vec<Vec<usize>> = (1u32..1 << members.len())
                .map(|mask| (0..members.len()).filter(|i| mask >> i & 1 == 1).map(|i| members[i]).collect())
                .collect();
            subsets.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
            subsets
                .into_iter()
                .map(|s| OpenSet::from_points(space, s))
                .collect::<Result<_>>()?
        }
        Space::Cantor(alpha) => words_up_to(alpha.len(), depth)
            .into_iter()
            .map(|w| OpenSet::cylinder(space, &w))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .filter(|c| c.is_subset(u).expect("same space"))
            .collect(),
    };
    let labels = gs.named_labels(len);
    for v in candidates {
        let mut slices: Vec<SliceCand> = Vec::new();
        for (name, t) in &labels {
            let m: &PartialMap = gs.map(t);
            let source = v.intersect(&m.preimage(&v)?)?;
            if source.is_empty() {
                continue;
            }
            let range = m.image(&source)?;
            if slices.iter().any(|s| s.source == source && s.range == range) {
                continue;
            }
            slices.push(SliceCand {
                label: name.clone(),
                source,
                range,
            });
        }
        let check = |chosen: &[&SliceCand]| -> Result<Option<PureInfiniteness>> {
            let mut disjoint = true;
            for (i, a) in chosen.iter().enumerate() {
                for b in &chosen[i + 1..] {
                    disjoint &= a.range.intersect(&b.range)?.is_empty();
                }
            }
            let cover = chosen
                .iter()
                .try_fold(OpenSet::empty(space), |acc, s| acc.union(&s.source))?;
            let covers = cover == v;
            let ranges = chosen
                .iter()
                .try_fold(OpenSet::empty(space), |acc, s| acc.union(&s.range))?;
            let cl = ranges.closure();
            let vc: ConstructibleSet = v.clone().into();
            let strict = cl.is_subset(&vc)? && cl != vc;
            Ok((disjoint && covers && strict).then(|| PureInfiniteness::Witness {
                v: v.clone(),
                labels: chosen.iter().map(|s| s.label.clone()).collect(),
                sources: chosen.iter().map(|s| s.source.clone()).collect(),
                ranges: chosen.iter().map(|s| s.range.clone()).collect(),
                disjoint_ranges: disjoint,
                sources_cover: covers,
                strict_shrinking: strict,
            }))
        };
        for s in &slices {
            if let Some(w) = check(&[s])? {
                return Ok(w);
            }
        }
        for (i, a) in slices.iter().enumerate() {
            for b in &slices[i + 1..] {
                if let Some(w) = check(&[a, b])? {
                    return Ok(w);
                }
            }
        }
    }
    Ok(PureInfiniteness::NotFoundUpTo { depth, len })
}

/// Points of a set rendered for reports, or `None` if it is infinite.
pub fn render_points(space: &Space, s: &ConstructibleSet, cap: usize) -> Option<Vec<String>> {
    s.finite_points(cap)
        .map(|ps| ps.iter().map(|p: &UPPoint| p.display(space).to_string()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::{InverseSemigroup, MapMonoid};

    fn cantor() -> Space {
        Space::cantor("01").unwrap()
    }

    fn dbl() -> GermSystem {
        let s = cantor();
        GermSystem::regime_c(
            &s,
            vec!["1".into(), "g".into()],
            vec![vec![0, 1], vec![1, 0]],
            None,
            vec![PartialMap::identity(&s), PartialMap::identity(&s)],
            vec![((1, 0), OpenSet::from_regex(&s, "0*1").unwrap())],
        )
        .unwrap()
    }

    fn cuntz2() -> GermSystem {
        let s = cantor();
        let v0 = PartialMap::parse(&s, &["ε -> 0".into()]).unwrap();
        let v1 = PartialMap::parse(&s, &["ε -> 1".into()]).unwrap();
        GermSystem::regime_b(&s, vec![("v0".into(), v0), ("v1".into(), v1)], 2).unwrap()
    }

    fn z2_point() -> GermSystem {
        let s = Space::finite(1).unwrap();
        let z2 = InverseSemigroup::new(vec!["1".into(), "g".into()], &[vec![0, 1], vec![1, 0]], 0, None).unwrap();
        let id = PartialMap::identity(&s);
        GermSystem::regime_a(&s, z2, vec![id.clone(), id]).unwrap()
    }

    #[test]
    fn fix_sets_of_gallery_labels() {
        let gs = dbl();
        let (f, u) = fix_sets(&gs, &Label::Index(1));
        assert_eq!(f.finite_points(2), Some(vec![UPPoint::parse(&cantor(), "(0)").unwrap()]));
        assert!(u.is_empty());
        let gs = z2_point();
        let (f, u) = fix_sets(&gs, &Label::Index(1));
        assert_eq!(f.finite_points(2), Some(vec![UPPoint::Index(0)]));
        assert_eq!(u, f);
        let gs = cuntz2();
        let (f, u) = fix_sets(&gs, &gs.parse_label("v0").unwrap());
        assert_eq!(f.finite_points(2), Some(vec![UPPoint::parse(&cantor(), "(0)").unwrap()]));
        assert_eq!(u, f);
    }

    #[test]
    fn reports() {
        let r = freeness_report(&dbl(), 1);
        assert!(!r.hausdorff);
        assert!(!r.effective.passes());
        assert_eq!(r.topologically_free, Verdict::Holds);
        assert_eq!(r.as_topologically_free, Verdict::Holds);
        assert_eq!(r.topologically_principal, Verdict::Holds);
        r.check_implications().unwrap();

        let r = freeness_report(&z2_point(), 1);
        assert!(matches!(&r.topologically_free, Verdict::Fails { witness } if witness.contains('g')));
        r.check_implications().unwrap();

        let r = freeness_report(&GermSystem::from_monoid(MapMonoid::symmetric(3).unwrap()).unwrap(), 1);
        assert!(r.hausdorff);
        for v in [&r.effective, &r.topologically_free, &r.as_topologically_free, &r.topologically_principal] {
            assert_eq!(*v, Verdict::Holds);
        }

        let r = freeness_report(&cuntz2(), 2);
        assert!(r.hausdorff);
        assert_eq!(r.topologically_free, Verdict::VerifiedUpTo(2));
        r.check_implications().unwrap();
    }

    #[test]
    fn invariance_and_minimality() {
        let gs = cuntz2();
        let s = cantor();
        assert!(saturate(&gs, &OpenSet::cylinder(&s, &[0]).unwrap(), 8).unwrap().is_full());
        assert_eq!(is_minimal(&gs, 2, 8).unwrap(), Verdict::VerifiedUpTo(2));
        assert!(invariant(&dbl(), &OpenSet::from_regex(&s, "0*1").unwrap()));
        assert!(!is_minimal(&dbl(), 1, 8).unwrap().passes());
        let pair = GermSystem::from_monoid(MapMonoid::symmetric(3).unwrap()).unwrap();
        assert_eq!(is_minimal(&pair, 0, 8).unwrap(), Verdict::Holds);
        let three = Space::finite(3).unwrap();
        assert!(!invariant(&pair, &OpenSet::from_points(&three, [0, 2]).unwrap()));
    }

    #[test]
    fn pure_infiniteness() {
        let s = cantor();
        let w = pure_infiniteness_witness(&cuntz2(), &OpenSet::full(&s), 2, 2).unwrap();
        match w {
            PureInfiniteness::Witness {
                v,
                labels,
                disjoint_ranges,
                sources_cover,
                strict_shrinking,
                ..
            } => {
                assert!(v.is_full());
                assert_eq!(labels, vec!["v0".to_string()]);
                assert!(disjoint_ranges && sources_cover && strict_shrinking);
            }
            other => panic!("expected a witness, got {other:?}"),
        }
        assert_eq!(
            pure_infiniteness_witness(&dbl(), &OpenSet::full(&s), 2, 2).unwrap(),
            PureInfiniteness::NotFoundUpTo { depth: 2, len: 2 }
        );
        let pair = GermSystem::from_monoid(MapMonoid::symmetric(2).unwrap()).unwrap();
        let full = OpenSet::full(pair.space());
        assert!(matches!(
            pure_infiniteness_witness(&pair, &full, 2, 2).unwrap(),
            PureInfiniteness::NotFoundUpTo { .. }
        ));
    }
}
