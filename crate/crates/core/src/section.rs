//! The convolution *-algebra of quasi-continuous sections with scalar
//! fibres, the expectation `E`, and singularity decisions.
//!
//! A section is a finite sum `Σ c·1_{[t,U]}` of characteristic functions of
//! compact open bisections, `U ⊆ dom h_t` clopen. As a function on arrows it
//! is `f([s,x]) = Σ { c_i : x ∈ U_i, [t_i,x] = [s,x] }`.

use std::collections::BTreeMap;
use std::fmt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::groupoid::{Arrow, GermSystem, Label};
use crate::scalar::Scalar;
use crate::topology::{ConstructibleSet, OpenSet, Refinement, Space, UPPoint};

/// `c · 1_{[t,U]}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub label: Label,
    pub support: OpenSet,
    pub coeff: Scalar,
}

/// A finite sum of slice terms. Terms with the same label and support are
/// merged and zero or empty terms dropped; equality as functions on arrows
/// is decided by [`normal_form`].
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Section {
    terms: Vec<Term>,
}

impl Section {
    pub fn zero() -> Section {
        Section::default()
    }

    /// `c · 1_{[t,U]}`; `U` must be clopen and inside `dom h_t`.
    pub fn slice(gs: &GermSystem, t: Label, support: OpenSet, coeff: Scalar) -> Result<Section> {
        if !support.is_clopen() {
            return Err(Error::NotClopen(support.to_string()));
        }
        let dom = gs.dom(&t);
        if !support.is_subset(&dom)? {
            let outside = support.minus(&dom)?;
            let point = outside
                .sample_point()
                .map(|p| p.display(gs.space()).to_string())
                .unwrap_or_default();
            return Err(Error::OutsideDomain { point });
        }
        Ok(Section::from_terms(vec![Term {
            label: t,
            support,
            coeff,
        }]))
    }

    /// `1_{[t, dom h_t]}`.
    pub fn delta(gs: &GermSystem, t: Label) -> Result<Section> {
        let dom = gs.dom(&t);
        Section::slice(gs, t, dom, Scalar::one())
    }

    /// The unit `1_{[1, X]}`.
    pub fn unit(gs: &GermSystem) -> Section {
        Section::delta(gs, gs.unit()).expect("the unit label acts on all of X")
    }

    pub fn from_terms(terms: Vec<Term>) -> Section {
        let mut out: Vec<Term> = Vec::with_capacity(terms.len());
        for t in terms {
            if t.support.is_empty() || t.coeff.is_zero() {
                continue;
            }
            match out.iter_mut().find(|o| o.label == t.label && o.support == t.support) {
                Some(o) => o.coeff += &t.coeff,
                None => out.push(t),
            }
        }
        out.retain(|t| !t.coeff.is_zero());
        Section { terms: out }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn add(&self, other: &Section) -> Section {
        Section::from_terms(self.terms.iter().chain(&other.terms).cloned().collect())
    }

    pub fn sub(&self, other: &Section) -> Section {
        self.add(&other.scale(&-Scalar::one()))
    }

    pub fn scale(&self, c: &Scalar) -> Section {
        Section::from_terms(
            self.terms
                .iter()
                .map(|t| Term {
                    coeff: &t.coeff * c,
                    ..t.clone()
                })
                .collect(),
        )
    }

    /// Convolution: `(t,U,c)·(u,V,d) = (tu, V ∩ h_u⁻¹(U), cd)`.
    pub fn mul(&self, gs: &GermSystem, other: &Section) -> Section {
        let mut terms = Vec::new();
        for a in &self.terms {
            for b in &other.terms {
                let support = gs
                    .map(&b.label)
                    .preimage(&a.support)
                    .and_then(|p| b.support.intersect(&p))
                    .expect("sections share the space");
                terms.push(Term {
                    label: gs.mul(&a.label, &b.label),
                    support,
                    coeff: &a.coeff * &b.coeff,
                });
            }
        }
        Section::from_terms(terms)
    }

    /// `(t,U,c)* = (t*, h_t(U), c̄)`.
    pub fn star(&self, gs: &GermSystem) -> Section {
        Section::from_terms(
            self.terms
                .iter()
                .map(|t| Term {
                    label: gs.star(&t.label),
                    support: gs.map(&t.label).image(&t.support).expect("same space"),
                    coeff: t.coeff.conj(),
                })
                .collect(),
        )
    }

    /// Whether every term carries the unit label.
    pub fn is_unit_supported(&self, gs: &GermSystem) -> bool {
        let unit = gs.unit();
        self.terms.iter().all(|t| t.label == unit)
    }

    pub fn display<'a>(&'a self, gs: &'a GermSystem) -> impl fmt::Display + 'a {
        SectionDisplay { gs, f: self }
    }
}

struct SectionDisplay<'a> {
    gs: &'a GermSystem,
    f: &'a Section,
}

impl fmt::Display for SectionDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.f.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.f.terms.iter().enumerate() {
            let real = t.coeff.im().is_zero();
            let negative = real && t.coeff.re().is_negative();
            let magnitude = if negative { -t.coeff.clone() } else { t.coeff.clone() };
            match (i, negative) {
                (0, false) => {}
                (0, true) => write!(f, "-")?,
                (_, false) => write!(f, " + ")?,
                (_, true) => write!(f, " - ")?,
            }
            if magnitude != Scalar::one() {
                if real {
                    write!(f, "{magnitude} * ")?;
                } else {
                    write!(f, "({magnitude}) * ")?;
                }
            }
            write!(f, "({}, {})", self.gs.name(&t.label), t.support)?;
        }
        Ok(())
    }
}

/// Parses `c * (t, S) + c * (t, S) - (t, S)`, where `c` is a scalar
/// (parenthesised when it has both parts), `t` a label name and `S` either
/// `dom`, `X`, a point set `{i,j}` or a regular expression.
pub fn parse_section(gs: &GermSystem, text: &str) -> Result<Section> {
    let chars: Vec<char> = text.chars().collect();
    let mut pos = 0;
    let mut out = Section::zero();
    let err = |msg: &str, at: usize| Error::Parse(format!("section {text:?} at char {at}: {msg}"));
    let skip_ws = |pos: &mut usize| {
        while *pos < chars.len() && chars[*pos].is_whitespace() {
            *pos += 1;
        }
    };
    let matching = |open: usize| -> Option<usize> {
        let mut depth = 0;
        for (k, &c) in chars.iter().enumerate().skip(open) {
            match c {
                '(' => depth += 1,
                ')' => {
                    depth -= 1;
                    if depth == 0 {
                        return Some(k);
                    }
                }
                _ => {}
            }
        }
        None
    };
    skip_ws(&mut pos);
    if chars[pos..].iter().collect::<String>() == "0" {
        return Ok(out);
    }
    let mut sign = Scalar::one();
    if pos < chars.len() && chars[pos] == '-' {
        sign = -Scalar::one();
        pos += 1;
    }
    loop {
        skip_ws(&mut pos);
        if pos >= chars.len() {
            return Err(err("expected a term", pos));
        }
        let mut coeff = Scalar::one();
        let mut slice_start = None;
        if chars[pos] == '(' {
            let close = matching(pos).ok_or_else(|| err("unbalanced parenthesis", pos))?;
            let mut after = close + 1;
            skip_ws(&mut after);
            if after < chars.len() && chars[after] == '*' {
                coeff = chars[pos + 1..close].iter().collect::<String>().parse()?;
                pos = after + 1;
            } else {
                slice_start = Some(pos);
            }
        } else {
            let star = chars[pos..]
                .iter()
                .position(|&c| c == '*')
                .ok_or_else(|| err("expected `*` after the coefficient", pos))?;
            coeff = chars[pos..pos + star].iter().collect::<String>().parse()?;
            pos += star + 1;
        }
        let start = match slice_start {
            Some(s) => s,
            None => {
                skip_ws(&mut pos);
                if pos >= chars.len() || chars[pos] != '(' {
                    return Err(err("expected `(label, set)`", pos));
                }
                pos
            }
        };
        let close = matching(start).ok_or_else(|| err("unbalanced parenthesis", start))?;
        let inner: String = chars[start + 1..close].iter().collect();
        let (label, set) = inner
            .split_once(',')
            .ok_or_else(|| err("expected `(label, set)`", start))?;
        let t = gs.parse_label(label.trim())?;
        let support = match set.trim() {
            "dom" => gs.dom(&t),
            other => OpenSet::parse(gs.space(), other)?,
        };
        out = out.add(&Section::slice(gs, t, support, &coeff * &sign)?);
        pos = close + 1;
        skip_ws(&mut pos);
        if pos >= chars.len() {
            return Ok(out);
        }
        sign = match chars[pos] {
            '+' => Scalar::one(),
            '-' => -Scalar::one(),
            _ => return Err(err("expected `+` or `-`", pos)),
        };
        pos += 1;
    }
}

/// One cell of a normal form: `f([label, x]) = coeff` for `x ∈ set`, with
/// `label` the canonical representative of the germ class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub label: Label,
    pub set: ConstructibleSet,
    pub coeff: Scalar,
}

/// The unique representation of a section as a function on arrows: for
/// each canonical label, its nonzero values on disjoint constructible
/// cells, sorted by label then value. Equality compares cells only.
#[derive(Clone, Debug)]
pub struct NormalForm {
    pub cells: Vec<Cell>,
    /// Sample points of the refinement atoms used to build the cells.
    pub atom_samples: Vec<UPPoint>,
}

impl PartialEq for NormalForm {
    fn eq(&self, other: &NormalForm) -> bool {
        self.cells == other.cells
    }
}

impl Eq for NormalForm {}

impl NormalForm {
    pub fn is_zero(&self) -> bool {
        self.cells.is_empty()
    }
}

/// Sets on whose atoms every term's germ class is constant: the supports,
/// and `D_{t_i,s}` for every label `s` (regimes A, C) or the rule
/// cylinders of `h_{t_i}` (regime B). These refine every `D_{t_i,t_j}`.
/// On a finite space the singletons serve.
fn refining_sets(gs: &GermSystem, f: &Section) -> Vec<ConstructibleSet> {
    let space = gs.space();
    if let Some(points) = space.points() {
        return points
            .iter()
            .map(|p| ConstructibleSet::point(space, p).expect("point of the space"))
            .collect();
    }
    let mut sets: Vec<ConstructibleSet> = Vec::new();
    let mut push = |s: ConstructibleSet| {
        if !sets.contains(&s) {
            sets.push(s);
        }
    };
    for t in f.terms() {
        push(t.support.clone().into());
        if gs.is_exact() {
            for s in gs.labels(0) {
                push(gs.witness(&t.label, &s).into());
            }
        } else if let Some(rules) = gs.map(&t.label).rules() {
            for (u, _) in rules {
                push(OpenSet::cylinder(space, u).expect("rule word over the alphabet").into());
            }
        }
    }
    sets
}

pub fn normal_form(gs: &GermSystem, f: &Section) -> NormalForm {
    let space = gs.space();
    let refinement = Refinement::new(space, &refining_sets(gs, f)).expect("sets share the space");
    let mut buckets: BTreeMap<(Label, Scalar), Vec<usize>> = BTreeMap::new();
    for (k, x) in refinement.samples().iter().enumerate() {
        let mut values: BTreeMap<Label, Scalar> = BTreeMap::new();
        for t in f.terms() {
            if t.support.contains(x) {
                let a = gs.arrow(&t.label, x).expect("support inside the domain");
                *values.entry(a.label).or_insert_with(Scalar::zero) += &t.coeff;
            }
        }
        for (label, c) in values {
            if !c.is_zero() {
                buckets.entry((label, c)).or_default().push(k);
            }
        }
    }
    NormalForm {
        cells: buckets
            .into_iter()
            .map(|((label, coeff), ids)| Cell {
                label,
                set: refinement.union_of(&ids),
                coeff,
            })
            .collect(),
        atom_samples: refinement.samples().to_vec(),
    }
}

pub fn is_zero(gs: &GermSystem, f: &Section) -> bool {
    normal_form(gs, f).is_zero()
}

/// `j(f)(a) = f(a)`: the sum of coefficients of terms whose slice contains
/// an arrow germ-equal to `a`.
pub fn j_eval(gs: &GermSystem, f: &Section, a: &Arrow) -> Scalar {
    f.terms()
        .iter()
        .filter(|t| t.support.contains(&a.source))
        .filter(|t| gs.arrow(&t.label, &a.source).map(|b| b == *a).unwrap_or(false))
        .map(|t| t.coeff.clone())
        .sum()
}

/// A function on `X` constant on finitely many disjoint constructible
/// pieces. Pieces carry distinct nonzero values and are sorted by value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointFunction {
    space: Space,
    pieces: Vec<(ConstructibleSet, Scalar)>,
}

impl PointFunction {
    pub fn zero(space: &Space) -> PointFunction {
        PointFunction {
            space: space.clone(),
            pieces: Vec::new(),
        }
    }

    /// `Σ c_i · 1_{S_i}` for possibly overlapping sets `S_i`.
    pub fn sum_of(space: &Space, items: &[(ConstructibleSet, Scalar)]) -> Result<PointFunction> {
        let sets: Vec<ConstructibleSet> = items.iter().map(|(s, _)| s.clone()).collect();
        let refinement = Refinement::new(space, &sets)?;
        let mut buckets: BTreeMap<Scalar, Vec<usize>> = BTreeMap::new();
        for (k, pattern) in refinement.patterns().iter().enumerate() {
            let v: Scalar = items
                .iter()
                .zip(pattern)
                .filter(|(_, &inside)| inside)
                .map(|((_, c), _)| c.clone())
                .sum();
            if !v.is_zero() {
                buckets.entry(v).or_default().push(k);
            }
        }
        Ok(PointFunction {
            space: space.clone(),
            pieces: buckets
                .into_iter()
                .map(|(v, ids)| (refinement.union_of(&ids), v))
                .collect(),
        })
    }

    pub fn pieces(&self) -> &[(ConstructibleSet, Scalar)] {
        &self.pieces
    }

    pub fn value(&self, x: &UPPoint) -> Scalar {
        self.pieces
            .iter()
            .find(|(s, _)| s.contains(x))
            .map(|(_, v)| v.clone())
            .unwrap_or_else(Scalar::zero)
    }

    pub fn support(&self) -> ConstructibleSet {
        self.pieces.iter().fold(ConstructibleSet::empty(&self.space), |acc, (s, _)| {
            acc.union(s).expect("same space")
        })
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.is_empty()
    }
}

/// `E(Σ c·(t,U)) = Σ c·1_{U ∩ D_{t,1}}`, the restriction of `j(f)` to the
/// unit germs.
pub fn expectation_e(gs: &GermSystem, f: &Section) -> PointFunction {
    let unit = gs.unit();
    let items: Vec<(ConstructibleSet, Scalar)> = f
        .terms()
        .iter()
        .map(|t| {
            let d = gs.witness(&t.label, &unit);
            (t.support.intersect(&d).expect("same space").into(), t.coeff.clone())
        })
        .collect();
    PointFunction::sum_of(gs.space(), &items).expect("same space")
}

/// A normal-form cell whose base has nonempty interior, if any. Its
/// existence is equivalent to `supp j(f)` having nonempty interior.
pub fn regular_cell(gs: &GermSystem, f: &Section) -> Option<Cell> {
    normal_form(gs, f).cells.into_iter().find(|c| !c.set.has_empty_interior())
}

/// `supp j(f)` has empty interior in the groupoid.
pub fn is_singular(gs: &GermSystem, f: &Section) -> bool {
    regular_cell(gs, f).is_none()
}

/// The support of `E(f* f)` is meagre, i.e. `EL(f* f) = 0`.
pub fn el_kernel_member(gs: &GermSystem, f: &Section) -> bool {
    expectation_e(gs, &f.star(gs).mul(gs, f)).support().is_meagre()
}

/// Equality in the essential quotient.
pub fn ess_equal(gs: &GermSystem, f: &Section, g: &Section) -> bool {
    is_singular(gs, &f.sub(g))
}
