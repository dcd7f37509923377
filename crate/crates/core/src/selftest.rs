//! Randomized cross-module invariant suites with explicit seeds.

use std::fmt;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::freeness::{freeness_report, invariant, saturate};
use crate::gallery;
use crate::groupoid::GermSystem;
use crate::orbit::{lambda_matrix, reduced_norm_probe, Matrix};
use crate::random::{random_clopen_in, random_open, random_regime_a, random_scalar, random_section, rng};
use crate::report::{Options, Params};
use crate::scalar::Scalar;
use crate::scenario::Loaded;
use crate::section::{
    el_kernel_member, ess_equal, expectation_e, is_singular, j_eval, normal_form, PointFunction, Section, Term,
};
use crate::topology::{ConstructibleSet, OpenSet, Space, UPPoint};

/// Default case counts of [`run_all`].
pub const TOPOLOGY_CASES: usize = 200;
pub const RANDOM_SYSTEMS: usize = 100;
pub const ALGEBRA_CASES: usize = 40;
pub const SECTION_CASES: usize = 40;
pub const ORBIT_CASES: usize = 20;

#[derive(Clone, Debug)]
pub struct SuiteResult {
    pub name: String,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl SuiteResult {
    fn new(name: impl Into<String>) -> SuiteResult {
        SuiteResult {
            name: name.into(),
            cases: 0,
            failures: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok && self.failures.len() < 10 {
            self.failures.push(what());
        }
    }
}

impl fmt::Display for SuiteResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            write!(f, "PASS {} ({} cases)", self.name, self.cases)
        } else {
            write!(
                f,
                "FAIL {} ({} cases, {} failures; first: {})",
                self.name,
                self.cases,
                self.failures.len(),
                self.failures[0]
            )
        }
    }
}

/// A gallery system with its resolved label bound.
pub struct System {
    pub name: String,
    pub loaded: Loaded,
    pub bound: usize,
}

pub fn gallery_systems() -> Vec<System> {
    gallery::names()
        .into_iter()
        .map(|name| {
            let loaded = gallery::scenario(&name)
                .and_then(|s| s.load_all())
                .unwrap_or_else(|e| panic!("gallery scenario {name} fails to load: {e}"));
            let bound = Params::resolve(&loaded, &Options::default()).bound;
            System { name, loaded, bound }
        })
        .collect()
}

/// Boolean, closure and interior laws, and the agreement of the three
/// smallness tests, on random regular open sets.
pub fn topology_suite(seed: u64, cases: usize) -> SuiteResult {
    let mut r = SuiteResult::new("topology: smallness agreement, Boolean and closure laws");
    let mut g = rng(seed);
    let spaces = [Space::cantor("01").expect("alphabet"), Space::cantor("abc").expect("alphabet")];
    for case in 0..cases {
        let space = &spaces[case % 4 / 3];
        let u = random_open(space, &mut g);
        let v = random_open(space, &mut g);
        let w = random_open(space, &mut g);
        let (uc, vc, wc): (ConstructibleSet, ConstructibleSet, ConstructibleSet) =
            (u.clone().into(), v.clone().into(), w.clone().into());
        let a = u.minus(&v).expect("same space");
        let b = w.closure().minus(&uc).expect("same space");
        let boundary = u.closure().minus(&uc).expect("same space");
        let tag = |what: &str| format!("case {case} ({u} | {v} | {w}): {what}");
        for (name, s) in [
            ("U ∖ V", &a),
            ("cl W ∖ U", &b),
            ("∂U", &boundary),
            ("(U ∖ V) ∪ ∂U", &a.union(&boundary).expect("same space")),
            ("X ∖ (U ∖ V)", &a.complement()),
        ] {
            let (e, n, m) = (s.has_empty_interior(), s.is_nowhere_dense(), s.is_meagre());
            r.check(e == n && n == m, || tag(&format!("{name}: interior {e}, nowhere dense {n}, meagre {m}")));
            if let Some(x) = s.sample_point() {
                r.check(s.contains(&x), || tag(&format!("{name} misses its own sample point")));
            }
        }
        r.check(boundary.is_nowhere_dense(), || tag("boundary of an open set is not nowhere dense"));
        r.check(a.complement().complement() == a, || tag("double complement"));
        let lhs = a.union(&b).expect("same space").complement();
        let rhs = a.complement().intersect(&b.complement()).expect("same space");
        r.check(lhs == rhs, || tag("De Morgan"));
        let lhs = a.intersect(&b.union(&wc).expect("same space")).expect("same space");
        let rhs = a
            .intersect(&b)
            .and_then(|x| x.union(&a.intersect(&wc).expect("same space")))
            .expect("same space");
        r.check(lhs == rhs, || tag("distributivity"));
        r.check(
            a.union(&a.intersect(&b).expect("same space")).expect("same space") == a,
            || tag("absorption"),
        );
        let cl = a.closure();
        r.check(a.is_subset(&cl).expect("same space"), || tag("A ⊆ cl A"));
        r.check(cl.closure() == cl, || tag("cl cl A = cl A"));
        r.check(
            a.union(&b).expect("same space").closure() == cl.union(&b.closure()).expect("same space"),
            || tag("cl(A ∪ B) = cl A ∪ cl B"),
        );
        let int: ConstructibleSet = a.interior().into();
        r.check(int == a.complement().closure().complement(), || tag("int A = X ∖ cl(X ∖ A)"));
        r.check(int.is_subset(&a).expect("same space"), || tag("int A ⊆ A"));
        r.check(
            u.union(&v).map(ConstructibleSet::from).ok() == uc.union(&vc).ok(),
            || tag("open union agrees with constructible union"),
        );
        r.check(
            u.intersect(&v).map(ConstructibleSet::from).ok() == uc.intersect(&vc).ok(),
            || tag("open intersection agrees with constructible intersection"),
        );
        r.cases += 1;
    }
    r
}

/// Implication chain of the freeness verdicts, and saturation laws, on
/// the gallery plus `random_systems` random regime A systems.
pub fn freeness_suite(seed: u64, random_systems: usize) -> SuiteResult {
    let mut r = SuiteResult::new("freeness: implication chain and saturation");
    let mut systems: Vec<(String, GermSystem, usize)> = gallery_systems()
        .into_iter()
        .map(|s| (s.name, s.loaded.gs, s.bound))
        .collect();
    for k in 0..random_systems as u64 {
        let sc = random_regime_a(seed.wrapping_add(k));
        match sc.system() {
            Ok(gs) => systems.push((sc.name.clone(), gs, 1)),
            Err(e) => r.check(false, || format!("{}: {e}", sc.name)),
        }
    }
    let mut g = rng(seed);
    for (name, gs, bound) in &systems {
        let fr = freeness_report(gs, *bound);
        let free = fr.topologically_free.passes();
        r.check(fr.check_implications().is_ok(), || {
            format!("{name}: {}", fr.check_implications().unwrap_err())
        });
        r.check(fr.as_topologically_free.passes() == free, || format!("{name}: AS differs from free"));
        r.check(!fr.topologically_principal.passes() || free, || format!("{name}: principal but not free"));
        r.check(!fr.effective.passes() || free, || format!("{name}: effective but not free"));
        if fr.hausdorff {
            r.check(fr.effective.passes() == free, || format!("{name}: Hausdorff, effective differs from free"));
        }
        let u = random_open(gs.space(), &mut g);
        match saturate(gs, &u, 64) {
            Ok(s) => {
                r.check(invariant(gs, &s), || format!("{name}: saturation of {u} is not invariant"));
                r.check(u.is_subset(&s).unwrap_or(false), || format!("{name}: saturation loses {u}"));
            }
            Err(e) => r.check(false, || format!("{name}: saturate({u}) failed: {e}")),
        }
        r.cases += 1;
    }
    r
}

fn unit_section(gs: &GermSystem, g: &mut ChaCha8Rng) -> Section {
    let full = OpenSet::full(gs.space());
    let terms = (0..g.gen_range(1..=2))
        .map(|_| Term {
            label: gs.unit(),
            support: random_clopen_in(&full, g),
            coeff: random_scalar(g),
        })
        .collect();
    Section::from_terms(terms)
}

fn as_section(gs: &GermSystem, e: &PointFunction) -> Option<Section> {
    let terms = e
        .pieces()
        .iter()
        .map(|(s, v)| {
            s.as_open().filter(OpenSet::is_clopen).map(|support| Term {
                label: gs.unit(),
                support,
                coeff: v.clone(),
            })
        })
        .collect::<Option<Vec<_>>>()?;
    Some(Section::from_terms(terms))
}

fn probe_points(gs: &GermSystem, sections: &[&Section]) -> Vec<UPPoint> {
    if let Some(all) = gs.space().points() {
        return all;
    }
    let mut pts: Vec<UPPoint> = Vec::new();
    for f in sections {
        for x in normal_form(gs, f).atom_samples {
            if !pts.contains(&x) {
                pts.push(x);
            }
        }
    }
    pts
}

/// `is_hausdorff ⟺ E maps every slice (t, dom h_t) to a function with
/// clopen support`, over labels up to `bound`.
pub fn hausdorff_expectation_check(gs: &GermSystem, bound: usize) -> Result<(), String> {
    let mut all_clopen = true;
    for t in gs.labels(bound) {
        let Ok(f) = Section::delta(gs, t) else { continue };
        all_clopen &= expectation_e(gs, &f).support().is_clopen();
    }
    let h = gs.is_hausdorff(bound);
    if h == all_clopen {
        Ok(())
    } else {
        Err(format!("is_hausdorff = {h}, but clopen expectation supports = {all_clopen}"))
    }
}

/// *-algebra laws and properties of the expectation on random triples.
pub fn algebra_suite(sys: &System, seed: u64, cases: usize) -> SuiteResult {
    let gs = &sys.loaded.gs;
    let mut r = SuiteResult::new(format!("algebra laws on {}", sys.name));
    if let Err(e) = hausdorff_expectation_check(gs, sys.bound) {
        r.check(false, || e);
    }
    let mut g = rng(seed);
    let nf = |x: &Section| normal_form(gs, x);
    for case in 0..cases {
        let f = random_section(gs, &mut g, 3, 1);
        let h1 = random_section(gs, &mut g, 2, 1);
        let h2 = random_section(gs, &mut g, 2, 1);
        let tag = |what: &str| format!("case {case}: {what} (f = {})", f.display(gs));
        let fg = f.mul(gs, &h1);
        r.check(nf(&fg.mul(gs, &h2)) == nf(&f.mul(gs, &h1.mul(gs, &h2))), || tag("associativity"));
        r.check(nf(&fg.star(gs)) == nf(&h1.star(gs).mul(gs, &f.star(gs))), || tag("(fg)* = g* f*"));
        r.check(
            nf(&f.mul(gs, &h1.add(&h2))) == nf(&fg.add(&f.mul(gs, &h2))),
            || tag("distributivity"),
        );
        r.check(nf(&f.star(gs).star(gs)) == nf(&f), || tag("f** = f"));
        let a = unit_section(gs, &mut g);
        let b = unit_section(gs, &mut g);
        let (ea, eb, ef) = (expectation_e(gs, &a), expectation_e(gs, &b), expectation_e(gs, &f));
        let eafb = expectation_e(gs, &a.mul(gs, &f).mul(gs, &b));
        for x in probe_points(gs, &[&f, &a, &b]) {
            let expected = &(&ea.value(&x) * &ef.value(&x)) * &eb.value(&x);
            r.check(eafb.value(&x) == expected, || tag("E(a f b) = a E(f) b"));
        }
        let positive = expectation_e(gs, &f.star(gs).mul(gs, &f));
        for (_, v) in positive.pieces() {
            r.check(
                v.im() == &num_traits::Zero::zero() && v.re() >= &num_traits::Zero::zero(),
                || tag(&format!("E(f* f) takes the value {v}")),
            );
        }
        match as_section(gs, &ea) {
            Some(s) => r.check(expectation_e(gs, &s) == ea, || tag("E is not idempotent on unit sections")),
            None => r.check(false, || tag("E of a unit section is not clopen-supported")),
        }
        r.cases += 1;
    }
    r
}

/// Replaces each term `(t, U, c)` on `W = U ∩ cl D_{t,s}` by `(s, W, c)` for a
/// random label `s` whose germs meet `t`'s on `U`, when `W` is clopen. The
/// result differs from `f` only on a nowhere dense set, and equals it when
/// the system is Hausdorff.
pub fn perturb(gs: &GermSystem, f: &Section, bound: usize, g: &mut ChaCha8Rng) -> Section {
    let labels = gs.labels(bound);
    let mut terms = Vec::new();
    for t in f.terms() {
        let candidates: Vec<_> = labels
            .iter()
            .filter(|s| **s != t.label && !gs.witness(&t.label, s).intersect(&t.support).expect("same space").is_empty())
            .collect();
        let choice = (!candidates.is_empty()).then(|| candidates[g.gen_range(0..candidates.len())]);
        let split = choice.and_then(|s| {
            let w = gs.witness(&t.label, s).closure().intersect(&t.support.clone().into()).ok()?;
            let w = w.as_open().filter(OpenSet::is_clopen)?;
            let rest = t.support.minus(&w).ok()?.as_open()?;
            Some((s.clone(), w, rest))
        });
        match split {
            Some((s, w, rest)) => {
                terms.push(Term {
                    label: t.label.clone(),
                    support: rest,
                    coeff: t.coeff.clone(),
                });
                terms.push(Term {
                    label: s,
                    support: w,
                    coeff: t.coeff.clone(),
                });
            }
            None => terms.push(t.clone()),
        }
    }
    Section::from_terms(terms)
}

/// On a Hausdorff system: `is_singular(f) ⟺ is_zero(f)` for random
/// sections and for differences `f − perturb(f)`, which must vanish.
pub fn faithfulness_suite(sys: &System, seed: u64, cases: usize) -> SuiteResult {
    let gs = &sys.loaded.gs;
    let mut r = SuiteResult::new(format!("singular iff zero on {}", sys.name));
    let mut g = rng(seed);
    for case in 0..cases {
        let f = if case % 2 == 0 {
            random_section(gs, &mut g, 3, 1)
        } else {
            let f0 = random_section(gs, &mut g, 3, 1);
            let d = f0.sub(&perturb(gs, &f0, sys.bound, &mut g));
            r.check(normal_form(gs, &d).is_zero(), || {
                format!("case {case}: germ-equal rewriting of {} is not zero", f0.display(gs))
            });
            d
        };
        let (s, z) = (is_singular(gs, &f), normal_form(gs, &f).is_zero());
        r.check(s == z, || format!("case {case}: {} singular={s} zero={z}", f.display(gs)));
        r.cases += 1;
    }
    r
}

/// The support route and the expectation route to singularity agree, and
/// essential equality is a congruence.
pub fn route_suite(sys: &System, seed: u64, cases: usize) -> SuiteResult {
    let gs = &sys.loaded.gs;
    let mut r = SuiteResult::new(format!("singularity routes and essential quotient on {}", sys.name));
    for (name, f) in &sys.loaded.sections {
        let (a, b) = (is_singular(gs, f), el_kernel_member(gs, f));
        r.check(a == b, || format!("section {name}: support route {a}, expectation route {b}"));
    }
    let mut g = rng(seed);
    for case in 0..cases {
        let f = random_section(gs, &mut g, 3, 1);
        let p = perturb(gs, &f, sys.bound, &mut g);
        let h = random_section(gs, &mut g, 2, 1);
        let d = f.sub(&p);
        for (what, x) in [("f", &f), ("f − perturb(f)", &d), ("(f − perturb(f))·h + f", &d.mul(gs, &h).add(&f))] {
            let (a, b) = (is_singular(gs, x), el_kernel_member(gs, x));
            r.check(a == b, || format!("case {case}, {what} = {}: routes {a} vs {b}", x.display(gs)));
        }
        r.check(ess_equal(gs, &f, &p), || format!("case {case}: f not essentially equal to perturb(f)"));
        r.check(ess_equal(gs, &p, &f), || format!("case {case}: essential equality not symmetric"));
        r.check(ess_equal(gs, &f.mul(gs, &h), &p.mul(gs, &h)), || format!("case {case}: not a right congruence"));
        r.check(ess_equal(gs, &h.mul(gs, &f), &h.mul(gs, &p)), || format!("case {case}: not a left congruence"));
        r.check(ess_equal(gs, &f.star(gs), &p.star(gs)), || format!("case {case}: not a *-congruence"));
        r.cases += 1;
    }
    r
}

fn matrix_at(gs: &GermSystem, f: &Section, x: &UPPoint, bound: usize) -> Matrix {
    lambda_matrix(gs, f, x, bound).expect("points of the space").matrix
}

/// `λ_x` is a *-homomorphism on exact systems, faithful on unit sections,
/// and the norm probe dominates the matrix entries.
pub fn orbit_suite(sys: &System, seed: u64, cases: usize) -> SuiteResult {
    let gs = &sys.loaded.gs;
    let mut r = SuiteResult::new(format!("orbit representations on {}", sys.name));
    let mut g = rng(seed);
    for case in 0..cases {
        let f = random_section(gs, &mut g, 3, 1);
        let h = random_section(gs, &mut g, 2, 1);
        let a = unit_section(gs, &mut g);
        let points = probe_points(gs, &[&f, &h, &a]);
        for x in &points {
            let b = sys.bound;
            let (mf, mh) = (matrix_at(gs, &f, x, b), matrix_at(gs, &h, x, b));
            if gs.is_exact() {
                r.check(matrix_at(gs, &f.mul(gs, &h), x, b) == mf.mul(&mh), || {
                    format!("case {case}: λ(fh) ≠ λ(f)λ(h) at {}", x.display(gs.space()))
                });
                r.check(matrix_at(gs, &f.star(gs), x, b) == mf.conj_transpose(), || {
                    format!("case {case}: λ(f*) ≠ λ(f)* at {}", x.display(gs.space()))
                });
            }
            let va = j_eval(gs, &a, &gs.unit_arrow(x).expect("unit arrow"));
            let ma = matrix_at(gs, &a, x, b);
            r.check(va.is_zero() || !ma.rows[0][0].is_zero(), || {
                format!("case {case}: unit section invisible at {}", x.display(gs.space()))
            });
        }
        match reduced_norm_probe(gs, &f, &points, sys.bound, 1e-9) {
            Ok(p) => {
                let max_entry = points
                    .iter()
                    .flat_map(|x| matrix_at(gs, &f, x, sys.bound).rows.into_iter().flatten())
                    .map(|v| Scalar::to_c64(&v).norm())
                    .fold(0.0, f64::max);
                r.check(p.value + 1e-6 >= max_entry, || {
                    format!("case {case}: probe {} below the largest entry {max_entry}", p.value)
                });
            }
            Err(e) => r.check(false, || format!("case {case}: norm probe failed: {e}")),
        }
        r.cases += 1;
    }
    r
}

/// Every suite with the default case counts (or `cases` per suite).
pub fn run_all(seed: u64, cases: Option<usize>) -> Vec<SuiteResult> {
    let n = |default: usize| cases.unwrap_or(default);
    let mut out = vec![topology_suite(seed, n(TOPOLOGY_CASES)), freeness_suite(seed, n(RANDOM_SYSTEMS))];
    for (k, sys) in gallery_systems().iter().enumerate() {
        let s = seed.wrapping_add(1000 * (k as u64 + 1));
        out.push(algebra_suite(sys, s, n(ALGEBRA_CASES)));
        out.push(route_suite(sys, s + 1, n(SECTION_CASES)));
        if sys.loaded.gs.is_hausdorff(sys.bound) {
            out.push(faithfulness_suite(sys, s + 2, n(SECTION_CASES)));
        }
        out.push(orbit_suite(sys, s + 3, n(ORBIT_CASES)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_passes() {
        for r in run_all(1, Some(3)) {
            assert!(r.passed(), "{r}");
        }
    }
}
