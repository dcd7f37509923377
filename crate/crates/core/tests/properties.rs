//! Property tests of the module invariants.

use proptest::prelude::*;

use etale_lab::gallery;
use etale_lab::groupoid::GermSystem;
use etale_lab::partial_map::PartialMap;
use etale_lab::random::{random_open, random_regime_a, random_section, rng};
use etale_lab::scalar::Scalar;
use etale_lab::scenario::Scenario;
use etale_lab::section::{expectation_e, is_singular, normal_form, Section};
use etale_lab::semigroup::MapMonoid;
use etale_lab::topology::{ConstructibleSet, OpenSet, Space, UPPoint};

fn cantor() -> Space {
    Space::cantor("01").unwrap()
}

fn open(seed: u64) -> OpenSet {
    random_open(&cantor(), &mut rng(seed))
}

fn word(max: usize) -> impl Strategy<Value = String> {
    proptest::collection::vec(prop_oneof![Just('0'), Just('1')], 0..=max).prop_map(|v| v.into_iter().collect())
}

/// Ultimately periodic points `u(v)` of {0,1}^ℕ.
fn point() -> impl Strategy<Value = UPPoint> {
    (word(4), word(3)).prop_map(|(u, v)| {
        let v = if v.is_empty() { "0".to_string() } else { v };
        cantor().parse_point(&format!("{u}({v})")).unwrap()
    })
}

/// A prefix exchange sending distinct words of length `k` to distinct
/// words of length `l`.
fn prefix_map() -> impl Strategy<Value = PartialMap> {
    (1usize..=2, 1usize..=2, any::<u64>()).prop_map(|(k, l, seed)| {
        use rand::seq::SliceRandom;
        let mut g = rng(seed);
        let all = |len: usize| -> Vec<Vec<u8>> {
            (0..1u32 << len).map(|m| (0..len).map(|i| (m >> i & 1) as u8).collect()).collect()
        };
        let mut dom = all(k);
        let mut ran = all(l);
        dom.shuffle(&mut g);
        ran.shuffle(&mut g);
        let n = rand::Rng::gen_range(&mut g, 0..=dom.len().min(ran.len()));
        let rules = dom.into_iter().zip(ran).take(n).collect();
        PartialMap::prefix_exchange(&cantor(), rules).unwrap()
    })
}

fn gallery_system(i: usize) -> (String, GermSystem, usize) {
    let names = gallery::names();
    let name = &names[i % names.len()];
    let loaded = gallery::scenario(name).unwrap().load_all().unwrap();
    let bound = loaded.gs.default_bound().unwrap_or(1);
    (name.clone(), loaded.gs, bound)
}

fn scalar() -> impl Strategy<Value = Scalar> {
    (-6i64..=6, 1i64..=4, -6i64..=6, 1i64..=4).prop_map(|(p, q, r, s)| Scalar::from_ratios(p, q, r, s))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn open_sets_form_a_lattice(a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let (u, v, w) = (open(a), open(b), open(c));
        prop_assert_eq!(u.union(&v).unwrap(), v.union(&u).unwrap());
        prop_assert_eq!(u.intersect(&v).unwrap(), v.intersect(&u).unwrap());
        prop_assert_eq!(
            u.intersect(&v.union(&w).unwrap()).unwrap(),
            u.intersect(&v).unwrap().union(&u.intersect(&w).unwrap()).unwrap()
        );
        prop_assert!(u.is_subset(&u.union(&v).unwrap()).unwrap());
        prop_assert!(u.intersect(&v).unwrap().is_subset(&u).unwrap());
        prop_assert_eq!(u.union(&u).unwrap(), u.clone());
    }

    #[test]
    fn membership_follows_set_operations(a in any::<u64>(), b in any::<u64>(), x in point()) {
        let (u, v) = (open(a), open(b));
        prop_assert_eq!(u.union(&v).unwrap().contains(&x), u.contains(&x) || v.contains(&x));
        prop_assert_eq!(u.intersect(&v).unwrap().contains(&x), u.contains(&x) && v.contains(&x));
        prop_assert_eq!(u.minus(&v).unwrap().contains(&x), u.contains(&x) && !v.contains(&x));
        prop_assert_eq!(u.complement().contains(&x), !u.contains(&x));
        if u.contains(&x) {
            prop_assert!(u.closure().contains(&x));
        }
    }

    #[test]
    fn smallness_tests_agree(a in any::<u64>(), b in any::<u64>()) {
        let (u, v) = (open(a), open(b));
        let s = u.closure().minus(&ConstructibleSet::from(v)).unwrap();
        let e = s.has_empty_interior();
        prop_assert_eq!(e, s.is_nowhere_dense());
        prop_assert_eq!(e, s.is_meagre());
        prop_assert!(u.closure().minus(&u.to_constructible()).unwrap().is_nowhere_dense());
    }

    #[test]
    fn sample_points_are_members(a in any::<u64>()) {
        let u = open(a);
        if !u.is_empty() {
            prop_assert!(u.contains(&u.sample_point().unwrap()));
        }
    }

    #[test]
    fn prefix_maps_compose_and_invert(f in prefix_map(), g in prefix_map(), h in prefix_map(), x in point()) {
        let fg = f.compose(&g).unwrap();
        prop_assert_eq!(fg.compose(&h).unwrap(), f.compose(&g.compose(&h).unwrap()).unwrap());
        prop_assert_eq!(f.invert().invert(), f.clone());
        prop_assert_eq!(f.compose(&f.invert()).unwrap().compose(&f).unwrap(), f.clone());
        prop_assert_eq!(fg.invert(), g.invert().compose(&f.invert()).unwrap());
        prop_assert_eq!(fg.domain(), g.preimage(&f.domain()).unwrap());
        prop_assert_eq!(f.image(&f.domain()).unwrap(), f.range());
        if fg.contains(&x) {
            prop_assert_eq!(fg.apply(&x).unwrap(), f.apply(&g.apply(&x).unwrap()).unwrap());
            prop_assert_eq!(f.invert().apply(&f.apply(&g.apply(&x).unwrap()).unwrap()).unwrap(), g.apply(&x).unwrap());
        }
    }

    #[test]
    fn symmetric_monoid_is_an_inverse_semigroup(n in 1usize..=3, t in any::<usize>(), u in any::<usize>(), v in any::<usize>()) {
        let m = MapMonoid::symmetric(n).unwrap();
        let s = &m.semigroup;
        let (t, u, v) = (t % s.len(), u % s.len(), v % s.len());
        prop_assert_eq!(s.mul(s.mul(t, u), v), s.mul(t, s.mul(u, v)));
        prop_assert_eq!(s.mul(s.mul(t, s.star(t)), t), t);
        prop_assert_eq!(s.star(s.star(t)), t);
        prop_assert_eq!(s.star(s.mul(t, u)), s.mul(s.star(u), s.star(t)));
        let (e, f) = (s.mul(t, s.star(t)), s.mul(u, s.star(u)));
        prop_assert_eq!(s.mul(e, f), s.mul(f, e));
        prop_assert!(s.leq(t, t));
        if s.leq(t, u) && s.leq(u, t) {
            prop_assert_eq!(t, u);
        }
        if s.leq(t, u) && s.leq(u, v) {
            prop_assert!(s.leq(t, v));
        }
        prop_assert_eq!(m.maps[s.mul(t, u)].clone(), m.maps[t].compose(&m.maps[u]).unwrap());
    }

    #[test]
    fn germ_equality_is_an_equivalence(i in any::<usize>(), a in any::<usize>(), b in any::<usize>(), c in any::<usize>(), seed in any::<u64>()) {
        let (_, gs, bound) = gallery_system(i);
        let labels = gs.labels(bound);
        let (t, u, v) = (&labels[a % labels.len()], &labels[b % labels.len()], &labels[c % labels.len()]);
        let x = match gs.space().points() {
            Some(points) => points[seed as usize % points.len()].clone(),
            None => gs.dom(t).sample_point().unwrap_or_else(|_| cantor().parse_point("(0)").unwrap()),
        };
        prop_assert_eq!(gs.germ_eq(t, t, &x), gs.dom(t).contains(&x));
        prop_assert_eq!(gs.germ_eq(t, u, &x), gs.germ_eq(u, t, &x));
        if gs.germ_eq(t, u, &x) && gs.germ_eq(u, v, &x) {
            prop_assert!(gs.germ_eq(t, v, &x));
        }
        if gs.germ_eq(t, u, &x) {
            prop_assert_eq!(gs.map(t).apply(&x).unwrap(), gs.map(u).apply(&x).unwrap());
        }
    }

    #[test]
    fn scalars_form_a_field(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a - &a, Scalar::zero());
        prop_assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
        if let Some(inv) = a.inv() {
            prop_assert_eq!(&a * &inv, Scalar::one());
        }
        prop_assert_eq!(a.to_string().parse::<Scalar>().unwrap(), a);
    }

    #[test]
    fn section_algebra_laws(i in any::<usize>(), seed in any::<u64>()) {
        let (name, gs, _) = gallery_system(i);
        let mut g = rng(seed);
        let f = random_section(&gs, &mut g, 3, 1);
        let h = random_section(&gs, &mut g, 2, 1);
        let nf = |x: &Section| normal_form(&gs, x);
        prop_assert!(nf(&f.sub(&f)).is_zero(), "{}", name);
        prop_assert_eq!(nf(&f.add(&h)), nf(&h.add(&f)));
        prop_assert_eq!(nf(&f.mul(&gs, &h).star(&gs)), nf(&h.star(&gs).mul(&gs, &f.star(&gs))));
        prop_assert_eq!(nf(&f.scale(&Scalar::from_int(2))), nf(&f.add(&f)));
        prop_assert_eq!(nf(&Section::unit(&gs).mul(&gs, &f)), nf(&f));
        prop_assert_eq!(nf(&f.mul(&gs, &Section::unit(&gs))), nf(&f));
        let e = expectation_e(&gs, &f.star(&gs).mul(&gs, &f));
        prop_assert_eq!(e.is_zero(), nf(&f).is_zero());
        if gs.is_hausdorff(1) {
            prop_assert_eq!(is_singular(&gs, &f), nf(&f).is_zero());
        }
    }

    #[test]
    fn random_scenarios_round_trip(seed in any::<u64>()) {
        let sc = random_regime_a(seed);
        let text = sc.to_canonical_json();
        let again = Scenario::from_json(&text, "round trip").unwrap();
        prop_assert_eq!(again.to_canonical_json(), text);
        prop_assert!(again.load_all().is_ok());
    }
}
