//! Seeded generators for randomized checks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::groupoid::GermSystem;
use crate::scalar::Scalar;
use crate::scenario::{Analysis, MapDecl, Scenario, SectionDecl, SpaceDecl, SystemDecl};
use crate::section::{Section, Term};
use crate::topology::{OpenSet, Space};

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 20_240_601;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_word(rng: &mut ChaCha8Rng, letters: &[char], max_len: usize) -> String {
    let n = rng.gen_range(0..=max_len);
    (0..n).map(|_| *letters.choose(rng).expect("nonempty alphabet")).collect()
}

/// A random regular expression over `letters` built from words, stars and
/// alternations.
pub fn random_regex(rng: &mut ChaCha8Rng, letters: &[char]) -> String {
    let piece = |rng: &mut ChaCha8Rng| -> String {
        match rng.gen_range(0..4) {
            0 | 1 => {
                let w = random_word(rng, letters, 3);
                if w.is_empty() {
                    "ε".to_string()
                } else {
                    w
                }
            }
            2 => {
                let w = random_word(rng, letters, 2);
                let w = if w.is_empty() { letters[0].to_string() } else { w };
                format!("({w})*")
            }
            _ => {
                let a = random_word(rng, letters, 2);
                let b = random_word(rng, letters, 2);
                let f = |w: String| if w.is_empty() { "ε".to_string() } else { w };
                format!("({}|{})", f(a), f(b))
            }
        }
    };
    let n = rng.gen_range(1..=3);
    (0..n).map(|_| piece(rng)).collect::<Vec<_>>().join("")
}

/// A random open set: a regular union of cylinders on the Cantor space, a
/// random subset of a finite space.
pub fn random_open(space: &Space, rng: &mut ChaCha8Rng) -> OpenSet {
    match space {
        Space::Finite(n) => OpenSet::from_points(space, (0..*n).filter(|_| rng.gen_bool(0.5))).expect("points in range"),
        Space::Cantor(alpha) => {
            let letters = alpha.letters().to_vec();
            if rng.gen_ratio(1, 10) {
                return OpenSet::empty(space);
            }
            OpenSet::from_regex(space, &random_regex(rng, &letters)).expect("generated regex parses")
        }
    }
}

/// A random clopen subset of the clopen set `dom`.
pub fn random_clopen_in(dom: &OpenSet, rng: &mut ChaCha8Rng) -> OpenSet {
    let space = dom.space().clone();
    match &space {
        Space::Finite(_) => {
            let members = dom.members().expect("finite backend");
            OpenSet::from_points(&space, members.iter().copied().filter(|_| rng.gen_bool(0.6))).expect("points in range")
        }
        Space::Cantor(alpha) => {
            if rng.gen_ratio(1, 3) {
                return dom.clone();
            }
            let k = alpha.len() as u8;
            let words: Vec<Vec<u8>> = (0..rng.gen_range(1..=3))
                .map(|_| (0..rng.gen_range(0..=3)).map(|_| rng.gen_range(0..k)).collect())
                .collect();
            let u = OpenSet::from_words(&space, words.iter().map(|w| w.as_slice())).expect("words over the alphabet");
            u.intersect(dom).expect("same space")
        }
    }
}

pub fn random_scalar(rng: &mut ChaCha8Rng) -> Scalar {
    let re = rng.gen_range(-2..=2);
    let im = if rng.gen_ratio(1, 3) { rng.gen_range(-1..=1) } else { 0 };
    let den = if rng.gen_ratio(1, 4) { 2 } else { 1 };
    Scalar::from_ratios(re, den, im, 1)
}

/// A random section with up to `max_terms` terms, labels drawn from the
/// labels of composition length ≤ `bound`.
pub fn random_section(gs: &GermSystem, rng: &mut ChaCha8Rng, max_terms: usize, bound: usize) -> Section {
    let labels = gs.labels(bound);
    let n = rng.gen_range(1..=max_terms.max(1));
    let terms = (0..n)
        .map(|_| {
            let t = labels.choose(rng).expect("the unit label exists").clone();
            let support = random_clopen_in(&gs.dom(&t), rng);
            Term {
                label: t,
                support,
                coeff: random_scalar(rng),
            }
        })
        .collect();
    Section::from_terms(terms)
}

/// A random partial injection of `{0..n-1}` as scenario rules.
fn random_partial_injection(rng: &mut ChaCha8Rng, n: usize) -> Vec<String> {
    let dom: Vec<usize> = (0..n).filter(|_| rng.gen_ratio(3, 4)).collect();
    let mut targets: Vec<usize> = (0..n).collect();
    targets.shuffle(rng);
    if dom.is_empty() {
        return vec!["id on {}".to_string()];
    }
    dom.iter().zip(targets).map(|(i, j)| format!("{i} -> {j}")).collect()
}

/// A random regime A scenario: the inverse monoid generated by one or two
/// distinct non-identity partial injections of a space of at most four
/// points.
pub fn random_regime_a(seed: u64) -> Scenario {
    let mut rng = rng(seed);
    let n = rng.gen_range(1..=4);
    let k = if n == 1 { 1 } else { rng.gen_range(1..=2) };
    let names = ["a", "b"];
    let identity: Vec<String> = (0..n).map(|i| format!("{i} -> {i}")).collect();
    let mut generators: Vec<MapDecl> = Vec::new();
    while generators.len() < k {
        let rules = random_partial_injection(&mut rng, n);
        if rules != identity && generators.iter().all(|g| g.rules != rules) {
            generators.push(MapDecl {
                name: names[generators.len()].to_string(),
                rules,
            });
        }
    }
    Scenario {
        name: format!("random-{seed}"),
        description: "inverse monoid generated by random partial injections".into(),
        space: SpaceDecl::Finite(n),
        system: SystemDecl::A {
            symmetric: None,
            generators: Some(generators),
            cap: None,
            table: None,
        },
        sections: vec![
            SectionDecl {
                name: "da".into(),
                expr: "(a, dom)".into(),
            },
            SectionDecl {
                name: "f".into(),
                expr: "(a, dom) - (a a, dom)".into(),
            },
        ],
        points: Vec::new(),
        analysis: Analysis {
            products: vec![["f".into(), "f".into()]],
            ess_pairs: vec![["da".into(), "f".into()]],
            ..Analysis::default()
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_scenarios_load() {
        for seed in 0..30 {
            let sc = random_regime_a(seed);
            let loaded = sc.load_all().unwrap_or_else(|e| panic!("seed {seed}: {e}"));
            let mut r = rng(seed);
            let f = random_section(&loaded.gs, &mut r, 3, 1);
            assert!(f.terms().len() <= 3);
        }
    }

    #[test]
    fn deterministic() {
        let s = Space::cantor("01").unwrap();
        let a: Vec<OpenSet> = (0..5).map(|_| random_open(&s, &mut rng(7))).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
    }
}
