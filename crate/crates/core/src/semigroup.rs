//! Finite inverse semigroups given by multiplication tables, and the
//! inverse monoids generated by partial maps.

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use crate::error::{Error, Result};
use crate::partial_map::PartialMap;
use crate::topology::{OpenSet, Space};

/// A failed inverse semigroup axiom, with a concrete counterexample.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TableViolation {
    #[error("table has {rows} rows of lengths {lengths:?}, expected a {n}×{n} table")]
    Shape { n: usize, rows: usize, lengths: Vec<usize> },
    #[error("product {left}·{right} names an unknown element {value}")]
    Closure { left: String, right: String, value: String },
    #[error("{element} is not fixed by the unit {unit}")]
    Unit { unit: String, element: String },
    #[error("associativity fails: ({a}·{b})·{c} ≠ {a}·({b}·{c})")]
    Associativity { a: String, b: String, c: String },
    #[error("{element} has no pseudo-inverse")]
    MissingInverse { element: String },
    #[error("{element} has two pseudo-inverses {first} and {second}")]
    AmbiguousInverse { element: String, first: String, second: String },
    #[error("idempotents {e} and {f} do not commute")]
    IdempotentsCommute { e: String, f: String },
    #[error("declared star of {element} is {declared}, but its pseudo-inverse is {computed}")]
    StarMismatch { element: String, declared: String, computed: String },
}

/// A validated finite inverse semigroup with a unit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InverseSemigroup {
    names: Vec<String>,
    unit: usize,
    mul: Vec<usize>,
    star: Vec<usize>,
    idempotents: Vec<usize>,
}

/// The natural partial order, as the pairs `t ≤ u` with the witnessing
/// idempotent `e = t*t`, so that `t = u·e`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NaturalOrder {
    pub pairs: Vec<(usize, usize, usize)>,
}

impl InverseSemigroup {
    /// Validates a table; `table[t][u]` is the index of `t·u`. If `stars`
    /// is given it must agree with the computed pseudo-inverses.
    pub fn new(
        names: Vec<String>,
        table: &[Vec<usize>],
        unit: usize,
        stars: Option<&[usize]>,
    ) -> Result<InverseSemigroup, TableViolation> {
        let n = names.len();
        if table.len() != n || table.iter().any(|r| r.len() != n) || unit >= n {
            return Err(TableViolation::Shape {
                n,
                rows: table.len(),
                lengths: table.iter().map(|r| r.len()).collect(),
            });
        }
        let name = |i: usize| names.get(i).cloned().unwrap_or_else(|| format!("#{i}"));
        for t in 0..n {
            for u in 0..n {
                if table[t][u] >= n {
                    return Err(TableViolation::Closure {
                        left: name(t),
                        right: name(u),
                        value: format!("#{}", table[t][u]),
                    });
                }
            }
        }
        let mul: Vec<usize> = table.iter().flatten().copied().collect();
        let m = |a: usize, b: usize| mul[a * n + b];
        for t in 0..n {
            if m(unit, t) != t || m(t, unit) != t {
                return Err(TableViolation::Unit {
                    unit: name(unit),
                    element: name(t),
                });
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab = m(a, b);
                for c in 0..n {
                    if m(ab, c) != m(a, m(b, c)) {
                        return Err(TableViolation::Associativity {
                            a: name(a),
                            b: name(b),
                            c: name(c),
                        });
                    }
                }
            }
        }
        let idempotents: Vec<usize> = (0..n).filter(|&e| m(e, e) == e).collect();
        for &e in &idempotents {
            for &f in &idempotents {
                if m(e, f) != m(f, e) {
                    return Err(TableViolation::IdempotentsCommute { e: name(e), f: name(f) });
                }
            }
        }
        let mut star = Vec::with_capacity(n);
        for t in 0..n {
            let mut found = (0..n).filter(|&s| m(m(t, s), t) == t && m(m(s, t), s) == s);
            let first = found.next().ok_or_else(|| TableViolation::MissingInverse { element: name(t) })?;
            if let Some(second) = found.next() {
                return Err(TableViolation::AmbiguousInverse {
                    element: name(t),
                    first: name(first),
                    second: name(second),
                });
            }
            star.push(first);
        }
        if let Some(declared) = stars {
            for t in 0..n {
                if declared.get(t) != Some(&star[t]) {
                    return Err(TableViolation::StarMismatch {
                        element: name(t),
                        declared: declared.get(t).map_or("nothing".into(), |&d| name(d)),
                        computed: name(star[t]),
                    });
                }
            }
        }
        Ok(InverseSemigroup {
            names,
            unit,
            mul,
            star,
            idempotents,
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn unit(&self) -> usize {
        self.unit
    }

    pub fn mul(&self, t: usize, u: usize) -> usize {
        self.mul[t * self.len() + u]
    }

    pub fn star(&self, t: usize) -> usize {
        self.star[t]
    }

    pub fn idempotents(&self) -> &[usize] {
        &self.idempotents
    }

    pub fn is_idempotent(&self, e: usize) -> bool {
        self.mul(e, e) == e
    }

    /// `t ≤ u ⟺ t = u·t*·t`.
    pub fn leq(&self, t: usize, u: usize) -> bool {
        t == self.mul(u, self.mul(self.star(t), t))
    }

    pub fn natural_order(&self) -> NaturalOrder {
        let n = self.len();
        let pairs = (0..n)
            .flat_map(|t| (0..n).map(move |u| (t, u)))
            .filter(|&(t, u)| self.leq(t, u))
            .map(|(t, u)| (t, u, self.mul(self.star(t), t)))
            .collect();
        NaturalOrder { pairs }
    }

    /// `{v : v ≤ t and v ≤ u}`.
    pub fn meet_witnesses(&self, t: usize, u: usize) -> Vec<usize> {
        (0..self.len()).filter(|&v| self.leq(v, t) && self.leq(v, u)).collect()
    }

    /// The full table as rows, for serialisation.
    pub fn table(&self) -> Vec<Vec<usize>> {
        self.mul.chunks(self.len()).map(|r| r.to_vec()).collect()
    }
}

/// A finite inverse monoid of partial maps with its tautological action.
#[derive(Clone, Debug)]
pub struct MapMonoid {
    pub semigroup: InverseSemigroup,
    pub maps: Vec<PartialMap>,
}

impl MapMonoid {
    fn from_maps(names: Vec<String>, maps: Vec<PartialMap>) -> Result<MapMonoid> {
        let index: HashMap<&PartialMap, usize> = maps.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let lookup = |m: &PartialMap| {
            index
                .get(m)
                .copied()
                .ok_or_else(|| Error::Invariant(format!("map {m} escaped the generated set")))
        };
        let mut table = Vec::with_capacity(maps.len());
        for t in &maps {
            let row = maps
                .iter()
                .map(|u| lookup(&t.compose(u)?))
                .collect::<Result<Vec<usize>>>()?;
            table.push(row);
        }
        let stars = maps.iter().map(|m| lookup(&m.invert())).collect::<Result<Vec<usize>>>()?;
        let space = maps[0].space().clone();
        let unit = lookup(&PartialMap::identity(&space))?;
        let semigroup = InverseSemigroup::new(names, &table, unit, Some(&stars))?;
        Ok(MapMonoid { semigroup, maps })
    }

    /// The monoid generated by `gens` under composition and inversion, in
    /// breadth-first order of words over `g1, g1*, g2, g2*, ...` starting
    /// from the identity. Fails with [`Error::CapExceeded`] once more than
    /// `cap` elements appear.
    pub fn generate(space: &Space, gens: &[(String, PartialMap)], cap: usize) -> Result<MapMonoid> {
        let mut letters: Vec<(String, PartialMap)> = Vec::new();
        for (name, g) in gens {
            space.check_same(g.space())?;
            letters.push((name.clone(), g.clone()));
            letters.push((format!("{name}*"), g.invert()));
        }
        let identity = PartialMap::identity(space);
        let mut names = vec!["1".to_string()];
        let mut maps = vec![identity.clone()];
        let mut seen: HashMap<PartialMap, usize> = HashMap::from([(identity, 0)]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for (lname, l) in &letters {
                let next = maps[i].compose(l)?;
                if seen.contains_key(&next) {
                    continue;
                }
                if maps.len() == cap {
                    return Err(Error::CapExceeded {
                        reached: maps.len() + 1,
                        frontier: queue.len() + 1,
                    });
                }
                let name = if i == 0 { lname.clone() } else { format!("{} {lname}", names[i]) };
                seen.insert(next.clone(), maps.len());
                queue.push_back(maps.len());
                names.push(name);
                maps.push(next);
            }
        }
        MapMonoid::from_maps(names, maps)
    }

    /// The symmetric inverse monoid `I_n` of all partial injections of an
    /// `n`-point set, identity first, then by image vector.
    pub fn symmetric(n: usize) -> Result<MapMonoid> {
        if n == 0 || n > 6 {
            return Err(Error::Parse(format!("symmetric inverse monoid needs 1 ≤ n ≤ 6, got {n}")));
        }
        let space = Space::finite(n)?;
        // image vectors: entry i is the image of i, or n for undefined
        let mut vectors: Vec<Vec<usize>> = Vec::new();
        let mut current = vec![0usize; n];
        loop {
            let images: Vec<usize> = current.iter().copied().filter(|&v| v < n).collect();
            let mut sorted = images.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() == images.len() {
                vectors.push(current.clone());
            }
            // odometer over {0..=n}^n
            let mut pos = n;
            loop {
                if pos == 0 {
                    let identity: Vec<usize> = (0..n).collect();
                    vectors.sort_by_key(|v| (*v != identity, v.clone()));
                    let names = vectors
                        .iter()
                        .map(|v| {
                            if *v == identity {
                                "1".to_string()
                            } else {
                                let s: String = v
                                    .iter()
                                    .map(|&x| if x < n { char::from_digit(x as u32, 10).unwrap() } else { '-' })
                                    .collect();
                                format!("[{s}]")
                            }
                        })
                        .collect();
                    let maps = vectors
                        .iter()
                        .map(|v| PartialMap::finite(&space, v.iter().enumerate().filter(|(_, &x)| x < n).map(|(i, &x)| (i, x))))
                        .collect::<Result<Vec<_>>>()?;
                    return MapMonoid::from_maps(names, maps);
                }
                pos -= 1;
                if current[pos] < n {
                    current[pos] += 1;
                    break;
                }
                current[pos] = 0;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    /// `D_{t,u} = ⋃ { dom h_v : v ≤ t, v ≤ u }`.
    pub fn witness_domain(&self, t: usize, u: usize) -> OpenSet {
        let space = self.maps[0].space();
        self.semigroup
            .meet_witnesses(t, u)
            .into_iter()
            .fold(OpenSet::empty(space), |acc, v| acc.union(&self.maps[v].domain()).expect("same space"))
    }
}
