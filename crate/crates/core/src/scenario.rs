//! Scenario files: JSON descriptions of a space, a germ system, named
//! sections, probe points, and analysis parameters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groupoid::GermSystem;
use crate::partial_map::PartialMap;
use crate::section::{parse_section, Section};
use crate::semigroup::{InverseSemigroup, MapMonoid};
use crate::topology::{OpenSet, Space, UPPoint};

/// Element cap for generated inverse monoids when a scenario gives none.
pub const DEFAULT_MONOID_CAP: usize = 1000;

/// Multiplication table, optional star table and label maps.
type TableParts = (Vec<Vec<usize>>, Option<Vec<usize>>, Vec<PartialMap>);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub space: SpaceDecl,
    pub system: SystemDecl,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sections: Vec<SectionDecl>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<String>,
    #[serde(default, skip_serializing_if = "Analysis::is_default")]
    pub analysis: Analysis,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SpaceDecl {
    /// Number of points of a finite discrete space.
    Finite(usize),
    /// Alphabet of the Cantor space.
    Cantor(String),
}

/// A named partial map given by rules in [`PartialMap::parse`] syntax.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDecl {
    pub name: String,
    pub rules: Vec<String>,
}

/// A label table with one map per label; the unit label is named `1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableDecl {
    pub labels: Vec<String>,
    /// `table[i][j]` names the product of labels `i` and `j`.
    pub table: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stars: Option<Vec<String>>,
    pub maps: Vec<MapDecl>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessDecl {
    pub pair: [String; 2],
    /// Open set in [`OpenSet::parse`] syntax.
    pub set: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "regime", deny_unknown_fields)]
pub enum SystemDecl {
    /// An inverse semigroup acting by partial maps: exactly one of
    /// `symmetric`, `generators` or `table`.
    A {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        symmetric: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        generators: Option<Vec<MapDecl>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cap: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        table: Option<TableDecl>,
    },
    /// The pseudogroup generated by prefix exchanges.
    B { generators: Vec<MapDecl>, bound: usize },
    /// A label table with explicit witness sets.
    C {
        labels: Vec<String>,
        table: Vec<Vec<String>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        stars: Option<Vec<String>>,
        maps: Vec<MapDecl>,
        #[serde(default)]
        witnesses: Vec<WitnessDecl>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectionDecl {
    pub name: String,
    /// Section in [`parse_section`] syntax.
    pub expr: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Analysis {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub len: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iter_cap: Option<usize>,
    /// Open set searched for a pure-infiniteness witness, default `X`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness_region: Option<String>,
    /// Pairs of section names whose products are reported.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub products: Vec<[String; 2]>,
    /// Pairs of section names compared in the essential quotient.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ess_pairs: Vec<[String; 2]>,
}

impl Analysis {
    fn is_default(&self) -> bool {
        *self == Analysis::default()
    }
}

/// A scenario with its system built and its sections and points parsed.
#[derive(Clone, Debug)]
pub struct Loaded {
    pub scenario: Scenario,
    pub gs: GermSystem,
    pub sections: Vec<(String, Section)>,
    pub points: Vec<UPPoint>,
}

impl Loaded {
    pub fn section(&self, name: &str) -> Result<&Section> {
        self.sections
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, s)| s)
            .ok_or_else(|| self.scenario.located("analysis", format!("unknown section {name:?}")))
    }
}

impl Scenario {
    /// Parses JSON; `origin` names the source in diagnostics.
    pub fn from_json(text: &str, origin: &str) -> Result<Scenario> {
        serde_json::from_str(text).map_err(|e| Error::Scenario {
            path: origin.to_string(),
            msg: e.to_string(),
        })
    }

    pub fn load(path: &std::path::Path) -> Result<Scenario> {
        let text = std::fs::read_to_string(path)?;
        Scenario::from_json(&text, &path.display().to_string())
    }

    /// Canonical serialisation: pretty JSON with fixed key order.
    pub fn to_canonical_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("scenario serialises");
        s.push('\n');
        s
    }

    fn located(&self, field: &str, msg: impl Into<String>) -> Error {
        Error::Scenario {
            path: format!("{}, field {field}", self.name),
            msg: msg.into(),
        }
    }

    fn at<T>(&self, field: &str, r: Result<T>) -> Result<T> {
        r.map_err(|e| match e {
            Error::System(_) | Error::Semigroup(_) | Error::CapExceeded { .. } => e,
            other => self.located(field, other.to_string()),
        })
    }

    pub fn space(&self) -> Result<Space> {
        let r = match &self.space {
            SpaceDecl::Finite(n) => Space::finite(*n),
            SpaceDecl::Cantor(a) => Space::cantor(a),
        };
        self.at("space", r)
    }

    fn maps(&self, space: &Space, decls: &[MapDecl], field: &str) -> Result<Vec<(String, PartialMap)>> {
        decls
            .iter()
            .enumerate()
            .map(|(i, d)| {
                let m = self.at(&format!("{field}[{i}].rules"), PartialMap::parse(space, &d.rules))?;
                Ok((d.name.clone(), m))
            })
            .collect()
    }

    fn table_parts(
        &self,
        space: &Space,
        t: &TableDecl,
    ) -> Result<TableParts> {
        let index = |name: &str, field: &str| -> Result<usize> {
            t.labels
                .iter()
                .position(|l| l == name)
                .ok_or_else(|| self.located(field, format!("unknown label {name:?}")))
        };
        let table = t
            .table
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, n)| index(n, &format!("system.table[{i}][{j}]")))
                    .collect()
            })
            .collect::<Result<Vec<Vec<usize>>>>()?;
        let stars = t
            .stars
            .as_ref()
            .map(|s| {
                s.iter()
                    .enumerate()
                    .map(|(i, n)| index(n, &format!("system.stars[{i}]")))
                    .collect::<Result<Vec<usize>>>()
            })
            .transpose()?;
        let named = self.maps(space, &t.maps, "system.maps")?;
        let maps = t
            .labels
            .iter()
            .map(|l| {
                named
                    .iter()
                    .find(|(n, _)| n == l)
                    .map(|(_, m)| m.clone())
                    .ok_or_else(|| self.located("system.maps", format!("no map for label {l:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((table, stars, maps))
    }

    /// Builds and validates the germ system.
    pub fn system(&self) -> Result<GermSystem> {
        let space = self.space()?;
        match &self.system {
            SystemDecl::A {
                symmetric,
                generators,
                cap,
                table,
            } => match (symmetric, generators, table) {
                (Some(n), None, None) => {
                    if space != Space::Finite(*n) {
                        return Err(self.located("system.symmetric", format!("I_{n} acts on a finite space of {n} points")));
                    }
                    GermSystem::from_monoid(self.at("system.symmetric", MapMonoid::symmetric(*n))?)
                }
                (None, Some(gens), None) => {
                    let gens = self.maps(&space, gens, "system.generators")?;
                    let monoid = MapMonoid::generate(&space, &gens, cap.unwrap_or(DEFAULT_MONOID_CAP))?;
                    GermSystem::from_monoid(monoid)
                }
                (None, None, Some(t)) => {
                    let (tab, stars, maps) = self.table_parts(&space, t)?;
                    let unit = t
                        .labels
                        .iter()
                        .position(|l| l == "1")
                        .ok_or_else(|| self.located("system.labels", "the unit label must be named 1"))?;
                    let sg = InverseSemigroup::new(t.labels.clone(), &tab, unit, stars.as_deref())?;
                    GermSystem::regime_a(&space, sg, maps)
                }
                _ => Err(self.located("system", "regime A needs exactly one of symmetric, generators, table")),
            },
            SystemDecl::B { generators, bound } => {
                let gens = self.maps(&space, generators, "system.generators")?;
                self.at("system", GermSystem::regime_b(&space, gens, *bound))
            }
            SystemDecl::C {
                labels,
                table,
                stars,
                maps,
                witnesses,
            } => {
                let table = &TableDecl {
                    labels: labels.clone(),
                    table: table.clone(),
                    stars: stars.clone(),
                    maps: maps.clone(),
                };
                let (tab, stars, maps) = self.table_parts(&space, table)?;
                let mut ws = Vec::new();
                for (i, w) in witnesses.iter().enumerate() {
                    let field = format!("system.witnesses[{i}]");
                    let pos = |n: &str| {
                        table
                            .labels
                            .iter()
                            .position(|l| l == n)
                            .ok_or_else(|| self.located(&field, format!("unknown label {n:?}")))
                    };
                    let set = self.at(&format!("{field}.set"), OpenSet::parse(&space, &w.set))?;
                    ws.push(((pos(&w.pair[0])?, pos(&w.pair[1])?), set));
                }
                self.at(
                    "system",
                    GermSystem::regime_c(&space, table.labels.clone(), tab, stars, maps, ws),
                )
            }
        }
    }

    /// Builds the system, then parses sections and points.
    pub fn load_all(&self) -> Result<Loaded> {
        let gs = self.system()?;
        let sections = self
            .sections
            .iter()
            .enumerate()
            .map(|(i, d)| Ok((d.name.clone(), self.at(&format!("sections[{i}].expr"), parse_section(&gs, &d.expr))?)))
            .collect::<Result<Vec<_>>>()?;
        let points = self
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| self.at(&format!("points[{i}]"), gs.space().parse_point(p)))
            .collect::<Result<Vec<_>>>()?;
        for [a, b] in self.analysis.products.iter().chain(&self.analysis.ess_pairs) {
            for n in [a, b] {
                if !self.sections.iter().any(|d| d.name == *n) {
                    return Err(self.located("analysis", format!("unknown section {n:?}")));
                }
            }
        }
        Ok(Loaded {
            scenario: self.clone(),
            gs,
            sections,
            points,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DBL: &str = r#"{
      "name": "dbl",
      "space": {"cantor": "01"},
      "system": {
        "regime": "C",
        "labels": ["1", "g"],
        "table": [["1", "g"], ["g", "1"]],
        "maps": [{"name": "1", "rules": ["id"]}, {"name": "g", "rules": ["id"]}],
        "witnesses": [{"pair": ["g", "1"], "set": "0*1"}]
      },
      "sections": [{"name": "f", "expr": "(g, X) - (1, X)"}],
      "points": ["(0)"]
    }"#;

    #[test]
    fn loads_and_round_trips() {
        let sc = Scenario::from_json(DBL, "inline").unwrap();
        let loaded = sc.load_all().unwrap();
        assert_eq!(loaded.sections.len(), 1);
        let canon = sc.to_canonical_json();
        let again = Scenario::from_json(&canon, "canon").unwrap();
        assert_eq!(again, sc);
        assert_eq!(again.to_canonical_json(), canon);
    }

    #[test]
    fn diagnostics_are_located() {
        let bad = DBL.replace("\"witnesses\"", "\"witnesss\"");
        let e = Scenario::from_json(&bad, "inline").unwrap_err();
        assert!(e.to_string().contains("line"), "{e}");
        let bad = DBL.replace("0*1\"}", "0*(1\"}");
        let e = Scenario::from_json(&bad, "inline").unwrap().system().unwrap_err();
        assert!(e.to_string().contains("system.witnesses[0].set"), "{e}");
        let bad = DBL.replace(r#"{"name": "g", "rules": ["id"]}"#, r#"{"name": "g", "rules": ["0 -> 1", "1 -> 0"]}"#);
        let e = Scenario::from_json(&bad, "inline").unwrap().system().unwrap_err();
        assert!(e.to_string().contains("agreement axiom"), "{e}");
        assert_eq!(e.exit_code(), 1);
    }
}
