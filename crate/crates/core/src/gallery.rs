//! Built-in scenarios and their frozen expected reports.

use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::random::random_regime_a;
use crate::report::{self, Options, Params, Report};
use crate::scenario::Scenario;

const BUILT_IN: &[(&str, &str)] = &[
    ("dbl", include_str!("../gallery/dbl.json")),
    ("cuntz2", include_str!("../gallery/cuntz2.json")),
    ("z2_point", include_str!("../gallery/z2_point.json")),
    ("i2", include_str!("../gallery/i2.json")),
    ("pair2", include_str!("../gallery/pair2.json")),
    ("pair3", include_str!("../gallery/pair3.json")),
    ("pair4", include_str!("../gallery/pair4.json")),
];

/// Seeds of the randomized regression scenarios `random-<seed>`.
pub const RANDOM_SEEDS: &[u64] = &[1, 2, 3];

/// Names of every gallery scenario, built-in ones first.
pub fn names() -> Vec<String> {
    BUILT_IN
        .iter()
        .map(|(n, _)| n.to_string())
        .chain(RANDOM_SEEDS.iter().map(|s| format!("random-{s}")))
        .collect()
}

/// Built-in scenario names whose space is finite.
pub fn finite_names() -> Vec<&'static str> {
    vec!["z2_point", "i2", "pair2", "pair3", "pair4"]
}

/// A built-in scenario, or `random-<seed>` for any seed.
pub fn scenario(name: &str) -> Result<Scenario> {
    if let Some((_, text)) = BUILT_IN.iter().find(|(n, _)| *n == name) {
        return Scenario::from_json(text, &format!("gallery/{name}.json"));
    }
    if let Some(seed) = name.strip_prefix("random-").and_then(|s| s.parse().ok()) {
        return Ok(random_regime_a(seed));
    }
    Err(Error::Scenario {
        path: name.to_string(),
        msg: format!("no gallery scenario of this name; known: {}", names().join(", ")),
    })
}

/// Directory of expected reports: `ETALE_LAB_FIXTURES` if set, otherwise
/// the crate's `fixtures` directory.
pub fn fixture_dir() -> PathBuf {
    std::env::var_os("ETALE_LAB_FIXTURES")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures")))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FixtureStatus {
    Match,
    Written,
    Missing,
    /// First differing line, 1-based, with both versions.
    Differs { line: usize, expected: String, actual: String },
}

pub struct GalleryRun {
    pub report: Report,
    pub fixture: FixtureStatus,
}

/// Runs every analysis of a gallery scenario with its own parameters and
/// compares the JSON report with the stored fixture, or overwrites the
/// fixture when `regenerate` is set.
pub fn run(name: &str, regenerate: bool) -> Result<GalleryRun> {
    let sc = scenario(name)?;
    let loaded = sc.load_all()?;
    let params = Params::resolve(&loaded, &Options::default());
    let report = Report {
        scenario: sc.name.clone(),
        command: "gallery".into(),
        results: report::full(&loaded, &params)?,
        params,
    };
    let json = report.to_json();
    let path = fixture_dir().join(format!("{name}.json"));
    let fixture = if regenerate {
        std::fs::create_dir_all(fixture_dir())?;
        std::fs::write(&path, &json)?;
        FixtureStatus::Written
    } else {
        match std::fs::read_to_string(&path) {
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => FixtureStatus::Missing,
            Err(e) => return Err(e.into()),
            Ok(expected) if expected == json => FixtureStatus::Match,
            Ok(expected) => {
                let mut exp = expected.lines();
                let mut act = json.lines();
                let mut line = 1;
                loop {
                    match (exp.next(), act.next()) {
                        (Some(a), Some(b)) if a == b => line += 1,
                        (a, b) => {
                            break FixtureStatus::Differs {
                                line,
                                expected: a.unwrap_or("<end of file>").to_string(),
                                actual: b.unwrap_or("<end of file>").to_string(),
                            }
                        }
                    }
                }
            }
        }
    };
    Ok(GalleryRun { report, fixture })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_gallery_scenario_loads() {
        for name in names() {
            let sc = scenario(&name).unwrap();
            sc.load_all().unwrap_or_else(|e| panic!("{name}: {e}"));
            let again = Scenario::from_json(&sc.to_canonical_json(), "canon").unwrap();
            assert_eq!(again.to_canonical_json(), sc.to_canonical_json());
        }
        assert!(scenario("nope").is_err());
    }
}
