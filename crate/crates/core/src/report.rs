//! Command reports: structured JSON values with a text rendering derived
//! from the same value.

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::freeness::{freeness_report, is_minimal, pure_infiniteness_witness, PureInfiniteness};
use crate::groupoid::{GermSystem, Regime};
use crate::orbit::{default_probe_points, lambda_matrix, operator_norm, point_orbit_matrix, reduced_norm_probe, Matrix};
use crate::scenario::Loaded;
use crate::section::{el_kernel_member, ess_equal, expectation_e, is_singular, normal_form, regular_cell, Section};
use crate::topology::{OpenSet, Space};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Command line overrides of scenario analysis parameters.
#[derive(Clone, Debug, Default)]
pub struct Options {
    pub bound: Option<usize>,
    pub depth: Option<usize>,
    pub len: Option<usize>,
    pub tol: Option<f64>,
}

/// Resolved analysis parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct Params {
    /// Composition bound for regime B label enumeration.
    pub bound: usize,
    /// Cylinder depth for minimality and the witness search.
    pub depth: usize,
    /// Label length for the witness search.
    pub len: usize,
    pub tol: f64,
    pub iter_cap: usize,
}

impl Params {
    pub fn resolve(loaded: &Loaded, opts: &Options) -> Params {
        let a = &loaded.scenario.analysis;
        Params {
            bound: opts.bound.or(a.bound).or(loaded.gs.default_bound()).unwrap_or(1).max(1),
            depth: opts.depth.or(a.depth).unwrap_or(2),
            len: opts.len.or(a.len).unwrap_or(2),
            tol: opts.tol.or(a.tol).unwrap_or(1e-9),
            iter_cap: a.iter_cap.unwrap_or(64),
        }
    }

    fn to_value(&self) -> Value {
        json!({
            "bound": self.bound,
            "depth": self.depth,
            "len": self.len,
            "tol": format!("{:e}", self.tol),
            "iter_cap": self.iter_cap,
        })
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub scenario: String,
    pub command: String,
    pub params: Params,
    pub results: Value,
}

impl Report {
    pub fn to_value(&self) -> Value {
        json!({
            "scenario": self.scenario,
            "command": self.command,
            "version": VERSION,
            "bounds": self.params.to_value(),
            "results": self.results,
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_value()).expect("report serialises");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        render(&self.to_value(), 0, &mut out);
        out
    }
}

fn scalar_text(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("none".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

/// Objects as aligned `key  value` lines, nested values indented, arrays
/// of scalars one item per line.
fn render(v: &Value, indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    match v {
        Value::Object(map) => {
            let width = map
                .iter()
                .filter(|(_, v)| scalar_text(v).is_some())
                .map(|(k, _)| k.chars().count())
                .max()
                .unwrap_or(0);
            for (k, val) in map {
                match scalar_text(val) {
                    Some(s) => out.push_str(&format!("{pad}{k:<width$}  {s}\n")),
                    None if is_empty(val) => out.push_str(&format!("{pad}{k}  (none)\n")),
                    None => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render(val, indent + 2, out);
                    }
                }
            }
        }
        Value::Array(items) => {
            for item in items {
                match scalar_text(item) {
                    Some(s) => out.push_str(&format!("{pad}{s}\n")),
                    None => {
                        out.push_str(&format!("{pad}-\n"));
                        render(item, indent + 2, out);
                    }
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar_text(other).unwrap_or_default())),
    }
}

fn is_empty(v: &Value) -> bool {
    match v {
        Value::Array(a) => a.is_empty(),
        Value::Object(o) => o.is_empty(),
        _ => false,
    }
}

fn space_text(space: &Space) -> String {
    match space {
        Space::Finite(n) => format!("finite, {n} points"),
        Space::Cantor(a) => format!("Cantor space over {{{}}}", a.letters().iter().collect::<String>()),
    }
}

fn matrix_rows(m: &Matrix) -> Value {
    Value::Array(m.to_string().lines().map(|l| Value::String(l.to_string())).collect())
}

fn norm_text(v: f64) -> String {
    format!("{v:.6}")
}

/// Label names, capped at 64 entries.
const LABEL_LIST_CAP: usize = 64;

pub fn validate(loaded: &Loaded, p: &Params) -> Value {
    let gs = &loaded.gs;
    let labels = gs.named_labels(p.bound);
    let names: Vec<Value> = labels.iter().take(LABEL_LIST_CAP).map(|(n, _)| json!(n)).collect();
    let mut m = Map::new();
    m.insert("status".into(), json!("valid"));
    m.insert("regime".into(), json!(gs.regime().to_string()));
    m.insert("space".into(), json!(space_text(gs.space())));
    if gs.is_exact() {
        m.insert("labels".into(), json!(labels.len()));
    } else {
        m.insert("generators".into(), json!(gs.generators().map(|g| g.len()).unwrap_or(0)));
        m.insert("labels_up_to_bound".into(), json!(labels.len()));
    }
    if labels.len() > LABEL_LIST_CAP {
        m.insert("label_names_shown".into(), json!(LABEL_LIST_CAP));
    }
    m.insert("label_names".into(), Value::Array(names));
    m.insert("sections".into(), json!(loaded.sections.len()));
    m.insert("points".into(), json!(loaded.points.len()));
    Value::Object(m)
}

pub fn freeness(loaded: &Loaded, p: &Params) -> Result<Value> {
    let gs = &loaded.gs;
    let space = gs.space();
    let fr = freeness_report(gs, p.bound);
    fr.check_implications().map_err(Error::Invariant)?;
    let dangerous = gs.dangerous_set(p.bound);
    let fix: Vec<Value> = fr
        .fix
        .iter()
        .filter(|f| !f.fix.is_empty())
        .map(|f| json!({"label": f.label, "fix": f.fix.to_string(), "underlined_fix": f.underline.to_string()}))
        .collect();
    let mut m = Map::new();
    m.insert("regime".into(), json!(gs.regime().to_string()));
    m.insert("space".into(), json!(space_text(space)));
    m.insert(
        "label_bound".into(),
        match fr.bound {
            Some(b) => json!(b),
            None => json!("exact"),
        },
    );
    if gs.regime() == Regime::A && space.is_finite() {
        m.insert("arrows".into(), json!(gs.enumerate_arrows()?.len()));
    }
    m.insert("hausdorff".into(), json!(fr.hausdorff));
    m.insert("dangerous_set".into(), json!(dangerous.to_string()));
    m.insert("dangerous_set_meagre".into(), json!(dangerous.is_meagre()));
    m.insert("effective".into(), json!(fr.effective.to_string()));
    m.insert("topologically_free".into(), json!(fr.topologically_free.to_string()));
    m.insert("as_topologically_free".into(), json!(fr.as_topologically_free.to_string()));
    m.insert("topologically_principal".into(), json!(fr.topologically_principal.to_string()));
    m.insert("implications".into(), json!("hold"));
    m.insert("labels_with_fixed_points".into(), Value::Array(fix));
    m.insert("minimal".into(), json!(is_minimal(gs, p.depth, p.iter_cap)?.to_string()));
    let region = match &loaded.scenario.analysis.witness_region {
        Some(text) => OpenSet::parse(space, text)?,
        None => OpenSet::full(space),
    };
    m.insert("pure_infiniteness".into(), pure_infiniteness_value(gs, &region, p)?);
    Ok(Value::Object(m))
}

fn pure_infiniteness_value(gs: &GermSystem, region: &OpenSet, p: &Params) -> Result<Value> {
    let w = pure_infiniteness_witness(gs, region, p.depth, p.len)?;
    Ok(match w {
        PureInfiniteness::Witness {
            v,
            labels,
            sources,
            ranges,
            disjoint_ranges,
            sources_cover,
            strict_shrinking,
        } => json!({
            "region": region.to_string(),
            "result": "witness",
            "v": v.to_string(),
            "labels": labels,
            "sources": sources.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
            "ranges": ranges.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
            "ranges_pairwise_disjoint": disjoint_ranges,
            "sources_cover_v": sources_cover,
            "closure_of_ranges_strictly_inside_v": strict_shrinking,
        }),
        PureInfiniteness::NotFoundUpTo { depth, len } => json!({
            "region": region.to_string(),
            "result": format!("not found up to depth {depth}, length {len}"),
        }),
    })
}

fn normal_form_value(gs: &GermSystem, f: &Section) -> Value {
    Value::Array(
        normal_form(gs, f)
            .cells
            .iter()
            .map(|c| json!({"label": gs.name(&c.label), "cell": c.set.to_string(), "coeff": c.coeff.to_string()}))
            .collect(),
    )
}

pub fn eval(loaded: &Loaded, _p: &Params) -> Result<Value> {
    let gs = &loaded.gs;
    let mut sections = Vec::new();
    for (name, f) in &loaded.sections {
        let e = expectation_e(gs, f);
        sections.push(json!({
            "name": name,
            "section": f.display(gs).to_string(),
            "is_zero": normal_form(gs, f).is_zero(),
            "normal_form": normal_form_value(gs, f),
            "expectation": e.pieces().iter().map(|(s, v)| json!({"on": s.to_string(), "value": v.to_string()})).collect::<Vec<_>>(),
        }));
    }
    let mut products = Vec::new();
    for [a, b] in &loaded.scenario.analysis.products {
        let fg = loaded.section(a)?.mul(gs, loaded.section(b)?);
        products.push(json!({
            "left": a,
            "right": b,
            "product": fg.display(gs).to_string(),
            "normal_form": normal_form_value(gs, &fg),
        }));
    }
    Ok(json!({"sections": sections, "products": products}))
}

pub fn singular(loaded: &Loaded, _p: &Params) -> Result<Value> {
    let gs = &loaded.gs;
    let mut sections = Vec::new();
    for (name, f) in &loaded.sections {
        let route_j = is_singular(gs, f);
        let route_el = el_kernel_member(gs, f);
        if route_j != route_el {
            return Err(Error::Invariant(format!(
                "section {name}: support test says singular={route_j}, expectation test says {route_el}"
            )));
        }
        let mut m = Map::new();
        m.insert("name".into(), json!(name));
        m.insert("is_zero".into(), json!(normal_form(gs, f).is_zero()));
        m.insert("is_singular".into(), json!(route_j));
        m.insert("el_kernel_member".into(), json!(route_el));
        if let Some(c) = regular_cell(gs, f) {
            m.insert(
                "open_support_witness".into(),
                json!(format!("{} on {} has interior", gs.name(&c.label), c.set)),
            );
        }
        sections.push(Value::Object(m));
    }
    let mut pairs = Vec::new();
    for [a, b] in &loaded.scenario.analysis.ess_pairs {
        pairs.push(json!({
            "left": a,
            "right": b,
            "ess_equal": ess_equal(gs, loaded.section(a)?, loaded.section(b)?),
        }));
    }
    Ok(json!({"sections": sections, "essential_equality": pairs}))
}

pub fn orbit(loaded: &Loaded, p: &Params) -> Result<Value> {
    let gs = &loaded.gs;
    let space = gs.space();
    let mut out = Vec::new();
    for (name, f) in &loaded.sections {
        let points = if loaded.points.is_empty() {
            default_probe_points(gs, f)
        } else {
            loaded.points.clone()
        };
        let mut per_point = Vec::new();
        for x in &points {
            let lm = lambda_matrix(gs, f, x, p.bound)?;
            let pm = point_orbit_matrix(gs, f, x, p.bound)?;
            let mut m = Map::new();
            m.insert("point".into(), json!(x.display(space).to_string()));
            m.insert(
                "basis".into(),
                Value::Array(lm.basis.arrows.iter().map(|a| json!(gs.describe_arrow(a))).collect()),
            );
            if let Some(b) = lm.basis.truncated {
                m.insert("truncated_at".into(), json!(b));
            }
            m.insert("lambda".into(), matrix_rows(&lm.matrix));
            m.insert("norm".into(), json!(norm_text(operator_norm(&lm.matrix, p.tol)?)));
            m.insert(
                "orbit_points".into(),
                Value::Array(pm.points.iter().map(|y| json!(y.display(space).to_string())).collect()),
            );
            m.insert("point_orbit".into(), matrix_rows(&pm.matrix));
            per_point.push(Value::Object(m));
        }
        let probe = reduced_norm_probe(gs, f, &points, p.bound, p.tol)?;
        out.push(json!({
            "name": name,
            "points": per_point,
            "reduced_norm_probe": norm_text(probe.value),
            "status": if probe.exact { "exact" } else { "lower_bound" },
        }));
    }
    Ok(Value::Array(out))
}

/// Every analysis of a scenario, as run by the gallery.
pub fn full(loaded: &Loaded, p: &Params) -> Result<Value> {
    Ok(json!({
        "validate": validate(loaded, p),
        "report": freeness(loaded, p)?,
        "eval": eval(loaded, p)?,
        "singular": singular(loaded, p)?,
        "orbit": orbit(loaded, p)?,
    }))
}
