//! Structured reports. Every number that is not a count is an exact
//! rational rendered as a string.

use berklocus::fixlocus::checks::crucial_weights;
use berklocus::fixlocus::{ClassicalFixedPoint, Component, FixLocus, Piece};
use berklocus::residue::FqRationalMap;
use berklocus::{LocalData, RationalMapK, TypeIIPoint, Val};
use serde_json::{json, Value};

use crate::input::echo;
use crate::verify::Check;

pub const SCHEMA_VERSION: u32 = 1;

pub fn envelope(command: &str, body: Value) -> Value {
    let mut v = json!({ "schema_version": SCHEMA_VERSION, "command": command });
    if let (Value::Object(o), Value::Object(b)) = (&mut v, body) {
        o.extend(b);
    }
    v
}

fn val(v: &Val) -> String {
    match v {
        Val::Inf => "inf".into(),
        Val::Fin(x) => x.to_string(),
    }
}

pub fn map_json(f: &RationalMapK) -> Value {
    let ctx = f.ctx();
    let coeffs = |p: &berklocus::KPoly| (0..=p.deg0()).map(|i| p.coeff(i).to_string()).collect::<Vec<_>>();
    json!({
        "p": ctx.p.to_string(),
        "n": ctx.n,
        "k": ctx.k,
        "unram_min_poly": ctx.unram_min_poly.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "num": coeffs(f.num()),
        "den": coeffs(f.den()),
        "degree": f.degree(),
        "echo": echo(f),
    })
}

pub fn point_json(x: &TypeIIPoint) -> Value {
    json!({ "center": x.center.to_string(), "s": x.s.to_string() })
}

fn reduced(m: &FqRationalMap) -> String {
    m.render("w")
}

pub fn classical_json(c: &ClassicalFixedPoint) -> Value {
    let (loc, prec) = match c.location.finite() {
        Some(r) => (r.approx.to_string(), r.prec.as_ref().map(|m| m.to_string())),
        None => ("inf".to_string(), None),
    };
    json!({
        "location": loc,
        "precision": prec,
        "multiplicity": c.multiplicity,
        "multiplier_valuation": val(&c.multiplier_val),
        "multiplier_residue": c.multiplier_residue.as_ref().map(|r| r.to_string()),
        "class": c.class.name(),
    })
}

pub fn local_data_json(ld: &LocalData) -> Value {
    let dirs: Vec<Value> = ld
        .directions
        .iter()
        .map(|d| {
            json!({
                "direction": d.location.to_string(),
                "multiplicity": d.multiplicity,
                "multiplier": d.multiplier.to_string(),
                "critically_fixed": d.critically_fixed,
                "surplus": ld.surplus_at(&d.location),
            })
        })
        .collect();
    let surplus: Vec<Value> =
        ld.surplus.iter().map(|(v, e)| json!({ "direction": v.to_string(), "amount": e })).collect();
    json!({
        "point": point_json(&ld.point),
        "fixed": ld.is_fixed,
        "reduced_map": ld.reduced_map.as_ref().map(reduced),
        "class": ld.class.name(),
        "local_degree": ld.local_degree,
        "directions": dirs,
        "surplus": surplus,
        "total_surplus": ld.total_surplus(),
        "critically_fixed_directions": ld.n_cf,
        "shearing_directions": ld.n_shear,
    })
}

fn component_json(l: &FixLocus, i: usize, c: &Component) -> Value {
    let repelling: Vec<Value> = c
        .repelling
        .iter()
        .map(|r| json!({ "point": point_json(&r.point), "degree": r.degree, "critically_fixed": r.n_cf }))
        .collect();
    json!({
        "index": i,
        "kind": c.kind_name(),
        "classical": c.classical,
        "classical_multiplicity": c.classical_count(&l.classical),
        "repelling": repelling,
        "alpha": c.alpha,
        "arc_classes": c.arc_classes.iter().map(|k| k.name()).collect::<Vec<_>>(),
        "pieces": c.pieces.len(),
    })
}

pub fn weights_json(l: &FixLocus) -> Value {
    let w = crucial_weights(l);
    json!({
        "points": w.points.iter().map(|c| json!({ "point": point_json(&c.point), "weight": c.weight, "fixed": c.fixed })).collect::<Vec<_>>(),
        "total": w.total,
        "expected": l.degree() - 1,
        "anomalies": w.anomalies,
    })
}

pub fn checks_json(checks: &[Check]) -> Value {
    Value::Array(checks.iter().map(Check::json).collect())
}

pub fn locus_json(l: &FixLocus, checks: &[Check]) -> Value {
    json!({
        "working_field": { "n": l.ctx().n, "k": l.ctx().k },
        "precision": l.precision.to_string(),
        "classical": l.classical.iter().map(classical_json).collect::<Vec<_>>(),
        "components": l.components.iter().enumerate().map(|(i, c)| component_json(l, i, c)).collect::<Vec<_>>(),
        "crucial_points": weights_json(l),
        "checks": checks_json(checks),
        "diagnostics": [],
    })
}

// ---- text rendering

pub fn local_data_text(ld: &LocalData) -> String {
    let mut s = format!("point {}\n", ld.point);
    let map = ld.reduced_map.as_ref().map_or("constant".to_string(), reduced);
    s.push_str(&format!(
        "reduction {map}, {}, {}, degree {}\n",
        if ld.is_fixed { "fixed" } else { "not fixed" },
        ld.class.name(),
        ld.local_degree
    ));
    if !ld.directions.is_empty() {
        s.push_str("fixed directions:\n");
        for d in &ld.directions {
            s.push_str(&format!(
                "  {:<16} multiplicity {} multiplier {}{} surplus {}\n",
                d.location.to_string(),
                d.multiplicity,
                d.multiplier,
                if d.critically_fixed { " critical" } else { "" },
                ld.surplus_at(&d.location)
            ));
        }
    }
    if !ld.surplus.is_empty() {
        let v: Vec<String> = ld.surplus.iter().map(|(v, e)| format!("{v}: {e}")).collect();
        s.push_str(&format!("surplus {}\n", v.join(", ")));
    }
    s
}

pub fn weights_text(l: &FixLocus) -> String {
    let w = crucial_weights(l);
    let mut s = String::from("crucial points:\n");
    for c in &w.points {
        s.push_str(&format!("  {:<32} weight {}{}\n", c.point.to_string(), c.weight, if c.fixed { " fixed" } else { "" }));
    }
    s.push_str(&format!("total weight {} (degree {})\n", w.total, l.degree()));
    for a in &w.anomalies {
        s.push_str(&format!("anomaly: {a}\n"));
    }
    s
}

pub fn checks_text(checks: &[Check]) -> String {
    checks.iter().map(|c| format!("  [{}] {}: {}\n", c.status.name(), c.name, c.detail)).collect()
}

pub fn locus_text(l: &FixLocus, checks: &[Check]) -> String {
    let mut s = format!("working field n = {}, k = {}\nclassical fixed points:\n", l.ctx().n, l.ctx().k);
    for c in &l.classical {
        s.push_str(&format!(
            "  {:<28} multiplicity {} multiplier valuation {} {}\n",
            c.location.to_string(),
            c.multiplicity,
            val(&c.multiplier_val),
            c.class.name()
        ));
    }
    s.push_str("components:\n");
    for (i, c) in l.components.iter().enumerate() {
        let cls: Vec<String> = c.classical.iter().map(|&j| l.classical[j].location.to_string()).collect();
        s.push_str(&format!("  {i}: {} classical [{}] alpha {}", c.kind_name(), cls.join(", "), c.alpha));
        for r in &c.repelling {
            s.push_str(&format!(" repelling {} degree {}", r.point, r.degree));
        }
        s.push('\n');
    }
    s.push_str(&weights_text(l));
    s.push_str("checks:\n");
    s.push_str(&checks_text(checks));
    s
}

/// Label of a piece for diagrams.
pub fn piece_label(l: &FixLocus, p: Piece) -> String {
    match l.piece_data(p) {
        Some(d) => d.class.name().to_string(),
        None => "unanalysed".into(),
    }
}
