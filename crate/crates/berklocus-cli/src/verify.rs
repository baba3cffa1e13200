//! Invariant checks over an explored locus, plus the closed-form comparison
//! for degree-one maps.

use berklocus::berkmap::{identification_check, reduce_at, RayLines};
use berklocus::exactfield::{q, qf, Q};
use berklocus::fixlocus::checks::{
    alpha_sum_check, component_bounds, connectedness_check, crucial_weights, good_residue_check, hyperbolic_checks,
    indifferent_checks, repelling_count_check, totally_ramified_check, verify_weight_formula,
};
use berklocus::fixlocus::{classical_directions, ComponentKind, FixLocus, NodeKind};
use berklocus::oracle::{brute_is_fixed, classify_moebius, moebius_membership, MoebiusCase};
use berklocus::residue::{holomorphic_index_check, DirectionPoint};
use berklocus::{Error, FieldElement, RationalMapK, TypeIIPoint};
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

impl Check {
    fn new(name: &str, ok: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), status: if ok { Status::Pass } else { Status::Fail }, detail: detail.into() }
    }

    fn skipped(name: &str, why: impl Into<String>) -> Self {
        Check { name: name.into(), status: Status::Skipped, detail: why.into() }
    }

    pub fn json(&self) -> Value {
        json!({ "name": self.name, "status": self.status.name(), "detail": self.detail })
    }
}

pub fn all_pass(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.status != Status::Fail)
}

/// Global and per-component checks reported by `analyze`.
pub fn locus_checks(l: &FixLocus) -> Vec<Check> {
    let mut out = Vec::new();
    let w = crucial_weights(l);
    out.push(Check::new(
        "weight-formula",
        verify_weight_formula(l),
        format!("total weight {} for degree {}", w.total, l.degree()),
    ));
    for (i, c) in l.components.iter().enumerate() {
        if c.kind == ComponentKind::Classical {
            continue;
        }
        if let Ok(r) = repelling_count_check(l, c) {
            out.push(Check::new(
                "classical-count",
                r.holds(),
                format!("component {i}: {} classical points, 2 + alpha = {}", r.count, r.expected),
            ));
        }
        if c.kind == ComponentKind::Indifferent {
            if let Ok(r) = indifferent_checks(l, c) {
                out.push(Check::new("indifferent-structure", r.holds(), format!("component {i}: {r:?}")));
            }
        }
        if c.is_hyperbolic() {
            if let Ok(r) = hyperbolic_checks(l, c) {
                out.push(Check::new("hyperbolic-structure", r.holds(), format!("component {i}: {r:?}")));
            }
        }
    }
    out.push(match good_residue_check(l) {
        Ok(ok) => Check::new("no-hyperbolic-when-p-exceeds-degree", ok, "p > d"),
        Err(Error::PreconditionViolated(m)) => Check::skipped("no-hyperbolic-when-p-exceeds-degree", format!("skipped (precondition): {m}")),
        Err(e) => Check::new("no-hyperbolic-when-p-exceeds-degree", false, e.to_string()),
    });
    let a = alpha_sum_check(l);
    out.push(Check::new("alpha-sum", a.holds(), format!("sum {} against {}", a.count, a.expected)));
    for (what, ok) in component_bounds(l) {
        out.push(Check::new("component-bounds", ok, what));
    }
    out.push(match connectedness_check(l) {
        Ok(c) => Check::new(
            "connectedness",
            c.agrees(),
            format!("sum {} against {}, {} component(s)", c.sum, c.expected, c.components),
        ),
        Err(e) => Check::skipped("connectedness", format!("skipped (precondition): {e}")),
    });
    out.push(match totally_ramified_check(l) {
        Ok(ok) => Check::new("totally-ramified-point", ok, "no indifferent component"),
        Err(e) => Check::skipped("totally-ramified-point", format!("skipped (precondition): {e}")),
    });
    out
}

/// Local checks at the analysed type II points of the locus.
pub fn local_checks(l: &FixLocus) -> Vec<Check> {
    let mut out = Vec::new();
    let (mut ident, mut ident_bad) = (0, Vec::new());
    for (i, node) in l.skeleton.tree.nodes.iter().enumerate() {
        let NodeKind::Vertex(x) = node else { continue };
        let Some(ld) = l.skeleton.vertex_data[i].as_ref() else { continue };
        if !ld.is_fixed || ld.is_identity() {
            continue;
        }
        let mut dirs: Vec<DirectionPoint> = classical_directions(l.ctx(), x, &l.classical);
        for d in ld.directions.iter().map(|d| d.location.clone()).chain(ld.surplus.iter().map(|s| s.0.clone())) {
            if !dirs.contains(&d) {
                dirs.push(d);
            }
        }
        for v in dirs {
            ident += 1;
            if !matches!(identification_check(&l.map, x, &v), Ok(true)) {
                ident_bad.push(format!("{x} towards {v}"));
            }
        }
    }
    out.push(Check::new(
        "identification",
        ident_bad.is_empty(),
        format!("{ident} direction(s) at fixed vertices{}", failures(&ident_bad)),
    ));
    let (mut sums, mut sum_bad, mut index, mut index_bad) = (0, Vec::new(), 0, Vec::new());
    for (_, ld) in l.analyzed_points() {
        if !ld.is_fixed {
            continue;
        }
        sums += 1;
        if ld.total_surplus() + ld.local_degree != l.degree() {
            sum_bad.push(ld.point.to_string());
        }
        if let Some(m) = &ld.reduced_map {
            match holomorphic_index_check(m) {
                Ok(true) => index += 1,
                Ok(false) => index_bad.push(ld.point.to_string()),
                Err(_) => {}
            }
        }
    }
    out.push(Check::new(
        "surplus-sum",
        sum_bad.is_empty(),
        format!("{sums} fixed point(s){}", failures(&sum_bad)),
    ));
    out.push(Check::new(
        "index-formula",
        index_bad.is_empty(),
        format!("{index} reduction(s) checked{}", failures(&index_bad)),
    ));
    out
}

fn failures(v: &[String]) -> String {
    if v.is_empty() {
        String::new()
    } else {
        format!("; failing at {}", v.join(", "))
    }
}

/// Closed-form comparison for a degree-one map on a fixed probe grid.
pub fn moebius_checks(f: &RationalMapK, locus: Option<&FixLocus>) -> Vec<Check> {
    let desc = match classify_moebius(f) {
        Ok(d) => d,
        Err(e) => return vec![Check::skipped("closed-form-comparison", format!("skipped (precondition): {e}"))],
    };
    let ctx = f.ctx();
    let p = ctx.p as i64;
    let mut centers: Vec<FieldElement> =
        [q(0), q(1), q(-1), q(p), qf(1, p), q(p * p), qf(1, p * p), q(1 + p)].into_iter().map(FieldElement::rational).collect();
    centers.push(desc.shift.clone());
    let (mut probes, mut bad) = (0, Vec::new());
    for a in &centers {
        let lines = RayLines::exact(f, a);
        for k in -8 * ctx.n as i64..=8 * ctx.n as i64 {
            let s: Q = qf(k, 2 * ctx.n as i64);
            let x = TypeIIPoint::new(a.clone(), s.clone());
            let want = moebius_membership(&desc, &x);
            let along = lines.local_data(ctx, &s).map(|d| d.is_fixed);
            let brute = brute_is_fixed(f, &x);
            probes += 1;
            if along != Ok(want) || brute.is_ok_and(|b| b != want) {
                bad.push(x.to_string());
            }
            if let Ok(ld) = reduce_at(f, &x) {
                if ld.is_fixed != want {
                    bad.push(x.to_string());
                }
            }
        }
    }
    let mut out = vec![Check::new(
        "closed-form-membership",
        bad.is_empty(),
        format!("{:?}: {probes} probes{}", desc.case, failures(&bad)),
    )];
    if let Some(l) = locus {
        let kinds: Vec<ComponentKind> = l.components.iter().map(|c| c.kind).collect();
        let ok = match desc.case {
            MoebiusCase::Identity => false,
            MoebiusCase::ScalingNonunit => kinds == [ComponentKind::Classical, ComponentKind::Classical],
            _ => kinds == [ComponentKind::Indifferent],
        };
        out.push(Check::new("closed-form-components", ok, format!("{:?} against {kinds:?}", desc.case)));
    }
    out
}
