//! Acceptance run: one PASS/FAIL line per criterion, exact comparisons only.

use std::collections::BTreeSet;
use std::process::ExitCode;

use berklocus::berkmap::{identification_check, ray_analysis, RayLines, TypeIIPoint};
use berklocus::exactfield::{q, qf, FieldElement, Q};
use berklocus::fixlocus::checks::{
    alpha_sum_check, component_bounds, connectedness_check, crucial_weights, hyperbolic_checks, indifferent_checks,
    repelling_count_check, good_residue_check, verify_weight_formula,
};
use berklocus::fixlocus::{explore, ComponentKind, ExploreConfig, FixLocus, Location, NodeKind};
use berklocus::oracle::{
    brute_is_fixed, classify_moebius, fixtures, moebius_membership, random_affine, random_map, random_point,
    random_split_map, tube_radius, Fixture, MoebiusCase, TubeRadius,
};
use berklocus::residue::{holomorphic_index_check, DirectionPoint, FqContext, FqElement, FqPoly, FqRationalMap};
use berklocus::{Error, Poly, RationalMapK};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(failures: &[String], summary: String) -> Verdict {
    if failures.is_empty() {
        Verdict { pass: true, detail: summary }
    } else {
        let shown: Vec<_> = failures.iter().take(5).cloned().collect();
        Verdict { pass: false, detail: format!("{summary}; {} failure(s): {}", failures.len(), shown.join(" | ")) }
    }
}

struct Explored {
    name: String,
    fixture: Option<Fixture>,
    result: Result<FixLocus, Error>,
}

fn explored_fixtures(cfg: &ExploreConfig) -> Vec<Explored> {
    fixtures()
        .into_iter()
        .map(|fx| {
            let result = explore(&fx.map().unwrap(), cfg);
            Explored { name: fx.name.clone(), fixture: Some(fx), result }
        })
        .collect()
}

fn explored_random(cfg: &ExploreConfig, seed: u64, count: usize, pick: impl Fn(&mut ChaCha8Rng) -> (u64, usize)) -> Vec<Explored> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let (p, d) = pick(&mut rng);
            let f = random_split_map(&mut rng, p, d);
            Explored { name: format!("random#{i} p={p} [{f}]"), fixture: None, result: explore(&f, cfg) }
        })
        .collect()
}

fn completed(all: &[Explored]) -> impl Iterator<Item = (&str, &FixLocus)> {
    all.iter().filter_map(|e| e.result.as_ref().ok().map(|l| (e.name.as_str(), l)))
}

/// Identity map: every type II point is id-indifferent of degree 1 with no
/// shearing direction, so every weight vanishes; confirmed on a grid.
fn identity_weights_vanish(f: &RationalMapK) -> bool {
    let ctx = f.ctx();
    [q(0), q(1), qf(1, 5), q(25)].iter().all(|a| {
        let lines = RayLines::exact(f, &FieldElement::rational(a.clone()));
        (-6..=6).all(|k| {
            let ld = lines.local_data(ctx, &qf(k, 2)).unwrap();
            ld.is_fixed && ld.is_identity() && ld.local_degree == 1
        })
    })
}

fn criterion_1(fx: &[Explored], random: &[Explored]) -> Verdict {
    let mut fails = Vec::new();
    let mut skipped = Vec::new();
    let mut checked = 0;
    for e in fx.iter().chain(random) {
        let expected = e.fixture.as_ref().map(|f| &f.expected);
        match (&e.result, expected) {
            (Err(Error::IdentityMap), Some(x)) if x.identity => {
                checked += 1;
                if !identity_weights_vanish(&e.fixture.as_ref().unwrap().map().unwrap()) {
                    fails.push(format!("{}: identity weights", e.name));
                }
            }
            (Err(Error::NeedsExtension { n, k }), Some(x)) if x.needs_extension => {
                skipped.push(format!("{} (needs n={n}, k={k})", e.name));
            }
            (Err(err), _) => fails.push(format!("{}: {err}", e.name)),
            (Ok(l), _) => {
                checked += 1;
                let w = crucial_weights(l);
                let want = expected.map_or(l.degree() - 1, |x| x.weight_total);
                if !verify_weight_formula(l) || w.total != want {
                    fails.push(format!("{}: total {} for d = {}", e.name, w.total, l.degree()));
                }
                if let Some(x) = expected {
                    for m in x.mismatches(l) {
                        fails.push(format!("{}: {m}", e.name));
                    }
                }
            }
        }
    }
    let n_random = random.iter().filter(|e| e.result.is_ok()).count();
    if n_random < 200 {
        fails.push(format!("only {n_random} random maps completed"));
    }
    verdict(
        &fails,
        format!(
            "weight total d-1 on {checked} maps ({n_random} random), fixture layouts as expected; outside the radical tower: {}",
            if skipped.is_empty() { "none".into() } else { skipped.join(", ") }
        ),
    )
}

fn criterion_2(fx: &[Explored], random: &[Explored]) -> Verdict {
    let mut fails = Vec::new();
    let mut n = 0;
    for (name, l) in completed(fx).chain(completed(random)) {
        for c in l.components.iter().filter(|c| c.kind != ComponentKind::Classical) {
            n += 1;
            let r = repelling_count_check(l, c).unwrap();
            if !r.holds() {
                fails.push(format!("{name}: count {} vs {}", r.count, r.expected));
            }
            if c.kind == ComponentKind::Indifferent && r.count != 2 {
                fails.push(format!("{name}: indifferent component with {} points", r.count));
            }
            if c.is_hyperbolic() && r.count != 0 {
                fails.push(format!("{name}: hyperbolic component with {} points", r.count));
            }
        }
        if !alpha_sum_check(l).holds() {
            fails.push(format!("{name}: alpha sum"));
        }
    }
    for e in fx {
        let hyper = e.fixture.as_ref().and_then(|f| f.expected.components.as_ref()).is_some_and(|cs| {
            cs.iter().any(|(kind, n)| *kind == "hyperbolic" && *n > 0)
        });
        if hyper {
            match &e.result {
                Ok(l) if l.components.iter().any(|c| c.is_hyperbolic()) => {}
                _ => fails.push(format!("{}: no hyperbolic component", e.name)),
            }
        }
    }
    verdict(&fails, format!("{n} non-classical components"))
}

/// Largest `s` with `ζ(a, s)` fixed along the ray from `a`.
fn last_fixed_s(f: &RationalMapK, a: &FieldElement) -> Option<Q> {
    let ra = ray_analysis(f, a, None, None).unwrap();
    let mut best = None;
    for (i, seg) in ra.segments.iter().enumerate() {
        if seg.is_fixed() {
            best = seg.hi.clone();
        } else if i > 0 && ra.breakpoints[i - 1].data.is_fixed {
            best = Some(ra.breakpoints[i - 1].s.clone());
        }
    }
    best
}

fn moebius_certificate_ok(f: &RationalMapK, cfg: &ExploreConfig) -> Result<(), String> {
    let desc = classify_moebius(f).map_err(|e| e.to_string())?;
    let res = explore(f, cfg);
    let l = match (desc.case, res) {
        (MoebiusCase::Identity, Err(Error::IdentityMap)) => return Ok(()),
        (_, Ok(l)) => l,
        (c, r) => return Err(format!("{c:?}: {:?}", r.err())),
    };
    let kinds: Vec<ComponentKind> = l.components.iter().map(|c| c.kind).collect();
    let classes: BTreeSet<String> = l
        .components
        .iter()
        .flat_map(|c| c.arc_classes.iter().map(|k| k.name().to_string()))
        .collect();
    let classes: Vec<&str> = classes.iter().map(|s| s.as_str()).collect();
    let inf_double = l.classical.len() == 1 && l.classical[0].location == Location::Infinity && l.classical[0].multiplicity == 2;
    let shift_and_inf = l.classical.len() == 2
        && l.classical.iter().any(|c| c.location == Location::Infinity)
        && l.classical.iter().any(|c| c.location.finite().is_some_and(|r| r.approx == desc.shift));
    let ok = match desc.case {
        MoebiusCase::Identity => false,
        MoebiusCase::Additive => {
            kinds == [ComponentKind::Indifferent]
                && inf_double
                && classes.iter().all(|c| *c == "id-indifferent" || *c == "additively-indifferent")
        }
        MoebiusCase::ScalingNonunit => kinds == [ComponentKind::Classical, ComponentKind::Classical] && shift_and_inf,
        MoebiusCase::ScalingUnitNontrivialResidue => {
            kinds == [ComponentKind::Indifferent] && shift_and_inf && classes == ["multiplicatively-indifferent"]
        }
        MoebiusCase::ScalingUnitTrivialResidue => {
            kinds == [ComponentKind::Indifferent] && shift_and_inf && classes == ["id-indifferent"]
        }
    };
    if ok {
        Ok(())
    } else {
        Err(format!("{:?}: kinds {kinds:?}, classes {classes:?}", desc.case))
    }
}

fn criterion_3(cfg: &ExploreConfig) -> Verdict {
    let mut fails = Vec::new();
    let mut maps: Vec<RationalMapK> = fixtures()
        .into_iter()
        .filter_map(|f| f.map().ok())
        .filter(|f| f.degree() == 1)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for i in 0..30 {
        maps.push(random_affine(&mut rng, [3, 5, 7][i % 3]));
    }
    let mut probes = 0usize;
    let mut min_per_map = usize::MAX;
    for f in &maps {
        let ctx = f.ctx();
        if let Err(e) = moebius_certificate_ok(f, cfg) {
            fails.push(format!("{f}: {e}"));
        }
        let desc = classify_moebius(f).unwrap();
        let p = ctx.p as i64;
        let centers: Vec<Q> = [q(0), q(1), q(-1), q(p), qf(1, p), qf(1, p * p), q(p * p), qf(2, p), q(1 + p), qf(3, 7 * p), q(2)]
            .into_iter()
            .chain(std::iter::once(desc.shift.as_rational().unwrap()))
            .collect();
        let mut count = 0;
        for a in &centers {
            let lines = RayLines::exact(f, &FieldElement::rational(a.clone()));
            for k in -24..=24 {
                let s = qf(k, 2 * ctx.n as i64);
                let x = TypeIIPoint::new(FieldElement::rational(a.clone()), s.clone());
                let engine = lines.local_data(ctx, &s).unwrap().is_fixed;
                if engine != moebius_membership(&desc, &x) {
                    fails.push(format!("{f} at {x}"));
                }
                count += 1;
            }
        }
        probes += count;
        min_per_map = min_per_map.min(count);
        match (desc.case, tube_radius(&desc)) {
            (MoebiusCase::ScalingUnitTrivialResidue, Ok(TubeRadius::Finite(r))) => {
                for j in 1..=3 {
                    let off = Q::from_integer(p.into()).pow(-j);
                    let a = desc.shift.as_rational().unwrap() + &off;
                    let last = last_fixed_s(f, &FieldElement::rational(a));
                    if last != Some(&r - q(j as i64)) {
                        fails.push(format!("{f}: tube radius {r} vs ray end {last:?} at offset valuation -{j}"));
                    }
                }
            }
            (MoebiusCase::Additive, Ok(TubeRadius::Unbounded)) => {
                // the fixed part of the ray from a center of valuation −j
                // reaches distance j from the axis: no bound
                let vs = desc.scale.val_in(ctx).fin().cloned().unwrap();
                for j in 1..=4 {
                    let a = Q::from_integer(p.into()).pow(-j) * desc.scale.as_rational().unwrap();
                    let last = last_fixed_s(f, &FieldElement::rational(a.clone()));
                    if last != Some(vs.clone()) {
                        fails.push(format!("{f}: additive ray end {last:?}"));
                    }
                }
            }
            (MoebiusCase::Additive | MoebiusCase::ScalingUnitTrivialResidue, r) => {
                fails.push(format!("{f}: tube radius {r:?}"))
            }
            _ => {}
        }
    }
    verdict(&fails, format!("{} maps, {probes} probes (at least {min_per_map} per map)", maps.len()))
}

fn criterion_4(fx: &[Explored], random: &[Explored]) -> Verdict {
    let mut fails = Vec::new();
    let mut n = 0;
    for (name, l) in completed(fx).chain(completed(random)) {
        for c in l.components.iter().filter(|c| c.kind == ComponentKind::Indifferent) {
            n += 1;
            let r = indifferent_checks(l, c).unwrap();
            if !r.holds() {
                fails.push(format!("{name}: {r:?}"));
            }
        }
    }
    verdict(&fails, format!("{n} indifferent components"))
}

fn criterion_5(fx: &[Explored], cfg: &ExploreConfig) -> Verdict {
    let mut fails = Vec::new();
    let mut n = 0;
    for (name, l) in completed(fx) {
        for c in l.components.iter().filter(|c| c.is_hyperbolic()) {
            n += 1;
            let r = hyperbolic_checks(l, c).unwrap();
            if !r.holds() {
                fails.push(format!("{name}: {r:?}"));
            }
        }
    }
    let suite = explored_random(cfg, 55, 200, |rng| (11, rng.gen_range(2..=10)));
    let mut done = 0;
    for e in &suite {
        match &e.result {
            Ok(l) => {
                done += 1;
                if !good_residue_check(l).unwrap() {
                    fails.push(format!("{}: hyperbolic component or too many components", e.name));
                }
            }
            Err(err) => fails.push(format!("{}: {err}", e.name)),
        }
    }
    verdict(&fails, format!("{n} hyperbolic fixture components; {done} maps over Q_11 without hyperbolic components"))
}

fn criterion_6(fx: &[Explored], random: &[Explored]) -> Verdict {
    let mut fails = Vec::new();
    let mut n = 0;
    for (name, l) in completed(fx).chain(completed(random)) {
        n += 1;
        for (what, ok) in component_bounds(l) {
            if !ok {
                fails.push(format!("{name}: {what}"));
            }
        }
        if l.degree() >= 2 {
            let c = connectedness_check(l).unwrap();
            if !c.agrees() {
                fails.push(format!("{name}: connectedness sum {} vs {} with {} components", c.sum, c.expected, c.components));
            }
        }
    }
    verdict(&fails, format!("{n} maps"))
}

fn directions_to_test(l: &FixLocus, x: &TypeIIPoint, ld: &berklocus::LocalData) -> Vec<DirectionPoint> {
    let mut v: Vec<DirectionPoint> = berklocus::fixlocus::classical_directions(l.ctx(), x, &l.classical);
    for d in ld.directions.iter().map(|d| d.location.clone()).chain(ld.surplus.iter().map(|s| s.0.clone())) {
        if !v.contains(&d) {
            v.push(d);
        }
    }
    v
}

fn random_fq_map(rng: &mut ChaCha8Rng, ctx: &std::sync::Arc<FqContext>) -> Option<FqRationalMap> {
    let (dn, dd) = (rng.gen_range(0..=4), rng.gen_range(0..=4));
    let mut poly = |deg: usize| -> FqPoly {
        Poly::new((0..=deg).map(|_| FqElement::from_int(ctx, rng.gen_range(0..7))).collect())
    };
    let num = poly(dn);
    let m = FqRationalMap::new(num, poly(dd)).ok()?;
    (!m.is_constant() && !m.is_identity()).then_some(m)
}

fn criterion_7(fx: &[Explored], random: &[Explored]) -> Verdict {
    let mut fails = Vec::new();
    let (mut ident, mut surplus) = (0, 0);
    for (name, l) in completed(fx).chain(completed(random)) {
        for (i, node) in l.skeleton.tree.nodes.iter().enumerate() {
            let NodeKind::Vertex(x) = node else { continue };
            let ld = l.skeleton.vertex_data[i].as_ref().unwrap();
            if !ld.is_fixed || ld.is_identity() {
                continue;
            }
            for v in directions_to_test(l, x, ld) {
                ident += 1;
                match identification_check(&l.map, x, &v) {
                    Ok(true) => {}
                    other => fails.push(format!("{name}: identification at {x} towards {v}: {other:?}")),
                }
            }
        }
        for (_, ld) in l.analyzed_points() {
            if ld.is_fixed {
                surplus += 1;
                if ld.total_surplus() + ld.local_degree != l.degree() {
                    fails.push(format!("{name}: surplus {} at {} of degree {}", ld.total_surplus(), ld.point, ld.local_degree));
                }
            }
        }
    }
    let fq = FqContext::prime(7);
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut index = 0;
    let mut tries = 0;
    while index < 200 && tries < 20_000 {
        tries += 1;
        let Some(m) = random_fq_map(&mut rng, &fq) else { continue };
        match holomorphic_index_check(&m) {
            Ok(true) => index += 1,
            Ok(false) => {
                index += 1;
                fails.push(format!("index formula fails for {}", m.render("z")));
            }
            Err(Error::MultiplierOne) => {}
            Err(e) => fails.push(format!("index check error {e}")),
        }
    }
    let mut pairs = 0;
    for _ in 0..2000 {
        let p = [3u64, 5, 7][rng.gen_range(0..3)];
        let f = random_map(&mut rng, p, 5);
        let x = random_point(&mut rng, p);
        pairs += 1;
        let a = brute_is_fixed(&f, &x).unwrap();
        let b = berklocus::berkmap::reduce_at(&f, &x).unwrap().is_fixed;
        if a != b {
            fails.push(format!("is_fixed disagrees for {f} at {x}"));
        }
    }
    if index < 200 {
        fails.push(format!("only {index} residue maps for the index formula"));
    }
    verdict(
        &fails,
        format!("{ident} identification checks, {surplus} surplus sums, {index} index checks, {pairs} is_fixed pairs"),
    )
}

fn main() -> ExitCode {
    let cfg = ExploreConfig::default();
    let fx = explored_fixtures(&cfg);
    let random = explored_random(&cfg, 2024, 210, |rng| {
        let p = [5u64, 7, 11][rng.gen_range(0..3)];
        (p, rng.gen_range(1..=(p as usize - 1).min(6)))
    });
    let mut results = vec![
        criterion_1(&fx, &random),
        criterion_2(&fx, &random),
        criterion_3(&cfg),
        criterion_4(&fx, &random),
        criterion_5(&fx, &cfg),
        criterion_6(&fx, &random),
        criterion_7(&fx, &random),
    ];
    let all = results.iter().all(|r| r.pass);
    results.push(Verdict {
        pass: all,
        detail: "property-based substitute: criteria 1 to 7 together".into(),
    });
    for (i, r) in results.iter().enumerate() {
        println!("criterion {}: {} ({})", i + 1, if r.pass { "PASS" } else { "FAIL" }, r.detail);
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
