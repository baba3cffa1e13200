//! Numerical identities relating components, repelling points, classical
//! fixed points and weights.

use std::collections::{HashMap, HashSet, VecDeque};

use num_traits::{One, Zero};

use super::{Component, ComponentKind, FixLocus, NodeKind, Piece, PointClass};
use crate::berkmap::{IndifferenceClass, TypeIIPoint};
use crate::error::{Error, Result};
use crate::exactfield::FieldElement;
use crate::residue::FqElement;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountCheck {
    pub count: i64,
    pub expected: i64,
}

impl CountCheck {
    pub fn holds(&self) -> bool {
        self.count == self.expected
    }
}

/// Classical multiplicity inside `c` against `2 + α(c)`.
pub fn repelling_count_check(locus: &FixLocus, c: &Component) -> Result<CountCheck> {
    if c.kind == ComponentKind::Classical {
        return Err(Error::ClassicalComponent);
    }
    Ok(CountCheck { count: c.classical_count(&locus.classical) as i64, expected: 2 + c.alpha })
}

/// Whether every non-classical component satisfies the count.
pub fn repelling_counts_hold(locus: &FixLocus) -> bool {
    locus
        .components
        .iter()
        .filter(|c| c.kind != ComponentKind::Classical)
        .all(|c| repelling_count_check(locus, c).is_ok_and(|r| r.holds()))
}

#[derive(Clone, Debug)]
pub struct CrucialPoint {
    pub point: TypeIIPoint,
    pub weight: usize,
    pub fixed: bool,
}

#[derive(Clone, Debug)]
pub struct Weights {
    pub points: Vec<CrucialPoint>,
    pub total: usize,
    /// Fixed segments with nonzero weight; always empty for a sound run.
    pub anomalies: Vec<String>,
}

/// Weights at fixed type II points and at non-fixed branch points.
pub fn crucial_weights(locus: &FixLocus) -> Weights {
    let ctx = locus.ctx();
    let mut points = Vec::new();
    for (piece, d) in locus.analyzed_points() {
        let w = if d.is_fixed {
            d.local_degree - 1 + d.n_shear.unwrap_or(0)
        } else if matches!(piece, Piece::Node(_)) {
            let v: usize = super::classical_directions(ctx, &d.point, &locus.classical).iter().map(|v| v.orbit_size()).sum();
            v.saturating_sub(2)
        } else {
            0
        };
        if w > 0 {
            points.push(CrucialPoint { point: d.point.clone(), weight: w, fixed: d.is_fixed });
        }
    }
    let mut anomalies = Vec::new();
    for ra in &locus.skeleton.rays {
        for s in ra.segments.iter().filter(|s| s.is_fixed()) {
            if s.sample.local_degree != 1 || s.sample.n_shear.unwrap_or(0) != 0 {
                anomalies.push(format!("fixed segment at {} carries weight", s.sample.point));
            }
        }
    }
    let total = points.iter().map(|p| p.weight).sum();
    Weights { points, total, anomalies }
}

/// Total weight equals `d − 1`.
pub fn verify_weight_formula(locus: &FixLocus) -> bool {
    let w = crucial_weights(locus);
    w.anomalies.is_empty() && w.total + 1 == locus.degree()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Connectedness {
    /// Σ (deg − 1 − N_cf) over type II fixed points.
    pub sum: i64,
    pub expected: i64,
    pub components: usize,
}

impl Connectedness {
    pub fn predicted_connected(&self) -> bool {
        self.sum == self.expected
    }

    pub fn agrees(&self) -> bool {
        self.predicted_connected() == (self.components == 1)
    }
}

pub fn connectedness_check(locus: &FixLocus) -> Result<Connectedness> {
    let d = locus.degree();
    if d < 2 {
        return Err(Error::PreconditionViolated("degree at least 2 required".into()));
    }
    let sum = locus
        .analyzed_points()
        .iter()
        .filter(|(_, x)| x.is_fixed)
        .map(|(_, x)| x.local_degree as i64 - 1 - x.n_cf as i64)
        .sum();
    Ok(Connectedness { sum, expected: d as i64 - 1, components: locus.components.len() })
}

/// Pieces of `c` adjacent to each piece of `c`.
fn component_graph(locus: &FixLocus, c: &Component) -> HashMap<Piece, Vec<Piece>> {
    let members: HashSet<Piece> = c.pieces.iter().copied().collect();
    let mut g: HashMap<Piece, Vec<Piece>> = c.pieces.iter().map(|p| (*p, Vec::new())).collect();
    for (a, b) in locus.adjacency() {
        if members.contains(&a) && members.contains(&b) {
            g.get_mut(&a).unwrap().push(b);
            g.get_mut(&b).unwrap().push(a);
        }
    }
    g
}

fn path(g: &HashMap<Piece, Vec<Piece>>, from: Piece, to: Piece) -> Option<Vec<Piece>> {
    let mut prev: HashMap<Piece, Piece> = HashMap::new();
    let mut queue = VecDeque::from([from]);
    let mut seen = HashSet::from([from]);
    while let Some(p) = queue.pop_front() {
        if p == to {
            let mut out = vec![to];
            let mut cur = to;
            while let Some(q) = prev.get(&cur) {
                out.push(*q);
                cur = *q;
            }
            out.reverse();
            return Some(out);
        }
        for q in &g[&p] {
            if seen.insert(*q) {
                prev.insert(*q, p);
                queue.push_back(*q);
            }
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HyperbolicReport {
    /// Σ degrees ≡ n − 1 modulo `p`.
    pub degree_congruence: bool,
    /// The component is the hull of its repelling points.
    pub hull_of_repelling: bool,
    pub no_id_or_additive: bool,
}

impl HyperbolicReport {
    pub fn holds(&self) -> bool {
        self.degree_congruence && self.hull_of_repelling && self.no_id_or_additive
    }
}

pub fn hyperbolic_checks(locus: &FixLocus, c: &Component) -> Result<HyperbolicReport> {
    if !c.is_hyperbolic() {
        return Err(Error::NotHyperbolic);
    }
    let p = locus.ctx().p as i64;
    let n = c.repelling.len() as i64;
    let deg_sum: i64 = c.repelling.iter().map(|r| r.degree as i64).sum();
    let degree_congruence = (deg_sum - (n - 1)).rem_euclid(p) == 0;
    let g = component_graph(locus, c);
    let is_rep = |p: &Piece| {
        !matches!(p, Piece::Segment { .. })
            && locus.piece_data(*p).is_some_and(|d| d.class == IndifferenceClass::Repelling)
    };
    let hull_of_repelling = !c.repelling.is_empty() && g.iter().all(|(p, nb)| nb.len() >= 2 || is_rep(p));
    let no_id_or_additive = c.pieces.iter().all(|p| {
        locus
            .piece_data(*p)
            .is_none_or(|d| !matches!(d.class, IndifferenceClass::IdIndifferent | IndifferenceClass::Additive))
    });
    Ok(HyperbolicReport { degree_congruence, hull_of_repelling, no_id_or_additive })
}

/// No hyperbolic component and at most `d + 1` components; requires `p > d`.
pub fn good_residue_check(locus: &FixLocus) -> Result<bool> {
    let d = locus.degree() as u64;
    if locus.ctx().p <= d {
        return Err(Error::PreconditionViolated(format!("needs p > d, got p = {}, d = {d}", locus.ctx().p)));
    }
    Ok(!locus.components.iter().any(|c| c.is_hyperbolic()) && locus.components.len() as u64 <= d + 1)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndifferentReport {
    pub two_points: bool,
    /// Multiplier relation and the shape of the arc between the points.
    pub multipliers: bool,
    pub arc_shape: bool,
    pub has_type_ii: bool,
}

impl IndifferentReport {
    pub fn holds(&self) -> bool {
        self.two_points && self.multipliers && self.arc_shape && self.has_type_ii
    }
}

fn classical_node(locus: &FixLocus, ci: usize) -> Piece {
    let i = (0..locus.skeleton.tree.nodes.len()).find(|&i| locus.node_classical(i) == Some(ci)).unwrap();
    Piece::Node(i)
}

pub fn indifferent_checks(locus: &FixLocus, c: &Component) -> Result<IndifferentReport> {
    if c.kind != ComponentKind::Indifferent {
        return Err(Error::NotIndifferent);
    }
    let two_points = c.classical_count(&locus.classical) == 2;
    let class_of = |p: &Piece| locus.piece_data(*p).map(|d| d.class);
    let mut multipliers = true;
    let arc_shape;
    if c.classical.len() == 2 {
        let (x, y) = (c.classical[0], c.classical[1]);
        let lx = locus.classical[x].multiplier_residue.clone();
        let ly = locus.classical[y].multiplier_residue.clone();
        let one = FqElement::from_int(&locus.ctx().residue, 1);
        multipliers = matches!((&lx, &ly), (Some(a), Some(b)) if a.clone() * b.clone() == one);
        let (px, py) = (classical_node(locus, x), classical_node(locus, y));
        if lx.as_ref() == Some(&one) {
            let g = component_graph(locus, c);
            arc_shape = match path(&g, px, py) {
                Some(route) => route[1..route.len() - 1]
                    .iter()
                    .filter(|p| !is_leaf_site(locus, p))
                    .all(|p| class_of(p) == Some(IndifferenceClass::IdIndifferent)),
                None => false,
            };
        } else {
            arc_shape = c
                .pieces
                .iter()
                .filter(|p| **p != px && **p != py)
                .all(|p| class_of(p) == Some(IndifferenceClass::Multiplicative));
        }
    } else if c.classical.len() == 1 {
        let px = classical_node(locus, c.classical[0]);
        arc_shape = c.pieces.iter().filter(|p| **p != px).all(|p| {
            matches!(class_of(p), Some(IndifferenceClass::IdIndifferent | IndifferenceClass::Additive))
        });
    } else {
        arc_shape = false;
    }
    let has_type_ii = c.pieces.iter().any(|p| locus.piece_data(*p).is_some_and(|d| d.is_fixed));
    Ok(IndifferentReport { two_points, multipliers, arc_shape, has_type_ii })
}

fn is_leaf_site(locus: &FixLocus, p: &Piece) -> bool {
    matches!(p, Piece::Node(i) if !matches!(locus.skeleton.tree.nodes[*i], NodeKind::Vertex(_)))
}

/// A fixed point whose full preimage is itself: `∞` for polynomials, or an
/// exact `x` with `N − x·D = c·(z − x)^d`.
pub fn totally_ramified_fixed_point(locus: &FixLocus) -> Option<super::Location> {
    let f = &locus.map;
    let d = f.degree();
    for c in &locus.classical {
        match &c.location {
            super::Location::Infinity => {
                if f.den().deg0() == 0 {
                    return Some(c.location.clone());
                }
            }
            super::Location::Finite(r) if r.is_exact() => {
                let q = (f.num() - &f.den().scale(&r.approx)).compose_affine(&FieldElement::one(), &r.approx);
                if q.deg0() == d && q.coeffs()[..d].iter().all(|a| a.is_zero()) {
                    return Some(c.location.clone());
                }
            }
            _ => {}
        }
    }
    None
}

/// A map with a totally ramified fixed point has no indifferent component.
pub fn totally_ramified_check(locus: &FixLocus) -> Result<bool> {
    if locus.degree() < 2 {
        return Err(Error::PreconditionViolated("degree at least 2 required".into()));
    }
    if totally_ramified_fixed_point(locus).is_none() {
        return Err(Error::NoTotallyRamifiedFixedPoint);
    }
    Ok(!locus.components.iter().any(|c| c.kind == ComponentKind::Indifferent))
}

/// `Σ α` over non-classical components against `d + 1 − c − 2n`.
pub fn alpha_sum_check(locus: &FixLocus) -> CountCheck {
    let nonclassical: Vec<&Component> =
        locus.components.iter().filter(|c| c.kind != ComponentKind::Classical).collect();
    let c: usize = locus
        .classical
        .iter()
        .filter(|x| x.class != PointClass::Indifferent)
        .map(|x| x.multiplicity)
        .sum();
    CountCheck {
        count: nonclassical.iter().map(|x| x.alpha).sum(),
        expected: locus.degree() as i64 + 1 - c as i64 - 2 * nonclassical.len() as i64,
    }
}

/// Global bounds on the number of components of each kind.
pub fn component_bounds(locus: &FixLocus) -> Vec<(&'static str, bool)> {
    let d = locus.degree();
    let count = |k: ComponentKind| locus.components.iter().filter(|c| c.kind == k).count();
    let total: usize = locus.components.iter().map(|c| c.classical_count(&locus.classical)).sum();
    let mut out = vec![
        ("classical multiplicity is d + 1", total == d + 1),
        ("at most 2d components", locus.components.len() <= 2 * d),
        ("at most (d + 1)/2 indifferent components", 2 * count(ComponentKind::Indifferent) <= d + 1),
        (
            "classical components are the attracting and repelling points",
            count(ComponentKind::Classical)
                == locus.classical.iter().filter(|x| x.class != PointClass::Indifferent).count(),
        ),
    ];
    if d >= 2 {
        out.push((
            "at most d − 1 non-classical components",
            locus.components.len() - count(ComponentKind::Classical) < d,
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::{explore, ExploreConfig};
    use super::*;
    use crate::berkmap::RationalMapK;
    use crate::exactfield::PrimeContext;

    fn run(p: u64, num: &[i64], den: &[i64]) -> FixLocus {
        let ctx = PrimeContext::split(p);
        let f = RationalMapK::from_ints(&ctx, num, den).unwrap();
        explore(&f, &ExploreConfig::default()).unwrap()
    }

    fn all_good(l: &FixLocus) {
        assert!(repelling_counts_hold(l));
        assert!(verify_weight_formula(l), "{:?}", crucial_weights(l));
        assert!(alpha_sum_check(l).holds());
        for (name, ok) in component_bounds(l) {
            assert!(ok, "{name}");
        }
    }

    #[test]
    fn power_map() {
        let l = run(5, &[0, 0, 0, 0, 0, 1], &[1]);
        all_good(&l);
        let w = crucial_weights(&l);
        assert_eq!(w.points.len(), 1);
        assert_eq!(w.points[0].weight, 4);
        let h = l.components.iter().find(|c| c.is_hyperbolic()).unwrap();
        assert!(hyperbolic_checks(&l, h).unwrap().holds());
        assert_eq!(repelling_count_check(&l, h).unwrap(), CountCheck { count: 0, expected: 0 });
        assert_eq!(alpha_sum_check(&l), CountCheck { count: -2, expected: -2 });
        assert!(totally_ramified_check(&l).unwrap());
        assert!(matches!(good_residue_check(&l), Err(Error::PreconditionViolated(_))));
        let c = l.components.iter().find(|c| c.kind == ComponentKind::Classical).unwrap();
        assert_eq!(repelling_count_check(&l, c), Err(Error::ClassicalComponent));
        assert_eq!(hyperbolic_checks(&l, c), Err(Error::NotHyperbolic));
    }

    #[test]
    fn squaring() {
        let l = run(3, &[0, 0, 1], &[1]);
        all_good(&l);
        let c = connectedness_check(&l).unwrap();
        assert_eq!((c.sum, c.expected, c.components), (-1, 1, 3));
        assert!(c.agrees());
        assert!(good_residue_check(&l).unwrap());
        assert_eq!(alpha_sum_check(&l), CountCheck { count: -1, expected: -1 });
    }

    #[test]
    fn segment_map_checks() {
        let ctx = PrimeContext::split(3);
        let f = crate::berkmap::tests::segment_map(&ctx);
        let l = explore(&f, &ExploreConfig::default()).unwrap();
        all_good(&l);
        let h = l.components.iter().find(|c| c.is_hyperbolic()).unwrap();
        assert!(hyperbolic_checks(&l, h).unwrap().holds());
        assert!(connectedness_check(&l).unwrap().agrees());
    }

    #[test]
    fn degree_one() {
        for (p, num) in [(3, vec![1, 1]), (5, vec![0, 2]), (5, vec![0, 6]), (7, vec![3, 2])] {
            let l = run(p, &num, &[1]);
            all_good(&l);
            assert_eq!(crucial_weights(&l).total, 0);
            let c = &l.components[0];
            assert!(indifferent_checks(&l, c).unwrap().holds(), "{num:?}");
            assert!(connectedness_check(&l).is_err());
            assert!(totally_ramified_check(&l).is_err());
        }
    }

    #[test]
    fn rational_map_with_indifferent_pair() {
        // z(z + 2)/(2z + 1) over Q_5: fixed points 0, 1, ∞
        let l = run(5, &[0, 2, 1], &[1, 2]);
        all_good(&l);
        assert!(connectedness_check(&l).unwrap().agrees());
        for c in &l.components {
            if c.kind == ComponentKind::Indifferent {
                assert!(indifferent_checks(&l, c).unwrap().holds());
            }
        }
    }
}
