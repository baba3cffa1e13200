//! The fixed-point locus: classical fixed points, the tree spanned by them,
//! its connected components and the numerical checks that tie them together.
//!
//! Exploration works on the hull `H` of the classical fixed points together
//! with the preimages of one fixed point `c`. A fixed type II point `x` off
//! `H` has no preimage of `c` and no classical fixed point outside the
//! direction `v` facing `H`, which forces its tangent map to have degree 1.
//! Hence every repelling fixed point lies on `H` and every component meets
//! `H` in a connected set, so the pieces of `H` certify the components.

pub mod checks;
pub mod classical;
pub mod hull;

use std::sync::Arc;

use num_integer::Integer;

use crate::berkmap::{ray_analysis_lines, reduce_at, IndifferenceClass, LocalData, RationalMapK, RayAnalysis, RayLines, TypeIIPoint};
use crate::error::{Error, Result};
use crate::exactfield::{PrimeContext, Q};
use crate::residue::DirectionPoint;
use crate::roots::{find_roots, radical};
use num_traits::Zero;

pub use classical::{classical_fixed_points, ClassicalFixedPoint, Location, PointClass};
pub use hull::{Edge, NodeKind, PrecisionShortfall, Site, SiteKind, Tree, TreePoint};

#[derive(Clone, Debug)]
pub struct ExploreConfig {
    /// Initial precision (as a valuation) for approximate roots.
    pub precision: Q,
    /// Number of precision doublings before giving up.
    pub precision_rounds: usize,
    pub n_max: usize,
    pub k_max: usize,
    /// Maximum number of breakpoints on a single edge.
    pub ray_budget: usize,
}

impl Default for ExploreConfig {
    fn default() -> Self {
        ExploreConfig { precision: Q::from_integer(12.into()), precision_rounds: 5, n_max: 12, k_max: 4, ray_budget: 64 }
    }
}

enum Fail {
    Precision,
    Err(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Err(e)
    }
}

impl From<PrecisionShortfall> for Fail {
    fn from(_: PrecisionShortfall) -> Self {
        Fail::Precision
    }
}

/// A tree with reduction data at its vertices and along its edges.
#[derive(Clone, Debug)]
pub struct AnnotatedTree {
    pub tree: Tree,
    /// Indexed by node; present for type II vertices.
    pub vertex_data: Vec<Option<LocalData>>,
    /// Indexed by edge.
    pub rays: Vec<RayAnalysis>,
}

/// Distinct directions at `x` containing classical fixed points.
pub fn classical_directions(
    ctx: &Arc<PrimeContext>,
    x: &TypeIIPoint,
    classical: &[ClassicalFixedPoint],
) -> Vec<DirectionPoint> {
    let mut out: Vec<DirectionPoint> = Vec::new();
    for c in classical {
        let v = x.direction_of(ctx, c.location.finite().map(|r| &r.approx));
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

fn fill_shear(ctx: &Arc<PrimeContext>, ld: &mut LocalData, classical: &[ClassicalFixedPoint]) {
    if ld.is_fixed {
        let dirs = classical_directions(ctx, &ld.point, classical);
        ld.n_shear = Some(dirs.iter().filter(|v| !ld.fixes_direction(v)).map(|v| v.orbit_size()).sum());
    }
}

fn annotate(
    f: &RationalMapK,
    tree: Tree,
    classical: &[ClassicalFixedPoint],
    ray_budget: usize,
) -> std::result::Result<AnnotatedTree, Fail> {
    let ctx = f.ctx();
    let mut vertex_data = Vec::with_capacity(tree.nodes.len());
    for n in &tree.nodes {
        vertex_data.push(match n {
            NodeKind::Vertex(x) => {
                let mut ld = reduce_at(f, x)?;
                fill_shear(ctx, &mut ld, classical);
                Some(ld)
            }
            _ => None,
        });
    }
    let mut rays = Vec::with_capacity(tree.edges.len());
    for e in &tree.edges {
        let lines = match e.leaf_site {
            Some(i) => {
                let site = &tree.sites[i];
                let fixed = matches!(site.kind, SiteKind::Fixed(_));
                let lines = RayLines::approximate(f, &e.center, site.root.prec.as_ref().unwrap(), fixed);
                let from = match &e.lo {
                    Some(l) => l.clone(),
                    None => lines.crossings(None, None).into_iter().min().unwrap_or_else(Q::zero) - Q::from_integer(1.into()),
                };
                if !lines.unknown_lines_harmless(&from) {
                    return Err(Fail::Precision);
                }
                lines
            }
            None => RayLines::exact(f, &e.center),
        };
        let mut ra = ray_analysis_lines(ctx, &lines, e.lo.as_ref(), e.hi.as_ref())?;
        if ra.breakpoints.len() > ray_budget {
            return Err(Fail::Err(Error::ExplorationIncomplete(format!(
                "{} breakpoints on one edge exceed the budget of {ray_budget}",
                ra.breakpoints.len()
            ))));
        }
        for s in ra.segments.iter_mut() {
            fill_shear(ctx, &mut s.sample, classical);
        }
        for b in ra.breakpoints.iter_mut() {
            fill_shear(ctx, &mut b.data, classical);
        }
        rays.push(ra);
    }
    Ok(AnnotatedTree { tree, vertex_data, rays })
}

fn fixed_sites(classical: &[ClassicalFixedPoint]) -> (Vec<Site>, bool) {
    let mut sites = Vec::new();
    let mut inf = false;
    for (i, c) in classical.iter().enumerate() {
        match &c.location {
            Location::Infinity => inf = true,
            Location::Finite(r) => sites.push(Site { root: r.clone(), kind: SiteKind::Fixed(i) }),
        }
    }
    (sites, inf)
}

/// Hull of the classical fixed points, annotated.
pub fn gamma_fix(f: &RationalMapK, cfg: &ExploreConfig) -> Result<AnnotatedTree> {
    with_precision(cfg, |m| {
        let classical = classical::classical_fixed_points_at(f, m)?.ok_or(Fail::Precision)?;
        let (sites, inf) = fixed_sites(&classical);
        let tree = Tree::hull(f.ctx(), sites, inf)?;
        annotate(f, tree, &classical, cfg.ray_budget)
    })
}

fn with_precision<T>(cfg: &ExploreConfig, mut run: impl FnMut(&Q) -> std::result::Result<T, Fail>) -> Result<T> {
    let mut m = cfg.precision.clone();
    for _ in 0..=cfg.precision_rounds {
        match run(&m) {
            Ok(v) => return Ok(v),
            Err(Fail::Err(e)) => return Err(e),
            Err(Fail::Precision) => m = &m * Q::from_integer(2.into()),
        }
    }
    Err(Error::ExplorationIncomplete(format!("precision {m} was not enough to separate the roots")))
}

/// A connected part of the tree made of fixed points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Piece {
    Node(usize),
    Segment { edge: usize, index: usize },
    Breakpoint { edge: usize, index: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComponentKind {
    /// A single attracting or repelling classical point.
    Classical,
    Indifferent,
    /// Contains a repelling type II point; hyperbolic when no classical point
    /// belongs to it.
    Peaked,
}

#[derive(Clone, Debug)]
pub struct RepellingPoint {
    pub point: TypeIIPoint,
    pub degree: usize,
    pub n_cf: usize,
}

#[derive(Clone, Debug)]
pub struct Component {
    pub kind: ComponentKind,
    pub pieces: Vec<Piece>,
    /// Indices into the classical fixed point list.
    pub classical: Vec<usize>,
    pub repelling: Vec<RepellingPoint>,
    /// Σ (deg − 1 − n_cf) over the repelling points.
    pub alpha: i64,
    /// Indifference classes met along the certified arcs.
    pub arc_classes: Vec<IndifferenceClass>,
}

impl Component {
    pub fn is_hyperbolic(&self) -> bool {
        self.kind == ComponentKind::Peaked && self.classical.is_empty()
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            ComponentKind::Classical => "classical",
            ComponentKind::Indifferent => "indifferent",
            ComponentKind::Peaked if self.classical.is_empty() => "hyperbolic",
            ComponentKind::Peaked => "peaked",
        }
    }

    pub fn classical_count(&self, classical: &[ClassicalFixedPoint]) -> usize {
        self.classical.iter().map(|&i| classical[i].multiplicity).sum()
    }
}

/// The explored fixed-point locus of a map.
#[derive(Clone, Debug)]
pub struct FixLocus {
    /// The map, lifted to the field where exploration succeeded.
    pub map: RationalMapK,
    pub classical: Vec<ClassicalFixedPoint>,
    pub skeleton: AnnotatedTree,
    pub components: Vec<Component>,
    /// Precision at which the approximate roots were certified.
    pub precision: Q,
}

impl FixLocus {
    pub fn ctx(&self) -> &Arc<PrimeContext> {
        self.map.ctx()
    }

    pub fn degree(&self) -> usize {
        self.map.degree()
    }

    /// Reduction data for a piece.
    pub fn piece_data(&self, p: Piece) -> Option<&LocalData> {
        match p {
            Piece::Node(i) => self.skeleton.vertex_data[i].as_ref(),
            Piece::Segment { edge, index } => Some(&self.skeleton.rays[edge].segments[index].sample),
            Piece::Breakpoint { edge, index } => Some(&self.skeleton.rays[edge].breakpoints[index].data),
        }
    }

    /// Classical fixed point at a tree node, if any.
    pub fn node_classical(&self, i: usize) -> Option<usize> {
        match &self.skeleton.tree.nodes[i] {
            NodeKind::Site(j) => match self.skeleton.tree.sites[*j].kind {
                SiteKind::Fixed(c) => Some(c),
                SiteKind::Preimage => None,
            },
            NodeKind::Infinity => self.classical.iter().position(|c| c.location == Location::Infinity),
            NodeKind::Vertex(_) => None,
        }
    }

    pub fn piece_fixed(&self, p: Piece) -> bool {
        match p {
            Piece::Node(i) if !matches!(self.skeleton.tree.nodes[i], NodeKind::Vertex(_)) => {
                self.node_classical(i).is_some()
            }
            _ => self.piece_data(p).is_some_and(|d| d.is_fixed),
        }
    }

    /// Pieces of each edge from its upper end to its lower end, including
    /// the two end nodes.
    pub fn edge_chain(&self, edge: usize) -> Vec<Piece> {
        let e = &self.skeleton.tree.edges[edge];
        let ra = &self.skeleton.rays[edge];
        let mut out = vec![Piece::Node(e.upper)];
        for index in 0..ra.segments.len() {
            out.push(Piece::Segment { edge, index });
            if index < ra.breakpoints.len() {
                out.push(Piece::Breakpoint { edge, index });
            }
        }
        out.push(Piece::Node(e.lower));
        out
    }

    /// Type II points with reduction data: vertices and breakpoints.
    pub fn analyzed_points(&self) -> Vec<(Piece, &LocalData)> {
        let mut out = Vec::new();
        for (i, d) in self.skeleton.vertex_data.iter().enumerate() {
            if let Some(d) = d {
                out.push((Piece::Node(i), d));
            }
        }
        for (edge, ra) in self.skeleton.rays.iter().enumerate() {
            for (index, b) in ra.breakpoints.iter().enumerate() {
                out.push((Piece::Breakpoint { edge, index }, &b.data));
            }
        }
        out
    }

    /// Neighbouring pieces in the tree.
    pub fn adjacency(&self) -> Vec<(Piece, Piece)> {
        let mut out = Vec::new();
        for edge in 0..self.skeleton.tree.edges.len() {
            let ch = self.edge_chain(edge);
            for w in ch.windows(2) {
                out.push((w[0], w[1]));
            }
        }
        out
    }
}

fn all_pieces(locus: &FixLocus) -> Vec<Piece> {
    let mut ps: Vec<Piece> = (0..locus.skeleton.tree.nodes.len()).map(Piece::Node).collect();
    for (edge, ra) in locus.skeleton.rays.iter().enumerate() {
        ps.extend((0..ra.segments.len()).map(|index| Piece::Segment { edge, index }));
        ps.extend((0..ra.breakpoints.len()).map(|index| Piece::Breakpoint { edge, index }));
    }
    ps.sort();
    ps
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

fn build_components(locus: &FixLocus) -> Vec<Component> {
    let pieces = all_pieces(locus);
    let idx = |p: &Piece| pieces.binary_search(p).unwrap();
    let mut parent: Vec<usize> = (0..pieces.len()).collect();
    for (a, b) in locus.adjacency() {
        if locus.piece_fixed(a) && locus.piece_fixed(b) {
            let (ra, rb) = (find(&mut parent, idx(&a)), find(&mut parent, idx(&b)));
            parent[ra] = rb;
        }
    }
    let mut groups: Vec<(usize, Vec<Piece>)> = Vec::new();
    for (i, p) in pieces.iter().enumerate() {
        if !locus.piece_fixed(*p) {
            continue;
        }
        let r = find(&mut parent, i);
        match groups.iter_mut().find(|g| g.0 == r) {
            Some(g) => g.1.push(*p),
            None => groups.push((r, vec![*p])),
        }
    }
    groups
        .into_iter()
        .map(|(_, ps)| {
            let mut classical = Vec::new();
            let mut repelling = Vec::new();
            let mut arc_classes = Vec::new();
            for p in &ps {
                if let Piece::Node(i) = p {
                    if let Some(c) = locus.node_classical(*i) {
                        classical.push(c);
                    }
                }
                if let Some(d) = locus.piece_data(*p) {
                    if d.class == IndifferenceClass::Repelling && !matches!(p, Piece::Segment { .. }) {
                        repelling.push(RepellingPoint { point: d.point.clone(), degree: d.local_degree, n_cf: d.n_cf });
                    }
                    if !arc_classes.contains(&d.class) {
                        arc_classes.push(d.class);
                    }
                }
            }
            let alpha = repelling.iter().map(|r| r.degree as i64 - 1 - r.n_cf as i64).sum();
            let isolated = classical.iter().any(|&c| locus.classical[c].class != PointClass::Indifferent);
            let kind = if isolated {
                ComponentKind::Classical
            } else if !repelling.is_empty() || classical.is_empty() {
                ComponentKind::Peaked
            } else {
                ComponentKind::Indifferent
            };
            Component { kind, pieces: ps, classical, repelling, alpha, arc_classes }
        })
        .collect()
}

/// The fixed point whose preimages enlarge the tree: `∞` if fixed, else an
/// exact finite fixed point.
fn preimage_sites(f: &RationalMapK, classical: &[ClassicalFixedPoint], target: &Q) -> Result<(Vec<Site>, bool)> {
    let ctx = f.ctx();
    let pre_poly;
    let mut inf_pre = false;
    if classical.iter().any(|c| c.location == Location::Infinity) {
        pre_poly = f.den().clone();
    } else {
        let c = classical
            .iter()
            .find_map(|c| c.location.finite().filter(|r| r.is_exact()).map(|r| r.approx.clone()))
            .ok_or_else(|| Error::ExplorationIncomplete("no fixed point is known exactly".into()))?;
        pre_poly = f.num() - &f.den().scale(&c);
        let (dn, dd) = (f.num().deg0(), f.den().deg0());
        let at_inf = if dn < dd {
            Some(crate::FieldElement::zero())
        } else if dn == dd {
            Some(crate::poly::Field::div(&f.num().lead(), &f.den().lead()))
        } else {
            None
        };
        inf_pre = at_inf.is_some_and(|v| v == c);
    }
    let mut sites = Vec::new();
    if pre_poly.deg0() > 0 {
        let r = radical(&pre_poly);
        let fixed = radical(&f.fixed_poly());
        let r = r.div_exact(&r.gcd(&fixed));
        if r.deg0() > 0 {
            for root in find_roots(ctx, &r, target)? {
                sites.push(Site { root, kind: SiteKind::Preimage });
            }
        }
    }
    Ok((sites, inf_pre))
}

fn explore_once(f: &RationalMapK, cfg: &ExploreConfig, m: &Q) -> std::result::Result<FixLocus, Fail> {
    let classical = classical::classical_fixed_points_at(f, m)?.ok_or(Fail::Precision)?;
    let (mut sites, inf_fixed) = fixed_sites(&classical);
    let (pre, inf_pre) = preimage_sites(f, &classical, m)?;
    sites.extend(pre);
    let tree = Tree::hull(f.ctx(), sites, inf_fixed || inf_pre)?;
    let skeleton = annotate(f, tree, &classical, cfg.ray_budget)?;
    let mut locus = FixLocus { map: f.clone(), classical, skeleton, components: Vec::new(), precision: m.clone() };
    locus.components = build_components(&locus);
    Ok(locus)
}

/// Smallest admissible context containing the requested extension.
fn lifted_context(ctx: &Arc<PrimeContext>, n: usize, k: usize, cfg: &ExploreConfig) -> Result<Arc<PrimeContext>> {
    let n2 = ctx.n.lcm(&n);
    let k2 = ctx.k.lcm(&k);
    if n2 > cfg.n_max || k2 > cfg.k_max {
        return Err(Error::NeedsExtension { n: n2, k: k2 });
    }
    if k2 != ctx.k && ctx.k != 1 {
        return Err(Error::NeedsExtension { n: n2, k: k2 });
    }
    if k2 == ctx.k {
        ctx.with_ramification(n2)
    } else {
        PrimeContext::new(ctx.p, n2, k2, None)
    }
}

/// Connected components of the fixed locus, lifting the field within the
/// configured budget when a fixed point or vertex needs it.
pub fn explore(f: &RationalMapK, cfg: &ExploreConfig) -> Result<FixLocus> {
    if f.is_identity() {
        return Err(Error::IdentityMap);
    }
    let mut g = f.clone();
    loop {
        match with_precision(cfg, |m| explore_once(&g, cfg, m)) {
            Err(Error::NeedsExtension { n, k }) => {
                let ctx = lifted_context(g.ctx(), n, k, cfg)?;
                g = g.lift_to(&ctx);
            }
            other => return other,
        }
    }
}

/// Components only.
pub fn explore_components(f: &RationalMapK, cfg: &ExploreConfig) -> Result<Vec<Component>> {
    Ok(explore(f, cfg)?.components)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::{q, FieldElement};

    fn run(p: u64, num: &[i64], den: &[i64]) -> FixLocus {
        let ctx = PrimeContext::split(p);
        let f = RationalMapK::from_ints(&ctx, num, den).unwrap();
        explore(&f, &ExploreConfig::default()).unwrap()
    }

    fn kinds(l: &FixLocus) -> Vec<&'static str> {
        let mut v: Vec<_> = l.components.iter().map(|c| c.kind_name()).collect();
        v.sort();
        v
    }

    #[test]
    fn power_map_has_hyperbolic_gauss_point() {
        let l = run(3, &[0, 0, 0, 1], &[1]);
        assert_eq!(kinds(&l), vec!["classical", "classical", "classical", "classical", "hyperbolic"]);
        let h = l.components.iter().find(|c| c.is_hyperbolic()).unwrap();
        assert_eq!(h.repelling.len(), 1);
        assert!(h.repelling[0].point.same_point(&TypeIIPoint::gauss(), l.ctx()));
        assert_eq!((h.repelling[0].degree, h.repelling[0].n_cf, h.alpha), (3, 4, -2));
    }

    #[test]
    fn squaring_map_components() {
        let l = run(5, &[0, 0, 1], &[1]);
        assert_eq!(kinds(&l), vec!["classical", "classical", "peaked"]);
        let c = l.components.iter().find(|c| c.kind == ComponentKind::Peaked).unwrap();
        assert_eq!((c.alpha, c.classical_count(&l.classical)), (-1, 1));
    }

    #[test]
    fn translation_is_one_indifferent_component() {
        let l = run(3, &[1, 1], &[1]);
        assert_eq!(kinds(&l), vec!["indifferent"]);
        assert_eq!(l.components[0].classical_count(&l.classical), 2);
    }

    #[test]
    fn scalings() {
        assert_eq!(kinds(&run(5, &[0, 2], &[1])), vec!["indifferent"]);
        assert_eq!(kinds(&run(5, &[0, 6], &[1])), vec!["indifferent"]);
        assert_eq!(kinds(&run(5, &[0, 5], &[1])), vec!["classical", "classical"]);
    }

    #[test]
    fn segment_component() {
        let ctx = PrimeContext::split(3);
        let f = crate::berkmap::tests::segment_map(&ctx);
        let l = explore(&f, &ExploreConfig::default()).unwrap();
        let h: Vec<_> = l.components.iter().filter(|c| c.is_hyperbolic()).collect();
        assert_eq!(h.len(), 1);
        let mut ends: Vec<(Q, usize, usize)> =
            h[0].repelling.iter().map(|r| (r.point.s.clone(), r.degree, r.n_cf)).collect();
        ends.sort();
        assert_eq!(ends, vec![(q(-2), 2, 2), (q(0), 2, 2)]);
        assert_eq!(h[0].alpha, -2);
        assert!(h[0].repelling.iter().all(|r| r.point.center == FieldElement::zero() || r.point.center.val_in(&ctx) >= crate::Val::Fin(r.point.s.clone())));
    }
}
