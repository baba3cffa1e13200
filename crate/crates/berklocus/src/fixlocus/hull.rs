//! Finite trees in the Berkovich line spanned by classical points (and
//! possibly `∞`), stored as edges of the form `{ζ_{c,s} : lo ≤ s ≤ hi}`.

use std::sync::Arc;

use num_traits::Zero;

use crate::berkmap::TypeIIPoint;
use crate::exactfield::{FieldElement, PrimeContext, Val, Q};
use crate::roots::Root;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SiteKind {
    /// Index into the classical fixed point list.
    Fixed(usize),
    /// A preimage of the chosen fixed point, added to enlarge the tree.
    Preimage,
}

#[derive(Clone, Debug)]
pub struct Site {
    pub root: Root,
    pub kind: SiteKind,
}

#[derive(Clone, Debug)]
pub enum NodeKind {
    Vertex(TypeIIPoint),
    Site(usize),
    Infinity,
}

/// `upper` is the end towards `∞` (parameter `lo`), `lower` the end at
/// `hi`; `None` bounds are `∓∞`.
#[derive(Clone, Debug)]
pub struct Edge {
    pub upper: usize,
    pub lower: usize,
    pub center: FieldElement,
    /// Set when the lower end is a leaf site whose center is approximate.
    pub leaf_site: Option<usize>,
    pub lo: Option<Q>,
    pub hi: Option<Q>,
}

#[derive(Clone, Debug)]
pub struct Tree {
    pub sites: Vec<Site>,
    pub nodes: Vec<NodeKind>,
    pub edges: Vec<Edge>,
}

/// A point of a tree.
#[derive(Clone, Debug)]
pub enum TreePoint {
    TypeII(TypeIIPoint),
    Site(usize),
    Infinity,
}

/// The approximations do not separate the sites.
#[derive(Debug, PartialEq, Eq)]
pub struct PrecisionShortfall;

fn min_opt(a: &Option<Q>, b: &Option<Q>) -> Option<Q> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y).clone()),
        (Some(x), None) | (None, Some(x)) => Some(x.clone()),
        (None, None) => None,
    }
}

fn dist_val(ctx: &Arc<PrimeContext>, a: &FieldElement, b: &FieldElement) -> Val {
    (a.clone() - b.clone()).val_in(ctx)
}

impl Tree {
    /// The convex hull of the sites, together with `∞` when `with_inf`.
    pub fn hull(ctx: &Arc<PrimeContext>, sites: Vec<Site>, with_inf: bool) -> Result<Self, PrecisionShortfall> {
        for (i, a) in sites.iter().enumerate() {
            for b in &sites[i + 1..] {
                let v = dist_val(ctx, &a.root.approx, &b.root.approx);
                let cap = min_opt(&a.root.prec, &b.root.prec);
                let ok = match (&v, &cap) {
                    (Val::Inf, _) => false,
                    (Val::Fin(_), None) => true,
                    (Val::Fin(x), Some(c)) => x < c,
                };
                if !ok {
                    return Err(PrecisionShortfall);
                }
            }
        }
        let mut t = Tree { sites, nodes: Vec::new(), edges: Vec::new() };
        let ids: Vec<usize> = (0..t.sites.len()).collect();
        match (ids.len(), with_inf) {
            (0, false) => {}
            (0, true) => {
                let inf = t.push(NodeKind::Infinity);
                let g = t.push(NodeKind::Vertex(TypeIIPoint::gauss()));
                t.edges.push(Edge {
                    upper: inf,
                    lower: g,
                    center: FieldElement::zero(),
                    leaf_site: None,
                    lo: None,
                    hi: Some(Q::zero()),
                });
            }
            (1, false) => {
                let a = t.sites[0].root.approx.clone();
                let s = match a.val_in(ctx) {
                    Val::Fin(v) if v < Q::zero() => v,
                    _ => Q::zero(),
                };
                let v = t.push(NodeKind::Vertex(TypeIIPoint::new(a, s.clone())));
                t.cluster(ctx, ids, Some((v, s)));
            }
            (_, true) => {
                let inf = t.push(NodeKind::Infinity);
                t.cluster(ctx, ids, Some((inf, Q::zero())))
                    .expect("nonempty");
                // the edge out of ∞ is unbounded above
                t.edges.iter_mut().find(|e| e.upper == inf).unwrap().lo = None;
            }
            (_, false) => {
                t.cluster(ctx, ids, None);
            }
        }
        Ok(t)
    }

    fn push(&mut self, k: NodeKind) -> usize {
        self.nodes.push(k);
        self.nodes.len() - 1
    }

    /// Builds the subtree on `ids` hanging from `parent` at parameter `s`;
    /// returns the top node.
    fn cluster(&mut self, ctx: &Arc<PrimeContext>, ids: Vec<usize>, parent: Option<(usize, Q)>) -> Option<usize> {
        let a0 = self.sites[ids[0]].root.approx.clone();
        if ids.len() == 1 {
            let i = ids[0];
            let leaf = self.push(NodeKind::Site(i));
            if let Some((up, s)) = parent {
                let approx = self.sites[i].root.prec.is_some();
                self.edges.push(Edge {
                    upper: up,
                    lower: leaf,
                    center: a0,
                    leaf_site: approx.then_some(i),
                    lo: Some(s),
                    hi: None,
                });
            }
            return Some(leaf);
        }
        let star = ids[1..]
            .iter()
            .map(|&j| dist_val(ctx, &self.sites[j].root.approx, &a0).fin().cloned().unwrap())
            .min()
            .unwrap();
        let v = self.push(NodeKind::Vertex(TypeIIPoint::new(a0.clone(), star.clone())));
        if let Some((up, s)) = parent {
            self.edges.push(Edge { upper: up, lower: v, center: a0, leaf_site: None, lo: Some(s), hi: Some(star.clone()) });
        }
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for &i in &ids {
            let ai = &self.sites[i].root.approx;
            match classes.iter_mut().find(|c| match dist_val(ctx, &self.sites[c[0]].root.approx, ai) {
                Val::Inf => true,
                Val::Fin(x) => x > star,
            }) {
                Some(c) => c.push(i),
                None => classes.push(vec![i]),
            }
        }
        for c in classes {
            self.cluster(ctx, c, Some((v, star.clone())));
        }
        Some(v)
    }

    pub fn has_infinity(&self) -> bool {
        self.nodes.iter().any(|n| matches!(n, NodeKind::Infinity))
    }

    /// The node no edge points down to.
    pub fn top(&self) -> Option<usize> {
        (0..self.nodes.len()).find(|&i| self.edges.iter().all(|e| e.lower != i))
    }

    pub fn node_point(&self, i: usize) -> TreePoint {
        match &self.nodes[i] {
            NodeKind::Vertex(x) => TreePoint::TypeII(x.clone()),
            NodeKind::Site(j) => TreePoint::Site(*j),
            NodeKind::Infinity => TreePoint::Infinity,
        }
    }

    /// Closest point of the tree to `ζ_{b,t}` (`t = None` for the classical
    /// point `b`; `b = None` for `∞`).
    pub fn closest_point(&self, ctx: &Arc<PrimeContext>, b: Option<&FieldElement>, t: Option<&Q>) -> Option<TreePoint> {
        let top = self.top()?;
        let Some(b) = b else {
            return Some(self.node_point(top));
        };
        // highest point of the tree on the path from the query to ∞
        let mut best: Option<(Option<Q>, usize)> = None;
        for (ei, e) in self.edges.iter().enumerate() {
            let dv = dist_val(ctx, b, &e.center).fin().cloned();
            let sigma = min_opt(&min_opt(&e.hi, &t.cloned()), &dv);
            let above_lo = match (&e.lo, &sigma) {
                (None, _) => true,
                (Some(_), None) => true,
                (Some(l), Some(s)) => s >= l,
            };
            if !above_lo {
                continue;
            }
            let better = match &best {
                None => true,
                Some((None, _)) => false,
                Some((Some(x), _)) => sigma.as_ref().is_none_or(|s| s > x),
            };
            if better {
                best = Some((sigma, ei));
            }
        }
        Some(match best {
            None => self.node_point(top),
            Some((None, ei)) => self.node_point(self.edges[ei].lower),
            Some((Some(s), ei)) => {
                let e = &self.edges[ei];
                if e.lo.as_ref() == Some(&s) {
                    self.node_point(e.upper)
                } else if e.hi.as_ref() == Some(&s) {
                    self.node_point(e.lower)
                } else {
                    TreePoint::TypeII(TypeIIPoint::new(e.center.clone(), s))
                }
            }
        })
    }
}
