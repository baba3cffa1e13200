//! Graphviz rendering of the annotated skeleton.
//!
//! Every node and edge carries a `class` attribute with the indifference
//! class (or `classical-attracting` etc. for type I ends); colours follow
//! the class: red id-indifferent, blue additively indifferent.

use berklocus::fixlocus::{FixLocus, NodeKind, Piece, SiteKind};

use crate::report::piece_label;

fn color(class: &str) -> &'static str {
    match class {
        "id-indifferent" => "red",
        "additively-indifferent" => "blue",
        "multiplicatively-indifferent" => "darkgreen",
        "repelling" => "black",
        c if c.starts_with("classical") => "purple",
        _ => "gray",
    }
}

fn style(class: &str) -> &'static str {
    if class == "not-fixed" || class == "preimage" {
        "dashed"
    } else {
        "solid"
    }
}

fn esc(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub struct GraphNode {
    pub id: String,
    pub label: String,
    pub class: String,
    shape: &'static str,
}

pub struct GraphEdge {
    pub from: String,
    pub to: String,
    pub label: String,
    pub class: String,
}

/// Skeleton as nodes (tree nodes and ray breakpoints) and edges (ray
/// segments).
pub struct Graph {
    pub nodes: Vec<GraphNode>,
    pub edges: Vec<GraphEdge>,
}

pub fn graph(l: &FixLocus) -> Graph {
    let tree = &l.skeleton.tree;
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    for (i, node) in tree.nodes.iter().enumerate() {
        let (label, class, shape) = match node {
            NodeKind::Vertex(x) => (x.to_string(), piece_label(l, Piece::Node(i)), "ellipse"),
            NodeKind::Site(j) => {
                let site = &tree.sites[*j];
                let class = match site.kind {
                    SiteKind::Fixed(c) => format!("classical-{}", l.classical[c].class.name()),
                    SiteKind::Preimage => "preimage".into(),
                };
                (site.root.approx.to_string(), class, "box")
            }
            NodeKind::Infinity => {
                let class = match l.node_classical(i) {
                    Some(c) => format!("classical-{}", l.classical[c].class.name()),
                    None => "not-fixed".into(),
                };
                ("inf".into(), class, "box")
            }
        };
        nodes.push(GraphNode { id: format!("n{i}"), label, class, shape });
    }
    for (e, edge) in tree.edges.iter().enumerate() {
        let ra = &l.skeleton.rays[e];
        for (b, bp) in ra.breakpoints.iter().enumerate() {
            nodes.push(GraphNode {
                id: format!("e{e}b{b}"),
                label: bp.data.point.to_string(),
                class: bp.data.class.name().into(),
                shape: "point",
            });
        }
        let last = ra.segments.len().saturating_sub(1);
        for (k, seg) in ra.segments.iter().enumerate() {
            let from = if k == 0 { format!("n{}", edge.upper) } else { format!("e{e}b{}", k - 1) };
            let to = if k == last { format!("n{}", edge.lower) } else { format!("e{e}b{k}") };
            let lo = seg.lo.as_ref().map_or("-inf".to_string(), |x| x.to_string());
            let hi = seg.hi.as_ref().map_or("inf".to_string(), |x| x.to_string());
            edges.push(GraphEdge { from, to, label: format!("s in ({lo}, {hi})"), class: seg.sample.class.name().into() });
        }
    }
    Graph { nodes, edges }
}

pub fn render(l: &FixLocus) -> String {
    let g = graph(l);
    let mut out = String::from("graph fixlocus {\n  node [fontsize=10];\n  edge [fontsize=9];\n");
    for n in &g.nodes {
        let label = if n.shape == "point" { esc(&n.label) } else { format!("{}\\n{}", esc(&n.label), n.class) };
        out.push_str(&format!(
            "  {} [label=\"{}\", class=\"{}\", color={}, style={}, shape={}];\n",
            n.id,
            label,
            n.class,
            color(&n.class),
            style(&n.class),
            n.shape
        ));
    }
    for e in &g.edges {
        out.push_str(&format!(
            "  {} -- {} [label=\"{}\", class=\"{}\", color={}, style={}];\n",
            e.from,
            e.to,
            esc(&e.label),
            e.class,
            color(&e.class),
            style(&e.class)
        ));
    }
    out.push_str("}\n");
    out
}
