//! Metric graph data model and the structural operations used to build
//! graphs out of smaller pieces.
//!
//! A [`MetricGraph`] is an immutable value: a list of vertices, a list of
//! oriented edges with positive lengths, and an ordered boundary. Every
//! operation returns a fresh graph with canonical ids `0..n` for vertices
//! and `0..m` for edges, so composed graphs are reproducible byte-for-byte.
//! Orientation only fixes an arc-length coordinate; nothing derived from a
//! graph depends on it.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub id: EdgeId,
    pub from: VertexId,
    pub to: VertexId,
    pub length: f64,
}

/// A single invariant violation reported by [`MetricGraph::validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NonPositiveLength { edge: EdgeId, length: f64 },
    SelfLoop { edge: EdgeId, vertex: VertexId },
    UnknownEndpoint { edge: EdgeId, vertex: VertexId },
    DuplicateVertexId(VertexId),
    DuplicateEdgeId(EdgeId),
    EmptyBoundary,
    UnknownBoundaryVertex(VertexId),
    RepeatedBoundaryVertex(VertexId),
    NotConnected { components: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonPositiveLength { edge, length } => {
                write!(f, "edge {edge}: length must be finite and positive (got {length})")
            }
            Violation::SelfLoop { edge, vertex } => {
                write!(f, "edge {edge}: self-loop at vertex {vertex}")
            }
            Violation::UnknownEndpoint { edge, vertex } => {
                write!(f, "edge {edge}: endpoint {vertex} is not a vertex")
            }
            Violation::DuplicateVertexId(v) => write!(f, "vertex id {v} appears twice"),
            Violation::DuplicateEdgeId(e) => write!(f, "edge id {e} appears twice"),
            Violation::EmptyBoundary => write!(f, "boundary is empty"),
            Violation::UnknownBoundaryVertex(v) => {
                write!(f, "boundary vertex {v} is not a vertex")
            }
            Violation::RepeatedBoundaryVertex(v) => {
                write!(f, "boundary vertex {v} is listed twice")
            }
            Violation::NotConnected { components } => {
                write!(f, "graph is not connected ({components} components)")
            }
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("invalid graph: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("boundary sizes differ: {left} vs {right}")]
    BoundarySizeMismatch { left: usize, right: usize },
    #[error("pairing is not a bijection between boundaries of size {0}")]
    BadPairing(usize),
    #[error("operation needs a two-point boundary, got {0} boundary vertices")]
    NotTwoPoint(usize),
    #[error("no edge with id {0}")]
    UnknownEdge(EdgeId),
    #[error("subdivision fraction must lie strictly between 0 and 1 (got {0})")]
    BadFraction(f64),
    #[error("scale factor must be finite and positive (got {0})")]
    BadScale(f64),
    #[error("block {block} refers to frame label {label}, but the frame has {frame} labels")]
    UnknownLabel { block: usize, label: usize, frame: usize },
    #[error("block {block} attaches both boundary points to frame label {label}")]
    DegenerateBlock { block: usize, label: usize },
    #[error("frame labels {0:?} are not reachable from label 0 through the blocks")]
    DisconnectedIncidence(Vec<usize>),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

/// Compact connected metric graph with an ordered boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricGraph {
    vertices: Vec<VertexId>,
    edges: Vec<Edge>,
    boundary: Vec<VertexId>,
}

impl MetricGraph {
    /// Builds a graph and checks every invariant.
    pub fn new(
        vertices: Vec<VertexId>,
        edges: Vec<Edge>,
        boundary: Vec<VertexId>,
    ) -> Result<Self, GraphError> {
        let g = Self::from_parts(vertices, edges, boundary);
        let violations = g.validate();
        if violations.is_empty() {
            Ok(g)
        } else {
            Err(GraphError::Invalid(violations))
        }
    }

    /// Builds a graph without checking anything; pair with [`validate`](Self::validate).
    pub fn from_parts(vertices: Vec<VertexId>, edges: Vec<Edge>, boundary: Vec<VertexId>) -> Self {
        Self {
            vertices,
            edges,
            boundary,
        }
    }

    /// Builds a graph on vertices `0..n` from `(from, to, length)` triples.
    pub fn from_edge_list(
        n: usize,
        edges: &[(VertexId, VertexId, f64)],
        boundary: &[VertexId],
    ) -> Result<Self, GraphError> {
        let edges = edges
            .iter()
            .enumerate()
            .map(|(id, &(from, to, length))| Edge {
                id,
                from,
                to,
                length,
            })
            .collect();
        Self::new((0..n).collect(), edges, boundary.to_vec())
    }

    /// A single edge of length `l` whose two endpoints form the boundary.
    pub fn segment(l: f64) -> Result<Self, GraphError> {
        Self::from_edge_list(2, &[(0, 1, l)], &[0, 1])
    }

    /// A path through the given lengths; the two ends form the boundary.
    pub fn path(lengths: &[f64]) -> Result<Self, GraphError> {
        let edges: Vec<_> = lengths
            .iter()
            .enumerate()
            .map(|(i, &l)| (i, i + 1, l))
            .collect();
        Self::from_edge_list(lengths.len() + 1, &edges, &[0, lengths.len()])
    }

    /// Two vertices joined by one edge per length; both vertices are boundary.
    pub fn parallel(lengths: &[f64]) -> Result<Self, GraphError> {
        let edges: Vec<_> = lengths.iter().map(|&l| (0, 1, l)).collect();
        Self::from_edge_list(2, &edges, &[0, 1])
    }

    /// A star with interior center `0` and leaves `1..=n` forming the boundary.
    pub fn star(lengths: &[f64]) -> Result<Self, GraphError> {
        let edges: Vec<_> = lengths
            .iter()
            .enumerate()
            .map(|(i, &l)| (0, i + 1, l))
            .collect();
        let boundary: Vec<_> = (1..=lengths.len()).collect();
        Self::from_edge_list(lengths.len() + 1, &edges, &boundary)
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn boundary(&self) -> &[VertexId] {
        &self.boundary
    }

    /// Number of boundary vertices `k`.
    pub fn boundary_size(&self) -> usize {
        self.boundary.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Position of a vertex id in [`vertices`](Self::vertices).
    pub fn vertex_index(&self) -> HashMap<VertexId, usize> {
        self.vertices
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i))
            .collect()
    }

    /// Boundary rank of a vertex, if it is on the boundary.
    pub fn boundary_rank(&self, v: VertexId) -> Option<usize> {
        self.boundary.iter().position(|&b| b == v)
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge> {
        self.edges.iter().find(|e| e.id == id)
    }

    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).sum()
    }

    /// Number of edges incident to `v`.
    pub fn multiplicity(&self, v: VertexId) -> usize {
        self.edges
            .iter()
            .map(|e| usize::from(e.from == v) + usize::from(e.to == v))
            .sum()
    }

    /// Every violated invariant; empty iff the graph is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        for &v in &self.vertices {
            if !seen.insert(v) {
                out.push(Violation::DuplicateVertexId(v));
            }
        }
        let mut seen_edges = HashSet::new();
        for e in &self.edges {
            if !seen_edges.insert(e.id) {
                out.push(Violation::DuplicateEdgeId(e.id));
            }
            if !(e.length.is_finite() && e.length > 0.0) {
                out.push(Violation::NonPositiveLength {
                    edge: e.id,
                    length: e.length,
                });
            }
            if e.from == e.to {
                out.push(Violation::SelfLoop {
                    edge: e.id,
                    vertex: e.from,
                });
            }
            for v in [e.from, e.to] {
                if !seen.contains(&v) {
                    out.push(Violation::UnknownEndpoint { edge: e.id, vertex: v });
                }
            }
        }
        if self.boundary.is_empty() {
            out.push(Violation::EmptyBoundary);
        }
        let mut seen_boundary = HashSet::new();
        for &b in &self.boundary {
            if !seen.contains(&b) {
                out.push(Violation::UnknownBoundaryVertex(b));
            }
            if !seen_boundary.insert(b) {
                out.push(Violation::RepeatedBoundaryVertex(b));
            }
        }
        let components = self.component_count();
        if components > 1 {
            out.push(Violation::NotConnected { components });
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    fn component_count(&self) -> usize {
        let index = self.vertex_index();
        let n = self.vertices.len();
        let mut adj = vec![Vec::new(); n];
        for e in &self.edges {
            if let (Some(&a), Some(&b)) = (index.get(&e.from), index.get(&e.to)) {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        let mut seen = vec![false; n];
        let mut components = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            components += 1;
            seen[start] = true;
            let mut queue = VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                for &w in &adj[u] {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        components
    }

    /// Same graph with every edge length multiplied by `c`.
    pub fn scale_lengths(&self, c: f64) -> Result<Self, GraphError> {
        if !(c.is_finite() && c > 0.0) {
            return Err(GraphError::BadScale(c));
        }
        let mut g = self.clone();
        for e in &mut g.edges {
            e.length *= c;
        }
        Ok(g)
    }

    /// Reverses the orientation of one edge.
    pub fn flip_edge(&self, id: EdgeId) -> Result<Self, GraphError> {
        let mut g = self.clone();
        let e = g
            .edges
            .iter_mut()
            .find(|e| e.id == id)
            .ok_or(GraphError::UnknownEdge(id))?;
        std::mem::swap(&mut e.from, &mut e.to);
        Ok(g)
    }

    /// Splits edge `id` at fraction `t` through a new vertex of multiplicity 2.
    ///
    /// The first piece keeps the edge id and runs from the original `from`
    /// vertex; the second piece gets a fresh id and is appended.
    pub fn subdivide_edge(&self, id: EdgeId, t: f64) -> Result<Self, GraphError> {
        if !(t > 0.0 && t < 1.0) {
            return Err(GraphError::BadFraction(t));
        }
        let pos = self
            .edges
            .iter()
            .position(|e| e.id == id)
            .ok_or(GraphError::UnknownEdge(id))?;
        let mut g = self.clone();
        let new_vertex = g.vertices.iter().copied().max().map_or(0, |m| m + 1);
        let new_edge = g.edges.iter().map(|e| e.id).max().map_or(0, |m| m + 1);
        let old = g.edges[pos];
        g.vertices.push(new_vertex);
        g.edges[pos] = Edge {
            to: new_vertex,
            length: t * old.length,
            ..old
        };
        g.edges.push(Edge {
            id: new_edge,
            from: new_vertex,
            to: old.to,
            length: (1.0 - t) * old.length,
        });
        Ok(g)
    }

    /// Copy with canonical ids: vertices `0..n` in stored order, edges `0..m`.
    pub fn canonical(&self) -> Self {
        let index = self.vertex_index();
        Self {
            vertices: (0..self.vertices.len()).collect(),
            edges: self
                .edges
                .iter()
                .enumerate()
                .map(|(i, e)| Edge {
                    id: i,
                    from: index[&e.from],
                    to: index[&e.to],
                    length: e.length,
                })
                .collect(),
            boundary: self.boundary.iter().map(|b| index[b]).collect(),
        }
    }
}

/// Accumulates canonical vertices and edges while merging graphs.
struct Builder {
    vertex_count: usize,
    edges: Vec<Edge>,
}

impl Builder {
    fn new(vertex_count: usize) -> Self {
        Self {
            vertex_count,
            edges: Vec::new(),
        }
    }

    /// Embeds `g`; vertices listed in `fixed` map to the given existing
    /// vertices, all others get fresh ids in stored order.
    fn embed(&mut self, g: &MetricGraph, fixed: &HashMap<VertexId, VertexId>) {
        let mut map = HashMap::new();
        for &v in &g.vertices {
            let target = match fixed.get(&v) {
                Some(&t) => t,
                None => {
                    self.vertex_count += 1;
                    self.vertex_count - 1
                }
            };
            map.insert(v, target);
        }
        for e in &g.edges {
            self.edges.push(Edge {
                id: self.edges.len(),
                from: map[&e.from],
                to: map[&e.to],
                length: e.length,
            });
        }
    }

    fn finish(self, boundary: Vec<VertexId>) -> MetricGraph {
        MetricGraph {
            vertices: (0..self.vertex_count).collect(),
            edges: self.edges,
            boundary,
        }
    }
}

/// Identifies the boundaries of two graphs.
///
/// `pairing[i]` is the position in `g2`'s boundary that is identified with
/// boundary vertex `i` of `g1`. Surviving vertices are `g1`'s, renumbered
/// canonically, followed by `g2`'s non-boundary vertices. The boundary
/// keeps `g1`'s order.
pub fn glue(
    g1: &MetricGraph,
    g2: &MetricGraph,
    pairing: &[usize],
) -> Result<MetricGraph, GraphError> {
    let (k1, k2) = (g1.boundary_size(), g2.boundary_size());
    if k1 != k2 {
        return Err(GraphError::BoundarySizeMismatch { left: k1, right: k2 });
    }
    let mut sorted = pairing.to_vec();
    sorted.sort_unstable();
    if pairing.len() != k1 || sorted.iter().enumerate().any(|(i, &p)| i != p) {
        return Err(GraphError::BadPairing(k1));
    }
    for g in [g1, g2] {
        let v = g.validate();
        if !v.is_empty() {
            return Err(GraphError::Invalid(v));
        }
    }
    let g1 = g1.canonical();
    let mut b = Builder::new(0);
    b.embed(&g1, &HashMap::new());
    let fixed = pairing
        .iter()
        .enumerate()
        .map(|(i, &p)| (g2.boundary[p], g1.boundary[i]))
        .collect();
    b.embed(g2, &fixed);
    Ok(b.finish(g1.boundary.clone()))
}

/// [`glue`] with boundary vertex `i` of `g1` paired to boundary vertex `i` of `g2`.
pub fn glue_aligned(g1: &MetricGraph, g2: &MetricGraph) -> Result<MetricGraph, GraphError> {
    let pairing: Vec<_> = (0..g1.boundary_size()).collect();
    glue(g1, g2, &pairing)
}

/// A two-point-boundary graph to be placed between two frame labels.
#[derive(Debug, Clone)]
pub struct Block {
    pub graph: MetricGraph,
    pub first: usize,
    pub second: usize,
}

/// Places blocks on a frame of `frame_size` labelled vertices.
///
/// Each block's first boundary vertex becomes frame vertex `first`, its
/// second becomes frame vertex `second`. Frame vertices are `0..frame_size`
/// and form the boundary in frame order; block-interior vertices follow in
/// block order.
pub fn attach(frame_size: usize, blocks: &[Block]) -> Result<MetricGraph, GraphError> {
    for (i, blk) in blocks.iter().enumerate() {
        if blk.graph.boundary_size() != 2 {
            return Err(GraphError::NotTwoPoint(blk.graph.boundary_size()));
        }
        for label in [blk.first, blk.second] {
            if label >= frame_size {
                return Err(GraphError::UnknownLabel {
                    block: i,
                    label,
                    frame: frame_size,
                });
            }
        }
        if blk.first == blk.second {
            return Err(GraphError::DegenerateBlock {
                block: i,
                label: blk.first,
            });
        }
        let v = blk.graph.validate();
        if !v.is_empty() {
            return Err(GraphError::Invalid(v));
        }
    }
    // incidence connectivity on labels
    let mut reached = vec![false; frame_size];
    if frame_size > 0 {
        reached[0] = true;
        let mut changed = true;
        while changed {
            changed = false;
            for blk in blocks {
                if reached[blk.first] != reached[blk.second] {
                    reached[blk.first] = true;
                    reached[blk.second] = true;
                    changed = true;
                }
            }
        }
    }
    let missing: Vec<_> = (0..frame_size).filter(|&i| !reached[i]).collect();
    if !missing.is_empty() {
        return Err(GraphError::DisconnectedIncidence(missing));
    }

    let mut b = Builder::new(frame_size);
    for blk in blocks {
        let g = &blk.graph;
        let fixed = HashMap::from([(g.boundary[0], blk.first), (g.boundary[1], blk.second)]);
        b.embed(g, &fixed);
    }
    Ok(b.finish((0..frame_size).collect()))
}

/// `G ∨ H`: identifies the second boundary vertex of `g` with the first of
/// `h`. The joint becomes an interior vertex; the boundary is `(g.0, h.1)`.
pub fn concatenate(g: &MetricGraph, h: &MetricGraph) -> Result<MetricGraph, GraphError> {
    for x in [g, h] {
        if x.boundary_size() != 2 {
            return Err(GraphError::NotTwoPoint(x.boundary_size()));
        }
        let v = x.validate();
        if !v.is_empty() {
            return Err(GraphError::Invalid(v));
        }
    }
    let g = g.canonical();
    let mut b = Builder::new(0);
    b.embed(&g, &HashMap::new());
    let before = b.vertex_count;
    let fixed = HashMap::from([(h.boundary[0], g.boundary[1])]);
    b.embed(h, &fixed);
    // position of h's second boundary vertex among its fresh vertices
    let offset = h
        .vertices
        .iter()
        .filter(|&&v| v != h.boundary[0])
        .position(|&v| v == h.boundary[1])
        .expect("validated boundary vertex");
    Ok(b.finish(vec![g.boundary[0], before + offset]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn minimal_graph_is_valid() {
        assert!(MetricGraph::segment(1.0).unwrap().is_valid());
    }

    #[test]
    fn self_loop_is_reported() {
        let g = MetricGraph::from_parts(
            vec![0],
            vec![Edge {
                id: 0,
                from: 0,
                to: 0,
                length: 1.0,
            }],
            vec![0],
        );
        assert!(g
            .validate()
            .contains(&Violation::SelfLoop { edge: 0, vertex: 0 }));
    }

    #[test]
    fn disjoint_edges_are_not_connected() {
        let g = MetricGraph::from_parts(
            vec![0, 1, 2, 3],
            vec![
                Edge { id: 0, from: 0, to: 1, length: 1.0 },
                Edge { id: 1, from: 2, to: 3, length: 1.0 },
            ],
            vec![0, 2],
        );
        assert_eq!(g.validate(), vec![Violation::NotConnected { components: 2 }]);
    }

    #[test]
    fn bad_lengths_and_boundaries() {
        let g = MetricGraph::from_parts(
            vec![0, 1],
            vec![Edge { id: 7, from: 0, to: 1, length: -1.0 }],
            vec![0, 0, 5],
        );
        let v = g.validate();
        assert!(v.contains(&Violation::NonPositiveLength { edge: 7, length: -1.0 }));
        assert!(v.contains(&Violation::RepeatedBoundaryVertex(0)));
        assert!(v.contains(&Violation::UnknownBoundaryVertex(5)));
        assert!(MetricGraph::segment(f64::NAN).is_err());
        assert!(MetricGraph::from_edge_list(2, &[(0, 1, 1.0)], &[]).is_err());
    }

    #[test]
    fn glue_two_segments_gives_parallel_edges() {
        let s = MetricGraph::segment(FRAC_PI_2).unwrap();
        let g = glue_aligned(&s, &s).unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g, MetricGraph::parallel(&[FRAC_PI_2, FRAC_PI_2]).unwrap());
        assert!(g.is_valid());
    }

    #[test]
    fn glue_doubles_parallel_classes() {
        let p = MetricGraph::parallel(&[1.0, 2.0]).unwrap();
        let g = glue_aligned(&p, &p).unwrap();
        assert_eq!(g.edge_count(), 4);
        assert_eq!(g.vertex_count(), 2);
    }

    #[test]
    fn glue_with_swapped_pairing_and_interior() {
        let star = MetricGraph::star(&[1.0, 2.0]).unwrap();
        let seg = MetricGraph::segment(3.0).unwrap();
        let g = glue(&star, &seg, &[1, 0]).unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.boundary(), &[1, 2]);
        // seg's vertex 1 lands on star's boundary vertex 1 (first boundary)
        assert_eq!(g.edges()[2], Edge { id: 2, from: 2, to: 1, length: 3.0 });
        assert!(g.is_valid());
    }

    #[test]
    fn glue_rejects_size_mismatch() {
        let s = MetricGraph::segment(1.0).unwrap();
        let t = MetricGraph::star(&[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(
            glue_aligned(&s, &t),
            Err(GraphError::BoundarySizeMismatch { left: 2, right: 3 })
        );
        assert_eq!(glue(&s, &s, &[0, 0]), Err(GraphError::BadPairing(2)));
    }

    #[test]
    fn attach_single_block_is_identity() {
        let s = MetricGraph::segment(1.0).unwrap();
        let g = attach(2, &[Block { graph: s.clone(), first: 0, second: 1 }]).unwrap();
        assert_eq!(g, s);
    }

    #[test]
    fn attach_triangle() {
        let s = MetricGraph::segment(1.0).unwrap();
        let blocks: Vec<_> = [(0, 1), (0, 2), (1, 2)]
            .iter()
            .map(|&(i, j)| Block { graph: s.clone(), first: i, second: j })
            .collect();
        let g = attach(3, &blocks).unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.boundary(), &[0, 1, 2]);
        assert!((0..3).all(|v| g.multiplicity(v) == 2));
    }

    #[test]
    fn attach_errors() {
        let s = MetricGraph::segment(1.0).unwrap();
        let only_first = [Block { graph: s.clone(), first: 0, second: 1 }];
        assert_eq!(
            attach(3, &only_first),
            Err(GraphError::DisconnectedIncidence(vec![2]))
        );
        let bad = [Block { graph: s.clone(), first: 0, second: 4 }];
        assert!(matches!(attach(3, &bad), Err(GraphError::UnknownLabel { .. })));
        let star = MetricGraph::star(&[1.0, 1.0, 1.0]).unwrap();
        let wrong = [Block { graph: star, first: 0, second: 1 }];
        assert_eq!(attach(2, &wrong), Err(GraphError::NotTwoPoint(3)));
    }

    #[test]
    fn concatenate_segments_is_path() {
        let a = MetricGraph::segment(1.0).unwrap();
        let b = MetricGraph::segment(2.0).unwrap();
        let g = concatenate(&a, &b).unwrap();
        assert_eq!(g, MetricGraph::path(&[1.0, 2.0]).unwrap());
        assert_eq!(g.multiplicity(1), 2);
        assert!(g.is_valid());
    }

    #[test]
    fn concatenate_with_h_boundary_out_of_order() {
        // h's boundary lists a later vertex first
        let h = MetricGraph::from_edge_list(3, &[(0, 1, 1.0), (1, 2, 1.0)], &[2, 0]).unwrap();
        let g = concatenate(&MetricGraph::segment(0.5).unwrap(), &h).unwrap();
        assert_eq!(g.vertex_count(), 4);
        assert!(g.is_valid());
        let far = g.boundary()[1];
        assert_eq!(g.multiplicity(far), 1);
        assert_eq!(g.multiplicity(1), 2);
    }

    #[test]
    fn concatenate_needs_two_points() {
        let s = MetricGraph::segment(1.0).unwrap();
        let t = MetricGraph::star(&[1.0; 3]).unwrap();
        assert_eq!(concatenate(&s, &t), Err(GraphError::NotTwoPoint(3)));
    }

    #[test]
    fn scaling() {
        let s = MetricGraph::segment(1.0).unwrap();
        assert_eq!(s.scale_lengths(1.0).unwrap(), s);
        assert_eq!(s.scale_lengths(4f64.sqrt()).unwrap(), MetricGraph::segment(2.0).unwrap());
        assert_eq!(s.scale_lengths(0.0), Err(GraphError::BadScale(0.0)));
        assert!(s.scale_lengths(-2.0).is_err());
    }

    #[test]
    fn subdivision() {
        let s = MetricGraph::segment(1.0).unwrap();
        let g = s.subdivide_edge(0, 0.5).unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edges()[0].length, 0.5);
        assert_eq!(g.edges()[1].length, 0.5);
        assert_eq!(g.multiplicity(2), 2);
        assert!(g.is_valid());

        let h = s
            .subdivide_edge(0, 1.0 / 3.0)
            .unwrap()
            .subdivide_edge(1, 0.5)
            .unwrap();
        assert_eq!(h.edge_count(), 3);
        for e in h.edges() {
            assert!((e.length - 1.0 / 3.0).abs() < 1e-15);
        }
        assert_eq!(s.subdivide_edge(3, 0.5), Err(GraphError::UnknownEdge(3)));
        assert_eq!(s.subdivide_edge(0, 1.0), Err(GraphError::BadFraction(1.0)));
    }
}
