//! Immutable simple undirected graphs with bitset adjacency, plus DIMACS
//! `.col` file I/O.
//!
//! Vertex identifiers are dense `0..n-1` integers for a freshly built
//! graph (1-based in DIMACS files). Induced subgraphs keep the original
//! identifiers: a subgraph of a graph with universe `n` still answers
//! adjacency queries in terms of the original ids, and simply contains
//! fewer vertices. All vertex sets exchanged with a graph are bitsets
//! over that shared id universe.

use std::fmt;

use fixedbitset::FixedBitSet;
use thiserror::Error;

/// A vertex identifier.
pub type Vertex = usize;

/// A set of vertex identifiers, interpreted against the id universe of
/// the graph it is used with.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VertexSet(FixedBitSet);

impl VertexSet {
    /// Empty set over a universe of `universe` ids.
    pub fn empty(universe: usize) -> Self {
        VertexSet(FixedBitSet::with_capacity(universe))
    }

    pub fn from_iter<I: IntoIterator<Item = Vertex>>(universe: usize, verts: I) -> Self {
        let mut s = Self::empty(universe);
        for v in verts {
            s.insert(v);
        }
        s
    }

    pub fn full(universe: usize) -> Self {
        let mut s = Self::empty(universe);
        s.0.insert_range(..);
        s
    }

    pub fn universe(&self) -> usize {
        self.0.len()
    }

    pub fn insert(&mut self, v: Vertex) {
        assert!(v < self.0.len(), "vertex {v} outside universe");
        self.0.insert(v);
    }

    pub fn remove(&mut self, v: Vertex) {
        self.0.remove(v);
    }

    pub fn contains(&self, v: Vertex) -> bool {
        v < self.0.len() && self.0.contains(v)
    }

    pub fn len(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_clear()
    }

    /// Members in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.0.ones()
    }

    pub fn first(&self) -> Option<Vertex> {
        self.0.minimum()
    }

    pub fn is_subset_of(&self, other: &VertexSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.0.is_disjoint(&other.0)
    }

    #[must_use]
    pub fn union(&self, other: &VertexSet) -> VertexSet {
        let mut s = self.clone();
        s.0.union_with(&other.0);
        s
    }

    #[must_use]
    pub fn intersect(&self, other: &VertexSet) -> VertexSet {
        let mut s = self.clone();
        s.0.intersect_with(&other.0);
        s
    }

    /// Set difference `self − other`.
    #[must_use]
    pub fn minus(&self, other: &VertexSet) -> VertexSet {
        let mut s = self.clone();
        s.0.difference_with(&other.0);
        s
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Immutable simple undirected graph.
///
/// Construction happens through [`Graph::new`] / [`Graph::from_edges`] /
/// [`Graph::add_edge`]; after that the solver only ever reads it, so a
/// `Graph` can be shared freely across branches and worker threads.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    /// Vertices present in this graph (a subgraph may omit ids).
    verts: VertexSet,
    /// Neighbour bitset per vertex id; rows of absent vertices are empty.
    adj: Vec<FixedBitSet>,
    m: usize,
}

impl Graph {
    /// Graph with vertex ids `0..n-1` and no edges.
    pub fn new(n: usize) -> Self {
        Graph {
            verts: VertexSet::full(n),
            adj: vec![FixedBitSet::with_capacity(n); n],
            m: 0,
        }
    }

    pub fn from_edges(n: usize, edges: &[(Vertex, Vertex)]) -> Self {
        let mut g = Self::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    /// Adds an undirected edge. Duplicate edges are ignored; self-loops
    /// and unknown endpoints panic.
    pub fn add_edge(&mut self, u: Vertex, v: Vertex) {
        assert!(u != v, "self-loop at vertex {u}");
        assert!(
            self.verts.contains(u) && self.verts.contains(v),
            "unknown vertex in edge ({u},{v})"
        );
        if !self.adj[u].contains(v) {
            self.adj[u].insert(v);
            self.adj[v].insert(u);
            self.m += 1;
        }
    }

    /// Size of the id universe (not the number of present vertices).
    pub fn universe(&self) -> usize {
        self.adj.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.verts.len()
    }

    pub fn edge_count(&self) -> usize {
        self.m
    }

    pub fn vertex_set(&self) -> &VertexSet {
        &self.verts
    }

    pub fn contains_vertex(&self, v: Vertex) -> bool {
        self.verts.contains(v)
    }

    /// Present vertices in ascending id order.
    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.verts.iter()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        u < self.adj.len() && self.adj[u].contains(v)
    }

    /// Neighbour bitset of `v` (over the id universe).
    pub fn neighbours(&self, v: Vertex) -> &FixedBitSet {
        &self.adj[v]
    }

    pub fn neighbour_set(&self, v: Vertex) -> VertexSet {
        VertexSet(self.adj[v].clone())
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].count_ones(..)
    }

    /// Does `v` have a neighbour inside `s`?
    pub fn adjacent_to_set(&self, v: Vertex, s: &VertexSet) -> bool {
        !self.adj[v].is_disjoint(&s.0)
    }

    /// Is `v` adjacent to every member of `s` (vacuously true for ∅)?
    pub fn dominates_set(&self, v: Vertex, s: &VertexSet) -> bool {
        s.0.is_subset(&self.adj[v])
    }

    /// The subgraph induced by `s`: vertex set `s`, all edges of `self`
    /// with both ends in `s`, identifiers unchanged.
    ///
    /// Panics if `s` contains an id that is not a vertex of this graph.
    pub fn induced_subgraph(&self, s: &VertexSet) -> Graph {
        assert!(
            s.is_subset_of(&self.verts),
            "induced_subgraph: unknown vertex in {:?}",
            s.minus(&self.verts)
        );
        let mut adj = vec![FixedBitSet::with_capacity(self.adj.len()); self.adj.len()];
        let mut m = 0;
        for v in s.iter() {
            let mut row = self.adj[v].clone();
            row.intersect_with(&s.0);
            m += row.count_ones(..);
            adj[v] = row;
        }
        Graph {
            verts: s.clone(),
            adj,
            m: m / 2,
        }
    }

    /// Maximal connected vertex sets, ordered by smallest contained id.
    pub fn connected_components(&self) -> Vec<VertexSet> {
        let mut seen = FixedBitSet::with_capacity(self.adj.len());
        let mut comps = Vec::new();
        for root in self.verts.iter() {
            if seen.contains(root) {
                continue;
            }
            let mut comp = VertexSet::empty(self.adj.len());
            let mut stack = vec![root];
            seen.insert(root);
            comp.insert(root);
            while let Some(v) = stack.pop() {
                for u in self.adj[v].ones() {
                    if !seen.contains(u) {
                        seen.insert(u);
                        comp.insert(u);
                        stack.push(u);
                    }
                }
            }
            comps.push(comp);
        }
        comps
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components().len() <= 1
    }

    /// Every pair in `s` adjacent? Singletons and ∅ count as cliques.
    pub fn is_clique(&self, s: &VertexSet) -> bool {
        assert!(s.is_subset_of(&self.verts), "is_clique: unknown vertex");
        s.iter().all(|v| {
            let mut others = s.0.clone();
            others.remove(v);
            others.is_subset(&self.adj[v])
        })
    }

    /// Does `s` induce a path on exactly three vertices?
    pub fn is_p3(&self, s: &VertexSet) -> bool {
        assert!(s.is_subset_of(&self.verts), "is_p3: unknown vertex");
        if s.len() != 3 {
            return false;
        }
        let vs: Vec<Vertex> = s.iter().collect();
        let e = |a: usize, b: usize| self.has_edge(vs[a], vs[b]);
        let edges = e(0, 1) as u8 + e(0, 2) as u8 + e(1, 2) as u8;
        edges == 2
    }

    /// Does `d` dominate this graph: is every vertex outside `d` adjacent
    /// to some member of `d`?
    pub fn set_dominates(&self, d: &VertexSet) -> bool {
        let mut covered = d.0.clone();
        for v in d.iter() {
            covered.union_with(&self.adj[v]);
        }
        self.verts.0.is_subset(&covered)
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Graph(n={}, m={}, verts={:?})",
            self.vertex_count(),
            self.edge_count(),
            self.verts
        )
    }
}

/// Errors produced while parsing DIMACS `.col` text.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum DimacsError {
    #[error("line {line}: malformed problem line (expected `p edge <n> <m>`)")]
    BadHeader { line: usize },
    #[error("line {line}: second `p` line")]
    DuplicateHeader { line: usize },
    #[error("line {line}: edge before `p edge` header")]
    EdgeBeforeHeader { line: usize },
    #[error("line {line}: malformed edge line (expected `e <u> <v>`)")]
    BadEdge { line: usize },
    #[error("line {line}: vertex {v} out of range 1..={n}")]
    VertexOutOfRange { line: usize, v: usize, n: usize },
    #[error("line {line}: self-loop at vertex {v}")]
    SelfLoop { line: usize, v: usize },
    #[error("line {line}: unrecognised line")]
    UnknownLine { line: usize },
    #[error("missing `p edge` header")]
    MissingHeader,
}

/// Parses DIMACS colouring format: `c` comment lines, one `p edge n m`
/// line, then `e u v` lines with 1-based endpoints. Blank lines and
/// `\r\n` endings are accepted; duplicate edges collapse.
pub fn read_dimacs(text: &str) -> Result<Graph, DimacsError> {
    let mut graph: Option<Graph> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let mut tokens = raw.split_whitespace();
        let Some(head) = tokens.next() else {
            continue; // blank line
        };
        match head {
            "c" => continue,
            "p" => {
                if graph.is_some() {
                    return Err(DimacsError::DuplicateHeader { line });
                }
                let fmt_ok = tokens.next() == Some("edge");
                let n = tokens.next().and_then(|t| t.parse::<usize>().ok());
                let m = tokens.next().and_then(|t| t.parse::<usize>().ok());
                match (fmt_ok, n, m, tokens.next()) {
                    (true, Some(n), Some(_m), None) => graph = Some(Graph::new(n)),
                    _ => return Err(DimacsError::BadHeader { line }),
                }
            }
            "e" => {
                let g = graph
                    .as_mut()
                    .ok_or(DimacsError::EdgeBeforeHeader { line })?;
                let u = tokens.next().and_then(|t| t.parse::<usize>().ok());
                let v = tokens.next().and_then(|t| t.parse::<usize>().ok());
                let (Some(u), Some(v), None) = (u, v, tokens.next()) else {
                    return Err(DimacsError::BadEdge { line });
                };
                let n = g.universe();
                for w in [u, v] {
                    if w < 1 || w > n {
                        return Err(DimacsError::VertexOutOfRange { line, v: w, n });
                    }
                }
                if u == v {
                    return Err(DimacsError::SelfLoop { line, v: u });
                }
                g.add_edge(u - 1, v - 1);
            }
            _ => return Err(DimacsError::UnknownLine { line }),
        }
    }
    graph.ok_or(DimacsError::MissingHeader)
}

/// Serialises a graph to DIMACS text. Edges are written sorted, so the
/// output is canonical for a given graph.
///
/// Panics if the graph is a proper subgraph (sparse ids cannot be
/// represented in DIMACS without renumbering).
pub fn write_dimacs(g: &Graph) -> String {
    assert_eq!(
        g.vertex_count(),
        g.universe(),
        "write_dimacs needs a graph with dense 0..n-1 ids"
    );
    let mut out = format!("p edge {} {}\n", g.vertex_count(), g.edge_count());
    for u in g.vertices() {
        for v in g.neighbours(u).ones() {
            if u < v {
                out.push_str(&format!("e {} {}\n", u + 1, v + 1));
            }
        }
    }
    out
}

/// The cycle 0-1-..-(n-1)-0. Test helper used across the crate.
pub fn cycle(n: usize) -> Graph {
    let mut g = Graph::new(n);
    for i in 0..n {
        g.add_edge(i, (i + 1) % n);
    }
    g
}

/// The path 0-1-..-(n-1). Test helper used across the crate.
pub fn path(n: usize) -> Graph {
    let mut g = Graph::new(n);
    for i in 0..n.saturating_sub(1) {
        g.add_edge(i, i + 1);
    }
    g
}

/// The complete graph on `n` vertices. Test helper used across the crate.
pub fn complete(n: usize) -> Graph {
    let mut g = Graph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            g.add_edge(u, v);
        }
    }
    g
}

/// Complete multipartite graph with the given part sizes.
pub fn complete_multipartite(parts: &[usize]) -> Graph {
    let n: usize = parts.iter().sum();
    let mut g = Graph::new(n);
    let mut starts = Vec::with_capacity(parts.len());
    let mut acc = 0;
    for &p in parts {
        starts.push(acc);
        acc += p;
    }
    for (i, &pi) in parts.iter().enumerate() {
        for (j, &pj) in parts.iter().enumerate().skip(i + 1) {
            for a in starts[i]..starts[i] + pi {
                for b in starts[j]..starts[j] + pj {
                    g.add_edge(a, b);
                }
            }
        }
    }
    g
}
