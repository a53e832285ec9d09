//! The data model of a colouring subproblem: per-vertex colour lists over
//! a universe `{1..k}`, partial assignments with eager propagation, the
//! generic branching step, and the fixed-set partition induced by a
//! coloured dominating set.
//!
//! Instances are persistent values: every operation returns new children
//! and never mutates the parent, so branches can be explored in any order
//! (and concurrently). The list table is shared copy-on-write between a
//! parent and its children.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::colour::{Colour, ColourSet};
use crate::graph::{Graph, Vertex, VertexSet};

/// A total or partial colouring, keyed by vertex id.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Colouring(BTreeMap<Vertex, Colour>);

impl Colouring {
    pub fn new() -> Self {
        Colouring(BTreeMap::new())
    }

    pub fn get(&self, v: Vertex) -> Option<Colour> {
        self.0.get(&v).copied()
    }

    pub fn insert(&mut self, v: Vertex, c: Colour) {
        self.0.insert(v, c);
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Entries in ascending vertex order.
    pub fn iter(&self) -> impl Iterator<Item = (Vertex, Colour)> + '_ {
        self.0.iter().map(|(&v, &c)| (v, c))
    }

    /// Absorbs `other` (vertex sets are expected to be disjoint).
    pub fn merge(&mut self, other: Colouring) {
        for (v, c) in other.0 {
            debug_assert!(!self.0.contains_key(&v), "colouring merge overlap at {v}");
            self.0.insert(v, c);
        }
    }
}

/// How an instance was produced from its parent. Carried for traces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BranchLabel {
    /// Child of `branch_on_vertex` that assigned this vertex a colour.
    Assigned(Vertex, Colour),
    /// Residual child of `branch_on_vertex`: the vertex kept a restricted list.
    Restricted(Vertex),
    /// One proper colouring of a dominating seed.
    SeedColouring,
    /// Restriction of the parent to a vertex subset (component or fixed set).
    SubInstance,
}

/// A colouring subproblem: a graph, one colour list per vertex, and a
/// partial assignment whose consequences have been propagated.
///
/// Invariants kept by construction:
/// - an assigned vertex has exactly its colour as list;
/// - an assigned colour is absent from every neighbour's list;
/// - every list is a subset of the universe.
#[derive(Clone)]
pub struct Instance {
    graph: Arc<Graph>,
    k: u32,
    universe: ColourSet,
    lists: Arc<Vec<ColourSet>>,
    assigned: Arc<Vec<Option<Colour>>>,
    dead: bool,
    depth: u32,
    provenance: Option<BranchLabel>,
}

impl Instance {
    /// The unconstrained instance: every list is `{1..k}`, nothing
    /// assigned. `k = 0` on a nonempty graph yields a dead instance
    /// (rejected at solve time, not here).
    pub fn full(graph: Arc<Graph>, k: u32) -> Instance {
        let universe = ColourSet::full(k);
        let lists = vec![universe; graph.universe()];
        Instance::with_lists(graph, k, lists)
    }

    /// An instance with explicit lists (restricted k-list colouring).
    /// Lists of vertices absent from the graph are ignored.
    pub fn with_lists(graph: Arc<Graph>, k: u32, lists: Vec<ColourSet>) -> Instance {
        let universe = ColourSet::full(k);
        assert_eq!(lists.len(), graph.universe(), "one list per universe id");
        for v in graph.vertices() {
            assert!(
                lists[v].is_subset_of(universe),
                "list of vertex {v} is not within {{1..{k}}}"
            );
        }
        let dead = graph.vertices().any(|v| lists[v].is_empty());
        let assigned = Arc::new(vec![None; graph.universe()]);
        Instance {
            graph,
            k,
            universe,
            lists: Arc::new(lists),
            assigned,
            dead,
            depth: 0,
            provenance: None,
        }
    }

    pub fn graph(&self) -> &Arc<Graph> {
        &self.graph
    }

    /// The k of the original k-list problem (the largest colour any list
    /// may mention). The effective [`Instance::universe`] can be smaller
    /// on sub-instances.
    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn universe(&self) -> ColourSet {
        self.universe
    }

    pub fn list(&self, v: Vertex) -> ColourSet {
        self.lists[v]
    }

    pub fn assigned(&self, v: Vertex) -> Option<Colour> {
        self.assigned[v]
    }

    /// True iff some present vertex has an empty list; such an instance
    /// has no colouring and is pruned on sight.
    pub fn is_dead(&self) -> bool {
        self.dead
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn provenance(&self) -> Option<BranchLabel> {
        self.provenance
    }

    /// Union of the lists over `s`.
    pub fn col(&self, s: &VertexSet) -> ColourSet {
        s.iter()
            .fold(ColourSet::EMPTY, |acc, v| acc.union(self.lists[v]))
    }

    /// Are `u` and `v` dependent: adjacent with intersecting lists?
    /// Assigned vertices are never dependent because their colour has
    /// been propagated out of every neighbour's list.
    pub fn dependent(&self, u: Vertex, v: Vertex) -> bool {
        self.graph.has_edge(u, v) && !self.lists[u].intersect(self.lists[v]).is_empty()
    }

    /// Is any vertex of `a` dependent on any vertex of `b`?
    pub fn sets_dependent(&self, a: &VertexSet, b: &VertexSet) -> bool {
        a.iter().any(|u| b.iter().any(|v| self.dependent(u, v)))
    }

    /// Assigns colour `c` to `v` and removes `c` from every neighbour's
    /// list. Panics if `c` is not in `v`'s current list.
    #[must_use]
    pub fn assign(&self, v: Vertex, c: Colour) -> Instance {
        assert!(self.graph.contains_vertex(v), "assign: unknown vertex {v}");
        assert!(
            self.lists[v].contains(c),
            "assign: colour {c} not in list {} of vertex {v}",
            self.lists[v]
        );
        let mut child = self.clone();
        child.provenance = Some(BranchLabel::Assigned(v, c));
        let lists = Arc::make_mut(&mut child.lists);
        lists[v] = ColourSet::singleton(c);
        Arc::make_mut(&mut child.assigned)[v] = Some(c);
        for u in self.graph.neighbours(v).ones() {
            lists[u] = lists[u].without(c);
            if lists[u].is_empty() {
                child.dead = true;
            }
        }
        child
    }

    /// The generic branching step: one child per colour of
    /// `list(v) ∩ c_set` (assigned, with propagation), plus a residual
    /// child with `list(v) − c_set` when that set is nonempty. The
    /// disjunction of the children is equivalent to `self`.
    pub fn branch_on_vertex(&self, v: Vertex, c_set: ColourSet) -> Vec<Instance> {
        debug_assert!(
            self.assigned(v).is_none(),
            "branching on already-assigned vertex {v}"
        );
        let mut children = Vec::new();
        for c in self.lists[v].intersect(c_set).iter() {
            children.push(self.assign(v, c));
        }
        let residual = self.lists[v].minus(c_set);
        if !residual.is_empty() {
            let mut child = self.clone();
            child.provenance = Some(BranchLabel::Restricted(v));
            Arc::make_mut(&mut child.lists)[v] = residual;
            children.push(child);
        }
        children
    }

    /// Restriction of this instance to the induced subgraph on `s`.
    /// Lists are shared with the parent; the universe narrows to the
    /// colours actually occurring on `s`.
    pub fn sub_instance(&self, s: &VertexSet) -> Instance {
        let sub = self.graph.induced_subgraph(s);
        let dead = sub.vertices().any(|v| self.lists[v].is_empty());
        Instance {
            graph: Arc::new(sub),
            k: self.k,
            universe: self.col(s),
            lists: Arc::clone(&self.lists),
            assigned: Arc::clone(&self.assigned),
            dead,
            depth: self.depth + 1,
            provenance: Some(BranchLabel::SubInstance),
        }
    }

    /// All present vertices carry singleton lists?
    pub fn all_lists_singleton(&self) -> bool {
        self.graph.vertices().all(|v| self.lists[v].len() == 1)
    }

    /// Partitions the unassigned vertices around an ordered, coloured
    /// dominating set: `F_i` holds the vertices adjacent to `dominators[i]`
    /// but to none of `dominators[..i]`.
    ///
    /// Every dominator must already be assigned, and the set must
    /// dominate the instance's graph.
    pub fn fixed_set_partition(&self, dominators: &[Vertex]) -> FixedSetPartition {
        let universe = self.graph.universe();
        let dom_set = VertexSet::from_iter(universe, dominators.iter().copied());
        assert!(
            self.graph.set_dominates(&dom_set),
            "fixed_set_partition: seed does not dominate"
        );
        let doms: Vec<(Vertex, Colour)> = dominators
            .iter()
            .map(|&d| {
                let c = self
                    .assigned(d)
                    .expect("fixed_set_partition: uncoloured dominator");
                (d, c)
            })
            .collect();
        let mut fixed_sets = vec![VertexSet::empty(universe); dominators.len()];
        for v in self.graph.vertices() {
            if dom_set.contains(v) {
                continue;
            }
            let i = dominators
                .iter()
                .position(|&d| self.graph.has_edge(v, d))
                .expect("dominated vertex has a dominator neighbour");
            fixed_sets[i].insert(v);
        }
        let part = FixedSetPartition {
            dominators: doms,
            fixed_sets,
        };
        debug_assert!(part.check_invariants(self));
        part
    }

    /// All proper, list-respecting colourings of an ordered seed, in
    /// lexicographic order. Used to enumerate the ways of colouring a
    /// dominating set; the count is bounded by `k!` for cliques and `k^3`
    /// for P3s.
    pub fn proper_seed_colourings(&self, seed: &[Vertex]) -> Vec<Vec<Colour>> {
        fn rec(
            inst: &Instance,
            seed: &[Vertex],
            acc: &mut Vec<Colour>,
            out: &mut Vec<Vec<Colour>>,
        ) {
            let i = acc.len();
            if i == seed.len() {
                out.push(acc.clone());
                return;
            }
            for c in inst.list(seed[i]).iter() {
                let clash = (0..i).any(|j| acc[j] == c && inst.graph.has_edge(seed[j], seed[i]));
                if !clash {
                    acc.push(c);
                    rec(inst, seed, acc, out);
                    acc.pop();
                }
            }
        }
        let mut out = Vec::new();
        rec(self, seed, &mut Vec::with_capacity(seed.len()), &mut out);
        out
    }

    /// Line-based dump of the instance state, mainly for trace output.
    ///
    /// Format: a `universe:` header, then one line per present vertex in
    /// ascending order, `v: c1 c2 ...` with 1-based ids and colours, with
    /// `=` prefixed to the colour of an assigned vertex.
    pub fn dump(&self) -> String {
        let mut out = String::from("universe:");
        for c in self.universe.iter() {
            out.push_str(&format!(" {c}"));
        }
        out.push('\n');
        for v in self.graph.vertices() {
            out.push_str(&format!("{}:", v + 1));
            if let Some(c) = self.assigned(v) {
                out.push_str(&format!(" = {c}"));
            } else {
                for c in self.lists[v].iter() {
                    out.push_str(&format!(" {c}"));
                }
            }
            out.push('\n');
        }
        out
    }
}

impl fmt::Debug for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Instance(n={}, u={}",
            self.graph.vertex_count(),
            self.universe
        )?;
        if self.dead {
            write!(f, ", dead")?;
        }
        write!(f, ", lists=[")?;
        for (i, v) in self.graph.vertices().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}:{}", v, self.lists[v])?;
        }
        write!(f, "])")
    }
}

/// An ordered coloured dominating set `d_1..d_t` together with the fixed
/// sets `F_1..F_t` it induces (empty fixed sets are kept so indices stay
/// aligned with dominators).
#[derive(Clone, Debug)]
pub struct FixedSetPartition {
    dominators: Vec<(Vertex, Colour)>,
    fixed_sets: Vec<VertexSet>,
}

impl FixedSetPartition {
    pub fn dominators(&self) -> &[(Vertex, Colour)] {
        &self.dominators
    }

    pub fn fixed_sets(&self) -> &[VertexSet] {
        &self.fixed_sets
    }

    pub fn fixed_set(&self, i: usize) -> &VertexSet {
        &self.fixed_sets[i]
    }

    pub fn len(&self) -> usize {
        self.fixed_sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fixed_sets.is_empty()
    }

    /// Index of the fixed set containing `v`, if any.
    pub fn fixed_set_of(&self, v: Vertex) -> Option<usize> {
        self.fixed_sets.iter().position(|f| f.contains(v))
    }

    /// The dominator separating fixed sets `a` and `b`: `d_min(a,b)` is
    /// adjacent to every vertex of the earlier fixed set and to no vertex
    /// of the later one. Returns the vertex and the index of the side it
    /// dominates.
    pub fn pivot(&self, a: usize, b: usize) -> (Vertex, usize) {
        assert_ne!(a, b, "pivot needs blocks from two different fixed sets");
        let lo = a.min(b);
        (self.dominators[lo].0, lo)
    }

    /// Structural self-check used by debug assertions: adjacency pattern,
    /// disjointness, coverage, and dominator-colour exclusion.
    pub fn check_invariants(&self, inst: &Instance) -> bool {
        let g = inst.graph();
        let universe = g.universe();
        let dom_set = VertexSet::from_iter(universe, self.dominators.iter().map(|&(d, _)| d));
        let mut seen = dom_set.clone();
        for (i, f) in self.fixed_sets.iter().enumerate() {
            let (d_i, c_i) = self.dominators[i];
            for v in f.iter() {
                if !g.has_edge(v, d_i) {
                    return false;
                }
                if self.dominators[..i].iter().any(|&(d, _)| g.has_edge(v, d)) {
                    return false;
                }
                if inst.list(v).contains(c_i) {
                    return false;
                }
                if seen.contains(v) {
                    return false; // overlap
                }
                seen.insert(v);
            }
        }
        &seen == g.vertex_set()
    }
}
