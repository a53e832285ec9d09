//! Dependency removal between two fixed sets, second method: refine both
//! sets into dynamic blocks of vertices sharing one exact colour list,
//! then clear each block pair with component surgery around a pivot
//! dominator.
//!
//! The structural facts this leans on (at most one crossing component,
//! the dominating-vertex claim, connectivity of the dependent component
//! cluster) hold exactly for P5-free graphs, so each is checked at
//! runtime and a failure is converted into an induced-P5 certificate.

use crate::colour::ColourSet;
use crate::error::{Origin, SolveError};
use crate::graph::{Vertex, VertexSet};
use crate::instance::{FixedSetPartition, Instance};
use crate::method_one::certify;
use crate::p5::{find_dominating_clique_or_p3, find_induced_p5, P5Certificate};
use crate::solver::SolveCtx;

/// One fixed set refined into blocks of identical current lists.
/// Assigned vertices are inert for dependency removal (their colour is
/// propagated already), so they are left out; empty-list vertices mark
/// the instance dead upstream and cannot occur here.
#[derive(Clone, Debug)]
pub struct DynamicPartition {
    blocks: Vec<(ColourSet, VertexSet)>,
}

impl DynamicPartition {
    /// Blocks ordered by descending list size, then lexicographic list.
    pub fn blocks(&self) -> &[(ColourSet, VertexSet)] {
        &self.blocks
    }

    pub fn block(&self, list: ColourSet) -> Option<&VertexSet> {
        self.blocks.iter().find(|(l, _)| *l == list).map(|(_, s)| s)
    }
}

/// Groups the unassigned members of `fixed_set` by their exact list.
pub fn dynamic_partition(inst: &Instance, fixed_set: &VertexSet) -> DynamicPartition {
    let mut blocks: Vec<(ColourSet, VertexSet)> = Vec::new();
    for v in fixed_set.iter() {
        if inst.assigned(v).is_some() {
            continue;
        }
        let l = inst.list(v);
        debug_assert!(!l.is_empty(), "dead instance reached dynamic_partition");
        match blocks.iter_mut().find(|(bl, _)| *bl == l) {
            Some((_, s)) => s.insert(v),
            None => {
                let mut s = VertexSet::empty(inst.graph().universe());
                s.insert(v);
                blocks.push((l, s));
            }
        }
    }
    blocks.sort_by(|(la, _), (lb, _)| lb.len().cmp(&la.len()).then_with(|| la.lex_cmp(*lb)));
    DynamicPartition { blocks }
}

/// All cross pairs of blocks, largest `|col(P)|` first, then largest
/// `|col(Q)|`, ties by lexicographic colour-set order.
pub fn pair_schedule(pa: &DynamicPartition, pb: &DynamicPartition) -> Vec<(ColourSet, ColourSet)> {
    let mut pairs = Vec::with_capacity(pa.blocks.len() * pb.blocks.len());
    for (lp, _) in &pa.blocks {
        for (lq, _) in &pb.blocks {
            pairs.push((*lp, *lq));
        }
    }
    pairs.sort_by(|(p1, q1), (p2, q2)| {
        p2.len()
            .cmp(&p1.len())
            .then_with(|| q2.len().cmp(&q1.len()))
            .then_with(|| p1.lex_cmp(*p2))
            .then_with(|| q1.lex_cmp(*q2))
    });
    pairs
}

/// Which of the two blocks the pivot dominates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PivotSide {
    DominatesP,
    DominatesQ,
}

/// The dominator separating the fixed sets of blocks `p` and `q`: the one
/// with the smaller fixed-set index. By the fixed-set construction it is
/// adjacent to every vertex of the earlier block and to no vertex of the
/// other; both facts are asserted on every call.
pub fn find_pivot(
    inst: &Instance,
    partition: &FixedSetPartition,
    p: &VertexSet,
    q: &VertexSet,
) -> (Vertex, PivotSide) {
    let a = partition
        .fixed_set_of(p.first().expect("find_pivot: empty P block"))
        .expect("P block outside the partition");
    let b = partition
        .fixed_set_of(q.first().expect("find_pivot: empty Q block"))
        .expect("Q block outside the partition");
    assert_ne!(a, b, "find_pivot: blocks of the same fixed set");
    debug_assert!(p.iter().all(|v| partition.fixed_set_of(v) == Some(a)));
    debug_assert!(q.iter().all(|v| partition.fixed_set_of(v) == Some(b)));
    let (pivot, lo) = partition.pivot(a, b);
    let (side, dominated, other) = if lo == a {
        (PivotSide::DominatesP, p, q)
    } else {
        (PivotSide::DominatesQ, q, p)
    };
    let g = inst.graph();
    assert!(
        g.dominates_set(pivot, dominated),
        "pivot {pivot} misses part of its own block"
    );
    assert!(
        !g.adjacent_to_set(pivot, other),
        "pivot {pivot} touches the opposite block"
    );
    (pivot, side)
}

/// The graph `H`: the components of `G(P)` and `G(Q)` that still carry a
/// cross dependency, plus the pivot. Components with no dependency are
/// independent of the other block and are dropped.
#[derive(Clone, Debug)]
pub struct HGraph {
    pub p_side: Vec<VertexSet>,
    pub q_side: Vec<VertexSet>,
    pub pivot: Vertex,
}

impl HGraph {
    pub fn is_empty(&self) -> bool {
        self.p_side.is_empty() && self.q_side.is_empty()
    }
}

/// Builds `H` for a relabelled pair: the caller arranges (via
/// [`find_pivot`]) that `pivot` dominates `q` and misses `p` entirely;
/// both are asserted.
///
/// The kept components must form one connected cluster. Two separate
/// clusters pin down an induced P5 `a-b-pivot-d-c` with `a,c` on the P
/// side and `b,d` on the Q side, reported as [`Origin::HDisconnected`].
pub fn build_h(
    inst: &Instance,
    p: &VertexSet,
    q: &VertexSet,
    pivot: Vertex,
) -> Result<HGraph, SolveError> {
    let g = inst.graph();
    assert!(
        g.dominates_set(pivot, q),
        "build_h: pivot {pivot} does not dominate the Q side"
    );
    assert!(
        !g.adjacent_to_set(pivot, p),
        "build_h: pivot {pivot} touches the P side"
    );
    let keep = |comps: Vec<VertexSet>, other: &VertexSet| -> Vec<VertexSet> {
        comps
            .into_iter()
            .filter(|comp| {
                comp.iter()
                    .any(|u| other.iter().any(|v| inst.dependent(u, v)))
            })
            .collect()
    };
    let p_side = keep(g.induced_subgraph(p).connected_components(), q);
    let q_side = keep(g.induced_subgraph(q).connected_components(), p);
    let h = HGraph {
        p_side,
        q_side,
        pivot,
    };
    // Connectivity of the dependent cluster, pivot aside. Every kept
    // component has a dependency edge into a kept component of the other
    // side, so two disconnected clusters would each mix P and Q vertices.
    if !h.is_empty() {
        let mut kept = VertexSet::empty(g.universe());
        for comp in h.p_side.iter().chain(h.q_side.iter()) {
            kept = kept.union(comp);
        }
        let clusters = g.induced_subgraph(&kept).connected_components();
        if clusters.len() > 1 {
            return Err(h_disconnected_error(inst, p, q, pivot, &clusters));
        }
    }
    Ok(h)
}

fn h_disconnected_error(
    inst: &Instance,
    p: &VertexSet,
    q: &VertexSet,
    pivot: Vertex,
    clusters: &[VertexSet],
) -> SolveError {
    // a-b edge from the first cluster, c-d from the second, a,c ∈ P
    let cross_edge = |cluster: &VertexSet| -> Option<(Vertex, Vertex)> {
        for u in cluster.iter() {
            if !p.contains(u) {
                continue;
            }
            for v in cluster.iter() {
                if q.contains(v) && inst.graph().has_edge(u, v) {
                    return Some((u, v));
                }
            }
        }
        None
    };
    let candidate = match (cross_edge(&clusters[0]), cross_edge(&clusters[1])) {
        (Some((a, b)), Some((c, d))) => Some(P5Certificate::new([a, b, pivot, d, c])),
        _ => None,
    };
    let certificate = match candidate {
        Some(cand) => certify(inst, cand),
        None => find_induced_p5(inst.graph())
            .expect("disconnected H without a P5: build_h preconditions were violated"),
    };
    SolveError::NotP5Free {
        origin: Origin::HDisconnected,
        certificate,
    }
}

/// Scans the P side of `H` for a component holding two vertices attached
/// to different Q components in opposite patterns ("attached" means
/// adjacent to at least one member). In a P5-free graph at most one such
/// component exists; a second one yields a certificate extracted from the
/// subgraph spanned by the proof configuration
/// ([`Origin::TwoCrossingComponents`]).
pub fn find_crossing_component(
    h: &HGraph,
    inst: &Instance,
) -> Result<Option<VertexSet>, SolveError> {
    let g = inst.graph();
    let mut found: Option<(usize, CrossWitness)> = None;
    for (idx, comp) in h.p_side.iter().enumerate() {
        let Some(witness) = crossing_witness(inst, comp, &h.q_side) else {
            continue;
        };
        match &found {
            None => found = Some((idx, witness)),
            Some((first_idx, first_witness)) => {
                let mut span = VertexSet::empty(g.universe());
                span.insert(h.pivot);
                for s in [
                    &h.p_side[*first_idx],
                    &h.p_side[idx],
                    &h.q_side[first_witness.comp_a],
                    &h.q_side[first_witness.comp_b],
                    &h.q_side[witness.comp_a],
                    &h.q_side[witness.comp_b],
                ] {
                    span = span.union(s);
                }
                let certificate = find_induced_p5(&g.induced_subgraph(&span))
                    .or_else(|| find_induced_p5(g))
                    .expect("two crossing components without a P5");
                return Err(SolveError::NotP5Free {
                    origin: Origin::TwoCrossingComponents,
                    certificate,
                });
            }
        }
    }
    Ok(found.map(|(idx, _)| h.p_side[idx].clone()))
}

struct CrossWitness {
    comp_a: usize,
    comp_b: usize,
}

/// Two vertices of `comp` attached to two Q components in opposite
/// patterns.
fn crossing_witness(
    inst: &Instance,
    comp: &VertexSet,
    q_side: &[VertexSet],
) -> Option<CrossWitness> {
    let g = inst.graph();
    let members: Vec<Vertex> = comp.iter().collect();
    let profiles: Vec<Vec<bool>> = members
        .iter()
        .map(|&v| q_side.iter().map(|yc| g.adjacent_to_set(v, yc)).collect())
        .collect();
    for (ai, pa) in profiles.iter().enumerate() {
        for pb in profiles.iter().skip(ai + 1) {
            let a_not_b = pa.iter().zip(pb).position(|(&x, &y)| x && !y);
            let b_not_a = pb.iter().zip(pa).position(|(&x, &y)| x && !y);
            if let (Some(i), Some(j)) = (a_not_b, b_not_a) {
                return Some(CrossWitness {
                    comp_a: i,
                    comp_b: j,
                });
            }
        }
    }
    None
}

/// Takes one connected component out of its dynamic set: find a
/// dominating clique or P3 of the component, enumerate its proper
/// list-respecting colourings, and emit one child per colouring. Every
/// component vertex ends up assigned or dominated by an assigned seed
/// member, so its list shrinks and it migrates to a smaller block. An
/// empty return means the component cannot be coloured at all.
pub fn remove_component(
    inst: &Instance,
    component: &VertexSet,
    ctx: &SolveCtx,
) -> Result<Vec<Instance>, SolveError> {
    let g = inst.graph();
    let sub = g.induced_subgraph(component);
    debug_assert!(
        sub.is_connected(),
        "remove_component needs a connected component"
    );
    let cap = inst.col(component).len();
    if cap == 0 {
        return Ok(vec![]);
    }
    ctx.note_dominating_search();
    let Some(seed) = find_dominating_clique_or_p3(&sub, cap) else {
        // no dominating clique within the colour budget and no dominating
        // P3: the component holds a clique larger than its colour union
        return Ok(vec![]);
    };
    let doms: Vec<Vertex> = seed.vertices.iter().collect();
    let colourings = inst.proper_seed_colourings(&doms);
    let mut children = Vec::with_capacity(colourings.len());
    for colouring in colourings {
        let mut child = inst.clone();
        for (&d, &c) in doms.iter().zip(colouring.iter()) {
            child = child.assign(d, c);
        }
        children.push(child);
    }
    ctx.register(children.len() as u64)?;
    ctx.trace(|| {
        crate::solver::TraceEvent::new(inst.depth(), "remove-component")
            .vertex(doms[0])
            .colours(inst.col(component))
            .children(children.len())
    });
    Ok(children)
}

/// The vertex the branching claim promises: some `x` on the P side of `H`
/// is adjacent to every Q component and dominates all but at most one.
/// Returns `x` and the index of the exceptional component, if any.
/// Selection: most components touched, then most dominated, then the
/// smallest id. A violation pins down an induced P5
/// ([`Origin::ClaimViolated`]).
pub fn claim_vertex(inst: &Instance, h: &HGraph) -> Result<(Vertex, Option<usize>), SolveError> {
    let g = inst.graph();
    assert!(!h.q_side.is_empty(), "claim_vertex on an empty H");
    let mut p_union = VertexSet::empty(g.universe());
    for comp in &h.p_side {
        p_union = p_union.union(comp);
    }
    let score = |x: Vertex| -> (usize, usize) {
        let touched = h
            .q_side
            .iter()
            .filter(|yc| g.adjacent_to_set(x, yc))
            .count();
        let dominated = h.q_side.iter().filter(|yc| g.dominates_set(x, yc)).count();
        (touched, dominated)
    };
    let x = p_union
        .iter()
        .max_by_key(|&v| {
            let (t, d) = score(v);
            (t, d, std::cmp::Reverse(v))
        })
        .expect("claim_vertex: empty P side");
    let (touched, dominated) = score(x);

    if touched < h.q_side.len() {
        return Err(claim_error_not_all_touched(inst, h, &p_union, x));
    }
    if dominated + 1 < h.q_side.len() {
        return Err(claim_error_two_undominated(inst, h, x));
    }
    let exceptional = h.q_side.iter().position(|yc| !g.dominates_set(x, yc));
    Ok((x, exceptional))
}

/// Claim failure, first shape: `x` misses a component `Y2` entirely, so
/// some `x'` reaches `Y2` but misses a component `Y1` that `x` touches;
/// `x-y1-pivot-y2-x'` is then an induced P5 (when `x` and `x'` were
/// adjacent their component would have been crossing and already
/// removed).
fn claim_error_not_all_touched(
    inst: &Instance,
    h: &HGraph,
    p_union: &VertexSet,
    x: Vertex,
) -> SolveError {
    let g = inst.graph();
    let mut candidate = None;
    'outer: for y2_comp in h.q_side.iter() {
        if g.adjacent_to_set(x, y2_comp) {
            continue;
        }
        for xp in p_union.iter() {
            if xp == x || !g.adjacent_to_set(xp, y2_comp) {
                continue;
            }
            for y1_comp in h.q_side.iter() {
                if !g.adjacent_to_set(x, y1_comp) || g.adjacent_to_set(xp, y1_comp) {
                    continue;
                }
                let y1 = y1_comp.iter().find(|&y| g.has_edge(x, y)).unwrap();
                let y2 = y2_comp.iter().find(|&y| g.has_edge(xp, y)).unwrap();
                candidate = Some(P5Certificate::new([x, y1, h.pivot, y2, xp]));
                if !g.has_edge(x, xp) {
                    break 'outer;
                }
            }
        }
    }
    let certificate = match candidate {
        Some(cand) => certify(inst, cand),
        None => span_certificate(inst, h),
    };
    SolveError::NotP5Free {
        origin: Origin::ClaimViolated,
        certificate,
    }
}

/// Claim failure, second shape: `x` reaches two components it does not
/// dominate; a boundary edge in each gives `y1'-y1-x-y2-y2'`.
fn claim_error_two_undominated(inst: &Instance, h: &HGraph, x: Vertex) -> SolveError {
    let g = inst.graph();
    let mut boundaries = Vec::new();
    for yc in &h.q_side {
        if g.dominates_set(x, yc) || !g.adjacent_to_set(x, yc) {
            continue;
        }
        // an edge of the component from a neighbour of x to a non-neighbour
        'comp: for y in yc.iter() {
            if !g.has_edge(x, y) {
                continue;
            }
            for yp in yc.iter() {
                if g.has_edge(y, yp) && !g.has_edge(x, yp) {
                    boundaries.push((y, yp));
                    break 'comp;
                }
            }
        }
        if boundaries.len() == 2 {
            break;
        }
    }
    let certificate = if boundaries.len() == 2 {
        let ((y1, y1p), (y2, y2p)) = (boundaries[0], boundaries[1]);
        certify(inst, P5Certificate::new([y1p, y1, x, y2, y2p]))
    } else {
        span_certificate(inst, h)
    };
    SolveError::NotP5Free {
        origin: Origin::ClaimViolated,
        certificate,
    }
}

fn span_certificate(inst: &Instance, h: &HGraph) -> P5Certificate {
    let g = inst.graph();
    let mut span = VertexSet::empty(g.universe());
    span.insert(h.pivot);
    for comp in h.p_side.iter().chain(h.q_side.iter()) {
        span = span.union(comp);
    }
    find_induced_p5(&g.induced_subgraph(&span))
        .or_else(|| find_induced_p5(g))
        .expect("claim violated without a P5: preconditions were violated")
}

/// Clears every dependency between two dynamic blocks. Per leaf: rebuild
/// `H`; take out a crossing component if one exists; otherwise branch the
/// claim vertex on `col(Q)` (children assign `col(P) ∩ col(Q)` colours,
/// the residual keeps `col(P) − col(Q)`) and, in the assigning children,
/// take out the surviving exceptional Q component if it still depends on
/// the P block. Block membership is recomputed from the current lists
/// each round, so vertices that migrated to smaller lists drop out.
/// Returns the live leaves.
pub fn remove_dynamic_pair(
    inst: &Instance,
    p: &VertexSet,
    q: &VertexSet,
    partition: &FixedSetPartition,
    ctx: &SolveCtx,
) -> Result<Vec<Instance>, SolveError> {
    if inst.is_dead() {
        return Ok(vec![]);
    }
    if p.is_empty() || q.is_empty() || !inst.sets_dependent(p, q) {
        return Ok(vec![inst.clone()]);
    }
    let list_p = inst.list(p.first().unwrap());
    let list_q = inst.list(q.first().unwrap());
    debug_assert!(
        p.iter().all(|v| inst.list(v) == list_p),
        "P is not a dynamic block"
    );
    debug_assert!(
        q.iter().all(|v| inst.list(v) == list_q),
        "Q is not a dynamic block"
    );
    let fa = partition
        .fixed_set_of(p.first().unwrap())
        .expect("P outside the partition");
    let fb = partition
        .fixed_set_of(q.first().unwrap())
        .expect("Q outside the partition");

    let block = |cur: &Instance, fixed: usize, list: ColourSet| -> VertexSet {
        VertexSet::from_iter(
            cur.graph().universe(),
            partition
                .fixed_set(fixed)
                .iter()
                .filter(|&v| cur.assigned(v).is_none() && cur.list(v) == list),
        )
    };

    let mut done = Vec::new();
    let mut work = vec![inst.clone()];
    while let Some(cur) = work.pop() {
        if cur.is_dead() {
            continue;
        }
        let pc = block(&cur, fa, list_p);
        let qc = block(&cur, fb, list_q);
        if pc.is_empty() || qc.is_empty() || !cur.sets_dependent(&pc, &qc) {
            done.push(cur);
            continue;
        }
        let (pivot, side) = find_pivot(&cur, partition, &pc, &qc);
        // relabel so the pivot-dominated block plays the Q role
        let (pp, qq, pp_fixed, pp_list) = match side {
            PivotSide::DominatesQ => (&pc, &qc, fa, list_p),
            PivotSide::DominatesP => (&qc, &pc, fb, list_q),
        };
        let h = build_h(&cur, pp, qq, pivot)?;
        debug_assert!(!h.is_empty(), "dependent pair built an empty H");
        if let Some(crossing) = find_crossing_component(&h, &cur)? {
            for child in remove_component(&cur, &crossing, ctx)? {
                if !child.is_dead() {
                    work.push(child);
                }
            }
            continue;
        }
        let (x, exceptional) = claim_vertex(&cur, &h)?;
        let branch_set = cur.col(qq);
        debug_assert!(!cur.list(x).intersect(branch_set).is_empty());
        let children = cur.branch_on_vertex(x, branch_set);
        ctx.register(children.len() as u64)?;
        ctx.trace(|| {
            crate::solver::TraceEvent::new(cur.depth(), "claim-branch")
                .vertex(x)
                .colours(branch_set)
                .children(children.len())
        });
        for child in children {
            if child.is_dead() {
                continue;
            }
            if child.assigned(x).is_some() {
                if let Some(ei) = exceptional {
                    let comp = &h.q_side[ei];
                    let child_pp = block(&child, pp_fixed, pp_list);
                    let still_depends = comp
                        .iter()
                        .any(|y| child_pp.iter().any(|u| child.dependent(u, y)));
                    if still_depends {
                        for grandchild in remove_component(&child, comp, ctx)? {
                            if !grandchild.is_dead() {
                                work.push(grandchild);
                            }
                        }
                        continue;
                    }
                }
            }
            work.push(child);
        }
    }
    Ok(done)
}

/// Removes every dependency between fixed sets `a` and `b`: walk the
/// block-pair schedule largest-first on each leaf, clearing the first
/// dependent pair and rescheduling (lists only shrink, so blocks migrate
/// strictly downwards and every pair settles once). Returns live leaves;
/// an empty result means the branch is infeasible.
pub fn remove_fixed_pair_m2(
    inst: &Instance,
    partition: &FixedSetPartition,
    a: usize,
    b: usize,
    ctx: &SolveCtx,
) -> Result<Vec<Instance>, SolveError> {
    let fa = partition.fixed_set(a);
    let fb = partition.fixed_set(b);
    if inst.is_dead() {
        return Ok(vec![]);
    }
    if !inst.sets_dependent(fa, fb) {
        return Ok(vec![inst.clone()]);
    }
    let mut done = Vec::new();
    let mut work = vec![inst.clone()];
    'leaves: while let Some(cur) = work.pop() {
        if cur.is_dead() {
            continue;
        }
        let pa = dynamic_partition(&cur, fa);
        let pb = dynamic_partition(&cur, fb);
        for (lp, lq) in pair_schedule(&pa, &pb) {
            let p = pa.block(lp).unwrap();
            let q = pb.block(lq).unwrap();
            if cur.sets_dependent(p, q) {
                work.extend(remove_dynamic_pair(&cur, p, q, partition, ctx)?);
                continue 'leaves;
            }
        }
        done.push(cur);
    }
    debug_assert!(done.iter().all(|l| !l.sets_dependent(fa, fb)));
    Ok(done)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::testkit::oracle_list_colouring;
    use std::sync::Arc;

    fn vs(universe: usize, vals: &[Vertex]) -> VertexSet {
        VertexSet::from_iter(universe, vals.iter().copied())
    }

    fn cs(vals: &[u32]) -> ColourSet {
        vals.iter().copied().collect()
    }

    #[test]
    fn dynamic_partition_groups_by_exact_list() {
        let g = Arc::new(Graph::new(3));
        let lists = vec![cs(&[1, 2]), cs(&[1, 2]), cs(&[2])];
        let inst = Instance::with_lists(g, 3, lists);
        let part = dynamic_partition(&inst, &vs(3, &[0, 1, 2]));
        assert_eq!(part.blocks().len(), 2);
        assert_eq!(part.block(cs(&[1, 2])).unwrap().len(), 2);
        assert_eq!(part.block(cs(&[2])).unwrap().len(), 1);

        // uniform full lists: one block
        let inst = Instance::full(Arc::new(Graph::new(4)), 3);
        let part = dynamic_partition(&inst, &vs(4, &[0, 1, 2, 3]));
        assert_eq!(part.blocks().len(), 1);

        // empty fixed set: empty map
        let part = dynamic_partition(&inst, &VertexSet::empty(4));
        assert!(part.blocks().is_empty());
    }

    #[test]
    fn dynamic_partition_skips_assigned() {
        let g = Arc::new(Graph::new(2));
        let inst = Instance::full(g, 2).assign(0, 1);
        let part = dynamic_partition(&inst, &vs(2, &[0, 1]));
        assert_eq!(part.blocks().len(), 1);
        assert!(part.block(ColourSet::full(2)).unwrap().contains(1));
    }

    #[test]
    fn schedule_is_largest_first_with_lex_ties() {
        let g = Arc::new(Graph::new(3));
        let mk = |lists: Vec<ColourSet>| {
            let inst = Instance::with_lists(Arc::clone(&g), 3, lists);
            dynamic_partition(&inst, &vs(3, &[0, 1, 2]))
        };
        // {1,2,3} vs {1,2},{3}
        let pa = mk(vec![ColourSet::full(3); 3]);
        let pb = mk(vec![cs(&[1, 2]), cs(&[1, 2]), cs(&[3])]);
        let sched = pair_schedule(&pa, &pb);
        assert_eq!(sched[0], (ColourSet::full(3), cs(&[1, 2])));
        assert_eq!(sched[1], (ColourSet::full(3), cs(&[3])));

        // ties {1,2} vs {1,3},{2,3}: lexicographic on the Q side
        let pa = mk(vec![cs(&[1, 2]); 3]);
        let pb = mk(vec![cs(&[1, 3]), cs(&[2, 3]), cs(&[1, 3])]);
        let sched = pair_schedule(&pa, &pb);
        assert_eq!(
            sched,
            vec![(cs(&[1, 2]), cs(&[1, 3])), (cs(&[1, 2]), cs(&[2, 3]))]
        );
    }

    /// d1=0 coloured 3, d2=1 coloured 4, A = {2..2+a_size} on d1, B the
    /// rest on d2. The pre-propagation lists get the dominator colour
    /// added back so it cancels to the requested block list.
    fn two_fixed_sets(
        a_size: usize,
        b_size: usize,
        edges: &[(Vertex, Vertex)],
        a_list: ColourSet,
        b_list: ColourSet,
    ) -> (Instance, FixedSetPartition) {
        let n = 2 + a_size + b_size;
        let mut g = Graph::new(n);
        g.add_edge(0, 1);
        for i in 0..a_size {
            g.add_edge(0, 2 + i);
        }
        for j in 0..b_size {
            g.add_edge(1, 2 + a_size + j);
        }
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        let mut lists = vec![ColourSet::EMPTY; n];
        lists[0] = ColourSet::singleton(3);
        lists[1] = ColourSet::singleton(4);
        for i in 0..a_size {
            lists[2 + i] = a_list.with(3);
        }
        for j in 0..b_size {
            lists[2 + a_size + j] = b_list.with(4);
        }
        let inst = Instance::with_lists(Arc::new(g), 4, lists)
            .assign(0, 3)
            .assign(1, 4);
        let part = inst.fixed_set_partition(&[0, 1]);
        (inst, part)
    }

    #[test]
    fn pivot_relabelling() {
        let (inst, part) = two_fixed_sets(1, 1, &[(2, 3)], cs(&[1, 2]), cs(&[1, 2]));
        let p = vs(4, &[2]); // inside F_1
        let q = vs(4, &[3]); // inside F_2
        let (pivot, side) = find_pivot(&inst, &part, &p, &q);
        assert_eq!(pivot, 0);
        assert_eq!(side, PivotSide::DominatesP);
        let (pivot, side) = find_pivot(&inst, &part, &q, &p);
        assert_eq!(pivot, 0);
        assert_eq!(side, PivotSide::DominatesQ);
    }

    #[test]
    #[should_panic(expected = "same fixed set")]
    fn pivot_rejects_blocks_of_one_fixed_set() {
        let (inst, part) = two_fixed_sets(2, 1, &[], cs(&[1, 2]), cs(&[1, 2]));
        let _ = find_pivot(&inst, &part, &vs(5, &[2]), &vs(5, &[3]));
    }

    #[test]
    fn build_h_keeps_only_dependent_components() {
        // A = {2,3} (two isolated vertices), B = {4}; only 2-4 cross edge
        let (inst, _part) = two_fixed_sets(2, 1, &[(2, 4)], cs(&[1, 2]), cs(&[1, 2]));
        // B plays Q (pivot 1 dominates it); vertex 3 has no dependency
        let h = build_h(&inst, &vs(5, &[2, 3]), &vs(5, &[4]), 1).unwrap();
        assert_eq!(h.q_side.len(), 1);
        assert_eq!(h.p_side.len(), 1);
        assert!(h.p_side[0].contains(2));
        assert!(!h.p_side.iter().any(|c| c.contains(3)));

        // no dependencies at all: empty H
        let (inst, _part) = two_fixed_sets(1, 1, &[], cs(&[1, 2]), cs(&[1, 2]));
        let h = build_h(&inst, &vs(4, &[2]), &vs(4, &[3]), 1).unwrap();
        assert!(h.is_empty());
    }

    #[test]
    fn build_h_disconnected_fires_with_valid_p5() {
        // two disjoint dependent pairs: clusters {2,4} and {3,5}
        let (inst, _part) = two_fixed_sets(2, 2, &[(2, 4), (3, 5)], cs(&[1, 2]), cs(&[1, 2]));
        let err = build_h(&inst, &vs(6, &[2, 3]), &vs(6, &[4, 5]), 1).unwrap_err();
        match err {
            SolveError::NotP5Free {
                origin,
                certificate,
            } => {
                assert_eq!(origin, Origin::HDisconnected);
                assert!(certificate.validate(inst.graph()));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn crossing_component_is_found() {
        // P component {2,3} against Q components {4} and {5}:
        // 2 sees only {4}, 3 sees only {5}
        let (inst, _part) =
            two_fixed_sets(2, 2, &[(2, 3), (2, 4), (3, 5)], cs(&[1, 2]), cs(&[1, 2]));
        let h = build_h(&inst, &vs(6, &[2, 3]), &vs(6, &[4, 5]), 1).unwrap();
        assert_eq!(h.p_side.len(), 1);
        assert_eq!(h.q_side.len(), 2);
        let crossing = find_crossing_component(&h, &inst).unwrap();
        assert_eq!(crossing.unwrap(), vs(6, &[2, 3]));

        // uniform attachment: no crossing
        let (inst, _part) = two_fixed_sets(
            2,
            2,
            &[(2, 3), (2, 4), (2, 5), (3, 4), (3, 5)],
            cs(&[1, 2]),
            cs(&[1, 2]),
        );
        let h = build_h(&inst, &vs(6, &[2, 3]), &vs(6, &[4, 5]), 1).unwrap();
        assert!(find_crossing_component(&h, &inst).unwrap().is_none());
    }

    #[test]
    fn two_crossing_components_fire_with_valid_p5() {
        // Q components {4},{5},{6}; P components {2,3} and {7,8} both
        // crossing: 2-4, 3-5 and 7-5, 8-6; connected via the shared {5}
        let n = 9;
        let mut g = Graph::new(n);
        g.add_edge(0, 1);
        for a in [2, 3, 7, 8] {
            g.add_edge(0, a);
        }
        for b in [4, 5, 6] {
            g.add_edge(1, b);
        }
        g.add_edge(2, 3);
        g.add_edge(7, 8);
        for (u, v) in [(2, 4), (3, 5), (7, 5), (8, 6)] {
            g.add_edge(u, v);
        }
        let mut lists = vec![cs(&[1, 2]); n];
        lists[0] = ColourSet::singleton(3);
        lists[1] = ColourSet::singleton(4);
        let inst = Instance::with_lists(Arc::new(g), 4, lists)
            .assign(0, 3)
            .assign(1, 4);
        let p = vs(n, &[2, 3, 7, 8]);
        let q = vs(n, &[4, 5, 6]);
        let h = build_h(&inst, &p, &q, 1).unwrap();
        assert_eq!(h.p_side.len(), 2);
        assert_eq!(h.q_side.len(), 3);
        let err = find_crossing_component(&h, &inst).unwrap_err();
        match err {
            SolveError::NotP5Free {
                origin,
                certificate,
            } => {
                assert_eq!(origin, Origin::TwoCrossingComponents);
                assert!(certificate.validate(inst.graph()));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn remove_component_base_cases() {
        let ctx = SolveCtx::unbounded();
        // single vertex, list {1,2}: two children
        let g = Arc::new(Graph::new(1));
        let inst = Instance::with_lists(g, 2, vec![cs(&[1, 2])]);
        let children = remove_component(&inst, &vs(1, &[0]), &ctx).unwrap();
        assert_eq!(children.len(), 2);
        assert_eq!(children[0].assigned(0), Some(1));
        assert_eq!(children[1].assigned(0), Some(2));

        // K2 with lists {1,2}: the two proper assignments
        let g = Arc::new(Graph::from_edges(2, &[(0, 1)]));
        let inst = Instance::with_lists(g, 2, vec![cs(&[1, 2]); 2]);
        let children = remove_component(&inst, &vs(2, &[0, 1]), &ctx).unwrap();
        assert_eq!(children.len(), 2);
        for child in &children {
            assert_ne!(child.assigned(0), child.assigned(1));
        }

        // K3 with lists {1,2}: a single vertex dominates the triangle, so
        // two children exist, but each wipes out downstream (the oracle
        // confirms the disjunction is infeasible) and every component
        // vertex leaves its block
        let g = Arc::new(crate::graph::complete(3));
        let inst = Instance::with_lists(g, 2, vec![cs(&[1, 2]); 3]);
        let comp = vs(3, &[0, 1, 2]);
        let children = remove_component(&inst, &comp, &ctx).unwrap();
        assert!(!children.is_empty());
        assert!(children.iter().all(|c| oracle_list_colouring(c).is_none()));
        for child in &children {
            for v in comp.iter() {
                assert!(child.list(v).len() < 2, "vertex {v} kept its full list");
            }
        }

        // K3 with an edge as the only dominating option: restrict the
        // lists so no single vertex colouring survives and the seed
        // colourings run dry
        let g = Arc::new(crate::graph::complete(3));
        let inst = Instance::with_lists(g, 1, vec![cs(&[1]); 3]);
        let children = remove_component(&inst, &vs(3, &[0, 1, 2]), &ctx).unwrap();
        // cap = 1: singleton seed, one colouring, children die on propagation
        assert!(children
            .iter()
            .all(|c| c.is_dead() || oracle_list_colouring(c).is_none()));
    }

    #[test]
    fn claim_vertex_selection() {
        // single Q component {3,4}, x=2 dominates it
        let (inst, _part) =
            two_fixed_sets(1, 2, &[(3, 4), (2, 3), (2, 4)], cs(&[1, 2]), cs(&[1, 2]));
        let h = build_h(&inst, &vs(5, &[2]), &vs(5, &[3, 4]), 1).unwrap();
        let (x, exceptional) = claim_vertex(&inst, &h).unwrap();
        assert_eq!(x, 2);
        assert_eq!(exceptional, None);

        // Q components {3} and {4,5}; x=2 dominates {3}, touches {4,5}
        let (inst, _part) =
            two_fixed_sets(1, 3, &[(4, 5), (2, 3), (2, 4)], cs(&[1, 2]), cs(&[1, 2]));
        let h = build_h(&inst, &vs(6, &[2]), &vs(6, &[3, 4, 5]), 1).unwrap();
        assert_eq!(h.q_side.len(), 2);
        let (x, exceptional) = claim_vertex(&inst, &h).unwrap();
        assert_eq!(x, 2);
        let ei = exceptional.expect("partially touched component is exceptional");
        assert_eq!(h.q_side[ei], vs(6, &[4, 5]));
    }

    #[test]
    fn claim_violation_missing_component_fires() {
        // P = {2},{3} singleton components, Q = {4},{5}; 2-4 and 3-5 only.
        // H is hand-made: build_h would already reject this as disconnected.
        let (inst, _part) = two_fixed_sets(2, 2, &[(2, 4), (3, 5)], cs(&[1, 2]), cs(&[1, 2]));
        let h = HGraph {
            p_side: vec![vs(6, &[2]), vs(6, &[3])],
            q_side: vec![vs(6, &[4]), vs(6, &[5])],
            pivot: 1,
        };
        let err = claim_vertex(&inst, &h).unwrap_err();
        match err {
            SolveError::NotP5Free {
                origin,
                certificate,
            } => {
                assert_eq!(origin, Origin::ClaimViolated);
                assert!(certificate.validate(inst.graph()));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn claim_violation_two_undominated_fires() {
        // x=2 touches both Q components {3,4} and {5,6} without dominating
        let (inst, _part) = two_fixed_sets(
            1,
            4,
            &[(3, 4), (5, 6), (2, 3), (2, 5)],
            cs(&[1, 2]),
            cs(&[1, 2]),
        );
        let h = HGraph {
            p_side: vec![vs(7, &[2])],
            q_side: vec![vs(7, &[3, 4]), vs(7, &[5, 6])],
            pivot: 1,
        };
        let err = claim_vertex(&inst, &h).unwrap_err();
        match err {
            SolveError::NotP5Free {
                origin,
                certificate,
            } => {
                assert_eq!(origin, Origin::ClaimViolated);
                assert!(certificate.validate(inst.graph()));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn remove_dynamic_pair_hand_cases() {
        let ctx = SolveCtx::unbounded();
        // P={2}, Q={3}, edge, both lists {1,2}: two live leaves
        let (inst, part) = two_fixed_sets(1, 1, &[(2, 3)], cs(&[1, 2]), cs(&[1, 2]));
        let leaves = remove_dynamic_pair(&inst, &vs(4, &[2]), &vs(4, &[3]), &part, &ctx).unwrap();
        assert_eq!(leaves.len(), 2);
        for leaf in &leaves {
            assert!(!leaf.dependent(2, 3));
        }
        assert_eq!(
            oracle_list_colouring(&inst).is_some(),
            leaves.iter().any(|l| oracle_list_colouring(l).is_some())
        );

        // blocks {1,2} and {2,3}: the branch runs on the block the pivot
        // does not dominate (vertex 3 here), assigning the shared colour
        // or keeping the private remainder
        let (inst, part) = two_fixed_sets(1, 1, &[(2, 3)], cs(&[1, 2]), cs(&[2, 3]));
        let leaves = remove_dynamic_pair(&inst, &vs(4, &[2]), &vs(4, &[3]), &part, &ctx).unwrap();
        assert_eq!(leaves.len(), 2);
        let assigned: Vec<_> = leaves.iter().filter(|l| l.assigned(3).is_some()).collect();
        let residual: Vec<_> = leaves.iter().filter(|l| l.assigned(3).is_none()).collect();
        assert_eq!(assigned.len(), 1);
        assert_eq!(assigned[0].assigned(3), Some(2));
        assert_eq!(assigned[0].list(2), cs(&[1]));
        assert_eq!(residual.len(), 1);
        assert_eq!(residual[0].list(3), cs(&[3]));
        assert_eq!(residual[0].list(2), cs(&[1, 2]));
        assert_eq!(
            oracle_list_colouring(&inst).is_some(),
            leaves.iter().any(|l| oracle_list_colouring(l).is_some())
        );

        // independent pair: unchanged
        let (inst, part) = two_fixed_sets(1, 1, &[], cs(&[1, 2]), cs(&[1, 2]));
        let leaves = remove_dynamic_pair(&inst, &vs(4, &[2]), &vs(4, &[3]), &part, &ctx).unwrap();
        assert_eq!(leaves.len(), 1);
    }

    #[test]
    fn exceptional_component_is_removed_in_assign_children() {
        // P = {2},{3} singletons, Q = one component {4,5}; 2 sees 4 only,
        // 3 sees 5 only. The claim vertex (2) touches but does not
        // dominate Q's component, so after 2 is assigned the component
        // still depends on 3 and must be taken out via its own seed.
        let (inst, part) =
            two_fixed_sets(2, 2, &[(4, 5), (2, 4), (3, 5)], cs(&[1, 2]), cs(&[1, 2]));
        let events = std::sync::Arc::new(std::sync::Mutex::new(Vec::new()));
        let sink = std::sync::Arc::clone(&events);
        let cfg = crate::solver::SolveConfig {
            trace: Some(std::sync::Arc::new(
                move |ev: &crate::solver::TraceEvent| {
                    sink.lock().unwrap().push(ev.action);
                },
            )),
            ..crate::solver::SolveConfig::default()
        };
        let ctx = SolveCtx::new(&cfg);
        let p = vs(6, &[2, 3]);
        let q = vs(6, &[4, 5]);
        let leaves = remove_dynamic_pair(&inst, &p, &q, &part, &ctx).unwrap();
        assert!(
            events
                .lock()
                .unwrap()
                .iter()
                .any(|a| *a == "remove-component"),
            "exceptional-component removal never ran"
        );
        let block = |leaf: &Instance, set: &VertexSet| -> VertexSet {
            VertexSet::from_iter(
                6,
                set.iter()
                    .filter(|&v| leaf.assigned(v).is_none() && leaf.list(v) == cs(&[1, 2])),
            )
        };
        for leaf in &leaves {
            assert!(!leaf.sets_dependent(&block(leaf, &p), &block(leaf, &q)));
        }
        assert_eq!(
            oracle_list_colouring(&inst).is_some(),
            leaves.iter().any(|l| oracle_list_colouring(l).is_some())
        );
    }

    #[test]
    fn remove_fixed_pair_m2_matches_method_one_decisions() {
        let ctx = SolveCtx::unbounded();
        let cb = |i: &Instance| Ok(oracle_list_colouring(i));
        let mut checked = 0;
        for seed in 0..120 {
            let Some((inst, part)) = crate::testkit::random_pair_setup(seed) else {
                continue;
            };
            let m2 = remove_fixed_pair_m2(&inst, &part, 0, 1, &ctx)
                .expect("no structural error on P5-free input");
            for leaf in &m2 {
                assert!(!leaf.sets_dependent(part.fixed_set(0), part.fixed_set(1)));
                for v in inst.graph().vertices() {
                    assert!(leaf.list(v).is_subset_of(inst.list(v)));
                }
            }
            let m2_sat = m2.iter().any(|l| oracle_list_colouring(l).is_some());
            let oracle_sat = oracle_list_colouring(&inst).is_some();
            assert_eq!(
                m2_sat, oracle_sat,
                "method two equivalence broke at seed {seed}"
            );
            let m1 =
                crate::method_one::remove_fixed_pair_m1(&inst, &part, 0, 1, &cb, &ctx).unwrap();
            let m1_sat = m1.iter().any(|l| oracle_list_colouring(l).is_some());
            assert_eq!(m1_sat, m2_sat, "methods disagree at seed {seed}");
            checked += 1;
        }
        assert!(checked >= 60, "too few P5-free samples ({checked})");
    }

    #[test]
    fn k2_k2_complete_bipartite_m2() {
        let (inst, part) = two_fixed_sets(
            2,
            2,
            &[(2, 3), (4, 5), (2, 4), (2, 5), (3, 4), (3, 5)],
            cs(&[1, 2]),
            cs(&[1, 2]),
        );
        assert!(oracle_list_colouring(&inst).is_none());
        let ctx = SolveCtx::unbounded();
        let leaves = remove_fixed_pair_m2(&inst, &part, 0, 1, &ctx).unwrap();
        assert!(leaves.iter().all(|l| oracle_list_colouring(l).is_none()));
        for leaf in &leaves {
            assert!(!leaf.sets_dependent(part.fixed_set(0), part.fixed_set(1)));
        }
    }
}
