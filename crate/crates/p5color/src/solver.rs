//! Orchestration of the solve: component split, dominating-seed
//! branching, fixed-set construction, dependency removal by the
//! configured method, and recursion into the now-independent fixed sets.
//!
//! A SAT answer always comes with a witness the caller can re-check via
//! [`verify_colouring`]; the solver re-checks it itself before returning,
//! so a wrong SAT is impossible even on inputs that are not actually
//! P5-free. A wrong UNSAT is possible only for non-P5-free inputs in
//! unvalidated mode (the structural runtime checks catch most of those
//! with a certificate).

use std::fmt;
use std::sync::atomic::{AtomicU32, AtomicU64, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::colour::ColourSet;
use crate::error::{Origin, SolveError};
use crate::graph::{Graph, Vertex, VertexSet};
use crate::instance::{Colouring, Instance};
use crate::method_one::remove_fixed_pair_m1;
use crate::method_two::remove_fixed_pair_m2;
use crate::p5::{
    find_dominating_clique_or_p3, find_dominating_p3, find_induced_p5, DominatingSeed,
};

/// Which dependency-removal method drives step two of the search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    One,
    Two,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::One => "one",
            Method::Two => "two",
        })
    }
}

impl std::str::FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "one" | "1" => Ok(Method::One),
            "two" | "2" => Ok(Method::Two),
            other => Err(format!(
                "unknown method `{other}` (expected `one` or `two`)"
            )),
        }
    }
}

/// Whether to scan the input for an induced P5 before solving.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Validate {
    Off,
    FullP5Check,
}

/// Order in which dominating seeds are searched.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeedPreference {
    /// Smallest dominating clique first, dominating P3 as fallback.
    SmallestCliqueThenP3,
    /// Dominating P3 first, cliques as fallback.
    P3First,
}

/// One line of the solve trace.
#[derive(Clone, Debug)]
pub struct TraceEvent {
    pub depth: u32,
    pub action: &'static str,
    pub vertex: Option<Vertex>,
    pub colours: Option<ColourSet>,
    pub children: usize,
}

impl TraceEvent {
    pub fn new(depth: u32, action: &'static str) -> Self {
        TraceEvent {
            depth,
            action,
            vertex: None,
            colours: None,
            children: 0,
        }
    }

    pub fn vertex(mut self, v: Vertex) -> Self {
        self.vertex = Some(v);
        self
    }

    pub fn colours(mut self, c: ColourSet) -> Self {
        self.colours = Some(c);
        self
    }

    pub fn children(mut self, n: usize) -> Self {
        self.children = n;
        self
    }
}

impl fmt::Display for TraceEvent {
    /// `depth=1 action=claim-branch vertex=5 colours={1,2} children=3`
    /// with the vertex in 1-based ids.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "depth={} action={}", self.depth, self.action)?;
        if let Some(v) = self.vertex {
            write!(f, " vertex={}", v + 1)?;
        }
        if let Some(c) = self.colours {
            write!(f, " colours={c}")?;
        }
        write!(f, " children={}", self.children)
    }
}

pub type TraceFn = Arc<dyn Fn(&TraceEvent) + Send + Sync>;

/// Solve-time knobs. `Default` gives method two, no input validation, a
/// 10^7-instance budget, one worker, and clique-first seeds.
#[derive(Clone)]
pub struct SolveConfig {
    pub method: Method,
    pub validate: Validate,
    /// Abort with [`SolveError::BudgetExceeded`] after this many created
    /// instances. Guards against runaway searches on inputs that are not
    /// actually P5-free.
    pub max_instances: Option<u64>,
    /// Worker count for branch exploration; 1 is deterministic.
    pub jobs: usize,
    pub seed_preference: SeedPreference,
    pub trace: Option<TraceFn>,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            method: Method::Two,
            validate: Validate::Off,
            max_instances: Some(10_000_000),
            jobs: 1,
            seed_preference: SeedPreference::SmallestCliqueThenP3,
            trace: None,
        }
    }
}

impl fmt::Debug for SolveConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SolveConfig")
            .field("method", &self.method)
            .field("validate", &self.validate)
            .field("max_instances", &self.max_instances)
            .field("jobs", &self.jobs)
            .field("seed_preference", &self.seed_preference)
            .field("trace", &self.trace.as_ref().map(|_| "<fn>"))
            .finish()
    }
}

impl SolveConfig {
    pub fn with_method(method: Method) -> Self {
        SolveConfig {
            method,
            ..SolveConfig::default()
        }
    }
}

/// Counters accumulated over one solve.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolveMetrics {
    pub instances_created: u64,
    pub max_depth: u32,
    pub dominating_searches: u64,
    pub wall_time: Duration,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Sat(Colouring),
    Unsat,
}

/// The solver's answer plus its metrics. A `Sat` colouring has already
/// passed [`verify_colouring`] against the input instance.
#[derive(Clone, Debug)]
pub struct Decision {
    pub outcome: Outcome,
    pub metrics: SolveMetrics,
}

impl Decision {
    pub fn is_sat(&self) -> bool {
        matches!(self.outcome, Outcome::Sat(_))
    }

    pub fn colouring(&self) -> Option<&Colouring> {
        match &self.outcome {
            Outcome::Sat(c) => Some(c),
            Outcome::Unsat => None,
        }
    }
}

/// Shared solve state: the method switch, the instance budget, metric
/// counters, and the trace sink. Branch workers update it concurrently;
/// all counters are monotone.
pub struct SolveCtx {
    method: Method,
    seed_preference: SeedPreference,
    jobs: usize,
    budget: Option<u64>,
    trace_fn: Option<TraceFn>,
    instances: AtomicU64,
    dominating_searches: AtomicU64,
    max_depth: AtomicU32,
}

impl SolveCtx {
    pub fn new(cfg: &SolveConfig) -> Self {
        SolveCtx {
            method: cfg.method,
            seed_preference: cfg.seed_preference,
            jobs: cfg.jobs.max(1),
            budget: cfg.max_instances,
            trace_fn: cfg.trace.clone(),
            instances: AtomicU64::new(0),
            dominating_searches: AtomicU64::new(0),
            max_depth: AtomicU32::new(0),
        }
    }

    /// Context with no budget and no trace, for driving the removal
    /// operations directly (tests, exploration).
    pub fn unbounded() -> Self {
        SolveCtx::new(&SolveConfig {
            max_instances: None,
            ..SolveConfig::default()
        })
    }

    /// Accounts for `n` newly created instances, failing once the budget
    /// is exhausted.
    pub fn register(&self, n: u64) -> Result<(), SolveError> {
        let created = self.instances.fetch_add(n, Ordering::Relaxed) + n;
        match self.budget {
            Some(budget) if created > budget => Err(SolveError::BudgetExceeded { created, budget }),
            _ => Ok(()),
        }
    }

    pub fn instances_created(&self) -> u64 {
        self.instances.load(Ordering::Relaxed)
    }

    pub(crate) fn note_dominating_search(&self) {
        self.dominating_searches.fetch_add(1, Ordering::Relaxed);
    }

    pub(crate) fn note_depth(&self, depth: u32) {
        self.max_depth.fetch_max(depth, Ordering::Relaxed);
    }

    pub(crate) fn trace(&self, make: impl FnOnce() -> TraceEvent) {
        if let Some(sink) = &self.trace_fn {
            sink(&make());
        }
    }

    fn snapshot(&self, wall_time: Duration) -> SolveMetrics {
        SolveMetrics {
            instances_created: self.instances.load(Ordering::Relaxed),
            max_depth: self.max_depth.load(Ordering::Relaxed),
            dominating_searches: self.dominating_searches.load(Ordering::Relaxed),
            wall_time,
        }
    }
}

/// Is `col` a proper colouring of the instance's graph that picks every
/// vertex's colour from its list in `inst`? Vertices without a colour
/// make the answer `false`.
pub fn verify_colouring(inst: &Instance, col: &Colouring) -> bool {
    let g = inst.graph();
    for v in g.vertices() {
        match col.get(v) {
            None => return false,
            Some(c) => {
                if !inst.list(v).contains(c) {
                    return false;
                }
            }
        }
    }
    for u in g.vertices() {
        for w in g.neighbours(u).ones() {
            if u < w && col.get(u) == col.get(w) {
                return false;
            }
        }
    }
    true
}

/// Decides restricted k-list colourability of `inst` and produces a
/// verified witness on SAT.
pub fn solve_list_colouring(inst: &Instance, cfg: &SolveConfig) -> Result<Decision, SolveError> {
    let start = Instant::now();
    if cfg.validate == Validate::FullP5Check {
        if let Some(certificate) = find_induced_p5(inst.graph()) {
            return Err(SolveError::NotP5Free {
                origin: Origin::InputValidation,
                certificate,
            });
        }
    }
    let ctx = SolveCtx::new(cfg);
    ctx.register(1)?;
    let outcome = if ctx.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(ctx.jobs)
            .build()
            .expect("worker pool");
        pool.install(|| solve_rec(inst, &ctx))?
    } else {
        solve_rec(inst, &ctx)?
    };
    let metrics = ctx.snapshot(start.elapsed());
    Ok(match outcome {
        Some(col) => {
            assert!(
                verify_colouring(inst, &col),
                "internal error: solver emitted an unverifiable colouring"
            );
            Decision {
                outcome: Outcome::Sat(col),
                metrics,
            }
        }
        None => Decision {
            outcome: Outcome::Unsat,
            metrics,
        },
    })
}

/// Plain k-colourability: every list is `{1..k}`.
pub fn k_colourable(g: &Graph, k: u32, cfg: &SolveConfig) -> Result<Decision, SolveError> {
    solve_list_colouring(&Instance::full(Arc::new(g.clone()), k), cfg)
}

fn solve_rec(inst: &Instance, ctx: &SolveCtx) -> Result<Option<Colouring>, SolveError> {
    ctx.note_depth(inst.depth());
    if inst.is_dead() {
        return Ok(None);
    }
    let g = inst.graph();

    // already-assigned vertices contribute their colours directly
    let mut partial = Colouring::new();
    let mut open = VertexSet::empty(g.universe());
    for v in g.vertices() {
        match inst.assigned(v) {
            Some(c) => partial.insert(v, c),
            None => open.insert(v),
        }
    }
    if open.is_empty() {
        return Ok(Some(partial));
    }

    // base case: every open list is down to a single colour
    if open.iter().all(|v| inst.list(v).len() == 1) {
        for u in open.iter() {
            let cu = inst.list(u).solo();
            for w in g.neighbours(u).ones() {
                if u < w && open.contains(w) && inst.list(w).solo() == cu {
                    return Ok(None); // forced monochromatic edge
                }
            }
        }
        for u in open.iter() {
            partial.insert(u, inst.list(u).solo().unwrap());
        }
        return Ok(Some(partial));
    }

    // solve the connected pieces of the open subgraph independently
    let comps = g.induced_subgraph(&open).connected_components();
    if comps.len() > 1 || !partial.is_empty() {
        ctx.trace(|| TraceEvent::new(inst.depth(), "component-split").children(comps.len()));
        for comp in &comps {
            ctx.register(1)?;
            let sub = inst.sub_instance(comp);
            match solve_rec(&sub, ctx)? {
                Some(col) => partial.merge(col),
                None => return Ok(None),
            }
        }
        return Ok(Some(partial));
    }

    solve_connected(inst, ctx)
}

/// The dominating-seed step for a connected, fully unassigned instance.
fn solve_connected(inst: &Instance, ctx: &SolveCtx) -> Result<Option<Colouring>, SolveError> {
    let g = inst.graph();
    let universe = inst.col(g.vertex_set());
    let cap = universe.len();
    debug_assert!(cap > 0, "live instance with empty colour union");
    ctx.note_dominating_search();
    let Some(seed) = find_seed(g, cap, ctx.seed_preference) else {
        // No dominating clique of size <= cap and no dominating P3. A
        // connected P5-free graph always has one or the other, and a
        // dominating clique bigger than cap contains a clique on cap+1
        // vertices, which the cap-colour universe cannot colour.
        ctx.trace(|| TraceEvent::new(inst.depth(), "no-dominating-seed"));
        return Ok(None);
    };
    let dominators: Vec<Vertex> = seed.vertices.iter().collect();
    let colourings = inst.proper_seed_colourings(&dominators);
    ctx.trace(|| {
        TraceEvent::new(inst.depth(), "dominating-seed")
            .vertex(dominators[0])
            .colours(universe)
            .children(colourings.len())
    });
    if ctx.jobs > 1 && colourings.len() > 1 {
        colourings
            .par_iter()
            .find_map_any(|colouring| {
                match explore_seed_colouring(inst, &dominators, colouring, ctx) {
                    Ok(None) => None,
                    decided => Some(decided),
                }
            })
            .unwrap_or(Ok(None))
    } else {
        for colouring in &colourings {
            if let Some(col) = explore_seed_colouring(inst, &dominators, colouring, ctx)? {
                return Ok(Some(col));
            }
        }
        Ok(None)
    }
}

fn find_seed(g: &Graph, cap: usize, pref: SeedPreference) -> Option<DominatingSeed> {
    match pref {
        SeedPreference::SmallestCliqueThenP3 => find_dominating_clique_or_p3(g, cap),
        SeedPreference::P3First => {
            find_dominating_p3(g).or_else(|| find_dominating_clique_or_p3(g, cap))
        }
    }
}

/// One way of colouring the dominating set: assign it, partition the rest
/// into fixed sets, clear all inter-set dependencies, then colour each
/// fixed set independently. First satisfiable leaf wins.
fn explore_seed_colouring(
    inst: &Instance,
    dominators: &[Vertex],
    colouring: &[crate::colour::Colour],
    ctx: &SolveCtx,
) -> Result<Option<Colouring>, SolveError> {
    ctx.register(1)?;
    let mut rooted = inst.clone();
    for (&d, &c) in dominators.iter().zip(colouring.iter()) {
        rooted = rooted.assign(d, c);
    }
    ctx.trace(|| {
        TraceEvent::new(inst.depth(), "seed-colouring")
            .vertex(dominators[0])
            .colours(colouring.iter().copied().collect())
    });
    if rooted.is_dead() {
        return Ok(None);
    }
    let partition = rooted.fixed_set_partition(dominators);
    let callback = |sub: &Instance| solve_rec(sub, ctx);

    let mut leaves = vec![rooted];
    let t = partition.len();
    for i in 0..t {
        for j in i + 1..t {
            if partition.fixed_set(i).is_empty() || partition.fixed_set(j).is_empty() {
                continue;
            }
            let mut next = Vec::with_capacity(leaves.len());
            for leaf in &leaves {
                let cleared = match ctx.method {
                    Method::One => remove_fixed_pair_m1(leaf, &partition, i, j, &callback, ctx)?,
                    Method::Two => remove_fixed_pair_m2(leaf, &partition, i, j, ctx)?,
                };
                next.extend(cleared);
            }
            leaves = next;
            if leaves.is_empty() {
                return Ok(None);
            }
        }
    }
    #[cfg(debug_assertions)]
    for leaf in &leaves {
        for i in 0..t {
            for j in i + 1..t {
                debug_assert!(
                    !leaf.sets_dependent(partition.fixed_set(i), partition.fixed_set(j)),
                    "inter-set dependency survived the removal sweep"
                );
            }
        }
    }

    for leaf in &leaves {
        let mut total = Colouring::new();
        for &(d, c) in partition.dominators() {
            total.insert(d, c);
        }
        let mut all_sat = true;
        for fixed in partition.fixed_sets() {
            if fixed.is_empty() {
                continue;
            }
            ctx.register(1)?;
            let sub = leaf.sub_instance(fixed);
            match solve_rec(&sub, ctx)? {
                Some(col) => total.merge(col),
                None => {
                    all_sat = false;
                    break;
                }
            }
        }
        if all_sat {
            return Ok(Some(total));
        }
    }
    Ok(None)
}
