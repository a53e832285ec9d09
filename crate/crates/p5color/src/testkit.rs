//! Independent ground truth for the solver: a brute-force list-colouring
//! oracle, P5-free graph generators, and the reproducible corpus manifest
//! the acceptance and bench runs are driven by.
//!
//! The oracle is deliberately unsophisticated — static vertex order by
//! decreasing degree, forward pruning on empty lists only — so that it
//! shares no ideas with the solving pipeline it is used to check.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::colour::ColourSet;
use crate::graph::{Graph, Vertex};
use crate::instance::{Colouring, Instance};
use crate::p5::{is_p5_free, P5Certificate};

/// Default size cap for the oracle; it is exponential by design.
pub const ORACLE_DEFAULT_CAP: usize = 20;

/// Exact backtracking over list assignments. Returns a witness colouring
/// or `None` (UNSAT). Panics when the instance has more vertices than
/// [`ORACLE_DEFAULT_CAP`]; use [`oracle_list_colouring_with_cap`] to lift
/// the cap deliberately.
pub fn oracle_list_colouring(inst: &Instance) -> Option<Colouring> {
    oracle_list_colouring_with_cap(inst, ORACLE_DEFAULT_CAP)
}

pub fn oracle_list_colouring_with_cap(inst: &Instance, cap: usize) -> Option<Colouring> {
    let g = inst.graph();
    assert!(
        g.vertex_count() <= cap,
        "oracle cap exceeded: {} vertices > {cap}",
        g.vertex_count()
    );
    let mut order: Vec<Vertex> = g.vertices().collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    let lists: Vec<ColourSet> = (0..g.universe()).map(|v| inst.list(v)).collect();
    let mut acc = Colouring::new();
    if assign_next(g, &order, 0, lists, &mut acc) {
        Some(acc)
    } else {
        None
    }
}

fn assign_next(
    g: &Graph,
    order: &[Vertex],
    idx: usize,
    lists: Vec<ColourSet>,
    acc: &mut Colouring,
) -> bool {
    let Some(&v) = order.get(idx) else {
        return true;
    };
    for c in lists[v].iter() {
        let mut next = lists.clone();
        next[v] = ColourSet::singleton(c);
        let mut wiped = false;
        for u in g.neighbours(v).ones() {
            next[u] = next[u].without(c);
            if next[u].is_empty() && order[idx + 1..].contains(&u) {
                wiped = true;
                break;
            }
        }
        if !wiped && assign_next(g, order, idx + 1, next, acc) {
            acc.insert(v, c);
            return true;
        }
    }
    false
}

/// Exhaustive 5-subset scan for an induced P5, independent of the
/// solver-side detector. Returns the path in order when one exists.
pub fn brute_force_find_p5(g: &Graph) -> Option<P5Certificate> {
    let verts: Vec<Vertex> = g.vertices().collect();
    let n = verts.len();
    if n < 5 {
        return None;
    }
    let mut pick = [0usize; 5];
    fn rec(
        g: &Graph,
        verts: &[Vertex],
        pick: &mut [usize; 5],
        depth: usize,
        start: usize,
    ) -> Option<P5Certificate> {
        if depth == 5 {
            return order_as_path(g, &pick.map(|i| verts[i]));
        }
        for i in start..verts.len() {
            pick[depth] = i;
            if let Some(found) = rec(g, verts, pick, depth + 1, i + 1) {
                return Some(found);
            }
        }
        None
    }
    rec(g, &verts, &mut pick, 0, 0)
}

/// If the five vertices induce a path, returns them in path order.
fn order_as_path(g: &Graph, vs: &[Vertex; 5]) -> Option<P5Certificate> {
    let deg = |v: Vertex| vs.iter().filter(|&&u| u != v && g.has_edge(u, v)).count();
    let mut edges = 0;
    for i in 0..5 {
        for j in i + 1..5 {
            edges += g.has_edge(vs[i], vs[j]) as usize;
        }
    }
    if edges != 4 {
        return None;
    }
    let ends: Vec<Vertex> = vs.iter().copied().filter(|&v| deg(v) == 1).collect();
    if ends.len() != 2 || vs.iter().any(|&v| deg(v) > 2) {
        return None;
    }
    // walk from one endpoint
    let mut path = vec![ends[0]];
    while path.len() < 5 {
        let prev = path.len().checked_sub(2).map(|i| path[i]);
        let cur = *path.last().unwrap();
        let next = vs
            .iter()
            .copied()
            .find(|&u| u != cur && Some(u) != prev && g.has_edge(u, cur))?;
        path.push(next);
    }
    Some(P5Certificate::new([
        path[0], path[1], path[2], path[3], path[4],
    ]))
}

/// Is there an induced P4 anywhere? Brute-force; used to validate the
/// cograph generator.
pub fn brute_force_has_p4(g: &Graph) -> bool {
    let verts: Vec<Vertex> = g.vertices().collect();
    let n = verts.len();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let q = [verts[a], verts[b], verts[c], verts[d]];
                    if a == b || a == c || a == d || b == c || b == d || c == d {
                        continue;
                    }
                    let e = |x: usize, y: usize| g.has_edge(q[x], q[y]);
                    if e(0, 1) && e(1, 2) && e(2, 3) && !e(0, 2) && !e(0, 3) && !e(1, 3) {
                        return true;
                    }
                }
            }
        }
    }
    false
}

/// Relabels a dense graph by `perm` (vertex `v` becomes `perm[v]`).
pub fn relabel(g: &Graph, perm: &[Vertex]) -> Graph {
    assert_eq!(g.vertex_count(), g.universe(), "relabel expects dense ids");
    let mut h = Graph::new(g.universe());
    for u in g.vertices() {
        for v in g.neighbours(u).ones() {
            if u < v {
                h.add_edge(perm[u], perm[v]);
            }
        }
    }
    h
}

/// One generator request: a graph family with its parameters and an RNG
/// seed. Every family produces P5-free graphs — structurally for split,
/// cograph and multipartite, by rejection sampling for `Er`.
#[derive(Clone, Debug, PartialEq)]
pub enum GenSpec {
    /// Clique + stable set + random cross edges; every stable vertex gets
    /// at least one anchor edge, so the graph is connected. Split graphs
    /// have no induced 2K2, hence no induced P5.
    Split { n: usize, density: f64, seed: u64 },
    /// Random cotree with a join at the root (connected). P4-free.
    Cograph { n: usize, seed: u64 },
    /// Complete multipartite graph; the seed is carried only so manifest
    /// rows stay uniform.
    Multipartite { parts: Vec<usize>, seed: u64 },
    /// Erdős–Rényi G(n, density) resampled until P5-free; n is capped so
    /// rejection stays feasible.
    Er { n: usize, density: f64, seed: u64 },
}

pub const ER_MAX_N: usize = 12;
const ER_RETRY_LIMIT: usize = 100_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("invalid generator spec: {0}")]
    BadSpec(String),
    #[error("rejection sampling gave up after {tries} tries")]
    RetryLimitExceeded { tries: usize },
}

impl GenSpec {
    /// Short identifier used as the graph id in bench CSV rows.
    pub fn id(&self) -> String {
        match self {
            GenSpec::Split { n, density, seed } => format!("split-n{n}-d{density:.2}-s{seed}"),
            GenSpec::Cograph { n, seed } => format!("cograph-n{n}-s{seed}"),
            GenSpec::Multipartite { parts, seed } => {
                let p: Vec<String> = parts.iter().map(|x| x.to_string()).collect();
                // "x" separator keeps the id safe inside CSV rows
                format!("multipartite-{}-s{seed}", p.join("x"))
            }
            GenSpec::Er { n, density, seed } => format!("er-n{n}-d{density:.2}-s{seed}"),
        }
    }

    /// One manifest line (the inverse of [`parse_manifest`]).
    pub fn manifest_line(&self) -> String {
        match self {
            GenSpec::Split { n, density, seed } => {
                format!("split n={n} density={density:.2} seed={seed}")
            }
            GenSpec::Cograph { n, seed } => format!("cograph n={n} seed={seed}"),
            GenSpec::Multipartite { parts, seed } => {
                let p: Vec<String> = parts.iter().map(|x| x.to_string()).collect();
                format!("multipartite parts={} seed={seed}", p.join(","))
            }
            GenSpec::Er { n, density, seed } => {
                format!("er n={n} density={density:.2} seed={seed}")
            }
        }
    }
}

/// Generates the requested graph, deterministically in the seed.
pub fn generate(spec: &GenSpec) -> Result<Graph, GenError> {
    match spec {
        GenSpec::Split { n, density, seed } => {
            check_density(*density)?;
            if *n == 0 {
                return Err(GenError::BadSpec("split needs n >= 1".into()));
            }
            Ok(gen_split(*n, *density, *seed))
        }
        GenSpec::Cograph { n, seed } => {
            if *n == 0 {
                return Err(GenError::BadSpec("cograph needs n >= 1".into()));
            }
            Ok(gen_cograph(*n, *seed))
        }
        GenSpec::Multipartite { parts, seed: _ } => {
            if parts.is_empty() || parts.contains(&0) {
                return Err(GenError::BadSpec(
                    "multipartite needs nonempty parts".into(),
                ));
            }
            Ok(crate::graph::complete_multipartite(parts))
        }
        GenSpec::Er { n, density, seed } => {
            check_density(*density)?;
            if *n == 0 || *n > ER_MAX_N {
                return Err(GenError::BadSpec(format!("er needs 1 <= n <= {ER_MAX_N}")));
            }
            gen_er_rejection(*n, *density, *seed)
        }
    }
}

fn check_density(d: f64) -> Result<(), GenError> {
    if (0.0..=1.0).contains(&d) {
        Ok(())
    } else {
        Err(GenError::BadSpec(format!("density {d} outside [0,1]")))
    }
}

fn gen_split(n: usize, density: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let clique_size = if n == 1 { 1 } else { rng.gen_range(1..n) };
    let mut g = Graph::new(n);
    for u in 0..clique_size {
        for v in u + 1..clique_size {
            g.add_edge(u, v);
        }
    }
    for s in clique_size..n {
        // anchor edge keeps the graph connected
        let anchor = rng.gen_range(0..clique_size);
        g.add_edge(s, anchor);
        for c in 0..clique_size {
            if c != anchor && rng.gen_bool(density) {
                g.add_edge(s, c);
            }
        }
    }
    g
}

fn gen_cograph(n: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ids: Vec<Vertex> = (0..n).collect();
    // Fisher-Yates
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        ids.swap(i, j);
    }
    let mut g = Graph::new(n);
    cotree(&mut g, &mut ids, &mut rng, true);
    g
}

fn cotree(g: &mut Graph, ids: &mut [Vertex], rng: &mut ChaCha8Rng, force_join: bool) {
    if ids.len() <= 1 {
        return;
    }
    let split = rng.gen_range(1..ids.len());
    let join = force_join || rng.gen_bool(0.5);
    let (left, right) = ids.split_at_mut(split);
    if join {
        for &u in left.iter() {
            for &v in right.iter() {
                g.add_edge(u, v);
            }
        }
    }
    cotree(g, left, rng, false);
    cotree(g, right, rng, false);
}

fn gen_er_rejection(n: usize, density: f64, seed: u64) -> Result<Graph, GenError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..ER_RETRY_LIMIT {
        let mut g = Graph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(density) {
                    g.add_edge(u, v);
                }
            }
        }
        if is_p5_free(&g) {
            return Ok(g);
        }
    }
    Err(GenError::RetryLimitExceeded {
        tries: ER_RETRY_LIMIT,
    })
}

/// Restricts a full k-list instance to uniformly random nonempty sublists
/// of `{1..k}`, reproducibly in the seed.
pub fn random_sublists(g: &Graph, k: u32, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let full: u32 = if k == 0 { 0 } else { u32::MAX >> (32 - k) };
    let lists: Vec<ColourSet> = (0..g.universe())
        .map(|_| {
            let mask = rng.gen_range(1..=full.max(1));
            (1..=k).filter(|c| mask >> (c - 1) & 1 == 1).collect()
        })
        .collect();
    Instance::with_lists(std::sync::Arc::new(g.clone()), k, lists)
}

/// A random valid two-fixed-set configuration for fuzzing the dependency
/// removal machinery: dominators 0 (colour 3) and 1 (colour 4), fixed set
/// A on dominator 0, fixed set B on dominator 1, random edges, random
/// lists over `{1..4}`. `None` when the sampled graph is not P5-free or
/// the setup dies on propagation.
#[cfg(test)]
pub(crate) fn random_pair_setup(
    seed: u64,
) -> Option<(Instance, crate::instance::FixedSetPartition)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let na = rng.gen_range(1..=3);
    let nb = rng.gen_range(1..=3);
    let n = 2 + na + nb;
    let mut g = Graph::new(n);
    g.add_edge(0, 1);
    for v in 2..2 + na {
        g.add_edge(0, v);
        // fixed sets only exclude adjacency to *earlier* dominators, so
        // A members may touch dominator 1
        if rng.gen_bool(0.25) {
            g.add_edge(1, v);
        }
    }
    for v in 2 + na..n {
        g.add_edge(1, v);
    }
    for u in 2..n {
        for v in u + 1..n {
            if rng.gen_bool(0.4) {
                g.add_edge(u, v);
            }
        }
    }
    if !is_p5_free(&g) {
        return None;
    }
    let mut lists = vec![ColourSet::EMPTY; n];
    lists[0] = ColourSet::singleton(3);
    lists[1] = ColourSet::singleton(4);
    for v in 2..n {
        let mask = rng.gen_range(1u32..16);
        lists[v] = (1..=4).filter(|c| mask >> (c - 1) & 1 == 1).collect();
    }
    let inst = Instance::with_lists(std::sync::Arc::new(g), 4, lists)
        .assign(0, 3)
        .assign(1, 4);
    if inst.is_dead() {
        return None;
    }
    let part = inst.fixed_set_partition(&[0, 1]);
    Some((inst, part))
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ManifestError {
    #[error("manifest line {line}: {msg}")]
    Bad { line: usize, msg: String },
}

/// Parses a corpus manifest: one generator spec per line
/// (`family key=value ...`), `#` comments and blank lines ignored.
pub fn parse_manifest(text: &str) -> Result<Vec<GenSpec>, ManifestError> {
    let mut specs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let bad = |msg: &str| ManifestError::Bad {
            line,
            msg: msg.to_string(),
        };
        let mut tokens = trimmed.split_whitespace();
        let family = tokens.next().unwrap();
        let mut n = None;
        let mut density = None;
        let mut seed = None;
        let mut parts: Option<Vec<usize>> = None;
        for tok in tokens {
            let (key, value) = tok
                .split_once('=')
                .ok_or_else(|| bad("expected key=value"))?;
            match key {
                "n" => n = Some(value.parse().map_err(|_| bad("bad n"))?),
                "density" => density = Some(value.parse().map_err(|_| bad("bad density"))?),
                "seed" => seed = Some(value.parse().map_err(|_| bad("bad seed"))?),
                "parts" => {
                    let ps: Result<Vec<usize>, _> =
                        value.split(',').map(|p| p.parse::<usize>()).collect();
                    parts = Some(ps.map_err(|_| bad("bad parts"))?);
                }
                other => return Err(bad(&format!("unknown key `{other}`"))),
            }
        }
        let seed = seed.ok_or_else(|| bad("missing seed"))?;
        let spec = match family {
            "split" => GenSpec::Split {
                n: n.ok_or_else(|| bad("missing n"))?,
                density: density.ok_or_else(|| bad("missing density"))?,
                seed,
            },
            "cograph" => GenSpec::Cograph {
                n: n.ok_or_else(|| bad("missing n"))?,
                seed,
            },
            "multipartite" => GenSpec::Multipartite {
                parts: parts.ok_or_else(|| bad("missing parts"))?,
                seed,
            },
            "er" => GenSpec::Er {
                n: n.ok_or_else(|| bad("missing n"))?,
                density: density.ok_or_else(|| bad("missing density"))?,
                seed,
            },
            other => return Err(bad(&format!("unknown family `{other}`"))),
        };
        specs.push(spec);
    }
    Ok(specs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_multipartite, cycle};
    use std::sync::Arc;

    #[test]
    fn oracle_spot_checks() {
        let c5 = Arc::new(cycle(5));
        let sat = oracle_list_colouring(&Instance::full(Arc::clone(&c5), 3));
        let witness = sat.expect("C5 is 3-colourable");
        for u in 0..5 {
            assert_ne!(witness.get(u), witness.get((u + 1) % 5));
        }
        assert!(oracle_list_colouring(&Instance::full(c5, 2)).is_none());

        let lone = Arc::new(Graph::new(1));
        let empty_list = Instance::with_lists(lone, 2, vec![ColourSet::EMPTY]);
        assert!(oracle_list_colouring(&empty_list).is_none());
    }

    #[test]
    fn oracle_respects_lists() {
        let g = Arc::new(Graph::from_edges(2, &[(0, 1)]));
        let inst =
            Instance::with_lists(g, 2, vec![ColourSet::singleton(1), ColourSet::singleton(1)]);
        assert!(oracle_list_colouring(&inst).is_none());
    }

    #[test]
    fn oracle_invariant_under_relabelling() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for round in 0..50 {
            let g = generate(&GenSpec::Er {
                n: 8,
                density: 0.4,
                seed: round,
            })
            .unwrap();
            let inst = random_sublists(&g, 3, round);
            let mut perm: Vec<Vertex> = (0..8).collect();
            for i in (1..8).rev() {
                let j = rng.gen_range(0..=i);
                perm.swap(i, j);
            }
            let h = relabel(&g, &perm);
            let mut lists = vec![ColourSet::EMPTY; 8];
            for v in 0..8 {
                lists[perm[v]] = inst.list(v);
            }
            let inst_p = Instance::with_lists(Arc::new(h), 3, lists);
            assert_eq!(
                oracle_list_colouring(&inst).is_some(),
                oracle_list_colouring(&inst_p).is_some()
            );
        }
    }

    #[test]
    fn generators_are_deterministic_and_p5_free() {
        for seed in 0..30 {
            let specs = [
                GenSpec::Split {
                    n: 11,
                    density: 0.5,
                    seed,
                },
                GenSpec::Cograph { n: 9, seed },
                GenSpec::Er {
                    n: 9,
                    density: 0.4,
                    seed,
                },
            ];
            for spec in specs {
                let a = generate(&spec).unwrap();
                let b = generate(&spec).unwrap();
                assert_eq!(a, b, "same seed, same graph ({spec:?})");
                assert!(is_p5_free(&a), "{spec:?} emitted a P5");
            }
        }
    }

    #[test]
    fn split_and_cograph_are_connected() {
        for seed in 0..20 {
            let s = generate(&GenSpec::Split {
                n: 10,
                density: 0.3,
                seed,
            })
            .unwrap();
            assert!(s.is_connected());
            let c = generate(&GenSpec::Cograph { n: 10, seed }).unwrap();
            assert!(c.is_connected());
        }
    }

    #[test]
    fn split_graphs_pass_the_brute_force_scan() {
        for seed in 0..25 {
            let g = generate(&GenSpec::Split {
                n: 10,
                density: 0.5,
                seed,
            })
            .unwrap();
            assert!(
                brute_force_find_p5(&g).is_none(),
                "split seed {seed} has a P5"
            );
        }
    }

    #[test]
    fn cographs_have_no_induced_p4() {
        for seed in 0..25 {
            let g = generate(&GenSpec::Cograph { n: 8, seed }).unwrap();
            assert!(!brute_force_has_p4(&g), "cograph seed {seed} has a P4");
        }
    }

    #[test]
    fn multipartite_generator_matches_direct_construction() {
        let g = generate(&GenSpec::Multipartite {
            parts: vec![2, 2, 2],
            seed: 0,
        })
        .unwrap();
        assert_eq!(g, complete_multipartite(&[2, 2, 2]));
    }

    #[test]
    fn random_sublists_reproducible_and_nonempty() {
        let g = cycle(6);
        let a = random_sublists(&g, 4, 7);
        let b = random_sublists(&g, 4, 7);
        for v in 0..6 {
            assert_eq!(a.list(v), b.list(v));
            assert!(!a.list(v).is_empty());
            assert!(a.list(v).is_subset_of(ColourSet::full(4)));
        }
        let ones = random_sublists(&g, 1, 3);
        for v in 0..6 {
            assert_eq!(ones.list(v), ColourSet::singleton(1));
        }
    }

    #[test]
    fn manifest_round_trip() {
        let specs = vec![
            GenSpec::Split {
                n: 12,
                density: 0.4,
                seed: 11,
            },
            GenSpec::Cograph { n: 10, seed: 7 },
            GenSpec::Multipartite {
                parts: vec![2, 3, 2],
                seed: 0,
            },
            GenSpec::Er {
                n: 9,
                density: 0.35,
                seed: 5,
            },
        ];
        let text: String = specs.iter().map(|s| s.manifest_line() + "\n").collect();
        let parsed = parse_manifest(&format!("# corpus\n\n{text}")).unwrap();
        assert_eq!(parsed, specs);
    }

    #[test]
    fn manifest_errors() {
        assert!(parse_manifest("frob n=3 seed=1").is_err());
        assert!(parse_manifest("split n=3 density=0.5").is_err()); // no seed
        assert!(parse_manifest("split n=x density=0.5 seed=1").is_err());
    }

    #[test]
    fn brute_p5_finder_agrees_on_known_graphs() {
        assert!(brute_force_find_p5(&cycle(5)).is_none());
        let cert = brute_force_find_p5(&crate::graph::path(5)).unwrap();
        assert!(cert.validate(&crate::graph::path(5)));
        let cert = brute_force_find_p5(&cycle(6)).unwrap();
        assert!(cert.validate(&cycle(6)));
    }
}
