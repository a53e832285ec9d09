//! Exhaustive small-scale sweeps: every labelled graph on six vertices
//! (detector vs brute force, solver vs oracle), and every list
//! assignment over two colours on every P5-free five-vertex graph.

use std::sync::Arc;

use rayon::prelude::*;

use p5color::colour::ColourSet;
use p5color::graph::Graph;
use p5color::instance::Instance;
use p5color::p5::find_induced_p5;
use p5color::testkit::{brute_force_find_p5, oracle_list_colouring};
use p5color::{solve_list_colouring, verify_colouring, Method, SolveConfig};

fn graph_from_mask(n: usize, mask: u32) -> Graph {
    let mut g = Graph::new(n);
    let mut bit = 0;
    for u in 0..n {
        for v in u + 1..n {
            if mask >> bit & 1 == 1 {
                g.add_edge(u, v);
            }
            bit += 1;
        }
    }
    g
}

#[test]
fn every_six_vertex_graph() {
    let configs = [
        SolveConfig::with_method(Method::One),
        SolveConfig::with_method(Method::Two),
    ];
    (0u32..1 << 15).into_par_iter().for_each(|mask| {
        let g = graph_from_mask(6, mask);
        // detection agrees with the exhaustive scan on every graph
        let brute = brute_force_find_p5(&g);
        match find_induced_p5(&g) {
            Some(cert) => {
                assert!(cert.validate(&g), "mask {mask}: bad certificate");
                assert!(brute.is_some(), "mask {mask}: false positive");
                return; // solver contract covers P5-free inputs
            }
            None => assert!(brute.is_none(), "mask {mask}: missed P5"),
        }
        for k in 1..=3u32 {
            let inst = Instance::full(Arc::new(g.clone()), k);
            let expect = oracle_list_colouring(&inst).is_some();
            for cfg in &configs {
                let d = solve_list_colouring(&inst, cfg)
                    .unwrap_or_else(|e| panic!("mask {mask} k={k} {}: {e}", cfg.method));
                assert_eq!(d.is_sat(), expect, "mask {mask} k={k} {}", cfg.method);
                if let Some(col) = d.colouring() {
                    assert!(verify_colouring(&inst, col));
                }
            }
        }
    });
}

#[test]
fn every_two_colour_list_assignment_on_five_vertices() {
    let lists2: [ColourSet; 3] = [
        ColourSet::singleton(1),
        ColourSet::singleton(2),
        [1, 2].into_iter().collect(),
    ];
    let configs = [
        SolveConfig::with_method(Method::One),
        SolveConfig::with_method(Method::Two),
    ];
    (0u32..1 << 10).into_par_iter().for_each(|mask| {
        let g = graph_from_mask(5, mask);
        if find_induced_p5(&g).is_some() {
            return;
        }
        let g = Arc::new(g);
        for combo in 0..3u32.pow(5) {
            let mut c = combo;
            let lists: Vec<ColourSet> = (0..5)
                .map(|_| {
                    let l = lists2[(c % 3) as usize];
                    c /= 3;
                    l
                })
                .collect();
            let inst = Instance::with_lists(Arc::clone(&g), 2, lists);
            let expect = oracle_list_colouring(&inst).is_some();
            for cfg in &configs {
                let d = solve_list_colouring(&inst, cfg)
                    .unwrap_or_else(|e| panic!("mask {mask} combo {combo}: {e}"));
                assert_eq!(d.is_sat(), expect, "mask {mask} combo {combo} {}", cfg.method);
            }
        }
    });
}
