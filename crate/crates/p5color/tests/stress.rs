//! Randomised end-to-end stress: bigger graphs than the acceptance
//! corpus (up to the oracle cap), both methods, plain and restricted
//! lists, all checked against the brute-force oracle.

use std::sync::Arc;

use rayon::prelude::*;

use p5color::instance::Instance;
use p5color::testkit::{generate, oracle_list_colouring, random_sublists, GenSpec};
use p5color::{solve_list_colouring, verify_colouring, Method, SolveConfig};

#[test]
fn solver_matches_oracle_on_larger_graphs() {
    (0..400u64).into_par_iter().for_each(|seed| {
        let spec = match seed % 3 {
            0 => GenSpec::Split {
                n: 15 + (seed % 4) as usize,
                density: 0.3 + (seed % 5) as f64 * 0.15,
                seed,
            },
            1 => GenSpec::Cograph {
                n: 15 + (seed % 4) as usize,
                seed,
            },
            _ => GenSpec::Er {
                n: 11,
                density: 0.45,
                seed,
            },
        };
        let g = generate(&spec).expect("stress generation");
        for k in 2..=4u32 {
            let restricted = random_sublists(&g, k, seed * 13 + k as u64);
            let full = Instance::full(Arc::new(g.clone()), k);
            for inst in [&restricted, &full] {
                let expect = oracle_list_colouring(inst).is_some();
                for method in [Method::One, Method::Two] {
                    let cfg = SolveConfig::with_method(method);
                    let d = solve_list_colouring(inst, &cfg)
                        .unwrap_or_else(|e| panic!("{spec:?} k={k} {method}: {e}"));
                    assert_eq!(d.is_sat(), expect, "{spec:?} k={k} {method}");
                    if let Some(col) = d.colouring() {
                        assert!(verify_colouring(inst, col));
                    }
                }
            }
        }
    });
}
