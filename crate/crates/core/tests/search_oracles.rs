mod common;

use proptest::prelude::*;
use skewsearch_core::colorgraph::{assignment_distance, ColorGraph};
use skewsearch_core::covercode::{build_code, DEFAULT_BLOCK_CAP};
use skewsearch_core::formula::{brute_force_solve, generate_random, Assignment, RandomParams};
use skewsearch_core::search::{
    ball_node_bound, det_solve, det_solve_jobs, det_solve_with_code, g_searchball, schoening_solve,
    substream, Outcome, SchoeningOptions, Step, Walk,
};

use common::{arb_formula_in, ball_by_scan, builtin_graphs};

fn small_graphs() -> Vec<ColorGraph> {
    let mut gs = builtin_graphs(3);
    gs.extend(builtin_graphs(4));
    gs.push(ColorGraph::hypercube(1).unwrap());
    gs
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn ball_search_agrees_with_scan(
        f in arb_formula_in(1..6, 2..5, 3, 10),
        seed: u64,
        r in 0usize..5,
        which in 0usize..3,
    ) {
        let d = f.num_colors();
        let graphs = builtin_graphs(d);
        let g = &graphs[which % graphs.len()];
        let alpha = Assignment::random(f.num_vars(), d, &mut substream(seed, 0));
        let (found, stats) = g_searchball(&f, g, &alpha, r).unwrap();
        let in_ball = ball_by_scan(g, &alpha, r as u64);
        let has_solution = in_ball.iter().any(|b| f.is_satisfied_by(b));
        prop_assert_eq!(found.is_some(), has_solution);
        if let Some(w) = found {
            prop_assert!(f.is_satisfied_by(&w));
            prop_assert!(assignment_distance(g, &alpha, &w).unwrap() <= r as u64);
        }
        let delta = g.out_degree() as u64;
        prop_assert!(stats.nodes_visited as u128 <= ball_node_bound(f.width(), delta, r));
        prop_assert_eq!(stats.balls_searched, 1);
    }

    #[test]
    fn det_agrees_with_brute_force(f in arb_formula_in(1..7, 2..5, 3, 14), cycle: bool) {
        let d = f.num_colors();
        let g = if cycle { ColorGraph::directed_cycle(d).unwrap() } else { ColorGraph::complete(d).unwrap() };
        let expected = brute_force_solve(&f).unwrap();
        let got = det_solve(&f, &g, DEFAULT_BLOCK_CAP).unwrap();
        match (&got.outcome, expected) {
            (Outcome::Satisfiable(w), Some(_)) => prop_assert!(f.is_satisfied_by(w)),
            (Outcome::Unsatisfiable, None) => {}
            (o, e) => prop_assert!(false, "det {:?} vs brute force {:?}", o, e),
        }
        let code = build_code(&g, f.num_vars(), f.width(), DEFAULT_BLOCK_CAP).unwrap();
        let bound = ball_node_bound(f.width(), g.out_degree() as u64, code.radius());
        prop_assert!(got.stats.max_ball_nodes as u128 <= bound);
        prop_assert!(got.stats.balls_searched as usize <= code.len());
    }

    #[test]
    fn walk_moves_along_out_edges(f in arb_formula_in(2..8, 2..6, 3, 12), seed: u64, cycle: bool) {
        let d = f.num_colors();
        let g = if cycle { ColorGraph::directed_cycle(d).unwrap() } else { ColorGraph::complete(d).unwrap() };
        let mut rng = substream(seed, 1);
        let mut walk = Walk::random(&f, &g, &mut rng).unwrap();
        for _ in 0..40 {
            let before = walk.current();
            match walk.step(&mut rng) {
                Step::Satisfied => {
                    prop_assert!(f.is_satisfied_by(&before));
                    break;
                }
                Step::Stuck { constraint } => {
                    prop_assert!(f.constraints()[constraint].literals.is_empty());
                    break;
                }
                Step::Moved { constraint, var, from, to } => {
                    prop_assert_eq!(f.first_unsatisfied(before.colors()), Some(constraint));
                    prop_assert!(f.constraints()[constraint].literals.iter().any(|l| l.var == var && l.color == from));
                    prop_assert!(g.neighbors(from).contains(&to));
                    prop_assert_eq!(assignment_distance(&g, &before, &walk.current()).unwrap(), 1);
                }
            }
        }
    }
}

#[test]
fn cycle_walk_distance_to_a_witness_moves_by_one_or_wraps() {
    for d in 3..=5u32 {
        let g = ColorGraph::directed_cycle(d).unwrap();
        let witness = Assignment::new((0..10).map(|i| (i % d) + 1).collect());
        let f = generate_random(
            RandomParams {
                n: 10,
                d,
                k: 3,
                m: 60,
            },
            d as u64,
            Some(&witness),
        )
        .unwrap();
        for rep in 0..50 {
            let mut rng = substream(7, rep);
            let mut walk = Walk::random(&f, &g, &mut rng).unwrap();
            let mut dist = assignment_distance(&g, &walk.current(), &witness).unwrap() as i64;
            while let Step::Moved { .. } = walk.step(&mut rng) {
                let next = assignment_distance(&g, &walk.current(), &witness).unwrap() as i64;
                assert!(
                    next - dist == -1 || next - dist == d as i64 - 1,
                    "d={d}: {dist} -> {next}"
                );
                dist = next;
                if dist == 0 {
                    break;
                }
            }
        }
    }
}

#[test]
fn schoening_finds_planted_solutions() {
    let witness = Assignment::new(vec![2, 3, 1, 1, 2, 3, 3, 2, 1, 2, 1, 3]);
    for seed in 0..5 {
        let f = generate_random(
            RandomParams {
                n: 12,
                d: 3,
                k: 3,
                m: 60,
            },
            seed,
            Some(&witness),
        )
        .unwrap();
        for g in builtin_graphs(3) {
            let opts = SchoeningOptions {
                repetitions: 5_000,
                steps_multiplier: 6,
                seed,
                jobs: 1,
            };
            let res = schoening_solve(&f, &g, &opts).unwrap();
            let w = res
                .outcome
                .witness()
                .expect("planted instance is satisfiable");
            assert!(f.is_satisfied_by(w));
        }
    }
}

#[test]
fn solvers_are_deterministic_across_job_counts() {
    let f = generate_random(
        RandomParams {
            n: 9,
            d: 3,
            k: 3,
            m: 120,
        },
        11,
        None,
    )
    .unwrap();
    for g in small_graphs().into_iter().filter(|g| g.num_colors() == 3) {
        let one = det_solve_jobs(&f, &g, 512, 1).unwrap();
        let four = det_solve_jobs(&f, &g, 512, 4).unwrap();
        assert_eq!(one, four);
        let opts = SchoeningOptions {
            repetitions: 300,
            steps_multiplier: 6,
            seed: 99,
            jobs: 1,
        };
        let a = schoening_solve(&f, &g, &opts).unwrap();
        let b = schoening_solve(&f, &g, &SchoeningOptions { jobs: 3, ..opts }).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn det_exhausts_the_code_on_unsatisfiable_input() {
    // Every pair of colors for variables 1 and 2 is forbidden.
    let mut text = String::from("p csp 3 2 4\n");
    for a in 1..=2 {
        for b in 1..=2 {
            text.push_str(&format!("1 {a} 2 {b} 0\n"));
        }
    }
    let f = skewsearch_core::parse_instance(&text).unwrap();
    assert!(brute_force_solve(&f).unwrap().is_none());
    for g in builtin_graphs(2) {
        let code = build_code(&g, 3, f.width(), DEFAULT_BLOCK_CAP).unwrap();
        let res = det_solve_with_code(&f, &code, 2).unwrap();
        assert_eq!(res.outcome, Outcome::Unsatisfiable);
        assert_eq!(res.stats.balls_searched as usize, code.len());
    }
}
