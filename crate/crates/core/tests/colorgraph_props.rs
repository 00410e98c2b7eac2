mod common;

use proptest::prelude::*;
use skewsearch_core::colorgraph::{assignment_distance, ColorGraph};
use skewsearch_core::formula::Assignment;

use common::{all_assignments, builtin_graphs};

fn arb_triple(n: usize, d: u32) -> impl Strategy<Value = [Assignment; 3]> {
    let point = prop::collection::vec(1..=d, n).prop_map(Assignment::new);
    [point.clone(), point.clone(), point]
}

#[test]
fn hamming_distance_on_complete_graph() {
    for d in 2..=4 {
        let g = ColorGraph::complete(d).unwrap();
        for n in 0..=3 {
            let points = all_assignments(n, d);
            for a in &points {
                for b in &points {
                    let hamming = a
                        .colors()
                        .iter()
                        .zip(b.colors())
                        .filter(|(x, y)| x != y)
                        .count();
                    assert_eq!(assignment_distance(&g, a, b).unwrap(), hamming as u64);
                }
            }
        }
    }
}

#[test]
fn hypercube_profile_matches_bit_flips() {
    // In Q_ell the distance between colors is the popcount of (a-1) xor (b-1).
    for ell in 1..=4u32 {
        let g = ColorGraph::hypercube(ell).unwrap();
        let d = 1u32 << ell;
        for a in 1..=d {
            for b in 1..=d {
                assert_eq!(g.distance(a, b), Some(((a - 1) ^ (b - 1)).count_ones()));
            }
        }
        let binomial: Vec<u64> = (0..=ell as u64)
            .map(|i| (0..i).fold(1, |acc, j| acc * (ell as u64 - j) / (j + 1)))
            .collect();
        assert_eq!(g.profile().unwrap().counts(), binomial.as_slice());
    }
    assert_eq!(
        ColorGraph::hypercube(3)
            .unwrap()
            .profile()
            .unwrap()
            .counts(),
        &[1, 3, 3, 1]
    );
}

#[test]
fn builtin_profiles() {
    for d in 2..=9 {
        let cycle = ColorGraph::directed_cycle(d).unwrap().profile().unwrap();
        assert_eq!(cycle.counts(), vec![1; d as usize].as_slice());
        let complete = ColorGraph::complete(d).unwrap().profile().unwrap();
        assert_eq!(complete.counts(), &[1, d as u64 - 1]);
        for g in builtin_graphs(d) {
            let p = g.profile().unwrap();
            assert_eq!(p.counts().iter().sum::<u64>(), d as u64);
            assert_eq!(p.delta(), g.out_degree() as u64);
            for (i, &c) in p.counts().iter().enumerate() {
                assert!(c <= p.delta().pow(i as u32));
            }
        }
    }
}

proptest! {
    #[test]
    fn triangle_inequality(
        (d, [a, b, c]) in (2u32..6, 1usize..6).prop_flat_map(|(d, n)| (Just(d), arb_triple(n, d)))
    ) {
        for g in builtin_graphs(d) {
            let ab = assignment_distance(&g, &a, &b).unwrap();
            let bc = assignment_distance(&g, &b, &c).unwrap();
            let ac = assignment_distance(&g, &a, &c).unwrap();
            prop_assert!(ac <= ab + bc);
            if g.name() != "cycle" || d == 2 {
                prop_assert_eq!(ab, assignment_distance(&g, &b, &a).unwrap());
            }
        }
    }
}
