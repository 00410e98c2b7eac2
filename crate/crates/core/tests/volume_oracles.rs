mod common;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};
use skewsearch_core::colorgraph::{assignment_distance, DistanceProfile};
use skewsearch_core::formula::Assignment;
use skewsearch_core::volume::{
    ball_volume, lower_bound_complete, lower_bound_cycle, ratio, select_radius, shell_counts,
    upper_bound,
};

use common::{all_assignments, builtin_graphs};

fn rational(n: &BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(n.clone()))
}

/// Shell sizes around `center` by scanning the whole space.
fn shells_by_scan(g: &skewsearch_core::ColorGraph, center: &Assignment) -> Vec<u64> {
    let mut shells = Vec::new();
    for b in all_assignments(center.len(), g.num_colors()) {
        let r = assignment_distance(g, center, &b).unwrap() as usize;
        if shells.len() <= r {
            shells.resize(r + 1, 0);
        }
        shells[r] += 1;
    }
    shells
}

#[test]
fn shells_match_enumeration() {
    for d in 2..=4u32 {
        for g in builtin_graphs(d) {
            let p = g.profile().unwrap();
            for n in 0..=6usize {
                let table = shell_counts(&p, n);
                let ones = Assignment::ones(n);
                let skewed = Assignment::new((0..n).map(|i| (i as u32 % d) + 1).collect());
                for center in [ones, skewed] {
                    let scanned: Vec<BigUint> = shells_by_scan(&g, &center)
                        .into_iter()
                        .map(BigUint::from)
                        .collect();
                    assert_eq!(
                        table.counts(),
                        scanned.as_slice(),
                        "{} d={d} n={n}",
                        g.name()
                    );
                }
                assert_eq!(table.total(), BigUint::from(d).pow(n as u32));
            }
        }
    }
}

#[test]
fn generating_function_identity() {
    for d in 2..=4u32 {
        for g in builtin_graphs(d) {
            let p = g.profile().unwrap();
            for n in 0..=8usize {
                let table = shell_counts(&p, n);
                for x in [ratio(1, 2), ratio(1, 3), ratio(1, 6)] {
                    let mut lhs = BigRational::zero();
                    let mut xr = BigRational::one();
                    for t in table.counts() {
                        lhs += rational(t) * &xr;
                        xr *= &x;
                    }
                    let poly: BigRational = p
                        .counts()
                        .iter()
                        .enumerate()
                        .map(|(i, &c)| BigRational::from_integer(c.into()) * Pow::pow(&x, i))
                        .sum();
                    assert_eq!(lhs, Pow::pow(poly, n));
                }
            }
        }
    }
}

#[test]
fn volumes_grow_and_saturate() {
    for d in 2..=4u32 {
        for g in builtin_graphs(d) {
            let p = g.profile().unwrap();
            for n in 0..=5usize {
                let table = shell_counts(&p, n);
                let vols = table.volumes();
                assert!(vols.windows(2).all(|w| w[0] <= w[1]));
                let full = BigUint::from(d).pow(n as u32);
                assert_eq!(vols.last().unwrap(), &full);
                assert_eq!(table.ball_volume(table.max_radius() + 3), full);
                assert_eq!(table.ball_volume(0), BigUint::one());
            }
        }
    }
}

#[test]
fn worked_volume_examples() {
    // Hamming ball of radius 1 in [3]^4, counted point by point.
    let k3 = skewsearch_core::ColorGraph::complete(3).unwrap();
    let scanned = common::ball_by_scan(&k3, &Assignment::ones(4), 1).len();
    assert_eq!(scanned, 9);
    assert_eq!(
        ball_volume(&DistanceProfile::complete(3), 4, 1),
        BigUint::from(9u32)
    );

    let c3 = skewsearch_core::ColorGraph::directed_cycle(3).unwrap();
    let scanned = common::ball_by_scan(&c3, &Assignment::ones(2), 2).len();
    assert_eq!(scanned, 6);
    assert_eq!(
        ball_volume(&DistanceProfile::cycle(3), 2, 2),
        BigUint::from(6u32)
    );
}

#[test]
fn radius_maximizes_score_exhaustively() {
    for d in 2..=4u32 {
        for g in builtin_graphs(d) {
            let p = g.profile().unwrap();
            for n in 0..=6usize {
                let shells = shells_by_scan(&g, &Assignment::ones(n));
                for x in [ratio(1, 6), ratio(1, 3), ratio(1, 2), ratio(1, 1)] {
                    let scores: Vec<BigRational> = shells
                        .iter()
                        .enumerate()
                        .map(|(r, &t)| BigRational::from_integer(t.into()) * Pow::pow(&x, r))
                        .collect();
                    let best = scores.iter().max().unwrap();
                    let expected = scores.iter().position(|s| s == best).unwrap();
                    assert_eq!(select_radius(&p, n, &x).unwrap(), expected);
                }
            }
        }
    }
}

#[test]
fn bound_sandwich() {
    for d in 2..=4u32 {
        for n in 0..=10usize {
            for x in [ratio(1, 6), ratio(1, 3), ratio(1, 2)] {
                let cases = [
                    (
                        DistanceProfile::complete(d),
                        lower_bound_complete(d, n, &x).unwrap(),
                    ),
                    (
                        DistanceProfile::cycle(d),
                        lower_bound_cycle(d, n, &x).unwrap(),
                    ),
                ];
                for (p, low) in cases {
                    let vol = rational(&ball_volume(&p, n, low.radius));
                    assert!(low.bound <= vol, "lower bound d={d} n={n} x={x}");
                    let high = upper_bound(&p, n, low.radius, &x).unwrap();
                    assert!(vol <= high, "upper bound d={d} n={n} x={x}");
                }
            }
        }
    }
}

#[test]
fn upper_bound_worked_example() {
    let p = DistanceProfile::cycle(3);
    let bound = upper_bound(&p, 2, 1, &ratio(1, 2)).unwrap();
    assert_eq!(bound, ratio(49, 8));
    assert!(rational(&ball_volume(&p, 2, 1)) <= bound);
    assert_eq!(ball_volume(&p, 2, 1), BigUint::from(3u32));
    for r in 0..=4 {
        for x in [ratio(1, 1), ratio(1, 5)] {
            assert!(upper_bound(&p, 2, r, &x).unwrap() >= rational(&ball_volume(&p, 2, r)));
        }
    }
    assert_eq!(upper_bound(&p, 4, 2, &ratio(1, 1)).unwrap(), ratio(81, 1));
}

#[test]
fn lower_bound_worked_examples() {
    let b = lower_bound_complete(3, 4, &ratio(1, 6)).unwrap();
    assert!(b.bound <= rational(&ball_volume(&DistanceProfile::complete(3), 4, b.radius)));
    let b = lower_bound_cycle(3, 2, &ratio(1, 3)).unwrap();
    assert!(b.bound <= rational(&ball_volume(&DistanceProfile::cycle(3), 2, b.radius)));
    let tiny = ratio(1, 1_000_000);
    for n in 0..5 {
        let b = lower_bound_complete(4, n, &tiny).unwrap();
        assert_eq!(b.radius, 0);
        assert!(b.bound <= BigRational::one());
    }
}
