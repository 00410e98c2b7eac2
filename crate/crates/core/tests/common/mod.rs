#![allow(dead_code)]

use skewsearch_core::colorgraph::{assignment_distance, ColorGraph};
use skewsearch_core::formula::Assignment;

/// Every point of `[d]^n` in lexicographic order.
pub fn all_assignments(n: usize, d: u32) -> Vec<Assignment> {
    let mut out = Vec::new();
    let mut colors = vec![1u32; n];
    loop {
        out.push(Assignment::new(colors.clone()));
        let mut i = n;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if colors[i] < d {
                colors[i] += 1;
                break;
            }
            colors[i] = 1;
        }
    }
}

/// Ball members by exhaustive scan with the product distance.
pub fn ball_by_scan(g: &ColorGraph, alpha: &Assignment, r: u64) -> Vec<Assignment> {
    all_assignments(alpha.len(), g.num_colors())
        .into_iter()
        .filter(|b| matches!(assignment_distance(g, alpha, b), Ok(dist) if dist <= r))
        .collect()
}

pub fn builtin_graphs(d: u32) -> Vec<ColorGraph> {
    let mut gs = vec![
        ColorGraph::complete(d).unwrap(),
        ColorGraph::directed_cycle(d).unwrap(),
    ];
    if d.is_power_of_two() {
        gs.push(ColorGraph::hypercube(d.trailing_zeros()).unwrap());
    }
    gs
}

/// Formulas over `n` variables in `lo_n..hi_n`, `d` colors in `lo_d..hi_d`,
/// width up to `max_k` and at most `max_m` constraints.
pub fn arb_formula_in(
    n: std::ops::Range<usize>,
    d: std::ops::Range<u32>,
    max_k: usize,
    max_m: usize,
) -> impl proptest::strategy::Strategy<Value = skewsearch_core::Formula> {
    use proptest::prelude::*;
    use skewsearch_core::formula::{Constraint, Formula, Literal};
    (n, d, 1..=max_k).prop_flat_map(move |(n, d, k)| {
        let literal = (1..=n, 1..=d).prop_map(|(v, c)| Literal::new(v, c));
        let constraint = prop::collection::vec(literal, 1..=k).prop_map(Constraint::new);
        (
            Just(n),
            Just(d),
            Just(k),
            prop::collection::vec(constraint, 0..=max_m),
        )
            .prop_map(|(n, d, k, cs)| Formula::new(n, d, k, cs).unwrap())
    })
}
