mod common;

use proptest::prelude::*;
use skewsearch_core::formula::{
    brute_force_solve, generate_random, parse_instance, serialize_instance, Assignment, Constraint,
    Evaluation, Formula, Literal, RandomParams,
};

use common::all_assignments;

fn arb_formula() -> impl Strategy<Value = Formula> {
    (1usize..6, 2u32..5, 1usize..4).prop_flat_map(|(n, d, k)| {
        let literal = (1..=n, 1..=d).prop_map(|(v, c)| Literal::new(v, c));
        let constraint = prop::collection::vec(literal, 0..=k).prop_map(Constraint::new);
        (
            Just(n),
            Just(d),
            Just(k),
            prop::collection::vec(constraint, 0..8),
        )
            .prop_map(|(n, d, k, cs)| Formula::new(n, d, k, cs).unwrap())
    })
}

/// Satisfaction by definition: every constraint has a literal whose
/// variable avoids the excluded color.
fn satisfies_directly(f: &Formula, a: &Assignment) -> bool {
    f.constraints()
        .iter()
        .all(|c| c.literals.iter().any(|l| a.colors()[l.var - 1] != l.color))
}

proptest! {
    #[test]
    fn serialize_then_parse_is_identity(f in arb_formula()) {
        let text = serialize_instance(&f);
        prop_assert_eq!(parse_instance(&text).unwrap(), f);
    }

    #[test]
    fn generated_formulas_round_trip(n in 3usize..10, d in 2u32..5, k in 1usize..4, m in 0usize..20, seed: u64) {
        let f = generate_random(RandomParams { n, d, k, m }, seed, None).unwrap();
        prop_assert_eq!(parse_instance(&serialize_instance(&f)).unwrap(), f);
    }

    #[test]
    fn normalize_is_idempotent_and_equivalent(f in arb_formula()) {
        let g = f.normalize();
        prop_assert_eq!(g.normalize(), g.clone());
        for a in all_assignments(f.num_vars(), f.num_colors()) {
            prop_assert_eq!(f.is_satisfied_by(&a), g.is_satisfied_by(&a));
        }
        prop_assert_eq!(brute_force_solve(&f).unwrap(), brute_force_solve(&g).unwrap());
    }

    #[test]
    fn evaluate_agrees_with_direct_check(f in arb_formula()) {
        for a in all_assignments(f.num_vars(), f.num_colors()) {
            let direct = satisfies_directly(&f, &a);
            match f.evaluate(&a).unwrap() {
                Evaluation::Satisfied => prop_assert!(direct),
                Evaluation::Unsatisfied(i) => {
                    prop_assert!(!direct);
                    prop_assert!(f.constraints()[i].is_falsified_by(a.colors()));
                    for c in &f.constraints()[..i] {
                        prop_assert!(!c.is_falsified_by(a.colors()));
                    }
                }
            }
        }
    }

    #[test]
    fn brute_force_finds_the_first_solution(f in arb_formula()) {
        let first = all_assignments(f.num_vars(), f.num_colors())
            .into_iter()
            .find(|a| satisfies_directly(&f, a));
        prop_assert_eq!(brute_force_solve(&f).unwrap(), first);
    }

    #[test]
    fn planted_assignment_satisfies(n in 3usize..12, d in 2u32..6, k in 1usize..4, m in 0usize..40, seed: u64) {
        prop_assume!(k <= n);
        let planted = Assignment::new((0..n).map(|i| (i as u32 * 7 + seed as u32) % d + 1).collect());
        let f = generate_random(RandomParams { n, d, k, m }, seed, Some(&planted)).unwrap();
        prop_assert!(f.is_satisfied_by(&planted));
        prop_assert_eq!(f.len(), m);
    }
}
