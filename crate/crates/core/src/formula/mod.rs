//! (d,k)-CSP formulas over negative literals `(x != c)`.
//!
//! Variables and colors are 1-indexed throughout: a formula on `n`
//! variables with `d` colors ranges over `[d]^n` with `[d] = {1, .., d}`.

mod parse;

use std::fmt;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub use parse::{format_witness, parse_instance, parse_witness, serialize_instance};
pub use parse::{ParseError, ParseErrorKind, Witness};

/// Default upper bound on `d^n` for [`brute_force_solve`].
pub const DEFAULT_BRUTE_FORCE_CAP: u64 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulaError {
    #[error("color count must be at least 2, got {0}")]
    TooFewColors(u32),
    #[error("constraint width bound k must be at least 1")]
    ZeroWidth,
    #[error("constraint {index} has {width} literals, more than k = {k}")]
    ConstraintTooWide {
        index: usize,
        width: usize,
        k: usize,
    },
    #[error(
        "literal (x{var} != {color}) in constraint {index} is out of range for n = {n}, d = {d}"
    )]
    LiteralOutOfRange {
        index: usize,
        var: usize,
        color: u32,
        n: usize,
        d: u32,
    },
    #[error("assignment has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("assignment color {color} at variable {var} is outside 1..={d}")]
    ColorOutOfRange { var: usize, color: u32, d: u32 },
    #[error("cannot choose {k} distinct variables out of {n}")]
    NotEnoughVariables { n: usize, k: usize },
    #[error("brute force needs {d}^{n} assignments, above the cap of {cap}")]
    CapExceeded { d: u32, n: usize, cap: u64 },
}

/// The literal `(x_var != color)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub var: usize,
    pub color: u32,
}

impl Literal {
    pub fn new(var: usize, color: u32) -> Self {
        Self { var, color }
    }

    /// A literal is satisfied iff the variable avoids the excluded color.
    #[inline]
    pub fn is_satisfied_by(&self, colors: &[u32]) -> bool {
        colors[self.var - 1] != self.color
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(x{} != {})", self.var, self.color)
    }
}

/// A disjunction of literals. The empty constraint is unsatisfiable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Constraint {
    pub literals: Vec<Literal>,
}

impl Constraint {
    pub fn new(literals: Vec<Literal>) -> Self {
        Self { literals }
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    /// True iff every literal is falsified, i.e. `colors[x] == c` for all `(x != c)`.
    #[inline]
    pub fn is_falsified_by(&self, colors: &[u32]) -> bool {
        self.literals.iter().all(|lit| !lit.is_satisfied_by(colors))
    }
}

impl FromIterator<Literal> for Constraint {
    fn from_iter<I: IntoIterator<Item = Literal>>(iter: I) -> Self {
        Self::new(iter.into_iter().collect())
    }
}

/// A coloring of the `n` variables, colors in `1..=d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment(Vec<u32>);

impl Assignment {
    pub fn new(colors: Vec<u32>) -> Self {
        Self(colors)
    }

    /// The all-ones assignment, lexicographically smallest in `[d]^n`.
    pub fn ones(n: usize) -> Self {
        Self(vec![1; n])
    }

    pub fn random<R: Rng + ?Sized>(n: usize, d: u32, rng: &mut R) -> Self {
        Self((0..n).map(|_| rng.random_range(1..=d)).collect())
    }

    pub fn colors(&self) -> &[u32] {
        &self.0
    }

    pub fn into_colors(self) -> Vec<u32> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Color of the 1-indexed variable `var`.
    pub fn get(&self, var: usize) -> u32 {
        self.0[var - 1]
    }

    /// Copy with `x_var := color`.
    pub fn with(&self, var: usize, color: u32) -> Self {
        let mut colors = self.0.clone();
        colors[var - 1] = color;
        Self(colors)
    }

    pub fn check(&self, n: usize, d: u32) -> Result<(), FormulaError> {
        if self.0.len() != n {
            return Err(FormulaError::LengthMismatch {
                expected: n,
                got: self.0.len(),
            });
        }
        match self.0.iter().position(|&c| c == 0 || c > d) {
            Some(i) => Err(FormulaError::ColorOutOfRange {
                var: i + 1,
                color: self.0[i],
                d,
            }),
            None => Ok(()),
        }
    }
}

impl From<Vec<u32>> for Assignment {
    fn from(colors: Vec<u32>) -> Self {
        Self(colors)
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for c in &self.0 {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Evaluation {
    Satisfied,
    /// Index of the lowest-index constraint with every literal falsified.
    Unsatisfied(usize),
}

impl Evaluation {
    pub fn is_satisfied(self) -> bool {
        matches!(self, Evaluation::Satisfied)
    }
}

/// A (d,k)-CSP formula. `k` is the declared width bound and is kept even
/// when every constraint happens to be narrower.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Formula {
    n: usize,
    d: u32,
    k: usize,
    constraints: Vec<Constraint>,
}

impl Formula {
    pub fn new(
        n: usize,
        d: u32,
        k: usize,
        constraints: Vec<Constraint>,
    ) -> Result<Self, FormulaError> {
        if d < 2 {
            return Err(FormulaError::TooFewColors(d));
        }
        if k == 0 {
            return Err(FormulaError::ZeroWidth);
        }
        for (index, c) in constraints.iter().enumerate() {
            if c.len() > k {
                return Err(FormulaError::ConstraintTooWide {
                    index,
                    width: c.len(),
                    k,
                });
            }
            if let Some(lit) = c
                .literals
                .iter()
                .find(|l| l.var == 0 || l.var > n || l.color == 0 || l.color > d)
            {
                return Err(FormulaError::LiteralOutOfRange {
                    index,
                    var: lit.var,
                    color: lit.color,
                    n,
                    d,
                });
            }
        }
        Ok(Self {
            n,
            d,
            k,
            constraints,
        })
    }

    /// Formula whose `k` is the widest constraint, but never below 2.
    pub fn with_inferred_width(
        n: usize,
        d: u32,
        constraints: Vec<Constraint>,
    ) -> Result<Self, FormulaError> {
        let k = inferred_width(&constraints);
        Self::new(n, d, k, constraints)
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn num_colors(&self) -> u32 {
        self.d
    }

    pub fn width(&self) -> usize {
        self.k
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn evaluate(&self, a: &Assignment) -> Result<Evaluation, FormulaError> {
        a.check(self.n, self.d)?;
        Ok(match self.first_unsatisfied(a.colors()) {
            Some(i) => Evaluation::Unsatisfied(i),
            None => Evaluation::Satisfied,
        })
    }

    pub fn is_satisfied_by(&self, a: &Assignment) -> bool {
        matches!(self.evaluate(a), Ok(Evaluation::Satisfied))
    }

    /// Lowest-index falsified constraint. `colors` must already be valid.
    #[inline]
    pub fn first_unsatisfied(&self, colors: &[u32]) -> Option<usize> {
        self.constraints
            .iter()
            .position(|c| c.is_falsified_by(colors))
    }

    /// Drops duplicate literals and removes constraints that mention one
    /// variable with two different colors (those can never be falsified).
    pub fn normalize(&self) -> Formula {
        let constraints = self
            .constraints
            .iter()
            .filter_map(|c| {
                let mut kept: Vec<Literal> = Vec::with_capacity(c.len());
                for lit in &c.literals {
                    match kept.iter().find(|l| l.var == lit.var) {
                        Some(prev) if prev.color == lit.color => {}
                        Some(_) => return None,
                        None => kept.push(*lit),
                    }
                }
                Some(Constraint::new(kept))
            })
            .collect();
        Formula {
            n: self.n,
            d: self.d,
            k: self.k,
            constraints,
        }
    }
}

pub(crate) fn inferred_width(constraints: &[Constraint]) -> usize {
    constraints
        .iter()
        .map(Constraint::len)
        .max()
        .unwrap_or(0)
        .max(2)
}

/// Shape of a random instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomParams {
    pub n: usize,
    pub d: u32,
    pub k: usize,
    pub m: usize,
}

/// Uniform random formula with exactly `k` literals on `k` distinct
/// variables per constraint. With `planted`, any constraint falsified by the
/// planted assignment is redrawn, so the result is satisfied by it.
pub fn generate_random(
    params: RandomParams,
    seed: u64,
    planted: Option<&Assignment>,
) -> Result<Formula, FormulaError> {
    let RandomParams { n, d, k, m } = params;
    if d < 2 {
        return Err(FormulaError::TooFewColors(d));
    }
    if k == 0 {
        return Err(FormulaError::ZeroWidth);
    }
    if m > 0 && k > n {
        return Err(FormulaError::NotEnoughVariables { n, k });
    }
    if let Some(p) = planted {
        p.check(n, d)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut constraints = Vec::with_capacity(m);
    for _ in 0..m {
        let constraint = loop {
            let c: Constraint = index::sample(&mut rng, n, k)
                .into_iter()
                .map(|v| Literal::new(v + 1, rng.random_range(1..=d)))
                .collect();
            match planted {
                Some(p) if c.is_falsified_by(p.colors()) => continue,
                _ => break c,
            }
        };
        constraints.push(constraint);
    }
    Formula::new(n, d, k, constraints)
}

/// Lexicographically smallest satisfying assignment, by exhaustive scan.
pub fn brute_force_solve(f: &Formula) -> Result<Option<Assignment>, FormulaError> {
    brute_force_solve_capped(f, DEFAULT_BRUTE_FORCE_CAP)
}

pub fn brute_force_solve_capped(f: &Formula, cap: u64) -> Result<Option<Assignment>, FormulaError> {
    let (n, d) = (f.num_vars(), f.num_colors());
    match (d as u64).checked_pow(n as u32) {
        Some(total) if n <= u32::MAX as usize && total <= cap => {}
        _ => return Err(FormulaError::CapExceeded { d, n, cap }),
    }
    let mut colors = vec![1u32; n];
    loop {
        if f.first_unsatisfied(&colors).is_none() {
            return Ok(Some(Assignment::new(colors)));
        }
        if !advance_lexicographic(&mut colors, d) {
            return Ok(None);
        }
    }
}

/// Steps `colors` to the next element of `[d]^n` in lexicographic order
/// (last coordinate fastest). Returns false after the last element.
pub fn advance_lexicographic(colors: &mut [u32], d: u32) -> bool {
    for c in colors.iter_mut().rev() {
        if *c < d {
            *c += 1;
            return true;
        }
        *c = 1;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lit(v: usize, c: u32) -> Literal {
        Literal::new(v, c)
    }

    fn two_var() -> Formula {
        Formula::new(2, 3, 2, vec![Constraint::new(vec![lit(1, 1), lit(2, 2)])]).unwrap()
    }

    #[test]
    fn evaluate_reports_first_falsified_constraint() {
        let f = two_var();
        assert_eq!(
            f.evaluate(&vec![1, 2].into()).unwrap(),
            Evaluation::Unsatisfied(0)
        );
        assert_eq!(
            f.evaluate(&vec![2, 2].into()).unwrap(),
            Evaluation::Satisfied
        );
    }

    #[test]
    fn empty_constraint_is_never_satisfied() {
        let f = Formula::new(2, 2, 2, vec![Constraint::default()]).unwrap();
        let mut colors = vec![1, 1];
        loop {
            assert_eq!(
                f.evaluate(&colors.clone().into()).unwrap(),
                Evaluation::Unsatisfied(0)
            );
            if !advance_lexicographic(&mut colors, 2) {
                break;
            }
        }
        assert_eq!(brute_force_solve(&f).unwrap(), None);
    }

    #[test]
    fn evaluate_rejects_bad_assignments() {
        let f = two_var();
        assert_eq!(
            f.evaluate(&vec![1].into()),
            Err(FormulaError::LengthMismatch {
                expected: 2,
                got: 1
            })
        );
        assert_eq!(
            f.evaluate(&vec![1, 4].into()),
            Err(FormulaError::ColorOutOfRange {
                var: 2,
                color: 4,
                d: 3
            })
        );
        assert!(f.evaluate(&vec![0, 1].into()).is_err());
    }

    #[test]
    fn new_validates_literals_and_width() {
        assert!(matches!(
            Formula::new(2, 3, 1, vec![Constraint::new(vec![lit(1, 1), lit(2, 2)])]),
            Err(FormulaError::ConstraintTooWide { .. })
        ));
        assert!(matches!(
            Formula::new(2, 3, 2, vec![Constraint::new(vec![lit(3, 1)])]),
            Err(FormulaError::LiteralOutOfRange { .. })
        ));
        assert_eq!(
            Formula::new(1, 1, 2, vec![]),
            Err(FormulaError::TooFewColors(1))
        );
    }

    #[test]
    fn normalize_dedups_and_drops_tautologies() {
        let f = Formula::new(
            2,
            3,
            3,
            vec![
                Constraint::new(vec![lit(1, 1), lit(1, 1)]),
                Constraint::new(vec![lit(1, 1), lit(1, 2)]),
                Constraint::new(vec![lit(2, 3), lit(1, 2), lit(2, 3)]),
            ],
        )
        .unwrap();
        let g = f.normalize();
        assert_eq!(
            g.constraints(),
            &[
                Constraint::new(vec![lit(1, 1)]),
                Constraint::new(vec![lit(2, 3), lit(1, 2)]),
            ]
        );
        assert_eq!(g.normalize(), g);
        assert_eq!(two_var().normalize(), two_var());
    }

    #[test]
    fn brute_force_returns_lexicographically_smallest() {
        let empty = Formula::new(2, 2, 2, vec![]).unwrap();
        assert_eq!(brute_force_solve(&empty).unwrap(), Some(vec![1, 1].into()));
        let f = Formula::new(1, 2, 2, vec![Constraint::new(vec![lit(1, 1)])]).unwrap();
        assert_eq!(brute_force_solve(&f).unwrap(), Some(vec![2].into()));
        assert_eq!(
            brute_force_solve(&two_var()).unwrap(),
            Some(vec![1, 1].into())
        );
    }

    #[test]
    fn brute_force_respects_cap() {
        let f = Formula::new(30, 3, 2, vec![]).unwrap();
        assert!(matches!(
            brute_force_solve(&f),
            Err(FormulaError::CapExceeded { .. })
        ));
        assert!(brute_force_solve_capped(&two_var(), 8).is_err());
        assert!(brute_force_solve_capped(&two_var(), 9).is_ok());
    }

    #[test]
    fn generation_is_deterministic_and_planted() {
        let params = RandomParams {
            n: 5,
            d: 3,
            k: 3,
            m: 20,
        };
        let beta = Assignment::new(vec![3, 1, 2, 2, 1]);
        let a = generate_random(params, 7, Some(&beta)).unwrap();
        let b = generate_random(params, 7, Some(&beta)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 20);
        assert!(a.is_satisfied_by(&beta));
        for c in a.constraints() {
            assert_eq!(c.len(), 3);
            let mut vars: Vec<_> = c.literals.iter().map(|l| l.var).collect();
            vars.sort_unstable();
            vars.dedup();
            assert_eq!(vars.len(), 3);
        }
        let empty = generate_random(RandomParams { m: 0, ..params }, 7, None).unwrap();
        assert!(empty.is_empty());
        assert_ne!(generate_random(params, 8, None).unwrap(), a);
    }

    #[test]
    fn generation_needs_enough_variables() {
        let params = RandomParams {
            n: 2,
            d: 3,
            k: 3,
            m: 1,
        };
        assert_eq!(
            generate_random(params, 0, None),
            Err(FormulaError::NotEnoughVariables { n: 2, k: 3 })
        );
    }
}
