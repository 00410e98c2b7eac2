//! Local search over `G^{box n}`: recursive ball search, the randomized
//! walk, and the two solver drivers built on them.
//!
//! Both drivers pick the lowest-index falsified constraint whenever "any
//! unsatisfied constraint" is called for, so runs are reproducible.

use std::ops::{Add, AddAssign};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::colorgraph::{ColorGraph, GraphError};
use crate::covercode::{build_code, CodeError, CoveringCode};
use crate::formula::{Assignment, Formula, FormulaError, Witness};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error("formula has {formula} colors but the graph has {graph}")]
    ColorMismatch { formula: u32, graph: u32 },
    #[error("code covers {code} variables but the formula has {formula}")]
    CodeLengthMismatch { code: usize, formula: usize },
    #[error("color {0} has no out-neighbor, the walk cannot move")]
    NoOutNeighbor(u32),
    #[error("repetitions must be at least 1")]
    NoRepetitions,
    #[error("could not start worker pool: {0}")]
    Pool(String),
    #[error("search produced an assignment that does not satisfy the formula")]
    Unsound,
}

/// Work counters. Merging adds everything except `max_ball_nodes`, which
/// takes the maximum.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct SearchStats {
    /// Ball-search invocations, counting the root of each ball.
    pub nodes_visited: u64,
    /// Codewords whose ball was searched.
    pub balls_searched: u64,
    /// Randomized restarts used.
    pub repetitions: u64,
    /// Recoloring steps of the randomized walk.
    pub steps: u64,
    /// Largest node count of a single ball.
    pub max_ball_nodes: u64,
}

impl AddAssign for SearchStats {
    fn add_assign(&mut self, o: Self) {
        self.nodes_visited += o.nodes_visited;
        self.balls_searched += o.balls_searched;
        self.repetitions += o.repetitions;
        self.steps += o.steps;
        self.max_ball_nodes = self.max_ball_nodes.max(o.max_ball_nodes);
    }
}

impl Add for SearchStats {
    type Output = Self;
    fn add(mut self, o: Self) -> Self {
        self += o;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Satisfiable(Assignment),
    /// Proven by exhausting a covering code.
    Unsatisfiable,
    /// The randomized solver gave up.
    NotFound,
}

impl Outcome {
    pub fn witness(&self) -> Option<&Assignment> {
        match self {
            Outcome::Satisfiable(a) => Some(a),
            _ => None,
        }
    }

    pub fn to_witness(&self) -> Witness {
        match self {
            Outcome::Satisfiable(a) => Witness::Satisfiable(a.clone()),
            Outcome::Unsatisfiable => Witness::Unsatisfiable,
            Outcome::NotFound => Witness::Unknown,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub outcome: Outcome,
    pub stats: SearchStats,
}

fn check_colors(f: &Formula, g: &ColorGraph) -> Result<(), SearchError> {
    if f.num_colors() != g.num_colors() {
        return Err(SearchError::ColorMismatch {
            formula: f.num_colors(),
            graph: g.num_colors(),
        });
    }
    Ok(())
}

fn verified(f: &Formula, a: Assignment) -> Result<Outcome, SearchError> {
    if f.is_satisfied_by(&a) {
        Ok(Outcome::Satisfiable(a))
    } else {
        Err(SearchError::Unsound)
    }
}

/// Largest node count a ball of radius `r` can produce when each node
/// branches at most `k * delta` ways: `sum_{i<=r} (k delta)^i`.
pub fn ball_node_bound(k: usize, delta: u64, r: usize) -> u128 {
    let b = k as u128 * delta as u128;
    let mut total: u128 = 0;
    let mut power: u128 = 1;
    for _ in 0..=r {
        total = total.saturating_add(power);
        power = power.saturating_mul(b);
    }
    total
}

fn ball_rec(f: &Formula, g: &ColorGraph, colors: &mut [u32], r: usize, nodes: &mut u64) -> bool {
    *nodes += 1;
    let Some(ci) = f.first_unsatisfied(colors) else {
        return true;
    };
    if r == 0 {
        return false;
    }
    for lit in &f.constraints()[ci].literals {
        let slot = lit.var - 1;
        let old = colors[slot];
        for &next in g.neighbors(old) {
            colors[slot] = next;
            if ball_rec(f, g, colors, r - 1, nodes) {
                return true;
            }
        }
        colors[slot] = old;
    }
    false
}

/// Searches the ball `{beta : dist_G(alpha, beta) <= r}` for a satisfying
/// assignment by branching on the first falsified constraint: for each of
/// its literals `(x != c)` in order, try every out-neighbor of `c`.
pub fn g_searchball(
    f: &Formula,
    g: &ColorGraph,
    alpha: &Assignment,
    r: usize,
) -> Result<(Option<Assignment>, SearchStats), SearchError> {
    check_colors(f, g)?;
    alpha.check(f.num_vars(), f.num_colors())?;
    let (found, stats) = search_ball_unchecked(f, g, alpha, r);
    let witness = match found {
        Some(a) => match verified(f, a)? {
            Outcome::Satisfiable(a) => Some(a),
            _ => unreachable!(),
        },
        None => None,
    };
    Ok((witness, stats))
}

fn search_ball_unchecked(
    f: &Formula,
    g: &ColorGraph,
    alpha: &Assignment,
    r: usize,
) -> (Option<Assignment>, SearchStats) {
    let mut colors = alpha.colors().to_vec();
    let mut nodes = 0;
    let found = ball_rec(f, g, &mut colors, r, &mut nodes);
    let stats = SearchStats {
        nodes_visited: nodes,
        balls_searched: 1,
        max_ball_nodes: nodes,
        ..Default::default()
    };
    (found.then(|| Assignment::new(colors)), stats)
}

/// Hamming-ball search, i.e. [`g_searchball`] over the complete graph.
pub fn searchball(
    f: &Formula,
    alpha: &Assignment,
    r: usize,
) -> Result<(Option<Assignment>, SearchStats), SearchError> {
    let g = ColorGraph::complete(f.num_colors())?;
    g_searchball(f, &g, alpha, r)
}

/// One move of the randomized walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    Satisfied,
    Moved {
        constraint: usize,
        var: usize,
        from: u32,
        to: u32,
    },
    /// The first falsified constraint is empty; the walk cannot continue.
    Stuck {
        constraint: usize,
    },
}

/// Randomized local search state: repeatedly pick a uniform literal of the
/// first falsified constraint and move its variable to a uniform
/// out-neighbor of its current color.
#[derive(Debug, Clone)]
pub struct Walk<'a> {
    f: &'a Formula,
    g: &'a ColorGraph,
    colors: Vec<u32>,
}

impl<'a> Walk<'a> {
    pub fn new(f: &'a Formula, g: &'a ColorGraph, start: Assignment) -> Result<Self, SearchError> {
        check_colors(f, g)?;
        if let Some(c) = (1..=g.num_colors()).find(|&c| g.neighbors(c).is_empty()) {
            return Err(SearchError::NoOutNeighbor(c));
        }
        start.check(f.num_vars(), f.num_colors())?;
        Ok(Self {
            f,
            g,
            colors: start.into_colors(),
        })
    }

    pub fn random<R: Rng + ?Sized>(
        f: &'a Formula,
        g: &'a ColorGraph,
        rng: &mut R,
    ) -> Result<Self, SearchError> {
        let start = Assignment::random(f.num_vars(), f.num_colors(), rng);
        Self::new(f, g, start)
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    pub fn current(&self) -> Assignment {
        Assignment::new(self.colors.clone())
    }

    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Step {
        let Some(ci) = self.f.first_unsatisfied(&self.colors) else {
            return Step::Satisfied;
        };
        let lits = &self.f.constraints()[ci].literals;
        if lits.is_empty() {
            return Step::Stuck { constraint: ci };
        }
        let lit = lits[rng.random_range(0..lits.len())];
        let from = self.colors[lit.var - 1];
        let nbrs = self.g.neighbors(from);
        let to = nbrs[rng.random_range(0..nbrs.len())];
        self.colors[lit.var - 1] = to;
        Step::Moved {
            constraint: ci,
            var: lit.var,
            from,
            to,
        }
    }
}

/// One randomized run from a uniform start, at most `steps` moves.
/// Returns the witness (if any) and the number of moves made.
pub fn schoening_run<R: Rng + ?Sized>(
    f: &Formula,
    g: &ColorGraph,
    steps: u64,
    rng: &mut R,
) -> Result<(Option<Assignment>, u64), SearchError> {
    let mut walk = Walk::random(f, g, rng)?;
    let mut taken = 0;
    while taken < steps {
        match walk.step(rng) {
            Step::Satisfied => return Ok((Some(walk.current()), taken)),
            Step::Stuck { .. } => return Ok((None, taken)),
            Step::Moved { .. } => taken += 1,
        }
    }
    // The position after the last move still gets checked.
    let done = f.first_unsatisfied(walk.colors()).is_none();
    Ok((done.then(|| walk.current()), taken))
}

/// Default walk length multiplier `c` in `c * n` steps: `3 (d - 1)`.
pub fn default_steps_multiplier(d: u32) -> u64 {
    3 * (d as u64 - 1)
}

/// RNG for repetition `index` of a seeded run; each index is its own stream.
pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SchoeningOptions {
    pub repetitions: u64,
    pub steps_multiplier: u64,
    pub seed: u64,
    pub jobs: usize,
}

fn worker_pool(jobs: usize) -> Result<rayon::ThreadPool, SearchError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| SearchError::Pool(e.to_string()))
}

/// Evaluates `work(i)` for `i` in `0..count` in ordered chunks and stops at
/// the first success, so results and stats do not depend on `jobs`.
fn first_success<T: Send>(
    count: u64,
    jobs: usize,
    work: impl Fn(u64) -> Result<(Option<T>, SearchStats), SearchError> + Sync,
) -> Result<(Option<T>, SearchStats), SearchError> {
    let mut total = SearchStats::default();
    if jobs <= 1 {
        for i in 0..count {
            let (found, stats) = work(i)?;
            total += stats;
            if found.is_some() {
                return Ok((found, total));
            }
        }
        return Ok((None, total));
    }
    let pool = worker_pool(jobs)?;
    let chunk = jobs as u64 * 16;
    let mut start = 0;
    while start < count {
        let end = (start + chunk).min(count);
        let results: Vec<_> = pool.install(|| (start..end).into_par_iter().map(&work).collect());
        for r in results {
            let (found, stats) = r?;
            total += stats;
            if found.is_some() {
                return Ok((found, total));
            }
        }
        start = end;
    }
    Ok((None, total))
}

/// Repeats [`schoening_run`] with `c * n` steps on independent substreams
/// of `seed` until a witness appears or the repetitions run out.
pub fn schoening_solve(
    f: &Formula,
    g: &ColorGraph,
    opts: &SchoeningOptions,
) -> Result<SolveResult, SearchError> {
    if opts.repetitions == 0 {
        return Err(SearchError::NoRepetitions);
    }
    check_colors(f, g)?;
    let steps = opts.steps_multiplier * f.num_vars() as u64;
    let (found, stats) = first_success(opts.repetitions, opts.jobs, |i| {
        let mut rng = substream(opts.seed, i);
        let (found, taken) = schoening_run(f, g, steps, &mut rng)?;
        Ok((
            found,
            SearchStats {
                repetitions: 1,
                steps: taken,
                ..Default::default()
            },
        ))
    })?;
    let outcome = match found {
        Some(a) => verified(f, a)?,
        None => Outcome::NotFound,
    };
    Ok(SolveResult { outcome, stats })
}

/// Deterministic solver: build the covering code for `g` and search every
/// codeword's ball in order. Exhausting the code proves unsatisfiability.
pub fn det_solve(f: &Formula, g: &ColorGraph, block_cap: u64) -> Result<SolveResult, SearchError> {
    det_solve_jobs(f, g, block_cap, 1)
}

pub fn det_solve_jobs(
    f: &Formula,
    g: &ColorGraph,
    block_cap: u64,
    jobs: usize,
) -> Result<SolveResult, SearchError> {
    check_colors(f, g)?;
    let code = build_code(g, f.num_vars(), f.width(), block_cap)?;
    det_solve_with_code(f, &code, jobs)
}

/// [`det_solve`] over a prebuilt code, which must cover `[d]^n`.
pub fn det_solve_with_code(
    f: &Formula,
    code: &CoveringCode,
    jobs: usize,
) -> Result<SolveResult, SearchError> {
    let g = code.graph();
    check_colors(f, g)?;
    if code.n() != f.num_vars() {
        return Err(SearchError::CodeLengthMismatch {
            code: code.n(),
            formula: f.num_vars(),
        });
    }
    let r = code.radius();
    let (found, stats) = first_success(code.len() as u64, jobs, |i| {
        Ok(search_ball_unchecked(f, g, &code.codeword(i as usize), r))
    })?;
    let outcome = match found {
        Some(a) => verified(f, a)?,
        None => Outcome::Unsatisfiable,
    };
    Ok(SolveResult { outcome, stats })
}
