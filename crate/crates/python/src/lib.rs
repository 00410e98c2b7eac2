//! Python bindings: formulas, color graphs, covering codes, the solvers
//! and the analytic quantities.

use std::fmt::Display;

use num_bigint::BigUint;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use skewsearch_core::analysis;
use skewsearch_core::colorgraph::{assignment_distance, ColorGraph as CoreGraph};
use skewsearch_core::covercode::{
    build_code, verify_cover, CoverCheck, CoveringCode as CoreCode, DEFAULT_BLOCK_CAP,
};
use skewsearch_core::formula::{
    brute_force_solve, generate_random, parse_instance, serialize_instance, Assignment, Constraint,
    Formula as CoreFormula, Literal, RandomParams,
};
use skewsearch_core::search::{
    default_steps_multiplier, det_solve_jobs, g_searchball, schoening_solve, Outcome,
    SchoeningOptions,
};
use skewsearch_core::volume::shell_counts;

fn value_error(e: impl Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A (d,k)-CSP formula. Constraints are lists of `(variable, color)`
/// pairs, each meaning `variable != color`; both are 1-based.
#[pyclass(name = "Formula", frozen)]
struct PyFormula(CoreFormula);

#[pymethods]
impl PyFormula {
    #[new]
    #[pyo3(signature = (n, d, constraints, k=None))]
    fn new(
        n: usize,
        d: u32,
        constraints: Vec<Vec<(usize, u32)>>,
        k: Option<usize>,
    ) -> PyResult<Self> {
        let constraints: Vec<Constraint> = constraints
            .into_iter()
            .map(|c| c.into_iter().map(|(v, col)| Literal::new(v, col)).collect())
            .collect();
        let f = match k {
            Some(k) => CoreFormula::new(n, d, k, constraints),
            None => CoreFormula::with_inferred_width(n, d, constraints),
        };
        f.map(Self).map_err(value_error)
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        parse_instance(text).map(Self).map_err(value_error)
    }

    /// Random formula; with `planted`, it is satisfied by that assignment.
    #[staticmethod]
    #[pyo3(signature = (n, d, k, m, seed, planted=None))]
    fn random(
        n: usize,
        d: u32,
        k: usize,
        m: usize,
        seed: u64,
        planted: Option<Vec<u32>>,
    ) -> PyResult<Self> {
        let planted = planted.map(Assignment::new);
        generate_random(RandomParams { n, d, k, m }, seed, planted.as_ref())
            .map(Self)
            .map_err(value_error)
    }

    fn to_text(&self) -> String {
        serialize_instance(&self.0)
    }

    #[getter]
    fn num_vars(&self) -> usize {
        self.0.num_vars()
    }

    #[getter]
    fn num_colors(&self) -> u32 {
        self.0.num_colors()
    }

    #[getter]
    fn width(&self) -> usize {
        self.0.width()
    }

    fn constraints(&self) -> Vec<Vec<(usize, u32)>> {
        self.0
            .constraints()
            .iter()
            .map(|c| c.literals.iter().map(|l| (l.var, l.color)).collect())
            .collect()
    }

    fn is_satisfied_by(&self, colors: Vec<u32>) -> PyResult<bool> {
        let a = Assignment::new(colors);
        a.check(self.0.num_vars(), self.0.num_colors())
            .map_err(value_error)?;
        Ok(self.0.is_satisfied_by(&a))
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Formula(n={}, d={}, k={}, m={})",
            self.0.num_vars(),
            self.0.num_colors(),
            self.0.width(),
            self.0.len()
        )
    }
}

/// Directed graph on the colors `1..=d`; distances between assignments
/// are sums of per-coordinate shortest-path lengths.
#[pyclass(name = "ColorGraph", frozen)]
struct PyColorGraph(CoreGraph);

#[pymethods]
impl PyColorGraph {
    #[staticmethod]
    fn complete(d: u32) -> PyResult<Self> {
        CoreGraph::complete(d).map(Self).map_err(value_error)
    }

    #[staticmethod]
    fn cycle(d: u32) -> PyResult<Self> {
        CoreGraph::directed_cycle(d).map(Self).map_err(value_error)
    }

    #[staticmethod]
    fn hypercube(dim: u32) -> PyResult<Self> {
        CoreGraph::hypercube(dim).map(Self).map_err(value_error)
    }

    #[staticmethod]
    fn from_edges(d: u32, edges: Vec<(u32, u32)>) -> PyResult<Self> {
        CoreGraph::from_edges(d, &edges)
            .map(Self)
            .map_err(value_error)
    }

    #[getter]
    fn num_colors(&self) -> u32 {
        self.0.num_colors()
    }

    #[getter]
    fn out_degree(&self) -> u32 {
        self.0.out_degree()
    }

    #[getter]
    fn name(&self) -> &'static str {
        self.0.name()
    }

    fn neighbors(&self, color: u32) -> PyResult<Vec<u32>> {
        if !(1..=self.0.num_colors()).contains(&color) {
            return Err(value_error(format!("color {color} out of range")));
        }
        Ok(self.0.neighbors(color).to_vec())
    }

    fn distance(&self, a: Vec<u32>, b: Vec<u32>) -> PyResult<u64> {
        assignment_distance(&self.0, &Assignment::new(a), &Assignment::new(b)).map_err(value_error)
    }

    /// Number of colors at each distance from any fixed color.
    fn profile(&self) -> PyResult<Vec<u64>> {
        self.0
            .profile()
            .map(|p| p.counts().to_vec())
            .map_err(value_error)
    }

    fn __repr__(&self) -> String {
        format!("ColorGraph({}, d={})", self.0.name(), self.0.num_colors())
    }
}

/// Covering code of `[d]^n`, stored as a product of block codes.
#[pyclass(name = "CoveringCode", frozen)]
struct PyCoveringCode(CoreCode);

#[pymethods]
impl PyCoveringCode {
    #[staticmethod]
    #[pyo3(signature = (graph, n, k, block_cap=DEFAULT_BLOCK_CAP))]
    fn build(
        py: Python<'_>,
        graph: &PyColorGraph,
        n: usize,
        k: usize,
        block_cap: u64,
    ) -> PyResult<Self> {
        let g = graph.0.clone();
        py.detach(|| build_code(&g, n, k, block_cap))
            .map(Self)
            .map_err(value_error)
    }

    #[getter]
    fn radius(&self) -> usize {
        self.0.radius()
    }

    #[getter]
    fn blocks(&self) -> Vec<usize> {
        self.0.blocks().to_vec()
    }

    fn codeword(&self, i: usize) -> PyResult<Vec<u32>> {
        if i >= self.0.len() {
            return Err(value_error(format!(
                "index {i} out of range for {} codewords",
                self.0.len()
            )));
        }
        Ok(self.0.codeword(i).into_colors())
    }

    fn codewords(&self) -> Vec<Vec<u32>> {
        self.0.iter().map(Assignment::into_colors).collect()
    }

    /// True iff every point lies in some codeword's ball.
    #[pyo3(signature = (cap=10_000_000))]
    fn verify(&self, py: Python<'_>, cap: u64) -> PyResult<bool> {
        py.detach(|| verify_cover(&self.0, cap))
            .map(|c| c == CoverCheck::Covered)
            .map_err(value_error)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "CoveringCode(n={}, radius={}, len={})",
            self.0.n(),
            self.0.radius(),
            self.0.len()
        )
    }
}

/// Solver answer: `status` is "SAT", "UNSAT" or "UNKNOWN".
#[pyclass(name = "SolveResult", frozen, get_all)]
struct PySolveResult {
    status: &'static str,
    witness: Option<Vec<u32>>,
    nodes: u64,
    balls: u64,
    repetitions: u64,
    steps: u64,
}

#[pymethods]
impl PySolveResult {
    fn __repr__(&self) -> String {
        format!(
            "SolveResult({}, nodes={}, balls={}, repetitions={}, steps={})",
            self.status, self.nodes, self.balls, self.repetitions, self.steps
        )
    }
}

impl From<skewsearch_core::SolveResult> for PySolveResult {
    fn from(r: skewsearch_core::SolveResult) -> Self {
        let (status, witness) = match r.outcome {
            Outcome::Satisfiable(a) => ("SAT", Some(a.into_colors())),
            Outcome::Unsatisfiable => ("UNSAT", None),
            Outcome::NotFound => ("UNKNOWN", None),
        };
        Self {
            status,
            witness,
            nodes: r.stats.nodes_visited,
            balls: r.stats.balls_searched,
            repetitions: r.stats.repetitions,
            steps: r.stats.steps,
        }
    }
}

/// Lexicographically smallest solution, or None.
#[pyfunction]
fn brute_force(f: &PyFormula) -> PyResult<Option<Vec<u32>>> {
    brute_force_solve(&f.0)
        .map(|a| a.map(Assignment::into_colors))
        .map_err(value_error)
}

#[pyfunction]
#[pyo3(signature = (f, graph, block_cap=DEFAULT_BLOCK_CAP, jobs=1))]
fn det_solve(
    py: Python<'_>,
    f: &PyFormula,
    graph: &PyColorGraph,
    block_cap: u64,
    jobs: usize,
) -> PyResult<PySolveResult> {
    py.detach(|| det_solve_jobs(&f.0, &graph.0, block_cap, jobs))
        .map(PySolveResult::from)
        .map_err(value_error)
}

#[pyfunction]
#[pyo3(signature = (f, graph, repetitions, seed, steps_multiplier=None, jobs=1))]
fn schoening(
    py: Python<'_>,
    f: &PyFormula,
    graph: &PyColorGraph,
    repetitions: u64,
    seed: u64,
    steps_multiplier: Option<u64>,
    jobs: usize,
) -> PyResult<PySolveResult> {
    let opts = SchoeningOptions {
        repetitions,
        steps_multiplier: steps_multiplier
            .unwrap_or_else(|| default_steps_multiplier(f.0.num_colors())),
        seed,
        jobs,
    };
    py.detach(|| schoening_solve(&f.0, &graph.0, &opts))
        .map(PySolveResult::from)
        .map_err(value_error)
}

/// Searches the ball of radius `r` around `center`; returns the witness
/// found (or None) and the number of nodes visited.
#[pyfunction]
fn search_ball(
    f: &PyFormula,
    graph: &PyColorGraph,
    center: Vec<u32>,
    r: usize,
) -> PyResult<(Option<Vec<u32>>, u64)> {
    let (found, stats) =
        g_searchball(&f.0, &graph.0, &Assignment::new(center), r).map_err(value_error)?;
    Ok((found.map(Assignment::into_colors), stats.nodes_visited))
}

/// Exact number of points at each distance `0..` from a fixed center.
#[pyfunction]
fn shells(graph: &PyColorGraph, n: usize) -> PyResult<Vec<BigUint>> {
    let p = graph.0.profile().map_err(value_error)?;
    Ok(shell_counts(&p, n).counts().to_vec())
}

#[pyfunction]
fn ball_volume(graph: &PyColorGraph, n: usize, r: usize) -> PyResult<BigUint> {
    let p = graph.0.profile().map_err(value_error)?;
    Ok(shell_counts(&p, n).ball_volume(r))
}

/// Per-variable bases `(schoening, det_complete, det_cycle)`.
#[pyfunction]
fn bases(d: u32, k: u32) -> PyResult<(f64, f64, f64)> {
    let r = analysis::BaseReport::new(d, k).map_err(value_error)?;
    Ok((
        r.schoening_base(),
        r.det_complete_base(),
        r.det_cycle_base(),
    ))
}

#[pyfunction]
fn base_for_graph(graph: &PyColorGraph, k: u32) -> PyResult<f64> {
    let p = graph.0.profile().map_err(value_error)?;
    analysis::base_for_graph(&p, k).map_err(value_error)
}

/// `(lambda, residual)` for the walk's distance chain.
#[pyfunction]
fn solve_lambda(d: u32, k: u32) -> PyResult<(f64, f64)> {
    analysis::solve_lambda(d, k)
        .map(|s| (s.lambda, s.residual))
        .map_err(value_error)
}

#[pyfunction]
fn reach_probability(d: u32, k: u32, j: u32) -> PyResult<f64> {
    analysis::reach_probability(d, k, j).map_err(value_error)
}

/// `(frequency, standard_error)` of reaching 0 from `j` within `max_steps`.
#[pyfunction]
fn markov_simulate(
    py: Python<'_>,
    d: u32,
    k: u32,
    j: u64,
    max_steps: u64,
    trials: u64,
    seed: u64,
) -> PyResult<(f64, f64)> {
    py.detach(|| analysis::markov_simulate(d, k, j, max_steps, trials, seed))
        .map(|e| (e.frequency, e.std_error))
        .map_err(value_error)
}

#[pymodule]
fn skewsearch(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFormula>()?;
    m.add_class::<PyColorGraph>()?;
    m.add_class::<PyCoveringCode>()?;
    m.add_class::<PySolveResult>()?;
    m.add_function(wrap_pyfunction!(brute_force, m)?)?;
    m.add_function(wrap_pyfunction!(det_solve, m)?)?;
    m.add_function(wrap_pyfunction!(schoening, m)?)?;
    m.add_function(wrap_pyfunction!(search_ball, m)?)?;
    m.add_function(wrap_pyfunction!(shells, m)?)?;
    m.add_function(wrap_pyfunction!(ball_volume, m)?)?;
    m.add_function(wrap_pyfunction!(bases, m)?)?;
    m.add_function(wrap_pyfunction!(base_for_graph, m)?)?;
    m.add_function(wrap_pyfunction!(solve_lambda, m)?)?;
    m.add_function(wrap_pyfunction!(reach_probability, m)?)?;
    m.add_function(wrap_pyfunction!(markov_simulate, m)?)?;
    Ok(())
}
