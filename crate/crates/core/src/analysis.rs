//! Per-variable running-time bases and the random-walk quantities behind
//! them.
//!
//! All bases are computed as exact rationals first; the `f64` accessors are
//! for display and tolerance checks.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive, Zero};
use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::colorgraph::{DistanceProfile, GraphKind};
use crate::search::substream;
use crate::volume::shell_counts;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("need d >= 2 and k >= 2, got d = {d}, k = {k}")]
    BadParameters { d: u32, k: u32 },
    #[error("markov simulation needs at least one trial")]
    NoTrials,
}

fn check(d: u32, k: u32) -> Result<(), AnalysisError> {
    if d < 2 || k < 2 {
        Err(AnalysisError::BadParameters { d, k })
    } else {
        Ok(())
    }
}

fn q(num: impl Into<BigInt>, den: impl Into<BigInt>) -> BigRational {
    BigRational::new(num.into(), den.into())
}

fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().expect("finite rational")
}

/// `d (k-1) / k`, the randomized walk's base.
pub fn base_schoening_exact(d: u32, k: u32) -> Result<BigRational, AnalysisError> {
    check(d, k)?;
    Ok(q(d as u64 * (k as u64 - 1), k))
}

/// `d k / (k+1)`, covering codes over Hamming balls.
pub fn base_det_complete_exact(d: u32, k: u32) -> Result<BigRational, AnalysisError> {
    check(d, k)?;
    Ok(q(d as u64 * k as u64, k as u64 + 1))
}

/// `d (k-1)/k * k^d / (k^d - 1)`, covering codes over directed-cycle balls.
pub fn base_det_cycle_exact(d: u32, k: u32) -> Result<BigRational, AnalysisError> {
    let walk = base_schoening_exact(d, k)?;
    let kd = Pow::pow(BigInt::from(k), d);
    Ok(walk * q(kd.clone(), kd - 1))
}

/// `d / sum_i d_i (k d_1)^{-i}`, the base of code-plus-search with the
/// graph's profile at `x = 1/(k d_1)`.
pub fn base_for_graph_exact(p: &DistanceProfile, k: u32) -> Result<BigRational, AnalysisError> {
    check(p.num_colors(), k)?;
    let step = q(1, k as u64 * p.delta().max(1));
    let mut denom = BigRational::zero();
    let mut power = BigRational::one();
    for (i, &c) in p.counts().iter().enumerate() {
        if i > 0 {
            power *= &step;
        }
        denom += BigRational::from_integer(c.into()) * &power;
    }
    Ok(BigRational::from_integer(p.num_colors().into()) / denom)
}

pub fn base_schoening(d: u32, k: u32) -> Result<f64, AnalysisError> {
    base_schoening_exact(d, k).map(|b| to_f64(&b))
}

pub fn base_det_complete(d: u32, k: u32) -> Result<f64, AnalysisError> {
    base_det_complete_exact(d, k).map(|b| to_f64(&b))
}

pub fn base_det_cycle(d: u32, k: u32) -> Result<f64, AnalysisError> {
    base_det_cycle_exact(d, k).map(|b| to_f64(&b))
}

pub fn base_for_graph(p: &DistanceProfile, k: u32) -> Result<f64, AnalysisError> {
    base_for_graph_exact(p, k).map(|b| to_f64(&b))
}

/// Rounds a base up to three decimals, the convention for stating
/// `O(b^n)` bounds with a short constant.
pub fn round_up_3(x: &BigRational) -> f64 {
    let scaled = (x * BigRational::from_integer(1000.into())).ceil();
    to_f64(&(scaled / BigRational::from_integer(1000.into())))
}

/// True iff the profile's base is no better than the directed cycle's
/// (up to `1e-12`). Holds for every valid profile since `d_i <= d_1^i`.
pub fn cycle_optimality_check(p: &DistanceProfile, k: u32) -> Result<bool, AnalysisError> {
    let own = base_for_graph(p, k)?;
    let cycle = base_for_graph(&DistanceProfile::cycle(p.num_colors()), k)?;
    Ok(own >= cycle - 1e-12)
}

/// Bases for one `(d, k)` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseReport {
    pub d: u32,
    pub k: u32,
    pub schoening: BigRational,
    pub det_complete: BigRational,
    pub det_cycle: BigRational,
    /// Base for an extra graph profile, when one was supplied.
    pub graph: Option<(String, BigRational)>,
    pub recommended: GraphKind,
}

impl BaseReport {
    pub fn new(d: u32, k: u32) -> Result<Self, AnalysisError> {
        let det_complete = base_det_complete_exact(d, k)?;
        let det_cycle = base_det_cycle_exact(d, k)?;
        let recommended = if det_cycle < det_complete {
            GraphKind::Cycle
        } else {
            GraphKind::Complete
        };
        Ok(Self {
            d,
            k,
            schoening: base_schoening_exact(d, k)?,
            det_complete,
            det_cycle,
            graph: None,
            recommended,
        })
    }

    pub fn with_graph(mut self, name: &str, p: &DistanceProfile) -> Result<Self, AnalysisError> {
        self.graph = Some((name.to_string(), base_for_graph_exact(p, self.k)?));
        Ok(self)
    }

    pub fn schoening_base(&self) -> f64 {
        to_f64(&self.schoening)
    }

    pub fn det_complete_base(&self) -> f64 {
        to_f64(&self.det_complete)
    }

    pub fn det_cycle_base(&self) -> f64 {
        to_f64(&self.det_cycle)
    }

    pub fn graph_base(&self) -> Option<f64> {
        self.graph.as_ref().map(|(_, b)| to_f64(b))
    }
}

/// Six decimals, trailing zeros trimmed, at least one decimal digit.
pub fn format_base(x: f64) -> String {
    let s = format!("{x:.6}");
    let trimmed = s.trim_end_matches('0');
    if trimmed.ends_with('.') {
        format!("{trimmed}0")
    } else {
        trimmed.to_string()
    }
}

impl fmt::Display for BaseReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "d {} k {}", self.d, self.k)?;
        let rows = [
            ("schoening", &self.schoening),
            ("det-complete", &self.det_complete),
            ("det-cycle", &self.det_cycle),
        ];
        for (name, b) in rows {
            writeln!(
                f,
                "{name} {} table {:.3} exact {b}",
                format_base(to_f64(b)),
                round_up_3(b)
            )?;
        }
        if let Some((name, b)) = &self.graph {
            writeln!(
                f,
                "graph-{name} {} table {:.3} exact {b}",
                format_base(to_f64(b)),
                round_up_3(b)
            )?;
        }
        writeln!(f, "recommended {}", self.recommended)
    }
}

/// Root of `lambda = 1/k + ((k-1)/k) lambda^d` in `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaSolution {
    pub d: u32,
    pub k: u32,
    pub lambda: f64,
    /// `|lambda - 1/k - ((k-1)/k) lambda^d|`.
    pub residual: f64,
    /// `d (k-1) <= k`: the walk has no upward drift and `lambda = 1`.
    pub degenerate: bool,
}

fn lambda_gap(d: u32, k: u32, x: f64) -> f64 {
    let k = k as f64;
    1.0 / k + (k - 1.0) / k * x.powi(d as i32) - x
}

/// Bisection on the convex gap `g(x) = 1/k + ((k-1)/k) x^d - x`: `g(0) > 0`
/// and `g` is negative at its minimizer `(k / (d (k-1)))^{1/(d-1)} < 1`
/// whenever `d (k-1) > k`; otherwise the only root in `(0, 1]` is 1.
pub fn solve_lambda(d: u32, k: u32) -> Result<LambdaSolution, AnalysisError> {
    check(d, k)?;
    if (d as u64) * (k as u64 - 1) <= k as u64 {
        return Ok(LambdaSolution {
            d,
            k,
            lambda: 1.0,
            residual: lambda_gap(d, k, 1.0).abs(),
            degenerate: true,
        });
    }
    let (df, kf) = (d as f64, k as f64);
    let mut lo = 0.0_f64;
    let mut hi = (kf / (df * (kf - 1.0))).powf(1.0 / (df - 1.0));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if lambda_gap(d, k, mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let lambda = if lambda_gap(d, k, lo).abs() <= lambda_gap(d, k, hi).abs() {
        lo
    } else {
        hi
    };
    Ok(LambdaSolution {
        d,
        k,
        lambda,
        residual: lambda_gap(d, k, lambda).abs(),
        degenerate: false,
    })
}

/// Probability `lambda^j` that the chain started at `j` ever hits 0.
pub fn reach_probability(d: u32, k: u32, j: u32) -> Result<f64, AnalysisError> {
    Ok(solve_lambda(d, k)?.lambda.powi(j as i32))
}

/// Both sides of `sum_j T_cycle(n, j) lambda^j / d^n = (k / (d (k-1)))^n`:
/// the left from exact shell counts, the right in closed form.
pub fn success_probability_identity(d: u32, k: u32, n: usize) -> Result<(f64, f64), AnalysisError> {
    let lambda = solve_lambda(d, k)?.lambda;
    let table = shell_counts(&DistanceProfile::cycle(d), n);
    let total = BigInt::from(Pow::pow(BigUint::from(d), n));
    let lhs: f64 = table
        .counts()
        .iter()
        .enumerate()
        .map(|(j, t)| {
            let share = BigRational::new(BigInt::from(t.clone()), total.clone());
            to_f64(&share) * lambda.powi(j as i32)
        })
        .sum();
    let rhs = (k as f64 / (d as f64 * (k as f64 - 1.0))).powi(n as i32);
    Ok((lhs, rhs))
}

/// Empirical hitting frequency of state 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkovEstimate {
    pub hits: u64,
    pub trials: u64,
    pub frequency: f64,
    /// Binomial standard error `sqrt(p (1-p) / trials)`.
    pub std_error: f64,
}

/// Simulates the distance chain: from `j >= 1` move to `j - 1` with
/// probability `1/k`, else to `j + d - 1`; 0 is absorbing. Counts trials
/// reaching 0 within `max_steps`. Trial `i` draws from substream `i`.
pub fn markov_simulate(
    d: u32,
    k: u32,
    j_start: u64,
    max_steps: u64,
    trials: u64,
    seed: u64,
) -> Result<MarkovEstimate, AnalysisError> {
    check(d, k)?;
    if trials == 0 {
        return Err(AnalysisError::NoTrials);
    }
    let up = d as u64 - 1;
    let hits: u64 = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, i);
            let mut pos = j_start;
            let mut left = max_steps;
            // Each step lowers the state by at most 1, so once it exceeds the
            // remaining budget the trial cannot succeed.
            while pos > 0 && pos <= left {
                if rng.random_range(0..k) == 0 {
                    pos -= 1;
                } else {
                    pos += up;
                }
                left -= 1;
            }
            u64::from(pos == 0)
        })
        .sum();
    let frequency = hits as f64 / trials as f64;
    Ok(MarkovEstimate {
        hits,
        trials,
        frequency,
        std_error: (frequency * (1.0 - frequency) / trials as f64).sqrt(),
    })
}
