//! Graphs on the color set `[d]` and the distances they induce on `[d]^n`.
//!
//! A color graph `G` turns the coordinate-wise shortest-path length into a
//! distance on assignments: `dist(a, b) = sum_i dist_G(a_i, b_i)`. With the
//! complete graph this is the Hamming distance; with the directed cycle it
//! is the skewed "steps forward mod d" distance.

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

use crate::formula::Assignment;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("a color graph needs at least 2 colors, got {0}")]
    TooFewColors(u32),
    #[error("hypercube dimension must be between 1 and 16, got {0}")]
    BadDimension(u32),
    #[error("edge ({from}, {to}) is out of range for d = {d}")]
    EdgeOutOfRange { from: u32, to: u32, d: u32 },
    #[error("self-loop at color {0}")]
    SelfLoop(u32),
    #[error("color {vertex} has distance profile {found:?}, color 1 has {expected:?}")]
    NotDistanceRegular {
        vertex: u32,
        expected: Vec<u64>,
        found: Vec<u64>,
    },
    #[error("color {vertex} has out-degree {found}, color 1 has {expected}")]
    IrregularDegree {
        vertex: u32,
        expected: u32,
        found: u32,
    },
    #[error("distance profile has d_{i} = {count} > d_1^{i}")]
    ProfileGrowth { i: usize, count: u64 },
    #[error("invalid distance profile: {0}")]
    InvalidProfile(String),
    #[error("color {to} is unreachable from color {from}")]
    Unreachable { from: u32, to: u32 },
    #[error("assignments have lengths {0} and {1}")]
    LengthMismatch(usize, usize),
    #[error("color {color} is outside 1..={d}")]
    ColorOutOfRange { color: u32, d: u32 },
    #[error("graph file line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GraphKind {
    Complete,
    Cycle,
    Hypercube,
    Custom,
}

impl GraphKind {
    pub fn name(self) -> &'static str {
        match self {
            GraphKind::Complete => "complete",
            GraphKind::Cycle => "cycle",
            GraphKind::Hypercube => "hypercube",
            GraphKind::Custom => "custom",
        }
    }
}

impl fmt::Display for GraphKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Shortest-path lengths between colors; `None` is an infinite distance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMatrix {
    d: u32,
    entries: Vec<Option<u32>>,
}

impl DistanceMatrix {
    pub fn d(&self) -> u32 {
        self.d
    }

    /// `dist(from, to)`, colors 1-indexed.
    #[inline]
    pub fn get(&self, from: u32, to: u32) -> Option<u32> {
        self.entries[((from - 1) * self.d + (to - 1)) as usize]
    }

    pub fn has_unreachable(&self) -> bool {
        self.entries.iter().any(Option::is_none)
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Option<u32>]> {
        self.entries.chunks(self.d as usize)
    }
}

/// A (possibly directed) loop-free graph on colors `1..=d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorGraph {
    d: u32,
    kind: GraphKind,
    /// Sorted out-neighbors, indexed by `color - 1`.
    out: Vec<Vec<u32>>,
    dist: DistanceMatrix,
}

impl ColorGraph {
    /// `K_d`: every ordered pair of distinct colors is an edge.
    pub fn complete(d: u32) -> Result<Self, GraphError> {
        check_colors(d)?;
        let out = (1..=d)
            .map(|c| (1..=d).filter(|&o| o != c).collect())
            .collect();
        Ok(Self::build(d, GraphKind::Complete, out))
    }

    /// Directed cycle `1 -> 2 -> .. -> d -> 1`.
    pub fn directed_cycle(d: u32) -> Result<Self, GraphError> {
        check_colors(d)?;
        let out = (1..=d).map(|c| vec![c % d + 1]).collect();
        Ok(Self::build(d, GraphKind::Cycle, out))
    }

    /// The `ell`-dimensional cube on `2^ell` colors; colors `a`, `b` are
    /// adjacent iff `a - 1` and `b - 1` differ in exactly one bit.
    pub fn hypercube(ell: u32) -> Result<Self, GraphError> {
        if !(1..=16).contains(&ell) {
            return Err(GraphError::BadDimension(ell));
        }
        let d = 1u32 << ell;
        let out = (0..d)
            .map(|v| {
                let mut nbrs: Vec<u32> = (0..ell).map(|b| (v ^ (1 << b)) + 1).collect();
                nbrs.sort_unstable();
                nbrs
            })
            .collect();
        Ok(Self::build(d, GraphKind::Hypercube, out))
    }

    /// Custom graph from directed edges; duplicates are merged.
    pub fn from_edges(d: u32, edges: &[(u32, u32)]) -> Result<Self, GraphError> {
        check_colors(d)?;
        let mut out = vec![Vec::new(); d as usize];
        for &(from, to) in edges {
            if from == 0 || to == 0 || from > d || to > d {
                return Err(GraphError::EdgeOutOfRange { from, to, d });
            }
            if from == to {
                return Err(GraphError::SelfLoop(from));
            }
            out[(from - 1) as usize].push(to);
        }
        for nbrs in &mut out {
            nbrs.sort_unstable();
            nbrs.dedup();
        }
        Ok(Self::build(d, GraphKind::Custom, out))
    }

    /// Reads `g <d>` followed by one `u v` line per directed edge.
    /// Blank lines and `c ` comments are skipped.
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let mut d = None;
        let mut edges = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let t = raw.trim();
            if t.is_empty() || t == "c" || t.starts_with("c ") {
                continue;
            }
            let perr = |msg: String| GraphError::Parse { line, msg };
            let toks: Vec<&str> = t.split_whitespace().collect();
            match d {
                None => {
                    if toks.len() != 2 || toks[0] != "g" {
                        return Err(perr("expected header `g <d>`".into()));
                    }
                    d = Some(
                        toks[1]
                            .parse::<u32>()
                            .map_err(|_| perr(format!("bad color count `{}`", toks[1])))?,
                    );
                }
                Some(_) => {
                    if toks.len() != 2 {
                        return Err(perr("expected edge `u v`".into()));
                    }
                    let parse = |s: &str| {
                        s.parse::<u32>()
                            .map_err(|_| perr(format!("bad color `{s}`")))
                    };
                    edges.push((parse(toks[0])?, parse(toks[1])?));
                }
            }
        }
        let d = d.ok_or(GraphError::Parse {
            line: 1,
            msg: "missing header `g <d>`".into(),
        })?;
        Self::from_edges(d, &edges)
    }

    fn build(d: u32, kind: GraphKind, out: Vec<Vec<u32>>) -> Self {
        let mut entries = vec![None; (d * d) as usize];
        for src in 1..=d {
            let row = &mut entries[((src - 1) * d) as usize..(src * d) as usize];
            for (v, dist) in bfs(&out, src).into_iter().enumerate() {
                row[v] = dist;
            }
        }
        Self {
            d,
            kind,
            out,
            dist: DistanceMatrix { d, entries },
        }
    }

    pub fn num_colors(&self) -> u32 {
        self.d
    }

    pub fn kind(&self) -> GraphKind {
        self.kind
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    /// Sorted out-neighbors of `color`.
    #[inline]
    pub fn neighbors(&self, color: u32) -> &[u32] {
        &self.out[(color - 1) as usize]
    }

    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(i, nbrs)| nbrs.iter().map(move |&t| (i as u32 + 1, t)))
    }

    /// Maximum out-degree (the out-degree, for regular graphs).
    pub fn out_degree(&self) -> u32 {
        self.out.iter().map(Vec::len).max().unwrap_or(0) as u32
    }

    pub fn pairwise_distances(&self) -> &DistanceMatrix {
        &self.dist
    }

    #[inline]
    pub fn distance(&self, from: u32, to: u32) -> Option<u32> {
        self.dist.get(from, to)
    }

    pub fn is_strongly_connected(&self) -> bool {
        !self.dist.has_unreachable()
    }

    /// The common distance profile of every color, or an error if two
    /// colors see different profiles or out-degrees.
    pub fn profile(&self) -> Result<DistanceProfile, GraphError> {
        let counts_from = |src: u32| -> Vec<u64> {
            let mut counts = Vec::new();
            for dist in self
                .dist
                .rows()
                .nth((src - 1) as usize)
                .unwrap()
                .iter()
                .flatten()
            {
                let i = *dist as usize;
                if counts.len() <= i {
                    counts.resize(i + 1, 0);
                }
                counts[i] += 1;
            }
            counts
        };
        let expected = counts_from(1);
        let delta = self.neighbors(1).len() as u32;
        for v in 2..=self.d {
            let found = counts_from(v);
            if found != expected {
                return Err(GraphError::NotDistanceRegular {
                    vertex: v,
                    expected,
                    found,
                });
            }
            let deg = self.neighbors(v).len() as u32;
            if deg != delta {
                return Err(GraphError::IrregularDegree {
                    vertex: v,
                    expected: delta,
                    found: deg,
                });
            }
        }
        DistanceProfile::new(self.d, expected)
    }

    /// Checks that `a` has length `n` and colors in range for this graph.
    pub fn check_assignment(&self, a: &Assignment) -> Result<(), GraphError> {
        match a.colors().iter().find(|&&c| c == 0 || c > self.d) {
            Some(&color) => Err(GraphError::ColorOutOfRange { color, d: self.d }),
            None => Ok(()),
        }
    }
}

fn check_colors(d: u32) -> Result<(), GraphError> {
    if d < 2 {
        Err(GraphError::TooFewColors(d))
    } else {
        Ok(())
    }
}

fn bfs(out: &[Vec<u32>], src: u32) -> Vec<Option<u32>> {
    let mut dist = vec![None; out.len()];
    dist[(src - 1) as usize] = Some(0);
    let mut queue = VecDeque::from([src]);
    while let Some(u) = queue.pop_front() {
        let du = dist[(u - 1) as usize].unwrap();
        for &v in &out[(u - 1) as usize] {
            let slot = &mut dist[(v - 1) as usize];
            if slot.is_none() {
                *slot = Some(du + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Vertex counts `(d_0, d_1, .., d_s)` at each distance from any color,
/// where `s` is the diameter and `d_1` the out-degree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DistanceProfile {
    d: u32,
    counts: Vec<u64>,
}

impl DistanceProfile {
    /// Validates `d_0 = 1`, `sum d_i <= d`, no trailing zeros, and
    /// `d_i <= d_1^i`.
    pub fn new(d: u32, counts: Vec<u64>) -> Result<Self, GraphError> {
        if counts.first() != Some(&1) {
            return Err(GraphError::InvalidProfile("d_0 must be 1".into()));
        }
        if counts.last() == Some(&0) {
            return Err(GraphError::InvalidProfile("trailing zero count".into()));
        }
        if counts.iter().sum::<u64>() > d as u64 {
            return Err(GraphError::InvalidProfile(format!(
                "counts sum to more than d = {d}"
            )));
        }
        let delta = counts.get(1).copied().unwrap_or(0) as u128;
        let mut bound: u128 = 1;
        for (i, &c) in counts.iter().enumerate().skip(1) {
            bound = bound.saturating_mul(delta);
            if c as u128 > bound {
                return Err(GraphError::ProfileGrowth { i, count: c });
            }
        }
        Ok(Self { d, counts })
    }

    pub fn complete(d: u32) -> Self {
        Self {
            d,
            counts: vec![1, (d - 1) as u64],
        }
    }

    pub fn cycle(d: u32) -> Self {
        Self {
            d,
            counts: vec![1; d as usize],
        }
    }

    pub fn num_colors(&self) -> u32 {
        self.d
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// `d_1`, the out-degree.
    pub fn delta(&self) -> u64 {
        self.counts.get(1).copied().unwrap_or(0)
    }

    /// Largest `i` with `d_i > 0`.
    pub fn diameter(&self) -> usize {
        self.counts.len() - 1
    }

    /// Whether every color reaches every other one.
    pub fn is_connected(&self) -> bool {
        self.counts.iter().sum::<u64>() == self.d as u64
    }
}

/// `sum_i dist_G(a_i, b_i)`, the distance from `a` to `b` in `G^{box n}`.
pub fn assignment_distance(
    g: &ColorGraph,
    a: &Assignment,
    b: &Assignment,
) -> Result<u64, GraphError> {
    if a.len() != b.len() {
        return Err(GraphError::LengthMismatch(a.len(), b.len()));
    }
    g.check_assignment(a)?;
    g.check_assignment(b)?;
    a.colors()
        .iter()
        .zip(b.colors())
        .try_fold(0u64, |acc, (&x, &y)| match g.distance(x, y) {
            Some(dist) => Ok(acc + dist as u64),
            None => Err(GraphError::Unreachable { from: x, to: y }),
        })
}
