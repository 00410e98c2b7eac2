//! Deterministic covering codes for `G`-balls.
//!
//! A block of `b` coordinates is covered by greedy set cover over the
//! ground set `[d]^b`, with one candidate ball per point. Longer codes are
//! Cartesian products of block codes; since the product distance is a sum
//! of per-block distances, the product covers with the sum of the block
//! radii.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};
use std::fmt::Write as _;
use std::sync::Arc;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use thiserror::Error;

use crate::colorgraph::{ColorGraph, GraphError};
use crate::formula::Assignment;
use crate::volume::{shell_counts, VolumeError};

/// Default largest block ground set, `2^20` points.
pub const DEFAULT_BLOCK_CAP: u64 = 1 << 20;
/// Default largest `d^n` for [`verify_cover`].
pub const DEFAULT_VERIFY_CAP: u64 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodeError {
    #[error("{d}^{n} points exceed the cap of {cap}")]
    CapExceeded { d: u32, n: usize, cap: u64 },
    #[error("color graph is not strongly connected; some points are never covered")]
    Disconnected,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Volume(#[from] VolumeError),
    #[error("block {0} has an empty code")]
    EmptyBlockCode(usize),
    #[error("block {block} mixes codeword lengths {expected} and {found}")]
    RaggedBlock {
        block: usize,
        expected: usize,
        found: usize,
    },
    #[error("product code has more than usize::MAX codewords")]
    TooLarge,
    #[error("width bound k must be at least 1")]
    ZeroWidth,
    #[error("code file line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Mixed-radix view of `[d]^n`: point index has the first coordinate as
/// the most significant digit, so index order is lexicographic order.
struct PointSpace {
    d: u32,
    n: usize,
    /// For each color, the colors it reaches with their distances, by distance.
    reach: Vec<Vec<(u32, u32)>>,
    /// For each color, the colors reaching it with their distances.
    reached_from: Vec<Vec<(u32, u32)>>,
    place: Vec<usize>,
}

impl PointSpace {
    fn new(g: &ColorGraph, n: usize) -> Self {
        let d = g.num_colors();
        let sorted = |dist: &dyn Fn(u32, u32) -> Option<u32>| -> Vec<Vec<(u32, u32)>> {
            (1..=d)
                .map(|c| {
                    let mut r: Vec<(u32, u32)> =
                        (1..=d).filter_map(|t| dist(c, t).map(|x| (t, x))).collect();
                    r.sort_by_key(|&(t, x)| (x, t));
                    r
                })
                .collect()
        };
        let reach = sorted(&|c, t| g.distance(c, t));
        let reached_from = sorted(&|c, t| g.distance(t, c));
        let mut place = vec![1usize; n];
        for i in (0..n.saturating_sub(1)).rev() {
            place[i] = place[i + 1] * d as usize;
        }
        Self {
            d,
            n,
            reach,
            reached_from,
            place,
        }
    }

    fn size(&self) -> usize {
        (self.d as usize).pow(self.n as u32)
    }

    fn decode(&self, mut idx: usize) -> Vec<u32> {
        let mut colors = vec![1; self.n];
        for i in (0..self.n).rev() {
            colors[i] = (idx % self.d as usize) as u32 + 1;
            idx /= self.d as usize;
        }
        colors
    }

    /// Calls `f` on the index of every point within distance `r` of `center`.
    fn for_each_in_ball(&self, center: &[u32], r: u64, f: &mut impl FnMut(usize)) {
        Self::ball_rec(&self.reach, &self.place, center, 0, 0, r, f);
    }

    /// Calls `f` on the index of every point from which `target` is within
    /// distance `r`, i.e. every center whose ball contains `target`.
    fn for_each_center_covering(&self, target: &[u32], r: u64, f: &mut impl FnMut(usize)) {
        Self::ball_rec(&self.reached_from, &self.place, target, 0, 0, r, f);
    }

    fn ball_rec(
        table: &[Vec<(u32, u32)>],
        place: &[usize],
        center: &[u32],
        i: usize,
        base: usize,
        budget: u64,
        f: &mut impl FnMut(usize),
    ) {
        if i == center.len() {
            f(base);
            return;
        }
        for &(t, dist) in &table[(center[i] - 1) as usize] {
            if dist as u64 > budget {
                break;
            }
            let idx = base + (t - 1) as usize * place[i];
            Self::ball_rec(table, place, center, i + 1, idx, budget - dist as u64, f);
        }
    }
}

fn checked_space(d: u32, n: usize, cap: u64) -> Result<u64, CodeError> {
    match (d as u64).checked_pow(n.try_into().unwrap_or(u32::MAX)) {
        Some(total) if total <= cap && total <= usize::MAX as u64 => Ok(total),
        _ => Err(CodeError::CapExceeded { d, n, cap }),
    }
}

fn check_graph(g: &ColorGraph) -> Result<crate::colorgraph::DistanceProfile, CodeError> {
    let profile = g.profile()?;
    if !g.is_strongly_connected() {
        return Err(CodeError::Disconnected);
    }
    Ok(profile)
}

/// Greedy set cover of `[d]^n_block` by radius-`r` balls: always take the
/// center whose ball covers the most uncovered points, lexicographically
/// smallest center on ties.
pub fn greedy_cover(
    g: &ColorGraph,
    n_block: usize,
    r: usize,
    block_cap: u64,
) -> Result<Vec<Assignment>, CodeError> {
    let d = g.num_colors();
    checked_space(d, n_block, block_cap)?;
    let profile = check_graph(g)?;
    let space = PointSpace::new(g, n_block);
    let total = space.size();
    let vol = shell_counts(&profile, n_block)
        .ball_volume(r)
        .to_usize()
        .expect("ball volume bounded by block cap");

    // Gains are kept exact: covering a point lowers the gain of every center
    // whose ball holds it. Heap entries may be stale upper bounds; an entry
    // is taken only when it matches the current gain, so the choice is the
    // maximum gain with the smallest index among ties.
    let mut gain = vec![vol; total];
    let mut heap: BinaryHeap<(usize, Reverse<usize>)> =
        (0..total).map(|idx| (vol, Reverse(idx))).collect();
    let mut covered = vec![false; total];
    let mut uncovered = total;
    let mut code = Vec::new();
    let mut fresh = Vec::with_capacity(vol);
    while uncovered > 0 {
        let (seen, Reverse(idx)) = heap.pop().expect("uncovered points remain coverable");
        if seen != gain[idx] {
            if gain[idx] > 0 {
                heap.push((gain[idx], Reverse(idx)));
            }
            continue;
        }
        let center = space.decode(idx);
        fresh.clear();
        space.for_each_in_ball(&center, r as u64, &mut |p| {
            if !covered[p] {
                covered[p] = true;
                fresh.push(p);
            }
        });
        uncovered -= fresh.len();
        for &p in &fresh {
            space.for_each_center_covering(&space.decode(p), r as u64, &mut |c| gain[c] -= 1);
        }
        code.push(Assignment::new(center));
    }
    Ok(code)
}

/// Size guarantee of greedy cover on a ground set of `total` points with
/// balls of `vol` points: `(1 + ln total) * total / vol`.
pub fn greedy_size_bound(total: &BigUint, vol: &BigUint) -> f64 {
    let t = total.to_f64().unwrap_or(f64::INFINITY);
    (1.0 + t.ln()) * t / vol.to_f64().unwrap_or(f64::INFINITY)
}

/// A covering code of `[d]^n`, stored as a product of block codes.
///
/// Codewords are the concatenations of one block codeword per block, in
/// lexicographic order of block-code positions (first block slowest).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoveringCode {
    graph: ColorGraph,
    n: usize,
    radius: usize,
    blocks: Vec<usize>,
    per_block_radius: Vec<usize>,
    block_codes: Vec<Arc<Vec<Assignment>>>,
    len: usize,
}

impl CoveringCode {
    /// A single-block code from an explicit codeword list.
    pub fn from_codewords(
        graph: ColorGraph,
        n: usize,
        radius: usize,
        codewords: Vec<Assignment>,
    ) -> Result<Self, CodeError> {
        for c in &codewords {
            if c.len() != n {
                return Err(CodeError::RaggedBlock {
                    block: 0,
                    expected: n,
                    found: c.len(),
                });
            }
            graph.check_assignment(c)?;
        }
        Ok(Self {
            graph,
            n,
            radius,
            blocks: vec![n],
            per_block_radius: vec![radius],
            len: codewords.len(),
            block_codes: vec![Arc::new(codewords)],
        })
    }

    pub fn graph(&self) -> &ColorGraph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn per_block_radius(&self) -> &[usize] {
        &self.per_block_radius
    }

    pub fn block_codes(&self) -> impl Iterator<Item = &[Assignment]> {
        self.block_codes.iter().map(|c| c.as_slice())
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// The `i`-th codeword.
    pub fn codeword(&self, mut i: usize) -> Assignment {
        assert!(i < self.len, "codeword index {i} out of range");
        let mut parts: Vec<&Assignment> = Vec::with_capacity(self.blocks.len());
        for code in self.block_codes.iter().rev() {
            parts.push(&code[i % code.len()]);
            i /= code.len();
        }
        let mut colors = Vec::with_capacity(self.n);
        for part in parts.into_iter().rev() {
            colors.extend_from_slice(part.colors());
        }
        Assignment::new(colors)
    }

    pub fn iter(&self) -> impl Iterator<Item = Assignment> + '_ {
        (0..self.len).map(|i| self.codeword(i))
    }

    pub fn codewords(&self) -> Vec<Assignment> {
        self.iter().collect()
    }

    /// `d^n / Vol_G(n, radius)`, which no covering code can undercut.
    pub fn size_lower_bound(&self) -> Result<BigRational, CodeError> {
        let profile = self.graph.profile()?;
        let vol = shell_counts(&profile, self.n).ball_volume(self.radius);
        let total = BigUint::from(self.graph.num_colors()).pow(self.n as u32);
        Ok(BigRational::new(total.into(), vol.into()))
    }
}

/// Cartesian product of block codes; the radius is the sum of block radii.
pub fn product_code(
    graph: &ColorGraph,
    block_codes: Vec<(Vec<Assignment>, usize)>,
) -> Result<CoveringCode, CodeError> {
    product_of_shared(
        graph,
        block_codes
            .into_iter()
            .map(|(code, r)| (Arc::new(code), r))
            .collect(),
    )
}

fn product_of_shared(
    graph: &ColorGraph,
    block_codes: Vec<(Arc<Vec<Assignment>>, usize)>,
) -> Result<CoveringCode, CodeError> {
    let mut blocks = Vec::with_capacity(block_codes.len());
    let mut len: usize = 1;
    for (b, (code, _)) in block_codes.iter().enumerate() {
        let first = code.first().ok_or(CodeError::EmptyBlockCode(b))?;
        let width = first.len();
        for c in code.iter() {
            if c.len() != width {
                return Err(CodeError::RaggedBlock {
                    block: b,
                    expected: width,
                    found: c.len(),
                });
            }
            graph.check_assignment(c)?;
        }
        blocks.push(width);
        len = len.checked_mul(code.len()).ok_or(CodeError::TooLarge)?;
    }
    Ok(CoveringCode {
        graph: graph.clone(),
        n: blocks.iter().sum(),
        radius: block_codes.iter().map(|(_, r)| r).sum(),
        per_block_radius: block_codes.iter().map(|(_, r)| *r).collect(),
        block_codes: block_codes.into_iter().map(|(c, _)| c).collect(),
        blocks,
        len,
    })
}

/// Block sizes for `n` coordinates: the fewest blocks whose largest ground
/// set `d^{ceil(n/b)}` fits in `block_cap`, larger blocks first.
pub fn block_sizes(d: u32, n: usize, block_cap: u64) -> Result<Vec<usize>, CodeError> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let b = (1..=n)
        .find(|&b| checked_space(d, n.div_ceil(b), block_cap).is_ok())
        .ok_or(CodeError::CapExceeded {
            d,
            n: 1,
            cap: block_cap,
        })?;
    let (q, rem) = (n / b, n % b);
    Ok((0..b).map(|i| if i < rem { q + 1 } else { q }).collect())
}

/// Builds the code used by the deterministic solver: `x = 1/(k delta)`,
/// per-block radius maximizing `T(block, r) x^r`, greedy cover per distinct
/// block size, and the product over all blocks.
pub fn build_code(
    g: &ColorGraph,
    n: usize,
    k: usize,
    block_cap: u64,
) -> Result<CoveringCode, CodeError> {
    if k == 0 {
        return Err(CodeError::ZeroWidth);
    }
    let profile = check_graph(g)?;
    let x = BigRational::new(1.into(), (k as u64 * profile.delta()).into());
    let sizes = block_sizes(g.num_colors(), n, block_cap)?;
    let mut distinct: Vec<usize> = sizes.clone();
    distinct.sort_unstable();
    distinct.dedup();
    let built: BTreeMap<usize, (Arc<Vec<Assignment>>, usize)> = distinct
        .par_iter()
        .map(|&size| {
            let r = shell_counts(&profile, size).select_radius(&x)?;
            let code = greedy_cover(g, size, r, block_cap)?;
            Ok((size, (Arc::new(code), r)))
        })
        .collect::<Result<_, CodeError>>()?;
    product_of_shared(g, sizes.iter().map(|s| built[s].clone()).collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoverCheck {
    Covered,
    /// The lexicographically smallest point outside every ball.
    Uncovered(Assignment),
}

impl CoverCheck {
    pub fn is_covered(&self) -> bool {
        matches!(self, CoverCheck::Covered)
    }
}

/// Exhaustively checks that every point lies within distance `radius` of
/// some codeword (distance measured from the codeword).
pub fn verify_cover(code: &CoveringCode, cap: u64) -> Result<CoverCheck, CodeError> {
    let g = code.graph();
    checked_space(g.num_colors(), code.n(), cap)?;
    let space = PointSpace::new(g, code.n());
    let mut covered = vec![false; space.size()];
    let mut remaining = covered.len();
    for c in code.iter() {
        space.for_each_in_ball(c.colors(), code.radius() as u64, &mut |p| {
            if !covered[p] {
                covered[p] = true;
                remaining -= 1;
            }
        });
        if remaining == 0 {
            return Ok(CoverCheck::Covered);
        }
    }
    Ok(match covered.iter().position(|&c| !c) {
        None => CoverCheck::Covered,
        Some(p) => CoverCheck::Uncovered(Assignment::new(space.decode(p))),
    })
}

/// `code <d> <n> <r> <count>` followed by one codeword per line.
pub fn write_code(code: &CoveringCode) -> String {
    let mut out = format!(
        "code {} {} {} {}\n",
        code.graph().num_colors(),
        code.n(),
        code.radius(),
        code.len()
    );
    for c in code.iter() {
        writeln!(out, "{c}").unwrap();
    }
    out
}

/// Contents of a code file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeFile {
    pub d: u32,
    pub n: usize,
    pub radius: usize,
    pub codewords: Vec<Assignment>,
}

impl CodeFile {
    pub fn into_code(self, graph: ColorGraph) -> Result<CoveringCode, CodeError> {
        if graph.num_colors() != self.d {
            return Err(CodeError::Parse {
                line: 1,
                msg: format!("code has d = {}, graph has {}", self.d, graph.num_colors()),
            });
        }
        CoveringCode::from_codewords(graph, self.n, self.radius, self.codewords)
    }
}

pub fn parse_code(text: &str) -> Result<CodeFile, CodeError> {
    let mut lines = text.lines();
    let perr = |line: usize, msg: &str| CodeError::Parse {
        line,
        msg: msg.to_string(),
    };
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| perr(1, "missing header"))?
        .split_whitespace()
        .collect();
    if header.len() != 5 || header[0] != "code" {
        return Err(perr(1, "expected `code <d> <n> <r> <count>`"));
    }
    let num = |s: &str| {
        s.parse::<u64>()
            .map_err(|_| perr(1, "header field is not a number"))
    };
    let (d, n, radius, count) = (
        num(header[1])? as u32,
        num(header[2])? as usize,
        num(header[3])? as usize,
        num(header[4])? as usize,
    );
    let mut codewords = Vec::with_capacity(count);
    for i in 0..count {
        let line = i + 2;
        let text = lines.next().ok_or_else(|| perr(line, "missing codeword"))?;
        let colors = text
            .split_whitespace()
            .map(|t| match t.parse::<u32>() {
                Ok(c) if (1..=d).contains(&c) => Ok(c),
                _ => Err(perr(line, "color out of range")),
            })
            .collect::<Result<Vec<_>, _>>()?;
        if colors.len() != n {
            return Err(perr(line, "codeword has the wrong length"));
        }
        codewords.push(Assignment::new(colors));
    }
    if lines.any(|l| !l.trim().is_empty()) {
        return Err(perr(count + 2, "trailing garbage"));
    }
    Ok(CodeFile {
        d,
        n,
        radius,
        codewords,
    })
}
