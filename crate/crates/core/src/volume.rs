//! Exact ball volumes in `G^{box n}` and the generating-function bounds
//! used to pick a covering radius.
//!
//! For a color graph with distance profile `(d_0, .., d_s)` the number of
//! points at distance exactly `r` from a fixed center satisfies
//! `T(n, r) = sum_i d_i T(n-1, r-i)`, equivalently
//! `sum_r T(n, r) x^r = (sum_i d_i x^i)^n`. Everything here is computed in
//! arbitrary precision; floats appear only when reporting.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::colorgraph::DistanceProfile;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VolumeError {
    #[error("x must be nonnegative, got {0}")]
    NegativeX(BigRational),
    #[error("x must lie in [0, 1] for the upper bound, got {0}")]
    XAboveOne(BigRational),
    #[error("x = 0 only admits radius 0, got radius {0}")]
    ZeroXPositiveRadius(usize),
    #[error("color count must be at least 2, got {0}")]
    TooFewColors(u32),
}

/// Shell counts `T(n, 0..=s*n)` for one profile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShellTable {
    profile: DistanceProfile,
    n: usize,
    counts: Vec<BigUint>,
}

impl ShellTable {
    pub fn profile(&self) -> &DistanceProfile {
        &self.profile
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn counts(&self) -> &[BigUint] {
        &self.counts
    }

    /// Largest radius with a nonzero shell, `s * n`.
    pub fn max_radius(&self) -> usize {
        self.counts.len() - 1
    }

    /// `T(n, r)`, zero past the diameter of the product.
    pub fn shell(&self, r: usize) -> BigUint {
        self.counts.get(r).cloned().unwrap_or_default()
    }

    /// `Vol(n, r) = sum_{j <= r} T(n, j)`.
    pub fn ball_volume(&self, r: usize) -> BigUint {
        self.counts.iter().take(r.saturating_add(1)).sum()
    }

    /// Cumulative volumes `Vol(n, 0..=s*n)`.
    pub fn volumes(&self) -> Vec<BigUint> {
        let mut acc = BigUint::zero();
        self.counts
            .iter()
            .map(|t| {
                acc += t;
                acc.clone()
            })
            .collect()
    }

    pub fn total(&self) -> BigUint {
        self.counts.iter().sum()
    }

    /// The `r` maximizing `T(n, r) x^r`, smallest on ties.
    pub fn select_radius(&self, x: &BigRational) -> Result<usize, VolumeError> {
        if x.is_negative() {
            return Err(VolumeError::NegativeX(x.clone()));
        }
        let mut best = (0, BigRational::zero());
        let mut power = BigRational::one();
        for (r, t) in self.counts.iter().enumerate() {
            if r > 0 {
                power *= x;
            }
            let score = BigRational::from_integer(BigInt::from(t.clone())) * &power;
            if r == 0 || score > best.1 {
                best = (r, score);
            }
        }
        Ok(best.0)
    }
}

/// Exact `T(n, r)` for all `r` by repeated convolution with the profile.
pub fn shell_counts(p: &DistanceProfile, n: usize) -> ShellTable {
    let profile: Vec<BigUint> = p.counts().iter().map(|&c| BigUint::from(c)).collect();
    let mut counts = vec![BigUint::one()];
    for _ in 0..n {
        let mut next = vec![BigUint::zero(); counts.len() + profile.len() - 1];
        for (r, t) in counts.iter().enumerate() {
            if t.is_zero() {
                continue;
            }
            for (i, di) in profile.iter().enumerate() {
                next[r + i] += t * di;
            }
        }
        counts = next;
    }
    ShellTable {
        profile: p.clone(),
        n,
        counts,
    }
}

pub fn ball_volume(p: &DistanceProfile, n: usize, r: usize) -> BigUint {
    shell_counts(p, n).ball_volume(r)
}

pub fn select_radius(p: &DistanceProfile, n: usize, x: &BigRational) -> Result<usize, VolumeError> {
    shell_counts(p, n).select_radius(x)
}

/// `sum_i d_i x^i`.
pub fn profile_polynomial(p: &DistanceProfile, x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    let mut power = BigRational::one();
    for (i, &c) in p.counts().iter().enumerate() {
        if i > 0 {
            power *= x;
        }
        acc += BigRational::from_integer(BigInt::from(c)) * &power;
    }
    acc
}

/// A radius together with a volume bound that holds at that radius.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RadiusBound {
    pub radius: usize,
    pub bound: BigRational,
}

fn lower_bound(
    p: &DistanceProfile,
    n: usize,
    x: &BigRational,
    terms: usize,
) -> Result<RadiusBound, VolumeError> {
    let radius = select_radius(p, n, x)?;
    let numerator = Pow::pow(profile_polynomial(p, x), n);
    let denominator = BigRational::from_integer(BigInt::from(terms)) * Pow::pow(x, radius);
    // x = 0 always selects r = 0, so the denominator is never zero here.
    Ok(RadiusBound {
        radius,
        bound: numerator / denominator,
    })
}

/// Hamming balls: a radius with `Vol(n, r) >= (1 + (d-1)x)^n / ((n+1) x^r)`.
pub fn lower_bound_complete(d: u32, n: usize, x: &BigRational) -> Result<RadiusBound, VolumeError> {
    if d < 2 {
        return Err(VolumeError::TooFewColors(d));
    }
    lower_bound(&DistanceProfile::complete(d), n, x, n + 1)
}

/// Directed-cycle balls: a radius with
/// `Vol(n, r) >= (1 + x + .. + x^{d-1})^n / (((d-1)n + 1) x^r)`.
pub fn lower_bound_cycle(d: u32, n: usize, x: &BigRational) -> Result<RadiusBound, VolumeError> {
    if d < 2 {
        return Err(VolumeError::TooFewColors(d));
    }
    lower_bound(&DistanceProfile::cycle(d), n, x, (d as usize - 1) * n + 1)
}

/// `(sum_i d_i x^i)^n / x^r`, an upper bound on `Vol(n, r)` for `x` in `[0, 1]`.
pub fn upper_bound(
    p: &DistanceProfile,
    n: usize,
    r: usize,
    x: &BigRational,
) -> Result<BigRational, VolumeError> {
    if x.is_negative() {
        return Err(VolumeError::NegativeX(x.clone()));
    }
    if x > &BigRational::one() {
        return Err(VolumeError::XAboveOne(x.clone()));
    }
    if x.is_zero() && r > 0 {
        return Err(VolumeError::ZeroXPositiveRadius(r));
    }
    Ok(Pow::pow(profile_polynomial(p, x), n) / Pow::pow(x, r))
}

/// Nearest `f64`, for display.
pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `num / den` as an exact rational.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(num.into(), den.into())
}
