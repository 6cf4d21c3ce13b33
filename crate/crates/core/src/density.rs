//! Conceptual Density of a concept given how many candidate senses ("marks")
//! fall inside its subhierarchy.
//!
//! With `nhyp` the branching factor of a regular tree the same size as the
//! subhierarchy, `m` marks score
//!
//! ```text
//!            m-1
//!            Σ  (nhyp + beta) ^ (i ^ alpha)
//!            i=0
//! CD(c, m) = ------------------------------
//!                    descendants(c)
//! ```
//!
//! `alpha = 1, beta = 0` gives the untuned base form, where `m = height`
//! on a perfectly regular tree scores exactly 1.

use thiserror::Error;

use crate::taxonomy::ConceptStats;

/// Absolute residual accepted by [`solve_nhyp`].
pub const NHYP_TOLERANCE: f64 = 1e-9;
const MAX_BISECTIONS: usize = 200;

#[derive(Debug, Error, PartialEq)]
pub enum DensityError {
    #[error("need descendants >= height >= 1, got descendants={descendants}, height={height}")]
    InconsistentStats { descendants: u64, height: u32 },
    #[error("density is undefined for zero marks")]
    NoMarks,
    #[error("negative base: nhyp + beta = {0}")]
    NegativeBase(f64),
    #[error("alpha must be finite and >= 0, got {0}")]
    BadAlpha(f64),
    #[error("beta must be finite, got {0}")]
    BadBeta(f64),
}

/// Exponent shaping and hyponym offset for the density numerator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityParams {
    pub alpha: f64,
    pub beta: f64,
}

impl DensityParams {
    pub const DEFAULT_ALPHA: f64 = 0.20;

    /// The untuned formula: plain geometric weights.
    pub const BASE: DensityParams = DensityParams { alpha: 1.0, beta: 0.0 };

    pub fn new(alpha: f64, beta: f64) -> Result<Self, DensityError> {
        if !alpha.is_finite() || alpha < 0.0 {
            return Err(DensityError::BadAlpha(alpha));
        }
        if !beta.is_finite() {
            return Err(DensityError::BadBeta(beta));
        }
        Ok(DensityParams { alpha, beta })
    }
}

impl Default for DensityParams {
    fn default() -> Self {
        DensityParams {
            alpha: Self::DEFAULT_ALPHA,
            beta: 0.0,
        }
    }
}

fn geometric_sum(x: f64, terms: u32) -> f64 {
    let mut sum = 0.0;
    let mut power = 1.0;
    for _ in 0..terms {
        sum += power;
        power *= x;
    }
    sum
}

/// Branching factor `x >= 0` with `1 + x + ... + x^(height-1) = descendants`.
///
/// Leaves (`height == 1`) get 0. Otherwise the left side is strictly
/// increasing on `[0, descendants]`, so bisection runs until the bracket
/// collapses to adjacent floats and the endpoint with the smaller residual
/// is returned.
pub fn solve_nhyp(descendants: u64, height: u32) -> Result<f64, DensityError> {
    if height == 0 || descendants < u64::from(height) {
        return Err(DensityError::InconsistentStats { descendants, height });
    }
    if height == 1 {
        return Ok(0.0);
    }
    let target = descendants as f64;
    let residual = |x: f64| geometric_sum(x, height) - target;

    let (mut lo, mut hi) = (0.0f64, target);
    let (mut r_lo, mut r_hi) = (residual(lo), residual(hi));
    if r_lo == 0.0 {
        return Ok(lo);
    }
    if r_hi == 0.0 {
        return Ok(hi);
    }
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let r = residual(mid);
        if r == 0.0 {
            return Ok(mid);
        }
        if r < 0.0 {
            lo = mid;
            r_lo = r;
        } else {
            hi = mid;
            r_hi = r;
        }
    }
    Ok(if r_lo.abs() <= r_hi.abs() { lo } else { hi })
}

/// The base form: `Σ_{i<m} nhyp^i / descendants`.
pub fn conceptual_density_base(stats: &ConceptStats, marks: usize) -> Result<f64, DensityError> {
    if marks == 0 {
        return Err(DensityError::NoMarks);
    }
    let terms = u32::try_from(marks).unwrap_or(u32::MAX);
    Ok(geometric_sum(stats.nhyp, terms) / stats.descendants as f64)
}

/// The parameterised form: `Σ_{i<m} (nhyp + beta)^(i^alpha) / descendants`.
/// The `i = 0` term is always 1.
pub fn conceptual_density(stats: &ConceptStats, marks: usize, params: &DensityParams) -> Result<f64, DensityError> {
    if marks == 0 {
        return Err(DensityError::NoMarks);
    }
    let base = stats.nhyp + params.beta;
    if base < 0.0 {
        return Err(DensityError::NegativeBase(base));
    }
    let mut sum = 1.0;
    for i in 1..marks {
        sum += base.powf((i as f64).powf(params.alpha));
    }
    Ok(sum / stats.descendants as f64)
}
