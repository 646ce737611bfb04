//! Automatic contour selection for Mellin–Barnes integrals.
//!
//! The abscissa is placed at the midpoint of the admissible strip (maximum
//! distance from both pole families); the truncation half-length is sized so
//! the exponentially decaying integrand falls below 1e-16 of its peak at the
//! endpoints.

use super::{ContourSpec, FoxHParams, MultiFoxHParams, Strategy};
use crate::{Error, Result};

/// Target endpoint-to-peak magnitude ratio: ln(1e-16) plus margin.
const LN_TAIL: f64 = 40.0;

fn pick_abscissa(p: &FoxHParams) -> Result<f64> {
    let (lo, hi) = p.strip();
    if lo >= hi {
        return Err(Error::NoAdmissibleContour { lo, hi });
    }
    Ok(if lo.is_finite() && hi.is_finite() {
        0.5 * (lo + hi)
    } else if hi.is_finite() {
        hi - 1.0
    } else if lo.is_finite() {
        lo + 1.0
    } else {
        0.0
    })
}

fn pick_truncation(p: &FoxHParams) -> f64 {
    let rate = p.decay_rate();
    if rate > 1e-3 {
        (LN_TAIL / rate).clamp(10.0, 2000.0)
    } else {
        // Conditionally convergent or slowly decaying: take a long line and
        // let the evaluator's endpoint check flag non-convergence.
        400.0
    }
}

/// Choose a contour for a univariate H-function.
///
/// # Errors
/// [`Error::NoAdmissibleContour`] when the two pole families leave no strip.
pub fn auto_contour(params: &FoxHParams) -> Result<ContourSpec> {
    let abscissa = pick_abscissa(params)?;
    let truncation = pick_truncation(params);
    let nodes = (((2.0 * truncation / 0.25).ceil() as usize) | 1).max(65);
    Ok(ContourSpec {
        abscissa: vec![abscissa],
        truncation,
        nodes,
        strategy: Strategy::TensorQuadrature,
    })
}

/// Choose a contour for a multivariate H-function: per-variable strip
/// midpoints, the longest of the per-variable truncations, and a strategy
/// based on dimension (tensor for N ≤ 3, quasi-random above).
pub fn auto_contour_multi(params: &MultiFoxHParams) -> Result<ContourSpec> {
    let mut abscissa = Vec::with_capacity(params.dim());
    let mut truncation: f64 = 0.0;
    for block in &params.per_var {
        abscissa.push(pick_abscissa(block)?);
        truncation = truncation.max(pick_truncation(block));
    }
    let strategy = if params.dim() <= 3 {
        Strategy::TensorQuadrature
    } else {
        Strategy::QuasiRandom
    };
    let nodes = (((2.0 * truncation / 0.5).ceil() as usize) | 1).max(33);
    Ok(ContourSpec {
        abscissa,
        truncation,
        nodes,
        strategy,
    })
}
