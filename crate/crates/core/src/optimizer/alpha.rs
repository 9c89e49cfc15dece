//! Minimization of a scalar function of α > 0 on a log scale.

use serde::Serialize;

use super::{golden_min, log_space};
use crate::error::{Error, Result};
use crate::parallel;

const PRESCAN: usize = 20;
const MAX_WIDENINGS: usize = 3;
const LOG_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaSearch {
    pub alpha_star: f64,
    pub value: f64,
    /// The prescan showed more than one local minimum; the grid minimum was
    /// returned without refinement.
    pub flagged: bool,
    /// The minimum still sat on the bracket edge after every widening.
    pub at_edge: bool,
    pub bracket: (f64, f64),
}

/// Prescan on a 20-point log grid, widen ×10 on each side (at most three
/// times) while the minimum sits on an edge, then golden-section on `ln α`
/// between the neighbours of the grid minimum.
pub fn minimize_over_alpha<F>(f: F, lo: f64, hi: f64) -> Result<AlphaSearch>
where
    F: Fn(f64) -> Result<f64> + Sync + Send,
{
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "bad alpha bracket [{lo}, {hi}]"
        )));
    }
    let (mut lo, mut hi) = (lo, hi);
    let mut widenings = 0;
    loop {
        let grid = log_space(lo, hi, PRESCAN);
        let values = parallel::map_ordered(grid.clone(), &f)
            .into_iter()
            .collect::<Result<Vec<f64>>>()?;
        let (imin, vmin) = argmin(&values);
        let vmax = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let done = |at_edge, flagged| AlphaSearch {
            alpha_star: grid[imin],
            value: vmin,
            flagged,
            at_edge,
            bracket: (lo, hi),
        };
        if vmax - vmin <= 1e-12 * vmin.abs().max(1.0) {
            return Ok(done(false, false));
        }
        if imin == 0 || imin == PRESCAN - 1 {
            if widenings < MAX_WIDENINGS {
                widenings += 1;
                lo /= 10.0;
                hi *= 10.0;
                continue;
            }
            return Ok(done(true, false));
        }
        if local_minima(&values) > 1 {
            return Ok(done(false, true));
        }

        let mut failure = None;
        let (x, fx) = golden_min(
            |u| match f(u.exp()) {
                Ok(v) => v,
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::INFINITY
                }
            },
            grid[imin - 1].ln(),
            grid[imin + 1].ln(),
            LOG_TOL,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        let mut out = done(false, false);
        if fx < vmin {
            out.alpha_star = x.exp();
            out.value = fx;
        }
        return Ok(out);
    }
}

fn argmin(v: &[f64]) -> (usize, f64) {
    v.iter().copied().enumerate().fold(
        (0, f64::INFINITY),
        |best, (i, x)| if x < best.1 { (i, x) } else { best },
    )
}

/// Interior points lower than both neighbours by more than solver noise.
fn local_minima(v: &[f64]) -> usize {
    let noise = |x: f64| 1e-7 * x.abs().max(1.0);
    (1..v.len() - 1)
        .filter(|&i| v[i] + noise(v[i]) < v[i - 1] && v[i] + noise(v[i]) < v[i + 1])
        .count()
}
