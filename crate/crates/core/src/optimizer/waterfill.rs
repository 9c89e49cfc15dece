//! Sum-power water-filling over the singular modes of a point-to-point
//! channel.

use crate::channel::SignalMode;
use crate::error::{Error, Result};
use crate::matrix::{c, CMatrix, HermitianMatrix, PsdMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct WaterFilling {
    pub capacity: f64,
    pub sigma: PsdMatrix,
    pub water_level: f64,
    /// Power on each singular mode, strongest first.
    pub mode_powers: Vec<f64>,
}

/// `max log2|I + h Σ h†|` subject to `Tr Σ ≤ p_total` (×½ in real mode).
pub fn waterfill(h: &CMatrix, p_total: f64, mode: SignalMode) -> Result<WaterFilling> {
    if !(p_total > 0.0 && p_total.is_finite()) {
        return Err(Error::NonPositivePower {
            name: "p_total",
            value: p_total,
        });
    }
    let svd = h.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let s_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    if s_max == 0.0 {
        return Err(Error::ZeroChannel);
    }

    let mut modes: Vec<(f64, usize)> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s > 1e-12 * s_max)
        .map(|(i, s)| (s * s, i))
        .collect();
    modes.sort_by(|a, b| b.0.total_cmp(&a.0));
    let inv: Vec<f64> = modes.iter().map(|(g, _)| 1.0 / g).collect();

    let filled = |level: f64| inv.iter().map(|n| (level - n).max(0.0)).sum::<f64>();
    let (mut lo, mut hi) = (0.0, p_total + inv.iter().copied().fold(0.0, f64::max));
    while hi - lo > 1e-12 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if filled(mid) > p_total {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    // Recompute the level exactly from the active set the bisection found.
    let active = inv.iter().filter(|n| **n < 0.5 * (lo + hi)).count().max(1);
    let level = (p_total + inv[..active].iter().sum::<f64>()) / active as f64;
    let powers: Vec<f64> = inv.iter().map(|n| (level - n).max(0.0)).collect();

    let capacity = mode.rate_scale()
        * modes
            .iter()
            .zip(&powers)
            .map(|((g, _), p)| (1.0 + g * p).log2())
            .sum::<f64>();

    let n_t = h.ncols();
    let mut sigma = CMatrix::zeros(n_t, n_t);
    for ((_, idx), p) in modes.iter().zip(&powers) {
        if *p > 0.0 {
            let v = v_t.row(*idx).adjoint();
            sigma += &v * v.adjoint() * c(*p);
        }
    }
    if mode.is_real() {
        sigma.iter_mut().for_each(|z| z.im = 0.0);
    }
    Ok(WaterFilling {
        capacity,
        sigma: PsdMatrix::from_trusted(HermitianMatrix::new(sigma)?),
        water_level: level,
        mode_powers: powers,
    })
}
