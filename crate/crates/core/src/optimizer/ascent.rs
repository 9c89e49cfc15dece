//! Multi-start projected gradient ascent over products of Euclidean balls,
//! plus golden-section search for the scalar outer problems.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::SolverSettings;
use crate::error::{Error, Result};
use crate::parallel;

/// A set of coordinates whose squared norm is capped by `budget`.
#[derive(Debug, Clone)]
pub(crate) struct BallGroup {
    pub indices: Vec<usize>,
    pub budget: f64,
}

pub(crate) struct Problem<'a> {
    pub dim: usize,
    pub groups: Vec<BallGroup>,
    pub objective: &'a (dyn Fn(&[f64]) -> f64 + Sync),
}

#[derive(Debug, Clone)]
pub(crate) struct Ascent {
    pub x: Vec<f64>,
    pub value: f64,
}

impl Problem<'_> {
    pub fn project(&self, x: &mut [f64]) {
        for g in &self.groups {
            let sq: f64 = g.indices.iter().map(|&i| x[i] * x[i]).sum();
            if sq > g.budget {
                let s = if g.budget > 0.0 {
                    (g.budget / sq).sqrt()
                } else {
                    0.0
                };
                g.indices.iter().for_each(|&i| x[i] *= s);
            }
        }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        (self.objective)(x)
    }

    fn gradient(&self, x: &[f64], step: f64, grad: &mut [f64]) {
        let mut probe = x.to_vec();
        for i in 0..self.dim {
            let h = step * x[i].abs().max(1.0);
            probe[i] = x[i] + h;
            let up = self.eval(&probe);
            probe[i] = x[i] - h;
            let down = self.eval(&probe);
            probe[i] = x[i];
            grad[i] = (up - down) / (2.0 * h);
        }
    }

    /// Start `k`: every group filled to its budget along a deterministic
    /// (k = 0) or random direction.
    fn start(&self, k: usize, seed: u64, anchor: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.dim];
        if k == 0 {
            x.copy_from_slice(anchor);
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            x.iter_mut().for_each(|v| *v = rng.sample(StandardNormal));
        }
        for g in &self.groups {
            let sq: f64 = g.indices.iter().map(|&i| x[i] * x[i]).sum();
            let s = if sq > 0.0 {
                (g.budget / sq).sqrt()
            } else {
                0.0
            };
            g.indices.iter().for_each(|&i| x[i] *= s);
        }
        x
    }
}

const ARMIJO: f64 = 1e-4;
const STALL_WINDOW: usize = 8;

fn ascend(problem: &Problem<'_>, mut x: Vec<f64>, opts: &SolverSettings) -> Result<Ascent> {
    problem.project(&mut x);
    let mut fx = problem.eval(&x);
    if !fx.is_finite() {
        return Err(Error::SolverDiverged(
            "non-finite objective at start".into(),
        ));
    }
    let mut grad = vec![0.0; problem.dim];
    let mut eta = 1.0;
    let mut stalls = 0;
    for _ in 0..opts.max_iters {
        problem.gradient(&x, opts.grad_step, &mut grad);
        if grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::SolverDiverged("non-finite gradient".into()));
        }
        let mut accepted = None;
        for _ in 0..60 {
            let mut trial: Vec<f64> = x.iter().zip(&grad).map(|(a, g)| a + eta * g).collect();
            problem.project(&mut trial);
            let ft = problem.eval(&trial);
            let lin: f64 = grad
                .iter()
                .zip(trial.iter().zip(&x))
                .map(|(g, (t, a))| g * (t - a))
                .sum();
            if ft.is_finite() && ft >= fx + ARMIJO * lin && ft >= fx {
                accepted = Some((trial, ft));
                break;
            }
            eta *= 0.5;
        }
        let Some((trial, ft)) = accepted else { break };
        let gain = ft - fx;
        x = trial;
        fx = ft;
        eta = (eta * 2.0).min(1e6);
        if gain <= opts.rel_tol * fx.abs().max(1.0) {
            stalls += 1;
            if stalls >= STALL_WINDOW {
                break;
            }
        } else {
            stalls = 0;
        }
    }
    Ok(Ascent { x, value: fx })
}

/// Runs `opts.starts` ascents (start 0 from `anchor`) plus one per warm
/// start and keeps the best; ties go to the earliest start.
pub(crate) fn maximize(
    problem: &Problem<'_>,
    opts: &SolverSettings,
    anchor: &[f64],
    warm: &[Vec<f64>],
) -> Result<Ascent> {
    let mut inits: Vec<Vec<f64>> = (0..opts.starts)
        .map(|k| problem.start(k, opts.seed, anchor))
        .collect();
    inits.extend(warm.iter().cloned());
    let runs = parallel::map_ordered(inits, |x0| ascend(problem, x0, opts));
    let mut best: Option<Ascent> = None;
    for r in runs {
        let r = r?;
        if best.as_ref().is_none_or(|b| r.value > b.value) {
            best = Some(r);
        }
    }
    best.ok_or_else(|| Error::SolverDiverged("no starts".into()))
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section minimization of a unimodal `f` on `[lo, hi]`.
pub fn golden_min<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while (b - a).abs() > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_minimum() {
        let (x, fx) = golden_min(|x| (x - 0.3).powi(2) + 1.0, -2.0, 5.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-6);
        assert!((fx - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ascent_on_ball_hits_boundary() {
        // max <c, x> on |x|^2 <= 4 is 2|c|.
        let f = |x: &[f64]| 3.0 * x[0] - 4.0 * x[1];
        let problem = Problem {
            dim: 2,
            groups: vec![BallGroup {
                indices: vec![0, 1],
                budget: 4.0,
            }],
            objective: &f,
        };
        let opts = SolverSettings {
            starts: 4,
            ..SolverSettings::default()
        };
        let best = maximize(&problem, &opts, &[1.0, 0.0], &[]).unwrap();
        assert!((best.value - 10.0).abs() < 1e-9, "{}", best.value);
    }

    #[test]
    fn nan_objective_is_reported() {
        let f = |_: &[f64]| f64::NAN;
        let problem = Problem {
            dim: 1,
            groups: vec![],
            objective: &f,
        };
        let r = maximize(&problem, &SolverSettings::default(), &[0.0], &[]);
        assert!(matches!(r, Err(Error::SolverDiverged(_))));
    }
}
