//! Rate-region boundaries traced by μ-sum maximization, and their CSV/JSON
//! forms.

use serde::Serialize;
use serde_json::{json, Value};

use crate::achievable::RatePair;
use crate::channel::CognitiveChannel;
use crate::matrix::CMatrix;
use crate::optimizer::SolverSettings;

pub const SCHEMA_VERSION: u32 = 1;
pub const CSV_HEADER: &str = "mu,r_p,r_c";

/// Anything that can be attached to a boundary point as the allocation
/// achieving it.
pub trait Witness: Clone {
    fn to_json(&self) -> Value;
}

/// Real matrices become nested arrays of numbers; complex ones carry
/// `[re, im]` pairs.
pub fn matrix_json(m: &CMatrix) -> Value {
    let real = m.iter().all(|z| z.im == 0.0);
    let rows: Vec<Value> = (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| {
                    let z = m[(i, j)];
                    if real {
                        json!(z.re)
                    } else {
                        json!([z.re, z.im])
                    }
                })
                .collect()
        })
        .collect();
    Value::Array(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryPoint<W> {
    pub mu: f64,
    pub rate: RatePair,
    pub witness: W,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryMetadata {
    pub kind: String,
    pub alpha: Option<f64>,
    pub channel: String,
    pub settings: SolverSettings,
    /// Points whose own solve was beaten at their μ by another grid point's
    /// solution and were swapped for it.
    pub replaced: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionBoundary<W> {
    pub points: Vec<BoundaryPoint<W>>,
    pub metadata: BoundaryMetadata,
}

impl<W: Witness> RegionBoundary<W> {
    /// Sorts by μ descending and keeps, for every μ, the best supporting
    /// point among all solutions found on the grid.
    pub fn from_points(
        mut points: Vec<BoundaryPoint<W>>,
        ch: &CognitiveChannel,
        settings: &SolverSettings,
        kind: &str,
        alpha: Option<f64>,
    ) -> Self {
        points.sort_by(|a, b| b.mu.total_cmp(&a.mu));
        let replaced = upper_hull(&mut points);
        Self {
            points,
            metadata: BoundaryMetadata {
                kind: kind.to_string(),
                alpha,
                channel: ch.fingerprint(),
                settings: *settings,
                replaced,
            },
        }
    }

    /// `r_p` nonincreasing and `r_c` nondecreasing along the list, up to
    /// `tol`.
    pub fn is_pareto_ordered(&self, tol: f64) -> bool {
        self.points.windows(2).all(|w| {
            w[0].mu >= w[1].mu
                && w[1].rate.r_p <= w[0].rate.r_p + tol
                && w[1].rate.r_c + tol >= w[0].rate.r_c
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for p in &self.points {
            out.push_str(&format!("{},{},{}\n", p.mu, p.rate.r_p, p.rate.r_c));
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let points: Vec<Value> = self
            .points
            .iter()
            .map(|p| {
                json!({
                    "mu": p.mu,
                    "r_p": p.rate.r_p,
                    "r_c": p.rate.r_c,
                    "witness": p.witness.to_json(),
                })
            })
            .collect();
        json!({
            "schema": SCHEMA_VERSION,
            "metadata": self.metadata,
            "points": points,
        })
    }

    pub fn max_r_p(&self) -> f64 {
        self.points.iter().map(|p| p.rate.r_p).fold(0.0, f64::max)
    }
}

/// For each μ, picks the grid solution with the largest `μ·r_p + r_c`
/// (ties keep the point's own solution). Returns how many were swapped.
fn upper_hull<W: Clone>(points: &mut [BoundaryPoint<W>]) -> usize {
    let candidates: Vec<(RatePair, W)> =
        points.iter().map(|p| (p.rate, p.witness.clone())).collect();
    let mut replaced = 0;
    for p in points.iter_mut() {
        let own = p.rate.mu_sum(p.mu);
        let best = candidates
            .iter()
            .max_by(|a, b| a.0.mu_sum(p.mu).total_cmp(&b.0.mu_sum(p.mu)))
            .expect("nonempty");
        if best.0.mu_sum(p.mu) > own {
            p.rate = best.0;
            p.witness = best.1.clone();
            replaced += 1;
        }
    }
    replaced
}
