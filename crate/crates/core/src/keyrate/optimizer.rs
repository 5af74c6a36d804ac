//! Constrained search for the calibration that maximizes the adversary bound.
//!
//! The bound `h2((1 - t) / 2)`, with `t = E(X'bar Y')` the bottom-right entry
//! of the transformed matrix, is even in `t` and decreasing in `|t|`, so the
//! search minimizes `|t|` and applies `h2` once at the end.
//!
//! `t` and the feasibility of Alice's second row depend only on
//! `(x3, x4, theta)`; row 1 of the transform depends only on `(x1, x2)` and
//! is feasible at `(0, 1)` for every valid input. The search therefore pins
//! `(x1, x2) = (0, 1)` and explores the remaining three coordinates as
//! `(u3, x4, theta)` with `x3 = u3 (x4 - 1)`, which turns `x4 >= 1 + |x3|`
//! into the box `|u3| <= 1`.

use std::cmp::Ordering;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::calibration::{feasible, transform, CalibrationParams, DataMatrix};
use crate::error::{Error, Result};

/// The search never evaluates `theta` outside `[THETA_MARGIN, pi - THETA_MARGIN]`.
pub const THETA_MARGIN: f64 = 1e-6;

/// `|t|` at or below this saturates the bound at one bit.
pub const ZERO_CORRELATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerSettings {
    /// Upper end of the `x2`, `x4` search box.
    pub x_max: f64,
    /// Grid points per axis for `x4` and `u3`; `theta` gets `2 grid + 1`.
    pub grid: usize,
    /// Number of best grid points refined by coordinate descent.
    pub starts: usize,
    /// Refinement stops once every step is below this fraction of its range.
    pub step_tol: f64,
    pub max_sweeps: usize,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self {
            x_max: 8.0,
            grid: 21,
            starts: 8,
            step_tol: 1e-12,
            max_sweeps: 5_000,
        }
    }
}

impl OptimizerSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.x_max.is_finite() && self.x_max > 1.0) {
            return Err(crate::error::domain("x_max", self.x_max, "(1, inf)"));
        }
        if self.grid < 2 {
            return Err(crate::error::domain("grid", self.grid as f64, "[2, inf)"));
        }
        if self.starts == 0 {
            return Err(crate::error::domain("starts", 0.0, "[1, inf)"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimizerTrace {
    pub evaluations: usize,
    pub feasible_grid_points: usize,
    pub refinement_sweeps: usize,
    pub best_params: CalibrationParams,
    /// Smallest constraint slack of the transformed matrix at the optimum.
    pub feasibility_margin: f64,
    /// Minimized `|E(X'bar Y')|`.
    pub min_abs_correlation: f64,
    /// Smallest and largest `theta` evaluated.
    pub theta_range: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub value: f64,
    pub params: CalibrationParams,
    pub margin: f64,
}

fn candidate_order(a: &Candidate, b: &Candidate) -> Ordering {
    a.value.total_cmp(&b.value).then_with(|| {
        let (ta, tb) = (a.params.as_tuple(), b.params.as_tuple());
        ta.iter()
            .zip(tb.iter())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    })
}

struct Box3 {
    lo: [f64; 3],
    hi: [f64; 3],
}

impl Box3 {
    fn new(x_max: f64) -> Self {
        Self {
            lo: [-1.0, 1.0, THETA_MARGIN],
            hi: [1.0, x_max, PI - THETA_MARGIN],
        }
    }

    fn clamp(&self, c: [f64; 3]) -> [f64; 3] {
        [0, 1, 2].map(|k| c[k].clamp(self.lo[k], self.hi[k]))
    }

    fn axis(&self, k: usize, n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| {
                if i + 1 == n {
                    self.hi[k]
                } else {
                    self.lo[k] + (self.hi[k] - self.lo[k]) * i as f64 / (n - 1) as f64
                }
            })
            .collect()
    }
}

/// `|E(X'bar Y')|` of the transformed matrix at `(u3, x4, theta)`, or `None`
/// when the calibration or its output is infeasible.
pub fn evaluate(d: &DataMatrix, coords: [f64; 3]) -> Option<Candidate> {
    let [u3, x4, theta] = coords;
    let params = CalibrationParams::new(0.0, 1.0, u3 * (x4 - 1.0), x4, theta).ok()?;
    let dbar = transform(d, &params).ok()?;
    let check = feasible(&dbar);
    check.is_feasible().then(|| Candidate {
        value: dbar.get(2, 2).abs(),
        params,
        margin: check.margin,
    })
}

struct Refined {
    best: Candidate,
    evaluations: usize,
    sweeps: usize,
    theta_min: f64,
    theta_max: f64,
}

fn refine(d: &DataMatrix, bounds: &Box3, start: [f64; 3], start_val: Candidate, steps: [f64; 3], s: &OptimizerSettings) -> Refined {
    let mut x = start;
    let mut best = start_val;
    let mut step = steps;
    let min_step: [f64; 3] = [0, 1, 2].map(|k| s.step_tol * (bounds.hi[k] - bounds.lo[k]));
    let mut out = Refined {
        best,
        evaluations: 0,
        sweeps: 0,
        theta_min: start[2],
        theta_max: start[2],
    };
    while out.sweeps < s.max_sweeps {
        out.sweeps += 1;
        let mut moved = false;
        for k in 0..3 {
            for dir in [1.0, -1.0] {
                let mut cand = x;
                cand[k] += dir * step[k];
                let cand = bounds.clamp(cand);
                if cand == x {
                    continue;
                }
                out.evaluations += 1;
                out.theta_min = out.theta_min.min(cand[2]);
                out.theta_max = out.theta_max.max(cand[2]);
                if let Some(c) = evaluate(d, cand) {
                    if candidate_order(&c, &best) == Ordering::Less {
                        best = c;
                        x = cand;
                        moved = true;
                        break;
                    }
                }
            }
        }
        if !moved {
            for k in 0..3 {
                step[k] *= 0.5;
            }
            if (0..3).all(|k| step[k] < min_step[k]) {
                break;
            }
        }
    }
    out.best = best;
    out
}

/// Minimizes `|E(X'bar Y')|` over feasible calibrations by a grid scan
/// followed by coordinate-descent refinement of the best grid points.
///
/// The result does not depend on evaluation order: ties are broken by the
/// lexicographically smallest `(x1, x2, x3, x4, theta)`.
pub fn minimize_correlation(d: &DataMatrix, s: &OptimizerSettings) -> Result<(Candidate, OptimizerTrace)> {
    s.validate()?;
    let bounds = Box3::new(s.x_max);
    let u3s = bounds.axis(0, s.grid);
    let x4s = bounds.axis(1, s.grid);
    let thetas = bounds.axis(2, 2 * s.grid + 1);

    let mut grid: Vec<([f64; 3], Candidate)> = thetas
        .par_iter()
        .flat_map_iter(|&theta| {
            let x4s = &x4s;
            u3s.iter().flat_map(move |&u3| {
                x4s.iter().filter_map(move |&x4| {
                    let c = [u3, x4, theta];
                    evaluate(d, c).map(|v| (c, v))
                })
            })
        })
        .collect();
    let grid_evals = thetas.len() * u3s.len() * x4s.len();
    if grid.is_empty() {
        return Err(Error::NoFeasiblePoint);
    }
    grid.sort_by(|a, b| candidate_order(&a.1, &b.1));
    let feasible_grid_points = grid.len();
    grid.dedup_by(|a, b| a.1.params == b.1.params);

    let steps = [
        2.0 / (s.grid - 1) as f64,
        (s.x_max - 1.0) / (s.grid - 1) as f64,
        (PI - 2.0 * THETA_MARGIN) / (2 * s.grid) as f64,
    ];
    let refined: Vec<Refined> = grid
        .par_iter()
        .take(s.starts)
        .map(|&(c, v)| refine(d, &bounds, c, v, steps, s))
        .collect();

    let best = refined
        .iter()
        .map(|r| r.best)
        .min_by(candidate_order)
        .expect("at least one start");
    let trace = OptimizerTrace {
        evaluations: grid_evals + refined.iter().map(|r| r.evaluations).sum::<usize>(),
        feasible_grid_points,
        refinement_sweeps: refined.iter().map(|r| r.sweeps).sum(),
        best_params: best.params,
        feasibility_margin: best.margin,
        min_abs_correlation: best.value,
        theta_range: [
            refined.iter().map(|r| r.theta_min).fold(bounds.lo[2], f64::min),
            refined.iter().map(|r| r.theta_max).fold(bounds.hi[2], f64::max),
        ],
    };
    Ok((best, trace))
}
