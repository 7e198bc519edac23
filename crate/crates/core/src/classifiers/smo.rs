//! Sequential minimal optimization for the soft-margin SVM dual.
//!
//! Maximizes `W(a) = sum(a) - 1/2 sum_ij a_i a_j y_i y_j K(x_i, x_j)`
//! subject to `0 <= a_i <= C` and `sum(a_i y_i) = 0`, two multipliers at a
//! time. The outer loop alternates full sweeps with sweeps over the
//! non-bound multipliers; the second multiplier is picked by the largest
//! `|E1 - E2|`, then by scans from a seeded random start.
//!
//! Decision function: `f(x) = sum_i a_i y_i K(x_i, x) + b`, errors
//! `E_i = f(x_i) - y_i`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

/// Upper bound on outer sweeps; reached only by numerically degenerate
/// problems.
const MAX_SWEEPS: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Kernel {
    /// `x . z`
    Linear,
    /// `(x . z + 1)^degree`
    Polynomial { degree: u32 },
}

impl Kernel {
    pub fn eval(&self, x: &[f64], z: &[f64]) -> f64 {
        let dot: f64 = x.iter().zip(z).map(|(a, b)| a * b).sum();
        match self {
            Kernel::Linear => dot,
            Kernel::Polynomial { degree } => (dot + 1.0).powi(*degree as i32),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoParams {
    /// Soft-margin penalty.
    pub c: f64,
    /// KKT violation tolerance.
    pub tolerance: f64,
    /// Minimum relative multiplier change for a step to count.
    pub eps: f64,
    pub kernel: Kernel,
    /// Seeds the start positions of the fallback scans.
    pub seed: u64,
}

impl Default for SmoParams {
    fn default() -> Self {
        SmoParams {
            c: 1.0,
            tolerance: 1e-3,
            eps: 1e-12,
            kernel: Kernel::Linear,
            seed: 1,
        }
    }
}

impl SmoParams {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.c) {
            return Err(Error::InvalidParam(format!("SMO c must be > 0, got {}", self.c)));
        }
        if !positive(self.tolerance) {
            return Err(Error::InvalidParam(format!(
                "SMO tolerance must be > 0, got {}",
                self.tolerance
            )));
        }
        if !positive(self.eps) {
            return Err(Error::InvalidParam(format!("SMO eps must be > 0, got {}", self.eps)));
        }
        if let Kernel::Polynomial { degree: 0 } = self.kernel {
            return Err(Error::InvalidParam("polynomial degree must be >= 1".into()));
        }
        Ok(())
    }
}

/// Dual objective value at `alphas`.
pub fn dual_objective(points: &[Vec<f64>], labels: &[f64], kernel: Kernel, alphas: &[f64]) -> f64 {
    let mut quad = 0.0;
    for i in 0..points.len() {
        if alphas[i] == 0.0 {
            continue;
        }
        for j in 0..points.len() {
            if alphas[j] != 0.0 {
                quad += alphas[i] * alphas[j] * labels[i] * labels[j] * kernel.eval(&points[i], &points[j]);
            }
        }
    }
    alphas.iter().sum::<f64>() - 0.5 * quad
}

/// State snapshot recorded after each accepted step when tracing.
#[derive(Clone, Debug, PartialEq)]
pub struct TracePoint {
    pub objective: f64,
    /// `sum(a_i y_i)`
    pub equality_residual: f64,
    pub min_alpha: f64,
    pub max_alpha: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SmoSolution {
    pub alphas: Vec<f64>,
    pub bias: f64,
    pub steps: usize,
    pub sweeps: usize,
    pub converged: bool,
    pub trace: Vec<TracePoint>,
}

impl SmoSolution {
    pub fn decision(&self, points: &[Vec<f64>], labels: &[f64], kernel: Kernel, x: &[f64]) -> f64 {
        let mut f = self.bias;
        for ((a, y), p) in self.alphas.iter().zip(labels).zip(points) {
            if *a > 0.0 {
                f += a * y * kernel.eval(p, x);
            }
        }
        f
    }
}

struct Solver<'a> {
    points: &'a [Vec<f64>],
    labels: &'a [f64],
    params: &'a SmoParams,
    alphas: Vec<f64>,
    errors: Vec<f64>,
    diag: Vec<f64>,
    bias: f64,
    steps: usize,
    rng: rand_chacha::ChaCha8Rng,
    trace: Option<Vec<TracePoint>>,
}

impl Solver<'_> {
    fn k(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.diag[i]
        } else {
            self.params.kernel.eval(&self.points[i], &self.points[j])
        }
    }

    fn non_bound(&self, i: usize) -> bool {
        self.alphas[i] > 0.0 && self.alphas[i] < self.params.c
    }

    fn take_step(&mut self, i1: usize, i2: usize) -> bool {
        if i1 == i2 {
            return false;
        }
        let c = self.params.c;
        let eps = self.params.eps;
        let (a1, a2) = (self.alphas[i1], self.alphas[i2]);
        let (y1, y2) = (self.labels[i1], self.labels[i2]);
        let (e1, e2) = (self.errors[i1], self.errors[i2]);
        let s = y1 * y2;

        let (lo, hi) = if s < 0.0 {
            ((a2 - a1).max(0.0), (c + a2 - a1).min(c))
        } else {
            ((a2 + a1 - c).max(0.0), (a2 + a1).min(c))
        };
        if lo >= hi {
            return false;
        }

        let (k11, k12, k22) = (self.k(i1, i1), self.k(i1, i2), self.k(i2, i2));
        let eta = k11 + k22 - 2.0 * k12;
        let mut new_a2 = if eta > 0.0 {
            (a2 + y2 * (e1 - e2) / eta).clamp(lo, hi)
        } else {
            // objective change along the constraint line, as a function of
            // the step in a2
            let gain = |d2: f64| y2 * d2 * (e1 - e2) - 0.5 * eta * d2 * d2;
            let (g_lo, g_hi) = (gain(lo - a2), gain(hi - a2));
            if g_lo > g_hi + eps {
                lo
            } else if g_hi > g_lo + eps {
                hi
            } else {
                a2
            }
        };
        // snap round-off onto the box
        if new_a2 < 1e-12 * c {
            new_a2 = 0.0;
        } else if new_a2 > c * (1.0 - 1e-12) {
            new_a2 = c;
        }
        if (new_a2 - a2).abs() < eps * (new_a2 + a2 + eps) {
            return false;
        }
        let mut new_a1 = a1 + s * (a2 - new_a2);
        if new_a1 < 1e-12 * c {
            new_a1 = 0.0;
        } else if new_a1 > c * (1.0 - 1e-12) {
            new_a1 = c;
        }

        let (d1, d2) = (y1 * (new_a1 - a1), y2 * (new_a2 - a2));
        let b1 = self.bias - e1 - d1 * k11 - d2 * k12;
        let b2 = self.bias - e2 - d1 * k12 - d2 * k22;
        let new_bias = if new_a1 > 0.0 && new_a1 < c {
            b1
        } else if new_a2 > 0.0 && new_a2 < c {
            b2
        } else {
            0.5 * (b1 + b2)
        };
        let db = new_bias - self.bias;

        for k in 0..self.points.len() {
            let k1k = if k == i1 {
                k11
            } else if k == i2 {
                k12
            } else {
                self.k(i1, k)
            };
            let k2k = if k == i2 {
                k22
            } else if k == i1 {
                k12
            } else {
                self.k(i2, k)
            };
            self.errors[k] += d1 * k1k + d2 * k2k + db;
        }
        self.alphas[i1] = new_a1;
        self.alphas[i2] = new_a2;
        self.bias = new_bias;
        self.steps += 1;

        if let Some(trace) = &mut self.trace {
            trace.push(TracePoint {
                objective: dual_objective(self.points, self.labels, self.params.kernel, &self.alphas),
                equality_residual: self.alphas.iter().zip(self.labels).map(|(a, y)| a * y).sum(),
                min_alpha: self.alphas.iter().copied().fold(f64::INFINITY, f64::min),
                max_alpha: self.alphas.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            });
        }
        true
    }

    fn examine(&mut self, i2: usize) -> bool {
        let n = self.points.len();
        let (y2, a2, e2) = (self.labels[i2], self.alphas[i2], self.errors[i2]);
        let r2 = e2 * y2;
        let tol = self.params.tolerance;
        if !((r2 < -tol && a2 < self.params.c) || (r2 > tol && a2 > 0.0)) {
            return false;
        }

        let non_bound: Vec<usize> = (0..n).filter(|&i| self.non_bound(i)).collect();
        if non_bound.len() > 1 {
            let mut best = None;
            let mut best_gap = -1.0;
            for &i in &non_bound {
                let gap = (self.errors[i] - e2).abs();
                if gap > best_gap {
                    best_gap = gap;
                    best = Some(i);
                }
            }
            if let Some(i1) = best {
                if self.take_step(i1, i2) {
                    return true;
                }
            }
        }
        if !non_bound.is_empty() {
            let start = self.rng.gen_range(0..non_bound.len());
            for off in 0..non_bound.len() {
                let i1 = non_bound[(start + off) % non_bound.len()];
                if self.take_step(i1, i2) {
                    return true;
                }
            }
        }
        let start = self.rng.gen_range(0..n);
        for off in 0..n {
            if self.take_step((start + off) % n, i2) {
                return true;
            }
        }
        false
    }
}

/// Solves the dual for `points` with labels in `{-1, +1}`.
pub fn solve(points: &[Vec<f64>], labels: &[f64], params: &SmoParams) -> Result<SmoSolution> {
    solve_inner(points, labels, params, false)
}

/// As [`solve`], recording objective and feasibility after every step.
pub fn solve_traced(points: &[Vec<f64>], labels: &[f64], params: &SmoParams) -> Result<SmoSolution> {
    solve_inner(points, labels, params, true)
}

fn solve_inner(points: &[Vec<f64>], labels: &[f64], params: &SmoParams, traced: bool) -> Result<SmoSolution> {
    params.validate()?;
    if points.len() != labels.len() {
        return Err(Error::InvalidParam("points and labels differ in length".into()));
    }
    if points.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if labels.iter().any(|&y| y != 1.0 && y != -1.0) {
        return Err(Error::InvalidParam("labels must be -1 or +1".into()));
    }
    if points.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("encoded feature".into()));
    }

    let n = points.len();
    let mut solver = Solver {
        points,
        labels,
        params,
        alphas: vec![0.0; n],
        errors: labels.iter().map(|y| -y).collect(),
        diag: points.iter().map(|p| params.kernel.eval(p, p)).collect(),
        bias: 0.0,
        steps: 0,
        rng: seed::rng(params.seed),
        trace: traced.then(Vec::new),
    };

    let mut examine_all = true;
    let mut sweeps = 0;
    let mut converged = false;
    while sweeps < MAX_SWEEPS {
        sweeps += 1;
        let mut changed = 0;
        for i in 0..n {
            if (examine_all || solver.non_bound(i)) && solver.examine(i) {
                changed += 1;
            }
        }
        if examine_all {
            if changed == 0 {
                converged = true;
                break;
            }
            examine_all = false;
        } else if changed == 0 {
            examine_all = true;
        }
    }

    Ok(SmoSolution {
        alphas: solver.alphas,
        bias: solver.bias,
        steps: solver.steps,
        sweeps,
        converged,
        trace: solver.trace.unwrap_or_default(),
    })
}
