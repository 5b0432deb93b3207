//! Dense two-phase simplex for small programs in equality form.
//!
//! Solves `max cᵀx  s.t.  Ax = b, x ≥ 0`. The row count is tiny (a handful of
//! belief and payoff rows) while the column count can reach several thousand
//! grid atoms, so a full tableau is cheap. Optimal solutions expose their
//! basis and duals; infeasible programs expose a Farkas ray.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-9;
const DEGENERATE_RUN: usize = 40;

#[derive(Clone, Debug)]
pub struct LinearProgram {
    rows: usize,
    columns: Vec<Vec<f64>>,
    b: Vec<f64>,
    c: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    /// Row duals `y` with `cⱼ − yᵀAⱼ ≤ 0` for every column.
    pub duals: Vec<f64>,
    /// Structural columns in the final basis.
    pub basis: Vec<usize>,
}

/// Certificate of infeasibility: `Aᵀy ≥ 0` and `bᵀy < 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct FarkasRay {
    pub y: Vec<f64>,
    /// Phase-one residual `Σ|artificial|` at termination.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible(FarkasRay),
    Unbounded,
}

impl LinearProgram {
    /// `columns[j]` is column `j` of `A`, each of length `b.len()`.
    pub fn from_columns(columns: Vec<Vec<f64>>, b: Vec<f64>, c: Vec<f64>) -> Result<Self> {
        let rows = b.len();
        if columns.len() != c.len() {
            return Err(Error::Lp(format!("{} columns but {} costs", columns.len(), c.len())));
        }
        if let Some(bad) = columns.iter().position(|col| col.len() != rows) {
            return Err(Error::Lp(format!("column {bad} has wrong length")));
        }
        let finite = columns.iter().flatten().chain(&b).chain(&c).all(|v| v.is_finite());
        if !finite {
            return Err(Error::Lp("non-finite coefficient".into()));
        }
        Ok(Self { rows, columns, b, c })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn solve(&self) -> Result<LpOutcome> {
        Tableau::new(self).run(self)
    }
}

struct Tableau {
    m: usize,
    n: usize,
    width: usize,
    t: Vec<f64>,
    r: Vec<f64>,
    basis: Vec<usize>,
    flipped: Vec<bool>,
    bland: bool,
    degenerate: usize,
    iterations: usize,
}

impl Tableau {
    fn new(lp: &LinearProgram) -> Self {
        let m = lp.rows;
        let n = lp.columns.len();
        let width = n + m + 1;
        let mut t = vec![0.0; m * width];
        let mut flipped = vec![false; m];
        for i in 0..m {
            let sign = if lp.b[i] < 0.0 { -1.0 } else { 1.0 };
            flipped[i] = sign < 0.0;
            let row = &mut t[i * width..(i + 1) * width];
            for (j, col) in lp.columns.iter().enumerate() {
                row[j] = sign * col[i];
            }
            row[n + i] = 1.0;
            row[width - 1] = sign * lp.b[i];
        }
        Self {
            m,
            n,
            width,
            t,
            r: vec![0.0; width],
            basis: (n..n + m).collect(),
            flipped,
            bland: false,
            degenerate: 0,
            iterations: 0,
        }
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.t[i * self.width..(i + 1) * self.width]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.t[i * self.width + self.width - 1]
    }

    fn set_costs(&mut self, costs: &[f64]) {
        self.r.fill(0.0);
        self.r[..costs.len()].copy_from_slice(costs);
        for i in 0..self.m {
            let cb = costs[self.basis[i]];
            if cb != 0.0 {
                let start = i * self.width;
                for j in 0..self.width {
                    self.r[j] -= cb * self.t[start + j];
                }
            }
        }
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let w = self.width;
        let p = self.t[row * w + col];
        for j in 0..w {
            self.t[row * w + j] /= p;
        }
        self.t[row * w + col] = 1.0;
        let pivot_row: Vec<f64> = self.t[row * w..(row + 1) * w].to_vec();
        for i in 0..self.m {
            if i == row {
                continue;
            }
            let f = self.t[i * w + col];
            if f != 0.0 {
                let target = &mut self.t[i * w..(i + 1) * w];
                for (x, pv) in target.iter_mut().zip(&pivot_row) {
                    *x -= f * pv;
                }
                target[col] = 0.0;
            }
        }
        let f = self.r[col];
        if f != 0.0 {
            for (x, pv) in self.r.iter_mut().zip(&pivot_row) {
                *x -= f * pv;
            }
            self.r[col] = 0.0;
        }
        self.basis[row] = col;
    }

    /// Runs simplex iterations over the columns `0..limit`.
    fn optimize(&mut self, limit: usize, dual_tol: f64) -> Result<bool> {
        let max_iter = 200 * (self.m + self.n) + 5_000;
        loop {
            self.iterations += 1;
            if self.iterations > max_iter {
                return Err(Error::Lp("iteration limit reached".into()));
            }
            let entering = if self.bland {
                (0..limit).find(|&j| self.r[j] > dual_tol)
            } else {
                let mut best = None;
                let mut best_val = dual_tol;
                for j in 0..limit {
                    if self.r[j] > best_val {
                        best_val = self.r[j];
                        best = Some(j);
                    }
                }
                best
            };
            let Some(col) = entering else {
                return Ok(true);
            };

            let mut leave: Option<(usize, f64, f64)> = None;
            for i in 0..self.m {
                let a = self.t[i * self.width + col];
                if a <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.rhs(i).max(0.0) / a;
                leave = match leave {
                    None => Some((i, ratio, a)),
                    Some((bi, br, ba)) => {
                        let tie = (ratio - br).abs() <= 1e-12 * (1.0 + br.abs());
                        let better = if tie {
                            if self.bland {
                                self.basis[i] < self.basis[bi]
                            } else {
                                a > ba
                            }
                        } else {
                            ratio < br
                        };
                        if better {
                            Some((i, ratio, a))
                        } else {
                            Some((bi, br, ba))
                        }
                    }
                };
            }
            let Some((row, ratio, _)) = leave else {
                return Ok(false);
            };
            if ratio <= 1e-12 {
                self.degenerate += 1;
                if self.degenerate > DEGENERATE_RUN {
                    self.bland = true;
                }
            } else {
                self.degenerate = 0;
            }
            self.pivot(row, col);
        }
    }

    fn run(mut self, lp: &LinearProgram) -> Result<LpOutcome> {
        let (m, n) = (self.m, self.n);
        if m == 0 {
            let unbounded = lp.c.iter().any(|&c| c > 0.0);
            return Ok(if unbounded {
                LpOutcome::Unbounded
            } else {
                LpOutcome::Optimal(LpSolution {
                    x: vec![0.0; n],
                    objective: 0.0,
                    duals: vec![],
                    basis: vec![],
                })
            });
        }
        let b_scale = lp.b.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        let col_scale = lp.columns.iter().flatten().fold(1.0f64, |a, v| a.max(v.abs()));

        // Phase one: maximize −Σ artificials.
        let mut phase1 = vec![0.0; n + m];
        for c in phase1.iter_mut().skip(n) {
            *c = -1.0;
        }
        self.set_costs(&phase1);
        self.optimize(n + m, 1e-11 * col_scale)?;
        let residual = self.r[self.width - 1];
        if residual > 1e-9 * b_scale {
            let y: Vec<f64> = (0..m)
                .map(|k| {
                    let yk = -1.0 - self.r[n + k];
                    if self.flipped[k] {
                        -yk
                    } else {
                        yk
                    }
                })
                .collect();
            return Ok(LpOutcome::Infeasible(FarkasRay { y, residual }));
        }

        // Drive remaining artificials out of the basis where possible.
        for i in 0..m {
            if self.basis[i] < n {
                continue;
            }
            let row = self.row(i);
            let mut best = None;
            let mut best_abs = 1e-7;
            for (j, &v) in row.iter().enumerate().take(n) {
                if v.abs() > best_abs {
                    best_abs = v.abs();
                    best = Some(j);
                }
            }
            if let Some(j) = best {
                self.pivot(i, j);
            }
        }

        // Phase two over structural columns only.
        let mut phase2 = vec![0.0; n + m];
        phase2[..n].copy_from_slice(&lp.c);
        let c_scale = lp.c.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        self.set_costs(&phase2);
        self.bland = false;
        self.degenerate = 0;
        if !self.optimize(n, 1e-11 * c_scale * col_scale)? {
            return Ok(LpOutcome::Unbounded);
        }

        let mut x = vec![0.0; n];
        for i in 0..m {
            if self.basis[i] < n {
                x[self.basis[i]] = self.rhs(i).max(0.0);
            }
        }
        self.polish(lp, &mut x);
        let duals: Vec<f64> = (0..m)
            .map(|k| {
                let yk = -self.r[n + k];
                if self.flipped[k] {
                    -yk
                } else {
                    yk
                }
            })
            .collect();
        let objective = x.iter().zip(&lp.c).map(|(a, b)| a * b).sum();
        let mut basis: Vec<usize> = self.basis.iter().copied().filter(|&j| j < n).collect();
        basis.sort_unstable();
        Ok(LpOutcome::Optimal(LpSolution {
            x,
            objective,
            duals,
            basis,
        }))
    }

    /// Re-solves `B x_B = b` with an LU factorization to strip accumulated
    /// tableau round-off. Keeps the tableau values if the refit is worse.
    fn polish(&self, lp: &LinearProgram, x: &mut [f64]) {
        let (m, n) = (self.m, self.n);
        let basis_matrix = DMatrix::from_fn(m, m, |i, k| {
            let j = self.basis[k];
            if j < n {
                lp.columns[j][i]
            } else {
                // Artificial column in the original row orientation.
                let sign = if self.flipped[j - n] { -1.0 } else { 1.0 };
                if i == j - n {
                    sign
                } else {
                    0.0
                }
            }
        });
        let rhs = DVector::from_column_slice(&lp.b);
        let Some(sol) = basis_matrix.lu().solve(&rhs) else {
            return;
        };
        let mut candidate = x.to_vec();
        for (k, &j) in self.basis.iter().enumerate() {
            if j < n {
                let v = sol[k];
                if !v.is_finite() || v < -1e-7 {
                    return;
                }
                candidate[j] = v.max(0.0);
            }
        }
        if residual(lp, &candidate) <= residual(lp, x) {
            x.copy_from_slice(&candidate);
        }
    }
}

fn residual(lp: &LinearProgram, x: &[f64]) -> f64 {
    let mut ax = vec![0.0; lp.rows];
    for (col, &xj) in lp.columns.iter().zip(x) {
        if xj != 0.0 {
            for (a, v) in ax.iter_mut().zip(col) {
                *a += v * xj;
            }
        }
    }
    ax.iter().zip(&lp.b).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}
