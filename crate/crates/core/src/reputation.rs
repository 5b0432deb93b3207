//! Linear expected reputation: `w(μ, θ) = μᵀρ` for every type.
//!
//! A distribution over posteriors enters the profile only through the
//! second-moment matrix `C = Σ α μ μᵀ`, and `w = D0 C ρ` with
//! `D0 = diag(1/μ0)`.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::ipset::Direction;
use crate::model::{dot, BeliefDistribution, IPProfile, InformationStructure, Prior, WeightedAtom};

pub type Matrix = Vec<Vec<f64>>;

pub const ROW_SUM_TOL: f64 = 1e-7;
const SYMMETRY_TOL: f64 = 1e-9;
const ENTRY_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-8;
const MARKOV_TOL: f64 = 1e-8;
pub const MEAN_REVERSION_STEPS: usize = 50;
pub const MEAN_REVERSION_TOL: f64 = 1e-6;

fn to_dmatrix(c: &[Vec<f64>]) -> DMatrix<f64> {
    let n = c.len();
    DMatrix::from_fn(n, n, |i, j| c[i][j])
}

fn from_dmatrix(m: &DMatrix<f64>) -> Matrix {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn check_square(c: &[Vec<f64>], n: usize) -> Result<()> {
    check_len(n, c.len(), "matrix rows vs types")?;
    for row in c {
        check_len(n, row.len(), "matrix columns vs types")?;
    }
    Ok(())
}

fn row_sum_deviation(c: &[Vec<f64>], prior: &Prior) -> f64 {
    c.iter()
        .zip(prior.probs())
        .map(|(row, p)| (row.iter().sum::<f64>() - p).abs())
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CPCertificate {
    pub c: Matrix,
    /// Nonnegative `x_m` with `C = Σ x_m x_mᵀ`.
    pub factors: Vec<Vec<f64>>,
    pub alphas: Vec<f64>,
    pub posteriors: Vec<Vec<f64>>,
}

impl CPCertificate {
    /// Rebuilds a certificate from nonnegative factors: `α_m = (Σ_j x_mj)²`
    /// and `μ_m = x_m / √α_m`. Zero factors are dropped.
    pub fn from_factors(factors: Vec<Vec<f64>>) -> Result<Self> {
        let n = factors.first().map_or(0, Vec::len);
        if n == 0 {
            return Err(Error::invalid("no factors"));
        }
        let mut kept = Vec::new();
        let mut alphas = Vec::new();
        let mut posteriors = Vec::new();
        for x in factors {
            check_len(n, x.len(), "factor length")?;
            if x.iter().any(|v| *v < -ENTRY_TOL || !v.is_finite()) {
                return Err(Error::invalid("factor has a negative entry"));
            }
            let x: Vec<f64> = x.into_iter().map(|v| v.max(0.0)).collect();
            let s: f64 = x.iter().sum();
            if s <= 1e-300 {
                continue;
            }
            alphas.push(s * s);
            posteriors.push(x.iter().map(|v| v / s).collect());
            kept.push(x);
        }
        let mut c = vec![vec![0.0; n]; n];
        for x in &kept {
            for i in 0..n {
                for j in 0..n {
                    c[i][j] += x[i] * x[j];
                }
            }
        }
        Ok(Self {
            c,
            factors: kept,
            alphas,
            posteriors,
        })
    }

    /// The distribution over posteriors encoded by the factors.
    pub fn distribution(&self) -> Result<BeliefDistribution> {
        BeliefDistribution::from_pairs(
            self.alphas
                .iter()
                .copied()
                .zip(self.posteriors.iter().cloned())
                .collect(),
        )
    }

    /// Largest violation of the certificate invariants.
    pub fn invariant_violation(&self, prior: &Prior) -> f64 {
        let n = self.c.len();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.c[i][j] - self.c[j][i]).abs());
                worst = worst.max(-self.c[i][j] - ENTRY_TOL);
            }
        }
        worst = worst.max(row_sum_deviation(&self.c, prior));
        let eig = to_dmatrix(&self.c).symmetric_eigenvalues();
        worst = worst.max(-eig.min());
        worst.max((self.alphas.iter().sum::<f64>() - 1.0).abs())
    }
}

/// `C = Σ α_m μ_m μ_mᵀ` for a Bayes-plausible distribution.
pub fn cp_certificate(prior: &Prior, tau: &BeliefDistribution) -> Result<CPCertificate> {
    check_len(prior.len(), tau.dim(), "distribution dimension")?;
    tau.check_plausible(prior)?;
    let factors = tau
        .atoms()
        .iter()
        .map(|a| a.atom.belief.iter().map(|m| m * a.weight.sqrt()).collect())
        .collect();
    CPCertificate::from_factors(factors)
}

/// `w = D0 C ρ`.
pub fn profile_from_cp(c: &[Vec<f64>], prior: &Prior, rho: &[f64]) -> Result<IPProfile> {
    check_square(c, prior.len())?;
    check_len(prior.len(), rho.len(), "reputation vector")?;
    let deviation = row_sum_deviation(c, prior);
    if deviation > ROW_SUM_TOL {
        return Err(Error::RowSumMismatch { deviation });
    }
    IPProfile::new(c.iter().zip(prior.probs()).map(|(row, p)| dot(row, rho) / p).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum CpVerdict {
    /// Factors are present when the heuristic search found a nonnegative
    /// factorization.
    Certified {
        certificate: Option<CPCertificate>,
    },
    NotCp {
        reason: String,
    },
    /// Doubly nonnegative but `N ≥ 5` and no factorization was found.
    Inconclusive,
}

impl CpVerdict {
    pub fn is_certified(&self) -> bool {
        matches!(self, CpVerdict::Certified { .. })
    }
}

/// Doubly-nonnegative test plus a heuristic factor search. For `N ≤ 4`
/// doubly nonnegative matrices are completely positive.
pub fn cp_check(c: &[Vec<f64>], prior: &Prior) -> Result<CpVerdict> {
    let n = prior.len();
    check_square(c, n)?;
    for i in 0..n {
        for j in 0..n {
            let d = (c[i][j] - c[j][i]).abs();
            if d > SYMMETRY_TOL {
                return Ok(CpVerdict::NotCp {
                    reason: format!("not symmetric: |C[{i}][{j}] - C[{j}][{i}]| = {d:e}"),
                });
            }
            if c[i][j] < -ENTRY_TOL {
                return Ok(CpVerdict::NotCp {
                    reason: format!("negative entry C[{i}][{j}] = {}", c[i][j]),
                });
            }
        }
    }
    let dev = row_sum_deviation(c, prior);
    if dev > ROW_SUM_TOL {
        return Ok(CpVerdict::NotCp {
            reason: format!("row sums differ from the prior by {dev:e}"),
        });
    }
    let m = to_dmatrix(c);
    let sym = (&m + m.transpose()) * 0.5;
    let eig = sym.clone().symmetric_eigen();
    let min_eig = eig.eigenvalues.min();
    if min_eig < -PSD_TOL {
        return Ok(CpVerdict::NotCp {
            reason: format!("not positive semidefinite: eigenvalue {min_eig}"),
        });
    }
    let certificate = find_factors(&sym, &eig);
    if certificate.is_none() && n >= 5 {
        return Ok(CpVerdict::Inconclusive);
    }
    Ok(CpVerdict::Certified { certificate })
}

/// Spectral square root, Cholesky, then random rotations of the square root.
fn find_factors(c: &DMatrix<f64>, eig: &nalgebra::SymmetricEigen<f64, nalgebra::Dyn>) -> Option<CPCertificate> {
    let n = c.nrows();
    let sqrt_vals = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
    let root = &eig.eigenvectors * DMatrix::from_diagonal(&sqrt_vals) * eig.eigenvectors.transpose();
    let accept = |b: &DMatrix<f64>| -> Option<CPCertificate> {
        if b.iter().any(|v| *v < -1e-12) {
            return None;
        }
        let factors = (0..b.ncols())
            .map(|k| b.column(k).iter().map(|v| v.max(0.0)).collect())
            .collect();
        let cert = CPCertificate::from_factors(factors).ok()?;
        let err = (to_dmatrix(&cert.c) - c).amax();
        (err < 1e-9).then_some(cert)
    };
    if let Some(cert) = accept(&root) {
        return Some(cert);
    }
    if let Some(ch) = c.clone().cholesky() {
        if let Some(cert) = accept(&ch.l()) {
            return Some(cert);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for _ in 0..2000 {
        let g = DMatrix::from_fn(n, n, |_, _| rng.gen::<f64>() - 0.5);
        let q = g.qr().q();
        if let Some(cert) = accept(&(&root * q)) {
            return Some(cert);
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarkovReport {
    /// `P = D0 C`.
    pub p: Matrix,
    pub stationary_ok: bool,
    pub stochastic_ok: bool,
    pub detailed_balance_ok: bool,
    /// `‖P^k w − (μ0ᵀρ) e‖∞` with `w = Pρ` and `k = 50`.
    pub mean_reversion_gap: f64,
    /// Eigenvalues of `P` within `1e-9` of one. More than one means the
    /// chain is reducible and the gap need not vanish.
    pub unit_eigenvalues: usize,
    /// Largest eigenvalue modulus of `P` after removing one unit eigenvalue.
    /// The gap decays like this to the power `k + 1`.
    pub second_modulus: f64,
}

impl MarkovReport {
    pub fn mean_reversion_ok(&self) -> bool {
        self.mean_reversion_gap < MEAN_REVERSION_TOL
    }

    /// Spectral bound on the gap: `|λ2|^(k+1) ‖ρ − μ0ᵀρ‖_{μ0} / √min μ0`.
    pub fn gap_bound(&self, prior: &Prior, rho: &[f64]) -> f64 {
        let mean = dot(prior.probs(), rho);
        let norm = prior
            .probs()
            .iter()
            .zip(rho)
            .map(|(m, r)| m * (r - mean).powi(2))
            .sum::<f64>()
            .sqrt();
        let min = prior.probs().iter().copied().fold(f64::INFINITY, f64::min);
        self.second_modulus.powi(MEAN_REVERSION_STEPS as i32 + 1) * norm / min.sqrt()
    }

    pub fn all_ok(&self) -> bool {
        self.stationary_ok && self.stochastic_ok && self.detailed_balance_ok && self.mean_reversion_ok()
    }
}

pub fn markov_checks(c: &[Vec<f64>], prior: &Prior, rho: &[f64]) -> Result<MarkovReport> {
    let n = prior.len();
    check_square(c, n)?;
    check_len(n, rho.len(), "reputation vector")?;
    let deviation = row_sum_deviation(c, prior);
    if deviation > ROW_SUM_TOL {
        return Err(Error::RowSumMismatch { deviation });
    }
    let mu0 = prior.probs();
    let p: Matrix = c
        .iter()
        .zip(mu0)
        .map(|(row, m)| row.iter().map(|x| x / m).collect())
        .collect();
    let stationary_ok = (0..n).all(|j| ((0..n).map(|i| mu0[i] * p[i][j]).sum::<f64>() - mu0[j]).abs() < MARKOV_TOL);
    let stochastic_ok = p.iter().all(|row| (row.iter().sum::<f64>() - 1.0).abs() < MARKOV_TOL);
    let detailed_balance_ok = (0..n).all(|i| (0..n).all(|j| (mu0[i] * p[i][j] - mu0[j] * p[j][i]).abs() < MARKOV_TOL));
    let pm = to_dmatrix(&p);
    let mut v = &pm * DVector::from_column_slice(rho);
    for _ in 0..MEAN_REVERSION_STEPS {
        v = &pm * v;
    }
    let mean = dot(mu0, rho);
    let mean_reversion_gap = v.iter().map(|x| (x - mean).abs()).fold(0.0, f64::max);
    // P is similar to the symmetric S = D0^{1/2} C D0^{1/2}.
    let s = DMatrix::from_fn(n, n, |i, j| c[i][j] / (mu0[i] * mu0[j]).sqrt());
    let mut eig: Vec<f64> = s.symmetric_eigenvalues().iter().copied().collect();
    let unit_eigenvalues = eig.iter().filter(|e| (*e - 1.0).abs() < 1e-9).count();
    eig.sort_by(|a, b| (a - 1.0).abs().total_cmp(&(b - 1.0).abs()));
    let second_modulus = eig[1..].iter().map(|e| e.abs()).fold(0.0, f64::max);
    Ok(MarkovReport {
        p,
        stationary_ok,
        stochastic_ok,
        detailed_balance_ok,
        mean_reversion_gap,
        unit_eigenvalues,
        second_modulus,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruthDrift {
    /// Average posterior probability of the event, conditional on it.
    pub lhs: f64,
    /// Prior probability of the event.
    pub rhs: f64,
    pub holds: bool,
}

/// Event `X` with `Pr(X | θ) = β(θ)`. Computes
/// `Σ_i (μ0i βi / μ0ᵀβ)(P β)_i`, which equals `βᵀCβ / μ0ᵀβ`.
pub fn truth_drifting(prior: &Prior, pi: &InformationStructure, beta: &[f64]) -> Result<TruthDrift> {
    let n = prior.len();
    check_len(n, pi.num_types(), "structure rows vs types")?;
    check_len(n, beta.len(), "event vector")?;
    if beta.iter().any(|b| !(0.0..=1.0).contains(b)) {
        return Err(Error::invalid("event probabilities must lie in [0, 1]"));
    }
    let rhs = dot(prior.probs(), beta);
    if rhs <= 0.0 {
        return Ok(TruthDrift {
            lhs: 0.0,
            rhs,
            holds: true,
        });
    }
    let tau = crate::model::posterior_distribution(prior, pi)?;
    let mu0 = prior.probs();
    let mut lhs = 0.0;
    for i in 0..n {
        if beta[i] == 0.0 {
            continue;
        }
        // (P β)_i = Σ_j P_ij β_j with P_ij = Σ_m α_m μ_m(i) μ_m(j) / μ0i.
        let pb: f64 = tau
            .atoms()
            .iter()
            .map(|a| a.weight * a.atom.belief[i] * dot(&a.atom.belief, beta))
            .sum::<f64>()
            / mu0[i];
        lhs += mu0[i] * beta[i] / rhs * pb;
    }
    Ok(TruthDrift {
        lhs,
        rhs,
        holds: lhs >= rhs - 1e-9,
    })
}

/// Whether `ρ` majorizes the profile. Only meaningful for a uniform prior,
/// where `P` is doubly stochastic.
pub fn majorization_check(rho: &[f64], profile: &IPProfile, prior: &Prior) -> Result<bool> {
    check_len(prior.len(), rho.len(), "reputation vector")?;
    check_len(prior.len(), profile.len(), "profile")?;
    if !prior.is_uniform(1e-9) {
        return Err(Error::NonUniformPrior);
    }
    let desc = |v: &[f64]| {
        let mut v = v.to_vec();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    };
    let (r, w) = (desc(rho), desc(&profile.values));
    let (mut sr, mut sw) = (0.0, 0.0);
    for k in 0..r.len() {
        sr += r[k];
        sw += w[k];
        if sw > sr + 1e-7 {
            return Ok(false);
        }
    }
    Ok((sr - sw).abs() <= 1e-7)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    #[default]
    Max,
    Min,
}

/// Target type `i` sends `s_j` with probability `pool_probs[j]`; every other
/// type `j` always sends `s_j`. `pool_probs[i]` is the target's separating
/// signal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiPoolPolicy {
    pub target: usize,
    pub pool_probs: Vec<f64>,
    /// First pooled type for `max` (pool is `threshold..N` without the
    /// target), last pooled type for `min` (pool is `0..=threshold`). Equals
    /// the target when nothing is pooled.
    pub threshold: usize,
}

impl BiPoolPolicy {
    pub fn structure(&self, n: usize) -> Result<InformationStructure> {
        let rows = (0..n)
            .map(|t| {
                (0..n)
                    .map(|s| {
                        if t == self.target {
                            self.pool_probs[s]
                        } else if s == t {
                            1.0
                        } else {
                            0.0
                        }
                    })
                    .collect()
            })
            .collect();
        InformationStructure::new(rows)
    }

    pub fn distribution(&self, prior: &Prior) -> Result<BeliefDistribution> {
        crate::model::posterior_distribution(prior, &self.structure(prior.len())?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiPoolSolution {
    pub policy: BiPoolPolicy,
    pub value: f64,
    pub sense: Sense,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiPoolOptions {
    pub restarts: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for BiPoolOptions {
    fn default() -> Self {
        Self {
            restarts: 16,
            tol: 1e-10,
            max_iter: 200_000,
            seed: 0,
        }
    }
}

pub fn bipool_optimize(prior: &Prior, rho: &[f64], target: usize, sense: Sense) -> Result<BiPoolSolution> {
    bipool_optimize_with(prior, rho, target, sense, BiPoolOptions::default())
}

/// Pools the target with a threshold set of types and optimizes the
/// target's splitting over the pool by projected gradient ascent.
pub fn bipool_optimize_with(
    prior: &Prior,
    rho: &[f64],
    target: usize,
    sense: Sense,
    opts: BiPoolOptions,
) -> Result<BiPoolSolution> {
    let n = prior.len();
    check_len(n, rho.len(), "reputation vector")?;
    if target >= n {
        return Err(Error::invalid(format!(
            "target type {target} out of range for {n} types"
        )));
    }
    if rho.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("reputation vector must be sorted ascending"));
    }
    let sign = match sense {
        Sense::Max => 1.0,
        Sense::Min => -1.0,
    };
    let r: Vec<f64> = rho.iter().map(|x| sign * x).collect();
    let pools: Vec<(usize, Vec<usize>)> = match sense {
        Sense::Max => (target + 1..n).rev().map(|k| (k, (k..n).collect())).collect(),
        Sense::Min => (0..target).map(|k| (k, (0..=k).collect())).collect(),
    };
    let mut best = (target, e_vec(n, target), r[target]);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    // Smaller pools first so that ties keep the smaller pool.
    for (k, pool) in pools {
        let (p, v) = solve_pool(prior, &r, target, &pool, &opts, &mut rng)?;
        if v > best.2 + 1e-12 {
            best = (k, p, v);
        }
    }
    Ok(BiPoolSolution {
        policy: BiPoolPolicy {
            target,
            pool_probs: best.1,
            threshold: best.0,
        },
        value: sign * best.2,
        sense,
    })
}

fn e_vec(n: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[i] = 1.0;
    v
}

/// Euclidean projection onto the probability simplex.
fn project_simplex(y: &[f64]) -> Vec<f64> {
    let mut u = y.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut css = 0.0;
    let mut theta = 0.0;
    for (k, v) in u.iter().enumerate() {
        css += v;
        let t = (css - 1.0) / (k + 1) as f64;
        if v - t > 0.0 {
            theta = t;
        }
    }
    y.iter().map(|v| (v - theta).max(0.0)).collect()
}

/// Objective over `(p_self, p_j for j in pool)`: the target's interim payoff.
fn pool_objective(b: f64, ri: f64, pool: &[(f64, f64)], p: &[f64]) -> f64 {
    p[0] * ri
        + pool
            .iter()
            .zip(&p[1..])
            .map(|(&(a, rj), &q)| {
                if q <= 0.0 {
                    0.0
                } else {
                    q * (b * q * ri + a * rj) / (b * q + a)
                }
            })
            .sum::<f64>()
}

fn pool_gradient(b: f64, ri: f64, pool: &[(f64, f64)], p: &[f64]) -> Vec<f64> {
    std::iter::once(ri)
        .chain(
            pool.iter()
                .zip(&p[1..])
                .map(|(&(a, rj), &q)| ri + a * a * (rj - ri) / (a + b * q).powi(2)),
        )
        .collect()
}

fn solve_pool(
    prior: &Prior,
    r: &[f64],
    target: usize,
    pool: &[usize],
    opts: &BiPoolOptions,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<f64>, f64)> {
    let mu0 = prior.probs();
    let b = mu0[target];
    let ri = r[target];
    let terms: Vec<(f64, f64)> = pool.iter().map(|&j| (mu0[j], r[j])).collect();
    let m = terms.len() + 1;
    let mut best: Option<(Vec<f64>, f64)> = None;
    for restart in 0..opts.restarts.max(1) {
        let mut p: Vec<f64> = if restart == 0 {
            vec![1.0 / m as f64; m]
        } else {
            let raw: Vec<f64> = (0..m).map(|_| rng.sample::<f64, _>(Exp1)).collect();
            let s: f64 = raw.iter().sum();
            raw.into_iter().map(|x| x / s).collect()
        };
        let mut step = 1.0;
        let mut f = pool_objective(b, ri, &terms, &p);
        let mut converged = false;
        for _ in 0..opts.max_iter {
            let g = pool_gradient(b, ri, &terms, &p);
            let unit: Vec<f64> = p.iter().zip(&g).map(|(x, d)| x + d).collect();
            let mapped = project_simplex(&unit);
            if mapped.iter().zip(&p).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) < opts.tol {
                converged = true;
                break;
            }
            // Backtrack on a local Lipschitz estimate of the gradient rather
            // than on objective values, which stop resolving near the optimum.
            loop {
                let trial: Vec<f64> = p.iter().zip(&g).map(|(x, d)| x + step * d).collect();
                let q = project_simplex(&trial);
                let gq = pool_gradient(b, ri, &terms, &q);
                let curv: f64 = g
                    .iter()
                    .zip(&gq)
                    .zip(q.iter().zip(&p))
                    .map(|((d0, d1), (x, y))| (d0 - d1) * (x - y))
                    .sum();
                let dist: f64 = q.iter().zip(&p).map(|(x, y)| (x - y).powi(2)).sum();
                if curv <= 0.5 * dist / step || step < 1e-14 {
                    f = pool_objective(b, ri, &terms, &q);
                    p = q;
                    step *= 2.0;
                    break;
                }
                step *= 0.5;
            }
        }
        if !converged {
            continue;
        }
        if best.as_ref().is_none_or(|(_, v)| f > *v) {
            best = Some((p, f));
        }
    }
    let (p, v) = best.ok_or_else(|| Error::ConvergenceFailure("bi-pooling ascent did not converge".into()))?;
    let n = prior.len();
    let mut probs = vec![0.0; n];
    probs[target] = p[0];
    for (k, &j) in pool.iter().enumerate() {
        probs[j] = p[k + 1];
    }
    Ok((probs, v))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RsReport {
    /// `(γ_j, ρ_j)` with `γ = λ/μ0`.
    pub type_points: Vec<[f64; 2]>,
    /// `(E_μ[γ], E_μ[ρ])` per atom.
    pub atom_points: Vec<[f64; 2]>,
    /// Types with positive mass at each atom.
    pub pooling_sets: Vec<Vec<usize>>,
    /// Atom points are comonotone.
    pub ordered: bool,
    /// No pooled pair has both larger `γ` and larger `ρ`.
    pub negative_slopes: bool,
    /// No three type points are collinear.
    pub generic: bool,
    /// Every pooling set has at most two types; `None` off the generic case.
    pub pairwise: Option<bool>,
}

impl RsReport {
    pub fn all_pass(&self) -> bool {
        self.ordered && self.negative_slopes && self.pairwise.unwrap_or(true)
    }
}

/// Structural properties that optimal policies for direction `d` satisfy.
/// Advisory only: passing does not prove optimality.
pub fn rs_diagnostics(prior: &Prior, rho: &[f64], d: &Direction, tau: &BeliefDistribution) -> Result<RsReport> {
    let n = prior.len();
    check_len(n, rho.len(), "reputation vector")?;
    check_len(n, d.dim(), "direction")?;
    check_len(n, tau.dim(), "distribution dimension")?;
    tau.check_plausible(prior)?;
    let gamma: Vec<f64> = d.lambda().iter().zip(prior.probs()).map(|(l, m)| l / m).collect();
    let type_points: Vec<[f64; 2]> = (0..n).map(|j| [gamma[j], rho[j]]).collect();
    let atoms: Vec<&WeightedAtom> = tau.atoms().iter().filter(|a| a.weight > 0.0).collect();
    let atom_points: Vec<[f64; 2]> = atoms
        .iter()
        .map(|a| [dot(&a.atom.belief, &gamma), dot(&a.atom.belief, rho)])
        .collect();
    let pooling_sets: Vec<Vec<usize>> = atoms
        .iter()
        .map(|a| (0..n).filter(|&j| a.atom.belief[j] > 1e-12).collect())
        .collect();
    let tol = 1e-9;
    let ordered = atom_points
        .iter()
        .all(|p| atom_points.iter().all(|q| !(p[0] > q[0] + tol && p[1] < q[1] - tol)));
    let negative_slopes = pooling_sets.iter().all(|set| {
        set.iter().all(|&i| {
            set.iter().all(|&j| {
                let (a, b) = (type_points[i], type_points[j]);
                !(a[0] > b[0] + tol && a[1] > b[1] + tol)
            })
        })
    });
    let mut generic = true;
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let (a, b, c) = (type_points[i], type_points[j], type_points[k]);
                let cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
                if cross.abs() < 1e-12 {
                    generic = false;
                }
            }
        }
    }
    let pairwise = generic.then(|| pooling_sets.iter().all(|s| s.len() <= 2));
    Ok(RsReport {
        type_points,
        atom_points,
        pooling_sets,
        ordered,
        negative_slopes,
        generic,
        pairwise,
    })
}

/// Random Bayes-plausible distribution with `atoms` Dirichlet(1) posteriors
/// and uniform-Dirichlet weights; the prior is its mean.
pub fn random_distribution<R: Rng>(rng: &mut R, n: usize, atoms: usize) -> (Prior, BeliefDistribution) {
    let dir = |rng: &mut R, k: usize| {
        let raw: Vec<f64> = (0..k).map(|_| rng.sample::<f64, _>(Exp1)).collect();
        let s: f64 = raw.iter().sum();
        raw.into_iter().map(|x| x / s).collect::<Vec<f64>>()
    };
    let weights = dir(rng, atoms);
    let beliefs: Vec<Vec<f64>> = (0..atoms).map(|_| dir(rng, n)).collect();
    let tau =
        BeliefDistribution::from_pairs(weights.into_iter().zip(beliefs).collect()).expect("random atoms are valid");
    let mean = tau.mean();
    let s: f64 = mean.iter().sum();
    let prior = Prior::new(mean.iter().map(|x| x / s).collect()).expect("mean of beliefs is a prior");
    (prior, tau)
}

pub fn second_moment(tau: &BeliefDistribution) -> Matrix {
    let n = tau.dim();
    let mut c = DMatrix::zeros(n, n);
    for a in tau.atoms() {
        let v = DVector::from_column_slice(&a.atom.belief);
        c += &v * v.transpose() * a.weight;
    }
    from_dmatrix(&c)
}
