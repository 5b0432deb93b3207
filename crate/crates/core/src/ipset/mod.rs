//! LP geometry of the set of achievable interim profiles.
//!
//! Every query is a linear program over weights on a [`BeliefGrid`]: the mean
//! rows enforce Bayes plausibility and the objective or extra rows act on the
//! adjusted payoffs of the atoms.

mod geometry;
mod grid;
pub(crate) mod pieces;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

pub use geometry::{convex_hull, diameter, hausdorff, point_polygon_distance};
pub use grid::{BeliefGrid, GridOptions};

use crate::error::{check_len, Error, Result};
use crate::exec::Execution;
use crate::lp::{LinearProgram, LpOutcome, LpSolution};
use crate::model::{
    adjusted_payoff, dot, max_abs_diff, unconditional_profile, BeliefAtom, BeliefDistribution, IPProfile, PayoffSpec,
    Prior, Side, WeightedAtom, PLAUSIBILITY_TOL,
};

/// Weights below this are dropped when reading distributions off LP solutions.
const WEIGHT_FLOOR: f64 = 1e-13;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Direction {
    lambda: Vec<f64>,
}

impl Direction {
    pub fn new(lambda: Vec<f64>) -> Result<Self> {
        if lambda.is_empty() || lambda.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("direction must be a finite non-empty vector"));
        }
        if lambda.iter().all(|x| *x == 0.0) {
            return Err(Error::invalid("direction must be non-zero"));
        }
        Ok(Self { lambda })
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn dim(&self) -> usize {
        self.lambda.len()
    }

    pub fn normalized(&self) -> Self {
        let norm = self.lambda.iter().map(|x| x * x).sum::<f64>().sqrt();
        Self {
            lambda: self.lambda.iter().map(|x| x / norm).collect(),
        }
    }

    /// `sign · e_i`.
    pub fn axis(n: usize, i: usize, sign: f64) -> Self {
        let mut lambda = vec![0.0; n];
        lambda[i] = sign.signum();
        Self { lambda }
    }

    /// `k` equally spaced directions on the unit circle, starting at angle 0.
    pub fn circle(k: usize) -> Vec<Self> {
        (0..k)
            .map(|j| {
                let a = std::f64::consts::TAU * j as f64 / k as f64;
                let (s, c) = a.sin_cos();
                let snap = |v: f64| if v.abs() < 1e-15 { 0.0 } else { v };
                Self {
                    lambda: vec![snap(c), snap(s)],
                }
            })
            .collect()
    }

    /// `k` seeded directions uniform on the unit sphere in `R^n`.
    pub fn sphere(n: usize, k: usize, seed: u64) -> Vec<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(k);
        while out.len() < k {
            let v: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-12 {
                out.push(Self {
                    lambda: v.iter().map(|x| x / norm).collect(),
                });
            }
        }
        out
    }

    /// Default sweep: `k` sphere directions (evenly spaced when `n = 2`),
    /// the signed coordinate axes and the prior.
    pub fn default_set(prior: &Prior, k: usize, seed: u64) -> Vec<Self> {
        let n = prior.len();
        let mut dirs = match n {
            1 => vec![],
            2 => Self::circle(k),
            _ => Self::sphere(n, k, seed),
        };
        for i in 0..n {
            for s in [1.0, -1.0] {
                dirs.push(Self::axis(n, i, s));
            }
        }
        dirs.push(Self {
            lambda: prior.probs().to_vec(),
        });
        let mut unique: Vec<Self> = Vec::with_capacity(dirs.len());
        for d in dirs {
            let dn = d.normalized();
            if !unique
                .iter()
                .any(|u| max_abs_diff(&u.normalized().lambda, &dn.lambda) < 1e-12)
            {
                unique.push(d);
            }
        }
        unique
    }
}

impl TryFrom<Vec<f64>> for Direction {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Direction::new(v)
    }
}

impl From<Direction> for Vec<f64> {
    fn from(d: Direction) -> Self {
        d.lambda
    }
}

/// Grid atoms with their adjusted payoff columns.
///
/// `actions` tags columns that belong to a specific receiver action when the
/// table describes the persuasion set V.
#[derive(Clone, Debug)]
pub struct AtomTable {
    prior: Prior,
    atoms: Vec<BeliefAtom>,
    adjusted: Vec<Vec<f64>>,
    /// Adjusted payoff at the exact side, for one-sided atoms only.
    exact: Vec<Option<Vec<f64>>>,
    actions: Vec<Option<usize>>,
    profile_dim: usize,
}

impl AtomTable {
    pub fn new(w: &PayoffSpec, prior: &Prior, grid: &BeliefGrid) -> Result<Self> {
        check_len(w.belief_dim(), prior.len(), "payoff dimension vs prior")?;
        check_len(prior.len(), grid.dim(), "grid dimension vs prior")?;
        let mut adjusted = Vec::with_capacity(grid.len());
        let mut exact = Vec::with_capacity(grid.len());
        for a in grid.atoms() {
            adjusted.push(adjusted_payoff(w, prior, a)?);
            exact.push(if a.side == Side::Exact {
                None
            } else {
                Some(adjusted_payoff(w, prior, &a.with_side(Side::Exact))?)
            });
        }
        Ok(Self {
            prior: prior.clone(),
            atoms: grid.atoms().to_vec(),
            adjusted,
            exact,
            actions: vec![None; grid.len()],
            profile_dim: w.profile_dim(),
        })
    }

    /// Table with caller-supplied columns, used for the persuasion set V.
    pub fn from_columns(
        prior: &Prior,
        atoms: Vec<BeliefAtom>,
        adjusted: Vec<Vec<f64>>,
        actions: Vec<Option<usize>>,
    ) -> Result<Self> {
        check_len(atoms.len(), adjusted.len(), "adjusted columns")?;
        check_len(atoms.len(), actions.len(), "action tags")?;
        let profile_dim = adjusted.first().map_or(prior.len(), Vec::len);
        Ok(Self {
            prior: prior.clone(),
            exact: vec![None; atoms.len()],
            atoms,
            adjusted,
            actions,
            profile_dim,
        })
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[BeliefAtom] {
        &self.atoms
    }

    pub fn adjusted(&self) -> &[Vec<f64>] {
        &self.adjusted
    }

    pub fn actions(&self) -> &[Option<usize>] {
        &self.actions
    }

    pub fn prior(&self) -> &Prior {
        &self.prior
    }

    pub fn profile_dim(&self) -> usize {
        self.profile_dim
    }

    /// Reads a distribution and its profile off LP weights over the first
    /// `len()` columns.
    pub(crate) fn distribution(&self, x: &[f64]) -> (BeliefDistribution, IPProfile, Vec<usize>) {
        let idx: Vec<usize> = (0..self.len()).filter(|&j| x[j] > WEIGHT_FLOOR).collect();
        let total: f64 = idx.iter().map(|&j| x[j]).sum();
        let atoms = idx
            .iter()
            .map(|&j| WeightedAtom {
                weight: x[j] / total,
                atom: self.atoms[j].clone(),
            })
            .collect();
        let mut profile = vec![0.0; self.profile_dim];
        for &j in &idx {
            for (p, v) in profile.iter_mut().zip(&self.adjusted[j]) {
                *p += x[j] * v;
            }
        }
        (BeliefDistribution::raw(atoms), IPProfile::from(profile), idx)
    }

    fn mean_columns(&self) -> Vec<Vec<f64>> {
        self.atoms.iter().map(|a| a.belief.clone()).collect()
    }

    fn check_direction(&self, d: &Direction) -> Result<()> {
        check_len(self.profile_dim, d.dim(), "direction dimension")
    }

    pub fn support(&self, d: &Direction) -> Result<SupportSolution> {
        self.check_direction(d)?;
        let c: Vec<f64> = self.adjusted.iter().map(|v| dot(d.lambda(), v)).collect();
        let lp = LinearProgram::from_columns(self.mean_columns(), self.prior.probs().to_vec(), c)?;
        let sol = expect_optimal(lp.solve()?)?;
        let (tau, profile, idx) = self.distribution(&sol.x);
        let attained = idx.iter().all(|&j| match &self.exact[j] {
            None => true,
            Some(e) => dot(d.lambda(), e) >= dot(d.lambda(), &self.adjusted[j]) - 1e-9,
        });
        Ok(SupportSolution {
            direction: d.clone(),
            value: sol.objective,
            tau,
            profile,
            attained,
            actions: idx.iter().map(|&j| self.actions[j]).collect(),
        })
    }

    pub fn membership(&self, target: &IPProfile) -> Result<Membership> {
        check_len(self.profile_dim, target.len(), "target dimension")?;
        let n = self.prior.len();
        let p = self.profile_dim;
        let mut columns: Vec<Vec<f64>> = self
            .atoms
            .iter()
            .zip(&self.adjusted)
            .map(|(a, v)| a.belief.iter().chain(v).copied().collect())
            .collect();
        let mut c = vec![0.0; columns.len()];
        for k in 0..p {
            for sign in [1.0, -1.0] {
                let mut col = vec![0.0; n + p];
                col[n + k] = sign;
                columns.push(col);
                c.push(-1.0);
            }
        }
        let b: Vec<f64> = self.prior.probs().iter().chain(&target.values).copied().collect();
        let lp = LinearProgram::from_columns(columns, b, c)?;
        let sol = expect_optimal(lp.solve()?)?;
        let slack = -sol.objective;
        let scale = target.values.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        if slack <= PLAUSIBILITY_TOL * scale {
            let (certificate, _, _) = self.distribution(&sol.x);
            return Ok(Membership::InClosure { certificate });
        }
        // Dual rows of the payoff block separate the target from the set.
        let lambda: Vec<f64> = sol.duals[n..].iter().map(|y| -y).collect();
        let separating = Direction::new(lambda).map_err(|_| Error::Lp("degenerate separating direction".into()))?;
        let h = self.support(&separating)?.value;
        let margin = dot(separating.lambda(), &target.values) - h;
        if margin <= 0.0 {
            return Err(Error::Lp(format!(
                "separating direction failed validation (margin {margin:e})"
            )));
        }
        Ok(Membership::Outside { separating, margin })
    }
}

fn expect_optimal(out: LpOutcome) -> Result<LpSolution> {
    match out {
        LpOutcome::Optimal(s) => Ok(s),
        LpOutcome::Infeasible(_) => Err(Error::GridTooCoarse),
        LpOutcome::Unbounded => Err(Error::Lp("unbounded program".into())),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportSolution {
    pub direction: Direction,
    pub value: f64,
    /// Optimal distribution over grid atoms.
    pub tau: BeliefDistribution,
    /// Boundary profile `E_τ[ŵ]`.
    pub profile: IPProfile,
    /// False when an optimal atom uses a one-sided value that the exact
    /// payoff does not deliver, so the value is a supremum only.
    pub attained: bool,
    /// Receiver action per atom of `tau`, for persuasion tables.
    pub actions: Vec<Option<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Membership {
    InClosure {
        certificate: BeliefDistribution,
    },
    /// `separating · target − h(separating) = margin > 0`.
    Outside {
        separating: Direction,
        margin: f64,
    },
}

impl Membership {
    pub fn is_in(&self) -> bool {
        matches!(self, Membership::InClosure { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    pub direction: Direction,
    pub offset: f64,
}

impl Halfspace {
    pub fn slack(&self, point: &[f64]) -> f64 {
        self.offset - dot(self.direction.lambda(), point)
    }
}

/// Inner and outer polyhedral approximation from support samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IPSetApprox {
    pub support_samples: Vec<SupportSolution>,
    pub inner_vertices: Vec<IPProfile>,
    pub outer_halfspaces: Vec<Halfspace>,
}

impl IPSetApprox {
    pub fn from_samples(support_samples: Vec<SupportSolution>) -> Self {
        let mut inner_vertices: Vec<IPProfile> = Vec::new();
        for s in &support_samples {
            if !inner_vertices
                .iter()
                .any(|v| max_abs_diff(&v.values, &s.profile.values) < 1e-9)
            {
                inner_vertices.push(s.profile.clone());
            }
        }
        let outer_halfspaces = support_samples
            .iter()
            .map(|s| Halfspace {
                direction: s.direction.clone(),
                offset: s.value,
            })
            .collect();
        Self {
            support_samples,
            inner_vertices,
            outer_halfspaces,
        }
    }

    pub fn dim(&self) -> usize {
        self.inner_vertices.first().map_or(0, IPProfile::len)
    }

    /// Vertices of the inner hull in counter-clockwise order (two components only).
    pub fn polygon(&self) -> Result<Vec<[f64; 2]>> {
        if self.dim() != 2 {
            return Err(Error::invalid(format!(
                "polygon needs 2 components, have {}",
                self.dim()
            )));
        }
        let pts: Vec<[f64; 2]> = self.inner_vertices.iter().map(|v| [v.values[0], v.values[1]]).collect();
        Ok(convex_hull(&pts, 1e-9))
    }

    pub fn diameter(&self) -> f64 {
        let pts: Vec<Vec<f64>> = self.inner_vertices.iter().map(|v| v.values.clone()).collect();
        diameter(&pts)
    }

    /// Largest violation of any outer halfspace by `point` (≤ 0 inside).
    pub fn outer_violation(&self, point: &[f64]) -> f64 {
        self.outer_halfspaces
            .iter()
            .map(|h| -h.slack(point))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn support_of(&self, d: &Direction) -> Option<f64> {
        self.support_samples
            .iter()
            .find(|s| max_abs_diff(s.direction.lambda(), d.lambda()) < 1e-12)
            .map(|s| s.value)
    }
}

pub fn membership(w: &PayoffSpec, prior: &Prior, grid: &BeliefGrid, target: &IPProfile) -> Result<Membership> {
    AtomTable::new(w, prior, grid)?.membership(target)
}

pub fn support_value(w: &PayoffSpec, prior: &Prior, grid: &BeliefGrid, d: &Direction) -> Result<SupportSolution> {
    AtomTable::new(w, prior, grid)?.support(d)
}

pub fn boundary_profile(w: &PayoffSpec, prior: &Prior, grid: &BeliefGrid, d: &Direction) -> Result<IPProfile> {
    Ok(support_value(w, prior, grid, d)?.profile)
}

pub fn approximate_set(w: &PayoffSpec, prior: &Prior, grid: &BeliefGrid, dirs: &[Direction]) -> Result<IPSetApprox> {
    approximate_set_with(w, prior, grid, dirs, Execution::default())
}

pub fn approximate_set_with(
    w: &PayoffSpec,
    prior: &Prior,
    grid: &BeliefGrid,
    dirs: &[Direction],
    exec: Execution,
) -> Result<IPSetApprox> {
    let table = AtomTable::new(w, prior, grid)?;
    approximate_table(&table, dirs, exec)
}

pub fn approximate_table(table: &AtomTable, dirs: &[Direction], exec: Execution) -> Result<IPSetApprox> {
    if dirs.is_empty() {
        return Err(Error::invalid("no directions given"));
    }
    let samples = exec
        .map(dirs, |d| table.support(d))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(IPSetApprox::from_samples(samples))
}

/// Optimum of `μ0ᵀw` over the set subject to `w(θ) ≥ floor(θ)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParticipationSolution {
    pub value: f64,
    pub profile: IPProfile,
    pub tau: BeliefDistribution,
    /// Multipliers `η ≥ 0` on the participation constraints.
    pub multipliers: Vec<f64>,
    /// The direction `μ0 + η` in which the profile is a boundary point.
    pub direction: Direction,
}

pub fn participation_optimum(
    w: &PayoffSpec,
    prior: &Prior,
    grid: &BeliefGrid,
    floors: &[f64],
) -> Result<ParticipationSolution> {
    let table = AtomTable::new(w, prior, grid)?;
    let n = prior.len();
    check_len(n, table.profile_dim(), "participation needs type-indexed profiles")?;
    check_len(n, floors.len(), "participation floors")?;
    let mut columns: Vec<Vec<f64>> = table
        .atoms
        .iter()
        .zip(&table.adjusted)
        .map(|(a, v)| a.belief.iter().chain(v).copied().collect())
        .collect();
    let mut c: Vec<f64> = table.adjusted.iter().map(|v| dot(prior.probs(), v)).collect();
    for k in 0..n {
        let mut col = vec![0.0; 2 * n];
        col[n + k] = -1.0;
        columns.push(col);
        c.push(0.0);
    }
    let b: Vec<f64> = prior.probs().iter().chain(floors).copied().collect();
    let lp = LinearProgram::from_columns(columns, b, c)?;
    let sol = match lp.solve()? {
        LpOutcome::Optimal(s) => s,
        LpOutcome::Infeasible(_) => return Err(Error::invalid("participation floors cannot all be met")),
        LpOutcome::Unbounded => return Err(Error::Lp("unbounded program".into())),
    };
    let (tau, profile, _) = table.distribution(&sol.x);
    let multipliers: Vec<f64> = sol.duals[n..].iter().map(|y| (-y).max(0.0)).collect();
    let direction = Direction::new(prior.probs().iter().zip(&multipliers).map(|(m, e)| m + e).collect())?;
    Ok(ParticipationSolution {
        value: sol.objective,
        profile,
        tau,
        multipliers,
        direction,
    })
}

struct Weighted {
    weight: f64,
    atom: BeliefAtom,
    adjusted: Vec<f64>,
}

fn merge_same_piece(atoms: Vec<Weighted>, w: &PayoffSpec, prior: &Prior) -> Result<Vec<Weighted>> {
    let mut groups: Vec<(Option<Vec<usize>>, Vec<Weighted>)> = Vec::new();
    for a in atoms {
        let key = w.piece_key(&a.atom);
        match key
            .as_ref()
            .and_then(|k| groups.iter_mut().find(|(gk, _)| gk.as_ref() == Some(k)))
        {
            Some((_, g)) => g.push(a),
            None => groups.push((key, vec![a])),
        }
    }
    let mut out = Vec::new();
    for (key, group) in groups {
        if group.len() == 1 || key.is_none() {
            out.extend(group);
            continue;
        }
        let total: f64 = group.iter().map(|a| a.weight).sum();
        let dim = group[0].atom.dim();
        let mut belief = vec![0.0; dim];
        let mut adj = vec![0.0; group[0].adjusted.len()];
        for a in &group {
            for (b, x) in belief.iter_mut().zip(&a.atom.belief) {
                *b += a.weight * x / total;
            }
            for (b, x) in adj.iter_mut().zip(&a.adjusted) {
                *b += a.weight * x / total;
            }
        }
        let common = group[0].atom.side;
        let candidates = [common, Side::Exact, Side::Lower, Side::Upper];
        let mut merged = None;
        for side in candidates {
            let atom = BeliefAtom::raw(belief.clone(), side);
            if w.piece_key(&atom) != key {
                continue;
            }
            let v = adjusted_payoff(w, prior, &atom)?;
            let scale = adj.iter().fold(1.0f64, |a, x| a.max(x.abs()));
            if max_abs_diff(&v, &adj) <= 1e-10 * scale {
                merged = Some(Weighted {
                    weight: total,
                    atom,
                    adjusted: v,
                });
                break;
            }
        }
        match merged {
            Some(m) => out.push(m),
            None => out.extend(group),
        }
    }
    Ok(out)
}

/// One elimination pass: removes an atom along a null direction of the
/// stacked `(μ, ŵ)` columns. Returns false once the columns are independent.
fn caratheodory_step(atoms: &mut Vec<Weighted>) -> bool {
    let k = atoms.len();
    if k <= 1 {
        return false;
    }
    let rows = atoms[0].atom.dim() + atoms[0].adjusted.len();
    let size = rows.max(k);
    let m = DMatrix::from_fn(size, k, |r, j| {
        let a = &atoms[j];
        let n = a.atom.dim();
        if r < n {
            a.atom.belief[r]
        } else if r < rows {
            a.adjusted[r - n]
        } else {
            0.0
        }
    });
    let svd = m.svd(false, true);
    let Some(v_t) = svd.v_t else {
        return false;
    };
    let (imin, smin) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &s)| if s < acc.1 { (i, s) } else { acc });
    let smax = svd.singular_values.max();
    if smin > 1e-10 * smax.max(1.0) {
        return false;
    }
    let mut c: Vec<f64> = v_t.row(imin).iter().copied().collect();
    if !c.iter().any(|&x| x > 1e-12) {
        c.iter_mut().for_each(|x| *x = -*x);
    }
    let mut best: Option<(usize, f64)> = None;
    for (j, &cj) in c.iter().enumerate() {
        if cj > 1e-12 {
            let t = atoms[j].weight / cj;
            if best.is_none_or(|(_, bt)| t < bt) {
                best = Some((j, t));
            }
        }
    }
    let Some((jmin, t)) = best else {
        return false;
    };
    for (a, &cj) in atoms.iter_mut().zip(&c) {
        a.weight -= t * cj;
    }
    atoms[jmin].weight = 0.0;
    atoms.retain(|a| a.weight > 1e-15);
    true
}

/// Reduces `tau` to at most `2N − 1` atoms with the same mean and profile.
pub fn reduce_support(prior: &Prior, tau: &BeliefDistribution, w: &PayoffSpec) -> Result<BeliefDistribution> {
    let target = unconditional_profile(w, prior, tau)?;
    // 2N − 1 for type beliefs; |D| + |C| − 1 for cohort problems.
    let limit = prior.len() + w.profile_dim() - 1;
    let mut atoms = tau
        .merged()
        .atoms()
        .iter()
        .map(|a| {
            Ok(Weighted {
                weight: a.weight,
                adjusted: adjusted_payoff(w, prior, &a.atom)?,
                atom: a.atom.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    loop {
        let before = atoms.len();
        atoms = merge_same_piece(atoms, w, prior)?;
        while caratheodory_step(&mut atoms) {}
        if atoms.len() == before {
            break;
        }
    }
    if atoms.len() > limit {
        return Err(Error::ReductionFailed(format!(
            "{} independent atoms remain, bound is {limit}",
            atoms.len()
        )));
    }
    let total: f64 = atoms.iter().map(|a| a.weight).sum();
    let out = BeliefDistribution::raw(
        atoms
            .into_iter()
            .map(|a| WeightedAtom {
                weight: a.weight / total,
                atom: a.atom,
            })
            .collect(),
    );
    let got = unconditional_profile(w, prior, &out)?;
    let dev = max_abs_diff(&got.values, &target.values);
    if dev > PLAUSIBILITY_TOL {
        return Err(Error::ReductionFailed(format!("profile drifted by {dev:e}")));
    }
    Ok(out)
}

/// Controls for the randomized part of [`min_signals_with`]. `tol` bounds
/// the L1 deviation from the target.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    pub seed: u64,
    pub restarts: usize,
    pub tol: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            restarts: 64,
            tol: 1e-5,
        }
    }
}

pub fn min_signals(w: &PayoffSpec, prior: &Prior, target: &IPProfile, k: usize) -> Result<bool> {
    min_signals_with(w, prior, target, k, &SearchOptions::default())
}

/// Whether some Bayes-plausible distribution with at most `k` atoms reaches
/// `target` (in the closure).
///
/// Piecewise-constant payoffs are decided exactly by one LP per multiset of
/// `k` pieces. Other payoffs use a seeded multi-start search, so `false`
/// there only means the search found nothing.
pub fn min_signals_with(
    w: &PayoffSpec,
    prior: &Prior,
    target: &IPProfile,
    k: usize,
    opts: &SearchOptions,
) -> Result<bool> {
    check_len(w.profile_dim(), target.len(), "target dimension")?;
    if k == 0 {
        return Ok(false);
    }
    if let Some(pieces) = pieces::linear_pieces(w, prior) {
        if let Some(found) = piece_search(&pieces, prior, target, k, opts.tol)? {
            return Ok(found);
        }
    }
    let at_prior = adjusted_payoff(w, prior, &BeliefAtom::raw(prior.probs().to_vec(), Side::Exact))?;
    if max_abs_diff(&at_prior, &target.values) <= opts.tol {
        return Ok(true);
    }
    if k == 1 {
        return Ok(false);
    }
    if k >= 2 * prior.len() - 1 && !w.hyperplanes().is_empty() {
        // Discontinuous payoffs outside the piece model: defer to the closure.
        let grid = BeliefGrid::for_payoff(w, prior);
        return Ok(membership(w, prior, &grid, target)?.is_in());
    }
    random_search(w, prior, target, k, opts)
}

const MAX_MULTISETS: usize = 20_000;

fn multisets(p: usize, k: usize) -> Option<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; k];
    loop {
        out.push(cur.clone());
        if out.len() > MAX_MULTISETS {
            return None;
        }
        let mut i = k;
        loop {
            if i == 0 {
                return Some(out);
            }
            i -= 1;
            if cur[i] + 1 < p {
                cur[i] += 1;
                let v = cur[i];
                for c in cur.iter_mut().skip(i + 1) {
                    *c = v;
                }
                break;
            }
        }
    }
}

fn piece_search(
    pieces: &[pieces::LinearPiece],
    prior: &Prior,
    target: &IPProfile,
    k: usize,
    tol: f64,
) -> Result<Option<bool>> {
    let Some(sets) = multisets(pieces.len(), k) else {
        return Ok(None);
    };
    for set in sets {
        if piece_deviation(pieces, &set, prior, target)? <= tol {
            return Ok(Some(true));
        }
    }
    Ok(Some(false))
}

/// Smallest L1 deviation from `target` reachable with one atom per listed
/// piece. Variables are the scaled beliefs `x_m = p_m μ_m`.
fn piece_deviation(pieces: &[pieces::LinearPiece], set: &[usize], prior: &Prior, target: &IPProfile) -> Result<f64> {
    let n = prior.len();
    let p = target.len();
    let ineq_rows: usize = set.iter().map(|&s| pieces[s].ineqs.len()).sum();
    let rows = n + p + ineq_rows;
    let mut columns = Vec::new();
    let mut c = Vec::new();
    let mut offset = n + p;
    for &s in set {
        let piece = &pieces[s];
        for d in 0..n {
            let mut col = vec![0.0; rows];
            col[d] = 1.0;
            for r in 0..p {
                col[n + r] = piece.map[r][d];
            }
            for (q, g) in piece.ineqs.iter().enumerate() {
                col[offset + q] = g[d];
            }
            columns.push(col);
            c.push(0.0);
        }
        // gᵀx − e = 0 with surplus e ≥ 0.
        for q in 0..piece.ineqs.len() {
            let mut col = vec![0.0; rows];
            col[offset + q] = -1.0;
            columns.push(col);
            c.push(0.0);
        }
        offset += piece.ineqs.len();
    }
    for r in 0..p {
        for sign in [1.0, -1.0] {
            let mut col = vec![0.0; rows];
            col[n + r] = sign;
            columns.push(col);
            c.push(-1.0);
        }
    }
    let mut b = vec![0.0; rows];
    b[..n].copy_from_slice(prior.probs());
    b[n..n + p].copy_from_slice(&target.values);
    let lp = LinearProgram::from_columns(columns, b, c)?;
    Ok(match lp.solve()? {
        LpOutcome::Optimal(s) => -s.objective,
        LpOutcome::Infeasible(_) => f64::INFINITY,
        LpOutcome::Unbounded => return Err(Error::Lp("unbounded deviation program".into())),
    })
}

/// Best L1 deviation for fixed atom beliefs, optimizing the weights.
fn weight_deviation(w: &PayoffSpec, prior: &Prior, beliefs: &[Vec<f64>], target: &IPProfile) -> Result<f64> {
    let n = prior.len();
    let p = target.len();
    let rows = n + p;
    let mut columns = Vec::new();
    let mut c = Vec::new();
    for b in beliefs {
        let v = adjusted_payoff(w, prior, &BeliefAtom::raw(b.clone(), Side::Exact))?;
        columns.push(b.iter().chain(&v).copied().collect::<Vec<f64>>());
        c.push(0.0);
    }
    for r in 0..p {
        for sign in [1.0, -1.0] {
            let mut col = vec![0.0; rows];
            col[n + r] = sign;
            columns.push(col);
            c.push(-1.0);
        }
    }
    let mut bvec = prior.probs().to_vec();
    bvec.extend_from_slice(&target.values);
    let lp = LinearProgram::from_columns(columns, bvec, c)?;
    Ok(match lp.solve()? {
        LpOutcome::Optimal(s) => -s.objective,
        LpOutcome::Infeasible(_) => f64::INFINITY,
        LpOutcome::Unbounded => f64::INFINITY,
    })
}

fn random_belief(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let s: f64 = v.iter().sum();
    v.into_iter().map(|x| x / s).collect()
}

fn random_search(w: &PayoffSpec, prior: &Prior, target: &IPProfile, k: usize, opts: &SearchOptions) -> Result<bool> {
    let n = prior.len();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let accept = opts.tol;
    for _ in 0..opts.restarts.max(1) {
        let mut beliefs: Vec<Vec<f64>> = (0..k).map(|_| random_belief(&mut rng, n)).collect();
        let mut dev = weight_deviation(w, prior, &beliefs, target)?;
        let mut step = 0.25;
        for _ in 0..400 {
            if dev <= accept {
                return Ok(true);
            }
            let j = rng.gen_range(0..k);
            let old = beliefs[j].clone();
            let mut cand: Vec<f64> = old
                .iter()
                .map(|x| (x + step * rng.sample::<f64, _>(StandardNormal)).max(0.0))
                .collect();
            let s: f64 = cand.iter().sum();
            if s <= 0.0 {
                continue;
            }
            cand.iter_mut().for_each(|x| *x /= s);
            beliefs[j] = cand;
            let d = weight_deviation(w, prior, &beliefs, target)?;
            if d < dev {
                dev = d;
            } else {
                beliefs[j] = old;
                step = (step * 0.985).max(1e-6);
            }
        }
        if dev <= accept {
            return Ok(true);
        }
    }
    Ok(false)
}
