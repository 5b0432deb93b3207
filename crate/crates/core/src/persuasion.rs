//! Receiver games: best responses, the sender payoff set V, cautious
//! (maxmin) persuasion and communication-equilibrium payoffs.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::ipset::{AtomTable, BeliefGrid, Direction, SupportSolution};
use crate::lp::{LinearProgram, LpOutcome};
use crate::model::{
    dot, interim_profile, posterior_distribution, BeliefAtom, BeliefDistribution, Hyperplane, IPProfile,
    InformationStructure, PayoffSpec, Prior, Side, MIN_SIGNAL_PROB,
};

/// Optimality slack for best responses.
pub const BR_SLACK: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGame")]
pub struct ReceiverGame {
    actions: Vec<String>,
    /// `u[a][θ]`: receiver payoff.
    u: Vec<Vec<f64>>,
    /// `v[a][θ]`: sender payoff.
    v: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
struct RawGame {
    actions: Vec<String>,
    u: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
}

impl TryFrom<RawGame> for ReceiverGame {
    type Error = Error;
    fn try_from(raw: RawGame) -> Result<Self> {
        Self::new(raw.actions, raw.u, raw.v)
    }
}

impl ReceiverGame {
    pub fn new(actions: Vec<String>, u: Vec<Vec<f64>>, v: Vec<Vec<f64>>) -> Result<Self> {
        if actions.is_empty() {
            return Err(Error::invalid("receiver game needs at least one action"));
        }
        check_len(actions.len(), u.len(), "receiver payoff rows")?;
        check_len(actions.len(), v.len(), "sender payoff rows")?;
        let n = u[0].len();
        if n == 0 {
            return Err(Error::invalid("receiver game needs at least one type"));
        }
        for row in u.iter().chain(&v) {
            check_len(n, row.len(), "payoff entries per type")?;
            if row.iter().any(|x| !x.is_finite()) {
                return Err(Error::invalid("receiver game has non-finite payoffs"));
            }
        }
        Ok(Self { actions, u, v })
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn u(&self) -> &[Vec<f64>] {
        &self.u
    }

    pub fn v(&self) -> &[Vec<f64>] {
        &self.v
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn num_types(&self) -> usize {
        self.u[0].len()
    }

    /// First action whose sender payoff varies with the type.
    pub fn type_dependent_action(&self) -> Option<usize> {
        self.v
            .iter()
            .position(|row| row.iter().any(|x| (x - row[0]).abs() > 1e-12))
    }

    /// Selected best response. `Exact` and `Upper` pick the sender-preferred
    /// action (largest `E_μ v(a, θ)`), `Lower` the sender-worst one; ties go
    /// to the lower index.
    pub fn select_action(&self, atom: &BeliefAtom) -> usize {
        let br = best_responses(self, atom);
        let value = |a: usize| dot(&atom.belief, &self.v[a]);
        let mut best = br[0];
        for &a in &br[1..] {
            let better = match atom.side {
                Side::Lower => value(a) < value(best) - 1e-15,
                Side::Upper | Side::Exact => value(a) > value(best) + 1e-15,
            };
            if better {
                best = a;
            }
        }
        best
    }

    pub fn indifference_hyperplanes(&self) -> Vec<Hyperplane> {
        let mut out: Vec<Hyperplane> = Vec::new();
        for a in 0..self.num_actions() {
            for b in a + 1..self.num_actions() {
                let normal: Vec<f64> = self.u[a].iter().zip(&self.u[b]).map(|(x, y)| x - y).collect();
                if normal.iter().all(|x| x.abs() < 1e-15) {
                    continue;
                }
                // A normal proportional to the all-ones vector never cuts the simplex.
                if normal.iter().all(|x| (x - normal[0]).abs() < 1e-15) {
                    continue;
                }
                out.push(Hyperplane { normal, offset: 0.0 });
            }
        }
        out
    }
}

/// All actions within [`BR_SLACK`] of the receiver's best expected payoff.
pub fn best_responses(g: &ReceiverGame, mu: &BeliefAtom) -> Vec<usize> {
    let vals: Vec<f64> = g.u.iter().map(|row| dot(row, &mu.belief)).collect();
    let best = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (0..vals.len()).filter(|&a| vals[a] >= best - BR_SLACK).collect()
}

/// Adjusted sender payoff vectors, one per pure best response.
pub fn indirect_payoff_atoms(g: &ReceiverGame, prior: &Prior, mu: &BeliefAtom) -> Result<Vec<Vec<f64>>> {
    check_len(g.num_types(), prior.len(), "game types vs prior")?;
    check_len(prior.len(), mu.dim(), "belief dimension")?;
    let ratios = prior.likelihood_ratios(&mu.belief);
    Ok(best_responses(g, mu)
        .into_iter()
        .map(|a| ratios.iter().zip(&g.v[a]).map(|(r, v)| r * v).collect())
        .collect())
}

/// Columns of V: every distinct grid belief paired with each of its best
/// responses.
pub fn v_table(g: &ReceiverGame, prior: &Prior, grid: &BeliefGrid) -> Result<AtomTable> {
    check_len(g.num_types(), prior.len(), "game types vs prior")?;
    let mut seen = HashSet::new();
    let mut atoms = Vec::new();
    let mut adjusted = Vec::new();
    let mut actions = Vec::new();
    for a in grid.atoms() {
        let key: Vec<i64> = a.belief.iter().map(|x| (x * 1e11).round() as i64).collect();
        if !seen.insert(key) {
            continue;
        }
        let atom = a.with_side(Side::Exact);
        let ratios = prior.likelihood_ratios(&atom.belief);
        for act in best_responses(g, &atom) {
            adjusted.push(ratios.iter().zip(&g.v[act]).map(|(r, v)| r * v).collect());
            atoms.push(atom.clone());
            actions.push(Some(act));
        }
    }
    AtomTable::from_columns(prior, atoms, adjusted, actions)
}

/// Support function of V in direction `d`; the maximum is attained.
pub fn v_set_support(g: &ReceiverGame, prior: &Prior, grid: &BeliefGrid, d: &Direction) -> Result<SupportSolution> {
    v_table(g, prior, grid)?.support(d)
}

/// Default grid for a game: the lattice plus all indifference crossings.
pub fn game_grid(g: &ReceiverGame, prior: &Prior) -> BeliefGrid {
    BeliefGrid::for_payoff(&PayoffSpec::PersuasionDerived(g.clone()), prior)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CautiousSolution {
    pub value: f64,
    pub profile: IPProfile,
    pub tau: BeliefDistribution,
    /// Recommended action per atom of `tau`.
    pub actions: Vec<usize>,
    /// `λ ≥ 0`, `Σλ = 1`, with the profile on the supporting hyperplane of V.
    pub supporting: Direction,
}

/// Builds rows `[μ_j ; ŵ_j − t·e − e_i]` shared by the maxmin and equal-profile programs.
struct ProfileProgram {
    columns: Vec<Vec<f64>>,
    b: Vec<f64>,
    n_atoms: usize,
}

impl ProfileProgram {
    /// Columns: atoms, then `t⁺`, `t⁻`, then one surplus per type if `surplus`.
    fn new(table: &AtomTable, surplus: bool) -> Self {
        let n = table.prior().len();
        let p = table.profile_dim();
        let rows = n + p;
        let mut columns: Vec<Vec<f64>> = table
            .atoms()
            .iter()
            .zip(table.adjusted())
            .map(|(a, v)| a.belief.iter().chain(v).copied().collect())
            .collect();
        for sign in [-1.0, 1.0] {
            let mut col = vec![0.0; rows];
            col[n..].iter_mut().for_each(|x| *x = sign);
            columns.push(col);
        }
        if surplus {
            for i in 0..p {
                let mut col = vec![0.0; rows];
                col[n + i] = -1.0;
                columns.push(col);
            }
        }
        let mut b = vec![0.0; rows];
        b[..n].copy_from_slice(table.prior().probs());
        Self {
            columns,
            b,
            n_atoms: table.len(),
        }
    }

    fn t_cost(&self, sign: f64) -> Vec<f64> {
        let mut c = vec![0.0; self.columns.len()];
        c[self.n_atoms] = sign;
        c[self.n_atoms + 1] = -sign;
        c
    }
}

/// Maxmin over types: `max t` s.t. `v ∈ V`, `v_i ≥ t`, followed by a second
/// stage that maximizes `Σv` at the optimal `t` so the profile is Pareto
/// undominated in V.
pub fn cautious_value(g: &ReceiverGame, prior: &Prior, grid: &BeliefGrid) -> Result<CautiousSolution> {
    let table = v_table(g, prior, grid)?;
    let n = prior.len();
    let prog = ProfileProgram::new(&table, true);
    let lp = LinearProgram::from_columns(prog.columns.clone(), prog.b.clone(), prog.t_cost(1.0))?;
    let stage1 = match lp.solve()? {
        LpOutcome::Optimal(s) => s,
        LpOutcome::Infeasible(_) => return Err(Error::GridTooCoarse),
        LpOutcome::Unbounded => return Err(Error::Lp("maxmin program unbounded".into())),
    };
    let t_star = stage1.objective;
    let lambda: Vec<f64> = stage1.duals[n..].iter().map(|y| (-y).max(0.0)).collect();
    let total: f64 = lambda.iter().sum();
    let supporting = if total > 1e-12 {
        Direction::new(lambda.iter().map(|x| x / total).collect())?
    } else {
        Direction::new(vec![1.0 / n as f64; n])?
    };

    // Stage two: pin t ≥ t* − ε and push the profile outward.
    let mut columns = prog.columns.clone();
    let rows = prog.b.len() + 1;
    for col in columns.iter_mut() {
        col.push(0.0);
    }
    columns[prog.n_atoms][rows - 1] = 1.0;
    columns[prog.n_atoms + 1][rows - 1] = -1.0;
    let mut fix = vec![0.0; rows];
    fix[rows - 1] = -1.0;
    columns.push(fix);
    let mut b = prog.b.clone();
    b.push(t_star - 1e-10);
    let mut c: Vec<f64> = table.adjusted().iter().map(|v| v.iter().sum()).collect();
    c.resize(columns.len(), 0.0);
    let lp2 = LinearProgram::from_columns(columns, b, c)?;
    let x = match lp2.solve()? {
        LpOutcome::Optimal(s) => s.x,
        _ => stage1.x,
    };
    let (tau, profile, idx) = table.distribution(&x);
    let actions = idx.iter().map(|&j| table.actions()[j].unwrap_or(0)).collect();
    Ok(CautiousSolution {
        value: t_star,
        profile,
        tau,
        actions,
        supporting,
    })
}

/// Range `[t_lo, t_hi]` of `t` with `(t, …, t) ∈ V`.
pub fn comm_eq_profiles(g: &ReceiverGame, prior: &Prior, grid: &BeliefGrid) -> Result<(f64, f64)> {
    if let Some(action) = g.type_dependent_action() {
        return Err(Error::TypeDependentSenderPayoff { action });
    }
    let table = v_table(g, prior, grid)?;
    let prog = ProfileProgram::new(&table, false);
    let mut ends = [0.0; 2];
    for (k, sign) in [-1.0, 1.0].into_iter().enumerate() {
        let lp = LinearProgram::from_columns(prog.columns.clone(), prog.b.clone(), prog.t_cost(sign))?;
        ends[k] = match lp.solve()? {
            LpOutcome::Optimal(s) => sign * s.objective,
            LpOutcome::Infeasible(_) => return Err(Error::GridTooCoarse),
            LpOutcome::Unbounded => return Err(Error::Lp("equal-profile program unbounded".into())),
        };
    }
    Ok((ends[0], ends[1]))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActionReduction {
    /// One signal per recommended action.
    pub structure: InformationStructure,
    pub actions: Vec<usize>,
}

/// Merges signals that lead to the same sender-preferred best response.
pub fn reduce_to_actions(g: &ReceiverGame, prior: &Prior, pi: &InformationStructure) -> Result<ActionReduction> {
    check_len(g.num_types(), prior.len(), "game types vs prior")?;
    check_len(prior.len(), pi.num_types(), "structure rows vs prior")?;
    let probs = pi.signal_probs(prior);
    let mut actions: Vec<usize> = Vec::new();
    let mut assignment = vec![None; pi.num_signals()];
    for (s, &p) in probs.iter().enumerate() {
        if p <= MIN_SIGNAL_PROB {
            continue;
        }
        let atom = crate::model::posterior(prior, pi, s)?;
        let a = g.select_action(&atom);
        let slot = match actions.iter().position(|&x| x == a) {
            Some(i) => i,
            None => {
                actions.push(a);
                actions.len() - 1
            }
        };
        assignment[s] = Some(slot);
    }
    let rows = (0..prior.len())
        .map(|t| {
            let mut row = vec![0.0; actions.len()];
            for (s, slot) in assignment.iter().enumerate() {
                if let Some(k) = slot {
                    row[*k] += pi.prob(t, s);
                }
            }
            let total: f64 = row.iter().sum();
            row.iter_mut().for_each(|x| *x /= total);
            row
        })
        .collect();
    let labels = actions.iter().map(|&a| g.actions[a].clone()).collect();
    let structure = InformationStructure::with_labels(rows, labels)?;
    Ok(ActionReduction { structure, actions })
}

/// Sender's interim profile under the sender-preferred selection.
pub fn sender_profile(g: &ReceiverGame, prior: &Prior, pi: &InformationStructure) -> Result<IPProfile> {
    interim_profile(&PayoffSpec::PersuasionDerived(g.clone()), prior, pi)
}

/// Posterior distribution with the recommended action per atom.
pub fn recommendations(
    g: &ReceiverGame,
    prior: &Prior,
    pi: &InformationStructure,
) -> Result<Vec<(f64, BeliefAtom, usize)>> {
    let tau = posterior_distribution(prior, pi)?;
    Ok(tau
        .atoms()
        .iter()
        .map(|a| (a.weight, a.atom.clone(), g.select_action(&a.atom)))
        .collect())
}
