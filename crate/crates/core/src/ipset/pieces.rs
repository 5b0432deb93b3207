//! Affine pieces of piecewise-constant payoffs.
//!
//! On each piece the raw payoff is constant, so for `x = pμ` the scaled
//! adjusted payoff `p·ŵ(μ)` is linear in `x` and the piece membership is a
//! homogeneous linear constraint on `x`. This turns fixed-cardinality
//! feasibility questions into small LPs.

use crate::model::{PayoffSpec, Prior};

pub(crate) struct StatePiece {
    /// Rows `g` with `gᵀμ ≥ 0` on the (closed) piece.
    pub ineqs: Vec<Vec<f64>>,
    pub raw: Vec<f64>,
}

pub(crate) struct LinearPiece {
    pub ineqs: Vec<Vec<f64>>,
    /// `p·ŵ(μ) = map · (pμ)` on the piece.
    pub map: Vec<Vec<f64>>,
}

const MAX_PIECES: usize = 4096;

pub(crate) fn state_pieces(w: &PayoffSpec) -> Option<Vec<StatePiece>> {
    match w {
        PayoffSpec::Tabulated(s) => {
            let n = s.num_types();
            let cuts = s.cuts();
            Some(
                (0..=cuts.len())
                    .map(|k| {
                        let mut ineqs = Vec::new();
                        if k > 0 {
                            ineqs.push((0..n).map(|t| s.score()[t] - cuts[k - 1]).collect());
                        }
                        if k < cuts.len() {
                            ineqs.push((0..n).map(|t| cuts[k] - s.score()[t]).collect());
                        }
                        StatePiece {
                            ineqs,
                            raw: s.values()[k].clone(),
                        }
                    })
                    .collect(),
            )
        }
        PayoffSpec::PersuasionDerived(g) => Some(
            (0..g.num_actions())
                .map(|a| StatePiece {
                    ineqs: (0..g.num_actions())
                        .filter(|&b| b != a)
                        .map(|b| g.u()[a].iter().zip(&g.u()[b]).map(|(x, y)| x - y).collect())
                        .collect(),
                    raw: g.v()[a].clone(),
                })
                .collect(),
        ),
        PayoffSpec::LinearReputation(_) | PayoffSpec::CohortDerived(_) => None,
    }
}

pub(crate) fn linear_pieces(w: &PayoffSpec, prior: &Prior) -> Option<Vec<LinearPiece>> {
    if let PayoffSpec::CohortDerived(p) = w {
        let per_payoff: Vec<Vec<StatePiece>> = p.payoffs().iter().map(state_pieces).collect::<Option<_>>()?;
        let count = per_payoff.iter().try_fold(1usize, |acc, v| acc.checked_mul(v.len()))?;
        if count > MAX_PIECES || count == 0 {
            return None;
        }
        let m = p.state_given_data();
        let eta0 = p.data_prior().probs();
        let nd = p.num_data();
        let mut out = Vec::with_capacity(count);
        let mut choice = vec![0usize; per_payoff.len()];
        loop {
            let mut ineqs = Vec::new();
            for (j, pieces) in per_payoff.iter().enumerate() {
                for g in &pieces[choice[j]].ineqs {
                    ineqs.push(
                        (0..nd)
                            .map(|d| g.iter().enumerate().map(|(o, gv)| gv * m[o][d]).sum())
                            .collect(),
                    );
                }
            }
            let map = (0..p.num_cohorts())
                .map(|c| {
                    let j = if per_payoff.len() == 1 { 0 } else { c };
                    let raw = &per_payoff[j][choice[j]].raw;
                    (0..nd)
                        .map(|d| (0..p.num_states()).map(|o| p.cond_joint(c, o, d) * raw[o]).sum::<f64>() / eta0[d])
                        .collect()
                })
                .collect();
            out.push(LinearPiece { ineqs, map });
            // Odometer over piece choices.
            let mut i = 0;
            loop {
                if i == choice.len() {
                    return Some(out);
                }
                choice[i] += 1;
                if choice[i] < per_payoff[i].len() {
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
        }
    }
    let pieces = state_pieces(w)?;
    let n = prior.len();
    Some(
        pieces
            .into_iter()
            .map(|sp| LinearPiece {
                ineqs: sp.ineqs,
                map: (0..n)
                    .map(|r| {
                        (0..n)
                            .map(|c| if r == c { sp.raw[r] / prior.probs()[r] } else { 0.0 })
                            .collect()
                    })
                    .collect(),
            })
            .collect(),
    )
}
