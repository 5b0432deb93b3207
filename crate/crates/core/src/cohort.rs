//! Cohort, state and data: information structures act on data `d`, payoffs
//! depend on the induced belief about the state `ω`, and profiles are
//! indexed by cohort `c`.

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::exec::Execution;
use crate::ipset::{approximate_set_with, AtomTable, BeliefGrid, Direction, GridOptions, IPSetApprox};
use crate::model::{
    dot, posterior, BeliefAtom, Hyperplane, IPProfile, InformationStructure, PayoffSpec, Prior, MIN_SIGNAL_PROB,
    NORMALIZATION_TOL,
};

/// Serialized form; derived quantities are rebuilt on load.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CohortSpec {
    pub cohorts: Vec<String>,
    pub states: Vec<String>,
    pub data: Vec<String>,
    /// `joint[c][ω][d]`.
    pub joint: Vec<Vec<Vec<f64>>>,
    /// Payoffs over state beliefs: one shared, or one per cohort.
    pub payoffs: Vec<PayoffSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CohortSpec", into = "CohortSpec")]
pub struct CohortProblem {
    spec: CohortSpec,
    data_prior: Prior,
    cohort_mass: Vec<f64>,
    /// `P(ω | d)`, indexed `[ω][d]`.
    state_given_data: Vec<Vec<f64>>,
    /// `P(ω, d | c)`, indexed `[c][ω][d]`.
    cond: Vec<Vec<Vec<f64>>>,
}

impl TryFrom<CohortSpec> for CohortProblem {
    type Error = Error;
    fn try_from(spec: CohortSpec) -> Result<Self> {
        CohortProblem::new(spec)
    }
}

impl From<CohortProblem> for CohortSpec {
    fn from(p: CohortProblem) -> Self {
        p.spec
    }
}

impl CohortProblem {
    pub fn new(spec: CohortSpec) -> Result<Self> {
        let (nc, no, nd) = (spec.cohorts.len(), spec.states.len(), spec.data.len());
        if nc == 0 || no == 0 || nd == 0 {
            return Err(Error::invalid("cohort problem needs cohorts, states and data"));
        }
        check_len(nc, spec.joint.len(), "joint tensor cohorts")?;
        for slab in &spec.joint {
            check_len(no, slab.len(), "joint tensor states")?;
            for row in slab {
                check_len(nd, row.len(), "joint tensor data")?;
            }
        }
        let entries = spec.joint.iter().flatten().flatten();
        if let Some(x) = entries.clone().find(|x| !x.is_finite() || **x < 0.0) {
            return Err(Error::invalid(format!("joint tensor entry {x} is not a probability")));
        }
        let total: f64 = entries.sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::invalid(format!("joint tensor sums to {total}")));
        }
        if spec.payoffs.len() != 1 && spec.payoffs.len() != nc {
            return Err(Error::invalid("give one shared payoff or one per cohort"));
        }
        for w in &spec.payoffs {
            if matches!(w, PayoffSpec::CohortDerived(_)) {
                return Err(Error::invalid("cohort payoffs must be defined on state beliefs"));
            }
            check_len(no, w.belief_dim(), "payoff dimension vs states")?;
        }
        let cohort_mass: Vec<f64> = spec.joint.iter().map(|s| s.iter().flatten().sum()).collect();
        if let Some(c) = cohort_mass.iter().position(|&m| m <= 0.0) {
            return Err(Error::CohortZeroMass { cohort: c });
        }
        let eta0: Vec<f64> = (0..nd)
            .map(|d| spec.joint.iter().flat_map(|s| s.iter().map(move |r| r[d])).sum())
            .collect();
        if let Some(d) = eta0.iter().position(|&m| m <= 0.0) {
            return Err(Error::invalid(format!("data value {d} has zero probability")));
        }
        let state_given_data = (0..no)
            .map(|o| {
                (0..nd)
                    .map(|d| spec.joint.iter().map(|s| s[o][d]).sum::<f64>() / eta0[d])
                    .collect()
            })
            .collect();
        let cond = spec
            .joint
            .iter()
            .zip(&cohort_mass)
            .map(|(s, m)| s.iter().map(|r| r.iter().map(|x| x / m).collect()).collect())
            .collect();
        let s: f64 = eta0.iter().sum();
        let data_prior = Prior::new(eta0.iter().map(|x| x / s).collect())?;
        Ok(Self {
            spec,
            data_prior,
            cohort_mass,
            state_given_data,
            cond,
        })
    }

    /// Types double as cohorts and states; the data reports the type with
    /// precision `sigma` and is otherwise uniform over the other types.
    pub fn noisy_type(prior: &Prior, sigma: f64, payoff: PayoffSpec) -> Result<Self> {
        let n = prior.len();
        if !(0.0..=1.0).contains(&sigma) {
            return Err(Error::invalid(format!("precision {sigma} outside [0, 1]")));
        }
        if n < 2 {
            return Err(Error::invalid("noisy types need at least two types"));
        }
        let labels: Vec<String> = (1..=n).map(|i| format!("theta{i}")).collect();
        let data: Vec<String> = (1..=n).map(|i| format!("d{i}")).collect();
        let off = (1.0 - sigma) / (n - 1) as f64;
        let joint = (0..n)
            .map(|c| {
                (0..n)
                    .map(|o| {
                        (0..n)
                            .map(|d| {
                                if c != o {
                                    0.0
                                } else {
                                    prior.probs()[o] * if d == o { sigma } else { off }
                                }
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Self::new(CohortSpec {
            cohorts: labels.clone(),
            states: labels,
            data,
            joint,
            payoffs: vec![payoff],
        })
    }

    pub fn spec(&self) -> &CohortSpec {
        &self.spec
    }

    pub fn num_cohorts(&self) -> usize {
        self.spec.cohorts.len()
    }

    pub fn num_states(&self) -> usize {
        self.spec.states.len()
    }

    pub fn num_data(&self) -> usize {
        self.spec.data.len()
    }

    pub fn payoffs(&self) -> &[PayoffSpec] {
        &self.spec.payoffs
    }

    pub fn payoff_for(&self, c: usize) -> &PayoffSpec {
        if self.spec.payoffs.len() == 1 {
            &self.spec.payoffs[0]
        } else {
            &self.spec.payoffs[c]
        }
    }

    /// Marginal `η0` over data.
    pub fn data_prior(&self) -> &Prior {
        &self.data_prior
    }

    pub fn cohort_mass(&self) -> &[f64] {
        &self.cohort_mass
    }

    pub fn state_given_data(&self) -> &[Vec<f64>] {
        &self.state_given_data
    }

    /// `P(ω, d | c)`.
    pub fn cond_joint(&self, c: usize, o: usize, d: usize) -> f64 {
        self.cond[c][o][d]
    }

    /// State belief `μ(η)(ω) = Σ_d P(ω|d) η(d)`, carrying the atom's side.
    pub fn state_belief(&self, eta: &BeliefAtom) -> BeliefAtom {
        let mu = self.state_given_data.iter().map(|row| dot(row, &eta.belief)).collect();
        BeliefAtom::raw(mu, eta.side)
    }

    /// `ŵ†(η, c) = Σ_{ω,d} P(ω,d|c) η(d)/η0(d) w†(η, ω, c)`.
    pub fn adjusted_cohort_payoff(&self, eta: &BeliefAtom) -> Result<Vec<f64>> {
        check_len(self.num_data(), eta.dim(), "data belief dimension")?;
        let mu = self.state_belief(eta);
        let ratios = self.data_prior.likelihood_ratios(&eta.belief);
        let mut cache: Vec<Option<Vec<f64>>> = vec![None; self.spec.payoffs.len()];
        (0..self.num_cohorts())
            .map(|c| {
                let j = if self.spec.payoffs.len() == 1 { 0 } else { c };
                if cache[j].is_none() {
                    cache[j] = Some(self.spec.payoffs[j].value(&mu)?);
                }
                let w = cache[j].as_ref().expect("filled above");
                let mut total = 0.0;
                for (o, wo) in w.iter().enumerate() {
                    for (d, r) in ratios.iter().enumerate() {
                        if eta.belief[d] > 0.0 {
                            total += self.cond[c][o][d] * r * wo;
                        }
                    }
                }
                Ok(total)
            })
            .collect()
    }

    /// Data posterior after signal `s` of a structure on data.
    pub fn data_posterior(&self, pi: &InformationStructure, s: usize) -> Result<BeliefAtom> {
        posterior(&self.data_prior, pi, s)
    }

    /// Expected payoff conditional on each cohort, evaluated directly.
    pub fn cohort_interim_profile(&self, pi: &InformationStructure) -> Result<IPProfile> {
        check_len(self.num_data(), pi.num_types(), "structure rows vs data")?;
        let probs = pi.signal_probs(&self.data_prior);
        let mut out = vec![0.0; self.num_cohorts()];
        for (s, &p) in probs.iter().enumerate() {
            if p <= MIN_SIGNAL_PROB {
                continue;
            }
            let mu = self.state_belief(&self.data_posterior(pi, s)?);
            for (c, o_c) in out.iter_mut().enumerate() {
                let w = self.payoff_for(c).value(&mu)?;
                for (o, wo) in w.iter().enumerate() {
                    for d in 0..self.num_data() {
                        *o_c += self.cond[c][o][d] * pi.prob(d, s) * wo;
                    }
                }
            }
        }
        IPProfile::new(out)
    }

    /// Payoff breakpoints pulled back to data beliefs.
    pub fn data_hyperplanes(&self) -> Vec<Hyperplane> {
        let mut out: Vec<Hyperplane> = Vec::new();
        for w in &self.spec.payoffs {
            for h in w.hyperplanes() {
                let normal: Vec<f64> = (0..self.num_data())
                    .map(|d| {
                        (0..self.num_states())
                            .map(|o| h.normal[o] * self.state_given_data[o][d])
                            .sum()
                    })
                    .collect();
                let flat = normal.iter().all(|x| (x - normal[0]).abs() < 1e-14);
                if flat && (normal[0] - h.offset).abs() > 1e-12 {
                    continue;
                }
                let hp = Hyperplane {
                    normal,
                    offset: h.offset,
                };
                if !out.contains(&hp) {
                    out.push(hp);
                }
            }
        }
        out
    }

    pub(crate) fn piece_key(&self, eta: &BeliefAtom) -> Option<Vec<usize>> {
        let mu = self.state_belief(eta);
        let mut key = Vec::new();
        for w in &self.spec.payoffs {
            key.extend(w.piece_key(&mu)?);
        }
        Some(key)
    }

    /// The problem as a payoff over data beliefs.
    pub fn as_payoff(&self) -> PayoffSpec {
        PayoffSpec::CohortDerived(Box::new(self.clone()))
    }

    pub fn default_grid(&self) -> BeliefGrid {
        BeliefGrid::for_payoff(&self.as_payoff(), &self.data_prior)
    }

    pub fn grid_with(&self, opts: GridOptions) -> BeliefGrid {
        BeliefGrid::with_options(&self.as_payoff(), &self.data_prior, opts)
    }

    pub fn table(&self, grid: &BeliefGrid) -> Result<AtomTable> {
        AtomTable::new(&self.as_payoff(), &self.data_prior, grid)
    }
}

/// Row-stochastic map from data `D` to garbled data `D′`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct GarblingMatrix {
    rows: Vec<Vec<f64>>,
}

impl GarblingMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        InformationStructure::new(rows.clone())?;
        Ok(Self { rows })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            rows: (0..n)
                .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                .collect(),
        }
    }

    /// Keeps the data value with probability `sigma`, otherwise moves it
    /// uniformly to one of the others.
    pub fn symmetric(n: usize, sigma: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("symmetric garbling needs two data values"));
        }
        let off = (1.0 - sigma) / (n - 1) as f64;
        Self::new(
            (0..n)
                .map(|i| (0..n).map(|j| if i == j { sigma } else { off }).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn inputs(&self) -> usize {
        self.rows.len()
    }

    pub fn outputs(&self) -> usize {
        self.rows[0].len()
    }
}

impl TryFrom<Vec<Vec<f64>>> for GarblingMatrix {
    type Error = Error;
    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        GarblingMatrix::new(rows)
    }
}

impl From<GarblingMatrix> for Vec<Vec<f64>> {
    fn from(g: GarblingMatrix) -> Self {
        g.rows
    }
}

/// Post-composes the data source with `g`. Garbled data values that never
/// occur are dropped so the data marginal keeps full support.
pub fn garble(p: &CohortProblem, g: &GarblingMatrix) -> Result<CohortProblem> {
    check_len(p.num_data(), g.inputs(), "garbling rows vs data")?;
    let m = g.outputs();
    let joint: Vec<Vec<Vec<f64>>> = p
        .spec
        .joint
        .iter()
        .map(|slab| {
            slab.iter()
                .map(|row| {
                    (0..m)
                        .map(|k| row.iter().zip(&g.rows).map(|(x, gr)| x * gr[k]).sum())
                        .collect()
                })
                .collect()
        })
        .collect();
    let keep: Vec<usize> = (0..m)
        .filter(|&k| joint.iter().flatten().map(|r: &Vec<f64>| r[k]).sum::<f64>() > MIN_SIGNAL_PROB)
        .collect();
    let joint = joint
        .into_iter()
        .map(|slab| slab.into_iter().map(|r| keep.iter().map(|&k| r[k]).collect()).collect())
        .collect();
    let data = if m == p.num_data() && keep.len() == m {
        p.spec.data.clone()
    } else {
        keep.iter().map(|k| format!("g{}", k + 1)).collect()
    };
    CohortProblem::new(CohortSpec {
        cohorts: p.spec.cohorts.clone(),
        states: p.spec.states.clone(),
        data,
        joint,
        payoffs: p.spec.payoffs.clone(),
    })
}

pub fn cohort_set(p: &CohortProblem, grid: &BeliefGrid, dirs: &[Direction]) -> Result<IPSetApprox> {
    cohort_set_with(p, grid, dirs, Execution::default())
}

pub fn cohort_set_with(
    p: &CohortProblem,
    grid: &BeliefGrid,
    dirs: &[Direction],
    exec: Execution,
) -> Result<IPSetApprox> {
    approximate_set_with(&p.as_payoff(), p.data_prior(), grid, dirs, exec)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlackwellReport {
    pub directions: Vec<Direction>,
    pub original: Vec<f64>,
    pub garbled: Vec<f64>,
    /// Indices of directions where the garbled support exceeds the original
    /// by more than the tolerance.
    pub violations: Vec<usize>,
    /// `min(original − garbled)` over directions.
    pub min_slack: f64,
}

impl BlackwellReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Support-function comparison of the original and garbled sets.
pub fn blackwell_inclusion_test(p: &CohortProblem, g: &GarblingMatrix, dirs: &[Direction]) -> Result<BlackwellReport> {
    blackwell_inclusion_with(p, g, dirs, None, Execution::default())
}

pub fn blackwell_inclusion_with(
    p: &CohortProblem,
    g: &GarblingMatrix,
    dirs: &[Direction],
    opts: Option<GridOptions>,
    exec: Execution,
) -> Result<BlackwellReport> {
    let q = garble(p, g)?;
    let grid_of = |x: &CohortProblem| match opts {
        Some(o) => x.grid_with(o),
        None => x.default_grid(),
    };
    let a = p.table(&grid_of(p))?;
    let b = q.table(&grid_of(&q))?;
    let pairs = exec
        .map(dirs, |d| Ok::<_, Error>((a.support(d)?.value, b.support(d)?.value)))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let original: Vec<f64> = pairs.iter().map(|x| x.0).collect();
    let garbled: Vec<f64> = pairs.iter().map(|x| x.1).collect();
    let slacks: Vec<f64> = original.iter().zip(&garbled).map(|(o, g)| o - g).collect();
    let violations = (0..slacks.len()).filter(|&i| slacks[i] < -1e-6).collect();
    Ok(BlackwellReport {
        directions: dirs.to_vec(),
        original,
        garbled,
        violations,
        min_slack: slacks.iter().copied().fold(f64::INFINITY, f64::min),
    })
}
