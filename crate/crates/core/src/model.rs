//! Priors, information structures, belief distributions and payoff evaluation.

use serde::{Deserialize, Serialize};

use crate::cohort::CohortProblem;
use crate::error::{check_len, Error, Result};
use crate::persuasion::ReceiverGame;

/// Tolerance for input normalization checks.
pub const NORMALIZATION_TOL: f64 = 1e-9;
/// Tolerance for Bayes plausibility and LP equalities.
pub const PLAUSIBILITY_TOL: f64 = 1e-7;
/// Signals below this unconditional probability are treated as absent.
pub const MIN_SIGNAL_PROB: f64 = 1e-12;
/// Two beliefs closer than this (sup norm) are the same posterior.
pub const MERGE_TOL: f64 = 1e-12;
/// A score within this distance of a breakpoint sits on it.
pub const BREAKPOINT_TOL: f64 = 1e-10;

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn check_probability_vector(v: &[f64], what: &str) -> Result<()> {
    if v.is_empty() {
        return Err(Error::invalid(format!("{what} is empty")));
    }
    if let Some(x) = v.iter().find(|x| !x.is_finite() || **x < 0.0) {
        return Err(Error::invalid(format!("{what} has invalid entry {x}")));
    }
    let s: f64 = v.iter().sum();
    if (s - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::invalid(format!("{what} sums to {s}, not 1")));
    }
    Ok(())
}

/// Full-support distribution over the N types.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Prior {
    probs: Vec<f64>,
}

impl Prior {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        check_probability_vector(&probs, "prior")?;
        if let Some(i) = probs.iter().position(|&p| p <= 0.0) {
            return Err(Error::invalid(format!("prior entry {i} is not positive")));
        }
        Ok(Self { probs })
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0, "uniform prior needs at least one type");
        Self {
            probs: vec![1.0 / n as f64; n],
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Diagonal of `D0 = diag(1/μ0)`.
    pub fn inverse_diagonal(&self) -> Vec<f64> {
        self.probs.iter().map(|p| 1.0 / p).collect()
    }

    /// Posterior-to-prior likelihood ratios `μ(θ)/μ0(θ)`.
    pub fn likelihood_ratios(&self, belief: &[f64]) -> Vec<f64> {
        belief.iter().zip(&self.probs).map(|(m, p)| m / p).collect()
    }

    pub fn is_uniform(&self, tol: f64) -> bool {
        let u = 1.0 / self.len() as f64;
        self.probs.iter().all(|p| (p - u).abs() <= tol)
    }
}

impl TryFrom<Vec<f64>> for Prior {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Prior::new(v)
    }
}

impl From<Prior> for Vec<f64> {
    fn from(p: Prior) -> Self {
        p.probs
    }
}

/// Row-stochastic type × signal likelihood matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawStructure")]
pub struct InformationStructure {
    likelihoods: Vec<Vec<f64>>,
    signal_labels: Vec<String>,
}

#[derive(Deserialize)]
struct RawStructure {
    likelihoods: Vec<Vec<f64>>,
    #[serde(default)]
    signal_labels: Option<Vec<String>>,
}

impl TryFrom<RawStructure> for InformationStructure {
    type Error = Error;
    fn try_from(raw: RawStructure) -> Result<Self> {
        match raw.signal_labels {
            Some(labels) => Self::with_labels(raw.likelihoods, labels),
            None => Self::new(raw.likelihoods),
        }
    }
}

impl InformationStructure {
    pub fn new(likelihoods: Vec<Vec<f64>>) -> Result<Self> {
        let k = likelihoods.first().map_or(0, Vec::len);
        let labels = (1..=k).map(|s| format!("s{s}")).collect();
        Self::with_labels(likelihoods, labels)
    }

    pub fn with_labels(likelihoods: Vec<Vec<f64>>, signal_labels: Vec<String>) -> Result<Self> {
        if likelihoods.is_empty() {
            return Err(Error::invalid("information structure has no rows"));
        }
        let k = signal_labels.len();
        if k == 0 {
            return Err(Error::invalid("information structure has no signals"));
        }
        for (i, row) in likelihoods.iter().enumerate() {
            check_len(k, row.len(), "signals per likelihood row")?;
            check_probability_vector(row, &format!("likelihood row {i}"))?;
        }
        Ok(Self {
            likelihoods,
            signal_labels,
        })
    }

    pub fn uninformative(n: usize) -> Self {
        Self {
            likelihoods: vec![vec![1.0]; n],
            signal_labels: vec!["s1".into()],
        }
    }

    pub fn full_disclosure(n: usize) -> Self {
        let likelihoods = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self {
            likelihoods,
            signal_labels: (1..=n).map(|s| format!("s{s}")).collect(),
        }
    }

    pub fn likelihoods(&self) -> &[Vec<f64>] {
        &self.likelihoods
    }

    pub fn signal_labels(&self) -> &[String] {
        &self.signal_labels
    }

    pub fn num_types(&self) -> usize {
        self.likelihoods.len()
    }

    pub fn num_signals(&self) -> usize {
        self.signal_labels.len()
    }

    /// `π(s | θ)`.
    pub fn prob(&self, theta: usize, s: usize) -> f64 {
        self.likelihoods[theta][s]
    }

    /// Unconditional signal probabilities `Σθ μ0(θ)π(s|θ)`.
    pub fn signal_probs(&self, prior: &Prior) -> Vec<f64> {
        (0..self.num_signals())
            .map(|s| {
                prior
                    .probs()
                    .iter()
                    .enumerate()
                    .map(|(t, p)| p * self.likelihoods[t][s])
                    .sum()
            })
            .collect()
    }
}

/// One-sided evaluation selector at payoff discontinuities.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Lower,
    Upper,
    #[default]
    Exact,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeliefAtom {
    pub belief: Vec<f64>,
    #[serde(default)]
    pub side: Side,
}

impl BeliefAtom {
    pub fn new(belief: Vec<f64>, side: Side) -> Result<Self> {
        check_probability_vector(&belief, "belief")?;
        Ok(Self { belief, side })
    }

    pub fn exact(belief: Vec<f64>) -> Result<Self> {
        Self::new(belief, Side::Exact)
    }

    /// Builds an atom without validation; callers guarantee a valid belief.
    pub(crate) fn raw(belief: Vec<f64>, side: Side) -> Self {
        Self { belief, side }
    }

    pub fn dim(&self) -> usize {
        self.belief.len()
    }

    pub fn with_side(&self, side: Side) -> Self {
        Self {
            belief: self.belief.clone(),
            side,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedAtom {
    pub weight: f64,
    pub atom: BeliefAtom,
}

/// A finite distribution over posteriors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeliefDistribution {
    atoms: Vec<WeightedAtom>,
}

impl BeliefDistribution {
    pub fn new(atoms: Vec<WeightedAtom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::invalid("belief distribution has no atoms"));
        }
        let n = atoms[0].atom.dim();
        for a in &atoms {
            check_len(n, a.atom.dim(), "belief dimension")?;
            if a.weight <= 0.0 || !a.weight.is_finite() {
                return Err(Error::invalid(format!("atom weight {} not positive", a.weight)));
            }
        }
        let total: f64 = atoms.iter().map(|a| a.weight).sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::invalid(format!("atom weights sum to {total}")));
        }
        Ok(Self { atoms })
    }

    /// Validates and checks Bayes plausibility against `prior`.
    pub fn plausible(atoms: Vec<WeightedAtom>, prior: &Prior) -> Result<Self> {
        let d = Self::new(atoms)?;
        d.check_plausible(prior)?;
        Ok(d)
    }

    pub fn from_pairs(pairs: Vec<(f64, Vec<f64>)>) -> Result<Self> {
        let atoms = pairs
            .into_iter()
            .map(|(weight, b)| {
                Ok(WeightedAtom {
                    weight,
                    atom: BeliefAtom::exact(b)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(atoms)
    }

    pub fn point(atom: BeliefAtom) -> Self {
        Self {
            atoms: vec![WeightedAtom { weight: 1.0, atom }],
        }
    }

    /// Skips validation; used for LP outputs whose weights were renormalized.
    pub(crate) fn raw(atoms: Vec<WeightedAtom>) -> Self {
        Self { atoms }
    }

    pub fn atoms(&self) -> &[WeightedAtom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.atoms[0].atom.dim()
    }

    pub fn mean(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.dim()];
        for a in &self.atoms {
            for (x, b) in m.iter_mut().zip(&a.atom.belief) {
                *x += a.weight * b;
            }
        }
        m
    }

    pub fn check_plausible(&self, prior: &Prior) -> Result<()> {
        check_len(prior.len(), self.dim(), "belief dimension vs prior")?;
        let deviation = max_abs_diff(&self.mean(), prior.probs());
        if deviation > PLAUSIBILITY_TOL {
            return Err(Error::NotBayesPlausible { deviation });
        }
        Ok(())
    }

    /// Merges atoms with equal beliefs and sides by summing their weights.
    pub fn merged(&self) -> Self {
        let mut out: Vec<WeightedAtom> = Vec::with_capacity(self.atoms.len());
        for a in &self.atoms {
            match out
                .iter_mut()
                .find(|o| o.atom.side == a.atom.side && max_abs_diff(&o.atom.belief, &a.atom.belief) <= MERGE_TOL)
            {
                Some(o) => o.weight += a.weight,
                None => out.push(a.clone()),
            }
        }
        Self { atoms: out }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IPProfile {
    pub values: Vec<f64>,
}

impl IPProfile {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("profile has non-finite entries"));
        }
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl From<Vec<f64>> for IPProfile {
    fn from(values: Vec<f64>) -> Self {
        Self { values }
    }
}

/// The hyperplane `{μ : normalᵀμ = offset}` in belief space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hyperplane {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Hyperplane {
    pub fn contains(&self, belief: &[f64]) -> bool {
        let scale = self.normal.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        (dot(&self.normal, belief) - self.offset).abs() <= BREAKPOINT_TOL * scale
    }
}

/// Which one-sided limit wins when the score sits exactly on a breakpoint.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Closed {
    /// Intervals are `[b_k, b_{k+1})`: the exact value is the upper one.
    #[default]
    Left,
    Right,
}

/// Piecewise-constant payoff of the linear score `aᵀμ`.
///
/// `values[k]` holds the per-type payoff on the k-th interval cut out by the
/// increasing thresholds `cuts`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawStepPayoff")]
pub struct StepPayoff {
    score: Vec<f64>,
    cuts: Vec<f64>,
    values: Vec<Vec<f64>>,
    closed: Closed,
}

#[derive(Deserialize)]
struct RawStepPayoff {
    score: Vec<f64>,
    cuts: Vec<f64>,
    values: Vec<Vec<f64>>,
    #[serde(default)]
    closed: Closed,
}

impl TryFrom<RawStepPayoff> for StepPayoff {
    type Error = Error;
    fn try_from(raw: RawStepPayoff) -> Result<Self> {
        Self::new(raw.score, raw.cuts, raw.values, raw.closed)
    }
}

impl StepPayoff {
    pub fn new(score: Vec<f64>, cuts: Vec<f64>, values: Vec<Vec<f64>>, closed: Closed) -> Result<Self> {
        let n = score.len();
        if n == 0 {
            return Err(Error::invalid("step payoff needs a non-empty score vector"));
        }
        check_len(cuts.len() + 1, values.len(), "step payoff intervals")?;
        if cuts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("breakpoints must be strictly increasing"));
        }
        for row in &values {
            check_len(n, row.len(), "step payoff values per type")?;
        }
        if score
            .iter()
            .chain(&cuts)
            .chain(values.iter().flatten())
            .any(|v| !v.is_finite())
        {
            return Err(Error::invalid("step payoff has non-finite entries"));
        }
        Ok(Self {
            score,
            cuts,
            values,
            closed,
        })
    }

    /// A payoff that does not depend on the belief.
    pub fn constant(values: Vec<f64>) -> Self {
        let n = values.len();
        let mut score = vec![0.0; n];
        score[0] = 1.0;
        Self {
            score,
            cuts: vec![],
            values: vec![values],
            closed: Closed::Left,
        }
    }

    pub fn num_types(&self) -> usize {
        self.score.len()
    }

    pub fn score(&self) -> &[f64] {
        &self.score
    }

    pub fn cuts(&self) -> &[f64] {
        &self.cuts
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn closed(&self) -> Closed {
        self.closed
    }

    pub fn interval_index(&self, belief: &[f64], side: Side) -> usize {
        let s = dot(&self.score, belief);
        if let Some(k) = self.cuts.iter().position(|b| (s - b).abs() <= BREAKPOINT_TOL) {
            return match (side, self.closed) {
                (Side::Lower, _) | (Side::Exact, Closed::Right) => k,
                (Side::Upper, _) | (Side::Exact, Closed::Left) => k + 1,
            };
        }
        self.cuts.iter().filter(|&&b| b < s).count()
    }

    pub fn eval(&self, atom: &BeliefAtom) -> &[f64] {
        &self.values[self.interval_index(&atom.belief, atom.side)]
    }

    pub fn hyperplanes(&self) -> Vec<Hyperplane> {
        self.cuts
            .iter()
            .map(|&b| Hyperplane {
                normal: self.score.clone(),
                offset: b,
            })
            .collect()
    }
}

/// A payoff function `w(μ, θ)` that can be evaluated at belief atoms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PayoffSpec {
    Tabulated(StepPayoff),
    /// Expected reputation `w(μ, θ) = μᵀρ` for every type.
    LinearReputation(Vec<f64>),
    /// Sender payoff at the receiver's selected best response.
    PersuasionDerived(ReceiverGame),
    /// Data-belief payoff of a cohort problem, profiles indexed by cohort.
    CohortDerived(Box<CohortProblem>),
}

impl PayoffSpec {
    /// Dimension of the belief simplex the payoff is defined on.
    pub fn belief_dim(&self) -> usize {
        match self {
            PayoffSpec::Tabulated(s) => s.num_types(),
            PayoffSpec::LinearReputation(rho) => rho.len(),
            PayoffSpec::PersuasionDerived(g) => g.num_types(),
            PayoffSpec::CohortDerived(p) => p.num_data(),
        }
    }

    /// Length of the interim profiles this payoff produces.
    pub fn profile_dim(&self) -> usize {
        match self {
            PayoffSpec::CohortDerived(p) => p.num_cohorts(),
            other => other.belief_dim(),
        }
    }

    /// Raw payoff vector `(w(μ, θ))_θ`.
    pub fn value(&self, atom: &BeliefAtom) -> Result<Vec<f64>> {
        check_len(self.belief_dim(), atom.dim(), "belief dimension vs payoff")?;
        match self {
            PayoffSpec::Tabulated(s) => Ok(s.eval(atom).to_vec()),
            PayoffSpec::LinearReputation(rho) => {
                let r = dot(&atom.belief, rho);
                Ok(vec![r; rho.len()])
            }
            PayoffSpec::PersuasionDerived(g) => {
                let a = g.select_action(atom);
                Ok(g.v()[a].clone())
            }
            PayoffSpec::CohortDerived(_) => Err(Error::Evaluation(
                "cohort payoffs are evaluated through the data-adjusted form".into(),
            )),
        }
    }

    /// Belief hyperplanes where one-sided values may differ.
    pub fn hyperplanes(&self) -> Vec<Hyperplane> {
        match self {
            PayoffSpec::Tabulated(s) => s.hyperplanes(),
            PayoffSpec::LinearReputation(_) => vec![],
            PayoffSpec::PersuasionDerived(g) => g.indifference_hyperplanes(),
            PayoffSpec::CohortDerived(p) => p.data_hyperplanes(),
        }
    }

    /// Identifies a region on which the adjusted payoff is affine in the
    /// belief. `None` means no such structure is known.
    pub(crate) fn piece_key(&self, atom: &BeliefAtom) -> Option<Vec<usize>> {
        match self {
            PayoffSpec::Tabulated(s) => Some(vec![s.interval_index(&atom.belief, atom.side)]),
            PayoffSpec::LinearReputation(_) => None,
            PayoffSpec::PersuasionDerived(g) => Some(vec![g.select_action(atom)]),
            PayoffSpec::CohortDerived(p) => p.piece_key(atom),
        }
    }

    pub fn is_linear(&self) -> bool {
        matches!(self, PayoffSpec::LinearReputation(_))
    }
}

fn signal_posterior(prior: &Prior, pi: &InformationStructure, s: usize) -> Result<(f64, Vec<f64>)> {
    check_len(prior.len(), pi.num_types(), "information structure rows vs prior")?;
    if s >= pi.num_signals() {
        return Err(Error::invalid(format!("signal index {s} out of range")));
    }
    let joint: Vec<f64> = prior
        .probs()
        .iter()
        .enumerate()
        .map(|(t, p)| p * pi.prob(t, s))
        .collect();
    let total: f64 = joint.iter().sum();
    Ok((total, joint.into_iter().map(|j| j / total).collect()))
}

/// Bayes posterior after signal `s`.
pub fn posterior(prior: &Prior, pi: &InformationStructure, s: usize) -> Result<BeliefAtom> {
    let (prob, belief) = signal_posterior(prior, pi, s)?;
    if prob <= MIN_SIGNAL_PROB {
        return Err(Error::ZeroProbabilitySignal { signal: s, prob });
    }
    Ok(BeliefAtom::raw(belief, Side::Exact))
}

/// Distribution of posteriors induced by `pi`, with equal posteriors merged.
pub fn posterior_distribution(prior: &Prior, pi: &InformationStructure) -> Result<BeliefDistribution> {
    let mut atoms = Vec::new();
    for s in 0..pi.num_signals() {
        let (prob, belief) = signal_posterior(prior, pi, s)?;
        if prob > MIN_SIGNAL_PROB {
            atoms.push(WeightedAtom {
                weight: prob,
                atom: BeliefAtom::raw(belief, Side::Exact),
            });
        }
    }
    Ok(BeliefDistribution::raw(atoms).merged())
}

/// Interim profile `(Σ_s π(s|θ) w(μ_s, θ))_θ`.
pub fn interim_profile(w: &PayoffSpec, prior: &Prior, pi: &InformationStructure) -> Result<IPProfile> {
    if let PayoffSpec::CohortDerived(p) = w {
        return p.cohort_interim_profile(pi);
    }
    check_len(w.belief_dim(), prior.len(), "payoff dimension vs prior")?;
    let mut out = vec![0.0; prior.len()];
    for s in 0..pi.num_signals() {
        let (prob, belief) = signal_posterior(prior, pi, s)?;
        if prob <= MIN_SIGNAL_PROB {
            continue;
        }
        let v = w.value(&BeliefAtom::raw(belief, Side::Exact))?;
        for (t, o) in out.iter_mut().enumerate() {
            *o += pi.prob(t, s) * v[t];
        }
    }
    IPProfile::new(out).map_err(|e| Error::Evaluation(e.to_string()))
}

/// Likelihood-ratio adjusted payoff `ŵ(μ, θ) = μ(θ)/μ0(θ) · w(μ, θ)`.
pub fn adjusted_payoff(w: &PayoffSpec, prior: &Prior, atom: &BeliefAtom) -> Result<Vec<f64>> {
    if let PayoffSpec::CohortDerived(p) = w {
        check_len(p.num_data(), prior.len(), "data prior dimension")?;
        return p.adjusted_cohort_payoff(atom);
    }
    check_len(prior.len(), atom.dim(), "belief dimension vs prior")?;
    let v = w.value(atom)?;
    Ok(atom
        .belief
        .iter()
        .zip(prior.probs())
        .zip(&v)
        .map(|((m, p), x)| if *m > 0.0 { m / p * x } else { 0.0 })
        .collect())
}

/// Profile `E_τ[ŵ(μ, ·)]` of a Bayes-plausible distribution.
pub fn unconditional_profile(w: &PayoffSpec, prior: &Prior, tau: &BeliefDistribution) -> Result<IPProfile> {
    tau.check_plausible(prior)?;
    let mut out = vec![0.0; w.profile_dim()];
    for a in tau.atoms() {
        let v = adjusted_payoff(w, prior, &a.atom)?;
        for (o, x) in out.iter_mut().zip(&v) {
            *o += a.weight * x;
        }
    }
    IPProfile::new(out).map_err(|e| Error::Evaluation(e.to_string()))
}

/// One signal per atom with `π(s_m|θ) = τ_m μ_m(θ)/μ0(θ)`.
pub fn structure_from_tau(prior: &Prior, tau: &BeliefDistribution) -> Result<InformationStructure> {
    tau.check_plausible(prior)?;
    let n = prior.len();
    let mut rows = vec![vec![0.0; tau.len()]; n];
    for (m, a) in tau.atoms().iter().enumerate() {
        for t in 0..n {
            rows[t][m] = a.weight * a.atom.belief[t] / prior.probs()[t];
        }
    }
    // Absorb the plausibility slack so rows are exactly stochastic.
    for row in &mut rows {
        let s: f64 = row.iter().sum();
        row.iter_mut().for_each(|x| *x /= s);
    }
    InformationStructure::new(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use approx::assert_abs_diff_eq;

    fn three_signal() -> InformationStructure {
        InformationStructure::new(vec![vec![0.2, 0.4, 0.4], vec![0.0, 0.2, 0.8]]).unwrap()
    }

    fn cautious() -> InformationStructure {
        InformationStructure::new(vec![vec![1.0 / 3.0, 2.0 / 3.0], vec![2.0 / 3.0, 1.0 / 3.0]]).unwrap()
    }

    #[test]
    fn prior_validation() {
        assert!(Prior::new(vec![0.5, 0.5]).is_ok());
        assert!(Prior::new(vec![1.0, 0.0]).is_err());
        assert!(Prior::new(vec![0.6, 0.6]).is_err());
        assert!(serde_json::from_str::<Prior>("[0.7, -0.3, 0.6]").is_err());
    }

    #[test]
    fn posteriors_of_worked_structures() {
        let prior = Prior::uniform(2);
        let full = InformationStructure::full_disclosure(2);
        assert_eq!(posterior(&prior, &full, 0).unwrap().belief, vec![1.0, 0.0]);
        let b = posterior(&prior, &cautious(), 0).unwrap().belief;
        assert_abs_diff_eq!(b[1], 2.0 / 3.0, epsilon = 1e-15);
        let b = posterior(&prior, &three_signal(), 2).unwrap().belief;
        assert_abs_diff_eq!(b[1], 2.0 / 3.0, epsilon = 1e-15);
        let err = posterior(
            &Prior::uniform(2),
            &InformationStructure::new(vec![vec![1.0, 0.0], vec![1.0, 0.0]]).unwrap(),
            1,
        );
        assert!(matches!(err, Err(Error::ZeroProbabilitySignal { .. })));
    }

    #[test]
    fn posterior_distribution_three_signal() {
        let tau = posterior_distribution(&Prior::uniform(2), &three_signal()).unwrap();
        let expected = [
            (0.1, [1.0, 0.0]),
            (0.3, [2.0 / 3.0, 1.0 / 3.0]),
            (0.6, [1.0 / 3.0, 2.0 / 3.0]),
        ];
        assert_eq!(tau.len(), 3);
        for (a, (w, b)) in tau.atoms().iter().zip(expected) {
            assert_abs_diff_eq!(a.weight, w, epsilon = 1e-12);
            assert_abs_diff_eq!(a.atom.belief[0], b[0], epsilon = 1e-12);
        }
        let single = posterior_distribution(&Prior::uniform(2), &InformationStructure::uninformative(2)).unwrap();
        assert_eq!(single.len(), 1);
    }

    #[test]
    fn example_profiles() {
        let w = presets::example1_payoff();
        let prior = Prior::uniform(2);
        let p = interim_profile(&w, &prior, &three_signal()).unwrap().values;
        assert_abs_diff_eq!(p[0], 0.6, epsilon = 1e-12);
        assert_abs_diff_eq!(p[1], 0.9, epsilon = 1e-12);
        let p = interim_profile(&w, &prior, &cautious()).unwrap().values;
        assert_abs_diff_eq!(p[0], 2.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p[1], 5.0 / 6.0, epsilon = 1e-12);
        let p = interim_profile(&w, &prior, &InformationStructure::uninformative(2))
            .unwrap()
            .values;
        assert_eq!(p, vec![0.5, 0.5]);
    }

    #[test]
    fn adjusted_example_values() {
        let w = presets::example1_payoff();
        let prior = Prior::uniform(2);
        let a = adjusted_payoff(&w, &prior, &BeliefAtom::exact(vec![0.3, 0.7]).unwrap()).unwrap();
        assert_abs_diff_eq!(a[0], 0.6, epsilon = 1e-12);
        assert_abs_diff_eq!(a[1], 1.4, epsilon = 1e-12);
        let a = adjusted_payoff(&w, &prior, &BeliefAtom::exact(vec![0.5, 0.5]).unwrap()).unwrap();
        assert_eq!(a, vec![0.5, 0.5]);
        let a = adjusted_payoff(&w, &prior, &BeliefAtom::exact(vec![0.0, 1.0]).unwrap()).unwrap();
        assert_eq!(a[0], 0.0);
    }

    #[test]
    fn one_sided_breakpoint_values() {
        let w = presets::example1_payoff();
        let at = |side| {
            w.value(&BeliefAtom::new(vec![2.0 / 3.0, 1.0 / 3.0], side).unwrap())
                .unwrap()[0]
        };
        assert_eq!(at(Side::Lower), 0.0);
        assert_eq!(at(Side::Upper), 0.5);
        assert_eq!(at(Side::Exact), 0.5);
    }

    #[test]
    fn unconditional_profiles() {
        let w = presets::example1_payoff();
        let prior = Prior::uniform(2);
        let full = BeliefDistribution::from_pairs(vec![(0.5, vec![1.0, 0.0]), (0.5, vec![0.0, 1.0])]).unwrap();
        assert_eq!(unconditional_profile(&w, &prior, &full).unwrap().values, vec![0.0, 1.0]);
        let bad = BeliefDistribution::from_pairs(vec![(1.0, vec![1.0, 0.0])]).unwrap();
        assert!(matches!(
            unconditional_profile(&w, &prior, &bad),
            Err(Error::NotBayesPlausible { .. })
        ));
    }

    #[test]
    fn structure_from_three_atoms() {
        let prior = Prior::uniform(2);
        let tau = BeliefDistribution::from_pairs(vec![
            (0.1, vec![1.0, 0.0]),
            (0.3, vec![2.0 / 3.0, 1.0 / 3.0]),
            (0.6, vec![1.0 / 3.0, 2.0 / 3.0]),
        ])
        .unwrap();
        let pi = structure_from_tau(&prior, &tau).unwrap();
        let expected = three_signal();
        for t in 0..2 {
            for s in 0..3 {
                assert_abs_diff_eq!(pi.prob(t, s), expected.prob(t, s), epsilon = 1e-12);
            }
        }
        let point = BeliefDistribution::from_pairs(vec![(1.0, vec![0.5, 0.5])]).unwrap();
        assert_eq!(
            structure_from_tau(&prior, &point).unwrap().likelihoods(),
            &[vec![1.0], vec![1.0]]
        );
    }
}
