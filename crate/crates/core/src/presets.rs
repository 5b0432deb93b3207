//! Ready-made instances used by tests, benches and the CLI fixtures.

use crate::cohort::CohortProblem;
use crate::model::{Closed, PayoffSpec, Prior, StepPayoff};
use crate::persuasion::ReceiverGame;

/// Two types; payoff `0`, `0.5`, `1` on `μ(θ2)` in `[0, 1/3)`, `[1/3, 2/3)`,
/// `[2/3, 1]`, identical for both types.
pub fn example1_payoff() -> PayoffSpec {
    PayoffSpec::Tabulated(
        StepPayoff::new(
            vec![0.0, 1.0],
            vec![1.0 / 3.0, 2.0 / 3.0],
            vec![vec![0.0, 0.0], vec![0.5, 0.5], vec![1.0, 1.0]],
            Closed::Left,
        )
        .expect("valid step payoff"),
    )
}

/// Receiver game whose sender-preferred best response reproduces
/// [`example1_payoff`].
pub fn example1_game() -> ReceiverGame {
    ReceiverGame::new(
        vec!["a0".into(), "a1".into(), "a2".into()],
        vec![vec![0.0, 0.0], vec![-1.0, 2.0], vec![-3.0, 3.0]],
        vec![vec![0.0, 0.0], vec![0.5, 0.5], vec![1.0, 1.0]],
    )
    .expect("valid receiver game")
}

pub fn example1_persuasion() -> PayoffSpec {
    PayoffSpec::PersuasionDerived(example1_game())
}

pub fn example1_prior() -> Prior {
    Prior::uniform(2)
}

/// Example 1 with data that reveals the type with precision `sigma`.
pub fn noisy_type(sigma: f64) -> CohortProblem {
    CohortProblem::noisy_type(&example1_prior(), sigma, example1_payoff()).expect("precision in [0, 1]")
}

pub fn linear2() -> (PayoffSpec, Prior) {
    (PayoffSpec::LinearReputation(vec![0.0, 1.0]), Prior::uniform(2))
}

pub fn linear3() -> (PayoffSpec, Prior) {
    (PayoffSpec::LinearReputation(vec![0.0, 0.5, 1.0]), Prior::uniform(3))
}
