use ipset_core::cohort::{blackwell_inclusion_with, cohort_set, garble, CohortProblem, CohortSpec, GarblingMatrix};
use ipset_core::ipset::approximate_set_with;
use ipset_core::model::{Closed, StepPayoff};
use ipset_core::persuasion::{cautious_value, game_grid, reduce_to_actions, sender_profile, v_set_support};
use ipset_core::reputation::{cp_check, random_distribution, second_moment};
use ipset_core::{
    approximate_set, posterior_distribution, presets, support_value, BeliefGrid, Direction, Execution, GridOptions,
    IPSetApprox, InformationStructure, PayoffSpec, Prior,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn normalize(raw: Vec<f64>) -> Vec<f64> {
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / s).collect()
}

fn stochastic(rows: usize, cols: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(0.01f64..1.0, cols), rows)
        .prop_map(|r| r.into_iter().map(normalize).collect())
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// Cohorts coincide with states; data is a noisy report of the state.
fn cohort_problem() -> impl Strategy<Value = CohortProblem> {
    (2usize..=3, 2usize..=3).prop_flat_map(|(n, nd)| {
        (
            prop::collection::vec(0.2f64..1.0, n),
            stochastic(n, nd),
            prop::collection::vec(0.0f64..1.0, n),
            0.2f64..0.8,
            stochastic(2, n),
        )
            .prop_map(move |(prior, channel, score, cut, values)| {
                let prior = normalize(prior);
                let joint = (0..n)
                    .map(|c| {
                        (0..n)
                            .map(|o| {
                                if o == c {
                                    channel[o].iter().map(|x| prior[o] * x).collect()
                                } else {
                                    vec![0.0; nd]
                                }
                            })
                            .collect()
                    })
                    .collect();
                let payoff = PayoffSpec::Tabulated(StepPayoff::new(score, vec![cut], values, Closed::Left).unwrap());
                CohortProblem::new(CohortSpec {
                    cohorts: names("c", n),
                    states: names("s", n),
                    data: names("d", nd),
                    joint,
                    payoffs: vec![payoff],
                })
                .unwrap()
            })
    })
}

fn coarse() -> Option<GridOptions> {
    Some(GridOptions { lattice: 40, edge: 0 })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cohort_accounting_identity(p in cohort_problem(), rows in stochastic(3, 3)) {
        let nd = p.num_data();
        let pi = InformationStructure::new(rows[..nd].iter().map(|r| normalize(r[..nd].to_vec())).collect()).unwrap();
        let direct = p.cohort_interim_profile(&pi).unwrap();
        let probs = pi.signal_probs(p.data_prior());
        let mut via = vec![0.0; p.num_cohorts()];
        for (s, &q) in probs.iter().enumerate() {
            if q <= 0.0 {
                continue;
            }
            let eta = p.data_posterior(&pi, s).unwrap();
            for (v, a) in via.iter_mut().zip(p.adjusted_cohort_payoff(&eta).unwrap()) {
                *v += q * a;
            }
        }
        for (a, b) in direct.values.iter().zip(&via) {
            prop_assert!((a - b).abs() < 1e-7, "{direct:?} vs {via:?}");
        }
    }

    #[test]
    fn garbling_shrinks_the_set(p in cohort_problem(), g in stochastic(3, 2)) {
        let nd = p.num_data();
        let g = GarblingMatrix::new(g[..nd].to_vec()).unwrap();
        let dirs = Direction::default_set(&Prior::uniform(p.num_cohorts()), 8, 3);
        let report = blackwell_inclusion_with(&p, &g, &dirs, coarse(), Execution::Parallel).unwrap();
        prop_assert!(report.holds(), "min slack {}", report.min_slack);
    }

    #[test]
    fn reduce_to_actions_keeps_profile(rows in stochastic(2, 6)) {
        let g = presets::example1_game();
        let prior = presets::example1_prior();
        let pi = InformationStructure::new(rows).unwrap();
        let before = sender_profile(&g, &prior, &pi).unwrap();
        let red = reduce_to_actions(&g, &prior, &pi).unwrap();
        prop_assert!(red.structure.num_signals() <= g.num_actions());
        let after = sender_profile(&g, &prior, &red.structure).unwrap();
        for (a, b) in before.values.iter().zip(&after.values) {
            prop_assert!((a - b).abs() < 1e-9);
        }
    }
}

#[test]
fn identity_cohort_nests_plain_set() {
    let p = presets::noisy_type(1.0);
    let w = presets::example1_payoff();
    let prior = presets::example1_prior();
    let dirs = Direction::circle(32);
    let plain = approximate_set(&w, &prior, &BeliefGrid::for_payoff(&w, &prior), &dirs).unwrap();
    let nested = cohort_set(&p, &p.default_grid(), &dirs).unwrap();
    for d in &dirs {
        let (a, b) = (plain.support_of(d).unwrap(), nested.support_of(d).unwrap());
        assert!((a - b).abs() < 1e-7, "{d:?}: {a} vs {b}");
    }
}

#[test]
fn garbling_to_noise_collapses() {
    let p = presets::noisy_type(0.9);
    let g = GarblingMatrix::new(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
    let q = garble(&p, &g).unwrap();
    let set = cohort_set(&q, &q.default_grid(), &Direction::circle(16)).unwrap();
    assert!(set.diameter() < 1e-9);
    for v in &set.inner_vertices {
        assert!((v.values[0] - 0.5).abs() < 1e-9 && (v.values[1] - 0.5).abs() < 1e-9);
    }
}

#[test]
fn envelope_consistency() {
    let g = presets::example1_game();
    let prior = presets::example1_prior();
    let w = presets::example1_payoff();
    let grid = game_grid(&g, &prior);
    let wgrid = BeliefGrid::for_payoff(&w, &prior);
    for d in Direction::circle(24)
        .into_iter()
        .filter(|d| d.lambda().iter().all(|x| *x >= -1e-12))
    {
        let v = v_set_support(&g, &prior, &grid, &d).unwrap().value;
        let s = support_value(&w, &prior, &wgrid, &d).unwrap().value;
        assert!((v - s).abs() < 1e-6, "{d:?}: {v} vs {s}");
    }
}

#[test]
fn cautious_profile_is_supported() {
    let g = presets::example1_game();
    let prior = presets::example1_prior();
    let grid = game_grid(&g, &prior);
    let sol = cautious_value(&g, &prior, &grid).unwrap();
    assert!(sol.profile.values.iter().all(|v| *v >= sol.value - 1e-9));
    assert!(sol.supporting.lambda().iter().all(|x| *x >= -1e-12));
    let h = v_set_support(&g, &prior, &grid, &sol.supporting).unwrap().value;
    let at: f64 = sol
        .supporting
        .lambda()
        .iter()
        .zip(&sol.profile.values)
        .map(|(l, v)| l * v)
        .sum();
    assert!((h - at).abs() < 1e-7);
}

#[test]
fn parallel_and_sequential_agree() {
    let w = presets::example1_payoff();
    let prior = presets::example1_prior();
    let grid = BeliefGrid::for_payoff(&w, &prior);
    let dirs = Direction::circle(64);
    let a = approximate_set_with(&w, &prior, &grid, &dirs, Execution::Sequential).unwrap();
    let b = approximate_set_with(&w, &prior, &grid, &dirs, Execution::Parallel).unwrap();
    assert_eq!(a, b);
}

#[test]
fn serde_round_trips() {
    let w = presets::example1_payoff();
    let back: PayoffSpec = serde_json::from_str(&serde_json::to_string(&w).unwrap()).unwrap();
    assert_eq!(w, back);

    let game = PayoffSpec::PersuasionDerived(presets::example1_game());
    let back: PayoffSpec = serde_json::from_str(&serde_json::to_string(&game).unwrap()).unwrap();
    assert_eq!(game, back);

    let p = presets::noisy_type(0.7);
    let back: CohortProblem = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
    assert_eq!(p, back);

    let prior = presets::example1_prior();
    let set = approximate_set(&w, &prior, &BeliefGrid::for_payoff(&w, &prior), &Direction::circle(8)).unwrap();
    let back: IPSetApprox = serde_json::from_str(&serde_json::to_string(&set).unwrap()).unwrap();
    assert_eq!(set, back);

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (prior, tau) = random_distribution(&mut rng, 3, 4);
    let verdict = cp_check(&second_moment(&tau), &prior).unwrap();
    let json = serde_json::to_string(&verdict).unwrap();
    assert_eq!(verdict, serde_json::from_str(&json).unwrap());

    let pi = InformationStructure::new(vec![vec![0.2, 0.8], vec![0.6, 0.4]]).unwrap();
    let tau = posterior_distribution(&presets::example1_prior(), &pi).unwrap();
    assert_eq!(
        tau,
        serde_json::from_str(&serde_json::to_string(&tau).unwrap()).unwrap()
    );
}

#[test]
fn invalid_cohort_json_is_rejected() {
    let mut spec = presets::noisy_type(0.7).spec().clone();
    spec.joint[0][0][0] += 0.3;
    let json = serde_json::to_string(&spec).unwrap();
    assert!(serde_json::from_str::<CohortProblem>(&json).is_err());
}
