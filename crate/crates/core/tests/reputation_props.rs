use ipset_core::reputation::{
    bipool_optimize, cp_certificate, cp_check, majorization_check, markov_checks, profile_from_cp, random_distribution,
    second_moment, truth_drifting, Sense,
};
use ipset_core::{posterior_distribution, unconditional_profile, InformationStructure, PayoffSpec, Prior};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn normalize(raw: Vec<f64>) -> Vec<f64> {
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / s).collect()
}

fn structure(n: usize, s: usize) -> impl Strategy<Value = InformationStructure> {
    prop::collection::vec(prop::collection::vec(0.01f64..1.0, s), n)
        .prop_map(|rows| InformationStructure::new(rows.into_iter().map(normalize).collect()).unwrap())
}

fn sorted_rho(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, n).prop_map(|mut v| {
        v.sort_by(f64::total_cmp);
        v
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cp_round_trip(seed in any::<u64>(), n in 2usize..=4, atoms in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (prior, tau) = random_distribution(&mut rng, n, atoms);
        let cert = cp_certificate(&prior, &tau).unwrap();
        prop_assert!(cert.invariant_violation(&prior) < 1e-9);
        let c = second_moment(&tau);
        prop_assert!(cp_check(&c, &prior).unwrap().is_certified());
        let back = cert.distribution().unwrap();
        let again = second_moment(&back);
        for (r1, r2) in c.iter().zip(&again) {
            for (a, b) in r1.iter().zip(r2) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn cp_profile_matches_direct(seed in any::<u64>(), n in 2usize..=4, atoms in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (prior, tau) = random_distribution(&mut rng, n, atoms);
        let rho: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        let c = second_moment(&tau);
        let via_c = profile_from_cp(&c, &prior, &rho).unwrap();
        let direct = unconditional_profile(&PayoffSpec::LinearReputation(rho.clone()), &prior, &tau).unwrap();
        for (a, b) in via_c.values.iter().zip(&direct.values) {
            prop_assert!((a - b).abs() < 1e-9);
        }
        let report = markov_checks(&c, &prior, &rho).unwrap();
        prop_assert!(report.stationary_ok && report.stochastic_ok && report.detailed_balance_ok);
        prop_assert!(report.mean_reversion_gap <= report.gap_bound(&prior, &rho) * (1.0 + 1e-9) + 1e-12);
    }

    #[test]
    fn uniform_prior_majorization(pi in (2usize..=4).prop_flat_map(|n| structure(n, 3)), seed in any::<u64>()) {
        let n = pi.num_types();
        let prior = Prior::uniform(n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho: Vec<f64> = (0..n).map(|_| rand::Rng::gen_range(&mut rng, 0.0..1.0)).collect();
        let tau = posterior_distribution(&prior, &pi).unwrap();
        let c = second_moment(&tau);
        let report = markov_checks(&c, &prior, &rho).unwrap();
        // Uniform prior: P is doubly stochastic.
        for j in 0..n {
            let col: f64 = report.p.iter().map(|row| row[j]).sum();
            prop_assert!((col - 1.0).abs() < 1e-9);
        }
        let profile = unconditional_profile(&PayoffSpec::LinearReputation(rho.clone()), &prior, &tau).unwrap();
        prop_assert!(majorization_check(&rho, &profile, &prior).unwrap());
    }

    #[test]
    fn truth_drifting_holds(
        (pi, prior) in (2usize..=4).prop_flat_map(|n| (structure(n, 4), prop::collection::vec(0.1f64..1.0, n))),
        beta_raw in prop::collection::vec(0.0f64..1.0, 4),
    ) {
        let n = pi.num_types();
        let prior = Prior::new(normalize(prior)).unwrap();
        let mut beta = beta_raw[..n].to_vec();
        beta[0] = beta[0].max(0.05);
        let t = truth_drifting(&prior, &pi, &beta).unwrap();
        prop_assert!(t.holds);
        prop_assert!(t.lhs >= t.rhs - 1e-12);
    }

    #[test]
    fn bipool_within_extremes(
        (prior, rho) in (2usize..=4).prop_flat_map(|n| (prop::collection::vec(0.1f64..1.0, n), sorted_rho(n))),
        pick in any::<prop::sample::Index>(),
    ) {
        let n = rho.len();
        let prior = Prior::new(normalize(prior)).unwrap();
        let target = pick.index(n);
        let mean: f64 = prior.probs().iter().zip(&rho).map(|(p, r)| p * r).sum();
        let hi = bipool_optimize(&prior, &rho, target, Sense::Max).unwrap();
        let lo = bipool_optimize(&prior, &rho, target, Sense::Min).unwrap();
        // Full disclosure gives ρ_i, full pooling gives the mean.
        prop_assert!(hi.value >= rho[target].max(mean) - 1e-7);
        prop_assert!(lo.value <= rho[target].min(mean) + 1e-7);
        prop_assert!(hi.value <= rho[n - 1] + 1e-9);
        prop_assert!(lo.value >= rho[0] - 1e-9);
        // The reported value is what the policy delivers.
        let w = PayoffSpec::LinearReputation(rho.clone());
        for sol in [&hi, &lo] {
            let tau = sol.policy.distribution(&prior).unwrap();
            let prof = unconditional_profile(&w, &prior, &tau).unwrap();
            prop_assert!((prof.values[target] - sol.value).abs() < 1e-8);
        }
    }
}

#[test]
fn bipool_figure_five_values() {
    let (_, prior) = ipset_core::presets::linear3();
    let rho = [0.0, 0.5, 1.0];
    let hi = bipool_optimize(&prior, &rho, 0, Sense::Max).unwrap();
    assert!((hi.value - 0.528_595).abs() < 1e-5, "{}", hi.value);
    let lo = bipool_optimize(&prior, &rho, 1, Sense::Min).unwrap();
    assert!((lo.value - 0.25).abs() < 1e-6, "{}", lo.value);
}
