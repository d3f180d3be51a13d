use spzf_core::metrics::{estimate_outage_two_user, estimate_secrecy_rate, OutagePolicy, SecrecyConfig};
use spzf_core::rng::trial_rng;
use spzf_core::spzf::{spzf_two_user, spzf_two_user_best_effort, verify_zero_forcing, ZF_TOL};
use spzf_core::{AlgoSettings, ChannelModelConfig, PartitionAlgo, SpzfOutcome};

#[test]
fn every_algorithm_yields_a_nulling_beamformer_when_solved() {
    for model in [ChannelModelConfig::rayleigh(1.0), ChannelModelConfig::geometric(10)] {
        for algo in PartitionAlgo::ALL {
            let mut solved = 0;
            for t in 0..200 {
                let mut rng = trial_rng(21, t);
                let h1 = model.sample(20, &mut rng).unwrap();
                let h2 = model.sample(20, &mut rng).unwrap();
                let part = algo.partition(&h1.magnitudes(), 4, &mut rng).unwrap();
                if let SpzfOutcome::Solved(sol) = spzf_two_user(&h1, &h2, &part).unwrap() {
                    solved += 1;
                    let r = verify_zero_forcing(&sol.w, &[h1.as_slice(), h2.as_slice()]).unwrap();
                    assert!(r.iter().all(|&x| x < ZF_TOL), "{algo}: {r:?}");
                    assert!(sol.w.iter().all(|z| (z.norm() - 1.0).abs() < 1e-12));
                }
            }
            assert!(solved > 0, "{algo} never solved");
        }
    }
}

#[test]
fn outage_estimates_are_seed_reproducible_and_paired() {
    let model = ChannelModelConfig::default();
    let s = AlgoSettings::default();
    let a = estimate_outage_two_user(15, 3, PartitionAlgo::Iterative, &s, &model, 2_000, 4).unwrap();
    let b = estimate_outage_two_user(15, 3, PartitionAlgo::Iterative, &s, &model, 2_000, 4).unwrap();
    assert_eq!(a, b);
    let genetic = estimate_outage_two_user(15, 3, PartitionAlgo::Genetic, &s, &model, 2_000, 4).unwrap();
    let random = estimate_outage_two_user(15, 3, PartitionAlgo::RandomFree, &s, &model, 2_000, 4).unwrap();
    assert!(genetic.e1 <= random.e1);
}

#[test]
fn best_effort_noise_leaks_only_on_outage() {
    let model = ChannelModelConfig::default();
    let mut leaks = 0;
    for t in 0..300 {
        let mut rng = trial_rng(8, t);
        let h1 = model.sample(12, &mut rng).unwrap();
        let h2 = model.sample(12, &mut rng).unwrap();
        let part = PartitionAlgo::Random.partition(&h1.magnitudes(), 4, &mut rng).unwrap();
        let (sol, report) = spzf_two_user_best_effort(&h1, &h2, &part).unwrap();
        if report.is_some() {
            leaks += usize::from(sol.max_residual() > ZF_TOL);
        } else {
            assert!(sol.max_residual() < ZF_TOL);
        }
    }
    assert!(leaks > 0);
}

#[test]
fn leaked_noise_lowers_the_rate_at_high_snr() {
    let model = ChannelModelConfig::default();
    let s = AlgoSettings::default();
    let run = |policy| {
        let mut cfg = SecrecyConfig::new(40.0, 12, 3);
        cfg.policy = policy;
        estimate_secrecy_rate(&cfg, PartitionAlgo::Random, 4, &s, &model, 400, 3).unwrap()
    };
    let leaky = run(OutagePolicy::LeakyArtificialNoise);
    let silent = run(OutagePolicy::NoArtificialNoise);
    assert_eq!(leaky.outages, silent.outages);
    assert!(leaky.outages > 0);
    assert!(leaky.min_rate.mean < silent.min_rate.mean);
}
