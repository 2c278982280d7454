use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use thermal_qkd::gaussian::bosonic_entropy;
use thermal_qkd::protocol::closed_form_submatrices;
use thermal_qkd::{Party, ProtocolConfig, ProtocolState};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn circuit_matches_closed_form(n_bar in 0.0f64..=300.0, t2 in 0.0f64..=1.0) {
        let cfg = ProtocolConfig::new(n_bar, t2).unwrap();
        let state = ProtocolState::build(&cfg).unwrap();
        let diff = state.submatrices().max_abs_diff(&closed_form_submatrices(&cfg));
        prop_assert!(diff < 1e-9, "max entry diff {diff}");
    }

    #[test]
    fn global_entropy_is_source_entropy(n_bar in 0.0f64..=300.0, t2 in 0.0f64..=1.0) {
        let cfg = ProtocolConfig::new(n_bar, t2).unwrap();
        let state = ProtocolState::build(&cfg).unwrap();
        let spectrum = state.covariance().symplectic_spectrum();
        prop_assert!((spectrum.values()[0] - cfg.variance()).abs() < 1e-9 * cfg.variance());
        for &l in &spectrum.values()[1..] {
            prop_assert!((l - 1.0).abs() < 1e-9);
        }
        let s = state.covariance().von_neumann_entropy();
        prop_assert!((s - bosonic_entropy(n_bar)).abs() < 1e-9);
    }

    #[test]
    fn exchanging_tau_and_mu_swaps_bob_and_eve(n_bar in 0.0f64..=300.0, t2 in 0.0f64..=1.0) {
        let cfg = ProtocolConfig::new(n_bar, t2).unwrap();
        let orig = ProtocolState::build(&cfg).unwrap();
        let swapped = ProtocolState::build(&cfg.swapped_eve()).unwrap();
        let scale = cfg.variance();
        let bob = swapped.party_block(Party::Bob).matrix() - orig.party_block(Party::Eve).matrix();
        let eve = swapped.party_block(Party::Eve).matrix() - orig.party_block(Party::Bob).matrix();
        prop_assert!(bob.amax() < 1e-12 * scale);
        prop_assert!(eve.amax() < 1e-12 * scale);
        let alice = swapped.party_block(Party::Alice).matrix() - orig.party_block(Party::Alice).matrix();
        prop_assert!(alice.amax() == 0.0);
        let i_ab = swapped.mutual_information(Party::Alice, Party::Bob).unwrap();
        let i_ae = orig.mutual_information(Party::Alice, Party::Eve).unwrap();
        prop_assert!((i_ab - i_ae).abs() < 1e-9);
    }

    #[test]
    fn information_summary_invariants(n_bar in 0.0f64..=300.0, t2 in 0.0f64..=1.0) {
        let cfg = ProtocolConfig::new(n_bar, t2).unwrap();
        let info = ProtocolState::build(&cfg).unwrap().information().unwrap();
        for v in [info.i_ab, info.i_ae, info.i_be, info.i_ab_given_e] {
            prop_assert!(v >= 0.0);
        }
        prop_assert!(info.i_ab <= info.h_a.min(info.h_b) + 1e-9);
        prop_assert_eq!(info.lower_bound, info.k_dr.max(info.k_rr));
        prop_assert_eq!(info.upper_bound, info.i_ab.min(info.i_ab_given_e));
    }
}

#[test]
fn no_eve_leaves_eve_uncorrelated() {
    let cfg = ProtocolConfig::new(200.0, 1.0).unwrap();
    let state = ProtocolState::build(&cfg).unwrap();
    assert_eq!(state.mutual_information(Party::Alice, Party::Eve).unwrap(), 0.0);
    assert_eq!(state.mutual_information(Party::Bob, Party::Eve).unwrap(), 0.0);
}

#[test]
fn bob_holds_vacuum_when_eve_takes_everything() {
    let cfg = ProtocolConfig::new(200.0, 0.0).unwrap();
    let state = ProtocolState::build(&cfg).unwrap();
    assert_eq!(state.mutual_information(Party::Alice, Party::Bob).unwrap(), 0.0);
    assert_eq!(state.mutual_information(Party::Bob, Party::Eve).unwrap(), 0.0);
}

fn i_be(t2: f64) -> f64 {
    ProtocolState::build(&ProtocolConfig::new(200.0, t2).unwrap())
        .unwrap()
        .mutual_information(Party::Bob, Party::Eve)
        .unwrap()
}

#[test]
fn bob_eve_information_is_continuous_and_vanishes_at_full_transmission() {
    assert_eq!(i_be(1.0), 0.0);
    // interior: halving the grid step roughly halves the largest step
    let max_jump = |n: usize| {
        (0..n)
            .map(|k| {
                let t = 0.01 + 0.98 * k as f64 / n as f64;
                (i_be(t + 0.98 / n as f64) - i_be(t)).abs()
            })
            .fold(0.0, f64::max)
    };
    let (coarse, fine) = (max_jump(500), max_jump(1000));
    assert!(fine < 0.6 * coarse, "{coarse} -> {fine}");
    // endpoint: approaches zero along 1 - 10^-k
    let tail: Vec<f64> = (2..=12).map(|k| i_be(1.0 - 10f64.powi(-k))).collect();
    assert!(tail.windows(2).all(|w| w[1] < w[0]), "{tail:?}");
    assert!(tail[tail.len() - 1] < 1e-8, "{tail:?}");
}

#[test]
fn direct_reconciliation_rate_crosses_zero_at_balanced_tap() {
    let k_dr = |t2: f64| {
        ProtocolState::build(&ProtocolConfig::new(200.0, t2).unwrap())
            .unwrap()
            .information()
            .unwrap()
            .k_dr
    };
    assert!(k_dr(0.4) < 0.0);
    assert!(k_dr(0.6) > 0.0);
    assert_abs_diff_eq!(k_dr(0.5), 0.0, epsilon = 1e-9);
}

#[test]
fn reverse_reconciliation_rate_positive_whenever_bob_receives_light() {
    for k in 1..=20 {
        let t2 = k as f64 * 0.05;
        let info = ProtocolState::build(&ProtocolConfig::new(200.0, t2).unwrap())
            .unwrap()
            .information()
            .unwrap();
        assert!(info.k_rr > 0.0, "K_RR = {} at t2 = {t2}", info.k_rr);
    }
}
