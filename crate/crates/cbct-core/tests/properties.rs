//! Property tests for the model invariants.

use cbct_core::linkmodel::{
    cb_pattern_montecarlo, ct_gain_analytic, ct_success_prob, hyp2f1, snr_direct, uniform_phi_grid,
    ChannelParams,
};
use cbct_core::netgraph::{build_edges, generate_random, node_lifetime, GainMode};
use proptest::prelude::*;

fn params() -> ChannelParams {
    ChannelParams::from_db(10.0, -70.0, 4.0, 0.125, 100, 10.0).unwrap()
}

proptest! {
    #[test]
    fn snr_monotone_in_distance_linear_in_fade(
        d1 in 0.5f64..500.0,
        scale in 1.01f64..10.0,
        fade in 0.0f64..4.0,
    ) {
        let p = params();
        let near = snr_direct(&p, d1, 1.0).unwrap();
        let far = snr_direct(&p, d1 * scale, 1.0).unwrap();
        prop_assert!(far < near);
        let faded = snr_direct(&p, d1, fade).unwrap();
        prop_assert!((faded - near * fade).abs() <= 1e-12 * near.max(1.0) * fade.max(1.0));
    }

    #[test]
    fn packet_success_bounded_and_monotone(r1 in 0.0f64..300.0, dr in 0.0f64..100.0) {
        let p = params();
        let floor = 0.5f64.powi(p.packet_len() as i32);
        let a = ct_success_prob(&p, r1);
        let b = ct_success_prob(&p, r1 + dr);
        prop_assert!((floor..=1.0).contains(&a));
        prop_assert!(b <= a + 1e-15);
        // longer packets fail more
        let longer = ChannelParams::from_db(10.0, -70.0, 4.0, 0.125, 150, 10.0).unwrap();
        prop_assert!(ct_success_prob(&longer, r1) <= a + 1e-15);
    }

    #[test]
    fn ct_gain_within_count_and_monotone_in_count(n in 2u64..40, radius in 0.1f64..120.0) {
        let p = params();
        let g = ct_gain_analytic(&p, n, radius).unwrap();
        prop_assert!(g >= 1.0 - 1e-12);
        prop_assert!(g <= n as f64 + 1e-9);
        let g_more = ct_gain_analytic(&p, n + 1, radius).unwrap();
        prop_assert!(g_more >= g - 1e-12);
    }

    #[test]
    fn hyp_terminating_matches_naive_when_benign(
        a in 0.0f64..0.5,
        c in 0.1f64..0.5,
        z in 0.0f64..0.01,
        l in 0u32..60,
    ) {
        // naive from-scratch Pochhammer products, f64; safe because the
        // terms cannot cancel at these magnitudes
        let mut naive = 0.0;
        for n in 0..=l as i64 {
            let mut term = 1.0f64;
            for j in 0..n {
                term *= (a + j as f64) * (-(l as f64) + j as f64)
                    / ((c + j as f64) * (j as f64 + 1.0));
                term *= z;
            }
            naive += term;
        }
        let got = hyp2f1(a, -(l as f64), c, z).unwrap();
        prop_assert!((got - naive).abs() <= 1e-12 * naive.abs().max(1e-30));
    }

    #[test]
    fn directivity_at_least_one(seed in 0u64..200, n in 1u64..60) {
        let grid = uniform_phi_grid(128);
        let pat = cb_pattern_montecarlo(n, 10.0, 1.0, &grid, seed).unwrap();
        prop_assert!(pat.directivity >= 1.0 - 1e-12);
    }

    #[test]
    fn node_lifetime_scales_inversely(seed in 0u64..50, s in 0.1f64..10.0) {
        let p = params();
        let mut net = generate_random(70.0, 6, 1, seed);
        build_edges(&mut net, &p, GainMode::Ct);
        let q: Vec<f64> = (0..net.edges.len()).map(|i| 0.05 + (i % 7) as f64 * 0.1).collect();
        let t1 = node_lifetime(&net, &q).unwrap();
        let qs: Vec<f64> = q.iter().map(|v| v * s).collect();
        let t2 = node_lifetime(&net, &qs).unwrap();
        for (a, b) in t1.iter().zip(&t2) {
            if a.is_finite() {
                prop_assert!((a / b - s).abs() <= 1e-9 * s);
            } else {
                prop_assert!(b.is_infinite());
            }
        }
    }
}
