//! Sample distributions against the geometric law they should follow.

use rowswap::analytic::juggernaut;
use rowswap::montecarlo::{mc_attack_time, McMode};
use rowswap::{AttackPlan, DefenseConfig, DefenseKind, DramGeometry, TimingParams};
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Pearson statistic over bins 1..=bins-1 plus a tail bin; returns the
/// p-value.
fn chi_square_geometric(samples: &[u64], p: f64, bins: u64) -> f64 {
    let n = samples.len() as f64;
    let mut observed = vec![0f64; bins as usize];
    for &s in samples {
        observed[(s.min(bins) - 1) as usize] += 1.0;
    }
    let mut stat = 0.0;
    for b in 1..=bins {
        let prob = if b < bins { (1.0 - p).powi(b as i32 - 1) * p } else { (1.0 - p).powi(bins as i32 - 1) };
        let expected = n * prob;
        stat += (observed[b as usize - 1] - expected).powi(2) / expected;
    }
    1.0 - ChiSquared::new((bins - 1) as f64).unwrap().cdf(stat)
}

#[test]
fn toy_samples_are_geometric_in_both_modes() {
    let cfg = DefenseConfig::new(DefenseKind::Rrs, 16, 4).unwrap();
    let a = juggernaut(&TimingParams::toy(), &DramGeometry::toy(64), &cfg, &AttackPlan::juggernaut(3)).unwrap();
    for (mode, seed) in [(McMode::GeometricEvent, 21), (McMode::BinomialDraw, 22)] {
        let run = mc_attack_time(&a, 50_000, seed, mode, 4).unwrap();
        let pv = chi_square_geometric(&run.samples, a.p_success, 60);
        assert!(pv > 1e-3, "{mode:?}: p-value {pv}");
    }
}

#[test]
fn wrong_rate_is_rejected() {
    // the same check must notice a 10% error in p
    let cfg = DefenseConfig::new(DefenseKind::Rrs, 16, 4).unwrap();
    let a = juggernaut(&TimingParams::toy(), &DramGeometry::toy(64), &cfg, &AttackPlan::juggernaut(3)).unwrap();
    let run = mc_attack_time(&a, 50_000, 21, McMode::GeometricEvent, 4).unwrap();
    assert!(chi_square_geometric(&run.samples, a.p_success * 1.1, 60) < 1e-6);
}

#[test]
fn full_scale_means_across_thresholds() {
    let timing = TimingParams::ddr4();
    let geom = DramGeometry::ddr4();
    for (t_rh, t_s, n) in [(4800, 800, 1100), (4800, 800, 400), (2400, 400, 500), (1200, 200, 100)] {
        let cfg = DefenseConfig::new(DefenseKind::Rrs, t_rh, t_s).unwrap();
        let a = juggernaut(&timing, &geom, &cfg, &AttackPlan::juggernaut(n)).unwrap();
        let run = mc_attack_time(&a, 20_000, 8, McMode::GeometricEvent, 2).unwrap();
        let err = (run.mean_s - a.at_time).abs() / a.at_time;
        assert!(err < 0.05, "T_RH={t_rh} N={n}: {err}");
    }
}
