//! The cycle-level engine against the closed form on a toy bank.

use rowswap::analytic::{juggernaut, sweep_rounds};
use rowswap::engine::{run_epoch, run_until_breach};
use rowswap::rng::derive_seed;
use rowswap::{AttackPlan, DefenseConfig, DefenseKind, DramGeometry, Strategy, TimingParams};

fn toy() -> (TimingParams, DramGeometry, DefenseConfig) {
    (TimingParams::toy(), DramGeometry::toy(64), DefenseConfig::new(DefenseKind::Rrs, 16, 4).unwrap())
}

#[test]
fn mean_epochs_to_breach_match_at_iter() {
    let (timing, geom, cfg) = toy();
    let plan = AttackPlan::juggernaut(3);
    let a = juggernaut(&timing, &geom, &cfg, &plan).unwrap();
    // the CLI's per-seed scheme under its default master seed
    let seeds = 1000;
    let mut total = 0;
    for i in 0..seeds {
        let seed = derive_seed(0, &[i]);
        let (epochs, breached) = run_until_breach(&cfg, &plan, &timing, &geom, seed, 100_000).unwrap();
        assert!(breached);
        total += epochs;
    }
    let mean = total as f64 / seeds as f64;
    let err = (mean - a.at_iter).abs() / a.at_iter;
    assert!(err < 0.10, "engine {mean} vs analytic {}", a.at_iter);
}

#[test]
fn bias_phase_lands_where_the_closed_form_puts_it() {
    let (timing, geom, cfg) = toy();
    for n in 0..=3 {
        let a = juggernaut(&timing, &geom, &cfg, &AttackPlan::juggernaut(n)).unwrap();
        let r = run_epoch(&cfg, &AttackPlan::juggernaut(n), &timing, &geom, 11).unwrap();
        // the engine alternates swap orders, so odd N round the mean up
        assert_eq!(f64::from(r.bias_acts.unwrap()), a.act_aggr.ceil(), "N={n}");
    }
}

#[test]
fn latent_only_plans_breach_on_the_first_epoch() {
    let timing = TimingParams::ddr4();
    let geom = DramGeometry::ddr4();
    let cfg = DefenseConfig::new(DefenseKind::Rrs, 2400, 400).unwrap();
    let plan = AttackPlan::new(Strategy::LatentOnly, 0);
    assert!(juggernaut(&timing, &geom, &cfg, &plan).unwrap().deterministic);
    for seed in 0..3 {
        assert_eq!(run_until_breach(&cfg, &plan, &timing, &geom, seed, 1).unwrap(), (1, true));
    }
}

#[test]
fn engine_never_breaches_where_guessing_is_impossible() {
    let (timing, geom, cfg) = toy();
    let sweep = sweep_rounds(&timing, &geom, &cfg, 20).unwrap();
    let limit = sweep.feasibility_limit().unwrap();
    let plan = AttackPlan::juggernaut(limit + 2);
    for seed in 0..50 {
        let r = run_epoch(&cfg, &plan, &timing, &geom, seed).unwrap();
        assert!(!r.breached, "seed {seed}: {} ACTs", r.max_physical_acts);
    }
}
