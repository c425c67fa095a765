//! Closed-form attack-time models.
//!
//! The Juggernaut pipeline: the attacker spends `2·T_S − 1` direct
//! activations plus one latent activation pinning the target, optionally
//! biases it with `N` unswap-swap rounds (`L` latent activations each under
//! RRS), then spends the rest of the epoch hammering random rows `T_S`
//! times each, hoping to land `k` of them on the target's original
//! location. Success is a binomial point event with `p = 1/R`.
//!
//! All probabilities are carried in log space.

use std::time::Duration;

use statrs::function::gamma::ln_gamma;
use thiserror::Error;

use crate::params::{
    default_pin_entries, AttackPlan, DefenseConfig, DefenseKind, DramGeometry, Strategy, TimingParams,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticError {
    #[error("{op} does not model defense `{kind}`")]
    WrongDefense { op: &'static str, kind: DefenseKind },
    #[error("infeasible plan at N = {rounds}: {left_ns} ns left for guessing, {guesses} guesses, {k} required")]
    Infeasible {
        rounds: u64,
        /// Signed time left for the guessing phase.
        left_ns: i128,
        guesses: u64,
        k: u64,
    },
    #[error("k_swaps ≥ 1")]
    ZeroSwaps,
}

/// Every intermediate quantity of the closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct AttackAnalysis {
    pub rounds: u64,
    /// Activations on the target location before guessing (`2·T_S + L·N`).
    pub act_aggr: f64,
    pub act_left: f64,
    /// Correct guesses required.
    pub k: u64,
    pub t_actual: Duration,
    pub t_aggr: Duration,
    pub t_left: Duration,
    /// Random rows the attacker can hammer `T_S` times in the time left.
    pub guesses: u64,
    pub p_success: f64,
    /// Natural log of `p_success`; finite even when `p_success` underflows.
    pub ln_p_success: f64,
    /// Expected epochs until success.
    pub at_iter: f64,
    /// Expected attack time in seconds.
    pub at_time: f64,
    /// The biasing phase alone breaks the target; no guessing needed.
    pub deterministic: bool,
    pub epoch: Duration,
    /// Rows per bank; a single guess hits the target with probability `1/rows`.
    pub rows: u32,
}

impl AttackAnalysis {
    pub fn at_hours(&self) -> f64 {
        self.at_time / 3600.0
    }
}

pub const SECONDS_PER_YEAR: f64 = 365.0 * 86_400.0;

/// `ln C(n, k)`. Small `k` sums exact ratios; large `k` uses log-gamma.
pub fn ln_choose(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    if k <= 64 {
        (0..k).map(|i| ((n - i) as f64 / (i + 1) as f64).ln()).sum()
    } else {
        ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
    }
}

/// `ln P(Bin(n, p) = k)`.
pub fn ln_binomial_pmf(n: u64, k: u64, p: f64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    if p <= 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if p >= 1.0 {
        return if k == n { 0.0 } else { f64::NEG_INFINITY };
    }
    ln_choose(n, k) + k as f64 * p.ln() + (n - k) as f64 * (-p).ln_1p()
}

/// `ln P(Poisson(lambda) = m)`.
pub fn ln_poisson_pmf(lambda: f64, m: u64) -> f64 {
    if lambda <= 0.0 {
        return if m == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    -lambda + m as f64 * lambda.ln() - ln_gamma(m as f64 + 1.0)
}

fn ns(d: Duration) -> i128 {
    d.as_nanos() as i128
}

/// Per-round cost of one unswap-swap round: `(T_S − 1)·t_RC + t_reswap`.
pub fn round_time(timing: &TimingParams, t_s: u32) -> Duration {
    timing.t_rc * (t_s - 1) + timing.t_reswap
}

/// Per-guess cost: `(T_S − 1)·t_RC + t_swap`; the ACT that trips the swap
/// is folded into the swap latency.
pub fn guess_time(timing: &TimingParams, t_s: u32) -> Duration {
    timing.t_rc * (t_s - 1) + timing.t_swap
}

/// Cost of pinning the target before any bias: `t_RC·(2·T_S − 1) + t_swap`.
pub fn initial_swap_time(timing: &TimingParams, t_s: u32) -> Duration {
    timing.t_rc * (2 * t_s - 1) + timing.t_swap
}

/// Shared tail of the RRS and SRS models.
fn pipeline(
    timing: &TimingParams,
    geom: &DramGeometry,
    t_rh: u32,
    t_s: u32,
    act_aggr: f64,
    rounds: u64,
    t_aggr_ns: i128,
) -> Result<AttackAnalysis, AnalyticError> {
    let act_left = f64::from(t_rh) - act_aggr;
    let k = if act_left <= 0.0 { 0 } else { (act_left / f64::from(t_s)).ceil() as u64 };
    let t_actual = timing.t_actual();
    let left_ns = ns(t_actual) - t_aggr_ns - ns(initial_swap_time(timing, t_s));
    let per_guess = ns(guess_time(timing, t_s));
    let guesses = if left_ns >= 0 { (left_ns / per_guess) as u64 } else { 0 };
    if left_ns < 0 || guesses < k {
        return Err(AnalyticError::Infeasible { rounds, left_ns, guesses, k });
    }
    let epoch_s = timing.epoch.as_secs_f64();
    let ln_p = if k == 0 { 0.0 } else { ln_binomial_pmf(guesses, k, 1.0 / f64::from(geom.rows_per_bank)) };
    let at_iter = (-ln_p).exp();
    Ok(AttackAnalysis {
        rounds,
        act_aggr,
        act_left,
        k,
        t_actual,
        t_aggr: Duration::from_nanos(t_aggr_ns as u64),
        t_left: Duration::from_nanos(left_ns as u64),
        guesses,
        p_success: ln_p.exp(),
        ln_p_success: ln_p,
        at_iter,
        at_time: epoch_s * at_iter,
        deterministic: k == 0,
        epoch: timing.epoch,
        rows: geom.rows_per_bank,
    })
}

/// Unswap-swap rounds after which latent activations alone reach T_RH.
pub fn latent_only_rounds(cfg: &DefenseConfig) -> u64 {
    let need = f64::from(cfg.t_rh) - 2.0 * f64::from(cfg.t_s);
    if need <= 0.0 {
        0
    } else {
        (need / cfg.latent_per_reswap).ceil() as u64
    }
}

/// Juggernaut against RRS.
///
/// `LatentOnly` plans ignore `plan.rounds` and use [`latent_only_rounds`];
/// the result is deterministic when those rounds fit in one epoch.
pub fn juggernaut_rrs(
    timing: &TimingParams,
    geom: &DramGeometry,
    cfg: &DefenseConfig,
    plan: &AttackPlan,
) -> Result<AttackAnalysis, AnalyticError> {
    if cfg.kind != DefenseKind::Rrs {
        return Err(AnalyticError::WrongDefense { op: "juggernaut_rrs", kind: cfg.kind });
    }
    let rounds = match plan.strategy {
        Strategy::JuggernautBias => plan.rounds,
        Strategy::RandomGuessOnly => 0,
        Strategy::LatentOnly => latent_only_rounds(cfg),
    };
    let act_aggr = 2.0 * f64::from(cfg.t_s) + cfg.latent_per_reswap * rounds as f64;
    let t_aggr = ns(round_time(timing, cfg.t_s)) * i128::from(rounds);
    pipeline(timing, geom, cfg.t_rh, cfg.t_s, act_aggr, rounds, t_aggr)
}

/// Juggernaut against SRS: reswaps never touch the original location, so
/// the bias term vanishes and the plan is irrelevant.
pub fn juggernaut_srs(
    timing: &TimingParams,
    geom: &DramGeometry,
    cfg: &DefenseConfig,
    _plan: &AttackPlan,
) -> Result<AttackAnalysis, AnalyticError> {
    if cfg.kind != DefenseKind::Srs {
        return Err(AnalyticError::WrongDefense { op: "juggernaut_srs", kind: cfg.kind });
    }
    pipeline(timing, geom, cfg.t_rh, cfg.t_s, 2.0 * f64::from(cfg.t_s), 0, 0)
}

/// Dispatches on `cfg.kind` (RRS or SRS).
pub fn juggernaut(
    timing: &TimingParams,
    geom: &DramGeometry,
    cfg: &DefenseConfig,
    plan: &AttackPlan,
) -> Result<AttackAnalysis, AnalyticError> {
    match cfg.kind {
        DefenseKind::Srs => juggernaut_srs(timing, geom, cfg, plan),
        _ => juggernaut_rrs(timing, geom, cfg, plan),
    }
}

#[derive(Debug, Clone)]
pub struct RoundSweep {
    pub points: Vec<(u64, Result<AttackAnalysis, AnalyticError>)>,
}

impl RoundSweep {
    pub fn feasible(&self) -> impl Iterator<Item = &AttackAnalysis> {
        self.points.iter().filter_map(|(_, r)| r.as_ref().ok())
    }

    /// Feasible point with the smallest attack time (lowest N on ties).
    pub fn argmin(&self) -> Option<&AttackAnalysis> {
        self.feasible().fold(None, |best: Option<&AttackAnalysis>, a| match best {
            Some(b) if b.at_time <= a.at_time => Some(b),
            _ => Some(a),
        })
    }

    /// Largest N whose plan is feasible.
    pub fn feasibility_limit(&self) -> Option<u64> {
        self.feasible().map(|a| a.rounds).max()
    }
}

/// Juggernaut analysis for every N in `0..=n_max`.
pub fn sweep_rounds(
    timing: &TimingParams,
    geom: &DramGeometry,
    cfg: &DefenseConfig,
    n_max: u64,
) -> Result<RoundSweep, AnalyticError> {
    if !matches!(cfg.kind, DefenseKind::Rrs | DefenseKind::Srs) {
        return Err(AnalyticError::WrongDefense { op: "sweep_rounds", kind: cfg.kind });
    }
    let points = (0..=n_max).map(|n| (n, juggernaut(timing, geom, cfg, &AttackPlan::juggernaut(n)))).collect();
    Ok(RoundSweep { points })
}

/// How the outlier model counts the rows an attacker can swap per epoch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GuessAccounting {
    /// Each guessed row costs `(T_S − 1)·t_RC + t_swap` of the usable epoch.
    #[default]
    SwapLatency,
    /// `floor(ACT_max / T_S)`, ignoring swap latency.
    ActivationBudget,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutlierAnalysis {
    pub guesses: u64,
    pub k_swaps: u64,
    /// Expected rows picked exactly `k_swaps` times in one epoch.
    pub expected_rows_k: f64,
    pub m: u64,
    pub p_m: f64,
    pub ln_p_m: f64,
    /// Expected time until `m` such rows appear in one epoch, in seconds.
    /// Infinite when `p_m` underflows; `ln_p_m` stays finite.
    pub time_to_appear: f64,
}

impl OutlierAnalysis {
    pub fn beyond_horizon(&self) -> bool {
        self.p_m == 0.0 || !self.time_to_appear.is_finite()
    }
}

pub fn outlier_guesses(timing: &TimingParams, cfg: &DefenseConfig, acct: GuessAccounting) -> u64 {
    match acct {
        GuessAccounting::SwapLatency => (timing.t_actual().as_nanos() / guess_time(timing, cfg.t_s).as_nanos()) as u64,
        GuessAccounting::ActivationBudget => timing.act_max() / u64::from(cfg.t_s),
    }
}

/// Poisson model of `m` rows each receiving `k_swaps` random swaps in one
/// epoch, with swap-latency guess accounting.
pub fn outlier_time(
    timing: &TimingParams,
    geom: &DramGeometry,
    cfg: &DefenseConfig,
    k_swaps: u64,
    m: u64,
) -> Result<OutlierAnalysis, AnalyticError> {
    outlier_time_with(timing, geom, cfg, k_swaps, m, GuessAccounting::SwapLatency)
}

pub fn outlier_time_with(
    timing: &TimingParams,
    geom: &DramGeometry,
    cfg: &DefenseConfig,
    k_swaps: u64,
    m: u64,
    acct: GuessAccounting,
) -> Result<OutlierAnalysis, AnalyticError> {
    if cfg.kind != DefenseKind::ScaleSrs {
        return Err(AnalyticError::WrongDefense { op: "outlier_time", kind: cfg.kind });
    }
    if k_swaps == 0 {
        return Err(AnalyticError::ZeroSwaps);
    }
    let guesses = outlier_guesses(timing, cfg, acct);
    let r = f64::from(geom.rows_per_bank);
    let expected_rows_k = r * ln_binomial_pmf(guesses, k_swaps, 1.0 / r).exp();
    let ln_p_m = ln_poisson_pmf(expected_rows_k, m);
    let p_m = ln_p_m.exp();
    Ok(OutlierAnalysis {
        guesses,
        k_swaps,
        expected_rows_k,
        m,
        p_m,
        ln_p_m,
        time_to_appear: timing.epoch.as_secs_f64() * (-ln_p_m).exp(),
    })
}

/// Smallest capacity `c` with `P(Poisson(lambda) > c) < epsilon`.
pub fn poisson_capacity(lambda: f64, epsilon: f64) -> u64 {
    let mut cdf = 0.0;
    let mut c = 0;
    loop {
        cdf += ln_poisson_pmf(lambda, c).exp();
        if 1.0 - cdf < epsilon || c > 1_000_000 {
            return c;
        }
        c += 1;
    }
}

/// Pin-buffer entries that hold every outlier of one epoch except with
/// probability `epsilon`, counting rows that receive at least
/// `outlier_swap_limit` of the epoch's random swaps.
pub fn pin_capacity(timing: &TimingParams, geom: &DramGeometry, cfg: &DefenseConfig, epsilon: f64) -> u64 {
    let g = outlier_guesses(timing, cfg, GuessAccounting::SwapLatency);
    let r = f64::from(geom.rows_per_bank);
    let limit = u64::from(cfg.outlier_swap_limit);
    let tail: f64 = (limit..=g).map(|k| ln_binomial_pmf(g, k, 1.0 / r).exp()).sum();
    poisson_capacity(r * tail, epsilon)
}

/// Fixed structure sizes.
pub const SWAP_BUFFER_BITS: u64 = 1024 * 8;
pub const EPOCH_REGISTER_BITS: u64 = 19;
pub const PIN_ENTRY_BITS: u64 = 35;

#[derive(Debug, Clone, PartialEq)]
pub struct StorageRow {
    pub structure: &'static str,
    pub bits: u64,
}

impl StorageRow {
    pub fn bytes(&self) -> u64 {
        self.bits.div_ceil(8)
    }
}

/// Per-bank on-chip storage of one defense.
#[derive(Debug, Clone, PartialEq)]
pub struct StorageReport {
    pub kind: DefenseKind,
    pub rows: Vec<StorageRow>,
}

impl StorageReport {
    pub fn total_bits(&self) -> u64 {
        self.rows.iter().map(|r| r.bits).sum()
    }

    pub fn total_bytes(&self) -> u64 {
        self.total_bits().div_ceil(8)
    }

    pub fn bits_of(&self, structure: &str) -> u64 {
        self.rows.iter().find(|r| r.structure == structure).map_or(0, |r| r.bits)
    }
}

pub const STRUCTURES: [&str; 5] = ["rit", "swap_buffer", "place_back_buffer", "epoch_register", "pin_buffer"];

pub fn storage_report(timing: &TimingParams, cfg: &DefenseConfig) -> StorageReport {
    let entries = 2 * cfg.max_swaps_per_epoch(timing);
    let rit = (entries as f64 * f64::from(cfg.rit_entry_bits) * cfg.rit_overprovision).ceil() as u64;
    let (place_back, epoch_reg, pin) = match cfg.kind {
        DefenseKind::ScaleSrs => (8 * 1024 * 8, EPOCH_REGISTER_BITS, u64::from(cfg.pin_entries) * PIN_ENTRY_BITS),
        DefenseKind::Srs => (8 * 1024 * 8, 0, 0),
        _ => (0, 0, 0),
    };
    let (rit, swap) = if cfg.kind == DefenseKind::None { (0, 0) } else { (rit, SWAP_BUFFER_BITS) };
    let rows = STRUCTURES
        .iter()
        .zip([rit, swap, place_back, epoch_reg, pin])
        .map(|(&structure, bits)| StorageRow { structure, bits })
        .collect();
    StorageReport { kind: cfg.kind, rows }
}

/// RRS at swap rate 6 beside Scale-SRS at swap rate 3, both at `t_rh`.
pub fn storage_comparison(
    timing: &TimingParams,
    t_rh: u32,
) -> Result<(StorageReport, StorageReport), crate::params::ConfigError> {
    let rrs = DefenseConfig::with_swap_rate(DefenseKind::Rrs, t_rh, 6)?;
    let mut scale = DefenseConfig::with_swap_rate(DefenseKind::ScaleSrs, t_rh, 3)?;
    scale.pin_entries = default_pin_entries(t_rh);
    Ok((storage_report(timing, &rrs), storage_report(timing, &scale)))
}

/// In-DRAM layout of the per-row swap-tracking counters.
#[derive(Debug, Clone, PartialEq)]
pub struct SwapCounterLayout {
    pub counter_bits: u32,
    pub epoch_bits: u32,
    pub act_bits: u32,
    pub reserved_bytes_per_bank: u64,
    pub counter_rows: u64,
    pub fraction_of_dram: f64,
    /// Time until the epoch register wraps: `2^epoch_bits` counter epochs.
    pub wraparound_period: Duration,
    /// Raw activation time to reset every counter row.
    pub reset_cost: Duration,
    /// Reset latency as published, kept for comparison only.
    pub reported_reset_latency: Duration,
}

pub const COUNTER_EPOCH_BITS: u32 = 19;
pub const COUNTER_ACT_BITS: u32 = 13;

pub fn swap_counter_layout(timing: &TimingParams, geom: &DramGeometry) -> SwapCounterLayout {
    let counter_bits = COUNTER_EPOCH_BITS + COUNTER_ACT_BITS;
    let reserved = u64::from(geom.rows_per_bank) * u64::from(counter_bits / 8);
    let counter_rows = reserved.div_ceil(u64::from(geom.row_size_bytes));
    let bank_bytes = u64::from(geom.rows_per_bank) * u64::from(geom.row_size_bytes);
    SwapCounterLayout {
        counter_bits,
        epoch_bits: COUNTER_EPOCH_BITS,
        act_bits: COUNTER_ACT_BITS,
        reserved_bytes_per_bank: reserved,
        counter_rows,
        fraction_of_dram: reserved as f64 / bank_bytes as f64,
        wraparound_period: timing.counter_epoch() * (1u32 << COUNTER_EPOCH_BITS),
        reset_cost: timing.t_rc * counter_rows as u32,
        reported_reset_latency: Duration::from_micros(41),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ddr4() -> (TimingParams, DramGeometry) {
        (TimingParams::ddr4(), DramGeometry::ddr4())
    }

    fn rrs(t_rh: u32, t_s: u32) -> DefenseConfig {
        DefenseConfig::new(DefenseKind::Rrs, t_rh, t_s).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    // Frozen values from an independent hand evaluation of the closed form.
    #[test]
    fn rrs_4800_n1100_matches_oracle() {
        let (t, g) = ddr4();
        let a = juggernaut_rrs(&t, &g, &rrs(4800, 800), &AttackPlan::juggernaut(1100)).unwrap();
        assert_eq!(a.act_aggr, 3250.0);
        assert_eq!(a.k, 2);
        assert_eq!(a.guesses, 402);
        assert!(rel(a.p_success, 4.6773e-6) < 1e-4, "{}", a.p_success);
        assert!(rel(a.at_time, 13683.1) < 1e-4, "{}", a.at_time);
        assert!(a.at_hours() < 4.0);
        assert_eq!(a.t_actual, Duration::from_nanos(61_132_800));
    }

    #[test]
    fn rrs_n500_needs_four_guesses() {
        let (t, g) = ddr4();
        let a = juggernaut_rrs(&t, &g, &rrs(4800, 800), &AttackPlan::juggernaut(500)).unwrap();
        assert_eq!(a.k, 4);
        assert_eq!(a.guesses, 1044);
    }

    #[test]
    fn zero_rounds_leave_only_the_initial_pin() {
        let (t, g) = ddr4();
        let mut cfg = rrs(4800, 800);
        cfg.latent_per_reswap = 1.9;
        let a = juggernaut_rrs(&t, &g, &cfg, &AttackPlan::juggernaut(0)).unwrap();
        assert_eq!(a.act_aggr, 1600.0);
        assert_eq!(a.t_aggr, Duration::ZERO);
    }

    #[test]
    fn srs_matches_oracle_and_ignores_rounds() {
        let (t, g) = ddr4();
        let cfg = DefenseConfig::new(DefenseKind::Srs, 4800, 800).unwrap();
        let a = juggernaut_srs(&t, &g, &cfg, &AttackPlan::juggernaut(0)).unwrap();
        let b = juggernaut_srs(&t, &g, &cfg, &AttackPlan::juggernaut(1000)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.k, 4);
        assert_eq!(a.guesses, 1579);
        let years = a.at_time / SECONDS_PER_YEAR;
        assert!(rel(years, 2.348) < 1e-3, "{years}");
    }

    #[test]
    fn rrs_without_latent_equals_srs_with_time_debit() {
        let (t, g) = ddr4();
        let mut r = rrs(4800, 800);
        r.latent_per_reswap = 0.0;
        let s = DefenseConfig { kind: DefenseKind::Srs, ..r };
        for n in [0, 10, 500] {
            let a = juggernaut_rrs(&t, &g, &r, &AttackPlan::juggernaut(n)).unwrap();
            let b = juggernaut_srs(&t, &g, &s, &AttackPlan::juggernaut(n)).unwrap();
            assert_eq!((a.act_aggr, a.k), (b.act_aggr, b.k));
            assert_eq!(a.t_aggr, round_time(&t, 800) * n as u32);
            assert_eq!(a.t_left + a.t_aggr, b.t_left);
        }
    }

    #[test]
    fn latent_only_breaks_within_one_epoch() {
        let (t, g) = ddr4();
        let plan = AttackPlan::new(Strategy::LatentOnly, 0);
        for (t_rh, t_s) in [(2400, 400), (1200, 200), (3300, 330)] {
            let a = juggernaut_rrs(&t, &g, &rrs(t_rh, t_s), &plan).unwrap();
            assert!(a.deterministic);
            assert_eq!((a.k, a.p_success, a.at_iter), (0, 1.0, 1.0));
            assert_eq!(a.at_time, 0.064);
        }
        assert_eq!(latent_only_rounds(&rrs(2400, 400)), 1067);
        // at T_RH = 4800 the rounds no longer fit in an epoch
        assert!(matches!(
            juggernaut_rrs(&t, &g, &rrs(4800, 800), &plan),
            Err(AnalyticError::Infeasible { rounds: 2134, .. })
        ));
    }

    #[test]
    fn sweep_plateaus_and_argmin() {
        let (t, g) = ddr4();
        let sweep = sweep_rounds(&t, &g, &rrs(4800, 800), 1500).unwrap();
        assert_eq!(sweep.points.len(), 1501);
        let best = sweep.argmin().unwrap();
        assert_eq!(best.rounds, 1067);
        assert!((3.0..4.0).contains(&best.at_hours()));
        assert_eq!(sweep.feasibility_limit(), Some(1474));
        let mut prev: Option<&AttackAnalysis> = None;
        for a in sweep.feasible() {
            if let Some(p) = prev {
                assert!(a.k <= p.k);
                if a.k == p.k {
                    assert!(a.at_time >= p.at_time);
                }
            }
            prev = Some(a);
        }
        let ks: Vec<u64> = sweep.feasible().map(|a| a.k).collect();
        assert!(ks.contains(&4) && ks.contains(&3) && ks.contains(&2));
    }

    #[test]
    fn degenerate_sweep() {
        let (t, g) = ddr4();
        let cfg = rrs(4800, 800);
        let sweep = sweep_rounds(&t, &g, &cfg, 0).unwrap();
        assert_eq!(sweep.points.len(), 1);
        let direct = juggernaut_rrs(&t, &g, &cfg, &AttackPlan::juggernaut(0)).unwrap();
        assert_eq!(sweep.points[0].1.as_ref().unwrap(), &direct);
    }

    #[test]
    fn wrong_defense_is_rejected() {
        let (t, g) = ddr4();
        let cfg = DefenseConfig::new(DefenseKind::Srs, 4800, 800).unwrap();
        assert!(juggernaut_rrs(&t, &g, &cfg, &AttackPlan::default()).is_err());
        assert!(outlier_time(&t, &g, &cfg, 3, 1).is_err());
    }

    fn scale(t_rh: u32, t_s: u32) -> DefenseConfig {
        DefenseConfig::new(DefenseKind::ScaleSrs, t_rh, t_s).unwrap()
    }

    #[test]
    fn outlier_horizons() {
        let (t, g) = ddr4();
        let cfg = scale(4800, 1600);
        let expect = [(1, 12.2), (2, 1.29 * 3600.0), (3, 30.74 * 86_400.0), (4, 64.03 * SECONDS_PER_YEAR)];
        for (m, secs) in expect {
            let o = outlier_time(&t, &g, &cfg, 3, m).unwrap();
            assert_eq!(o.guesses, 818);
            assert!(rel(o.time_to_appear, secs) < 5e-3, "m={m}: {}", o.time_to_appear);
        }
        let zero = outlier_time(&t, &g, &cfg, 3, 0).unwrap();
        assert!(rel(zero.p_m, (-zero.expected_rows_k).exp()) < 1e-12);
        assert!((0.064..0.065).contains(&zero.time_to_appear));
    }

    #[test]
    fn outlier_activation_budget_mode() {
        let (t, g) = ddr4();
        let o = outlier_time_with(&t, &g, &scale(4800, 1600), 3, 4, GuessAccounting::ActivationBudget).unwrap();
        assert_eq!(o.guesses, 849);
        let years = o.time_to_appear / SECONDS_PER_YEAR;
        assert!((30.0..50.0).contains(&years), "{years}");
        let o = outlier_time_with(&t, &g, &scale(3600, 1200), 3, 1, GuessAccounting::ActivationBudget).unwrap();
        assert_eq!(o.guesses, 1132);
    }

    #[test]
    fn outlier_underflow_keeps_log_probability() {
        let (t, g) = ddr4();
        let o = outlier_time(&t, &g, &scale(4800, 1600), 3, 400).unwrap();
        assert!(o.beyond_horizon());
        assert!(o.ln_p_m.is_finite() && o.ln_p_m < -700.0);
    }

    #[test]
    fn poisson_sums_to_one() {
        for lambda in [1e-6, 0.006, 1.0, 12.5] {
            let mut total = 0.0;
            let mut m = 0;
            loop {
                let term = ln_poisson_pmf(lambda, m).exp();
                total += term;
                if m as f64 > lambda && term < 1e-18 {
                    break;
                }
                m += 1;
            }
            assert!((total - 1.0).abs() < 1e-9, "{lambda}: {total}");
        }
    }

    #[test]
    fn pin_capacity_covers_expected_outliers() {
        let (t, g) = ddr4();
        let c = pin_capacity(&t, &g, &scale(4800, 1600), 1e-12);
        assert!((1..=66).contains(&c), "{c}");
        assert_eq!(poisson_capacity(0.0, 1e-9), 0);
    }

    #[test]
    fn storage_table_at_1200() {
        let t = TimingParams::ddr4();
        let (rrs, scale) = storage_comparison(&t, 1200).unwrap();
        assert_eq!(rrs.bits_of("rit").div_ceil(8), 254_700);
        assert_eq!(scale.bits_of("rit").div_ceil(8), 69_618);
        assert_eq!(scale.bits_of("swap_buffer"), 8192);
        assert_eq!(scale.bits_of("place_back_buffer"), 65_536);
        assert_eq!(scale.bits_of("epoch_register"), 19);
        assert_eq!(scale.bits_of("pin_buffer").div_ceil(8), 420);
        assert_eq!(rrs.total_bytes(), 255_724);
        assert_eq!(scale.total_bytes(), 79_257);
        let ratio = rrs.total_bits() as f64 / scale.total_bits() as f64;
        assert!((3.0..=3.6).contains(&ratio), "{ratio}");
    }

    #[test]
    fn storage_pin_buffer_at_4800() {
        let t = TimingParams::ddr4();
        let (rrs, scale) = storage_comparison(&t, 4800).unwrap();
        assert_eq!(scale.bits_of("pin_buffer").div_ceil(8), 289);
        assert!(scale.total_bits() < rrs.total_bits());
    }

    #[test]
    fn counter_layout() {
        let (t, g) = ddr4();
        let l = swap_counter_layout(&t, &g);
        assert_eq!((l.counter_bits, l.epoch_bits, l.act_bits), (32, 19, 13));
        assert_eq!(l.reserved_bytes_per_bank, 512 * 1024);
        assert_eq!(l.counter_rows, 64);
        assert!((l.fraction_of_dram - 4.0 / 8192.0).abs() < 1e-15);
        assert_eq!(l.reset_cost, Duration::from_nanos(64 * 45));
        let hours = l.wraparound_period.as_secs_f64() / 3600.0;
        assert!((hours - 4.66).abs() < 0.01, "{hours}");
    }

    #[test]
    fn ddr5_rrs_at_3100_falls_within_a_day() {
        let g = DramGeometry::ddr4();
        let t = TimingParams::ddr5();
        for rate in [2, 4, 5, 10] {
            let cfg = DefenseConfig::with_swap_rate(DefenseKind::Rrs, 3100, rate).unwrap();
            let sweep = sweep_rounds(&t, &g, &cfg, 3000).unwrap();
            let best = sweep.argmin().unwrap();
            assert!(best.at_time < 86_400.0, "rate {rate}: {}", best.at_time);
        }
    }

    #[test]
    fn ln_choose_agrees_across_methods() {
        for (n, k) in [(5000u64, 70u64), (402, 2), (1579, 4), (100, 100)] {
            let gamma = ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0);
            assert!((ln_choose(n, k) - gamma).abs() < 1e-9 * gamma.abs().max(1.0));
        }
        assert_eq!(ln_binomial_pmf(3, 4, 0.5), f64::NEG_INFINITY);
    }
}
