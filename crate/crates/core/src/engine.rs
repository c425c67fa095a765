//! Activation-exact simulation of one DRAM bank under attack.
//!
//! The simulator steps in activation slots. A demand activation costs
//! `t_RC`; the activation that trips a mitigation is folded into the
//! mitigation latency (`t_swap` or `t_reswap`), so a burst of `T_S`
//! activations ending in a swap costs `(T_S − 1)·t_RC + t_swap`. An
//! activation is only issued if its cost fits in what is left of the
//! epoch, which makes time exactly conserved:
//!
//! `act_time + overhead_time + idle_time + refresh_time == epoch`
//!
//! (a place-back burst at the refresh boundary is reported separately).
//!
//! RRS and SRS track aggressors with a Misra-Gries tracker over logical
//! rows whose reset boundary sits `T_S − 1` activations into the epoch.
//! Scale-SRS tracks every activation per physical location against the
//! in-DRAM swap counters and pins a location's row once the location has
//! taken `T_RH − 1` activations.

use std::path::Path;
use std::time::Duration;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::analytic::latent_only_rounds;
use crate::indirection::{EvictProgress, IndirectionError, PinBuffer, PlaceBackBuffer, RitMode, RowIndirectionTable};
use crate::ledger::ActivationLedger;
use crate::params::{AttackPlan, DefenseConfig, DefenseKind, DramGeometry, Strategy, TimingParams};
use crate::rng::{derive_seed, stream};
use crate::tracker::{MisraGriesTracker, SwapCounterStore, TriggerReset};
use crate::RowId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("pin buffer overflow: more than {0} outlier rows in one epoch")]
    PinOverflow(usize),
    #[error(transparent)]
    Rit(#[from] IndirectionError),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BankOptions {
    /// RRS only. `true`: a re-triggered row is unswapped before its next
    /// swap. `false`: re-swaps chain in place and every displaced row is
    /// put back in one burst at the end of the epoch.
    pub immediate_unswap: bool,
    pub tracker_reset: TriggerReset,
    /// Scale-SRS pin-buffer entries; defaults to the defense's `pin_entries`.
    pub pin_capacity: Option<usize>,
}

impl Default for BankOptions {
    fn default() -> Self {
        Self { immediate_unswap: true, tracker_reset: TriggerReset::Reset, pin_capacity: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActOutcome {
    Issued,
    /// Served by the pin buffer; no DRAM activation.
    Absorbed,
    /// Issued and followed by a mitigation.
    Mitigated,
    /// Not enough time left in the epoch for the activation; nothing
    /// happened.
    OutOfTime,
}

/// What one epoch did to the bank.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EpochReport {
    pub max_physical_acts: u32,
    pub hottest_row: RowId,
    /// `max_physical_acts ≥ T_RH`.
    pub breached: bool,
    pub swaps: u64,
    pub unswap_swaps: u64,
    pub pins: u64,
    pub evictions: u64,
    /// Lazy place-back steps spread over the epoch.
    pub place_back_steps: u64,
    /// Place-back steps forced at the end of the epoch.
    pub place_back_burst: u64,
    /// Lazy place-back steps postponed because a location had no headroom.
    pub deferred_place_backs: u64,
    pub demand_acts: u64,
    pub latent_acts: u64,
    pub absorbed_acts: u64,
    /// Activations of the in-DRAM swap-counter rows.
    pub counter_acts: u64,
    pub failed_mitigations: u64,
    pub act_time: Duration,
    /// Swap, re-swap and place-back latency, including any burst.
    pub overhead_time: Duration,
    pub burst_time: Duration,
    /// Mitigation work cut off by the end of the window; it finishes
    /// during refresh and is not part of `overhead_time`.
    pub overrun_time: Duration,
    pub idle_time: Duration,
    pub refresh_time: Duration,
    /// Random guesses issued by the attacker.
    pub guesses: u64,
    /// Activations at the target's original location when guessing began.
    pub bias_acts: Option<u32>,
    /// The attack program ran out of time before finishing its plan.
    pub truncated: bool,
}

enum Tracking {
    None,
    MisraGries(MisraGriesTracker),
    Counters { store: SwapCounterStore, pending: Vec<u32>, pins: PinBuffer },
}

/// One bank: RIT, tracker, ledger and clock.
pub struct Bank {
    cfg: DefenseConfig,
    timing: TimingParams,
    opts: BankOptions,
    rows: u32,
    rit: Option<RowIndirectionTable>,
    placeback: PlaceBackBuffer,
    tracking: Tracking,
    pub ledger: ActivationLedger,
    rng: ChaCha8Rng,
    acts_this_epoch: u64,
    next_place_back: Option<(Duration, Duration)>,
    report: EpochReport,
}

impl Bank {
    pub fn new(cfg: &DefenseConfig, timing: &TimingParams, geom: &DramGeometry, seed: u64, opts: BankOptions) -> Self {
        let rows = geom.rows_per_bank;
        let capacity = cfg.rit_capacity(timing);
        let rit_seed = derive_seed(seed, &[0x417]);
        let rit = match cfg.kind {
            DefenseKind::None => None,
            DefenseKind::Rrs if opts.immediate_unswap => {
                Some(RowIndirectionTable::new(RitMode::TuplePaired, rows, capacity, rit_seed))
            }
            _ => Some(RowIndirectionTable::new(RitMode::RealMirrored, rows, capacity, rit_seed)),
        };
        let tracking = match cfg.kind {
            DefenseKind::None => Tracking::None,
            DefenseKind::Rrs | DefenseKind::Srs => Tracking::MisraGries(MisraGriesTracker::new(
                MisraGriesTracker::default_capacity(timing.act_max(), cfg.t_s),
                cfg.t_s,
                opts.tracker_reset,
            )),
            DefenseKind::ScaleSrs => Tracking::Counters {
                store: SwapCounterStore::new(rows, geom.row_size_bytes),
                pending: vec![0; rows as usize],
                pins: PinBuffer::new(opts.pin_capacity.unwrap_or(cfg.pin_entries as usize)),
            },
        };
        Self {
            cfg: *cfg,
            timing: *timing,
            opts,
            rows,
            rit,
            placeback: PlaceBackBuffer::new(),
            tracking,
            ledger: ActivationLedger::new(rows),
            rng: stream(seed, &[0xBA2C]),
            acts_this_epoch: 0,
            next_place_back: None,
            report: EpochReport { refresh_time: timing.refresh_time(), ..Default::default() },
        }
    }

    pub fn rows(&self) -> u32 {
        self.rows
    }

    pub fn rit(&self) -> Option<&RowIndirectionTable> {
        self.rit.as_ref()
    }

    pub fn resolve(&self, logical: RowId) -> RowId {
        self.rit.as_ref().map_or(logical, |r| r.resolve(logical))
    }

    pub fn remaining(&self) -> Duration {
        self.timing.t_actual().saturating_sub(self.ledger.elapsed)
    }

    fn mitigation_latency(&self, logical: RowId) -> Duration {
        match (self.cfg.kind, &self.rit) {
            (DefenseKind::Rrs, Some(rit)) if rit.mode() == RitMode::TuplePaired && rit.is_displaced(logical) => {
                self.timing.t_reswap
            }
            _ => self.timing.t_swap,
        }
    }

    fn is_pinned(&self, logical: RowId) -> bool {
        matches!(&self.tracking, Tracking::Counters { pins, .. } if pins.contains(logical))
    }

    /// Cost of `n` activations of `logical` when the last one trips a
    /// mitigation.
    pub fn burst_cost(&self, logical: RowId, n: u32) -> Duration {
        if n == 0 {
            return Duration::ZERO;
        }
        let last = match self.tracking {
            Tracking::None => self.timing.t_rc,
            _ if self.is_pinned(logical) => self.timing.t_rc,
            _ => self.mitigation_latency(logical),
        };
        self.timing.t_rc * (n - 1) + last
    }

    pub fn burst_fits(&self, logical: RowId, n: u32) -> bool {
        self.burst_cost(logical, n) <= self.remaining()
    }

    /// Whether `n` activations ending in a plain swap fit. An attacker
    /// guessing blind cannot know a row's mapping, so it budgets this way.
    pub fn guess_fits(&self, n: u32) -> bool {
        n > 0 && self.timing.t_rc * (n - 1) + self.timing.t_swap <= self.remaining()
    }

    fn charge_overhead(&mut self, d: Duration) {
        self.ledger.advance(d);
        self.report.overhead_time += d;
    }

    /// Runs lazy place-back steps that are due.
    fn place_back_due(&mut self) {
        while let Some((due, interval)) = self.next_place_back {
            if self.ledger.elapsed < due || self.timing.t_swap > self.remaining() {
                return;
            }
            let Some(rit) = self.rit.as_mut() else { return };
            if let Tracking::Counters { store, pending, .. } = &self.tracking {
                // a step that would lift a location past T_RH − 1 waits
                let acts = rit.peek_evict_acts(&self.placeback);
                let over = acts.iter().any(|&p| {
                    let n = acts.iter().filter(|&&q| q == p).count() as u32;
                    store.read(p) + pending[p as usize] + n > self.cfg.t_rh - 1
                });
                if over {
                    self.report.deferred_place_backs += 1;
                    self.next_place_back = Some((self.ledger.elapsed + interval, interval));
                    return;
                }
            }
            let mut acts = Vec::new();
            let progress = rit.lazy_evict_step_into(&mut self.placeback, &mut self.ledger, &mut acts);
            if let Tracking::Counters { pending, .. } = &mut self.tracking {
                acts.iter().for_each(|&p| pending[p as usize] += 1);
            }
            match progress {
                EvictProgress::Drained => {
                    self.next_place_back = None;
                    return;
                }
                EvictProgress::Step { .. } => {
                    self.report.place_back_steps += 1;
                    self.charge_overhead(self.timing.t_swap);
                    self.next_place_back = Some((due + interval, interval));
                }
            }
        }
    }

    /// One demand activation of `logical`.
    pub fn activate(&mut self, logical: RowId) -> Result<ActOutcome, EngineError> {
        if logical >= self.rows {
            return Err(EngineError::Invalid(format!("row {logical} outside a {}-row bank", self.rows)));
        }
        self.place_back_due();
        if self.timing.t_rc > self.remaining() {
            return Ok(ActOutcome::OutOfTime);
        }
        if self.is_pinned(logical) {
            self.ledger.advance(self.timing.t_rc);
            self.report.act_time += self.timing.t_rc;
            self.report.absorbed_acts += 1;
            return Ok(ActOutcome::Absorbed);
        }
        let phys = self.resolve(logical);
        if let Tracking::Counters { store, pending, pins } = &mut self.tracking {
            let loc = phys as usize;
            if store.read(phys) + pending[loc] >= self.cfg.t_rh - 1 {
                pins.pin(logical).map_err(|_| EngineError::PinOverflow(pins.capacity()))?;
                self.report.pins += 1;
                self.ledger.advance(self.timing.t_rc);
                self.report.act_time += self.timing.t_rc;
                self.report.absorbed_acts += 1;
                return Ok(ActOutcome::Absorbed);
            }
        }
        self.ledger.activate(phys);
        self.acts_this_epoch += 1;
        let trigger = match &mut self.tracking {
            Tracking::None => false,
            Tracking::MisraGries(t) => {
                let fired = t.observe(logical).is_some();
                // the tracker's own epoch boundary lags the refresh window
                if self.acts_this_epoch == u64::from(self.cfg.t_s) - 1 {
                    t.reset();
                }
                fired
            }
            Tracking::Counters { store, pending, .. } => {
                pending[phys as usize] += 1;
                let total = store.read(phys) + pending[phys as usize];
                debug_assert_eq!(total, self.ledger.count(phys));
                pending[phys as usize] >= self.cfg.t_s
            }
        };
        if !trigger {
            self.ledger.advance(self.timing.t_rc);
            self.report.act_time += self.timing.t_rc;
            return Ok(ActOutcome::Issued);
        }
        if let Tracking::Counters { store, pending, pins } = &mut self.tracking {
            // a location with no room for the swap's own activation is an
            // outlier already: pin instead of swapping
            if store.read(phys) + pending[phys as usize] + 1 > self.cfg.t_rh - 1 {
                pins.pin(logical).map_err(|_| EngineError::PinOverflow(pins.capacity()))?;
                self.report.pins += 1;
                self.ledger.advance(self.timing.t_rc);
                self.report.act_time += self.timing.t_rc;
                return Ok(ActOutcome::Issued);
            }
        }
        let latency = self.mitigation_latency(logical);
        self.mitigate(logical, phys)?;
        let charged = latency.min(self.remaining());
        self.report.overrun_time += latency - charged;
        self.charge_overhead(charged);
        Ok(ActOutcome::Mitigated)
    }

    fn pick_partner(&mut self, aggressor: RowId) -> Option<RowId> {
        let rit = self.rit.as_ref()?;
        for _ in 0..(8 * self.rows) {
            let p = self.rng.random_range(0..self.rows);
            if p == aggressor {
                continue;
            }
            let ok = match (&self.tracking, rit.mode()) {
                (_, RitMode::TuplePaired) => !rit.is_displaced(p),
                (Tracking::Counters { store, pending, pins }, _) => {
                    let loc = rit.resolve(p);
                    !pins.contains(p) && store.read(loc) + pending[loc as usize] + 1 < self.cfg.t_rh - 1
                }
                _ => true,
            };
            if ok {
                return Some(p);
            }
        }
        None
    }

    fn mitigate(&mut self, logical: RowId, phys: RowId) -> Result<(), EngineError> {
        let Some(partner) = self.pick_partner(logical) else {
            self.report.failed_mitigations += 1;
            return Ok(());
        };
        if let Tracking::Counters { store, pending, .. } = &mut self.tracking {
            let rec = store.record_swap(phys, pending[phys as usize]);
            pending[phys as usize] = 0;
            self.report.counter_acts += 1;
            debug_assert_eq!(rec.total, self.ledger.count(phys));
        }
        let rit = self.rit.as_mut().expect("mitigating defense has a RIT");
        let partner_loc = rit.resolve(partner);
        let receipt = match rit.mode() {
            RitMode::TuplePaired if rit.is_displaced(logical) => {
                self.report.unswap_swaps += 1;
                rit.unswap_swap_alternating(logical, partner, &mut self.ledger)?
            }
            _ => {
                if rit.is_displaced(logical) {
                    self.report.unswap_swaps += 1;
                } else {
                    self.report.swaps += 1;
                }
                rit.swap(logical, partner, &mut self.ledger)?
            }
        };
        self.report.evictions += u64::from(receipt.evictions);
        if let Tracking::Counters { pending, .. } = &mut self.tracking {
            for p in [phys, partner_loc] {
                pending[p as usize] += 1;
            }
        }
        Ok(())
    }

    /// Closes the epoch and prepares the bank for the next one.
    pub fn finish_epoch(&mut self) -> EpochReport {
        let mut report = std::mem::take(&mut self.report);
        report.max_physical_acts = self.ledger.max();
        report.hottest_row = self.ledger.argmax();
        report.breached = report.max_physical_acts >= self.cfg.t_rh;
        report.demand_acts = self.ledger.demand_acts();
        report.latent_acts = self.ledger.latent_acts();
        report.idle_time = self.remaining();
        self.ledger.end_epoch();
        if let Some(rit) = self.rit.as_mut() {
            rit.epoch_reset();
            if self.cfg.kind == DefenseKind::Rrs && !self.opts.immediate_unswap {
                let mut scratch = ActivationLedger::new(self.rows);
                let steps = rit.drain(&mut self.placeback, &mut scratch);
                report.place_back_burst = steps;
                report.burst_time = self.timing.t_swap * steps as u32;
                report.overhead_time += report.burst_time;
            }
        }
        match &mut self.tracking {
            Tracking::MisraGries(t) => t.reset(),
            Tracking::Counters { store, pending, pins } => {
                store.advance_epoch();
                pending.iter_mut().for_each(|p| *p = 0);
                pins.clear();
            }
            Tracking::None => {}
        }
        self.acts_this_epoch = 0;
        self.next_place_back = self.rit.as_ref().and_then(|rit| {
            let prev = rit.previous_epoch_entries() as u32;
            (prev > 0 && rit.mode() == RitMode::RealMirrored).then(|| {
                let interval = self.timing.t_actual() / prev;
                (interval, interval)
            })
        });
        self.report = EpochReport { refresh_time: self.timing.refresh_time(), ..Default::default() };
        report
    }
}

/// An attacker program for one epoch.
#[derive(Debug, Clone)]
pub enum Program {
    /// Pin `target` with `2·T_S − 1` activations straddling the tracker
    /// reset, bias it for `rounds` rounds, then guess random rows.
    Juggernaut { target: RowId, rounds: u64 },
    /// Activations of uniformly random rows until time runs out.
    Uniform,
    /// Replays a fixed activation stream.
    Stream(Vec<RowId>),
}

fn hammer(bank: &mut Bank, row: RowId, n: u32) -> Result<bool, EngineError> {
    for _ in 0..n {
        if bank.activate(row)? == ActOutcome::OutOfTime {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Runs `program` on `bank` for one epoch.
pub fn drive(bank: &mut Bank, program: &Program, t_s: u32, seed: u64) -> Result<EpochReport, EngineError> {
    let mut rng = stream(seed, &[0xA77AC]);
    let rows = bank.rows();
    let mut truncated = false;
    let mut bias_acts = None;
    let mut guesses = 0;
    match program {
        Program::Juggernaut { target, rounds } => {
            let target = *target;
            'plan: {
                if !hammer(bank, target, t_s - 1)? || !hammer(bank, target, t_s)? {
                    truncated = true;
                    break 'plan;
                }
                for _ in 0..*rounds {
                    if !bank.burst_fits(target, t_s) {
                        truncated = true;
                        break 'plan;
                    }
                    hammer(bank, target, t_s)?;
                }
            }
            bias_acts = Some(bank.ledger.count(target));
            loop {
                let g = loop {
                    let g = rng.random_range(0..rows);
                    if g != target {
                        break g;
                    }
                };
                if !bank.guess_fits(t_s) {
                    break;
                }
                hammer(bank, g, t_s)?;
                guesses += 1;
            }
        }
        Program::Uniform => loop {
            if bank.activate(rng.random_range(0..rows))? == ActOutcome::OutOfTime {
                break;
            }
        },
        Program::Stream(rows) => {
            for &r in rows {
                if bank.activate(r)? == ActOutcome::OutOfTime {
                    truncated = true;
                    break;
                }
            }
        }
    }
    let mut report = bank.finish_epoch();
    report.truncated = truncated;
    report.bias_acts = bias_acts;
    report.guesses = guesses;
    Ok(report)
}

/// The program a plan describes, aimed at a random target.
pub fn program_for(defense: &DefenseConfig, plan: &AttackPlan, rows: u32, seed: u64) -> Program {
    let target = stream(seed, &[0x7A26]).random_range(0..rows);
    let rounds = match plan.strategy {
        Strategy::JuggernautBias => plan.rounds,
        Strategy::RandomGuessOnly => 0,
        Strategy::LatentOnly => latent_only_rounds(defense),
    };
    Program::Juggernaut { target, rounds }
}

/// One refresh interval on a fresh bank.
pub fn run_epoch(
    defense: &DefenseConfig,
    plan: &AttackPlan,
    timing: &TimingParams,
    geom: &DramGeometry,
    seed: u64,
) -> Result<EpochReport, EngineError> {
    let mut bank = Bank::new(defense, timing, geom, seed, BankOptions::default());
    let program = program_for(defense, plan, geom.rows_per_bank, seed);
    drive(&mut bank, &program, defense.t_s, seed)
}

/// Epochs until the first breach, each on a fresh bank with its own seed.
/// Returns `(epochs, breached)`.
pub fn run_until_breach(
    defense: &DefenseConfig,
    plan: &AttackPlan,
    timing: &TimingParams,
    geom: &DramGeometry,
    seed: u64,
    max_epochs: u64,
) -> Result<(u64, bool), EngineError> {
    for e in 0..max_epochs {
        if run_epoch(defense, plan, timing, geom, derive_seed(seed, &[e]))?.breached {
            return Ok((e + 1, true));
        }
    }
    Ok((max_epochs, false))
}

/// Scale-SRS epoch driven by an explicit activation stream.
pub fn run_scale_srs_epoch(
    defense: &DefenseConfig,
    workload: &[RowId],
    timing: &TimingParams,
    geom: &DramGeometry,
    seed: u64,
) -> Result<EpochReport, EngineError> {
    if defense.kind != DefenseKind::ScaleSrs {
        return Err(EngineError::Invalid("run_scale_srs_epoch needs a scale-srs defense".into()));
    }
    let mut bank = Bank::new(defense, timing, geom, seed, BankOptions::default());
    drive(&mut bank, &Program::Stream(workload.to_vec()), defense.t_s, seed)
}

/// Bandwidth-overhead proxy over many epochs. This counts mitigation work
/// and the share of the epoch it occupies; it is not an IPC estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct OverheadSummary {
    pub epochs: usize,
    pub swaps: u64,
    pub unswap_swaps: u64,
    pub pins: u64,
    pub place_back_steps: u64,
    pub place_back_burst: u64,
    pub overhead_time: Duration,
    /// Overhead time over total activation-window time.
    pub mitigation_fraction: f64,
}

pub fn overhead_metrics(reports: &[EpochReport], timing: &TimingParams) -> Result<OverheadSummary, EngineError> {
    if reports.is_empty() {
        return Err(EngineError::Invalid("overhead_metrics needs at least one epoch".into()));
    }
    let overhead_time: Duration = reports.iter().map(|r| r.overhead_time).sum();
    let window = timing.t_actual().as_secs_f64() * reports.len() as f64;
    Ok(OverheadSummary {
        epochs: reports.len(),
        swaps: reports.iter().map(|r| r.swaps).sum(),
        unswap_swaps: reports.iter().map(|r| r.unswap_swaps).sum(),
        pins: reports.iter().map(|r| r.pins).sum(),
        place_back_steps: reports.iter().map(|r| r.place_back_steps).sum(),
        place_back_burst: reports.iter().map(|r| r.place_back_burst).sum(),
        overhead_time,
        mitigation_fraction: overhead_time.as_secs_f64() / window,
    })
}

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("cannot read trace {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("trace line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// One decimal row id per line; `#` starts a comment.
pub fn parse_trace(text: &str, rows: u32) -> Result<Vec<RowId>, TraceError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let row: RowId = line
            .parse()
            .map_err(|_| TraceError::Parse { line: i + 1, message: format!("expected a row id, got `{line}`") })?;
        if row >= rows {
            return Err(TraceError::Parse { line: i + 1, message: format!("row {row} outside a {rows}-row bank") });
        }
        out.push(row);
    }
    Ok(out)
}

pub fn load_trace(path: impl AsRef<Path>, rows: u32) -> Result<Vec<RowId>, TraceError> {
    let path = path.as_ref();
    let text =
        std::fs::read_to_string(path).map_err(|source| TraceError::Io { path: path.display().to_string(), source })?;
    parse_trace(&text, rows)
}
