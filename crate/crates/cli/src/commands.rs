use std::fmt;
use std::path::Path;

use rowswap::analytic::{
    juggernaut, outlier_time_with, storage_comparison, sweep_rounds, AnalyticError, GuessAccounting, SECONDS_PER_YEAR,
};
use rowswap::engine::{
    drive, load_trace, overhead_metrics, program_for, Bank, BankOptions, EngineError, EpochReport, Program, TraceError,
};
use rowswap::montecarlo::{mc_attack_time, mc_sweep, par_indexed, McError, McMode, McPoint};
use rowswap::params::ConfigError;
use rowswap::report::{self, human, LineChart};
use rowswap::rng::derive_seed;
use rowswap::{AttackPlan, Config, DefenseConfig, DefenseKind, Strategy, TimingParams};

use crate::args::{
    AccountingArg, AnalyzeArgs, AttackArg, Command, DefenseArg, McModeArg, ModelArgs, MontecarloArgs, SimulateArgs,
    StorageArgs, TimingPreset,
};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Validation(String),
    Internal(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Internal(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Validation(m) | CliError::Internal(m) => f.write_str(m),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<AnalyticError> for CliError {
    fn from(e: AnalyticError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<McError> for CliError {
    fn from(e: McError) -> Self {
        match e {
            McError::NoIterations => CliError::Usage(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<TraceError> for CliError {
    fn from(e: TraceError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::Invalid(m) => CliError::Validation(m),
            other => CliError::Internal(other.to_string()),
        }
    }
}

/// Files a command produced, in write order. The first is the primary
/// table printed to stdout when no output directory is given.
pub struct Outputs {
    pub files: Vec<(String, String)>,
}

impl Outputs {
    fn new() -> Self {
        Self { files: Vec::new() }
    }

    fn add(&mut self, name: &str, body: String) {
        self.files.push((name.to_string(), body));
    }
}

fn preset(timing: Option<TimingPreset>, ddr5: bool) -> Option<TimingParams> {
    match (timing, ddr5) {
        (_, true) | (Some(TimingPreset::Ddr5), _) => Some(TimingParams::ddr5()),
        (Some(TimingPreset::Ddr4), _) => Some(TimingParams::ddr4()),
        (Some(TimingPreset::Toy), _) => Some(TimingParams::toy()),
        (None, false) => None,
    }
}

fn kind_of(d: DefenseArg) -> DefenseKind {
    match d {
        DefenseArg::None => DefenseKind::None,
        DefenseArg::Rrs => DefenseKind::Rrs,
        DefenseArg::Srs => DefenseKind::Srs,
        DefenseArg::ScaleSrs => DefenseKind::ScaleSrs,
    }
}

/// Applies flags on top of `base`. Defense fields are rebuilt only when a
/// defense flag is present, so a configuration file's finer settings
/// survive otherwise.
pub fn resolve(base: &Config, m: &ModelArgs) -> Result<Config, CliError> {
    let mut cfg = *base;
    if let Some(t) = preset(m.timing, m.ddr5) {
        cfg.timing = t;
    }
    if let Some(rows) = m.rows {
        cfg.geometry.rows_per_bank = rows;
    }
    if m.defense.is_some() || m.trh.is_some() || m.swap_rate.is_some() || m.ts.is_some() {
        let kind = m.defense.map(kind_of).unwrap_or(base.defense.kind);
        let t_rh = m.trh.unwrap_or(base.defense.t_rh);
        let mut d = match m.ts {
            Some(ts) => DefenseConfig::new(kind, t_rh, ts)?,
            None => DefenseConfig::with_swap_rate(kind, t_rh, m.swap_rate.unwrap_or(base.defense.swap_rate()))?,
        };
        d.latent_per_reswap = base.defense.latent_per_reswap;
        d.rit_overprovision = base.defense.rit_overprovision;
        cfg.defense = d;
    }
    if let Some(l) = m.latent {
        cfg.defense.latent_per_reswap = l;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn strategy(attack: Option<AttackArg>, base: Strategy) -> Result<Strategy, CliError> {
    match attack {
        None => Ok(base),
        Some(AttackArg::Juggernaut) => Ok(Strategy::JuggernautBias),
        Some(AttackArg::Random) => Ok(Strategy::RandomGuessOnly),
        Some(AttackArg::LatentOnly) => Ok(Strategy::LatentOnly),
        Some(AttackArg::Uniform) => Err(CliError::Usage("--attack uniform is only meaningful for simulate".into())),
    }
}

/// Seconds in the largest unit that keeps the number readable.
fn attack_kind_guard(cfg: &Config, op: &str) -> Result<(), CliError> {
    match cfg.defense.kind {
        DefenseKind::Rrs | DefenseKind::Srs => Ok(()),
        k => Err(CliError::Validation(format!("{op} models rrs and srs, not `{k}`"))),
    }
}

pub fn analyze(base: &Config, a: &AnalyzeArgs) -> Result<Outputs, CliError> {
    let cfg = resolve(base, &a.model)?;
    let (t, g, d) = (&cfg.timing, &cfg.geometry, &cfg.defense);
    let mut out = Outputs::new();
    if d.kind == DefenseKind::ScaleSrs {
        if a.rounds.is_some() || a.sweep_rounds.is_some() {
            return Err(CliError::Usage("scale-srs analysis is the outlier table; use --outliers K,M".into()));
        }
        let (k, m_max) = a.outliers.unwrap_or((u64::from(d.outlier_swap_limit), 4));
        let acct = match a.accounting {
            AccountingArg::SwapLatency => GuessAccounting::SwapLatency,
            AccountingArg::ActivationBudget => GuessAccounting::ActivationBudget,
        };
        let rows = (1..=m_max).map(|m| outlier_time_with(t, g, d, k, m, acct)).collect::<Result<Vec<_>, _>>()?;
        for o in &rows {
            eprintln!("{} rows with ≥{} swaps: every {}", o.m, o.k_swaps, human(o.time_to_appear));
        }
        out.add("outliers.csv", report::outliers_csv(&rows));
        return Ok(out);
    }
    if a.outliers.is_some() {
        return Err(CliError::Validation(format!("--outliers needs scale-srs, not `{}`", d.kind)));
    }
    attack_kind_guard(&cfg, "analyze")?;
    let strat = strategy(a.attack, cfg.plan.strategy)?;
    if let Some(max) = a.sweep_rounds {
        if strat != Strategy::JuggernautBias {
            return Err(CliError::Usage("--sweep-rounds applies to the juggernaut attack".into()));
        }
        let sweep = sweep_rounds(t, g, d, max)?;
        match sweep.argmin() {
            Some(best) => eprintln!(
                "minimum attack time {} at N={} (k={}, G={}, p={:e})",
                human(best.at_time),
                best.rounds,
                best.k,
                best.guesses,
                best.p_success
            ),
            None => eprintln!("no feasible N in 0..={max}"),
        }
        if let Some(limit) = sweep.feasibility_limit() {
            eprintln!("feasible up to N={limit}");
        }
        let pts: Vec<(f64, f64)> = sweep.feasible().map(|x| (x.rounds as f64, x.at_time)).collect();
        let title = format!("{} T_RH={} T_S={}", d.kind, d.t_rh, d.t_s);
        out.add("analyze.csv", report::analyze_csv(&sweep.points));
        out.add("analyze.svg", report::attack_time_chart(&title, &[("closed form".into(), pts)]));
    } else {
        let plan = AttackPlan::new(strat, a.rounds.unwrap_or(cfg.plan.rounds));
        let r = juggernaut(t, g, d, &plan);
        let n = match &r {
            Ok(x) => x.rounds,
            Err(_) => plan.rounds,
        };
        match &r {
            Ok(x) if x.deterministic => eprintln!("N={}: breaks in the first epoch", x.rounds),
            Ok(x) => eprintln!("N={}: k={}, G={}, attack time {}", x.rounds, x.k, x.guesses, human(x.at_time)),
            Err(AnalyticError::Infeasible { .. }) => eprintln!("N={n}: infeasible"),
            Err(e) => return Err(e.clone().into()),
        }
        out.add("analyze.csv", report::analyze_csv(&[(n, r)]));
    }
    Ok(out)
}

pub fn montecarlo(base: &Config, a: &MontecarloArgs, jobs: usize) -> Result<Outputs, CliError> {
    let cfg = resolve(base, &a.model)?;
    attack_kind_guard(&cfg, "montecarlo")?;
    let (t, g, d) = (&cfg.timing, &cfg.geometry, &cfg.defense);
    let ns: Vec<u64> = match a.rounds {
        Some(n) => vec![n],
        None => (0..=a.sweep_rounds.unwrap_or(1500)).step_by(a.stride as usize).collect(),
    };
    let points: Vec<McPoint> = match a.mode {
        McModeArg::Geometric => mc_sweep(t, g, d, &ns, a.iterations, a.seed, jobs)?,
        McModeArg::Binomial => {
            let mut pts = Vec::new();
            for &n in &ns {
                let Ok(an) = juggernaut(t, g, d, &AttackPlan::juggernaut(n)) else { continue };
                let mut run = mc_attack_time(&an, a.iterations, derive_seed(a.seed, &[n]), McMode::BinomialDraw, jobs)?;
                run.master_seed = a.seed;
                pts.push(McPoint { n, analytic: an, run });
            }
            pts
        }
    };
    if points.is_empty() {
        return Err(CliError::Validation("no feasible N to sample".into()));
    }
    let worst = points
        .iter()
        .filter(|p| p.analytic.p_success >= 1e-8)
        .map(|p| ((p.run.mean_s - p.analytic.at_time).abs() / p.analytic.at_time, p.n))
        .fold((0.0, 0), |acc, x| if x.0 > acc.0 { x } else { acc });
    eprintln!(
        "{} points, {} iterations each; largest deviation from the closed form {:.3}% at N={}",
        points.len(),
        a.iterations,
        100.0 * worst.0,
        worst.1
    );
    let analytic: Vec<(f64, f64)> = points.iter().map(|p| (p.n as f64, p.analytic.at_time)).collect();
    let mean: Vec<(f64, f64)> = points.iter().map(|p| (p.n as f64, p.run.mean_s)).collect();
    let p90: Vec<(f64, f64)> = points.iter().map(|p| (p.n as f64, p.run.p90_s)).collect();
    let svg = LineChart::new(format!("{} T_RH={} T_S={}", d.kind, d.t_rh, d.t_s), "rounds N", "attack time (s)")
        .series("closed form", analytic)
        .series("sampled mean", mean)
        .series("sampled p90", p90)
        .marker(3600.0, "1 hour")
        .marker(86_400.0, "1 day")
        .marker(SECONDS_PER_YEAR, "1 year")
        .render();
    let mut out = Outputs::new();
    out.add("montecarlo.csv", report::montecarlo_csv(&points));
    out.add("montecarlo.svg", svg);
    Ok(out)
}

struct RunResult {
    seed: u64,
    reports: Vec<EpochReport>,
    first_breach: Option<u64>,
}

pub fn simulate(base: &Config, a: &SimulateArgs, jobs: usize) -> Result<Outputs, CliError> {
    let cfg = resolve(base, &a.model)?;
    let (t, g, d) = (cfg.timing, cfg.geometry, cfg.defense);
    let rows = g.rows_per_bank;
    let trace = match &a.trace {
        Some(p) => Some(load_trace(p, rows)?),
        None => None,
    };
    let uniform = a.attack == Some(AttackArg::Uniform);
    let strat = if uniform { Strategy::JuggernautBias } else { strategy(a.attack, cfg.plan.strategy)? };
    let plan = AttackPlan::new(strat, a.rounds.unwrap_or(cfg.plan.rounds));
    let opts = BankOptions { pin_capacity: a.pin_capacity, ..Default::default() };
    let program = |seed: u64| match (&trace, uniform) {
        (Some(rows), _) => Program::Stream(rows.clone()),
        (None, true) => Program::Uniform,
        (None, false) => program_for(&d, &plan, rows, seed),
    };
    let run = |i: u64| -> Result<RunResult, EngineError> {
        let seed = derive_seed(a.seed, &[i]);
        let mut reports = Vec::new();
        let mut first_breach = None;
        let mut bank = a.persist.then(|| Bank::new(&d, &t, &g, seed, opts));
        for e in 0..a.epochs {
            let es = derive_seed(seed, &[e]);
            let r = match bank.as_mut() {
                Some(b) => drive(b, &program(es), d.t_s, es)?,
                None => drive(&mut Bank::new(&d, &t, &g, es, opts), &program(es), d.t_s, es)?,
            };
            let breached = r.breached;
            reports.push(r);
            if breached && first_breach.is_none() {
                first_breach = Some(e + 1);
                if a.until_breach {
                    break;
                }
            }
        }
        Ok(RunResult { seed, reports, first_breach })
    };
    let runs = par_indexed(a.seeds, jobs, run).into_iter().collect::<Result<Vec<_>, _>>()?;

    let mut breaches = String::from("seed,epochs_run,breached,first_breach_epoch\n");
    for r in &runs {
        breaches.push_str(&format!(
            "{},{},{},{}\n",
            r.seed,
            r.reports.len(),
            r.first_breach.is_some(),
            r.first_breach.map(|e| e.to_string()).unwrap_or_default()
        ));
    }
    let hits: Vec<u64> = runs.iter().filter_map(|r| r.first_breach).collect();
    eprintln!("{} of {} runs breached", hits.len(), runs.len());
    if !hits.is_empty() {
        eprintln!("mean epochs to first breach {:.3}", hits.iter().sum::<u64>() as f64 / hits.len() as f64);
    }
    if trace.is_none() && !uniform && matches!(d.kind, DefenseKind::Rrs | DefenseKind::Srs) {
        match juggernaut(&t, &g, &d, &plan) {
            Ok(x) => eprintln!("closed form: {:.3} epochs", x.at_iter),
            Err(e) => eprintln!("closed form: {e}"),
        }
    }
    let all: Vec<EpochReport> = runs.iter().flat_map(|r| r.reports.iter().cloned()).collect();
    let o = overhead_metrics(&all, &t)?;
    eprintln!(
        "mitigation time {:.4}% of the activation window ({} swaps, {} unswap-swaps, {} pins)",
        100.0 * o.mitigation_fraction,
        o.swaps,
        o.unswap_swaps,
        o.pins
    );
    let table: Vec<(u64, Vec<EpochReport>)> = runs.into_iter().map(|r| (r.seed, r.reports)).collect();
    let mut out = Outputs::new();
    out.add("simulate.csv", report::simulate_csv(&table));
    out.add("breaches.csv", breaches);
    Ok(out)
}

pub fn storage(base: &Config, a: &StorageArgs) -> Result<Outputs, CliError> {
    let timing = preset(a.timing, a.ddr5).unwrap_or(base.timing);
    let t_rh = a.trh.unwrap_or(base.defense.t_rh);
    let (rrs, scale) = storage_comparison(&timing, t_rh)?;
    eprintln!(
        "T_RH={t_rh}: RRS {} B, Scale-SRS {} B, ratio {:.3}",
        rrs.total_bytes(),
        scale.total_bytes(),
        rrs.total_bits() as f64 / scale.total_bits() as f64
    );
    let mut out = Outputs::new();
    out.add("storage.csv", report::storage_csv(&rrs, &scale));
    Ok(out)
}

pub fn dispatch(base: &Config, cmd: &Command, jobs: usize) -> Result<Outputs, CliError> {
    match cmd {
        Command::Analyze(a) => analyze(base, a),
        Command::Montecarlo(a) => montecarlo(base, a, jobs),
        Command::Simulate(a) => simulate(base, a, jobs),
        Command::Storage(a) => storage(base, a),
    }
}

pub fn write_outputs(dir: &Path, outputs: &Outputs) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Internal(format!("cannot create {}: {e}", dir.display())))?;
    for (name, body) in &outputs.files {
        let path = dir.join(name);
        std::fs::write(&path, body).map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}
