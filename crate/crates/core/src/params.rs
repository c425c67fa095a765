//! Configuration: DRAM timing and geometry, defense selection, attack plans.
//!
//! Configurations load from a flat `key = value` text format:
//!
//! ```text
//! # DDR4 bank under RRS at T_RH = 4800
//! epoch    = 64ms
//! t_rc     = 45ns
//! defense  = rrs
//! t_rh     = 4800
//! t_s      = 800
//! ```
//!
//! Durations take an `ns`, `us`, `ms` or `s` suffix (bare numbers are
//! nanoseconds). Every key is optional; omitted keys fall back to the DDR4
//! baseline returned by [`Config::default`].

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use thiserror::Error;

/// Environment variable that may name a default configuration file.
pub const CONFIG_ENV: &str = "ROWSWAP_CONFIG";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

/// DRAM timing constants that enter the attack-time equations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimingParams {
    /// Row cycle time: minimum spacing between two activations to one bank.
    pub t_rc: Duration,
    /// Duration of one refresh operation.
    pub t_rfc: Duration,
    pub refresh_ops_per_epoch: u32,
    /// Refresh window; activation counts accumulate over one epoch.
    pub epoch: Duration,
    /// Latency of an initial swap (includes evicting a stale RIT entry).
    pub t_swap: Duration,
    /// Latency of an unswap followed by a swap.
    pub t_reswap: Duration,
}

impl TimingParams {
    pub fn ddr4() -> Self {
        Self {
            t_rc: Duration::from_nanos(45),
            t_rfc: Duration::from_nanos(350),
            refresh_ops_per_epoch: 8192,
            epoch: Duration::from_millis(64),
            t_swap: Duration::from_nanos(2_700),
            t_reswap: Duration::from_nanos(5_400),
        }
    }

    /// DDR5 refreshes twice as often: the epoch and the refresh count per
    /// epoch are halved, everything else is DDR4.
    pub fn ddr5() -> Self {
        let base = Self::ddr4();
        Self { epoch: base.epoch / 2, refresh_ops_per_epoch: base.refresh_ops_per_epoch / 2, ..base }
    }

    /// Scaled-down epoch for toy banks (tens of rows). DDR4 latencies are
    /// kept; the 29.5us epoch leaves room for a handful of random guesses
    /// after a short biasing phase, so breaches take tens of epochs instead
    /// of never happening or happening every epoch.
    pub fn toy() -> Self {
        Self { refresh_ops_per_epoch: 8, epoch: Duration::from_nanos(29_500), ..Self::ddr4() }
    }

    /// Time left for activations once refresh is paid for.
    pub fn t_actual(&self) -> Duration {
        self.epoch - self.refresh_time()
    }

    pub fn refresh_time(&self) -> Duration {
        self.t_rfc * self.refresh_ops_per_epoch
    }

    /// Maximum activations one bank can issue per epoch.
    pub fn act_max(&self) -> u64 {
        (self.t_actual().as_nanos() / self.t_rc.as_nanos()) as u64
    }

    /// Length of one swap-tracking counter epoch (half a refresh window).
    pub fn counter_epoch(&self) -> Duration {
        self.epoch / 2
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        for (name, d) in [
            ("t_rc", self.t_rc),
            ("t_rfc", self.t_rfc),
            ("epoch", self.epoch),
            ("t_swap", self.t_swap),
            ("t_reswap", self.t_reswap),
        ] {
            if d.is_zero() {
                return Err(invalid(format!("{name} > 0")));
            }
        }
        if self.t_reswap < self.t_swap {
            return Err(invalid("t_reswap ≥ t_swap"));
        }
        if self.epoch <= self.refresh_time() {
            return Err(invalid("epoch > refresh_ops × t_rfc"));
        }
        Ok(())
    }
}

impl Default for TimingParams {
    fn default() -> Self {
        Self::ddr4()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DramGeometry {
    pub rows_per_bank: u32,
    pub banks: u32,
    pub row_size_bytes: u32,
    pub channels: u32,
}

impl DramGeometry {
    /// 16 banks x 2 channels of 128K rows, 8KB each.
    pub fn ddr4() -> Self {
        Self { rows_per_bank: 128 * 1024, banks: 16, row_size_bytes: 8 * 1024, channels: 2 }
    }

    /// Single toy bank with `rows` rows.
    pub fn toy(rows: u32) -> Self {
        Self { rows_per_bank: rows, banks: 1, channels: 1, ..Self::ddr4() }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.rows_per_bank < 2 {
            return Err(invalid("rows_per_bank ≥ 2"));
        }
        if self.banks == 0 || self.row_size_bytes == 0 || self.channels == 0 {
            return Err(invalid("banks, row_size_bytes and channels ≥ 1"));
        }
        Ok(())
    }
}

impl Default for DramGeometry {
    fn default() -> Self {
        Self::ddr4()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DefenseKind {
    None,
    Rrs,
    Srs,
    ScaleSrs,
}

impl DefenseKind {
    pub fn name(self) -> &'static str {
        match self {
            DefenseKind::None => "none",
            DefenseKind::Rrs => "rrs",
            DefenseKind::Srs => "srs",
            DefenseKind::ScaleSrs => "scale-srs",
        }
    }
}

impl fmt::Display for DefenseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DefenseKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(DefenseKind::None),
            "rrs" => Ok(DefenseKind::Rrs),
            "srs" => Ok(DefenseKind::Srs),
            "scale-srs" | "scalesrs" | "scale_srs" => Ok(DefenseKind::ScaleSrs),
            other => Err(format!("unknown defense `{other}`")),
        }
    }
}

/// RIT entry width used by the storage calculator when none is configured.
/// These are calibration constants: the tuple width reproduces the RRS RIT
/// at T_RH = 1200 (≈250KB) and the mirrored width the Scale-SRS RIT at the
/// same threshold (≈67.5KB), both at 2x over-provisioning.
pub const DEFAULT_TUPLE_ENTRY_BITS: u32 = 75;
pub const DEFAULT_MIRRORED_ENTRY_BITS: u32 = 41;

/// Pin-buffer entries provisioned per bank: 66 rows at T_RH ≥ 4800 and 96
/// below, following the reserved-row counts for swap rate 3.
pub fn default_pin_entries(t_rh: u32) -> u32 {
    if t_rh >= 4800 {
        66
    } else {
        96
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DefenseConfig {
    pub kind: DefenseKind,
    /// Row Hammer threshold: activations within one epoch that flip bits.
    pub t_rh: u32,
    /// Swap threshold: tracked activations that trigger a mitigation.
    pub t_s: u32,
    /// Expected latent activations per unswap-swap round.
    pub latent_per_reswap: f64,
    /// Scale-SRS: swaps a location tolerates before it is pinned.
    pub outlier_swap_limit: u32,
    /// Over-provisioning factor of the collision-avoidance RIT.
    pub rit_overprovision: f64,
    /// RIT entry width in bits (storage calibration).
    pub rit_entry_bits: u32,
    /// Pin-buffer capacity (Scale-SRS).
    pub pin_entries: u32,
}

impl DefenseConfig {
    /// Builds a configuration with defaults for every calibration input.
    /// Fails unless `t_rh` is a multiple of `t_s`.
    pub fn new(kind: DefenseKind, t_rh: u32, t_s: u32) -> Result<Self, ConfigError> {
        if t_s == 0 {
            return Err(invalid("t_s ≥ 1"));
        }
        let cfg = Self {
            kind,
            t_rh,
            t_s,
            latent_per_reswap: 1.5,
            outlier_swap_limit: (t_rh / t_s).max(1),
            rit_overprovision: 2.0,
            rit_entry_bits: match kind {
                DefenseKind::Rrs => DEFAULT_TUPLE_ENTRY_BITS,
                _ => DEFAULT_MIRRORED_ENTRY_BITS,
            },
            pin_entries: default_pin_entries(t_rh),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Configuration from a threshold and a swap rate (`t_s = t_rh / rate`).
    pub fn with_swap_rate(kind: DefenseKind, t_rh: u32, swap_rate: u32) -> Result<Self, ConfigError> {
        if swap_rate < 2 {
            return Err(invalid("swap_rate ≥ 2"));
        }
        if !t_rh.is_multiple_of(swap_rate) {
            return Err(invalid(format!("t_rh must be a multiple of the swap rate ({t_rh} % {swap_rate} ≠ 0)")));
        }
        Self::new(kind, t_rh, t_rh / swap_rate)
    }

    pub fn swap_rate(&self) -> u32 {
        self.t_rh / self.t_s
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.t_s == 0 {
            return Err(invalid("t_s ≥ 1"));
        }
        if self.t_rh <= self.t_s {
            return Err(invalid("t_rh > t_s"));
        }
        if !self.t_rh.is_multiple_of(self.t_s) {
            return Err(invalid("t_rh must be a multiple of t_s"));
        }
        if self.swap_rate() < 2 {
            return Err(invalid("swap_rate ≥ 2"));
        }
        if !(1.0..=2.0).contains(&self.latent_per_reswap) {
            return Err(invalid("1.0 ≤ latent_per_reswap ≤ 2.0"));
        }
        if self.kind == DefenseKind::ScaleSrs && self.outlier_swap_limit != self.swap_rate() {
            return Err(invalid("scale-srs outlier_swap_limit = swap_rate"));
        }
        if self.rit_overprovision.is_nan() || self.rit_overprovision < 1.0 {
            return Err(invalid("rit_overprovision ≥ 1"));
        }
        if self.rit_entry_bits == 0 {
            return Err(invalid("rit_entry_bits ≥ 1"));
        }
        Ok(())
    }

    /// Most swaps one bank can perform per epoch: `floor(ACT_max / T_S)`.
    pub fn max_swaps_per_epoch(&self, timing: &TimingParams) -> u64 {
        timing.act_max() / u64::from(self.t_s)
    }

    /// RIT capacity in entries: over-provisioning × 2 × max swaps.
    pub fn rit_capacity(&self, timing: &TimingParams) -> usize {
        let entries = 2 * self.max_swaps_per_epoch(timing);
        (entries as f64 * self.rit_overprovision).ceil() as usize
    }
}

impl Default for DefenseConfig {
    fn default() -> Self {
        Self::new(DefenseKind::Rrs, 4800, 800).expect("baseline defense is valid")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Latent-activation biasing rounds followed by random guesses.
    JuggernautBias,
    /// Random guesses only.
    RandomGuessOnly,
    /// Unswap-swap rounds until the latent activations alone reach T_RH.
    LatentOnly,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::JuggernautBias => "juggernaut",
            Strategy::RandomGuessOnly => "random",
            Strategy::LatentOnly => "latent-only",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "juggernaut" | "juggernaut-bias" => Ok(Strategy::JuggernautBias),
            "random" | "random-guess" => Ok(Strategy::RandomGuessOnly),
            "latent-only" | "latent" => Ok(Strategy::LatentOnly),
            other => Err(format!("unknown attack strategy `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AttackPlan {
    /// Unswap-swap biasing rounds (N).
    pub rounds: u64,
    pub strategy: Strategy,
}

impl AttackPlan {
    /// Random-guess plans carry no biasing rounds; `rounds` is dropped.
    pub fn new(strategy: Strategy, rounds: u64) -> Self {
        let rounds = match strategy {
            Strategy::RandomGuessOnly => 0,
            _ => rounds,
        };
        Self { rounds, strategy }
    }

    pub fn juggernaut(rounds: u64) -> Self {
        Self::new(Strategy::JuggernautBias, rounds)
    }
}

impl Default for AttackPlan {
    fn default() -> Self {
        Self::juggernaut(1100)
    }
}

/// Everything a model run needs.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Config {
    pub timing: TimingParams,
    pub geometry: DramGeometry,
    pub defense: DefenseConfig,
    pub plan: AttackPlan,
}

impl Config {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text =
            std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        text.parse()
    }

    /// Loads the file named by `ROWSWAP_CONFIG`, or the defaults when unset.
    pub fn from_env() -> Result<Self, ConfigError> {
        match std::env::var_os(CONFIG_ENV) {
            Some(path) if !path.is_empty() => Self::load(path),
            _ => Ok(Self::default()),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.timing.validate()?;
        self.geometry.validate()?;
        self.defense.validate()
    }

    /// Renders the configuration in the file format accepted by [`Config::load`].
    pub fn to_config_string(&self) -> String {
        let t = &self.timing;
        let g = &self.geometry;
        let d = &self.defense;
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            out.push_str(&format!("{k} = {v}\n"));
        };
        kv("t_rc", format_duration(t.t_rc));
        kv("t_rfc", format_duration(t.t_rfc));
        kv("refresh_ops", t.refresh_ops_per_epoch.to_string());
        kv("epoch", format_duration(t.epoch));
        kv("t_swap", format_duration(t.t_swap));
        kv("t_reswap", format_duration(t.t_reswap));
        kv("rows_per_bank", g.rows_per_bank.to_string());
        kv("banks", g.banks.to_string());
        kv("row_size_bytes", g.row_size_bytes.to_string());
        kv("channels", g.channels.to_string());
        kv("defense", d.kind.to_string());
        kv("t_rh", d.t_rh.to_string());
        kv("t_s", d.t_s.to_string());
        kv("latent_per_reswap", format!("{:?}", d.latent_per_reswap));
        kv("outlier_swap_limit", d.outlier_swap_limit.to_string());
        kv("rit_overprovision", format!("{:?}", d.rit_overprovision));
        kv("rit_entry_bits", d.rit_entry_bits.to_string());
        kv("pin_entries", d.pin_entries.to_string());
        kv("rounds", self.plan.rounds.to_string());
        kv("strategy", self.plan.strategy.to_string());
        out
    }
}

impl FromStr for Config {
    type Err = ConfigError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut cfg = Config::default();
        // Defense-derived defaults depend on kind/t_rh/t_s, so collect the
        // overrides first and resolve them once every line is read.
        let mut kind = cfg.defense.kind;
        let mut t_rh = cfg.defense.t_rh;
        let mut t_s: Option<u32> = None;
        let mut swap_rate: Option<u32> = None;
        let mut latent = None;
        let mut outlier_limit = None;
        let mut overprovision = None;
        let mut entry_bits = None;
        let mut pin_entries = None;
        let mut rounds = cfg.plan.rounds;
        let mut strategy = cfg.plan.strategy;

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Parse {
                line: line_no,
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            let key = key.trim();
            let value = value.trim();
            let perr = |message: String| ConfigError::Parse { line: line_no, message };
            let dur = || parse_duration(value).map_err(|m| perr(format!("{key}: {m}")));
            let int = || {
                value
                    .replace('_', "")
                    .parse::<u64>()
                    .map_err(|_| perr(format!("{key}: expected an integer, got `{value}`")))
            };
            let int32 = || {
                int().and_then(|v| u32::try_from(v).map_err(|_| perr(format!("{key}: {v} does not fit in 32 bits"))))
            };
            let real = || value.parse::<f64>().map_err(|_| perr(format!("{key}: expected a number, got `{value}`")));
            match key {
                "t_rc" => cfg.timing.t_rc = dur()?,
                "t_rfc" => cfg.timing.t_rfc = dur()?,
                "refresh_ops" | "refresh_ops_per_epoch" => cfg.timing.refresh_ops_per_epoch = int32()?,
                "epoch" | "t_refw" => cfg.timing.epoch = dur()?,
                "t_swap" => cfg.timing.t_swap = dur()?,
                "t_reswap" => cfg.timing.t_reswap = dur()?,
                "rows_per_bank" | "rows" => cfg.geometry.rows_per_bank = int32()?,
                "banks" => cfg.geometry.banks = int32()?,
                "row_size_bytes" | "row_size" => cfg.geometry.row_size_bytes = int32()?,
                "channels" => cfg.geometry.channels = int32()?,
                "defense" => kind = value.parse().map_err(perr)?,
                "t_rh" => t_rh = int32()?,
                "t_s" => t_s = Some(int32()?),
                "swap_rate" => swap_rate = Some(int32()?),
                "latent_per_reswap" => latent = Some(real()?),
                "outlier_swap_limit" => outlier_limit = Some(int32()?),
                "rit_overprovision" => overprovision = Some(real()?),
                "rit_entry_bits" => entry_bits = Some(int32()?),
                "pin_entries" => pin_entries = Some(int32()?),
                "rounds" => rounds = int()?,
                "strategy" => strategy = value.parse().map_err(perr)?,
                other => return Err(perr(format!("unknown key `{other}`"))),
            }
        }

        let t_s = match (t_s, swap_rate) {
            (Some(t_s), Some(rate)) if t_s.checked_mul(rate) != Some(t_rh) => {
                return Err(invalid("swap_rate × t_s = t_rh"));
            }
            (Some(t_s), _) => t_s,
            (None, Some(rate)) => {
                if rate == 0 || t_rh % rate != 0 {
                    return Err(invalid("t_rh must be a multiple of the swap rate"));
                }
                t_rh / rate
            }
            (None, None) => t_rh / 6,
        };
        let mut defense = DefenseConfig::new(kind, t_rh, t_s)?;
        if let Some(v) = latent {
            defense.latent_per_reswap = v;
        }
        if let Some(v) = outlier_limit {
            defense.outlier_swap_limit = v;
        }
        if let Some(v) = overprovision {
            defense.rit_overprovision = v;
        }
        if let Some(v) = entry_bits {
            defense.rit_entry_bits = v;
        }
        if let Some(v) = pin_entries {
            defense.pin_entries = v;
        }
        cfg.defense = defense;
        cfg.plan = AttackPlan::new(strategy, rounds);
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Parses `45ns`, `2.7us`, `64ms`, `1s`; bare numbers are nanoseconds.
pub fn parse_duration(text: &str) -> Result<Duration, String> {
    let text = text.trim();
    let split = text.find(|c: char| c.is_ascii_alphabetic() || c == 'µ').unwrap_or(text.len());
    let (num, unit) = text.split_at(split);
    let scale = match unit.trim() {
        "" | "ns" => 1.0,
        "us" | "µs" => 1e3,
        "ms" => 1e6,
        "s" => 1e9,
        other => return Err(format!("unknown duration unit `{other}`")),
    };
    let value: f64 = num.trim().parse().map_err(|_| format!("expected a duration, got `{text}`"))?;
    if !value.is_finite() || value < 0.0 {
        return Err(format!("duration must be non-negative, got `{text}`"));
    }
    Ok(Duration::from_nanos((value * scale).round() as u64))
}

/// Formats with the coarsest unit that represents `d` exactly.
pub fn format_duration(d: Duration) -> String {
    let ns = d.as_nanos();
    if ns != 0 && ns.is_multiple_of(1_000_000_000) {
        format!("{}s", ns / 1_000_000_000)
    } else if ns != 0 && ns.is_multiple_of(1_000_000) {
        format!("{}ms", ns / 1_000_000)
    } else if ns != 0 && ns.is_multiple_of(1_000) {
        format!("{}us", ns / 1_000)
    } else {
        format!("{ns}ns")
    }
}
