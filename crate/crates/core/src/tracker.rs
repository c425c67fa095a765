//! Aggressor tracking: a Misra-Gries heavy-hitter tracker for RRS and SRS,
//! and the in-DRAM per-row swap counters used by Scale-SRS.

use std::collections::HashMap;

use crate::RowId;

/// What happens to a row's tracked count once it triggers a mitigation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TriggerReset {
    /// Count drops to zero.
    #[default]
    Reset,
    /// Count drops by T_S.
    Subtract,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MitigationTrigger {
    pub row: RowId,
    /// Tracked count at the moment of the trigger.
    pub count: u32,
}

/// Misra-Gries summary with a swap threshold.
///
/// A tracked count never exceeds the true count and never falls short of
/// it by more than [`spill`](Self::spill), the number of decrement-all
/// rounds so far.
#[derive(Debug, Clone)]
pub struct MisraGriesTracker {
    entries: HashMap<RowId, u32>,
    capacity: usize,
    t_s: u32,
    mode: TriggerReset,
    spill: u64,
}

impl MisraGriesTracker {
    pub fn new(capacity: usize, t_s: u32, mode: TriggerReset) -> Self {
        assert!(capacity >= 1 && t_s >= 1);
        Self { entries: HashMap::with_capacity(capacity), capacity, t_s, mode, spill: 0 }
    }

    /// Capacity `2·ceil(ACT_max / T_S)`.
    pub fn default_capacity(act_max: u64, t_s: u32) -> usize {
        (2 * act_max.div_ceil(u64::from(t_s))) as usize
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn spill(&self) -> u64 {
        self.spill
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn count(&self, row: RowId) -> u32 {
        self.entries.get(&row).copied().unwrap_or(0)
    }

    /// Whether the next `observe(row)` would trigger.
    pub fn would_trigger(&self, row: RowId) -> bool {
        match self.entries.get(&row) {
            Some(&c) => c + 1 >= self.t_s,
            None => self.t_s == 1 && self.entries.len() < self.capacity,
        }
    }

    pub fn observe(&mut self, row: RowId) -> Option<MitigationTrigger> {
        if let Some(c) = self.entries.get_mut(&row) {
            *c += 1;
        } else if self.entries.len() < self.capacity {
            self.entries.insert(row, 1);
        } else {
            self.spill += 1;
            self.entries.retain(|_, c| {
                *c -= 1;
                *c > 0
            });
            return None;
        }
        let c = self.entries.get_mut(&row).expect("row just counted");
        if *c < self.t_s {
            return None;
        }
        let count = *c;
        match self.mode {
            TriggerReset::Reset => {
                self.entries.remove(&row);
            }
            TriggerReset::Subtract => {
                *c -= self.t_s;
                if *c == 0 {
                    self.entries.remove(&row);
                }
            }
        }
        Some(MitigationTrigger { row, count })
    }

    /// Forgets everything; called at the tracker's own reset boundary.
    pub fn reset(&mut self) {
        self.entries.clear();
        self.spill = 0;
    }

    /// `row,count` lines sorted by row.
    pub fn dump_csv(&self) -> String {
        let mut rows: Vec<_> = self.entries.iter().collect();
        rows.sort();
        let mut out = String::from("row,count\n");
        for (r, c) in rows {
            out.push_str(&format!("{r},{c}\n"));
        }
        out
    }
}

pub const EPOCH_BITS: u32 = 19;
pub const ACT_BITS: u32 = 13;
const EPOCH_MASK: u32 = (1 << EPOCH_BITS) - 1;
const ACT_MASK: u32 = (1 << ACT_BITS) - 1;
/// Largest representable per-row activation count.
pub const ACT_SATURATION: u32 = ACT_MASK;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SwapRecord {
    /// Activations accumulated by the row this epoch, saturating.
    pub total: u32,
    /// DRAM row holding the counter; reading and writing it costs one ACT.
    pub counter_row: RowId,
}

/// The counter-row sweep issued when the epoch register wraps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FullResetEvent {
    pub counter_row_acts: u32,
}

/// Per-row 32-bit swap counters (19-bit epoch id, 13-bit count) held in
/// reserved DRAM rows, and the on-chip epoch register.
#[derive(Debug, Clone)]
pub struct SwapCounterStore {
    counters: Vec<u32>,
    epoch_register: u32,
    counters_per_row: u32,
    counter_row_acts: Vec<u64>,
}

impl SwapCounterStore {
    pub fn new(rows: u32, row_size_bytes: u32) -> Self {
        let counters_per_row = (row_size_bytes / 4).max(1);
        Self {
            counters: vec![0; rows as usize],
            epoch_register: 0,
            counters_per_row,
            counter_row_acts: vec![0; rows.div_ceil(counters_per_row) as usize],
        }
    }

    pub fn epoch_register(&self) -> u32 {
        self.epoch_register
    }

    pub fn counter_rows(&self) -> u32 {
        self.counter_row_acts.len() as u32
    }

    /// Activations charged to each counter row so far.
    pub fn counter_row_acts(&self) -> &[u64] {
        &self.counter_row_acts
    }

    fn counter_row(&self, row: RowId) -> RowId {
        row / self.counters_per_row
    }

    /// Current count for `row`; stale epochs read as zero.
    pub fn read(&self, row: RowId) -> u32 {
        let raw = self.counters[row as usize];
        if raw >> ACT_BITS == self.epoch_register {
            raw & ACT_MASK
        } else {
            0
        }
    }

    /// Adds `acts_at_swap` to the row's counter ahead of a swap.
    pub fn record_swap(&mut self, row: RowId, acts_at_swap: u32) -> SwapRecord {
        let total = self.read(row).saturating_add(acts_at_swap).min(ACT_SATURATION);
        self.counters[row as usize] = (self.epoch_register << ACT_BITS) | total;
        let counter_row = self.counter_row(row);
        self.counter_row_acts[counter_row as usize] += 1;
        SwapRecord { total, counter_row }
    }

    /// Advances the epoch register. When it wraps, every counter is cleared
    /// so old epoch ids cannot alias, at the cost of one sweep over the
    /// counter rows.
    pub fn advance_epoch(&mut self) -> Option<FullResetEvent> {
        self.epoch_register = (self.epoch_register + 1) & EPOCH_MASK;
        if self.epoch_register != 0 {
            return None;
        }
        self.counters.iter_mut().for_each(|c| *c = 0);
        self.counter_row_acts.iter_mut().for_each(|c| *c += 1);
        Some(FullResetEvent { counter_row_acts: self.counter_rows() })
    }
}
