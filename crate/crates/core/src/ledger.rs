//! Ground-truth activation counts per physical row.

use std::time::Duration;

use crate::RowId;

/// Activations each physical row received this epoch, plus a time cursor.
///
/// The ledger is the security oracle: an epoch is breached exactly when some
/// entry reaches T_RH, regardless of what any tracker believes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActivationLedger {
    counts: Vec<u32>,
    demand: u64,
    latent: u64,
    /// Time spent on activations and mitigations this epoch.
    pub elapsed: Duration,
    /// Per-epoch maxima of closed epochs.
    pub history: Vec<u32>,
}

impl ActivationLedger {
    pub fn new(rows: u32) -> Self {
        Self { counts: vec![0; rows as usize], demand: 0, latent: 0, elapsed: Duration::ZERO, history: Vec::new() }
    }

    pub fn rows(&self) -> u32 {
        self.counts.len() as u32
    }

    /// Demand activation of a physical row.
    pub fn activate(&mut self, phys: RowId) {
        self.counts[phys as usize] += 1;
        self.demand += 1;
    }

    /// Activation caused by swap data movement.
    pub fn latent(&mut self, phys: RowId) {
        self.counts[phys as usize] += 1;
        self.latent += 1;
    }

    pub fn count(&self, phys: RowId) -> u32 {
        self.counts[phys as usize]
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn max(&self) -> u32 {
        self.counts.iter().copied().max().unwrap_or(0)
    }

    /// Physical row with the highest count (lowest index on ties).
    pub fn argmax(&self) -> RowId {
        let max = self.max();
        self.counts.iter().position(|&c| c == max).unwrap_or(0) as RowId
    }

    pub fn demand_acts(&self) -> u64 {
        self.demand
    }

    pub fn latent_acts(&self) -> u64 {
        self.latent
    }

    pub fn advance(&mut self, d: Duration) {
        self.elapsed += d;
    }

    /// Closes the epoch: records the maximum and zeroes every count.
    pub fn end_epoch(&mut self) -> u32 {
        let max = self.max();
        self.history.push(max);
        self.counts.iter_mut().for_each(|c| *c = 0);
        self.demand = 0;
        self.latent = 0;
        self.elapsed = Duration::ZERO;
        max
    }
}
