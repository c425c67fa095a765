//! Row Indirection Table (RIT) and its companion buffers.
//!
//! The RIT maps logical rows to physical locations. Rows without an entry
//! sit at home (`physical == logical`). Entries live in a collision
//! avoidance table ([`Cat`]): a two-way skewed associative array with
//! random eviction of unlocked entries from previous epochs.
//!
//! Two modes:
//!
//! - `TuplePaired` (RRS): a swap creates tuples `<A,B>` and `<B,A>`; a row
//!   is re-swapped by unswapping it first.
//! - `RealMirrored` (SRS, Scale-SRS): the real part maps logical to
//!   physical, the mirrored part physical to logical. A re-swap exchanges
//!   locations directly, so swap chains form permutation cycles that are
//!   placed back lazily in a later epoch.

use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::ledger::ActivationLedger;
use crate::rng::{splitmix64, stream};
use crate::RowId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IndirectionError {
    #[error("row {0} swapped with itself")]
    SelfSwap(RowId),
    #[error("row {0} is outside the bank")]
    OutOfRange(RowId),
    #[error("row {0} has no tuple to unswap")]
    NotSwapped(RowId),
    #[error("row {0} already belongs to a tuple")]
    AlreadySwapped(RowId),
    #[error("operation requires {0:?} mode")]
    WrongMode(RitMode),
    #[error("RIT full: every candidate entry for row {0} is locked")]
    CapacityFull(RowId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RitMode {
    TuplePaired,
    RealMirrored,
}

/// Order of the two row reads in an unswap-swap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwapOrder {
    /// Naive: the aggressor's original location is opened twice.
    AggressorFirst,
    /// Optimized: opened once.
    PartnerFirst,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Slot {
    key: RowId,
    locked: bool,
    epoch: u64,
}

/// Collision avoidance table: `2 × sets × ways` slots, one per displaced
/// logical row.
#[derive(Debug, Clone)]
pub struct Cat {
    sets: usize,
    ways: usize,
    salts: [u64; 2],
    slots: Vec<Option<Slot>>,
    index: HashMap<RowId, usize>,
}

impl Cat {
    pub fn new(sets: usize, ways: usize, seed: u64) -> Self {
        assert!(sets >= 1 && ways >= 1);
        Self {
            sets,
            ways,
            salts: [splitmix64(seed ^ 0x5EED_0001), splitmix64(seed ^ 0x5EED_0002)],
            slots: vec![None; 2 * sets * ways],
            index: HashMap::new(),
        }
    }

    /// Eight ways per skew, enough sets to hold `capacity` entries.
    pub fn with_capacity(capacity: usize, seed: u64) -> Self {
        let ways = 8;
        Self::new(capacity.div_ceil(2 * ways).max(1), ways, seed)
    }

    pub fn capacity(&self) -> usize {
        self.slots.len()
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    fn set_range(&self, skew: usize, key: RowId) -> std::ops::Range<usize> {
        let set = (splitmix64(u64::from(key) ^ self.salts[skew]) % self.sets as u64) as usize;
        let base = (skew * self.sets + set) * self.ways;
        base..base + self.ways
    }

    fn slot(&self, key: RowId) -> Option<&Slot> {
        self.index.get(&key).and_then(|&i| self.slots[i].as_ref())
    }

    pub fn contains(&self, key: RowId) -> bool {
        self.index.contains_key(&key)
    }

    pub fn is_locked(&self, key: RowId) -> bool {
        self.slot(key).is_some_and(|s| s.locked)
    }

    pub fn epoch_of(&self, key: RowId) -> Option<u64> {
        self.slot(key).map(|s| s.epoch)
    }

    /// Inserts into the skew with more free ways. `Err` when both candidate
    /// sets are full.
    fn try_insert(&mut self, key: RowId, epoch: u64) -> Result<(), ()> {
        if self.contains(key) {
            self.touch(key, epoch);
            return Ok(());
        }
        let free = |r: std::ops::Range<usize>| r.filter(|&i| self.slots[i].is_none()).collect::<Vec<_>>();
        let f0 = free(self.set_range(0, key));
        let f1 = free(self.set_range(1, key));
        let pick = if f1.len() > f0.len() { f1.first() } else { f0.first() };
        let &i = pick.ok_or(())?;
        self.slots[i] = Some(Slot { key, locked: true, epoch });
        self.index.insert(key, i);
        Ok(())
    }

    /// Marks the entry as written this epoch.
    fn touch(&mut self, key: RowId, epoch: u64) {
        if let Some(&i) = self.index.get(&key) {
            self.slots[i] = Some(Slot { key, locked: true, epoch });
        }
    }

    fn remove(&mut self, key: RowId) {
        if let Some(i) = self.index.remove(&key) {
            self.slots[i] = None;
        }
    }

    fn take(&mut self, key: RowId) -> Option<(usize, Slot)> {
        let i = self.index.remove(&key)?;
        self.slots[i].take().map(|s| (i, s))
    }

    fn restore(&mut self, saved: Option<(usize, Slot)>) {
        if let Some((i, s)) = saved {
            debug_assert!(self.slots[i].is_none());
            self.slots[i] = Some(s);
            self.index.insert(s.key, i);
        }
    }

    /// Unlocked entries sharing a candidate set with `key`.
    fn victims(&self, key: RowId) -> Vec<RowId> {
        let mut v: Vec<RowId> = (0..2)
            .flat_map(|s| self.set_range(s, key))
            .filter_map(|i| self.slots[i].filter(|s| !s.locked).map(|s| s.key))
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    fn unlock_all(&mut self) {
        for s in self.slots.iter_mut().flatten() {
            s.locked = false;
        }
    }
}

/// Activations charged by one RIT operation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SwapReceipt {
    pub aggressor: RowId,
    pub partner: RowId,
    /// Physical rows activated by the data movement, with repetition.
    pub activations: Vec<RowId>,
    /// Entries evicted to make room.
    pub evictions: u32,
}

impl SwapReceipt {
    pub fn count_at(&self, phys: RowId) -> usize {
        self.activations.iter().filter(|&&p| p == phys).count()
    }
}

/// Holds the row in transit during a lazy place-back chain.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PlaceBackBuffer {
    slot: Option<RowId>,
}

impl PlaceBackBuffer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn carried(&self) -> Option<RowId> {
        self.slot
    }

    pub fn is_empty(&self) -> bool {
        self.slot.is_none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvictProgress {
    /// Nothing from a previous epoch is left.
    Drained,
    /// A row went home; `carrying` is now in the place-back buffer.
    Step { placed: RowId, carrying: Option<RowId> },
}

#[derive(Debug, Clone)]
pub struct RowIndirectionTable {
    mode: RitMode,
    rows: u32,
    real: BTreeMap<RowId, RowId>,
    mirrored: BTreeMap<RowId, RowId>,
    cat: Cat,
    epoch: u64,
    reswaps: u64,
    rng: ChaCha8Rng,
}

impl RowIndirectionTable {
    pub fn new(mode: RitMode, rows: u32, capacity: usize, seed: u64) -> Self {
        Self::with_cat(mode, rows, Cat::with_capacity(capacity, seed), seed)
    }

    pub fn with_cat(mode: RitMode, rows: u32, cat: Cat, seed: u64) -> Self {
        Self {
            mode,
            rows,
            real: BTreeMap::new(),
            mirrored: BTreeMap::new(),
            cat,
            epoch: 0,
            reswaps: 0,
            rng: stream(seed, &[0x0C47]),
        }
    }

    pub fn mode(&self) -> RitMode {
        self.mode
    }

    pub fn rows(&self) -> u32 {
        self.rows
    }

    pub fn len(&self) -> usize {
        self.real.len()
    }

    pub fn is_empty(&self) -> bool {
        self.real.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.cat.capacity()
    }

    pub fn epoch(&self) -> u64 {
        self.epoch
    }

    /// Physical location of `logical`.
    pub fn resolve(&self, logical: RowId) -> RowId {
        self.real.get(&logical).copied().unwrap_or(logical)
    }

    /// Logical row stored at `phys`.
    pub fn occupant(&self, phys: RowId) -> RowId {
        match self.mode {
            RitMode::TuplePaired => self.real.get(&phys).copied().unwrap_or(phys),
            RitMode::RealMirrored => self.mirrored.get(&phys).copied().unwrap_or(phys),
        }
    }

    pub fn is_displaced(&self, logical: RowId) -> bool {
        self.real.contains_key(&logical)
    }

    pub fn is_locked(&self, logical: RowId) -> bool {
        self.cat.is_locked(logical)
    }

    /// Entries last written before the current epoch.
    pub fn previous_epoch_entries(&self) -> usize {
        self.real.keys().filter(|k| self.cat.epoch_of(**k).is_some_and(|e| e < self.epoch)).count()
    }

    fn check_row(&self, row: RowId) -> Result<(), IndirectionError> {
        if row >= self.rows {
            Err(IndirectionError::OutOfRange(row))
        } else {
            Ok(())
        }
    }

    fn check_pair(&self, a: RowId, b: RowId) -> Result<(), IndirectionError> {
        self.check_row(a)?;
        self.check_row(b)?;
        if a == b {
            return Err(IndirectionError::SelfSwap(a));
        }
        Ok(())
    }

    /// Records `logical` at `phys` in both parts (real only in tuple mode).
    fn set(&mut self, logical: RowId, phys: RowId) {
        if let Some(old) = self.real.remove(&logical) {
            if self.mirrored.get(&old) == Some(&logical) {
                self.mirrored.remove(&old);
            }
        }
        if phys != logical {
            self.real.insert(logical, phys);
            if self.mode == RitMode::RealMirrored {
                self.mirrored.insert(phys, logical);
            }
        }
    }

    fn sync_cat(&mut self, rows: &[RowId], lock: bool) {
        for &r in rows {
            if !self.real.contains_key(&r) {
                self.cat.remove(r);
            } else if lock {
                self.cat.touch(r, self.epoch);
            }
        }
    }

    /// Rows in the same permutation cycle (RealMirrored) or tuple.
    fn group(&self, row: RowId) -> Vec<RowId> {
        let mut g = vec![row];
        let mut cur = self.resolve(row);
        while cur != row {
            g.push(cur);
            cur = self.resolve(cur);
        }
        g
    }

    /// Makes room for every key in `keys`, evicting random victims whose
    /// whole group is unlocked and avoids `protected`. On failure the keys
    /// inserted so far are withdrawn.
    fn reserve(
        &mut self,
        keys: &[RowId],
        protected: &[RowId],
        ledger: &mut ActivationLedger,
        receipt: &mut SwapReceipt,
    ) -> Result<(), IndirectionError> {
        let mut inserted = Vec::new();
        for &key in keys {
            loop {
                if self.cat.try_insert(key, self.epoch).is_ok() {
                    inserted.push(key);
                    break;
                }
                let victims: Vec<RowId> = self
                    .cat
                    .victims(key)
                    .into_iter()
                    .filter(|&v| self.group(v).iter().all(|r| !protected.contains(r) && !self.cat.is_locked(*r)))
                    .collect();
                if victims.is_empty() {
                    for k in inserted {
                        if !self.real.contains_key(&k) {
                            self.cat.remove(k);
                        }
                    }
                    return Err(IndirectionError::CapacityFull(key));
                }
                let v = victims[self.rng.random_range(0..victims.len())];
                self.evict_group(v, ledger, &mut receipt.activations);
                receipt.evictions += 1;
            }
        }
        Ok(())
    }

    fn evict_group(&mut self, row: RowId, ledger: &mut ActivationLedger, acts: &mut Vec<RowId>) {
        match self.mode {
            RitMode::TuplePaired => self.unswap_tuple(row, ledger, acts),
            RitMode::RealMirrored => {
                let mut carried = Some(row);
                let mut first = true;
                while let Some(c) = carried {
                    carried = self.place_step(c, first, ledger, acts);
                    first = false;
                }
            }
        }
    }

    /// Puts both rows of `row`'s tuple back home. One ACT at each location.
    fn unswap_tuple(&mut self, row: RowId, ledger: &mut ActivationLedger, acts: &mut Vec<RowId>) {
        let partner = self.resolve(row);
        if partner == row {
            return;
        }
        for p in [partner, row] {
            ledger.latent(p);
            acts.push(p);
        }
        self.set(row, row);
        self.set(partner, partner);
        self.sync_cat(&[row, partner], false);
    }

    /// Swaps `aggressor` with `partner`: one latent ACT at the aggressor's
    /// current location, one ACT at the partner's.
    pub fn swap(
        &mut self,
        aggressor: RowId,
        partner: RowId,
        ledger: &mut ActivationLedger,
    ) -> Result<SwapReceipt, IndirectionError> {
        self.check_pair(aggressor, partner)?;
        match self.mode {
            RitMode::TuplePaired => {
                for r in [aggressor, partner] {
                    if self.is_displaced(r) {
                        return Err(IndirectionError::AlreadySwapped(r));
                    }
                }
                let mut receipt = SwapReceipt { aggressor, partner, ..Default::default() };
                self.reserve(&[aggressor, partner], &[aggressor, partner], ledger, &mut receipt)?;
                for p in [aggressor, partner] {
                    ledger.latent(p);
                    receipt.activations.push(p);
                }
                self.set(aggressor, partner);
                self.set(partner, aggressor);
                self.sync_cat(&[aggressor, partner], true);
                Ok(receipt)
            }
            RitMode::RealMirrored => self.exchange(aggressor, partner, ledger),
        }
    }

    fn exchange(&mut self, a: RowId, b: RowId, ledger: &mut ActivationLedger) -> Result<SwapReceipt, IndirectionError> {
        let mut receipt = SwapReceipt { aggressor: a, partner: b, ..Default::default() };
        let (pa, pb) = (self.resolve(a), self.resolve(b));
        let needed: Vec<RowId> =
            [(a, pb), (b, pa)].into_iter().filter(|&(r, p)| r != p && !self.cat.contains(r)).map(|(r, _)| r).collect();
        self.reserve(&needed, &[a, b], ledger, &mut receipt)?;
        // evictions never touch a's or b's group, so locations are unchanged
        debug_assert_eq!((pa, pb), (self.resolve(a), self.resolve(b)));
        for p in [pa, pb] {
            ledger.latent(p);
            receipt.activations.push(p);
        }
        self.set(a, pb);
        self.set(b, pa);
        self.sync_cat(&[a, b], true);
        Ok(receipt)
    }

    /// SRS re-swap: moves the aggressor from wherever it sits to the new
    /// partner's location without visiting its original location.
    pub fn srs_reswap(
        &mut self,
        aggressor: RowId,
        new_partner: RowId,
        ledger: &mut ActivationLedger,
    ) -> Result<SwapReceipt, IndirectionError> {
        if self.mode != RitMode::RealMirrored {
            return Err(IndirectionError::WrongMode(RitMode::RealMirrored));
        }
        self.check_pair(aggressor, new_partner)?;
        self.exchange(aggressor, new_partner, ledger)
    }

    /// RRS unswap followed by a swap with `new_partner`.
    ///
    /// The aggressor's original location takes 2 latent ACTs under
    /// [`SwapOrder::AggressorFirst`] and 1 under [`SwapOrder::PartnerFirst`];
    /// the old and new partner locations take one each.
    pub fn unswap_swap(
        &mut self,
        aggressor: RowId,
        new_partner: RowId,
        ledger: &mut ActivationLedger,
        order: SwapOrder,
    ) -> Result<SwapReceipt, IndirectionError> {
        if self.mode != RitMode::TuplePaired {
            return Err(IndirectionError::WrongMode(RitMode::TuplePaired));
        }
        self.check_pair(aggressor, new_partner)?;
        let old = self.resolve(aggressor);
        if old == aggressor {
            return Err(IndirectionError::NotSwapped(aggressor));
        }
        if old == new_partner || self.is_displaced(new_partner) {
            return Err(IndirectionError::AlreadySwapped(new_partner));
        }
        self.reswaps += 1;
        let mut receipt = SwapReceipt { aggressor, partner: new_partner, ..Default::default() };
        let home_acts = match order {
            SwapOrder::AggressorFirst => 2,
            SwapOrder::PartnerFirst => 1,
        };
        let mut acts = vec![aggressor; home_acts];
        acts.extend([old, new_partner]);
        // the dissolved tuple frees the aggressor's slot and the old
        // partner's; the new partner needs one
        let saved = self.cat.take(old);
        if let Err(e) = self.reserve(&[new_partner], &[aggressor, old, new_partner], ledger, &mut receipt) {
            self.cat.restore(saved);
            return Err(e);
        }
        self.set(aggressor, aggressor);
        self.set(old, old);
        for &p in &acts {
            ledger.latent(p);
        }
        receipt.activations.extend(acts);
        self.set(aggressor, new_partner);
        self.set(new_partner, aggressor);
        self.sync_cat(&[aggressor, new_partner], true);
        Ok(receipt)
    }

    /// Unswap-swap with the default alternating order: even-numbered calls
    /// (counting from zero) use the naive order, averaging 1.5 latent ACTs.
    pub fn unswap_swap_alternating(
        &mut self,
        aggressor: RowId,
        new_partner: RowId,
        ledger: &mut ActivationLedger,
    ) -> Result<SwapReceipt, IndirectionError> {
        let order = if self.reswaps.is_multiple_of(2) { SwapOrder::AggressorFirst } else { SwapOrder::PartnerFirst };
        self.unswap_swap(aggressor, new_partner, ledger, order)
    }

    /// Moves `carried` home, picking up whichever row sat there. The first
    /// step of a chain also reads `carried` out of its location; the last
    /// step writes the final row into the location the chain started from.
    fn place_step(
        &mut self,
        carried: RowId,
        first: bool,
        ledger: &mut ActivationLedger,
        acts: &mut Vec<RowId>,
    ) -> Option<RowId> {
        let hole = self.resolve(carried);
        if hole == carried {
            return None;
        }
        if first {
            ledger.latent(hole);
            acts.push(hole);
        }
        let displaced = self.occupant(carried);
        ledger.latent(carried);
        acts.push(carried);
        self.set(carried, carried);
        self.set(displaced, hole);
        self.sync_cat(&[carried, displaced], false);
        if displaced == hole {
            ledger.latent(hole);
            acts.push(hole);
            None
        } else {
            Some(displaced)
        }
    }

    /// One lazy place-back step. Chains start at the lowest-numbered entry
    /// from a previous epoch and run to completion even through entries of
    /// the current epoch.
    pub fn lazy_evict_step(&mut self, placeback: &mut PlaceBackBuffer, ledger: &mut ActivationLedger) -> EvictProgress {
        self.lazy_evict_step_into(placeback, ledger, &mut Vec::new())
    }

    /// [`Self::lazy_evict_step`], also appending the physical rows it
    /// activated to `acts`.
    pub fn lazy_evict_step_into(
        &mut self,
        placeback: &mut PlaceBackBuffer,
        ledger: &mut ActivationLedger,
        acts: &mut Vec<RowId>,
    ) -> EvictProgress {
        if let Some(c) = placeback.slot.take() {
            if self.is_displaced(c) {
                let next = self.place_step(c, false, ledger, acts);
                placeback.slot = next;
                return EvictProgress::Step { placed: c, carrying: next };
            }
        }
        let start = self.real.keys().copied().find(|k| self.cat.epoch_of(*k).is_some_and(|e| e < self.epoch));
        let Some(start) = start else {
            return EvictProgress::Drained;
        };
        match self.mode {
            RitMode::TuplePaired => {
                self.unswap_tuple(start, ledger, acts);
                EvictProgress::Step { placed: start, carrying: None }
            }
            RitMode::RealMirrored => {
                let next = self.place_step(start, true, ledger, acts);
                placeback.slot = next;
                EvictProgress::Step { placed: start, carrying: next }
            }
        }
    }

    /// Physical rows the next [`Self::lazy_evict_step`] would activate,
    /// without changing anything.
    pub fn peek_evict_acts(&self, placeback: &PlaceBackBuffer) -> Vec<RowId> {
        let (carried, first) = match placeback.slot {
            Some(c) if self.is_displaced(c) => (c, false),
            _ => {
                let start = self.real.keys().copied().find(|k| self.cat.epoch_of(*k).is_some_and(|e| e < self.epoch));
                match start {
                    Some(s) => (s, true),
                    None => return Vec::new(),
                }
            }
        };
        let hole = self.resolve(carried);
        if self.mode == RitMode::TuplePaired {
            return vec![hole, carried];
        }
        let mut acts = Vec::with_capacity(3);
        if first {
            acts.push(hole);
        }
        acts.push(carried);
        if self.occupant(carried) == hole {
            acts.push(hole);
        }
        acts
    }

    /// Runs lazy steps until nothing from a previous epoch remains.
    pub fn drain(&mut self, placeback: &mut PlaceBackBuffer, ledger: &mut ActivationLedger) -> u64 {
        let mut steps = 0;
        while let EvictProgress::Step { .. } = self.lazy_evict_step(placeback, ledger) {
            steps += 1;
        }
        steps
    }

    /// Clears every lock bit and starts a new epoch; existing entries become
    /// previous-epoch entries and may be evicted.
    pub fn epoch_reset(&mut self) {
        self.cat.unlock_all();
        self.epoch += 1;
    }

    /// Every broken structural invariant, as text.
    pub fn check_invariants(&self) -> Result<(), String> {
        let mut seen = vec![false; self.rows as usize];
        for l in 0..self.rows {
            let p = self.resolve(l);
            if p >= self.rows || std::mem::replace(&mut seen[p as usize], true) {
                return Err(format!("location {p} claimed twice (by {l})"));
            }
            if self.occupant(p) != l {
                return Err(format!("occupant({p}) = {} but resolve({l}) = {p}", self.occupant(p)));
            }
        }
        match self.mode {
            RitMode::TuplePaired => {
                for (&a, &b) in &self.real {
                    if self.real.get(&b) != Some(&a) {
                        return Err(format!("tuple <{a},{b}> without <{b},{a}>"));
                    }
                }
            }
            RitMode::RealMirrored => {
                if self.real.len() != self.mirrored.len() {
                    return Err("real and mirrored parts differ in size".into());
                }
                for (&a, &x) in &self.real {
                    if self.mirrored.get(&x) != Some(&a) {
                        return Err(format!("real <{a},{x}> without mirrored <{x},{a}>"));
                    }
                }
            }
        }
        if self.cat.len() != self.real.len() || self.real.keys().any(|k| !self.cat.contains(*k)) {
            return Err("CAT occupancy does not match the real part".into());
        }
        if self.cat.len() > self.cat.capacity() {
            return Err("CAT over capacity".into());
        }
        Ok(())
    }

    /// `logical,physical,locked,epoch_tag` for every displaced row.
    pub fn dump_csv(&self) -> String {
        let mut out = String::from("logical,physical,locked,epoch_tag\n");
        for (&l, &p) in &self.real {
            let locked = u8::from(self.cat.is_locked(l));
            let tag = self.cat.epoch_of(l).unwrap_or(0);
            out.push_str(&format!("{l},{p},{locked},{tag}\n"));
        }
        out
    }
}

pub const PIN_SET_STRIDE: u32 = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PinError {
    #[error("pin buffer full ({0} entries)")]
    Full(usize),
    #[error("row {0} already pinned")]
    AlreadyPinned(RowId),
}

/// Rows parked in the last-level cache for the rest of the epoch. Entry `i`
/// owns the 16 sets starting at `16·i`.
#[derive(Debug, Clone)]
pub struct PinBuffer {
    entries: Vec<RowId>,
    capacity: usize,
}

impl PinBuffer {
    pub fn new(capacity: usize) -> Self {
        Self { entries: Vec::with_capacity(capacity), capacity }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, row: RowId) -> bool {
        self.entries.contains(&row)
    }

    /// Returns the assigned set base.
    pub fn pin(&mut self, row: RowId) -> Result<u32, PinError> {
        if self.contains(row) {
            return Err(PinError::AlreadyPinned(row));
        }
        if self.entries.len() >= self.capacity {
            return Err(PinError::Full(self.capacity));
        }
        self.entries.push(row);
        Ok(PIN_SET_STRIDE * (self.entries.len() as u32 - 1))
    }

    pub fn set_base(&self, row: RowId) -> Option<u32> {
        self.entries.iter().position(|&r| r == row).map(|i| PIN_SET_STRIDE * i as u32)
    }

    pub fn clear(&mut self) {
        self.entries.clear();
    }
}
