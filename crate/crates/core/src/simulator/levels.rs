//! Indexes over per-level particle counts that sample a level with
//! probability proportional to its count.

use std::hint::select_unpredictable;

/// Level index used by the projected engine.
pub(crate) trait LevelIndex {
    fn new(len: usize) -> Self;
    /// Smallest level whose inclusive prefix count exceeds `target`.
    fn find(&self, target: u64) -> usize;
    /// Adds a particle at `to` and, when `moved`, removes one from `from`.
    /// A move never spans more than one level.
    fn apply(&mut self, from: usize, to: usize, moved: bool);
}

/// Inclusive prefix counts in a flat array, for short genomes and
/// populations below `u32::MAX`. Search and update are fixed-length
/// branch-free scans; 32-bit lanes keep them vectorized on baseline x86-64.
#[derive(Debug, Clone)]
pub(crate) struct PrefixCounts {
    prefix: Vec<u32>,
}

const LANES: usize = 8;

impl LevelIndex for PrefixCounts {
    // Padding acts as empty trailing levels: their prefix equals the total,
    // which no target reaches.
    fn new(len: usize) -> Self {
        Self { prefix: vec![0; len.div_ceil(LANES) * LANES] }
    }

    #[inline]
    fn find(&self, target: u64) -> usize {
        let target = target as u32;
        let mut below = [0u32; LANES];
        for chunk in self.prefix.chunks_exact(LANES) {
            for (acc, &p) in below.iter_mut().zip(chunk) {
                *acc += u32::from(p <= target);
            }
        }
        below.iter().sum::<u32>() as usize
    }

    #[inline]
    fn apply(&mut self, from: usize, to: usize, moved: bool) {
        debug_assert!(!moved || from.abs_diff(to) <= 1);
        // a move changes only the prefix between the two levels
        let step = u32::from(moved & (to < from)).wrapping_sub(u32::from(moved & (to > from)));
        let at = from.min(to);
        self.prefix[at] = self.prefix[at].wrapping_add(step);
        // a branch adds one to every prefix from `to` on
        let grown = u32::from(!moved);
        let to = to as u32;
        for (base, chunk) in (0u32..).step_by(LANES).zip(self.prefix.chunks_exact_mut(LANES)) {
            for (j, p) in (base..).zip(chunk) {
                *p += grown & u32::from(j >= to);
            }
        }
    }
}

/// Counts per level with prefix-sum search, for sampling a level with
/// probability proportional to its count.
#[derive(Debug, Clone)]
pub(crate) struct Fenwick {
    /// Node `i` (1-based) covers `(i - lowbit(i), i]`. Padded to a power of
    /// two with entries that are never taken by [`Fenwick::find`].
    tree: Vec<u64>,
    len: usize,
    top: usize,
    /// Update path length bound, so updates run a fixed number of steps.
    depth: u32,
}

impl LevelIndex for Fenwick {
    fn new(len: usize) -> Self {
        Fenwick::with_len(len)
    }

    #[inline]
    fn find(&self, target: u64) -> usize {
        Fenwick::find(self, target)
    }

    #[inline]
    fn apply(&mut self, from: usize, to: usize, moved: bool) {
        self.adjust(from, u64::from(moved).wrapping_neg());
        self.adjust(to, 1);
    }
}

impl Fenwick {
    pub fn with_len(len: usize) -> Self {
        let top = len.next_power_of_two();
        let mut tree = vec![0; 2 * top];
        tree[len + 1..].fill(u64::MAX);
        Self { tree, len, top, depth: top.trailing_zeros() + 1 }
    }

    /// Adds `delta` (two's complement for decrements) at `index`.
    ///
    /// Runs exactly `depth` steps; steps past the root write to the unused
    /// slot 0, which keeps the loop free of data-dependent exits.
    #[inline]
    pub fn adjust(&mut self, index: usize, delta: u64) {
        let mut i = index + 1;
        for _ in 0..self.depth {
            let slot = if i <= self.len { i } else { 0 };
            self.tree[slot] = self.tree[slot].wrapping_add(delta);
            i += i & i.wrapping_neg();
        }
    }

    #[cfg(test)]
    pub fn add(&mut self, index: usize, delta: u64) {
        self.adjust(index, delta);
    }

    #[cfg(test)]
    pub fn sub(&mut self, index: usize, delta: u64) {
        self.adjust(index, delta.wrapping_neg());
    }

    /// Smallest index whose inclusive prefix sum exceeds `target`.
    /// `target` must be below the total.
    #[inline]
    pub fn find(&self, mut target: u64) -> usize {
        let mut pos = 0;
        let mut step = self.top;
        // the level choice is data-dependent and would mispredict about half
        // the time as a branch
        while step > 0 {
            let node = self.tree[pos + step];
            let take = node <= target;
            pos = select_unpredictable(take, pos + step, pos);
            target = select_unpredictable(take, target.wrapping_sub(node), target);
            step >>= 1;
        }
        pos
    }
}
