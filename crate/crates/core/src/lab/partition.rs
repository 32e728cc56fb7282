//! Set-partition enumeration by restricted-growth strings, and the minimal
//! partition engine shared by the Riesz-type harnesses.
//!
//! A restricted-growth string `a` has `a[0] = 0` and
//! `a[i] ≤ 1 + max(a[..i])`; each set partition has exactly one.

use std::collections::HashMap;

use super::Tracker;
use crate::error::{LabError, Result};

/// Restricted-growth strings of length `n` with labels `< max_blocks`, in
/// lexicographic order.
pub struct RgsIter {
    a: Vec<usize>,
    max_blocks: usize,
    done: bool,
}

pub fn rgs_partitions(n: usize, max_blocks: usize) -> RgsIter {
    RgsIter {
        a: vec![0; n],
        max_blocks,
        done: n == 0 || max_blocks == 0,
    }
}

impl Iterator for RgsIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.a.clone();
        let n = self.a.len();
        let mut prefix_max = vec![0usize; n];
        for i in 1..n {
            prefix_max[i] = prefix_max[i - 1].max(self.a[i - 1]);
        }
        let mut i = n;
        loop {
            if i <= 1 {
                self.done = true;
                break;
            }
            i -= 1;
            let cap = (prefix_max[i] + 1).min(self.max_blocks - 1);
            if self.a[i] < cap {
                self.a[i] += 1;
                for x in &mut self.a[i + 1..] {
                    *x = 0;
                }
                break;
            }
        }
        Some(out)
    }
}

/// Blocks of a labeling as sorted index lists, in label order.
pub(crate) fn blocks(labels: &[usize]) -> Vec<Vec<usize>> {
    let m = labels.iter().copied().max().map_or(0, |x| x + 1);
    let mut out = vec![Vec::new(); m];
    for (j, &l) in labels.iter().enumerate() {
        out[l].push(j);
    }
    out.retain(|b| !b.is_empty());
    out
}

pub(crate) fn block_masks(labels: &[usize]) -> Vec<u64> {
    blocks(labels)
        .iter()
        .map(|b| b.iter().fold(0u64, |m, &j| m | 1 << j))
        .collect()
}

/// Memoised validity of index subsets.
pub(crate) struct ValidityCache<'a> {
    cache: HashMap<u64, bool>,
    check: Box<dyn FnMut(u64) -> Result<bool> + 'a>,
}

impl<'a> ValidityCache<'a> {
    pub(crate) fn new(check: impl FnMut(u64) -> Result<bool> + 'a) -> Self {
        ValidityCache {
            cache: HashMap::new(),
            check: Box::new(check),
        }
    }

    pub(crate) fn valid(&mut self, mask: u64) -> Result<bool> {
        if let Some(&v) = self.cache.get(&mask) {
            return Ok(v);
        }
        let v = (self.check)(mask)?;
        self.cache.insert(mask, v);
        Ok(v)
    }
}

/// Lexicographically first labeling with the fewest blocks (at most
/// `max_m`) whose every block is valid. Validity must be hereditary: every
/// subset of a valid set is valid, which lets partial blocks prune.
///
/// Returns `Ok(None)` when no such labeling exists or the budget ran out;
/// the tracker tells which.
pub(crate) fn exhaustive_minimal(
    n: usize,
    max_m: usize,
    cache: &mut ValidityCache<'_>,
    tracker: &Tracker,
) -> Result<Option<Vec<usize>>> {
    if n > 63 {
        return Err(LabError::Budget(format!("partition search limited to n <= 63, got {n}")));
    }
    for m in 1..=max_m.min(n) {
        let mut labels = vec![0usize; n];
        let mut masks = vec![0u64; m];
        if dfs(0, 0, m, &mut labels, &mut masks, cache, tracker)? {
            return Ok(Some(labels));
        }
        if tracker.exceeded() {
            return Ok(None);
        }
    }
    Ok(None)
}

fn dfs(
    i: usize,
    used: usize,
    m: usize,
    labels: &mut [usize],
    masks: &mut [u64],
    cache: &mut ValidityCache<'_>,
    tracker: &Tracker,
) -> Result<bool> {
    let n = labels.len();
    if i == n {
        return Ok(used == m);
    }
    // Not enough elements left to open the remaining blocks.
    if m - used > n - i {
        return Ok(false);
    }
    let top = if used < m { used } else { m - 1 };
    for l in 0..=top {
        if !tracker.tick(1) {
            return Ok(false);
        }
        let next = masks[l] | 1 << i;
        if !cache.valid(next)? {
            continue;
        }
        let saved = masks[l];
        masks[l] = next;
        labels[i] = l;
        let opened = if l == used { used + 1 } else { used };
        if dfs(i + 1, opened, m, labels, masks, cache, tracker)? {
            return Ok(true);
        }
        masks[l] = saved;
    }
    Ok(false)
}

/// First-fit in index order, then repeatedly try to empty the smallest block
/// by moving its elements into other blocks. `None` when some singleton is
/// itself invalid.
pub(crate) fn greedy_partition(n: usize, cache: &mut ValidityCache<'_>, tracker: &Tracker) -> Result<Option<Vec<u64>>> {
    if n > 63 {
        return Err(LabError::Budget(format!("partition search limited to n <= 63, got {n}")));
    }
    let mut parts: Vec<u64> = Vec::new();
    for j in 0..n {
        let bit = 1u64 << j;
        let mut placed = false;
        for part in parts.iter_mut() {
            tracker.tick(1);
            if cache.valid(*part | bit)? {
                *part |= bit;
                placed = true;
                break;
            }
        }
        if !placed {
            if !cache.valid(bit)? {
                return Ok(None);
            }
            parts.push(bit);
        }
    }

    loop {
        if parts.len() <= 1 || tracker.exceeded() {
            break;
        }
        let (victim, _) = parts
            .iter()
            .enumerate()
            .min_by_key(|(k, m)| (m.count_ones(), *k))
            .expect("nonempty");
        let mut trial = parts.clone();
        let mut remaining = trial[victim];
        let mut progress = true;
        while remaining != 0 && progress {
            progress = false;
            let j = remaining.trailing_zeros() as usize;
            let bit = 1u64 << j;
            for k in 0..trial.len() {
                if k == victim {
                    continue;
                }
                tracker.tick(1);
                if cache.valid(trial[k] | bit)? {
                    trial[k] |= bit;
                    remaining &= !bit;
                    progress = true;
                    break;
                }
            }
        }
        if remaining == 0 {
            trial.remove(victim);
            parts = trial;
        } else {
            break;
        }
    }
    parts.sort_by_key(|m| m.trailing_zeros());
    Ok(Some(parts))
}

/// Every set partition of `{0..n}` as blocks, in restricted-growth order.
pub fn brute_force_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    rgs_partitions(n, n.max(1)).map(|l| blocks(&l)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::SearchBudget;

    #[test]
    fn bell_numbers() {
        let bell = [1usize, 1, 2, 5, 15, 52, 203, 877];
        for n in 1..8 {
            assert_eq!(rgs_partitions(n, n).count(), bell[n]);
        }
    }

    #[test]
    fn lexicographic_order() {
        let all: Vec<_> = rgs_partitions(3, 3).collect();
        assert_eq!(
            all,
            vec![vec![0, 0, 0], vec![0, 0, 1], vec![0, 1, 0], vec![0, 1, 1], vec![0, 1, 2]]
        );
        let two: Vec<_> = rgs_partitions(3, 2).collect();
        assert_eq!(two.len(), 4);
    }

    #[test]
    fn minimal_pairs_no_repeats() {
        // Elements 0,1 clash and 2,3 clash.
        let tracker = Tracker::new(&SearchBudget::default());
        let mut cache = ValidityCache::new(|m: u64| Ok(m & 0b11 != 0b11 && m & 0b1100 != 0b1100));
        let labels = exhaustive_minimal(4, 4, &mut cache, &tracker).unwrap().unwrap();
        assert_eq!(labels, vec![0, 1, 0, 1]);
        let greedy = greedy_partition(4, &mut cache, &tracker).unwrap().unwrap();
        assert_eq!(greedy.len(), 2);
    }
}
