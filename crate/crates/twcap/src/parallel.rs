//! Deterministic chunked parallelism for grid sweeps.
//!
//! Work is split into fixed-size index chunks that do not depend on the
//! worker count; per-chunk results are collected in chunk order and merged
//! serially. The same inputs therefore produce identical results on any
//! number of threads.

use rayon::prelude::*;

/// Chunk length for sweep index ranges. Fixed so that chunk boundaries (and
/// hence all per-chunk arithmetic) are independent of the thread count.
pub(crate) const SWEEP_CHUNK: u64 = 1 << 14;

/// Applies `f` to each chunk of `0..total` and returns the per-chunk results
/// in chunk order.
pub(crate) fn par_chunk_map<T, F>(total: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(std::ops::Range<u64>) -> T + Sync,
{
    if total == 0 {
        return Vec::new();
    }
    let n_chunks = total.div_ceil(SWEEP_CHUNK);
    (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * SWEEP_CHUNK;
            let end = (start + SWEEP_CHUNK).min(total);
            f(start..end)
        })
        .collect()
}

/// Merges per-chunk `(rank, value)` minima into the overall minimum,
/// breaking value ties toward the lowest rank.
pub(crate) fn merge_min_by_rank<P>(parts: Vec<Option<(u64, f64, P)>>) -> Option<(u64, f64, P)> {
    let mut best: Option<(u64, f64, P)> = None;
    for part in parts.into_iter().flatten() {
        best = match best {
            None => Some(part),
            Some(cur) => {
                if part.1 < cur.1 || (part.1 == cur.1 && part.0 < cur.0) {
                    Some(part)
                } else {
                    Some(cur)
                }
            }
        };
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunk_map_covers_range_in_order() {
        let parts = par_chunk_map(100_000, |r| (r.start, r.end));
        let mut expect = 0;
        for (s, e) in parts {
            assert_eq!(s, expect);
            expect = e;
        }
        assert_eq!(expect, 100_000);
    }

    #[test]
    fn min_merge_breaks_ties_by_rank() {
        let parts = vec![
            Some((7u64, 1.0, 'a')),
            None,
            Some((3, 1.0, 'b')),
            Some((9, 2.0, 'c')),
        ];
        let (rank, _, tag) = merge_min_by_rank(parts).unwrap();
        assert_eq!((rank, tag), (3, 'b'));
    }
}
