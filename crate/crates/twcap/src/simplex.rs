//! Uniform quantization of the probability simplex.
//!
//! A grid with step `delta = 1/n` on the `k`-simplex is the set of vectors
//! `(m_1/n, ..., m_k/n)` over non-negative integer compositions `m` of `n`.
//! Compositions are ordered lexicographically ascending, so sweeps can be
//! chunked by rank and reproduced deterministically.

use crate::channel::Distribution;
use crate::error::{Error, Result};

/// A uniform grid on the probability simplex of dimension `dim`.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    dim: usize,
    delta: f64,
    /// `1/delta`, the composition total.
    steps: u64,
}

impl GridSpec {
    /// `delta` must be in (0, 1] with `1/delta` integral to within 1e-9.
    pub fn new(dim: usize, delta: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Validation("grid dimension must be >= 1".into()));
        }
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(Error::Validation(format!("delta = {delta} outside (0, 1]")));
        }
        let inv = 1.0 / delta;
        let steps = inv.round();
        if (inv - steps).abs() > 1e-9 {
            return Err(Error::Validation(format!(
                "1/delta = {inv} is not an integer"
            )));
        }
        Ok(Self {
            dim,
            delta,
            steps: steps as u64,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Number of grid points: C(steps + dim - 1, steps), exactly.
    pub fn count(&self) -> Result<u64> {
        binomial(self.steps + self.dim as u64 - 1, self.dim as u64 - 1).ok_or(
            Error::CountOverflow {
                dim: self.dim,
                delta: self.delta,
            },
        )
    }

    /// The composition of rank `r` in lexicographic ascending order.
    ///
    /// Ranks are dense in `0..count()`; unranking costs O(dim * steps).
    #[allow(clippy::needless_range_loop)]
    pub fn composition_at(&self, mut rank: u64) -> Vec<u64> {
        let k = self.dim;
        let mut comp = vec![0u64; k];
        let mut remaining = self.steps;
        for i in 0..k - 1 {
            // count of compositions with this prefix value, over the trailing parts
            let trailing = (k - i - 2) as u64;
            for v in 0..=remaining {
                let block = binomial(remaining - v + trailing, trailing)
                    .expect("block count fits: bounded by total count");
                if rank < block {
                    comp[i] = v;
                    remaining -= v;
                    break;
                }
                rank -= block;
            }
        }
        comp[k - 1] = remaining;
        comp
    }

    /// Advances `comp` to its lexicographic successor in place.
    /// Returns false when `comp` was the last composition.
    pub fn next_composition(&self, comp: &mut [u64]) -> bool {
        let k = comp.len();
        if k == 1 {
            return false;
        }
        // rightmost position (excluding the last) with mass to its right
        let mut suffix = comp[k - 1];
        for i in (0..k - 1).rev() {
            if suffix > 0 {
                comp[i] += 1;
                for c in comp[i + 1..k - 1].iter_mut() {
                    *c = 0;
                }
                comp[k - 1] = suffix - 1;
                return true;
            }
            suffix += comp[i];
        }
        false
    }

    /// The distribution for a composition (entries `m_i / steps`).
    pub fn point(&self, comp: &[u64]) -> Distribution {
        let n = self.steps as f64;
        Distribution::from_validated(comp.iter().map(|&m| m as f64 / n).collect())
    }

    /// All grid points in lexicographic composition order.
    pub fn enumerate(&self) -> GridIter {
        GridIter {
            spec: *self,
            comp: {
                let mut c = vec![0u64; self.dim];
                c[self.dim - 1] = self.steps;
                c
            },
            done: false,
        }
    }
}

pub struct GridIter {
    spec: GridSpec,
    comp: Vec<u64>,
    done: bool,
}

impl Iterator for GridIter {
    type Item = Distribution;

    fn next(&mut self) -> Option<Distribution> {
        if self.done {
            return None;
        }
        let d = self.spec.point(&self.comp);
        self.done = !self.spec.next_composition(&mut self.comp);
        Some(d)
    }
}

/// C(n, k) in u64 with overflow detection.
fn binomial(n: u64, k: u64) -> Option<u64> {
    let k = k.min(n - k.min(n));
    let mut acc: u64 = 1;
    for i in 0..k {
        // multiply then divide keeps intermediate results integral:
        // acc * (n - i) / (i + 1) where acc already holds C(n, i)
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

/// The point `p` together with every distribution reachable by moving `step`
/// mass from one coordinate to another while staying non-negative.
pub fn refine_neighborhood(p: &Distribution, step: f64) -> Vec<Distribution> {
    let probs = p.probs();
    let k = probs.len();
    let mut out = vec![p.clone()];
    for i in 0..k {
        if probs[i] < step - 1e-12 {
            continue;
        }
        for j in 0..k {
            if i == j {
                continue;
            }
            let mut q = probs.to_vec();
            q[i] = (q[i] - step).max(0.0);
            q[j] += step;
            out.push(Distribution::from_validated(q));
        }
    }
    out
}
