//! Blahut-Arimoto capacity solver and output-entropy maximization for
//! one-way channel matrices.

use crate::channel::{ChannelMatrix, Distribution};
use crate::info::ZERO_PROB;
use crate::optim;
use crate::simplex::GridSpec;

pub const DEFAULT_BA_TOL: f64 = 1e-10;
pub const DEFAULT_BA_MAX_ITER: usize = 10_000;

/// Outcome of a Blahut-Arimoto capacity computation.
#[derive(Debug, Clone)]
pub struct CapacityResult {
    /// Best capacity lower bound reached (the mutual information of
    /// `optimizer`), in bits.
    pub capacity: f64,
    /// The input law achieving `capacity`.
    pub optimizer: Distribution,
    /// Final gap between the per-iteration upper and lower capacity bounds.
    pub gap: f64,
    pub iterations: usize,
    /// False when `max_iter` was exhausted before the gap reached `tol`.
    pub converged: bool,
}

/// Channel capacity via the Blahut-Arimoto alternating update, starting from
/// the uniform input law. Terminates when the upper/lower capacity bound gap
/// falls to `tol`; reports the lower bound as the capacity.
pub fn ba_capacity(ch: &ChannelMatrix, tol: f64, max_iter: usize) -> CapacityResult {
    assert!(tol > 0.0 && max_iter >= 1);
    let n = ch.rows();
    let cols = ch.cols();
    let mut p = vec![1.0 / n as f64; n];
    let mut divergences = vec![0.0; n];
    let mut output = vec![0.0; cols];

    let mut lower = 0.0;
    let mut gap = f64::INFINITY;
    let mut iterations = 0;
    for it in 1..=max_iter {
        iterations = it;
        output.iter_mut().for_each(|o| *o = 0.0);
        for (x, &px) in p.iter().enumerate() {
            let row = ch.row(x);
            for y in 0..cols {
                output[y] += px * row[y];
            }
        }
        // D(row_x || output): relative entropy of each input's row to the
        // output marginal; the capacity satisfies sum(p*D) <= C <= max(D)
        for (x, d) in divergences.iter_mut().enumerate() {
            let row = ch.row(x);
            let mut acc = 0.0;
            for y in 0..cols {
                if row[y] > ZERO_PROB {
                    acc += row[y] * (row[y] / output[y]).log2();
                }
            }
            *d = acc;
        }
        lower = p.iter().zip(&divergences).map(|(&px, &d)| px * d).sum();
        let upper = divergences.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        gap = (upper - lower).max(0.0);
        if gap <= tol {
            return CapacityResult {
                capacity: lower.max(0.0),
                optimizer: Distribution::from_validated(p),
                gap,
                iterations,
                converged: true,
            };
        }
        // multiplicative update p_x <- p_x * 2^D_x, renormalized
        let mut z = 0.0;
        for (px, &d) in p.iter_mut().zip(&divergences) {
            *px *= d.exp2();
            z += *px;
        }
        p.iter_mut().for_each(|px| *px /= z);
    }
    CapacityResult {
        capacity: lower.max(0.0),
        optimizer: Distribution::from_validated(p),
        gap,
        iterations,
        converged: false,
    }
}

/// `ba_capacity` with the crate defaults (tol 1e-10, 10000 iterations).
pub fn ba_capacity_default(ch: &ChannelMatrix) -> CapacityResult {
    ba_capacity(ch, DEFAULT_BA_TOL, DEFAULT_BA_MAX_ITER)
}

/// Maximizes the output entropy H(p W) over the input simplex.
///
/// The objective is concave; a delta = 0.05 grid seed followed by
/// step-halving neighborhood ascent converges to the global maximum.
pub fn max_output_entropy(ch: &ChannelMatrix, tol: f64) -> (f64, Distribution) {
    let k = ch.rows();
    let objective = optim::OutputEntropyGap::new(ch);
    let grid = GridSpec::new(k, 0.05).expect("static grid spec is valid");
    let (probs, negated) = optim::minimize_max_over_simplex(&objective, &grid, 0.05, tol);
    (-negated, Distribution::from_validated(probs))
}
