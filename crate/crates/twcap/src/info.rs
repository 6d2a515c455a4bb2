//! Entropy and mutual-information primitives, in bits.
//!
//! All logarithms are base 2. Probabilities below [`ZERO_PROB`] are treated
//! as exactly zero inside logarithms, so degenerate inputs never produce
//! infinities.

use crate::channel::{ChannelMatrix, Direction, Distribution, TwoWayChannel, PROB_TOL};
use crate::error::{Error, Result};

/// Probabilities below this are treated as exactly zero inside logarithms.
pub const ZERO_PROB: f64 = 1e-15;

/// Shannon entropy of a probability slice, in bits.
pub(crate) fn entropy_slice(p: &[f64]) -> f64 {
    let mut h = 0.0;
    for &v in p {
        if v > ZERO_PROB {
            h -= v * v.log2();
        }
    }
    h
}

/// H(p) in bits; lies in [0, log2 k].
pub fn entropy(p: &Distribution) -> f64 {
    entropy_slice(p.probs())
}

/// I(X; Y) for input law `px` over a channel matrix, in bits.
pub(crate) fn mi_slice(px: &[f64], ch: &ChannelMatrix) -> f64 {
    let cols = ch.cols();
    let mut out = vec![0.0; cols];
    let mut cond = 0.0;
    for (x, &p) in px.iter().enumerate() {
        if p <= ZERO_PROB {
            continue;
        }
        let row = ch.row(x);
        for y in 0..cols {
            out[y] += p * row[y];
        }
        cond += p * entropy_slice(row);
    }
    (entropy_slice(&out) - cond).max(0.0)
}

/// Mutual information I(X; Y) = H(Y) - H(Y|X) in bits.
pub fn mutual_information(px: &Distribution, ch: &ChannelMatrix) -> Result<f64> {
    if px.len() != ch.rows() {
        return Err(Error::Dimension(format!(
            "input law has {} symbols, channel has {} rows",
            px.len(),
            ch.rows()
        )));
    }
    Ok(mi_slice(px.probs(), ch))
}

/// A joint input law P(x1, x2), stored row-major over x1.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct JointInput {
    nx1: usize,
    nx2: usize,
    probs: Vec<f64>,
}

impl JointInput {
    pub fn new(nx1: usize, nx2: usize, probs: Vec<f64>) -> Result<Self> {
        if nx1 == 0 || nx2 == 0 || probs.len() != nx1 * nx2 {
            return Err(Error::Dimension(format!(
                "joint law needs {nx1}x{nx2} entries, got {}",
                probs.len()
            )));
        }
        for (i, &p) in probs.iter().enumerate() {
            if !(0.0..=1.0 + PROB_TOL).contains(&p) {
                return Err(Error::Validation(format!(
                    "joint entry {i} = {p} outside [0, 1]"
                )));
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > PROB_TOL {
            return Err(Error::Validation(format!(
                "joint law sums to {sum}, expected 1"
            )));
        }
        Ok(Self { nx1, nx2, probs })
    }

    /// Product law `px1 (x) px2`.
    pub fn product(px1: &Distribution, px2: &Distribution) -> Self {
        let mut probs = Vec::with_capacity(px1.len() * px2.len());
        for &a in px1.probs() {
            for &b in px2.probs() {
                probs.push(a * b);
            }
        }
        Self {
            nx1: px1.len(),
            nx2: px2.len(),
            probs,
        }
    }

    pub fn nx1(&self) -> usize {
        self.nx1
    }

    pub fn nx2(&self) -> usize {
        self.nx2
    }

    pub fn prob(&self, x1: usize, x2: usize) -> f64 {
        self.probs[x1 * self.nx2 + x2]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Marginal law of X1.
    pub fn marginal_x1(&self) -> Vec<f64> {
        (0..self.nx1)
            .map(|x1| self.probs[x1 * self.nx2..(x1 + 1) * self.nx2].iter().sum())
            .collect()
    }

    /// Marginal law of X2.
    pub fn marginal_x2(&self) -> Vec<f64> {
        (0..self.nx2)
            .map(|x2| (0..self.nx1).map(|x1| self.prob(x1, x2)).sum())
            .collect()
    }
}

/// Conditional mutual information between the sending terminal's input and
/// the receiving terminal's output, given the receiving terminal's input.
///
/// Forward: I(X1; Y2 | X2) = sum over x2 of P(x2) * I(P(x1|x2), forward sub-channel x2).
/// Backward swaps the roles. States of probability zero contribute nothing.
pub fn conditional_mi(joint: &JointInput, ch: &TwoWayChannel, dir: Direction) -> Result<f64> {
    if joint.nx1() != ch.nx1() || joint.nx2() != ch.nx2() {
        return Err(Error::Dimension(format!(
            "joint law is {}x{}, channel inputs are {}x{}",
            joint.nx1(),
            joint.nx2(),
            ch.nx1(),
            ch.nx2()
        )));
    }
    let states = ch.state_count(dir);
    let inputs = ch.input_size(dir);
    let mut total = 0.0;
    let mut cond = vec![0.0; inputs];
    for s in 0..states {
        let ps: f64 = (0..inputs)
            .map(|x| match dir {
                Direction::Forward => joint.prob(x, s),
                Direction::Backward => joint.prob(s, x),
            })
            .sum();
        if ps <= ZERO_PROB {
            continue;
        }
        for (x, c) in cond.iter_mut().enumerate() {
            *c = match dir {
                Direction::Forward => joint.prob(x, s),
                Direction::Backward => joint.prob(s, x),
            } / ps;
        }
        let sub = ch.sub_channel(dir, s)?;
        total += ps * mi_slice(&cond, &sub);
    }
    Ok(total)
}

/// Entropy of terminal 1's output when terminal 1 sends `x1` and terminal 2
/// draws its input from `px2`.
pub fn conditional_output_entropy(
    px2: &Distribution,
    ch: &TwoWayChannel,
    x1: usize,
) -> Result<f64> {
    if x1 >= ch.nx1() {
        return Err(Error::IndexOutOfRange {
            index: x1,
            size: ch.nx1(),
        });
    }
    if px2.len() != ch.nx2() {
        return Err(Error::Dimension(format!(
            "input law has {} symbols, channel expects {}",
            px2.len(),
            ch.nx2()
        )));
    }
    let mut out = vec![0.0; ch.ny1()];
    for (x2, &p) in px2.probs().iter().enumerate() {
        let row = ch.backward_row(x1, x2);
        for y in 0..ch.ny1() {
            out[y] += p * row[y];
        }
    }
    Ok(entropy_slice(&out))
}

/// Per-state-pair transition-row entropies, indexed `[x1][x2]`.
pub fn row_entropy_table(ch: &TwoWayChannel, dir: Direction) -> Vec<Vec<f64>> {
    (0..ch.nx1())
        .map(|x1| {
            (0..ch.nx2())
                .map(|x2| {
                    entropy_slice(match dir {
                        Direction::Forward => ch.forward_row(x1, x2),
                        Direction::Backward => ch.backward_row(x1, x2),
                    })
                })
                .collect()
        })
        .collect()
}
