//! Two-way channel model: probability vectors, one-way transition matrices,
//! and the two marginal transition tensors of a discrete memoryless two-way
//! channel, together with the JSON channel file format.
//!
//! A channel connects terminal 1 (input alphabet of size `nx1`, output
//! alphabet of size `ny1`) and terminal 2 (`nx2`, `ny2`). Only the two
//! marginal transition laws are stored: `forward[x1][x2][y2]` is the law of
//! terminal 2's observation and `backward[x1][x2][y1]` the law of
//! terminal 1's. Every quantity computed in this crate depends on the joint
//! law only through these marginals.

use serde::Serialize;

use crate::error::{Error, Result};

/// Absolute tolerance for probability-vector normalization checks.
pub const PROB_TOL: f64 = 1e-9;

/// A validated probability vector on a finite alphabet.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    /// Validates non-negativity and normalization (sum within [`PROB_TOL`] of 1).
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Validation("empty probability vector".into()));
        }
        for (i, &p) in probs.iter().enumerate() {
            if !(0.0..=1.0 + PROB_TOL).contains(&p) {
                return Err(Error::Validation(format!(
                    "probability entry {i} = {p} outside [0, 1]"
                )));
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > PROB_TOL {
            return Err(Error::Validation(format!(
                "probability vector sums to {sum}, expected 1"
            )));
        }
        Ok(Self { probs })
    }

    pub fn uniform(k: usize) -> Self {
        Self {
            probs: vec![1.0 / k as f64; k],
        }
    }

    /// Point mass on symbol `i`.
    pub fn point_mass(k: usize, i: usize) -> Self {
        let mut probs = vec![0.0; k];
        probs[i] = 1.0;
        Self { probs }
    }

    /// Constructs without re-validating; for internal callers that already
    /// guarantee the invariants (grid enumeration, mass moves).
    pub(crate) fn from_validated(probs: Vec<f64>) -> Self {
        debug_assert!(probs.iter().all(|&p| p >= 0.0));
        debug_assert!((probs.iter().sum::<f64>() - 1.0).abs() <= PROB_TOL);
        Self { probs }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

impl std::ops::Index<usize> for Distribution {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.probs[i]
    }
}

/// A row-stochastic one-way channel matrix (`rows` inputs, `cols` outputs).
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl ChannelMatrix {
    /// Validates that `entries` is a `rows` x `cols` row-major matrix with
    /// entries in [0, 1] and unit row sums.
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Validation("channel matrix must be non-empty".into()));
        }
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "expected {rows}x{cols} = {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        for (i, &p) in entries.iter().enumerate() {
            if !(0.0..=1.0 + PROB_TOL).contains(&p) {
                return Err(Error::Validation(format!(
                    "transition entry {i} = {p} outside [0, 1]"
                )));
            }
        }
        for r in 0..rows {
            let sum: f64 = entries[r * cols..(r + 1) * cols].iter().sum();
            if (sum - 1.0).abs() > PROB_TOL {
                return Err(Error::Validation(format!(
                    "transition row {r} sums to {sum}, expected 1"
                )));
            }
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }
}

/// Transmission direction of a two-way channel.
///
/// `Forward` is terminal 1 sending to terminal 2 (law `forward`, input `x1`,
/// state `x2`); `Backward` is terminal 2 sending to terminal 1 (law
/// `backward`, input `x2`, state `x1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

/// A discrete memoryless two-way channel, stored as its two marginal
/// transition tensors.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoWayChannel {
    nx1: usize,
    nx2: usize,
    ny1: usize,
    ny2: usize,
    /// `forward[x1][x2][y2]`, flattened row-major.
    forward: Vec<f64>,
    /// `backward[x1][x2][y1]`, flattened row-major.
    backward: Vec<f64>,
}

impl TwoWayChannel {
    pub fn new(
        nx1: usize,
        nx2: usize,
        ny1: usize,
        ny2: usize,
        forward: Vec<f64>,
        backward: Vec<f64>,
    ) -> Result<Self> {
        if nx1 == 0 || nx2 == 0 || ny1 == 0 || ny2 == 0 {
            return Err(Error::Validation("alphabet sizes must be >= 1".into()));
        }
        if forward.len() != nx1 * nx2 * ny2 {
            return Err(Error::Dimension(format!(
                "forward tensor has {} entries, expected {}",
                forward.len(),
                nx1 * nx2 * ny2
            )));
        }
        if backward.len() != nx1 * nx2 * ny1 {
            return Err(Error::Dimension(format!(
                "backward tensor has {} entries, expected {}",
                backward.len(),
                nx1 * nx2 * ny1
            )));
        }
        let ch = Self {
            nx1,
            nx2,
            ny1,
            ny2,
            forward,
            backward,
        };
        for x1 in 0..nx1 {
            for x2 in 0..nx2 {
                validate_row(ch.forward_row(x1, x2), &format!("forward[{x1}][{x2}]"))?;
                validate_row(ch.backward_row(x1, x2), &format!("backward[{x1}][{x2}]"))?;
            }
        }
        Ok(ch)
    }

    pub fn nx1(&self) -> usize {
        self.nx1
    }
    pub fn nx2(&self) -> usize {
        self.nx2
    }
    pub fn ny1(&self) -> usize {
        self.ny1
    }
    pub fn ny2(&self) -> usize {
        self.ny2
    }

    /// `P(. | x1, x2)` for terminal 2's observation, length `ny2`.
    pub fn forward_row(&self, x1: usize, x2: usize) -> &[f64] {
        let base = (x1 * self.nx2 + x2) * self.ny2;
        &self.forward[base..base + self.ny2]
    }

    /// `P(. | x1, x2)` for terminal 1's observation, length `ny1`.
    pub fn backward_row(&self, x1: usize, x2: usize) -> &[f64] {
        let base = (x1 * self.nx2 + x2) * self.ny1;
        &self.backward[base..base + self.ny1]
    }

    /// Input alphabet size of the sending terminal for `dir`.
    pub fn input_size(&self, dir: Direction) -> usize {
        match dir {
            Direction::Forward => self.nx1,
            Direction::Backward => self.nx2,
        }
    }

    /// Output alphabet size of the receiving terminal for `dir`.
    pub fn output_size(&self, dir: Direction) -> usize {
        match dir {
            Direction::Forward => self.ny2,
            Direction::Backward => self.ny1,
        }
    }

    /// Number of state symbols (the opposite terminal's input alphabet).
    pub fn state_count(&self, dir: Direction) -> usize {
        match dir {
            Direction::Forward => self.nx2,
            Direction::Backward => self.nx1,
        }
    }

    /// The one-way channel seen in direction `dir` when the opposite
    /// terminal's input is frozen at `fixed_symbol`.
    pub fn sub_channel(&self, dir: Direction, fixed_symbol: usize) -> Result<ChannelMatrix> {
        let states = self.state_count(dir);
        if fixed_symbol >= states {
            return Err(Error::IndexOutOfRange {
                index: fixed_symbol,
                size: states,
            });
        }
        let (rows, cols) = (self.input_size(dir), self.output_size(dir));
        let mut entries = Vec::with_capacity(rows * cols);
        match dir {
            Direction::Forward => {
                for x1 in 0..rows {
                    entries.extend_from_slice(self.forward_row(x1, fixed_symbol));
                }
            }
            Direction::Backward => {
                for x2 in 0..rows {
                    entries.extend_from_slice(self.backward_row(fixed_symbol, x2));
                }
            }
        }
        ChannelMatrix::new(rows, cols, entries)
    }

    /// All state-dependent one-way channels for `dir`, indexed by state symbol.
    pub fn sub_channels(&self, dir: Direction) -> Vec<ChannelMatrix> {
        (0..self.state_count(dir))
            .map(|s| self.sub_channel(dir, s).expect("state index in range"))
            .collect()
    }
}

fn validate_row(row: &[f64], what: &str) -> Result<()> {
    for (i, &p) in row.iter().enumerate() {
        if !(0.0..=1.0 + PROB_TOL).contains(&p) {
            return Err(Error::Validation(format!(
                "{what} entry {i} = {p} outside [0, 1]"
            )));
        }
    }
    let sum: f64 = row.iter().sum();
    if (sum - 1.0).abs() > PROB_TOL {
        return Err(Error::Validation(format!(
            "{what} sums to {sum}, expected 1"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Channel file format
// ---------------------------------------------------------------------------

/// A tensor cell in a channel file: either a plain number or a small
/// expression in the substitution parameter `gamma` ("gamma", "0.8-gamma",
/// "0.2+gamma").
#[derive(Debug, Clone, serde::Deserialize)]
#[serde(untagged)]
enum Cell {
    Num(f64),
    Expr(String),
}

impl Cell {
    fn resolve(&self, gamma: Option<f64>) -> Result<f64> {
        match self {
            Cell::Num(v) => Ok(*v),
            Cell::Expr(s) => {
                let gamma = gamma.ok_or_else(|| {
                    Error::Validation(format!(
                        "cell \"{s}\" requires a gamma substitution, but none was supplied"
                    ))
                })?;
                parse_gamma_expr(s, gamma)
            }
        }
    }
}

/// Parses `c`, `gamma`, `c+gamma`, or `c-gamma`.
fn parse_gamma_expr(s: &str, gamma: f64) -> Result<f64> {
    let t = s.trim();
    if t == "gamma" {
        return Ok(gamma);
    }
    for (op, sign) in [('+', 1.0), ('-', -1.0)] {
        if let Some(c) = t.strip_suffix("gamma").and_then(|h| h.trim_end().strip_suffix(op)) {
            let c: f64 = c
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad gamma expression \"{s}\"")))?;
            return Ok(c + sign * gamma);
        }
    }
    t.parse()
        .map_err(|_| Error::Parse(format!("bad gamma expression \"{s}\"")))
}

#[derive(serde::Deserialize)]
struct ChannelFile {
    nx1: usize,
    nx2: usize,
    ny1: usize,
    ny2: usize,
    forward: Vec<Vec<Vec<Cell>>>,
    backward: Vec<Vec<Vec<Cell>>>,
    /// Optional joint law `joint[x1][x2][y1][y2]`; validated against the
    /// marginals and then discarded.
    #[serde(default)]
    joint: Option<Vec<Vec<Vec<Vec<Cell>>>>>,
}

/// Loads a channel from the JSON file format, with no gamma substitution.
pub fn load_channel(text: &str) -> Result<TwoWayChannel> {
    load_channel_with(text, None)
}

/// Loads a channel, substituting `gamma` into any symbolic cells.
pub fn load_channel_with(text: &str, gamma: Option<f64>) -> Result<TwoWayChannel> {
    let file: ChannelFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let forward = flatten_tensor(&file.forward, file.nx1, file.nx2, file.ny2, gamma, "forward")?;
    let backward = flatten_tensor(&file.backward, file.nx1, file.nx2, file.ny1, gamma, "backward")?;
    let ch = TwoWayChannel::new(file.nx1, file.nx2, file.ny1, file.ny2, forward, backward)?;
    if let Some(joint) = &file.joint {
        validate_joint(joint, &ch, gamma)?;
    }
    Ok(ch)
}

fn flatten_tensor(
    t: &[Vec<Vec<Cell>>],
    n1: usize,
    n2: usize,
    n3: usize,
    gamma: Option<f64>,
    what: &str,
) -> Result<Vec<f64>> {
    if t.len() != n1 {
        return Err(Error::Dimension(format!(
            "{what} has {} blocks, expected {n1}",
            t.len()
        )));
    }
    let mut out = Vec::with_capacity(n1 * n2 * n3);
    for (i, block) in t.iter().enumerate() {
        if block.len() != n2 {
            return Err(Error::Dimension(format!(
                "{what}[{i}] has {} rows, expected {n2}",
                block.len()
            )));
        }
        for (j, row) in block.iter().enumerate() {
            if row.len() != n3 {
                return Err(Error::Dimension(format!(
                    "{what}[{i}][{j}] has {} entries, expected {n3}",
                    row.len()
                )));
            }
            for cell in row {
                out.push(cell.resolve(gamma)?);
            }
        }
    }
    Ok(out)
}

/// Checks that an explicit joint law is consistent with both marginals, to
/// within [`PROB_TOL`] per entry.
fn validate_joint(
    joint: &[Vec<Vec<Vec<Cell>>>],
    ch: &TwoWayChannel,
    gamma: Option<f64>,
) -> Result<()> {
    let (nx1, nx2, ny1, ny2) = (ch.nx1, ch.nx2, ch.ny1, ch.ny2);
    if joint.len() != nx1 {
        return Err(Error::Dimension("joint tensor x1 extent mismatch".into()));
    }
    for (x1, block) in joint.iter().enumerate() {
        if block.len() != nx2 {
            return Err(Error::Dimension("joint tensor x2 extent mismatch".into()));
        }
        for (x2, slice) in block.iter().enumerate() {
            if slice.len() != ny1 || slice.iter().any(|r| r.len() != ny2) {
                return Err(Error::Dimension("joint tensor output extent mismatch".into()));
            }
            let mut vals = vec![0.0; ny1 * ny2];
            for y1 in 0..ny1 {
                for y2 in 0..ny2 {
                    let v = slice[y1][y2].resolve(gamma)?;
                    if !(0.0..=1.0 + PROB_TOL).contains(&v) {
                        return Err(Error::Validation(format!(
                            "joint[{x1}][{x2}][{y1}][{y2}] = {v} outside [0, 1]"
                        )));
                    }
                    vals[y1 * ny2 + y2] = v;
                }
            }
            for y2 in 0..ny2 {
                let m: f64 = (0..ny1).map(|y1| vals[y1 * ny2 + y2]).sum();
                if (m - ch.forward_row(x1, x2)[y2]).abs() > PROB_TOL {
                    return Err(Error::Validation(format!(
                        "joint marginal over y1 disagrees with forward[{x1}][{x2}][{y2}]"
                    )));
                }
            }
            for y1 in 0..ny1 {
                let m: f64 = vals[y1 * ny2..(y1 + 1) * ny2].iter().sum();
                if (m - ch.backward_row(x1, x2)[y1]).abs() > PROB_TOL {
                    return Err(Error::Validation(format!(
                        "joint marginal over y2 disagrees with backward[{x1}][{x2}][{y1}]"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Serializes a channel back to the JSON file format. Entries round-trip
/// exactly: `load_channel(save_channel(ch)) == ch` bit for bit.
pub fn save_channel(ch: &TwoWayChannel) -> String {
    #[derive(Serialize)]
    struct Out<'a> {
        nx1: usize,
        nx2: usize,
        ny1: usize,
        ny2: usize,
        forward: Vec<Vec<&'a [f64]>>,
        backward: Vec<Vec<&'a [f64]>>,
    }
    let forward = (0..ch.nx1)
        .map(|x1| (0..ch.nx2).map(|x2| ch.forward_row(x1, x2)).collect())
        .collect();
    let backward = (0..ch.nx1)
        .map(|x1| (0..ch.nx2).map(|x2| ch.backward_row(x1, x2)).collect())
        .collect();
    let out = Out {
        nx1: ch.nx1,
        nx2: ch.nx2,
        ny1: ch.ny1,
        ny2: ch.ny2,
        forward,
        backward,
    };
    serde_json::to_string_pretty(&out).expect("channel serialization cannot fail")
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const TABLE1: &str = include_str!("../fixtures/table1.json");

    #[test]
    fn distribution_rejects_bad_vectors() {
        assert!(Distribution::new(vec![0.5, 0.4]).is_err());
        assert!(Distribution::new(vec![-0.1, 1.1]).is_err());
        assert!(Distribution::new(vec![]).is_err());
        assert!(Distribution::new(vec![0.3, 0.7]).is_ok());
    }

    #[test]
    fn loads_table1() {
        let ch = load_channel(TABLE1).unwrap();
        assert_eq!((ch.nx1(), ch.nx2(), ch.ny1(), ch.ny2()), (2, 3, 3, 2));
        assert_eq!(ch.backward_row(0, 1), &[0.1, 0.8, 0.1]);
    }

    #[test]
    fn sub_channel_table1() {
        let ch = load_channel(TABLE1).unwrap();
        let bwd0 = ch.sub_channel(Direction::Backward, 0).unwrap();
        assert_eq!((bwd0.rows(), bwd0.cols()), (3, 3));
        assert_eq!(bwd0.row(0), &[0.8, 0.1, 0.1]);
        assert_eq!(bwd0.row(1), &[0.1, 0.8, 0.1]);
        assert_eq!(bwd0.row(2), &[0.1, 0.1, 0.8]);

        let fwd1 = ch.sub_channel(Direction::Forward, 1).unwrap();
        assert_eq!((fwd1.rows(), fwd1.cols()), (2, 2));
        assert_eq!(fwd1.row(0), &[1.0, 0.0]);
        assert_eq!(fwd1.row(1), &[0.25, 0.75]);
    }

    #[test]
    fn sub_channel_out_of_range() {
        let ch = load_channel(TABLE1).unwrap();
        assert!(matches!(
            ch.sub_channel(Direction::Forward, 3),
            Err(Error::IndexOutOfRange { index: 3, size: 3 })
        ));
        assert!(ch.sub_channel(Direction::Backward, 2).is_err());
    }

    #[test]
    fn rejects_row_sum_off() {
        let bad = r#"{ "nx1": 1, "nx2": 1, "ny1": 2, "ny2": 2,
            "forward": [[[0.5, 0.4]]], "backward": [[[0.5, 0.5]]] }"#;
        assert!(matches!(load_channel(bad), Err(Error::Validation(_))));
    }

    #[test]
    fn rejects_negative_entry() {
        let bad = r#"{ "nx1": 1, "nx2": 1, "ny1": 2, "ny2": 2,
            "forward": [[[1.2, -0.2]]], "backward": [[[0.5, 0.5]]] }"#;
        assert!(load_channel(bad).is_err());
    }

    #[test]
    fn rejects_dimension_mismatch() {
        let bad = r#"{ "nx1": 2, "nx2": 1, "ny1": 2, "ny2": 2,
            "forward": [[[1.0, 0.0]]], "backward": [[[0.5, 0.5]]] }"#;
        assert!(matches!(load_channel(bad), Err(Error::Dimension(_))));
    }

    #[test]
    fn rejects_malformed_syntax() {
        assert!(matches!(load_channel("{ not json"), Err(Error::Parse(_))));
    }

    #[test]
    fn save_load_round_trip_exact() {
        let ch = load_channel(TABLE1).unwrap();
        let saved = save_channel(&ch);
        let reloaded = load_channel(&saved).unwrap();
        assert_eq!(ch, reloaded);
    }

    #[test]
    fn gamma_substitution() {
        let text = r#"{ "nx1": 1, "nx2": 1, "ny1": 2, "ny2": 3,
            "forward": [[[0.2, "gamma", "0.8-gamma"]]],
            "backward": [[[1.0, 0.0]]] }"#;
        let ch = load_channel_with(text, Some(0.3)).unwrap();
        assert_eq!(ch.forward_row(0, 0), &[0.2, 0.3, 0.5]);
        // without a substitution the file is unusable
        assert!(load_channel(text).is_err());
    }

    #[test]
    fn joint_consistency_checked() {
        let good = r#"{ "nx1": 1, "nx2": 1, "ny1": 2, "ny2": 2,
            "forward": [[[0.5, 0.5]]], "backward": [[[0.3, 0.7]]],
            "joint": [[[[0.2, 0.1], [0.3, 0.4]]]] }"#;
        assert!(load_channel(good).is_ok());
        let bad = r#"{ "nx1": 1, "nx2": 1, "ny1": 2, "ny2": 2,
            "forward": [[[0.5, 0.5]]], "backward": [[[0.3, 0.7]]],
            "joint": [[[[0.25, 0.15], [0.25, 0.35]]]] }"#;
        assert!(matches!(load_channel(bad), Err(Error::Validation(_))));
    }

    #[test]
    fn sub_channels_satisfy_matrix_invariants() {
        let ch = load_channel(TABLE1).unwrap();
        for dir in [Direction::Forward, Direction::Backward] {
            for s in 0..ch.state_count(dir) {
                // ChannelMatrix::new re-validates; unwrap is the assertion
                ch.sub_channel(dir, s).unwrap();
            }
        }
    }
}
