//! Executable screens for the channel symmetry conditions: the
//! common-optimal-input condition (a), the mutual-information invariance
//! condition (b1), three cheap necessary-condition screens, and a
//! falsification search for the entropy inequality of condition (b2).
//!
//! Grid search certifies failures (a witnessed gap) but can never certify
//! truth, so every "holds" verdict is qualified by the grid step and
//! refinement tolerance it was computed at; reports carry both.

use serde::Serialize;

use crate::ba::max_output_entropy;
use crate::bounds::{alpha_star, beta_star, AlphaStar, BetaStar};
use crate::channel::{ChannelMatrix, Direction, Distribution, TwoWayChannel};
use crate::error::{Error, Result};
use crate::info::{entropy_slice, row_entropy_table, JointInput, ZERO_PROB};
use crate::optim::{self, OutputEntropyGap};
use crate::parallel::par_chunk_map;
use crate::simplex::GridSpec;

pub const DEFAULT_SYM_TOL: f64 = 1e-6;

/// Resolution settings shared by all screens.
#[derive(Debug, Clone)]
pub struct SymmetryConfig {
    /// Gap threshold below which a condition is reported as holding.
    pub sym_tol: f64,
    /// Grid step for optimizer seeding.
    pub delta: f64,
    /// Local refinement resolution.
    pub refine_tol: f64,
    /// Grid step for the joint-simplex (b2) falsification sweep.
    pub b2_delta: f64,
    pub eval_cap: u64,
}

impl Default for SymmetryConfig {
    fn default() -> Self {
        Self {
            sym_tol: DEFAULT_SYM_TOL,
            delta: crate::bounds::DEFAULT_DELTA,
            refine_tol: crate::bounds::DEFAULT_REFINE_TOL,
            b2_delta: 0.1,
            eval_cap: crate::bounds::DEFAULT_EVAL_CAP,
        }
    }
}

/// A screened condition with its witnessed gap.
#[derive(Debug, Clone, Serialize)]
pub struct GapCheck {
    pub holds: bool,
    pub gap: f64,
}

/// Condition (a) verdict with the near-common optimizer.
#[derive(Debug, Clone, Serialize)]
pub struct CondA {
    pub holds: bool,
    pub gap: f64,
    pub witness: Distribution,
}

/// Row-entropy-table screen verdict.
#[derive(Debug, Clone, Serialize)]
pub struct Thm2Result {
    pub holds: bool,
    pub max_discrepancy: f64,
    /// `(x1', x1'', x2)` attaining the discrepancy; absent for single-input
    /// channels where no pair exists.
    pub worst_pair: Option<(usize, usize, usize)>,
}

/// Outcome of the (b2) falsification sweep. Absence of a counterexample at
/// the recorded resolution is not a proof that (b2) holds.
#[derive(Debug, Clone, Serialize)]
pub struct B2Search {
    pub counterexample_found: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<JointInput>,
    pub resolution: f64,
}

/// Aggregated screen outcomes, with the resolutions they were computed at.
#[derive(Debug, Clone, Serialize)]
pub struct SymmetryReport {
    pub cond_a: CondA,
    pub cond_b1: GapCheck,
    pub thm1_reverse_common_max: GapCheck,
    pub thm2_entropy_table_equal: Thm2Result,
    /// `None` when the positivity hypothesis fails on the condition-(a)
    /// witness, making the screen inapplicable.
    pub thm3_common_entropy_max: Option<GapCheck>,
    /// `None` when the row-entropy screen already failed, which settles (b2)
    /// without a search.
    pub b2_search: Option<B2Search>,
    pub delta: f64,
    pub refine_tol: f64,
    pub sym_tol: f64,
}

/// Condition (a): is there a (near-)common capacity-achieving input for all
/// sub-channels of `dir`? The gap is the alpha deviation.
pub fn check_condition_a(ch: &TwoWayChannel, dir: Direction, cfg: &SymmetryConfig) -> Result<CondA> {
    let a = alpha_star(ch, dir, cfg.delta, cfg.refine_tol)?;
    Ok(cond_a_from(&a, cfg))
}

fn cond_a_from(a: &AlphaStar, cfg: &SymmetryConfig) -> CondA {
    CondA {
        holds: a.value <= cfg.sym_tol,
        gap: a.value,
        witness: a.witness.clone(),
    }
}

/// Condition (b1): is the input-output mutual information invariant across
/// sub-channels of `dir`? The gap is the beta deviation; "holds" means no
/// gap was found at grid-plus-refinement resolution.
pub fn check_condition_b1(
    ch: &TwoWayChannel,
    dir: Direction,
    cfg: &SymmetryConfig,
) -> Result<GapCheck> {
    let b = beta_star(ch, dir, cfg.delta, cfg.refine_tol)?;
    Ok(gap_check(b.value, cfg.sym_tol))
}

fn gap_check(gap: f64, tol: f64) -> GapCheck {
    GapCheck {
        holds: gap <= tol,
        gap,
    }
}

/// Necessary screen for (b1): the reverse-direction sub-channels must share
/// a common capacity-achieving input. A failure certifies that (b1) fails
/// without computing the beta deviation.
pub fn check_thm1(ch: &TwoWayChannel, cfg: &SymmetryConfig) -> Result<GapCheck> {
    let a = alpha_star(ch, Direction::Backward, cfg.delta, cfg.refine_tol)?;
    Ok(gap_check(a.value, cfg.sym_tol))
}

/// Necessary screen for (b2): the per-pair transition-row entropies
/// H(Y1 | X1 = x1, X2 = x2) must not depend on x1.
#[allow(clippy::needless_range_loop)]
pub fn check_thm2(ch: &TwoWayChannel, sym_tol: f64) -> Thm2Result {
    let table = row_entropy_table(ch, Direction::Backward);
    let mut worst = 0.0;
    let mut worst_pair = None;
    for x2 in 0..ch.nx2() {
        for a in 0..ch.nx1() {
            for b in a + 1..ch.nx1() {
                let d = (table[a][x2] - table[b][x2]).abs();
                if worst_pair.is_none() || d > worst {
                    worst = d;
                    worst_pair = Some((a, b, x2));
                }
            }
        }
    }
    Thm2Result {
        holds: worst <= sym_tol,
        max_discrepancy: worst,
        worst_pair,
    }
}

/// Necessary screen for (a)+(b2): the backward sub-channels must share a
/// common output-entropy maximizer. Only applicable when the condition-(a)
/// witness puts positive mass on every input symbol.
pub fn check_thm3(
    ch: &TwoWayChannel,
    cond_a_witness: &Distribution,
    cfg: &SymmetryConfig,
) -> Result<Option<GapCheck>> {
    if cond_a_witness.probs().iter().any(|&p| p <= 0.0) {
        return Ok(None);
    }
    let subs = ch.sub_channels(Direction::Backward);
    let targets: Vec<f64> = subs
        .iter()
        .map(|sub| max_output_entropy(sub, cfg.refine_tol).0)
        .collect();
    let grid = GridSpec::new(ch.nx2(), cfg.delta)?;
    let sub_refs: Vec<&ChannelMatrix> = subs.iter().collect();
    let objective = OutputEntropyGap::with_targets(sub_refs, targets);
    let (_, gap) =
        optim::minimize_max_over_simplex(&objective, &grid, cfg.delta, cfg.refine_tol);
    Ok(Some(gap_check(gap.max(0.0), cfg.sym_tol)))
}

/// Sweeps joint input laws on the `delta`-grid looking for a violation of
/// the (b2) entropy inequality H1(Y1|X1) <= H2(Y1|X1), where the comparison
/// law replaces the X1 marginal with the condition-(a) witness and decouples
/// the inputs. Returns the lexicographically first violation, if any.
pub fn search_b2_violation(
    ch: &TwoWayChannel,
    delta: f64,
    cond_a_witness: &Distribution,
    cfg: &SymmetryConfig,
) -> Result<B2Search> {
    let (nx1, nx2) = (ch.nx1(), ch.nx2());
    if cond_a_witness.len() != nx1 {
        return Err(Error::Dimension(format!(
            "witness has {} symbols, channel has {nx1} x1 inputs",
            cond_a_witness.len()
        )));
    }
    let grid = GridSpec::new(nx1 * nx2, delta)?;
    let count = grid.count()?;
    if count as u128 > cfg.eval_cap as u128 {
        return Err(Error::EvalCapExceeded {
            required: count as u128,
            cap: cfg.eval_cap,
        });
    }
    let pstar = cond_a_witness.probs();
    let sym_tol = cfg.sym_tol;

    let firsts = par_chunk_map(count, |range| {
        let n = grid.steps() as f64;
        let mut comp = grid.composition_at(range.start);
        let mut joint = vec![0.0; nx1 * nx2];
        let mut cond = vec![0.0; nx2];
        let mut out = vec![0.0; ch.ny1()];
        for rank in range {
            for (j, &m) in joint.iter_mut().zip(comp.iter()) {
                *j = m as f64 / n;
            }
            // H1: conditional output entropy under the joint law itself
            let mut h1 = 0.0;
            for x1 in 0..nx1 {
                let px1: f64 = joint[x1 * nx2..(x1 + 1) * nx2].iter().sum();
                if px1 <= ZERO_PROB {
                    continue;
                }
                for (x2, c) in cond.iter_mut().enumerate() {
                    *c = joint[x1 * nx2 + x2] / px1;
                }
                h1 += px1 * mixed_row_entropy(ch, x1, &cond, &mut out);
            }
            // H2: same X2 marginal everywhere, X1 weighted by the witness
            let mut h2 = 0.0;
            for (x2, c) in cond.iter_mut().enumerate() {
                *c = (0..nx1).map(|x1| joint[x1 * nx2 + x2]).sum();
            }
            for (x1, &w) in pstar.iter().enumerate() {
                if w <= ZERO_PROB {
                    continue;
                }
                h2 += w * mixed_row_entropy(ch, x1, &cond, &mut out);
            }
            if h1 - h2 > sym_tol {
                return Some((rank, joint.clone()));
            }
            grid.next_composition(&mut comp);
        }
        None
    });
    // first violation in grid order: chunks are ordered, take the first hit
    let hit = firsts.into_iter().flatten().next();
    Ok(match hit {
        Some((_, joint)) => B2Search {
            counterexample_found: true,
            witness: Some(JointInput::new(nx1, nx2, joint)?),
            resolution: delta,
        },
        None => B2Search {
            counterexample_found: false,
            witness: None,
            resolution: delta,
        },
    })
}

/// Entropy of terminal 1's output for fixed x1 under the X2 law `weights`.
fn mixed_row_entropy(ch: &TwoWayChannel, x1: usize, weights: &[f64], out: &mut [f64]) -> f64 {
    out.iter_mut().for_each(|o| *o = 0.0);
    for (x2, &w) in weights.iter().enumerate() {
        let row = ch.backward_row(x1, x2);
        for (o, &r) in out.iter_mut().zip(row) {
            *o += w * r;
        }
    }
    entropy_slice(out)
}

/// Runs all screens in the cheap-first order: the row-entropy and
/// common-maximizer screens come free or nearly free, and a failed
/// row-entropy screen settles (b2) so its sweep is skipped.
///
/// The alpha and beta deviations are taken from the already-computed bound
/// pipeline outputs rather than recomputed.
pub fn symmetry_report(
    ch: &TwoWayChannel,
    alpha_fwd: &AlphaStar,
    beta_bwd: &BetaStar,
    cfg: &SymmetryConfig,
) -> Result<SymmetryReport> {
    let thm2 = check_thm2(ch, cfg.sym_tol);
    let thm1 = check_thm1(ch, cfg)?;
    let cond_a = cond_a_from(alpha_fwd, cfg);
    let thm3 = check_thm3(ch, &cond_a.witness, cfg)?;
    let cond_b1 = gap_check(beta_bwd.value, cfg.sym_tol);
    let b2_search = if thm2.holds {
        Some(search_b2_violation(ch, cfg.b2_delta, &cond_a.witness, cfg)?)
    } else {
        None
    };
    Ok(SymmetryReport {
        cond_a,
        cond_b1,
        thm1_reverse_common_max: thm1,
        thm2_entropy_table_equal: thm2,
        thm3_common_entropy_max: thm3,
        b2_search,
        delta: cfg.delta,
        refine_tol: cfg.refine_tol,
        sym_tol: cfg.sym_tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{load_channel, load_channel_with};

    const TABLE1: &str = include_str!("../fixtures/table1.json");
    const TABLE2: &str = include_str!("../fixtures/table2.json");
    const BSC: &str = include_str!("../fixtures/bsc.json");

    fn h2(p: f64) -> f64 {
        if p <= 0.0 || p >= 1.0 {
            0.0
        } else {
            -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
        }
    }

    #[test]
    fn bsc_example_screen_outcomes() {
        let ch = load_channel(BSC).unwrap();
        let cfg = SymmetryConfig::default();
        let a = check_condition_a(&ch, Direction::Forward, &cfg).unwrap();
        assert!(a.holds, "uniform is optimal for every BSC, gap {}", a.gap);
        let t1 = check_thm1(&ch, &cfg).unwrap();
        assert!(t1.holds, "thm1 gap {}", t1.gap);
        let t2 = check_thm2(&ch, cfg.sym_tol);
        assert!(!t2.holds);
        assert!((t2.max_discrepancy - (h2(0.1) - h2(0.04)).abs()).abs() < 1e-12);
        let b1 = check_condition_b1(&ch, Direction::Backward, &cfg).unwrap();
        assert!(!b1.holds, "distinct crossovers break invariance");
    }

    #[test]
    fn table1_screen_outcomes() {
        let ch = load_channel(TABLE1).unwrap();
        let cfg = SymmetryConfig::default();
        let t1 = check_thm1(&ch, &cfg).unwrap();
        assert!(t1.holds, "identical backward subs, gap {}", t1.gap);
        let t2 = check_thm2(&ch, cfg.sym_tol);
        assert!(t2.holds, "all rows share an entropy");
        let b1 = check_condition_b1(&ch, Direction::Backward, &cfg).unwrap();
        assert!(b1.holds, "beta gap {}", b1.gap);
        let t3 = check_thm3(&ch, &Distribution::uniform(2), &cfg).unwrap().unwrap();
        assert!(t3.holds, "identical subs share maximizers, gap {}", t3.gap);
    }

    #[test]
    fn table2_thm2_discrepancy() {
        let ch = load_channel_with(TABLE2, Some(0.2)).unwrap();
        let t2 = check_thm2(&ch, 1e-6);
        assert!(!t2.holds);
        let expected = (h2(0.04) - h2(0.039)).abs();
        assert!((t2.max_discrepancy - expected).abs() < 1e-12);
        assert_eq!(t2.worst_pair, Some((0, 1, 0)));
    }

    #[test]
    fn thm2_single_input_has_no_pair() {
        let text = r#"{ "nx1": 1, "nx2": 2, "ny1": 2, "ny2": 1,
            "forward": [[[1.0], [1.0]]],
            "backward": [[[0.9, 0.1], [0.2, 0.8]]] }"#;
        let ch = load_channel(text).unwrap();
        let t2 = check_thm2(&ch, 1e-6);
        assert!(t2.holds && t2.worst_pair.is_none());
    }

    #[test]
    fn thm1_z_vs_inverse_z_fails_and_matches_oracle() {
        // backward sub-channels: a Z-type and an inverse-Z-type channel,
        // whose capacity-achieving inputs differ
        let text = r#"{ "nx1": 2, "nx2": 2, "ny1": 2, "ny2": 1,
            "forward": [[[1.0], [1.0]], [[1.0], [1.0]]],
            "backward": [[[1.0, 0.0], [0.25, 0.75]], [[0.75, 0.25], [0.0, 1.0]]] }"#;
        let ch = load_channel(text).unwrap();
        let cfg = SymmetryConfig::default();
        let t1 = check_thm1(&ch, &cfg).unwrap();
        assert!(!t1.holds);

        // 1-D grid oracle over the shared input probability
        let subs = ch.sub_channels(Direction::Backward);
        let caps: Vec<f64> = subs
            .iter()
            .map(|s| crate::ba::ba_capacity_default(s).capacity)
            .collect();
        let mut oracle = f64::INFINITY;
        let steps = 10_000;
        for i in 0..=steps {
            let q = i as f64 / steps as f64;
            let p = [q, 1.0 - q];
            let g = caps
                .iter()
                .zip(&subs)
                .map(|(&c, sub)| c - crate::info::mi_slice(&p, sub))
                .fold(f64::NEG_INFINITY, f64::max);
            oracle = oracle.min(g);
        }
        assert!(t1.gap <= oracle + 1e-9, "refined gap cannot exceed the oracle");
        assert!((t1.gap - oracle).abs() < 1e-3, "gap {} vs oracle {oracle}", t1.gap);
    }

    #[test]
    fn thm3_z_vs_inverse_z_fails() {
        let text = r#"{ "nx1": 2, "nx2": 2, "ny1": 2, "ny2": 1,
            "forward": [[[1.0], [1.0]], [[1.0], [1.0]]],
            "backward": [[[1.0, 0.0], [0.5, 0.5]], [[0.5, 0.5], [0.0, 1.0]]] }"#;
        let ch = load_channel(text).unwrap();
        let cfg = SymmetryConfig::default();
        let t3 = check_thm3(&ch, &Distribution::uniform(2), &cfg).unwrap().unwrap();
        assert!(!t3.holds);
        // closed form: the minimax sits at the symmetric input, where both
        // output entropies equal h(1/4)
        assert!((t3.gap - (1.0 - h2(0.25))).abs() < 1e-4, "gap {}", t3.gap);
    }

    #[test]
    fn thm3_not_applicable_on_boundary_witness() {
        let ch = load_channel(TABLE1).unwrap();
        let witness = Distribution::point_mass(2, 0);
        let cfg = SymmetryConfig::default();
        assert!(check_thm3(&ch, &witness, &cfg).unwrap().is_none());
    }

    #[test]
    fn bsc_thm3_holds() {
        let ch = load_channel(BSC).unwrap();
        let cfg = SymmetryConfig::default();
        let t3 = check_thm3(&ch, &Distribution::uniform(2), &cfg).unwrap().unwrap();
        assert!(t3.holds, "uniform input maximizes every BSC's output entropy");
    }

    #[test]
    fn b2_search_table1_finds_nothing() {
        let ch = load_channel(TABLE1).unwrap();
        let cfg = SymmetryConfig::default();
        let a = check_condition_a(&ch, Direction::Forward, &cfg).unwrap();
        let r = search_b2_violation(&ch, 0.1, &a.witness, &cfg).unwrap();
        assert!(!r.counterexample_found);
        assert!(r.witness.is_none());
        assert_eq!(r.resolution, 0.1);
    }

    #[test]
    fn b2_search_degenerate_single_input() {
        let text = r#"{ "nx1": 1, "nx2": 2, "ny1": 2, "ny2": 1,
            "forward": [[[1.0], [1.0]]],
            "backward": [[[0.9, 0.1], [0.2, 0.8]]] }"#;
        let ch = load_channel(text).unwrap();
        let cfg = SymmetryConfig::default();
        let r = search_b2_violation(&ch, 0.25, &Distribution::uniform(1), &cfg).unwrap();
        assert!(!r.counterexample_found);
    }

    #[test]
    fn b2_search_detects_violation() {
        // x1=0 rows form an identity (entropy grows under input mixing);
        // x1=1 rows are constant. A witness concentrated on x1=1 makes the
        // decoupled comparison entropy zero while the joint law keeps the
        // identity channel active.
        let text = r#"{ "nx1": 2, "nx2": 2, "ny1": 2, "ny2": 1,
            "forward": [[[1.0], [1.0]], [[1.0], [1.0]]],
            "backward": [[[1.0, 0.0], [0.0, 1.0]], [[1.0, 0.0], [1.0, 0.0]]] }"#;
        let ch = load_channel(text).unwrap();
        let cfg = SymmetryConfig::default();
        let witness = Distribution::point_mass(2, 1);
        let r = search_b2_violation(&ch, 0.5, &witness, &cfg).unwrap();
        assert!(r.counterexample_found);
        let w = r.witness.unwrap();
        // H1 exceeds H2 at the witness law
        let px1 = w.marginal_x1();
        assert!(px1[0] > 0.0, "violation requires mass on the identity rows");
    }

    #[test]
    fn report_pipeline_bsc_skips_b2() {
        let ch = load_channel(BSC).unwrap();
        let cfg = SymmetryConfig::default();
        let alpha = alpha_star(&ch, Direction::Forward, cfg.delta, cfg.refine_tol).unwrap();
        let beta = beta_star(&ch, Direction::Backward, cfg.delta, cfg.refine_tol).unwrap();
        let rep = symmetry_report(&ch, &alpha, &beta, &cfg).unwrap();
        assert!(rep.cond_a.holds);
        assert!(!rep.thm2_entropy_table_equal.holds);
        assert!(rep.b2_search.is_none(), "failed screen settles (b2)");
        assert!(!rep.cond_b1.holds);
        assert!(rep.thm1_reverse_common_max.holds);
    }

    #[test]
    fn report_pipeline_table1_runs_b2() {
        let ch = load_channel(TABLE1).unwrap();
        let cfg = SymmetryConfig::default();
        let alpha = alpha_star(&ch, Direction::Forward, cfg.delta, cfg.refine_tol).unwrap();
        let beta = beta_star(&ch, Direction::Backward, cfg.delta, cfg.refine_tol).unwrap();
        let rep = symmetry_report(&ch, &alpha, &beta, &cfg).unwrap();
        assert!(!rep.cond_a.holds, "alpha = {}", rep.cond_a.gap);
        assert!(rep.cond_b1.holds);
        let b2 = rep.b2_search.unwrap();
        assert!(!b2.counterexample_found);
    }

    #[test]
    fn gaps_are_permutation_invariant() {
        let base = load_channel(BSC).unwrap();
        // relabel x1 (swap) and y1 (swap) consistently in both tensors
        let relabeled = r#"{ "nx1": 2, "nx2": 2, "ny1": 2, "ny2": 2,
            "forward": [[[0.1, 0.9], [0.2, 0.8]], [[0.9, 0.1], [0.8, 0.2]]],
            "backward": [[[0.1, 0.9], [0.9, 0.1]], [[0.04, 0.96], [0.96, 0.04]]] }"#;
        let perm = load_channel(relabeled).unwrap();
        let cfg = SymmetryConfig::default();
        let (a, b) = (&base, &perm);
        let ga = check_thm1(a, &cfg).unwrap().gap;
        let gb = check_thm1(b, &cfg).unwrap().gap;
        assert!((ga - gb).abs() < 1e-10, "thm1 {ga} vs {gb}");
        let ba = check_condition_b1(a, Direction::Backward, &cfg).unwrap().gap;
        let bb = check_condition_b1(b, Direction::Backward, &cfg).unwrap().gap;
        assert!((ba - bb).abs() < 1e-10, "beta {ba} vs {bb}");
        let aa = check_condition_a(a, Direction::Forward, &cfg).unwrap().gap;
        let ab = check_condition_a(b, Direction::Forward, &cfg).unwrap().gap;
        assert!((aa - ab).abs() < 1e-10, "alpha {aa} vs {ab}");
        let t2a = check_thm2(a, cfg.sym_tol).max_discrepancy;
        let t2b = check_thm2(b, cfg.sym_tol).max_discrepancy;
        assert!((t2a - t2b).abs() < 1e-12);
    }
}
