//! Capacity-region bound constructions: the inner bound over independent
//! inputs, the joint-input grid outer bound, the trivial rectangle, the
//! alpha/beta near-symmetry deviations, the shifted outer bound built from
//! the inner sweep, and the epsilon-neighborhood region.

use serde::Serialize;

use crate::ba::{ba_capacity_default, CapacityResult};
use crate::channel::{ChannelMatrix, Direction, Distribution, TwoWayChannel};
use crate::error::{Error, Result};
use crate::frontier::{hull_frontier, Frontier, RatePair};
use crate::info::{mi_slice, ZERO_PROB};
use crate::optim::{self, CapacityShortfall, MiGap};
use crate::parallel::{merge_min_by_rank, par_chunk_map};
use crate::simplex::GridSpec;

/// Default grid step, fine enough for visually converged regions at
/// alphabet sizes up to 3.
pub const DEFAULT_DELTA: f64 = 0.025;
pub const DEFAULT_REFINE_TOL: f64 = 1e-6;
/// Default cap on rate-pair evaluations in a single sweep.
pub const DEFAULT_EVAL_CAP: u64 = 100_000_000;

/// Knobs for [`full_report`].
#[derive(Debug, Clone)]
pub struct BoundsConfig {
    pub delta: f64,
    pub refine_tol: f64,
    pub eval_cap: u64,
    pub with_grid_outer: bool,
    pub grid_outer_delta: f64,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        Self {
            delta: DEFAULT_DELTA,
            refine_tol: DEFAULT_REFINE_TOL,
            eval_cap: DEFAULT_EVAL_CAP,
            with_grid_outer: false,
            grid_outer_delta: 0.1,
        }
    }
}

/// Near-common-optimal-input deviation (min over inputs of the worst
/// per-state capacity shortfall) and its minimizing witness.
#[derive(Debug, Clone)]
pub struct AlphaStar {
    pub value: f64,
    pub witness: Distribution,
}

/// Largest pairwise mutual-information gap over sub-channels under a shared
/// input. The value is a certified lower bound at grid-plus-refinement
/// resolution; `pair` names the sub-channels attaining it.
#[derive(Debug, Clone)]
pub struct BetaStar {
    pub value: f64,
    pub witness: Distribution,
    pub pair: (usize, usize),
}

/// All bound artifacts for one channel.
#[derive(Debug, Clone, Serialize)]
pub struct BoundsReport {
    pub i1_star: f64,
    pub i2_star: f64,
    pub alpha_star: f64,
    pub beta_star: f64,
    pub epsilon: f64,
    pub inner: Frontier,
    pub outer_simple: Frontier,
    pub outer_trivial: Frontier,
    pub eps_region: Frontier,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outer_grid: Option<Frontier>,
}

/// [`full_report`] plus the optimizer witnesses needed by the symmetry
/// screens.
#[derive(Debug, Clone)]
pub struct FullReport {
    pub report: BoundsReport,
    pub alpha: AlphaStar,
    pub beta: BetaStar,
}

// ---------------------------------------------------------------------------
// Rate-pair sweeps
// ---------------------------------------------------------------------------

/// Shannon inner bound: sweep all independent input pairs on the delta-grids
/// and take the frontier of the achieved rate pairs.
pub fn inner_bound(ch: &TwoWayChannel, delta: f64, eval_cap: u64) -> Result<Frontier> {
    let g1 = GridSpec::new(ch.nx1(), delta)?;
    let g2 = GridSpec::new(ch.nx2(), delta)?;
    let c1 = g1.count()?;
    let c2 = g2.count()?;
    let pairs = c1 as u128 * c2 as u128;
    if pairs > eval_cap as u128 {
        return Err(Error::EvalCapExceeded {
            required: pairs,
            cap: eval_cap,
        });
    }

    let fwd_subs = ch.sub_channels(Direction::Forward);
    let bwd_subs = ch.sub_channels(Direction::Backward);

    // per-grid-point mutual informations against every state's sub-channel;
    // the pair sweep then reduces to two dot products per pair
    let (p1, mi_fwd) = grid_mi_table(&g1, &fwd_subs);
    let (p2, mi_bwd) = grid_mi_table(&g2, &bwd_subs);
    let (nx1, nx2) = (ch.nx1(), ch.nx2());

    let chunks = par_chunk_map(c1 * c2, |range| {
        let mut pts = Vec::with_capacity((range.end - range.start) as usize);
        for rank in range {
            let i = (rank / c2) as usize;
            let j = (rank % c2) as usize;
            let pi = &p1[i * nx1..(i + 1) * nx1];
            let pj = &p2[j * nx2..(j + 1) * nx2];
            let mi = &mi_fwd[i * nx2..(i + 1) * nx2];
            let mj = &mi_bwd[j * nx1..(j + 1) * nx1];
            let r1: f64 = pj.iter().zip(mi).map(|(&a, &b)| a * b).sum();
            let r2: f64 = pi.iter().zip(mj).map(|(&a, &b)| a * b).sum();
            pts.push(RatePair::new(r1, r2));
        }
        hull_frontier(&pts).vertices().to_vec()
    });
    let merged: Vec<RatePair> = chunks.into_iter().flatten().collect();
    Ok(hull_frontier(&merged))
}

/// Materializes a grid's points (flattened) and each point's mutual
/// information against every sub-channel (flattened), in enumeration order.
fn grid_mi_table(grid: &GridSpec, subs: &[ChannelMatrix]) -> (Vec<f64>, Vec<f64>) {
    let k = grid.dim();
    let count = grid.count().expect("count checked by caller") as usize;
    let n_subs = subs.len();
    let rows = par_chunk_map(count as u64, |range| {
        let mut probs = Vec::with_capacity((range.end - range.start) as usize * k);
        let mut mis = Vec::with_capacity((range.end - range.start) as usize * n_subs);
        let mut comp = grid.composition_at(range.start);
        for _ in range {
            let p = grid.point(&comp);
            for sub in subs {
                mis.push(mi_slice(p.probs(), sub));
            }
            probs.extend_from_slice(p.probs());
            grid.next_composition(&mut comp);
        }
        (probs, mis)
    });
    let mut probs = Vec::with_capacity(count * k);
    let mut mis = Vec::with_capacity(count * n_subs);
    for (p, m) in rows {
        probs.extend(p);
        mis.extend(m);
    }
    (probs, mis)
}

/// Grid outer bound: sweep all joint input laws on the delta-grid of the
/// |X1||X2|-simplex.
pub fn outer_bound_grid(ch: &TwoWayChannel, delta: f64, eval_cap: u64) -> Result<Frontier> {
    let grid = GridSpec::new(ch.nx1() * ch.nx2(), delta)?;
    let count = grid.count()?;
    if count as u128 > eval_cap as u128 {
        return Err(Error::EvalCapExceeded {
            required: count as u128,
            cap: eval_cap,
        });
    }
    let fwd_subs = ch.sub_channels(Direction::Forward);
    let bwd_subs = ch.sub_channels(Direction::Backward);
    let (nx1, nx2) = (ch.nx1(), ch.nx2());

    let chunks = par_chunk_map(count, |range| {
        let mut pts = Vec::with_capacity((range.end - range.start) as usize);
        let mut comp = grid.composition_at(range.start);
        let n = grid.steps() as f64;
        let mut joint = vec![0.0; nx1 * nx2];
        for _ in range {
            for (j, &m) in joint.iter_mut().zip(comp.iter()) {
                *j = m as f64 / n;
            }
            let r1 = joint_rate(&joint, nx1, nx2, &fwd_subs, Direction::Forward);
            let r2 = joint_rate(&joint, nx1, nx2, &bwd_subs, Direction::Backward);
            pts.push(RatePair::new(r1, r2));
            grid.next_composition(&mut comp);
        }
        hull_frontier(&pts).vertices().to_vec()
    });
    let merged: Vec<RatePair> = chunks.into_iter().flatten().collect();
    Ok(hull_frontier(&merged))
}

/// Conditional mutual information of a raw joint law (row-major over x1)
/// against precomputed sub-channels.
pub(crate) fn joint_rate(
    joint: &[f64],
    nx1: usize,
    nx2: usize,
    subs: &[ChannelMatrix],
    dir: Direction,
) -> f64 {
    let (states, inputs) = match dir {
        Direction::Forward => (nx2, nx1),
        Direction::Backward => (nx1, nx2),
    };
    let mut cond = vec![0.0; inputs];
    let mut total = 0.0;
    for (s, sub) in subs.iter().enumerate().take(states) {
        let mut ps = 0.0;
        for x in 0..inputs {
            ps += match dir {
                Direction::Forward => joint[x * nx2 + s],
                Direction::Backward => joint[s * nx2 + x],
            };
        }
        if ps <= ZERO_PROB {
            continue;
        }
        for (x, c) in cond.iter_mut().enumerate() {
            *c = match dir {
                Direction::Forward => joint[x * nx2 + s],
                Direction::Backward => joint[s * nx2 + x],
            } / ps;
        }
        total += ps * mi_slice(&cond, sub);
    }
    total
}

/// The trivial rectangle outer bound's corner: the best one-way capacity in
/// each direction over all frozen opposite inputs.
pub fn trivial_outer(ch: &TwoWayChannel) -> (f64, f64) {
    let best = |dir| {
        ch.sub_channels(dir)
            .iter()
            .map(|sub| ba_capacity_default(sub).capacity)
            .fold(0.0, f64::max)
    };
    (best(Direction::Forward), best(Direction::Backward))
}

// ---------------------------------------------------------------------------
// Alpha and beta deviations
// ---------------------------------------------------------------------------

/// Per-state capacities of the sub-channels in `dir`.
fn sub_capacities(subs: &[ChannelMatrix]) -> Vec<CapacityResult> {
    subs.iter().map(ba_capacity_default).collect()
}

/// How close the sub-channel family of `dir` comes to having a common
/// capacity-achieving input: minimizes the worst per-state shortfall
/// max_s (C_s - I(p, W_s)) by grid seeding plus minimax refinement.
///
/// Since I(p, W_s) <= C_s for every p, the shortfall is one-sided and the
/// objective (a max of convex functions) is convex, so the refined local
/// minimum is the global one up to the refinement resolution.
pub fn alpha_star(
    ch: &TwoWayChannel,
    dir: Direction,
    delta: f64,
    refine_tol: f64,
) -> Result<AlphaStar> {
    let subs = ch.sub_channels(dir);
    let caps: Vec<f64> = sub_capacities(&subs).iter().map(|r| r.capacity).collect();
    let k = ch.input_size(dir);
    let grid = GridSpec::new(k, delta)?;
    let count = grid.count()?;

    let chunk_best = par_chunk_map(count, |range| {
        let mut best: Option<(u64, f64, Vec<f64>)> = None;
        let mut comp = grid.composition_at(range.start);
        for rank in range {
            let p = grid.point(&comp);
            let g = caps
                .iter()
                .zip(&subs)
                .map(|(&c, sub)| c - mi_slice(p.probs(), sub))
                .fold(f64::NEG_INFINITY, f64::max);
            if best.as_ref().is_none_or(|(_, bv, _)| g < *bv) {
                best = Some((rank, g, p.probs().to_vec()));
            }
            grid.next_composition(&mut comp);
        }
        best
    });
    let (_, _, seed) = merge_min_by_rank(chunk_best).expect("grid is never empty");

    let objective = CapacityShortfall::new(&subs, caps);
    let (probs, value) = optim::refine_minimax(&objective, &seed, delta, refine_tol);
    Ok(AlphaStar {
        value: value.max(0.0),
        witness: Distribution::from_validated(probs),
    })
}

/// Largest pairwise mutual-information discrepancy between two sub-channels
/// of `dir` under a shared input. Non-convex, so each (pair, sign) branch is
/// seeded from its best grid point and refined locally; the result is a
/// certified lower bound at grid resolution.
pub fn beta_star(
    ch: &TwoWayChannel,
    dir: Direction,
    delta: f64,
    refine_tol: f64,
) -> Result<BetaStar> {
    let subs = ch.sub_channels(dir);
    let k = ch.input_size(dir);
    let n_states = subs.len();
    if n_states < 2 {
        return Ok(BetaStar {
            value: 0.0,
            witness: Distribution::uniform(k),
            pair: (0, 0),
        });
    }
    let grid = GridSpec::new(k, delta)?;
    let count = grid.count()?;

    // signed branches (a, b) meaning maximize I_a - I_b, for every ordered pair
    let branches: Vec<(usize, usize)> = (0..n_states)
        .flat_map(|a| (0..n_states).filter(move |&b| b != a).map(move |b| (a, b)))
        .collect();

    // per-branch best grid point: track the minimum of -(I_a - I_b)
    let chunk_best = par_chunk_map(count, |range| {
        let mut best: Vec<Option<(u64, f64, Vec<f64>)>> = vec![None; branches.len()];
        let mut comp = grid.composition_at(range.start);
        let mut mis = vec![0.0; n_states];
        for rank in range {
            let p = grid.point(&comp);
            for (s, m) in mis.iter_mut().enumerate() {
                *m = mi_slice(p.probs(), &subs[s]);
            }
            for (bi, &(a, b)) in branches.iter().enumerate() {
                let neg_gap = mis[b] - mis[a];
                if best[bi].as_ref().is_none_or(|(_, bv, _)| neg_gap < *bv) {
                    best[bi] = Some((rank, neg_gap, p.probs().to_vec()));
                }
            }
            grid.next_composition(&mut comp);
        }
        best
    });
    let mut per_branch: Vec<Option<(u64, f64, Vec<f64>)>> = vec![None; branches.len()];
    for chunk in chunk_best {
        for (bi, entry) in chunk.into_iter().enumerate() {
            per_branch[bi] = merge_min_by_rank(vec![per_branch[bi].take(), entry]);
        }
    }

    let mut best_value = -1.0;
    let mut best_witness: Option<Vec<f64>> = None;
    let mut best_pair = (0, 0);
    for (bi, &(a, b)) in branches.iter().enumerate() {
        let (_, _, seed) = per_branch[bi].as_ref().expect("grid is never empty").clone();
        let objective = MiGap::new(&subs[a], &subs[b]);
        let (probs, neg_gap) = optim::refine_minimax(&objective, &seed, delta, refine_tol);
        let gap = -neg_gap;
        if gap > best_value + 1e-15 {
            best_value = gap;
            best_witness = Some(probs);
            best_pair = (a.min(b), a.max(b));
        }
    }
    Ok(BetaStar {
        value: best_value.max(0.0),
        witness: Distribution::from_validated(best_witness.expect("at least one branch")),
        pair: best_pair,
    })
}

// ---------------------------------------------------------------------------
// Derived regions
// ---------------------------------------------------------------------------

/// Outer bound from the inner sweep: the hull of the inner region and its
/// copy shifted by (+alpha, +2 beta), clipped to the trivial rectangle.
pub fn theorem4_bound(
    inner: &Frontier,
    alpha: f64,
    beta: f64,
    i1_star: f64,
    i2_star: f64,
) -> Frontier {
    let mut pts: Vec<RatePair> = inner.vertices().to_vec();
    pts.extend(
        inner
            .vertices()
            .iter()
            .map(|v| RatePair::new(v.r1 + alpha, v.r2 + 2.0 * beta)),
    );
    hull_frontier(&pts).clip(i1_star, i2_star)
}

/// The epsilon-neighborhood of the inner region inside the trivial
/// rectangle: inner shifted by (eps * I1*, eps * I2*), clipped, downward
/// closed.
pub fn eps_region(inner: &Frontier, eps: f64, i1_star: f64, i2_star: f64) -> Frontier {
    inner
        .shift(eps * i1_star, eps * i2_star)
        .clip(i1_star, i2_star)
}

// ---------------------------------------------------------------------------
// Orchestration
// ---------------------------------------------------------------------------

fn ratio_or_zero(num: f64, den: f64) -> f64 {
    if den > 1e-12 {
        num / den
    } else {
        0.0
    }
}

/// Runs the whole bound pipeline and also returns the optimizer witnesses.
pub fn full_report_detailed(ch: &TwoWayChannel, cfg: &BoundsConfig) -> Result<FullReport> {
    let (i1_star, i2_star) = trivial_outer(ch);
    let inner = inner_bound(ch, cfg.delta, cfg.eval_cap)?;
    let alpha = alpha_star(ch, Direction::Forward, cfg.delta, cfg.refine_tol)?;
    let beta = beta_star(ch, Direction::Backward, cfg.delta, cfg.refine_tol)?;
    let outer_simple = theorem4_bound(&inner, alpha.value, beta.value, i1_star, i2_star);
    let epsilon = ratio_or_zero(alpha.value, i1_star).max(ratio_or_zero(2.0 * beta.value, i2_star));
    let eps = eps_region(&inner, epsilon, i1_star, i2_star);
    let outer_grid = if cfg.with_grid_outer {
        Some(outer_bound_grid(ch, cfg.grid_outer_delta, cfg.eval_cap)?)
    } else {
        None
    };
    Ok(FullReport {
        report: BoundsReport {
            i1_star,
            i2_star,
            alpha_star: alpha.value,
            beta_star: beta.value,
            epsilon,
            inner,
            outer_simple,
            outer_trivial: Frontier::rectangle(i1_star, i2_star),
            eps_region: eps,
            outer_grid,
        },
        alpha,
        beta,
    })
}

/// Runs the whole bound pipeline for one channel.
pub fn full_report(ch: &TwoWayChannel, cfg: &BoundsConfig) -> Result<BoundsReport> {
    full_report_detailed(ch, cfg).map(|d| d.report)
}
