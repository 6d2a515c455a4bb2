//! Local refinement of min-max objectives over the probability simplex.
//!
//! The objectives in this crate all have the shape g(p) = max_i f_i(p) with
//! each f_i smooth and cheap to differentiate. Plain coordinate-pair descent
//! stalls on the non-smooth ridge where two terms tie: every single mass
//! move increases one active term even though a combined move decreases
//! both. The refiner therefore alternates two kinds of steps:
//!
//! 1. mass moves of the current step size between coordinate pairs, and
//! 2. line searches along min-norm convex combinations of the active
//!    terms' gradients (the steepest-descent direction of the max),
//!
//! halving the step whenever neither improves, down to the requested
//! resolution. For convex g this reaches the global minimum; elsewhere it is
//! an ordinary local refinement.

use crate::channel::ChannelMatrix;
use crate::info::ZERO_PROB;
use crate::simplex::GridSpec;

const LOG2_E: f64 = std::f64::consts::LOG2_E;
const IMPROVE_EPS: f64 = 1e-15;

/// A finite family of smooth terms f_i with evaluable gradients.
pub(crate) trait SmoothTerms {
    fn dim(&self) -> usize;
    fn n_terms(&self) -> usize;
    /// Writes f_i(p) for every i into `out`.
    fn eval_terms(&self, p: &[f64], out: &mut [f64]);
    /// Writes the gradient of f_i at `p` into `out`.
    fn grad_term(&self, p: &[f64], i: usize, out: &mut [f64]);
}

fn eval_max(obj: &impl SmoothTerms, p: &[f64], scratch: &mut [f64]) -> f64 {
    obj.eval_terms(p, scratch);
    scratch.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
}

/// Refines `start` by descent on g(p) = max_i f_i(p); returns (p, g(p)).
pub(crate) fn refine_minimax(
    obj: &impl SmoothTerms,
    start: &[f64],
    init_step: f64,
    tol: f64,
) -> (Vec<f64>, f64) {
    let k = obj.dim();
    let n_terms = obj.n_terms();
    let mut terms = vec![0.0; n_terms];
    let mut p = start.to_vec();
    let mut value = eval_max(obj, &p, &mut terms);
    let mut step = init_step;
    let mut guard = 0usize;

    while step >= tol && guard < 200_000 {
        guard += 1;
        // coordinate-pair mass moves
        let mut best_q: Option<(Vec<f64>, f64)> = None;
        for i in 0..k {
            if p[i] < step - 1e-12 {
                continue;
            }
            for j in 0..k {
                if i == j {
                    continue;
                }
                let mut q = p.clone();
                q[i] = (q[i] - step).max(0.0);
                q[j] += step;
                let v = eval_max(obj, &q, &mut terms);
                if v < best_q.as_ref().map_or(value, |(_, bv)| *bv) - IMPROVE_EPS {
                    best_q = Some((q, v));
                }
            }
        }
        if let Some((q, v)) = best_q {
            p = q;
            value = v;
            continue;
        }

        // valley step: steepest descent over the active terms
        obj.eval_terms(&p, &mut terms);
        let band = 10.0 * step;
        let active: Vec<usize> = (0..n_terms)
            .filter(|&i| terms[i] >= value - band)
            .collect();
        let mut grads: Vec<Vec<f64>> = Vec::with_capacity(active.len());
        for &i in &active {
            let mut g = vec![0.0; k];
            obj.grad_term(&p, i, &mut g);
            // project onto the simplex tangent (zero-sum directions)
            let mean = g.iter().sum::<f64>() / k as f64;
            g.iter_mut().for_each(|v| *v -= mean);
            grads.push(g);
        }
        let mut directions: Vec<Vec<f64>> = Vec::new();
        for a in 0..grads.len() {
            directions.push(grads[a].clone());
            for b in a + 1..grads.len() {
                // min-norm point on the segment between the two gradients
                let (ga, gb) = (&grads[a], &grads[b]);
                let mut dd = 0.0;
                let mut num = 0.0;
                for x in 0..k {
                    let d = ga[x] - gb[x];
                    dd += d * d;
                    num += ga[x] * d;
                }
                let t = if dd < 1e-30 {
                    0.5
                } else {
                    (num / dd).clamp(0.0, 1.0)
                };
                directions
                    .push((0..k).map(|x| (1.0 - t) * ga[x] + t * gb[x]).collect());
            }
        }
        let mut improved = false;
        'dirs: for d in &directions {
            let norm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm < 1e-18 {
                continue;
            }
            let mut s = step;
            while s >= tol {
                let mut q: Vec<f64> = (0..k).map(|x| (p[x] - s * d[x] / norm).max(0.0)).collect();
                let total: f64 = q.iter().sum();
                if total > ZERO_PROB {
                    q.iter_mut().for_each(|v| *v /= total);
                    let v = eval_max(obj, &q, &mut terms);
                    if v < value - IMPROVE_EPS {
                        p = q;
                        value = v;
                        improved = true;
                        break 'dirs;
                    }
                }
                s /= 2.0;
            }
        }
        if !improved {
            step /= 2.0;
        }
    }
    (p, value)
}

/// Seeds from the best point of `grid` (first in enumeration order on ties)
/// and refines. Returns (p, g(p)).
pub(crate) fn minimize_max_over_simplex(
    obj: &impl SmoothTerms,
    grid: &GridSpec,
    init_step: f64,
    tol: f64,
) -> (Vec<f64>, f64) {
    let mut terms = vec![0.0; obj.n_terms()];
    let mut best: Option<(Vec<f64>, f64)> = None;
    for point in grid.enumerate() {
        let v = eval_max(obj, point.probs(), &mut terms);
        if best.as_ref().is_none_or(|(_, bv)| v < *bv) {
            best = Some((point.probs().to_vec(), v));
        }
    }
    let (seed, _) = best.expect("grid is never empty");
    refine_minimax(obj, &seed, init_step, tol)
}

// ---------------------------------------------------------------------------
// Objective families
// ---------------------------------------------------------------------------

/// d/dp_x of I(p, W): the divergence of row x from the output marginal,
/// shifted by -log2(e). Written into `out`.
fn mi_gradient(p: &[f64], ch: &ChannelMatrix, out: &mut [f64]) {
    let cols = ch.cols();
    let mut marginal = vec![0.0; cols];
    for (x, &px) in p.iter().enumerate() {
        if px <= 0.0 {
            continue;
        }
        let row = ch.row(x);
        for y in 0..cols {
            marginal[y] += px * row[y];
        }
    }
    for (x, o) in out.iter_mut().enumerate() {
        let row = ch.row(x);
        let mut acc = 0.0;
        for y in 0..cols {
            if row[y] > ZERO_PROB {
                // marginal[y] > 0 whenever row[y] > 0 and p[x] > 0; guard the
                // boundary case p[x] == 0 where the ratio can blow up
                let m = marginal[y].max(ZERO_PROB);
                acc += row[y] * (row[y] / m).log2();
            }
        }
        *o = acc - LOG2_E;
    }
}

/// Terms f_s(p) = target_s - I(p, W_s): how far `p` falls short of each
/// sub-channel's target mutual information (typically its capacity).
pub(crate) struct CapacityShortfall<'a> {
    subs: &'a [ChannelMatrix],
    targets: Vec<f64>,
}

impl<'a> CapacityShortfall<'a> {
    pub(crate) fn new(subs: &'a [ChannelMatrix], targets: Vec<f64>) -> Self {
        assert_eq!(subs.len(), targets.len());
        Self { subs, targets }
    }
}

impl SmoothTerms for CapacityShortfall<'_> {
    fn dim(&self) -> usize {
        self.subs[0].rows()
    }
    fn n_terms(&self) -> usize {
        self.subs.len()
    }
    fn eval_terms(&self, p: &[f64], out: &mut [f64]) {
        for (s, o) in out.iter_mut().enumerate() {
            *o = self.targets[s] - crate::info::mi_slice(p, &self.subs[s]);
        }
    }
    fn grad_term(&self, p: &[f64], i: usize, out: &mut [f64]) {
        mi_gradient(p, &self.subs[i], out);
        out.iter_mut().for_each(|v| *v = -*v);
    }
}

/// Terms f_s(p) = target_s - H(p W_s): output-entropy shortfall per
/// sub-channel. With a single matrix and target 0 this minimizes -H(p W),
/// i.e. maximizes the output entropy.
pub(crate) struct OutputEntropyGap<'a> {
    subs: Vec<&'a ChannelMatrix>,
    targets: Vec<f64>,
}

impl<'a> OutputEntropyGap<'a> {
    pub(crate) fn new(ch: &'a ChannelMatrix) -> Self {
        Self {
            subs: vec![ch],
            targets: vec![0.0],
        }
    }

    pub(crate) fn with_targets(subs: Vec<&'a ChannelMatrix>, targets: Vec<f64>) -> Self {
        assert_eq!(subs.len(), targets.len());
        Self { subs, targets }
    }
}

fn output_marginal(p: &[f64], ch: &ChannelMatrix) -> Vec<f64> {
    let cols = ch.cols();
    let mut out = vec![0.0; cols];
    for (x, &px) in p.iter().enumerate() {
        let row = ch.row(x);
        for y in 0..cols {
            out[y] += px * row[y];
        }
    }
    out
}

impl SmoothTerms for OutputEntropyGap<'_> {
    fn dim(&self) -> usize {
        self.subs[0].rows()
    }
    fn n_terms(&self) -> usize {
        self.subs.len()
    }
    fn eval_terms(&self, p: &[f64], out: &mut [f64]) {
        for (s, o) in out.iter_mut().enumerate() {
            *o = self.targets[s] - crate::info::entropy_slice(&output_marginal(p, self.subs[s]));
        }
    }
    fn grad_term(&self, p: &[f64], i: usize, out: &mut [f64]) {
        // d/dp_x of -H(p W) = sum_y W_xy (log2 m_y + log2 e)
        let ch = self.subs[i];
        let m = output_marginal(p, ch);
        for (x, o) in out.iter_mut().enumerate() {
            let row = ch.row(x);
            let mut acc = 0.0;
            for y in 0..ch.cols() {
                if row[y] > ZERO_PROB {
                    acc += row[y] * (m[y].max(ZERO_PROB).log2() + LOG2_E);
                }
            }
            *o = acc;
        }
    }
}

/// Single term f(p) = I(p, W_b) - I(p, W_a); minimizing it maximizes the
/// signed mutual-information gap of sub-channel `a` over `b`.
pub(crate) struct MiGap<'a> {
    a: &'a ChannelMatrix,
    b: &'a ChannelMatrix,
}

impl<'a> MiGap<'a> {
    pub(crate) fn new(a: &'a ChannelMatrix, b: &'a ChannelMatrix) -> Self {
        Self { a, b }
    }
}

impl SmoothTerms for MiGap<'_> {
    fn dim(&self) -> usize {
        self.a.rows()
    }
    fn n_terms(&self) -> usize {
        1
    }
    fn eval_terms(&self, p: &[f64], out: &mut [f64]) {
        out[0] = crate::info::mi_slice(p, self.b) - crate::info::mi_slice(p, self.a);
    }
    fn grad_term(&self, p: &[f64], _i: usize, out: &mut [f64]) {
        let k = p.len();
        let mut ga = vec![0.0; k];
        mi_gradient(p, self.b, out);
        mi_gradient(p, self.a, &mut ga);
        for x in 0..k {
            out[x] -= ga[x];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ba::ba_capacity_default;

    #[test]
    fn finds_common_optimizer_when_subs_identical() {
        let w = ChannelMatrix::new(2, 2, vec![0.9, 0.1, 0.2, 0.8]).unwrap();
        let subs = vec![w.clone(), w.clone()];
        let caps: Vec<f64> = subs.iter().map(|s| ba_capacity_default(s).capacity).collect();
        let obj = CapacityShortfall::new(&subs, caps);
        let grid = GridSpec::new(2, 0.1).unwrap();
        let (_, v) = minimize_max_over_simplex(&obj, &grid, 0.1, 1e-9);
        assert!(v.abs() < 1e-7, "gap {v} should vanish");
    }

    #[test]
    fn escapes_nonsmooth_ridge() {
        // two sub-channels favoring different inputs; the minimax sits on the
        // ridge where both shortfalls tie, which pairwise moves alone miss
        let z = ChannelMatrix::new(2, 2, vec![1.0, 0.0, 0.25, 0.75]).unwrap();
        let zi = ChannelMatrix::new(2, 2, vec![0.75, 0.25, 0.0, 1.0]).unwrap();
        let subs = vec![z.clone(), zi.clone()];
        let caps: Vec<f64> = subs.iter().map(|s| ba_capacity_default(s).capacity).collect();
        let obj = CapacityShortfall::new(&subs, caps.clone());
        let grid = GridSpec::new(2, 0.05).unwrap();
        let (p, v) = minimize_max_over_simplex(&obj, &grid, 0.05, 1e-9);
        // by symmetry the optimum is the uniform input, where both gaps equal
        let gu = caps[0] - crate::info::mi_slice(&[0.5, 0.5], &z);
        assert!(v <= gu + 1e-9);
        assert!((p[0] - 0.5).abs() < 1e-4);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let w = ChannelMatrix::new(3, 2, vec![0.9, 0.1, 0.4, 0.6, 0.2, 0.8]).unwrap();
        let subs = vec![w];
        let obj = CapacityShortfall::new(&subs, vec![0.0]);
        let p = [0.5, 0.3, 0.2];
        let mut g = [0.0; 3];
        obj.grad_term(&p, 0, &mut g);
        let mut base = [0.0];
        obj.eval_terms(&p, &mut base);
        let eps = 1e-7;
        for x in 0..3 {
            let mut q = p;
            q[x] += eps;
            // unnormalized probe: the analytic gradient is of the raw
            // (unconstrained) coordinates, matching this perturbation
            let mut v = [0.0];
            obj.eval_terms(&q, &mut v);
            let fd = (v[0] - base[0]) / eps;
            assert!(
                (fd - g[x]).abs() < 1e-4,
                "coordinate {x}: fd {fd} vs analytic {}",
                g[x]
            );
        }
    }
}
