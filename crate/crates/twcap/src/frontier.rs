//! Rate pairs and the canonical frontier representation of downward-closed
//! convex rate regions.
//!
//! A region is stored as the polyline of its upper-right boundary, running
//! from the r2-axis intercept to the r1-axis intercept. Vertices have
//! non-decreasing r1 and non-increasing r2, with no duplicate and no three
//! collinear vertices. A rectangle [0,a]x[0,b] is therefore
//! [(0,b), (a,b), (a,0)].

use serde::Serialize;

/// A non-negative rate pair in bits per channel use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatePair {
    pub r1: f64,
    pub r2: f64,
}

impl RatePair {
    pub fn new(r1: f64, r2: f64) -> Self {
        debug_assert!(r1.is_finite() && r2.is_finite() && r1 >= 0.0 && r2 >= 0.0);
        Self { r1, r2 }
    }
}

/// Upper-right boundary of a downward-closed convex rate region.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Frontier {
    vertices: Vec<RatePair>,
}

impl Frontier {
    pub fn vertices(&self) -> &[RatePair] {
        &self.vertices
    }

    /// Largest achievable r1 (the r1-axis intercept).
    pub fn max_r1(&self) -> f64 {
        self.vertices.last().map_or(0.0, |v| v.r1)
    }

    /// Largest achievable r2 (the r2-axis intercept).
    pub fn max_r2(&self) -> f64 {
        self.vertices.first().map_or(0.0, |v| v.r2)
    }

    /// Largest r2 in the region at abscissa `r1`, or `None` beyond the
    /// region's r1 extent.
    pub fn value_at(&self, r1: f64) -> Option<f64> {
        if r1 < 0.0 || self.vertices.is_empty() || r1 > self.max_r1() {
            return None;
        }
        // first vertex at or beyond r1; segments with equal r1 (the terminal
        // vertical drop) take the higher r2
        let vs = &self.vertices;
        if r1 <= vs[0].r1 {
            return Some(vs[0].r2);
        }
        for w in vs.windows(2) {
            let (a, b) = (w[0], w[1]);
            if r1 <= b.r1 {
                if b.r1 == a.r1 {
                    return Some(a.r2.max(b.r2));
                }
                let t = (r1 - a.r1) / (b.r1 - a.r1);
                return Some(a.r2 + t * (b.r2 - a.r2));
            }
        }
        None
    }

    /// True when every point of `other`'s region lies inside this region,
    /// allowing `tol` slack per coordinate.
    pub fn dominates(&self, other: &Frontier, tol: f64) -> bool {
        other.vertices.iter().all(|v| {
            if v.r1 > self.max_r1() + tol {
                return false;
            }
            // vertices overhanging the r1 extent by at most tol compare
            // against the boundary height at the extent
            let x = v.r1.min(self.max_r1());
            match self.value_at(x) {
                Some(y) => v.r2 <= y + tol,
                None => false,
            }
        })
    }

    /// The rectangle [0, a] x [0, b].
    pub fn rectangle(a: f64, b: f64) -> Frontier {
        canonicalize(vec![
            RatePair::new(0.0, b),
            RatePair::new(a, b),
            RatePair::new(a, 0.0),
        ])
    }

    /// Frontier of this region's Minkowski shift by (+a, +b), downward closed.
    pub fn shift(&self, a: f64, b: f64) -> Frontier {
        let mut out = Vec::with_capacity(self.vertices.len() + 2);
        if let Some(first) = self.vertices.first() {
            out.push(RatePair::new(0.0, first.r2 + b));
        }
        for v in &self.vertices {
            out.push(RatePair::new(v.r1 + a, v.r2 + b));
        }
        if let Some(last) = self.vertices.last() {
            out.push(RatePair::new(last.r1 + a, 0.0));
        }
        canonicalize(out)
    }

    /// Intersects the region with the rectangle [0, xmax] x [0, ymax],
    /// inserting exact segment/edge intersection vertices. A zero extent
    /// degenerates to an axis segment, not an empty region.
    pub fn clip(&self, xmax: f64, ymax: f64) -> Frontier {
        if self.vertices.is_empty() || xmax < 0.0 || ymax < 0.0 {
            return Frontier {
                vertices: vec![RatePair::new(0.0, 0.0)],
            };
        }
        let xend = self.max_r1().min(xmax);
        // breakpoints: vertex abscissas inside [0, xend], the clip edge, and
        // the closed-form crossing of the polyline with the line r2 = ymax
        let mut xs: Vec<f64> = vec![0.0, xend];
        for v in &self.vertices {
            if v.r1 > 0.0 && v.r1 < xend {
                xs.push(v.r1);
            }
        }
        for w in self.vertices.windows(2) {
            let (a, b) = (w[0], w[1]);
            if (a.r2 > ymax) != (b.r2 > ymax) && b.r1 > a.r1 {
                let t = (a.r2 - ymax) / (a.r2 - b.r2);
                let x = a.r1 + t * (b.r1 - a.r1);
                if x > 0.0 && x < xend {
                    xs.push(x);
                }
            }
        }
        xs.sort_by(|p, q| p.partial_cmp(q).unwrap());
        xs.dedup();
        let mut out: Vec<RatePair> = xs
            .iter()
            .map(|&x| {
                let y = self.value_at(x).unwrap_or(0.0).min(ymax);
                RatePair::new(x, y)
            })
            .collect();
        if let Some(last) = out.last().copied() {
            if last.r2 > 0.0 {
                out.push(RatePair::new(last.r1, 0.0));
            }
        }
        canonicalize(out)
    }
}

/// Cleans a weakly-monotone boundary polyline into canonical frontier form:
/// starts on the r2 axis, ends on the r1 axis, no duplicates, no collinear
/// interior vertices.
pub(crate) fn canonicalize(mut vs: Vec<RatePair>) -> Frontier {
    assert!(!vs.is_empty());
    if vs[0].r1 > 0.0 {
        vs.insert(0, RatePair::new(0.0, vs[0].r2));
    }
    if let Some(last) = vs.last().copied() {
        if last.r2 > 0.0 {
            vs.push(RatePair::new(last.r1, 0.0));
        }
    }
    let mut out: Vec<RatePair> = Vec::with_capacity(vs.len());
    for v in vs {
        if let Some(&prev) = out.last() {
            if prev.r1 == v.r1 && prev.r2 == v.r2 {
                continue;
            }
        }
        while out.len() >= 2 {
            let a = out[out.len() - 2];
            let b = out[out.len() - 1];
            if cross(a, b, v) >= 0.0 {
                // b is collinear with or left of a->v: not a corner
                out.pop();
            } else {
                break;
            }
        }
        out.push(v);
    }
    Frontier { vertices: out }
}

fn cross(o: RatePair, a: RatePair, b: RatePair) -> f64 {
    (a.r1 - o.r1) * (b.r2 - o.r2) - (a.r2 - o.r2) * (b.r1 - o.r1)
}

/// The concave upper-right frontier of the downward closure of the convex
/// hull of `points` (each point implies its axis projections).
pub fn hull_frontier(points: &[RatePair]) -> Frontier {
    assert!(!points.is_empty(), "hull_frontier needs at least one point");
    let mut max_r1 = 0.0f64;
    let mut max_r2 = 0.0f64;
    for p in points {
        max_r1 = max_r1.max(p.r1);
        max_r2 = max_r2.max(p.r2);
    }
    if max_r1 <= 0.0 && max_r2 <= 0.0 {
        return Frontier {
            vertices: vec![RatePair::new(0.0, 0.0)],
        };
    }
    // upper hull over the point set plus the two extreme axis projections;
    // interior projections are dominated and cannot become vertices
    let mut pts: Vec<RatePair> = Vec::with_capacity(points.len() + 2);
    pts.push(RatePair::new(0.0, max_r2));
    pts.push(RatePair::new(max_r1, 0.0));
    pts.extend(points.iter().copied());
    pts.sort_by(|a, b| {
        a.r1.partial_cmp(&b.r1)
            .unwrap()
            .then(b.r2.partial_cmp(&a.r2).unwrap())
    });
    pts.dedup_by(|a, b| a.r1 == b.r1 && a.r2 == b.r2);

    // monotone chain for the upper-right boundary: keep strict right turns
    let mut hull: Vec<RatePair> = Vec::new();
    for &p in &pts {
        if let Some(&last) = hull.last() {
            if p.r1 == last.r1 {
                // same abscissa: the sort guarantees the higher r2 came first
                continue;
            }
        }
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            if cross(a, b, p) >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    canonicalize(hull)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_segment_frontier() {
        let f = hull_frontier(&[RatePair::new(1.0, 0.0), RatePair::new(0.0, 1.0)]);
        assert_eq!(
            f.vertices(),
            &[RatePair::new(0.0, 1.0), RatePair::new(1.0, 0.0)]
        );
    }

    #[test]
    fn single_point_rectangle() {
        let f = hull_frontier(&[RatePair::new(0.5, 0.5)]);
        assert_eq!(
            f.vertices(),
            &[
                RatePair::new(0.0, 0.5),
                RatePair::new(0.5, 0.5),
                RatePair::new(0.5, 0.0)
            ]
        );
    }

    #[test]
    fn origin_only() {
        let f = hull_frontier(&[RatePair::new(0.0, 0.0)]);
        assert_eq!(f.vertices(), &[RatePair::new(0.0, 0.0)]);
        assert!(f.dominates(&f, 0.0));
    }

    #[test]
    fn axis_degenerate() {
        let f = hull_frontier(&[RatePair::new(0.4, 0.0), RatePair::new(0.9, 0.0)]);
        assert_eq!(
            f.vertices(),
            &[RatePair::new(0.0, 0.0), RatePair::new(0.9, 0.0)]
        );
        let g = hull_frontier(&[RatePair::new(0.0, 0.7)]);
        assert_eq!(
            g.vertices(),
            &[RatePair::new(0.0, 0.7), RatePair::new(0.0, 0.0)]
        );
    }

    #[test]
    fn collinear_points_dropped() {
        let f = hull_frontier(&[
            RatePair::new(0.0, 1.0),
            RatePair::new(0.5, 0.5),
            RatePair::new(1.0, 0.0),
        ]);
        assert_eq!(
            f.vertices(),
            &[RatePair::new(0.0, 1.0), RatePair::new(1.0, 0.0)]
        );
    }

    #[test]
    fn interior_points_ignored() {
        let f = hull_frontier(&[
            RatePair::new(0.2, 0.2),
            RatePair::new(1.0, 0.1),
            RatePair::new(0.1, 1.0),
            RatePair::new(0.6, 0.6),
        ]);
        assert_eq!(
            f.vertices(),
            &[
                RatePair::new(0.0, 1.0),
                RatePair::new(0.1, 1.0),
                RatePair::new(0.6, 0.6),
                RatePair::new(1.0, 0.1),
                RatePair::new(1.0, 0.0)
            ]
        );
    }

    #[test]
    fn value_at_and_domination() {
        let f = hull_frontier(&[RatePair::new(1.0, 0.0), RatePair::new(0.0, 1.0)]);
        assert_eq!(f.value_at(0.25), Some(0.75));
        assert_eq!(f.value_at(1.0), Some(0.0));
        assert_eq!(f.value_at(1.5), None);
        let rect = Frontier::rectangle(1.0, 1.0);
        assert!(rect.dominates(&f, 0.0));
        assert!(!f.dominates(&rect, 1e-9));
        assert!(f.dominates(&f, 0.0));
    }

    #[test]
    fn domination_tolerates_tiny_overhang() {
        let a = Frontier::rectangle(0.5, 0.8);
        let b = Frontier::rectangle(0.5 + 1e-12, 0.8 + 1e-12);
        assert!(a.dominates(&b, 1e-9), "one-ulp overhang is within tolerance");
        assert!(!a.dominates(&Frontier::rectangle(0.5 + 1e-6, 0.8), 1e-9));
        assert!(!a.dominates(&Frontier::rectangle(0.5, 0.9), 1e-9));
    }

    #[test]
    fn rectangle_value_at_vertical_edge() {
        let rect = Frontier::rectangle(0.5, 0.8);
        assert_eq!(rect.value_at(0.5), Some(0.8));
        assert_eq!(rect.value_at(0.0), Some(0.8));
        assert_eq!(rect.value_at(0.51), None);
    }

    #[test]
    fn shift_translates_region() {
        // dyadic coordinates keep the arithmetic exact
        let f = hull_frontier(&[RatePair::new(0.5, 0.5)]);
        let s = f.shift(0.25, 0.125);
        assert_eq!(
            s.vertices(),
            &[
                RatePair::new(0.0, 0.625),
                RatePair::new(0.75, 0.625),
                RatePair::new(0.75, 0.0)
            ]
        );
    }

    #[test]
    fn clip_inserts_exact_intersections() {
        let f = hull_frontier(&[RatePair::new(1.0, 0.0), RatePair::new(0.0, 1.0)]);
        let c = f.clip(0.75, 0.75);
        assert_eq!(
            c.vertices(),
            &[
                RatePair::new(0.0, 0.75),
                RatePair::new(0.25, 0.75),
                RatePair::new(0.75, 0.25),
                RatePair::new(0.75, 0.0)
            ]
        );
    }

    #[test]
    fn clip_degenerate_extents() {
        let f = hull_frontier(&[RatePair::new(1.0, 0.0), RatePair::new(0.0, 1.0)]);
        // zero width leaves the r2-axis segment
        let v = f.clip(0.0, 2.0);
        assert_eq!(
            v.vertices(),
            &[RatePair::new(0.0, 1.0), RatePair::new(0.0, 0.0)]
        );
        // zero height leaves the r1-axis segment
        let h = f.clip(2.0, 0.0);
        assert_eq!(
            h.vertices(),
            &[RatePair::new(0.0, 0.0), RatePair::new(1.0, 0.0)]
        );
    }

    #[test]
    fn clip_noop_when_rectangle_contains_region() {
        let f = hull_frontier(&[RatePair::new(0.5, 0.25), RatePair::new(0.25, 0.5)]);
        let c = f.clip(2.0, 2.0);
        assert_eq!(c.vertices(), f.vertices());
    }

    /// Brute-force frontier: drop dominated points, then keep points not
    /// strictly under any segment between two others. O(n^3).
    fn brute_force_frontier(points: &[RatePair]) -> Vec<RatePair> {
        let mut max_r1 = 0.0f64;
        let mut max_r2 = 0.0f64;
        for p in points {
            max_r1 = max_r1.max(p.r1);
            max_r2 = max_r2.max(p.r2);
        }
        if max_r1 <= 0.0 && max_r2 <= 0.0 {
            return vec![RatePair::new(0.0, 0.0)];
        }
        let mut cand: Vec<RatePair> = points.to_vec();
        cand.push(RatePair::new(0.0, max_r2));
        cand.push(RatePair::new(max_r1, 0.0));
        cand.sort_by(|a, b| {
            a.r1.partial_cmp(&b.r1)
                .unwrap()
                .then(b.r2.partial_cmp(&a.r2).unwrap())
        });
        cand.dedup_by(|a, b| a.r1 == b.r1 && a.r2 == b.r2);
        let dominated = |p: RatePair| {
            cand.iter().any(|q| {
                q.r1 >= p.r1 && q.r2 >= p.r2 && (q.r1 > p.r1 || q.r2 > p.r2)
            })
        };
        let under_segment = |p: RatePair| {
            cand.iter().any(|a| {
                cand.iter().any(|b| {
                    a.r1 < p.r1
                        && p.r1 < b.r1
                        && p.r2 <= a.r2 + (p.r1 - a.r1) / (b.r1 - a.r1) * (b.r2 - a.r2)
                })
            })
        };
        let mut out = vec![RatePair::new(0.0, max_r2)];
        out.extend(
            cand.iter()
                .copied()
                .filter(|&p| !dominated(p) && !under_segment(p)),
        );
        out.push(RatePair::new(max_r1, 0.0));
        out.dedup_by(|a, b| a.r1 == b.r1 && a.r2 == b.r2);
        out
    }

    #[test]
    fn matches_brute_force_on_random_points() {
        // xorshift so the test needs no external RNG
        let mut state = 0x243F_6A88_85A3_08D3u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for set in 0..20 {
            let n = 3 + (next() * 200.0) as usize;
            let pts: Vec<RatePair> = (0..n)
                .map(|_| RatePair::new(next() * 2.0, next() * 1.5))
                .collect();
            let fast = hull_frontier(&pts);
            let brute = brute_force_frontier(&pts);
            assert_eq!(fast.vertices(), &brute[..], "set {set}");
        }
    }
}
