//! Local feature size fields.
//!
//! The numeric field approximates the medial axis by the Voronoi diagram of a
//! dense discretization: all Voronoi vertices plus the Voronoi edges dual to
//! Delaunay edges between points that are not neighbors along the curve.
//! Edges dual to curve-neighbor pairs cross the curve and are dropped.

use crate::curve::{AnalyticLfs, CurveModel, Dense};
use crate::delaunay::triangulate;
use crate::error::Result;
use crate::kdtree::SpatialIndex;

/// Grid size under which medial points are merged.
const MERGE: f64 = 1e-8;

/// Discretized medial-axis approximation with nearest-point queries.
#[derive(Clone, Debug)]
pub struct MedialApprox {
    index: SpatialIndex,
}

impl MedialApprox {
    /// Builds from dense curve points. Medial segments are subdivided at
    /// spacing `eta` near the curve, so distances are overestimated by at most
    /// about `eta^2 / (8 lfs)`.
    pub fn from_dense(dense: &Dense, eta: f64) -> Result<Self> {
        let tri = triangulate(&dense.points)?;
        let (lo, hi) = bounds(&dense.points);
        let diam = ((hi[0] - lo[0]).powi(2) + (hi[1] - lo[1]).powi(2)).sqrt();
        let blo = [lo[0] - diam, lo[1] - diam];
        let bhi = [hi[0] + diam, hi[1] + diam];
        let centers: Vec<[f64; 2]> = (0..tri.triangles().len()).map(|t| tri.circumcenter(t)).collect();
        let mut pts: Vec<f64> = Vec::new();
        // Spacing grows with the distance to the generating sites, which keeps
        // the relative distance error below eta^2 / 8 far from the curve.
        let push_segment = |a: [f64; 2], b: [f64; 2], site: [f64; 2], pts: &mut Vec<f64>| {
            if let Some((a, b)) = clip(a, b, blo, bhi) {
                let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
                pts.extend_from_slice(&a);
                if len == 0.0 {
                    return;
                }
                let dir = [(b[0] - a[0]) / len, (b[1] - a[1]) / len];
                let mut t = 0.0;
                loop {
                    let p = [a[0] + dir[0] * t, a[1] + dir[1] * t];
                    let r = ((p[0] - site[0]).powi(2) + (p[1] - site[1]).powi(2)).sqrt();
                    t += eta * r.max(1.0);
                    if t >= len {
                        break;
                    }
                    pts.push(a[0] + dir[0] * t);
                    pts.push(a[1] + dir[1] * t);
                }
                pts.extend_from_slice(&b);
            }
        };
        for (t, tv) in tri.triangles().iter().enumerate() {
            for k in 0..3 {
                let (u, w) = (tv[(k + 1) % 3], tv[(k + 2) % 3]);
                if dense.consecutive(u, w) {
                    continue;
                }
                match tri.neighbors()[t][k] {
                    Some(nb) if nb > t => push_segment(centers[t], centers[nb], dense.points[u], &mut pts),
                    Some(_) => {}
                    None => {
                        // Hull edge: the Voronoi edge is a ray to the outside.
                        let (pu, pw) = (dense.points[u], dense.points[w]);
                        let out = [pw[1] - pu[1], pu[0] - pw[0]];
                        let n = out[0].hypot(out[1]);
                        let far = [centers[t][0] + out[0] / n * 3.0 * diam, centers[t][1] + out[1] / n * 3.0 * diam];
                        push_segment(centers[t], far, pu, &mut pts);
                    }
                }
            }
        }
        // Voronoi vertices of points on one circular arc all land on its
        // center; merge such clusters so queries do not tie on thousands of them.
        let mut seen = std::collections::HashSet::new();
        let mut merged = Vec::with_capacity(pts.len());
        for p in pts.chunks_exact(2) {
            let key = ((p[0] / MERGE).round() as i64, (p[1] / MERGE).round() as i64);
            if seen.insert(key) {
                merged.extend_from_slice(p);
            }
        }
        Ok(MedialApprox {
            index: SpatialIndex::from_flat(merged, 2),
        })
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    /// Distance from `p` to the approximate medial axis, and the nearest medial point.
    pub fn nearest(&self, p: [f64; 2]) -> (f64, [f64; 2]) {
        match self.index.nearest(&p) {
            Some((i, d2)) => {
                let q = self.index.point(i);
                (d2.sqrt(), [q[0], q[1]])
            }
            None => (f64::INFINITY, [f64::NAN; 2]),
        }
    }
}

fn bounds(pts: &[[f64; 2]]) -> ([f64; 2], [f64; 2]) {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in pts {
        for d in 0..2 {
            lo[d] = lo[d].min(p[d]);
            hi[d] = hi[d].max(p[d]);
        }
    }
    (lo, hi)
}

/// Liang-Barsky clipping of segment `ab` to a box.
fn clip(a: [f64; 2], b: [f64; 2], lo: [f64; 2], hi: [f64; 2]) -> Option<([f64; 2], [f64; 2])> {
    if !(a[0].is_finite() && a[1].is_finite() && b[0].is_finite() && b[1].is_finite()) {
        return None;
    }
    let d = [b[0] - a[0], b[1] - a[1]];
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    for k in 0..2 {
        for (p, q) in [(-d[k], a[k] - lo[k]), (d[k], hi[k] - a[k])] {
            if p == 0.0 {
                if q < 0.0 {
                    return None;
                }
            } else {
                let r = q / p;
                if p < 0.0 {
                    t0 = t0.max(r);
                } else {
                    t1 = t1.min(r);
                }
            }
        }
    }
    (t0 <= t1).then(|| ([a[0] + d[0] * t0, a[1] + d[1] * t0], [a[0] + d[0] * t1, a[1] + d[1] * t1]))
}

/// Local feature size, analytic where the curve family has a formula.
#[derive(Clone, Debug)]
pub enum LfsField {
    Analytic(AnalyticLfs),
    Numeric(MedialApprox),
}

impl LfsField {
    /// Analytic field if the curve carries one, otherwise a numeric field
    /// from a discretization at arc-length step `density`.
    pub fn for_curve(curve: &CurveModel, density: f64) -> Result<Self> {
        match curve.analytic_lfs() {
            Some(a) => Ok(LfsField::Analytic(a.clone())),
            None => Self::numeric(curve, density),
        }
    }

    pub fn numeric(curve: &CurveModel, density: f64) -> Result<Self> {
        let dense = curve.discretize(density);
        Ok(LfsField::Numeric(MedialApprox::from_dense(&dense, density)?))
    }

    pub fn lfs(&self, p: [f64; 2]) -> f64 {
        match self {
            LfsField::Analytic(a) => a.lfs(p),
            LfsField::Numeric(m) => m.nearest(p).0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{make_curve, CurveFamily};
    use approx::assert_abs_diff_eq;

    #[test]
    fn numeric_circle() {
        let c = make_curve(&CurveFamily::Circle {
            center: [0.3, -0.2],
            radius: 1.0,
        })
        .unwrap();
        let f = LfsField::numeric(&c, 1e-3).unwrap();
        for k in 0..20 {
            let t = k as f64 * 0.31;
            let p = [0.3 + t.cos(), -0.2 + t.sin()];
            assert_abs_diff_eq!(f.lfs(p), 1.0, epsilon = 1e-3);
        }
    }

    #[test]
    fn numeric_concentric() {
        let c = make_curve(&CurveFamily::Concentric {
            center: [0., 0.],
            inner: 1.0,
            outer: 3.0,
        })
        .unwrap();
        let f = LfsField::numeric(&c, 2e-3).unwrap();
        for k in 0..12 {
            let t = k as f64 * 0.5;
            assert_abs_diff_eq!(f.lfs([t.cos(), t.sin()]), 1.0, epsilon = 2e-3);
            assert_abs_diff_eq!(f.lfs([3.0 * t.cos(), 3.0 * t.sin()]), 1.0, epsilon = 2e-3);
        }
    }

    #[test]
    fn numeric_ellipse_matches_analytic() {
        let c = make_curve(&CurveFamily::Ellipse {
            center: [0., 0.],
            a: 2.0,
            b: 1.0,
        })
        .unwrap();
        let exact = LfsField::for_curve(&c, 1e-3).unwrap();
        let num = LfsField::numeric(&c, 1e-3).unwrap();
        let dense = c.discretize(0.05);
        for &p in &dense.points {
            assert_abs_diff_eq!(num.lfs(p), exact.lfs(p), epsilon = 2e-3);
        }
    }

    #[test]
    fn clipping() {
        assert_eq!(clip([-1., 0.5], [2., 0.5], [0., 0.], [1., 1.]), Some(([0., 0.5], [1., 0.5])));
        assert_eq!(clip([-1., 2.], [2., 2.], [0., 0.], [1., 1.]), None);
    }
}
