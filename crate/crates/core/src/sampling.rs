//! Sample sets, sampling-quality validators, ground-truth graphs and a greedy
//! sample generator.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::curve::{d2, CurveModel, Dense};
use crate::error::{Error, Result};
use crate::geom::Point;
use crate::kdtree::SpatialIndex;
use crate::medial::LfsField;
use crate::recon::ReconGraph;

/// Curve position of a sample: component index and arc-length parameter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tag {
    pub component: usize,
    pub param: f64,
}

/// Ordered sample points, optionally tagged with their curve positions.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet {
    points: Vec<Point>,
    tags: Option<Vec<Tag>>,
}

impl SampleSet {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        if let Some(first) = points.first() {
            let d = first.dim();
            if let Some(p) = points.iter().find(|p| p.dim() != d) {
                return Err(Error::DimensionMismatch(d, p.dim()));
            }
        }
        Ok(SampleSet { points, tags: None })
    }

    pub fn with_tags(points: Vec<Point>, tags: Vec<Tag>) -> Result<Self> {
        if points.len() != tags.len() {
            return Err(Error::InvalidSample(format!("{} points but {} tags", points.len(), tags.len())));
        }
        let mut s = Self::new(points)?;
        s.tags = Some(tags);
        Ok(s)
    }

    pub fn from_xy(points: &[[f64; 2]]) -> Self {
        SampleSet {
            points: points.iter().map(|p| Point::xy(p[0], p[1])).collect(),
            tags: None,
        }
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn tags(&self) -> Option<&[Tag]> {
        self.tags.as_deref()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.first().map_or(2, |p| p.dim())
    }

    pub fn flat(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.len() * self.dim());
        for p in &self.points {
            v.extend_from_slice(p);
        }
        v
    }

    pub fn xy(&self) -> Result<Vec<[f64; 2]>> {
        if self.dim() != 2 {
            return Err(Error::Unsupported(format!("expected 2-D samples, got dimension {}", self.dim())));
        }
        Ok(self.points.iter().map(|p| [p[0], p[1]]).collect())
    }

    /// Smallest index pair `(i, j)`, `i < j`, of identical points.
    pub fn first_duplicate(&self) -> Option<(usize, usize)> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        let key = |i: usize| &self.points[i];
        order.sort_by(|&a, &b| {
            key(a)
                .iter()
                .zip(key(b).iter())
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        order
            .windows(2)
            .filter(|w| self.points[w[0]] == self.points[w[1]])
            .map(|w| (w[0].min(w[1]), w[0].max(w[1])))
            .min()
    }

    /// Checks tags against a curve: each point within 1e-9 of its tagged
    /// curve point, and parameters strictly increasing per component once
    /// sorted, so no two samples share a curve position. Samples may be
    /// listed in any order, since one point set can carry tags for several
    /// curves.
    pub fn validate_tags(&self, curve: &CurveModel) -> Result<()> {
        let tags = self.tags.as_ref().ok_or(Error::MissingTags)?;
        for (i, (p, t)) in self.points.iter().zip(tags).enumerate() {
            let q = curve.point_at(t.component, t.param)?;
            let err = if p.dim() == 2 { d2([p[0], p[1]], q).sqrt() } else { f64::INFINITY };
            if err > 1e-9 {
                return Err(Error::InvalidSample(format!("sample {i} is {err:e} away from its tagged curve point")));
            }
        }
        for idx in self.by_component(curve.components().len())? {
            if let Some(w) = idx.windows(2).find(|w| tags[w[0]].param >= tags[w[1]].param) {
                return Err(Error::InvalidSample(format!("samples {} and {} share a parameter", w[0], w[1])));
            }
        }
        Ok(())
    }

    /// Sample indices of each component sorted by parameter.
    fn by_component(&self, ncomp: usize) -> Result<Vec<Vec<usize>>> {
        let tags = self.tags.as_ref().ok_or(Error::MissingTags)?;
        let mut out = vec![Vec::new(); ncomp];
        for (i, t) in tags.iter().enumerate() {
            out.get_mut(t.component)
                .ok_or_else(|| Error::InvalidSample(format!("tag names missing component {}", t.component)))?
                .push(i);
        }
        for v in &mut out {
            v.sort_by(|&a, &b| tags[a].param.total_cmp(&tags[b].param));
        }
        Ok(out)
    }
}

/// Worst sampling ratio found over the checked curve points.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SamplingReport {
    /// `max d(p, S) / lfs(p)` over checked points.
    pub eps_star: f64,
    /// Upper bound covering the unchecked points between grid neighbors.
    pub eps_star_corrected: f64,
    pub witness: [f64; 2],
    pub witness_lfs: f64,
    pub witness_distance: f64,
    pub density: f64,
    pub checked: usize,
}

impl SamplingReport {
    pub fn verdict(&self, eps: f64) -> bool {
        self.eps_star < eps
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RhoReport {
    pub rho_star: f64,
    pub witness: [f64; 2],
    /// Sample indices of the consecutive pair whose reach attains `rho_star`.
    pub pair: (usize, usize),
    pub density: f64,
}

impl RhoReport {
    pub fn verdict(&self, rho: f64) -> bool {
        self.rho_star < rho
    }
}

/// Dense check points of a curve with precomputed local feature size, reused
/// across many samples of the same curve.
#[derive(Clone, Debug)]
pub struct Validator {
    curve: CurveModel,
    field: LfsField,
    dense: Dense,
    dense_lfs: Vec<f64>,
    spacing: Vec<f64>,
    density: f64,
    /// Dense points outside the checked region, if one was given.
    skip: Option<Vec<bool>>,
}

/// Default discretization step: 1e-3 of the shortest component length.
pub fn default_density(curve: &CurveModel) -> f64 {
    curve.components().iter().map(|c| c.length()).fold(f64::INFINITY, f64::min) * 1e-3
}

impl Validator {
    pub fn new(curve: &CurveModel, density: f64) -> Result<Self> {
        let field = LfsField::for_curve(curve, density)?;
        Self::with_field(curve, field, density)
    }

    pub fn with_field(curve: &CurveModel, field: LfsField, density: f64) -> Result<Self> {
        Self::build(curve, field, density, None::<fn([f64; 2], usize) -> bool>)
    }

    /// Validator that only ever checks curve points where `keep(point, component)` holds.
    pub fn in_region(
        curve: &CurveModel,
        field: LfsField,
        density: f64,
        keep: impl Fn([f64; 2], usize) -> bool,
    ) -> Result<Self> {
        Self::build(curve, field, density, Some(keep))
    }

    fn build(
        curve: &CurveModel,
        field: LfsField,
        density: f64,
        keep: Option<impl Fn([f64; 2], usize) -> bool>,
    ) -> Result<Self> {
        if !(density > 0.0) {
            return Err(Error::InvalidCurve("density must be positive".into()));
        }
        let dense = curve.discretize(density);
        let skip: Option<Vec<bool>> = keep.map(|f| {
            dense
                .points
                .iter()
                .zip(&dense.component)
                .map(|(&p, &c)| !f(p, c))
                .collect()
        });
        let dense_lfs = dense
            .points
            .iter()
            .enumerate()
            .map(|(i, &p)| match &skip {
                Some(s) if s[i] => f64::NAN,
                _ => field.lfs(p),
            })
            .collect();
        let spacing = curve
            .components()
            .iter()
            .map(|c| {
                let n = (c.length() / density).ceil().max(1.0);
                c.length() / n
            })
            .collect();
        Ok(Validator {
            curve: curve.clone(),
            field,
            dense,
            dense_lfs,
            spacing,
            density,
            skip,
        })
    }

    pub fn curve(&self) -> &CurveModel {
        &self.curve
    }

    pub fn field(&self) -> &LfsField {
        &self.field
    }

    pub fn dense(&self) -> &Dense {
        &self.dense
    }

    pub fn dense_lfs(&self) -> &[f64] {
        &self.dense_lfs
    }

    pub fn epsilon_star(&self, sample: &SampleSet) -> Result<SamplingReport> {
        self.epsilon_star_where(sample, |_, _| true)
    }

    /// As [`Validator::epsilon_star`], checking only points where `keep(point, component)` holds.
    pub fn epsilon_star_where(&self, sample: &SampleSet, keep: impl Fn([f64; 2], usize) -> bool) -> Result<SamplingReport> {
        if sample.is_empty() {
            return Err(Error::EmptySample);
        }
        let xy = sample.xy()?;
        let index = SpatialIndex::new(&xy);
        let mut rep = SamplingReport {
            eps_star: 0.0,
            eps_star_corrected: 0.0,
            witness: self.dense.points[0],
            witness_lfs: self.dense_lfs[0],
            witness_distance: 0.0,
            density: self.density,
            checked: 0,
        };
        let consider = |p: [f64; 2], lfs: f64, half: f64, rep: &mut SamplingReport| {
            let d = index.nearest(&p).unwrap().1.sqrt();
            let r = d / lfs;
            rep.checked += 1;
            if r > rep.eps_star {
                rep.eps_star = r;
                rep.witness = p;
                rep.witness_lfs = lfs;
                rep.witness_distance = d;
            }
            let bound = if lfs > half { (d + half) / (lfs - half) } else { f64::INFINITY };
            rep.eps_star_corrected = rep.eps_star_corrected.max(bound).max(r);
        };
        for (i, &p) in self.dense.points.iter().enumerate() {
            let c = self.dense.component[i];
            if !self.skipped(i) && keep(p, c) {
                consider(p, self.dense_lfs[i], 0.5 * self.spacing[c], &mut rep);
            }
        }
        if sample.tags().is_some() {
            for (c, s, p) in self.extremal_points(sample)? {
                if self.param_in_region(c, s) && keep(p, c) {
                    consider(p, self.field.lfs(p), 0.0, &mut rep);
                }
            }
        }
        Ok(rep)
    }

    fn skipped(&self, i: usize) -> bool {
        self.skip.as_ref().is_some_and(|s| s[i])
    }

    /// Whether the curve point at parameter `s` of component `c` is in the
    /// checked region, judged by the dense point just before it.
    fn param_in_region(&self, c: usize, s: f64) -> bool {
        let Some(skip) = &self.skip else { return true };
        let (lo, hi) = (self.dense.offsets[c], self.dense.offsets[c + 1]);
        let k = self.dense.param[lo..hi].partition_point(|&v| v <= s).max(1) - 1;
        !skip[lo + k]
    }

    fn extremal_points(&self, sample: &SampleSet) -> Result<Vec<(usize, f64, [f64; 2])>> {
        Ok(consecutive_midpoints(&self.curve, sample)?
            .into_iter()
            .map(|m| (m.component, m.param, m.point))
            .collect())
    }

    /// Smallest slack `lfs(p) - d(p, S) / eps` over the checked points
    /// where `keep` holds. Positive slack means the eps-condition holds with
    /// room `eps * slack` for moving samples.
    pub fn clearance(&self, sample: &SampleSet, eps: f64, keep: impl Fn([f64; 2], usize) -> bool) -> Result<f64> {
        if sample.is_empty() {
            return Err(Error::EmptySample);
        }
        let index = SpatialIndex::new(&sample.xy()?);
        let slack = |p: [f64; 2], lfs: f64| lfs - index.nearest(&p).unwrap().1.sqrt() / eps;
        let mut best = f64::INFINITY;
        for (i, &p) in self.dense.points.iter().enumerate() {
            if !self.skipped(i) && keep(p, self.dense.component[i]) {
                best = best.min(slack(p, self.dense_lfs[i]));
            }
        }
        if sample.tags().is_some() {
            for (c, s, p) in self.extremal_points(sample)? {
                if self.param_in_region(c, s) && keep(p, c) {
                    best = best.min(slack(p, self.field.lfs(p)));
                }
            }
        }
        Ok(best)
    }

    /// Worst `d(p, S) / reach([a, b])` over consecutive pairs `a -> b` and
    /// dense points `p` between them.
    pub fn rho_star(&self, sample: &SampleSet) -> Result<RhoReport> {
        if sample.is_empty() {
            return Err(Error::EmptySample);
        }
        let tags = sample.tags().ok_or(Error::MissingTags)?;
        let xy = sample.xy()?;
        let index = SpatialIndex::new(&xy);
        let groups = sample.by_component(self.curve.components().len())?;
        let mut rep = RhoReport {
            rho_star: 0.0,
            witness: xy[0],
            pair: (0, 0),
            density: self.density,
        };
        for (c, idx) in groups.iter().enumerate() {
            let comp = &self.curve.components()[c];
            let l = comp.length();
            let (start, end) = (self.dense.offsets[c], self.dense.offsets[c + 1]);
            let m = end - start;
            for (i, j) in consecutive_pairs(idx, comp.closed()) {
                let (sa, mut sb) = (tags[i].param, tags[j].param);
                if sb <= sa {
                    sb += l;
                }
                // Dense points with parameter in [sa, sb], unrolled around closed components.
                let first = self.dense.param[start..end].partition_point(|&s| s < sa);
                let mut between = Vec::new();
                let mut k = first;
                loop {
                    let (wrap, kk) = (k / m, k % m);
                    let s = self.dense.param[start + kk] + wrap as f64 * l;
                    if s > sb || (wrap > 0 && !comp.closed()) || k >= first + m {
                        break;
                    }
                    between.push(start + kk);
                    k += 1;
                }
                let mut reach = self.field.lfs(xy[i]).min(self.field.lfs(xy[j]));
                for &q in &between {
                    reach = reach.min(self.dense_lfs[q]);
                }
                let (_, mid) = equidistant_point(comp, sa, sb, xy[i], xy[j])?;
                let checks = between.iter().map(|&q| self.dense.points[q]).chain(std::iter::once(mid));
                for p in checks {
                    let r = index.nearest(&p).unwrap().1.sqrt() / reach;
                    if r > rep.rho_star {
                        rep.rho_star = r;
                        rep.witness = p;
                        rep.pair = (i, j);
                    }
                }
            }
        }
        Ok(rep)
    }
}

/// Curve point with parameter in `(sa, sb)` equidistant from `a` and `b`,
/// with its parameter.
pub(crate) fn equidistant_point(
    comp: &crate::curve::Component,
    sa: f64,
    sb: f64,
    a: [f64; 2],
    b: [f64; 2],
) -> Result<(f64, [f64; 2])> {
    let (mut lo, mut hi) = (sa, sb);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let p = comp.point_at(mid)?;
        if d2(p, a) < d2(p, b) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let s = 0.5 * (lo + hi);
    Ok((s, comp.point_at(s)?))
}

fn consecutive_pairs(idx: &[usize], closed: bool) -> Vec<(usize, usize)> {
    let mut pairs: Vec<(usize, usize)> = idx.windows(2).map(|w| (w[0], w[1])).collect();
    if closed && idx.len() >= 2 {
        pairs.push((idx[idx.len() - 1], idx[0]));
    }
    pairs
}

/// The curve point between two consecutive samples that is equidistant
/// from both: where the distance to the sample set peaks on that arc.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Midpoint {
    pub component: usize,
    pub param: f64,
    pub point: [f64; 2],
    pub pair: (usize, usize),
}

/// Midpoints of all consecutive tagged pairs, cyclically on closed components.
pub fn consecutive_midpoints(curve: &CurveModel, sample: &SampleSet) -> Result<Vec<Midpoint>> {
    let tags = sample.tags().ok_or(Error::MissingTags)?;
    let xy = sample.xy()?;
    let mut out = Vec::new();
    for (c, idx) in sample.by_component(curve.components().len())?.iter().enumerate() {
        let comp = &curve.components()[c];
        let l = comp.length();
        for (i, j) in consecutive_pairs(idx, comp.closed()) {
            let (sa, mut sb) = (tags[i].param, tags[j].param);
            if sb <= sa {
                sb += l;
            }
            let (s, point) = equidistant_point(comp, sa, sb, xy[i], xy[j])?;
            out.push(Midpoint {
                component: c,
                param: if comp.closed() { s.rem_euclid(l) } else { s },
                point,
                pair: (i, j),
            });
        }
    }
    Ok(out)
}

pub fn epsilon_star(curve: &CurveModel, sample: &SampleSet, density: f64) -> Result<SamplingReport> {
    Validator::new(curve, density)?.epsilon_star(sample)
}

pub fn rho_star(curve: &CurveModel, sample: &SampleSet, density: f64) -> Result<RhoReport> {
    if sample.tags().is_none() {
        return Err(Error::MissingTags);
    }
    Validator::new(curve, density)?.rho_star(sample)
}

/// Local feature size at a curve point. Uses the curve's closed form when it
/// has one, otherwise the Voronoi approximation at step `density`.
pub fn lfs_numeric(curve: &CurveModel, p: &Point, density: f64) -> Result<f64> {
    if p.dim() != 2 {
        return Err(Error::Unsupported("curves are planar".into()));
    }
    let q = [p[0], p[1]];
    let (_, _, dist) = curve.project(q);
    let (lo, hi) = curve.bbox();
    let tol = 1e-6 * (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1.0);
    if dist > tol {
        return Err(Error::NotOnCurve(dist));
    }
    Ok(LfsField::for_curve(curve, density)?.lfs(q))
}

/// Edges between parameter-consecutive samples of each component, cyclic on
/// closed components.
pub fn ground_truth_graph(curve: &CurveModel, sample: &SampleSet) -> Result<ReconGraph> {
    let groups = sample.by_component(curve.components().len())?;
    let mut edges = Vec::with_capacity(sample.len());
    for (c, idx) in groups.iter().enumerate() {
        if idx.len() < 3 {
            return Err(Error::TooFewPoints {
                needed: 3,
                got: idx.len(),
            });
        }
        edges.extend(consecutive_pairs(idx, curve.components()[c].closed()));
    }
    ReconGraph::new(sample.len(), edges)
}

/// Places samples walking each component from a seeded random start, each as
/// far along as keeps `min(d(p,a), d(p,b)) <= safety * target * lfs(p)` for
/// all dense points `p` between the previous sample `a` and the candidate `b`.
pub fn greedy_sample(curve: &CurveModel, target_eps: f64, seed: u64, safety: f64) -> Result<SampleSet> {
    let v = Validator::new(curve, default_density(curve))?;
    greedy_sample_with(&v, target_eps, seed, safety)
}

pub fn greedy_sample_with(v: &Validator, target_eps: f64, seed: u64, safety: f64) -> Result<SampleSet> {
    if !(target_eps > 0.0) {
        return Err(Error::InvalidEpsilon(target_eps));
    }
    if !(safety > 0.0 && safety < 1.0) {
        return Err(Error::Infeasible(format!("safety {safety} outside (0, 1)")));
    }
    let limit = safety * target_eps;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dense = &v.dense;
    let mut points = Vec::new();
    let mut tags = Vec::new();
    for (c, comp) in v.curve.components().iter().enumerate() {
        let (start, end) = (dense.offsets[c], dense.offsets[c + 1]);
        let m = end - start;
        let closed = comp.closed();
        let at = |u: usize| start + if closed { u % m } else { u };
        let first = if closed { rng.gen_range(0..m) } else { 0 };
        let last = if closed { first + m } else { m - 1 };
        let ok = |u: usize, w: usize| {
            let (pa, pb) = (dense.points[at(u)], dense.points[at(w)]);
            (u + 1..w).all(|k| {
                let q = at(k);
                let p = dense.points[q];
                d2(p, pa).min(d2(p, pb)).sqrt() <= limit * v.dense_lfs[q]
            })
        };
        let mut chosen = vec![first];
        let mut u = first;
        while u < last {
            let mut w = u + 1;
            while w < last && ok(u, w + 1) {
                w += 1;
            }
            if w == u + 1 && w < last {
                return Err(Error::Infeasible(format!(
                    "target {target_eps} needs finer than the dense step {:e}",
                    v.spacing[c]
                )));
            }
            if w < last || !closed {
                chosen.push(w);
            }
            u = w;
        }
        let mut params: Vec<(f64, usize)> = chosen.iter().map(|&u| (dense.param[at(u)], at(u))).collect();
        params.sort_by(|a, b| a.0.total_cmp(&b.0));
        params.dedup_by(|a, b| a.1 == b.1);
        for (s, q) in params {
            points.push(Point::xy(dense.points[q][0], dense.points[q][1]));
            tags.push(Tag { component: c, param: s });
        }
    }
    let sample = SampleSet::with_tags(points, tags)?;
    let rep = v.epsilon_star(&sample)?;
    if !(rep.eps_star < target_eps) {
        return Err(Error::Infeasible(format!(
            "greedy sample reached eps* {} >= target {target_eps}",
            rep.eps_star
        )));
    }
    Ok(sample)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{make_curve, CurveFamily};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn circle() -> CurveModel {
        make_curve(&CurveFamily::Circle {
            center: [0., 0.],
            radius: 1.0,
        })
        .unwrap()
    }

    fn regular(n: usize, r: f64, comp: usize) -> (Vec<Point>, Vec<Tag>) {
        (0..n)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / n as f64;
                (
                    Point::xy(r * t.cos(), r * t.sin()),
                    Tag {
                        component: comp,
                        param: r * t,
                    },
                )
            })
            .unzip()
    }

    #[test]
    fn circle_eps_star() {
        let c = circle();
        let (p, t) = regular(5, 1.0, 0);
        let s = SampleSet::with_tags(p, t).unwrap();
        s.validate_tags(&c).unwrap();
        let r = epsilon_star(&c, &s, 1e-3).unwrap();
        assert_abs_diff_eq!(r.eps_star, 2.0 * (PI / 10.0).sin(), epsilon = 1e-4);
        assert!(r.verdict(0.66));
        assert!(r.eps_star_corrected >= r.eps_star);
        let (p, _) = regular(4, 1.0, 0);
        let r = epsilon_star(&c, &SampleSet::new(p).unwrap(), 1e-3).unwrap();
        // Untagged: only the grid is checked, so the midpoint is missed by O(density).
        assert_abs_diff_eq!(r.eps_star, 2.0 * (PI / 8.0).sin(), epsilon = 1e-3);
        assert!(r.eps_star_corrected >= 2.0 * (PI / 8.0).sin());
        assert!(!r.verdict(0.66));
        assert!(matches!(epsilon_star(&c, &SampleSet::new(vec![]).unwrap(), 1e-3), Err(Error::EmptySample)));
    }

    #[test]
    fn rho_equals_eps_for_constant_lfs() {
        let c = make_curve(&CurveFamily::Concentric {
            center: [0., 0.],
            inner: 100.0,
            outer: 102.0,
        })
        .unwrap();
        let (mut p, mut t) = regular(700, 100.0, 0);
        let (p2, t2) = regular(720, 102.0, 1);
        p.extend(p2);
        t.extend(t2);
        let s = SampleSet::with_tags(p, t).unwrap();
        let v = Validator::new(&c, 0.05).unwrap();
        let e = v.epsilon_star(&s).unwrap();
        let r = v.rho_star(&s).unwrap();
        assert_abs_diff_eq!(e.eps_star, r.rho_star, epsilon = 1e-6);
        assert!(rho_star(&c, &SampleSet::new(s.points().to_vec()).unwrap(), 0.05).is_err());
    }

    #[test]
    fn ground_truth() {
        let c = circle();
        let (p, t) = regular(5, 1.0, 0);
        let g = ground_truth_graph(&c, &SampleSet::with_tags(p, t).unwrap()).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (0, 4), (1, 2), (2, 3), (3, 4)]);
        let (p, t) = regular(2, 1.0, 0);
        assert!(ground_truth_graph(&c, &SampleSet::with_tags(p, t).unwrap()).is_err());
    }

    #[test]
    fn two_components_two_cycles() {
        let c = make_curve(&CurveFamily::Concentric {
            center: [0., 0.],
            inner: 1.0,
            outer: 3.0,
        })
        .unwrap();
        let (mut p, mut t) = regular(4, 1.0, 0);
        let (p2, t2) = regular(6, 3.0, 1);
        p.extend(p2);
        t.extend(t2);
        let g = ground_truth_graph(&c, &SampleSet::with_tags(p, t).unwrap()).unwrap();
        assert_eq!(g.component_count(), 2);
        assert!(g.is_cycle_union());
    }

    #[test]
    fn lfs_queries() {
        let c = circle();
        assert_abs_diff_eq!(lfs_numeric(&c, &Point::xy(0.0, 1.0), 1e-3).unwrap(), 1.0, epsilon = 1e-12);
        assert!(matches!(lfs_numeric(&c, &Point::xy(0.0, 2.0), 1e-3), Err(Error::NotOnCurve(_))));
        let cc = make_curve(&CurveFamily::Concentric {
            center: [0., 0.],
            inner: 1.0,
            outer: 3.0,
        })
        .unwrap();
        assert_abs_diff_eq!(lfs_numeric(&cc, &Point::xy(1.0, 0.0), 1e-3).unwrap(), 1.0, epsilon = 1e-3);
    }

    #[test]
    fn greedy_circle() {
        let c = circle();
        for seed in 0..5 {
            let s = greedy_sample(&c, 0.66, seed, 0.95).unwrap();
            assert!((5..=7).contains(&s.len()), "{} points", s.len());
            s.validate_tags(&c).unwrap();
            assert!(epsilon_star(&c, &s, 1e-3).unwrap().eps_star < 0.66);
            assert_eq!(greedy_sample(&c, 0.66, seed, 0.95).unwrap(), s);
        }
    }

    #[test]
    fn greedy_ellipse_adapts_to_curvature() {
        let e = make_curve(&CurveFamily::Ellipse {
            center: [0., 0.],
            a: 2.0,
            b: 1.0,
        })
        .unwrap();
        let s = greedy_sample(&e, 0.4, 42, 0.95).unwrap();
        let xy = s.xy().unwrap();
        let n = xy.len();
        let gap = |i: usize| {
            let (a, b) = (xy[i], xy[(i + 1) % n]);
            ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
        };
        let mid = |i: usize| {
            let (a, b) = (xy[i], xy[(i + 1) % n]);
            [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0]
        };
        let flat = (0..n).filter(|&i| mid(i)[0].abs() < 0.7).map(gap).fold(0.0, f64::max);
        let curved = (0..n).filter(|&i| mid(i)[0].abs() > 1.6).map(gap).fold(f64::INFINITY, f64::min);
        assert!(flat / curved > 1.5, "flat {flat} curved {curved}");
    }
}
