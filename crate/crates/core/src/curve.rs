//! Planar piecewise-analytic curves: chains of line segments, circular arcs,
//! elliptic arcs and polar-bent copies of these, with arc-length
//! parameterization and dense discretization.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const JOIN_TOL: f64 = 1e-9;
const TABLE: usize = 32;

/// Bends the plane around a circle: `theta = scale * x / radius`,
/// `r = radius + sign * scale * (y - y0)`, mapped to `(r sin theta, r cos theta)`.
/// The line `y = y0` goes to the circle of radius `radius`, scaled by `scale`
/// along it; `sign = -1` sends increasing `y` toward the center.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolarWarp {
    pub radius: f64,
    pub y0: f64,
    pub scale: f64,
    pub sign: f64,
}

impl PolarWarp {
    pub fn apply(&self, p: [f64; 2]) -> [f64; 2] {
        let th = self.scale * p[0] / self.radius;
        let r = self.radius + self.sign * self.scale * (p[1] - self.y0);
        [r * th.sin(), r * th.cos()]
    }

    fn apply_deriv(&self, p: [f64; 2], d: [f64; 2]) -> [f64; 2] {
        let th = self.scale * p[0] / self.radius;
        let r = self.radius + self.sign * self.scale * (p[1] - self.y0);
        let dth = self.scale * d[0] / self.radius;
        let dr = self.sign * self.scale * d[1];
        let (s, c) = th.sin_cos();
        [dr * s + r * dth * c, dr * c - r * dth * s]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Segment {
    Segment {
        start: [f64; 2],
        end: [f64; 2],
    },
    /// Counterclockwise for positive `sweep`, angles in radians.
    Arc {
        center: [f64; 2],
        radius: f64,
        start_angle: f64,
        sweep: f64,
    },
    /// Points `center + R(rotation) (a cos t, b sin t)` for `t` from `start_angle` over `sweep`.
    EllipseArc {
        center: [f64; 2],
        a: f64,
        b: f64,
        rotation: f64,
        start_angle: f64,
        sweep: f64,
    },
    Warped {
        warp: PolarWarp,
        inner: Box<Segment>,
    },
}

fn sub(p: [f64; 2], q: [f64; 2]) -> [f64; 2] {
    [p[0] - q[0], p[1] - q[1]]
}

fn norm(v: [f64; 2]) -> f64 {
    v[0].hypot(v[1])
}

pub(crate) fn d2(p: [f64; 2], q: [f64; 2]) -> f64 {
    let (dx, dy) = (p[0] - q[0], p[1] - q[1]);
    dx * dx + dy * dy
}

impl Segment {
    pub fn line(start: [f64; 2], end: [f64; 2]) -> Self {
        Segment::Segment { start, end }
    }

    pub fn arc(center: [f64; 2], radius: f64, start_angle: f64, sweep: f64) -> Self {
        Segment::Arc {
            center,
            radius,
            start_angle,
            sweep,
        }
    }

    /// Point at native parameter `t` in `[0, 1]`.
    pub fn eval(&self, t: f64) -> [f64; 2] {
        match self {
            Segment::Segment { start, end } => [start[0] + (end[0] - start[0]) * t, start[1] + (end[1] - start[1]) * t],
            Segment::Arc {
                center,
                radius,
                start_angle,
                sweep,
            } => {
                let a = start_angle + sweep * t;
                [center[0] + radius * a.cos(), center[1] + radius * a.sin()]
            }
            Segment::EllipseArc {
                center,
                a,
                b,
                rotation,
                start_angle,
                sweep,
            } => {
                let u = start_angle + sweep * t;
                let (x, y) = (a * u.cos(), b * u.sin());
                let (s, c) = rotation.sin_cos();
                [center[0] + c * x - s * y, center[1] + s * x + c * y]
            }
            Segment::Warped { warp, inner } => warp.apply(inner.eval(t)),
        }
    }

    /// Derivative with respect to the native parameter.
    pub fn deriv(&self, t: f64) -> [f64; 2] {
        match self {
            Segment::Segment { start, end } => sub(*end, *start),
            Segment::Arc {
                radius,
                start_angle,
                sweep,
                ..
            } => {
                let a = start_angle + sweep * t;
                [-radius * sweep * a.sin(), radius * sweep * a.cos()]
            }
            Segment::EllipseArc {
                a,
                b,
                rotation,
                start_angle,
                sweep,
                ..
            } => {
                let u = start_angle + sweep * t;
                let (dx, dy) = (-a * sweep * u.sin(), b * sweep * u.cos());
                let (s, c) = rotation.sin_cos();
                [c * dx - s * dy, s * dx + c * dy]
            }
            Segment::Warped { warp, inner } => warp.apply_deriv(inner.eval(t), inner.deriv(t)),
        }
    }

    pub fn start(&self) -> [f64; 2] {
        self.eval(0.0)
    }

    pub fn end(&self) -> [f64; 2] {
        self.eval(1.0)
    }

    /// Same point set traversed the other way.
    pub fn reversed(&self) -> Segment {
        match self {
            Segment::Segment { start, end } => Segment::Segment { start: *end, end: *start },
            Segment::Arc {
                center,
                radius,
                start_angle,
                sweep,
            } => Segment::Arc {
                center: *center,
                radius: *radius,
                start_angle: start_angle + sweep,
                sweep: -sweep,
            },
            Segment::EllipseArc {
                center,
                a,
                b,
                rotation,
                start_angle,
                sweep,
            } => Segment::EllipseArc {
                center: *center,
                a: *a,
                b: *b,
                rotation: *rotation,
                start_angle: start_angle + sweep,
                sweep: -sweep,
            },
            Segment::Warped { warp, inner } => Segment::Warped {
                warp: *warp,
                inner: Box::new(inner.reversed()),
            },
        }
    }

    fn closed_form_length(&self) -> Option<f64> {
        match self {
            Segment::Segment { start, end } => Some(norm(sub(*end, *start))),
            Segment::Arc { radius, sweep, .. } => Some(radius * sweep.abs()),
            _ => None,
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidCurve(m.to_string()));
        match self {
            Segment::Segment { start, end } => {
                if start == end {
                    return bad("zero-length line segment");
                }
            }
            Segment::Arc { radius, sweep, .. } => {
                if !(*radius > 0.0) || *sweep == 0.0 || sweep.abs() > 2.0 * PI + 1e-12 {
                    return bad("arc needs positive radius and sweep in (0, 2 pi]");
                }
            }
            Segment::EllipseArc { a, b, sweep, .. } => {
                if !(*a > 0.0 && *b > 0.0) || *sweep == 0.0 || sweep.abs() > 2.0 * PI + 1e-12 {
                    return bad("ellipse arc needs positive axes and sweep in (0, 2 pi]");
                }
            }
            Segment::Warped { warp, inner } => {
                if !(warp.radius > 0.0 && warp.scale > 0.0) || warp.sign.abs() != 1.0 {
                    return bad("warp needs positive radius and scale, sign of +-1");
                }
                inner.validate()?;
            }
        }
        Ok(())
    }
}

// 8-point Gauss-Legendre on [0, 1].
const GL_X: [f64; 8] = [
    0.019855071751231856,
    0.10166676129318664,
    0.2372337950418355,
    0.4082826787521751,
    0.5917173212478249,
    0.7627662049581645,
    0.8983332387068134,
    0.9801449282487681,
];
const GL_W: [f64; 8] = [
    0.05061426814518813,
    0.11119051722668724,
    0.15685332293894363,
    0.18134189168918100,
    0.18134189168918100,
    0.15685332293894363,
    0.11119051722668724,
    0.05061426814518813,
];

fn speed_integral(seg: &Segment, t0: f64, t1: f64) -> f64 {
    let h = t1 - t0;
    (0..8).map(|k| GL_W[k] * norm(seg.deriv(t0 + h * GL_X[k]))).sum::<f64>() * h
}

/// A segment with its arc-length data.
#[derive(Clone, Debug)]
struct Measured {
    seg: Segment,
    length: f64,
    /// Cumulative length at `t = i / TABLE` for non-uniform segments.
    table: Option<Vec<f64>>,
}

impl Measured {
    fn new(seg: Segment) -> Self {
        if let Some(length) = seg.closed_form_length() {
            return Measured { seg, length, table: None };
        }
        let mut table = Vec::with_capacity(TABLE + 1);
        table.push(0.0);
        let mut acc = 0.0;
        for i in 0..TABLE {
            acc += speed_integral(&seg, i as f64 / TABLE as f64, (i + 1) as f64 / TABLE as f64);
            table.push(acc);
        }
        Measured {
            seg,
            length: acc,
            table: Some(table),
        }
    }

    /// Native parameter at arc length `s` from the segment start.
    fn t_at(&self, s: f64) -> f64 {
        let s = s.clamp(0.0, self.length);
        let Some(table) = &self.table else {
            return if self.length > 0.0 { s / self.length } else { 0.0 };
        };
        let i = table.partition_point(|&v| v <= s).clamp(1, TABLE) - 1;
        let t0 = i as f64 / TABLE as f64;
        let span = table[i + 1] - table[i];
        let mut t = t0 + if span > 0.0 { (s - table[i]) / span / TABLE as f64 } else { 0.0 };
        for _ in 0..4 {
            let f = table[i] + speed_integral(&self.seg, t0, t) - s;
            let v = norm(self.seg.deriv(t));
            if v == 0.0 {
                break;
            }
            t -= f / v;
        }
        t.clamp(0.0, 1.0)
    }

    /// Arc length from the segment start to native parameter `t`.
    fn s_at(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, 1.0);
        match &self.table {
            None => t * self.length,
            Some(table) => {
                let i = ((t * TABLE as f64) as usize).min(TABLE - 1);
                table[i] + speed_integral(&self.seg, i as f64 / TABLE as f64, t)
            }
        }
    }
}

/// One connected curve: a chain of segments, closed or open.
#[derive(Clone, Debug)]
pub struct Component {
    segs: Vec<Measured>,
    cum: Vec<f64>,
    closed: bool,
}

impl Component {
    pub fn new(segments: Vec<Segment>, closed: bool) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidCurve("component without segments".into()));
        }
        for s in &segments {
            s.validate()?;
        }
        for w in segments.windows(2) {
            check_join(&w[0], &w[1])?;
        }
        if closed {
            let gap = norm(sub(segments[0].start(), segments[segments.len() - 1].end()));
            if gap > JOIN_TOL {
                return Err(Error::NotClosed(gap));
            }
            check_join(&segments[segments.len() - 1], &segments[0])?;
        }
        let segs: Vec<Measured> = segments.into_iter().map(Measured::new).collect();
        let mut cum = Vec::with_capacity(segs.len() + 1);
        cum.push(0.0);
        for m in &segs {
            cum.push(cum.last().unwrap() + m.length);
        }
        Ok(Component { segs, cum, closed })
    }

    pub fn closed(&self) -> bool {
        self.closed
    }

    pub fn length(&self) -> f64 {
        *self.cum.last().unwrap()
    }

    pub fn segments(&self) -> impl Iterator<Item = &Segment> {
        self.segs.iter().map(|m| &m.seg)
    }

    pub fn segment_count(&self) -> usize {
        self.segs.len()
    }

    /// Normalizes an arc-length parameter: wraps on closed components,
    /// rejects out-of-range values on open ones.
    fn normalize(&self, s: f64) -> Result<f64> {
        let l = self.length();
        if self.closed {
            let r = s.rem_euclid(l);
            Ok(if r >= l { 0.0 } else { r })
        } else if (-JOIN_TOL..=l + JOIN_TOL).contains(&s) {
            Ok(s.clamp(0.0, l))
        } else {
            Err(Error::InvalidSample(format!("parameter {s} outside open component of length {l}")))
        }
    }

    fn locate(&self, s: f64) -> (usize, f64) {
        let i = self.cum.partition_point(|&v| v <= s).clamp(1, self.segs.len()) - 1;
        (i, self.segs[i].t_at(s - self.cum[i]))
    }

    pub fn point_at(&self, s: f64) -> Result<[f64; 2]> {
        let (i, t) = self.locate(self.normalize(s)?);
        Ok(self.segs[i].seg.eval(t))
    }

    /// Unit tangent in the direction of increasing parameter.
    pub fn tangent_at(&self, s: f64) -> Result<[f64; 2]> {
        let (i, t) = self.locate(self.normalize(s)?);
        let d = self.segs[i].seg.deriv(t);
        let n = norm(d);
        Ok([d[0] / n, d[1] / n])
    }

    /// Arc-length parameter of native parameter `t` on segment `seg`.
    pub fn param_of(&self, seg: usize, t: f64) -> f64 {
        self.cum[seg] + self.segs[seg].s_at(t)
    }

    /// Closest point on the component: `(param, distance)`.
    pub fn project(&self, p: [f64; 2]) -> (f64, f64) {
        let mut best = (0.0, f64::INFINITY);
        for (i, m) in self.segs.iter().enumerate() {
            let (t, d) = project_segment(&m.seg, p);
            if d < best.1 {
                best = (self.param_of(i, t), d);
            }
        }
        best
    }
}

fn check_join(a: &Segment, b: &Segment) -> Result<()> {
    let gap = norm(sub(a.end(), b.start()));
    if gap > JOIN_TOL {
        return Err(Error::InvalidCurve(format!("segments do not meet, gap {gap:e}")));
    }
    let (u, v) = (a.deriv(1.0), b.deriv(0.0));
    let cross = (u[0] * v[1] - u[1] * v[0]) / (norm(u) * norm(v));
    let dot = u[0] * v[0] + u[1] * v[1];
    if cross.abs() > JOIN_TOL || dot <= 0.0 {
        return Err(Error::InvalidCurve(format!("tangent discontinuity at join, sin(angle) {cross:e}")));
    }
    Ok(())
}

pub(crate) fn project_segment(seg: &Segment, p: [f64; 2]) -> (f64, f64) {
    match seg {
        Segment::Segment { start, end } => {
            let d = sub(*end, *start);
            let t = (((p[0] - start[0]) * d[0] + (p[1] - start[1]) * d[1]) / (d[0] * d[0] + d[1] * d[1])).clamp(0.0, 1.0);
            (t, d2(seg.eval(t), p).sqrt())
        }
        Segment::Arc {
            center,
            start_angle,
            sweep,
            ..
        } => {
            let ang = (p[1] - center[1]).atan2(p[0] - center[0]);
            // Fraction of the sweep reaching `ang`, folded into the arc or its nearer end.
            let rel = ((ang - start_angle) * sweep.signum()).rem_euclid(2.0 * PI);
            let t = rel / sweep.abs();
            let mut cands = vec![0.0, 1.0];
            if t <= 1.0 {
                cands.push(t);
            }
            cands
                .into_iter()
                .map(|t| (t, d2(seg.eval(t), p).sqrt()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap()
        }
        _ => {
            const N: usize = 64;
            let mut best = (0.0, f64::INFINITY);
            for k in 0..=N {
                let t = k as f64 / N as f64;
                let d = d2(seg.eval(t), p);
                if d < best.1 {
                    best = (t, d);
                }
            }
            // Golden-section refinement around the best grid sample.
            let (mut lo, mut hi) = ((best.0 - 1.0 / N as f64).max(0.0), (best.0 + 1.0 / N as f64).min(1.0));
            let g = 0.5 * (5f64.sqrt() - 1.0);
            for _ in 0..80 {
                let m1 = hi - g * (hi - lo);
                let m2 = lo + g * (hi - lo);
                if d2(seg.eval(m1), p) < d2(seg.eval(m2), p) {
                    hi = m2;
                } else {
                    lo = m1;
                }
            }
            let t = 0.5 * (lo + hi);
            let d = d2(seg.eval(t), p);
            if d < best.1 {
                (t, d.sqrt())
            } else {
                (best.0, best.1.sqrt())
            }
        }
    }
}

/// Closed-form local feature size for the curve families that admit one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum AnalyticLfs {
    Circle { center: [f64; 2], radius: f64 },
    Concentric { center: [f64; 2], inner: f64, outer: f64 },
    /// Axis-aligned ellipse with semi-axes `a >= b`; the medial axis is the
    /// segment between the two centers of extremal curvature.
    Ellipse { center: [f64; 2], a: f64, b: f64 },
    /// Idealized model where the medial axis is the single point `point`.
    DistanceTo { point: [f64; 2] },
}

impl AnalyticLfs {
    pub fn lfs(&self, p: [f64; 2]) -> f64 {
        match self {
            AnalyticLfs::Circle { radius, .. } => *radius,
            AnalyticLfs::Concentric { center, inner, outer } => {
                let r = norm(sub(p, *center));
                let mid = 0.5 * (inner + outer);
                let to_mid = (r - mid).abs();
                if r < mid {
                    to_mid.min(r)
                } else {
                    to_mid
                }
            }
            AnalyticLfs::Ellipse { center, a, b } => {
                let c2 = a * a - b * b;
                let half = c2 / a;
                let q = sub(p, *center);
                let x = q[0].clamp(-half, half);
                norm(sub(q, [x, 0.0]))
            }
            AnalyticLfs::DistanceTo { point } => norm(sub(p, *point)),
        }
    }
}

/// A finite union of planar curves.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "CurveSpec", into = "CurveSpec")]
pub struct CurveModel {
    components: Vec<Component>,
    analytic: Option<AnalyticLfs>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComponentSpec {
    pub segments: Vec<Segment>,
    #[serde(default = "default_closed")]
    pub closed: bool,
}

fn default_closed() -> bool {
    true
}

/// Plain-data form of [`CurveModel`], the curve JSON document.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurveSpec {
    pub components: Vec<ComponentSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analytic_lfs: Option<AnalyticLfs>,
}

impl TryFrom<CurveSpec> for CurveModel {
    type Error = Error;
    fn try_from(spec: CurveSpec) -> Result<Self> {
        let comps = spec
            .components
            .into_iter()
            .map(|c| Component::new(c.segments, c.closed))
            .collect::<Result<Vec<_>>>()?;
        let mut m = CurveModel::new(comps)?;
        m.analytic = spec.analytic_lfs;
        Ok(m)
    }
}

impl From<CurveModel> for CurveSpec {
    fn from(m: CurveModel) -> Self {
        CurveSpec {
            components: m
                .components
                .iter()
                .map(|c| ComponentSpec {
                    segments: c.segments().cloned().collect(),
                    closed: c.closed,
                })
                .collect(),
            analytic_lfs: m.analytic,
        }
    }
}

/// Dense points along a curve, in component order.
#[derive(Clone, Debug, Default)]
pub struct Dense {
    pub points: Vec<[f64; 2]>,
    pub component: Vec<usize>,
    pub param: Vec<f64>,
    /// Start offset of each component's run in `points`, plus a final end offset.
    pub offsets: Vec<usize>,
    pub closed: Vec<bool>,
}

impl Dense {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// True when `i` and `j` are adjacent along the same component.
    pub fn consecutive(&self, i: usize, j: usize) -> bool {
        let c = self.component[i];
        if self.component[j] != c {
            return false;
        }
        let (lo, hi) = (i.min(j), i.max(j));
        if hi - lo == 1 {
            return true;
        }
        self.closed[c] && lo == self.offsets[c] && hi + 1 == self.offsets[c + 1]
    }
}

impl CurveModel {
    pub fn new(components: Vec<Component>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidCurve("curve without components".into()));
        }
        Ok(CurveModel {
            components,
            analytic: None,
        })
    }

    pub fn with_analytic(mut self, lfs: AnalyticLfs) -> Self {
        self.analytic = Some(lfs);
        self
    }

    pub fn analytic_lfs(&self) -> Option<&AnalyticLfs> {
        self.analytic.as_ref()
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn component(&self, c: usize) -> Result<&Component> {
        self.components
            .get(c)
            .ok_or_else(|| Error::InvalidSample(format!("no component {c}")))
    }

    pub fn is_closed(&self) -> bool {
        self.components.iter().all(|c| c.closed)
    }

    pub fn total_length(&self) -> f64 {
        self.components.iter().map(|c| c.length()).sum()
    }

    pub fn point_at(&self, c: usize, s: f64) -> Result<[f64; 2]> {
        self.component(c)?.point_at(s)
    }

    /// Closest curve point: `(component, param, distance)`.
    pub fn project(&self, p: [f64; 2]) -> (usize, f64, f64) {
        let mut best = (0, 0.0, f64::INFINITY);
        for (i, c) in self.components.iter().enumerate() {
            let (s, d) = c.project(p);
            if d < best.2 {
                best = (i, s, d);
            }
        }
        best
    }

    /// Points spaced evenly in arc length, at most `step` apart, on every
    /// component. Closed components do not repeat their start point.
    pub fn discretize(&self, step: f64) -> Dense {
        let mut out = Dense::default();
        for (ci, comp) in self.components.iter().enumerate() {
            out.offsets.push(out.points.len());
            out.closed.push(comp.closed);
            let l = comp.length();
            let n = ((l / step).ceil() as usize).max(if comp.closed { 3 } else { 1 });
            let count = if comp.closed { n } else { n + 1 };
            // Walk segments in step with the parameter instead of re-locating.
            let mut seg = 0;
            for k in 0..count {
                let s = l * k as f64 / n as f64;
                while seg + 1 < comp.segs.len() && comp.cum[seg + 1] <= s {
                    seg += 1;
                }
                let m = &comp.segs[seg];
                let p = m.seg.eval(m.t_at(s - comp.cum[seg]));
                out.points.push(p);
                out.component.push(ci);
                out.param.push(s);
            }
        }
        out.offsets.push(out.points.len());
        out
    }

    pub fn bbox(&self) -> ([f64; 2], [f64; 2]) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for c in &self.components {
            for m in &c.segs {
                for k in 0..=16 {
                    let p = m.seg.eval(k as f64 / 16.0);
                    for d in 0..2 {
                        lo[d] = lo[d].min(p[d]);
                        hi[d] = hi[d].max(p[d]);
                    }
                }
            }
        }
        (lo, hi)
    }
}

/// Curve families with known local feature size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CurveFamily {
    Circle { center: [f64; 2], radius: f64 },
    Ellipse { center: [f64; 2], a: f64, b: f64 },
    /// Two concentric circles standing in for a pair of parallel lines.
    Concentric { center: [f64; 2], inner: f64, outer: f64 },
    /// Open stem from (0, 0) to (1, 0) ending in a small clockwise hook of radius `h`.
    Hook { h: f64 },
    ArcChain { segments: Vec<Segment> },
}

fn full_circle(center: [f64; 2], r: f64) -> Segment {
    Segment::arc(center, r, 0.0, 2.0 * PI)
}

pub fn make_curve(spec: &CurveFamily) -> Result<CurveModel> {
    let positive = |v: f64, what: &str| {
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidCurve(format!("{what} must be positive")))
        }
    };
    match spec {
        CurveFamily::Circle { center, radius } => {
            positive(*radius, "radius")?;
            Ok(CurveModel::new(vec![Component::new(vec![full_circle(*center, *radius)], true)?])?
                .with_analytic(AnalyticLfs::Circle {
                    center: *center,
                    radius: *radius,
                }))
        }
        CurveFamily::Ellipse { center, a, b } => {
            positive(*a, "semi-axis a")?;
            positive(*b, "semi-axis b")?;
            if b > a {
                return Err(Error::InvalidCurve("ellipse needs a >= b".into()));
            }
            let seg = Segment::EllipseArc {
                center: *center,
                a: *a,
                b: *b,
                rotation: 0.0,
                start_angle: 0.0,
                sweep: 2.0 * PI,
            };
            Ok(CurveModel::new(vec![Component::new(vec![seg], true)?])?.with_analytic(AnalyticLfs::Ellipse {
                center: *center,
                a: *a,
                b: *b,
            }))
        }
        CurveFamily::Concentric { center, inner, outer } => {
            positive(*inner, "inner radius")?;
            if outer <= inner {
                return Err(Error::InvalidCurve("outer radius must exceed inner".into()));
            }
            Ok(CurveModel::new(vec![
                Component::new(vec![full_circle(*center, *inner)], true)?,
                Component::new(vec![full_circle(*center, *outer)], true)?,
            ])?
            .with_analytic(AnalyticLfs::Concentric {
                center: *center,
                inner: *inner,
                outer: *outer,
            }))
        }
        CurveFamily::Hook { h } => {
            positive(*h, "hook scale")?;
            let stem = Segment::line([0.0, 0.0], [1.0, 0.0]);
            let hook = Segment::arc([1.0, -h], *h, PI / 2.0, -5.0 * PI / 18.0);
            Ok(CurveModel::new(vec![Component::new(vec![stem, hook], false)?])?
                .with_analytic(AnalyticLfs::DistanceTo { point: [1.0, 0.0] }))
        }
        CurveFamily::ArcChain { segments } => {
            let comp = Component::new(segments.clone(), true)?;
            CurveModel::new(vec![comp])
        }
    }
}

/// Unit tangent direction of segment `seg` at its start or end, used by
/// constructions that chain arcs.
pub fn end_tangent(seg: &Segment, at_end: bool) -> [f64; 2] {
    let d = seg.deriv(if at_end { 1.0 } else { 0.0 });
    let n = norm(d);
    [d[0] / n, d[1] / n]
}


#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn circle_and_params() {
        let c = make_curve(&CurveFamily::Circle {
            center: [0., 0.],
            radius: 2.0,
        })
        .unwrap();
        assert_abs_diff_eq!(c.total_length(), 4.0 * PI, epsilon = 1e-12);
        let p = c.point_at(0, PI).unwrap();
        assert_abs_diff_eq!(p[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p[1], 2.0, epsilon = 1e-12);
        // Wraps on closed components.
        let q = c.point_at(0, 5.0 * PI).unwrap();
        assert_abs_diff_eq!(q[0], p[0], epsilon = 1e-12);
        let (ci, s, d) = c.project([0.0, 3.0]);
        assert_eq!(ci, 0);
        assert_abs_diff_eq!(s, PI, epsilon = 1e-12);
        assert_abs_diff_eq!(d, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn ellipse_arc_length() {
        let e = make_curve(&CurveFamily::Ellipse {
            center: [0., 0.],
            a: 2.0,
            b: 1.0,
        })
        .unwrap();
        // Complete elliptic integral value for a=2, b=1.
        assert_abs_diff_eq!(e.total_length(), 9.688448220547675, epsilon = 1e-9);
        let comp = &e.components()[0];
        for k in 0..50 {
            let s = e.total_length() * k as f64 / 50.0;
            let (i, t) = comp.locate(s);
            assert_abs_diff_eq!(comp.param_of(i, t), s, epsilon = 1e-10);
        }
    }

    #[test]
    fn warped_segment_length() {
        let w = PolarWarp {
            radius: 10.0,
            y0: 0.0,
            scale: 1.0,
            sign: 1.0,
        };
        // Horizontal line at y = 1 bends onto a circle arc of radius 11.
        let seg = Segment::Warped {
            warp: w,
            inner: Box::new(Segment::line([0.0, 1.0], [5.0, 1.0])),
        };
        let m = Measured::new(seg);
        assert_abs_diff_eq!(m.length, 5.0 * 11.0 / 10.0, epsilon = 1e-10);
    }

    #[test]
    fn closure_and_joins() {
        let open = vec![Segment::arc([0., 0.], 1.0, 0.0, PI)];
        assert!(matches!(Component::new(open.clone(), true), Err(Error::NotClosed(g)) if (g - 2.0).abs() < 1e-12));
        assert!(Component::new(open, false).is_ok());
        let kink = vec![Segment::line([0., 0.], [1., 0.]), Segment::line([1., 0.], [1., 1.])];
        assert!(Component::new(kink, false).is_err());
    }

    #[test]
    fn json_round_trip() {
        let c = make_curve(&CurveFamily::Concentric {
            center: [0., 0.],
            inner: 100.0,
            outer: 102.0,
        })
        .unwrap();
        let s = serde_json::to_string(&c).unwrap();
        let back: CurveModel = serde_json::from_str(&s).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), s);
        assert_eq!(back.analytic_lfs().unwrap().lfs([100.0, 0.0]), 1.0);
    }

    #[test]
    fn analytic_values() {
        let e = AnalyticLfs::Ellipse {
            center: [0., 0.],
            a: 2.0,
            b: 1.0,
        };
        assert_abs_diff_eq!(e.lfs([2.0, 0.0]), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(e.lfs([0.0, 1.0]), 1.0, epsilon = 1e-12);
        let c = AnalyticLfs::Concentric {
            center: [0., 0.],
            inner: 1.0,
            outer: 3.0,
        };
        assert_abs_diff_eq!(c.lfs([1.0, 0.0]), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.lfs([0.0, -3.0]), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn dense_consecutive() {
        let c = make_curve(&CurveFamily::Circle {
            center: [0., 0.],
            radius: 1.0,
        })
        .unwrap();
        let d = c.discretize(0.1);
        assert_eq!(d.len(), 63);
        assert!(d.consecutive(0, 62));
        assert!(d.consecutive(5, 6));
        assert!(!d.consecutive(5, 7));
    }
}
