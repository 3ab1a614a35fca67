//! Point sets that are 0.72-samples of several different curves at once.
//!
//! The building block is a column: a C¹ chain of circular arcs and two
//! vertical line pieces through eight points, four on the line `x = 0`
//! (`add`, `ad`, `a`, `b`) and four on `x = -1.008` (`c`, `d`, `e`, `f`).
//! Its upper half is the point reflection of the lower half through `q`, the
//! midpoint of `b` and `c`. Copies of the column placed `2.016` apart, joined
//! in pairs by semicircles on top, give a strip that admits two different
//! pairings ("blue" and "red"). Bent into rings and tied together, the
//! strips give one point set with four curves, two of them connected.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;

use serde::Serialize;

use crate::curve::{project_segment, Component, CurveModel, PolarWarp, Segment};
use crate::error::{Error, Result};
use crate::geom::Point;
use crate::medial::LfsField;
use crate::sampling::{consecutive_midpoints, SampleSet, SamplingReport, Tag, Validator};

/// Horizontal offset between the two columns of a copy; makes `d(b, c') = d(b, c)`.
pub const COLUMN_OFFSET: f64 = 2.016;
/// Horizontal period of the strip.
pub const PERIOD: f64 = 2.0 * COLUMN_OFFSET;
/// Copies per ring: the first power of two from 16 for which every tied-annuli
/// variant verifies at 0.72 (see [`find_k_star`]).
pub const K_STAR: usize = 4096;
/// Radial gap between the two rings of the tied annuli.
pub const TIE_GAP: f64 = 4.0;
/// Sampling constant all constructions are verified against.
pub const EPS: f64 = 0.72;

const CX: f64 = -1.008;
const SEMI_R: f64 = 1.008;
const TOP: f64 = 3.614;
const BOTTOM: f64 = -3.0;
/// Height of `q`: the strip's center line, which bending keeps at length.
const Y0: f64 = 0.307;
const ON_CURVE: f64 = 1e-9;
/// Copies on each side of copy 0 in a verification window.
const WINDOW: i64 = 2;
const PER_COPY: usize = 19;
const TIE_SAMPLES: usize = 3;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NamedCircle {
    pub name: String,
    pub center: [f64; 2],
    pub radius: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NamedPoint {
    pub name: String,
    pub point: [f64; 2],
}

/// Intermediate geometry of a construction.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ConstructionLog {
    pub circles: Vec<NamedCircle>,
    pub points: Vec<NamedPoint>,
    pub values: BTreeMap<String, f64>,
}

impl ConstructionLog {
    fn circle(&mut self, name: &str, center: [f64; 2], radius: f64) {
        self.circles.push(NamedCircle {
            name: name.into(),
            center,
            radius,
        });
    }

    fn point(&mut self, name: &str, point: [f64; 2]) {
        self.points.push(NamedPoint { name: name.into(), point });
    }

    pub fn find_circle(&self, name: &str) -> Option<&NamedCircle> {
        self.circles.iter().find(|c| c.name == name)
    }

    pub fn find_point(&self, name: &str) -> Option<[f64; 2]> {
        self.points.iter().find(|p| p.name == name).map(|p| p.point)
    }
}

fn sub(p: [f64; 2], q: [f64; 2]) -> [f64; 2] {
    [p[0] - q[0], p[1] - q[1]]
}

fn norm(v: [f64; 2]) -> f64 {
    v[0].hypot(v[1])
}

fn lerp(p: [f64; 2], q: [f64; 2], t: f64) -> [f64; 2] {
    [p[0] + (q[0] - p[0]) * t, p[1] + (q[1] - p[1]) * t]
}

fn angle(v: [f64; 2]) -> f64 {
    v[1].atan2(v[0])
}

/// Arc on the circle `(center, radius)` from `from` to `to`, turning
/// counterclockwise when `ccw`.
fn arc_between(center: [f64; 2], radius: f64, from: [f64; 2], to: [f64; 2], ccw: bool) -> Segment {
    let a0 = angle(sub(from, center));
    let mut sweep = angle(sub(to, center)) - a0;
    if ccw {
        while sweep <= 0.0 {
            sweep += 2.0 * PI;
        }
    } else {
        while sweep >= 0.0 {
            sweep -= 2.0 * PI;
        }
    }
    Segment::arc(center, radius, a0, sweep)
}

/// Intersections of two circles.
fn circle_circle(p0: [f64; 2], r0: f64, p1: [f64; 2], r1: f64) -> Result<[[f64; 2]; 2]> {
    let v = sub(p1, p0);
    let d = norm(v);
    let a = (r0 * r0 - r1 * r1 + d * d) / (2.0 * d);
    let h2 = r0 * r0 - a * a;
    if !(h2 >= 0.0) {
        return Err(Error::Infeasible(format!("tangency system unsolvable, residual {h2:e}")));
    }
    let h = h2.sqrt();
    let m = [p0[0] + a * v[0] / d, p0[1] + a * v[1] / d];
    let perp = [-v[1] / d, v[0] / d];
    Ok([[m[0] + h * perp[0], m[1] + h * perp[1]], [m[0] - h * perp[0], m[1] - h * perp[1]]])
}

fn map_points(seg: &Segment, f: &impl Fn([f64; 2]) -> [f64; 2]) -> Segment {
    match seg {
        Segment::Segment { start, end } => Segment::line(f(*start), f(*end)),
        Segment::Arc {
            center,
            radius,
            start_angle,
            sweep,
        } => Segment::arc(f(*center), *radius, *start_angle, *sweep),
        _ => unreachable!("columns hold lines and circular arcs only"),
    }
}

fn shifted(segs: &[Segment], dx: f64) -> Vec<Segment> {
    segs.iter().map(|s| map_points(s, &|p| [p[0] + dx, p[1]])).collect()
}

/// Rotation by pi about `q`, keeping the direction of travel.
fn rotated_half_turn(seg: &Segment, q: [f64; 2]) -> Segment {
    match map_points(seg, &|p| [2.0 * q[0] - p[0], 2.0 * q[1] - p[1]]) {
        Segment::Arc {
            center,
            radius,
            start_angle,
            sweep,
        } => Segment::arc(center, radius, start_angle + PI, sweep),
        line => line,
    }
}

/// Reflection in the line `x = 0`, keeping the direction of travel.
fn mirrored(seg: &Segment) -> Segment {
    match map_points(seg, &|p| [-p[0], p[1]]) {
        Segment::Arc {
            center,
            radius,
            start_angle,
            sweep,
        } => Segment::arc(center, radius, PI - start_angle, -sweep),
        line => line,
    }
}

fn reversed_chain(segs: &[Segment]) -> Vec<Segment> {
    segs.iter().rev().map(|s| s.reversed()).collect()
}

/// The column through `add, ad, a, b` on `x = 0` and `c, d, e, f` on `x = -1.008`.
#[derive(Clone, Debug)]
struct Column {
    /// From `add` up to `q`.
    lower: Vec<Segment>,
    /// From `q` up to `f`.
    upper: Vec<Segment>,
    log: ConstructionLog,
}

impl Column {
    fn new() -> Result<Self> {
        let (a, b, c, d) = ([0.0, -1.0], [0.0, 0.0], [CX, 0.614], [CX, 1.614]);
        let (ad, add) = ([0.0, -2.0], [0.0, BOTTOM]);
        let q = lerp(b, c, 0.5);
        // S1: through a and b (center on y = -0.5) and through q.
        let x0 = (q[0] * q[0] + (0.5 + q[1]).powi(2) - 0.25) / (2.0 * q[0]);
        let s1 = [x0, -0.5];
        let r1 = norm(sub(b, s1));
        // Midpoint of [a, b] on S1 and the radius d_p / 0.72 of the circles below a.
        let p = [s1[0] + r1, -0.5];
        let dp = norm(sub(p, a));
        let rho = dp / EPS;
        // S3 tangent to S1 at a, S4 tangent to S3 through ad, S5 tangent to S4
        // and to the vertical line x = 0.
        let u = [(a[0] - s1[0]) / r1, (a[1] - s1[1]) / r1];
        let c3 = [a[0] + rho * u[0], a[1] + rho * u[1]];
        let [k1, k2] = circle_circle(c3, 2.0 * rho, ad, rho)?;
        let c4 = if k1[0] < k2[0] { k1 } else { k2 };
        let ux = (rho - c4[0]) / (2.0 * rho);
        let w = [ux, -(1.0 - ux * ux).sqrt()];
        let infl = [c4[0] + rho * w[0], c4[1] + rho * w[1]];
        let c5 = [c4[0] + 2.0 * rho * w[0], c4[1] + 2.0 * rho * w[1]];
        let e5 = [0.0, c5[1]];
        let v34 = sub(c4, c3);
        let t34 = [c3[0] + v34[0] / 2.0, c3[1] + v34[1] / 2.0];
        if !(e5[1] > add[1]) {
            return Err(Error::Infeasible(format!("vertical tail has length {}", e5[1] - add[1])));
        }
        let lower = vec![
            Segment::line(add, e5),
            arc_between(c5, rho, e5, infl, false),
            arc_between(c4, rho, infl, t34, true),
            arc_between(c3, rho, t34, a, false),
            arc_between(s1, r1, a, q, true),
        ];
        let upper: Vec<Segment> = lower.iter().rev().map(|s| rotated_half_turn(s, q).reversed()).collect();

        let mut log = ConstructionLog::default();
        let reflect = |p: [f64; 2]| [2.0 * q[0] - p[0], 2.0 * q[1] - p[1]];
        log.circle("S1", s1, r1);
        log.circle("S2", reflect(s1), r1);
        log.circle("S3", c3, rho);
        log.circle("S4", c4, rho);
        log.circle("S5", c5, rho);
        log.circle("S3_upper", reflect(c3), rho);
        log.circle("S4_upper", reflect(c4), rho);
        log.circle("S5_upper", reflect(c5), rho);
        for (name, pt) in [("a", a), ("b", b), ("c", c), ("d", d), ("ad", ad), ("add", add)] {
            log.point(name, pt);
        }
        log.point("e", reflect(ad));
        log.point("f", reflect(add));
        log.point("q", q);
        log.point("p", p);
        log.point("r", reflect(p));
        log.point("inflection", infl);
        log.point("inflection_upper", reflect(infl));
        log.point("S3_S4_tangency", t34);
        log.values.insert("d_p".into(), dp);
        log.values.insert("d_q".into(), norm(sub(q, b)));
        log.values.insert("column_offset".into(), COLUMN_OFFSET);
        Ok(Column { lower, upper, log })
    }

    fn full(&self) -> Vec<Segment> {
        self.lower.iter().chain(&self.upper).cloned().collect()
    }

    fn mirrored_full(&self) -> Vec<Segment> {
        self.full().iter().map(mirrored).collect()
    }
}

fn semicircle(m: i64) -> Segment {
    Segment::arc([PERIOD * m as f64, TOP], SEMI_R, PI, -PI)
}

/// The 19 samples of copy `m` in the flat strip, by local index:
/// 0-3 and 4-7 the bottom columns at `x = Pm` and `x = Pm + 2.016`
/// (bottom to top), 8-11 and 12-15 the top columns at `x = Pm -+ 1.008`,
/// 16-18 the semicircle samples.
fn copy_sample(m: i64, local: usize) -> [f64; 2] {
    let x = PERIOD * m as f64;
    match local {
        0..=3 => [x, BOTTOM + local as f64],
        4..=7 => [x + COLUMN_OFFSET, BOTTOM + (local - 4) as f64],
        8..=11 => [x + CX, 0.614 + (local - 8) as f64],
        12..=15 => [x - CX, 0.614 + (local - 12) as f64],
        _ => {
            let th = PI * (3 - (local - 16)) as f64 / 4.0;
            [x + SEMI_R * th.cos(), TOP + SEMI_R * th.sin()]
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Pairing {
    Blue,
    Red,
}

/// End of an open piece: a bottom column of a ring.
type Label = (usize, i64);

struct Piece {
    segs: Vec<Segment>,
    /// Owned samples: (point index, segment, native parameter).
    owned: Vec<(usize, usize, f64)>,
    ends: [Option<Label>; 2],
}

/// Accumulates samples and open pieces, then links pieces sharing an end
/// label into components.
struct Assembly {
    points: Vec<[f64; 2]>,
    keys: HashMap<(usize, i64, usize), usize>,
    pieces: Vec<Piece>,
    warps: Vec<Option<PolarWarp>>,
    /// Copies per ring when the ring closes up, used to wrap indices.
    wrap: Option<i64>,
}

impl Assembly {
    fn new(warps: Vec<Option<PolarWarp>>, wrap: Option<i64>) -> Self {
        Assembly {
            points: Vec::new(),
            keys: HashMap::new(),
            pieces: Vec::new(),
            warps,
            wrap,
        }
    }

    fn copy_key(&self, m: i64) -> i64 {
        self.wrap.map_or(m, |k| m.rem_euclid(k))
    }

    fn column_key(&self, j: i64) -> i64 {
        self.wrap.map_or(j, |k| j.rem_euclid(2 * k))
    }

    fn to_world(&self, ring: usize, p: [f64; 2]) -> [f64; 2] {
        self.warps[ring].map_or(p, |w| w.apply(p))
    }

    fn add_sample(&mut self, ring: usize, m: i64, local: usize) {
        let key = (ring, self.copy_key(m), local);
        if !self.keys.contains_key(&key) {
            let p = self.to_world(ring, copy_sample(m, local));
            self.keys.insert(key, self.points.len());
            self.points.push(p);
        }
    }

    fn add_copy(&mut self, ring: usize, m: i64) {
        for l in 0..PER_COPY {
            self.add_sample(ring, m, l);
        }
    }

    /// Adds a piece given in flat strip coordinates of `ring`. It owns the
    /// registered samples of copies `copies` that lie on it.
    fn add_flat_piece(&mut self, ring: usize, segs: Vec<Segment>, ends: [Option<i64>; 2], copies: std::ops::RangeInclusive<i64>) {
        let mut owned = Vec::new();
        for m in copies {
            for l in 0..PER_COPY {
                let Some(&idx) = self.keys.get(&(ring, self.copy_key(m), l)) else { continue };
                let p = copy_sample(m, l);
                let hit = segs
                    .iter()
                    .enumerate()
                    .map(|(i, s)| {
                        let (t, d) = project_segment(s, p);
                        (i, t, d)
                    })
                    .min_by(|x, y| x.2.total_cmp(&y.2))
                    .unwrap();
                if hit.2 < ON_CURVE {
                    owned.push((idx, hit.0, hit.1));
                }
            }
        }
        let segs = match self.warps[ring] {
            None => segs,
            Some(warp) => segs
                .into_iter()
                .map(|s| Segment::Warped {
                    warp,
                    inner: Box::new(s),
                })
                .collect(),
        };
        let ends = ends.map(|e| e.map(|j| (ring, self.column_key(j))));
        self.pieces.push(Piece { segs, owned, ends });
    }

    /// Radial tie from ring 0's bottom column `j` to ring 1's, with evenly
    /// spaced interior samples.
    fn add_tie(&mut self, j: i64) {
        let x = COLUMN_OFFSET * j as f64;
        let (pa, pb) = (self.to_world(0, [x, BOTTOM]), self.to_world(1, [x, BOTTOM]));
        let mut owned = Vec::new();
        for l in 0..TIE_SAMPLES {
            let key = (2, self.column_key(j), l);
            let t = (l + 1) as f64 / (TIE_SAMPLES + 1) as f64;
            let idx = match self.keys.get(&key) {
                Some(&i) => i,
                None => {
                    self.keys.insert(key, self.points.len());
                    self.points.push(lerp(pa, pb, t));
                    self.points.len() - 1
                }
            };
            owned.push((idx, 0, t));
        }
        let j = self.column_key(j);
        self.pieces.push(Piece {
            segs: vec![Segment::line(pa, pb)],
            owned,
            ends: [Some((0, j)), Some((1, j))],
        });
    }

    /// Links pieces into components: open chains first, then cycles.
    fn finish(self) -> Result<(Vec<[f64; 2]>, CurveModel, Vec<Tag>)> {
        let mut at: HashMap<Label, Vec<(usize, usize)>> = HashMap::new();
        for (i, p) in self.pieces.iter().enumerate() {
            for (e, l) in p.ends.iter().enumerate() {
                if let Some(l) = l {
                    at.entry(*l).or_default().push((i, e));
                }
            }
        }
        if let Some((l, v)) = at.iter().find(|(_, v)| v.len() > 2) {
            return Err(Error::InvalidCurve(format!("{} pieces meet at end {l:?}", v.len())));
        }
        let partner = |piece: usize, end: usize| -> Option<(usize, usize)> {
            let l = self.pieces[piece].ends[end]?;
            at[&l].iter().copied().find(|&(p, e)| (p, e) != (piece, end))
        };
        let mut used = vec![false; self.pieces.len()];
        // Each chain is a list of (piece, forward).
        let mut chains: Vec<(Vec<(usize, bool)>, bool)> = Vec::new();
        let walk = |start: usize, forward: bool, used: &mut Vec<bool>| -> (Vec<(usize, bool)>, bool) {
            let mut chain = vec![(start, forward)];
            used[start] = true;
            let (mut cur, mut fwd) = (start, forward);
            loop {
                match partner(cur, if fwd { 1 } else { 0 }) {
                    Some((p, _)) if p == start => return (chain, true),
                    Some((p, e)) => {
                        used[p] = true;
                        cur = p;
                        fwd = e == 0;
                        chain.push((cur, fwd));
                    }
                    None => return (chain, false),
                }
            }
        };
        for i in 0..self.pieces.len() {
            if used[i] {
                continue;
            }
            if partner(i, 0).is_none() {
                chains.push(walk(i, true, &mut used));
            } else if partner(i, 1).is_none() {
                chains.push(walk(i, false, &mut used));
            }
        }
        for i in 0..self.pieces.len() {
            if !used[i] {
                chains.push(walk(i, true, &mut used));
            }
        }

        let mut components = Vec::with_capacity(chains.len());
        let mut tags: Vec<Option<Tag>> = vec![None; self.points.len()];
        for (ci, (chain, closed)) in chains.iter().enumerate() {
            let mut segs = Vec::new();
            let mut owned = Vec::new();
            for &(p, fwd) in chain {
                let piece = &self.pieces[p];
                let n = piece.segs.len();
                let base = segs.len();
                if fwd {
                    segs.extend(piece.segs.iter().cloned());
                    owned.extend(piece.owned.iter().map(|&(i, s, t)| (i, base + s, t)));
                } else {
                    segs.extend(reversed_chain(&piece.segs));
                    owned.extend(piece.owned.iter().map(|&(i, s, t)| (i, base + n - 1 - s, 1.0 - t)));
                }
            }
            let comp = Component::new(segs, *closed)?;
            let l = comp.length();
            for (i, s, t) in owned {
                let mut param = comp.param_of(s, t);
                if *closed {
                    param = param.rem_euclid(l);
                    if param >= l {
                        param = 0.0;
                    }
                }
                if tags[i].is_some() {
                    return Err(Error::InvalidSample(format!("sample {i} lies on two pieces")));
                }
                tags[i] = Some(Tag { component: ci, param });
            }
            components.push(comp);
        }
        let tags = tags
            .into_iter()
            .enumerate()
            .map(|(i, t)| t.ok_or_else(|| Error::InvalidSample(format!("sample {i} lies on no piece"))))
            .collect::<Result<Vec<_>>>()?;
        Ok((self.points, CurveModel::new(components)?, tags))
    }
}

/// The gadget constructions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Kind {
    /// Eight points `a, b, c, d` and their translates, on two short curves.
    Base,
    /// Sixteen points on two full columns.
    Extended,
    /// `k` copies side by side: blue and red pairings.
    Strip { k: usize },
    /// The strip bent into a ring of `k` copies: blue and red pairings.
    Annulus { k: usize },
    /// Two rings of `k` copies, concentric, with bottom columns tied radially.
    /// Variants: (blue, red), (red, blue), (blue, blue), (red, red).
    TiedAnnuli { k: usize },
}

impl Kind {
    pub fn variant_count(&self) -> usize {
        match self {
            Kind::Base | Kind::Extended => 1,
            Kind::Strip { .. } | Kind::Annulus { .. } => 2,
            Kind::TiedAnnuli { .. } => 4,
        }
    }

    fn copies(&self) -> usize {
        match *self {
            Kind::Base | Kind::Extended => 1,
            Kind::Strip { k } | Kind::Annulus { k } | Kind::TiedAnnuli { k } => k,
        }
    }
}

/// Ring warps of the annuli: ring 0 bent with its bottom side outward,
/// ring 1 scaled and bent the other way so its bottom side faces ring 0
/// across a gap of [`TIE_GAP`].
pub fn ring_warps(k: usize) -> [PolarWarp; 2] {
    let ra = PERIOD * k as f64 / (2.0 * PI);
    let depth = Y0 - BOTTOM;
    let scale = (ra + depth + TIE_GAP) / (ra - depth);
    [
        PolarWarp {
            radius: ra,
            y0: Y0,
            scale: 1.0,
            sign: -1.0,
        },
        PolarWarp {
            radius: scale * ra,
            y0: Y0,
            scale,
            sign: 1.0,
        },
    ]
}

/// A constructed gadget: one point set, several curves through it.
#[derive(Clone, Debug)]
pub struct Gadget {
    kind: Kind,
    points: Vec<[f64; 2]>,
    /// Samples moved after construction (index, new position).
    moved: Vec<(usize, [f64; 2])>,
    log: ConstructionLog,
}

/// One curve of a gadget with the shared points tagged along it.
#[derive(Clone, Debug)]
pub struct Variant {
    pub curve: CurveModel,
    pub sample: SampleSet,
}

impl Gadget {
    fn new(kind: Kind) -> Result<Self> {
        let column = Column::new()?;
        let mut log = column.log.clone();
        if let Kind::Annulus { k } | Kind::TiedAnnuli { k } = kind {
            let [wa, wb] = ring_warps(k);
            log.values.insert("copies".into(), k as f64);
            log.values.insert("ring_radius".into(), wa.radius);
            if matches!(kind, Kind::TiedAnnuli { .. }) {
                log.values.insert("outer_ring_radius".into(), wb.radius);
                log.values.insert("outer_ring_scale".into(), wb.scale);
                log.values.insert("tie_gap".into(), TIE_GAP);
            }
        }
        if let Kind::Strip { k } = kind {
            log.values.insert("copies".into(), k as f64);
        }
        if kind.copies() == 0 {
            return Err(Error::InvalidCurve("need at least one copy".into()));
        }
        let (points, _, _) = assemble(&column, kind, 0, None)?;
        Ok(Gadget {
            kind,
            points,
            moved: Vec::new(),
            log,
        })
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn variant_count(&self) -> usize {
        self.kind.variant_count()
    }

    pub fn construction_log(&self) -> &ConstructionLog {
        &self.log
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// The shared points, untagged.
    pub fn points(&self) -> SampleSet {
        SampleSet::from_xy(&self.positions(&self.points))
    }

    fn positions(&self, base: &[[f64; 2]]) -> Vec<[f64; 2]> {
        let mut pts = base.to_vec();
        for &(i, p) in &self.moved {
            pts[i] = p;
        }
        pts
    }

    /// The same gadget with sample `index` displaced by `delta`; the curves
    /// stay put.
    pub fn with_point_moved(&self, index: usize, delta: [f64; 2]) -> Result<Gadget> {
        let p = *self
            .points
            .get(index)
            .ok_or_else(|| Error::InvalidSample(format!("no sample {index}")))?;
        let mut g = self.clone();
        g.moved.push((index, [p[0] + delta[0], p[1] + delta[1]]));
        Ok(g)
    }

    /// Curve `v` (0-based) with the shared points tagged along it.
    pub fn variant(&self, v: usize) -> Result<Variant> {
        self.check_variant(v)?;
        let (points, curve, tags) = assemble(&Column::new()?, self.kind, v, None)?;
        let pts = self.positions(&points);
        let sample = SampleSet::with_tags(pts.iter().map(|p| Point::xy(p[0], p[1])).collect(), tags)?;
        Ok(Variant { curve, sample })
    }

    fn check_variant(&self, v: usize) -> Result<()> {
        if v >= self.variant_count() {
            return Err(Error::InvalidCurve(format!(
                "variant {} out of range 1..={}",
                v + 1,
                self.variant_count()
            )));
        }
        Ok(())
    }

    /// The part of variant `v` that verification looks at, and the points
    /// checked there. Rings are rotation-symmetric, so copy 0 checked
    /// inside a window of neighboring copies stands for all copies.
    fn verification_view(&self, v: usize) -> Result<(CurveModel, SampleSet, Region)> {
        self.check_variant(v)?;
        match self.kind {
            Kind::Annulus { k } | Kind::TiedAnnuli { k } if k as i64 > 2 * WINDOW + 1 => {
                let (points, curve, tags) = assemble(&Column::new()?, self.kind, v, Some(WINDOW))?;
                let sample = SampleSet::with_tags(points.iter().map(|p| Point::xy(p[0], p[1])).collect(), tags)?;
                Ok((curve, sample, Region::Angular { radius: ring_warps(k)[0].radius }))
            }
            _ => {
                let var = self.variant(v)?;
                let region = match self.kind {
                    Kind::Strip { k } => {
                        let (lo, hi) = if k >= 5 { (2, k as i64 - 2) } else { ((k / 2) as i64, (k / 2) as i64 + 1) };
                        Region::Flat {
                            lo: PERIOD * lo as f64 + CX,
                            hi: PERIOD * hi as f64 + CX,
                        }
                    }
                    _ => Region::All,
                };
                Ok((var.curve, var.sample, region))
            }
        }
    }
}

/// Curve points a verification checks.
#[derive(Clone, Copy, Debug)]
enum Region {
    All,
    /// Flat strip, `lo <= x < hi`.
    Flat { lo: f64, hi: f64 },
    /// The angular sector of copy 0 on rings of the given radius.
    Angular { radius: f64 },
}

impl Region {
    fn contains(&self, p: [f64; 2]) -> bool {
        match *self {
            Region::All => true,
            Region::Flat { lo, hi } => (lo..hi).contains(&p[0]),
            Region::Angular { radius } => {
                let x = p[0].atan2(p[1]) * radius;
                (CX..PERIOD + CX).contains(&x)
            }
        }
    }
}

/// Builds points and curve `v` of a gadget. With `window = Some(w)`, only
/// copies `-w..=w` of each ring are built, unwrapped.
fn assemble(col: &Column, kind: Kind, v: usize, window: Option<i64>) -> Result<(Vec<[f64; 2]>, CurveModel, Vec<Tag>)> {
    let full = col.full();
    let mfull = col.mirrored_full();
    let semi = |m: i64| semicircle(m);
    let blue = |m: i64| -> Vec<Segment> {
        let x = PERIOD * m as f64;
        let mut s = shifted(&full, x);
        s.push(semi(m));
        s.extend(reversed_chain(&shifted(&full, x + COLUMN_OFFSET)));
        s
    };
    let red = |m: i64| -> Vec<Segment> {
        let x = PERIOD * m as f64;
        let mut s = shifted(&mfull, x - COLUMN_OFFSET);
        s.push(semi(m));
        s.extend(reversed_chain(&shifted(&mfull, x)));
        s
    };
    let add_arch = |asm: &mut Assembly, ring: usize, pairing: Pairing, m: i64, range: std::ops::RangeInclusive<i64>| {
        let (segs, ends) = match pairing {
            Pairing::Blue => (blue(m), [Some(2 * m), Some(2 * m + 1)]),
            Pairing::Red => (red(m), [Some(2 * m - 1), Some(2 * m)]),
        };
        let lo = (m - 1).max(*range.start());
        let hi = (m + 1).min(*range.end());
        asm.add_flat_piece(ring, segs, ends, lo..=hi);
    };
    match kind {
        Kind::Base | Kind::Extended => {
            let mut asm = Assembly::new(vec![None], None);
            let (locals, c): (&[usize], Vec<Segment>) = if kind == Kind::Base {
                (&[2, 3, 8, 9, 6, 7, 12, 13], vec![col.lower[4].clone(), col.upper[0].clone()])
            } else {
                (&[0, 1, 2, 3, 8, 9, 10, 11, 4, 5, 6, 7, 12, 13, 14, 15], full.clone())
            };
            for &l in locals {
                asm.add_sample(0, 0, l);
            }
            asm.add_flat_piece(0, shifted(&c, 0.0), [None, None], 0..=0);
            asm.add_flat_piece(0, shifted(&c, COLUMN_OFFSET), [None, None], 0..=0);
            asm.finish()
        }
        Kind::Strip { k } => {
            let k = k as i64;
            let mut asm = Assembly::new(vec![None], None);
            for m in 0..k {
                asm.add_copy(0, m);
            }
            let range = 0..=k - 1;
            if v == 0 {
                for m in 0..k {
                    add_arch(&mut asm, 0, Pairing::Blue, m, range.clone());
                }
            } else {
                // Open red ends: half columns ending at q.
                let mut left: Vec<Segment> = col.upper.iter().map(mirrored).collect();
                left = shifted(&left, -COLUMN_OFFSET);
                left.push(semi(0));
                left.extend(reversed_chain(&mfull));
                asm.add_flat_piece(0, left, [None, Some(0)], 0..=0);
                for m in 1..k {
                    add_arch(&mut asm, 0, Pairing::Red, m, range.clone());
                }
                let right: Vec<Segment> = col.lower.iter().map(mirrored).collect();
                asm.add_flat_piece(0, shifted(&right, PERIOD * k as f64 - COLUMN_OFFSET), [Some(2 * k - 1), None], k - 1..=k - 1);
            }
            asm.finish()
        }
        Kind::Annulus { k } | Kind::TiedAnnuli { k } => {
            let tied = matches!(kind, Kind::TiedAnnuli { .. });
            let warps = ring_warps(k);
            let k = k as i64;
            let (wrap, range) = match window {
                Some(w) => (None, -w..=w),
                None => (Some(k), 0..=k - 1),
            };
            let rings: Vec<Pairing> = if tied {
                match v {
                    0 => vec![Pairing::Blue, Pairing::Red],
                    1 => vec![Pairing::Red, Pairing::Blue],
                    2 => vec![Pairing::Blue, Pairing::Blue],
                    _ => vec![Pairing::Red, Pairing::Red],
                }
            } else {
                vec![if v == 0 { Pairing::Blue } else { Pairing::Red }]
            };
            let mut asm = Assembly::new(warps[..rings.len()].iter().map(|w| Some(*w)).collect(), wrap);
            for ring in 0..rings.len() {
                for m in range.clone() {
                    asm.add_copy(ring, m);
                }
            }
            // Arches register no points, so every variant lists the same
            // points in the same order: ring copies, then ties.
            if tied {
                let (jlo, jhi) = (2 * range.start(), 2 * range.end() + 1);
                for j in jlo..=jhi {
                    asm.add_tie(j);
                }
            }
            for (ring, &pairing) in rings.iter().enumerate() {
                // A window also takes the arches just outside it, which own
                // its edge columns.
                let arches = if wrap.is_some() { range.clone() } else { range.start() - 1..=range.end() + 1 };
                for m in arches {
                    let r = if wrap.is_some() { m - 1..=m + 1 } else { range.clone() };
                    add_arch(&mut asm, ring, pairing, m, r);
                }
            }
            asm.finish()
        }
    }
}

pub fn base_gadget() -> Result<Gadget> {
    Gadget::new(Kind::Base)
}

/// Adds `e, f` above `d` and two points below `a` to each column, extending
/// both curves by tangent arcs to vertical end tangents.
pub fn extend_gadget(g: &Gadget) -> Result<Gadget> {
    if g.kind != Kind::Base {
        return Err(Error::InvalidCurve("only a base gadget can be extended".into()));
    }
    Gadget::new(Kind::Extended)
}

pub fn strip(k: usize) -> Result<Gadget> {
    Gadget::new(Kind::Strip { k })
}

/// The strip of `k` copies bent into a ring. Fails when the ring does not
/// verify as a 0.72-sample, reporting the measured value.
pub fn annulus(k: usize) -> Result<Gadget> {
    let g = Gadget::new(Kind::Annulus { k })?;
    let rep = verify_gadget(&g, EPS, 1e-3)?;
    if !rep.passed() {
        return Err(Error::Infeasible(format!(
            "ring of {k} copies reaches eps* {:.6} (min margin {:.3e}); smallest workable k found: {K_STAR}",
            rep.max_eps_star(),
            rep.min_margin()
        )));
    }
    Ok(g)
}

/// Two concentric rings of `k` copies with tied bottom columns: one point
/// set, four curves. Variants 1 and 2 are connected.
pub fn tied_annuli(k: usize) -> Result<Gadget> {
    Gadget::new(Kind::TiedAnnuli { k })
}

/// Variant `variant` (1-based) of the tied annuli at [`K_STAR`] copies.
pub fn tied_annuli_variant(variant: usize) -> Result<(SampleSet, CurveModel)> {
    if !(1..=4).contains(&variant) {
        return Err(Error::InvalidCurve(format!("variant {variant} out of range 1..=4")));
    }
    let v = tied_annuli(K_STAR)?.variant(variant - 1)?;
    Ok((v.sample, v.curve))
}

/// One copy of the blue strip curve closed by a semicircle below: a closed
/// C¹ curve with the column geometry, for sampling experiments.
pub fn gadget_loop() -> Result<CurveModel> {
    let col = Column::new()?;
    let full = col.full();
    let mut segs = full.clone();
    segs.push(semicircle(0));
    segs.extend(reversed_chain(&shifted(&full, COLUMN_OFFSET)));
    segs.push(Segment::arc([COLUMN_OFFSET / 2.0, BOTTOM], COLUMN_OFFSET / 2.0, 0.0, -PI));
    CurveModel::new(vec![Component::new(segs, true)?])
}

/// Clearance of one midpoint between consecutive samples.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MidpointMargin {
    pub point: [f64; 2],
    pub pair: (usize, usize),
    /// Distance to the nearest sample.
    pub d_t: f64,
    /// Distance to the approximate medial axis.
    pub medial_distance: f64,
    /// `medial_distance - d_t / eps`: positive when the ball misses the medial axis.
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VariantReport {
    pub variant: usize,
    pub components: usize,
    pub margins: Vec<MidpointMargin>,
    pub min_margin: f64,
    pub eps_star: SamplingReport,
    /// Smallest `lfs(p) - d(p, S) / eps` over all checked points.
    pub clearance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub eps: f64,
    pub density: f64,
    pub variants: Vec<VariantReport>,
}

impl VerifyReport {
    pub fn min_margin(&self) -> f64 {
        self.variants.iter().map(|v| v.min_margin).fold(f64::INFINITY, f64::min)
    }

    pub fn max_eps_star(&self) -> f64 {
        self.variants.iter().map(|v| v.eps_star.eps_star).fold(0.0, f64::max)
    }

    pub fn min_clearance(&self) -> f64 {
        self.variants.iter().map(|v| v.clearance).fold(f64::INFINITY, f64::min)
    }

    /// All margins positive and the dense check within `eps`.
    pub fn passed(&self) -> bool {
        self.min_margin() > 0.0 && self.max_eps_star() <= self.eps
    }
}

/// Checks every curve of a gadget: for each midpoint `t` between consecutive
/// samples, the ball of radius `d_t / eps` must miss the medial axis, and the
/// dense grid at step `density` must have `d(p, S) / lfs(p) <= eps`.
pub fn verify_gadget(g: &Gadget, eps: f64, density: f64) -> Result<VerifyReport> {
    let mut variants = Vec::new();
    for v in 0..g.variant_count() {
        variants.push(verify_variant(g, v, eps, density)?);
    }
    Ok(VerifyReport { eps, density, variants })
}

pub fn verify_variant(g: &Gadget, v: usize, eps: f64, density: f64) -> Result<VariantReport> {
    let (curve, mut sample, region) = g.verification_view(v)?;
    if !matches!(region, Region::Angular { .. }) && !g.moved.is_empty() {
        let pts = g.positions(&sample.points().iter().map(|p| [p[0], p[1]]).collect::<Vec<_>>());
        sample = SampleSet::with_tags(
            pts.iter().map(|p| Point::xy(p[0], p[1])).collect(),
            sample.tags().unwrap().to_vec(),
        )?;
    }
    let field = LfsField::numeric(&curve, density)?;
    let keep = |p: [f64; 2], _c: usize| region.contains(p);
    let mids = consecutive_midpoints(&curve, &sample)?;
    let index = crate::kdtree::SpatialIndex::new(&sample.xy()?);
    let mut margins = Vec::new();
    for m in mids.iter().filter(|m| region.contains(m.point)) {
        let d_t = index.nearest(&m.point).unwrap().1.sqrt();
        let medial_distance = field.lfs(m.point);
        margins.push(MidpointMargin {
            point: m.point,
            pair: m.pair,
            d_t,
            medial_distance,
            margin: medial_distance - d_t / eps,
        });
    }
    let min_margin = margins.iter().map(|m| m.margin).fold(f64::INFINITY, f64::min);
    let validator = Validator::in_region(&curve, field, density, keep)?;
    let eps_star = validator.epsilon_star(&sample)?;
    let clearance = validator.clearance(&sample, eps, keep)?;
    let components = match g.kind {
        Kind::Annulus { .. } | Kind::TiedAnnuli { .. } if matches!(region, Region::Angular { .. }) => {
            component_count(g.kind, v)
        }
        _ => curve.components().len(),
    };
    Ok(VariantReport {
        variant: v + 1,
        components,
        margins,
        min_margin,
        eps_star,
        clearance,
    })
}

/// Components of a ring variant, counted from the pairings alone.
fn component_count(kind: Kind, v: usize) -> usize {
    match kind {
        Kind::Annulus { k } => k,
        Kind::TiedAnnuli { k } => {
            if v < 2 {
                1
            } else {
                k
            }
        }
        _ => 1,
    }
}

/// Doubling search for the number of ring copies: starting at `start`, the
/// first `k` for which every tied-annuli variant verifies at `eps`.
/// Returns `k` and the measured worst eps* per tried `k`.
pub fn find_k_star(start: usize, max: usize, eps: f64, density: f64) -> Result<(usize, Vec<(usize, f64)>)> {
    let mut tried = Vec::new();
    let mut k = start.max(2 * WINDOW as usize + 2);
    while k <= max {
        let rep = verify_gadget(&tied_annuli(k)?, eps, density)?;
        tried.push((k, rep.max_eps_star()));
        if rep.passed() {
            return Ok((k, tried));
        }
        k *= 2;
    }
    Err(Error::Infeasible(format!("no workable copy count up to {max}: {tried:?}")))
}

/// Revolves planar points about the axis `x = -offset`: each `(x, y)` becomes
/// `m` points `((x + offset) cos t, (x + offset) sin t, y)`, `t = 2 pi j / m`.
pub fn revolve(points: &SampleSet, m: usize, offset: f64) -> Result<SampleSet> {
    if m < 3 {
        return Err(Error::TooFewPoints { needed: 3, got: m });
    }
    let xy = points.xy()?;
    if let Some(p) = xy.iter().find(|p| !(p[0] + offset > 0.0)) {
        return Err(Error::InvalidSample(format!("revolved radius {} is not positive", p[0] + offset)));
    }
    let mut out = Vec::with_capacity(xy.len() * m);
    for p in &xy {
        let r = p[0] + offset;
        for j in 0..m {
            let (s, c) = (2.0 * PI * j as f64 / m as f64).sin_cos();
            out.push(Point::new(vec![r * c, r * s, p[1]])?);
        }
    }
    SampleSet::new(out)
}

/// The sufficient spacing bound for a revolved set:
/// `2 (x_max + offset) sin(pi / m) < eps * clearance`, where clearance is
/// the planar slack from [`VerifyReport::min_clearance`]. Returns the two
/// sides of the inequality.
pub fn revolve_spacing_bound(points: &SampleSet, m: usize, offset: f64, eps: f64, clearance: f64) -> Result<(f64, f64)> {
    let x_max = points.xy()?.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
    Ok((2.0 * (x_max + offset) * (PI / m as f64).sin(), eps * clearance))
}

/// Recorded revolution fixture: the base gadget revolved `m` times about an
/// axis `offset` to the left of the origin.
pub const REVOLVE_M: usize = 131_072;
pub const REVOLVE_OFFSET: f64 = 2.0;
