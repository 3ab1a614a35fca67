//! Checks of the local-geometry lemmas on a tagged planar sample, shared by
//! the property tests and the acceptance run.

#![allow(dead_code)]

use curve_recon::curve::CurveModel;
use curve_recon::delaunay::triangulate;
use curve_recon::geom::{angle_deg, is_compatible, xab_radius};
use curve_recon::kdtree::SpatialIndex;
use curve_recon::recon::ReconGraph;
use curve_recon::sampling::{consecutive_midpoints, ground_truth_graph, SampleSet};
use curve_recon::{CompatParams, Point};

/// Checked cases and violations for one property.
#[derive(Clone, Debug, Default)]
pub struct Tally {
    pub checked: usize,
    pub violations: usize,
    /// Smallest observed slack (angle minus bound, distance margin, ...).
    pub worst: f64,
    pub example: Option<String>,
}

impl Tally {
    fn new() -> Self {
        Tally {
            worst: f64::INFINITY,
            ..Default::default()
        }
    }

    fn record(&mut self, slack: f64, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        self.worst = self.worst.min(slack);
        if !ok {
            self.violations += 1;
            if self.example.is_none() {
                self.example = Some(what());
            }
        }
    }

    pub fn merge(&mut self, o: &Tally) {
        self.checked += o.checked;
        self.violations += o.violations;
        self.worst = self.worst.min(o.worst);
        if self.example.is_none() {
            self.example = o.example.clone();
        }
    }
}

#[derive(Clone, Debug)]
pub struct LemmaReport {
    pub dichotomy: Tally,
    pub closest: Tally,
    pub triples: Tally,
    pub angle141: Tally,
    pub angle117: Tally,
    pub delaunay: Tally,
    pub u_ab: Tally,
}

impl Default for LemmaReport {
    fn default() -> Self {
        LemmaReport {
            dichotomy: Tally::new(),
            closest: Tally::new(),
            triples: Tally::new(),
            angle141: Tally::new(),
            angle117: Tally::new(),
            delaunay: Tally::new(),
            u_ab: Tally::new(),
        }
    }
}

impl LemmaReport {
    pub fn all(&self) -> [(&'static str, &Tally); 7] {
        [
            ("nearest-sample dichotomy", &self.dichotomy),
            ("closest neighbor is consecutive", &self.closest),
            ("consecutive triples compatible", &self.triples),
            ("angle pbq > 141 deg", &self.angle141),
            ("angle pbc > 117.3 deg", &self.angle117),
            ("Delaunay contains ground truth", &self.delaunay),
            ("arc (a,b) inside U(a,b)", &self.u_ab),
        ]
    }

    pub fn violations(&self) -> usize {
        self.all().iter().map(|(_, t)| t.violations).sum()
    }

    pub fn merge(&mut self, o: &LemmaReport) {
        self.dichotomy.merge(&o.dichotomy);
        self.closest.merge(&o.closest);
        self.triples.merge(&o.triples);
        self.angle141.merge(&o.angle141);
        self.angle117.merge(&o.angle117);
        self.delaunay.merge(&o.delaunay);
        self.u_ab.merge(&o.u_ab);
    }
}

fn d(p: [f64; 2], q: [f64; 2]) -> f64 {
    (p[0] - q[0]).hypot(p[1] - q[1])
}

fn pt(p: [f64; 2]) -> Point {
    Point::xy(p[0], p[1])
}

fn angle(p: [f64; 2], b: [f64; 2], q: [f64; 2]) -> f64 {
    angle_deg(&pt(p), &pt(b), &pt(q)).unwrap()
}

/// The two points of X(a, b) in the plane.
fn x_ab(a: [f64; 2], b: [f64; 2], params: &CompatParams) -> [[f64; 2]; 2] {
    let r = xab_radius(&pt(a), &pt(b), params).unwrap();
    let half = 0.5 * d(a, b);
    let h = (r * r - half * half).max(0.0).sqrt();
    let m = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
    let n = [-(b[1] - a[1]) / (2.0 * half), (b[0] - a[0]) / (2.0 * half)];
    [[m[0] + h * n[0], m[1] + h * n[1]], [m[0] - h * n[0], m[1] - h * n[1]]]
}

/// Dense curve points strictly inside the arc from sample `i` to sample `j`.
struct Arc {
    i: usize,
    j: usize,
    dense: Vec<[f64; 2]>,
}

/// Runs every lemma check on a tagged planar sample of `curve`, using dense
/// curve points spaced `step` apart.
pub fn check_lemmas(curve: &CurveModel, sample: &SampleSet, params: &CompatParams, step: f64) -> LemmaReport {
    let mut rep = LemmaReport::default();
    let xy = sample.xy().unwrap();
    let tags = sample.tags().expect("tagged sample");
    let gt: ReconGraph = ground_truth_graph(curve, sample).unwrap();
    let index = SpatialIndex::new(&xy);
    let dense = curve.discretize(step);

    // Arcs between consecutive samples, with their dense interiors.
    let mut arcs = Vec::new();
    for (c, comp) in curve.components().iter().enumerate() {
        let l = comp.length();
        let mut idx: Vec<usize> = (0..xy.len()).filter(|&i| tags[i].component == c).collect();
        idx.sort_by(|&a, &b| tags[a].param.total_cmp(&tags[b].param));
        let (lo, hi) = (dense.offsets[c], dense.offsets[c + 1]);
        for k in 0..idx.len() {
            let (i, j) = (idx[k], idx[(k + 1) % idx.len()]);
            let (sa, mut sb) = (tags[i].param, tags[j].param);
            if sb <= sa {
                sb += l;
            }
            let tol = 1e-9 * l;
            let inside = |s: f64| (s > sa + tol && s < sb - tol) || (s + l > sa + tol && s + l < sb - tol);
            let pts = (lo..hi).filter(|&q| inside(dense.param[q])).map(|q| dense.points[q]).collect();
            arcs.push(Arc { i, j, dense: pts });
        }
    }

    for arc in &arcs {
        let (a, b) = (xy[arc.i], xy[arc.j]);
        let xs = x_ab(a, b, params);
        for &p in &arc.dense {
            let near = index.nearest(&p).unwrap().1.sqrt();
            let own = d(p, a).min(d(p, b));
            rep.dichotomy.record(near - own, near >= own - 1e-12 * own.max(1.0), || {
                format!("dense point {p:?} on ({}, {}) is nearer another sample", arc.i, arc.j)
            });
            let inside = xs.iter().map(|x| d(*x, a) - d(*x, p)).fold(f64::NEG_INFINITY, f64::max);
            rep.u_ab.record(inside, inside > 0.0, || format!("{p:?} outside U({}, {})", arc.i, arc.j));
        }
    }

    for x in 0..xy.len() {
        let (c, _) = index.nearest_filtered(&xy[x], |i| i == x).unwrap();
        rep.closest.record(0.0, gt.contains(x, c), || format!("closest of {x} is {c}, not consecutive"));
    }

    // Neighbors per vertex in the ground truth.
    let mut nbrs = vec![Vec::new(); xy.len()];
    for &(i, j) in gt.edges() {
        nbrs[i].push(j);
        nbrs[j].push(i);
    }
    for b in 0..xy.len() {
        if let [a, c] = nbrs[b][..] {
            let ok = is_compatible(&pt(xy[a]), &pt(xy[b]), &pt(xy[c]), params).unwrap();
            rep.triples.record(0.0, ok, || format!("({a}, {b}, {c}) not compatible"));
        }
    }

    let mids = consecutive_midpoints(curve, sample).unwrap();
    let arc_of = |i: usize, j: usize| arcs.iter().find(|r| (r.i, r.j) == (i, j) || (r.i, r.j) == (j, i)).unwrap();
    let dense_index = SpatialIndex::new(&dense.points);
    for m in &mids {
        let (i, j) = m.pair;
        let p = m.point;
        // Both orientations: vertex j continuing past it, vertex i likewise.
        for (a, b) in [(i, j), (j, i)] {
            let pb = d(p, xy[b]);
            // The next sample after b, away from a.
            let Some(&c) = nbrs[b].iter().find(|&&v| v != a) else { continue };
            let next = arc_of(b, c);
            for q in next.dense.iter().copied().chain(std::iter::once(xy[c])) {
                if d(q, xy[b]) <= pb {
                    let ang = angle(p, xy[b], q);
                    rep.angle141.record(ang - 141.0, ang > 141.0, || {
                        format!("angle at {b} between midpoint of ({a}, {b}) and {q:?} is {ang:.3}")
                    });
                }
            }
            // Curve points off [a, b] within d(a, b) of b.
            let ab = d(xy[a], xy[b]);
            let own = arc_of(a, b);
            for k in dense_index.within(&xy[b], ab) {
                let c = dense.points[k];
                if own.dense.contains(&c) || c == xy[a] || d(c, xy[b]) < 1e-12 {
                    continue;
                }
                // Dense points coinciding with samples a or b are on [a, b].
                let ang = angle(p, xy[b], c);
                rep.angle117.record(ang - 117.3, ang > 117.3, || {
                    format!("angle at {b} between midpoint of ({a}, {b}) and {c:?} is {ang:.3}")
                });
            }
        }
    }

    if let Ok(tri) = triangulate(&xy) {
        for &(i, j) in gt.edges() {
            rep.delaunay.record(0.0, tri.has_edge(i, j), || format!("edge ({i}, {j}) missing from Delaunay"));
        }
    }
    rep
}
