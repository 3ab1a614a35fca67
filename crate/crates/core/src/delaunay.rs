//! Incremental Bowyer-Watson Delaunay triangulation in the plane.
//!
//! Points go in along a Hilbert curve; each insertion walks from the last new
//! triangle to one whose circumcircle strictly contains the point, grows the
//! cavity of all such triangles and fans it from the new point. The hull is
//! closed off with ghost triangles sharing a vertex at infinity. A point that
//! is only cocircular with a triangle leaves it in place, so degenerate inputs
//! get a fixed triangulation determined by insertion order.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::predicates::{incircle_raw, orient2d};

#[derive(Clone, Debug)]
pub struct Triangulation2D {
    points: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
    neighbors: Vec<[Option<usize>; 3]>,
    edges: Vec<(usize, usize)>,
}

impl Triangulation2D {
    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    /// Counterclockwise index triples.
    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    /// `neighbors()[t][i]` is the triangle across the edge opposite vertex `i`
    /// of triangle `t`, or `None` on the convex hull.
    pub fn neighbors(&self) -> &[[Option<usize>; 3]] {
        &self.neighbors
    }

    /// Sorted `(i, j)` pairs with `i < j`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        let e = if i < j { (i, j) } else { (j, i) };
        self.edges.binary_search(&e).is_ok()
    }

    /// Compressed adjacency: neighbors of `v` are `adj[off[v]..off[v + 1]]`, ascending.
    pub fn adjacency(&self) -> (Vec<usize>, Vec<usize>) {
        let n = self.points.len();
        let mut deg = vec![0usize; n + 1];
        for &(i, j) in &self.edges {
            deg[i] += 1;
            deg[j] += 1;
        }
        let mut off = vec![0usize; n + 1];
        for v in 0..n {
            off[v + 1] = off[v] + deg[v];
        }
        let mut fill = off.clone();
        let mut adj = vec![0usize; off[n]];
        for &(i, j) in &self.edges {
            adj[fill[i]] = j;
            fill[i] += 1;
            adj[fill[j]] = i;
            fill[j] += 1;
        }
        for v in 0..n {
            adj[off[v]..off[v + 1]].sort_unstable();
        }
        (off, adj)
    }

    pub fn circumcenter(&self, t: usize) -> [f64; 2] {
        let [a, b, c] = self.triangles[t].map(|i| self.points[i]);
        circumcenter(a, b, c)
    }
}

pub(crate) fn circumcenter(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> [f64; 2] {
    let (bx, by) = (b[0] - a[0], b[1] - a[1]);
    let (cx, cy) = (c[0] - a[0], c[1] - a[1]);
    let d = 2.0 * (bx * cy - by * cx);
    let b2 = bx * bx + by * by;
    let c2 = cx * cx + cy * cy;
    [a[0] + (cy * b2 - by * c2) / d, a[1] + (bx * c2 - cx * b2) / d]
}

fn check_input(points: &[[f64; 2]]) -> Result<()> {
    if points.len() < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            got: points.len(),
        });
    }
    if points.iter().any(|p| !p[0].is_finite() || !p[1].is_finite()) {
        return Err(Error::NonFinite);
    }
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| {
        points[i][0]
            .total_cmp(&points[j][0])
            .then(points[i][1].total_cmp(&points[j][1]))
            .then(i.cmp(&j))
    });
    let mut dup: Option<(usize, usize)> = None;
    for w in order.windows(2) {
        if points[w[0]] == points[w[1]] {
            let pair = (w[0].min(w[1]), w[0].max(w[1]));
            dup = Some(dup.map_or(pair, |d| d.min(pair)));
        }
    }
    if let Some((i, j)) = dup {
        return Err(Error::DuplicatePoints(i, j));
    }
    let a = points[0];
    let b = points[1];
    if points.iter().all(|&p| orient2d(a, b, p) == 0) {
        return Err(Error::DegeneratePointSet);
    }
    Ok(())
}

fn hilbert_index(mut x: u32, mut y: u32, order: u32) -> u64 {
    let n = 1u32 << order;
    let mut d: u64 = 0;
    let mut s = n >> 1;
    while s > 0 {
        let rx = u32::from(x & s > 0);
        let ry = u32::from(y & s > 0);
        d += u64::from(s) * u64::from(s) * u64::from((3 * rx) ^ ry);
        if ry == 0 {
            if rx == 1 {
                x = n - 1 - x;
                y = n - 1 - y;
            }
            std::mem::swap(&mut x, &mut y);
        }
        s >>= 1;
    }
    d
}

fn hilbert_order(points: &[[f64; 2]]) -> Vec<usize> {
    const ORDER: u32 = 16;
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in points {
        x0 = x0.min(p[0]);
        y0 = y0.min(p[1]);
        x1 = x1.max(p[0]);
        y1 = y1.max(p[1]);
    }
    let span = (x1 - x0).max(y1 - y0).max(f64::MIN_POSITIVE);
    let scale = ((1u32 << ORDER) - 1) as f64 / span;
    let mut keyed: Vec<(u64, usize)> = points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let hx = ((p[0] - x0) * scale) as u32;
            let hy = ((p[1] - y0) * scale) as u32;
            (hilbert_index(hx, hy, ORDER), i)
        })
        .collect();
    // Biased randomized rounds: shuffle, split into doubling rounds, then
    // Hilbert-sort inside each round. Pure Hilbert order on points lying on
    // curves builds long skinny triangles whose cavities grow large.
    let mut rng: u64 = 0x2545_F491_4F6C_DD1D;
    for i in (1..keyed.len()).rev() {
        rng ^= rng << 13;
        rng ^= rng >> 7;
        rng ^= rng << 17;
        keyed.swap(i, (rng % (i as u64 + 1)) as usize);
    }
    let mut out = Vec::with_capacity(keyed.len());
    let mut lo = 0;
    let mut size = 64usize.min(keyed.len());
    while lo < keyed.len() {
        let hi = (lo + size).min(keyed.len());
        keyed[lo..hi].sort_unstable();
        out.extend(keyed[lo..hi].iter().map(|&(_, i)| i));
        lo = hi;
        size = (size * 2).max(1);
        if keyed.len() - hi < size {
            size = keyed.len() - hi;
        }
    }
    out
}

const NONE: usize = usize::MAX;

struct Builder<'a> {
    pts: &'a [[f64; 2]],
    inf: usize,
    tv: Vec<[usize; 3]>,
    tn: Vec<[usize; 3]>,
    alive: Vec<bool>,
    free: Vec<usize>,
    in_stamp: Vec<u32>,
    out_stamp: Vec<u32>,
    stamp: u32,
    last: usize,
    rng: u64,
}

struct BoundaryEdge {
    u: usize,
    w: usize,
    outside: usize,
    slot: usize,
}

impl<'a> Builder<'a> {
    fn new(pts: &'a [[f64; 2]]) -> Self {
        let cap = 2 * pts.len() + 8;
        Builder {
            pts,
            inf: pts.len(),
            tv: Vec::with_capacity(cap),
            tn: Vec::with_capacity(cap),
            alive: Vec::with_capacity(cap),
            free: Vec::new(),
            in_stamp: Vec::with_capacity(cap),
            out_stamp: Vec::with_capacity(cap),
            stamp: 0,
            last: 0,
            rng: 0x9E37_79B9_7F4A_7C15,
        }
    }

    fn next_rand(&mut self) -> usize {
        self.rng ^= self.rng << 13;
        self.rng ^= self.rng >> 7;
        self.rng ^= self.rng << 17;
        self.rng as usize
    }

    fn alloc(&mut self, v: [usize; 3], n: [usize; 3]) -> usize {
        if let Some(t) = self.free.pop() {
            self.tv[t] = v;
            self.tn[t] = n;
            self.alive[t] = true;
            t
        } else {
            self.tv.push(v);
            self.tn.push(n);
            self.alive.push(true);
            self.in_stamp.push(0);
            self.out_stamp.push(0);
            self.tv.len() - 1
        }
    }

    fn is_ghost(&self, t: usize) -> bool {
        self.tv[t][2] == self.inf
    }

    fn strictly_between(&self, a: usize, b: usize, p: [f64; 2]) -> bool {
        let (pa, pb) = (self.pts[a], self.pts[b]);
        let k = if pa[0] != pb[0] { 0 } else { 1 };
        let (lo, hi) = if pa[k] < pb[k] { (pa[k], pb[k]) } else { (pb[k], pa[k]) };
        lo < p[k] && p[k] < hi
    }

    fn in_circle(&self, t: usize, p: [f64; 2]) -> bool {
        let [a, b, c] = self.tv[t];
        if c == self.inf {
            match orient2d(self.pts[a], self.pts[b], p) {
                1 => true,
                0 => self.strictly_between(a, b, p),
                _ => false,
            }
        } else {
            incircle_raw(self.pts[a], self.pts[b], self.pts[c], p) > 0
        }
    }

    fn init(&mut self, a: usize, b: usize, c: usize) {
        let (b, c) = if orient2d(self.pts[a], self.pts[b], self.pts[c]) > 0 { (b, c) } else { (c, b) };
        let inf = self.inf;
        let tris = [[a, b, c], [c, b, inf], [a, c, inf], [b, a, inf]];
        for v in tris {
            self.alloc(v, [NONE; 3]);
        }
        for t in 0..4 {
            for i in 0..3 {
                let (u, w) = (self.tv[t][(i + 1) % 3], self.tv[t][(i + 2) % 3]);
                for s in 0..4 {
                    if s == t {
                        continue;
                    }
                    let sv = self.tv[s];
                    for j in 0..3 {
                        if sv[(j + 1) % 3] == w && sv[(j + 2) % 3] == u {
                            self.tn[t][i] = s;
                        }
                    }
                }
            }
        }
        self.last = 0;
    }

    fn locate(&mut self, p: [f64; 2]) -> usize {
        let mut t = self.last;
        if !self.alive[t] || self.is_ghost(t) {
            t = (0..self.tv.len()).find(|&s| self.alive[s] && !self.is_ghost(s)).unwrap();
        }
        let limit = 4 * self.tv.len() + 16;
        for _ in 0..limit {
            let v = self.tv[t];
            let start = self.next_rand() % 3;
            let mut moved = false;
            for r in 0..3 {
                let i = (start + r) % 3;
                let (a, b) = (v[(i + 1) % 3], v[(i + 2) % 3]);
                if orient2d(self.pts[a], self.pts[b], p) < 0 {
                    t = self.tn[t][i];
                    moved = true;
                    break;
                }
            }
            if !moved || self.is_ghost(t) {
                return t;
            }
        }
        (0..self.tv.len())
            .find(|&s| self.alive[s] && self.in_circle(s, p))
            .expect("some triangle's circumcircle contains every new point")
    }

    fn insert(&mut self, pi: usize, scratch: &mut Vec<usize>, boundary: &mut Vec<BoundaryEdge>, maps: &mut [HashMap<usize, usize>; 2]) {
        let p = self.pts[pi];
        let seed = self.locate(p);
        self.stamp += 1;
        let stamp = self.stamp;
        scratch.clear();
        boundary.clear();
        let mut stack = vec![seed];
        self.in_stamp[seed] = stamp;
        while let Some(t) = stack.pop() {
            scratch.push(t);
            for i in 0..3 {
                let nb = self.tn[t][i];
                if self.in_stamp[nb] == stamp {
                    continue;
                }
                if self.out_stamp[nb] != stamp && self.in_circle(nb, p) {
                    self.in_stamp[nb] = stamp;
                    stack.push(nb);
                    continue;
                }
                self.out_stamp[nb] = stamp;
                let slot = (0..3).find(|&j| self.tn[nb][j] == t).unwrap();
                boundary.push(BoundaryEdge {
                    u: self.tv[t][(i + 1) % 3],
                    w: self.tv[t][(i + 2) % 3],
                    outside: nb,
                    slot,
                });
            }
        }
        for &t in scratch.iter() {
            self.alive[t] = false;
            self.free.push(t);
        }
        // New triangle (u, w, p) per boundary edge.
        let mut created = Vec::with_capacity(boundary.len());
        let [by_start, by_end] = maps;
        by_start.clear();
        by_end.clear();
        for e in boundary.iter() {
            let t = self.alloc([e.u, e.w, pi], [NONE, NONE, e.outside]);
            self.tn[e.outside][e.slot] = t;
            by_start.insert(e.u, t);
            by_end.insert(e.w, t);
            created.push(t);
        }
        for (k, e) in boundary.iter().enumerate() {
            let t = created[k];
            // Opposite u: shares edge (w, p), the triangle whose boundary edge starts at w.
            let opp_u = by_start[&e.w];
            // Opposite w: shares edge (p, u), the triangle whose boundary edge ends at u.
            let opp_w = by_end[&e.u];
            self.tn[t][0] = opp_u;
            self.tn[t][1] = opp_w;
        }
        // Rotate so the infinite vertex, if any, sits in slot 2.
        for &t in &created {
            let v = self.tv[t];
            let n = self.tn[t];
            if v[0] == self.inf {
                self.tv[t] = [v[1], v[2], v[0]];
                self.tn[t] = [n[1], n[2], n[0]];
            } else if v[1] == self.inf {
                self.tv[t] = [v[2], v[0], v[1]];
                self.tn[t] = [n[2], n[0], n[1]];
            }
        }
        if let Some(&t) = created.iter().find(|&&t| !self.is_ghost(t)) {
            self.last = t;
        }
    }
}

/// Delaunay triangulation of distinct, not-all-collinear points.
pub fn triangulate(points: &[[f64; 2]]) -> Result<Triangulation2D> {
    check_input(points)?;
    let mut order = hilbert_order(points);
    let (a, b) = (order[0], order[1]);
    let k = (2..order.len())
        .find(|&k| orient2d(points[a], points[b], points[order[k]]) != 0)
        .ok_or(Error::DegeneratePointSet)?;
    let c = order.remove(k);
    let mut bld = Builder::new(points);
    bld.init(a, b, c);
    let mut scratch = Vec::new();
    let mut boundary = Vec::new();
    let mut maps = [HashMap::new(), HashMap::new()];
    for &pi in &order[2..] {
        bld.insert(pi, &mut scratch, &mut boundary, &mut maps);
    }

    // Compact real triangles, ordered canonically for deterministic output.
    let mut real: Vec<usize> = (0..bld.tv.len()).filter(|&t| bld.alive[t] && !bld.is_ghost(t)).collect();
    let canon = |v: [usize; 3]| -> [usize; 3] {
        let m = (0..3).min_by_key(|&i| v[i]).unwrap();
        [v[m], v[(m + 1) % 3], v[(m + 2) % 3]]
    };
    real.sort_by_key(|&t| canon(bld.tv[t]));
    let mut remap = vec![NONE; bld.tv.len()];
    for (new, &t) in real.iter().enumerate() {
        remap[t] = new;
    }
    let mut triangles = Vec::with_capacity(real.len());
    let mut neighbors = Vec::with_capacity(real.len());
    for &t in &real {
        let v = bld.tv[t];
        let m = (0..3).min_by_key(|&i| v[i]).unwrap();
        let idx = [m, (m + 1) % 3, (m + 2) % 3];
        triangles.push(idx.map(|i| v[i]));
        neighbors.push(idx.map(|i| {
            let nb = bld.tn[t][i];
            (remap[nb] != NONE).then_some(remap[nb])
        }));
    }
    let mut edges = Vec::with_capacity(3 * triangles.len());
    for v in &triangles {
        for i in 0..3 {
            let (p, q) = (v[i], v[(i + 1) % 3]);
            edges.push((p.min(q), p.max(q)));
        }
    }
    edges.sort_unstable();
    edges.dedup();
    Ok(Triangulation2D {
        points: points.to_vec(),
        triangles,
        neighbors,
        edges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::predicates::incircle;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn assert_empty_circles(t: &Triangulation2D) {
        for tri in t.triangles() {
            let [a, b, c] = tri.map(|i| t.points()[i]);
            assert_eq!(orient2d(a, b, c), 1);
            for (k, &p) in t.points().iter().enumerate() {
                if tri.contains(&k) {
                    continue;
                }
                assert!(incircle(a, b, c, p).unwrap() <= 0, "point {k} inside {tri:?}");
            }
        }
    }

    fn assert_neighbors_consistent(t: &Triangulation2D) {
        for (i, tri) in t.triangles().iter().enumerate() {
            for k in 0..3 {
                let (u, w) = (tri[(k + 1) % 3], tri[(k + 2) % 3]);
                if let Some(nb) = t.neighbors()[i][k] {
                    let o = t.triangles()[nb];
                    let j = (0..3).find(|&j| o[j] != u && o[j] != w).unwrap();
                    assert_eq!((o[(j + 1) % 3], o[(j + 2) % 3]), (w, u));
                    assert_eq!(t.neighbors()[nb][j], Some(i));
                }
            }
        }
    }

    #[test]
    fn single_triangle() {
        let t = triangulate(&[[0., 0.], [1., 0.], [0., 1.]]).unwrap();
        assert_eq!(t.triangles().len(), 1);
        assert_eq!(t.edges(), &[(0, 1), (0, 2), (1, 2)]);
    }

    #[test]
    fn square_picks_one_diagonal() {
        let pts = [[0., 0.], [1., 0.], [1., 1.], [0., 1.]];
        let t = triangulate(&pts).unwrap();
        assert_eq!(t.triangles().len(), 2);
        assert_eq!(t.edges().len(), 5);
        assert!(t.has_edge(0, 2) ^ t.has_edge(1, 3));
        assert_empty_circles(&t);
        assert_eq!(triangulate(&pts).unwrap().edges(), t.edges());
    }

    #[test]
    fn regular_pentagon() {
        let pts: Vec<[f64; 2]> = (0..5)
            .map(|i| {
                let a = 2.0 * std::f64::consts::PI * i as f64 / 5.0;
                [a.cos(), a.sin()]
            })
            .collect();
        let t = triangulate(&pts).unwrap();
        assert_eq!(t.triangles().len(), 3);
        assert_eq!(t.edges().len(), 7);
        for i in 0..5 {
            assert!(t.has_edge(i, (i + 1) % 5));
        }
        assert_empty_circles(&t);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            triangulate(&[[0., 0.], [1., 1.], [2., 2.], [3., 3.]]),
            Err(Error::DegeneratePointSet)
        ));
        assert!(matches!(
            triangulate(&[[0., 0.], [1., 0.], [0., 1.], [1., 0.]]),
            Err(Error::DuplicatePoints(1, 3))
        ));
        assert!(matches!(triangulate(&[[0., 0.], [1., 0.]]), Err(Error::TooFewPoints { .. })));
    }

    #[test]
    fn random_sets_are_delaunay() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [3usize, 4, 10, 50, 200] {
            for _ in 0..5 {
                let pts: Vec<[f64; 2]> = (0..n).map(|_| [rng.gen(), rng.gen()]).collect();
                let t = triangulate(&pts).unwrap();
                assert_empty_circles(&t);
                assert_neighbors_consistent(&t);
                assert!(t.edges().len() <= 3 * n - 6 || n == 3);
            }
        }
    }

    #[test]
    fn degenerate_grids_and_lines() {
        // Integer grid: massively cocircular.
        let mut pts = Vec::new();
        for i in 0..12 {
            for j in 0..9 {
                pts.push([i as f64, j as f64]);
            }
        }
        let t = triangulate(&pts).unwrap();
        assert_empty_circles(&t);
        assert_neighbors_consistent(&t);
        assert_eq!(t.triangles().len(), 2 * 11 * 8);
        // Mostly collinear with one point off the line.
        let mut pts: Vec<[f64; 2]> = (0..30).map(|i| [i as f64, 0.0]).collect();
        pts.push([7.5, 3.0]);
        let t = triangulate(&pts).unwrap();
        assert_eq!(t.triangles().len(), 29);
        assert_empty_circles(&t);
        assert_neighbors_consistent(&t);
    }

    #[test]
    fn cocircular_points() {
        let pts: Vec<[f64; 2]> = (0..64)
            .map(|i| {
                let a = 2.0 * std::f64::consts::PI * i as f64 / 64.0;
                [a.cos() * 3.0, a.sin() * 3.0]
            })
            .collect();
        let t = triangulate(&pts).unwrap();
        assert_eq!(t.triangles().len(), 62);
        assert_empty_circles(&t);
    }

    #[test]
    fn large_input_edge_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 20_000;
        let pts: Vec<[f64; 2]> = (0..n).map(|_| [rng.gen(), rng.gen()]).collect();
        let t = triangulate(&pts).unwrap();
        assert!(t.edges().len() <= 3 * n - 6);
        assert_neighbors_consistent(&t);
    }
}
