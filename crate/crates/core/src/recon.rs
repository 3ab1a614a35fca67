//! Reconstruction algorithms producing undirected graphs on sample indices.
//!
//! For each sample `x`, both compatibility-based algorithms connect `x` to its
//! nearest neighbor `closest(x)` and to the nearest `y` such that the triple
//! `(closest(x), x, y)` is compatible. [`nn_compatible`] scans every sample for
//! `y`; [`compatible_crust`] only looks at Delaunay neighbors of `x`.

use crate::delaunay::triangulate;
use crate::error::{Error, Result};
use crate::geom::{dist2, CompatParams};
use crate::kdtree::SpatialIndex;
use crate::sampling::SampleSet;

/// Undirected simple graph on `0..n`. Edges are stored as sorted `(i, j)`, `i < j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReconGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    unmatched: Vec<usize>,
}

impl ReconGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut out = Vec::new();
        for (i, j) in edges {
            if i == j {
                return Err(Error::InvalidCurve(format!("self-loop at vertex {i}")));
            }
            if i >= n || j >= n {
                return Err(Error::InvalidCurve(format!("edge ({i}, {j}) out of range for {n} vertices")));
            }
            out.push((i.min(j), i.max(j)));
        }
        out.sort_unstable();
        out.dedup();
        Ok(ReconGraph {
            n,
            edges: out,
            unmatched: Vec::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.edges.binary_search(&(i.min(j), i.max(j))).is_ok()
    }

    /// Vertices for which no compatible neighbor existed. Non-empty means the
    /// input was not a valid sample for the algorithm's guarantee.
    pub fn unmatched(&self) -> &[usize] {
        &self.unmatched
    }

    pub fn flagged(&self) -> bool {
        !self.unmatched.is_empty()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for &(i, j) in &self.edges {
            d[i] += 1;
            d[j] += 1;
        }
        d
    }

    /// True when every vertex has degree exactly two.
    pub fn is_cycle_union(&self) -> bool {
        self.degrees().iter().all(|&d| d == 2)
    }

    /// Connected components, isolated vertices included.
    pub fn component_count(&self) -> usize {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut count = self.n;
        for &(i, j) in &self.edges {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a.max(b)] = a.min(b);
                count -= 1;
            }
        }
        count
    }
}

pub fn graph_equal(g1: &ReconGraph, g2: &ReconGraph) -> Result<bool> {
    if g1.n != g2.n {
        return Err(Error::VertexCountMismatch(g1.n, g2.n));
    }
    Ok(g1.edges == g2.edges)
}

/// Edges only in `g1` and edges only in `g2`.
pub fn graph_diff(g1: &ReconGraph, g2: &ReconGraph) -> Result<(Vec<(usize, usize)>, Vec<(usize, usize)>)> {
    if g1.n != g2.n {
        return Err(Error::VertexCountMismatch(g1.n, g2.n));
    }
    let only = |a: &[(usize, usize)], b: &[(usize, usize)]| {
        a.iter().copied().filter(|e| b.binary_search(e).is_err()).collect::<Vec<_>>()
    };
    Ok((only(&g1.edges, &g2.edges), only(&g2.edges, &g1.edges)))
}

struct Prepared {
    dim: usize,
    coords: Vec<f64>,
}

impl Prepared {
    fn new(sample: &SampleSet) -> Result<Self> {
        let n = sample.len();
        if n < 3 {
            return Err(Error::TooFewPoints { needed: 3, got: n });
        }
        if let Some((i, j)) = sample.first_duplicate() {
            return Err(Error::DuplicatePoints(i, j));
        }
        Ok(Prepared {
            dim: sample.dim(),
            coords: sample.flat(),
        })
    }

    #[inline]
    fn p(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    /// Compatibility of `(c, x, y)` given squared lengths `|c-x|^2` and `|y-x|^2`.
    #[inline]
    fn compatible(&self, c: usize, x: usize, y: usize, dcx2: f64, dyx2: f64, params: &CompatParams) -> bool {
        let (pc, px, py) = (self.p(c), self.p(x), self.p(y));
        let mut dot = 0.0;
        for d in 0..self.dim {
            dot += (pc[d] - px[d]) * (py[d] - px[d]);
        }
        let (dcx, dyx) = (dcx2.sqrt(), dyx2.sqrt());
        crate::geom::compatible_from_cos(dot / (dcx * dyx), dcx, dyx, params)
    }
}

fn finish(n: usize, edges: Vec<(usize, usize)>, unmatched: Vec<usize>) -> ReconGraph {
    let mut g = ReconGraph::new(n, edges).expect("algorithm edges are in range");
    g.unmatched = unmatched;
    g
}

/// Nearest-neighbor plus nearest-compatible-neighbor graph, any dimension.
/// Quadratic time: the compatible neighbor is found by a linear scan.
pub fn nn_compatible(sample: &SampleSet, params: &CompatParams) -> Result<ReconGraph> {
    let prep = Prepared::new(sample)?;
    let n = sample.len();
    let index = SpatialIndex::from_flat(prep.coords.clone(), prep.dim);
    let mut edges = Vec::with_capacity(2 * n);
    let mut unmatched = Vec::new();
    for x in 0..n {
        let px = prep.p(x);
        let (closest, dcx2) = index.nearest_filtered(px, |i| i == x).expect("n >= 3");
        edges.push((x, closest));
        let mut best: Option<(usize, f64)> = None;
        for y in 0..n {
            if y == x || y == closest {
                continue;
            }
            let d = dist2(px, prep.p(y));
            if best.map_or(true, |(_, bd)| d < bd) && prep.compatible(closest, x, y, dcx2, d, params) {
                best = Some((y, d));
            }
        }
        match best {
            Some((y, _)) => edges.push((x, y)),
            None => unmatched.push(x),
        }
    }
    Ok(finish(n, edges, unmatched))
}

/// The same rule as [`nn_compatible`] with candidates restricted to Delaunay
/// neighbors. Planar input only; `O(n log n)` expected.
pub fn compatible_crust(sample: &SampleSet, params: &CompatParams) -> Result<ReconGraph> {
    if sample.dim() != 2 {
        return Err(Error::Unsupported(format!(
            "compatible-crust needs 2-D points, got dimension {}",
            sample.dim()
        )));
    }
    let prep = Prepared::new(sample)?;
    let n = sample.len();
    let pts: Vec<[f64; 2]> = (0..n).map(|i| [prep.coords[2 * i], prep.coords[2 * i + 1]]).collect();
    let tri = triangulate(&pts)?;
    let (off, adj) = tri.adjacency();
    let mut edges = Vec::with_capacity(2 * n);
    let mut unmatched = Vec::new();
    for x in 0..n {
        let px = prep.p(x);
        let nbrs = &adj[off[x]..off[x + 1]];
        // Neighbors are ascending, so strict comparison keeps the lowest index on ties.
        let mut closest = (usize::MAX, f64::INFINITY);
        for &y in nbrs {
            let d = dist2(px, prep.p(y));
            if d < closest.1 {
                closest = (y, d);
            }
        }
        let (c, dcx2) = closest;
        edges.push((x, c));
        let mut best: Option<(usize, f64)> = None;
        for &y in nbrs {
            if y == c {
                continue;
            }
            let d = dist2(px, prep.p(y));
            if best.map_or(true, |(_, bd)| d < bd) && prep.compatible(c, x, y, dcx2, d, params) {
                best = Some((y, d));
            }
        }
        match best {
            Some((y, _)) => edges.push((x, y)),
            None => unmatched.push(x),
        }
    }
    Ok(finish(n, edges, unmatched))
}

/// Nearest neighbor plus the nearest point on the far side of it, that is,
/// forming an angle above 90 degrees with the nearest-neighbor edge.
pub fn nn_crust_baseline(sample: &SampleSet) -> Result<ReconGraph> {
    let prep = Prepared::new(sample)?;
    let n = sample.len();
    let index = SpatialIndex::from_flat(prep.coords.clone(), prep.dim);
    let mut edges = Vec::with_capacity(2 * n);
    let mut unmatched = Vec::new();
    for x in 0..n {
        let px = prep.p(x);
        let (c, _) = index.nearest_filtered(px, |i| i == x).expect("n >= 3");
        edges.push((x, c));
        let pc = prep.p(c);
        let mut best: Option<(usize, f64)> = None;
        for y in 0..n {
            if y == x || y == c {
                continue;
            }
            let py = prep.p(y);
            let d = dist2(px, py);
            if best.map_or(true, |(_, bd)| d < bd) {
                let dot: f64 = (0..prep.dim).map(|k| (pc[k] - px[k]) * (py[k] - px[k])).sum();
                if dot < 0.0 {
                    best = Some((y, d));
                }
            }
        }
        match best {
            Some((y, _)) => edges.push((x, y)),
            None => unmatched.push(x),
        }
    }
    Ok(finish(n, edges, unmatched))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Point;
    use std::f64::consts::PI;

    fn circle(n: usize) -> SampleSet {
        SampleSet::new(
            (0..n)
                .map(|i| {
                    let t = 2.0 * PI * i as f64 / n as f64;
                    Point::xy(t.cos(), t.sin())
                })
                .collect(),
        )
        .unwrap()
    }

    fn cycle(n: usize) -> ReconGraph {
        ReconGraph::new(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    #[test]
    fn pentagon_all_algorithms() {
        let s = circle(5);
        let p = CompatParams::default();
        let expect = ReconGraph::new(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]).unwrap();
        assert_eq!(nn_compatible(&s, &p).unwrap(), expect);
        assert_eq!(compatible_crust(&s, &p).unwrap(), expect);
        assert_eq!(nn_crust_baseline(&s).unwrap(), expect);
    }

    #[test]
    fn equilateral_triangle() {
        let s = circle(3);
        // 60 degree corners are not compatible: only closest edges, all flagged.
        let g = nn_compatible(&s, &CompatParams::default()).unwrap();
        assert_eq!(g.edges().len(), 2);
        assert!(g.flagged());
        assert_eq!(g.unmatched(), &[0, 1, 2]);
    }

    #[test]
    fn collinear_baseline() {
        let s = SampleSet::new(vec![Point::xy(0., 0.), Point::xy(1., 0.), Point::xy(2., 0.)]).unwrap();
        let g = nn_crust_baseline(&s).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
    }

    #[test]
    fn square_corners_regression() {
        let s = SampleSet::new(vec![Point::xy(0., 0.), Point::xy(1., 0.), Point::xy(1., 1.), Point::xy(0., 1.)]).unwrap();
        let p = CompatParams::default();
        let a = nn_compatible(&s, &p).unwrap();
        let b = compatible_crust(&s, &p).unwrap();
        // Right angles are never compatible: only closest edges, ties to the lower index.
        assert_eq!(a.edges(), &[(0, 1), (0, 3), (1, 2)]);
        assert_eq!(a.unmatched(), &[0, 1, 2, 3]);
        assert_eq!(a, b);
    }

    #[test]
    fn errors() {
        let p = CompatParams::default();
        let two = SampleSet::new(vec![Point::xy(0., 0.), Point::xy(1., 0.)]).unwrap();
        assert!(matches!(nn_compatible(&two, &p), Err(Error::TooFewPoints { .. })));
        let dup = SampleSet::new(vec![Point::xy(0., 0.), Point::xy(1., 0.), Point::xy(0., 0.)]).unwrap();
        assert!(matches!(nn_compatible(&dup, &p), Err(Error::DuplicatePoints(0, 2))));
        let s3 = SampleSet::new(vec![
            Point::new(vec![0., 0., 0.]).unwrap(),
            Point::new(vec![1., 0., 0.]).unwrap(),
            Point::new(vec![0., 1., 0.]).unwrap(),
        ])
        .unwrap();
        assert!(matches!(compatible_crust(&s3, &p), Err(Error::Unsupported(_))));
        assert_eq!(nn_compatible(&s3, &p).unwrap().edges(), &[(0, 1), (0, 2)]);
    }

    #[test]
    fn graph_comparison() {
        let c4 = cycle(4);
        let p4 = ReconGraph::new(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        assert!(graph_equal(&c4, &c4).unwrap());
        assert_eq!(graph_diff(&c4, &c4).unwrap(), (vec![], vec![]));
        assert_eq!(graph_diff(&c4, &p4).unwrap(), (vec![(0, 3)], vec![]));
        assert!(graph_equal(&c4, &cycle(5)).is_err());
        assert_eq!(c4.component_count(), 1);
        assert!(ReconGraph::new(3, [(1, 1)]).is_err());
    }
}
