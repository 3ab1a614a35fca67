//! Static kd-tree over points of any dimension, exact nearest-neighbor queries.

use crate::geom::dist2;

const LEAF: usize = 8;

#[derive(Clone, Debug)]
enum Node {
    Leaf { start: usize, end: usize },
    Split { axis: usize, value: f64, left: usize, right: usize },
}

/// Nearest-neighbor index. Queries return exactly the brute-force answer,
/// ties broken by lowest index.
#[derive(Clone, Debug)]
pub struct SpatialIndex {
    dim: usize,
    coords: Vec<f64>,
    order: Vec<usize>,
    nodes: Vec<Node>,
}

impl SpatialIndex {
    /// Builds from a flat coordinate buffer holding `coords.len() / dim` points.
    pub fn from_flat(coords: Vec<f64>, dim: usize) -> Self {
        assert!(dim > 0 && coords.len() % dim == 0);
        let n = coords.len() / dim;
        let mut idx = SpatialIndex {
            dim,
            coords,
            order: (0..n).collect(),
            nodes: Vec::new(),
        };
        if n > 0 {
            let mut order = std::mem::take(&mut idx.order);
            idx.build(&mut order, 0);
            idx.order = order;
        }
        idx
    }

    pub fn new<P: AsRef<[f64]>>(points: &[P]) -> Self {
        let dim = points.first().map_or(2, |p| p.as_ref().len());
        let mut flat = Vec::with_capacity(points.len() * dim);
        for p in points {
            flat.extend_from_slice(p.as_ref());
        }
        Self::from_flat(flat, dim)
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    fn build(&mut self, order: &mut [usize], offset: usize) -> usize {
        let id = self.nodes.len();
        if order.len() <= LEAF {
            self.nodes.push(Node::Leaf {
                start: offset,
                end: offset + order.len(),
            });
            return id;
        }
        let mut axis = 0;
        let mut best = -1.0;
        for d in 0..self.dim {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for &i in order.iter() {
                let v = self.coords[i * self.dim + d];
                lo = lo.min(v);
                hi = hi.max(v);
            }
            if hi - lo > best {
                best = hi - lo;
                axis = d;
            }
        }
        let mid = order.len() / 2;
        let dim = self.dim;
        let coords = &self.coords;
        order.select_nth_unstable_by(mid, |&a, &b| {
            coords[a * dim + axis].total_cmp(&coords[b * dim + axis])
        });
        let value = coords[order[mid] * dim + axis];
        self.nodes.push(Node::Leaf { start: 0, end: 0 });
        let (lo, hi) = order.split_at_mut(mid);
        let left = self.build(lo, offset);
        let right = self.build(hi, offset + mid);
        self.nodes[id] = Node::Split {
            axis,
            value,
            left,
            right,
        };
        id
    }

    /// Nearest indexed point to `q`, skipping indices for which `skip` holds.
    /// Returns `(index, squared distance)`.
    pub fn nearest_filtered(&self, q: &[f64], skip: impl Fn(usize) -> bool) -> Option<(usize, f64)> {
        if self.nodes.is_empty() {
            return None;
        }
        let mut best = (usize::MAX, f64::INFINITY);
        self.search(0, q, &skip, &mut best);
        (best.0 != usize::MAX).then_some(best)
    }

    pub fn nearest(&self, q: &[f64]) -> Option<(usize, f64)> {
        self.nearest_filtered(q, |_| false)
    }

    fn search(&self, node: usize, q: &[f64], skip: &impl Fn(usize) -> bool, best: &mut (usize, f64)) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for &i in &self.order[start..end] {
                    if skip(i) {
                        continue;
                    }
                    let d = dist2(q, self.point(i));
                    if d < best.1 || (d == best.1 && i < best.0) {
                        *best = (i, d);
                    }
                }
            }
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                let diff = q[axis] - value;
                let (near, far) = if diff < 0.0 { (left, right) } else { (right, left) };
                self.search(near, q, skip, best);
                // Equal distance still visits the far side so ties resolve by index.
                if diff * diff <= best.1 {
                    self.search(far, q, skip, best);
                }
            }
        }
    }

    /// All indices within distance `r` of `q` (inclusive), ascending.
    pub fn within(&self, q: &[f64], r: f64) -> Vec<usize> {
        let mut out = Vec::new();
        if !self.nodes.is_empty() {
            self.collect(0, q, r * r, &mut out);
        }
        out.sort_unstable();
        out
    }

    fn collect(&self, node: usize, q: &[f64], r2: f64, out: &mut Vec<usize>) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                out.extend(self.order[start..end].iter().copied().filter(|&i| dist2(q, self.point(i)) <= r2));
            }
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                let diff = q[axis] - value;
                if diff <= 0.0 || diff * diff <= r2 {
                    self.collect(left, q, r2, out);
                }
                if diff >= 0.0 || diff * diff <= r2 {
                    self.collect(right, q, r2, out);
                }
            }
        }
    }
}
