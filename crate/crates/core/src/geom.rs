//! Dimension-generic primitives: points, distances, angles, and the
//! compatibility predicate for a triple of sample points.
//!
//! For a pair `a != b` the witness set `X(a, b)` is the (d-2)-sphere of points
//! at distance `d(a,b) / (eps * sqrt(4 - eps^2))` from both `a` and `b`. A
//! triple `(a, b, c)` is compatible when `c` avoids every closed ball
//! `B_x(d(x, b))` for `x` in `X(a, b)` and `a` avoids every `B_y(d(y, b))` for
//! `y` in `X(b, c)`. [`is_compatible`] evaluates this with a closed-form angle
//! test; [`is_compatible_oracle`] checks ball membership directly.

use std::f64::consts::PI;
use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point in R^d, d >= 2.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::DimensionTooSmall(coords.len()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Point { coords })
    }

    pub fn xy(x: f64, y: f64) -> Self {
        Point { coords: vec![x, y] }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn x(&self) -> f64 {
        self.coords[0]
    }

    pub fn y(&self) -> f64 {
        self.coords[1]
    }
}

impl Deref for Point {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.coords
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coords)
    }
}

impl From<[f64; 2]> for Point {
    fn from(p: [f64; 2]) -> Self {
        Point::xy(p[0], p[1])
    }
}

/// Sampling parameter and the derived cosine threshold `k = eps*sqrt(4-eps^2)/2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CompatParams {
    epsilon: f64,
    k: f64,
    alpha: f64,
}

impl CompatParams {
    pub const DEFAULT_EPSILON: f64 = 0.66;

    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 2f64.sqrt()) {
            return Err(Error::InvalidEpsilon(epsilon));
        }
        let k = (epsilon * (4.0 - epsilon * epsilon).sqrt() / 2.0).min(1.0);
        Ok(CompatParams {
            epsilon,
            k,
            alpha: k.acos(),
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// `arccos(k)`: the angle between `ba` and `bx` for the witness `x` of `X(a,b)`.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Ratio `d(x,a) / d(a,b)` for `x` in `X(a,b)`.
    pub fn radius_factor(&self) -> f64 {
        1.0 / (2.0 * self.k)
    }
}

impl Default for CompatParams {
    fn default() -> Self {
        CompatParams::new(Self::DEFAULT_EPSILON).expect("default epsilon is valid")
    }
}

fn check_dims(p: &[f64], q: &[f64]) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch(p.len(), q.len()));
    }
    Ok(())
}

#[inline]
pub(crate) fn dist2(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum()
}

#[inline]
pub(crate) fn dist(p: &[f64], q: &[f64]) -> f64 {
    dist2(p, q).sqrt()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn sub(p: &[f64], q: &[f64]) -> Vec<f64> {
    p.iter().zip(q).map(|(a, b)| a - b).collect()
}

fn dot(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| a * b).sum()
}

pub fn distance(p: &Point, q: &Point) -> Result<f64> {
    check_dims(p, q)?;
    Ok(dist(p, q))
}

/// Angle between vectors `u` and `v` in radians, via
/// `2 atan2(| |v|u - |u|v |, | |v|u + |u|v |)`, which stays accurate near 0 and pi.
pub(crate) fn vec_angle(u: &[f64], v: &[f64]) -> f64 {
    let nu = norm(u);
    let nv = norm(v);
    let mut diff = 0.0;
    let mut sum = 0.0;
    for (a, b) in u.iter().zip(v) {
        let d = nv * a - nu * b;
        let s = nv * a + nu * b;
        diff += d * d;
        sum += s * s;
    }
    2.0 * diff.sqrt().atan2(sum.sqrt())
}

/// Angle at `b` in radians, no validation.
#[inline]
pub(crate) fn angle_at(a: &[f64], b: &[f64], c: &[f64]) -> f64 {
    if a.len() == 2 {
        let (ux, uy) = (a[0] - b[0], a[1] - b[1]);
        let (vx, vy) = (c[0] - b[0], c[1] - b[1]);
        let nu = ux.hypot(uy);
        let nv = vx.hypot(vy);
        let (dx, dy) = (nv * ux - nu * vx, nv * uy - nu * vy);
        let (sx, sy) = (nv * ux + nu * vx, nv * uy + nu * vy);
        return 2.0 * dx.hypot(dy).atan2(sx.hypot(sy));
    }
    vec_angle(&sub(a, b), &sub(c, b))
}

/// The angle `abc` at vertex `b`, in degrees within [0, 180].
pub fn angle_deg(a: &Point, b: &Point, c: &Point) -> Result<f64> {
    check_dims(a, b)?;
    check_dims(b, c)?;
    if a == b || c == b {
        return Err(Error::Coincident("angle vertex coincides with an endpoint"));
    }
    Ok(angle_at(a, b, c).to_degrees())
}

/// Common distance from `a` and `b` of every point of `X(a, b)`.
pub fn xab_radius(a: &Point, b: &Point, params: &CompatParams) -> Result<f64> {
    check_dims(a, b)?;
    if a == b {
        return Err(Error::Coincident("X(a,b) needs a != b"));
    }
    Ok(dist(a, b) * params.radius_factor())
}

/// Unit vector along the component of `v` orthogonal to the unit vector `axis`.
fn orthogonal_unit(v: &[f64], axis: &[f64]) -> Option<Vec<f64>> {
    let t = dot(v, axis);
    let w: Vec<f64> = v.iter().zip(axis).map(|(x, a)| x - t * a).collect();
    let n = norm(&w);
    if n <= 1e-14 * norm(v).max(f64::MIN_POSITIVE) {
        return None;
    }
    Some(w.into_iter().map(|x| x / n).collect())
}

struct WitnessFrame {
    center: Vec<f64>,
    height: f64,
    toward: Vec<f64>,
}

/// Geometry of `X(a, b)` as seen from `c`: its center, the radius of the
/// witness sphere inside the bisector hyperplane, and the in-plane unit
/// direction pointing toward `c`.
fn witness_frame(a: &[f64], b: &[f64], c: &[f64], params: &CompatParams) -> Option<WitnessFrame> {
    let dab = dist(a, b);
    let axis: Vec<f64> = sub(b, a).into_iter().map(|x| x / dab).collect();
    let center: Vec<f64> = a.iter().zip(b).map(|(p, q)| 0.5 * (p + q)).collect();
    let r = dab * params.radius_factor();
    let height = (r * r - 0.25 * dab * dab).max(0.0).sqrt();
    let toward = orthogonal_unit(&sub(c, &center), &axis)?;
    Some(WitnessFrame {
        center,
        height,
        toward,
    })
}

fn validate_triple(a: &Point, b: &Point, c: &Point) -> Result<()> {
    check_dims(a, b)?;
    check_dims(b, c)?;
    if a == b || b == c || a == c {
        return Err(Error::Coincident("compatibility needs pairwise distinct points"));
    }
    Ok(())
}

/// The element of `X(a, b)` in the plane of `a, b, c` on `c`'s side of line `ab`.
pub fn xab_witness(a: &Point, b: &Point, c: &Point, params: &CompatParams) -> Result<Point> {
    validate_triple(a, b, c)?;
    let f = witness_frame(a, b, c, params).ok_or(Error::Collinear("xab_witness"))?;
    let coords = f
        .center
        .iter()
        .zip(&f.toward)
        .map(|(m, u)| m + f.height * u)
        .collect();
    Ok(Point { coords })
}

/// Closed-form compatibility on raw coordinates.
#[inline]
pub(crate) fn compatible_raw(a: &[f64], b: &[f64], c: &[f64], params: &CompatParams) -> bool {
    let dab = dist(a, b);
    let dcb = dist(c, b);
    compatible_with_lengths(a, b, c, dab, dcb, params)
}

#[inline]
pub(crate) fn compatible_with_lengths(
    a: &[f64],
    b: &[f64],
    c: &[f64],
    dab: f64,
    dcb: f64,
    params: &CompatParams,
) -> bool {
    let theta = angle_at(a, b, c);
    let k = params.k;
    let alpha = params.alpha;
    // An argument above 1 means the far point lies beyond the diameter of
    // every witness ball, so that half holds regardless of the angle.
    let half = |num: f64, den: f64| {
        let arg = k * num / den;
        arg > 1.0 || theta > alpha + arg.acos()
    };
    half(dcb, dab) && half(dab, dcb)
}

/// The closed-form test expressed through `cos(angle)`: `theta > arccos(k) + arccos(t)`
/// is `cos(theta) < k t - sqrt(1 - k^2) sqrt(1 - t^2)` on `[0, pi]`. Avoids
/// inverse trigonometry in the reconstruction inner loops.
#[inline]
pub(crate) fn compatible_from_cos(cos_theta: f64, dab: f64, dcb: f64, params: &CompatParams) -> bool {
    let k = params.k;
    let sk = (1.0 - k * k).max(0.0).sqrt();
    let half = |num: f64, den: f64| {
        let t = k * num / den;
        t > 1.0 || cos_theta < k * t - sk * (1.0 - t * t).sqrt()
    };
    half(dcb, dab) && half(dab, dcb)
}

/// Closed-form compatibility test: `angle(abc) > arccos(k) + arccos(k d(c,b)/d(a,b))`
/// and the same with `a` and `c` exchanged.
pub fn is_compatible(a: &Point, b: &Point, c: &Point, params: &CompatParams) -> Result<bool> {
    validate_triple(a, b, c)?;
    Ok(compatible_raw(a, b, c, params))
}

/// Signed distance of the angle `abc` (degrees) from the compatibility threshold.
/// Positive means compatible. Used to exclude near-ties in randomized checks.
pub fn compatibility_margin_deg(a: &Point, b: &Point, c: &Point, params: &CompatParams) -> Result<f64> {
    validate_triple(a, b, c)?;
    let dab = dist(a, b);
    let dcb = dist(c, b);
    let theta = angle_at(a, b, c);
    let need = |num: f64, den: f64| {
        let arg = params.k * num / den;
        if arg > 1.0 {
            f64::NEG_INFINITY
        } else {
            params.alpha + arg.acos()
        }
    };
    let threshold = need(dcb, dab).max(need(dab, dcb));
    Ok((theta - threshold).to_degrees())
}

/// True iff `p` escapes every ball `B_x(d(x, b))` over `n` witnesses of `X(a, b)`
/// on the circle spanned by the direction toward `p` and one orthogonal direction.
fn escapes_witness_balls(a: &[f64], b: &[f64], p: &[f64], params: &CompatParams, n: usize) -> Option<bool> {
    let f = witness_frame(a, b, p, params)?;
    let dim = a.len();
    let witness = |cos_t: f64, sin_t: f64, other: &[f64]| -> Vec<f64> {
        (0..dim)
            .map(|i| f.center[i] + f.height * (cos_t * f.toward[i] + sin_t * other[i]))
            .collect::<Vec<f64>>()
    };
    let outside = |x: &[f64]| dist(p, x) > dist(b, x);
    if dim == 2 {
        let zero = [0.0; 2];
        return Some(outside(&witness(1.0, 0.0, &zero)) && outside(&witness(-1.0, 0.0, &zero)));
    }
    // A second direction orthogonal to both the ab axis and `toward`.
    let dab = dist(a, b);
    let axis: Vec<f64> = sub(b, a).into_iter().map(|x| x / dab).collect();
    let mut other = None;
    for j in 0..dim {
        let mut e = vec![0.0; dim];
        e[j] = 1.0;
        let t = dot(&e, &f.toward);
        let e: Vec<f64> = e.iter().zip(&f.toward).map(|(x, u)| x - t * u).collect();
        if let Some(w) = orthogonal_unit(&e, &axis) {
            if dot(&w, &f.toward).abs() < 1e-9 {
                other = Some(w);
                break;
            }
        }
    }
    let other = other?;
    Some((0..n).all(|j| {
        let phi = 2.0 * PI * j as f64 / n as f64;
        outside(&witness(phi.cos(), phi.sin(), &other))
    }))
}

/// Ball-membership form of the compatibility test, discretizing the witness
/// spheres with `n_witness` points. Intended as an independent oracle.
pub fn is_compatible_oracle(
    a: &Point,
    b: &Point,
    c: &Point,
    params: &CompatParams,
    n_witness: usize,
) -> Result<bool> {
    validate_triple(a, b, c)?;
    if n_witness < 2 {
        return Err(Error::Unsupported("n_witness must be at least 2".into()));
    }
    let first = escapes_witness_balls(a, b, c, params, n_witness).ok_or(Error::Collinear("oracle"))?;
    let second = escapes_witness_balls(c, b, a, params, n_witness).ok_or(Error::Collinear("oracle"))?;
    Ok(first && second)
}
