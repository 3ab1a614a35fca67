//! Exact orientation and in-circle signs (adaptive-precision arithmetic).

use robust::Coord;

use crate::error::{Error, Result};

#[inline]
fn c(p: [f64; 2]) -> Coord<f64> {
    Coord { x: p[0], y: p[1] }
}

#[inline]
fn sign(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// Sign of the signed area of `abc`: +1 counterclockwise, -1 clockwise, 0 collinear.
#[inline]
pub fn orient2d(a: [f64; 2], b: [f64; 2], p: [f64; 2]) -> i8 {
    sign(robust::orient2d(c(a), c(b), c(p)))
}

/// Unchecked in-circle sign for a counterclockwise triangle.
#[inline]
pub(crate) fn incircle_raw(a: [f64; 2], b: [f64; 2], cc: [f64; 2], p: [f64; 2]) -> i8 {
    sign(robust::incircle(c(a), c(b), c(cc), c(p)))
}

/// +1 iff `p` lies strictly inside the circumcircle of the counterclockwise
/// triangle `abc`, 0 if cocircular, -1 outside.
pub fn incircle(a: [f64; 2], b: [f64; 2], cc: [f64; 2], p: [f64; 2]) -> Result<i8> {
    match orient2d(a, b, cc) {
        1 => Ok(incircle_raw(a, b, cc, p)),
        0 => Err(Error::Collinear("incircle triangle")),
        _ => Err(Error::Unsupported("incircle triangle must be counterclockwise".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_orient(a: [f64; 2], b: [f64; 2], p: [f64; 2]) -> f64 {
        (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
    }

    #[test]
    fn orientation_examples() {
        assert_eq!(orient2d([0., 0.], [1., 0.], [0., 1.]), 1);
        assert_eq!(orient2d([0., 0.], [1., 0.], [2., 0.]), 0);
        assert_eq!(orient2d([0., 0.], [0., 1.], [1., 0.]), -1);
    }

    #[test]
    fn orientation_beats_naive_rounding() {
        // Tiny x offset of the middle vertex: the naive expression rounds the
        // true area -1e-17/2 away.
        let (a, b, p) = ([0.0, 0.0], [1e-17, 1.0], [1.0, 1.0]);
        assert_eq!(orient2d(a, b, p), -1);
        // Classic near-collinear grid: count naive sign errors against exact.
        let mut disagreements = 0;
        for i in 0..64 {
            for j in 0..64 {
                let p = [0.5 + i as f64 * f64::EPSILON, 0.5 + j as f64 * f64::EPSILON];
                let (a, b) = ([12.0, 12.0], [24.0, 24.0]);
                let exact = orient2d(p, a, b);
                let naive = naive_orient(p, a, b);
                let ns = if naive > 0.0 { 1 } else if naive < 0.0 { -1 } else { 0 };
                // Exact sign must follow the true geometry: sign of (px - py) reversed.
                let truth = {
                    let d = i as i64 - j as i64;
                    if d > 0 { -1 } else if d < 0 { 1 } else { 0 }
                };
                assert_eq!(exact, truth, "i={i} j={j}");
                if ns != truth {
                    disagreements += 1;
                }
            }
        }
        assert!(disagreements > 0, "naive evaluation should misjudge some grid points");
    }

    #[test]
    fn incircle_examples() {
        let (a, b, c) = ([0., 0.], [1., 0.], [1., 1.]);
        assert_eq!(incircle(a, b, c, [0., 1.]).unwrap(), 0);
        assert_eq!(incircle(a, b, c, [0.5, 0.5]).unwrap(), 1);
        assert_eq!(incircle(a, b, c, [2., 2.]).unwrap(), -1);
        assert!(incircle(a, b, [2., 0.], [0.5, 0.5]).is_err());
    }
}
