//! Browser bindings for the demo page in `www/`.
//!
//! Every export takes and returns flat `f64`/`u32` arrays so the page can
//! hand them straight to a canvas. The `*_impl` functions hold the logic and
//! compile natively for tests.

use wasm_bindgen::prelude::*;

use curve_recon::curve::{make_curve, CurveFamily, CurveModel};
use curve_recon::gadget::gadget_loop;
use curve_recon::geom::is_compatible;
use curve_recon::recon::{compatible_crust, nn_compatible, nn_crust_baseline};
use curve_recon::sampling::{epsilon_star, default_density, greedy_sample, SampleSet};
use curve_recon::{CompatParams, Point};

fn to_js(e: impl std::fmt::Display) -> JsValue {
    JsValue::from_str(&e.to_string())
}

fn pairs(xy: &[f64]) -> Result<Vec<[f64; 2]>, String> {
    if xy.len() % 2 != 0 {
        return Err("coordinate array has odd length".into());
    }
    Ok(xy.chunks(2).map(|c| [c[0], c[1]]).collect())
}

fn flatten_edges(edges: &[(usize, usize)]) -> Vec<u32> {
    edges.iter().flat_map(|&(i, j)| [i as u32, j as u32]).collect()
}

/// Edge list `[i0, j0, i1, j1, ...]` for planar points `[x0, y0, x1, y1, ...]`.
pub fn reconstruct_impl(xy: &[f64], epsilon: f64, algorithm: &str) -> Result<Vec<u32>, String> {
    let pts = pairs(xy)?;
    if pts.len() < 3 {
        return Err(format!("need at least 3 points, got {}", pts.len()));
    }
    let sample = SampleSet::from_xy(&pts);
    let params = CompatParams::new(epsilon).map_err(|e| e.to_string())?;
    let g = match algorithm {
        "nn-compatible" => nn_compatible(&sample, &params),
        "nn-crust" => nn_crust_baseline(&sample),
        _ => compatible_crust(&sample, &params),
    }
    .map_err(|e| e.to_string())?;
    Ok(flatten_edges(g.edges()))
}

#[wasm_bindgen]
pub fn reconstruct(xy: &[f64], epsilon: f64, algorithm: &str) -> Result<Vec<u32>, JsValue> {
    reconstruct_impl(xy, epsilon, algorithm).map_err(to_js)
}

fn family(name: &str) -> Result<CurveModel, String> {
    let r = match name {
        "ellipse" => make_curve(&CurveFamily::Ellipse { center: [0.0, 0.0], a: 2.0, b: 1.0 }),
        "concentric" => make_curve(&CurveFamily::Concentric { center: [0.0, 0.0], inner: 1.0, outer: 3.0 }),
        "gadget" => gadget_loop(),
        _ => make_curve(&CurveFamily::Circle { center: [0.0, 0.0], radius: 1.0 }),
    };
    r.map_err(|e| e.to_string())
}

/// Polyline of each curve component, components separated by a `NaN, NaN` pair.
pub fn curve_polyline_impl(name: &str, step: f64) -> Result<Vec<f64>, String> {
    let curve = family(name)?;
    let dense = curve.discretize(step);
    let mut out = Vec::with_capacity(2 * dense.len() + 8);
    for c in 0..dense.offsets.len() - 1 {
        let run = &dense.points[dense.offsets[c]..dense.offsets[c + 1]];
        for p in run.iter().chain(run.first().filter(|_| dense.closed[c])) {
            out.extend_from_slice(p);
        }
        out.extend_from_slice(&[f64::NAN, f64::NAN]);
    }
    Ok(out)
}

#[wasm_bindgen]
pub fn curve_polyline(name: &str, step: f64) -> Result<Vec<f64>, JsValue> {
    curve_polyline_impl(name, step).map_err(to_js)
}

/// Greedy sample of a named curve. Returns `[eps_star, x0, y0, x1, y1, ...]`.
pub fn greedy_sample_impl(name: &str, epsilon: f64, seed: u64) -> Result<Vec<f64>, String> {
    let curve = family(name)?;
    let sample = greedy_sample(&curve, epsilon, seed, 0.95).map_err(|e| e.to_string())?;
    let rep = epsilon_star(&curve, &sample, default_density(&curve)).map_err(|e| e.to_string())?;
    let mut out = vec![rep.eps_star];
    for p in sample.points() {
        out.extend_from_slice(p.coords());
    }
    Ok(out)
}

#[wasm_bindgen]
pub fn sample_curve(name: &str, epsilon: f64, seed: u64) -> Result<Vec<f64>, JsValue> {
    greedy_sample_impl(name, epsilon, seed).map_err(to_js)
}

/// Row-major `nx * ny` grid over `[x0, x1] x [y0, y1]`: 1 where a point `c`
/// there makes `(a, b, c)` compatible, 0 otherwise.
#[allow(clippy::too_many_arguments)]
pub fn compatible_mask_impl(
    a: [f64; 2],
    b: [f64; 2],
    epsilon: f64,
    lo: [f64; 2],
    hi: [f64; 2],
    nx: usize,
    ny: usize,
) -> Result<Vec<u8>, String> {
    let params = CompatParams::new(epsilon).map_err(|e| e.to_string())?;
    if a == b {
        return Err("a and b coincide".into());
    }
    let (pa, pb) = (Point::xy(a[0], a[1]), Point::xy(b[0], b[1]));
    let mut out = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        let y = hi[1] - (hi[1] - lo[1]) * (j as f64 + 0.5) / ny as f64;
        for i in 0..nx {
            let x = lo[0] + (hi[0] - lo[0]) * (i as f64 + 0.5) / nx as f64;
            let c = Point::xy(x, y);
            out.push(u8::from(is_compatible(&pa, &pb, &c, &params).unwrap_or(false)));
        }
    }
    Ok(out)
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn compatible_mask(
    ax: f64,
    ay: f64,
    bx: f64,
    by: f64,
    epsilon: f64,
    x0: f64,
    y0: f64,
    x1: f64,
    y1: f64,
    nx: usize,
    ny: usize,
) -> Result<Vec<u8>, JsValue> {
    compatible_mask_impl([ax, ay], [bx, by], epsilon, [x0, y0], [x1, y1], nx, ny).map_err(to_js)
}
