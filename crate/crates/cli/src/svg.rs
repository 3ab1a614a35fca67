//! Standalone SVG plots of points, edges and curves.

use std::fmt::Write;

use curve_recon::curve::{CurveModel, Segment};
use curve_recon::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct SvgOptions {
    /// Width of the longer canvas side in pixels.
    pub size: f64,
    pub stroke: f64,
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions { size: 800.0, stroke: 1.5 }
    }
}

/// Maps world coordinates to canvas pixels with y pointing up.
struct View {
    lo: [f64; 2],
    scale: f64,
    height: f64,
    pad: f64,
}

impl View {
    fn new(points: &[[f64; 2]], curve: Option<&CurveModel>, size: f64) -> Self {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        let mut grow = |p: [f64; 2]| {
            for d in 0..2 {
                lo[d] = lo[d].min(p[d]);
                hi[d] = hi[d].max(p[d]);
            }
        };
        points.iter().for_each(|&p| grow(p));
        if let Some(c) = curve {
            let (a, b) = c.bbox();
            grow(a);
            grow(b);
        }
        if !lo[0].is_finite() {
            lo = [0.0; 2];
            hi = [1.0; 2];
        }
        let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-12);
        let pad = 0.04 * size;
        let scale = (size - 2.0 * pad) / span;
        View {
            lo,
            scale,
            height: (hi[1] - lo[1]) * scale + 2.0 * pad,
            pad,
        }
    }

    fn map(&self, p: [f64; 2]) -> (f64, f64) {
        (
            self.pad + (p[0] - self.lo[0]) * self.scale,
            self.height - self.pad - (p[1] - self.lo[1]) * self.scale,
        )
    }
}

fn fmt(v: f64) -> String {
    let r = (v * 1000.0).round() / 1000.0;
    if r == 0.0 {
        "0".into()
    } else {
        r.to_string()
    }
}

fn segment_path(seg: &Segment, view: &View, out: &mut String) {
    let (x, y) = view.map(seg.start());
    let _ = write!(out, "M{} {}", fmt(x), fmt(y));
    // Arcs and ellipse pieces are flattened into short chords.
    let n = match seg {
        Segment::Segment { .. } => 1,
        _ => 64,
    };
    for k in 1..=n {
        let (x, y) = view.map(seg.eval(k as f64 / n as f64));
        let _ = write!(out, " L{} {}", fmt(x), fmt(y));
    }
}

/// Renders points as `circle` elements, edges as `line` elements and the
/// optional curve as `path` elements. Output bytes depend only on the input.
pub fn emit_svg(points: &[Vec<f64>], edges: &[(usize, usize)], curve: Option<&CurveModel>, opts: SvgOptions) -> Result<String> {
    if let Some(p) = points.iter().find(|p| p.len() != 2) {
        return Err(Error::Unsupported(format!("SVG output needs 2-D points, got dimension {}", p.len())));
    }
    let xy: Vec<[f64; 2]> = points.iter().map(|p| [p[0], p[1]]).collect();
    if let Some(&(i, j)) = edges.iter().find(|&&(i, j)| i >= xy.len() || j >= xy.len()) {
        return Err(Error::InvalidSample(format!("edge ({i}, {j}) out of range")));
    }
    let view = View::new(&xy, curve, opts.size);
    let w = opts.size;
    let h = view.height;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">",
        fmt(w),
        fmt(h),
        fmt(w),
        fmt(h)
    );
    let _ = writeln!(s, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    if let Some(c) = curve {
        let _ = writeln!(s, "<g fill=\"none\" stroke=\"#9bb7d4\" stroke-width=\"{}\">", fmt(opts.stroke));
        for comp in c.components() {
            let mut d = String::new();
            for seg in comp.segments() {
                if !d.is_empty() {
                    d.push(' ');
                }
                segment_path(seg, &view, &mut d);
            }
            let _ = writeln!(s, "<path d=\"{d}\"/>");
        }
        let _ = writeln!(s, "</g>");
    }
    let _ = writeln!(s, "<g stroke=\"#c0392b\" stroke-width=\"{}\">", fmt(opts.stroke));
    for &(i, j) in edges {
        let (x1, y1) = view.map(xy[i]);
        let (x2, y2) = view.map(xy[j]);
        let _ = writeln!(s, "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>", fmt(x1), fmt(y1), fmt(x2), fmt(y2));
    }
    let _ = writeln!(s, "</g>");
    let r = (2.0 * opts.stroke).max(1.0);
    let _ = writeln!(s, "<g fill=\"#222\">");
    for &p in &xy {
        let (x, y) = view.map(p);
        let _ = writeln!(s, "<circle cx=\"{}\" cy=\"{}\" r=\"{}\"/>", fmt(x), fmt(y), fmt(r));
    }
    let _ = writeln!(s, "</g>");
    s.push_str("</svg>\n");
    Ok(s)
}
