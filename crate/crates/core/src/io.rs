//! Text formats: point CSV, edge lists and curve JSON.
//!
//! Point CSV holds one point per line, coordinates separated by commas.
//! Lines starting with `#` are comments. A comment of the form
//! `# columns: x,y,component,param` declares trailing tag columns; without
//! it every column is a coordinate. Numbers are written in shortest
//! round-trip form, so write-then-read is lossless.

use crate::curve::CurveModel;
use crate::error::{Error, Result};
use crate::geom::Point;
use crate::recon::ReconGraph;
use crate::sampling::{SampleSet, Tag};

const COLUMNS: &str = "columns:";

fn parse_header(body: &str) -> Option<(usize, bool)> {
    let cols: Vec<&str> = body.strip_prefix(COLUMNS)?.split(',').map(str::trim).collect();
    let tagged = cols.len() >= 2 && cols[cols.len() - 2..] == ["component", "param"];
    let dim = if tagged { cols.len() - 2 } else { cols.len() };
    Some((dim, tagged))
}

fn parse_f64(field: &str, line: usize) -> Result<f64> {
    let v: f64 = field.trim().parse().map_err(|_| Error::Parse {
        line,
        msg: format!("not a number: {:?}", field.trim()),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            line,
            msg: "non-finite coordinate".into(),
        });
    }
    Ok(v)
}

/// Parses point CSV text. Errors name the 1-based line.
pub fn read_points_csv(text: &str) -> Result<SampleSet> {
    let mut layout: Option<(usize, bool)> = None;
    let mut points = Vec::new();
    let mut tags = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let s = raw.trim();
        if s.is_empty() {
            continue;
        }
        if let Some(body) = s.strip_prefix('#') {
            if points.is_empty() {
                if let Some(h) = parse_header(body.trim()) {
                    layout = Some(h);
                }
            }
            continue;
        }
        let fields: Vec<&str> = s.split(',').collect();
        let (dim, tagged) = *layout.get_or_insert((fields.len(), false));
        let want = dim + if tagged { 2 } else { 0 };
        if fields.len() != want {
            return Err(Error::Parse {
                line,
                msg: format!("expected {want} fields, found {}", fields.len()),
            });
        }
        if dim < 2 {
            return Err(Error::Parse {
                line,
                msg: format!("points need at least 2 coordinates, found {dim}"),
            });
        }
        let coords = fields[..dim].iter().map(|f| parse_f64(f, line)).collect::<Result<Vec<_>>>()?;
        points.push(Point::new(coords).map_err(|e| Error::Parse { line, msg: e.to_string() })?);
        if tagged {
            let component = fields[dim].trim().parse::<usize>().map_err(|_| Error::Parse {
                line,
                msg: format!("component must be a non-negative integer: {:?}", fields[dim].trim()),
            })?;
            let param = parse_f64(fields[dim + 1], line)?;
            tags.push(Tag { component, param });
        }
    }
    if matches!(layout, Some((_, true))) {
        SampleSet::with_tags(points, tags)
    } else {
        SampleSet::new(points)
    }
}

/// Serializes a sample; tagged samples get a `# columns:` header.
pub fn write_points_csv(sample: &SampleSet) -> String {
    let mut out = String::new();
    if let Some(tags) = sample.tags() {
        let names = ["x", "y", "z"];
        let coords: Vec<String> = (0..sample.dim())
            .map(|d| names.get(d).map_or_else(|| format!("x{d}"), |s| s.to_string()))
            .collect();
        out.push_str(&format!("# {COLUMNS} {},component,param\n", coords.join(",")));
        for (p, t) in sample.points().iter().zip(tags) {
            push_coords(&mut out, p.coords());
            out.push_str(&format!(",{},{}\n", t.component, t.param));
        }
    } else {
        for p in sample.points() {
            push_coords(&mut out, p.coords());
            out.push('\n');
        }
    }
    out
}

fn push_coords(out: &mut String, coords: &[f64]) {
    for (i, c) in coords.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&c.to_string());
    }
}

/// One `i j` line per edge, `i < j`, ascending.
pub fn write_edges(g: &ReconGraph) -> String {
    g.edges().iter().map(|(i, j)| format!("{i} {j}\n")).collect()
}

/// Parses an edge list for a graph on `n` vertices.
pub fn read_edges(text: &str, n: usize) -> Result<ReconGraph> {
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let s = raw.trim();
        if s.is_empty() || s.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = s.split_whitespace().collect();
        let bad = || Error::Parse {
            line: i + 1,
            msg: format!("expected two vertex indices, found {s:?}"),
        };
        if parts.len() != 2 {
            return Err(bad());
        }
        let a = parts[0].parse::<usize>().map_err(|_| bad())?;
        let b = parts[1].parse::<usize>().map_err(|_| bad())?;
        edges.push((a, b));
    }
    ReconGraph::new(n, edges)
}

pub fn curve_to_json(curve: &CurveModel) -> Result<String> {
    serde_json::to_string_pretty(curve).map_err(|e| Error::Io(e.to_string()))
}

pub fn curve_from_json(text: &str) -> Result<CurveModel> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        msg: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{make_curve, CurveFamily};
    use crate::sampling::greedy_sample;

    #[test]
    fn plain_csv() {
        let s = read_points_csv("# five points\n1,0\n0.30901699437494745,0.9510565162951535\n\n-1,2e-3\n").unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.dim(), 2);
        assert!(s.tags().is_none());
        assert_eq!(s.points()[2].coords(), &[-1.0, 0.002]);
    }

    #[test]
    fn three_d_csv() {
        let s = read_points_csv("1,2,3\n4,5,6\n").unwrap();
        assert_eq!(s.dim(), 3);
    }

    #[test]
    fn parse_errors_name_the_line() {
        let e = read_points_csv("0,0\n1,x\n").unwrap_err();
        assert_eq!(e, Error::Parse { line: 2, msg: "not a number: \"x\"".into() });
        let e = read_points_csv("0,0\n# note\n1,2,3\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }));
        assert!(matches!(read_points_csv("1\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(read_points_csv("1,inf\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn tagged_round_trip() {
        let c = make_curve(&CurveFamily::Ellipse { center: [0.3, -1.0], a: 2.0, b: 1.0 }).unwrap();
        let s = greedy_sample(&c, 0.5, 9, 0.9).unwrap();
        let text = write_points_csv(&s);
        assert!(text.starts_with("# columns: x,y,component,param\n"));
        let back = read_points_csv(&text).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn untagged_round_trip_is_bit_exact() {
        let pts: Vec<[f64; 2]> = (0..50).map(|i| [(i as f64).sin() / 3.0, 1e-300 * i as f64]).collect();
        let s = SampleSet::from_xy(&pts);
        assert_eq!(read_points_csv(&write_points_csv(&s)).unwrap(), s);
    }

    #[test]
    fn edges_round_trip() {
        let g = ReconGraph::new(5, [(4, 0), (0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        let text = write_edges(&g);
        assert_eq!(text, "0 1\n0 4\n1 2\n2 3\n3 4\n");
        assert_eq!(read_edges(&text, 5).unwrap(), g);
        assert!(matches!(read_edges("0 1\n2\n", 5), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn curve_json_round_trip() {
        let c = make_curve(&CurveFamily::Concentric { center: [0.0, 0.0], inner: 1.0, outer: 3.0 }).unwrap();
        let back = curve_from_json(&curve_to_json(&c).unwrap()).unwrap();
        assert_eq!(curve_to_json(&back).unwrap(), curve_to_json(&c).unwrap());
        assert!(curve_from_json("{\"components\": [}").is_err());
    }
}
