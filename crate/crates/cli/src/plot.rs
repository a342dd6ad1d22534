//! Static drawings of a two-dimensional F-subset: SVG and ASCII.

use std::fmt::Write;

use charpoly::polyhedron::{FSubset, Invariants2};
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlotKind {
    Svg,
    Ascii,
}

impl std::str::FromStr for PlotKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "svg" => Ok(PlotKind::Svg),
            "ascii" => Ok(PlotKind::Ascii),
            _ => Err(format!("unknown plot kind {s}; use svg or ascii")),
        }
    }
}

fn f(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::MAX)
}

/// Side length of the drawn square in polyhedron units.
fn extent(d: &FSubset) -> f64 {
    let m = d
        .vertices()
        .iter()
        .flat_map(|v| v.iter().map(f))
        .chain(d.delta().as_ref().map(f))
        .fold(0.0, f64::max);
    (m + 1.0).ceil()
}

pub fn render(d: &FSubset, kind: PlotKind) -> Result<String> {
    if d.dim() != 2 {
        return Err(CliError::Usage(format!(
            "plots need two u-variables, got {}",
            d.dim()
        )));
    }
    let inv = if d.is_empty() {
        None
    } else {
        Some(d.invariants2()?)
    };
    Ok(match kind {
        PlotKind::Svg => svg(d, inv.as_ref()),
        PlotKind::Ascii => ascii(d, inv.as_ref()),
    })
}

const SIZE: f64 = 420.0;
const MARGIN: f64 = 40.0;

fn svg(d: &FSubset, inv: Option<&Invariants2>) -> String {
    let r = extent(d);
    let scale = (SIZE - 2.0 * MARGIN) / r;
    let px = |x: f64| MARGIN + x * scale;
    let py = |y: f64| SIZE - MARGIN - y * scale;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}" font-family="sans-serif" font-size="12">"#
    );
    let (x0, y0, x1, y1) = (px(0.0), py(0.0), px(r), py(r));
    let _ = writeln!(
        s,
        r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>"#
    );
    let _ = writeln!(s, r#"<text x="{}" y="{}">u1</text>"#, x1 + 4.0, y0 + 4.0);
    let _ = writeln!(s, r#"<text x="{}" y="{}">u2</text>"#, x0 - 6.0, y1 - 8.0);
    let vs = d.vertices();
    if vs.is_empty() {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}">empty</text>"#,
            px(r / 2.0),
            py(r / 2.0)
        );
        s.push_str("</svg>\n");
        return s;
    }
    let mut pts = vec![(f(&vs[0][0]), r)];
    pts.extend(vs.iter().map(|v| (f(&v[0]), f(&v[1]))));
    pts.push((r, f(&vs[vs.len() - 1][1])));
    pts.push((r, r));
    let poly: Vec<String> = pts
        .iter()
        .map(|&(x, y)| format!("{},{}", px(x), py(y)))
        .collect();
    let _ = writeln!(
        s,
        r##"<polygon points="{}" fill="#cfe0f5" stroke="#2a5d9f"/>"##,
        poly.join(" ")
    );
    if let Some(delta) = d.delta() {
        let dl = f(&delta);
        let _ = writeln!(
            s,
            r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#c0392b" stroke-dasharray="5,4"/>"##,
            px(0.0),
            py(dl),
            px(dl),
            py(0.0)
        );
        let _ = writeln!(
            s,
            r##"<text x="{}" y="{}" fill="#c0392b">δ={delta}</text>"##,
            px(dl) + 4.0,
            py(0.0) - 4.0
        );
    }
    for v in vs {
        let _ = writeln!(
            s,
            r#"<circle cx="{}" cy="{}" r="3"><title>({}, {})</title></circle>"#,
            px(f(&v[0])),
            py(f(&v[1])),
            v[0],
            v[1]
        );
    }
    if let Some(inv) = inv {
        let (a, b) = (f(&inv.alpha), f(&inv.beta));
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}">α={}</text>"#,
            px(a) - 6.0,
            py(0.0) + 16.0,
            inv.alpha
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end">β={}</text>"#,
            px(0.0) - 4.0,
            py(b) + 4.0,
            inv.beta
        );
        for (w, name, g) in [
            (&inv.w_plus, "γ+", &inv.gamma_plus),
            (&inv.w_minus, "γ−", &inv.gamma_minus),
        ] {
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}">{name}={g}</text>"#,
                px(f(&w[0])) + 6.0,
                py(f(&w[1])) - 6.0
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

const COLS: usize = 49;
const ROWS: usize = 25;

fn ascii(d: &FSubset, inv: Option<&Invariants2>) -> String {
    let r = extent(d);
    let sx = r / (COLS - 1) as f64;
    let sy = r / (ROWS - 1) as f64;
    let mut grid = vec![vec![' '; COLS]; ROWS];
    let delta = d.delta().as_ref().map(f);
    for (row, line) in grid.iter_mut().enumerate() {
        let y = (ROWS - 1 - row) as f64 * sy;
        for (col, c) in line.iter_mut().enumerate() {
            let x = col as f64 * sx;
            let inside = match (BigRational::from_float(x), BigRational::from_float(y)) {
                (Some(qx), Some(qy)) => d.contains(&[qx, qy]),
                _ => false,
            };
            if let Some(dl) = delta {
                if (x + y - dl).abs() <= sx / 2.0 {
                    *c = '\\';
                    continue;
                }
            }
            *c = if inside {
                '.'
            } else if col == 0 {
                '|'
            } else if row == ROWS - 1 {
                '-'
            } else {
                ' '
            };
        }
    }
    for v in d.vertices() {
        let col = (f(&v[0]) / sx).round() as usize;
        let row = ROWS - 1 - ((f(&v[1]) / sy).round() as usize).min(ROWS - 1);
        if col < COLS {
            grid[row][col] = '*';
        }
    }
    let mut s = String::new();
    let _ = writeln!(s, "u2 ^  (one column = {sx:.3}, one row = {sy:.3})");
    for line in grid {
        let text: String = line.into_iter().collect();
        let _ = writeln!(s, "     {}", text.trim_end());
    }
    let _ = writeln!(s, "     0{:>width$} u1", r, width = COLS - 1);
    let vs: Vec<String> = d
        .vertices()
        .iter()
        .map(|v| format!("({}, {})", v[0], v[1]))
        .collect();
    let _ = writeln!(
        s,
        "vertices: {}",
        if vs.is_empty() {
            "none".into()
        } else {
            vs.join(" ")
        }
    );
    if let Some(inv) = inv {
        let _ = writeln!(
            s,
            "δ = {}  α = {}  β = {}  γ+ = {}  γ− = {}",
            inv.delta, inv.alpha, inv.beta, inv.gamma_plus, inv.gamma_minus
        );
    }
    s
}
