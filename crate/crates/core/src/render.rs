//! SVG drawings of surface graphs with anyons, orientations and paths.

use std::fmt::Write;

use crate::compile::ThooftPath;
use crate::decorated::{DecoratedGraph, DirectedPath, EdgeKind};
use crate::graph::{Corner, Point, SurfaceGraph};
use crate::kasteleyn::Orientation;

/// Highlighted operator support.
#[derive(Clone, Debug)]
pub enum Highlight {
    Wilson(DirectedPath),
    Thooft(Vec<usize>),
}

#[derive(Clone, Debug)]
pub struct RenderSpec {
    pub orientation: Option<Orientation>,
    pub anyons: bool,
    pub paths: Vec<Highlight>,
    pub width: u32,
    pub height: u32,
}

impl Default for RenderSpec {
    fn default() -> Self {
        RenderSpec { orientation: None, anyons: true, paths: Vec::new(), width: 640, height: 640 }
    }
}

struct View {
    min: Point,
    scale: f64,
    pad: f64,
    height: f64,
}

impl View {
    fn map(&self, p: Point) -> Point {
        (self.pad + (p.0 - self.min.0) * self.scale, self.height - self.pad - (p.1 - self.min.1) * self.scale)
    }
}

fn face_centre(g: &SurfaceGraph, f: usize) -> Point {
    let darts = &g.faces()[f].darts;
    let n = darts.len() as f64;
    let (sx, sy) = darts.iter().map(|&d| g.corner_pos(d)).fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    (sx / n, sy / n)
}

fn link_midpoint(g: &SurfaceGraph, d: Corner) -> Point {
    let mut pts = vec![g.corner_pos(d)];
    if let Some(t) = g.partner(d) {
        pts.extend(g.edge_bends(d, t));
        pts.push(g.corner_pos(t));
    }
    let n = pts.len();
    if n % 2 == 1 {
        pts[n / 2]
    } else {
        let (a, b) = (pts[n / 2 - 1], pts[n / 2]);
        ((a.0 + b.0) / 2.0, (a.1 + b.1) / 2.0)
    }
}

/// Face centres joined through the midpoints of the crossed links. The outer
/// face is drawn as a short stub beyond the boundary.
fn thooft_points(g: &SurfaceGraph, tp: &ThooftPath) -> Vec<Point> {
    let mids: Vec<Point> = tp.crossings.iter().map(|&d| link_midpoint(g, d)).collect();
    let k = mids.len();
    let stub = |m: Point, inner: usize| {
        let c = face_centre(g, inner);
        let (dx, dy) = (m.0 - c.0, m.1 - c.1);
        let r = (dx * dx + dy * dy).sqrt().max(1e-9);
        (m.0 + 0.4 * dx / r, m.1 + 0.4 * dy / r)
    };
    let end_point = |f: usize, m: Point, inner: usize| {
        if g.faces()[f].outer {
            stub(m, inner)
        } else {
            face_centre(g, f)
        }
    };
    let mut out = vec![end_point(tp.faces[0], mids[0], tp.faces[1])];
    for i in 0..k {
        out.push(mids[i]);
        if i + 1 < k {
            let f = tp.faces[i + 1];
            out.push(if g.faces()[f].outer { stub(mids[i], tp.faces[i]) } else { face_centre(g, f) });
            if g.faces()[f].outer {
                out.push(stub(mids[i + 1], tp.faces[i + 2]));
            }
        }
    }
    out.push(end_point(tp.faces[k], mids[k - 1], tp.faces[k - 1]));
    out
}

pub fn render_svg(g: &SurfaceGraph, spec: &RenderSpec) -> String {
    let dg = DecoratedGraph::new(g);
    let mut pts: Vec<Point> = g.qubits().iter().map(|q| q.pos).collect();
    for (a, b) in g.edges() {
        pts.extend(g.edge_bends(a, b));
    }
    let (mut lo, mut hi) = ((f64::INFINITY, f64::INFINITY), (f64::NEG_INFINITY, f64::NEG_INFINITY));
    for p in &pts {
        lo = (lo.0.min(p.0), lo.1.min(p.1));
        hi = (hi.0.max(p.0), hi.1.max(p.1));
    }
    let pad = 48.0;
    let span = (hi.0 - lo.0).max(hi.1 - lo.1).max(1.0);
    let (w, h) = (spec.width as f64, spec.height as f64);
    let view = View { min: lo, scale: (w.min(h) - 2.0 * pad) / span, pad, height: h };
    let at = |c: Corner| view.map(g.corner_pos(c));

    let mut s = String::new();
    let _ = writeln!(
        s,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"##,
        spec.width, spec.height, spec.width, spec.height
    );
    s.push_str(
        r##"<defs><marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" markerWidth="5" markerHeight="5" orient="auto"><path d="M0,0 L10,5 L0,10 z" fill="#444"/></marker></defs>"##,
    );
    s.push('\n');
    s.push_str(r##"<rect width="100%" height="100%" fill="white"/>"##);
    s.push('\n');

    // links with their bends
    for (a, b) in g.edges() {
        let mut line = vec![at(a)];
        line.extend(g.edge_bends(a, b).into_iter().map(|p| view.map(p)));
        line.push(at(b));
        let _ = writeln!(s, r##"<polyline points="{}" fill="none" stroke="#222" stroke-width="2"/>"##, poly(&line));
    }
    // diamonds
    for q in 0..g.num_qubits() {
        let c: Vec<Point> = (0..4).map(|k| at(Corner::from_vertex(4 * q + k))).collect();
        let _ = writeln!(s, r##"<polygon points="{}" fill="#e8eef8" stroke="#7a8aa8" stroke-width="1"/>"##, poly(&c));
        let centre = view.map(g.qubits()[q].pos);
        let _ = writeln!(
            s,
            r##"<text x="{:.2}" y="{:.2}" font-size="10" text-anchor="middle" dominant-baseline="middle">{}</text>"##,
            centre.0,
            centre.1,
            g.qubit_id(q)
        );
    }
    if let Some(o) = &spec.orientation {
        for e in dg.edges() {
            let (from, to) = if o.points(&dg, e.a, e.b) == Some(true) { (e.a, e.b) } else { (e.b, e.a) };
            let (p, q) = (at(Corner::from_vertex(from)), at(Corner::from_vertex(to)));
            let m = ((p.0 + q.0) / 2.0, (p.1 + q.1) / 2.0);
            let colour = if e.kind == EdgeKind::Short { "#777" } else { "#444" };
            let _ = writeln!(
                s,
                r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{colour}" stroke-width="1" marker-end="url(#arrow)"/>"##,
                p.0,
                p.1,
                m.0,
                m.1
            );
        }
    }
    for hl in &spec.paths {
        match hl {
            Highlight::Wilson(p) => {
                let mut line: Vec<Point> = p.verts.iter().map(|&v| at(Corner::from_vertex(v))).collect();
                if p.is_loop {
                    line.push(line[0]);
                }
                let _ = writeln!(
                    s,
                    r##"<polyline points="{}" fill="none" stroke="#1f5fd6" stroke-width="3" stroke-dasharray="6 3"/>"##,
                    poly(&line)
                );
            }
            Highlight::Thooft(faces) => {
                if let Ok(tp) = ThooftPath::through(g, faces) {
                    let line: Vec<Point> = thooft_points(g, &tp).into_iter().map(|p| view.map(p)).collect();
                    let _ = writeln!(s, r##"<polyline points="{}" fill="none" stroke="#5f7f2f" stroke-width="3"/>"##, poly(&line));
                }
            }
        }
    }
    if spec.anyons {
        for c in g.unpaired() {
            let p = at(c);
            let _ = writeln!(s, r##"<circle cx="{:.2}" cy="{:.2}" r="5" fill="none" stroke="#d62020" stroke-width="2"/>"##, p.0, p.1);
        }
    }
    s.push_str("</svg>\n");
    s
}

fn poly(pts: &[Point]) -> String {
    pts.iter().map(|p| format!("{:.2},{:.2}", p.0, p.1)).collect::<Vec<_>>().join(" ")
}
