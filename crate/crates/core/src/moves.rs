//! Elementary anyon moves and the bookkeeping of Wilson lines they drag along.

use crate::compile::{compile_line, make_rotation, PauliRotation, RotSign};
use crate::decorated::{DecoratedGraph, DirectedPath};
use crate::error::{Error, Result};
use crate::graph::{Corner, SurfaceGraph};
use crate::kasteleyn::reduce;

/// One rewiring step: the unpaired corner `anyon` takes over the link of
/// `target`, which becomes unpaired.
#[derive(Clone, Debug)]
pub struct ElementaryMove {
    pub anyon: Corner,
    pub target: Corner,
    /// Former partner of `target`, linked to `anyon` afterwards.
    pub partner: Corner,
    /// Path from `anyon` to `target` inside their shared plaquette.
    pub path: DirectedPath,
    /// Whether `path` runs counter-clockwise about the plaquette.
    pub ccw: bool,
    pub rotation: PauliRotation,
    pub graph_after: SurfaceGraph,
}

/// Plan the move of the σ at `anyon` onto the paired corner `target`.
/// `composite` marks an anyon carrying stabilizer flux, which moves with the
/// opposite rotation sign.
pub fn elementary_move(
    graph: &SurfaceGraph,
    dg: &DecoratedGraph,
    anyon: Corner,
    target: Corner,
    composite: bool,
) -> Result<ElementaryMove> {
    if graph.is_paired(anyon) {
        return Err(Error::NotUnpaired(graph.corner_label(anyon)));
    }
    let partner = graph
        .partner(target)
        .ok_or_else(|| Error::LinkAbsent(graph.corner_label(target)))?;
    let face = graph.face_of_corner(anyon);
    let no_share = || Error::NoSharedPlaquette(graph.corner_label(anyon), graph.corner_label(target));
    if graph.faces()[face].outer {
        return Err(no_share());
    }
    let cyc = &dg.faces()[dg.plaquette_face(face)].verts;
    let m = cyc.len();
    let pos = |v: usize| cyc.iter().position(|&x| x == v);
    let (pa, pt) = (pos(anyon.vertex()).ok_or_else(no_share)?, pos(target.vertex()).ok_or_else(no_share)?);
    let pp = pos(partner.vertex()).ok_or_else(no_share)?;
    // walk the way that reaches target before its partner
    let fwd = (pt + m - pa) % m < (pp + m - pa) % m;
    let mut verts = vec![anyon.vertex()];
    let mut k = pa;
    while k != pt {
        k = if fwd { (k + 1) % m } else { (k + m - 1) % m };
        verts.push(cyc[k]);
    }
    let path = DirectedPath::open(verts);
    let axis = compile_line(dg, &path)?;
    let base = if fwd {
        RotSign::Minus
    } else if path.n_ll() % 2 == 0 {
        RotSign::Plus
    } else {
        RotSign::Minus
    };
    let sign = if composite { base.flipped() } else { base };
    let graph_after = graph.rewire(anyon, target)?;
    Ok(ElementaryMove {
        anyon,
        target,
        partner,
        path,
        ccw: fwd,
        rotation: make_rotation(axis, sign)?,
        graph_after,
    })
}

/// Every move available to the σ at `anyon`.
pub fn available_moves(graph: &SurfaceGraph, dg: &DecoratedGraph, anyon: Corner, composite: bool) -> Vec<ElementaryMove> {
    let face = graph.face_of_corner(anyon);
    if graph.faces()[face].outer {
        return Vec::new();
    }
    let mut out = Vec::new();
    for &v in &dg.faces()[dg.plaquette_face(face)].verts {
        let c = Corner::from_vertex(v);
        if c != anyon && graph.is_paired(c) {
            if let Ok(m) = elementary_move(graph, dg, anyon, c, composite) {
                out.push(m);
            }
        }
    }
    out
}

/// Extend a line ending (or starting) at a moved anyon by the move path and
/// reduce it to canonical form. Returns the new path and the sign relating
/// the two reduced operators, wk(reduced)/wk(raw).
pub fn extend_line(line: &DirectedPath, mv: &ElementaryMove) -> Result<(DirectedPath, i32)> {
    let a = mv.anyon.vertex();
    // a step over the rewired link now goes through the new link and the move path
    let (t, p) = (mv.target.vertex(), mv.partner.vertex());
    let mut verts = vec![line.verts[0]];
    for (x, y) in line.steps() {
        if (x, y) == (p, t) {
            verts.extend(&mv.path.verts);
        } else if (x, y) == (t, p) {
            verts.extend(mv.path.verts.iter().rev().skip(1));
            verts.push(p);
        } else {
            verts.push(y);
        }
    }
    let line = &DirectedPath::open(verts);
    let raw = if line.last() == a {
        line.concat(&mv.path)?
    } else if line.first() == a {
        mv.path.reversed().concat(line)?
    } else {
        return Err(Error::EndpointMismatch(format!("line does not end at vertex {a}")));
    };
    let (p, s) = reduce(&raw);
    Ok((p, s))
}
