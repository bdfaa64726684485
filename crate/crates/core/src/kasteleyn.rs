//! Kasteleyn orientations of the decorated graph and the sign calculus of
//! directed paths.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::decorated::{transit, DecoratedGraph, DirectedPath, FaceKind};
use crate::error::{Error, Result};
use crate::graph::Corner;

/// One arrow per decorated edge: `true` points from the smaller vertex id to
/// the larger.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Orientation {
    pub forward: Vec<bool>,
}

impl Orientation {
    /// Whether the arrow on edge `a`–`b` points from `a` to `b`.
    pub fn points(&self, dg: &DecoratedGraph, a: usize, b: usize) -> Option<bool> {
        let e = dg.edge_between(a, b)?;
        Some(self.forward[e] == (a < b))
    }

    /// Text dump, one `arrow <from> <to>` line per edge.
    pub fn to_text(&self, dg: &DecoratedGraph) -> String {
        let mut out = String::new();
        for (e, edge) in dg.edges().iter().enumerate() {
            let (f, t) = if self.forward[e] { (edge.a, edge.b) } else { (edge.b, edge.a) };
            out.push_str(&format!("arrow {} {}\n", dg.vertex_label(f), dg.vertex_label(t)));
        }
        out
    }

    /// Read a dump written by [`Orientation::to_text`]. Every edge must
    /// appear exactly once.
    pub fn from_text(dg: &DecoratedGraph, text: &str) -> Result<Orientation> {
        let g = dg.graph();
        let mut set: Vec<Option<bool>> = vec![None; dg.edges().len()];
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: String| Error::Parse { line: i + 1, msg };
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 3 || toks[0] != "arrow" {
                return Err(bad(format!("expected 'arrow <from> <to>', got '{line}'")));
            }
            let (a, b) = (g.parse_corner(toks[1])?.vertex(), g.parse_corner(toks[2])?.vertex());
            let e = dg.edge_between(a, b).ok_or_else(|| bad(format!("no edge {} {}", toks[1], toks[2])))?;
            if set[e].replace(a < b).is_some() {
                return Err(bad(format!("edge {} {} listed twice", toks[1], toks[2])));
            }
        }
        let forward = set
            .into_iter()
            .enumerate()
            .map(|(e, s)| {
                let edge = dg.edges()[e];
                s.ok_or_else(|| {
                    Error::Parse { line: 0, msg: format!("edge {} {} missing", dg.vertex_label(edge.a), dg.vertex_label(edge.b)) }
                })
            })
            .collect::<Result<Vec<bool>>>()?;
        Ok(Orientation { forward })
    }
}

fn find_root(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Build an orientation from a spanning tree chosen by the given edge order:
/// tree edges keep `tree_dirs`, the rest are fixed face by face from the
/// leaves of the dual tree inward to the outer face.
fn solve(dg: &DecoratedGraph, order: &[usize], tree_dirs: impl Fn(usize) -> bool) -> Orientation {
    let n = dg.num_vertices();
    let mut parent: Vec<usize> = (0..n).collect();
    let mut set: Vec<Option<bool>> = vec![None; dg.edges().len()];
    for &e in order {
        let edge = dg.edges()[e];
        let (ra, rb) = (find_root(&mut parent, edge.a), find_root(&mut parent, edge.b));
        if ra != rb {
            parent[ra] = rb;
            set[e] = Some(tree_dirs(e));
        }
    }
    let faces = dg.faces();
    let face_edges: Vec<Vec<usize>> = faces
        .iter()
        .map(|f| {
            let m = f.verts.len();
            (0..m).map(|i| dg.edge_between(f.verts[i], f.verts[(i + 1) % m]).unwrap()).collect()
        })
        .collect();
    let mut unset: Vec<usize> =
        face_edges.iter().map(|es| es.iter().filter(|&&e| set[e].is_none()).count()).collect();
    let mut stack: Vec<usize> =
        (0..faces.len()).filter(|&f| !faces[f].outer && unset[f] == 1).collect();
    while let Some(f) = stack.pop() {
        if unset[f] != 1 {
            continue;
        }
        let m = faces[f].verts.len();
        let mut cw = 0;
        let mut free = None;
        for i in 0..m {
            let (a, b) = (faces[f].verts[i], faces[f].verts[(i + 1) % m]);
            let e = face_edges[f][i];
            match set[e] {
                None => free = Some((e, a, b)),
                Some(fwd) => {
                    if fwd != (a < b) {
                        cw += 1;
                    }
                }
            }
        }
        let (e, a, b) = free.unwrap();
        // the free edge must be clockwise exactly when the rest is even
        let want_cw = cw % 2 == 0;
        set[e] = Some((a < b) != want_cw);
        for (g, es) in face_edges.iter().enumerate() {
            if es.contains(&e) {
                unset[g] -= es.iter().filter(|&&x| x == e).count();
                if g != f && !faces[g].outer && unset[g] == 1 {
                    stack.push(g);
                }
            }
        }
    }
    Orientation { forward: set.into_iter().map(|s| s.expect("dual tree covers every edge")).collect() }
}

/// A Kasteleyn orientation: every interior face has an odd number of
/// clockwise arrows.
pub fn find_kasteleyn(dg: &DecoratedGraph) -> Orientation {
    let order: Vec<usize> = (0..dg.edges().len()).collect();
    solve(dg, &order, |_| true)
}

/// A Kasteleyn orientation from a random spanning tree with random arrows.
pub fn random_kasteleyn<R: Rng>(dg: &DecoratedGraph, rng: &mut R) -> Orientation {
    let mut order: Vec<usize> = (0..dg.edges().len()).collect();
    order.shuffle(rng);
    let dirs: Vec<bool> = (0..dg.edges().len()).map(|_| rng.gen()).collect();
    solve(dg, &order, |e| dirs[e])
}

/// Interior faces violating the Kasteleyn condition.
pub fn kasteleyn_violations(dg: &DecoratedGraph, o: &Orientation) -> Vec<usize> {
    dg.faces()
        .iter()
        .enumerate()
        .filter(|(_, f)| !f.outer)
        .filter(|(_, f)| {
            let m = f.verts.len();
            let cw = (0..m)
                .filter(|&i| o.points(dg, f.verts[i], f.verts[(i + 1) % m]) == Some(false))
                .count();
            cw % 2 == 0
        })
        .map(|(i, _)| i)
        .collect()
}

pub fn is_kasteleyn(dg: &DecoratedGraph, o: &Orientation) -> bool {
    kasteleyn_violations(dg, o).is_empty()
}

/// Flip every arrow touching vertex `v`.
pub fn gauge(dg: &DecoratedGraph, o: &Orientation, v: usize) -> Orientation {
    let mut out = o.clone();
    for w in dg.neighbours(v) {
        let e = dg.edge_between(v, w).unwrap();
        out.forward[e] = !out.forward[e];
    }
    out
}

/// Product over the path's steps of +1 (arrow along travel) or −1.
pub fn wk(dg: &DecoratedGraph, path: &DirectedPath, o: &Orientation) -> Result<i32> {
    let mut sign = 1;
    for (a, b) in path.steps() {
        match o.points(dg, a, b) {
            Some(true) => {}
            Some(false) => sign = -sign,
            None => return Err(Error::InvalidPath(format!("no edge {a}-{b}"))),
        }
    }
    Ok(sign)
}

fn parity(n: usize) -> i32 {
    if n % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Ratio wk(r1)/wk(r2) for two walks between the same corners of one
/// diamond; holds for every Kasteleyn orientation.
pub fn diamond_route_ratio(r1: &[usize], r2: &[usize]) -> i32 {
    let stats = |r: &[usize]| {
        let mut net = 0i64;
        let mut cw = 0usize;
        for w in r.windows(2) {
            let (a, b) = (Corner::from_vertex(w[0]), Corner::from_vertex(w[1]));
            if a.ccw() == b {
                net += 1;
            } else {
                net -= 1;
                cw += 1;
            }
        }
        (net, cw)
    };
    let (n1, c1) = stats(r1);
    let (n2, c2) = stats(r2);
    let winding = (n1 - n2) / 4;
    parity(winding.unsigned_abs() as usize + c1 + c2)
}

/// Cancel back-tracks and replace every diamond transit by its canonical
/// form. Returns the reduced path and the ratio wk(reduced)/wk(input).
pub fn reduce(path: &DirectedPath) -> (DirectedPath, i32) {
    let mut sign = 1;
    let mut verts = path.verts.clone();
    if path.is_loop {
        verts = rotate_after_link(&verts);
    }
    loop {
        let mut changed = false;
        // back-tracks
        let mut out: Vec<usize> = Vec::with_capacity(verts.len());
        for &v in &verts {
            let n = out.len();
            if n >= 2 && out[n - 2] == v {
                out.pop();
                sign = -sign;
                changed = true;
            } else {
                out.push(v);
            }
        }
        if path.is_loop {
            while out.len() >= 3 && out[1] == *out.last().unwrap() {
                // a → b … b → a → b: drop the turn-around at the seam
                out.remove(0);
                out.pop();
                sign = -sign;
                changed = true;
            }
            if out.len() == 2 {
                out.pop();
                sign = -sign;
                changed = true;
            }
            if out.len() >= 2 && out[0] == *out.last().unwrap() {
                out.pop();
                changed = true;
            }
            out = rotate_after_link(&out);
        }
        verts = out;
        // transits
        let all_short = verts.len() > 1
            && (0..verts.len()).all(|i| verts[i] / 4 == verts[(i + 1) % verts.len()] / 4);
        if !(path.is_loop && all_short) {
            let mut out = Vec::with_capacity(verts.len());
            let mut i = 0;
            while i < verts.len() {
                let mut j = i;
                while j + 1 < verts.len() && verts[j] / 4 == verts[j + 1] / 4 {
                    j += 1;
                }
                let run = &verts[i..=j];
                let canon = transit(run[0], run[run.len() - 1]);
                if canon != run {
                    sign *= diamond_route_ratio(&canon, run);
                    changed = true;
                }
                out.extend(canon);
                i = j + 1;
            }
            verts = out;
        }
        if !changed {
            break;
        }
    }
    (DirectedPath { verts, is_loop: path.is_loop }, sign)
}

fn rotate_after_link(verts: &[usize]) -> Vec<usize> {
    let n = verts.len();
    match (0..n).find(|&i| verts[(i + n - 1) % n] / 4 != verts[i] / 4) {
        Some(s) => (0..n).map(|k| verts[(s + k) % n]).collect(),
        None => verts.to_vec(),
    }
}

/// Result of reversing a path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reversal {
    pub naive: DirectedPath,
    /// wk(naive)/wk(original).
    pub naive_sign: i32,
    pub canonical: DirectedPath,
    /// wk(canonical)/wk(original).
    pub canonical_sign: i32,
}

pub fn reverse(path: &DirectedPath) -> Reversal {
    let naive = path.reversed();
    let naive_sign = parity(path.len());
    let (canonical, s) = reduce(&naive);
    Reversal { naive, naive_sign, canonical, canonical_sign: naive_sign * s }
}

/// Replace `path.verts[start..=end]`, which must run along the boundary of
/// interior face `face`, by the other way around that face. Returns the new
/// path and wk(new)/wk(old).
pub fn deform_face(
    dg: &DecoratedGraph,
    path: &DirectedPath,
    face: usize,
    start: usize,
    end: usize,
) -> Result<(DirectedPath, i32)> {
    let f = dg.faces().get(face).ok_or(Error::SegmentNotOnFace)?;
    if f.outer || start >= end || end >= path.verts.len() {
        return Err(Error::SegmentNotOnFace);
    }
    let m = f.verts.len();
    let seg = &path.verts[start..=end];
    let pos = |v: usize| f.verts.iter().position(|&x| x == v);
    let p0 = pos(seg[0]).ok_or(Error::SegmentNotOnFace)?;
    let ccw = seg.len() > 1 && pos(seg[1]) == Some((p0 + 1) % m);
    let step = |p: usize| if ccw { (p + 1) % m } else { (p + m - 1) % m };
    let mut p = p0;
    for &v in &seg[1..] {
        p = step(p);
        if f.verts[p] != v {
            return Err(Error::SegmentNotOnFace);
        }
    }
    if seg.len() > m {
        return Err(Error::SegmentNotOnFace);
    }
    // the complement runs the other way from seg[0] to the segment's end
    let back = |p: usize| if ccw { (p + m - 1) % m } else { (p + 1) % m };
    let mut comp = vec![seg[0]];
    let mut p = p0;
    let target = *seg.last().unwrap();
    loop {
        p = back(p);
        comp.push(f.verts[p]);
        if f.verts[p] == target {
            break;
        }
    }
    let cw_verts = if ccw { comp.len() } else { seg.len() };
    let mut verts = path.verts[..start].to_vec();
    verts.extend(&comp);
    verts.extend(&path.verts[end + 1..]);
    Ok((DirectedPath { verts, is_loop: path.is_loop }, parity(cw_verts)))
}

/// Number of σ vertices strictly inside a simple loop.
pub fn enclosed_sigma(dg: &DecoratedGraph, lp: &DirectedPath) -> Result<usize> {
    if !lp.is_loop {
        return Err(Error::NotALoop);
    }
    lp.check_edges(dg)?;
    let inside = dg.interior_vertices(&lp.verts)?;
    let unpaired: BTreeSet<usize> = dg.unpaired().into_iter().collect();
    Ok(inside.intersection(&unpaired).count())
}

/// wk of a simple closed loop, from its geometry alone: reversed to run
/// counter-clockwise, reduced to canonical form, then −(−1)^{N_σ}.
pub fn loop_sign(dg: &DecoratedGraph, lp: &DirectedPath) -> Result<i32> {
    lp.check_edges(dg)?;
    let (_, ccw) = dg.enclosed_faces(&lp.verts)?;
    if !ccw {
        let r = lp.reversed();
        return Ok(parity(lp.len()) * loop_sign(dg, &r)?);
    }
    let (c, s) = reduce(lp);
    let (_, still_ccw) = dg.enclosed_faces(&c.verts)?;
    if !still_ccw {
        return Err(Error::NonSimpleLoop);
    }
    Ok(s * -parity(enclosed_sigma(dg, &c)?))
}

/// wk(γ)·wk(γ′) for two open paths with the same endpoints, computed by
/// splitting γ ∘ γ′⁻¹ into simple loops and counting enclosed σ vertices.
pub fn line_ratio(dg: &DecoratedGraph, g1: &DirectedPath, g2: &DirectedPath) -> Result<i32> {
    g1.check_edges(dg)?;
    g2.check_edges(dg)?;
    if g1.first() != g2.first() || g1.last() != g2.last() {
        return Err(Error::InvalidPath("paths must share both endpoints".into()));
    }
    let (a, b) = (&g1.verts, &g2.verts);
    let (mut i, mut j) = (0, 0);
    let mut ratio = 1;
    loop {
        while i + 1 < a.len() && j + 1 < b.len() && a[i + 1] == b[j + 1] {
            i += 1;
            j += 1;
        }
        if i + 1 == a.len() && j + 1 == b.len() {
            return Ok(ratio);
        }
        let mut rejoin = None;
        for k in i + 1..a.len() {
            if let Some(l) = (j + 1..b.len()).find(|&l| b[l] == a[k]) {
                rejoin = Some((k, l));
                break;
            }
        }
        let (k, l) = rejoin.ok_or(Error::NonSimpleLoop)?;
        let mut lp = a[i..=k].to_vec();
        lp.extend(b[j + 1..l].iter().rev());
        let seg2_len = l - j;
        ratio *= parity(seg2_len) * loop_sign(dg, &DirectedPath::closed(lp))?;
        i = k;
        j = l;
    }
}

/// Canonical ccw boundary loop of an interior plaquette.
pub fn plaquette_loop(dg: &DecoratedGraph, graph_face: usize) -> DirectedPath {
    let f = &dg.faces()[dg.plaquette_face(graph_face)];
    debug_assert!(matches!(f.kind, FaceKind::Plaquette(_)));
    DirectedPath::closed(f.verts.clone())
}
