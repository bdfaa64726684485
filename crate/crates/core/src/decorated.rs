//! Majorana-diamond decoration of a surface graph, and directed paths on it.
//!
//! Vertex `4q + s` is the corner of qubit `q` at slot `s`. Short edges join
//! neighbouring corners of one diamond; link edges join the corners that an
//! edge of the surface graph connects.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::graph::{Corner, Slot, SurfaceGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    /// Intra-diamond edge.
    Short,
    /// Inter-diamond link.
    Link,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DEdge {
    pub a: usize,
    pub b: usize,
    pub kind: EdgeKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FaceKind {
    Diamond(usize),
    /// Expanded face of the surface graph (by its index there).
    Plaquette(usize),
}

/// A face as its vertex cycle, counter-clockwise for interior faces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DFace {
    pub verts: Vec<usize>,
    pub kind: FaceKind,
    pub outer: bool,
}

#[derive(Clone, Debug)]
pub struct DecoratedGraph {
    graph: SurfaceGraph,
    edges: Vec<DEdge>,
    /// Per vertex, indexed by [`DecoratedGraph::dir`]: edge towards the ccw
    /// corner, the cw corner and the link partner.
    edge_at: Vec<[usize; 3]>,
    faces: Vec<DFace>,
    /// Face on the left of each directed edge, indexed like `edge_at`.
    left_face: Vec<[usize; 3]>,
}

const NONE: usize = usize::MAX;

fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

impl DecoratedGraph {
    pub fn new(graph: &SurfaceGraph) -> DecoratedGraph {
        let nv = 4 * graph.num_qubits();
        let mut edges = Vec::new();
        let mut edge_at = vec![[NONE; 3]; nv];
        let mut push = |a: usize, b: usize, kind: EdgeKind, edges: &mut Vec<DEdge>| {
            let i = edges.len();
            edge_at[a][Self::dir_in(graph, a, b).unwrap()] = i;
            edge_at[b][Self::dir_in(graph, b, a).unwrap()] = i;
            let (a, b) = key(a, b);
            edges.push(DEdge { a, b, kind });
        };
        for q in 0..graph.num_qubits() {
            for s in Slot::ALL {
                let c = Corner::new(q, s);
                push(c.vertex(), c.ccw().vertex(), EdgeKind::Short, &mut edges);
            }
        }
        for (a, b) in graph.edges() {
            push(a.vertex(), b.vertex(), EdgeKind::Link, &mut edges);
        }

        let mut faces = Vec::new();
        for q in 0..graph.num_qubits() {
            faces.push(DFace {
                verts: Slot::ALL.iter().map(|&s| Corner::new(q, s).vertex()).collect(),
                kind: FaceKind::Diamond(q),
                outer: false,
            });
        }
        for (fi, f) in graph.faces().iter().enumerate() {
            let mut verts = Vec::new();
            for (i, &d) in f.darts.iter().enumerate() {
                let next = f.darts[(i + 1) % f.darts.len()];
                let mut c = graph.partner(d).unwrap();
                loop {
                    verts.push(c.vertex());
                    if c == next {
                        break;
                    }
                    c = c.cw();
                }
            }
            faces.push(DFace { verts, kind: FaceKind::Plaquette(fi), outer: f.outer });
        }
        let mut left_face = vec![[NONE; 3]; nv];
        for (fi, f) in faces.iter().enumerate() {
            let n = f.verts.len();
            for i in 0..n {
                let (a, b) = (f.verts[i], f.verts[(i + 1) % n]);
                left_face[a][Self::dir_in(graph, a, b).unwrap()] = fi;
            }
        }
        DecoratedGraph { graph: graph.clone(), edges, edge_at, faces, left_face }
    }

    pub fn graph(&self) -> &SurfaceGraph {
        &self.graph
    }

    pub fn num_vertices(&self) -> usize {
        4 * self.graph.num_qubits()
    }

    pub fn edges(&self) -> &[DEdge] {
        &self.edges
    }

    /// Which of the (at most three) edges at `a` leads to `b`.
    fn dir_in(graph: &SurfaceGraph, a: usize, b: usize) -> Option<usize> {
        let c = Corner::from_vertex(a);
        if c.qubit >= graph.num_qubits() || b >= 4 * graph.num_qubits() {
            None
        } else if c.ccw().vertex() == b {
            Some(0)
        } else if c.cw().vertex() == b {
            Some(1)
        } else if graph.partner(c).map(|t| t.vertex()) == Some(b) {
            Some(2)
        } else {
            None
        }
    }

    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        let d = Self::dir_in(&self.graph, a, b)?;
        Some(self.edge_at[a][d]).filter(|&e| e != NONE)
    }

    pub fn faces(&self) -> &[DFace] {
        &self.faces
    }

    pub fn left_face(&self, a: usize, b: usize) -> Option<usize> {
        let d = Self::dir_in(&self.graph, a, b)?;
        Some(self.left_face[a][d]).filter(|&f| f != NONE)
    }

    pub fn plaquette_face(&self, graph_face: usize) -> usize {
        self.graph.num_qubits() + graph_face
    }

    pub fn neighbours(&self, v: usize) -> Vec<usize> {
        let c = Corner::from_vertex(v);
        let mut out = vec![c.ccw().vertex(), c.cw().vertex()];
        if let Some(t) = self.graph.partner(c) {
            out.push(t.vertex());
        }
        out
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbours(v).len()
    }

    /// σ vertices: corners with only their two short edges.
    pub fn unpaired(&self) -> Vec<usize> {
        self.graph.unpaired().into_iter().map(Corner::vertex).collect()
    }

    pub fn vertex_label(&self, v: usize) -> String {
        self.graph.corner_label(Corner::from_vertex(v))
    }

    /// Faces strictly on the bounded side of a simple closed walk, together
    /// with whether the walk runs counter-clockwise around them.
    pub fn enclosed_faces(&self, verts: &[usize]) -> Result<(BTreeSet<usize>, bool)> {
        let n = verts.len();
        let loop_edges: BTreeSet<(usize, usize)> =
            (0..n).map(|i| key(verts[i], verts[(i + 1) % n])).collect();
        let flood = |seeds: Vec<usize>| -> BTreeSet<usize> {
            let mut seen: BTreeSet<usize> = seeds.iter().copied().collect();
            let mut stack = seeds;
            while let Some(f) = stack.pop() {
                let fv = &self.faces[f].verts;
                for i in 0..fv.len() {
                    let (a, b) = (fv[i], fv[(i + 1) % fv.len()]);
                    if loop_edges.contains(&key(a, b)) {
                        continue;
                    }
                    if let Some(g) = self.left_face(b, a) {
                        if seen.insert(g) {
                            stack.push(g);
                        }
                    }
                }
            }
            seen
        };
        let mut left = Vec::new();
        for i in 0..n {
            let f = self
                .left_face(verts[i], verts[(i + 1) % n])
                .ok_or_else(|| Error::InvalidPath(format!("no edge {}-{}", verts[i], verts[(i + 1) % n])))?;
            left.push(f);
        }
        let region = flood(left);
        let outer = self.faces.iter().position(|f| f.outer).unwrap();
        if !region.contains(&outer) {
            return Ok((region, true));
        }
        let mut right = Vec::new();
        for i in 0..n {
            right.push(self.left_face(verts[(i + 1) % n], verts[i]).unwrap());
        }
        let region = flood(right);
        if region.contains(&outer) {
            // both sides reach the outer face: not a simple separating loop
            return Err(Error::NonSimpleLoop);
        }
        Ok((region, false))
    }

    /// Vertices strictly inside a simple loop (on the bounded side).
    pub fn interior_vertices(&self, verts: &[usize]) -> Result<BTreeSet<usize>> {
        let on_loop: BTreeSet<usize> = verts.iter().copied().collect();
        if on_loop.len() != verts.len() {
            return Err(Error::NonSimpleLoop);
        }
        let (region, _) = self.enclosed_faces(verts)?;
        let mut inside = BTreeSet::new();
        for f in region {
            for &v in &self.faces[f].verts {
                if !on_loop.contains(&v) {
                    inside.insert(v);
                }
            }
        }
        Ok(inside)
    }
}

/// A directed walk on the decorated graph, stored as its vertex sequence.
/// Loops do not repeat the first vertex at the end.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DirectedPath {
    pub verts: Vec<usize>,
    pub is_loop: bool,
}

impl DirectedPath {
    pub fn open(verts: Vec<usize>) -> Self {
        DirectedPath { verts, is_loop: false }
    }

    pub fn closed(verts: Vec<usize>) -> Self {
        DirectedPath { verts, is_loop: true }
    }

    /// Directed edges `(from, to)` in travel order.
    pub fn steps(&self) -> Vec<(usize, usize)> {
        let n = self.verts.len();
        let mut out: Vec<(usize, usize)> = self.verts.windows(2).map(|w| (w[0], w[1])).collect();
        if self.is_loop && n > 1 {
            out.push((self.verts[n - 1], self.verts[0]));
        }
        out
    }

    pub fn len(&self) -> usize {
        self.steps().len()
    }

    pub fn is_empty(&self) -> bool {
        self.verts.is_empty()
    }

    pub fn first(&self) -> usize {
        self.verts[0]
    }

    pub fn last(&self) -> usize {
        *self.verts.last().unwrap()
    }

    /// Every step is an edge of `dg`.
    pub fn check_edges(&self, dg: &DecoratedGraph) -> Result<()> {
        if self.verts.is_empty() {
            return Err(Error::InvalidPath("empty path".into()));
        }
        for (a, b) in self.steps() {
            if dg.edge_between(a, b).is_none() {
                return Err(Error::InvalidPath(format!(
                    "{} and {} are not joined by an edge",
                    dg.vertex_label(a),
                    dg.vertex_label(b)
                )));
            }
        }
        Ok(())
    }

    fn is_short(a: usize, b: usize) -> bool {
        a / 4 == b / 4
    }

    /// Valid: an open path that starts and ends on short edges.
    pub fn is_valid(&self, dg: &DecoratedGraph) -> bool {
        if self.check_edges(dg).is_err() || self.is_loop || self.verts.len() < 2 {
            return false;
        }
        let n = self.verts.len();
        Self::is_short(self.verts[0], self.verts[1]) && Self::is_short(self.verts[n - 2], self.verts[n - 1])
    }

    /// Indices of vertices whose two incident path edges are both short.
    pub fn wedge_positions(&self) -> Vec<usize> {
        let n = self.verts.len();
        let mut out = Vec::new();
        for i in 0..n {
            let (prev, next) = if self.is_loop {
                (self.verts[(i + n - 1) % n], self.verts[(i + 1) % n])
            } else if i == 0 || i == n - 1 {
                continue;
            } else {
                (self.verts[i - 1], self.verts[i + 1])
            };
            if Self::is_short(prev, self.verts[i]) && Self::is_short(self.verts[i], next) {
                out.push(i);
            }
        }
        out
    }

    /// N_ll: number of vertices with two adjacent short edges.
    pub fn n_ll(&self) -> usize {
        self.wedge_positions().len()
    }

    /// Every wedge turns counter-clockwise around its diamond.
    pub fn is_canonical(&self) -> bool {
        let n = self.verts.len();
        self.wedge_positions().into_iter().all(|i| {
            let prev = if i == 0 { self.verts[n - 1] } else { self.verts[i - 1] };
            let next = self.verts[(i + 1) % n];
            let c = Corner::from_vertex(self.verts[i]);
            prev == c.cw().vertex() && next == c.ccw().vertex()
        })
    }

    pub fn reversed(&self) -> DirectedPath {
        let mut verts = self.verts.clone();
        verts.reverse();
        DirectedPath { verts, is_loop: self.is_loop }
    }

    /// Concatenate `other` (which must start where `self` ends), dropping
    /// immediate back-tracks at the joint.
    pub fn concat(&self, other: &DirectedPath) -> Result<DirectedPath> {
        if self.last() != other.first() {
            return Err(Error::InvalidPath("paths do not meet".into()));
        }
        let mut verts = self.verts.clone();
        for &v in &other.verts[1..] {
            let n = verts.len();
            if n >= 2 && verts[n - 2] == v {
                verts.pop();
            } else {
                verts.push(v);
            }
        }
        Ok(DirectedPath::open(verts))
    }

    /// Replace every diamond transit by its shortest counter-clockwise-wedge
    /// form; back-tracks over links are cancelled.
    pub fn canonicalized(&self) -> DirectedPath {
        assert!(!self.is_loop || self.verts.len() > 1);
        let mut verts: Vec<usize> = Vec::new();
        let src = if self.is_loop {
            // rotate so that the walk starts right after a link
            let n = self.verts.len();
            let start = (0..n)
                .find(|&i| !Self::is_short(self.verts[(i + n - 1) % n], self.verts[i]))
                .unwrap_or(0);
            let mut r: Vec<usize> = (0..n).map(|k| self.verts[(start + k) % n]).collect();
            if (0..n).all(|i| Self::is_short(self.verts[i], self.verts[(i + 1) % n])) {
                return self.clone();
            }
            r.push(r[0]);
            r
        } else {
            self.verts.clone()
        };
        let mut i = 0;
        while i < src.len() {
            let mut j = i;
            while j + 1 < src.len() && Self::is_short(src[j], src[j + 1]) {
                j += 1;
            }
            for v in transit(src[i], src[j]) {
                let n = verts.len();
                if n >= 2 && verts[n - 2] == v && !Self::is_short(verts[n - 1], v) {
                    verts.pop();
                } else {
                    verts.push(v);
                }
            }
            i = j + 1;
        }
        if self.is_loop {
            verts.pop();
        }
        DirectedPath { verts, is_loop: self.is_loop }
    }
}

/// Shortest route from corner `a` to corner `b` of one diamond whose wedge,
/// if any, turns counter-clockwise.
pub fn transit(a: usize, b: usize) -> Vec<usize> {
    let (ca, cb) = (Corner::from_vertex(a), Corner::from_vertex(b));
    debug_assert_eq!(ca.qubit, cb.qubit);
    match (cb.slot.index() + 4 - ca.slot.index()) % 4 {
        0 => vec![a],
        1 | 3 => vec![a, b],
        _ => vec![a, ca.ccw().vertex(), b],
    }
}

/// Lift a walk of the surface graph to its canonical decorated path.
///
/// `hops` are the darts taken in order (corner leaving each qubit). For open
/// paths `start`/`end` are the corners the path begins and ends on; when
/// omitted the path uses a single short edge at each end.
pub fn lift_canonical(
    graph: &SurfaceGraph,
    hops: &[Corner],
    start: Option<Slot>,
    end: Option<Slot>,
    is_loop: bool,
) -> Result<DirectedPath> {
    if hops.is_empty() {
        return Err(Error::InvalidPath("empty walk".into()));
    }
    let mut arrivals = Vec::with_capacity(hops.len());
    for (i, &h) in hops.iter().enumerate() {
        let t = graph.partner(h).ok_or(Error::SlotMissing(graph.qubit_id(h.qubit)))?;
        if i + 1 < hops.len() && t.qubit != hops[i + 1].qubit {
            return Err(Error::InvalidPath("hops are not consecutive".into()));
        }
        arrivals.push(t);
    }
    if is_loop && arrivals.last().unwrap().qubit != hops[0].qubit {
        return Err(Error::NotALoop);
    }
    let mut verts = Vec::new();
    if is_loop {
        for i in 0..hops.len() {
            let entry = arrivals[(i + hops.len() - 1) % hops.len()];
            verts.extend(transit(entry.vertex(), hops[i].vertex()));
        }
    } else {
        let first = hops[0];
        let s = Corner::new(first.qubit, start.unwrap_or(first.slot.cw()));
        if s == first {
            return Err(Error::InvalidPath("path must start on a short edge".into()));
        }
        verts.extend(transit(s.vertex(), first.vertex()));
        for i in 1..hops.len() {
            verts.extend(transit(arrivals[i - 1].vertex(), hops[i].vertex()));
        }
        let last = *arrivals.last().unwrap();
        let e = Corner::new(last.qubit, end.unwrap_or(last.slot.ccw()));
        if e == last {
            return Err(Error::InvalidPath("path must end on a short edge".into()));
        }
        verts.extend(transit(last.vertex(), e.vertex()));
    }
    Ok(DirectedPath { verts, is_loop })
}

/// Darts of a surface-graph walk through the given qubit ids (first matching
/// slot when two qubits share several edges).
pub fn hops_from_qubits(graph: &SurfaceGraph, ids: &[u32], is_loop: bool) -> Result<Vec<Corner>> {
    let idx = ids.iter().map(|&i| graph.qubit_index(i)).collect::<Result<Vec<_>>>()?;
    let count = if is_loop { idx.len() } else { idx.len().saturating_sub(1) };
    (0..count)
        .map(|i| {
            let (a, b) = (idx[i], idx[(i + 1) % idx.len()]);
            Slot::ALL
                .iter()
                .map(|&s| Corner::new(a, s))
                .find(|&c| graph.partner(c).map(|t| t.qubit) == Some(b))
                .ok_or(Error::SlotMissing(graph.qubit_id(a)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::lattices;

    #[test]
    fn square_decoration_counts() {
        let g = SurfaceGraph::build(&lattices::grid(2, 2)).unwrap();
        let dg = DecoratedGraph::new(&g);
        assert_eq!(dg.num_vertices(), 16);
        let shorts = dg.edges().iter().filter(|e| e.kind == EdgeKind::Short).count();
        let links = dg.edges().iter().filter(|e| e.kind == EdgeKind::Link).count();
        assert_eq!((shorts, links), (16, 4));
        assert_eq!(dg.unpaired().len(), 8);
        assert_eq!(dg.unpaired().len(), g.count_sigma());
        // every vertex has two short edges and at most one link
        for v in 0..dg.num_vertices() {
            let d = dg.degree(v);
            assert!(d == 2 || d == 3);
            assert_eq!(d == 2, dg.unpaired().contains(&v));
        }
        // Euler on the decorated graph
        let chi = dg.num_vertices() as i64 - dg.edges().len() as i64 + dg.faces().len() as i64;
        assert_eq!(chi, 2);
    }

    #[test]
    fn surface_code_unpaired_at_corners() {
        let g = SurfaceGraph::build(&lattices::surface_code(5, 5)).unwrap();
        let dg = DecoratedGraph::new(&g);
        let qubits: Vec<u32> = dg.unpaired().iter().map(|&v| g.qubit_id(v / 4)).collect();
        assert_eq!(qubits, vec![0, 4, 20, 24]);
    }

    #[test]
    fn two_qubit_lift_is_short_link_short() {
        let g = SurfaceGraph::build(&lattices::grid(2, 2)).unwrap();
        let hops = hops_from_qubits(&g, &[0, 1], false).unwrap();
        let p = lift_canonical(&g, &hops, None, None, false).unwrap();
        let dg = DecoratedGraph::new(&g);
        assert_eq!(p.len(), 3);
        assert!(p.is_valid(&dg));
        assert!(p.is_canonical());
        assert_eq!(p.n_ll(), 0);
    }

    #[test]
    fn straight_transit_gets_a_ccw_wedge() {
        let g = SurfaceGraph::build(&lattices::strip(5)).unwrap();
        let hops = hops_from_qubits(&g, &[0, 1, 2], false).unwrap();
        let p = lift_canonical(&g, &hops, None, None, false).unwrap();
        assert_eq!(p.n_ll(), 1);
        assert!(p.is_canonical());
        let mid = p.verts[p.wedge_positions()[0]];
        // passing west to east, the wedge turns through the south corner
        assert_eq!(Corner::from_vertex(mid).slot, Slot::S);
    }

    #[test]
    fn plaquette_loop_encloses_nothing() {
        let g = SurfaceGraph::build(&lattices::grid(2, 2)).unwrap();
        let dg = DecoratedGraph::new(&g);
        let (fi, _) = g.interior_faces().next().unwrap();
        let face = &dg.faces()[dg.plaquette_face(fi)];
        let inside = dg.interior_vertices(&face.verts).unwrap();
        assert!(inside.is_empty());
        let (_, ccw) = dg.enclosed_faces(&face.verts).unwrap();
        assert!(ccw);
    }

    #[test]
    fn canonicalize_flips_cw_wedge() {
        let g = SurfaceGraph::build(&lattices::grid(2, 2)).unwrap();
        let q = 0;
        let p = DirectedPath::open(vec![
            Corner::new(q, Slot::W).vertex(),
            Corner::new(q, Slot::N).vertex(),
            Corner::new(q, Slot::E).vertex(),
        ]);
        assert!(!p.is_canonical());
        let c = p.canonicalized();
        assert!(c.is_canonical());
        assert_eq!(c.verts[1], Corner::new(q, Slot::S).vertex());
        let _ = g;
    }
}
