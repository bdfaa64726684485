//! Surface graphs of qubits with degree 2, 3 or 4.
//!
//! Each qubit owns four compass slots (E, N, W, S in counter-clockwise order).
//! An edge occupies one slot at each endpoint, so the slot table is the rotation
//! system of the embedding. Slots are derived from the drawn geometry when a
//! graph is read from a file; deformations then rewire slots directly and the
//! geometry is kept only for drawing.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub type QubitId = u32;
pub type Point = (f64, f64);

/// Compass slot of a qubit; the discriminant increases counter-clockwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    E = 0,
    N = 1,
    W = 2,
    S = 3,
}

impl Slot {
    pub const ALL: [Slot; 4] = [Slot::E, Slot::N, Slot::W, Slot::S];

    pub fn from_index(i: usize) -> Slot {
        Self::ALL[i % 4]
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// Next slot counter-clockwise.
    pub fn ccw(self) -> Slot {
        Slot::from_index(self.index() + 1)
    }

    pub fn cw(self) -> Slot {
        Slot::from_index(self.index() + 3)
    }

    pub fn opposite(self) -> Slot {
        Slot::from_index(self.index() + 2)
    }

    pub fn dir(self) -> Point {
        match self {
            Slot::E => (1.0, 0.0),
            Slot::N => (0.0, 1.0),
            Slot::W => (-1.0, 0.0),
            Slot::S => (0.0, -1.0),
        }
    }

    /// Quantize a direction to the nearest compass slot.
    pub fn from_angle(angle: f64) -> Slot {
        let quarter = (angle / std::f64::consts::FRAC_PI_2).round() as i64;
        Slot::from_index(quarter.rem_euclid(4) as usize)
    }

    pub fn as_char(self) -> char {
        match self {
            Slot::E => 'E',
            Slot::N => 'N',
            Slot::W => 'W',
            Slot::S => 'S',
        }
    }
}

impl FromStr for Slot {
    type Err = Error;
    fn from_str(s: &str) -> Result<Slot> {
        match s {
            "E" => Ok(Slot::E),
            "N" => Ok(Slot::N),
            "W" => Ok(Slot::W),
            "S" => Ok(Slot::S),
            _ => Err(Error::Parse { line: 0, msg: format!("bad slot {s:?}") }),
        }
    }
}

/// A Majorana corner of a qubit's diamond, addressed by dense qubit index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Corner {
    pub qubit: usize,
    pub slot: Slot,
}

impl Corner {
    pub fn new(qubit: usize, slot: Slot) -> Corner {
        Corner { qubit, slot }
    }

    /// Dense vertex index in the decorated graph.
    pub fn vertex(self) -> usize {
        4 * self.qubit + self.slot.index()
    }

    pub fn from_vertex(v: usize) -> Corner {
        Corner { qubit: v / 4, slot: Slot::from_index(v % 4) }
    }

    pub fn ccw(self) -> Corner {
        Corner { qubit: self.qubit, slot: self.slot.ccw() }
    }

    pub fn cw(self) -> Corner {
        Corner { qubit: self.qubit, slot: self.slot.cw() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Qubit {
    pub id: QubitId,
    pub pos: Point,
}

/// Face of the surface graph, as the cyclic list of darts with the face on
/// their left. A dart is the corner an edge leaves from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub darts: Vec<Corner>,
    pub outer: bool,
}

#[derive(Clone, Debug)]
pub struct SurfaceGraph {
    qubits: Arc<Vec<Qubit>>,
    index: Arc<HashMap<QubitId, usize>>,
    links: Vec<[Option<Corner>; 4]>,
    /// Interior polyline points of edges, keyed by the ordered corner pair.
    bends: BTreeMap<(Corner, Corner), Vec<Point>>,
    faces: Vec<Face>,
    /// Face index of each linked dart, by corner vertex.
    dart_face: Vec<usize>,
    corner_radius: f64,
}

impl PartialEq for SurfaceGraph {
    /// Structural equality: same qubits and the same slot wiring.
    fn eq(&self, other: &Self) -> bool {
        self.qubits.len() == other.qubits.len()
            && self.qubits.iter().zip(other.qubits.iter()).all(|(a, b)| a.id == b.id)
            && self.links == other.links
    }
}

/// Input description for [`SurfaceGraph::build`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GraphSpec {
    pub qubits: Vec<(QubitId, Point)>,
    pub edges: Vec<EdgeSpec>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EdgeSpec {
    pub a: QubitId,
    pub b: QubitId,
    pub via: Vec<Point>,
    /// Explicit slots override the geometric quantization.
    pub slots: Option<(Slot, Slot)>,
}

impl EdgeSpec {
    pub fn straight(a: QubitId, b: QubitId) -> Self {
        EdgeSpec { a, b, via: Vec::new(), slots: None }
    }
}

fn ordered(a: Corner, b: Corner) -> (Corner, Corner) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

fn on_segment(p: Point, a: Point, b: Point) -> bool {
    cross(a, b, p).abs() < 1e-12
        && p.0 >= a.0.min(b.0) - 1e-12
        && p.0 <= a.0.max(b.0) + 1e-12
        && p.1 >= a.1.min(b.1) - 1e-12
        && p.1 <= a.1.max(b.1) + 1e-12
}

fn segments_cross(a: Point, b: Point, c: Point, d: Point) -> bool {
    let d1 = cross(c, d, a);
    let d2 = cross(c, d, b);
    let d3 = cross(a, b, c);
    let d4 = cross(a, b, d);
    if ((d1 > 1e-12 && d2 < -1e-12) || (d1 < -1e-12 && d2 > 1e-12))
        && ((d3 > 1e-12 && d4 < -1e-12) || (d3 < -1e-12 && d4 > 1e-12))
    {
        return true;
    }
    false
}

fn signed_area(points: &[Point]) -> f64 {
    let n = points.len();
    (0..n)
        .map(|i| {
            let (a, b) = (points[i], points[(i + 1) % n]);
            a.0 * b.1 - b.0 * a.1
        })
        .sum::<f64>()
        / 2.0
}

impl SurfaceGraph {
    pub fn build(spec: &GraphSpec) -> Result<SurfaceGraph> {
        let mut sorted = spec.qubits.clone();
        sorted.sort_by_key(|q| q.0);
        let mut index = HashMap::new();
        let mut qubits = Vec::with_capacity(sorted.len());
        for (i, &(id, pos)) in sorted.iter().enumerate() {
            if index.insert(id, i).is_some() {
                return Err(Error::DuplicateQubit(id));
            }
            qubits.push(Qubit { id, pos });
        }
        let mut min_dist = f64::INFINITY;
        for i in 0..qubits.len() {
            for j in i + 1..qubits.len() {
                let (a, b) = (qubits[i].pos, qubits[j].pos);
                let d = ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt();
                if d < 1e-12 {
                    return Err(Error::DuplicatePosition(qubits[i].id, qubits[j].id));
                }
                min_dist = min_dist.min(d);
            }
        }
        let lookup = |id: QubitId| index.get(&id).copied().ok_or(Error::UnknownQubit(id));

        // Degree check comes first so that degree-5 vertices are reported as such.
        let mut degree = vec![0usize; qubits.len()];
        for e in &spec.edges {
            let (a, b) = (lookup(e.a)?, lookup(e.b)?);
            if a == b {
                return Err(Error::Parse { line: 0, msg: format!("self-loop at qubit {}", e.a) });
            }
            degree[a] += 1;
            degree[b] += 1;
        }
        for (i, &d) in degree.iter().enumerate() {
            if !(2..=4).contains(&d) {
                return Err(Error::BadDegree { qubit: qubits[i].id, degree: d });
            }
        }

        let mut angles: Vec<Vec<f64>> = vec![Vec::new(); qubits.len()];
        let mut links = vec![[None; 4]; qubits.len()];
        let mut bends = BTreeMap::new();
        let mut polylines = Vec::new();
        for e in &spec.edges {
            let (a, b) = (lookup(e.a)?, lookup(e.b)?);
            let mut pts = vec![qubits[a].pos];
            pts.extend(e.via.iter().copied());
            pts.push(qubits[b].pos);
            let (sa, sb) = match e.slots {
                Some(s) => s,
                None => {
                    let ang_a = (pts[1].1 - pts[0].1).atan2(pts[1].0 - pts[0].0);
                    let k = pts.len();
                    let ang_b = (pts[k - 2].1 - pts[k - 1].1).atan2(pts[k - 2].0 - pts[k - 1].0);
                    for (q, ang) in [(a, ang_a), (b, ang_b)] {
                        if angles[q].iter().any(|&x| (x - ang).abs() < 1e-12) {
                            return Err(Error::AngleTie(qubits[q].id));
                        }
                        angles[q].push(ang);
                    }
                    polylines.push(pts);
                    (Slot::from_angle(ang_a), Slot::from_angle(ang_b))
                }
            };
            let (ca, cb) = (Corner::new(a, sa), Corner::new(b, sb));
            for c in [ca, cb] {
                if links[c.qubit][c.slot.index()].is_some() {
                    return Err(Error::SlotCollision(qubits[c.qubit].id));
                }
            }
            links[a][sa.index()] = Some(cb);
            links[b][sb.index()] = Some(ca);
            if !e.via.is_empty() {
                let key = ordered(ca, cb);
                let mut via = e.via.clone();
                if key.0 != ca {
                    via.reverse();
                }
                bends.insert(key, via);
            }
        }

        // straight-line planarity of the drawn polylines
        let segs: Vec<(usize, Point, Point)> = polylines
            .iter()
            .enumerate()
            .flat_map(|(i, p)| p.windows(2).map(move |w| (i, w[0], w[1])))
            .collect();
        for i in 0..segs.len() {
            for j in i + 1..segs.len() {
                let (ei, a, b) = segs[i];
                let (ej, c, d) = segs[j];
                if ei != ej && segments_cross(a, b, c, d) {
                    return Err(Error::NonPlanarEmbedding(format!(
                        "({:.3},{:.3})-({:.3},{:.3}) x ({:.3},{:.3})-({:.3},{:.3})",
                        a.0, a.1, b.0, b.1, c.0, c.1, d.0, d.1
                    )));
                }
            }
            let (_, a, b) = segs[i];
            for q in &qubits {
                if q.pos != a && q.pos != b && on_segment(q.pos, a, b) {
                    return Err(Error::NonPlanarEmbedding(format!("edge passes through qubit {}", q.id)));
                }
            }
        }

        let radius = if min_dist.is_finite() { 0.2 * min_dist } else { 0.2 };
        let mut g =
            SurfaceGraph {
                qubits: Arc::new(qubits),
                index: Arc::new(index),
                links,
                bends,
                faces: Vec::new(),
                dart_face: Vec::new(),
                corner_radius: radius,
            };
        g.check_connected()?;
        let faces = g.trace_faces();
        let outer = g.outer_by_area(&faces);
        g.set_faces(faces, outer);
        g.check_euler()?;
        Ok(g)
    }

    fn check_connected(&self) -> Result<()> {
        if self.qubits.is_empty() {
            return Err(Error::Disconnected);
        }
        let mut seen = vec![false; self.qubits.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(q) = stack.pop() {
            for c in self.links[q].iter().flatten() {
                if !seen[c.qubit] {
                    seen[c.qubit] = true;
                    stack.push(c.qubit);
                }
            }
        }
        if seen.iter().all(|&s| s) {
            Ok(())
        } else {
            Err(Error::Disconnected)
        }
    }

    fn check_euler(&self) -> Result<()> {
        let chi = self.euler_characteristic();
        if chi != 2 {
            return Err(Error::EulerViolation(chi));
        }
        Ok(())
    }

    /// V − E + F, counting the outer face.
    pub fn euler_characteristic(&self) -> i64 {
        self.num_qubits() as i64 - self.num_edges() as i64 + self.faces.len() as i64
    }

    /// Trace faces with the face on the left of each dart.
    fn trace_faces(&self) -> Vec<Vec<Corner>> {
        let mut visited = vec![false; 4 * self.qubits.len()];
        let mut faces = Vec::new();
        for q in 0..self.qubits.len() {
            for s in Slot::ALL {
                let start = Corner::new(q, s);
                if self.partner(start).is_none() || visited[start.vertex()] {
                    continue;
                }
                let mut face = Vec::new();
                let mut d = start;
                loop {
                    visited[d.vertex()] = true;
                    face.push(d);
                    d = self.next_dart(d);
                    if d == start {
                        break;
                    }
                }
                faces.push(face);
            }
        }
        faces
    }

    fn set_faces(&mut self, faces: Vec<Vec<Corner>>, outer: usize) {
        self.dart_face = vec![usize::MAX; 4 * self.qubits.len()];
        for (i, f) in faces.iter().enumerate() {
            for d in f {
                self.dart_face[d.vertex()] = i;
            }
        }
        self.faces = faces.into_iter().enumerate().map(|(i, darts)| Face { darts, outer: i == outer }).collect();
    }

    /// The dart following `d` around the face on its left.
    pub fn next_dart(&self, d: Corner) -> Corner {
        let t = self.partner(d).expect("dart must be linked");
        let mut s = t.slot.cw();
        loop {
            let c = Corner::new(t.qubit, s);
            if self.partner(c).is_some() {
                return c;
            }
            s = s.cw();
        }
    }

    fn outer_by_area(&self, faces: &[Vec<Corner>]) -> usize {
        let mut best = (f64::INFINITY, 0);
        for (i, f) in faces.iter().enumerate() {
            let pts = self.face_polygon(f);
            let a = signed_area(&pts);
            if a < best.0 {
                best = (a, i);
            }
        }
        best.1
    }

    /// Polygon through the corner points around a face (with edge bends).
    pub fn face_polygon(&self, darts: &[Corner]) -> Vec<Point> {
        let mut pts = Vec::new();
        for &d in darts {
            let t = self.partner(d).unwrap();
            pts.push(self.corner_pos(d));
            pts.extend(self.edge_bends(d, t));
            // sweep clockwise around the arriving diamond up to the next dart
            let next = self.next_dart(d);
            let mut c = t;
            loop {
                pts.push(self.corner_pos(c));
                if c.slot == next.slot {
                    break;
                }
                c = c.cw();
            }
            pts.pop();
        }
        pts
    }

    fn retrace(&mut self, old_outer: &[Corner]) -> Result<()> {
        let faces = self.trace_faces();
        let mut survivor = vec![false; 4 * self.qubits.len()];
        for &d in old_outer {
            if self.partner(d).is_some() {
                survivor[d.vertex()] = true;
            }
        }
        let candidates: Vec<usize> = faces
            .iter()
            .enumerate()
            .filter(|(_, f)| f.iter().any(|d| survivor[d.vertex()]))
            .map(|(i, _)| i)
            .collect();
        let outer = match candidates.as_slice() {
            [one] => *one,
            _ => {
                // ambiguous: fall back to the drawn geometry among candidates
                let pool: Vec<usize> = if candidates.is_empty() { (0..faces.len()).collect() } else { candidates };
                *pool
                    .iter()
                    .min_by(|&&a, &&b| {
                        signed_area(&self.face_polygon(&faces[a]))
                            .partial_cmp(&signed_area(&self.face_polygon(&faces[b])))
                            .unwrap()
                    })
                    .unwrap()
            }
        };
        self.set_faces(faces, outer);
        self.check_connected()?;
        self.check_euler()
    }

    pub fn num_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn num_edges(&self) -> usize {
        self.links.iter().map(|l| l.iter().flatten().count()).sum::<usize>() / 2
    }

    pub fn qubits(&self) -> &[Qubit] {
        &self.qubits
    }

    pub fn qubit_index(&self, id: QubitId) -> Result<usize> {
        self.index.get(&id).copied().ok_or(Error::UnknownQubit(id))
    }

    pub fn qubit_id(&self, q: usize) -> QubitId {
        self.qubits[q].id
    }

    pub fn corner_radius(&self) -> f64 {
        self.corner_radius
    }

    pub fn partner(&self, c: Corner) -> Option<Corner> {
        self.links[c.qubit][c.slot.index()]
    }

    pub fn is_paired(&self, c: Corner) -> bool {
        self.partner(c).is_some()
    }

    pub fn degree(&self, q: usize) -> usize {
        self.links[q].iter().flatten().count()
    }

    /// All edges as ordered corner pairs, sorted.
    pub fn edges(&self) -> Vec<(Corner, Corner)> {
        let mut out = Vec::new();
        for q in 0..self.qubits.len() {
            for s in Slot::ALL {
                let c = Corner::new(q, s);
                if let Some(t) = self.partner(c) {
                    if c < t {
                        out.push((c, t));
                    }
                }
            }
        }
        out
    }

    pub fn edge_bends(&self, from: Corner, to: Corner) -> Vec<Point> {
        match self.bends.get(&ordered(from, to)) {
            Some(v) if from < to => v.clone(),
            Some(v) => v.iter().rev().copied().collect(),
            None => Vec::new(),
        }
    }

    pub fn corner_pos(&self, c: Corner) -> Point {
        let p = self.qubits[c.qubit].pos;
        let d = c.slot.dir();
        (p.0 + self.corner_radius * d.0, p.1 + self.corner_radius * d.1)
    }

    /// Unpaired corners (σ vertices), sorted.
    pub fn unpaired(&self) -> Vec<Corner> {
        let mut out = Vec::new();
        for q in 0..self.qubits.len() {
            for s in Slot::ALL {
                let c = Corner::new(q, s);
                if self.partner(c).is_none() {
                    out.push(c);
                }
            }
        }
        out
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn interior_faces(&self) -> impl Iterator<Item = (usize, &Face)> {
        self.faces.iter().enumerate().filter(|(_, f)| !f.outer)
    }

    pub fn outer_face(&self) -> usize {
        self.faces.iter().position(|f| f.outer).expect("outer face")
    }

    /// Face index on the left of a dart.
    pub fn face_of_dart(&self, d: Corner) -> Option<usize> {
        self.dart_face.get(d.vertex()).copied().filter(|&f| f != usize::MAX)
    }

    /// Face an unpaired corner sits on (its missing slot looks into it).
    pub fn face_of_corner(&self, c: Corner) -> usize {
        if self.is_paired(c) {
            return self.face_of_dart(c).unwrap();
        }
        // the face containing c is the one whose dart follows the cw sweep past c
        let mut s = c.slot.cw();
        loop {
            let d = Corner::new(c.qubit, s);
            if self.is_paired(d) {
                return self.face_of_dart(d).unwrap();
            }
            s = s.cw();
        }
    }

    /// Stable label of a face: `out`, or `<qubit id>.<slot>` of its smallest dart.
    pub fn face_label(&self, f: usize) -> String {
        let face = &self.faces[f];
        if face.outer {
            return "out".into();
        }
        let d = face.darts.iter().min_by_key(|d| (self.qubit_id(d.qubit), d.slot)).unwrap();
        format!("{}.{}", self.qubit_id(d.qubit), d.slot.as_char())
    }

    pub fn face_by_label(&self, label: &str) -> Result<usize> {
        (0..self.faces.len())
            .find(|&f| self.face_label(f) == label)
            .ok_or_else(|| Error::Parse { line: 0, msg: format!("no face labelled {label:?}") })
    }

    pub fn corner_label(&self, c: Corner) -> String {
        format!("{}/{}", self.qubit_id(c.qubit), c.slot.as_char())
    }

    pub fn parse_corner(&self, s: &str) -> Result<Corner> {
        let (q, slot) = s
            .split_once('/')
            .ok_or_else(|| Error::Parse { line: 0, msg: format!("corner {s:?} must be <qubit>/<slot>") })?;
        let id: QubitId = q.parse().map_err(|_| Error::Parse { line: 0, msg: format!("bad qubit id {q:?}") })?;
        Ok(Corner::new(self.qubit_index(id)?, slot.parse()?))
    }

    /// Number of stabilizer plaquettes (interior faces).
    pub fn num_stabilizers(&self) -> usize {
        self.faces.len() - 1
    }

    pub fn count_by_degree(&self, d: usize) -> usize {
        (0..self.num_qubits()).filter(|&q| self.degree(q) == d).count()
    }

    /// N_σ = N_D3V + 2·N_D2V.
    pub fn count_sigma(&self) -> usize {
        self.count_by_degree(3) + 2 * self.count_by_degree(2)
    }

    /// Qubit/stabilizer/anyon balance on the disk: N_Q − N_S = N_σ/2 − 1.
    pub fn check_euler_balance(&self) -> bool {
        let sigma = self.count_sigma();
        sigma % 2 == 0
            && 2 * (self.num_qubits() as i64 - self.num_stabilizers() as i64) == sigma as i64 - 2
    }

    /// Dimension of the code space, `max{2^{N_σ/2 − 1}, 1}` as a log2.
    pub fn logical_qubits(&self) -> usize {
        (self.count_sigma() / 2).saturating_sub(1)
    }

    pub fn validate_degrees(&self) -> Result<()> {
        for q in 0..self.num_qubits() {
            let d = self.degree(q);
            if !(2..=4).contains(&d) {
                return Err(Error::BadDegree { qubit: self.qubit_id(q), degree: d });
            }
        }
        Ok(())
    }

    /// Remove the edge at `c`. Faces on its two sides merge.
    pub fn delete_link(&self, c: Corner) -> Result<(SurfaceGraph, LinkChange)> {
        let t = self.partner(c).ok_or_else(|| Error::LinkAbsent(self.corner_label(c)))?;
        let left = self.face_of_dart(c).unwrap();
        let right = self.face_of_dart(t).unwrap();
        let old_outer = self.faces[self.outer_face()].darts.clone();
        let mut g = self.clone();
        g.links[c.qubit][c.slot.index()] = None;
        g.links[t.qubit][t.slot.index()] = None;
        g.bends.remove(&ordered(c, t));
        g.validate_degrees()?;
        g.retrace(&old_outer)?;
        let boundary = self.faces[left].outer || self.faces[right].outer;
        let merged = g.face_of_corner(c);
        Ok((g, LinkChange { a: c, b: t, merged_from: (left, right), face: merged, boundary }))
    }

    /// Insert an edge between two unpaired corners on a common face.
    pub fn add_link(&self, a: Corner, b: Corner) -> Result<(SurfaceGraph, LinkChange)> {
        for c in [a, b] {
            if self.is_paired(c) {
                return Err(Error::CornersPaired(self.corner_label(c)));
            }
        }
        let fa = self.face_of_corner(a);
        if fa != self.face_of_corner(b) || a.qubit == b.qubit || !self.corners_face(a, b) {
            return Err(Error::NotAdjacent(self.corner_label(a), self.corner_label(b)));
        }
        let old_outer = self.faces[self.outer_face()].darts.clone();
        let mut g = self.clone();
        g.links[a.qubit][a.slot.index()] = Some(b);
        g.links[b.qubit][b.slot.index()] = Some(a);
        g.retrace(&old_outer)?;
        let left = g.face_of_dart(a).unwrap();
        let right = g.face_of_dart(b).unwrap();
        let boundary = g.faces[left].outer || g.faces[right].outer;
        Ok((g, LinkChange { a, b, merged_from: (left, right), face: fa, boundary }))
    }

    /// Slot directions of `a` and `b` point towards each other.
    fn corners_face(&self, a: Corner, b: Corner) -> bool {
        let (pa, pb) = (self.qubits[a.qubit].pos, self.qubits[b.qubit].pos);
        let v = (pb.0 - pa.0, pb.1 - pa.1);
        let (da, db) = (a.slot.dir(), b.slot.dir());
        v.0 * da.0 + v.1 * da.1 > 1e-12 && -(v.0 * db.0 + v.1 * db.1) > 1e-12
    }

    /// Rewire the edge at `target` so that it ends at the unpaired `anyon`.
    /// Both corners must lie on the same stabilizer plaquette.
    pub fn rewire(&self, anyon: Corner, target: Corner) -> Result<SurfaceGraph> {
        if self.is_paired(anyon) {
            return Err(Error::NotUnpaired(self.corner_label(anyon)));
        }
        let third = self.partner(target).ok_or_else(|| Error::NotAdjacent(self.corner_label(anyon), self.corner_label(target)))?;
        let f = self.face_of_corner(anyon);
        let on_face = self.faces[f].darts.iter().any(|&d| d == target || self.partner(d) == Some(target));
        if !on_face || self.faces[f].outer {
            return Err(Error::NoSharedPlaquette(self.corner_label(anyon), self.corner_label(target)));
        }
        if third.qubit == anyon.qubit {
            return Err(Error::InvalidPath("move would create a self-loop".into()));
        }
        let old_outer = self.faces[self.outer_face()].darts.clone();
        let mut g = self.clone();
        g.bends.remove(&ordered(target, third));
        g.links[target.qubit][target.slot.index()] = None;
        g.links[anyon.qubit][anyon.slot.index()] = Some(third);
        g.links[third.qubit][third.slot.index()] = Some(anyon);
        g.validate_degrees()?;
        g.retrace(&old_outer)?;
        Ok(g)
    }

    /// Hash of the link structure alone, for graphs sharing qubit positions.
    pub fn link_key(&self) -> u64 {
        // FNV-1a over the partner vertex of every slot
        let mut h: u64 = 0xcbf29ce484222325;
        for slots in &self.links {
            for l in slots {
                h ^= l.map_or(u64::MAX, |c| c.vertex() as u64);
                h = h.wrapping_mul(0x100000001b3);
            }
        }
        h
    }

    /// Normalized text form: qubits by id, then edges with explicit slots.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for q in self.qubits.iter() {
            s.push_str(&format!("qubit {} {} {}\n", q.id, fmt_num(q.pos.0), fmt_num(q.pos.1)));
        }
        let mut lines: Vec<(QubitId, QubitId, String)> = self
            .edges()
            .into_iter()
            .map(|(a, b)| {
                let (a, b) = if self.qubit_id(a.qubit) <= self.qubit_id(b.qubit) { (a, b) } else { (b, a) };
                let mut line = format!("edge {} {}", self.qubit_id(a.qubit), self.qubit_id(b.qubit));
                let via = self.edge_bends(a, b);
                if !via.is_empty() {
                    line.push_str(" via");
                    for p in via {
                        line.push_str(&format!(" {} {}", fmt_num(p.0), fmt_num(p.1)));
                    }
                }
                line.push_str(&format!(" slots {} {}\n", a.slot.as_char(), b.slot.as_char()));
                (self.qubit_id(a.qubit), self.qubit_id(b.qubit), line)
            })
            .collect();
        lines.sort();
        for (_, _, l) in lines {
            s.push_str(&l);
        }
        s
    }

    /// FNV-1a hash of the normalized text form.
    pub fn structure_hash(&self) -> String {
        let mut h: u64 = 0xcbf29ce484222325;
        for b in self.to_text().bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        format!("{h:016x}")
    }
}

fn fmt_num(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}

/// Bookkeeping returned by link deletion and insertion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinkChange {
    pub a: Corner,
    pub b: Corner,
    /// Faces on the two sides of the link (in the graph where it exists).
    pub merged_from: (usize, usize),
    /// The merged face (after deletion) or the split face (before insertion).
    pub face: usize,
    pub boundary: bool,
}

impl GraphSpec {
    pub fn parse(text: &str) -> Result<GraphSpec> {
        let mut spec = GraphSpec::default();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let tok: Vec<&str> = line.split_whitespace().collect();
            let perr = |msg: String| Error::Parse { line: line_no, msg };
            let num = |s: &str| s.parse::<f64>().map_err(|_| perr(format!("bad number {s:?}")));
            let id = |s: &str| s.parse::<QubitId>().map_err(|_| perr(format!("bad qubit id {s:?}")));
            match tok[0] {
                "qubit" if tok.len() == 4 => spec.qubits.push((id(tok[1])?, (num(tok[2])?, num(tok[3])?))),
                "edge" if tok.len() >= 3 => {
                    let mut e = EdgeSpec::straight(id(tok[1])?, id(tok[2])?);
                    let mut k = 3;
                    while k < tok.len() {
                        match tok[k] {
                            "via" => {
                                k += 1;
                                while k + 1 < tok.len() && tok[k] != "slots" {
                                    e.via.push((num(tok[k])?, num(tok[k + 1])?));
                                    k += 2;
                                }
                            }
                            "slots" if k + 2 < tok.len() => {
                                let sa: Slot = tok[k + 1].parse().map_err(|_| perr("bad slot".into()))?;
                                let sb: Slot = tok[k + 2].parse().map_err(|_| perr("bad slot".into()))?;
                                e.slots = Some((sa, sb));
                                k += 3;
                            }
                            other => return Err(perr(format!("unexpected token {other:?}"))),
                        }
                    }
                    spec.edges.push(e);
                }
                _ => return Err(perr(format!("unrecognized line {line:?}"))),
            }
        }
        Ok(spec)
    }
}

impl FromStr for SurfaceGraph {
    type Err = Error;
    fn from_str(s: &str) -> Result<SurfaceGraph> {
        SurfaceGraph::build(&GraphSpec::parse(s)?)
    }
}

impl fmt::Display for SurfaceGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Graph generators used by examples, tests and the CLI.
pub mod lattices {
    use super::*;

    /// Plain `cols × rows` grid of qubits with nearest-neighbour edges.
    pub fn grid(cols: u32, rows: u32) -> GraphSpec {
        let mut spec = GraphSpec::default();
        let id = |x: u32, y: u32| y * cols + x;
        for y in 0..rows {
            for x in 0..cols {
                spec.qubits.push((id(x, y), (x as f64, y as f64)));
                if x + 1 < cols {
                    spec.edges.push(EdgeSpec::straight(id(x, y), id(x + 1, y)));
                }
                if y + 1 < rows {
                    spec.edges.push(EdgeSpec::straight(id(x, y), id(x, y + 1)));
                }
            }
        }
        spec
    }

    /// A boundary digon between two neighbouring qubits, bulging outward in `out`.
    pub fn digon(spec: &mut GraphSpec, a: QubitId, b: QubitId, out: Slot) {
        let pos = |q: QubitId| spec.qubits.iter().find(|p| p.0 == q).unwrap().1;
        let (pa, pb) = (pos(a), pos(b));
        let d = out.dir();
        let h = 0.5;
        spec.edges.push(EdgeSpec {
            a,
            b,
            via: vec![(pa.0 + h * d.0, pa.1 + h * d.1), (pb.0 + h * d.0, pb.1 + h * d.1)],
            slots: None,
        });
    }

    /// Rotated surface code patch: `cols × rows` grid closed by two-qubit
    /// boundary plaquettes so that only the four corners are degree three.
    /// Requires odd `cols` and `rows`.
    pub fn surface_code(cols: u32, rows: u32) -> GraphSpec {
        let mut spec = grid(cols, rows);
        let id = |x: u32, y: u32| y * cols + x;
        let top = rows - 1;
        let right = cols - 1;
        // top: pairs starting at the left corner
        for x in (0..right).step_by(2) {
            digon(&mut spec, id(x, top), id(x + 1, top), Slot::N);
        }
        // right: pairs starting at the top corner
        for k in (0..top).step_by(2) {
            digon(&mut spec, id(right, top - k), id(right, top - k - 1), Slot::E);
        }
        // bottom: pairs starting at the right corner
        for k in (0..right).step_by(2) {
            digon(&mut spec, id(right - k, 0), id(right - k - 1, 0), Slot::S);
        }
        // left: pairs starting at the bottom corner
        for k in (0..top).step_by(2) {
            digon(&mut spec, id(0, k), id(0, k + 1), Slot::W);
        }
        spec
    }

    /// Two-row strip closed by boundary digons. With `cols` odd the patch has
    /// exactly two degree-three qubits, so its code space is one-dimensional.
    pub fn strip(cols: u32) -> GraphSpec {
        let mut spec = grid(cols, 2);
        let id = |x: u32, y: u32| y * cols + x;
        digon(&mut spec, id(0, 0), id(0, 1), Slot::W);
        digon(&mut spec, id(cols - 1, 0), id(cols - 1, 1), Slot::E);
        for x in (1..cols - 1).step_by(2) {
            digon(&mut spec, id(x, 1), id(x + 1, 1), Slot::N);
        }
        for x in (0..cols - 1).step_by(2) {
            digon(&mut spec, id(x, 0), id(x + 1, 0), Slot::S);
        }
        spec
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> SurfaceGraph {
        SurfaceGraph::build(&lattices::grid(2, 2)).unwrap()
    }

    #[test]
    fn square_counts() {
        let g = square();
        assert_eq!(g.num_qubits(), 4);
        assert_eq!(g.num_edges(), 4);
        assert_eq!(g.num_stabilizers(), 1);
        assert_eq!(g.count_sigma(), 8);
        assert!(g.check_euler_balance());
        assert_eq!(g.logical_qubits(), 3);
    }

    #[test]
    fn surface_code_5x5_has_corner_anyons() {
        let g = SurfaceGraph::build(&lattices::surface_code(5, 5)).unwrap();
        assert_eq!(g.num_qubits(), 25);
        assert_eq!(g.num_stabilizers(), 24);
        assert_eq!(g.count_sigma(), 4);
        assert_eq!(g.logical_qubits(), 1);
        let corners: Vec<QubitId> = g.unpaired().iter().map(|c| g.qubit_id(c.qubit)).collect();
        assert_eq!(corners, vec![0, 4, 20, 24]);
    }

    #[test]
    fn strip_has_unique_code_state() {
        let g = SurfaceGraph::build(&lattices::strip(5)).unwrap();
        assert_eq!(g.num_qubits(), 10);
        assert_eq!(g.count_sigma(), 2);
        assert_eq!(g.num_stabilizers(), 10);
        assert!(g.check_euler_balance());
    }

    #[test]
    fn degree_five_is_rejected() {
        let mut spec = GraphSpec::default();
        spec.qubits.push((0, (0.0, 0.0)));
        let pts = [(1.0, 0.0), (0.3, 1.0), (-1.0, 0.2), (-0.5, -1.0), (0.8, -0.9)];
        for (i, p) in pts.iter().enumerate() {
            spec.qubits.push((i as u32 + 1, *p));
            spec.edges.push(EdgeSpec::straight(0, i as u32 + 1));
        }
        assert!(matches!(SurfaceGraph::build(&spec), Err(Error::BadDegree { qubit: _, degree: _ })));
    }

    #[test]
    fn two_qubits_one_edge_is_bad_degree() {
        let mut spec = GraphSpec::default();
        spec.qubits = vec![(0, (0.0, 0.0)), (1, (1.0, 0.0))];
        spec.edges.push(EdgeSpec::straight(0, 1));
        assert_eq!(SurfaceGraph::build(&spec).unwrap_err(), Error::BadDegree { qubit: 0, degree: 1 });
    }

    #[test]
    fn crossing_edges_are_rejected() {
        let text = "qubit 0 0 0\nqubit 1 2 0\nqubit 2 2 2\nqubit 3 0 2\nedge 0 1\nedge 1 2\nedge 2 3\nedge 3 0\nedge 0 2 via -1 0 -1 1 3 1 3 2\n";
        let err = text.parse::<SurfaceGraph>().unwrap_err();
        assert_eq!(err.code(), "NonPlanarEmbedding");
    }

    #[test]
    fn angle_tie_is_rejected() {
        let text = "qubit 0 0 0\nqubit 1 1 0\nqubit 2 1 1\nqubit 3 0 1\nedge 0 1\nedge 0 2 via 0.5 0\nedge 1 2\nedge 2 3\nedge 3 0\n";
        assert_eq!(text.parse::<SurfaceGraph>().unwrap_err(), Error::AngleTie(0));
    }

    #[test]
    fn text_form_round_trips() {
        let g = SurfaceGraph::build(&lattices::surface_code(3, 3)).unwrap();
        let again: SurfaceGraph = g.to_text().parse().unwrap();
        assert_eq!(g, again);
        assert_eq!(g.to_text(), again.to_text());
    }

    #[test]
    fn delete_then_add_restores_structure() {
        let g = SurfaceGraph::build(&lattices::grid(3, 2)).unwrap();
        let c = Corner::new(g.qubit_index(1).unwrap(), Slot::N);
        let (h, change) = g.delete_link(c).unwrap();
        assert_eq!(h.num_stabilizers(), 1);
        assert_eq!(h.count_sigma(), g.count_sigma() + 2);
        assert!(!change.boundary);
        assert!(h.check_euler_balance());
        let (back, _) = h.add_link(change.a, change.b).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn boundary_deletion_drops_a_stabilizer() {
        let g = SurfaceGraph::build(&lattices::surface_code(3, 3)).unwrap();
        // bottom edge between qubits 0 and 1 borders a bulk square and the outer face
        let c = Corner::new(g.qubit_index(0).unwrap(), Slot::E);
        let (h, change) = g.delete_link(c).unwrap();
        assert!(change.boundary);
        assert_eq!(h.num_stabilizers(), g.num_stabilizers() - 1);
        assert!(h.check_euler_balance());
    }

    #[test]
    fn non_adjacent_corners_cannot_link() {
        let g = SurfaceGraph::build(&lattices::grid(3, 3)).unwrap();
        let a = Corner::new(g.qubit_index(0).unwrap(), Slot::W);
        let b = Corner::new(g.qubit_index(8).unwrap(), Slot::E);
        assert_eq!(g.add_link(a, b).unwrap_err().code(), "NotAdjacent");
        let paired = Corner::new(g.qubit_index(0).unwrap(), Slot::E);
        assert_eq!(g.add_link(paired, b).unwrap_err().code(), "CornersPaired");
    }
}
