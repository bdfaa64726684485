//! Scenario execution: anyon creation, motion, braiding, measurement and
//! fusion on an evolving surface graph.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::compile::{compile_line, compile_stabilizer, compile_thooft, decompose, Gate, PauliRotation, ThooftPath};
use crate::decorated::{hops_from_qubits, lift_canonical, DecoratedGraph, DirectedPath};
use crate::engine::{complete_to_full_rank, conjugate_by_rotation, StabilizerState};
use crate::error::{Error, Result};
use crate::graph::{Corner, GraphSpec, SurfaceGraph};
use crate::kasteleyn::reduce;
use crate::moves::{available_moves, elementary_move, extend_line, ElementaryMove};
use crate::oracle::DenseState;
use crate::pauli::PauliString;

/// Quantum state backend driven by the protocol.
pub trait Backend {
    fn apply_rotation(&mut self, rot: &PauliRotation) -> Result<()>;
    fn apply_pauli(&mut self, p: &PauliString) -> Result<()>;
    fn measure(&mut self, obs: &PauliString) -> Result<i32>;
    fn expectation(&self, obs: &PauliString) -> Result<i32>;
}

impl Backend for StabilizerState {
    fn apply_rotation(&mut self, rot: &PauliRotation) -> Result<()> {
        StabilizerState::apply_rotation(self, rot)
    }
    fn apply_pauli(&mut self, p: &PauliString) -> Result<()> {
        StabilizerState::apply_pauli(self, p);
        Ok(())
    }
    fn measure(&mut self, obs: &PauliString) -> Result<i32> {
        StabilizerState::measure(self, obs)
    }
    fn expectation(&self, obs: &PauliString) -> Result<i32> {
        StabilizerState::expectation(self, obs)
    }
}

impl Backend for DenseState {
    fn apply_rotation(&mut self, rot: &PauliRotation) -> Result<()> {
        DenseState::apply_rotation(self, rot)
    }
    fn apply_pauli(&mut self, p: &PauliString) -> Result<()> {
        DenseState::apply_pauli(self, p)
    }
    fn measure(&mut self, obs: &PauliString) -> Result<i32> {
        DenseState::measure(self, obs)
    }
    fn expectation(&self, obs: &PauliString) -> Result<i32> {
        DenseState::expectation(self, obs)
    }
}

/// Graph-only stand-in used to validate a scenario before running it.
#[derive(Clone, Debug, Default)]
pub struct DryRun;

impl Backend for DryRun {
    fn apply_rotation(&mut self, _: &PauliRotation) -> Result<()> {
        Ok(())
    }
    fn apply_pauli(&mut self, _: &PauliString) -> Result<()> {
        Ok(())
    }
    fn measure(&mut self, obs: &PauliString) -> Result<i32> {
        if !obs.is_hermitian() {
            return Err(Error::NonHermitianObservable);
        }
        Ok(1)
    }
    fn expectation(&self, obs: &PauliString) -> Result<i32> {
        self.clone().measure(obs)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Anyon {
    pub name: String,
    pub corner: Corner,
    /// Carries stabilizer flux along with the σ.
    pub composite: bool,
}

/// Wilson line between two anyons, kept canonical as they move.
#[derive(Clone, Debug)]
pub struct TrackedLine {
    pub from: String,
    pub to: String,
    pub path: DirectedPath,
    /// The tracked observable is `sign` times the path operator.
    pub sign: i32,
    /// Exact image of the initial observable under every unitary applied since.
    pub heisenberg: PauliString,
    pub history: Vec<DirectedPath>,
}

/// Graph, quantum state and anyon bookkeeping.
#[derive(Clone, Debug)]
pub struct Machine<B: Backend> {
    pub graph: SurfaceGraph,
    pub dg: DecoratedGraph,
    pub backend: B,
    pub anyons: Vec<Anyon>,
    pub lines: Vec<TrackedLine>,
    /// Every unitary applied, in order.
    pub rotations: Vec<PauliRotation>,
    /// Largest stabilizer weight seen on any graph so far.
    pub max_stabilizer_weight: usize,
}

/// One step of a planned motion: anyon name and the corner it moves onto.
pub type Step = (String, Corner);

impl<B: Backend> Machine<B> {
    /// Wrap a graph and a state already in its code space. Unpaired corners
    /// present at this point are named `c1`, `c2`, … in corner order.
    pub fn new(graph: SurfaceGraph, backend: B) -> Self {
        let dg = DecoratedGraph::new(&graph);
        let anyons = graph
            .unpaired()
            .into_iter()
            .enumerate()
            .map(|(i, c)| Anyon { name: format!("c{}", i + 1), corner: c, composite: false })
            .collect();
        let max_stabilizer_weight = stabilizer_weight(&dg);
        Machine { graph, dg, backend, anyons, lines: Vec::new(), rotations: Vec::new(), max_stabilizer_weight }
    }

    fn set_graph(&mut self, g: SurfaceGraph) {
        self.dg = DecoratedGraph::new(&g);
        self.graph = g;
        self.max_stabilizer_weight = self.max_stabilizer_weight.max(stabilizer_weight(&self.dg));
    }

    pub fn anyon(&self, name: &str) -> Result<&Anyon> {
        self.anyons.iter().find(|a| a.name == name).ok_or_else(|| Error::UnknownAnyon(name.to_string()))
    }

    fn anyon_index(&self, name: &str) -> Result<usize> {
        self.anyons.iter().position(|a| a.name == name).ok_or_else(|| Error::UnknownAnyon(name.to_string()))
    }

    pub fn rename(&mut self, old: &str, new: &str) -> Result<()> {
        let i = self.anyon_index(old)?;
        self.anyons[i].name = new.to_string();
        for l in self.lines.iter_mut() {
            if l.from == old {
                l.from = new.to_string();
            }
            if l.to == old {
                l.to = new.to_string();
            }
        }
        Ok(())
    }

    /// Create a pair from the vacuum by deleting the link between two
    /// qubits; `a` sits on `q1`, `b` on `q2`.
    pub fn create(&mut self, a: &str, b: &str, q1: u32, q2: u32) -> Result<()> {
        for n in [a, b] {
            if self.anyons.iter().any(|x| x.name == n) {
                return Err(Error::UnknownAnyon(format!("{n} already exists")));
            }
        }
        let hop = hops_from_qubits(&self.graph, &[q1, q2], false)?[0];
        let (g2, ch) = self.graph.delete_link(hop)?;
        if ch.boundary {
            return Err(Error::UnsupportedGeometry("pairs are created on interior links only".into()));
        }
        // the old left face, opened at the deleted link, runs from b to a
        let cyc = &self.dg.faces()[self.dg.plaquette_face(ch.merged_from.0)].verts;
        let m = cyc.len();
        let mut k = cyc.iter().position(|&v| v == ch.b.vertex()).unwrap();
        let mut verts = Vec::new();
        loop {
            verts.push(cyc[k]);
            if cyc[k] == ch.a.vertex() {
                break;
            }
            k = (k + 1) % m;
        }
        let raw = DirectedPath::open(verts);
        let (path, sign) = reduce(&raw);
        self.set_graph(g2);
        let op = compile_line(&self.dg, &path)?;
        let op = if sign < 0 { op.negated() } else { op };
        self.anyons.push(Anyon { name: a.into(), corner: ch.a, composite: false });
        self.anyons.push(Anyon { name: b.into(), corner: ch.b, composite: false });
        self.lines.push(TrackedLine {
            from: b.into(),
            to: a.into(),
            path: path.clone(),
            sign,
            heisenberg: op,
            history: vec![path],
        });
        Ok(())
    }

    /// Plan a single move without executing it.
    pub fn plan_move(&self, name: &str, target: Corner) -> Result<ElementaryMove> {
        let an = self.anyon(name)?;
        elementary_move(&self.graph, &self.dg, an.corner, target, an.composite)
    }

    /// Execute one elementary move and update every tracked line.
    pub fn move_anyon(&mut self, name: &str, target: Corner) -> Result<ElementaryMove> {
        let mv = self.plan_move(name, target)?;
        self.apply_move(name, &mv)?;
        Ok(mv)
    }

    fn apply_move(&mut self, name: &str, mv: &ElementaryMove) -> Result<()> {
        self.backend.apply_rotation(&mv.rotation)?;
        self.rotations.push(mv.rotation.clone());
        let dg_after = DecoratedGraph::new(&mv.graph_after);
        let mut lines = std::mem::take(&mut self.lines);
        for l in lines.iter_mut() {
            let before = self.line_operator(l)?;
            let touches_end = l.path.first() == mv.anyon.vertex() || l.path.last() == mv.anyon.vertex();
            let (t, p) = (mv.target.vertex(), mv.partner.vertex());
            let uses_link = l.path.steps().iter().any(|&(x, y)| (x, y) == (t, p) || (x, y) == (p, t));
            if touches_end || uses_link {
                let (np, _) = if touches_end { extend_line(&l.path, mv)? } else { reroute_line(&l.path, mv) };
                // the conjugated observable and the new path operator agree up to sign
                let image = conjugate_by_rotation(&before, &mv.rotation);
                let op = compile_line(&dg_after, &np)?;
                l.sign = match image.ratio_to(&op).and_then(|c| c.sign()) {
                    Some(c) => c as i32,
                    None => return Err(Error::InvalidPath("tracked line lost its operator".into())),
                };
                l.path = np.clone();
                l.history.push(np);
            }
            l.heisenberg = conjugate_by_rotation(&l.heisenberg, &mv.rotation);
        }
        self.lines = lines;
        let i = self.anyon_index(name)?;
        self.anyons[i].corner = mv.target;
        self.graph = mv.graph_after.clone();
        self.dg = dg_after;
        Ok(())
    }

    /// Observable tracked for the line between `a` and `b`.
    pub fn line(&self, a: &str, b: &str) -> Option<&TrackedLine> {
        self.lines.iter().find(|l| (l.from == a && l.to == b) || (l.from == b && l.to == a))
    }

    pub fn line_operator(&self, l: &TrackedLine) -> Result<PauliString> {
        let op = compile_line(&self.dg, &l.path)?;
        Ok(if l.sign < 0 { op.negated() } else { op })
    }

    /// Canonical line through the given qubits between two anyons.
    pub fn wilson_via(&self, a: &str, b: &str, via: &[u32]) -> Result<PauliString> {
        let (ca, cb) = (self.anyon(a)?.corner, self.anyon(b)?.corner);
        let mut ids = vec![self.graph.qubit_id(ca.qubit)];
        ids.extend_from_slice(via);
        ids.push(self.graph.qubit_id(cb.qubit));
        let hops = hops_from_qubits(&self.graph, &ids, false)?;
        let p = lift_canonical(&self.graph, &hops, Some(ca.slot), Some(cb.slot), false)?;
        compile_line(&self.dg, &p)
    }

    /// The line's path at creation, if the pair is back on its original
    /// corners and the path is valid again.
    pub fn initial_line(&self, a: &str, b: &str) -> Result<PauliString> {
        let l = self.line(a, b).ok_or_else(|| Error::UnknownAnyon(format!("no tracked line between {a} and {b}")))?;
        let p0 = &l.history[0];
        let ends = (self.anyon(&l.from)?.corner.vertex(), self.anyon(&l.to)?.corner.vertex());
        if (p0.first(), p0.last()) != ends {
            return Err(Error::EndpointMismatch(format!("{a} and {b} are not on their creation corners")));
        }
        if !p0.is_valid(&self.dg) {
            return Err(Error::InvalidPath("creation path is not valid in the current graph".into()));
        }
        compile_line(&self.dg, p0)
    }

    pub fn wilson(&self, a: &str, b: &str, route: &WilsonRoute) -> Result<PauliString> {
        match route {
            WilsonRoute::Via(v) => self.wilson_via(a, b, v),
            WilsonRoute::Initial => self.initial_line(a, b),
            WilsonRoute::Tracked => {
                let l = self
                    .line(a, b)
                    .ok_or_else(|| Error::UnknownAnyon(format!("no tracked line between {a} and {b}")))?;
                self.line_operator(l)
            }
        }
    }

    pub fn measure_wilson(&mut self, a: &str, b: &str, route: &WilsonRoute) -> Result<i32> {
        let op = self.wilson(a, b, route)?;
        self.backend.measure(&op)
    }

    pub fn thooft(&self, faces: &[String]) -> Result<PauliString> {
        let idx = faces.iter().map(|f| self.graph.face_by_label(f)).collect::<Result<Vec<_>>>()?;
        let tp = ThooftPath::through(&self.graph, &idx)?;
        compile_thooft(&self.dg, &tp, None)
    }

    pub fn measure_thooft(&mut self, faces: &[String]) -> Result<i32> {
        let op = self.thooft(faces)?;
        self.backend.measure(&op)
    }

    /// Apply an open 't Hooft string from the anyon's plaquette along
    /// `faces`, leaving stabilizer flux on that plaquette: the anyon becomes
    /// a σ–ε composite.
    pub fn attach_flux(&mut self, name: &str, faces: &[String]) -> Result<()> {
        let i = self.anyon_index(name)?;
        let own = self.graph.face_label(self.graph.face_of_corner(self.anyons[i].corner));
        if faces.first() != Some(&own) {
            return Err(Error::InvalidPath(format!("flux string must start on face {own}")));
        }
        let op = self.thooft(faces)?;
        let own_idx = self.graph.face_of_corner(self.anyons[i].corner);
        for (f, _) in self.graph.interior_faces() {
            if compile_stabilizer(&self.dg, f)?.commutes_with(&op) == (f == own_idx) {
                return Err(Error::InvalidPath("flux string must flip only the anyon's plaquette".into()));
            }
        }
        self.backend.apply_pauli(&op)?;
        for l in self.lines.iter_mut() {
            if !l.heisenberg.commutes_with(&op) {
                l.heisenberg = l.heisenberg.clone().negated();
            }
        }
        self.anyons[i].composite = !self.anyons[i].composite;
        Ok(())
    }

    /// Re-link two anyons and measure the stabilizer of the face they close
    /// off: +1 is the vacuum channel, −1 an ε.
    pub fn fuse(&mut self, a: &str, b: &str) -> Result<i32> {
        let (ca, cb) = (self.anyon(a)?.corner, self.anyon(b)?.corner);
        let (g2, _) = self.graph.add_link(ca, cb)?;
        let face = g2.face_of_dart(ca).unwrap();
        self.set_graph(g2);
        let op = compile_stabilizer(&self.dg, face)
            .or_else(|_| compile_stabilizer(&self.dg, self.graph.face_of_dart(cb).unwrap()))?;
        let out = self.backend.measure(&op)?;
        self.anyons.retain(|x| x.name != a && x.name != b);
        self.lines.retain(|l| ![&l.from, &l.to].iter().any(|n| *n == a || *n == b));
        Ok(out)
    }

    /// Stabilizer sign per interior face label.
    pub fn stabilizer_signs(&self) -> Result<BTreeMap<String, i32>> {
        let mut out = BTreeMap::new();
        for (i, _) in self.graph.interior_faces() {
            let s = compile_stabilizer(&self.dg, i)?;
            out.insert(self.graph.face_label(i), self.backend.expectation(&s)?);
        }
        Ok(out)
    }

    /// Gate list of every unitary applied so far.
    pub fn gate_export(&self) -> Vec<Gate> {
        self.rotations.iter().flat_map(|r| decompose(r).gates).collect()
    }

    /// Exchange of two anyons that restores the graph; counter-clockwise
    /// unless `inverse`.
    pub fn braid(&mut self, a: &str, b: &str, inverse: bool) -> Result<Vec<Step>> {
        let plan = plan_exchange(&self.graph, &self.anyons, a, b, inverse)?;
        for (name, target) in &plan {
            self.move_anyon(name, *target)?;
        }
        Ok(plan)
    }
}

fn stabilizer_weight(dg: &DecoratedGraph) -> usize {
    dg.graph()
        .interior_faces()
        .filter_map(|(i, _)| compile_stabilizer(dg, i).ok())
        .map(|s| s.weight())
        .max()
        .unwrap_or(0)
}

/// Reroute a line that crosses the rewired link of a move (but does not end
/// at the moved anyon) through the new link and the move path.
fn reroute_line(line: &DirectedPath, mv: &ElementaryMove) -> (DirectedPath, i32) {
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
    reduce(&DirectedPath::open(verts))
}

static PLANS: OnceLock<Mutex<HashMap<String, Vec<Step>>>> = OnceLock::new();

/// `find_exchange` memoized on graph structure and anyon placement.
pub fn plan_exchange(graph: &SurfaceGraph, anyons: &[Anyon], a: &str, b: &str, inverse: bool) -> Result<Vec<Step>> {
    let placement: Vec<_> = anyons.iter().map(|x| (&x.name, x.corner.vertex())).collect();
    let key = format!("{}|{a}|{b}|{inverse}|{placement:?}", graph.structure_hash());
    let cache = PLANS.get_or_init(Default::default);
    if let Some(p) = cache.lock().unwrap().get(&key) {
        return Ok(p.clone());
    }
    let plan = find_exchange(graph, anyons, a, b, BRAID_DEPTH, inverse)?;
    cache.lock().unwrap().insert(key, plan.clone());
    Ok(plan)
}

/// Search depth bound for braid planning.
pub const BRAID_DEPTH: usize = 14;

fn angle(a: (f64, f64), b: (f64, f64)) -> f64 {
    (b.1 - a.1).atan2(b.0 - a.0)
}

fn unwrap_delta(d: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let mut d = d % tau;
    if d > std::f64::consts::PI {
        d -= tau;
    }
    if d < -std::f64::consts::PI {
        d += tau;
    }
    d
}

#[derive(Clone)]
struct SearchNode {
    graph: SurfaceGraph,
    ca: Corner,
    cb: Corner,
    /// Accumulated angles, as a forward path would have them here.
    acc: Vec<f64>,
    parent: Option<usize>,
    /// Move into this node (forward tree) or out of it towards the goal
    /// (backward tree).
    step: Option<Step>,
}

struct Exchange<'a> {
    anyons: &'a [Anyon],
    a: &'a str,
    b: &'a str,
    others: Vec<(f64, f64)>,
}

impl Exchange<'_> {
    /// a→b direction, then a and b as seen from every other anyon.
    fn angles(&self, g: &SurfaceGraph, ca: Corner, cb: Corner) -> Vec<f64> {
        let (pa, pb) = (g.corner_pos(ca), g.corner_pos(cb));
        let mut v = vec![angle(pa, pb)];
        for &o in &self.others {
            v.push(angle(o, pa));
            v.push(angle(o, pb));
        }
        v
    }

    fn key(&self, n: &SearchNode) -> String {
        let cur = self.angles(&n.graph, n.ca, n.cb);
        let turns: Vec<i64> = n
            .acc
            .iter()
            .zip(&cur)
            .map(|(acc, c)| ((acc - c) / std::f64::consts::TAU).round() as i64)
            .collect();
        format!("{:x}|{:?}|{:?}|{:?}", n.graph.link_key(), n.ca, n.cb, turns)
    }

    fn composite(&self, who: &str) -> bool {
        self.anyons.iter().any(|x| x.name == who && x.composite)
    }

    /// Angle change along a move, following the move path so that large
    /// jumps keep the winding exact.
    fn sweep(&self, n: &SearchNode, who: &str, mv: &ElementaryMove) -> Vec<f64> {
        let mut d = vec![0.0; n.acc.len()];
        let mut prev = self.angles(&n.graph, n.ca, n.cb);
        for &v in mv.path.verts.iter().skip(1) {
            let here = Corner::from_vertex(v);
            let (xa, xb) = if who == self.a { (here, n.cb) } else { (n.ca, here) };
            let cur = self.angles(&n.graph, xa, xb);
            for k in 0..d.len() {
                d[k] += unwrap_delta(cur[k] - prev[k]);
            }
            prev = cur;
        }
        d
    }

    /// Forward successors: (who, move, child).
    fn forward(&self, n: &SearchNode) -> Vec<(String, SearchNode)> {
        let dg = DecoratedGraph::new(&n.graph);
        let mut out = Vec::new();
        for (who, c) in [(self.a, n.ca), (self.b, n.cb)] {
            for mv in available_moves(&n.graph, &dg, c, self.composite(who)) {
                let d = self.sweep(n, who, &mv);
                let (ca, cb) = if who == self.a { (mv.target, n.cb) } else { (n.ca, mv.target) };
                let acc = n.acc.iter().zip(&d).map(|(x, y)| x + y).collect();
                out.push((
                    who.to_string(),
                    SearchNode { graph: mv.graph_after, ca, cb, acc, parent: None, step: Some((who.to_string(), mv.target)) },
                ));
            }
        }
        out
    }

    /// Backward predecessors: states from which one forward move reaches `n`.
    fn backward(&self, n: &SearchNode) -> Vec<SearchNode> {
        let dg = DecoratedGraph::new(&n.graph);
        let hash = n.graph.link_key();
        let mut out = Vec::new();
        for (who, c) in [(self.a, n.ca), (self.b, n.cb)] {
            for back in available_moves(&n.graph, &dg, c, self.composite(who)) {
                let g = back.graph_after;
                let (ca, cb) = if who == self.a { (back.target, n.cb) } else { (n.ca, back.target) };
                let pdg = DecoratedGraph::new(&g);
                let Ok(fwd) = elementary_move(&g, &pdg, back.target, c, self.composite(who)) else { continue };
                if fwd.graph_after.link_key() != hash {
                    continue;
                }
                let mut pred = SearchNode { graph: g, ca, cb, acc: Vec::new(), parent: None, step: Some((who.to_string(), c)) };
                let d = self.sweep(&pred, who, &fwd);
                pred.acc = n.acc.iter().zip(&d).map(|(x, y)| x - y).collect();
                out.push(pred);
            }
        }
        out
    }
}

/// Shortest sequence of elementary moves of `a` and `b` that exchanges them
/// (counter-clockwise, or clockwise if `inverse`), winds neither around any
/// other anyon, and restores the graph. Bidirectional breadth-first search
/// over (graph, positions, winding) states.
pub fn find_exchange(
    graph: &SurfaceGraph,
    anyons: &[Anyon],
    a: &str,
    b: &str,
    depth: usize,
    inverse: bool,
) -> Result<Vec<Step>> {
    let ia = anyons.iter().position(|x| x.name == a).ok_or_else(|| Error::UnknownAnyon(a.into()))?;
    let ib = anyons.iter().position(|x| x.name == b).ok_or_else(|| Error::UnknownAnyon(b.into()))?;
    if ia == ib {
        return Err(Error::UnsupportedGeometry("an anyon cannot be exchanged with itself".into()));
    }
    let others = anyons
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != ia && *i != ib)
        .map(|(_, x)| graph.corner_pos(x.corner))
        .collect();
    let ex = Exchange { anyons, a, b, others };
    let (a0, b0) = (anyons[ia].corner, anyons[ib].corner);
    let start = ex.angles(graph, a0, b0);
    let goal_cur = ex.angles(graph, b0, a0);
    let pi = std::f64::consts::PI;
    let mut goal_acc: Vec<f64> = start.iter().zip(&goal_cur).map(|(s, g)| s + unwrap_delta(g - s)).collect();
    goal_acc[0] = start[0] + if inverse { -pi } else { pi };

    let root = |ca, cb, acc| SearchNode { graph: graph.clone(), ca, cb, acc, parent: None, step: None };
    let mut fwd = vec![root(a0, b0, start)];
    let mut bwd = vec![root(b0, a0, goal_acc)];
    let mut fseen: HashMap<String, usize> = HashMap::from([(ex.key(&fwd[0]), 0)]);
    let mut bseen: HashMap<String, usize> = HashMap::from([(ex.key(&bwd[0]), 0)]);
    let (mut ffront, mut bfront) = (vec![0usize], vec![0usize]);

    let splice = |fwd: &[SearchNode], bwd: &[SearchNode], fi: usize, bi: usize| {
        let mut steps = Vec::new();
        let mut k = fi;
        while let Some(p) = fwd[k].parent {
            steps.push(fwd[k].step.clone().unwrap());
            k = p;
        }
        steps.reverse();
        let mut k = bi;
        while let Some(p) = bwd[k].parent {
            steps.push(bwd[k].step.clone().unwrap());
            k = p;
        }
        steps
    };
    if let Some(&bi) = bseen.get(&ex.key(&fwd[0])) {
        return Ok(splice(&fwd, &bwd, 0, bi));
    }
    for level in 0..depth {
        if ffront.is_empty() && bfront.is_empty() {
            break;
        }
        let forward_turn = (level % 2 == 0 || bfront.is_empty()) && !ffront.is_empty();
        if forward_turn {
            let mut next = Vec::new();
            for &ni in &ffront {
                for (_, mut child) in ex.forward(&fwd[ni]) {
                    let k = ex.key(&child);
                    if fseen.contains_key(&k) {
                        continue;
                    }
                    child.parent = Some(ni);
                    fwd.push(child);
                    let id = fwd.len() - 1;
                    if let Some(&bi) = bseen.get(&k) {
                        return Ok(splice(&fwd, &bwd, id, bi));
                    }
                    fseen.insert(k, id);
                    next.push(id);
                }
            }
            ffront = next;
        } else {
            let mut next = Vec::new();
            for &ni in &bfront {
                for mut pred in ex.backward(&bwd[ni]) {
                    let k = ex.key(&pred);
                    if bseen.contains_key(&k) {
                        continue;
                    }
                    pred.parent = Some(ni);
                    bwd.push(pred);
                    let id = bwd.len() - 1;
                    if let Some(&fi) = fseen.get(&k) {
                        return Ok(splice(&fwd, &bwd, fi, id));
                    }
                    bseen.insert(k, id);
                    next.push(id);
                }
            }
            bfront = next;
        }
    }
    Err(Error::UnsupportedGeometry(format!(
        "no exchange of {a} and {b} within {depth} elementary moves"
    )))
}

/// Which path a Wilson measurement uses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WilsonRoute {
    /// The tracked line, extended by every move since creation.
    Tracked,
    /// The path the pair was created with.
    Initial,
    /// Canonical lift through the listed qubits.
    Via(Vec<u32>),
}

/// One scenario instruction.
#[derive(Clone, Debug, PartialEq)]
pub enum Instruction {
    Init { logical: Vec<PauliString> },
    Create { a: String, b: String, q1: u32, q2: u32 },
    Move { anyon: String, target: String },
    Braid { a: String, b: String, inverse: bool },
    MeasureWilson { a: String, b: String, route: WilsonRoute },
    MeasureThooft { faces: Vec<String> },
    Fuse { a: String, b: String },
    Expect { obs: PauliString },
    Flux { anyon: String, faces: Vec<String> },
}

impl Instruction {
    pub fn to_text(&self) -> String {
        match self {
            Instruction::Init { logical } if logical.is_empty() => "init".into(),
            Instruction::Init { logical } => format!(
                "init logical {}",
                logical.iter().map(|p| p.to_text()).collect::<Vec<_>>().join(" ")
            ),
            Instruction::Create { a, b, q1, q2 } => format!("create {a} {b} edge {q1} {q2}"),
            Instruction::Move { anyon, target } => format!("move {anyon} to {target}"),
            Instruction::Braid { a, b, inverse: false } => format!("braid {a} {b}"),
            Instruction::Braid { a, b, inverse: true } => format!("braid {a} {b} inverse"),
            Instruction::MeasureWilson { a, b, route: WilsonRoute::Tracked } => format!("measure wilson {a} {b}"),
            Instruction::MeasureWilson { a, b, route: WilsonRoute::Initial } => format!("measure wilson {a} {b} initial"),
            Instruction::MeasureWilson { a, b, route: WilsonRoute::Via(v) } => format!(
                "measure wilson {a} {b} via {}",
                v.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(" ")
            ),
            Instruction::MeasureThooft { faces } => format!("measure thooft {}", faces.join(" ")),
            Instruction::Fuse { a, b } => format!("fuse {a} {b}"),
            Instruction::Expect { obs } => format!("expect {}", obs.to_text()),
            Instruction::Flux { anyon, faces } => format!("flux {anyon} {}", faces.join(" ")),
        }
    }
}

/// Where the graph of a scenario comes from.
#[derive(Clone, Debug, PartialEq)]
pub enum GraphSource {
    File(String),
    Spec(GraphSpec),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub graph: GraphSource,
    pub seed: u64,
    pub instructions: Vec<Instruction>,
}

impl Scenario {
    /// Parse scenario text. `lattice <kind> <args>` is accepted in place of
    /// `load` for the built-in lattices (`grid c r`, `surface c r`, `strip c`).
    pub fn parse(text: &str) -> Result<Scenario> {
        let mut graph = None;
        let mut seed = 0;
        let mut instructions = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| Error::Parse { line: ln + 1, msg: msg.to_string() };
            let tok: Vec<&str> = line.split_whitespace().collect();
            let num = |i: usize| -> Result<u32> {
                tok.get(i).and_then(|t| t.parse().ok()).ok_or_else(|| err("expected a number"))
            };
            let word = |i: usize| -> Result<String> {
                tok.get(i).map(|s| s.to_string()).ok_or_else(|| err("missing argument"))
            };
            match tok[0] {
                "load" => graph = Some(GraphSource::File(word(1)?)),
                "lattice" => {
                    let spec = match (tok.get(1).copied(), tok.len()) {
                        (Some("grid"), 4) => crate::graph::lattices::grid(num(2)?, num(3)?),
                        (Some("surface"), 4) => crate::graph::lattices::surface_code(num(2)?, num(3)?),
                        (Some("strip"), 3) => crate::graph::lattices::strip(num(2)?),
                        _ => return Err(err("unknown lattice")),
                    };
                    graph = Some(GraphSource::Spec(spec));
                }
                "seed" => seed = tok.get(1).and_then(|t| t.parse().ok()).ok_or_else(|| err("bad seed"))?,
                "init" => {
                    let logical = match tok.get(1).copied() {
                        None => vec![],
                        Some("logical") => tok[2..]
                            .iter()
                            .map(|t| t.parse::<PauliString>().map_err(|_| err("bad Pauli string")))
                            .collect::<Result<_>>()?,
                        _ => return Err(err("expected 'logical'")),
                    };
                    instructions.push(Instruction::Init { logical });
                }
                "create" if tok.len() == 6 && tok[3] == "edge" => instructions.push(Instruction::Create {
                    a: word(1)?,
                    b: word(2)?,
                    q1: num(4)?,
                    q2: num(5)?,
                }),
                "move" if tok.len() == 4 && tok[2] == "to" => {
                    instructions.push(Instruction::Move { anyon: word(1)?, target: word(3)? })
                }
                "braid" if tok.len() == 3 || (tok.len() == 4 && tok[3] == "inverse") => {
                    instructions.push(Instruction::Braid { a: word(1)?, b: word(2)?, inverse: tok.len() == 4 })
                }
                "measure" if tok.get(1) == Some(&"wilson") && tok.len() >= 4 => {
                    let route = match tok.get(4).copied() {
                        None => WilsonRoute::Tracked,
                        Some("initial") if tok.len() == 5 => WilsonRoute::Initial,
                        Some("via") => WilsonRoute::Via((5..tok.len()).map(num).collect::<Result<Vec<_>>>()?),
                        _ => return Err(err("expected 'initial' or 'via'")),
                    };
                    instructions.push(Instruction::MeasureWilson { a: word(2)?, b: word(3)?, route });
                }
                "measure" if tok.get(1) == Some(&"thooft") && tok.len() >= 4 => {
                    instructions.push(Instruction::MeasureThooft { faces: tok[2..].iter().map(|s| s.to_string()).collect() })
                }
                "fuse" if tok.len() == 3 => instructions.push(Instruction::Fuse { a: word(1)?, b: word(2)? }),
                "expect" if tok.len() == 2 => instructions.push(Instruction::Expect {
                    obs: tok[1].parse().map_err(|_| err("bad Pauli string"))?,
                }),
                "flux" if tok.len() >= 4 => instructions.push(Instruction::Flux {
                    anyon: word(1)?,
                    faces: tok[2..].iter().map(|s| s.to_string()).collect(),
                }),
                _ => return Err(err(&format!("unrecognized directive '{line}'"))),
            }
        }
        let graph = graph.ok_or(Error::Parse { line: 0, msg: "no graph: use 'load' or 'lattice'".into() })?;
        Ok(Scenario { graph, seed, instructions })
    }

    pub fn load(path: &Path) -> Result<Scenario> {
        let text = std::fs::read_to_string(path)?;
        let mut sc = Scenario::parse(&text)?;
        if let GraphSource::File(f) = &sc.graph {
            let p = path.parent().unwrap_or(Path::new(".")).join(f);
            let spec = GraphSpec::parse(&std::fs::read_to_string(p)?)?;
            sc.graph = GraphSource::Spec(spec);
        }
        Ok(sc)
    }

    pub fn build_graph(&self) -> Result<SurfaceGraph> {
        match &self.graph {
            GraphSource::Spec(s) => SurfaceGraph::build(s),
            GraphSource::File(f) => SurfaceGraph::build(&GraphSpec::parse(&std::fs::read_to_string(f)?)?),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstructionRecord {
    pub op: String,
    pub outcome: Option<i32>,
    pub stabilizer_signs: BTreeMap<String, i32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub seed: u64,
    pub instructions: Vec<InstructionRecord>,
    pub final_graph_hash: String,
}

impl MeasurementRecord {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("records serialize")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BackendKind {
    Engine,
    Oracle,
    Both,
}

impl std::str::FromStr for BackendKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "engine" => Ok(BackendKind::Engine),
            "oracle" => Ok(BackendKind::Oracle),
            "both" => Ok(BackendKind::Both),
            _ => Err(Error::Parse { line: 0, msg: format!("unknown backend '{s}'") }),
        }
    }
}

/// Code-state generators: stabilizers plus fixings, completed to full rank.
pub fn code_state_strings(dg: &DecoratedGraph, logical: &[PauliString]) -> Vec<PauliString> {
    let mut s = crate::compile::stabilizers(dg);
    s.extend_from_slice(logical);
    complete_to_full_rank(dg.graph().num_qubits(), &s)
}

fn execute<B: Backend>(
    graph: SurfaceGraph,
    seed: u64,
    instructions: &[Instruction],
    make: impl Fn(usize, &[PauliString], u64) -> Result<B>,
    fresh: B,
) -> Result<(MeasurementRecord, Machine<B>)> {
    let mut m = Machine::new(graph, fresh);
    let mut records = Vec::new();
    for (index, ins) in instructions.iter().enumerate() {
        let wrap = |e: Error| match e {
            Error::ValidationFailed { .. } | Error::TooManyQubits { .. } | Error::BackendDivergence(_) => e,
            e => Error::ValidationFailed { index, msg: format!("{}: {e}", e.code()) },
        };
        let outcome = (|| -> Result<Option<i32>> {
            Ok(match ins {
                Instruction::Init { logical } => {
                    let strings = code_state_strings(&m.dg, logical);
                    m.backend = make(m.graph.num_qubits(), &strings, seed)?;
                    None
                }
                Instruction::Create { a, b, q1, q2 } => {
                    m.create(a, b, *q1, *q2)?;
                    None
                }
                Instruction::Move { anyon, target } => {
                    let t = m.graph.parse_corner(target)?;
                    m.move_anyon(anyon, t)?;
                    None
                }
                Instruction::Braid { a, b, inverse } => {
                    m.braid(a, b, *inverse)?;
                    None
                }
                Instruction::MeasureWilson { a, b, route } => Some(m.measure_wilson(a, b, route)?),
                Instruction::MeasureThooft { faces } => Some(m.measure_thooft(faces)?),
                Instruction::Fuse { a, b } => Some(m.fuse(a, b)?),
                Instruction::Expect { obs } => Some(m.backend.expectation(obs)?),
                Instruction::Flux { anyon, faces } => {
                    m.attach_flux(anyon, faces)?;
                    None
                }
            })
        })()
        .map_err(wrap)?;
        records.push(InstructionRecord { op: ins.to_text(), outcome, stabilizer_signs: m.stabilizer_signs().map_err(wrap)? });
    }
    let rec = MeasurementRecord { seed, instructions: records, final_graph_hash: m.graph.structure_hash() };
    Ok((rec, m))
}

/// Run on the stabilizer engine.
pub fn run_engine(sc: &Scenario, seed: u64) -> Result<(MeasurementRecord, Machine<StabilizerState>)> {
    let g = sc.build_graph()?;
    validate(sc, &g)?;
    let n = g.num_qubits();
    let dg = DecoratedGraph::new(&g);
    let fresh = StabilizerState::from_stabilizers(n, &code_state_strings(&dg, &[]), seed)?;
    execute(g, seed, &sc.instructions, |n, s, seed| StabilizerState::from_stabilizers(n, s, seed), fresh)
}

/// Run on the dense statevector oracle.
pub fn run_oracle(sc: &Scenario, seed: u64) -> Result<(MeasurementRecord, Machine<DenseState>)> {
    let g = sc.build_graph()?;
    validate(sc, &g)?;
    let n = g.num_qubits();
    let dg = DecoratedGraph::new(&g);
    let fresh = DenseState::from_stabilizers(n, &code_state_strings(&dg, &[]), seed)?;
    execute(g, seed, &sc.instructions, |n, s, seed| DenseState::from_stabilizers(n, s, seed), fresh)
}

/// Check every instruction against the evolving graph without a quantum state.
pub fn validate(sc: &Scenario, g: &SurfaceGraph) -> Result<()> {
    execute(g.clone(), sc.seed, &sc.instructions, |_, _, _| Ok(DryRun), DryRun).map(|_| ())
}

/// Largest stabilizer weight over every graph a scenario passes through,
/// including the intermediate graphs of each braid.
pub fn max_stabilizer_weight(sc: &Scenario) -> Result<usize> {
    let g = sc.build_graph()?;
    Ok(execute(g, sc.seed, &sc.instructions, |_, _, _| Ok(DryRun), DryRun)?.1.max_stabilizer_weight)
}

/// Run a scenario; `Both` runs each backend and insists on identical records.
pub fn run(sc: &Scenario, backend: BackendKind, seed: Option<u64>) -> Result<MeasurementRecord> {
    let seed = seed.unwrap_or(sc.seed);
    match backend {
        BackendKind::Engine => Ok(run_engine(sc, seed)?.0),
        BackendKind::Oracle => Ok(run_oracle(sc, seed)?.0),
        BackendKind::Both => {
            let (a, _) = run_engine(sc, seed)?;
            let (b, _) = run_oracle(sc, seed)?;
            if a.to_json() != b.to_json() {
                let at = a
                    .instructions
                    .iter()
                    .zip(&b.instructions)
                    .position(|(x, y)| x != y)
                    .map_or("final graph".to_string(), |i| format!("instruction {i}"));
                return Err(Error::BackendDivergence(at));
            }
            Ok(a)
        }
    }
}
