//! Compilation of Wilson lines, loops, stabilizers and 't Hooft lines into
//! phased Pauli strings, and of π/4 Pauli rotations into Clifford gates.

use std::fmt;
use std::str::FromStr;

use crate::decorated::{DecoratedGraph, DirectedPath};
use crate::error::{Error, Result};
use crate::graph::{Corner, Slot, SurfaceGraph};
use crate::pauli::{Letter, PauliString, Phase};

/// Pauli letter on the short edge between two neighbouring corners.
///
/// Edges E–N and W–S carry Z, edges N–W and S–E carry X.
pub fn short_edge_letter(a: Slot, b: Slot) -> Letter {
    let low = if a.ccw() == b { a } else { b };
    if low.index() % 2 == 0 {
        Letter::Z
    } else {
        Letter::X
    }
}

/// Operator of a valid open path: (−i)^{N_ll} times the short-edge letters,
/// each new one multiplied on the left.
pub fn compile_line(dg: &DecoratedGraph, path: &DirectedPath) -> Result<PauliString> {
    if !path.is_valid(dg) {
        return Err(Error::InvalidPath("a line must be open and start and end on short edges".into()));
    }
    Ok(line_unchecked(dg.graph().num_qubits(), path))
}

fn line_unchecked(n: usize, path: &DirectedPath) -> PauliString {
    let mut acc = PauliString::identity(n);
    for (a, b) in path.steps() {
        let (ca, cb) = (Corner::from_vertex(a), Corner::from_vertex(b));
        if ca.qubit != cb.qubit {
            continue;
        }
        let tau = PauliString::single(n, ca.qubit, short_edge_letter(ca.slot, cb.slot));
        acc = &tau * &acc;
    }
    let k = path.n_ll() as i64;
    let phase = acc.phase() * Phase::from_power(3 * k);
    acc.with_phase(phase)
}

/// Operator of a closed loop: opened at its smallest link, which the open
/// path then runs from head to tail.
pub fn compile_loop(dg: &DecoratedGraph, lp: &DirectedPath) -> Result<PauliString> {
    if !lp.is_loop {
        return Err(Error::NotALoop);
    }
    lp.check_edges(dg)?;
    let steps = lp.steps();
    let (pos, _) = steps
        .iter()
        .enumerate()
        .filter(|(_, (a, b))| a / 4 != b / 4)
        .min_by_key(|(_, (a, b))| ((*a).min(*b), (*a).max(*b)))
        .ok_or_else(|| Error::InvalidPath("loop uses no link".into()))?;
    let n = lp.verts.len();
    let start = (pos + 1) % n;
    let verts: Vec<usize> = (0..n).map(|k| lp.verts[(start + k) % n]).collect();
    compile_line(dg, &DirectedPath::open(verts))
}

/// Stabilizer B(P) of an interior face of the surface graph.
pub fn compile_stabilizer(dg: &DecoratedGraph, graph_face: usize) -> Result<PauliString> {
    let f = dg.graph().faces().get(graph_face).ok_or(Error::NotALoop)?;
    if f.outer {
        return Err(Error::NotALoop);
    }
    compile_loop(dg, &crate::kasteleyn::plaquette_loop(dg, graph_face))
}

/// All stabilizers, in face order.
pub fn stabilizers(dg: &DecoratedGraph) -> Vec<PauliString> {
    dg.graph()
        .interior_faces()
        .map(|(i, _)| compile_stabilizer(dg, i).expect("interior faces compile"))
        .collect()
}

/// A walk through the faces of the surface graph, each step crossing one link.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThooftPath {
    pub faces: Vec<usize>,
    /// Dart of the crossed link on the boundary of the face being left.
    pub crossings: Vec<Corner>,
}

impl ThooftPath {
    /// Build from face indices, crossing the first shared link at each step.
    pub fn through(graph: &SurfaceGraph, faces: &[usize]) -> Result<ThooftPath> {
        if faces.len() < 2 {
            return Err(Error::InvalidPath("a 't Hooft path needs two faces".into()));
        }
        let mut crossings = Vec::new();
        for w in faces.windows(2) {
            let (f, g) = (&graph.faces()[w[0]], &graph.faces()[w[1]]);
            let d = f
                .darts
                .iter()
                .copied()
                .find(|&d| graph.partner(d).is_some_and(|t| g.darts.contains(&t)))
                .ok_or_else(|| {
                    Error::InvalidPath(format!(
                        "faces {} and {} share no link",
                        graph.face_label(w[0]),
                        graph.face_label(w[1])
                    ))
                })?;
            crossings.push(d);
        }
        Ok(ThooftPath { faces: faces.to_vec(), crossings })
    }

    pub fn len(&self) -> usize {
        self.crossings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.crossings.is_empty()
    }

    pub fn is_closed(&self) -> bool {
        self.faces.first() == self.faces.last()
    }
}

/// Boundary segment of face `f`, counter-clockwise from `from` to `to`.
fn face_segment(dg: &DecoratedGraph, graph_face: usize, from: usize, to: usize) -> Result<DirectedPath> {
    let cyc = &dg.faces()[dg.plaquette_face(graph_face)].verts;
    let m = cyc.len();
    let p = cyc.iter().position(|&v| v == from).ok_or(Error::SegmentNotOnFace)?;
    let mut verts = vec![from];
    let mut k = p;
    while cyc[k] != to {
        k = (k + 1) % m;
        verts.push(cyc[k]);
        if k == p {
            return Err(Error::SegmentNotOnFace);
        }
    }
    Ok(DirectedPath::open(verts))
}

/// Wilson-line segments realising a 't Hooft path: for each pair of
/// consecutive crossings, the arc of the face between them on the right of
/// the path. With an odd count the last crossing is joined to `anyon`.
pub fn thooft_segments(
    dg: &DecoratedGraph,
    tp: &ThooftPath,
    anyon: Option<Corner>,
) -> Result<Vec<DirectedPath>> {
    let g = dg.graph();
    let k = tp.len();
    if k % 2 == 1 && anyon.is_none() {
        return Err(Error::OddOpenPath);
    }
    let mut out = Vec::new();
    let mut j = 0;
    while j < k {
        let face = tp.faces[j + 1];
        // entering crossing: its far end is the dart of `face`; head = our dart's partner
        let enter = g.partner(tp.crossings[j]).unwrap();
        let head = g.partner(enter).unwrap().vertex();
        let tail = if j + 1 < k {
            tp.crossings[j + 1].vertex()
        } else {
            anyon.unwrap().vertex()
        };
        out.push(face_segment(dg, face, head, tail)?);
        j += 2;
    }
    Ok(out)
}

pub fn compile_thooft(dg: &DecoratedGraph, tp: &ThooftPath, anyon: Option<Corner>) -> Result<PauliString> {
    let n = dg.graph().num_qubits();
    let mut acc = PauliString::identity(n);
    for seg in thooft_segments(dg, tp, anyon)? {
        let w = compile_line(dg, &seg)?;
        acc = &w * &acc;
    }
    Ok(acc)
}

/// Sense of a π/4 rotation: `Plus` is exp(−iπ/4·P), `Minus` is exp(+iπ/4·P).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum RotSign {
    Plus,
    Minus,
}

impl RotSign {
    pub fn flipped(self) -> RotSign {
        match self {
            RotSign::Plus => RotSign::Minus,
            RotSign::Minus => RotSign::Plus,
        }
    }

    /// +1 for `Plus`, −1 for `Minus`.
    pub fn value(self) -> i32 {
        match self {
            RotSign::Plus => 1,
            RotSign::Minus => -1,
        }
    }

    pub fn from_value(v: i32) -> RotSign {
        if v >= 0 {
            RotSign::Plus
        } else {
            RotSign::Minus
        }
    }
}

impl fmt::Display for RotSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RotSign::Plus => "+",
            RotSign::Minus => "-",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PauliRotation {
    pub axis: PauliString,
    pub sign: RotSign,
}

pub fn make_rotation(axis: PauliString, sign: RotSign) -> Result<PauliRotation> {
    if !axis.is_hermitian() {
        return Err(Error::NonHermitianAxis);
    }
    Ok(PauliRotation { axis, sign })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    H(usize),
    S(usize),
    Sdg(usize),
    X(usize),
    Z(usize),
    Cnot(usize, usize),
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::H(q) => write!(f, "H {q}"),
            Gate::S(q) => write!(f, "S {q}"),
            Gate::Sdg(q) => write!(f, "SDG {q}"),
            Gate::X(q) => write!(f, "X {q}"),
            Gate::Z(q) => write!(f, "Z {q}"),
            Gate::Cnot(c, t) => write!(f, "CNOT {c} {t}"),
        }
    }
}

impl FromStr for Gate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Gate> {
        let bad = || Error::Parse { line: 0, msg: format!("bad gate '{s}'") };
        let tok: Vec<&str> = s.split_whitespace().collect();
        let q = |i: usize| tok.get(i).and_then(|t| t.parse::<usize>().ok()).ok_or_else(bad);
        Ok(match (tok.first().copied(), tok.len()) {
            (Some("H"), 2) => Gate::H(q(1)?),
            (Some("S"), 2) => Gate::S(q(1)?),
            (Some("SDG"), 2) => Gate::Sdg(q(1)?),
            (Some("X"), 2) => Gate::X(q(1)?),
            (Some("Z"), 2) => Gate::Z(q(1)?),
            (Some("CNOT"), 3) => Gate::Cnot(q(1)?, q(2)?),
            _ => return Err(bad()),
        })
    }
}

/// Gate sequence (in time order) equal to a rotation times e^{iπ·phase/4}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub gates: Vec<Gate>,
    /// The rotation equals e^{iπ·global_phase/4} times the gate product.
    pub global_phase: u8,
}

impl Decomposition {
    pub fn to_text(&self) -> String {
        let mut out = format!("phase {}/4\n", self.global_phase);
        for g in &self.gates {
            out.push_str(&format!("{g}\n"));
        }
        out
    }
}

pub fn decompose(rot: &PauliRotation) -> Decomposition {
    let axis = &rot.axis;
    let support = axis.support();
    // effective angle sign: exp(-iπ/4 · s · Z) with s = ±1
    let s = rot.sign.value() * axis.phase().sign().unwrap_or(1) as i32;
    if support.is_empty() {
        // exp(-iπ/4 · s)
        return Decomposition { gates: vec![], global_phase: if s > 0 { 7 } else { 1 } };
    }
    let mut basis = Vec::new();
    for &q in &support {
        match axis.get(q) {
            Letter::X => basis.push(Gate::H(q)),
            Letter::Y => {
                basis.push(Gate::Sdg(q));
                basis.push(Gate::H(q));
            }
            _ => {}
        }
    }
    let target = *support.last().unwrap();
    let ladder: Vec<Gate> = support[..support.len() - 1].iter().map(|&c| Gate::Cnot(c, target)).collect();
    let mut gates = basis.clone();
    gates.extend(&ladder);
    // exp(-iπ/4 Z) = e^{-iπ/4} S, exp(+iπ/4 Z) = e^{iπ/4} S†
    let (core, phase) = if s > 0 { (Gate::S(target), 7) } else { (Gate::Sdg(target), 1) };
    gates.push(core);
    gates.extend(ladder.iter().rev());
    for g in basis.iter().rev() {
        gates.push(match *g {
            Gate::Sdg(q) => Gate::S(q),
            other => other,
        });
    }
    Decomposition { gates, global_phase: phase }
}
