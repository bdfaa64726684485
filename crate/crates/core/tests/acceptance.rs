//! Acceptance checks. Prints one `criterion N: PASS|FAIL ...` line per
//! criterion and exits non-zero if any fails.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::io::Write;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_xorshift::XorShiftRng;

use psc_core::compile::{compile_line, decompose, make_rotation, RotSign};
use psc_core::decorated::{lift_canonical, DecoratedGraph, DirectedPath};
use psc_core::engine::StabilizerState;
use psc_core::ghz::{ghz_experiment, ghz_lattice, GhzVariant};
use psc_core::graph::{lattices, Corner, GraphSpec, Slot, SurfaceGraph};
use psc_core::kasteleyn::*;
use psc_core::moves::{available_moves, extend_line};
use psc_core::oracle::{diamond_check, gate_list_unitary, rotation_unitary, DenseState};
use psc_core::pauli::{Letter, PauliString};
use psc_core::protocol::{
    code_state_strings, plan_exchange, run_engine, run_oracle, BackendKind, Instruction, Machine, Scenario,
};

type Check = std::result::Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn timed(limit: Duration, start: Instant) -> std::result::Result<String, String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {t:.2?}, limit {limit:?}"))?;
    Ok(format!("{t:.2?}"))
}

fn scenario_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn load(name: &str) -> Scenario {
    Scenario::load(&scenario_dir().join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// Scenarios small enough for the statevector oracle.
const GOLDEN: [&str; 6] = [
    "strip_moves.scn",
    "strip_create_fuse.scn",
    "double_braid.scn",
    "composite_control.scn",
    "ghz_exchange12.scn",
    "ghz_exchange13.scn",
];

// ---------------------------------------------------------------- 1

fn random_psc(rng: &mut XorShiftRng) -> Option<SurfaceGraph> {
    let cols = rng.gen_range(2..=8u32);
    let rows = rng.gen_range(2..=(60 / cols).min(7));
    let mut spec = lattices::grid(cols, rows);
    for q in spec.qubits.iter_mut() {
        q.1 .0 += rng.gen_range(-0.12..0.12);
        q.1 .1 += rng.gen_range(-0.12..0.12);
    }
    let p_del = rng.gen_range(0.0..0.25);
    spec.edges.retain(|_| !rng.gen_bool(p_del));
    let id = |x: u32, y: u32| y * cols + x;
    let mut boundary = Vec::new();
    for x in 0..cols - 1 {
        boundary.push((id(x, 0), id(x + 1, 0), Slot::S));
        boundary.push((id(x, rows - 1), id(x + 1, rows - 1), Slot::N));
    }
    for y in 0..rows - 1 {
        boundary.push((id(0, y), id(0, y + 1), Slot::W));
        boundary.push((id(cols - 1, y), id(cols - 1, y + 1), Slot::E));
    }
    let p_digon = rng.gen_range(0.0..0.6);
    for (a, b, s) in boundary {
        let present = spec.edges.iter().any(|e| (e.a, e.b) == (a, b) || (e.a, e.b) == (b, a));
        if present && rng.gen_bool(p_digon) {
            lattices::digon(&mut spec, a, b, s);
        }
    }
    SurfaceGraph::build(&spec).ok()
}

fn balance_ok(g: &SurfaceGraph) -> bool {
    let (nq, ns, nsig) = (g.num_qubits() as i64, g.num_stabilizers() as i64, g.count_sigma() as i64);
    nsig % 2 == 0 && 2 * (nq - ns) == nsig - 2
}

fn random_deformation(g: &SurfaceGraph, rng: &mut XorShiftRng) -> Option<SurfaceGraph> {
    let corners: Vec<Corner> = (0..g.num_qubits()).flat_map(|q| Slot::ALL.map(|s| Corner::new(q, s))).collect();
    let paired: Vec<Corner> = corners.iter().copied().filter(|&c| g.is_paired(c)).collect();
    let unpaired = g.unpaired();
    match rng.gen_range(0..3) {
        0 => g.delete_link(*paired.choose(rng)?).ok().map(|r| r.0),
        1 => {
            let (a, b) = (*unpaired.choose(rng)?, *unpaired.choose(rng)?);
            g.add_link(a, b).ok().map(|r| r.0)
        }
        _ => {
            let dg = DecoratedGraph::new(g);
            let moves = available_moves(g, &dg, *unpaired.choose(rng)?, false);
            moves.choose(rng).map(|m| m.graph_after.clone())
        }
    }
}

fn counting_law() -> Check {
    let start = Instant::now();
    let mut rng = XorShiftRng::seed_from_u64(1);
    let (mut graphs, mut ops, mut largest) = (0, 0, 0);
    while graphs < 200 {
        let Some(g) = random_psc(&mut rng) else { continue };
        graphs += 1;
        largest = largest.max(g.num_qubits());
        ensure(balance_ok(&g), || format!("balance fails on generated graph\n{}", g.to_text()))?;
        let mut cur = g;
        for _ in 0..20 {
            if let Some(next) = random_deformation(&cur, &mut rng) {
                ensure(balance_ok(&next), || format!("balance fails after deformation\n{}", next.to_text()))?;
                cur = next;
                ops += 1;
            }
        }
    }
    let t = timed(Duration::from_secs(5), start)?;
    Ok(format!("{graphs} graphs up to {largest} qubits, {ops} deformations, {t}"))
}

// ---------------------------------------------------------------- 2

/// Every connected sub-grid graph with optional boundary digons on the
/// given shapes, deduplicated by structure.
fn small_graphs() -> Vec<SurfaceGraph> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for (cols, rows) in [(2u32, 1u32), (3, 1), (4, 1), (5, 1), (6, 1), (2, 2), (3, 2), (2, 3)] {
        let base = lattices::grid(cols, rows);
        let mut options = Vec::new();
        for (i, e) in base.edges.iter().enumerate() {
            let (pa, pb) = (base.qubits[e.a as usize].1, base.qubits[e.b as usize].1);
            let horizontal = pa.1 == pb.1;
            let mut out_slots = Vec::new();
            if horizontal {
                if pa.1 == 0.0 {
                    out_slots.push(Slot::S);
                }
                if pa.1 == (rows - 1) as f64 {
                    out_slots.push(Slot::N);
                }
            } else {
                if pa.0 == 0.0 {
                    out_slots.push(Slot::W);
                }
                if pa.0 == (cols - 1) as f64 {
                    out_slots.push(Slot::E);
                }
            }
            for s in out_slots {
                options.push((i, s));
            }
        }
        let ne = base.edges.len();
        for emask in 0u32..1 << ne {
            for dmask in 0u32..1 << options.len() {
                if options.iter().enumerate().any(|(k, (i, _))| dmask >> k & 1 == 1 && emask >> i & 1 == 0) {
                    continue;
                }
                let mut spec = GraphSpec { qubits: base.qubits.clone(), edges: vec![] };
                for (i, e) in base.edges.iter().enumerate() {
                    if emask >> i & 1 == 1 {
                        spec.edges.push(e.clone());
                    }
                }
                for (k, &(i, s)) in options.iter().enumerate() {
                    if dmask >> k & 1 == 1 {
                        let e = &base.edges[i];
                        lattices::digon(&mut spec, e.a, e.b, s);
                    }
                }
                if let Ok(g) = SurfaceGraph::build(&spec) {
                    if seen.insert(g.structure_hash()) {
                        out.push(g);
                    }
                }
            }
        }
    }
    out
}

/// Simple cycles of the qubit multigraph as hop lists, one per edge set.
fn simple_cycles(g: &SurfaceGraph) -> Vec<Vec<Corner>> {
    fn go(
        g: &SurfaceGraph,
        s: usize,
        q: usize,
        on: &mut Vec<bool>,
        hops: &mut Vec<Corner>,
        keys: &mut HashSet<BTreeSet<usize>>,
        out: &mut Vec<Vec<Corner>>,
    ) {
        for slot in Slot::ALL {
            let c = Corner::new(q, slot);
            let Some(t) = g.partner(c) else { continue };
            if t.qubit == s {
                let back_on_first = hops.len() == 1 && g.partner(hops[0]) == Some(c);
                if !hops.is_empty() && !back_on_first {
                    let mut cyc = hops.clone();
                    cyc.push(c);
                    let key: BTreeSet<usize> =
                        cyc.iter().map(|&h| h.vertex().min(g.partner(h).unwrap().vertex())).collect();
                    if keys.insert(key) {
                        out.push(cyc);
                    }
                }
            } else if t.qubit > s && !on[t.qubit] {
                on[t.qubit] = true;
                hops.push(c);
                go(g, s, t.qubit, on, hops, keys, out);
                hops.pop();
                on[t.qubit] = false;
            }
        }
    }
    let mut out = Vec::new();
    let mut keys = HashSet::new();
    for s in 0..g.num_qubits() {
        let mut on = vec![false; g.num_qubits()];
        on[s] = true;
        go(g, s, s, &mut on, &mut Vec::new(), &mut keys, &mut out);
    }
    out
}

fn ccw_canonical_loop(g: &SurfaceGraph, dg: &DecoratedGraph, hops: &[Corner]) -> std::result::Result<DirectedPath, String> {
    let lp = lift_canonical(g, hops, None, None, true).map_err(|e| e.to_string())?;
    let (_, ccw) = dg.enclosed_faces(&lp.verts).map_err(|e| e.to_string())?;
    if ccw {
        return Ok(lp);
    }
    let rev: Vec<Corner> = hops.iter().rev().map(|&h| g.partner(h).unwrap()).collect();
    let lp = lift_canonical(g, &rev, None, None, true).map_err(|e| e.to_string())?;
    let (_, ccw) = dg.enclosed_faces(&lp.verts).map_err(|e| e.to_string())?;
    ensure(ccw, || "reversed loop is still clockwise".into())?;
    Ok(lp)
}

fn flux_law() -> Check {
    let start = Instant::now();
    let mut rng = XorShiftRng::seed_from_u64(2);
    let graphs = small_graphs();
    let (mut loops, mut checks) = (0usize, 0usize);
    for g in &graphs {
        let dg = DecoratedGraph::new(g);
        let mut paths = Vec::new();
        for hops in simple_cycles(g) {
            paths.push(ccw_canonical_loop(g, &dg, &hops)?);
        }
        for q in 0..g.num_qubits() {
            paths.push(DirectedPath::closed((0..4).map(|s| 4 * q + s).collect()));
        }
        let expected: Vec<i32> = paths
            .iter()
            .map(|p| enclosed_sigma(&dg, p).map(|n| if n % 2 == 0 { -1 } else { 1 }))
            .collect::<psc_core::Result<_>>()
            .map_err(|e| e.to_string())?;
        for _ in 0..100 {
            let mut o = random_kasteleyn(&dg, &mut rng);
            for _ in 0..rng.gen_range(0..8) {
                o = gauge(&dg, &o, rng.gen_range(0..dg.num_vertices()));
            }
            ensure(is_kasteleyn(&dg, &o), || "sampled orientation is not Kasteleyn".into())?;
            for (p, &want) in paths.iter().zip(&expected) {
                let got = wk(&dg, p, &o).map_err(|e| e.to_string())?;
                ensure(got == want, || format!("wk {got} != {want} on\n{}", g.to_text()))?;
                checks += 1;
            }
        }
        loops += paths.len();
    }
    let t = timed(Duration::from_secs(30), start)?;
    Ok(format!("{} graphs, {loops} loops, {checks} orientation checks, 0 exceptions, {t}", graphs.len()))
}

// ---------------------------------------------------------------- 3

fn random_walk(g: &SurfaceGraph, from: usize, to: usize, rng: &mut XorShiftRng) -> Option<Vec<Corner>> {
    fn go(g: &SurfaceGraph, q: usize, to: usize, seen: &mut [bool], hops: &mut Vec<Corner>, rng: &mut XorShiftRng) -> bool {
        if q == to {
            return true;
        }
        seen[q] = true;
        let mut slots = Slot::ALL.to_vec();
        slots.shuffle(rng);
        for s in slots {
            let c = Corner::new(q, s);
            if let Some(t) = g.partner(c) {
                if !seen[t.qubit] {
                    hops.push(c);
                    if go(g, t.qubit, to, seen, hops, rng) {
                        return true;
                    }
                    hops.pop();
                }
            }
        }
        false
    }
    let mut seen = vec![false; g.num_qubits()];
    let mut hops = Vec::new();
    go(g, from, to, &mut seen, &mut hops, rng).then_some(hops)
}

fn random_line(g: &SurfaceGraph, a: Corner, b: Corner, rng: &mut XorShiftRng) -> Option<DirectedPath> {
    let hops = random_walk(g, a.qubit, b.qubit, rng)?;
    if hops.is_empty() {
        return None;
    }
    lift_canonical(g, &hops, Some(a.slot), Some(b.slot), false).ok()
}

/// A lattice with a few interior links cut, so that σ appear in the bulk.
fn calculus_graph(rng: &mut XorShiftRng) -> SurfaceGraph {
    let mut g = match rng.gen_range(0..3) {
        0 => SurfaceGraph::build(&lattices::surface_code(5, 5)).unwrap(),
        1 => SurfaceGraph::build(&lattices::surface_code(7, 5)).unwrap(),
        _ => SurfaceGraph::build(&ghz_lattice()).unwrap(),
    };
    for _ in 0..rng.gen_range(0..4) {
        let q = rng.gen_range(0..g.num_qubits());
        let c = Corner::new(q, *Slot::ALL.choose(rng).unwrap());
        if g.is_paired(c) {
            if let Ok((h, ch)) = g.delete_link(c) {
                if !ch.boundary {
                    g = h;
                }
            }
        }
    }
    g
}

fn calculus() -> Check {
    let start = Instant::now();
    let mut rng = XorShiftRng::seed_from_u64(3);
    let (mut deforms, mut reversals, mut ratios) = (0usize, 0usize, 0usize);
    while deforms + ratios < 10_000 {
        let g = calculus_graph(&mut rng);
        let dg = DecoratedGraph::new(&g);
        let orients: Vec<Orientation> = (0..4).map(|_| random_kasteleyn(&dg, &mut rng)).collect();
        let sig = g.unpaired();
        for _ in 0..200 {
            let (a, b) = (*sig.choose(&mut rng).unwrap(), *sig.choose(&mut rng).unwrap());
            if a.qubit == b.qubit {
                continue;
            }
            let Some(p) = random_line(&g, a, b, &mut rng) else { continue };
            let o = &orients[rng.gen_range(0..orients.len())];
            let w = wk(&dg, &p, o).map_err(|e| e.to_string())?;

            let r = reverse(&p);
            ensure(wk(&dg, &r.naive, o).unwrap() == r.naive_sign * w, || "naive reversal sign".into())?;
            ensure(wk(&dg, &r.canonical, o).unwrap() == r.canonical_sign * w, || "canonical reversal sign".into())?;
            reversals += 1;

            let i = rng.gen_range(0..p.verts.len() - 1);
            if let Some(f) = dg.left_face(p.verts[i], p.verts[i + 1]).filter(|&f| !dg.faces()[f].outer) {
                let mut j = i + 1;
                while j + 1 < p.verts.len() && dg.left_face(p.verts[j], p.verts[j + 1]) == Some(f) {
                    j += 1;
                }
                let (q, s) = deform_face(&dg, &p, f, i, j).map_err(|e| e.to_string())?;
                ensure(wk(&dg, &q, o).unwrap() == s * w, || "deform_face sign".into())?;
                deforms += 1;
            }

            if let Some(q) = random_line(&g, a, b, &mut rng) {
                if let Ok(r) = line_ratio(&dg, &p, &q) {
                    for o in &orients {
                        let direct = wk(&dg, &p, o).unwrap() * wk(&dg, &q, o).unwrap();
                        ensure(r == direct, || format!("line_ratio {r} but wk product {direct}"))?;
                    }
                    ratios += 1;
                }
            }
        }
    }
    let t = timed(Duration::from_secs(30), start)?;
    Ok(format!("{deforms} deformations, {reversals} reversals, {ratios} line ratios over 4 orientations each, {t}"))
}

// ---------------------------------------------------------------- 4

fn diamond() -> Check {
    let r = diamond_check();
    ensure(r.all_ok(), || format!("{r:?}"))?;
    ensure(r.max_error < 1e-12, || format!("max error {:e}", r.max_error))?;
    Ok(format!("all identities hold, max matrix-element error {:.1e}", r.max_error))
}

// ---------------------------------------------------------------- 5

fn equivalence() -> Check {
    let start = Instant::now();
    let mut runs = 0;
    for name in GOLDEN {
        let sc = load(name);
        for seed in 0..50 {
            let a = run_engine(&sc, seed).map_err(|e| format!("{name} engine: {e}"))?.0.to_json();
            let b = run_oracle(&sc, seed).map_err(|e| format!("{name} oracle: {e}"))?.0.to_json();
            ensure(a == b, || format!("{name} seed {seed}: records differ"))?;
            runs += 1;
        }
    }
    let t = timed(Duration::from_secs(120), start)?;
    Ok(format!("{} scenarios × 50 seeds byte-identical ({runs} pairs), {t}", GOLDEN.len()))
}

// ---------------------------------------------------------------- 6

fn outcomes(sc: &Scenario, seed: u64) -> std::result::Result<Vec<(String, i32)>, String> {
    let rec = run_engine(sc, seed).map_err(|e| e.to_string())?.0;
    Ok(rec.instructions.into_iter().filter_map(|i| i.outcome.map(|o| (i.op, o))).collect())
}

fn non_abelian() -> Check {
    let start = Instant::now();
    let braid = load("double_braid.scn");
    let control = load("composite_control.scn");
    let want_braid = [
        ("measure wilson s1 s2", 1),
        ("measure wilson s3 s4", 1),
        ("measure wilson s1 s2", 1),
        ("measure wilson s1 s2 initial", -1),
        ("measure wilson s3 s4 initial", -1),
        ("fuse s1 s2", -1),
        ("fuse s3 s4", -1),
    ];
    let want_control = [("measure wilson s1 s2 initial", 1), ("fuse s1 s2", 1)];
    for seed in 0..1000 {
        let got = outcomes(&braid, seed)?;
        let want: Vec<(String, i32)> = want_braid.iter().map(|&(o, v)| (o.to_string(), v)).collect();
        ensure(got == want, || format!("double braid seed {seed}: {got:?}"))?;
        let got = outcomes(&control, seed)?;
        let want: Vec<(String, i32)> = want_control.iter().map(|&(o, v)| (o.to_string(), v)).collect();
        ensure(got == want, || format!("control seed {seed}: {got:?}"))?;
    }
    let t = timed(Duration::from_secs(10), start)?;
    Ok(format!(
        "1000 seeds: creation-path line +1 → −1 after R²₂₃, fusions ε,ε; ε-composite control keeps +1, fuses to vacuum; {t}"
    ))
}

// ---------------------------------------------------------------- 7

/// Replay a scenario on the engine, expanding braids into elementary moves,
/// and call `after_move(before_signs, after_signs)` for every move.
fn replay(sc: &Scenario, seed: u64, check: &mut dyn FnMut(&str, &BTreeMap<String, i32>, &BTreeMap<String, i32>) -> std::result::Result<(), String>) -> std::result::Result<(usize, usize), String> {
    let g = sc.build_graph().map_err(|e| e.to_string())?;
    let dg = DecoratedGraph::new(&g);
    let n = g.num_qubits();
    let st = StabilizerState::from_stabilizers(n, &code_state_strings(&dg, &[]), seed).map_err(|e| e.to_string())?;
    let mut m = Machine::new(g, st);
    let (mut moves, mut braids) = (0, 0);
    let err = |e: psc_core::Error| e.to_string();
    let step = |m: &mut Machine<StabilizerState>, name: &str, target: Corner, check: &mut dyn FnMut(&str, &BTreeMap<String, i32>, &BTreeMap<String, i32>) -> std::result::Result<(), String>| -> std::result::Result<(), String> {
        let before = m.stabilizer_signs().map_err(err)?;
        m.move_anyon(name, target).map_err(err)?;
        let after = m.stabilizer_signs().map_err(err)?;
        check(name, &before, &after)
    };
    for ins in &sc.instructions {
        match ins {
            Instruction::Init { logical } => {
                let strings = code_state_strings(&m.dg, logical);
                m.backend = StabilizerState::from_stabilizers(n, &strings, seed).map_err(err)?;
            }
            Instruction::Create { a, b, q1, q2 } => m.create(a, b, *q1, *q2).map_err(err)?,
            Instruction::Move { anyon, target } => {
                let t = m.graph.parse_corner(target).map_err(err)?;
                step(&mut m, anyon, t, check)?;
                moves += 1;
            }
            Instruction::Braid { a, b, inverse } => {
                let hash = m.graph.structure_hash();
                for (name, t) in plan_exchange(&m.graph, &m.anyons, a, b, *inverse).map_err(err)? {
                    step(&mut m, &name, t, check)?;
                    moves += 1;
                }
                ensure(m.graph.structure_hash() == hash, || format!("braid {a} {b} changed the graph structure"))?;
                braids += 1;
            }
            Instruction::MeasureWilson { a, b, route } => {
                m.measure_wilson(a, b, route).map_err(err)?;
            }
            Instruction::MeasureThooft { faces } => {
                m.measure_thooft(faces).map_err(err)?;
            }
            Instruction::Fuse { a, b } => {
                m.fuse(a, b).map_err(err)?;
            }
            Instruction::Expect { obs } => {
                m.backend.expectation(obs).map_err(err)?;
            }
            Instruction::Flux { anyon, faces } => m.attach_flux(anyon, faces).map_err(err)?,
        }
    }
    Ok((moves, braids))
}

fn flux_free() -> Check {
    let mut names: Vec<&str> = GOLDEN.to_vec();
    names.extend(["create_fuse.scn", "empty.scn"]);
    let (mut moves, mut braids) = (0, 0);
    for name in names {
        let sc = load(name);
        let has_flux = sc.instructions.iter().any(|i| matches!(i, Instruction::Flux { .. }));
        for seed in 0..3 {
            let mut check = |anyon: &str, before: &BTreeMap<String, i32>, after: &BTreeMap<String, i32>| {
                // face labels follow the moved corners, so compare the sign multisets
                let sorted = |m: &BTreeMap<String, i32>| {
                    let mut v: Vec<i32> = m.values().copied().collect();
                    v.sort();
                    v
                };
                ensure(sorted(before) == sorted(after), || format!("{name}: moving {anyon} changed stabilizer signs {before:?} {after:?}"))?;
                ensure(has_flux || after.values().all(|&s| s == 1), || format!("{name}: stabilizer not +1 after moving {anyon}"))
            };
            let (m, b) = replay(&sc, seed, &mut check).map_err(|e| format!("{name}: {e}"))?;
            moves += m;
            braids += b;
        }
    }
    Ok(format!("{moves} elementary moves leave every stabilizer unchanged (+1 without attached flux); {braids} braids restore the graph"))
}

// ---------------------------------------------------------------- 8

fn is_simple(p: &DirectedPath) -> bool {
    let mut seen = HashSet::new();
    p.verts.iter().all(|v| seen.insert(*v))
}

fn line_lattices() -> Vec<SurfaceGraph> {
    [
        lattices::strip(5),
        lattices::strip(6),
        lattices::strip(4),
        lattices::surface_code(3, 3),
        lattices::grid(4, 3),
        lattices::grid(3, 3),
        ghz_lattice(),
    ]
    .iter()
    .map(|s| SurfaceGraph::build(s).unwrap())
    .collect()
}

/// Canonical creation line of a pair made by cutting the link at `c`, from
/// the partner corner to `c`.
fn creation_line(g: &SurfaceGraph, c: Corner) -> Option<(SurfaceGraph, DirectedPath)> {
    let dg = DecoratedGraph::new(g);
    let (g2, ch) = g.delete_link(c).ok()?;
    if ch.boundary {
        return None;
    }
    let cyc = &dg.faces()[dg.plaquette_face(ch.merged_from.0)].verts;
    let m = cyc.len();
    let mut k = cyc.iter().position(|&v| v == ch.b.vertex())?;
    let mut verts = vec![];
    loop {
        verts.push(cyc[k]);
        if cyc[k] == ch.a.vertex() {
            break;
        }
        k = (k + 1) % m;
    }
    Some((g2, reduce(&DirectedPath::open(verts)).0))
}

fn line_extension() -> Check {
    let mut rng = XorShiftRng::seed_from_u64(8);
    let lats = line_lattices();
    let mut seen = HashSet::new();
    let (mut n, mut worst, mut tries) = (0, 0.0f64, 0);
    let mut why: BTreeMap<&str, usize> = BTreeMap::new();
    while n < 100 {
        tries += 1;
        ensure(tries < 100_000, || format!("only {n} instances found, rejections {why:?}"))?;
        let li = rng.gen_range(0..lats.len());
        let g = &lats[li];
        let c = Corner::new(rng.gen_range(0..g.num_qubits()), *Slot::ALL.choose(&mut rng).unwrap());
        if !g.is_paired(c) {
            continue;
        }
        let Some((mut cur, mut line)) = creation_line(g, c) else { continue };
        // a few earlier moves, kept inside the same regime
        let pre = rng.gen_range(0..3);
        let mut history = vec![(li, c.vertex())];
        for k in 0..=pre {
            let dg = DecoratedGraph::new(&cur);
            let end = if rng.gen_bool(0.5) { line.first() } else { line.last() };
            let anyon = Corner::from_vertex(end);
            let moves = available_moves(&cur, &dg, anyon, false);
            let Some(mv) = moves.choose(&mut rng) else {
                *why.entry("no move").or_insert(0) += 1;
                break;
            };
            history.push((end, mv.target.vertex()));
            let face = cur.face_of_corner(anyon);
            // the line's other end may share the plaquette, no third σ may
            let other = Corner::from_vertex(if end == line.first() { line.last() } else { line.first() });
            let lonely = cur.unpaired().iter().all(|&u| u == anyon || u == other || cur.face_of_corner(u) != face);
            let uses_link = line.steps().iter().any(|&(a, b)| {
                let (t, p) = (mv.target.vertex(), mv.partner.vertex());
                (a, b) == (t, p) || (a, b) == (p, t)
            });
            let raw = if line.last() == end { line.concat(&mv.path) } else { mv.path.reversed().concat(&line) };
            let Ok(raw) = raw else {
                *why.entry("concat").or_insert(0) += 1;
                break;
            };
            let Ok((ext, _)) = extend_line(&line, mv) else {
                *why.entry("extend").or_insert(0) += 1;
                break;
            };
            if !(lonely && !uses_link && is_simple(&line) && is_simple(&raw) && is_simple(&ext)) {
                *why.entry(["lonely", "link", "line", "raw", "ext"][[lonely, !uses_link, is_simple(&line), is_simple(&raw), is_simple(&ext)].iter().position(|b| !b).unwrap()]).or_insert(0) += 1;
                break;
            }
            if k == pre {
                if !seen.insert(history.clone()) {
                    *why.entry("dup").or_insert(0) += 1;
                    break;
                }
                // the instance: W_γ' U|ψ⟩ against U W_γ|ψ⟩ on the statevector
                let nq = cur.num_qubits();
                let psi = DenseState::from_stabilizers(nq, &code_state_strings(&dg, &[]), 0).map_err(|e| e.to_string())?;
                let w_old = compile_line(&dg, &line).map_err(|e| e.to_string())?;
                let w_new = compile_line(&DecoratedGraph::new(&mv.graph_after), &ext).map_err(|e| e.to_string())?;
                let mut lhs = psi.clone();
                lhs.apply_rotation(&mv.rotation).unwrap();
                lhs.apply_pauli(&w_new).unwrap();
                let mut rhs = psi;
                rhs.apply_pauli(&w_old).unwrap();
                rhs.apply_rotation(&mv.rotation).unwrap();
                let d = lhs.distance(&rhs);
                worst = worst.max(d);
                ensure(d < 1e-12, || format!("amplitude error {d:e} on lattice {li}, history {history:?}"))?;
                n += 1;
            }
            line = ext;
            cur = mv.graph_after.clone();
        }
    }
    Ok(format!("{n} distinct (move, line) instances, max amplitude error {worst:.1e}, rejected {why:?}"))
}

// ---------------------------------------------------------------- 9

const GHZ12: [(&str, i32); 14] = [
    ("ZII", 0), ("IZI", 0), ("IIZ", 0), ("ZZI", 1), ("IZZ", 1), ("ZIZ", 1),
    ("XXX", 0), ("XXY", 1), ("XYX", 1), ("YXX", 1), ("XYY", 0), ("YXY", 0), ("YYX", 0), ("YYY", -1),
];

const GHZ13: [(&str, i32); 14] = [
    ("ZII", 0), ("IZI", 0), ("IIZ", 0), ("ZZI", 1), ("IZZ", 1), ("ZIZ", 1),
    ("XXX", 1), ("XXY", 0), ("XYX", 0), ("YXX", 0), ("XYY", -1), ("YXY", -1), ("YYX", -1), ("YYY", 0),
];

fn ghz() -> Check {
    for (variant, table, phase, file) in [
        (GhzVariant::Exchange12, GHZ12, 1u8, "ghz_exchange12.scn"),
        (GhzVariant::Exchange13, GHZ13, 0, "ghz_exchange13.scn"),
    ] {
        let rec = ghz_experiment(variant, BackendKind::Both, 0).map_err(|e| e.to_string())?;
        ensure(rec.before.values().all(|&v| v == 1), || format!("{variant:?}: product state not |000⟩"))?;
        let want: BTreeMap<String, i32> = table.iter().map(|&(k, v)| (k.to_string(), v)).collect();
        ensure(rec.after == want, || format!("{variant:?}: {:?}", rec.after))?;
        ensure(rec.phase_quarters == Some(phase) && rec.flux_free, || format!("{variant:?}: {rec:?}"))?;
        // the shipped scenario measures the same strings in the same order
        let sc = load(file);
        let got: Vec<i32> = outcomes(&sc, 0)?.into_iter().map(|(_, v)| v).collect();
        let mut expect = vec![1, 1, 1];
        expect.extend(table[3..].iter().map(|&(_, v)| v));
        ensure(got == expect, || format!("{file}: {got:?}"))?;
    }
    Ok("exchange12 → GHZ_{π/2}, exchange13 → GHZ_0; 14 expectations each match the frozen tables on both backends".into())
}

// ---------------------------------------------------------------- 10

fn random_axis(rng: &mut XorShiftRng, n: usize) -> PauliString {
    let mut p = PauliString::identity(n);
    for q in 0..n {
        p.set(q, *[Letter::I, Letter::X, Letter::Y, Letter::Z].choose(rng).unwrap());
    }
    if rng.gen_bool(0.5) {
        p = p.negated();
    }
    p
}

fn random_state(rng: &mut XorShiftRng, n: usize) -> DenseState {
    let amps = (0..1 << n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    DenseState::from_amplitudes(amps, 0).unwrap()
}

fn clifford() -> Check {
    let mut rng = XorShiftRng::seed_from_u64(10);
    let mut worst = 0.0f64;
    let mut full = 0;
    for k in 0..500 {
        let n = rng.gen_range(1..=10);
        let axis = random_axis(&mut rng, n);
        let sign = if rng.gen_bool(0.5) { RotSign::Plus } else { RotSign::Minus };
        let rot = make_rotation(axis.clone(), sign).map_err(|e| e.to_string())?;
        let d = decompose(&rot);
        let phase = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4 * d.global_phase as f64);
        if n <= 5 {
            // whole unitary, compared up to a global phase
            let (u, v) = (rotation_unitary(&rot), gate_list_unitary(n, &d.gates));
            let (i0, j0) = (0..1 << n)
                .flat_map(|a| (0..1 << n).map(move |b| (a, b)))
                .find(|&(a, b)| u[a][b].norm() > 0.1)
                .unwrap();
            let ph = u[i0][j0] / v[i0][j0];
            for a in 0..1 << n {
                for b in 0..1 << n {
                    worst = worst.max((u[a][b] - v[a][b] * ph).norm());
                }
            }
            full += 1;
        }
        // on a generic state, with the reported phase
        let psi = random_state(&mut rng, n);
        let mut want = psi.clone();
        want.apply_rotation(&rot).unwrap();
        let mut got = psi;
        for &g in &d.gates {
            got.apply_gate(g);
        }
        let scaled = DenseState::from_amplitudes(got.amplitudes().iter().map(|a| a * phase).collect(), 0).unwrap();
        let e = want.distance(&scaled);
        worst = worst.max(e);
        ensure(worst < 1e-12, || format!("axis {k} ({}, {sign:?}): error {worst:e}", axis.to_text()))?;
    }
    Ok(format!("500 axes on 1..=10 qubits ({full} as full unitaries), max error {worst:.1e}"))
}

// ---------------------------------------------------------------- 11

fn performance() -> Check {
    let text = "lattice strip 50\nseed 4\ninit\ncreate s1 s2 edge 74 24\ncreate s4 s3 edge 76 26\n\
                braid s2 s3\nbraid s2 s3\nmeasure wilson s1 s2 initial\nfuse s1 s2\nfuse s3 s4\n";
    let sc = Scenario::parse(text).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let (rec, m) = run_engine(&sc, 4).map_err(|e| e.to_string())?;
    let t = timed(Duration::from_secs(1), start)?;
    let out: Vec<i32> = rec.instructions.iter().filter_map(|i| i.outcome).collect();
    ensure(out == [-1, -1, -1], || format!("outcomes {out:?}"))?;
    Ok(format!("{} qubits, {} rotations, double braid on the engine in {t}", m.graph.num_qubits(), m.rotations.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 11] = [
        ("counting law", counting_law),
        ("Kasteleyn flux law", flux_law),
        ("path calculus", calculus),
        ("diamond model", diamond),
        ("engine-oracle equivalence", equivalence),
        ("non-Abelian statistics", non_abelian),
        ("flux-free motion", flux_free),
        ("line extension", line_extension),
        ("GHZ", ghz),
        ("Clifford decomposition", clifford),
        ("performance", performance),
    ];
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    let mut out = std::io::stdout();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let k = i + 1;
        if !only.is_empty() && !only.contains(&k) {
            continue;
        }
        let res = std::panic::catch_unwind(f).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or(p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        match res {
            Ok(detail) => {
                let _ = writeln!(out, "criterion {k:>2}: PASS {name}: {detail}");
            }
            Err(detail) => {
                failed += 1;
                let _ = writeln!(out, "criterion {k:>2}: FAIL {name}: {detail}");
            }
        }
    }
    if failed > 0 {
        let _ = writeln!(out, "{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
