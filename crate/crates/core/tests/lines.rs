use psc_core::compile::{compile_line, stabilizers};
use psc_core::decorated::{DecoratedGraph, DirectedPath};
use psc_core::engine::{complete_to_full_rank, conjugate_by_rotation, StabilizerState};
use psc_core::graph::{lattices, Corner, Slot, SurfaceGraph};
use psc_core::kasteleyn::reduce;
use psc_core::moves::{available_moves, extend_line};

fn code_state(g: &SurfaceGraph) -> StabilizerState {
    let dg = DecoratedGraph::new(g);
    let n = g.num_qubits();
    StabilizerState::from_stabilizers(n, &complete_to_full_rank(n, &stabilizers(&dg)), 0).unwrap()
}

/// Graph with one pair created at `c`, plus the vacuum line between the pair.
fn with_pair(g: &SurfaceGraph, c: Corner) -> (SurfaceGraph, StabilizerState, DirectedPath) {
    let st = code_state(g);
    let dg = DecoratedGraph::new(g);
    let (g2, ch) = g.delete_link(c).unwrap();
    let cyc = &dg.faces()[dg.plaquette_face(ch.merged_from.0)].verts;
    let m = cyc.len();
    let p = cyc.iter().position(|&v| v == ch.b.vertex()).unwrap();
    let mut verts = vec![];
    let mut k = p;
    loop {
        verts.push(cyc[k]);
        if cyc[k] == ch.a.vertex() {
            break;
        }
        k = (k + 1) % m;
    }
    (g2, st, DirectedPath::open(verts))
}

#[test]
fn canonical_form_differs_by_reduce_sign() {
    let g = SurfaceGraph::build(&lattices::surface_code(5, 5)).unwrap();
    for (q, s) in [(7, Slot::N), (12, Slot::E), (6, Slot::E), (18, Slot::S), (0, Slot::E)] {
        let (g2, st, raw) = with_pair(&g, Corner::new(g.qubit_index(q).unwrap(), s));
        let dg = DecoratedGraph::new(&g2);
        let w_raw = compile_line(&dg, &raw).unwrap();
        assert_eq!(st.expectation(&w_raw).unwrap(), 1, "vacuum pair");
        let (c, sign) = reduce(&raw);
        assert!(c.is_canonical());
        let w_c = compile_line(&dg, &c).unwrap();
        assert_eq!(st.expectation(&(&w_raw * &w_c)).unwrap(), sign, "pair at {q}/{s:?}");
    }
}

#[test]
fn extension_tracks_conjugated_line() {
    let g = SurfaceGraph::build(&lattices::surface_code(5, 5)).unwrap();
    let mut n = 0;
    let mut bad = vec![];
    let mut skipped = 0;
    for (q, s) in [(7, Slot::N), (12, Slot::E), (6, Slot::E), (18, Slot::S)] {
        let (g2, st, raw) = with_pair(&g, Corner::new(g.qubit_index(q).unwrap(), s));
        let (line, _) = reduce(&raw);
        let dg = DecoratedGraph::new(&g2);
        let w = compile_line(&dg, &line).unwrap();
        for end in [line.first(), line.last()] {
            for mv in available_moves(&g2, &dg, Corner::from_vertex(end), false) {
                let mut st2 = st.clone();
                st2.apply_rotation(&mv.rotation).unwrap();
                let moved = conjugate_by_rotation(&w, &mv.rotation);
                let (ext, sign) = extend_line(&line, &mv).unwrap();
                let uses_link = line.steps().iter().any(|&(a, b)| {
                    (a, b) == (mv.target.vertex(), mv.partner.vertex()) || (b, a) == (mv.target.vertex(), mv.partner.vertex())
                });
                if uses_link {
                    skipped += 1;
                }
                let dg2 = DecoratedGraph::new(&mv.graph_after);
                let w2 = match compile_line(&dg2, &ext) {
                    Ok(w) => w,
                    Err(e) => {
                        let lab = |p: &DirectedPath| p.verts.iter().map(|&v| dg.vertex_label(v)).collect::<Vec<_>>().join(" ");
                        panic!("{e}\nline {}\nmove {}\next {}\nedges ok {:?}", lab(&line), lab(&mv.path), lab(&ext), ext.check_edges(&dg2));
                    }
                };
                let e = st2.expectation(&(&moved * &w2)).unwrap();
                n += 1;
                if e != 1 {
                    bad.push((q, end % 4, mv.ccw, sign, e, ext.is_canonical()));
                }
            }
        }
    }
    assert!(n > 20 && skipped < n);
    assert!(bad.is_empty(), "{} of {n}: {bad:?}", bad.len());
}
