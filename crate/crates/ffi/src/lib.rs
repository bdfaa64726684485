//! C ABI over `psc-core`.
//!
//! Graphs and protocol machines are opaque handles created and released by
//! the library. Every fallible call returns a [`PscStatus`]; the message of the
//! most recent failure on the calling thread is available from
//! [`psc_last_error`]. Strings handed out by the library must be released
//! with [`psc_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use psc_core::compile::{compile_line, compile_stabilizer, decompose, make_rotation, RotSign};
use psc_core::decorated::DecoratedGraph;
use psc_core::engine::StabilizerState;
use psc_core::graph::{lattices, GraphSpec, SurfaceGraph};
use psc_core::kasteleyn::{find_kasteleyn, is_kasteleyn};
use psc_core::pathspec::parse_line;
use psc_core::pauli::PauliString;
use psc_core::protocol::{code_state_strings, run, BackendKind, Machine, Scenario, WilsonRoute};
use psc_core::Error;

/// Result of every fallible call. Zero is success.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PscStatus {
    Ok = 0,
    NullPointer,
    InvalidUtf8,
    InvalidArgument,
    Panic,
    Parse,
    UnknownQubit,
    DuplicateQubit,
    DuplicatePosition,
    NonPlanarEmbedding,
    BadDegree,
    AngleTie,
    SlotCollision,
    Disconnected,
    EulerViolation,
    LinkAbsent,
    CornersPaired,
    NotAdjacent,
    NoSharedPlaquette,
    NotUnpaired,
    SlotMissing,
    InvalidPath,
    SegmentNotOnFace,
    NonSimpleLoop,
    NotALoop,
    OddOpenPath,
    NonHermitianAxis,
    NonHermitianObservable,
    NonCommuting,
    RankDeficient,
    Inconsistent,
    QubitCountMismatch,
    TooManyQubits,
    ValidationFailed,
    UnsupportedGeometry,
    EndpointMismatch,
    UnknownAnyon,
    BackendDivergence,
    Io,
}

impl From<&Error> for PscStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Parse { .. } => PscStatus::Parse,
            Error::UnknownQubit(_) => PscStatus::UnknownQubit,
            Error::DuplicateQubit(_) => PscStatus::DuplicateQubit,
            Error::DuplicatePosition(..) => PscStatus::DuplicatePosition,
            Error::NonPlanarEmbedding(_) => PscStatus::NonPlanarEmbedding,
            Error::BadDegree { .. } => PscStatus::BadDegree,
            Error::AngleTie(_) => PscStatus::AngleTie,
            Error::SlotCollision(_) => PscStatus::SlotCollision,
            Error::Disconnected => PscStatus::Disconnected,
            Error::EulerViolation(_) => PscStatus::EulerViolation,
            Error::LinkAbsent(_) => PscStatus::LinkAbsent,
            Error::CornersPaired(_) => PscStatus::CornersPaired,
            Error::NotAdjacent(..) => PscStatus::NotAdjacent,
            Error::NoSharedPlaquette(..) => PscStatus::NoSharedPlaquette,
            Error::NotUnpaired(_) => PscStatus::NotUnpaired,
            Error::SlotMissing(_) => PscStatus::SlotMissing,
            Error::InvalidPath(_) => PscStatus::InvalidPath,
            Error::SegmentNotOnFace => PscStatus::SegmentNotOnFace,
            Error::NonSimpleLoop => PscStatus::NonSimpleLoop,
            Error::NotALoop => PscStatus::NotALoop,
            Error::OddOpenPath => PscStatus::OddOpenPath,
            Error::NonHermitianAxis => PscStatus::NonHermitianAxis,
            Error::NonHermitianObservable => PscStatus::NonHermitianObservable,
            Error::NonCommuting(_) => PscStatus::NonCommuting,
            Error::RankDeficient { .. } => PscStatus::RankDeficient,
            Error::Inconsistent => PscStatus::Inconsistent,
            Error::QubitCountMismatch(..) => PscStatus::QubitCountMismatch,
            Error::TooManyQubits { .. } => PscStatus::TooManyQubits,
            Error::ValidationFailed { .. } => PscStatus::ValidationFailed,
            Error::UnsupportedGeometry(_) => PscStatus::UnsupportedGeometry,
            Error::EndpointMismatch(_) => PscStatus::EndpointMismatch,
            Error::UnknownAnyon(_) => PscStatus::UnknownAnyon,
            Error::BackendDivergence(_) => PscStatus::BackendDivergence,
            Error::Io(_) => PscStatus::Io,
        }
    }
}

/// Which simulator executes a scenario.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PscBackend {
    Engine = 0,
    Oracle = 1,
    Both = 2,
}

/// Opaque surface graph.
pub struct PscGraph(SurfaceGraph);

/// Opaque protocol machine on the stabilizer engine.
pub struct PscMachine(Machine<StabilizerState>);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Fail(PscStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(PscStatus::from(&e), format!("{} {e}", e.code()))
    }
}

type FfiResult<T> = std::result::Result<T, Fail>;

fn guard(f: impl FnOnce() -> FfiResult<()>) -> PscStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            PscStatus::Ok
        }
        Ok(Err(Fail(code, msg))) => {
            set_error(&msg);
            code
        }
        Err(_) => {
            set_error("Panic internal error");
            PscStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err(Fail(PscStatus::NullPointer, "NullPointer string argument is null".into()));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(PscStatus::InvalidUtf8, "InvalidUtf8 string argument".into()))
}

unsafe fn handle<'a, T>(p: *const T) -> FfiResult<&'a T> {
    p.as_ref().ok_or_else(|| Fail(PscStatus::NullPointer, "NullPointer handle is null".into()))
}

unsafe fn handle_mut<'a, T>(p: *mut T) -> FfiResult<&'a mut T> {
    p.as_mut().ok_or_else(|| Fail(PscStatus::NullPointer, "NullPointer handle is null".into()))
}

unsafe fn put<T>(out: *mut T, v: T) -> FfiResult<()> {
    if out.is_null() {
        return Err(Fail(PscStatus::NullPointer, "NullPointer output pointer is null".into()));
    }
    out.write(v);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> FfiResult<()> {
    let c = CString::new(s).map_err(|_| Fail(PscStatus::InvalidArgument, "InvalidArgument interior NUL".into()))?;
    put(out, c.into_raw())
}

/// Message of the last failure on this thread, empty after a success. The
/// pointer stays valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn psc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn psc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Build a graph from its text form.
///
/// # Safety
/// `text_ptr` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn psc_graph_parse(text_ptr: *const c_char, out: *mut *mut PscGraph) -> PscStatus {
    guard(|| {
        let g = SurfaceGraph::build(&GraphSpec::parse(text(text_ptr)?)?)?;
        put(out, Box::into_raw(Box::new(PscGraph(g))))
    })
}

/// Surface code patch with `cols × rows` qubits.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn psc_graph_surface_code(cols: u32, rows: u32, out: *mut *mut PscGraph) -> PscStatus {
    guard(|| {
        if cols < 2 || rows < 2 {
            return Err(Fail(PscStatus::InvalidArgument, "InvalidArgument patch needs at least 2×2 qubits".into()));
        }
        let g = SurfaceGraph::build(&lattices::surface_code(cols, rows))?;
        put(out, Box::into_raw(Box::new(PscGraph(g))))
    })
}

/// # Safety
/// `g` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn psc_graph_free(g: *mut PscGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Qubit, stabilizer and unpaired-corner counts.
///
/// # Safety
/// `g` must be a live handle and the outputs writable.
#[no_mangle]
pub unsafe extern "C" fn psc_graph_counts(
    g: *const PscGraph,
    n_qubits: *mut usize,
    n_stabilizers: *mut usize,
    n_sigma: *mut usize,
) -> PscStatus {
    guard(|| {
        let g = &handle(g)?.0;
        put(n_qubits, g.num_qubits())?;
        put(n_stabilizers, g.num_stabilizers())?;
        put(n_sigma, g.count_sigma())
    })
}

/// Check the counting balance and that a Kasteleyn orientation exists.
///
/// # Safety
/// `g` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn psc_graph_verify(g: *const PscGraph) -> PscStatus {
    guard(|| {
        let g = &handle(g)?.0;
        if !g.check_euler_balance() {
            let d = g.num_qubits() as i64 - g.num_stabilizers() as i64 - (g.count_sigma() as i64 / 2 - 1);
            return Err(Error::EulerViolation(d).into());
        }
        let dg = DecoratedGraph::new(g);
        if !is_kasteleyn(&dg, &find_kasteleyn(&dg)) {
            return Err(Error::InvalidPath("no Kasteleyn orientation found".into()).into());
        }
        Ok(())
    })
}

/// Normalized text form of the graph.
///
/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn psc_graph_to_text(g: *const PscGraph, out: *mut *mut c_char) -> PscStatus {
    guard(|| put_string(out, handle(g)?.0.to_text()))
}

/// Pauli string (`±1|XZ..` form) of the stabilizer on the labelled face.
///
/// # Safety
/// `g` must be a live handle, `face` a NUL-terminated string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn psc_compile_stabilizer(g: *const PscGraph, face: *const c_char, out: *mut *mut c_char) -> PscStatus {
    guard(|| {
        let g = &handle(g)?.0;
        let f = g.face_by_label(text(face)?)?;
        put_string(out, compile_stabilizer(&DecoratedGraph::new(g), f)?.to_text())
    })
}

/// Pauli string of the Wilson line along a route such as `0/W,1,2/E`.
///
/// # Safety
/// `g` must be a live handle, `route` a NUL-terminated string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn psc_compile_line(g: *const PscGraph, route: *const c_char, out: *mut *mut c_char) -> PscStatus {
    guard(|| {
        let g = &handle(g)?.0;
        let p = parse_line(g, text(route)?)?;
        put_string(out, compile_line(&DecoratedGraph::new(g), &p)?.to_text())
    })
}

/// Gate list of exp(∓iπ/4 P) for `sign` = +1 or −1: a `phase k/4` line
/// followed by one gate per line.
///
/// # Safety
/// `pauli` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn psc_rotation_gates(pauli: *const c_char, sign: c_int, out: *mut *mut c_char) -> PscStatus {
    guard(|| {
        let p: PauliString = text(pauli)?.parse()?;
        let sign = match sign {
            1 => RotSign::Plus,
            -1 => RotSign::Minus,
            _ => return Err(Fail(PscStatus::InvalidArgument, format!("InvalidArgument sign {sign}"))),
        };
        put_string(out, decompose(&make_rotation(p, sign)?).to_text())
    })
}

/// Run scenario text and return the measurement record as JSON. A negative
/// `seed` keeps the scenario's own seed. Graph files named by `load` resolve
/// against the working directory.
///
/// # Safety
/// `scenario` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn psc_run_scenario(
    scenario: *const c_char,
    backend: PscBackend,
    seed: i64,
    out: *mut *mut c_char,
) -> PscStatus {
    guard(|| {
        let sc = Scenario::parse(text(scenario)?)?;
        let kind = match backend {
            PscBackend::Engine => BackendKind::Engine,
            PscBackend::Oracle => BackendKind::Oracle,
            PscBackend::Both => BackendKind::Both,
        };
        let rec = run(&sc, kind, (seed >= 0).then_some(seed as u64))?;
        put_string(out, rec.to_json())
    })
}

/// Machine on a copy of `g`, prepared in the code state with every free
/// logical fixed by measurement under `seed`.
///
/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn psc_machine_new(g: *const PscGraph, seed: u64, out: *mut *mut PscMachine) -> PscStatus {
    guard(|| {
        let g = handle(g)?.0.clone();
        let dg = DecoratedGraph::new(&g);
        let state = StabilizerState::from_stabilizers(g.num_qubits(), &code_state_strings(&dg, &[]), seed)?;
        put(out, Box::into_raw(Box::new(PscMachine(Machine::new(g, state)))))
    })
}

/// # Safety
/// `m` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn psc_machine_free(m: *mut PscMachine) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Create anyons `a` and `b` by cutting the link between qubits `q1` and `q2`.
///
/// # Safety
/// `m` must be a live handle; names must be NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn psc_machine_create(
    m: *mut PscMachine,
    a: *const c_char,
    b: *const c_char,
    q1: u32,
    q2: u32,
) -> PscStatus {
    guard(|| Ok(handle_mut(m)?.0.create(text(a)?, text(b)?, q1, q2)?))
}

/// Move anyon `name` onto the corner `target` (`id/slot`).
///
/// # Safety
/// `m` must be a live handle; strings must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn psc_machine_move(m: *mut PscMachine, name: *const c_char, target: *const c_char) -> PscStatus {
    guard(|| {
        let m = &mut handle_mut(m)?.0;
        let t = m.graph.parse_corner(text(target)?)?;
        m.move_anyon(text(name)?, t)?;
        Ok(())
    })
}

/// Exchange anyons `a` and `b` counter-clockwise, or clockwise when `inverse`.
///
/// # Safety
/// `m` must be a live handle; names must be NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn psc_machine_braid(m: *mut PscMachine, a: *const c_char, b: *const c_char, inverse: bool) -> PscStatus {
    guard(|| {
        handle_mut(m)?.0.braid(text(a)?, text(b)?, inverse)?;
        Ok(())
    })
}

/// Measure the Wilson line between `a` and `b`: the tracked line, or with
/// `initial` the line along the creation path.
///
/// # Safety
/// `m` must be a live handle; names NUL-terminated; `outcome` writable.
#[no_mangle]
pub unsafe extern "C" fn psc_machine_measure_wilson(
    m: *mut PscMachine,
    a: *const c_char,
    b: *const c_char,
    initial: bool,
    outcome: *mut c_int,
) -> PscStatus {
    guard(|| {
        let route = if initial { WilsonRoute::Initial } else { WilsonRoute::Tracked };
        let v = handle_mut(m)?.0.measure_wilson(text(a)?, text(b)?, &route)?;
        put(outcome, v)
    })
}

/// Fuse `a` with `b`; the outcome is +1 for vacuum and −1 for a fermion.
///
/// # Safety
/// `m` must be a live handle; names NUL-terminated; `outcome` writable.
#[no_mangle]
pub unsafe extern "C" fn psc_machine_fuse(
    m: *mut PscMachine,
    a: *const c_char,
    b: *const c_char,
    outcome: *mut c_int,
) -> PscStatus {
    guard(|| {
        let v = handle_mut(m)?.0.fuse(text(a)?, text(b)?)?;
        put(outcome, v)
    })
}

/// Whether every stabilizer currently has expectation +1.
///
/// # Safety
/// `m` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn psc_machine_flux_free(m: *const PscMachine, out: *mut bool) -> PscStatus {
    guard(|| {
        let signs = handle(m)?.0.stabilizer_signs()?;
        put(out, signs.values().all(|&s| s == 1))
    })
}

/// Structure hash of the machine's current graph.
///
/// # Safety
/// `m` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn psc_machine_graph_hash(m: *const PscMachine, out: *mut *mut c_char) -> PscStatus {
    guard(|| put_string(out, handle(m)?.0.graph.structure_hash()))
}
