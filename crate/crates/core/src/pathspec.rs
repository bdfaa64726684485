//! Text forms for paths used on the command line and in render path sets.
//!
//! A route is a comma-separated list of qubit ids; the first and last entries
//! of an open route may name the end corners as `id/slot`, e.g. `0/W,1,2,3/E`.
//! Face lists are comma-separated face labels such as `out,0.E,1.E`.

use crate::decorated::{hops_from_qubits, lift_canonical, DirectedPath};
use crate::error::{Error, Result};
use crate::graph::{Slot, SurfaceGraph};

fn parse_err(msg: String) -> Error {
    Error::Parse { line: 0, msg }
}

fn split_item(item: &str) -> Result<(u32, Option<Slot>)> {
    let (id, slot) = match item.split_once('/') {
        Some((a, b)) => (a, Some(b.parse::<Slot>()?)),
        None => (item, None),
    };
    let id = id.trim().parse().map_err(|_| parse_err(format!("bad qubit id {id:?}")))?;
    Ok((id, slot))
}

/// Canonical open line along a qubit route.
pub fn parse_line(g: &SurfaceGraph, text: &str) -> Result<DirectedPath> {
    let items = text.split(',').map(split_item).collect::<Result<Vec<_>>>()?;
    if items.len() < 2 {
        return Err(parse_err("a line needs at least two qubits".into()));
    }
    if items[1..items.len() - 1].iter().any(|(_, s)| s.is_some()) {
        return Err(parse_err("only the end qubits may carry a slot".into()));
    }
    let ids: Vec<u32> = items.iter().map(|(q, _)| *q).collect();
    let hops = hops_from_qubits(g, &ids, false)?;
    lift_canonical(g, &hops, items[0].1, items[items.len() - 1].1, false)
}

/// Canonical closed loop along a qubit route, closing back to the first qubit.
pub fn parse_loop(g: &SurfaceGraph, text: &str) -> Result<DirectedPath> {
    let items = text.split(',').map(split_item).collect::<Result<Vec<_>>>()?;
    if items.iter().any(|(_, s)| s.is_some()) {
        return Err(parse_err("loop routes take bare qubit ids".into()));
    }
    let ids: Vec<u32> = items.iter().map(|(q, _)| *q).collect();
    let hops = hops_from_qubits(g, &ids, true)?;
    lift_canonical(g, &hops, None, None, true)
}

pub fn parse_faces(g: &SurfaceGraph, text: &str) -> Result<Vec<usize>> {
    text.split(',').map(|f| g.face_by_label(f.trim())).collect()
}
