//! Stabilizer-state simulation with a generators-only tableau.

use rand::{RngCore, SeedableRng};
use rand_xorshift::XorShiftRng;

use crate::compile::{Gate, PauliRotation, RotSign};
use crate::error::{Error, Result};
use crate::pauli::{Letter, PauliString, Phase};

/// Seeded source of measurement outcomes shared by every backend.
///
/// Each random outcome consumes one `next_u64` of xorshift128 seeded with
/// `XorShiftRng::seed_from_u64(seed)`; the top bit 0 means +1.
#[derive(Clone, Debug)]
pub struct OutcomeRng {
    seed: u64,
    rng: XorShiftRng,
}

impl OutcomeRng {
    pub fn new(seed: u64) -> Self {
        OutcomeRng { seed, rng: XorShiftRng::seed_from_u64(seed) }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn next_outcome(&mut self) -> i32 {
        if self.rng.next_u64() >> 63 == 0 {
            1
        } else {
            -1
        }
    }
}

/// Row echelon form over GF(2) of Pauli letter vectors, remembering which
/// inputs were combined into each row.
struct Echelon {
    words: usize,
    rows: Vec<(Vec<u64>, Vec<u64>, usize)>, // bits, combination, pivot bit
    inputs: usize,
}

impl Echelon {
    fn new(n: usize, inputs: usize) -> Self {
        Echelon { words: 2 * n.div_ceil(64), rows: Vec::new(), inputs }
    }

    fn bits(p: &PauliString) -> Vec<u64> {
        let mut v = p.x_words().to_vec();
        v.extend_from_slice(p.z_words());
        v
    }

    /// Reduce against existing rows; returns the residue and the combination used.
    fn reduce(&self, p: &PauliString) -> (Vec<u64>, Vec<u64>) {
        let mut v = Self::bits(p);
        let mut combo = vec![0u64; self.inputs.div_ceil(64).max(1)];
        for (row, rc, piv) in &self.rows {
            if v[piv / 64] >> (piv % 64) & 1 == 1 {
                for (a, b) in v.iter_mut().zip(row) {
                    *a ^= b;
                }
                for (a, b) in combo.iter_mut().zip(rc) {
                    *a ^= b;
                }
            }
        }
        (v, combo)
    }

    /// Insert input `idx`; returns `Err(combination)` when it is dependent.
    fn insert(&mut self, idx: usize, p: &PauliString) -> std::result::Result<(), Vec<u64>> {
        let (v, mut combo) = self.reduce(p);
        let Some(piv) = (0..self.words * 64).find(|&b| v[b / 64] >> (b % 64) & 1 == 1) else {
            return Err(combo);
        };
        combo[idx / 64] ^= 1 << (idx % 64);
        // keep earlier rows reduced with respect to the new pivot
        for (row, rc, _) in self.rows.iter_mut() {
            if row[piv / 64] >> (piv % 64) & 1 == 1 {
                for (a, b) in row.iter_mut().zip(&v) {
                    *a ^= b;
                }
                for (a, b) in rc.iter_mut().zip(&combo) {
                    *a ^= b;
                }
            }
        }
        self.rows.push((v, combo, piv));
        Ok(())
    }
}

fn combo_members(combo: &[u64], len: usize) -> impl Iterator<Item = usize> + '_ {
    (0..len).filter(move |&i| combo[i / 64] >> (i % 64) & 1 == 1)
}

/// Extend independent commuting strings with further commuting Pauli strings
/// (letters only, phase +1) until they fix a unique state. Each addition is
/// the first vector of the reduced symplectic complement not yet spanned.
pub fn complete_to_full_rank(n: usize, strings: &[PauliString]) -> Vec<PauliString> {
    let mut set: Vec<PauliString> = strings.to_vec();
    loop {
        let mut ech = Echelon::new(n, set.len());
        let mut rank = 0;
        for (i, s) in set.iter().enumerate() {
            if ech.insert(i, s).is_ok() {
                rank += 1;
            }
        }
        if rank >= n {
            return set;
        }
        // rows (z | x) so that row · (x_v | z_v) is the symplectic product
        let cols = 2 * n;
        let mut rows: Vec<Vec<bool>> = set
            .iter()
            .map(|s| {
                let mut r = vec![false; cols];
                for q in 0..n {
                    let (x, z) = s.get(q).bits();
                    r[q] = z;
                    r[n + q] = x;
                }
                r
            })
            .collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            let Some(p) = (r..rows.len()).find(|&i| rows[i][c]) else { continue };
            rows.swap(r, p);
            for i in 0..rows.len() {
                if i != r && rows[i][c] {
                    let pr = rows[r].clone();
                    for (a, b) in rows[i].iter_mut().zip(pr) {
                        *a ^= b;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
        let mut added = false;
        for &f in &free {
            let mut v = vec![false; cols];
            v[f] = true;
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = rows[i][f];
            }
            let letters: Vec<Letter> = (0..n).map(|q| Letter::from_bits(v[q], v[n + q])).collect();
            let cand = PauliString::from_letters(Phase::ONE, &letters);
            if ech.insert(set.len(), &cand).is_ok() {
                set.push(cand);
                added = true;
                break;
            }
        }
        assert!(added, "symplectic complement must contain a new vector");
    }
}

#[derive(Clone, Debug)]
pub struct StabilizerState {
    n: usize,
    gens: Vec<PauliString>,
    rng: OutcomeRng,
}

impl StabilizerState {
    /// The unique +1 eigenstate of the supplied commuting strings.
    pub fn from_stabilizers(n: usize, strings: &[PauliString], seed: u64) -> Result<Self> {
        for (i, s) in strings.iter().enumerate() {
            if s.num_qubits() != n {
                return Err(Error::QubitCountMismatch(s.num_qubits(), n));
            }
            if !s.is_hermitian() {
                return Err(Error::NonHermitianObservable);
            }
            for t in &strings[..i] {
                if !s.commutes_with(t) {
                    return Err(Error::NonCommuting(format!("{} and {}", t.to_text(), s.to_text())));
                }
            }
        }
        let mut ech = Echelon::new(n, strings.len());
        let mut gens = Vec::new();
        for (i, s) in strings.iter().enumerate() {
            match ech.insert(i, s) {
                Ok(()) => gens.push(s.clone()),
                Err(combo) => {
                    let mut prod = PauliString::identity(n);
                    for j in combo_members(&combo, strings.len()) {
                        prod = &prod * &strings[j];
                    }
                    if prod.phase() != s.phase() {
                        return Err(Error::Inconsistent);
                    }
                }
            }
        }
        if gens.len() < n {
            return Err(Error::RankDeficient { rank: gens.len(), needed: n });
        }
        Ok(StabilizerState { n, gens, rng: OutcomeRng::new(seed) })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.gens
    }

    pub fn seed(&self) -> u64 {
        self.rng.seed()
    }

    fn check(&self, obs: &PauliString) -> Result<()> {
        if obs.num_qubits() != self.n {
            return Err(Error::QubitCountMismatch(obs.num_qubits(), self.n));
        }
        if !obs.is_hermitian() {
            return Err(Error::NonHermitianObservable);
        }
        Ok(())
    }

    /// Sign of `obs` when it lies in ±(stabilizer group).
    fn group_sign(&self, obs: &PauliString) -> i32 {
        let mut ech = Echelon::new(self.n, self.gens.len());
        for (i, g) in self.gens.iter().enumerate() {
            ech.insert(i, g).expect("generators are independent");
        }
        let (residue, combo) = ech.reduce(obs);
        debug_assert!(residue.iter().all(|&w| w == 0));
        let mut prod = PauliString::identity(self.n);
        for j in combo_members(&combo, self.gens.len()) {
            prod = &prod * &self.gens[j];
        }
        if prod.phase() == obs.phase() {
            1
        } else {
            debug_assert_eq!(prod.phase(), obs.phase() * Phase::MINUS_ONE);
            -1
        }
    }

    /// +1 or −1 when `obs` has a definite value, 0 otherwise.
    pub fn expectation(&self, obs: &PauliString) -> Result<i32> {
        self.check(obs)?;
        if self.gens.iter().any(|g| !g.commutes_with(obs)) {
            return Ok(0);
        }
        Ok(self.group_sign(obs))
    }

    /// Projective measurement of `obs`.
    pub fn measure(&mut self, obs: &PauliString) -> Result<i32> {
        self.check(obs)?;
        let anti: Vec<usize> = (0..self.gens.len()).filter(|&i| !self.gens[i].commutes_with(obs)).collect();
        let Some(&k) = anti.first() else {
            return Ok(self.group_sign(obs));
        };
        let outcome = self.rng.next_outcome();
        let gk = self.gens[k].clone();
        for &j in &anti[1..] {
            self.gens[j] = &self.gens[j] * &gk;
        }
        self.gens[k] = if outcome == 1 { obs.clone() } else { obs.clone().negated() };
        self.debug_check();
        Ok(outcome)
    }

    /// Conjugate by exp(∓iπ/4·axis).
    pub fn apply_rotation(&mut self, rot: &PauliRotation) -> Result<()> {
        if !rot.axis.is_hermitian() {
            return Err(Error::NonHermitianAxis);
        }
        if rot.axis.num_qubits() != self.n {
            return Err(Error::QubitCountMismatch(rot.axis.num_qubits(), self.n));
        }
        for g in self.gens.iter_mut() {
            *g = conjugate_by_rotation(g, rot);
        }
        self.debug_check();
        Ok(())
    }

    pub fn apply_gate(&mut self, gate: Gate) {
        for g in self.gens.iter_mut() {
            *g = conjugate_by_gate(g, gate);
        }
        self.debug_check();
    }

    pub fn apply_pauli(&mut self, p: &PauliString) {
        for g in self.gens.iter_mut() {
            if !g.commutes_with(p) {
                *g = g.clone().negated();
            }
        }
    }

    fn debug_check(&self) {
        if cfg!(debug_assertions) && self.n <= 64 {
            for (i, a) in self.gens.iter().enumerate() {
                debug_assert!(a.is_hermitian());
                for b in &self.gens[..i] {
                    debug_assert!(a.commutes_with(b));
                }
            }
        }
    }
}

/// U·p·U† for U = exp(∓iπ/4·axis).
pub fn conjugate_by_rotation(p: &PauliString, rot: &PauliRotation) -> PauliString {
    if p.commutes_with(&rot.axis) {
        return p.clone();
    }
    let factor = match rot.sign {
        RotSign::Plus => Phase::MINUS_I,
        RotSign::Minus => Phase::I,
    };
    let q = &rot.axis * p;
    let phase = q.phase() * factor;
    q.with_phase(phase)
}

/// Images of X_q and Z_q under conjugation by a gate acting on `q`.
fn gate_image(n: usize, gate: Gate, q: usize, letter: Letter) -> PauliString {
    let single = |q: usize, l: Letter| PauliString::single(n, q, l);
    let neg = |p: PauliString| p.negated();
    match (gate, letter) {
        (Gate::H(t), Letter::X) if t == q => single(q, Letter::Z),
        (Gate::H(t), Letter::Z) if t == q => single(q, Letter::X),
        (Gate::S(t), Letter::X) if t == q => single(q, Letter::Y),
        (Gate::Sdg(t), Letter::X) if t == q => neg(single(q, Letter::Y)),
        (Gate::X(t), Letter::Z) if t == q => neg(single(q, Letter::Z)),
        (Gate::Z(t), Letter::X) if t == q => neg(single(q, Letter::X)),
        (Gate::Cnot(c, t), Letter::X) if c == q => &single(c, Letter::X) * &single(t, Letter::X),
        (Gate::Cnot(c, t), Letter::Z) if t == q => &single(c, Letter::Z) * &single(t, Letter::Z),
        _ => single(q, letter),
    }
}

/// G·p·G† for a Clifford gate G.
pub fn conjugate_by_gate(p: &PauliString, gate: Gate) -> PauliString {
    let n = p.num_qubits();
    let touched: Vec<usize> = match gate {
        Gate::Cnot(c, t) => vec![c, t],
        Gate::H(q) | Gate::S(q) | Gate::Sdg(q) | Gate::X(q) | Gate::Z(q) => vec![q],
    };
    let mut rest = p.clone();
    let mut out = PauliString::identity(n);
    // Y = i·X·Z in the letter form
    let mut phase = p.phase();
    for &q in &touched {
        let l = p.get(q);
        rest.set(q, Letter::I);
        let (x, z) = l.bits();
        if x && z {
            phase = phase * Phase::I;
        }
        if x {
            out = &out * &gate_image(n, gate, q, Letter::X);
        }
        if z {
            out = &out * &gate_image(n, gate, q, Letter::Z);
        }
    }
    rest.set_phase(Phase::ONE);
    let mut res = &out * &rest;
    let ph = res.phase() * phase;
    res.set_phase(ph);
    res
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compile::make_rotation;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn single_qubit_zero_state() {
        let mut st = StabilizerState::from_stabilizers(1, &[ps("Z")], 1).unwrap();
        assert_eq!(st.measure(&ps("Z")).unwrap(), 1);
        assert_eq!(st.expectation(&ps("X")).unwrap(), 0);
        assert_eq!(st.expectation(&ps("-Z")).unwrap(), -1);
    }

    #[test]
    fn init_errors() {
        assert!(matches!(
            StabilizerState::from_stabilizers(1, &[ps("X"), ps("Z")], 0),
            Err(Error::NonCommuting(_))
        ));
        assert_eq!(
            StabilizerState::from_stabilizers(2, &[ps("ZZ")], 0).unwrap_err(),
            Error::RankDeficient { rank: 1, needed: 2 }
        );
        assert_eq!(
            StabilizerState::from_stabilizers(2, &[ps("ZZ"), ps("ZI"), ps("-IZ")], 0).unwrap_err(),
            Error::Inconsistent
        );
    }

    #[test]
    fn plus_rotation_about_z_takes_x_to_y() {
        let mut st = StabilizerState::from_stabilizers(1, &[ps("X")], 0).unwrap();
        st.apply_rotation(&make_rotation(ps("Z"), RotSign::Plus).unwrap()).unwrap();
        assert_eq!(st.generators()[0], ps("Y"));
        st.apply_rotation(&make_rotation(ps("Z"), RotSign::Minus).unwrap()).unwrap();
        assert_eq!(st.generators()[0], ps("X"));
    }

    #[test]
    fn random_measurement_collapses() {
        let mut st = StabilizerState::from_stabilizers(2, &[ps("ZI"), ps("IZ")], 3).unwrap();
        let m = st.measure(&ps("XX")).unwrap();
        assert_eq!(st.expectation(&ps("XX")).unwrap(), m);
        assert_eq!(st.expectation(&ps("ZZ")).unwrap(), 1);
        assert_eq!(st.measure(&ps("XX")).unwrap(), m);
    }

    #[test]
    fn gate_conjugation_table() {
        assert_eq!(conjugate_by_gate(&ps("Y"), Gate::H(0)), ps("-Y"));
        assert_eq!(conjugate_by_gate(&ps("Y"), Gate::S(0)), ps("-X"));
        assert_eq!(conjugate_by_gate(&ps("Y"), Gate::Sdg(0)), ps("X"));
        assert_eq!(conjugate_by_gate(&ps("YI"), Gate::Cnot(0, 1)), ps("YX"));
        assert_eq!(conjugate_by_gate(&ps("IY"), Gate::Cnot(0, 1)), ps("ZY"));
        assert_eq!(conjugate_by_gate(&ps("-XZ"), Gate::Cnot(0, 1)), ps("YY"));
    }
}
