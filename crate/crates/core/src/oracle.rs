//! Brute-force reference backends: a dense statevector and an explicit
//! single-diamond Majorana model.

use num_complex::Complex64;

use crate::compile::{Gate, PauliRotation};
use crate::engine::{OutcomeRng, StabilizerState};
use crate::error::{Error, Result};
use crate::pauli::{PauliString, Phase};

pub const MAX_QUBITS: usize = 14;

const TOL: f64 = 1e-9;

fn phase_value(p: Phase) -> Complex64 {
    match p.power() {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

#[derive(Clone, Debug)]
pub struct DenseState {
    n: usize,
    amps: Vec<Complex64>,
    rng: OutcomeRng,
}

impl DenseState {
    pub fn zero(n: usize, seed: u64) -> Result<Self> {
        if n > MAX_QUBITS {
            return Err(Error::TooManyQubits { got: n, max: MAX_QUBITS });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(DenseState { n, amps, rng: OutcomeRng::new(seed) })
    }

    /// +1 eigenstate of the given strings, found by projecting a generic vector.
    pub fn from_stabilizers(n: usize, strings: &[PauliString], seed: u64) -> Result<Self> {
        if n > MAX_QUBITS {
            return Err(Error::TooManyQubits { got: n, max: MAX_QUBITS });
        }
        // same validation and error reporting as the stabilizer engine
        let tableau = StabilizerState::from_stabilizers(n, strings, seed)?;
        let mut st = DenseState::zero(n, seed)?;
        for (k, a) in st.amps.iter_mut().enumerate() {
            let t = k as f64 + 1.0;
            *a = Complex64::new((0.7 * t).cos(), (1.3 * t).sin());
        }
        for g in tableau.generators() {
            let pg = st.apply_pauli_vec(g);
            for (a, b) in st.amps.iter_mut().zip(pg) {
                *a = (*a + b) * 0.5;
            }
        }
        st.normalize()?;
        Ok(st)
    }

    /// State with the given amplitudes, normalized.
    pub fn from_amplitudes(amps: Vec<Complex64>, seed: u64) -> Result<Self> {
        let n = amps.len().trailing_zeros() as usize;
        if amps.len() != 1 << n {
            return Err(Error::QubitCountMismatch(amps.len(), 1 << n));
        }
        if n > MAX_QUBITS {
            return Err(Error::TooManyQubits { got: n, max: MAX_QUBITS });
        }
        let mut st = DenseState { n, amps, rng: OutcomeRng::new(seed) };
        st.normalize()?;
        Ok(st)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    fn normalize(&mut self) -> Result<()> {
        let norm = self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return Err(Error::Inconsistent);
        }
        for a in self.amps.iter_mut() {
            *a /= norm;
        }
        Ok(())
    }

    fn apply_pauli_vec(&self, p: &PauliString) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (b, &a) in self.amps.iter().enumerate() {
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            let (t, ph) = p.apply_to_basis(b as u64);
            out[t as usize] += a * phase_value(ph);
        }
        out
    }

    fn check(&self, p: &PauliString) -> Result<()> {
        if p.num_qubits() != self.n {
            return Err(Error::QubitCountMismatch(p.num_qubits(), self.n));
        }
        Ok(())
    }

    pub fn apply_pauli(&mut self, p: &PauliString) -> Result<()> {
        self.check(p)?;
        self.amps = self.apply_pauli_vec(p);
        Ok(())
    }

    /// ⟨ψ|P|ψ⟩.
    pub fn expectation_value(&self, p: &PauliString) -> Complex64 {
        self.amps.iter().zip(self.apply_pauli_vec(p)).map(|(a, b)| a.conj() * b).sum()
    }

    /// Rounded expectation of a Hermitian string: +1, −1 or 0.
    pub fn expectation(&self, p: &PauliString) -> Result<i32> {
        self.check(p)?;
        if !p.is_hermitian() {
            return Err(Error::NonHermitianObservable);
        }
        let v = self.expectation_value(p).re;
        Ok(if v > 1.0 - TOL {
            1
        } else if v < -1.0 + TOL {
            -1
        } else {
            assert!(v.abs() < TOL, "non-stabilizer expectation {v}");
            0
        })
    }

    /// Projective measurement; consumes one outcome only when both results
    /// have probability one half.
    pub fn measure(&mut self, p: &PauliString) -> Result<i32> {
        let e = self.expectation(p)?;
        let outcome = if e == 0 { self.rng.next_outcome() } else { e };
        let pv = self.apply_pauli_vec(p);
        let s = outcome as f64;
        for (a, b) in self.amps.iter_mut().zip(pv) {
            *a = (*a + b * s) * 0.5;
        }
        self.normalize()?;
        Ok(outcome)
    }

    /// exp(∓iπ/4·P) = (1 ∓ iP)/√2.
    pub fn apply_rotation(&mut self, rot: &PauliRotation) -> Result<()> {
        self.check(&rot.axis)?;
        if !rot.axis.is_hermitian() {
            return Err(Error::NonHermitianAxis);
        }
        let theta = std::f64::consts::FRAC_PI_4 * rot.sign.value() as f64;
        self.apply_exp(&rot.axis, theta);
        Ok(())
    }

    /// exp(−iθ·P) for Hermitian P.
    pub fn apply_exp(&mut self, p: &PauliString, theta: f64) {
        let pv = self.apply_pauli_vec(p);
        let (c, s) = (theta.cos(), theta.sin());
        let mis = Complex64::new(0.0, -s);
        for (a, b) in self.amps.iter_mut().zip(pv) {
            *a = *a * c + b * mis;
        }
    }

    pub fn apply_gate(&mut self, gate: Gate) {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let i = Complex64::new(0.0, 1.0);
        let bit = |b: usize, q: usize| b >> q & 1 == 1;
        match gate {
            Gate::H(q) => {
                for b in 0..self.amps.len() {
                    if !bit(b, q) {
                        let (a0, a1) = (self.amps[b], self.amps[b | 1 << q]);
                        self.amps[b] = (a0 + a1) * h;
                        self.amps[b | 1 << q] = (a0 - a1) * h;
                    }
                }
            }
            Gate::S(q) | Gate::Sdg(q) | Gate::Z(q) => {
                let f = match gate {
                    Gate::S(_) => i,
                    Gate::Sdg(_) => -i,
                    _ => Complex64::new(-1.0, 0.0),
                };
                for (b, a) in self.amps.iter_mut().enumerate() {
                    if bit(b, q) {
                        *a *= f;
                    }
                }
            }
            Gate::X(q) => {
                for b in 0..self.amps.len() {
                    if !bit(b, q) {
                        self.amps.swap(b, b | 1 << q);
                    }
                }
            }
            Gate::Cnot(c, t) => {
                for b in 0..self.amps.len() {
                    if bit(b, c) && !bit(b, t) {
                        self.amps.swap(b, b | 1 << t);
                    }
                }
            }
        }
    }

    /// min over global phases of ‖ψ − e^{iφ}φ‖∞.
    pub fn distance_up_to_phase(&self, other: &DenseState) -> f64 {
        let ov: Complex64 = self.amps.iter().zip(&other.amps).map(|(a, b)| b.conj() * a).sum();
        let ph = if ov.norm() > 1e-15 { ov / ov.norm() } else { Complex64::new(1.0, 0.0) };
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b * ph).norm())
            .fold(0.0, f64::max)
    }

    /// max amplitude difference, phase included.
    pub fn distance(&self, other: &DenseState) -> f64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

/// Unitary of a gate list on n qubits as columns, optionally times a global phase.
pub fn gate_list_unitary(n: usize, gates: &[Gate]) -> Vec<Vec<Complex64>> {
    (0..1usize << n)
        .map(|b| {
            let mut st = DenseState::zero(n, 0).unwrap();
            st.amps[0] = Complex64::new(0.0, 0.0);
            st.amps[b] = Complex64::new(1.0, 0.0);
            for &g in gates {
                st.apply_gate(g);
            }
            st.amps
        })
        .collect()
}

/// Unitary of exp(∓iπ/4·P) as columns.
pub fn rotation_unitary(rot: &PauliRotation) -> Vec<Vec<Complex64>> {
    let n = rot.axis.num_qubits();
    (0..1usize << n)
        .map(|b| {
            let mut st = DenseState::zero(n, 0).unwrap();
            st.amps[0] = Complex64::new(0.0, 0.0);
            st.amps[b] = Complex64::new(1.0, 0.0);
            st.apply_rotation(rot).unwrap();
            st.amps
        })
        .collect()
}

type M4 = [[Complex64; 4]; 4];

fn m4_mul(a: &M4, b: &M4) -> M4 {
    let mut c = [[Complex64::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                c[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    c
}

fn m4_scale(a: &M4, s: Complex64) -> M4 {
    let mut c = *a;
    for row in c.iter_mut() {
        for x in row.iter_mut() {
            *x *= s;
        }
    }
    c
}

fn m4_add(a: &M4, b: &M4) -> M4 {
    let mut c = *a;
    for i in 0..4 {
        for j in 0..4 {
            c[i][j] += b[i][j];
        }
    }
    c
}

fn m4_ident() -> M4 {
    let mut c = [[Complex64::new(0.0, 0.0); 4]; 4];
    for (i, row) in c.iter_mut().enumerate() {
        row[i] = Complex64::new(1.0, 0.0);
    }
    c
}

fn m4_dist(a: &M4, b: &M4) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            d = d.max((a[i][j] - b[i][j]).norm());
        }
    }
    d
}

fn kron2(a: [[Complex64; 2]; 2], b: [[Complex64; 2]; 2]) -> M4 {
    let mut c = [[Complex64::new(0.0, 0.0); 4]; 4];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    c[2 * i + k][2 * j + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    c
}

/// Four Majorana operators of one diamond in the Fock space of the modes
/// c₁ = (α₁ + iα₂)/2 and c₂ = (α₃ + iα₄)/2, ordered counter-clockwise from
/// the east corner.
#[derive(Clone, Debug)]
pub struct DiamondModel {
    pub alpha: [M4; 4],
}

/// Outcome of [`diamond_check`].
#[derive(Clone, Debug, PartialEq)]
pub struct DiamondReport {
    pub majorana_algebra: bool,
    pub opposite_parities_commute: bool,
    pub parities_nontrivial: bool,
    pub opposite_edges_agree: bool,
    pub pauli_algebra: bool,
    pub gauge_independent_of_pair: bool,
    pub gauge_flips_majoranas: bool,
    /// Largest matrix-element deviation among the identities checked.
    pub max_error: f64,
}

impl DiamondReport {
    pub fn all_ok(&self) -> bool {
        self.majorana_algebra
            && self.opposite_parities_commute
            && self.parities_nontrivial
            && self.opposite_edges_agree
            && self.pauli_algebra
            && self.gauge_independent_of_pair
            && self.gauge_flips_majoranas
    }
}

impl Default for DiamondModel {
    fn default() -> Self {
        let z = Complex64::new(0.0, 0.0);
        let o = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let id = [[o, z], [z, o]];
        let x = [[z, o], [o, z]];
        let y = [[z, -i], [i, z]];
        let zz = [[o, z], [z, -o]];
        // Jordan–Wigner: c₁ = a ⊗ 1, c₂ = Z ⊗ a
        DiamondModel { alpha: [kron2(x, id), kron2(y, id), kron2(zz, x), kron2(zz, y)] }
    }
}

impl DiamondModel {
    /// i·α_a·α_b.
    pub fn parity(&self, a: usize, b: usize) -> M4 {
        m4_scale(&m4_mul(&self.alpha[a], &self.alpha[b]), Complex64::new(0.0, 1.0))
    }

    /// Short-edge operators: τ₁ = iα₁α₂ (E–N), τ₁′ = iα₃α₄ (W–S),
    /// τ₂ = iα₂α₃ (N–W), τ₂′ = iα₁α₄ (E–S).
    pub fn taus(&self) -> [M4; 4] {
        [self.parity(0, 1), self.parity(2, 3), self.parity(1, 2), self.parity(0, 3)]
    }

    /// Γ_q = τ₁τ₁′.
    pub fn gauge(&self) -> M4 {
        let t = self.taus();
        m4_mul(&t[0], &t[1])
    }
}

pub fn diamond_check() -> DiamondReport {
    let m = DiamondModel::default();
    let worst = std::cell::Cell::new(0.0f64);
    let close = |d: f64| {
        worst.set(worst.get().max(d));
        d < 1e-12
    };
    let id = m4_ident();
    let zero = [[Complex64::new(0.0, 0.0); 4]; 4];
    let anti = |a: &M4, b: &M4| m4_add(&m4_mul(a, b), &m4_mul(b, a));
    let comm = |a: &M4, b: &M4| m4_add(&m4_mul(a, b), &m4_scale(&m4_mul(b, a), Complex64::new(-1.0, 0.0)));

    let mut majorana_algebra = true;
    for j in 0..4 {
        for k in 0..4 {
            let want = if j == k { m4_scale(&id, Complex64::new(2.0, 0.0)) } else { zero };
            majorana_algebra &= close(m4_dist(&anti(&m.alpha[j], &m.alpha[k]), &want));
        }
    }
    let t = m.taus();
    let opposite_parities_commute = close(m4_dist(&comm(&t[0], &t[1]), &zero))
        && close(m4_dist(&comm(&t[2], &t[3]), &zero));
    let parities_nontrivial = t.iter().all(|x| {
        m4_dist(x, &id) > 0.5 && m4_dist(x, &m4_scale(&id, Complex64::new(-1.0, 0.0))) > 0.5
    });
    let g = m.gauge();
    let proj = m4_scale(&m4_add(&id, &g), Complex64::new(0.5, 0.0));
    let on = |x: &M4| m4_mul(&proj, &m4_mul(x, &proj));
    let opposite_edges_agree =
        close(m4_dist(&on(&t[0]), &on(&t[1]))) && close(m4_dist(&on(&t[2]), &on(&t[3])));
    let pauli_algebra = close(m4_dist(&on(&m4_mul(&t[0], &t[0])), &proj))
        && close(m4_dist(&on(&m4_mul(&t[2], &t[2])), &proj))
        && close(m4_dist(&on(&anti(&t[0], &t[2])), &zero))
        && close(m4_dist(&comm(&t[0], &g), &zero))
        && close(m4_dist(&comm(&t[2], &g), &zero));
    let gauge_independent_of_pair = close(m4_dist(&g, &m4_mul(&t[2], &t[3])))
        && close(m4_dist(&m4_mul(&g, &g), &id));
    let gauge_flips_majoranas = m
        .alpha
        .iter()
        .all(|a| close(m4_dist(&m4_mul(&g, &m4_mul(a, &g)), &m4_scale(a, Complex64::new(-1.0, 0.0)))));
    DiamondReport {
        majorana_algebra,
        opposite_parities_commute,
        parities_nontrivial,
        opposite_edges_agree,
        pauli_algebra,
        gauge_independent_of_pair,
        gauge_flips_majoranas,
        max_error: worst.get(),
    }
}
