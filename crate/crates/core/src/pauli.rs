//! Phased Pauli strings with exact phase tracking.
//!
//! A string is `i^k · P_0 ⊗ P_1 ⊗ …` with letters in {I, X, Y, Z}. Letters are
//! stored bit-packed in symplectic form (`x`, `z` planes, Y = both bits set);
//! the phase is kept in letter form, so a Hermitian string has `k ∈ {0, 2}`.
//! Products follow the Pauli matrices, in particular `XZ = -iY`.

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A power of `i`: 0 ↦ +1, 1 ↦ +i, 2 ↦ -1, 3 ↦ -i.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_power(k: i64) -> Phase {
        Phase(k.rem_euclid(4) as u8)
    }

    pub fn power(self) -> u8 {
        self.0
    }

    pub fn is_real(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn conj(self) -> Phase {
        Phase((4 - self.0) % 4)
    }

    /// `+1` or `-1` for real phases.
    pub fn sign(self) -> Option<i8> {
        match self.0 {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }
}

impl Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.0 {
            0 => "+1",
            1 => "+i",
            2 => "-1",
            _ => "-i",
        })
    }
}

impl FromStr for Phase {
    type Err = Error;
    fn from_str(s: &str) -> Result<Phase> {
        match s {
            "+1" | "1" | "+" => Ok(Phase::ONE),
            "+i" | "i" => Ok(Phase::I),
            "-1" | "-" => Ok(Phase::MINUS_ONE),
            "-i" => Ok(Phase::MINUS_I),
            _ => Err(Error::Parse { line: 0, msg: format!("bad phase {s:?}") }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    pub fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Letter {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Letter> {
        match c {
            'I' | '_' => Some(Letter::I),
            'X' => Some(Letter::X),
            'Y' => Some(Letter::Y),
            'Z' => Some(Letter::Z),
            _ => None,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    phase: Phase,
    x: Vec<u64>,
    z: Vec<u64>,
}

fn words(n: usize) -> usize {
    n.div_ceil(64)
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        PauliString { n, phase: Phase::ONE, x: vec![0; words(n)], z: vec![0; words(n)] }
    }

    pub fn single(n: usize, qubit: usize, letter: Letter) -> Self {
        let mut p = Self::identity(n);
        p.set(qubit, letter);
        p
    }

    pub fn from_letters(phase: Phase, letters: &[Letter]) -> Self {
        let mut p = Self::identity(letters.len());
        p.phase = phase;
        for (q, &l) in letters.iter().enumerate() {
            p.set(q, l);
        }
        p
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn set_phase(&mut self, phase: Phase) {
        self.phase = phase;
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    pub fn negated(mut self) -> Self {
        self.phase = self.phase * Phase::MINUS_ONE;
        self
    }

    pub fn get(&self, q: usize) -> Letter {
        let (w, b) = (q / 64, q % 64);
        Letter::from_bits((self.x[w] >> b) & 1 == 1, (self.z[w] >> b) & 1 == 1)
    }

    pub fn set(&mut self, q: usize, letter: Letter) {
        assert!(q < self.n, "qubit {q} out of range for {}-qubit string", self.n);
        let (w, b) = (q / 64, q % 64);
        let (xb, zb) = letter.bits();
        self.x[w] = (self.x[w] & !(1 << b)) | ((xb as u64) << b);
        self.z[w] = (self.z[w] & !(1 << b)) | ((zb as u64) << b);
    }

    pub fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub fn z_words(&self) -> &[u64] {
        &self.z
    }

    pub fn letters(&self) -> Vec<Letter> {
        (0..self.n).map(|q| self.get(q)).collect()
    }

    pub fn weight(&self) -> usize {
        self.x.iter().zip(&self.z).map(|(x, z)| (x | z).count_ones() as usize).sum()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&q| self.get(q) != Letter::I).collect()
    }

    pub fn is_identity_letters(&self) -> bool {
        self.x.iter().all(|&w| w == 0) && self.z.iter().all(|&w| w == 0)
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase.is_real()
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        debug_assert_eq!(self.n, other.n);
        let mut parity = 0u32;
        for w in 0..self.x.len() {
            parity ^= ((self.x[w] & other.z[w]) ^ (self.z[w] & other.x[w])).count_ones();
        }
        parity % 2 == 0
    }

    /// `self · rhs` with the exact phase.
    pub fn mul_ref(&self, rhs: &PauliString) -> PauliString {
        assert_eq!(self.n, rhs.n, "qubit count mismatch");
        // letter form a = i^{x z} X^x Z^z; moving Z^{z1} past X^{x2} costs (-1)^{z1 x2}
        let mut k: i64 = self.phase.0 as i64 + rhs.phase.0 as i64;
        let mut x = vec![0; self.x.len()];
        let mut z = vec![0; self.x.len()];
        for w in 0..self.x.len() {
            let (x1, z1, x2, z2) = (self.x[w], self.z[w], rhs.x[w], rhs.z[w]);
            let (x3, z3) = (x1 ^ x2, z1 ^ z2);
            k += (x1 & z1).count_ones() as i64 + (x2 & z2).count_ones() as i64
                + 2 * (z1 & x2).count_ones() as i64
                - (x3 & z3).count_ones() as i64;
            x[w] = x3;
            z[w] = z3;
        }
        PauliString { n: self.n, phase: Phase::from_power(k), x, z }
    }

    /// Phase `c` with `self = c · other`, if the two have the same letters.
    pub fn ratio_to(&self, other: &PauliString) -> Option<Phase> {
        if self.n != other.n || self.x != other.x || self.z != other.z {
            return None;
        }
        Some(Phase::from_power(self.phase.0 as i64 - other.phase.0 as i64))
    }

    pub fn adjoint(&self) -> PauliString {
        let mut p = self.clone();
        p.phase = p.phase.conj();
        p
    }

    /// Text form `<phase>|<letters>`.
    pub fn to_text(&self) -> String {
        let mut s = format!("{}|", self.phase);
        s.extend(self.letters().into_iter().map(Letter::as_char));
        s
    }

    /// Dense 2^n × 2^n column action helper: returns `(target, phase)` with
    /// `P|b⟩ = phase · |target⟩`, qubit `q` being bit `q` of `b`.
    pub fn apply_to_basis(&self, b: u64) -> (u64, Phase) {
        assert!(self.n <= 64);
        let (x, z) = (self.x.first().copied().unwrap_or(0), self.z.first().copied().unwrap_or(0));
        let k = self.phase.0 as i64 + (x & z).count_ones() as i64 + 2 * (z & b).count_ones() as i64;
        (b ^ x, Phase::from_power(k))
    }
}

impl Mul for &PauliString {
    type Output = PauliString;
    fn mul(self, rhs: &PauliString) -> PauliString {
        self.mul_ref(rhs)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({})", self.to_text())
    }
}

impl FromStr for PauliString {
    type Err = Error;
    /// Accepts `+i|XIZ`, `-XIZ`, or a bare `XIZ`.
    fn from_str(s: &str) -> Result<PauliString> {
        let s = s.trim();
        let (phase, letters) = match s.split_once('|') {
            Some((p, l)) => (p.parse::<Phase>()?, l),
            None => match s.strip_prefix('-') {
                Some(rest) => (Phase::MINUS_ONE, rest),
                None => (Phase::ONE, s.strip_prefix('+').unwrap_or(s)),
            },
        };
        let letters = letters
            .chars()
            .map(|c| {
                Letter::from_char(c)
                    .ok_or_else(|| Error::Parse { line: 0, msg: format!("bad Pauli letter {c:?}") })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PauliString::from_letters(phase, &letters))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn single_qubit_table() {
        assert_eq!(&p("X") * &p("Z"), p("-i|Y"));
        assert_eq!(&p("Z") * &p("X"), p("+i|Y"));
        assert_eq!(&p("X") * &p("Y"), p("+i|Z"));
        assert_eq!(&p("Y") * &p("Z"), p("+i|X"));
        assert_eq!(&p("Y") * &p("Y"), p("I"));
    }

    #[test]
    fn text_round_trip_and_hermiticity() {
        let s = p("-i|XYZI");
        assert_eq!(s.to_text(), "-i|XYZI");
        assert!(!s.is_hermitian());
        assert!(p("-1|ZZ").is_hermitian());
        assert_eq!(p("-XZ").phase(), Phase::MINUS_ONE);
    }

    #[test]
    fn basis_action_matches_matrices() {
        // Y|0> = i|1>, Y|1> = -i|0>
        let y = p("Y");
        assert_eq!(y.apply_to_basis(0), (1, Phase::I));
        assert_eq!(y.apply_to_basis(1), (0, Phase::MINUS_I));
        assert_eq!(p("Z").apply_to_basis(1), (1, Phase::MINUS_ONE));
    }

    fn arb_pauli(n: usize) -> impl Strategy<Value = PauliString> {
        (0u8..4, prop::collection::vec(0u8..4, n)).prop_map(|(ph, ls)| {
            let letters: Vec<Letter> = ls
                .into_iter()
                .map(|l| [Letter::I, Letter::X, Letter::Y, Letter::Z][l as usize])
                .collect();
            PauliString::from_letters(Phase::from_power(ph as i64), &letters)
        })
    }

    proptest! {
        #[test]
        fn product_is_associative(a in arb_pauli(70), b in arb_pauli(70), c in arb_pauli(70)) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        }

        #[test]
        fn commutation_matches_products(a in arb_pauli(9), b in arb_pauli(9)) {
            let ab = &a * &b;
            let ba = &b * &a;
            if a.commutes_with(&b) {
                prop_assert_eq!(ab, ba);
            } else {
                prop_assert_eq!(ab, ba.negated());
            }
        }

        #[test]
        fn hermitian_squares_to_identity(a in arb_pauli(12)) {
            let h = if a.is_hermitian() { a } else { a.with_phase(Phase::ONE) };
            let sq = &h * &h;
            prop_assert!(sq.is_identity_letters());
            prop_assert_eq!(sq.phase(), Phase::ONE);
        }
    }
}
