//! Signed Pauli strings with exact phase tracking.
//!
//! A [`PauliString`] is a tensor product of single-qubit Pauli operators times
//! a phase drawn from the cyclic group {+1, +i, −1, −i}. Phases are stored as
//! an exponent of `i` so products never accumulate floating-point error.
//!
//! Qubit 0 is the leftmost letter and the most significant bit of a
//! computational-basis index, so `"XYYX"` acts on basis index `0b abcd` with
//! `X` on bit `a`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qstate::{QuantumState, Repr};

/// Largest register for which the stabilizer search is allowed (4ⁿ strings).
pub const MAX_STABILIZER_QUBITS: usize = 6;

/// Default tolerance for deciding that |⟨P⟩| = 1.
pub const DEFAULT_STABILIZER_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PauliError {
    #[error("length mismatch: {0} vs {1} qubits")]
    LengthMismatch(usize, usize),
    #[error("operator has {ops} qubits but state has {state}")]
    DimensionMismatch { ops: usize, state: usize },
    #[error("phase {0} is not Hermitian; use a string with phase +1 or -1")]
    NonHermitian(Phase),
    #[error("qubit index {index} out of range for {n} qubits")]
    QubitOutOfRange { index: usize, n: usize },
    #[error("stabilizer enumeration requires a pure state")]
    MixedState,
    #[error("stabilizer enumeration limited to {MAX_STABILIZER_QUBITS} qubits, got {0}")]
    TooManyQubits(usize),
    #[error("cannot parse Pauli string {0:?}: {1}")]
    Parse(String, &'static str),
}

/// Single-qubit Pauli operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PauliAxis {
    I,
    X,
    Y,
    Z,
}

impl PauliAxis {
    pub const ALL: [PauliAxis; 4] = [PauliAxis::I, PauliAxis::X, PauliAxis::Y, PauliAxis::Z];

    pub fn letter(self) -> char {
        match self {
            PauliAxis::I => 'I',
            PauliAxis::X => 'X',
            PauliAxis::Y => 'Y',
            PauliAxis::Z => 'Z',
        }
    }

    /// Accepts `0` as an alias for the identity.
    pub fn from_letter(c: char) -> Option<Self> {
        match c {
            'I' | '0' => Some(PauliAxis::I),
            'X' => Some(PauliAxis::X),
            'Y' => Some(PauliAxis::Y),
            'Z' => Some(PauliAxis::Z),
            _ => None,
        }
    }

    /// Whether this axis flips the computational basis bit.
    fn flips(self) -> bool {
        matches!(self, PauliAxis::X | PauliAxis::Y)
    }

    /// Single-qubit product `self · other` as (axis, power of i).
    fn mul(self, other: PauliAxis) -> (PauliAxis, u8) {
        use PauliAxis::*;
        match (self, other) {
            (I, p) | (p, I) => (p, 0),
            (a, b) if a == b => (I, 0),
            (X, Y) => (Z, 1),
            (Y, Z) => (X, 1),
            (Z, X) => (Y, 1),
            (Y, X) => (Z, 3),
            (Z, Y) => (X, 3),
            (X, Z) => (Y, 3),
            _ => unreachable!(),
        }
    }

    /// Dense 2×2 matrix, row-major.
    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match self {
            PauliAxis::I => [[l, o], [o, l]],
            PauliAxis::X => [[o, l], [l, o]],
            PauliAxis::Y => [[o, -i], [i, o]],
            PauliAxis::Z => [[l, o], [o, -l]],
        }
    }
}

impl fmt::Display for PauliAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// Element of {+1, +i, −1, −i}, stored as the exponent of `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Phase(u8);

impl Phase {
    pub const PLUS_ONE: Phase = Phase(0);
    pub const PLUS_I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_power(k: u8) -> Self {
        Phase(k % 4)
    }

    pub fn power(self) -> u8 {
        self.0
    }

    pub fn from_sign(sign: i8) -> Self {
        if sign < 0 {
            Phase::MINUS_ONE
        } else {
            Phase::PLUS_ONE
        }
    }

    pub fn is_real(self) -> bool {
        self.0.is_multiple_of(2)
    }

    /// ±1 for real phases.
    pub fn sign(self) -> Option<i8> {
        match self.0 {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }

    pub fn to_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;
    // phases multiply by adding exponents of i
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: Phase) -> Phase {
        Phase::from_power(self.0 + rhs.0)
    }
}

impl std::ops::Neg for Phase {
    type Output = Phase;
    fn neg(self) -> Phase {
        Phase::from_power(self.0 + 2)
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

/// Phase times a tensor product of Pauli operators.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    axes: Vec<PauliAxis>,
    phase: Phase,
}

impl PauliString {
    pub fn new(axes: Vec<PauliAxis>, phase: Phase) -> Self {
        Self { axes, phase }
    }

    pub fn identity(n: usize) -> Self {
        Self::new(vec![PauliAxis::I; n], Phase::PLUS_ONE)
    }

    /// Single non-identity factor `axis` on `qubit` of an `n`-qubit register.
    pub fn single(n: usize, qubit: usize, axis: PauliAxis) -> Result<Self, PauliError> {
        if qubit >= n {
            return Err(PauliError::QubitOutOfRange { index: qubit, n });
        }
        let mut axes = vec![PauliAxis::I; n];
        axes[qubit] = axis;
        Ok(Self::new(axes, Phase::PLUS_ONE))
    }

    pub fn axes(&self) -> &[PauliAxis] {
        &self.axes
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn len(&self) -> usize {
        self.axes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axes.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.axes.iter().all(|&a| a == PauliAxis::I)
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase.is_real()
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    /// Number of non-identity factors.
    pub fn weight(&self) -> usize {
        self.axes.iter().filter(|&&a| a != PauliAxis::I).count()
    }

    /// Operator product `self · other` with the accumulated phase.
    pub fn multiply(&self, other: &PauliString) -> Result<PauliString, PauliError> {
        if self.len() != other.len() {
            return Err(PauliError::LengthMismatch(self.len(), other.len()));
        }
        let mut power = self.phase.power() + other.phase.power();
        let axes = self
            .axes
            .iter()
            .zip(&other.axes)
            .map(|(&a, &b)| {
                let (c, k) = a.mul(b);
                power += k;
                c
            })
            .collect();
        Ok(PauliString::new(axes, Phase::from_power(power)))
    }

    /// Bit masks over basis indices: (bits flipped by X/Y, bits carrying Z/Y),
    /// plus the number of Y factors.
    fn masks(&self) -> (usize, usize, u32) {
        let n = self.len();
        let mut x = 0usize;
        let mut z = 0usize;
        let mut ny = 0u32;
        for (q, &a) in self.axes.iter().enumerate() {
            let bit = 1usize << (n - 1 - q);
            if a.flips() {
                x |= bit;
            }
            if matches!(a, PauliAxis::Z | PauliAxis::Y) {
                z |= bit;
            }
            if a == PauliAxis::Y {
                ny += 1;
            }
        }
        (x, z, ny)
    }

    /// Action on one basis vector: `P|b⟩ = c|b ^ x⟩`, returns (x mask, c(b)) in a
    /// closure-friendly form.
    ///
    /// With Y = iXZ, P = phase · i^{#Y} · X^x Z^z, so
    /// c(b) = phase · i^{#Y} · (−1)^{popcount(b & z)}.
    fn basis_action(&self) -> (usize, impl Fn(usize) -> Complex64) {
        let (x, z, ny) = self.masks();
        let base = (self.phase * Phase::from_power((ny % 4) as u8)).to_complex();
        (x, move |b: usize| {
            if (b & z).count_ones() % 2 == 1 {
                -base
            } else {
                base
            }
        })
    }

    /// Applies the operator by permuting amplitudes and flipping phases.
    pub fn apply(&self, state: &QuantumState) -> Result<QuantumState, PauliError> {
        self.check_dim(state)?;
        let (x, coeff) = self.basis_action();
        match state.repr() {
            Repr::Pure(amps) => {
                let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
                for (b, &a) in amps.iter().enumerate() {
                    out[b ^ x] = coeff(b) * a;
                }
                Ok(QuantumState::from_pure_unchecked(state.n_qubits(), out))
            }
            Repr::Mixed(rho) => {
                // P ρ P†
                let dim = rho.nrows();
                let mut out = nalgebra::DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
                for r in 0..dim {
                    for c in 0..dim {
                        out[(r ^ x, c ^ x)] = coeff(r) * rho[(r, c)] * coeff(c).conj();
                    }
                }
                Ok(QuantumState::from_density_unchecked(state.n_qubits(), out))
            }
        }
    }

    /// ⟨ψ|P|ψ⟩ for pure states, tr(ρP) for mixed ones.
    pub fn expectation(&self, state: &QuantumState) -> Result<f64, PauliError> {
        if !self.is_hermitian() {
            return Err(PauliError::NonHermitian(self.phase));
        }
        self.check_dim(state)?;
        let (x, coeff) = self.basis_action();
        let value = match state.repr() {
            Repr::Pure(amps) => amps
                .iter()
                .enumerate()
                .map(|(b, &a)| amps[b ^ x].conj() * coeff(b) * a)
                .sum::<Complex64>(),
            // tr(ρP) = Σ_b ρ[b, b^x] c(b)
            Repr::Mixed(rho) => (0..rho.nrows())
                .map(|b| rho[(b, b ^ x)] * coeff(b))
                .sum::<Complex64>(),
        };
        Ok(value.re)
    }

    /// Conjugation `H P H` on the listed qubits: X ↔ Z, Y → −Y, I fixed.
    pub fn conjugate_by_hadamard(&self, qubits: &[usize]) -> Result<PauliString, PauliError> {
        let n = self.len();
        let mut out = self.clone();
        for &q in qubits {
            if q >= n {
                return Err(PauliError::QubitOutOfRange { index: q, n });
            }
        }
        let mut seen = vec![false; n];
        for &q in qubits {
            if std::mem::replace(&mut seen[q], true) {
                continue;
            }
            out.axes[q] = match out.axes[q] {
                PauliAxis::X => PauliAxis::Z,
                PauliAxis::Z => PauliAxis::X,
                PauliAxis::Y => {
                    out.phase = -out.phase;
                    PauliAxis::Y
                }
                PauliAxis::I => PauliAxis::I,
            };
        }
        Ok(out)
    }

    /// Dense 2ⁿ×2ⁿ matrix. Only meant for cross-checks on small registers.
    pub fn to_matrix(&self) -> nalgebra::DMatrix<Complex64> {
        let dim = 1usize << self.len();
        let mut m = nalgebra::DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
        let (x, coeff) = self.basis_action();
        for b in 0..dim {
            m[(b ^ x, b)] = coeff(b);
        }
        m
    }

    fn check_dim(&self, state: &QuantumState) -> Result<(), PauliError> {
        if self.len() != state.n_qubits() {
            return Err(PauliError::DimensionMismatch {
                ops: self.len(),
                state: state.n_qubits(),
            });
        }
        Ok(())
    }

    /// All 4ⁿ unsigned strings in lexicographic I < X < Y < Z order.
    pub fn all(n: usize) -> impl Iterator<Item = PauliString> {
        (0..4usize.pow(n as u32)).map(move |mut k| {
            let mut axes = vec![PauliAxis::I; n];
            for q in (0..n).rev() {
                axes[q] = PauliAxis::ALL[k % 4];
                k /= 4;
            }
            PauliString::new(axes, Phase::PLUS_ONE)
        })
    }
}

impl fmt::Display for PauliString {
    /// `+1` prints bare, the other phases as `-`, `i`, `-i` prefixes.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.phase.power() {
            0 => "",
            1 => "i",
            2 => "-",
            _ => "-i",
        };
        f.write_str(prefix)?;
        for a in &self.axes {
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = PauliError;

    /// Optional sign prefix (`+`, `-`, `i`, `+i`, `-i`) followed by axis
    /// letters from `IXYZ`; `0` is accepted for `I`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |why| PauliError::Parse(s.to_string(), why);
        let t = s.trim();
        let (phase, body) = if let Some(r) = t.strip_prefix("-i") {
            (Phase::MINUS_I, r)
        } else if let Some(r) = t.strip_prefix("+i") {
            (Phase::PLUS_I, r)
        } else if let Some(r) = t.strip_prefix('i') {
            (Phase::PLUS_I, r)
        } else if let Some(r) = t.strip_prefix('-') {
            (Phase::MINUS_ONE, r)
        } else if let Some(r) = t.strip_prefix('+') {
            (Phase::PLUS_ONE, r)
        } else {
            (Phase::PLUS_ONE, t)
        };
        if body.is_empty() {
            return Err(err("no axis letters"));
        }
        let axes = body
            .chars()
            .map(|c| PauliAxis::from_letter(c).ok_or_else(|| err("expected one of I, X, Y, Z, 0")))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PauliString::new(axes, phase))
    }
}

impl Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A Pauli string with a definite ±1 eigenvalue on some state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stabilizer {
    pub pauli: PauliString,
    pub sign: i8,
}

/// Every non-identity Pauli string `P` with |⟨ψ|P|ψ⟩| > 1 − tol.
///
/// Strings are returned in lexicographic order with phase +1; `sign` is the
/// eigenvalue. For an n-qubit stabilizer state this yields 2ⁿ − 1 entries.
pub fn enumerate_stabilizers(
    state: &QuantumState,
    tol: f64,
) -> Result<Vec<Stabilizer>, PauliError> {
    if !state.is_pure() {
        return Err(PauliError::MixedState);
    }
    let n = state.n_qubits();
    if n > MAX_STABILIZER_QUBITS {
        return Err(PauliError::TooManyQubits(n));
    }
    let mut out = Vec::new();
    for p in PauliString::all(n).skip(1) {
        let e = p.expectation(state)?;
        if e.abs() > 1.0 - tol {
            out.push(Stabilizer {
                pauli: p,
                sign: if e > 0.0 { 1 } else { -1 },
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn single_qubit_products() {
        let p = ps("X").multiply(&ps("Y")).unwrap();
        assert_eq!(p, ps("iZ"));
        assert_eq!(ps("Y").multiply(&ps("X")).unwrap(), ps("-iZ"));
        assert_eq!(ps("Z").multiply(&ps("Z")).unwrap(), ps("I"));
    }

    #[test]
    fn identity_product() {
        let p = ps("IIII").multiply(&ps("XYYX")).unwrap();
        assert_eq!(p, ps("XYYX"));
        assert_eq!(p.phase(), Phase::PLUS_ONE);
    }

    #[test]
    fn length_mismatch() {
        assert_eq!(
            ps("XX").multiply(&ps("XXX")),
            Err(PauliError::LengthMismatch(2, 3))
        );
    }

    #[test]
    fn x_on_zero() {
        let zero = qstate::basis_state(1, 0).unwrap();
        let one = qstate::basis_state(1, 1).unwrap();
        let out = ps("X").apply(&zero).unwrap();
        assert!(out.overlap(&one).unwrap().norm() > 1.0 - 1e-15);
    }

    #[test]
    fn y_convention() {
        // Y|0⟩ = i|1⟩
        let out = ps("Y").apply(&qstate::basis_state(1, 0).unwrap()).unwrap();
        let a = out.amplitudes().unwrap();
        assert_eq!(a[1], Complex64::new(0.0, 1.0));
        assert_eq!(a[0], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn non_hermitian_expectation_rejected() {
        let s = qstate::plus_state(1).unwrap();
        assert!(matches!(
            ps("iZ").expectation(&s),
            Err(PauliError::NonHermitian(_))
        ));
    }

    #[test]
    fn dimension_mismatch() {
        let s = qstate::plus_state(2).unwrap();
        assert!(matches!(
            ps("XYZ").apply(&s),
            Err(PauliError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn zero_state_z_expectation() {
        let s = qstate::basis_state(4, 0).unwrap();
        assert_eq!(ps("ZIII").expectation(&s).unwrap(), 1.0);
    }

    #[test]
    fn hadamard_conjugation_examples() {
        let p = ps("ZYYZ").conjugate_by_hadamard(&[0, 3]).unwrap();
        assert_eq!(p, ps("XYYX"));
        let p = ps("IZYY").conjugate_by_hadamard(&[0, 3]).unwrap();
        assert_eq!(p, ps("-IZYY"));
        let p = ps("-XZYI").conjugate_by_hadamard(&[]).unwrap();
        assert_eq!(p, ps("-XZYI"));
        assert!(ps("XX").conjugate_by_hadamard(&[2]).is_err());
    }

    #[test]
    fn parse_and_print() {
        for s in ["XYYX", "-IZYY", "iXZ", "-iY", "IIII"] {
            assert_eq!(ps(s).to_string(), s);
        }
        assert_eq!(ps("0ZXX"), ps("IZXX"));
        assert_eq!(ps("+XY"), ps("XY"));
        assert!("".parse::<PauliString>().is_err());
        assert!("-".parse::<PauliString>().is_err());
        assert!("XQ".parse::<PauliString>().is_err());
    }

    #[test]
    fn single_qubit_zero_stabilizer() {
        let s = qstate::basis_state(1, 0).unwrap();
        let stabs = enumerate_stabilizers(&s, DEFAULT_STABILIZER_TOL).unwrap();
        assert_eq!(
            stabs,
            vec![Stabilizer {
                pauli: ps("Z"),
                sign: 1
            }]
        );
    }

    #[test]
    fn stabilizers_need_pure_state() {
        let s = qstate::apply_white_noise(&qstate::plus_state(2).unwrap(), 0.5).unwrap();
        assert_eq!(
            enumerate_stabilizers(&s, DEFAULT_STABILIZER_TOL),
            Err(PauliError::MixedState)
        );
    }

    #[test]
    fn all_strings_count() {
        assert_eq!(PauliString::all(3).count(), 64);
        assert!(PauliString::all(2).next().unwrap().is_identity());
    }
}
