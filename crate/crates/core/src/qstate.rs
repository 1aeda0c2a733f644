//! Dense pure states and density matrices on up to six qubits.
//!
//! Basis index convention: qubit 0 is the most significant bit, and a
//! horizontally polarized photon is |0⟩, so |HHVV⟩ is index `0b0011`.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pauli::{PauliAxis, PauliString};

pub const MAX_QUBITS: usize = 6;

/// Normalization tolerance for pure states and trace tolerance for mixed ones.
pub const NORM_TOL: f64 = 1e-10;

/// Smallest eigenvalue accepted for a density matrix.
pub const EIGEN_FLOOR: f64 = -1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("qubit count {n} outside {min}..={max}")]
    QubitCount { n: usize, min: usize, max: usize },
    #[error("qubit index {index} out of range for {n} qubits")]
    QubitOutOfRange { index: usize, n: usize },
    #[error("cphase needs two distinct qubits, got {0} twice")]
    SameQubit(usize),
    #[error("expected {expected} amplitudes, got {got}")]
    Length { expected: usize, got: usize },
    #[error("state not normalized: norm² = {0}")]
    NotNormalized(f64),
    #[error("density matrix invalid: {0}")]
    InvalidDensity(&'static str),
    #[error("operation requires a pure state")]
    NotPure,
    #[error("partial trace needs at least one kept qubit")]
    EmptyKeep,
    #[error("projection basis must be X, Y or Z")]
    IdentityBasis,
    #[error("outcome must be +1 or -1, got {0}")]
    BadOutcome(i8),
    #[error("outcome {outcome:+} on qubit {qubit} has zero probability")]
    ZeroProbability { qubit: usize, outcome: i8 },
    #[error("visibility {0} outside [0, 1]")]
    Visibility(f64),
    #[error("states have different qubit counts ({0} vs {1})")]
    Mismatch(usize, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Repr {
    Pure(Vec<Complex64>),
    Mixed(DMatrix<Complex64>),
}

/// Pure state vector or density matrix on `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    n: usize,
    repr: Repr,
}

fn check_n(n: usize, min: usize) -> Result<(), StateError> {
    if n < min || n > MAX_QUBITS {
        return Err(StateError::QubitCount {
            n,
            min,
            max: MAX_QUBITS,
        });
    }
    Ok(())
}

fn bit(n: usize, qubit: usize) -> usize {
    1 << (n - 1 - qubit)
}

impl QuantumState {
    /// Validates normalization to [`NORM_TOL`].
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self, StateError> {
        let n = amplitudes.len().trailing_zeros() as usize;
        if amplitudes.len() != 1 << n {
            return Err(StateError::Length {
                expected: 1 << n,
                got: amplitudes.len(),
            });
        }
        check_n(n, 1)?;
        let norm2: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > NORM_TOL {
            return Err(StateError::NotNormalized(norm2));
        }
        Ok(Self::from_pure_unchecked(n, amplitudes))
    }

    /// Scales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self, StateError> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(StateError::NotNormalized(norm * norm));
        }
        Self::from_amplitudes(amplitudes.into_iter().map(|a| a / norm).collect())
    }

    /// Validates Hermiticity, unit trace and positivity.
    pub fn from_density(rho: DMatrix<Complex64>) -> Result<Self, StateError> {
        let dim = rho.nrows();
        if dim != rho.ncols() || dim == 0 || !dim.is_power_of_two() {
            return Err(StateError::InvalidDensity("not a square 2^n matrix"));
        }
        let n = dim.trailing_zeros() as usize;
        check_n(n, 1)?;
        if (&rho - rho.adjoint()).iter().any(|z| z.norm() > NORM_TOL) {
            return Err(StateError::InvalidDensity("not Hermitian"));
        }
        if (rho.trace() - ONE).norm() > NORM_TOL {
            return Err(StateError::InvalidDensity("trace differs from 1"));
        }
        let min_eig = hermitian_eigenvalues(&rho)
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min_eig < EIGEN_FLOOR {
            return Err(StateError::InvalidDensity("negative eigenvalue"));
        }
        Ok(Self::from_density_unchecked(n, rho))
    }

    pub(crate) fn from_pure_unchecked(n: usize, amps: Vec<Complex64>) -> Self {
        Self {
            n,
            repr: Repr::Pure(amps),
        }
    }

    pub(crate) fn from_density_unchecked(n: usize, rho: DMatrix<Complex64>) -> Self {
        Self {
            n,
            repr: Repr::Mixed(rho),
        }
    }

    pub(crate) fn repr(&self) -> &Repr {
        &self.repr
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.repr, Repr::Pure(_))
    }

    pub fn amplitudes(&self) -> Option<&[Complex64]> {
        match &self.repr {
            Repr::Pure(a) => Some(a),
            Repr::Mixed(_) => None,
        }
    }

    /// Density matrix, building |ψ⟩⟨ψ| for pure states.
    pub fn density_matrix(&self) -> DMatrix<Complex64> {
        match &self.repr {
            Repr::Pure(a) => {
                let dim = a.len();
                DMatrix::from_fn(dim, dim, |r, c| a[r] * a[c].conj())
            }
            Repr::Mixed(rho) => rho.clone(),
        }
    }

    /// ⟨self|other⟩ for pure states; use its modulus for equality up to
    /// global phase.
    pub fn overlap(&self, other: &QuantumState) -> Result<Complex64, StateError> {
        if self.n != other.n {
            return Err(StateError::Mismatch(self.n, other.n));
        }
        match (&self.repr, &other.repr) {
            (Repr::Pure(a), Repr::Pure(b)) => Ok(a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()),
            _ => Err(StateError::NotPure),
        }
    }

    /// ⟨ψ|ρ|ψ⟩ with `self` = ρ (pure or mixed) and `target` pure.
    pub fn fidelity_with_pure(&self, target: &QuantumState) -> Result<f64, StateError> {
        if self.n != target.n {
            return Err(StateError::Mismatch(self.n, target.n));
        }
        let psi = target.amplitudes().ok_or(StateError::NotPure)?;
        match &self.repr {
            Repr::Pure(a) => Ok(a
                .iter()
                .zip(psi)
                .map(|(x, y)| y.conj() * x)
                .sum::<Complex64>()
                .norm_sqr()),
            Repr::Mixed(rho) => {
                let mut acc = ZERO;
                for r in 0..rho.nrows() {
                    for c in 0..rho.ncols() {
                        acc += psi[r].conj() * rho[(r, c)] * psi[c];
                    }
                }
                Ok(acc.re)
            }
        }
    }

    /// Σ|aᵢ|² for pure, tr ρ for mixed.
    pub fn trace(&self) -> f64 {
        match &self.repr {
            Repr::Pure(a) => a.iter().map(|x| x.norm_sqr()).sum(),
            Repr::Mixed(rho) => rho.trace().re,
        }
    }

    fn check_qubit(&self, q: usize) -> Result<(), StateError> {
        if q >= self.n {
            return Err(StateError::QubitOutOfRange {
                index: q,
                n: self.n,
            });
        }
        Ok(())
    }

    /// Applies a single-qubit unitary `u` (row-major 2×2) to `qubit`.
    pub fn apply_single(&self, qubit: usize, u: [[Complex64; 2]; 2]) -> Result<Self, StateError> {
        self.check_qubit(qubit)?;
        let m = bit(self.n, qubit);
        let mix = |v: &mut [Complex64]| {
            for b in 0..v.len() {
                if b & m == 0 {
                    let (a0, a1) = (v[b], v[b | m]);
                    v[b] = u[0][0] * a0 + u[0][1] * a1;
                    v[b | m] = u[1][0] * a0 + u[1][1] * a1;
                }
            }
        };
        let repr = match &self.repr {
            Repr::Pure(a) => {
                let mut v = a.clone();
                mix(&mut v);
                Repr::Pure(v)
            }
            Repr::Mixed(rho) => {
                // U ρ U†: apply U to columns, then to rows via the adjoint trick.
                let mut out = rho.clone();
                for mut col in out.column_iter_mut() {
                    mix(col.as_mut_slice());
                }
                let mut out = out.adjoint();
                for mut col in out.column_iter_mut() {
                    mix(col.as_mut_slice());
                }
                Repr::Mixed(out.adjoint())
            }
        };
        Ok(Self { n: self.n, repr })
    }
}

/// Computational basis state |index⟩.
pub fn basis_state(n: usize, index: usize) -> Result<QuantumState, StateError> {
    check_n(n, 1)?;
    let dim = 1 << n;
    if index >= dim {
        return Err(StateError::Length {
            expected: dim,
            got: index,
        });
    }
    let mut a = vec![ZERO; dim];
    a[index] = ONE;
    Ok(QuantumState::from_pure_unchecked(n, a))
}

/// |+⟩^⊗n.
pub fn plus_state(n: usize) -> Result<QuantumState, StateError> {
    check_n(n, 1)?;
    let dim = 1usize << n;
    let amp = Complex64::new((dim as f64).sqrt().recip(), 0.0);
    Ok(QuantumState::from_pure_unchecked(n, vec![amp; dim]))
}

/// Controlled-phase: |j⟩|k⟩ → (−1)^{jk}|j⟩|k⟩.
pub fn cphase(s: &QuantumState, j: usize, k: usize) -> Result<QuantumState, StateError> {
    s.check_qubit(j)?;
    s.check_qubit(k)?;
    if j == k {
        return Err(StateError::SameQubit(j));
    }
    let mask = bit(s.n, j) | bit(s.n, k);
    let sign = |b: usize| if b & mask == mask { -1.0 } else { 1.0 };
    let repr = match &s.repr {
        Repr::Pure(a) => Repr::Pure(a.iter().enumerate().map(|(b, &x)| x * sign(b)).collect()),
        Repr::Mixed(rho) => Repr::Mixed(DMatrix::from_fn(rho.nrows(), rho.ncols(), |r, c| {
            rho[(r, c)] * (sign(r) * sign(c))
        })),
    };
    Ok(QuantumState { n: s.n, repr })
}

/// Plus states joined by CPhase along a line: (0,1), (1,2), …
pub fn linear_cluster(n: usize) -> Result<QuantumState, StateError> {
    check_n(n, 2)?;
    let mut s = plus_state(n)?;
    for q in 0..n - 1 {
        s = cphase(&s, q, q + 1)?;
    }
    Ok(s)
}

/// ½(|HHHH⟩ + |HHVV⟩ + |VVHH⟩ − |VVVV⟩).
pub fn target_cluster() -> QuantumState {
    let mut a = vec![ZERO; 16];
    a[0b0000] = Complex64::new(0.5, 0.0);
    a[0b0011] = Complex64::new(0.5, 0.0);
    a[0b1100] = Complex64::new(0.5, 0.0);
    a[0b1111] = Complex64::new(-0.5, 0.0);
    QuantumState::from_pure_unchecked(4, a)
}

pub fn hadamard_matrix() -> [[Complex64; 2]; 2] {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    [[h, h], [h, -h]]
}

/// Hadamard on each listed qubit. Repeated indices are applied once.
pub fn hadamard_on(s: &QuantumState, qubits: &[usize]) -> Result<QuantumState, StateError> {
    for &q in qubits {
        s.check_qubit(q)?;
    }
    let mut qs = qubits.to_vec();
    qs.sort_unstable();
    qs.dedup();
    let mut out = s.clone();
    for q in qs {
        out = out.apply_single(q, hadamard_matrix())?;
    }
    Ok(out)
}

/// (|0…0⟩ + |1…1⟩)/√2.
pub fn ghz(n: usize) -> Result<QuantumState, StateError> {
    check_n(n, 2)?;
    let dim = 1 << n;
    let mut a = vec![ZERO; dim];
    a[0] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    a[dim - 1] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    Ok(QuantumState::from_pure_unchecked(n, a))
}

/// (|100⟩ + |010⟩ + |001⟩)/√3.
pub fn w3() -> QuantumState {
    let amp = Complex64::new(3f64.sqrt().recip(), 0.0);
    let mut a = vec![ZERO; 8];
    for i in [0b100, 0b010, 0b001] {
        a[i] = amp;
    }
    QuantumState::from_pure_unchecked(3, a)
}

/// Reduced density matrix on `keep`, in the order given.
pub fn partial_trace(s: &QuantumState, keep: &[usize]) -> Result<QuantumState, StateError> {
    if keep.is_empty() {
        return Err(StateError::EmptyKeep);
    }
    for &q in keep {
        s.check_qubit(q)?;
    }
    let mut sorted = keep.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != keep.len() {
        return Err(StateError::InvalidDensity("repeated qubit in keep set"));
    }
    let n = s.n;
    let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let k = keep.len();
    let dk = 1usize << k;
    let dt = 1usize << traced.len();

    // full index from (kept index, traced index)
    let compose = |ki: usize, ti: usize| -> usize {
        let mut b = 0;
        for (pos, &q) in keep.iter().enumerate() {
            if ki & (1 << (k - 1 - pos)) != 0 {
                b |= bit(n, q);
            }
        }
        for (pos, &q) in traced.iter().enumerate() {
            if ti & (1 << (traced.len() - 1 - pos)) != 0 {
                b |= bit(n, q);
            }
        }
        b
    };

    let mut out = DMatrix::from_element(dk, dk, ZERO);
    for r in 0..dk {
        for c in 0..dk {
            let mut acc = ZERO;
            for t in 0..dt {
                let (br, bc) = (compose(r, t), compose(c, t));
                acc += match &s.repr {
                    Repr::Pure(a) => a[br] * a[bc].conj(),
                    Repr::Mixed(rho) => rho[(br, bc)],
                };
            }
            out[(r, c)] = acc;
        }
    }
    Ok(QuantumState::from_density_unchecked(k, out))
}

/// Projects `qubit` onto the `outcome` eigenspace of the Pauli `basis`.
///
/// Returns the renormalized state and the outcome probability.
pub fn project_qubit(
    s: &QuantumState,
    qubit: usize,
    basis: PauliAxis,
    outcome: i8,
) -> Result<(QuantumState, f64), StateError> {
    let amps = s.amplitudes().ok_or(StateError::NotPure)?;
    s.check_qubit(qubit)?;
    if basis == PauliAxis::I {
        return Err(StateError::IdentityBasis);
    }
    if outcome != 1 && outcome != -1 {
        return Err(StateError::BadOutcome(outcome));
    }
    let p = PauliString::single(s.n, qubit, basis).expect("qubit checked");
    let flipped = p.apply(s).expect("dimensions match");
    let flipped = flipped.amplitudes().expect("pure in, pure out");
    let sgn = f64::from(outcome);
    // (1 + outcome·P)/2
    let proj: Vec<Complex64> = amps
        .iter()
        .zip(flipped)
        .map(|(a, b)| (a + b * sgn) * 0.5)
        .collect();
    let prob: f64 = proj.iter().map(|x| x.norm_sqr()).sum();
    if prob < 1e-14 {
        return Err(StateError::ZeroProbability { qubit, outcome });
    }
    let norm = prob.sqrt();
    let out = proj.into_iter().map(|x| x / norm).collect();
    Ok((QuantumState::from_pure_unchecked(s.n, out), prob))
}

/// ρ = V·ρ_s + (1 − V)·I/2ⁿ.
pub fn apply_white_noise(s: &QuantumState, visibility: f64) -> Result<QuantumState, StateError> {
    if !(0.0..=1.0).contains(&visibility) {
        return Err(StateError::Visibility(visibility));
    }
    let dim = s.dim();
    let mixed = (1.0 - visibility) / dim as f64;
    let mut rho = s.density_matrix() * Complex64::new(visibility, 0.0);
    for i in 0..dim {
        rho[(i, i)] += mixed;
    }
    Ok(QuantumState::from_density_unchecked(s.n, rho))
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(s: &QuantumState) -> f64 {
    if s.is_pure() {
        return 0.0;
    }
    hermitian_eigenvalues(&s.density_matrix())
        .into_iter()
        .filter(|&l| l > 1e-15)
        .map(|l| -l * l.log2())
        .sum()
}

/// Entropy of the reduced state on `part`, in bits. For a pure input this is
/// the entanglement entropy across the `part` | rest cut.
pub fn entanglement_entropy(s: &QuantumState, part: &[usize]) -> Result<f64, StateError> {
    if !s.is_pure() {
        return Err(StateError::NotPure);
    }
    Ok(von_neumann_entropy(&partial_trace(s, part)?))
}

/// Serialized form used for state dumps: amplitudes as `[re, im]` pairs in
/// basis order, or the row-major density matrix for mixed states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateDump {
    pub n: usize,
    pub kind: StateKind,
    pub amplitudes: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Pure,
    Mixed,
}

impl From<&QuantumState> for StateDump {
    fn from(s: &QuantumState) -> Self {
        let (kind, amplitudes) = match &s.repr {
            Repr::Pure(a) => (StateKind::Pure, a.iter().map(|z| [z.re, z.im]).collect()),
            Repr::Mixed(rho) => (
                StateKind::Mixed,
                rho.transpose().iter().map(|z| [z.re, z.im]).collect(),
            ),
        };
        StateDump {
            n: s.n,
            kind,
            amplitudes,
        }
    }
}

impl TryFrom<StateDump> for QuantumState {
    type Error = StateError;

    fn try_from(d: StateDump) -> Result<Self, StateError> {
        let values: Vec<Complex64> = d
            .amplitudes
            .iter()
            .map(|[re, im]| Complex64::new(*re, *im))
            .collect();
        let dim = 1usize << d.n;
        let s = match d.kind {
            StateKind::Pure => QuantumState::from_amplitudes(values)?,
            StateKind::Mixed => {
                if values.len() != dim * dim {
                    return Err(StateError::Length {
                        expected: dim * dim,
                        got: values.len(),
                    });
                }
                QuantumState::from_density(DMatrix::from_row_slice(dim, dim, &values))?
            }
        };
        if s.n != d.n {
            return Err(StateError::Length {
                expected: dim,
                got: s.dim(),
            });
        }
        Ok(s)
    }
}
