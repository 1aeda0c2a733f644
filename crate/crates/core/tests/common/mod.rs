//! Dense-matrix oracles shared by the integration tests. Nothing here calls
//! the bit-twiddling paths of the library.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use cluster_bell::{PauliAxis, PauliString, QuantumState};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn axis_matrix(a: PauliAxis) -> DMatrix<Complex64> {
    let (o, l, i) = (c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0));
    let v = match a {
        PauliAxis::I => [l, o, o, l],
        PauliAxis::X => [o, l, l, o],
        PauliAxis::Y => [o, -i, i, o],
        PauliAxis::Z => [l, o, o, -l],
    };
    DMatrix::from_row_slice(2, 2, &v)
}

/// Kronecker product with qubit 0 as the leftmost (most significant) factor.
pub fn dense(p: &PauliString) -> DMatrix<Complex64> {
    let mut m = DMatrix::from_element(1, 1, c(1.0, 0.0));
    for &a in p.axes() {
        m = m.kronecker(&axis_matrix(a));
    }
    m * p.phase().to_complex()
}

pub fn vector(s: &QuantumState) -> DVector<Complex64> {
    DVector::from_column_slice(s.amplitudes().expect("pure"))
}

/// ⟨ψ|M|ψ⟩ or tr(ρM) by dense algebra.
pub fn dense_expectation(s: &QuantumState, m: &DMatrix<Complex64>) -> f64 {
    match s.amplitudes() {
        Some(_) => {
            let v = vector(s);
            (v.adjoint() * m * &v)[(0, 0)].re
        }
        None => (s.density_matrix() * m).trace().re,
    }
}

pub fn random_state<R: Rng>(rng: &mut R, n: usize) -> QuantumState {
    let amps = (0..1 << n)
        .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    QuantumState::normalized(amps).unwrap()
}

/// Tensor product of random single-qubit pure states.
pub fn random_product_state<R: Rng>(rng: &mut R, n: usize) -> QuantumState {
    let mut v = DVector::from_element(1, c(1.0, 0.0));
    for _ in 0..n {
        let q = DVector::from_vec(vec![
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
        ]);
        v = v.kronecker(&q);
    }
    QuantumState::normalized(v.iter().copied().collect()).unwrap()
}

/// Entanglement entropy (bits) between qubits `a` and `b` of a two-qubit
/// pure state stored inside a larger register whose other qubits are in a
/// product state: reshape the amplitudes into a 2×2 coefficient matrix and
/// read the Schmidt coefficients off its singular values.
pub fn schmidt_entropy_2q(coeffs: [[Complex64; 2]; 2]) -> f64 {
    let m = DMatrix::from_row_slice(
        2,
        2,
        &[coeffs[0][0], coeffs[0][1], coeffs[1][0], coeffs[1][1]],
    );
    let sv = m.svd(false, false).singular_values;
    let norm: f64 = sv.iter().map(|s| s * s).sum();
    sv.iter()
        .map(|s| s * s / norm)
        .filter(|&p| p > 1e-15)
        .map(|p| -p * p.log2())
        .sum()
}

pub fn ket(bits: &str) -> DVector<Complex64> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut v = DVector::from_element(1, c(1.0, 0.0));
    for b in bits.chars() {
        let q = match b {
            '0' | 'H' => [c(1.0, 0.0), c(0.0, 0.0)],
            '1' | 'V' => [c(0.0, 0.0), c(1.0, 0.0)],
            '+' => [c(h, 0.0), c(h, 0.0)],
            '-' => [c(h, 0.0), c(-h, 0.0)],
            _ => panic!("bad ket letter {b}"),
        };
        v = v.kronecker(&DVector::from_vec(q.to_vec()));
    }
    v
}
