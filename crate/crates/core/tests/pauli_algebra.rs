mod common;

use cluster_bell::pauli::{enumerate_stabilizers, DEFAULT_STABILIZER_TOL};
use cluster_bell::{qstate, PauliAxis, PauliString, Phase};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;

fn ps(s: &str) -> PauliString {
    s.parse().unwrap()
}

fn arb_pauli(n: usize) -> impl Strategy<Value = PauliString> {
    (proptest::collection::vec(0usize..4, n), 0u8..4).prop_map(|(axes, k)| {
        PauliString::new(
            axes.into_iter().map(|i| PauliAxis::ALL[i]).collect(),
            Phase::from_power(k),
        )
    })
}

fn max_diff(
    a: &nalgebra::DMatrix<num_complex::Complex64>,
    b: &nalgebra::DMatrix<num_complex::Complex64>,
) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[test]
fn zyyz_times_zyxy_matches_dense_product() {
    let p = ps("ZYYZ");
    let q = ps("ZYXY");
    let r = p.multiply(&q).unwrap();
    assert_eq!(max_diff(&dense(&r), &(dense(&p) * dense(&q))), 0.0);
    assert_eq!(r, ps("-IIZX"));
}

#[test]
fn apply_agrees_with_dense_for_all_four_qubit_strings() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let states: Vec<_> = (0..50).map(|_| random_state(&mut rng, 4)).collect();
    for p in PauliString::all(4) {
        let m = dense(&p);
        for s in &states {
            let fast = vector(&p.apply(s).unwrap());
            let slow = &m * vector(s);
            let err = (fast - slow).iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(err < 1e-12, "{p}: {err}");
        }
    }
}

#[test]
fn apply_on_mixed_state_is_conjugation() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let s = qstate::apply_white_noise(&random_state(&mut rng, 3), 0.7).unwrap();
    for p in PauliString::all(3) {
        let m = dense(&p);
        let expect = &m * s.density_matrix() * m.adjoint();
        assert!(max_diff(&p.apply(&s).unwrap().density_matrix(), &expect) < 1e-12);
    }
}

#[test]
fn expectations_match_dense_sandwich() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let pure = random_state(&mut rng, 4);
    let mixed = qstate::apply_white_noise(&random_state(&mut rng, 4), 0.4).unwrap();
    for p in PauliString::all(4) {
        let m = dense(&p);
        for s in [&pure, &mixed] {
            let e = p.expectation(s).unwrap();
            assert!((e - dense_expectation(s, &m)).abs() < 1e-12);
            assert!(e.abs() <= 1.0 + 1e-12);
        }
    }
}

#[test]
fn paper_expectations_on_target() {
    let t = qstate::target_cluster();
    assert!((ps("IZYY").expectation(&t).unwrap() + 1.0).abs() < 1e-12);
    // eigenstate check via apply
    let out = ps("XYYX").apply(&t).unwrap();
    assert!((out.overlap(&t).unwrap().re - 1.0).abs() < 1e-12);
}

#[test]
fn ghz4_izxx_dense_oracle() {
    let g = qstate::ghz(4).unwrap();
    let p = ps("IZXX");
    let oracle = dense_expectation(&g, &dense(&p));
    assert!(oracle.abs() < 1e-15);
    assert!((p.expectation(&g).unwrap() - oracle).abs() < 1e-15);
}

fn check_group(stabs: &[cluster_bell::Stabilizer], n: usize) {
    let mut group = vec![(PauliString::identity(n), 1i8)];
    group.extend(stabs.iter().map(|s| (s.pauli.clone(), s.sign)));
    for (a, sa) in &group {
        for (b, sb) in &group {
            let prod = a.multiply(b).unwrap();
            let sign = prod
                .phase()
                .sign()
                .expect("stabilizers commute, product is Hermitian");
            let unsigned = prod.clone().with_phase(Phase::PLUS_ONE);
            let (_, sp) = group
                .iter()
                .find(|(g, _)| *g == unsigned)
                .unwrap_or_else(|| panic!("{a}·{b} = {prod} not in group"));
            assert_eq!(sign * sp, sa * sb, "{a}·{b}");
        }
    }
}

#[test]
fn linear_cluster_stabilizer_group() {
    let c = qstate::linear_cluster(4).unwrap();
    let stabs = enumerate_stabilizers(&c, DEFAULT_STABILIZER_TOL).unwrap();
    assert_eq!(stabs.len(), 15);
    check_group(&stabs, 4);
    for (p, s) in [("ZYYZ", 1), ("ZYXY", -1), ("IZXZ", 1), ("IZYY", 1)] {
        assert!(stabs.iter().any(|x| x.pauli == ps(p) && x.sign == s), "{p}");
    }
}

#[test]
fn target_stabilizer_group() {
    let t = qstate::target_cluster();
    let stabs = enumerate_stabilizers(&t, DEFAULT_STABILIZER_TOL).unwrap();
    assert_eq!(stabs.len(), 15);
    check_group(&stabs, 4);
    for (p, s) in [("XYYX", 1), ("XYXY", 1), ("IZXX", 1), ("IZYY", -1)] {
        assert!(stabs.iter().any(|x| x.pauli == ps(p) && x.sign == s), "{p}");
    }
}

#[test]
fn hadamard_maps_primed_stabilizers_to_target_ones() {
    let primed =
        enumerate_stabilizers(&qstate::linear_cluster(4).unwrap(), DEFAULT_STABILIZER_TOL).unwrap();
    let target = enumerate_stabilizers(&qstate::target_cluster(), DEFAULT_STABILIZER_TOL).unwrap();
    for s in &primed {
        let conj = s.pauli.conjugate_by_hadamard(&[0, 3]).unwrap();
        let sign = s.sign * conj.phase().sign().unwrap();
        let unsigned = conj.with_phase(Phase::PLUS_ONE);
        assert!(
            target.iter().any(|t| t.pauli == unsigned && t.sign == sign),
            "{} → {unsigned}:{sign}",
            s.pauli
        );
    }
}

#[test]
fn stabilizer_counts_for_small_states() {
    let bell = qstate::ghz(2).unwrap();
    assert_eq!(
        enumerate_stabilizers(&bell, DEFAULT_STABILIZER_TOL)
            .unwrap()
            .len(),
        3
    );
    let w = qstate::w3();
    // not a stabilizer state: only the weight-3 Z string has |⟨P⟩| = 1
    let stabs = enumerate_stabilizers(&w, DEFAULT_STABILIZER_TOL).unwrap();
    assert_eq!(stabs.len(), 1);
    assert_eq!(stabs[0].pauli, ps("ZZZ"));
    assert_eq!(stabs[0].sign, -1);
}

proptest! {
    #[test]
    fn product_matches_dense(p in arb_pauli(3), q in arb_pauli(3)) {
        let r = p.multiply(&q).unwrap();
        prop_assert!(max_diff(&dense(&r), &(dense(&p) * dense(&q))) < 1e-15);
    }

    #[test]
    fn multiply_associative(p in arb_pauli(4), q in arb_pauli(4), r in arb_pauli(4)) {
        let left = p.multiply(&q).unwrap().multiply(&r).unwrap();
        let right = p.multiply(&q.multiply(&r).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn hermitian_squares_to_identity(p in arb_pauli(5), neg in any::<bool>()) {
        let p = p.with_phase(if neg { Phase::MINUS_ONE } else { Phase::PLUS_ONE });
        prop_assert_eq!(p.multiply(&p).unwrap(), PauliString::identity(5));
        let m = dense(&p);
        prop_assert!(max_diff(&m, &m.adjoint()) == 0.0);
    }

    #[test]
    fn hadamard_conjugation_matches_dense(p in arb_pauli(4)) {
        let h = common::c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let h1 = nalgebra::DMatrix::from_row_slice(2, 2, &[h, h, h, -h]);
        let id = nalgebra::DMatrix::identity(2, 2);
        let hh = h1.kronecker(&id).kronecker(&id).kronecker(&h1);
        let conj = p.conjugate_by_hadamard(&[0, 3]).unwrap();
        prop_assert!(max_diff(&dense(&conj), &(&hh * dense(&p) * &hh)) < 1e-12);
        prop_assert_eq!(conj.conjugate_by_hadamard(&[0, 3]).unwrap(), p);
    }

    #[test]
    fn text_round_trip(p in arb_pauli(6)) {
        let text = p.to_string();
        prop_assert_eq!(text.parse::<PauliString>().unwrap(), p.clone());
        let json = serde_json::to_string(&p).unwrap();
        prop_assert_eq!(serde_json::from_str::<PauliString>(&json).unwrap(), p);
    }
}
