//! The cluster-state Bell parameter and exhaustive local-hidden-variable checks.
//!
//! An inequality is a list of [`CorrelationTerm`]s grouped into blocks; its
//! value is Σ_blocks |Σ_terms sign·⟨P⟩|. The cluster inequality is
//!
//! ```text
//! S_C = |⟨XYYX⟩ + ⟨XYXY⟩| + |⟨IZXX⟩ − ⟨IZYY⟩|
//! ```
//!
//! Local-realist bounds come from enumerating every deterministic strategy
//! (one ±1 value per party and non-identity observable). Mixed strategies are
//! convex combinations of these and cannot do better, so the maximum over the
//! finite set is the exact bound.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pauli::{PauliAxis, PauliError, PauliString};
use crate::qstate::QuantumState;

/// Local-realist bound of the cluster inequality.
pub const LHV_BOUND: f64 = 2.0;

/// Slack allowed on correlation inputs outside [−1, 1].
pub const CORRELATION_TOL: f64 = 1e-9;

/// At most this many (party, observable) pairs are enumerated (2¹⁶ strategies).
pub const MAX_STRATEGY_BITS: usize = 16;

/// Per-party observable menu size allowed in the oracle.
pub const MAX_MENU: usize = 2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NonlocalityError {
    #[error("correlation {0} outside [-1, 1]")]
    CorrelationRange(f64),
    #[error("expected a 4-qubit state, got {0} qubits")]
    QubitCount(usize),
    #[error("inequality has no terms")]
    Empty,
    #[error("terms have differing lengths")]
    RaggedTerms,
    #[error("party {party} uses {count} observables; at most {MAX_MENU} supported")]
    MenuTooLarge { party: usize, count: usize },
    #[error("{0} (party, observable) pairs exceeds the enumeration limit of {MAX_STRATEGY_BITS}")]
    TooManyStrategies(usize),
    #[error("term sign must be +1 or -1, got {0}")]
    BadSign(i8),
    #[error(transparent)]
    Pauli(#[from] PauliError),
}

/// One signed correlator inside an absolute-value block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrelationTerm {
    pub pauli: PauliString,
    pub block: u8,
    pub sign: i8,
}

impl CorrelationTerm {
    pub fn new(pauli: &str, block: u8, sign: i8) -> Self {
        Self {
            pauli: pauli.parse().expect("valid Pauli literal"),
            block,
            sign,
        }
    }

    /// Term sign folded with the string's own ±1 phase.
    fn effective_sign(&self) -> Result<i8, NonlocalityError> {
        if self.sign != 1 && self.sign != -1 {
            return Err(NonlocalityError::BadSign(self.sign));
        }
        let phase = self
            .pauli
            .phase()
            .sign()
            .ok_or(PauliError::NonHermitian(self.pauli.phase()))?;
        Ok(self.sign * phase)
    }
}

/// The four terms of S_C.
pub fn cluster_inequality() -> Vec<CorrelationTerm> {
    vec![
        CorrelationTerm::new("XYYX", 1, 1),
        CorrelationTerm::new("XYXY", 1, 1),
        CorrelationTerm::new("IZXX", 2, 1),
        CorrelationTerm::new("IZYY", 2, -1),
    ]
}

/// |e_xyyx + e_xyxy| + |e_izxx − e_izyy|.
pub fn bell_parameter(
    e_xyyx: f64,
    e_xyxy: f64,
    e_izxx: f64,
    e_izyy: f64,
) -> Result<f64, NonlocalityError> {
    for e in [e_xyyx, e_xyxy, e_izxx, e_izyy] {
        if e.is_nan() || e.abs() > 1.0 + CORRELATION_TOL {
            return Err(NonlocalityError::CorrelationRange(e));
        }
    }
    Ok((e_xyyx + e_xyxy).abs() + (e_izxx - e_izyy).abs())
}

/// Quantum expectations of the four S_C correlators, in the order
/// XYYX, XYXY, IZXX, IZYY.
pub fn cluster_correlations(s: &QuantumState) -> Result<[f64; 4], NonlocalityError> {
    if s.n_qubits() != 4 {
        return Err(NonlocalityError::QubitCount(s.n_qubits()));
    }
    let mut out = [0.0; 4];
    for (slot, term) in out.iter_mut().zip(cluster_inequality()) {
        *slot = term.pauli.expectation(s)?;
    }
    Ok(out)
}

pub fn bell_parameter_of_state(s: &QuantumState) -> Result<f64, NonlocalityError> {
    let [a, b, c, d] = cluster_correlations(s)?;
    bell_parameter(a, b, c, d)
}

/// Value of an arbitrary block inequality on a quantum state.
pub fn inequality_value(
    terms: &[CorrelationTerm],
    s: &QuantumState,
) -> Result<f64, NonlocalityError> {
    let mut blocks: Vec<(u8, f64)> = Vec::new();
    for t in terms {
        let sign = t.effective_sign()?;
        let e = t
            .pauli
            .clone()
            .with_phase(Default::default())
            .expectation(s)?;
        accumulate(&mut blocks, t.block, f64::from(sign) * e);
    }
    Ok(blocks.iter().map(|(_, v)| v.abs()).sum())
}

fn accumulate<T: std::ops::AddAssign + Copy>(blocks: &mut Vec<(u8, T)>, block: u8, v: T) {
    match blocks.iter_mut().find(|(b, _)| *b == block) {
        Some((_, acc)) => *acc += v,
        None => blocks.push((block, v)),
    }
}

/// Deterministic ±1 outcome for each (party, observable) pair in a menu.
/// The identity observable always yields +1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LhvStrategy {
    /// Strategy number within the enumeration; bit k set means pair k is −1.
    pub index: u32,
    pub assignment: Vec<Assignment>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    /// Zero-based party (qubit) index.
    pub party: usize,
    pub axis: PauliAxis,
    pub value: i8,
}

impl LhvStrategy {
    pub fn value(&self, party: usize, axis: PauliAxis) -> Option<i8> {
        if axis == PauliAxis::I {
            return Some(1);
        }
        self.assignment
            .iter()
            .find(|a| a.party == party && a.axis == axis)
            .map(|a| a.value)
    }

    /// Local-realist prediction for the product observable `p`.
    pub fn predict(&self, p: &PauliString) -> Option<i8> {
        let mut v = p.phase().sign()?;
        for (party, &axis) in p.axes().iter().enumerate() {
            v *= self.value(party, axis)?;
        }
        Some(v)
    }
}

/// (party, axis) pairs appearing in `strings`, in party-major order.
fn observable_menu<'a>(
    strings: impl Iterator<Item = &'a PauliString>,
) -> Result<Vec<(usize, PauliAxis)>, NonlocalityError> {
    let mut n = None;
    let mut pairs = BTreeSet::new();
    for p in strings {
        match n {
            None => n = Some(p.len()),
            Some(k) if k != p.len() => return Err(NonlocalityError::RaggedTerms),
            _ => {}
        }
        for (party, &axis) in p.axes().iter().enumerate() {
            if axis != PauliAxis::I {
                pairs.insert((party, axis));
            }
        }
    }
    if n.is_none() {
        return Err(NonlocalityError::Empty);
    }
    let pairs: Vec<_> = pairs.into_iter().collect();
    for party in 0..n.unwrap_or(0) {
        let count = pairs.iter().filter(|(p, _)| *p == party).count();
        if count > MAX_MENU {
            return Err(NonlocalityError::MenuTooLarge { party, count });
        }
    }
    if pairs.len() > MAX_STRATEGY_BITS {
        return Err(NonlocalityError::TooManyStrategies(pairs.len()));
    }
    Ok(pairs)
}

/// Enumerates strategies in index order.
fn strategies(menu: &[(usize, PauliAxis)]) -> impl Iterator<Item = LhvStrategy> + '_ {
    (0u32..1 << menu.len()).map(move |index| LhvStrategy {
        index,
        assignment: menu
            .iter()
            .enumerate()
            .map(|(k, &(party, axis))| Assignment {
                party,
                axis,
                value: if index >> k & 1 == 1 { -1 } else { 1 },
            })
            .collect(),
    })
}

/// Maximum of the inequality over all deterministic local strategies, with
/// the lowest-index strategy attaining it. Values are exact integers.
pub fn lhv_maximum(terms: &[CorrelationTerm]) -> Result<(i64, LhvStrategy), NonlocalityError> {
    let signs = terms
        .iter()
        .map(CorrelationTerm::effective_sign)
        .collect::<Result<Vec<_>, _>>()?;
    let menu = observable_menu(terms.iter().map(|t| &t.pauli))?;
    let mut best: Option<(i64, LhvStrategy)> = None;
    for strat in strategies(&menu) {
        let mut blocks: Vec<(u8, i64)> = Vec::new();
        for (t, &sign) in terms.iter().zip(&signs) {
            let unsigned = t.pauli.clone().with_phase(Default::default());
            let v = strat.predict(&unsigned).expect("menu covers every term");
            accumulate(&mut blocks, t.block, i64::from(sign * v));
        }
        let value: i64 = blocks.iter().map(|(_, v)| v.abs()).sum();
        if best.as_ref().is_none_or(|(b, _)| value > *b) {
            best = Some((value, strat));
        }
    }
    Ok(best.expect("at least one strategy"))
}

/// Outcome of a GHZ-style consistency check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GhzArgumentReport {
    pub satisfiable: bool,
    /// Every strategy reproducing all required signs.
    pub witnesses: Vec<LhvStrategy>,
    /// Number of strategies examined.
    pub strategies: u32,
    /// Largest number of constraints met by any single strategy.
    pub best_agreement: usize,
}

/// Checks whether any deterministic local strategy reproduces every
/// `(observable, required sign)` pair at once.
pub fn ghz_argument_check(
    constraints: &[(PauliString, i8)],
) -> Result<GhzArgumentReport, NonlocalityError> {
    for &(_, s) in constraints {
        if s != 1 && s != -1 {
            return Err(NonlocalityError::BadSign(s));
        }
    }
    for (p, _) in constraints {
        if !p.is_hermitian() {
            return Err(PauliError::NonHermitian(p.phase()).into());
        }
    }
    let menu = observable_menu(constraints.iter().map(|(p, _)| p))?;
    let mut witnesses = Vec::new();
    let mut best_agreement = 0;
    let mut count = 0;
    for strat in strategies(&menu) {
        count += 1;
        let agree = constraints
            .iter()
            .filter(|(p, s)| strat.predict(p) == Some(*s))
            .count();
        best_agreement = best_agreement.max(agree);
        if agree == constraints.len() {
            witnesses.push(strat);
        }
    }
    Ok(GhzArgumentReport {
        satisfiable: !witnesses.is_empty(),
        witnesses,
        strategies: count,
        best_agreement,
    })
}

/// The primed-frame quadruple for |φ₄′⟩: ZYYZ→+1, ZYXY→−1, IZXZ→+1, IZYY→+1.
pub fn linear_cluster_quadruple() -> Vec<(PauliString, i8)> {
    [("ZYYZ", 1), ("ZYXY", -1), ("IZXZ", 1), ("IZYY", 1)]
        .into_iter()
        .map(|(p, s)| (p.parse().expect("literal"), s))
        .collect()
}

/// The same quadruple after Hadamards on qubits 0 and 3:
/// XYYX→+1, XYXY→+1, IZXX→+1, IZYY→−1.
pub fn target_cluster_quadruple() -> Vec<(PauliString, i8)> {
    [("XYYX", 1), ("XYXY", 1), ("IZXX", 1), ("IZYY", -1)]
        .into_iter()
        .map(|(p, s)| (p.parse().expect("literal"), s))
        .collect()
}

/// Constraints as a single-block signed sum, for comparison with
/// [`lhv_maximum`].
pub fn constraints_as_inequality(constraints: &[(PauliString, i8)]) -> Vec<CorrelationTerm> {
    constraints
        .iter()
        .map(|(p, s)| CorrelationTerm {
            pauli: p.clone(),
            block: 1,
            sign: *s,
        })
        .collect()
}
