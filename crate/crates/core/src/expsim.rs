//! Monte Carlo reconstruction of the four-photon correlation measurements.
//!
//! Each Pauli setting is realized as a quarter-wave plate plus linear
//! polarizer per output mode (or no polarizer for σ₀). Outcome probabilities
//! are computed by propagating the analyzer through the Jones matrices, not
//! from Pauli algebra, so the parity sums here are an independent route to
//! the correlators in [`crate::nonlocality`].
//!
//! Cell order: measured modes in ascending order, first mode most
//! significant, outcome +1 before −1. A four-detector table therefore lists
//! `(+,+,+,+), (+,+,+,−), …, (−,−,−,−)`.
//!
//! Correlation estimate from a table with total count N:
//!
//! ```text
//! E  = Σₖ sₖ nₖ / N
//! σ² = Σₖ (sₖ − E)² nₖ / N²  = (1 − E²) / N
//! ```
//!
//! which is first-order propagation of independent Poisson variances
//! Var(nₖ) ≈ nₖ through the ratio.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::nonlocality::{self, NonlocalityError, LHV_BOUND};
use crate::pauli::PauliAxis;
use crate::photonics::{qwp_jones, Jones};
use crate::qstate::QuantumState;

/// Measurement time per setting used in the original campaign, seconds.
pub const DEFAULT_DURATION: f64 = 600.0;

/// Mean four-fold counts per setting giving correlation uncertainties of
/// 0.04–0.05 at the measured visibility (see [`calibrate_mean_counts`]).
pub const DEFAULT_MEAN_COUNTS: f64 = 300.0;

/// Visibility for which 4V equals the reported Bell value of 2.59.
pub const PAPER_VISIBILITY: f64 = 0.6475;

/// A block whose |sum| is below this many stderrs makes the linearized
/// uncertainty of |·| unreliable.
pub const NEAR_ZERO_BLOCK_SIGMAS: f64 = 2.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExpSimError {
    #[error("identity allowed only on mode 1 (found on mode {0})")]
    IdentityPosition(usize),
    #[error("expected a 4-qubit state, got {0} qubits")]
    QubitCount(usize),
    #[error("table has zero total counts")]
    NoCounts,
    #[error("invalid experiment config: {0}")]
    Config(String),
    #[error("inconsistent table: {0}")]
    Table(&'static str),
    #[error(transparent)]
    Nonlocality(#[from] NonlocalityError),
}

/// Analyzer in one output mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModeSetting {
    /// QWP fast axis and polarizer transmission axis for outcome +1, degrees.
    /// Outcome −1 uses the polarizer turned by 90°.
    Analyzer { qwp_deg: f64, polarizer_deg: f64 },
    /// Polarizer removed; the photon is detected regardless of polarization.
    Removed,
}

impl ModeSetting {
    pub fn for_axis(axis: PauliAxis) -> Self {
        match axis {
            PauliAxis::Z => ModeSetting::Analyzer {
                qwp_deg: 0.0,
                polarizer_deg: 0.0,
            },
            PauliAxis::X => ModeSetting::Analyzer {
                qwp_deg: 45.0,
                polarizer_deg: 45.0,
            },
            PauliAxis::Y => ModeSetting::Analyzer {
                qwp_deg: 45.0,
                polarizer_deg: 0.0,
            },
            PauliAxis::I => ModeSetting::Removed,
        }
    }

    pub fn is_measured(&self) -> bool {
        matches!(self, ModeSetting::Analyzer { .. })
    }

    /// Bra ⟨a| such that the detection amplitude is ⟨a|ψ⟩ for the given outcome.
    fn analyzer_bra(&self, outcome: i8) -> Option<[Complex64; 2]> {
        let ModeSetting::Analyzer {
            qwp_deg,
            polarizer_deg,
        } = *self
        else {
            return None;
        };
        let pol = if outcome > 0 {
            polarizer_deg
        } else {
            polarizer_deg + 90.0
        };
        let (s, c) = pol.to_radians().sin_cos();
        let q: Jones = qwp_jones(qwp_deg);
        // ⟨pol| Q
        Some([q[0][0] * c + q[1][0] * s, q[0][1] * c + q[1][1] * s])
    }
}

/// Analyzer configuration for all four output modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementSetting {
    pub label: String,
    pub modes: [ModeSetting; 4],
}

impl MeasurementSetting {
    pub fn measured_modes(&self) -> Vec<usize> {
        (0..4).filter(|&m| self.modes[m].is_measured()).collect()
    }

    pub fn n_cells(&self) -> usize {
        1 << self.measured_modes().len()
    }

    /// ±1 outcomes of each measured mode for a cell index.
    pub fn cell_outcomes(&self, cell: usize) -> Vec<i8> {
        let k = self.measured_modes().len();
        (0..k)
            .map(|j| if cell >> (k - 1 - j) & 1 == 1 { -1 } else { 1 })
            .collect()
    }

    pub fn cell_parity(&self, cell: usize) -> i8 {
        if cell.count_ones() % 2 == 1 {
            -1
        } else {
            1
        }
    }
}

/// Setting measuring the product observable `axes`. Identity is only
/// permitted on mode 1, where the polarizer is removed.
pub fn setting_for(axes: [PauliAxis; 4]) -> Result<MeasurementSetting, ExpSimError> {
    if let Some(pos) = axes.iter().skip(1).position(|&a| a == PauliAxis::I) {
        return Err(ExpSimError::IdentityPosition(pos + 2));
    }
    Ok(MeasurementSetting {
        label: axes.iter().map(|a| a.letter()).collect(),
        modes: axes.map(ModeSetting::for_axis),
    })
}

/// The four settings entering S_C, ordered XYYX, XYXY, IZXX, IZYY.
pub fn cluster_settings() -> Vec<MeasurementSetting> {
    nonlocality::cluster_inequality()
        .iter()
        .map(|t| {
            let a = t.pauli.axes();
            setting_for([a[0], a[1], a[2], a[3]]).expect("S_C settings are valid")
        })
        .collect()
}

/// Born-rule outcome probabilities for one setting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityTable {
    pub setting: MeasurementSetting,
    pub probabilities: Vec<f64>,
}

impl ProbabilityTable {
    /// Σ parity × probability.
    pub fn parity_sum(&self) -> f64 {
        self.probabilities
            .iter()
            .enumerate()
            .map(|(k, p)| f64::from(self.setting.cell_parity(k)) * p)
            .sum()
    }
}

fn analyzer_vector(
    setting: &MeasurementSetting,
    outcomes: &[i8],
    removed_outcome: i8,
) -> Vec<Complex64> {
    // product bra over all four modes; removed modes are summed over H/V by
    // the caller through `removed_outcome`
    let mut it = outcomes.iter();
    let bras: Vec<[Complex64; 2]> = setting
        .modes
        .iter()
        .map(|m| match m.analyzer_bra(0) {
            None => {
                if removed_outcome > 0 {
                    [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]
                } else {
                    [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]
                }
            }
            Some(_) => m
                .analyzer_bra(*it.next().expect("outcome per measured mode"))
                .unwrap(),
        })
        .collect();
    (0..16)
        .map(|b| {
            (0..4)
                .map(|q| bras[q][(b >> (3 - q)) & 1])
                .product::<Complex64>()
        })
        .collect()
}

pub fn outcome_probabilities(
    s: &QuantumState,
    setting: &MeasurementSetting,
) -> Result<ProbabilityTable, ExpSimError> {
    if s.n_qubits() != 4 {
        return Err(ExpSimError::QubitCount(s.n_qubits()));
    }
    let removed: Vec<i8> = if setting.modes.iter().any(|m| !m.is_measured()) {
        vec![1, -1]
    } else {
        vec![1]
    };
    let rho: Option<DMatrix<Complex64>> = if s.is_pure() {
        None
    } else {
        Some(s.density_matrix())
    };
    let probabilities = (0..setting.n_cells())
        .map(|cell| {
            let outcomes = setting.cell_outcomes(cell);
            removed
                .iter()
                .map(|&r| {
                    let a = analyzer_vector(setting, &outcomes, r);
                    match (&rho, s.amplitudes()) {
                        (_, Some(psi)) => a
                            .iter()
                            .zip(psi)
                            .map(|(x, y)| x * y)
                            .sum::<Complex64>()
                            .norm_sqr(),
                        (Some(rho), None) => {
                            let mut acc = Complex64::new(0.0, 0.0);
                            for r in 0..16 {
                                for c in 0..16 {
                                    acc += a[r] * rho[(r, c)] * a[c].conj();
                                }
                            }
                            acc.re
                        }
                        (None, None) => unreachable!(),
                    }
                })
                .sum::<f64>()
        })
        .collect();
    Ok(ProbabilityTable {
        setting: setting.clone(),
        probabilities,
    })
}

/// Monte Carlo parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// White-noise visibility applied to the ideal state.
    pub visibility: f64,
    /// Expected four-fold counts per setting in a run of [`DEFAULT_DURATION`].
    pub mean_counts: f64,
    /// Detection efficiency of output modes 1–4.
    pub efficiencies: [f64; 4],
    pub seed: u64,
    /// Run length per setting, seconds; cell means scale linearly with it.
    pub duration: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            visibility: PAPER_VISIBILITY,
            mean_counts: DEFAULT_MEAN_COUNTS,
            efficiencies: [1.0; 4],
            seed: 0,
            duration: DEFAULT_DURATION,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ExpSimError> {
        let bad = |m: String| Err(ExpSimError::Config(m));
        if !(0.0..=1.0).contains(&self.visibility) {
            return bad(format!("visibility {} outside [0, 1]", self.visibility));
        }
        if !(self.mean_counts > 0.0 && self.mean_counts.is_finite()) {
            return bad(format!("mean_counts {} must be positive", self.mean_counts));
        }
        if let Some(e) = self.efficiencies.iter().find(|&&e| !(e > 0.0 && e <= 1.0)) {
            return bad(format!("efficiency {e} outside (0, 1]"));
        }
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return bad(format!("duration {} must be positive", self.duration));
        }
        Ok(())
    }

    fn scale(&self) -> f64 {
        self.mean_counts * self.duration / DEFAULT_DURATION
            * self.efficiencies.iter().product::<f64>()
    }
}

/// Sampled counts for one setting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoincidenceTable {
    pub setting: MeasurementSetting,
    pub counts: Vec<u64>,
    pub duration: f64,
}

impl CoincidenceTable {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Independent Poisson draw per cell with mean
/// `mean_counts × probability × Π efficiencies` (scaled by duration).
pub fn sample_counts<R: Rng + ?Sized>(
    probs: &ProbabilityTable,
    config: &ExperimentConfig,
    rng: &mut R,
) -> CoincidenceTable {
    let scale = config.scale();
    let counts = probs
        .probabilities
        .iter()
        .map(|&p| {
            let lambda = scale * p.max(0.0);
            if lambda <= 0.0 {
                0
            } else {
                Poisson::new(lambda)
                    .expect("positive finite mean")
                    .sample(rng) as u64
            }
        })
        .collect();
    CoincidenceTable {
        setting: probs.setting.clone(),
        counts,
        duration: config.duration,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationEstimate {
    pub value: f64,
    pub stderr: f64,
    pub total: u64,
}

pub fn estimate_correlation(table: &CoincidenceTable) -> Result<CorrelationEstimate, ExpSimError> {
    if table.counts.len() != table.setting.n_cells() {
        return Err(ExpSimError::Table("cell count does not match setting"));
    }
    let total = table.total();
    if total == 0 {
        return Err(ExpSimError::NoCounts);
    }
    let n = total as f64;
    let value = table
        .counts
        .iter()
        .enumerate()
        .map(|(k, &c)| f64::from(table.setting.cell_parity(k)) * c as f64)
        .sum::<f64>()
        / n;
    let var = table
        .counts
        .iter()
        .enumerate()
        .map(|(k, &c)| (f64::from(table.setting.cell_parity(k)) - value).powi(2) * c as f64)
        .sum::<f64>()
        / (n * n);
    Ok(CorrelationEstimate {
        value,
        stderr: var.sqrt(),
        total,
    })
}

/// One simulated measurement campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRun {
    pub run_index: u64,
    pub tables: Vec<CoincidenceTable>,
    /// XYYX, XYXY, IZXX, IZYY.
    pub correlations: Vec<CorrelationEstimate>,
    pub s_c: f64,
    pub s_c_err: f64,
    /// (S_C − 2) / s_c_err.
    pub sigma_violation: f64,
    pub warnings: Vec<String>,
}

/// Assembles S_C and its uncertainty from the four estimates.
///
/// The uncertainty is the quadrature sum of the four stderrs, which is exact
/// to first order whenever neither block sum is near zero.
pub fn combine(
    run_index: u64,
    tables: Vec<CoincidenceTable>,
    correlations: Vec<CorrelationEstimate>,
) -> Result<ExperimentRun, ExpSimError> {
    let e: Vec<f64> = correlations.iter().map(|c| c.value).collect();
    let s_c = nonlocality::bell_parameter(e[0], e[1], e[2], e[3])?;
    let s_c_err = correlations
        .iter()
        .map(|c| c.stderr.powi(2))
        .sum::<f64>()
        .sqrt();
    let mut warnings = Vec::new();
    let blocks = [
        (
            e[0] + e[1],
            correlations[0].stderr.hypot(correlations[1].stderr),
        ),
        (
            e[2] - e[3],
            correlations[2].stderr.hypot(correlations[3].stderr),
        ),
    ];
    for (i, (sum, err)) in blocks.iter().enumerate() {
        if sum.abs() < NEAR_ZERO_BLOCK_SIGMAS * err {
            warnings.push(format!(
                "block {} sum {:.4} within {NEAR_ZERO_BLOCK_SIGMAS} stderr of zero; uncertainty propagation unreliable",
                i + 1,
                sum
            ));
        }
    }
    let sigma_violation = if s_c_err > 0.0 {
        (s_c - LHV_BOUND) / s_c_err
    } else if s_c > LHV_BOUND {
        f64::INFINITY
    } else {
        f64::NEG_INFINITY
    };
    Ok(ExperimentRun {
        run_index,
        tables,
        correlations,
        s_c,
        s_c_err,
        sigma_violation,
        warnings,
    })
}

/// Probability tables of the four S_C settings for `state`.
pub fn cluster_probabilities(state: &QuantumState) -> Result<Vec<ProbabilityTable>, ExpSimError> {
    cluster_settings()
        .iter()
        .map(|s| outcome_probabilities(state, s))
        .collect()
}

/// RNG for run `index`: one ChaCha stream per run, keyed by the seed.
pub fn run_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Samples the four S_C settings from precomputed probabilities.
pub fn run_from_probabilities(
    probs: &[ProbabilityTable],
    config: &ExperimentConfig,
    run_index: u64,
) -> Result<ExperimentRun, ExpSimError> {
    let mut rng = run_rng(config.seed, run_index);
    let tables: Vec<_> = probs
        .iter()
        .map(|p| sample_counts(p, config, &mut rng))
        .collect();
    let correlations = tables
        .iter()
        .map(estimate_correlation)
        .collect::<Result<Vec<_>, _>>()?;
    combine(run_index, tables, correlations)
}

/// One campaign on `state` (the visibility in `config` is not applied here;
/// see [`noisy_target`]).
pub fn run_experiment(
    state: &QuantumState,
    config: &ExperimentConfig,
    run_index: u64,
) -> Result<ExperimentRun, ExpSimError> {
    config.validate()?;
    let probs = cluster_probabilities(state)?;
    run_from_probabilities(&probs, config, run_index)
}

/// The ideal cluster state mixed with white noise at the configured visibility.
pub fn noisy_target(config: &ExperimentConfig) -> Result<QuantumState, ExpSimError> {
    config.validate()?;
    Ok(
        crate::qstate::apply_white_noise(&crate::qstate::target_cluster(), config.visibility)
            .expect("visibility validated"),
    )
}

/// `runs` independent campaigns in parallel, returned in run-index order.
pub fn run_many(
    state: &QuantumState,
    config: &ExperimentConfig,
    runs: u64,
) -> Result<Vec<ExperimentRun>, ExpSimError> {
    config.validate()?;
    let probs = cluster_probabilities(state)?;
    (0..runs)
        .into_par_iter()
        .map(|i| run_from_probabilities(&probs, config, i))
        .collect()
}

/// Summary statistics over many runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub runs: usize,
    pub mean_correlations: Vec<f64>,
    pub mean_stderr: Vec<f64>,
    /// Standard deviation of each correlation across runs.
    pub spread: Vec<f64>,
    pub mean_s_c: f64,
    pub spread_s_c: f64,
    pub mean_s_c_err: f64,
    pub mean_sigma_violation: f64,
    pub violation_fraction: f64,
}

fn mean_std(xs: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = xs.clone().count() as f64;
    let mean = xs.clone().sum::<f64>() / n;
    let var = if n > 1.0 {
        xs.map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var.sqrt())
}

pub fn summarize(runs: &[ExperimentRun]) -> RunSummary {
    let k = runs.first().map_or(0, |r| r.correlations.len());
    let col = |j: usize| runs.iter().map(move |r| r.correlations[j].value);
    let (mean_correlations, spread) = (0..k).map(|j| mean_std(col(j))).unzip();
    let mean_stderr = (0..k)
        .map(|j| runs.iter().map(|r| r.correlations[j].stderr).sum::<f64>() / runs.len() as f64)
        .collect();
    let (mean_s_c, spread_s_c) = mean_std(runs.iter().map(|r| r.s_c));
    let n = runs.len() as f64;
    RunSummary {
        runs: runs.len(),
        mean_correlations,
        mean_stderr,
        spread,
        mean_s_c,
        spread_s_c,
        mean_s_c_err: runs.iter().map(|r| r.s_c_err).sum::<f64>() / n,
        mean_sigma_violation: runs.iter().map(|r| r.sigma_violation).sum::<f64>() / n,
        violation_fraction: runs.iter().filter(|r| r.s_c > LHV_BOUND).count() as f64 / n,
    }
}

/// Predicted per-correlation stderr √((1 − E²)/N) at mean count `mean`,
/// averaged over the four S_C settings of `state`.
pub fn predicted_stderr(state: &QuantumState, mean: f64) -> Result<f64, ExpSimError> {
    let probs = cluster_probabilities(state)?;
    Ok(probs
        .iter()
        .map(|p| ((1.0 - p.parity_sum().powi(2)).max(0.0) / mean).sqrt())
        .sum::<f64>()
        / probs.len() as f64)
}

/// One point of a calibration sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationPoint {
    pub mean_counts: f64,
    pub predicted_stderr: f64,
}

/// Mean counts per setting at which the predicted stderr equals `target`,
/// by bisection on a log scale, with the sweep points visited.
pub fn calibrate_mean_counts(
    state: &QuantumState,
    target: f64,
) -> Result<(f64, Vec<CalibrationPoint>), ExpSimError> {
    if !(target > 0.0 && target < 1.0) {
        return Err(ExpSimError::Config(format!(
            "target stderr {target} outside (0, 1)"
        )));
    }
    let (mut lo, mut hi) = (1.0f64, 1e9f64);
    let mut sweep = Vec::new();
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        let e = predicted_stderr(state, mid)?;
        sweep.push(CalibrationPoint {
            mean_counts: mid,
            predicted_stderr: e,
        });
        if e > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi / lo < 1.0 + 1e-12 {
            break;
        }
    }
    Ok(((lo * hi).sqrt(), sweep))
}
