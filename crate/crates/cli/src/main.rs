use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use cluster_bell::expsim::{self, ExperimentConfig};
use cluster_bell::nonlocality::{self, CorrelationTerm};
use cluster_bell::pauli::{enumerate_stabilizers, DEFAULT_STABILIZER_TOL};
use cluster_bell::photonics::{self, SourceConfig};
use cluster_bell::qstate::{self, QuantumState, StateDump};

mod manifest;
mod states;

use manifest::RunManifest;

/// Exit code for bad input: unknown names, malformed or invalid configs.
const EXIT_VALIDATION: u8 = 2;
/// Exit code for failures while running a valid request.
const EXIT_RUNTIME: u8 = 1;

#[derive(Parser, Debug)]
#[command(
    name = "cluster-bell",
    version,
    about = "Cluster-state Bell inequality simulator"
)]
struct Cli {
    /// Output format for reports on stdout.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print a named state and optionally dump it as JSON.
    State {
        /// target | cluster4 | cluster-linear-N | ghz-N | w3 | plus-N
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List every Pauli string with a ±1 eigenvalue on a named state.
    Stabilizers {
        name: String,
        #[arg(long, default_value_t = DEFAULT_STABILIZER_TOL)]
        tol: f64,
    },
    /// Evaluate S_C on a named or dumped state, optionally with white noise.
    Bell {
        #[arg(default_value = "target")]
        name: String,
        #[arg(long)]
        visibility: Option<f64>,
        /// Read the state from a JSON dump instead of by name.
        #[arg(long, conflicts_with = "name")]
        state_file: Option<PathBuf>,
    },
    /// Local-hidden-variable maximum of an inequality file.
    Lhv {
        /// JSON list of {"pauli", "block", "sign"} terms.
        file: PathBuf,
    },
    /// Check the two four-stabilizer GHZ arguments against local realism.
    GhzArgument,
    /// Simulate the photon source and four-fold post-selection.
    Source {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Start from the amplitude-balanced configuration.
        #[arg(long)]
        balanced: bool,
        /// Mode-a polarization rotation in degrees.
        #[arg(long)]
        hwp_angle: Option<f64>,
        #[arg(long)]
        indistinguishability: Option<f64>,
    },
    /// Monte Carlo reproduction of the correlation measurements.
    Experiment {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        visibility: Option<f64>,
        #[arg(long)]
        mean_counts: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1)]
        runs: u64,
        #[arg(long)]
        duration: Option<f64>,
        /// Use the simulated source output instead of the ideal state.
        #[arg(long)]
        source_config: Option<PathBuf>,
        /// Directory for the summary JSON and per-setting CSV tables.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Find the mean counts per setting giving a target correlation stderr.
    CalibrateCounts {
        #[arg(long, default_value_t = expsim::PAPER_VISIBILITY)]
        visibility: f64,
        #[arg(long, default_value_t = 0.045)]
        target_stderr: f64,
        /// Monte Carlo runs used to check the calibrated value (0 to skip).
        #[arg(long, default_value_t = 200)]
        runs: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Errors split by exit code.
enum CliError {
    Validation(anyhow::Error),
    Runtime(anyhow::Error),
}

trait Validation<T> {
    fn invalid(self) -> Result<T, CliError>;
}

impl<T, E: Into<anyhow::Error>> Validation<T> for Result<T, E> {
    fn invalid(self) -> Result<T, CliError> {
        self.map_err(|e| CliError::Validation(e.into()))
    }
}

impl<E: Into<anyhow::Error>> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError::Runtime(e.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Validation(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(CliError::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}

fn emit(format: Format, report: &Value, text: impl FnOnce() -> String) {
    use std::io::Write;
    let out = match format {
        Format::Json => serde_json::to_string_pretty(report).expect("serializable") + "\n",
        Format::Text => text(),
    };
    // a closed pipe (e.g. `| head`) is not an error
    let _ = std::io::stdout().lock().write_all(out.as_bytes());
}

/// Parses a JSON file, keeping serde's line/column diagnostics.
fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .invalid()?;
    serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", path.display()))
        .invalid()
}

fn write_json(path: &Path, value: &impl Serialize) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::State { name, out } => cmd_state(cli.format, name, out.as_deref()),
        Command::Stabilizers { name, tol } => cmd_stabilizers(cli.format, name, *tol),
        Command::Bell {
            name,
            visibility,
            state_file,
        } => cmd_bell(cli.format, name, *visibility, state_file.as_deref()),
        Command::Lhv { file } => cmd_lhv(cli.format, file),
        Command::GhzArgument => cmd_ghz_argument(cli.format),
        Command::Source {
            config,
            balanced,
            hwp_angle,
            indistinguishability,
        } => {
            let mut cfg = match config {
                Some(p) => read_json(p)?,
                None if *balanced => SourceConfig::balanced(),
                None => SourceConfig::default(),
            };
            if let Some(a) = hwp_angle {
                cfg.hwp_a_angle = *a;
            }
            if let Some(d) = indistinguishability {
                cfg.indistinguishability = *d;
            }
            cmd_source(cli.format, &cfg)
        }
        Command::Experiment {
            config,
            visibility,
            mean_counts,
            seed,
            runs,
            duration,
            source_config,
            out_dir,
        } => {
            let mut cfg: ExperimentConfig = match config {
                Some(p) => read_json(p)?,
                None => ExperimentConfig::default(),
            };
            if let Some(v) = visibility {
                cfg.visibility = *v;
            }
            if let Some(m) = mean_counts {
                cfg.mean_counts = *m;
            }
            if let Some(s) = seed {
                cfg.seed = *s;
            }
            if let Some(d) = duration {
                cfg.duration = *d;
            }
            let source = match source_config {
                Some(p) => Some(read_json::<SourceConfig>(p)?),
                None => None,
            };
            cmd_experiment(cli.format, &cfg, *runs, source.as_ref(), out_dir.as_deref())
        }
        Command::CalibrateCounts {
            visibility,
            target_stderr,
            runs,
            seed,
        } => cmd_calibrate(cli.format, *visibility, *target_stderr, *runs, *seed),
    }
}

fn amplitude_table(s: &QuantumState) -> String {
    let n = s.n_qubits();
    let mut out = String::new();
    match s.amplitudes() {
        Some(a) => {
            for (i, z) in a.iter().enumerate() {
                out += &format!("|{:0n$b}>  {:+.6} {:+.6}i\n", i, z.re, z.im);
            }
        }
        None => {
            let rho = s.density_matrix();
            for i in 0..s.dim() {
                out += &format!("rho[{:0n$b}] = {:.6}\n", i, rho[(i, i)].re);
            }
        }
    }
    out
}

fn cmd_state(format: Format, name: &str, out: Option<&Path>) -> Result<(), CliError> {
    let state = states::by_name(name).invalid()?;
    let dump = StateDump::from(&state);
    let manifest = RunManifest::new("state", json!({ "name": name }), None);
    if let Some(path) = out {
        write_json(path, &json!({ "manifest": manifest, "state": dump }))?;
    }
    let report = json!({ "name": name, "state": dump });
    emit(format, &report, || {
        format!(
            "{name} ({} qubits)\n{}",
            state.n_qubits(),
            amplitude_table(&state)
        )
    });
    Ok(())
}

fn cmd_stabilizers(format: Format, name: &str, tol: f64) -> Result<(), CliError> {
    let state = states::by_name(name).invalid()?;
    let stabs = enumerate_stabilizers(&state, tol).invalid()?;
    let quads: Vec<(&str, Vec<_>)> = vec![
        (
            "linear-cluster GHZ argument",
            nonlocality::linear_cluster_quadruple(),
        ),
        (
            "target-cluster GHZ argument",
            nonlocality::target_cluster_quadruple(),
        ),
    ];
    let flag = |s: &cluster_bell::Stabilizer| -> Option<&str> {
        quads
            .iter()
            .find(|(_, q)| q.iter().any(|(p, sign)| *p == s.pauli && *sign == s.sign))
            .map(|(label, _)| *label)
    };
    let rows: Vec<Value> = stabs
        .iter()
        .map(|s| json!({ "pauli": s.pauli, "sign": s.sign, "flag": flag(s) }))
        .collect();
    let report = json!({ "name": name, "count": stabs.len(), "stabilizers": rows });
    emit(format, &report, || {
        let mut t = format!("{} nontrivial stabilizers of {name}\n", stabs.len());
        for s in &stabs {
            t += &format!("{:>8} {:+}", s.pauli.to_string(), s.sign);
            if let Some(f) = flag(s) {
                t += &format!("   [{f}]");
            }
            t += "\n";
        }
        t
    });
    Ok(())
}

fn cmd_bell(
    format: Format,
    name: &str,
    visibility: Option<f64>,
    state_file: Option<&Path>,
) -> Result<(), CliError> {
    let mut state = match state_file {
        Some(p) => {
            let v: Value = read_json(p)?;
            // accept a bare dump or the `state` field of a `state --out` file
            let dump = v.get("state").cloned().unwrap_or(v);
            let dump: StateDump = serde_json::from_value(dump)
                .with_context(|| format!("parsing state dump {}", p.display()))
                .invalid()?;
            QuantumState::try_from(dump).invalid()?
        }
        None => states::by_name(name).invalid()?,
    };
    if let Some(v) = visibility {
        state = qstate::apply_white_noise(&state, v).invalid()?;
    }
    let e = nonlocality::cluster_correlations(&state).invalid()?;
    let s_c = nonlocality::bell_parameter(e[0], e[1], e[2], e[3])?;
    let labels = ["XYYX", "XYXY", "IZXX", "IZYY"];
    let report = json!({
        "state": state_file.map(|p| p.display().to_string()).unwrap_or_else(|| name.to_string()),
        "visibility": visibility,
        "correlations": labels.iter().zip(e).map(|(l, v)| json!({ "pauli": l, "value": v })).collect::<Vec<_>>(),
        "s_c": s_c,
        "lhv_bound": nonlocality::LHV_BOUND,
        "violates": s_c > nonlocality::LHV_BOUND,
    });
    emit(format, &report, || {
        let mut t = String::new();
        for (l, v) in labels.iter().zip(e) {
            t += &format!("<{l}> = {v:+.6}\n");
        }
        t + &format!("S_C = {s_c:.6}\n")
    });
    Ok(())
}

fn cmd_lhv(format: Format, file: &Path) -> Result<(), CliError> {
    let terms: Vec<CorrelationTerm> = read_json(file)?;
    let (max, witness) = nonlocality::lhv_maximum(&terms).invalid()?;
    let strategies = 1u64 << witness.assignment.len();
    let report = json!({
        "file": file.display().to_string(),
        "terms": terms,
        "strategies": strategies,
        "lhv_maximum": max,
        "witness": witness,
    });
    emit(format, &report, || {
        let mut t = format!("LHV maximum over {strategies} deterministic strategies: {max}\nwitness (strategy {}):\n", witness.index);
        for a in &witness.assignment {
            t += &format!("  party {} {} = {:+}\n", a.party + 1, a.axis, a.value);
        }
        t
    });
    Ok(())
}

fn cmd_ghz_argument(format: Format) -> Result<(), CliError> {
    let cases = [
        ("linear cluster", nonlocality::linear_cluster_quadruple()),
        ("target cluster", nonlocality::target_cluster_quadruple()),
    ];
    let mut rows = Vec::new();
    let mut text = String::new();
    for (label, quad) in &cases {
        let r = nonlocality::ghz_argument_check(quad)?;
        let constraints: Vec<String> = quad.iter().map(|(p, s)| format!("{p}:{s:+}")).collect();
        text += &format!(
            "{label}: {} -> {} (best strategy meets {}/{} of {} strategies)\n",
            constraints.join(" "),
            if r.satisfiable {
                "satisfiable"
            } else {
                "inconsistent with local realism"
            },
            r.best_agreement,
            quad.len(),
            r.strategies,
        );
        rows.push(json!({ "label": label, "constraints": constraints, "report": r }));
    }
    emit(format, &json!({ "arguments": rows }), || text);
    Ok(())
}

fn cmd_source(format: Format, cfg: &SourceConfig) -> Result<(), CliError> {
    cfg.validate().invalid()?;
    let out = photonics::simulate_source(cfg)?;
    let target = qstate::target_cluster();
    let fidelity = out.state.fidelity_with_pure(&target)?;
    let overlap = out.state.overlap(&target).ok().map(|z| z.norm());
    let report = json!({
        "config": cfg,
        "state": StateDump::from(&out.state),
        "overlap_with_target": overlap,
        "fidelity_with_target": fidelity,
        "postselection_probability": out.probability,
    });
    emit(format, &report, || {
        format!(
            "post-selected state:\n{}fidelity with target cluster = {fidelity:.12}\npost-selection probability = {:.6}\n",
            amplitude_table(&out.state),
            out.probability
        )
    });
    Ok(())
}

fn outcome_header(setting: &expsim::MeasurementSetting) -> Vec<String> {
    (0..setting.n_cells())
        .map(|k| {
            setting
                .cell_outcomes(k)
                .iter()
                .map(|&o| if o > 0 { '+' } else { '-' })
                .collect()
        })
        .collect()
}

fn write_tables(
    dir: &Path,
    runs: &[expsim::ExperimentRun],
    manifest: &RunManifest,
) -> anyhow::Result<()> {
    let Some(first) = runs.first() else {
        return Ok(());
    };
    for (j, table) in first.tables.iter().enumerate() {
        let path = dir.join(format!("counts_{}.csv", table.setting.label));
        let mut text = format!("# manifest: {}\n", serde_json::to_string(manifest)?);
        text += &format!(
            "# setting {}: modes measured {:?}, duration {} s\n",
            table.setting.label,
            table
                .setting
                .measured_modes()
                .iter()
                .map(|m| m + 1)
                .collect::<Vec<_>>(),
            table.duration
        );
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["run".to_string()];
        header.extend(outcome_header(&table.setting));
        w.write_record(&header)?;
        for r in runs {
            let mut row = vec![r.run_index.to_string()];
            row.extend(r.tables[j].counts.iter().map(u64::to_string));
            w.write_record(&row)?;
        }
        text += &String::from_utf8(w.into_inner()?)?;
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn cmd_experiment(
    format: Format,
    cfg: &ExperimentConfig,
    runs: u64,
    source: Option<&SourceConfig>,
    out_dir: Option<&Path>,
) -> Result<(), CliError> {
    cfg.validate().invalid()?;
    if runs == 0 {
        return Err(CliError::Validation(anyhow!("--runs must be at least 1")));
    }
    let base = match source {
        Some(sc) => {
            sc.validate().invalid()?;
            photonics::simulate_source(sc)?.state
        }
        None => qstate::target_cluster(),
    };
    let state = qstate::apply_white_noise(&base, cfg.visibility)?;
    let results = expsim::run_many(&state, cfg, runs)?;
    let summary = expsim::summarize(&results);
    let manifest = RunManifest::new(
        "experiment",
        json!({ "config": cfg, "runs": runs, "source": source }),
        Some(cfg.seed),
    );
    let warnings: Vec<&String> = results.iter().flat_map(|r| &r.warnings).collect();
    let labels: Vec<&str> = results[0]
        .tables
        .iter()
        .map(|t| t.setting.label.as_str())
        .collect();
    let (correlations, stderr, s_c, s_c_err, sigma) = if runs == 1 {
        let r = &results[0];
        (
            r.correlations.iter().map(|c| c.value).collect(),
            r.correlations.iter().map(|c| c.stderr).collect(),
            r.s_c,
            r.s_c_err,
            r.sigma_violation,
        )
    } else {
        (
            summary.mean_correlations.clone(),
            summary.mean_stderr.clone(),
            summary.mean_s_c,
            summary.mean_s_c_err,
            summary.mean_sigma_violation,
        )
    };
    let report = json!({
        "manifest": manifest,
        "settings": labels,
        "correlations": correlations,
        "stderr": stderr,
        "s_c": s_c,
        "s_c_err": s_c_err,
        "sigma_violation": sigma,
        "runs": runs,
        "s_c_spread": summary.spread_s_c,
        "correlation_spread": summary.spread,
        "violation_fraction": summary.violation_fraction,
        "warnings": warnings.len(),
    });
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        write_json(&dir.join("summary.json"), &report)?;
        write_tables(dir, &results, &manifest)?;
    }
    if !warnings.is_empty() {
        eprintln!(
            "warning: {} ({} runs affected)",
            warnings[0],
            warnings.len()
        );
    }
    emit(format, &report, || {
        let mut t = String::new();
        for ((l, e), s) in labels.iter().zip(&correlations).zip(&stderr) {
            t += &format!("<{l}> = {e:+.4} ± {s:.4}\n");
        }
        t += &format!("S_C = {s_c:.4} ± {s_c_err:.4}  ({sigma:.2} sigma above 2)\n");
        if runs > 1 {
            t += &format!(
                "over {runs} runs: spread of S_C {:.4}, violation in {:.1}% of runs\n",
                summary.spread_s_c,
                100.0 * summary.violation_fraction
            );
        }
        t
    });
    Ok(())
}

fn cmd_calibrate(
    format: Format,
    visibility: f64,
    target: f64,
    runs: u64,
    seed: u64,
) -> Result<(), CliError> {
    let cfg = ExperimentConfig {
        visibility,
        seed,
        ..ExperimentConfig::default()
    };
    cfg.validate().invalid()?;
    let state = expsim::noisy_target(&cfg)?;
    let (mean, sweep) = match expsim::calibrate_mean_counts(&state, target) {
        Ok(x) => x,
        Err(e) => return Err(CliError::Validation(e.into())),
    };
    let mut check = Value::Null;
    if runs > 0 {
        let cfg = ExperimentConfig {
            mean_counts: mean,
            ..cfg
        };
        let sum = expsim::summarize(&expsim::run_many(&state, &cfg, runs)?);
        check = json!({
            "runs": runs,
            "mean_stderr": sum.mean_stderr,
            "empirical_spread": sum.spread,
            "mean_s_c": sum.mean_s_c,
            "mean_s_c_err": sum.mean_s_c_err,
        });
    }
    let grid: Vec<(f64, f64)> = [50.0, 100.0, 200.0, 300.0, 500.0, 1000.0]
        .into_iter()
        .map(|m| expsim::predicted_stderr(&state, m).map(|s| (m, s)))
        .collect::<Result<_, _>>()?;
    let report = json!({
        "visibility": visibility,
        "target_stderr": target,
        "mean_counts": mean,
        "sweep": sweep,
        "monte_carlo_check": check,
    });
    emit(format, &report, || {
        let mut t = String::from("mean counts   predicted stderr\n");
        for (m, s) in &grid {
            t += &format!("{m:>11.1}   {s:.5}\n");
        }
        t += &format!("calibrated mean counts per setting: {mean:.1}\n");
        if let Some(ms) = check.get("mean_stderr").and_then(Value::as_array) {
            t += &format!(
                "Monte Carlo mean stderr over {runs} runs: {:?}\n",
                ms.iter()
                    .filter_map(Value::as_f64)
                    .map(|x| (x * 1e4).round() / 1e4)
                    .collect::<Vec<_>>()
            );
        }
        t
    });
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn read_json_reports_location() {
        let dir = std::env::temp_dir().join(format!("cluster-bell-cli-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let p = dir.join("bad.json");
        fs::write(&p, "{\n  \"visibility\": 0.5,\n  \"mean_count\": 3\n}").unwrap();
        let Err(CliError::Validation(e)) = read_json::<ExperimentConfig>(&p) else {
            panic!("expected validation error");
        };
        let msg = format!("{e:#}");
        assert!(
            msg.contains("mean_count") && msg.contains("line 3"),
            "{msg}"
        );
        let _ = fs::remove_dir_all(&dir);
    }

    #[test]
    fn unknown_state_is_validation_error() {
        assert!(states::by_name("ghz-9").is_err());
    }
}
