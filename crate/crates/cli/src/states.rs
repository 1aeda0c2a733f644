use anyhow::{anyhow, bail, Result};

use cluster_bell::qstate::{self, QuantumState, MAX_QUBITS};

/// Resolves `target`, `cluster4`, `cluster-linear-N`, `ghz-N`, `w3` or `plus-N`.
pub fn by_name(name: &str) -> Result<QuantumState> {
    let sized = |prefix: &str| -> Option<Result<usize>> {
        name.strip_prefix(prefix).map(|n| {
            let n: usize = n
                .parse()
                .map_err(|_| anyhow!("bad qubit count in state name {name:?}"))?;
            if n == 0 || n > MAX_QUBITS {
                bail!("state {name:?}: qubit count must be in 1..={MAX_QUBITS}");
            }
            Ok(n)
        })
    };
    let state = match name {
        "target" => qstate::target_cluster(),
        "cluster4" => qstate::linear_cluster(4)?,
        "w3" => qstate::w3(),
        _ => {
            if let Some(n) = sized("cluster-linear-") {
                qstate::linear_cluster(n?)?
            } else if let Some(n) = sized("ghz-") {
                qstate::ghz(n?)?
            } else if let Some(n) = sized("plus-") {
                qstate::plus_state(n?)?
            } else {
                bail!("unknown state {name:?} (expected target, cluster4, cluster-linear-N, ghz-N, w3 or plus-N)");
            }
        }
    };
    Ok(state)
}
