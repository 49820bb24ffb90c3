//! Cross-checks of the closed forms against the dense oracle on one small
//! instance. Each check reports its largest deviation and passes when that
//! stays within its tolerance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fragments::{avg_holevo_exact, find_fragment_size, p_all_bad, redundancy_max};
use crate::model::{hypergeometric_terms, Deficit, EnvironmentSpec};
use crate::oracle::{align_to_branch_frames, Oracle, Quantity};
use crate::qcb::{definition_ratio, min_definition_ratio};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationSummary {
    pub passed: bool,
    pub first_failure: Option<String>,
    pub checks: Vec<CheckResult>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ValidationOptions {
    /// Replaces every check tolerance; used to exercise the failure path.
    pub tolerance_override: Option<f64>,
}

struct Suite {
    options: ValidationOptions,
    checks: Vec<CheckResult>,
}

impl Suite {
    fn record(&mut self, name: &str, max_deviation: f64, tolerance: f64) {
        let tolerance = self.options.tolerance_override.unwrap_or(tolerance);
        self.checks.push(CheckResult {
            name: name.to_string(),
            max_deviation,
            tolerance,
            passed: max_deviation <= tolerance,
        });
    }
}

const EXACT_TOL: f64 = 1e-10;

/// Runs every cross-check on `spec`, whose environment must fit the oracle.
pub fn validate_instance(
    spec: &EnvironmentSpec,
    deficit: Deficit,
    oracle: &Oracle,
    options: ValidationOptions,
) -> Result<ValidationSummary> {
    let n = spec.n_total();
    if n as usize > oracle.limits.max_env_qubits {
        return Err(Error::OracleLimit {
            what: "environment size",
            got: n as usize,
            limit: oracle.limits.max_env_qubits,
        });
    }
    let mut suite = Suite {
        options,
        checks: Vec::new(),
    };
    let h_s = spec.pointer_entropy().value();
    let state = oracle.build_from_spec(spec)?;
    // below H(p0) unless the records are complete
    let h_system = oracle.entropy(&state, &[0])?.value();

    let mut pmf_dev: f64 = 0.0;
    for f in 0..=n {
        let total: f64 = hypergeometric_terms(spec, f)?.iter().map(|&(_, p)| p).sum();
        pmf_dev = pmf_dev.max((total - 1.0).abs());
    }
    suite.record("pmf_normalization", pmf_dev, 1e-12);

    let everything: Vec<usize> = (0..=n as usize).collect();
    suite.record("purity", oracle.entropy(&state, &everything)?.value().abs(), EXACT_TOL);

    let mut equivalence: f64 = 0.0;
    let mut decomposition: f64 = 0.0;
    let mut monotone: f64 = 0.0;
    let mut mi_by_size = Vec::with_capacity(n as usize + 1);
    let mut previous = 0.0;
    for f in 0..=n {
        let exact = avg_holevo_exact(spec, f)?.value();
        monotone = monotone.max(previous - exact);
        previous = exact;
        let all = oracle.all_fragments(&state, f as usize)?;
        let count = all.len() as f64;
        let chi = all.iter().map(|c| c.holevo.value()).sum::<f64>() / count;
        let mi = all.iter().map(|c| c.mutual_information.value()).sum::<f64>() / count;
        equivalence = equivalence.max((chi - exact).abs());
        for c in &all {
            let (i, x, d) = (c.mutual_information.value(), c.holevo.value(), c.discord.value());
            // D ∈ [−tol, I]: report how far it strays outside
            decomposition = decomposition.max(-d).max(d - i).max((i - x - d).abs());
        }
        mi_by_size.push(mi);
    }
    suite.record("oracle_equivalence", equivalence, EXACT_TOL);
    suite.record("discord_decomposition", decomposition, EXACT_TOL);
    suite.record("curve_monotone", monotone, EXACT_TOL);

    let antisymmetry = (0..mi_by_size.len())
        .map(|f| (mi_by_size[f] + mi_by_size[mi_by_size.len() - 1 - f] - 2.0 * h_system).abs())
        .fold(0.0, f64::max);
    suite.record("mi_antisymmetry", antisymmetry, EXACT_TOL);
    let full = mi_by_size.last().copied().unwrap_or(0.0);
    suite.record("full_interception", (full - 2.0 * h_system).abs(), EXACT_TOL);

    if spec.is_perfect() {
        let mut dev: f64 = 0.0;
        for f in 0..=n {
            let closed = h_s * (1.0 - p_all_bad(spec, f)?);
            dev = dev.max((avg_holevo_exact(spec, f)?.value() - closed).abs());
        }
        suite.record("perfect_closed_form", dev, 1e-12);
    }

    // γ = cos(2 g t) at t = 1, so g = acos(γ) / 2.
    if spec.p0 == 0.5 {
        let coupling = |gamma2: f64| gamma2.sqrt().acos() / 2.0;
        let couplings: Vec<f64> = (0..spec.n_good)
            .map(|_| coupling(spec.gamma2_good))
            .chain((0..spec.n_bad).map(|_| coupling(spec.gamma2_bad)))
            .collect();
        let evolved = oracle.evolve_pure_decoherence(&couplings, 1.0)?;
        let aligned = align_to_branch_frames(&evolved, &couplings, 1.0);
        suite.record("hamiltonian_equivalence", 1.0 - aligned.fidelity(&state), EXACT_TOL);
    }

    // ♯F_δ and k* against direct scans of the oracle curve
    let target = deficit.target(spec.pointer_entropy());
    if let Ok(found) = find_fragment_size(spec, deficit) {
        let scanned = if deficit.is_total() {
            1
        } else {
            (1..=n)
                .find(|&f| {
                    oracle
                        .all_fragment_average(&state, f as usize, Quantity::Holevo)
                        .map(|x| x.value() >= target - EXACT_TOL)
                        .unwrap_or(false)
                })
                .unwrap_or(0)
        };
        suite.record("fragment_size_scan", (found.size as f64 - scanned as f64).abs(), 0.0);
    }
    if let (Ok(m), false) = (redundancy_max(spec, deficit), deficit.is_total()) {
        let k = m.k_star as usize;
        let good: Vec<usize> = (1..=k).collect();
        let enough = oracle.holevo_and_discord(&state, &good)?.0.value() >= target - EXACT_TOL;
        let fewer = if k > 1 {
            let short: Vec<usize> = (1..k).collect();
            oracle.holevo_and_discord(&state, &short)?.0.value() < target + EXACT_TOL
        } else {
            true
        };
        suite.record("k_star_minimal", if enough && fewer { 0.0 } else { 1.0 }, 0.0);
    }

    if !deficit.is_total() {
        let d = deficit.value();
        let mut prev = f64::NEG_INFINITY;
        let mut dev: f64 = 0.0;
        for i in 0..=200 {
            let g = d + (0.99 - d) * i as f64 / 200.0;
            let r = definition_ratio(g, deficit)?.value;
            dev = dev.max(prev - r).max(r - 1.0);
            prev = r;
        }
        let at_boundary = definition_ratio(d, deficit)?.value;
        dev = dev.max((at_boundary - min_definition_ratio(deficit)).abs());
        suite.record("definition_ratio_law", dev, 1e-9);
    }

    let first_failure = suite.checks.iter().find(|c| !c.passed).map(|c| c.name.clone());
    Ok(ValidationSummary {
        passed: first_failure.is_none(),
        first_failure,
        checks: suite.checks,
    })
}
