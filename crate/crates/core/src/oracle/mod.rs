//! Brute-force dense-state oracle.
//!
//! Builds the full state vector of the system qubit and a small
//! environment, then measures entropies, mutual information, Holevo
//! quantity and discord by explicit linear algebra. Every closed form in
//! the crate is checked against it.

mod density;
mod measures;
mod state;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::info::Bits;
use crate::model::EnvironmentSpec;

pub use density::{DensityMatrix, EIGEN_FLOOR};
pub use measures::Correlations;
pub use state::{align_to_branch_frames, branch_frame_unitaries, DenseState, SpinClass, SpinRole, Unitary2};

/// Environment variable overriding [`OracleLimits::max_env_qubits`].
pub const ORACLE_CAP_VAR: &str = "DARWINISM_ORACLE_CAP";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleLimits {
    /// Largest environment a dense state may hold.
    pub max_env_qubits: usize,
    /// Largest qubit subset an explicit density matrix may cover.
    pub max_matrix_qubits: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_env_qubits: 14,
            max_matrix_qubits: 12,
        }
    }
}

impl OracleLimits {
    /// Defaults, with the environment cap taken from
    /// `DARWINISM_ORACLE_CAP` when it holds an integer.
    pub fn from_env() -> Self {
        let mut limits = Self::default();
        if let Some(cap) = std::env::var(ORACLE_CAP_VAR).ok().and_then(|v| v.trim().parse().ok()) {
            limits.max_env_qubits = cap;
        }
        limits
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    MutualInformation,
    Holevo,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Oracle {
    pub limits: OracleLimits,
}

impl Oracle {
    pub fn new(limits: OracleLimits) -> Self {
        Oracle { limits }
    }

    fn check_env(&self, n_env: usize) -> Result<()> {
        if n_env > self.limits.max_env_qubits {
            return Err(Error::OracleLimit {
                what: "environment size",
                got: n_env,
                limit: self.limits.max_env_qubits,
            });
        }
        Ok(())
    }

    /// Branch state with per-spin conditional overlaps `gammas`.
    pub fn build_branch_state(&self, p0: f64, gammas: &[Complex64]) -> Result<DenseState> {
        self.check_env(gammas.len())?;
        state::branch_state(p0, gammas)
    }

    /// Branch state of a spec: good spins on qubits `1..=n_good`, then the
    /// bad spins, with real overlaps `√gamma2`.
    pub fn build_from_spec(&self, spec: &EnvironmentSpec) -> Result<DenseState> {
        let n = spec.n_total() as usize;
        self.check_env(n)?;
        let good = Complex64::new(spec.gamma2_good.sqrt(), 0.0);
        let bad = Complex64::new(spec.gamma2_bad.sqrt(), 0.0);
        let gammas: Vec<Complex64> = (0..spec.n_good)
            .map(|_| good)
            .chain((0..spec.n_bad).map(|_| bad))
            .collect();
        state::branch_state(spec.p0, &gammas)
    }

    /// Evolution under `Σ_k g_k σ^z_S σ^z_k` from `(|0⟩+|1⟩)/√2` with
    /// coupled spins in `|+⟩` and uncoupled spins in `|0⟩`. Spin `k`
    /// ends with branch overlap `cos(2 g_k t)`.
    pub fn evolve_pure_decoherence(&self, couplings: &[f64], t: f64) -> Result<DenseState> {
        self.check_env(couplings.len())?;
        state::pure_decoherence(couplings, t)
    }

    /// Explicit reduced density matrix of the qubits in `subset`.
    pub fn reduced_density(&self, state: &DenseState, subset: &[usize]) -> Result<DensityMatrix> {
        density::check_subset(subset, state.n_qubits())?;
        if subset.len() > self.limits.max_matrix_qubits {
            return Err(Error::OracleLimit {
                what: "density-matrix qubits",
                got: subset.len(),
                limit: self.limits.max_matrix_qubits,
            });
        }
        Ok(density::reduce(state.amplitudes(), state.n_qubits(), subset))
    }

    /// Von Neumann entropy of the qubits in `subset`, in bits.
    pub fn entropy(&self, state: &DenseState, subset: &[usize]) -> Result<Bits> {
        density::check_subset(subset, state.n_qubits())?;
        Ok(Bits::new(density::subset_entropy(state.amplitudes(), state.n_qubits(), subset)))
    }

    fn check_fragment(&self, state: &DenseState, fragment: &[usize]) -> Result<()> {
        density::check_subset(fragment, state.n_qubits())?;
        if fragment.contains(&0) {
            return Err(Error::InvalidSubset("a fragment cannot contain the system qubit".into()));
        }
        Ok(())
    }

    pub fn correlations(&self, state: &DenseState, fragment: &[usize]) -> Result<Correlations> {
        self.check_fragment(state, fragment)?;
        Ok(measures::Prepared::new(state).correlations(fragment))
    }

    /// `I(S:F) = H_S + H_F − H_SF` in bits.
    pub fn mutual_information(&self, state: &DenseState, fragment: &[usize]) -> Result<Bits> {
        Ok(self.correlations(state, fragment)?.mutual_information)
    }

    /// Holevo quantity of the z pointer basis and the discord `I − χ`.
    pub fn holevo_and_discord(&self, state: &DenseState, fragment: &[usize]) -> Result<(Bits, Bits)> {
        let c = self.correlations(state, fragment)?;
        Ok((c.holevo, c.discord))
    }

    /// Unweighted mean of `quantity` over every fragment of
    /// `fragment_size` environment spins.
    pub fn all_fragment_average(&self, state: &DenseState, fragment_size: usize, quantity: Quantity) -> Result<Bits> {
        let prepared = measures::Prepared::new(state);
        let values = self.over_fragments(state, fragment_size, |f| match quantity {
            Quantity::MutualInformation => prepared.mutual_information_only(f),
            Quantity::Holevo => prepared.holevo_only(f),
        })?;
        Ok(Bits::new(values.iter().sum::<f64>() / values.len() as f64))
    }

    /// Correlations of every fragment of `fragment_size` spins, in
    /// increasing bitmask order.
    pub fn all_fragments(&self, state: &DenseState, fragment_size: usize) -> Result<Vec<Correlations>> {
        let prepared = measures::Prepared::new(state);
        self.over_fragments(state, fragment_size, |f| prepared.correlations(f))
    }

    /// Evaluates `measure` on every fragment of `fragment_size` spins, in
    /// parallel; results come back in increasing bitmask order so sums over
    /// them do not depend on scheduling.
    fn over_fragments<T, F>(&self, state: &DenseState, fragment_size: usize, measure: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(&[usize]) -> T + Sync,
    {
        let n_env = state.n_env();
        self.check_env(n_env)?;
        if fragment_size > n_env {
            return Err(Error::FragmentTooLarge {
                fragment_size: fragment_size as u64,
                n_total: n_env as u64,
            });
        }
        let masks: Vec<u32> = (0u32..1 << n_env)
            .filter(|m| m.count_ones() as usize == fragment_size)
            .collect();
        Ok(masks
            .par_iter()
            .map(|&mask| {
                let fragment: Vec<usize> = (0..n_env).filter(|k| mask >> k & 1 == 1).map(|k| k + 1).collect();
                measure(&fragment)
            })
            .collect())
    }
}
