use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::density::subset_entropy;
use super::state::DenseState;
use crate::info::Bits;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Correlations {
    pub mutual_information: Bits,
    pub holevo: Bits,
    pub discord: Bits,
}

/// Per-state quantities shared by every fragment: `H_S` and the two
/// environment branches conditioned on the pointer states.
pub(crate) struct Prepared<'a> {
    state: &'a DenseState,
    h_s: f64,
    /// `(p_s, normalized environment vector)`, bit `k` = spin `k + 1`
    branches: [(f64, Vec<Complex64>); 2],
}

fn conditional_branch(state: &DenseState, s: usize) -> (f64, Vec<Complex64>) {
    let amps = state.amplitudes();
    let branch: Vec<Complex64> = (0..amps.len() / 2).map(|e| amps[(e << 1) | s]).collect();
    let p: f64 = branch.iter().map(|a| a.norm_sqr()).sum();
    if p > 0.0 {
        let scale = 1.0 / p.sqrt();
        (p, branch.into_iter().map(|a| a * scale).collect())
    } else {
        (p, branch)
    }
}

impl<'a> Prepared<'a> {
    pub(crate) fn new(state: &'a DenseState) -> Self {
        Prepared {
            state,
            h_s: subset_entropy(state.amplitudes(), state.n_qubits(), &[0]),
            branches: [conditional_branch(state, 0), conditional_branch(state, 1)],
        }
    }

    fn h(&self, subset: &[usize]) -> f64 {
        subset_entropy(self.state.amplitudes(), self.state.n_qubits(), subset)
    }

    fn mutual_information(&self, fragment: &[usize], h_f: f64) -> f64 {
        let sf: Vec<usize> = std::iter::once(0).chain(fragment.iter().copied()).collect();
        self.h_s + h_f - self.h(&sf)
    }

    /// `χ = H_F − Σ_s p_s H(ρ_F|s)` for the z pointer basis.
    fn holevo(&self, fragment: &[usize], h_f: f64) -> f64 {
        // On the environment alone, qubit k of the full state is bit k − 1.
        let env_fragment: Vec<usize> = fragment.iter().map(|q| q - 1).collect();
        let n_env = self.state.n_env();
        let conditional: f64 = self
            .branches
            .iter()
            .filter(|(p, _)| *p > 0.0)
            .map(|(p, branch)| p * subset_entropy(branch, n_env, &env_fragment))
            .sum();
        h_f - conditional
    }

    /// `fragment` lists qubit indices (`≥ 1`); the caller validates it.
    pub(crate) fn correlations(&self, fragment: &[usize]) -> Correlations {
        let h_f = self.h(fragment);
        let mi = self.mutual_information(fragment, h_f);
        let chi = self.holevo(fragment, h_f);
        Correlations {
            mutual_information: Bits::new(mi),
            holevo: Bits::new(chi),
            discord: Bits::new(mi - chi),
        }
    }

    pub(crate) fn holevo_only(&self, fragment: &[usize]) -> f64 {
        self.holevo(fragment, self.h(fragment))
    }

    pub(crate) fn mutual_information_only(&self, fragment: &[usize]) -> f64 {
        self.mutual_information(fragment, self.h(fragment))
    }
}
