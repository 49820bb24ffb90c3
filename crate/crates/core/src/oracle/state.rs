use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// 2×2 unitary acting on one qubit, row-major.
pub type Unitary2 = [[Complex64; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpinClass {
    Good,
    Bad,
}

/// Label of one environment spin: its class and the overlap `γ_k` of its
/// two conditional states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinRole {
    pub class: SpinClass,
    pub gamma: Complex64,
}

impl SpinRole {
    pub fn from_gamma(gamma: Complex64) -> Self {
        let class = if gamma.norm_sqr() < 1.0 - 1e-12 {
            SpinClass::Good
        } else {
            SpinClass::Bad
        };
        SpinRole { class, gamma }
    }
}

const NORM_TOL: f64 = 1e-12;

/// State vector of the system qubit and `N` environment spins.
///
/// Bit `q` of an amplitude index is qubit `q`; qubit 0 is the system and
/// qubits `1..=N` are the environment spins in order.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    amplitudes: Vec<Complex64>,
    roles: Vec<SpinRole>,
}

impl DenseState {
    pub fn new(amplitudes: Vec<Complex64>, roles: Vec<SpinRole>) -> Result<Self> {
        let expected = 1usize << (roles.len() + 1);
        if amplitudes.len() != expected {
            return Err(Error::InvalidSubset(format!(
                "{} amplitudes for {} environment spins, expected {expected}",
                amplitudes.len(),
                roles.len()
            )));
        }
        let state = DenseState { amplitudes, roles };
        let dev = (state.norm_sqr() - 1.0).abs();
        if dev > NORM_TOL {
            return Err(Error::Norm(dev));
        }
        Ok(state)
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn roles(&self) -> &[SpinRole] {
        &self.roles
    }

    pub fn n_env(&self) -> usize {
        self.roles.len()
    }

    pub fn n_qubits(&self) -> usize {
        self.roles.len() + 1
    }

    /// Qubit indices of the environment spins.
    pub fn env_qubits(&self) -> std::ops::RangeInclusive<usize> {
        1..=self.n_env()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `|⟨self|other⟩|²`
    pub fn fidelity(&self, other: &DenseState) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            .norm_sqr()
    }

    /// Applies `u` to one qubit.
    pub fn apply_local(&self, qubit: usize, u: &Unitary2) -> DenseState {
        let bit = 1usize << qubit;
        let mut out = self.amplitudes.clone();
        for i0 in (0..out.len()).filter(|i| i & bit == 0) {
            let i1 = i0 | bit;
            let (a0, a1) = (self.amplitudes[i0], self.amplitudes[i1]);
            out[i0] = u[0][0] * a0 + u[0][1] * a1;
            out[i1] = u[1][0] * a0 + u[1][1] * a1;
        }
        DenseState {
            amplitudes: out,
            roles: self.roles.clone(),
        }
    }
}

/// `√p0 |0⟩ ⊗_k |e⁰_k⟩ + √p1 |1⟩ ⊗_k |e¹_k⟩` with `|e⁰⟩ = |0⟩` and
/// `|e¹⟩ = γ|0⟩ + √(1 − |γ|²)|1⟩`, so that `⟨e⁰_k|e¹_k⟩ = γ_k`.
pub(crate) fn branch_state(p0: f64, gammas: &[Complex64]) -> Result<DenseState> {
    if !(0.0..=1.0).contains(&p0) {
        return Err(Error::Domain { name: "p0", value: p0 });
    }
    if gammas.is_empty() {
        return Err(Error::InvalidSubset("at least one environment spin is required".into()));
    }
    if let Some(g) = gammas.iter().find(|g| !(g.norm_sqr() <= 1.0 + 1e-12)) {
        return Err(Error::Domain {
            name: "|gamma_k|",
            value: g.norm(),
        });
    }
    let zero = Complex64::new(0.0, 0.0);
    let mut branches = [
        vec![Complex64::new(p0.sqrt(), 0.0)],
        vec![Complex64::new((1.0 - p0).sqrt(), 0.0)],
    ];
    for &g in gammas {
        let perp = Complex64::new((1.0 - g.norm_sqr()).max(0.0).sqrt(), 0.0);
        let e0 = [Complex64::new(1.0, 0.0), zero];
        let e1 = [g, perp];
        for (branch, e) in branches.iter_mut().zip([e0, e1]) {
            *branch = kron_low(branch, &e);
        }
    }
    // Interleave the system bit as bit 0.
    let dim = branches[0].len();
    let mut amplitudes = vec![zero; 2 * dim];
    for env in 0..dim {
        amplitudes[env << 1] = branches[0][env];
        amplitudes[(env << 1) | 1] = branches[1][env];
    }
    DenseState::new(amplitudes, gammas.iter().map(|&g| SpinRole::from_gamma(g)).collect())
}

/// `v ⊗ e` with the new qubit placed above the existing ones.
fn kron_low(v: &[Complex64], e: &[Complex64; 2]) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(2 * v.len());
    out.extend(v.iter().map(|a| a * e[0]));
    out.extend(v.iter().map(|a| a * e[1]));
    out
}

fn initial_spin(coupling: f64) -> [Complex64; 2] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    if coupling != 0.0 {
        [Complex64::new(h, 0.0), Complex64::new(h, 0.0)]
    } else {
        [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]
    }
}

fn z_sign(bit: usize) -> f64 {
    if bit == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Evolves `(|0⟩ + |1⟩)/√2 ⊗ spins` under `H = Σ_k g_k σ^z_S σ^z_k` for
/// time `t`. Spins with `g_k ≠ 0` start in `|+⟩`, the rest in `|0⟩`.
///
/// `H` is diagonal in the computational basis, so each amplitude just picks
/// up the phase `exp(−i t Σ_k g_k z_S z_k)`.
pub(crate) fn pure_decoherence(couplings: &[f64], t: f64) -> Result<DenseState> {
    if couplings.is_empty() {
        return Err(Error::InvalidSubset("at least one environment spin is required".into()));
    }
    let n_qubits = couplings.len() + 1;
    let spins: Vec<[Complex64; 2]> = couplings.iter().map(|&g| initial_spin(g)).collect();
    let amp_s = std::f64::consts::FRAC_1_SQRT_2;
    let amplitudes = (0..1usize << n_qubits)
        .map(|idx| {
            let z_s = z_sign(idx & 1);
            let mut amp = Complex64::new(amp_s, 0.0);
            let mut energy = 0.0;
            for (k, (&g, spin)) in couplings.iter().zip(&spins).enumerate() {
                let b = (idx >> (k + 1)) & 1;
                amp *= spin[b];
                energy += g * z_s * z_sign(b);
            }
            amp * Complex64::from_polar(1.0, -t * energy)
        })
        .collect();
    let roles = couplings
        .iter()
        .map(|&g| SpinRole {
            class: if g != 0.0 { SpinClass::Good } else { SpinClass::Bad },
            gamma: Complex64::new((2.0 * g * t).cos(), 0.0),
        })
        .collect();
    DenseState::new(amplitudes, roles)
}

/// Local unitaries that carry each spin's two evolved branch states onto
/// the frame used by [`branch_state`]: `|e⁰⟩ → |0⟩` and
/// `|e¹⟩ → γ|0⟩ + √(1 − |γ|²)|1⟩`.
///
/// Computed from the single-spin dynamics alone, independently of the
/// full state vector.
pub fn branch_frame_unitaries(couplings: &[f64], t: f64) -> Vec<Unitary2> {
    couplings
        .iter()
        .map(|&g| {
            let phi = initial_spin(g);
            let branch = |z_s: f64| -> [Complex64; 2] {
                [0, 1].map(|b| phi[b] * Complex64::from_polar(1.0, -t * g * z_s * z_sign(b)))
            };
            frame_unitary(&branch(1.0), &branch(-1.0))
        })
        .collect()
}

fn inner(a: &[Complex64; 2], b: &[Complex64; 2]) -> Complex64 {
    a[0].conj() * b[0] + a[1].conj() * b[1]
}

/// Rows are the bras of the Gram–Schmidt frame `{e0, e1 ⊥ e0}`.
fn frame_unitary(e0: &[Complex64; 2], e1: &[Complex64; 2]) -> Unitary2 {
    let c0 = *e0;
    let overlap = inner(&c0, e1);
    let rest = [e1[0] - overlap * c0[0], e1[1] - overlap * c0[1]];
    let norm = (rest[0].norm_sqr() + rest[1].norm_sqr()).sqrt();
    let c1 = if norm > 1e-12 {
        [rest[0] / norm, rest[1] / norm]
    } else {
        [-c0[1].conj(), c0[0].conj()]
    };
    [[c0[0].conj(), c0[1].conj()], [c1[0].conj(), c1[1].conj()]]
}

/// Applies [`branch_frame_unitaries`] to every environment spin.
pub fn align_to_branch_frames(state: &DenseState, couplings: &[f64], t: f64) -> DenseState {
    branch_frame_unitaries(couplings, t)
        .iter()
        .enumerate()
        .fold(state.clone(), |s, (k, u)| s.apply_local(k + 1, u))
}
