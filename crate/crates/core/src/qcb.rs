//! Quantum Chernoff bound asymptotics.
//!
//! For pure conditional states, `tr ρ^c σ^(1−c)` of one spin equals its
//! squared overlap `|γ_k|²`, and the optimal `c` is `1/2`. The typical
//! Chernoff information of the environment is then the negative log of the
//! average squared overlap per spin. Exponents are in nats, information in
//! bits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::info::{binary_entropy, unit_interval, Bits};
use crate::model::{Deficit, EnvironmentSpec};

/// Chernoff parameter for spins under pure decoherence.
pub const CHERNOFF_C: f64 = 0.5;

/// Typical Chernoff information per environment spin, in nats.
///
/// Infinite when every spin holds a perfect record.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct ChernoffExponent(f64);

impl ChernoffExponent {
    pub fn new(value: f64) -> Self {
        ChernoffExponent(value)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_divergent(self) -> bool {
        self.0.is_infinite()
    }
}

/// `ξ̄ = −ln[(♯E_B |γ_B|² + ♯E_G |γ_G|²)/♯E]`.
pub fn typical_chernoff(spec: &EnvironmentSpec) -> ChernoffExponent {
    let n = spec.n_total() as f64;
    // 1 − ⟨|γ|²⟩, kept separate so the perfect model is exactly −ln(1 − ♯E_G/♯E)
    let deficit_mass = (spec.n_good as f64 * (1.0 - spec.gamma2_good)
        + spec.n_bad as f64 * (1.0 - spec.gamma2_bad))
        / n;
    if deficit_mass >= 1.0 {
        return ChernoffExponent(f64::INFINITY);
    }
    ChernoffExponent(-(-deficit_mass).ln_1p())
}

/// `P_e ∼ exp(−ξ̄ ♯F)` with the prefactor set to 1.
pub fn error_probability(xi: ChernoffExponent, fragment_size: u64) -> f64 {
    if fragment_size == 0 {
        1.0
    } else if xi.is_divergent() {
        0.0
    } else {
        (-xi.value() * fragment_size as f64).exp()
    }
}

/// `χ ∼ H_S − H(P_e)`, with `P_e` clamped to `1/2` and the result floored
/// at zero.
pub fn holevo_asymptotic(spec: &EnvironmentSpec, fragment_size: u64) -> Bits {
    let pe = error_probability(typical_chernoff(spec), fragment_size).min(0.5);
    let h_pe = binary_entropy(pe).expect("clamped into [0, 1/2]").value();
    Bits::new((spec.pointer_entropy().value() - h_pe).max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QcbRedundancy {
    pub value: f64,
    /// False outside the regime where the estimate is meaningful: a perfect
    /// model with `♯E_G < ln(1/δ)`, or any estimate below one record.
    pub valid: bool,
}

/// `R_δ ≃ ♯E ξ̄ / ln(1/δ)`.
pub fn redundancy_qcb(spec: &EnvironmentSpec, deficit: Deficit) -> Result<QcbRedundancy> {
    if deficit.is_total() {
        return Err(Error::NotApplicable("the QCB redundancy needs delta < 1"));
    }
    let xi = typical_chernoff(spec);
    if xi.is_divergent() {
        return Err(Error::NotApplicable("the Chernoff exponent diverges"));
    }
    let log_inv = deficit.log_inverse();
    let value = spec.n_total() as f64 * xi.value() / log_inv;
    let valid = value >= 1.0 && !(spec.is_perfect() && (spec.n_good as f64) < log_inv);
    Ok(QcbRedundancy { value, valid })
}

/// Small-`|1 − ⟨|γ|²⟩|` expansion for bad spins without records:
/// `♯E_G (1 − |γ_G|²) / ln(1/δ)`.
pub fn redundancy_goodbad_expanded(spec: &EnvironmentSpec, deficit: Deficit) -> Result<f64> {
    if spec.gamma2_bad != 1.0 {
        return Err(Error::NotApplicable("the expanded QCB redundancy needs gamma2_bad = 1"));
    }
    if deficit.is_total() {
        return Err(Error::NotApplicable("the QCB redundancy needs delta < 1"));
    }
    Ok(spec.n_good as f64 * (1.0 - spec.gamma2_good) / deficit.log_inverse())
}

/// Continuous asymptotic of the disjoint-fragment count,
/// `♯E_G ln|γ_G|² / ln δ`, capped at `♯E_G`.
///
/// When `|γ_G|² ≤ δ` a single good spin already suffices and the count is
/// `♯E_G`; `|γ_G|² = 1` gives zero. `δ = 1` gives `♯E`.
pub fn redundancy_max_qcb(spec: &EnvironmentSpec, deficit: Deficit) -> f64 {
    let g = spec.gamma2_good;
    let n_good = spec.n_good as f64;
    if deficit.is_total() {
        spec.n_total() as f64
    } else if g <= deficit.value() {
        n_good
    } else if g >= 1.0 {
        0.0
    } else {
        (n_good * g.ln() / deficit.value().ln()).min(n_good)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DefinitionRatio {
    pub value: f64,
    /// `g` was 0 or 1 and the limiting value was returned.
    pub boundary: bool,
    /// `g ≥ δ`, where the continuous maximization formula holds.
    pub in_valid_region: bool,
}

/// Ratio of the expanded QCB redundancy to the maximization asymptotic,
/// `(1 − g) / ln(1/g)` with `g = |γ_G|²`.
///
/// Increases with `g` towards 1; over `g ≥ δ` its minimum is at `g = δ`.
pub fn definition_ratio(gamma2_good: f64, deficit: Deficit) -> Result<DefinitionRatio> {
    let g = unit_interval("gamma2_good", gamma2_good)?;
    let in_valid_region = g >= deficit.value();
    let (value, boundary) = if g == 0.0 {
        (0.0, true)
    } else if g == 1.0 {
        (1.0, true)
    } else {
        // ln g via ln_1p keeps digits as g → 1
        ((1.0 - g) / -(g - 1.0).ln_1p(), false)
    };
    Ok(DefinitionRatio {
        value,
        boundary,
        in_valid_region,
    })
}

/// `(1 − δ) / ln(1/δ)`, the smallest [`definition_ratio`] over `g ≥ δ`.
pub fn min_definition_ratio(deficit: Deficit) -> f64 {
    if deficit.is_total() {
        return 1.0;
    }
    (1.0 - deficit.value()) / deficit.log_inverse()
}

/// Diagnostic for `δ` near 1, where `♯F_δ` is of order one:
/// `♯E_G / (1 − δ)`.
pub fn redundancy_near_unit_deficit(spec: &EnvironmentSpec, deficit: Deficit) -> Result<f64> {
    if deficit.is_total() {
        return Err(Error::NotApplicable("the near-unit-deficit form needs delta < 1"));
    }
    Ok(spec.n_good as f64 / (1.0 - deficit.value()))
}
