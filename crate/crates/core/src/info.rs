//! Binary entropy and the Holevo quantity of a two-branch record.
//!
//! All values are in bits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An information value in bits (base-2 logarithm).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Bits(f64);

impl Bits {
    pub const ZERO: Bits = Bits(0.0);

    pub fn new(value: f64) -> Self {
        Bits(value)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<Bits> for f64 {
    fn from(b: Bits) -> f64 {
        b.0
    }
}

const CLAMP: f64 = 1e-12;

/// Accepts `x` in `[0, 1]`, snapping values within `1e-12` outside the
/// interval back onto it.
pub(crate) fn unit_interval(name: &'static str, x: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&x) {
        Ok(x)
    } else if (-CLAMP..0.0).contains(&x) {
        Ok(0.0)
    } else if x > 1.0 && x <= 1.0 + CLAMP {
        Ok(1.0)
    } else {
        Err(Error::Domain { name, value: x })
    }
}

fn h2(x: f64) -> f64 {
    let term = |p: f64| if p > 0.0 { -p * p.log2() } else { 0.0 };
    term(x) + term(1.0 - x)
}

/// `H(x) = −x log₂x − (1−x) log₂(1−x)`, with `0 log 0 = 0`.
pub fn binary_entropy(x: f64) -> Result<Bits> {
    let x = unit_interval("x", x)?;
    Ok(Bits(h2(x)))
}

/// Holevo quantity of the pointer observable for a fragment whose two
/// conditional states are pure with squared overlap `gamma2_fragment`.
///
/// The mixture `p0 |a⟩⟨a| + p1 |b⟩⟨b|` with `|⟨a|b⟩|² = g` has eigenvalues
/// `(1 ± √(1 − 4 p0 p1 (1 − g)))/2`; its entropy is the Holevo quantity.
pub fn holevo_from_overlap(gamma2_fragment: f64, p0: f64) -> Result<Bits> {
    let g = unit_interval("gamma2_fragment", gamma2_fragment)?;
    let p0 = unit_interval("p0", p0)?;
    Ok(Bits(holevo_unchecked(g, p0)))
}

pub(crate) fn holevo_unchecked(g: f64, p0: f64) -> f64 {
    let disc = (1.0 - 4.0 * p0 * (1.0 - p0) * (1.0 - g)).max(0.0);
    h2((1.0 + disc.sqrt()) / 2.0)
}
