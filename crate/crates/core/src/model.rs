//! The good/bad environment model and fragment combinatorics.
//!
//! An environment holds `n_good` spins that each contribute a squared
//! overlap `gamma2_good` to the decoherence factor and `n_bad` spins that
//! contribute `gamma2_bad`. Within each class the spins are identical, so a
//! fragment is fully described by how many of each class it contains.

use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_factorial;

use crate::error::{Error, Result, SpecViolation};
use crate::info::{binary_entropy, Bits};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentSpec {
    pub n_good: u64,
    pub n_bad: u64,
    /// Squared conditional-state overlap `|γ_G|²` of one good spin.
    pub gamma2_good: f64,
    /// Squared conditional-state overlap `|γ_B|²` of one bad spin.
    pub gamma2_bad: f64,
    /// Probability of the `|0⟩` pointer state.
    pub p0: f64,
}

impl EnvironmentSpec {
    /// Builds and validates a spec.
    pub fn new(n_good: u64, n_bad: u64, gamma2_good: f64, gamma2_bad: f64, p0: f64) -> Result<Self> {
        validate_spec(EnvironmentSpec {
            n_good,
            n_bad,
            gamma2_good,
            gamma2_bad,
            p0,
        })
    }

    /// Good spins keep perfect records, bad spins keep none.
    pub fn perfect(n_good: u64, n_bad: u64) -> Result<Self> {
        Self::new(n_good, n_bad, 0.0, 1.0, 0.5)
    }

    pub fn n_total(&self) -> u64 {
        self.n_good + self.n_bad
    }

    pub fn is_perfect(&self) -> bool {
        self.gamma2_good == 0.0 && self.gamma2_bad == 1.0
    }

    /// Entropy of the pointer observable, `H_S`.
    pub fn pointer_entropy(&self) -> Bits {
        binary_entropy(self.p0).expect("validated p0")
    }

    pub fn check_fragment_size(&self, fragment_size: u64) -> Result<()> {
        if fragment_size > self.n_total() {
            return Err(Error::FragmentTooLarge {
                fragment_size,
                n_total: self.n_total(),
            });
        }
        Ok(())
    }
}

/// Returns the spec unchanged if every invariant holds, otherwise every
/// violation found.
pub fn validate_spec(spec: EnvironmentSpec) -> Result<EnvironmentSpec> {
    let mut violations = Vec::new();
    if spec.n_good.checked_add(spec.n_bad).unwrap_or(0) == 0 {
        violations.push(SpecViolation::EmptyEnvironment);
    }
    for (name, value) in [("gamma2_good", spec.gamma2_good), ("gamma2_bad", spec.gamma2_bad)] {
        if !(0.0..=1.0).contains(&value) {
            violations.push(SpecViolation::OverlapOutOfRange { name, value });
        }
    }
    if !(0.0..=1.0).contains(&spec.p0) {
        violations.push(SpecViolation::ProbabilityOutOfRange(spec.p0));
    }
    if violations.is_empty() {
        Ok(spec)
    } else {
        Err(Error::InvalidSpec(violations))
    }
}

/// Numbers of good and bad spins in an intercepted fragment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FragmentComposition {
    pub f_good: u64,
    pub f_bad: u64,
}

impl FragmentComposition {
    pub fn new(f_good: u64, f_bad: u64) -> Self {
        FragmentComposition { f_good, f_bad }
    }

    pub fn size(&self) -> u64 {
        self.f_good + self.f_bad
    }

    pub fn fits(&self, spec: &EnvironmentSpec) -> bool {
        self.f_good <= spec.n_good && self.f_bad <= spec.n_bad
    }
}

/// Information deficit `δ ∈ (0, 1]`: the fraction of `H_S` an observer
/// is willing to forgo.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Deficit(f64);

impl Deficit {
    pub fn new(delta: f64) -> Result<Self> {
        if delta > 0.0 && delta <= 1.0 {
            Ok(Deficit(delta))
        } else {
            Err(Error::InvalidDeficit(delta))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_total(self) -> bool {
        self.0 == 1.0
    }

    /// `ln(1/δ)`.
    pub fn log_inverse(self) -> f64 {
        -self.0.ln()
    }

    /// Information a qualifying fragment must hold, `(1 − δ) H_S`.
    pub fn target(self, pointer_entropy: Bits) -> f64 {
        (1.0 - self.0) * pointer_entropy.value()
    }
}

/// `ln(n! / (n − k)!)`, the log of the falling factorial.
pub(crate) fn ln_falling(n: u64, k: u64) -> f64 {
    debug_assert!(k <= n);
    let m = n - k;
    if k == 0 {
        0.0
    } else if k <= 64 {
        (0..k).map(|j| ((n - j) as f64).ln()).sum()
    } else if m < 30 {
        ln_factorial(n) - ln_factorial(m)
    } else {
        // Stirling series for ln n! − ln m!, rearranged so the large
        // (x + ½) ln x terms never get subtracted from each other.
        let (nf, mf, kf) = (n as f64, m as f64, k as f64);
        let ln_ratio = if 2 * k <= n {
            (-kf / nf).ln_1p()
        } else {
            mf.ln() - nf.ln()
        };
        kf * (nf.ln() - 1.0) - (mf + 0.5) * ln_ratio + stirling_correction(nf) - stirling_correction(mf)
    }
}

/// `ln(a!/(a − k)!) − ln(b!/(b − k)!)` for `k ≤ a ≤ b`.
///
/// Both falling factorials can be of order `k ln b` while their difference
/// is of order one, so the Stirling form is rearranged around `d = b − a`.
pub(crate) fn ln_falling_ratio(a: u64, b: u64, k: u64) -> f64 {
    debug_assert!(k <= a && a <= b);
    let d = (b - a) as f64;
    if k == 0 || a == b {
        0.0
    } else if k <= 64 {
        (0..k).map(|j| (-d / (b - j) as f64).ln_1p()).sum()
    } else if a - k < 30 {
        ln_falling(a, k) - ln_falling(b, k)
    } else {
        let (af, bf, kf) = (a as f64, b as f64, k as f64);
        let (am, bm) = (af - kf, bf - kf);
        (af + 0.5) * (-d / bf).ln_1p() - (am + 0.5) * (-d / bm).ln_1p() + d * (-kf / bf).ln_1p()
            + stirling_correction(af)
            - stirling_correction(am)
            - stirling_correction(bf)
            + stirling_correction(bm)
    }
}

/// `ln x! − [(x + ½) ln x − x + ½ ln 2π]` for `x ≥ 30`.
fn stirling_correction(x: f64) -> f64 {
    let x2 = x * x;
    (1.0 / 12.0 - (1.0 / 360.0 - (1.0 / 1260.0 - 1.0 / (1680.0 * x2)) / x2) / x2) / x
}

fn ln_choose(n: u64, k: u64) -> f64 {
    ln_falling(n, k) - ln_factorial(k)
}

/// Probability that a uniformly random fragment of `fragment_size` spins
/// contains exactly `f_bad` bad spins.
///
/// Infeasible compositions have probability 0. Values come from the
/// normalized mode-outward recurrence of [`hypergeometric_terms`], so they
/// sum to 1 to rounding; tail values below its cutoff use log factorials.
pub fn hypergeometric_pmf(spec: &EnvironmentSpec, fragment_size: u64, f_bad: u64) -> Result<f64> {
    spec.check_fragment_size(fragment_size)?;
    if f_bad > fragment_size {
        return Ok(0.0);
    }
    let f_good = fragment_size - f_bad;
    if f_bad > spec.n_bad || f_good > spec.n_good {
        return Ok(0.0);
    }
    let terms = hypergeometric_terms(spec, fragment_size)?;
    match terms.binary_search_by_key(&f_bad, |t| t.0) {
        Ok(i) => Ok(terms[i].1),
        // beyond the cutoff; negligible against the retained mass
        Err(_) => Ok(ln_pmf(spec, fragment_size, f_bad).exp()),
    }
}

fn ln_pmf(spec: &EnvironmentSpec, fragment_size: u64, f_bad: u64) -> f64 {
    let f_good = fragment_size - f_bad;
    ln_choose(spec.n_bad, f_bad) + ln_choose(spec.n_good, f_good)
        - ln_choose(spec.n_total(), fragment_size)
}

/// Range of feasible `f_bad` for a fragment size.
pub fn f_bad_support(spec: &EnvironmentSpec, fragment_size: u64) -> std::ops::RangeInclusive<u64> {
    fragment_size.saturating_sub(spec.n_good)..=fragment_size.min(spec.n_bad)
}

/// Terms below this fraction of the modal probability are dropped.
const TAIL_CUTOFF: f64 = 1e-20;

/// The `(f_bad, probability)` pairs carrying the mass of the fragment-size
/// law, in ascending `f_bad` order.
///
/// Starts at the mode and walks outward with the term ratio, so the cost
/// scales with the width of the distribution rather than the fragment size.
/// The law is log-concave, so once a term drops below the cutoff every
/// term beyond it does too.
pub fn hypergeometric_terms(spec: &EnvironmentSpec, fragment_size: u64) -> Result<Vec<(u64, f64)>> {
    spec.check_fragment_size(fragment_size)?;
    let support = f_bad_support(spec, fragment_size);
    let (lo, hi) = (*support.start(), *support.end());
    let big_f = fragment_size as u128;
    let mode = ((big_f + 1) * (spec.n_bad as u128 + 1) / (spec.n_total() as u128 + 2)) as u64;
    let mode = mode.clamp(lo, hi);

    let p_mode = ln_pmf(spec, fragment_size, mode).exp();
    let cutoff = p_mode * TAIL_CUTOFF;
    let (n_good, n_bad, f) = (spec.n_good as f64, spec.n_bad as f64, fragment_size as f64);
    // P(k + 1) / P(k)
    let ratio = |k: u64| {
        let k = k as f64;
        (n_bad - k) * (f - k) / ((k + 1.0) * (n_good - f + k + 1.0))
    };

    let mut terms = Vec::new();
    let mut p = p_mode;
    let mut k = mode;
    while k > lo {
        p /= ratio(k - 1);
        k -= 1;
        if p < cutoff {
            break;
        }
        terms.push((k, p));
    }
    terms.reverse();
    terms.push((mode, p_mode));

    let mut p = p_mode;
    let mut k = mode;
    while k < hi {
        p *= ratio(k);
        k += 1;
        if p < cutoff {
            break;
        }
        terms.push((k, p));
    }
    // The recurrence is exact up to rounding; renormalizing removes the
    // log-gamma error carried in by the modal term.
    let total: f64 = terms.iter().map(|t| t.1).sum();
    for t in &mut terms {
        t.1 /= total;
    }
    Ok(terms)
}

/// Squared overlap `|Γ_F|²` of the two conditional fragment states.
pub fn fragment_overlap(spec: &EnvironmentSpec, comp: FragmentComposition) -> Result<f64> {
    if !comp.fits(spec) {
        return Err(Error::InvalidComposition {
            f_good: comp.f_good,
            f_bad: comp.f_bad,
        });
    }
    Ok(composition_overlap(spec, comp))
}

pub(crate) fn composition_overlap(spec: &EnvironmentSpec, comp: FragmentComposition) -> f64 {
    pow(spec.gamma2_good, comp.f_good) * pow(spec.gamma2_bad, comp.f_bad)
}

/// `base^exp` for integer exponents up to the size of any environment.
pub(crate) fn pow(base: f64, exp: u64) -> f64 {
    if exp == 0 || base == 1.0 {
        1.0
    } else if exp <= i32::MAX as u64 {
        base.powi(exp as i32)
    } else {
        base.powf(exp as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    /// Counts `f_bad` over every subset of `fragment_size` spins, with the
    /// good spins at positions `0..n_good`.
    fn enumerate_pmf(n_good: u64, n_bad: u64, fragment_size: u64) -> Vec<f64> {
        let n = (n_good + n_bad) as u32;
        let mut counts = vec![0u64; fragment_size as usize + 1];
        let mut total = 0u64;
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as u64 != fragment_size {
                continue;
            }
            let good_bits = mask & ((1 << n_good) - 1);
            let f_bad = fragment_size - good_bits.count_ones() as u64;
            counts[f_bad as usize] += 1;
            total += 1;
        }
        counts.into_iter().map(|c| c as f64 / total as f64).collect()
    }

    #[test]
    fn validates_eq_state_instance() {
        let spec = EnvironmentSpec::new(2, 4, 0.0, 1.0, 0.5).unwrap();
        assert_eq!(spec.n_total(), 6);
        assert!(spec.is_perfect());
    }

    #[test]
    fn reports_every_violation() {
        let err = EnvironmentSpec::new(0, 0, 1.5, -0.1, 2.0).unwrap_err();
        let Error::InvalidSpec(v) = err else { panic!() };
        assert_eq!(v.len(), 4);
        assert_eq!(v[0], SpecViolation::EmptyEnvironment);
        assert!(v.iter().any(|e| e.to_string().contains("overlap out of range")));
        assert!(v.iter().any(|e| matches!(e, SpecViolation::ProbabilityOutOfRange(_))));

        let err = EnvironmentSpec::new(1, 1, 1.5, 1.0, 0.5).unwrap_err();
        assert!(err.to_string().contains("overlap out of range"));
        assert!(EnvironmentSpec::new(0, 0, 0.0, 1.0, 0.5)
            .unwrap_err()
            .to_string()
            .contains("empty environment"));
        assert!(EnvironmentSpec::new(1, 1, f64::NAN, 1.0, 0.5).is_err());
    }

    #[test]
    fn deficit_range() {
        assert!(Deficit::new(0.0).is_err());
        assert!(Deficit::new(1.0 + 1e-15).is_err());
        assert!(Deficit::new(1.0).unwrap().is_total());
        assert_eq!(Deficit::new(0.1).unwrap().target(Bits::new(1.0)), 0.9);
    }

    #[test]
    fn pmf_examples() {
        let spec = EnvironmentSpec::perfect(2, 4).unwrap();
        assert_abs_diff_eq!(hypergeometric_pmf(&spec, 2, 2).unwrap(), 0.4, epsilon = 1e-15);
        assert_eq!(hypergeometric_pmf(&spec, 2, 3).unwrap(), 0.0);
        // f_good would exceed n_good
        assert_eq!(hypergeometric_pmf(&spec, 5, 2).unwrap(), 0.0);
        assert!(matches!(
            hypergeometric_pmf(&spec, 7, 2),
            Err(Error::FragmentTooLarge { .. })
        ));
    }

    #[test]
    fn pmf_at_scale_matches_direct_product() {
        let spec = EnvironmentSpec::perfect(1_000_000, 1_000_000_000).unwrap();
        let n = spec.n_total() as f64;
        let nb = spec.n_bad as f64;
        let ln_direct: f64 = (0..100).map(|j| ((nb - j as f64) / (n - j as f64)).ln()).sum();
        let got = hypergeometric_pmf(&spec, 100, 100).unwrap();
        assert!((got / ln_direct.exp() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pmf_matches_enumeration_small() {
        for n_good in 0..=6u64 {
            for n_bad in 0..=(12 - n_good) {
                if n_good + n_bad == 0 {
                    continue;
                }
                let spec = EnvironmentSpec::perfect(n_good, n_bad).unwrap();
                for f in 0..=spec.n_total() {
                    let oracle = enumerate_pmf(n_good, n_bad, f);
                    for (f_bad, want) in oracle.iter().enumerate() {
                        let got = hypergeometric_pmf(&spec, f, f_bad as u64).unwrap();
                        assert!((got - want).abs() < 1e-12, "{n_good} {n_bad} {f} {f_bad}");
                    }
                }
            }
        }
    }

    #[test]
    fn terms_cover_support_for_small_specs() {
        let spec = EnvironmentSpec::new(3, 8, 0.25, 0.75, 0.3).unwrap();
        for f in 0..=11 {
            let terms = hypergeometric_terms(&spec, f).unwrap();
            let support = f_bad_support(&spec, f);
            assert_eq!(terms.len() as u64, support.end() - support.start() + 1);
            for (f_bad, p) in terms {
                let want = hypergeometric_pmf(&spec, f, f_bad).unwrap();
                assert!((p - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn ln_falling_matches_direct_sum() {
        for &(n, k) in &[(100u64, 65u64), (100, 80), (100, 100), (5000, 4990), (5000, 2500), (10_000_000, 65), (10_000_000, 3000)] {
            let direct: f64 = (0..k).map(|j| ((n - j) as f64).ln()).sum();
            let got = ln_falling(n, k);
            assert!((got - direct).abs() <= 1e-12 * direct.abs().max(1.0), "{n} {k}: {got} vs {direct}");
        }
    }

    #[test]
    fn ln_falling_ratio_matches_direct_sum() {
        let cases = [
            (96u64, 100u64, 40u64),
            (96, 100, 90),
            (900, 1000, 500),
            (70, 5000, 69),
            (4000, 4040, 3000),
            (999_999_000, 1_000_000_000, 100_000),
        ];
        for &(a, b, k) in &cases {
            let d = (b - a) as f64;
            let direct: f64 = (0..k).map(|j| (-d / (b - j) as f64).ln_1p()).sum();
            let got = ln_falling_ratio(a, b, k);
            assert!((got - direct).abs() <= 1e-11 * direct.abs().max(1.0), "{a} {b} {k}: {got} vs {direct}");
        }
        assert_eq!(ln_falling_ratio(50, 50, 40), 0.0);
    }

    #[test]
    fn overlap_examples() {
        let spec = EnvironmentSpec::new(5, 10, 0.2, 1.0, 0.5).unwrap();
        let o = fragment_overlap(&spec, FragmentComposition::new(2, 7)).unwrap();
        assert_abs_diff_eq!(o, 0.04, epsilon = 1e-15);
        assert_eq!(fragment_overlap(&spec, FragmentComposition::new(0, 0)).unwrap(), 1.0);
        let perfect = EnvironmentSpec::perfect(3, 3).unwrap();
        for f_bad in 0..=3 {
            assert_eq!(fragment_overlap(&perfect, FragmentComposition::new(1, f_bad)).unwrap(), 0.0);
        }
        assert!(fragment_overlap(&spec, FragmentComposition::new(6, 0)).is_err());
    }

    proptest! {
        #[test]
        fn pmf_sums_to_one(
            n_good in 0u64..2000,
            n_bad in 0u64..2000,
            frac in 0.0f64..=1.0,
            g in 0.0f64..=1.0,
        ) {
            prop_assume!(n_good + n_bad > 0);
            let spec = EnvironmentSpec::new(n_good, n_bad, g, 1.0, 0.5).unwrap();
            let f = (frac * spec.n_total() as f64).round() as u64;
            let total: f64 = f_bad_support(&spec, f)
                .map(|k| hypergeometric_pmf(&spec, f, k).unwrap())
                .sum();
            prop_assert!((total - 1.0).abs() < 1e-12, "sum {}", total);
            let truncated: f64 = hypergeometric_terms(&spec, f).unwrap().iter().map(|t| t.1).sum();
            prop_assert!((truncated - 1.0).abs() < 1e-12, "truncated sum {}", truncated);
        }

        #[test]
        fn overlap_monotone_in_good_count(
            g in 0.0f64..=1.0,
            f_good in 0u64..20,
            f_bad in 0u64..20,
        ) {
            let spec = EnvironmentSpec::new(40, 40, g, 1.0, 0.5).unwrap();
            let a = fragment_overlap(&spec, FragmentComposition::new(f_good, f_bad)).unwrap();
            let b = fragment_overlap(&spec, FragmentComposition::new(f_good + 1, f_bad)).unwrap();
            let c = fragment_overlap(&spec, FragmentComposition::new(f_good, f_bad + 1)).unwrap();
            prop_assert!(b <= a);
            prop_assert_eq!(a, c);
        }
    }
}
