//! Fragment-averaged Holevo information, the fragment size `♯F_δ` that
//! reaches `(1 − δ) H_S`, and the two redundancy definitions.

use std::collections::HashMap;
use std::ops::RangeInclusive;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Hypergeometric};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::info::{holevo_unchecked, Bits};
use crate::model::{
    composition_overlap, hypergeometric_terms, ln_falling_ratio, pow, Deficit, EnvironmentSpec, FragmentComposition,
};
use crate::qcb;

/// Probability that a random fragment of `fragment_size` spins holds only
/// bad spins, `∏_{j<♯F} (♯E_B − j)/(♯E − j)`.
pub fn p_all_bad(spec: &EnvironmentSpec, fragment_size: u64) -> Result<f64> {
    spec.check_fragment_size(fragment_size)?;
    if fragment_size > spec.n_bad {
        return Ok(0.0);
    }
    Ok(ln_falling_ratio(spec.n_bad, spec.n_total(), fragment_size).exp())
}

fn holevo_of(spec: &EnvironmentSpec, fragment_size: u64, f_bad: u64) -> f64 {
    let comp = FragmentComposition::new(fragment_size - f_bad, f_bad);
    holevo_unchecked(composition_overlap(spec, comp), spec.p0)
}

/// Holevo quantity averaged over all fragments of `fragment_size` spins,
/// weighting each composition by its hypergeometric probability.
pub fn avg_holevo_exact(spec: &EnvironmentSpec, fragment_size: u64) -> Result<Bits> {
    if fragment_size == 0 {
        spec.check_fragment_size(0)?;
        return Ok(Bits::ZERO);
    }
    let terms = hypergeometric_terms(spec, fragment_size)?;
    let avg: f64 = terms
        .iter()
        .map(|&(f_bad, p)| p * holevo_of(spec, fragment_size, f_bad))
        .sum();
    Ok(Bits::new(avg.min(spec.pointer_entropy().value())))
}

/// Smallest fragment size reaching the target information, together with
/// the linearly interpolated crossing of the target on the curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FragmentSize {
    pub size: u64,
    pub interpolated: f64,
}

/// Smallest `♯F ≥ 1` with `⟨χ⟩_♯F ≥ (1 − δ) H_S`.
///
/// Bisects the monotone exact curve. `δ = 1` returns 1 without searching.
pub fn find_fragment_size(spec: &EnvironmentSpec, deficit: Deficit) -> Result<FragmentSize> {
    if deficit.is_total() {
        return Ok(FragmentSize {
            size: 1,
            interpolated: 1.0,
        });
    }
    let target = deficit.target(spec.pointer_entropy());
    let curve = |f: u64| avg_holevo_exact(spec, f).map(Bits::value);
    let n = spec.n_total();
    if curve(n)? < target {
        return Err(Error::DeficitUnreachable {
            delta: deficit.value(),
        });
    }
    let (mut lo, mut hi) = (1, n);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if curve(mid)? >= target {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let (below, at) = (curve(lo - 1)?, curve(lo)?);
    let interpolated = if at > below {
        (lo - 1) as f64 + ((target - below) / (at - below)).clamp(0.0, 1.0)
    } else {
        lo as f64
    };
    Ok(FragmentSize {
        size: lo,
        interpolated,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AvgRedundancy {
    pub f_delta: FragmentSize,
    /// `♯E / ♯F_δ`
    pub r_avg: f64,
}

/// Average-based redundancy `R_δ = ♯E / ♯F_δ`; `R_1 = ♯E`.
pub fn redundancy_avg(spec: &EnvironmentSpec, deficit: Deficit) -> Result<AvgRedundancy> {
    let f_delta = find_fragment_size(spec, deficit)?;
    Ok(AvgRedundancy {
        f_delta,
        r_avg: spec.n_total() as f64 / f_delta.size as f64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaxRedundancy {
    /// Good spins needed per disjoint fragment; 0 when `δ = 1`.
    pub k_star: u64,
    /// Number of disjoint qualifying fragments.
    pub r_max: f64,
    /// Whether the continuous asymptotic `♯E_G ln|γ_G|² / ln δ` applies
    /// (`δ ≤ |γ_G|² < 1`).
    pub formula_valid: bool,
}

/// Maximum number of disjoint fragments that each hold `(1 − δ) H_S`.
///
/// Only good spins carry records in this count; bad spins are free filler
/// and never limit it. `δ = 1` gives `♯E`, since every spin then qualifies.
pub fn redundancy_max(spec: &EnvironmentSpec, deficit: Deficit) -> Result<MaxRedundancy> {
    let g = spec.gamma2_good;
    let formula_valid = g > 0.0 && g < 1.0 && g >= deficit.value();
    if deficit.is_total() {
        return Ok(MaxRedundancy {
            k_star: 0,
            r_max: spec.n_total() as f64,
            formula_valid,
        });
    }
    let target = deficit.target(spec.pointer_entropy());
    let info = |k: u64| holevo_unchecked(pow(g, k), spec.p0);
    let unreachable = Error::DeficitUnreachable {
        delta: deficit.value(),
    };
    if spec.n_good == 0 || info(spec.n_good) < target {
        return Err(unreachable);
    }
    let (mut lo, mut hi) = (1, spec.n_good);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if info(mid) >= target {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(MaxRedundancy {
        k_star: lo,
        r_max: (spec.n_good / lo) as f64,
        formula_valid,
    })
}

/// Monte Carlo estimate of a fragment-averaged Holevo quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: Bits,
    pub stderr: f64,
}

/// Random generator for one task of a seeded run. Each stream of the same
/// seed is independent, so results do not depend on scheduling.
pub fn task_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Estimates `⟨χ⟩_♯F` by drawing fragment compositions from the
/// hypergeometric law.
///
/// Draws come from stream `fragment_size` of `seed`, so the estimate for a
/// size does not depend on which other sizes were computed.
pub fn mc_avg_holevo(spec: &EnvironmentSpec, fragment_size: u64, n_samples: u64, seed: u64) -> Result<McEstimate> {
    spec.check_fragment_size(fragment_size)?;
    if n_samples < 2 {
        return Err(Error::TooFewSamples(n_samples));
    }
    let law = Hypergeometric::new(spec.n_total(), spec.n_bad, fragment_size)
        .expect("sizes checked against the environment");
    let mut rng = task_rng(seed, fragment_size);
    let mut cache: HashMap<u64, f64> = HashMap::new();
    // Welford: identical draws leave the mean exactly at the drawn value.
    let (mut mean, mut m2) = (0.0f64, 0.0f64);
    for i in 1..=n_samples {
        let f_bad = law.sample(&mut rng);
        let x = *cache
            .entry(f_bad)
            .or_insert_with(|| holevo_of(spec, fragment_size, f_bad));
        let d = x - mean;
        mean += d / i as f64;
        m2 += d * (x - mean);
    }
    let n = n_samples as f64;
    let variance = m2 / (n - 1.0);
    Ok(McEstimate {
        estimate: Bits::new(mean),
        stderr: (variance / n).sqrt(),
    })
}

/// Large-♯E_B limit of the perfect model: `♯E_B ln(1/δ) / ♯E_G`.
pub fn stirling_fragment_size(spec: &EnvironmentSpec, deficit: Deficit) -> Result<f64> {
    if !spec.is_perfect() {
        return Err(Error::NotApplicable(
            "the Stirling fragment size needs the perfect good/bad model",
        ));
    }
    if spec.n_good == 0 {
        return Err(Error::NotApplicable("the Stirling fragment size needs n_good >= 1"));
    }
    Ok(spec.n_bad as f64 * deficit.log_inverse() / spec.n_good as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InfoMethod {
    Exact,
    MonteCarlo,
    QcbAsymptotic,
    Oracle,
}

impl InfoMethod {
    pub fn label(self) -> &'static str {
        match self {
            InfoMethod::Exact => "exact",
            InfoMethod::MonteCarlo => "monte-carlo",
            InfoMethod::QcbAsymptotic => "qcb-asymptotic",
            InfoMethod::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub fragment_size: u64,
    pub avg_info: Bits,
    pub method: InfoMethod,
    pub stderr: Option<f64>,
}

/// Averaged information against fragment size.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct InfoCurve {
    pub entries: Vec<CurvePoint>,
}

impl InfoCurve {
    fn check_range(spec: &EnvironmentSpec, sizes: &RangeInclusive<u64>) -> Result<()> {
        spec.check_fragment_size(*sizes.end())
    }

    pub fn exact(spec: &EnvironmentSpec, sizes: RangeInclusive<u64>) -> Result<Self> {
        Self::check_range(spec, &sizes)?;
        let entries = sizes
            .map(|f| {
                Ok(CurvePoint {
                    fragment_size: f,
                    avg_info: avg_holevo_exact(spec, f)?,
                    method: InfoMethod::Exact,
                    stderr: None,
                })
            })
            .collect::<Result<_>>()?;
        Ok(InfoCurve { entries })
    }

    /// Sizes are estimated concurrently; each uses its own stream of `seed`.
    pub fn monte_carlo(spec: &EnvironmentSpec, sizes: RangeInclusive<u64>, n_samples: u64, seed: u64) -> Result<Self> {
        Self::check_range(spec, &sizes)?;
        let sizes: Vec<u64> = sizes.collect();
        let entries = sizes
            .par_iter()
            .map(|&f| {
                let mc = mc_avg_holevo(spec, f, n_samples, seed)?;
                Ok(CurvePoint {
                    fragment_size: f,
                    avg_info: mc.estimate,
                    method: InfoMethod::MonteCarlo,
                    stderr: Some(mc.stderr),
                })
            })
            .collect::<Result<_>>()?;
        Ok(InfoCurve { entries })
    }

    pub fn qcb(spec: &EnvironmentSpec, sizes: RangeInclusive<u64>) -> Result<Self> {
        Self::check_range(spec, &sizes)?;
        let entries = sizes
            .map(|f| CurvePoint {
                fragment_size: f,
                avg_info: qcb::holevo_asymptotic(spec, f),
                method: InfoMethod::QcbAsymptotic,
                stderr: None,
            })
            .collect();
        Ok(InfoCurve { entries })
    }

    /// Sizes strictly increase, values lie in `[0, H_S]`, and only Monte
    /// Carlo entries carry a standard error.
    pub fn is_well_formed(&self, pointer_entropy: Bits) -> bool {
        let h = pointer_entropy.value() + 1e-12;
        self.entries.windows(2).all(|w| w[0].fragment_size < w[1].fragment_size)
            && self.entries.iter().all(|e| {
                let v = e.avg_info.value();
                (-1e-12..=h).contains(&v) && (e.stderr.is_some() == (e.method == InfoMethod::MonteCarlo))
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::hypergeometric_pmf;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn perfect(n_good: u64, n_bad: u64) -> EnvironmentSpec {
        EnvironmentSpec::perfect(n_good, n_bad).unwrap()
    }

    fn delta(d: f64) -> Deficit {
        Deficit::new(d).unwrap()
    }

    /// `∏ (♯E_B − j)/(♯E − j)` evaluated term by term.
    fn p_all_bad_product(n_good: u64, n_bad: u64, f: u64) -> f64 {
        let n = (n_good + n_bad) as f64;
        (0..f).map(|j| (n_bad as f64 - j as f64) / (n - j as f64)).product()
    }

    #[test]
    fn p_all_bad_examples() {
        let spec = perfect(2, 4);
        assert_abs_diff_eq!(p_all_bad(&spec, 2).unwrap(), 0.4, epsilon = 1e-15);
        assert_abs_diff_eq!(p_all_bad(&spec, 3).unwrap(), 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(p_all_bad(&spec, 4).unwrap(), 1.0 / 15.0, epsilon = 1e-15);
        assert_eq!(p_all_bad(&spec, 5).unwrap(), 0.0);
        assert_eq!(p_all_bad(&spec, 0).unwrap(), 1.0);
        assert!(p_all_bad(&spec, 7).is_err());
    }

    #[test]
    fn p_all_bad_equals_pmf_and_product() {
        for &(g, b) in &[(3u64, 9u64), (10, 990), (40, 4000), (1, 50)] {
            let spec = perfect(g, b);
            for f in [1, 2, 7, 50, 200, b] {
                if f > b {
                    continue;
                }
                let pb = p_all_bad(&spec, f).unwrap();
                let pmf = hypergeometric_pmf(&spec, f, f).unwrap();
                let prod = p_all_bad_product(g, b, f);
                assert!((pb - pmf).abs() <= 1e-12 * pmf.max(1e-300), "{g} {b} {f}");
                assert!((pb - prod).abs() <= 1e-12 * prod.max(1e-300), "{g} {b} {f}");
            }
        }
    }

    #[test]
    fn p_all_bad_at_billion_scale() {
        let spec = perfect(1_000, 1_000_000_000 - 1_000);
        let f = 2_300_000;
        let n = spec.n_total() as f64;
        let ln_prod: f64 = (0..f).map(|j| (1.0 - 1_000.0 / (n - j as f64)).ln()).sum();
        let got = p_all_bad(&spec, f).unwrap();
        assert!((got.ln() - ln_prod).abs() < 1e-9, "{} vs {}", got.ln(), ln_prod);
    }

    #[test]
    fn avg_holevo_examples() {
        let spec = perfect(2, 4);
        assert_abs_diff_eq!(avg_holevo_exact(&spec, 2).unwrap().value(), 0.6, epsilon = 1e-14);
        assert_eq!(avg_holevo_exact(&spec, 0).unwrap().value(), 0.0);
        assert_eq!(avg_holevo_exact(&spec, 6).unwrap().value(), 1.0);
        assert!(avg_holevo_exact(&spec, 7).is_err());
    }

    #[test]
    fn perfect_model_reduces_to_p_all_bad() {
        for &(g, b, p0) in &[(2u64, 4u64, 0.5), (5, 300, 0.3), (10, 990, 0.5), (1, 1, 0.9)] {
            let spec = EnvironmentSpec::new(g, b, 0.0, 1.0, p0).unwrap();
            let hs = spec.pointer_entropy().value();
            for f in 0..=spec.n_total() {
                let want = hs * (1.0 - p_all_bad(&spec, f).unwrap());
                let got = avg_holevo_exact(&spec, f).unwrap().value();
                assert!((got - want).abs() < 1e-12, "{g} {b} {f}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn fragment_size_examples() {
        let f = find_fragment_size(&perfect(2, 4), delta(0.1)).unwrap();
        assert_eq!(f.size, 4);
        assert!(f.interpolated > 3.0 && f.interpolated <= 4.0);
        assert!(matches!(
            find_fragment_size(&perfect(0, 8), delta(0.5)),
            Err(Error::DeficitUnreachable { .. })
        ));
        assert_eq!(find_fragment_size(&perfect(0, 8), delta(1.0)).unwrap().size, 1);
        // mpmath oracle: smallest F with P_B(F) <= 0.1
        assert_eq!(find_fragment_size(&perfect(4, 96), delta(0.1)).unwrap().size, 44);
        assert_eq!(find_fragment_size(&perfect(10, 990), delta((-2.0f64).exp())).unwrap().size, 181);
    }

    #[test]
    fn fragment_size_is_the_first_crossing() {
        let spec = EnvironmentSpec::new(7, 40, 0.3, 0.9, 0.4).unwrap();
        for d in [0.01, 0.05, 0.2, 0.6, 0.99] {
            let deficit = delta(d);
            let target = deficit.target(spec.pointer_entropy());
            let scan = (1..=spec.n_total())
                .find(|&f| avg_holevo_exact(&spec, f).unwrap().value() >= target);
            match find_fragment_size(&spec, deficit) {
                Ok(found) => assert_eq!(Some(found.size), scan),
                Err(Error::DeficitUnreachable { .. }) => assert_eq!(scan, None),
                Err(e) => panic!("{e}"),
            }
        }
    }

    #[test]
    fn redundancy_avg_examples() {
        assert_abs_diff_eq!(redundancy_avg(&perfect(2, 4), delta(0.1)).unwrap().r_avg, 1.5);
        assert_eq!(redundancy_avg(&perfect(2, 4), delta(1.0)).unwrap().r_avg, 6.0);
        let r = redundancy_avg(&perfect(10, 990), delta((-2.0f64).exp())).unwrap().r_avg;
        assert_abs_diff_eq!(r, 1000.0 / 181.0, epsilon = 1e-12);
        assert!((r - 5.0).abs() < 0.6);
    }

    #[test]
    fn redundancy_max_examples() {
        for d in [0.01, 0.1, 0.5, 0.999] {
            let m = redundancy_max(&perfect(7, 1000), delta(d)).unwrap();
            assert_eq!((m.k_star, m.r_max), (1, 7.0));
            assert!(!m.formula_valid);
        }
        let spec = EnvironmentSpec::new(50, 50, 0.2, 1.0, 0.5).unwrap();
        let m = redundancy_max(&spec, delta(0.1)).unwrap();
        // H((1 + √0.2)/2) = 0.8506 < 0.9 <= H((1 + 0.2)/2) = 0.9710
        assert_eq!(m.k_star, 2);
        assert_eq!(m.r_max, 25.0);
        assert!(m.formula_valid);
        let continuous = 0.1f64.ln() / 0.2f64.ln();
        assert!((m.k_star as f64 - continuous).abs() < 1.0);

        let m = redundancy_max(&perfect(3, 5), delta(1.0)).unwrap();
        assert_eq!(m.r_max, 8.0);

        let weak = EnvironmentSpec::new(2, 5, 0.9, 1.0, 0.5).unwrap();
        assert!(matches!(
            redundancy_max(&weak, delta(0.1)),
            Err(Error::DeficitUnreachable { .. })
        ));
        let strong = EnvironmentSpec::new(9, 5, 0.05, 1.0, 0.5).unwrap();
        let m = redundancy_max(&strong, delta(0.1)).unwrap();
        assert_eq!((m.k_star, m.r_max, m.formula_valid), (1, 9.0, false));
    }

    #[test]
    fn redundancy_max_ignores_bad_pool() {
        for b in [0, 10, 1000, 1_000_000] {
            assert_eq!(redundancy_max(&perfect(12, b), delta(0.1)).unwrap().r_max, 12.0);
        }
    }

    #[test]
    fn mc_examples() {
        let blind = EnvironmentSpec::new(4, 6, 1.0, 1.0, 0.5).unwrap();
        let mc = mc_avg_holevo(&blind, 5, 1000, 3).unwrap();
        assert_eq!((mc.estimate.value(), mc.stderr), (0.0, 0.0));

        let spec = EnvironmentSpec::new(3, 7, 0.0, 1.0, 0.3).unwrap();
        let mc = mc_avg_holevo(&spec, 10, 500, 11).unwrap();
        assert_eq!(mc.estimate, spec.pointer_entropy());
        assert_eq!(mc.stderr, 0.0);

        assert!(matches!(mc_avg_holevo(&spec, 3, 1, 0), Err(Error::TooFewSamples(1))));
        assert!(mc_avg_holevo(&spec, 11, 10, 0).is_err());
    }

    #[test]
    fn mc_deterministic_per_seed() {
        let spec = EnvironmentSpec::new(6, 6, 0.3, 0.8, 0.5).unwrap();
        let a = mc_avg_holevo(&spec, 5, 2000, 42).unwrap();
        let b = mc_avg_holevo(&spec, 5, 2000, 42).unwrap();
        let c = mc_avg_holevo(&spec, 5, 2000, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    /// Standard error of the mean of `n_samples` draws, from the exact
    /// composition law rather than the sample.
    fn exact_stderr(spec: &EnvironmentSpec, f: u64, n_samples: u64) -> f64 {
        let terms = hypergeometric_terms(spec, f).unwrap();
        let mean: f64 = terms.iter().map(|&(k, p)| p * holevo_of(spec, f, k)).sum();
        let var: f64 = terms.iter().map(|&(k, p)| p * (holevo_of(spec, f, k) - mean).powi(2)).sum();
        (var / n_samples as f64).sqrt()
    }

    #[test]
    fn mc_tracks_exact_curve() {
        // Near saturation the remaining deficit comes from compositions with
        // probabilities below 1/n_samples. One such draw moves the mean by
        // several standard errors, so a few sizes may sit outside 4σ; the
        // sample stderr also misses that spread, hence the exact σ.
        let spec = EnvironmentSpec::new(50, 50, 0.2, 1.0, 0.5).unwrap();
        let n_samples = 100_000;
        let curve = InfoCurve::monte_carlo(&spec, 0..=100, n_samples, 7).unwrap();
        let mut within = 0;
        for p in &curve.entries {
            let f = p.fragment_size;
            let exact = avg_holevo_exact(&spec, f).unwrap().value();
            let err = (p.avg_info.value() - exact).abs();
            let se = exact_stderr(&spec, f, n_samples);
            assert!(err <= 10.0 * se + 1e-15, "F={f} mc={} exact={exact} se={se}", p.avg_info.value());
            if err <= 4.0 * se + 1e-15 {
                within += 1;
            }
        }
        assert!(within >= 96, "{within} of 101 within 4 standard errors");
    }

    #[test]
    fn stirling_examples() {
        let s = stirling_fragment_size(&perfect(4, 96), delta(0.1)).unwrap();
        assert_abs_diff_eq!(s, 96.0 * 10f64.ln() / 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s, 55.262, epsilon = 1e-3);
        let s = stirling_fragment_size(&perfect(30, 30), delta((-1.0f64).exp())).unwrap();
        assert_abs_diff_eq!(s, 1.0, epsilon = 1e-12);
        assert!(stirling_fragment_size(&perfect(0, 30), delta(0.1)).is_err());
        let imperfect = EnvironmentSpec::new(3, 30, 0.5, 1.0, 0.5).unwrap();
        assert!(stirling_fragment_size(&imperfect, delta(0.1)).is_err());
    }

    #[test]
    fn stirling_error_settles_with_bad_pool() {
        // At fixed n_good the exact size tends to n(1 − δ^{1/n_good}), so the
        // relative error of the Stirling form approaches a nonzero limit
        // that shrinks as n_good grows.
        let limit = |g: f64| 10f64.ln() / g / (1.0 - 0.1f64.powf(1.0 / g)) - 1.0;
        let rel_err = |g: u64, b: u64| {
            let spec = perfect(g, b);
            let exact = find_fragment_size(&spec, delta(0.1)).unwrap().size as f64;
            let approx = stirling_fragment_size(&spec, delta(0.1)).unwrap();
            (approx - exact).abs() / exact
        };
        let gaps: Vec<f64> = [100u64, 1_000, 10_000]
            .iter()
            .map(|&b| (rel_err(4, b) - limit(4.0)).abs())
            .collect();
        assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2] && gaps[2] < 1e-3, "{gaps:?}");
        assert!(rel_err(40, 40_000) < rel_err(4, 4_000) / 5.0);
    }

    #[test]
    fn gbperf_ratio_in_band_for_larger_good_pools() {
        for g in [10u64, 50, 1000] {
            for mult in [100u64, 1000] {
                let spec = perfect(g, g * mult);
                let r = redundancy_avg(&spec, delta(0.1)).unwrap().r_avg;
                let ratio = r * 10f64.ln() / g as f64;
                assert!((0.8..=1.25).contains(&ratio), "{g} {mult}: {ratio}");
            }
        }
    }

    #[test]
    fn avg_over_max_approaches_inverse_log() {
        let d = delta(0.01);
        let spec = perfect(1000, 1_000_000);
        let ratio = redundancy_avg(&spec, d).unwrap().r_avg / redundancy_max(&spec, d).unwrap().r_max;
        assert!((ratio * d.log_inverse() - 1.0).abs() < 0.01, "{ratio}");
    }

    #[test]
    fn curves_are_well_formed() {
        let spec = EnvironmentSpec::new(5, 20, 0.3, 1.0, 0.4).unwrap();
        let hs = spec.pointer_entropy();
        assert!(InfoCurve::exact(&spec, 0..=25).unwrap().is_well_formed(hs));
        assert!(InfoCurve::qcb(&spec, 0..=25).unwrap().is_well_formed(hs));
        assert!(InfoCurve::monte_carlo(&spec, 3..=9, 100, 1).unwrap().is_well_formed(hs));
        assert!(InfoCurve::exact(&spec, 0..=26).is_err());
    }

    #[test]
    fn fragment_size_shifts_with_p0_only_for_imperfect_records() {
        let size = |ng, nb, gg, gb, p0| {
            let spec = EnvironmentSpec::new(ng, nb, gg, gb, p0).unwrap();
            find_fragment_size(&spec, delta(0.1)).unwrap().size
        };
        for p0 in [0.5, 0.3, 0.1, 0.02] {
            assert_eq!(size(4, 96, 0.0, 1.0, p0), 44);
        }
        // mpmath oracle: skewed pointer states need slightly larger fragments.
        let got: Vec<u64> = [0.5, 0.3, 0.1, 0.02].map(|p0| size(10, 90, 0.5, 0.95, p0)).to_vec();
        assert_eq!(got, [20, 20, 21, 21]);
        let got: Vec<u64> = [0.5, 0.3, 0.1, 0.02].map(|p0| size(5, 200, 0.3, 0.9, p0)).to_vec();
        assert_eq!(got, [17, 17, 17, 18]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn exact_curve_monotone(
            n_good in 0u64..30,
            n_bad in 0u64..300,
            gg in 0.0f64..=1.0,
            gb in 0.0f64..=1.0,
            p0 in 0.0f64..=1.0,
        ) {
            prop_assume!(n_good + n_bad > 0);
            let spec = EnvironmentSpec::new(n_good, n_bad, gg, gb, p0).unwrap();
            let hs = spec.pointer_entropy().value();
            let mut prev = 0.0;
            for f in 0..=spec.n_total() {
                let v = avg_holevo_exact(&spec, f).unwrap().value();
                prop_assert!(v >= prev - 1e-12, "F={} {} < {}", f, v, prev);
                prop_assert!(v <= hs + 1e-12);
                prev = v;
            }
        }
    }
}
