use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fragments::{redundancy_avg, redundancy_max};
use crate::model::{Deficit, EnvironmentSpec};
use crate::qcb::{redundancy_goodbad_expanded, redundancy_max_qcb, redundancy_qcb};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValidityFlag {
    QcbValid,
    MaxFormulaValid,
    DeficitUnreachable,
}

/// Every redundancy estimate for one spec and deficit.
///
/// Estimates that do not apply (the QCB forms at `δ = 1`, the expanded form
/// with `γ²_B ≠ 1`) are `None` and serialize as `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RedundancyReport {
    pub f_delta: u64,
    pub f_delta_interpolated: f64,
    pub r_avg: f64,
    pub r_max_discrete: Option<f64>,
    pub r_max_continuous: f64,
    pub r_qcb: Option<f64>,
    pub r_qcb_expanded: Option<f64>,
    pub ratio_avg_over_max: Option<f64>,
    pub validity_flags: Vec<ValidityFlag>,
}

impl RedundancyReport {
    pub fn has(&self, flag: ValidityFlag) -> bool {
        self.validity_flags.contains(&flag)
    }

    /// Builds the report. Fails with [`Error::DeficitUnreachable`] when no
    /// fragment reaches `(1 − δ) H_S`. If only the disjoint-fragment count is
    /// unreachable, `r_max_discrete` is `None` and the flag is set.
    pub fn compute(spec: &EnvironmentSpec, deficit: Deficit) -> Result<Self> {
        let avg = redundancy_avg(spec, deficit)?;
        let mut flags = Vec::new();
        let r_max_discrete = match redundancy_max(spec, deficit) {
            Ok(m) => {
                if m.formula_valid {
                    flags.push(ValidityFlag::MaxFormulaValid);
                }
                Some(m.r_max)
            }
            Err(Error::DeficitUnreachable { .. }) => {
                flags.push(ValidityFlag::DeficitUnreachable);
                None
            }
            Err(e) => return Err(e),
        };
        let r_qcb = match redundancy_qcb(spec, deficit) {
            Ok(q) => {
                if q.valid {
                    flags.push(ValidityFlag::QcbValid);
                }
                Some(q.value)
            }
            Err(Error::NotApplicable(_)) => None,
            Err(e) => return Err(e),
        };
        let r_qcb_expanded = redundancy_goodbad_expanded(spec, deficit).ok();
        let ratio_avg_over_max = r_max_discrete.filter(|&m| m > 0.0).map(|m| avg.r_avg / m);
        flags.sort();
        Ok(RedundancyReport {
            f_delta: avg.f_delta.size,
            f_delta_interpolated: avg.f_delta.interpolated,
            r_avg: avg.r_avg,
            r_max_discrete,
            r_max_continuous: redundancy_max_qcb(spec, deficit),
            r_qcb,
            r_qcb_expanded,
            ratio_avg_over_max,
            validity_flags: flags,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn delta(d: f64) -> Deficit {
        Deficit::new(d).unwrap()
    }

    #[test]
    fn small_perfect_instance() {
        let spec = EnvironmentSpec::perfect(2, 4).unwrap();
        let r = RedundancyReport::compute(&spec, delta(0.1)).unwrap();
        assert_eq!(r.f_delta, 4);
        assert_abs_diff_eq!(r.r_avg, 1.5, epsilon = 1e-15);
        assert_eq!(r.r_max_discrete, Some(2.0));
        assert_eq!(r.r_max_continuous, 2.0);
        assert_abs_diff_eq!(r.ratio_avg_over_max.unwrap(), 0.75, epsilon = 1e-15);
        // ξ̄ = -ln(1 - 2/6) and 2 < ln 10 is outside the valid region
        let want = 6.0 * -(-2.0f64 / 6.0).ln_1p() / 10f64.ln();
        assert_abs_diff_eq!(r.r_qcb.unwrap(), want, epsilon = 1e-12);
        assert_abs_diff_eq!(r.r_qcb_expanded.unwrap(), 2.0 / 10f64.ln(), epsilon = 1e-12);
        assert!(!r.has(ValidityFlag::QcbValid));
        assert!(!r.has(ValidityFlag::MaxFormulaValid));
    }

    #[test]
    fn total_deficit_gives_environment_size() {
        let spec = EnvironmentSpec::new(3, 9, 0.2, 1.0, 0.5).unwrap();
        let r = RedundancyReport::compute(&spec, delta(1.0)).unwrap();
        assert_eq!(r.f_delta, 1);
        assert_eq!(r.r_avg, 12.0);
        assert_eq!(r.r_max_discrete, Some(12.0));
        assert_eq!(r.r_qcb, None);
        assert_eq!(r.r_qcb_expanded, None);
    }

    #[test]
    fn unreachable_deficit() {
        let spec = EnvironmentSpec::perfect(0, 8).unwrap();
        assert!(matches!(
            RedundancyReport::compute(&spec, delta(0.5)),
            Err(Error::DeficitUnreachable { .. })
        ));
    }

    #[test]
    fn max_path_alone_unreachable() {
        // Imperfect bad spins add up to the target inside one big fragment,
        // but no set of good spins alone reaches it.
        let spec = EnvironmentSpec::new(1, 10, 0.7, 0.5, 0.5).unwrap();
        let r = RedundancyReport::compute(&spec, delta(0.1)).unwrap();
        assert_eq!(r.r_max_discrete, None);
        assert_eq!(r.ratio_avg_over_max, None);
        assert!(r.has(ValidityFlag::DeficitUnreachable));

        let spec = EnvironmentSpec::new(1, 5, 0.7, 1.0, 0.5).unwrap();
        assert!(matches!(
            RedundancyReport::compute(&spec, delta(0.1)),
            Err(Error::DeficitUnreachable { .. })
        ));
    }

    #[test]
    fn flags_serialize_snake_case() {
        let spec = EnvironmentSpec::new(50, 5000, 0.2, 1.0, 0.5).unwrap();
        let r = RedundancyReport::compute(&spec, delta(0.1)).unwrap();
        assert_eq!(r.validity_flags, vec![ValidityFlag::QcbValid, ValidityFlag::MaxFormulaValid]);
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["validity_flags"][0], "qcb_valid");
        assert_eq!(json["validity_flags"][1], "max_formula_valid");
        for key in [
            "f_delta",
            "r_avg",
            "r_max_discrete",
            "r_max_continuous",
            "r_qcb",
            "r_qcb_expanded",
            "ratio_avg_over_max",
        ] {
            assert!(json.get(key).is_some(), "{key}");
        }
    }
}
