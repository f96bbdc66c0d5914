//! Numeric constants of the inapproximability gap.

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

pub const DEFAULT_C_MIN: f64 = 0.5103;
pub const DEFAULT_C_MAX: f64 = 0.5155;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HardnessConstants {
    pub c_min: f64,
    pub c_max: f64,
    #[serde(serialize_with = "ser_rational")]
    pub alpha: Rational,
    /// `3 (c_min - 1/2)`
    pub beta: f64,
    /// `(c_max - c_min) / 3`
    pub gamma: f64,
    /// `(2 (1 + alpha) / 3)^(-gamma / 2.5)`
    pub mu: f64,
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&rational::to_string(r))
}

pub fn hardness_constants(alpha: &Rational, c_min: f64, c_max: f64) -> Result<HardnessConstants> {
    if c_min.is_nan() || c_min <= 0.5 {
        return Err(Error::Invalid(format!("c_min = {c_min} must exceed 0.5 (beta would not be positive)")));
    }
    if c_max.is_nan() || c_max <= c_min {
        return Err(Error::Invalid(format!("c_max = {c_max} must exceed c_min = {c_min}")));
    }
    let a = alpha.to_f64().ok_or_else(|| Error::Invalid("alpha is not representable".into()))?;
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::Invalid(format!("alpha = {alpha} must lie in (0, 1)")));
    }
    let beta = 3.0 * (c_min - 0.5);
    let gamma = (c_max - c_min) / 3.0;
    let mu = (-gamma / 2.5 * (2.0 * (1.0 + a) / 3.0).ln()).exp();
    Ok(HardnessConstants { c_min, c_max, alpha: alpha.clone(), beta, gamma, mu })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    #[test]
    fn headline_constants() {
        let c = hardness_constants(&frac(1, 3), DEFAULT_C_MIN, DEFAULT_C_MAX).unwrap();
        assert!((c.mu - 1.00008).abs() < 1e-5, "{}", c.mu);
        assert!((c.beta - 0.0309).abs() < 5e-4);
        assert!((c.gamma - 0.001733).abs() < 5e-5);
    }

    #[test]
    fn alpha_two_fifths() {
        let c = hardness_constants(&frac(2, 5), DEFAULT_C_MIN, DEFAULT_C_MAX).unwrap();
        // (14/15)^(-0.0052/7.5) evaluated independently.
        let expected = (14.0f64 / 15.0).powf(-(0.5155 - 0.5103) / 3.0 / 2.5);
        assert!((c.mu - expected).abs() < 1e-15);
        assert!((c.mu - 1.0000478).abs() < 1e-7);
    }

    #[test]
    fn rejects_bad_c() {
        assert!(hardness_constants(&frac(2, 5), 0.5, 0.6).is_err());
        assert!(hardness_constants(&frac(2, 5), 0.52, 0.51).is_err());
    }

    #[test]
    fn mu_exceeds_one_inside_interval() {
        for i in 1..100 {
            let alpha = frac(1, 3) + frac(i, 600);
            let c = hardness_constants(&alpha, DEFAULT_C_MIN, DEFAULT_C_MAX).unwrap();
            assert!(c.mu > 1.0);
        }
    }
}
