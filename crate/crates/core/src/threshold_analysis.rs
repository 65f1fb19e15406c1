//! Critical couplings in closed form, scenario classification, and a
//! transfer-matrix locator for the boundary-flip transition.
//!
//! Field magnitudes here are the ferromagnetic strength `|h|`; the physical
//! field entering `exp(−H)` is `−|h|`.

use num_complex::Complex64;

use crate::dual_map::build_dual;
use crate::error::{Error, Result};
use crate::exact_engine::{boundary_flip_ratio, correlation_quad_transfer};
use crate::geometry::{Lattice, SyndromeSet};
use crate::noise_model::make_homogeneous;

/// `ln(1+√2)/2`, the bulk critical field of the square-lattice Ising model.
pub fn critical_h_real() -> f64 {
    std::f64::consts::SQRT_2.ln_1p() / 2.0
}

/// `ln(1+√2)/4`: perpendicular pairs double onto each diagonal bond.
pub fn critical_j_nn() -> f64 {
    critical_h_real() / 2.0
}

/// Solution of `sinh²(2h) = e^{−iθ}` with `Re h ≥ 0`.
///
/// `θ` is reduced to `[0, 2π)`. On `[0, π)` this is `½ asinh(e^{−iθ/2})`, on
/// `[π, 2π)` it is `½ asinh(−e^{−iθ/2})`, so `h(2π − θ) = conj h(θ)`. The two
/// branches meet at `θ = π` up to the period `h ≡ h + iπ/2` of the curve
/// equation; the returned value jumps from `−iπ/4` to `+iπ/4` there.
pub fn critical_h_complex(theta: f64) -> Complex64 {
    let tau = std::f64::consts::TAU;
    let theta = theta.rem_euclid(tau);
    if theta == 0.0 {
        return Complex64::new(critical_h_real(), 0.0);
    }
    if theta == std::f64::consts::PI {
        return Complex64::new(0.0, std::f64::consts::FRAC_PI_4);
    }
    let w = Complex64::from_polar(1.0, -theta / 2.0);
    let w = if theta < std::f64::consts::PI { w } else { -w };
    w.asinh() / 2.0
}

/// Critical partner `h₂` of a two-value field distribution, in both readings
/// of the duality criterion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoValueCritical {
    /// `(e^{h₁} − 1)(e^{h₂} − 1) = 2`.
    pub printed: f64,
    /// `(e^{2h₁} − 1)(e^{2h₂} − 1) = 2`.
    pub doubled: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwoValueConvention {
    Printed,
    Doubled,
}

impl TwoValueConvention {
    pub fn name(self) -> &'static str {
        match self {
            Self::Printed => "printed (e^h1-1)(e^h2-1)=2",
            Self::Doubled => "doubled (e^2h1-1)(e^2h2-1)=2",
        }
    }
}

impl TwoValueCritical {
    pub fn get(&self, convention: TwoValueConvention) -> f64 {
        match convention {
            TwoValueConvention::Printed => self.printed,
            TwoValueConvention::Doubled => self.doubled,
        }
    }
}

pub fn two_value_critical(h1: f64) -> Result<TwoValueCritical> {
    if !(h1 > 0.0 && h1.is_finite()) {
        return Err(Error::InvalidDistribution(format!("two-value criterion has no solution for h1 = {h1}")));
    }
    Ok(TwoValueCritical {
        printed: (2.0 / h1.exp_m1()).ln_1p(),
        doubled: (2.0 / (2.0 * h1).exp_m1()).ln_1p() / 2.0,
    })
}

/// Symmetric-point threshold of each convention (`h₁ = h₂`).
pub fn two_value_symmetric(convention: TwoValueConvention) -> f64 {
    match convention {
        TwoValueConvention::Printed => std::f64::consts::SQRT_2.ln_1p(),
        TwoValueConvention::Doubled => critical_h_real(),
    }
}

/// The convention whose symmetric-point threshold lies within `rel_tol` of a
/// measured `h_c`, if exactly one does.
pub fn adjudicate_two_value(measured: f64, rel_tol: f64) -> Option<TwoValueConvention> {
    let hits: Vec<TwoValueConvention> = [TwoValueConvention::Printed, TwoValueConvention::Doubled]
        .into_iter()
        .filter(|&c| ((measured - two_value_symmetric(c)) / two_value_symmetric(c)).abs() <= rel_tol)
        .collect();
    match hits.as_slice() {
        [one] => Some(*one),
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    HomogeneousH,
    HomogeneousJ,
    ComplexH,
    TwoValue,
    Diluted,
    SignedRandom,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Self::HomogeneousH => "homogeneous_h",
            Self::HomogeneousJ => "homogeneous_J",
            Self::ComplexH => "complex_h",
            Self::TwoValue => "two_value",
            Self::Diluted => "diluted",
            Self::SignedRandom => "signed_random",
        }
    }
}

/// Qualitative regions of the signed-random toy distribution. Boundaries
/// between them are not known quantitatively.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignedRandomRegion {
    CleanControlled,
    NearNishimori,
    UnknownStrongDisorder,
}

impl SignedRandomRegion {
    pub fn name(self) -> &'static str {
        match self {
            Self::CleanControlled => "clean-controlled",
            Self::NearNishimori => "near-Nishimori",
            Self::UnknownStrongDisorder => "unknown-strong-disorder",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalPrediction {
    pub scenario: Scenario,
    /// Critical coupling magnitude, when one is known.
    pub critical_value: Option<Complex64>,
    /// `None` where no statement can be made.
    pub ordered_phase_exists: Option<bool>,
    pub region: Option<SignedRandomRegion>,
    pub notes: String,
}

pub fn predict_homogeneous_h() -> CriticalPrediction {
    CriticalPrediction {
        scenario: Scenario::HomogeneousH,
        critical_value: Some(Complex64::new(critical_h_real(), 0.0)),
        ordered_phase_exists: Some(true),
        region: None,
        notes: "bulk Ising transition at sinh(2|h|) = 1".into(),
    }
}

pub fn predict_homogeneous_j() -> CriticalPrediction {
    CriticalPrediction {
        scenario: Scenario::HomogeneousJ,
        critical_value: Some(Complex64::new(critical_j_nn(), 0.0)),
        ordered_phase_exists: Some(true),
        region: None,
        notes: "diagonal dual bonds carry 2J; two decoupled sublattices order at 2|J| = ln(1+sqrt2)/2".into(),
    }
}

pub fn predict_complex_h(theta: f64) -> CriticalPrediction {
    CriticalPrediction {
        scenario: Scenario::ComplexH,
        critical_value: Some(critical_h_complex(theta)),
        ordered_phase_exists: Some(true),
        region: None,
        notes: format!("sinh^2(2h) = exp(-i theta), theta = {theta}"),
    }
}

pub fn predict_two_value(h1: f64) -> Result<CriticalPrediction> {
    let tv = two_value_critical(h1)?;
    Ok(CriticalPrediction {
        scenario: Scenario::TwoValue,
        critical_value: Some(Complex64::new(tv.doubled, 0.0)),
        ordered_phase_exists: Some(true),
        region: None,
        notes: format!(
            "h2 partner of h1 = {h1}: printed convention {:.10}, doubled convention {:.10}",
            tv.printed, tv.doubled
        ),
    })
}

/// Fields are removed independently with probability `d`; the surviving
/// nearest-neighbour dual bonds form a bond-percolation cluster that spans
/// only while more than half of them survive.
pub fn dilution_assessment(d: f64) -> Result<CriticalPrediction> {
    if !(0.0..=1.0).contains(&d) {
        return Err(Error::InvalidDistribution(format!("dilution {d} outside [0, 1]")));
    }
    if d == 0.0 {
        let mut p = predict_homogeneous_h();
        p.scenario = Scenario::Diluted;
        return Ok(p);
    }
    let exists = d < 0.5;
    let notes = if exists {
        format!("surviving bond fraction {:.3} exceeds the square-lattice percolation threshold 1/2; critical |h| exceeds the clean value", 1.0 - d)
    } else {
        format!("surviving bond fraction {:.3} is at or below the percolation threshold 1/2; no ordered phase at any |h|", 1.0 - d)
    };
    Ok(CriticalPrediction {
        scenario: Scenario::Diluted,
        critical_value: None,
        ordered_phase_exists: Some(exists),
        region: None,
        notes,
    })
}

/// Qualitative cut on the frustrated-field fraction below which the clean
/// fixed point is assumed to control the physics.
pub const SIGNED_RANDOM_SMALL_Q: f64 = 0.1;
/// Qualitative cut on `|h|` below which the same holds.
pub const SIGNED_RANDOM_SMALL_H: f64 = 1.0;
/// Qualitative cut on `q` above which strong disorder is assumed.
pub const SIGNED_RANDOM_LARGE_Q: f64 = 0.3;

/// Fields are `+h` (frustrating) with probability `q` and `−h`
/// (ferromagnetic) otherwise, with `h ≥ 0` a magnitude.
pub fn classify_signed_random(h: f64, q: f64) -> Result<CriticalPrediction> {
    if !(0.0..=1.0).contains(&q) || !h.is_finite() {
        return Err(Error::InvalidDistribution(format!("signed-random parameters h = {h}, q = {q}")));
    }
    let h = h.abs();
    let clean = Some(Complex64::new(critical_h_real(), 0.0));
    let (region, critical_value, ordered, notes) = if q == 0.0 {
        (SignedRandomRegion::CleanControlled, clean, Some(true), "no frustrated fields: homogeneous model".to_string())
    } else if q < SIGNED_RANDOM_SMALL_Q && h < SIGNED_RANDOM_SMALL_H {
        (
            SignedRandomRegion::CleanControlled,
            clean,
            Some(true),
            format!("qualitative: q < {SIGNED_RANDOM_SMALL_Q} and |h| < {SIGNED_RANDOM_SMALL_H}, clean threshold applies"),
        )
    } else if q >= SIGNED_RANDOM_LARGE_Q && h > critical_h_real() {
        (
            SignedRandomRegion::UnknownStrongDisorder,
            None,
            None,
            format!("qualitative: q >= {SIGNED_RANDOM_LARGE_Q} at strong fields; nothing is known, needs further investigation"),
        )
    } else {
        (
            SignedRandomRegion::NearNishimori,
            None,
            None,
            "qualitative: between the clean and strong-disorder regimes; Nishimori-point coordinates are not computed".into(),
        )
    };
    Ok(CriticalPrediction { scenario: Scenario::SignedRandom, critical_value, ordered_phase_exists: ordered, region: Some(region), notes })
}

/// `C(+,−)/C(+,+)` for the homogeneous field model of strength `|h|` on the
/// lattice whose dual strip has width `width` (distance `width + 1`).
pub fn boundary_flip_ratio_tm(width: usize, h: f64) -> Result<f64> {
    let lattice = Lattice::new(width + 1)?;
    let zero = Complex64::new(0.0, 0.0);
    let config = make_homogeneous(&lattice, Complex64::new(-h.abs(), 0.0), zero);
    let quad = correlation_quad_transfer(&build_dual(&lattice, &config)?, &SyndromeSet::empty())?;
    Ok(boundary_flip_ratio(&quad).re)
}

/// Smallest `|h|` where the boundary-flip ratio falls to `level`, found by
/// bisection on `[lo, hi]` to `tol`.
pub fn boundary_flip_onset(width: usize, level: f64, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let f = |h: f64| boundary_flip_ratio_tm(width, h).map(|r| r - level);
    let (mut a, mut b) = (lo, hi);
    let (fa, fb) = (f(a)?, f(b)?);
    if fa < 0.0 || fb > 0.0 {
        return Err(Error::InvalidScan(format!("ratio does not cross {level} on [{lo}, {hi}] at width {width}")));
    }
    while b - a > tol {
        let m = 0.5 * (a + b);
        if f(m)? > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Least-squares intercept of `y` against `1/x`.
pub fn extrapolate_inverse(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::InvalidScan("extrapolation needs at least two points".into()));
    }
    let n = points.len() as f64;
    let u: Vec<f64> = points.iter().map(|p| 1.0 / p.0).collect();
    let mu = u.iter().sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = u.iter().zip(points).map(|(a, p)| (a - mu) * (p.1 - my)).sum();
    let sxx: f64 = u.iter().map(|a| (a - mu).powi(2)).sum();
    Ok(my - sxy / sxx * mu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, PI};

    #[test]
    fn real_thresholds() {
        assert!((critical_h_real() - 0.440_686_793_509_771_5).abs() < 1e-15);
        assert!((2.0 * critical_h_real() - 1f64.asinh()).abs() < 1e-15);
        assert_eq!(critical_j_nn(), critical_h_real() / 2.0);
        assert!((critical_j_nn() - 0.22034).abs() < 1e-5);
    }

    #[test]
    fn complex_curve() {
        assert_eq!(critical_h_complex(0.0), Complex64::new(critical_h_real(), 0.0));
        assert_eq!(critical_h_complex(PI), Complex64::new(0.0, FRAC_PI_4));
        for k in 0..100 {
            let theta = 2.0 * PI * k as f64 / 100.0;
            let h = critical_h_complex(theta);
            let res = ((h * 2.0).sinh().powi(2) - Complex64::from_polar(1.0, -theta)).norm();
            assert!(res <= 1e-12, "theta {theta}: {res}");
            assert!(h.re >= 0.0);
        }
        let h = critical_h_complex(PI / 2.0);
        assert!(((h * 2.0).sinh().powi(2).norm() - 1.0).abs() < 1e-14);
        let a = critical_h_complex(1.0);
        let b = critical_h_complex(2.0 * PI - 1.0);
        assert!((a - b.conj()).norm() < 1e-15);
    }

    #[test]
    fn two_value() {
        let s = two_value_critical(std::f64::consts::SQRT_2.ln_1p()).unwrap();
        assert!((s.printed - std::f64::consts::SQRT_2.ln_1p()).abs() < 1e-14);
        let d = two_value_critical(critical_h_real()).unwrap();
        assert!((d.doubled - critical_h_real()).abs() < 1e-14);
        let t = two_value_critical(0.6).unwrap();
        assert!(((0.6f64.exp() - 1.0) * (t.printed.exp() - 1.0) - 2.0).abs() < 1e-12);
        assert!(((1.2f64.exp() - 1.0) * ((2.0 * t.doubled).exp() - 1.0) - 2.0).abs() < 1e-12);
        assert!(two_value_critical(0.0).is_err());
        assert!(two_value_critical(-1.0).is_err());
        assert_eq!(adjudicate_two_value(0.45, 0.1), Some(TwoValueConvention::Doubled));
        assert_eq!(adjudicate_two_value(0.9, 0.1), Some(TwoValueConvention::Printed));
        assert_eq!(adjudicate_two_value(0.65, 0.1), None);
    }

    #[test]
    fn dilution() {
        assert_eq!(dilution_assessment(0.6).unwrap().ordered_phase_exists, Some(false));
        let zero = dilution_assessment(0.0).unwrap();
        assert_eq!(zero.critical_value, predict_homogeneous_h().critical_value);
        let mut seen_false = false;
        for k in 0..=100 {
            let e = dilution_assessment(k as f64 / 100.0).unwrap().ordered_phase_exists.unwrap();
            assert!(!(seen_false && e));
            seen_false |= !e;
        }
        assert!(dilution_assessment(1.5).is_err());
    }

    #[test]
    fn signed_random() {
        let zero = classify_signed_random(0.3, 0.0).unwrap();
        assert_eq!(zero.region, Some(SignedRandomRegion::CleanControlled));
        assert_eq!(zero.critical_value, predict_homogeneous_h().critical_value);
        let strong = classify_signed_random(2.0, 0.5).unwrap();
        assert_eq!(strong.region, Some(SignedRandomRegion::UnknownStrongDisorder));
        assert_eq!(strong.ordered_phase_exists, None);
        let clean = classify_signed_random(0.2, 0.05).unwrap();
        assert_eq!(clean.region, Some(SignedRandomRegion::CleanControlled));
        assert_eq!(clean.critical_value.unwrap().re, critical_h_real());
        assert_eq!(classify_signed_random(0.5, 0.15).unwrap().region, Some(SignedRandomRegion::NearNishimori));
        assert!(classify_signed_random(0.5, 1.5).is_err());
    }

    #[test]
    fn extrapolation_recovers_line() {
        let pts: Vec<(f64, f64)> = [8.0, 12.0, 16.0].iter().map(|&w| (w, 0.44 - 0.1 / w)).collect();
        assert!((extrapolate_inverse(&pts).unwrap() - 0.44).abs() < 1e-14);
    }

    #[test]
    fn onset_is_bracketed() {
        let h = boundary_flip_onset(4, 0.5, 0.2, 1.2, 1e-6).unwrap();
        let r = boundary_flip_ratio_tm(4, h).unwrap();
        assert!((r - 0.5).abs() < 1e-4);
    }
}
