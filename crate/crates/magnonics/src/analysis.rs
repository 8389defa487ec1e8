//! Steady-state analysis: cavity transmission spectra, two-tone squeezing
//! cooperativity, and the quadrature variance of the squeezed magnon mode,
//! with the validity checks that gate the squeezing estimate.

use num_complex::Complex64;

use crate::dynamics::{DeviceConfig, DriveSpec};
use crate::error::{Error, Result};

/// Inputs for the two-tone squeezing estimate.
///
/// `n_minus` is the circulating population driven by the red-detuned tone;
/// the squeezing interaction is beam-splitter-enhanced by that population.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezingInputs {
    /// Red-tone circulating magnon population n₋.
    pub n_minus: f64,
    /// Bare magnon-resonator coupling g_XZ1 (rad/s).
    pub g_xz1: f64,
    /// Total fundamental-mode damping κ_r1 (rad/s).
    pub kappa_r1: f64,
    /// Total magnon damping κ_m (rad/s).
    pub kappa_m: f64,
    /// Thermal occupation of the fundamental mode.
    pub n_th: f64,
}

impl SqueezingInputs {
    // Comparisons are negated so NaN inputs fail validation too.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        if !(self.n_minus >= 0.0) {
            return Err(Error::invalid("n_minus", "must be >= 0", self.n_minus));
        }
        if !(self.g_xz1 >= 0.0) {
            return Err(Error::invalid("g_xz1", "must be >= 0", self.g_xz1));
        }
        if !(self.kappa_r1 > 0.0) {
            return Err(Error::invalid("kappa_r1", "must be > 0", self.kappa_r1));
        }
        if !(self.kappa_m > 0.0) {
            return Err(Error::invalid("kappa_m", "must be > 0", self.kappa_m));
        }
        if !(self.n_th >= 0.0) {
            return Err(Error::invalid("n_th", "must be >= 0", self.n_th));
        }
        Ok(())
    }
}

/// Enhanced cooperativity C = n₋ g_XZ1² / (κ_r1 κ_m).
pub fn cooperativity(inputs: &SqueezingInputs) -> Result<f64> {
    inputs.validate()?;
    Ok(inputs.n_minus * inputs.g_xz1 * inputs.g_xz1 / (inputs.kappa_r1 * inputs.kappa_m))
}

/// Squeezed quadrature variance of the magnon mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceResult {
    /// 2⟨ΔX₁²⟩; 1 is the vacuum level, < 1 is squeezed.
    pub variance: f64,
    /// Squeezing below vacuum in dB, −10 log₁₀(variance).
    pub squeezing_db: f64,
    /// True when C < 10 and the adiabatic estimate is only indicative.
    pub below_validity: bool,
}

/// Variance of the squeezed magnon quadrature in the adiabatic limit,
///
///   2⟨ΔX₁²⟩ = (κ_r1/κ_m)(2 n_th + 1) + sqrt((2 n_th + 1)/C).
///
/// The first term is thermal noise fed through the resonator, the second the
/// measurement backaction floor. C = 0 carries no squeezing and the
/// expression diverges; that is reported as an error.
pub fn squeezed_variance(inputs: &SqueezingInputs) -> Result<VarianceResult> {
    let coop = cooperativity(inputs)?;
    if coop == 0.0 {
        return Err(Error::DivergentVariance);
    }
    let photons = 2.0 * inputs.n_th + 1.0;
    let variance = (inputs.kappa_r1 / inputs.kappa_m) * photons + (photons / coop).sqrt();
    Ok(VarianceResult {
        variance,
        squeezing_db: -10.0 * variance.log10(),
        below_validity: coop < 10.0,
    })
}

/// Validity thresholds for the squeezing estimate.
const POPULATION_LIMIT: f64 = 0.01;
const KERR_LIMIT: f64 = 1.0;
const COOPERATIVITY_FLOOR: f64 = 10.0;
const SIDEBAND_LIMIT: f64 = 1.0;

/// Ratios that bound the validity of the squeezing analysis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezingValidity {
    /// n₋ / N, drive population against the total spin number.
    pub population_ratio: f64,
    /// Population ratio is below 1% (linearized magnon holds).
    pub population_ok: bool,
    /// |K| n₋ / κ_m, Kerr shift against the magnon linewidth.
    pub kerr_ratio: f64,
    /// Kerr shift stays within one linewidth.
    pub kerr_ok: bool,
    /// Enhanced cooperativity C.
    pub cooperativity: f64,
    /// C ≥ 10.
    pub cooperativity_ok: bool,
    /// κ_m / ω_r1; the adiabatic treatment needs this below 1.
    pub sideband_ratio: f64,
    /// Sideband ratio is below 1.
    pub sideband_ok: bool,
}

impl SqueezingValidity {
    pub fn all_ok(&self) -> bool {
        self.population_ok && self.kerr_ok && self.cooperativity_ok && self.sideband_ok
    }
}

/// Evaluate the squeezing validity ratios for a device at a drive point.
pub fn squeezing_validity(
    device: &DeviceConfig,
    drive: &DriveSpec,
    inputs: &SqueezingInputs,
) -> Result<SqueezingValidity> {
    device.validate()?;
    drive.validate()?;
    inputs.validate()?;
    let spins = device.magnet.spin_count();
    if spins <= 0.0 {
        return Err(Error::invalid("spin_count", "must be > 0", spins));
    }
    let population_ratio = inputs.n_minus / spins;
    let kerr_ratio = device.magnet.kerr_shift(inputs.n_minus).abs() / inputs.kappa_m;
    let coop = cooperativity(inputs)?;
    let sideband_ratio = inputs.kappa_m / device.resonator.omega_r1();
    Ok(SqueezingValidity {
        population_ratio,
        population_ok: population_ratio <= POPULATION_LIMIT,
        kerr_ratio,
        kerr_ok: kerr_ratio <= KERR_LIMIT,
        cooperativity: coop,
        cooperativity_ok: coop >= COOPERATIVITY_FLOOR,
        sideband_ratio,
        sideband_ok: sideband_ratio <= SIDEBAND_LIMIT,
    })
}

/// One point of a transmission spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumPoint {
    /// Probe frequency (rad/s).
    pub omega_p: f64,
    /// Complex transmission S21.
    pub s21: Complex64,
}

/// Side-coupled notch transmission around a single resonance,
///
///   S21(ω_p) = 1 − (κ_ext/2) / (i(ω_p − ω_r) + κ_tot/2),
///
/// evaluated on `probe_grid`. The effective resonance parameters already
/// include any backaction shifts. Requires κ_ext ≤ κ_tot.
// Comparisons are negated so NaN inputs are rejected too.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn s21_spectrum(
    omega_r_eff: f64,
    kappa_total_eff: f64,
    kappa_ext: f64,
    probe_grid: &[f64],
) -> Result<Vec<SpectrumPoint>> {
    if !(omega_r_eff > 0.0) {
        return Err(Error::invalid("omega_r_eff", "must be > 0", omega_r_eff));
    }
    if !(kappa_total_eff > 0.0) {
        return Err(Error::invalid(
            "kappa_total_eff",
            "must be > 0",
            kappa_total_eff,
        ));
    }
    if !(kappa_ext >= 0.0) {
        return Err(Error::invalid("kappa_ext", "must be >= 0", kappa_ext));
    }
    if kappa_ext > kappa_total_eff {
        return Err(Error::Unphysical(format!(
            "external coupling {kappa_ext:.3e} rad/s exceeds the total linewidth \
             {kappa_total_eff:.3e} rad/s"
        )));
    }
    Ok(probe_grid
        .iter()
        .map(|&omega_p| SpectrumPoint {
            omega_p,
            s21: Complex64::new(1.0, 0.0)
                - Complex64::new(kappa_ext / 2.0, 0.0)
                    / Complex64::new(kappa_total_eff / 2.0, omega_p - omega_r_eff),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{DrivePort, Geometry, ValidityThresholds};
    use crate::magnon::MagnetSpec;
    use crate::resonator::ResonatorSpec;
    use std::f64::consts::PI;

    fn inputs(n_minus: f64, n_th: f64, ratio: f64) -> SqueezingInputs {
        // κ_m fixed at 2π×4 MHz; κ_r1 set by the requested κ_r1/κ_m ratio;
        // g chosen to land on the requested cooperativity through n_minus.
        let kappa_m = 2.0 * PI * 4e6;
        SqueezingInputs {
            n_minus,
            g_xz1: 2.0 * PI * 12.835,
            kappa_r1: ratio * kappa_m,
            kappa_m,
            n_th,
        }
    }

    fn coop_inputs(c_target: f64, n_th: f64, ratio: f64) -> SqueezingInputs {
        let mut base = inputs(1.0, n_th, ratio);
        base.n_minus = c_target * base.kappa_r1 * base.kappa_m / (base.g_xz1 * base.g_xz1);
        base
    }

    #[test]
    fn cooperativity_reference_point() {
        let si = SqueezingInputs {
            n_minus: 4.8e7,
            g_xz1: 2.0 * PI * 12.835,
            kappa_r1: 2.0 * PI * 1e3,
            kappa_m: 2.0 * PI * 4e6,
            n_th: 0.0,
        };
        let c = cooperativity(&si).unwrap();
        assert!((c - 1.977).abs() < 0.01, "C = {c}");
    }

    #[test]
    fn variance_reference_point() {
        let si = coop_inputs(7.9, 0.10, 2.5e-4);
        let out = squeezed_variance(&si).unwrap();
        assert!(
            (out.variance - 0.390042).abs() / 0.390042 < 1e-4,
            "variance {}",
            out.variance
        );
        assert!((out.squeezing_db - 4.0889).abs() < 2e-3, "dB {}", out.squeezing_db);
        assert!(out.below_validity, "C = 7.9 is below the validity floor");
    }

    #[test]
    fn variance_flag_clears_above_floor() {
        let si = coop_inputs(12.0, 0.10, 2.5e-4);
        assert!(!squeezed_variance(&si).unwrap().below_validity);
    }

    #[test]
    fn zero_cooperativity_diverges() {
        let si = inputs(0.0, 0.1, 2.5e-4);
        assert!(matches!(
            squeezed_variance(&si),
            Err(Error::DivergentVariance)
        ));
    }

    #[test]
    fn variance_monotone_in_cooperativity() {
        let mut last = f64::INFINITY;
        for c in [1.0, 2.0, 5.0, 10.0, 50.0, 200.0] {
            let v = squeezed_variance(&coop_inputs(c, 0.1, 2.5e-4))
                .unwrap()
                .variance;
            assert!(v < last, "variance must fall as C grows");
            last = v;
        }
    }

    #[test]
    fn variance_monotone_in_thermal_occupation_and_ratio() {
        let v0 = squeezed_variance(&coop_inputs(7.9, 0.05, 2.5e-4)).unwrap();
        let v1 = squeezed_variance(&coop_inputs(7.9, 0.10, 2.5e-4)).unwrap();
        assert!(v1.variance > v0.variance);
        let r0 = squeezed_variance(&coop_inputs(7.9, 0.10, 2.5e-4)).unwrap();
        let r1 = squeezed_variance(&coop_inputs(7.9, 0.10, 5.0e-4)).unwrap();
        assert!(r1.variance > r0.variance);
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        let mut si = inputs(1.0, 0.1, 2.5e-4);
        si.kappa_m = 0.0;
        assert!(squeezed_variance(&si).is_err());
        let mut si = inputs(1.0, 0.1, 2.5e-4);
        si.n_minus = -1.0;
        assert!(cooperativity(&si).is_err());
    }

    #[test]
    fn s21_is_half_at_critical_symmetric_coupling() {
        let omega_r = 2.0 * PI * 500e6;
        let kappa = 2.0 * PI * 1e3;
        let pts = s21_spectrum(omega_r, kappa, kappa / 2.0, &[omega_r]).unwrap();
        assert!((pts[0].s21.norm() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn s21_is_unity_without_external_coupling() {
        let omega_r = 2.0 * PI * 500e6;
        let kappa = 2.0 * PI * 1e3;
        let grid: Vec<f64> = (0..101)
            .map(|i| omega_r + 2.0 * PI * (i as f64 - 50.0) * 100.0)
            .collect();
        for p in s21_spectrum(omega_r, kappa, 0.0, &grid).unwrap() {
            assert!((p.s21.norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn s21_minimum_sits_at_resonance() {
        let omega_r = 2.0 * PI * 500e6;
        let kappa = 2.0 * PI * 10e3;
        let grid: Vec<f64> = (0..1001)
            .map(|i| omega_r + 2.0 * PI * (i as f64 - 500.0) * 37.0)
            .collect();
        let pts = s21_spectrum(omega_r, kappa, kappa * 0.6, &grid).unwrap();
        let min_idx = pts
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.s21.norm().total_cmp(&b.1.s21.norm()))
            .unwrap()
            .0;
        let nearest = grid
            .iter()
            .enumerate()
            .min_by(|a, b| {
                (a.1 - omega_r).abs().total_cmp(&(b.1 - omega_r).abs())
            })
            .unwrap()
            .0;
        assert_eq!(min_idx, nearest);
    }

    #[test]
    fn s21_rejects_overcoupled_input() {
        assert!(s21_spectrum(1e9, 1e3, 2e3, &[1e9]).is_err());
    }

    #[test]
    fn validity_report_reference_device() {
        let device = DeviceConfig {
            geometry: Geometry::TopCpw,
            resonator: ResonatorSpec {
                z0: 50.0,
                mode_freqs: vec![2.0 * PI * 500e6],
                kappa_internal: vec![2.0 * PI * 500.0],
                coupling_capacitance: None,
                kappa_ext_calibration: None,
                kappa_ext_override: Some(vec![Some(2.0 * PI * 500.0)]),
            },
            magnet: MagnetSpec::yig(),
            wire_width: 5e-6,
            kappa_m_internal: 2.0 * PI * 2e6,
            kappa_m_ext_override: Some(2.0 * PI * 2e6),
            apply_anisotropy: false,
            thresholds: ValidityThresholds::default(),
        };
        let drive = DriveSpec {
            power: crate::constants::dbm_to_watts(-10.0),
            omega_d: 2.0 * PI * 20e9,
            port: DrivePort::MagnonLine,
        };
        let si = SqueezingInputs {
            n_minus: 4.8e7,
            g_xz1: crate::magnon::g_xz(&device),
            kappa_r1: 2.0 * PI * 1e3,
            kappa_m: 2.0 * PI * 4e6,
            n_th: 0.10,
        };
        let report = squeezing_validity(&device, &drive, &si).unwrap();
        // n₋/N ≈ 4.8e7/3.77e11 ≈ 1.3e-4, comfortably linear.
        assert!(report.population_ok);
        assert!(report.population_ratio < 1e-3);
        // Kerr shift 2π×0.01 Hz × 4.8e7 = 2π×0.48 MHz, inside κ_m.
        assert!(report.kerr_ok);
        assert!((report.kerr_ratio - 0.12).abs() < 0.01);
        // C ≈ 2 at this drive, below the squeezing floor.
        assert!(!report.cooperativity_ok);
        assert!(report.sideband_ok);
        assert!(!report.all_ok());
    }
}
