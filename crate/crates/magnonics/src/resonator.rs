//! Circuit-level model of a λ/4 coplanar-waveguide resonator: lumped
//! equivalents, zero-point current, and external coupling of each harmonic.

use crate::error::{Error, Result};

/// Relative tolerance used to match a queried frequency against the mode list.
const MODE_MATCH_RTOL: f64 = 1e-9;

/// λ/4 CPW resonator description.
///
/// Mode frequencies are angular (rad/s) and strictly increasing; the first
/// entry is the fundamental ω_r1. External coupling may be given three ways,
/// resolved in this precedence order by [`ResonatorSpec::external_damping`]:
/// explicit per-mode override, then a calibration pair scaled as ω², then a
/// coupling capacitance.
#[derive(Debug, Clone, PartialEq)]
pub struct ResonatorSpec {
    /// Characteristic impedance Z₀ (Ω).
    pub z0: f64,
    /// Mode angular frequencies, increasing; `mode_freqs[0]` is ω_r1 (rad/s).
    pub mode_freqs: Vec<f64>,
    /// Internal damping rate per mode (rad/s), parallel to `mode_freqs`.
    pub kappa_internal: Vec<f64>,
    /// Feedline coupling capacitance C_c (F), if known.
    pub coupling_capacitance: Option<f64>,
    /// External-damping calibration pair `(kappa_ref, omega_ref)` (rad/s):
    /// a measured κ_ext at one mode, scaled to others as (ω/ω_ref)².
    pub kappa_ext_calibration: Option<(f64, f64)>,
    /// Explicit per-mode κ_ext override (rad/s); `None` entries fall through
    /// to the calibration pair or capacitance estimate.
    pub kappa_ext_override: Option<Vec<Option<f64>>>,
}

impl ResonatorSpec {
    /// Fundamental mode angular frequency ω_r1 (rad/s).
    pub fn omega_r1(&self) -> f64 {
        self.mode_freqs[0]
    }

    /// Validate the spec. Hard violations are errors; returns a list of
    /// warnings for soft issues (harmonics that are not odd multiples of the
    /// fundamental, as expected for a λ/4 line).
    pub fn validate(&self) -> Result<Vec<String>> {
        if self.z0 <= 0.0 {
            return Err(Error::invalid("z0", "must be > 0", self.z0));
        }
        if self.mode_freqs.is_empty() {
            return Err(Error::invalid("mode_freqs", "must be non-empty", 0.0));
        }
        for pair in self.mode_freqs.windows(2) {
            if pair[1] <= pair[0] {
                return Err(Error::invalid(
                    "mode_freqs",
                    "must be strictly increasing",
                    pair[1],
                ));
            }
        }
        if self.mode_freqs[0] <= 0.0 {
            return Err(Error::invalid(
                "mode_freqs",
                "must be positive",
                self.mode_freqs[0],
            ));
        }
        if self.kappa_internal.len() != self.mode_freqs.len() {
            return Err(Error::invalid(
                "kappa_internal",
                "must have one entry per mode",
                self.kappa_internal.len() as f64,
            ));
        }
        for &k in &self.kappa_internal {
            if k < 0.0 {
                return Err(Error::invalid("kappa_internal", "must be >= 0", k));
            }
        }
        if let Some(ov) = &self.kappa_ext_override {
            if ov.len() != self.mode_freqs.len() {
                return Err(Error::invalid(
                    "kappa_ext_override",
                    "must have one entry per mode",
                    ov.len() as f64,
                ));
            }
            for k in ov.iter().flatten() {
                if *k < 0.0 {
                    return Err(Error::invalid("kappa_ext_override", "must be >= 0", *k));
                }
            }
        }
        if let Some((kr, wr)) = self.kappa_ext_calibration {
            if kr < 0.0 || wr <= 0.0 {
                return Err(Error::invalid(
                    "kappa_ext_calibration",
                    "requires kappa_ref >= 0 and omega_ref > 0",
                    if wr <= 0.0 { wr } else { kr },
                ));
            }
        }
        if let Some(cc) = self.coupling_capacitance {
            if cc < 0.0 {
                return Err(Error::invalid("coupling_capacitance", "must be >= 0", cc));
            }
        }

        // λ/4 line: harmonics sit at odd multiples of the fundamental. A
        // mismatch is a warning, not an error (detuned modes are usable).
        let mut warnings = Vec::new();
        let w1 = self.omega_r1();
        for &w in &self.mode_freqs[1..] {
            let ratio = w / w1;
            let nearest_odd = 2.0 * ((ratio - 1.0) / 2.0).round() + 1.0;
            if (ratio - nearest_odd).abs() > 0.01 * ratio {
                warnings.push(format!(
                    "mode at {:.6e} Hz is {ratio:.3}x the fundamental, \
                     not an odd multiple as expected for a lambda/4 line",
                    w / (2.0 * std::f64::consts::PI)
                ));
            }
        }
        Ok(warnings)
    }

    /// Total line capacitance C_total = π/(2 Z₀ ω_r1) (F).
    pub fn total_capacitance(&self) -> f64 {
        std::f64::consts::PI / (2.0 * self.z0 * self.omega_r1())
    }

    /// Total line inductance L_total = C_total · Z₀² (H).
    pub fn total_inductance(&self) -> f64 {
        self.total_capacitance() * self.z0 * self.z0
    }

    /// Zero-point current fluctuation at the current antinode,
    /// I_ZPF = √(2ħ/(π Z₀)) · ω_r1 (A).
    pub fn i_zpf(&self) -> f64 {
        (2.0 * crate::constants::HBAR / (std::f64::consts::PI * self.z0)).sqrt() * self.omega_r1()
    }

    /// Zero-point flux fluctuation of the fundamental mode,
    /// Φ_ZPF = √(ħ/(2 C_total ω_r1)) = √(ħ Z₀/π) (Wb).
    pub fn phi_zpf(&self) -> f64 {
        (crate::constants::HBAR * self.z0 / std::f64::consts::PI).sqrt()
    }

    /// Index of the mode matching `omega` (rad/s), or an error if `omega` is
    /// not in the mode list.
    pub fn mode_index(&self, omega: f64) -> Result<usize> {
        self.mode_freqs
            .iter()
            .position(|&w| (w - omega).abs() <= MODE_MATCH_RTOL * w.abs())
            .ok_or(Error::InvalidParameter {
                name: "mode",
                message: "not a listed resonator mode",
                value: omega,
            })
    }

    /// External damping rate κ_ext of the mode at `omega` (rad/s).
    ///
    /// Resolution precedence: explicit override for that mode; else the
    /// calibration pair scaled as κ_ref (ω/ω_ref)² (the coupling capacitor
    /// acts as a high-pass filter); else κ_ext = Z₀ ω² C_c² / C_total.
    pub fn external_damping(&self, omega: f64) -> Result<f64> {
        let idx = self.mode_index(omega)?;
        if let Some(ov) = &self.kappa_ext_override {
            if let Some(k) = ov[idx] {
                return Ok(k);
            }
        }
        if let Some((kappa_ref, omega_ref)) = self.kappa_ext_calibration {
            let r = omega / omega_ref;
            return Ok(kappa_ref * r * r);
        }
        if let Some(cc) = self.coupling_capacitance {
            return Ok(self.z0 * omega * omega * cc * cc / self.total_capacitance());
        }
        Err(Error::Unphysical(
            "no external-coupling source: need kappa_ext_override, \
             kappa_ext_calibration, or coupling_capacitance"
                .into(),
        ))
    }

    /// Coupling quality factor Q_c = ω/κ_ext(ω) of the mode at `omega`.
    pub fn coupling_q(&self, omega: f64) -> Result<f64> {
        let kappa = self.external_damping(omega)?;
        if kappa == 0.0 {
            return Err(Error::Unphysical(
                "coupling Q undefined: external damping is zero".into(),
            ));
        }
        Ok(omega / kappa)
    }

    /// Total damping κ = κ_internal + κ_ext of the mode at `omega` (rad/s).
    pub fn total_damping(&self, omega: f64) -> Result<f64> {
        let idx = self.mode_index(omega)?;
        Ok(self.kappa_internal[idx] + self.external_damping(omega)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn single_mode(z0: f64, f1_hz: f64) -> ResonatorSpec {
        ResonatorSpec {
            z0,
            mode_freqs: vec![2.0 * PI * f1_hz],
            kappa_internal: vec![2.0 * PI * 500.0],
            coupling_capacitance: None,
            kappa_ext_calibration: None,
            kappa_ext_override: None,
        }
    }

    fn three_mode() -> ResonatorSpec {
        ResonatorSpec {
            z0: 50.0,
            mode_freqs: vec![2.0 * PI * 0.5e9, 2.0 * PI * 19.5e9, 2.0 * PI * 20.5e9],
            kappa_internal: vec![2.0 * PI * 500.0, 2.0 * PI * 20e3, 2.0 * PI * 20e3],
            coupling_capacitance: None,
            kappa_ext_calibration: Some((2.0 * PI * 2e6, 2.0 * PI * 19.5e9)),
            kappa_ext_override: None,
        }
    }

    #[test]
    fn total_capacitance_reference_point() {
        // 50 Ω, 500 MHz fundamental: C_total = 10 pF.
        let c = single_mode(50.0, 500e6).total_capacitance();
        assert!((c - 10e-12).abs() < 1e-18, "C_total = {c}");
        // C_total halves when the fundamental doubles, and scales as 1/Z0.
        assert!((single_mode(50.0, 1e9).total_capacitance() - c / 2.0).abs() < 1e-20);
        assert!((single_mode(100.0, 500e6).total_capacitance() - 5e-12).abs() < 1e-18);
    }

    #[test]
    fn total_inductance_reference_point() {
        let spec = single_mode(50.0, 500e6);
        let l = spec.total_inductance();
        assert!((l - 25e-9).abs() < 1e-15, "L_total = {l}");
        assert!((single_mode(100.0, 500e6).total_inductance() - 50e-9).abs() < 1e-15);
        // Algebraic identity: L C ω² = π²/4.
        let lhs = l * spec.total_capacitance() * spec.omega_r1().powi(2);
        assert!((lhs - PI * PI / 4.0).abs() < 1e-12);
    }

    #[test]
    fn i_zpf_reference_point() {
        let i = single_mode(50.0, 500e6).i_zpf();
        assert!((i - 3.6403e-9).abs() / 3.6403e-9 < 1e-4, "I_ZPF = {i}");
        // Linear in ω_r1, ∝ 1/√Z0.
        assert!((single_mode(50.0, 1e9).i_zpf() - 2.0 * i).abs() < 1e-18);
        assert!((single_mode(200.0, 500e6).i_zpf() - i / 2.0).abs() < 1e-18);
    }

    #[test]
    fn phi_zpf_is_consistent_with_c_total() {
        let spec = single_mode(50.0, 500e6);
        let direct = (crate::constants::HBAR
            / (2.0 * spec.total_capacitance() * spec.omega_r1()))
        .sqrt();
        assert!((spec.phi_zpf() - direct).abs() / direct < 1e-14);
    }

    #[test]
    fn external_damping_scales_as_omega_squared() {
        let spec = three_mode();
        let k3 = spec.external_damping(2.0 * PI * 20.5e9).unwrap();
        let expect = 2.0 * PI * 2e6 * (20.5f64 / 19.5).powi(2);
        assert!((k3 - expect).abs() / expect < 1e-14);
        assert!((k3 / (2.0 * PI) - 2.21e6).abs() / 2.21e6 < 2e-3, "k3 = {k3}");
        // Fundamental lands between the two quoted readings.
        let k1 = spec.external_damping(2.0 * PI * 0.5e9).unwrap() / (2.0 * PI);
        assert!((1.25e3..=1.32e3).contains(&k1), "k1 = {k1}");
    }

    #[test]
    fn external_damping_precedence_override_wins() {
        let mut spec = three_mode();
        spec.kappa_ext_override = Some(vec![Some(1.0), None, None]);
        assert_eq!(spec.external_damping(2.0 * PI * 0.5e9).unwrap(), 1.0);
        // Other modes still fall through to the calibration pair.
        let k2 = spec.external_damping(2.0 * PI * 19.5e9).unwrap();
        assert!((k2 - 2.0 * PI * 2e6).abs() < 1e-6);
    }

    #[test]
    fn external_damping_from_capacitance() {
        let mut spec = single_mode(50.0, 500e6);
        spec.coupling_capacitance = Some(1e-15);
        let w = spec.omega_r1();
        let expect = 50.0 * w * w * 1e-30 / spec.total_capacitance();
        let k = spec.external_damping(w).unwrap();
        assert!((k - expect).abs() / expect < 1e-14);
        // C_c = 0 means no coupling.
        spec.coupling_capacitance = Some(0.0);
        assert_eq!(spec.external_damping(w).unwrap(), 0.0);
    }

    #[test]
    fn external_damping_requires_a_source() {
        let spec = single_mode(50.0, 500e6);
        assert!(spec.external_damping(spec.omega_r1()).is_err());
    }

    #[test]
    fn coupling_q_reference_point() {
        let spec = three_mode();
        let q = spec.coupling_q(2.0 * PI * 19.5e9).unwrap();
        assert!((q - 9750.0).abs() / 9750.0 < 1e-12, "Q_c = {q}");
    }

    #[test]
    fn coupling_q_zero_kappa_is_an_error() {
        let mut spec = single_mode(50.0, 500e6);
        spec.coupling_capacitance = Some(0.0);
        assert!(spec.coupling_q(spec.omega_r1()).is_err());
    }

    #[test]
    fn validate_flags_non_odd_harmonics() {
        let mut spec = three_mode();
        let warnings = spec.validate().unwrap();
        assert!(warnings.is_empty(), "{warnings:?}");
        // 2nd harmonic at an even multiple draws a warning.
        spec.mode_freqs = vec![2.0 * PI * 0.5e9, 2.0 * PI * 1.0e9, 2.0 * PI * 20.5e9];
        let warnings = spec.validate().unwrap();
        assert_eq!(warnings.len(), 1);
    }

    #[test]
    fn validate_rejects_unsorted_modes() {
        let mut spec = three_mode();
        spec.mode_freqs.swap(1, 2);
        assert!(spec.validate().is_err());
    }
}
