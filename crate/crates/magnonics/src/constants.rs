//! Physical constants (CODATA 2018) and shared unit helpers.

/// Reduced Planck constant (J·s).
pub const HBAR: f64 = 1.054571817e-34;

/// Bohr magneton (J/T).
pub const MU_B: f64 = 9.274_010_078_3e-24;

/// Vacuum permeability (T·m/A).
pub const MU_0: f64 = 1.256_637_062_12e-6;

/// Boltzmann constant (J/K).
pub const K_B: f64 = 1.380649e-23;

/// Free-electron g-factor (dimensionless, magnitude).
pub const G_E: f64 = 2.00232;

/// Default electron gyromagnetic ratio, 2π × 28.02495 GHz/T (rad/s/T).
///
/// This is the free-electron value used for YIG; materials with a different
/// g-factor override it per magnet (see [`crate::magnon::MagnetSpec::gamma`]).
pub const GAMMA_E: f64 = 2.0 * std::f64::consts::PI * 28.024_95e9;

/// Grouped physical constants, exposed so downstream code can thread one
/// source of truth instead of scattering literals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Reduced Planck constant (J·s).
    pub hbar: f64,
    /// Bohr magneton (J/T).
    pub mu_b: f64,
    /// Vacuum permeability (T·m/A).
    pub mu_0: f64,
    /// Boltzmann constant (J/K).
    pub k_b: f64,
    /// Free-electron g-factor (dimensionless).
    pub g_e: f64,
    /// Default gyromagnetic ratio (rad/s/T).
    pub gamma_e: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            hbar: HBAR,
            mu_b: MU_B,
            mu_0: MU_0,
            k_b: K_B,
            g_e: G_E,
            gamma_e: GAMMA_E,
        }
    }
}

/// Convert a power in dBm to watts: P = 1 mW · 10^(dBm/10).
pub fn dbm_to_watts(dbm: f64) -> f64 {
    1e-3 * 10f64.powf(dbm / 10.0)
}

/// Bose-Einstein thermal occupation n̄ = 1/(exp(ħω/k_B T) − 1).
///
/// # Arguments
/// * `omega` - mode angular frequency (rad/s), must be > 0
/// * `temperature` - bath temperature (K); T = 0 returns 0
pub fn thermal_occupation(omega: f64, temperature: f64) -> f64 {
    assert!(omega > 0.0, "thermal_occupation requires omega > 0");
    assert!(
        temperature >= 0.0,
        "thermal_occupation requires temperature >= 0"
    );
    if temperature == 0.0 {
        return 0.0;
    }
    let x = HBAR * omega / (K_B * temperature);
    // exp_m1 keeps precision in the classical limit x << 1.
    1.0 / x.exp_m1()
}
