//! Magnetic-element model: spin count, drive-field factor, XZ and XX coupling
//! rates, radiative damping into the magnon driving line, anisotropy
//! corrections, and the Kerr nonlinearity.

use crate::constants::{GAMMA_E, G_E, HBAR, MU_0, MU_B};
use crate::dynamics::DeviceConfig;
use crate::error::{Error, Result};

/// Magnetic element (Kittel-mode host) description.
#[derive(Debug, Clone, PartialEq)]
pub struct MagnetSpec {
    /// Saturation magnetization M_s (A/m). 1 emu/cm³ = 1e3 A/m.
    pub m_s: f64,
    /// Element dimensions (length, width, thickness) (m).
    pub dims: (f64, f64, f64),
    /// Gyromagnetic ratio γ (rad/s per T).
    pub gamma: f64,
    /// Effective magnetization M_eff = M_s − H_k (A/m), used by the optional
    /// anisotropy corrections. May be negative for easy-axis anisotropy.
    pub m_eff: f64,
    /// Kerr coefficient K (rad/s per magnon).
    pub kerr_k: f64,
    /// Material label.
    pub name: String,
}

impl MagnetSpec {
    /// YIG element, 5 × 5 × 1 µm³: M_s = 140 emu/cm³, free-electron γ,
    /// Kerr coefficient K = 2π × 0.01 Hz.
    pub fn yig() -> Self {
        MagnetSpec {
            m_s: 1.4e5,
            dims: (5e-6, 5e-6, 1e-6),
            gamma: GAMMA_E,
            m_eff: 1.4e5,
            kerr_k: 2.0 * std::f64::consts::PI * 0.01,
            name: "YIG".into(),
        }
    }

    /// V[TCNE]x element, 500 × 5 × 1 µm³.
    ///
    /// M_s is back-derived from the spin-count anchor N = 2.2e12 for this
    /// volume (≈ 8.16 emu/cm³); γ is calibrated so the Kittel mode sits at
    /// 20 GHz in a 0.709305 T bias field. No Kerr coefficient is known for
    /// this material, so K = 0.
    pub fn vtcne() -> Self {
        let volume: f64 = 500e-6 * 5e-6 * 1e-6;
        MagnetSpec {
            m_s: 2.2e12 * MU_B / volume,
            dims: (500e-6, 5e-6, 1e-6),
            gamma: 2.0 * std::f64::consts::PI * 20e9 / 0.709305,
            m_eff: 2.2e12 * MU_B / volume,
            kerr_k: 0.0,
            name: "VTCNE".into(),
        }
    }

    /// Validate the spec.
    pub fn validate(&self) -> Result<()> {
        if self.m_s <= 0.0 {
            return Err(Error::invalid("m_s", "must be > 0", self.m_s));
        }
        let (l, w, t) = self.dims;
        if l <= 0.0 || w <= 0.0 || t <= 0.0 {
            return Err(Error::invalid("dims", "must all be > 0", l.min(w).min(t)));
        }
        if self.gamma <= 0.0 {
            return Err(Error::invalid("gamma", "must be > 0", self.gamma));
        }
        if self.kerr_k < 0.0 {
            return Err(Error::invalid("kerr_k", "must be >= 0", self.kerr_k));
        }
        Ok(())
    }

    /// Element volume (m³).
    pub fn volume(&self) -> f64 {
        self.dims.0 * self.dims.1 * self.dims.2
    }

    /// Number of spins N = M_s V / μ_B (one Bohr magneton per spin).
    pub fn spin_count(&self) -> f64 {
        self.m_s * self.volume() / MU_B
    }

    /// Kittel-mode (Larmor) frequency ω_m = γ B (rad/s), anisotropy neglected.
    pub fn larmor_frequency(&self, b_field: f64) -> f64 {
        assert!(b_field >= 0.0, "larmor_frequency requires b_field >= 0");
        self.gamma * b_field
    }

    /// Magnon frequency shift K·n_m from the Kerr nonlinearity (rad/s).
    pub fn kerr_shift(&self, n_m: f64) -> f64 {
        assert!(n_m >= 0.0, "kerr_shift requires n_m >= 0");
        self.kerr_k * n_m
    }
}

/// Drive-field factor of a wire of width `w`: b_rf = μ₀/(2w) (T per A).
pub fn b_rf(wire_width: f64) -> f64 {
    assert!(wire_width > 0.0, "b_rf requires wire_width > 0");
    MU_0 / (2.0 * wire_width)
}

/// XZ coupling rate between the resonator fundamental and the Kittel mode:
/// g_XZ1 = γ (μ₀/2w) √(2ħ/(π Z₀)) ω_r1, times the geometric projection of
/// the wire onto the static field (1 for the top-CPW geometry, 1/√2 when the
/// wire is at 45°). Returns rad/s.
pub fn g_xz(device: &DeviceConfig) -> f64 {
    device.magnet.gamma
        * b_rf(device.wire_width)
        * device.resonator.i_zpf()
        * device.geometry.xz_projection()
}

/// XX coupling rate between the Kittel mode and the resonator harmonic at
/// `harmonic_freq` (rad/s):
/// g_XX = proj · g_e μ_B b_rf √(ω_r1 ω_k) √(N/(2πħZ₀)), proj = 1/√2 at 45°.
///
/// With `device.apply_anisotropy` set, the caller-supplied correction factor
/// ((H+M_eff)/H)^¼ is applied by the dynamics layer, not here.
pub fn g_xx_harmonic(device: &DeviceConfig, harmonic_freq: f64) -> Result<f64> {
    device.resonator.mode_index(harmonic_freq)?;
    let n = device.magnet.spin_count();
    if n <= 0.0 {
        return Err(Error::invalid("spin_count", "must be > 0", n));
    }
    let omega_r1 = device.resonator.omega_r1();
    let z0 = device.resonator.z0;
    Ok(device.geometry.xx_projection()
        * G_E
        * MU_B
        * b_rf(device.wire_width)
        * (omega_r1 * harmonic_freq).sqrt()
        * (n / (2.0 * std::f64::consts::PI * HBAR * z0)).sqrt())
}

/// Radiative magnon damping into the driving line at `omega_m`:
/// κ_m,ext = b_rf² ω_m μ_B N γ / (2 Z₀), and the corresponding coupling
/// quality factor Q_m,c = ω_m/κ_m,ext = 2 Z₀/(b_rf² μ_B N γ).
/// Returns (κ_m,ext in rad/s, Q_m,c).
pub fn magnon_ext_damping(
    mag: &MagnetSpec,
    wire_width: f64,
    omega_m: f64,
    z0: f64,
) -> (f64, f64) {
    assert!(omega_m > 0.0, "magnon_ext_damping requires omega_m > 0");
    assert!(z0 > 0.0, "magnon_ext_damping requires z0 > 0");
    let b = b_rf(wire_width);
    let denom = b * b * MU_B * mag.spin_count() * mag.gamma;
    let q_c = 2.0 * z0 / denom;
    (omega_m / q_c, q_c)
}

/// Anisotropy divisor for Q_m,c: √((H + M_eff)/H), with H and M_eff in A/m.
pub fn anisotropy_q_factor(h_field: f64, m_eff: f64) -> Result<f64> {
    if h_field <= 0.0 {
        return Err(Error::invalid("h_field", "must be > 0", h_field));
    }
    if h_field + m_eff <= 0.0 {
        return Err(Error::invalid(
            "m_eff",
            "H + M_eff must be > 0",
            m_eff,
        ));
    }
    Ok(((h_field + m_eff) / h_field).sqrt())
}

/// Anisotropy multiplier for g_XX: ((H + M_eff)/H)^(1/4), H and M_eff in A/m.
pub fn anisotropy_g_factor(h_field: f64, m_eff: f64) -> Result<f64> {
    Ok(anisotropy_q_factor(h_field, m_eff)?.sqrt())
}

/// Coupling rates derived consistently from a device description.
///
/// Construction enforces g_XZ1 = G · Φ_ZPF with Φ_ZPF the fundamental-mode
/// zero-point flux, so the frequency-domain rates and the time-domain
/// coupling constant G (rad/s per Wb) always agree.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingSet {
    /// XZ rate between the fundamental mode and the Kittel mode (rad/s).
    pub g_xz1: f64,
    /// XX rate per harmonic mode (rad/s), parallel to the resonator's
    /// harmonic list `mode_freqs[1..]`.
    pub g_xx: Vec<f64>,
    /// Magnon frequency shift per unit flux, G = g_XZ1/Φ_ZPF (rad/s per Wb).
    pub big_g: f64,
}

impl CouplingSet {
    /// Derive all coupling rates from the device description.
    pub fn derive(device: &DeviceConfig) -> Result<Self> {
        let g_xz1 = g_xz(device);
        let g_xx = device.resonator.mode_freqs[1..]
            .iter()
            .map(|&w| g_xx_harmonic(device, w))
            .collect::<Result<Vec<_>>>()?;
        let big_g = g_xz1 / device.resonator.phi_zpf();
        Ok(CouplingSet { g_xz1, g_xx, big_g })
    }
}
