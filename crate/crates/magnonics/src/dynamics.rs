//! Driven steady states and dynamical backaction for both device geometries:
//! magnon populations under drive, three-mode hybridized amplitudes, and the
//! fundamental-mode frequency shift δω_r1 and damping change δκ_r1.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::magnon::{self, MagnetSpec};
use crate::resonator::ResonatorSpec;

/// Device geometry: where the magnet sits relative to the resonator wire and
/// the static field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Geometry {
    /// Magnet on top of the CPW center wire, static field perpendicular to
    /// the wire; pure XZ coupling plus a dedicated magnon driving line.
    TopCpw,
    /// Magnet wire axis at 45° to the static field; XZ coupling to the
    /// fundamental and XX coupling to the harmonics, driven via the feedline.
    FortyFive,
}

impl Geometry {
    /// Projection of the wire's RF field onto the magnon XZ axis.
    pub fn xz_projection(self) -> f64 {
        match self {
            Geometry::TopCpw => 1.0,
            Geometry::FortyFive => std::f64::consts::FRAC_1_SQRT_2,
        }
    }

    /// Projection entering the XX coupling to harmonic modes.
    pub fn xx_projection(self) -> f64 {
        match self {
            Geometry::TopCpw => 1.0,
            Geometry::FortyFive => std::f64::consts::FRAC_1_SQRT_2,
        }
    }
}

/// Ratio thresholds for the validity flags attached to backaction results.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidityThresholds {
    /// √n_m · g_XZ1 ≤ weak_coupling · κ_m.
    pub weak_coupling: f64,
    /// K · n_m ≤ kerr · κ_m.
    pub kerr: f64,
    /// n_m ≤ population · N.
    pub population: f64,
}

impl Default for ValidityThresholds {
    fn default() -> Self {
        ValidityThresholds {
            weak_coupling: 0.1,
            kerr: 1.0,
            population: 0.01,
        }
    }
}

/// One of the two proposed devices: resonator + magnet + wiring.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceConfig {
    /// Which geometry this device realizes.
    pub geometry: Geometry,
    /// The λ/4 resonator.
    pub resonator: ResonatorSpec,
    /// The magnetic element.
    pub magnet: MagnetSpec,
    /// Width of the inductor wire under/next to the magnet (m).
    pub wire_width: f64,
    /// Intrinsic magnon damping κ_m,i (rad/s).
    pub kappa_m_internal: f64,
    /// Explicit magnon-line radiative damping κ_m,ext (rad/s). When unset,
    /// a TopCpw device derives it from the magnet and wire; FortyFive
    /// devices have no magnon line and use 0.
    pub kappa_m_ext_override: Option<f64>,
    /// Apply the static-field anisotropy corrections to κ_m,ext and g_XX.
    /// Off by default; the headline numbers neglect anisotropy.
    pub apply_anisotropy: bool,
    /// Validity-flag thresholds.
    pub thresholds: ValidityThresholds,
}

impl DeviceConfig {
    /// Validate the device. Hard violations are errors; soft issues come
    /// back as warnings.
    pub fn validate(&self) -> Result<Vec<String>> {
        let warnings = self.resonator.validate()?;
        self.magnet.validate()?;
        if self.wire_width <= 0.0 {
            return Err(Error::invalid("wire_width", "must be > 0", self.wire_width));
        }
        if self.kappa_m_internal < 0.0 {
            return Err(Error::invalid(
                "kappa_m_internal",
                "must be >= 0",
                self.kappa_m_internal,
            ));
        }
        match self.geometry {
            Geometry::TopCpw => {
                if self.resonator.mode_freqs.len() != 1 {
                    return Err(Error::Unphysical(format!(
                        "top-CPW geometry uses exactly one resonator mode, got {}",
                        self.resonator.mode_freqs.len()
                    )));
                }
                if let Some(k) = self.kappa_m_ext_override {
                    if k <= 0.0 {
                        return Err(Error::invalid(
                            "kappa_m_ext_override",
                            "top-CPW magnon line requires kappa_m_ext > 0",
                            k,
                        ));
                    }
                }
            }
            Geometry::FortyFive => {
                if self.resonator.mode_freqs.len() < 3 {
                    return Err(Error::Unphysical(format!(
                        "45-degree geometry needs >= 3 resonator modes, got {}",
                        self.resonator.mode_freqs.len()
                    )));
                }
                if self.kappa_m_ext_override.unwrap_or(0.0) != 0.0 {
                    return Err(Error::Unphysical(
                        "45-degree geometry has no magnon driving line; \
                         kappa_m_ext must be 0"
                            .into(),
                    ));
                }
            }
        }
        Ok(warnings)
    }

    /// Magnon radiative damping κ_m,ext at `omega_m` (rad/s): the override
    /// if set, else derived from the magnet/wire for TopCpw, else 0 for
    /// FortyFive (no magnon driving line).
    pub fn kappa_m_ext(&self, omega_m: f64) -> f64 {
        match self.geometry {
            Geometry::FortyFive => 0.0,
            Geometry::TopCpw => self.kappa_m_ext_override.unwrap_or_else(|| {
                let (mut kappa, _) = magnon::magnon_ext_damping(
                    &self.magnet,
                    self.wire_width,
                    omega_m,
                    self.resonator.z0,
                );
                if self.apply_anisotropy {
                    // Q_m,c shrinks by the anisotropy factor, so κ grows.
                    let h = omega_m / self.magnet.gamma / crate::constants::MU_0;
                    if let Ok(f) = magnon::anisotropy_q_factor(h, self.magnet.m_eff) {
                        kappa *= f;
                    }
                }
                kappa
            }),
        }
    }

    /// Total magnon damping κ_m = κ_m,i + κ_m,ext at `omega_m` (rad/s).
    pub fn kappa_m_total(&self, omega_m: f64) -> f64 {
        self.kappa_m_internal + self.kappa_m_ext(omega_m)
    }

    /// Derived coupling rates for this device.
    pub fn couplings(&self) -> Result<magnon::CouplingSet> {
        magnon::CouplingSet::derive(self)
    }

    /// XX coupling to the harmonic at `omega_k`, with the anisotropy
    /// enhancement applied when enabled (H from the bias field).
    fn g_xx_at(&self, omega_k: f64, b_field: f64) -> Result<f64> {
        let mut g = magnon::g_xx_harmonic(self, omega_k)?;
        if self.apply_anisotropy {
            let h = b_field / crate::constants::MU_0;
            g *= magnon::anisotropy_g_factor(h, self.magnet.m_eff)?;
        }
        Ok(g)
    }
}

/// Microwave drive description.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveSpec {
    /// Drive power at the port (W).
    pub power: f64,
    /// Drive angular frequency ω_d (rad/s).
    pub omega_d: f64,
    /// Which port carries the drive.
    pub port: DrivePort,
}

/// Physical port the drive enters through.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DrivePort {
    /// Dedicated magnon driving line (TopCpw geometry).
    MagnonLine,
    /// Resonator feedline (FortyFive geometry).
    Feedline,
}

impl DriveSpec {
    /// Validate the drive.
    pub fn validate(&self) -> Result<()> {
        if self.power < 0.0 {
            return Err(Error::invalid("power", "must be >= 0", self.power));
        }
        if self.omega_d <= 0.0 {
            return Err(Error::invalid("omega_d", "must be > 0", self.omega_d));
        }
        Ok(())
    }
}

/// Backaction on the fundamental mode at one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BackactionResult {
    /// Frequency shift δω_r1 (rad/s).
    pub delta_omega_r1: f64,
    /// Damping change δκ_r1 (rad/s); positive means extra damping (cooling).
    pub delta_kappa_r1: f64,
    /// Magnon population producing the backaction.
    pub n_m: f64,
    /// √n_m · g_XZ1 small against κ_m (linearization valid).
    pub weak_coupling_ok: bool,
    /// Kerr shift K·n_m small against κ_m.
    pub kerr_ok: bool,
    /// n_m small against the total spin count N.
    pub population_ok: bool,
}

fn validity_flags(device: &DeviceConfig, n_m: f64, kappa_m: f64) -> (bool, bool, bool) {
    let t = device.thresholds;
    let g = magnon::g_xz(device);
    let weak = n_m.sqrt() * g <= t.weak_coupling * kappa_m;
    let kerr = device.magnet.kerr_shift(n_m) <= t.kerr * kappa_m;
    let population = n_m <= t.population * device.magnet.spin_count();
    (weak, kerr, population)
}

/// Steady-state magnon population under a magnon-line drive (TopCpw):
/// ⟨n_m⟩ = (2P/ħω_d) · κ_m,ext / (κ_m² + 4(ω_d − ω_m)²).
///
/// `omega_m` is the bias-field-set Kittel frequency (rad/s).
pub fn magnon_number_direct(device: &DeviceConfig, drive: &DriveSpec, omega_m: f64) -> f64 {
    assert!(
        device.geometry == Geometry::TopCpw,
        "magnon_number_direct applies to the top-CPW geometry"
    );
    assert!(
        drive.port == DrivePort::MagnonLine,
        "magnon_number_direct requires a magnon-line drive"
    );
    assert!(omega_m > 0.0, "omega_m must be > 0");
    let kappa_ext = device.kappa_m_ext(omega_m);
    let kappa_m = device.kappa_m_internal + kappa_ext;
    let detuning = drive.omega_d - omega_m;
    (2.0 * drive.power / (crate::constants::HBAR * drive.omega_d)) * kappa_ext
        / (kappa_m * kappa_m + 4.0 * detuning * detuning)
}

/// Dynamical backaction of a driven Kittel mode on the fundamental (TopCpw).
///
/// `delta` = ω_d − ω_m is the drive detuning; `probe_omega` is the response
/// frequency ω at which the effective inductance is read out, defaulting to
/// ω_r1 (valid while √n_m·g ≪ κ_m):
///
///   δω_r1 = n g² (ω_r1/ω) [ (Δ+ω)/((Δ+ω)²+(κ_m/2)²) + (Δ−ω)/((Δ−ω)²+(κ_m/2)²) ]
///   δκ_r1 = n g² (ω_r1/ω) [  κ_m /((Δ+ω)²+(κ_m/2)²) −  κ_m /((Δ−ω)²+(κ_m/2)²) ]
///
/// Red-detuned drive (Δ = −ω_r1) gives δκ > 0 (cooling), blue gives δκ < 0.
pub fn backaction_top(
    device: &DeviceConfig,
    n_m: f64,
    omega_m: f64,
    delta: f64,
    probe_omega: Option<f64>,
) -> BackactionResult {
    let omega_r1 = device.resonator.omega_r1();
    let omega = probe_omega.unwrap_or(omega_r1);
    assert!(omega > 0.0, "probe_omega must be > 0");
    let kappa_m = device.kappa_m_total(omega_m);
    let g = magnon::g_xz(device);
    let half_k_sq = (kappa_m / 2.0) * (kappa_m / 2.0);
    let up = delta + omega;
    let dn = delta - omega;
    let den_up = up * up + half_k_sq;
    let den_dn = dn * dn + half_k_sq;
    let scale = n_m * g * g * omega_r1 / omega;
    let (weak, kerr, population) = validity_flags(device, n_m, kappa_m);
    BackactionResult {
        delta_omega_r1: scale * (up / den_up + dn / den_dn),
        delta_kappa_r1: scale * (kappa_m / den_up - kappa_m / den_dn),
        n_m,
        weak_coupling_ok: weak,
        kerr_ok: kerr,
        population_ok: population,
    }
}

/// Parameters of the three driven modes, resolved once per operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeModeParams {
    pub omega_m: f64,
    pub kappa_m: f64,
    pub omega_r2: f64,
    pub omega_r3: f64,
    pub kappa_r2: f64,
    pub kappa_r3: f64,
    pub kappa_r2_ext: f64,
    pub kappa_r3_ext: f64,
    pub g2: f64,
    pub g3: f64,
}

/// Resolve the harmonic and magnon parameters entering the three-mode model.
pub fn three_mode_params(device: &DeviceConfig, b_field: f64) -> Result<ThreeModeParams> {
    assert!(
        device.geometry == Geometry::FortyFive,
        "three-mode dynamics applies to the 45-degree geometry"
    );
    let res = &device.resonator;
    let omega_r2 = res.mode_freqs[1];
    let omega_r3 = res.mode_freqs[2];
    let omega_m = device.magnet.larmor_frequency(b_field);
    Ok(ThreeModeParams {
        omega_m,
        kappa_m: device.kappa_m_total(omega_m),
        omega_r2,
        omega_r3,
        kappa_r2: res.total_damping(omega_r2)?,
        kappa_r3: res.total_damping(omega_r3)?,
        kappa_r2_ext: res.external_damping(omega_r2)?,
        kappa_r3_ext: res.external_damping(omega_r3)?,
        g2: device.g_xx_at(omega_r2, b_field)?,
        g3: device.g_xx_at(omega_r3, b_field)?,
    })
}

/// Steady-state amplitudes of the feedline-driven three-mode system
/// (FortyFive): returns (α_r2, α_r3, β_m).
///
/// Each harmonic responds to its own feedline tone with the magnon-dressed
/// denominator
///
///   α_r2 = √(2P·Q_r2,c/(ħω_d²)) · (κ_r2,ext/2) /
///          [ i(ω_d−ω_r2) − κ_r2/2 + g₂²/( i(ω_d−ω_m) − κ_m/2 + g₃²/(i(ω_d−ω_r3) − κ_r3/2) ) ]
///
/// (and symmetrically for α_r3), and the magnon amplitude is
/// β_m = (i g₂ α_r2 + i g₃ α_r3)/(−κ_m/2 + i(ω_d − ω_m)).
pub fn driven_amplitudes_45(
    device: &DeviceConfig,
    drive: &DriveSpec,
    b_field: f64,
) -> Result<(Complex64, Complex64, Complex64)> {
    assert!(
        drive.port == DrivePort::Feedline,
        "the 45-degree geometry is driven through the feedline"
    );
    let p = three_mode_params(device, b_field)?;
    let i = Complex64::I;
    let d_m = i * (drive.omega_d - p.omega_m) - p.kappa_m / 2.0;
    let d2 = i * (drive.omega_d - p.omega_r2) - p.kappa_r2 / 2.0;
    let d3 = i * (drive.omega_d - p.omega_r3) - p.kappa_r3 / 2.0;
    let q2c = p.omega_r2 / p.kappa_r2_ext;
    let q3c = p.omega_r3 / p.kappa_r3_ext;
    let amp = |q_c: f64| {
        (2.0 * drive.power * q_c / (crate::constants::HBAR * drive.omega_d * drive.omega_d)).sqrt()
    };
    let alpha_r2 =
        amp(q2c) * (p.kappa_r2_ext / 2.0) / (d2 + p.g2 * p.g2 / (d_m + p.g3 * p.g3 / d3));
    let alpha_r3 =
        amp(q3c) * (p.kappa_r3_ext / 2.0) / (d3 + p.g3 * p.g3 / (d_m + p.g2 * p.g2 / d2));
    let beta_m = (i * p.g2 * alpha_r2 + i * p.g3 * alpha_r3) / d_m;
    Ok((alpha_r2, alpha_r3, beta_m))
}

/// Magnon population n_m = |β_m|² of the feedline-driven system.
pub fn magnon_number_45(device: &DeviceConfig, drive: &DriveSpec, b_field: f64) -> Result<f64> {
    let (_, _, beta_m) = driven_amplitudes_45(device, drive, b_field)?;
    Ok(beta_m.norm_sqr())
}

/// Backaction on the fundamental from a feedline drive (FortyFive), with the
/// magnon population supplied by the caller. Used by [`backaction_45`] and by
/// sweeps that reuse amplitudes.
///
/// A, B, C, D are the real and imaginary parts of the dressed magnon response
/// denominators at ±ω (Δ_m = ω_m − ω_d, Δ_ri = ω_ri − ω_d):
///
///   δω_r1 = n g_XZ² (ω_r1/ω) (A/(A²+C²) + B/(B²+D²))
///   δκ_r1 = n g_XZ² (ω_r1/ω) (2C/(A²+C²) − 2D/(B²+D²))
///
/// The damping line follows from the imaginary part of the inverse effective
/// inductance, −2·Im[1/(A+iC) + 1/(B−iD)] = 2C/(A²+C²) − 2D/(B²+D²): with
/// g_XX → 0 it reduces to the single-cavity two-Lorentzian form above, and a
/// red-detuned drive damps (δκ > 0) while a blue-detuned one anti-damps.
pub fn backaction_45_from_population(
    device: &DeviceConfig,
    n_m: f64,
    b_field: f64,
    omega_d: f64,
    probe_omega: Option<f64>,
) -> Result<BackactionResult> {
    let p = three_mode_params(device, b_field)?;
    let omega_r1 = device.resonator.omega_r1();
    let omega = probe_omega.unwrap_or(omega_r1);
    assert!(omega > 0.0, "probe_omega must be > 0");
    let delta_m = p.omega_m - omega_d;
    let delta_r2 = p.omega_r2 - omega_d;
    let delta_r3 = p.omega_r3 - omega_d;
    let g2_sq = p.g2 * p.g2;
    let g3_sq = p.g3 * p.g3;

    // Harmonic-mode Lorentzian weights at the upper (+ω) and lower (−ω)
    // sidebands of the probe.
    let den2 = |s: f64| (p.kappa_r2 / 2.0).powi(2) + (s * omega - delta_r2).powi(2);
    let den3 = |s: f64| (p.kappa_r3 / 2.0).powi(2) + (s * omega - delta_r3).powi(2);

    let a = -delta_m + omega
        - g2_sq * (omega - delta_r2) / den2(1.0)
        - g3_sq * (omega - delta_r3) / den3(1.0);
    let b = -delta_m - omega
        - g2_sq * (-omega - delta_r2) / den2(-1.0)
        - g3_sq * (-omega - delta_r3) / den3(-1.0);
    let c = p.kappa_m / 2.0
        + g2_sq * (p.kappa_r2 / 2.0) / den2(1.0)
        + g3_sq * (p.kappa_r3 / 2.0) / den3(1.0);
    let d = p.kappa_m / 2.0
        + g2_sq * (p.kappa_r2 / 2.0) / den2(-1.0)
        + g3_sq * (p.kappa_r3 / 2.0) / den3(-1.0);

    let g_xz = magnon::g_xz(device);
    let scale = n_m * g_xz * g_xz * omega_r1 / omega;
    let (weak, kerr, population) = validity_flags(device, n_m, p.kappa_m);
    Ok(BackactionResult {
        delta_omega_r1: scale * (a / (a * a + c * c) + b / (b * b + d * d)),
        delta_kappa_r1: scale * (2.0 * c / (a * a + c * c) - 2.0 * d / (b * b + d * d)),
        n_m,
        weak_coupling_ok: weak,
        kerr_ok: kerr,
        population_ok: population,
    })
}

/// Backaction on the fundamental from a feedline drive (FortyFive), with the
/// magnon population computed from the driven steady state.
pub fn backaction_45(
    device: &DeviceConfig,
    drive: &DriveSpec,
    b_field: f64,
    probe_omega: Option<f64>,
) -> Result<BackactionResult> {
    let n_m = magnon_number_45(device, drive, b_field)?;
    backaction_45_from_population(device, n_m, b_field, drive.omega_d, probe_omega)
}

/// Iterate the probe frequency to self-consistency: ω = ω_r1 + δω_r1(ω).
///
/// `evaluate` maps a probe frequency to a backaction result. Converges in a
/// few iterations whenever |δω| ≪ ω_r1; returns the last iterate otherwise.
pub fn self_consistent_probe<F>(omega_r1: f64, evaluate: F) -> BackactionResult
where
    F: Fn(f64) -> BackactionResult,
{
    let mut omega = omega_r1;
    let mut result = evaluate(omega);
    for _ in 0..64 {
        let next = omega_r1 + result.delta_omega_r1;
        if next <= 0.0 {
            break;
        }
        if (next - omega).abs() <= 1e-12 * omega_r1 {
            break;
        }
        omega = next;
        result = evaluate(omega);
    }
    result
}

/// Complex eigenfrequencies of the hybridized (r2, r3, magnon) system,
/// sorted by real part.
///
/// The coupled-mode matrix is
///
///   [ ω_r2 − iκ_r2/2        0             g₂      ]
///   [      0           ω_r3 − iκ_r3/2     g₃      ]
///   [     g₂                g₃        ω_m − iκ_m/2 ]
///
/// whose eigenvalues are the roots of a complex cubic, solved in closed form
/// and polished with one Newton step each.
pub fn hybrid_eigenmodes(device: &DeviceConfig, b_field: f64) -> Result<[Complex64; 3]> {
    let p = three_mode_params(device, b_field)?;
    let i = Complex64::I;
    let l2 = p.omega_r2 - i * (p.kappa_r2 / 2.0);
    let l3 = p.omega_r3 - i * (p.kappa_r3 / 2.0);
    let lm = p.omega_m - i * (p.kappa_m / 2.0);
    let g2_sq = Complex64::from(p.g2 * p.g2);
    let g3_sq = Complex64::from(p.g3 * p.g3);

    // det(M − λ) = (l2−λ)(l3−λ)(lm−λ) − g3²(l2−λ) − g2²(l3−λ):
    // λ³ − e1 λ² + (e2 − g2² − g3²) λ − (e3 − g3² l2 − g2² l3) = 0.
    let e1 = l2 + l3 + lm;
    let e2 = l2 * l3 + l2 * lm + l3 * lm;
    let e3 = l2 * l3 * lm;
    let c2 = -e1;
    let c1 = e2 - g2_sq - g3_sq;
    let c0 = -(e3 - g3_sq * l2 - g2_sq * l3);

    let mut roots = solve_cubic(c2, c1, c0);
    // One Newton polish per root against the monic cubic.
    for r in roots.iter_mut() {
        for _ in 0..3 {
            let f = ((*r + c2) * *r + c1) * *r + c0;
            let df = (3.0 * *r + 2.0 * c2) * *r + c1;
            if df.norm() == 0.0 {
                break;
            }
            let step = f / df;
            *r -= step;
            if step.norm() <= 1e-15 * r.norm().max(1.0) {
                break;
            }
        }
    }
    roots.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
    Ok(roots)
}

/// Roots of the monic complex cubic λ³ + c2 λ² + c1 λ + c0 (Cardano).
fn solve_cubic(c2: Complex64, c1: Complex64, c0: Complex64) -> [Complex64; 3] {
    // Depress: λ = μ − c2/3, μ³ + pμ + q = 0.
    let shift = -c2 / 3.0;
    let p = c1 - c2 * c2 / 3.0;
    let q = c0 + c2 * (2.0 * c2 * c2 - 9.0 * c1) / 27.0;

    let disc = (q / 2.0) * (q / 2.0) + (p / 3.0) * (p / 3.0) * (p / 3.0);
    let sq = disc.sqrt();
    // Pick the branch that avoids cancellation in -q/2 ± √disc.
    let u3 = {
        let a = -q / 2.0 + sq;
        let b = -q / 2.0 - sq;
        if a.norm() >= b.norm() {
            a
        } else {
            b
        }
    };
    if u3.norm() == 0.0 {
        // Triple root of the depressed cubic (p = q = 0).
        return [shift, shift, shift];
    }
    let u = u3.cbrt();
    let w = Complex64::new(-0.5, 0.75f64.sqrt()); // primitive cube root of 1
    let mut roots = [Complex64::default(); 3];
    let mut uk = u;
    for r in roots.iter_mut() {
        *r = uk - p / (3.0 * uk) + shift;
        uk *= w;
    }
    roots
}
