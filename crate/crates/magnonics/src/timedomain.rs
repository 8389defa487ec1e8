//! Time-domain oracle: integrate the classical linearized equations of motion
//! and extract the effective resonator frequency and damping by ringdown
//! analysis, independently validating the frequency-domain backaction
//! formulas.

use num_complex::Complex64;

use crate::constants::HBAR;
use crate::dynamics::{backaction_top, DeviceConfig};
use crate::error::{Error, Result};

/// Instantaneous state of the linearized two-mode system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimState {
    /// Magnon fluctuation amplitude δβ_m (dimensionless).
    pub delta_beta_m: Complex64,
    /// Fundamental-mode flux Φ (Wb).
    pub phi: f64,
    /// Flux velocity Φ̇ (Wb/s).
    pub phi_dot: f64,
}

/// Parameters a trajectory was integrated with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimParams {
    /// Fundamental frequency ω_r1 (rad/s).
    pub omega_r1: f64,
    /// Total fundamental damping κ_r1 (rad/s).
    pub kappa_r1: f64,
    /// Total magnon damping κ_m (rad/s).
    pub kappa_m: f64,
    /// Drive detuning Δ = ω_d − ω_m (rad/s).
    pub delta: f64,
    /// Magnon frequency shift per unit flux G (rad/s per Wb).
    pub big_g: f64,
    /// Mean magnon amplitude β̄_m.
    pub beta_bar: Complex64,
    /// Effective fundamental-mode capacitance C₁ (F).
    pub c1: f64,
    /// Integration step (s).
    pub dt: f64,
}

/// A fixed-step trajectory of the linearized system.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Sample times (s), uniform and strictly increasing.
    pub times: Vec<f64>,
    /// States at each sample time.
    pub states: Vec<SimState>,
    /// Copy of the integration inputs.
    pub params: SimParams,
}

impl Trajectory {
    /// The sub-trajectory with t ≥ `t_start` (same parameters).
    pub fn window_from(&self, t_start: f64) -> Trajectory {
        let idx = self.times.partition_point(|&t| t < t_start);
        Trajectory {
            times: self.times[idx..].to_vec(),
            states: self.states[idx..].to_vec(),
            params: self.params,
        }
    }

    fn phi_series(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.phi).collect()
    }
}

/// Right-hand side of the linearized equations of motion, in the rotating
/// frame of the drive:
///
///   δβ̇_m = (iΔ − κ_m/2) δβ_m + i G β̄_m Φ
///   C₁ Φ̈  = −C₁ ω_r1² Φ − C₁ κ_r1 Φ̇ + ħG (β̄_m* δβ_m + β̄_m δβ_m*)
#[derive(Debug, Clone, Copy)]
struct Eom {
    omega_r1_sq: f64,
    kappa_r1: f64,
    kappa_m: f64,
    delta: f64,
    big_g: f64,
    beta_bar: Complex64,
    /// Force prefactor ħG/C₁ (per unit Re(β̄* δβ)).
    force: f64,
}

/// State vector (Re δβ, Im δβ, Φ, Φ̇) for the integrator.
type StateVec = [f64; 4];

impl Eom {
    fn derivative(&self, y: &StateVec) -> StateVec {
        let delta_beta = Complex64::new(y[0], y[1]);
        let d_beta = (Complex64::new(-self.kappa_m / 2.0, self.delta)) * delta_beta
            + Complex64::I * self.big_g * self.beta_bar * y[2];
        let drive = 2.0 * self.force * (self.beta_bar.conj() * delta_beta).re;
        [
            d_beta.re,
            d_beta.im,
            y[3],
            -self.omega_r1_sq * y[2] - self.kappa_r1 * y[3] + drive,
        ]
    }

    fn rk4_step(&self, y: &StateVec, dt: f64) -> StateVec {
        let k1 = self.derivative(y);
        let k2 = self.derivative(&advance(y, &k1, dt / 2.0));
        let k3 = self.derivative(&advance(y, &k2, dt / 2.0));
        let k4 = self.derivative(&advance(y, &k3, dt));
        let mut out = *y;
        for i in 0..4 {
            out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        out
    }
}

fn advance(y: &StateVec, k: &StateVec, h: f64) -> StateVec {
    [
        y[0] + h * k[0],
        y[1] + h * k[1],
        y[2] + h * k[2],
        y[3] + h * k[3],
    ]
}

/// Integrate the linearized equations of motion from (δβ_m = 0, Φ = `phi0`,
/// Φ̇ = 0) with a fixed-step 4th-order Runge-Kutta scheme.
///
/// The coupling constant is G = g_XZ1/Φ_ZPF and C₁ is the total resonator
/// capacitance, so ħG²/C₁ = 2 ω_r1 g_XZ1² holds exactly and the trajectory
/// is scale-consistent with the frequency-domain formulas. The magnon
/// linewidth is κ_m,i plus the explicit κ_m,ext override; derived radiative
/// damping must be resolved into the override beforehand (as
/// [`verify_backaction`] does).
pub fn integrate_linearized(
    device: &DeviceConfig,
    beta_bar: Complex64,
    delta: f64,
    phi0: f64,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    integrate_strided(device, beta_bar, delta, phi0, t_end, dt, 1)
}

/// As [`integrate_linearized`], but storing at most `max_samples` samples
/// (integration still proceeds at the full step `dt`; storage is thinned).
/// Intended for dumping long runs; a heavily thinned trajectory may be too
/// sparse for [`fit_ringdown`].
pub fn integrate_sampled(
    device: &DeviceConfig,
    beta_bar: Complex64,
    delta: f64,
    phi0: f64,
    t_end: f64,
    dt: f64,
    max_samples: usize,
) -> Result<Trajectory> {
    if dt <= 0.0 {
        return Err(Error::invalid("dt", "must be > 0", dt));
    }
    let steps = (t_end / dt).ceil() as usize;
    let stride = steps.div_ceil(max_samples.max(2)).max(1);
    integrate_strided(device, beta_bar, delta, phi0, t_end, dt, stride)
}

/// As [`integrate_linearized`], but storing only every `stride`-th sample.
/// Integration always proceeds at the full step `dt`; the stride only thins
/// what is kept, so long runs on fast devices stay within memory.
fn integrate_strided(
    device: &DeviceConfig,
    beta_bar: Complex64,
    delta: f64,
    phi0: f64,
    t_end: f64,
    dt: f64,
    stride: usize,
) -> Result<Trajectory> {
    assert!(stride >= 1, "stride must be >= 1");
    if dt <= 0.0 {
        return Err(Error::invalid("dt", "must be > 0", dt));
    }
    let omega_r1 = device.resonator.omega_r1();
    let kappa_m = device.kappa_m_internal + device.kappa_m_ext_override.unwrap_or(0.0);
    // Resolution guard: at least 50 samples per cycle of the fastest scale.
    let f_max = omega_r1.max(delta.abs()).max(kappa_m) / (2.0 * std::f64::consts::PI);
    let dt_max = 1.0 / (50.0 * f_max);
    if dt > dt_max {
        return Err(Error::invalid(
            "dt",
            "exceeds the resolution guard 1/(50 f_max)",
            dt,
        ));
    }
    if t_end <= dt {
        return Err(Error::invalid("t_end", "must exceed dt", t_end));
    }

    let kappa_r1 = device.resonator.total_damping(omega_r1)?;
    let g_xz = crate::magnon::g_xz(device);
    let big_g = g_xz / device.resonator.phi_zpf();
    let c1 = device.resonator.total_capacitance();
    let eom = Eom {
        omega_r1_sq: omega_r1 * omega_r1,
        kappa_r1,
        kappa_m,
        delta,
        big_g,
        beta_bar,
        force: HBAR * big_g / c1,
    };

    let steps = (t_end / dt).ceil() as usize;
    let mut times = Vec::with_capacity(steps / stride + 1);
    let mut states = Vec::with_capacity(steps / stride + 1);
    let mut y: StateVec = [0.0, 0.0, phi0, 0.0];
    for step in 0..=steps {
        let t = step as f64 * dt;
        if !y.iter().all(|v| v.is_finite()) {
            return Err(Error::IntegrationDiverged { step, time: t });
        }
        if step % stride == 0 {
            times.push(t);
            states.push(SimState {
                delta_beta_m: Complex64::new(y[0], y[1]),
                phi: y[2],
                phi_dot: y[3],
            });
        }
        y = eom.rk4_step(&y, dt);
    }

    Ok(Trajectory {
        times,
        states,
        params: SimParams {
            omega_r1,
            kappa_r1,
            kappa_m,
            delta,
            big_g,
            beta_bar,
            c1,
            dt,
        },
    })
}

/// Result of a damped-cosine fit, A e^(−κt/2) cos(ωt + φ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingdownFit {
    /// Fitted angular frequency (rad/s).
    pub omega: f64,
    /// Fitted energy damping rate κ (rad/s); the amplitude decays at κ/2.
    pub kappa: f64,
    /// Fitted amplitude at t = first sample.
    pub amplitude: f64,
    /// Fitted phase at t = first sample (rad).
    pub phase: f64,
    /// Relative fit residual ‖Φ − model‖/‖Φ‖.
    pub relative_residual: f64,
}

/// Maximum relative residual accepted by [`fit_ringdown`].
const FIT_RESIDUAL_LIMIT: f64 = 1e-3;

/// Fit Φ(t) to A e^(−κt/2) cos(ωt + φ) and return (ω, κ).
///
/// Initialization: ω from the mean zero-crossing spacing, κ from the slope
/// of the log envelope. Refinement: Gauss-Newton on (ω, κ) with the linear
/// amplitudes re-solved exactly at every step (variable projection).
pub fn fit_ringdown(traj: &Trajectory) -> Result<(f64, f64)> {
    let fit = fit_ringdown_full(traj)?;
    Ok((fit.omega, fit.kappa))
}

/// As [`fit_ringdown`], returning the full fit report.
pub fn fit_ringdown_full(traj: &Trajectory) -> Result<RingdownFit> {
    let t0 = traj.times[0];
    let times: Vec<f64> = traj.times.iter().map(|t| t - t0).collect();
    let phi = traj.phi_series();
    if times.len() < 8 {
        return Err(Error::invalid(
            "trajectory",
            "too few samples to fit",
            times.len() as f64,
        ));
    }

    let omega0 = omega_from_zero_crossings(&times, &phi)?;
    let span_periods = (times[times.len() - 1] - times[0]) * omega0 / (2.0 * std::f64::consts::PI);
    if span_periods < 20.0 {
        return Err(Error::invalid(
            "trajectory",
            "must span at least 20 oscillation periods",
            span_periods,
        ));
    }
    let kappa0 = kappa_from_envelope(&times, &phi).unwrap_or(0.0);

    let (omega, kappa, a, b, residual) = refine_fit(&times, &phi, omega0, kappa0)?;
    let norm: f64 = phi.iter().map(|p| p * p).sum::<f64>().sqrt();
    let relative_residual = if norm > 0.0 { residual / norm } else { 0.0 };
    if relative_residual > FIT_RESIDUAL_LIMIT {
        return Err(Error::FitFailed {
            residual: relative_residual,
            limit: FIT_RESIDUAL_LIMIT,
        });
    }
    Ok(RingdownFit {
        omega,
        kappa,
        amplitude: a.hypot(b),
        phase: (-b).atan2(a),
        relative_residual,
    })
}

/// Estimate ω from the mean spacing of interpolated zero crossings.
fn omega_from_zero_crossings(times: &[f64], phi: &[f64]) -> Result<f64> {
    let mut first = None;
    let mut last = None;
    let mut count = 0usize;
    for i in 1..phi.len() {
        if phi[i - 1] == 0.0 || phi[i - 1].signum() == phi[i].signum() {
            continue;
        }
        let frac = phi[i - 1] / (phi[i - 1] - phi[i]);
        let t_cross = times[i - 1] + frac * (times[i] - times[i - 1]);
        if first.is_none() {
            first = Some(t_cross);
        }
        last = Some(t_cross);
        count += 1;
    }
    match (first, last) {
        (Some(a), Some(b)) if count >= 3 && b > a => {
            // count crossings span (count − 1) half-periods.
            Ok(std::f64::consts::PI * (count as f64 - 1.0) / (b - a))
        }
        _ => Err(Error::invalid(
            "trajectory",
            "too few zero crossings to estimate a frequency",
            count as f64,
        )),
    }
}

/// Estimate κ from a linear regression of ln|peak| against time.
fn kappa_from_envelope(times: &[f64], phi: &[f64]) -> Option<f64> {
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for i in 1..phi.len() - 1 {
        let m = phi[i].abs();
        if m > phi[i - 1].abs() && m >= phi[i + 1].abs() && m > 0.0 {
            pts.push((times[i], m.ln()));
        }
    }
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom == 0.0 {
        return None;
    }
    let slope = (n * sxy - sx * sy) / denom;
    Some(-2.0 * slope)
}

/// Variable-projection Gauss-Newton refinement of (ω, κ). Returns
/// (ω, κ, a, b, ‖residual‖) with the model a·e^(−κt/2)cos(ωt) + b·e^(−κt/2)sin(ωt).
fn refine_fit(
    times: &[f64],
    phi: &[f64],
    omega0: f64,
    kappa0: f64,
) -> Result<(f64, f64, f64, f64, f64)> {
    let mut omega = omega0;
    let mut kappa = kappa0;
    let (mut a, mut b, mut res) = solve_linear_amplitudes(times, phi, omega, kappa);

    for _ in 0..100 {
        // Residual and Jacobian columns at the current parameters.
        let mut jtj = [[0.0f64; 2]; 2];
        let mut jtr = [0.0f64; 2];
        for (&t, &p) in times.iter().zip(phi.iter()) {
            let env = (-kappa * t / 2.0).exp();
            let (s, c) = (omega * t).sin_cos();
            let model = env * (a * c + b * s);
            let r = p - model;
            let d_omega = env * t * (-a * s + b * c);
            let d_kappa = -(t / 2.0) * model;
            jtj[0][0] += d_omega * d_omega;
            jtj[0][1] += d_omega * d_kappa;
            jtj[1][1] += d_kappa * d_kappa;
            jtr[0] += d_omega * r;
            jtr[1] += d_kappa * r;
        }
        jtj[1][0] = jtj[0][1];
        let det = jtj[0][0] * jtj[1][1] - jtj[0][1] * jtj[1][0];
        if det == 0.0 {
            break;
        }
        let mut step = [
            (jtj[1][1] * jtr[0] - jtj[0][1] * jtr[1]) / det,
            (jtj[0][0] * jtr[1] - jtj[1][0] * jtr[0]) / det,
        ];

        // Backtracking: accept only steps that reduce the residual.
        let mut improved = false;
        for _ in 0..25 {
            let (na, nb, nres) =
                solve_linear_amplitudes(times, phi, omega + step[0], kappa + step[1]);
            if nres < res {
                omega += step[0];
                kappa += step[1];
                a = na;
                b = nb;
                let rel_change = (res - nres) / res.max(f64::MIN_POSITIVE);
                res = nres;
                improved = true;
                if rel_change < 1e-15 {
                    return Ok((omega, kappa, a, b, res));
                }
                break;
            }
            step[0] /= 2.0;
            step[1] /= 2.0;
        }
        if !improved {
            break;
        }
    }
    Ok((omega, kappa, a, b, res))
}

/// Least-squares (a, b) for fixed (ω, κ); returns (a, b, ‖residual‖).
fn solve_linear_amplitudes(times: &[f64], phi: &[f64], omega: f64, kappa: f64) -> (f64, f64, f64) {
    let (mut uu, mut uv, mut vv, mut up, mut vp) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&t, &p) in times.iter().zip(phi.iter()) {
        let env = (-kappa * t / 2.0).exp();
        let (s, c) = (omega * t).sin_cos();
        let u = env * c;
        let v = env * s;
        uu += u * u;
        uv += u * v;
        vv += v * v;
        up += u * p;
        vp += v * p;
    }
    let det = uu * vv - uv * uv;
    if det == 0.0 {
        return (0.0, 0.0, f64::INFINITY);
    }
    let a = (vv * up - uv * vp) / det;
    let b = (uu * vp - uv * up) / det;
    let mut res = 0.0;
    for (&t, &p) in times.iter().zip(phi.iter()) {
        let env = (-kappa * t / 2.0).exp();
        let (s, c) = (omega * t).sin_cos();
        let r = p - env * (a * c + b * s);
        res += r * r;
    }
    (a, b, res.sqrt())
}

/// Operating point for [`verify_backaction`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    /// Mean magnon amplitude β̄_m; n_m = |β̄_m|².
    pub beta_bar: Complex64,
    /// Drive detuning Δ = ω_d − ω_m (rad/s).
    pub delta: f64,
    /// Kittel frequency ω_m (rad/s), used to resolve κ_m,ext when derived.
    pub omega_m: f64,
}

/// Comparison of time-domain ringdown against the analytic backaction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleReport {
    /// Analytic frequency shift δω_r1 (rad/s).
    pub delta_omega_analytic: f64,
    /// Analytic damping change δκ_r1 (rad/s).
    pub delta_kappa_analytic: f64,
    /// Ringdown frequency shift, coupled minus baseline fit (rad/s).
    pub delta_omega_oracle: f64,
    /// Ringdown damping change, coupled minus baseline fit (rad/s).
    pub delta_kappa_oracle: f64,
    /// |oracle − analytic|/|analytic| for the frequency shift.
    pub relative_error_omega: f64,
    /// |oracle − analytic|/|analytic| for the damping change.
    pub relative_error_kappa: f64,
    /// √n_m · g_XZ1 / κ_m; agreement degrades as this grows.
    pub weak_coupling_ratio: f64,
    /// Integration step used (s).
    pub dt: f64,
    /// Integration end time used (s).
    pub t_end: f64,
}

/// Integrate the linearized system at `point`, fit the ringdown, and compare
/// with the analytic backaction formulas.
///
/// Two trajectories are integrated with identical stepping: the coupled one
/// and a β̄_m = 0 baseline. The oracle shifts are differences of fitted
/// values, which cancels both the κ²/4 frequency pull of the damped
/// oscillator and the (deterministic) integrator bias.
pub fn verify_backaction(device: &DeviceConfig, point: &OperatingPoint) -> Result<OracleReport> {
    // Resolve derived magnon radiative damping into an explicit override so
    // the integrator sees the same κ_m the analytics use.
    let mut resolved = device.clone();
    if resolved.geometry == crate::dynamics::Geometry::TopCpw
        && resolved.kappa_m_ext_override.is_none()
    {
        resolved.kappa_m_ext_override = Some(resolved.kappa_m_ext(point.omega_m));
    }
    let omega_r1 = resolved.resonator.omega_r1();
    let kappa_r1 = resolved.resonator.total_damping(omega_r1)?;
    let kappa_m = resolved.kappa_m_total(point.omega_m);
    let n_m = point.beta_bar.norm_sqr();

    let analytic = backaction_top(&resolved, n_m, point.omega_m, point.delta, None);
    if !analytic.weak_coupling_ok {
        return Err(Error::Unphysical(format!(
            "operating point violates weak coupling: sqrt(n_m) g_XZ = {:.3e} rad/s \
             against kappa_m = {:.3e} rad/s",
            n_m.sqrt() * crate::magnon::g_xz(&resolved),
            kappa_m
        )));
    }

    // Step 4x below the resolution guard; run long enough to resolve κ but
    // keep at least 40 periods in the fit window.
    let f_max = omega_r1.max(point.delta.abs()).max(kappa_m) / (2.0 * std::f64::consts::PI);
    let dt = 1.0 / (200.0 * f_max);
    let periods = 2.0 * std::f64::consts::PI / omega_r1;
    let t_end = (2.0 / kappa_r1).max(48.0 * periods);
    let t_fit = t_end / 6.0;

    // Thin the stored samples on fast devices: cap memory near 2e6 samples
    // per run while keeping at least a dozen samples per oscillation period.
    let steps = (t_end / dt).ceil() as usize;
    let stride_cap = (0.5 / (omega_r1 * dt)).floor().max(1.0) as usize;
    let stride = steps.div_ceil(2_000_000).min(stride_cap).max(1);

    let phi0 = resolved.resonator.phi_zpf();
    let coupled = integrate_strided(
        &resolved,
        point.beta_bar,
        point.delta,
        phi0,
        t_end,
        dt,
        stride,
    )?;
    let baseline = integrate_strided(
        &resolved,
        Complex64::new(0.0, 0.0),
        point.delta,
        phi0,
        t_end,
        dt,
        stride,
    )?;

    let fit_c = fit_ringdown_full(&coupled.window_from(t_fit))?;
    let fit_b = fit_ringdown_full(&baseline.window_from(t_fit))?;

    let d_omega = fit_c.omega - fit_b.omega;
    let d_kappa = fit_c.kappa - fit_b.kappa;
    let rel = |oracle: f64, exact: f64| {
        if exact == 0.0 {
            oracle.abs()
        } else {
            (oracle - exact).abs() / exact.abs()
        }
    };
    Ok(OracleReport {
        delta_omega_analytic: analytic.delta_omega_r1,
        delta_kappa_analytic: analytic.delta_kappa_r1,
        delta_omega_oracle: d_omega,
        delta_kappa_oracle: d_kappa,
        relative_error_omega: rel(d_omega, analytic.delta_omega_r1),
        relative_error_kappa: rel(d_kappa, analytic.delta_kappa_r1),
        weak_coupling_ratio: n_m.sqrt() * crate::magnon::g_xz(&resolved) / kappa_m,
        dt,
        t_end,
    })
}
