//! Property tests for the structural invariants of the model: scaling laws,
//! symmetries, monotonicities, and algebraic identities that must hold for
//! all physical inputs, not just the tabulated device points.

use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use magnonics::{
    anisotropy_g_factor, anisotropy_q_factor, backaction_top, cooperativity, dbm_to_watts,
    driven_amplitudes_45, g_xz, hybrid_eigenmodes, magnon_number_direct, s21_spectrum,
    squeezed_variance, thermal_occupation, three_mode_params, DeviceConfig, DrivePort, DriveSpec,
    Geometry, MagnetSpec, ResonatorSpec, SqueezingInputs, ValidityThresholds,
};

fn top_device(z0: f64, omega_r1: f64, wire_width: f64) -> DeviceConfig {
    DeviceConfig {
        geometry: Geometry::TopCpw,
        resonator: ResonatorSpec {
            z0,
            mode_freqs: vec![omega_r1],
            kappa_internal: vec![2.0 * PI * 500.0],
            coupling_capacitance: None,
            kappa_ext_calibration: None,
            kappa_ext_override: Some(vec![Some(2.0 * PI * 500.0)]),
        },
        magnet: MagnetSpec::yig(),
        wire_width,
        kappa_m_internal: 2.0 * PI * 2e6,
        kappa_m_ext_override: Some(2.0 * PI * 2e6),
        apply_anisotropy: false,
        thresholds: ValidityThresholds::default(),
    }
}

fn forty_five_device() -> DeviceConfig {
    DeviceConfig {
        geometry: Geometry::FortyFive,
        resonator: ResonatorSpec {
            z0: 50.0,
            mode_freqs: vec![2.0 * PI * 0.5e9, 2.0 * PI * 19.5e9, 2.0 * PI * 20.5e9],
            kappa_internal: vec![2.0 * PI * 500.0, 2.0 * PI * 20e3, 2.0 * PI * 20e3],
            coupling_capacitance: None,
            kappa_ext_calibration: Some((2.0 * PI * 2e6, 2.0 * PI * 19.5e9)),
            kappa_ext_override: None,
        },
        magnet: MagnetSpec::vtcne(),
        wire_width: 5e-6,
        kappa_m_internal: 2.0 * PI * 2e6,
        kappa_m_ext_override: None,
        apply_anisotropy: false,
        thresholds: ValidityThresholds::default(),
    }
}

proptest! {
    /// Calibrated external coupling scales exactly as ω².
    #[test]
    fn kappa_ext_calibration_scaling(
        z0 in 10.0f64..200.0,
        f_ref in 1.0f64..30.0,      // GHz
        kappa_ref in 1e3f64..1e7,   // Hz
        ratio in 0.1f64..10.0,
    ) {
        let omega_ref = 2.0 * PI * f_ref * 1e9;
        let omega = ratio * omega_ref;
        let spec = ResonatorSpec {
            z0,
            mode_freqs: vec![omega],
            kappa_internal: vec![0.0],
            coupling_capacitance: None,
            kappa_ext_calibration: Some((2.0 * PI * kappa_ref, omega_ref)),
            kappa_ext_override: None,
        };
        let got = spec.external_damping(omega).unwrap();
        let want = 2.0 * PI * kappa_ref * ratio * ratio;
        prop_assert!((got - want).abs() <= 1e-12 * want);
    }

    /// Totals of the quarter-wave line: √(L/C) = Z0 and ω√(LC) = π/2,
    /// for any (Z0, ω_r1).
    #[test]
    fn resonator_lc_identities(
        z0 in 10.0f64..200.0,
        f_r1 in 0.05f64..5.0, // GHz
    ) {
        let omega = 2.0 * PI * f_r1 * 1e9;
        let spec = ResonatorSpec {
            z0,
            mode_freqs: vec![omega],
            kappa_internal: vec![0.0],
            coupling_capacitance: None,
            kappa_ext_calibration: None,
            kappa_ext_override: None,
        };
        let lc = spec.total_inductance() * spec.total_capacitance();
        prop_assert!((lc.sqrt() * omega - PI / 2.0).abs() < 1e-12);
        let z = (spec.total_inductance() / spec.total_capacitance()).sqrt();
        prop_assert!((z - z0).abs() < 1e-12 * z0);
    }

    /// Thermal occupation falls with frequency and grows with temperature.
    #[test]
    fn thermal_occupation_monotone(
        f_ghz in 0.01f64..100.0,
        t_mk in 1.0f64..1000.0,
    ) {
        let omega = 2.0 * PI * f_ghz * 1e9;
        let t = t_mk * 1e-3;
        let n = thermal_occupation(omega, t);
        prop_assert!(n >= 0.0);
        prop_assert!(thermal_occupation(omega * 1.5, t) <= n);
        prop_assert!(thermal_occupation(omega, t * 1.5) >= n);
    }

    /// dBm arithmetic: +10 dB is exactly a factor of 10 in power.
    #[test]
    fn dbm_is_logarithmic(dbm in -60.0f64..10.0) {
        let p = dbm_to_watts(dbm);
        prop_assert!(p > 0.0);
        let p10 = dbm_to_watts(dbm + 10.0);
        prop_assert!((p10 / p - 10.0).abs() < 1e-10);
    }

    /// g_XZ1 ∝ ω_r1/√Z0 and ∝ 1/w.
    #[test]
    fn g_xz_scaling_laws(
        z0 in 10.0f64..200.0,
        f_r1 in 0.05f64..5.0,
        w_um in 1.0f64..50.0,
        s in 1.1f64..4.0,
    ) {
        let omega = 2.0 * PI * f_r1 * 1e9;
        let w = w_um * 1e-6;
        let base = g_xz(&top_device(z0, omega, w));
        prop_assert!(base > 0.0);
        let f_scaled = g_xz(&top_device(z0, omega * s, w));
        prop_assert!((f_scaled / base - s).abs() < 1e-9 * s);
        let z_scaled = g_xz(&top_device(z0 * s, omega, w));
        prop_assert!((z_scaled / base - 1.0 / s.sqrt()).abs() < 1e-9);
        let w_scaled = g_xz(&top_device(z0, omega, w * s));
        prop_assert!((w_scaled / base - 1.0 / s).abs() < 1e-9);
    }

    /// Backaction on the fundamental is odd in the drive detuning.
    #[test]
    fn backaction_top_is_odd_in_detuning(
        delta_mhz in 1.0f64..2000.0,
        n_m in 1e3f64..1e9,
    ) {
        let dev = top_device(50.0, 2.0 * PI * 500e6, 5e-6);
        let omega_m = 2.0 * PI * 20e9;
        let delta = 2.0 * PI * delta_mhz * 1e6;
        let plus = backaction_top(&dev, n_m, omega_m, delta, None);
        let minus = backaction_top(&dev, n_m, omega_m, -delta, None);
        let tol = 1e-12 * (plus.delta_omega_r1.abs() + plus.delta_kappa_r1.abs());
        prop_assert!((plus.delta_omega_r1 + minus.delta_omega_r1).abs() <= tol);
        prop_assert!((plus.delta_kappa_r1 + minus.delta_kappa_r1).abs() <= tol);
    }

    /// The directly driven magnon population is an even Lorentzian in Δ,
    /// maximal on resonance, and linear in power.
    #[test]
    fn magnon_number_direct_shape(
        delta_mhz in 0.5f64..500.0,
        p_dbm in -40.0f64..0.0,
    ) {
        let dev = top_device(50.0, 2.0 * PI * 500e6, 5e-6);
        let omega_m = 2.0 * PI * 20e9;
        let delta = 2.0 * PI * delta_mhz * 1e6;
        let drive = |power: f64, d: f64| DriveSpec {
            power,
            omega_d: omega_m + d,
            port: DrivePort::MagnonLine,
        };
        let p = dbm_to_watts(p_dbm);
        let at = |power: f64, d: f64| magnon_number_direct(&dev, &drive(power, d), omega_m);
        let center = at(p, 0.0);
        let plus = at(p, delta);
        let minus = at(p, -delta);
        // The Lorentzian response is even in Δ; the residual asymmetry is
        // the photon-energy prefactor 1/ω_d, removed here.
        let scaled_plus = plus * (omega_m + delta);
        let scaled_minus = minus * (omega_m - delta);
        prop_assert!((scaled_plus - scaled_minus).abs() <= 1e-9 * scaled_plus.max(1e-300));
        prop_assert!(plus <= center);
        let doubled = at(2.0 * p, delta);
        prop_assert!((doubled / plus - 2.0).abs() < 1e-9);
    }

    /// Anisotropy factors obey g² = q for any field/magnetization pair.
    #[test]
    fn anisotropy_identity(
        h in 1e3f64..1e7,
        m_eff in 1e3f64..1e7,
    ) {
        let q = anisotropy_q_factor(h, m_eff).unwrap();
        let g = anisotropy_g_factor(h, m_eff).unwrap();
        prop_assert!(q >= 1.0); // the easy-plane correction only increases Q
        prop_assert!((g * g - q).abs() < 1e-12 * q);
    }

    /// Eigenvalue sum of the three-mode system equals the matrix trace.
    #[test]
    fn hybrid_eigenmode_trace(b_field in 0.6f64..0.8) {
        let dev = forty_five_device();
        let p = three_mode_params(&dev, b_field).unwrap();
        let modes = hybrid_eigenmodes(&dev, b_field).unwrap();
        let sum: Complex64 = modes.iter().sum();
        // Modes follow the λ = ω − iκ/2 convention.
        let trace = Complex64::new(
            p.omega_r2 + p.omega_r3 + p.omega_m,
            -(p.kappa_r2 + p.kappa_r3 + p.kappa_m) / 2.0,
        );
        prop_assert!((sum - trace).norm() <= 1e-9 * trace.norm());
    }

    /// Feedline amplitudes scale as √P, so populations are linear in power.
    #[test]
    fn amplitudes_scale_with_power(
        p_dbm in -60.0f64..-10.0,
        f_d in 19.0f64..21.0,
        b_field in 0.65f64..0.75,
    ) {
        let dev = forty_five_device();
        let base = DriveSpec {
            power: dbm_to_watts(p_dbm),
            omega_d: 2.0 * PI * f_d * 1e9,
            port: DrivePort::Feedline,
        };
        let mut up = base;
        up.power = 4.0 * base.power;
        let (a2, a3, b) = driven_amplitudes_45(&dev, &base, b_field).unwrap();
        let (u2, u3, ub) = driven_amplitudes_45(&dev, &up, b_field).unwrap();
        prop_assert!((u2.norm() / a2.norm() - 2.0).abs() < 1e-9);
        prop_assert!((u3.norm() / a3.norm() - 2.0).abs() < 1e-9);
        prop_assert!((ub.norm() / b.norm() - 2.0).abs() < 1e-9);
    }

    /// Squeezed variance falls with cooperativity and rises with the
    /// thermal occupation and the damping ratio.
    #[test]
    fn variance_monotonicities(
        c in 0.5f64..100.0,
        n_th in 0.0f64..2.0,
        ratio in 1e-5f64..0.5,
    ) {
        let kappa_m = 2.0 * PI * 4e6;
        let mk = |c: f64, n_th: f64, ratio: f64| {
            let g = 2.0 * PI * 12.835;
            SqueezingInputs {
                n_minus: c * (ratio * kappa_m) * kappa_m / (g * g),
                g_xz1: g,
                kappa_r1: ratio * kappa_m,
                kappa_m,
                n_th,
            }
        };
        let v = squeezed_variance(&mk(c, n_th, ratio)).unwrap().variance;
        let v_more_c = squeezed_variance(&mk(c * 1.5, n_th, ratio)).unwrap().variance;
        prop_assert!(v_more_c < v);
        let v_hotter = squeezed_variance(&mk(c, n_th + 0.5, ratio)).unwrap().variance;
        prop_assert!(v_hotter > v);
        let v_wider = squeezed_variance(&mk(c, n_th, ratio * 1.5)).unwrap().variance;
        prop_assert!(v_wider > v);
        let coop = cooperativity(&mk(c, n_th, ratio)).unwrap();
        prop_assert!((coop - c).abs() < 1e-9 * c);
    }

    /// |S21| never exceeds unity for a passive notch (κ_ext ≤ κ_total).
    #[test]
    fn s21_is_passive(
        kappa_tot in 1e3f64..1e7,
        ext_frac in 0.0f64..1.0,
        offset in -10.0f64..10.0,
    ) {
        let omega_r = 2.0 * PI * 500e6;
        let kappa = 2.0 * PI * kappa_tot;
        let grid = [omega_r + offset * kappa];
        let pts = s21_spectrum(omega_r, kappa, ext_frac * kappa, &grid).unwrap();
        prop_assert!(pts[0].s21.norm() <= 1.0 + 1e-12);
    }
}
