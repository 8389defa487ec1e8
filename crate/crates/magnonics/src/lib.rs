//! Cavity magnonics with a low-frequency resonator: a 500 MHz coplanar
//! waveguide mode coupled to a ~20 GHz Kittel magnon through the
//! flux-dependence of the magnon frequency (an XZ interaction) and, in the
//! 45-degree geometry, through resonant exchange with higher resonator
//! harmonics (XX interactions).
//!
//! The crate derives circuit and coupling parameters from device geometry
//! ([`resonator`], [`magnon`]), evaluates drive response and dynamical
//! backaction on the fundamental mode ([`dynamics`]), cross-checks those
//! formulas against direct integration of the equations of motion
//! ([`timedomain`]), and estimates transmission spectra and two-tone
//! squeezing performance ([`analysis`]).
//!
//! Conventions: all frequencies and damping rates are angular (rad/s),
//! all quantities SI. Detunings are Δ = ω_d − ω_m unless a function
//! documents otherwise.

pub mod analysis;
pub mod constants;
pub mod dynamics;
pub mod error;
pub mod magnon;
pub mod resonator;
pub mod timedomain;

pub use analysis::{
    cooperativity, s21_spectrum, squeezed_variance, squeezing_validity, SpectrumPoint,
    SqueezingInputs, SqueezingValidity, VarianceResult,
};
pub use constants::{dbm_to_watts, thermal_occupation, PhysicalConstants};
pub use dynamics::{
    backaction_45, backaction_45_from_population, backaction_top, driven_amplitudes_45,
    hybrid_eigenmodes, magnon_number_45, magnon_number_direct, self_consistent_probe,
    three_mode_params, BackactionResult, DeviceConfig, DrivePort, DriveSpec, Geometry,
    ThreeModeParams, ValidityThresholds,
};
pub use error::{Error, Result};
pub use magnon::{
    anisotropy_g_factor, anisotropy_q_factor, b_rf, g_xx_harmonic, g_xz, magnon_ext_damping,
    CouplingSet, MagnetSpec,
};
pub use resonator::ResonatorSpec;
pub use timedomain::{
    fit_ringdown, fit_ringdown_full, integrate_linearized, integrate_sampled, verify_backaction,
    OperatingPoint, OracleReport, RingdownFit, SimParams, SimState, Trajectory,
};
