//! TOML run configuration: schema, presets, validation, and conversion into
//! the library's device and drive types.
//!
//! Frequencies are linear Hz, fields Tesla, powers dBm, lengths meters.
//! Unknown keys are rejected so typos surface as errors rather than as
//! silently ignored settings.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use magnonics::{DeviceConfig, DrivePort, DriveSpec, Geometry, MagnetSpec, ResonatorSpec};

pub const PRESET_TABLE1: &str = include_str!("../presets/table1_top_cpw.toml");
pub const PRESET_TABLE2: &str = include_str!("../presets/table2_45deg.toml");

/// Built-in preset names accepted wherever a config path is accepted.
pub const PRESET_NAMES: [&str; 2] = ["table1_top_cpw", "table2_45deg"];

const TWO_PI: f64 = 2.0 * PI;

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub device: DeviceSection,
    pub resonator: ResonatorSection,
    pub magnet: MagnetSection,
    pub drive: DriveSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceSection {
    pub geometry: GeometryName,
    pub wire_width_m: f64,
    pub kappa_m_internal_hz: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa_m_ext_override_hz: Option<f64>,
    #[serde(default)]
    pub apply_anisotropy: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GeometryName {
    TopCpw,
    FortyFive,
}

impl From<GeometryName> for Geometry {
    fn from(g: GeometryName) -> Geometry {
        match g {
            GeometryName::TopCpw => Geometry::TopCpw,
            GeometryName::FortyFive => Geometry::FortyFive,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ResonatorSection {
    pub z0_ohm: f64,
    pub mode_freqs_hz: Vec<f64>,
    pub kappa_internal_hz: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa_ext_override_hz: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa_ext_calibration: Option<CalibrationSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coupling_capacitance_f: Option<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationSection {
    /// Known external coupling at the reference frequency (Hz).
    pub kappa_ext_hz: f64,
    /// Reference frequency (Hz).
    pub freq_hz: f64,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct MagnetSection {
    /// Material preset: "yig" or "vtcne". Explicit fields below override
    /// individual preset values; without a preset all of them are required.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub material: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_s_a_per_m: Option<f64>,
    /// Saturation magnetization in emu/cm³ (1 emu/cm³ = 1e3 A/m).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_s_emu_per_cm3: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dims_m: Option<[f64; 3]>,
    /// Gyromagnetic ratio as a linear frequency-per-field, Hz/T.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_hz_per_t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_eff_a_per_m: Option<f64>,
    /// Kerr coefficient as a linear frequency per magnon, Hz.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kerr_hz: Option<f64>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct DriveSection {
    pub power_dbm: f64,
    pub port: PortName,
    /// Absolute drive frequency (Hz); exclusive with `detuning_hz`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frequency_hz: Option<f64>,
    /// Drive detuning Δ/2π = (ω_d − ω_m)/2π (Hz); exclusive with
    /// `frequency_hz`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detuning_hz: Option<f64>,
    /// Kittel frequency (Hz); required for the top-CPW geometry, where the
    /// bias field enters only through it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_m_hz: Option<f64>,
    /// Bias field (T); required for the 45-degree geometry.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b_field_t: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PortName {
    MagnonLine,
    Feedline,
}

impl From<PortName> for DrivePort {
    fn from(p: PortName) -> DrivePort {
        match p {
            PortName::MagnonLine => DrivePort::MagnonLine,
            PortName::Feedline => DrivePort::Feedline,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detuning_hz: Option<AxisSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub drive_freq_hz: Option<AxisSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b_field_t: Option<AxisSection>,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSection {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

/// Load a configuration from a preset name or a TOML file path.
pub fn load_config(name_or_path: &str) -> Result<ConfigFile> {
    let (source, origin): (String, String) = if PRESET_NAMES.contains(&name_or_path) {
        let text = match name_or_path {
            "table1_top_cpw" => PRESET_TABLE1,
            "table2_45deg" => PRESET_TABLE2,
            _ => unreachable!(),
        };
        (text.to_string(), format!("preset {name_or_path}"))
    } else {
        let path = Path::new(name_or_path);
        let text = fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {name_or_path}"))?;
        (text, name_or_path.to_string())
    };
    let config: ConfigFile = toml::from_str(&source)
        .with_context(|| format!("invalid configuration in {origin}"))?;
    Ok(config)
}

/// A validated run context: library types plus the resolved operating point.
#[derive(Debug, Clone)]
pub struct RunContext {
    pub config: ConfigFile,
    pub device: DeviceConfig,
    pub drive: DriveSpec,
    /// Kittel frequency at the operating point (rad/s).
    pub omega_m: f64,
    /// Drive detuning Δ = ω_d − ω_m (rad/s).
    pub delta: f64,
    /// Bias field (T); None for the top-CPW geometry.
    pub b_field: Option<f64>,
}

impl ConfigFile {
    /// Validate and convert into library types.
    pub fn build(&self) -> Result<RunContext> {
        let device = self.build_device()?;
        device
            .validate()
            .map_err(|e| anyhow::anyhow!("invalid device: {e}"))?;

        let geometry = device.geometry;
        let port: DrivePort = self.drive.port.into();
        match (geometry, port) {
            (Geometry::TopCpw, DrivePort::MagnonLine) => {}
            (Geometry::FortyFive, DrivePort::Feedline) => {}
            (Geometry::TopCpw, _) => {
                bail!("the top-CPW geometry is driven through port = \"magnon_line\"")
            }
            (Geometry::FortyFive, _) => {
                bail!("the 45-degree geometry is driven through port = \"feedline\"")
            }
        }

        let (omega_m, b_field) = match geometry {
            Geometry::TopCpw => {
                if self.drive.b_field_t.is_some() {
                    bail!("b_field_t does not apply to the top-CPW geometry; set omega_m_hz");
                }
                let f = self
                    .drive
                    .omega_m_hz
                    .context("the top-CPW geometry needs drive.omega_m_hz")?;
                if f <= 0.0 {
                    bail!("omega_m_hz must be > 0, got {f}");
                }
                (TWO_PI * f, None)
            }
            Geometry::FortyFive => {
                if self.drive.omega_m_hz.is_some() {
                    bail!("omega_m_hz does not apply to the 45-degree geometry; set b_field_t");
                }
                let b = self
                    .drive
                    .b_field_t
                    .context("the 45-degree geometry needs drive.b_field_t")?;
                if b <= 0.0 {
                    bail!("b_field_t must be > 0, got {b}");
                }
                (device.magnet.larmor_frequency(b), Some(b))
            }
        };

        let (omega_d, delta) = match (self.drive.frequency_hz, self.drive.detuning_hz) {
            (Some(_), Some(_)) => {
                bail!("drive.frequency_hz and drive.detuning_hz are mutually exclusive")
            }
            (Some(f), None) => {
                if f <= 0.0 {
                    bail!("drive.frequency_hz must be > 0, got {f}");
                }
                (TWO_PI * f, TWO_PI * f - omega_m)
            }
            (None, Some(d)) => (omega_m + TWO_PI * d, TWO_PI * d),
            (None, None) => bail!("set drive.frequency_hz or drive.detuning_hz"),
        };
        if omega_d <= 0.0 {
            bail!(
                "resolved drive frequency is not positive ({} Hz)",
                omega_d / TWO_PI
            );
        }

        let drive = DriveSpec {
            power: magnonics::dbm_to_watts(self.drive.power_dbm),
            omega_d,
            port,
        };
        drive
            .validate()
            .map_err(|e| anyhow::anyhow!("invalid drive: {e}"))?;

        self.validate_sweep(geometry)?;

        Ok(RunContext {
            config: self.clone(),
            device,
            drive,
            omega_m,
            delta,
            b_field,
        })
    }

    fn build_device(&self) -> Result<DeviceConfig> {
        let r = &self.resonator;
        let resonator = ResonatorSpec {
            z0: r.z0_ohm,
            mode_freqs: r.mode_freqs_hz.iter().map(|f| TWO_PI * f).collect(),
            kappa_internal: r.kappa_internal_hz.iter().map(|k| TWO_PI * k).collect(),
            coupling_capacitance: r.coupling_capacitance_f,
            kappa_ext_calibration: r
                .kappa_ext_calibration
                .map(|c| (TWO_PI * c.kappa_ext_hz, TWO_PI * c.freq_hz)),
            kappa_ext_override: r.kappa_ext_override_hz.as_ref().map(|v| {
                if v.len() == r.mode_freqs_hz.len() {
                    v.iter().map(|k| Some(TWO_PI * k)).collect()
                } else {
                    Vec::new() // length mismatch caught by validate below
                }
            }),
        };
        if let Some(ov) = &r.kappa_ext_override_hz {
            if ov.len() != r.mode_freqs_hz.len() {
                bail!(
                    "kappa_ext_override_hz has {} entries for {} modes",
                    ov.len(),
                    r.mode_freqs_hz.len()
                );
            }
        }

        Ok(DeviceConfig {
            geometry: self.device.geometry.into(),
            resonator,
            magnet: self.magnet.build()?,
            wire_width: self.device.wire_width_m,
            kappa_m_internal: TWO_PI * self.device.kappa_m_internal_hz,
            kappa_m_ext_override: self.device.kappa_m_ext_override_hz.map(|k| TWO_PI * k),
            apply_anisotropy: self.device.apply_anisotropy,
            thresholds: Default::default(),
        })
    }

    fn validate_sweep(&self, geometry: Geometry) -> Result<()> {
        let Some(sweep) = &self.sweep else {
            return Ok(());
        };
        // The bound comparison is negated so NaN endpoints are rejected too.
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        let check = |name: &str, axis: &AxisSection| -> Result<()> {
            if axis.count < 2 {
                bail!("sweep.{name}.count must be >= 2, got {}", axis.count);
            }
            if !(axis.min < axis.max) {
                bail!(
                    "sweep.{name} needs min < max, got [{}, {}]",
                    axis.min,
                    axis.max
                );
            }
            Ok(())
        };
        if let Some(a) = &sweep.detuning_hz {
            check("detuning_hz", a)?;
        }
        if let Some(a) = &sweep.drive_freq_hz {
            check("drive_freq_hz", a)?;
        }
        if let Some(a) = &sweep.b_field_t {
            check("b_field_t", a)?;
        }
        if sweep.detuning_hz.is_some() && sweep.drive_freq_hz.is_some() {
            bail!("sweep over detuning_hz and drive_freq_hz at once is ambiguous; pick one");
        }
        if sweep.detuning_hz.is_none() && sweep.drive_freq_hz.is_none() && sweep.b_field_t.is_none()
        {
            bail!("the [sweep] table declares no axis");
        }
        if geometry == Geometry::TopCpw && sweep.b_field_t.is_some() {
            bail!("a b_field_t sweep does not apply to the top-CPW geometry");
        }
        Ok(())
    }
}

impl MagnetSection {
    fn build(&self) -> Result<MagnetSpec> {
        let base = match self.material.as_deref() {
            Some("yig") => Some(MagnetSpec::yig()),
            Some("vtcne") => Some(MagnetSpec::vtcne()),
            Some(other) => bail!("unknown magnet material {other:?}; use \"yig\" or \"vtcne\""),
            None => None,
        };
        if self.m_s_a_per_m.is_some() && self.m_s_emu_per_cm3.is_some() {
            bail!("m_s_a_per_m and m_s_emu_per_cm3 are mutually exclusive");
        }
        let m_s_override = self
            .m_s_a_per_m
            .or(self.m_s_emu_per_cm3.map(|m| m * 1e3));

        let mut spec = match base {
            Some(spec) => spec,
            None => {
                let m_s = m_s_override.context("magnet needs material or m_s")?;
                let dims = self.dims_m.context("magnet needs material or dims_m")?;
                let gamma = self
                    .gamma_hz_per_t
                    .context("magnet needs material or gamma_hz_per_t")?;
                MagnetSpec {
                    m_s,
                    dims: (dims[0], dims[1], dims[2]),
                    gamma: TWO_PI * gamma,
                    m_eff: self.m_eff_a_per_m.unwrap_or(m_s),
                    kerr_k: TWO_PI * self.kerr_hz.unwrap_or(0.0),
                    name: "custom".into(),
                }
            }
        };
        if let Some(m_s) = m_s_override {
            spec.m_s = m_s;
        }
        if let Some(d) = self.dims_m {
            spec.dims = (d[0], d[1], d[2]);
        }
        if let Some(g) = self.gamma_hz_per_t {
            spec.gamma = TWO_PI * g;
        }
        if let Some(m) = self.m_eff_a_per_m {
            spec.m_eff = m;
        }
        if let Some(k) = self.kerr_hz {
            spec.kerr_k = TWO_PI * k;
        }
        spec.validate()
            .map_err(|e| anyhow::anyhow!("invalid magnet: {e}"))?;
        Ok(spec)
    }
}
