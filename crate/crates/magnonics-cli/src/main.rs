//! Command-line runner for cavity-magnonics device calculations: derived
//! parameters, drive response and backaction, parameter sweeps, transmission
//! spectra, squeezing estimates, and the time-domain oracle.

mod config;
mod output;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use num_complex::Complex64;

use magnonics::{
    g_xz, integrate_sampled, magnon_ext_damping, squeezed_variance, squeezing_validity,
    thermal_occupation, verify_backaction, Geometry, OperatingPoint, SqueezingInputs,
};

use config::{load_config, RunContext};
use output::{deliver, Cell, Format, Table};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

#[derive(Parser)]
#[command(
    name = "magnonics",
    version,
    about = "Cavity-magnonics device calculations and sweeps"
)]
struct Cli {
    /// Preset name (table1_top_cpw, table2_45deg) or path to a TOML config.
    #[arg(long, global = true, default_value = "table1_top_cpw")]
    config: String,
    /// Output file; stdout when omitted. File outputs get a manifest
    /// alongside.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Worker threads for sweeps; all cores when omitted.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Derived circuit, magnet, and coupling parameters.
    Params {
        /// Temperature for the thermal-occupation row (mK).
        #[arg(long, default_value_t = 10.0)]
        temperature_mk: f64,
    },
    /// Drive response and fundamental-mode backaction at the configured
    /// operating point.
    Backaction {
        /// Iterate the probe frequency to the shifted resonance.
        #[arg(long)]
        self_consistent: bool,
        /// Evaluate the response at this probe frequency (Hz) instead of
        /// the bare fundamental.
        #[arg(long, conflicts_with = "self_consistent")]
        probe_freq_hz: Option<f64>,
    },
    /// Evaluate the configured [sweep] grid.
    Sweep {
        /// Iterate the probe frequency to the shifted resonance, per point.
        #[arg(long)]
        self_consistent: bool,
    },
    /// Transmission spectrum around the backaction-shifted fundamental.
    Spectrum {
        /// Probe span (Hz); 0 selects 20 effective linewidths.
        #[arg(long, default_value_t = 0.0)]
        span_hz: f64,
        /// Number of probe points.
        #[arg(long, default_value_t = 801)]
        points: usize,
        /// Iterate the probe frequency to the shifted resonance.
        #[arg(long)]
        self_consistent: bool,
    },
    /// Two-tone squeezing estimate with validity checks.
    Squeeze {
        /// Red-tone magnon population; computed from the configured drive
        /// when omitted.
        #[arg(long)]
        n_minus: Option<f64>,
        /// Target cooperativity; sets the population that reaches it.
        #[arg(long, conflicts_with = "n_minus")]
        cooperativity: Option<f64>,
        /// Thermal occupation of the fundamental; computed from the
        /// temperature when omitted.
        #[arg(long)]
        n_th: Option<f64>,
        /// Temperature used when --n-th is omitted (mK).
        #[arg(long, default_value_t = 10.0, conflicts_with = "n_th")]
        temperature_mk: f64,
    },
    /// Integrate the linearized equations of motion and compare the fitted
    /// ringdown against the analytic backaction (top-CPW geometry).
    Oracle {
        /// Mean magnon amplitude |β̄|; √(n_m from the drive) when omitted.
        #[arg(long)]
        beta_bar: Option<f64>,
        /// Write the coupled trajectory to this CSV file.
        #[arg(long)]
        dump_trajectory: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

/// 2 for configuration and validation failures, 3 for numerical failures,
/// 1 for environment problems such as I/O.
fn exit_code_for(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<magnonics::Error>() {
            return match e {
                magnonics::Error::IntegrationDiverged { .. }
                | magnonics::Error::FitFailed { .. }
                | magnonics::Error::DivergentVariance => 3,
                _ => 2,
            };
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return 1;
        }
    }
    2
}

fn run(cli: &Cli) -> Result<()> {
    let ctx = load_config(&cli.config)?.build()?;
    let (table, command_desc, warnings) = match &cli.command {
        Command::Params { temperature_mk } => (
            params_table(&ctx, *temperature_mk)?,
            format!("params --temperature-mk {temperature_mk}"),
            0,
        ),
        Command::Backaction {
            self_consistent,
            probe_freq_hz,
        } => (
            backaction_table(&ctx, *self_consistent, *probe_freq_hz)?,
            format!("backaction --self-consistent {self_consistent}"),
            0,
        ),
        Command::Sweep { self_consistent } => {
            let outcome = sweep::run_sweep(&ctx, cli.threads, *self_consistent)?;
            (
                outcome.table,
                format!("sweep --self-consistent {self_consistent}"),
                outcome.warnings,
            )
        }
        Command::Spectrum {
            span_hz,
            points,
            self_consistent,
        } => (
            spectrum_table(&ctx, *span_hz, *points, *self_consistent)?,
            format!("spectrum --span-hz {span_hz} --points {points}"),
            0,
        ),
        Command::Squeeze {
            n_minus,
            cooperativity,
            n_th,
            temperature_mk,
        } => (
            squeeze_table(&ctx, *n_minus, *cooperativity, *n_th, *temperature_mk)?,
            "squeeze".to_string(),
            0,
        ),
        Command::Oracle {
            beta_bar,
            dump_trajectory,
        } => (
            oracle_table(&ctx, *beta_bar, dump_trajectory.as_deref())?,
            "oracle".to_string(),
            0,
        ),
    };
    deliver(
        &table,
        cli.format,
        cli.out.as_deref(),
        &command_desc,
        &ctx.config,
        warnings,
    )?;
    Ok(())
}

fn param_row(table: &mut Table, name: &str, value: Cell, unit: &str) {
    table.push(vec![name.into(), value, unit.into()]);
}

fn params_table(ctx: &RunContext, temperature_mk: f64) -> Result<Table> {
    if temperature_mk < 0.0 {
        bail!("temperature_mk must be >= 0, got {temperature_mk}");
    }
    let dev = &ctx.device;
    let res = &dev.resonator;
    let omega_r1 = res.omega_r1();
    let mut t = Table::new(&["parameter", "value", "unit"]);

    let geometry = match dev.geometry {
        Geometry::TopCpw => "top_cpw",
        Geometry::FortyFive => "forty_five",
    };
    param_row(&mut t, "geometry", geometry.into(), "");
    param_row(&mut t, "magnet_material", dev.magnet.name.as_str().into(), "");
    param_row(&mut t, "z0", dev.resonator.z0.into(), "Ohm");
    param_row(&mut t, "omega_r1", (omega_r1 / TWO_PI).into(), "Hz");
    param_row(&mut t, "c_total", res.total_capacitance().into(), "F");
    param_row(&mut t, "l_total", res.total_inductance().into(), "H");
    param_row(&mut t, "i_zpf", res.i_zpf().into(), "A");
    param_row(&mut t, "phi_zpf", res.phi_zpf().into(), "Wb");

    for (i, &omega) in res.mode_freqs.iter().enumerate() {
        let tag = |s: &str| format!("mode{}_{s}", i + 1);
        param_row(&mut t, &tag("freq"), (omega / TWO_PI).into(), "Hz");
        param_row(
            &mut t,
            &tag("kappa_internal"),
            (res.kappa_internal[i] / TWO_PI).into(),
            "Hz",
        );
        let kappa_ext = res.external_damping(omega)?;
        param_row(&mut t, &tag("kappa_ext"), (kappa_ext / TWO_PI).into(), "Hz");
        param_row(
            &mut t,
            &tag("kappa_total"),
            (res.total_damping(omega)? / TWO_PI).into(),
            "Hz",
        );
        if kappa_ext > 0.0 {
            param_row(&mut t, &tag("q_c"), res.coupling_q(omega)?.into(), "");
        }
    }

    param_row(&mut t, "spin_count", dev.magnet.spin_count().into(), "");
    param_row(
        &mut t,
        "b_rf",
        magnonics::b_rf(dev.wire_width).into(),
        "T/A",
    );
    let couplings = dev.couplings()?;
    param_row(&mut t, "g_xz1", (couplings.g_xz1 / TWO_PI).into(), "Hz");
    if dev.geometry == Geometry::FortyFive {
        let b = ctx.b_field.expect("validated");
        param_row(&mut t, "b_field", b.into(), "T");
        for (i, g) in couplings.g_xx.iter().enumerate() {
            param_row(
                &mut t,
                &format!("g_xx_mode{}", i + 2),
                (g / TWO_PI).into(),
                "Hz",
            );
        }
    }

    param_row(&mut t, "omega_m", (ctx.omega_m / TWO_PI).into(), "Hz");
    param_row(
        &mut t,
        "kappa_m_internal",
        (dev.kappa_m_internal / TWO_PI).into(),
        "Hz",
    );
    param_row(
        &mut t,
        "kappa_m_ext",
        (dev.kappa_m_ext(ctx.omega_m) / TWO_PI).into(),
        "Hz",
    );
    param_row(
        &mut t,
        "kappa_m_total",
        (dev.kappa_m_total(ctx.omega_m) / TWO_PI).into(),
        "Hz",
    );
    if dev.geometry == Geometry::TopCpw {
        // Radiative coupling into the magnon line, always derived from the
        // spin count and wire geometry (any configured override is ignored
        // for these two rows).
        let (kappa_rad, q_c) = magnon_ext_damping(
            &dev.magnet,
            dev.wire_width,
            ctx.omega_m,
            dev.resonator.z0,
        );
        param_row(
            &mut t,
            "kappa_m_radiative",
            (kappa_rad / TWO_PI).into(),
            "Hz",
        );
        param_row(&mut t, "q_m_c", q_c.into(), "");
    }
    param_row(
        &mut t,
        "kerr_per_magnon",
        (dev.magnet.kerr_k / TWO_PI).into(),
        "Hz",
    );
    param_row(&mut t, "temperature", temperature_mk.into(), "mK");
    param_row(
        &mut t,
        "n_th_r1",
        thermal_occupation(omega_r1, temperature_mk * 1e-3).into(),
        "",
    );
    Ok(t)
}

fn backaction_table(
    ctx: &RunContext,
    self_consistent: bool,
    probe_freq_hz: Option<f64>,
) -> Result<Table> {
    let probe = probe_freq_hz.map(|f| TWO_PI * f);
    if let Some(p) = probe {
        if p <= 0.0 {
            bail!("probe_freq_hz must be > 0");
        }
    }
    let (n_m, result) = sweep::point_backaction(ctx, self_consistent, probe)?;
    let res = &ctx.device.resonator;
    let omega_r1 = res.omega_r1();
    let kappa_r1 = res.total_damping(omega_r1)?;

    let mut t = Table::new(&[
        "omega_m_hz",
        "drive_freq_hz",
        "detuning_hz",
        "n_m",
        "delta_omega_r1_hz",
        "delta_kappa_r1_hz",
        "omega_r1_eff_hz",
        "kappa_r1_eff_hz",
        "weak_coupling_ok",
        "kerr_ok",
        "population_ok",
    ]);
    t.push(vec![
        (ctx.omega_m / TWO_PI).into(),
        (ctx.drive.omega_d / TWO_PI).into(),
        ((ctx.drive.omega_d - ctx.omega_m) / TWO_PI).into(),
        n_m.into(),
        (result.delta_omega_r1 / TWO_PI).into(),
        (result.delta_kappa_r1 / TWO_PI).into(),
        ((omega_r1 + result.delta_omega_r1) / TWO_PI).into(),
        ((kappa_r1 + result.delta_kappa_r1) / TWO_PI).into(),
        result.weak_coupling_ok.into(),
        result.kerr_ok.into(),
        result.population_ok.into(),
    ]);
    Ok(t)
}

fn spectrum_table(
    ctx: &RunContext,
    span_hz: f64,
    points: usize,
    self_consistent: bool,
) -> Result<Table> {
    if points < 2 {
        bail!("points must be >= 2, got {points}");
    }
    if span_hz < 0.0 {
        bail!("span_hz must be >= 0, got {span_hz}");
    }
    let (_, result) = sweep::point_backaction(ctx, self_consistent, None)?;
    let res = &ctx.device.resonator;
    let omega_r1 = res.omega_r1();
    let omega_eff = omega_r1 + result.delta_omega_r1;
    let kappa_eff = res.total_damping(omega_r1)? + result.delta_kappa_r1;
    if kappa_eff <= 0.0 {
        bail!(
            "effective linewidth is not positive ({} Hz): the drive has \
             anti-damped the fundamental past threshold",
            kappa_eff / TWO_PI
        );
    }
    let kappa_ext = res.external_damping(omega_r1)?;

    let span = if span_hz == 0.0 {
        20.0 * kappa_eff
    } else {
        TWO_PI * span_hz
    };
    let grid: Vec<f64> = (0..points)
        .map(|i| omega_eff - span / 2.0 + span * i as f64 / (points - 1) as f64)
        .collect();
    let spectrum = magnonics::s21_spectrum(omega_eff, kappa_eff, kappa_ext, &grid)?;

    let mut t = Table::new(&[
        "probe_freq_hz",
        "re_s21",
        "im_s21",
        "abs_s21",
        "abs_s21_db",
    ]);
    for p in spectrum {
        let mag = p.s21.norm();
        t.push(vec![
            (p.omega_p / TWO_PI).into(),
            p.s21.re.into(),
            p.s21.im.into(),
            mag.into(),
            (20.0 * mag.log10()).into(),
        ]);
    }
    Ok(t)
}

fn squeeze_table(
    ctx: &RunContext,
    n_minus_arg: Option<f64>,
    cooperativity_arg: Option<f64>,
    n_th_arg: Option<f64>,
    temperature_mk: f64,
) -> Result<Table> {
    let dev = &ctx.device;
    let omega_r1 = dev.resonator.omega_r1();
    let kappa_r1 = dev.resonator.total_damping(omega_r1)?;
    let kappa_m = dev.kappa_m_total(ctx.omega_m);
    let g = g_xz(dev);

    let n_th = match n_th_arg {
        Some(n) => n,
        None => {
            if temperature_mk < 0.0 {
                bail!("temperature_mk must be >= 0, got {temperature_mk}");
            }
            thermal_occupation(omega_r1, temperature_mk * 1e-3)
        }
    };
    let n_minus = if let Some(n) = n_minus_arg {
        n
    } else if let Some(c) = cooperativity_arg {
        if c < 0.0 {
            bail!("cooperativity must be >= 0, got {c}");
        }
        c * kappa_r1 * kappa_m / (g * g)
    } else {
        let (n_m, _) = sweep::point_backaction(ctx, false, None)?;
        n_m
    };

    let inputs = SqueezingInputs {
        n_minus,
        g_xz1: g,
        kappa_r1,
        kappa_m,
        n_th,
    };
    let variance = squeezed_variance(&inputs)?;
    let validity = squeezing_validity(dev, &ctx.drive, &inputs)?;

    let mut t = Table::new(&["quantity", "value", "unit"]);
    param_row(&mut t, "n_minus", n_minus.into(), "");
    param_row(&mut t, "g_xz1", (g / TWO_PI).into(), "Hz");
    param_row(&mut t, "kappa_r1", (kappa_r1 / TWO_PI).into(), "Hz");
    param_row(&mut t, "kappa_m", (kappa_m / TWO_PI).into(), "Hz");
    param_row(&mut t, "n_th", n_th.into(), "");
    param_row(&mut t, "cooperativity", validity.cooperativity.into(), "");
    param_row(&mut t, "variance_2dx1sq", variance.variance.into(), "");
    param_row(&mut t, "squeezing", variance.squeezing_db.into(), "dB");
    param_row(
        &mut t,
        "below_validity",
        variance.below_validity.into(),
        "",
    );
    param_row(
        &mut t,
        "population_ratio",
        validity.population_ratio.into(),
        "",
    );
    param_row(&mut t, "population_ok", validity.population_ok.into(), "");
    param_row(&mut t, "kerr_ratio", validity.kerr_ratio.into(), "");
    param_row(&mut t, "kerr_ok", validity.kerr_ok.into(), "");
    param_row(
        &mut t,
        "cooperativity_ok",
        validity.cooperativity_ok.into(),
        "",
    );
    param_row(
        &mut t,
        "sideband_ratio",
        validity.sideband_ratio.into(),
        "",
    );
    param_row(&mut t, "sideband_ok", validity.sideband_ok.into(), "");
    param_row(&mut t, "all_ok", validity.all_ok().into(), "");
    Ok(t)
}

fn oracle_table(
    ctx: &RunContext,
    beta_bar_arg: Option<f64>,
    dump: Option<&std::path::Path>,
) -> Result<Table> {
    if ctx.device.geometry != Geometry::TopCpw {
        bail!("the time-domain oracle integrates the top-CPW equations of motion");
    }
    let beta_bar = match beta_bar_arg {
        Some(b) => {
            if b < 0.0 {
                bail!("beta_bar must be >= 0, got {b}");
            }
            b
        }
        None => {
            let (n_m, _) = sweep::point_backaction(ctx, false, None)?;
            n_m.sqrt()
        }
    };
    let point = OperatingPoint {
        beta_bar: Complex64::new(beta_bar, 0.0),
        delta: ctx.delta,
        omega_m: ctx.omega_m,
    };
    let report = verify_backaction(&ctx.device, &point)?;

    if let Some(path) = dump {
        let mut resolved = ctx.device.clone();
        if resolved.kappa_m_ext_override.is_none() {
            resolved.kappa_m_ext_override = Some(resolved.kappa_m_ext(ctx.omega_m));
        }
        let traj = integrate_sampled(
            &resolved,
            point.beta_bar,
            point.delta,
            resolved.resonator.phi_zpf(),
            report.t_end,
            report.dt,
            1_000_000,
        )?;
        let mut t = Table::new(&[
            "time_s",
            "re_delta_beta_m",
            "im_delta_beta_m",
            "phi_wb",
            "phi_dot_wb_per_s",
        ]);
        for (time, state) in traj.times.iter().zip(traj.states.iter()) {
            t.push(vec![
                (*time).into(),
                state.delta_beta_m.re.into(),
                state.delta_beta_m.im.into(),
                state.phi.into(),
                state.phi_dot.into(),
            ]);
        }
        std::fs::write(path, t.render_csv())
            .with_context(|| format!("writing trajectory {}", path.display()))?;
    }

    let mut t = Table::new(&["quantity", "value", "unit"]);
    param_row(&mut t, "beta_bar", beta_bar.into(), "");
    param_row(&mut t, "detuning", (ctx.delta / TWO_PI).into(), "Hz");
    param_row(
        &mut t,
        "delta_omega_analytic",
        (report.delta_omega_analytic / TWO_PI).into(),
        "Hz",
    );
    param_row(
        &mut t,
        "delta_omega_oracle",
        (report.delta_omega_oracle / TWO_PI).into(),
        "Hz",
    );
    param_row(
        &mut t,
        "relative_error_omega",
        report.relative_error_omega.into(),
        "",
    );
    param_row(
        &mut t,
        "delta_kappa_analytic",
        (report.delta_kappa_analytic / TWO_PI).into(),
        "Hz",
    );
    param_row(
        &mut t,
        "delta_kappa_oracle",
        (report.delta_kappa_oracle / TWO_PI).into(),
        "Hz",
    );
    param_row(
        &mut t,
        "relative_error_kappa",
        report.relative_error_kappa.into(),
        "",
    );
    param_row(
        &mut t,
        "weak_coupling_ratio",
        report.weak_coupling_ratio.into(),
        "",
    );
    param_row(&mut t, "dt", report.dt.into(), "s");
    param_row(&mut t, "t_end", report.t_end.into(), "s");
    Ok(t)
}
