//! Command-line frontend.
//!
//! Exit codes: 0 when every check passes, 1 for input or usage errors, 2 when
//! the design is infeasible or a check fails.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use inductolink_core::harmonics::{
    ripple_current_spectrum, six_pulse_voltage_spectrum, thd, DEFAULT_K_MAX,
};
use inductolink_core::model::{Catalog, CouplerDesign, ZenerPart};
use inductolink_core::sizing::clamp_voltage_budget;
use inductolink_core::transient::{
    connect_inrush, disconnect_analytic, simulate_disconnect, zener_stress_check, ClampChain, Coil,
    ZenerStress,
};

use crate::catalog::{bundled_catalog, load_catalog};
use crate::design::{run_design, DesignInputs, DEFAULT_POWER_FACTOR};
use crate::export::{write_spectrum, write_waveform};

pub const CATALOG_ENV: &str = "INDUCTOLINK_CATALOG";
pub const DEFAULT_CATALOG_DIR: &str = "catalog";

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 1;
pub const EXIT_INFEASIBLE: u8 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "inductolink",
    version,
    about = "Inductor coupler design for capacitor-less DC links"
)]
pub struct Cli {
    /// Directory holding inductors.csv, zeners.csv and diodes.csv
    /// [default: ./catalog, else the bundled catalog]
    #[arg(long, global = true, env = CATALOG_ENV)]
    pub catalog_dir: Option<PathBuf>,

    /// Output file (design: CSV report twin; simulate/spectrum: CSV data)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Size the coupler, select clamp parts and check them
    Design(DesignArgs),
    /// Simulate the disconnection transient and write the waveform
    Simulate(SimulateArgs),
    /// Six-pulse ripple spectrum and ripple currents through a coil
    Spectrum(SpectrumArgs),
    /// Stress checks on an explicit inductor/zener/diode configuration
    Check(CheckArgs),
}

#[derive(Args, Debug)]
pub struct DesignArgs {
    /// Line voltage in kV
    #[arg(long)]
    pub vll_kv: f64,
    /// Apparent power in kVA
    #[arg(long)]
    pub s_kva: f64,
    /// Mains frequency in Hz
    #[arg(long, default_value_t = 50.0)]
    pub f_hz: f64,
    /// DC bus voltage in V
    #[arg(long)]
    pub vdc: f64,
    /// AC reactor size as a fraction of the base impedance
    #[arg(long, default_value_t = CouplerDesign::DEFAULT_PERCENT)]
    pub percent: f64,
    /// Power factor for the default DC current S * pf / vdc
    #[arg(long, default_value_t = DEFAULT_POWER_FACTOR)]
    pub pf: f64,
    /// Maximum DC coil current in A [default: S * pf / vdc]
    #[arg(long)]
    pub idc_max_a: Option<f64>,
    /// Sum of ripple current amplitudes in A [default: computed from the ideal rectifier]
    #[arg(long)]
    pub ripple_a: Option<f64>,
    /// Number of ripple harmonics (orders 6..6*kmax)
    #[arg(long, default_value_t = DEFAULT_K_MAX)]
    pub kmax: u32,
    /// Catalog inductor to use [default: smallest covering l_c]
    #[arg(long)]
    pub inductor: Option<String>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Coil inductance in uH
    #[arg(long)]
    pub l_uh: f64,
    /// Coil series resistance in ohm
    #[arg(long)]
    pub r_ohm: f64,
    /// Zener voltage in V
    #[arg(long)]
    pub vz: f64,
    /// Freewheel diode forward drop in V
    #[arg(long)]
    pub vf: f64,
    /// Freewheel diode dynamic resistance in ohm
    #[arg(long, default_value_t = 0.0)]
    pub rd_ohm: f64,
    /// Coil current at disconnection in A
    #[arg(long)]
    pub i0: f64,
    /// Integration step in us [default: t_ext / 10000]
    #[arg(long)]
    pub dt_us: Option<f64>,
    /// Zener surge current rating in A, for the stress margins
    #[arg(long, requires = "tsurge_ms")]
    pub izsm_a: Option<f64>,
    /// Zener surge rating duration in ms, for the stress margins
    #[arg(long, requires = "izsm_a")]
    pub tsurge_ms: Option<f64>,
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    /// Ideal average rectifier output in V
    #[arg(long)]
    pub vdo: f64,
    /// Number of ripple harmonics (orders 6..6*kmax)
    #[arg(long, default_value_t = DEFAULT_K_MAX)]
    pub kmax: u32,
    /// Series resistance in ohm
    #[arg(long)]
    pub r_ohm: f64,
    /// Series inductance in uH
    #[arg(long)]
    pub l_uh: f64,
    /// Mains frequency in Hz
    #[arg(long, default_value_t = 50.0)]
    pub f_hz: f64,
    /// DC current in A used as the current THD reference
    #[arg(long)]
    pub idc_a: Option<f64>,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    /// Catalog inductor name
    #[arg(long)]
    pub inductor: String,
    /// Catalog zener name
    #[arg(long)]
    pub zener: String,
    /// Catalog freewheel diode name
    #[arg(long)]
    pub diode: String,
    /// Coil current at disconnection in A
    #[arg(long)]
    pub i0: f64,
    /// Required coupler inductance in uH
    #[arg(long)]
    pub l_required_uh: Option<f64>,
    /// Voltage mismatch at connection in V, for the inrush figures
    #[arg(long)]
    pub delta_v: Option<f64>,
}

/// Failure of a subcommand, carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

fn input_err(e: impl Into<anyhow::Error>) -> Failure {
    Failure {
        code: EXIT_INPUT,
        error: e.into(),
    }
}

/// Parses `args` and runs the command. Returns the process exit code.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match run(&cli, stdout, stderr) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {:#}", f.error);
            f.code
        }
    }
}

pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<u8, Failure> {
    match &cli.command {
        Command::Design(a) => cmd_design(cli, a, stdout),
        Command::Simulate(a) => cmd_simulate(cli, a, stdout, stderr),
        Command::Spectrum(a) => cmd_spectrum(cli, a, stdout, stderr),
        Command::Check(a) => cmd_check(cli, a, stdout),
    }
}

/// Explicit directory first, then `./catalog`, then the bundled catalog.
pub fn resolve_catalog(dir: Option<&Path>) -> anyhow::Result<(Catalog, String)> {
    match dir {
        Some(dir) => Ok((load_catalog(dir)?, dir.display().to_string())),
        None if Path::new(DEFAULT_CATALOG_DIR).is_dir() => Ok((
            load_catalog(DEFAULT_CATALOG_DIR)?,
            DEFAULT_CATALOG_DIR.to_string(),
        )),
        None => Ok((bundled_catalog(), "bundled".to_string())),
    }
}

fn write_out(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes)
        .with_context(|| format!("cannot write {}", path.display()))
        .map_err(input_err)
}

fn io(e: io::Error) -> Failure {
    input_err(anyhow::Error::new(e).context("cannot write output"))
}

fn cmd_design(cli: &Cli, a: &DesignArgs, stdout: &mut dyn Write) -> Result<u8, Failure> {
    let (catalog, source) = resolve_catalog(cli.catalog_dir.as_deref()).map_err(input_err)?;
    let inputs = DesignInputs {
        v_ll_kv: a.vll_kv,
        s_kva: a.s_kva,
        f_hz: a.f_hz,
        v_dc: a.vdc,
        percent: a.percent,
        pf: a.pf,
        i_dc_max: a.idc_max_a,
        ripple_a: a.ripple_a,
        k_max: a.kmax,
        inductor: a.inductor.clone(),
    };
    let report = run_design(&inputs, &catalog, &source).map_err(input_err)?;
    stdout.write_all(report.to_text().as_bytes()).map_err(io)?;
    if let Some(path) = &cli.out {
        write_out(path, report.to_csv().as_bytes())?;
    }
    if report.passed() {
        return Ok(EXIT_OK);
    }
    Err(Failure {
        code: EXIT_INFEASIBLE,
        error: match &report.failure {
            Some(f) => anyhow!("{} stage: {}", f.stage, f.message),
            None => anyhow!("design checks failed"),
        },
    })
}

fn cmd_simulate(
    cli: &Cli,
    a: &SimulateArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<u8, Failure> {
    let coil = Coil::new(a.l_uh * 1e-6, a.r_ohm).map_err(input_err)?;
    let chain = ClampChain::new(a.vz, a.vf, a.rd_ohm).map_err(input_err)?;
    let zener = match (a.izsm_a, a.tsurge_ms) {
        (Some(i), Some(t)) => Some(ZenerPart::new("cli", a.vz, i, t * 1e-3).map_err(input_err)?),
        _ => None,
    };
    let exact = disconnect_analytic(coil, chain, a.i0).map_err(input_err)?;
    let dt = match a.dt_us {
        Some(us) => us * 1e-6,
        None if exact.t_ext() > 0.0 => exact.t_ext() / 1e4,
        None => 1e-6,
    };
    let result = simulate_disconnect(coil, chain, a.i0, dt).map_err(input_err)?;

    let mut csv = Vec::new();
    write_waveform(&mut csv, &result).map_err(io)?;
    let summary: &mut dyn Write = match &cli.out {
        Some(path) => {
            write_out(path, &csv)?;
            stdout
        }
        None => {
            stdout.write_all(&csv).map_err(io)?;
            stderr
        }
    };
    let mut lines = vec![
        format!("samples        {}", result.samples().len()),
        format!("t_ext_s        {}", result.t_ext()),
        format!("t_ext_exact_s  {}", exact.t_ext()),
        format!("v_peak_V       {}", result.v_peak()),
        format!("e_dissipated_J {}", result.e_dissipated()),
        format!("e_stored_J     {}", 0.5 * coil.l() * a.i0 * a.i0),
    ];
    let mut code = EXIT_OK;
    if let Some(z) = &zener {
        let s = zener_stress_check(&result, z);
        lines.extend(stress_lines(&s));
        if !s.passed() {
            code = EXIT_INFEASIBLE;
        }
    }
    for l in lines {
        writeln!(summary, "{l}").map_err(io)?;
    }
    Ok(code)
}

fn stress_lines(s: &ZenerStress) -> [String; 3] {
    [
        format!("zener_current_margin_A {}", s.current_margin),
        format!("zener_time_margin_s    {}", s.time_margin),
        format!(
            "zener_stress           {}",
            if s.passed() { "PASS" } else { "FAIL" }
        ),
    ]
}

fn cmd_spectrum(
    cli: &Cli,
    a: &SpectrumArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<u8, Failure> {
    if !(a.vdo > 0.0) {
        return Err(input_err(anyhow!("--vdo must be > 0")));
    }
    let v = six_pulse_voltage_spectrum(a.vdo, a.kmax, a.f_hz).map_err(input_err)?;
    let i = ripple_current_spectrum(&v, a.r_ohm, a.l_uh * 1e-6).map_err(input_err)?;

    let mut csv = Vec::new();
    write_spectrum(&mut csv, &v, &i).map_err(io)?;
    let summary: &mut dyn Write = match &cli.out {
        Some(path) => {
            write_out(path, &csv)?;
            stdout
        }
        None => {
            stdout.write_all(&csv).map_err(io)?;
            stderr
        }
    };
    let thd_v = thd(&v, a.vdo).map_err(input_err)?;
    writeln!(summary, "thd_v           {thd_v}").map_err(io)?;
    match a.idc_a {
        Some(idc) => {
            let thd_i = thd(&i, idc).map_err(input_err)?;
            writeln!(summary, "thd_i           {thd_i}").map_err(io)?;
        }
        None => writeln!(summary, "thd_i           - (pass --idc-a)").map_err(io)?,
    }
    writeln!(summary, "i_ripple_rss_A  {}", i.amplitude_rss()).map_err(io)?;
    writeln!(summary, "i_ripple_sum_A  {}", i.amplitude_sum()).map_err(io)?;
    Ok(EXIT_OK)
}

fn cmd_check(cli: &Cli, a: &CheckArgs, stdout: &mut dyn Write) -> Result<u8, Failure> {
    let (catalog, _) = resolve_catalog(cli.catalog_dir.as_deref()).map_err(input_err)?;
    let inductor = catalog
        .inductor(&a.inductor)
        .ok_or_else(|| input_err(anyhow!("inductor `{}` not in catalog", a.inductor)))?;
    let zener = catalog
        .zener(&a.zener)
        .ok_or_else(|| input_err(anyhow!("zener `{}` not in catalog", a.zener)))?;
    let diode = catalog
        .diode(&a.diode)
        .ok_or_else(|| input_err(anyhow!("diode `{}` not in catalog", a.diode)))?;
    if !(a.i0 >= 0.0) {
        return Err(input_err(anyhow!("--i0 must be >= 0")));
    }

    let chain = ClampChain::from_parts(zener, diode);
    let exact = disconnect_analytic(Coil::from(inductor), chain, a.i0).map_err(input_err)?;
    let stress = ZenerStress::evaluate(a.i0, exact.t_ext(), zener);

    let mut checks: Vec<(String, bool)> = vec![
        (
            format!("inductor current  {} A <= {} A", a.i0, inductor.i_max()),
            a.i0 <= inductor.i_max(),
        ),
        (
            format!("diode current     {} A <= {} A", a.i0, diode.i_max()),
            a.i0 <= diode.i_max(),
        ),
        (
            format!("zener current     {} A <= {} A", a.i0, zener.i_zsm()),
            stress.current_ok(),
        ),
        (
            format!(
                "zener duration    {} s <= {} s",
                exact.t_ext(),
                zener.t_surge()
            ),
            stress.time_ok(),
        ),
    ];
    if a.i0 > 0.0 {
        let budget = clamp_voltage_budget(inductor.p_max(), a.i0).map_err(input_err)?;
        checks.push((
            format!("clamp budget      {} V <= {} V", chain.v_eff(), budget),
            chain.v_eff() <= budget,
        ));
    }
    if let Some(l_req) = a.l_required_uh {
        let l_req = l_req * 1e-6;
        checks.push((
            format!("inductance        {} H >= {} H", inductor.l(), l_req),
            inductor.l() >= l_req,
        ));
    }

    let w = |stdout: &mut dyn Write, s: String| writeln!(stdout, "{s}").map_err(io);
    w(stdout, format!("v_peak_V          {}", exact.v_peak()))?;
    w(stdout, format!("t_ext_s           {}", exact.t_ext()))?;
    if let Some(dv) = a.delta_v {
        let inrush = connect_inrush(dv, inductor.l(), inductor.i_max()).map_err(input_err)?;
        w(stdout, format!("inrush_slew_A_s   {}", inrush.slew))?;
        w(
            stdout,
            format!(
                "inrush_t_limit_s  {}",
                inrush
                    .t_to_limit
                    .map_or_else(|| "unbounded".to_string(), |t| t.to_string())
            ),
        )?;
    }
    let mut all = true;
    for (label, ok) in checks {
        all &= ok;
        w(
            stdout,
            format!("{} {label}", if ok { "PASS" } else { "FAIL" }),
        )?;
    }
    Ok(if all { EXIT_OK } else { EXIT_INFEASIBLE })
}
