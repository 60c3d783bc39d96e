//! CSV emitters for waveforms and spectra.
//!
//! Numbers use Rust's shortest round-trip formatting, which is locale
//! independent and always uses `.` as the decimal separator.

use std::io::{self, Write};

use inductolink_core::model::{HarmonicSpectrum, TransientResult};

pub const WAVEFORM_HEADER: &str = "t_s,i_A,v_coil_V";
pub const SPECTRUM_HEADER: &str = "order,f_Hz,v_peak,i_peak";

/// One row per sample.
pub fn write_waveform(mut w: impl Write, result: &TransientResult) -> io::Result<()> {
    writeln!(w, "{WAVEFORM_HEADER}")?;
    for s in result.samples() {
        writeln!(w, "{},{},{}", s.t, s.i, s.v_coil)?;
    }
    w.flush()
}

/// One row per order of `voltages`; `currents` must hold the same orders.
pub fn write_spectrum(
    mut w: impl Write,
    voltages: &HarmonicSpectrum,
    currents: &HarmonicSpectrum,
) -> io::Result<()> {
    writeln!(w, "{SPECTRUM_HEADER}")?;
    for (v, i) in voltages.entries().iter().zip(currents.entries()) {
        debug_assert_eq!(v.order, i.order);
        let f = v.order as f64 * voltages.f0();
        writeln!(w, "{},{},{},{}", v.order, f, v.amplitude, i.amplitude)?;
    }
    w.flush()
}
