//! Domain types shared by the sizing, harmonics and transient modules.
//!
//! Every type checks its invariants in its constructor and exposes read-only
//! accessors, so a value that exists is a valid value.

use alloc::string::String;
use alloc::vec::Vec;

use crate::{Error, Result};

fn positive(what: &'static str, field: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 {
        Ok(value)
    } else {
        Err(Error::Invalid {
            what,
            field,
            value,
            rule: "> 0",
        })
    }
}

fn non_negative(what: &'static str, field: &'static str, value: f64) -> Result<f64> {
    if value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::Invalid {
            what,
            field,
            value,
            rule: ">= 0",
        })
    }
}

/// Ratings of one generation source.
///
/// Line voltage and apparent power are given in kV and kVA; this is the only
/// place in the crate where non-base units are accepted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceSpec {
    v_ll_kv: f64,
    s_kva: f64,
    f_hz: f64,
    v_dc: f64,
}

impl SourceSpec {
    pub fn new(v_ll_kv: f64, s_kva: f64, f_hz: f64, v_dc: f64) -> Result<Self> {
        const WHAT: &str = "source";
        Ok(Self {
            v_ll_kv: positive(WHAT, "v_ll", v_ll_kv)?,
            s_kva: positive(WHAT, "s", s_kva)?,
            f_hz: positive(WHAT, "f", f_hz)?,
            v_dc: positive(WHAT, "v_dc", v_dc)?,
        })
    }

    /// Line voltage in kV.
    pub fn v_ll_kv(&self) -> f64 {
        self.v_ll_kv
    }

    /// Apparent power in kVA.
    pub fn s_kva(&self) -> f64 {
        self.s_kva
    }

    /// Mains frequency in Hz.
    pub fn f_hz(&self) -> f64 {
        self.f_hz
    }

    /// DC bus voltage in V.
    pub fn v_dc(&self) -> f64 {
        self.v_dc
    }
}

/// Thevenin reduction of both sides of the coupler: converter (`v_i`, `z_i`)
/// with its distortion source, and the DC network (`v_o`, `z_o`).
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingNetworkModel {
    v_i: f64,
    z_i: f64,
    v_o: f64,
    z_o: f64,
    ripple: HarmonicSpectrum,
}

impl CouplingNetworkModel {
    pub fn new(v_i: f64, z_i: f64, v_o: f64, z_o: f64, ripple: HarmonicSpectrum) -> Result<Self> {
        const WHAT: &str = "coupling network";
        Ok(Self {
            v_i,
            z_i: non_negative(WHAT, "z_i", z_i)?,
            v_o,
            z_o: non_negative(WHAT, "z_o", z_o)?,
            ripple,
        })
    }

    /// Both source impedances set to zero, the sizing worst case.
    pub fn worst_case(v_i: f64, v_o: f64, ripple: HarmonicSpectrum) -> Self {
        Self {
            v_i,
            z_i: 0.0,
            v_o,
            z_o: 0.0,
            ripple,
        }
    }

    pub fn v_i(&self) -> f64 {
        self.v_i
    }

    pub fn z_i(&self) -> f64 {
        self.z_i
    }

    pub fn v_o(&self) -> f64 {
        self.v_o
    }

    pub fn z_o(&self) -> f64 {
        self.z_o
    }

    pub fn ripple(&self) -> &HarmonicSpectrum {
        &self.ripple
    }

    /// DC voltage difference across the coupler at the instant of connection.
    pub fn mismatch(&self) -> f64 {
        self.v_i - self.v_o
    }

    /// Resistance seen in series with the coupler (`z_i + z_o`).
    pub fn series_resistance(&self) -> f64 {
        self.z_i + self.z_o
    }
}

/// Sizing results for one coupler.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplerDesign {
    z_base: f64,
    x_la: f64,
    l_a: f64,
    l_c: f64,
    percent: f64,
}

impl CouplerDesign {
    /// Default AC reactor size as a fraction of the base impedance.
    pub const DEFAULT_PERCENT: f64 = 0.03;

    /// Builds the design from the base impedance, reactor fraction and mains
    /// frequency using the sizing chain in [`crate::sizing`].
    pub fn new(z_base: f64, percent: f64, f_hz: f64) -> Result<Self> {
        const WHAT: &str = "coupler design";
        non_negative(WHAT, "z_base", z_base)?;
        let l_a = crate::sizing::size_ac_reactor(z_base, percent, f_hz)?;
        Ok(Self {
            z_base,
            x_la: percent * z_base,
            l_a,
            l_c: crate::sizing::size_dc_inductor(l_a),
            percent,
        })
    }

    pub fn z_base(&self) -> f64 {
        self.z_base
    }

    /// AC reactor reactance at mains frequency.
    pub fn x_la(&self) -> f64 {
        self.x_la
    }

    /// AC reactor inductance.
    pub fn l_a(&self) -> f64 {
        self.l_a
    }

    /// DC coupler inductance.
    pub fn l_c(&self) -> f64 {
        self.l_c
    }

    pub fn percent(&self) -> f64 {
        self.percent
    }
}

/// A purchasable coupler inductor.
#[derive(Debug, Clone, PartialEq)]
pub struct InductorPart {
    name: String,
    l: f64,
    r: f64,
    i_max: f64,
    p_max: f64,
}

impl InductorPart {
    pub fn new(name: impl Into<String>, l: f64, r: f64, i_max: f64, p_max: f64) -> Result<Self> {
        const WHAT: &str = "inductor";
        Ok(Self {
            name: name.into(),
            l: positive(WHAT, "l", l)?,
            r: non_negative(WHAT, "r", r)?,
            i_max: positive(WHAT, "i_max", i_max)?,
            p_max: positive(WHAT, "p_max", p_max)?,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Inductance in H.
    pub fn l(&self) -> f64 {
        self.l
    }

    /// Series winding resistance in ohms.
    pub fn r(&self) -> f64 {
        self.r
    }

    /// Rated current in A.
    pub fn i_max(&self) -> f64 {
        self.i_max
    }

    /// Maximum power the coil may dissipate, in W.
    pub fn p_max(&self) -> f64 {
        self.p_max
    }
}

/// A zener diode for the clamp path.
#[derive(Debug, Clone, PartialEq)]
pub struct ZenerPart {
    name: String,
    v_z: f64,
    i_zsm: f64,
    t_surge: f64,
}

impl ZenerPart {
    pub fn new(name: impl Into<String>, v_z: f64, i_zsm: f64, t_surge: f64) -> Result<Self> {
        const WHAT: &str = "zener";
        Ok(Self {
            name: name.into(),
            v_z: positive(WHAT, "v_z", v_z)?,
            i_zsm: positive(WHAT, "i_zsm", i_zsm)?,
            t_surge: positive(WHAT, "t_surge", t_surge)?,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn v_z(&self) -> f64 {
        self.v_z
    }

    /// Non-repetitive surge current rating.
    pub fn i_zsm(&self) -> f64 {
        self.i_zsm
    }

    /// Duration the surge rating applies to.
    pub fn t_surge(&self) -> f64 {
        self.t_surge
    }
}

/// The freewheel rectifier in series with the zener.
#[derive(Debug, Clone, PartialEq)]
pub struct FreewheelDiodePart {
    name: String,
    v_f: f64,
    i_max: f64,
    v_r: f64,
    r_d: f64,
}

impl FreewheelDiodePart {
    pub fn new(name: impl Into<String>, v_f: f64, i_max: f64, v_r: f64, r_d: f64) -> Result<Self> {
        const WHAT: &str = "freewheel diode";
        Ok(Self {
            name: name.into(),
            v_f: positive(WHAT, "v_f", v_f)?,
            i_max: positive(WHAT, "i_max", i_max)?,
            v_r: positive(WHAT, "v_r", v_r)?,
            r_d: positive(WHAT, "r_d", r_d)?,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn v_f(&self) -> f64 {
        self.v_f
    }

    pub fn i_max(&self) -> f64 {
        self.i_max
    }

    /// Reverse blocking voltage.
    pub fn v_r(&self) -> f64 {
        self.v_r
    }

    /// Dynamic (slope) resistance.
    pub fn r_d(&self) -> f64 {
        self.r_d
    }
}

/// Whether spectrum amplitudes are voltages or currents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Voltage,
    Current,
}

/// One spectral line: harmonic order of the mains frequency and its peak amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Harmonic {
    pub order: u32,
    pub amplitude: f64,
}

/// Peak amplitudes of DC-side ripple harmonics, ordered by harmonic order.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicSpectrum {
    f0: f64,
    quantity: Quantity,
    entries: Vec<Harmonic>,
}

impl HarmonicSpectrum {
    pub fn new(f0: f64, quantity: Quantity, entries: Vec<Harmonic>) -> Result<Self> {
        const WHAT: &str = "harmonic spectrum";
        positive(WHAT, "f0", f0)?;
        let mut prev = 0u32;
        for h in &entries {
            if h.order <= prev {
                return Err(Error::Invalid {
                    what: WHAT,
                    field: "order",
                    value: h.order as f64,
                    rule: "positive and strictly increasing",
                });
            }
            non_negative(WHAT, "amplitude", h.amplitude)?;
            prev = h.order;
        }
        Ok(Self {
            f0,
            quantity,
            entries,
        })
    }

    pub fn empty(f0: f64, quantity: Quantity) -> Result<Self> {
        Self::new(f0, quantity, Vec::new())
    }

    /// Base (mains) frequency in Hz.
    pub fn f0(&self) -> f64 {
        self.f0
    }

    pub fn quantity(&self) -> Quantity {
        self.quantity
    }

    pub fn entries(&self) -> &[Harmonic] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Amplitude at `order`, if present.
    pub fn amplitude(&self, order: u32) -> Option<f64> {
        self.entries
            .binary_search_by_key(&order, |h| h.order)
            .ok()
            .map(|i| self.entries[i].amplitude)
    }

    /// Arithmetic sum of all amplitudes.
    pub fn amplitude_sum(&self) -> f64 {
        self.entries.iter().map(|h| h.amplitude).sum()
    }

    /// Root-sum-square of all amplitudes.
    pub fn amplitude_rss(&self) -> f64 {
        libm::sqrt(self.entries.iter().map(|h| h.amplitude * h.amplitude).sum())
    }
}

/// One point of a sampled disconnection waveform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    /// Time since the switch opened, in s.
    pub t: f64,
    /// Coil current, in A.
    pub i: f64,
    /// Coil terminal voltage, in V.
    pub v_coil: f64,
}

/// Sampled disconnection waveform with its derived scalars.
#[derive(Debug, Clone, PartialEq)]
pub struct TransientResult {
    samples: Vec<Sample>,
    t_ext: f64,
    v_peak: f64,
    e_dissipated: f64,
    i_zener_initial: f64,
}

impl TransientResult {
    pub(crate) fn new(
        samples: Vec<Sample>,
        t_ext: f64,
        v_peak: f64,
        e_dissipated: f64,
        i_zener_initial: f64,
    ) -> Self {
        debug_assert!(samples.windows(2).all(|w| w[1].i <= w[0].i));
        debug_assert!(samples.last().is_none_or(|s| t_ext <= s.t));
        Self {
            samples,
            t_ext,
            v_peak,
            e_dissipated,
            i_zener_initial,
        }
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    /// Time at which the current reaches zero and the diode blocks.
    pub fn t_ext(&self) -> f64 {
        self.t_ext
    }

    /// Peak coil terminal voltage.
    pub fn v_peak(&self) -> f64 {
        self.v_peak
    }

    /// Energy dissipated in the clamp path and winding resistance, in J.
    pub fn e_dissipated(&self) -> f64 {
        self.e_dissipated
    }

    /// Current commutated into the zener when the switch opens.
    pub fn i_zener_initial(&self) -> f64 {
        self.i_zener_initial
    }
}

/// The three part lists that selection draws from. Names are unique per kind.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Catalog {
    inductors: Vec<InductorPart>,
    zeners: Vec<ZenerPart>,
    diodes: Vec<FreewheelDiodePart>,
}

impl Catalog {
    pub fn new(
        inductors: Vec<InductorPart>,
        zeners: Vec<ZenerPart>,
        diodes: Vec<FreewheelDiodePart>,
    ) -> Result<Self> {
        unique_names(inductors.iter().map(InductorPart::name))?;
        unique_names(zeners.iter().map(ZenerPart::name))?;
        unique_names(diodes.iter().map(FreewheelDiodePart::name))?;
        Ok(Self {
            inductors,
            zeners,
            diodes,
        })
    }

    pub fn inductors(&self) -> &[InductorPart] {
        &self.inductors
    }

    pub fn zeners(&self) -> &[ZenerPart] {
        &self.zeners
    }

    pub fn diodes(&self) -> &[FreewheelDiodePart] {
        &self.diodes
    }

    pub fn is_empty(&self) -> bool {
        self.inductors.is_empty() && self.zeners.is_empty() && self.diodes.is_empty()
    }

    pub fn inductor(&self, name: &str) -> Option<&InductorPart> {
        self.inductors.iter().find(|p| p.name() == name)
    }

    pub fn zener(&self, name: &str) -> Option<&ZenerPart> {
        self.zeners.iter().find(|p| p.name() == name)
    }

    pub fn diode(&self, name: &str) -> Option<&FreewheelDiodePart> {
        self.diodes.iter().find(|p| p.name() == name)
    }
}

fn unique_names<'a>(names: impl Iterator<Item = &'a str>) -> Result<()> {
    let mut seen: Vec<&str> = Vec::new();
    for name in names {
        if seen.contains(&name) {
            return Err(Error::DuplicateName(name.into()));
        }
        seen.push(name);
    }
    Ok(())
}
