//! DC-side ripple of an ideal six-pulse rectifier and the effect of the coupler
//! inductor on it.
//!
//! The rectifier is ideal: no commutation overlap and zero firing delay. Its
//! output is the top of the six line-to-line cosines, so the only harmonics are
//! orders `n = 6k` with peak amplitude `v_do * 2 / (n^2 - 1)`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::model::{Harmonic, HarmonicSpectrum, Quantity};
use crate::{Error, Result};

/// Number of ripple harmonics considered by default.
pub const DEFAULT_K_MAX: u32 = 50;

/// Pulse number of the bridge.
pub const PULSES: u32 = 6;

/// Ripple voltage spectrum (peak values) of an ideal six-pulse bridge with
/// average output `v_do`, orders `6, 12, ..., 6 * k_max`.
pub fn six_pulse_voltage_spectrum(v_do: f64, k_max: u32, f0: f64) -> Result<HarmonicSpectrum> {
    let entries = (1..=k_max)
        .map(|k| {
            let order = PULSES * k;
            let n = order as f64;
            Harmonic {
                order,
                amplitude: v_do.abs() * 2.0 / (n * n - 1.0),
            }
        })
        .collect();
    HarmonicSpectrum::new(f0, Quantity::Voltage, entries)
}

/// Magnitude of a series R-L impedance at harmonic `order` of `f0`.
pub fn series_rl_impedance(r: f64, l: f64, f0: f64, order: u32) -> f64 {
    let x = order as f64 * 2.0 * PI * f0 * l;
    libm::hypot(r, x)
}

/// Ripple currents driven by `v_spec` through a series R-L branch.
pub fn ripple_current_spectrum(
    v_spec: &HarmonicSpectrum,
    r: f64,
    l: f64,
) -> Result<HarmonicSpectrum> {
    if v_spec.quantity() != Quantity::Voltage {
        return Err(Error::Domain("ripple source spectrum must hold voltages"));
    }
    if r < 0.0 || l < 0.0 {
        return Err(Error::Domain(
            "branch resistance and inductance must be >= 0",
        ));
    }
    if r == 0.0 && l == 0.0 {
        return Err(Error::Domain("branch impedance is zero (r = 0 and l = 0)"));
    }
    let f0 = v_spec.f0();
    let entries = v_spec
        .entries()
        .iter()
        .map(|h| Harmonic {
            order: h.order,
            amplitude: h.amplitude / series_rl_impedance(r, l, f0, h.order),
        })
        .collect();
    HarmonicSpectrum::new(f0, Quantity::Current, entries)
}

/// Total harmonic distortion of `spec` relative to `base`.
///
/// Amplitudes are peak values, so `base` must be given on the same footing
/// (a DC value or the peak of the fundamental).
pub fn thd(spec: &HarmonicSpectrum, base: f64) -> Result<f64> {
    if !(base > 0.0) {
        return Err(Error::Domain("THD reference must be > 0"));
    }
    Ok(spec.amplitude_rss() / base)
}

/// Band the ripple reduction is expected to land in for a reactor of the
/// customary size. Reported, never enforced.
pub const REFERENCE_REDUCTION_BAND: (f64, f64) = (0.3, 0.7);

/// Ripple currents with and without the added inductance.
#[derive(Debug, Clone, PartialEq)]
pub struct AttenuationReport {
    /// `(order, i_after / i_before)` per harmonic.
    pub factors: Vec<(u32, f64)>,
    pub before: HarmonicSpectrum,
    pub after: HarmonicSpectrum,
}

impl AttenuationReport {
    pub fn thd_before(&self, base: f64) -> Result<f64> {
        thd(&self.before, base)
    }

    pub fn thd_after(&self, base: f64) -> Result<f64> {
        thd(&self.after, base)
    }

    /// THD after over THD before. The reference cancels, so this is the ratio
    /// of the harmonic RSS currents. `None` without ripple.
    pub fn thd_ratio(&self) -> Option<f64> {
        let before = self.before.amplitude_rss();
        (before > 0.0).then(|| self.after.amplitude_rss() / before)
    }

    /// Whether the THD ratio falls inside [`REFERENCE_REDUCTION_BAND`].
    pub fn in_reference_band(&self) -> Option<bool> {
        let (lo, hi) = REFERENCE_REDUCTION_BAND;
        self.thd_ratio().map(|r| (lo..=hi).contains(&r))
    }
}

/// Per-harmonic attenuation from inserting `l_added` in series with a
/// baseline branch of `r_base` and `l_base`.
pub fn attenuation_report(
    v_spec: &HarmonicSpectrum,
    r_base: f64,
    l_base: f64,
    l_added: f64,
) -> Result<AttenuationReport> {
    if l_added < 0.0 {
        return Err(Error::Domain("added inductance must be >= 0"));
    }
    let before = ripple_current_spectrum(v_spec, r_base, l_base)?;
    let after = ripple_current_spectrum(v_spec, r_base, l_base + l_added)?;
    let f0 = v_spec.f0();
    // ratio of impedances rather than of currents, so zero-amplitude lines
    // still get a factor
    let factors = v_spec
        .entries()
        .iter()
        .map(|h| {
            let z_before = series_rl_impedance(r_base, l_base, f0, h.order);
            let z_after = series_rl_impedance(r_base, l_base + l_added, f0, h.order);
            (h.order, z_before / z_after)
        })
        .collect();
    Ok(AttenuationReport {
        factors,
        before,
        after,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::vec::Vec;

    const V_DO: f64 = 48.0;

    /// Ideal bridge output over one mains cycle, `theta` in radians. The peak of
    /// the line-to-line voltage is `v_do * pi / 3`.
    fn ideal_bridge(v_do: f64, theta: f64) -> f64 {
        let v_pk = v_do * PI / 3.0;
        let seg = PI / 3.0;
        let local = theta.rem_euclid(seg) - seg / 2.0;
        v_pk * local.cos()
    }

    fn sampled_bridge(v_do: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|m| ideal_bridge(v_do, 2.0 * PI * m as f64 / n as f64))
            .collect()
    }

    /// Single-bin DFT, returning the peak amplitude of harmonic `k`.
    fn dft_amplitude(x: &[f64], k: usize) -> f64 {
        let n = x.len();
        let (mut re, mut im) = (0.0, 0.0);
        for (m, v) in x.iter().enumerate() {
            let ph = 2.0 * PI * ((k * m) % n) as f64 / n as f64;
            re += v * ph.cos();
            im -= v * ph.sin();
        }
        2.0 * (re * re + im * im).sqrt() / n as f64
    }

    #[test]
    fn waveform_average_is_v_do() {
        let x = sampled_bridge(V_DO, 6 * 4096);
        let mean = x.iter().sum::<f64>() / x.len() as f64;
        assert!((mean - V_DO).abs() < 1e-6 * V_DO);
    }

    #[test]
    fn closed_form_matches_dft_oracle() {
        let x = sampled_bridge(V_DO, 6 * 4096);
        let spec = six_pulse_voltage_spectrum(V_DO, 10, 50.0).unwrap();
        for h in spec.entries() {
            let oracle = dft_amplitude(&x, h.order as usize);
            assert!(
                (h.amplitude - oracle).abs() <= 0.005 * oracle,
                "order {}: {} vs {}",
                h.order,
                h.amplitude,
                oracle
            );
        }
        for k in (1..=60).filter(|k| k % 6 != 0) {
            assert!(dft_amplitude(&x, k) < 1e-9 * V_DO, "order {k} leaks");
        }
    }

    #[test]
    fn spectrum_examples() {
        let one = six_pulse_voltage_spectrum(48.0, 1, 50.0).unwrap();
        assert_eq!(one.len(), 1);
        assert!((one.amplitude(6).unwrap() - 2.743).abs() < 5e-4);
        assert!(six_pulse_voltage_spectrum(48.0, 0, 50.0)
            .unwrap()
            .is_empty());
        let two = six_pulse_voltage_spectrum(48.0, 2, 50.0).unwrap();
        assert!((two.amplitude(12).unwrap() - 0.671).abs() < 5e-4);
        assert!(two.entries().iter().all(|h| h.order % 6 == 0));
    }

    #[test]
    fn thd_of_ideal_bridge() {
        let spec = six_pulse_voltage_spectrum(V_DO, DEFAULT_K_MAX, 50.0).unwrap();
        let t = thd(&spec, V_DO).unwrap();
        assert!((t - 0.0593).abs() < 1e-4, "{t}");

        // same figure from the sampled waveform
        let x = sampled_bridge(V_DO, 6 * 4096);
        let rss: f64 = (1..=DEFAULT_K_MAX as usize)
            .map(|k| dft_amplitude(&x, 6 * k).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!((rss / V_DO - t).abs() < 0.005 * t);
    }

    #[test]
    fn thd_edge_cases() {
        let empty = HarmonicSpectrum::empty(50.0, Quantity::Voltage).unwrap();
        assert_eq!(thd(&empty, 1.0).unwrap(), 0.0);
        let single = HarmonicSpectrum::new(
            50.0,
            Quantity::Current,
            std::vec![Harmonic {
                order: 6,
                amplitude: 2.5
            }],
        )
        .unwrap();
        assert_eq!(thd(&single, 2.5).unwrap(), 1.0);
        assert!(thd(&single, 0.0).is_err());
    }

    #[test]
    fn ripple_current_through_reference_coil() {
        let v = six_pulse_voltage_spectrum(48.0, 1, 50.0).unwrap();
        let i = ripple_current_spectrum(&v, 0.2, 500e-6).unwrap();
        let expected =
            v.amplitude(6).unwrap() / (0.2f64.powi(2) + (6.0 * 100.0 * PI * 500e-6).powi(2)).sqrt();
        let i6 = i.amplitude(6).unwrap();
        assert!((i6 - expected).abs() < 1e-12);
        assert!((i6 - 2.85).abs() < 0.005, "{i6}");
        assert_eq!(i.quantity(), Quantity::Current);
    }

    /// Drives the R-L branch with the order-6 ripple line alone, integrates to
    /// steady state with RK4 and reads the current amplitude off a DFT.
    #[test]
    fn ripple_current_matches_time_domain() {
        let (r, l, f0) = (0.2, 500e-6, 50.0);
        let v6 = 48.0 * 2.0 / 35.0;
        let w = 6.0 * 2.0 * PI * f0;
        let didt = |t: f64, i: f64| (v6 * (w * t).cos() - r * i) / l;
        let per_cycle = 4096usize;
        let dt = 1.0 / f0 / per_cycle as f64;
        let (mut t, mut i) = (0.0, 0.0);
        // tau = 2.5 ms; 20 cycles is 160 time constants
        for _ in 0..20 * per_cycle {
            let k1 = didt(t, i);
            let k2 = didt(t + dt / 2.0, i + dt / 2.0 * k1);
            let k3 = didt(t + dt / 2.0, i + dt / 2.0 * k2);
            let k4 = didt(t + dt, i + dt * k3);
            i += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            t += dt;
        }
        let mut cycle = Vec::with_capacity(per_cycle);
        for _ in 0..per_cycle {
            cycle.push(i);
            let k1 = didt(t, i);
            let k2 = didt(t + dt / 2.0, i + dt / 2.0 * k1);
            let k3 = didt(t + dt / 2.0, i + dt / 2.0 * k2);
            let k4 = didt(t + dt, i + dt * k3);
            i += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            t += dt;
        }
        let simulated = dft_amplitude(&cycle, 6);
        let spec = six_pulse_voltage_spectrum(48.0, 1, f0).unwrap();
        let analytic = ripple_current_spectrum(&spec, r, l)
            .unwrap()
            .amplitude(6)
            .unwrap();
        assert!(
            (simulated - analytic).abs() < 1e-4 * analytic,
            "{simulated} vs {analytic}"
        );
    }

    #[test]
    fn resistive_limit_and_errors() {
        let v = six_pulse_voltage_spectrum(48.0, 5, 50.0).unwrap();
        let i = ripple_current_spectrum(&v, 2.0, 0.0).unwrap();
        for (hv, hi) in v.entries().iter().zip(i.entries()) {
            assert_eq!(hi.amplitude, hv.amplitude / 2.0);
        }
        let empty = HarmonicSpectrum::empty(50.0, Quantity::Voltage).unwrap();
        assert!(ripple_current_spectrum(&empty, 0.2, 1e-3)
            .unwrap()
            .is_empty());
        assert!(ripple_current_spectrum(&v, 0.0, 0.0).is_err());
        assert!(ripple_current_spectrum(&i, 0.2, 1e-3).is_err());
    }

    #[test]
    fn attenuation_examples() {
        let v = six_pulse_voltage_spectrum(48.0, 20, 50.0).unwrap();
        let same = attenuation_report(&v, 0.2, 100e-6, 0.0).unwrap();
        assert!(same.factors.iter().all(|&(_, f)| f == 1.0));
        assert_eq!(same.thd_ratio(), Some(1.0));

        let doubled = attenuation_report(&v, 0.0, 250e-6, 250e-6).unwrap();
        assert!(doubled
            .factors
            .iter()
            .all(|&(_, f)| (f - 0.5).abs() < 1e-15));

        let reference = attenuation_report(
            &six_pulse_voltage_spectrum(48.0, DEFAULT_K_MAX, 50.0).unwrap(),
            0.2,
            0.0,
            500e-6,
        )
        .unwrap();
        assert_eq!(reference.factors.first().unwrap().0, 6);
        assert_eq!(reference.factors.last().unwrap().0, 300);
        let f6 = reference.factors[0].1;
        assert!((f6 - 0.2 / (0.04f64 + (0.3 * PI).powi(2)).sqrt()).abs() < 1e-12);
        let ratio = reference.thd_ratio().unwrap();
        assert!(ratio > 0.0 && ratio < 1.0);
        assert_eq!(
            reference.in_reference_band(),
            Some((0.3..=0.7).contains(&ratio))
        );
        let base = 16.0;
        let direct = reference.thd_after(base).unwrap() / reference.thd_before(base).unwrap();
        assert!((direct - ratio).abs() < 1e-12);
    }

    #[test]
    fn attenuation_needs_ripple_for_ratio() {
        let empty = HarmonicSpectrum::empty(50.0, Quantity::Voltage).unwrap();
        let rep = attenuation_report(&empty, 0.2, 0.0, 1e-3).unwrap();
        assert_eq!(rep.thd_ratio(), None);
        assert_eq!(rep.in_reference_band(), None);
    }

    proptest! {
        #[test]
        fn attenuation_is_monotone(
            r in 1e-3f64..5.0,
            l_base in 0.0f64..2e-3,
            l_added in 1e-6f64..5e-3,
            k_max in 2u32..60,
        ) {
            let v = six_pulse_voltage_spectrum(48.0, k_max, 50.0).unwrap();
            let rep = attenuation_report(&v, r, l_base, l_added).unwrap();
            for &(_, f) in &rep.factors {
                prop_assert!(f > 0.0 && f <= 1.0);
            }
            for w in rep.factors.windows(2) {
                prop_assert!(w[1].1 < w[0].1);
            }
        }

        #[test]
        fn thd_is_scale_invariant(v_do in 1.0f64..1e3, a in 1e-3f64..1e3, k_max in 0u32..60) {
            let s1 = six_pulse_voltage_spectrum(v_do, k_max, 50.0).unwrap();
            let s2 = six_pulse_voltage_spectrum(a * v_do, k_max, 50.0).unwrap();
            let t1 = thd(&s1, v_do).unwrap();
            let t2 = thd(&s2, a * v_do).unwrap();
            prop_assert!((t1 - t2).abs() <= 1e-12 * t1.max(1e-300));
        }

        #[test]
        fn only_multiples_of_six(k_max in 0u32..200) {
            let s = six_pulse_voltage_spectrum(1.0, k_max, 60.0).unwrap();
            prop_assert_eq!(s.len(), k_max as usize);
            prop_assert!(s.entries().iter().all(|h| h.order % 6 == 0));
        }
    }
}
