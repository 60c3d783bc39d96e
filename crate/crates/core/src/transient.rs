//! Disconnection transient of the coupler coil.
//!
//! When the switch opens, the coil current commutates into the zener + freewheel
//! diode path and decays according to
//!
//! ```text
//! L di/dt = -(r_c + r_d) i - (v_z + v_f)
//! ```
//!
//! until it reaches zero and the diode blocks. The diodes are ideal thresholds;
//! only the freewheel diode carries a dynamic resistance `r_d`.

use alloc::vec::Vec;

use crate::model::{FreewheelDiodePart, InductorPart, Sample, TransientResult, ZenerPart};
use crate::{Error, Result};

/// Minimum number of integration steps per extinction time.
pub const MIN_STEPS_PER_TRANSIENT: f64 = 100.0;

const MAX_STEPS: usize = 50_000_000;

/// Inductance and winding resistance of the coil being discharged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coil {
    l: f64,
    r: f64,
}

impl Coil {
    pub fn new(l: f64, r: f64) -> Result<Self> {
        if !(l > 0.0) {
            return Err(Error::Invalid {
                what: "coil",
                field: "l",
                value: l,
                rule: "> 0",
            });
        }
        if !(r >= 0.0) {
            return Err(Error::Invalid {
                what: "coil",
                field: "r",
                value: r,
                rule: ">= 0",
            });
        }
        Ok(Self { l, r })
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn r(&self) -> f64 {
        self.r
    }
}

impl From<&InductorPart> for Coil {
    fn from(part: &InductorPart) -> Self {
        Self {
            l: part.l(),
            r: part.r(),
        }
    }
}

/// Zener and freewheel diode in series, as seen by the coil.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClampChain {
    v_z: f64,
    v_f: f64,
    r_d: f64,
}

impl ClampChain {
    pub fn new(v_z: f64, v_f: f64, r_d: f64) -> Result<Self> {
        let bad = |field, value, rule| Error::Invalid {
            what: "clamp chain",
            field,
            value,
            rule,
        };
        if !(v_z > 0.0) {
            return Err(bad("v_z", v_z, "> 0"));
        }
        if !(v_f > 0.0) {
            return Err(bad("v_f", v_f, "> 0"));
        }
        if !(r_d >= 0.0) {
            return Err(bad("r_d", r_d, ">= 0"));
        }
        Ok(Self { v_z, v_f, r_d })
    }

    pub fn from_parts(zener: &ZenerPart, diode: &FreewheelDiodePart) -> Self {
        Self {
            v_z: zener.v_z(),
            v_f: diode.v_f(),
            r_d: diode.r_d(),
        }
    }

    pub fn v_z(&self) -> f64 {
        self.v_z
    }

    pub fn v_f(&self) -> f64 {
        self.v_f
    }

    pub fn r_d(&self) -> f64 {
        self.r_d
    }

    /// Threshold voltage of the whole path.
    pub fn v_eff(&self) -> f64 {
        self.v_z + self.v_f
    }
}

/// Closed-form solution of the discharge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisconnectSolution {
    l: f64,
    r_tot: f64,
    v_eff: f64,
    r_d: f64,
    i_0: f64,
    t_ext: f64,
}

impl DisconnectSolution {
    /// Extinction time.
    pub fn t_ext(&self) -> f64 {
        self.t_ext
    }

    pub fn i_0(&self) -> f64 {
        self.i_0
    }

    /// `r_c + r_d`.
    pub fn r_tot(&self) -> f64 {
        self.r_tot
    }

    pub fn v_eff(&self) -> f64 {
        self.v_eff
    }

    /// Coil current at `t`; zero from extinction on.
    pub fn current(&self, t: f64) -> f64 {
        if t >= self.t_ext {
            return 0.0;
        }
        if self.r_tot > 0.0 {
            let x = -self.r_tot * t / self.l;
            // (i_0 + v/R) e^x - v/R, written to stay accurate for small R
            self.i_0 * libm::exp(x) + self.v_eff / self.r_tot * libm::expm1(x)
        } else {
            self.i_0 - self.v_eff * t / self.l
        }
    }

    /// Coil terminal voltage while the clamp conducts.
    pub fn coil_voltage(&self, t: f64) -> f64 {
        if self.i_0 == 0.0 || t > self.t_ext {
            0.0
        } else {
            self.v_eff + self.r_d * self.current(t)
        }
    }

    /// Peak coil terminal voltage, reached at `t = 0`.
    pub fn v_peak(&self) -> f64 {
        self.coil_voltage(0.0)
    }
}

pub fn disconnect_analytic(coil: Coil, chain: ClampChain, i_0: f64) -> Result<DisconnectSolution> {
    if !(i_0 >= 0.0) {
        return Err(Error::Domain("initial coil current must be >= 0"));
    }
    let r_tot = coil.r + chain.r_d;
    let v_eff = chain.v_eff();
    if !(v_eff > 0.0) && r_tot == 0.0 {
        return Err(Error::Domain(
            "clamp path has no discharge voltage or resistance",
        ));
    }
    Ok(DisconnectSolution {
        l: coil.l,
        r_tot,
        v_eff,
        r_d: chain.r_d,
        i_0,
        t_ext: extinction_time(coil.l, r_tot, v_eff, i_0),
    })
}

/// Time for `i_0` to decay to zero through `r_tot` against the threshold `v_eff`.
pub fn extinction_time(l: f64, r_tot: f64, v_eff: f64, i_0: f64) -> f64 {
    if i_0 == 0.0 {
        0.0
    } else if r_tot > 0.0 {
        l / r_tot * libm::log1p(i_0 * r_tot / v_eff)
    } else {
        l * i_0 / v_eff
    }
}

/// Integrates the discharge with fixed-step classical RK4.
///
/// `dt` must resolve the transient with at least [`MIN_STEPS_PER_TRANSIENT`]
/// steps. The last sample is placed at the linearly interpolated zero crossing.
pub fn simulate_disconnect(
    coil: Coil,
    chain: ClampChain,
    i_0: f64,
    dt: f64,
) -> Result<TransientResult> {
    let exact = disconnect_analytic(coil, chain, i_0)?;
    if !(dt > 0.0) {
        return Err(Error::Domain("time step must be > 0"));
    }
    if i_0 == 0.0 {
        return Ok(TransientResult::new(Vec::new(), 0.0, 0.0, 0.0, 0.0));
    }
    let max_dt = exact.t_ext() / MIN_STEPS_PER_TRANSIENT;
    if dt > max_dt {
        return Err(Error::Resolution { dt, max_dt });
    }
    let expected_steps = exact.t_ext() / dt;
    if expected_steps > MAX_STEPS as f64 {
        return Err(Error::Domain("time step too fine: more than 5e7 steps"));
    }

    let l = coil.l;
    let r_tot = exact.r_tot();
    let v_eff = exact.v_eff();
    let r_d = chain.r_d;
    let didt = |i: f64| -(r_tot * i + v_eff) / l;
    let v_coil = |i: f64| v_eff + r_d * i;

    let mut samples = Vec::with_capacity(expected_steps as usize + 2);
    samples.push(Sample {
        t: 0.0,
        i: i_0,
        v_coil: v_coil(i_0),
    });
    let mut i = i_0;
    let mut k = 0usize;
    loop {
        let k1 = didt(i);
        let k2 = didt(i + 0.5 * dt * k1);
        let k3 = didt(i + 0.5 * dt * k2);
        let k4 = didt(i + dt * k3);
        let next = i + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        let t = k as f64 * dt;
        if next <= 0.0 {
            let t_zero = t + dt * i / (i - next);
            samples.push(Sample {
                t: t_zero,
                i: 0.0,
                v_coil: v_eff,
            });
            break;
        }
        k += 1;
        i = next;
        samples.push(Sample {
            t: k as f64 * dt,
            i,
            v_coil: v_coil(i),
        });
        if k > MAX_STEPS {
            return Err(Error::Domain("discharge did not extinguish"));
        }
    }

    let power = |i: f64| r_tot * i * i + v_eff * i;
    let e_dissipated = samples
        .windows(2)
        .map(|w| 0.5 * (w[1].t - w[0].t) * (power(w[0].i) + power(w[1].i)))
        .sum();
    let t_ext = samples.last().map_or(0.0, |s| s.t);
    Ok(TransientResult::new(
        samples,
        t_ext,
        v_coil(i_0),
        e_dissipated,
        i_0,
    ))
}

/// Zener surge check with both margins (negative means violated).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZenerStress {
    /// `i_zsm - i_initial`
    pub current_margin: f64,
    /// `t_surge - t_ext`
    pub time_margin: f64,
}

impl ZenerStress {
    pub fn evaluate(i_initial: f64, t_ext: f64, zener: &ZenerPart) -> Self {
        Self {
            current_margin: zener.i_zsm() - i_initial,
            time_margin: zener.t_surge() - t_ext,
        }
    }

    pub fn current_ok(&self) -> bool {
        self.current_margin >= 0.0
    }

    pub fn time_ok(&self) -> bool {
        self.time_margin >= 0.0
    }

    pub fn passed(&self) -> bool {
        self.current_ok() && self.time_ok()
    }
}

pub fn zener_stress_check(result: &TransientResult, zener: &ZenerPart) -> ZenerStress {
    ZenerStress::evaluate(result.i_zener_initial(), result.t_ext(), zener)
}

/// Current build-up when a converter is switched onto the link with a voltage
/// mismatch, resistance neglected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inrush {
    /// `di/dt` in A/s, signed like the mismatch.
    pub slew: f64,
    /// Time to reach the current limit; `None` without a mismatch.
    pub t_to_limit: Option<f64>,
}

pub fn connect_inrush(delta_v: f64, l_c: f64, i_limit: f64) -> Result<Inrush> {
    if !(l_c > 0.0) {
        return Err(Error::Domain("coupler inductance must be > 0"));
    }
    if !(i_limit > 0.0) {
        return Err(Error::Domain("current limit must be > 0"));
    }
    let t_to_limit = (delta_v != 0.0).then(|| i_limit * l_c / delta_v.abs());
    Ok(Inrush {
        slew: delta_v / l_c,
        t_to_limit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn reference_coil() -> Coil {
        Coil::new(500e-6, 0.2).unwrap()
    }

    fn reference_chain() -> ClampChain {
        ClampChain::new(3.9, 0.5, 1.34e-3).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    /// Max current error against the closed form over the fixed-grid samples.
    fn max_grid_error(coil: Coil, chain: ClampChain, i_0: f64, dt: f64) -> f64 {
        let exact = disconnect_analytic(coil, chain, i_0).unwrap();
        let sim = simulate_disconnect(coil, chain, i_0, dt).unwrap();
        let s = sim.samples();
        s[..s.len() - 1]
            .iter()
            .map(|p| (p.i - exact.current(p.t)).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn analytic_examples() {
        let sol = disconnect_analytic(reference_coil(), reference_chain(), 17.6).unwrap();
        let r: f64 = 0.20134;
        let expected = 500e-6 / r * (1.0 + 17.6 * r / 4.4).ln();
        assert!(rel(sol.t_ext(), expected) < 1e-12);
        assert!((sol.t_ext() - 1.47e-3).abs() < 0.005e-3, "{}", sol.t_ext());
        assert!(sol.current(sol.t_ext() * (1.0 - 1e-9)).abs() < 1e-6);

        let zero = disconnect_analytic(reference_coil(), reference_chain(), 0.0).unwrap();
        assert_eq!(zero.t_ext(), 0.0);
        assert_eq!(zero.current(0.0), 0.0);
        assert_eq!(zero.current(1e-3), 0.0);

        let ideal = disconnect_analytic(
            Coil::new(500e-6, 0.0).unwrap(),
            ClampChain::new(3.9, 0.5, 0.0).unwrap(),
            17.6,
        )
        .unwrap();
        assert!(rel(ideal.t_ext(), 2.0e-3) < 1e-12);
        assert!(rel(ideal.current(1e-3), 8.8) < 1e-12);
    }

    #[test]
    fn small_resistance_approaches_linear_ramp() {
        let chain = ClampChain::new(3.9, 0.5, 0.0).unwrap();
        let tiny = disconnect_analytic(Coil::new(500e-6, 1e-12).unwrap(), chain, 17.6).unwrap();
        assert!(rel(tiny.t_ext(), 2.0e-3) < 1e-9);
        assert!(rel(tiny.current(1e-3), 8.8) < 1e-9);
    }

    #[test]
    fn analytic_rejects_negative_current() {
        assert!(disconnect_analytic(reference_coil(), reference_chain(), -1.0).is_err());
    }

    #[test]
    fn simulation_of_reference_configuration() {
        let exact = disconnect_analytic(reference_coil(), reference_chain(), 17.6).unwrap();
        let sim = simulate_disconnect(reference_coil(), reference_chain(), 17.6, 1e-6).unwrap();
        assert!(rel(sim.t_ext(), exact.t_ext()) < 1e-3);
        assert!((sim.v_peak() - 4.4236).abs() < 1e-4);
        assert_eq!(sim.v_peak(), 4.4 + 1.34e-3 * 17.6);
        assert!(sim.v_peak() <= 5.0);
        let stored: f64 = 0.5 * 500e-6 * 17.6 * 17.6;
        assert!((stored - 77.44e-3).abs() < 1e-9);
        assert!(rel(sim.e_dissipated(), stored) < 5e-3);
        assert_eq!(sim.samples().last().unwrap().i, 0.0);
        assert_eq!(sim.samples()[0].v_coil, sim.v_peak());
        assert!(sim.samples().windows(2).all(|w| w[1].i < w[0].i));
    }

    #[test]
    fn simulation_with_no_current() {
        let sim = simulate_disconnect(reference_coil(), reference_chain(), 0.0, 1e-6).unwrap();
        assert!(sim.samples().is_empty());
        assert_eq!(sim.t_ext(), 0.0);
        assert_eq!(sim.e_dissipated(), 0.0);
    }

    #[test]
    fn coarse_step_is_rejected() {
        let t_ext = disconnect_analytic(reference_coil(), reference_chain(), 17.6)
            .unwrap()
            .t_ext();
        let err = simulate_disconnect(reference_coil(), reference_chain(), 17.6, t_ext / 50.0)
            .unwrap_err();
        assert!(matches!(err, Error::Resolution { .. }));
        assert!(
            simulate_disconnect(reference_coil(), reference_chain(), 17.6, t_ext / 100.0).is_ok()
        );
        assert!(simulate_disconnect(reference_coil(), reference_chain(), 17.6, 0.0).is_err());
    }

    #[test]
    fn fourth_order_convergence() {
        // lambda * t_ext ~ 3.7, so the truncation error sits well above round-off
        let coil = Coil::new(100e-6, 2.0).unwrap();
        let chain = ClampChain::new(0.5, 0.5, 0.0).unwrap();
        let t_ext = disconnect_analytic(coil, chain, 20.0).unwrap().t_ext();
        let errors: std::vec::Vec<f64> = [128.0, 256.0, 512.0]
            .iter()
            .map(|n| max_grid_error(coil, chain, 20.0, t_ext / n))
            .collect();
        for w in errors.windows(2) {
            let ratio = w[0] / w[1];
            assert!((12.0..=20.0).contains(&ratio), "{errors:?}");
        }
    }

    #[test]
    fn stress_check_examples() {
        let zener = ZenerPart::new("1N5335B", 3.9, 17.6, 8.3e-3).unwrap();
        let sim = simulate_disconnect(reference_coil(), reference_chain(), 17.6, 1e-6).unwrap();
        let stress = zener_stress_check(&sim, &zener);
        assert!(stress.passed());
        assert_eq!(stress.current_margin, 0.0);
        assert!(
            (stress.time_margin - 6.83e-3).abs() < 0.01e-3,
            "{}",
            stress.time_margin
        );

        let over = simulate_disconnect(reference_coil(), reference_chain(), 17.61, 1e-6).unwrap();
        let stress = zener_stress_check(&over, &zener);
        assert!(!stress.current_ok());
        assert!(stress.time_ok());
        assert!(!stress.passed());

        let idle = simulate_disconnect(reference_coil(), reference_chain(), 0.0, 1e-6).unwrap();
        assert!(zener_stress_check(&idle, &zener).time_ok());
    }

    #[test]
    fn inrush_examples() {
        let a = connect_inrush(5.0, 500e-6, 20.0).unwrap();
        assert!(rel(a.slew, 10_000.0) < 1e-12);
        assert!(rel(a.t_to_limit.unwrap(), 2.0e-3) < 1e-12);
        let none = connect_inrush(0.0, 500e-6, 20.0).unwrap();
        assert_eq!(none.slew, 0.0);
        assert_eq!(none.t_to_limit, None);
        let b = connect_inrush(10.0, 500e-6, 20.0).unwrap();
        assert!(rel(b.slew, 20_000.0) < 1e-12);
        assert!(rel(b.t_to_limit.unwrap(), 1.0e-3) < 1e-12);
        assert!(connect_inrush(1.0, 0.0, 20.0).is_err());
        assert!(connect_inrush(1.0, 1e-3, 0.0).is_err());
    }

    #[test]
    fn chain_invariants() {
        assert!(ClampChain::new(0.0, 0.5, 0.0).is_err());
        assert!(ClampChain::new(3.9, 0.0, 0.0).is_err());
        assert!(ClampChain::new(3.9, 0.5, -1e-3).is_err());
        assert!(Coil::new(0.0, 0.1).is_err());
        assert!(Coil::new(1e-3, -0.1).is_err());
    }

    fn arb_config() -> impl Strategy<Value = (Coil, ClampChain, f64)> {
        (
            50e-6f64..5e-3,
            0.0f64..1.0,
            1.0f64..20.0,
            0.2f64..1.2,
            0.0f64..0.05,
            0.5f64..50.0,
        )
            .prop_map(|(l, r, vz, vf, rd, i0)| {
                (
                    Coil::new(l, r).unwrap(),
                    ClampChain::new(vz, vf, rd).unwrap(),
                    i0,
                )
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn numeric_matches_closed_form((coil, chain, i_0) in arb_config()) {
            let exact = disconnect_analytic(coil, chain, i_0).unwrap();
            let dt = exact.t_ext() / 1e4;
            let sim = simulate_disconnect(coil, chain, i_0, dt).unwrap();
            prop_assert!(rel(sim.t_ext(), exact.t_ext()) < 1e-3);
            for s in sim.samples() {
                prop_assert!((s.i - exact.current(s.t)).abs() <= 5e-4 * i_0);
            }
            prop_assert!(rel(sim.e_dissipated(), 0.5 * coil.l() * i_0 * i_0) < 5e-3);
            prop_assert!(sim.samples().windows(2).all(|w| w[1].i < w[0].i));
            prop_assert_eq!(sim.v_peak(), chain.v_eff() + chain.r_d() * i_0);
            prop_assert_eq!(exact.v_peak(), sim.v_peak());
        }
    }
}
