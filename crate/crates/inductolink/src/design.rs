//! End-to-end coupler design: sizing, ripple, clamp budget, part selection,
//! validation and the disconnection stress check, collected in one report.

use std::fmt::{self, Write as _};

use inductolink_core::harmonics::{
    attenuation_report, ripple_current_spectrum, six_pulse_voltage_spectrum, DEFAULT_K_MAX,
};
use inductolink_core::model::{Catalog, CouplerDesign, InductorPart, SourceSpec};
use inductolink_core::sizing::{
    clamp_voltage_budget, compute_z_base, pick_inductor, select_clamp_chain, total_coil_current,
    validate_inductor, ClampSelection, InductorValidation,
};
use inductolink_core::transient::{
    disconnect_analytic, extinction_time, ClampChain, Coil, DisconnectSolution, ZenerStress,
};

/// Rated power factor used to turn apparent power into DC power when no DC
/// current is given.
pub const DEFAULT_POWER_FACTOR: f64 = 0.8;

#[derive(Debug, Clone, PartialEq)]
pub struct DesignInputs {
    pub v_ll_kv: f64,
    pub s_kva: f64,
    pub f_hz: f64,
    pub v_dc: f64,
    /// AC reactor size as a fraction of the base impedance.
    pub percent: f64,
    /// Power factor for the default DC current `S * pf / v_dc`.
    pub pf: f64,
    /// Maximum DC coil current; derived from the ratings when absent.
    pub i_dc_max: Option<f64>,
    /// Measured sum of ripple current amplitudes, replacing the computed one.
    pub ripple_a: Option<f64>,
    pub k_max: u32,
    /// Catalog inductor to use; the smallest one covering `l_c` when absent.
    pub inductor: Option<String>,
}

impl DesignInputs {
    pub fn new(v_ll_kv: f64, s_kva: f64, f_hz: f64, v_dc: f64) -> Self {
        Self {
            v_ll_kv,
            s_kva,
            f_hz,
            v_dc,
            percent: CouplerDesign::DEFAULT_PERCENT,
            pf: DEFAULT_POWER_FACTOR,
            i_dc_max: None,
            ripple_a: None,
            k_max: DEFAULT_K_MAX,
            inductor: None,
        }
    }
}

/// Bad inputs, as opposed to a design that does not close.
#[derive(Debug, thiserror::Error)]
pub enum DesignError {
    #[error("{stage}: {source}")]
    Input {
        stage: &'static str,
        #[source]
        source: inductolink_core::Error,
    },
    #[error("inductor `{0}` not in catalog")]
    UnknownInductor(String),
    #[error("power factor must lie in (0, 1], got {0}")]
    PowerFactor(f64),
}

fn input(stage: &'static str) -> impl FnOnce(inductolink_core::Error) -> DesignError {
    move |source| DesignError::Input { stage, source }
}

/// Why a design could not be completed.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignFailure {
    pub stage: &'static str,
    pub message: String,
}

/// Ripple reduction obtained by the purchased coil over its bare resistance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttenuationSummary {
    pub factor_first: Option<f64>,
    pub factor_last: Option<f64>,
    pub thd_ratio: Option<f64>,
    pub in_reference_band: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignReport {
    pub inputs: DesignInputs,
    /// Where the catalog came from, echoed for re-runs.
    pub catalog_source: String,
    pub design: CouplerDesign,
    pub inductor: Option<InductorPart>,
    pub i_dc_max: f64,
    pub ripple_sum: Option<f64>,
    pub i_total: Option<f64>,
    pub budget: Option<f64>,
    pub t_required: Option<f64>,
    pub selection: Option<ClampSelection>,
    pub validation: Option<InductorValidation>,
    pub disconnect: Option<DisconnectSolution>,
    pub stress: Option<ZenerStress>,
    pub attenuation: Option<AttenuationSummary>,
    pub failure: Option<DesignFailure>,
}

impl DesignReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
            && self.validation.is_some_and(|v| v.passed())
            && self.stress.is_some_and(|s| s.passed())
    }
}

/// Runs the full design chain against `catalog`.
///
/// Returns `Err` only for invalid inputs. A design that cannot be completed
/// still yields a report, with `failure` set and the later stages empty.
pub fn run_design(
    inputs: &DesignInputs,
    catalog: &Catalog,
    catalog_source: &str,
) -> Result<DesignReport, DesignError> {
    let src = SourceSpec::new(inputs.v_ll_kv, inputs.s_kva, inputs.f_hz, inputs.v_dc)
        .map_err(input("source"))?;
    if !(inputs.pf > 0.0 && inputs.pf <= 1.0) {
        return Err(DesignError::PowerFactor(inputs.pf));
    }
    let design = CouplerDesign::new(compute_z_base(&src), inputs.percent, src.f_hz())
        .map_err(input("sizing"))?;
    let i_dc_max = inputs
        .i_dc_max
        .unwrap_or(inputs.s_kva * 1000.0 * inputs.pf / inputs.v_dc);
    if !(i_dc_max >= 0.0) {
        return Err(DesignError::Input {
            stage: "dc current",
            source: inductolink_core::Error::Domain("maximum DC current must be >= 0"),
        });
    }

    let mut report = DesignReport {
        inputs: inputs.clone(),
        catalog_source: catalog_source.to_string(),
        design,
        inductor: None,
        i_dc_max,
        ripple_sum: None,
        i_total: None,
        budget: None,
        t_required: None,
        selection: None,
        validation: None,
        disconnect: None,
        stress: None,
        attenuation: None,
        failure: None,
    };
    let fail = |report: &mut DesignReport, stage, message: String| {
        report.failure = Some(DesignFailure { stage, message });
    };

    if !(design.l_c() > 0.0) {
        fail(
            &mut report,
            "sizing",
            "coupler inductance is zero: nothing limits the connection current".into(),
        );
        return Ok(report);
    }

    let part = match &inputs.inductor {
        Some(name) => catalog
            .inductor(name)
            .ok_or_else(|| DesignError::UnknownInductor(name.clone()))?,
        None => match pick_inductor(catalog, design.l_c()) {
            Some(p) => p,
            None => {
                fail(
                    &mut report,
                    "inductor selection",
                    format!(
                        "no feasible part: no catalog inductor reaches l_c = {} H",
                        design.l_c()
                    ),
                );
                return Ok(report);
            }
        },
    };
    report.inductor = Some(part.clone());

    let v_spec = six_pulse_voltage_spectrum(src.v_dc(), inputs.k_max, src.f_hz())
        .map_err(input("ripple spectrum"))?;
    let i_spec =
        ripple_current_spectrum(&v_spec, part.r(), part.l()).map_err(input("ripple current"))?;
    let (ripple_sum, i_total) = match inputs.ripple_a {
        Some(r) if r >= 0.0 => (r, i_dc_max + r),
        Some(_) => {
            return Err(DesignError::Input {
                stage: "ripple current",
                source: inductolink_core::Error::Domain("ripple current sum must be >= 0"),
            })
        }
        None => (
            i_spec.amplitude_sum(),
            total_coil_current(i_dc_max, &i_spec).map_err(input("coil current"))?,
        ),
    };
    report.ripple_sum = Some(ripple_sum);
    report.i_total = Some(i_total);

    let att = attenuation_report(&v_spec, part.r(), 0.0, part.l());
    report.attenuation = att.ok().map(|a| AttenuationSummary {
        factor_first: a.factors.first().map(|f| f.1),
        factor_last: a.factors.last().map(|f| f.1),
        thd_ratio: a.thd_ratio(),
        in_reference_band: a.in_reference_band(),
    });

    let budget = match clamp_voltage_budget(part.p_max(), i_total) {
        Ok(b) => b,
        Err(e) => {
            fail(&mut report, "clamp budget", e.to_string());
            return Ok(report);
        }
    };
    report.budget = Some(budget);
    report.validation = Some(validate_inductor(part, &design, i_total));

    // fastest admissible discharge: the whole budget across the clamp
    let t_required = extinction_time(part.l(), part.r(), budget, i_total);
    report.t_required = Some(t_required);

    let selection = match select_clamp_chain(budget, i_total, t_required, catalog) {
        Ok(s) => s,
        Err(e) => {
            fail(&mut report, "clamp selection", e.to_string());
            return Ok(report);
        }
    };
    let chain = ClampChain::from_parts(&selection.zener, &selection.diode);
    let solution =
        disconnect_analytic(Coil::from(part), chain, i_total).map_err(input("disconnect"))?;
    report.stress = Some(ZenerStress::evaluate(
        i_total,
        solution.t_ext(),
        &selection.zener,
    ));
    report.disconnect = Some(solution);
    report.selection = Some(selection);
    Ok(report)
}

fn opt<T: fmt::Display>(v: Option<T>) -> String {
    v.map_or_else(|| "-".to_string(), |v| v.to_string())
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

impl DesignReport {
    /// Key/value pairs in report order.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let i = &self.inputs;
        let mut e: Vec<(&'static str, String)> = vec![
            ("input.vll_kv", i.v_ll_kv.to_string()),
            ("input.s_kva", i.s_kva.to_string()),
            ("input.f_hz", i.f_hz.to_string()),
            ("input.vdc", i.v_dc.to_string()),
            ("input.percent", i.percent.to_string()),
            ("input.pf", i.pf.to_string()),
            ("input.idc_max_a", opt(i.i_dc_max)),
            ("input.ripple_a", opt(i.ripple_a)),
            ("input.kmax", i.k_max.to_string()),
            ("input.inductor", opt(i.inductor.as_deref())),
            ("input.catalog", self.catalog_source.clone()),
            ("z_base_ohm", self.design.z_base().to_string()),
            ("x_la_ohm", self.design.x_la().to_string()),
            ("l_a_H", self.design.l_a().to_string()),
            ("l_c_H", self.design.l_c().to_string()),
            ("inductor", opt(self.inductor.as_ref().map(|p| p.name()))),
            ("inductor.l_H", opt(self.inductor.as_ref().map(|p| p.l()))),
            ("inductor.r_ohm", opt(self.inductor.as_ref().map(|p| p.r()))),
            (
                "inductor.p_max_W",
                opt(self.inductor.as_ref().map(|p| p.p_max())),
            ),
            ("i_dc_max_A", self.i_dc_max.to_string()),
            ("ripple_sum_A", opt(self.ripple_sum)),
            ("i_total_A", opt(self.i_total)),
            ("clamp_budget_V", opt(self.budget)),
            ("t_required_s", opt(self.t_required)),
            (
                "zener",
                opt(self.selection.as_ref().map(|s| s.zener.name())),
            ),
            (
                "diode",
                opt(self.selection.as_ref().map(|s| s.diode.name())),
            ),
            (
                "chain_voltage_V",
                opt(self.selection.as_ref().map(ClampSelection::chain_voltage)),
            ),
        ];
        if let Some(v) = &self.validation {
            e.push(("check.inductance", verdict(v.inductance.passed()).into()));
            e.push((
                "check.inductance_margin_H",
                v.inductance.margin().to_string(),
            ));
            e.push(("check.current", verdict(v.current.passed()).into()));
            e.push(("check.current_margin_A", v.current.margin().to_string()));
        }
        if let Some(d) = &self.disconnect {
            e.push(("t_ext_s", d.t_ext().to_string()));
            e.push(("v_peak_V", d.v_peak().to_string()));
        }
        if let Some(s) = &self.stress {
            e.push(("check.zener_current", verdict(s.current_ok()).into()));
            e.push(("check.zener_current_margin_A", s.current_margin.to_string()));
            e.push(("check.zener_time", verdict(s.time_ok()).into()));
            e.push(("check.zener_time_margin_s", s.time_margin.to_string()));
        }
        if let Some(a) = &self.attenuation {
            e.push(("attenuation.first_order", opt(a.factor_first)));
            e.push(("attenuation.last_order", opt(a.factor_last)));
            e.push(("attenuation.thd_ratio", opt(a.thd_ratio)));
            e.push(("attenuation.in_0.3_0.7_band", opt(a.in_reference_band)));
        }
        if let Some(f) = &self.failure {
            e.push(("failure.stage", f.stage.into()));
            e.push(("failure.message", f.message.clone()));
        }
        e.push(("verdict", verdict(self.passed()).into()));
        e
    }

    /// Aligned plain-text rendering.
    pub fn to_text(&self) -> String {
        let entries = self.entries();
        let width = entries.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        let mut out = String::from("# inductolink design report\n");
        for (k, v) in entries {
            writeln!(out, "{k:<width$}  {v}").expect("write to string");
        }
        out
    }

    /// Machine-readable twin of [`Self::to_text`].
    pub fn to_csv(&self) -> String {
        let mut wtr = csv::Writer::from_writer(Vec::new());
        wtr.write_record(["key", "value"]).expect("in-memory csv");
        for (k, v) in self.entries() {
            wtr.write_record([k, v.as_str()]).expect("in-memory csv");
        }
        String::from_utf8(wtr.into_inner().expect("in-memory csv")).expect("utf-8")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::bundled_catalog;

    fn reference_inputs() -> DesignInputs {
        DesignInputs::new(0.048, 0.8, 50.0, 48.0)
    }

    #[test]
    fn reference_design_passes_with_reference_parts() {
        let rep = run_design(&reference_inputs(), &bundled_catalog(), "bundled").unwrap();
        assert!((rep.design.z_base() - 2.88).abs() < 1e-12);
        assert!((rep.design.l_c() / 459e-6 - 1.0).abs() < 0.03);
        assert_eq!(rep.inductor.as_ref().unwrap().name(), "COUPLER-500uH-20A");
        let sel = rep.selection.as_ref().unwrap();
        assert_eq!(sel.zener.name(), "1N5335B");
        assert_eq!(sel.diode.name(), "SBR20A200CTB");
        assert!(rep.passed(), "{}", rep.to_text());
    }

    #[test]
    fn zero_percent_is_flagged() {
        let mut inputs = reference_inputs();
        inputs.percent = 0.0;
        let rep = run_design(&inputs, &bundled_catalog(), "bundled").unwrap();
        assert_eq!(rep.design.l_a(), 0.0);
        assert_eq!(rep.design.l_c(), 0.0);
        assert_eq!(rep.failure.as_ref().unwrap().stage, "sizing");
        assert!(!rep.passed());
    }

    #[test]
    fn empty_catalog_fails_selection() {
        let rep = run_design(&reference_inputs(), &Catalog::default(), "empty").unwrap();
        assert!(!rep.passed());
        assert_eq!(rep.failure.unwrap().stage, "inductor selection");
    }

    #[test]
    fn explicit_operating_point() {
        let mut inputs = reference_inputs();
        inputs.i_dc_max = Some(16.0);
        inputs.ripple_a = Some(1.02);
        let rep = run_design(&inputs, &bundled_catalog(), "bundled").unwrap();
        assert!((rep.i_total.unwrap() - 17.02).abs() < 1e-12);
        assert!((rep.budget.unwrap() - 4.70).abs() < 0.01);
        assert!(rep.passed());
    }

    #[test]
    fn bad_inputs_are_errors() {
        let mut inputs = reference_inputs();
        inputs.v_dc = 0.0;
        assert!(run_design(&inputs, &bundled_catalog(), "b").is_err());
        let mut inputs = reference_inputs();
        inputs.pf = 1.5;
        assert!(run_design(&inputs, &bundled_catalog(), "b").is_err());
        let mut inputs = reference_inputs();
        inputs.inductor = Some("nope".into());
        assert!(matches!(
            run_design(&inputs, &bundled_catalog(), "b"),
            Err(DesignError::UnknownInductor(_))
        ));
    }

    #[test]
    fn text_and_csv_carry_the_same_entries() {
        let rep = run_design(&reference_inputs(), &bundled_catalog(), "bundled").unwrap();
        let text = rep.to_text();
        let csv = rep.to_csv();
        assert_eq!(text.lines().count(), csv.lines().count());
        assert!(text.contains("verdict"));
        assert!(csv.starts_with("key,value\n"));
    }
}
