//! Coupler sizing: base impedance, AC reactor, DC coupler inductor, clamp
//! voltage budget and clamp part selection.

use core::cmp::Ordering;
use core::f64::consts::PI;
use core::fmt;

use crate::model::{
    Catalog, CouplerDesign, FreewheelDiodePart, HarmonicSpectrum, InductorPart, Quantity,
    SourceSpec, ZenerPart,
};
use crate::{Error, Result};

/// Ratio between the DC coupler and the equivalent AC reactor inductance.
pub const DC_TO_AC_RATIO: f64 = 1.7;

/// Base impedance in ohms, `V_ll^2 * 1000 / S` with `V_ll` in kV and `S` in kVA.
pub fn compute_z_base(src: &SourceSpec) -> f64 {
    // evaluated as V^2 / VA; 0.048 kV / 0.8 kVA then lands exactly on 2.88
    let v = src.v_ll_kv() * 1000.0;
    v * v / (src.s_kva() * 1000.0)
}

/// AC reactor inductance whose reactance at `f_hz` is `percent` of `z_base`.
pub fn size_ac_reactor(z_base: f64, percent: f64, f_hz: f64) -> Result<f64> {
    if !(f_hz > 0.0) {
        return Err(Error::Domain("reactor frequency must be > 0"));
    }
    if !(0.0..1.0).contains(&percent) {
        return Err(Error::Domain("reactor percent must lie in [0, 1)"));
    }
    Ok(percent * z_base / (2.0 * PI * f_hz))
}

/// DC-side coupler inductance giving a ripple reduction comparable to an AC
/// reactor of `l_a`.
pub fn size_dc_inductor(l_a: f64) -> f64 {
    DC_TO_AC_RATIO * l_a
}

/// Runs the whole inductance chain for `src`.
pub fn design_coupler(src: &SourceSpec, percent: f64) -> Result<CouplerDesign> {
    CouplerDesign::new(compute_z_base(src), percent, src.f_hz())
}

/// Worst-case coil current: DC maximum plus the arithmetic sum of the ripple
/// current amplitudes (all harmonics peaking together).
pub fn total_coil_current(i_dc_max: f64, ripple_currents: &HarmonicSpectrum) -> Result<f64> {
    if ripple_currents.quantity() != Quantity::Current {
        return Err(Error::Domain("ripple spectrum must hold currents"));
    }
    Ok(i_dc_max + ripple_currents.amplitude_sum())
}

/// Highest clamp-chain voltage the coil power rating allows at `i_total`.
pub fn clamp_voltage_budget(p_lcmax: f64, i_total: f64) -> Result<f64> {
    if p_lcmax == 0.0 {
        return Ok(0.0);
    }
    if !(i_total > 0.0) {
        return Err(Error::Domain("total coil current must be > 0"));
    }
    Ok(p_lcmax / i_total)
}

/// One of the four rules a clamp chain must satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainConstraint {
    /// `v_z + v_f <= budget`
    ChainVoltage,
    /// `i_zsm >= i_0`
    ZenerSurgeCurrent,
    /// diode `i_max >= i_0`
    DiodeCurrent,
    /// `t_surge >= t_required`
    SurgeDuration,
}

impl fmt::Display for ChainConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChainConstraint::ChainVoltage => "chain voltage v_z + v_f <= budget",
            ChainConstraint::ZenerSurgeCurrent => "zener surge current i_zsm >= i_0",
            ChainConstraint::DiodeCurrent => "diode current i_max >= i_0",
            ChainConstraint::SurgeDuration => "zener surge duration t_surge >= t_required",
        })
    }
}

/// Slack of one constraint for one candidate pair. Negative slack is a violation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintMargin {
    pub constraint: ChainConstraint,
    /// The bound the part value is compared against.
    pub limit: f64,
    /// The part value.
    pub actual: f64,
}

impl ConstraintMargin {
    /// Absolute slack in the constraint's favorable direction.
    pub fn margin(&self) -> f64 {
        match self.constraint {
            ChainConstraint::ChainVoltage => self.limit - self.actual,
            _ => self.actual - self.limit,
        }
    }

    /// Slack scaled by the limit, so constraints in different units compare.
    pub fn relative_margin(&self) -> f64 {
        let scale = if self.limit.abs() > 0.0 {
            self.limit.abs()
        } else {
            1.0
        };
        self.margin() / scale
    }

    pub fn satisfied(&self) -> bool {
        self.margin() >= 0.0
    }
}

/// Clamp-chain requirements handed to [`select_clamp_chain`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainRequirements {
    pub budget: f64,
    pub i_0: f64,
    pub t_required: f64,
}

impl ChainRequirements {
    /// All four constraint margins for a candidate pair.
    pub fn margins(&self, zener: &ZenerPart, diode: &FreewheelDiodePart) -> [ConstraintMargin; 4] {
        [
            ConstraintMargin {
                constraint: ChainConstraint::ChainVoltage,
                limit: self.budget,
                actual: zener.v_z() + diode.v_f(),
            },
            ConstraintMargin {
                constraint: ChainConstraint::ZenerSurgeCurrent,
                limit: self.i_0,
                actual: zener.i_zsm(),
            },
            ConstraintMargin {
                constraint: ChainConstraint::DiodeCurrent,
                limit: self.i_0,
                actual: diode.i_max(),
            },
            ConstraintMargin {
                constraint: ChainConstraint::SurgeDuration,
                limit: self.t_required,
                actual: zener.t_surge(),
            },
        ]
    }

    pub fn is_feasible(&self, zener: &ZenerPart, diode: &FreewheelDiodePart) -> bool {
        self.margins(zener, diode)
            .iter()
            .all(ConstraintMargin::satisfied)
    }
}

/// The selected zener and freewheel diode.
#[derive(Debug, Clone, PartialEq)]
pub struct ClampSelection {
    pub zener: ZenerPart,
    pub diode: FreewheelDiodePart,
}

impl ClampSelection {
    /// Threshold voltage of the clamp path.
    pub fn chain_voltage(&self) -> f64 {
        self.zener.v_z() + self.diode.v_f()
    }
}

/// The closest infeasible pair and the constraint it misses by the most.
#[derive(Debug, Clone, PartialEq)]
pub struct NearMiss {
    pub zener: alloc::string::String,
    pub diode: alloc::string::String,
    pub violated: ConstraintMargin,
}

/// No zener/diode pair in the catalog meets every constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct NoFeasiblePart {
    /// `None` when the catalog has no zeners or no diodes at all.
    pub nearest: Option<NearMiss>,
}

impl fmt::Display for NoFeasiblePart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.nearest {
            None => f.write_str("no feasible clamp chain: catalog has no zener/diode pairs"),
            Some(m) => write!(
                f,
                "no feasible clamp chain: closest pair ({}, {}) violates {} (limit {}, actual {}, margin {})",
                m.zener,
                m.diode,
                m.violated.constraint,
                m.violated.limit,
                m.violated.actual,
                m.violated.margin()
            ),
        }
    }
}

impl core::error::Error for NoFeasiblePart {}

/// Picks the clamp chain with the highest threshold voltage that still fits the
/// budget and current/duration ratings. Ties go to the lexicographically
/// smallest (zener, diode) name pair.
pub fn select_clamp_chain(
    budget: f64,
    i_0: f64,
    t_required: f64,
    catalog: &Catalog,
) -> Result<ClampSelection, NoFeasiblePart> {
    let req = ChainRequirements {
        budget,
        i_0,
        t_required,
    };
    let mut best: Option<(&ZenerPart, &FreewheelDiodePart)> = None;
    let mut nearest: Option<(f64, NearMiss)> = None;

    for zener in catalog.zeners() {
        for diode in catalog.diodes() {
            let margins = req.margins(zener, diode);
            let worst = margins
                .iter()
                .min_by(|a, b| a.relative_margin().total_cmp(&b.relative_margin()))
                .copied()
                .expect("four margins");
            if worst.satisfied() {
                if best.is_none_or(|b| better_chain((zener, diode), b)) {
                    best = Some((zener, diode));
                }
            } else if best.is_none() {
                let score = worst.relative_margin();
                if nearest.as_ref().is_none_or(|(s, _)| score > *s) {
                    nearest = Some((
                        score,
                        NearMiss {
                            zener: zener.name().into(),
                            diode: diode.name().into(),
                            violated: worst,
                        },
                    ));
                }
            }
        }
    }

    match best {
        Some((zener, diode)) => Ok(ClampSelection {
            zener: zener.clone(),
            diode: diode.clone(),
        }),
        None => Err(NoFeasiblePart {
            nearest: nearest.map(|(_, m)| m),
        }),
    }
}

fn better_chain(
    cand: (&ZenerPart, &FreewheelDiodePart),
    best: (&ZenerPart, &FreewheelDiodePart),
) -> bool {
    let v_cand = cand.0.v_z() + cand.1.v_f();
    let v_best = best.0.v_z() + best.1.v_f();
    match v_cand.total_cmp(&v_best) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => (cand.0.name(), cand.1.name()) < (best.0.name(), best.1.name()),
    }
}

/// Actual vs required value of one inductor check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Check {
    pub actual: f64,
    pub required: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.actual >= self.required
    }

    /// `actual - required`; negative means a deficit.
    pub fn margin(&self) -> f64 {
        self.actual - self.required
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InductorValidation {
    /// Part inductance against the designed `l_c`.
    pub inductance: Check,
    /// Part current rating against the worst-case coil current.
    pub current: Check,
}

impl InductorValidation {
    pub fn passed(&self) -> bool {
        self.inductance.passed() && self.current.passed()
    }
}

pub fn validate_inductor(
    part: &InductorPart,
    design: &CouplerDesign,
    i_total: f64,
) -> InductorValidation {
    InductorValidation {
        inductance: Check {
            actual: part.l(),
            required: design.l_c(),
        },
        current: Check {
            actual: part.i_max(),
            required: i_total,
        },
    }
}

/// Smallest catalog inductor with at least `l_required`; ties by name.
pub fn pick_inductor(catalog: &Catalog, l_required: f64) -> Option<&InductorPart> {
    catalog
        .inductors()
        .iter()
        .filter(|p| p.l() >= l_required)
        .min_by(|a, b| a.l().total_cmp(&b.l()).then_with(|| a.name().cmp(b.name())))
}
