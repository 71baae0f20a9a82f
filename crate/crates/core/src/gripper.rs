//! Gear-mesh spacing for the two-finger gripper and the syringe-driven
//! vacuum gripper chain: cup and syringe volumes, isothermal expansion,
//! holding force and payload capacity.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::units::GRIPPER_WEIGHT_DIVISOR;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GearSpec {
    pub teeth: u32,
    /// Linear gear parameter as it enters the pitch-diameter rule
    /// `N p / (N + 2)`.
    pub circular_pitch: f64,
}

impl GearSpec {
    pub fn validate(&self) -> Result<()> {
        if self.teeth < 3 {
            return Err(Error::Validation(format!("gear needs at least 3 teeth, got {}", self.teeth)));
        }
        if !(self.circular_pitch > 0.0 && self.circular_pitch.is_finite()) {
            return Err(Error::Validation(format!("circular pitch must be positive, got {}", self.circular_pitch)));
        }
        Ok(())
    }
}

/// `N p / (N + 2)`.
pub fn pitch_diameter(g: &GearSpec) -> Result<f64> {
    g.validate()?;
    let n = g.teeth as f64;
    Ok(n * g.circular_pitch / (n + 2.0))
}

/// Shaft spacing for two meshing gears: the mean of their pitch diameters.
pub fn center_distance(g1: &GearSpec, g2: &GearSpec) -> Result<f64> {
    Ok(0.5 * (pitch_diameter(g1)? + pitch_diameter(g2)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VacuumSpec {
    /// Radius of the hemispherical suction cup.
    pub cup_radius: f64,
    pub syringe_radius: f64,
    /// How far the plunger is drawn back.
    pub plunger_travel: f64,
    /// Pressure of the trapped air before the plunger moves, Pa.
    #[serde(default = "default_ambient")]
    pub ambient_pressure: f64,
}

fn default_ambient() -> f64 {
    1.035e5
}

impl VacuumSpec {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !(positive(self.cup_radius) && positive(self.syringe_radius) && positive(self.ambient_pressure)) {
            return Err(Error::Validation(format!("vacuum dimensions and pressure must be positive: {self:?}")));
        }
        // zero travel is the no-vacuum limit, still a valid configuration
        if !(self.plunger_travel >= 0.0 && self.plunger_travel.is_finite()) {
            return Err(Error::Validation(format!("plunger travel must be non-negative, got {}", self.plunger_travel)));
        }
        Ok(())
    }

    pub fn cup_area(&self) -> f64 {
        PI * self.cup_radius * self.cup_radius
    }
}

/// Which pressure the holding force is computed from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForceMode {
    /// Residual absolute pressure times cup area.
    #[default]
    Absolute,
    /// Pressure differential (ambient minus residual) times cup area.
    Physical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VacuumResult {
    /// Cup volume, the initial trapped volume.
    pub v1: f64,
    /// Syringe volume swept by the plunger.
    pub v2: f64,
    pub vf: f64,
    pub p1: f64,
    pub p2: f64,
    pub area: f64,
    /// `p2 * area`.
    pub force_absolute: f64,
    /// `(p1 - p2) * area`.
    pub force_physical: f64,
    pub mode: ForceMode,
    /// Force selected by `mode`.
    pub force: f64,
    /// `force / 9.81`, kg.
    pub payload_capacity: f64,
    /// Set when the plunger did not move, so there is no pressure drop.
    pub zero_differential: bool,
}

/// `V1 = 2/3 pi r^3` for a hemispherical cup.
pub fn hemisphere_volume(radius: f64) -> f64 {
    2.0 / 3.0 * PI * radius.powi(3)
}

/// `V2 = pi r^2 h`.
pub fn cylinder_volume(radius: f64, height: f64) -> f64 {
    PI * radius * radius * height
}

/// Isothermal expansion of the trapped air: `p2 = p1 v1 / vf`.
pub fn boyle_pressure(p1: f64, v1: f64, vf: f64) -> Result<f64> {
    if !(vf > 0.0) {
        return Err(Error::Domain(format!("final volume must be positive, got {vf}")));
    }
    Ok(p1 * v1 / vf)
}

/// `F = P A`.
pub fn pressure_force(pressure: f64, area: f64) -> f64 {
    pressure * area
}

/// `W = F / 9.81`, the liftable mass for a holding force.
pub fn weight_capacity(force: f64) -> f64 {
    force / GRIPPER_WEIGHT_DIVISOR
}

/// Runs the whole vacuum-gripper chain from dimensions.
pub fn vacuum_chain(v: &VacuumSpec, mode: ForceMode) -> Result<VacuumResult> {
    v.validate()?;
    let v1 = hemisphere_volume(v.cup_radius);
    let v2 = cylinder_volume(v.syringe_radius, v.plunger_travel);
    let vf = v1 + v2;
    let p1 = v.ambient_pressure;
    let p2 = boyle_pressure(p1, v1, vf)?;
    let area = v.cup_area();
    let force_absolute = pressure_force(p2, area);
    let force_physical = pressure_force(p1 - p2, area);
    let force = match mode {
        ForceMode::Absolute => force_absolute,
        ForceMode::Physical => force_physical,
    };
    Ok(VacuumResult {
        v1,
        v2,
        vf,
        p1,
        p2,
        area,
        force_absolute,
        force_physical,
        mode,
        force,
        payload_capacity: weight_capacity(force),
        zero_differential: v.plunger_travel == 0.0,
    })
}

/// Whether the gripper can hold `object_mass` (closed bound).
pub fn payload_feasible(r: &VacuumResult, object_mass: f64) -> Result<bool> {
    if object_mass.is_nan() || object_mass < 0.0 {
        return Err(Error::Domain(format!("object mass must be non-negative, got {object_mass}")));
    }
    Ok(r.payload_capacity >= object_mass)
}
