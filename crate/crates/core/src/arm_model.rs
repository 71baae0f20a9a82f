//! Declarative arm description: links, joints, motors, materials and the
//! end-effector, plus mobility counting and structural validation.
//!
//! Chain convention: `links` are ordered from the base outward. When there
//! are as many joints as links, joint `i` drives link `i`. When there is one
//! fewer joint, link 0 is a rigid offset bolted to the base and joint `i`
//! drives link `i + 1`. Every link extends along the local +x axis of the
//! frame produced by its driving joint.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gripper::VacuumSpec;
use crate::kinematics::Pose;

/// Rectangular-plate I-beam: top flange, web, bottom flange, stacked.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IBeamSection {
    pub flange_width_top: f64,
    pub flange_height_top: f64,
    pub web_width: f64,
    pub web_height: f64,
    pub flange_width_bottom: f64,
    pub flange_height_bottom: f64,
}

impl IBeamSection {
    pub fn symmetric(flange_width: f64, flange_height: f64, web_width: f64, web_height: f64) -> Self {
        Self {
            flange_width_top: flange_width,
            flange_height_top: flange_height,
            web_width,
            web_height,
            flange_width_bottom: flange_width,
            flange_height_bottom: flange_height,
        }
    }

    pub fn depth(&self) -> f64 {
        self.flange_height_top + self.web_height + self.flange_height_bottom
    }

    pub fn area(&self) -> f64 {
        self.flange_width_top * self.flange_height_top
            + self.web_width * self.web_height
            + self.flange_width_bottom * self.flange_height_bottom
    }

    fn dims(&self) -> [(&'static str, f64); 6] {
        [
            ("flange_width_top", self.flange_width_top),
            ("flange_height_top", self.flange_height_top),
            ("web_width", self.web_width),
            ("web_height", self.web_height),
            ("flange_width_bottom", self.flange_width_bottom),
            ("flange_height_bottom", self.flange_height_bottom),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialSpec {
    pub name: String,
    /// kg/m³
    pub density: f64,
    /// Pa
    pub flexural_strength: f64,
    /// Relative 0–10 score, higher is cheaper.
    pub material_cost_score: f64,
    pub machining_cost_score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkSpec {
    pub name: String,
    pub length: f64,
    pub mass: f64,
    pub cross_section: IBeamSection,
    pub material: MaterialSpec,
    /// Position of the link's center of mass as a fraction of its length.
    #[serde(default = "default_com_fraction")]
    pub com_fraction: f64,
}

fn default_com_fraction() -> f64 {
    0.5
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MotorKind {
    Servo,
    Stepper,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotorSpec {
    pub name: String,
    pub kind: MotorKind,
    pub mass: f64,
    /// N·m at zero speed.
    pub stall_torque: f64,
    /// rad/s at which available torque reaches zero.
    pub rated_speed: f64,
    pub operating_voltage: f64,
    /// Stepper resolution; 0 for servos.
    #[serde(default)]
    pub steps_per_rev: u32,
    pub current_draw: f64,
}

/// Servo torque stays flat up to this fraction of rated speed.
pub const SERVO_KNEE_FRACTION: f64 = 0.8;

/// Torque a motor can deliver at the given shaft speed.
///
/// Steppers derate linearly from stall torque at rest to zero at rated
/// speed. Servos hold stall torque up to 80 % of rated speed and then fall
/// linearly to zero.
pub fn motor_torque_available(motor: &MotorSpec, speed: f64) -> Result<f64> {
    if speed.is_nan() || speed < 0.0 {
        return Err(Error::Domain(format!("motor speed must be non-negative, got {speed}")));
    }
    if speed >= motor.rated_speed {
        return Ok(0.0);
    }
    let t = match motor.kind {
        MotorKind::Stepper => motor.stall_torque * (1.0 - speed / motor.rated_speed),
        MotorKind::Servo => {
            let knee = SERVO_KNEE_FRACTION * motor.rated_speed;
            if speed <= knee {
                motor.stall_torque
            } else {
                motor.stall_torque * (motor.rated_speed - speed) / (motor.rated_speed - knee)
            }
        }
    };
    Ok(t.max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JointKind {
    /// Removes two planar degrees of freedom (pin or slider).
    FullRevolute,
    /// Removes one planar degree of freedom (rolling-slipping contact).
    HalfJoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointSpec {
    pub name: String,
    pub kind: JointKind,
    /// Rotation axis in the parent frame.
    pub axis: [f64; 3],
    /// [min, max] radians.
    pub limits: [f64; 2],
    pub motor: MotorSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GripperKind {
    TwoFinger,
    Vacuum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GripperSpec {
    pub kind: GripperKind,
    /// Total end-effector mass including its actuator, carried at the tool point.
    pub mass: f64,
    #[serde(default)]
    pub motor: Option<MotorSpec>,
    /// Maximum tool-point distance from the object at which a grasp succeeds.
    #[serde(default = "default_grip_tolerance")]
    pub grip_tolerance: f64,
    #[serde(default)]
    pub vacuum: Option<VacuumSpec>,
}

fn default_grip_tolerance() -> f64 {
    0.005
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmSpec {
    pub links: Vec<LinkSpec>,
    pub joints: Vec<JointSpec>,
    pub gripper: GripperSpec,
    #[serde(default)]
    pub base_mount: Pose,
    /// Default payload used by analyses that are not given one explicitly.
    #[serde(default)]
    pub payload_mass: f64,
}

impl ArmSpec {
    pub fn dof(&self) -> usize {
        self.joints.len()
    }

    /// Number of leading links rigidly fixed to the base (0 or 1).
    pub fn fixed_links(&self) -> usize {
        self.links.len().saturating_sub(self.joints.len())
    }

    /// Index of the joint driving link `link`, if any.
    pub fn driving_joint(&self, link: usize) -> Option<usize> {
        link.checked_sub(self.fixed_links())
    }

    pub fn total_length(&self) -> f64 {
        self.links.iter().map(|l| l.length).sum()
    }

    /// Planar mobility of the chain. The base counts as the ground link and
    /// a base-fixed offset link merges into it.
    pub fn mobility(&self) -> i64 {
        let full = self.joints.iter().filter(|j| j.kind == JointKind::FullRevolute).count();
        let half = self.joints.len() - full;
        gruebler_dof(self.joints.len() as u32 + 1, full as u32, half as u32)
    }

    pub fn joint_limits(&self) -> Vec<[f64; 2]> {
        self.joints.iter().map(|j| j.limits).collect()
    }
}

/// Planar mobility by Gruebler's count: `3(L - 1) - 2 J1 - J2`.
///
/// A result of zero or below is returned as-is; it denotes a structure or an
/// overconstrained mechanism.
pub fn gruebler_dof(links: u32, full_joints: u32, half_joints: u32) -> i64 {
    3 * (links as i64 - 1) - 2 * full_joints as i64 - half_joints as i64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    /// Dotted location, e.g. `joints[2].limits`.
    pub path: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Violation { path: path.into(), message: message.into() });
    }

    /// Converts a non-empty report into a validation error.
    pub fn into_result(self) -> Result<()> {
        if self.is_valid() {
            return Ok(());
        }
        let msg = self
            .violations
            .iter()
            .map(|v| format!("{}: {}", v.path, v.message))
            .collect::<Vec<_>>()
            .join("; ");
        Err(Error::Validation(msg))
    }
}

const AXIS_NORM_TOLERANCE: f64 = 1e-9;

fn check_positive(report: &mut ValidationReport, path: String, value: f64) {
    if !(value.is_finite() && value > 0.0) {
        report.push(path, format!("must be positive, got {value}"));
    }
}

fn check_non_negative(report: &mut ValidationReport, path: String, value: f64) {
    if !(value.is_finite() && value >= 0.0) {
        report.push(path, format!("must be non-negative, got {value}"));
    }
}

fn check_motor(report: &mut ValidationReport, path: &str, motor: &MotorSpec) {
    check_positive(report, format!("{path}.stall_torque"), motor.stall_torque);
    check_positive(report, format!("{path}.rated_speed"), motor.rated_speed);
    check_non_negative(report, format!("{path}.mass"), motor.mass);
    check_non_negative(report, format!("{path}.current_draw"), motor.current_draw);
    if motor.kind == MotorKind::Stepper && motor.steps_per_rev == 0 {
        report.push(format!("{path}.steps_per_rev"), "stepper needs a step count");
    }
}

fn check_material(report: &mut ValidationReport, path: &str, m: &MaterialSpec) {
    check_positive(report, format!("{path}.density"), m.density);
    check_positive(report, format!("{path}.flexural_strength"), m.flexural_strength);
    for (field, score) in [("material_cost_score", m.material_cost_score), ("machining_cost_score", m.machining_cost_score)] {
        if !(0.0..=10.0).contains(&score) {
            report.push(format!("{path}.{field}"), format!("score must lie in [0, 10], got {score}"));
        }
    }
}

/// Checks connectivity, dimensions, joint ranges and motors. Violations are
/// returned as data; an empty report means every analysis accepts the spec.
pub fn validate_arm(spec: &ArmSpec) -> ValidationReport {
    let mut report = ValidationReport::default();

    if spec.links.is_empty() {
        report.push("links", "arm needs at least one link");
    }
    if spec.joints.is_empty() {
        report.push("joints", "arm needs at least one joint");
    }
    let n_links = spec.links.len();
    let n_joints = spec.joints.len();
    if n_joints > n_links || n_links - n_joints > 1 {
        report.push(
            "joints",
            format!("serial chain needs one joint per link or one fewer, got {n_joints} joints for {n_links} links"),
        );
    }

    for (i, link) in spec.links.iter().enumerate() {
        let path = format!("links[{i}]");
        if link.name.trim().is_empty() {
            report.push(format!("{path}.name"), "empty name");
        }
        check_positive(&mut report, format!("{path}.length"), link.length);
        check_non_negative(&mut report, format!("{path}.mass"), link.mass);
        if !(0.0..=1.0).contains(&link.com_fraction) {
            report.push(format!("{path}.com_fraction"), "must lie in [0, 1]");
        }
        for (field, v) in link.cross_section.dims() {
            check_positive(&mut report, format!("{path}.cross_section.{field}"), v);
        }
        check_material(&mut report, &format!("{path}.material"), &link.material);
    }

    for (i, joint) in spec.joints.iter().enumerate() {
        let path = format!("joints[{i}]");
        let [lo, hi] = joint.limits;
        if !(lo.is_finite() && hi.is_finite()) {
            report.push(format!("{path}.limits"), "limits must be finite");
        } else if lo == hi {
            report.push(format!("{path}.limits"), "degenerate joint range");
        } else if lo > hi {
            report.push(format!("{path}.limits"), "inverted joint range");
        }
        let norm = joint.axis.iter().map(|a| a * a).sum::<f64>().sqrt();
        if !((norm - 1.0).abs() <= AXIS_NORM_TOLERANCE) {
            report.push(format!("{path}.axis"), format!("axis must be a unit vector, norm is {norm}"));
        }
        check_motor(&mut report, &format!("{path}.motor"), &joint.motor);
    }

    for (i, a) in spec.links.iter().enumerate() {
        for b in &spec.links[i + 1..] {
            if a.name == b.name {
                report.push(format!("links[{i}].name"), format!("duplicate link name '{}'", a.name));
            }
        }
    }

    check_non_negative(&mut report, "gripper.mass".into(), spec.gripper.mass);
    check_positive(&mut report, "gripper.grip_tolerance".into(), spec.gripper.grip_tolerance);
    if let Some(m) = &spec.gripper.motor {
        check_motor(&mut report, "gripper.motor", m);
    }
    if let Some(v) = &spec.gripper.vacuum {
        if let Err(e) = v.validate() {
            report.push("gripper.vacuum", e.to_string());
        }
    }
    check_non_negative(&mut report, "payload_mass".into(), spec.payload_mass);
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    #[test]
    fn gruebler_counts() {
        assert_eq!(gruebler_dof(5, 4, 0), 4);
        assert_eq!(gruebler_dof(2, 1, 0), 1);
        assert_eq!(gruebler_dof(4, 4, 0), 1);
        // overconstrained truss
        assert_eq!(gruebler_dof(3, 3, 0), 0);
        assert_eq!(gruebler_dof(2, 3, 1), -4);
    }

    #[test]
    fn gruebler_is_linear_in_full_joints() {
        for l in 1..8 {
            for j1 in 1..8 {
                for j2 in 0..4 {
                    assert_eq!(gruebler_dof(l, j1, j2) + 2, gruebler_dof(l, j1 - 1, j2));
                }
            }
        }
    }

    #[test]
    fn paper_arm_is_valid_with_four_dof() {
        let arm = presets::desk_arm();
        let report = validate_arm(&arm);
        assert!(report.is_valid(), "{report:?}");
        assert_eq!(arm.mobility(), 4);
    }

    #[test]
    fn degenerate_joint_range_is_one_violation() {
        let mut arm = presets::desk_arm();
        arm.joints[1].limits = [0.3, 0.3];
        let report = validate_arm(&arm);
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].message, "degenerate joint range");
    }

    #[test]
    fn zero_length_link_is_one_violation() {
        let mut arm = presets::desk_arm();
        arm.links[2].length = 0.0;
        let report = validate_arm(&arm);
        assert_eq!(report.violations.len(), 1, "{report:?}");
        assert_eq!(report.violations[0].path, "links[2].length");
    }

    #[test]
    fn non_unit_axis_and_bad_topology_flagged() {
        let mut arm = presets::desk_arm();
        arm.joints[0].axis = [0.0, 0.0, 1.1];
        arm.links.pop();
        arm.links.pop();
        let report = validate_arm(&arm);
        let paths: Vec<_> = report.violations.iter().map(|v| v.path.as_str()).collect();
        assert!(paths.contains(&"joints"));
        assert!(paths.contains(&"joints[0].axis"));
        assert!(report.into_result().is_err());
    }

    #[test]
    fn torque_curves() {
        let servo = presets::mg996r();
        let t = servo.stall_torque;
        assert!((t - 0.9218251).abs() < 1e-6);
        assert_eq!(motor_torque_available(&servo, 0.0).unwrap(), t);
        assert_eq!(motor_torque_available(&servo, 0.5 * servo.rated_speed).unwrap(), t);
        assert_eq!(motor_torque_available(&servo, 0.8 * servo.rated_speed).unwrap(), t);
        let at_09 = motor_torque_available(&servo, 0.9 * servo.rated_speed).unwrap();
        assert!((at_09 - 0.5 * t).abs() < 1e-12);
        assert_eq!(motor_torque_available(&servo, servo.rated_speed).unwrap(), 0.0);
        assert_eq!(motor_torque_available(&servo, 2.0 * servo.rated_speed).unwrap(), 0.0);

        let stepper = presets::small_reduction_stepper();
        let s = stepper.stall_torque;
        assert_eq!(motor_torque_available(&stepper, 0.0).unwrap(), s);
        let half = motor_torque_available(&stepper, 0.5 * stepper.rated_speed).unwrap();
        assert!((half - 0.5 * s).abs() < 1e-12);
        assert_eq!(motor_torque_available(&stepper, stepper.rated_speed).unwrap(), 0.0);

        assert!(matches!(motor_torque_available(&servo, -1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn torque_curves_are_monotone() {
        for motor in [presets::mg996r(), presets::small_reduction_stepper()] {
            let mut prev = f64::INFINITY;
            for k in 0..=400 {
                let w = motor.rated_speed * 1.25 * k as f64 / 400.0;
                let t = motor_torque_available(&motor, w).unwrap();
                assert!(t <= prev);
                prev = t;
            }
        }
    }
}
