//! Ready-made components and the reference desk-scale arm.
//!
//! Motor figures are vendor datasheet values. Link masses are derived from
//! section area, density and length. Values that have no published source
//! (link section, gripper body mass) are plausible desk-scale choices.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::arm_model::{
    ArmSpec, GripperKind, GripperSpec, IBeamSection, JointKind, JointSpec, LinkSpec, MaterialSpec,
    MotorKind, MotorSpec,
};
use crate::gripper::VacuumSpec;
use crate::kinematics::{Pose, Workspace};
use crate::units::{inches, kgf_cm_to_nm};

/// MG996R metal-gear servo: 9.4 kgf·cm stall at 4.8 V, 55 g,
/// 0.17 s per 60 degrees unloaded.
pub fn mg996r() -> MotorSpec {
    MotorSpec {
        name: "MG996R".into(),
        kind: MotorKind::Servo,
        mass: 0.055,
        stall_torque: kgf_cm_to_nm(9.4),
        rated_speed: (PI / 3.0) / 0.17,
        operating_voltage: 4.8,
        steps_per_rev: 0,
        current_draw: 2.4,
    }
}

/// 28BYJ-48 geared stepper.
pub fn small_reduction_stepper() -> MotorSpec {
    MotorSpec {
        name: "28BYJ-48".into(),
        kind: MotorKind::Stepper,
        mass: 0.037,
        stall_torque: kgf_cm_to_nm(0.34),
        rated_speed: 15.0 * 2.0 * PI / 60.0,
        operating_voltage: 5.0,
        steps_per_rev: 2048,
        current_draw: 0.24,
    }
}

/// Cast PMMA sheet. Scores follow the material trade-study row.
pub fn acrylic() -> MaterialSpec {
    MaterialSpec {
        name: "acrylic".into(),
        density: 1180.0,
        flexural_strength: 90e6,
        material_cost_score: 9.0,
        machining_cost_score: 9.0,
    }
}

/// Laser-cut acrylic I-section used for every desk-arm link.
pub fn desk_link_section() -> IBeamSection {
    IBeamSection::symmetric(0.015, 0.002, 0.003, 0.016)
}

fn link(name: &str, length: f64, section: IBeamSection, material: MaterialSpec) -> LinkSpec {
    LinkSpec {
        name: name.into(),
        length,
        mass: material.density * section.area() * length,
        cross_section: section,
        material,
        com_fraction: 0.5,
    }
}

fn revolute(name: &str, axis: [f64; 3], limits: [f64; 2], motor: MotorSpec) -> JointSpec {
    JointSpec { name: name.into(), kind: JointKind::FullRevolute, axis, limits, motor }
}

/// Axis for pitch joints; positive angles raise the distal link.
pub const PITCH_AXIS: [f64; 3] = [0.0, -1.0, 0.0];
pub const YAW_AXIS: [f64; 3] = [0.0, 0.0, 1.0];

/// Four-joint yaw/pitch/pitch/pitch arm, 24 in at full extension, driven by
/// MG996R servos, with a two-finger gripper. With the base counted as the
/// ground link the chain has five links and four full joints.
pub fn desk_arm() -> ArmSpec {
    let section = desk_link_section();
    let m = acrylic();
    let lengths = [inches(2.0), inches(10.0), inches(9.0), inches(3.0)];
    let names = ["turntable", "upper_arm", "forearm", "wrist"];
    let links = names
        .iter()
        .zip(lengths)
        .map(|(n, l)| link(n, l, section, m.clone()))
        .collect();
    let joints = vec![
        revolute("base_yaw", YAW_AXIS, [0.0, PI], mg996r()),
        revolute("shoulder", PITCH_AXIS, [0.0, PI], mg996r()),
        revolute("elbow", PITCH_AXIS, [-0.75 * PI, 0.25 * PI], mg996r()),
        revolute("wrist", PITCH_AXIS, [-FRAC_PI_2, FRAC_PI_2], mg996r()),
    ];
    ArmSpec {
        links,
        joints,
        gripper: GripperSpec {
            kind: GripperKind::TwoFinger,
            mass: 0.075,
            motor: Some(mg996r()),
            grip_tolerance: 0.005,
            vacuum: None,
        },
        base_mount: Pose::identity(),
        payload_mass: 0.011,
    }
}

/// Syringe-and-cup vacuum gripper: 30 mm hemispherical cup, 20 mm bore
/// syringe retracted 4.76 cm, sea-level ambient pressure.
pub fn desk_vacuum() -> VacuumSpec {
    VacuumSpec { cup_radius: 0.015, syringe_radius: 0.010, plunger_travel: 0.0476, ambient_pressure: 1.035e5 }
}

/// Mass of a standard Jenga block.
pub const JENGA_BLOCK_MASS: f64 = 0.011;

pub fn desk_workspace() -> Workspace {
    Workspace::default()
}

/// Pitch-only chain in the vertical x–z plane with explicit masses and a
/// massless gripper. Handy for statics cross-checks.
pub fn planar_chain(lengths: &[f64], link_masses: &[f64], motor_mass: f64) -> ArmSpec {
    assert_eq!(lengths.len(), link_masses.len());
    let section = desk_link_section();
    let mut motor = mg996r();
    motor.mass = motor_mass;
    let links = lengths
        .iter()
        .zip(link_masses)
        .enumerate()
        .map(|(i, (&l, &mass))| LinkSpec {
            name: format!("link{i}"),
            length: l,
            mass,
            cross_section: section,
            material: acrylic(),
            com_fraction: 0.5,
        })
        .collect();
    let joints = (0..lengths.len())
        .map(|i| revolute(&format!("joint{i}"), PITCH_AXIS, [-PI, PI], motor.clone()))
        .collect();
    ArmSpec {
        links,
        joints,
        gripper: GripperSpec {
            kind: GripperKind::TwoFinger,
            mass: 0.0,
            motor: None,
            grip_tolerance: 0.005,
            vacuum: None,
        },
        base_mount: Pose::identity(),
        payload_mass: 0.0,
    }
}
