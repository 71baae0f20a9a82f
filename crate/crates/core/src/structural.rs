//! Static moments, I-beam section properties, bending stress and the
//! per-joint torque demand of the arm under gravity.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use std::io::Write;

use crate::arm_model::{motor_torque_available, ArmSpec, IBeamSection, MaterialSpec};
use crate::error::{Error, Result};
use crate::kinematics::{chain_frames, JointState};
use crate::units::STANDARD_GRAVITY;

/// Margin applied to static torque to cover inertial loads while moving.
pub const DYNAMIC_LOAD_FACTOR: f64 = 1.5;

/// Gravity moment of a point mass on a horizontal lever: `M = m g d`.
pub fn moment(mass: f64, distance: f64, g: f64) -> Result<f64> {
    if mass.is_nan() || mass < 0.0 || distance.is_nan() || distance < 0.0 {
        return Err(Error::Domain(format!("moment needs mass >= 0 and distance >= 0, got m={mass}, d={distance}")));
    }
    Ok(mass * g * distance)
}

/// Sum of `b h^3` over the three plates, exactly as the simplified sizing
/// rule writes it: no 1/12 factor and no parallel-axis terms.
pub fn second_moment_paper(s: &IBeamSection) -> f64 {
    s.flange_width_top * s.flange_height_top.powi(3)
        + s.web_width * s.web_height.powi(3)
        + s.flange_width_bottom * s.flange_height_bottom.powi(3)
}

/// Plates as (width, height, centroid height above the bottom face).
fn plates(s: &IBeamSection) -> [(f64, f64, f64); 3] {
    let h3 = s.flange_height_bottom;
    let h2 = s.web_height;
    let h1 = s.flange_height_top;
    [
        (s.flange_width_bottom, h3, 0.5 * h3),
        (s.web_width, h2, h3 + 0.5 * h2),
        (s.flange_width_top, h1, h3 + h2 + 0.5 * h1),
    ]
}

/// Height of the section's neutral axis above its bottom face.
pub fn centroid_height(s: &IBeamSection) -> f64 {
    let (num, den) = plates(s).iter().fold((0.0, 0.0), |(n, d), &(b, h, y)| (n + b * h * y, d + b * h));
    num / den
}

/// Composite-section second moment about the horizontal centroidal axis.
pub fn second_moment_exact(s: &IBeamSection) -> f64 {
    let yc = centroid_height(s);
    plates(s).iter().map(|&(b, h, y)| b * h.powi(3) / 12.0 + b * h * (y - yc).powi(2)).sum()
}

/// Distance from the neutral axis to the farthest fiber.
pub fn extreme_fiber(s: &IBeamSection) -> f64 {
    let yc = centroid_height(s);
    yc.max(s.depth() - yc)
}

/// Flexure formula `sigma = M y / I`.
pub fn bending_stress(moment: f64, y: f64, second_moment: f64) -> Result<f64> {
    if !(second_moment > 0.0) {
        return Err(Error::Domain(format!("second moment must be positive, got {second_moment}")));
    }
    Ok(moment * y / second_moment)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialCheck {
    pub passes: bool,
    /// Strength over stress; infinite when unloaded.
    pub margin: f64,
}

pub fn material_check(stress: f64, material: &MaterialSpec) -> Result<MaterialCheck> {
    if stress.is_nan() || stress < 0.0 {
        return Err(Error::Domain(format!("stress must be non-negative, got {stress}")));
    }
    let margin = if stress == 0.0 { f64::INFINITY } else { material.flexural_strength / stress };
    Ok(MaterialCheck { passes: margin >= 1.0, margin })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointLoad {
    pub joint: String,
    /// Torque the motor must hold, signed about the joint axis.
    pub static_torque: f64,
    pub design_torque: f64,
    /// Motor torque at zero speed.
    pub available_torque: f64,
    /// `available / |design|`; infinite when the joint carries no load.
    pub safety_factor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkLoad {
    pub link: String,
    /// Magnitude of the gravity bending moment at the link root.
    pub moment: f64,
    /// Stress using the simplified `sum b h^3` second moment.
    pub bending_stress_paper: f64,
    /// Stress using the composite-section second moment.
    pub bending_stress_exact: f64,
    /// Flexural strength over the exact stress.
    pub strength_margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaticsReport {
    pub payload: f64,
    pub per_joint: Vec<JointLoad>,
    pub per_link: Vec<LinkLoad>,
}

impl StaticsReport {
    pub fn min_safety_factor(&self) -> f64 {
        self.per_joint.iter().map(|j| j.safety_factor).fold(f64::INFINITY, f64::min)
    }

    pub fn write_joint_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Configuration(format!("csv write failed: {e}"));
        w.write_record(["joint", "static_torque", "design_torque", "available_torque", "safety_factor"])
            .map_err(io)?;
        for j in &self.per_joint {
            w.write_record([
                j.joint.clone(),
                j.static_torque.to_string(),
                j.design_torque.to_string(),
                j.available_torque.to_string(),
                j.safety_factor.to_string(),
            ])
            .map_err(io)?;
        }
        w.flush().map_err(|e| Error::Configuration(format!("csv write failed: {e}")))
    }
}

/// A point load in world coordinates.
#[derive(Debug, Clone, Copy)]
struct PointMass {
    position: Vector3<f64>,
    mass: f64,
}

fn gravity_force(mass: f64) -> Vector3<f64> {
    Vector3::new(0.0, 0.0, -mass * STANDARD_GRAVITY)
}

/// Holding torque each joint must supply at configuration `angles`, signed
/// about the joint axis. Used by the statics report and by the simulator.
pub fn gravity_torques(spec: &ArmSpec, angles: &[f64], payload: f64) -> Result<Vec<f64>> {
    let frames = chain_frames(spec, angles)?;
    let masses = point_masses(spec, &frames, payload);
    let fixed = spec.fixed_links();
    Ok(frames
        .joint_origins
        .iter()
        .zip(&frames.joint_axes)
        .enumerate()
        .map(|(j, (o, a))| -a.dot(&gravity_moment(&masses, fixed + j, o)))
        .collect())
}

/// Gravity moment about `pivot` of every mass mounted at or beyond `link`.
fn gravity_moment(masses: &[(usize, PointMass)], link: usize, pivot: &Vector3<f64>) -> Vector3<f64> {
    masses
        .iter()
        .filter(|(at, _)| *at >= link)
        .map(|(_, pm)| (pm.position - pivot).cross(&gravity_force(pm.mass)))
        .sum()
}

/// Every point mass tagged with the index of the link it rides on. Motors
/// ride at the root of the link they drive; the gripper and payload sit past
/// the last link.
fn point_masses(spec: &ArmSpec, frames: &crate::kinematics::ChainFrames, payload: f64) -> Vec<(usize, PointMass)> {
    let fixed = spec.fixed_links();
    let mut out = Vec::with_capacity(spec.links.len() + spec.joints.len() + 1);
    for (k, link) in spec.links.iter().enumerate() {
        out.push((k, PointMass { position: frames.link_coms[k], mass: link.mass }));
    }
    for (j, joint) in spec.joints.iter().enumerate() {
        out.push((fixed + j, PointMass { position: frames.joint_origins[j], mass: joint.motor.mass }));
    }
    out.push((spec.links.len(), PointMass { position: frames.tool.position, mass: spec.gripper.mass + payload }));
    out
}

/// Static torque chain: for every joint, the holding torque from all distal
/// links, motors, the gripper and the payload at configuration `q`, the
/// design torque after the dynamic factor, and the margin against the
/// motor's stall torque. Also reports root bending stress for every link.
pub fn torque_chain(spec: &ArmSpec, q: &JointState, payload: f64) -> Result<StaticsReport> {
    if payload.is_nan() || payload < 0.0 {
        return Err(Error::Domain(format!("payload must be non-negative, got {payload}")));
    }
    let frames = chain_frames(spec, &q.angles)?;
    let torques = gravity_torques(spec, &q.angles, payload)?;

    let mut per_joint = Vec::with_capacity(torques.len());
    for (joint, &tau) in spec.joints.iter().zip(&torques) {
        let available = motor_torque_available(&joint.motor, 0.0)?;
        let design = DYNAMIC_LOAD_FACTOR * tau;
        let safety_factor = if design == 0.0 { f64::INFINITY } else { available / design.abs() };
        per_joint.push(JointLoad {
            joint: joint.name.clone(),
            static_torque: tau,
            design_torque: design,
            available_torque: available,
            safety_factor,
        });
    }

    let masses = point_masses(spec, &frames, payload);
    let mut per_link = Vec::with_capacity(spec.links.len());
    for (k, link) in spec.links.iter().enumerate() {
        let m = gravity_moment(&masses, k, &frames.link_roots[k]);
        let moment = m.norm();
        let s = &link.cross_section;
        let y = extreme_fiber(s);
        let sigma_paper = bending_stress(moment, y, second_moment_paper(s))?;
        let sigma_exact = bending_stress(moment, y, second_moment_exact(s))?;
        per_link.push(LinkLoad {
            link: link.name.clone(),
            moment,
            bending_stress_paper: sigma_paper,
            bending_stress_exact: sigma_exact,
            strength_margin: material_check(sigma_exact, &link.material)?.margin,
        });
    }
    Ok(StaticsReport { payload, per_joint, per_link })
}

/// Largest holding-torque magnitude each joint sees over a set of
/// configurations. Evaluated in parallel when the `parallel` feature is on.
pub fn worst_case_torques(spec: &ArmSpec, configs: &[JointState], payload: f64) -> Result<Vec<f64>> {
    let per_config = crate::batch::map(configs, |q| gravity_torques(spec, &q.angles, payload));
    let mut worst = vec![0.0_f64; spec.dof()];
    for torques in per_config {
        for (w, t) in worst.iter_mut().zip(torques?) {
            *w = w.max(t.abs());
        }
    }
    Ok(worst)
}
