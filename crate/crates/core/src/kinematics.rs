//! Forward and inverse kinematics of the serial chain, and workspace
//! membership predicates.

use nalgebra::{Matrix3, Quaternion, Unit, UnitQuaternion, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use crate::arm_model::ArmSpec;
use crate::error::{Error, Result};
use crate::units::inches;

/// Cartesian position plus orientation.
///
/// Serialized as `{"position": [x, y, z], "orientation": [w, x, y, z]}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub position: Vector3<f64>,
    pub orientation: UnitQuaternion<f64>,
}

impl Default for Pose {
    fn default() -> Self {
        Self::identity()
    }
}

impl Pose {
    pub fn identity() -> Self {
        Self { position: Vector3::zeros(), orientation: UnitQuaternion::identity() }
    }

    pub fn from_position(position: Vector3<f64>) -> Self {
        Self { position, orientation: UnitQuaternion::identity() }
    }

    pub fn at(x: f64, y: f64, z: f64) -> Self {
        Self::from_position(Vector3::new(x, y, z))
    }

    pub fn quaternion_wxyz(&self) -> [f64; 4] {
        let q = self.orientation.quaternion();
        [q.w, q.i, q.j, q.k]
    }
}

#[derive(Serialize, Deserialize)]
struct PoseRepr {
    position: [f64; 3],
    #[serde(default = "identity_wxyz")]
    orientation: [f64; 4],
}

fn identity_wxyz() -> [f64; 4] {
    [1.0, 0.0, 0.0, 0.0]
}

impl Serialize for Pose {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PoseRepr { position: self.position.into(), orientation: self.quaternion_wxyz() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Pose {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = PoseRepr::deserialize(d)?;
        let [w, x, y, z] = repr.orientation;
        let q = Quaternion::new(w, x, y, z);
        let norm = q.norm();
        if !(norm.is_finite() && norm > 1e-12) {
            return Err(serde::de::Error::custom("orientation quaternion must be non-zero"));
        }
        Ok(Pose { position: repr.position.into(), orientation: UnitQuaternion::from_quaternion(q) })
    }
}

/// One angle per joint, checked against the arm's limits at construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointState {
    pub angles: Vec<f64>,
}

impl JointState {
    pub fn new(spec: &ArmSpec, angles: Vec<f64>) -> Result<Self> {
        check_dimension(spec, &angles)?;
        for (i, (a, j)) in angles.iter().zip(&spec.joints).enumerate() {
            let [lo, hi] = j.limits;
            if !(a.is_finite() && *a >= lo && *a <= hi) {
                return Err(Error::ContractViolation(format!(
                    "joint {i} ('{}') angle {a} outside limits [{lo}, {hi}]",
                    j.name
                )));
            }
        }
        Ok(Self { angles })
    }

    pub fn zeros(spec: &ArmSpec) -> Result<Self> {
        Self::new(spec, vec![0.0; spec.dof()])
    }

    /// Midpoint of every joint range.
    pub fn mid_range(spec: &ArmSpec) -> Self {
        Self { angles: spec.joints.iter().map(|j| 0.5 * (j.limits[0] + j.limits[1])).collect() }
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }
}

fn check_dimension(spec: &ArmSpec, angles: &[f64]) -> Result<()> {
    if angles.len() != spec.dof() {
        return Err(Error::ContractViolation(format!(
            "expected {} joint angles, got {}",
            spec.dof(),
            angles.len()
        )));
    }
    Ok(())
}

/// World-frame geometry of the chain at one configuration.
#[derive(Debug, Clone)]
pub struct ChainFrames {
    /// Origin of each joint.
    pub joint_origins: Vec<Vector3<f64>>,
    /// Unit rotation axis of each joint.
    pub joint_axes: Vec<Vector3<f64>>,
    /// Root (proximal end) of each link.
    pub link_roots: Vec<Vector3<f64>>,
    /// Center of mass of each link.
    pub link_coms: Vec<Vector3<f64>>,
    pub tool: Pose,
}

/// Walks the chain and records every joint, link root and link centroid.
pub fn chain_frames(spec: &ArmSpec, angles: &[f64]) -> Result<ChainFrames> {
    check_dimension(spec, angles)?;
    let mut rot = spec.base_mount.orientation;
    let mut p = spec.base_mount.position;
    let n = spec.links.len();
    let mut frames = ChainFrames {
        joint_origins: Vec::with_capacity(spec.dof()),
        joint_axes: Vec::with_capacity(spec.dof()),
        link_roots: Vec::with_capacity(n),
        link_coms: Vec::with_capacity(n),
        tool: Pose::identity(),
    };
    for (k, link) in spec.links.iter().enumerate() {
        if let Some(j) = spec.driving_joint(k) {
            let axis = Unit::new_normalize(Vector3::from(spec.joints[j].axis));
            frames.joint_origins.push(p);
            frames.joint_axes.push(rot * axis.into_inner());
            rot *= UnitQuaternion::from_axis_angle(&axis, angles[j]);
        }
        let along = rot * Vector3::x();
        frames.link_roots.push(p);
        frames.link_coms.push(p + along * (link.length * link.com_fraction));
        p += along * link.length;
    }
    frames.tool = Pose { position: p, orientation: rot };
    Ok(frames)
}

/// Tool pose for a joint configuration.
pub fn forward_kinematics(spec: &ArmSpec, q: &JointState) -> Result<Pose> {
    Ok(chain_frames(spec, &q.angles)?.tool)
}

/// Positional Jacobian columns `a_i x (p_tool - p_i)`.
pub fn position_jacobian(frames: &ChainFrames) -> Vec<Vector3<f64>> {
    let tip = frames.tool.position;
    frames
        .joint_axes
        .iter()
        .zip(&frames.joint_origins)
        .map(|(a, o)| a.cross(&(tip - o)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IkOptions {
    /// Accepted position residual, meters.
    pub tol: f64,
    /// Iteration budget per attempt.
    pub max_iters: usize,
    /// Base damping of the least-squares step.
    pub damping: f64,
    /// Additional attempts from pseudo-random seeds after the caller's seed fails.
    pub restarts: usize,
    pub restart_seed: u64,
}

impl Default for IkOptions {
    fn default() -> Self {
        Self { tol: 1e-4, max_iters: 500, damping: 1e-3, restarts: 8, restart_seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IkSolution {
    pub state: JointState,
    pub residual: f64,
    /// Iterations spent across all attempts.
    pub iters: usize,
}

fn clamp_to_limits(spec: &ArmSpec, q: &mut [f64]) {
    for (a, j) in q.iter_mut().zip(&spec.joints) {
        *a = a.clamp(j.limits[0], j.limits[1]);
    }
}

fn tool_position(spec: &ArmSpec, q: &[f64]) -> Vector3<f64> {
    // dimension already checked by the caller
    chain_frames(spec, q).expect("dimension checked").tool.position
}

struct Attempt {
    q: Vec<f64>,
    residual: f64,
    iters: usize,
}

/// Damped least squares with limit projection. The damping grows when a step
/// fails to reduce the residual and relaxes back toward the base value when
/// it succeeds.
fn dls_attempt(spec: &ArmSpec, target: &Vector3<f64>, seed: Vec<f64>, opts: &IkOptions) -> Attempt {
    let mut q = seed;
    clamp_to_limits(spec, &mut q);
    let mut frames = chain_frames(spec, &q).expect("dimension checked");
    let mut err = target - frames.tool.position;
    let mut residual = err.norm();
    let mut mu = opts.damping;
    let mut iters = 0;
    while residual > opts.tol && iters < opts.max_iters {
        iters += 1;
        let jac = position_jacobian(&frames);
        let mut jjt = Matrix3::identity() * (mu * mu);
        for c in &jac {
            jjt += c * c.transpose();
        }
        let Some(y) = jjt.lu().solve(&err) else {
            mu *= 10.0;
            continue;
        };
        let mut trial: Vec<f64> = q.iter().zip(&jac).map(|(a, c)| a + c.dot(&y)).collect();
        clamp_to_limits(spec, &mut trial);
        let trial_frames = chain_frames(spec, &trial).expect("dimension checked");
        let trial_err = target - trial_frames.tool.position;
        let trial_residual = trial_err.norm();
        if trial_residual < residual {
            q = trial;
            frames = trial_frames;
            err = trial_err;
            residual = trial_residual;
            mu = (mu * 0.5).max(opts.damping);
        } else {
            mu *= 10.0;
            if mu > 1e3 {
                break;
            }
        }
    }
    Attempt { q, residual, iters }
}

/// Position-only inverse kinematics.
///
/// Starts from `seed`; if that attempt stalls (typically against a joint
/// limit) it retries from `opts.restarts` configurations drawn from a
/// generator seeded with `opts.restart_seed`, so results are reproducible.
pub fn inverse_kinematics(
    spec: &ArmSpec,
    target: &Pose,
    seed: &JointState,
    opts: &IkOptions,
) -> Result<IkSolution> {
    check_dimension(spec, &seed.angles)?;
    let goal = target.position;
    let reach = spec.total_length();
    let distance = (goal - spec.base_mount.position).norm();
    if distance > reach + opts.tol {
        return Err(Error::Unreachable { distance, reach });
    }

    let mut total_iters = 0;
    let first = dls_attempt(spec, &goal, seed.angles.clone(), opts);
    total_iters += first.iters;
    let mut best = first;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.restart_seed);
    let mut restart = 0;
    while best.residual > opts.tol && restart < opts.restarts {
        restart += 1;
        let start: Vec<f64> = spec.joints.iter().map(|j| rng.random_range(j.limits[0]..=j.limits[1])).collect();
        let attempt = dls_attempt(spec, &goal, start, opts);
        total_iters += attempt.iters;
        if attempt.residual < best.residual {
            best = attempt;
        }
    }
    if best.residual > opts.tol {
        return Err(Error::NoSolution { residual: best.residual, iters: total_iters });
    }
    debug_assert!((tool_position(spec, &best.q) - goal).norm() <= opts.tol);
    Ok(IkSolution { state: JointState { angles: best.q }, residual: best.residual, iters: total_iters })
}

/// Solves many independent targets from a common seed. Runs on the rayon
/// pool when the `parallel` feature is enabled.
pub fn inverse_kinematics_batch(
    spec: &ArmSpec,
    targets: &[Pose],
    seed: &JointState,
    opts: &IkOptions,
) -> Vec<Result<IkSolution>> {
    crate::batch::map(targets, |t| inverse_kinematics(spec, t, seed, opts))
}

/// Operating region of the arm: a vertical half cylinder in front of the
/// base plus the annulus in which placement targets live.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Workspace {
    pub reach_radius: f64,
    /// Angular width of the sector, radians.
    pub sweep: f64,
    /// Azimuth of the sector's center line, radians from +x.
    #[serde(default = "default_heading")]
    pub heading: f64,
    pub annulus_inner: f64,
    pub annulus_outer: f64,
    /// Points closer than this to the base axis collide with the base.
    #[serde(default = "default_base_exclusion")]
    pub base_exclusion_radius: f64,
    /// Optional vertical bounds; unbounded when absent.
    #[serde(default)]
    pub z_min: Option<f64>,
    #[serde(default)]
    pub z_max: Option<f64>,
}

fn default_heading() -> f64 {
    FRAC_PI_2
}

fn default_base_exclusion() -> f64 {
    0.05
}

/// Horizontal reach when a 24 in arm is limited to 45 degrees from the base.
pub fn default_reach_radius() -> f64 {
    inches(24.0) * FRAC_PI_4.cos()
}

impl Default for Workspace {
    fn default() -> Self {
        Self {
            reach_radius: default_reach_radius(),
            sweep: PI,
            heading: default_heading(),
            annulus_inner: inches(12.0),
            annulus_outer: inches(14.0),
            base_exclusion_radius: default_base_exclusion(),
            z_min: None,
            z_max: None,
        }
    }
}

const ANGLE_EPS: f64 = 1e-12;

impl Workspace {
    pub fn validate(&self) -> Result<()> {
        let ok = 0.0 < self.annulus_inner
            && self.annulus_inner < self.annulus_outer
            && self.annulus_outer <= self.reach_radius
            && 0.0 < self.sweep
            && self.sweep <= TAU;
        if !ok {
            return Err(Error::Validation(format!(
                "workspace needs 0 < inner < outer <= reach and 0 < sweep <= 2pi, got {self:?}"
            )));
        }
        if let (Some(lo), Some(hi)) = (self.z_min, self.z_max) {
            if lo > hi {
                return Err(Error::Validation("workspace z_min exceeds z_max".into()));
            }
        }
        Ok(())
    }

    fn horizontal_radius(p: &Vector3<f64>) -> f64 {
        p.x.hypot(p.y)
    }

    /// Closed angular membership in the sweep sector. The base axis itself
    /// lies on the sector's edge and is inside.
    pub fn in_sector(&self, p: &Vector3<f64>) -> bool {
        if self.sweep >= TAU || Self::horizontal_radius(p) == 0.0 {
            return true;
        }
        let az = p.y.atan2(p.x);
        let mut diff = (az - self.heading) % TAU;
        if diff > PI {
            diff -= TAU;
        } else if diff < -PI {
            diff += TAU;
        }
        diff.abs() <= 0.5 * self.sweep + ANGLE_EPS
    }

    fn in_height(&self, p: &Vector3<f64>) -> bool {
        self.z_min.is_none_or(|lo| p.z >= lo) && self.z_max.is_none_or(|hi| p.z <= hi)
    }

    pub fn contains(&self, p: &Vector3<f64>) -> bool {
        Self::horizontal_radius(p) <= self.reach_radius && self.in_sector(p) && self.in_height(p)
    }

    pub fn annulus_contains(&self, p: &Vector3<f64>) -> bool {
        let r = Self::horizontal_radius(p);
        self.annulus_inner <= r && r <= self.annulus_outer && self.in_sector(p)
    }

    pub fn in_base_exclusion(&self, p: &Vector3<f64>) -> bool {
        Self::horizontal_radius(p) < self.base_exclusion_radius
    }

    /// Inside the workspace and clear of the base.
    pub fn serviceable(&self, p: &Vector3<f64>) -> bool {
        self.contains(p) && !self.in_base_exclusion(p)
    }
}

pub fn workspace_contains(ws: &Workspace, point: &Vector3<f64>) -> bool {
    ws.contains(point)
}

pub fn target_annulus_contains(ws: &Workspace, point: &Vector3<f64>) -> bool {
    ws.annulus_contains(point)
}
