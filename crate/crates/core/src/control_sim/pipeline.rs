use nalgebra::Vector3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::pid::{pid_step, PidGains, PidMemory};
use super::scene::{localize, validate_scene, Scene, SceneObject};
use super::trace::{CycleTrace, Fault, FaultKind, PipelineState, TraceEvent};
use crate::arm_model::{motor_torque_available, validate_arm, ArmSpec, GripperKind};
use crate::error::{Error, Result};
use crate::kinematics::{chain_frames, inverse_kinematics, IkOptions, JointState, Pose};
use crate::structural::gravity_torques;

/// Largest accepted integration step, seconds.
pub const MAX_DT: f64 = 0.05;

/// Simulator settings. Everything here is synthetic: the defaults were tuned
/// so the desk arm completes a cycle comfortably inside ten seconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    pub gains: PidGains,
    pub dt: f64,
    pub seed: u64,
    /// Camera fix noise, meters (x and y).
    pub localization_sigma: f64,
    /// Per-joint inertia seen by the motor, kg·m².
    pub reflected_inertia: f64,
    /// Viscous friction, N·m·s/rad.
    pub viscous_damping: f64,
    /// Peak joint speed of planned moves, rad/s.
    pub plan_speed: f64,
    pub min_segment_time: f64,
    /// Approach and retreat height above grasp and place points, meters.
    pub hover_height: f64,
    pub capture_time: f64,
    pub localize_time: f64,
    pub grip_time: f64,
    pub release_time: f64,
    pub settle_position_tol: f64,
    pub settle_velocity_tol: f64,
    pub settle_timeout: f64,
    pub max_cycle_time: f64,
    /// Largest horizontal placement error still counted as a success, meters.
    pub placement_tolerance: f64,
    /// Joint angles to start and finish at. Defaults to a folded pose found by IK.
    pub home: Option<Vec<f64>>,
    /// Object to pick. Defaults to the first one in the scene.
    pub object_id: Option<String>,
    /// Simulated time at which the emergency stop is pressed.
    pub estop_at: Option<f64>,
    pub estop_hold_time: f64,
    /// Tool acceleration above which a vacuum seal is flagged as at risk, m/s².
    pub seal_accel_limit: f64,
    pub ik: IkOptions,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            gains: PidGains::default(),
            dt: 1e-3,
            seed: 0,
            localization_sigma: 0.001,
            reflected_inertia: 0.01,
            viscous_damping: 0.02,
            plan_speed: 1.5,
            min_segment_time: 0.3,
            hover_height: 0.05,
            capture_time: 0.05,
            localize_time: 0.05,
            grip_time: 0.3,
            release_time: 0.3,
            settle_position_tol: 1e-3,
            settle_velocity_tol: 0.02,
            settle_timeout: 2.0,
            max_cycle_time: 60.0,
            placement_tolerance: 0.01,
            home: None,
            object_id: None,
            estop_at: None,
            estop_hold_time: 0.1,
            seal_accel_limit: 5.0,
            ik: IkOptions::default(),
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt <= MAX_DT) {
            return Err(Error::Validation(format!("dt must lie in (0, {MAX_DT}], got {}", self.dt)));
        }
        self.gains.validate()?;
        let positive = [
            ("reflected_inertia", self.reflected_inertia),
            ("plan_speed", self.plan_speed),
            ("settle_position_tol", self.settle_position_tol),
            ("settle_velocity_tol", self.settle_velocity_tol),
            ("settle_timeout", self.settle_timeout),
            ("max_cycle_time", self.max_cycle_time),
            ("placement_tolerance", self.placement_tolerance),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Validation(format!("{name} must be positive, got {v}")));
            }
        }
        let non_negative = [
            ("localization_sigma", self.localization_sigma),
            ("viscous_damping", self.viscous_damping),
            ("min_segment_time", self.min_segment_time),
            ("hover_height", self.hover_height),
            ("capture_time", self.capture_time),
            ("localize_time", self.localize_time),
            ("grip_time", self.grip_time),
            ("release_time", self.release_time),
            ("estop_hold_time", self.estop_hold_time),
            ("seal_accel_limit", self.seal_accel_limit),
        ];
        for (name, v) in non_negative {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Validation(format!("{name} must be non-negative, got {v}")));
            }
        }
        Ok(())
    }
}

/// Folded starting pose: the IK solution for a point a third of the reach
/// out and up from the base, along the workspace heading.
pub fn default_home(spec: &ArmSpec, scene: &Scene, ik: &IkOptions) -> Result<Vec<f64>> {
    let r = spec.total_length() / 3.0;
    let h = scene.workspace.heading;
    let target = spec.base_mount.position + Vector3::new(r * h.cos(), r * h.sin(), r);
    let sol = inverse_kinematics(spec, &Pose::from_position(target), &JointState::mid_range(spec), ik)?;
    Ok(sol.state.angles)
}

/// Upper bound on tool speed implied by the motor speed limits.
pub fn max_tool_speed(spec: &ArmSpec) -> f64 {
    spec.joints.iter().map(|j| j.motor.rated_speed).sum::<f64>() * spec.total_length()
}

fn min_jerk(s: f64) -> f64 {
    let s = s.clamp(0.0, 1.0);
    s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)
}

struct Sim<'a> {
    spec: &'a ArmSpec,
    cfg: &'a SimConfig,
    state: PipelineState,
    step: u64,
    q: Vec<f64>,
    qd: Vec<f64>,
    q_ref: Vec<f64>,
    pid: Vec<PidMemory>,
    payload: f64,
    /// Object offset from the tool point while held.
    held: Option<Vector3<f64>>,
    events: Vec<TraceEvent>,
    tool: Vector3<f64>,
    prev_tool: Option<Vector3<f64>>,
    seal_hazard: bool,
}

impl<'a> Sim<'a> {
    fn new(spec: &'a ArmSpec, cfg: &'a SimConfig, home: Vec<f64>) -> Result<Self> {
        let tool = chain_frames(spec, &home)?.tool.position;
        let n = home.len();
        let mut sim = Self {
            spec,
            cfg,
            state: PipelineState::AwaitInput,
            step: 0,
            q_ref: home.clone(),
            q: home,
            qd: vec![0.0; n],
            pid: vec![PidMemory::default(); n],
            payload: 0.0,
            held: None,
            events: Vec::new(),
            tool,
            prev_tool: None,
            seal_hazard: false,
        };
        sim.record();
        Ok(sim)
    }

    fn t(&self) -> f64 {
        self.step as f64 * self.cfg.dt
    }

    fn record(&mut self) {
        let frames = chain_frames(self.spec, &self.q).expect("dimension checked");
        self.events.push(TraceEvent {
            t: self.t(),
            state: self.state,
            joint_state: self.q.clone(),
            joint_velocity: self.qd.clone(),
            end_effector_pose: frames.tool,
        });
    }

    fn fault(&self, kind: FaultKind, message: impl Into<String>) -> Fault {
        Fault { t: self.t(), during: self.state, kind, message: message.into() }
    }

    fn enter(&mut self, state: PipelineState) {
        debug_assert!(self.state.can_transition(state));
        self.state = state;
    }

    fn emergency_stop(&mut self) -> Fault {
        let during = self.state;
        self.enter(PipelineState::FaultHold);
        self.qd.iter_mut().for_each(|v| *v = 0.0);
        self.step += 1;
        self.record();
        let t = self.t();
        let hold = (self.cfg.estop_hold_time / self.cfg.dt).round() as u64;
        for _ in 0..hold {
            self.step += 1;
            self.record();
        }
        Fault { t, during, kind: FaultKind::EmergencyStop, message: "emergency stop pressed".into() }
    }

    /// One integration step toward the current reference.
    fn advance(&mut self) -> std::result::Result<(), Fault> {
        let dt = self.cfg.dt;
        let t_next = (self.step + 1) as f64 * dt;
        if self.cfg.estop_at.is_some_and(|te| t_next >= te) {
            return Err(self.emergency_stop());
        }
        if t_next > self.cfg.max_cycle_time {
            return Err(self.fault(FaultKind::Timeout, format!("cycle exceeded {} s", self.cfg.max_cycle_time)));
        }
        let hold = gravity_torques(self.spec, &self.q, self.payload).expect("dimension checked");
        for (i, joint) in self.spec.joints.iter().enumerate() {
            let available = motor_torque_available(&joint.motor, self.qd[i].abs()).expect("motor validated");
            if hold[i].abs() > available {
                return Err(self.fault(
                    FaultKind::Stall { joint: joint.name.clone(), demand: hold[i].abs(), available },
                    format!("{} needs {:.4} N·m, motor supplies {:.4} N·m", joint.name, hold[i].abs(), available),
                ));
            }
            let err = self.q_ref[i] - self.q[i];
            let (u, mem) = pid_step(&self.cfg.gains, err, dt, self.pid[i]).expect("dt validated");
            self.pid[i] = mem;
            let torque = (hold[i] + u).clamp(-available, available);
            let accel = (torque - hold[i] - self.cfg.viscous_damping * self.qd[i]) / self.cfg.reflected_inertia;
            let rated = joint.motor.rated_speed;
            let mut v = (self.qd[i] + accel * dt).clamp(-rated, rated);
            let mut q = self.q[i] + v * dt;
            if q < joint.limits[0] || q > joint.limits[1] {
                q = q.clamp(joint.limits[0], joint.limits[1]);
                v = 0.0;
            }
            self.q[i] = q;
            self.qd[i] = v;
        }
        self.step += 1;
        self.record();
        let tool = self.events.last().expect("just recorded").end_effector_pose.position;
        if let (Some(prev), true) = (self.prev_tool, self.spec.gripper.kind == GripperKind::Vacuum) {
            let accel = (tool - 2.0 * self.tool + prev).norm() / (dt * dt);
            if accel > self.cfg.seal_accel_limit && self.held.is_some() {
                self.seal_hazard = true;
            }
        }
        self.prev_tool = Some(self.tool);
        self.tool = tool;
        Ok(())
    }

    fn dwell(&mut self, state: PipelineState, duration: f64) -> std::result::Result<(), Fault> {
        self.enter(state);
        let n = ((duration / self.cfg.dt).round() as u64).max(1);
        for _ in 0..n {
            self.advance()?;
        }
        Ok(())
    }

    fn solve(&self, target: Vector3<f64>) -> std::result::Result<Vec<f64>, Fault> {
        let seed = JointState { angles: self.q_ref.clone() };
        match inverse_kinematics(self.spec, &Pose::from_position(target), &seed, &self.cfg.ik) {
            Ok(sol) => Ok(sol.state.angles),
            Err(e @ Error::Unreachable { .. }) => Err(self.fault(FaultKind::Unreachable, e.to_string())),
            Err(e) => Err(self.fault(FaultKind::NoSolution, e.to_string())),
        }
    }

    /// Minimum-jerk move in joint space, then hold until settled.
    fn move_to(&mut self, goal: &[f64]) -> std::result::Result<(), Fault> {
        let start = self.q_ref.clone();
        let span = start.iter().zip(goal).map(|(a, b)| (b - a).abs()).fold(0.0, f64::max);
        let duration = (1.875 * span / self.cfg.plan_speed).max(self.cfg.min_segment_time);
        let t0 = self.t();
        loop {
            let s = (self.t() + self.cfg.dt - t0) / duration;
            let blend = min_jerk(s);
            for (r, (a, b)) in self.q_ref.iter_mut().zip(start.iter().zip(goal)) {
                *r = a + (b - a) * blend;
            }
            self.advance()?;
            if s >= 1.0 {
                break;
            }
        }
        let settle_start = self.t();
        while !self.settled(goal) {
            if self.t() - settle_start > self.cfg.settle_timeout {
                return Err(self.fault(FaultKind::SettleTimeout, "joints did not settle at waypoint"));
            }
            self.advance()?;
        }
        Ok(())
    }

    fn settled(&self, goal: &[f64]) -> bool {
        self.q.iter().zip(goal).all(|(q, g)| (q - g).abs() <= self.cfg.settle_position_tol)
            && self.qd.iter().all(|v| v.abs() <= self.cfg.settle_velocity_tol)
    }

    fn object_position(&self, resting: Vector3<f64>) -> Vector3<f64> {
        self.held.map_or(resting, |offset| self.tool + offset)
    }
}

fn check_inputs(spec: &ArmSpec, scene: &Scene, cfg: &SimConfig) -> Result<()> {
    validate_arm(spec).into_result()?;
    cfg.validate()?;
    validate_scene(&scene.objects, &scene.bins, &scene.workspace)
}

fn pick_object<'s>(scene: &'s Scene, cfg: &SimConfig) -> Result<&'s SceneObject> {
    match &cfg.object_id {
        Some(id) => scene
            .objects
            .iter()
            .find(|o| &o.id == id)
            .ok_or_else(|| Error::Validation(format!("scene has no object '{id}'"))),
        None => scene.objects.first().ok_or_else(|| Error::Validation("scene has no objects".into())),
    }
}

/// Runs one pick-and-place cycle for a single object.
///
/// Invalid inputs are returned as errors. Anything that goes wrong while the
/// arm is moving is recorded in the trace with `succeeded = false`.
pub fn run_cycle(spec: &ArmSpec, scene: &Scene, cfg: &SimConfig) -> Result<CycleTrace> {
    check_inputs(spec, scene, cfg)?;
    let object = pick_object(scene, cfg)?;
    let bin = scene
        .bins
        .get(&object.color)
        .ok_or_else(|| Error::Validation(format!("no bin for color '{}'", object.color)))?
        .position;
    let home = match &cfg.home {
        Some(h) => JointState::new(spec, h.clone())?.angles,
        None => default_home(spec, scene, &cfg.ik)?,
    };

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut sim = Sim::new(spec, cfg, home.clone())?;
    let resting = object.position();
    let mut placed: Option<Vector3<f64>> = None;
    let lift = Vector3::new(0.0, 0.0, cfg.hover_height);

    let outcome = (|| -> std::result::Result<(), Fault> {
        sim.dwell(PipelineState::AwaitInput, 0.0)?;
        sim.dwell(PipelineState::Capture, cfg.capture_time)?;
        sim.enter(PipelineState::Localize);
        let fix = localize(object, cfg.localization_sigma, &scene.workspace, &mut rng)
            .map_err(|e| sim.fault(FaultKind::NotVisible, e.to_string()))?;
        sim.dwell(PipelineState::Localize, cfg.localize_time)?;

        sim.enter(PipelineState::MoveToObject);
        let above_object = sim.solve(fix + lift)?;
        sim.move_to(&above_object)?;
        let at_object = sim.solve(fix)?;
        sim.move_to(&at_object)?;

        sim.enter(PipelineState::Grip);
        let miss = (sim.tool - resting).norm();
        if miss > spec.gripper.grip_tolerance {
            return Err(sim.fault(
                FaultKind::GripMiss { distance: miss },
                format!("tool {miss:.4} m from object, tolerance {}", spec.gripper.grip_tolerance),
            ));
        }
        sim.held = Some(resting - sim.tool);
        sim.payload = object.mass;
        sim.dwell(PipelineState::Grip, cfg.grip_time)?;

        sim.enter(PipelineState::Transit);
        sim.move_to(&above_object)?;
        let above_bin = sim.solve(bin + lift)?;
        sim.move_to(&above_bin)?;

        sim.enter(PipelineState::Place);
        let at_bin = sim.solve(bin)?;
        sim.move_to(&at_bin)?;

        sim.enter(PipelineState::Release);
        placed = Some(sim.object_position(resting));
        sim.held = None;
        sim.payload = 0.0;
        sim.dwell(PipelineState::Release, cfg.release_time)?;

        sim.enter(PipelineState::Home);
        sim.move_to(&home)?;
        Ok(())
    })();

    let fault = outcome.err();
    if let Some(f) = &fault {
        if f.kind != FaultKind::EmergencyStop {
            sim.enter(PipelineState::Fault);
            sim.qd.iter_mut().for_each(|v| *v = 0.0);
            sim.step += 1;
            sim.record();
        }
    }
    let final_pos = placed.unwrap_or_else(|| sim.object_position(resting));
    let placement_error = (final_pos.xy() - bin.xy()).norm();
    let cycle_time = match (sim.events.first(), sim.events.last()) {
        (Some(a), Some(b)) => b.t - a.t,
        _ => 0.0,
    };
    Ok(CycleTrace {
        object_id: object.id.clone(),
        bin_color: object.color.clone(),
        seed: cfg.seed,
        dt: cfg.dt,
        succeeded: fault.is_none() && placement_error <= cfg.placement_tolerance,
        fault,
        events: sim.events,
        cycle_time,
        placement_error,
        final_object_position: final_pos.into(),
        seal_hazard: sim.seal_hazard,
    })
}

/// One cycle per scene object, in scene order. Cycle `i` uses seed `seed + i`.
pub fn run_session(spec: &ArmSpec, scene: &Scene, cfg: &SimConfig) -> Result<Vec<CycleTrace>> {
    check_inputs(spec, scene, cfg)?;
    scene
        .objects
        .iter()
        .enumerate()
        .map(|(i, o)| {
            let c = SimConfig { object_id: Some(o.id.clone()), seed: cfg.seed.wrapping_add(i as u64), ..cfg.clone() };
            run_cycle(spec, scene, &c)
        })
        .collect()
}

/// Independent cycles for each seed; parallel when the `parallel` feature is on.
pub fn seed_sweep(spec: &ArmSpec, scene: &Scene, cfg: &SimConfig, seeds: &[u64]) -> Vec<Result<CycleTrace>> {
    crate::batch::map(seeds, |&seed| run_cycle(spec, scene, &SimConfig { seed, ..cfg.clone() }))
}

/// Reference scene: one 11 g block in front of the base and its bin on the
/// 13 in circle, 45 degrees to the left.
pub fn desk_scene() -> Scene {
    use std::collections::BTreeMap;
    let r = crate::units::inches(13.0);
    let a = 0.75 * std::f64::consts::PI;
    let mut bins = BTreeMap::new();
    bins.insert("red".to_string(), Pose::at(r * a.cos(), r * a.sin(), -0.04));
    Scene {
        objects: vec![SceneObject::jenga("block-1", "red", [0.0, 0.22, -0.04])],
        bins,
        workspace: crate::presets::desk_workspace(),
    }
}
