use serde::{Deserialize, Serialize};
use std::fmt;
use std::io::Write;

use crate::error::{Error, Result};
use crate::kinematics::Pose;

/// Stages of one pick-and-place cycle, in execution order, plus the two
/// terminal fault states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PipelineState {
    AwaitInput,
    Capture,
    Localize,
    MoveToObject,
    Grip,
    Transit,
    Place,
    Release,
    Home,
    /// A stage failed; motion stopped.
    Fault,
    /// Emergency stop: motion stopped and position held.
    FaultHold,
}

impl PipelineState {
    pub const ORDER: [PipelineState; 9] = [
        PipelineState::AwaitInput,
        PipelineState::Capture,
        PipelineState::Localize,
        PipelineState::MoveToObject,
        PipelineState::Grip,
        PipelineState::Transit,
        PipelineState::Place,
        PipelineState::Release,
        PipelineState::Home,
    ];

    pub fn next(self) -> Option<PipelineState> {
        let i = Self::ORDER.iter().position(|s| *s == self)?;
        Self::ORDER.get(i + 1).copied()
    }

    pub fn is_fault(self) -> bool {
        matches!(self, PipelineState::Fault | PipelineState::FaultHold)
    }

    /// Allowed edges: stay, advance one stage, or drop into a fault state.
    pub fn can_transition(self, to: PipelineState) -> bool {
        self == to || self.next() == Some(to) || (to.is_fault() && !self.is_fault())
    }
}

impl fmt::Display for PipelineState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum FaultKind {
    /// Gravity demand exceeded the torque the motor can supply.
    Stall { joint: String, demand: f64, available: f64 },
    Unreachable,
    NoSolution,
    NotVisible,
    /// Tool point not within grip tolerance of the object.
    GripMiss { distance: f64 },
    /// Joints did not come to rest at a waypoint in time.
    SettleTimeout,
    EmergencyStop,
    /// Cycle exceeded the configured wall of simulated time.
    Timeout,
}

impl FaultKind {
    pub fn name(&self) -> &'static str {
        match self {
            FaultKind::Stall { .. } => "Stall",
            FaultKind::Unreachable => "Unreachable",
            FaultKind::NoSolution => "NoSolution",
            FaultKind::NotVisible => "NotVisible",
            FaultKind::GripMiss { .. } => "GripMiss",
            FaultKind::SettleTimeout => "SettleTimeout",
            FaultKind::EmergencyStop => "EmergencyStop",
            FaultKind::Timeout => "Timeout",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fault {
    pub t: f64,
    /// Stage that was running.
    pub during: PipelineState,
    #[serde(flatten)]
    pub kind: FaultKind,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub t: f64,
    pub state: PipelineState,
    pub joint_state: Vec<f64>,
    pub joint_velocity: Vec<f64>,
    pub end_effector_pose: Pose,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleTrace {
    pub object_id: String,
    pub bin_color: String,
    pub seed: u64,
    pub dt: f64,
    pub events: Vec<TraceEvent>,
    pub cycle_time: f64,
    /// Horizontal distance between the object and its bin at the end.
    pub placement_error: f64,
    pub succeeded: bool,
    pub fault: Option<Fault>,
    pub final_object_position: [f64; 3],
    /// Set when a vacuum gripper saw accelerations that could break the seal.
    pub seal_hazard: bool,
}

/// The part of a trace that scoring needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleSummary {
    pub object_id: String,
    pub bin_color: String,
    pub seed: u64,
    pub cycle_time: f64,
    pub placement_error: f64,
    pub succeeded: bool,
    #[serde(default)]
    pub fault: Option<String>,
    #[serde(default)]
    pub seal_hazard: bool,
}

impl CycleSummary {
    pub fn stalled(&self) -> bool {
        self.fault.as_deref() == Some("Stall")
    }
}

impl CycleTrace {
    pub fn summary(&self) -> CycleSummary {
        CycleSummary {
            object_id: self.object_id.clone(),
            bin_color: self.bin_color.clone(),
            seed: self.seed,
            cycle_time: self.cycle_time,
            placement_error: self.placement_error,
            succeeded: self.succeeded,
            fault: self.fault.as_ref().map(|f| f.kind.name().to_string()),
            seal_hazard: self.seal_hazard,
        }
    }

    /// Stages in the order they were entered.
    pub fn visited_states(&self) -> Vec<PipelineState> {
        let mut out: Vec<PipelineState> = Vec::new();
        for e in &self.events {
            if out.last() != Some(&e.state) {
                out.push(e.state);
            }
        }
        out
    }

    /// `t,state,q0..qn,x,y,z`, one row per event.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let err = |e: csv::Error| Error::Configuration(format!("csv write failed: {e}"));
        let n = self.events.first().map_or(0, |e| e.joint_state.len());
        let mut header = vec!["t".to_string(), "state".to_string()];
        header.extend((0..n).map(|i| format!("q{i}")));
        header.extend(["x", "y", "z"].map(String::from));
        w.write_record(&header).map_err(err)?;
        for e in &self.events {
            let mut row = Vec::with_capacity(n + 5);
            row.push(e.t.to_string());
            row.push(e.state.to_string());
            row.extend(e.joint_state.iter().map(|q| q.to_string()));
            let p = e.end_effector_pose.position;
            row.extend([p.x, p.y, p.z].map(|c| c.to_string()));
            w.write_record(&row).map_err(err)?;
        }
        w.flush().map_err(|e| Error::Configuration(format!("csv write failed: {e}")))
    }
}
