//! Discrete-time pick-and-place simulator: joint PID control against motor
//! torque limits, a synthetic camera, and run scoring.

pub mod pid;
pub mod pipeline;
pub mod scene;
pub mod score;
pub mod trace;

pub use pid::{pid_step, step_response, FirstOrderPlant, PidGains, PidMemory};
pub use pipeline::{default_home, desk_scene, max_tool_speed, run_cycle, run_session, seed_sweep, SimConfig, MAX_DT};
pub use scene::{localize, localize_seeded, ObjectOrientation, ObjectShape, Scene, SceneObject, MAX_COLOR_LABELS};
pub use score::{score_run, Rubric, ScoreCard};
pub use trace::{CycleSummary, CycleTrace, Fault, FaultKind, PipelineState, TraceEvent};
