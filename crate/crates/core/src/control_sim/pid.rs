use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gains and saturation limits for one joint controller. Output is a
/// torque in N·m; errors are in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PidGains {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
    /// Bound on the integral term's contribution, N·m.
    pub integral_limit: f64,
    /// Bound on the total command, N·m.
    pub output_limit: f64,
}

impl Default for PidGains {
    fn default() -> Self {
        Self { kp: 8.0, ki: 0.5, kd: 0.2, integral_limit: 0.3, output_limit: 1.0 }
    }
}

impl PidGains {
    pub fn validate(&self) -> Result<()> {
        if !(self.kp >= 0.0 && self.ki >= 0.0 && self.kd >= 0.0) {
            return Err(Error::Validation(format!("PID gains must be non-negative: {self:?}")));
        }
        if !(self.integral_limit > 0.0 && self.output_limit > 0.0) {
            return Err(Error::Validation(format!("PID limits must be positive: {self:?}")));
        }
        Ok(())
    }
}

/// Controller state carried between steps.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PidMemory {
    /// Accumulated error integral, rad·s.
    pub integral: f64,
    pub prev_error: Option<f64>,
}

/// One controller update.
///
/// `kp e + ki ∫e + kd de/dt`, with the integral term clamped to
/// `integral_limit` (the accumulator is clamped with it, so it cannot wind
/// up) and the sum clamped to `output_limit`. The derivative is zero on the
/// first step.
pub fn pid_step(gains: &PidGains, error: f64, dt: f64, memory: PidMemory) -> Result<(f64, PidMemory)> {
    if !(dt > 0.0) {
        return Err(Error::Domain(format!("controller step must be positive, got {dt}")));
    }
    let mut integral = memory.integral + error * dt;
    let mut i_term = gains.ki * integral;
    if i_term.abs() > gains.integral_limit {
        i_term = gains.integral_limit.copysign(i_term);
        integral = i_term / gains.ki;
    }
    let derivative = memory.prev_error.map_or(0.0, |p| (error - p) / dt);
    let command = (gains.kp * error + i_term + gains.kd * derivative).clamp(-gains.output_limit, gains.output_limit);
    Ok((command, PidMemory { integral, prev_error: Some(error) }))
}

/// First-order lag `tau y' + y = gain u`, advanced exactly for a command
/// held constant over the step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstOrderPlant {
    pub time_constant: f64,
    pub gain: f64,
    pub output: f64,
}

impl FirstOrderPlant {
    pub fn new(time_constant: f64, gain: f64) -> Self {
        Self { time_constant, gain, output: 0.0 }
    }

    pub fn step(&mut self, command: f64, dt: f64) -> f64 {
        let decay = (-dt / self.time_constant).exp();
        self.output = self.output * decay + self.gain * command * (1.0 - decay);
        self.output
    }
}

/// Closed-loop step response: setpoint `target` from rest, controller at
/// period `dt`, for `steps` periods. Returns the plant output after each step.
pub fn step_response(gains: &PidGains, plant: FirstOrderPlant, target: f64, dt: f64, steps: usize) -> Result<Vec<f64>> {
    let mut plant = plant;
    let mut mem = PidMemory::default();
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        let (u, m) = pid_step(gains, target - plant.output, dt, mem)?;
        mem = m;
        out.push(plant.step(u, dt));
    }
    Ok(out)
}
