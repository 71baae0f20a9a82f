//! Simulated range sensing: ultrasonic time of flight and a short-range
//! infrared detector sharing the same detection abstraction.
//!
//! Material reflectivities are synthetic defaults. Smooth rigid surfaces
//! return echoes more reliably than soft ones.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::Write;

use crate::error::{Error, Result};
use crate::units::inches;

/// Round-trip echo time to one-way distance: `c t / 2`.
pub fn echo_to_distance(echo_time: f64, sound_speed: f64) -> Result<f64> {
    if echo_time.is_nan() || echo_time < 0.0 {
        return Err(Error::Domain(format!("echo time must be non-negative, got {echo_time}")));
    }
    if !(sound_speed > 0.0) {
        return Err(Error::Domain(format!("sound speed must be positive, got {sound_speed}")));
    }
    Ok(sound_speed * echo_time / 2.0)
}

/// Half-angle of a cone that is `width` across at `range`.
pub fn calibrate_half_angle(width: f64, range: f64) -> f64 {
    (0.5 * width / range).atan()
}

fn default_materials() -> BTreeMap<String, f64> {
    [("wood", 0.95), ("metal", 0.98), ("plastic", 0.9), ("rubber", 0.6)]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UltrasonicSpec {
    pub sound_speed: f64,
    pub frequency: f64,
    pub max_range: f64,
    pub beam_apex_half_angle: f64,
    pub noise_sigma: f64,
    pub material_reflectivity: BTreeMap<String, f64>,
}

impl Default for UltrasonicSpec {
    /// HC-SR04 class module: 40 kHz, 4 m range, beam 38 in wide at 10 ft.
    fn default() -> Self {
        Self {
            sound_speed: 340.0,
            frequency: 40_000.0,
            max_range: 4.0,
            beam_apex_half_angle: calibrate_half_angle(inches(38.0), inches(120.0)),
            noise_sigma: 0.003,
            material_reflectivity: default_materials(),
        }
    }
}

impl UltrasonicSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.sound_speed > 0.0) {
            return Err(Error::Configuration(format!("sound speed must be positive, got {}", self.sound_speed)));
        }
        if !(self.noise_sigma >= 0.0) || !(self.max_range >= 0.0) {
            return Err(Error::Configuration("noise sigma and max range must be non-negative".into()));
        }
        validate_map(&self.material_reflectivity)
    }

    fn reflectivity(&self, material: &str) -> Result<f64> {
        lookup(&self.material_reflectivity, material)
    }
}

fn validate_map(map: &BTreeMap<String, f64>) -> Result<()> {
    if map.is_empty() {
        return Err(Error::Configuration("sensor has no material table".into()));
    }
    for (k, v) in map {
        if !(0.0..=1.0).contains(v) {
            return Err(Error::Configuration(format!("reflectivity of '{k}' must lie in [0, 1], got {v}")));
        }
    }
    Ok(())
}

fn lookup(map: &BTreeMap<String, f64>, material: &str) -> Result<f64> {
    map.get(material)
        .copied()
        .ok_or_else(|| Error::Configuration(format!("unknown material '{material}'")))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RangeReading {
    pub distance: f64,
    pub echo_time: f64,
    pub detected: bool,
}

impl RangeReading {
    fn miss() -> Self {
        Self { distance: 0.0, echo_time: 0.0, detected: false }
    }
}

/// Shared detection model: a uniform draw against the surface return
/// probability, then Gaussian range noise clamped at zero.
fn detect<R: Rng + ?Sized>(
    true_distance: f64,
    max_range: f64,
    return_probability: f64,
    noise_sigma: f64,
    rng: &mut R,
) -> Option<f64> {
    let draw: f64 = rng.random();
    let noise = if noise_sigma > 0.0 {
        Normal::new(0.0, noise_sigma).expect("sigma checked").sample(rng)
    } else {
        0.0
    };
    (true_distance <= max_range && draw <= return_probability).then(|| (true_distance + noise).max(0.0))
}

/// One simulated ultrasonic ping at a surface `true_distance` away.
pub fn simulate_reading<R: Rng + ?Sized>(
    spec: &UltrasonicSpec,
    true_distance: f64,
    material: &str,
    rng: &mut R,
) -> Result<RangeReading> {
    if true_distance.is_nan() || true_distance < 0.0 {
        return Err(Error::Domain(format!("distance must be non-negative, got {true_distance}")));
    }
    spec.validate()?;
    let reflectivity = spec.reflectivity(material)?;
    Ok(match detect(true_distance, spec.max_range, reflectivity, spec.noise_sigma, rng) {
        Some(distance) => RangeReading { distance, echo_time: 2.0 * distance / spec.sound_speed, detected: true },
        None => RangeReading::miss(),
    })
}

pub fn beam_width_at(spec: &UltrasonicSpec, range: f64) -> Result<f64> {
    if range.is_nan() || range < 0.0 {
        return Err(Error::Domain(format!("range must be non-negative, got {range}")));
    }
    Ok(2.0 * range * spec.beam_apex_half_angle.tan())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RangeRow {
    pub actual: f64,
    /// Absent when no echo returned.
    pub measured: Option<f64>,
    pub detected: bool,
}

/// Measured-versus-actual table over a list of distances, one ping each,
/// from a single generator seeded with `seed`.
pub fn run_ranging_experiment(
    spec: &UltrasonicSpec,
    distances: &[f64],
    material: &str,
    seed: u64,
) -> Result<Vec<RangeRow>> {
    spec.validate()?;
    if distances.is_empty() {
        return Err(Error::Domain("experiment needs at least one distance".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    distances
        .iter()
        .map(|&d| {
            let r = simulate_reading(spec, d, material, &mut rng)?;
            Ok(RangeRow { actual: d, measured: r.detected.then_some(r.distance), detected: r.detected })
        })
        .collect()
}

/// Inclusive arithmetic sweep `from, from + step, ..., to`.
pub fn sweep_distances(from: f64, to: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(to >= from) || from < 0.0 {
        return Err(Error::Domain(format!("sweep needs 0 <= from <= to and step > 0, got {from}..{to} by {step}")));
    }
    let n = ((to - from) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| from + i as f64 * step).collect())
}

pub fn write_rows_csv<W: Write>(rows: &[RangeRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| Error::Configuration(format!("csv write failed: {e}"));
    w.write_record(["actual", "measured", "detected"]).map_err(err)?;
    for r in rows {
        let measured = r.measured.map(|m| m.to_string()).unwrap_or_default();
        w.write_record([r.actual.to_string(), measured, r.detected.to_string()]).map_err(err)?;
    }
    w.flush().map_err(|e| Error::Configuration(format!("csv write failed: {e}")))
}

const TRIALS_PER_CHUNK: usize = 1024;

/// Monte Carlo detection probability at one distance. Each chunk of trials
/// draws from its own stream of the seeded generator, so the estimate does
/// not depend on how chunks are scheduled.
pub fn detection_rate(spec: &UltrasonicSpec, distance: f64, material: &str, trials: usize, seed: u64) -> Result<f64> {
    spec.validate()?;
    spec.reflectivity(material)?;
    if trials == 0 {
        return Err(Error::Domain("need at least one trial".into()));
    }
    let chunks: Vec<usize> = (0..trials.div_ceil(TRIALS_PER_CHUNK)).collect();
    let counts = crate::batch::map(&chunks, |&c| -> Result<usize> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(c as u64);
        let n = TRIALS_PER_CHUNK.min(trials - c * TRIALS_PER_CHUNK);
        let mut hits = 0;
        for _ in 0..n {
            if simulate_reading(spec, distance, material, &mut rng)?.detected {
                hits += 1;
            }
        }
        Ok(hits)
    });
    let mut total = 0;
    for c in counts {
        total += c?;
    }
    Ok(total as f64 / trials as f64)
}

/// Short-range infrared detector (Sharp GP2Y0A21 class).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfraredSpec {
    pub min_range: f64,
    pub max_range: f64,
    pub noise_sigma: f64,
    /// Probability that a surface returns enough light to register.
    pub material_emissivity: BTreeMap<String, f64>,
}

impl Default for InfraredSpec {
    fn default() -> Self {
        let material_emissivity = [("wood", 0.9), ("metal", 0.7), ("plastic", 0.92), ("rubber", 0.5)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        Self { min_range: 0.10, max_range: 0.80, noise_sigma: 0.01, material_emissivity }
    }
}

pub fn simulate_infrared<R: Rng + ?Sized>(
    spec: &InfraredSpec,
    true_distance: f64,
    material: &str,
    rng: &mut R,
) -> Result<Option<f64>> {
    if true_distance.is_nan() || true_distance < 0.0 {
        return Err(Error::Domain(format!("distance must be non-negative, got {true_distance}")));
    }
    validate_map(&spec.material_emissivity)?;
    let p = lookup(&spec.material_emissivity, material)?;
    let hit = detect(true_distance, spec.max_range, p, spec.noise_sigma, rng);
    Ok(hit.filter(|_| true_distance >= spec.min_range))
}
