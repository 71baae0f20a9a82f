use armforge::sensors::{
    beam_width_at, calibrate_half_angle, detection_rate, echo_to_distance, run_ranging_experiment, simulate_reading,
    sweep_distances, write_rows_csv, UltrasonicSpec,
};
use armforge::units::inches;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

fn ideal(sigma: f64) -> UltrasonicSpec {
    let mut m = BTreeMap::new();
    m.insert("ideal".to_string(), 1.0);
    UltrasonicSpec { noise_sigma: sigma, material_reflectivity: m, ..UltrasonicSpec::default() }
}

#[test]
fn echo_time_conversion() {
    assert!((echo_to_distance(2.941e-3, 340.0).unwrap() - 0.5).abs() < 1e-4);
    assert!((echo_to_distance(1e-3, 340.0).unwrap() - 0.17).abs() < 1e-12);
    assert_eq!(echo_to_distance(0.0, 340.0).unwrap(), 0.0);
    assert!(echo_to_distance(-1e-3, 340.0).is_err());
    assert!(echo_to_distance(1e-3, 0.0).is_err());
}

#[test]
fn beam_calibration_reproduces_38_inches_at_10_feet() {
    let spec = UltrasonicSpec::default();
    let w = beam_width_at(&spec, inches(120.0)).unwrap();
    assert!((w - inches(38.0)).abs() / inches(38.0) < 1e-3);
    assert!((calibrate_half_angle(inches(38.0), inches(120.0)) - spec.beam_apex_half_angle).abs() < 1e-15);
}

#[test]
fn noiseless_readings_are_exact() {
    let spec = ideal(0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for d in sweep_distances(0.1, 2.0, 0.1).unwrap() {
        let r = simulate_reading(&spec, d, "ideal", &mut rng).unwrap();
        assert!(r.detected);
        assert_eq!(r.distance, d);
        assert_eq!(r.echo_time, 2.0 * d / spec.sound_speed);
    }
}

#[test]
fn seeded_noise_statistics() {
    let spec = ideal(0.005);
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let d = 1.0;
    let xs: Vec<f64> = (0..1000).map(|_| simulate_reading(&spec, d, "ideal", &mut rng).unwrap().distance).collect();
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt();
    assert!((mean - d).abs() <= 0.001, "mean {mean}");
    assert!((sd - 0.005).abs() <= 0.001, "sd {sd}");
}

#[test]
fn beyond_range_and_absorbent_surfaces() {
    let spec = UltrasonicSpec::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    assert!(!simulate_reading(&spec, 4.5, "wood", &mut rng).unwrap().detected);
    let rubber = detection_rate(&spec, 1.0, "rubber", 20_000, 3).unwrap();
    assert!((rubber - 0.6).abs() < 0.02, "{rubber}");
    assert_eq!(detection_rate(&spec, 5.0, "metal", 1000, 3).unwrap(), 0.0);
    assert!(simulate_reading(&spec, 1.0, "glass", &mut rng).is_err());
}

#[test]
fn ranging_experiment_csv() {
    let spec = UltrasonicSpec::default();
    let distances = sweep_distances(3.9, 4.1, 0.1).unwrap();
    let rows = run_ranging_experiment(&spec, &distances, "metal", 5).unwrap();
    assert_eq!(rows.len(), 3);
    let mut out = Vec::new();
    write_rows_csv(&rows, &mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert!(text.starts_with("actual,measured,detected"));
    assert_eq!(text.lines().count(), 4);
    let again = run_ranging_experiment(&spec, &distances, "metal", 5).unwrap();
    assert_eq!(rows, again);
}
