#![allow(dead_code)]

use armforge::units::STANDARD_GRAVITY;

/// Holding torque at every joint of a pitch-only chain, summed over an
/// explicit list of (horizontal position, mass, link it rides on) entries.
pub fn planar_oracle(lengths: &[f64], link_masses: &[f64], motor_mass: f64, tip_mass: f64, q: &[f64]) -> Vec<f64> {
    let n = lengths.len();
    let mut joint_x = Vec::with_capacity(n);
    let mut points: Vec<(f64, f64, usize)> = Vec::new();
    let (mut x, mut heading) = (0.0_f64, 0.0_f64);
    for i in 0..n {
        joint_x.push(x);
        points.push((x, motor_mass, i));
        heading += q[i];
        points.push((x + 0.5 * lengths[i] * heading.cos(), link_masses[i], i));
        x += lengths[i] * heading.cos();
    }
    points.push((x, tip_mass, n));
    (0..n)
        .map(|j| {
            points
                .iter()
                .filter(|(_, _, link)| *link >= j)
                .map(|(px, m, _)| m * STANDARD_GRAVITY * (px - joint_x[j]))
                .sum()
        })
        .collect()
}

pub fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-3)
}

