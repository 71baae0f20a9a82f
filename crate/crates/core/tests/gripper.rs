use armforge::gripper::{
    boyle_pressure, center_distance, cylinder_volume, hemisphere_volume, pitch_diameter, vacuum_chain, ForceMode,
    GearSpec, VacuumSpec,
};
use armforge::presets::desk_vacuum;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn random_spec(rng: &mut ChaCha8Rng) -> VacuumSpec {
    VacuumSpec {
        cup_radius: rng.random_range(0.005..0.05),
        syringe_radius: rng.random_range(0.003..0.03),
        plunger_travel: rng.random_range(0.0..0.1),
        ambient_pressure: rng.random_range(8.0e4..1.1e5),
    }
}

#[test]
fn chain_matches_hand_steps_on_random_specs() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..100 {
        let s = random_spec(&mut rng);
        let r = vacuum_chain(&s, ForceMode::Absolute).unwrap();
        let v1 = 2.0 * PI * s.cup_radius.powi(3) / 3.0;
        let v2 = PI * s.syringe_radius.powi(2) * s.plunger_travel;
        let p2 = s.ambient_pressure * v1 / (v1 + v2);
        let f = p2 * PI * s.cup_radius.powi(2);
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * b.abs();
        assert!(close(r.v1, v1) && close(r.v2 + 1.0, v2 + 1.0) && close(r.p2, p2) && close(r.force, f));
        assert!(close(r.payload_capacity, f / 9.81));
        // isothermal: p v is conserved
        assert!((r.p2 * r.vf - r.p1 * r.v1).abs() <= 1e-9 * r.p1 * r.v1);
        let phys = vacuum_chain(&s, ForceMode::Physical).unwrap();
        assert!(close(phys.force + f, s.ambient_pressure * PI * s.cup_radius.powi(2)));
    }
}

#[test]
fn force_sensitivity_to_travel_matches_finite_difference() {
    let s = desk_vacuum();
    let h = 1e-7;
    let force = |travel: f64| vacuum_chain(&VacuumSpec { plunger_travel: travel, ..s }, ForceMode::Absolute).unwrap().force;
    let fd = (force(s.plunger_travel + h) - force(s.plunger_travel - h)) / (2.0 * h);
    let v1 = hemisphere_volume(s.cup_radius);
    let vf = v1 + cylinder_volume(s.syringe_radius, s.plunger_travel);
    let analytic = -s.ambient_pressure * v1 * PI * s.syringe_radius.powi(2) * PI * s.cup_radius.powi(2) / (vf * vf);
    assert!((fd - analytic).abs() <= 1e-6 * analytic.abs());
    assert!(analytic < 0.0);
}

#[test]
fn zero_travel_keeps_ambient_pressure() {
    let r = vacuum_chain(&VacuumSpec { plunger_travel: 0.0, ..desk_vacuum() }, ForceMode::Physical).unwrap();
    assert!(r.zero_differential);
    assert_eq!(r.p2, r.p1);
    assert_eq!(r.force, 0.0);
}

#[test]
fn boyle_rejects_empty_volume() {
    assert!(boyle_pressure(1e5, 1e-5, 0.0).is_err());
}

#[test]
fn gear_mesh_spacing() {
    let a = GearSpec { teeth: 20, circular_pitch: 0.01 };
    let b = GearSpec { teeth: 40, circular_pitch: 0.01 };
    let da = 20.0 * 0.01 / 22.0;
    let db = 40.0 * 0.01 / 42.0;
    assert!((pitch_diameter(&a).unwrap() - da).abs() < 1e-15);
    assert!((center_distance(&a, &b).unwrap() - 0.5 * (da + db)).abs() < 1e-15);
    assert!(pitch_diameter(&GearSpec { teeth: 2, circular_pitch: 0.01 }).is_err());
}
