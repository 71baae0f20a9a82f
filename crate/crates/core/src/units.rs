//! Physical constants and unit conversions. All public quantities in this
//! crate are SI: meters, kilograms, seconds, newton-meters, radians.

/// Standard gravity, m/s².
pub const STANDARD_GRAVITY: f64 = 9.80665;

/// Gravity divisor used by the vacuum-gripper weight rule (W = F / 9.81).
pub const GRIPPER_WEIGHT_DIVISOR: f64 = 9.81;

/// One kilogram-force centimeter in newton-meters.
pub const KGF_CM_TO_NM: f64 = 0.0980665;

pub const METERS_PER_INCH: f64 = 0.0254;

pub fn kgf_cm_to_nm(kgf_cm: f64) -> f64 {
    kgf_cm * KGF_CM_TO_NM
}

pub fn nm_to_kgf_cm(nm: f64) -> f64 {
    nm / KGF_CM_TO_NM
}

pub fn inches(value: f64) -> f64 {
    value * METERS_PER_INCH
}

pub fn to_inches(meters: f64) -> f64 {
    meters / METERS_PER_INCH
}
