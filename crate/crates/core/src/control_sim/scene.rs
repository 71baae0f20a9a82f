use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::kinematics::{Pose, Workspace};

/// Most distinct color signatures the camera can track at once.
pub const MAX_COLOR_LABELS: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectShape {
    Block,
    Sphere,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectOrientation {
    Standing,
    Flat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneObject {
    pub id: String,
    pub shape: ObjectShape,
    /// Bounding box, meters. Spheres use the diameter on every axis.
    pub dimensions: [f64; 3],
    pub mass: f64,
    pub color: String,
    /// Grasp point.
    pub position: [f64; 3],
    #[serde(default = "default_orientation")]
    pub orientation: ObjectOrientation,
}

fn default_orientation() -> ObjectOrientation {
    ObjectOrientation::Standing
}

impl SceneObject {
    pub fn position(&self) -> Vector3<f64> {
        Vector3::from(self.position)
    }

    /// A standard Jenga block standing on its end, grasped at its center.
    pub fn jenga(id: &str, color: &str, position: [f64; 3]) -> Self {
        Self {
            id: id.into(),
            shape: ObjectShape::Block,
            dimensions: [0.025, 0.015, 0.075],
            mass: crate::presets::JENGA_BLOCK_MASS,
            color: color.into(),
            position,
            orientation: ObjectOrientation::Standing,
        }
    }
}

/// Objects plus the color-to-bin sorting map, as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub objects: Vec<SceneObject>,
    pub bins: BTreeMap<String, Pose>,
    #[serde(default)]
    pub workspace: Workspace,
}

impl Scene {
    pub fn validate(&self) -> Result<()> {
        validate_scene(&self.objects, &self.bins, &self.workspace)
    }
}

pub(crate) fn validate_scene(objects: &[SceneObject], bins: &BTreeMap<String, Pose>, ws: &Workspace) -> Result<()> {
    ws.validate()?;
    let colors: BTreeSet<&str> = objects.iter().map(|o| o.color.as_str()).collect();
    if colors.len() > MAX_COLOR_LABELS {
        return Err(Error::Validation(format!(
            "scene uses {} color labels, the camera tracks at most {MAX_COLOR_LABELS}",
            colors.len()
        )));
    }
    for o in objects {
        if !(o.mass > 0.0) {
            return Err(Error::Validation(format!("object '{}' needs positive mass", o.id)));
        }
    }
    for (color, bin) in bins {
        if !ws.annulus_contains(&bin.position) {
            return Err(Error::Validation(format!("bin for '{color}' lies outside the target annulus")));
        }
    }
    Ok(())
}

/// Synthetic camera fix: the true position with Gaussian noise on x and y.
/// Height is taken as known.
pub fn localize<R: Rng + ?Sized>(
    object: &SceneObject,
    noise_sigma: f64,
    workspace: &Workspace,
    rng: &mut R,
) -> Result<Vector3<f64>> {
    let p = object.position();
    if !workspace.contains(&p) {
        return Err(Error::NotVisible(object.id.clone()));
    }
    if !(noise_sigma >= 0.0) {
        return Err(Error::Domain(format!("noise sigma must be non-negative, got {noise_sigma}")));
    }
    if noise_sigma == 0.0 {
        return Ok(p);
    }
    let n = Normal::new(0.0, noise_sigma).expect("sigma checked");
    let dx = n.sample(rng);
    let dy = n.sample(rng);
    Ok(Vector3::new(p.x + dx, p.y + dy, p.z))
}

/// [`localize`] with a fresh generator seeded from `seed`.
pub fn localize_seeded(object: &SceneObject, noise_sigma: f64, workspace: &Workspace, seed: u64) -> Result<Vector3<f64>> {
    localize(object, noise_sigma, workspace, &mut ChaCha8Rng::seed_from_u64(seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_fix_is_exact() {
        let ws = Workspace::default();
        let o = SceneObject::jenga("a", "red", [0.05, 0.2, -0.02]);
        assert_eq!(localize_seeded(&o, 0.0, &ws, 9).unwrap(), o.position());
    }

    #[test]
    fn behind_base_is_not_visible() {
        let ws = Workspace::default();
        let o = SceneObject::jenga("b", "red", [0.0, -0.2, 0.0]);
        assert!(matches!(localize_seeded(&o, 0.001, &ws, 1), Err(Error::NotVisible(id)) if id == "b"));
    }

    #[test]
    fn height_is_never_perturbed() {
        let ws = Workspace::default();
        let o = SceneObject::jenga("a", "red", [0.05, 0.2, -0.02]);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            assert_eq!(localize(&o, 0.01, &ws, &mut rng).unwrap().z, -0.02);
        }
    }

    #[test]
    fn too_many_colors_rejected() {
        let ws = Workspace::default();
        let objects: Vec<_> = (0..8)
            .map(|i| SceneObject::jenga(&format!("o{i}"), &format!("c{i}"), [0.0, 0.2, 0.0]))
            .collect();
        assert!(validate_scene(&objects, &BTreeMap::new(), &ws).is_err());
        assert!(validate_scene(&objects[..7], &BTreeMap::new(), &ws).is_ok());
    }

    #[test]
    fn bins_must_be_in_annulus() {
        let ws = Workspace::default();
        let mut bins = BTreeMap::new();
        bins.insert("red".to_string(), Pose::at(0.0, 0.2, 0.0));
        assert!(validate_scene(&[], &bins, &ws).is_err());
        bins.insert("red".to_string(), Pose::at(0.0, 0.33, 0.0));
        assert!(validate_scene(&[], &bins, &ws).is_ok());
    }
}
