//! Per-scene initialization parameters: the tilt-correcting quaternion, the
//! meters-to-scene-units scale factor, and the example starting position
//! applied when a scene is loaded for viewing.

use std::collections::BTreeMap;

use crate::geometry::{GeometryError, UnitQuat, Vec3};

/// Tolerance for how far a published tilt quaternion's squared norm may sit
/// from 1 before normalization. The shipped table is printed rounded to four
/// decimals; the worst row deviates by about 2.9e-4.
pub const RAW_QUAT_NORM_TOLERANCE: f64 = 1e-3;

/// The runtime correction applied to a scene at load time: a tilt-fixing
/// rotation, a metric scale, and a starting position in scene units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SceneInit {
    /// Tilt correction, normalized at construction.
    pub q_init: UnitQuat,
    /// Scene units per meter of physical movement.
    pub scale: f64,
    /// Example starting position, scene units.
    pub init_pos: Vec3,
}

impl SceneInit {
    /// Builds a scene correction from raw (possibly rounded) quaternion
    /// components; the quaternion is normalized. Rejects non-positive scales
    /// and quaternions whose raw squared norm deviates from 1 by more than
    /// [`RAW_QUAT_NORM_TOLERANCE`].
    pub fn new(raw_quat: [f64; 4], scale: f64, init_pos: Vec3) -> Result<Self, SceneError> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(SceneError::InvalidScale { scale });
        }
        let [x, y, z, w] = raw_quat;
        let norm_sq = x * x + y * y + z * z + w * w;
        if (norm_sq - 1.0).abs() > RAW_QUAT_NORM_TOLERANCE {
            return Err(SceneError::QuaternionNotNearUnit { norm_sq });
        }
        Ok(Self {
            q_init: UnitQuat::new(x, y, z, w)?,
            scale,
            init_pos,
        })
    }

    /// The no-op correction: identity tilt, unit scale, origin start.
    pub fn identity() -> Self {
        Self {
            q_init: UnitQuat::IDENTITY,
            scale: 1.0,
            init_pos: Vec3::ZERO,
        }
    }
}

/// The scene-id -> [`SceneInit`] table for the twelve published scenes.
#[derive(Debug, Clone)]
pub struct SceneRegistry {
    entries: BTreeMap<String, SceneInit>,
}

impl SceneRegistry {
    pub fn get(&self, scene_id: &str) -> Result<&SceneInit, SceneError> {
        self.entries
            .get(scene_id)
            .ok_or_else(|| SceneError::UnknownScene {
                scene_id: scene_id.to_string(),
            })
    }

    pub fn contains(&self, scene_id: &str) -> bool {
        self.entries.contains_key(scene_id)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Scenes in deterministic (lexicographic) order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &SceneInit)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }
}

/// Raw initialization rows: (scene, quaternion xyzw, scale, start position).
const SCENE_TABLE: [(&str, [f64; 4], f64, [f64; 3]); 12] = [
    ("truck", [-0.0896, 0.0, 0.0, 0.9960], 0.76, [0.0, 2.1, -4.0]),
    (
        "treehill",
        [-0.1961, 0.0, 0.0, 0.9806],
        12.0,
        [2.0, 1.4, 2.0],
    ),
    ("train", [0.0499, 0.0, 0.01, 0.9987], 0.36, [2.0, -1.0, 6.0]),
    (
        "stump",
        [-0.3950, 0.0, 0.0, 0.9187],
        1.0,
        [-1.0, 2.65, -2.5],
    ),
    ("room", [-0.2334, 0.0, 0.0, 0.9724], 2.0, [0.0, 1.15, 0.0]),
    (
        "playroom",
        [-0.1961, 0.0, 0.0, 0.9806],
        2.7,
        [0.0, 0.88, 0.0],
    ),
    (
        "drjohnson",
        [-0.3699, 0.0, 0.5976, 0.7114],
        1.0,
        [0.0, 1.5, 0.0],
    ),
    (
        "bicycle",
        [-0.1142, 0.0, 0.0, 0.9935],
        1.25,
        [1.5, 1.1, 0.0],
    ),
    ("nyc", [-0.1483, 0.0, 0.0, 0.9888], 0.64, [-1.6, 4.4, 4.0]),
    ("london", [0.0, 0.0, 0.0, 1.0], 0.53, [18.0, 12.0, -11.0]),
    (
        "berlin",
        [0.0299, 0.0, -0.0599, 0.9978],
        0.8,
        [-1.0, 1.8, -1.3],
    ),
    (
        "alameda",
        [-0.1867, 0.0, 0.0, 0.9824],
        0.64,
        [3.0, 2.6, -1.0],
    ),
];

/// Builds the registry of the twelve published scenes with their calibrated
/// initialization parameters. Quaternions are normalized on construction.
pub fn scene_registry() -> SceneRegistry {
    let entries = SCENE_TABLE
        .iter()
        .map(|(id, q, scale, pos)| {
            let init = SceneInit::new(*q, *scale, Vec3::from(*pos))
                .expect("published scene table entries are valid");
            (id.to_string(), init)
        })
        .collect();
    SceneRegistry { entries }
}

#[derive(Debug, thiserror::Error)]
pub enum SceneError {
    #[error("unknown scene \"{scene_id}\": not one of the twelve registered scenes")]
    UnknownScene { scene_id: String },

    #[error("scene scale must be positive and finite, got {scale}")]
    InvalidScale { scale: f64 },

    #[error("initial quaternion is not near-unit: squared norm {norm_sq}")]
    QuaternionNotNearUnit { norm_sq: f64 },

    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn registry_has_exactly_twelve_scenes() {
        let reg = scene_registry();
        assert_eq!(reg.len(), 12);
        for id in [
            "truck",
            "treehill",
            "train",
            "stump",
            "room",
            "playroom",
            "drjohnson",
            "bicycle",
            "nyc",
            "london",
            "berlin",
            "alameda",
        ] {
            assert!(reg.contains(id), "missing {id}");
        }
    }

    #[test]
    fn truck_entry_matches_published_values() {
        let reg = scene_registry();
        let truck = reg.get("truck").unwrap();
        // raw (-0.0896, 0, 0, 0.9960), normalized by sqrt(1.00004416)
        let norm = 1.00004416_f64.sqrt();
        assert_relative_eq!(truck.q_init.x(), -0.0896 / norm, epsilon = 1e-15);
        assert_relative_eq!(truck.q_init.w(), 0.9960 / norm, epsilon = 1e-15);
        assert_eq!(truck.scale, 0.76);
        assert_eq!(truck.init_pos, Vec3::new(0.0, 2.1, -4.0));
    }

    #[test]
    fn london_entry_is_identity_rotation() {
        let reg = scene_registry();
        let london = reg.get("london").unwrap();
        assert_eq!(london.q_init, UnitQuat::IDENTITY);
        assert_eq!(london.scale, 0.53);
        assert_eq!(london.init_pos, Vec3::new(18.0, 12.0, -11.0));
    }

    #[test]
    fn unknown_scene_is_an_error() {
        // "garden" was a training scene and has no published parameters
        let reg = scene_registry();
        assert!(matches!(
            reg.get("garden"),
            Err(SceneError::UnknownScene { .. })
        ));
    }

    #[test]
    fn raw_norms_are_near_unit_and_normalized_exactly() {
        for (id, q, _, _) in SCENE_TABLE {
            let norm_sq: f64 = q.iter().map(|c| c * c).sum();
            assert!(
                (norm_sq - 1.0).abs() <= RAW_QUAT_NORM_TOLERANCE,
                "{id}: raw squared norm {norm_sq} too far from 1"
            );
        }
        let reg = scene_registry();
        for (id, init) in reg.iter() {
            assert!(
                (init.q_init.norm() - 1.0).abs() <= 1e-12,
                "{id}: normalized quaternion should be exactly unit"
            );
        }
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        assert!(matches!(
            SceneInit::new([0.0, 0.0, 0.0, 1.0], 0.0, Vec3::ZERO),
            Err(SceneError::InvalidScale { .. })
        ));
        assert!(matches!(
            SceneInit::new([0.5, 0.5, 0.5, 0.6], 1.0, Vec3::ZERO),
            Err(SceneError::QuaternionNotNearUnit { .. })
        ));
    }
}
