use super::vec3::Vec3;
use super::GeometryError;

/// A unit quaternion representing a 3D rotation, stored in `(x, y, z, w)`
/// component order to match the trace file column layout.
///
/// All constructors normalize, so a `UnitQuat` value always has norm 1
/// (within 1e-12). Multiplication composes right-to-left: `(a * b)` rotates
/// by `b` first, then by `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitQuat {
    x: f64,
    y: f64,
    z: f64,
    w: f64,
}

impl UnitQuat {
    /// No rotation.
    pub const IDENTITY: UnitQuat = UnitQuat {
        x: 0.0,
        y: 0.0,
        z: 0.0,
        w: 1.0,
    };

    /// 180 degrees about the X axis; the rotation that reconciles +Y-up and
    /// +Y-down world conventions.
    pub const X180: UnitQuat = UnitQuat {
        x: 1.0,
        y: 0.0,
        z: 0.0,
        w: 0.0,
    };

    /// Builds a unit quaternion from raw components, normalizing them.
    /// Construction is idempotent: components that are already unit within a
    /// few ulps are stored bit-exact rather than churned through another
    /// division.
    ///
    /// Fails with [`GeometryError::DegenerateQuaternion`] when the input norm
    /// is below 1e-12.
    pub fn new(x: f64, y: f64, z: f64, w: f64) -> Result<Self, GeometryError> {
        let norm_sq = x * x + y * y + z * z + w * w;
        if !norm_sq.is_finite() || norm_sq < 1e-24 {
            return Err(GeometryError::DegenerateQuaternion {
                norm: norm_sq.sqrt(),
            });
        }
        if (norm_sq - 1.0).abs() <= 8.0 * f64::EPSILON {
            return Ok(Self { x, y, z, w });
        }
        let norm = norm_sq.sqrt();
        Ok(Self {
            x: x / norm,
            y: y / norm,
            z: z / norm,
            w: w / norm,
        })
    }

    /// Conjugation by the 180-degree X rotation, which reduces to negating
    /// the y and z components. Negation is exact, so applying this twice
    /// reproduces the input bit-for-bit.
    pub(crate) fn conjugated_by_x180(&self) -> UnitQuat {
        UnitQuat {
            x: self.x,
            y: -self.y,
            z: -self.z,
            w: self.w,
        }
    }

    /// Rotation of `angle` radians about `axis` (right-hand rule).
    pub fn from_axis_angle(axis: Vec3, angle: f64) -> Result<Self, GeometryError> {
        let u = axis
            .normalized()
            .ok_or(GeometryError::DegenerateQuaternion { norm: 0.0 })?;
        let (s, c) = (angle / 2.0).sin_cos();
        Ok(Self {
            x: u.x * s,
            y: u.y * s,
            z: u.z * s,
            w: c,
        })
    }

    pub fn x(&self) -> f64 {
        self.x
    }
    pub fn y(&self) -> f64 {
        self.y
    }
    pub fn z(&self) -> f64 {
        self.z
    }
    pub fn w(&self) -> f64 {
        self.w
    }

    pub fn as_xyzw(&self) -> [f64; 4] {
        [self.x, self.y, self.z, self.w]
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z + self.w * self.w).sqrt()
    }

    /// The inverse rotation. For a unit quaternion this is the conjugate.
    pub fn inverse(&self) -> UnitQuat {
        UnitQuat {
            x: -self.x,
            y: -self.y,
            z: -self.z,
            w: self.w,
        }
    }

    /// Sign-canonical form: w >= 0, and if w is zero the first nonzero of
    /// (x, y, z) is non-negative. `q` and `-q` encode the same rotation;
    /// canonicalization picks one representative for comparisons. It is never
    /// applied when writing files, so byte-level round trips are preserved.
    pub fn canonicalized(&self) -> UnitQuat {
        let flip = if self.w != 0.0 {
            self.w < 0.0
        } else if self.x != 0.0 {
            self.x < 0.0
        } else if self.y != 0.0 {
            self.y < 0.0
        } else {
            self.z < 0.0
        };
        if flip {
            UnitQuat {
                x: -self.x,
                y: -self.y,
                z: -self.z,
                w: -self.w,
            }
        } else {
            *self
        }
    }

    /// Rotates a vector: v' = q v q^-1. Preserves the vector norm.
    pub fn rotate(&self, v: Vec3) -> Vec3 {
        // v' = v + 2 qv x (qv x v + w v)
        let qv = Vec3::new(self.x, self.y, self.z);
        let inner = qv.cross(v) + v * self.w;
        v + qv.cross(inner) * 2.0
    }

    /// Component-wise maximum absolute difference to another quaternion,
    /// after canonicalizing both signs.
    pub fn max_component_deviation(&self, other: &UnitQuat) -> f64 {
        let a = self.canonicalized();
        let b = other.canonicalized();
        (a.x - b.x)
            .abs()
            .max((a.y - b.y).abs())
            .max((a.z - b.z).abs())
            .max((a.w - b.w).abs())
    }

    /// True when the two quaternions encode the same rotation within `tol`
    /// per component (sign-insensitive).
    pub fn approx_eq(&self, other: &UnitQuat, tol: f64) -> bool {
        self.max_component_deviation(other) <= tol
    }

    /// Angle in radians of the relative rotation between two orientations.
    pub fn angle_to(&self, other: &UnitQuat) -> f64 {
        let dot = (self.x * other.x + self.y * other.y + self.z * other.z + self.w * other.w).abs();
        2.0 * dot.clamp(0.0, 1.0).acos()
    }
}

impl std::ops::Mul for UnitQuat {
    type Output = UnitQuat;

    /// Hamilton product `a ⊗ b`: the composed rotation applies `b` first,
    /// then `a`. The result is re-normalized to absorb rounding drift.
    fn mul(self, b: UnitQuat) -> UnitQuat {
        let a = self;
        let x = a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y;
        let y = a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x;
        let z = a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w;
        let w = a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z;
        let norm = (x * x + y * y + z * z + w * w).sqrt();
        UnitQuat {
            x: x / norm,
            y: y / norm,
            z: z / norm,
            w: w / norm,
        }
    }
}
