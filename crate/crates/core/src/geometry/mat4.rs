use super::quat::UnitQuat;
use super::vec3::Vec3;
use super::GeometryError;

/// A 4x4 homogeneous transform, row-major. Transforms produced by this crate
/// keep the last row at (0, 0, 0, 1) except for projection matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat4 {
    pub m: [[f64; 4]; 4],
}

impl Mat4 {
    pub const IDENTITY: Mat4 = Mat4 {
        m: [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ],
    };

    pub const ZERO: Mat4 = Mat4 { m: [[0.0; 4]; 4] };

    pub fn translation(t: Vec3) -> Mat4 {
        let mut m = Mat4::IDENTITY;
        m.m[0][3] = t.x;
        m.m[1][3] = t.y;
        m.m[2][3] = t.z;
        m
    }

    pub fn uniform_scale(s: f64) -> Mat4 {
        let mut m = Mat4::IDENTITY;
        m.m[0][0] = s;
        m.m[1][1] = s;
        m.m[2][2] = s;
        m
    }

    /// Rotation matrix of a unit quaternion (upper-left 3x3 block).
    pub fn from_quat(q: &UnitQuat) -> Mat4 {
        let (x, y, z, w) = (q.x(), q.y(), q.z(), q.w());
        Mat4 {
            m: [
                [
                    1.0 - 2.0 * (y * y + z * z),
                    2.0 * (x * y - z * w),
                    2.0 * (x * z + y * w),
                    0.0,
                ],
                [
                    2.0 * (x * y + z * w),
                    1.0 - 2.0 * (x * x + z * z),
                    2.0 * (y * z - x * w),
                    0.0,
                ],
                [
                    2.0 * (x * z - y * w),
                    2.0 * (y * z + x * w),
                    1.0 - 2.0 * (x * x + y * y),
                    0.0,
                ],
                [0.0, 0.0, 0.0, 1.0],
            ],
        }
    }

    /// Rigid camera-to-world transform: translation * rotation.
    pub fn from_rotation_translation(q: &UnitQuat, t: Vec3) -> Mat4 {
        let mut m = Mat4::from_quat(q);
        m.m[0][3] = t.x;
        m.m[1][3] = t.y;
        m.m[2][3] = t.z;
        m
    }

    /// Extracts the rotation of an orthonormal 3x3 block as a unit quaternion,
    /// sign-canonicalized. Errors when the block is not orthonormal within
    /// `tol` or the last row is not (0, 0, 0, 1).
    pub fn rotation_quat(&self, tol: f64) -> Result<UnitQuat, GeometryError> {
        self.check_rigid(tol)?;
        let m = &self.m;
        // Shepperd's method: branch on the largest diagonal combination.
        let trace = m[0][0] + m[1][1] + m[2][2];
        let (x, y, z, w);
        if trace > 0.0 {
            let s = (trace + 1.0).sqrt() * 2.0;
            w = 0.25 * s;
            x = (m[2][1] - m[1][2]) / s;
            y = (m[0][2] - m[2][0]) / s;
            z = (m[1][0] - m[0][1]) / s;
        } else if m[0][0] > m[1][1] && m[0][0] > m[2][2] {
            let s = (1.0 + m[0][0] - m[1][1] - m[2][2]).sqrt() * 2.0;
            w = (m[2][1] - m[1][2]) / s;
            x = 0.25 * s;
            y = (m[0][1] + m[1][0]) / s;
            z = (m[0][2] + m[2][0]) / s;
        } else if m[1][1] > m[2][2] {
            let s = (1.0 + m[1][1] - m[0][0] - m[2][2]).sqrt() * 2.0;
            w = (m[0][2] - m[2][0]) / s;
            x = (m[0][1] + m[1][0]) / s;
            y = 0.25 * s;
            z = (m[1][2] + m[2][1]) / s;
        } else {
            let s = (1.0 + m[2][2] - m[0][0] - m[1][1]).sqrt() * 2.0;
            w = (m[1][0] - m[0][1]) / s;
            x = (m[0][2] + m[2][0]) / s;
            y = (m[1][2] + m[2][1]) / s;
            z = 0.25 * s;
        }
        Ok(UnitQuat::new(x, y, z, w)?.canonicalized())
    }

    /// Translation column (x, y, z of the fourth column).
    pub fn translation_part(&self) -> Vec3 {
        Vec3::new(self.m[0][3], self.m[1][3], self.m[2][3])
    }

    fn check_rigid(&self, tol: f64) -> Result<(), GeometryError> {
        let last = self.m[3];
        if (last[0]).abs() > tol
            || (last[1]).abs() > tol
            || (last[2]).abs() > tol
            || (last[3] - 1.0).abs() > tol
        {
            return Err(GeometryError::NotRigidTransform);
        }
        // R^T R must be the identity within tol.
        let mut deviation: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let mut dot = 0.0;
                for k in 0..3 {
                    dot += self.m[k][i] * self.m[k][j];
                }
                let expect = if i == j { 1.0 } else { 0.0 };
                deviation = deviation.max((dot - expect).abs());
            }
        }
        if deviation > tol {
            return Err(GeometryError::NonOrthonormalRotation { deviation });
        }
        Ok(())
    }

    pub fn mul(&self, other: &Mat4) -> Mat4 {
        let mut out = Mat4::ZERO;
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = 0.0;
                for k in 0..4 {
                    acc += self.m[i][k] * other.m[k][j];
                }
                out.m[i][j] = acc;
            }
        }
        out
    }

    /// Applies the transform to a point (w = 1), without perspective divide.
    pub fn transform_point(&self, p: Vec3) -> Vec3 {
        Vec3::new(
            self.m[0][0] * p.x + self.m[0][1] * p.y + self.m[0][2] * p.z + self.m[0][3],
            self.m[1][0] * p.x + self.m[1][1] * p.y + self.m[1][2] * p.z + self.m[1][3],
            self.m[2][0] * p.x + self.m[2][1] * p.y + self.m[2][2] * p.z + self.m[2][3],
        )
    }

    /// Applies the transform to a direction (w = 0).
    pub fn transform_vector(&self, v: Vec3) -> Vec3 {
        Vec3::new(
            self.m[0][0] * v.x + self.m[0][1] * v.y + self.m[0][2] * v.z,
            self.m[1][0] * v.x + self.m[1][1] * v.y + self.m[1][2] * v.z,
            self.m[2][0] * v.x + self.m[2][1] * v.y + self.m[2][2] * v.z,
        )
    }

    /// Full homogeneous application, returning (x, y, z, w).
    pub fn transform_homogeneous(&self, p: Vec3, w: f64) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (i, row) in self.m.iter().enumerate() {
            out[i] = row[0] * p.x + row[1] * p.y + row[2] * p.z + row[3] * w;
        }
        out
    }

    /// Row-major flattening, sixteen values.
    pub fn to_row_major(&self) -> [f64; 16] {
        let mut out = [0.0; 16];
        for i in 0..4 {
            for j in 0..4 {
                out[i * 4 + j] = self.m[i][j];
            }
        }
        out
    }

    pub fn from_row_major(v: &[f64; 16]) -> Mat4 {
        let mut m = Mat4::ZERO;
        for i in 0..4 {
            for j in 0..4 {
                m.m[i][j] = v[i * 4 + j];
            }
        }
        m
    }

    pub fn max_abs_diff(&self, other: &Mat4) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                d = d.max((self.m[i][j] - other.m[i][j]).abs());
            }
        }
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn identity_quat_gives_identity_matrix() {
        assert_eq!(Mat4::from_quat(&UnitQuat::IDENTITY), Mat4::IDENTITY);
    }

    #[test]
    fn x180_matrix_is_diag_1_neg1_neg1() {
        let m = Mat4::from_quat(&UnitQuat::X180);
        let expect = [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]];
        for (row, expect_row) in m.m.iter().take(3).zip(&expect) {
            for (got, want) in row.iter().take(3).zip(expect_row) {
                assert_relative_eq!(got, want, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn quat_matrix_round_trip_up_to_sign() {
        // head orientation from a recorded sample row
        let q = UnitQuat::new(0.494687, 0.294258, 0.123821, 0.808310).unwrap();
        let back = Mat4::from_quat(&q).rotation_quat(1e-9).unwrap();
        assert!(q.approx_eq(&back, 1e-9));

        // exercise the non-positive-trace branches too
        for raw in [
            [0.99, 0.01, 0.02, 0.05],
            [0.01, 0.99, 0.02, 0.05],
            [0.01, 0.02, 0.99, 0.05],
        ] {
            let q = UnitQuat::new(raw[0], raw[1], raw[2], raw[3]).unwrap();
            let back = Mat4::from_quat(&q).rotation_quat(1e-9).unwrap();
            assert!(q.approx_eq(&back, 1e-9), "round trip failed for {raw:?}");
        }
    }

    #[test]
    fn non_orthonormal_matrix_is_rejected() {
        let mut m = Mat4::IDENTITY;
        m.m[0][0] = 2.0;
        assert!(matches!(
            m.rotation_quat(1e-6),
            Err(GeometryError::NonOrthonormalRotation { .. })
        ));
    }

    #[test]
    fn projection_like_last_row_is_rejected() {
        let mut m = Mat4::IDENTITY;
        m.m[3] = [0.0, 0.0, -1.0, 0.0];
        assert!(matches!(
            m.rotation_quat(1e-6),
            Err(GeometryError::NotRigidTransform)
        ));
    }

    #[test]
    fn rotation_matrix_agrees_with_quat_rotate() {
        let q = UnitQuat::new(-0.0896, 0.0, 0.0, 0.9960).unwrap();
        let v = Vec3::new(0.0, 1.0, 0.0);
        let via_quat = q.rotate(v);
        let via_mat = Mat4::from_quat(&q).transform_vector(v);
        assert_relative_eq!(via_quat.x, via_mat.x, epsilon = 1e-12);
        assert_relative_eq!(via_quat.y, via_mat.y, epsilon = 1e-12);
        assert_relative_eq!(via_quat.z, via_mat.z, epsilon = 1e-12);
    }

    #[test]
    fn row_major_round_trip() {
        let m = Mat4::from_rotation_translation(
            &UnitQuat::new(0.1, 0.2, 0.3, 0.9).unwrap(),
            Vec3::new(4.0, 5.0, 6.0),
        );
        assert_eq!(Mat4::from_row_major(&m.to_row_major()), m);
    }
}
