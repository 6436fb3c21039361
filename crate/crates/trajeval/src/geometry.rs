//! Rigid-body and similarity-transform types.
//!
//! All types are immutable values with validated invariants: unit quaternions
//! carry a canonical sign (`w >= 0`), rotation matrices are orthonormal with
//! determinant +1, and similarity transforms have strictly positive scale.
//! `exp`/`log` map between poses and their tangent-space twists for the
//! optimizer.

use nalgebra::{Matrix3, Vector3, Vector6};

use crate::error::{Error, Result};
use crate::scalar::{real, unit_tol, Real};

/// Unit quaternion `(w, x, y, z)` with canonical sign `w >= 0`.
///
/// `q` and `-q` denote the same rotation; construction canonicalizes so that
/// equality tests are well-defined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitQuaternion<T: Real> {
    w: T,
    x: T,
    y: T,
    z: T,
}

impl<T: Real> UnitQuaternion<T> {
    pub fn identity() -> Self {
        Self {
            w: T::one(),
            x: T::zero(),
            y: T::zero(),
            z: T::zero(),
        }
    }

    /// Normalizes `(w, x, y, z)` to unit length and canonicalizes the sign.
    /// Returns `None` for a (near-)zero quaternion.
    pub fn from_components(w: T, x: T, y: T, z: T) -> Option<Self> {
        let n2 = w * w + x * x + y * y + z * z;
        if n2 < real(1e-24) || !n2.is_finite() {
            return None;
        }
        let inv = T::one() / n2.sqrt();
        Some(Self::canonicalized(w * inv, x * inv, y * inv, z * inv))
    }

    pub fn from_axis_angle(axis: &Vector3<T>, angle: T) -> Option<Self> {
        let n = axis.norm();
        if n < real(1e-24) {
            return if angle.abs() < real(1e-24) {
                Some(Self::identity())
            } else {
                None
            };
        }
        let half = angle * real(0.5);
        let s = half.sin() / n;
        Self::from_components(half.cos(), axis.x * s, axis.y * s, axis.z * s)
    }

    fn canonicalized(w: T, x: T, y: T, z: T) -> Self {
        let zero = T::zero();
        // Flip q -> -q so w >= 0; ties at w == 0 break on the first nonzero
        // vector component, keeping equality well-defined for half-turns.
        let flip = w < zero
            || (w == zero
                && (x < zero || (x == zero && (y < zero || (y == zero && z < zero)))));
        if flip {
            Self {
                w: -w,
                x: -x,
                y: -y,
                z: -z,
            }
        } else {
            Self { w, x, y, z }
        }
    }

    pub fn w(&self) -> T {
        self.w
    }
    pub fn x(&self) -> T {
        self.x
    }
    pub fn y(&self) -> T {
        self.y
    }
    pub fn z(&self) -> T {
        self.z
    }

    pub fn norm(&self) -> T {
        (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// Rotation angle in `[0, pi]`.
    pub fn angle(&self) -> T {
        let s = (self.x * self.x + self.y * self.y + self.z * self.z).sqrt();
        real::<T>(2.0) * s.atan2(self.w)
    }

    /// Hamilton product, renormalized and canonicalized.
    pub fn compose(&self, other: &Self) -> Self {
        let (w1, x1, y1, z1) = (self.w, self.x, self.y, self.z);
        let (w2, x2, y2, z2) = (other.w, other.x, other.y, other.z);
        Self::from_components(
            w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
            w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
            w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
        )
        .expect("product of unit quaternions is a unit quaternion")
    }

    /// Rotates a vector directly by the quaternion sandwich product.
    pub fn rotate(&self, v: &Vector3<T>) -> Vector3<T> {
        let u = Vector3::new(self.x, self.y, self.z);
        let uv = u.cross(v);
        v + (uv * self.w + u.cross(&uv)) * real::<T>(2.0)
    }

    pub fn to_rotation_matrix(&self) -> RotationMatrix<T> {
        let (w, x, y, z) = (self.w, self.x, self.y, self.z);
        let two = real::<T>(2.0);
        let (xx, yy, zz) = (x * x, y * y, z * z);
        let (xy, xz, yz) = (x * y, x * z, y * z);
        let (wx, wy, wz) = (w * x, w * y, w * z);
        RotationMatrix::from_matrix_unchecked(Matrix3::new(
            T::one() - two * (yy + zz),
            two * (xy - wz),
            two * (xz + wy),
            two * (xy + wz),
            T::one() - two * (xx + zz),
            two * (yz - wx),
            two * (xz - wy),
            two * (yz + wx),
            T::one() - two * (xx + yy),
        ))
    }
}

/// Proper rotation matrix: orthonormal, determinant +1, row-major storage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationMatrix<T: Real>(Matrix3<T>);

impl<T: Real> RotationMatrix<T> {
    pub fn identity() -> Self {
        Self(Matrix3::identity())
    }

    /// Wraps a matrix that is already known to be a proper rotation.
    /// Debug builds assert the invariants.
    pub fn from_matrix_unchecked(m: Matrix3<T>) -> Self {
        debug_assert!(
            Self::is_rotation(&m, unit_tol()),
            "matrix violates rotation invariants"
        );
        Self(m)
    }

    /// Validates orthonormality and determinant +1 within `tol` per entry.
    pub fn try_from_matrix(m: Matrix3<T>, tol: T) -> Result<Self> {
        if !Self::is_rotation(&m, tol) {
            return Err(Error::InvalidParams(
                "matrix is not a proper rotation".into(),
            ));
        }
        Ok(Self(m))
    }

    /// Projects a near-rotation onto the closest proper rotation (in the
    /// Frobenius sense) via SVD.
    pub fn nearest_rotation(m: &Matrix3<T>) -> Result<Self> {
        let svd = m.svd(true, true);
        let u = svd.u.ok_or_else(|| {
            Error::InvalidParams("SVD failed on rotation block".into())
        })?;
        let v_t = svd.v_t.ok_or_else(|| {
            Error::InvalidParams("SVD failed on rotation block".into())
        })?;
        if svd.singular_values[1] < real(1e-12) {
            return Err(Error::InvalidParams(
                "rotation block is rank-deficient".into(),
            ));
        }
        let mut s = Matrix3::identity();
        if u.determinant() * v_t.determinant() < T::zero() {
            s[(2, 2)] = -T::one();
        }
        Ok(Self(u * s * v_t))
    }

    pub(crate) fn is_rotation(m: &Matrix3<T>, tol: T) -> bool {
        let gram = m.transpose() * m;
        let mut max_dev = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                let target = if i == j { T::one() } else { T::zero() };
                max_dev = max_dev.max((gram[(i, j)] - target).abs());
            }
        }
        max_dev <= tol && (m.determinant() - T::one()).abs() <= tol
    }

    pub fn matrix(&self) -> &Matrix3<T> {
        &self.0
    }

    pub fn determinant(&self) -> T {
        self.0.determinant()
    }

    pub fn apply(&self, v: &Vector3<T>) -> Vector3<T> {
        self.0 * v
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self::from_matrix_unchecked(self.0 * other.0)
    }

    /// Inverse rotation (the transpose).
    pub fn inverse(&self) -> Self {
        Self(self.0.transpose())
    }

    /// Rotation angle in `[0, pi]`.
    pub fn angle(&self) -> T {
        self.to_quaternion().angle()
    }

    /// Shepperd's method: numerically stable for every trace regime.
    pub fn to_quaternion(&self) -> UnitQuaternion<T> {
        let m = &self.0;
        let quarter = real::<T>(0.25);
        let two = real::<T>(2.0);
        let trace = m[(0, 0)] + m[(1, 1)] + m[(2, 2)];
        let (w, x, y, z) = if trace > T::zero() {
            let s = (trace + T::one()).sqrt() * two; // 4w
            (
                s * quarter,
                (m[(2, 1)] - m[(1, 2)]) / s,
                (m[(0, 2)] - m[(2, 0)]) / s,
                (m[(1, 0)] - m[(0, 1)]) / s,
            )
        } else if m[(0, 0)] > m[(1, 1)] && m[(0, 0)] > m[(2, 2)] {
            let s = (T::one() + m[(0, 0)] - m[(1, 1)] - m[(2, 2)]).sqrt() * two; // 4x
            (
                (m[(2, 1)] - m[(1, 2)]) / s,
                s * quarter,
                (m[(0, 1)] + m[(1, 0)]) / s,
                (m[(0, 2)] + m[(2, 0)]) / s,
            )
        } else if m[(1, 1)] > m[(2, 2)] {
            let s = (T::one() + m[(1, 1)] - m[(0, 0)] - m[(2, 2)]).sqrt() * two; // 4y
            (
                (m[(0, 2)] - m[(2, 0)]) / s,
                (m[(0, 1)] + m[(1, 0)]) / s,
                s * quarter,
                (m[(1, 2)] + m[(2, 1)]) / s,
            )
        } else {
            let s = (T::one() + m[(2, 2)] - m[(0, 0)] - m[(1, 1)]).sqrt() * two; // 4z
            (
                (m[(1, 0)] - m[(0, 1)]) / s,
                (m[(0, 2)] + m[(2, 0)]) / s,
                (m[(1, 2)] + m[(2, 1)]) / s,
                s * quarter,
            )
        };
        UnitQuaternion::from_components(w, x, y, z)
            .expect("valid rotation yields a unit quaternion")
    }
}

/// Skew-symmetric (hat) matrix of a 3-vector.
pub(crate) fn hat<T: Real>(v: &Vector3<T>) -> Matrix3<T> {
    Matrix3::new(
        T::zero(),
        -v.z,
        v.y,
        v.z,
        T::zero(),
        -v.x,
        -v.y,
        v.x,
        T::zero(),
    )
}

/// Tangent-space coordinates of SE(3): rotational part first, then
/// translational, matching the 6-vector layout `[omega; v]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Twist<T: Real> {
    pub rotation: Vector3<T>,
    pub translation: Vector3<T>,
}

impl<T: Real> Twist<T> {
    pub fn zero() -> Self {
        Self {
            rotation: Vector3::zeros(),
            translation: Vector3::zeros(),
        }
    }

    pub fn new(rotation: Vector3<T>, translation: Vector3<T>) -> Self {
        Self {
            rotation,
            translation,
        }
    }

    pub fn from_vector(v: &Vector6<T>) -> Self {
        Self {
            rotation: Vector3::new(v[0], v[1], v[2]),
            translation: Vector3::new(v[3], v[4], v[5]),
        }
    }

    pub fn to_vector(&self) -> Vector6<T> {
        Vector6::new(
            self.rotation.x,
            self.rotation.y,
            self.rotation.z,
            self.translation.x,
            self.translation.y,
            self.translation.z,
        )
    }

    pub fn norm(&self) -> T {
        (self.rotation.norm_squared() + self.translation.norm_squared()).sqrt()
    }
}

/// Rigid-body pose: rotation plus translation in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose<T: Real> {
    rotation: RotationMatrix<T>,
    translation: Vector3<T>,
}

impl<T: Real> Pose<T> {
    pub fn identity() -> Self {
        Self {
            rotation: RotationMatrix::identity(),
            translation: Vector3::zeros(),
        }
    }

    pub fn new(rotation: RotationMatrix<T>, translation: Vector3<T>) -> Self {
        Self {
            rotation,
            translation,
        }
    }

    pub fn rotation(&self) -> &RotationMatrix<T> {
        &self.rotation
    }

    pub fn translation(&self) -> &Vector3<T> {
        &self.translation
    }

    pub fn apply(&self, p: &Vector3<T>) -> Vector3<T> {
        self.rotation.apply(p) + self.translation
    }

    /// `self` after `other`: `(a.compose(b)).apply(p) == a.apply(b.apply(p))`.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            rotation: self.rotation.compose(&other.rotation),
            translation: self.rotation.apply(&other.translation) + self.translation,
        }
    }

    pub fn inverse(&self) -> Self {
        let rot_inv = self.rotation.inverse();
        let t = -rot_inv.apply(&self.translation);
        Self {
            rotation: rot_inv,
            translation: t,
        }
    }

    /// Exponential map from a twist. Uses the closed Rodrigues form, with a
    /// series expansion below angle 1e-8 to avoid division by zero.
    pub fn exp(xi: &Twist<T>) -> Self {
        let omega = xi.rotation;
        let theta2 = omega.norm_squared();
        let theta = theta2.sqrt();
        let k = hat(&omega);
        let k2 = k * k;
        let (a, b, c) = if theta < real(1e-8) {
            (
                T::one() - theta2 * real(1.0 / 6.0),
                real::<T>(0.5) - theta2 * real(1.0 / 24.0),
                real::<T>(1.0 / 6.0) - theta2 * real(1.0 / 120.0),
            )
        } else {
            let s = theta.sin();
            let co = theta.cos();
            (
                s / theta,
                (T::one() - co) / theta2,
                (theta - s) / (theta2 * theta),
            )
        };
        let r = Matrix3::identity() + k * a + k2 * b;
        let v_mat = Matrix3::identity() + k * b + k2 * c;
        Self {
            rotation: RotationMatrix::from_matrix_unchecked(r),
            translation: v_mat * xi.translation,
        }
    }

    /// Logarithm map to a twist. Only the principal branch is supported:
    /// rotations with angle equal to pi are rejected.
    pub fn log(&self) -> Result<Twist<T>> {
        let q = self.rotation.to_quaternion();
        let u = Vector3::new(q.x(), q.y(), q.z());
        let s = u.norm();
        if q.w() < real(1e-9) {
            return Err(Error::NonPrincipalRotation);
        }
        let omega = if s < real(1e-12) {
            u * (real::<T>(2.0) / q.w())
        } else {
            u * (real::<T>(2.0) * s.atan2(q.w()) / s)
        };
        let theta2 = omega.norm_squared();
        let k = hat(&omega);
        let k2 = k * k;
        let coeff = if theta2 < real(1e-16) {
            real::<T>(1.0 / 12.0) + theta2 * real(1.0 / 720.0)
        } else {
            let theta = theta2.sqrt();
            (T::one()
                - theta * theta.sin() / (real::<T>(2.0) * (T::one() - theta.cos())))
                / theta2
        };
        let v_inv = Matrix3::identity() - k * real::<T>(0.5) + k2 * coeff;
        Ok(Twist {
            rotation: omega,
            translation: v_inv * self.translation,
        })
    }
}

/// Similarity transform `p -> c * R * p + t` with strictly positive scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimilarityTransform<T: Real> {
    scale: T,
    rotation: RotationMatrix<T>,
    translation: Vector3<T>,
}

impl<T: Real> SimilarityTransform<T> {
    pub fn identity() -> Self {
        Self {
            scale: T::one(),
            rotation: RotationMatrix::identity(),
            translation: Vector3::zeros(),
        }
    }

    /// Rigid (SE(3)) transform: scale is exactly 1.
    pub fn rigid(rotation: RotationMatrix<T>, translation: Vector3<T>) -> Self {
        Self {
            scale: T::one(),
            rotation,
            translation,
        }
    }

    pub fn new(scale: T, rotation: RotationMatrix<T>, translation: Vector3<T>) -> Result<Self> {
        if !(scale > T::zero()) || !scale.is_finite() {
            return Err(Error::NonPositiveScale {
                scale: crate::scalar::to_f64(scale),
            });
        }
        Ok(Self {
            scale,
            rotation,
            translation,
        })
    }

    pub fn scale(&self) -> T {
        self.scale
    }

    pub fn rotation(&self) -> &RotationMatrix<T> {
        &self.rotation
    }

    pub fn translation(&self) -> &Vector3<T> {
        &self.translation
    }

    pub fn apply(&self, p: &Vector3<T>) -> Vector3<T> {
        self.rotation.apply(p) * self.scale + self.translation
    }

    /// Maps a pose: translation through the full transform, rotation
    /// left-multiplied (scale does not act on orientations).
    pub fn apply_to_pose(&self, pose: &Pose<T>) -> Pose<T> {
        Pose::new(
            self.rotation.compose(pose.rotation()),
            self.apply(pose.translation()),
        )
    }

    /// `self` after `other` as point maps.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            scale: self.scale * other.scale,
            rotation: self.rotation.compose(&other.rotation),
            translation: self.rotation.apply(&other.translation) * self.scale
                + self.translation,
        }
    }

    pub fn inverse(&self) -> Self {
        let inv_scale = T::one() / self.scale;
        let rot_inv = self.rotation.inverse();
        let t = -(rot_inv.apply(&self.translation) * inv_scale);
        Self {
            scale: inv_scale,
            rotation: rot_inv,
            translation: t,
        }
    }
}
