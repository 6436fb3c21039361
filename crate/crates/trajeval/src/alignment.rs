//! Closed-form least-squares alignment of two point patterns and
//! trajectory-level alignment modes.
//!
//! [`umeyama_align`] returns the global minimizer of the mean squared error
//! `(1/n) sum ||y_i - (c R x_i + t)||^2` over rotation, translation, and
//! (optionally) scale. The solution is reflection-safe: the determinant test
//! on the SVD factors guarantees `det(R) = +1` even for degenerate,
//! near-coplanar patterns. [`golden_scale_refine`] re-fits the scale by
//! derivative-free search as an alternative to the closed-form value.
//!
//! Trajectory alignment operates on translation components only; rotations
//! are transported by the recovered transform, not fitted.

use nalgebra::{Matrix3, Vector3};

use crate::association::Correspondences;
use crate::error::{Error, Result};
use crate::geometry::{RotationMatrix, SimilarityTransform};
use crate::parsers::{StampedPose, Trajectory};
use crate::scalar::{real, to_f64, Real};
use crate::scalar_opt::{golden_section_minimize, ScalarInterval};

/// Bounds of the golden-section scale search, generous enough for monocular
/// scale drift. The search runs on log(s).
const SCALE_SEARCH_MIN: f64 = 1e-3;
const SCALE_SEARCH_MAX: f64 = 1e3;

/// Non-empty set of 3D points with finite coordinates.
#[derive(Debug, Clone)]
pub struct PointSet<T: Real> {
    points: Vec<Vector3<T>>,
}

impl<T: Real> PointSet<T> {
    pub fn new(points: Vec<Vector3<T>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParams("point set must be non-empty".into()));
        }
        if points.iter().any(|p| !(p.x.is_finite() && p.y.is_finite() && p.z.is_finite())) {
            return Err(Error::InvalidParams(
                "point set contains non-finite coordinates".into(),
            ));
        }
        Ok(Self { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vector3<T>] {
        &self.points
    }

    fn mean(&self) -> Vector3<T> {
        let sum = self
            .points
            .iter()
            .fold(Vector3::zeros(), |acc, p| acc + p);
        sum / real::<T>(self.points.len() as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlignmentMode {
    /// Compare raw trajectories without any alignment.
    None,
    /// Rigid alignment (rotation + translation, scale fixed at 1).
    Se3,
    /// Similarity alignment with the closed-form scale.
    Sim3,
    /// Rigid alignment followed by golden-section scale refinement.
    Sim3Golden,
}

impl AlignmentMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            AlignmentMode::None => "none",
            AlignmentMode::Se3 => "se3",
            AlignmentMode::Sim3 => "sim3",
            AlignmentMode::Sim3Golden => "sim3_golden",
        }
    }
}

impl std::str::FromStr for AlignmentMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(AlignmentMode::None),
            "se3" => Ok(AlignmentMode::Se3),
            "sim3" => Ok(AlignmentMode::Sim3),
            "sim3_golden" | "sim3-golden" => Ok(AlignmentMode::Sim3Golden),
            other => Err(Error::InvalidParams(format!(
                "unknown alignment mode '{other}' (expected none, se3, sim3, or sim3_golden)"
            ))),
        }
    }
}

/// The recovered transform together with the minimized mean squared error.
#[derive(Debug, Clone, Copy)]
pub struct AlignmentResult<T: Real> {
    pub transform: SimilarityTransform<T>,
    /// Mean squared error (m^2) of `y_i` vs `transform(x_i)`.
    pub residual_msse: T,
    pub mode: AlignmentMode,
}

/// Mean squared error of `y_i` against `transform(x_i)`.
pub fn mean_squared_error<T: Real>(
    x: &PointSet<T>,
    y: &PointSet<T>,
    transform: &SimilarityTransform<T>,
) -> T {
    let mut sum = T::zero();
    for (xi, yi) in x.points().iter().zip(y.points()) {
        sum += (yi - transform.apply(xi)).norm_squared();
    }
    sum / real::<T>(x.len() as f64)
}

struct CenteredFit<T: Real> {
    mean_x: Vector3<T>,
    mean_y: Vector3<T>,
    var_x: T,
    u: Matrix3<T>,
    v_t: Matrix3<T>,
    singular_values: Vector3<T>,
    /// -1 when det(U) * det(V) < 0, else +1 (the reflection guard).
    sign: T,
}

impl<T: Real> CenteredFit<T> {
    /// Decomposes the cross-covariance of the two patterns. Shared by the
    /// closed-form solution and per-sample fixed-scale refits.
    fn compute(x: &PointSet<T>, y: &PointSet<T>) -> Result<Self> {
        let n = x.len();
        if n != y.len() {
            return Err(Error::InvalidParams(format!(
                "point sets differ in size ({} vs {})",
                n,
                y.len()
            )));
        }
        if n < 3 {
            return Err(Error::Underdetermined { needed: 3, got: n });
        }
        let mean_x = x.mean();
        let mean_y = y.mean();
        let inv_n = T::one() / real::<T>(n as f64);
        let mut var_x = T::zero();
        let mut cross = Matrix3::zeros();
        for (xi, yi) in x.points().iter().zip(y.points()) {
            let dx = xi - mean_x;
            let dy = yi - mean_y;
            var_x += dx.norm_squared();
            cross += dy * dx.transpose();
        }
        var_x *= inv_n;
        cross *= inv_n;
        if var_x < real(1e-12) {
            return Err(Error::DegenerateSource {
                variance: to_f64(var_x),
            });
        }
        let svd = cross.svd(true, true);
        let u = svd.u.expect("SVD with u requested");
        let v_t = svd.v_t.expect("SVD with v_t requested");
        let sign = if u.determinant() * v_t.determinant() < T::zero() {
            -T::one()
        } else {
            T::one()
        };
        Ok(Self {
            mean_x,
            mean_y,
            var_x,
            u,
            v_t,
            singular_values: svd.singular_values,
            sign,
        })
    }

    fn rotation(&self) -> RotationMatrix<T> {
        let mut s = Matrix3::identity();
        s[(2, 2)] = self.sign;
        RotationMatrix::from_matrix_unchecked(self.u * s * self.v_t)
    }

    fn trace_ds(&self) -> T {
        self.singular_values[0] + self.singular_values[1]
            + self.sign * self.singular_values[2]
    }

    fn transform_with_scale(&self, scale: T) -> Result<SimilarityTransform<T>> {
        let rotation = self.rotation();
        let translation = self.mean_y - rotation.apply(&self.mean_x) * scale;
        SimilarityTransform::new(scale, rotation, translation)
    }
}

/// Closed-form least-squares similarity (or rigid, when `with_scale` is
/// false) alignment of `x` onto `y`.
pub fn umeyama_align<T: Real>(
    x: &PointSet<T>,
    y: &PointSet<T>,
    with_scale: bool,
) -> Result<AlignmentResult<T>> {
    let fit = CenteredFit::compute(x, y)?;
    let scale = if with_scale {
        let c = fit.trace_ds() / fit.var_x;
        if !(c > T::zero()) {
            return Err(Error::NonPositiveScale { scale: to_f64(c) });
        }
        c
    } else {
        T::one()
    };
    let transform = fit.transform_with_scale(scale)?;
    Ok(AlignmentResult {
        residual_msse: mean_squared_error(x, y, &transform),
        transform,
        mode: if with_scale {
            AlignmentMode::Sim3
        } else {
            AlignmentMode::Se3
        },
    })
}

fn corresponding_point_sets<T: Real>(
    est: &Trajectory<T>,
    ref_traj: &Trajectory<T>,
    corr: &Correspondences,
) -> Result<(PointSet<T>, PointSet<T>)> {
    if corr.is_empty() {
        return Err(Error::NoOverlap);
    }
    let mut x = Vec::with_capacity(corr.len());
    let mut y = Vec::with_capacity(corr.len());
    for &(ri, ei) in corr.pairs() {
        let rp = ref_traj.poses().get(ri).ok_or_else(|| {
            Error::InvalidParams(format!("correspondence index {ri} out of range"))
        })?;
        let ep = est.poses().get(ei).ok_or_else(|| {
            Error::InvalidParams(format!("correspondence index {ei} out of range"))
        })?;
        x.push(*ep.pose.translation());
        y.push(*rp.pose.translation());
    }
    Ok((PointSet::new(x)?, PointSet::new(y)?))
}

fn transform_trajectory<T: Real>(
    est: &Trajectory<T>,
    transform: &SimilarityTransform<T>,
) -> Trajectory<T> {
    let poses: Vec<StampedPose<T>> = est
        .poses()
        .iter()
        .map(|sp| StampedPose {
            timestamp: sp.timestamp,
            pose: transform.apply_to_pose(&sp.pose),
        })
        .collect();
    Trajectory::new(poses, est.format(), est.name())
        .expect("transforming preserves trajectory invariants")
}

/// Aligns the estimate onto the reference over the given correspondences and
/// returns both the fit and the transformed estimate.
pub fn align_trajectories<T: Real>(
    est: &Trajectory<T>,
    ref_traj: &Trajectory<T>,
    corr: &Correspondences,
    mode: AlignmentMode,
) -> Result<(AlignmentResult<T>, Trajectory<T>)> {
    let (x, y) = corresponding_point_sets(est, ref_traj, corr)?;
    let result = match mode {
        AlignmentMode::None => {
            let transform = SimilarityTransform::identity();
            AlignmentResult {
                residual_msse: mean_squared_error(&x, &y, &transform),
                transform,
                mode: AlignmentMode::None,
            }
        }
        AlignmentMode::Se3 => umeyama_align(&x, &y, false)?,
        AlignmentMode::Sim3 => umeyama_align(&x, &y, true)?,
        AlignmentMode::Sim3Golden => {
            let rigid = umeyama_align(&x, &y, false)?;
            refine_scale(&x, &y, &rigid)?
        }
    };
    let aligned = transform_trajectory(est, &result.transform);
    Ok((result, aligned))
}

/// Golden-section scale refinement on top of a rigid alignment: minimizes
/// the mean squared error over `s` in `[1e-3, 1e3]` (log scale), re-fitting
/// rotation and translation for every scale sample.
pub fn golden_scale_refine<T: Real>(
    est: &Trajectory<T>,
    ref_traj: &Trajectory<T>,
    corr: &Correspondences,
    rigid: &AlignmentResult<T>,
) -> Result<AlignmentResult<T>> {
    if rigid.mode != AlignmentMode::Se3 {
        return Err(Error::InvalidParams(
            "golden scale refinement requires an se3-mode result".into(),
        ));
    }
    let (x, y) = corresponding_point_sets(est, ref_traj, corr)?;
    refine_scale(&x, &y, rigid)
}

fn refine_scale<T: Real>(
    x: &PointSet<T>,
    y: &PointSet<T>,
    rigid: &AlignmentResult<T>,
) -> Result<AlignmentResult<T>> {
    let objective = |log_s: T| -> T {
        let s = log_s.exp();
        match CenteredFit::compute(x, y).and_then(|fit| fit.transform_with_scale(s)) {
            Ok(t) => mean_squared_error(x, y, &t),
            Err(_) => T::nan(),
        }
    };
    let interval = ScalarInterval::new(
        real::<T>(SCALE_SEARCH_MIN.ln()),
        real::<T>(SCALE_SEARCH_MAX.ln()),
    )?;
    let best = golden_section_minimize(objective, &interval)?;
    let scale = best.x_min.exp();
    let fit = CenteredFit::compute(x, y)?;
    let transform = fit.transform_with_scale(scale)?;
    let residual = mean_squared_error(x, y, &transform);
    // s = 1 lies inside the search interval, so refinement can never be
    // worse than the rigid fit; keep that guarantee exact.
    if residual > rigid.residual_msse {
        return Ok(AlignmentResult {
            transform: rigid.transform,
            residual_msse: rigid.residual_msse,
            mode: AlignmentMode::Sim3Golden,
        });
    }
    Ok(AlignmentResult {
        transform,
        residual_msse: residual,
        mode: AlignmentMode::Sim3Golden,
    })
}
