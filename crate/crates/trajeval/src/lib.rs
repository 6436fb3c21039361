//! Trajectory evaluation toolkit for visual odometry and SLAM.
//!
//! The crate covers the full evaluation pipeline: parse estimated and
//! ground-truth trajectories (TUM, KITTI, EuRoC), associate poses by
//! timestamp, align with the closed-form least-squares similarity transform
//! (optionally refining scale by golden-section search), and report Absolute
//! Trajectory Error statistics. A motion-only bundle-adjustment solver with
//! monocular/stereo pinhole models and a Huber-robustified cost rounds out
//! the optimization side.
//!
//! All numerical modules are generic over the [`Real`] scalar (`f32` or
//! `f64`); the `*F64` aliases at the crate root name the precision used by
//! the CLI and the test suite.

pub mod alignment;
pub mod association;
pub mod error;
pub mod geometry;
pub mod metrics;
pub mod parsers;
pub mod pose_optimizer;
pub mod report;
pub mod scalar;
pub mod scalar_opt;
pub mod synthgen;

pub use error::{Error, Result};
pub use scalar::Real;

// Re-exported so downstream code can name vector/matrix types without
// declaring its own nalgebra dependency.
pub use nalgebra;

pub type UnitQuaternionF64 = geometry::UnitQuaternion<f64>;
pub type RotationMatrixF64 = geometry::RotationMatrix<f64>;
pub type PoseF64 = geometry::Pose<f64>;
pub type TwistF64 = geometry::Twist<f64>;
pub type SimilarityTransformF64 = geometry::SimilarityTransform<f64>;
pub type StampedPoseF64 = parsers::StampedPose<f64>;
pub type TrajectoryF64 = parsers::Trajectory<f64>;
pub type PointSetF64 = alignment::PointSet<f64>;
pub type AlignmentResultF64 = alignment::AlignmentResult<f64>;
pub type ErrorSeriesF64 = metrics::ErrorSeries<f64>;
pub type ErrorStatsF64 = metrics::ErrorStats<f64>;
pub type CameraIntrinsicsF64 = pose_optimizer::CameraIntrinsics<f64>;
pub type ObservationF64 = pose_optimizer::Observation<f64>;

pub type UnitQuaternionF32 = geometry::UnitQuaternion<f32>;
pub type RotationMatrixF32 = geometry::RotationMatrix<f32>;
pub type PoseF32 = geometry::Pose<f32>;
pub type TwistF32 = geometry::Twist<f32>;
pub type SimilarityTransformF32 = geometry::SimilarityTransform<f32>;
pub type TrajectoryF32 = parsers::Trajectory<f32>;
