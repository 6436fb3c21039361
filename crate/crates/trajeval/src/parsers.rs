//! Trajectory file parsing and writing.
//!
//! Three input conventions are supported:
//!
//! * **TUM**: one pose per line, `timestamp tx ty tz qx qy qz qw`, space
//!   separated, `#` comments. Timestamps in seconds.
//! * **KITTI**: 12 space-separated reals per line, the row-major 3x4
//!   `[R | t]` matrix. Files carry no time column; poses are stamped
//!   synthetically at 10 Hz (`i * 0.1` s).
//! * **EuRoC**: CSV with a header line; columns `timestamp[ns], px, py, pz,
//!   qw, qx, qy, qz`, extra trailing columns (velocities, biases) ignored.
//!   Timestamps converted to seconds.
//!
//! TUM is the toolkit's interchange format: [`write_tum`] emits 17
//! significant digits so that `parse(write(t))` reproduces `t` exactly.

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::geometry::{Pose, RotationMatrix, UnitQuaternion};
use crate::scalar::{real, to_f64, Real};

/// Quaternion norms within this tolerance of 1 are silently renormalized;
/// anything further off is rejected as corrupt data.
const QUAT_NORM_TOL: f64 = 1e-3;

/// Per-entry tolerance for accepting a KITTI rotation block before
/// projecting it onto the nearest proper rotation.
const KITTI_ORTHO_TOL: f64 = 1e-3;

/// KITTI odometry ground truth is captured at 10 Hz.
const KITTI_DT: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrajectoryFormat {
    Tum,
    Kitti,
    Euroc,
}

impl TrajectoryFormat {
    pub fn as_str(&self) -> &'static str {
        match self {
            TrajectoryFormat::Tum => "tum",
            TrajectoryFormat::Kitti => "kitti",
            TrajectoryFormat::Euroc => "euroc",
        }
    }
}

impl std::str::FromStr for TrajectoryFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tum" => Ok(TrajectoryFormat::Tum),
            "kitti" => Ok(TrajectoryFormat::Kitti),
            "euroc" => Ok(TrajectoryFormat::Euroc),
            other => Err(Error::InvalidParams(format!(
                "unknown trajectory format '{other}' (expected tum, kitti, or euroc)"
            ))),
        }
    }
}

/// A pose with its capture time in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StampedPose<T: Real> {
    pub timestamp: f64,
    pub pose: Pose<T>,
}

/// Time-ordered, non-empty sequence of stamped poses.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T: Real> {
    poses: Vec<StampedPose<T>>,
    format: TrajectoryFormat,
    name: String,
}

impl<T: Real> Trajectory<T> {
    /// Validates non-emptiness and strictly increasing, finite, non-negative
    /// timestamps.
    pub fn new(poses: Vec<StampedPose<T>>, format: TrajectoryFormat, name: &str) -> Result<Self> {
        if poses.is_empty() {
            return Err(Error::EmptyTrajectory);
        }
        let mut prev = f64::NEG_INFINITY;
        for (i, sp) in poses.iter().enumerate() {
            if !sp.timestamp.is_finite() || sp.timestamp < 0.0 {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("timestamp {} is not finite and non-negative", sp.timestamp),
                });
            }
            if sp.timestamp <= prev {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!(
                        "non-increasing timestamp {} after {}",
                        sp.timestamp, prev
                    ),
                });
            }
            prev = sp.timestamp;
        }
        Ok(Self {
            poses,
            format,
            name: name.to_string(),
        })
    }

    pub fn len(&self) -> usize {
        self.poses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poses.is_empty()
    }

    pub fn poses(&self) -> &[StampedPose<T>] {
        &self.poses
    }

    pub fn format(&self) -> TrajectoryFormat {
        self.format
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    pub fn timestamps(&self) -> impl Iterator<Item = f64> + '_ {
        self.poses.iter().map(|sp| sp.timestamp)
    }

    pub fn translations(&self) -> impl Iterator<Item = &Vector3<T>> + '_ {
        self.poses.iter().map(|sp| sp.pose.translation())
    }
}

fn parse_field(token: &str, line_no: usize) -> Result<f64> {
    let v: f64 = token.parse().map_err(|_| Error::Parse {
        line: line_no,
        msg: format!("invalid number '{token}'"),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            line: line_no,
            msg: format!("non-finite value '{token}'"),
        });
    }
    Ok(v)
}

/// Validates the norm of a file quaternion (components in f64) and returns
/// it normalized, in internal `(w, x, y, z)` order.
fn validated_quaternion<T: Real>(
    w: f64,
    x: f64,
    y: f64,
    z: f64,
    line_no: usize,
) -> Result<UnitQuaternion<T>> {
    let norm = (w * w + x * x + y * y + z * z).sqrt();
    if (norm - 1.0).abs() > QUAT_NORM_TOL {
        return Err(Error::Parse {
            line: line_no,
            msg: format!("invalid quaternion (norm {norm:.6}, expected 1)"),
        });
    }
    UnitQuaternion::from_components(real(w), real(x), real(y), real(z)).ok_or(Error::Parse {
        line: line_no,
        msg: "invalid quaternion (zero norm)".into(),
    })
}

fn check_increasing(prev: Option<f64>, ts: f64, line_no: usize) -> Result<()> {
    if !ts.is_finite() || ts < 0.0 {
        return Err(Error::Parse {
            line: line_no,
            msg: format!("timestamp {ts} is not finite and non-negative"),
        });
    }
    if let Some(p) = prev {
        if ts <= p {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("non-increasing timestamp {ts} after {p}"),
            });
        }
    }
    Ok(())
}

/// Parses TUM trajectory text: `timestamp tx ty tz qx qy qz qw` per line.
pub fn parse_tum<T: Real>(text: &str) -> Result<Trajectory<T>> {
    let mut poses = Vec::new();
    let mut prev_ts: Option<f64> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 8 {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected 8 fields, found {}", fields.len()),
            });
        }
        let v: Vec<f64> = fields
            .iter()
            .map(|tok| parse_field(tok, line_no))
            .collect::<Result<_>>()?;
        check_increasing(prev_ts, v[0], line_no)?;
        prev_ts = Some(v[0]);
        // file order is qx qy qz qw
        let quat = validated_quaternion(v[7], v[4], v[5], v[6], line_no)?;
        poses.push(StampedPose {
            timestamp: v[0],
            pose: Pose::new(
                quat.to_rotation_matrix(),
                Vector3::new(real(v[1]), real(v[2]), real(v[3])),
            ),
        });
    }
    Trajectory::new(poses, TrajectoryFormat::Tum, "")
}

/// Parses KITTI odometry pose text: 12 reals per line, row-major `[R | t]`.
/// Poses are stamped at 10 Hz since the format has no time column.
pub fn parse_kitti<T: Real>(text: &str) -> Result<Trajectory<T>> {
    let mut poses = Vec::new();
    let mut index = 0usize;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 12 {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected 12 fields, found {}", fields.len()),
            });
        }
        let v: Vec<f64> = fields
            .iter()
            .map(|tok| parse_field(tok, line_no))
            .collect::<Result<_>>()?;
        let m = nalgebra::Matrix3::new(v[0], v[1], v[2], v[4], v[5], v[6], v[8], v[9], v[10]);
        if m.determinant() < 0.0 {
            return Err(Error::Parse {
                line: line_no,
                msg: "reflection in pose (rotation block has negative determinant)".into(),
            });
        }
        let gram_dev = (m.transpose() * m - nalgebra::Matrix3::identity())
            .abs()
            .max();
        if gram_dev > KITTI_ORTHO_TOL {
            return Err(Error::Parse {
                line: line_no,
                msg: format!(
                    "rotation block deviates from orthonormal by {gram_dev:.2e} (tolerance {KITTI_ORTHO_TOL:.0e})"
                ),
            });
        }
        let rot_f64 = RotationMatrix::nearest_rotation(&m).map_err(|e| Error::Parse {
            line: line_no,
            msg: e.to_string(),
        })?;
        let quat = rot_f64.to_quaternion();
        let rotation: RotationMatrix<T> = UnitQuaternion::from_components(
            real(quat.w()),
            real(quat.x()),
            real(quat.y()),
            real(quat.z()),
        )
        .expect("unit quaternion survives cast")
        .to_rotation_matrix();
        poses.push(StampedPose {
            timestamp: index as f64 * KITTI_DT,
            pose: Pose::new(rotation, Vector3::new(real(v[3]), real(v[7]), real(v[11]))),
        });
        index += 1;
    }
    Trajectory::new(poses, TrajectoryFormat::Kitti, "")
}

/// Parses EuRoC ground-truth/estimate CSV: `timestamp[ns], px, py, pz, qw,
/// qx, qy, qz, ...`. Extra columns are ignored. A missing header is accepted
/// with a warning.
pub fn parse_euroc<T: Real>(text: &str) -> Result<Trajectory<T>> {
    let mut poses = Vec::new();
    let mut prev_ts: Option<f64> = None;
    let mut saw_data = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if !saw_data {
            saw_data = true;
            // Header detection: a first row whose leading field is not
            // numeric is the column header.
            if fields[0].parse::<f64>().is_err() {
                continue;
            }
            log::warn!("EuRoC file has no header line; parsing from the first row");
        }
        if fields.len() < 8 {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected at least 8 columns, found {}", fields.len()),
            });
        }
        // Nanosecond stamps exceed 2^53; parse as integer when possible so
        // the seconds conversion is as exact as f64 allows.
        let ts = match fields[0].parse::<u64>() {
            Ok(ns) => ns as f64 * 1e-9,
            Err(_) => parse_field(fields[0], line_no)? * 1e-9,
        };
        let v: Vec<f64> = fields[1..8]
            .iter()
            .map(|tok| parse_field(tok, line_no))
            .collect::<Result<_>>()?;
        check_increasing(prev_ts, ts, line_no)?;
        prev_ts = Some(ts);
        // file order is qw qx qy qz
        let quat = validated_quaternion(v[3], v[4], v[5], v[6], line_no)?;
        poses.push(StampedPose {
            timestamp: ts,
            pose: Pose::new(
                quat.to_rotation_matrix(),
                Vector3::new(real(v[0]), real(v[1]), real(v[2])),
            ),
        });
    }
    Trajectory::new(poses, TrajectoryFormat::Euroc, "")
}

/// Parses text in the given format.
pub fn parse<T: Real>(text: &str, format: TrajectoryFormat) -> Result<Trajectory<T>> {
    match format {
        TrajectoryFormat::Tum => parse_tum(text),
        TrajectoryFormat::Kitti => parse_kitti(text),
        TrajectoryFormat::Euroc => parse_euroc(text),
    }
}

/// Writes a trajectory in TUM format with 17 significant digits per field,
/// enough to reproduce every f64 exactly on re-parse.
pub fn write_tum<T: Real>(traj: &Trajectory<T>) -> String {
    let mut out = String::with_capacity(traj.len() * 160);
    for sp in traj.poses() {
        let t = sp.pose.translation();
        let q = sp.pose.rotation().to_quaternion();
        out.push_str(&format!(
            "{:.16e} {:.16e} {:.16e} {:.16e} {:.16e} {:.16e} {:.16e} {:.16e}\n",
            sp.timestamp,
            to_f64(t.x),
            to_f64(t.y),
            to_f64(t.z),
            to_f64(q.x()),
            to_f64(q.y()),
            to_f64(q.z()),
            to_f64(q.w()),
        ));
    }
    out
}
