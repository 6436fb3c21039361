//! Absolute Trajectory Error and descriptive statistics.
//!
//! ATE measures translation only: per-pair error is the Euclidean distance
//! between corresponding reference and (aligned) estimate positions, and the
//! headline number is its RMSE. [`ErrorStats`] carries the full table of
//! summary statistics plus quartiles and a histogram for report plots.

use crate::association::Correspondences;
use crate::error::{Error, Result};
use crate::parsers::Trajectory;
use crate::scalar::{real, Real};

/// Per-pair translational error magnitudes (meters), ordered by reference
/// timestamp, with the paired reference timestamps.
#[derive(Debug, Clone)]
pub struct ErrorSeries<T: Real> {
    values: Vec<T>,
    timestamps: Vec<f64>,
}

impl<T: Real> ErrorSeries<T> {
    pub fn new(values: Vec<T>, timestamps: Vec<f64>) -> Result<Self> {
        if values.len() != timestamps.len() {
            return Err(Error::InvalidParams(
                "error series and timestamps differ in length".into(),
            ));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= T::zero())) {
            return Err(Error::InvalidParams(
                "error series values must be finite and non-negative".into(),
            ));
        }
        Ok(Self { values, timestamps })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn timestamps(&self) -> &[f64] {
        &self.timestamps
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Histogram with `ceil(sqrt(n))` uniform bins over `[min, max]`
/// (a single bin when the range is degenerate).
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram<T: Real> {
    /// Bin edges; `counts.len() + 1` entries.
    pub edges: Vec<T>,
    pub counts: Vec<usize>,
}

/// Summary statistics of an error series.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorStats<T: Real> {
    pub rmse: T,
    pub mean: T,
    pub median: T,
    pub std: T,
    pub min: T,
    pub max: T,
    /// Sum of squared errors (m^2); `rmse^2 * count` by construction.
    pub sse: T,
    pub count: usize,
    pub q1: T,
    pub q2: T,
    pub q3: T,
    pub histogram: Histogram<T>,
}

/// Linear-interpolation quantile on a sorted slice.
fn quantile<T: Real>(sorted: &[T], p: f64) -> T {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let pos = p * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    let frac = real::<T>(pos - lo as f64);
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

impl<T: Real> ErrorStats<T> {
    pub fn from_series(series: &ErrorSeries<T>) -> Result<Self> {
        Self::from_values(series.values())
    }

    pub fn from_values(values: &[T]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParams(
                "cannot compute statistics of an empty series".into(),
            ));
        }
        let n = values.len();
        let inv_n = T::one() / real::<T>(n as f64);
        let mut sse = T::zero();
        let mut sum = T::zero();
        for &v in values {
            sse += v * v;
            sum += v;
        }
        let mean = sum * inv_n;
        let rmse = (sse * inv_n).sqrt();
        // population std: std^2 = rmse^2 - mean^2
        let std = (rmse * rmse - mean * mean).max(T::zero()).sqrt();

        let mut sorted = values.to_vec();
        sorted.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite errors"));
        let min = sorted[0];
        let max = sorted[n - 1];
        let q1 = quantile(&sorted, 0.25);
        let q2 = quantile(&sorted, 0.5);
        let q3 = quantile(&sorted, 0.75);

        let histogram = Self::histogram(values, min, max);

        Ok(Self {
            rmse,
            mean,
            median: q2,
            std,
            min,
            max,
            sse,
            count: n,
            q1,
            q2,
            q3,
            histogram,
        })
    }

    fn histogram(values: &[T], min: T, max: T) -> Histogram<T> {
        let n = values.len();
        let range = max - min;
        if !(range > T::zero()) {
            return Histogram {
                edges: vec![min, max],
                counts: vec![n],
            };
        }
        let bins = (n as f64).sqrt().ceil() as usize;
        let width = range / real::<T>(bins as f64);
        let mut edges: Vec<T> = (0..=bins)
            .map(|k| min + width * real::<T>(k as f64))
            .collect();
        edges[bins] = max;
        let mut counts = vec![0usize; bins];
        for &v in values {
            let idx = crate::scalar::to_f64((v - min) / width).floor() as usize;
            counts[idx.min(bins - 1)] += 1;
        }
        Histogram { edges, counts }
    }
}

/// Translational ATE of an (already aligned) estimate against the reference,
/// over the associated pairs.
pub fn ate_translation<T: Real>(
    est_aligned: &Trajectory<T>,
    ref_traj: &Trajectory<T>,
    corr: &Correspondences,
) -> Result<(ErrorSeries<T>, ErrorStats<T>)> {
    if corr.is_empty() {
        return Err(Error::NoOverlap);
    }
    let mut values = Vec::with_capacity(corr.len());
    let mut timestamps = Vec::with_capacity(corr.len());
    for &(ri, ei) in corr.pairs() {
        let rp = ref_traj.poses().get(ri).ok_or_else(|| {
            Error::InvalidParams(format!("correspondence index {ri} out of range"))
        })?;
        let ep = est_aligned.poses().get(ei).ok_or_else(|| {
            Error::InvalidParams(format!("correspondence index {ei} out of range"))
        })?;
        values.push((rp.pose.translation() - ep.pose.translation()).norm());
        timestamps.push(rp.timestamp);
    }
    let series = ErrorSeries::new(values, timestamps)?;
    let stats = ErrorStats::from_series(&series)?;
    Ok((series, stats))
}

/// One row of the comparison table (all columns as scalars so the cross-run
/// mean row has a uniform type).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatsRow<T: Real> {
    pub rmse: T,
    pub mean: T,
    pub median: T,
    pub std: T,
    pub min: T,
    pub max: T,
    pub count: T,
}

impl<T: Real> From<&ErrorStats<T>> for StatsRow<T> {
    fn from(s: &ErrorStats<T>) -> Self {
        Self {
            rmse: s.rmse,
            mean: s.mean,
            median: s.median,
            std: s.std,
            min: s.min,
            max: s.max,
            count: real(s.count as f64),
        }
    }
}

/// Per-run statistics plus a cross-run mean row (arithmetic mean of each
/// column, matching the per-sequence "Mean" convention of benchmark tables).
#[derive(Debug, Clone)]
pub struct ComparisonTable<T: Real> {
    pub rows: Vec<(String, StatsRow<T>)>,
    pub mean_row: StatsRow<T>,
}

pub fn compare_runs<T: Real>(runs: &[(String, ErrorStats<T>)]) -> Result<ComparisonTable<T>> {
    if runs.is_empty() {
        return Err(Error::InvalidParams(
            "comparison requires at least one run".into(),
        ));
    }
    let rows: Vec<(String, StatsRow<T>)> = runs
        .iter()
        .map(|(name, stats)| (name.clone(), StatsRow::from(stats)))
        .collect();
    let inv = T::one() / real::<T>(rows.len() as f64);
    let mut mean_row = StatsRow {
        rmse: T::zero(),
        mean: T::zero(),
        median: T::zero(),
        std: T::zero(),
        min: T::zero(),
        max: T::zero(),
        count: T::zero(),
    };
    for (_, r) in &rows {
        mean_row.rmse += r.rmse;
        mean_row.mean += r.mean;
        mean_row.median += r.median;
        mean_row.std += r.std;
        mean_row.min += r.min;
        mean_row.max += r.max;
        mean_row.count += r.count;
    }
    mean_row.rmse *= inv;
    mean_row.mean *= inv;
    mean_row.median *= inv;
    mean_row.std *= inv;
    mean_row.min *= inv;
    mean_row.max *= inv;
    mean_row.count *= inv;
    Ok(ComparisonTable { rows, mean_row })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::association::{associate, AssociationParams};
    use crate::geometry::{Pose, RotationMatrix};
    use crate::parsers::{StampedPose, TrajectoryFormat};
    use approx::assert_abs_diff_eq;
    use nalgebra::Vector3;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn traj_from_points(points: &[Vector3<f64>]) -> Trajectory<f64> {
        let poses = points
            .iter()
            .enumerate()
            .map(|(i, p)| StampedPose {
                timestamp: i as f64 * 0.1,
                pose: Pose::new(RotationMatrix::identity(), *p),
            })
            .collect();
        Trajectory::new(poses, TrajectoryFormat::Tum, "t").unwrap()
    }

    #[test]
    fn self_comparison_is_exactly_zero() {
        let pts: Vec<Vector3<f64>> = (0..10)
            .map(|i| Vector3::new(i as f64, (i * i) as f64 * 0.1, -(i as f64)))
            .collect();
        let t = traj_from_points(&pts);
        let corr = associate(&t, &t, &AssociationParams::default()).unwrap();
        let (series, stats) = ate_translation(&t, &t, &corr).unwrap();
        assert!(series.values().iter().all(|&v| v == 0.0));
        assert_eq!(stats.rmse, 0.0);
        assert_eq!(stats.mean, 0.0);
        assert_eq!(stats.std, 0.0);
        assert_eq!(stats.max, 0.0);
        assert_eq!(stats.sse, 0.0);
        assert_eq!(stats.count, 10);
    }

    #[test]
    fn constant_offset_is_a_345_triangle() {
        let pts: Vec<Vector3<f64>> = (0..25)
            .map(|i| Vector3::new(i as f64 * 0.3, 0.0, i as f64 * 0.1))
            .collect();
        let ref_traj = traj_from_points(&pts);
        let offset: Vec<Vector3<f64>> =
            pts.iter().map(|p| p + Vector3::new(3.0, 4.0, 0.0)).collect();
        let est = traj_from_points(&offset);
        let corr = associate(&ref_traj, &est, &AssociationParams::default()).unwrap();
        let (series, stats) = ate_translation(&est, &ref_traj, &corr).unwrap();
        for &v in series.values() {
            assert_abs_diff_eq!(v, 5.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(stats.rmse, 5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(stats.std, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn gaussian_noise_matches_chi_expectation() {
        // isotropic sigma = 0.1 per axis: E[rmse] = sigma * sqrt(3)
        let mut rng = ChaCha8Rng::seed_from_u64(314);
        let sigma = 0.1;
        let n = 10_000;
        let pts: Vec<Vector3<f64>> = (0..n).map(|i| Vector3::new(i as f64, 0.0, 0.0)).collect();
        let ref_traj = traj_from_points(&pts);
        let noisy: Vec<Vector3<f64>> = pts
            .iter()
            .map(|p| {
                let dx: f64 = StandardNormal.sample(&mut rng);
                let dy: f64 = StandardNormal.sample(&mut rng);
                let dz: f64 = StandardNormal.sample(&mut rng);
                p + Vector3::new(dx, dy, dz) * sigma
            })
            .collect();
        let est = traj_from_points(&noisy);
        let corr = associate(&ref_traj, &est, &AssociationParams::default()).unwrap();
        let (_, stats) = ate_translation(&est, &ref_traj, &corr).unwrap();
        let expected = sigma * 3.0f64.sqrt();
        assert!(
            (stats.rmse - expected).abs() < 0.005,
            "rmse {} vs sigma*sqrt(3) = {expected}",
            stats.rmse
        );
    }

    #[test]
    fn stats_identities_hold() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let values: Vec<f64> = (0..1000)
            .map(|_| {
                let v: f64 = StandardNormal.sample(&mut rng);
                v.abs() * 0.3
            })
            .collect();
        let stats = ErrorStats::from_values(&values).unwrap();
        // rmse^2 * count = sse
        let rel = (stats.rmse * stats.rmse * stats.count as f64 - stats.sse).abs() / stats.sse;
        assert!(rel < 1e-9);
        // ordering of the five-number summary
        assert!(stats.min <= stats.q1);
        assert!(stats.q1 <= stats.median);
        assert!(stats.median <= stats.q3);
        assert!(stats.q3 <= stats.max);
        assert_eq!(stats.median, stats.q2);
        // power-mean inequality
        assert!(stats.rmse >= stats.mean);
        // std^2 = rmse^2 - mean^2
        let lhs = stats.std * stats.std;
        let rhs = stats.rmse * stats.rmse - stats.mean * stats.mean;
        assert!((lhs - rhs).abs() / rhs.max(1e-300) < 1e-9);
        // histogram accounts for every sample
        assert_eq!(stats.histogram.counts.iter().sum::<usize>(), stats.count);
        assert_eq!(stats.histogram.edges.len(), stats.histogram.counts.len() + 1);
        assert_eq!(stats.histogram.counts.len(), 32); // ceil(sqrt(1000))
    }

    #[test]
    fn degenerate_histogram_is_single_bin() {
        let stats = ErrorStats::from_values(&[2.0f64; 17]).unwrap();
        assert_eq!(stats.histogram.counts, vec![17]);
        assert_eq!(stats.histogram.edges, vec![2.0, 2.0]);
    }

    #[test]
    fn single_value_stats() {
        let stats = ErrorStats::from_values(&[1.5f64]).unwrap();
        assert_eq!(stats.rmse, 1.5);
        assert_eq!(stats.median, 1.5);
        assert_eq!(stats.q1, 1.5);
        assert_eq!(stats.q3, 1.5);
        assert_eq!(stats.count, 1);
    }

    #[test]
    fn ate_invariant_under_common_rigid_motion() {
        use crate::geometry::{SimilarityTransform, UnitQuaternion};
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let pts: Vec<Vector3<f64>> = (0..50)
            .map(|_| {
                use rand::Rng;
                Vector3::new(
                    rng.random_range(-5.0..5.0),
                    rng.random_range(-5.0..5.0),
                    rng.random_range(-5.0..5.0),
                )
            })
            .collect();
        let noisy: Vec<Vector3<f64>> = pts
            .iter()
            .map(|p| {
                let d: f64 = StandardNormal.sample(&mut rng);
                p + Vector3::new(d, 0.0, 0.0) * 0.05
            })
            .collect();
        let ref_traj = traj_from_points(&pts);
        let est = traj_from_points(&noisy);
        let corr = associate(&ref_traj, &est, &AssociationParams::default()).unwrap();
        let (_, base) = ate_translation(&est, &ref_traj, &corr).unwrap();

        let g = SimilarityTransform::rigid(
            UnitQuaternion::from_axis_angle(&Vector3::new(1.0, 2.0, -1.0), 0.9)
                .unwrap()
                .to_rotation_matrix(),
            Vector3::new(10.0, -4.0, 2.0),
        );
        let moved_ref = traj_from_points(&pts.iter().map(|p| g.apply(p)).collect::<Vec<_>>());
        let moved_est = traj_from_points(&noisy.iter().map(|p| g.apply(p)).collect::<Vec<_>>());
        let (_, moved) = ate_translation(&moved_est, &moved_ref, &corr).unwrap();
        assert_abs_diff_eq!(base.rmse, moved.rmse, epsilon = 1e-9);
        assert_abs_diff_eq!(base.mean, moved.mean, epsilon = 1e-9);
        assert_abs_diff_eq!(base.max, moved.max, epsilon = 1e-9);
    }

    #[test]
    fn permuting_pair_order_leaves_stats_unchanged() {
        let values = vec![0.5f64, 0.1, 0.9, 0.3, 0.7];
        let stamps = vec![0.0, 1.0, 2.0, 3.0, 4.0];
        let a = ErrorStats::from_series(&ErrorSeries::new(values.clone(), stamps.clone()).unwrap())
            .unwrap();
        let mut perm: Vec<usize> = vec![3, 0, 4, 2, 1];
        let values_p: Vec<f64> = perm.drain(..).map(|i| values[i]).collect();
        let b = ErrorStats::from_values(&values_p).unwrap();
        assert_eq!(a.rmse, b.rmse);
        assert_eq!(a.median, b.median);
        assert_eq!(a.q1, b.q1);
        assert_eq!(a.q3, b.q3);
        assert_eq!(a.histogram, b.histogram);
    }

    #[test]
    fn compare_runs_mean_row() {
        let s1 = ErrorStats::from_values(&[1.0f64; 4]).unwrap();
        let s3 = ErrorStats::from_values(&[3.0f64; 4]).unwrap();

        // single run: the mean row equals the run itself
        let single = compare_runs(&[("a".to_string(), s1.clone())]).unwrap();
        assert_eq!(single.mean_row.rmse, 1.0);
        assert_eq!(single.mean_row, single.rows[0].1);

        // rmse 1.0 and 3.0 average to 2.0
        let two = compare_runs(&[("a".to_string(), s1), ("b".to_string(), s3)]).unwrap();
        assert_eq!(two.mean_row.rmse, 2.0);

        // three seeded runs against an independent recomputation
        let mut rng = ChaCha8Rng::seed_from_u64(404);
        let runs: Vec<(String, ErrorStats<f64>)> = (0..3)
            .map(|i| {
                let vals: Vec<f64> = (0..100)
                    .map(|_| {
                        let v: f64 = StandardNormal.sample(&mut rng);
                        v.abs()
                    })
                    .collect();
                (format!("run{i}"), ErrorStats::from_values(&vals).unwrap())
            })
            .collect();
        let table = compare_runs(&runs).unwrap();
        let expect_rmse: f64 = runs.iter().map(|(_, s)| s.rmse).sum::<f64>() / 3.0;
        let expect_max: f64 = runs.iter().map(|(_, s)| s.max).sum::<f64>() / 3.0;
        assert_abs_diff_eq!(table.mean_row.rmse, expect_rmse, epsilon = 1e-15);
        assert_abs_diff_eq!(table.mean_row.max, expect_max, epsilon = 1e-15);
    }

    #[test]
    fn empty_inputs_rejected() {
        assert!(ErrorStats::<f64>::from_values(&[]).is_err());
        assert!(compare_runs::<f64>(&[]).is_err());
    }
}
