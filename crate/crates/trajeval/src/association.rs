//! Timestamp association between an estimated and a reference trajectory.
//!
//! Produces the correspondence pairs consumed by alignment and metrics.
//! Matching is greedy by smallest time gap: near-optimal on monotone time
//! series, linearithmic, and deterministic.

use crate::error::{Error, Result};
use crate::parsers::Trajectory;
use crate::scalar::Real;

/// Matching controls. `offset` is added to estimate timestamps before
/// comparison; `pair_by_index` pairs `i <-> i` ignoring timestamps (useful
/// for KITTI-vs-KITTI, where stamps are synthetic anyway).
#[derive(Debug, Clone, Copy)]
pub struct AssociationParams {
    pub max_diff: f64,
    pub offset: f64,
    pub pair_by_index: bool,
}

impl Default for AssociationParams {
    fn default() -> Self {
        Self {
            max_diff: 0.02,
            offset: 0.0,
            pair_by_index: false,
        }
    }
}

/// Injective pairing `(ref_index, est_index)`, sorted by reference
/// timestamp, plus the number of poses left unmatched on each side.
#[derive(Debug, Clone)]
pub struct Correspondences {
    pairs: Vec<(usize, usize)>,
    pub unmatched_ref: usize,
    pub unmatched_est: usize,
}

impl Correspondences {
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Matches estimate poses to reference poses.
///
/// Candidate pairs within `max_diff` are sorted by `|dt|` ascending and
/// accepted greedily while both endpoints are unused. Zero resulting pairs
/// signal a wrong offset or disjoint recordings.
pub fn associate<T: Real>(
    ref_traj: &Trajectory<T>,
    est_traj: &Trajectory<T>,
    params: &AssociationParams,
) -> Result<Correspondences> {
    if !(params.max_diff > 0.0) {
        return Err(Error::InvalidParams("max_diff must be positive".into()));
    }

    if params.pair_by_index {
        let n = ref_traj.len().min(est_traj.len());
        return Ok(Correspondences {
            pairs: (0..n).map(|i| (i, i)).collect(),
            unmatched_ref: ref_traj.len() - n,
            unmatched_est: est_traj.len() - n,
        });
    }

    let ref_ts: Vec<f64> = ref_traj.timestamps().collect();
    let est_ts: Vec<f64> = est_traj.timestamps().map(|t| t + params.offset).collect();

    // Sliding window: both stamp vectors are strictly increasing, so for
    // each reference index the candidate estimates form a contiguous range.
    let mut candidates: Vec<(f64, usize, usize)> = Vec::new();
    let mut lo = 0usize;
    for (i, &rt) in ref_ts.iter().enumerate() {
        while lo < est_ts.len() && est_ts[lo] < rt - params.max_diff {
            lo += 1;
        }
        let mut j = lo;
        while j < est_ts.len() && est_ts[j] <= rt + params.max_diff {
            candidates.push(((est_ts[j] - rt).abs(), i, j));
            j += 1;
        }
    }
    candidates.sort_unstable_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .expect("finite gaps")
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
    });

    let mut ref_used = vec![false; ref_ts.len()];
    let mut est_used = vec![false; est_ts.len()];
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for &(_, i, j) in &candidates {
        if !ref_used[i] && !est_used[j] {
            ref_used[i] = true;
            est_used[j] = true;
            pairs.push((i, j));
        }
    }
    if pairs.is_empty() {
        return Err(Error::NoOverlap);
    }
    pairs.sort_unstable_by_key(|&(i, _)| i);

    Ok(Correspondences {
        unmatched_ref: ref_ts.len() - pairs.len(),
        unmatched_est: est_ts.len() - pairs.len(),
        pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Pose;
    use crate::parsers::{StampedPose, TrajectoryFormat};
    use proptest::prelude::*;

    fn traj(stamps: &[f64]) -> Trajectory<f64> {
        let poses = stamps
            .iter()
            .map(|&t| StampedPose {
                timestamp: t,
                pose: Pose::identity(),
            })
            .collect();
        Trajectory::new(poses, TrajectoryFormat::Tum, "t").unwrap()
    }

    /// Exhaustive maximum bipartite matching by recursion; the oracle for
    /// greedy pair counts on small instances.
    fn max_matching_count(ref_ts: &[f64], est_ts: &[f64], max_diff: f64) -> usize {
        fn recurse(
            i: usize,
            ref_ts: &[f64],
            est_ts: &[f64],
            max_diff: f64,
            est_used: &mut Vec<bool>,
        ) -> usize {
            if i == ref_ts.len() {
                return 0;
            }
            // skip ref i
            let mut best = recurse(i + 1, ref_ts, est_ts, max_diff, est_used);
            for j in 0..est_ts.len() {
                if !est_used[j] && (ref_ts[i] - est_ts[j]).abs() <= max_diff {
                    est_used[j] = true;
                    best = best.max(1 + recurse(i + 1, ref_ts, est_ts, max_diff, est_used));
                    est_used[j] = false;
                }
            }
            best
        }
        recurse(0, ref_ts, est_ts, max_diff, &mut vec![false; est_ts.len()])
    }

    #[test]
    fn identical_stamp_sets_pair_fully() {
        let r = traj(&[0.0, 1.0, 2.0]);
        let e = traj(&[0.0, 1.0, 2.0]);
        let c = associate(&r, &e, &AssociationParams::default()).unwrap();
        assert_eq!(c.pairs(), &[(0, 0), (1, 1), (2, 2)]);
        assert_eq!(c.unmatched_ref, 0);
        assert_eq!(c.unmatched_est, 0);
    }

    #[test]
    fn disjoint_stamps_report_no_overlap() {
        let r = traj(&[0.0, 1.0]);
        let e = traj(&[0.5, 1.5]);
        let err = associate(&r, &e, &AssociationParams::default()).unwrap_err();
        assert!(matches!(err, Error::NoOverlap));
    }

    #[test]
    fn partial_overlap_matches_nearest() {
        let r = traj(&[0.0, 0.1, 0.2]);
        let e = traj(&[0.011, 0.095, 0.31]);
        let c = associate(&r, &e, &AssociationParams::default()).unwrap();
        assert_eq!(c.pairs(), &[(0, 0), (1, 1)]);
        assert_eq!(c.unmatched_ref, 1);
        assert_eq!(c.unmatched_est, 1);
        // agrees with the exhaustive oracle on pair count
        assert_eq!(
            max_matching_count(&[0.0, 0.1, 0.2], &[0.011, 0.095, 0.31], 0.02),
            2
        );
    }

    #[test]
    fn offset_shifts_the_window() {
        let r = traj(&[10.0, 10.1, 10.2]);
        let e = traj(&[0.001, 0.101, 0.199]);
        let params = AssociationParams {
            offset: 10.0,
            ..Default::default()
        };
        let c = associate(&r, &e, &params).unwrap();
        assert_eq!(c.len(), 3);
    }

    #[test]
    fn pair_by_index_ignores_timestamps() {
        let r = traj(&[0.0, 0.1, 0.2, 0.3]);
        let e = traj(&[100.0, 200.0]);
        let params = AssociationParams {
            pair_by_index: true,
            ..Default::default()
        };
        let c = associate(&r, &e, &params).unwrap();
        assert_eq!(c.pairs(), &[(0, 0), (1, 1)]);
        assert_eq!(c.unmatched_ref, 2);
        assert_eq!(c.unmatched_est, 0);
    }

    #[test]
    fn invalid_max_diff_rejected() {
        let r = traj(&[0.0]);
        let e = traj(&[0.0]);
        let params = AssociationParams {
            max_diff: 0.0,
            ..Default::default()
        };
        assert!(associate(&r, &e, &params).is_err());
    }

    #[test]
    fn greedy_matches_oracle_on_frame_grid_instances() {
        // Realistic frame timing: both sides live on a 10 Hz grid with
        // dropouts, the estimate jittered by less than max_diff, plus
        // far-off clutter. 500 seeded instances, <= 8 poses per side.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..500 {
            let slots = rng.random_range(1..=8usize);
            let mut ref_ts = Vec::new();
            let mut est_ts = Vec::new();
            for k in 0..slots {
                let base = k as f64 * 0.1;
                if rng.random_bool(0.8) {
                    ref_ts.push(base);
                }
                if rng.random_bool(0.8) && est_ts.len() < 8 {
                    est_ts.push(base + rng.random_range(-0.019..0.019));
                }
            }
            // clutter far outside every window
            while est_ts.len() < 8 && rng.random_bool(0.3) {
                est_ts.push(slots as f64 * 0.1 + 1.0 + est_ts.len() as f64);
            }
            est_ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            est_ts.dedup();
            if ref_ts.is_empty() || est_ts.is_empty() {
                continue;
            }
            if est_ts[0] < 0.0 {
                for t in &mut est_ts {
                    *t += 0.02;
                }
                for t in &mut ref_ts {
                    *t += 0.02;
                }
            }
            let oracle = max_matching_count(&ref_ts, &est_ts, 0.02);
            match associate(&traj(&ref_ts), &traj(&est_ts), &AssociationParams::default()) {
                Ok(c) => assert_eq!(c.len(), oracle, "ref {ref_ts:?} est {est_ts:?}"),
                Err(Error::NoOverlap) => assert_eq!(oracle, 0, "ref {ref_ts:?} est {est_ts:?}"),
                Err(e) => panic!("unexpected error {e}"),
            }
        }
    }

    proptest! {
        #[test]
        fn prop_offset_shift_is_neutral(
            base_offset in -5.0..5.0f64,
            shift in -3.0..3.0f64,
            jitter in proptest::collection::vec(-0.015..0.015f64, 1..8)
        ) {
            let ref_ts: Vec<f64> = (0..jitter.len()).map(|i| 10.0 + i as f64 * 0.1).collect();
            let est_raw: Vec<f64> = ref_ts
                .iter()
                .zip(&jitter)
                .map(|(t, j)| t + j - base_offset)
                .collect();
            let shifted: Vec<f64> = est_raw.iter().map(|t| t + shift).collect();

            let p1 = AssociationParams { offset: base_offset, ..Default::default() };
            let p2 = AssociationParams { offset: base_offset - shift, ..Default::default() };
            let c1 = associate(&traj(&ref_ts), &traj(&est_raw), &p1).unwrap();
            let c2 = associate(&traj(&ref_ts), &traj(&shifted), &p2).unwrap();
            prop_assert_eq!(c1.pairs(), c2.pairs());
        }

        #[test]
        fn prop_pairs_sorted_and_injective(
            ref_n in 1..8usize, est_n in 1..8usize, seed in 0u64..1000
        ) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut ref_ts: Vec<f64> = (0..ref_n).map(|_| rng.random_range(0.0..1.0)).collect();
            let mut est_ts: Vec<f64> = (0..est_n).map(|_| rng.random_range(0.0..1.0)).collect();
            ref_ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            ref_ts.dedup();
            est_ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            est_ts.dedup();
            let params = AssociationParams { max_diff: 0.3, ..Default::default() };
            if let Ok(c) = associate(&traj(&ref_ts), &traj(&est_ts), &params) {
                let mut seen_ref = std::collections::HashSet::new();
                let mut seen_est = std::collections::HashSet::new();
                let mut prev_ref = None;
                for &(i, j) in c.pairs() {
                    prop_assert!(seen_ref.insert(i));
                    prop_assert!(seen_est.insert(j));
                    prop_assert!((ref_ts[i] - est_ts[j]).abs() <= params.max_diff);
                    if let Some(p) = prev_ref {
                        prop_assert!(i > p);
                    }
                    prev_ref = Some(i);
                }
                prop_assert_eq!(c.unmatched_ref, ref_ts.len() - c.len());
                prop_assert_eq!(c.unmatched_est, est_ts.len() - c.len());
            }
        }
    }
}
