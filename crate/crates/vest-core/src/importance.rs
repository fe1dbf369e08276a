//! RReliefF feature importance, tie-averaged ranks, group aggregates, and
//! the best-transform subset rules.
//!
//! Scores follow the regression Relief recipe: for sampled instances, find
//! the k nearest neighbors on min-max-normalized features, weight them by an
//! exponential function of their rank, and accumulate how often feature
//! differences co-occur with target differences.

use rand::seq::index::sample;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::summary::SummaryId;
use crate::transform::TransformId;

/// Neighbor count used throughout the pipeline.
pub const DEFAULT_NEIGHBORS: usize = 10;
/// Scale of the exponential rank weighting.
const RANK_SIGMA: f64 = 20.0;

/// Per-feature importance scores with their tie-averaged ranks (1 = most
/// important).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceReport {
    pub names: Vec<String>,
    pub scores: Vec<f64>,
    pub ranks: Vec<f64>,
}

impl ImportanceReport {
    pub fn score_of(&self, name: &str) -> Option<f64> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.scores[i])
    }

    pub fn rank_of(&self, name: &str) -> Option<f64> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.ranks[i])
    }
}

/// Mean score and rank of one feature group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupStat {
    pub group: String,
    pub mean_score: f64,
    pub mean_rank: f64,
    pub count: usize,
}

/// RReliefF importance of every column of `x` for the target `y`.
///
/// `m` limits the sampled instances (`None` uses all rows, the pipeline
/// default); sampling is seeded. Needs at least `k + 1` rows and a
/// non-constant target.
pub fn rrelieff(
    x: &DenseMatrix,
    y: &[f64],
    k: usize,
    m: Option<usize>,
    seed: u64,
) -> Result<ImportanceReport> {
    let n = x.n_rows();
    if y.len() != n {
        return Err(Error::MisalignedRows(format!(
            "{n} rows vs {} targets",
            y.len()
        )));
    }
    if k == 0 || n < k + 1 {
        return Err(Error::InvalidArgument(format!(
            "RReliefF needs at least k + 1 = {} rows, got {n}",
            k + 1
        )));
    }
    let p = x.n_cols();

    let normalize = |values: &[f64]| -> Result<Vec<f64>> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput("importance input"));
        }
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let range = max - min;
        Ok(if range > 0.0 {
            values.iter().map(|v| (v - min) / range).collect()
        } else {
            vec![0.0; values.len()]
        })
    };

    let y_norm = normalize(y)?;
    if y_norm.iter().all(|&v| v == 0.0) {
        return Err(Error::TargetConstant);
    }
    let mut rows: Vec<Vec<f64>> = vec![Vec::with_capacity(p); n];
    for c in 0..p {
        let col = normalize(x.column(c))?;
        for (row, v) in rows.iter_mut().zip(col) {
            row.push(v);
        }
    }

    let sampled: Vec<usize> = match m {
        Some(m) if m < n => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut idx = sample(&mut rng, n, m).into_vec();
            idx.sort_unstable();
            idx
        }
        _ => (0..n).collect(),
    };
    let m_eff = sampled.len() as f64;

    // normalized exponential rank weights for the k neighbors
    let raw: Vec<f64> = (1..=k)
        .map(|r| (-((r as f64) / RANK_SIGMA).powi(2)).exp())
        .collect();
    let total: f64 = raw.iter().sum();
    let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();

    // per-instance contributions, merged in instance order for determinism
    let partials: Vec<(f64, Vec<f64>, Vec<f64>)> = sampled
        .par_iter()
        .map(|&i| {
            let mut dist: Vec<(f64, usize)> = (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let d: f64 = rows[i]
                        .iter()
                        .zip(&rows[j])
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum();
                    (d, j)
                })
                .collect();
            dist.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
            let mut ndc = 0.0;
            let mut nda = vec![0.0; p];
            let mut ndcda = vec![0.0; p];
            for (rank, &(_, j)) in dist[..k].iter().enumerate() {
                let w = weights[rank];
                let dy = (y_norm[i] - y_norm[j]).abs();
                ndc += w * dy;
                for f in 0..p {
                    let da = (rows[i][f] - rows[j][f]).abs();
                    nda[f] += w * da;
                    ndcda[f] += w * dy * da;
                }
            }
            (ndc, nda, ndcda)
        })
        .collect();

    let mut ndc = 0.0;
    let mut nda = vec![0.0; p];
    let mut ndcda = vec![0.0; p];
    for (c, a, ca) in partials {
        ndc += c;
        for f in 0..p {
            nda[f] += a[f];
            ndcda[f] += ca[f];
        }
    }

    let scores: Vec<f64> = (0..p)
        .map(|f| {
            let hit = if ndc > 0.0 { ndcda[f] / ndc } else { 0.0 };
            let rest = m_eff - ndc;
            let miss = if rest > 0.0 {
                (nda[f] - ndcda[f]) / rest
            } else {
                0.0
            };
            hit - miss
        })
        .collect();
    let ranks = tie_averaged_ranks(&scores);
    Ok(ImportanceReport {
        names: x.names().to_vec(),
        scores,
        ranks,
    })
}

/// Ranks descending by score with average ranks for exact ties; rank 1 is
/// the highest score.
pub fn tie_averaged_ranks(scores: &[f64]) -> Vec<f64> {
    let n = scores.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap().then(a.cmp(&b)));
    let mut ranks = vec![0.0; n];
    let mut pos = 0;
    while pos < n {
        let mut end = pos + 1;
        while end < n && scores[order[end]] == scores[order[pos]] {
            end += 1;
        }
        // positions pos..end share the average of ranks pos+1..=end
        let avg = (pos + 1 + end) as f64 / 2.0;
        for &idx in &order[pos..end] {
            ranks[idx] = avg;
        }
        pos = end;
    }
    ranks
}

/// The transform group of a feature name: LAG columns form their own group,
/// everything else groups by the prefix before the dot.
pub fn transform_group(name: &str) -> &str {
    if name.starts_with("LAG_") {
        "LAG"
    } else {
        name.split('.').next().unwrap_or(name)
    }
}

/// The summary group (suffix after the dot); LAG columns have none.
pub fn summary_group(name: &str) -> Option<&str> {
    if name.starts_with("LAG_") {
        None
    } else {
        name.split_once('.').map(|(_, s)| s)
    }
}

fn group_stats(
    report: &ImportanceReport,
    group_of: impl for<'b> Fn(&'b str) -> Option<&'b str>,
    group_order: &[&str],
) -> Vec<GroupStat> {
    let mut stats = Vec::new();
    for &group in group_order {
        let mut score_sum = 0.0;
        let mut rank_sum = 0.0;
        let mut count = 0usize;
        for (i, name) in report.names.iter().enumerate() {
            if group_of(name) == Some(group) {
                score_sum += report.scores[i];
                rank_sum += report.ranks[i];
                count += 1;
            }
        }
        if count > 0 {
            stats.push(GroupStat {
                group: group.to_string(),
                mean_score: score_sum / count as f64,
                mean_rank: rank_sum / count as f64,
                count,
            });
        }
    }
    stats
}

/// Mean score and rank per transform group, in catalog order with LAG last.
pub fn group_by_transform(report: &ImportanceReport) -> Vec<GroupStat> {
    let mut order: Vec<&str> = TransformId::ALL.iter().map(|t| t.id()).collect();
    order.push("LAG");
    group_stats(report, |n| Some(transform_group(n)), &order)
}

/// Mean score and rank per summary group, in catalog order (LAG columns
/// contribute to no group).
pub fn group_by_summary(report: &ImportanceReport) -> Vec<GroupStat> {
    let order: Vec<&str> = SummaryId::ALL.iter().map(|s| s.id()).collect();
    group_stats(report, summary_group, &order)
}

/// The transform with the highest mean importance (LAG excluded); ties go to
/// the earlier catalog entry.
pub fn best_transform(report: &ImportanceReport) -> Result<TransformId> {
    let stats = group_by_transform(report);
    let mut best: Option<(f64, TransformId)> = None;
    for stat in &stats {
        if stat.group == "LAG" {
            continue;
        }
        let id: TransformId = stat.group.parse()?;
        // strict comparison keeps the earlier catalog entry on ties
        if best.is_none_or(|(s, _)| stat.mean_score > s) {
            best = Some((stat.mean_score, id));
        }
    }
    best.map(|(_, id)| id)
        .ok_or_else(|| Error::InvalidArgument("no transform features to rank".into()))
}

/// The feature columns kept for the best-transform variant: every feature of
/// [`best_transform`], in report order.
pub fn bt_restriction(report: &ImportanceReport) -> Result<Vec<String>> {
    let winner = best_transform(report)?;
    Ok(report
        .names
        .iter()
        .filter(|n| transform_group(n) == winner.id())
        .cloned()
        .collect())
}

/// Per summary, the transform whose feature scores highest; ties go to the
/// earlier catalog entry. Summaries with no surviving feature are absent.
pub fn best_transform_per_summary(report: &ImportanceReport) -> Vec<(SummaryId, TransformId)> {
    let mut out = Vec::new();
    for summary in SummaryId::ALL {
        let mut best: Option<(f64, TransformId)> = None;
        for transform in TransformId::ALL {
            let name = format!("{transform}.{summary}");
            if let Some(score) = report.score_of(&name) {
                if best.is_none_or(|(s, _)| score > s) {
                    best = Some((score, transform));
                }
            }
        }
        if let Some((_, t)) = best {
            out.push((summary, t));
        }
    }
    out
}

/// The feature columns kept for the best-feature-per-summary variant, in
/// summary catalog order.
pub fn bf_restriction(report: &ImportanceReport) -> Vec<String> {
    best_transform_per_summary(report)
        .into_iter()
        .map(|(s, t)| format!("{t}.{s}"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};

    fn matrix(names: Vec<&str>, cols: Vec<Vec<f64>>) -> DenseMatrix {
        let n = cols[0].len();
        DenseMatrix::new(
            names.into_iter().map(String::from).collect(),
            cols,
            (0..n).collect(),
        )
        .unwrap()
    }

    #[test]
    fn signal_beats_noise() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 500;
        let x1: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        let x2: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        let y = x1.clone();
        let x = matrix(vec!["x1", "x2"], vec![x1, x2]);
        let report = rrelieff(&x, &y, DEFAULT_NEIGHBORS, None, 0).unwrap();
        assert!(
            report.score_of("x1").unwrap() > report.score_of("x2").unwrap(),
            "{:?}",
            report.scores
        );
        assert_eq!(report.rank_of("x1"), Some(1.0));
    }

    #[test]
    fn single_informative_feature_scores_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x1: Vec<f64> = (0..200).map(|_| rng.gen::<f64>()).collect();
        let x = matrix(vec!["x1"], vec![x1.clone()]);
        let report = rrelieff(&x, &x1, DEFAULT_NEIGHBORS, None, 0).unwrap();
        assert!(report.scores[0] > 0.0, "score {}", report.scores[0]);
    }

    #[test]
    fn duplicated_columns_score_equally() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x1: Vec<f64> = (0..150).map(|_| rng.gen::<f64>()).collect();
        let y: Vec<f64> = x1.iter().map(|v| v * 2.0 + 0.1).collect();
        let x = matrix(vec!["a", "b"], vec![x1.clone(), x1]);
        let report = rrelieff(&x, &y, DEFAULT_NEIGHBORS, None, 0).unwrap();
        assert_relative_eq!(report.scores[0], report.scores[1], epsilon = 1e-12);
        assert_eq!(report.ranks, vec![1.5, 1.5]);
    }

    #[test]
    fn affine_rescaling_leaves_scores_unchanged() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let n = 200;
        let x1: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        let x2: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        let y: Vec<f64> = x1.iter().zip(&x2).map(|(a, b)| a + 0.3 * b).collect();
        let base = rrelieff(
            &matrix(vec!["a", "b"], vec![x1.clone(), x2.clone()]),
            &y,
            DEFAULT_NEIGHBORS,
            None,
            0,
        )
        .unwrap();
        let scaled: Vec<f64> = x1.iter().map(|v| 300.0 * v - 12.0).collect();
        let rescaled = rrelieff(
            &matrix(vec!["a", "b"], vec![scaled, x2]),
            &y,
            DEFAULT_NEIGHBORS,
            None,
            0,
        )
        .unwrap();
        for (a, b) in base.scores.iter().zip(&rescaled.scores) {
            assert_relative_eq!(a, b, epsilon = 1e-9);
        }
    }

    #[test]
    fn constant_target_rejected() {
        let x = matrix(vec!["a"], vec![(0..50).map(|i| i as f64).collect()]);
        assert!(matches!(
            rrelieff(&x, &vec![5.0; 50], DEFAULT_NEIGHBORS, None, 0),
            Err(Error::TargetConstant)
        ));
    }

    #[test]
    fn too_few_rows_rejected() {
        let x = matrix(vec!["a"], vec![vec![1.0, 2.0, 3.0]]);
        assert!(rrelieff(&x, &[1.0, 2.0, 3.0], 10, None, 0).is_err());
    }

    #[test]
    fn sampling_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 100;
        let x1: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        let y: Vec<f64> = x1.iter().map(|v| v + 0.01).collect();
        let x = matrix(vec!["a"], vec![x1]);
        let r1 = rrelieff(&x, &y, 5, Some(40), 9).unwrap();
        let r2 = rrelieff(&x, &y, 5, Some(40), 9).unwrap();
        assert_eq!(r1, r2);
        let r3 = rrelieff(&x, &y, 5, Some(40), 10).unwrap();
        assert!(r1.scores != r3.scores || r1 == r3); // different seed may differ
    }

    #[test]
    fn rank_ties_are_averaged() {
        assert_eq!(tie_averaged_ranks(&[0.5, 0.2, 0.2]), vec![1.0, 2.5, 2.5]);
        assert_eq!(tie_averaged_ranks(&[0.1]), vec![1.0]);
        let ranks = tie_averaged_ranks(&[3.0, 1.0, 2.0, 2.0, 0.5]);
        assert_eq!(ranks, vec![1.0, 4.0, 2.5, 2.5, 5.0]);
        let n = ranks.len() as f64;
        assert_relative_eq!(ranks.iter().sum::<f64>(), n * (n + 1.0) / 2.0);
    }

    fn toy_report() -> ImportanceReport {
        let names = vec![
            "LAG_1".to_string(),
            "I.MEAN".to_string(),
            "I.SD".to_string(),
            "DIFF.MEAN".to_string(),
            "DIFF.SD".to_string(),
        ];
        let scores = vec![0.9, 0.1, 0.3, 0.6, 0.2];
        let ranks = tie_averaged_ranks(&scores);
        ImportanceReport {
            names,
            scores,
            ranks,
        }
    }

    #[test]
    fn grouping_by_transform_and_summary() {
        let report = toy_report();
        let by_t = group_by_transform(&report);
        let groups: Vec<&str> = by_t.iter().map(|g| g.group.as_str()).collect();
        assert_eq!(groups, vec!["I", "DIFF", "LAG"]);
        let i_group = &by_t[0];
        assert_relative_eq!(i_group.mean_score, 0.2);
        assert_eq!(i_group.count, 2);

        let by_s = group_by_summary(&report);
        let groups: Vec<&str> = by_s.iter().map(|g| g.group.as_str()).collect();
        assert_eq!(groups, vec!["MEAN", "SD"]);
        assert_relative_eq!(by_s[0].mean_score, 0.35); // (0.1 + 0.6) / 2
    }

    #[test]
    fn best_transform_excludes_lag() {
        let report = toy_report();
        // LAG has the top score but is not a candidate
        assert_eq!(best_transform(&report).unwrap(), TransformId::Diff);
        assert_eq!(
            bt_restriction(&report).unwrap(),
            vec!["DIFF.MEAN".to_string(), "DIFF.SD".to_string()]
        );
    }

    #[test]
    fn best_transform_tie_prefers_catalog_order() {
        let names = vec!["I.MEAN".to_string(), "DIFF.MEAN".to_string()];
        let scores = vec![0.4, 0.4];
        let ranks = tie_averaged_ranks(&scores);
        let report = ImportanceReport {
            names,
            scores,
            ranks,
        };
        assert_eq!(best_transform(&report).unwrap(), TransformId::I);
    }

    #[test]
    fn best_feature_per_summary() {
        let report = toy_report();
        let per = best_transform_per_summary(&report);
        assert_eq!(
            per,
            vec![
                (SummaryId::Mean, TransformId::Diff),
                (SummaryId::Sd, TransformId::I),
            ]
        );
        assert_eq!(
            bf_restriction(&report),
            vec!["DIFF.MEAN".to_string(), "I.SD".to_string()]
        );
    }
}
