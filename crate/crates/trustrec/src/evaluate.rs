//! Cold-start evaluation: the train/test split, ranking metrics, the
//! per-configuration experiment runner, and the sweep grid.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::graph::{degree_vector, Convention, DegreeMode, TrustGraph};
use crate::katz::{
    build_similarity_from_raw, katz_truncated, KatzConfig, RowNorm, SimilarityMatrix,
};
use crate::par;
use crate::ratings::RatingsTable;
use crate::recommend::{
    baseline_most_popular, baseline_trust_explicit, most_popular_for_user, recommend_for_user,
    recommend_top_n, score_items, JaccardIndex, JaccardScratch, RankedRecommendations,
    DEFAULT_NEIGHBORS, DEFAULT_TOP_N,
};

/// Users with at most this many ratings are held out for testing.
pub const DEFAULT_COLD_THRESHOLD: usize = 10;
/// Metrics are reported at list cutoffs 1 through this value.
pub const METRIC_KS: usize = 10;

/// Train/test partition built around sparsely rating ("cold") users.
///
/// Every user with `1..=threshold` ratings contributes *all* of them to the
/// test side and none to training; everyone else keeps their ratings in the
/// training table. Users without ratings sit on neither side.
#[derive(Debug, Clone)]
pub struct ColdStartSplit {
    cold_users: Vec<u32>,
    train: RatingsTable,
    test: Vec<Vec<u32>>,
    threshold: usize,
}

impl ColdStartSplit {
    /// Cold user ids, ascending.
    pub fn cold_users(&self) -> &[u32] {
        &self.cold_users
    }

    pub fn train(&self) -> &RatingsTable {
        &self.train
    }

    /// Held-out item ids of the `idx`-th cold user, ascending.
    pub fn test_items(&self, idx: usize) -> &[u32] {
        &self.test[idx]
    }

    pub fn threshold(&self) -> usize {
        self.threshold
    }

    pub fn n_cold(&self) -> usize {
        self.cold_users.len()
    }

    /// `(cold user, held-out items)` pairs in ascending user order.
    pub fn iter(&self) -> impl Iterator<Item = (u32, &[u32])> {
        self.cold_users
            .iter()
            .copied()
            .zip(self.test.iter().map(Vec::as_slice))
    }
}

/// Partitions the ratings around the cold-start threshold.
pub fn cold_start_split(ratings: &RatingsTable, threshold: usize) -> Result<ColdStartSplit> {
    if threshold < 1 {
        return Err(Error::Config(
            "cold-start threshold must be at least 1".into(),
        ));
    }
    let mut cold_users = Vec::new();
    let mut test = Vec::new();
    for u in 0..ratings.n_users() as u32 {
        let count = ratings.count(u);
        if (1..=threshold).contains(&count) {
            cold_users.push(u);
            test.push(ratings.user_ratings(u).iter().map(|&(i, _)| i).collect());
        }
    }
    let train = ratings.filtered(|u| ratings.count(u) > threshold);
    Ok(ColdStartSplit {
        cold_users,
        train,
        test,
        threshold,
    })
}

fn discount(position: usize) -> f64 {
    1.0 / ((position + 1) as f64).log2()
}

fn hits_at_k(recommended: &[u32], relevant: &[u32], k: usize) -> usize {
    debug_assert!(
        relevant.windows(2).all(|w| w[0] < w[1]),
        "relevant must be sorted"
    );
    recommended
        .iter()
        .take(k)
        .filter(|item| relevant.binary_search(item).is_ok())
        .count()
}

/// Binary-relevance normalized discounted cumulative gain at cutoff `k`.
///
/// Gain at position `p` is `1/log2(p+1)` for a relevant item, 0 otherwise;
/// the normalizer is the gain of packing relevant items into the top
/// `min(k, |relevant|)` positions. Empty `relevant` scores 0.
pub fn ndcg_at_k(recommended: &[u32], relevant: &[u32], k: usize) -> f64 {
    debug_assert!(k >= 1);
    if relevant.is_empty() {
        return 0.0;
    }
    let mut dcg = 0.0;
    for (idx, item) in recommended.iter().take(k).enumerate() {
        if relevant.binary_search(item).is_ok() {
            dcg += discount(idx + 1);
        }
    }
    let mut idcg = 0.0;
    for p in 1..=k.min(relevant.len()) {
        idcg += discount(p);
    }
    dcg / idcg
}

/// Fraction of the top `k` positions holding a held-out item. The
/// denominator is `k` even when fewer items were recommendable.
pub fn precision_at_k(recommended: &[u32], relevant: &[u32], k: usize) -> f64 {
    debug_assert!(k >= 1);
    hits_at_k(recommended, relevant, k) as f64 / k as f64
}

/// Fraction of the held-out items appearing in the top `k`. Zero when
/// `relevant` is empty (callers skip such users).
pub fn recall_at_k(recommended: &[u32], relevant: &[u32], k: usize) -> f64 {
    debug_assert!(k >= 1);
    if relevant.is_empty() {
        return 0.0;
    }
    hits_at_k(recommended, relevant, k) as f64 / relevant.len() as f64
}

/// One row of the comparison grid: a propagated-similarity configuration or
/// one of the three baselines.
#[derive(Debug, Clone, PartialEq)]
pub enum ExperimentConfig {
    Katz(KatzConfig),
    MostPopular,
    TrustExplicit,
    TrustJaccard { trusted_sets: bool },
}

impl ExperimentConfig {
    pub fn label(&self) -> String {
        match self {
            ExperimentConfig::Katz(c) => c.label(),
            ExperimentConfig::MostPopular => "MP".into(),
            ExperimentConfig::TrustExplicit => "Trust_exp".into(),
            ExperimentConfig::TrustJaccard { .. } => "Trust_jac".into(),
        }
    }

    /// Inverse of [`ExperimentConfig::label`]. `KS_*` labels decode to a
    /// configuration with default alpha and convention; callers override
    /// those afterwards.
    pub fn parse_label(label: &str) -> Result<ExperimentConfig> {
        match label {
            "MP" => Ok(ExperimentConfig::MostPopular),
            "Trust_exp" => Ok(ExperimentConfig::TrustExplicit),
            "Trust_jac" => Ok(ExperimentConfig::TrustJaccard { trusted_sets: true }),
            other => Ok(ExperimentConfig::Katz(KatzConfig::parse_label(other)?)),
        }
    }
}

/// Shared knobs of one evaluation run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSettings {
    /// Neighborhood size for similarity-based recommenders.
    pub k_neighbors: usize,
    /// Recommendation list length.
    pub top_n: usize,
    /// Optional floor on neighbor ratings that may contribute to scores.
    pub min_rating: Option<f64>,
}

impl Default for ExperimentSettings {
    fn default() -> Self {
        ExperimentSettings {
            k_neighbors: DEFAULT_NEIGHBORS,
            top_n: DEFAULT_TOP_N,
            min_rating: None,
        }
    }
}

/// Averaged metrics of one configuration over all evaluated cold users.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    label: String,
    ndcg: [f64; METRIC_KS],
    precision: [f64; METRIC_KS],
    recall: [f64; METRIC_KS],
    evaluated_users: usize,
    empty_lists: usize,
    skipped_users: usize,
}

impl MetricsReport {
    pub fn label(&self) -> &str {
        &self.label
    }

    /// Averaged nDCG at cutoff `k` (1-based, `k <= METRIC_KS`).
    pub fn ndcg_at(&self, k: usize) -> f64 {
        self.ndcg[k - 1]
    }

    pub fn precision_at(&self, k: usize) -> f64 {
        self.precision[k - 1]
    }

    pub fn recall_at(&self, k: usize) -> f64 {
        self.recall[k - 1]
    }

    /// Users that entered the averages.
    pub fn evaluated_users(&self) -> usize {
        self.evaluated_users
    }

    /// Evaluated users whose recommendation list came back empty; they
    /// score zero everywhere and stay in the averages.
    pub fn empty_lists(&self) -> usize {
        self.empty_lists
    }

    /// Users dropped for having an empty held-out set.
    pub fn skipped_users(&self) -> usize {
        self.skipped_users
    }
}

/// Builds ranked lists for every cold user under one configuration.
///
/// Per-user work is independent and fans out across the thread pool; results
/// come back in ascending cold-user order, so the output is identical no
/// matter how many threads run.
pub fn recommend_for_split(
    graph: &TrustGraph,
    split: &ColdStartSplit,
    config: &ExperimentConfig,
    settings: &ExperimentSettings,
) -> Result<Vec<RankedRecommendations>> {
    let raw = match config {
        ExperimentConfig::Katz(c) => Some(katz_truncated(graph.adjacency(), c.alpha, c.k_max)?),
        _ => None,
    };
    recommend_with_raw(graph, split, config, settings, raw.as_ref())
}

fn recommend_with_raw(
    graph: &TrustGraph,
    split: &ColdStartSplit,
    config: &ExperimentConfig,
    settings: &ExperimentSettings,
    raw: Option<&SimilarityMatrix>,
) -> Result<Vec<RankedRecommendations>> {
    let train = split.train();
    let n_cold = split.n_cold();
    match config {
        ExperimentConfig::Katz(c) => {
            let degrees = c.degree_norm.map(|mode| degree_vector(graph, mode));
            let raw = raw.expect("propagation arm always receives the raw series");
            let sigma = build_similarity_from_raw(graph, raw, degrees.as_ref(), c)?;
            Ok(par::map_ordered(n_cold, |idx| {
                recommend_for_user(
                    &sigma,
                    split.cold_users()[idx],
                    train,
                    settings.k_neighbors,
                    settings.top_n,
                    settings.min_rating,
                )
            }))
        }
        ExperimentConfig::TrustExplicit => {
            let sigma = baseline_trust_explicit(graph);
            Ok(par::map_ordered(n_cold, |idx| {
                recommend_for_user(
                    &sigma,
                    split.cold_users()[idx],
                    train,
                    settings.k_neighbors,
                    settings.top_n,
                    settings.min_rating,
                )
            }))
        }
        ExperimentConfig::TrustJaccard { trusted_sets } => {
            let index = JaccardIndex::new(graph, *trusted_sets);
            Ok(par::map_ordered_init(
                n_cold,
                || JaccardScratch::new(graph.n_users()),
                |scratch, idx| {
                    let target = split.cold_users()[idx];
                    let neighbors = index.neighbors(target, settings.k_neighbors, scratch);
                    let scores = score_items(&neighbors, train, settings.min_rating);
                    recommend_top_n(target, &scores, settings.top_n)
                },
            ))
        }
        ExperimentConfig::MostPopular => {
            let ranking = baseline_most_popular(train);
            Ok(par::map_ordered(n_cold, |idx| {
                most_popular_for_user(&ranking, split.cold_users()[idx], train, settings.top_n)
            }))
        }
    }
}

/// Averages the three metrics at every cutoff over the evaluated users.
///
/// `recommendations` must align with the split's cold users. Users with an
/// empty held-out set are skipped; users with an empty recommendation list
/// contribute zeros and are tallied separately. Per-user values are summed
/// in ascending user order, so the averages are bit-reproducible.
pub fn aggregate_metrics(
    label: String,
    recommendations: &[RankedRecommendations],
    split: &ColdStartSplit,
) -> MetricsReport {
    assert_eq!(
        recommendations.len(),
        split.n_cold(),
        "one recommendation list per cold user"
    );
    let mut ndcg = [0.0; METRIC_KS];
    let mut precision = [0.0; METRIC_KS];
    let mut recall = [0.0; METRIC_KS];
    let mut evaluated_users = 0;
    let mut empty_lists = 0;
    let mut skipped_users = 0;
    for (idx, recs) in recommendations.iter().enumerate() {
        let relevant = split.test_items(idx);
        if relevant.is_empty() {
            skipped_users += 1;
            continue;
        }
        evaluated_users += 1;
        if recs.is_empty() {
            empty_lists += 1;
            continue; // zeros everywhere; sums unchanged
        }
        let ids = recs.item_ids();
        for k in 1..=METRIC_KS {
            ndcg[k - 1] += ndcg_at_k(&ids, relevant, k);
            precision[k - 1] += precision_at_k(&ids, relevant, k);
            recall[k - 1] += recall_at_k(&ids, relevant, k);
        }
    }
    if evaluated_users > 0 {
        let n = evaluated_users as f64;
        for k in 0..METRIC_KS {
            ndcg[k] /= n;
            precision[k] /= n;
            recall[k] /= n;
        }
    }
    MetricsReport {
        label,
        ndcg,
        precision,
        recall,
        evaluated_users,
        empty_lists,
        skipped_users,
    }
}

/// Recommends and aggregates for one configuration.
pub fn evaluate_config(
    graph: &TrustGraph,
    split: &ColdStartSplit,
    config: &ExperimentConfig,
    settings: &ExperimentSettings,
) -> Result<MetricsReport> {
    let recs = recommend_for_split(graph, split, config, settings)?;
    Ok(aggregate_metrics(config.label(), &recs, split))
}

/// Runs every configuration against the split, isolating per-configuration
/// failures so one bad row cannot sink the rest of the run.
///
/// Configurations sharing `(alpha, k_max)` reuse one truncated series.
/// Duplicate labels are evaluated once. Errors if the split holds no cold
/// users, since there is nothing to evaluate.
pub fn run_experiment(
    graph: &TrustGraph,
    split: &ColdStartSplit,
    configs: &[ExperimentConfig],
    settings: &ExperimentSettings,
) -> Result<Vec<(String, Result<MetricsReport>)>> {
    if split.n_cold() == 0 {
        return Err(Error::EmptySplit(format!(
            "no user has 1..={} ratings; every rating landed in training",
            split.threshold()
        )));
    }
    let mut raw_cache: HashMap<(u64, usize), SimilarityMatrix> = HashMap::new();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for config in configs {
        let label = config.label();
        if !seen.insert(label.clone()) {
            continue;
        }
        let outcome = run_one(graph, split, config, settings, &mut raw_cache)
            .map(|recs| aggregate_metrics(label.clone(), &recs, split));
        out.push((label, outcome));
    }
    Ok(out)
}

fn run_one(
    graph: &TrustGraph,
    split: &ColdStartSplit,
    config: &ExperimentConfig,
    settings: &ExperimentSettings,
    raw_cache: &mut HashMap<(u64, usize), SimilarityMatrix>,
) -> Result<Vec<RankedRecommendations>> {
    let raw = match config {
        ExperimentConfig::Katz(c) => {
            let key = (c.alpha.to_bits(), c.k_max);
            if let std::collections::hash_map::Entry::Vacant(slot) = raw_cache.entry(key) {
                slot.insert(katz_truncated(graph.adjacency(), c.alpha, c.k_max)?);
            }
            Some(&raw_cache[&key])
        }
        _ => None,
    };
    recommend_with_raw(graph, split, config, settings, raw)
}

/// The full comparison grid: the three baselines followed by every valid
/// combination of steps — `k_max` 1 or 2, degree normalization off/in/
/// combined, row normalization off/l1/l2/max, boost off/on — filtered by the
/// configuration invariants (boost needs `k_max = 2` and a row norm).
pub fn sweep_configs(alpha: f64, convention: Convention) -> Vec<ExperimentConfig> {
    let mut out = vec![
        ExperimentConfig::MostPopular,
        ExperimentConfig::TrustExplicit,
        ExperimentConfig::TrustJaccard { trusted_sets: true },
    ];
    let mut seen = HashSet::new();
    for k_max in [1usize, 2] {
        for degree_norm in [None, Some(DegreeMode::In), Some(DegreeMode::Combined)] {
            for row_norm in [
                None,
                Some(RowNorm::L1),
                Some(RowNorm::L2),
                Some(RowNorm::Max),
            ] {
                for boost in [false, true] {
                    let config = KatzConfig {
                        alpha,
                        k_max,
                        degree_norm,
                        row_norm,
                        boost,
                        convention,
                        ..KatzConfig::default()
                    };
                    if config.validate().is_err() {
                        continue;
                    }
                    if seen.insert(config.label()) {
                        out.push(ExperimentConfig::Katz(config));
                    }
                }
            }
        }
    }
    out
}
