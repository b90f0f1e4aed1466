//! Neighbor selection, item scoring, top-N ranking, and the three baseline
//! recommenders (global popularity, explicit trust, Jaccard trust overlap).

use crate::graph::TrustGraph;
use crate::katz::{Provenance, SimilarityMatrix};
use crate::ratings::RatingsTable;
use crate::sparse::SparseMatrix;

/// Neighborhood size used throughout the reference experiments.
pub const DEFAULT_NEIGHBORS: usize = 60;
/// Recommendation list length used throughout the reference experiments.
pub const DEFAULT_TOP_N: usize = 10;

/// The k most similar users of one target, similarity descending.
///
/// Never contains the target itself, never carries a non-positive
/// similarity, and ties are broken by ascending user id so the list is a
/// pure function of the similarity row.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborList {
    target: u32,
    neighbors: Vec<(u32, f64)>,
}

impl NeighborList {
    pub fn target(&self) -> u32 {
        self.target
    }

    /// `(user, similarity)` pairs, similarity descending, id-ascending ties.
    pub fn entries(&self) -> &[(u32, f64)] {
        &self.neighbors
    }

    pub fn len(&self) -> usize {
        self.neighbors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.neighbors.is_empty()
    }
}

/// Ranked item list for one target user, score descending.
///
/// Items the target rated in training never appear; scores are strictly
/// positive; ties are broken by ascending item id.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedRecommendations {
    target: u32,
    items: Vec<(u32, f64)>,
}

impl RankedRecommendations {
    pub fn target(&self) -> u32 {
        self.target
    }

    /// `(item, score)` pairs, score descending, id-ascending ties.
    pub fn items(&self) -> &[(u32, f64)] {
        &self.items
    }

    /// Item ids in rank order.
    pub fn item_ids(&self) -> Vec<u32> {
        self.items.iter().map(|&(i, _)| i).collect()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

/// Keeps the `k` strongest `(user, value)` pairs of one similarity row,
/// value descending with ascending-id ties, dropping the target itself and
/// anything non-positive.
pub fn top_k_neighbors<I>(target: u32, pairs: I, k_neighbors: usize) -> NeighborList
where
    I: IntoIterator<Item = (u32, f64)>,
{
    let mut neighbors: Vec<(u32, f64)> = pairs
        .into_iter()
        .filter(|&(u, v)| u != target && v > 0.0)
        .collect();
    neighbors.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    neighbors.truncate(k_neighbors);
    NeighborList { target, neighbors }
}

/// Top-`k_neighbors` entries of the target's similarity row.
///
/// The diagonal and explicit zeros are excluded; an empty row yields an
/// empty list rather than an error.
pub fn select_neighbors(sigma: &SimilarityMatrix, target: u32, k_neighbors: usize) -> NeighborList {
    let (cols, vals) = sigma.matrix().row(target as usize);
    top_k_neighbors(
        target,
        cols.iter().zip(vals).map(|(&c, &v)| (c, v)),
        k_neighbors,
    )
}

/// Scores every item some neighbor rated in training and the target did not:
/// `score(i) = sum of sim(target, v) over neighbors v who rated i`.
///
/// `min_rating` optionally restricts which neighbor ratings count; `None`
/// (the default behavior) counts every rating regardless of value. Returned
/// pairs are sorted by item id; per-item sums accumulate in neighbor-list
/// order, so the result is reproducible bit for bit.
pub fn score_items(
    neighbors: &NeighborList,
    train: &RatingsTable,
    min_rating: Option<f64>,
) -> Vec<(u32, f64)> {
    let own = train.user_ratings(neighbors.target());
    let rated_by_target = |item: u32| own.binary_search_by_key(&item, |&(i, _)| i).is_ok();
    let mut scores: std::collections::HashMap<u32, f64> = std::collections::HashMap::new();
    for &(v, sim) in neighbors.entries() {
        for &(item, rating) in train.user_ratings(v) {
            if let Some(min) = min_rating {
                if rating < min {
                    continue;
                }
            }
            if rated_by_target(item) {
                continue;
            }
            *scores.entry(item).or_insert(0.0) += sim;
        }
    }
    let mut out: Vec<(u32, f64)> = scores.into_iter().collect();
    out.sort_unstable_by_key(|&(i, _)| i);
    out
}

/// Top-`n` scored items, score descending with ascending-id ties.
pub fn recommend_top_n(target: u32, scores: &[(u32, f64)], n: usize) -> RankedRecommendations {
    let mut items: Vec<(u32, f64)> = scores.iter().copied().filter(|&(_, s)| s > 0.0).collect();
    items.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    items.truncate(n);
    RankedRecommendations { target, items }
}

/// Full per-user path: select neighbors, score their items, rank the top `n`.
pub fn recommend_for_user(
    sigma: &SimilarityMatrix,
    target: u32,
    train: &RatingsTable,
    k_neighbors: usize,
    n: usize,
    min_rating: Option<f64>,
) -> RankedRecommendations {
    let neighbors = select_neighbors(sigma, target, k_neighbors);
    let scores = score_items(&neighbors, train, min_rating);
    recommend_top_n(target, &scores, n)
}

/// Global item ranking by training rating count, count descending with
/// ascending-id ties. Items nobody rated do not appear.
pub fn baseline_most_popular(train: &RatingsTable) -> Vec<(u32, usize)> {
    let mut counts = vec![0usize; train.n_items()];
    for u in 0..train.n_users() as u32 {
        for &(item, _) in train.user_ratings(u) {
            counts[item as usize] += 1;
        }
    }
    let mut ranking: Vec<(u32, usize)> = counts
        .into_iter()
        .enumerate()
        .filter(|&(_, c)| c > 0)
        .map(|(i, c)| (i as u32, c))
        .collect();
    ranking.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    ranking
}

/// Serves the global popularity ranking to one user, minus the items that
/// user rated in training. Scores are the raw training counts.
pub fn most_popular_for_user(
    ranking: &[(u32, usize)],
    target: u32,
    train: &RatingsTable,
    n: usize,
) -> RankedRecommendations {
    let own = train.user_ratings(target);
    let rated = |item: u32| own.binary_search_by_key(&item, |&(i, _)| i).is_ok();
    let items: Vec<(u32, f64)> = ranking
        .iter()
        .filter(|&&(item, _)| !rated(item))
        .take(n)
        .map(|&(item, count)| (item, count as f64))
        .collect();
    RankedRecommendations { target, items }
}

/// Uses the raw adjacency matrix as the similarity matrix: everyone a user
/// is connected to is equally similar (value 1), so ranking among them falls
/// entirely to the ascending-id tie-break.
pub fn baseline_trust_explicit(graph: &TrustGraph) -> SimilarityMatrix {
    SimilarityMatrix::new(
        graph.adjacency().clone(),
        Provenance::TrustExplicit {
            convention: graph.convention(),
        },
    )
}

/// Per-user neighbor sets and an inverted index for computing Jaccard
/// overlap rows on demand, without materializing the full user-user matrix.
///
/// With `trusted_sets` (the default orientation) the set of user `u` is the
/// users `u` trusts; the flag flipped compares who-trusts-`u` sets instead.
/// Overlaps are integer counts, so the resulting similarities are exact and
/// identical no matter how the rows are scheduled.
#[derive(Debug, Clone)]
pub struct JaccardIndex {
    sets: Vec<Vec<u32>>,
    inverted: Vec<Vec<u32>>,
    trusted_sets: bool,
}

/// Reusable per-thread accumulator for [`JaccardIndex::row`].
#[derive(Debug, Clone)]
pub struct JaccardScratch {
    counts: Vec<u32>,
    touched: Vec<u32>,
}

impl JaccardScratch {
    pub fn new(n_users: usize) -> Self {
        JaccardScratch {
            counts: vec![0; n_users],
            touched: Vec::new(),
        }
    }
}

impl JaccardIndex {
    pub fn new(graph: &TrustGraph, trusted_sets: bool) -> Self {
        let n = graph.n_users();
        let mut sets: Vec<Vec<u32>> = vec![Vec::new(); n];
        for &(truster, trustee) in graph.edges() {
            if trusted_sets {
                sets[truster as usize].push(trustee);
            } else {
                sets[trustee as usize].push(truster);
            }
        }
        for s in &mut sets {
            s.sort_unstable();
        }
        let mut inverted: Vec<Vec<u32>> = vec![Vec::new(); n];
        for (u, s) in sets.iter().enumerate() {
            for &w in s {
                inverted[w as usize].push(u as u32);
            }
        }
        JaccardIndex {
            sets,
            inverted,
            trusted_sets,
        }
    }

    pub fn n_users(&self) -> usize {
        self.sets.len()
    }

    pub fn trusted_sets(&self) -> bool {
        self.trusted_sets
    }

    /// All nonzero `(user, overlap)` pairs of one row, user-id ascending:
    /// `overlap(u, v) = |S_u ∩ S_v| / |S_u ∪ S_v|`. The diagonal is included
    /// (1 whenever the set is nonempty); neighbor selection drops it.
    pub fn row(&self, u: u32, scratch: &mut JaccardScratch) -> Vec<(u32, f64)> {
        let set_u = &self.sets[u as usize];
        for &w in set_u {
            for &v in &self.inverted[w as usize] {
                if scratch.counts[v as usize] == 0 {
                    scratch.touched.push(v);
                }
                scratch.counts[v as usize] += 1;
            }
        }
        scratch.touched.sort_unstable();
        let mut out = Vec::with_capacity(scratch.touched.len());
        for &v in &scratch.touched {
            let inter = scratch.counts[v as usize];
            let union = set_u.len() as u32 + self.sets[v as usize].len() as u32 - inter;
            out.push((v, f64::from(inter) / f64::from(union)));
            scratch.counts[v as usize] = 0;
        }
        scratch.touched.clear();
        out
    }

    /// Top-k neighbors of one user straight from the overlap row.
    pub fn neighbors(
        &self,
        target: u32,
        k_neighbors: usize,
        scratch: &mut JaccardScratch,
    ) -> NeighborList {
        top_k_neighbors(target, self.row(target, scratch), k_neighbors)
    }
}

/// Materializes the full Jaccard overlap matrix. Quadratic in the worst
/// case — meant for small graphs and file dumps; evaluation at scale walks
/// [`JaccardIndex`] rows instead.
pub fn baseline_trust_jaccard(
    graph: &TrustGraph,
    trusted_sets: bool,
) -> crate::error::Result<SimilarityMatrix> {
    let index = JaccardIndex::new(graph, trusted_sets);
    let n = graph.n_users();
    let mut scratch = JaccardScratch::new(n);
    let mut triplets = Vec::new();
    for u in 0..n as u32 {
        for (v, sim) in index.row(u, &mut scratch) {
            triplets.push((u, v, sim));
        }
    }
    let matrix = SparseMatrix::from_triplets(n, n, triplets)?;
    Ok(SimilarityMatrix::new(
        matrix,
        Provenance::TrustJaccard { trusted_sets },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_trust_graph, Convention};
    use crate::katz::KatzConfig;
    use proptest::prelude::*;

    fn sigma_from(triplets: &[(u32, u32, f64)], n: usize) -> SimilarityMatrix {
        SimilarityMatrix::new(
            SparseMatrix::from_triplets(n, n, triplets.to_vec()).unwrap(),
            Provenance::Katz(KatzConfig::default()),
        )
    }

    #[test]
    fn identity_matrix_gives_no_neighbors() {
        let sigma = sigma_from(&[(0, 0, 1.0), (1, 1, 1.0), (2, 2, 1.0)], 3);
        for u in 0..3 {
            assert!(select_neighbors(&sigma, u, 60).is_empty());
        }
    }

    #[test]
    fn equal_similarities_order_by_user_id() {
        let sigma = sigma_from(&[(0, 1, 0.9), (0, 2, 0.9), (0, 3, 0.1)], 4);
        let list = select_neighbors(&sigma, 0, 2);
        assert_eq!(list.entries(), &[(1, 0.9), (2, 0.9)]);
    }

    #[test]
    fn neighbor_count_caps_at_k() {
        let triplets: Vec<(u32, u32, f64)> = (1..=100)
            .map(|j| (0, j, 1.0 + f64::from(j) * 0.001))
            .collect();
        let sigma = sigma_from(&triplets, 101);
        let list = select_neighbors(&sigma, 0, 60);
        assert_eq!(list.len(), 60);
        // strongest similarity first
        assert_eq!(list.entries()[0].0, 100);
    }

    #[test]
    fn hundred_tied_ones_select_lowest_sixty_ids() {
        let triplets: Vec<(u32, u32, f64)> = (1..=100).map(|j| (0, j, 1.0)).collect();
        let sigma = sigma_from(&triplets, 101);
        let list = select_neighbors(&sigma, 0, 60);
        let ids: Vec<u32> = list.entries().iter().map(|&(u, _)| u).collect();
        let expected: Vec<u32> = (1..=60).collect();
        assert_eq!(ids, expected);
    }

    #[test]
    fn negative_and_zero_entries_are_not_neighbors() {
        let sigma = sigma_from(&[(0, 1, -0.5), (0, 2, 0.3)], 3);
        let list = select_neighbors(&sigma, 0, 60);
        assert_eq!(list.entries(), &[(2, 0.3)]);
    }

    #[test]
    fn single_neighbor_scores_its_items() {
        let train = RatingsTable::from_records(3, 5, &[(1, 0, 4.0), (1, 3, 2.0)]);
        let neighbors = top_k_neighbors(0, vec![(1, 0.5)], 60);
        let scores = score_items(&neighbors, &train, None);
        assert_eq!(scores, vec![(0, 0.5), (3, 0.5)]);
    }

    #[test]
    fn overlapping_neighbors_add_their_similarities() {
        // v1 (sim .5) rated item 0; v2 (sim .3) rated items 0 and 1
        let train = RatingsTable::from_records(3, 2, &[(1, 0, 5.0), (2, 0, 3.0), (2, 1, 4.0)]);
        let neighbors = top_k_neighbors(0, vec![(1, 0.5), (2, 0.3)], 60);
        let scores = score_items(&neighbors, &train, None);
        assert_eq!(scores, vec![(0, 0.8), (1, 0.3)]);
    }

    #[test]
    fn target_training_items_are_excluded() {
        let train = RatingsTable::from_records(2, 3, &[(0, 1, 5.0), (1, 1, 4.0), (1, 2, 3.0)]);
        let neighbors = top_k_neighbors(0, vec![(1, 1.0)], 60);
        let scores = score_items(&neighbors, &train, None);
        assert_eq!(scores, vec![(2, 1.0)]);
    }

    #[test]
    fn idle_neighbors_give_empty_scores() {
        let train = RatingsTable::from_records(2, 3, &[]);
        let neighbors = top_k_neighbors(0, vec![(1, 1.0)], 60);
        assert!(score_items(&neighbors, &train, None).is_empty());
    }

    #[test]
    fn minimum_rating_filter_drops_low_ratings() {
        let train = RatingsTable::from_records(2, 3, &[(1, 0, 2.0), (1, 1, 5.0)]);
        let neighbors = top_k_neighbors(0, vec![(1, 1.0)], 60);
        assert_eq!(score_items(&neighbors, &train, Some(4.0)), vec![(1, 1.0)]);
        assert_eq!(score_items(&neighbors, &train, None).len(), 2);
    }

    #[test]
    fn ranking_orders_by_score_then_id() {
        let recs = recommend_top_n(0, &[(0, 0.3), (1, 0.8), (2, 0.3)], 10);
        assert_eq!(recs.items(), &[(1, 0.8), (0, 0.3), (2, 0.3)]);
        let top1 = recommend_top_n(0, &[(0, 0.5), (1, 0.5)], 1);
        assert_eq!(top1.items(), &[(0, 0.5)]);
    }

    #[test]
    fn empty_scores_rank_to_empty_list() {
        assert!(recommend_top_n(0, &[], 10).is_empty());
    }

    #[test]
    fn popularity_ranks_by_count_then_id() {
        // item 2 rated 3x, item 0 rated once, item 4 rated once
        let train = RatingsTable::from_records(
            4,
            5,
            &[
                (0, 2, 5.0),
                (1, 2, 4.0),
                (2, 2, 3.0),
                (1, 0, 2.0),
                (3, 4, 1.0),
            ],
        );
        assert_eq!(baseline_most_popular(&train), vec![(2, 3), (0, 1), (4, 1)]);
    }

    #[test]
    fn popularity_with_no_ratings_is_empty() {
        let train = RatingsTable::from_records(2, 3, &[]);
        assert!(baseline_most_popular(&train).is_empty());
    }

    #[test]
    fn popularity_excludes_the_users_own_items() {
        let train = RatingsTable::from_records(2, 3, &[(0, 1, 5.0), (1, 1, 5.0), (1, 2, 4.0)]);
        let ranking = baseline_most_popular(&train);
        let recs = most_popular_for_user(&ranking, 0, &train, 10);
        assert_eq!(recs.item_ids(), vec![2]);
    }

    #[test]
    fn explicit_trust_serves_the_adjacency_row() {
        // user 0 trusts 1 and 2; row orientation: truster rows
        let g = build_trust_graph(&[(0, 1), (0, 2), (1, 2)], 3, Convention::TrusterRows).unwrap();
        let sigma = baseline_trust_explicit(&g);
        let list = select_neighbors(&sigma, 0, 60);
        assert_eq!(list.entries(), &[(1, 1.0), (2, 1.0)]);
        assert_eq!(sigma.provenance().label(), "Trust_exp");
    }

    #[test]
    fn jaccard_matches_hand_overlaps() {
        // sets over trusted users: S_0 = {1,2}, S_1 = {2,3}, S_2 = {1,2}
        let edges = [(0, 1), (0, 2), (1, 2), (1, 3), (2, 1), (2, 2)];
        // (2,2) is a self-loop: dropped at graph construction
        let g = build_trust_graph(&edges, 4, Convention::TrusteeRows).unwrap();
        let jac = baseline_trust_jaccard(&g, true).unwrap();
        let m = jac.matrix();
        assert!(
            (m.get(0, 1) - 1.0 / 3.0).abs() < 1e-15,
            "S_0 vs S_1 overlap 1 of 3"
        );
        assert_eq!(m.get(0, 2), 0.5, "S_0 = {{1,2}} vs S_2 = {{1}}");
        assert_eq!(m.get(0, 0), 1.0, "nonempty set matches itself");
        assert_eq!(m.get(3, 0), 0.0, "user 3 trusts nobody");
        assert_eq!(jac.provenance().label(), "Trust_jac");
    }

    #[test]
    fn jaccard_empty_sets_share_nothing() {
        let g = build_trust_graph(&[(0, 1)], 3, Convention::TrusteeRows).unwrap();
        let jac = baseline_trust_jaccard(&g, true).unwrap();
        // users 1 and 2 trust nobody: zero everywhere including the diagonal
        assert_eq!(jac.matrix().get(1, 1), 0.0);
        assert_eq!(jac.matrix().get(1, 2), 0.0);
    }

    #[test]
    fn jaccard_orientation_flag_flips_the_sets() {
        // 0 and 1 both trust 2: trusted-sets overlap is 1, truster-sets empty
        let g = build_trust_graph(&[(0, 2), (1, 2)], 3, Convention::TrusteeRows).unwrap();
        let out = baseline_trust_jaccard(&g, true).unwrap();
        assert_eq!(out.matrix().get(0, 1), 1.0);
        let inn = baseline_trust_jaccard(&g, false).unwrap();
        assert_eq!(inn.matrix().get(0, 1), 0.0);
        // under truster sets, only user 2 is trusted by anyone
        assert_eq!(inn.matrix().get(2, 2), 1.0);
    }

    #[test]
    fn on_demand_rows_match_the_materialized_matrix() {
        let edges = [(0, 1), (0, 2), (1, 2), (1, 3), (3, 0), (3, 2), (2, 0)];
        let g = build_trust_graph(&edges, 5, Convention::TrusteeRows).unwrap();
        let full = baseline_trust_jaccard(&g, true).unwrap();
        let index = JaccardIndex::new(&g, true);
        let mut scratch = JaccardScratch::new(g.n_users());
        for u in 0..g.n_users() as u32 {
            let row = index.row(u, &mut scratch);
            let (cols, vals) = full.matrix().row(u as usize);
            let expected: Vec<(u32, f64)> = cols.iter().zip(vals).map(|(&c, &v)| (c, v)).collect();
            assert_eq!(row, expected, "row {u}");
        }
    }

    proptest! {
        #[test]
        fn jaccard_is_symmetric_bounded_and_reflexive(
            edges in proptest::collection::vec((0u32..12, 0u32..12), 0..60),
        ) {
            let filtered: Vec<(u32, u32)> =
                edges.into_iter().filter(|(a, b)| a != b).collect();
            let g = build_trust_graph(&filtered, 12, Convention::TrusteeRows).unwrap();
            let jac = baseline_trust_jaccard(&g, true).unwrap();
            let m = jac.matrix();
            let index = JaccardIndex::new(&g, true);
            for a in 0..12 {
                for b in 0..12 {
                    let v = m.get(a, b);
                    prop_assert!((0.0..=1.0).contains(&v));
                    prop_assert_eq!(v, m.get(b, a), "symmetry at ({}, {})", a, b);
                }
                let expected = if index.sets[a].is_empty() { 0.0 } else { 1.0 };
                prop_assert_eq!(m.get(a, a), expected);
            }
        }

        #[test]
        fn positive_row_scaling_preserves_neighbor_selection(
            entries in proptest::collection::vec((1u32..30, 0.01f64..10.0), 1..25),
            scale in 0.001f64..1000.0,
        ) {
            let base: Vec<(u32, u32, f64)> = entries
                .iter()
                .map(|&(j, v)| (0, j, v))
                .collect();
            let scaled: Vec<(u32, u32, f64)> =
                base.iter().map(|&(i, j, v)| (i, j, v * scale)).collect();
            let a = sigma_from(&base, 30);
            let b = sigma_from(&scaled, 30);
            let na = select_neighbors(&a, 0, 10);
            let nb = select_neighbors(&b, 0, 10);
            let ids_a: Vec<u32> = na.entries().iter().map(|&(u, _)| u).collect();
            let ids_b: Vec<u32> = nb.entries().iter().map(|&(u, _)| u).collect();
            prop_assert_eq!(ids_a, ids_b, "identities and order must survive scaling");
        }

        #[test]
        fn scores_add_over_disjoint_neighbor_sets(
            ratings in proptest::collection::vec((0u32..8, 0u32..10, 1u32..6), 0..40),
            sims in proptest::collection::vec(0.01f64..1.0, 8),
        ) {
            let records: Vec<(u32, u32, f64)> = ratings
                .iter()
                .map(|&(u, i, r)| (u + 1, i, f64::from(r)))
                .collect();
            let train = RatingsTable::from_records(9, 10, &records);
            // target is user 0 with no ratings; neighbors 1..=8 split in two halves
            let first: Vec<(u32, f64)> =
                (1..=4).map(|v| (v, sims[(v - 1) as usize])).collect();
            let second: Vec<(u32, f64)> =
                (5..=8).map(|v| (v, sims[(v - 1) as usize])).collect();
            let all: Vec<(u32, f64)> = first.iter().chain(&second).copied().collect();
            let s_first = score_items(&top_k_neighbors(0, first, 60), &train, None);
            let s_second = score_items(&top_k_neighbors(0, second, 60), &train, None);
            let s_all = score_items(&top_k_neighbors(0, all, 60), &train, None);
            let mut merged: std::collections::BTreeMap<u32, f64> = std::collections::BTreeMap::new();
            for (i, s) in s_first.into_iter().chain(s_second) {
                *merged.entry(i).or_insert(0.0) += s;
            }
            let merged: Vec<(u32, f64)> = merged.into_iter().collect();
            prop_assert_eq!(merged.len(), s_all.len());
            for (&(ia, va), &(ib, vb)) in merged.iter().zip(&s_all) {
                prop_assert_eq!(ia, ib);
                prop_assert!((va - vb).abs() <= 1e-12, "item {} score {} vs {}", ia, va, vb);
            }
        }

        #[test]
        fn recommendations_never_leak_training_items(
            ratings in proptest::collection::vec((0u32..6, 0u32..8, 1u32..6), 0..40),
            edges in proptest::collection::vec((0u32..6, 0u32..6), 0..20),
        ) {
            let records: Vec<(u32, u32, f64)> =
                ratings.iter().map(|&(u, i, r)| (u, i, f64::from(r))).collect();
            let train = RatingsTable::from_records(6, 8, &records);
            let filtered: Vec<(u32, u32)> =
                edges.into_iter().filter(|(a, b)| a != b).collect();
            let g = build_trust_graph(&filtered, 6, Convention::TrusterRows).unwrap();
            let sigma = baseline_trust_explicit(&g);
            for u in 0..6 {
                let recs = recommend_for_user(&sigma, u, &train, 60, 10, None);
                for &(item, score) in recs.items() {
                    prop_assert!(score > 0.0);
                    prop_assert!(
                        !train.has_rating(u, crate::ingest::ItemId(item)),
                        "user {} was recommended its own training item {}",
                        u,
                        item
                    );
                }
            }
        }
    }
}
