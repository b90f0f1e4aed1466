//! User-item rating storage.

use crate::ingest::ItemId;

/// Ratings grouped per user, with items sorted ascending inside each row.
///
/// Duplicate `(user, item)` records resolve to the last value seen in input
/// order; the number of collapsed records is kept for reporting.
#[derive(Debug, Clone)]
pub struct RatingsTable {
    n_users: usize,
    n_items: usize,
    rows: Vec<Vec<(u32, f64)>>,
    n_ratings: usize,
    duplicates: usize,
}

impl RatingsTable {
    /// Builds the table from `(user, item, rating)` records in input order.
    ///
    /// Ids must already be dense (`user < n_users`, `item < n_items`).
    pub fn from_records(n_users: usize, n_items: usize, records: &[(u32, u32, f64)]) -> Self {
        let mut maps: Vec<std::collections::HashMap<u32, f64>> =
            vec![std::collections::HashMap::new(); n_users];
        let mut duplicates = 0;
        for &(u, i, r) in records {
            if maps[u as usize].insert(i, r).is_some() {
                duplicates += 1;
            }
        }
        let mut rows: Vec<Vec<(u32, f64)>> = Vec::with_capacity(n_users);
        let mut n_ratings = 0;
        for m in maps {
            let mut row: Vec<(u32, f64)> = m.into_iter().collect();
            row.sort_unstable_by_key(|&(i, _)| i);
            n_ratings += row.len();
            rows.push(row);
        }
        RatingsTable {
            n_users,
            n_items,
            rows,
            n_ratings,
            duplicates,
        }
    }

    /// Table with the same shape but only the selected users' rows.
    pub(crate) fn filtered<F: Fn(u32) -> bool>(&self, keep: F) -> Self {
        let mut rows = vec![Vec::new(); self.n_users];
        let mut n_ratings = 0;
        for (u, row) in self.rows.iter().enumerate() {
            if keep(u as u32) {
                n_ratings += row.len();
                rows[u] = row.clone();
            }
        }
        RatingsTable {
            n_users: self.n_users,
            n_items: self.n_items,
            rows,
            n_ratings,
            duplicates: 0,
        }
    }

    pub fn n_users(&self) -> usize {
        self.n_users
    }

    pub fn n_items(&self) -> usize {
        self.n_items
    }

    /// Ratings retained after duplicate resolution.
    pub fn n_ratings(&self) -> usize {
        self.n_ratings
    }

    /// Input records that were overwritten by a later duplicate.
    pub fn duplicates(&self) -> usize {
        self.duplicates
    }

    /// `(item, rating)` pairs of one user, sorted by item.
    pub fn user_ratings(&self, user: u32) -> &[(u32, f64)] {
        &self.rows[user as usize]
    }

    /// Number of ratings a user holds.
    pub fn count(&self, user: u32) -> usize {
        self.rows[user as usize].len()
    }

    /// True when the user rated the item.
    pub fn has_rating(&self, user: u32, item: ItemId) -> bool {
        self.rows[user as usize]
            .binary_search_by_key(&item.0, |&(i, _)| i)
            .is_ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn records_group_per_user_and_sort_by_item() {
        let t = RatingsTable::from_records(3, 5, &[(1, 4, 3.0), (1, 0, 5.0), (0, 2, 1.0)]);
        assert_eq!(t.user_ratings(1), &[(0, 5.0), (4, 3.0)]);
        assert_eq!(t.user_ratings(0), &[(2, 1.0)]);
        assert_eq!(t.user_ratings(2), &[]);
        assert_eq!(t.n_ratings(), 3);
    }

    #[test]
    fn duplicate_keeps_last_value_and_counts() {
        let t = RatingsTable::from_records(2, 3, &[(0, 1, 2.0), (0, 1, 4.0), (0, 1, 5.0)]);
        assert_eq!(t.user_ratings(0), &[(1, 5.0)], "last write must win");
        assert_eq!(t.duplicates(), 2);
        assert_eq!(t.n_ratings(), 1);
    }

    #[test]
    fn filtered_drops_unselected_rows() {
        let t = RatingsTable::from_records(3, 3, &[(0, 0, 1.0), (1, 1, 2.0), (2, 2, 3.0)]);
        let f = t.filtered(|u| u != 1);
        assert_eq!(f.count(1), 0);
        assert_eq!(f.n_ratings(), 2);
        assert_eq!(f.n_users(), 3, "shape must be preserved");
    }
}
