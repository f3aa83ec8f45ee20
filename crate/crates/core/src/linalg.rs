//! Sparse exact linear algebra: row echelon rank over an arbitrary [`FieldOps`] field.

use std::collections::{BTreeMap, HashMap};

use crate::error::Result;
use crate::field::{FieldConfig, FieldOps, PrimeField, Rational, RationalField};

/// A sparse matrix stored by rows; each row is sorted by column and has no explicit zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix<E> {
    pub nrows: usize,
    pub ncols: usize,
    pub rows: Vec<Vec<(usize, E)>>,
}

impl<E: Clone> SparseMatrix<E> {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        SparseMatrix { nrows, ncols, rows: vec![Vec::new(); nrows] }
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn get(&self, r: usize, c: usize) -> Option<&E> {
        self.rows[r]
            .binary_search_by_key(&c, |(col, _)| *col)
            .ok()
            .map(|i| &self.rows[r][i].1)
    }

    pub fn map<F, T>(&self, mut f: F) -> Result<SparseMatrix<T>>
    where
        F: FnMut(&E) -> Result<T>,
    {
        let rows = self
            .rows
            .iter()
            .map(|row| row.iter().map(|(c, e)| Ok((*c, f(e)?))).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(SparseMatrix { nrows: self.nrows, ncols: self.ncols, rows })
    }
}

impl SparseMatrix<Rational> {
    /// Builds a matrix from `(row, col) -> value` triples, summing duplicates.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, Rational)>,
    ) -> Self {
        let mut acc: Vec<BTreeMap<usize, Rational>> = vec![BTreeMap::new(); nrows];
        for (r, c, v) in triplets {
            assert!(r < nrows && c < ncols, "triplet ({r},{c}) outside {nrows}x{ncols}");
            *acc[r].entry(c).or_default() += v;
        }
        let rows = acc
            .into_iter()
            .map(|row| row.into_iter().filter(|(_, v)| *v != Rational::default()).collect())
            .collect();
        SparseMatrix { nrows, ncols, rows }
    }
}

/// Rank of `m` over the field `field`, by sparse row echelon reduction.
pub fn rank_over<F: FieldOps>(field: &F, m: &SparseMatrix<F::Elem>) -> usize {
    let mut order: Vec<usize> = (0..m.nrows).filter(|&r| !m.rows[r].is_empty()).collect();
    order.sort_by_key(|&r| m.rows[r].len());

    // pivot column -> row normalized so that its leading entry (the pivot column) is one
    let mut pivots: HashMap<usize, Vec<(usize, F::Elem)>> = HashMap::new();
    for r in order {
        let mut work: BTreeMap<usize, F::Elem> =
            m.rows[r].iter().map(|(c, e)| (*c, e.clone())).collect();
        let mut cursor = 0usize;
        loop {
            let Some((&c, _)) = work.range(cursor..).next() else {
                break;
            };
            match pivots.get(&c) {
                Some(prow) => {
                    let factor = work.remove(&c).expect("present");
                    for (pc, pv) in prow.iter().skip(1) {
                        let delta = field.mul(&factor, pv);
                        match work.get_mut(pc) {
                            Some(slot) => {
                                let v = field.sub(slot, &delta);
                                if field.is_zero(&v) {
                                    work.remove(pc);
                                } else {
                                    *slot = v;
                                }
                            }
                            None => {
                                work.insert(*pc, field.neg(&delta));
                            }
                        }
                    }
                    cursor = c + 1;
                }
                None => {
                    let lead = work.get(&c).expect("present").clone();
                    let inv = field.inv(&lead);
                    let row: Vec<(usize, F::Elem)> =
                        work.range(c..).map(|(k, v)| (*k, field.mul(v, &inv))).collect();
                    pivots.insert(c, row);
                    break;
                }
            }
        }
    }
    pivots.len()
}

/// Rank of a rational matrix in the configured field.
pub fn rank(config: FieldConfig, m: &SparseMatrix<Rational>) -> Result<usize> {
    match config {
        FieldConfig::Rationals => Ok(rank_over(&RationalField, m)),
        FieldConfig::Prime(p) => {
            let field = PrimeField::new(p)?;
            let reduced = m.map(|q| field.from_rational(q))?;
            Ok(rank_over(&field, &reduced))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::rat;

    fn dense(rows: &[&[i64]]) -> SparseMatrix<Rational> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let trip = rows.iter().enumerate().flat_map(|(i, r)| {
            r.iter().enumerate().filter(|(_, v)| **v != 0).map(move |(j, v)| (i, j, rat(*v)))
        });
        SparseMatrix::from_triplets(nrows, ncols, trip)
    }

    #[test]
    fn rank_small_examples() {
        assert_eq!(rank(FieldConfig::Rationals, &dense(&[&[1, 2], &[2, 4]])).unwrap(), 1);
        assert_eq!(rank(FieldConfig::Rationals, &dense(&[&[0, 0], &[0, 0]])).unwrap(), 0);
        let m = dense(&[&[1, 0, 1], &[0, 1, 1], &[1, 1, 0]]);
        // det = -2: full rank over Q, rank 2 in characteristic 2
        assert_eq!(rank(FieldConfig::Rationals, &m).unwrap(), 3);
        assert_eq!(rank(FieldConfig::Prime(2), &m).unwrap(), 2);
        assert_eq!(rank(FieldConfig::Prime(3), &m).unwrap(), 3);
    }

    #[test]
    fn rank_of_empty_shapes() {
        let m = SparseMatrix::<Rational>::zeros(0, 5);
        assert_eq!(rank(FieldConfig::Rationals, &m).unwrap(), 0);
        let m = SparseMatrix::<Rational>::zeros(4, 0);
        assert_eq!(rank(FieldConfig::Rationals, &m).unwrap(), 0);
    }

    #[test]
    fn duplicate_triplets_are_summed() {
        let m = SparseMatrix::from_triplets(1, 2, [(0, 0, rat(1)), (0, 0, rat(-1)), (0, 1, rat(3))]);
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(0, 1), Some(&rat(3)));
    }
}

#[cfg(test)]
mod proptests {
    use super::*;
    use crate::field::rat;
    use proptest::prelude::*;

    /// Dense Gaussian elimination over Q, kept independent of the sparse path.
    fn dense_rank(mut a: Vec<Vec<Rational>>) -> usize {
        let nrows = a.len();
        let ncols = a.first().map_or(0, |r| r.len());
        let mut rank = 0;
        for c in 0..ncols {
            let Some(p) = (rank..nrows).find(|&r| a[r][c] != rat(0)) else { continue };
            a.swap(rank, p);
            for r in 0..nrows {
                if r != rank && a[r][c] != rat(0) {
                    let f = &a[r][c] / &a[rank][c];
                    for k in 0..ncols {
                        let d = &f * &a[rank][k];
                        a[r][k] -= d;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    proptest! {
        #[test]
        fn sparse_rank_matches_dense(entries in prop::collection::vec(prop::collection::vec(-2i64..=2, 6), 0..7)) {
            let nrows = entries.len();
            let trip = entries.iter().enumerate().flat_map(|(i, r)| {
                r.iter().enumerate().filter(|(_, v)| **v != 0).map(move |(j, v)| (i, j, rat(*v)))
            });
            let m = SparseMatrix::from_triplets(nrows, 6, trip);
            let d: Vec<Vec<Rational>> = entries.iter().map(|r| r.iter().map(|v| rat(*v)).collect()).collect();
            prop_assert_eq!(rank(FieldConfig::Rationals, &m).unwrap(), dense_rank(d));
        }
    }
}
