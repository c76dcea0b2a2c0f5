//! Sparse exact linear algebra over the rationals.
//!
//! Vectors are sorted `(index, coefficient)` lists with no stored zeros.
//! [`Echelon`] keeps a fully reduced row echelon basis and can optionally
//! track how each row was built from the inserted vectors, which is what the
//! cohomology engine needs to split a cocycle into class coordinates plus a
//! boundary certificate.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::Q;

/// A sparse vector of rationals.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SparseVec {
    entries: Vec<(usize, Q)>,
}

impl SparseVec {
    pub fn new() -> Self {
        Self::default()
    }

    /// The standard basis vector `e_i`.
    pub fn unit(i: usize) -> Self {
        Self {
            entries: vec![(i, Q::one())],
        }
    }

    /// Builds a vector from unsorted entries, summing duplicates and
    /// dropping zeros.
    pub fn from_entries<I: IntoIterator<Item = (usize, Q)>>(entries: I) -> Self {
        let mut acc: BTreeMap<usize, Q> = BTreeMap::new();
        for (i, c) in entries {
            *acc.entry(i).or_insert_with(Q::zero) += c;
        }
        Self::from_map(acc)
    }

    pub(crate) fn from_map(acc: BTreeMap<usize, Q>) -> Self {
        Self {
            entries: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn from_dense(values: &[Q]) -> Self {
        Self {
            entries: values
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (i, c.clone()))
                .collect(),
        }
    }

    pub fn to_dense(&self, len: usize) -> Vec<Q> {
        let mut out = vec![Q::zero(); len];
        for (i, c) in &self.entries {
            out[*i] = c.clone();
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: usize) -> Q {
        match self.entries.binary_search_by_key(&i, |(j, _)| *j) {
            Ok(pos) => self.entries[pos].1.clone(),
            Err(_) => Q::zero(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Q)> + '_ {
        self.entries.iter().map(|(i, c)| (*i, c))
    }

    pub fn leading(&self) -> Option<(usize, &Q)> {
        self.entries.first().map(|(i, c)| (*i, c))
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.last().map(|(i, _)| *i)
    }

    pub fn scale(&mut self, c: &Q) {
        if c.is_zero() {
            self.entries.clear();
            return;
        }
        for (_, v) in &mut self.entries {
            *v *= c;
        }
    }

    pub fn scaled(&self, c: &Q) -> Self {
        let mut out = self.clone();
        out.scale(c);
        out
    }

    pub fn neg(&self) -> Self {
        self.scaled(&-Q::one())
    }

    /// `self += c * other`
    pub fn axpy(&mut self, c: &Q, other: &SparseVec) {
        if c.is_zero() || other.is_zero() {
            return;
        }
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let mut a = std::mem::take(&mut self.entries).into_iter().peekable();
        let mut b = other.entries.iter().peekable();
        loop {
            match (a.peek(), b.peek()) {
                (Some((i, _)), Some((j, _))) if i < j => out.push(a.next().unwrap()),
                (Some((i, _)), Some((j, _))) if i > j => {
                    let (j, v) = b.next().unwrap();
                    out.push((*j, c * v));
                }
                (Some(_), Some(_)) => {
                    let (i, x) = a.next().unwrap();
                    let (_, y) = b.next().unwrap();
                    let s = x + c * y;
                    if !s.is_zero() {
                        out.push((i, s));
                    }
                }
                (Some(_), None) => out.push(a.next().unwrap()),
                (None, Some(_)) => {
                    let (j, v) = b.next().unwrap();
                    out.push((*j, c * v));
                }
                (None, None) => break,
            }
        }
        self.entries = out;
    }

    pub fn add(&self, other: &SparseVec) -> SparseVec {
        let mut out = self.clone();
        out.axpy(&Q::one(), other);
        out
    }

    pub fn sub(&self, other: &SparseVec) -> SparseVec {
        let mut out = self.clone();
        out.axpy(&-Q::one(), other);
        out
    }

    /// Re-indexes every entry through `f`; `f` must be injective.
    pub fn map_indices(&self, f: impl Fn(usize) -> usize) -> SparseVec {
        SparseVec::from_entries(self.entries.iter().map(|(i, c)| (f(*i), c.clone())))
    }
}

impl fmt::Display for SparseVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, (i, c)) in self.entries.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{i}: {c}")?;
        }
        write!(f, "]")
    }
}

/// Accumulates many scaled sparse vectors before materializing.
#[derive(Default)]
pub(crate) struct Accumulator {
    acc: BTreeMap<usize, Q>,
}

impl Accumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_scaled(&mut self, c: &Q, v: &SparseVec) {
        if c.is_zero() {
            return;
        }
        for (i, x) in v.iter() {
            *self.acc.entry(i).or_insert_with(Q::zero) += c * x;
        }
    }

    pub fn add_entry(&mut self, i: usize, c: Q) {
        *self.acc.entry(i).or_insert_with(Q::zero) += c;
    }

    pub fn finish(self) -> SparseVec {
        SparseVec::from_map(self.acc)
    }
}

#[derive(Clone, Debug)]
struct Row {
    v: SparseVec,
    combo: SparseVec,
}

/// Reduced row echelon basis of a subspace, built incrementally.
///
/// Pivots are the first nonzero entry in index order. Rows are kept fully
/// reduced: a pivot column is zero in every other row.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: Vec<Row>,
    pivots: BTreeMap<usize, usize>,
    tracked: bool,
}

/// Result of reducing a vector against an [`Echelon`].
#[derive(Clone, Debug)]
pub struct Reduction {
    /// `v` minus its projection onto the row space.
    pub remainder: SparseVec,
    /// Coefficients over inserted tags with `v = remainder + sum combo[t] * input_t`.
    pub combo: SparseVec,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    /// An echelon that records, for each row, its expression in terms of the
    /// tagged vectors passed to [`Echelon::insert_tagged`].
    pub fn tracked() -> Self {
        Self {
            tracked: true,
            ..Self::default()
        }
    }

    pub fn from_vectors<I: IntoIterator<Item = SparseVec>>(vs: I) -> Self {
        let mut e = Self::new();
        for v in vs {
            e.insert(v);
        }
        e
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn pivot_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivots.keys().copied()
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.pivots.contains_key(&col)
    }

    /// Rows sorted by pivot column.
    pub fn rows(&self) -> Vec<SparseVec> {
        self.pivots
            .values()
            .map(|&r| self.rows[r].v.clone())
            .collect()
    }

    pub fn reduce(&self, v: &SparseVec) -> Reduction {
        let mut acc = Accumulator::new();
        let mut combo = Accumulator::new();
        let mut any = false;
        for (col, c) in v.iter() {
            if let Some(&r) = self.pivots.get(&col) {
                acc.add_scaled(c, &self.rows[r].v);
                if self.tracked {
                    combo.add_scaled(c, &self.rows[r].combo);
                }
                any = true;
            }
        }
        if !any {
            return Reduction {
                remainder: v.clone(),
                combo: SparseVec::new(),
            };
        }
        Reduction {
            remainder: v.sub(&acc.finish()),
            combo: combo.finish(),
        }
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).remainder.is_zero()
    }

    /// Inserts `v`; returns whether it enlarged the span.
    pub fn insert(&mut self, v: SparseVec) -> bool {
        self.insert_inner(v, None)
    }

    pub fn insert_tagged(&mut self, v: SparseVec, tag: usize) -> bool {
        self.insert_inner(v, Some(tag))
    }

    fn insert_inner(&mut self, v: SparseVec, tag: Option<usize>) -> bool {
        let red = self.reduce(&v);
        if red.remainder.is_zero() {
            return false;
        }
        let mut row = red.remainder;
        let mut combo = if self.tracked {
            let mut c = SparseVec::unit(tag.expect("tracked echelon needs tags"));
            c.axpy(&-Q::one(), &red.combo);
            c
        } else {
            SparseVec::new()
        };
        let (pivot, lead) = row.leading().map(|(i, c)| (i, c.clone())).unwrap();
        let inv = Q::one() / lead;
        row.scale(&inv);
        combo.scale(&inv);
        for existing in &mut self.rows {
            let c = existing.v.get(pivot);
            if !c.is_zero() {
                let neg = -c;
                existing.v.axpy(&neg, &row);
                if self.tracked {
                    existing.combo.axpy(&neg, &combo);
                }
            }
        }
        self.pivots.insert(pivot, self.rows.len());
        self.rows.push(Row { v: row, combo });
        true
    }
}

/// Basis of the null space of the constraint rows, over `ncols` unknowns,
/// returned in reduced echelon form sorted by pivot.
pub fn kernel<I: IntoIterator<Item = SparseVec>>(rows: I, ncols: usize) -> Vec<SparseVec> {
    let ech = Echelon::from_vectors(rows);
    let pivot_rows = ech.rows();
    let mut raw = Vec::new();
    for free in (0..ncols).filter(|c| !ech.is_pivot(*c)) {
        let mut entries = vec![(free, Q::one())];
        for r in &pivot_rows {
            let c = r.get(free);
            if !c.is_zero() {
                let (p, _) = r.leading().unwrap();
                entries.push((p, -c));
            }
        }
        raw.push(SparseVec::from_entries(entries));
    }
    Echelon::from_vectors(raw).rows()
}

/// Null space of the linear map whose `j`-th column is `columns[j]`.
pub fn kernel_of_columns(columns: &[SparseVec]) -> Vec<SparseVec> {
    kernel(transpose(columns), columns.len())
}

/// Rows of the matrix whose columns are given.
pub fn transpose(columns: &[SparseVec]) -> Vec<SparseVec> {
    let mut rows: BTreeMap<usize, Vec<(usize, Q)>> = BTreeMap::new();
    for (j, col) in columns.iter().enumerate() {
        for (i, c) in col.iter() {
            rows.entry(i).or_default().push((j, c.clone()));
        }
    }
    rows.into_values()
        .map(|entries| SparseVec { entries })
        .collect()
}

/// Rank of the span of the given vectors.
pub fn rank(vectors: &[SparseVec]) -> usize {
    Echelon::from_vectors(vectors.iter().cloned()).rank()
}

/// Inverts a square matrix given by columns, if it is invertible.
pub fn invert(columns: &[SparseVec]) -> Option<Vec<SparseVec>> {
    let n = columns.len();
    let mut ech = Echelon::tracked();
    for (j, c) in columns.iter().enumerate() {
        if c.max_index().is_some_and(|m| m >= n) {
            return None;
        }
        ech.insert_tagged(c.clone(), j);
    }
    if ech.rank() != n {
        return None;
    }
    // M^{-1} e_i is the combination of columns producing e_i.
    Some(
        (0..n)
            .map(|i| {
                let red = ech.reduce(&SparseVec::unit(i));
                debug_assert!(red.remainder.is_zero());
                red.combo
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Q {
        Q::from_integer(n.into())
    }

    fn v(xs: &[i64]) -> SparseVec {
        SparseVec::from_dense(&xs.iter().map(|&x| q(x)).collect::<Vec<_>>())
    }

    #[test]
    fn axpy_merges_and_cancels() {
        let mut a = v(&[1, 0, 2]);
        a.axpy(&q(-2), &v(&[0, 1, 1]));
        assert_eq!(a, v(&[1, -2, 0]));
        assert_eq!(a.len(), 2);
    }

    #[test]
    fn echelon_detects_dependence() {
        let mut e = Echelon::new();
        assert!(e.insert(v(&[1, 2, 3])));
        assert!(e.insert(v(&[0, 1, 1])));
        assert!(!e.insert(v(&[1, 3, 4])));
        assert_eq!(e.rank(), 2);
        // fully reduced
        let rows = e.rows();
        assert_eq!(rows[0], v(&[1, 0, 1]));
        assert_eq!(rows[1], v(&[0, 1, 1]));
    }

    #[test]
    fn tracked_combo_reconstructs() {
        let inputs = [v(&[2, 1, 0]), v(&[0, 3, 1]), v(&[1, 1, 1])];
        let mut e = Echelon::tracked();
        for (t, x) in inputs.iter().enumerate() {
            e.insert_tagged(x.clone(), t);
        }
        let target = v(&[5, -1, 7]);
        let red = e.reduce(&target);
        assert!(red.remainder.is_zero());
        let mut rebuilt = SparseVec::new();
        for (t, c) in red.combo.iter() {
            rebuilt.axpy(c, &inputs[t]);
        }
        assert_eq!(rebuilt, target);
    }

    #[test]
    fn kernel_of_rank_one_map() {
        // x + y + z = 0
        let k = kernel(vec![v(&[1, 1, 1])], 3);
        assert_eq!(k.len(), 2);
        for b in &k {
            let s: Q = b.iter().map(|(_, c)| c.clone()).sum();
            assert!(s.is_zero());
        }
    }

    #[test]
    fn invert_two_by_two() {
        let cols = vec![v(&[2, 1]), v(&[1, 1])];
        let inv = invert(&cols).unwrap();
        // M * M^{-1} = I column by column
        for (i, c) in inv.iter().enumerate() {
            let mut prod = SparseVec::new();
            for (j, x) in c.iter() {
                prod.axpy(x, &cols[j]);
            }
            assert_eq!(prod, SparseVec::unit(i));
        }
        assert!(invert(&[v(&[1, 1]), v(&[2, 2])]).is_none());
    }
}
