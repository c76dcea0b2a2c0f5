//! Finite-dimensional connected graded-commutative algebras.
//!
//! An [`FdAlgebra`] is given by a graded basis and structure constants.
//! Elements are coordinate vectors ([`SparseVec`]) over that basis.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::linalg::{Accumulator, Echelon, SparseVec};
use crate::{Error, Result, Q};

struct Inner {
    names: Vec<String>,
    degrees: Vec<u32>,
    index: HashMap<String, usize>,
    unit: usize,
    table: Vec<SparseVec>,
    by_degree: BTreeMap<u32, Vec<usize>>,
}

/// A validated finite-dimensional connected graded-commutative algebra.
#[derive(Clone)]
pub struct FdAlgebra(Arc<Inner>);

impl PartialEq for FdAlgebra {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.names == other.0.names
                && self.0.degrees == other.0.degrees
                && self.0.table == other.0.table)
    }
}

impl Eq for FdAlgebra {}

impl fmt::Debug for FdAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FdAlgebra")
            .field("dim", &self.dim())
            .field("betti", &self.betti())
            .finish()
    }
}

/// One structure-constant entry: `b_i * b_j = value`.
#[derive(Clone, Debug)]
pub struct Product {
    pub left: usize,
    pub right: usize,
    pub value: SparseVec,
}

impl FdAlgebra {
    /// Builds and validates an algebra.
    ///
    /// Products with the unit are implied. A product given in one order only
    /// determines the other by graded commutativity; unspecified products of
    /// non-unit elements are zero.
    pub fn new(basis: Vec<(String, u32)>, products: Vec<Product>) -> Result<Self> {
        let dim = basis.len();
        let mut index = HashMap::new();
        for (i, (name, _)) in basis.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::DuplicateName(name.clone()));
            }
        }
        let degrees: Vec<u32> = basis.iter().map(|(_, d)| *d).collect();
        let names: Vec<String> = basis.into_iter().map(|(n, _)| n).collect();
        let units: Vec<usize> = (0..dim).filter(|&i| degrees[i] == 0).collect();
        if units.len() != 1 {
            return Err(Error::NotConnected);
        }
        let unit = units[0];
        let sign = |i: usize, j: usize| (degrees[i] * degrees[j]) % 2 == 1;

        let mut given: HashMap<(usize, usize), SparseVec> = HashMap::new();
        for p in products {
            if p.left >= dim || p.right >= dim || p.value.max_index().is_some_and(|m| m >= dim) {
                return Err(Error::InvalidArgument("product index out of range".into()));
            }
            let target = degrees[p.left] + degrees[p.right];
            if p.value.iter().any(|(k, _)| degrees[k] != target) {
                return Err(Error::NotGraded {
                    i: names[p.left].clone(),
                    j: names[p.right].clone(),
                });
            }
            if given.insert((p.left, p.right), p.value).is_some() {
                return Err(Error::InvalidArgument(format!(
                    "product {}*{} given twice",
                    names[p.left], names[p.right]
                )));
            }
        }
        let mut table = vec![SparseVec::new(); dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                let v = if i == unit {
                    SparseVec::unit(j)
                } else if j == unit {
                    SparseVec::unit(i)
                } else if let Some(v) = given.get(&(i, j)) {
                    v.clone()
                } else if let Some(v) = given.get(&(j, i)) {
                    if sign(i, j) {
                        v.neg()
                    } else {
                        v.clone()
                    }
                } else {
                    SparseVec::new()
                };
                if let Some(v0) = given.get(&(i, j)) {
                    if (i == unit || j == unit) && *v0 != v {
                        return Err(Error::InvalidArgument(format!(
                            "product with the unit must be the identity: {}*{}",
                            names[i], names[j]
                        )));
                    }
                }
                table[i * dim + j] = v;
            }
        }
        let mut by_degree: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for (i, d) in degrees.iter().enumerate() {
            by_degree.entry(*d).or_default().push(i);
        }
        let alg = Self(Arc::new(Inner {
            names,
            degrees,
            index,
            unit,
            table,
            by_degree,
        }));
        alg.validate()?;
        Ok(alg)
    }

    fn validate(&self) -> Result<()> {
        let dim = self.dim();
        let name = |i: usize| self.0.names[i].clone();
        for i in 0..dim {
            for j in 0..dim {
                let ij = self.mul_basis(i, j);
                let ji = self.mul_basis(j, i);
                let odd = (self.degree(i) * self.degree(j)) % 2 == 1;
                let expect = if odd { ji.neg() } else { ji.clone() };
                if *ij != expect {
                    return Err(Error::NotGradedCommutative { i: name(i), j: name(j) });
                }
            }
        }
        let top = self.top_degree();
        for i in 0..dim {
            for j in 0..dim {
                if self.degree(i) + self.degree(j) > top {
                    continue;
                }
                let ij = self.mul_basis(i, j).clone();
                for k in 0..dim {
                    if self.degree(i) + self.degree(j) + self.degree(k) > top {
                        continue;
                    }
                    let left = self.mul(&ij, &SparseVec::unit(k));
                    let right = self.mul(&SparseVec::unit(i), self.mul_basis(j, k));
                    if left != right {
                        return Err(Error::NotAssociative {
                            i: name(i),
                            j: name(j),
                            k: name(k),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.0.names.len()
    }

    pub fn degree(&self, i: usize) -> u32 {
        self.0.degrees[i]
    }

    pub fn degrees(&self) -> &[u32] {
        &self.0.degrees
    }

    pub fn name(&self, i: usize) -> &str {
        &self.0.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.0.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.index.get(name).copied()
    }

    pub fn unit(&self) -> usize {
        self.0.unit
    }

    pub fn top_degree(&self) -> u32 {
        self.0.by_degree.keys().next_back().copied().unwrap_or(0)
    }

    /// Basis indices of `H^n`.
    pub fn basis_in_degree(&self, n: i64) -> &[usize] {
        if n < 0 || n > u32::MAX as i64 {
            return &[];
        }
        self.0
            .by_degree
            .get(&(n as u32))
            .map(|v| v.as_slice())
            .unwrap_or(&[])
    }

    /// Nonzero degrees in increasing order.
    pub fn nonzero_degrees(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.by_degree.keys().copied()
    }

    /// Betti numbers in degrees `0..=top`.
    pub fn betti(&self) -> Vec<usize> {
        (0..=self.top_degree() as i64)
            .map(|n| self.basis_in_degree(n).len())
            .collect()
    }

    pub fn mul_basis(&self, i: usize, j: usize) -> &SparseVec {
        &self.0.table[i * self.dim() + j]
    }

    pub fn mul(&self, a: &SparseVec, b: &SparseVec) -> SparseVec {
        let mut acc = Accumulator::new();
        for (i, x) in a.iter() {
            for (j, y) in b.iter() {
                acc.add_scaled(&(x * y), self.mul_basis(i, j));
            }
        }
        acc.finish()
    }

    /// Homogeneous degree of a nonzero vector.
    pub fn vec_degree(&self, v: &SparseVec) -> Option<u32> {
        let mut it = v.iter().map(|(i, _)| self.degree(i));
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    /// Renders a coordinate vector as a combination of basis names.
    pub fn format_vec(&self, v: &SparseVec) -> String {
        if v.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (k, (i, c)) in v.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            if abs.is_one() {
                s.push_str(self.name(i));
            } else {
                s.push_str(&format!("{abs} {}", self.name(i)));
            }
        }
        s
    }

    /// Nonzero products of non-unit basis elements with `i <= j`.
    pub fn nonzero_products(&self) -> Vec<(usize, usize, SparseVec)> {
        let mut out = Vec::new();
        for i in 0..self.dim() {
            for j in i..self.dim() {
                if i == self.unit() || j == self.unit() {
                    continue;
                }
                let v = self.mul_basis(i, j);
                if !v.is_zero() {
                    out.push((i, j, v.clone()));
                }
            }
        }
        out
    }

    /// `H^n` as a subspace.
    pub fn degree_subspace(&self, n: i64) -> Subspace {
        Subspace::from_vectors(
            self,
            self.basis_in_degree(n).iter().map(|&i| SparseVec::unit(i)),
        )
    }

    pub fn even_subspace(&self) -> Subspace {
        Subspace::from_vectors(
            self,
            (0..self.dim())
                .filter(|&i| self.degree(i) % 2 == 0)
                .map(SparseVec::unit),
        )
    }

    /// The positive-degree even part.
    pub fn positive_even_subspace(&self) -> Subspace {
        Subspace::from_vectors(
            self,
            (0..self.dim())
                .filter(|&i| self.degree(i) % 2 == 0 && self.degree(i) > 0)
                .map(SparseVec::unit),
        )
    }
}

/// A graded subspace of an [`FdAlgebra`], kept in reduced echelon form.
#[derive(Clone, Debug)]
pub struct Subspace {
    ambient: FdAlgebra,
    ech: Echelon,
}

impl PartialEq for Subspace {
    fn eq(&self, other: &Self) -> bool {
        self.ambient == other.ambient && self.ech.rows() == other.ech.rows()
    }
}

impl Eq for Subspace {}

impl Subspace {
    pub fn zero(ambient: &FdAlgebra) -> Self {
        Self {
            ambient: ambient.clone(),
            ech: Echelon::new(),
        }
    }

    /// Span of the given vectors. Each vector is split into homogeneous
    /// components first, so the result is always graded.
    pub fn from_vectors<I: IntoIterator<Item = SparseVec>>(ambient: &FdAlgebra, vs: I) -> Self {
        let mut s = Self::zero(ambient);
        for v in vs {
            s.insert(v);
        }
        s
    }

    pub fn whole(ambient: &FdAlgebra) -> Self {
        Self::from_vectors(ambient, (0..ambient.dim()).map(SparseVec::unit))
    }

    fn insert(&mut self, v: SparseVec) -> bool {
        let mut parts: BTreeMap<u32, Vec<(usize, Q)>> = BTreeMap::new();
        for (i, c) in v.iter() {
            parts
                .entry(self.ambient.degree(i))
                .or_default()
                .push((i, c.clone()));
        }
        let mut grew = false;
        for (_, entries) in parts {
            grew |= self.ech.insert(SparseVec::from_entries(entries));
        }
        grew
    }

    pub fn ambient(&self) -> &FdAlgebra {
        &self.ambient
    }

    pub fn dim(&self) -> usize {
        self.ech.rank()
    }

    pub fn is_zero(&self) -> bool {
        self.ech.is_empty()
    }

    /// Reduced echelon basis, sorted by pivot.
    pub fn basis(&self) -> Vec<SparseVec> {
        self.ech.rows()
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.ech.contains(v)
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.basis().iter().all(|v| other.contains(v))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut s = self.clone();
        for v in other.basis() {
            s.insert(v);
        }
        s
    }

    /// Dimension of the degree-`n` part.
    pub fn dim_in_degree(&self, n: u32) -> usize {
        self.basis()
            .iter()
            .filter(|v| self.ambient.vec_degree(v) == Some(n))
            .count()
    }
}

/// The subspace where characteristic classes of rank-`k` bundles live:
/// `H^4 + ... + H^{4m}` for `k = 2m + 1`, and
/// `H^4 + ... + H^{4(m-1)} + H^{2m}` for `k = 2m`.
pub fn char_subspace(h: &FdAlgebra, k: u32) -> Subspace {
    let m = k / 2;
    let mut degrees: Vec<i64> = Vec::new();
    if k % 2 == 1 {
        degrees.extend((1..=m as i64).map(|i| 4 * i));
    } else {
        degrees.extend((1..m as i64).map(|i| 4 * i));
        if m > 0 {
            degrees.push(2 * m as i64);
        }
    }
    Subspace::from_vectors(
        h,
        degrees
            .into_iter()
            .flat_map(|n| h.basis_in_degree(n).to_vec())
            .map(SparseVec::unit),
    )
}

/// The smallest unital subalgebra containing `s`, as a subspace.
pub fn subalgebra_generated(h: &FdAlgebra, s: &Subspace) -> Subspace {
    let gens = s.basis();
    let mut current = Subspace::from_vectors(h, std::iter::once(SparseVec::unit(h.unit())));
    current = current.sum(s);
    loop {
        let mut next = current.clone();
        let mut grew = false;
        for w in current.basis() {
            for g in &gens {
                grew |= next.insert(h.mul(&w, g));
            }
        }
        if !grew {
            return current;
        }
        current = next;
    }
}

/// Graded tensor product with `(a x t)(a' x t') = (-1)^{|t||a'|} aa' x tt'`.
///
/// Basis element `(i, j)` has index `i * dim(B) + j` and name `a⊗b`.
pub fn tensor(a: &FdAlgebra, b: &FdAlgebra) -> FdAlgebra {
    let (da, db) = (a.dim(), b.dim());
    let mut basis = Vec::with_capacity(da * db);
    for i in 0..da {
        for j in 0..db {
            basis.push((
                format!("{}⊗{}", a.name(i), b.name(j)),
                a.degree(i) + b.degree(j),
            ));
        }
    }
    let mut products = Vec::new();
    for i in 0..da {
        for j in 0..db {
            for k in 0..da {
                for l in 0..db {
                    let aa = a.mul_basis(i, k);
                    let bb = b.mul_basis(j, l);
                    if aa.is_zero() || bb.is_zero() {
                        continue;
                    }
                    let neg = (b.degree(j) * a.degree(k)) % 2 == 1;
                    let mut entries = Vec::new();
                    for (p, x) in aa.iter() {
                        for (q, y) in bb.iter() {
                            let c = x * y;
                            entries.push((p * db + q, if neg { -c } else { c }));
                        }
                    }
                    products.push(Product {
                        left: i * db + j,
                        right: k * db + l,
                        value: SparseVec::from_entries(entries),
                    });
                }
            }
        }
    }
    // units are handled by the constructor; drop their explicit entries
    let unit = a.unit() * db + b.unit();
    products.retain(|p| p.left != unit && p.right != unit);
    FdAlgebra::new(basis, products).expect("tensor of valid algebras is valid")
}

/// Checks that `H` is a Poincaré duality algebra of formal dimension `m`.
pub fn poincare_check(h: &FdAlgebra, m: u32) -> bool {
    if h.top_degree() > m || h.basis_in_degree(m as i64).len() != 1 {
        return false;
    }
    let top = h.basis_in_degree(m as i64)[0];
    for i in 0..=m as i64 {
        let left = h.basis_in_degree(i);
        let right = h.basis_in_degree(m as i64 - i);
        if left.len() != right.len() {
            return false;
        }
        // pairing matrix must be nonsingular
        let rows: Vec<SparseVec> = left
            .iter()
            .map(|&a| {
                SparseVec::from_entries(
                    right
                        .iter()
                        .enumerate()
                        .map(|(col, &b)| (col, h.mul_basis(a, b).get(top))),
                )
            })
            .collect();
        if Echelon::from_vectors(rows).rank() != left.len() {
            return false;
        }
    }
    true
}

/// Whether `H` is generated as an algebra by `H^n`.
pub fn is_generated_in_degree(h: &FdAlgebra, n: u32) -> bool {
    subalgebra_generated(h, &h.degree_subspace(n as i64)).dim() == h.dim()
}

/// `Q[x]/(x^{n+1})` with `|x| = degree`.
pub fn truncated_polynomial(degree: u32, n: u32) -> FdAlgebra {
    assert!(degree > 0 && degree % 2 == 0);
    let basis = (0..=n)
        .map(|k| {
            let name = match k {
                0 => "1".to_string(),
                1 => "x".to_string(),
                _ => format!("x{k}"),
            };
            (name, k * degree)
        })
        .collect();
    let mut products = Vec::new();
    for i in 1..=n as usize {
        for j in i..=n as usize {
            if i + j <= n as usize {
                products.push(Product {
                    left: i,
                    right: j,
                    value: SparseVec::unit(i + j),
                });
            }
        }
    }
    FdAlgebra::new(basis, products).expect("truncated polynomial algebra")
}

/// Exterior algebra on odd generators of the given degrees.
pub fn exterior(degrees: &[u32]) -> FdAlgebra {
    assert!(degrees.iter().all(|d| d % 2 == 1));
    let n = degrees.len();
    let subsets: Vec<u32> = {
        let mut s: Vec<u32> = (0..1u32 << n).collect();
        s.sort_by_key(|&m| {
            let deg: u32 = (0..n).filter(|&i| m >> i & 1 == 1).map(|i| degrees[i]).sum();
            (deg, m)
        });
        s
    };
    let pos: HashMap<u32, usize> = subsets.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let basis = subsets
        .iter()
        .map(|&m| {
            let deg: u32 = (0..n).filter(|&i| m >> i & 1 == 1).map(|i| degrees[i]).sum();
            let name = if m == 0 {
                "1".to_string()
            } else {
                (0..n)
                    .filter(|&i| m >> i & 1 == 1)
                    .map(|i| format!("e{}", i + 1))
                    .collect::<Vec<_>>()
                    .join("")
            };
            (name, deg)
        })
        .collect();
    let mut products = Vec::new();
    for &a in &subsets {
        for &b in &subsets {
            if a == 0 || b == 0 || a & b != 0 {
                continue;
            }
            // sign of moving letters of b past the letters of a above them
            let mut swaps = 0;
            for j in 0..n {
                if b >> j & 1 == 1 {
                    swaps += (j + 1..n).filter(|&i| a >> i & 1 == 1).count();
                }
            }
            let c = if swaps % 2 == 1 { -Q::one() } else { Q::one() };
            products.push(Product {
                left: pos[&a],
                right: pos[&b],
                value: SparseVec::from_entries([(pos[&(a | b)], c)]),
            });
        }
    }
    FdAlgebra::new(basis, products).expect("exterior algebra")
}

/// `c * e_i`, or the zero vector when `c = 0`.
pub fn scalar_vec(i: usize, c: Q) -> SparseVec {
    if c.is_zero() {
        SparseVec::new()
    } else {
        SparseVec::from_entries([(i, c)])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Q {
        Q::from_integer(n.into())
    }

    #[test]
    fn degree_violation_rejected() {
        let err = FdAlgebra::new(
            vec![("1".into(), 0), ("x".into(), 2)],
            vec![Product {
                left: 1,
                right: 1,
                value: SparseVec::unit(1),
            }],
        )
        .unwrap_err();
        assert!(matches!(err, Error::NotGraded { .. }));
    }

    #[test]
    fn not_connected_rejected() {
        let err = FdAlgebra::new(vec![("1".into(), 0), ("u".into(), 0)], vec![]).unwrap_err();
        assert_eq!(err, Error::NotConnected);
    }

    #[test]
    fn odd_square_must_vanish() {
        let err = FdAlgebra::new(
            vec![("1".into(), 0), ("y".into(), 3), ("z".into(), 6)],
            vec![Product {
                left: 1,
                right: 1,
                value: SparseVec::unit(2),
            }],
        )
        .unwrap_err();
        assert!(matches!(err, Error::NotGradedCommutative { .. }));
    }

    #[test]
    fn non_associative_rejected() {
        // (x*x)*y = 0 but x*(x*y) = t
        let basis = vec![
            ("1".into(), 0),
            ("x".into(), 2),
            ("y".into(), 2),
            ("w".into(), 4),
            ("t".into(), 6),
        ];
        let products = vec![
            Product { left: 1, right: 2, value: SparseVec::unit(3) },
            Product { left: 1, right: 3, value: SparseVec::unit(4) },
        ];
        let err = FdAlgebra::new(basis, products).unwrap_err();
        assert!(matches!(err, Error::NotAssociative { .. }));
    }

    #[test]
    fn exterior_on_one_class() {
        let e = exterior(&[3]);
        assert_eq!(e.dim(), 2);
        assert_eq!(e.betti(), vec![1, 0, 0, 1]);
    }

    #[test]
    fn char_subspace_degrees() {
        let h = truncated_polynomial(2, 7);
        let degs = |k| {
            let s = char_subspace(&h, k);
            let mut d: Vec<u32> = s.basis().iter().map(|v| h.vec_degree(v).unwrap()).collect();
            d.sort();
            d
        };
        assert_eq!(degs(3), [4]);
        assert_eq!(degs(4), [4]);
        assert_eq!(degs(2), [2]);
        assert_eq!(degs(7), [4, 8, 12]);
        assert_eq!(degs(6), [4, 6, 8]);
    }

    #[test]
    fn subalgebra_of_powers() {
        let h = truncated_polynomial(2, 4);
        let s = subalgebra_generated(&h, &h.degree_subspace(2));
        assert_eq!(s.dim(), h.dim());
        let empty = subalgebra_generated(&h, &Subspace::zero(&h));
        assert_eq!(empty.dim(), 1);
    }

    #[test]
    fn tensor_sign() {
        let s3 = exterior(&[3]);
        let t = exterior(&[1]);
        let p = tensor(&s3, &t);
        assert_eq!(p.dim(), 4);
        // (1 x x1) * (y x 1) = -(y x x1)
        let one_x = p.index_of("1⊗e1").unwrap();
        let y_one = p.index_of("e1⊗1").unwrap();
        let y_x = p.index_of("e1⊗e1").unwrap();
        assert_eq!(*p.mul_basis(one_x, y_one), scalar_vec(y_x, q(-1)));
        assert_eq!(*p.mul_basis(y_one, one_x), scalar_vec(y_x, q(1)));
    }

    #[test]
    fn poincare_duality_checks() {
        assert!(poincare_check(&truncated_polynomial(2, 2), 4));
        let h = truncated_polynomial(2, 1);
        assert!(poincare_check(&h, 2));
        assert!(!poincare_check(&h, 4));
        // Q + H^2 + H^2 with zero products fails duality at m = 2
        let bad = FdAlgebra::new(
            vec![("1".into(), 0), ("a".into(), 2), ("b".into(), 2)],
            vec![],
        )
        .unwrap();
        assert!(!poincare_check(&bad, 2));
    }

    #[test]
    fn generated_in_degree() {
        assert!(is_generated_in_degree(&truncated_polynomial(2, 5), 2));
        assert!(!is_generated_in_degree(&exterior(&[3, 5]), 3));
    }
}
