//! Automorphisms of `H ⊗ H^*(T^d)` fixing `1 ⊗ H^*(T^d)`, written as
//! Taylor expansions `h(a ⊗ 1) = sum_i (1 ⊗ t_i)(c_i(a) ⊗ 1)`, and the
//! peeling factorization into derivation-built automorphisms.
//!
//! The torus basis is ordered by degree first, then lexicographically,
//! so that `t_{d+1}` is the first degree-2 monomial.

use std::fmt;

use num_traits::One;

use crate::derivation::Derivation;
use crate::fd::{char_subspace, FdAlgebra, Product};
use crate::linalg::{invert, Accumulator, SparseVec};
use crate::{Error, Result, Q};

/// Square-free monomials `t_0 = 1, t_1 = x_1, ..., t_{2^d - 1} = x_1...x_d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusBasis {
    d: u32,
    masks: Vec<u32>,
    position: Vec<usize>,
}

pub fn torus_basis(d: u32) -> TorusBasis {
    assert!((1..=16).contains(&d), "torus dimension must be in 1..=16");
    let mut masks: Vec<u32> = (0..1u32 << d).collect();
    let key = |m: &u32| {
        let bits: Vec<u32> = (0..d).filter(|b| m & (1 << b) != 0).collect();
        (m.count_ones(), bits)
    };
    masks.sort_by_key(key);
    let mut position = vec![0; masks.len()];
    for (i, &m) in masks.iter().enumerate() {
        position[m as usize] = i;
    }
    TorusBasis { d, masks, position }
}

impl TorusBasis {
    pub fn dim(&self) -> u32 {
        self.d
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn degree(&self, i: usize) -> u32 {
        self.masks[i].count_ones()
    }

    /// Variables `x_j` (1-based) occurring in `t_i`.
    pub fn variables(&self, i: usize) -> Vec<u32> {
        (0..self.d)
            .filter(|b| self.masks[i] & (1 << b) != 0)
            .map(|b| b + 1)
            .collect()
    }

    pub fn name(&self, i: usize) -> String {
        if i == 0 {
            return "1".into();
        }
        self.variables(i).iter().map(|j| format!("x{j}")).collect()
    }

    /// Index of the monomial with the given variable set.
    pub fn index_of_mask(&self, mask: u32) -> Option<usize> {
        self.position.get(mask as usize).copied()
    }

    pub fn mask(&self, i: usize) -> u32 {
        self.masks[i]
    }

    /// `t_i t_j = sign * t_k`, or `None` when the product vanishes.
    pub fn mul(&self, i: usize, j: usize) -> Option<(bool, usize)> {
        let (a, b) = (self.masks[i], self.masks[j]);
        if a & b != 0 {
            return None;
        }
        // pairs p in a, q in b with q < p
        let mut swaps = 0;
        for p in 0..self.d {
            if a & (1 << p) != 0 {
                swaps += (b & ((1 << p) - 1)).count_ones();
            }
        }
        Some((swaps % 2 == 1, self.position[(a | b) as usize]))
    }

    /// `H^*(T^d)` with this basis order and names `1, x1, x2, x1x2, ...`.
    pub fn algebra(&self) -> FdAlgebra {
        let n = self.len();
        let basis = (0..n).map(|i| (self.name(i), self.degree(i))).collect();
        let mut products = Vec::new();
        for i in 1..n {
            for j in i..n {
                if let Some((neg, k)) = self.mul(i, j) {
                    let c = if neg { -Q::one() } else { Q::one() };
                    products.push(Product {
                        left: i,
                        right: j,
                        value: SparseVec::from_entries([(k, c)]),
                    });
                }
            }
        }
        FdAlgebra::new(basis, products).expect("exterior algebra is valid")
    }
}

/// An automorphism of `H ⊗ H^*(T)` fixing `1 ⊗ H^*(T)`, stored by its
/// Taylor coefficients: `coeffs[i][a] = ∂h/∂t_i (b_a)`.
#[derive(Clone, PartialEq, Eq)]
pub struct ProductAutomorphism {
    base: FdAlgebra,
    torus: TorusBasis,
    coeffs: Vec<Vec<SparseVec>>,
}

impl fmt::Debug for ProductAutomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for a in 0..self.base.dim() {
            m.entry(&self.base.name(a), &self.format_image(a));
        }
        m.finish()
    }
}

impl ProductAutomorphism {
    /// Validates degrees, multiplicativity and invertibility.
    pub fn new(base: FdAlgebra, torus: TorusBasis, coeffs: Vec<Vec<SparseVec>>) -> Result<Self> {
        let h = Self::graded(base, torus, coeffs)?;
        h.validate()?;
        Ok(h)
    }

    /// Checks multiplicativity and invertibility.
    pub fn validate(&self) -> Result<()> {
        if let Some((a, b)) = self.multiplicativity_failure() {
            return Err(Error::InvalidArgument(format!(
                "map is not multiplicative on ({}, {})",
                self.base.name(a),
                self.base.name(b)
            )));
        }
        self.inverse_constant_term().map(|_| ())
    }

    fn graded(base: FdAlgebra, torus: TorusBasis, coeffs: Vec<Vec<SparseVec>>) -> Result<Self> {
        if coeffs.len() != torus.len() || coeffs.iter().any(|c| c.len() != base.dim()) {
            return Err(Error::InvalidArgument(format!(
                "expected {} coefficient maps on {} basis elements",
                torus.len(),
                base.dim()
            )));
        }
        for (i, maps) in coeffs.iter().enumerate() {
            for (a, v) in maps.iter().enumerate() {
                let want = base.degree(a) as i64 - torus.degree(i) as i64;
                if v.iter().any(|(k, _)| base.degree(k) as i64 != want) {
                    return Err(Error::DegreeMismatch {
                        what: format!("coefficient of t_{i} on {}", base.name(a)),
                        expected: want,
                        found: base.format_vec(v),
                    });
                }
            }
        }
        Ok(Self {
            base,
            torus,
            coeffs,
        })
    }

    pub fn identity(base: &FdAlgebra, torus: &TorusBasis) -> Self {
        let mut coeffs = vec![vec![SparseVec::new(); base.dim()]; torus.len()];
        coeffs[0] = (0..base.dim()).map(SparseVec::unit).collect();
        Self {
            base: base.clone(),
            torus: torus.clone(),
            coeffs,
        }
    }

    /// `P ⊗ id` for an automorphism `P` of `H` given by its columns.
    pub fn constant(base: &FdAlgebra, torus: &TorusBasis, p: Vec<SparseVec>) -> Result<Self> {
        let mut coeffs = vec![vec![SparseVec::new(); base.dim()]; torus.len()];
        coeffs[0] = p;
        Self::new(base.clone(), torus.clone(), coeffs)
    }

    /// Reads images `h(b_a ⊗ 1)` given in coordinates of
    /// `tensor(base, torus.algebra())`. Only the grading is checked; call
    /// [`ProductAutomorphism::validate`] or [`peel`] for the rest.
    pub fn from_tensor_images(base: &FdAlgebra, torus: &TorusBasis, images: &[SparseVec]) -> Result<Self> {
        if images.len() != base.dim() {
            return Err(Error::InvalidArgument(format!(
                "expected {} images, got {}",
                base.dim(),
                images.len()
            )));
        }
        let nt = torus.len();
        let mut coeffs = vec![vec![SparseVec::new(); base.dim()]; nt];
        for (a, v) in images.iter().enumerate() {
            let mut parts: Vec<Vec<(usize, Q)>> = vec![Vec::new(); nt];
            for (k, c) in v.iter() {
                let (b, i) = (k / nt, k % nt);
                if b >= base.dim() {
                    return Err(Error::InvalidArgument("tensor index out of range".into()));
                }
                // (1 ⊗ t)(b ⊗ 1) = (-1)^{|t||b|} b ⊗ t
                let neg = (torus.degree(i) * base.degree(b)) % 2 == 1;
                parts[i].push((b, if neg { -c.clone() } else { c.clone() }));
            }
            for (i, p) in parts.into_iter().enumerate() {
                coeffs[i][a] = SparseVec::from_entries(p);
            }
        }
        Self::graded(base.clone(), torus.clone(), coeffs)
    }

    pub fn base(&self) -> &FdAlgebra {
        &self.base
    }

    pub fn torus(&self) -> &TorusBasis {
        &self.torus
    }

    /// `∂h/∂t_i` as a map on basis images.
    pub fn coefficient_map(&self, i: usize) -> &[SparseVec] {
        &self.coeffs[i]
    }

    /// `∂h/∂t_i (a)` for every `i`.
    pub fn partial_derivatives(&self, a: &SparseVec) -> Vec<SparseVec> {
        self.coeffs
            .iter()
            .map(|maps| apply_map(maps, a))
            .collect()
    }

    /// `h(a ⊗ 1)` in coordinates of `tensor(base, torus.algebra())`.
    pub fn image_in_tensor(&self, a: &SparseVec) -> SparseVec {
        let nt = self.torus.len();
        let mut entries = Vec::new();
        for (i, c) in self.partial_derivatives(a).into_iter().enumerate() {
            for (b, x) in c.iter() {
                let neg = (self.torus.degree(i) * self.base.degree(b)) % 2 == 1;
                entries.push((b * nt + i, if neg { -x.clone() } else { x.clone() }));
            }
        }
        SparseVec::from_entries(entries)
    }

    /// Human-readable `h(b_a ⊗ 1)` as `sum t_i * (c_i)`.
    pub fn format_image(&self, a: usize) -> String {
        let parts: Vec<String> = (0..self.torus.len())
            .filter(|&i| !self.coeffs[i][a].is_zero())
            .map(|i| {
                let c = self.base.format_vec(&self.coeffs[i][a]);
                if i == 0 {
                    c
                } else {
                    format!("{} ({c})", self.torus.name(i))
                }
            })
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(&self.base, &self.torus)
    }

    /// Coefficients of `h(x) h(y)` for coefficient vectors `x`, `y`.
    fn product_expansion(&self, x: &[SparseVec], y: &[SparseVec], deg_x: u32) -> Vec<SparseVec> {
        let nt = self.torus.len();
        let mut out: Vec<Accumulator> = (0..nt).map(|_| Accumulator::new()).collect();
        for i in 0..nt {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..nt {
                if y[j].is_zero() {
                    continue;
                }
                let Some((neg, k)) = self.torus.mul(i, j) else { continue };
                // (t_i c)(t_j c') = (-1)^{|c||t_j|} t_i t_j c c'
                let deg_c = deg_x - self.torus.degree(i);
                let flip = (deg_c * self.torus.degree(j)) % 2 == 1;
                let sign = if neg ^ flip { -Q::one() } else { Q::one() };
                out[k].add_scaled(&sign, &self.base.mul(&x[i], &y[j]));
            }
        }
        out.into_iter().map(Accumulator::finish).collect()
    }

    fn multiplicativity_failure(&self) -> Option<(usize, usize)> {
        let dim = self.base.dim();
        for a in 0..dim {
            let ca: Vec<SparseVec> = (0..self.torus.len()).map(|i| self.coeffs[i][a].clone()).collect();
            for b in 0..dim {
                let cb: Vec<SparseVec> = (0..self.torus.len()).map(|i| self.coeffs[i][b].clone()).collect();
                let rhs = self.product_expansion(&ca, &cb, self.base.degree(a));
                let lhs = self.partial_derivatives(self.base.mul_basis(a, b));
                if lhs != rhs {
                    return Some((a, b));
                }
            }
        }
        None
    }

    /// Inverse of `∂h/∂t_0`.
    fn inverse_constant_term(&self) -> Result<Vec<SparseVec>> {
        invert(&self.coeffs[0]).ok_or_else(|| {
            let bad = self
                .base
                .nonzero_degrees()
                .find(|&n| {
                    let idx = self.base.basis_in_degree(n as i64);
                    let cols: Vec<SparseVec> = idx.iter().map(|&a| self.coeffs[0][a].clone()).collect();
                    crate::linalg::rank(&cols) < idx.len()
                })
                .unwrap_or(0);
            Error::NotInvertible(bad)
        })
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &ProductAutomorphism) -> Result<Self> {
        if self.base != other.base || self.torus != other.torus {
            return Err(Error::MixedAlgebras);
        }
        let nt = self.torus.len();
        let dim = self.base.dim();
        let mut coeffs = vec![vec![SparseVec::new(); dim]; nt];
        for a in 0..dim {
            let mut acc: Vec<Accumulator> = (0..nt).map(|_| Accumulator::new()).collect();
            for i in 0..nt {
                let inner = &other.coeffs[i][a];
                if inner.is_zero() {
                    continue;
                }
                for j in 0..nt {
                    let Some((neg, k)) = self.torus.mul(i, j) else { continue };
                    let v = apply_map(&self.coeffs[j], inner);
                    acc[k].add_scaled(&if neg { -Q::one() } else { Q::one() }, &v);
                }
            }
            for (k, x) in acc.into_iter().enumerate() {
                coeffs[k][a] = x.finish();
            }
        }
        Ok(Self {
            base: self.base.clone(),
            torus: self.torus.clone(),
            coeffs,
        })
    }

    /// Whether `Char(H, k) ⊗ 1` is mapped into itself.
    pub fn char_fixed(&self, k: u32) -> bool {
        let s = char_subspace(&self.base, k);
        s.basis().iter().all(|b| {
            let parts = self.partial_derivatives(b);
            s.contains(&parts[0]) && parts[1..].iter().all(SparseVec::is_zero)
        })
    }
}

fn apply_map(cols: &[SparseVec], v: &SparseVec) -> SparseVec {
    let mut acc = Accumulator::new();
    for (i, c) in v.iter() {
        acc.add_scaled(c, &cols[i]);
    }
    acc.finish()
}

/// `a ⊗ t -> a ⊗ t + (1 ⊗ t_i)(D(a) ⊗ t)`; its inverse uses `-D`.
pub fn derivation_automorphism(d: &Derivation, torus: &TorusBasis, i: usize) -> Result<ProductAutomorphism> {
    if i == 0 || i >= torus.len() {
        return Err(Error::InvalidTorusIndex(i));
    }
    let want = -(torus.degree(i) as i64);
    if d.degree() != want {
        return Err(Error::DegreeMismatch {
            what: format!("derivation for t_{i} = {}", torus.name(i)),
            expected: want,
            found: d.degree().to_string(),
        });
    }
    let base = d.ambient();
    let mut h = ProductAutomorphism::identity(base, torus);
    h.coeffs[i] = d.images().to_vec();
    debug_assert!(h.multiplicativity_failure().is_none());
    Ok(h)
}

/// The result of peeling: `h = A(D_1) ∘ ... ∘ A(D_n) ∘ (P ⊗ id)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Peel {
    /// Nonzero corrections `(i, D_i)` in torus index order.
    pub steps: Vec<(usize, Derivation)>,
    /// `∂h/∂t_0` when it was not the identity and normalization was requested.
    pub normalization: Option<Vec<SparseVec>>,
}

impl Peel {
    pub fn recompose(&self, base: &FdAlgebra, torus: &TorusBasis) -> Result<ProductAutomorphism> {
        let mut h = ProductAutomorphism::identity(base, torus);
        for (i, d) in &self.steps {
            h = h.compose(&derivation_automorphism(d, torus, *i)?)?;
        }
        if let Some(p) = &self.normalization {
            h = h.compose(&ProductAutomorphism::constant(base, torus, p.clone())?)?;
        }
        Ok(h)
    }
}

/// Factors `h` into derivation automorphisms, one torus index at a time.
///
/// Each coefficient is re-extracted after the previous corrections and
/// must be a derivation of degree `-|t_i|`. With `normalize`, a nontrivial
/// `∂h/∂t_0 = P` is first removed by composing with `P^{-1} ⊗ id`.
pub fn peel(h: &ProductAutomorphism, normalize: bool) -> Result<Peel> {
    let base = h.base();
    let torus = h.torus();
    let id: Vec<SparseVec> = (0..base.dim()).map(SparseVec::unit).collect();
    let mut normalization = None;
    let mut g = h.clone();
    if h.coeffs[0] != id {
        if !normalize {
            return Err(Error::NotNormalized);
        }
        let p_inv = h.inverse_constant_term()?;
        g = g.compose(&ProductAutomorphism::constant(base, torus, p_inv)?)?;
        normalization = Some(h.coeffs[0].clone());
    }
    let mut steps = Vec::new();
    for i in 1..torus.len() {
        let c = g.coeffs[i].clone();
        if c.iter().all(SparseVec::is_zero) {
            continue;
        }
        let d = Derivation::new(base.clone(), -(torus.degree(i) as i64), c)
            .map_err(|_| Error::NonMultiplicative { index: i })?;
        g = derivation_automorphism(&d.neg(), torus, i)?.compose(&g)?;
        steps.push((i, d));
    }
    if !g.is_identity() {
        return Err(Error::NonMultiplicative { index: 0 });
    }
    Ok(Peel {
        steps,
        normalization,
    })
}
