//! Free graded-commutative algebras over the rationals.
//!
//! Even generators are polynomial, odd generators exterior. Monomials are
//! exponent vectors in the fixed generator order and always represent the
//! ordered product `g_1^e_1 * g_2^e_2 * ...`; moving letters into that order
//! produces the Koszul sign.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::linalg::SparseVec;
use crate::{Error, Result, Q};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Generator {
    pub name: String,
    pub degree: u32,
}

impl Generator {
    pub fn new(name: impl Into<String>, degree: u32) -> Self {
        Self {
            name: name.into(),
            degree,
        }
    }

    pub fn is_odd(&self) -> bool {
        self.degree % 2 == 1
    }
}

/// A monomial with its total degree cached.
///
/// Ordered by total degree, then by exponent vector in decreasing
/// lexicographic order, so `y4*x7` precedes `x11`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    degree: u32,
    exps: Box<[u32]>,
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree
            .cmp(&other.degree)
            .then_with(|| other.exps.cmp(&self.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Monomial {
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exps
    }

    pub fn is_one(&self) -> bool {
        self.degree == 0
    }
}

struct Inner {
    gens: Vec<Generator>,
    index: HashMap<String, usize>,
}

/// A free graded-commutative algebra on an ordered list of generators.
///
/// Cheap to clone; equality compares generator lists.
#[derive(Clone)]
pub struct FreeGca(Arc<Inner>);

impl PartialEq for FreeGca {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.gens == other.0.gens
    }
}

impl Eq for FreeGca {}

impl fmt::Debug for FreeGca {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.0.gens.iter().map(|g| format!("{}:{}", g.name, g.degree)))
            .finish()
    }
}

impl FreeGca {
    pub fn new(gens: Vec<Generator>) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, g) in gens.iter().enumerate() {
            if g.degree == 0 {
                return Err(Error::NonPositiveDegree(g.name.clone()));
            }
            if index.insert(g.name.clone(), i).is_some() {
                return Err(Error::DuplicateName(g.name.clone()));
            }
        }
        Ok(Self(Arc::new(Inner { gens, index })))
    }

    /// Convenience constructor from `(name, degree)` pairs.
    pub fn from_pairs(pairs: &[(&str, u32)]) -> Result<Self> {
        Self::new(pairs.iter().map(|(n, d)| Generator::new(*n, *d)).collect())
    }

    pub fn generators(&self) -> &[Generator] {
        &self.0.gens
    }

    pub fn ngens(&self) -> usize {
        self.0.gens.len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.index.get(name).copied()
    }

    pub fn max_generator_degree(&self) -> u32 {
        self.0.gens.iter().map(|g| g.degree).max().unwrap_or(0)
    }

    pub(crate) fn is_odd(&self, i: usize) -> bool {
        self.0.gens[i].is_odd()
    }

    pub fn monomial_one(&self) -> Monomial {
        Monomial {
            degree: 0,
            exps: vec![0; self.ngens()].into_boxed_slice(),
        }
    }

    /// The monomial with the given exponents, or `None` if an odd generator
    /// appears more than once (such products vanish).
    pub fn monomial(&self, exps: &[u32]) -> Option<Monomial> {
        assert_eq!(exps.len(), self.ngens(), "exponent vector has wrong length");
        let mut degree = 0;
        for (i, &e) in exps.iter().enumerate() {
            if e > 1 && self.is_odd(i) {
                return None;
            }
            degree += e * self.0.gens[i].degree;
        }
        Some(Monomial {
            degree,
            exps: exps.into(),
        })
    }

    fn generator_monomial(&self, i: usize) -> Monomial {
        let mut exps = vec![0; self.ngens()];
        exps[i] = 1;
        Monomial {
            degree: self.0.gens[i].degree,
            exps: exps.into_boxed_slice(),
        }
    }

    /// Product of two monomials with its Koszul sign, or `None` if it vanishes.
    pub fn mul_monomials(&self, a: &Monomial, b: &Monomial) -> Option<(bool, Monomial)> {
        let mut negative = false;
        let mut odd_in_a_after = 0u32;
        // walk from the last generator down; count odd letters of `a` that a
        // letter of `b` must pass.
        for i in (0..self.ngens()).rev() {
            if !self.is_odd(i) {
                continue;
            }
            if b.exps[i] == 1 {
                if a.exps[i] == 1 {
                    return None;
                }
                if odd_in_a_after % 2 == 1 {
                    negative = !negative;
                }
            }
            if a.exps[i] == 1 {
                odd_in_a_after += 1;
            }
        }
        let exps: Box<[u32]> = a.exps.iter().zip(b.exps.iter()).map(|(x, y)| x + y).collect();
        Some((
            negative,
            Monomial {
                degree: a.degree + b.degree,
                exps,
            },
        ))
    }

    /// All monomials of total degree `n`, in canonical order.
    pub fn basis_in_degree(&self, n: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        let mut exps = vec![0u32; self.ngens()];
        self.enumerate(0, n, &mut exps, &mut out);
        out.sort();
        out
    }

    fn enumerate(&self, i: usize, remaining: u32, exps: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if i == self.ngens() {
            if remaining == 0 {
                out.push(Monomial {
                    degree: exps
                        .iter()
                        .zip(&self.0.gens)
                        .map(|(e, g)| e * g.degree)
                        .sum(),
                    exps: exps.clone().into_boxed_slice(),
                });
            }
            return;
        }
        let d = self.0.gens[i].degree;
        let max = if self.is_odd(i) { 1 } else { remaining / d };
        for e in 0..=max.min(remaining / d) {
            exps[i] = e;
            self.enumerate(i + 1, remaining - e * d, exps, out);
        }
        exps[i] = 0;
    }

    pub fn zero(&self) -> Element {
        Element {
            alg: self.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(&self) -> Element {
        self.constant(Q::one())
    }

    pub fn constant(&self, c: Q) -> Element {
        self.term(c, self.monomial_one())
    }

    pub fn term(&self, c: Q, m: Monomial) -> Element {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Element {
            alg: self.clone(),
            terms,
        }
    }

    pub fn gen(&self, i: usize) -> Element {
        self.term(Q::one(), self.generator_monomial(i))
    }

    /// The generator with the given name.
    pub fn var(&self, name: &str) -> Result<Element> {
        self.index_of(name)
            .map(|i| self.gen(i))
            .ok_or_else(|| Error::UnknownSymbol(name.to_string()))
    }

    /// Index map for a degree basis, used to turn elements into coordinates.
    pub fn basis_index(basis: &[Monomial]) -> HashMap<Monomial, usize> {
        basis.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect()
    }

    pub fn from_coords(&self, basis: &[Monomial], v: &SparseVec) -> Element {
        let mut terms = BTreeMap::new();
        for (i, c) in v.iter() {
            terms.insert(basis[i].clone(), c.clone());
        }
        Element {
            alg: self.clone(),
            terms,
        }
    }

    pub fn format_monomial(&self, m: &Monomial) -> String {
        if m.is_one() {
            return "1".to_string();
        }
        let mut parts = Vec::new();
        for (i, &e) in m.exps.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(self.0.gens[i].name.clone()),
                _ => parts.push(format!("{}^{}", self.0.gens[i].name, e)),
            }
        }
        parts.join(" ")
    }
}

/// Homogeneity of an element; zero is homogeneous of every degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Degree {
    Zero,
    Homogeneous(u32),
    Mixed,
}

impl Degree {
    pub fn admits(self, n: u32) -> bool {
        match self {
            Degree::Zero => true,
            Degree::Homogeneous(d) => d == n,
            Degree::Mixed => false,
        }
    }
}

/// A rational combination of monomials of a [`FreeGca`].
#[derive(Clone, PartialEq, Eq)]
pub struct Element {
    alg: FreeGca,
    terms: BTreeMap<Monomial, Q>,
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Element {
    pub fn algebra(&self) -> &FreeGca {
        &self.alg
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> + '_ {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, m: &Monomial) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(Q::zero)
    }

    pub fn degree(&self) -> Degree {
        let mut degs = self.terms.keys().map(|m| m.degree);
        match degs.next() {
            None => Degree::Zero,
            Some(d) => {
                if degs.all(|e| e == d) {
                    Degree::Homogeneous(d)
                } else {
                    Degree::Mixed
                }
            }
        }
    }

    fn check_same(&self, other: &Element) -> Result<()> {
        if self.alg == other.alg {
            Ok(())
        } else {
            Err(Error::MixedAlgebras)
        }
    }

    pub fn try_add(&self, other: &Element) -> Result<Element> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Element) -> Result<Element> {
        self.check_same(other)?;
        let mut out = self.alg.zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some((neg, m)) = self.alg.mul_monomials(ma, mb) {
                    let c = ca * cb;
                    out.add_term(m, if neg { -c } else { c });
                }
            }
        }
        Ok(out)
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Q) -> Element {
        if c.is_zero() {
            return self.alg.zero();
        }
        Element {
            alg: self.alg.clone(),
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Element {
        let mut out = self.alg.one();
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Coordinates with respect to an indexed degree basis. Monomials missing
    /// from the index are reported as an error.
    pub fn to_coords(&self, index: &HashMap<Monomial, usize>) -> Result<SparseVec> {
        let mut entries = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let i = index.get(m).ok_or_else(|| Error::DegreeMismatch {
                what: "coordinate basis".into(),
                expected: -1,
                found: self.alg.format_monomial(m),
            })?;
            entries.push((*i, c.clone()));
        }
        Ok(SparseVec::from_entries(entries))
    }

    /// Whether every term lies in the subalgebra generated by the generators
    /// selected by `allowed`.
    pub fn uses_only(&self, allowed: impl Fn(usize) -> bool) -> bool {
        self.terms.keys().all(|m| {
            m.exps
                .iter()
                .enumerate()
                .all(|(i, &e)| e == 0 || allowed(i))
        })
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let (sign, abs) = if c.is_negative() {
                ("-", -c)
            } else {
                ("+", c.clone())
            };
            if k == 0 {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let mono = self.alg.format_monomial(m);
            if m.is_one() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{abs} {mono}")?;
            }
        }
        Ok(())
    }
}

impl Add for &Element {
    type Output = Element;
    /// Panics on operands from different algebras; see [`Element::try_add`].
    fn add(self, rhs: &Element) -> Element {
        self.try_add(rhs).expect("mixed algebras")
    }
}

impl Sub for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        self.try_add(&-rhs).expect("mixed algebras")
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.scale(&-Q::one())
    }
}

impl Mul for &Element {
    type Output = Element;
    /// Panics on operands from different algebras; see [`Element::try_mul`].
    fn mul(self, rhs: &Element) -> Element {
        self.try_mul(rhs).expect("mixed algebras")
    }
}

/// Applies the derivation of the given degree determined by its values on
/// generators. `images[i]` is the value on generator `i`.
///
/// Uses `D(ab) = D(a) b + (-1)^{|D||a|} a D(b)`.
pub fn apply_derivation(images: &[Element], degree: i64, x: &Element) -> Element {
    let alg = x.algebra();
    let n = alg.ngens();
    let mut out = alg.zero();
    for (m, c) in x.terms() {
        let mut prefix = alg.monomial_one();
        for i in 0..n {
            let e = m.exps[i];
            if e == 0 {
                continue;
            }
            let img = &images[i];
            if !img.is_zero() {
                // prefix * (e * g^{e-1} * D(g)) * suffix
                let mut lower = m.exps.to_vec();
                lower[i] = e - 1;
                for j in 0..=i {
                    lower[j] = 0;
                }
                let mut mid = vec![0u32; n];
                mid[i] = e - 1;
                let mid = alg.monomial(&mid).expect("valid power");
                let suffix = alg.monomial(&lower).expect("valid suffix");
                let sign_neg = (degree.rem_euclid(2) == 1) && (prefix.degree % 2 == 1);
                let scale = Q::from_integer(e.into()) * c;
                let scale = if sign_neg { -scale } else { scale };
                for (tm, tc) in img.terms() {
                    let Some((n1, p1)) = alg.mul_monomials(&prefix, &mid) else {
                        continue;
                    };
                    let Some((n2, p2)) = alg.mul_monomials(&p1, tm) else {
                        continue;
                    };
                    let Some((n3, p3)) = alg.mul_monomials(&p2, &suffix) else {
                        continue;
                    };
                    let coef = &scale * tc;
                    out.add_term(p3, if n1 ^ n2 ^ n3 { -coef } else { coef });
                }
            }
            let mut next = prefix.exps.to_vec();
            next[i] = e;
            prefix = alg.monomial(&next).expect("prefix of a valid monomial");
        }
    }
    out
}

/// A degree-preserving algebra map given on generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraMorphism {
    source: FreeGca,
    target: FreeGca,
    images: Vec<Element>,
}

impl AlgebraMorphism {
    pub fn new(source: FreeGca, target: FreeGca, images: Vec<Element>) -> Result<Self> {
        if images.len() != source.ngens() {
            return Err(Error::InvalidArgument(format!(
                "morphism needs {} generator images, got {}",
                source.ngens(),
                images.len()
            )));
        }
        for (g, img) in source.generators().iter().zip(&images) {
            if img.algebra() != &target {
                return Err(Error::MixedAlgebras);
            }
            if !img.degree().admits(g.degree) {
                return Err(Error::DegreeMismatch {
                    what: format!("image of `{}`", g.name),
                    expected: g.degree as i64,
                    found: img.to_string(),
                });
            }
        }
        Ok(Self {
            source,
            target,
            images,
        })
    }

    pub fn identity(alg: &FreeGca) -> Self {
        Self {
            source: alg.clone(),
            target: alg.clone(),
            images: (0..alg.ngens()).map(|i| alg.gen(i)).collect(),
        }
    }

    pub fn source(&self) -> &FreeGca {
        &self.source
    }

    pub fn target(&self) -> &FreeGca {
        &self.target
    }

    pub fn images(&self) -> &[Element] {
        &self.images
    }

    pub fn apply(&self, x: &Element) -> Result<Element> {
        if x.algebra() != &self.source {
            return Err(Error::MixedAlgebras);
        }
        let mut out = self.target.zero();
        for (m, c) in x.terms() {
            let mut prod = self.target.constant(c.clone());
            for (i, &e) in m.exponents().iter().enumerate() {
                for _ in 0..e {
                    prod = &prod * &self.images[i];
                }
            }
            out = &out + &prod;
        }
        Ok(out)
    }
}
