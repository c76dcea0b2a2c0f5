//! Derivations of finite-dimensional algebras, chain derivations of
//! Sullivan algebras, the induced map to cohomology and the rigidity
//! verdict.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::dga::{cohomology_algebra, CohomologyResult, CohomologyRing, Dga};
use crate::fd::{char_subspace, FdAlgebra, Subspace};
use crate::gca::{apply_derivation, Element, Monomial};
use crate::linalg::{kernel, kernel_of_columns, Accumulator, Echelon, SparseVec};
use crate::{Error, Result, Q};

fn koszul_neg(a: i64, b: i64) -> bool {
    a.rem_euclid(2) == 1 && b.rem_euclid(2) == 1
}

/// A graded derivation of an [`FdAlgebra`].
///
/// `images[i]` is `D(b_i)`; it lies in degree `|b_i| + degree`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    ambient: FdAlgebra,
    degree: i64,
    images: Vec<SparseVec>,
}

impl Derivation {
    /// Validates grading and Leibniz on every basis pair.
    pub fn new(ambient: FdAlgebra, degree: i64, images: Vec<SparseVec>) -> Result<Self> {
        let d = Self::unchecked(ambient, degree, images)?;
        if let Some((i, j)) = d.leibniz_failure() {
            return Err(Error::NotDerivation {
                i: d.ambient.name(i).to_string(),
                j: d.ambient.name(j).to_string(),
            });
        }
        Ok(d)
    }

    /// Checks only the grading.
    fn unchecked(ambient: FdAlgebra, degree: i64, images: Vec<SparseVec>) -> Result<Self> {
        if images.len() != ambient.dim() {
            return Err(Error::InvalidArgument(format!(
                "derivation needs {} images, got {}",
                ambient.dim(),
                images.len()
            )));
        }
        for (i, v) in images.iter().enumerate() {
            let want = ambient.degree(i) as i64 + degree;
            if v.iter().any(|(k, _)| ambient.degree(k) as i64 != want) {
                return Err(Error::DegreeMismatch {
                    what: format!("D({})", ambient.name(i)),
                    expected: want,
                    found: ambient.format_vec(v),
                });
            }
        }
        Ok(Self {
            ambient,
            degree,
            images,
        })
    }

    pub fn zero(ambient: &FdAlgebra, degree: i64) -> Self {
        Self {
            ambient: ambient.clone(),
            degree,
            images: vec![SparseVec::new(); ambient.dim()],
        }
    }

    /// Builds a derivation from its values on named basis elements; the
    /// rest map to zero.
    pub fn from_named(ambient: &FdAlgebra, degree: i64, values: &[(&str, SparseVec)]) -> Result<Self> {
        let mut images = vec![SparseVec::new(); ambient.dim()];
        for (name, v) in values {
            let i = ambient
                .index_of(name)
                .ok_or_else(|| Error::UnknownSymbol(name.to_string()))?;
            images[i] = v.clone();
        }
        Self::new(ambient.clone(), degree, images)
    }

    pub fn ambient(&self) -> &FdAlgebra {
        &self.ambient
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn images(&self) -> &[SparseVec] {
        &self.images
    }

    pub fn image(&self, i: usize) -> &SparseVec {
        &self.images[i]
    }

    pub fn is_zero(&self) -> bool {
        self.images.iter().all(SparseVec::is_zero)
    }

    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut acc = Accumulator::new();
        for (i, c) in v.iter() {
            acc.add_scaled(c, &self.images[i]);
        }
        acc.finish()
    }

    /// First basis pair on which Leibniz fails.
    pub fn leibniz_failure(&self) -> Option<(usize, usize)> {
        let h = &self.ambient;
        let dim = h.dim();
        (0..dim).find_map(|i| {
            (0..dim)
                .find(|&j| {
                    let lhs = self.apply(h.mul_basis(i, j));
                    let mut rhs = h.mul(&self.images[i], &SparseVec::unit(j));
                    let second = h.mul(&SparseVec::unit(i), &self.images[j]);
                    if koszul_neg(self.degree, h.degree(i) as i64) {
                        rhs = rhs.sub(&second);
                    } else {
                        rhs = rhs.add(&second);
                    }
                    lhs != rhs
                })
                .map(|j| (i, j))
        })
    }

    /// Coordinates in the flattened space of graded maps, index `i * dim + j`.
    pub fn flatten(&self) -> SparseVec {
        let dim = self.ambient.dim();
        SparseVec::from_entries(
            self.images
                .iter()
                .enumerate()
                .flat_map(|(i, v)| v.iter().map(move |(j, c)| (i * dim + j, c.clone()))),
        )
    }

    fn unflatten(ambient: &FdAlgebra, degree: i64, v: &SparseVec) -> Self {
        let dim = ambient.dim();
        let mut images: Vec<Vec<(usize, Q)>> = vec![Vec::new(); dim];
        for (k, c) in v.iter() {
            images[k / dim].push((k % dim, c.clone()));
        }
        Self {
            ambient: ambient.clone(),
            degree,
            images: images.into_iter().map(SparseVec::from_entries).collect(),
        }
    }

    /// `sum c_i D_i`; all terms must share ambient and degree.
    pub fn linear_combination(terms: &[(Q, &Derivation)]) -> Result<Self> {
        let (_, first) = terms
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty linear combination".into()))?;
        let mut acc = Accumulator::new();
        for (c, d) in terms {
            if d.ambient != first.ambient {
                return Err(Error::MixedAlgebras);
            }
            if d.degree != first.degree {
                return Err(Error::DegreeMismatch {
                    what: "derivation in a linear combination".into(),
                    expected: first.degree,
                    found: d.degree.to_string(),
                });
            }
            acc.add_scaled(c, &d.flatten());
        }
        Ok(Self::unflatten(&first.ambient, first.degree, &acc.finish()))
    }

    pub fn scaled(&self, c: &Q) -> Self {
        Self {
            ambient: self.ambient.clone(),
            degree: self.degree,
            images: self.images.iter().map(|v| v.scaled(c)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scaled(&-Q::from_integer(1.into()))
    }

    /// `x -> a * D(x)` for homogeneous `a`.
    pub fn left_multiply(&self, a: &SparseVec) -> Result<Self> {
        let h = &self.ambient;
        let da = match h.vec_degree(a) {
            Some(d) => d as i64,
            None if a.is_zero() => 0,
            None => {
                return Err(Error::InvalidArgument(
                    "multiplier must be homogeneous".into(),
                ))
            }
        };
        let images = self.images.iter().map(|v| h.mul(a, v)).collect();
        Self::new(h.clone(), self.degree + da, images)
    }

    /// First vector of `s` not killed by `self`, with its image.
    pub fn first_unkilled(&self, s: &Subspace) -> Option<(SparseVec, SparseVec)> {
        s.basis().into_iter().find_map(|b| {
            let img = self.apply(&b);
            (!img.is_zero()).then_some((b, img))
        })
    }

    pub fn kills(&self, s: &Subspace) -> bool {
        self.first_unkilled(s).is_none()
    }

    /// Nonzero values on basis elements, as `(name, value)` strings.
    pub fn describe(&self) -> Vec<(String, String)> {
        self.images
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(i, v)| (self.ambient.name(i).to_string(), self.ambient.format_vec(v)))
            .collect()
    }
}

/// Canonical reduced echelon basis of the span of derivations of one degree.
fn echelon_basis(ambient: &FdAlgebra, degree: i64, flat: Vec<SparseVec>) -> Vec<Derivation> {
    Echelon::from_vectors(flat)
        .rows()
        .iter()
        .map(|v| Derivation::unflatten(ambient, degree, v))
        .collect()
}

/// Basis of `Der_n(H)` in reduced echelon form over the flattened
/// coordinates `D(b_i)_j`.
pub fn derivation_space(h: &FdAlgebra, n: i64) -> Vec<Derivation> {
    let dim = h.dim();
    let unit = h.unit();
    // unknown u(i, j): coefficient of b_j in D(b_i), for i != unit
    let mut slots: Vec<Vec<(usize, usize)>> = vec![Vec::new(); dim];
    let mut count = 0usize;
    let mut flat_of = Vec::new();
    for i in 0..dim {
        if i == unit {
            continue;
        }
        for &j in h.basis_in_degree(h.degree(i) as i64 + n) {
            slots[i].push((j, count));
            flat_of.push(i * dim + j);
            count += 1;
        }
    }
    if count == 0 {
        return Vec::new();
    }
    let rows: Vec<SparseVec> = (0..dim)
        .into_par_iter()
        .filter(|&a| a != unit)
        .flat_map_iter(|a| {
            let slots = &slots;
            let mut out = Vec::new();
            for b in 0..dim {
                if b == unit {
                    continue;
                }
                let neg = koszul_neg(n, h.degree(a) as i64);
                // row per output coordinate k
                let mut per_k: BTreeMap<usize, Accumulator> = BTreeMap::new();
                for (c, coef) in h.mul_basis(a, b).iter() {
                    for &(k, u) in &slots[c] {
                        per_k.entry(k).or_default().add_entry(u, coef.clone());
                    }
                }
                for &(j, u) in &slots[a] {
                    for (k, coef) in h.mul_basis(j, b).iter() {
                        per_k.entry(k).or_default().add_entry(u, -coef.clone());
                    }
                }
                for &(j, u) in &slots[b] {
                    for (k, coef) in h.mul_basis(a, j).iter() {
                        let c = if neg { coef.clone() } else { -coef.clone() };
                        per_k.entry(k).or_default().add_entry(u, c);
                    }
                }
                out.extend(per_k.into_values().map(Accumulator::finish).filter(|r| !r.is_zero()));
            }
            out
        })
        .collect();
    let sols = kernel(rows, count);
    let flat = sols
        .iter()
        .map(|s| s.map_indices(|u| flat_of[u]))
        .collect();
    echelon_basis(h, n, flat)
}

/// A derivation of a [`Dga`]'s algebra whose graded commutator with `d`
/// vanishes: `D d = (-1)^{|D|} d D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainDerivation {
    dga: Dga,
    degree: i64,
    images: Vec<Element>,
}

impl ChainDerivation {
    pub fn new(dga: Dga, degree: i64, images: Vec<Element>) -> Result<Self> {
        let alg = dga.algebra();
        if images.len() != alg.ngens() {
            return Err(Error::InvalidArgument(format!(
                "chain derivation needs {} images, got {}",
                alg.ngens(),
                images.len()
            )));
        }
        for (g, v) in alg.generators().iter().zip(&images) {
            if v.algebra() != alg {
                return Err(Error::MixedAlgebras);
            }
            let want = g.degree as i64 + degree;
            let ok = v.is_zero() || (want >= 0 && v.degree().admits(want as u32));
            if !ok {
                return Err(Error::DegreeMismatch {
                    what: format!("D({})", g.name),
                    expected: want,
                    found: v.to_string(),
                });
            }
        }
        let d = Self {
            dga,
            degree,
            images,
        };
        for (i, g) in d.dga.generators().iter().enumerate() {
            if !d.commutator_on(i).is_zero() {
                return Err(Error::NotChainDerivation(g.name.clone()));
            }
        }
        Ok(d)
    }

    /// Builds a chain derivation from named values; the rest map to zero.
    pub fn from_assignments(dga: &Dga, degree: i64, values: Vec<(String, Element)>) -> Result<Self> {
        let alg = dga.algebra();
        let mut images = vec![alg.zero(); alg.ngens()];
        for (name, v) in values {
            let i = alg
                .index_of(&name)
                .ok_or_else(|| Error::UnknownSymbol(name.clone()))?;
            images[i] = v;
        }
        Self::new(dga.clone(), degree, images)
    }

    /// The exact chain derivation `[d, s] = d s - (-1)^{|s|} s d` for a
    /// derivation `s` given on generators.
    pub fn boundary(dga: &Dga, s_degree: i64, s_images: &[Element]) -> Result<Self> {
        let alg = dga.algebra();
        let images = (0..alg.ngens())
            .map(|i| {
                let ds = dga.differential(&s_images[i])?;
                let sd = apply_derivation(s_images, s_degree, dga.d_gen(i));
                Ok(if s_degree.rem_euclid(2) == 1 { &ds + &sd } else { &ds - &sd })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(dga.clone(), s_degree + 1, images)
    }

    pub fn dga(&self) -> &Dga {
        &self.dga
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn images(&self) -> &[Element] {
        &self.images
    }

    /// Value on the named generator.
    pub fn on(&self, name: &str) -> Option<&Element> {
        self.dga.algebra().index_of(name).map(|i| &self.images[i])
    }

    pub fn is_zero(&self) -> bool {
        self.images.iter().all(Element::is_zero)
    }

    pub fn apply(&self, x: &Element) -> Result<Element> {
        if x.algebra() != self.dga.algebra() {
            return Err(Error::MixedAlgebras);
        }
        Ok(apply_derivation(&self.images, self.degree, x))
    }

    fn commutator_on(&self, i: usize) -> Element {
        commutator(&self.dga, &self.images, self.degree, i)
    }
}

/// `D(d g_i) - (-1)^n d(D g_i)`.
fn commutator(dga: &Dga, images: &[Element], n: i64, i: usize) -> Element {
    let lhs = apply_derivation(images, n, dga.d_gen(i));
    let rhs = dga.differential(&images[i]).expect("same algebra");
    if n.rem_euclid(2) == 1 {
        &lhs + &rhs
    } else {
        &lhs - &rhs
    }
}

/// Basis of degree-`n` chain derivations, in reduced echelon form over
/// the unknowns (generator, monomial) in canonical order.
pub fn chain_derivation_space(m: &Dga, n: i64) -> Vec<ChainDerivation> {
    let alg = m.algebra();
    let gens = alg.generators();
    let basis_at = |deg: i64| -> Vec<Monomial> {
        if deg < 0 {
            Vec::new()
        } else {
            alg.basis_in_degree(deg as u32)
        }
    };
    let mut unknowns: Vec<(usize, Monomial)> = Vec::new();
    for (i, g) in gens.iter().enumerate() {
        for mono in basis_at(g.degree as i64 + n) {
            unknowns.push((i, mono));
        }
    }
    if unknowns.is_empty() {
        return Vec::new();
    }
    // constraint coordinates: per generator g, the basis of degree |g| + n + 1
    let mut offsets = Vec::with_capacity(gens.len());
    let mut indices = Vec::with_capacity(gens.len());
    let mut total = 0;
    for g in gens {
        let b = basis_at(g.degree as i64 + n + 1);
        offsets.push(total);
        total += b.len();
        indices.push(crate::gca::FreeGca::basis_index(&b));
    }
    let one = Q::from_integer(1.into());
    let columns: Vec<SparseVec> = unknowns
        .par_iter()
        .map(|(h, mono)| {
            let mut images = vec![alg.zero(); gens.len()];
            images[*h] = alg.term(one.clone(), mono.clone());
            let mut entries = Vec::new();
            for g in 0..gens.len() {
                let c = commutator(m, &images, n, g);
                let v = c.to_coords(&indices[g]).expect("commutator is homogeneous");
                entries.extend(v.iter().map(|(k, x)| (offsets[g] + k, x.clone())));
            }
            SparseVec::from_entries(entries)
        })
        .collect();
    kernel_of_columns(&columns)
        .into_iter()
        .map(|v| {
            let mut images = vec![alg.zero(); gens.len()];
            for (u, c) in v.iter() {
                let (h, mono) = &unknowns[u];
                images[*h] = &images[*h] + &alg.term(c.clone(), mono.clone());
            }
            ChainDerivation {
                dga: m.clone(),
                degree: n,
                images,
            }
        })
        .collect()
}

/// The class-level map `[z] -> [D z]` on the exported ring.
pub fn induced_on_cohomology(ring: &CohomologyRing, d: &ChainDerivation) -> Result<Derivation> {
    if d.dga() != ring.dga() {
        return Err(Error::MixedAlgebras);
    }
    let h = ring.ring();
    let res = ring.result();
    let images = (0..h.dim())
        .map(|idx| {
            let (n, z) = ring.representative(idx);
            let target = n as i64 + d.degree();
            if target < 0 {
                return Ok(SparseVec::new());
            }
            let target = target as u32;
            if target > res.max_degree() {
                return Err(Error::InsufficientDegree {
                    needed: target,
                    computed: res.max_degree(),
                });
            }
            ring.class_of(&d.apply(z)?, target)
        })
        .collect::<Result<Vec<_>>>()?;
    Derivation::new(h.clone(), d.degree(), images)
}

/// Echelon basis of the image of chain derivations in `Der_n(H)` for each
/// `n` in `degrees`.
pub fn induced_image(
    ring: &CohomologyRing,
    degrees: impl IntoIterator<Item = i64>,
) -> Result<BTreeMap<i64, Vec<Derivation>>> {
    let degrees: Vec<i64> = degrees.into_iter().collect();
    degrees
        .into_par_iter()
        .map(|n| {
            let induced = chain_derivation_space(ring.dga(), n)
                .iter()
                .map(|c| induced_on_cohomology(ring, c).map(|d| d.flatten()))
                .collect::<Result<Vec<_>>>()?;
            Ok((n, echelon_basis(ring.ring(), n, induced)))
        })
        .collect()
}

/// The coefficient of `a_i ⊗ -` in the restriction of a derivation of
/// `A ⊗ B` to `1 ⊗ B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestrictionPart {
    /// Basis index in `A`.
    pub a: usize,
    /// `|D| - |a_i|`.
    pub degree: i64,
    /// `D_i(b_j)` in `B`.
    pub images: Vec<SparseVec>,
    /// Every image has degree `|b_j| + degree`.
    pub graded: bool,
    /// `Some` when the map satisfies Leibniz.
    pub derivation: Option<Derivation>,
}

/// Writes `D(1 ⊗ b) = sum_i a_i ⊗ D_i(b)` and reports each nonzero `D_i`.
pub fn decompose_restriction(a: &FdAlgebra, b: &FdAlgebra, d: &Derivation) -> Result<Vec<RestrictionPart>> {
    let t = d.ambient();
    let (da, db) = (a.dim(), b.dim());
    let shape_ok = t.dim() == da * db
        && (0..da).all(|i| (0..db).all(|j| t.degree(i * db + j) == a.degree(i) + b.degree(j)));
    if !shape_ok {
        return Err(Error::InvalidArgument(
            "derivation does not live on the tensor product of the given algebras".into(),
        ));
    }
    let unit_a = a.unit();
    let mut maps: BTreeMap<usize, Vec<Vec<(usize, Q)>>> = BTreeMap::new();
    for j in 0..db {
        for (k, c) in d.image(unit_a * db + j).iter() {
            let (i, q) = (k / db, k % db);
            maps.entry(i).or_insert_with(|| vec![Vec::new(); db])[j].push((q, c.clone()));
        }
    }
    Ok(maps
        .into_iter()
        .map(|(i, imgs)| {
            let images: Vec<SparseVec> = imgs.into_iter().map(SparseVec::from_entries).collect();
            let degree = d.degree() - a.degree(i) as i64;
            let graded = images.iter().enumerate().all(|(j, v)| {
                v.iter()
                    .all(|(q, _)| b.degree(q) as i64 == b.degree(j) as i64 + degree)
            });
            let derivation = Derivation::new(b.clone(), degree, images.clone()).ok();
            RestrictionPart {
                a: i,
                degree,
                images,
                graded,
                derivation,
            }
        })
        .collect())
}

/// `D ⊗ 1` on `t = A ⊗ B` for `D` a derivation of `A`.
pub fn extend_left(d: &Derivation, b: &FdAlgebra, t: &FdAlgebra) -> Result<Derivation> {
    let db = b.dim();
    let images = (0..t.dim())
        .map(|k| d.image(k / db).map_indices(|p| p * db + k % db))
        .collect();
    Derivation::new(t.clone(), d.degree(), images)
}

/// `1 ⊗ D` on `t = A ⊗ B`: `x ⊗ y -> (-1)^{|D||x|} x ⊗ D(y)`.
pub fn extend_right(a: &FdAlgebra, d: &Derivation, t: &FdAlgebra) -> Result<Derivation> {
    let db = d.ambient().dim();
    let images = (0..t.dim())
        .map(|k| {
            let (i, j) = (k / db, k % db);
            let v = d.image(j).map_indices(|q| i * db + q);
            if koszul_neg(d.degree(), a.degree(i) as i64) {
                v.neg()
            } else {
                v
            }
        })
        .collect();
    Derivation::new(t.clone(), d.degree(), images)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Check every negative derivation of `H`.
    Cohomology,
    /// Check only derivations induced from the model.
    Model,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Cohomology => "cohomology",
            Mode::Model => "model",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Rigid,
    NotRigid,
    Indeterminate,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Rigid => "rigid",
            Verdict::NotRigid => "not_rigid",
            Verdict::Indeterminate => "indeterminate",
        }
    }
}

/// Parameters of a rigidity check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RigidityQuery {
    pub torus_dim: u32,
    /// Bundle rank `k`.
    pub rank: u32,
    pub mode: Mode,
    /// Check every negative degree against all of `H^even` instead.
    pub class_h: bool,
}

/// A derivation that moves a class of the checked subspace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub derivation: Derivation,
    pub element: SparseVec,
    pub image: SparseVec,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RigidityReport {
    pub verdict: Verdict,
    pub mode: Mode,
    /// Checked degrees, inclusive.
    pub degrees: (i64, i64),
    /// Dimension of the checked derivation space per degree.
    pub dims: BTreeMap<i64, usize>,
    /// The subspace derivations must kill.
    pub target: Subspace,
    /// One witness per failing degree, in increasing degree.
    pub witnesses: Vec<Witness>,
    pub note: Option<String>,
}

/// Decides whether every checked negative derivation kills `Char(H, k)`.
///
/// Model mode needs the cohomology computation of a model of `H`; its
/// exported ring must coincide with `h`.
pub fn rigidity_report(
    h: &FdAlgebra,
    q: &RigidityQuery,
    model: Option<&CohomologyResult>,
) -> Result<RigidityReport> {
    if q.torus_dim == 0 {
        return Err(Error::InvalidArgument("torus dimension must be at least 1".into()));
    }
    if q.rank < 2 && !q.class_h {
        return Err(Error::InvalidArgument("bundle rank must be at least 2".into()));
    }
    let top = h.top_degree();
    let lo = if q.class_h { -(top.max(1) as i64) } else { -(q.torus_dim as i64) };
    let degrees = (lo, -1);
    let target = if q.class_h {
        h.positive_even_subspace()
    } else {
        char_subspace(h, q.rank)
    };
    let spaces: BTreeMap<i64, Vec<Derivation>> = match q.mode {
        Mode::Cohomology => (lo..=-1)
            .into_par_iter()
            .map(|n| (n, derivation_space(h, n)))
            .collect(),
        Mode::Model => {
            let res = model.ok_or_else(|| {
                Error::InvalidArgument("model mode needs a Sullivan model".into())
            })?;
            let exported = match cohomology_algebra(res, top) {
                Ok(r) => r,
                Err(e @ (Error::TruncationUnsound { .. } | Error::InsufficientDegree { .. })) => {
                    return Ok(RigidityReport {
                        verdict: Verdict::Indeterminate,
                        mode: q.mode,
                        degrees,
                        dims: BTreeMap::new(),
                        target,
                        witnesses: Vec::new(),
                        note: Some(e.to_string()),
                    })
                }
                Err(e) => return Err(e),
            };
            if &exported != h {
                return Err(Error::ModelMismatch(format!(
                    "model exports betti {:?}, ring has {:?}",
                    exported.betti(),
                    h.betti()
                )));
            }
            let ring = CohomologyRing::new(res.clone(), top)?;
            induced_image(&ring, lo..=-1)?
        }
    };
    let dims = spaces.iter().map(|(n, s)| (*n, s.len())).collect();
    let witnesses: Vec<Witness> = spaces
        .values()
        .filter_map(|space| {
            space.iter().find_map(|d| {
                d.first_unkilled(&target).map(|(element, image)| Witness {
                    derivation: d.clone(),
                    element,
                    image,
                })
            })
        })
        .collect();
    let verdict = if witnesses.is_empty() {
        Verdict::Rigid
    } else {
        Verdict::NotRigid
    };
    Ok(RigidityReport {
        verdict,
        mode: q.mode,
        degrees,
        dims,
        target,
        witnesses,
        note: None,
    })
}
