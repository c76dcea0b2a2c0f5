//! Sullivan algebras: differentials, purity, cohomology with class
//! representatives, export of the cohomology ring, Cartan models of
//! biquotients and the lower grading.

use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;
use rayon::prelude::*;

use crate::fd::{FdAlgebra, Product};
use crate::gca::{apply_derivation, AlgebraMorphism, Degree, Element, FreeGca, Generator, Monomial};
use crate::linalg::{kernel_of_columns, Echelon, SparseVec};
use crate::{Error, Result, Q};

/// A free graded-commutative algebra with a degree +1 differential.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dga {
    alg: FreeGca,
    d: Vec<Element>,
}

impl Dga {
    /// Validates degrees and `d^2 = 0` on every generator.
    pub fn new(alg: FreeGca, d: Vec<Element>) -> Result<Self> {
        if d.len() != alg.ngens() {
            return Err(Error::InvalidArgument(format!(
                "differential needs {} values, got {}",
                alg.ngens(),
                d.len()
            )));
        }
        for (g, dg) in alg.generators().iter().zip(&d) {
            if dg.algebra() != &alg {
                return Err(Error::MixedAlgebras);
            }
            if !dg.degree().admits(g.degree + 1) {
                return Err(Error::DegreeMismatch {
                    what: format!("d({})", g.name),
                    expected: g.degree as i64 + 1,
                    found: dg.to_string(),
                });
            }
        }
        let m = Self { alg, d };
        for (i, g) in m.alg.generators().iter().enumerate() {
            let dd = apply_derivation(&m.d, 1, &m.d[i]);
            if !dd.is_zero() {
                return Err(Error::D2NotZero {
                    generator: g.name.clone(),
                    residue: dd.to_string(),
                });
            }
        }
        Ok(m)
    }

    /// Builds a DGA from named assignments; unassigned generators are closed.
    pub fn from_assignments(alg: FreeGca, assignments: Vec<(String, Element)>) -> Result<Self> {
        let mut d = vec![alg.zero(); alg.ngens()];
        for (name, value) in assignments {
            let i = alg
                .index_of(&name)
                .ok_or_else(|| Error::UnknownSymbol(name.clone()))?;
            d[i] = value;
        }
        Self::new(alg, d)
    }

    /// Zero differential.
    pub fn trivial(alg: FreeGca) -> Self {
        let d = vec![alg.zero(); alg.ngens()];
        Self { alg, d }
    }

    pub fn algebra(&self) -> &FreeGca {
        &self.alg
    }

    pub fn generators(&self) -> &[Generator] {
        self.alg.generators()
    }

    /// `d` on generator `i`.
    pub fn d_gen(&self, i: usize) -> &Element {
        &self.d[i]
    }

    pub fn d_values(&self) -> &[Element] {
        &self.d
    }

    pub fn differential(&self, x: &Element) -> Result<Element> {
        if x.algebra() != &self.alg {
            return Err(Error::MixedAlgebras);
        }
        Ok(apply_derivation(&self.d, 1, x))
    }

    /// Whether even generators are closed and each odd generator maps into
    /// the subalgebra generated by even generators. With `strict`, odd
    /// generators must map into the linear span of even generators.
    pub fn is_pure_with(&self, strict: bool) -> bool {
        let gens = self.generators();
        gens.iter().zip(&self.d).all(|(g, dg)| {
            if !g.is_odd() {
                return dg.is_zero();
            }
            if !dg.uses_only(|i| !gens[i].is_odd()) {
                return false;
            }
            !strict
                || dg
                    .terms()
                    .all(|(m, _)| m.exponents().iter().sum::<u32>() == 1)
        })
    }

    pub fn is_pure(&self) -> bool {
        self.is_pure_with(false)
    }

    /// Columns of `d: M^n -> M^{n+1}` in the canonical bases.
    fn d_columns(&self, src: &[Monomial], tgt_index: &HashMap<Monomial, usize>) -> Vec<SparseVec> {
        src.iter()
            .map(|m| {
                let x = self.alg.term(Q::from_integer(1.into()), m.clone());
                apply_derivation(&self.d, 1, &x)
                    .to_coords(tgt_index)
                    .expect("d raises degree by one")
            })
            .collect()
    }
}

#[derive(Clone, Debug)]
struct DegreeData {
    basis: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
    prev_basis: Vec<Monomial>,
    cycles: usize,
    reps: Vec<Element>,
    /// image vectors tagged by `prev_basis` position, then representatives
    /// tagged by `prev_basis.len() + r`
    reducer: Echelon,
}

/// Degree-truncated cohomology of a [`Dga`] with chosen representatives.
#[derive(Clone, Debug)]
pub struct CohomologyResult {
    dga: Dga,
    max_degree: u32,
    degrees: Vec<DegreeData>,
}

/// A cocycle split as `z = sum coords[i] * rep_i + d(primitive)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassReduction {
    pub degree: u32,
    pub coords: Vec<Q>,
    pub primitive: Element,
}

/// Computes `H^n` for `0 <= n <= max_degree`.
///
/// Representatives are the reduced kernel basis vectors of `d_n` that are
/// independent of `im d_{n-1}`, taken in canonical order.
pub fn cohomology(m: &Dga, max_degree: u32) -> CohomologyResult {
    let alg = m.algebra();
    let bases: Vec<Vec<Monomial>> = (0..=max_degree + 1)
        .into_par_iter()
        .map(|n| alg.basis_in_degree(n))
        .collect();
    let indices: Vec<HashMap<Monomial, usize>> =
        bases.par_iter().map(|b| FreeGca::basis_index(b)).collect();
    // columns of d_n for n in 0..=max_degree
    let dcols: Vec<Vec<SparseVec>> = (0..=max_degree as usize)
        .into_par_iter()
        .map(|n| m.d_columns(&bases[n], &indices[n + 1]))
        .collect();
    let degrees: Vec<DegreeData> = (0..=max_degree as usize)
        .into_par_iter()
        .map(|n| {
            let kernel = kernel_of_columns(&dcols[n]);
            let prev_basis = if n == 0 { Vec::new() } else { bases[n - 1].clone() };
            let mut reducer = Echelon::tracked();
            if n > 0 {
                for (t, col) in dcols[n - 1].iter().enumerate() {
                    reducer.insert_tagged(col.clone(), t);
                }
            }
            let offset = prev_basis.len();
            let mut reps = Vec::new();
            for z in &kernel {
                if reducer.insert_tagged(z.clone(), offset + reps.len()) {
                    reps.push(alg.from_coords(&bases[n], z));
                }
            }
            DegreeData {
                basis: bases[n].clone(),
                index: indices[n].clone(),
                prev_basis,
                cycles: kernel.len(),
                reps,
                reducer,
            }
        })
        .collect();
    CohomologyResult {
        dga: m.clone(),
        max_degree,
        degrees,
    }
}

impl CohomologyResult {
    pub fn dga(&self) -> &Dga {
        &self.dga
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn betti(&self, n: u32) -> usize {
        self.degrees.get(n as usize).map_or(0, |d| d.reps.len())
    }

    /// Betti numbers in degrees `0..=max_degree`.
    pub fn betti_vector(&self) -> Vec<usize> {
        self.degrees.iter().map(|d| d.reps.len()).collect()
    }

    /// Degrees with nonzero cohomology.
    pub fn nonzero_degrees(&self) -> Vec<u32> {
        (0..=self.max_degree).filter(|&n| self.betti(n) > 0).collect()
    }

    pub fn representatives(&self, n: u32) -> &[Element] {
        self.degrees
            .get(n as usize)
            .map_or(&[], |d| d.reps.as_slice())
    }

    /// Dimension of the cocycles in degree `n`.
    pub fn cycles_dim(&self, n: u32) -> usize {
        self.degrees.get(n as usize).map_or(0, |d| d.cycles)
    }

    /// Dimension of the cochains in degree `n`.
    pub fn chains_dim(&self, n: u32) -> usize {
        self.degrees.get(n as usize).map_or(0, |d| d.basis.len())
    }

    /// Expresses a cocycle through the representatives plus a boundary.
    pub fn reduce(&self, z: &Element) -> Result<ClassReduction> {
        if z.algebra() != self.dga.algebra() {
            return Err(Error::MixedAlgebras);
        }
        let n = match z.degree() {
            Degree::Zero => {
                return Err(Error::InvalidArgument(
                    "reduce needs a degree for the zero element; use reduce_in_degree".into(),
                ))
            }
            Degree::Homogeneous(n) => n,
            Degree::Mixed => return Err(Error::NotCocycle(z.to_string())),
        };
        self.reduce_in_degree(z, n)
    }

    pub fn reduce_in_degree(&self, z: &Element, n: u32) -> Result<ClassReduction> {
        if !z.degree().admits(n) {
            return Err(Error::NotCocycle(z.to_string()));
        }
        if n > self.max_degree {
            return Err(Error::InsufficientDegree {
                needed: n,
                computed: self.max_degree,
            });
        }
        if !self.dga.differential(z)?.is_zero() {
            return Err(Error::NotCocycle(z.to_string()));
        }
        let data = &self.degrees[n as usize];
        let v = z.to_coords(&data.index)?;
        let red = data.reducer.reduce(&v);
        debug_assert!(red.remainder.is_zero(), "cocycles lie in the span");
        let offset = data.prev_basis.len();
        let mut coords = vec![Q::zero(); data.reps.len()];
        let mut prim = Vec::new();
        for (t, c) in red.combo.iter() {
            if t >= offset {
                coords[t - offset] = c.clone();
            } else {
                prim.push((t, c.clone()));
            }
        }
        let primitive = self
            .dga
            .algebra()
            .from_coords(&data.prev_basis, &SparseVec::from_entries(prim));
        Ok(ClassReduction {
            degree: n,
            coords,
            primitive,
        })
    }

    /// Positions of the first class of each degree in the exported ring.
    pub fn class_offsets(&self, top: u32) -> Vec<usize> {
        let mut offsets = Vec::with_capacity(top as usize + 1);
        let mut acc = 0;
        for n in 0..=top {
            offsets.push(acc);
            acc += self.betti(n);
        }
        offsets
    }

    /// Coordinates of a cocycle in the ring exported with [`cohomology_algebra`].
    pub fn ring_coords(&self, z: &Element, n: u32, top: u32) -> Result<SparseVec> {
        if n > top {
            return Ok(SparseVec::new());
        }
        let red = self.reduce_in_degree(z, n)?;
        let off = self.class_offsets(top)[n as usize];
        Ok(SparseVec::from_entries(
            red.coords
                .into_iter()
                .enumerate()
                .map(|(i, c)| (off + i, c)),
        ))
    }

    /// Degree and representative cocycle of ring basis element `idx`.
    pub fn ring_representative(&self, idx: usize, top: u32) -> Option<(u32, &Element)> {
        let offsets = self.class_offsets(top);
        let n = (0..=top).find(|&d| {
            let o = offsets[d as usize];
            o <= idx && idx < o + self.betti(d)
        })?;
        Some((n, &self.representatives(n)[idx - offsets[n as usize]]))
    }
}

/// Names used for the exported ring basis: `1`, `h4`, `h7_1`, `h7_2`, ...
pub fn class_name(n: u32, i: usize, betti: usize) -> String {
    match (n, betti) {
        (0, _) => "1".to_string(),
        (_, 1) => format!("h{n}"),
        _ => format!("h{n}_{}", i + 1),
    }
}

/// Exports `H^{<= top}` as an [`FdAlgebra`].
///
/// Refuses unless cohomology vanishes in `(top, top + max generator degree]`.
pub fn cohomology_algebra(res: &CohomologyResult, top: u32) -> Result<FdAlgebra> {
    let window = top + res.dga.algebra().max_generator_degree();
    if res.max_degree < window {
        return Err(Error::InsufficientDegree {
            needed: window,
            computed: res.max_degree,
        });
    }
    if let Some(n) = (top + 1..=window).find(|&n| res.betti(n) != 0) {
        return Err(Error::TruncationUnsound {
            degree: n,
            betti: res.betti(n),
        });
    }
    let mut basis = Vec::new();
    let mut classes = Vec::new();
    for n in 0..=top {
        let b = res.betti(n);
        for i in 0..b {
            basis.push((class_name(n, i, b), n));
            classes.push((n, &res.representatives(n)[i]));
        }
    }
    let products: Vec<Product> = (0..classes.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let classes = &classes;
            (i..classes.len()).filter_map(move |j| {
                let (ni, zi) = classes[i];
                let (nj, zj) = classes[j];
                if ni == 0 || nj == 0 || ni + nj > top {
                    return None;
                }
                let value = res
                    .ring_coords(&(zi * zj), ni + nj, top)
                    .expect("products of cocycles are cocycles");
                Some(Product {
                    left: i,
                    right: j,
                    value,
                })
            })
        })
        .collect();
    FdAlgebra::new(basis, products)
}

/// A cohomology ring exported together with the computation it came from,
/// so classes can be moved between cocycles and ring coordinates.
#[derive(Clone, Debug)]
pub struct CohomologyRing {
    res: CohomologyResult,
    top: u32,
    ring: FdAlgebra,
}

impl CohomologyRing {
    pub fn new(res: CohomologyResult, top: u32) -> Result<Self> {
        let ring = cohomology_algebra(&res, top)?;
        Ok(Self { res, top, ring })
    }

    /// Computes cohomology far enough to export the ring at `top`.
    pub fn of_model(m: &Dga, top: u32) -> Result<Self> {
        let res = cohomology(m, top + m.algebra().max_generator_degree());
        Self::new(res, top)
    }

    pub fn ring(&self) -> &FdAlgebra {
        &self.ring
    }

    pub fn result(&self) -> &CohomologyResult {
        &self.res
    }

    pub fn dga(&self) -> &Dga {
        self.res.dga()
    }

    pub fn top(&self) -> u32 {
        self.top
    }

    /// Ring coordinates of a cocycle of degree `n`.
    pub fn class_of(&self, z: &Element, n: u32) -> Result<SparseVec> {
        self.res.ring_coords(z, n, self.top)
    }

    /// Degree and representative of ring basis element `idx`.
    pub fn representative(&self, idx: usize) -> (u32, &Element) {
        self.res
            .ring_representative(idx, self.top)
            .expect("ring index in range")
    }
}

/// Input data for the Cartan model of a biquotient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiquotientData {
    /// Polynomial algebra `H^*(B_H)`; all generators even.
    pub bh: FreeGca,
    /// Odd generators `q_i` as `(name, degree)`.
    pub q: Vec<(String, u32)>,
    /// `dbar(q_i)` in `bh`, of degree `|q_i| + 1`.
    pub dbar: Vec<Element>,
}

impl BiquotientData {
    pub fn new(bh: FreeGca, q: Vec<(String, u32)>, dbar: Vec<Element>) -> Result<Self> {
        if let Some(g) = bh.generators().iter().find(|g| g.is_odd()) {
            return Err(Error::DegreeMismatch {
                what: format!("bh generator `{}`", g.name),
                expected: g.degree as i64 + 1,
                found: format!("odd degree {}", g.degree),
            });
        }
        if q.len() != dbar.len() {
            return Err(Error::InvalidArgument("every q generator needs a dbar value".into()));
        }
        for ((name, deg), v) in q.iter().zip(&dbar) {
            if deg % 2 == 0 {
                return Err(Error::DegreeMismatch {
                    what: format!("q generator `{name}`"),
                    expected: *deg as i64 + 1,
                    found: format!("even degree {deg}"),
                });
            }
            if v.algebra() != &bh {
                return Err(Error::MixedAlgebras);
            }
            if !v.degree().admits(deg + 1) {
                return Err(Error::DegreeMismatch {
                    what: format!("dbar({name})"),
                    expected: *deg as i64 + 1,
                    found: v.to_string(),
                });
            }
        }
        Ok(Self { bh, q, dbar })
    }
}

/// `H^*(B_H) ⊗ Λ(q_1, ..., q_n)` with `dbar` on the `q_i` and zero on `B_H`.
pub fn cartan_model(data: &BiquotientData) -> Result<Dga> {
    let mut gens: Vec<Generator> = data.bh.generators().to_vec();
    gens.extend(data.q.iter().map(|(n, d)| Generator::new(n.clone(), *d)));
    let alg = FreeGca::new(gens)?;
    let nb = data.bh.ngens();
    let embed = |x: &Element| {
        let mut out = alg.zero();
        for (m, c) in x.terms() {
            let mut exps = m.exponents().to_vec();
            exps.resize(alg.ngens(), 0);
            out = &out + &alg.term(c.clone(), alg.monomial(&exps).expect("even monomial"));
        }
        out
    };
    let mut d = vec![alg.zero(); alg.ngens()];
    for (i, v) in data.dbar.iter().enumerate() {
        d[nb + i] = embed(v);
    }
    Dga::new(alg, d)
}

/// Dimensions of `H^n_k`, cohomology graded by wordlength in the `q_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LowerGrading {
    pub max_degree: u32,
    /// `(n, k) -> dim H^n_k`, nonzero entries only.
    pub dims: BTreeMap<(u32, usize), usize>,
}

impl LowerGrading {
    pub fn dim(&self, n: u32, k: usize) -> usize {
        self.dims.get(&(n, k)).copied().unwrap_or(0)
    }

    /// Largest wordlength carrying nonzero cohomology.
    pub fn max_wordlength(&self) -> Option<usize> {
        self.dims.keys().map(|&(_, k)| k).max()
    }

    pub fn total(&self, n: u32) -> usize {
        self.dims
            .iter()
            .filter(|((m, _), _)| *m == n)
            .map(|(_, d)| d)
            .sum()
    }
}

/// Splits the cohomology of a Cartan model by `q`-wordlength.
pub fn lower_grading(data: &BiquotientData, res: &CohomologyResult) -> Result<LowerGrading> {
    let model = cartan_model(data)?;
    if &model != res.dga() {
        return Err(Error::NotCartanModel);
    }
    let alg = model.algebra();
    let nb = data.bh.ngens();
    let wordlength = |m: &Monomial| -> usize { m.exponents()[nb..].iter().sum::<u32>() as usize };
    let n_max = res.max_degree();
    let bases: Vec<Vec<Monomial>> = (0..=n_max + 1).map(|n| alg.basis_in_degree(n)).collect();
    // per (n, k): the monomials and an index
    let split = |n: usize| {
        let mut parts: BTreeMap<usize, Vec<Monomial>> = BTreeMap::new();
        for m in &bases[n] {
            parts.entry(wordlength(m)).or_default().push(m.clone());
        }
        parts
    };
    let parts: Vec<BTreeMap<usize, Vec<Monomial>>> = (0..=n_max as usize + 1).map(split).collect();
    // rank of d restricted to M^n_k -> M^{n+1}_{k-1}
    let rank_from = |n: usize, k: usize| -> usize {
        let Some(src) = parts[n].get(&k) else { return 0 };
        if k == 0 {
            return 0;
        }
        let Some(tgt) = parts[n + 1].get(&(k - 1)) else { return 0 };
        let idx = FreeGca::basis_index(tgt);
        let cols = model.d_columns(src, &idx);
        Echelon::from_vectors(cols).rank()
    };
    let mut dims = BTreeMap::new();
    for n in 0..=n_max as usize {
        for (&k, ms) in &parts[n] {
            let cycles = ms.len() - rank_from(n, k);
            let boundaries = if n == 0 { 0 } else { rank_from(n - 1, k + 1) };
            let h = cycles - boundaries;
            if h > 0 {
                dims.insert((n as u32, k), h);
            }
        }
    }
    Ok(LowerGrading {
        max_degree: n_max,
        dims,
    })
}

/// Whether `phi` commutes with the differentials on every source generator.
pub fn check_dga_morphism(source: &Dga, target: &Dga, phi: &AlgebraMorphism) -> Result<bool> {
    if phi.source() != source.algebra() || phi.target() != target.algebra() {
        return Err(Error::MixedAlgebras);
    }
    for (i, img) in phi.images().iter().enumerate() {
        let lhs = phi.apply(source.d_gen(i))?;
        let rhs = target.differential(img)?;
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}
