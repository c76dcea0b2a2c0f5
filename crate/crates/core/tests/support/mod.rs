//! Shared fixtures and an independent Leibniz solver.
#![allow(dead_code)]

use num_traits::{One, Zero};
use rho_core::catalog;
use rho_core::dga::{cartan_model, CohomologyRing, CohomologyResult};
use rho_core::dsl::ModelKind;
use rho_core::fd::FdAlgebra;
use rho_core::Q;

pub fn golden(name: &str) -> Vec<usize> {
    let path = format!("{}/tests/golden/{name}", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(&path).unwrap();
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .flat_map(|l| l.split_whitespace().map(|x| x.parse().unwrap()).collect::<Vec<_>>())
        .collect()
}

/// A catalog entry as a cohomology ring, with the model computation when
/// the entry is a model.
pub struct CatalogRing {
    pub name: String,
    pub ring: FdAlgebra,
    pub model: Option<CohomologyRing>,
}

pub fn catalog_ring(name: &str) -> CatalogRing {
    let m = catalog::catalog(name).unwrap();
    let (ring, model) = match &m.kind {
        ModelKind::Fd { algebra } => (algebra.clone(), None),
        ModelKind::Dga { dga, top } => {
            let r = CohomologyRing::of_model(dga, top.unwrap()).unwrap();
            (r.ring().clone(), Some(r))
        }
        ModelKind::Biquotient { data, top } => {
            let r = CohomologyRing::of_model(&cartan_model(data).unwrap(), top.unwrap()).unwrap();
            (r.ring().clone(), Some(r))
        }
    };
    CatalogRing { name: name.to_string(), ring, model }
}

pub fn catalog_rings() -> Vec<CatalogRing> {
    catalog::sample_names().iter().map(|n| catalog_ring(n)).collect()
}

impl CatalogRing {
    pub fn result(&self) -> Option<&CohomologyResult> {
        self.model.as_ref().map(CohomologyRing::result)
    }
}

/// Null space of a dense rational matrix, by plain Gauss-Jordan.
pub fn null_space(rows: Vec<Vec<Q>>, ncols: usize) -> Vec<Vec<Q>> {
    let mut m = rows;
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = Q::one() / m[r][c].clone();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..ncols {
                    let t = &m[r][j] * &f;
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Q::zero(); ncols];
            v[f] = Q::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -m[i][f].clone();
            }
            v
        })
        .collect()
}

pub fn rank(rows: Vec<Vec<Q>>, ncols: usize) -> usize {
    ncols - null_space(rows, ncols).len()
}

/// Every graded linear map of degree `n` as an unknown, every Leibniz
/// identity on pairs of basis elements as an equation. Returns the
/// solution space as dense vectors indexed by `i * dim + j` for the
/// coefficient of `b_j` in `D(b_i)`.
pub fn brute_force_derivations(h: &FdAlgebra, n: i64) -> Vec<Vec<Q>> {
    let dim = h.dim();
    let unknowns = dim * dim;
    let allowed = |i: usize, j: usize| h.degree(j) as i64 == h.degree(i) as i64 + n;
    let coef = |v: &rho_core::linalg::SparseVec, k: usize| v.get(k);
    let mut rows = Vec::new();
    for a in 0..dim {
        for b in 0..dim {
            let sign = if (n * h.degree(a) as i64).rem_euclid(2) == 1 { -Q::one() } else { Q::one() };
            for k in 0..dim {
                let mut row = vec![Q::zero(); unknowns];
                for c in 0..dim {
                    let m = coef(h.mul_basis(a, b), c);
                    if !m.is_zero() && allowed(c, k) {
                        row[c * dim + k] += m;
                    }
                }
                for p in 0..dim {
                    let m = coef(h.mul_basis(p, b), k);
                    if !m.is_zero() && allowed(a, p) {
                        row[a * dim + p] -= m;
                    }
                    let m = coef(h.mul_basis(a, p), k);
                    if !m.is_zero() && allowed(b, p) {
                        row[b * dim + p] -= &sign * m;
                    }
                }
                if row.iter().any(|x| !x.is_zero()) {
                    rows.push(row);
                }
            }
        }
    }
    for i in 0..dim {
        for j in 0..dim {
            if !allowed(i, j) {
                let mut row = vec![Q::zero(); unknowns];
                row[i * dim + j] = Q::one();
                rows.push(row);
            }
        }
    }
    null_space(rows, unknowns)
}

pub fn dense_flatten(d: &rho_core::derivation::Derivation) -> Vec<Q> {
    let dim = d.ambient().dim();
    let mut v = vec![Q::zero(); dim * dim];
    for i in 0..dim {
        for (j, c) in d.image(i).iter() {
            v[i * dim + j] = c.clone();
        }
    }
    v
}
