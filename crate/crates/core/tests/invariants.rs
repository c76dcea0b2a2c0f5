mod support;

use proptest::prelude::*;

use rho_core::catalog;
use rho_core::derivation::{derivation_space, Derivation};
use rho_core::dga::cohomology;
use rho_core::dsl::{parse_model, print_model, ModelFile, ModelKind};
use rho_core::fd::{exterior, tensor, truncated_polynomial, FdAlgebra};
use rho_core::gca::{Element, FreeGca, Generator};
use rho_core::linalg::SparseVec;
use rho_core::report::{parse_q, q_str};
use rho_core::taylor::{derivation_automorphism, peel, torus_basis, ProductAutomorphism};
use rho_core::{Q, dga::Dga};

fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

fn free() -> FreeGca {
    FreeGca::from_pairs(&[("x", 2), ("y", 3), ("z", 3), ("w", 4), ("u", 5)]).unwrap()
}

fn element(a: &FreeGca, n: u32, coeffs: &[i64]) -> Element {
    a.basis_in_degree(n)
        .into_iter()
        .zip(coeffs)
        .fold(a.zero(), |acc, (m, &c)| &acc + &a.term(q(c), m))
}

fn homogeneous() -> impl Strategy<Value = (u32, Vec<i64>)> {
    (0u32..=9, prop::collection::vec(-3i64..=3, 24))
}

fn sign(a: u32, b: u32) -> Q {
    if a % 2 == 1 && b % 2 == 1 { q(-1) } else { q(1) }
}

fn su6() -> Dga {
    match catalog::catalog("su6_su3su3").unwrap().kind {
        ModelKind::Dga { dga, .. } => dga,
        _ => unreachable!(),
    }
}

fn yamaguchi() -> Dga {
    match catalog::catalog("yamaguchi14").unwrap().kind {
        ModelKind::Dga { dga, .. } => dga,
        _ => unreachable!(),
    }
}

fn small_rings() -> Vec<FdAlgebra> {
    vec![
        exterior(&[3, 5]),
        tensor(&exterior(&[3]), &truncated_polynomial(2, 2)),
        tensor(&truncated_polynomial(2, 1), &truncated_polynomial(4, 1)),
        support::catalog_ring("su6_su3su3").ring,
        support::catalog_ring("yamaguchi14").ring,
        support::catalog_ring("su3_t2").ring,
    ]
}

fn ring_vector(h: &FdAlgebra, coeffs: &[i64]) -> SparseVec {
    SparseVec::from_entries(coeffs.iter().take(h.dim()).enumerate().map(|(i, &c)| (i, q(c))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn graded_commutativity((m, a) in homogeneous(), (n, b) in homogeneous()) {
        let alg = free();
        let (x, y) = (element(&alg, m, &a), element(&alg, n, &b));
        prop_assert_eq!(&x * &y, (&y * &x).scale(&sign(m, n)));
    }

    #[test]
    fn associativity((l, a) in homogeneous(), (m, b) in homogeneous(), (n, c) in homogeneous()) {
        let alg = free();
        let (x, y, z) = (element(&alg, l, &a), element(&alg, m, &b), element(&alg, n, &c));
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
    }

    #[test]
    fn odd_elements_square_to_zero(coeffs in prop::collection::vec(-3i64..=3, 24), n in prop::sample::select(vec![3u32, 5, 7, 9])) {
        let alg = free();
        let x = element(&alg, n, &coeffs);
        prop_assert!((&x * &x).is_zero());
    }

    #[test]
    fn differential_squares_to_zero_and_is_a_derivation((m, a) in homogeneous(), (n, b) in homogeneous(), pick in any::<bool>()) {
        let model = if pick { su6() } else { yamaguchi() };
        let alg = model.algebra().clone();
        let x = element(&alg, m, &a);
        let y = element(&alg, n, &b);
        let dx = model.differential(&x).unwrap();
        prop_assert!(model.differential(&dx).unwrap().is_zero());
        let lhs = model.differential(&(&x * &y)).unwrap();
        let rhs = &(&dx * &y) + &(&x * &model.differential(&y).unwrap()).scale(&sign(m, 1));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn rank_nullity(n in 1u32..=24, pick in any::<bool>()) {
        let model = if pick { su6() } else { yamaguchi() };
        let res = cohomology(&model, n);
        for k in 1..=n {
            let image_in = res.chains_dim(k - 1) - res.cycles_dim(k - 1);
            prop_assert_eq!(res.cycles_dim(k), res.betti(k) + image_in);
        }
    }

    #[test]
    fn ring_axioms(idx in 0usize..6, a in prop::collection::vec(-3i64..=3, 12), b in prop::collection::vec(-3i64..=3, 12), c in prop::collection::vec(-3i64..=3, 12)) {
        let h = &small_rings()[idx];
        let (x, y, z) = (ring_vector(h, &a), ring_vector(h, &b), ring_vector(h, &c));
        prop_assert_eq!(h.mul(&h.mul(&x, &y), &z), h.mul(&x, &h.mul(&y, &z)));
        for i in 0..h.dim() {
            for j in 0..h.dim() {
                let s = sign(h.degree(i), h.degree(j));
                prop_assert_eq!(h.mul_basis(i, j).clone(), h.mul_basis(j, i).scaled(&s));
            }
        }
    }

    #[test]
    fn combinations_of_derivations_are_derivations(idx in 0usize..6, n in -8i64..=-1, coeffs in prop::collection::vec(-4i64..=4, 16)) {
        let h = &small_rings()[idx];
        let basis = derivation_space(h, n);
        let terms: Vec<(Q, &Derivation)> = basis.iter().zip(&coeffs).map(|(d, &c)| (q(c), d)).collect();
        if !terms.is_empty() {
            let d = Derivation::linear_combination(&terms).unwrap();
            prop_assert!(d.leibniz_failure().is_none());
            prop_assert!(Derivation::new(h.clone(), n, d.images().to_vec()).is_ok());
        }
    }

    #[test]
    fn peel_inverts_composition(idx in 0usize..6, t in 1u32..=3, picks in prop::collection::vec((any::<prop::sample::Index>(), -3i64..=3), 1..5)) {
        let h = &small_rings()[idx];
        let torus = torus_basis(t);
        let mut auto = ProductAutomorphism::identity(h, &torus);
        for (i, c) in picks {
            let i = 1 + i.index(torus.len() - 1);
            if let Some(d) = derivation_space(h, -(torus.degree(i) as i64)).first() {
                let step = derivation_automorphism(&d.scaled(&q(c)), &torus, i).unwrap();
                auto = auto.compose(&step).unwrap();
            }
        }
        let p = peel(&auto, false).unwrap();
        prop_assert_eq!(p.recompose(h, &torus).unwrap(), auto);
    }

    #[test]
    fn rationals_round_trip(p in -1000i64..1000, r in 1i64..1000) {
        let x = Q::new(p.into(), r.into());
        prop_assert_eq!(parse_q(&q_str(&x)).unwrap(), x);
    }

    #[test]
    fn printer_round_trip(degrees in prop::collection::vec(1u32..=12, 1..6)) {
        let gens: Vec<Generator> = degrees.iter().enumerate().map(|(i, &d)| Generator::new(format!("g{i}"), d)).collect();
        let dga = Dga::trivial(FreeGca::new(gens).unwrap());
        let m = ModelFile { name: "m".into(), kind: ModelKind::Dga { dga, top: None } };
        prop_assert_eq!(parse_model(&print_model(&m)).unwrap(), m);
    }
}
