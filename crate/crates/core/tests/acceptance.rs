//! One line per acceptance criterion. Runs without the libtest harness so
//! each criterion reports independently; the process fails if any does.

mod support;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use num_traits::{One, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use rho_core::catalog;
use rho_core::derivation::{
    chain_derivation_space, decompose_restriction, derivation_space, extend_left,
    induced_image, induced_on_cohomology, rigidity_report, ChainDerivation, Derivation, Mode,
    RigidityQuery, Verdict,
};
use rho_core::dga::{cartan_model, check_dga_morphism, cohomology, cohomology_algebra, lower_grading, CohomologyRing, Dga};
use rho_core::dsl::{parse_model, ModelKind};
use rho_core::fd::{char_subspace, exterior, poincare_check, tensor, truncated_polynomial, FdAlgebra, Subspace};
use rho_core::gca::AlgebraMorphism;
use rho_core::linalg::SparseVec;
use rho_core::taylor::{derivation_automorphism, peel, torus_basis, ProductAutomorphism};
use rho_core::{Error, Q};

use support::{brute_force_derivations, catalog_ring, catalog_rings, dense_flatten, golden, rank};

fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

fn model(name: &str) -> (Dga, u32) {
    match catalog::catalog(name).unwrap().kind {
        ModelKind::Dga { dga, top } => (dga, top.unwrap()),
        _ => panic!("{name} is not a model"),
    }
}

fn vec_of(h: &FdAlgebra, name: &str) -> SparseVec {
    SparseVec::unit(h.index_of(name).unwrap_or_else(|| panic!("no basis element {name}")))
}

fn negative_derivations(h: &FdAlgebra) -> Vec<Derivation> {
    (-(h.top_degree() as i64)..=-1).flat_map(|n| derivation_space(h, n)).collect()
}

fn criterion_1() {
    let (su6, _) = model("su6_su3su3");
    let res = cohomology(&su6, 19);
    assert_eq!(res.nonzero_degrees(), vec![0, 4, 6, 13, 15, 19]);
    let a = su6.algebra();
    assert_eq!(res.representatives(4), &[a.var("y4").unwrap()]);
    assert_eq!(res.representatives(6), &[a.var("y6").unwrap()]);
    let frozen = golden("su6_betti.txt");
    assert_eq!(res.betti_vector(), frozen[..=19]);
    assert_eq!(cohomology(&su6, 30).betti_vector(), frozen);
}

fn criterion_2() {
    let (su6, top) = model("su6_su3su3");
    let a = su6.algebra();
    let var = |s: &str| a.var(s).unwrap();
    let space = chain_derivation_space(&su6, -2);
    let d = space
        .iter()
        .find_map(|d| {
            let img = d.on("y6").unwrap();
            let c = img.coefficient(var("y4").terms().next().unwrap().0);
            (!c.is_zero()).then(|| {
                let inv = Q::one() / c;
                ChainDerivation::new(
                    su6.clone(),
                    -2,
                    d.images().iter().map(|x| x.scale(&inv)).collect(),
                )
                .unwrap()
            })
        })
        .expect("a degree -2 chain derivation moving y6");
    assert!(d.on("y4").unwrap().is_zero());
    assert_eq!(d.on("y6").unwrap(), &var("y4"));
    assert_eq!(d.on("x9").unwrap(), &var("x7").scale(&q(2)));
    assert_eq!(d.on("x11").unwrap(), &var("x9"));

    // The coefficients x9 -> x7, x11 -> 2 x9 do not commute with d.
    let printed = ChainDerivation::from_assignments(
        &su6,
        -2,
        vec![
            ("y6".into(), var("y4")),
            ("x9".into(), var("x7")),
            ("x11".into(), var("x9").scale(&q(2))),
        ],
    );
    assert!(matches!(printed, Err(Error::NotChainDerivation(_))));

    let ring = CohomologyRing::of_model(&su6, top).unwrap();
    let h = ring.ring();
    let induced = induced_on_cohomology(&ring, &d).unwrap();
    assert_eq!(induced.apply(&vec_of(h, "h6")), vec_of(h, "h4"));
    assert!(induced.apply(&vec_of(h, "h4")).is_zero());

    let query = RigidityQuery { torus_dim: 2, rank: 6, mode: Mode::Model, class_h: false };
    let report = rigidity_report(h, &query, Some(ring.result())).unwrap();
    assert_eq!(report.verdict, Verdict::NotRigid);
    let chr = char_subspace(h, 6);
    assert!(h.degree_subspace(6).is_subspace_of(&chr));
    let w = &report.witnesses[0];
    assert!(chr.contains(&w.element));
    assert!(!w.image.is_zero());
}

/// The elliptic model `C` on both sides of `M ⊗ M`.
fn yamaguchi_square() -> Dga {
    let mut src = String::from("model cc {\n");
    for s in ["l", "r"] {
        src += &format!(
            "  gen x{s} : 2\n  gen y{s} : 3\n  gen z{s} : 3  d = x{s}^2\n  gen a{s} : 4  d = x{s} y{s}\n  gen b{s} : 5  d = x{s} a{s} + y{s} z{s}\n  gen c{s} : 7  d = a{s}^2 + 2 y{s} b{s}\n"
        );
    }
    src += "  top 28\n}\n";
    match parse_model(&src).unwrap().kind {
        ModelKind::Dga { dga, .. } => dga,
        _ => unreachable!(),
    }
}

fn criterion_3() {
    let (c, top) = model("yamaguchi14");
    let res = cohomology(&c, 21);
    assert_eq!(res.betti_vector(), golden("yamaguchi_betti.txt"));
    let mut expected = vec![0; 15];
    for n in [0, 2, 3, 11, 12, 14] {
        expected[n] = 1;
    }
    expected[7] = 2;
    assert_eq!(res.betti_vector()[..=14], expected);

    let ring = CohomologyRing::new(res, top).unwrap();
    let h = ring.ring().clone();
    assert!(poincare_check(&h, 14));
    let mut pairs: Vec<(String, String)> = h
        .nonzero_products()
        .into_iter()
        .filter(|(i, _, _)| h.degree(*i) > 0)
        .map(|(i, j, v)| {
            assert_eq!(h.vec_degree(&v), Some(14));
            (h.name(i).to_string(), h.name(j).to_string())
        })
        .collect();
    pairs.sort();
    let want = [("h2", "h12"), ("h3", "h11"), ("h7_1", "h7_2")];
    assert_eq!(pairs, want.map(|(a, b)| (a.to_string(), b.to_string())));

    // g -> y in degree -8.
    let g_to_y = Derivation::from_named(&h, -8, &[("h11", vec_of(&h, "h3"))]).unwrap();
    let der8 = derivation_space(&h, -8);
    let span = |ds: &[Derivation]| rank(ds.iter().map(dense_flatten).collect(), h.dim() * h.dim());
    let mut with = der8.clone();
    with.push(g_to_y.clone());
    assert_eq!(span(&with), span(&der8));

    let image = induced_image(&ring, -14..=-1).unwrap();
    assert!(image.values().all(|v| v.is_empty()), "induced image is nonzero");

    for dim_t in 1..=14 {
        for k in 2..=28 {
            let qm = RigidityQuery { torus_dim: dim_t, rank: k, mode: Mode::Model, class_h: false };
            let r = rigidity_report(&h, &qm, Some(ring.result())).unwrap();
            assert_eq!(r.verdict, Verdict::Rigid, "dimT {dim_t}, k {k}");
        }
    }

    // On C alone g is odd and never lies in Char, so (g, y) cannot hit it.
    // Cohomology mode still separates from model mode once Char meets H^12.
    for k in [12, 13, 14] {
        assert!(h.degree_subspace(12).is_subspace_of(&char_subspace(&h, k)));
        let qc = RigidityQuery { torus_dim: 8, rank: k, mode: Mode::Cohomology, class_h: false };
        assert_eq!(rigidity_report(&h, &qc, None).unwrap().verdict, Verdict::NotRigid);
    }

    // On C ⊗ C the class g ⊗ g sits in H^22 ⊆ Char(·, 22) and (g, y) ⊗ 1
    // moves it.
    let cc = tensor(&h, &h);
    let gg = vec_of(&cc, "h11⊗h11");
    assert!(char_subspace(&cc, 22).contains(&gg));
    let lifted = extend_left(&g_to_y, &h, &cc).unwrap();
    assert_eq!(lifted.apply(&gg), vec_of(&cc, "h3⊗h11"));
    let qc = RigidityQuery { torus_dim: 8, rank: 22, mode: Mode::Cohomology, class_h: false };
    let rc = rigidity_report(&cc, &qc, None).unwrap();
    assert_eq!(rc.verdict, Verdict::NotRigid);
    assert!(rc.witnesses.iter().any(|w| w.derivation.degree() == -8));

    let square = CohomologyRing::of_model(&yamaguchi_square(), 28).unwrap();
    assert_eq!(square.ring().betti(), cc.betti());
    let qm = RigidityQuery { mode: Mode::Model, ..qc };
    let rm = rigidity_report(square.ring(), &qm, Some(square.result())).unwrap();
    assert_eq!(rm.verdict, Verdict::Rigid);
    let rc2 = rigidity_report(square.ring(), &qc, None).unwrap();
    assert_eq!(rc2.verdict, Verdict::NotRigid);

    // Monotonicity: cohomology-rigid implies model-rigid.
    let mut checked = 0;
    for entry in catalog_rings() {
        let Some(result) = entry.result() else { continue };
        let top = entry.ring.top_degree().max(1);
        for dim_t in 1..=top.min(8) {
            for k in 2..=top + 1 {
                let qc = RigidityQuery { torus_dim: dim_t, rank: k, mode: Mode::Cohomology, class_h: false };
                let qm = RigidityQuery { mode: Mode::Model, ..qc };
                let vc = rigidity_report(&entry.ring, &qc, None).unwrap().verdict;
                let vm = rigidity_report(&entry.ring, &qm, Some(result)).unwrap().verdict;
                if vc == Verdict::Rigid {
                    assert_eq!(vm, Verdict::Rigid, "{} dimT {dim_t} k {k}", entry.name);
                }
                checked += 1;
            }
        }
    }
    assert!(checked > 100);
}

fn criterion_4() {
    let (m0, _) = model("bazaikin:0");
    for l in [1, 2, -3] {
        let (ml, _) = model(&format!("bazaikin:{l}"));
        let a = ml.algebra();
        let v = |s: &str| a.var(s).unwrap();
        let y9 = &v("y9") - &(&v("y5") * &v("x2").pow(2)).scale(&q(l));
        let phi = AlgebraMorphism::new(m0.algebra().clone(), a.clone(), vec![v("x2"), v("y5"), y9]).unwrap();
        assert!(check_dga_morphism(&m0, &ml, &phi).unwrap(), "l = {l}");
        let naive = AlgebraMorphism::identity(a);
        assert!(!check_dga_morphism(&m0, &ml, &naive).unwrap(), "l = {l}");
    }
    let h = cohomology_algebra(&cohomology(&m0, 13 + 9), 13).unwrap();
    let nonzero: Vec<u32> = h.nonzero_degrees().collect();
    assert_eq!(nonzero, vec![0, 2, 4, 9, 11, 13]);
    assert!(h.betti().iter().all(|&b| b <= 1));
    let cp2_s9 = tensor(&truncated_polynomial(2, 2), &exterior(&[9]));
    assert_eq!(h.betti(), cp2_s9.betti());
}

fn criterion_5() {
    let mut checked = 0;
    for entry in catalog_rings() {
        let h = &entry.ring;
        for n in 1..=h.top_degree() as i64 / 2 {
            let h2n = h.degree_subspace(2 * n);
            if h2n.is_zero() {
                continue;
            }
            for d in derivation_space(h, -2 * n) {
                for v in h2n.basis() {
                    assert!(d.apply(&v).is_zero(), "{}: Der_{} moves H^{}", entry.name, -2 * n, 2 * n);
                }
            }
            checked += 1;
        }
        for d in derivation_space(h, -2) {
            assert!(d.kills(&h.degree_subspace(2)), "{}", entry.name);
        }
    }
    assert!(checked > 20);
}

fn criterion_6() {
    let su2_u1 = catalog::catalog("su2_u1").unwrap();
    let ModelKind::Biquotient { data, .. } = &su2_u1.kind else { panic!() };
    let m = cartan_model(data).unwrap();
    let res = cohomology(&m, 6);
    assert_eq!(res.betti_vector(), golden("su2_u1_betti.txt"));
    assert_eq!(res.betti_vector(), vec![1, 0, 1, 0, 0, 0, 0]);
    for e in catalog::entries().iter().filter(|e| e.kind == "biquotient") {
        let ModelKind::Biquotient { data, .. } = catalog::catalog(e.name).unwrap().kind else { panic!() };
        assert!(cartan_model(&data).unwrap().is_pure(), "{}", e.name);
    }
    let g = lower_grading(data, &res).unwrap();
    assert!(g.dims.iter().all(|(&(_, k), &d)| k <= 1 || d == 0));
}

fn random_derivation(rng: &mut StdRng, basis: &[Derivation]) -> Derivation {
    loop {
        let coeffs: Vec<Q> = basis.iter().map(|_| q(rng.gen_range(-3..=3))).collect();
        if coeffs.iter().all(Zero::is_zero) {
            continue;
        }
        let terms: Vec<(Q, &Derivation)> = coeffs.into_iter().zip(basis).collect();
        return Derivation::linear_combination(&terms).unwrap();
    }
}

fn criterion_7() {
    let rings: Vec<FdAlgebra> = ["su6_su3su3", "yamaguchi14", "eschenburg", "su3_su2"]
        .iter()
        .map(|n| catalog_ring(n).ring)
        .collect();
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut char_checks = 0;
    let mut done = 0;
    while done < 20 {
        let h = &rings[rng.gen_range(0..rings.len())];
        let torus = torus_basis(rng.gen_range(1..=3));
        let usable: Vec<(usize, Vec<Derivation>)> = (1..torus.len())
            .map(|i| (i, derivation_space(h, -(torus.degree(i) as i64))))
            .filter(|(_, s)| !s.is_empty())
            .collect();
        if usable.is_empty() {
            continue;
        }
        let mut auto = ProductAutomorphism::identity(h, &torus);
        for _ in 0..rng.gen_range(1..=4) {
            let (i, basis) = &usable[rng.gen_range(0..usable.len())];
            let d = random_derivation(&mut rng, basis);
            auto = auto.compose(&derivation_automorphism(&d, &torus, *i).unwrap()).unwrap();
        }
        let p = peel(&auto, false).unwrap();
        assert_eq!(p.recompose(h, &torus).unwrap(), auto);

        let negative = negative_derivations(h);
        for k in 2..=2 * h.top_degree() {
            let chr: Subspace = char_subspace(h, k);
            if negative.iter().all(|d| d.kills(&chr)) {
                assert!(auto.char_fixed(k), "k = {k}");
                char_checks += 1;
            }
        }
        done += 1;
    }
    assert!(char_checks > 0);
}

fn criterion_8() {
    let mut corpus: Vec<(String, FdAlgebra)> = catalog_rings()
        .into_iter()
        .map(|e| (e.name, e.ring))
        .collect();
    corpus.push(("S3 x S5".into(), exterior(&[3, 5])));
    corpus.push(("S3 x S3".into(), exterior(&[3, 3])));
    corpus.push(("S3 x CP2".into(), tensor(&exterior(&[3]), &truncated_polynomial(2, 2))));
    corpus.push(("S2 x S2".into(), tensor(&truncated_polynomial(2, 1), &truncated_polynomial(2, 1))));
    corpus.push(("T3".into(), exterior(&[1, 1, 1])));
    corpus.push(("S2 x S3 x S4".into(), tensor(&tensor(&truncated_polynomial(2, 1), &exterior(&[3])), &truncated_polynomial(4, 1))));
    let mut compared = 0;
    for (name, h) in corpus.iter().filter(|(_, h)| h.dim() <= 12) {
        let top = h.top_degree() as i64;
        let unknowns = h.dim() * h.dim();
        for n in -top..=top {
            let solver: Vec<Vec<Q>> = derivation_space(h, n).iter().map(dense_flatten).collect();
            let oracle = brute_force_derivations(h, n);
            assert_eq!(solver.len(), oracle.len(), "{name}, degree {n}");
            assert_eq!(rank(solver.clone(), unknowns), solver.len());
            let both: Vec<Vec<Q>> = solver.into_iter().chain(oracle.iter().cloned()).collect();
            assert_eq!(rank(both, unknowns), oracle.len(), "{name}, degree {n}");
            compared += 1;
        }
    }
    assert!(compared > 100);
}

fn criterion_9() {
    let s3 = exterior(&[3]);
    let yam = catalog_ring("yamaguchi14").ring;
    let mut parts = 0;
    for b in [truncated_polynomial(2, 2), yam] {
        let t = tensor(&s3, &b);
        for d in negative_derivations(&t) {
            for part in decompose_restriction(&s3, &b, &d).unwrap() {
                assert!(part.graded);
                assert_eq!(part.degree, d.degree() - s3.degree(part.a) as i64);
                let di = part.derivation.expect("coefficient map satisfies Leibniz");
                assert_eq!(di.degree(), part.degree);
                parts += 1;
            }
        }
    }
    assert!(parts > 0);
}

fn main() {
    let criteria: [(&str, fn()); 9] = [
        ("SU6 Betti numbers", criterion_1),
        ("SU6 chain derivation and model-mode witness", criterion_2),
        ("Yamaguchi ring, induced image and rigidity modes", criterion_3),
        ("Bazaikin morphisms and the M_0 ring", criterion_4),
        ("vanishing of Der_{-2n} on H^{2n}", criterion_5),
        ("Cartan model of SU(2)/U(1), purity, lower grading", criterion_6),
        ("Taylor round trip", criterion_7),
        ("derivation solver against brute force", criterion_8),
        ("decomposition of derivations on tensor products", criterion_9),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f));
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => println!("criterion {}: pass  {name} ({secs:.1}s)", i + 1),
            Err(e) => {
                failed += 1;
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                println!("criterion {}: FAIL  {name} ({secs:.1}s): {msg}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
