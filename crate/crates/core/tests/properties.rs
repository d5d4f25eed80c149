use std::sync::Arc;

use proptest::prelude::*;
use simpfib::algebra::{find_isomorphism, internal_hom, map_space, product, pushout_product, HomSearch, DEFAULT_BUDGET};
use simpfib::category::FiniteCategory;
use simpfib::corpus::generate;
use simpfib::fibrations::{check_class, is_reedy_fib, FibrationClass, LocalityOptions, ReedyMode};
use simpfib::grothendieck::{fiber_check, groth, DiagramFunctor};
use simpfib::json;
use simpfib::lifting::{factor, problems, GeneratingFamily, LiftingProblem};
use simpfib::oracles::{homology, sound_maxdim, weq, Effort};
use simpfib::shapes::{self, ShapeSpec};
use simpfib::{Multidegree, Presheaf, PresheafMap, Reindexing, Status};

fn md(v: &[usize]) -> Multidegree {
    Multidegree::new(v).unwrap()
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, failure_persistence: None, ..ProptestConfig::default() }
}

fn shape_spec() -> impl Strategy<Value = ShapeSpec> {
    prop_oneof![
        (0usize..4).prop_map(|n| ShapeSpec::Delta { n }),
        (0usize..4).prop_map(|n| ShapeSpec::Boundary { n }),
        (1usize..4).prop_flat_map(|n| (Just(n), 0..=n)).prop_map(|(n, i)| ShapeSpec::Horn { n, i }),
        (1usize..3).prop_map(|l| ShapeSpec::J { l }),
        (0usize..4).prop_map(|n| ShapeSpec::F { n }),
        (0usize..4).prop_map(|n| ShapeSpec::PartialF { n }),
        Just(ShapeSpec::E { n: 1 }),
        (2usize..4).prop_map(|n| ShapeSpec::G { n }),
        (0usize..3, 0usize..3).prop_map(|(k, n)| ShapeSpec::F2 { k, n }),
        (0usize..3, 0usize..3).prop_map(|(k, n)| ShapeSpec::PartialF2 { k, n }),
        Just(ShapeSpec::Chaotic),
    ]
}

fn build(spec: &ShapeSpec, bound: usize) -> Arc<Presheaf> {
    spec.build(Multidegree::uniform(spec.arity(), bound)).unwrap().0
}

/// Small simplicial sets at truncation `t`.
fn small_sets(t: usize) -> Vec<Arc<Presheaf>> {
    vec![
        Arc::new(Presheaf::point(md(&[t]))),
        shapes::delta(1, t).unwrap(),
        shapes::delta(2, t).unwrap(),
        shapes::boundary(1, t).unwrap(),
        shapes::boundary(2, t).unwrap(),
        shapes::horn(2, 1, t).unwrap(),
        shapes::j(1, t).unwrap(),
    ]
}

fn small_monos(t: usize) -> Vec<PresheafMap> {
    vec![
        shapes::boundary_inclusion(0, t).unwrap(),
        shapes::boundary_inclusion(1, t).unwrap(),
        shapes::boundary_inclusion(2, t).unwrap(),
        shapes::horn_inclusion(1, 0, t).unwrap(),
        shapes::horn_inclusion(2, 0, t).unwrap(),
        shapes::horn_inclusion(2, 1, t).unwrap(),
    ]
}

/// Some map between two of the small sets, picked by index.
fn pick_map(a: &Arc<Presheaf>, b: &Arc<Presheaf>, k: usize) -> Option<PresheafMap> {
    let all = HomSearch::new(a, b).all().unwrap();
    if all.is_empty() {
        None
    } else {
        Some(all[k % all.len()].clone())
    }
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn built_shapes_validate(spec in shape_spec(), bound in 1usize..4) {
        let x = build(&spec, bound);
        prop_assert!(x.validate().is_holds());
    }

    #[test]
    fn delta_counts_are_binomial(n in 0usize..5, k in 0usize..5) {
        let x = shapes::delta(n, k).unwrap();
        let binom = |a: usize, b: usize| (0..b).fold(1usize, |acc, i| acc * (a - i) / (i + 1));
        prop_assert_eq!(x.count(md(&[k])), binom(n + k + 1, k + 1));
    }

    #[test]
    fn normal_forms_are_idempotent(spec in shape_spec(), pick in any::<prop::sample::Index>()) {
        let x = build(&spec, 2);
        let cells: Vec<(Multidegree, u32)> = x.degrees().into_iter().flat_map(|d| (0..x.count(d) as u32).map(move |c| (d, c))).collect();
        prop_assume!(!cells.is_empty());
        let (d, c) = cells[pick.index(cells.len())];
        let nf = x.normal_form(d, c);
        prop_assert!(!x.is_degenerate(nf.degree, nf.cell));
        prop_assert!(x.normal_form(nf.degree, nf.cell).is_nondegenerate());
        prop_assert_eq!(x.apply_degeneracies(nf.degree, nf.cell, &nf.words).unwrap(), (d, c));
    }

    #[test]
    fn json_round_trips(spec in shape_spec()) {
        let x = build(&spec, 2);
        let doc = json::presheaf_to_doc(&x);
        let back = json::presheaf_from_doc(&doc).unwrap().presheaf;
        prop_assert_eq!(json::presheaf_to_doc(&back), doc);
        prop_assert!(find_isomorphism(&x, &back, DEFAULT_BUDGET).unwrap().is_some());
    }
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn reindexing_respects_composition(k in 0usize..3, n in 0usize..3, first in 0usize..3, second in 0usize..2) {
        let x = shapes::f2(k, n, md(&[2, 2, 1])).unwrap();
        let r = [Reindexing::diag1(), Reindexing::val_at(1), Reindexing::level(1)][first].clone();
        let s = [Reindexing::fdiag(), Reindexing::column(1)][second].clone();
        let composite = r.then(&s).unwrap().apply(&x).unwrap();
        let stepwise = s.apply(&r.apply(&x).unwrap()).unwrap();
        prop_assert_eq!(composite, stepwise);
    }

    #[test]
    fn lemb_then_level_is_the_identity(n in 0usize..3, level in 0usize..3) {
        let x = shapes::f(n, md(&[2, 1])).unwrap();
        let r = Reindexing::lemb(2).then(&Reindexing::level(level)).unwrap();
        prop_assert_eq!(&r.apply(&x).unwrap(), &*x);
    }

    #[test]
    fn product_hom_adjunction_counts(a in 0usize..7, b in 0usize..7, c in 0usize..7) {
        let sets = small_sets(2);
        let (a, b, c) = (&sets[a], &sets[b], &sets[c]);
        let lhs = HomSearch::new(&product(a, b).unwrap().object, c).count().unwrap();
        let rhs = HomSearch::new(a, &internal_hom(b, c).unwrap().object).count().unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn map_space_vertices_are_maps(a in 0usize..7, b in 0usize..7) {
        let sets = small_sets(2);
        let m = map_space(&sets[a], &sets[b], 1).unwrap();
        prop_assert_eq!(m.object.count(md(&[0])) as u64, HomSearch::new(&sets[a], &sets[b]).count().unwrap());
    }

    #[test]
    fn pushout_product_is_symmetric(a in 0usize..6, b in 0usize..6) {
        let monos = small_monos(2);
        let ij = pushout_product(&monos[a], &monos[b]).unwrap();
        let ji = pushout_product(&monos[b], &monos[a]).unwrap();
        prop_assert!(find_isomorphism(ij.source(), ji.source(), DEFAULT_BUDGET).unwrap().is_some());
        prop_assert!(find_isomorphism(ij.target(), ji.target(), DEFAULT_BUDGET).unwrap().is_some());
        prop_assert!(ij.is_mono());
    }

    #[test]
    fn fillers_solve_their_squares(i in 0usize..6, y in 0usize..7, x in 0usize..7, k in 0usize..16) {
        let monos = small_monos(2);
        let sets = small_sets(2);
        let Some(p) = pick_map(&sets[y], &sets[x], k) else { return Ok(()) };
        let i = &monos[i];
        for (top, bottom) in problems(i, &p).unwrap().into_iter().take(8) {
            let sq = LiftingProblem::new(i.clone(), p.clone(), top.clone(), bottom.clone()).unwrap();
            if let Some(g) = sq.filler(DEFAULT_BUDGET).unwrap() {
                let upper = i.then(&g).unwrap();
                let lower = g.then(&p).unwrap();
                prop_assert_eq!(upper.images(), top.images());
                prop_assert_eq!(lower.images(), bottom.images());
            }
        }
    }

    #[test]
    fn factorizations_compose_to_the_input(a in 0usize..7, b in 0usize..7, k in 0usize..16) {
        let sets = small_sets(2);
        let Some(f) = pick_map(&sets[a], &sets[b], k) else { return Ok(()) };
        let r = factor(&f, &GeneratingFamily::horns(2), 12).unwrap();
        let composite = r.left.then(&r.right).unwrap();
        prop_assert_eq!(composite.images(), f.images());
        prop_assert!(r.left.is_mono());
    }

    #[test]
    fn weq_two_out_of_three(a in 0usize..7, b in 0usize..7, c in 0usize..7, k in 0usize..16, l in 0usize..16) {
        let sets = small_sets(2);
        let (Some(f), Some(g)) = (pick_map(&sets[a], &sets[b], k), pick_map(&sets[b], &sets[c], l)) else { return Ok(()) };
        let gf = f.then(&g).unwrap();
        let v: Vec<Status> = [&f, &g, &gf].iter().map(|m| weq(m, Effort::High).unwrap().status()).collect();
        let holds = v.iter().filter(|s| **s == Status::Holds).count();
        if holds >= 2 {
            prop_assert!(!v.contains(&Status::Fails), "{:?}", v);
        }
    }

    #[test]
    fn certified_equivalences_preserve_homology(a in 0usize..7, b in 0usize..7, k in 0usize..16) {
        let sets = small_sets(3);
        let Some(f) = pick_map(&sets[a], &sets[b], k) else { return Ok(()) };
        if weq(&f, Effort::High).unwrap().is_holds() {
            let dim = sound_maxdim(f.source()).unwrap().min(sound_maxdim(f.target()).unwrap());
            prop_assert_eq!(homology(f.source(), dim).unwrap(), homology(f.target(), dim).unwrap());
        }
    }
}

fn bisimplicial_maps() -> Vec<PresheafMap> {
    let t = md(&[2, 1]);
    let mut out = vec![
        shapes::vertex_map(1, 0, t).unwrap(),
        shapes::vertex_map(1, 1, t).unwrap(),
        shapes::vertex_map(2, 1, t).unwrap(),
        shapes::spine_inclusion(2, t).unwrap(),
        shapes::boundary_f_inclusion(1, t).unwrap(),
        shapes::e_vertex_map(1, 0, t).unwrap(),
    ];
    for x in [shapes::f(1, t).unwrap(), shapes::e(1, t).unwrap(), shapes::g(2, t).unwrap(), shapes::chaotic_segal(t).unwrap()] {
        out.push(PresheafMap::to_point(x));
    }
    out
}

proptest! {
    #![proptest_config(config(10))]

    #[test]
    fn reedy_modes_agree(k in 0usize..10) {
        let p = &bisimplicial_maps()[k];
        let a = is_reedy_fib(p, 2, ReedyMode::Comparison).unwrap().status();
        let b = is_reedy_fib(p, 2, ReedyMode::Lifting).unwrap().status();
        if a != Status::Unknown && b != Status::Unknown {
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn groth_fibers_and_class_monotonicity(seed in 0u64..1000, pick in any::<prop::sample::Index>()) {
        let corpus = generate(seed, 18, md(&[2, 1])).unwrap();
        let entry = &corpus[pick.index(corpus.len())];
        let p = groth(&entry.diagram, 2).unwrap();
        for c in 0..entry.diagram.values.len() {
            prop_assert!(fiber_check(&p, &entry.diagram, c).unwrap().is_holds(), "{}", entry.name);
        }
        let opts = LocalityOptions::default();
        let cocart = check_class(&p, FibrationClass::Cocart, 2, opts).unwrap().verdict;
        if cocart.is_holds() {
            prop_assert!(!check_class(&p, FibrationClass::SegalCocart, 2, opts).unwrap().verdict.is_fails(), "{}", entry.name);
        }
    }

    #[test]
    fn groth_of_a_constant_is_a_product(k in 0usize..4, cat in 0usize..3) {
        let t = md(&[2, 1]);
        let values = [Arc::new(Presheaf::point(t)), shapes::f(1, t).unwrap(), shapes::e(1, t).unwrap(), shapes::g(2, t).unwrap()];
        let c = [FiniteCategory::chain(1), FiniteCategory::chain(2), FiniteCategory::chaotic(1)][cat].clone();
        let f = DiagramFunctor::constant(Arc::new(c), values[k].clone()).unwrap();
        let p = groth(&f, 2).unwrap();
        let spread = Arc::new(Reindexing::vemb(2).apply(&values[k]).unwrap());
        let prod = product(&spread, p.target()).unwrap().object;
        prop_assert!(find_isomorphism(p.source(), &prod, DEFAULT_BUDGET).unwrap().is_some());
    }

    #[test]
    fn nerves_preserve_products(a in 1usize..3, b in 1usize..3) {
        let t = 3;
        let mut covers = Vec::new();
        let id = |i: usize, j: usize| i * (b + 1) + j;
        for i in 0..=a {
            for j in 0..=b {
                if i < a { covers.push((id(i, j), id(i + 1, j))); }
                if j < b { covers.push((id(i, j), id(i, j + 1))); }
            }
        }
        let grid = FiniteCategory::poset("grid", (a + 1) * (b + 1), &covers).unwrap();
        let lhs = grid.nerve(t).unwrap();
        let rhs = product(&FiniteCategory::chain(a).nerve(t).unwrap(), &FiniteCategory::chain(b).nerve(t).unwrap()).unwrap().object;
        prop_assert!(find_isomorphism(&lhs, &rhs, DEFAULT_BUDGET).unwrap().is_some());
    }
}

#[test]
fn j1_has_two_nondegenerate_cells_per_dimension() {
    let x = shapes::j(1, 5).unwrap();
    for k in 0..=5 {
        assert_eq!(x.nondegenerate_count(md(&[k])), 2);
    }
}

#[test]
fn spines_and_simplices_are_diagonally_acyclic() {
    let t = md(&[3, 3]);
    for n in 1..=3 {
        for x in [shapes::f(n, t).unwrap(), shapes::g(n.max(2), t).unwrap()] {
            let d = Reindexing::fdiag().apply(&x).unwrap();
            assert!(homology(&d, 2).unwrap().is_point_like());
        }
    }
}
