use std::sync::Arc;

use veq_core::embedding::{
    check_composite_preservation, check_coreflection, check_full_on_arrows, check_fully_faithful_on,
    check_functoriality, check_morita, composite_paths, verify_embedding, Embedding, EmbeddingSuite, MoritaPair,
};
use veq_core::enriched::{
    check_category_laws, check_functor_laws, check_morphism_laws, check_profunctor_laws, compose_functors,
    EnrichedFunctor, EnrichedProfunctor, ProMorphism,
};
use veq_core::instances::{b2, t3, terminal, MatrixEquipment};
use veq_core::universal::Searcher;
use veq_core::{Frame, SearchBounds, Status};

fn every_representative_is_lawful(m: &MatrixEquipment) {
    let e = m.vdc();
    let s = Searcher::new(e, SearchBounds::universal());
    let emb = Embedding::new(&s);
    for a in e.objects() {
        let c = emb.represent_object(a).unwrap();
        assert!(check_category_laws(e, &c).passed());
        assert_eq!(c.size(), e.vertical().into_object(a).count());
    }
    for f in e.arrows() {
        assert!(check_functor_laws(e, &emb.represent_arrow(f).unwrap()).passed());
    }
    for j in e.proarrows() {
        assert!(check_profunctor_laws(e, &emb.represent_proarrow(j).unwrap()).passed());
    }
}

#[test]
fn b2_representatives_are_lawful() {
    every_representative_is_lawful(&b2());
}

#[test]
fn t3_representatives_are_lawful() {
    every_representative_is_lawful(&t3());
}

#[test]
fn homs_are_restricted_identity_matrices() {
    let m = b2();
    let e = m.vdc();
    let s = Searcher::new(e, SearchBounds::universal());
    let emb = Embedding::new(&s);
    for a in e.objects() {
        let rep = emb.object(a).unwrap();
        for (i, x) in rep.arrows.iter().enumerate() {
            for (k, y) in rep.arrows.iter().enumerate() {
                let (fx, fy) = (m.function(*x), m.function(*y));
                let expected: Vec<u8> = fx
                    .iter()
                    .flat_map(|p| fy.iter().map(move |q| u8::from(p == q)))
                    .collect();
                assert_eq!(m.matrix(rep.category.hom(i, k)), expected.as_slice());
            }
        }
    }
    let u = e.find_object("U").unwrap();
    let rep = emb.represent_object(u).unwrap();
    assert!(rep.hom.iter().all(|j| m.matrix(*j).iter().all(|v| *v == 1)));
}

#[test]
fn swap_permutes_objects_by_postcomposition() {
    let m = b2();
    let e = m.vdc();
    let s = Searcher::new(e, SearchBounds::universal());
    let emb = Embedding::new(&s);
    let swap = e.find_arrow("VtoV_10").unwrap();
    let v = e.find_object("V").unwrap();
    let rep = emb.object(v).unwrap();
    let f = emb.represent_arrow(swap).unwrap();
    for (i, x) in rep.arrows.iter().enumerate() {
        assert_eq!(rep.arrows[f.on_objects[i]], e.compose(swap, *x).unwrap());
    }
    assert!(f.preserves_extent(e));
}

#[test]
fn unit_represents_the_hom_profunctor_and_identities_identities() {
    let m = b2();
    let e = m.vdc();
    let s = Searcher::new(e, SearchBounds::universal());
    let emb = Embedding::new(&s);
    for a in e.objects() {
        let h = s.find_unit(a).unwrap().proarrow;
        let rep = emb.represent_proarrow(h).unwrap();
        assert_eq!(*rep, *emb.hom_profunctor(a).unwrap());
        let id = emb.represent_cell(&e.identity_cell(h).unwrap()).unwrap();
        assert_eq!(id, ProMorphism::identity(e, &rep).unwrap());
        let ida = emb.identity_functor(a).unwrap();
        assert_eq!(*ida, EnrichedFunctor::identity(e, &ida.source).unwrap());
    }
}

#[test]
fn unit_cell_represents_the_identity_transformation() {
    let m = b2();
    let e = m.vdc();
    let s = Searcher::new(e, SearchBounds::universal());
    let emb = Embedding::new(&s);
    for f in e.arrows() {
        let t = emb.represent_vertical(&s.vertical_cell(f).unwrap()).unwrap();
        let target = emb.object(e.cod(f)).unwrap();
        for (x, c) in t.components.iter().enumerate() {
            assert_eq!(c, target.category.id(t.left.on_objects[x]));
        }
    }
}

#[test]
fn nullary_cells_between_functions_are_natural() {
    let m = b2();
    let e = m.vdc();
    let s = Searcher::new(e, SearchBounds::universal());
    let emb = Embedding::new(&s);
    let v = e.find_object("V").unwrap();
    let h = s.find_unit(v).unwrap().proarrow;
    let mut seen = 0;
    for f in e.arrows().filter(|f| e.cod(*f) == v) {
        for g in e.arrows().filter(|g| e.dom(*g) == e.dom(f) && e.cod(*g) == v) {
            let frame = Frame {
                domain: veq_core::Path::empty(e.dom(f)),
                left: f,
                right: g,
                codomain: h,
            };
            for cell in e.frame_cells(&frame).unwrap() {
                let t = emb.represent_vertical(&cell).unwrap();
                assert!(check_morphism_laws(e, &t).passed());
                seen += 1;
            }
        }
    }
    assert!(seen > 0);
}

#[test]
fn strip_and_represent_round_trip() {
    let m = b2();
    let e = m.vdc();
    let s = Searcher::new(e, SearchBounds::universal());
    let emb = Embedding::new(&s);
    let j = e.find_proarrow("VV_0110").unwrap();
    let k = e.find_proarrow("VV_1111").unwrap();
    let v = e.find_object("V").unwrap();
    let swap = e.find_arrow("VtoV_10").unwrap();
    for (l, r) in [(e.identity(v), e.identity(v)), (swap, e.identity(v)), (swap, swap)] {
        let frame = Frame {
            domain: e.path(&[j, j]).unwrap(),
            left: l,
            right: r,
            codomain: k,
        };
        for alpha in e.frame_cells(&frame).unwrap() {
            let m = emb.represent_cell(&alpha).unwrap();
            assert_eq!(emb.strip_cell(&m).unwrap(), alpha);
        }
    }
    let id = ProMorphism::identity(e, &emb.represent_proarrow(j).unwrap()).unwrap();
    assert_eq!(emb.strip_cell(&id).unwrap(), e.identity_cell(j).unwrap());
}

#[test]
fn tautological_functor_flattens_to_the_identity() {
    let m = b2();
    let e = m.vdc();
    let s = Searcher::new(e, SearchBounds::universal());
    let emb = Embedding::new(&s);
    for a in e.objects() {
        let t = Arc::new(emb.tautological_functor(a).unwrap());
        assert!(!t.preserves_extent(e) || e.vertical().into_object(a).count() == 1);
        let flat = emb.flatten_functor(&t).unwrap();
        assert!(flat.iso.report.passed(), "{:?}", flat.iso.report.first_failure());
        assert_eq!(flat.functor, *emb.identity_functor(a).unwrap());
    }
}

#[test]
fn fullness_recovers_arrows_and_composites() {
    let m = b2();
    let e = m.vdc();
    let s = Searcher::new(e, SearchBounds::universal());
    let emb = Embedding::new(&s);
    for f in e.arrows() {
        let full = emb.fullness_on_arrows(&emb.represent_arrow(f).unwrap()).unwrap();
        assert_eq!(full.arrow, f);
        assert!(full.iso.report.passed());
        for g in e.arrows().filter(|g| e.dom(*g) == e.cod(f)) {
            let gf = compose_functors(e, &emb.represent_arrow(g).unwrap(), &emb.represent_arrow(f).unwrap()).unwrap();
            let full = emb.fullness_on_arrows(&Arc::new(gf)).unwrap();
            assert_eq!(Some(full.arrow), e.compose(g, f));
        }
    }
    let objects: Vec<_> = e.objects().collect();
    let arrows: Vec<_> = e.arrows().collect();
    let r = check_full_on_arrows(&emb, &objects, &arrows).unwrap();
    assert_eq!(r.status, Status::Pass, "{:?}", r.first_failure());
}

#[test]
fn representatives_coreflect_to_themselves() {
    let m = b2();
    let e = m.vdc();
    let s = Searcher::new(e, SearchBounds::universal());
    let emb = Embedding::new(&s);
    let objects: Vec<_> = e.objects().collect();
    let proarrows: Vec<_> = e.proarrows().collect();
    let r = check_coreflection(&emb, &objects, &proarrows).unwrap();
    assert_eq!(r.status, Status::Pass, "{:?}", r.first_failure());
    for k in &proarrows {
        let c = emb.coreflect(&emb.represent_proarrow(*k).unwrap()).unwrap();
        assert_eq!(c.proarrow, *k);
        assert!(c.counit_is_iso());
        for (i, cell) in c.counit.components.iter().enumerate() {
            assert_eq!(*cell, e.identity_cell(cell.frame.codomain).unwrap(), "component {i}");
        }
    }
}

#[test]
fn enlarging_the_identity_component_breaks_the_actions() {
    // Over a thin base both actions through the identity force
    // J(x, u) = J(id, id)(x, u), so the enlarged family has no actions.
    let m = b2();
    let e = m.vdc();
    let s = Searcher::new(e, SearchBounds::universal());
    let emb = Embedding::new(&s);
    let v = e.find_object("V").unwrap();
    let k = emb.represent_proarrow(e.find_proarrow("VV_1001").unwrap()).unwrap();
    let rep = emb.object(v).unwrap();
    let iv = rep.identity_index(e);
    let mut component = k.component.clone();
    component[iv * k.target.size() + iv] = e.find_proarrow("VV_1101").unwrap();
    let enlarged = EnrichedProfunctor::thin(e, "J", k.source.clone(), k.target.clone(), component);
    assert!(enlarged.is_err());
    let same = EnrichedProfunctor::thin(e, "K", k.source.clone(), k.target.clone(), k.component.clone()).unwrap();
    assert_eq!(same, *k);
}

#[test]
fn functoriality_on_a_small_scope() {
    let m = b2();
    let e = m.vdc();
    let s = Searcher::new(e, SearchBounds::universal());
    let emb = Embedding::new(&s);
    let scope = [e.find_proarrow("UV_11").unwrap(), e.find_proarrow("VU_11").unwrap()];
    let r = check_functoriality(&emb, &scope, SearchBounds::universal().with_path(2)).unwrap();
    assert_eq!(r.status, Status::Pass, "{:?}", r.first_failure());
    assert!(r.checked > 0);
}

#[test]
fn composites_are_preserved() {
    let m = b2();
    let e = m.vdc();
    let s = Searcher::new(e, SearchBounds::universal());
    let emb = Embedding::new(&s);
    let u = e.find_object("U").unwrap();
    let v = e.find_object("V").unwrap();
    let pros = [e.find_proarrow("UV_10").unwrap(), e.find_proarrow("VU_01").unwrap()];
    let paths = composite_paths(e, &[u, v], &pros);
    let r = check_composite_preservation(&emb, &paths, &[], SearchBounds::universal()).unwrap();
    assert_eq!(r.status, Status::Pass, "{:?}", r.first_failure());
    assert_eq!(r.children.len(), 4);
}

#[test]
fn cells_and_morphisms_correspond() {
    let m = b2();
    let e = m.vdc();
    let s = Searcher::new(e, SearchBounds::universal());
    let emb = Embedding::new(&s);
    let u = e.find_object("U").unwrap();
    let pros = [e.find_proarrow("UU_1").unwrap(), e.find_proarrow("UV_11").unwrap()];
    let r = check_fully_faithful_on(&emb, &[u], &[], &pros, SearchBounds::universal()).unwrap();
    assert_eq!(r.status, Status::Pass, "{:?}", r.first_failure());
    assert!(r.checked > 0);
}

#[test]
fn morita_pairs() {
    let m = b2();
    let e = m.vdc();
    let s = Searcher::new(e, SearchBounds::universal());
    let emb = Embedding::new(&s);
    let u = e.find_object("U").unwrap();
    let v = e.find_object("V").unwrap();
    let positive = check_morita(&emb, MoritaPair { a: v, b: v, equivalent: true }).unwrap();
    assert_eq!(positive.status, Status::Pass);
    let negative = check_morita(&emb, MoritaPair { a: u, b: v, equivalent: false }).unwrap();
    assert_eq!(negative.status, Status::Pass);
    let wrong = check_morita(&emb, MoritaPair { a: u, b: v, equivalent: true }).unwrap();
    assert_eq!(wrong.status, Status::Fail);
}

#[test]
fn tabulated_fixture_embeds() {
    let vdc = terminal(4);
    let s = Searcher::new(&vdc, SearchBounds::universal());
    let emb = Embedding::new(&s);
    let a = vdc.find_object("A").unwrap();
    let j = vdc.find_proarrow("J").unwrap();
    let mut suite = EmbeddingSuite::new(SearchBounds::universal());
    suite.objects = vec![a];
    suite.proarrows = vec![j];
    suite.morita = vec![MoritaPair { a, b: a, equivalent: true }];
    let r = verify_embedding(&emb, &suite).unwrap();
    assert_eq!(r.status, Status::Pass, "{:?}", r.first_failure());
    let f = r.child("functoriality").unwrap();
    assert!(f.checked > 0);
}
