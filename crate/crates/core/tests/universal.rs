use veq_core::instances::{b2, t3, terminal, MatrixEquipment};
use veq_core::universal::{check_derived_lemmas, check_equipment, Searcher, UniversalError};
use veq_core::{Path, SearchBounds, Status};

fn closed_forms_agree(m: &MatrixEquipment, bounds: SearchBounds) {
    let vdc = m.vdc();
    let s = Searcher::new(vdc, bounds);
    for a in vdc.objects() {
        let w = s.find_unit(a).expect("unit exists");
        assert_eq!(Some(w.proarrow), m.unit(a), "unit of {}", vdc.obj_name(a));
    }
    for k in vdc.proarrows() {
        for g in vdc.vertical().into_object(vdc.src(k)) {
            for f in vdc.vertical().into_object(vdc.tgt(k)) {
                let w = s.find_restriction(k, g, f).expect("restriction exists");
                assert_eq!(Some(w.proarrow), m.restriction(k, g, f));
                assert!(w.alternatives.is_empty());
            }
        }
    }
}

#[test]
fn b2_restrictions_match_the_closed_form() {
    closed_forms_agree(&b2(), SearchBounds::universal());
}

#[test]
fn t3_restrictions_match_the_closed_form() {
    closed_forms_agree(&t3(), SearchBounds::universal());
}

#[test]
fn b2_binary_composites_match_the_matrix_product() {
    let m = b2();
    let vdc = m.vdc();
    let s = Searcher::new(vdc, SearchBounds::universal());
    for j in vdc.proarrows() {
        for k in vdc.proarrows().filter(|k| vdc.src(*k) == vdc.tgt(j)) {
            let p = vdc.path(&[j, k]).unwrap();
            let w = s.find_composite(&p).expect("composite exists");
            assert_eq!(Some(w.proarrow), m.composite(&[j, k]));
        }
    }
}

#[test]
fn b2_is_an_equipment_and_satisfies_the_lemmas() {
    let m = b2();
    let r = check_equipment(m.vdc(), SearchBounds::universal());
    assert_eq!(r.status, Status::Pass, "{:?}", r.first_failure());
    let r = check_derived_lemmas(m.vdc(), SearchBounds::universal());
    assert_eq!(r.status, Status::Pass, "{:?}", r.first_failure());
}

#[test]
fn removing_the_unit_is_detected() {
    let m = b2();
    let v = m.vdc().find_object("V").unwrap();
    let h = m.unit(v).unwrap();
    let mutant = m.without(h).unwrap();
    let s = Searcher::new(mutant.vdc(), SearchBounds::universal());
    let v = mutant.vdc().find_object("V").unwrap();
    assert!(matches!(s.find_unit(v), Err(UniversalError::NotFound(_))));
}

#[test]
fn tiny_budget_is_not_a_refutation() {
    let m = b2();
    let s = Searcher::new(m.vdc(), SearchBounds::universal().with_work(3));
    let v = m.vdc().find_object("V").unwrap();
    assert!(matches!(s.find_unit(v), Err(UniversalError::BoundsTooSmall(_))));
}

#[test]
fn terminal_fixture_has_unit_and_composites() {
    let vdc = terminal(4);
    let s = Searcher::new(&vdc, SearchBounds::universal());
    let a = vdc.find_object("A").unwrap();
    let j = vdc.find_proarrow("J").unwrap();
    let u = s.find_unit(a).expect("eta is a unit");
    assert_eq!(u.proarrow, j);
    let jj = vdc.path(&[j, j]).unwrap();
    let c = s.find_composite(&jj).expect("m2 is a composite");
    assert_eq!(vdc.show_cell(&c.structure_cell), "m2");
    let _ = Path::empty(a);
}

#[test]
fn bends_satisfy_the_kink_identities() {
    let m = b2();
    let vdc = m.vdc();
    let s = Searcher::new(vdc, SearchBounds::universal());
    for f in vdc.arrows() {
        let b = s.derive_bends(f).unwrap();
        assert!(b.report.passed(), "{:?}", b.report);
        assert_eq!(Some(b.companion.proarrow), m.companion(f));
        assert_eq!(Some(b.conjoint.proarrow), m.conjoint(f));
    }
}

#[test]
fn matrix_domain_summaries_saturate() {
    for m in [b2(), t3()] {
        let s = Searcher::new(m.vdc(), SearchBounds::universal());
        assert!(s.saturated());
    }
}
