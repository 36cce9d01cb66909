use std::collections::BTreeSet;

use veq_core::instances::{b2, f1, terminal};
use veq_core::vdc::{check_vdc_laws, check_vdc_laws_scoped, LawScope};
use veq_core::{Cell, Frame, Path, SearchBounds, Status};

#[test]
fn f1_passes_the_laws() {
    let r = check_vdc_laws(&f1(), SearchBounds::laws());
    assert_eq!(r.status, Status::Pass, "{r:#?}");
}

#[test]
fn terminal_fixture_passes_the_laws() {
    let r = check_vdc_laws(&terminal(4), SearchBounds::laws());
    assert_eq!(r.status, Status::Pass, "{:?}", r.first_failure());
    assert!(r.checked > 100);
}

#[test]
fn b2_passes_the_laws_on_short_paths() {
    let e = b2();
    let r = check_vdc_laws(e.vdc(), SearchBounds::laws().with_path(1));
    assert_eq!(r.status, Status::Pass, "{:?}", r.first_failure());
}

#[test]
fn b2_passes_the_laws_at_length_three_on_a_subfamily() {
    let e = b2();
    let v = e.vdc();
    let names = ["UV_11", "VU_10", "VV_0110", "VV_1101"];
    let scope = LawScope {
        proarrows: Some(names.iter().map(|n| v.find_proarrow(n).unwrap()).collect::<BTreeSet<_>>()),
        arrows: None,
    };
    let r = check_vdc_laws_scoped(v, SearchBounds::laws().with_path(3), &scope);
    assert_ne!(r.status, Status::Fail, "{:?}", r.first_failure());
}

#[test]
fn corrupted_paste_entry_is_reported() {
    let mut v = terminal(4);
    let eta = v.find_cell("eta").unwrap();
    let m2 = v.find_cell("m2").unwrap();
    let m3 = v.find_cell("m3").unwrap();
    let id = v.find_cell("id_J").unwrap();
    v.table_mut()
        .unwrap()
        .set_paste(m2.id.unwrap(), vec![id.id.unwrap(), eta.id.unwrap()], m3.id.unwrap());
    let r = check_vdc_laws(&v, SearchBounds::laws());
    assert_eq!(r.status, Status::Fail);
    let bad = r.first_failure().unwrap();
    assert!(bad.counterexamples[0].description.contains("m2(id_J, eta)"), "{bad:#?}");
}

#[test]
fn thin_paste_lands_on_the_concatenated_frame() {
    let e = b2();
    let v = e.vdc();
    let m = v.find_proarrow("VV_1100").unwrap();
    let n = v.find_proarrow("VV_0101").unwrap();
    let mn = v.find_proarrow("VV_0101").unwrap();
    let vo = v.find_object("V").unwrap();
    let id = v.identity(vo);
    let outer = Cell::thin(Frame {
        domain: v.path(&[m, n]).unwrap(),
        left: id,
        right: id,
        codomain: mn,
    });
    assert!(v.contains(&outer));
    let inner = v.identity_cell(m).unwrap();
    let inner2 = v.identity_cell(n).unwrap();
    let got = v.paste(&outer, &[inner, inner2]).unwrap();
    assert_eq!(got, outer);
    let empty = Path::empty(vo);
    assert!(v.frame_cells(&Frame { domain: empty, left: id, right: id, codomain: m }).unwrap().is_empty());
}
