use std::io::Write as _;

use veq::cli::run;
use veq::output::{parse_records, EXIT_ERROR, EXIT_FAIL, EXIT_PASS, EXIT_TRUNCATED};

fn veq(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(std::iter::once("veq").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn verify_all_on_b2_passes() {
    let (code, out, _) = veq(&["--format", "lines", "verify", "B2", "--theorem", "all"]);
    assert_eq!(code, EXIT_PASS, "{out}");
    let records = parse_records(&out).unwrap();
    for top in ["laws", "equipment", "lemmas", "functoriality", "preserves-composites", "ff-2cells", "morita"] {
        assert!(records.iter().any(|r| r.name == top), "missing {top}");
    }
    assert!(out.is_ascii());
}

#[test]
fn f1_has_no_unit() {
    let (code, out, _) = veq(&["derive", "F1", "--what", "unit:A"]);
    assert_eq!(code, EXIT_FAIL);
    assert!(out.contains("NotFound"), "{out}");
}

#[test]
fn derivations_on_b2() {
    for what in ["unit:V", "composite:UV_11,VU_11", "restriction:VV_1001,VtoV_10,id_V", "companion:UtoV_0", "conjoint:VtoV_10"] {
        let (code, out, err) = veq(&["derive", "B2", "--what", what]);
        assert_eq!(code, EXIT_PASS, "{what}: {out}{err}");
    }
}

#[test]
fn parse_errors_exit_with_two() {
    let mut f = tempfile::Builder::new().suffix(".veq").tempfile().unwrap();
    writeln!(f, "object A\nproarrow J A -|> A").unwrap();
    let path = f.path().to_str().unwrap();
    let (code, _, err) = veq(&["validate", path]);
    assert_eq!(code, EXIT_ERROR);
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn unknown_names_exit_with_two() {
    let (code, _, err) = veq(&["derive", "B2", "--what", "unit:W"]);
    assert_eq!(code, EXIT_ERROR, "{err}");
    let (code, _, _) = veq(&["verify", "no-such-file.veq", "--theorem", "laws"]);
    assert_eq!(code, EXIT_ERROR);
}

#[test]
fn exhausted_work_budget_truncates() {
    let (code, out, _) = veq(&["verify", "B2", "--theorem", "equipment", "--bounds", "work=10"]);
    assert_eq!(code, EXIT_TRUNCATED, "{out}");
}

#[test]
fn corrupted_tabulated_file_fails_validation() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/terminal3_corrupt.veq");
    let (code, out, _) = veq(&["--format", "lines", "validate", path, "--max-path", "3"]);
    assert_eq!(code, EXIT_FAIL);
    assert!(out.contains("m2(eta,_m2)") || out.contains("m2(eta, m2)"), "{out}");
    let good = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/terminal3.veq");
    assert_eq!(veq(&["validate", good, "--max-path", "3"]).0, EXIT_PASS);
}

#[test]
fn report_re_renders_a_lines_stream() {
    let (code, lines, _) = veq(&["--format", "lines", "embed", "B2", "--object", "V"]);
    assert_eq!(code, EXIT_PASS);
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(lines.as_bytes()).unwrap();
    let path = f.path().to_str().unwrap();
    let (code, again, _) = veq(&["--format", "lines", "report", path]);
    assert_eq!(code, EXIT_PASS);
    assert_eq!(again, lines);
    let (code, text, _) = veq(&["report", path]);
    assert_eq!(code, EXIT_PASS);
    assert!(text.ends_with("overall: pass\n"), "{text}");
}

#[test]
fn help_exits_cleanly() {
    let (code, out, _) = veq(&["--help"]);
    assert_eq!(code, EXIT_PASS);
    assert!(out.contains("verify"));
}
