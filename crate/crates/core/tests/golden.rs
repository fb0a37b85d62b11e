//! Byte comparison of the counterexample reports against the stored
//! copies in `data/golden`. Set `HOCART_BLESS=1` to rewrite them.

use std::path::PathBuf;

use hocart::paper::{verify_paper, PaperReport};
use hocart::squares::SearchConfig;

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/golden").join(name)
}

fn check(name: &str, actual: &str) {
    let path = golden(name);
    if std::env::var_os("HOCART_BLESS").is_some() {
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(actual, expected, "{name} differs from the stored report");
}

fn report(a: i64) -> PaperReport {
    verify_paper(a, &SearchConfig::default())
}

#[test]
fn reports_match_golden_files() {
    for a in [3, 5, 12] {
        let r = report(a);
        assert!(r.passed());
        check(&format!("report-a{a}.txt"), &r.to_text());
        check(&format!("report-a{a}.json"), &(serde_json::to_string_pretty(&r.to_json()).unwrap() + "\n"));
    }
}

#[test]
fn reports_are_deterministic() {
    let (x, y) = (report(7), report(7));
    assert_eq!(x.to_text(), y.to_text());
    assert_eq!(x.to_json(), y.to_json());
}
