use std::io::Write;
use std::path::{Path, PathBuf};

use remap_core::extractor::{extract, ExtractConfig, ProjectSnapshot};
use remap_core::ingest::{self, ingest_generic, ingest_nicad_xml};
use remap_core::pair::{PairKey, Provenance};
use remap_core::project::ProjectRole;
use remap_core::Error;

fn fixture(side: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures/toy")
        .join(side)
}

fn snapshots() -> (ProjectSnapshot, ProjectSnapshot) {
    let l = extract(
        &fixture("original"),
        &ExtractConfig::new(ProjectRole::Original, "soot"),
    )
    .unwrap();
    let r = extract(
        &fixture("redesigned"),
        &ExtractConfig::new(ProjectRole::Redesigned, "sootup"),
    )
    .unwrap();
    (l, r)
}

fn write_temp(text: &str, suffix: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::Builder::new().suffix(suffix).tempfile().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn span_of<'a>(snap: &'a ProjectSnapshot, sig: &str) -> (&'a str, usize, usize) {
    let rec = snap.resolve_key(sig).unwrap_or_else(|| panic!("{sig}"));
    (&rec.file_path, rec.start_line, rec.end_line)
}

fn span_json(file: &str, start: usize, end: usize) -> String {
    format!(r#"{{"file":"{file}","start":{start},"end":{end}}}"#)
}

const GET_NAME_L: &str = "soot.Local#getName()";
const GET_NAME_R: &str = "sootup.core.jimple.basic.Local#getName()";

#[test]
fn generic_exact_spans_dedupe_and_orientation() {
    let (l, r) = snapshots();
    let (lf, ls, le) = span_of(&l, GET_NAME_L);
    let (rf, rs, re) = span_of(&r, GET_NAME_R);
    let exact = format!(
        r#"{{"format_version":1,"detector":"ccstokener","left":{},"right":{},"meta":"sim=0.9"}}"#,
        span_json(lf, ls, le),
        span_json(rf, rs, re)
    );
    // Reversed order, absolute path on the right-hand fragment, and a
    // fragment that only overlaps part of the method.
    let abs = fixture("original").join(lf);
    let reversed = format!(
        r#"{{"detector":"ccstokener","left":{},"right":{}}}"#,
        span_json(rf, rs + 1, re),
        span_json(&abs.to_string_lossy(), ls, le - 1)
    );
    let by_key = format!(
        r#"{{"detector":"ccstokener","left":{{"key":"{GET_NAME_L}"}},"right":{{"key":"{GET_NAME_R}"}}}}"#
    );
    let report = write_temp(&format!("{exact}\n{reversed}\n\n{by_key}\nnot json\n"), ".jsonl");

    let out = ingest_generic(report.path(), &l, &r).unwrap();
    assert_eq!(out.pairs.len(), 1);
    let p = &out.pairs[0];
    assert_eq!(
        p.key(),
        PairKey::new(
            &l.resolve_key(GET_NAME_L).unwrap().id,
            &r.resolve_key(GET_NAME_R).unwrap().id
        )
    );
    assert_eq!(p.provenance, Provenance::Detector("ccstokener".into()));
    assert_eq!(p.detector_meta.as_deref(), Some("sim=0.9"));
    assert_eq!(out.stats.duplicates, 2);
    assert_eq!(out.stats.malformed_lines, 1);
    assert_eq!(out.stats.reported_pairs, 3);
}

#[test]
fn unknown_file_is_counted_not_fatal() {
    let (l, r) = snapshots();
    let (lf, ls, le) = span_of(&l, GET_NAME_L);
    let (rf, rs, re) = span_of(&r, GET_NAME_R);
    let good = format!(
        r#"{{"detector":"d","left":{},"right":{}}}"#,
        span_json(lf, ls, le),
        span_json(rf, rs, re)
    );
    let bad = format!(
        r#"{{"detector":"d","left":{},"right":{}}}"#,
        span_json("src/main/java/soot/Missing.java", 1, 9),
        span_json(rf, rs, re)
    );
    let report = write_temp(&format!("{good}\n{bad}\n"), ".jsonl");
    let out = ingest_generic(report.path(), &l, &r).unwrap();
    assert_eq!(out.pairs.len(), 1);
    assert_eq!(out.stats.unresolved_fragments, 1);
    assert_eq!(out.stats.unknown_files, 1);
}

#[test]
fn mostly_unresolved_report_is_rejected() {
    let (l, r) = snapshots();
    let line = format!(
        r#"{{"detector":"d","left":{},"right":{}}}"#,
        span_json("elsewhere/A.java", 1, 9),
        span_json("elsewhere/B.java", 1, 9)
    );
    let report = write_temp(&format!("{line}\n"), ".jsonl");
    assert!(matches!(
        ingest_generic(report.path(), &l, &r),
        Err(Error::MostlyUnresolved {
            unresolved: 1,
            total: 1
        })
    ));
}

fn nicad_source(root: &str, (file, start, end): (&str, usize, usize)) -> String {
    format!(r#"<source file="{root}/{file}" startline="{start}" endline="{end}" pcid="1"></source>"#)
}

#[test]
fn nicad_pairs_classes_and_same_project() {
    let (l, r) = snapshots();
    let quoted_l = span_of(&l, "soot.util.StringTools#getQuotedStringOf(String)");
    let quoted_r = span_of(&r, "sootup.core.util.StringTools#getQuotedStringOf(String)");
    let quote = span_of(&l, "soot.Scene#quote(String)");
    let xml = format!(
        r#"<?xml version="1.0"?>
<clones>
<systeminfo processor="nicad6" system="both" granularity="functions"/>
<clone nlines="12" similarity="85">
{}
{}
</clone>
<clone nlines="12" similarity="80">
{}
{}
</clone>
<class classid="3" nclones="3" nlines="12" similarity="75">
{}
{}
{}
</class>
</clones>
"#,
        nicad_source("systems/original", quoted_l),
        nicad_source("systems/redesigned", quoted_r),
        nicad_source("systems/original", quoted_l),
        nicad_source("systems/original", quote),
        nicad_source("systems/original", quote),
        nicad_source("systems/original", quoted_l),
        nicad_source("systems/redesigned", quoted_r),
    );
    let report = write_temp(&xml, ".xml");
    let out = ingest_nicad_xml(report.path(), &l, &r).unwrap();
    let keys: Vec<(String, String)> = out
        .pairs
        .iter()
        .map(|p| {
            (
                p.left.split('@').next().unwrap().to_string(),
                p.right.split('@').next().unwrap().to_string(),
            )
        })
        .collect();
    assert_eq!(
        keys,
        vec![
            (
                "soot.Scene#quote(String)".into(),
                "sootup.core.util.StringTools#getQuotedStringOf(String)".into()
            ),
            (
                "soot.util.StringTools#getQuotedStringOf(String)".into(),
                "sootup.core.util.StringTools#getQuotedStringOf(String)".into()
            ),
        ]
    );
    assert_eq!(out.stats.reported_pairs, 5);
    assert_eq!(out.stats.same_project, 2);
    assert_eq!(out.stats.duplicates, 1);
    assert_eq!(out.pairs[1].detector_meta.as_deref(), Some("similarity=85"));
}

#[test]
fn nicad_empty_and_malformed() {
    let (l, r) = snapshots();
    let empty = write_temp("<?xml version=\"1.0\"?>\n<clones>\n</clones>\n", ".xml");
    assert!(ingest_nicad_xml(empty.path(), &l, &r).unwrap().pairs.is_empty());

    let broken = write_temp("<clones><clone><source file=\"a\" startline=\"1\"", ".xml");
    assert!(matches!(
        ingest_nicad_xml(broken.path(), &l, &r),
        Err(Error::Format { .. })
    ));
    let mismatched = write_temp("<clones><clone></class></clones>", ".xml");
    assert!(ingest_nicad_xml(mismatched.path(), &l, &r).is_err());
}

#[test]
fn ingesting_twice_equals_once() {
    let (l, r) = snapshots();
    let lines: Vec<String> = [
        (GET_NAME_L, GET_NAME_R),
        ("soot.Body#getUnits()", "sootup.core.model.Body#getStmts()"),
    ]
    .iter()
    .map(|(a, b)| {
        let (af, as_, ae) = span_of(&l, a);
        let (bf, bs, be) = span_of(&r, b);
        format!(
            r#"{{"detector":"d","left":{},"right":{}}}"#,
            span_json(af, as_, ae),
            span_json(bf, bs, be)
        )
    })
    .collect();
    let once = write_temp(&(lines.join("\n") + "\n"), ".jsonl");
    let twice = write_temp(&(lines.join("\n") + "\n" + &lines.join("\n") + "\n"), ".jsonl");
    let a = ingest_generic(once.path(), &l, &r).unwrap();
    let b = ingest_generic(twice.path(), &l, &r).unwrap();
    assert_eq!(a.pairs, b.pairs);
    for p in &a.pairs {
        assert!(l.get(&p.left).is_some() && r.get(&p.right).is_some());
    }

    let out = tempfile::NamedTempFile::new().unwrap();
    ingest::write_pairs(out.path(), &a.pairs).unwrap();
    assert_eq!(ingest::read_pairs(out.path()).unwrap(), a.pairs);
}
