use std::sync::LazyLock;

use proptest::prelude::*;
use remap_core::normalizer::{FieldKind, RuleSet};
use remap_core::project::ProjectRole::{self, Original, Redesigned};

/// The single-rule UnitBox form, with its lookahead.
const PUBLISHED_BOX_ROW: &str = r"(Unit|Use|Value|Def)Box(?:e(?=s))?";

static SOOT: LazyLock<RuleSet> = LazyLock::new(RuleSet::soot_sootup);
static FINDBUGS: LazyLock<RuleSet> = LazyLock::new(RuleSet::findbugs_spotbugs);

static BOX_ROWS: LazyLock<RuleSet> = LazyLock::new(|| {
    let rows = SOOT
        .rules()
        .filter(|r| r.pattern.contains("Box"))
        .cloned()
        .collect();
    RuleSet::new("box-rows", rows).unwrap()
});

static PUBLISHED: LazyLock<fancy_regex::Regex> =
    LazyLock::new(|| fancy_regex::Regex::new(PUBLISHED_BOX_ROW).unwrap());

fn box_rows() -> &'static RuleSet {
    &BOX_ROWS
}

fn published(text: &str) -> String {
    PUBLISHED.replace_all(text, "$1").into_owned()
}

const FIELDS: [FieldKind; 4] = [
    FieldKind::ClassName,
    FieldKind::MethodName,
    FieldKind::ReturnType,
    FieldKind::Comment,
];

fn identifier(words: &'static [&'static str]) -> impl Strategy<Value = String> {
    prop::collection::vec(
        (
            prop::sample::select(words),
            prop::sample::select(&["", "", ".", "_", " ", "<", ">"][..]),
        ),
        1..5,
    )
    .prop_map(|parts| parts.into_iter().map(|(w, sep)| format!("{w}{sep}")).collect())
}

const BOX_ALPHABET: &[&str] = &[
    "Unit", "Use", "Value", "Def", "Box", "Boxes", "e", "s", "es", "x", "Stmt",
];

// Realistic identifier parts; bare "Box" and "Basic" are left out because
// self-nested compounds like "ValueBoxBox" need two passes (see below).
const IDENT_WORDS: &[&str] = &[
    "Unit",
    "Units",
    "Use",
    "Value",
    "Def",
    "UnitBox",
    "UnitBoxes",
    "UseBoxes",
    "ValueBox",
    "DefBoxes",
    "Body",
    "BodyTransformer",
    "Transformer",
    "BasicBlock",
    "Block",
    "set",
    "get",
    "Name",
    "Stmt",
    "Local",
    "Const",
    "Constants",
    "spotbugsTestCases",
    "findbugs",
    "with",
    "Graph",
    "x",
];

proptest! {
    #[test]
    fn lookahead_free_box_rows_match_published_row(text in identifier(BOX_ALPHABET)) {
        prop_assert_eq!(box_rows().apply(&text, FieldKind::Param, Original), published(&text));
    }

    #[test]
    fn bundled_sets_are_idempotent(
        text in identifier(IDENT_WORDS),
        field in prop::sample::select(&FIELDS[..]),
        role in prop::sample::select(&[Original, Redesigned][..]),
    ) {
        for rules in [&*SOOT, &*FINDBUGS] {
            let once = rules.apply(&text, field, role);
            prop_assert_eq!(rules.apply(&once, field, role), once.clone(), "set {}", rules.name());
        }
    }
}

#[test]
fn published_row_examples() {
    assert_eq!(published("UnitBox"), "Unit");
    assert_eq!(published("UnitBoxes"), "Units");
    assert_eq!(
        box_rows().apply("getUseBoxes", FieldKind::MethodName, Original),
        "getUses"
    );
    assert_eq!(
        box_rows().apply("ValueBoxed", FieldKind::Comment, Original),
        "Valueed"
    );
}

#[test]
fn self_nested_compounds_need_a_second_pass() {
    let soot = RuleSet::soot_sootup();
    let once = soot.apply("ValueBoxBox", FieldKind::ReturnType, Original);
    assert_eq!(once, "ValueBox");
    assert_eq!(soot.apply(&once, FieldKind::ReturnType, Original), "Value");
}

fn apply(rules: &RuleSet, text: &str, field: FieldKind, role: ProjectRole) -> String {
    rules.apply(text, field, role)
}

#[test]
fn role_and_scope_gating() {
    let soot = RuleSet::soot_sootup();
    assert_eq!(
        apply(&soot, "setName", FieldKind::MethodName, Original),
        "withName"
    );
    assert_eq!(apply(&soot, "setName", FieldKind::LocalVar, Original), "setName");
    assert_eq!(
        apply(&soot, "setName", FieldKind::MethodName, Redesigned),
        "setName"
    );
    assert_eq!(
        apply(&soot, "BasicBlock", FieldKind::ClassName, Redesigned),
        "Block"
    );
    assert_eq!(
        apply(&soot, "BasicBlock", FieldKind::ClassName, Original),
        "BasicBlock"
    );
    assert_eq!(apply(&soot, "Unit", FieldKind::ClassName, Redesigned), "Unit");

    let fb = RuleSet::findbugs_spotbugs();
    assert_eq!(
        apply(&fb, "Const.GOTO", FieldKind::Comment, Redesigned),
        "Constants.GOTO"
    );
    assert_eq!(
        apply(&fb, "Const.GOTO", FieldKind::Comment, Original),
        "Const.GOTO"
    );
    assert_eq!(
        apply(&fb, "ConstPool", FieldKind::ClassName, Redesigned),
        "ConstPool"
    );
}
