use consortium_core::model::{
    parse_chain_value, serialize_chain_value, validate_chain, DescriptorError, DiagnosticCode,
    NodeId, SharingScheme,
};
use consortium_core::money::{integer, ratio};
use consortium_core::testkit::{self, LISTING_COMPLETE_JSON, LISTING_JSON};
use consortium_core::{parse_chain_descriptor, serialize_chain_descriptor, CostPolicy, Money};
use proptest::prelude::*;
use serde_json::{json, Value};

fn listing_value() -> Value {
    serde_json::from_str(LISTING_JSON).unwrap()
}

#[test]
fn listing_fields_are_mapped() {
    let chain = parse_chain_descriptor(LISTING_JSON).unwrap();
    let h = &chain.header;
    assert_eq!(h.request_id, 1);
    assert_eq!(h.originator_id, "Originator0");
    assert_eq!(h.price, Money::from_integer(450));
    assert_eq!(h.demand, 4);
    assert_eq!((h.max_levels, h.max_resources, h.max_suppliers), (2, 3, 4));

    let group = &chain.levels[0].resources[0];
    assert_eq!(chain.levels[0].index, 1);
    assert_eq!(group.resource_name, "K1");
    assert_eq!(group.quota, ratio(2, 5));
    assert_eq!(group.bom, integer(8));

    let m0 = &group.supplies[0];
    assert_eq!(m0.supplier_name, "M0");
    assert_eq!(m0.supplier_id, "https://m1@www.supplier1.com:456/");
    assert_eq!(m0.fixed_cost, Money::from_integer(35));
    assert_eq!(m0.variable_cost, Money::from_integer(35));
    assert_eq!(m0.quantity, integer(12));
    assert_eq!(m0.time_span, integer(365));

    let fin = &chain.services.financial[0];
    assert_eq!(fin.invested, Money::from_integer(120));
    assert_eq!(fin.ratio, ratio(9, 20));
    assert_eq!(chain.services.it[0].cost, Money::from_integer(90));
    assert_eq!(chain.services.it[0].access, "http://www.serviceurl.com");

    assert_eq!(chain.options.scheme, SharingScheme::ProfitSharing);
    assert_eq!(chain.options.cost_policy, CostPolicy::Shared);
    assert!(chain.options.investor_principal_included);
}

#[test]
fn listing_excerpt_alone_misses_quota_sum() {
    let chain = parse_chain_descriptor(LISTING_JSON).unwrap();
    let report = validate_chain(&chain);
    assert_eq!(report.violations.len(), 1, "{report:?}");
    assert!(report.has(DiagnosticCode::QuotaSum));
}

#[test]
fn completed_listing_is_valid() {
    let chain = testkit::listing_chain();
    let report = validate_chain(&chain);
    assert!(report.violations.is_empty(), "{report:?}");
    assert!(report.warnings.is_empty(), "{report:?}");
}

#[test]
fn listing_round_trips() {
    for text in [LISTING_JSON, LISTING_COMPLETE_JSON] {
        let chain = parse_chain_descriptor(text).unwrap();
        let once = serialize_chain_descriptor(&chain);
        let back = parse_chain_descriptor(&once).unwrap();
        assert_eq!(back, chain);
        assert_eq!(serialize_chain_descriptor(&back), once);
    }
}

#[test]
fn canonical_form_is_sorted_and_compact() {
    let text = serialize_chain_descriptor(&testkit::mini_chain());
    assert!(!text.contains(' ') && !text.contains('\n'));
    assert!(text.starts_with(r#"{"d":4,"levels":[{"i":1,"resources":[{"BOM":1,"g":1,"k":1,"#));
    let listing = serialize_chain_descriptor(&parse_chain_descriptor(LISTING_JSON).unwrap());
    assert!(listing.contains(r#""BOM":8,"#), "{listing}");
    assert!(listing.contains(r#""g":0.4,"#), "{listing}");
    assert!(listing.contains(r#""ratio":0.45"#), "{listing}");
}

#[test]
fn empty_services_are_emitted() {
    let text = serialize_chain_descriptor(&testkit::mini_chain());
    assert!(text.contains(r#""financialServices":[]"#));
    assert!(text.contains(r#""itServices":[]"#));
}

#[test]
fn string_quota_is_schema_violation() {
    let mut doc = listing_value();
    doc["levels"][0]["resources"][0]["g"] = json!("0.4");
    let err = parse_chain_value(&doc).unwrap_err();
    assert_eq!(err.code(), "SCHEMA_VIOLATION");
    assert_eq!(err.path(), Some("$.levels[0].resources[0].g"));
}

#[test]
fn fraction_strings_are_accepted() {
    let mut doc = listing_value();
    doc["levels"][0]["resources"][0]["g"] = json!("2/5");
    let chain = parse_chain_value(&doc).unwrap();
    assert_eq!(chain.levels[0].resources[0].quota, ratio(2, 5));
}

#[test]
fn malformed_document() {
    let err = parse_chain_descriptor("{\"p\": 450,").unwrap_err();
    assert!(matches!(err, DescriptorError::MalformedDocument(_)));
    assert_eq!(err.code(), "MALFORMED_DOCUMENT");
}

#[test]
fn empty_levels_parse_but_fail_validation() {
    let mut doc = listing_value();
    doc["levels"] = json!([]);
    let chain = parse_chain_value(&doc).unwrap();
    assert!(chain.levels.is_empty());
    assert!(validate_chain(&chain).has(DiagnosticCode::EmptyChain));
}

#[test]
fn absent_fields_default_to_zero() {
    let chain = parse_chain_descriptor(r#"{"levels":[{"i":1,"resources":[{"supplyList":[{}]}]}]}"#)
        .unwrap();
    assert_eq!(chain.header.price, Money::zero());
    assert_eq!(chain.header.originator_id, "");
    let supply = &chain.levels[0].resources[0].supplies[0];
    assert_eq!(supply.quantity, integer(0));
    assert_eq!(supply.supplier_name, "");
}

#[test]
fn duplicate_supplier_is_rejected() {
    let mut doc = listing_value();
    let supply = doc["levels"][0]["resources"][0]["supplyList"][0].clone();
    doc["levels"][0]["resources"][0]["supplyList"].as_array_mut().unwrap().push(supply);
    let err = parse_chain_value(&doc).unwrap_err();
    assert_eq!(err.code(), "DUPLICATE_KEY");
}

#[test]
fn duplicate_group_is_rejected() {
    let mut doc = listing_value();
    let mut group = doc["levels"][0]["resources"][0].clone();
    group["k"] = json!(0);
    doc["levels"][0]["resources"].as_array_mut().unwrap().push(group);
    assert_eq!(parse_chain_value(&doc).unwrap_err().code(), "DUPLICATE_KEY");
}

#[test]
fn bad_quota_fixture() {
    let chain = parse_chain_descriptor(testkit::BAD_QUOTA_JSON).unwrap();
    let report = validate_chain(&chain);
    assert_eq!(report.violations.len(), 1);
    assert_eq!(report.violations[0].code, DiagnosticCode::QuotaSum);
    assert_eq!(report.violations[0].path, "$.levels");
}

fn violation_after(edit: impl FnOnce(&mut Value)) -> Vec<(String, String)> {
    let mut doc = serialize_chain_value(&testkit::listing_chain());
    edit(&mut doc);
    let chain = parse_chain_value(&doc).unwrap();
    validate_chain(&chain)
        .violations
        .iter()
        .map(|d| (d.code.as_str().to_string(), d.path.clone()))
        .collect()
}

fn supply0(doc: &mut Value) -> &mut Value {
    &mut doc["levels"][0]["resources"][0]["supplyList"][0]
}

#[test]
fn listed_invariants_reject() {
    let expect = |code: &str, path: &str, found: Vec<(String, String)>| {
        assert!(
            found.iter().any(|(c, p)| c == code && p == path),
            "expected {code} at {path}, got {found:?}"
        );
    };
    expect(
        "NONPOSITIVE_QUANTITY",
        "$.levels[0].resources[0].supplyList[0].productionProfile.q",
        violation_after(|d| supply0(d)["productionProfile"]["q"] = json!(0)),
    );
    expect(
        "NONPOSITIVE_TIMESPAN",
        "$.levels[0].resources[0].supplyList[0].productionProfile.tp",
        violation_after(|d| supply0(d)["productionProfile"]["tp"] = json!(0)),
    );
    expect(
        "NEGATIVE_COST",
        "$.levels[0].resources[0].supplyList[0].economicProfile.cv",
        violation_after(|d| supply0(d)["economicProfile"]["cv"] = json!(-1)),
    );
    expect(
        "NEGATIVE_COST",
        "$.levels[0].resources[0].supplyList[0].economicProfile.cf",
        violation_after(|d| supply0(d)["economicProfile"]["cf"] = json!(-1)),
    );
    expect("NONPOSITIVE_PRICE", "$.p", violation_after(|d| d["p"] = json!(0)));
    expect("INVALID_REQUEST_ID", "$.requestId", violation_after(|d| d["requestId"] = json!(0)));
    expect("INVALID_BOUND", "$.ress", violation_after(|d| d["ress"] = json!(0)));
    expect(
        "SUPPLIER_BOUND",
        "$.levels[1].resources[0].supplyList[1].m",
        violation_after(|d| d["sups"] = json!(2)),
    );
    expect(
        "RESOURCE_BOUND",
        "$.levels[0].resources[1].k",
        violation_after(|d| d["ress"] = json!(0)),
    );
    expect("LEVEL_BOUND", "$.levels", violation_after(|d| d["levs"] = json!(1)));
    expect(
        "LEVEL_CONTIGUITY",
        "$.levels[1].i",
        violation_after(|d| d["levels"][1]["i"] = json!(3)),
    );
    expect(
        "QUOTA_RANGE",
        "$.levels[0].resources[0].g",
        violation_after(|d| d["levels"][0]["resources"][0]["g"] = json!(-0.1)),
    );
    expect("QUOTA_SUM", "$.levels", violation_after(|d| d["levels"][0]["resources"][0]["g"] = json!(0.5)));
    expect(
        "NONPOSITIVE_BOM",
        "$.levels[0].resources[0].BOM",
        violation_after(|d| d["levels"][0]["resources"][0]["BOM"] = json!(0)),
    );
    expect(
        "EMPTY_SUPPLY_LIST",
        "$.levels[0].resources[1].supplyList",
        violation_after(|d| d["levels"][0]["resources"][1]["supplyList"] = json!([])),
    );
    expect(
        "EMPTY_LEVEL",
        "$.levels[1].resources",
        violation_after(|d| d["levels"][1]["resources"] = json!([])),
    );
    expect(
        "NONPOSITIVE_INVESTMENT",
        "$.serviceLevel.financialServices[0].invested",
        violation_after(|d| d["serviceLevel"]["financialServices"][0]["invested"] = json!(0)),
    );
    expect(
        "NEGATIVE_RATIO",
        "$.serviceLevel.financialServices[0].ratio",
        violation_after(|d| d["serviceLevel"]["financialServices"][0]["ratio"] = json!(-0.1)),
    );
    expect(
        "NEGATIVE_IT_COST",
        "$.serviceLevel.itServices[0].cost",
        violation_after(|d| d["serviceLevel"]["itServices"][0]["cost"] = json!(-5)),
    );
    expect(
        "PLATFORM_QUOTA_MISSING",
        "$.sharingOptions.platformQuota",
        violation_after(|d| {
            d["sharingOptions"].as_object_mut().unwrap().remove("platformQuota");
        }),
    );
    expect(
        "PLATFORM_QUOTA_RANGE",
        "$.sharingOptions.platformQuota",
        violation_after(|d| d["sharingOptions"]["platformQuota"] = json!(1.5)),
    );
    expect(
        "ORIGINATOR_NODE",
        "$.sharingOptions.originatorNode",
        violation_after(|d| d["sharingOptions"]["costPolicy"] = json!("ORIGINATOR_PAYS")),
    );
    expect("EMPTY_CHAIN", "$.levels", violation_after(|d| d["levels"] = json!([])));
    expect(
        "ROOT_LEVEL",
        "$.levels[0].resources[0].g",
        violation_after(|d| {
            let mut root = d["levels"][0].clone();
            root["i"] = json!(0);
            root["resources"] = json!([d["levels"][0]["resources"][0].clone()]);
            root["resources"][0]["k"] = json!(0);
            d["levels"].as_array_mut().unwrap().insert(0, root);
        }),
    );
}

#[test]
fn root_level_quantity_mismatch_is_a_warning() {
    let mut doc = serialize_chain_value(&testkit::mini_chain());
    let mut root = doc["levels"][0].clone();
    root["i"] = json!(0);
    root["resources"][0]["k"] = json!(0);
    root["resources"][0]["g"] = json!(0);
    root["resources"][0]["supplyList"][0]["productionProfile"]["q"] = json!(5);
    doc["levels"].as_array_mut().unwrap().insert(0, root);
    let report = validate_chain(&parse_chain_value(&doc).unwrap());
    assert!(report.is_valid(), "{report:?}");
    assert!(report.has_warning(DiagnosticCode::RootQuantityMismatch));
}

#[test]
fn originator_node_must_exist() {
    let found = violation_after(|d| {
        d["sharingOptions"] = json!({"costPolicy": "ORIGINATOR_PAYS", "originatorNode": {"i": 1, "k": 0, "m": 0}});
        d["levels"][0]["resources"][0]["g"] = json!(0.5);
    });
    assert!(found.is_empty(), "{found:?}");
    let chain = parse_chain_value(&{
        let mut d = serialize_chain_value(&testkit::listing_chain());
        d["sharingOptions"] = json!({"costPolicy": "ORIGINATOR_PAYS", "originatorNode": {"i": 1, "k": 0, "m": 0}});
        d
    })
    .unwrap();
    assert_eq!(chain.options.originator_node, Some(NodeId::new(1, 0, 0)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn generated_chains_round_trip(seed in any::<u64>()) {
        let chain = testkit::random_chain(&mut testkit::rng(seed), 1 + seed % 1000);
        prop_assert!(validate_chain(&chain).is_valid(), "{:?}", validate_chain(&chain));
        let text = serialize_chain_descriptor(&chain);
        let back = parse_chain_descriptor(&text).unwrap();
        prop_assert_eq!(&back, &chain);
        prop_assert_eq!(serialize_chain_descriptor(&back), text);
    }
}
