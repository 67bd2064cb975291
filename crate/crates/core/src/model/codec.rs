//! JSON descriptor codec.
//!
//! Field names and nesting follow the consortium descriptor format:
//! `requestId`, `originator`, `p`, `d`, `levs`, `ress`, `sups`, `levels[]`,
//! `serviceLevel`, plus the optional `sharingOptions` extension object.
//! Absent numbers default to 0, absent strings to `""`, absent lists to
//! empty.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use serde_json::{Map, Number, Value};

use super::{
    CostPolicy, FinancialService, ItService, Level, NodeId, RequestHeader, ResourceGroup,
    ServiceLevel, SharingOptions, SharingScheme, Supply, SupplyChain,
};
use crate::canonical::{money_value, rational_value, to_canonical_string};
use crate::money::{parse_decimal_literal, parse_fraction, Money, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DescriptorError {
    #[error("malformed document: {0}")]
    MalformedDocument(String),
    #[error("schema violation at {path}: expected {expected}")]
    SchemaViolation { path: String, expected: String },
    #[error("duplicate key {key} at {path}")]
    DuplicateKey { path: String, key: String },
}

impl DescriptorError {
    pub fn code(&self) -> &'static str {
        match self {
            DescriptorError::MalformedDocument(_) => "MALFORMED_DOCUMENT",
            DescriptorError::SchemaViolation { .. } => "SCHEMA_VIOLATION",
            DescriptorError::DuplicateKey { .. } => "DUPLICATE_KEY",
        }
    }

    pub fn path(&self) -> Option<&str> {
        match self {
            DescriptorError::MalformedDocument(_) => None,
            DescriptorError::SchemaViolation { path, .. }
            | DescriptorError::DuplicateKey { path, .. } => Some(path),
        }
    }

    fn schema(path: impl Into<String>, expected: &str) -> Self {
        DescriptorError::SchemaViolation { path: path.into(), expected: expected.to_string() }
    }
}

fn empty_map() -> &'static Map<String, Value> {
    static EMPTY: OnceLock<Map<String, Value>> = OnceLock::new();
    EMPTY.get_or_init(Map::new)
}

/// Typed field access over one JSON object, tracking its JSON path for
/// error reporting.
#[derive(Debug, Clone)]
pub struct Reader<'a> {
    map: &'a Map<String, Value>,
    path: String,
}

impl<'a> Reader<'a> {
    pub fn new(value: &'a Value, path: impl Into<String>) -> Result<Self, DescriptorError> {
        let path = path.into();
        match value {
            Value::Object(map) => Ok(Reader { map, path }),
            _ => Err(DescriptorError::schema(path, "object")),
        }
    }

    pub fn path(&self) -> &str {
        &self.path
    }

    pub fn child_path(&self, key: &str) -> String {
        format!("{}.{}", self.path, key)
    }

    fn get(&self, key: &str) -> Option<&'a Value> {
        self.map.get(key)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.map.contains_key(key)
    }

    /// Exact number; JSON numbers are read from their literal text, strings
    /// must be exact fractions `p/q`.
    pub fn rational(&self, key: &str) -> Result<Rational, DescriptorError> {
        match self.get(key) {
            None => Ok(Rational::default()),
            Some(value) => read_rational(value, &self.child_path(key)),
        }
    }

    pub fn optional_rational(&self, key: &str) -> Result<Option<Rational>, DescriptorError> {
        match self.get(key) {
            None => Ok(None),
            Some(value) => read_rational(value, &self.child_path(key)).map(Some),
        }
    }

    pub fn money(&self, key: &str) -> Result<Money, DescriptorError> {
        self.rational(key).map(Money::from_rational)
    }

    pub fn u64(&self, key: &str) -> Result<u64, DescriptorError> {
        let path = self.child_path(key);
        let Some(value) = self.get(key) else { return Ok(0) };
        let Value::Number(n) = value else {
            return Err(DescriptorError::schema(path, "non-negative integer"));
        };
        parse_decimal_literal(&n.to_string())
            .filter(|r| r.is_integer())
            .and_then(|r| r.to_integer().try_into().ok())
            .ok_or_else(|| DescriptorError::schema(path, "non-negative integer"))
    }

    pub fn u32(&self, key: &str) -> Result<u32, DescriptorError> {
        let value = self.u64(key)?;
        u32::try_from(value)
            .map_err(|_| DescriptorError::schema(self.child_path(key), "integer below 2^32"))
    }

    pub fn optional_u32(&self, key: &str) -> Result<Option<u32>, DescriptorError> {
        if self.contains(key) {
            self.u32(key).map(Some)
        } else {
            Ok(None)
        }
    }

    pub fn string(&self, key: &str) -> Result<String, DescriptorError> {
        match self.get(key) {
            None => Ok(String::new()),
            Some(Value::String(s)) => Ok(s.clone()),
            Some(_) => Err(DescriptorError::schema(self.child_path(key), "string")),
        }
    }

    pub fn bool_or(&self, key: &str, default: bool) -> Result<bool, DescriptorError> {
        match self.get(key) {
            None => Ok(default),
            Some(Value::Bool(b)) => Ok(*b),
            Some(_) => Err(DescriptorError::schema(self.child_path(key), "boolean")),
        }
    }

    pub fn array(&self, key: &str) -> Result<&'a [Value], DescriptorError> {
        match self.get(key) {
            None => Ok(&[]),
            Some(Value::Array(items)) => Ok(items),
            Some(_) => Err(DescriptorError::schema(self.child_path(key), "array")),
        }
    }

    /// Nested object; an absent key reads as an empty object.
    pub fn object(&self, key: &str) -> Result<Reader<'a>, DescriptorError> {
        let path = self.child_path(key);
        match self.get(key) {
            None => Ok(Reader { map: empty_map(), path }),
            Some(value) => Reader::new(value, path),
        }
    }
}

fn read_rational(value: &Value, path: &str) -> Result<Rational, DescriptorError> {
    let parsed = match value {
        Value::Number(n) => parse_decimal_literal(&n.to_string()),
        Value::String(s) if s.contains('/') => parse_fraction(s),
        _ => None,
    };
    parsed.ok_or_else(|| DescriptorError::schema(path, "number"))
}

fn integer_value(value: u64) -> Value {
    Value::Number(Number::from(value))
}

pub fn parse_header(reader: &Reader<'_>) -> Result<RequestHeader, DescriptorError> {
    Ok(RequestHeader {
        request_id: reader.u64("requestId")?,
        originator_id: reader.string("originator")?,
        price: reader.money("p")?,
        demand: reader.u64("d")?,
        max_levels: reader.u32("levs")?,
        max_resources: reader.u32("ress")?,
        max_suppliers: reader.u32("sups")?,
    })
}

/// Header fields without `requestId`.
pub fn encode_header(header: &RequestHeader) -> Map<String, Value> {
    let mut out = Map::new();
    out.insert("originator".into(), Value::String(header.originator_id.clone()));
    out.insert("p".into(), money_value(&header.price));
    out.insert("d".into(), integer_value(header.demand));
    out.insert("levs".into(), integer_value(header.max_levels.into()));
    out.insert("ress".into(), integer_value(header.max_resources.into()));
    out.insert("sups".into(), integer_value(header.max_suppliers.into()));
    out
}

/// Reads the group-level fields (`resourceName`, `g`, `BOM`); supplies are
/// left empty. `k` falls back to `default_index` when absent.
pub fn parse_resource_group_fields(
    reader: &Reader<'_>,
    default_index: u32,
) -> Result<ResourceGroup, DescriptorError> {
    Ok(ResourceGroup {
        resource_index: reader.optional_u32("k")?.unwrap_or(default_index),
        resource_name: reader.string("resourceName")?,
        quota: reader.rational("g")?,
        bom: reader.rational("BOM")?,
        supplies: Vec::new(),
    })
}

/// Group fields including `k`, without the supply list.
pub fn encode_resource_group(group: &ResourceGroup) -> Map<String, Value> {
    let mut out = Map::new();
    out.insert("k".into(), integer_value(group.resource_index.into()));
    out.insert("resourceName".into(), Value::String(group.resource_name.clone()));
    out.insert("g".into(), rational_value(&group.quota));
    out.insert("BOM".into(), rational_value(&group.bom));
    out
}

pub fn parse_supply(reader: &Reader<'_>) -> Result<Supply, DescriptorError> {
    let data = reader.object("supplierData")?;
    let economic = reader.object("economicProfile")?;
    let production = reader.object("productionProfile")?;
    let extra = economic.object("additionalData")?;
    let mut additional_economy = BTreeMap::new();
    for key in extra.map.keys() {
        additional_economy.insert(key.clone(), extra.rational(key)?);
    }
    Ok(Supply {
        supplier_index: reader.u32("m")?,
        supplier_name: data.string("supplierName")?,
        supplier_id: data.string("supplierId")?,
        fixed_cost: economic.money("cf")?,
        variable_cost: economic.money("cv")?,
        additional_economy,
        quantity: production.rational("q")?,
        time_span: production.rational("tp")?,
    })
}

pub fn encode_supply(supply: &Supply) -> Map<String, Value> {
    let mut data = Map::new();
    data.insert("supplierName".into(), Value::String(supply.supplier_name.clone()));
    data.insert("supplierId".into(), Value::String(supply.supplier_id.clone()));

    let additional: Map<String, Value> = supply
        .additional_economy
        .iter()
        .map(|(k, v)| (k.clone(), rational_value(v)))
        .collect();
    let mut economic = Map::new();
    economic.insert("cf".into(), money_value(&supply.fixed_cost));
    economic.insert("cv".into(), money_value(&supply.variable_cost));
    economic.insert("additionalData".into(), Value::Object(additional));

    let mut production = Map::new();
    production.insert("q".into(), rational_value(&supply.quantity));
    production.insert("tp".into(), rational_value(&supply.time_span));

    let mut out = Map::new();
    out.insert("m".into(), integer_value(supply.supplier_index.into()));
    out.insert("supplierData".into(), Value::Object(data));
    out.insert("economicProfile".into(), Value::Object(economic));
    out.insert("productionProfile".into(), Value::Object(production));
    out
}

pub fn parse_financial_service(reader: &Reader<'_>) -> Result<FinancialService, DescriptorError> {
    Ok(FinancialService {
        service_name: reader.string("serviceName")?,
        uri: reader.string("uri")?,
        provider_id: reader.string("providerId")?,
        invested: reader.money("invested")?,
        ratio: reader.rational("ratio")?,
    })
}

pub fn encode_financial_service(service: &FinancialService) -> Map<String, Value> {
    let mut out = Map::new();
    out.insert("serviceName".into(), Value::String(service.service_name.clone()));
    out.insert("uri".into(), Value::String(service.uri.clone()));
    out.insert("providerId".into(), Value::String(service.provider_id.clone()));
    out.insert("invested".into(), money_value(&service.invested));
    out.insert("ratio".into(), rational_value(&service.ratio));
    out
}

pub fn parse_it_service(reader: &Reader<'_>) -> Result<ItService, DescriptorError> {
    Ok(ItService {
        service_name: reader.string("serviceName")?,
        uri: reader.string("uri")?,
        provider_id: reader.string("providerId")?,
        access: reader.string("access")?,
        cost: reader.money("cost")?,
    })
}

pub fn encode_it_service(service: &ItService) -> Map<String, Value> {
    let mut out = Map::new();
    out.insert("serviceName".into(), Value::String(service.service_name.clone()));
    out.insert("uri".into(), Value::String(service.uri.clone()));
    out.insert("providerId".into(), Value::String(service.provider_id.clone()));
    out.insert("access".into(), Value::String(service.access.clone()));
    out.insert("cost".into(), money_value(&service.cost));
    out
}

pub fn parse_options(reader: &Reader<'_>) -> Result<SharingOptions, DescriptorError> {
    let defaults = SharingOptions::default();
    let scheme = if reader.contains("scheme") {
        let code = reader.string("scheme")?;
        SharingScheme::from_code(&code)
            .ok_or_else(|| DescriptorError::schema(reader.child_path("scheme"), "\"RS\" or \"PS\""))?
    } else {
        defaults.scheme
    };
    let cost_policy = if reader.contains("costPolicy") {
        let code = reader.string("costPolicy")?;
        CostPolicy::from_code(&code).ok_or_else(|| {
            DescriptorError::schema(
                reader.child_path("costPolicy"),
                "\"PLATFORM_MEMBER\", \"ORIGINATOR_PAYS\" or \"SHARED\"",
            )
        })?
    } else {
        defaults.cost_policy
    };
    let originator_node = if reader.contains("originatorNode") {
        let node = reader.object("originatorNode")?;
        Some(NodeId::new(node.u32("i")?, node.u32("k")?, node.u32("m")?))
    } else {
        None
    };
    Ok(SharingOptions {
        scheme,
        cost_policy,
        platform_quota: reader.optional_rational("platformQuota")?,
        originator_node,
        investor_principal_included: reader
            .bool_or("investorPrincipalIncluded", defaults.investor_principal_included)?,
    })
}

pub fn encode_options(options: &SharingOptions) -> Map<String, Value> {
    let mut out = Map::new();
    out.insert("scheme".into(), Value::String(options.scheme.code().into()));
    out.insert("costPolicy".into(), Value::String(options.cost_policy.code().into()));
    if let Some(quota) = &options.platform_quota {
        out.insert("platformQuota".into(), rational_value(quota));
    }
    if let Some(node) = options.originator_node {
        let mut n = Map::new();
        n.insert("i".into(), integer_value(node.level.into()));
        n.insert("k".into(), integer_value(node.resource.into()));
        n.insert("m".into(), integer_value(node.supplier.into()));
        out.insert("originatorNode".into(), Value::Object(n));
    }
    out.insert(
        "investorPrincipalIncluded".into(),
        Value::Bool(options.investor_principal_included),
    );
    out
}

fn parse_services(reader: &Reader<'_>) -> Result<ServiceLevel, DescriptorError> {
    let mut services = ServiceLevel::default();
    let path = reader.child_path("financialServices");
    for (idx, item) in reader.array("financialServices")?.iter().enumerate() {
        services
            .financial
            .push(parse_financial_service(&Reader::new(item, format!("{path}[{idx}]"))?)?);
    }
    let path = reader.child_path("itServices");
    for (idx, item) in reader.array("itServices")?.iter().enumerate() {
        services
            .it
            .push(parse_it_service(&Reader::new(item, format!("{path}[{idx}]"))?)?);
    }
    Ok(services)
}

/// Parses an already-decoded descriptor value. Levels, groups and supplies
/// come back ordered by `i`, `k` and `m`.
pub fn parse_chain_value(value: &Value) -> Result<SupplyChain, DescriptorError> {
    let root = Reader::new(value, "$")?;
    let header = parse_header(&root)?;

    let mut levels = Vec::new();
    let mut seen_levels = BTreeSet::new();
    let levels_path = root.child_path("levels");
    for (li, level_value) in root.array("levels")?.iter().enumerate() {
        let level_reader = Reader::new(level_value, format!("{levels_path}[{li}]"))?;
        let index = level_reader.u32("i")?;
        if !seen_levels.insert(index) {
            return Err(DescriptorError::DuplicateKey {
                path: level_reader.child_path("i"),
                key: format!("i={index}"),
            });
        }
        let mut resources = Vec::new();
        let mut seen_groups = BTreeSet::new();
        let resources_path = level_reader.child_path("resources");
        for (ri, group_value) in level_reader.array("resources")?.iter().enumerate() {
            let group_reader = Reader::new(group_value, format!("{resources_path}[{ri}]"))?;
            let mut group = parse_resource_group_fields(&group_reader, ri as u32)?;
            if !seen_groups.insert(group.resource_index) {
                return Err(DescriptorError::DuplicateKey {
                    path: group_reader.path().to_string(),
                    key: format!("({},{})", index, group.resource_index),
                });
            }
            let mut seen_suppliers = BTreeSet::new();
            let supplies_path = group_reader.child_path("supplyList");
            for (si, supply_value) in group_reader.array("supplyList")?.iter().enumerate() {
                let supply_reader = Reader::new(supply_value, format!("{supplies_path}[{si}]"))?;
                let supply = parse_supply(&supply_reader)?;
                if !seen_suppliers.insert(supply.supplier_index) {
                    return Err(DescriptorError::DuplicateKey {
                        path: supply_reader.path().to_string(),
                        key: NodeId::new(index, group.resource_index, supply.supplier_index)
                            .to_string(),
                    });
                }
                group.supplies.push(supply);
            }
            group.supplies.sort_by_key(|s| s.supplier_index);
            resources.push(group);
        }
        resources.sort_by_key(|g| g.resource_index);
        levels.push(Level { index, resources });
    }
    levels.sort_by_key(|l| l.index);

    let services = parse_services(&root.object("serviceLevel")?)?;
    let options = parse_options(&root.object("sharingOptions")?)?;

    Ok(SupplyChain { header, levels, services, options })
}

/// Parses descriptor text.
pub fn parse_chain_descriptor(text: &str) -> Result<SupplyChain, DescriptorError> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| DescriptorError::MalformedDocument(e.to_string()))?;
    parse_chain_value(&value)
}

pub fn serialize_chain_value(chain: &SupplyChain) -> Value {
    let mut root = encode_header(&chain.header);
    root.insert("requestId".into(), integer_value(chain.header.request_id));

    let levels: Vec<Value> = chain
        .levels
        .iter()
        .map(|level| {
            let resources: Vec<Value> = level
                .resources
                .iter()
                .map(|group| {
                    let mut g = encode_resource_group(group);
                    let supplies =
                        group.supplies.iter().map(|s| Value::Object(encode_supply(s))).collect();
                    g.insert("supplyList".into(), Value::Array(supplies));
                    Value::Object(g)
                })
                .collect();
            let mut l = Map::new();
            l.insert("i".into(), integer_value(level.index.into()));
            l.insert("resources".into(), Value::Array(resources));
            Value::Object(l)
        })
        .collect();
    root.insert("levels".into(), Value::Array(levels));

    let mut services = Map::new();
    services.insert(
        "financialServices".into(),
        Value::Array(
            chain
                .services
                .financial
                .iter()
                .map(|s| Value::Object(encode_financial_service(s)))
                .collect(),
        ),
    );
    services.insert(
        "itServices".into(),
        Value::Array(chain.services.it.iter().map(|s| Value::Object(encode_it_service(s))).collect()),
    );
    root.insert("serviceLevel".into(), Value::Object(services));
    root.insert("sharingOptions".into(), Value::Object(encode_options(&chain.options)));
    Value::Object(root)
}

/// Canonical descriptor text.
pub fn serialize_chain_descriptor(chain: &SupplyChain) -> String {
    to_canonical_string(&serialize_chain_value(chain))
}
