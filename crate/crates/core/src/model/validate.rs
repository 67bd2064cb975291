use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use super::{CostPolicy, NodeId, SupplyChain};
use crate::money::{integer, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DiagnosticCode {
    InvalidRequestId,
    NonpositivePrice,
    InvalidBound,
    EmptyChain,
    RootLevel,
    LevelContiguity,
    LevelBound,
    EmptyLevel,
    ResourceBound,
    SupplierBound,
    DuplicateKey,
    QuotaRange,
    NonpositiveBom,
    EmptySupplyList,
    NegativeCost,
    NonpositiveQuantity,
    NonpositiveTimespan,
    NonpositiveInvestment,
    NegativeRatio,
    NegativeItCost,
    PlatformQuotaMissing,
    PlatformQuotaRange,
    OriginatorNode,
    QuotaSum,
    // warnings
    DemandBomMismatch,
    RootQuantityMismatch,
    PlatformQuotaIgnored,
}

impl DiagnosticCode {
    pub fn as_str(self) -> &'static str {
        use DiagnosticCode::*;
        match self {
            InvalidRequestId => "INVALID_REQUEST_ID",
            NonpositivePrice => "NONPOSITIVE_PRICE",
            InvalidBound => "INVALID_BOUND",
            EmptyChain => "EMPTY_CHAIN",
            RootLevel => "ROOT_LEVEL",
            LevelContiguity => "LEVEL_CONTIGUITY",
            LevelBound => "LEVEL_BOUND",
            EmptyLevel => "EMPTY_LEVEL",
            ResourceBound => "RESOURCE_BOUND",
            SupplierBound => "SUPPLIER_BOUND",
            DuplicateKey => "DUPLICATE_KEY",
            QuotaRange => "QUOTA_RANGE",
            NonpositiveBom => "NONPOSITIVE_BOM",
            EmptySupplyList => "EMPTY_SUPPLY_LIST",
            NegativeCost => "NEGATIVE_COST",
            NonpositiveQuantity => "NONPOSITIVE_QUANTITY",
            NonpositiveTimespan => "NONPOSITIVE_TIMESPAN",
            NonpositiveInvestment => "NONPOSITIVE_INVESTMENT",
            NegativeRatio => "NEGATIVE_RATIO",
            NegativeItCost => "NEGATIVE_IT_COST",
            PlatformQuotaMissing => "PLATFORM_QUOTA_MISSING",
            PlatformQuotaRange => "PLATFORM_QUOTA_RANGE",
            OriginatorNode => "ORIGINATOR_NODE",
            QuotaSum => "QUOTA_SUM",
            DemandBomMismatch => "DEMAND_BOM_MISMATCH",
            RootQuantityMismatch => "ROOT_QUANTITY_MISMATCH",
            PlatformQuotaIgnored => "PLATFORM_QUOTA_IGNORED",
        }
    }
}

impl fmt::Display for DiagnosticCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub code: DiagnosticCode,
    pub path: String,
    pub message: String,
}

impl Diagnostic {
    fn to_json(&self) -> Value {
        json!({"code": self.code.as_str(), "path": self.path, "message": self.message})
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}: {}", self.code, self.path, self.message)
    }
}

/// Violations block sealing and sharing; warnings are informational.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Diagnostic>,
    pub warnings: Vec<Diagnostic>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, code: DiagnosticCode) -> bool {
        self.violations.iter().any(|d| d.code == code)
    }

    pub fn has_warning(&self, code: DiagnosticCode) -> bool {
        self.warnings.iter().any(|d| d.code == code)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "violations": self.violations.iter().map(Diagnostic::to_json).collect::<Vec<_>>(),
            "warnings": self.warnings.iter().map(Diagnostic::to_json).collect::<Vec<_>>(),
        })
    }

    fn violation(&mut self, code: DiagnosticCode, path: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Diagnostic { code, path: path.into(), message: message.into() });
    }

    fn warning(&mut self, code: DiagnosticCode, path: impl Into<String>, message: impl Into<String>) {
        self.warnings.push(Diagnostic { code, path: path.into(), message: message.into() });
    }
}

/// Checks every structural invariant of a chain. Paths address the
/// descriptor positions of the offending fields.
pub fn validate_chain(chain: &SupplyChain) -> ValidationReport {
    use DiagnosticCode::*;

    let mut report = ValidationReport::default();
    let header = &chain.header;

    if header.request_id == 0 {
        report.violation(InvalidRequestId, "$.requestId", "requestId must be positive");
    }
    if !header.price.is_positive() {
        report.violation(NonpositivePrice, "$.p", format!("price must be positive, got {}", header.price));
    }
    for (key, bound) in [
        ("levs", header.max_levels),
        ("ress", header.max_resources),
        ("sups", header.max_suppliers),
    ] {
        if bound == 0 {
            report.violation(InvalidBound, format!("$.{key}"), format!("{key} must be at least 1"));
        }
    }

    if chain.production_levels().next().is_none() {
        report.violation(EmptyChain, "$.levels", "no production levels");
    }

    let mut expected_level = 1u32;
    let mut seen_levels = BTreeSet::new();
    let mut seen_groups = BTreeSet::new();
    let mut production_levels = 0u32;
    let mut quota_sum = Rational::zero();

    for (li, level) in chain.levels.iter().enumerate() {
        let lpath = format!("$.levels[{li}]");
        if !seen_levels.insert(level.index) {
            report.violation(DuplicateKey, format!("{lpath}.i"), format!("level {} repeated", level.index));
            continue;
        }

        if level.index == 0 {
            if li != 0 {
                report.violation(RootLevel, format!("{lpath}.i"), "root level must be listed first");
            }
            if level.resources.len() != 1 || level.resources[0].resource_index != 0 {
                report.violation(RootLevel, format!("{lpath}.resources"), "root level holds exactly one resource with k=0");
            }
            for (ri, group) in level.resources.iter().enumerate() {
                if !group.quota.is_zero() {
                    report.violation(RootLevel, format!("{lpath}.resources[{ri}].g"), "root level carries no quota");
                }
                for (si, supply) in group.supplies.iter().enumerate() {
                    if !supply.quantity.is_positive() {
                        report.violation(
                            NonpositiveQuantity,
                            format!("{lpath}.resources[{ri}].supplyList[{si}].productionProfile.q"),
                            "quantity must be positive",
                        );
                    }
                }
            }
            continue;
        }

        production_levels += 1;
        if level.index != expected_level {
            report.violation(
                LevelContiguity,
                format!("{lpath}.i"),
                format!("expected level {expected_level}, found {}", level.index),
            );
        }
        expected_level = level.index.saturating_add(1);
        if level.resources.is_empty() {
            report.violation(EmptyLevel, format!("{lpath}.resources"), format!("level {} has no resources", level.index));
        }

        for (ri, group) in level.resources.iter().enumerate() {
            let gpath = format!("{lpath}.resources[{ri}]");
            let k = group.resource_index;
            if !seen_groups.insert((level.index, k)) {
                report.violation(DuplicateKey, gpath.clone(), format!("group ({},{k}) repeated", level.index));
            }
            if k > header.max_resources {
                report.violation(ResourceBound, format!("{gpath}.k"), format!("k={k} exceeds ress={}", header.max_resources));
            }
            if group.quota.is_negative() || group.quota > Rational::one() {
                report.violation(QuotaRange, format!("{gpath}.g"), format!("quota {} outside [0,1]", group.quota));
            }
            quota_sum += &group.quota;
            if !group.bom.is_positive() {
                report.violation(NonpositiveBom, format!("{gpath}.BOM"), "BOM must be positive");
            }
            if group.supplies.is_empty() {
                report.violation(EmptySupplyList, format!("{gpath}.supplyList"), "no supplies");
            }

            let mut seen_suppliers = BTreeSet::new();
            for (si, supply) in group.supplies.iter().enumerate() {
                let spath = format!("{gpath}.supplyList[{si}]");
                let m = supply.supplier_index;
                if !seen_suppliers.insert(m) {
                    report.violation(DuplicateKey, spath.clone(), format!("node {} repeated", NodeId::new(level.index, k, m)));
                }
                if m > header.max_suppliers {
                    report.violation(SupplierBound, format!("{spath}.m"), format!("m={m} exceeds sups={}", header.max_suppliers));
                }
                if supply.fixed_cost.is_negative() {
                    report.violation(NegativeCost, format!("{spath}.economicProfile.cf"), "fixed cost is negative");
                }
                if supply.variable_cost.is_negative() {
                    report.violation(NegativeCost, format!("{spath}.economicProfile.cv"), "variable cost is negative");
                }
                if !supply.quantity.is_positive() {
                    report.violation(NonpositiveQuantity, format!("{spath}.productionProfile.q"), "quantity must be positive");
                }
                if !supply.time_span.is_positive() {
                    report.violation(NonpositiveTimespan, format!("{spath}.productionProfile.tp"), "time span must be positive");
                }
            }

            let supplied: Rational = group.supplies.iter().map(|s| s.quantity.clone()).sum();
            let required = integer(header.demand as i64) * &group.bom;
            if !group.supplies.is_empty() && supplied != required {
                report.warning(
                    DemandBomMismatch,
                    gpath,
                    format!("supplied quantity {supplied} differs from d*BOM = {required}"),
                );
            }
        }
    }

    if header.max_levels > 0 && production_levels > header.max_levels {
        report.violation(LevelBound, "$.levels", format!("{production_levels} levels exceed levs={}", header.max_levels));
    }

    for (idx, service) in chain.services.financial.iter().enumerate() {
        let path = format!("$.serviceLevel.financialServices[{idx}]");
        if !service.invested.is_positive() {
            report.violation(NonpositiveInvestment, format!("{path}.invested"), "investment must be positive");
        }
        if service.ratio.is_negative() {
            report.violation(NegativeRatio, format!("{path}.ratio"), "ratio is negative");
        }
    }
    for (idx, service) in chain.services.it.iter().enumerate() {
        if service.cost.is_negative() {
            report.violation(NegativeItCost, format!("$.serviceLevel.itServices[{idx}].cost"), "IT cost is negative");
        }
    }

    let options = &chain.options;
    match options.cost_policy {
        CostPolicy::PlatformMember => match &options.platform_quota {
            None => report.violation(
                PlatformQuotaMissing,
                "$.sharingOptions.platformQuota",
                "PLATFORM_MEMBER requires a platform quota",
            ),
            Some(quota) => {
                if quota.is_negative() || *quota > Rational::one() {
                    report.violation(PlatformQuotaRange, "$.sharingOptions.platformQuota", "platform quota outside [0,1]");
                }
                quota_sum += quota;
            }
        },
        CostPolicy::OriginatorPays => match options.originator_node {
            None => report.violation(
                OriginatorNode,
                "$.sharingOptions.originatorNode",
                "ORIGINATOR_PAYS requires an originator node",
            ),
            Some(node) if !chain.has_production_node(node) => report.violation(
                OriginatorNode,
                "$.sharingOptions.originatorNode",
                format!("originator node {node} is not in the chain"),
            ),
            Some(_) => {}
        },
        CostPolicy::Shared => {}
    }
    if options.platform_quota.is_some() && options.cost_policy != CostPolicy::PlatformMember {
        report.warning(
            PlatformQuotaIgnored,
            "$.sharingOptions.platformQuota",
            format!("platform quota is only used under PLATFORM_MEMBER, policy is {}", options.cost_policy),
        );
    }

    if quota_sum != Rational::one() {
        report.violation(QuotaSum, "$.levels", format!("quotas sum to {quota_sum}, expected 1"));
    }

    if let Some(root_quantity) = chain.root_supply_quantity() {
        if root_quantity != integer(header.demand as i64) {
            report.warning(
                RootQuantityMismatch,
                "$.levels[0]",
                format!("root supplies total {root_quantity}, demand is {}", header.demand),
            );
        }
    }

    report
}
