//! Supply-chain request tree.
//!
//! A request from the originator roots the tree. Production levels start at
//! 1 (market-facing) and descend towards raw suppliers. An optional level 0
//! entry carries explicit root supplies whose quantities define the gross
//! income base; it never takes part in the sharing itself.

mod codec;
mod validate;

use std::collections::BTreeMap;
use std::fmt;

pub use codec::{
    encode_financial_service, encode_header, encode_it_service, encode_options,
    encode_resource_group, encode_supply, parse_chain_descriptor, parse_chain_value,
    parse_financial_service, parse_header, parse_it_service, parse_options,
    parse_resource_group_fields, parse_supply, serialize_chain_descriptor, serialize_chain_value,
    DescriptorError, Reader,
};
pub use validate::{validate_chain, Diagnostic, DiagnosticCode, ValidationReport};

use crate::money::{Money, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SharingScheme {
    RevenueSharing,
    ProfitSharing,
}

impl SharingScheme {
    pub const ALL: [SharingScheme; 2] = [SharingScheme::RevenueSharing, SharingScheme::ProfitSharing];

    pub fn code(self) -> &'static str {
        match self {
            SharingScheme::RevenueSharing => "RS",
            SharingScheme::ProfitSharing => "PS",
        }
    }

    pub fn from_code(code: &str) -> Option<Self> {
        match code {
            "RS" => Some(SharingScheme::RevenueSharing),
            "PS" => Some(SharingScheme::ProfitSharing),
            _ => None,
        }
    }
}

impl fmt::Display for SharingScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// Who bears the cost of external services.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CostPolicy {
    /// The IT platform joins the consortium and takes a quota of the profit.
    PlatformMember,
    /// The originator fronts the service charge and is compensated.
    OriginatorPays,
    /// All production nodes front the charge pro rata.
    Shared,
}

impl CostPolicy {
    pub const ALL: [CostPolicy; 3] = [
        CostPolicy::PlatformMember,
        CostPolicy::OriginatorPays,
        CostPolicy::Shared,
    ];

    pub fn code(self) -> &'static str {
        match self {
            CostPolicy::PlatformMember => "PLATFORM_MEMBER",
            CostPolicy::OriginatorPays => "ORIGINATOR_PAYS",
            CostPolicy::Shared => "SHARED",
        }
    }

    pub fn from_code(code: &str) -> Option<Self> {
        match code {
            "PLATFORM_MEMBER" => Some(CostPolicy::PlatformMember),
            "ORIGINATOR_PAYS" => Some(CostPolicy::OriginatorPays),
            "SHARED" => Some(CostPolicy::Shared),
            _ => None,
        }
    }
}

impl fmt::Display for CostPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// Position of a supply in the tree: level `i`, resource `k`, supplier `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId {
    pub level: u32,
    pub resource: u32,
    pub supplier: u32,
}

impl NodeId {
    pub fn new(level: u32, resource: u32, supplier: u32) -> Self {
        NodeId { level, resource, supplier }
    }

    pub fn group(&self) -> GroupId {
        GroupId::new(self.level, self.resource)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.level, self.resource, self.supplier)
    }
}

/// A resource group: resource `k` at level `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupId {
    pub level: u32,
    pub resource: u32,
}

impl GroupId {
    pub fn new(level: u32, resource: u32) -> Self {
        GroupId { level, resource }
    }
}

impl fmt::Display for GroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.level, self.resource)
    }
}

/// Parameters the originator sets when advertising a request.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RequestHeader {
    pub request_id: u64,
    pub originator_id: String,
    /// Unit price `p` on the market.
    pub price: Money,
    /// Market demand `d` in units of final product.
    pub demand: u64,
    pub max_levels: u32,
    pub max_resources: u32,
    pub max_suppliers: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Supply {
    pub supplier_index: u32,
    pub supplier_name: String,
    pub supplier_id: String,
    pub fixed_cost: Money,
    /// Variable cost per unit.
    pub variable_cost: Money,
    pub additional_economy: BTreeMap<String, Rational>,
    pub quantity: Rational,
    /// Days over which the fixed cost is recovered.
    pub time_span: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResourceGroup {
    pub resource_index: u32,
    pub resource_name: String,
    /// Negotiated income quota `g`.
    pub quota: Rational,
    /// Bill of material: units of this resource per unit of final product.
    pub bom: Rational,
    pub supplies: Vec<Supply>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Level {
    pub index: u32,
    pub resources: Vec<ResourceGroup>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinancialService {
    pub service_name: String,
    pub uri: String,
    pub provider_id: String,
    pub invested: Money,
    /// Requested return on the investment.
    pub ratio: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ItService {
    pub service_name: String,
    pub uri: String,
    pub provider_id: String,
    pub access: String,
    pub cost: Money,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ServiceLevel {
    pub financial: Vec<FinancialService>,
    pub it: Vec<ItService>,
}

impl ServiceLevel {
    pub fn is_empty(&self) -> bool {
        self.financial.is_empty() && self.it.is_empty()
    }
}

/// Scheme and cost-policy selection carried by the `sharingOptions`
/// descriptor object.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SharingOptions {
    pub scheme: SharingScheme,
    pub cost_policy: CostPolicy,
    /// Quota of the virtual level `n+1` held by the platform under
    /// [`CostPolicy::PlatformMember`].
    pub platform_quota: Option<Rational>,
    pub originator_node: Option<NodeId>,
    /// Investors are repaid `invested * (1 + ratio)` when set, and
    /// `invested * ratio` otherwise.
    pub investor_principal_included: bool,
}

impl Default for SharingOptions {
    fn default() -> Self {
        SharingOptions {
            scheme: SharingScheme::ProfitSharing,
            cost_policy: CostPolicy::Shared,
            platform_quota: None,
            originator_node: None,
            investor_principal_included: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupplyChain {
    pub header: RequestHeader,
    pub levels: Vec<Level>,
    pub services: ServiceLevel,
    pub options: SharingOptions,
}

impl SupplyChain {
    /// An empty chain for the given header, with default options.
    pub fn new(header: RequestHeader) -> Self {
        SupplyChain {
            header,
            levels: Vec::new(),
            services: ServiceLevel::default(),
            options: SharingOptions::default(),
        }
    }

    pub fn level(&self, index: u32) -> Option<&Level> {
        self.levels.iter().find(|l| l.index == index)
    }

    /// Explicit level-0 root entry, if any.
    pub fn root_level(&self) -> Option<&Level> {
        self.level(0)
    }

    pub fn production_levels(&self) -> impl Iterator<Item = &Level> {
        self.levels.iter().filter(|l| l.index >= 1)
    }

    /// Every production group with its id.
    pub fn groups(&self) -> impl Iterator<Item = (GroupId, &ResourceGroup)> {
        self.production_levels().flat_map(|level| {
            level
                .resources
                .iter()
                .map(move |g| (GroupId::new(level.index, g.resource_index), g))
        })
    }

    /// Every production node (level ≥ 1) with its group and supply.
    pub fn nodes(&self) -> impl Iterator<Item = (NodeId, &ResourceGroup, &Supply)> {
        self.groups().flat_map(|(gid, group)| {
            group.supplies.iter().map(move |s| {
                (NodeId::new(gid.level, gid.resource, s.supplier_index), group, s)
            })
        })
    }

    pub fn group(&self, id: GroupId) -> Option<&ResourceGroup> {
        self.level(id.level)?
            .resources
            .iter()
            .find(|g| g.resource_index == id.resource)
    }

    pub fn supply(&self, id: NodeId) -> Option<&Supply> {
        self.group(id.group())?
            .supplies
            .iter()
            .find(|s| s.supplier_index == id.supplier)
    }

    pub fn has_production_node(&self, id: NodeId) -> bool {
        id.level >= 1 && self.supply(id).is_some()
    }

    /// Sum of explicit root-supply quantities, `None` when no level-0 supplies
    /// are declared.
    pub fn root_supply_quantity(&self) -> Option<Rational> {
        let root = self.root_level()?;
        let mut supplies = root.resources.iter().flat_map(|g| g.supplies.iter()).peekable();
        supplies.peek()?;
        Some(supplies.map(|s| s.quantity.clone()).sum())
    }
}
