//! Income-sharing computation.
//!
//! [`run_sharing`] evaluates a validated chain in five steps: unit costs,
//! group minima, gross and total income with per-supplier shares, alignment
//! and net profit, and finally the quota split. The scheme-specific part is
//! delegated to a [`SharingStrategy`].

mod result;
mod rounding;
mod services;
mod steps;
mod strategy;

use std::collections::BTreeMap;

pub use result::{CostTable, Participant, PayoutLine, SharingResult};
pub use rounding::{round_payouts, CURRENCY_PLACES};
pub use services::{apply_cost_policy, service_charges};
pub use steps::{
    alignment_compensation, gross_income, group_income_share, level_and_total_income,
    min_cost_for_group, net_profit_chain, profit_quota_payout, supplier_income_share,
    supply_fraction, unit_cost,
};
pub use strategy::{strategy_for, ProfitSharing, RevenueSharing, Settlement, SharingBasis, SharingStrategy};

use crate::model::{validate_chain, NodeId, SupplyChain, ValidationReport};
use crate::money::{integer, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("chain failed validation with {} violation(s)", .0.violations.len())]
    ValidationFailed(ValidationReport),
    #[error("degenerate supply: {0}")]
    DegenerateSupply(String),
    #[error("resource group has no supplies")]
    EmptyGroup,
    #[error("originator node {0:?} is not a node of the chain")]
    MissingOriginatorNode(Option<NodeId>),
    #[error("service charge cannot be shared: total income is zero")]
    ZeroTotalIncome,
}

impl EngineError {
    pub fn code(&self) -> &'static str {
        match self {
            EngineError::ValidationFailed(_) => "VALIDATION_FAILED",
            EngineError::DegenerateSupply(_) => "DEGENERATE_SUPPLY",
            EngineError::EmptyGroup => "EMPTY_GROUP",
            EngineError::MissingOriginatorNode(_) => "MISSING_ORIGINATOR_NODE",
            EngineError::ZeroTotalIncome => "ZERO_TOTAL_INCOME",
        }
    }
}

/// Steps 1 to 3 plus service charges: everything both schemes need.
pub fn sharing_basis(chain: &SupplyChain) -> Result<SharingBasis, EngineError> {
    let mut costs = CostTable::default();
    let mut fractions = BTreeMap::new();
    let mut group_shares = BTreeMap::new();
    let mut node_shares = BTreeMap::new();

    for (gid, group) in chain.groups() {
        let mut group_costs = Vec::with_capacity(group.supplies.len());
        for supply in &group.supplies {
            let cost = unit_cost(
                &supply.fixed_cost,
                &supply.time_span,
                &supply.quantity,
                &supply.variable_cost,
            )?;
            costs
                .unit_cost
                .insert(NodeId::new(gid.level, gid.resource, supply.supplier_index), cost.clone());
            group_costs.push(cost);
        }
        let min = min_cost_for_group(&group_costs)?;
        let share = group_income_share(chain.header.demand, &min, &group.bom);

        let quantities: Vec<Rational> = group.supplies.iter().map(|s| s.quantity.clone()).collect();
        for supply in &group.supplies {
            let node = NodeId::new(gid.level, gid.resource, supply.supplier_index);
            let f = supply_fraction(&supply.quantity, &quantities)?;
            node_shares.insert(node, supplier_income_share(&share, &f));
            fractions.insert(node, f);
        }
        costs.group_min.insert(gid, min);
        group_shares.insert(gid, share);
    }

    let root_quantity = chain
        .root_supply_quantity()
        .unwrap_or_else(|| integer(chain.header.demand as i64));
    let gross = gross_income(&chain.header.price, &root_quantity);
    let (level_incomes, total_income) = level_and_total_income(&group_shares);
    let (charges, _) = service_charges(
        &chain.services,
        chain.options.cost_policy,
        chain.options.investor_principal_included,
    );

    Ok(SharingBasis {
        costs,
        fractions,
        gross_income: gross,
        group_shares,
        level_incomes,
        total_income,
        node_shares,
        service_charges: charges,
    })
}

/// Runs the full sharing computation on a chain under its configured
/// scheme and cost policy.
pub fn run_sharing(chain: &SupplyChain) -> Result<SharingResult, EngineError> {
    let report = validate_chain(chain);
    if !report.is_valid() {
        return Err(EngineError::ValidationFailed(report));
    }
    let basis = sharing_basis(chain)?;
    let strategy = strategy_for(chain.options.scheme);
    let settlement = strategy.settle(chain, &basis)?;

    let (_, service_lines) = service_charges(
        &chain.services,
        chain.options.cost_policy,
        chain.options.investor_principal_included,
    );
    let mut lines = settlement.node_lines;
    lines.extend(service_lines);
    lines.extend(settlement.platform_line);

    let preferred = chain.options.originator_node.map(Participant::Node);
    let payouts = round_payouts(lines, preferred.as_ref());

    Ok(SharingResult {
        scheme: strategy.scheme(),
        cost_policy: chain.options.cost_policy,
        costs: basis.costs,
        fractions: basis.fractions,
        gross_income: basis.gross_income,
        total_income: basis.total_income,
        level_incomes: basis.level_incomes,
        group_shares: basis.group_shares,
        total_alignment: settlement.total_alignment,
        service_charges: basis.service_charges,
        profit_chain: settlement.profit_chain,
        loss_flag: settlement.loss,
        payouts,
    })
}
