//! Revenue-sharing and profit-sharing strategies.
//!
//! Both schemes share the cost analysis in [`SharingBasis`]; they differ
//! only in whether production costs are reimbursed before the remaining
//! pool is split by quota.

use std::collections::BTreeMap;

use super::result::{CostTable, Participant, PayoutLine};
use super::services::apply_cost_policy;
use super::steps::{alignment_compensation, net_profit_chain, profit_quota_payout};
use super::EngineError;
use crate::model::{CostPolicy, GroupId, NodeId, SharingScheme, SupplyChain};
use crate::money::{Money, Rational};

/// Cost analysis common to every scheme.
#[derive(Debug, Clone)]
pub struct SharingBasis {
    pub costs: CostTable,
    pub fractions: BTreeMap<NodeId, Rational>,
    pub gross_income: Money,
    pub group_shares: BTreeMap<GroupId, Money>,
    pub level_incomes: BTreeMap<u32, Money>,
    pub total_income: Money,
    /// Income share of every node.
    pub node_shares: BTreeMap<NodeId, Money>,
    pub service_charges: Money,
}

/// What a strategy decides: the node lines, an optional platform line and
/// the aggregates it distributed.
#[derive(Debug, Clone)]
pub struct Settlement {
    pub node_lines: Vec<PayoutLine>,
    pub platform_line: Option<PayoutLine>,
    pub total_alignment: Money,
    pub profit_chain: Money,
    pub loss: bool,
}

pub trait SharingStrategy {
    fn scheme(&self) -> SharingScheme;

    fn settle(&self, chain: &SupplyChain, basis: &SharingBasis) -> Result<Settlement, EngineError>;
}

pub fn strategy_for(scheme: SharingScheme) -> &'static dyn SharingStrategy {
    match scheme {
        SharingScheme::ProfitSharing => &ProfitSharing,
        SharingScheme::RevenueSharing => &RevenueSharing,
    }
}

/// Costs at group-minimum rates and alignment compensations are reimbursed
/// first; the net profit chain is then split by quota.
#[derive(Debug, Clone, Copy, Default)]
pub struct ProfitSharing;

/// Every node bears its own costs and receives `f * g` of gross income net
/// of service charges.
#[derive(Debug, Clone, Copy, Default)]
pub struct RevenueSharing;

fn label(chain: &SupplyChain, node: NodeId) -> String {
    chain
        .supply(node)
        .map(|s| s.supplier_name.clone())
        .filter(|name| !name.is_empty())
        .unwrap_or_else(|| node.to_string())
}

fn platform_line(chain: &SupplyChain, pool: &Money) -> Option<PayoutLine> {
    if chain.options.cost_policy != CostPolicy::PlatformMember {
        return None;
    }
    let quota = chain.options.platform_quota.as_ref()?;
    let (provider_id, name) = chain
        .services
        .it
        .first()
        .map(|s| (s.provider_id.clone(), s.service_name.clone()))
        .unwrap_or_else(|| ("platform".to_string(), "platform".to_string()));
    let share = profit_quota_payout(&Rational::from_integer(1.into()), quota, pool);
    Some(PayoutLine::new(
        Participant::Platform { provider_id },
        name,
        Money::zero(),
        Money::zero(),
        share,
    ))
}

impl SharingStrategy for ProfitSharing {
    fn scheme(&self) -> SharingScheme {
        SharingScheme::ProfitSharing
    }

    fn settle(&self, chain: &SupplyChain, basis: &SharingBasis) -> Result<Settlement, EngineError> {
        let mut alignment: BTreeMap<NodeId, Money> = BTreeMap::new();
        for (node, share) in &basis.node_shares {
            let cost = &basis.costs.unit_cost[node];
            let min = &basis.costs.group_min[&node.group()];
            alignment.insert(*node, alignment_compensation(share, cost, min)?);
        }
        let compensation = apply_cost_policy(
            chain,
            &basis.service_charges,
            &basis.node_shares,
            &basis.total_income,
        )?;
        for (node, amount) in compensation {
            *alignment.entry(node).or_default() += amount;
        }
        let total_alignment: Money = alignment.values().sum();
        let profit_chain = net_profit_chain(
            &basis.gross_income,
            &basis.total_income,
            &total_alignment,
            &basis.service_charges,
        );

        let mut node_lines = Vec::with_capacity(basis.node_shares.len());
        for (node, share) in &basis.node_shares {
            let group = chain.group(node.group()).expect("node belongs to a group");
            let profit = profit_quota_payout(&basis.fractions[node], &group.quota, &profit_chain);
            node_lines.push(PayoutLine::new(
                Participant::Node(*node),
                label(chain, *node),
                share.clone(),
                alignment.remove(node).unwrap_or_default(),
                profit,
            ));
        }

        Ok(Settlement {
            node_lines,
            platform_line: platform_line(chain, &profit_chain),
            loss: profit_chain.is_negative(),
            total_alignment,
            profit_chain,
        })
    }
}

impl SharingStrategy for RevenueSharing {
    fn scheme(&self) -> SharingScheme {
        SharingScheme::RevenueSharing
    }

    fn settle(&self, chain: &SupplyChain, basis: &SharingBasis) -> Result<Settlement, EngineError> {
        let pool = &basis.gross_income - &basis.service_charges;
        let node_lines = basis
            .node_shares
            .keys()
            .map(|node| {
                let group = chain.group(node.group()).expect("node belongs to a group");
                let share = profit_quota_payout(&basis.fractions[node], &group.quota, &pool);
                PayoutLine::new(
                    Participant::Node(*node),
                    label(chain, *node),
                    Money::zero(),
                    Money::zero(),
                    share,
                )
            })
            .collect();
        Ok(Settlement {
            node_lines,
            platform_line: platform_line(chain, &pool),
            total_alignment: Money::zero(),
            loss: pool.is_negative(),
            profit_chain: pool,
        })
    }
}
