use std::collections::BTreeMap;
use std::fmt;

use serde_json::{json, Value};

use crate::canonical::exact_string;
use crate::model::{CostPolicy, GroupId, NodeId, SharingScheme};
use crate::money::{fraction_string, Money, Rational};

/// Unit costs per node and their group minima.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CostTable {
    pub unit_cost: BTreeMap<NodeId, Money>,
    pub group_min: BTreeMap<GroupId, Money>,
}

/// Recipient of a payout line.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Participant {
    Node(NodeId),
    FinancialService { index: usize, provider_id: String },
    ItService { index: usize, provider_id: String },
    /// The IT platform as consortium member, holding the virtual level
    /// `n+1` quota.
    Platform { provider_id: String },
}

impl Participant {
    pub fn to_json(&self) -> Value {
        match self {
            Participant::Node(id) => {
                json!({"kind": "node", "i": id.level, "k": id.resource, "m": id.supplier})
            }
            Participant::FinancialService { index, provider_id } => {
                json!({"kind": "financial", "index": index, "providerId": provider_id})
            }
            Participant::ItService { index, provider_id } => {
                json!({"kind": "it", "index": index, "providerId": provider_id})
            }
            Participant::Platform { provider_id } => {
                json!({"kind": "platform", "providerId": provider_id})
            }
        }
    }
}

impl fmt::Display for Participant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Participant::Node(id) => write!(f, "node {id}"),
            Participant::FinancialService { index, .. } => write!(f, "investor #{index}"),
            Participant::ItService { index, .. } => write!(f, "IT service #{index}"),
            Participant::Platform { .. } => f.write_str("platform"),
        }
    }
}

/// One participant's settlement.
///
/// For production nodes `reimbursement` is the cost-based income share
/// (profit sharing only), `alignment` the extra-cost compensation plus any
/// service-charge compensation, and `profit_share` the quota payout. For
/// external providers the whole amount owed sits in `reimbursement`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PayoutLine {
    pub participant: Participant,
    pub label: String,
    pub reimbursement: Money,
    pub alignment: Money,
    pub profit_share: Money,
    pub total: Money,
    /// `total` rounded to cents; set by [`round_payouts`](super::round_payouts).
    pub rounded_total: Money,
}

impl PayoutLine {
    pub fn new(
        participant: Participant,
        label: impl Into<String>,
        reimbursement: Money,
        alignment: Money,
        profit_share: Money,
    ) -> Self {
        let total = &(&reimbursement + &alignment) + &profit_share;
        PayoutLine {
            participant,
            label: label.into(),
            reimbursement,
            alignment,
            profit_share,
            rounded_total: total.clone(),
            total,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "participant": self.participant.to_json(),
            "label": self.label,
            "reimbursement": exact_string(&self.reimbursement),
            "alignment": exact_string(&self.alignment),
            "profitShare": exact_string(&self.profit_share),
            "total": exact_string(&self.total),
            "roundedTotal": self.rounded_total.to_fixed(2),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SharingResult {
    pub scheme: SharingScheme,
    pub cost_policy: CostPolicy,
    pub costs: CostTable,
    /// Quantity fraction of every node within its group.
    pub fractions: BTreeMap<NodeId, Rational>,
    pub gross_income: Money,
    pub total_income: Money,
    pub level_incomes: BTreeMap<u32, Money>,
    pub group_shares: BTreeMap<GroupId, Money>,
    /// Production alignment plus service-charge compensation actually paid.
    pub total_alignment: Money,
    pub service_charges: Money,
    /// Pool distributed by quota: the net profit chain under profit
    /// sharing, gross income less service charges under revenue sharing.
    pub profit_chain: Money,
    pub loss_flag: bool,
    pub payouts: Vec<PayoutLine>,
}

impl SharingResult {
    pub fn payout_sum(&self) -> Money {
        self.payouts.iter().map(|l| &l.total).sum()
    }

    pub fn rounded_sum(&self) -> Money {
        self.payouts.iter().map(|l| &l.rounded_total).sum()
    }

    pub fn line(&self, participant: &Participant) -> Option<&PayoutLine> {
        self.payouts.iter().find(|l| &l.participant == participant)
    }

    pub fn node_line(&self, node: NodeId) -> Option<&PayoutLine> {
        self.line(&Participant::Node(node))
    }

    /// A result with a loss is reported but must not be executed.
    pub fn is_executable(&self) -> bool {
        !self.loss_flag
    }

    pub fn to_json(&self) -> Value {
        let nodes: Vec<Value> = self
            .costs
            .unit_cost
            .iter()
            .map(|(id, cost)| {
                json!({
                    "i": id.level,
                    "k": id.resource,
                    "m": id.supplier,
                    "unitCost": exact_string(cost),
                    "fraction": self.fractions.get(id).map(fraction_string),
                })
            })
            .collect();
        let groups: Vec<Value> = self
            .group_shares
            .iter()
            .map(|(id, share)| {
                json!({
                    "i": id.level,
                    "k": id.resource,
                    "minCost": self.costs.group_min.get(id).map(exact_string),
                    "share": exact_string(share),
                })
            })
            .collect();
        let levels: Vec<Value> = self
            .level_incomes
            .iter()
            .map(|(i, amount)| json!({"i": i, "income": exact_string(amount)}))
            .collect();
        json!({
            "scheme": self.scheme.code(),
            "costPolicy": self.cost_policy.code(),
            "grossIncome": exact_string(&self.gross_income),
            "totalIncome": exact_string(&self.total_income),
            "levelIncomes": levels,
            "groupShares": groups,
            "nodes": nodes,
            "totalAlignment": exact_string(&self.total_alignment),
            "serviceCharges": exact_string(&self.service_charges),
            "profitChain": exact_string(&self.profit_chain),
            "lossFlag": self.loss_flag,
            "executable": self.is_executable(),
            "payouts": self.payouts.iter().map(PayoutLine::to_json).collect::<Vec<_>>(),
            "roundedSum": self.rounded_sum().to_fixed(2),
        })
    }
}
