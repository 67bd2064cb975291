use std::collections::BTreeMap;

use consortium_core::canonical::exact_string;
use consortium_core::engine::CURRENCY_PLACES;
use consortium_core::{
    run_sharing, CostPolicy, Money, Participant, PayoutLine, SharingResult, SharingScheme, SupplyChain,
};
use serde_json::{json, Value};

#[derive(Debug, Clone)]
pub struct Configuration {
    pub scheme: SharingScheme,
    pub policy: CostPolicy,
    pub result: SharingResult,
}

impl Configuration {
    pub fn name(&self) -> String {
        config_name(self.scheme, self.policy)
    }
}

fn config_name(scheme: SharingScheme, policy: CostPolicy) -> String {
    format!("{}/{}", scheme.code(), policy.code())
}

/// Results for every applicable (scheme, cost policy) pair of a descriptor.
#[derive(Debug, Clone)]
pub struct Comparison {
    pub baseline: Option<String>,
    pub configurations: Vec<Configuration>,
    /// Configurations that were skipped, with the reason.
    pub omitted: Vec<(String, String)>,
}

pub fn compare(chain: &SupplyChain) -> Comparison {
    let mut configurations = Vec::new();
    let mut omitted = Vec::new();
    for scheme in [SharingScheme::RevenueSharing, SharingScheme::ProfitSharing] {
        for policy in CostPolicy::ALL {
            let name = config_name(scheme, policy);
            let inapplicable = match policy {
                CostPolicy::PlatformMember => chain.options.platform_quota.is_none().then_some("no platformQuota"),
                CostPolicy::OriginatorPays => chain.options.originator_node.is_none().then_some("no originatorNode"),
                CostPolicy::Shared => None,
            };
            if let Some(reason) = inapplicable {
                omitted.push((name, reason.to_string()));
                continue;
            }
            let mut variant = chain.clone();
            variant.options.scheme = scheme;
            variant.options.cost_policy = policy;
            match run_sharing(&variant) {
                Ok(result) => configurations.push(Configuration { scheme, policy, result }),
                Err(e) => omitted.push((name, e.to_string())),
            }
        }
    }
    let own = config_name(chain.options.scheme, chain.options.cost_policy);
    let baseline = configurations
        .iter()
        .map(Configuration::name)
        .find(|n| *n == own)
        .or_else(|| configurations.first().map(Configuration::name));
    Comparison { baseline, configurations, omitted }
}

fn participant_key(p: &Participant) -> String {
    consortium_core::canonical::to_canonical_string(&p.to_json())
}

impl Comparison {
    /// True iff every configuration pays out exactly its gross income and
    /// its rounded lines sum to the rounded gross income.
    pub fn conserves(&self) -> bool {
        self.configurations.iter().all(|c| {
            c.result.payout_sum() == c.result.gross_income
                && c.result.rounded_sum() == c.result.gross_income.round_half_even(CURRENCY_PLACES)
        })
    }

    /// Participants in first-seen order with their label.
    fn participants(&self) -> Vec<(String, String)> {
        let mut seen = Vec::new();
        for config in &self.configurations {
            for line in &config.result.payouts {
                let key = participant_key(&line.participant);
                if !seen.iter().any(|(k, _)| *k == key) {
                    seen.push((key, display_label(line)));
                }
            }
        }
        seen
    }

    fn totals(config: &Configuration) -> BTreeMap<String, &PayoutLine> {
        config.result.payouts.iter().map(|l| (participant_key(&l.participant), l)).collect()
    }

    pub fn to_json(&self) -> Value {
        let base = self
            .baseline
            .as_ref()
            .and_then(|name| self.configurations.iter().find(|c| c.name() == *name))
            .map(Self::totals)
            .unwrap_or_default();
        let deltas: Vec<Value> = self
            .participants()
            .into_iter()
            .map(|(key, label)| {
                let values: serde_json::Map<String, Value> = self
                    .configurations
                    .iter()
                    .map(|c| {
                        let zero = Money::zero();
                        let mine = Self::totals(c).get(&key).map_or(zero.clone(), |l| l.total.clone());
                        let theirs = base.get(&key).map_or(zero, |l| l.total.clone());
                        (c.name(), exact_string(&(mine - theirs)))
                    })
                    .collect();
                let participant: Value = serde_json::from_str(&key).expect("canonical participant");
                json!({"participant": participant, "label": label, "deltas": values})
            })
            .collect();
        json!({
            "baseline": self.baseline,
            "configurations": self.configurations.iter().map(|c| json!({
                "name": c.name(),
                "scheme": c.scheme.code(),
                "costPolicy": c.policy.code(),
                "result": c.result.to_json(),
            })).collect::<Vec<_>>(),
            "omitted": self.omitted.iter().map(|(name, reason)| json!({"name": name, "reason": reason})).collect::<Vec<_>>(),
            "deltas": deltas,
            "conserved": self.conserves(),
        })
    }
}

fn display_label(line: &PayoutLine) -> String {
    match &line.participant {
        Participant::Node(id) => format!("{} {id}", line.label),
        Participant::FinancialService { .. } => format!("{} [investor]", line.label),
        Participant::ItService { .. } => format!("{} [it]", line.label),
        Participant::Platform { .. } => format!("{} [platform]", line.label),
    }
}

fn amount(value: &Money, exact: bool) -> String {
    if exact {
        value.to_string()
    } else {
        value.to_fixed(CURRENCY_PLACES)
    }
}

fn total(line: &PayoutLine, exact: bool) -> String {
    if exact {
        line.total.to_string()
    } else {
        line.rounded_total.to_fixed(CURRENCY_PLACES)
    }
}

fn table(rows: &[Vec<String>]) -> String {
    let columns = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..columns)
        .map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in rows {
        let cells: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(c, cell)| {
                if c == 0 {
                    format!("{cell:<w$}", w = widths[c])
                } else {
                    format!("{cell:>w$}", w = widths[c])
                }
            })
            .collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    out
}

pub fn render_result(result: &SharingResult, exact: bool) -> String {
    let mut rows = vec![vec![
        "participant".to_string(),
        "reimbursement".into(),
        "alignment".into(),
        "profit share".into(),
        "total".into(),
    ]];
    for line in &result.payouts {
        rows.push(vec![
            display_label(line),
            amount(&line.reimbursement, exact),
            amount(&line.alignment, exact),
            amount(&line.profit_share, exact),
            total(line, exact),
        ]);
    }
    let sum = if exact { result.payout_sum().to_string() } else { result.rounded_sum().to_fixed(CURRENCY_PLACES) };
    rows.push(vec!["sum".into(), String::new(), String::new(), String::new(), sum]);

    let mut out = format!(
        "scheme {}  cost policy {}\n",
        result.scheme.code(),
        result.cost_policy.code()
    );
    out.push_str(&table(&rows));
    out.push_str(&format!(
        "gross income {}  total income {}  alignment {}  service charges {}  profit chain {}\n",
        amount(&result.gross_income, exact),
        amount(&result.total_income, exact),
        amount(&result.total_alignment, exact),
        amount(&result.service_charges, exact),
        amount(&result.profit_chain, exact),
    ));
    if result.loss_flag {
        out.push_str("warning: the chain runs at a loss; payouts are not executable\n");
    }
    out
}

pub fn render_comparison(comparison: &Comparison, exact: bool) -> String {
    let mut header = vec!["participant".to_string()];
    header.extend(comparison.configurations.iter().map(Configuration::name));
    let mut rows = vec![header];
    let lines: Vec<BTreeMap<String, &PayoutLine>> =
        comparison.configurations.iter().map(Comparison::totals).collect();
    for (key, label) in comparison.participants() {
        let mut row = vec![label];
        row.extend(lines.iter().map(|m| m.get(&key).map_or("-".to_string(), |l| total(l, exact))));
        rows.push(row);
    }
    let mut sum_row = vec!["sum".to_string()];
    let mut gi_row = vec!["gross income".to_string()];
    for config in &comparison.configurations {
        let r = &config.result;
        sum_row.push(if exact { r.payout_sum().to_string() } else { r.rounded_sum().to_fixed(CURRENCY_PLACES) });
        gi_row.push(amount(&r.gross_income, exact));
    }
    rows.push(sum_row);
    rows.push(gi_row);

    let mut out = table(&rows);
    for (name, reason) in &comparison.omitted {
        out.push_str(&format!("omitted {name}: {reason}\n"));
    }
    out.push_str(if comparison.conserves() {
        "check: every column sums to gross income\n"
    } else {
        "check FAILED: a column does not sum to gross income\n"
    });
    out
}
