//! The individual sharing formulas. Each function is exact; callers compose
//! them in [`run_sharing`](super::run_sharing).

use std::collections::BTreeMap;

use num_traits::{One, Signed};

use super::EngineError;
use crate::model::GroupId;
use crate::money::{integer, Money, Rational};

/// Unit cost of a supply: fixed cost spread over time span and quantity,
/// plus variable cost. `cf / (tp * q) + cv`.
pub fn unit_cost(
    fixed_cost: &Money,
    time_span: &Rational,
    quantity: &Rational,
    variable_cost: &Money,
) -> Result<Money, EngineError> {
    if !time_span.is_positive() || !quantity.is_positive() {
        return Err(EngineError::DegenerateSupply(format!(
            "time span {time_span} and quantity {quantity} must be positive"
        )));
    }
    let spread = fixed_cost
        .divide(&(time_span * quantity))
        .expect("denominator checked positive");
    Ok(spread + variable_cost.clone())
}

/// Minimum advertised unit cost within a group.
pub fn min_cost_for_group<'a, I>(costs: I) -> Result<Money, EngineError>
where
    I: IntoIterator<Item = &'a Money>,
{
    costs.into_iter().min().cloned().ok_or(EngineError::EmptyGroup)
}

/// Gross income `p * rootQuantity`.
pub fn gross_income(price: &Money, root_quantity: &Rational) -> Money {
    price * root_quantity
}

/// Group income share `d * mincost * BOM`.
pub fn group_income_share(demand: u64, min_cost: &Money, bom: &Rational) -> Money {
    min_cost * &(integer(demand as i64) * bom)
}

/// Per-level income sums and their total.
pub fn level_and_total_income(
    group_shares: &BTreeMap<GroupId, Money>,
) -> (BTreeMap<u32, Money>, Money) {
    let mut levels: BTreeMap<u32, Money> = BTreeMap::new();
    for (group, share) in group_shares {
        *levels.entry(group.level).or_default() += share;
    }
    let total = levels.values().sum();
    (levels, total)
}

/// A supplier's quantity fraction within its group.
pub fn supply_fraction(quantity: &Rational, group_quantities: &[Rational]) -> Result<Rational, EngineError> {
    if !quantity.is_positive() || group_quantities.iter().any(|q| !q.is_positive()) {
        return Err(EngineError::DegenerateSupply("quantities must be positive".into()));
    }
    let total: Rational = group_quantities.iter().sum();
    Ok(quantity / total)
}

pub fn supplier_income_share(group_share: &Money, fraction: &Rational) -> Money {
    group_share * fraction
}

/// Compensation for a unit cost above the group minimum:
/// `(share / mincost) * (cost - mincost)`, and zero for suppliers at the
/// minimum.
pub fn alignment_compensation(
    supplier_share: &Money,
    cost: &Money,
    min_cost: &Money,
) -> Result<Money, EngineError> {
    if cost <= min_cost {
        return Ok(Money::zero());
    }
    if !min_cost.is_positive() {
        return Err(EngineError::DegenerateSupply(format!(
            "group minimum cost {min_cost} must be positive to scale alignment"
        )));
    }
    let scale = supplier_share.ratio_to(min_cost).expect("min cost is positive");
    Ok((cost - min_cost) * &scale)
}

/// Net profit chain `GI - itot - alcost - serviceCharges`. May be negative.
pub fn net_profit_chain(
    gross_income: &Money,
    total_income: &Money,
    total_alignment: &Money,
    service_charges: &Money,
) -> Money {
    gross_income - total_income - total_alignment.clone() - service_charges.clone()
}

/// Quota payout `f * g * PC`.
pub fn profit_quota_payout(fraction: &Rational, quota: &Rational, profit: &Money) -> Money {
    profit * &(fraction * quota)
}

/// `1 + ratio`, or `ratio` alone when the principal is repaid elsewhere.
pub(crate) fn investor_multiplier(ratio: &Rational, principal_included: bool) -> Rational {
    if principal_included {
        Rational::one() + ratio
    } else {
        ratio.clone()
    }
}
