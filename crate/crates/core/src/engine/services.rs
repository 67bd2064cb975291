//! Service charges and the three cost-bearing scenarios.

use std::collections::BTreeMap;

use super::result::{Participant, PayoutLine};
use super::steps::investor_multiplier;
use super::EngineError;
use crate::model::{CostPolicy, NodeId, ServiceLevel, SupplyChain};
use crate::money::Money;

/// Total charge for external services and the lines paying each provider.
///
/// Investors are always repaid `invested * (1 + ratio)` (or `invested *
/// ratio` without principal). IT providers are paid their cost except under
/// [`CostPolicy::PlatformMember`], where the platform takes a profit quota
/// instead.
pub fn service_charges(
    services: &ServiceLevel,
    policy: CostPolicy,
    principal_included: bool,
) -> (Money, Vec<PayoutLine>) {
    let mut lines = Vec::new();
    for (index, service) in services.financial.iter().enumerate() {
        let owed = &service.invested * &investor_multiplier(&service.ratio, principal_included);
        lines.push(PayoutLine::new(
            Participant::FinancialService { index, provider_id: service.provider_id.clone() },
            service.service_name.clone(),
            owed,
            Money::zero(),
            Money::zero(),
        ));
    }
    if policy != CostPolicy::PlatformMember {
        for (index, service) in services.it.iter().enumerate() {
            lines.push(PayoutLine::new(
                Participant::ItService { index, provider_id: service.provider_id.clone() },
                service.service_name.clone(),
                service.cost.clone(),
                Money::zero(),
                Money::zero(),
            ));
        }
    }
    let charge = lines.iter().map(|l| &l.total).sum();
    (charge, lines)
}

/// Compensation entries for whoever fronted the service charge.
///
/// * `OriginatorPays`: the whole charge goes to the originator's node.
/// * `Shared`: the charge is split over all nodes pro rata to their income
///   share `shares[node] / total_income`.
/// * `PlatformMember`: nothing.
pub fn apply_cost_policy(
    chain: &SupplyChain,
    charge: &Money,
    shares: &BTreeMap<NodeId, Money>,
    total_income: &Money,
) -> Result<BTreeMap<NodeId, Money>, EngineError> {
    let mut out = BTreeMap::new();
    if charge.is_zero() {
        return Ok(out);
    }
    if charge.is_negative() {
        return Err(EngineError::DegenerateSupply(format!("negative service charge {charge}")));
    }
    match chain.options.cost_policy {
        CostPolicy::PlatformMember => {}
        CostPolicy::OriginatorPays => {
            let node = chain
                .options
                .originator_node
                .filter(|n| chain.has_production_node(*n))
                .ok_or(EngineError::MissingOriginatorNode(chain.options.originator_node))?;
            out.insert(node, charge.clone());
        }
        CostPolicy::Shared => {
            if total_income.is_zero() {
                return Err(EngineError::ZeroTotalIncome);
            }
            for (node, share) in shares {
                let weight = share.ratio_to(total_income).expect("total income is nonzero");
                out.insert(*node, charge * &weight);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{FinancialService, ItService, RequestHeader, SharingOptions};
    use crate::money::{integer, ratio};

    fn it_service(cost: i64) -> ItService {
        ItService {
            service_name: "S1".into(),
            uri: "https://s1@www.example.com:123/".into(),
            provider_id: "https://sp1@www.anotherexample.com:456/".into(),
            access: "http://www.serviceurl.com".into(),
            cost: Money::from_integer(cost),
        }
    }

    fn investor() -> FinancialService {
        FinancialService {
            service_name: "S0".into(),
            uri: "https://s0@www.example.com:123/".into(),
            provider_id: "https://sp0@www.anotherexample.com:456/".into(),
            invested: Money::from_integer(120),
            ratio: ratio(45, 100),
        }
    }

    fn chain_with(policy: CostPolicy, originator: Option<NodeId>) -> SupplyChain {
        let header = RequestHeader {
            request_id: 1,
            originator_id: "O".into(),
            price: Money::from_integer(1),
            demand: 1,
            max_levels: 1,
            max_resources: 1,
            max_suppliers: 2,
        };
        let mut chain = SupplyChain::new(header);
        chain.options = SharingOptions {
            cost_policy: policy,
            originator_node: originator,
            ..SharingOptions::default()
        };
        chain.levels.push(crate::model::Level {
            index: 1,
            resources: vec![crate::model::ResourceGroup {
                resource_index: 1,
                resource_name: "K".into(),
                quota: integer(1),
                bom: integer(1),
                supplies: (0..3)
                    .map(|m| crate::model::Supply {
                        supplier_index: m,
                        supplier_name: format!("M{m}"),
                        supplier_id: String::new(),
                        fixed_cost: Money::zero(),
                        variable_cost: Money::from_integer(1),
                        additional_economy: Default::default(),
                        quantity: integer(1),
                        time_span: integer(1),
                    })
                    .collect(),
            }],
        });
        chain
    }

    #[test]
    fn it_cost_charged_under_shared() {
        let services = ServiceLevel { financial: vec![], it: vec![it_service(90)] };
        let (charge, lines) = service_charges(&services, CostPolicy::Shared, true);
        assert_eq!(charge, Money::from_integer(90));
        assert_eq!(lines.len(), 1);
        assert_eq!(lines[0].total, Money::from_integer(90));
    }

    #[test]
    fn investor_repaid_with_ratio() {
        let services = ServiceLevel { financial: vec![investor()], it: vec![] };
        let (charge, lines) = service_charges(&services, CostPolicy::Shared, true);
        assert_eq!(charge, Money::from_integer(174));
        assert_eq!(lines[0].total, Money::from_integer(174));
        let (charge, _) = service_charges(&services, CostPolicy::Shared, false);
        assert_eq!(charge, Money::from_integer(54));
    }

    #[test]
    fn platform_member_drops_it_cost() {
        let services = ServiceLevel { financial: vec![investor()], it: vec![it_service(90)] };
        let (charge, lines) = service_charges(&services, CostPolicy::PlatformMember, true);
        assert_eq!(charge, Money::from_integer(174));
        assert_eq!(lines.len(), 1);
    }

    #[test]
    fn no_services_no_charge() {
        let (charge, lines) = service_charges(&ServiceLevel::default(), CostPolicy::Shared, true);
        assert!(charge.is_zero());
        assert!(lines.is_empty());
    }

    #[test]
    fn originator_pays_single_entry() {
        let chain = chain_with(CostPolicy::OriginatorPays, Some(NodeId::new(1, 1, 2)));
        let comp =
            apply_cost_policy(&chain, &Money::from_integer(90), &BTreeMap::new(), &Money::zero())
                .unwrap();
        assert_eq!(comp, [(NodeId::new(1, 1, 2), Money::from_integer(90))].into());
    }

    #[test]
    fn originator_pays_needs_node() {
        let chain = chain_with(CostPolicy::OriginatorPays, None);
        let err = apply_cost_policy(&chain, &Money::from_integer(90), &BTreeMap::new(), &Money::zero())
            .unwrap_err();
        assert_eq!(err, EngineError::MissingOriginatorNode(None));
        let chain = chain_with(CostPolicy::OriginatorPays, Some(NodeId::new(1, 1, 7)));
        assert!(apply_cost_policy(&chain, &Money::from_integer(1), &BTreeMap::new(), &Money::zero())
            .is_err());
    }

    #[test]
    fn shared_split_pro_rata() {
        let chain = chain_with(CostPolicy::Shared, None);
        let shares: BTreeMap<_, _> = [
            (NodeId::new(1, 1, 0), Money::from_integer(300)),
            (NodeId::new(1, 1, 1), Money::from_integer(100)),
        ]
        .into();
        let comp =
            apply_cost_policy(&chain, &Money::from_integer(90), &shares, &Money::from_integer(400))
                .unwrap();
        assert_eq!(comp[&NodeId::new(1, 1, 0)], Money::from_rational(ratio(135, 2)));
        assert_eq!(comp[&NodeId::new(1, 1, 1)], Money::from_rational(ratio(45, 2)));
    }

    #[test]
    fn shared_with_zero_income_fails() {
        let chain = chain_with(CostPolicy::Shared, None);
        let err = apply_cost_policy(&chain, &Money::from_integer(90), &BTreeMap::new(), &Money::zero())
            .unwrap_err();
        assert_eq!(err, EngineError::ZeroTotalIncome);
    }

    #[test]
    fn zero_charge_is_empty_under_every_policy() {
        for policy in CostPolicy::ALL {
            let chain = chain_with(policy, None);
            let comp = apply_cost_policy(&chain, &Money::zero(), &BTreeMap::new(), &Money::zero())
                .unwrap();
            assert!(comp.is_empty(), "{policy}");
        }
    }
}
