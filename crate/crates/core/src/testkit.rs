//! Fixtures and seeded generators for tests and benchmarks.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::ledger::{Transaction, TxKind};
use crate::model::{
    parse_chain_descriptor, CostPolicy, FinancialService, GroupId, ItService, Level, NodeId,
    RequestHeader, ResourceGroup, ServiceLevel, SharingOptions, SharingScheme, Supply, SupplyChain,
};
use crate::money::{integer, ratio, Money, Rational};

pub const MINI_JSON: &str = include_str!("../../../fixtures/mini.json");
pub const LISTING_JSON: &str = include_str!("../../../fixtures/listing1.json");
pub const LISTING_COMPLETE_JSON: &str = include_str!("../../../fixtures/listing1_complete.json");
pub const BAD_QUOTA_JSON: &str = include_str!("../../../fixtures/badquota.json");

/// One group, two suppliers: cv 100 x 3 units and cv 110 x 1 unit, p = 450, d = 4.
pub fn mini_chain() -> SupplyChain {
    parse_chain_descriptor(MINI_JSON).expect("mini fixture parses")
}

pub fn listing_chain() -> SupplyChain {
    parse_chain_descriptor(LISTING_COMPLETE_JSON).expect("listing fixture parses")
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn cents(rng: &mut impl Rng, lo: i64, hi: i64) -> Money {
    Money::from_rational(ratio(rng.random_range(lo..=hi), 100))
}

/// Splits 1 into `parts` non-negative multiples of 1/100.
fn split_unit(rng: &mut impl Rng, parts: usize) -> Vec<Rational> {
    let mut cuts: Vec<i64> = (0..parts - 1).map(|_| rng.random_range(0..=100)).collect();
    cuts.push(0);
    cuts.push(100);
    cuts.sort_unstable();
    cuts.windows(2).map(|w| ratio(w[1] - w[0], 100)).collect()
}

fn random_supply(rng: &mut impl Rng, m: u32) -> Supply {
    let quantity = if rng.random_bool(0.7) {
        integer(rng.random_range(1..=60))
    } else {
        ratio(rng.random_range(1..=600), 10)
    };
    Supply {
        supplier_index: m,
        supplier_name: format!("M{m}"),
        supplier_id: format!("urn:supplier:{m}"),
        fixed_cost: cents(rng, 0, 100_000),
        variable_cost: cents(rng, 1, 20_000),
        additional_economy: Default::default(),
        quantity,
        time_span: integer(rng.random_range(1..=365)),
    }
}

fn distinct_indices(rng: &mut impl Rng, count: usize, from: u32) -> Vec<u32> {
    let mut pool: Vec<u32> = (from..=4).collect();
    pool.shuffle(rng);
    let mut picked = pool[..count].to_vec();
    picked.sort_unstable();
    picked
}

/// A random chain that passes validation. Covers both schemes, all three
/// cost policies, optional services and an optional root level.
pub fn random_chain(rng: &mut impl Rng, request_id: u64) -> SupplyChain {
    let level_count = rng.random_range(1..=4u32);
    let demand = rng.random_range(1..=20u64);
    let header = RequestHeader {
        request_id,
        originator_id: format!("urn:originator:{request_id}"),
        price: cents(rng, 100, 500_000),
        demand,
        max_levels: rng.random_range(level_count..=4),
        max_resources: 4,
        max_suppliers: 4,
    };
    let mut chain = SupplyChain::new(header);

    let scheme = *[SharingScheme::ProfitSharing, SharingScheme::RevenueSharing]
        .choose(rng)
        .expect("non-empty");
    let policy = *CostPolicy::ALL.choose(rng).expect("non-empty");

    let shapes: Vec<Vec<u32>> = (0..level_count)
        .map(|_| {
            let groups = rng.random_range(1..=4);
            distinct_indices(rng, groups, 0)
        })
        .collect();
    let group_count: usize = shapes.iter().map(Vec::len).sum();
    let mut quotas = split_unit(rng, group_count + usize::from(policy == CostPolicy::PlatformMember));
    let platform_quota = (policy == CostPolicy::PlatformMember).then(|| quotas.pop().expect("bucket"));
    let mut quotas = quotas.into_iter();

    if rng.random_bool(0.2) {
        let count = rng.random_range(1..=3);
        let mut supplies: Vec<Supply> =
            distinct_indices(rng, count, 0).into_iter().map(|m| random_supply(rng, m)).collect();
        if rng.random_bool(0.5) {
            let each = Rational::from_integer(demand.into()) / Rational::from_integer((count as i64).into());
            for s in &mut supplies {
                s.quantity = each.clone();
            }
        }
        chain.levels.push(Level {
            index: 0,
            resources: vec![ResourceGroup {
                resource_index: 0,
                resource_name: "root".into(),
                quota: Rational::from_integer(0.into()),
                bom: integer(1),
                supplies,
            }],
        });
    }

    for (i, ks) in shapes.into_iter().enumerate() {
        let index = i as u32 + 1;
        let resources = ks
            .into_iter()
            .map(|k| {
                let count = rng.random_range(1..=4);
                ResourceGroup {
                    resource_index: k,
                    resource_name: format!("K{index}.{k}"),
                    quota: quotas.next().expect("one quota per group"),
                    bom: ratio(rng.random_range(1..=40), 4),
                    supplies: distinct_indices(rng, count, 0)
                        .into_iter()
                        .map(|m| random_supply(rng, m))
                        .collect(),
                }
            })
            .collect();
        chain.levels.push(Level { index, resources });
    }

    if rng.random_bool(0.5) {
        let financial = (0..rng.random_range(0..=2))
            .map(|j| FinancialService {
                service_name: format!("F{j}"),
                uri: format!("https://f{j}.example.com/"),
                provider_id: format!("urn:investor:{j}"),
                invested: cents(rng, 100, 50_000),
                ratio: ratio(rng.random_range(0..=100), 100),
            })
            .collect();
        let it = (0..rng.random_range(0..=2))
            .map(|j| ItService {
                service_name: format!("I{j}"),
                uri: format!("https://i{j}.example.com/"),
                provider_id: format!("urn:it:{j}"),
                access: format!("https://i{j}.example.com/access"),
                cost: cents(rng, 0, 30_000),
            })
            .collect();
        chain.services = ServiceLevel { financial, it };
    }

    let originator_node = (policy == CostPolicy::OriginatorPays).then(|| {
        let nodes: Vec<NodeId> = chain
            .nodes()
            .map(|(id, _, _)| id)
            .filter(|id| id.level > 0)
            .collect();
        *nodes.choose(rng).expect("chain has production nodes")
    });
    chain.options = SharingOptions {
        scheme,
        cost_policy: policy,
        platform_quota,
        originator_node,
        investor_principal_included: rng.random_bool(0.8),
    };
    chain
}

/// The transactions that build `chain` from scratch, ending with seal and
/// (optionally) run.
pub fn build_transactions(chain: &SupplyChain, actor: &str, run: bool) -> Vec<Transaction> {
    let id = chain.header.request_id;
    let mut ts = 0u64;
    let mut tick = || {
        ts += 1;
        ts
    };
    let mut txs = vec![Transaction::create_request(&chain.header, actor, tick())];
    txs.push(Transaction::set_sharing_options(id, &chain.options, actor, tick()));
    for level in &chain.levels {
        for group in &level.resources {
            txs.push(Transaction::add_resource_group(id, level.index, group, actor, tick()));
            for supply in &group.supplies {
                let gid = GroupId::new(level.index, group.resource_index);
                txs.push(Transaction::add_supply(id, gid, supply, actor, tick()));
            }
        }
    }
    for service in &chain.services.financial {
        txs.push(Transaction::add_financial_service(id, service, actor, tick()));
    }
    for service in &chain.services.it {
        txs.push(Transaction::add_it_service(id, service, actor, tick()));
    }
    txs.push(Transaction::seal(id, actor, tick()));
    if run {
        txs.push(Transaction::run(id, actor, tick()));
    }
    txs
}

/// A mix of legal and illegal transactions over a few requests: build
/// sequences interleaved, with steps dropped, repeated or garbled.
pub fn random_transactions(rng: &mut impl Rng, requests: u64) -> Vec<Transaction> {
    let mut queues: Vec<std::collections::VecDeque<Transaction>> = (1..=requests)
        .map(|id| {
            let chain = random_chain(rng, id);
            build_transactions(&chain, &format!("urn:actor:{id}"), true).into()
        })
        .collect();
    let mut out = Vec::new();
    let mut stamp = 1_000u64;
    while queues.iter().any(|q| !q.is_empty()) {
        let live: Vec<usize> = (0..queues.len()).filter(|&i| !queues[i].is_empty()).collect();
        let q = *live.choose(rng).expect("some queue is non-empty");
        let mut tx = queues[q].pop_front().expect("non-empty");
        stamp += rng.random_range(1..=50);
        tx.timestamp = stamp;
        match rng.random_range(0..100) {
            0..=4 => continue,
            5..=7 => out.push(tx.clone()),
            8..=9 => tx.request_id += 100,
            10..=11 => tx.payload = json!({"p": "not a number"}),
            12 => tx.actor_id.clear(),
            13..=14 => tx.kind = *TxKind::ALL.choose(rng).expect("non-empty"),
            _ => {}
        }
        out.push(tx);
    }
    out
}
