//! Small hand-checkable instances used by tests, docs and the CLI examples.

use super::instance::{BidLevel, Business, Campaign, Instance};

fn level(j: usize, ret: f64, ad_value: f64, impressions: f64, bid: Option<f64>) -> BidLevel {
    BidLevel { level_index: j, ret, ad_value, impressions, bid }
}

/// One business (B = 100, CPC = 2), one campaign (CTR = 0.4) with three
/// levels, impression budget 1000.
///
/// LP optimum 900/11 at (0, 6/11, 5/11); best single-level choice is level 1
/// with return 50 because level 2 spends 160 > 100.
pub fn t1() -> Instance {
    Instance {
        businesses: vec![Business { id: "k1".into(), budget: 100.0, cpc: 2.0, campaign_ids: vec!["c1".into()] }],
        campaigns: vec![Campaign {
            id: "c1".into(),
            business_id: "k1".into(),
            ctr: 0.4,
            levels: vec![
                BidLevel::slack(),
                level(1, 50.0, 0.5, 100.0, Some(0.40)),
                level(2, 120.0, 0.8, 200.0, Some(0.70)),
            ],
        }],
        impression_budget: 1000.0,
    }
}

/// Two businesses with one three-level campaign each and a loose impression
/// budget, so the model splits into independent halves.
pub fn two_business() -> Instance {
    Instance {
        businesses: vec![
            Business { id: "k1".into(), budget: 100.0, cpc: 2.0, campaign_ids: vec!["c1".into()] },
            Business { id: "k2".into(), budget: 45.0, cpc: 1.5, campaign_ids: vec!["c2".into()] },
        ],
        campaigns: vec![
            Campaign {
                id: "c1".into(),
                business_id: "k1".into(),
                ctr: 0.4,
                levels: vec![
                    BidLevel::slack(),
                    level(1, 50.0, 0.5, 100.0, Some(0.40)),
                    level(2, 120.0, 0.8, 200.0, Some(0.70)),
                ],
            },
            Campaign {
                id: "c2".into(),
                business_id: "k2".into(),
                ctr: 0.5,
                levels: vec![
                    BidLevel::slack(),
                    level(1, 30.0, 0.3, 80.0, Some(0.25)),
                    level(2, 70.0, 0.6, 120.0, Some(0.55)),
                ],
            },
        ],
        impression_budget: 10_000.0,
    }
}

/// A single campaign whose LP optimum mixes levels 1 and 2 with the slack at
/// zero, while neither level is feasible alone: level 1 overspends the budget
/// and level 2 breaks the cost-per-click row. Fixing the leading zeros away
/// (strategy 2) leaves no valid single-level choice.
///
/// LP optimum 580/7 at (0, 4/7, 3/7); the only SOS1-feasible choice is the
/// slack.
pub fn fixing_trap() -> Instance {
    Instance {
        businesses: vec![Business { id: "k1".into(), budget: 120.0, cpc: 2.5, campaign_ids: vec!["c1".into()] }],
        campaigns: vec![Campaign {
            id: "c1".into(),
            business_id: "k1".into(),
            ctr: 1.0,
            levels: vec![
                BidLevel::slack(),
                level(1, 100.0, 1.5, 100.0, Some(1.0)),
                level(2, 60.0, 4.0, 20.0, Some(2.0)),
            ],
        }],
        impression_budget: 1_000.0,
    }
}
