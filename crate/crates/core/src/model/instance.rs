//! Bid-level instance data: businesses, their campaigns, and the candidate
//! bid levels of each campaign.
//!
//! All money and impression quantities are plain `f64`. Budgets (`B_k`) and
//! spend (`impressions * ad_value`) are assumed to be in the same currency
//! unit; nothing here converts between units.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

/// One candidate bid level of a campaign.
///
/// Level 0 is the "do nothing" slack and must carry zero return, ad value and
/// impressions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BidLevel {
    pub level_index: usize,
    /// Expected gross return when bidding at this level.
    #[serde(rename = "return")]
    pub ret: f64,
    /// Expected budget decrement per impression.
    pub ad_value: f64,
    /// Expected number of impressions.
    pub impressions: f64,
    /// The bid itself. Not used by the optimization; carried through so the
    /// chosen (or interpolated) bid can be reported.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bid: Option<f64>,
}

impl BidLevel {
    pub fn slack() -> Self {
        BidLevel { level_index: 0, ret: 0.0, ad_value: 0.0, impressions: 0.0, bid: None }
    }

    /// Budget consumed if this level is chosen.
    pub fn spend(&self) -> f64 {
        self.impressions * self.ad_value
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Campaign {
    pub id: String,
    pub business_id: String,
    /// Expected click-through rate for this campaign's business.
    pub ctr: f64,
    pub levels: Vec<BidLevel>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Business {
    pub id: String,
    pub budget: f64,
    /// Given cost per click the business is willing to pay on average.
    pub cpc: f64,
    pub campaign_ids: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub businesses: Vec<Business>,
    pub campaigns: Vec<Campaign>,
    /// Overall impression budget shared by every business.
    pub impression_budget: f64,
}

/// A broken invariant, naming the offending entity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub entity: String,
    pub rule: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.entity, self.rule)
    }
}

impl Instance {
    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        // Serialization of plain data cannot fail.
        serde_json::to_string_pretty(self).expect("instance serializes")
    }

    pub fn campaign(&self, id: &str) -> Option<&Campaign> {
        self.campaigns.iter().find(|c| c.id == id)
    }

    pub fn business(&self, id: &str) -> Option<&Business> {
        self.businesses.iter().find(|b| b.id == id)
    }

    /// Campaigns grouped per business, in business order; each group keeps the
    /// campaigns' order of appearance in `campaigns`.
    pub fn campaigns_by_business(&self) -> Vec<(&Business, Vec<&Campaign>)> {
        self.businesses
            .iter()
            .map(|b| (b, self.campaigns.iter().filter(|c| c.business_id == b.id).collect()))
            .collect()
    }

    /// Number of one-level-per-campaign assignments.
    pub fn assignment_count(&self) -> f64 {
        self.campaigns.iter().map(|c| c.levels.len() as f64).product()
    }
}

fn finite_nonneg(v: f64) -> bool {
    v.is_finite() && v >= 0.0
}

/// Checks every structural invariant of `instance` and returns one entry per
/// broken rule. An empty list means the instance is well formed.
pub fn validate_instance(instance: &Instance) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |entity: String, rule: &str| out.push(Violation { entity, rule: rule.to_string() });

    if !finite_nonneg(instance.impression_budget) {
        push("instance".into(), "impression budget must be nonnegative (V >= 0)");
    }

    let mut business_ids = BTreeSet::new();
    for b in &instance.businesses {
        let entity = format!("business {}", b.id);
        if !business_ids.insert(b.id.as_str()) {
            push(entity.clone(), "duplicate business id");
        }
        if !finite_nonneg(b.budget) {
            push(entity.clone(), "budget must be nonnegative (B_k >= 0)");
        }
        if !finite_nonneg(b.cpc) {
            push(entity.clone(), "cost per click must be nonnegative (CPC_k >= 0)");
        }
    }

    let mut owner: BTreeMap<&str, &str> = BTreeMap::new();
    for c in &instance.campaigns {
        let entity = format!("campaign {}", c.id);
        if owner.insert(c.id.as_str(), c.business_id.as_str()).is_some() {
            push(entity.clone(), "duplicate campaign id");
        }
        if !business_ids.contains(c.business_id.as_str()) {
            push(entity.clone(), "references an unknown business");
        }
        if !(c.ctr.is_finite() && (0.0..=1.0).contains(&c.ctr)) {
            push(entity.clone(), "click-through rate must lie in [0, 1]");
        }
        if c.levels.is_empty() {
            push(entity.clone(), "must have at least the slack level");
            continue;
        }
        if c.levels.iter().enumerate().any(|(j, l)| l.level_index != j) {
            push(entity.clone(), "level indices must be consecutive from 0");
        }
        let slack = &c.levels[0];
        if slack.ret != 0.0 || slack.ad_value != 0.0 || slack.impressions != 0.0 {
            push(entity.clone(), "slack level must be all-zero");
        }
        for l in &c.levels {
            if !(finite_nonneg(l.ret) && finite_nonneg(l.ad_value) && finite_nonneg(l.impressions)) {
                push(
                    format!("campaign {} level {}", c.id, l.level_index),
                    "return, ad value and impressions must be nonnegative",
                );
            }
            if matches!(l.bid, Some(b) if !b.is_finite()) {
                push(format!("campaign {} level {}", c.id, l.level_index), "bid must be finite");
            }
        }
    }

    // campaign_ids must list exactly the campaigns that name the business as owner
    let mut listed = BTreeSet::new();
    for b in &instance.businesses {
        for id in &b.campaign_ids {
            let entity = format!("business {}", b.id);
            if !listed.insert(id.as_str()) {
                push(entity, &format!("campaign {id} is listed more than once"));
                continue;
            }
            match owner.get(id.as_str()) {
                None => push(entity, &format!("lists unknown campaign {id}")),
                Some(&k) if k != b.id => push(entity, &format!("lists campaign {id} owned by business {k}")),
                _ => {}
            }
        }
    }
    for c in &instance.campaigns {
        if !listed.contains(c.id.as_str()) && business_ids.contains(c.business_id.as_str()) {
            push(format!("campaign {}", c.id), "missing from its business's campaign list");
        }
    }

    out
}

/// Splits the instance into one sub-instance per business. Each keeps the full
/// impression budget, so the pieces are only independent when the shared
/// impression row is slack.
pub fn decompose_by_business(instance: &Instance) -> Vec<Instance> {
    instance
        .businesses
        .iter()
        .map(|b| Instance {
            businesses: vec![b.clone()],
            campaigns: instance.campaigns.iter().filter(|c| c.business_id == b.id).cloned().collect(),
            impression_budget: instance.impression_budget,
        })
        .collect()
}
