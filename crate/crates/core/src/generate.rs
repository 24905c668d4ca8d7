//! Synthetic staircase instances.
//!
//! Generator policy (the only place these distributions are defined):
//!
//! * ad value: log-uniform base in [0.05, 0.5], then strictly increasing
//!   steps whose relative sizes follow the curve shape;
//! * impressions: log-uniform base in [100, 10000], geometric growth with a
//!   per-campaign ratio in [1.05, 1.6], rounded to whole impressions;
//! * return: impressions x CTR x value-per-click (uniform in [1, 5]) x noise
//!   in [0.9, 1.1], forced strictly increasing;
//! * CTR uniform in (0.01, 0.2];
//! * CPC set so each business's click row holds with a 10% margin when every
//!   campaign bids its top level;
//! * B_k and V are the requested tightness times the spend / impressions of
//!   the top levels. Tightness 2.0 or more leaves every budget slack.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::model::{BidLevel, Business, Campaign, Instance};

/// Budget tightness at or above which the per-campaign top levels fit.
pub const SLACK_TIGHTNESS: f64 = 2.0;

const CPC_MARGIN: f64 = 1.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveShape {
    /// Even steps.
    Uniform,
    /// Large steps first, flattening out.
    FrontLoaded,
    /// Flat first, with the big jump near the top.
    BackLoaded,
}

impl FromStr for CurveShape {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, GenError> {
        match s {
            "uniform" => Ok(CurveShape::Uniform),
            "front-loaded" | "front" => Ok(CurveShape::FrontLoaded),
            "back-loaded" | "back" => Ok(CurveShape::BackLoaded),
            _ => Err(GenError::Parse(format!("unknown curve shape '{s}'"))),
        }
    }
}

impl fmt::Display for CurveShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CurveShape::Uniform => "uniform",
            CurveShape::FrontLoaded => "front-loaded",
            CurveShape::BackLoaded => "back-loaded",
        })
    }
}

/// Inclusive count range; `"4"` and `"2-5"` both parse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountRange {
    pub min: usize,
    pub max: usize,
}

impl CountRange {
    pub fn exactly(n: usize) -> Self {
        CountRange { min: n, max: n }
    }

    pub fn between(min: usize, max: usize) -> Self {
        CountRange { min, max }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> usize {
        rng.gen_range(self.min..=self.max)
    }
}

impl FromStr for CountRange {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, GenError> {
        let parse = |t: &str| t.trim().parse::<usize>().map_err(|_| GenError::Parse(format!("bad count '{s}'")));
        match s.split_once('-') {
            Some((a, b)) => Ok(CountRange::between(parse(a)?, parse(b)?)),
            None => Ok(CountRange::exactly(parse(s)?)),
        }
    }
}

impl fmt::Display for CountRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.min == self.max {
            write!(f, "{}", self.min)
        } else {
            write!(f, "{}-{}", self.min, self.max)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenParams {
    pub businesses: usize,
    pub campaigns_per_business: CountRange,
    /// Levels per campaign including the do-nothing level 0.
    pub levels_per_campaign: CountRange,
    pub budget_tightness: f64,
    pub impression_tightness: f64,
    pub curve_shape: CurveShape,
    pub seed: u64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            businesses: 1,
            campaigns_per_business: CountRange::exactly(5),
            levels_per_campaign: CountRange::exactly(4),
            budget_tightness: 0.7,
            impression_tightness: SLACK_TIGHTNESS,
            curve_shape: CurveShape::Uniform,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GenError {
    #[error("{0} must be at least 1")]
    ZeroCount(&'static str),
    #[error("{0} range is empty ({1})")]
    EmptyRange(&'static str, CountRange),
    #[error("{0} must be positive and finite, got {1}")]
    BadTightness(&'static str, f64),
    #[error("{0}")]
    Parse(String),
}

impl GenParams {
    pub fn validate(&self) -> Result<(), GenError> {
        if self.businesses == 0 {
            return Err(GenError::ZeroCount("businesses"));
        }
        for (name, r) in [("campaigns_per_business", self.campaigns_per_business), ("levels_per_campaign", self.levels_per_campaign)] {
            if r.min == 0 {
                return Err(GenError::ZeroCount(name));
            }
            if r.min > r.max {
                return Err(GenError::EmptyRange(name, r));
            }
        }
        for (name, t) in [("budget_tightness", self.budget_tightness), ("impression_tightness", self.impression_tightness)] {
            if !(t.is_finite() && t > 0.0) {
                return Err(GenError::BadTightness(name, t));
            }
        }
        Ok(())
    }
}

pub fn generate_instance(params: &GenParams) -> Result<Instance, GenError> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let counts: Vec<usize> = (0..params.businesses).map(|_| params.campaigns_per_business.sample(&mut rng)).collect();
    Ok(build(params, &counts, &mut rng))
}

/// One instance per requested SOS count, with exactly that many campaigns
/// spread as evenly as possible over `base.businesses` (fewer businesses when
/// the count is smaller). Instance `i` uses seed `base.seed + i`.
pub fn scale_suite(base: &GenParams, sos_counts: &[usize]) -> Result<Vec<Instance>, GenError> {
    base.validate()?;
    sos_counts
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            if n == 0 {
                return Err(GenError::ZeroCount("sos count"));
            }
            let k = base.businesses.min(n);
            let counts: Vec<usize> = (0..k).map(|b| n / k + usize::from(b < n % k)).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(base.seed.wrapping_add(i as u64));
            Ok(build(base, &counts, &mut rng))
        })
        .collect()
}

fn round_to(x: f64, decimals: i32) -> f64 {
    let f = 10f64.powi(decimals);
    (x * f).round() / f
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

fn step_weights(shape: CurveShape, steps: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..steps)
        .map(|t| {
            let base = match shape {
                CurveShape::Uniform => 1.0,
                CurveShape::FrontLoaded => 0.5f64.powi(t as i32),
                CurveShape::BackLoaded => 2f64.powi(t as i32),
            };
            // noise smaller than the factor-of-two spacing, so shapes survive
            base * rng.gen_range(0.9..1.1)
        })
        .collect()
}

fn campaign_levels(shape: CurveShape, count: usize, ctr: f64, rng: &mut ChaCha8Rng) -> Vec<BidLevel> {
    let mut levels = vec![BidLevel::slack()];
    let n = count - 1;
    if n == 0 {
        return levels;
    }
    let av0 = log_uniform(rng, 0.05, 0.5);
    let span = av0 * rng.gen_range(0.5..2.0);
    let weights = step_weights(shape, n - 1, rng);
    let total: f64 = weights.iter().sum::<f64>().max(1.0);
    let p0 = log_uniform(rng, 100.0, 10_000.0);
    let growth: f64 = rng.gen_range(1.05..1.6);
    let value_per_click: f64 = rng.gen_range(1.0..5.0);
    let bid_ratio = rng.gen_range(0.8..1.0);

    let (mut av, mut prev_av, mut prev_ret) = (av0, 0.0f64, 0.0f64);
    for j in 1..=n {
        if j > 1 {
            av += span * weights[j - 2] / total;
        }
        let ad_value = round_to(av, 4).max(prev_av + 1e-4);
        let impressions = (p0 * growth.powi(j as i32 - 1)).round().max(1.0);
        let raw = impressions * ctr * value_per_click * rng.gen_range(0.9..1.1);
        let ret = round_to(raw.max(prev_ret * 1.01), 2).max(prev_ret + 0.01);
        levels.push(BidLevel { level_index: j, ret, ad_value, impressions, bid: Some(round_to(ad_value * bid_ratio, 4)) });
        prev_av = ad_value;
        prev_ret = ret;
    }
    levels
}

fn build(params: &GenParams, counts: &[usize], rng: &mut ChaCha8Rng) -> Instance {
    let mut businesses = Vec::with_capacity(counts.len());
    let mut campaigns = Vec::new();
    let mut top_impressions = 0.0;
    for (b, &count) in counts.iter().enumerate() {
        let id = format!("k{}", b + 1);
        let (mut spend, mut click_base) = (0.0, 0.0);
        let mut ids = Vec::with_capacity(count);
        for _ in 0..count {
            let cid = format!("c{}", campaigns.len() + 1);
            let ctr = round_to(rng.gen_range(0.01..=0.2), 4);
            let levels = campaign_levels(params.curve_shape, params.levels_per_campaign.sample(rng), ctr, rng);
            let top = levels.last().unwrap();
            spend += top.spend();
            click_base += top.impressions * ctr;
            top_impressions += top.impressions;
            ids.push(cid.clone());
            campaigns.push(Campaign { id: cid, business_id: id.clone(), ctr, levels });
        }
        let cpc = if click_base > 0.0 { round_to(CPC_MARGIN * spend / click_base, 4) } else { 1.0 };
        businesses.push(Business { id, budget: round_to(params.budget_tightness * spend, 2), cpc, campaign_ids: ids });
    }
    Instance { businesses, campaigns, impression_budget: (params.impression_tightness * top_impressions).round() }
}
