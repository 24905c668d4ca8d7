//! Translation of an [`Instance`] into the bid-level LP with one SOS per
//! campaign.
//!
//! Naming is fixed so that MPS output is deterministic:
//!
//! | item                          | name         |
//! |-------------------------------|--------------|
//! | level `j` of campaign `i`     | `D_<i>_<j>`  |
//! | one-level-per-campaign row    | `CVX_<i>`    |
//! | business budget row           | `BUD_<k>`    |
//! | business cost-per-click row   | `CLK_<k>`    |
//! | shared impression budget row  | `IMP`        |
//! | campaign level set            | `S_<i>`      |
//!
//! Rows appear as all `CVX` rows in campaign order, then `BUD_k`, `CLK_k` for
//! each business in order, then `IMP`.

use super::instance::{validate_instance, Instance, Violation};
use super::lp::{LpModel, ModelError, ObjectiveSense, RowSense, SosType};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BuildError {
    #[error("instance has {} violation(s); first: {}", .0.len(), .0[0])]
    Invalid(Vec<Violation>),
    #[error(transparent)]
    Model(#[from] ModelError),
}

pub fn column_name(campaign: &str, level: usize) -> String {
    format!("D_{campaign}_{level}")
}

/// Builds the maximization model:
///
/// * `CVX_i`: sum_j d_ij = 1
/// * `BUD_k`: sum P_ij AV_ij d_ij <= B_k
/// * `CLK_k`: sum P_ij (AV_ij - CPC_k CTR_ik) d_ij <= 0
/// * `IMP`:   sum P_ij d_ij <= V
///
/// with objective sum L_ij d_ij, every d in [0, 1] and one SOS1 set per
/// campaign weighted by level index.
pub fn build_model<T: Scalar>(instance: &Instance) -> Result<LpModel<T>, BuildError> {
    let violations = validate_instance(instance);
    if !violations.is_empty() {
        return Err(BuildError::Invalid(violations));
    }

    let mut model = LpModel::new("BIDOPT", ObjectiveSense::Maximize);
    // first column of each campaign, by position in instance.campaigns
    let mut first_col = Vec::with_capacity(instance.campaigns.len());
    for c in &instance.campaigns {
        first_col.push(model.num_columns());
        for l in &c.levels {
            model.add_column(column_name(&c.id, l.level_index), T::of(l.ret), T::zero(), T::one())?;
        }
    }

    let first_col = &first_col;
    for (i, c) in instance.campaigns.iter().enumerate() {
        let start = first_col[i];
        model.add_row(format!("CVX_{}", c.id), RowSense::Eq, T::one(), (0..c.levels.len()).map(|j| (start + j, T::one())));
    }

    for b in &instance.businesses {
        let owned: Vec<usize> = instance
            .campaigns
            .iter()
            .enumerate()
            .filter(|(_, c)| c.business_id == b.id)
            .map(|(i, _)| i)
            .collect();
        let budget = owned.iter().flat_map(|&i| {
            let c = &instance.campaigns[i];
            c.levels.iter().map(move |l| (first_col[i] + l.level_index, T::of(l.impressions * l.ad_value)))
        });
        model.add_row(format!("BUD_{}", b.id), RowSense::Le, T::of(b.budget), budget);

        let clicks = owned.iter().flat_map(|&i| {
            let c = &instance.campaigns[i];
            let click_value = b.cpc * c.ctr;
            c.levels
                .iter()
                .map(move |l| (first_col[i] + l.level_index, T::of(l.impressions * (l.ad_value - click_value))))
        });
        model.add_row(format!("CLK_{}", b.id), RowSense::Le, T::zero(), clicks);
    }

    let impressions = instance
        .campaigns
        .iter()
        .enumerate()
        .flat_map(|(i, c)| c.levels.iter().map(move |l| (first_col[i] + l.level_index, T::of(l.impressions))));
    model.add_row("IMP", RowSense::Le, T::of(instance.impression_budget), impressions);

    for (i, c) in instance.campaigns.iter().enumerate() {
        let members: Vec<usize> = (0..c.levels.len()).map(|j| first_col[i] + j).collect();
        let weights = (0..c.levels.len()).map(|j| T::of(j as f64)).collect();
        model.add_sos(format!("S_{}", c.id), SosType::Sos1, members, weights);
    }

    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::toy;

    #[test]
    fn t1_expansion() {
        let m: LpModel<f64> = build_model(&toy::t1()).unwrap();
        let names: Vec<_> = m.columns.iter().map(|c| c.name.as_str()).collect();
        assert_eq!(names, ["D_c1_0", "D_c1_1", "D_c1_2"]);
        let obj: Vec<_> = m.columns.iter().map(|c| c.objective).collect();
        assert_eq!(obj, [0.0, 50.0, 120.0]);
        assert!(m.columns.iter().all(|c| c.lower == 0.0 && c.upper == 1.0));

        let rows: Vec<_> = m.rows.iter().map(|r| r.name.as_str()).collect();
        assert_eq!(rows, ["CVX_c1", "BUD_k1", "CLK_k1", "IMP"]);
        // hand expansion: spend = P*AV, clicks = P*(AV - 2*0.4), impressions = P
        assert_eq!(m.dense_row(0), [1.0, 1.0, 1.0]);
        assert_eq!((m.rows[0].sense, m.rows[0].rhs), (RowSense::Eq, 1.0));
        assert_eq!(m.dense_row(1), [0.0, 50.0, 160.0]);
        assert_eq!(m.rows[1].rhs, 100.0);
        let clk = m.dense_row(2);
        assert!(clk[0] == 0.0 && (clk[1] + 30.0).abs() < 1e-12 && clk[2] == 0.0);
        assert_eq!(m.rows[2].rhs, 0.0);
        assert_eq!(m.dense_row(3), [0.0, 100.0, 200.0]);
        assert_eq!(m.rows[3].rhs, 1000.0);

        assert_eq!(m.sos_sets.len(), 1);
        let s = &m.sos_sets[0];
        assert_eq!((s.name.as_str(), s.sos_type), ("S_c1", SosType::Sos1));
        assert_eq!(s.members, [0, 1, 2]);
        assert_eq!(s.weights, [0.0, 1.0, 2.0]);
        m.check().unwrap();
    }

    #[test]
    fn rows_per_business_and_shared_impressions() {
        let inst = toy::two_business();
        let m: LpModel<f64> = build_model(&inst).unwrap();
        let rows: Vec<_> = m.rows.iter().map(|r| r.name.as_str()).collect();
        assert_eq!(rows, ["CVX_c1", "CVX_c2", "BUD_k1", "CLK_k1", "BUD_k2", "CLK_k2", "IMP"]);
        assert_eq!(m.num_rows(), inst.campaigns.len() + 2 * inst.businesses.len() + 1);
        assert_eq!(m.num_columns(), 6);
        // BUD_k2 touches only campaign c2's columns
        assert!(m.rows[4].coefficients.iter().all(|&(j, _)| j >= 3));
    }

    #[test]
    fn slack_only_campaign() {
        let mut inst = toy::t1();
        inst.campaigns[0].levels.truncate(1);
        let m: LpModel<f64> = build_model(&inst).unwrap();
        assert_eq!(m.num_columns(), 1);
        assert_eq!(m.rows[0].coefficients, vec![(0, 1.0)]);
        for r in &m.rows[1..] {
            assert!(r.coefficients.is_empty());
        }
    }

    #[test]
    fn invalid_instance_rejected() {
        let mut inst = toy::t1();
        inst.businesses[0].budget = -1.0;
        assert!(matches!(build_model::<f64>(&inst), Err(BuildError::Invalid(v)) if v.len() == 1));
    }

    #[test]
    fn f32_model_matches() {
        let m64: LpModel<f64> = build_model(&toy::t1()).unwrap();
        let m32: LpModel<f32> = build_model(&toy::t1()).unwrap();
        assert_eq!(m64.cast::<f32>(), m32);
    }
}
