//! Consumer surplus and total welfare under intensity rationing with perfect
//! substitutes.

use serde::{Deserialize, Serialize};

use crate::best_response::{best_response_unchecked, key_prices};
use crate::equilibrium::EquilibriumResult;
use crate::error::{unsupported, Result};
use crate::game::{utilities_unchecked, Action, GameParams, Price, RationingRule};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WelfareReport {
    pub cs: f64,
    pub u_m: f64,
    pub u_i: f64,
    /// `cs + u_m + u_i`.
    pub welfare: f64,
    /// Consumer surplus with the independent seller alone at its sole-seller price.
    pub cs_baseline: f64,
    pub u_i_baseline: f64,
    /// Total welfare of the sole-seller benchmark, counting the operator's
    /// referral and experience income.
    pub welfare_baseline: f64,
}

fn require_supported(params: &GameParams) -> Result<()> {
    if params.rationing != RationingRule::Intensity {
        return Err(unsupported(
            "consumer surplus is only defined under intensity rationing",
        ));
    }
    if params.gamma != 1.0 {
        return Err(unsupported(
            "consumer surplus is only defined for perfect substitutes (gamma = 1)",
        ));
    }
    Ok(())
}

/// `∫ (θ − t − p) dt` over `[from, to]`.
#[inline]
fn strip(theta: f64, p: f64, from: f64, to: f64) -> f64 {
    (theta - p) * (to - from) - 0.5 * (to * to - from * from)
}

/// Consumer surplus when both sellers play the given actions.
///
/// Buyers with the highest valuations take the cheaper seller's units first;
/// the dearer seller's units go to the next buyers in line. Only units
/// actually sold count.
pub fn consumer_surplus(action_m: &Action, action_i: &Action, params: &GameParams) -> Result<f64> {
    params.validate()?;
    require_supported(params)?;
    action_m.validate()?;
    action_i.validate()?;
    let sold = utilities_unchecked(action_m, action_i, params);
    let legs = [
        (action_m.price, sold.units_sold_m, 1u8),
        (action_i.price, sold.units_sold_i, 0u8),
    ];
    let mut legs: Vec<(f64, f64, u8)> = legs
        .into_iter()
        .filter_map(|(p, s, order)| match p {
            Price::At(p) if s > 0.0 => Some((p, s, order)),
            _ => None,
        })
        .collect();
    // Cheaper first; the independent seller is served first on ties.
    legs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.2.cmp(&b.2)));
    let theta = params.theta;
    let mut served = 0.0;
    let mut cs = 0.0;
    for (p, s, _) in legs {
        cs += strip(theta, p, served, served + s);
        served += s;
    }
    Ok(cs.max(0.0))
}

/// Consumer surplus, utilities and welfare at an equilibrium, with the
/// sole-seller benchmark alongside.
pub fn welfare_report(eq: &EquilibriumResult, params: &GameParams) -> Result<WelfareReport> {
    let cs = consumer_surplus(&eq.action_m, &eq.response_i.action, params)?;
    let (cs_baseline, u_i_baseline, welfare_baseline) = baseline(params);
    Ok(WelfareReport {
        cs,
        u_m: eq.u_m,
        u_i: eq.u_i,
        welfare: cs + eq.u_m + eq.u_i,
        cs_baseline,
        u_i_baseline,
        welfare_baseline,
    })
}

/// `(CS*, u*_I, W*)` with the independent seller alone at `p*_I`.
fn baseline(params: &GameParams) -> (f64, f64, f64) {
    let kp = key_prices(params);
    let incumbent = match kp.p_star_i {
        Price::At(p) => Action {
            price: Price::At(p),
            quantity: params.q(p),
        },
        Price::Abstain => return (0.0, 0.0, 0.0),
    };
    let u = utilities_unchecked(&Action::abstain(), &incumbent, params);
    let p = incumbent.price.value().unwrap_or(params.theta);
    let cs = 0.5 * (params.theta - p).powi(2);
    (cs, u.u_i, cs + u.u_i + u.u_m)
}

/// Change in the independent seller's utility and in consumer surplus caused
/// by the operator playing `(p_m, q_m)`, against the sole-seller benchmark.
///
/// Returns `(delta_ps, delta_cs, holds)` where `holds` is
/// `−delta_ps ≤ delta_cs` up to `1e-9`.
pub fn surplus_transfer_check(p_m: f64, q_m: f64, params: &GameParams) -> Result<(f64, f64, bool)> {
    params.validate()?;
    require_supported(params)?;
    let operator = Action::at(p_m, q_m)?;
    let br = best_response_unchecked(&operator, params, &key_prices(params));
    let cs = consumer_surplus(&operator, &br.action, params)?;
    let (cs_baseline, u_i_baseline, _) = baseline(params);
    let delta_ps = br.utility - u_i_baseline;
    let delta_cs = cs - cs_baseline;
    Ok((delta_ps, delta_cs, -delta_ps <= delta_cs + 1e-9))
}
