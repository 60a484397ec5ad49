//! Brute-force verifiers. Both search uniform grids with the analytic
//! boundary points added, and share no code path with the closed forms
//! beyond the demand and utility primitives.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::best_response::{key_prices, thresholds_unchecked, BestResponse, Strategy};
use crate::equilibrium::{classify_regime, EquilibriumResult, Regime};
use crate::error::{invalid, Result};
use crate::game::{
    seller_demand_unchecked, utilities_unchecked, Action, GameParams, Price, Seller,
};
use crate::welfare;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleConfig {
    /// Grid points over each price axis.
    pub price_points: usize,
    /// Grid points over the operator's inventory at each price.
    pub quantity_points: usize,
    /// Let the operator stay out of the market.
    pub include_abstain: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            price_points: 500,
            quantity_points: 500,
            include_abstain: true,
        }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.price_points < 100 || self.quantity_points < 100 {
            return Err(invalid(format!(
                "oracle grids need at least 100 points, got {} x {}",
                self.price_points, self.quantity_points
            )));
        }
        Ok(())
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(move |i| if i == n - 1 { hi } else { lo + step * i as f64 })
}

/// Independent seller's best response by exhaustion over its price, stocking
/// exactly its demand at each candidate.
pub fn oracle_best_response(
    p_m: Price,
    q_m: f64,
    params: &GameParams,
    cfg: &OracleConfig,
) -> Result<BestResponse> {
    params.validate()?;
    cfg.validate()?;
    let operator = Action::new(p_m, q_m)?;
    Ok(oracle_br_unchecked(&operator, params, cfg))
}

fn oracle_br_unchecked(operator: &Action, params: &GameParams, cfg: &OracleConfig) -> BestResponse {
    let theta = params.theta;
    let kp = key_prices(params);
    let tol = params.tol();
    let mut extras = vec![kp.p0];
    extras.extend(kp.p_star_i.value());
    extras.extend(operator.price.value());
    let candidates = linspace(0.0, theta, cfg.price_points)
        .chain(extras.into_iter().filter(|p| (0.0..=theta).contains(p)));

    let margin = 1.0 - params.alpha;
    let mut best: Option<(f64, f64, f64)> = None;
    for p in candidates {
        let probe = Action {
            price: Price::At(p),
            quantity: 0.0,
        };
        let d = seller_demand_unchecked(Seller::Independent, &probe, operator, params);
        if d <= 0.0 {
            continue;
        }
        let u = (margin * p - params.c_i) * d;
        if best.is_none_or(|(_, _, bu)| u > bu) {
            best = Some((p, d, u));
        }
    }

    match best {
        Some((p, d, u)) if u >= -tol => {
            let first = match operator.price {
                Price::Abstain => true,
                Price::At(p_m) => p <= p_m,
            };
            BestResponse {
                strategy: if first {
                    Strategy::Compete
                } else {
                    Strategy::Wait
                },
                action: Action {
                    price: Price::At(p),
                    quantity: d,
                },
                utility: u,
                demonopolized: kp.p_star_i.value().is_some_and(|s| p < s),
            }
        }
        _ => BestResponse {
            strategy: Strategy::Abstain,
            action: Action::abstain(),
            utility: 0.0,
            demonopolized: false,
        },
    }
}

/// Equilibrium by exhaustion over the operator's `(p_M, q_M)` with the
/// independent seller answered by [`oracle_best_response`].
pub fn oracle_equilibrium(params: &GameParams, cfg: &OracleConfig) -> Result<EquilibriumResult> {
    params.validate()?;
    cfg.validate()?;
    let theta = params.theta;
    let kp = key_prices(params);

    let mut prices: Vec<f64> = linspace(0.0, theta, cfg.price_points).collect();
    prices.extend(
        [Some(kp.p0), kp.p_star_i.value(), kp.p_star_m.value()]
            .into_iter()
            .flatten()
            .filter(|p| (0.0..=theta).contains(p)),
    );

    let row_best = |p_m: f64| -> (Action, f64) {
        let q_max = params.q(p_m);
        let mut qs: Vec<f64> = linspace(0.0, q_max, cfg.quantity_points).collect();
        if let Some(p_star) = kp.p_star_i.value() {
            let th = thresholds_unchecked(p_m, 0.0, params, kp.p0, p_star);
            qs.extend(
                [th.q_dagger, Some(th.q_ddagger)]
                    .into_iter()
                    .flatten()
                    .filter(|q| (0.0..=q_max).contains(q)),
            );
        }
        let mut best = (Action::abstain(), f64::NEG_INFINITY);
        for q in qs {
            let operator = Action {
                price: Price::At(p_m),
                quantity: q,
            };
            let br = oracle_br_unchecked(&operator, params, cfg);
            let u = utilities_unchecked(&operator, &br.action, params).u_m;
            if u > best.1 {
                best = (operator, u);
            }
        }
        best
    };

    let rows: Vec<(Action, f64)> = prices.par_iter().map(|&p| row_best(p)).collect();
    let mut best = (Action::abstain(), f64::NEG_INFINITY);
    if cfg.include_abstain {
        let br = oracle_br_unchecked(&Action::abstain(), params, cfg);
        best.1 = utilities_unchecked(&Action::abstain(), &br.action, params).u_m;
    }
    for (a, u) in rows {
        if u > best.1 {
            best = (a, u);
        }
    }

    let action_m = best.0;
    let response_i = oracle_br_unchecked(&action_m, params, cfg);
    let report = utilities_unchecked(&action_m, &response_i.action, params);
    let cs = welfare::consumer_surplus(&action_m, &response_i.action, params).ok();
    let mut result = EquilibriumResult {
        action_m,
        response_i,
        regime: Regime::MoAbstains,
        u_m: report.u_m,
        u_i: report.u_i,
        cs,
        welfare: cs.map(|cs| cs + report.u_m + report.u_i),
    };
    result.regime = classify_regime(&result);
    Ok(result)
}

/// Lipschitz bound on how far a grid optimum can fall short of the
/// continuum optimum.
///
/// On `[0, θ]²` the independent seller's utility moves by at most
/// `2(1 − α)θ + c_I` per unit of its price. The operator's moves by at most
/// `2θ + 2k + c_M + 2αθ` per unit of its price and `θ + k + c_M + 2(αθ + k)`
/// per unit of its inventory. Steps are `θ / points` on each axis.
pub fn discretization_bound(params: &GameParams, cfg: &OracleConfig) -> f64 {
    let GameParams {
        theta,
        alpha,
        k,
        c_m,
        c_i,
        ..
    } = *params;
    let h_p = theta / cfg.price_points as f64;
    let h_q = theta / cfg.quantity_points as f64;
    let l_i = 2.0 * (1.0 - alpha) * theta + c_i;
    let l_mp = 2.0 * theta + 2.0 * k + c_m + 2.0 * alpha * theta;
    let l_mq = theta + k + c_m + 2.0 * (alpha * theta + k);
    (l_i + l_mp) * h_p + l_mq * h_q
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig2() -> GameParams {
        GameParams::new(10.0, 0.2, 2.0, 3.0, 2.0).unwrap()
    }

    #[test]
    fn best_response_examples() {
        let cfg = OracleConfig::default();
        let p = fig2();
        let bound = discretization_bound(&p, &cfg);
        let br = oracle_best_response(Price::At(7.0), 5.0, &p, &cfg).unwrap();
        assert!((br.utility - 11.25).abs() <= bound);
        assert_eq!(br.strategy, Strategy::Compete);

        let br = oracle_best_response(Price::At(4.0), 1.0, &p, &cfg).unwrap();
        assert_eq!(br.strategy, Strategy::Wait);
        assert!((br.action.price.value().unwrap() - 5.75).abs() < 0.03);

        let trivial = GameParams::new(10.0, 0.2, 2.0, 2.0, 9.0).unwrap();
        let br = oracle_best_response(Price::At(4.0), 1.0, &trivial, &cfg).unwrap();
        assert_eq!(br.strategy, Strategy::Abstain);
    }

    #[test]
    fn bound_scaling() {
        let p = fig2();
        let a = OracleConfig {
            price_points: 1000,
            quantity_points: 1000,
            include_abstain: true,
        };
        let b = OracleConfig {
            price_points: 2000,
            ..a
        };
        let c = OracleConfig {
            quantity_points: 2000,
            ..b
        };
        let (ba, bb, bc) = (
            discretization_bound(&p, &a),
            discretization_bound(&p, &b),
            discretization_bound(&p, &c),
        );
        assert!(ba > 0.0 && ba.is_finite());
        // Halving the price step halves the price share of the bound.
        let q_share = ba - 2.0 * (ba - bb);
        assert!((bc - (ba - bb) - q_share / 2.0).abs() < 1e-12);
        let huge = OracleConfig {
            price_points: 1 << 40,
            quantity_points: 1 << 40,
            include_abstain: true,
        };
        assert!(discretization_bound(&p, &huge) < 1e-9);
    }

    #[test]
    fn rejects_small_grids() {
        let cfg = OracleConfig {
            price_points: 50,
            ..OracleConfig::default()
        };
        assert!(oracle_best_response(Price::At(4.0), 1.0, &fig2(), &cfg).is_err());
    }
}
