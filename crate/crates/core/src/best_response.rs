//! The independent seller's exact best response to an operator action.
//!
//! Three regimes, split by the operator's price `p_M`:
//!
//! * `p_M ≥ p*_I` (or the operator abstains): compete at the sole-seller price.
//! * `p0 ≤ p_M < p*_I`: compete at `p_M` when `q_M ≥ q†(p_M)`, otherwise wait
//!   for the operator to sell out and price at `p_wait` on the residual curve.
//! * `p_M < p0`: abstain when `q_M ≥ q‡(p_M)`, otherwise wait.
//!
//! Competing always stocks the full demand at the chosen price.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::game::{utilities_unchecked, Action, GameParams, Price, RationingRule};

/// Break-even, sole-seller and operator-monopoly prices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KeyPrices {
    /// Independent seller's break-even price `c_I / (1 − α)`; infinite when `α = 1`.
    pub p0: f64,
    /// Independent seller's sole-seller price; `Abstain` when `p0 > θ`.
    pub p_star_i: Price,
    /// Operator's monopoly price; `Abstain` when `c_M > θ + k`.
    pub p_star_m: Price,
}

impl KeyPrices {
    /// True when the independent seller can never break even.
    pub fn is_trivial(&self) -> bool {
        self.p_star_i.is_abstain()
    }
}

pub fn key_prices(params: &GameParams) -> KeyPrices {
    let p0 = if params.alpha < 1.0 {
        params.c_i / (1.0 - params.alpha)
    } else {
        f64::INFINITY
    };
    let p_star_i = if p0 <= params.theta {
        Price::At(0.5 * (p0 + params.theta))
    } else {
        Price::Abstain
    };
    let p_star_m = if params.c_m <= params.theta + params.k {
        // The unconstrained vertex is negative only when k > c_M + θ.
        Price::At((0.5 * (params.c_m - params.k + params.theta)).max(0.0))
    } else {
        Price::Abstain
    };
    KeyPrices {
        p0,
        p_star_i,
        p_star_m,
    }
}

/// Inventory thresholds and the wait-it-out price at one operator action.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Compete/wait boundary; `None` below the break-even price. Zero at and
    /// above the sole-seller price.
    pub q_dagger: Option<f64>,
    /// Wait/abstain boundary. May exceed `Q(p_M)` (or be infinite) when
    /// `γ < 1`, in which case abstaining is unreachable.
    pub q_ddagger: f64,
    /// Price the independent seller sets when facing the residual demand.
    pub p_wait: f64,
}

/// Strategy label of the independent seller.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Compete,
    Wait,
    Abstain,
}

impl Strategy {
    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Compete => "compete",
            Strategy::Wait => "wait",
            Strategy::Abstain => "abstain",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BestResponse {
    pub strategy: Strategy,
    pub action: Action,
    pub utility: f64,
    /// Priced strictly below the sole-seller price.
    pub demonopolized: bool,
}

/// `(p_M − p0)(θ − p_M)`: the compete utility divided by `1 − α`.
#[inline]
fn compete_margin(p_m: f64, p0: f64, theta: f64) -> f64 {
    ((p_m - p0) * (theta - p_m)).max(0.0)
}

/// Thresholds at operator price `p_m` and inventory `q_m`.
///
/// Requires `p0 ≤ θ`; the trivial game has no thresholds.
pub fn thresholds(p_m: f64, q_m: f64, params: &GameParams) -> Result<Thresholds> {
    if !(0.0..=params.theta).contains(&p_m) {
        return Err(invalid(format!(
            "operator price {p_m} outside [0, theta = {}]",
            params.theta
        )));
    }
    if !(q_m >= 0.0) {
        return Err(invalid(format!(
            "operator quantity must be non-negative, got {q_m}"
        )));
    }
    let kp = key_prices(params);
    match kp.p_star_i {
        Price::At(p_star) => Ok(thresholds_unchecked(p_m, q_m, params, kp.p0, p_star)),
        Price::Abstain => Err(invalid(
            "break-even price exceeds theta: the independent seller never sells",
        )),
    }
}

pub(crate) fn thresholds_unchecked(
    p_m: f64,
    q_m: f64,
    params: &GameParams,
    p0: f64,
    p_star: f64,
) -> Thresholds {
    let theta = params.theta;
    let gamma = params.gamma;
    match params.rationing {
        RationingRule::Intensity => {
            // f(q) = γq, f⁻¹(y) = inf{q : γq ≥ y}.
            let f_inv = |y: f64| {
                if y <= 0.0 {
                    0.0
                } else if gamma > 0.0 {
                    y / gamma
                } else {
                    f64::INFINITY
                }
            };
            let q_dagger = if p_m < p0 {
                None
            } else if p_m >= p_star {
                Some(0.0)
            } else {
                let y = theta - p0 - 2.0 * compete_margin(p_m, p0, theta).sqrt();
                Some(f_inv(y))
            };
            Thresholds {
                q_dagger,
                q_ddagger: f_inv(theta - p0),
                p_wait: p_star - 0.5 * RationingRule::subtractive(gamma, q_m),
            }
        }
        RationingRule::Proportional => {
            let q_at_m = params.q(p_m);
            // g(q) = 1 − γq/Q(p_M), g⁻¹(y) = inf{q : g(q) ≤ y}.
            let g_inv = |y: f64| {
                if y >= 1.0 {
                    0.0
                } else if gamma > 0.0 {
                    q_at_m * (1.0 - y) / gamma
                } else {
                    f64::INFINITY
                }
            };
            let q_dagger = if p_m < p0 {
                None
            } else if p_m >= p_star {
                Some(0.0)
            } else {
                let ratio = compete_margin(p_m, p0, theta) / compete_margin(p_star, p0, theta);
                Some(g_inv(ratio))
            };
            Thresholds {
                q_dagger,
                q_ddagger: g_inv(0.0),
                p_wait: p_star,
            }
        }
    }
}

/// The independent seller's best response to the operator playing
/// `(p_m, q_m)`.
///
/// Stock above `Q(p_M)` is never sold, so thresholds compare against
/// `min(q_M, Q(p_M))`.
pub fn best_response(p_m: Price, q_m: f64, params: &GameParams) -> Result<BestResponse> {
    let operator = Action::new(p_m, q_m)?;
    Ok(best_response_unchecked(
        &operator,
        params,
        &key_prices(params),
    ))
}

pub(crate) fn best_response_unchecked(
    operator: &Action,
    params: &GameParams,
    kp: &KeyPrices,
) -> BestResponse {
    let p_star = match kp.p_star_i {
        Price::At(p) => p,
        Price::Abstain => return abstain_response(),
    };
    let tol = params.tol();
    let p_m = match operator.price {
        Price::At(p) if p < p_star => p,
        _ => return finish(operator, Strategy::Compete, p_star, params, p_star),
    };
    let q_m = operator.quantity.min(params.q(p_m));
    let th = thresholds_unchecked(p_m, q_m, params, kp.p0, p_star);
    match th.q_dagger {
        Some(q_dagger) if q_m >= q_dagger - tol => {
            finish(operator, Strategy::Compete, p_m, params, p_star)
        }
        Some(_) => finish(operator, Strategy::Wait, th.p_wait, params, p_star),
        None if q_m >= th.q_ddagger - tol => abstain_response(),
        None => finish(operator, Strategy::Wait, th.p_wait, params, p_star),
    }
}

fn abstain_response() -> BestResponse {
    BestResponse {
        strategy: Strategy::Abstain,
        action: Action::abstain(),
        utility: 0.0,
        demonopolized: false,
    }
}

/// Stocks the independent seller's demand at `price` and scores the outcome.
fn finish(
    operator: &Action,
    strategy: Strategy,
    price: f64,
    params: &GameParams,
    p_star: f64,
) -> BestResponse {
    let probe = Action {
        price: Price::At(price),
        quantity: 0.0,
    };
    let quantity = crate::game::seller_demand_unchecked(
        crate::game::Seller::Independent,
        &probe,
        operator,
        params,
    );
    let action = Action {
        price: Price::At(price),
        quantity,
    };
    let utility = utilities_unchecked(operator, &action, params).u_i;
    BestResponse {
        strategy,
        action,
        utility,
        demonopolized: price < p_star,
    }
}

/// Response of the independent seller when it waits for the operator to sell
/// out, regardless of whether waiting is optimal. Abstains when the residual
/// demand leaves no profitable price.
pub(crate) fn wait_response(
    operator: &Action,
    params: &GameParams,
    kp: &KeyPrices,
) -> BestResponse {
    let (p_star, p_m) = match (kp.p_star_i, operator.price) {
        (Price::At(s), Price::At(m)) => (s, m),
        _ => return abstain_response(),
    };
    let q_m = operator.quantity.min(params.q(p_m));
    let th = thresholds_unchecked(p_m.min(params.theta), q_m, params, kp.p0, p_star);
    let br = finish(operator, Strategy::Wait, th.p_wait, params, p_star);
    if br.utility > 0.0 {
        br
    } else {
        abstain_response()
    }
}
