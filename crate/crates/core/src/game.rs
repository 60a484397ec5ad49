//! Game primitives: parameters, actions, linear demand, residual demand under
//! the supported rationing rules, demand splitting and both sellers' utilities.
//!
//! Demand is `Q(p) = θ − p` on `[0, θ]` and zero above. When one seller is
//! cheaper, it faces `Q`; the dearer seller faces the residual demand left
//! once the cheaper seller's stock is gone. Equal prices favor the
//! independent seller.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};

/// Absolute tolerance for analytic equalities, scaled by `max(1, θ)` where a
/// scale is available.
pub const TOL: f64 = 1e-12;

/// Rule deciding which customers buy at the lower price when its stock is short.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RationingRule {
    /// Highest-valuation customers buy first: `R(p) = Q(p) − γ·q`.
    Intensity,
    /// Routing independent of valuation: `R(p) = Q(p)·(1 − γ·q / Q(p_low))`.
    Proportional,
}

impl RationingRule {
    pub fn as_str(self) -> &'static str {
        match self {
            RationingRule::Intensity => "intensity",
            RationingRule::Proportional => "proportional",
        }
    }

    /// Subtractive transform `f(q) = γ·q` of the intensity family.
    pub fn subtractive(gamma: f64, q: f64) -> f64 {
        gamma * q
    }

    /// Multiplicative transform `g(q; p_low) = 1 − γ·q / Q(p_low)` of the
    /// proportional family, given the lower seller's original demand.
    pub fn multiplicative(gamma: f64, q: f64, demand_low: f64) -> f64 {
        if q == 0.0 {
            1.0
        } else {
            1.0 - gamma * q / demand_low
        }
    }
}

impl fmt::Display for RationingRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RationingRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "intensity" | "efficient" => Ok(RationingRule::Intensity),
            "proportional" | "beckmann" => Ok(RationingRule::Proportional),
            other => Err(invalid(format!("unknown rationing rule `{other}`"))),
        }
    }
}

/// All exogenous scalars of the game.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameParams {
    /// Maximum willingness to pay; also the population size.
    pub theta: f64,
    /// Referral fee, a fraction of the independent seller's revenue.
    pub alpha: f64,
    /// Operator's per-unit customer-experience benefit from any sale.
    pub k: f64,
    pub c_m: f64,
    pub c_i: f64,
    /// Substitutability; 1 is perfect substitutes.
    pub gamma: f64,
    pub rationing: RationingRule,
}

impl GameParams {
    /// Perfect-substitute parameters under intensity rationing.
    pub fn new(theta: f64, alpha: f64, k: f64, c_m: f64, c_i: f64) -> Result<Self> {
        Self {
            theta,
            alpha,
            k,
            c_m,
            c_i,
            gamma: 1.0,
            rationing: RationingRule::Intensity,
        }
        .validated()
    }

    pub fn with_rationing(mut self, rationing: RationingRule, gamma: f64) -> Result<Self> {
        self.rationing = rationing;
        self.gamma = gamma;
        self.validated()
    }

    pub fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.theta, self.alpha, self.k, self.c_m, self.c_i, self.gamma,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(invalid("game parameters must be finite"));
        }
        if self.theta <= 0.0 {
            return Err(invalid(format!(
                "theta must be positive, got {}",
                self.theta
            )));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(invalid(format!(
                "alpha must lie in [0, 1], got {}",
                self.alpha
            )));
        }
        if self.k < 0.0 || self.c_m < 0.0 || self.c_i < 0.0 {
            return Err(invalid("k, c_M and c_I must be non-negative"));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(invalid(format!(
                "gamma must lie in [0, 1], got {}",
                self.gamma
            )));
        }
        Ok(())
    }

    pub(crate) fn tol(&self) -> f64 {
        TOL * self.theta.max(1.0)
    }

    /// `Q(p)` without input checks; negative prices are treated as zero.
    #[inline]
    pub(crate) fn q(&self, p: f64) -> f64 {
        if p >= self.theta {
            0.0
        } else {
            self.theta - p.max(0.0)
        }
    }
}

/// A seller's posted price, or the abstain sentinel (no sale at any price).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Price {
    At(f64),
    Abstain,
}

impl Price {
    pub fn value(self) -> Option<f64> {
        match self {
            Price::At(p) => Some(p),
            Price::Abstain => None,
        }
    }

    pub fn is_abstain(self) -> bool {
        matches!(self, Price::Abstain)
    }
}

impl fmt::Display for Price {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Price::At(p) => write!(f, "{p}"),
            Price::Abstain => f.write_str("abstain"),
        }
    }
}

impl FromStr for Price {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("abstain") || s.eq_ignore_ascii_case("inf") {
            return Ok(Price::Abstain);
        }
        let p: f64 = s
            .parse()
            .map_err(|_| invalid(format!("cannot parse price `{s}`")))?;
        if !p.is_finite() || p < 0.0 {
            return Err(invalid(format!(
                "price must be finite and non-negative, got `{s}`"
            )));
        }
        Ok(Price::At(p))
    }
}

impl Serialize for Price {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Price::At(p) => serializer.serialize_f64(*p),
            Price::Abstain => serializer.serialize_str("abstain"),
        }
    }
}

impl<'de> Deserialize<'de> for Price {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Tag(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Num(p) if p.is_finite() && p >= 0.0 => Ok(Price::At(p)),
            Repr::Num(p) => Err(serde::de::Error::custom(format!("invalid price {p}"))),
            Repr::Tag(s) if s == "abstain" => Ok(Price::Abstain),
            Repr::Tag(s) => Err(serde::de::Error::custom(format!("invalid price `{s}`"))),
        }
    }
}

/// A (price, quantity) pair for one seller.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Action {
    pub price: Price,
    pub quantity: f64,
}

impl Action {
    pub fn new(price: Price, quantity: f64) -> Result<Self> {
        let action = Action { price, quantity };
        action.validate()?;
        Ok(action)
    }

    pub fn at(price: f64, quantity: f64) -> Result<Self> {
        Self::new(Price::At(price), quantity)
    }

    pub const fn abstain() -> Self {
        Action {
            price: Price::Abstain,
            quantity: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.quantity.is_finite() || self.quantity < 0.0 {
            return Err(invalid(format!(
                "quantity must be finite and non-negative, got {}",
                self.quantity
            )));
        }
        match self.price {
            Price::At(p) if !p.is_finite() || p < 0.0 => Err(invalid(format!(
                "price must be finite and non-negative, got {p}"
            ))),
            Price::Abstain if self.quantity != 0.0 => {
                Err(invalid("an abstaining seller cannot hold inventory"))
            }
            _ => Ok(()),
        }
    }
}

/// One of the two players.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Seller {
    /// The marketplace operator (leader).
    Operator,
    /// The independent seller (follower).
    Independent,
}

/// Realized utilities and unit sales of both sellers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UtilityReport {
    pub u_m: f64,
    pub u_i: f64,
    pub units_sold_m: f64,
    pub units_sold_i: f64,
}

/// Original demand `Q(p)`.
pub fn demand(p: f64, params: &GameParams) -> Result<f64> {
    if !(p >= 0.0) {
        return Err(invalid(format!("price must be non-negative, got {p}")));
    }
    Ok(params.q(p))
}

/// Inverse demand `P(q) = θ − q` on `[0, θ]`.
pub fn inverse_demand(q: f64, params: &GameParams) -> Result<f64> {
    if !(0.0..=params.theta).contains(&q) {
        return Err(invalid(format!(
            "quantity {q} outside [0, theta = {}]",
            params.theta
        )));
    }
    Ok(params.theta - q)
}

/// Demand left for the higher-priced seller at `p_high` after the
/// lower-priced seller sold `q_low` units at `p_low`.
///
/// `q_low` must not exceed `Q(p_low)`; it is validated, never clamped.
pub fn residual_demand(p_high: f64, q_low: f64, p_low: f64, params: &GameParams) -> Result<f64> {
    let q_high = demand(p_high, params)?;
    let q_at_low = demand(p_low, params)?;
    if !(q_low >= 0.0) {
        return Err(invalid(format!(
            "lower seller's quantity must be non-negative, got {q_low}"
        )));
    }
    if q_low > q_at_low + params.tol() {
        return Err(invalid(format!(
            "lower seller's quantity {q_low} exceeds its demand {q_at_low}"
        )));
    }
    Ok(residual_unchecked(q_high, q_low, q_at_low, params))
}

/// Residual demand from precomputed `Q(p_high)` and `Q(p_low)`.
#[inline]
pub(crate) fn residual_unchecked(
    q_high: f64,
    q_low: f64,
    q_at_low: f64,
    params: &GameParams,
) -> f64 {
    if q_low == 0.0 {
        return q_high;
    }
    match params.rationing {
        RationingRule::Intensity => {
            (q_high - RationingRule::subtractive(params.gamma, q_low)).max(0.0)
        }
        RationingRule::Proportional => {
            let g = RationingRule::multiplicative(params.gamma, q_low.min(q_at_low), q_at_low);
            (q_high * g).max(0.0)
        }
    }
}

/// Demand faced by `who` given both actions.
///
/// The cheaper seller faces `Q`; the dearer one faces the residual left by
/// the units the cheaper seller actually sells, `min(q, Q(p))`. At equal
/// prices the independent seller is served first.
pub fn seller_demand(
    who: Seller,
    own: &Action,
    other: &Action,
    params: &GameParams,
) -> Result<f64> {
    own.validate()?;
    other.validate()?;
    Ok(seller_demand_unchecked(who, own, other, params))
}

pub(crate) fn seller_demand_unchecked(
    who: Seller,
    own: &Action,
    other: &Action,
    params: &GameParams,
) -> f64 {
    let p_own = match own.price {
        Price::Abstain => return 0.0,
        Price::At(p) => p,
    };
    let p_other = match other.price {
        Price::Abstain => return params.q(p_own),
        Price::At(p) => p,
    };
    let own_first = p_own < p_other || (p_own == p_other && who == Seller::Independent);
    if own_first {
        params.q(p_own)
    } else {
        let q_at_other = params.q(p_other);
        let sold_other = other.quantity.min(q_at_other);
        residual_unchecked(params.q(p_own), sold_other, q_at_other, params)
    }
}

/// Both sellers' utilities for the given actions.
///
/// `u_M = (p_M + k)·s_M + (α·p_I + k)·s_I − c_M·q_M` and
/// `u_I = (1 − α)·p_I·s_I − c_I·q_I`, where `s` is units sold.
pub fn utilities(
    action_m: &Action,
    action_i: &Action,
    params: &GameParams,
) -> Result<UtilityReport> {
    action_m.validate()?;
    action_i.validate()?;
    Ok(utilities_unchecked(action_m, action_i, params))
}

pub(crate) fn utilities_unchecked(
    action_m: &Action,
    action_i: &Action,
    params: &GameParams,
) -> UtilityReport {
    let d_m = seller_demand_unchecked(Seller::Operator, action_m, action_i, params);
    let d_i = seller_demand_unchecked(Seller::Independent, action_i, action_m, params);
    let sold_m = action_m.quantity.min(d_m);
    let sold_i = action_i.quantity.min(d_i);
    let (rev_m, rev_i) = (
        action_m
            .price
            .value()
            .map_or(0.0, |p| (p + params.k) * sold_m),
        action_i
            .price
            .value()
            .map_or(0.0, |p| (params.alpha * p + params.k) * sold_i),
    );
    let net_i = action_i
        .price
        .value()
        .map_or(0.0, |p| (1.0 - params.alpha) * p * sold_i);
    UtilityReport {
        u_m: rev_m + rev_i - params.c_m * action_m.quantity,
        u_i: net_i - params.c_i * action_i.quantity,
        units_sold_m: sold_m,
        units_sold_i: sold_i,
    }
}
