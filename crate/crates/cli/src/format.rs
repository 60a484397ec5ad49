//! Number formatting and JSON records.

use duopoly_core::{key_prices, Action, BestResponse, EquilibriumResult, GameParams, Price};
use serde_json::{json, Map, Value};

use crate::config::Precision;

/// Rounds to the requested significant digits.
pub fn round(x: f64, precision: Precision) -> f64 {
    match precision {
        Precision::Full => x,
        Precision::Digits(d) if x.is_finite() && x != 0.0 => {
            format!("{:.*e}", d - 1, x).parse().unwrap_or(x)
        }
        Precision::Digits(_) => x,
    }
}

/// JSON number; non-finite values become `null`.
pub fn num(x: f64, precision: Precision) -> Value {
    let r = round(x, precision);
    if r.is_finite() {
        // Avoid printing -0.
        json!(if r == 0.0 { 0.0 } else { r })
    } else {
        Value::Null
    }
}

pub fn opt_num(x: Option<f64>, precision: Precision) -> Value {
    x.map_or(Value::Null, |x| num(x, precision))
}

pub fn price(p: Price, precision: Precision) -> Value {
    match p {
        Price::Abstain => json!("abstain"),
        Price::At(x) => num(x, precision),
    }
}

/// CSV cell: same rounding as JSON, `null` for missing values.
pub fn cell(x: Option<f64>, precision: Precision) -> String {
    match x.map(|x| round(x, precision)) {
        Some(r) if r.is_finite() => {
            if r == 0.0 {
                "0".to_string()
            } else if r.abs() < 1e-4 || r.abs() >= 1e15 {
                format!("{r:e}")
            } else {
                format!("{r}")
            }
        }
        _ => "null".to_string(),
    }
}

pub fn price_cell(p: Price, precision: Precision) -> String {
    match p {
        Price::Abstain => "abstain".to_string(),
        Price::At(x) => cell(Some(x), precision),
    }
}

pub fn params_json(p: &GameParams, precision: Precision) -> Value {
    json!({
        "theta": num(p.theta, precision),
        "alpha": num(p.alpha, precision),
        "k": num(p.k, precision),
        "c_M": num(p.c_m, precision),
        "c_I": num(p.c_i, precision),
        "gamma": num(p.gamma, precision),
        "rationing": p.rationing.as_str(),
    })
}

pub fn key_prices_json(p: &GameParams, precision: Precision) -> Value {
    let kp = key_prices(p);
    json!({
        "p0": num(kp.p0, precision),
        "p_star_I": price(kp.p_star_i, precision),
        "p_star_M": price(kp.p_star_m, precision),
    })
}

pub fn action_json(a: &Action, precision: Precision) -> Value {
    json!({
        "price": price(a.price, precision),
        "quantity": num(a.quantity, precision),
    })
}

pub fn response_json(br: &BestResponse, precision: Precision) -> Value {
    json!({
        "strategy": br.strategy.as_str(),
        "price": price(br.action.price, precision),
        "quantity": num(br.action.quantity, precision),
        "utility": num(br.utility, precision),
        "demonopolized": br.demonopolized,
    })
}

pub fn equilibrium_json(p: &GameParams, eq: &EquilibriumResult, precision: Precision) -> Value {
    let mut m = Map::new();
    m.insert("params".into(), params_json(p, precision));
    m.insert("key_prices".into(), key_prices_json(p, precision));
    m.insert("regime".into(), json!(eq.regime.as_str()));
    m.insert("operator".into(), action_json(&eq.action_m, precision));
    m.insert(
        "independent".into(),
        response_json(&eq.response_i, precision),
    );
    m.insert("u_M".into(), num(eq.u_m, precision));
    m.insert("u_I".into(), num(eq.u_i, precision));
    m.insert("cs".into(), opt_num(eq.cs, precision));
    m.insert("welfare".into(), opt_num(eq.welfare, precision));
    Value::Object(m)
}

pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        let p = Precision::default();
        assert_eq!(round(4.394_874_687_5, p), 4.39487);
        assert_eq!(round(15.078_025_632, p), 15.078);
        assert_eq!(round(1.0e-9, p), 1.0e-9);
        assert_eq!(round(0.0, p), 0.0);
        assert_eq!(
            round(std::f64::consts::PI, Precision::Full),
            std::f64::consts::PI
        );
        assert_eq!(cell(Some(5.61), p), "5.61");
        assert_eq!(cell(Some(-0.0), p), "0");
        assert_eq!(cell(None, p), "null");
        assert_eq!(cell(Some(6.5e-9), p), "6.5e-9");
        assert_eq!(cell(Some(f64::INFINITY), p), "null");
    }

    #[test]
    fn abstain_is_a_string() {
        assert_eq!(price(Price::Abstain, Precision::Full), json!("abstain"));
        assert_eq!(price_cell(Price::Abstain, Precision::Full), "abstain");
        assert_eq!(num(f64::INFINITY, Precision::Full), Value::Null);
    }
}
