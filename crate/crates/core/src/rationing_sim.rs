//! Random-arrival model of rationing at a stocked-out low price.
//!
//! `θ` customers arrive one at a time with valuations drawn from
//! `Uniform[0, θ]`. While the low-price seller has stock, arrivals valuing
//! the good at least `p_low` buy from it; the rest leave. Once it sells out,
//! every later arrival valuing the good at least `p_eval` is residual demand.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, unsupported, Result};
use crate::game::GameParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub theta_int: u64,
    pub p_low: f64,
    pub q_low: u64,
    pub p_eval: f64,
    pub trials: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub mc_mean: f64,
    pub mc_stderr: f64,
    pub closed_form: f64,
    pub proportional_value: f64,
}

fn as_count(x: f64, what: &str) -> Result<u64> {
    if !(x.is_finite() && x >= 0.0) {
        return Err(invalid(format!(
            "{what} must be a non-negative number, got {x}"
        )));
    }
    if x.fract() != 0.0 || x > u32::MAX as f64 {
        return Err(unsupported(format!(
            "the arrival model needs an integer {what}, got {x}"
        )));
    }
    Ok(x as u64)
}

impl SimConfig {
    /// Builds a config from real-valued game inputs; `theta` and `q_low`
    /// must be whole numbers.
    pub fn new(
        theta: f64,
        p_low: f64,
        q_low: f64,
        p_eval: f64,
        trials: u64,
        seed: u64,
    ) -> Result<Self> {
        let cfg = SimConfig {
            theta_int: as_count(theta, "theta")?,
            p_low,
            q_low: as_count(q_low, "q_low")?,
            p_eval,
            trials,
            seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let theta = self.theta_int as f64;
        if self.theta_int == 0 {
            return Err(invalid("theta must be at least 1"));
        }
        if self.q_low > self.theta_int {
            return Err(invalid(format!(
                "q_low = {} exceeds the population {}",
                self.q_low, self.theta_int
            )));
        }
        if self.trials == 0 {
            return Err(invalid("trials must be at least 1"));
        }
        if !(0.0..theta).contains(&self.p_low) {
            return Err(invalid(format!(
                "p_low must lie in [0, {theta}), got {}",
                self.p_low
            )));
        }
        if !(0.0..=theta).contains(&self.p_eval) {
            return Err(invalid(format!(
                "p_eval must lie in [0, {theta}], got {}",
                self.p_eval
            )));
        }
        Ok(())
    }

    fn theta(&self) -> f64 {
        self.theta_int as f64
    }
}

/// Expected residual demand at `p_eval` under random arrivals.
///
/// The low-price seller sells out at the `N`-th arrival, `N` negative
/// binomial with `q_low` successes of probability `(θ − p_low)/θ`. Each of
/// the `max(θ − N, 0)` later arrivals buys at `p_eval` with probability
/// `(θ − p_eval)/θ`.
pub fn negbin_residual(cfg: &SimConfig) -> Result<f64> {
    cfg.validate()?;
    let theta = cfg.theta();
    let n = cfg.theta_int;
    let q = cfg.q_low;
    let accept = (theta - cfg.p_eval) / theta;
    if q == 0 {
        return Ok(theta - cfg.p_eval);
    }
    if cfg.p_low == 0.0 {
        // Every arrival buys, so the seller is out after exactly q_low.
        return Ok(accept * (theta - q as f64));
    }
    let ln_fact = log_factorials(n);
    let ln_miss = (cfg.p_low / theta).ln();
    let ln_hit = ((theta - cfg.p_low) / theta).ln();
    let mut sum = 0.0;
    for k in q..n {
        let ln_binom =
            ln_fact[(k - 1) as usize] - ln_fact[(q - 1) as usize] - ln_fact[(k - q) as usize];
        let ln_p = ln_binom + (k - q) as f64 * ln_miss + q as f64 * ln_hit;
        sum += (n - k) as f64 * ln_p.exp();
    }
    Ok(accept * sum)
}

fn log_factorials(n: u64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n as usize + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for i in 1..=n {
        acc += (i as f64).ln();
        out.push(acc);
    }
    out
}

/// Monte-Carlo estimate of the residual demand, with the closed form and the
/// proportional-rationing value alongside.
///
/// Trial `t` draws from its own stream of a generator seeded by `seed`, so
/// results do not depend on how trials are scheduled.
pub fn simulate_arrivals(cfg: &SimConfig) -> Result<SimResult> {
    let closed_form = negbin_residual(cfg)?;
    let theta = cfg.theta();
    let counts: Vec<u64> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| one_trial(cfg, t))
        .collect();
    let n = counts.len() as f64;
    let mean = counts.iter().map(|&c| c as f64).sum::<f64>() / n;
    let stderr = if counts.len() > 1 {
        let ss: f64 = counts.iter().map(|&c| (c as f64 - mean).powi(2)).sum();
        (ss / (n - 1.0) / n).sqrt()
    } else {
        0.0
    };
    let q_at_low = theta - cfg.p_low;
    let proportional_value = (theta - cfg.p_eval) * (1.0 - cfg.q_low as f64 / q_at_low).max(0.0);
    Ok(SimResult {
        mc_mean: mean,
        mc_stderr: stderr,
        closed_form,
        proportional_value,
    })
}

fn one_trial(cfg: &SimConfig, trial: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(trial);
    let theta = cfg.theta();
    let mut stock = cfg.q_low;
    let mut residual = 0;
    for _ in 0..cfg.theta_int {
        let v = rng.random::<f64>() * theta;
        if stock > 0 {
            if v >= cfg.p_low {
                stock -= 1;
            }
        } else if v >= cfg.p_eval {
            residual += 1;
        }
    }
    residual
}

/// Share of buyers routed past the low-price seller under proportional
/// rationing: `(Q(p_low) − q_low) / Q(p_low)`.
pub fn proportional_rho(p_low: f64, q_low: f64, params: &GameParams) -> Result<f64> {
    params.validate()?;
    let q_at_low = crate::game::demand(p_low, params)?;
    if q_at_low <= 0.0 {
        return Err(invalid(format!("no demand at p_low = {p_low}")));
    }
    if !(q_low >= 0.0) || q_low > q_at_low + params.tol() {
        return Err(invalid(format!(
            "q_low = {q_low} must lie in [0, Q(p_low) = {q_at_low}]"
        )));
    }
    Ok(((q_at_low - q_low) / q_at_low).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(q_low: u64, p_eval: f64) -> SimConfig {
        SimConfig::new(10.0, 6.0, q_low as f64, p_eval, 1, 7).unwrap()
    }

    #[test]
    fn zero_stock_leaves_full_demand() {
        assert_eq!(negbin_residual(&cfg(0, 6.0)).unwrap(), 4.0);
    }

    #[test]
    fn frozen_closed_form_values() {
        // Direct evaluation of the sum with exact binomials.
        assert!((negbin_residual(&cfg(1, 7.0)).unwrap() - 2.254_534_963_2).abs() < 1e-9);
        assert!((negbin_residual(&cfg(4, 6.0)).unwrap() - 0.601_974_374_4).abs() < 1e-9);
    }

    #[test]
    fn free_goods_sell_out_immediately() {
        let c = SimConfig::new(10.0, 0.0, 3.0, 5.0, 1, 0).unwrap();
        assert!((negbin_residual(&c).unwrap() - 3.5).abs() < 1e-12);
    }

    #[test]
    fn integer_population_required() {
        assert!(matches!(
            SimConfig::new(10.5, 6.0, 1.0, 6.0, 10, 0),
            Err(crate::Error::Unsupported(_))
        ));
        assert!(matches!(
            SimConfig::new(10.0, 6.0, 1.5, 6.0, 10, 0),
            Err(crate::Error::Unsupported(_))
        ));
        assert!(SimConfig::new(10.0, 6.0, 11.0, 6.0, 10, 0).is_err());
        assert!(SimConfig::new(10.0, 10.0, 1.0, 6.0, 10, 0).is_err());
        assert!(SimConfig::new(10.0, 6.0, 1.0, 6.0, 0, 0).is_err());
    }

    #[test]
    fn rho_examples() {
        let p = GameParams::new(4.0, 0.2, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(proportional_rho(2.0, 0.0, &p).unwrap(), 1.0);
        assert_eq!(proportional_rho(2.0, 1.0, &p).unwrap(), 0.5);
        assert_eq!(proportional_rho(2.0, 2.0, &p).unwrap(), 0.0);
        assert!(proportional_rho(4.0, 0.0, &p).is_err());
        assert!(proportional_rho(2.0, 3.0, &p).is_err());
    }

    #[test]
    fn simulation_is_deterministic() {
        let c = SimConfig::new(10.0, 6.0, 2.0, 7.0, 2_000, 42).unwrap();
        let a = simulate_arrivals(&c).unwrap();
        let b = simulate_arrivals(&c).unwrap();
        assert_eq!(a, b);
        assert!(a.mc_stderr > 0.0);
    }
}
