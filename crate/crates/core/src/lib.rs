//! Two-stage price-quantity competition between a marketplace operator, who
//! moves first, and an independent seller on the same marketplace.
//!
//! Demand is linear, `Q(p) = θ − p`. The operator earns a referral fraction
//! `α` of the independent seller's revenue plus `k` per unit sold by anyone.
//! The crate computes the independent seller's best response, the
//! subgame-perfect equilibrium, consumer surplus and welfare, and provides
//! brute-force oracles and an arrival simulator to check them.

mod error;
mod search;

pub mod best_response;
pub mod equilibrium;
pub mod game;
pub mod oracle;
pub mod rationing_sim;
pub mod welfare;

pub use best_response::{
    best_response, key_prices, thresholds, BestResponse, KeyPrices, Strategy, Thresholds,
};
pub use equilibrium::{
    classify_regime, optimal_q_m, solve_equilibrium, u_m_given_br, EquilibriumResult, Regime,
    SolverConfig,
};
pub use error::{Error, Result};
pub use game::{
    demand, inverse_demand, residual_demand, seller_demand, utilities, Action, GameParams, Price,
    RationingRule, Seller, UtilityReport,
};
pub use oracle::{discretization_bound, oracle_best_response, oracle_equilibrium, OracleConfig};
pub use rationing_sim::{
    negbin_residual, proportional_rho, simulate_arrivals, SimConfig, SimResult,
};
pub use welfare::{consumer_surplus, surplus_transfer_check, welfare_report, WelfareReport};
