//! Operator's optimal action and the subgame-perfect equilibrium.
//!
//! With the independent seller best-responding, the operator's optimum lies
//! in one of four single-variable families:
//!
//! 1. no stock (the independent seller prices as sole seller);
//! 2. `p_M ∈ [p0, p*_I]`, `q_M = q†(p_M)`: induce competing at `p_M`;
//! 3. `p_M ∈ [p0, p*_I]`, `q_M` just below `q†(p_M)`: induce waiting;
//! 4. `p_M ∈ [0, p0)`, `q_M = Q(p_M)`: induce abstaining (or waiting when
//!    `γ < 1` leaves residual demand).
//!
//! Families 3 and 4 are open at one end. Both are scored at the left limit
//! and reported a hair inside the open boundary.

use serde::{Deserialize, Serialize};

use crate::best_response::{
    best_response_unchecked, key_prices, thresholds_unchecked, wait_response, BestResponse,
    KeyPrices, Strategy,
};
use crate::error::{invalid, Result};
use crate::game::{residual_unchecked, utilities_unchecked, Action, GameParams, Price, TOL};
use crate::search::maximize;
use crate::welfare;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Distance below an open boundary at which a limit point is reported.
    pub epsilon_report: f64,
    /// Coarse grid points per family.
    pub price_grid: usize,
    /// Refinement stopping width on `p_M`.
    pub refine_tol: f64,
    /// `q_M` guard-grid points scanned at the winning price; 0 disables.
    pub safety_grid: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            epsilon_report: 1e-9,
            price_grid: 512,
            refine_tol: 1e-10,
            safety_grid: 256,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon_report > 0.0 && self.epsilon_report.is_finite()) {
            return Err(invalid(format!(
                "epsilon_report must be positive, got {}",
                self.epsilon_report
            )));
        }
        if self.price_grid < 16 {
            return Err(invalid(format!(
                "price_grid must be at least 16, got {}",
                self.price_grid
            )));
        }
        if !(self.refine_tol > 0.0 && self.refine_tol.is_finite()) {
            return Err(invalid(format!(
                "refine_tol must be positive, got {}",
                self.refine_tol
            )));
        }
        Ok(())
    }
}

/// What the operator's equilibrium action makes the independent seller do.
///
/// Declaration order is the tie-break order: earlier wins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    InduceCompete,
    InduceWait,
    InduceAbstain,
    MoAbstains,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::InduceCompete => "induce_compete",
            Regime::InduceWait => "induce_wait",
            Regime::InduceAbstain => "induce_abstain",
            Regime::MoAbstains => "mo_abstains",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumResult {
    pub action_m: Action,
    pub response_i: BestResponse,
    pub regime: Regime,
    pub u_m: f64,
    pub u_i: f64,
    /// `None` where consumer surplus is not defined (proportional rationing
    /// or imperfect substitutes).
    pub cs: Option<f64>,
    pub welfare: Option<f64>,
}

/// Operator utility at `(p_m, q_m)` with the independent seller
/// best-responding.
pub fn u_m_given_br(p_m: Price, q_m: f64, params: &GameParams) -> Result<f64> {
    params.validate()?;
    let operator = Action::new(p_m, q_m)?;
    Ok(u_m_at(&operator, params, &key_prices(params)))
}

fn u_m_at(operator: &Action, params: &GameParams, kp: &KeyPrices) -> f64 {
    let br = best_response_unchecked(operator, params, kp);
    utilities_unchecked(operator, &br.action, params).u_m
}

/// Operator utility with the independent seller forced onto its wait branch.
fn u_m_waiting(operator: &Action, params: &GameParams, kp: &KeyPrices) -> f64 {
    let br = wait_response(operator, params, kp);
    utilities_unchecked(operator, &br.action, params).u_m
}

fn mo_abstain_value(params: &GameParams, kp: &KeyPrices) -> f64 {
    u_m_at(&Action::abstain(), params, kp)
}

/// A family optimum: the action to report and the utility it is scored at.
#[derive(Debug, Clone, Copy)]
struct Candidate {
    action: Action,
    score: f64,
}

/// Best inventory at a fixed operator price: `(q_M, u_M)`.
///
/// A wait-inducing quantity is reported `epsilon_report` below `q†` and
/// scored at the left limit.
pub fn optimal_q_m(p_m: f64, params: &GameParams, cfg: &SolverConfig) -> Result<(f64, f64)> {
    params.validate()?;
    cfg.validate()?;
    if !(p_m >= 0.0 && p_m.is_finite()) {
        return Err(invalid(format!(
            "operator price must be a non-negative number, got {p_m}"
        )));
    }
    let kp = key_prices(params);
    let p_star = match kp.p_star_i {
        Price::At(p) => p,
        Price::Abstain => {
            return Err(invalid(
                "break-even price exceeds theta: the game is trivial",
            ))
        }
    };
    let mut best = inventory_candidates(p_m, params, cfg, &kp, p_star)
        .into_iter()
        .fold(None, |acc: Option<(f64, f64)>, (q, u)| match acc {
            Some((_, bu)) if bu >= u - tie_tol(bu) => acc,
            _ => Some((q, u)),
        })
        .expect("at least one candidate");
    if let Some((q, u)) = guard_scan(p_m, params, cfg, &kp, best.1) {
        best = (q, u);
    }
    Ok(best)
}

/// Inventory on the compete branch: `q†`, or more when imperfect substitutes
/// leave the operator residual demand at the shared price and a unit sold
/// there covers its cost.
fn compete_quantity(p_m: f64, q_dagger: f64, params: &GameParams) -> f64 {
    let q_max = params.q(p_m);
    if p_m + params.k <= params.c_m {
        return q_dagger;
    }
    let leftover = residual_unchecked(q_max, q_max, q_max, params);
    q_dagger.max(leftover.min(q_max))
}

/// Candidate `(reported q, score)` pairs at a fixed operator price.
fn inventory_candidates(
    p_m: f64,
    params: &GameParams,
    cfg: &SolverConfig,
    kp: &KeyPrices,
    p_star: f64,
) -> Vec<(f64, f64)> {
    let at = |q: f64| Action {
        price: Price::At(p_m),
        quantity: q,
    };
    let zero = (0.0, u_m_at(&at(0.0), params, kp));
    if p_m >= p_star {
        return vec![zero];
    }
    let q_max = params.q(p_m);
    if p_m >= kp.p0 {
        let th = thresholds_unchecked(p_m, 0.0, params, kp.p0, p_star);
        let q_dagger = th.q_dagger.unwrap_or(0.0);
        let mut out = Vec::with_capacity(3);
        if q_dagger <= q_max {
            let q_c = compete_quantity(p_m, q_dagger, params);
            out.push((q_c, u_m_at(&at(q_c), params, kp)));
            if q_dagger > 0.0 {
                let left = u_m_waiting(&at(q_dagger), params, kp);
                out.push(((q_dagger - cfg.epsilon_report).max(0.0), left));
            }
        } else {
            out.push((q_max, u_m_at(&at(q_max), params, kp)));
        }
        out.push(zero);
        out
    } else {
        vec![(q_max, u_m_at(&at(q_max), params, kp)), zero]
    }
}

/// Scans `q_M ∈ [0, Q(p_M)]` and returns a point beating `incumbent`, if any.
fn guard_scan(
    p_m: f64,
    params: &GameParams,
    cfg: &SolverConfig,
    kp: &KeyPrices,
    incumbent: f64,
) -> Option<(f64, f64)> {
    if cfg.safety_grid == 0 {
        return None;
    }
    let q_max = params.q(p_m);
    let n = cfg.safety_grid.max(2);
    let mut best: Option<(f64, f64)> = None;
    for j in 0..n {
        let q = q_max * j as f64 / (n - 1) as f64;
        let u = u_m_at(
            &Action {
                price: Price::At(p_m),
                quantity: q,
            },
            params,
            kp,
        );
        let bar = best.map_or(incumbent + tie_tol(incumbent), |(_, b)| b);
        if u > bar {
            best = Some((q, u));
        }
    }
    best
}

fn tie_tol(u: f64) -> f64 {
    1e3 * TOL * u.abs().max(1.0)
}

/// Subgame-perfect equilibrium.
pub fn solve_equilibrium(params: &GameParams, cfg: &SolverConfig) -> Result<EquilibriumResult> {
    params.validate()?;
    cfg.validate()?;
    let kp = key_prices(params);
    let action_m = match kp.p_star_i {
        Price::Abstain => trivial_action(params, &kp),
        Price::At(p_star) => {
            let cand = best_candidate(params, cfg, &kp, p_star);
            guarded(cand, params, cfg, &kp)
        }
    };
    Ok(assemble(action_m, params, &kp))
}

fn trivial_action(params: &GameParams, kp: &KeyPrices) -> Action {
    match kp.p_star_m {
        Price::At(p) => Action {
            price: Price::At(p),
            quantity: params.q(p),
        },
        Price::Abstain => Action::abstain(),
    }
}

fn best_candidate(
    params: &GameParams,
    cfg: &SolverConfig,
    kp: &KeyPrices,
    p_star: f64,
) -> Candidate {
    let p0 = kp.p0;
    let search = |f: &dyn Fn(f64) -> f64, lo: f64, hi: f64| {
        maximize(f, lo, hi, cfg.price_grid, cfg.refine_tol)
    };
    let at = |p: f64, q: f64| Action {
        price: Price::At(p),
        quantity: q,
    };
    let q_dagger = |p: f64| {
        thresholds_unchecked(p, 0.0, params, p0, p_star)
            .q_dagger
            .unwrap_or(0.0)
    };

    let mut cands: Vec<Candidate> = Vec::with_capacity(4);
    let mut demoted = None;

    if p0 < p_star {
        // Family 2: infeasible where q† exceeds what the operator can sell.
        let f2 = |p: f64| {
            let q = q_dagger(p);
            if q > params.q(p) + params.tol() {
                f64::NEG_INFINITY
            } else {
                u_m_at(&at(p, compete_quantity(p, q, params)), params, kp)
            }
        };
        if let Some((p, u)) = search(&f2, p0, p_star) {
            cands.push(Candidate {
                action: at(p, compete_quantity(p, q_dagger(p), params)),
                score: u,
            });
        }

        // Family 3: wait branch at min(q†, Q(p_M)).
        let f3 = |p: f64| {
            let q = q_dagger(p).min(params.q(p));
            u_m_waiting(&at(p, q), params, kp)
        };
        if let Some((p, u)) = search(&f3, p0, p_star) {
            let qd = q_dagger(p);
            let q_max = params.q(p);
            let q = if qd <= q_max {
                (qd - cfg.epsilon_report).max(0.0)
            } else {
                q_max
            };
            let limit = at(p, qd.min(q_max));
            let cand = Candidate {
                action: at(p, q),
                score: u,
            };
            // At p0 the limiting wait earns the independent seller nothing:
            // that point is an abstain outcome and ranks as one.
            if wait_response(&limit, params, kp).strategy == Strategy::Abstain {
                demoted = Some(cand);
            } else {
                cands.push(cand);
            }
        }
    }

    // Family 4: closed at p0 by continuity, reported just below it.
    if p0 > 0.0 {
        let hi = p0.min(params.theta);
        let f4 = |p: f64| {
            let q = params.q(p);
            u_m_waiting(&at(p, q), params, kp)
        };
        if let Some((p, u)) = search(&f4, 0.0, hi) {
            let p = if p > p0 - cfg.epsilon_report {
                (p0 - cfg.epsilon_report).max(0.0)
            } else {
                p
            };
            cands.push(Candidate {
                action: at(p, params.q(p)),
                score: u,
            });
        }
    }

    cands.extend(demoted);
    cands.push(Candidate {
        action: Action::abstain(),
        score: mo_abstain_value(params, kp),
    });

    // Earlier families win ties.
    let mut best = cands[0];
    for c in &cands[1..] {
        if c.score > best.score + tie_tol(best.score) {
            best = *c;
        }
    }
    best
}

/// Applies the inventory guard grid at the winning price.
fn guarded(cand: Candidate, params: &GameParams, cfg: &SolverConfig, kp: &KeyPrices) -> Action {
    let p_m = match cand.action.price {
        Price::At(p) => p,
        Price::Abstain => return cand.action,
    };
    match guard_scan(p_m, params, cfg, kp, cand.score) {
        Some((q, _)) => Action {
            price: Price::At(p_m),
            quantity: q,
        },
        None => cand.action,
    }
}

fn assemble(action_m: Action, params: &GameParams, kp: &KeyPrices) -> EquilibriumResult {
    let response_i = best_response_unchecked(&action_m, params, kp);
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
    result
}

pub fn classify_regime(result: &EquilibriumResult) -> Regime {
    if result.action_m.price.is_abstain() || result.action_m.quantity == 0.0 {
        return Regime::MoAbstains;
    }
    match result.response_i.strategy {
        Strategy::Compete => Regime::InduceCompete,
        Strategy::Wait => Regime::InduceWait,
        Strategy::Abstain => Regime::InduceAbstain,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::RationingRule;

    fn params(c_m: f64, c_i: f64) -> GameParams {
        GameParams::new(10.0, 0.2, 2.0, c_m, c_i).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn u_m_given_br_examples() {
        let p = params(3.0, 2.0);
        assert!(close(
            u_m_given_br(Price::At(4.0), 0.0, &p).unwrap(),
            12.1875,
            1e-12
        ));
        assert!(close(
            u_m_given_br(Price::At(4.0), 1.5, &p).unwrap(),
            12.3,
            1e-12
        ));
        let near = u_m_given_br(Price::At(4.0), 1.5 - 1e-9, &p).unwrap();
        assert!(close(near, 13.8, 1e-7));
    }

    #[test]
    fn optimal_q_m_examples() {
        let cfg = SolverConfig::default();
        let p = params(3.0, 2.0);
        assert_eq!(optimal_q_m(7.0, &p, &cfg).unwrap().0, 0.0);
        let (q, u) = optimal_q_m(4.0, &p, &cfg).unwrap();
        assert!(close(q, 1.5 - cfg.epsilon_report, 1e-12));
        assert!(close(u, 13.8, 1e-12));
        let p = params(10.0, 2.0);
        assert_eq!(optimal_q_m(2.0, &p, &cfg).unwrap().0, 0.0);
    }

    #[test]
    fn optimal_q_m_rejects_trivial_game() {
        let cfg = SolverConfig::default();
        assert!(optimal_q_m(4.0, &params(2.0, 9.0), &cfg).is_err());
    }

    #[test]
    fn worked_example() {
        let r = solve_equilibrium(&params(3.0, 1.0), &SolverConfig::default()).unwrap();
        assert_eq!(r.regime, Regime::InduceCompete);
        let p_m = r.action_m.price.value().unwrap();
        assert!(close(p_m, 4.39, 0.01), "p_M = {p_m}");
        assert!(close(r.action_m.quantity, 0.35, 0.01));
        assert_eq!(r.response_i.action.price, Price::At(p_m));
        assert!(close(r.response_i.action.quantity, 5.61, 0.01));
        // Independent oracle value.
        assert!(close(p_m, 4.394_874_687_5, 1e-6));
        assert!(close(r.u_m, 15.078_025_632, 1e-6));
    }

    #[test]
    fn imperfect_substitutes_stock_the_shared_price_leftover() {
        // Competing at p_M leaves the operator (1 − γ)·Q(p_M) buyers, so
        // u_M = (θ − p)((1 − γ)(p + k − c_M) + αp + k), maximal at p = 55/14.
        let p = params(3.0, 1.0)
            .with_rationing(RationingRule::Intensity, 0.5)
            .unwrap();
        let r = solve_equilibrium(&p, &SolverConfig::default()).unwrap();
        assert_eq!(r.regime, Regime::InduceCompete);
        let p_m = r.action_m.price.value().unwrap();
        assert!(close(p_m, 55.0 / 14.0, 1e-6), "p_M = {p_m}");
        assert!(close(r.action_m.quantity, 0.5 * (10.0 - p_m), 1e-9));
        assert!(close(r.u_m, 361.25 / 14.0, 1e-9));

        let (q, u) = optimal_q_m(55.0 / 14.0, &p, &SolverConfig::default()).unwrap();
        assert!(close(q, 85.0 / 28.0, 1e-12));
        assert!(close(u, 361.25 / 14.0, 1e-9));
    }

    #[test]
    fn trivial_game() {
        let r = solve_equilibrium(&params(2.0, 9.0), &SolverConfig::default()).unwrap();
        assert_eq!(r.response_i.strategy, Strategy::Abstain);
        assert_eq!(r.action_m, Action::at(5.0, 5.0).unwrap());
        assert_eq!(r.regime, Regime::InduceAbstain);

        let r = solve_equilibrium(&params(13.0, 9.0), &SolverConfig::default()).unwrap();
        assert_eq!(r.regime, Regime::MoAbstains);
        assert_eq!(r.u_m, 0.0);
    }

    #[test]
    fn high_operator_cost_induces_compete() {
        let r = solve_equilibrium(&params(8.0, 1.0), &SolverConfig::default()).unwrap();
        assert_eq!(r.regime, Regime::InduceCompete);
    }

    #[test]
    fn wait_family_can_win() {
        // Without the customer-experience term the operator prefers to sell
        // its own stock before the independent seller.
        let p = GameParams::new(10.0, 0.2, 0.0, 3.0, 2.0).unwrap();
        let r = solve_equilibrium(&p, &SolverConfig::default()).unwrap();
        assert_eq!(r.regime, Regime::InduceWait);
        assert_eq!(r.response_i.strategy, Strategy::Wait);
    }

    #[test]
    fn classify_zero_stock() {
        let r = solve_equilibrium(&params(3.0, 1.0), &SolverConfig::default()).unwrap();
        let mut zero = r;
        zero.action_m.quantity = 0.0;
        assert_eq!(classify_regime(&zero), Regime::MoAbstains);
    }

    #[test]
    fn result_is_consistent() {
        for (c_m, c_i) in [(3.0, 1.0), (3.0, 2.0), (0.5, 6.0), (8.0, 0.5), (6.0, 7.5)] {
            let p = params(c_m, c_i);
            let r = solve_equilibrium(&p, &SolverConfig::default()).unwrap();
            let br = crate::best_response::best_response(r.action_m.price, r.action_m.quantity, &p)
                .unwrap();
            assert_eq!(br, r.response_i);
            let u = crate::game::utilities(&r.action_m, &br.action, &p).unwrap();
            assert_eq!((u.u_m, u.u_i), (r.u_m, r.u_i));
            let kp = key_prices(&p);
            assert!(r.u_m >= mo_abstain_value(&p, &kp) - 1e-9);
        }
    }

    #[test]
    fn proportional_has_no_surplus() {
        let p = params(3.0, 1.0)
            .with_rationing(RationingRule::Proportional, 1.0)
            .unwrap();
        let r = solve_equilibrium(&p, &SolverConfig::default()).unwrap();
        assert!(r.cs.is_none() && r.welfare.is_none());
    }

    #[test]
    fn config_validation() {
        let ok = SolverConfig::default();
        assert!(ok.validate().is_ok());
        for bad in [
            SolverConfig {
                epsilon_report: 0.0,
                ..ok
            },
            SolverConfig {
                price_grid: 15,
                ..ok
            },
            SolverConfig {
                refine_tol: -1.0,
                ..ok
            },
        ] {
            assert!(bad.validate().is_err());
        }
    }
}
