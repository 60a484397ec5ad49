//! Solver against brute-force oracle.

use duopoly_core::{
    best_response, discretization_bound, oracle_best_response, oracle_equilibrium,
    solve_equilibrium, BestResponse, EquilibriumResult, GameParams, OracleConfig, Price,
    SolverConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// The closed-form solvers under test. Swappable so a deliberately broken
/// implementation can be checked to fail verification.
pub trait Solver: Sync {
    fn best_response(
        &self,
        p_m: Price,
        q_m: f64,
        params: &GameParams,
    ) -> duopoly_core::Result<BestResponse>;

    fn equilibrium(
        &self,
        params: &GameParams,
        cfg: &SolverConfig,
    ) -> duopoly_core::Result<EquilibriumResult>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ClosedForm;

impl Solver for ClosedForm {
    fn best_response(
        &self,
        p_m: Price,
        q_m: f64,
        params: &GameParams,
    ) -> duopoly_core::Result<BestResponse> {
        best_response(p_m, q_m, params)
    }

    fn equilibrium(
        &self,
        params: &GameParams,
        cfg: &SolverConfig,
    ) -> duopoly_core::Result<EquilibriumResult> {
        solve_equilibrium(params, cfg)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub samples: usize,
    /// Largest amount by which the oracle's best-response utility beats the
    /// solver's.
    pub br_max_gap: f64,
    pub label_mismatches: usize,
    pub eq_solver_u_m: f64,
    pub eq_oracle_u_m: f64,
    pub eq_gap: f64,
    pub bound: f64,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.br_max_gap <= self.bound && self.eq_gap <= self.bound
    }
}

pub fn verify<S: Solver>(
    solver: &S,
    params: &GameParams,
    solver_cfg: &SolverConfig,
    oracle_cfg: &OracleConfig,
    samples: usize,
    seed: u64,
) -> duopoly_core::Result<VerifyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let theta = params.theta;
    let points: Vec<(f64, f64)> = (0..samples)
        .map(|_| {
            let p = rng.random::<f64>() * theta;
            let q = rng.random::<f64>() * (theta - p);
            (p, q)
        })
        .collect();

    let gaps = points
        .par_iter()
        .map(|&(p, q)| {
            let closed = solver.best_response(Price::At(p), q, params)?;
            let oracle = oracle_best_response(Price::At(p), q, params, oracle_cfg)?;
            Ok((
                oracle.utility - closed.utility,
                oracle.strategy != closed.strategy,
            ))
        })
        .collect::<duopoly_core::Result<Vec<(f64, bool)>>>()?;
    let br_max_gap = gaps.iter().map(|g| g.0).fold(f64::NEG_INFINITY, f64::max);
    let label_mismatches = gaps.iter().filter(|g| g.1).count();

    let solved = solver.equilibrium(params, solver_cfg)?;
    let oracle = oracle_equilibrium(params, oracle_cfg)?;
    Ok(VerifyReport {
        samples,
        br_max_gap: if samples == 0 { 0.0 } else { br_max_gap },
        label_mismatches,
        eq_solver_u_m: solved.u_m,
        eq_oracle_u_m: oracle.u_m,
        eq_gap: (solved.u_m - oracle.u_m).abs(),
        bound: discretization_bound(params, oracle_cfg),
    })
}
