use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{Overrides, Precision};
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "duopoly",
    version,
    about = "Equilibria of the marketplace-operator / independent-seller price-quantity game"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Highest willingness to pay (also the population size).
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    /// Referral fee as a fraction of the independent seller's revenue.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Operator's benefit per unit sold by anyone.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub k: Option<f64>,
    /// Operator's unit cost.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub cm: Option<f64>,
    /// Independent seller's unit cost.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub ci: Option<f64>,
    /// Substitutability in [0, 1]; 1 means perfect substitutes.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    /// intensity or proportional.
    #[arg(long, global = true)]
    pub rationing: Option<String>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// key = value settings file; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// RNG seed for verify sampling and simulation (default 0)
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Simulation trials (default 100000)
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    /// Significant digits (default 6) or "full".
    #[arg(long, global = true)]
    pub precision: Option<String>,
}

impl CommonArgs {
    pub fn overrides(&self) -> Result<Overrides, CliError> {
        let rationing = self
            .rationing
            .as_deref()
            .map(str::parse)
            .transpose()
            .map_err(|e: duopoly_core::Error| CliError::BadInput(e.to_string()))?;
        let precision = self
            .precision
            .as_deref()
            .map(str::parse::<Precision>)
            .transpose()
            .map_err(CliError::BadInput)?;
        Ok(Overrides {
            theta: self.theta,
            alpha: self.alpha,
            k: self.k,
            c_m: self.cm,
            c_i: self.ci,
            gamma: self.gamma,
            rationing,
            seed: self.seed,
            trials: self.trials,
            precision,
            ..Overrides::default()
        })
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve for the subgame-perfect equilibrium.
    Equilibrium,
    /// The independent seller's best response to an operator action.
    BestResponse {
        /// Operator price, or "abstain".
        #[arg(long, allow_negative_numbers = true)]
        pm: String,
        /// Operator inventory.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        qm: f64,
    },
    /// Solve over a one- or two-dimensional parameter grid and write CSV.
    Sweep {
        /// Inner axis, name:min:max:points (e.g. c_I:0:10:200).
        #[arg(long)]
        x: String,
        /// Outer axis, same format.
        #[arg(long)]
        y: Option<String>,
    },
    /// Compare the solvers with brute-force grid search.
    Verify {
        /// Random operator actions checked for the best response.
        #[arg(long, default_value_t = 500)]
        samples: usize,
    },
    /// Monte-Carlo arrival simulation of rationing at a stocked-out price.
    Simulate {
        #[arg(long, allow_negative_numbers = true)]
        p_low: f64,
        #[arg(long, allow_negative_numbers = true)]
        q_low: f64,
        #[arg(long, allow_negative_numbers = true)]
        p_eval: f64,
    },
    /// Consumer surplus and welfare at equilibrium against the sole-seller benchmark.
    Welfare,
}
