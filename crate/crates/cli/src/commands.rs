//! One function per subcommand; each returns the text to emit.

use duopoly_core::{
    key_prices, simulate_arrivals, thresholds, welfare_report, Action, EquilibriumResult,
    GameParams, Price, SimConfig,
};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::axis::AxisSpec;
use crate::config::RunConfig;
use crate::error::CliError;
use crate::format::{self, cell, num, params_json, price, price_cell};
use crate::verify::{verify, Solver};

/// Command output, plus a failure to report after it is written.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Output {
    pub body: String,
    /// Metadata written next to `--out` (sweeps only).
    pub sidecar: Option<String>,
    pub failure: Option<String>,
}

impl Output {
    fn text(body: String) -> Self {
        Output {
            body,
            ..Output::default()
        }
    }
}

pub fn equilibrium<S: Solver>(cfg: &RunConfig, solver: &S) -> Result<Output, CliError> {
    let eq = solver.equilibrium(&cfg.params, &cfg.solver)?;
    Ok(Output::text(format::to_pretty(&format::equilibrium_json(
        &cfg.params,
        &eq,
        cfg.precision,
    ))))
}

pub fn best_response<S: Solver>(
    cfg: &RunConfig,
    solver: &S,
    pm: &str,
    qm: f64,
) -> Result<Output, CliError> {
    let p_m: Price = pm.parse()?;
    let br = solver.best_response(p_m, qm, &cfg.params)?;
    let prec = cfg.precision;
    let mut record = json!({
        "params": params_json(&cfg.params, prec),
        "key_prices": format::key_prices_json(&cfg.params, prec),
        "operator": format::action_json(&Action::new(p_m, qm)?, prec),
        "response": format::response_json(&br, prec),
    });
    let kp = key_prices(&cfg.params);
    if let (Price::At(p), false) = (p_m, kp.is_trivial()) {
        if p <= cfg.params.theta {
            let th = thresholds(p, qm.min(cfg.params.theta - p), &cfg.params)?;
            record["thresholds"] = json!({
                "q_dagger": th.q_dagger.map_or(Value::Null, |q| num(q, prec)),
                "q_ddagger": num(th.q_ddagger, prec),
                "p_wait": num(th.p_wait, prec),
            });
        }
    }
    Ok(Output::text(format::to_pretty(&record)))
}

pub const SWEEP_COLUMNS: [&str; 16] = [
    "c_M",
    "c_I",
    "alpha",
    "k",
    "theta",
    "gamma",
    "rationing",
    "regime",
    "p_M",
    "q_M",
    "p_I",
    "q_I",
    "u_M",
    "u_I",
    "cs",
    "welfare",
];

/// Largest accepted sweep, in cells.
pub const MAX_CELLS: usize = 1_000_000;

/// Parameter grid, row-major: `y` outer, `x` inner.
pub fn sweep_cells(
    base: &GameParams,
    x: &AxisSpec,
    y: Option<&AxisSpec>,
) -> Result<Vec<GameParams>, CliError> {
    if let Some(y) = y {
        if y.param == x.param {
            return Err(CliError::BadInput(format!(
                "sweep axes must differ, both are {}",
                x.param
            )));
        }
    }
    let cells = x.points.saturating_mul(y.map_or(1, |y| y.points));
    if cells > MAX_CELLS {
        return Err(CliError::BadInput(format!(
            "sweep has {cells} cells, the limit is {MAX_CELLS}"
        )));
    }
    let xs = x.values();
    let ys = y.map_or(vec![f64::NAN], |y| y.values());
    let mut cells = Vec::with_capacity(xs.len() * ys.len());
    for &yv in &ys {
        for &xv in &xs {
            let mut p = *base;
            if let Some(y) = y {
                y.param.set(&mut p, yv);
            }
            x.param.set(&mut p, xv);
            cells.push(p.validated()?);
        }
    }
    Ok(cells)
}

fn sweep_row(p: &GameParams, eq: &EquilibriumResult, cfg: &RunConfig) -> String {
    let prec = cfg.precision;
    let c = |x: f64| cell(Some(x), prec);
    let fields = [
        c(p.c_m),
        c(p.c_i),
        c(p.alpha),
        c(p.k),
        c(p.theta),
        c(p.gamma),
        p.rationing.as_str().to_string(),
        eq.regime.as_str().to_string(),
        price_cell(eq.action_m.price, prec),
        c(eq.action_m.quantity),
        price_cell(eq.response_i.action.price, prec),
        c(eq.response_i.action.quantity),
        c(eq.u_m),
        c(eq.u_i),
        cell(eq.cs, prec),
        cell(eq.welfare, prec),
    ];
    fields.join(",")
}

pub fn sweep<S: Solver>(
    cfg: &RunConfig,
    solver: &S,
    x: &str,
    y: Option<&str>,
) -> Result<Output, CliError> {
    let x: AxisSpec = x.parse().map_err(CliError::BadInput)?;
    let y: Option<AxisSpec> = y.map(str::parse).transpose().map_err(CliError::BadInput)?;
    let cells = sweep_cells(&cfg.params, &x, y.as_ref())?;
    let results = cells
        .par_iter()
        .map(|p| solver.equilibrium(p, &cfg.solver))
        .collect::<duopoly_core::Result<Vec<_>>>()?;

    let mut body = SWEEP_COLUMNS.join(",");
    body.push('\n');
    for (p, eq) in cells.iter().zip(&results) {
        body.push_str(&sweep_row(p, eq, cfg));
        body.push('\n');
    }

    let axis = |a: &AxisSpec| {
        json!({
            "param": a.param.name(),
            "min": a.min,
            "max": a.max,
            "points": a.points,
        })
    };
    let meta = json!({
        "columns": SWEEP_COLUMNS,
        "rows": cells.len(),
        "order": "row-major: y outer, x inner",
        "x": axis(&x),
        "y": y.as_ref().map_or(Value::Null, axis),
        "fixed": params_json(&cfg.params, cfg.precision),
        "solver": {
            "epsilon_report": cfg.solver.epsilon_report,
            "price_grid": cfg.solver.price_grid,
            "refine_tol": cfg.solver.refine_tol,
            "safety_grid": cfg.solver.safety_grid,
        },
        "precision": match cfg.precision {
            crate::config::Precision::Full => json!("full"),
            crate::config::Precision::Digits(d) => json!(d),
        },
    });
    Ok(Output {
        body,
        sidecar: Some(format::to_pretty(&meta)),
        failure: None,
    })
}

pub fn verify_with<S: Solver>(
    cfg: &RunConfig,
    solver: &S,
    samples: usize,
) -> Result<Output, CliError> {
    let report = verify(
        solver,
        &cfg.params,
        &cfg.solver,
        &cfg.oracle,
        samples,
        cfg.seed,
    )?;
    let prec = cfg.precision;
    let passed = report.passed();
    let record = json!({
        "params": params_json(&cfg.params, prec),
        "oracle_grid": {
            "price_points": cfg.oracle.price_points,
            "quantity_points": cfg.oracle.quantity_points,
        },
        "bound": num(report.bound, prec),
        "best_response": {
            "samples": report.samples,
            "max_gap": num(report.br_max_gap, prec),
            "label_mismatches": report.label_mismatches,
        },
        "equilibrium": {
            "solver_u_M": num(report.eq_solver_u_m, prec),
            "oracle_u_M": num(report.eq_oracle_u_m, prec),
            "gap": num(report.eq_gap, prec),
        },
        "pass": passed,
    });
    Ok(Output {
        body: format::to_pretty(&record),
        sidecar: None,
        failure: (!passed).then(|| {
            format!(
                "gap {} exceeds bound {}",
                report.br_max_gap.max(report.eq_gap),
                report.bound
            )
        }),
    })
}

pub fn simulate(cfg: &RunConfig, p_low: f64, q_low: f64, p_eval: f64) -> Result<Output, CliError> {
    let trials = cfg.trials.unwrap_or(100_000);
    let sim = SimConfig::new(cfg.params.theta, p_low, q_low, p_eval, trials, cfg.seed)?;
    let r = simulate_arrivals(&sim)?;
    let prec = cfg.precision;
    let record = json!({
        "theta": sim.theta_int,
        "p_low": num(p_low, prec),
        "q_low": sim.q_low,
        "p_eval": num(p_eval, prec),
        "trials": trials,
        "seed": cfg.seed,
        "mc_mean": num(r.mc_mean, prec),
        "mc_stderr": num(r.mc_stderr, prec),
        "closed_form": num(r.closed_form, prec),
        "proportional_value": num(r.proportional_value, prec),
    });
    Ok(Output::text(format::to_pretty(&record)))
}

pub fn welfare<S: Solver>(cfg: &RunConfig, solver: &S) -> Result<Output, CliError> {
    let eq = solver.equilibrium(&cfg.params, &cfg.solver)?;
    let w = welfare_report(&eq, &cfg.params)?;
    let prec = cfg.precision;
    let record = json!({
        "params": params_json(&cfg.params, prec),
        "regime": eq.regime.as_str(),
        "operator": format::action_json(&eq.action_m, prec),
        "independent_price": price(eq.response_i.action.price, prec),
        "cs": num(w.cs, prec),
        "u_M": num(w.u_m, prec),
        "u_I": num(w.u_i, prec),
        "welfare": num(w.welfare, prec),
        "cs_baseline": num(w.cs_baseline, prec),
        "u_I_baseline": num(w.u_i_baseline, prec),
        "welfare_baseline": num(w.welfare_baseline, prec),
        "delta_cs": num(w.cs - w.cs_baseline, prec),
        "delta_welfare": num(w.welfare - w.welfare_baseline, prec),
    });
    Ok(Output::text(format::to_pretty(&record)))
}
