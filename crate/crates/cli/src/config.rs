//! Run settings from a config file and command-line flags.
//!
//! The file holds one `key = value` pair per line; `#` starts a comment.
//! Flags override file values, which override built-in defaults.

use std::fmt;
use std::str::FromStr;

use duopoly_core::{GameParams, OracleConfig, RationingRule, SolverConfig};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ConfigError {}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::BadInput(e.to_string())
    }
}

/// Splits config text into `(key, value)` pairs in file order.
///
/// Keys are identifiers (`[A-Za-z_][A-Za-z0-9_]*`) and may appear once.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out: Vec<(String, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |message: String| ConfigError { line, message };
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| err(format!("expected key = value, got {content:?}")))?;
        let (key, value) = (key.trim(), value.trim());
        let mut chars = key.chars();
        let valid_key = chars
            .next()
            .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !valid_key {
            return Err(err(format!("invalid key {key:?}")));
        }
        if value.is_empty() {
            return Err(err(format!("missing value for {key}")));
        }
        if out.iter().any(|(k, _)| k == key) {
            return Err(err(format!("duplicate key {key}")));
        }
        out.push((key.to_string(), value.to_string()));
    }
    Ok(out)
}

/// Significant digits in printed numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    Digits(usize),
    Full,
}

impl Default for Precision {
    fn default() -> Self {
        Precision::Digits(6)
    }
}

impl FromStr for Precision {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("full") {
            return Ok(Precision::Full);
        }
        match s.parse::<usize>() {
            Ok(d) if (1..=17).contains(&d) => Ok(Precision::Digits(d)),
            _ => Err(format!("precision must be 1-17 or \"full\", got {s:?}")),
        }
    }
}

/// Any subset of settings; unset fields fall through to the next layer.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub theta: Option<f64>,
    pub alpha: Option<f64>,
    pub k: Option<f64>,
    pub c_m: Option<f64>,
    pub c_i: Option<f64>,
    pub gamma: Option<f64>,
    pub rationing: Option<RationingRule>,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub precision: Option<Precision>,
    pub epsilon_report: Option<f64>,
    pub price_grid: Option<usize>,
    pub refine_tol: Option<f64>,
    pub safety_grid: Option<usize>,
    pub price_points: Option<usize>,
    pub quantity_points: Option<usize>,
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, CliError>
where
    T::Err: fmt::Display,
{
    value
        .parse()
        .map_err(|e| CliError::BadInput(format!("bad value {value:?} for {key}: {e}")))
}

impl Overrides {
    pub fn from_entries(entries: &[(String, String)]) -> Result<Self, CliError> {
        let mut o = Overrides::default();
        let mut seen = std::collections::HashSet::new();
        for (key, value) in entries {
            let v = value.as_str();
            let canonical = match key.to_ascii_lowercase().as_str() {
                "cm" => "c_m".to_string(),
                "ci" => "c_i".to_string(),
                other => other.to_string(),
            };
            if !seen.insert(canonical.clone()) {
                return Err(CliError::BadInput(format!(
                    "config key {key:?} is set twice"
                )));
            }
            match canonical.as_str() {
                "theta" => o.theta = Some(parse_value(key, v)?),
                "alpha" => o.alpha = Some(parse_value(key, v)?),
                "k" => o.k = Some(parse_value(key, v)?),
                "c_m" => o.c_m = Some(parse_value(key, v)?),
                "c_i" => o.c_i = Some(parse_value(key, v)?),
                "gamma" => o.gamma = Some(parse_value(key, v)?),
                "rationing" => o.rationing = Some(parse_value(key, v)?),
                "seed" => o.seed = Some(parse_value(key, v)?),
                "trials" => o.trials = Some(parse_value(key, v)?),
                "precision" => o.precision = Some(parse_value(key, v)?),
                "epsilon_report" => o.epsilon_report = Some(parse_value(key, v)?),
                "price_grid" => o.price_grid = Some(parse_value(key, v)?),
                "refine_tol" => o.refine_tol = Some(parse_value(key, v)?),
                "safety_grid" => o.safety_grid = Some(parse_value(key, v)?),
                "price_points" => o.price_points = Some(parse_value(key, v)?),
                "quantity_points" => o.quantity_points = Some(parse_value(key, v)?),
                _ => return Err(CliError::BadInput(format!("unknown config key {key:?}"))),
            }
        }
        Ok(o)
    }

    /// Fields set in `over` replace those in `self`.
    pub fn merge(self, over: Overrides) -> Overrides {
        Overrides {
            theta: over.theta.or(self.theta),
            alpha: over.alpha.or(self.alpha),
            k: over.k.or(self.k),
            c_m: over.c_m.or(self.c_m),
            c_i: over.c_i.or(self.c_i),
            gamma: over.gamma.or(self.gamma),
            rationing: over.rationing.or(self.rationing),
            seed: over.seed.or(self.seed),
            trials: over.trials.or(self.trials),
            precision: over.precision.or(self.precision),
            epsilon_report: over.epsilon_report.or(self.epsilon_report),
            price_grid: over.price_grid.or(self.price_grid),
            refine_tol: over.refine_tol.or(self.refine_tol),
            safety_grid: over.safety_grid.or(self.safety_grid),
            price_points: over.price_points.or(self.price_points),
            quantity_points: over.quantity_points.or(self.quantity_points),
        }
    }

    pub fn resolve(self) -> Result<RunConfig, CliError> {
        let d = RunConfig::default();
        let params = GameParams {
            theta: self.theta.unwrap_or(d.params.theta),
            alpha: self.alpha.unwrap_or(d.params.alpha),
            k: self.k.unwrap_or(d.params.k),
            c_m: self.c_m.unwrap_or(d.params.c_m),
            c_i: self.c_i.unwrap_or(d.params.c_i),
            gamma: self.gamma.unwrap_or(d.params.gamma),
            rationing: self.rationing.unwrap_or(d.params.rationing),
        }
        .validated()?;
        let solver = SolverConfig {
            epsilon_report: self.epsilon_report.unwrap_or(d.solver.epsilon_report),
            price_grid: self.price_grid.unwrap_or(d.solver.price_grid),
            refine_tol: self.refine_tol.unwrap_or(d.solver.refine_tol),
            safety_grid: self.safety_grid.unwrap_or(d.solver.safety_grid),
        };
        solver.validate()?;
        let oracle = OracleConfig {
            price_points: self.price_points.unwrap_or(d.oracle.price_points),
            quantity_points: self.quantity_points.unwrap_or(d.oracle.quantity_points),
            include_abstain: true,
        };
        oracle.validate()?;
        Ok(RunConfig {
            params,
            solver,
            oracle,
            seed: self.seed.unwrap_or(d.seed),
            trials: self.trials,
            precision: self.precision.unwrap_or(d.precision),
        })
    }
}

/// Fully resolved settings for one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: GameParams,
    pub solver: SolverConfig,
    pub oracle: OracleConfig,
    pub seed: u64,
    /// Left unset so each command can pick its own default.
    pub trials: Option<u64>,
    pub precision: Precision,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            params: GameParams::new(10.0, 0.2, 2.0, 3.0, 1.0)
                .expect("default parameters are valid"),
            solver: SolverConfig::default(),
            oracle: OracleConfig::default(),
            seed: 0,
            trials: None,
            precision: Precision::default(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pairs_and_comments() {
        let text = "# header\ntheta = 12\n\n  alpha=0.3 # trailing\nrationing = proportional\n";
        let got = parse_config(text).unwrap();
        assert_eq!(
            got,
            vec![
                ("theta".into(), "12".into()),
                ("alpha".into(), "0.3".into()),
                ("rationing".into(), "proportional".into()),
            ]
        );
    }

    #[test]
    fn reports_line_numbers() {
        let e = parse_config("theta = 1\nnonsense\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert_eq!(parse_config("a = 1\na = 2").unwrap_err().line, 2);
        assert!(parse_config("= 3").is_err());
        assert!(parse_config("9x = 3").is_err());
        assert!(parse_config("x =").is_err());
    }

    #[test]
    fn flags_override_file() {
        let file =
            Overrides::from_entries(&parse_config("theta = 12\nc_m = 4\n").unwrap()).unwrap();
        let flags = Overrides {
            theta: Some(20.0),
            ..Overrides::default()
        };
        let cfg = file.merge(flags).resolve().unwrap();
        assert_eq!(cfg.params.theta, 20.0);
        assert_eq!(cfg.params.c_m, 4.0);
        assert_eq!(cfg.params.alpha, 0.2);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        let unknown = parse_config("colour = red").unwrap();
        assert!(Overrides::from_entries(&unknown).is_err());
        let aliased = parse_config("cm = 1\nc_M = 2\n").unwrap();
        assert!(Overrides::from_entries(&aliased).is_err());
        let bad = parse_config("theta = ten").unwrap();
        assert!(Overrides::from_entries(&bad).is_err());
        let invalid = Overrides {
            alpha: Some(1.5),
            ..Overrides::default()
        };
        assert!(invalid.resolve().is_err());
    }

    #[test]
    fn precision_parsing() {
        assert_eq!("full".parse::<Precision>(), Ok(Precision::Full));
        assert_eq!("3".parse::<Precision>(), Ok(Precision::Digits(3)));
        assert!("0".parse::<Precision>().is_err());
        assert!("many".parse::<Precision>().is_err());
    }
}
