//! Sweep axes written `name:min:max:points`, e.g. `c_I:0:10:200`.

use std::fmt;
use std::str::FromStr;

use duopoly_core::GameParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Param {
    Theta,
    Alpha,
    K,
    CM,
    CI,
    Gamma,
}

impl Param {
    pub fn name(self) -> &'static str {
        match self {
            Param::Theta => "theta",
            Param::Alpha => "alpha",
            Param::K => "k",
            Param::CM => "c_M",
            Param::CI => "c_I",
            Param::Gamma => "gamma",
        }
    }

    pub fn set(self, params: &mut GameParams, value: f64) {
        match self {
            Param::Theta => params.theta = value,
            Param::Alpha => params.alpha = value,
            Param::K => params.k = value,
            Param::CM => params.c_m = value,
            Param::CI => params.c_i = value,
            Param::Gamma => params.gamma = value,
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Param {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "theta" => Ok(Param::Theta),
            "alpha" => Ok(Param::Alpha),
            "k" => Ok(Param::K),
            "c_M" | "c_m" | "cm" => Ok(Param::CM),
            "c_I" | "c_i" | "ci" => Ok(Param::CI),
            "gamma" => Ok(Param::Gamma),
            _ => Err(format!(
                "unknown sweep parameter {s:?} (expected theta, alpha, k, c_M, c_I or gamma)"
            )),
        }
    }
}

/// Largest accepted point count per axis.
pub const MAX_POINTS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisSpec {
    pub param: Param,
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl AxisSpec {
    /// Evenly spaced values; the last equals `max` exactly.
    pub fn values(&self) -> Vec<f64> {
        let step = (self.max - self.min) / (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                if i == self.points - 1 {
                    self.max
                } else {
                    self.min + step * i as f64
                }
            })
            .collect()
    }
}

impl fmt::Display for AxisSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}:{}:{}",
            self.param, self.min, self.max, self.points
        )
    }
}

impl FromStr for AxisSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [name, lo, hi, n] = parts[..] else {
            return Err(format!(
                "axis must look like name:min:max:points, got {s:?}"
            ));
        };
        let param: Param = name.trim().parse()?;
        let num = |t: &str, what: &str| -> Result<f64, String> {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("axis {what} must be a finite number, got {t:?}"))
        };
        let (min, max) = (num(lo, "min")?, num(hi, "max")?);
        let points: usize = n
            .trim()
            .parse()
            .map_err(|_| format!("axis point count must be a positive integer, got {n:?}"))?;
        if !(2..=MAX_POINTS).contains(&points) {
            return Err(format!(
                "an axis needs 2 to {MAX_POINTS} points, got {points}"
            ));
        }
        if min > max {
            return Err(format!("axis min {min} exceeds max {max}"));
        }
        if !(max - min).is_finite() {
            return Err(format!("axis span {min}..{max} is too wide"));
        }
        Ok(AxisSpec {
            param,
            min,
            max,
            points,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_round_trips() {
        let a: AxisSpec = "c_I:0:10:200".parse().unwrap();
        assert_eq!(a.param, Param::CI);
        assert_eq!((a.min, a.max, a.points), (0.0, 10.0, 200));
        assert_eq!(a.to_string().parse::<AxisSpec>().unwrap(), a);
        let v = a.values();
        assert_eq!(v.len(), 200);
        assert_eq!(v[0], 0.0);
        assert_eq!(v[199], 10.0);
    }

    #[test]
    fn rejects_malformed() {
        for bad in [
            "",
            "c_I:0:10",
            "c_I:0:10:1",
            "c_I:10:0:5",
            "delta:0:1:5",
            "c_I:a:1:5",
            "c_I:0:inf:5",
            "c_I:0:1:-3",
            "c_I:0:1:5:6",
            "c_I:0:1:100001",
            "c_I:-1e308:1e308:5",
        ] {
            assert!(bad.parse::<AxisSpec>().is_err(), "{bad}");
        }
    }
}
