//! Parsing of the small command-line value languages.

use std::fmt;
use std::str::FromStr;

use cograte::optimizer::{lin_space, log_space};

/// `log:lo:hi:n`, `lin:lo:hi:n` or `single:v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MuGrid {
    Log { lo: f64, hi: f64, n: usize },
    Lin { lo: f64, hi: f64, n: usize },
    Single(f64),
}

impl MuGrid {
    pub fn values(&self) -> Vec<f64> {
        match *self {
            MuGrid::Log { lo, hi, n } => log_space(lo, hi, n),
            MuGrid::Lin { lo, hi, n } => lin_space(lo, hi, n),
            MuGrid::Single(v) => vec![v],
        }
    }
}

impl fmt::Display for MuGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MuGrid::Log { lo, hi, n } => write!(f, "log:{lo}:{hi}:{n}"),
            MuGrid::Lin { lo, hi, n } => write!(f, "lin:{lo}:{hi}:{n}"),
            MuGrid::Single(v) => write!(f, "single:{v}"),
        }
    }
}

fn number(s: &str, what: &str) -> Result<f64, String> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("{what}: `{s}` is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{what}: `{s}` is not finite"))
    }
}

impl FromStr for MuGrid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let grid = match parts.as_slice() {
            ["single", v] => MuGrid::Single(number(v, "mu")?),
            [kind @ ("log" | "lin"), lo, hi, n] => {
                let lo = number(lo, "mu grid start")?;
                let hi = number(hi, "mu grid end")?;
                let n: usize = n
                    .trim()
                    .parse()
                    .map_err(|_| format!("mu grid size `{n}` is not a positive integer"))?;
                if n == 0 {
                    return Err("mu grid size must be at least 1".into());
                }
                if hi < lo {
                    return Err(format!("mu grid end {hi} is below its start {lo}"));
                }
                if *kind == "log" {
                    if lo <= 0.0 {
                        return Err("log mu grid needs a positive start".into());
                    }
                    MuGrid::Log { lo, hi, n }
                } else {
                    MuGrid::Lin { lo, hi, n }
                }
            }
            _ => {
                return Err(format!(
                    "bad mu grid `{s}`; expected log:lo:hi:n, lin:lo:hi:n or single:v"
                ))
            }
        };
        if grid.values().iter().any(|&m| m < 0.0) {
            return Err("mu values must be nonnegative".into());
        }
        Ok(grid)
    }
}

/// Comma-separated positive α values.
pub fn parse_alpha_list(s: &str) -> Result<Vec<f64>, String> {
    let alphas = s
        .split(',')
        .map(|a| number(a, "alpha"))
        .collect::<Result<Vec<f64>, String>>()?;
    if let Some(bad) = alphas.iter().find(|a| **a <= 0.0) {
        return Err(format!("alpha must be positive, got {bad}"));
    }
    Ok(alphas)
}

/// `LO:HI` with `0 < LO < HI`.
pub fn parse_bracket(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("bad alpha bracket `{s}`; expected LO:HI"))?;
    let (lo, hi) = (number(lo, "bracket start")?, number(hi, "bracket end")?);
    if !(lo > 0.0 && hi > lo) {
        return Err(format!("alpha bracket needs 0 < LO < HI, got {lo}:{hi}"));
    }
    Ok((lo, hi))
}
