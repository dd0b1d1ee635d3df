//! Full coloring by iterated partial coloring.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::{partial_color, PartialColoringParams};
use crate::bounds::bound_all;
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::rng;

/// Per-round target `t` as a function of the active-set size `s`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundRule {
    /// `√(s ln(2m/s))`.
    Spencer,
    /// `√(s · max(1, ln(m/s)))`.
    Conjecture,
    /// `√(s · max(1, ln(r · min(1, m/s))))`.
    LowRank,
    /// `√(s · max(1, ln(hm/s)))`.
    Block,
    /// `√(s · min(p, max(1, ln(rk)))) · k^{1/p − 1/q}` with `k = min(1, m/s)`.
    Schatten,
    Constant(f64),
    /// `coef · s^β`.
    Power { coef: f64, beta: f64 },
}

impl BoundRule {
    pub fn target(&self, inst: &Instance, s: usize) -> Result<f64> {
        let report = || bound_all(s, inst.m, inst.p, inst.q, inst.r, inst.h);
        Ok(match *self {
            BoundRule::Spencer => report()?.spencer,
            BoundRule::Conjecture => report()?.matrix_spencer_conj,
            BoundRule::LowRank => report()?.lowrank,
            BoundRule::Block => report()?.block,
            BoundRule::Schatten => report()?.schatten,
            BoundRule::Constant(c) => c,
            BoundRule::Power { coef, beta } => coef * (s as f64).powf(beta),
        })
    }

    /// For `Power`, the geometric-series total `coef · (1 − 2^{−β})^{−1} · n^β`.
    pub fn geometric_total(&self, n: usize) -> Option<f64> {
        match *self {
            BoundRule::Power { coef, beta } if beta > 0.0 => {
                Some(coef * (n as f64).powf(beta) / (1.0 - 2f64.powf(-beta)))
            }
            _ => None,
        }
    }
}

impl fmt::Display for BoundRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundRule::Spencer => f.write_str("spencer"),
            BoundRule::Conjecture => f.write_str("conjecture"),
            BoundRule::LowRank => f.write_str("lowrank"),
            BoundRule::Block => f.write_str("block"),
            BoundRule::Schatten => f.write_str("schatten"),
            BoundRule::Constant(c) => write!(f, "const:{c}"),
            BoundRule::Power { coef, beta } => write!(f, "power:{coef}:{beta}"),
        }
    }
}

impl FromStr for BoundRule {
    type Err = Error;

    /// `spencer | conjecture | lowrank | block | schatten | const:<c> | power:<coef>:<beta>`
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad bound rule `{s}`"));
        let num = |v: &str| v.parse::<f64>().map_err(|_| bad());
        let parts: Vec<&str> = s.trim().split(':').collect();
        let rule = match parts.as_slice() {
            ["spencer"] => BoundRule::Spencer,
            ["conjecture"] => BoundRule::Conjecture,
            ["lowrank"] => BoundRule::LowRank,
            ["block"] => BoundRule::Block,
            ["schatten"] => BoundRule::Schatten,
            ["const", c] => BoundRule::Constant(num(c)?),
            ["power", c, b] => BoundRule::Power { coef: num(c)?, beta: num(b)? },
            _ => return Err(bad()),
        };
        match rule {
            BoundRule::Constant(c) | BoundRule::Power { coef: c, .. } if !(c > 0.0 && c.is_finite()) => Err(bad()),
            _ => Ok(rule),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RoundRecord {
    /// 1-based; the cleanup step is recorded as round `rounds + 1`.
    pub round: usize,
    pub active_before: usize,
    pub t: f64,
    pub t_final: f64,
    pub retries: usize,
    pub value: f64,
    pub c: f64,
    pub newly_frozen: usize,
    pub cleanup: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FullColoringReport {
    pub x: Vec<f64>,
    pub value: f64,
    pub rounds: Vec<RoundRecord>,
    /// `Σ` of per-round increment discrepancies; bounds `value`.
    pub round_sum: f64,
    /// Worst per-round `value / t`.
    pub max_c: f64,
    /// `value / geometric_total` for power-law rules.
    pub geometric_ratio: Option<f64>,
}

/// Runs `⌊log₂ n⌋` partial-coloring rounds on the shrinking active set, then
/// rounds any leftover fractional coordinate to the sign of its value.
pub fn full_color(inst: &Instance, rule: &BoundRule, params: &PartialColoringParams) -> Result<FullColoringReport> {
    params.validate()?;
    let n = inst.n;
    let q = inst.q;
    if inst.is_all_zero() {
        return Ok(FullColoringReport {
            x: vec![1.0; n],
            value: 0.0,
            rounds: Vec::new(),
            round_sum: 0.0,
            max_c: 0.0,
            geometric_ratio: rule.geometric_total(n).map(|_| 0.0),
        });
    }
    let rounds = usize::BITS as usize - 1 - n.leading_zeros() as usize;
    let delta = params.delta_freeze;
    let mut y = vec![0.0; n];
    let mut records = Vec::new();
    let mut round_sum = 0.0;
    let mut max_c: f64 = 0.0;

    for round in 1..=rounds {
        let active = y.iter().filter(|v: &&f64| v.abs() < 1.0 - delta).count();
        if active == 0 {
            break;
        }
        let t = rule.target(inst, active)?;
        let round_params = PartialColoringParams { seed: rng::derive(params.seed, round as u64), ..params.clone() };
        let rep = partial_color(inst, t, Some(&y), &round_params)?;
        if !rep.success {
            return Err(Error::ColoringFailed {
                round,
                reason: rep.message.unwrap_or_else(|| "fewer than half the coordinates froze".into()),
            });
        }
        for (yi, xi) in y.iter_mut().zip(&rep.coloring.x) {
            *yi += xi;
        }
        // Frozen coordinates are exactly ±1 after snapping; keep them that way.
        for &i in &rep.coloring.frozen {
            y[i] = y[i].signum();
        }
        round_sum += rep.value;
        max_c = max_c.max(rep.c);
        records.push(RoundRecord {
            round,
            active_before: active,
            t,
            t_final: rep.t_final,
            retries: rep.retries,
            value: rep.value,
            c: rep.c,
            newly_frozen: rep.newly_frozen,
            cleanup: false,
        });
    }

    let leftover: Vec<usize> = (0..n).filter(|&i| y[i].abs() != 1.0).collect();
    if !leftover.is_empty() {
        let d: Vec<f64> = leftover.iter().map(|&i| if y[i] < 0.0 { -1.0 - y[i] } else { 1.0 - y[i] }).collect();
        let value = inst.partial_combination(&leftover, &d).schatten_norm(q);
        for (&i, di) in leftover.iter().zip(&d) {
            y[i] += di;
            y[i] = y[i].signum();
        }
        round_sum += value;
        records.push(RoundRecord {
            round: records.len() + 1,
            active_before: leftover.len(),
            t: 0.0,
            t_final: 0.0,
            retries: 0,
            value,
            c: 0.0,
            newly_frozen: leftover.len(),
            cleanup: true,
        });
    }

    let value = inst.combination(&y)?.schatten_norm(q);
    let geometric_ratio = rule.geometric_total(n).map(|g| value / g);
    Ok(FullColoringReport { x: y, value, rounds: records, round_sum, max_c, geometric_ratio })
}
