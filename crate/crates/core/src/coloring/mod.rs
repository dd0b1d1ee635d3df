//! Partial and full colorings.
//!
//! A partial coloring moves the active coordinates of a fractional coloring
//! `y` by an increment `x` of small discrepancy so that at least half of them
//! reach `±1`. Iterating on the remaining coordinates gives a full coloring.

mod brute;
mod full;
mod partial;
mod strategy;

pub use brute::{brute_force_min, BRUTE_FORCE_CAP};
pub use full::{full_color, BoundRule, FullColoringReport, RoundRecord};
pub use partial::{partial_color, PartialReport};
pub use strategy::{coloring_strategies, coloring_strategy, ColoringStrategy, SolveOutput, SolveParams};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An increment `x` applied on top of a shift `y`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Coloring {
    pub x: Vec<f64>,
    /// Indices with `|xᵢ + yᵢ| = 1`, ascending.
    pub frozen: Vec<usize>,
    pub y: Vec<f64>,
}

impl Coloring {
    /// `x + y`.
    pub fn combined(&self) -> Vec<f64> {
        self.x.iter().zip(&self.y).map(|(a, b)| a + b).collect()
    }

    /// Checks the cube constraint and that `frozen` is exactly the set of
    /// coordinates within `delta` of `±1`.
    pub fn check(&self, delta: f64) -> Result<()> {
        for (i, v) in self.combined().into_iter().enumerate() {
            if v.abs() > 1.0 + 1e-9 {
                return Err(Error::InvariantViolation { index: i + 1, detail: format!("|x + y| = {} exceeds 1", v.abs()) });
            }
            let at_bound = v.abs() >= 1.0 - delta;
            if at_bound != self.frozen.binary_search(&i).is_ok() {
                return Err(Error::InvariantViolation {
                    index: i + 1,
                    detail: format!("frozen set disagrees with |x + y| = {}", v.abs()),
                });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PartialColoringParams {
    /// Standard deviation of the Gaussian start point.
    pub sigma: f64,
    pub delta_freeze: f64,
    /// Oracle calls allowed per projection, as a multiple of the active count.
    pub oracle_cap_factor: usize,
    /// Relative slack accepted by the cutting-plane loop before it stops.
    pub feasibility_tol: f64,
    /// Factor applied to `t` after a failed attempt.
    pub growth: f64,
    pub max_retries: usize,
    /// Sweep cap for each inner Dykstra solve.
    pub max_sweeps: usize,
    pub seed: u64,
}

impl Default for PartialColoringParams {
    fn default() -> Self {
        PartialColoringParams {
            sigma: 3.0,
            delta_freeze: 1e-6,
            oracle_cap_factor: 50,
            feasibility_tol: 1e-3,
            growth: 1.25,
            max_retries: 8,
            max_sweeps: 5000,
            seed: 0,
        }
    }
}

impl PartialColoringParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(what.to_string()));
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return bad("sigma must be positive");
        }
        if !(self.delta_freeze > 0.0 && self.delta_freeze <= 1e-3) {
            return bad("delta_freeze must lie in (0, 1e-3]");
        }
        if self.oracle_cap_factor == 0 || self.max_sweeps == 0 {
            return bad("iteration caps must be positive");
        }
        if !(self.feasibility_tol >= 0.0) {
            return bad("feasibility_tol must be nonnegative");
        }
        if !(self.growth > 1.0) {
            return bad("growth must exceed 1");
        }
        Ok(())
    }
}
