//! Interchangeable full-coloring algorithms, looked up by name.

use std::sync::OnceLock;

use rand::Rng;
use serde::Serialize;

use super::{brute_force_min, full_color, BoundRule, FullColoringReport, PartialColoringParams};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::linalg::Exponent;
use crate::rng;

#[derive(Clone, Debug)]
pub struct SolveParams {
    pub q: Exponent,
    pub rule: BoundRule,
    pub partial: PartialColoringParams,
    /// Number of sign vectors tried by the `random` strategy.
    pub random_trials: usize,
}

impl Default for SolveParams {
    fn default() -> Self {
        SolveParams {
            q: Exponent::INF,
            rule: BoundRule::Spencer,
            partial: PartialColoringParams::default(),
            random_trials: 64,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveOutput {
    pub strategy: &'static str,
    pub x: Vec<f64>,
    pub value: f64,
    /// Round-by-round trace when the strategy iterates partial colorings.
    pub full: Option<FullColoringReport>,
}

pub trait ColoringStrategy: Send + Sync {
    fn name(&self) -> &'static str;
    fn summary(&self) -> &'static str;
    /// Returns a sign vector and its `S_q` discrepancy.
    fn solve(&self, inst: &Instance, params: &SolveParams) -> Result<SolveOutput>;
}

struct GaussianProjection;
struct RandomSigns;
struct BruteForce;

impl ColoringStrategy for GaussianProjection {
    fn name(&self) -> &'static str {
        "gaussian-projection"
    }
    fn summary(&self) -> &'static str {
        "iterated partial colorings from Gaussian projection onto the discrepancy body"
    }
    fn solve(&self, inst: &Instance, params: &SolveParams) -> Result<SolveOutput> {
        let mut inst = inst.clone();
        inst.q = params.q;
        let rep = full_color(&inst, &params.rule, &params.partial)?;
        Ok(SolveOutput { strategy: self.name(), x: rep.x.clone(), value: rep.value, full: Some(rep) })
    }
}

impl ColoringStrategy for RandomSigns {
    fn name(&self) -> &'static str {
        "random"
    }
    fn summary(&self) -> &'static str {
        "best of K uniformly random sign vectors"
    }
    fn solve(&self, inst: &Instance, params: &SolveParams) -> Result<SolveOutput> {
        if params.random_trials == 0 {
            return Err(Error::InvalidParameter("random_trials must be positive".into()));
        }
        let mut r = rng::stream(params.partial.seed, 0x726e64);
        let mut best: Option<(f64, Vec<f64>)> = None;
        for _ in 0..params.random_trials {
            let x: Vec<f64> = (0..inst.n).map(|_| if r.random_bool(0.5) { 1.0 } else { -1.0 }).collect();
            let v = inst.combination(&x)?.schatten_norm(params.q);
            if best.as_ref().is_none_or(|b| v < b.0) {
                best = Some((v, x));
            }
        }
        let (value, x) = best.expect("trials > 0");
        Ok(SolveOutput { strategy: self.name(), x, value, full: None })
    }
}

impl ColoringStrategy for BruteForce {
    fn name(&self) -> &'static str {
        "brute-force"
    }
    fn summary(&self) -> &'static str {
        "exact minimum over all sign vectors (n <= 22)"
    }
    fn solve(&self, inst: &Instance, params: &SolveParams) -> Result<SolveOutput> {
        let (x, value) = brute_force_min(inst, params.q)?;
        Ok(SolveOutput { strategy: self.name(), x, value, full: None })
    }
}

fn registry() -> &'static [Box<dyn ColoringStrategy>] {
    static STRATEGIES: OnceLock<Vec<Box<dyn ColoringStrategy>>> = OnceLock::new();
    STRATEGIES.get_or_init(|| vec![Box::new(GaussianProjection), Box::new(RandomSigns), Box::new(BruteForce)])
}

pub fn coloring_strategy(name: &str) -> Result<&'static dyn ColoringStrategy> {
    registry()
        .iter()
        .find(|s| s.name() == name)
        .map(|s| s.as_ref())
        .ok_or_else(|| Error::UnknownStrategy {
            kind: "coloring strategy",
            name: name.to_string(),
            available: coloring_strategies().join(", "),
        })
}

pub fn coloring_strategies() -> Vec<&'static str> {
    registry().iter().map(|s| s.name()).collect()
}
