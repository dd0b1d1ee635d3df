//! Monte-Carlo Gaussian measure of discrepancy bodies
//! `{x : ‖Σ xᵢAᵢ‖_{S_q} ≤ t}`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::linalg::Exponent;
use crate::rng;

/// Independent Gaussian draws per RNG stream.
pub const BLOCK: usize = 1024;

/// `z` for a two-sided 95% interval.
const Z95: f64 = 1.96;

#[derive(Clone, Debug, Serialize)]
pub struct MeasureEstimate {
    pub n: usize,
    pub t: f64,
    /// Norm evaluations, counting both members of each `±g` pair.
    pub samples: usize,
    /// Independent Gaussian draws, `⌈samples/2⌉`.
    pub draws: usize,
    pub hits: usize,
    /// `hits/samples`, or the rule-of-three upper bound `3/draws` when
    /// censored.
    pub estimate: f64,
    /// `log₂(estimate)/n`.
    pub log2_per_coord: f64,
    /// `1.96·√(p(1−p)/draws)`.
    pub ci_halfwidth: f64,
    /// No hits: `estimate` is an upper bound, not a point estimate.
    pub censored: bool,
    /// Pairs where `g` and `−g` disagreed; zero for a symmetric body.
    pub symmetry_mismatches: usize,
    pub seed: u64,
}

/// Norms `‖Σ gᵢAᵢ‖_{S_q}` for `⌈samples/2⌉` Gaussian draws, in draw order,
/// together with the norms of the negated draws.
fn sampled_norms(inst: &Instance, q: Exponent, samples: usize, seed: u64) -> Result<Vec<(f64, f64)>> {
    let draws = samples.div_ceil(2);
    let blocks = draws.div_ceil(BLOCK);
    let per_block = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut r = rng::stream(seed, b as u64);
            let len = BLOCK.min(draws - b * BLOCK);
            (0..len)
                .map(|_| {
                    let g = rng::gaussian_vec(&mut r, inst.n);
                    let neg: Vec<f64> = g.iter().map(|v| -v).collect();
                    Ok((inst.combination(&g)?.schatten_norm(q), inst.combination(&neg)?.schatten_norm(q)))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_block.into_iter().flatten().collect())
}

fn estimate_from_norms(norms: &[(f64, f64)], n: usize, t: f64, samples: usize, seed: u64) -> MeasureEstimate {
    let draws = norms.len();
    let mut hits = 0;
    let mut symmetry_mismatches = 0;
    for (k, &(a, b)) in norms.iter().enumerate() {
        let (ha, hb) = (a <= t, b <= t);
        hits += ha as usize;
        if 2 * k + 1 < samples {
            hits += hb as usize;
        }
        symmetry_mismatches += (ha != hb) as usize;
    }
    let censored = hits == 0;
    let estimate = if censored { (3.0 / draws as f64).min(1.0) } else { hits as f64 / samples as f64 };
    let p = hits as f64 / samples as f64;
    MeasureEstimate {
        n,
        t,
        samples,
        draws,
        hits,
        estimate,
        log2_per_coord: estimate.log2() / n as f64,
        ci_halfwidth: Z95 * (p * (1.0 - p) / draws as f64).sqrt(),
        censored,
        symmetry_mismatches,
        seed,
    }
}

/// Estimates `γₙ({x : ‖Σ xᵢAᵢ‖_{S_q} ≤ t})` from antithetic `±g` pairs.
pub fn mc_gaussian_measure(inst: &Instance, t: f64, q: Exponent, samples: usize, seed: u64) -> Result<MeasureEstimate> {
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be positive".into()));
    }
    if t.is_nan() || t < 0.0 {
        return Err(Error::InvalidParameter(format!("threshold must be nonnegative, got {t}")));
    }
    let norms = sampled_norms(inst, q, samples, seed)?;
    Ok(estimate_from_norms(&norms, inst.n, t, samples, seed))
}

/// One estimate per threshold, all from the same sample set.
pub fn mc_gaussian_measure_thresholds(
    inst: &Instance,
    ts: &[f64],
    q: Exponent,
    samples: usize,
    seed: u64,
) -> Result<Vec<MeasureEstimate>> {
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be positive".into()));
    }
    let norms = sampled_norms(inst, q, samples, seed)?;
    Ok(ts.iter().map(|&t| estimate_from_norms(&norms, inst.n, t, samples, seed)).collect())
}

/// Threshold `t` as a function of the instance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ThresholdRule {
    /// `√(n ln(2m/n))`, floored at `√(n ln 2)`.
    Spencer,
    /// `c·√n`.
    Sqrt(f64),
    Constant(f64),
    Infinite,
}

impl ThresholdRule {
    pub fn threshold(&self, inst: &Instance) -> f64 {
        let n = inst.n as f64;
        match *self {
            ThresholdRule::Spencer => (n * (2.0 * inst.m as f64 / n).ln().max(2f64.ln())).sqrt(),
            ThresholdRule::Sqrt(c) => c * n.sqrt(),
            ThresholdRule::Constant(t) => t,
            ThresholdRule::Infinite => f64::INFINITY,
        }
    }
}

impl fmt::Display for ThresholdRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThresholdRule::Spencer => f.write_str("spencer"),
            ThresholdRule::Sqrt(c) => write!(f, "sqrt:{c}"),
            ThresholdRule::Constant(t) => write!(f, "const:{t}"),
            ThresholdRule::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for ThresholdRule {
    type Err = Error;

    /// `spencer | sqrt:<c> | const:<t> | inf`
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad threshold rule `{s}`"));
        let num = |v: &str| v.parse::<f64>().ok().filter(|c| *c >= 0.0 && c.is_finite()).ok_or_else(bad);
        match s.trim().split(':').collect::<Vec<_>>().as_slice() {
            ["spencer"] => Ok(ThresholdRule::Spencer),
            ["inf"] => Ok(ThresholdRule::Infinite),
            ["sqrt", c] => Ok(ThresholdRule::Sqrt(num(c)?)),
            ["const", t] => Ok(ThresholdRule::Constant(num(t)?)),
            _ => Err(bad()),
        }
    }
}

/// A CSV row of a measure run.
#[derive(Clone, Debug, Serialize)]
pub struct MeasureRow {
    pub n: usize,
    pub m: usize,
    pub p: Exponent,
    pub q: Exponent,
    pub r: Option<usize>,
    pub h: Option<usize>,
    pub t: f64,
    pub samples: usize,
    pub hits: usize,
    pub estimate: f64,
    pub log2_per_coord: f64,
    pub ci_halfwidth: f64,
    pub seed: u64,
    pub censored: bool,
}

impl MeasureRow {
    pub fn new(inst: &Instance, q: Exponent, e: &MeasureEstimate) -> Self {
        MeasureRow {
            n: inst.n,
            m: inst.m,
            p: inst.p,
            q,
            r: inst.r,
            h: inst.h,
            t: e.t,
            samples: e.samples,
            hits: e.hits,
            estimate: e.estimate,
            log2_per_coord: e.log2_per_coord,
            ci_halfwidth: e.ci_halfwidth,
            seed: e.seed,
            censored: e.censored,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExponentSweep {
    pub rows: Vec<MeasureRow>,
    pub alpha: f64,
    /// Every row resolved and `log2_per_coord ≥ −α`.
    pub bounded: bool,
    /// Largest `n` censored or below `−α`.
    pub collapsed: bool,
    /// `−min log2_per_coord`: the smallest `α` consistent with the sweep.
    pub alpha_fit: f64,
}

/// Per-coordinate log-measure across `n_list`, judged against `−α`.
pub fn measure_exponent_sweep(
    family: &(dyn Fn(usize) -> Result<Instance> + Sync),
    rule: ThresholdRule,
    n_list: &[usize],
    q: Option<Exponent>,
    samples: usize,
    seed: u64,
    alpha: f64,
) -> Result<ExponentSweep> {
    if n_list.is_empty() {
        return Err(Error::InvalidParameter("empty n list".into()));
    }
    let rows = n_list
        .iter()
        .map(|&n| {
            let inst = family(n)?;
            let q = q.unwrap_or(inst.q);
            let e = mc_gaussian_measure(&inst, rule.threshold(&inst), q, samples, rng::derive(seed, n as u64))?;
            Ok(MeasureRow::new(&inst, q, &e))
        })
        .collect::<Result<Vec<_>>>()?;
    let bounded = rows.iter().all(|r| !r.censored && r.log2_per_coord >= -alpha);
    let last = rows.last().expect("nonempty");
    let collapsed = last.censored || last.log2_per_coord < -alpha;
    let alpha_fit = -rows.iter().map(|r| r.log2_per_coord).fold(0.0, f64::min);
    Ok(ExponentSweep { rows, alpha, bounded, collapsed, alpha_fit })
}
