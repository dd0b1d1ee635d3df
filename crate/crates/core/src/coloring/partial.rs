//! Partial coloring by Gaussian projection.
//!
//! Sample `g ~ N(0, σ²I)` on the active coordinates and project it onto
//! `{z : z + y ∈ [−1,1], ‖Σ zᵢAᵢ‖_{S_q} ≤ t}`. The body is only known through
//! the separation oracle, so the projection is a cutting-plane loop: project
//! onto the cube intersected with the cuts found so far (Dykstra), query the
//! oracle at the result, add the returned half-space, repeat.

use serde::Serialize;

use super::{Coloring, PartialColoringParams};
use crate::bounds::separate_matrix;
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::rng;

#[derive(Clone, Debug, Serialize)]
pub struct PartialReport {
    pub success: bool,
    pub coloring: Coloring,
    pub t_requested: f64,
    /// The target used by the returned attempt.
    pub t_final: f64,
    pub retries: usize,
    /// `‖Σ xᵢAᵢ‖_{S_q}` of the returned increment.
    pub value: f64,
    /// `value / t_requested`.
    pub c: f64,
    pub active: usize,
    pub newly_frozen: usize,
    pub oracle_calls: usize,
    pub message: Option<String>,
}

struct Cut {
    a: Vec<f64>,
    b: f64,
    lam: f64,
}

struct Attempt {
    z: Vec<f64>,
    frozen: usize,
    value: f64,
    oracle_calls: usize,
}

/// Finds an increment `x`, supported on the active coordinates of `y`
/// (those with `|yᵢ| < 1 − δ`), that freezes at least half of them.
///
/// `y = None` means the zero shift. Failure to freeze half after all retries
/// is reported through `success = false` with the best attempt attached.
pub fn partial_color(inst: &Instance, t: f64, y: Option<&[f64]>, params: &PartialColoringParams) -> Result<PartialReport> {
    params.validate()?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("target t must be positive and finite, got {t}")));
    }
    let n = inst.n;
    let y: Vec<f64> = match y {
        Some(y) if y.len() != n => return Err(Error::DimMismatch { expected: n, got: y.len() }),
        Some(y) => y.to_vec(),
        None => vec![0.0; n],
    };
    if let Some(i) = y.iter().position(|v| !(v.abs() <= 1.0)) {
        return Err(Error::InvalidParameter(format!("shift coordinate {} = {} lies outside [-1, 1]", i + 1, y[i])));
    }
    let delta = params.delta_freeze;
    let active: Vec<usize> = (0..n).filter(|&i| y[i].abs() < 1.0 - delta).collect();
    let na = active.len();

    let finish = |z: &[f64], success: bool, t_final: f64, retries: usize, calls: usize, message: Option<String>| {
        let mut x = vec![0.0; n];
        for (k, &i) in active.iter().enumerate() {
            x[i] = z[k];
        }
        let frozen: Vec<usize> = (0..n).filter(|&i| (x[i] + y[i]).abs() >= 1.0 - delta).collect();
        let newly_frozen = active.iter().filter(|i| frozen.binary_search(i).is_ok()).count();
        let value = inst.partial_combination(&active, z).schatten_norm(inst.q);
        PartialReport {
            success,
            coloring: Coloring { x, frozen, y: y.clone() },
            t_requested: t,
            t_final,
            retries,
            value,
            c: value / t,
            active: na,
            newly_frozen,
            oracle_calls: calls,
            message,
        }
    };

    if na == 0 {
        return Ok(finish(&[], true, t, 0, 0, None));
    }
    if active.iter().all(|&i| inst.matrices[i].is_zero()) {
        let z: Vec<f64> = active.iter().map(|&i| if y[i] < 0.0 { -1.0 - y[i] } else { 1.0 - y[i] }).collect();
        return Ok(finish(&z, true, t, 0, 0, None));
    }

    let mut best: Option<(Attempt, f64, usize)> = None;
    let mut calls = 0;
    for retry in 0..=params.max_retries {
        let t_k = t * params.growth.powi(retry as i32);
        let attempt = project_attempt(inst, &active, &y, t_k, rng::derive(params.seed, retry as u64), params);
        calls += attempt.oracle_calls;
        if 2 * attempt.frozen >= na {
            return Ok(finish(&attempt.z, true, t_k, retry, calls, None));
        }
        let better = match &best {
            None => true,
            Some((b, _, _)) => attempt.frozen > b.frozen || (attempt.frozen == b.frozen && attempt.value < b.value),
        };
        if better {
            best = Some((attempt, t_k, retry));
        }
    }
    let (b, t_b, retry_b) = best.expect("at least one attempt");
    let message = format!(
        "froze {} of {} active coordinates after {} retries (best attempt at t = {t_b})",
        b.frozen, na, params.max_retries
    );
    Ok(finish(&b.z, false, t_b, retry_b, calls, Some(message)))
}

fn project_attempt(
    inst: &Instance,
    active: &[usize],
    y: &[f64],
    t: f64,
    seed: u64,
    params: &PartialColoringParams,
) -> Attempt {
    let na = active.len();
    let mut r = rng::stream(seed, 0x70617274);
    let g: Vec<f64> = rng::gaussian_vec(&mut r, na).into_iter().map(|v| v * params.sigma).collect();
    let lo: Vec<f64> = active.iter().map(|&i| -1.0 - y[i]).collect();
    let hi: Vec<f64> = active.iter().map(|&i| 1.0 - y[i]).collect();

    let mut z = g;
    let mut p_box = vec![0.0; na];
    let mut cuts: Vec<Cut> = Vec::new();
    let cap = params.oracle_cap_factor * na;
    let accept = t * (1.0 + params.feasibility_tol);
    let mut calls = 0;
    while calls < cap {
        dykstra(&mut z, &mut p_box, &mut cuts, &lo, &hi, params.max_sweeps);
        let m = inst.partial_combination(active, &z);
        calls += 1;
        let sep = separate_matrix(inst, &m, accept, inst.q, Some(active));
        let Some(grad) = sep.gradient else { break };
        let norm = grad.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            break;
        }
        cuts.retain(|c| c.lam > 0.0);
        cuts.push(Cut { a: grad.iter().map(|v| v / norm).collect(), b: t / norm, lam: 0.0 });
    }
    if calls >= cap {
        // The last cut has not been applied yet.
        dykstra(&mut z, &mut p_box, &mut cuts, &lo, &hi, params.max_sweeps);
    }

    let mut frozen = 0;
    for k in 0..na {
        let v = z[k] + y[active[k]];
        if v.abs() >= 1.0 - params.delta_freeze {
            z[k] = v.signum() - y[active[k]];
            frozen += 1;
        }
    }
    let value = inst.partial_combination(active, &z).schatten_norm(inst.q);
    Attempt { z, frozen, value, oracle_calls: calls }
}

/// Dykstra's projection onto `{lo ≤ z ≤ hi} ∩ {⟨aₖ, z⟩ ≤ bₖ}`, warm-started.
///
/// Maintains `z = g − Σ λₖaₖ − p_box` for the original point `g`, so cuts with
/// `λₖ = 0` can be dropped without disturbing the iteration. The box goes
/// last, hence `z` always leaves inside the cube.
fn dykstra(z: &mut [f64], p_box: &mut [f64], cuts: &mut [Cut], lo: &[f64], hi: &[f64], max_sweeps: usize) {
    const TOL: f64 = 1e-12;
    for _ in 0..max_sweeps {
        let mut change = 0.0_f64;
        for cut in cuts.iter_mut() {
            let s: f64 = cut.a.iter().zip(z.iter()).map(|(a, v)| a * v).sum::<f64>() + cut.lam;
            let lam = (s - cut.b).max(0.0);
            let d = cut.lam - lam;
            if d != 0.0 {
                for (v, a) in z.iter_mut().zip(&cut.a) {
                    *v += d * a;
                }
                change = change.max(d.abs());
            }
            cut.lam = lam;
        }
        for k in 0..z.len() {
            let w = z[k] + p_box[k];
            let c = w.clamp(lo[k], hi[k]);
            change = change.max((c - z[k]).abs());
            z[k] = c;
            p_box[k] = w - c;
        }
        if change <= TOL {
            break;
        }
    }
}
