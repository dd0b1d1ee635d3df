//! Mirror descent on `f_U(X) = maxᵢ |⟨Aᵢ, X − U⟩|` and the covering nets it
//! induces.
//!
//! Iterates depend only on the start and on the running gradient sum, so a
//! run is summarized by `(X₀, Σ gₜ, η)` and the set of points reachable in
//! `n` steps is indexed by gradient multisets.

mod cover;
mod setups;

pub use cover::{enumerate_cover, net_size_bound, sampled_cover_radius, NetCover, NetSizeBound, COVER_CAP};
pub use setups::{mirror_setup, mirror_setup_names, sample_spectraplex, MirrorSetup, SchattenSetup, Spectraplex};
pub(crate) use setups::{haar_orthogonal, random_weights};

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::linalg::SymMatrix;
use crate::rng;

/// Slack added to the mirror-descent guarantee when checking it.
pub const MD_SLACK: f64 = 1e-6;

/// `η = (1/L)·√(2ρD/T)`.
pub fn eta_for(lipschitz: f64, rho: f64, d_max: f64, t: usize) -> f64 {
    (2.0 * rho * d_max / t as f64).sqrt() / lipschitz
}

/// `L·√(2D/(ρT))`.
pub fn md_guarantee(lipschitz: f64, rho: f64, d: f64, t: usize) -> f64 {
    lipschitz * (2.0 * d / (rho * t as f64)).sqrt()
}

/// `maxᵢ ‖Aᵢ‖` in the setup's dual norm: the Lipschitz constant of `f_U`.
pub fn lipschitz(inst: &Instance, setup: &dyn MirrorSetup) -> f64 {
    let e = setup.dual_exponent();
    inst.matrices.iter().map(|a| a.schatten_norm(e)).fold(0.0, f64::max)
}

pub struct MirrorState {
    pub setup: Arc<dyn MirrorSetup>,
    pub x0: SymMatrix,
    dual0: SymMatrix,
    pub grad_sum: SymMatrix,
    pub eta: f64,
    pub t_step: usize,
    pub budget: usize,
    pub d_max: f64,
    pub lipschitz: f64,
}

impl MirrorState {
    pub fn new(setup: Arc<dyn MirrorSetup>, x0: SymMatrix, eta: f64, budget: usize, d_max: f64, lipschitz: f64) -> Result<Self> {
        setup.check_start(&x0)?;
        if !(eta >= 0.0 && eta.is_finite()) {
            return Err(Error::InvalidParameter(format!("step size must be finite and nonnegative, got {eta}")));
        }
        let dual0 = setup.mirror(&x0)?;
        let m = x0.dim();
        Ok(MirrorState { setup, x0, dual0, grad_sum: SymMatrix::zeros(m), eta, t_step: 0, budget, d_max, lipschitz })
    }

    pub fn rho(&self) -> f64 {
        self.setup.rho()
    }

    /// Adds `c·G` to the gradient sum.
    pub fn push(&mut self, c: f64, g: &SymMatrix) {
        self.grad_sum.axpy(c, g);
        self.t_step += 1;
    }

    pub fn iterate(&self) -> SymMatrix {
        md_iterate(self)
    }
}

/// `X = (∇Φ)^{−1}(∇Φ(X₀) − η Σ gₜ)`.
pub fn md_iterate(state: &MirrorState) -> SymMatrix {
    iterate_from(state.setup.as_ref(), &state.dual0, &state.grad_sum, state.eta)
}

fn iterate_from(setup: &dyn MirrorSetup, dual0: &SymMatrix, grad_sum: &SymMatrix, eta: f64) -> SymMatrix {
    let mut y = dual0.clone();
    y.axpy(-eta, grad_sum);
    setup.mirror_inv(&y)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Subgradient {
    /// 0-based index of the maximizing matrix.
    pub index: usize,
    pub sign: f64,
    pub value: f64,
}

/// `argmaxᵢ |⟨Aᵢ, X − U⟩|` with the sign of the winning inner product,
/// lowest index on ties, `+1` on an exact zero.
pub fn subgrad_fu(inst: &Instance, x: &SymMatrix, u: &SymMatrix) -> Result<Subgradient> {
    let ix = inst.image(x)?;
    let iu = inst.image(u)?;
    Ok(subgrad_from_images(&ix, &iu))
}

fn subgrad_from_images(ix: &[f64], iu: &[f64]) -> Subgradient {
    let mut best = Subgradient { index: 0, sign: 1.0, value: f64::NEG_INFINITY };
    for (i, (a, b)) in ix.iter().zip(iu).enumerate() {
        let d = a - b;
        if d.abs() > best.value {
            best = Subgradient { index: i, sign: if d < 0.0 { -1.0 } else { 1.0 }, value: d.abs() };
        }
    }
    best
}

#[derive(Clone, Debug, Serialize)]
pub struct MdRun {
    pub setup: String,
    pub best_value: f64,
    pub best_step: usize,
    /// `L·√(2D/(ρT))`.
    pub bound: f64,
    pub d: f64,
    pub eta: f64,
    pub lipschitz: f64,
    pub steps: usize,
    /// `f_U(X_s)` for `s = 0..=steps`.
    pub values: Vec<f64>,
    /// Signed gradient choices `(index, sign)` in order.
    pub gradients: Vec<(usize, f64)>,
}

impl MdRun {
    pub fn within_bound(&self) -> bool {
        self.best_value <= self.bound + MD_SLACK
    }
}

/// Runs `T` mirror-descent steps on `f_U` from `X₀` and reports
/// `min_{0≤s≤T} f_U(X_s)` against the guarantee.
///
/// `d = None` uses the exact `D_Φ(U, X₀)`; the step size is tuned to it.
pub fn md_minimize(
    inst: &Instance,
    u: &SymMatrix,
    x0: &SymMatrix,
    setup: Arc<dyn MirrorSetup>,
    t: usize,
    d: Option<f64>,
) -> Result<MdRun> {
    if t == 0 {
        return Err(Error::InvalidParameter("iteration budget T must be positive".into()));
    }
    if !setup.is_feasible(u, 1e-8) {
        return Err(Error::Domain(format!("U is not in the feasible set of the {} setup", setup.name())));
    }
    let d = match d {
        Some(d) => d,
        None => setup.bregman(u, x0)?,
    };
    let lip = lipschitz(inst, setup.as_ref());
    let rho = setup.rho();
    let bound = md_guarantee(lip, rho, d, t);
    let iu = inst.image(u)?;
    let f0 = subgrad_from_images(&inst.image(x0)?, &iu);
    let mut run = MdRun {
        setup: setup.name(),
        best_value: f0.value,
        best_step: 0,
        bound,
        d,
        eta: 0.0,
        lipschitz: lip,
        steps: 0,
        values: vec![f0.value],
        gradients: Vec::new(),
    };
    if d == 0.0 || lip == 0.0 || f0.value == 0.0 {
        return Ok(run);
    }
    let eta = eta_for(lip, rho, d, t);
    run.eta = eta;
    let mut state = MirrorState::new(setup, x0.clone(), eta, t, d, lip)?;
    let mut sg = f0;
    for s in 1..=t {
        state.push(sg.sign, &inst.matrices[sg.index]);
        run.gradients.push((sg.index, sg.sign));
        let x = state.iterate();
        sg = subgrad_from_images(&inst.image(&x)?, &iu);
        run.values.push(sg.value);
        if sg.value < run.best_value {
            run.best_value = sg.value;
            run.best_step = s;
        }
    }
    run.steps = t;
    Ok(run)
}

/// Replays a recorded gradient sequence (in any order) from `X₀`.
pub fn replay(inst: &Instance, x0: &SymMatrix, setup: Arc<dyn MirrorSetup>, eta: f64, gradients: &[(usize, f64)]) -> Result<SymMatrix> {
    let mut state = MirrorState::new(setup, x0.clone(), eta, gradients.len(), 0.0, 1.0)?;
    for &(i, s) in gradients {
        state.push(s, &inst.matrices[i]);
    }
    Ok(state.iterate())
}

/// A set of mirror-descent start points able to report the one closest to a
/// target in Bregman divergence.
pub trait StartSet: Sync {
    fn nearest(&self, setup: &dyn MirrorSetup, u: &SymMatrix) -> Result<(SymMatrix, f64)>;
}

impl StartSet for [SymMatrix] {
    fn nearest(&self, setup: &dyn MirrorSetup, u: &SymMatrix) -> Result<(SymMatrix, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for (k, x0) in self.iter().enumerate() {
            let d = setup.bregman(u, x0)?;
            if best.is_none_or(|b| d < b.1) {
                best = Some((k, d));
            }
        }
        let (k, d) = best.ok_or_else(|| Error::InvalidParameter("empty start set".into()))?;
        Ok((self[k].clone(), d))
    }
}

impl StartSet for Vec<SymMatrix> {
    fn nearest(&self, setup: &dyn MirrorSetup, u: &SymMatrix) -> Result<(SymMatrix, f64)> {
        self.as_slice().nearest(setup, u)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CoverSample {
    pub sample: usize,
    pub d: f64,
    pub best_value: f64,
    pub bound: f64,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CoverReport {
    pub setup: String,
    pub samples: usize,
    pub successes: usize,
    pub success_fraction: f64,
    /// Largest `best_value / bound` over samples with a positive bound.
    pub max_ratio: f64,
    pub records: Vec<CoverSample>,
}

/// For sampled feasible `U`, picks the start `U₀ ∈ T₀` minimizing
/// `D_Φ(U, U₀)`, runs `n` mirror-descent steps and checks the guarantee.
pub fn verify_cover_sampled(
    inst: &Instance,
    starts: &(impl StartSet + ?Sized),
    setup: Arc<dyn MirrorSetup>,
    samples: usize,
    seed: u64,
) -> Result<CoverReport> {
    let records = (0..samples)
        .into_par_iter()
        .map(|k| {
            let mut r = rng::stream(seed, k as u64);
            let u = setup.sample_feasible(inst.m, &mut r);
            let (x0, d) = starts.nearest(setup.as_ref(), &u)?;
            let run = md_minimize(inst, &u, &x0, setup.clone(), inst.n, Some(d))?;
            Ok(CoverSample { sample: k, d, best_value: run.best_value, bound: run.bound, ok: run.within_bound() })
        })
        .collect::<Result<Vec<_>>>()?;
    let successes = records.iter().filter(|r| r.ok).count();
    let max_ratio = records
        .iter()
        .filter(|r| r.bound > 0.0)
        .map(|r| r.best_value / r.bound)
        .fold(0.0, f64::max);
    Ok(CoverReport {
        setup: setup.name(),
        samples,
        successes,
        success_fraction: if samples == 0 { 1.0 } else { successes as f64 / samples as f64 },
        max_ratio,
        records,
    })
}
