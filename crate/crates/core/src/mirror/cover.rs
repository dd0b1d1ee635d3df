//! Points reachable by `n` mirror-descent steps and their count.

use std::sync::Arc;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;

use super::{eta_for, iterate_from, lipschitz, md_guarantee, MirrorSetup};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::linalg::SymMatrix;
use crate::rng;

/// Largest `n` accepted by [`enumerate_cover`].
pub const COVER_CAP: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NetSizeBound {
    /// `Σ_{t=0}^{n} C(t + 2n − 1, 2n − 1)`: multisets of at most `n` signed gradients.
    #[serde(serialize_with = "decimal")]
    pub sum: BigUint,
    /// `(n + 1)·C(3n, n)`.
    #[serde(serialize_with = "decimal")]
    pub bound: BigUint,
}

fn decimal<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

fn binomial(n: u64, k: u64) -> BigUint {
    let k = k.min(n - k);
    let mut acc = BigUint::from(1u8);
    for i in 1..=k {
        acc *= n - k + i;
        acc /= i;
    }
    acc
}

pub fn net_size_bound(n: usize) -> Result<NetSizeBound> {
    if n == 0 {
        return Err(Error::InvalidParameter("net_size_bound needs n >= 1".into()));
    }
    let n = n as u64;
    let sum = (0..=n).map(|t| binomial(t + 2 * n - 1, 2 * n - 1)).sum();
    let bound = binomial(3 * n, n) * (n + 1);
    Ok(NetSizeBound { sum, bound })
}

#[derive(Clone, Debug, Serialize)]
pub struct NetCover {
    pub setup: String,
    pub starts: usize,
    /// Number of gradient multisets per start.
    pub keys_per_start: usize,
    /// Images `𝒜(X)` of all reachable iterates, start-major.
    pub points: Vec<Vec<f64>>,
    pub eta: f64,
    pub d_max: f64,
    /// `L·√(2D/(ρn))`.
    pub radius_bound: f64,
}

impl NetCover {
    pub fn size(&self) -> usize {
        self.points.len()
    }
}

/// Count vectors over `slots` entries with total at most `budget`, in
/// lexicographic order.
fn multiset_keys(slots: usize, budget: usize) -> Vec<Vec<u8>> {
    fn rec(prefix: &mut Vec<u8>, slots: usize, left: usize, out: &mut Vec<Vec<u8>>) {
        if prefix.len() == slots {
            out.push(prefix.clone());
            return;
        }
        for c in 0..=left {
            prefix.push(c as u8);
            rec(prefix, slots, left - c, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(slots), slots, budget, &mut out);
    out
}

/// Enumerates `𝒜(X)` for every iterate reachable from each start by a
/// multiset of at most `n` gradients from `{±Aᵢ}`, with `η` tuned to `d_max`
/// and `T = n`. Multisets are identified by their integer count vectors.
pub fn enumerate_cover(
    inst: &Instance,
    starts: &[SymMatrix],
    setup: Arc<dyn MirrorSetup>,
    d_max: f64,
    n_cap: usize,
) -> Result<NetCover> {
    let n = inst.n;
    let cap = n_cap.min(COVER_CAP);
    if n > cap {
        return Err(Error::CapExceeded(format!("cover enumeration supports n <= {cap}, got {n}")));
    }
    if !(d_max > 0.0) {
        return Err(Error::InvalidParameter(format!("d_max must be positive, got {d_max}")));
    }
    let lip = lipschitz(inst, setup.as_ref());
    let rho = setup.rho();
    let eta = eta_for(lip, rho, d_max, n);
    let keys = multiset_keys(2 * n, n);
    let mut points = Vec::with_capacity(keys.len() * starts.len());
    for x0 in starts {
        setup.check_start(x0)?;
        let dual0 = setup.mirror(x0)?;
        let imgs = keys
            .par_iter()
            .map(|key| {
                let mut g = SymMatrix::zeros(inst.m);
                for (j, &c) in key.iter().enumerate() {
                    if c > 0 {
                        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                        g.axpy(sign * c as f64, &inst.matrices[j / 2]);
                    }
                }
                inst.image(&iterate_from(setup.as_ref(), &dual0, &g, eta))
            })
            .collect::<Result<Vec<_>>>()?;
        points.extend(imgs);
    }
    Ok(NetCover {
        setup: setup.name(),
        starts: starts.len(),
        keys_per_start: keys.len(),
        points,
        eta,
        d_max,
        radius_bound: md_guarantee(lip, rho, d_max, n),
    })
}

/// `max_U min_{p ∈ net} ‖𝒜(U) − p‖_∞` over `samples` feasible `U`.
pub fn sampled_cover_radius(cover: &NetCover, inst: &Instance, setup: &dyn MirrorSetup, samples: usize, seed: u64) -> Result<f64> {
    let radii = (0..samples)
        .into_par_iter()
        .map(|k| {
            let mut r = rng::stream(seed, k as u64);
            let u = setup.sample_feasible(inst.m, &mut r);
            let iu = inst.image(&u)?;
            Ok(cover
                .points
                .iter()
                .map(|p| p.iter().zip(&iu).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
                .fold(f64::INFINITY, f64::min))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(radii.into_iter().fold(0.0, f64::max))
}
