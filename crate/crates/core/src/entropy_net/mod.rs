//! Relative-entropy nets of block-diagonal spectraplex points.
//!
//! For `m = ℓh`, the set `𝒮_m^h` holds spectraplex matrices whose only
//! nonzero entries lie in `ℓ` diagonal blocks of size `h`. With
//! `ε = max{h, ln(ℓ/n)}/n` and `N = ⌈2/ε⌉`, each block trace is rounded to a
//! multiple of `1/N` and the block itself is replaced by a nearby point of an
//! op-norm net of `(z/N)·𝒮_h`. The resulting points, mixed with `I/m`, are
//! within `ln(2m·2/N)` of every member of `𝒮_m^h` in quantum relative
//! entropy.
//!
//! The net is kept implicit: a point is a trace allocation `z` (a
//! composition of `N` into `ℓ` parts) plus one net index per nonzero block.

mod opnet;

pub use opnet::{opnorm_net_spectraplex, OpNet, MAX_BLOCK, OPNET_POINT_CAP};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{frob_inner, neg_entropy, quantum_rel_entropy, SymMatrix};
use crate::mirror::{random_weights, sample_spectraplex, MirrorSetup, StartSet};
use crate::rng;

/// Default cap on the number of net points.
pub const NET_SIZE_CAP: u128 = 10_000_000;

/// `½(Y + I/m)`.
pub fn mix_with_identity(y: &SymMatrix) -> SymMatrix {
    let m = y.dim();
    let mut out = y.scale(0.5);
    out.axpy(0.5 / m as f64, &SymMatrix::identity(m));
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct EntropyCheck {
    pub entropy: f64,
    /// `ln(2mε)`.
    pub bound: f64,
    pub op_distance: f64,
    pub holds: bool,
}

/// Checks `S(X ‖ ½(Y + I/m)) ≤ ln(2mε)` for `X, Y ∈ 𝒮_m` with
/// `‖X − Y‖_op ≤ ε` and `ε ≥ 1/m`. Inputs outside that regime are rejected.
pub fn entropy_from_op_check(x: &SymMatrix, y: &SymMatrix, eps: f64) -> Result<EntropyCheck> {
    let m = x.dim();
    if y.dim() != m {
        return Err(Error::DimMismatch { expected: m, got: y.dim() });
    }
    if !x.is_spectraplex(1e-8) || !y.is_spectraplex(1e-8) {
        return Err(Error::Domain("both arguments must lie in the spectraplex".into()));
    }
    if !(eps.is_finite() && eps * m as f64 >= 1.0 - 1e-12) {
        return Err(Error::Domain(format!("need eps >= 1/m = {}, got {eps}", 1.0 / m as f64)));
    }
    let op_distance = (x - y).op_norm();
    if op_distance > eps + 1e-12 {
        return Err(Error::Domain(format!("‖X − Y‖_op = {op_distance} exceeds eps = {eps}")));
    }
    let entropy = quantum_rel_entropy(x, &mix_with_identity(y))?;
    let bound = (2.0 * m as f64 * eps).ln();
    Ok(EntropyCheck { entropy, bound, op_distance, holds: entropy <= bound + 1e-9 })
}

/// A random `(X, Y, ε)` meeting the hypotheses of [`entropy_from_op_check`]:
/// independent pairs, interpolated pairs and equal pairs, with `ε` either the
/// tightest admissible value or inflated by up to 2×.
pub fn sample_op_triple(m: usize, rng: &mut ChaCha8Rng) -> (SymMatrix, SymMatrix, f64) {
    let y = sample_spectraplex(m, rng);
    let x = match rng.random_range(0..3) {
        0 => sample_spectraplex(m, rng),
        1 => {
            let w = sample_spectraplex(m, rng);
            let t: f64 = rng.random_range(0.0..1.0);
            let mut x = y.scale(1.0 - t);
            x.axpy(t, &w);
            x
        }
        _ => y.clone(),
    };
    let tight = (&x - &y).op_norm().max(1.0 / m as f64);
    let eps = if rng.random_bool(0.5) { tight } else { tight * rng.random_range(1.0..2.0) };
    (x, y, eps)
}

#[derive(Clone, Debug)]
struct Candidate {
    block: SymMatrix,
    /// `log(½(z/N)·block + I/(2m))`.
    log_mixed: SymMatrix,
}

#[derive(Clone, Debug)]
pub struct EntropyNet {
    pub m: usize,
    pub n: usize,
    pub h_requested: usize,
    /// Block size actually used after merging.
    pub h: usize,
    pub ell: usize,
    /// `max{h, ln(ℓ/n)}/n` for the block size used.
    pub eps: f64,
    /// `N = ⌈2/ε⌉`.
    pub grid: usize,
    /// `max{1, ln(2hm/n)}` for the requested block size.
    pub declared_error: f64,
    /// `ln(2m·2/N)`: what the construction guarantees on `𝒮_m^h`.
    pub construction_error: f64,
    /// Number of trace allocations `C(N + ℓ − 1, ℓ − 1)`.
    pub compositions: u128,
    /// Number of net points, saturating.
    pub size: u128,
    /// Block-net size for each trace level `z = 0..=N`.
    pub block_sizes: Vec<usize>,
    candidates: Vec<Vec<Candidate>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct NetSummary {
    pub m: usize,
    pub n: usize,
    pub h_requested: usize,
    pub h: usize,
    pub ell: usize,
    pub eps: f64,
    pub grid: usize,
    pub declared_error: f64,
    pub construction_error: f64,
    pub compositions: u128,
    pub size: u128,
    pub block_sizes: Vec<usize>,
}

/// A net point: the trace allocation and the chosen block-net index per
/// block, with `S(X‖Y)` for the query `X`.
#[derive(Clone, Debug, Serialize)]
pub struct NetPoint {
    pub allocation: Vec<usize>,
    pub choice: Vec<usize>,
    pub entropy: f64,
}

fn count_points(ell: usize, grid: usize, f: &[usize]) -> u128 {
    let mut cnt = vec![0u128; grid + 1];
    cnt[0] = 1;
    for _ in 0..ell {
        let mut next = vec![0u128; grid + 1];
        for s in 0..=grid {
            for z in 0..=s {
                next[s] = next[s].saturating_add(cnt[s - z].saturating_mul(f[z] as u128));
            }
        }
        cnt = next;
    }
    cnt[grid]
}

pub fn build_entropy_net(m: usize, h: usize, n: usize) -> Result<EntropyNet> {
    build_entropy_net_capped(m, h, n, NET_SIZE_CAP)
}

/// Builds the net for `𝒮_m^h` at discrepancy scale `n`.
///
/// When `hm < n`, or when the point count exceeds `cap`, blocks are merged:
/// the next multiple of `h` dividing `m` (up to [`MAX_BLOCK`]) is tried. The
/// declared error always refers to the requested `h`.
pub fn build_entropy_net_capped(m: usize, h: usize, n: usize, cap: u128) -> Result<EntropyNet> {
    if m == 0 || n == 0 || h == 0 {
        return Err(Error::InvalidParameter("m, h and n must be positive".into()));
    }
    if m % h != 0 {
        return Err(Error::InvalidParameter(format!("block size {h} does not divide m = {m}")));
    }
    if h > MAX_BLOCK {
        return Err(Error::CapExceeded(format!("block size {h} exceeds {MAX_BLOCK}")));
    }
    let declared_error = (2.0 * (h * m) as f64 / n as f64).ln().max(1.0);
    let mut rejected = Vec::new();
    for hb in (h..=MAX_BLOCK.min(m)).filter(|&b| b % h == 0 && m % b == 0) {
        if hb * m < n {
            rejected.push(format!("h = {hb}: hm < n"));
            continue;
        }
        let ell = m / hb;
        let eps = (hb as f64).max((ell as f64 / n as f64).ln()) / n as f64;
        let grid = (2.0 / eps - 1e-9).ceil() as usize;
        let compositions = count_points(ell, grid, &vec![1; grid + 1]);
        if compositions > cap {
            rejected.push(format!("h = {hb}: {compositions} trace allocations"));
            continue;
        }
        let mut nets = Vec::with_capacity(grid + 1);
        let mut failed = None;
        for z in 1..=grid {
            match opnorm_net_spectraplex(hb, 1.0 / z as f64) {
                Ok(net) => nets.push(net),
                Err(e) => {
                    failed = Some(e);
                    break;
                }
            }
        }
        if let Some(e) = failed {
            rejected.push(format!("h = {hb}: {e}"));
            continue;
        }
        let block_sizes: Vec<usize> = std::iter::once(1).chain(nets.iter().map(|n| n.len())).collect();
        let size = count_points(ell, grid, &block_sizes);
        if size > cap {
            rejected.push(format!("h = {hb}: {size} points ({compositions} allocations, largest block net {})",
                block_sizes.iter().max().unwrap()));
            continue;
        }
        let mut candidates = vec![vec![Candidate {
            block: SymMatrix::zeros(hb),
            log_mixed: SymMatrix::identity(hb).scale(-(2.0 * m as f64).ln()),
        }]];
        for (z, net) in (1..=grid).zip(nets) {
            let w = z as f64 / grid as f64;
            let cands = net
                .points
                .into_iter()
                .map(|b| {
                    let mut y = b.scale(0.5 * w);
                    y.axpy(0.5 / m as f64, &SymMatrix::identity(hb));
                    Ok(Candidate { log_mixed: y.log()?, block: b })
                })
                .collect::<Result<Vec<_>>>()?;
            candidates.push(cands);
        }
        return Ok(EntropyNet {
            m,
            n,
            h_requested: h,
            h: hb,
            ell,
            eps,
            grid,
            declared_error,
            construction_error: (4.0 * m as f64 / grid as f64).ln(),
            compositions,
            size,
            block_sizes,
            candidates,
        });
    }
    Err(Error::CapExceeded(format!(
        "no block size fits the cap of {cap} points for m = {m}, h = {h}, n = {n}: {}",
        rejected.join("; ")
    )))
}

impl EntropyNet {
    pub fn summary(&self) -> NetSummary {
        NetSummary {
            m: self.m,
            n: self.n,
            h_requested: self.h_requested,
            h: self.h,
            ell: self.ell,
            eps: self.eps,
            grid: self.grid,
            declared_error: self.declared_error,
            construction_error: self.construction_error,
            compositions: self.compositions,
            size: self.size,
            block_sizes: self.block_sizes.clone(),
        }
    }

    /// The mixed net point `½(Y₀ + I/m)` for an allocation and choice.
    pub fn point(&self, allocation: &[usize], choice: &[usize]) -> Result<SymMatrix> {
        if allocation.len() != self.ell || choice.len() != self.ell {
            return Err(Error::DimMismatch { expected: self.ell, got: allocation.len().min(choice.len()) });
        }
        if allocation.iter().sum::<usize>() != self.grid {
            return Err(Error::InvalidParameter(format!("allocation must sum to {}", self.grid)));
        }
        let blocks = allocation
            .iter()
            .zip(choice)
            .map(|(&z, &k)| {
                let c = self
                    .candidates
                    .get(z)
                    .and_then(|c| c.get(k))
                    .ok_or_else(|| Error::InvalidParameter(format!("no block candidate ({z}, {k})")))?;
                Ok(c.block.scale(z as f64 / self.grid as f64))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(mix_with_identity(&SymMatrix::block_diagonal(&blocks)))
    }

    /// Exact `min_{Y ∈ net} S(X‖Y)` by dynamic programming over trace
    /// allocations; `log Y` is block diagonal so the objective separates.
    pub fn nearest_point(&self, x: &SymMatrix) -> Result<NetPoint> {
        if x.dim() != self.m {
            return Err(Error::DimMismatch { expected: self.m, got: x.dim() });
        }
        if !x.is_spectraplex(1e-8) {
            return Err(Error::Domain("query is not in the spectraplex".into()));
        }
        let grid = self.grid;
        let mut cost = vec![vec![(0.0, 0usize); grid + 1]; self.ell];
        for (i, row) in cost.iter_mut().enumerate() {
            let xi = x.diagonal_block(i, self.h);
            for (z, cands) in self.candidates.iter().enumerate() {
                let mut best = (f64::INFINITY, 0);
                for (k, c) in cands.iter().enumerate() {
                    let v = -frob_inner(&xi, &c.log_mixed)?;
                    if v < best.0 {
                        best = (v, k);
                    }
                }
                row[z] = best;
            }
        }
        // f[i][s]: best cost of the first i blocks using total trace s.
        let mut f = vec![vec![f64::INFINITY; grid + 1]; self.ell + 1];
        let mut arg = vec![vec![0usize; grid + 1]; self.ell + 1];
        f[0][0] = 0.0;
        for i in 0..self.ell {
            for s in 0..=grid {
                for z in 0..=s {
                    let v = f[i][s - z] + cost[i][z].0;
                    if v < f[i + 1][s] {
                        f[i + 1][s] = v;
                        arg[i + 1][s] = z;
                    }
                }
            }
        }
        let mut allocation = vec![0; self.ell];
        let mut s = grid;
        for i in (0..self.ell).rev() {
            allocation[i] = arg[i + 1][s];
            s -= allocation[i];
        }
        let choice = allocation.iter().enumerate().map(|(i, &z)| cost[i][z].1).collect();
        let entropy = (neg_entropy(x) + f[self.ell][grid]).max(0.0);
        Ok(NetPoint { allocation, choice, entropy })
    }

    /// All net points, in allocation-major order. Fails above `max_points`.
    pub fn materialize(&self, max_points: usize) -> Result<Vec<SymMatrix>> {
        if self.size > max_points as u128 {
            return Err(Error::CapExceeded(format!("net has {} points, limit {max_points}", self.size)));
        }
        let mut out = Vec::with_capacity(self.size as usize);
        let mut alloc = Vec::with_capacity(self.ell);
        self.walk_allocations(&mut alloc, self.grid, &mut |a| {
            let mut choice = vec![0usize; a.len()];
            loop {
                out.push(self.point(a, &choice).expect("valid indices"));
                let mut i = 0;
                while i < a.len() {
                    choice[i] += 1;
                    if choice[i] < self.candidates[a[i]].len() {
                        break;
                    }
                    choice[i] = 0;
                    i += 1;
                }
                if i == a.len() {
                    break;
                }
            }
        });
        Ok(out)
    }

    fn walk_allocations(&self, prefix: &mut Vec<usize>, left: usize, visit: &mut dyn FnMut(&[usize])) {
        if prefix.len() + 1 == self.ell {
            prefix.push(left);
            visit(prefix);
            prefix.pop();
            return;
        }
        for z in 0..=left {
            prefix.push(z);
            self.walk_allocations(prefix, left - z, visit);
            prefix.pop();
        }
    }

    /// JSON with the summary and, when small enough, every point.
    pub fn to_json_string(&self, max_points: usize) -> Result<String> {
        let points = self.materialize(max_points)?.iter().map(|p| p.to_rows()).collect();
        Ok(serde_json::to_string(&NetFile { summary: self.summary(), points })?)
    }
}

#[derive(Serialize)]
struct NetFile {
    #[serde(flatten)]
    summary: NetSummary,
    points: Vec<Vec<Vec<f64>>>,
}

#[derive(Deserialize)]
struct NetPointsFile {
    points: Vec<Vec<Vec<f64>>>,
}

/// Reads the `points` of an exported net for use as start points.
pub fn starts_from_json(s: &str) -> Result<Vec<SymMatrix>> {
    let f: NetPointsFile = serde_json::from_str(s)?;
    f.points.iter().map(|rows| SymMatrix::from_rows(rows)).collect()
}

impl StartSet for EntropyNet {
    fn nearest(&self, setup: &dyn MirrorSetup, u: &SymMatrix) -> Result<(SymMatrix, f64)> {
        if setup.name() != "spectraplex" {
            return Err(Error::InvalidParameter(format!(
                "entropy nets are start sets for the spectraplex setup, not {}",
                setup.name()
            )));
        }
        let p = self.nearest_point(u)?;
        Ok((self.point(&p.allocation, &p.choice)?, p.entropy))
    }
}

pub trait SpectraplexSampler: Sync {
    fn dim(&self) -> usize;
    fn sample(&self, rng: &mut ChaCha8Rng) -> SymMatrix;
}

/// Members of `𝒮_m^h`: random block traces, random blocks. With `h = 1`
/// these are diagonal.
#[derive(Clone, Copy, Debug)]
pub struct BlockSampler {
    pub m: usize,
    pub h: usize,
}

impl SpectraplexSampler for BlockSampler {
    fn dim(&self) -> usize {
        self.m
    }
    fn sample(&self, rng: &mut ChaCha8Rng) -> SymMatrix {
        let w = random_weights(self.m / self.h, rng);
        let blocks: Vec<SymMatrix> = w.iter().map(|&t| sample_spectraplex(self.h, rng).scale(t)).collect();
        SymMatrix::block_diagonal(&blocks)
    }
}

/// Unrestricted members of `𝒮_m`.
#[derive(Clone, Copy, Debug)]
pub struct FullSampler {
    pub m: usize,
}

impl SpectraplexSampler for FullSampler {
    fn dim(&self) -> usize {
        self.m
    }
    fn sample(&self, rng: &mut ChaCha8Rng) -> SymMatrix {
        sample_spectraplex(self.m, rng)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NetErrorReport {
    pub trials: usize,
    pub max_entropy: f64,
    pub mean_entropy: f64,
    pub declared_error: f64,
    /// `max_entropy / declared_error`.
    pub c_net: f64,
    pub c_limit: f64,
    pub pass: bool,
}

/// `max` over sampled `X` of `min_{Y ∈ net} S(X‖Y)`, compared with
/// `c_limit · declared_error`.
pub fn net_error_sampled(
    net: &EntropyNet,
    sampler: &dyn SpectraplexSampler,
    trials: usize,
    seed: u64,
    c_limit: f64,
) -> Result<NetErrorReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    if sampler.dim() != net.m {
        return Err(Error::DimMismatch { expected: net.m, got: sampler.dim() });
    }
    let vals = (0..trials)
        .into_par_iter()
        .map(|k| {
            let mut r = rng::stream(seed, k as u64);
            net.nearest_point(&sampler.sample(&mut r)).map(|p| p.entropy)
        })
        .collect::<Result<Vec<f64>>>()?;
    let max_entropy = vals.iter().copied().fold(0.0, f64::max);
    let c_net = max_entropy / net.declared_error;
    Ok(NetErrorReport {
        trials,
        max_entropy,
        mean_entropy: vals.iter().sum::<f64>() / trials as f64,
        declared_error: net.declared_error,
        c_net,
        c_limit,
        pass: c_net <= c_limit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mirror::mirror_setup;

    /// `C(a, b)` by Pascal's rule.
    fn binom(a: usize, b: usize) -> u128 {
        let mut row = vec![1u128];
        for r in 1..=a {
            let mut next = vec![1u128; r + 1];
            for k in 1..r {
                next[k] = row[k - 1] + row[k];
            }
            row = next;
        }
        row[b]
    }

    #[test]
    fn diagonal_four() {
        let net = build_entropy_net(4, 1, 4).unwrap();
        assert_eq!(net.grid, 8);
        assert_eq!(net.compositions, 165);
        assert_eq!(net.compositions, binom(11, 3));
        assert_eq!(net.size, 165);
        assert_eq!(net.declared_error, 1.0);
        let pts = net.materialize(1000).unwrap();
        assert_eq!(pts.len(), 165);
        for p in &pts {
            assert!(p.is_spectraplex(1e-12));
            assert!(p.min_eigenvalue() >= 1.0 / 8.0 - 1e-12);
        }
    }

    #[test]
    fn single_block_of_two() {
        let net = build_entropy_net(2, 2, 4).unwrap();
        assert_eq!((net.ell, net.grid, net.compositions), (1, 4, 1));
        for p in net.materialize(1000).unwrap() {
            assert!(p.min_eigenvalue() >= 0.25 - 1e-12);
        }
        let rep = net_error_sampled(&net, &BlockSampler { m: 2, h: 2 }, 500, 3, 1.0).unwrap();
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn dp_matches_brute_force() {
        for (m, h, n) in [(4, 1, 4), (4, 2, 4), (4, 2, 8)] {
            let net = build_entropy_net(m, h, n).unwrap();
            let pts = net.materialize(100_000).unwrap();
            assert_eq!(pts.len() as u128, net.size);
            let mut r = rng::stream(11, m as u64 + h as u64);
            for k in 0..20 {
                let x = if k % 2 == 0 { BlockSampler { m, h }.sample(&mut r) } else { sample_spectraplex(m, &mut r) };
                let brute = pts.iter().map(|y| quantum_rel_entropy(&x, y).unwrap()).fold(f64::INFINITY, f64::min);
                let p = net.nearest_point(&x).unwrap();
                assert!((p.entropy - brute).abs() < 1e-9, "dp {} brute {brute}", p.entropy);
                let y = net.point(&p.allocation, &p.choice).unwrap();
                assert!((quantum_rel_entropy(&x, &y).unwrap() - p.entropy).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn identity_and_premix_points() {
        let net = build_entropy_net(8, 1, 8).unwrap();
        let u = SymMatrix::identity(8).scale(1.0 / 8.0);
        assert!(net.nearest_point(&u).unwrap().entropy < 1e-12);
        // Unmixed net points are at most ln 2 away from their mixture.
        let mut r = rng::stream(5, 0);
        for _ in 0..50 {
            let mut alloc = vec![0; 8];
            for _ in 0..net.grid {
                alloc[r.random_range(0..8)] += 1;
            }
            let y0: Vec<f64> = alloc.iter().map(|&z| z as f64 / net.grid as f64).collect();
            let x = SymMatrix::diagonal(&y0);
            assert!(net.nearest_point(&x).unwrap().entropy <= 2f64.ln() + 1e-12);
        }
    }

    #[test]
    fn construction_error_holds_on_block_members() {
        for (m, h, n) in [(8, 1, 8), (8, 2, 8), (4, 2, 2)] {
            let net = build_entropy_net(m, h, n).unwrap();
            let rep = net_error_sampled(&net, &BlockSampler { m, h }, 300, 21, 2.0).unwrap();
            assert!(rep.max_entropy <= net.construction_error + 1e-9, "{m} {h} {n}: {rep:?}");
            assert!(rep.pass, "{rep:?}");
        }
    }

    #[test]
    fn merges_when_allocations_exceed_cap() {
        let net = build_entropy_net(16, 1, 8).unwrap();
        assert_eq!((net.h_requested, net.h), (1, 2));
        assert!(net.size <= NET_SIZE_CAP);
        assert_eq!(net.declared_error, 4f64.ln());
        let unmerged = build_entropy_net_capped(16, 1, 8, u128::MAX);
        assert!(unmerged.is_ok() || matches!(unmerged, Err(Error::CapExceeded(_))));
        assert!(matches!(build_entropy_net_capped(16, 1, 8, 10), Err(Error::CapExceeded(_))));
    }

    #[test]
    fn merges_when_blocks_too_small() {
        let net = build_entropy_net(2, 1, 4).unwrap();
        assert_eq!(net.h, 2);
    }

    #[test]
    fn op_lemma_on_random_triples() {
        for m in [2, 4, 8] {
            let mut r = rng::stream(17, m as u64);
            for _ in 0..300 {
                let (x, y, eps) = sample_op_triple(m, &mut r);
                let c = entropy_from_op_check(&x, &y, eps).unwrap();
                assert!(c.holds, "m {m}: {c:?}");
            }
        }
    }

    #[test]
    fn op_lemma_rejects_bad_preconditions() {
        let x = SymMatrix::diagonal(&[1.0, 0.0, 0.0, 0.0]);
        let y = SymMatrix::diagonal(&[0.0, 1.0, 0.0, 0.0]);
        assert!(entropy_from_op_check(&x, &y, 0.5).is_err());
        assert!(entropy_from_op_check(&x, &x, 0.1).is_err());
        assert!(entropy_from_op_check(&x, &y, 1.0).unwrap().holds);
        assert!(entropy_from_op_check(&x.scale(2.0), &y, 2.0).is_err());
    }

    #[test]
    fn start_set_and_export() {
        let net = build_entropy_net(4, 1, 4).unwrap();
        let setup = mirror_setup("spectraplex").unwrap();
        let mut r = rng::stream(2, 2);
        let u = sample_spectraplex(4, &mut r);
        let (x0, d) = net.nearest(setup.as_ref(), &u).unwrap();
        assert!((setup.bregman(&u, &x0).unwrap() - d).abs() < 1e-9);
        assert!(net.nearest(mirror_setup("schatten:2").unwrap().as_ref(), &u).is_err());
        let json = net.to_json_string(1000).unwrap();
        let starts = starts_from_json(&json).unwrap();
        assert_eq!(starts.len(), 165);
        assert!(net.to_json_string(10).is_err());
    }
}
