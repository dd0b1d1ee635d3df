//! Operator-norm nets of the small spectraplex `𝒮_h`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::SymMatrix;
use crate::mirror::{haar_orthogonal, sample_spectraplex};
use crate::rng;

/// Largest block size with a net construction.
pub const MAX_BLOCK: usize = 4;

/// Point budget for a single randomized net.
pub const OPNET_POINT_CAP: usize = 200_000;

const AUDIT_SAMPLES: usize = 1000;

#[derive(Clone, Debug, Serialize)]
pub struct OpNet {
    pub h: usize,
    pub radius: f64,
    #[serde(skip)]
    pub points: Vec<SymMatrix>,
    /// True when coverage holds by construction; otherwise only the audit
    /// below backs it.
    pub exact: bool,
    /// Largest nearest-point distance seen over the audit samples.
    pub audit_max: Option<f64>,
}

impl OpNet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn distance_to(&self, x: &SymMatrix) -> f64 {
        self.points.iter().map(|p| (x - p).op_norm()).fold(f64::INFINITY, f64::min)
    }
}

/// A set `N ⊂ 𝒮_h` with `min_{Y∈N} ‖X − Y‖_op ≤ radius` for all `X ∈ 𝒮_h`.
///
/// * `h = 1`: the single point `[1]`.
/// * `h = 2`: `𝒮₂` is the disk `½I + [[u, v], [v, −u]]`, `u² + v² ≤ ¼`, and the
///   operator norm of a difference is the Euclidean distance of `(u, v)`. A
///   square grid of spacing `radius·√2`, projected onto the disk, covers it.
/// * `h = 3, 4`: sorted eigenvalue grid of mesh `radius/2` crossed with
///   random rotations, doubled until an audit over sampled targets passes.
pub fn opnorm_net_spectraplex(h: usize, radius: f64) -> Result<OpNet> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidParameter(format!("net radius must be positive, got {radius}")));
    }
    match h {
        0 => Err(Error::InvalidParameter("block size must be positive".into())),
        1 => Ok(OpNet { h, radius, points: vec![SymMatrix::identity(1)], exact: true, audit_max: None }),
        2 => Ok(OpNet { h, radius, points: disk_net(radius), exact: true, audit_max: None }),
        h if h <= MAX_BLOCK => rotation_net(h, radius),
        _ => Err(Error::CapExceeded(format!("op-norm nets support h <= {MAX_BLOCK}, got {h}"))),
    }
}

fn disk_point(u: f64, v: f64) -> SymMatrix {
    SymMatrix::from_row_major(2, &[0.5 + u, v, v, 0.5 - u]).expect("symmetric by construction")
}

fn disk_net(r: f64) -> Vec<SymMatrix> {
    if r >= 0.5 {
        return vec![disk_point(0.0, 0.0)];
    }
    let s = r * std::f64::consts::SQRT_2;
    let reach = 0.5 + r;
    let k = (reach / s).ceil() as i64;
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for i in -k..=k {
        for j in -k..=k {
            let (u, v) = (i as f64 * s, j as f64 * s);
            let norm = u.hypot(v);
            if norm > reach {
                continue;
            }
            let p = if norm > 0.5 { (0.5 * u / norm, 0.5 * v / norm) } else { (u, v) };
            if !pts.iter().any(|q| (q.0 - p.0).abs() < 1e-12 && (q.1 - p.1).abs() < 1e-12) {
                pts.push(p);
            }
        }
    }
    pts.into_iter().map(|(u, v)| disk_point(u, v)).collect()
}

/// Nonincreasing integer vectors of length `h` summing to `k`.
fn sorted_compositions(k: usize, h: usize) -> Vec<Vec<usize>> {
    fn rec(left: usize, max: usize, slots: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if slots == 0 {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for c in (0..=left.min(max)).rev() {
            if c * slots < left {
                break;
            }
            cur.push(c);
            rec(left - c, c, slots - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, k, h, &mut Vec::new(), &mut out);
    out
}

fn rotation_net(h: usize, radius: f64) -> Result<OpNet> {
    let k = (2.0 / radius).ceil() as usize;
    let spectra: Vec<Vec<f64>> =
        sorted_compositions(k, h).into_iter().map(|c| c.into_iter().map(|v| v as f64 / k as f64).collect()).collect();
    let seed = rng::derive(h as u64, radius.to_bits());
    let mut gen = rng::stream(seed, 0);
    let mut audit_rng = rng::stream(seed, 1);
    let targets: Vec<SymMatrix> = (0..AUDIT_SAMPLES).map(|_| sample_spectraplex(h, &mut audit_rng)).collect();

    let mut rotations = vec![DMatrix::identity(h, h)];
    let mut count = 8;
    loop {
        while rotations.len() < count {
            rotations.push(haar_orthogonal(h, &mut gen));
        }
        if rotations.len() * spectra.len() > OPNET_POINT_CAP {
            return Err(Error::CapExceeded(format!(
                "op-norm net for h = {h} at radius {radius} needs more than {OPNET_POINT_CAP} points"
            )));
        }
        let points: Vec<SymMatrix> = rotations
            .iter()
            .flat_map(|v| {
                spectra.iter().map(move |lam| {
                    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(lam));
                    let a = v * d * v.transpose();
                    SymMatrix::new((&a + a.transpose()) * 0.5).expect("symmetrized")
                })
            })
            .collect();
        let net = OpNet { h, radius, points, exact: false, audit_max: None };
        let worst = targets.iter().map(|x| net.distance_to(x)).fold(0.0, f64::max);
        if worst <= radius {
            return Ok(OpNet { audit_max: Some(worst), ..net });
        }
        count *= 2;
    }
}
