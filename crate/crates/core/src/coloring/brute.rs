//! Exhaustive minimum over sign vectors.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::linalg::{Exponent, SymMatrix};

pub const BRUTE_FORCE_CAP: usize = 22;

/// Exact `min_{x ∈ {±1}ⁿ} ‖Σ xᵢAᵢ‖_{S_q}`. Only vectors with `x₁ = +1` are
/// visited since the norm is invariant under `x → −x`.
///
/// The remaining `n − 1` signs are split into a prefix enumerated across
/// rayon tasks and a suffix walked in Gray-code order, so each step updates
/// the running sum by a single `±2Aᵢ`.
pub fn brute_force_min(inst: &Instance, q: Exponent) -> Result<(Vec<f64>, f64)> {
    let n = inst.n;
    if n > BRUTE_FORCE_CAP {
        return Err(Error::CapExceeded(format!("brute force supports n <= {BRUTE_FORCE_CAP}, got {n}")));
    }
    let free = n - 1;
    let prefix_bits = free.min(6);
    let walk_bits = free - prefix_bits;

    let best = (0u64..1 << prefix_bits)
        .into_par_iter()
        .map(|chunk| {
            let mut x = vec![1.0; n];
            for b in 0..prefix_bits {
                if chunk >> b & 1 == 1 {
                    x[1 + walk_bits + b] = -1.0;
                }
            }
            let mut m: SymMatrix = inst.combination(&x).expect("length matches");
            let mut best_val = m.schatten_norm(q);
            let mut best_x = x.clone();
            for step in 1u64..1 << walk_bits {
                let i = 1 + step.trailing_zeros() as usize;
                m.axpy(-2.0 * x[i], &inst.matrices[i]);
                x[i] = -x[i];
                let v = m.schatten_norm(q);
                if v < best_val {
                    best_val = v;
                    best_x.copy_from_slice(&x);
                }
            }
            (best_val, best_x)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(None::<(f64, Vec<f64>)>, |acc, cand| match acc {
            Some(a) if a.0 <= cand.0 => Some(a),
            _ => Some(cand),
        })
        .expect("at least one chunk");
    Ok((best.1, best.0))
}
