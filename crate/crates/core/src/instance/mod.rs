//! Matrix-discrepancy instances: a family `A₁ … Aₙ` of symmetric m×m
//! matrices with norm exponents and optional structure metadata.

mod families;
mod io;

pub use families::{
    family, family_names, gen_diagonal_spencer, gen_hadamard_lower, gen_random, gen_rank1_lower,
    gen_coordinate, general_schatten_norm, hadamard_raw, hadamard_scale, FamilySpec, InstanceFamily,
};
pub use io::{load, save, from_json_str, to_json_string, INSTANCE_EXTENSION};

use crate::error::{Error, Result};
use crate::linalg::{frob_inner, Exponent, SymMatrix};

/// Slack allowed on the `‖Aᵢ‖_{S_p} ≤ 1` normalization.
pub const NORM_SLACK: f64 = 1e-8;

/// Relative cutoff used when counting numerical rank.
pub const RANK_CUTOFF: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub n: usize,
    pub m: usize,
    /// Source exponent: every `‖Aᵢ‖_{S_p} ≤ 1`.
    pub p: Exponent,
    /// Target exponent used to measure discrepancy.
    pub q: Exponent,
    pub r: Option<usize>,
    pub h: Option<usize>,
    pub matrices: Vec<SymMatrix>,
    pub label: String,
    pub seed: Option<u64>,
}

impl Instance {
    /// Builds and validates an instance. `n` and `m` are read off the matrices.
    pub fn new(
        matrices: Vec<SymMatrix>,
        p: Exponent,
        q: Exponent,
        r: Option<usize>,
        h: Option<usize>,
        label: impl Into<String>,
        seed: Option<u64>,
    ) -> Result<Self> {
        let m = matrices.first().map(|a| a.dim()).unwrap_or(0);
        let inst = Instance { n: matrices.len(), m, p, q, r, h, matrices, label: label.into(), seed };
        inst.validate()?;
        Ok(inst)
    }

    /// Checks every instance invariant. Violations name the offending matrix
    /// by its 1-based index.
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.matrices.len() != self.n {
            return Err(Error::InvalidParameter(format!(
                "instance declares n = {} but carries {} matrices",
                self.n,
                self.matrices.len()
            )));
        }
        if self.m == 0 {
            return Err(Error::InvalidParameter("dimension m must be positive".into()));
        }
        if self.p.value() < 2.0 {
            return Err(Error::InvalidParameter(format!("source exponent p = {} must be at least 2", self.p)));
        }
        if self.p > self.q {
            return Err(Error::InvalidParameter(format!("need p <= q, got p = {}, q = {}", self.p, self.q)));
        }
        if let Some(h) = self.h {
            if h == 0 || self.m % h != 0 {
                return Err(Error::InvalidParameter(format!("block size {h} does not divide m = {}", self.m)));
            }
        }
        if let Some(r) = self.r {
            if r == 0 || r > self.m {
                return Err(Error::InvalidParameter(format!("rank bound {r} outside 1..={}", self.m)));
            }
        }
        for (i, a) in self.matrices.iter().enumerate() {
            let index = i + 1;
            if a.dim() != self.m {
                return Err(Error::InvariantViolation {
                    index,
                    detail: format!("dimension {} differs from m = {}", a.dim(), self.m),
                });
            }
            let norm = a.schatten_norm(self.p);
            if norm > 1.0 + NORM_SLACK {
                return Err(Error::InvariantViolation {
                    index,
                    detail: format!("Schatten-{} norm {norm} exceeds 1", self.p),
                });
            }
            if let Some(r) = self.r {
                let rank = numerical_rank(a);
                if rank > r {
                    return Err(Error::InvariantViolation {
                        index,
                        detail: format!("numerical rank {rank} exceeds declared bound {r}"),
                    });
                }
            }
            if let Some(h) = self.h {
                if let Some((row, col)) = off_block_entry(a, h) {
                    return Err(Error::InvariantViolation {
                        index,
                        detail: format!("entry ({row}, {col}) lies outside the {h}x{h} diagonal blocks"),
                    });
                }
            }
        }
        Ok(())
    }

    /// `Σ xᵢ Aᵢ`.
    pub fn combination(&self, x: &[f64]) -> Result<SymMatrix> {
        if x.len() != self.n {
            return Err(Error::DimMismatch { expected: self.n, got: x.len() });
        }
        Ok(SymMatrix::linear_combination(self.m, x.iter().copied().zip(&self.matrices)))
    }

    /// `Σ_{i∈S} zᵢ Aᵢ` for an index subset `S` with matching coefficients.
    pub fn partial_combination(&self, active: &[usize], z: &[f64]) -> SymMatrix {
        SymMatrix::linear_combination(self.m, z.iter().copied().zip(active.iter().map(|&i| &self.matrices[i])))
    }

    /// The evaluation map `𝒜(U) = (⟨A₁,U⟩, …, ⟨Aₙ,U⟩)`.
    pub fn image(&self, u: &SymMatrix) -> Result<Vec<f64>> {
        self.matrices.iter().map(|a| frob_inner(a, u)).collect()
    }

    pub fn is_all_zero(&self) -> bool {
        self.matrices.iter().all(SymMatrix::is_zero)
    }
}

pub fn numerical_rank(a: &SymMatrix) -> usize {
    let ev = a.eigenvalues();
    let top = ev.iter().fold(0.0_f64, |acc, &l| acc.max(l.abs()));
    if top == 0.0 {
        return 0;
    }
    ev.iter().filter(|&&l| l.abs() > RANK_CUTOFF * top).count()
}

fn off_block_entry(a: &SymMatrix, h: usize) -> Option<(usize, usize)> {
    let m = a.dim();
    for i in 0..m {
        for j in 0..m {
            if i / h != j / h && a.get(i, j) != 0.0 {
                return Some((i, j));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_norm_violation_with_index() {
        let a = SymMatrix::diagonal(&[0.5, 0.0]);
        let b = SymMatrix::diagonal(&[1.5, 0.0]);
        let err = Instance::new(vec![a, b], Exponent::INF, Exponent::INF, None, None, "bad", None).unwrap_err();
        match err {
            Error::InvariantViolation { index, detail } => {
                assert_eq!(index, 2);
                assert!(detail.contains("1.5"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_rank_and_block_violations() {
        let a = SymMatrix::diagonal(&[0.5, 0.5]);
        assert!(matches!(
            Instance::new(vec![a.clone()], Exponent::INF, Exponent::INF, Some(1), None, "", None),
            Err(Error::InvariantViolation { index: 1, .. })
        ));
        let b = SymMatrix::from_rows(&[vec![0.0, 0.5], vec![0.5, 0.0]]).unwrap();
        assert!(matches!(
            Instance::new(vec![b], Exponent::INF, Exponent::INF, None, Some(1), "", None),
            Err(Error::InvariantViolation { index: 1, .. })
        ));
        assert!(Instance::new(vec![a], Exponent::INF, Exponent::INF, None, Some(1), "", None).is_ok());
    }

    #[test]
    fn rejects_p_greater_than_q() {
        let a = SymMatrix::diagonal(&[0.5, 0.0]);
        assert!(Instance::new(vec![a], Exponent::INF, Exponent::TWO, None, None, "", None).is_err());
    }

    #[test]
    fn combination_length_mismatch() {
        let inst = gen_diagonal_spencer(3, 4, 1).unwrap();
        assert!(matches!(inst.combination(&[1.0, 1.0]), Err(Error::DimMismatch { expected: 3, got: 2 })));
    }
}
