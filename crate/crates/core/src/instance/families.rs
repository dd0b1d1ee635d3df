//! Instance generators, registered by name.

use std::sync::OnceLock;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::Instance;
use crate::error::{Error, Result};
use crate::linalg::{Exponent, SymMatrix};
use crate::rng;

/// Parameters shared by all generators. Families ignore what they do not use.
#[derive(Clone, Debug)]
pub struct FamilySpec {
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub p: Exponent,
    pub q: Option<Exponent>,
    pub r: Option<usize>,
    pub h: Option<usize>,
    pub seed: u64,
    pub symmetrize: bool,
}

impl Default for FamilySpec {
    fn default() -> Self {
        FamilySpec { n: None, m: None, p: Exponent::INF, q: None, r: None, h: None, seed: 0, symmetrize: true }
    }
}

impl FamilySpec {
    fn need_n(&self, family: &str) -> Result<usize> {
        self.n.ok_or_else(|| Error::InvalidParameter(format!("family `{family}` needs n")))
    }

    fn need_m(&self, family: &str) -> Result<usize> {
        self.m.ok_or_else(|| Error::InvalidParameter(format!("family `{family}` needs m")))
    }
}

pub trait InstanceFamily: Send + Sync {
    fn name(&self) -> &'static str;
    fn summary(&self) -> &'static str;
    fn generate(&self, spec: &FamilySpec) -> Result<Instance>;
}

struct RandomFamily;
struct DiagonalSpencerFamily;
struct HadamardFamily;
struct RankOneLowerFamily;
struct CoordinateFamily;

impl InstanceFamily for RandomFamily {
    fn name(&self) -> &'static str {
        "random"
    }
    fn summary(&self) -> &'static str {
        "Gaussian symmetric matrices, optionally rank-r (signed rank-1 terms) and/or h-block diagonal, normalized in S_p"
    }
    fn generate(&self, spec: &FamilySpec) -> Result<Instance> {
        let mut inst = gen_random(spec.need_n("random")?, spec.need_m("random")?, spec.p, spec.r, spec.h, spec.seed)?;
        if let Some(q) = spec.q {
            inst.q = q;
            inst.validate()?;
        }
        Ok(inst)
    }
}

impl InstanceFamily for DiagonalSpencerFamily {
    fn name(&self) -> &'static str {
        "diagonal-spencer"
    }
    fn summary(&self) -> &'static str {
        "diagonal matrices with uniformly random ±1 diagonals (vector Spencer setting)"
    }
    fn generate(&self, spec: &FamilySpec) -> Result<Instance> {
        let n = spec.need_n(self.name())?;
        gen_diagonal_spencer(n, spec.m.unwrap_or(n), spec.seed)
    }
}

impl InstanceFamily for HadamardFamily {
    fn name(&self) -> &'static str {
        "hadamard"
    }
    fn summary(&self) -> &'static str {
        "m^2 matrices D_i P_j from Walsh-Hadamard signs and cyclic shifts, scaled to unit S_p norm"
    }
    fn generate(&self, spec: &FamilySpec) -> Result<Instance> {
        let mut inst = gen_hadamard_lower(spec.need_m(self.name())?, spec.p, spec.symmetrize)?;
        if let Some(q) = spec.q {
            inst.q = q;
            inst.validate()?;
        }
        Ok(inst)
    }
}

impl InstanceFamily for RankOneLowerFamily {
    fn name(&self) -> &'static str {
        "rank1-lower"
    }
    fn summary(&self) -> &'static str {
        "A_i = (e_i + e_n)(e_i + e_n)^T / 2 for i < n and A_n = 0"
    }
    fn generate(&self, spec: &FamilySpec) -> Result<Instance> {
        gen_rank1_lower(spec.need_n(self.name())?)
    }
}

impl InstanceFamily for CoordinateFamily {
    fn name(&self) -> &'static str {
        "coordinate"
    }
    fn summary(&self) -> &'static str {
        "A_i = e_i e_i^T with n = m; its discrepancy body is the cube"
    }
    fn generate(&self, spec: &FamilySpec) -> Result<Instance> {
        gen_coordinate(spec.need_n(self.name())?)
    }
}

fn registry() -> &'static [Box<dyn InstanceFamily>] {
    static FAMILIES: OnceLock<Vec<Box<dyn InstanceFamily>>> = OnceLock::new();
    FAMILIES.get_or_init(|| {
        vec![
            Box::new(RandomFamily),
            Box::new(DiagonalSpencerFamily),
            Box::new(HadamardFamily),
            Box::new(RankOneLowerFamily),
            Box::new(CoordinateFamily),
        ]
    })
}

pub fn family(name: &str) -> Result<&'static dyn InstanceFamily> {
    registry()
        .iter()
        .find(|f| f.name() == name)
        .map(|f| f.as_ref())
        .ok_or_else(|| Error::UnknownStrategy {
            kind: "instance family",
            name: name.to_string(),
            available: family_names().join(", "),
        })
}

pub fn family_names() -> Vec<&'static str> {
    registry().iter().map(|f| f.name()).collect()
}

fn gaussian_symmetric<R: Rng + ?Sized>(rng: &mut R, h: usize) -> DMatrix<f64> {
    let mut d = DMatrix::zeros(h, h);
    for i in 0..h {
        for j in i..h {
            let v: f64 = StandardNormal.sample(rng);
            let v = if i == j { v } else { v / std::f64::consts::SQRT_2 };
            d[(i, j)] = v;
            d[(j, i)] = v;
        }
    }
    d
}

/// Random instance normalized to `‖Aᵢ‖_{S_p} = 1`. With `r`, each matrix is a
/// sum of `r` signed rank-one terms `±uuᵀ`; with `h`, matrices are block
/// diagonal (rank-one terms are then supported inside a single block).
pub fn gen_random(n: usize, m: usize, p: Exponent, r: Option<usize>, h: Option<usize>, seed: u64) -> Result<Instance> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidParameter("n and m must be positive".into()));
    }
    if let Some(r) = r {
        if r == 0 || r > m {
            return Err(Error::InvalidParameter(format!("rank bound r = {r} must lie in 1..={m}")));
        }
    }
    if let Some(h) = h {
        if h == 0 || m % h != 0 {
            return Err(Error::InvalidParameter(format!("block size h = {h} must divide m = {m}")));
        }
    }
    let mut rng = rng::stream(seed, 0x72616e64);
    let mut matrices = Vec::with_capacity(n);
    while matrices.len() < n {
        let mut d = DMatrix::<f64>::zeros(m, m);
        match (r, h) {
            (None, None) => d = gaussian_symmetric(&mut rng, m),
            (None, Some(h)) => {
                for b in 0..m / h {
                    d.view_mut((b * h, b * h), (h, h)).copy_from(&gaussian_symmetric(&mut rng, h));
                }
            }
            (Some(r), block) => {
                let h = block.unwrap_or(m);
                for _ in 0..r {
                    let b = rng.random_range(0..m / h);
                    let u = rng::gaussian_vec(&mut rng, h);
                    let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                    for i in 0..h {
                        for j in 0..h {
                            d[(b * h + i, b * h + j)] += sign * u[i] * u[j];
                        }
                    }
                }
            }
        }
        let a = SymMatrix::new(d)?;
        let norm = a.schatten_norm(p);
        if norm > 0.0 {
            matrices.push(a.scale(1.0 / norm));
        }
    }
    let label = format!(
        "random n={n} m={m} p={p}{}{}",
        r.map(|r| format!(" r={r}")).unwrap_or_default(),
        h.map(|h| format!(" h={h}")).unwrap_or_default()
    );
    Instance::new(matrices, p, p, r, h, label, Some(seed))
}

/// `Aᵢ = diag(aᵢ)` with `aᵢ` uniform in `{±1}^m`.
pub fn gen_diagonal_spencer(n: usize, m: usize, seed: u64) -> Result<Instance> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidParameter("n and m must be positive".into()));
    }
    let mut rng = rng::stream(seed, 0x73706e63);
    let matrices = (0..n)
        .map(|_| {
            let d: Vec<f64> = (0..m).map(|_| if rng.random_bool(0.5) { 1.0 } else { -1.0 }).collect();
            SymMatrix::diagonal(&d)
        })
        .collect();
    Instance::new(
        matrices,
        Exponent::INF,
        Exponent::INF,
        None,
        Some(1),
        format!("diagonal-spencer n={n} m={m}"),
        Some(seed),
    )
}

/// `Aᵢ = eᵢeᵢᵀ`, n = m.
pub fn gen_coordinate(n: usize) -> Result<Instance> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    let matrices = (0..n)
        .map(|i| {
            let mut d = vec![0.0; n];
            d[i] = 1.0;
            SymMatrix::diagonal(&d)
        })
        .collect();
    Instance::new(matrices, Exponent::INF, Exponent::INF, Some(1), Some(1), format!("coordinate n={n}"), None)
}

/// Sylvester-ordered Walsh–Hadamard sign `H[i][j] = (-1)^{popcount(i & j)}`.
fn hadamard_sign(i: usize, j: usize) -> f64 {
    if (i & j).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Scale applied to each generated Hadamard-family matrix.
///
/// Raw: `n^{-1/(2p)} = m^{-1/p}`, giving `‖DᵢPⱼ‖_{S_p} = 1`. The symmetric
/// embedding `[[0, M], [Mᵀ, 0]]` doubles every singular value's multiplicity,
/// so it carries an extra `2^{-1/p}` (equal to 1 when `p = ∞`).
pub fn hadamard_scale(m: usize, p: Exponent, symmetrize: bool) -> f64 {
    let n = (m * m) as f64;
    let base = n.powf(-0.5 * p.recip());
    if symmetrize {
        base * 2f64.powf(-p.recip())
    } else {
        base
    }
}

/// Raw (non-symmetric), scaled matrices `D_i P_j`, indexed
/// `i + m·j` with `i, j ∈ 0..m`. `(P_j)_{a,b} = 1` iff `a − b ≡ j (mod m)`.
pub fn hadamard_raw(m: usize, p: Exponent) -> Result<Vec<DMatrix<f64>>> {
    if m == 0 || !m.is_power_of_two() {
        return Err(Error::InvalidParameter(format!("Hadamard family needs m a power of two, got {m}")));
    }
    let scale = hadamard_scale(m, p, false);
    let mut out = Vec::with_capacity(m * m);
    for j in 0..m {
        for i in 0..m {
            let mut d = DMatrix::zeros(m, m);
            for a in 0..m {
                let b = (a + m - j) % m;
                // (D_i P_j)_{a,b} = H[i][a] · (P_j)_{a,b}
                d[(a, b)] = hadamard_sign(i, a) * scale;
            }
            out.push(d);
        }
    }
    Ok(out)
}

/// Hadamard lower-bound family. With `symmetrize`, each raw `M` is embedded
/// as `[[0, M], [Mᵀ, 0]]` in dimension `2m`; otherwise only `m = 1` (trivially
/// symmetric) is representable as an [`Instance`] and raw matrices are
/// available through [`hadamard_raw`].
pub fn gen_hadamard_lower(m: usize, p: Exponent, symmetrize: bool) -> Result<Instance> {
    let raw = hadamard_raw(m, p)?;
    let extra = if symmetrize { 2f64.powf(-p.recip()) } else { 1.0 };
    let matrices = raw
        .into_iter()
        .map(|mat| {
            if symmetrize {
                let mut big = DMatrix::zeros(2 * m, 2 * m);
                big.view_mut((0, m), (m, m)).copy_from(&(&mat * extra));
                big.view_mut((m, 0), (m, m)).copy_from(&(mat.transpose() * extra));
                SymMatrix::new(big)
            } else {
                SymMatrix::new(mat)
            }
        })
        .collect::<Result<Vec<_>>>()
        .map_err(|e| match e {
            Error::NotSymmetric { .. } => Error::InvalidParameter(
                "raw Hadamard matrices are not symmetric; use symmetrize or hadamard_raw".into(),
            ),
            other => other,
        })?;
    Instance::new(
        matrices,
        p,
        Exponent::INF,
        None,
        None,
        format!("hadamard m={m} p={p}{}", if symmetrize { " symmetrized" } else { "" }),
        None,
    )
}

/// `Aᵢ = ½(eᵢ + eₙ)(eᵢ + eₙ)ᵀ` for `i < n`, `Aₙ = 0`; m = n, p = 2, q = ∞.
pub fn gen_rank1_lower(n: usize) -> Result<Instance> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("rank-1 lower-bound family needs n >= 2, got {n}")));
    }
    let mut matrices = Vec::with_capacity(n);
    for i in 0..n - 1 {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        v[n - 1] = 1.0;
        matrices.push(SymMatrix::outer(&v).scale(0.5));
    }
    matrices.push(SymMatrix::zeros(n));
    Instance::new(matrices, Exponent::TWO, Exponent::INF, Some(1), None, format!("rank1-lower n={n}"), None)
}

/// Schatten-p norm of a general square matrix through its singular values.
pub fn general_schatten_norm(a: &DMatrix<f64>, p: Exponent) -> f64 {
    let sv: Vec<f64> = a.singular_values().iter().copied().collect();
    crate::linalg::schatten_of_eigenvalues(&sv, p)
}
