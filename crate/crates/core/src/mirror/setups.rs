//! Mirror maps: the spectraplex (negative von Neumann entropy) and Schatten
//! balls (`Φ(X) = ‖X‖_a² / (2(a−1))`).

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{Error, Result};
use crate::linalg::{neg_entropy, quantum_rel_entropy, Exponent, SymMatrix};
use crate::rng;

pub trait MirrorSetup: Send + Sync {
    fn name(&self) -> String;
    /// Strong-convexity constant of `Φ` with respect to the setup's norm.
    fn rho(&self) -> f64;
    /// Exponent of the dual norm in which gradients are measured.
    fn dual_exponent(&self) -> Exponent;
    fn potential(&self, x: &SymMatrix) -> Result<f64>;
    /// `∇Φ(X)`.
    fn mirror(&self, x: &SymMatrix) -> Result<SymMatrix>;
    /// `(∇Φ)^{−1}(Y)`, followed by the projection onto the feasible set when the
    /// setup has one.
    fn mirror_inv(&self, y: &SymMatrix) -> SymMatrix;
    /// `D_Φ(X, Y) = Φ(X) − Φ(Y) − ⟨∇Φ(Y), X − Y⟩`.
    fn bregman(&self, x: &SymMatrix, y: &SymMatrix) -> Result<f64>;
    fn check_start(&self, x0: &SymMatrix) -> Result<()>;
    fn is_feasible(&self, u: &SymMatrix, tol: f64) -> bool;
    fn sample_feasible(&self, m: usize, rng: &mut ChaCha8Rng) -> SymMatrix;
    fn default_start(&self, m: usize) -> SymMatrix;
    /// `max_U D_Φ(U, default_start)` over the feasible set.
    fn default_radius(&self, m: usize) -> f64;
}

pub struct Spectraplex;

/// Schatten setup with exponent `a = p* ∈ (1, 2]`.
pub struct SchattenSetup {
    a: f64,
}

impl SchattenSetup {
    pub fn new(p_star: f64) -> Result<Self> {
        if !(p_star > 1.0 && p_star <= 2.0) {
            return Err(Error::InvalidParameter(format!("Schatten setup needs p* in (1, 2], got {p_star}")));
        }
        Ok(SchattenSetup { a: p_star })
    }

    pub fn p_star(&self) -> f64 {
        self.a
    }
}

pub(crate) fn haar_orthogonal(m: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let g = DMatrix::from_vec(m, m, rng::gaussian_vec(rng, m * m));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..m {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// `V diag(w) Vᵀ` for Haar `V`.
pub(crate) fn rotate_diagonal(w: &[f64], rng: &mut ChaCha8Rng) -> SymMatrix {
    let m = w.len();
    let v = haar_orthogonal(m, rng);
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(w));
    let a = &v * d * v.transpose();
    SymMatrix::new((&a + a.transpose()) * 0.5).expect("symmetrized")
}

/// Random spectraplex member: Haar eigenvectors, eigenvalues drawn from a
/// Dirichlet law whose concentration varies between draws, occasionally
/// rank-one.
pub fn sample_spectraplex(m: usize, rng: &mut ChaCha8Rng) -> SymMatrix {
    let w = random_weights(m, rng);
    rotate_diagonal(&w, rng)
}

/// A point of the probability simplex: a vertex with probability 0.1,
/// otherwise normalized powers of exponentials (a Dirichlet-like law with a
/// random concentration).
pub(crate) fn random_weights(len: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut w: Vec<f64> = if rng.random_bool(0.1) {
        let mut w = vec![0.0; len];
        w[rng.random_range(0..len)] = 1.0;
        w
    } else {
        let power = rng.random_range(0.5..4.0);
        (0..len).map(|_| -> f64 { Exp1.sample(rng) }).map(|e| e.powf(power)).collect()
    };
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= s);
    w
}

impl MirrorSetup for Spectraplex {
    fn name(&self) -> String {
        "spectraplex".into()
    }
    fn rho(&self) -> f64 {
        0.5
    }
    fn dual_exponent(&self) -> Exponent {
        Exponent::INF
    }
    fn potential(&self, x: &SymMatrix) -> Result<f64> {
        Ok(neg_entropy(x))
    }
    fn mirror(&self, x: &SymMatrix) -> Result<SymMatrix> {
        let mut g = x.log()?;
        g.axpy(1.0, &SymMatrix::identity(x.dim()));
        Ok(g)
    }
    fn mirror_inv(&self, y: &SymMatrix) -> SymMatrix {
        let spec = y.eig();
        let top = spec.eigenvalues.first().copied().unwrap_or(0.0);
        let e = spec.map(|l| (l - top).exp());
        let tr = e.trace();
        e.scale(1.0 / tr)
    }
    fn bregman(&self, x: &SymMatrix, y: &SymMatrix) -> Result<f64> {
        quantum_rel_entropy(x, y)
    }
    fn check_start(&self, x0: &SymMatrix) -> Result<()> {
        if !x0.is_spectraplex(1e-8) {
            return Err(Error::Domain("spectraplex start must be PSD with unit trace".into()));
        }
        let min = x0.min_eigenvalue();
        if min <= 0.0 {
            return Err(Error::Domain(format!("spectraplex start must be positive definite (min eigenvalue {min:e})")));
        }
        Ok(())
    }
    fn is_feasible(&self, u: &SymMatrix, tol: f64) -> bool {
        u.is_spectraplex(tol)
    }
    fn sample_feasible(&self, m: usize, rng: &mut ChaCha8Rng) -> SymMatrix {
        sample_spectraplex(m, rng)
    }
    fn default_start(&self, m: usize) -> SymMatrix {
        SymMatrix::identity(m).scale(1.0 / m as f64)
    }
    fn default_radius(&self, m: usize) -> f64 {
        (m as f64).ln()
    }
}

impl MirrorSetup for SchattenSetup {
    fn name(&self) -> String {
        format!("schatten:{}", self.a)
    }
    fn rho(&self) -> f64 {
        1.0
    }
    fn dual_exponent(&self) -> Exponent {
        Exponent::new(self.a).expect("a > 1").conjugate()
    }
    fn potential(&self, x: &SymMatrix) -> Result<f64> {
        let nx = x.schatten_norm(Exponent::new(self.a)?);
        Ok(nx * nx / (2.0 * (self.a - 1.0)))
    }
    fn mirror(&self, x: &SymMatrix) -> Result<SymMatrix> {
        let a = self.a;
        let nx = x.schatten_norm(Exponent::new(a)?);
        if nx == 0.0 {
            return Ok(SymMatrix::zeros(x.dim()));
        }
        Ok(x.signed_power(a - 1.0).scale(nx.powf(2.0 - a) / (a - 1.0)))
    }
    fn mirror_inv(&self, y: &SymMatrix) -> SymMatrix {
        let a = self.a;
        let b = a / (a - 1.0);
        let ny = y.schatten_norm(Exponent::new(b).expect("b >= 2"));
        if ny == 0.0 {
            return SymMatrix::zeros(y.dim());
        }
        y.signed_power(b - 1.0).scale((a - 1.0) * ny.powf(2.0 - b))
    }
    fn bregman(&self, x: &SymMatrix, y: &SymMatrix) -> Result<f64> {
        let gy = self.mirror(y)?;
        let d = self.potential(x)? - self.potential(y)? - gy.as_matrix().dot(&(x.as_matrix() - y.as_matrix()));
        Ok(d.max(0.0))
    }
    fn check_start(&self, _x0: &SymMatrix) -> Result<()> {
        Ok(())
    }
    fn is_feasible(&self, u: &SymMatrix, tol: f64) -> bool {
        u.schatten_norm(Exponent::new(self.a).expect("a > 1")) <= 1.0 + tol
    }
    fn sample_feasible(&self, m: usize, rng: &mut ChaCha8Rng) -> SymMatrix {
        let g = DMatrix::from_vec(m, m, rng::gaussian_vec(rng, m * m));
        let s = SymMatrix::new((&g + g.transpose()) * 0.5).expect("symmetrized");
        let radius: f64 = rng.random_range(0.0..=1.0);
        let norm = s.schatten_norm(Exponent::new(self.a).expect("a > 1"));
        s.scale(radius / norm)
    }
    fn default_start(&self, m: usize) -> SymMatrix {
        SymMatrix::zeros(m)
    }
    fn default_radius(&self, _m: usize) -> f64 {
        1.0 / (2.0 * (self.a - 1.0))
    }
}

/// Looks a setup up by name: `spectraplex` or `schatten:<p*>` with `p* ∈ (1, 2]`.
pub fn mirror_setup(name: &str) -> Result<Arc<dyn MirrorSetup>> {
    let name = name.trim();
    if name == "spectraplex" {
        return Ok(Arc::new(Spectraplex));
    }
    if let Some(rest) = name.strip_prefix("schatten:") {
        let a: f64 = rest.parse().map_err(|_| Error::Parse(format!("bad Schatten exponent `{rest}`")))?;
        return Ok(Arc::new(SchattenSetup::new(a)?));
    }
    Err(Error::UnknownStrategy {
        kind: "mirror setup",
        name: name.to_string(),
        available: mirror_setup_names().join(", "),
    })
}

pub fn mirror_setup_names() -> Vec<&'static str> {
    vec!["spectraplex", "schatten:<p*>"]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn random_sym(m: usize, seed: u64) -> SymMatrix {
        let mut r = rng::stream(seed, 1);
        let g = DMatrix::from_vec(m, m, rng::gaussian_vec(&mut r, m * m));
        SymMatrix::new((&g + g.transpose()) * 0.5).unwrap()
    }

    #[test]
    fn schatten_mirror_round_trip() {
        for a in [1.5, 2.0, 1.2] {
            let s = SchattenSetup::new(a).unwrap();
            for seed in 0..20 {
                let x = random_sym(6, seed);
                let back = s.mirror_inv(&s.mirror(&x).unwrap());
                assert!((&back - &x).frobenius_norm() <= 1e-7 * x.frobenius_norm(), "a={a}");
            }
        }
    }

    #[test]
    fn schatten_gradient_finite_differences() {
        let s = SchattenSetup::new(1.5).unwrap();
        let x = random_sym(5, 3);
        let e = random_sym(5, 4);
        let g = s.mirror(&x).unwrap();
        let h = 1e-6;
        let fd = (s.potential(&(&x + &e.scale(h))).unwrap() - s.potential(&(&x - &e.scale(h))).unwrap()) / (2.0 * h);
        let exact = g.as_matrix().dot(e.as_matrix());
        assert!((fd - exact).abs() <= 1e-6 * (1.0 + exact.abs()), "fd {fd} exact {exact}");
    }

    #[test]
    fn entropy_gradient_finite_differences() {
        let mut r = rng::stream(5, 0);
        let x = sample_spectraplex(4, &mut r);
        let x = &x.scale(0.5) + &SymMatrix::identity(4).scale(0.125);
        let e = random_sym(4, 8).scale(0.1);
        let g = Spectraplex.mirror(&x).unwrap();
        let h = 1e-6;
        let fd = (neg_entropy(&(&x + &e.scale(h))) - neg_entropy(&(&x - &e.scale(h)))) / (2.0 * h);
        assert!((fd - g.as_matrix().dot(e.as_matrix())).abs() < 1e-6);
    }

    #[test]
    fn spectraplex_inverse_normalizes() {
        let y = random_sym(5, 2).scale(3.0);
        let x = Spectraplex.mirror_inv(&y);
        assert!(x.is_spectraplex(1e-10));
        assert!(x.min_eigenvalue() > 0.0);
    }

    #[test]
    fn samplers_are_feasible() {
        let mut r = rng::stream(0, 0);
        for m in [1, 3, 8] {
            for _ in 0..20 {
                assert!(Spectraplex.is_feasible(&Spectraplex.sample_feasible(m, &mut r), 1e-10));
                let s = SchattenSetup::new(1.5).unwrap();
                assert!(s.is_feasible(&s.sample_feasible(m, &mut r), 1e-10));
            }
        }
    }

    #[test]
    fn registry_parses_names() {
        assert_eq!(mirror_setup("spectraplex").unwrap().rho(), 0.5);
        let s = mirror_setup("schatten:1.5").unwrap();
        assert_eq!(s.rho(), 1.0);
        assert!((s.dual_exponent().value() - 3.0).abs() < 1e-12);
        assert!(mirror_setup("schatten:2.5").is_err());
        assert!(matches!(mirror_setup("euclid"), Err(Error::UnknownStrategy { .. })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn bregman_nonnegative(seed in 0u64..10_000, m in 1usize..6) {
            let mut r = rng::stream(seed, 2);
            let x = sample_spectraplex(m, &mut r);
            let y = sample_spectraplex(m, &mut r);
            let y = &y.scale(0.5) + &SymMatrix::identity(m).scale(0.5 / m as f64);
            let d = Spectraplex.bregman(&x, &y).unwrap();
            prop_assert!(d >= 0.0);
            // Pinsker: S(X‖Y) ≥ ½‖X − Y‖²_{S₁}
            let tv = (&x - &y).schatten_norm(Exponent::ONE);
            prop_assert!(d >= 0.5 * tv * tv - 1e-10);
            for a in [1.5, 2.0] {
                let s = SchattenSetup::new(a).unwrap();
                let u = s.sample_feasible(m, &mut r);
                let v = s.sample_feasible(m, &mut r);
                prop_assert!(s.bregman(&u, &v).unwrap() >= 0.0);
                let du = (&u - &v).schatten_norm(Exponent::new(a).unwrap());
                prop_assert!(s.bregman(&u, &v).unwrap() >= 0.5 * du * du - 1e-9);
            }
        }
    }
}
