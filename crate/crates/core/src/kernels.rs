//! Truncated kernel sums and the double Cauchy transform `H`.
//!
//! All kernels are explicit sums over `n < J`; there is no Christoffel–Darboux
//! shortcut for the biorthogonal case.

use std::collections::HashMap;
use std::sync::RwLock;

use crate::biorth::BiorthogonalSystem;
use crate::error::{Error, Result};
use crate::measure::{min_distance, DiscreteBiMeasure};
use crate::{Complex, NODE_SEPARATION, POLE_SEPARATION};

fn check_truncation(sys: &BiorthogonalSystem, j: usize) -> Result<()> {
    if j > sys.degree_cap() + 1 {
        return Err(Error::CapExceeded {
            needed: j - 1,
            cap: sys.degree_cap(),
        });
    }
    Ok(())
}

fn check_apart(a: Complex, b: Complex, what: &str) -> Result<()> {
    if (a - b).norm() <= NODE_SEPARATION {
        return Err(Error::CoincidentArguments(format!(
            "{what}: {a} and {b} coincide"
        )));
    }
    Ok(())
}

/// `K₁₂^J(ξ, ζ) = Σ_{n<J} P_n(ξ) S_n(ζ)`.
pub fn k12(sys: &BiorthogonalSystem, j: usize, xi: Complex, zeta: Complex) -> Result<Complex> {
    check_truncation(sys, j)?;
    (0..j).try_fold(Complex::new(0.0, 0.0), |acc, n| {
        Ok(acc + sys.eval_p(n, xi)? * sys.eval_s(n, zeta)?)
    })
}

/// `K₁₁^J(ξ, η) = Σ_{n<J} P_n(ξ) S̃_n(η) + 1/(ξ − η)`.
pub fn k11(sys: &BiorthogonalSystem, j: usize, xi: Complex, eta: Complex) -> Result<Complex> {
    check_truncation(sys, j)?;
    check_apart(xi, eta, "K11")?;
    pole_check(eta, sys.source().x_nodes(), "eta")?;
    let sum = (0..j).try_fold(Complex::new(0.0, 0.0), |acc, n| {
        Ok::<_, Error>(acc + sys.eval_p(n, xi)? * sys.hilbert_s(n, eta)?)
    })?;
    Ok(sum + 1.0 / (xi - eta))
}

/// `K₂₂^J(μ, ζ) = Σ_{n<J} P̃_n(μ) S_n(ζ) + 1/(ζ − μ)`.
pub fn k22(sys: &BiorthogonalSystem, j: usize, mu: Complex, zeta: Complex) -> Result<Complex> {
    check_truncation(sys, j)?;
    check_apart(zeta, mu, "K22")?;
    pole_check(mu, sys.source().y_nodes(), "mu")?;
    let sum = (0..j).try_fold(Complex::new(0.0, 0.0), |acc, n| {
        Ok::<_, Error>(acc + sys.hilbert_p(n, mu)? * sys.eval_s(n, zeta)?)
    })?;
    Ok(sum + 1.0 / (zeta - mu))
}

/// `K₂₁^J(μ, η) = Σ_{n<J} P̃_n(μ) S̃_n(η) − H(μ, η)`.
pub fn k21(sys: &BiorthogonalSystem, j: usize, mu: Complex, eta: Complex) -> Result<Complex> {
    check_truncation(sys, j)?;
    let h = h_kernel(sys.source(), mu, eta)?;
    let sum = (0..j).try_fold(Complex::new(0.0, 0.0), |acc, n| {
        Ok::<_, Error>(acc + sys.hilbert_p(n, mu)? * sys.hilbert_s(n, eta)?)
    })?;
    Ok(sum - h)
}

fn pole_check(z: Complex, nodes: &[Complex], what: &'static str) -> Result<()> {
    if min_distance(z, nodes) <= POLE_SEPARATION {
        return Err(Error::PoleOnSupport {
            what,
            re: z.re,
            im: z.im,
            tol: POLE_SEPARATION,
        });
    }
    Ok(())
}

/// `H(μ, η) = ∫ dμ(x,y) / ((η − x)(μ − y))`.
pub fn h_kernel(m: &DiscreteBiMeasure, mu: Complex, eta: Complex) -> Result<Complex> {
    pole_check(eta, m.x_nodes(), "eta")?;
    pole_check(mu, m.y_nodes(), "mu")?;
    Ok(m.integrate(|x, y| 1.0 / ((eta - x) * (mu - y))))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelKind {
    K11,
    K12,
    K21,
    K22,
    H,
}

type CacheKey = (KernelKind, usize, [u64; 4]);

fn key(kind: KernelKind, j: usize, a: Complex, b: Complex) -> CacheKey {
    (
        kind,
        j,
        [
            a.re.to_bits(),
            a.im.to_bits(),
            b.re.to_bits(),
            b.im.to_bits(),
        ],
    )
}

/// Memoizing front end to the kernel functions for one system.
///
/// The cache is keyed on the exact bit patterns of the arguments and guarded by
/// an `RwLock`, so a table can be shared across threads.
#[derive(Debug)]
pub struct KernelTable<'a> {
    system: &'a BiorthogonalSystem,
    j_cap: usize,
    cache: RwLock<HashMap<CacheKey, Complex>>,
}

impl<'a> KernelTable<'a> {
    pub fn new(system: &'a BiorthogonalSystem, j_cap: usize) -> Result<Self> {
        check_truncation(system, j_cap)?;
        Ok(Self {
            system,
            j_cap,
            cache: RwLock::new(HashMap::new()),
        })
    }

    pub fn system(&self) -> &BiorthogonalSystem {
        self.system
    }

    pub fn j_cap(&self) -> usize {
        self.j_cap
    }

    pub fn len(&self) -> usize {
        self.cache.read().expect("kernel cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn get(&self, k: CacheKey, compute: impl FnOnce() -> Result<Complex>) -> Result<Complex> {
        if k.1 > self.j_cap {
            return Err(Error::CapExceeded {
                needed: k.1 - 1,
                cap: self.j_cap.saturating_sub(1),
            });
        }
        if let Some(v) = self.cache.read().expect("kernel cache poisoned").get(&k) {
            return Ok(*v);
        }
        let v = compute()?;
        self.cache
            .write()
            .expect("kernel cache poisoned")
            .insert(k, v);
        Ok(v)
    }

    pub fn k11(&self, j: usize, xi: Complex, eta: Complex) -> Result<Complex> {
        self.get(key(KernelKind::K11, j, xi, eta), || {
            k11(self.system, j, xi, eta)
        })
    }

    pub fn k12(&self, j: usize, xi: Complex, zeta: Complex) -> Result<Complex> {
        self.get(key(KernelKind::K12, j, xi, zeta), || {
            k12(self.system, j, xi, zeta)
        })
    }

    pub fn k21(&self, j: usize, mu: Complex, eta: Complex) -> Result<Complex> {
        self.get(key(KernelKind::K21, j, mu, eta), || {
            k21(self.system, j, mu, eta)
        })
    }

    pub fn k22(&self, j: usize, mu: Complex, zeta: Complex) -> Result<Complex> {
        self.get(key(KernelKind::K22, j, mu, zeta), || {
            k22(self.system, j, mu, zeta)
        })
    }

    pub fn h(&self, mu: Complex, eta: Complex) -> Result<Complex> {
        self.get(key(KernelKind::H, 0, mu, eta), || {
            h_kernel(self.system.source(), mu, eta)
        })
    }
}
