//! Kernels built from the full rational integrand, and their factorization
//! onto the plain truncated kernels.
//!
//! With `q₁(x) = Π_α(ξ_α − x)` and `q₂(y) = Π_β(ζ_β − y)`:
//!
//! ```text
//! 𝒦₁₁(ξ_α, η) = ∫ q₁(x)/(η−x) K₁₂(ξ_α, y) dμ          = q₁(η) K₁₁(ξ_α, η)     (J ≥ L₁)
//! 𝒦₂₂(μ, ζ_β) = ∫ q₂(y)/(μ−y) K₁₂(x, ζ_β) dμ          = q₂(μ) K₂₂(μ, ζ_β)     (J ≥ L₂)
//! 𝒦₂₁(μ, η) − ℋ(μ, η)                                  = q₁(η)q₂(μ) K₂₁(μ, η)  (J ≥ max(L₁, L₂))
//! 𝒫̃_n(μ)     = ∫ q₂(y)/(μ−y) P_n(x) dμ                = q₂(μ) P̃_n(μ)          (n ≥ L₂)
//! ```
//!
//! where `𝒦₂₁` is the double integral of `q₁(x)/(η−x) · q₂(w)/(μ−w) · K₁₂(z, y)`
//! over `dμ(x, y) dμ(z, w)` and `ℋ = ∫ q₁(x)q₂(y)/((η−x)(μ−y)) dμ`.
//! These evaluators are only used to check the identities.

use crate::biorth::BiorthogonalSystem;
use crate::error::{Error, Result};
use crate::formulas::IntegrandSpec;
use crate::kernels::{k11, k12, k21, k22};
use crate::Complex;

fn q(points: &[Complex], z: Complex) -> Complex {
    points.iter().map(|&p| p - z).product()
}

fn cal_k11(
    sys: &BiorthogonalSystem,
    spec: &IntegrandSpec,
    j: usize,
    xi_a: Complex,
    eta: Complex,
) -> Result<Complex> {
    let m = sys.source();
    let mut acc = Complex::new(0.0, 0.0);
    for (x, y, w) in m.atoms() {
        acc += w * q(&spec.xi, x) / (eta - x) * k12(sys, j, xi_a, y)?;
    }
    Ok(acc)
}

fn cal_k22(
    sys: &BiorthogonalSystem,
    spec: &IntegrandSpec,
    j: usize,
    mu: Complex,
    zeta_b: Complex,
) -> Result<Complex> {
    let m = sys.source();
    let mut acc = Complex::new(0.0, 0.0);
    for (x, y, w) in m.atoms() {
        acc += w * q(&spec.zeta, y) / (mu - y) * k12(sys, j, x, zeta_b)?;
    }
    Ok(acc)
}

fn cal_k21(
    sys: &BiorthogonalSystem,
    spec: &IntegrandSpec,
    j: usize,
    mu: Complex,
    eta: Complex,
) -> Result<Complex> {
    let m = sys.source();
    let atoms: Vec<_> = m.atoms().collect();
    let mut acc = Complex::new(0.0, 0.0);
    for &(x, y, w1) in &atoms {
        let left = w1 * q(&spec.xi, x) / (eta - x);
        for &(z, wy, w2) in &atoms {
            acc += left * w2 * q(&spec.zeta, wy) / (mu - wy) * k12(sys, j, z, y)?;
        }
    }
    Ok(acc)
}

fn cal_h(sys: &BiorthogonalSystem, spec: &IntegrandSpec, mu: Complex, eta: Complex) -> Complex {
    sys.source()
        .integrate(|x, y| q(&spec.xi, x) * q(&spec.zeta, y) / ((eta - x) * (mu - y)))
}

fn cal_p_tilde(
    sys: &BiorthogonalSystem,
    spec: &IntegrandSpec,
    n: usize,
    mu: Complex,
) -> Result<Complex> {
    let m = sys.source();
    let mut acc = Complex::new(0.0, 0.0);
    for (x, y, w) in m.atoms() {
        acc += w * q(&spec.zeta, y) / (mu - y) * sys.eval_p(n, x)?;
    }
    Ok(acc)
}

/// Largest relative residual `|lhs − rhs| / max(|rhs|, 1e−10)` of each identity.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ReductionResiduals {
    pub k11: f64,
    pub k22: f64,
    pub k21: f64,
    pub p_tilde: f64,
}

impl ReductionResiduals {
    pub fn max(&self) -> f64 {
        self.k11.max(self.k22).max(self.k21).max(self.p_tilde)
    }
}

fn rel(lhs: Complex, rhs: Complex) -> f64 {
    (lhs - rhs).norm() / rhs.norm().max(1e-10)
}

/// Check all four factorizations at truncation `j` over the points of `spec`
/// (`n_pairs` is ignored). The `𝒫̃` identity is checked for `L₂ ≤ n < j`.
pub fn check_kernel_reductions(
    sys: &BiorthogonalSystem,
    spec: &IntegrandSpec,
    j: usize,
) -> Result<ReductionResiduals> {
    let (l1, l2, _, _) = spec.dims();
    if j < l1.max(l2) {
        return Err(Error::Invalid(format!(
            "truncation {j} is below max(L1, L2) = {}",
            l1.max(l2)
        )));
    }
    spec.check_poles(sys)?;
    let mut out = ReductionResiduals::default();
    for &eta in &spec.eta {
        let q1 = q(&spec.xi, eta);
        for &xi_a in &spec.xi {
            let lhs = cal_k11(sys, spec, j, xi_a, eta)?;
            out.k11 = out.k11.max(rel(lhs, q1 * k11(sys, j, xi_a, eta)?));
        }
        for &mu in &spec.mu {
            let q2 = q(&spec.zeta, mu);
            let lhs = cal_k21(sys, spec, j, mu, eta)? - cal_h(sys, spec, mu, eta);
            out.k21 = out.k21.max(rel(lhs, q1 * q2 * k21(sys, j, mu, eta)?));
        }
    }
    for &mu in &spec.mu {
        let q2 = q(&spec.zeta, mu);
        for &zeta_b in &spec.zeta {
            let lhs = cal_k22(sys, spec, j, mu, zeta_b)?;
            out.k22 = out.k22.max(rel(lhs, q2 * k22(sys, j, mu, zeta_b)?));
        }
        for n in l2..j {
            let lhs = cal_p_tilde(sys, spec, n, mu)?;
            out.p_tilde = out.p_tilde.max(rel(lhs, q2 * sys.hilbert_p(n, mu)?));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::biorth::biorthogonalize;
    use crate::c;
    use crate::measure::catalog::*;

    fn spec() -> IntegrandSpec {
        IntegrandSpec::new(
            1,
            vec![c(2.0, 0.5), c(-1.0, 1.5)],
            vec![c(0.5, -2.0)],
            vec![c(1.5, 0.0), c(0.0, 1.5)],
            vec![c(-1.2, 0.9), c(0.8, 1.3)],
        )
        .unwrap()
    }

    // K₂₁^J decays geometrically in J (faster for poles far from the support),
    // so the check stays below the full rank, where both sides vanish identically.
    #[test]
    fn reductions_hold_at_sufficient_truncation() {
        let s = biorthogonalize(&exp_xy_grid(&[-1.0, -0.4, 0.3, 1.0]), 3).unwrap();
        for j in 2..=3 {
            let r = check_kernel_reductions(&s, &spec(), j).unwrap();
            assert!(r.max() < 1e-9, "j = {j}: {r:?}");
        }
    }

    #[test]
    fn reductions_fail_below_threshold() {
        let s = biorthogonalize(&exp_xy_grid(&[-1.0, -0.4, 0.3, 1.0]), 3).unwrap();
        let sp = spec();
        assert!(check_kernel_reductions(&s, &sp, 1).is_err());
        // At J = 1 < L₁ the 𝒦₁₁ factorization genuinely breaks.
        let mut lhs_minus_rhs: f64 = 0.0;
        for &eta in &sp.eta {
            for &xi_a in &sp.xi {
                let lhs = cal_k11(&s, &sp, 1, xi_a, eta).unwrap();
                let rhs = q(&sp.xi, eta) * k11(&s, 1, xi_a, eta).unwrap();
                lhs_minus_rhs = lhs_minus_rhs.max(rel(lhs, rhs));
            }
        }
        assert!(lhs_minus_rhs > 1e-6);
    }
}
