//! The three two-matrix case formulas.

use super::{
    det_complex, epsilon_sign, interp_prefactor, parity, CaseKind, EvaluationReport, IntegrandSpec,
};
use crate::biorth::BiorthogonalSystem;
use crate::error::{Error, Result};
use crate::kernels::{h_kernel, k11, k12, k21, k22};
use crate::{Complex, NODE_SEPARATION};

/// Candidate overall signs for Case 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case2SignRule {
    /// `(−1)^{N(N−1)/2 + M₁(M₁+1)/2 + L₂(L₂−1)/2 + M₁N + M₂L₁ + M₁L₂ + L₁L₂}`.
    Printed,
    /// The printed sign times `(−1)^{N·L₁ + L₁·M₂ + L₂·M₂}`, fitted against
    /// brute-force summation.
    Fitted,
}

impl Case2SignRule {
    pub fn sign(self, n: usize, l1: usize, l2: usize, m1: usize, m2: usize) -> f64 {
        match self {
            Case2SignRule::Printed => parity(
                n * n.saturating_sub(1) / 2
                    + m1 * (m1 + 1) / 2
                    + l2 * l2.saturating_sub(1) / 2
                    + m1 * n
                    + m2 * l1
                    + m1 * l2
                    + l1 * l2,
            ),
            Case2SignRule::Fitted => {
                Case2SignRule::Printed.sign(n, l1, l2, m1, m2) * parity(n * l1 + l1 * m2 + l2 * m2)
            }
        }
    }
}

/// Candidate overall signs for Case 3 (for the row/column layout used by [`case3`]).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case3SignRule {
    /// No explicit sign.
    Printed,
    /// `(−1)^{L₁(N+M₁) + L₂(N+M₂) + L₁(L₁+1)/2 + L₂(L₂+1)/2}`.
    Derivation,
    /// `(−1)^{L₁(L₁+1)/2 + L₂(L₂+1)/2 + N + N·M₁ + N·M₂ + M₁·M₂}`.
    Calibrated,
}

impl Case3SignRule {
    pub fn sign(self, n: usize, l1: usize, l2: usize, m1: usize, m2: usize) -> f64 {
        match self {
            Case3SignRule::Printed => 1.0,
            Case3SignRule::Derivation => {
                parity(l1 * (n + m1) + l2 * (n + m2) + l1 * (l1 + 1) / 2 + l2 * (l2 + 1) / 2)
            }
            Case3SignRule::Calibrated => {
                parity(l1 * (l1 + 1) / 2 + l2 * (l2 + 1) / 2 + n + n * m1 + n * m2 + m1 * m2)
            }
        }
    }
}

/// Sign rule used by [`case2`]; the printed rule fails against the oracle.
pub const CASE2_SIGN_RULE: Case2SignRule = Case2SignRule::Fitted;

/// Sign rule used by [`case3`]; chosen by the calibration test.
pub const CASE3_SIGN_RULE: Case3SignRule = Case3SignRule::Calibrated;

/// `Π_{n<a} √h_n`.
fn f(sys: &BiorthogonalSystem, a: usize) -> Complex {
    sys.sqrt_h_prefix(a)
}

fn mismatch(case: &str, spec: &IntegrandSpec) -> Error {
    let (a, c) = spec.combinations();
    Error::CaseMismatch(format!(
        "{case} does not apply: N+L1-M1 = {a}, N+L2-M2 = {c}"
    ))
}

fn cauchy(a: Complex, b: Complex) -> Result<Complex> {
    if (a - b).norm() <= NODE_SEPARATION {
        return Err(Error::CoincidentArguments(format!("{a} and {b} coincide")));
    }
    Ok(1.0 / (a - b))
}

fn zero() -> Complex {
    Complex::new(0.0, 0.0)
}

/// `G` for Case 1 with the kernels of the first column block truncated at `j_first`.
///
/// Rows are `ξ_α` then `μ_k`; columns are the `η_j` block (`K₁₁`, `K₂₁`), the
/// `ζ_β` block (`K₁₂`, `K₂₂` at `J = N+L₂−M₂`) and `P_n(ξ_α)`, `P̃_n(μ_k)` for
/// `J ≤ n < N+L₁−M₁`. The determinant does not depend on `j_first` as long as
/// `J ≤ j_first ≤ N+L₁−M₁`.
pub fn case1_matrix(
    sys: &BiorthogonalSystem,
    spec: &IntegrandSpec,
    j_first: usize,
) -> Result<Vec<Vec<Complex>>> {
    let (a, c) = spec.combinations();
    if !(a >= c && c >= 0) {
        return Err(mismatch("Case1", spec));
    }
    let (j, j1) = (c as usize, a as usize);
    sys.require_cap(j1.max(j_first).max(1) - 1)?;
    let mut rows = Vec::with_capacity(spec.xi.len() + spec.mu.len());
    for &xi in &spec.xi {
        let mut row = Vec::with_capacity(spec.xi.len() + spec.mu.len());
        for &eta in &spec.eta {
            row.push(k11(sys, j_first, xi, eta)?);
        }
        for &zeta in &spec.zeta {
            row.push(k12(sys, j, xi, zeta)?);
        }
        for n in j..j1 {
            row.push(sys.eval_p(n, xi)?);
        }
        rows.push(row);
    }
    for &mu in &spec.mu {
        let mut row = Vec::with_capacity(spec.xi.len() + spec.mu.len());
        for &eta in &spec.eta {
            row.push(k21(sys, j_first, mu, eta)?);
        }
        for &zeta in &spec.zeta {
            row.push(k22(sys, j, mu, zeta)?);
        }
        for n in j..j1 {
            row.push(sys.hilbert_p(n, mu)?);
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Case 1: `N + L₁ − M₁ ≥ N + L₂ − M₂ ≥ 0`.
pub fn case1(sys: &BiorthogonalSystem, spec: &IntegrandSpec) -> Result<EvaluationReport> {
    spec.validate()?;
    let (a, c) = spec.combinations();
    if !(a >= c && c >= 0) {
        return Err(mismatch("Case1", spec));
    }
    let n = spec.n_pairs;
    let (j, j1) = (c as usize, a as usize);
    sys.require_cap(n.max(j1) - 1)?;
    spec.check_poles(sys)?;
    let (l1, l2, m1, m2) = spec.dims();
    let g = case1_matrix(sys, spec, j)?;
    let fnn = f(sys, n);
    let prefactor = f(sys, j) * f(sys, j1) / (fnn * fnn) * interp_prefactor(spec);
    Ok(EvaluationReport::new(
        CaseKind::Case1,
        epsilon_sign(l1, l2, m1, m2),
        prefactor,
        det_complex(&g),
    ))
}

/// Case 2: `N + L₁ − M₁ ≥ 0 ≥ N + L₂ − M₂`.
pub fn case2(sys: &BiorthogonalSystem, spec: &IntegrandSpec) -> Result<EvaluationReport> {
    spec.validate()?;
    let (a, c) = spec.combinations();
    if !(a >= 0 && c <= 0) {
        return Err(mismatch("Case2", spec));
    }
    let n = spec.n_pairs;
    let (pa, sb) = (a as usize, (-c) as usize);
    sys.require_cap(n.max(pa).max(sb) - 1)?;
    spec.check_poles(sys)?;
    let (l1, l2, m1, m2) = spec.dims();

    let mut rows = Vec::with_capacity(l1 + m2);
    for &xi in &spec.xi {
        let mut row = Vec::with_capacity(l1 + m2);
        for &eta in &spec.eta {
            row.push(cauchy(eta, xi)?);
        }
        row.extend(std::iter::repeat_n(zero(), l2));
        for b in 0..pa {
            row.push(sys.eval_p(b, xi)?);
        }
        row.extend(std::iter::repeat_n(zero(), sb));
        rows.push(row);
    }
    for &mu in &spec.mu {
        let mut row = Vec::with_capacity(l1 + m2);
        for &eta in &spec.eta {
            row.push(h_kernel(sys.source(), mu, eta)?);
        }
        for &zeta in &spec.zeta {
            row.push(cauchy(mu, zeta)?);
        }
        for b in 0..pa {
            row.push(sys.hilbert_p(b, mu)?);
        }
        for m in 0..sb {
            row.push(sys.eval_s(m, mu)?);
        }
        rows.push(row);
    }
    let fnn = f(sys, n);
    let prefactor = f(sys, pa) * f(sys, sb) / (fnn * fnn) * interp_prefactor(spec);
    Ok(EvaluationReport::new(
        CaseKind::Case2,
        CASE2_SIGN_RULE.sign(n, l1, l2, m1, m2),
        prefactor,
        det_complex(&rows),
    ))
}

/// Case 3: `N + L₁ − M₁ ≤ 0` and `N + L₂ − M₂ ≤ 0`.
///
/// `G` has size `M₁ + M₂ − N`: rows `μ_k`, then `P_ℓ(η_j)` for
/// `ℓ < M₁−L₁−N`, then `ξ_α`; columns `η_j`, then `S_m(μ_k)` for
/// `m < M₂−L₂−N`, then `ζ_β`.
pub fn case3(sys: &BiorthogonalSystem, spec: &IntegrandSpec) -> Result<EvaluationReport> {
    spec.validate()?;
    let (a, c) = spec.combinations();
    if !(a <= 0 && c <= 0) {
        return Err(mismatch("Case3", spec));
    }
    let n = spec.n_pairs;
    let (pa, sb) = ((-a) as usize, (-c) as usize);
    sys.require_cap(n.max(pa).max(sb) - 1)?;
    spec.check_poles(sys)?;
    let (l1, l2, m1, m2) = spec.dims();
    let size = m1 + m2 - n;

    let mut rows = Vec::with_capacity(size);
    for &mu in &spec.mu {
        let mut row = Vec::with_capacity(size);
        for &eta in &spec.eta {
            row.push(h_kernel(sys.source(), mu, eta)?);
        }
        for m in 0..sb {
            row.push(sys.eval_s(m, mu)?);
        }
        for &zeta in &spec.zeta {
            row.push(cauchy(mu, zeta)?);
        }
        rows.push(row);
    }
    for l in 0..pa {
        let mut row = Vec::with_capacity(size);
        for &eta in &spec.eta {
            row.push(sys.eval_p(l, eta)?);
        }
        row.extend(std::iter::repeat_n(zero(), sb + l2));
        rows.push(row);
    }
    for &xi in &spec.xi {
        let mut row = Vec::with_capacity(size);
        for &eta in &spec.eta {
            row.push(cauchy(eta, xi)?);
        }
        row.extend(std::iter::repeat_n(zero(), sb + l2));
        rows.push(row);
    }
    let fnn = f(sys, n);
    let prefactor = f(sys, pa) * f(sys, sb) / (fnn * fnn) * interp_prefactor(spec);
    Ok(EvaluationReport::new(
        CaseKind::Case3,
        CASE3_SIGN_RULE.sign(n, l1, l2, m1, m2),
        prefactor,
        det_complex(&rows),
    ))
}
