//! One-matrix formulas, split on `N ≥ M` and `N < M`.

use super::{
    check_off_support, det_complex, parity, vandermonde, CaseKind, EvaluationReport, OneMatrixSpec,
};
use crate::biorth::OrthogonalSystem;
use crate::error::{Error, Result};
use crate::Complex;

fn prepare(sys: &OrthogonalSystem, spec: &OneMatrixSpec, needed: usize) -> Result<()> {
    spec.validate()?;
    sys.require_cap(needed)?;
    check_off_support(&spec.eta, sys.source().nodes(), "eta")
}

/// `N ≥ M`: `det [P_n(ξ_α); P̃_n(η_j)]` for `N−M ≤ n < N+L`.
pub fn one_matrix_ngm(sys: &OrthogonalSystem, spec: &OneMatrixSpec) -> Result<EvaluationReport> {
    let (n, l, m) = (spec.n, spec.xi.len(), spec.eta.len());
    if n < m {
        return Err(Error::CaseMismatch(format!(
            "N = {n} < M = {m}; use the N < M formula"
        )));
    }
    prepare(sys, spec, n + l - 1)?;
    let degrees = n - m..n + l;
    let mut rows = Vec::with_capacity(l + m);
    for &xi in &spec.xi {
        rows.push(
            degrees
                .clone()
                .map(|k| sys.eval_p(k, xi))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    for &eta in &spec.eta {
        rows.push(
            degrees
                .clone()
                .map(|k| sys.hilbert(k, eta))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    let fnn = sys.sqrt_h_prefix(n);
    let prefactor = sys.sqrt_h_prefix(n + l) * sys.sqrt_h_prefix(n - m)
        / (fnn * fnn * vandermonde(&spec.xi) * vandermonde(&spec.eta));
    Ok(EvaluationReport::new(
        CaseKind::OneNgM,
        parity(m * m.saturating_sub(1) / 2 + l * m),
        prefactor,
        det_complex(&rows),
    ))
}

/// `N < M`: block determinant `[P_b(ξ_α) | 0; P̃_b(η_j) | P_c(η_j)]` with
/// `b < N+L` and `c < M−N`.
pub fn one_matrix_mgn(sys: &OrthogonalSystem, spec: &OneMatrixSpec) -> Result<EvaluationReport> {
    let (n, l, m) = (spec.n, spec.xi.len(), spec.eta.len());
    if n >= m {
        return Err(Error::CaseMismatch(format!(
            "N = {n} >= M = {m}; use the N >= M formula"
        )));
    }
    let extra = m - n;
    prepare(sys, spec, (n + l).max(extra) - 1)?;
    let mut rows = Vec::with_capacity(l + m);
    for &xi in &spec.xi {
        let mut row = (0..n + l)
            .map(|k| sys.eval_p(k, xi))
            .collect::<Result<Vec<_>>>()?;
        row.extend(std::iter::repeat_n(Complex::new(0.0, 0.0), extra));
        rows.push(row);
    }
    for &eta in &spec.eta {
        let mut row = (0..n + l)
            .map(|k| sys.hilbert(k, eta))
            .collect::<Result<Vec<_>>>()?;
        for k in 0..extra {
            row.push(sys.eval_p(k, eta)?);
        }
        rows.push(row);
    }
    let fnn = sys.sqrt_h_prefix(n);
    let prefactor = sys.sqrt_h_prefix(extra) * sys.sqrt_h_prefix(n + l)
        / (fnn * fnn * vandermonde(&spec.xi) * vandermonde(&spec.eta));
    Ok(EvaluationReport::new(
        CaseKind::OneMgN,
        parity(n * (n - 1) / 2 + l * n),
        prefactor,
        det_complex(&rows),
    ))
}

/// Dispatch to [`one_matrix_ngm`] or [`one_matrix_mgn`].
pub fn one_matrix(sys: &OrthogonalSystem, spec: &OneMatrixSpec) -> Result<EvaluationReport> {
    if spec.n >= spec.eta.len() {
        one_matrix_ngm(sys, spec)
    } else {
        one_matrix_mgn(sys, spec)
    }
}
