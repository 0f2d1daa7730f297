//! Direct checks of the algebraic identities behind the formulas.
//!
//! Each check evaluates both sides independently and returns the residual
//! `|lhs − rhs| / max(1, |lhs|)`.

use crate::error::{Error, Result};
use crate::formulas::{det_complex, interp_prefactor, vandermonde, IntegrandSpec};
use crate::{Complex, NODE_SEPARATION};

/// Term budget for the ε-contraction in [`check_cauchy_binet`].
pub const CAUCHY_BINET_BUDGET: f64 = 1e7;

fn residual(lhs: Complex, rhs: Complex) -> f64 {
    (lhs - rhs).norm() / lhs.norm().max(1.0)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn parity(e: usize) -> f64 {
    if e.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Sign of a permutation given as a list of distinct indices.
fn perm_sign(p: &[usize]) -> f64 {
    let mut inversions = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inversions += 1;
            }
        }
    }
    parity(inversions)
}

/// All permutations of `items`, in lexicographic order of positions.
fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.is_empty() {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// Increasing `k`-subsets of `0..n`.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn check_separated(x: &[Complex], eta: &[Complex]) -> Result<()> {
    for (i, a) in x.iter().enumerate() {
        if x[..i].iter().any(|b| (a - b).norm() <= NODE_SEPARATION) {
            return Err(Error::CoincidentArguments(
                "x entries must be distinct".into(),
            ));
        }
        if eta.iter().any(|e| (a - e).norm() <= NODE_SEPARATION) {
            return Err(Error::CoincidentArguments(format!(
                "x entry {a} coincides with an eta entry"
            )));
        }
    }
    for (i, a) in eta.iter().enumerate() {
        if eta[..i].iter().any(|b| (a - b).norm() <= NODE_SEPARATION) {
            return Err(Error::CoincidentArguments(
                "eta entries must be distinct".into(),
            ));
        }
    }
    Ok(())
}

/// `Δ(x)Δ(η) / Π_{a,j}(η_j − x_a)`.
fn cauchy_lhs(x: &[Complex], eta: &[Complex]) -> Complex {
    let mut den = Complex::new(1.0, 0.0);
    for &e in eta {
        for &a in x {
            den *= e - a;
        }
    }
    vandermonde(x) * vandermonde(eta) / den
}

/// Partial-fraction expansion for `N ≥ M`: the left side expanded as a signed
/// sum over injections of the `M` poles into the `N` points, each term a
/// Vandermonde of the unused points over a product of simple poles.
pub fn check_partial_frac_1(x: &[Complex], eta: &[Complex]) -> Result<f64> {
    let (n, m) = (x.len(), eta.len());
    if n < m {
        return Err(Error::Invalid(format!(
            "needs N >= M, got N = {n}, M = {m}"
        )));
    }
    check_separated(x, eta)?;
    let mut rhs = Complex::new(0.0, 0.0);
    let ids: Vec<usize> = (0..m).collect();
    for sigma in permutations(&ids) {
        let s = perm_sign(&sigma);
        for chosen in combinations(n, m) {
            let rest: Vec<Complex> = (0..n)
                .filter(|i| !chosen.contains(i))
                .map(|i| x[i])
                .collect();
            let shift: usize = chosen.iter().map(|i| i + 1).sum();
            let mut den = Complex::new(1.0, 0.0);
            for (j, &a) in chosen.iter().enumerate() {
                den *= eta[sigma[j]] - x[a];
            }
            rhs += s * parity(shift) * vandermonde(&rest) / den;
        }
    }
    rhs *= parity(m * n);
    Ok(residual(cauchy_lhs(x, eta), rhs))
}

/// The companion expansion for `N ≤ M`: a sum over all orderings of the poles,
/// pairing the first `N` with the points and keeping a Vandermonde of the rest.
pub fn check_partial_frac_2(x: &[Complex], eta: &[Complex]) -> Result<f64> {
    let (n, m) = (x.len(), eta.len());
    if n > m {
        return Err(Error::Invalid(format!(
            "needs N <= M, got N = {n}, M = {m}"
        )));
    }
    check_separated(x, eta)?;
    let ids: Vec<usize> = (0..m).collect();
    let mut rhs = Complex::new(0.0, 0.0);
    for sigma in permutations(&ids) {
        let tail: Vec<Complex> = sigma[n..].iter().map(|&k| eta[k]).collect();
        let mut den = Complex::new(1.0, 0.0);
        for a in 0..n {
            den *= eta[sigma[a]] - x[a];
        }
        rhs += perm_sign(&sigma) * vandermonde(&tail) / den;
    }
    rhs *= parity(n * n.saturating_sub(1) / 2) / factorial(m - n);
    Ok(residual(cauchy_lhs(x, eta), rhs))
}

/// Component form of Cauchy–Binet: for `L` vectors `P^α`, `S^β` of length
/// `N + L`,
///
/// ```text
/// Σ ε_{j₁…j_N i₁…i_L} ε_{j₁…j_N k₁…k_L} P¹_{i₁}…P^L_{i_L} S¹_{k₁}…S^L_{k_L} = N! det[P^α·S^β]
/// ```
///
/// The left side is enumerated literally over `(N+L)!·L!` index assignments.
pub fn check_cauchy_binet(
    p_vectors: &[Vec<Complex>],
    s_vectors: &[Vec<Complex>],
    n_free: usize,
) -> Result<f64> {
    let l = p_vectors.len();
    let dim = n_free + l;
    if s_vectors.len() != l || p_vectors.iter().chain(s_vectors).any(|v| v.len() != dim) {
        return Err(Error::Invalid(format!(
            "expected {l} P and S vectors of length {dim}"
        )));
    }
    let terms = factorial(dim) * factorial(l);
    if terms > CAUCHY_BINET_BUDGET {
        return Err(Error::BudgetExceeded {
            terms,
            budget: CAUCHY_BINET_BUDGET as u64,
        });
    }
    let ids: Vec<usize> = (0..dim).collect();
    let mut lhs = Complex::new(0.0, 0.0);
    for full in permutations(&ids) {
        let s_full = perm_sign(&full);
        let (free, tail) = full.split_at(n_free);
        let p_term: Complex = (0..l).map(|a| p_vectors[a][tail[a]]).product();
        for k in permutations(tail) {
            let mut second = free.to_vec();
            second.extend_from_slice(&k);
            let s_term: Complex = (0..l).map(|a| s_vectors[a][k[a]]).product();
            lhs += s_full * perm_sign(&second) * p_term * s_term;
        }
    }
    let gram: Vec<Vec<Complex>> = p_vectors
        .iter()
        .map(|p| {
            s_vectors
                .iter()
                .map(|s| p.iter().zip(s).map(|(a, b)| a * b).sum())
                .collect()
        })
        .collect();
    let rhs = factorial(n_free) * det_complex(&gram);
    Ok(residual(lhs, rhs))
}

/// Cauchy-plus-monomial matrix `[1/(a_α − b_j) | a_α^k, k < L−M]`.
fn interpolation_matrix(a: &[Complex], b: &[Complex]) -> Vec<Vec<Complex>> {
    let extra = a.len() - b.len();
    a.iter()
        .map(|&ai| {
            let mut row: Vec<Complex> = b.iter().map(|&bj| 1.0 / (ai - bj)).collect();
            let mut pw = Complex::new(1.0, 0.0);
            for _ in 0..extra {
                row.push(pw);
                pw *= ai;
            }
            row
        })
        .collect()
}

/// The interpolation prefactor as an inverse product of two determinants:
/// `prefactor = (−1)^{M₁(M₁−1)/2 + M₂(M₂−1)/2} / (det G₁ det G₂)` with `G₁`
/// built from `(ξ, η)` and `G₂` from `(ζ, μ)`; needs `L₁ ≥ M₁`, `L₂ ≥ M₂`.
pub fn check_interpolation_prefactor(spec: &IntegrandSpec) -> Result<f64> {
    let (l1, l2, m1, m2) = spec.dims();
    if l1 < m1 || l2 < m2 {
        return Err(Error::Invalid("needs L1 >= M1 and L2 >= M2".into()));
    }
    check_separated(&spec.xi, &spec.eta)?;
    check_separated(&spec.zeta, &spec.mu)?;
    let g1 = det_complex(&interpolation_matrix(&spec.xi, &spec.eta));
    let g2 = det_complex(&interpolation_matrix(&spec.zeta, &spec.mu));
    let sign = parity(m1 * m1.saturating_sub(1) / 2 + m2 * m2.saturating_sub(1) / 2);
    Ok(residual(interp_prefactor(spec), sign / (g1 * g2)))
}
