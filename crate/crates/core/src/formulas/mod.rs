//! Determinantal evaluation of normalized integrals of rational symmetric
//! functions.
//!
//! For the two-matrix model the target is
//!
//! ```text
//! I_N = (1/Z_N) ∫ Π_a dμ(x_a, y_a) Δ(x) Δ(y)
//!         Π_{a,α} (ξ_α − x_a) Π_{a,β} (ζ_β − y_a) / (Π_{a,j} (η_j − x_a) Π_{a,k} (μ_k − y_a))
//! ```
//!
//! and three determinantal formulas cover the three sign regimes of
//! `N + L₁ − M₁` and `N + L₂ − M₂`. The one-matrix analogue uses `Δ(x)²` and
//! two formulas split on `N ≥ M`.

mod modified;
mod one;
mod two;

use crate::biorth::{BiorthogonalSystem, OrthogonalSystem};
use crate::error::{Error, Result};
use crate::measure::min_distance;
use crate::oracle::{self, OracleBudget};
use crate::{Complex, NODE_SEPARATION, POLE_SEPARATION};

pub use modified::{modified_biorth, PolyKind};
pub use one::{one_matrix, one_matrix_mgn, one_matrix_ngm};
pub use two::{
    case1, case1_matrix, case2, case3, Case2SignRule, Case3SignRule, CASE2_SIGN_RULE,
    CASE3_SIGN_RULE,
};

/// Parameters of a two-matrix integrand: `N` pairs, numerator points `ξ` (x side)
/// and `ζ` (y side), pole points `η` (x side) and `μ` (y side).
#[derive(Debug, Clone, PartialEq)]
pub struct IntegrandSpec {
    pub n_pairs: usize,
    pub xi: Vec<Complex>,
    pub zeta: Vec<Complex>,
    pub eta: Vec<Complex>,
    pub mu: Vec<Complex>,
}

/// Parameters of a one-matrix integrand.
#[derive(Debug, Clone, PartialEq)]
pub struct OneMatrixSpec {
    pub n: usize,
    pub xi: Vec<Complex>,
    pub eta: Vec<Complex>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseKind {
    Case1,
    Case2,
    Case3,
    OneNgM,
    OneMgN,
}

impl CaseKind {
    pub fn name(self) -> &'static str {
        match self {
            CaseKind::Case1 => "Case1",
            CaseKind::Case2 => "Case2",
            CaseKind::Case3 => "Case3",
            CaseKind::OneNgM => "OneNgM",
            CaseKind::OneMgN => "OneMgN",
        }
    }
}

impl std::fmt::Display for CaseKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Result of one formula evaluation, with its factorization
/// `value = sign_factor · prefactor · g_det`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub value: Complex,
    pub case_used: CaseKind,
    pub swapped: bool,
    pub sign_factor: Complex,
    pub prefactor: Complex,
    pub g_det: Complex,
    pub oracle_value: Option<Complex>,
    pub abs_residual: Option<f64>,
}

impl EvaluationReport {
    pub(crate) fn new(case_used: CaseKind, sign: f64, prefactor: Complex, g_det: Complex) -> Self {
        let sign_factor = Complex::new(sign, 0.0);
        Self {
            value: sign_factor * prefactor * g_det,
            case_used,
            swapped: false,
            sign_factor,
            prefactor,
            g_det,
            oracle_value: None,
            abs_residual: None,
        }
    }

    /// `|value − oracle| / max(|oracle|, 1e−10)`, when an oracle value is attached.
    pub fn rel_residual(&self) -> Option<f64> {
        self.oracle_value
            .map(|o| (self.value - o).norm() / o.norm().max(1e-10))
    }

    fn attach_oracle(&mut self, oracle: Complex) {
        self.oracle_value = Some(oracle);
        self.abs_residual = Some((self.value - oracle).norm());
    }
}

fn check_list_distinct(list: &[Complex], what: &str) -> Result<()> {
    for i in 0..list.len() {
        for j in 0..i {
            if (list[i] - list[j]).norm() <= NODE_SEPARATION {
                return Err(Error::CoincidentArguments(format!(
                    "{what}[{j}] and {what}[{i}] coincide"
                )));
            }
        }
    }
    Ok(())
}

pub(crate) fn check_off_support(
    list: &[Complex],
    nodes: &[Complex],
    what: &'static str,
) -> Result<()> {
    for &z in list {
        if min_distance(z, nodes) <= POLE_SEPARATION {
            return Err(Error::PoleOnSupport {
                what,
                re: z.re,
                im: z.im,
                tol: POLE_SEPARATION,
            });
        }
    }
    Ok(())
}

impl IntegrandSpec {
    pub fn new(
        n_pairs: usize,
        xi: Vec<Complex>,
        zeta: Vec<Complex>,
        eta: Vec<Complex>,
        mu: Vec<Complex>,
    ) -> Result<Self> {
        let spec = Self {
            n_pairs,
            xi,
            zeta,
            eta,
            mu,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// `N ≥ 1` and pairwise distinct values within each list.
    pub fn validate(&self) -> Result<()> {
        if self.n_pairs == 0 {
            return Err(Error::Invalid("N must be at least 1".into()));
        }
        for (list, what) in [
            (&self.xi, "xi"),
            (&self.zeta, "zeta"),
            (&self.eta, "eta"),
            (&self.mu, "mu"),
        ] {
            check_list_distinct(list, what)?;
            if let Some(z) = list.iter().find(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NonFinite(format!("{what} contains {z}")));
            }
        }
        Ok(())
    }

    /// `(L₁, L₂, M₁, M₂)`.
    pub fn dims(&self) -> (usize, usize, usize, usize) {
        (
            self.xi.len(),
            self.zeta.len(),
            self.eta.len(),
            self.mu.len(),
        )
    }

    /// `(N + L₁ − M₁, N + L₂ − M₂)`.
    pub fn combinations(&self) -> (i64, i64) {
        let n = self.n_pairs as i64;
        let (l1, l2, m1, m2) = self.dims();
        (n + l1 as i64 - m1 as i64, n + l2 as i64 - m2 as i64)
    }

    /// The spec with the roles of x and y exchanged: `(ξ, η) ↔ (ζ, μ)`.
    pub fn swapped(&self) -> Self {
        Self {
            n_pairs: self.n_pairs,
            xi: self.zeta.clone(),
            zeta: self.xi.clone(),
            eta: self.mu.clone(),
            mu: self.eta.clone(),
        }
    }

    pub(crate) fn check_poles(&self, sys: &BiorthogonalSystem) -> Result<()> {
        check_off_support(&self.eta, sys.source().x_nodes(), "eta")?;
        check_off_support(&self.mu, sys.source().y_nodes(), "mu")
    }
}

impl OneMatrixSpec {
    pub fn new(n: usize, xi: Vec<Complex>, eta: Vec<Complex>) -> Result<Self> {
        let spec = Self { n, xi, eta };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Invalid("N must be at least 1".into()));
        }
        check_list_distinct(&self.xi, "xi")?;
        check_list_distinct(&self.eta, "eta")
    }
}

/// `Δ(p) = Π_{i>j} (p_i − p_j)`.
pub fn vandermonde(points: &[Complex]) -> Complex {
    let mut acc = Complex::new(1.0, 0.0);
    for i in 0..points.len() {
        for j in 0..i {
            acc *= points[i] - points[j];
        }
    }
    acc
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `Z_N = N! Π_{n<N} h_n` for the two-matrix model.
pub fn partition_z2(sys: &BiorthogonalSystem, n: usize) -> Result<Complex> {
    if n > 0 {
        sys.require_cap(n - 1)?;
    }
    Ok(sys.h()[..n].iter().product::<Complex>() * factorial(n))
}

/// `Z_N = N! Π_{n<N} h_n` for the one-matrix model.
pub fn partition_z1(sys: &OrthogonalSystem, n: usize) -> Result<Complex> {
    if n > 0 {
        sys.require_cap(n - 1)?;
    }
    Ok(sys.h()[..n].iter().product::<Complex>() * factorial(n))
}

fn parity(exponent: usize) -> f64 {
    if exponent.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `(−1)^{(M₁+M₂)(M₁+M₂−1)/2 + L₁M₂}`; `L₂` does not enter.
pub fn epsilon_sign(l1: usize, _l2: usize, m1: usize, m2: usize) -> f64 {
    let m = m1 + m2;
    parity(m * m.saturating_sub(1) / 2 + l1 * m2)
}

/// `Π(ξ_α − η_j) Π(ζ_β − μ_k) / (Δ(ξ) Δ(ζ) Δ(η) Δ(μ))`.
pub fn interp_prefactor(spec: &IntegrandSpec) -> Complex {
    let mut num = Complex::new(1.0, 0.0);
    for &a in &spec.xi {
        for &e in &spec.eta {
            num *= a - e;
        }
    }
    for &z in &spec.zeta {
        for &m in &spec.mu {
            num *= z - m;
        }
    }
    num / (vandermonde(&spec.xi)
        * vandermonde(&spec.zeta)
        * vandermonde(&spec.eta)
        * vandermonde(&spec.mu))
}

/// Determinant by LU with partial pivoting; the empty matrix has determinant 1.
pub fn det_complex(matrix: &[Vec<Complex>]) -> Complex {
    let n = matrix.len();
    let mut a: Vec<Vec<Complex>> = matrix.to_vec();
    debug_assert!(a.iter().all(|r| r.len() == n), "matrix must be square");
    let mut det = Complex::new(1.0, 0.0);
    for k in 0..n {
        let pivot_row = (k..n)
            .max_by(|&i, &j| a[i][k].norm().total_cmp(&a[j][k].norm()))
            .expect("nonempty range");
        if a[pivot_row][k].norm() == 0.0 {
            return Complex::new(0.0, 0.0);
        }
        if pivot_row != k {
            a.swap(pivot_row, k);
            det = -det;
        }
        let pivot = a[k][k];
        det *= pivot;
        for i in k + 1..n {
            let factor = a[i][k] / pivot;
            if factor.norm() == 0.0 {
                continue;
            }
            for j in k + 1..n {
                let t = a[k][j];
                a[i][j] -= factor * t;
            }
        }
    }
    det
}

/// Evaluate `I_N` for a two-matrix spec, dispatching on the sign regime.
///
/// Case 1 needs both combinations `a = N + L₁ − M₁`, `c = N + L₂ − M₂`
/// nonnegative with `a ≥ c`; Case 2 needs `a ≥ 0 ≥ c`. Specs in the mirrored
/// regimes are evaluated on the swapped system (transposed measure, `P ↔ S`)
/// with the swapped spec, which leaves the integral unchanged.
pub fn integral_two(
    sys: &BiorthogonalSystem,
    spec: &IntegrandSpec,
    with_oracle: bool,
) -> Result<EvaluationReport> {
    integral_two_with_budget(sys, spec, with_oracle.then(OracleBudget::default))
}

/// [`integral_two`] with an explicit oracle budget (`None` skips the oracle).
pub fn integral_two_with_budget(
    sys: &BiorthogonalSystem,
    spec: &IntegrandSpec,
    oracle_budget: Option<OracleBudget>,
) -> Result<EvaluationReport> {
    spec.validate()?;
    spec.check_poles(sys)?;
    let (case, swap) = dispatch(spec);
    let mut report = if swap {
        let sys = sys.swapped();
        let spec = spec.swapped();
        match case {
            CaseKind::Case1 => case1(&sys, &spec)?,
            _ => case2(&sys, &spec)?,
        }
    } else {
        match case {
            CaseKind::Case1 => case1(sys, spec)?,
            CaseKind::Case2 => case2(sys, spec)?,
            _ => case3(sys, spec)?,
        }
    };
    report.swapped = swap;
    if let Some(budget) = oracle_budget {
        report.attach_oracle(oracle::oracle_two(sys.source(), spec, budget)?);
    }
    Ok(report)
}

/// Which case formula evaluates `spec`, and whether x and y are swapped first.
pub fn dispatch(spec: &IntegrandSpec) -> (CaseKind, bool) {
    let (a, c) = spec.combinations();
    if a >= 0 && c >= 0 {
        (CaseKind::Case1, a < c)
    } else if a <= 0 && c <= 0 {
        (CaseKind::Case3, false)
    } else {
        (CaseKind::Case2, a < 0)
    }
}

/// Evaluate a one-matrix spec with an optional oracle comparison.
pub fn integral_one(
    sys: &OrthogonalSystem,
    spec: &OneMatrixSpec,
    oracle_budget: Option<OracleBudget>,
) -> Result<EvaluationReport> {
    let mut report = one_matrix(sys, spec)?;
    if let Some(budget) = oracle_budget {
        report.attach_oracle(oracle::oracle_one(sys.source(), spec, budget)?);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::biorth::{biorthogonalize, orthogonalize};
    use crate::c;
    use crate::measure::catalog::*;

    fn reals(v: &[f64]) -> Vec<Complex> {
        v.iter().map(|&x| c(x, 0.0)).collect()
    }

    #[test]
    fn vandermonde_examples() {
        assert_eq!(vandermonde(&[]), c(1.0, 0.0));
        assert_eq!(vandermonde(&[c(5.0, 0.0)]), c(1.0, 0.0));
        assert_eq!(vandermonde(&reals(&[1.0, 2.0])), c(1.0, 0.0));
        assert_eq!(vandermonde(&reals(&[1.0, 2.0, 3.0])), c(2.0, 0.0));
    }

    #[test]
    fn partition_examples() {
        let s = biorthogonalize(&coupled_sign(0.5), 1).unwrap();
        assert!((partition_z2(&s, 1).unwrap() - 1.0).norm() < 1e-15);
        assert!((partition_z2(&s, 2).unwrap() - 1.0).norm() < 1e-15);
        assert!(matches!(
            partition_z2(&s, 3),
            Err(Error::CapExceeded { .. })
        ));
        let g = biorthogonalize(&exp_xy_grid3(), 2).unwrap();
        assert_eq!(partition_z2(&g, 1).unwrap(), g.h()[0]);

        let t = orthogonalize(&two_point(), 1).unwrap();
        assert!((partition_z1(&t, 1).unwrap() - 1.0).norm() < 1e-15);
        assert!((partition_z1(&t, 2).unwrap() - 2.0).norm() < 1e-15);
    }

    #[test]
    fn epsilon_examples() {
        assert_eq!(epsilon_sign(0, 0, 0, 0), 1.0);
        assert_eq!(epsilon_sign(1, 0, 0, 1), -1.0);
        assert_eq!(epsilon_sign(2, 1, 1, 2), -1.0);
    }

    #[test]
    fn interp_prefactor_examples() {
        let empty = IntegrandSpec::new(1, vec![], vec![], vec![], vec![]).unwrap();
        assert_eq!(interp_prefactor(&empty), c(1.0, 0.0));
        let s = IntegrandSpec::new(1, reals(&[2.0]), vec![], reals(&[1.0]), vec![]).unwrap();
        assert_eq!(interp_prefactor(&s), c(1.0, 0.0));
        let s = IntegrandSpec::new(1, reals(&[2.0, 3.0]), vec![], reals(&[1.0]), vec![]).unwrap();
        assert_eq!(interp_prefactor(&s), c(2.0, 0.0));
    }

    #[test]
    fn det_examples() {
        let id: Vec<Vec<Complex>> = (0..3)
            .map(|i| {
                (0..3)
                    .map(|j| c(if i == j { 1.0 } else { 0.0 }, 0.0))
                    .collect()
            })
            .collect();
        assert_eq!(det_complex(&id), c(1.0, 0.0));
        assert_eq!(det_complex(&[]), c(1.0, 0.0));
        let swap = vec![reals(&[0.0, 1.0]), reals(&[1.0, 0.0])];
        assert_eq!(det_complex(&swap), c(-1.0, 0.0));
        let m = vec![reals(&[1.0, 2.0]), reals(&[3.0, 4.0])];
        assert!((det_complex(&m) + 2.0).norm() < 1e-14);
        let singular = vec![reals(&[1.0, 2.0]), reals(&[2.0, 4.0])];
        assert!(det_complex(&singular).norm() < 1e-14);
    }

    #[test]
    fn spec_validation() {
        assert!(matches!(
            IntegrandSpec::new(0, vec![], vec![], vec![], vec![]),
            Err(Error::Invalid(_))
        ));
        assert!(matches!(
            IntegrandSpec::new(1, reals(&[2.0, 2.0]), vec![], vec![], vec![]),
            Err(Error::CoincidentArguments(_))
        ));
        assert!(matches!(
            OneMatrixSpec::new(1, vec![], reals(&[3.0, 3.0])),
            Err(Error::CoincidentArguments(_))
        ));
    }

    fn dims_spec(n: usize, l1: usize, m1: usize, l2: usize, m2: usize) -> IntegrandSpec {
        let pts = |k: usize, r: f64| (0..k).map(|i| c(r, i as f64)).collect::<Vec<_>>();
        IntegrandSpec::new(n, pts(l1, 2.0), pts(l2, 2.5), pts(m1, 3.0), pts(m2, 3.5)).unwrap()
    }

    #[test]
    fn dispatch_examples() {
        // Tuples are (N, L₁, M₁, L₂, M₂).
        assert_eq!(
            dispatch(&dims_spec(2, 1, 0, 1, 0)),
            (CaseKind::Case1, false)
        );
        assert_eq!(
            dispatch(&dims_spec(1, 0, 0, 1, 3)),
            (CaseKind::Case2, false)
        );
        assert_eq!(dispatch(&dims_spec(1, 1, 3, 0, 0)), (CaseKind::Case2, true));
        assert_eq!(
            dispatch(&dims_spec(1, 0, 2, 0, 3)),
            (CaseKind::Case3, false)
        );
        assert_eq!(dispatch(&dims_spec(1, 0, 0, 2, 0)), (CaseKind::Case1, true));
        assert_eq!(
            dispatch(&dims_spec(1, 0, 1, 0, 3)),
            (CaseKind::Case3, false)
        );
    }

    #[test]
    fn integral_two_pole_check() {
        let s = biorthogonalize(&coupled_sign(0.5), 1).unwrap();
        let spec = IntegrandSpec::new(1, vec![], vec![], vec![], reals(&[1.0])).unwrap();
        assert!(matches!(
            integral_two(&s, &spec, false),
            Err(Error::PoleOnSupport { .. })
        ));
    }

    #[test]
    fn report_factorization_is_consistent() {
        let s = biorthogonalize(&exp_xy_grid3(), 2).unwrap();
        let spec = IntegrandSpec::new(
            2,
            vec![c(1.0, 1.0)],
            vec![c(2.0, 0.0)],
            vec![c(0.0, 3.0)],
            vec![c(-2.0, 0.0)],
        )
        .unwrap();
        let r = integral_two(&s, &spec, true).unwrap();
        let prod = r.sign_factor * r.prefactor * r.g_det;
        assert!((r.value - prod).norm() <= 1e-13 * r.value.norm());
        assert!(r.rel_residual().unwrap() < 1e-8);
    }
}
