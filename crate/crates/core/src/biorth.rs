//! Biorthogonal and orthogonal polynomial systems built from moment data.
//!
//! The moment matrix `B` is factored as `B = L·D·U` with unit-triangular `L`, `U`
//! and no pivoting. Row `n` of `L⁻¹` holds the monic `p_n`, column `n` of `U⁻¹`
//! the monic `s_n`, and `h_n = D_nn`. The normalized polynomials are
//! `P_n = p_n / √h_n`, `S_n = s_n / √h_n` with the principal square root.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::measure::{min_distance, DiscreteBiMeasure, DiscreteMeasure};
use crate::{Complex, POLE_SEPARATION};

/// Relative pivot threshold of the LDU factorization.
pub const PIVOT_TOLERANCE: f64 = 1e-12;

/// `{P_n, S_n}` with `∫ P_j S_k dμ = δ_jk` for `j, k ≤ degree_cap`.
#[derive(Debug, Clone)]
pub struct BiorthogonalSystem {
    p_coeffs: Vec<Vec<Complex>>,
    s_coeffs: Vec<Vec<Complex>>,
    h: Vec<Complex>,
    sqrt_h: Vec<Complex>,
    source: Arc<DiscreteBiMeasure>,
}

/// `{P_n}` with `∫ P_n P_m dμ = δ_nm` for `n, m ≤ degree_cap`.
#[derive(Debug, Clone)]
pub struct OrthogonalSystem {
    p_coeffs: Vec<Vec<Complex>>,
    h: Vec<Complex>,
    sqrt_h: Vec<Complex>,
    source: Arc<DiscreteMeasure>,
}

struct Factors {
    /// Rows of `L⁻¹` (monic `p_n` coefficients, lowest degree first).
    left: Vec<Vec<Complex>>,
    /// Columns of `U⁻¹` (monic `s_n` coefficients).
    right: Vec<Vec<Complex>>,
    pivots: Vec<Complex>,
}

/// Inverse of a unit lower-triangular matrix, returned row by row (row `n` has `n+1` entries).
fn unit_lower_inverse(lower: &[Vec<Complex>]) -> Vec<Vec<Complex>> {
    let n = lower.len();
    let mut inv: Vec<Vec<Complex>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = vec![Complex::new(0.0, 0.0); i + 1];
        row[i] = Complex::new(1.0, 0.0);
        for m in 0..i {
            let mut acc = Complex::new(0.0, 0.0);
            for k in m..i {
                acc += lower[i][k] * inv[k][m];
            }
            row[m] = -acc;
        }
        inv.push(row);
    }
    inv
}

fn ldu(matrix: &[Vec<Complex>]) -> Result<Factors> {
    let n = matrix.len();
    let mut a: Vec<Vec<Complex>> = matrix.to_vec();
    let zero = Complex::new(0.0, 0.0);
    let mut lower = vec![vec![zero; n]; n];
    // Stored transposed so that `unit_lower_inverse` serves both factors.
    let mut upper_t = vec![vec![zero; n]; n];
    let mut pivots = Vec::with_capacity(n);
    let mut scale = 0.0f64;
    for k in 0..n {
        for i in 0..=k {
            scale = scale.max(matrix[k][i].norm()).max(matrix[i][k].norm());
        }
        let d = a[k][k];
        if d.norm() < PIVOT_TOLERANCE * scale || d.norm() == 0.0 {
            return Err(Error::SingularMinor {
                size: k + 1,
                pivot: d.norm(),
                scale,
            });
        }
        lower[k][k] = Complex::new(1.0, 0.0);
        upper_t[k][k] = Complex::new(1.0, 0.0);
        for i in k + 1..n {
            lower[i][k] = a[i][k] / d;
            upper_t[i][k] = a[k][i] / d;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] -= lower[i][k] * d * upper_t[j][k];
            }
        }
        pivots.push(d);
    }
    Ok(Factors {
        left: unit_lower_inverse(&lower),
        right: unit_lower_inverse(&upper_t),
        pivots,
    })
}

fn normalize(monic: Vec<Vec<Complex>>, sqrt_h: &[Complex]) -> Vec<Vec<Complex>> {
    monic
        .into_iter()
        .zip(sqrt_h)
        .map(|(row, s)| row.into_iter().map(|c| c / s).collect())
        .collect()
}

fn horner(coeffs: &[Complex], z: Complex) -> Complex {
    coeffs
        .iter()
        .rev()
        .fold(Complex::new(0.0, 0.0), |acc, c| acc * z + c)
}

fn check_pole(z: Complex, nodes: &[Complex], what: &'static str) -> Result<()> {
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

/// Largest cap `≤ limit` for which `build(cap)` succeeds; a failing minor of
/// size `s` means the first `s − 1` polynomials still exist.
fn largest_cap<T>(limit: usize, build: impl Fn(usize) -> Result<T>) -> Result<T> {
    let mut cap = limit;
    loop {
        match build(cap) {
            Err(Error::SingularMinor { size, .. }) if size >= 2 && size - 2 < cap => cap = size - 2,
            other => return other,
        }
    }
}

impl BiorthogonalSystem {
    /// Gram–Schmidt by LDU on the bimoment matrix, degrees `0..=degree_cap`.
    pub fn new(measure: Arc<DiscreteBiMeasure>, degree_cap: usize) -> Result<Self> {
        let table = measure.bimoments(degree_cap);
        let f = ldu(&table.entries)?;
        let sqrt_h: Vec<Complex> = f.pivots.iter().map(|h| h.sqrt()).collect();
        Ok(Self {
            p_coeffs: normalize(f.left, &sqrt_h),
            s_coeffs: normalize(f.right, &sqrt_h),
            h: f.pivots,
            sqrt_h,
            source: measure,
        })
    }

    /// The system with the largest degree cap not exceeding `limit`.
    pub fn largest(measure: Arc<DiscreteBiMeasure>, limit: usize) -> Result<Self> {
        largest_cap(limit, |cap| Self::new(measure.clone(), cap))
    }

    pub fn degree_cap(&self) -> usize {
        self.h.len() - 1
    }

    pub fn h(&self) -> &[Complex] {
        &self.h
    }

    pub fn sqrt_h(&self) -> &[Complex] {
        &self.sqrt_h
    }

    pub fn source(&self) -> &DiscreteBiMeasure {
        &self.source
    }

    pub fn source_arc(&self) -> &Arc<DiscreteBiMeasure> {
        &self.source
    }

    /// Monomial coefficients of `P_n`, lowest degree first.
    pub fn p_coeffs(&self, n: usize) -> Result<&[Complex]> {
        self.check_degree(n)?;
        Ok(&self.p_coeffs[n])
    }

    pub fn s_coeffs(&self, n: usize) -> Result<&[Complex]> {
        self.check_degree(n)?;
        Ok(&self.s_coeffs[n])
    }

    fn check_degree(&self, n: usize) -> Result<()> {
        if n > self.degree_cap() {
            return Err(Error::DegreeOutOfRange {
                n,
                cap: self.degree_cap(),
            });
        }
        Ok(())
    }

    pub(crate) fn require_cap(&self, needed: usize) -> Result<()> {
        if needed > self.degree_cap() {
            return Err(Error::CapExceeded {
                needed,
                cap: self.degree_cap(),
            });
        }
        Ok(())
    }

    pub fn eval_p(&self, n: usize, x: Complex) -> Result<Complex> {
        Ok(horner(self.p_coeffs(n)?, x))
    }

    pub fn eval_s(&self, n: usize, y: Complex) -> Result<Complex> {
        Ok(horner(self.s_coeffs(n)?, y))
    }

    /// `P̃_n(μ) = ∫ dμ(x,y) P_n(x) / (μ − y)`.
    pub fn hilbert_p(&self, n: usize, mu: Complex) -> Result<Complex> {
        self.check_degree(n)?;
        let m = &*self.source;
        check_pole(mu, m.y_nodes(), "mu")?;
        let mut acc = Complex::new(0.0, 0.0);
        for (p, &x) in m.x_nodes().iter().enumerate() {
            let px = horner(&self.p_coeffs[n], x);
            for (q, &y) in m.y_nodes().iter().enumerate() {
                acc += m.weight(p, q) * px / (mu - y);
            }
        }
        Ok(acc)
    }

    /// `S̃_n(η) = ∫ dμ(x,y) S_n(y) / (η − x)`.
    pub fn hilbert_s(&self, n: usize, eta: Complex) -> Result<Complex> {
        self.check_degree(n)?;
        let m = &*self.source;
        check_pole(eta, m.x_nodes(), "eta")?;
        let sy: Vec<Complex> = m
            .y_nodes()
            .iter()
            .map(|&y| horner(&self.s_coeffs[n], y))
            .collect();
        let mut acc = Complex::new(0.0, 0.0);
        for (p, &x) in m.x_nodes().iter().enumerate() {
            let r = Complex::new(1.0, 0.0) / (eta - x);
            for (q, s) in sy.iter().enumerate() {
                acc += m.weight(p, q) * s * r;
            }
        }
        Ok(acc)
    }

    /// The system of the transposed bimeasure: `P` and `S` exchange roles.
    ///
    /// `Bᵀ = Uᵀ·D·Lᵀ`, so no refactorization is needed and the result is
    /// bit-identical to biorthogonalizing the transpose.
    pub fn swapped(&self) -> Self {
        Self {
            p_coeffs: self.s_coeffs.clone(),
            s_coeffs: self.p_coeffs.clone(),
            h: self.h.clone(),
            sqrt_h: self.sqrt_h.clone(),
            source: Arc::new(self.source.transposed()),
        }
    }

    /// `Π_{n<count} √h_n`.
    pub(crate) fn sqrt_h_prefix(&self, count: usize) -> Complex {
        self.sqrt_h[..count].iter().product()
    }

    /// `max_{j,k} |∫ P_j S_k dμ − δ_jk|` by direct summation.
    pub fn biorthogonality_residual(&self) -> f64 {
        let m = &*self.source;
        let n = self.degree_cap() + 1;
        let px: Vec<Vec<Complex>> = m
            .x_nodes()
            .iter()
            .map(|&x| (0..n).map(|j| horner(&self.p_coeffs[j], x)).collect())
            .collect();
        let sy: Vec<Vec<Complex>> = m
            .y_nodes()
            .iter()
            .map(|&y| (0..n).map(|k| horner(&self.s_coeffs[k], y)).collect())
            .collect();
        let mut worst = 0.0f64;
        for j in 0..n {
            for k in 0..n {
                let mut acc = Complex::new(0.0, 0.0);
                for (p, pr) in px.iter().enumerate() {
                    for (q, sr) in sy.iter().enumerate() {
                        acc += m.weight(p, q) * pr[j] * sr[k];
                    }
                }
                let delta = if j == k { 1.0 } else { 0.0 };
                worst = worst.max((acc - delta).norm());
            }
        }
        worst
    }
}

/// Free-function form of [`BiorthogonalSystem::new`].
pub fn biorthogonalize(m: &DiscreteBiMeasure, degree_cap: usize) -> Result<BiorthogonalSystem> {
    BiorthogonalSystem::new(Arc::new(m.clone()), degree_cap)
}

/// Free-function form of [`OrthogonalSystem::new`].
pub fn orthogonalize(m: &DiscreteMeasure, degree_cap: usize) -> Result<OrthogonalSystem> {
    OrthogonalSystem::new(Arc::new(m.clone()), degree_cap)
}

impl OrthogonalSystem {
    /// Factorization of the Hankel moment matrix `M_jk = m_{j+k}`.
    pub fn new(measure: Arc<DiscreteMeasure>, degree_cap: usize) -> Result<Self> {
        let mom = measure.moments(degree_cap);
        let n = degree_cap + 1;
        let hankel: Vec<Vec<Complex>> = (0..n).map(|j| mom[j..j + n].to_vec()).collect();
        let f = ldu(&hankel)?;
        let sqrt_h: Vec<Complex> = f.pivots.iter().map(|h| h.sqrt()).collect();
        Ok(Self {
            p_coeffs: normalize(f.left, &sqrt_h),
            h: f.pivots,
            sqrt_h,
            source: measure,
        })
    }

    pub fn largest(measure: Arc<DiscreteMeasure>, limit: usize) -> Result<Self> {
        largest_cap(limit, |cap| Self::new(measure.clone(), cap))
    }

    pub fn degree_cap(&self) -> usize {
        self.h.len() - 1
    }

    pub fn h(&self) -> &[Complex] {
        &self.h
    }

    pub fn source(&self) -> &DiscreteMeasure {
        &self.source
    }

    pub fn p_coeffs(&self, n: usize) -> Result<&[Complex]> {
        if n > self.degree_cap() {
            return Err(Error::DegreeOutOfRange {
                n,
                cap: self.degree_cap(),
            });
        }
        Ok(&self.p_coeffs[n])
    }

    pub(crate) fn require_cap(&self, needed: usize) -> Result<()> {
        if needed > self.degree_cap() {
            return Err(Error::CapExceeded {
                needed,
                cap: self.degree_cap(),
            });
        }
        Ok(())
    }

    pub fn eval_p(&self, n: usize, x: Complex) -> Result<Complex> {
        Ok(horner(self.p_coeffs(n)?, x))
    }

    /// `P̃_n(η) = ∫ dμ(x) P_n(x) / (η − x)`.
    pub fn hilbert(&self, n: usize, eta: Complex) -> Result<Complex> {
        let coeffs = self.p_coeffs(n)?;
        check_pole(eta, self.source.nodes(), "eta")?;
        Ok(self.source.integrate(|x| horner(coeffs, x) / (eta - x)))
    }

    pub(crate) fn sqrt_h_prefix(&self, count: usize) -> Complex {
        self.sqrt_h[..count].iter().product()
    }

    /// `max_{n,m} |∫ P_n P_m dμ − δ_nm|`.
    pub fn orthogonality_residual(&self) -> f64 {
        let n = self.degree_cap() + 1;
        let mut worst = 0.0f64;
        for j in 0..n {
            for k in 0..n {
                let v = self
                    .source
                    .integrate(|x| horner(&self.p_coeffs[j], x) * horner(&self.p_coeffs[k], x));
                let delta = if j == k { 1.0 } else { 0.0 };
                worst = worst.max((v - delta).norm());
            }
        }
        worst
    }
}
