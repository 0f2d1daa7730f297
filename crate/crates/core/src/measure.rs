//! Complex measures and bimeasures with finite discrete support.
//!
//! Continuous weights only enter through [`gauss_legendre_discretize`], so every
//! integral downstream is a finite sum.

use crate::error::{Error, Result};
use crate::{Complex, NODE_SEPARATION};

/// One-variable measure `Σ_p w_p δ(x − x_p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    nodes: Vec<Complex>,
    weights: Vec<Complex>,
}

/// Two-variable measure `Σ_{p,q} w_{pq} δ(x − x_p) δ(y − y_q)` on a product grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteBiMeasure {
    x_nodes: Vec<Complex>,
    y_nodes: Vec<Complex>,
    /// Row-major, `weights[p * y_nodes.len() + q]`.
    weights: Vec<Complex>,
}

/// Bimoments `B[j][k] = Σ w_{pq} x_p^j y_q^k` for `0 ≤ j, k ≤ degree_cap`.
#[derive(Debug, Clone, PartialEq)]
pub struct BimomentTable {
    pub entries: Vec<Vec<Complex>>,
    pub degree_cap: usize,
}

fn check_finite(values: &[Complex], what: &str) -> Result<()> {
    match values
        .iter()
        .position(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        Some(i) => Err(Error::NonFinite(format!("{what}[{i}] = {}", values[i]))),
        None => Ok(()),
    }
}

fn check_distinct(values: &[Complex], what: &str) -> Result<()> {
    for i in 0..values.len() {
        for j in 0..i {
            if (values[i] - values[j]).norm() <= NODE_SEPARATION {
                return Err(Error::DuplicateNode(format!(
                    "{what}[{j}] and {what}[{i}] are closer than {NODE_SEPARATION:e}"
                )));
            }
        }
    }
    Ok(())
}

/// Smallest distance from `z` to any of `nodes` (infinity when empty).
pub(crate) fn min_distance(z: Complex, nodes: &[Complex]) -> f64 {
    nodes
        .iter()
        .map(|n| (z - n).norm())
        .fold(f64::INFINITY, f64::min)
}

fn powers(z: Complex, max: usize) -> Vec<Complex> {
    let mut out = Vec::with_capacity(max + 1);
    let mut acc = Complex::new(1.0, 0.0);
    for _ in 0..=max {
        out.push(acc);
        acc *= z;
    }
    out
}

impl DiscreteMeasure {
    pub fn new(nodes: Vec<Complex>, weights: Vec<Complex>) -> Result<Self> {
        if nodes.len() != weights.len() {
            return Err(Error::Invalid(format!(
                "{} nodes but {} weights",
                nodes.len(),
                weights.len()
            )));
        }
        check_finite(&nodes, "nodes")?;
        check_finite(&weights, "weights")?;
        check_distinct(&nodes, "nodes")?;
        if weights.iter().all(|w| *w == Complex::new(0.0, 0.0)) {
            return Err(Error::Invalid("all weights are zero".into()));
        }
        Ok(Self { nodes, weights })
    }

    /// Real nodes and weights, a common shorthand in tests.
    pub fn from_real(nodes: &[f64], weights: &[f64]) -> Result<Self> {
        Self::new(
            nodes.iter().map(|&x| Complex::new(x, 0.0)).collect(),
            weights.iter().map(|&w| Complex::new(w, 0.0)).collect(),
        )
    }

    pub fn nodes(&self) -> &[Complex] {
        &self.nodes
    }

    pub fn weights(&self) -> &[Complex] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `[m_0, …, m_{2·degree_cap}]` with `m_r = Σ_p w_p x_p^r`.
    pub fn moments(&self, degree_cap: usize) -> Vec<Complex> {
        let top = 2 * degree_cap;
        let mut out = vec![Complex::new(0.0, 0.0); top + 1];
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            for (r, p) in powers(*x, top).into_iter().enumerate() {
                out[r] += w * p;
            }
        }
        out
    }

    /// `∫ f dμ` as a finite sum.
    pub fn integrate(&self, f: impl Fn(Complex) -> Complex) -> Complex {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(*x))
            .sum()
    }

    /// The measure seen as the diagonal bimeasure `w_p δ(x − x_p) δ(y − x_p)`.
    pub fn diagonal_bimeasure(&self) -> DiscreteBiMeasure {
        let n = self.len();
        let mut weights = vec![Complex::new(0.0, 0.0); n * n];
        for p in 0..n {
            weights[p * n + p] = self.weights[p];
        }
        DiscreteBiMeasure {
            x_nodes: self.nodes.clone(),
            y_nodes: self.nodes.clone(),
            weights,
        }
    }
}

impl DiscreteBiMeasure {
    /// `weights[p][q]` is the mass at `(x_nodes[p], y_nodes[q])`.
    pub fn new(
        x_nodes: Vec<Complex>,
        y_nodes: Vec<Complex>,
        weights: Vec<Vec<Complex>>,
    ) -> Result<Self> {
        if weights.len() != x_nodes.len() || weights.iter().any(|row| row.len() != y_nodes.len()) {
            return Err(Error::Invalid(format!(
                "weight matrix must be {}x{}",
                x_nodes.len(),
                y_nodes.len()
            )));
        }
        let flat: Vec<Complex> = weights.into_iter().flatten().collect();
        check_finite(&x_nodes, "x_nodes")?;
        check_finite(&y_nodes, "y_nodes")?;
        check_finite(&flat, "weights")?;
        check_distinct(&x_nodes, "x_nodes")?;
        check_distinct(&y_nodes, "y_nodes")?;
        Ok(Self {
            x_nodes,
            y_nodes,
            weights: flat,
        })
    }

    pub fn x_nodes(&self) -> &[Complex] {
        &self.x_nodes
    }

    pub fn y_nodes(&self) -> &[Complex] {
        &self.y_nodes
    }

    pub fn weight(&self, p: usize, q: usize) -> Complex {
        self.weights[p * self.y_nodes.len() + q]
    }

    /// Number of support pairs `|x_nodes| · |y_nodes|`.
    pub fn support_size(&self) -> usize {
        self.x_nodes.len() * self.y_nodes.len()
    }

    /// Iterate `(x_p, y_q, w_pq)` in row-major order.
    pub fn atoms(&self) -> impl Iterator<Item = (Complex, Complex, Complex)> + '_ {
        let ny = self.y_nodes.len();
        self.weights
            .iter()
            .enumerate()
            .map(move |(i, w)| (self.x_nodes[i / ny], self.y_nodes[i % ny], *w))
    }

    /// `∫ f(x, y) dμ(x, y)` as a finite double sum.
    pub fn integrate(&self, f: impl Fn(Complex, Complex) -> Complex) -> Complex {
        self.atoms().map(|(x, y, w)| w * f(x, y)).sum()
    }

    /// Exchange the roles of `x` and `y`.
    pub fn transposed(&self) -> Self {
        let (nx, ny) = (self.x_nodes.len(), self.y_nodes.len());
        let mut weights = vec![Complex::new(0.0, 0.0); nx * ny];
        for p in 0..nx {
            for q in 0..ny {
                weights[q * nx + p] = self.weights[p * ny + q];
            }
        }
        Self {
            x_nodes: self.y_nodes.clone(),
            y_nodes: self.x_nodes.clone(),
            weights,
        }
    }

    /// `α·self + β·other` for two bimeasures on the same grid.
    pub fn combine(&self, alpha: Complex, other: &Self, beta: Complex) -> Result<Self> {
        if self.x_nodes != other.x_nodes || self.y_nodes != other.y_nodes {
            return Err(Error::Invalid("bimeasures live on different grids".into()));
        }
        let weights = self
            .weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| alpha * a + beta * b)
            .collect();
        Ok(Self {
            x_nodes: self.x_nodes.clone(),
            y_nodes: self.y_nodes.clone(),
            weights,
        })
    }

    pub fn bimoments(&self, degree_cap: usize) -> BimomentTable {
        let n = degree_cap + 1;
        let xp: Vec<Vec<Complex>> = self
            .x_nodes
            .iter()
            .map(|&x| powers(x, degree_cap))
            .collect();
        let yp: Vec<Vec<Complex>> = self
            .y_nodes
            .iter()
            .map(|&y| powers(y, degree_cap))
            .collect();
        let ny = self.y_nodes.len();
        let mut entries = vec![vec![Complex::new(0.0, 0.0); n]; n];
        for (i, w) in self.weights.iter().enumerate() {
            let (p, q) = (i / ny, i % ny);
            for j in 0..n {
                let wx = w * xp[p][j];
                for k in 0..n {
                    entries[j][k] += wx * yp[q][k];
                }
            }
        }
        BimomentTable {
            entries,
            degree_cap,
        }
    }
}

/// Free-function form of [`DiscreteBiMeasure::bimoments`].
pub fn bimoments(m: &DiscreteBiMeasure, degree_cap: usize) -> BimomentTable {
    m.bimoments(degree_cap)
}

/// Free-function form of [`DiscreteMeasure::moments`].
pub fn moments(m: &DiscreteMeasure, degree_cap: usize) -> Vec<Complex> {
    m.moments(degree_cap)
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`,
/// nodes in increasing order.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = vec![(0.0, 0.0); n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            // Legendre recurrence for P_n(x) and its derivative.
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out[i] = (-x, w);
        out[n - 1 - i] = (x, w);
    }
    if n % 2 == 1 {
        out[n / 2].0 = 0.0;
    }
    out
}

/// Discretize `weight_fn(x) dx` on `(a, b)` with the `n_nodes`-point Gauss–Legendre rule.
pub fn gauss_legendre_discretize(
    weight_fn: impl Fn(f64) -> Complex,
    interval: (f64, f64),
    n_nodes: usize,
) -> Result<DiscreteMeasure> {
    if n_nodes == 0 {
        return Err(Error::Invalid("n_nodes must be at least 1".into()));
    }
    let (a, b) = interval;
    if !(a.is_finite() && b.is_finite()) || a >= b {
        return Err(Error::Invalid(format!("bad interval ({a}, {b})")));
    }
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut nodes = Vec::with_capacity(n_nodes);
    let mut weights = Vec::with_capacity(n_nodes);
    for (t, w) in gauss_legendre(n_nodes) {
        let x = mid + half * t;
        let f = weight_fn(x);
        if !f.re.is_finite() || !f.im.is_finite() {
            return Err(Error::NonFinite(format!("weight function at x = {x}")));
        }
        nodes.push(Complex::new(x, 0.0));
        weights.push(f * (w * half));
    }
    DiscreteMeasure::new(nodes, weights)
}

/// Bimeasure with `w_pq = wx_p · wy_q · coupling(x_p, y_q)`.
pub fn product_bimeasure_coupled(
    mx: &DiscreteMeasure,
    my: &DiscreteMeasure,
    coupling: impl Fn(Complex, Complex) -> Complex,
) -> Result<DiscreteBiMeasure> {
    let mut weights = Vec::with_capacity(mx.len());
    for (x, wx) in mx.nodes().iter().zip(mx.weights()) {
        let mut row = Vec::with_capacity(my.len());
        for (y, wy) in my.nodes().iter().zip(my.weights()) {
            let k = coupling(*x, *y);
            if !k.re.is_finite() || !k.im.is_finite() {
                return Err(Error::NonFinite(format!("coupling at ({x}, {y})")));
            }
            row.push(wx * wy * k);
        }
        weights.push(row);
    }
    DiscreteBiMeasure::new(mx.nodes().to_vec(), my.nodes().to_vec(), weights)
}

/// Built-in test measures shared by the test suites and the CLI.
pub mod catalog {
    use super::*;

    /// Unit point mass at `(x0, y0)`.
    pub fn point_mass(x0: Complex, y0: Complex) -> DiscreteBiMeasure {
        DiscreteBiMeasure::new(vec![x0], vec![y0], vec![vec![Complex::new(1.0, 0.0)]])
            .expect("single atom is always valid")
    }

    /// Nodes `x, y ∈ {+1, −1}` with weight `(1+c)/4` on equal signs and `(1−c)/4` otherwise.
    pub fn coupled_sign(coupling: f64) -> DiscreteBiMeasure {
        let same = Complex::new((1.0 + coupling) / 4.0, 0.0);
        let diff = Complex::new((1.0 - coupling) / 4.0, 0.0);
        let nodes = vec![Complex::new(1.0, 0.0), Complex::new(-1.0, 0.0)];
        DiscreteBiMeasure::new(
            nodes.clone(),
            nodes,
            vec![vec![same, diff], vec![diff, same]],
        )
        .expect("coupled-sign measure is valid")
    }

    /// `w_pq = exp(x_p y_q)` on the square grid `points × points`.
    pub fn exp_xy_grid(points: &[f64]) -> DiscreteBiMeasure {
        let ones = vec![1.0; points.len()];
        let m = DiscreteMeasure::from_real(points, &ones).expect("grid points must be distinct");
        product_bimeasure_coupled(&m, &m, |x, y| (x * y).exp())
            .expect("exp(xy) is finite on a grid")
    }

    /// The 3×3 grid on `{−1, 0, 1}` with `w = exp(xy)`.
    pub fn exp_xy_grid3() -> DiscreteBiMeasure {
        exp_xy_grid(&[-1.0, 0.0, 1.0])
    }

    /// `{+1: 1/2, −1: 1/2}`.
    pub fn two_point() -> DiscreteMeasure {
        DiscreteMeasure::from_real(&[1.0, -1.0], &[0.5, 0.5]).expect("valid")
    }

    /// Gauss–Legendre discretization of `dx` on `[−1, 1]`.
    pub fn legendre(n_nodes: usize) -> DiscreteMeasure {
        gauss_legendre_discretize(|_| Complex::new(1.0, 0.0), (-1.0, 1.0), n_nodes)
            .expect("legendre rule is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::catalog::*;
    use super::*;

    fn close(a: Complex, b: Complex, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn single_point_bimoments() {
        let b = point_mass(Complex::new(0.0, 0.0), Complex::new(0.0, 0.0)).bimoments(2);
        for j in 0..3 {
            for k in 0..3 {
                let want = if j == 0 && k == 0 { 1.0 } else { 0.0 };
                assert_eq!(b.entries[j][k], Complex::new(want, 0.0));
            }
        }
    }

    #[test]
    fn coupled_sign_bimoments() {
        let b = coupled_sign(0.5).bimoments(2).entries;
        assert!(close(b[0][0], c(1.0, 0.0), 1e-15));
        assert!(close(b[1][0], c(0.0, 0.0), 1e-15));
        assert!(close(b[0][1], c(0.0, 0.0), 1e-15));
        assert!(close(b[1][1], c(0.5, 0.0), 1e-15));
        assert!(close(b[2][0], c(1.0, 0.0), 1e-15));
        assert!(close(b[0][2], c(1.0, 0.0), 1e-15));
    }

    #[test]
    fn grid_bimoments_match_direct_sum() {
        let g = [-1.0f64, 0.0, 1.0];
        let b = exp_xy_grid3().bimoments(3).entries;
        for j in 0..4 {
            for k in 0..4 {
                let mut want = 0.0;
                for &x in &g {
                    for &y in &g {
                        want += (x * y).exp() * x.powi(j as i32) * y.powi(k as i32);
                    }
                }
                assert!(close(b[j][k], c(want, 0.0), 1e-13), "B[{j}][{k}]");
            }
        }
    }

    #[test]
    fn simple_moments() {
        assert_eq!(
            two_point().moments(1),
            vec![c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]
        );
        let pm = DiscreteMeasure::from_real(&[2.0], &[1.0]).unwrap();
        assert_eq!(pm.moments(1), vec![c(1.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)]);
        let m = legendre(8).moments(1);
        assert!(close(m[0], c(2.0, 0.0), 1e-14));
        assert!(close(m[1], c(0.0, 0.0), 1e-14));
        assert!(close(m[2], c(2.0 / 3.0, 0.0), 1e-14));
    }

    #[test]
    fn textbook_rules() {
        let m = gauss_legendre_discretize(|_| c(1.0, 0.0), (-1.0, 1.0), 2).unwrap();
        let r = 1.0 / 3f64.sqrt();
        assert!(close(m.nodes()[0], c(-r, 0.0), 1e-15));
        assert!(close(m.nodes()[1], c(r, 0.0), 1e-15));
        assert!(close(m.weights()[0], c(1.0, 0.0), 1e-15));
        assert!(close(m.weights()[1], c(1.0, 0.0), 1e-15));

        let m = gauss_legendre_discretize(|_| c(1.0, 0.0), (0.0, 2.0), 1).unwrap();
        assert_eq!(m.nodes(), &[c(1.0, 0.0)]);
        assert_eq!(m.weights(), &[c(2.0, 0.0)]);

        let m = gauss_legendre_discretize(|x| c((-x * x).exp(), 0.0), (-5.0, 5.0), 64).unwrap();
        let pi_sqrt = std::f64::consts::PI.sqrt();
        assert!((m.moments(0)[0].re - pi_sqrt).abs() < 1e-10);
    }

    #[test]
    fn quadrature_exact_to_degree_2n_minus_1() {
        for n in 1..=12 {
            let m = gauss_legendre_discretize(|_| c(1.0, 0.0), (-1.0, 1.0), n).unwrap();
            let mom = m.moments(n);
            for r in 0..2 * n {
                let exact = if r % 2 == 0 {
                    2.0 / (r as f64 + 1.0)
                } else {
                    0.0
                };
                let err = (mom[r] - c(exact, 0.0)).norm();
                assert!(err <= 1e-12 * exact.abs().max(1.0), "n={n} r={r} err={err}");
            }
        }
    }

    #[test]
    fn coupled_product_examples() {
        let one = DiscreteMeasure::from_real(&[0.3], &[1.0]).unwrap();
        let pm = product_bimeasure_coupled(&one, &one, |_, _| c(1.0, 0.0)).unwrap();
        assert_eq!(pm, point_mass(c(0.3, 0.0), c(0.3, 0.0)));

        let half = DiscreteMeasure::from_real(&[1.0, -1.0], &[0.5, 0.5]).unwrap();
        let m = product_bimeasure_coupled(&half, &half, |x, y| (x * y).exp()).unwrap();
        // Normalized, this is the coupled-sign measure with c = tanh(1).
        let total = m.bimoments(0).entries[0][0];
        let want = coupled_sign(1f64.tanh());
        for p in 0..2 {
            for q in 0..2 {
                assert!(close(m.weight(p, q) / total, want.weight(p, q), 1e-15));
            }
        }

        let sep = product_bimeasure_coupled(&half, &half, |_, _| c(1.0, 0.0)).unwrap();
        let b = sep.bimoments(1).entries;
        assert!((b[0][0] * b[1][1] - b[0][1] * b[1][0]).norm() < 1e-15);
    }

    #[test]
    fn ingestion_errors() {
        assert!(matches!(
            DiscreteMeasure::from_real(&[1.0, 1.0 + 1e-13], &[1.0, 1.0]),
            Err(Error::DuplicateNode(_))
        ));
        assert!(matches!(
            DiscreteMeasure::from_real(&[1.0], &[f64::NAN]),
            Err(Error::NonFinite(_))
        ));
        assert!(matches!(
            DiscreteMeasure::from_real(&[1.0, 2.0], &[0.0, 0.0]),
            Err(Error::Invalid(_))
        ));
        assert!(matches!(
            gauss_legendre_discretize(|x| c(1.0 / x, 0.0), (-1.0, 1.0), 3),
            Err(Error::NonFinite(_))
        ));
        let one = DiscreteMeasure::from_real(&[0.0], &[1.0]).unwrap();
        assert!(matches!(
            product_bimeasure_coupled(&one, &one, |x, y| c(1.0, 0.0) / (x * y)),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn symmetric_bimeasure_has_symmetric_bimoments() {
        let b = exp_xy_grid(&[-0.7, 0.1, 0.4, 1.3]).bimoments(4).entries;
        for j in 0..5 {
            for k in 0..5 {
                assert!((b[j][k] - b[k][j]).norm() <= 1e-14 * b[j][k].norm());
            }
        }
    }

    #[test]
    fn transpose_swaps_bimoments() {
        let m = coupled_sign(0.3)
            .combine(c(1.0, 0.0), &coupled_sign(0.9), c(0.0, 0.5))
            .unwrap();
        let m = DiscreteBiMeasure::new(
            vec![c(0.0, 1.0), c(2.0, 0.0)],
            vec![c(1.0, 0.0), c(-1.0, 0.5)],
            vec![
                vec![m.weight(0, 0), m.weight(0, 1)],
                vec![c(0.2, 0.0), m.weight(1, 1)],
            ],
        )
        .unwrap();
        let a = m.bimoments(3).entries;
        let b = m.transposed().bimoments(3).entries;
        for j in 0..4 {
            for k in 0..4 {
                assert!(close(a[j][k], b[k][j], 1e-14));
            }
        }
    }

    use crate::c;
}
