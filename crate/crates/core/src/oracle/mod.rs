//! Brute-force evaluation of the defining integrals as finite sums over the
//! discrete support, plus standalone checks of the algebraic identities the
//! formulas rest on.
//!
//! The N-fold sums run over all *ordered* tuples of support atoms, exactly as
//! the integral is written; the `N!` cancels in every normalized ratio.

mod identities;
mod reductions;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::formulas::{check_off_support, vandermonde, IntegrandSpec, OneMatrixSpec};
use crate::measure::{DiscreteBiMeasure, DiscreteMeasure};
use crate::Complex;

pub use identities::{
    check_cauchy_binet, check_interpolation_prefactor, check_partial_frac_1, check_partial_frac_2,
    CAUCHY_BINET_BUDGET,
};
pub use reductions::{check_kernel_reductions, ReductionResiduals};

/// Relative size below which a partition sum is treated as zero.
pub const ZERO_PARTITION_RATIO: f64 = 1e-14;

/// Cap on the number of N-tuples an oracle sum may visit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBudget {
    pub max_terms: u64,
}

impl OracleBudget {
    pub fn new(max_terms: u64) -> Result<Self> {
        if max_terms == 0 {
            return Err(Error::Invalid("oracle budget must be at least 1".into()));
        }
        Ok(Self { max_terms })
    }

    fn admit(&self, atoms: usize, n: usize) -> Result<()> {
        let terms = (atoms as f64).powi(n as i32);
        if terms > self.max_terms as f64 {
            return Err(Error::BudgetExceeded {
                terms,
                budget: self.max_terms,
            });
        }
        Ok(())
    }
}

impl Default for OracleBudget {
    fn default() -> Self {
        Self {
            max_terms: 10_000_000,
        }
    }
}

/// Partial sums of one oracle run.
#[derive(Debug, Clone, Copy, Default)]
struct Sums {
    numerator: Complex,
    partition: Complex,
    scale: f64,
}

impl std::ops::Add for Sums {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            numerator: self.numerator + o.numerator,
            partition: self.partition + o.partition,
            scale: self.scale + o.scale,
        }
    }
}

/// One support atom: its coordinates, weight, and weight times the integrand factor.
#[derive(Debug, Clone, Copy)]
struct Atom {
    x: Complex,
    y: Complex,
    w: Complex,
    wr: Complex,
}

/// Sum over all ordered N-tuples of atoms. `square` selects `Δ(x)²` (one-matrix)
/// instead of `Δ(x)Δ(y)`.
///
/// The first tuple index is split across workers; partial sums are combined in
/// index order, so the result does not depend on scheduling.
fn tuple_sums(atoms: &[Atom], n: usize, square: bool) -> Sums {
    let k = atoms.len();
    let inner = |first: usize| -> Sums {
        let mut acc = Sums::default();
        let mut idx = vec![0usize; n];
        idx[0] = first;
        let mut xs = vec![Complex::new(0.0, 0.0); n];
        let mut ys = vec![Complex::new(0.0, 0.0); n];
        loop {
            let mut w = Complex::new(1.0, 0.0);
            let mut wr = Complex::new(1.0, 0.0);
            for (a, &i) in idx.iter().enumerate() {
                let atom = &atoms[i];
                xs[a] = atom.x;
                ys[a] = atom.y;
                w *= atom.w;
                wr *= atom.wr;
            }
            let vx = vandermonde(&xs);
            let v = if square {
                vx * vx
            } else {
                vx * vandermonde(&ys)
            };
            let base = w * v;
            acc.partition += base;
            acc.numerator += wr * v;
            acc.scale += base.norm();
            // Odometer over positions 1..n.
            let mut pos = n;
            loop {
                if pos == 1 {
                    return acc;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < k {
                    break;
                }
                idx[pos] = 0;
            }
        }
    };
    if n == 0 {
        return Sums {
            numerator: Complex::new(1.0, 0.0),
            partition: Complex::new(1.0, 0.0),
            scale: 1.0,
        };
    }
    let partials: Vec<Sums> = (0..k).into_par_iter().map(inner).collect();
    partials.into_iter().fold(Sums::default(), |a, b| a + b)
}

fn normalized(s: Sums) -> Result<Complex> {
    if s.partition.norm() <= ZERO_PARTITION_RATIO * s.scale {
        return Err(Error::ZeroPartition {
            value: s.partition.norm(),
            scale: s.scale,
        });
    }
    Ok(s.numerator / s.partition)
}

fn two_atoms(m: &DiscreteBiMeasure, spec: &IntegrandSpec) -> Vec<Atom> {
    m.atoms()
        .map(|(x, y, w)| {
            let mut r = Complex::new(1.0, 0.0);
            for &v in &spec.xi {
                r *= v - x;
            }
            for &v in &spec.zeta {
                r *= v - y;
            }
            for &v in &spec.eta {
                r /= v - x;
            }
            for &v in &spec.mu {
                r /= v - y;
            }
            Atom { x, y, w, wr: w * r }
        })
        .collect()
}

/// `I_N` for the two-matrix model by direct summation.
pub fn oracle_two(
    m: &DiscreteBiMeasure,
    spec: &IntegrandSpec,
    budget: OracleBudget,
) -> Result<Complex> {
    spec.validate()?;
    check_off_support(&spec.eta, m.x_nodes(), "eta")?;
    check_off_support(&spec.mu, m.y_nodes(), "mu")?;
    budget.admit(m.support_size(), spec.n_pairs)?;
    normalized(tuple_sums(&two_atoms(m, spec), spec.n_pairs, false))
}

/// `Z_N = ∫ Π dμ(x_a, y_a) Δ(x)Δ(y)` by direct summation over ordered tuples.
pub fn partition_sum_two(m: &DiscreteBiMeasure, n: usize, budget: OracleBudget) -> Result<Complex> {
    budget.admit(m.support_size(), n)?;
    let atoms: Vec<Atom> = m.atoms().map(|(x, y, w)| Atom { x, y, w, wr: w }).collect();
    Ok(tuple_sums(&atoms, n, false).partition)
}

fn one_atoms(m: &DiscreteMeasure, spec: &OneMatrixSpec) -> Vec<Atom> {
    m.nodes()
        .iter()
        .zip(m.weights())
        .map(|(&x, &w)| {
            let mut r = Complex::new(1.0, 0.0);
            for &v in &spec.xi {
                r *= v - x;
            }
            for &v in &spec.eta {
                r /= v - x;
            }
            Atom {
                x,
                y: x,
                w,
                wr: w * r,
            }
        })
        .collect()
}

/// `I_N` for the one-matrix model by direct summation.
pub fn oracle_one(
    m: &DiscreteMeasure,
    spec: &OneMatrixSpec,
    budget: OracleBudget,
) -> Result<Complex> {
    spec.validate()?;
    check_off_support(&spec.eta, m.nodes(), "eta")?;
    budget.admit(m.len(), spec.n)?;
    normalized(tuple_sums(&one_atoms(m, spec), spec.n, true))
}

/// `Z_N = ∫ Π dμ(x_a) Δ(x)²` by direct summation over ordered tuples.
pub fn partition_sum_one(m: &DiscreteMeasure, n: usize, budget: OracleBudget) -> Result<Complex> {
    budget.admit(m.len(), n)?;
    let spec = OneMatrixSpec {
        n,
        xi: vec![],
        eta: vec![],
    };
    Ok(tuple_sums(&one_atoms(m, &spec), n, true).partition)
}
