//! Biorthogonal polynomials of the measure modified by the rational integrand.
//!
//! With `R(x, y) = Π(ξ−x)Π(ζ−y) / (Π(η−x)Π(μ−y))`, the monic polynomials of
//! `R dμ` are ratios of integrals: `p̃_n(x) = I_n(ξ ∪ {x}) / I_n`, and the norms
//! are `h̃_n = h_n I_{n+1} / I_n` (with `I_0 = 1`).

use super::{integral_two, IntegrandSpec};
use crate::biorth::BiorthogonalSystem;
use crate::error::{Error, Result};
use crate::{Complex, NODE_SEPARATION};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolyKind {
    P,
    S,
}

fn with_pairs(spec: &IntegrandSpec, n: usize) -> IntegrandSpec {
    IntegrandSpec {
        n_pairs: n,
        ..spec.clone()
    }
}

fn integral(sys: &BiorthogonalSystem, spec: &IntegrandSpec, n: usize) -> Result<Complex> {
    if n == 0 {
        return Ok(Complex::new(1.0, 0.0));
    }
    Ok(integral_two(sys, &with_pairs(spec, n), false)?.value)
}

/// Value at `point` of the degree-`n` modified polynomial `P̃_n` (x side, the
/// point joins `ξ`) or `S̃_n` (y side, the point joins `ζ`). The `n_pairs` of
/// `spec` is ignored.
pub fn modified_biorth(
    sys: &BiorthogonalSystem,
    spec: &IntegrandSpec,
    n: usize,
    which: PolyKind,
    point: Complex,
) -> Result<Complex> {
    sys.require_cap(n)?;
    let (own, poles, what) = match which {
        PolyKind::P => (&spec.xi, &spec.eta, "xi/eta"),
        PolyKind::S => (&spec.zeta, &spec.mu, "zeta/mu"),
    };
    if own
        .iter()
        .chain(poles)
        .any(|z| (z - point).norm() <= NODE_SEPARATION)
    {
        return Err(Error::DegenerateExtension(format!(
            "point {point} collides with an entry of {what}"
        )));
    }
    let i_n = integral(sys, spec, n)?;
    let i_next = integral(sys, spec, n + 1)?;
    let monic = if n == 0 {
        Complex::new(1.0, 0.0)
    } else {
        let mut extended = with_pairs(spec, n);
        match which {
            PolyKind::P => extended.xi.push(point),
            PolyKind::S => extended.zeta.push(point),
        }
        integral_two(sys, &extended, false)?.value / i_n
    };
    let h_mod = sys.h()[n] * i_next / i_n;
    Ok(monic / h_mod.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::biorth::biorthogonalize;
    use crate::c;
    use crate::measure::catalog::*;
    use crate::measure::DiscreteBiMeasure;

    #[test]
    fn empty_lists_reproduce_plain_polynomials() {
        let s = biorthogonalize(&exp_xy_grid3(), 2).unwrap();
        let spec = IntegrandSpec::new(1, vec![], vec![], vec![], vec![]).unwrap();
        let z = c(0.4, 1.1);
        for n in 0..2 {
            let p = modified_biorth(&s, &spec, n, PolyKind::P, z).unwrap();
            let q = modified_biorth(&s, &spec, n, PolyKind::S, z).unwrap();
            assert!((p - s.eval_p(n, z).unwrap()).norm() < 1e-10 * p.norm().max(1.0));
            assert!((q - s.eval_s(n, z).unwrap()).norm() < 1e-10 * q.norm().max(1.0));
        }
    }

    #[test]
    fn modified_constant_is_normalized() {
        let s = biorthogonalize(&coupled_sign(0.5), 1).unwrap();
        let eta = c(5.0, 0.0);
        let spec = IntegrandSpec::new(1, vec![], vec![], vec![eta], vec![]).unwrap();
        let p0 = modified_biorth(&s, &spec, 0, PolyKind::P, c(0.3, 0.0)).unwrap();
        let s0 = modified_biorth(&s, &spec, 0, PolyKind::S, c(0.3, 0.0)).unwrap();
        let m = s.source();
        let mut w = Vec::new();
        for (p, &x) in m.x_nodes().iter().enumerate() {
            w.push(
                (0..2)
                    .map(|q| m.weight(p, q) / (eta - x))
                    .collect::<Vec<_>>(),
            );
        }
        let modified =
            DiscreteBiMeasure::new(m.x_nodes().to_vec(), m.y_nodes().to_vec(), w).unwrap();
        let norm = modified.integrate(|_, _| p0 * s0);
        assert!((norm - 1.0).norm() < 1e-12);
    }

    #[test]
    fn modified_polynomials_are_biorthogonal() {
        let s = biorthogonalize(&exp_xy_grid(&[-1.0, -0.3, 0.4, 1.0]), 3).unwrap();
        let (xi, eta) = (c(2.0, 1.0), c(0.0, 3.0));
        let spec = IntegrandSpec::new(1, vec![xi], vec![], vec![eta], vec![]).unwrap();
        let m = s.source();
        let r = |x: Complex| (xi - x) / (eta - x);
        let mut worst: f64 = 0.0;
        for j in 0..2 {
            for k in 0..2 {
                let mut acc = c(0.0, 0.0);
                for (p, &x) in m.x_nodes().iter().enumerate() {
                    let pj = modified_biorth(&s, &spec, j, PolyKind::P, x).unwrap();
                    for (q, &y) in m.y_nodes().iter().enumerate() {
                        let sk = modified_biorth(&s, &spec, k, PolyKind::S, y).unwrap();
                        acc += m.weight(p, q) * r(x) * pj * sk;
                    }
                }
                worst = worst.max((acc - if j == k { 1.0 } else { 0.0 }).norm());
            }
        }
        assert!(worst < 1e-9, "worst {worst:e}");
    }

    #[test]
    fn collisions_and_caps() {
        let s = biorthogonalize(&coupled_sign(0.5), 1).unwrap();
        let spec =
            IntegrandSpec::new(1, vec![c(2.0, 0.0)], vec![], vec![c(5.0, 0.0)], vec![]).unwrap();
        assert!(matches!(
            modified_biorth(&s, &spec, 0, PolyKind::P, c(2.0, 0.0)),
            Err(Error::DegenerateExtension(_))
        ));
        assert!(matches!(
            modified_biorth(&s, &spec, 0, PolyKind::P, c(5.0, 0.0)),
            Err(Error::DegenerateExtension(_))
        ));
        assert!(modified_biorth(&s, &spec, 2, PolyKind::P, c(0.5, 0.0)).is_err());
    }
}
