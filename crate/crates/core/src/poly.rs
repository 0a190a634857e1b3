//! Complex roots of real polynomials by simultaneous iteration
//! (Durand-Kerner), with a Newton polish on each root.

use crate::types::Complex;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PolyError {
    #[error("polynomial must have degree >= 1 with nonzero leading coefficient")]
    BadPolynomial,
    #[error("root iteration did not converge after {0} sweeps")]
    NoConvergence(usize),
}

/// A located root and its modulus.
#[derive(Debug, Clone, Copy)]
pub struct PolyRoot {
    pub root: Complex,
    pub modulus: f64,
}

fn eval(coeffs: &[Complex], z: Complex) -> Complex {
    let mut acc = Complex::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

fn eval_derivative(coeffs: &[Complex], z: Complex) -> Complex {
    let mut acc = Complex::new(0.0, 0.0);
    for (i, &c) in coeffs.iter().enumerate().skip(1).rev() {
        acc = acc * z + c * (i as f64);
    }
    acc
}

const MAX_SWEEPS: usize = 200;

/// All complex roots of `coeffs[0] + coeffs[1] z + ... + coeffs[n] z^n`.
///
/// Roots are polished with a few Newton steps and verified against
/// `|p(root)| < 1e-12 * ||coeffs||_2`; the result is sorted by
/// `(re, im)` so output order is deterministic.
pub fn denominator_roots(coeffs: &[f64]) -> Result<Vec<PolyRoot>, PolyError> {
    if coeffs.len() < 2 || coeffs.last() == Some(&0.0) {
        return Err(PolyError::BadPolynomial);
    }
    let degree = coeffs.len() - 1;
    let lead = coeffs[degree];
    let monic: Vec<Complex> = coeffs.iter().map(|&c| Complex::new(c / lead, 0.0)).collect();

    // Cauchy bound on root moduli gives the starting circle
    let radius = 1.0
        + monic[..degree]
            .iter()
            .map(|c| c.norm())
            .fold(0.0f64, f64::max);
    let mut roots: Vec<Complex> = (0..degree)
        .map(|k| {
            // offset angle so no guess starts on the real axis
            let angle = std::f64::consts::TAU * (k as f64) / (degree as f64) + 0.4;
            Complex::new(radius * angle.cos(), radius * angle.sin())
        })
        .collect();

    let mut converged = false;
    for _sweep in 0..MAX_SWEEPS {
        let mut max_update = 0.0f64;
        for i in 0..degree {
            let zi = roots[i];
            let mut denom = Complex::new(1.0, 0.0);
            for (j, &zj) in roots.iter().enumerate() {
                if j != i {
                    denom *= zi - zj;
                }
            }
            if denom.norm() == 0.0 {
                continue;
            }
            let delta = eval(&monic, zi) / denom;
            roots[i] = zi - delta;
            max_update = max_update.max(delta.norm());
        }
        if max_update < 1e-14 * radius {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(PolyError::NoConvergence(MAX_SWEEPS));
    }

    // Newton polish
    for root in &mut roots {
        for _ in 0..3 {
            let d = eval_derivative(&monic, *root);
            if d.norm() == 0.0 {
                break;
            }
            *root -= eval(&monic, *root) / d;
        }
    }

    let scale: f64 = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
    let full: Vec<Complex> = coeffs.iter().map(|&c| Complex::new(c, 0.0)).collect();
    for &root in &roots {
        if eval(&full, root).norm() >= 1e-12 * scale {
            return Err(PolyError::NoConvergence(MAX_SWEEPS));
        }
    }

    roots.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    Ok(roots
        .into_iter()
        .map(|root| PolyRoot { root, modulus: root.norm() })
        .collect())
}
