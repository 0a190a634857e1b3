//! Absorption probabilities from generating functions: the integral
//! coefficients `c1, c2, c3`, the `k = 1` corollary formula, the
//! semi-infinite closed form, and the exact conjectured recursion.

use crate::genfunc::{method_values, GfError, Method};
use crate::quadrature::{circle_quadrature, QuadratureReport};
use crate::types::{Complex, QubitState, TolerancePolicy};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

#[derive(Debug, Error)]
pub enum AbsorbError {
    #[error("a quadrature report is not converged; no probability can be formed")]
    DivergedInput,
    #[error(transparent)]
    Gf(#[from] GfError),
    #[error("{0}")]
    OutOfRange(&'static str),
}

/// The three integral coefficients of `P_k^N(phi) = c1 |alpha|^2 +
/// c2 |beta|^2 + 2 Re(c3 conj(alpha) beta)`, with their quadrature
/// reports.
///
/// `c1`/`c2` integrate `|a p + c r|^2` and `|b p + d r|^2` with the
/// Hadamard weights `(1/sqrt(2), +-1/sqrt(2))`; their tiny imaginary
/// residues are kept for audit. The numeric fields mirror the report
/// values; consumers must check the statuses before trusting them.
#[derive(Debug, Clone, Serialize)]
pub struct IntegralCoefficients {
    pub c1: f64,
    pub c2: f64,
    pub c3: Complex,
    pub c1_im_residue: f64,
    pub c2_im_residue: f64,
    pub reports: [QuadratureReport; 3],
    pub method: Method,
}

impl IntegralCoefficients {
    pub fn all_converged(&self) -> bool {
        self.reports.iter().all(|r| r.converged())
    }
}

fn pr_at(method: Method, n: u32, k: u32, theta: f64) -> Result<(Complex, Complex), GfError> {
    let z = Complex::from_polar(1.0, theta);
    let values = method_values(method, z, n)?;
    let v = &values[(k - 1) as usize];
    Ok((v.p, v.r))
}

/// Three quadrature runs over the printed integrands with `p, r` supplied
/// by the chosen method. Diverged reports are propagated, never replaced
/// by a number.
pub fn compute_c123(
    n: u32,
    k: u32,
    method: Method,
    tol: &TolerancePolicy,
) -> Result<IntegralCoefficients, AbsorbError> {
    if n < 2 || k < 1 || k > n - 1 {
        return Err(AbsorbError::OutOfRange("need N >= 2 and 1 <= k <= N-1"));
    }
    if method == Method::Konno && n < 3 {
        return Err(AbsorbError::OutOfRange("the konno route needs N >= 3"));
    }
    let s = Complex::new(FRAC_1_SQRT_2, 0.0);

    let rep1 = circle_quadrature(
        |theta| {
            let (p, r) = pr_at(method, n, k, theta)?;
            let g = s * p + s * r;
            Ok(g * g.conj())
        },
        tol,
    );
    let rep2 = circle_quadrature(
        |theta| {
            let (p, r) = pr_at(method, n, k, theta)?;
            let g = s * p - s * r;
            Ok(g * g.conj())
        },
        tol,
    );
    let rep3 = circle_quadrature(
        |theta| {
            let (p, r) = pr_at(method, n, k, theta)?;
            let plus = s * p + s * r;
            let minus = s * p - s * r;
            Ok(plus * minus.conj())
        },
        tol,
    );

    let two_pi = std::f64::consts::TAU;
    Ok(IntegralCoefficients {
        c1: rep1.value.re / two_pi,
        c2: rep2.value.re / two_pi,
        c3: rep3.value / two_pi,
        c1_im_residue: (rep1.value.im / two_pi).abs(),
        c2_im_residue: (rep2.value.im / two_pi).abs(),
        reports: [rep1, rep2, rep3],
        method,
    })
}

/// `P = c1 |alpha|^2 + c2 |beta|^2 + 2 Re(c3 conj(alpha) beta)`.
///
/// Values a hair outside `[0, 1]` (within 1e-8) are clamped; anything
/// further out is returned raw — a probability outside the interval is a
/// finding about the method, not something to hide.
pub fn absorption_from_c123(coeffs: &IntegralCoefficients, qubit: &QubitState) -> Result<f64, AbsorbError> {
    if !coeffs.all_converged() {
        return Err(AbsorbError::DivergedInput);
    }
    let alpha = qubit.alpha();
    let beta = qubit.beta();
    let raw = coeffs.c1 * alpha.norm_sqr()
        + coeffs.c2 * beta.norm_sqr()
        + 2.0 * (coeffs.c3 * alpha.conj() * beta).re;
    if raw < 0.0 && raw >= -1e-8 {
        return Ok(0.0);
    }
    if raw > 1.0 && raw <= 1.0 + 1e-8 {
        return Ok(1.0);
    }
    Ok(raw)
}

/// Result of the `k = 1` corollary formula; `value` is present only when
/// the quadrature converged.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CorollaryResult {
    pub value: Option<f64>,
    pub report: QuadratureReport,
}

/// `P_1^N(t[0,1]) = (1/2)(1 + (1/2pi) int |r_1^N(e^{i theta})|^2 dtheta)`
/// with `r_1^N` from the chosen method.
///
/// At `N = 2` the boundary condition forces `r_1^2` to vanish identically
/// for every route, so the konno route (whose evaluator needs `N >= 3`)
/// integrates the zero function there.
pub fn corollary_p1n(n: u32, method: Method, tol: &TolerancePolicy) -> Result<CorollaryResult, AbsorbError> {
    if n < 2 {
        return Err(AbsorbError::OutOfRange("need N >= 2"));
    }
    let report = if n == 2 && method == Method::Konno {
        circle_quadrature(|_| Ok(Complex::new(0.0, 0.0)), tol)
    } else {
        circle_quadrature(
            |theta| {
                let (_, r) = pr_at(method, n, 1, theta)?;
                Ok(r * r.conj())
            },
            tol,
        )
    };
    let value = report
        .converged()
        .then(|| 0.5 * (1.0 + report.value.re / std::f64::consts::TAU));
    Ok(CorollaryResult { value, report })
}

/// Semi-infinite closed form `2/pi + 2 (1 - 2/pi) Re(conj(alpha) beta)`.
pub fn semi_infinite_closed_form(qubit: &QubitState) -> f64 {
    let two_over_pi = 2.0 / std::f64::consts::PI;
    let cross = (qubit.alpha().conj() * qubit.beta()).re;
    two_over_pi + 2.0 * (1.0 - two_over_pi) * cross
}

/// Exact rational probability from the conjectured recursion.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct RationalProb(BigRational);

impl RationalProb {
    fn new(value: BigRational) -> Self {
        debug_assert!(!value.is_negative() && value <= BigRational::one());
        Self(value)
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Exact comparison against `1/sqrt(2)`: `value^2 < 1/2`.
    pub fn below_inv_sqrt2(&self) -> bool {
        let sq = &self.0 * &self.0;
        sq < BigRational::new(BigInt::one(), BigInt::from(2))
    }
}

impl std::fmt::Display for RationalProb {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

/// Exact iteration of `P_1^{N+1} = (1 + 2 P_1^N) / (2 + 2 P_1^N)` from
/// `P_1^1 = 0`, for `N = 1..=n_max`. No floating point anywhere.
pub fn conjecture_sequence(n_max: u32) -> Vec<RationalProb> {
    assert!(n_max >= 1, "need N_max >= 1");
    let one = BigRational::one();
    let two = BigRational::from(BigInt::from(2));
    let mut seq = Vec::with_capacity(n_max as usize);
    let mut current = BigRational::zero();
    for _ in 0..n_max {
        seq.push(RationalProb::new(current.clone()));
        current = (&one + &two * &current) / (&two + &two * &current);
    }
    seq
}
