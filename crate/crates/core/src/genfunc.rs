//! Generating functions of the Hadamard walk's first-hitting amplitudes.
//!
//! Three candidate routes produce values of the pair `(p_k^N(z), r_k^N(z))`
//! defined by the coupled recursion
//!
//! ```text
//! p_k = a z p_{k-1} + c z r_{k-1}        (k = 2..N-1)
//! r_k = b z p_{k+1} + d z r_{k+1}        (k = 1..N-2)
//! p_1 = z,  r_{N-1} = 0
//! ```
//!
//! with the Hadamard entries `a = b = c = 1/sqrt(2)`, `d = -1/sqrt(2)`:
//!
//! * `Lemma`  — the two-coefficient closed form `A_z lambda^{k-1} + ...`;
//! * `Konno`  — the published `C_z`/`E_z` closed form, evaluated verbatim
//!   including its sign factors, with no corrections;
//! * `Solve`  — a dense boundary-value solve of the recursion itself
//!   (the trusted Tier-1 route, residual-checked after every solve).
//!
//! Whether the closed forms actually satisfy the recursion is *not*
//! assumed anywhere; [`recursion_residual`] measures it and the verify
//! layer records the verdict.

use crate::simulator::HittingSeries;
use crate::types::{Complex, TolerancePolicy};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use thiserror::Error;

const SQRT_2: f64 = std::f64::consts::SQRT_2;
const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Absolute threshold below which printed denominators count as vanished.
const DEGENERATE_TOL: f64 = 1e-12;

/// Condition-estimate ceiling for the boundary-value solve.
const CONDITION_LIMIT: f64 = 1e12;

/// Post-solve recursion residual every solve must satisfy.
const SOLVE_RESIDUAL_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum GfError {
    #[error("degenerate point at z = {z:?}: {reason}")]
    DegeneratePoint { z: Complex, reason: &'static str },
    #[error("boundary-value system is numerically singular (condition estimate {condition:.3e})")]
    SingularSystem { condition: f64 },
    #[error("solved values violate the recursion (residual {residual:.3e})")]
    SolveResidual { residual: f64 },
    #[error("pole of the rational form at z = {z:?}")]
    PoleHit { z: Complex },
    #[error("series tail bound {tail_bound:.3e} exceeds the quadrature tolerance")]
    ConvergenceError { tail_bound: f64 },
    #[error("{0}")]
    OutOfRange(&'static str),
}

/// Which route produced a generating-function value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    Lemma,
    Konno,
    Solve,
    Series,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Method::Lemma => "lemma",
            Method::Konno => "konno",
            Method::Solve => "solve",
            Method::Series => "series",
        };
        f.write_str(s)
    }
}

/// The characteristic pair `lambda_+- = (z^2 - 1 +- sqrt(z^4 + 1)) / (sqrt(2) z)`.
///
/// `plus` carries the principal square root; swapping the branch swaps the
/// pair, and every downstream closed form is invariant under that swap.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LambdaPair {
    pub plus: Complex,
    pub minus: Complex,
}

impl LambdaPair {
    pub fn swapped(&self) -> Self {
        Self { plus: self.minus, minus: self.plus }
    }
}

/// A `(p, r)` value at one point, tagged with its provenance.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GFValue {
    pub p: Complex,
    pub r: Complex,
    pub z: Complex,
    pub n: u32,
    pub k: u32,
    pub method: Method,
}

/// Boundary-condition coefficients of the two-term closed form.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LemmaCoefficients {
    pub a_z: Complex,
    pub b_z: Complex,
}

/// Coefficients of the published closed form.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct KonnoCoefficients {
    pub c_z: Complex,
    pub e_z: Complex,
}

/// Residuals of the recursion and boundary conditions for one method.
#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    pub max_p_residual: f64,
    pub max_r_residual: f64,
    pub bc_p1_residual: f64,
    pub bc_rn1_residual: f64,
    pub sample_points: Vec<Complex>,
}

pub fn lambda_pm(z: Complex) -> Result<LambdaPair, GfError> {
    if z == Complex::new(0.0, 0.0) {
        return Err(GfError::DegeneratePoint { z, reason: "z = 0" });
    }
    let z4p1 = z.powu(4) + 1.0;
    if z4p1.norm() <= 1e-14 * (1.0 + z.norm().powi(4)) {
        return Err(GfError::DegeneratePoint { z, reason: "branch point z^4 = -1" });
    }
    let root = z4p1.sqrt();
    let denom = SQRT_2 * z;
    Ok(LambdaPair {
        plus: (z * z - 1.0 + root) / denom,
        minus: (z * z - 1.0 - root) / denom,
    })
}

/// `A_z` and `B_z` from the boundary conditions, for an explicit pair.
pub fn lemma_coefficients_with(lambda: &LambdaPair, z: Complex, n: u32) -> Result<LemmaCoefficients, GfError> {
    if n < 2 {
        return Err(GfError::OutOfRange("lemma coefficients need N >= 2"));
    }
    let lp_n = lambda.plus.powi(n as i32);
    let lm_n = lambda.minus.powi(n as i32);
    let diff = lm_n - lp_n;
    if diff.norm() < DEGENERATE_TOL {
        return Err(GfError::DegeneratePoint { z, reason: "lambda_+^N = lambda_-^N" });
    }
    Ok(LemmaCoefficients { a_z: z * lm_n / diff, b_z: z * lp_n / (-diff) })
}

pub fn lemma_coefficients(z: Complex, n: u32) -> Result<LemmaCoefficients, GfError> {
    lemma_coefficients_with(&lambda_pm(z)?, z, n)
}

/// Closed form `p = A lambda_+^{k-1} + B lambda_-^{k-1}`,
/// `r = A lambda_+^{k+1} + B lambda_-^{k+1}`.
pub fn lemma_gf_with(lambda: &LambdaPair, z: Complex, n: u32, k: u32) -> Result<GFValue, GfError> {
    check_site(n, k)?;
    let coeff = lemma_coefficients_with(lambda, z, n)?;
    let e = k as i32;
    let p = coeff.a_z * lambda.plus.powi(e - 1) + coeff.b_z * lambda.minus.powi(e - 1);
    let r = coeff.a_z * lambda.plus.powi(e + 1) + coeff.b_z * lambda.minus.powi(e + 1);
    Ok(GFValue { p, r, z, n, k, method: Method::Lemma })
}

pub fn lemma_gf(z: Complex, n: u32, k: u32) -> Result<GFValue, GfError> {
    lemma_gf_with(&lambda_pm(z)?, z, n, k)
}

/// `C_z` and `E_z` exactly as published, including the `(-1)^{N-2}` and
/// `(-1)^{N-3}` factors.
///
/// At N = 3 the factor `lambda_+^{N-3} - lambda_-^{N-3}` is exactly zero
/// and so is the brace it divides by; the published text reads the zero
/// factor as decisive (`C_z = 0`), so an exactly-zero numerator factor
/// short-circuits the division here.
pub fn konno_coefficients_with(lambda: &LambdaPair, z: Complex, n: u32) -> Result<KonnoCoefficients, GfError> {
    if n < 3 {
        return Err(GfError::OutOfRange("the published coefficients reference exponent N-3; need N >= 3"));
    }
    let lp = lambda.plus;
    let lm = lambda.minus;
    let d1 = lp - lm;
    let d2 = lp.powi(n as i32 - 2) - lm.powi(n as i32 - 2);
    let s2 = lp.powi(n as i32 - 2) + lm.powi(n as i32 - 2);
    let d3 = lp.powi(n as i32 - 3) - lm.powi(n as i32 - 3);
    let sign_n2 = if (n - 2) % 2 == 0 { 1.0 } else { -1.0 };
    let sign_n3 = if (n - 3) % 2 == 0 { 1.0 } else { -1.0 };
    let brace = d2 * d2 - (z / SQRT_2) * d2 * d3 - sign_n3 * d1 * d1;

    let zero = Complex::new(0.0, 0.0);
    let c_num = (z * z / SQRT_2) * sign_n2 * d3;
    let c_z = if c_num == zero {
        zero
    } else if brace.norm() < DEGENERATE_TOL {
        return Err(GfError::DegeneratePoint { z, reason: "published brace denominator vanishes" });
    } else {
        c_num / brace
    };

    if d2.norm() < DEGENERATE_TOL {
        return Err(GfError::DegeneratePoint { z, reason: "lambda_+^{N-2} - lambda_-^{N-2} vanishes" });
    }
    let e_num = 2.0 * sign_n3 * d1 * d3;
    let e_bracket_first = if e_num == zero {
        zero
    } else if brace.norm() < DEGENERATE_TOL {
        return Err(GfError::DegeneratePoint { z, reason: "published brace denominator vanishes" });
    } else {
        e_num / brace
    };
    let e_z = (z / (2.0 * d2)) * (e_bracket_first + s2);

    Ok(KonnoCoefficients { c_z, e_z })
}

pub fn konno_coefficients(z: Complex, n: u32) -> Result<KonnoCoefficients, GfError> {
    konno_coefficients_with(&lambda_pm(z)?, z, n)
}

/// Published closed form `p_k = (z/2 + E_z) lambda_+^{k-1} + (z/2 - E_z) lambda_-^{k-1}`,
/// `r_k = C_z (lambda_+^{k-N+1} - lambda_-^{k-N+1})`.
pub fn konno_gf_with(lambda: &LambdaPair, z: Complex, n: u32, k: u32) -> Result<GFValue, GfError> {
    check_site(n, k)?;
    let coeff = konno_coefficients_with(lambda, z, n)?;
    let e = k as i32;
    let half_z = z / 2.0;
    let p = (half_z + coeff.e_z) * lambda.plus.powi(e - 1) + (half_z - coeff.e_z) * lambda.minus.powi(e - 1);
    let shift = e - n as i32 + 1;
    let r = coeff.c_z * (lambda.plus.powi(shift) - lambda.minus.powi(shift));
    Ok(GFValue { p, r, z, n, k, method: Method::Konno })
}

pub fn konno_gf(z: Complex, n: u32, k: u32) -> Result<GFValue, GfError> {
    konno_gf_with(&lambda_pm(z)?, z, n, k)
}

fn check_site(n: u32, k: u32) -> Result<(), GfError> {
    if n < 2 {
        return Err(GfError::OutOfRange("need N >= 2"));
    }
    if k < 1 || k > n - 1 {
        return Err(GfError::OutOfRange("need 1 <= k <= N-1"));
    }
    Ok(())
}

fn one_norm(m: &DMatrix<Complex>) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|v| v.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Trusted Tier-1 route: solve the recursion as a dense linear system in
/// the unknowns `{p_k : 2 <= k <= N-1}` and `{r_k : 1 <= k <= N-2}` with
/// the boundary values substituted. Returns values for every `k = 1..N-1`.
pub fn solve_gf(z: Complex, n: u32) -> Result<Vec<GFValue>, GfError> {
    if n < 2 {
        return Err(GfError::OutOfRange("need N >= 2"));
    }
    if z == Complex::new(0.0, 0.0) {
        return Err(GfError::DegeneratePoint { z, reason: "z = 0" });
    }
    let zero = Complex::new(0.0, 0.0);
    if n == 2 {
        // empty interior: both values come from the boundary conditions
        return Ok(vec![GFValue { p: z, r: zero, z, n, k: 1, method: Method::Solve }]);
    }

    let a = Complex::new(FRAC_1_SQRT_2, 0.0);
    let b = a;
    let c = a;
    let d = -a;
    let nn = n as usize;
    let size = 2 * (nn - 2);
    let p_idx = |k: usize| k - 2;
    let r_idx = |k: usize| (nn - 2) + (k - 1);

    let mut m = DMatrix::from_element(size, size, zero);
    let mut rhs = DVector::from_element(size, zero);
    let mut row = 0;
    for k in 2..nn {
        m[(row, p_idx(k))] = Complex::new(1.0, 0.0);
        if k - 1 >= 2 {
            m[(row, p_idx(k - 1))] = -a * z;
        } else {
            rhs[row] = a * z * z; // p_1 = z
        }
        m[(row, r_idx(k - 1))] = -c * z;
        row += 1;
    }
    for k in 1..nn - 1 {
        m[(row, r_idx(k))] = Complex::new(1.0, 0.0);
        m[(row, p_idx(k + 1))] = -b * z;
        if k + 1 <= nn - 2 {
            m[(row, r_idx(k + 1))] = -d * z;
        }
        row += 1;
    }

    let lu = m.clone().lu();
    let inv = lu
        .try_inverse()
        .ok_or(GfError::SingularSystem { condition: f64::INFINITY })?;
    let condition = one_norm(&m) * one_norm(&inv);
    if condition > CONDITION_LIMIT {
        return Err(GfError::SingularSystem { condition });
    }
    let sol = lu
        .solve(&rhs)
        .ok_or(GfError::SingularSystem { condition: f64::INFINITY })?;

    let mut values = Vec::with_capacity(nn - 1);
    for k in 1..nn {
        let p = if k == 1 { z } else { sol[p_idx(k)] };
        let r = if k == nn - 1 { zero } else { sol[r_idx(k)] };
        values.push(GFValue { p, r, z, n, k: k as u32, method: Method::Solve });
    }

    let residual = recursion_residual_of(&values, z, n);
    let max = residual
        .max_p_residual
        .max(residual.max_r_residual)
        .max(residual.bc_p1_residual)
        .max(residual.bc_rn1_residual);
    if max >= SOLVE_RESIDUAL_TOL {
        return Err(GfError::SolveResidual { residual: max });
    }
    Ok(values)
}

/// Truncated series evaluation of a hit stream at `z`, `|z| < 1`:
/// `sum_t <weights, amplitude_t> z^t`, with an l2 tail bound from the
/// stream's truncation residual.
#[derive(Debug, Clone, Copy)]
pub struct SeriesValue {
    pub value: Complex,
    pub tail_bound: f64,
}

pub fn gf_from_series(
    series: &HittingSeries,
    z: Complex,
    component_weights: [Complex; 2],
    tol: &TolerancePolicy,
) -> Result<SeriesValue, GfError> {
    let zmod = z.norm();
    if zmod >= 1.0 {
        return Err(GfError::OutOfRange("series evaluation needs |z| < 1"));
    }
    let mut value = Complex::new(0.0, 0.0);
    let mut last_time = 0u64;
    for rec in &series.records {
        let w = component_weights[0] * rec.amplitude[0] + component_weights[1] * rec.amplitude[1];
        value += w * z.powu(rec.time as u32);
        last_time = rec.time;
    }
    // |sum_{t>T} a_t z^t| <= sqrt(residual) |z|^{T+1} / sqrt(1 - |z|^2)
    let tail_bound = series.residual_norm_sq.max(0.0).sqrt() * zmod.powi(last_time as i32 + 1)
        / (1.0 - zmod * zmod).sqrt();
    if tail_bound > tol.quad_tol {
        return Err(GfError::ConvergenceError { tail_bound });
    }
    Ok(SeriesValue { value, tail_bound })
}

fn recursion_residual_of(values: &[GFValue], z: Complex, n: u32) -> ResidualReport {
    let a = Complex::new(FRAC_1_SQRT_2, 0.0);
    let b = a;
    let c = a;
    let d = -a;
    let get = |k: u32| &values[(k - 1) as usize];
    let mut max_p = 0.0f64;
    let mut max_r = 0.0f64;
    for k in 2..n {
        let lhs = get(k).p;
        let rhs = a * z * get(k - 1).p + c * z * get(k - 1).r;
        max_p = max_p.max((lhs - rhs).norm());
    }
    for k in 1..n - 1 {
        let lhs = get(k).r;
        let rhs = b * z * get(k + 1).p + d * z * get(k + 1).r;
        max_r = max_r.max((lhs - rhs).norm());
    }
    ResidualReport {
        max_p_residual: max_p,
        max_r_residual: max_r,
        bc_p1_residual: (get(1).p - z).norm(),
        bc_rn1_residual: get(n - 1).r.norm(),
        sample_points: vec![z],
    }
}

/// Evaluate every recursion equation and both boundary conditions for the
/// chosen method at one point. The residual decides whether a route
/// satisfies the recursion; nothing is asserted here.
pub fn recursion_residual(method: Method, z: Complex, n: u32) -> Result<ResidualReport, GfError> {
    let values = method_values(method, z, n)?;
    Ok(recursion_residual_of(&values, z, n))
}

/// All `(p_k, r_k)` for `k = 1..N-1` by the chosen closed form or solve.
pub fn method_values(method: Method, z: Complex, n: u32) -> Result<Vec<GFValue>, GfError> {
    match method {
        Method::Solve => solve_gf(z, n),
        Method::Lemma => {
            let lambda = lambda_pm(z)?;
            (1..n).map(|k| lemma_gf_with(&lambda, z, n, k)).collect()
        }
        Method::Konno => {
            let lambda = lambda_pm(z)?;
            (1..n).map(|k| konno_gf_with(&lambda, z, n, k)).collect()
        }
        Method::Series => Err(GfError::OutOfRange("series values come from the simulator, not a formula")),
    }
}

/// The published rational form of `r_1^3`: `z^3 / (2 z^4 - 3 z^2 + 2)`.
pub fn r13_rational(z: Complex) -> Result<Complex, GfError> {
    let z2 = z * z;
    let denom = 2.0 * z2 * z2 - 3.0 * z2 + 2.0;
    if denom.norm() < 1e-14 {
        return Err(GfError::PoleHit { z });
    }
    Ok(z * z2 / denom)
}

/// Coefficients of the `r_1^3` denominator, lowest degree first.
pub const R13_DENOMINATOR: [f64; 5] = [2.0, 0.0, -3.0, 0.0, 2.0];
