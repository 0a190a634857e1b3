//! Shared domain types: qubit states, coin operators, walk configurations
//! and the tolerance policy used by every numerical route.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

/// Complex scalar used throughout. All stored values must be finite;
/// constructors reject NaN/Inf instead of letting them propagate.
pub type Complex = Complex64;

/// Tolerance on `|alpha|^2 + |beta|^2 - 1` accepted at construction.
pub const NORM_TOL: f64 = 1e-12;

/// Tolerance on the entrywise unitarity residual of a coin operator.
pub const UNITARITY_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("qubit norm violation: |alpha|^2 + |beta|^2 = {0}")]
    NormViolation(f64),
    #[error("coin operator not unitary: max entrywise residual of U*U^dag - I is {0:.3e}")]
    NotUnitary(f64),
    #[error("non-finite component in {0}")]
    NonFinite(&'static str),
    #[error("invalid walk configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid tolerance policy: {0}")]
    InvalidTolerance(&'static str),
}

fn finite(z: Complex) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Initial coin state `t[alpha, beta]` with `|alpha|^2 + |beta|^2 = 1`.
///
/// Component 0 is the left-mover (`L`), component 1 the right-mover (`R`),
/// so `t[0, 1]` is the `|R>` state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    alpha: Complex,
    beta: Complex,
}

impl QubitState {
    pub fn new(alpha: Complex, beta: Complex) -> Result<Self, CoreError> {
        if !finite(alpha) || !finite(beta) {
            return Err(CoreError::NonFinite("qubit state"));
        }
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(CoreError::NormViolation(norm));
        }
        Ok(Self { alpha, beta })
    }

    /// `t[1, 0]`, the left-mover basis state.
    pub fn left() -> Self {
        Self { alpha: Complex::new(1.0, 0.0), beta: Complex::new(0.0, 0.0) }
    }

    /// `t[0, 1] = |R>`, the right-mover basis state.
    pub fn right() -> Self {
        Self { alpha: Complex::new(0.0, 0.0), beta: Complex::new(1.0, 0.0) }
    }

    pub fn alpha(&self) -> Complex {
        self.alpha
    }

    pub fn beta(&self) -> Complex {
        self.beta
    }
}

/// `make_qubit` in the operation tables; thin alias over [`QubitState::new`].
pub fn make_qubit(alpha: Complex, beta: Complex) -> Result<QubitState, CoreError> {
    QubitState::new(alpha, beta)
}

/// 2x2 unitary coin `U = [[a, b], [c, d]]`, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoinOperator {
    a: Complex,
    b: Complex,
    c: Complex,
    d: Complex,
}

/// Max entrywise residual of `U * U^dag - I` for raw entries.
///
/// Pure measurement; construction of [`CoinOperator`] rejects anything
/// above [`UNITARITY_TOL`].
pub fn unitarity_residual(a: Complex, b: Complex, c: Complex, d: Complex) -> f64 {
    // U U^dag = [[aa*+bb*, ac*+bd*], [ca*+db*, cc*+dd*]]
    let one = Complex::new(1.0, 0.0);
    let r00 = a * a.conj() + b * b.conj() - one;
    let r01 = a * c.conj() + b * d.conj();
    let r10 = c * a.conj() + d * b.conj();
    let r11 = c * c.conj() + d * d.conj() - one;
    r00.norm().max(r01.norm()).max(r10.norm()).max(r11.norm())
}

impl CoinOperator {
    pub fn new(a: Complex, b: Complex, c: Complex, d: Complex) -> Result<Self, CoreError> {
        for z in [a, b, c, d] {
            if !finite(z) {
                return Err(CoreError::NonFinite("coin operator"));
            }
        }
        let residual = unitarity_residual(a, b, c, d);
        if residual > UNITARITY_TOL {
            return Err(CoreError::NotUnitary(residual));
        }
        Ok(Self { a, b, c, d })
    }

    /// The Hadamard coin: `a = b = c = 1/sqrt(2)`, `d = -1/sqrt(2)`.
    pub fn hadamard() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            a: Complex::new(s, 0.0),
            b: Complex::new(s, 0.0),
            c: Complex::new(s, 0.0),
            d: Complex::new(-s, 0.0),
        }
    }

    pub fn a(&self) -> Complex {
        self.a
    }

    pub fn b(&self) -> Complex {
        self.b
    }

    pub fn c(&self) -> Complex {
        self.c
    }

    pub fn d(&self) -> Complex {
        self.d
    }

    /// Unitarity residual of this (already validated) coin.
    pub fn unitarity_residual(&self) -> f64 {
        unitarity_residual(self.a, self.b, self.c, self.d)
    }

    pub fn det(&self) -> Complex {
        self.a * self.d - self.b * self.c
    }
}

/// `hadamard_coin` in the operation tables.
pub fn hadamard_coin() -> CoinOperator {
    CoinOperator::hadamard()
}

/// `check_unitarity` in the operation tables.
pub fn check_unitarity(u: &CoinOperator) -> f64 {
    u.unitarity_residual()
}

/// Boundary geometry of the walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Boundary {
    /// Absorbing barriers at 0 and `N`, `N >= 2`.
    Finite(u32),
    /// Absorbing barrier at 0 only.
    SemiInfinite,
}

/// Full description of one walk: geometry, start site, initial qubit, coin.
#[derive(Debug, Clone, Copy)]
pub struct WalkConfig {
    pub boundary: Boundary,
    pub start_k: u32,
    pub qubit: QubitState,
    pub coin: CoinOperator,
}

impl WalkConfig {
    pub fn new(
        boundary: Boundary,
        start_k: u32,
        qubit: QubitState,
        coin: CoinOperator,
    ) -> Result<Self, CoreError> {
        match boundary {
            Boundary::Finite(n) => {
                if n < 2 {
                    return Err(CoreError::InvalidConfig(format!("finite boundary needs N >= 2, got {n}")));
                }
                if start_k < 1 || start_k > n - 1 {
                    return Err(CoreError::InvalidConfig(format!(
                        "start site must satisfy 1 <= k <= N-1, got k={start_k}, N={n}"
                    )));
                }
            }
            Boundary::SemiInfinite => {
                if start_k < 1 {
                    return Err(CoreError::InvalidConfig("semi-infinite walk needs k >= 1".into()));
                }
            }
        }
        Ok(Self { boundary, start_k, qubit, coin })
    }
}

/// Central tolerance policy. Single source of truth so that every route
/// (time domain, boundary-value solve, quadrature) is reproducible from
/// the same knobs.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TolerancePolicy {
    /// Stop a finite run once the surviving norm^2 drops below this.
    pub survival_tol: f64,
    /// Hard cap on simulated steps.
    pub max_steps: u64,
    /// Convergence threshold for unit-circle quadrature.
    pub quad_tol: f64,
    /// Grid doublings allowed from the base 64-node grid.
    pub max_grid_doublings: u32,
    /// Acceptable recursion residual for solved generating functions.
    pub residual_tol: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        Self {
            survival_tol: 1e-14,
            max_steps: 1_000_000,
            quad_tol: 1e-10,
            max_grid_doublings: 16,
            residual_tol: 1e-12,
        }
    }
}

impl TolerancePolicy {
    pub fn validate(&self) -> Result<(), CoreError> {
        if !(self.survival_tol > 0.0) {
            return Err(CoreError::InvalidTolerance("survival_tol must be > 0"));
        }
        if self.max_steps < 1 {
            return Err(CoreError::InvalidTolerance("max_steps must be >= 1"));
        }
        if !(self.quad_tol > 0.0) {
            return Err(CoreError::InvalidTolerance("quad_tol must be > 0"));
        }
        if self.max_grid_doublings < 1 {
            return Err(CoreError::InvalidTolerance("max_grid_doublings must be >= 1"));
        }
        if !(self.residual_tol > 0.0) {
            return Err(CoreError::InvalidTolerance("residual_tol must be > 0"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn make_qubit_accepts_basis_states() {
        let r = make_qubit(Complex::new(0.0, 0.0), Complex::new(1.0, 0.0)).unwrap();
        assert_eq!(r, QubitState::right());
        let l = make_qubit(Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)).unwrap();
        assert_eq!(l, QubitState::left());
    }

    #[test]
    fn make_qubit_rejects_norm_two() {
        let err = make_qubit(Complex::new(1.0, 0.0), Complex::new(1.0, 0.0)).unwrap_err();
        match err {
            CoreError::NormViolation(n) => assert!((n - 2.0).abs() < 1e-15),
            other => panic!("expected NormViolation, got {other:?}"),
        }
    }

    #[test]
    fn make_qubit_rejects_non_finite() {
        assert!(make_qubit(Complex::new(f64::NAN, 0.0), Complex::new(0.0, 0.0)).is_err());
        assert!(make_qubit(Complex::new(f64::INFINITY, 0.0), Complex::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn hadamard_entries_and_unitarity() {
        let h = hadamard_coin();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(h.a(), Complex::new(s, 0.0));
        assert_eq!(h.b(), Complex::new(s, 0.0));
        assert_eq!(h.c(), Complex::new(s, 0.0));
        assert_eq!(h.d(), Complex::new(-s, 0.0));
        assert!(check_unitarity(&h) < 1e-15);
        assert!((h.det() + Complex::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn identity_has_zero_residual() {
        let one = Complex::new(1.0, 0.0);
        let zero = Complex::new(0.0, 0.0);
        let id = CoinOperator::new(one, zero, zero, one).unwrap();
        assert_eq!(check_unitarity(&id), 0.0);
    }

    #[test]
    fn shear_matrix_rejected() {
        let one = Complex::new(1.0, 0.0);
        let zero = Complex::new(0.0, 0.0);
        assert!(unitarity_residual(one, one, zero, one) >= 1.0);
        match CoinOperator::new(one, one, zero, one) {
            Err(CoreError::NotUnitary(r)) => assert!(r >= 1.0),
            other => panic!("expected NotUnitary, got {other:?}"),
        }
    }

    #[test]
    fn walk_config_ranges() {
        let q = QubitState::right();
        let h = hadamard_coin();
        assert!(WalkConfig::new(Boundary::Finite(2), 1, q, h).is_ok());
        assert!(WalkConfig::new(Boundary::Finite(2), 2, q, h).is_err());
        assert!(WalkConfig::new(Boundary::Finite(1), 1, q, h).is_err());
        assert!(WalkConfig::new(Boundary::Finite(5), 0, q, h).is_err());
        assert!(WalkConfig::new(Boundary::SemiInfinite, 0, q, h).is_err());
        assert!(WalkConfig::new(Boundary::SemiInfinite, 1, q, h).is_ok());
    }

    #[test]
    fn tolerance_policy_validation() {
        assert!(TolerancePolicy::default().validate().is_ok());
        let mut t = TolerancePolicy::default();
        t.quad_tol = 0.0;
        assert!(t.validate().is_err());
        let mut t = TolerancePolicy::default();
        t.max_steps = 0;
        assert!(t.validate().is_err());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            // normalized inputs are accepted, clearly off-norm inputs rejected
            #[test]
            fn qubit_norm_gate(re_a in -1.0f64..1.0, im_a in -1.0f64..1.0,
                               re_b in -1.0f64..1.0, im_b in -1.0f64..1.0) {
                let raw_a = Complex::new(re_a, im_a);
                let raw_b = Complex::new(re_b, im_b);
                let norm = (raw_a.norm_sqr() + raw_b.norm_sqr()).sqrt();
                prop_assume!(norm > 1e-3);
                let a = raw_a / norm;
                let b = raw_b / norm;
                prop_assert!(QubitState::new(a, b).is_ok());
                prop_assert!(QubitState::new(a * 1.5, b * 1.5).is_err());
            }

            // every accepted coin satisfies the unitarity bound
            #[test]
            fn coin_residual_bound(theta in 0.0f64..std::f64::consts::TAU,
                                   phi in 0.0f64..std::f64::consts::TAU) {
                // rotation + phase: always unitary
                let (s, c) = theta.sin_cos();
                let w = Complex::new(phi.cos(), phi.sin());
                let u = CoinOperator::new(
                    Complex::new(c, 0.0),
                    Complex::new(s, 0.0) * w,
                    Complex::new(-s, 0.0) * w.conj(),
                    Complex::new(c, 0.0),
                );
                prop_assert!(u.is_ok());
                prop_assert!(u.unwrap().unitarity_residual() <= UNITARITY_TOL);
            }
        }
    }
}
