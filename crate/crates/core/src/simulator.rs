//! Tier-0 oracle: exact time-domain evolution of the coined walk with
//! absorbing boundaries.
//!
//! Step rule: `psi_{n+1}(x) = P psi_n(x+1) + Q psi_n(x-1)`, with `P` the
//! top row of the coin (left-mover output) and `Q` the bottom row
//! (right-mover output). Boundary amplitude is removed after each full
//! step, both coin components, starting at time 1. This convention is
//! validated by the N=2 base case and the semi-infinite 2/pi run in the
//! acceptance suite.

use crate::types::{Boundary, CoinOperator, Complex, TolerancePolicy, WalkConfig};
use serde::Serialize;
use thiserror::Error;

/// Largest lattice the semi-infinite runner will allocate (two buffers of
/// 2 complex amplitudes per site).
pub const MAX_LATTICE_SITES: u64 = 1 << 24;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("operation requires a {expected} boundary")]
    WrongBoundary { expected: &'static str },
    #[error("requested lattice of {requested} sites exceeds the capacity bound {bound}")]
    CapacityError { requested: u64, bound: u64 },
    #[error("t_max must be >= 1")]
    BadHorizon,
}

/// Walker configuration over sites `0..=x_max`: a 2-vector of amplitudes
/// per site plus the current time.
#[derive(Debug, Clone)]
pub struct WaveState {
    amplitudes: Vec<[Complex; 2]>,
    time: u64,
}

impl WaveState {
    /// Zero state over `0..=x_max` with the given qubit placed at `site`.
    pub fn initial(x_max: usize, site: usize, alpha: Complex, beta: Complex) -> Self {
        let mut amplitudes = vec![[Complex::new(0.0, 0.0); 2]; x_max + 1];
        amplitudes[site] = [alpha, beta];
        Self { amplitudes, time: 0 }
    }

    pub fn time(&self) -> u64 {
        self.time
    }

    pub fn site(&self, x: usize) -> [Complex; 2] {
        self.amplitudes[x]
    }

    pub fn x_max(&self) -> usize {
        self.amplitudes.len() - 1
    }

    /// Total squared norm, summed in ascending site order so repeated runs
    /// are bitwise identical.
    pub fn norm_sqr(&self) -> f64 {
        let mut total = 0.0;
        for amp in &self.amplitudes {
            total += amp[0].norm_sqr() + amp[1].norm_sqr();
        }
        total
    }
}

/// One full step into a fresh buffer. Sites outside the lattice contribute
/// nothing.
fn step_into(src: &[[Complex; 2]], dst: &mut [[Complex; 2]], coin: &CoinOperator) {
    let (a, b, c, d) = (coin.a(), coin.b(), coin.c(), coin.d());
    let n = src.len();
    for x in 0..n {
        let left_in = if x + 1 < n {
            let up = src[x + 1];
            a * up[0] + b * up[1]
        } else {
            Complex::new(0.0, 0.0)
        };
        let right_in = if x > 0 {
            let dn = src[x - 1];
            c * dn[0] + d * dn[1]
        } else {
            Complex::new(0.0, 0.0)
        };
        dst[x] = [left_in, right_in];
    }
}

/// Pure single step of the walk; no absorption.
pub fn step_walk(state: &WaveState, coin: &CoinOperator) -> WaveState {
    let mut next = vec![[Complex::new(0.0, 0.0); 2]; state.amplitudes.len()];
    step_into(&state.amplitudes, &mut next, coin);
    WaveState { amplitudes: next, time: state.time + 1 }
}

/// Which absorbing barrier a hit landed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundarySite {
    LeftBoundary,
    RightBoundary,
}

/// Amplitude removed at a barrier at a given step.
#[derive(Debug, Clone, Copy)]
pub struct HittingRecord {
    pub time: u64,
    pub site: BoundarySite,
    pub amplitude: [Complex; 2],
}

impl HittingRecord {
    pub fn norm_sqr(&self) -> f64 {
        self.amplitude[0].norm_sqr() + self.amplitude[1].norm_sqr()
    }
}

/// Where the walker ended up: absorbed left, absorbed right, or still alive.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AbsorptionOutcome {
    pub p_left: f64,
    pub p_right: f64,
    pub survival: f64,
    pub steps_used: u64,
    pub converged: bool,
}

/// Left-boundary hitting stream plus the truncation residual, which callers
/// need to bound series-evaluation tails.
#[derive(Debug, Clone)]
pub struct HittingSeries {
    pub records: Vec<HittingRecord>,
    /// Surviving norm^2 at the step where the stream was truncated.
    pub residual_norm_sq: f64,
    /// Accumulated left absorption; equals the sum of record norms.
    pub p_left: f64,
}

/// Run the finite walk to absorption.
///
/// Loops one step at a time, removes the amplitude at sites 0 and `N`
/// (recording hits and accumulating their squared norms), and stops when
/// the surviving norm drops below `survival_tol` or `max_steps` is hit.
/// Non-convergence is a soft outcome (`converged = false`), not an error.
pub fn run_finite_absorption(
    config: &WalkConfig,
    tol: &TolerancePolicy,
) -> Result<(AbsorptionOutcome, Vec<HittingRecord>), SimError> {
    let n = match config.boundary {
        Boundary::Finite(n) => n as usize,
        Boundary::SemiInfinite => return Err(SimError::WrongBoundary { expected: "finite" }),
    };
    let k = config.start_k as usize;
    let mut cur = vec![[Complex::new(0.0, 0.0); 2]; n + 1];
    cur[k] = [config.qubit.alpha(), config.qubit.beta()];
    let mut next = cur.clone();

    let mut p_left = 0.0;
    let mut p_right = 0.0;
    let mut hits = Vec::new();
    let mut survival = 1.0;
    let mut steps_used = 0;
    let mut converged = false;

    for t in 1..=tol.max_steps {
        step_into(&cur, &mut next, &config.coin);
        let hl = next[0];
        let hr = next[n];
        let wl = hl[0].norm_sqr() + hl[1].norm_sqr();
        let wr = hr[0].norm_sqr() + hr[1].norm_sqr();
        if wl > 0.0 {
            hits.push(HittingRecord { time: t, site: BoundarySite::LeftBoundary, amplitude: hl });
            p_left += wl;
        }
        if wr > 0.0 {
            hits.push(HittingRecord { time: t, site: BoundarySite::RightBoundary, amplitude: hr });
            p_right += wr;
        }
        next[0] = [Complex::new(0.0, 0.0); 2];
        next[n] = [Complex::new(0.0, 0.0); 2];
        std::mem::swap(&mut cur, &mut next);
        steps_used = t;

        survival = 0.0;
        for amp in &cur {
            survival += amp[0].norm_sqr() + amp[1].norm_sqr();
        }
        if survival < tol.survival_tol {
            converged = true;
            break;
        }
    }

    Ok((
        AbsorptionOutcome { p_left, p_right, survival, steps_used, converged },
        hits,
    ))
}

/// Run the semi-infinite walk for exactly `t_max` steps.
///
/// The lattice is truncated at `x_max = k + t_max + 1`; the front moves one
/// site per step, so nothing can reach the artificial right edge and the
/// run is exact for the semi-infinite walk up to `t_max`. Absorption happens
/// at site 0 only and `survival = 1 - p_left`.
///
/// The converged flag checks the absorption increment over the final two
/// steps (one of any two consecutive steps has the parity that can reach
/// site 0) against `survival_tol`.
pub fn run_semi_infinite_absorption(
    config: &WalkConfig,
    t_max: u64,
    tol: &TolerancePolicy,
) -> Result<AbsorptionOutcome, SimError> {
    if config.boundary != Boundary::SemiInfinite {
        return Err(SimError::WrongBoundary { expected: "semi-infinite" });
    }
    if t_max < 1 {
        return Err(SimError::BadHorizon);
    }
    let k = config.start_k as u64;
    let x_max = k + t_max + 1;
    if x_max + 1 > MAX_LATTICE_SITES {
        return Err(SimError::CapacityError { requested: x_max + 1, bound: MAX_LATTICE_SITES });
    }
    let x_max = x_max as usize;
    let mut cur = vec![[Complex::new(0.0, 0.0); 2]; x_max + 1];
    cur[k as usize] = [config.qubit.alpha(), config.qubit.beta()];
    let mut next = cur.clone();

    let mut p_left = 0.0;
    let mut last_two = [0.0f64; 2];
    for t in 1..=t_max {
        // light cone: occupied sites stay within k + t of the start
        let frontier = (k as usize + t as usize + 1).min(x_max);
        step_into(&cur[..=frontier], &mut next[..=frontier], &config.coin);
        let hl = next[0];
        let inc = hl[0].norm_sqr() + hl[1].norm_sqr();
        p_left += inc;
        last_two[(t % 2) as usize] = inc;
        next[0] = [Complex::new(0.0, 0.0); 2];
        std::mem::swap(&mut cur, &mut next);
    }
    let last_inc = last_two[0].max(last_two[1]);

    Ok(AbsorptionOutcome {
        p_left,
        p_right: 0.0,
        survival: 1.0 - p_left,
        steps_used: t_max,
        converged: last_inc < tol.survival_tol,
    })
}

/// Semi-infinite run plus a Richardson refinement in `1/t`:
/// `2 p(T) - p(T/2)`.
pub fn semi_infinite_extrapolated(
    config: &WalkConfig,
    t_max: u64,
    tol: &TolerancePolicy,
) -> Result<(AbsorptionOutcome, f64), SimError> {
    let full = run_semi_infinite_absorption(config, t_max, tol)?;
    let half = run_semi_infinite_absorption(config, (t_max / 2).max(1), tol)?;
    Ok((full, 2.0 * full.p_left - half.p_left))
}

/// The complete left-boundary hitting stream of a finite run, exposed for
/// series evaluation and Parseval checks.
pub fn hitting_amplitude_series(
    config: &WalkConfig,
    tol: &TolerancePolicy,
) -> Result<HittingSeries, SimError> {
    let (outcome, hits) = run_finite_absorption(config, tol)?;
    let records: Vec<HittingRecord> = hits
        .into_iter()
        .filter(|h| h.site == BoundarySite::LeftBoundary)
        .collect();
    Ok(HittingSeries {
        records,
        residual_norm_sq: outcome.survival,
        p_left: outcome.p_left,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{hadamard_coin, QubitState};

    const S: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn cx(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn finite_config(n: u32, k: u32, qubit: QubitState) -> WalkConfig {
        WalkConfig::new(Boundary::Finite(n), k, qubit, hadamard_coin()).unwrap()
    }

    #[test]
    fn single_step_from_right_state() {
        let state = WaveState::initial(2, 1, cx(0.0, 0.0), cx(1.0, 0.0));
        let next = step_walk(&state, &hadamard_coin());
        assert!((next.site(0)[0] - cx(S, 0.0)).norm() < 1e-15);
        assert!((next.site(0)[1]).norm() == 0.0);
        assert!((next.site(2)[1] - cx(-S, 0.0)).norm() < 1e-15);
        assert!((next.site(2)[0]).norm() == 0.0);
        assert_eq!(next.time(), 1);
    }

    #[test]
    fn single_step_from_left_state() {
        let state = WaveState::initial(2, 1, cx(1.0, 0.0), cx(0.0, 0.0));
        let next = step_walk(&state, &hadamard_coin());
        assert!((next.site(0)[0] - cx(S, 0.0)).norm() < 1e-15);
        assert!((next.site(2)[1] - cx(S, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn zero_state_stays_zero() {
        let state = WaveState::initial(4, 2, cx(0.0, 0.0), cx(0.0, 0.0));
        let next = step_walk(&state, &hadamard_coin());
        assert_eq!(next.norm_sqr(), 0.0);
    }

    #[test]
    fn n2_base_case_absorbs_in_one_step() {
        let config = finite_config(2, 1, QubitState::right());
        let (out, hits) = run_finite_absorption(&config, &TolerancePolicy::default()).unwrap();
        assert!((out.p_left - 0.5).abs() < 1e-15);
        assert!((out.p_right - 0.5).abs() < 1e-15);
        assert_eq!(out.survival, 0.0);
        assert_eq!(out.steps_used, 1);
        assert!(out.converged);
        assert_eq!(hits.len(), 2);
    }

    #[test]
    fn n3_absorption_is_two_thirds_for_both_basis_states() {
        // independent oracle: r_1^3(z) = z^3/(2 - z^2) by hand elimination,
        // Parseval sum 1/3, absorption (1 + 1/3)/2 = 2/3
        for qubit in [QubitState::right(), QubitState::left()] {
            let config = finite_config(3, 1, qubit);
            let (out, _) = run_finite_absorption(&config, &TolerancePolicy::default()).unwrap();
            assert!(
                (out.p_left - 2.0 / 3.0).abs() < 1e-10,
                "p_left = {} for {qubit:?}",
                out.p_left
            );
            assert!(out.converged);
        }
    }

    #[test]
    fn accounting_sums_to_one() {
        for (n, k) in [(3u32, 1u32), (5, 2), (8, 3), (13, 7)] {
            let config = finite_config(n, k, QubitState::right());
            let (out, _) = run_finite_absorption(&config, &TolerancePolicy::default()).unwrap();
            assert!(
                (out.p_left + out.p_right + out.survival - 1.0).abs() < 1e-10,
                "accounting failed at N={n}, k={k}"
            );
        }
    }

    #[test]
    fn left_hits_match_start_parity() {
        for k in [1u32, 2, 3] {
            let config = finite_config(7, k, QubitState::right());
            let series = hitting_amplitude_series(&config, &TolerancePolicy::default()).unwrap();
            for rec in &series.records {
                assert_eq!(rec.time % 2, u64::from(k) % 2, "hit at t={} from k={k}", rec.time);
            }
        }
    }

    #[test]
    fn n2_series_is_a_single_record() {
        let config = finite_config(2, 1, QubitState::right());
        let series = hitting_amplitude_series(&config, &TolerancePolicy::default()).unwrap();
        assert_eq!(series.records.len(), 1);
        let rec = series.records[0];
        assert_eq!(rec.time, 1);
        assert!((rec.amplitude[0] - cx(S, 0.0)).norm() < 1e-15);
        assert_eq!(rec.amplitude[1], cx(0.0, 0.0));
    }

    #[test]
    fn n3_hit_norms_decay_by_quarter() {
        let config = finite_config(3, 1, QubitState::right());
        let series = hitting_amplitude_series(&config, &TolerancePolicy::default()).unwrap();
        assert!(series.records.len() > 5);
        // after the first hit the stream is geometric with ratio 1/4 per record
        for pair in series.records.windows(2).skip(1) {
            let ratio = pair[1].norm_sqr() / pair[0].norm_sqr();
            assert!((ratio - 0.25).abs() < 1e-10, "ratio = {ratio}");
        }
    }

    #[test]
    fn series_total_matches_p_left() {
        let config = finite_config(5, 2, QubitState::right());
        let series = hitting_amplitude_series(&config, &TolerancePolicy::default()).unwrap();
        let total: f64 = series.records.iter().map(|r| r.norm_sqr()).sum();
        assert!((total - series.p_left).abs() < 1e-12);
    }

    #[test]
    fn finite_lattices_converge_quickly() {
        // decay property for N <= 30
        for n in [10u32, 20, 30] {
            let config = finite_config(n, n / 2, QubitState::right());
            let (out, _) = run_finite_absorption(&config, &TolerancePolicy::default()).unwrap();
            assert!(out.converged, "N={n} did not reach survival < 1e-14");
            assert!(out.survival < 1e-14);
        }
    }

    #[test]
    fn semi_infinite_single_step() {
        let alpha = cx(0.3, 0.0);
        let beta = cx((1.0f64 - 0.09).sqrt(), 0.0);
        let q = QubitState::new(alpha, beta).unwrap();
        let config = WalkConfig::new(Boundary::SemiInfinite, 1, q, hadamard_coin()).unwrap();
        let out = run_semi_infinite_absorption(&config, 1, &TolerancePolicy::default()).unwrap();
        let expected = (alpha + beta).norm_sqr() / 2.0;
        assert!((out.p_left - expected).abs() < 1e-15);
        assert_eq!(out.p_right, 0.0);
        assert!((out.p_left + out.survival - 1.0).abs() < 1e-15);
    }

    #[test]
    fn semi_infinite_matches_finite_within_light_cone() {
        // before the right barrier is reachable the two runs agree exactly
        let q = QubitState::right();
        let semi_cfg = WalkConfig::new(Boundary::SemiInfinite, 1, q, hadamard_coin()).unwrap();
        let out = run_semi_infinite_absorption(&semi_cfg, 20, &TolerancePolicy::default()).unwrap();

        let fin_cfg = finite_config(40, 1, q);
        let (_, hits) = run_finite_absorption(&fin_cfg, &TolerancePolicy::default()).unwrap();
        let p20: f64 = hits
            .iter()
            .filter(|h| h.site == BoundarySite::LeftBoundary && h.time <= 20)
            .map(|h| h.norm_sqr())
            .sum();
        assert!((out.p_left - p20).abs() < 1e-14);
    }

    #[test]
    fn capacity_bound_is_enforced() {
        let q = QubitState::right();
        let config = WalkConfig::new(Boundary::SemiInfinite, 1, q, hadamard_coin()).unwrap();
        let err = run_semi_infinite_absorption(&config, MAX_LATTICE_SITES + 10, &TolerancePolicy::default());
        assert!(matches!(err, Err(SimError::CapacityError { .. })));
    }

    #[test]
    fn wrong_boundary_is_rejected() {
        let q = QubitState::right();
        let semi = WalkConfig::new(Boundary::SemiInfinite, 1, q, hadamard_coin()).unwrap();
        assert!(run_finite_absorption(&semi, &TolerancePolicy::default()).is_err());
        let fin = finite_config(4, 1, q);
        assert!(run_semi_infinite_absorption(&fin, 10, &TolerancePolicy::default()).is_err());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn random_wave(seed: (f64, f64, f64, f64)) -> WaveState {
            let mut state = WaveState::initial(6, 3, cx(0.0, 0.0), cx(0.0, 0.0));
            let vals = [seed.0, seed.1, seed.2, seed.3];
            let mut norm = 0.0;
            for (i, v) in vals.iter().enumerate() {
                let amp = [cx(v.cos(), v.sin()), cx((v * 1.7).cos(), (v * 0.3).sin())];
                state.amplitudes[i + 1] = amp;
                norm += amp[0].norm_sqr() + amp[1].norm_sqr();
            }
            let scale = norm.sqrt();
            for amp in &mut state.amplitudes {
                amp[0] /= scale;
                amp[1] /= scale;
            }
            state
        }

        proptest! {
            // one step without removal preserves the norm (coin unitarity)
            #[test]
            fn step_preserves_norm(a in -3.0f64..3.0, b in -3.0f64..3.0,
                                   c in -3.0f64..3.0, d in -3.0f64..3.0) {
                let state = random_wave((a, b, c, d));
                let before = state.norm_sqr();
                let after = step_walk(&state, &hadamard_coin()).norm_sqr();
                prop_assert!((before - after).abs() < 1e-13);
            }

            // hit streams are linear in the initial qubit
            #[test]
            fn hits_are_linear(re_a in -1.0f64..1.0, im_a in -1.0f64..1.0, re_b in -1.0f64..1.0) {
                let raw_a = cx(re_a, im_a);
                let raw_b = cx(re_b, 0.25);
                let norm = (raw_a.norm_sqr() + raw_b.norm_sqr()).sqrt();
                prop_assume!(norm > 1e-2);
                let alpha = raw_a / norm;
                let beta = raw_b / norm;
                let q = QubitState::new(alpha, beta).unwrap();
                let tol = TolerancePolicy::default();

                let combined = hitting_amplitude_series(&finite_config(4, 1, q), &tol).unwrap();
                let from_l = hitting_amplitude_series(
                    &finite_config(4, 1, QubitState::left()), &tol).unwrap();
                let from_r = hitting_amplitude_series(
                    &finite_config(4, 1, QubitState::right()), &tol).unwrap();

                use std::collections::BTreeMap;
                let mut by_time: BTreeMap<u64, Complex> = BTreeMap::new();
                for rec in &from_l.records {
                    *by_time.entry(rec.time).or_insert(cx(0.0, 0.0)) += alpha * rec.amplitude[0];
                }
                for rec in &from_r.records {
                    *by_time.entry(rec.time).or_insert(cx(0.0, 0.0)) += beta * rec.amplitude[0];
                }
                for rec in combined.records.iter().take(30) {
                    let expect = by_time.get(&rec.time).copied().unwrap_or(cx(0.0, 0.0));
                    prop_assert!((rec.amplitude[0] - expect).norm() < 1e-12);
                }
            }
        }
    }
}
