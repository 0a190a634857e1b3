//! Acceptance suite: every criterion below runs at its stated tolerance
//! and prints one pass/fail line (`cargo test --test acceptance -- --nocapture`).
//!
//! Criteria 1, 5 and 12 exercise the `qwalk` binary itself; the rest go
//! through the library so their runtimes exclude process spawn.

use qwalk_core::*;
use std::process::Command;
use std::time::{Duration, Instant};

const TWO_THIRDS: f64 = 2.0 / 3.0;
const INV_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn report(id: &str, name: &str, pass: bool, details: &str) {
    let status = if pass { "PASS" } else { "FAIL" };
    println!("[acceptance] {id} {name}: {status} — {details}");
    assert!(pass, "{id} {name}: {details}");
}

fn qwalk() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qwalk"))
}

fn run_json(args: &[&str]) -> (serde_json::Value, i32) {
    let out = qwalk().args(args).output().expect("binary runs");
    let code = out.status.code().unwrap_or(-1);
    let payload: serde_json::Value =
        serde_json::from_slice(&out.stdout).unwrap_or(serde_json::Value::Null);
    (payload, code)
}

fn finite_config(n: u32, k: u32, qubit: QubitState) -> WalkConfig {
    WalkConfig::new(Boundary::Finite(n), k, qubit, hadamard_coin()).unwrap()
}

#[test]
fn criterion_01_base_case() {
    let tol = TolerancePolicy::default();
    let config = finite_config(2, 1, QubitState::right());
    let started = Instant::now();
    let (outcome, _) = run_finite_absorption(&config, &tol).unwrap();
    let elapsed = started.elapsed();

    let (payload, code) = run_json(&["simulate", "--n", "2", "--k", "1", "--state", "R", "--format", "json"]);
    let cli_p_left = payload["results"]["p_left"].as_f64().unwrap_or(f64::NAN);
    let cli_p_right = payload["results"]["p_right"].as_f64().unwrap_or(f64::NAN);

    let pass = (outcome.p_left - 0.5).abs() < 1e-15
        && (outcome.p_right - 0.5).abs() < 1e-15
        && (cli_p_left - 0.5).abs() < 1e-15
        && (cli_p_right - 0.5).abs() < 1e-15
        && code == 0
        && elapsed < Duration::from_millis(1);
    report(
        "C01",
        "base case N=2",
        pass,
        &format!(
            "p_left={:.17}, p_right={:.17}, cli exit {code}, {elapsed:?}",
            outcome.p_left, outcome.p_right
        ),
    );
}

#[test]
fn criterion_02_n3_adjudication() {
    let tol = TolerancePolicy::default();
    let started = Instant::now();

    let (sim, _) = run_finite_absorption(&finite_config(3, 1, QubitState::right()), &tol).unwrap();
    let corollary = corollary_p1n(3, Method::Solve, &tol).unwrap().value.unwrap();
    let coeffs = compute_c123(3, 1, Method::Solve, &tol).unwrap();
    let theorem = absorption_from_c123(&coeffs, &QubitState::right()).unwrap();
    let verify = conjecture_verdict(&[2, 3], DEFAULT_SEED, &tol).unwrap();
    let elapsed = started.elapsed();

    let routes = [sim.p_left, corollary, theorem];
    let max_cross = routes
        .iter()
        .flat_map(|a| routes.iter().map(move |b| (a - b).abs()))
        .fold(0.0, f64::max);
    let max_vs_exact = routes.iter().map(|v| (v - TWO_THIRDS).abs()).fold(0.0, f64::max);

    let claims = &verify.verdict_support.published_claims;
    let pass = max_cross < 1e-8
        && max_vs_exact < 1e-10
        && verify.verdict == Verdict::MatchesRecursion
        && claims.iter().any(|c| c.contains("2/3"))
        && claims.iter().any(|c| c.contains("1/2"))
        && elapsed < Duration::from_secs(1);
    report(
        "C02",
        "N=3 adjudication",
        pass,
        &format!(
            "sim={:.12}, corollary={:.12}, theorem={:.12}, cross={max_cross:.2e}, vs 2/3={max_vs_exact:.2e}, verdict={:?}, {elapsed:?}",
            sim.p_left, corollary, theorem, verify.verdict
        ),
    );
}

#[test]
fn criterion_03_conjecture_table() {
    let tol = TolerancePolicy::default();
    let started = Instant::now();
    let recursion = conjecture_sequence(10);
    let mut worst = 0.0f64;
    for n in 2..=10u32 {
        let (sim, _) = run_finite_absorption(&finite_config(n, 1, QubitState::right()), &tol).unwrap();
        let exact = recursion[(n - 1) as usize].to_f64();
        worst = worst.max((sim.p_left - exact).abs());
    }
    let elapsed = started.elapsed();
    let pass = worst < 1e-6 && elapsed < Duration::from_secs(30);
    report(
        "C03",
        "conjecture table N=2..10",
        pass,
        &format!("max |simulator - recursion| = {worst:.3e}, {elapsed:?}"),
    );
}

#[test]
fn criterion_04_asymptote() {
    let tol = TolerancePolicy::default();
    let started = Instant::now();
    let (sim, _) = run_finite_absorption(&finite_config(100, 1, QubitState::right()), &tol).unwrap();
    let delta = (sim.p_left - INV_SQRT_2).abs();

    // exact monotonicity and boundedness of the recursion sequence
    let seq = conjecture_sequence(300);
    let monotone = seq.windows(2).all(|w| w[0] < w[1]);
    let bounded = seq.iter().all(|p| p.below_inv_sqrt2());
    let elapsed = started.elapsed();

    let pass = delta < 1e-2 && monotone && bounded && elapsed < Duration::from_secs(120);
    report(
        "C04",
        "asymptote N=100 and exact sequence bounds",
        pass,
        &format!(
            "p_left={:.9} vs 1/sqrt(2)={INV_SQRT_2:.9} (delta {delta:.2e}, converged={}), monotone={monotone}, bounded={bounded}, {elapsed:?}",
            sim.p_left, sim.converged
        ),
    );
}

#[test]
fn criterion_05_semi_infinite() {
    let started = Instant::now();
    let cases = [
        ("R", 2.0 / std::f64::consts::PI),
        ("0.7071067811865476,0,0.7071067811865476,0", 1.0),
        ("0.7071067811865476,0,-0.7071067811865476,0", 4.0 / std::f64::consts::PI - 1.0),
    ];
    let mut details = Vec::new();
    let mut pass = true;
    for (state, expect) in cases {
        let (payload, code) = run_json(&[
            "semi", "--k", "1", "--state", state, "--tmax", "10000", "--format", "json",
        ]);
        let p = payload["results"]["p_left"].as_f64().unwrap_or(f64::NAN);
        let delta = (p - expect).abs();
        // the polynomial tail leaves the strict convergence flag false, so
        // exit 3 (finding) is as acceptable as 0 here
        pass &= delta < 5e-3 && (code == 0 || code == 3);
        details.push(format!("{state}: {p:.8} vs {expect:.8} (delta {delta:.2e})"));
    }
    let elapsed = started.elapsed();
    pass &= elapsed < Duration::from_secs(60);
    report("C05", "semi-infinite CLI at t=10^4", pass, &format!("{}; {elapsed:?}", details.join("; ")));
}

#[test]
fn criterion_06_closed_form_flaw() {
    let started = Instant::now();
    let flaw = demonstrate_konno_flaw(50, DEFAULT_SEED);
    let elapsed = started.elapsed();
    let pass = flaw.max_abs_c_z_at_n3 < 1e-13
        && flaw.max_abs_konno_r13 < 1e-13
        && (flaw.abs_solve_r13_at_i - 1.0 / 3.0).abs() < 1e-12
        && elapsed < Duration::from_secs(1);
    report(
        "C06",
        "closed-form flaw at N=3",
        pass,
        &format!(
            "max|C_z|={:.2e}, max|konno r|={:.2e}, |solve r(i)|={:.15}, {elapsed:?}",
            flaw.max_abs_c_z_at_n3, flaw.max_abs_konno_r13, flaw.abs_solve_r13_at_i
        ),
    );
}

#[test]
fn criterion_07_lemma_checks() {
    let mut checked = 0u32;
    let mut max_bc_p1 = 0.0f64;
    let mut max_bc_rn1 = 0.0f64;
    for n in [3u32, 4, 5, 8] {
        for z in z_samples(DEFAULT_SEED ^ u64::from(n), 100) {
            let lambda = match lambda_pm(z) {
                Ok(l) => l,
                Err(_) => continue,
            };
            let p1 = match qwalk_core::genfunc::lemma_gf_with(&lambda, z, n, 1) {
                Ok(v) => v,
                Err(_) => continue,
            };
            let rn1 = match qwalk_core::genfunc::lemma_gf_with(&lambda, z, n, n - 1) {
                Ok(v) => v,
                Err(_) => continue,
            };
            max_bc_p1 = max_bc_p1.max((p1.p - z).norm());
            max_bc_rn1 = max_bc_rn1.max(rn1.r.norm());
            checked += 1;
        }
    }

    let i = Complex::new(0.0, 1.0);
    let lemma_r = lemma_gf(i, 3, 1).unwrap().r;
    let rational = r13_rational(i).unwrap();
    let expect = -i / 7.0;

    // residuals are a reported finding, not a pass/fail gate
    for n in [3u32, 4] {
        for z in z_samples(DEFAULT_SEED ^ 0xAB, 2) {
            if let Ok(rep) = recursion_residual(Method::Lemma, z, n) {
                println!(
                    "[acceptance] C07 finding: lemma recursion residuals at N={n}, z={z}: p={:.3e}, r={:.3e}",
                    rep.max_p_residual, rep.max_r_residual
                );
            }
        }
    }

    let pass = checked >= 380
        && max_bc_p1 < 1e-12
        && max_bc_rn1 < 1e-12
        && (lemma_r - expect).norm() < 1e-12
        && (lemma_r - rational).norm() < 1e-12;
    report(
        "C07",
        "lemma boundary conditions and r(i)",
        pass,
        &format!(
            "{checked} points, max|p1-z|={max_bc_p1:.2e}, max|r_(N-1)|={max_bc_rn1:.2e}, lemma r(i)={lemma_r}, rational={rational}"
        ),
    );
}

#[test]
fn criterion_08_pole_refutation() {
    let started = Instant::now();
    let frag = analyze_r13_poles(&TolerancePolicy::default());
    let elapsed = started.elapsed();
    let max_mod_gap = frag
        .roots
        .iter()
        .map(|r| (r.modulus - 1.0).abs())
        .fold(0.0, f64::max);
    let pass = frag.roots.len() == 4
        && max_mod_gap < 1e-12
        && frag.quadrature.status == QuadStatus::Diverged
        && (frag.integrand_at_half_pi - 1.0 / 49.0).abs() < 1e-15
        && frag.integrand_at_half_pi > 0.0
        && elapsed < Duration::from_secs(5);
    report(
        "C08",
        "on-contour poles refute the zero integral",
        pass,
        &format!(
            "4 roots, max |modulus-1| = {max_mod_gap:.2e}, quadrature {:?}, integrand(pi/2) = {:.6} > 0, {elapsed:?}",
            frag.quadrature.status, frag.integrand_at_half_pi
        ),
    );
}

#[test]
fn criterion_09_parseval() {
    let tol = TolerancePolicy::default();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut worst = 0.0f64;
    for n in [3u32, 4, 5] {
        let from_l = hitting_amplitude_series(&finite_config(n, 1, QubitState::left()), &tol).unwrap();
        let from_r = hitting_amplitude_series(&finite_config(n, 1, QubitState::right()), &tol).unwrap();
        use std::collections::BTreeMap;
        let mut coeffs: BTreeMap<u64, Complex> = BTreeMap::new();
        for rec in &from_l.records {
            *coeffs.entry(rec.time).or_insert(Complex::new(0.0, 0.0)) += rec.amplitude[0] * s;
        }
        for rec in &from_r.records {
            *coeffs.entry(rec.time).or_insert(Complex::new(0.0, 0.0)) -= rec.amplitude[0] * s;
        }
        let series_sum: f64 = coeffs.values().map(|c| c.norm_sqr()).sum();

        let rep = circle_quadrature(
            |theta| {
                let z = Complex::from_polar(1.0, theta);
                let r = solve_gf(z, n)?[0].r;
                Ok(r * r.conj())
            },
            &tol,
        );
        assert!(rep.converged());
        worst = worst.max((series_sum - rep.value.re / std::f64::consts::TAU).abs());
    }
    let pass = worst < 1e-8;
    report("C09", "Parseval across routes", pass, &format!("max gap = {worst:.3e} over N in {{3,4,5}}"));
}

#[test]
fn criterion_10_antiderivative_audit() {
    let frag = audit_f_antiderivative(720);
    let pass = frag.corrected_max_derivative_gap < 1e-5
        && frag.branch_sign_flips_corrected > 0
        && frag.corrected_period_difference.norm() < 1e-10;
    report(
        "C10",
        "antiderivative audit",
        pass,
        &format!(
            "corrected dF gap = {:.3e} (printed form: {:.3e}), F(2pi)-F(0) = {:?} with {} branch sign flips",
            frag.corrected_max_derivative_gap,
            frag.printed_max_derivative_gap,
            (frag.corrected_period_difference.re, frag.corrected_period_difference.im),
            frag.branch_sign_flips_corrected
        ),
    );
}

#[test]
fn criterion_11_theorem_cross_check() {
    use rand::{Rng, SeedableRng};
    let tol = TolerancePolicy::default();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    let mut worst = 0.0f64;
    for k in [1u32, 2, 3] {
        let coeffs = compute_c123(5, k, Method::Solve, &tol).unwrap();
        for _ in 0..20 {
            let (alpha, beta) = loop {
                let a = Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                let b = Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
                if norm > 1e-2 {
                    break (a / norm, b / norm);
                }
            };
            let qubit = QubitState::new(alpha, beta).unwrap();
            let theorem = absorption_from_c123(&coeffs, &qubit).unwrap();
            let (sim, _) = run_finite_absorption(&finite_config(5, k, qubit), &tol).unwrap();
            worst = worst.max((theorem - sim.p_left).abs());
        }
    }
    let pass = worst < 1e-6;
    report(
        "C11",
        "theorem vs oracle at N=5, k in {1,2,3}",
        pass,
        &format!("max |theorem - simulator| = {worst:.3e} over 60 seeded qubits"),
    );
}

#[test]
fn criterion_12_determinism() {
    let out1 = qwalk().args(["verify", "--format", "json"]).output().unwrap();
    let out2 = qwalk().args(["verify", "--format", "json"]).output().unwrap();
    let pass = out1.status.code() == Some(0)
        && out2.status.code() == Some(0)
        && !out1.stdout.is_empty()
        && out1.stdout == out2.stdout;
    report(
        "C12",
        "byte-identical verify runs",
        pass,
        &format!("{} bytes, identical = {}", out1.stdout.len(), out1.stdout == out2.stdout),
    );
}
