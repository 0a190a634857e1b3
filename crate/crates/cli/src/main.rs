//! `qwalk` — absorption probabilities of the Hadamard walk by three
//! independent routes, with cross-method verification.
//!
//! Exit codes: 0 success, 2 usage error, 3 when a requested computation
//! carries machine-detectable findings (diverged quadrature, unconverged
//! simulation, degenerate evaluation point, inconclusive verdict).

mod emit;

use clap::{Parser, Subcommand, ValueEnum};
use emit::{emit, Format, OutputEnvelope, TableView};
use qwalk_core::{
    absorption_from_c123, analyze_r13_poles, compute_c123, conjecture_sequence,
    conjecture_verdict, corollary_p1n, hadamard_coin, make_qubit, method_values,
    recursion_residual, run_finite_absorption, semi_infinite_extrapolated, AbsorbError,
    AbsorptionOutcome, Boundary, Complex, GfError, Method, QuadStatus, QubitState,
    TolerancePolicy, Verdict, WalkConfig, DEFAULT_SEED,
};
use std::collections::BTreeMap;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Lemma,
    Konno,
    Solve,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Lemma => Method::Lemma,
            MethodArg::Konno => Method::Konno,
            MethodArg::Solve => Method::Solve,
        }
    }
}

#[derive(Debug, Clone)]
struct NRange(Vec<u32>);

fn parse_range(s: &str) -> Result<NRange, String> {
    if let Some((lo, hi)) = s.split_once("..") {
        let lo: u32 = lo.parse().map_err(|_| format!("bad range start `{lo}`"))?;
        let hi: u32 = hi.parse().map_err(|_| format!("bad range end `{hi}`"))?;
        if lo > hi {
            return Err(format!("empty range {lo}..{hi}"));
        }
        Ok(NRange((lo..=hi).collect()))
    } else {
        let n: u32 = s.parse().map_err(|_| format!("bad N `{s}`"))?;
        Ok(NRange(vec![n]))
    }
}

fn parse_state(s: &str) -> Result<QubitState, String> {
    match s {
        "L" => Ok(QubitState::left()),
        "R" => Ok(QubitState::right()),
        other => {
            let parts: Vec<&str> = other.split(',').collect();
            if parts.len() != 4 {
                return Err("state must be L, R, or a_re,a_im,b_re,b_im".into());
            }
            let nums: Result<Vec<f64>, _> = parts.iter().map(|p| p.trim().parse::<f64>()).collect();
            let nums = nums.map_err(|e| format!("bad state component: {e}"))?;
            make_qubit(Complex::new(nums[0], nums[1]), Complex::new(nums[2], nums[3]))
                .map_err(|e| e.to_string())
        }
    }
}

fn parse_complex(s: &str) -> Result<Complex, String> {
    let (re, im) = s
        .split_once(',')
        .ok_or_else(|| "z must be re,im".to_string())?;
    let re: f64 = re.trim().parse().map_err(|e| format!("bad re: {e}"))?;
    let im: f64 = im.trim().parse().map_err(|e| format!("bad im: {e}"))?;
    Ok(Complex::new(re, im))
}

#[derive(Parser)]
#[command(name = "qwalk", version, about = "Hadamard-walk absorption laboratory")]
struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Table)]
    format: FormatArg,
    /// Quadrature convergence tolerance
    #[arg(long, global = true)]
    quad_tol: Option<f64>,
    /// Grid doublings allowed from the 64-node base grid
    #[arg(long, global = true)]
    grid_doublings: Option<u32>,
    /// Seed for every sampled suite (default is the published constant)
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Finite-walk absorption by exact time-domain simulation
    Simulate {
        /// Right barrier position (left barrier is at 0)
        #[arg(long)]
        n: u32,
        /// Start site, 1 <= k <= N-1
        #[arg(long)]
        k: u32,
        /// Initial coin state: L, R, or a_re,a_im,b_re,b_im
        #[arg(long, value_parser = parse_state)]
        state: QubitState,
        #[arg(long)]
        max_steps: Option<u64>,
        #[arg(long)]
        survival_tol: Option<f64>,
    },
    /// Semi-infinite walk absorption up to --tmax steps
    Semi {
        #[arg(long)]
        k: u32,
        #[arg(long, value_parser = parse_state)]
        state: QubitState,
        #[arg(long)]
        tmax: u64,
        /// Also report the Richardson refinement 2 p(T) - p(T/2)
        #[arg(long)]
        extrapolate: bool,
    },
    /// Generating-function values and recursion residuals at one point
    Gf {
        #[arg(long, value_enum)]
        method: MethodArg,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u32,
        /// Evaluation point as re,im
        #[arg(long, value_parser = parse_complex)]
        z: Complex,
    },
    /// Absorption probability via the integral coefficients c1, c2, c3
    Absorb {
        #[arg(long, value_enum)]
        method: MethodArg,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u32,
        #[arg(long, value_parser = parse_state)]
        state: QubitState,
    },
    /// The k = 1 absorption value from the squared-modulus integral
    Corollary {
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum)]
        method: MethodArg,
    },
    /// Exact rational table of the conjectured recursion
    Conjecture {
        #[arg(long)]
        max_n: u32,
    },
    /// Pole analysis of the published rational r_1^3
    Poles,
    /// Full cross-method verification report (deterministic JSON)
    Verify {
        /// Inclusive range of lattice sizes, e.g. 2..10
        #[arg(long, value_parser = parse_range, default_value = "2..10")]
        n_range: NRange,
    },
}

struct CommandOutput {
    params: BTreeMap<String, serde_json::Value>,
    results: serde_json::Value,
    view: TableView,
    findings: bool,
    /// verify omits the wall time so its bytes are run-independent
    report_wall_time: bool,
}

enum CliFailure {
    Usage(String),
    /// A typed numerical finding at the requested point; payload still emitted.
    Finding(String),
}

fn main() {
    let cli = Cli::parse();
    std::process::exit(run(cli));
}

fn run(cli: Cli) -> i32 {
    let mut tol = TolerancePolicy::default();
    if let Some(q) = cli.quad_tol {
        tol.quad_tol = q;
    }
    if let Some(d) = cli.grid_doublings {
        tol.max_grid_doublings = d;
    }
    if let Err(e) = tol.validate() {
        eprintln!("error: {e}");
        return 2;
    }

    let format = match cli.format {
        FormatArg::Json => Format::Json,
        FormatArg::Csv => Format::Csv,
        FormatArg::Table => Format::Table,
    };
    let command_name = command_name(&cli.command);
    let started = Instant::now();
    let outcome = dispatch(&cli.command, &mut tol, cli.seed);
    let wall_time_ms = started.elapsed().as_millis() as u64;

    let output = match outcome {
        Ok(output) => output,
        Err(CliFailure::Usage(msg)) => {
            eprintln!("error: {msg}");
            return 2;
        }
        Err(CliFailure::Finding(msg)) => CommandOutput {
            params: BTreeMap::new(),
            results: serde_json::json!({ "error": msg }),
            view: TableView::KeyValue(vec![("error".into(), msg.clone())]),
            findings: true,
            report_wall_time: true,
        },
    };

    let envelope = OutputEnvelope {
        command: command_name.to_string(),
        params: output.params,
        results: output.results,
        tolerances: tol,
        version: env!("CARGO_PKG_VERSION").to_string(),
        wall_time_ms: output.report_wall_time.then_some(wall_time_ms),
    };
    match emit(&envelope, format, &output.view) {
        Ok(text) => {
            if text.ends_with('\n') {
                print!("{text}");
            } else {
                println!("{text}");
            }
            if output.findings {
                3
            } else {
                0
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn command_name(command: &Command) -> &'static str {
    match command {
        Command::Simulate { .. } => "simulate",
        Command::Semi { .. } => "semi",
        Command::Gf { .. } => "gf",
        Command::Absorb { .. } => "absorb",
        Command::Corollary { .. } => "corollary",
        Command::Conjecture { .. } => "conjecture",
        Command::Poles => "poles",
        Command::Verify { .. } => "verify",
    }
}

fn dispatch(command: &Command, tol: &mut TolerancePolicy, seed: u64) -> Result<CommandOutput, CliFailure> {
    match command {
        Command::Simulate { n, k, state, max_steps, survival_tol } => {
            if let Some(m) = max_steps {
                tol.max_steps = *m;
            }
            if let Some(s) = survival_tol {
                tol.survival_tol = *s;
            }
            tol.validate().map_err(|e| CliFailure::Usage(e.to_string()))?;
            cmd_simulate(*n, *k, *state, tol)
        }
        Command::Semi { k, state, tmax, extrapolate } => cmd_semi(*k, *state, *tmax, *extrapolate, tol),
        Command::Gf { method, n, k, z } => cmd_gf((*method).into(), *n, *k, *z),
        Command::Absorb { method, n, k, state } => cmd_absorb((*method).into(), *n, *k, *state, tol),
        Command::Corollary { n, method } => cmd_corollary(*n, (*method).into(), tol),
        Command::Conjecture { max_n } => cmd_conjecture(*max_n),
        Command::Poles => cmd_poles(tol),
        Command::Verify { n_range } => cmd_verify(&n_range.0, seed, tol),
    }
}

fn val<T: serde::Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("finite payload")
}

fn state_value(q: &QubitState) -> serde_json::Value {
    serde_json::json!({ "alpha": val(&q.alpha()), "beta": val(&q.beta()) })
}

fn human(x: f64) -> String {
    format!("{x:.12}")
}

fn outcome_view(outcome: &AbsorptionOutcome, extra: &[(String, String)]) -> TableView {
    let mut pairs = vec![
        ("p_left".to_string(), human(outcome.p_left)),
        ("p_right".to_string(), human(outcome.p_right)),
        ("survival".to_string(), human(outcome.survival)),
        ("steps_used".to_string(), outcome.steps_used.to_string()),
        ("converged".to_string(), outcome.converged.to_string()),
    ];
    pairs.extend(extra.iter().cloned());
    TableView::KeyValue(pairs)
}

fn cmd_simulate(n: u32, k: u32, state: QubitState, tol: &TolerancePolicy) -> Result<CommandOutput, CliFailure> {
    let config = WalkConfig::new(Boundary::Finite(n), k, state, hadamard_coin())
        .map_err(|e| CliFailure::Usage(e.to_string()))?;
    let (outcome, _hits) =
        run_finite_absorption(&config, tol).map_err(|e| CliFailure::Usage(e.to_string()))?;
    let mut params = BTreeMap::new();
    params.insert("n".into(), val(&n));
    params.insert("k".into(), val(&k));
    params.insert("state".into(), state_value(&state));
    Ok(CommandOutput {
        params,
        results: val(&outcome),
        view: outcome_view(&outcome, &[]),
        findings: !outcome.converged,
        report_wall_time: true,
    })
}

fn cmd_semi(
    k: u32,
    state: QubitState,
    tmax: u64,
    extrapolate: bool,
    tol: &TolerancePolicy,
) -> Result<CommandOutput, CliFailure> {
    let config = WalkConfig::new(Boundary::SemiInfinite, k, state, hadamard_coin())
        .map_err(|e| CliFailure::Usage(e.to_string()))?;
    let mut params = BTreeMap::new();
    params.insert("k".into(), val(&k));
    params.insert("state".into(), state_value(&state));
    params.insert("tmax".into(), val(&tmax));
    params.insert("extrapolate".into(), val(&extrapolate));

    if extrapolate {
        let (outcome, refined) =
            semi_infinite_extrapolated(&config, tmax, tol).map_err(|e| CliFailure::Usage(e.to_string()))?;
        let mut results = val(&outcome);
        results["extrapolated"] = val(&refined);
        let view = outcome_view(&outcome, &[("extrapolated".into(), human(refined))]);
        Ok(CommandOutput { params, results, view, findings: !outcome.converged, report_wall_time: true })
    } else {
        let outcome = qwalk_core::run_semi_infinite_absorption(&config, tmax, tol)
            .map_err(|e| CliFailure::Usage(e.to_string()))?;
        Ok(CommandOutput {
            params,
            results: val(&outcome),
            view: outcome_view(&outcome, &[]),
            findings: !outcome.converged,
            report_wall_time: true,
        })
    }
}

fn gf_failure(e: GfError) -> CliFailure {
    match e {
        GfError::OutOfRange(msg) => CliFailure::Usage(msg.to_string()),
        other => CliFailure::Finding(other.to_string()),
    }
}

fn cmd_gf(method: Method, n: u32, k: u32, z: Complex) -> Result<CommandOutput, CliFailure> {
    let values = method_values(method, z, n).map_err(gf_failure)?;
    let value = values
        .get((k.max(1) - 1) as usize)
        .copied()
        .filter(|v| v.k == k)
        .ok_or_else(|| CliFailure::Usage("need 1 <= k <= N-1".into()))?;
    let residuals = recursion_residual(method, z, n).map_err(gf_failure)?;

    let mut params = BTreeMap::new();
    params.insert("method".into(), val(&method));
    params.insert("n".into(), val(&n));
    params.insert("k".into(), val(&k));
    params.insert("z".into(), val(&z));
    let results = serde_json::json!({ "value": val(&value), "residuals": val(&residuals) });
    let view = TableView::KeyValue(vec![
        ("p".into(), format!("{:+.12} {:+.12}i", value.p.re, value.p.im)),
        ("r".into(), format!("{:+.12} {:+.12}i", value.r.re, value.r.im)),
        ("max_p_residual".into(), format!("{:.3e}", residuals.max_p_residual)),
        ("max_r_residual".into(), format!("{:.3e}", residuals.max_r_residual)),
        ("bc_p1_residual".into(), format!("{:.3e}", residuals.bc_p1_residual)),
        ("bc_rn1_residual".into(), format!("{:.3e}", residuals.bc_rn1_residual)),
    ]);
    Ok(CommandOutput { params, results, view, findings: false, report_wall_time: true })
}

fn absorb_failure(e: AbsorbError) -> CliFailure {
    match e {
        AbsorbError::OutOfRange(msg) => CliFailure::Usage(msg.to_string()),
        AbsorbError::Gf(inner) => gf_failure(inner),
        AbsorbError::DivergedInput => CliFailure::Finding(e.to_string()),
    }
}

fn cmd_absorb(
    method: Method,
    n: u32,
    k: u32,
    state: QubitState,
    tol: &TolerancePolicy,
) -> Result<CommandOutput, CliFailure> {
    let coeffs = compute_c123(n, k, method, tol).map_err(absorb_failure)?;
    let probability = match absorption_from_c123(&coeffs, &state) {
        Ok(p) => Some(p),
        Err(AbsorbError::DivergedInput) => None,
        Err(e) => return Err(absorb_failure(e)),
    };

    let mut params = BTreeMap::new();
    params.insert("method".into(), val(&method));
    params.insert("n".into(), val(&n));
    params.insert("k".into(), val(&k));
    params.insert("state".into(), state_value(&state));
    let results = serde_json::json!({ "coefficients": val(&coeffs), "probability": val(&probability) });
    let statuses: Vec<String> = coeffs.reports.iter().map(|r| format!("{:?}", r.status)).collect();
    let view = TableView::KeyValue(vec![
        ("c1".into(), human(coeffs.c1)),
        ("c2".into(), human(coeffs.c2)),
        ("c3".into(), format!("{:+.12} {:+.12}i", coeffs.c3.re, coeffs.c3.im)),
        ("statuses".into(), statuses.join(", ")),
        (
            "probability".into(),
            probability.map_or("none (diverged)".into(), human),
        ),
    ]);
    Ok(CommandOutput {
        params,
        results,
        view,
        findings: !coeffs.all_converged(),
        report_wall_time: true,
    })
}

fn cmd_corollary(n: u32, method: Method, tol: &TolerancePolicy) -> Result<CommandOutput, CliFailure> {
    let result = corollary_p1n(n, method, tol).map_err(absorb_failure)?;
    let mut params = BTreeMap::new();
    params.insert("n".into(), val(&n));
    params.insert("method".into(), val(&method));
    let view = TableView::KeyValue(vec![
        (
            "value".into(),
            result.value.map_or("none (not converged)".into(), human),
        ),
        ("status".into(), format!("{:?}", result.report.status)),
        ("grid_size".into(), result.report.grid_size.to_string()),
        ("error_estimate".into(), format!("{:.3e}", result.report.error_estimate)),
    ]);
    Ok(CommandOutput {
        params,
        results: val(&result),
        view,
        findings: !result.report.converged(),
        report_wall_time: true,
    })
}

fn cmd_conjecture(max_n: u32) -> Result<CommandOutput, CliFailure> {
    if max_n < 1 {
        return Err(CliFailure::Usage("need --max-n >= 1".into()));
    }
    let seq = conjecture_sequence(max_n);
    let mut rows = Vec::with_capacity(seq.len());
    let mut results = Vec::with_capacity(seq.len());
    for (i, p) in seq.iter().enumerate() {
        let n = i as u32 + 1;
        let exact = p.to_string();
        let decimal = p.to_f64();
        results.push(serde_json::json!({ "n": n, "value": exact, "decimal": decimal }));
        rows.push(vec![n.to_string(), exact, emit::csv_float(decimal)]);
    }
    let mut params = BTreeMap::new();
    params.insert("max_n".into(), val(&max_n));
    Ok(CommandOutput {
        params,
        results: serde_json::Value::Array(results),
        view: TableView::Rows {
            headers: vec!["n".into(), "value".into(), "decimal".into()],
            rows,
        },
        findings: false,
        report_wall_time: true,
    })
}

fn cmd_poles(tol: &TolerancePolicy) -> Result<CommandOutput, CliFailure> {
    let fragment = analyze_r13_poles(tol);
    let root_rows: Vec<Vec<String>> = fragment
        .roots
        .iter()
        .map(|r| {
            vec![
                format!("{:+.12}", r.root.re),
                format!("{:+.12}", r.root.im),
                format!("{:.12}", r.modulus),
            ]
        })
        .collect();
    let view = TableView::Sections(vec![
        (
            "denominator roots".into(),
            TableView::Rows { headers: vec!["re".into(), "im".into(), "modulus".into()], rows: root_rows },
        ),
        (
            "contour".into(),
            TableView::KeyValue(vec![
                (
                    "pole_angles".into(),
                    fragment.pole_angles.iter().map(|a| format!("{a:.6}")).collect::<Vec<_>>().join(", "),
                ),
                ("quadrature_status".into(), format!("{:?}", fragment.quadrature.status)),
                ("integrand_at_pi_over_2".into(), human(fragment.integrand_at_half_pi)),
                ("note".into(), fragment.note.clone()),
            ]),
        ),
    ]);
    let findings = fragment.quadrature.status != QuadStatus::Converged;
    Ok(CommandOutput {
        params: BTreeMap::new(),
        results: val(&fragment),
        view,
        findings,
        report_wall_time: true,
    })
}

fn cmd_verify(n_range: &[u32], seed: u64, tol: &TolerancePolicy) -> Result<CommandOutput, CliFailure> {
    let report = conjecture_verdict(n_range, seed, tol).map_err(|e| CliFailure::Usage(e.to_string()))?;

    let table_rows: Vec<Vec<String>> = report
        .conjecture_table
        .iter()
        .map(|row| {
            vec![
                row.n.to_string(),
                row.recursion_exact.clone(),
                human(row.simulator_value),
                row.corollary_solve_value.map_or("-".into(), human),
                format!("{:.3e}", row.sim_vs_recursion),
                row.tier_delta.map_or("-".into(), |d| format!("{d:.3e}")),
            ]
        })
        .collect();
    let support = &report.verdict_support;
    let view = TableView::Sections(vec![
        (
            "verdict".into(),
            TableView::KeyValue(vec![
                ("verdict".into(), format!("{:?}", report.verdict)),
                ("tolerance".into(), format!("{:.1e}", support.tolerance)),
                ("max |sim - recursion|".into(), format!("{:.3e}", support.max_sim_vs_recursion)),
                ("max tier delta".into(), format!("{:.3e}", support.max_tier_delta)),
                (
                    "|sim(3) - 1/2|".into(),
                    support.sim_n3_vs_published_half.map_or("-".into(), |d| format!("{d:.3e}")),
                ),
                ("claims".into(), support.published_claims.join(" | ")),
            ]),
        ),
        (
            "conjecture table".into(),
            TableView::Rows {
                headers: vec![
                    "n".into(),
                    "recursion".into(),
                    "simulator".into(),
                    "corollary(solve)".into(),
                    "|sim-rec|".into(),
                    "tier delta".into(),
                ],
                rows: table_rows,
            },
        ),
        (
            "identities and defects".into(),
            TableView::KeyValue(vec![
                (
                    "lambda identities".into(),
                    format!(
                        "pass = {} (product {:.2e}, sum {:.2e})",
                        report.lambda_identity.pass,
                        report.lambda_identity.max_product_residual,
                        report.lambda_identity.max_sum_residual
                    ),
                ),
                (
                    "closed-form r_1^3".into(),
                    format!(
                        "max |C_z| = {:.2e}, max |r| = {:.2e}, |solve r(i)| = {:.12}",
                        report.konno_flaw.max_abs_c_z_at_n3,
                        report.konno_flaw.max_abs_konno_r13,
                        report.konno_flaw.abs_solve_r13_at_i
                    ),
                ),
                (
                    "pole quadrature".into(),
                    format!("{:?}", report.r13_poles.quadrature.status),
                ),
                (
                    "antiderivative audit".into(),
                    format!(
                        "printed gap {:.2e}, corrected gap {:.2e}, branch flips {}",
                        report.f_audit.printed_max_derivative_gap,
                        report.f_audit.corrected_max_derivative_gap,
                        report.f_audit.branch_sign_flips_corrected
                    ),
                ),
            ]),
        ),
    ]);

    let mut params = BTreeMap::new();
    params.insert("n_range".into(), val(&n_range));
    params.insert("seed".into(), val(&seed));
    let findings = report.verdict == Verdict::Inconclusive;
    Ok(CommandOutput {
        params,
        results: val(&report),
        view,
        findings,
        report_wall_time: false,
    })
}
