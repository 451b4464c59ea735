mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use jumplmi::certificates::{
    finito_certificate, saga_certificate, sdca_certificate, statement_certificate, verify_certificate,
    verify_certificate_full, RateCertificate, Statement,
};
use jumplmi::search::{
    bisect_rate, published_sag_point, sag_probe, PForm, SearchConfig, SearchSpec, SweepRow,
};
use jumplmi::simulation::{
    check_onestep_contraction, empirical_rate, problem_for, run_method, sample_states, RunOptions, TableInit,
    CONTRACTION_TOL,
};
use jumplmi::{IndividualAssumption, Method};

use output::{write_csv, write_json, Failure, RunManifest};

const SAG_UNSUPPORTED: &str = "no LMI certificate for SAG via this condition; see sag-probe";
const FULL_CHECK_MAX_N: usize = 300;

#[derive(Parser)]
#[command(name = "jumplmi", version, about = "Rate certificates for SAGA, SAG, Finito and SDCA")]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, env = "JUMPLMI_SEED", default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build and verify a closed-form certificate.
    Certify(CertifyArgs),
    /// Smallest rate the numerical search can certify.
    Bisect(BisectArgs),
    /// Monte-Carlo trajectories against a certificate's envelope.
    Simulate(SimulateArgs),
    /// Re-check a certificate file.
    Verify(VerifyArgs),
    /// Bisection over a grid read from a JSON file.
    Sweep(SweepArgs),
    /// Feasibility of the SAG condition along a grid of rates.
    SagProbe(SagProbeArgs),
}

#[derive(Args, Clone, Serialize)]
struct ProblemArgs {
    #[arg(long)]
    method: Method,
    #[arg(long, default_value = "sc")]
    assumption: IndividualAssumption,
    #[arg(long)]
    m: f64,
    #[arg(long = "L", default_value_t = 1.0)]
    #[serde(rename = "L")]
    l: f64,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    alpha: Option<f64>,
}

#[derive(Args, Serialize)]
struct CertifyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    problem: ProblemArgs,
    /// SAGA table weight; defaults follow the statement.
    #[arg(long)]
    b: Option<f64>,
    /// Use one named closed-form point instead of the best one.
    #[arg(long)]
    statement: Option<Statement>,
    #[arg(long, default_value_t = 1e-6)]
    eps: f64,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum FormArg {
    Diagonal,
    Invariant,
    Finito,
    Sdca,
}

impl From<FormArg> for PForm {
    fn from(f: FormArg) -> Self {
        match f {
            FormArg::Diagonal => PForm::Diagonal,
            FormArg::Invariant => PForm::Invariant,
            FormArg::Finito => PForm::Finito,
            FormArg::Sdca => PForm::Sdca,
        }
    }
}

#[derive(Args, Clone, Copy, Serialize)]
struct SearchArgs {
    #[arg(long, default_value_t = 16)]
    restarts: usize,
    #[arg(long, default_value_t = 2000)]
    max_evals: usize,
    #[arg(long, default_value_t = 1e-6)]
    rho2_tol: f64,
    #[arg(long, default_value_t = 1e-9)]
    feas_tol: f64,
}

impl SearchArgs {
    fn config(&self, seed: u64) -> Result<SearchConfig, Failure> {
        let cfg = SearchConfig {
            rho2_tol: self.rho2_tol,
            feas_tol: self.feas_tol,
            restarts: self.restarts,
            max_evals: self.max_evals,
            seed,
        };
        check_search(&cfg)?;
        Ok(cfg)
    }
}

fn check_search(cfg: &SearchConfig) -> Result<(), Failure> {
    if cfg.rho2_tol > 0.0 && cfg.feas_tol > 0.0 && cfg.restarts > 0 && cfg.max_evals > 0 {
        Ok(())
    } else {
        Err(Failure::Input("search settings must all be positive".into()))
    }
}

#[derive(Args, Serialize)]
struct BisectArgs {
    #[command(flatten)]
    #[serde(flatten)]
    problem: ProblemArgs,
    /// Lyapunov family; defaults to the method's structured form.
    #[arg(long, value_enum)]
    form: Option<FormArg>,
    #[command(flatten)]
    #[serde(flatten)]
    search: SearchArgs,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct SimulateArgs {
    /// JSON document with the run settings; replaces the flags below.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Certificate file to simulate against.
    #[arg(long)]
    certificate: Option<PathBuf>,
    #[arg(long)]
    method: Option<Method>,
    #[arg(long, default_value = "sc")]
    assumption: IndividualAssumption,
    #[arg(long)]
    m: Option<f64>,
    #[arg(long = "L", default_value_t = 1.0)]
    #[serde(rename = "L")]
    l: f64,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    /// Ambient dimension.
    #[arg(long, default_value_t = 5)]
    p: usize,
    #[arg(long, default_value_t = 300)]
    iters: usize,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, value_enum, default_value = "zero")]
    init: InitArg,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum InitArg {
    Zero,
    Gradients,
}

impl From<InitArg> for TableInit {
    fn from(i: InitArg) -> Self {
        match i {
            InitArg::Zero => TableInit::Zero,
            InitArg::Gradients => TableInit::Gradients,
        }
    }
}

/// Settings of `simulate` when given as a JSON document.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimulateConfig {
    method: Method,
    #[serde(default = "default_assumption")]
    assumption: IndividualAssumption,
    m: f64,
    #[serde(rename = "L", default = "one")]
    l: f64,
    n: usize,
    #[serde(default)]
    alpha: Option<f64>,
    #[serde(default)]
    b: Option<f64>,
    #[serde(default = "default_p")]
    p: usize,
    #[serde(default = "default_iters")]
    iters: usize,
    #[serde(default = "default_trials")]
    trials: usize,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    init: TableInit,
}

fn default_assumption() -> IndividualAssumption {
    IndividualAssumption::StronglyConvex
}
fn one() -> f64 {
    1.0
}
fn default_p() -> usize {
    5
}
fn default_iters() -> usize {
    300
}
fn default_trials() -> usize {
    200
}

#[derive(Args, Serialize)]
struct VerifyArgs {
    #[arg(long)]
    certificate: PathBuf,
    /// Ambient dimension of the instance used for the contraction check.
    #[arg(long, default_value_t = 3)]
    p: usize,
    /// Number of sampled states for the contraction check.
    #[arg(long, default_value_t = 500)]
    states: usize,
    /// Directory for verification.json and manifest.json; nothing is written if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct SweepArgs {
    #[arg(long)]
    grid: PathBuf,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

/// Grid file of `sweep`: every combination of `m_over_L` and `n`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepGrid {
    method: Method,
    #[serde(default = "default_assumption")]
    assumption: IndividualAssumption,
    #[serde(rename = "L", default = "one")]
    l: f64,
    #[serde(rename = "m_over_L")]
    m_over_l: Vec<f64>,
    n: Vec<usize>,
    /// Fixed stepsize; otherwise a per-method default.
    #[serde(default)]
    alpha: Option<f64>,
    #[serde(default)]
    search: SearchOverrides,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SearchOverrides {
    rho2_tol: Option<f64>,
    feas_tol: Option<f64>,
    restarts: Option<usize>,
    max_evals: Option<usize>,
}

#[derive(Args, Serialize)]
struct SagProbeArgs {
    #[arg(long, default_value = "sc")]
    assumption: IndividualAssumption,
    #[arg(long, default_value_t = 0.1)]
    m: f64,
    #[arg(long = "L", default_value_t = 1.0)]
    #[serde(rename = "L")]
    l: f64,
    #[arg(long, default_value_t = 10)]
    n: usize,
    /// Defaults to the published SAG stepsize 1/(16L).
    #[arg(long)]
    alpha: Option<f64>,
    /// Rates to probe; defaults to the published rate, 0.999 and 1.
    #[arg(long, value_delimiter = ',')]
    rho2: Vec<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    search: SearchArgs,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

/// Stepsize used when none is given.
fn default_alpha(method: Method, m: f64, l: f64, n: usize) -> f64 {
    match method {
        Method::Saga => 1.0 / (3.0 * l),
        Method::Sag => 1.0 / (16.0 * l),
        Method::Finito => 1.0 / (5.0 * l),
        Method::Sdca => 1.0 / (l + m * n as f64),
    }
}

fn build_certificate(
    method: Method,
    assumption: IndividualAssumption,
    m: f64,
    l: f64,
    n: usize,
    alpha: Option<f64>,
    b: Option<f64>,
    statement: Option<Statement>,
) -> Result<RateCertificate<f64>, Failure> {
    if let Some(st) = statement {
        if st.method() != method {
            return Err(Failure::Input(format!("statement {st} belongs to {}, not {method}", st.method())));
        }
        return Ok(statement_certificate(st, m, l, n, alpha, b)?);
    }
    let need_alpha = || alpha.ok_or_else(|| Failure::Input(format!("--alpha is required for {method}")));
    let c = match method {
        Method::Sag => return Err(Failure::Unsupported(SAG_UNSUPPORTED.into())),
        Method::Saga => saga_certificate(assumption, m, l, n, need_alpha()?, b)?,
        Method::Sdca => sdca_certificate(assumption, m, l, n, need_alpha()?)?,
        Method::Finito => {
            let c = finito_certificate(assumption, m, l, n)?;
            if let Some(a) = alpha {
                if (a - c.alpha).abs() > 1e-12 * c.alpha {
                    return Err(Failure::Input(format!(
                        "the Finito point fixes alpha = {} (got {a})",
                        c.alpha
                    )));
                }
            }
            c
        }
    };
    Ok(c)
}

fn print_certificate(c: &RateCertificate<f64>, eps: f64) {
    println!("{:<22}{}", "method", c.method);
    println!("{:<22}{} (sector {})", "assumption", c.assumption, c.sector);
    println!("{:<22}m = {}, L = {}, n = {}", "problem", c.m, c.l, c.n);
    println!("{:<22}{}", "alpha", c.alpha);
    if let Some(b) = c.b {
        println!("{:<22}{}", "b", b);
    }
    println!("{:<22}{}", "rho2", c.rho2);
    println!("{:<22}{:e}", "1 - rho2", c.gap);
    println!("{:<22}{}", "point", c.provenance);
    let p: Vec<String> = c.p.named_values().iter().map(|(k, v)| format!("{k} = {v:.6e}")).collect();
    println!("{:<22}{}", "P", p.join(", "));
    println!("{:<22}lambda1 = {:.6e}, lambda2 = {:.6e}", "multipliers", c.lambdas.lambda1, c.lambdas.lambda2);
    match c.complexity(eps) {
        Some(k) => println!("{:<22}{k}", format!("iterations to {eps:e}")),
        None => println!("{:<22}-", format!("iterations to {eps:e}")),
    }
    println!("{:<22}{}", "verified", if c.verified { "yes" } else { "no" });
}

fn cmd_certify(args: &CertifyArgs, seed: u64) -> Result<(), Failure> {
    let p = &args.problem;
    let mut c = build_certificate(p.method, p.assumption, p.m, p.l, p.n, p.alpha, args.b, args.statement)?;
    c.manifest = Some(output::MANIFEST.into());
    print_certificate(&c, args.eps);
    let cert_path = output::in_dir(&args.out, "certificate.json")?;
    write_json(&cert_path, &c)?;
    RunManifest::new("certify", args, seed, vec![cert_path]).write(&args.out)?;
    if c.verified {
        Ok(())
    } else {
        Err(Failure::Verification("certificate did not verify".into()))
    }
}

fn cmd_bisect(args: &BisectArgs, seed: u64) -> Result<(), Failure> {
    let p = &args.problem;
    let alpha = p.alpha.unwrap_or_else(|| default_alpha(p.method, p.m, p.l, p.n));
    let mut spec = SearchSpec::new(p.method, p.assumption, p.m, p.l, p.n, alpha);
    if let Some(f) = args.form {
        spec = spec.with_form(f.into());
    }
    let cfg = args.search.config(seed)?;
    let res = bisect_rate(&spec, &cfg)?;
    println!("{:<22}{} {} m = {}, L = {}, n = {}, alpha = {}", "problem", p.method, p.assumption, p.m, p.l, p.n, alpha);
    println!("{:<22}{:?}", "status", res.status);
    match res.rho2_best {
        Some(r) => println!("{:<22}{r}", "rho2_best"),
        None => println!("{:<22}none (no witness, one-sided)", "rho2_best"),
    }
    if let Some(a) = res.analytic_rho2 {
        println!("{:<22}{a}", "closed-form rho2");
    }
    println!("{:<22}{}", "evaluations", res.evals);
    let mut doc = serde_json::to_value(&res).map_err(|e| Failure::Io(e.into()))?;
    doc["manifest"] = json!(output::MANIFEST);
    let path = output::in_dir(&args.out, "result.json")?;
    write_json(&path, &doc)?;
    RunManifest::new("bisect", args, seed, vec![path]).write(&args.out)?;
    if let Some(w) = &res.witness {
        if !w.verify(cfg.feas_tol)? {
            return Err(Failure::Verification("search witness failed to re-verify".into()));
        }
    }
    Ok(())
}

fn simulate_config(args: &SimulateArgs, seed: u64) -> Result<SimulateConfig, Failure> {
    if let Some(path) = &args.config {
        let text = output::read_input(path)?;
        let mut cfg: SimulateConfig =
            serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        cfg.seed.get_or_insert(seed);
        return Ok(cfg);
    }
    let missing = |what: &str| Failure::Input(format!("--{what} is required without --config or --certificate"));
    Ok(SimulateConfig {
        method: args.method.ok_or_else(|| missing("method"))?,
        assumption: args.assumption,
        m: args.m.ok_or_else(|| missing("m"))?,
        l: args.l,
        n: args.n.ok_or_else(|| missing("n"))?,
        alpha: args.alpha,
        b: args.b,
        p: args.p,
        iters: args.iters,
        trials: args.trials,
        seed: Some(seed),
        init: args.init.into(),
    })
}

fn cmd_simulate(args: &SimulateArgs, seed: u64) -> Result<(), Failure> {
    let (c, p, opts) = match &args.certificate {
        Some(path) => {
            let c = output::read_certificate(path)?;
            (c, args.p, RunOptions { iters: args.iters, trials: args.trials, seed, init: args.init.into() })
        }
        None => {
            let cfg = simulate_config(args, seed)?;
            let c = build_certificate(cfg.method, cfg.assumption, cfg.m, cfg.l, cfg.n, cfg.alpha, cfg.b, None)?;
            let opts =
                RunOptions { iters: cfg.iters, trials: cfg.trials, seed: cfg.seed.unwrap_or(seed), init: cfg.init };
            (c, cfg.p, opts)
        }
    };
    let problem = problem_for(&c, p, opts.seed)?;
    let trace = run_method(c.method, &problem, c.alpha, &c.p, &opts)?;
    let fit = empirical_rate(&trace, c.rho2)?;
    println!("{:<22}{} {} m = {}, L = {}, n = {}, p = {p}", "problem", c.method, c.assumption, c.m, c.l, c.n);
    println!("{:<22}{}", "alpha", c.alpha);
    println!("{:<22}{}", "certified rho2", c.rho2);
    println!("{:<22}{}", "fitted rho2", fit.fitted_rho2);
    println!("{:<22}{} x {}", "trials x iterations", opts.trials, opts.iters);
    println!("{:<22}{}", "gradient calls", trace.grad_calls);
    println!("{:<22}{}", "envelope", if fit.envelope_ok { "ok" } else { "violated" });
    println!("{:<22}{}", "cond(P) envelope", if fit.cond_envelope_ok { "ok" } else { "violated" });
    let path = output::in_dir(&args.out, "result.csv")?;
    write_csv(&path, &fit.rows(&trace))?;
    let params = json!({
        "method": c.method, "assumption": c.assumption, "m": c.m, "L": c.l, "n": c.n, "alpha": c.alpha,
        "rho2": c.rho2, "p": p, "iters": opts.iters, "trials": opts.trials, "init": opts.init,
        "certificate": args.certificate,
    });
    RunManifest::new("simulate", &params, opts.seed, vec![path]).write(&args.out)?;
    match fit.first_violation {
        None => Ok(()),
        Some(k) => Err(Failure::Verification(format!("mean Lyapunov value exceeds the envelope at k = {k}"))),
    }
}

#[derive(Serialize)]
struct VerifyReport {
    reduced_feasible: bool,
    reduced_max_violation: f64,
    issues: Vec<String>,
    full_checked: bool,
    full_feasible: Option<bool>,
    full_scaled_max_eig: Option<f64>,
    contraction_states: usize,
    contraction_max_relative: f64,
    contraction_ok: bool,
    verified: bool,
}

fn cmd_verify(args: &VerifyArgs, seed: u64) -> Result<(), Failure> {
    let c = output::read_certificate(&args.certificate)?;
    let reduced = verify_certificate(&c);
    let full = if c.n <= FULL_CHECK_MAX_N { Some(verify_certificate_full(&c)?) } else { None };
    let problem = problem_for(&c, args.p, seed)?;
    let states = sample_states(c.method, &problem, c.alpha, args.states, seed.wrapping_add(1))?;
    let contraction = check_onestep_contraction(&c, &problem, &states)?;
    let report = VerifyReport {
        reduced_feasible: reduced.feasible,
        reduced_max_violation: reduced.max_violation,
        issues: reduced.issues.clone(),
        full_checked: full.is_some(),
        full_feasible: full.as_ref().map(|f| f.feasible),
        full_scaled_max_eig: full.as_ref().map(|f| f.nsd_scaled_max_eig),
        contraction_states: contraction.states,
        contraction_max_relative: contraction.max_relative,
        contraction_ok: contraction.passes(CONTRACTION_TOL),
        verified: reduced.feasible && full.as_ref().is_none_or(|f| f.feasible) && contraction.passes(CONTRACTION_TOL),
    };
    let yes_no = |b: bool| if b { "ok" } else { "FAILED" };
    println!("{:<22}{} {} m = {}, L = {}, n = {}, rho2 = {}", "certificate", c.method, c.assumption, c.m, c.l, c.n, c.rho2);
    println!("{:<22}{} (max scaled eigenvalue {:e})", "reduced condition", yes_no(report.reduced_feasible), report.reduced_max_violation);
    for issue in &report.issues {
        println!("{:<22}{issue}", "");
    }
    match &full {
        Some(f) => println!("{:<22}{} (max scaled eigenvalue {:e})", "full condition", yes_no(f.feasible), f.nsd_scaled_max_eig),
        None => println!("{:<22}skipped (n > {FULL_CHECK_MAX_N})", "full condition"),
    }
    println!(
        "{:<22}{} ({} states, max relative gap {:e})",
        "one-step contraction",
        yes_no(report.contraction_ok),
        report.contraction_states,
        report.contraction_max_relative
    );
    if let Some(dir) = &args.out {
        let path = output::in_dir(dir, "verification.json")?;
        let mut doc = serde_json::to_value(&report).map_err(|e| Failure::Io(e.into()))?;
        doc["manifest"] = json!(output::MANIFEST);
        write_json(&path, &doc)?;
        RunManifest::new("verify", args, seed, vec![path]).write(dir)?;
    }
    if report.verified {
        Ok(())
    } else {
        Err(Failure::Verification("certificate failed verification".into()))
    }
}

fn cmd_sweep(args: &SweepArgs, seed: u64) -> Result<(), Failure> {
    let text = output::read_input(&args.grid)?;
    let grid: SweepGrid =
        serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", args.grid.display())))?;
    let d = SearchConfig::default();
    let o = &grid.search;
    let cfg = SearchConfig {
        rho2_tol: o.rho2_tol.unwrap_or(d.rho2_tol),
        feas_tol: o.feas_tol.unwrap_or(d.feas_tol),
        restarts: o.restarts.unwrap_or(d.restarts),
        max_evals: o.max_evals.unwrap_or(d.max_evals),
        seed,
    };
    check_search(&cfg)?;
    let mut rows = Vec::new();
    println!("{:<8}{:<16}{:>10}{:>8}{:>14}{:>16}  status", "method", "assumption", "m/L", "n", "alpha", "rho2_best");
    for &ratio in &grid.m_over_l {
        for &n in &grid.n {
            let m = ratio * grid.l;
            let alpha = grid.alpha.unwrap_or_else(|| default_alpha(grid.method, m, grid.l, n));
            let spec = SearchSpec::new(grid.method, grid.assumption, m, grid.l, n, alpha);
            let res = bisect_rate(&spec, &cfg)?;
            let row = SweepRow::from(&res);
            let best = row.rho2_best.map_or("-".to_string(), |r| format!("{r:.8}"));
            println!(
                "{:<8}{:<16}{:>10}{:>8}{:>14.6e}{:>16}  {:?}",
                grid.method.to_string(),
                grid.assumption.to_string(),
                ratio,
                n,
                alpha,
                best,
                row.status
            );
            rows.push(row);
        }
    }
    let path = output::in_dir(&args.out, "result.csv")?;
    write_csv(&path, &rows)?;
    RunManifest::new("sweep", &grid, seed, vec![path]).write(&args.out)?;
    Ok(())
}

fn cmd_sag_probe(args: &SagProbeArgs, seed: u64) -> Result<(), Failure> {
    let (published_alpha, published_rho2) = published_sag_point(args.m, args.l, args.n);
    let alpha = args.alpha.unwrap_or(published_alpha);
    let grid = if args.rho2.is_empty() { vec![published_rho2, 0.999, 1.0] } else { args.rho2.clone() };
    let cfg = args.search.config(seed)?;
    let probe = sag_probe(args.assumption, args.m, args.l, args.n, alpha, &grid, &cfg)?;
    println!("SAG, {} m = {}, L = {}, n = {}, alpha = {alpha}", args.assumption, args.m, args.l, args.n);
    println!("{:>14}{:>22}{:>22}", "rho2", "block-diagonal P", "invariant P");
    let verdict = |found: bool, best: f64| {
        if found {
            format!("witness ({best:+.2e})")
        } else {
            format!("none ({best:+.2e})")
        }
    };
    for r in &probe.rows {
        println!(
            "{:>14.8}{:>22}{:>22}",
            r.rho2,
            verdict(r.restricted.is_some(), r.restricted_best),
            verdict(r.invariant.is_some(), r.invariant_best)
        );
    }
    println!("absence of a witness is a search result, not a proof of infeasibility");
    let mut doc = serde_json::to_value(&probe).map_err(|e| Failure::Io(e.into()))?;
    doc["manifest"] = json!(output::MANIFEST);
    let path = output::in_dir(&args.out, "result.json")?;
    write_json(&path, &doc)?;
    RunManifest::new("sag-probe", args, seed, vec![path]).write(&args.out)?;
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Certify(a) => cmd_certify(a, cli.seed),
        Command::Bisect(a) => cmd_bisect(a, cli.seed),
        Command::Simulate(a) => cmd_simulate(a, cli.seed),
        Command::Verify(a) => cmd_verify(a, cli.seed),
        Command::Sweep(a) => cmd_sweep(a, cli.seed),
        Command::SagProbe(a) => cmd_sag_probe(a, cli.seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code())
        }
    }
}
