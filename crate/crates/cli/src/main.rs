//! `vecgap`: generate 3DM instances, reduce them to vector packing or
//! covering, solve the results exactly, and verify the gadget claims.

mod error;

use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use error::CliError;
use vecgap_core::gadgets::{
    build_integers, build_skewed_integers, cover_vectors, default_beta, emit_four_partition,
    pack_vectors, skew_vectors, AnyGadget,
};
use vecgap_core::matching::{generate_e2, planted_instance, HardnessConstants, Max3dmInstance};
use vecgap_core::model::{format_rational, parse_rational, Flavor, VectorInstance, FORMAT_VERSION};
use vecgap_core::solvers::{
    first_fit, first_fit_decreasing, greedy_cover, solve_vbc_exact, solve_vbp_exact, ConfigCap,
    SolverLimits, DEFAULT_MAX_ITEMS, HARD_MAX_ITEMS,
};
use vecgap_core::verify::{
    check_instance, check_solver_caps, counterexample_woeginger, gap_check_covering,
    gap_check_packing, gap_check_skewed, hardness_bounds, unexpected_failures, CheckOptions,
    ClaimId, GapReport, LemmaReport, DEFAULT_BUDGET,
};

#[derive(Parser, Debug)]
#[command(
    name = "vecgap",
    version,
    about = "Gap reductions from 3DM to 2-D vector packing and covering"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    /// Seed for instance generation.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Largest universe a single enumeration check may cover.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Item limit for the exact solvers.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_ITEMS)]
    max_items: usize,
    /// Worker threads for subset enumeration.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Summary format on standard output.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Record wall-clock times in reports (makes them non-reproducible).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a 3DM instance.
    Gen(GenArgs),
    /// Reduce a 3DM instance to a vector instance.
    Reduce(ReduceArgs),
    /// Solve a vector instance.
    Solve(SolveArgs),
    /// Run verification checks.
    Verify(VerifyArgs),
    /// Evaluate the inapproximability bounds in exact arithmetic.
    Bounds(BoundsArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum GenKind {
    E2,
    Planted,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long)]
    q: u32,
    #[arg(long, value_enum, default_value_t = GenKind::E2)]
    kind: GenKind,
    /// Size of the planted matching (default q).
    #[arg(long)]
    planted_size: Option<u32>,
    /// Extra tuples, each conflicting with the planted matching (default q).
    #[arg(long)]
    extra: Option<usize>,
    #[arg(long)]
    out: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Pack,
    Skew,
    Cover,
}

#[derive(Args, Debug)]
struct ReduceArgs {
    #[arg(long, value_enum)]
    mode: Mode,
    /// `auto` or a non-negative integer.
    #[arg(long, default_value = "auto")]
    beta: String,
    /// Skewness parameter as a rational, e.g. `2/5`; required for `skew`.
    #[arg(long)]
    delta: Option<String>,
    #[arg(long = "in")]
    input: String,
    #[arg(long)]
    out: String,
    /// Also write the intermediate partition integers.
    #[arg(long)]
    integers_out: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Algo {
    Exact,
    Ff,
    Ffd,
    GreedyCover,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Objective {
    Pack,
    Cover,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long, value_enum, default_value_t = Algo::Exact)]
    algo: Algo,
    /// Packing or covering; defaults to covering for cover instances.
    #[arg(long, value_enum)]
    objective: Option<Objective>,
    /// Configuration size cap for the exact solvers: `auto`, `none` or an integer.
    #[arg(long, default_value = "auto")]
    config_cap: String,
    #[arg(long = "in")]
    input: String,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(subcommand)]
    target: VerifyTarget,
}

#[derive(Subcommand, Debug)]
enum VerifyTarget {
    /// Enumerate the gadget claims on an instance document.
    Lemmas(LemmaArgs),
    /// Check the three-tuple overflow of the original r = 32q construction.
    Counterexample(CounterexampleArgs),
    /// Solve a reduced instance exactly and compare with the predicted gap.
    Gap(GapArgs),
}

#[derive(Args, Debug)]
struct LemmaArgs {
    /// `all` or a comma-separated list of claim ids.
    #[arg(long, default_value = "all")]
    claims: String,
    /// Claims allowed to come out falsified (comma-separated).
    #[arg(long, default_value = "")]
    expected_falsified: String,
    #[arg(long = "in", required = true, num_args = 1..)]
    inputs: Vec<String>,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args, Debug)]
struct CounterexampleArgs {
    #[arg(long, default_value_t = 3)]
    q: u32,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args, Debug)]
struct GapArgs {
    #[arg(long, value_enum)]
    mode: Mode,
    #[arg(long, default_value = "auto")]
    beta: String,
    #[arg(long)]
    delta: Option<String>,
    /// A 3DM instance document.
    #[arg(long = "in")]
    input: String,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ConstantSet {
    /// The constants of the underlying 3DM hardness result.
    Theorem,
    /// The variant with beta0 = 0.979339943.
    Restated,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    #[arg(long, default_value_t = 4)]
    m_min: u32,
    #[arg(long, default_value_t = 64)]
    m_max: u32,
    #[arg(long, value_enum, default_value_t = ConstantSet::Theorem)]
    constants: ConstantSet,
    #[arg(long)]
    out: Option<String>,
}

/// What a command produced: a summary for stdout and an exit status.
struct Outcome {
    text: Vec<String>,
    json: Value,
    ok: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                e.exit();
            }
            let message = e.to_string();
            let first = match e.kind() {
                ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => "missing subcommand",
                _ => message.lines().next().unwrap_or("invalid arguments"),
            };
            let err = CliError::usage(first.trim_start_matches("error: "));
            eprintln!("{}", err.to_json_line());
            return err.exit_code();
        }
    };
    match run(&cli) {
        Ok(outcome) => {
            match cli.common.format {
                Format::Text => {
                    for line in &outcome.text {
                        println!("{line}");
                    }
                }
                Format::Json => println!("{}", outcome.json),
            }
            if outcome.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(err) => {
            eprintln!("{}", err.to_json_line());
            err.exit_code()
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let c = &cli.common;
    if c.max_items > HARD_MAX_ITEMS {
        return Err(CliError::usage(format!(
            "--max-items {} exceeds the hard limit of {HARD_MAX_ITEMS}",
            c.max_items
        )));
    }
    if c.threads == 0 {
        return Err(CliError::usage("--threads must be at least 1"));
    }
    match &cli.command {
        Command::Gen(a) => cmd_gen(a, c),
        Command::Reduce(a) => cmd_reduce(a),
        Command::Solve(a) => cmd_solve(a, c),
        Command::Verify(a) => match &a.target {
            VerifyTarget::Lemmas(l) => cmd_verify_lemmas(l, c),
            VerifyTarget::Counterexample(x) => cmd_counterexample(x),
            VerifyTarget::Gap(g) => cmd_gap(g, c),
        },
        Command::Bounds(a) => cmd_bounds(a),
    }
}

fn read(path: &str) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn write(path: &str, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn write_json(path: &str, doc: &Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(doc).expect("JSON values always serialize");
    text.push('\n');
    write(path, &text)
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types always serialize")
}

fn parse_beta(text: &str, inst: &Max3dmInstance) -> Result<u64, CliError> {
    if text == "auto" {
        return Ok(default_beta(inst));
    }
    text.parse().map_err(|_| {
        CliError::usage(format!(
            "--beta must be `auto` or a non-negative integer, got `{text}`"
        ))
    })
}

fn parse_delta(text: Option<&String>) -> Result<vecgap_core::model::Rational, CliError> {
    let text = text.ok_or_else(|| CliError::usage("mode `skew` requires --delta"))?;
    parse_rational(text).map_err(|e| CliError::usage(format!("--delta: {e}")))
}

fn limits(common: &Common, cap: &str) -> Result<SolverLimits, CliError> {
    let max_config_size = match cap {
        "auto" => ConfigCap::Auto,
        "none" => ConfigCap::Unlimited,
        n => ConfigCap::Fixed(n.parse().map_err(|_| {
            CliError::usage(format!(
                "--config-cap must be `auto`, `none` or an integer, got `{n}`"
            ))
        })?),
    };
    Ok(SolverLimits {
        max_items: common.max_items,
        max_config_size,
    })
}

fn check_options(common: &Common) -> CheckOptions {
    CheckOptions {
        budget: common.budget,
        threads: common.threads,
        record_time: common.timing,
    }
}

fn cmd_gen(a: &GenArgs, c: &Common) -> Result<Outcome, CliError> {
    let inst = match a.kind {
        GenKind::E2 => {
            if a.planted_size.is_some() || a.extra.is_some() {
                return Err(CliError::usage(
                    "--planted-size and --extra only apply to --kind planted",
                ));
            }
            generate_e2(a.q, c.seed)?
        }
        GenKind::Planted => planted_instance(
            a.q,
            a.planted_size.unwrap_or(a.q),
            a.extra.unwrap_or(a.q as usize),
            c.seed,
        )?,
    };
    write(&a.out, &inst.to_json())?;
    let e2 = inst.validate(Some(2)).is_e2();
    Ok(Outcome {
        text: vec![format!(
            "q={} tuples={} e2={e2}",
            inst.q(),
            inst.tuples().len()
        )],
        json: json!({ "q": inst.q(), "tuples": inst.tuples().len(), "e2": e2 }),
        ok: true,
    })
}

fn cmd_reduce(a: &ReduceArgs) -> Result<Outcome, CliError> {
    let inst = Max3dmInstance::from_json(&read(&a.input)?)?;
    if a.mode != Mode::Skew && a.delta.is_some() {
        return Err(CliError::usage("--delta only applies to mode `skew`"));
    }
    let beta = parse_beta(&a.beta, &inst)?;
    let (vi, r, b, m, partition) = match a.mode {
        Mode::Pack | Mode::Cover => {
            let g = build_integers(&inst)?;
            let vi = if a.mode == Mode::Pack {
                pack_vectors(&g, beta)?
            } else {
                cover_vectors(&g, beta)?
            };
            let p = emit_four_partition(AnyGadget::General(&g));
            (vi, g.r, g.b, None, p)
        }
        Mode::Skew => {
            let delta = parse_delta(a.delta.as_ref())?;
            let g = build_skewed_integers(&inst, &delta)?;
            let vi = skew_vectors(&g, beta)?;
            let p = emit_four_partition(AnyGadget::Skewed(&g));
            (vi, g.r.clone(), g.b.clone(), Some(g.m), p)
        }
    };
    write(&a.out, &vi.to_json())?;
    if let Some(path) = &a.integers_out {
        write(path, &partition.to_json())?;
    }
    let mut line = format!(
        "flavor={} q={} tuples={} beta={beta} items={} dummies={} r={r} b={b}",
        flavor_name(vi.flavor()),
        inst.q(),
        inst.tuples().len(),
        vi.len(),
        vi.dummy_count()
    );
    if let Some(m) = m {
        line.push_str(&format!(" m={m}"));
    }
    let mut text = vec![line];
    text.extend(vi.warnings().into_iter().map(|w| format!("warning: {w}")));
    Ok(Outcome {
        text,
        json: json!({
            "flavor": vi.flavor(),
            "q": inst.q(),
            "tuples": inst.tuples().len(),
            "beta": beta,
            "items": vi.len(),
            "dummies": vi.dummy_count(),
            "r": r.to_string(),
            "b": b.to_string(),
            "m": m,
        }),
        ok: true,
    })
}

fn flavor_name(f: Flavor) -> String {
    to_value(&f).as_str().unwrap_or_default().to_string()
}

fn cmd_solve(a: &SolveArgs, c: &Common) -> Result<Outcome, CliError> {
    let vi = VectorInstance::from_json(&read(&a.input)?)?;
    let lim = limits(c, &a.config_cap)?;
    let objective = match (a.algo, a.objective) {
        (Algo::GreedyCover, Some(Objective::Pack)) => {
            return Err(CliError::usage(
                "greedy-cover solves the covering objective",
            ))
        }
        (Algo::Ff | Algo::Ffd, Some(Objective::Cover)) => {
            return Err(CliError::usage("ff and ffd solve the packing objective"))
        }
        (Algo::GreedyCover, _) => Objective::Cover,
        (Algo::Ff | Algo::Ffd, _) => Objective::Pack,
        (Algo::Exact, Some(o)) => o,
        (Algo::Exact, None) if vi.flavor() == Flavor::Cover => Objective::Cover,
        (Algo::Exact, None) => Objective::Pack,
    };
    let (doc, key, value) = match objective {
        Objective::Pack => {
            let sol = match a.algo {
                Algo::Exact => solve_vbp_exact(&vi, &lim)?.1,
                Algo::Ff => first_fit(&vi, None)?,
                _ => first_fit_decreasing(&vi),
            };
            (sol.to_json(), "bins", sol.bin_count())
        }
        Objective::Cover => {
            let sol = match a.algo {
                Algo::Exact => solve_vbc_exact(&vi, &lim)?.1,
                _ => greedy_cover(&vi, None)?,
            };
            (sol.to_json(), "covers", sol.cover_count())
        }
    };
    if let Some(out) = &a.out {
        write(out, &doc)?;
    }
    Ok(Outcome {
        text: vec![format!("{key}={value}")],
        json: json!({ key: value }),
        ok: true,
    })
}

fn parse_claims(text: &str) -> Result<Vec<ClaimId>, CliError> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            ClaimId::parse(s).ok_or_else(|| CliError::usage(format!("unknown claim id `{s}`")))
        })
        .collect()
}

fn report_line(r: &LemmaReport) -> String {
    let verdict = to_value(&r.verdict);
    let mut line = format!(
        "{}: {} ({} checked, {} positive, {} counterexamples)",
        r.claim_id,
        verdict.as_str().unwrap_or_default(),
        r.universe.size,
        r.positives,
        r.counterexample_total
    );
    if let Some(first) = r.counterexamples.first() {
        line.push_str(&format!(" first {first}"));
    }
    line
}

fn lemma_outcome(
    reports: Vec<LemmaReport>,
    expected: &[ClaimId],
    out: Option<&String>,
) -> Result<Outcome, CliError> {
    let unexpected: Vec<ClaimId> = unexpected_failures(&reports, expected)
        .into_iter()
        .map(|r| r.claim_id)
        .collect();
    let ok = unexpected.is_empty();
    let status = if ok { "verified" } else { "falsified" };
    if let Some(path) = out {
        write_json(
            path,
            &json!({
                "format_version": FORMAT_VERSION,
                "status": status,
                "expected_falsified": expected,
                "reports": reports,
            }),
        )?;
    }
    let mut text: Vec<String> = reports.iter().map(report_line).collect();
    text.push(format!("status={status}"));
    let summary: Vec<Value> = reports
        .iter()
        .map(|r| {
            json!({
                "claim_id": r.claim_id,
                "verdict": r.verdict,
                "checked": r.universe.size,
                "counterexamples": r.counterexample_total,
            })
        })
        .collect();
    Ok(Outcome {
        text,
        json: json!({ "status": status, "unexpected": unexpected, "reports": summary }),
        ok,
    })
}

fn cmd_verify_lemmas(a: &LemmaArgs, c: &Common) -> Result<Outcome, CliError> {
    let expected = parse_claims(&a.expected_falsified)?;
    let wanted = if a.claims == "all" {
        None
    } else {
        let list = parse_claims(&a.claims)?;
        if list.is_empty() {
            return Err(CliError::usage("--claims is empty"));
        }
        Some(list)
    };
    let opts = check_options(c);
    let lim = limits(c, "auto")?;
    let mut reports = Vec::new();
    for path in &a.inputs {
        let vi = VectorInstance::from_json(&read(path)?)?;
        let wants = |id: ClaimId| wanted.as_ref().is_none_or(|w| w.contains(&id));
        let mut found = if wanted
            .as_ref()
            .is_some_and(|w| w == &[ClaimId::SolverCapConsistency])
        {
            Vec::new()
        } else {
            check_instance(&vi, &opts)?
        };
        let packing = matches!(vi.flavor(), Flavor::Pack | Flavor::Skew);
        let caps_by_default = wanted.is_none() && vi.len() <= lim.max_items.min(HARD_MAX_ITEMS);
        if packing && (caps_by_default || wants(ClaimId::SolverCapConsistency) && wanted.is_some())
        {
            found.push(check_solver_caps(&vi, &lim, &opts)?);
        }
        found.retain(|r| wants(r.claim_id));
        if let Some(w) = &wanted {
            for id in w {
                if !found.iter().any(|r| r.claim_id == *id) {
                    return Err(CliError::usage(format!(
                        "claim `{id}` does not apply to {} instance {path}",
                        flavor_name(vi.flavor())
                    )));
                }
            }
        }
        reports.extend(found);
    }
    lemma_outcome(reports, &expected, a.out.as_ref())
}

fn cmd_counterexample(a: &CounterexampleArgs) -> Result<Outcome, CliError> {
    let report = counterexample_woeginger(a.q)?;
    let mut outcome = lemma_outcome(vec![report.clone()], &[], a.out.as_ref())?;
    outcome
        .text
        .splice(1..1, report.details.iter().map(|d| format!("  {d}")));
    Ok(outcome)
}

fn cmd_gap(a: &GapArgs, c: &Common) -> Result<Outcome, CliError> {
    let inst = Max3dmInstance::from_json(&read(&a.input)?)?;
    if a.mode != Mode::Skew && a.delta.is_some() {
        return Err(CliError::usage("--delta only applies to mode `skew`"));
    }
    let beta = parse_beta(&a.beta, &inst)?;
    let lim = limits(c, "auto")?;
    let report: GapReport = match a.mode {
        Mode::Pack => gap_check_packing(&inst, beta, &lim)?,
        Mode::Cover => gap_check_covering(&inst, beta, &lim)?,
        Mode::Skew => gap_check_skewed(&inst, beta, &parse_delta(a.delta.as_ref())?, &lim)?,
    };
    if let Some(path) = &a.out {
        let mut doc = to_value(&report);
        doc["format_version"] = json!(FORMAT_VERSION);
        write_json(path, &doc)?;
    }
    let (word, yes_rel, no_rel) = match a.mode {
        Mode::Cover => ("covers", ">=", "<="),
        _ => ("bins", "<=", ">="),
    };
    let text = vec![
        format!(
            "flavor={} q={} tuples={} alpha={} beta={}{}",
            flavor_name(report.flavor),
            report.q,
            report.tuples,
            report.alpha,
            report.beta,
            report.m.map(|m| format!(" m={m}")).unwrap_or_default()
        ),
        format!(
            "{word}={} N_G={} N_D={} N_R={}",
            report.solver_opt, report.n_g, report.n_d, report.n_r
        ),
        format!(
            "yes bound: {word} {yes_rel} {} ({}): {}",
            report.predicted_yes,
            if report.yes_bound_applies {
                "applies"
            } else {
                "alpha < beta, not applicable"
            },
            report.yes_bound_holds
        ),
        format!(
            "no bound: {word} {no_rel} {}: {}",
            format_rational(&report.predicted_no_bound),
            report.no_bound_holds
        ),
        format!("pinched={}", report.pinched()),
    ];
    let mut json = to_value(&report);
    json["pinched"] = json!(report.pinched());
    Ok(Outcome {
        text,
        json,
        ok: report.holds(),
    })
}

fn cmd_bounds(a: &BoundsArgs) -> Result<Outcome, CliError> {
    if a.m_min > a.m_max {
        return Err(CliError::usage("--m-min exceeds --m-max"));
    }
    let constants = match a.constants {
        ConstantSet::Theorem => HardnessConstants::theorem(),
        ConstantSet::Restated => HardnessConstants::covering_restated(),
    };
    let bounds = hardness_bounds(&constants, a.m_min..=a.m_max)
        .map_err(|e| CliError::usage(e.to_string()))?;
    let ok = bounds.iter().all(|b| b.holds);
    let doc = json!({
        "format_version": FORMAT_VERSION,
        "alpha0": format_rational(&constants.alpha0),
        "beta0": format_rational(&constants.beta0),
        "bounds": bounds,
        "all_hold": ok,
    });
    if let Some(path) = &a.out {
        write_json(path, &doc)?;
    }
    let mut text: Vec<String> = bounds.iter().map(|b| b.summary()).collect();
    text.push(format!("all_hold={ok}"));
    Ok(Outcome {
        text,
        json: doc,
        ok,
    })
}
