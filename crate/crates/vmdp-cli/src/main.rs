//! Command-line front end: validate and solve models, enumerate policy
//! spaces exhaustively, test structural properties against the
//! enumeration, compare front files, and reproduce the bundled
//! counterexample end to end.
//!
//! Exit codes: 0 when the tool ran (mathematical verdicts, PASS or
//! FAIL, are data, not errors); 1 when an artifact check found
//! discrepancies (validation violations, front mismatches); 2 on usage
//! or input errors; 3 when an enumeration cap was exceeded.

mod report;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use report::{
    model_digest, state_labels, to_pretty_json, CheckSummary, ComparisonReport, DemoCheck, DemoSummary,
    FrontData, ModelInfo, OracleSummary, OutDir, SolveSummary, ValidationSummary, ViolationEntry,
};
use vmdp::fronts::parse_front_csv;
use vmdp::oracle::{
    check_property_p, check_property_p_prime, find_witness_history, find_witness_markov,
    v_sets_history, v_sets_markov, History, MatchMode, OracleError, DEFAULT_CAP,
};
use vmdp::pareto::ParetoSet;
use vmdp::recursion::{white_recursion, white_recursion_keeping_f_sets, ValueTable};
use vmdp::{RewardVector, VmdpModel};

const EXIT_OK: u8 = 0;
const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_CAP_EXCEEDED: u8 = 3;

#[derive(Parser)]
#[command(name = "vmdp", version, about = "Solve vector-reward decision processes exactly and audit the solution against exhaustive policy enumeration")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a model file and list every violation
    Validate {
        /// Model JSON file
        model: PathBuf,
    },
    /// Run the set-valued recursion and emit per-(epoch, state) fronts
    Solve {
        model: PathBuf,
        /// Decimal places for the rounded columns
        #[arg(long, default_value_t = 1, value_parser = round_places)]
        round: u32,
        /// Record which action generated each front vector
        #[arg(long)]
        keep_f_sets: bool,
        /// Directory for fronts_<t>_<s>.csv, summary.json, manifest.json
        #[arg(long)]
        out: Option<PathBuf>,
        /// Only this decision epoch (or the terminal epoch)
        #[arg(long)]
        epoch: Option<usize>,
        /// Only this state, by name
        #[arg(long)]
        state: Option<String>,
    },
    /// Enumerate a policy space exhaustively and emit the attained fronts
    Oracle {
        model: PathBuf,
        /// Which policy space to search
        #[arg(long, value_enum)]
        space: Space,
        /// Abort if the space holds more policies than this
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
        #[arg(long, default_value_t = 1, value_parser = round_places)]
        round: u32,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        epoch: Option<usize>,
        #[arg(long)]
        state: Option<String>,
    },
    /// Test a structural claim against exhaustive enumeration
    Check {
        model: PathBuf,
        /// P | Pprime | theorem5 | corollary2
        #[arg(value_enum)]
        which: Property,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
        #[arg(long, default_value_t = 1, value_parser = round_places)]
        round: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare two front CSV files as vector sets
    Compare {
        left: PathBuf,
        right: PathBuf,
        /// Compare after rounding to this many decimals
        #[arg(long, value_parser = round_places)]
        round: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reproduce the bundled counterexample pipeline and print a table
    Counterexample {
        #[arg(long, default_value_t = 1, value_parser = round_places)]
        round: u32,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Rounding columns are presentational; cap the places so a stray flag
/// can't request astronomically large powers of ten.
fn round_places(s: &str) -> Result<u32, String> {
    let places: u32 = s.parse().map_err(|e| format!("{e}"))?;
    if places > 18 {
        return Err("at most 18 decimal places are supported".into());
    }
    Ok(places)
}

#[derive(Copy, Clone, ValueEnum)]
enum Space {
    Markov,
    History,
}

#[derive(Copy, Clone, ValueEnum)]
enum Property {
    #[value(name = "P")]
    P,
    #[value(name = "Pprime")]
    Pprime,
    #[value(name = "theorem5")]
    Theorem5,
    #[value(name = "corollary2")]
    Corollary2,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            let capped = err.downcast_ref::<OracleError>().is_some_and(|e| {
                matches!(e, OracleError::CapExceeded { .. } | OracleError::TreeExceeded { .. })
            });
            ExitCode::from(if capped { EXIT_CAP_EXCEEDED } else { 2 })
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Validate { model } => cmd_validate(&model),
        Command::Solve { model, round, keep_f_sets, out, epoch, state } => {
            cmd_solve(&model, round, keep_f_sets, out.as_deref(), epoch, state.as_deref())
        }
        Command::Oracle { model, space, cap, round, out, epoch, state } => {
            cmd_oracle(&model, space, cap, round, out.as_deref(), epoch, state.as_deref())
        }
        Command::Check { model, which, cap, round, out } => {
            cmd_check(&model, which, cap, round, out.as_deref())
        }
        Command::Compare { left, right, round, out } => {
            cmd_compare(&left, &right, round, out.as_deref())
        }
        Command::Counterexample { round, cap, out } => cmd_counterexample(round, cap, out.as_deref()),
    }
}

fn load_model(path: &Path) -> Result<VmdpModel> {
    VmdpModel::from_path(path).with_context(|| format!("loading {}", path.display()))
}

/// Loads and validates; on violations prints the validation summary and
/// yields the failure exit code instead of a model.
fn load_valid(path: &Path, command: &'static str) -> Result<std::result::Result<VmdpModel, u8>> {
    let model = load_model(path)?;
    let report = model.validate();
    if report.is_ok() {
        return Ok(Ok(model));
    }
    eprintln!(
        "error: {} fails validation with {} problem(s)",
        path.display(),
        report.violations().len()
    );
    let summary = ValidationSummary {
        command,
        ok: false,
        violations: report.messages(),
        model: ModelInfo::of(&model),
    };
    print!("{}", to_pretty_json(&summary));
    Ok(Err(EXIT_CHECK_FAILED))
}

/// Resolves the --epoch/--state filters to the (t, s) grid to emit.
fn front_sites(
    model: &VmdpModel,
    epoch: Option<usize>,
    state: Option<&str>,
) -> Result<Vec<(usize, usize)>> {
    if let Some(t) = epoch {
        if t < 1 || t > model.horizon() {
            bail!("epoch {t} is outside 1..={}", model.horizon());
        }
    }
    let state_index = state
        .map(|name| {
            model
                .state_index(name)
                .ok_or_else(|| anyhow!("unknown state {name:?}; states are {:?}", model.states()))
        })
        .transpose()?;
    let epochs: Vec<usize> = match epoch {
        Some(t) => vec![t],
        None => (1..=model.horizon()).collect(),
    };
    let states: Vec<usize> = match state_index {
        Some(s) => vec![s],
        None => (0..model.num_states()).collect(),
    };
    Ok(epochs.into_iter().flat_map(|t| states.iter().map(move |&s| (t, s))).collect())
}

fn cmd_validate(path: &Path) -> Result<u8> {
    let model = load_model(path)?;
    let report = model.validate();
    let summary = ValidationSummary {
        command: "validate",
        ok: report.is_ok(),
        violations: report.messages(),
        model: ModelInfo::of(&model),
    };
    print!("{}", to_pretty_json(&summary));
    Ok(if report.is_ok() { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn solve_front(
    model: &VmdpModel,
    table: &ValueTable,
    labels: &[String],
    t: usize,
    s: usize,
    keep_f_sets: bool,
) -> FrontData {
    let vectors: Vec<RewardVector> = table.frontier(t, s).vectors().to_vec();
    let actions = keep_f_sets.then(|| {
        vectors
            .iter()
            .map(|v| match table.f_set(t, s) {
                Some(fs) => {
                    let a = fs.generator(v).expect("every frontier vector has a generator").action;
                    model.action_name(s, a).to_string()
                }
                // terminal fronts have no generating action
                None => String::new(),
            })
            .collect()
    });
    FrontData {
        epoch: t,
        state_name: model.state_name(s).to_string(),
        state_label: labels[s].clone(),
        vectors,
        actions,
    }
}

fn cmd_solve(
    path: &Path,
    round: u32,
    keep_f_sets: bool,
    out: Option<&Path>,
    epoch: Option<usize>,
    state: Option<&str>,
) -> Result<u8> {
    let started = Instant::now();
    let model = match load_valid(path, "solve")? {
        Ok(model) => model,
        Err(code) => return Ok(code),
    };
    let sites = front_sites(&model, epoch, state)?;
    let table = if keep_f_sets {
        white_recursion_keeping_f_sets(&model)
    } else {
        white_recursion(&model)
    };
    let labels = state_labels(&model);
    let fronts: Vec<FrontData> =
        sites.iter().map(|&(t, s)| solve_front(&model, &table, &labels, t, s, keep_f_sets)).collect();

    let summary = SolveSummary {
        command: "solve",
        model: ModelInfo::of(&model),
        round,
        keep_f_sets,
        fronts: fronts.iter().map(|f| f.entry(round, out.is_some())).collect(),
    };
    if let Some(dir) = out {
        let mut od = OutDir::create(dir)?;
        for front in &fronts {
            od.write(&front.file_name(), &front.csv(round))?;
        }
        od.write_json("summary.json", &summary)?;
        let mut flags = BTreeMap::new();
        flags.insert("round", json!(round));
        flags.insert("keep_f_sets", json!(keep_f_sets));
        if let Some(t) = epoch {
            flags.insert("epoch", json!(t));
        }
        if let Some(s) = state {
            flags.insert("state", json!(s));
        }
        od.finish("solve", Some(path), Some(model_digest(&model)), flags, started)?;
    }
    print!("{}", to_pretty_json(&summary));
    Ok(EXIT_OK)
}

/// The efficient front over history policies at (t, s). The front is
/// the same for every history ending in s; this recomputes it per
/// history and insists on that agreement rather than assuming it.
fn history_front_by_state(
    model: &VmdpModel,
    hv: &vmdp::oracle::HistoryValueSets,
    t: usize,
    s: usize,
) -> Result<ParetoSet> {
    let mut front: Option<ParetoSet> = None;
    for h in History::all(t, model.num_states()).filter(|h| h.last() == s) {
        let candidate = hv.efficient(t, &h);
        match &front {
            None => front = Some(candidate),
            Some(seen) => {
                if seen != &candidate {
                    bail!(
                        "efficient fronts differ among histories ending in {} at epoch {t}",
                        model.state_name(s)
                    );
                }
            }
        }
    }
    front.ok_or_else(|| anyhow!("no histories end in {} at epoch {t}", model.state_name(s)))
}

fn cmd_oracle(
    path: &Path,
    space: Space,
    cap: u64,
    round: u32,
    out: Option<&Path>,
    epoch: Option<usize>,
    state: Option<&str>,
) -> Result<u8> {
    let started = Instant::now();
    let model = match load_valid(path, "oracle")? {
        Ok(model) => model,
        Err(code) => return Ok(code),
    };
    let sites = front_sites(&model, epoch, state)?;
    let labels = state_labels(&model);

    let (space_name, policy_count, fronts): (&'static str, u64, Vec<FrontData>) = match space {
        Space::Markov => {
            let v = v_sets_markov(&model, cap)?;
            let fronts = sites
                .iter()
                .map(|&(t, s)| FrontData {
                    epoch: t,
                    state_name: model.state_name(s).to_string(),
                    state_label: labels[s].clone(),
                    vectors: v.efficient(t, s).vectors().to_vec(),
                    actions: None,
                })
                .collect();
            ("markov", v.policy_count, fronts)
        }
        Space::History => {
            let hv = v_sets_history(&model, cap)?;
            let fronts = sites
                .iter()
                .map(|&(t, s)| {
                    Ok(FrontData {
                        epoch: t,
                        state_name: model.state_name(s).to_string(),
                        state_label: labels[s].clone(),
                        vectors: history_front_by_state(&model, &hv, t, s)?.vectors().to_vec(),
                        actions: None,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            ("history", hv.policy_count, fronts)
        }
    };

    let summary = OracleSummary {
        command: "oracle",
        space: space_name,
        model: ModelInfo::of(&model),
        cap,
        round,
        policy_count,
        fronts: fronts.iter().map(|f| f.entry(round, out.is_some())).collect(),
    };
    if let Some(dir) = out {
        let mut od = OutDir::create(dir)?;
        for front in &fronts {
            od.write(&front.file_name(), &front.csv(round))?;
        }
        od.write_json("summary.json", &summary)?;
        let mut flags = BTreeMap::new();
        flags.insert("space", json!(space_name));
        flags.insert("cap", json!(cap));
        flags.insert("round", json!(round));
        if let Some(t) = epoch {
            flags.insert("epoch", json!(t));
        }
        if let Some(s) = state {
            flags.insert("state", json!(s));
        }
        od.finish("oracle", Some(path), Some(model_digest(&model)), flags, started)?;
    }
    print!("{}", to_pretty_json(&summary));
    Ok(EXIT_OK)
}

fn rounded_components(v: &RewardVector, places: u32) -> Vec<String> {
    v.components().iter().map(|c| c.decimal_string(places)).collect()
}

fn cmd_check(
    path: &Path,
    which: Property,
    cap: u64,
    round: u32,
    out: Option<&Path>,
) -> Result<u8> {
    let started = Instant::now();
    let model = match load_valid(path, "check")? {
        Ok(model) => model,
        Err(code) => return Ok(code),
    };

    let (which_name, holds, policy_count, violations, mismatched_sites) = match which {
        Property::P => {
            let r = check_property_p(&model, cap)?;
            let violations = r
                .violations
                .iter()
                .map(|v| ViolationEntry {
                    epoch: v.t,
                    site: model.state_name(v.state).to_string(),
                    vector: v.vector.clone(),
                    rounded: rounded_components(&v.vector, round),
                    generator_action: model.action_name(v.state, v.generator_action).to_string(),
                })
                .collect();
            ("P", r.holds, r.policy_count, violations, Vec::new())
        }
        Property::Pprime => {
            let r = check_property_p_prime(&model, cap)?;
            let violations = r
                .violations
                .iter()
                .map(|v| ViolationEntry {
                    epoch: v.t,
                    site: v.history.label(&model),
                    vector: v.vector.clone(),
                    rounded: rounded_components(&v.vector, round),
                    generator_action: model
                        .action_name(v.history.last(), v.generator_action)
                        .to_string(),
                })
                .collect();
            ("Pprime", r.holds, r.policy_count, violations, Vec::new())
        }
        Property::Theorem5 => {
            let table = white_recursion(&model);
            let hv = v_sets_history(&model, cap)?;
            let mut mismatched = Vec::new();
            for t in 1..=model.horizon() {
                for h in History::all(t, model.num_states()) {
                    if table.frontier(t, h.last()) != &hv.efficient(t, &h) {
                        mismatched.push(format!("t={t}, h={}", h.label(&model)));
                    }
                }
            }
            ("theorem5", mismatched.is_empty(), hv.policy_count, Vec::new(), mismatched)
        }
        Property::Corollary2 => {
            if !model.analyze().is_deterministic {
                bail!("corollary2 applies to deterministic dynamics only; this model is stochastic");
            }
            let table = white_recursion(&model);
            let v = v_sets_markov(&model, cap)?;
            let mut mismatched = Vec::new();
            for t in 1..=model.horizon() {
                for s in 0..model.num_states() {
                    if table.frontier(t, s) != &v.efficient(t, s) {
                        mismatched.push(format!("t={t}, s={}", model.state_name(s)));
                    }
                }
            }
            ("corollary2", mismatched.is_empty(), v.policy_count, Vec::new(), mismatched)
        }
    };

    let summary = CheckSummary {
        command: "check",
        which: which_name,
        model: ModelInfo::of(&model),
        cap,
        verdict: if holds { "PASS" } else { "FAIL" },
        holds,
        policy_count,
        violations,
        mismatched_sites,
    };
    if let Some(dir) = out {
        let mut od = OutDir::create(dir)?;
        od.write_json("summary.json", &summary)?;
        let mut flags = BTreeMap::new();
        flags.insert("which", json!(which_name));
        flags.insert("cap", json!(cap));
        flags.insert("round", json!(round));
        od.finish("check", Some(path), Some(model_digest(&model)), flags, started)?;
    }
    print!("{}", to_pretty_json(&summary));
    // a FAIL verdict is a successful run; the report carries the math
    Ok(EXIT_OK)
}

fn cmd_compare(left: &Path, right: &Path, round: Option<u32>, out: Option<&Path>) -> Result<u8> {
    let started = Instant::now();
    let read = |path: &Path| -> Result<Vec<RewardVector>> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let front = parse_front_csv(&text).map_err(|e| anyhow!("{}: {e}", path.display()))?;
        Ok(front.exact_vectors())
    };
    let project = |vectors: Vec<RewardVector>| -> std::collections::BTreeSet<RewardVector> {
        vectors
            .into_iter()
            .map(|v| match round {
                Some(places) => v.round_dp(places),
                None => v,
            })
            .collect()
    };
    let left_set = project(read(left)?);
    let right_set = project(read(right)?);
    let only_left: Vec<RewardVector> = left_set.difference(&right_set).cloned().collect();
    let only_right: Vec<RewardVector> = right_set.difference(&left_set).cloned().collect();
    let matches = only_left.is_empty() && only_right.is_empty();
    let summary = ComparisonReport {
        command: "compare",
        left_label: left.display().to_string(),
        right_label: right.display().to_string(),
        matches,
        only_left,
        only_right,
        rounding_places: round,
    };
    if let Some(dir) = out {
        let mut od = OutDir::create(dir)?;
        od.write_json("summary.json", &summary)?;
        let mut flags = BTreeMap::new();
        flags.insert("left", json!(summary.left_label));
        flags.insert("right", json!(summary.right_label));
        if let Some(places) = round {
            flags.insert("round", json!(places));
        }
        od.finish("compare", None, None, flags, started)?;
    }
    print!("{}", to_pretty_json(&summary));
    Ok(if matches { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn cmd_counterexample(round: u32, cap: u64, out: Option<&Path>) -> Result<u8> {
    let started = Instant::now();
    let model = VmdpModel::counterexample();
    let labels = state_labels(&model);

    let table = white_recursion_keeping_f_sets(&model);
    let recursion = solve_front(&model, &table, &labels, 1, 0, true);

    let mv = v_sets_markov(&model, cap)?;
    let markov = FrontData {
        epoch: 1,
        state_name: model.state_name(0).to_string(),
        state_label: labels[0].clone(),
        vectors: mv.efficient(1, 0).vectors().to_vec(),
        actions: None,
    };

    let hv = v_sets_history(&model, cap)?;
    let history_set = hv.efficient(1, &History::single(0));
    let history = FrontData {
        epoch: 1,
        state_name: model.state_name(0).to_string(),
        state_label: labels[0].clone(),
        vectors: history_set.vectors().to_vec(),
        actions: None,
    };

    // the vector the recursion promises at (1, s1) that no Markov
    // policy attains
    let probe = RewardVector::from_strs(&["30.0", "-7.8"]);
    let infeasible = recursion
        .vectors
        .iter()
        .find(|v| v.round_dp(1) == probe)
        .cloned()
        .ok_or_else(|| anyhow!("expected a recursion vector rounding to (30.0, -7.8)"))?;
    let markov_witness = find_witness_markov(&model, 1, 0, &infeasible, MatchMode::Exact, cap)?;
    let history_witness =
        find_witness_history(&model, &History::single(0), &infeasible, MatchMode::Exact, cap)?;

    let p_report = check_property_p(&model, cap)?;
    let p_prime_report = check_property_p_prime(&model, cap)?;

    let det = VmdpModel::deterministic_variant();
    let det_labels = state_labels(&det);
    let det_table = white_recursion(&det);
    let det_front = det_table.frontier(1, 0);
    let det_mv = v_sets_markov(&det, cap)?;
    let det_hv = v_sets_history(&det, cap)?;
    let det_agrees = det_front == &det_mv.efficient(1, 0)
        && det_front == &det_hv.efficient(1, &History::single(0));
    let deterministic = FrontData {
        epoch: 1,
        state_name: det.state_name(0).to_string(),
        state_label: det_labels[0].clone(),
        vectors: det_front.vectors().to_vec(),
        actions: None,
    };

    let recursion_set = ParetoSet::from_vectors(recursion.vectors.clone());
    let markov_set = ParetoSet::from_vectors(markov.vectors.clone());
    let checks = vec![
        DemoCheck { name: "recursion front at (1, s1) holds 13 vectors".into(), pass: recursion.vectors.len() == 13 },
        DemoCheck { name: "Markov search covers 64 policies and yields 6 vectors".into(), pass: mv.policy_count == 64 && markov.vectors.len() == 6 },
        DemoCheck { name: "recursion front differs from the Markov front".into(), pass: recursion_set != markov_set },
        DemoCheck { name: "history search covers 16384 policies and recovers the recursion front exactly".into(), pass: hv.policy_count == 16384 && recursion_set == history_set },
        DemoCheck { name: "the vector rounding to (30.0, -7.8) has no Markov witness but a history witness".into(), pass: markov_witness.is_none() && history_witness.is_some() },
        DemoCheck { name: "pre-filter leaves the Markov-attainable set (the expected failure)".into(), pass: !p_report.holds },
        DemoCheck { name: "history pre-filter stays attainable".into(), pass: p_prime_report.holds },
        DemoCheck { name: "deterministic variant: all three routes agree".into(), pass: det_agrees },
    ];
    let all_pass = checks.iter().all(|c| c.pass);

    let summary = DemoSummary {
        command: "counterexample",
        model: ModelInfo::of(&model),
        round,
        recursion_front: recursion.entry(round, out.is_some()),
        markov_front: markov.entry(round, out.is_some()),
        history_front: history.entry(round, out.is_some()),
        markov_policies: mv.policy_count,
        history_policies: hv.policy_count,
        infeasible_vector: report::FrontVector {
            exact: infeasible.clone(),
            rounded: rounded_components(&infeasible, round),
            generator_action: None,
        },
        infeasible_has_markov_witness: markov_witness.is_some(),
        infeasible_has_history_witness: history_witness.is_some(),
        deterministic_front: deterministic.entry(round, out.is_some()),
        checks,
        all_checks_pass: all_pass,
    };

    print!("{}", render_demo_table(&summary));

    if let Some(dir) = out {
        let mut od = OutDir::create(dir)?;
        od.write(&format!("recursion/{}", recursion.file_name()), &recursion.csv(round))?;
        od.write(&format!("markov/{}", markov.file_name()), &markov.csv(round))?;
        od.write(&format!("history/{}", history.file_name()), &history.csv(round))?;
        od.write(&format!("deterministic/{}", deterministic.file_name()), &deterministic.csv(round))?;
        od.write_json("summary.json", &summary)?;
        let mut flags = BTreeMap::new();
        flags.insert("round", json!(round));
        flags.insert("cap", json!(cap));
        od.finish("counterexample", None, Some(model_digest(&model)), flags, started)?;
    }
    Ok(EXIT_OK)
}

fn format_rounded(rounded: &[String]) -> String {
    format!("({})", rounded.join(", "))
}

fn render_demo_table(summary: &DemoSummary) -> String {
    use std::fmt::Write as _;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "bundled counterexample: {} objectives, {} states, horizon {}",
        summary.model.objectives,
        summary.model.states.len(),
        summary.model.horizon
    );
    let mut section = |title: &str, front: &report::FrontEntry| {
        let _ = writeln!(out, "\n{title} ({} vectors)", front.size);
        let width = front.vectors.iter().map(|v| v.exact.to_string().len()).max().unwrap_or(0);
        let rwidth =
            front.vectors.iter().map(|v| format_rounded(&v.rounded).len()).max().unwrap_or(0);
        for v in &front.vectors {
            let exact = v.exact.to_string();
            let rounded = format_rounded(&v.rounded);
            match &v.generator_action {
                Some(a) if !a.is_empty() => {
                    let _ = writeln!(out, "  {exact:width$}  {rounded:rwidth$}  via {a}");
                }
                _ => {
                    let _ = writeln!(out, "  {exact:width$}  {rounded}");
                }
            }
        }
    };
    section("U_1(s1), set-valued recursion", &summary.recursion_front);
    section(
        &format!("e(V_1(s1)), all {} Markov policies", summary.markov_policies),
        &summary.markov_front,
    );
    section(
        &format!("e(V'_1(s1)), all {} history policies", summary.history_policies),
        &summary.history_front,
    );
    section("deterministic variant, U_1(s1)", &summary.deterministic_front);

    let _ = writeln!(
        out,
        "\ninfeasible over Markov policies: {} = {}",
        summary.infeasible_vector.exact,
        format_rounded(&summary.infeasible_vector.rounded)
    );
    let _ = writeln!(
        out,
        "  Markov witness: {}; history witness: {}",
        if summary.infeasible_has_markov_witness { "found" } else { "none (exhaustive)" },
        if summary.infeasible_has_history_witness { "found" } else { "none (exhaustive)" },
    );

    let _ = writeln!(out, "\nchecks");
    for check in &summary.checks {
        let _ = writeln!(out, "  [{}] {}", if check.pass { "pass" } else { "FAIL" }, check.name);
    }
    let _ = writeln!(
        out,
        "\nall checks in their expected state: {}",
        if summary.all_checks_pass { "yes" } else { "NO" }
    );
    out
}
