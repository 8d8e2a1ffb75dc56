//! Command-line surface: every subcommand is a thin shell over one library
//! operation. Documents go to stdout (or `-o`); auxiliary summaries go to
//! stderr as single JSON lines.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input error.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_traits::Zero;
use serde_json::json;

use mdd_core::error::{Error, Result};
use mdd_core::formats::{load_from_path, save_document, save_to_path, InstanceDocument};
use mdd_core::games::{builtin_algorithm, run_demand_game, run_value_game};
use mdd_core::instances::{
    appendix_counterexample, boxs_family, perturb, sat_perturbed_valuation, subset_unrank,
};
use mdd_core::items::ItemSet;
use mdd_core::reduction::{
    balancedness, build_it, build_vt, check_c_compatibility, hardness_budget,
    hardness_budget_for_k, quality_formula, recover_from_it, recover_from_vt, witness_for_it,
    Construction, ReductionReport, WitnessCheck,
};
use mdd_core::solvers::{brute_force_odp, lp_optimal_mdmdp, sadp_opt};
use mdd_core::valuation::Cnf;
use mdd_core::{Rational, DEFAULT_ENUM_CAP, ENUM_CAP_ENV};

#[derive(Parser)]
#[command(
    name = "mdd",
    version,
    about = "Workbench for difference-optimization reductions: generators, truncation pipelines, exact solvers, and oracle games"
)]
struct Cli {
    /// Enumeration cap (max items for exhaustive passes); overrides the
    /// MDD_ENUM_CAP environment variable and the built-in default.
    #[arg(long, global = true)]
    cap: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate instance documents.
    #[command(subcommand)]
    Gen(GenCmd),
    /// Build gap instances from a valuation pair.
    #[command(subcommand)]
    Reduce(ReduceCmd),
    /// Map a gap-instance solution back to a difference-optimal set.
    #[command(subcommand)]
    Recover(RecoverCmd),
    /// Check witnesses, balance bounds, and class assumptions.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Exact brute-force and LP solvers.
    #[command(subcommand)]
    Solve(SolveCmd),
    /// Hidden-perturbation oracle games.
    #[command(subcommand)]
    Game(GameCmd),
    /// Closed-form parameter arithmetic.
    #[command(subcommand)]
    Params(ParamsCmd),
}

#[derive(Args)]
struct OutArg {
    /// Write the document here instead of stdout.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GenCmd {
    /// Complete-bipartite matching family over m items.
    Boxs {
        #[arg(long)]
        m: usize,
        /// Emit the perturbation at this 1-based half-size-set rank instead
        /// of the base valuation.
        #[arg(long)]
        perturb: Option<u64>,
        #[command(flatten)]
        out: OutArg,
    },
    /// CNF-encoded perturbation of the matching family.
    Sat {
        #[arg(long)]
        m: usize,
        /// JSON file holding the clause list, e.g. [[1,-2],[2]].
        #[arg(long)]
        cnf: PathBuf,
        /// Variable count; defaults to the largest literal in the clauses.
        #[arg(long)]
        num_vars: Option<usize>,
        #[command(flatten)]
        out: OutArg,
    },
    /// The 4-item table whose 2-item truncation breaks submodularity.
    AppendixC {
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Args)]
struct ReduceArgs {
    /// Valuation document for the first function of the pair.
    #[arg(long)]
    v: PathBuf,
    /// Valuation document for the second function of the pair.
    #[arg(long)]
    w: PathBuf,
    /// Number of types to build.
    #[arg(long)]
    k: usize,
    #[command(flatten)]
    out: OutArg,
    /// Write the balance report here instead of stderr.
    #[arg(long)]
    report_out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum ReduceCmd {
    /// Item-budget construction.
    It {
        #[command(flatten)]
        common: ReduceArgs,
        /// Write the compatibility witness here instead of stderr.
        #[arg(long)]
        witness_out: Option<PathBuf>,
    },
    /// Value-cap construction.
    Vt {
        #[command(flatten)]
        common: ReduceArgs,
    },
}

#[derive(Args)]
struct RecoverArgs {
    /// Gap-instance document (must carry provenance).
    #[arg(long)]
    instance: PathBuf,
    /// Solution set as comma-separated item indices; empty or "none" for
    /// the empty set.
    #[arg(long)]
    solution: String,
}

#[derive(Subcommand)]
enum RecoverCmd {
    It {
        #[command(flatten)]
        common: RecoverArgs,
    },
    Vt {
        #[command(flatten)]
        common: RecoverArgs,
    },
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Check a compatibility witness against a gap instance.
    Compat {
        /// Gap-instance document.
        #[arg(long)]
        input: PathBuf,
        /// Witness document.
        #[arg(long)]
        witness: PathBuf,
    },
    /// Check the balance parameter against the construction's bound.
    Balance {
        /// Gap-instance document with provenance.
        #[arg(long)]
        input: PathBuf,
    },
    /// Check normalization, monotonicity, submodularity, and trivial items.
    Class {
        /// Valuation document.
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Subcommand)]
enum SolveCmd {
    /// Maximize v(S) - w(S) by exhaustive search.
    Odp {
        #[arg(long)]
        v: PathBuf,
        #[arg(long)]
        w: PathBuf,
    },
    /// Best achievable adjacent-gap ratio of a gap instance.
    Sadp {
        #[arg(long)]
        input: PathBuf,
    },
    /// Revenue-optimal menu for an explicit type distribution, by exact LP.
    Mdmdp {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Args)]
struct GameArgs {
    /// Even item count of the matching family (hidden sets are its
    /// half-size subsets).
    #[arg(long)]
    m: usize,
    /// Oracle queries allowed per trial.
    #[arg(long)]
    budget: usize,
    #[arg(long)]
    trials: usize,
    #[arg(long)]
    seed: u64,
    /// Strategy: zero, prober, or scanner.
    #[arg(long, default_value = "scanner")]
    alg: String,
    #[command(flatten)]
    out: OutArg,
}

#[derive(Subcommand)]
enum GameCmd {
    Value {
        #[command(flatten)]
        common: GameArgs,
    },
    Demand {
        #[command(flatten)]
        common: GameArgs,
    },
}

#[derive(Subcommand)]
enum ParamsCmd {
    /// Approximation quality carried through the reduction:
    /// alpha - (1 - alpha) d / (k - 1), floored at zero.
    Quality {
        /// Gap-approximation quality, e.g. 1/2.
        #[arg(long)]
        alpha: String,
        /// Balance parameter of the instance.
        #[arg(long)]
        d: String,
        #[arg(long)]
        k: usize,
    },
    /// Instance sizes that push the approximation bound below a target.
    Budget {
        #[arg(long)]
        m: usize,
        /// Target approximation eps in (0,1); k is then ceil(m^(2/eps)).
        #[arg(long)]
        eps: Option<String>,
        /// Explicit type count instead of deriving it from eps.
        #[arg(long)]
        k: Option<u64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let cap = resolve_cap(cli.cap)?;
    match cli.command {
        Command::Gen(cmd) => run_gen(cmd),
        Command::Reduce(cmd) => run_reduce(cmd, cap),
        Command::Recover(cmd) => run_recover(cmd, cap),
        Command::Verify(cmd) => run_verify(cmd, cap),
        Command::Solve(cmd) => run_solve(cmd, cap),
        Command::Game(cmd) => run_game(cmd, cap),
        Command::Params(cmd) => run_params(cmd),
    }
}

fn resolve_cap(flag: Option<usize>) -> Result<usize> {
    if let Some(cap) = flag {
        return Ok(cap);
    }
    match std::env::var(ENUM_CAP_ENV) {
        Ok(text) => text.trim().parse().map_err(|_| {
            Error::invalid(format!("{ENUM_CAP_ENV} must be an integer, got {text:?}"))
        }),
        Err(_) => Ok(DEFAULT_ENUM_CAP),
    }
}

fn emit(doc: &InstanceDocument, out: &OutArg) -> Result<()> {
    match &out.out {
        Some(path) => save_to_path(doc, path),
        None => std::io::stdout()
            .write_all(&save_document(doc))
            .map_err(|e| Error::Io(format!("writing stdout: {e}"))),
    }
}

fn rat_json(r: &Rational) -> serde_json::Value {
    json!({"den": r.denom().to_string(), "num": r.numer().to_string()})
}

fn parse_ratio(text: &str) -> Result<Rational> {
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n, d),
        None => (text, "1"),
    };
    let num = BigInt::from_str(num.trim())
        .map_err(|_| Error::invalid(format!("not a fraction: {text:?}")))?;
    let den = BigInt::from_str(den.trim())
        .map_err(|_| Error::invalid(format!("not a fraction: {text:?}")))?;
    if den.is_zero() {
        return Err(Error::invalid("zero denominator"));
    }
    Ok(Rational::new(num, den))
}

fn parse_solution_set(text: &str, ground: usize) -> Result<ItemSet> {
    let trimmed = text.trim();
    if trimmed.is_empty() || trimmed == "none" || trimmed == "empty" {
        return ItemSet::new(Vec::new(), ground);
    }
    let members = trimmed
        .split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|_| Error::invalid(format!("bad item index {part:?} in solution")))
        })
        .collect::<Result<Vec<_>>>()?;
    ItemSet::new(members, ground)
}

fn load_valuation(path: &PathBuf) -> Result<mdd_core::valuation::Valuation> {
    load_from_path(path)?.into_valuation()
}

fn run_gen(cmd: GenCmd) -> Result<ExitCode> {
    match cmd {
        GenCmd::Boxs { m, perturb: rank, out } => {
            let fam = boxs_family(m)?;
            let valuation = match rank {
                None => fam.base.clone(),
                Some(r) => perturb(&fam, &subset_unrank(m, r)?)?,
            };
            emit(&InstanceDocument::Valuation(valuation), &out)?;
        }
        GenCmd::Sat {
            m,
            cnf,
            num_vars,
            out,
        } => {
            let text = std::fs::read_to_string(&cnf)
                .map_err(|e| Error::Io(format!("reading {}: {e}", cnf.display())))?;
            let clauses: Vec<Vec<i32>> = serde_json::from_str(&text).map_err(|e| {
                Error::invalid(format!("{}: expected a JSON clause list: {e}", cnf.display()))
            })?;
            let nvars = match num_vars {
                Some(n) => n,
                None => clauses
                    .iter()
                    .flatten()
                    .map(|lit| lit.unsigned_abs() as usize)
                    .max()
                    .unwrap_or(1),
            };
            let fam = boxs_family(m)?;
            let cnf = Cnf::new(clauses, nvars)?;
            let valuation = sat_perturbed_valuation(&fam, cnf, nvars)?;
            emit(&InstanceDocument::Valuation(valuation), &out)?;
        }
        GenCmd::AppendixC { out } => {
            emit(&InstanceDocument::Valuation(appendix_counterexample()), &out)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn report_json(report: &ReductionReport) -> serde_json::Value {
    json!({
        "d": rat_json(&report.d),
        "full_values": report.full_values,
        "gaps": report.gaps,
    })
}

fn emit_aux(value: &serde_json::Value, path: &Option<PathBuf>) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, format!("{value}\n"))
            .map_err(|e| Error::Io(format!("writing {}: {e}", p.display()))),
        None => {
            eprintln!("{value}");
            Ok(())
        }
    }
}

fn run_reduce(cmd: ReduceCmd, cap: usize) -> Result<ExitCode> {
    let (common, witness_out, item_construction) = match cmd {
        ReduceCmd::It {
            common,
            witness_out,
        } => (common, witness_out, true),
        ReduceCmd::Vt { common } => (common, None, false),
    };
    let v = load_valuation(&common.v)?;
    let w = load_valuation(&common.w)?;
    let instance = if item_construction {
        build_it(&v, &w, common.k)?
    } else {
        build_vt(&v, &w, common.k, cap)?
    };
    let report = balancedness(&instance, cap)?;
    if item_construction {
        let witness = witness_for_it(&v, &w, common.k, cap)?;
        let doc = InstanceDocument::Witness(witness);
        match &witness_out {
            Some(path) => save_to_path(&doc, path)?,
            None => eprintln!(
                "{}",
                String::from_utf8_lossy(&save_document(&doc)).trim_end()
            ),
        }
    }
    emit_aux(&report_json(&report), &common.report_out)?;
    emit(&InstanceDocument::SadpInstance(instance), &common.out)?;
    Ok(ExitCode::SUCCESS)
}

fn run_recover(cmd: RecoverCmd, cap: usize) -> Result<ExitCode> {
    let (common, item_construction) = match cmd {
        RecoverCmd::It { common } => (common, true),
        RecoverCmd::Vt { common } => (common, false),
    };
    let instance = load_from_path(&common.instance)?.into_sadp_instance()?;
    let solution = parse_solution_set(&common.solution, instance.ground_size())?;
    let (set, value) = if item_construction {
        recover_from_it(&solution, &instance, cap)?
    } else {
        recover_from_vt(&solution, &instance, cap)?
    };
    println!("{}", json!({"set": set.members(), "value": value}));
    Ok(ExitCode::SUCCESS)
}

fn run_verify(cmd: VerifyCmd, cap: usize) -> Result<ExitCode> {
    match cmd {
        VerifyCmd::Compat { input, witness } => {
            let instance = load_from_path(&input)?.into_sadp_instance()?;
            let witness = load_from_path(&witness)?.into_witness()?;
            match check_c_compatibility(&instance, &witness, cap)? {
                WitnessCheck::Holds => {
                    println!("{}", json!({"holds": true}));
                    Ok(ExitCode::SUCCESS)
                }
                failure => {
                    println!(
                        "{}",
                        json!({"holds": false, "violation": format!("{failure:?}")})
                    );
                    Ok(ExitCode::from(1))
                }
            }
        }
        VerifyCmd::Balance { input } => {
            let instance = load_from_path(&input)?.into_sadp_instance()?;
            let prov = instance.provenance().ok_or_else(|| {
                Error::invalid("instance has no provenance; balance needs the source pair")
            })?;
            let m = prov.v.ground_size();
            let full = ItemSet::full(m);
            let bound = match prov.construction {
                Construction::ItemTruncation => {
                    let w_full = prov.w.value_with_cap(&full, cap)?;
                    Rational::from_integer(BigInt::from(2u64) * BigInt::from(m) * BigInt::from(w_full))
                }
                Construction::ValueTruncation => {
                    let v_full = prov.v.value_with_cap(&full, cap)?;
                    Rational::from_integer(BigInt::from(2u64) * BigInt::from(v_full))
                }
            };
            let report = balancedness(&instance, cap)?;
            let within = report.d <= bound;
            println!(
                "{}",
                json!({
                    "bound": rat_json(&bound),
                    "d": rat_json(&report.d),
                    "gaps": report.gaps,
                    "within": within,
                })
            );
            Ok(if within {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        VerifyCmd::Class { input } => {
            let valuation = load_from_path(&input)?.into_valuation()?;
            let report = valuation.check_properties(cap)?;
            let ok = report.satisfies_assumptions();
            println!(
                "{}",
                json!({
                    "monotone": report.monotone,
                    "monotone_witness": report.monotone_witness.as_ref().map(|w| format!("{w:?}")),
                    "normalized": report.normalized,
                    "satisfies_assumptions": ok,
                    "submodular": report.submodular,
                    "submodular_witness": report.submodular_witness.as_ref().map(|w| format!("{w:?}")),
                    "trivial_items": report.trivial_items,
                })
            );
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}

fn run_solve(cmd: SolveCmd, cap: usize) -> Result<ExitCode> {
    match cmd {
        SolveCmd::Odp { v, w } => {
            let v = load_valuation(&v)?;
            let w = load_valuation(&w)?;
            let (set, value) = brute_force_odp(&v, &w, cap)?;
            println!("{}", json!({"set": set.members(), "value": value}));
        }
        SolveCmd::Sadp { input } => {
            let instance = load_from_path(&input)?.into_sadp_instance()?;
            let (set, ratio) = sadp_opt(&instance, cap)?;
            println!(
                "{}",
                json!({"ratio": rat_json(&ratio), "set": set.members()})
            );
        }
        SolveCmd::Mdmdp { input, out } => {
            let distribution = load_from_path(&input)?.into_distribution()?;
            let (menu, revenue) = lp_optimal_mdmdp(&distribution, cap)?;
            eprintln!("{}", json!({"revenue": rat_json(&revenue)}));
            emit(&InstanceDocument::Menu(menu), &out)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run_game(cmd: GameCmd, cap: usize) -> Result<ExitCode> {
    let (common, value_game) = match cmd {
        GameCmd::Value { common } => (common, true),
        GameCmd::Demand { common } => (common, false),
    };
    let fam = boxs_family(common.m)?;
    let alg = builtin_algorithm(&common.alg)?;
    let transcript = if value_game {
        run_value_game(
            alg.as_ref(),
            &fam,
            common.budget,
            common.trials,
            common.seed,
            cap,
        )?
    } else {
        run_demand_game(
            alg.as_ref(),
            &fam,
            common.budget,
            common.trials,
            common.seed,
            cap,
        )?
    };
    emit(&InstanceDocument::Transcript(transcript), &common.out)?;
    Ok(ExitCode::SUCCESS)
}

fn run_params(cmd: ParamsCmd) -> Result<ExitCode> {
    match cmd {
        ParamsCmd::Quality { alpha, d, k } => {
            let alpha = parse_ratio(&alpha)?;
            let d = parse_ratio(&d)?;
            let q = quality_formula(&alpha, &d, k)?;
            println!("{q}");
        }
        ParamsCmd::Budget { m, eps, k } => {
            let budget = match (eps, k) {
                (Some(eps), None) => hardness_budget(m, &parse_ratio(&eps)?)?,
                (None, Some(k)) => hardness_budget_for_k(m, k)?,
                _ => {
                    return Err(Error::invalid(
                        "provide exactly one of --eps or --k",
                    ))
                }
            };
            println!(
                "{}",
                json!({
                    "bound": rat_json(&budget.bound),
                    "items": budget.items.to_string(),
                    "k": budget.k.to_string(),
                    "support": budget.support.to_string(),
                })
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}
