//! Command-line front end. Exit codes separate answers from failures so the
//! tool composes in scripts: 0 = yes (or success for artifact commands),
//! 1 = no, 2 = usage, parsing or validation problems, 3 = the oracle found a
//! q-monomial below the target degree while `--check-precondition` was set.

use crate::circuit::{parse, Circuit};
use crate::detect::{self, Decision, DetectConfig, DetectReport};
use crate::gf2d::field_for_degree;
use crate::group_algebra::{GroupAlgebraElement, GroupVector};
use crate::oracle::{self, DEFAULT_TERM_CAP};
use crate::reconstruct::reconstruct;
use crate::transform::{
    det_mod2, exact_independence_probability, independence_lower_bound, independence_probability,
    perm_mod2, z2_rank, CoefficientMatrix,
};
use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::PathBuf;

pub const EXIT_YES: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_ERROR: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;

#[derive(Parser)]
#[command(
    name = "qmono",
    version,
    about = "Tests whether a tree-like arithmetic circuit has a q-monomial of degree k"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Randomized one-sided test for a degree-k q-monomial.
    Test(TestArgs),
    /// Exact answer by brute-force sum-product expansion.
    Oracle(OracleArgs),
    /// Print the canonical sum-product expansion, one term per line.
    Expand(ExpandArgs),
    /// Print the reconstructed circuit with its z-variables.
    Reconstruct(ReconstructArgs),
    /// Verify the probabilistic building blocks; exits 0 iff all checks pass.
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct TestArgs {
    /// Circuit file in the .circ format.
    #[arg(short = 'c', long = "circuit")]
    circuit: PathBuf,
    #[arg(short = 'q')]
    q: u32,
    #[arg(short = 'k')]
    k: u32,
    /// Independent repetitions of the full loop budget.
    #[arg(long, conflicts_with = "confidence")]
    restarts: Option<u64>,
    /// Run enough restarts that a missing `yes` is wrong with at most this
    /// probability. Default 1e-3 when neither --restarts nor --confidence is
    /// given.
    #[arg(long)]
    confidence: Option<f64>,
    /// Master seed; omitted means a fresh random seed.
    #[arg(long, env = "QMONO_SEED")]
    seed: Option<u64>,
    /// Worker threads for the iteration loop.
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    json: bool,
    /// Verify with the expansion oracle that no q-monomial of degree < k
    /// exists before testing; exponential, guarded by --max-terms.
    #[arg(long)]
    check_precondition: bool,
    /// Term cap for oracle expansions.
    #[arg(long, default_value_t = DEFAULT_TERM_CAP)]
    max_terms: usize,
    /// Dump the first iteration's replacement plan as JSON to stderr.
    #[arg(long)]
    dump_plan: bool,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(short = 'c', long = "circuit")]
    circuit: PathBuf,
    #[arg(short = 'q')]
    q: u32,
    #[arg(short = 'k')]
    k: u32,
    #[arg(long, default_value_t = DEFAULT_TERM_CAP)]
    max_terms: usize,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ExpandArgs {
    #[arg(short = 'c', long = "circuit")]
    circuit: PathBuf,
    #[arg(long, default_value_t = DEFAULT_TERM_CAP)]
    max_terms: usize,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ReconstructArgs {
    #[arg(short = 'c', long = "circuit")]
    circuit: PathBuf,
    /// Write the z-variable and occurrence tables to this JSON file.
    #[arg(long)]
    provenance: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SelftestArgs {
    #[arg(long, env = "QMONO_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    json: bool,
}

pub fn main() -> i32 {
    run_cli(Cli::parse())
}

pub fn run_cli(cli: Cli) -> i32 {
    match cli.command {
        Command::Test(args) => cmd_test(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Expand(args) => cmd_expand(args),
        Command::Reconstruct(args) => cmd_reconstruct(args),
        Command::Selftest(args) => cmd_selftest(args),
    }
}

fn load_circuit(path: &PathBuf) -> Result<Circuit, i32> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        EXIT_ERROR
    })?;
    let mut c = parse(&text).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        EXIT_ERROR
    })?;
    if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
        c.set_name(stem);
    }
    Ok(c)
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| rand::rng().random())
}

fn print_report(report: &DetectReport, json: bool) {
    if json {
        println!("{}", serde_json::to_string_pretty(report).unwrap());
    } else {
        println!(
            "decision: {}",
            match report.decision {
                Decision::Yes => "yes",
                Decision::No => "no",
            }
        );
        println!("iterations_executed: {}", report.iterations_executed);
        match report.first_hit_iteration {
            Some(i) => println!("first_hit_iteration: {i}"),
            None => println!("first_hit_iteration: -"),
        }
        match report.restart_index {
            Some(i) => println!("restart_index: {i}"),
            None => println!("restart_index: -"),
        }
        println!("field_degree: {}", report.field_degree);
        println!("wall_time: {:.6}", report.wall_time);
    }
}

fn cmd_test(args: TestArgs) -> i32 {
    let c = match load_circuit(&args.circuit) {
        Ok(c) => c,
        Err(code) => return code,
    };

    if args.check_precondition {
        let p = match oracle::expand_with_cap(&c, args.max_terms) {
            Ok(p) => p,
            Err(e) => {
                eprintln!("error: precondition check failed: {e}");
                return EXIT_ERROR;
            }
        };
        if let Some(d) = oracle::min_q_monomial_degree(&p, args.q) {
            if d < args.k {
                eprintln!(
                    "error: precondition violated: minimum {0}-monomial degree is {d} < k = {1}; \
                     pad the circuit by {2} fresh variables first",
                    args.q,
                    args.k,
                    args.k - d
                );
                return EXIT_PRECONDITION;
            }
        }
    }

    let seed = resolve_seed(args.seed);
    let mut cfg = DetectConfig::new(args.q, args.k, seed);
    cfg.jobs = args.jobs;

    if args.dump_plan {
        match reconstruct(&c) {
            Ok(rc) => match detect::plan_for_iteration(&rc, &cfg, 0, 0) {
                Ok(plan) => eprintln!("{}", serde_json::to_string(&plan).unwrap()),
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_ERROR;
                }
            },
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_ERROR;
            }
        }
    }

    let result = match args.restarts {
        Some(n) => {
            cfg.restarts = n;
            detect::run(&c, &cfg)
        }
        None => {
            let confidence = args.confidence.unwrap_or(1e-3);
            detect::decision_with_confidence(&c, &cfg, confidence)
        }
    };
    match result {
        Ok(report) => {
            print_report(&report, args.json);
            match report.decision {
                Decision::Yes => EXIT_YES,
                Decision::No => EXIT_NO,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

fn cmd_oracle(args: OracleArgs) -> i32 {
    if args.q < 2 {
        eprintln!("error: q must be at least 2");
        return EXIT_ERROR;
    }
    let c = match load_circuit(&args.circuit) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let p = match oracle::expand_with_cap(&c, args.max_terms) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_ERROR;
        }
    };
    let witness = oracle::q_monomial_witness(&p, args.q, args.k);
    if args.json {
        println!(
            "{}",
            serde_json::json!({
                "decision": if witness.is_some() { "yes" } else { "no" },
                "witness": witness.map(|m| m.to_string()),
                "q": args.q,
                "k": args.k,
            })
        );
    } else {
        match witness {
            Some(m) => println!("yes: {m}"),
            None => println!("no"),
        }
    }
    if witness.is_some() {
        EXIT_YES
    } else {
        EXIT_NO
    }
}

fn cmd_expand(args: ExpandArgs) -> i32 {
    let c = match load_circuit(&args.circuit) {
        Ok(c) => c,
        Err(code) => return code,
    };
    match oracle::expand_with_cap(&c, args.max_terms) {
        Ok(p) => {
            if args.json {
                let terms: Vec<serde_json::Value> = p
                    .terms()
                    .map(|(m, coef)| {
                        serde_json::json!({
                            "monomial": m.to_string(),
                            "coefficient": coef.to_string(),
                        })
                    })
                    .collect();
                println!("{}", serde_json::json!({ "terms": terms }));
            } else {
                print!("{p}");
            }
            EXIT_YES
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

fn cmd_reconstruct(args: ReconstructArgs) -> i32 {
    let c = match load_circuit(&args.circuit) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let rc = match reconstruct(&c) {
        Ok(rc) => rc,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_ERROR;
        }
    };
    if let Some(path) = &args.provenance {
        if let Err(e) = std::fs::write(path, rc.provenance_json().to_string()) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return EXIT_ERROR;
        }
    }
    if args.json {
        println!(
            "{}",
            serde_json::json!({
                "circuit": rc.circuit.serialize(),
                "z_vars": rc.z_vars,
                "x_occurrences": rc.x_occurrences,
            })
        );
    } else {
        print!("{}", rc.circuit.serialize());
    }
    EXIT_YES
}

struct Check {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn cmd_selftest(args: SelftestArgs) -> i32 {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut checks: Vec<Check> = Vec::new();

    // permanent parity equals determinant parity
    {
        let mut agree = true;
        for _ in 0..2_000 {
            let n = rng.random_range(1..=7usize);
            let rows: Vec<Vec<bool>> = (0..n)
                .map(|_| (0..n).map(|_| rng.random::<bool>()).collect())
                .collect();
            let m = CoefficientMatrix::new(rows);
            if perm_mod2(&m) != det_mod2(&m) {
                agree = false;
                break;
            }
        }
        checks.push(Check {
            name: "perm_mod2 equals det_mod2",
            passed: agree,
            detail: "2000 random 0/1 matrices up to 7x7".into(),
        });
    }

    // independence probability floor and exact anchors
    {
        let trials = 20_000u64;
        let mut ok = true;
        let mut worst = f64::INFINITY;
        for k in 1..=8u32 {
            let est = independence_probability(k, trials, &mut rng);
            let sigma = (0.28 * 0.72 / trials as f64).sqrt();
            worst = worst.min(est);
            if est < 0.28 - 3.0 * sigma {
                ok = false;
            }
        }
        let anchors = (exact_independence_probability(1) - 0.5).abs() < 1e-12
            && (exact_independence_probability(2) - 0.375).abs() < 1e-12
            && (independence_lower_bound() - 0.288788).abs() < 1e-6;
        checks.push(Check {
            name: "random vectors independent with probability > 0.28",
            passed: ok && anchors,
            detail: format!("k <= 8, {trials} trials each, min estimate {worst:.5}"),
        });
    }

    // group-algebra annihilation identities
    {
        let mut ok = true;
        'outer: for k in 1..=6u32 {
            let f = field_for_degree(k).expect("field");
            for bits in 1..(1u32 << k) {
                let w = GroupAlgebraElement::from_vector_plus_v0(f, GroupVector::new(k, bits));
                if !w.mul(&w).is_zero() {
                    ok = false;
                    break 'outer;
                }
            }
        }
        // product of (v_i + v0) vanishes iff the v_i are dependent
        let mut products_ok = true;
        let k = 3u32;
        let f = field_for_degree(k).expect("field");
        for a in 1..(1u32 << k) {
            for b in 1..(1u32 << k) {
                for c in 1..(1u32 << k) {
                    let prod = GroupAlgebraElement::from_vector_plus_v0(f, GroupVector::new(k, a))
                        .mul(&GroupAlgebraElement::from_vector_plus_v0(
                            f,
                            GroupVector::new(k, b),
                        ))
                        .mul(&GroupAlgebraElement::from_vector_plus_v0(
                            f,
                            GroupVector::new(k, c),
                        ));
                    let dependent = z2_rank(&[a as u64, b as u64, c as u64]) < 3;
                    if prod.is_zero() != dependent {
                        products_ok = false;
                    }
                }
            }
        }
        checks.push(Check {
            name: "group-algebra annihilation",
            passed: ok && products_ok,
            detail: "(v+v0)^2 = 0 for k <= 6; triple products vanish iff dependent (k=3)".into(),
        });
    }

    // fast product against the naive convolution
    {
        let mut ok = true;
        for k in 1..=6u32 {
            let f = field_for_degree(k).expect("field");
            for _ in 0..50 {
                let coeffs: Vec<_> = (0..1usize << k)
                    .map(|_| f.random_element(&mut rng))
                    .collect();
                let u = GroupAlgebraElement::from_coeffs(f, k, coeffs);
                let coeffs: Vec<_> = (0..1usize << k)
                    .map(|_| f.random_element(&mut rng))
                    .collect();
                let v = GroupAlgebraElement::from_coeffs(f, k, coeffs);
                if u.mul(&v) != u.mul_naive(&v) {
                    ok = false;
                }
            }
        }
        checks.push(Check {
            name: "split product agrees with naive convolution",
            passed: ok,
            detail: "50 random pairs per k <= 6".into(),
        });
    }

    let all_passed = checks.iter().all(|c| c.passed);
    if args.json {
        let body: Vec<serde_json::Value> = checks
            .iter()
            .map(|c| {
                serde_json::json!({
                    "name": c.name,
                    "passed": c.passed,
                    "detail": c.detail,
                })
            })
            .collect();
        println!(
            "{}",
            serde_json::json!({ "checks": body, "all_passed": all_passed })
        );
    } else {
        for c in &checks {
            println!(
                "{} {} ({})",
                if c.passed { "ok  " } else { "FAIL" },
                c.name,
                c.detail
            );
        }
    }
    if all_passed {
        EXIT_YES
    } else {
        EXIT_NO
    }
}
