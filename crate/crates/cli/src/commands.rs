use std::fs;
use std::path::Path;

use designforge::designs::{
    format_matrix, load_fixture_dir, parse_matrix, verify as verify_design, DesignFamily,
    InstanceManifest, InstanceSpec,
};
use designforge::harness::{
    default_parallelism, exec_batch, execute_run, run_manifest, BatchPlan, HarnessRunner,
    RunStatus,
};
use designforge::heuristics::{Algorithm, Budget};
use designforge::tuner::{hyper_tune, hyperparm_grid, Assignment, TuneProfile};
use serde::Serialize;
use serde_json::json;

use crate::{
    BatchArgs, BudgetArgs, FixturesArgs, Format, InstanceArgs, SolveArgs, TuneArgs, VerifyArgs,
    EXIT_INVALID, EXIT_OK, EXIT_UNSOLVED, EXIT_USAGE,
};

pub struct Failure {
    pub code: u8,
    pub message: String,
}

fn usage(message: impl ToString) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.to_string(),
    }
}

type CmdResult = Result<u8, Failure>;

const DEFAULT_SECONDS: f64 = 10.0;
const DEFAULT_SEEDS: usize = 4;

fn instance(args: &InstanceArgs) -> Result<InstanceSpec, Failure> {
    InstanceSpec::parse_assignments(args.family, &args.params).map_err(usage)
}

fn budget(args: &BudgetArgs) -> Result<Budget, Failure> {
    match (args.time, args.iters) {
        (_, Some(n)) => Ok(Budget::Iterations(n)),
        (Some(t), None) if t > 0.0 && t.is_finite() => Ok(Budget::seconds(t)),
        (Some(t), None) => Err(usage(format!("--time must be positive, got {t}"))),
        (None, None) => Ok(Budget::seconds(DEFAULT_SECONDS)),
    }
}

fn algorithm(name: Option<&str>, family: DesignFamily) -> Result<Algorithm, Failure> {
    let alg = match name {
        Some(n) => n.parse::<Algorithm>().map_err(usage)?,
        None => Algorithm::default_for(family),
    };
    if !alg.supports(family) {
        return Err(usage(format!("{alg} does not support {family}")));
    }
    Ok(alg)
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize")
}

fn manifest(path: &Path) -> Result<Vec<InstanceManifest>, Failure> {
    let entries = InstanceManifest::parse_list(&read(path)?)
        .map_err(|e| usage(format!("{}: {e}", path.display())))?;
    if entries.is_empty() {
        return Err(usage(format!("{}: manifest lists no instances", path.display())));
    }
    Ok(entries)
}

fn manifest_instances(entries: &[InstanceManifest]) -> Result<Vec<InstanceSpec>, Failure> {
    entries.iter().map(|e| e.instance().map_err(usage)).collect()
}

fn seeds(flag: Option<usize>, entries: &[InstanceManifest]) -> Result<usize, Failure> {
    let n = flag
        .or_else(|| entries.iter().filter_map(|e| e.seeds).max().map(|s| s as usize))
        .unwrap_or(DEFAULT_SEEDS);
    if n == 0 {
        return Err(usage("at least one seed per instance is needed"));
    }
    Ok(n)
}

pub fn verify(args: VerifyArgs) -> CmdResult {
    let spec = instance(&args.instance)?;
    let text = read(&args.input)?;
    let matrix = parse_matrix(&text).map_err(|e| usage(format!("{}: {e}", args.input.display())))?;
    let report = verify_design(&spec, &matrix).map_err(usage)?;
    match args.format {
        Format::Json => println!(
            "{}",
            to_json(&json!({ "instance": spec, "report": report }))
        ),
        Format::Text => {
            if report.valid {
                println!("valid {spec}");
            } else {
                let violation = report.violation.as_ref().expect("invalid reports carry a violation");
                match report.violated_pairs {
                    Some(n) => println!("invalid {spec}: {violation} ({n} violating row pairs)"),
                    None => println!("invalid {spec}: {violation}"),
                }
            }
        }
    }
    Ok(if report.valid { EXIT_OK } else { EXIT_INVALID })
}

pub fn solve(args: SolveArgs) -> CmdResult {
    let spec = instance(&args.instance)?;
    let alg = algorithm(args.algorithm.as_deref(), spec.family())?;
    let budget = budget(&args.budget)?;
    let hyper = Assignment::parse(&args.hyper).map_err(usage)?;
    let hyper = alg.resolve(&hyper).map_err(usage)?;
    let record = execute_run(&alg, &spec, args.seed, budget, &hyper);
    if record.status == RunStatus::Error {
        return Err(usage(record.error.unwrap_or_else(|| "solver failed".into())));
    }
    if let (Some(path), Some(m), true) = (&args.output, &record.solution, record.verified) {
        write(path, &format_matrix(m))?;
    }
    match args.format {
        Format::Json => println!("{}", to_json(&record)),
        Format::Text => {
            if let (Some(m), true) = (&record.solution, record.verified) {
                print!("{}", format_matrix(m));
            }
        }
    }
    let code = match record.status {
        RunStatus::Solved => {
            eprintln!(
                "solved {spec} with {alg} (seed {}) in {:.3} s, {} iterations",
                args.seed,
                record.elapsed.as_secs_f64(),
                record.iterations
            );
            EXIT_OK
        }
        RunStatus::Timeout => {
            eprintln!(
                "unsolved: budget exhausted after {} iterations, lowest cost {}",
                record.iterations, record.final_cost
            );
            EXIT_UNSOLVED
        }
        RunStatus::Infeasible => {
            eprintln!(
                "unsolved: exhausted search tree after {} iterations; no {spec} exists",
                record.iterations
            );
            EXIT_UNSOLVED
        }
        RunStatus::Unverified => {
            eprintln!(
                "solver returned a design the verifier rejects: {}",
                record.error.as_deref().unwrap_or("unknown violation")
            );
            EXIT_INVALID
        }
        RunStatus::Error => unreachable!("handled above"),
    };
    Ok(code)
}

pub fn tune(args: TuneArgs) -> CmdResult {
    let alg = algorithm(args.algorithm.as_deref(), args.family)?;
    let profile = TuneProfile::named(&args.profile)
        .ok_or_else(|| usage(format!("unknown profile `{}` (desk or full)", args.profile)))?;
    let gridsize = args.grid_size.unwrap_or(profile.gridsize);
    let init_time = args.init_time.unwrap_or(profile.init_runtime);
    let scale = args.scale.unwrap_or(profile.scale);
    let entries = manifest(&args.manifest)?;
    let instances = manifest_instances(&entries)?;
    if let Some(bad) = instances.iter().find(|i| i.family() != args.family) {
        return Err(usage(format!(
            "manifest instance {bad} does not belong to family {}",
            args.family
        )));
    }
    let grid = hyperparm_grid(&alg.hyper_specs(), gridsize).map_err(usage)?;
    let mut runner = HarnessRunner {
        solver: &alg,
        instances,
        seeds_per_instance: seeds(args.seeds, &entries)?,
        seed_base: args.seed_base,
        parallelism: args.parallelism.unwrap_or_else(default_parallelism),
    };
    let report = hyper_tune(&mut runner, grid, init_time, scale).map_err(usage)?;
    if let Some(path) = &args.report {
        write(path, &to_json(&report))?;
    }
    let winner = &report.winner;
    match args.format {
        Format::Json => {
            let rounds: Vec<_> = report
                .rounds
                .iter()
                .map(|r| {
                    json!({
                        "budget_s": r.budget_s,
                        "evaluated": r.entries.len(),
                        "best_score": r.entries[0].score,
                    })
                })
                .collect();
            println!(
                "{}",
                to_json(&json!({
                    "family": args.family,
                    "algorithm": alg.name(),
                    "assignment": winner.assignment,
                    "score": winner.score,
                    "rounds": rounds,
                }))
            );
        }
        Format::Text => {
            for (i, r) in report.rounds.iter().enumerate() {
                println!(
                    "round {}: {} assignments at {} s, best {} (score {:.4})",
                    i + 1,
                    r.entries.len(),
                    r.budget_s,
                    r.entries[0].assignment,
                    r.entries[0].score
                );
            }
            println!("best: {}", winner.assignment);
            println!("score: {:.4}", winner.score);
        }
    }
    Ok(EXIT_OK)
}

pub fn batch(args: BatchArgs) -> CmdResult {
    let alg: Algorithm = args.algorithm.parse().map_err(usage)?;
    let entries = manifest(&args.manifest)?;
    let budget = budget(&args.budget)?;
    let hyper = Assignment::parse(&args.hyper).map_err(usage)?;
    let hyper = alg.resolve(&hyper).map_err(usage)?;
    let plan = BatchPlan {
        instances: manifest_instances(&entries)?,
        seeds_per_instance: seeds(args.seeds, &entries)?,
        seed_base: args.seed_base,
        budget,
        parallelism: args.parallelism.unwrap_or_else(default_parallelism),
    };
    let records = exec_batch(&plan, &alg, &hyper).map_err(usage)?;
    let maxtime = match budget {
        Budget::WallClock(d) => Some(d.as_secs_f64()),
        Budget::Iterations(_) => None,
    };
    let report = run_manifest(records, maxtime);
    let json = to_json(&report);
    if let Some(path) = &args.output {
        write(path, &json)?;
    }
    match args.format {
        Format::Json => println!("{json}"),
        Format::Text => {
            for r in &report.records {
                let elapsed = r
                    .reported_elapsed()
                    .map_or_else(String::new, |t| format!(" {t:.3} s"));
                println!(
                    "{} seed {} {}{} {} iterations",
                    r.instance,
                    r.seed,
                    r.status.as_str(),
                    elapsed,
                    r.iterations
                );
            }
            println!("solve rate: {}", report.summary.solve_rate);
        }
    }
    let has = |s: RunStatus| report.records.iter().any(|r| r.status == s);
    Ok(if has(RunStatus::Error) {
        EXIT_USAGE
    } else if has(RunStatus::Unverified) {
        EXIT_INVALID
    } else if report.records.iter().all(|r| r.verified) {
        EXIT_OK
    } else {
        EXIT_UNSOLVED
    })
}

pub fn fixtures(args: FixturesArgs) -> CmdResult {
    let fixtures = load_fixture_dir(&args.dir).map_err(usage)?;
    let mut rows = Vec::with_capacity(fixtures.len());
    let mut failed = 0;
    for f in &fixtures {
        let problem = match verify_design(&f.instance, &f.matrix) {
            Err(e) => Some(e.to_string()),
            Ok(r) if !r.valid => r.violation.map(|v| v.to_string()),
            Ok(_) if f.checksum_matches == Some(false) => Some("checksum mismatch".to_string()),
            Ok(_) => None,
        };
        if problem.is_some() {
            failed += 1;
        }
        if args.format == Format::Text {
            match &problem {
                None => println!("PASS {} {}", f.file, f.instance),
                Some(p) => println!("FAIL {} {}: {p}", f.file, f.instance),
            }
        }
        rows.push(json!({
            "file": f.file,
            "instance": f.instance,
            "valid": problem.is_none(),
            "checksum_matches": f.checksum_matches,
            "problem": problem,
        }));
    }
    match args.format {
        Format::Json => println!(
            "{}",
            to_json(&json!({
                "fixtures": rows,
                "passed": fixtures.len() - failed,
                "failed": failed,
            }))
        ),
        Format::Text => println!("{}/{} fixtures pass", fixtures.len() - failed, fixtures.len()),
    }
    Ok(if failed == 0 { EXIT_OK } else { EXIT_INVALID })
}
