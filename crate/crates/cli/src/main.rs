//! `conslaw`: command-line front end.
//!
//! Output files written under `--out-dir`:
//!
//! * `<scenario>.json`: the run summary, one record per check with its drift,
//!   tolerance, pass flag and the CSV file holding its series.
//! * `<scenario>__<check>.csv`: `t,re_kappa,im_kappa,drift` rows.
//! * `reproduce-<name>.json`, `dirac.json`: full reports.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use conslaw::adjoint::{
    adjoint_factorization, classify_adjointness, formal_adjoint, semi_conjugacy_solve, SolverConfig,
};
use conslaw::current::concomitant_flux;
use conslaw::dirac::suite::dirac_suite;
use conslaw::linalg::rounded;
use conslaw::opcore::{matrix_text, to_dsl};
use conslaw::operators::{resolve, OPERATOR_NAMES};
use conslaw::reproduce::{reproduce, Overrides, Reproduction, BUNDLES, SCENARIO_FILES};
use conslaw::scenario::{run, RunReport, Scenario};
use conslaw::symmetry::catalog::ENTRIES;
use rayon::prelude::*;
use serde_json::json;

#[derive(Parser)]
#[command(name = "conslaw", version, about = "Conservation laws of linear PDE systems from their symmetries")]
struct Cli {
    /// Seed for the conjugacy solver and the symmetry checks.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Scenarios run in parallel.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Directory for CSV series and JSON summaries.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Overrides the tolerance of every conserved check.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Formal adjoint, classification and factorization of an operator.
    Adjoint { operator: String },
    /// Conjugators A1, A2 with [M^α]† = A2 M^α A1⁻¹.
    Conjugacy { operator: String },
    /// The current X with Div X = Q·L[P] − L*[Q]·P.
    Current { operator: String },
    /// Run scenario files.
    Verify {
        #[arg(required = true)]
        scenarios: Vec<PathBuf>,
    },
    /// Gamma algebra, spinors, Fock space and the continuum charges.
    Dirac,
    /// Run bundled reproductions by name, or `all`.
    Reproduce {
        #[arg(required = true)]
        names: Vec<String>,
    },
    /// Bundles, operators and symmetries available by name.
    List,
}

type CliResult = Result<bool, String>;

fn solver_config(seed: Option<u64>) -> SolverConfig {
    SolverConfig {
        seed: seed.unwrap_or(0),
        ..Default::default()
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), String> {
    std::fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| format!("{}: {e}", path.display()))
}

fn file_stem(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' { c } else { '_' })
        .collect()
}

fn adjoint_cmd(spec: &str, seed: Option<u64>) -> CliResult {
    let l = resolve(spec).map_err(|e| e.to_string())?;
    println!("L  = {}", to_dsl(&l));
    println!("L* = {}", to_dsl(&formal_adjoint(&l)));
    match classify_adjointness(&l) {
        Ok(a) => println!("classification: {a}"),
        Err(e) => println!("classification: {e}"),
    }
    let cfg = solver_config(seed);
    match semi_conjugacy_solve(&l, &cfg).and_then(|p| adjoint_factorization(&l, p)) {
        Ok(f) => {
            println!("L* = A2 · P L P · A1⁻¹ with");
            println!("  A1 = {}", matrix_text(&rounded(&f.pair.a1)));
            println!("  A2 = {}", matrix_text(&rounded(&f.pair.a2)));
            println!("  P reflects {}", f.pair.mask_label());
            println!("  symbol residual {:.3e}", f.symbol_residual(&l, 50, cfg.seed));
            Ok(true)
        }
        Err(e) => {
            println!("no factorization: {e}");
            Ok(false)
        }
    }
}

fn conjugacy_cmd(spec: &str, seed: Option<u64>) -> CliResult {
    let l = resolve(spec).map_err(|e| e.to_string())?;
    match semi_conjugacy_solve(&l, &solver_config(seed)) {
        Ok(p) => {
            println!("A1 = {}", matrix_text(&rounded(&p.a1)));
            println!("A2 = {}", matrix_text(&rounded(&p.a2)));
            println!("parity reflects {}", p.mask_label());
            println!("residual {:.3e}", p.residual(&l));
            Ok(true)
        }
        Err(e) => {
            println!("{e}");
            Ok(false)
        }
    }
}

fn current_cmd(spec: &str) -> CliResult {
    let l = resolve(spec).map_err(|e| e.to_string())?;
    let flux = concomitant_flux(&l).map_err(|e| e.to_string())?;
    println!("{}", flux.to_jet_string());
    let exact = flux.defect(&l).is_zero();
    println!("Div X − Π_L = 0: {exact}");
    Ok(exact)
}

fn print_report(r: &RunReport) {
    println!("{} [{}]", r.scenario, r.anchor);
    for c in &r.checks {
        let rel = if c.control { ">=" } else { "<=" };
        println!(
            "  {}: drift {:.3e} ({rel} {:.0e}) {}",
            c.symmetry,
            c.drift,
            c.tolerance,
            if c.pass { "pass" } else { "FAIL" }
        );
    }
}

/// CSV per check plus the JSON summary naming them.
fn write_run(dir: &Path, r: &RunReport) -> Result<(), String> {
    let stem = file_stem(&r.scenario);
    let mut checks = Vec::new();
    for c in &r.checks {
        let csv = format!("{stem}__{}.csv", file_stem(&c.symmetry));
        write_file(dir, &csv, &c.series.to_csv())?;
        checks.push(json!({
            "symmetry": c.symmetry,
            "control": c.control,
            "drift": c.drift,
            "tolerance": c.tolerance,
            "pass": c.pass,
            "series": csv,
        }));
    }
    let summary = json!({
        "scenario": r.scenario,
        "anchor": r.anchor,
        "operator": r.operator,
        "adjointness": r.adjointness,
        "parity": r.parity,
        "seed": r.seed,
        "pass": r.pass,
        "checks": checks,
    });
    write_file(dir, &format!("{stem}.json"), &serde_json::to_string_pretty(&summary).unwrap())
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool, String> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| e.to_string())
}

fn verify_cmd(cli: &Cli, files: &[PathBuf]) -> CliResult {
    let ov = Overrides {
        seed: cli.seed,
        tolerance: cli.tolerance,
    };
    let mut scenarios = Vec::new();
    for f in files {
        let src = std::fs::read_to_string(f).map_err(|e| format!("{}: {e}", f.display()))?;
        let mut sc = Scenario::parse(&src).map_err(|e| format!("{}: {e}", f.display()))?;
        ov.apply(&mut sc);
        scenarios.push(sc);
    }
    let results: Vec<_> = pool(cli.jobs)?.install(|| scenarios.par_iter().map(run).collect());
    let mut ok = true;
    for (sc, res) in scenarios.iter().zip(results) {
        match res {
            Ok(r) => {
                print_report(&r);
                if let Some(dir) = &cli.out_dir {
                    write_run(dir, &r)?;
                }
                ok &= r.pass;
            }
            Err(e) => {
                eprintln!("{}: {e}", sc.name);
                ok = false;
            }
        }
    }
    Ok(ok)
}

fn reproduce_cmd(cli: &Cli, names: &[String]) -> CliResult {
    let names: Vec<String> = if names.iter().any(|n| n == "all") {
        BUNDLES.iter().map(|(n, _)| n.to_string()).collect()
    } else {
        names.to_vec()
    };
    let ov = Overrides {
        seed: cli.seed,
        tolerance: cli.tolerance,
    };
    let results: Vec<Result<Reproduction, String>> = pool(cli.jobs)?.install(|| {
        names
            .par_iter()
            .map(|n| reproduce(n, &ov).map_err(|e| format!("{n}: {e}")))
            .collect()
    });
    let mut ok = true;
    for res in results {
        let rep = res?;
        println!("== {}", rep.name);
        for l in &rep.lines {
            println!("{l}");
        }
        println!("{}: {}", rep.name, if rep.pass { "PASS" } else { "FAIL" });
        if let Some(dir) = &cli.out_dir {
            for r in &rep.runs {
                write_run(dir, r)?;
            }
            write_file(dir, &format!("reproduce-{}.json", rep.name), &rep.summary_json())?;
        }
        ok &= rep.pass;
    }
    Ok(ok)
}

fn dirac_cmd(cli: &Cli) -> CliResult {
    let suite = dirac_suite(cli.seed.unwrap_or(0), true).map_err(|e| e.to_string())?;
    let text = serde_json::to_string_pretty(&suite).unwrap();
    println!("{text}");
    if let Some(dir) = &cli.out_dir {
        write_file(dir, "dirac.json", &text)?;
    }
    Ok(suite.pass())
}

fn list_cmd() -> CliResult {
    println!("reproductions:");
    for (n, a) in BUNDLES {
        println!("  {n:<14} {a}");
    }
    println!("bundled scenarios:");
    for (n, _) in SCENARIO_FILES {
        println!("  {n}");
    }
    println!("operators:");
    for n in OPERATOR_NAMES {
        println!("  {n}");
    }
    println!("symmetries:");
    for (n, d) in ENTRIES {
        println!("  {n:<34} {d}");
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Adjoint { operator } => adjoint_cmd(operator, cli.seed),
        Command::Conjugacy { operator } => conjugacy_cmd(operator, cli.seed),
        Command::Current { operator } => current_cmd(operator),
        Command::Verify { scenarios } => verify_cmd(&cli, scenarios),
        Command::Dirac => dirac_cmd(&cli),
        Command::Reproduce { names } => reproduce_cmd(&cli, names),
        Command::List => list_cmd(),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
