//! `fibcat`: load an instance file, run suites or extensions, or generate corpora.
//!
//! Exit codes: 0 all requested checks pass, 1 some check fails, 2 bad input.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, ValueEnum};
use serde_json::{json, Value};

use fibcat::generators::{
    blueprint_base, mutation_battery, oracle_tables, random_twist, strict_presheaf_instance, twist_instance, twist_oracle,
    with_form, Blueprint, Form, Lattice, Marking,
};
use fibcat::instance::{emit, load_str, to_json, Instance};
use fibcat::report::Report;
use fibcat::suites::{self, Extension, Suite};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Gen {
    Strict,
    Twist,
    Mutate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FormArg {
    Full,
    Skeleton,
    Core,
}

#[derive(Parser, Debug)]
#[command(name = "fibcat", version, about = "Coherence checks for finite fibered categories and external tensor structures")]
struct Args {
    /// Instance file (JSON) to check or extend.
    input: Option<PathBuf>,

    /// Suite to run.
    #[arg(long, value_parser = parse_suite)]
    check: Option<Suite>,

    /// Fill in the full structure from skeleton or core data.
    #[arg(long, value_parser = parse_extension)]
    extend: Option<Extension>,

    /// Where to write the extended or generated instance; a directory for `--gen mutate`.
    #[arg(long)]
    emit: Option<PathBuf>,

    /// Generate an instance instead of reading one.
    #[arg(long, value_enum)]
    gen: Option<Gen>,

    #[arg(long, default_value_t = 7)]
    seed: u64,

    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Base lattice for generation: chainN or powersetN.
    #[arg(long, default_value = "powerset2")]
    base: String,

    /// Fiber blueprint for generation.
    #[arg(long, default_value = "bz2")]
    fiber: String,

    /// Marking of the generated base: all, closed, smooth or split.
    #[arg(long, default_value = "all")]
    marking: String,

    /// Presentation of generated transitions and cells.
    #[arg(long, value_enum, default_value_t = FormArg::Full)]
    form: FormArg,

    /// Number of mutants for `--gen mutate`.
    #[arg(long, default_value_t = 100)]
    count: usize,

    /// For `--gen twist`: also write the predicted full tables here.
    #[arg(long)]
    oracle: Option<PathBuf>,
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    Suite::EACH
        .into_iter()
        .chain([Suite::All])
        .find(|x| x.name() == s)
        .ok_or_else(|| format!("unknown suite {s:?}"))
}

fn parse_extension(s: &str) -> Result<Extension, String> {
    match s {
        "skeleton" => Ok(Extension::Skeleton),
        "ets-skeleton" => Ok(Extension::EtsSkeleton),
        "core" => Ok(Extension::Core),
        "etc" => Ok(Extension::Etc),
        _ => Err(format!("unknown extension {s:?}; expected skeleton, ets-skeleton, core or etc")),
    }
}

/// An outcome that ends the run with a message and an exit code.
struct Stop(u8, String);

fn input_error(e: impl std::fmt::Display) -> Stop {
    Stop(2, e.to_string())
}

fn write(path: &Path, text: &str) -> Result<(), Stop> {
    std::fs::write(path, text).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn output(args: &Args, text: &str) -> Result<(), Stop> {
    match &args.emit {
        Some(p) => write(p, text),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn form(f: FormArg) -> Form {
    match f {
        FormArg::Full => Form::Full,
        FormArg::Skeleton => Form::Skeleton,
        FormArg::Core => Form::Core,
    }
}

fn generate(args: &Args, g: Gen) -> Result<u8, Stop> {
    let lattice: Lattice = args.base.parse().map_err(input_error)?;
    let marking: Marking = args.marking.parse().map_err(input_error)?;
    let bp: Blueprint = args.fiber.parse().map_err(input_error)?;
    match g {
        Gen::Strict => {
            let inst = strict_presheaf_instance(blueprint_base(lattice, marking, bp), bp).map_err(input_error)?;
            let inst = with_form(&inst, form(args.form)).map_err(input_error)?;
            output(args, &to_json(&emit(&inst)))?;
        }
        Gen::Twist => {
            let strict = strict_presheaf_instance(blueprint_base(lattice, marking, bp), bp).map_err(input_error)?;
            let spec = random_twist(&strict, args.seed);
            let full = twist_instance(&strict, &spec).map_err(input_error)?;
            if let Some(p) = &args.oracle {
                let o = twist_oracle(&strict, &full, bp, &spec).map_err(input_error)?;
                write(p, &oracle_tables(&full, &o).to_json())?;
            }
            let inst = with_form(&full, form(args.form)).map_err(input_error)?;
            output(args, &to_json(&emit(&inst)))?;
        }
        Gen::Mutate => {
            let dir = args.emit.as_ref().ok_or_else(|| input_error("--gen mutate needs --emit DIR"))?;
            std::fs::create_dir_all(dir).map_err(|e| input_error(format!("{}: {e}", dir.display())))?;
            let battery = mutation_battery(args.seed, args.count).map_err(input_error)?;
            let mut manifest = Vec::new();
            for (k, m) in battery.mutants.iter().take(args.count).enumerate() {
                let inst = battery.instance(m).map_err(input_error)?;
                let file = format!("mutant-{k:03}.json");
                write(&dir.join(&file), &to_json(&emit(&inst)))?;
                manifest.push(json!({ "file": file, "mutation": m.label, "family": m.family, "coverable": m.coverable }));
            }
            let text = serde_json::to_string_pretty(&json!({ "seed": args.seed, "mutants": manifest })).expect("manifest serializes");
            write(&dir.join("manifest.json"), &text)?;
            println!("wrote {} mutants to {}", manifest.len(), dir.display());
        }
    }
    Ok(0)
}

fn render(args: &Args, inst: &Instance, reports: &[Report], timing: &BTreeMap<String, u128>, extension: Option<&str>) -> String {
    let passed = reports.iter().all(|r| r.passed());
    match args.format {
        Format::Json => {
            let v: Value = json!({
                "input": args.input.as_ref().map(|p| p.display().to_string()),
                "instance": inst.name,
                "seed": inst.seed,
                "extension": extension,
                "passed": passed,
                "reports": reports,
                "timing_ms": timing,
            });
            serde_json::to_string_pretty(&v).expect("reports serialize")
        }
        Format::Text => {
            let mut s = format!("instance {}", inst.name);
            if let Some(seed) = inst.seed {
                s.push_str(&format!(" (seed {seed})"));
            }
            s.push('\n');
            if let Some(e) = extension {
                s.push_str(&format!("extended: {e}\n"));
            }
            for r in reports {
                s.push_str(&r.to_string());
            }
            s.push_str(if passed { "PASSED\n" } else { "FAILED\n" });
            for (k, ms) in timing {
                s.push_str(&format!("time {k}: {ms} ms\n"));
            }
            s
        }
    }
}

fn check(args: &Args) -> Result<u8, Stop> {
    let path = args.input.as_ref().ok_or_else(|| input_error("no input file; pass a path or use --gen"))?;
    let text = std::fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    let mut inst = load_str(&text).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    if args.check.is_none() && args.extend.is_none() {
        return Err(input_error("nothing to do; pass --check or --extend"));
    }
    let mut reports = Vec::new();
    let mut timing = BTreeMap::new();
    let mut code = 0;
    let mut extension = None;
    if let Some(ext) = args.extend {
        let t = Instant::now();
        match suites::extend(&inst, ext) {
            Ok(out) => {
                inst = out;
                extension = Some("ok".to_string());
                if args.check.is_none() {
                    output(args, &to_json(&emit(&inst)))?;
                } else if let Some(p) = &args.emit {
                    write(p, &to_json(&emit(&inst)))?;
                }
            }
            Err(e) => {
                extension = Some(format!("failed: {e}"));
                code = 1;
            }
        }
        timing.insert("extend".into(), t.elapsed().as_millis());
    }
    if let Some(suite) = args.check {
        if code == 0 {
            let t = Instant::now();
            let r = suites::run(&inst, suite);
            timing.insert(suite.name().into(), t.elapsed().as_millis());
            if !r.passed() {
                code = 1;
            }
            reports.push(r);
        }
    }
    if args.check.is_some() || code != 0 {
        println!("{}", render(args, &inst, &reports, &timing, extension.as_deref()));
    }
    Ok(code)
}

fn main() -> ExitCode {
    let args = Args::parse();
    if let Some(n) = std::env::var("FIBCAT_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // only fails if a pool already exists, which cannot happen this early
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let result = match args.gen {
        Some(g) => generate(&args, g),
        None => check(&args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Stop(code, msg)) => {
            eprintln!("fibcat: {msg}");
            ExitCode::from(code)
        }
    }
}
