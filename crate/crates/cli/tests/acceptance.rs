//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::collections::BTreeSet;
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use mcm_cli::{run, InvocationResult, EXIT_OK, EXIT_VIOLATED};
use mcm_core::engine::{
    check_allowed, enumerate_executions, oracle_executions, reachable_final_states, SearchOptions,
};
use mcm_core::generator::{generate, GenerateOptions, GenerationReport, ProgramSpace};
use mcm_core::io::litmus::{emit_litmus, parse_litmus};
use mcm_core::io::native::parse_param;
use mcm_core::model::{Execution, LitmusConfig, LitmusTest, MemoryModel, Program};
use mcm_core::semantics::{matches, replay};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0x5eed_1e57;
const SAMPLE: usize = 5_000;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn manifest() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}

fn golden(name: &str) -> PathBuf {
    manifest()
        .join("tests/data/golden")
        .join(format!("{name}.litmus"))
}

fn param(name: &str) -> PathBuf {
    manifest().join("../../params").join(format!("{name}.toml"))
}

fn load(name: &str) -> LitmusTest {
    parse_litmus(&fs::read_to_string(golden(name)).unwrap()).unwrap()
}

fn mcm(args: &[&str]) -> InvocationResult {
    run(std::iter::once("mcm").chain(args.iter().copied()))
}

fn ms(d: Duration) -> String {
    format!("{} ms", d.as_millis())
}

fn sample_config() -> LitmusConfig {
    LitmusConfig::new(2, 2, 2, 2, 3).unwrap()
}

/// The fixed pseudorandom sample of programs with at most three operations per core.
fn sampled_programs() -> Vec<Program> {
    let space = ProgramSpace::new(&sample_config(), false, false).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut picks = rand::seq::index::sample(&mut rng, space.len(), SAMPLE).into_vec();
    picks.sort_unstable();
    picks.into_iter().map(|i| space.get(i)).collect()
}

fn small_programs() -> Vec<Program> {
    let config = LitmusConfig::new(2, 2, 2, 2, 2).unwrap();
    ProgramSpace::new(&config, false, false)
        .unwrap()
        .iter()
        .collect()
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

fn witness_replays(model: MemoryModel) -> Outcome {
    let t = load("SB000a");
    let w = check_allowed(
        &t.config,
        &t.program,
        model,
        &t.condition,
        SearchOptions::default(),
    )
    .ok_or_else(|| format!("no witness under {model}"))?;
    let trace = replay(&t.config, &t.program, &w).map_err(|e| e.to_string())?;
    ensure!(
        matches(trace.final_state(), &t.condition),
        "{model} witness ends elsewhere"
    );
    let r = mcm(&[
        "check",
        golden("SB000a").to_str().unwrap(),
        "--mcm",
        &model.to_string(),
        "--witness",
    ]);
    ensure!(r.code == EXIT_OK, "{model}: cli exit {}", r.code);
    ensure!(
        r.stdout.contains("\n0:EAX=1; 1:EAX=2; x=2;\n"),
        "{model}: cli witness missing"
    );
    Ok(format!(
        "{model} witness {}",
        w.events()
            .iter()
            .map(|e| e.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    ))
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let sc = witness_replays(MemoryModel::SC)?;
    let tso = witness_replays(MemoryModel::TSO)?;
    let t = start.elapsed();
    ensure!(t < Duration::from_secs(1), "took {}", ms(t));
    Ok(format!("{sc}; {tso}; {}", ms(t)))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let t = load("SB000b");
    let o = SearchOptions::default();
    ensure!(
        check_allowed(&t.config, &t.program, MemoryModel::SC, &t.condition, o).is_none(),
        "SC admits it"
    );
    ensure!(
        check_allowed(&t.config, &t.program, MemoryModel::TSO, &t.condition, o).is_some(),
        "TSO rejects it"
    );
    let file = golden("SB000b");
    ensure!(
        mcm(&["check", file.to_str().unwrap(), "--mcm", "SC"]).code == EXIT_VIOLATED,
        "cli SC exit"
    );
    ensure!(
        mcm(&["check", file.to_str().unwrap(), "--mcm", "TSO"]).code == EXIT_OK,
        "cli TSO exit"
    );
    let t = start.elapsed();
    ensure!(t < Duration::from_secs(1), "took {}", ms(t));
    Ok(format!("forbidden under SC, allowed under TSO; {}", ms(t)))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let sample = sampled_programs();
    let small = small_programs();
    for (i, p) in sample.iter().chain(&small).enumerate() {
        for model in MemoryModel::ALL {
            let fast: BTreeSet<Execution> = enumerate_executions(p, model).collect();
            let oracle = oracle_executions(p, model).map_err(|e| e.to_string())?;
            ensure!(
                fast == oracle,
                "program #{i} under {model}: {} vs {}",
                fast.len(),
                oracle.len()
            );
        }
    }
    let t = start.elapsed();
    ensure!(t < Duration::from_secs(600), "took {}", ms(t));
    Ok(format!(
        "{} sampled + {} small programs, both models; {}",
        sample.len(),
        small.len(),
        ms(t)
    ))
}

fn criterion_4() -> Outcome {
    let sample = sampled_programs();
    for p in sample.iter().take(100) {
        let expected = p
            .cores()
            .iter()
            .fold(factorial(p.total_ops()), |acc, c| acc / factorial(c.len()));
        let got = enumerate_executions(p, MemoryModel::SC).count() as u128;
        ensure!(got == expected, "{got} executions, multinomial {expected}");
    }
    Ok("100 programs".to_string())
}

fn criterion_5() -> Outcome {
    let config = sample_config();
    let o = SearchOptions::default();
    for p in sampled_programs().iter().take(100) {
        let sc: BTreeSet<Execution> = enumerate_executions(p, MemoryModel::SC).collect();
        let tso: BTreeSet<Execution> = enumerate_executions(p, MemoryModel::TSO).collect();
        ensure!(sc.is_subset(&tso), "execution containment fails");
        let sc_out = reachable_final_states(&config, p, MemoryModel::SC, o);
        let tso_out = reachable_final_states(&config, p, MemoryModel::TSO, o);
        ensure!(sc_out.is_subset(&tso_out), "outcome containment fails");
    }
    Ok("100 programs, executions and outcomes".to_string())
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let o = SearchOptions::default();
    let iriw = load("IRIW");
    let sc = reachable_final_states(&iriw.config, &iriw.program, MemoryModel::SC, o);
    let tso = reachable_final_states(&iriw.config, &iriw.program, MemoryModel::TSO, o);
    ensure!(sc.states().eq(tso.states()), "IRIW outcome sets differ");
    let file = golden("IRIW");
    let a = mcm(&["outcomes", file.to_str().unwrap(), "--mcm", "SC"]);
    let b = mcm(&["outcomes", file.to_str().unwrap(), "--mcm", "TSO"]);
    ensure!(a == b, "IRIW cli outputs differ");

    let ring = load("3.SB");
    let sc3 = reachable_final_states(&ring.config, &ring.program, MemoryModel::SC, o).len();
    let tso3 = reachable_final_states(&ring.config, &ring.program, MemoryModel::TSO, o).len();
    ensure!(sc3 == 7, "3.SB has {sc3} SC outcomes");
    let t = start.elapsed();
    ensure!(t < Duration::from_secs(60), "took {}", ms(t));
    Ok(format!(
        "IRIW {} outcomes under both; 3.SB {sc3} SC / {tso3} TSO; {}",
        sc.len(),
        ms(t)
    ))
}

struct Pair {
    tso: GenerationReport,
    sc: GenerationReport,
}

impl Pair {
    fn run(file: &str, values_exclude_initial: bool) -> Result<Pair, String> {
        let text = fs::read_to_string(param(file)).map_err(|e| e.to_string())?;
        let mut gen = parse_param(&text).map_err(|e| e.to_string())?.generation;
        gen.values_exclude_initial = values_exclude_initial;
        let options = GenerateOptions { parallel: true };
        gen.mcm = MemoryModel::TSO;
        let tso = generate(&gen, options).map_err(|e| e.to_string())?;
        gen.mcm = MemoryModel::SC;
        let sc = generate(&gen, options).map_err(|e| e.to_string())?;
        Ok(Pair { tso, sc })
    }

    fn counts(&self) -> (usize, usize) {
        (self.tso.accepted.len(), self.sc.accepted.len())
    }

    fn nested(&self) -> bool {
        self.sc.programs().is_subset(&self.tso.programs())
    }
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let mut notes = Vec::new();
    for exclude in [false, true] {
        let pair = Pair::run("scenario1", exclude)?;
        ensure!(
            pair.nested(),
            "SC set escapes TSO set (values_exclude_initial={exclude})"
        );
        let (tso, sc) = pair.counts();
        notes.push(format!(
            "pinned, stores {} the initial value: {tso} TSO / {sc} SC of {}",
            if exclude { "exclude" } else { "include" },
            pair.tso.candidates
        ));
    }
    let pair = Pair::run("scenario1-reproducing", false)?;
    ensure!(pair.nested(), "SC set escapes TSO set (reproducing)");
    let (tso, sc) = pair.counts();
    ensure!(
        (tso, sc) == (160, 132),
        "reproducing reading gave {tso} / {sc}"
    );
    notes.push(format!("reproducing reading: {tso} TSO / {sc} SC"));
    let t = start.elapsed();
    ensure!(t < Duration::from_secs(300), "took {}", ms(t));
    Ok(format!("{}; {}", notes.join("; "), ms(t)))
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let pair = Pair::run("scenario2", false)?;
    ensure!(pair.nested(), "SC set escapes TSO set");
    let (tso, sc) = pair.counts();
    ensure!((tso, sc) == (1154, 776), "got {tso} / {sc}");
    let t = start.elapsed();
    Ok(format!(
        "{tso} TSO / {sc} SC of {} candidates; {}",
        pair.tso.candidates,
        ms(t)
    ))
}

fn run_both(
    args: &[String],
    out: Option<&Path>,
) -> Result<(InvocationResult, Vec<(String, String)>), String> {
    let mut seen: Option<(InvocationResult, Vec<(String, String)>)> = None;
    for threads in ["1", "8", "1", "8"] {
        let mut full: Vec<&str> = vec!["--threads", threads];
        full.extend(args.iter().map(String::as_str));
        if let Some(dir) = out {
            let _ = fs::remove_dir_all(dir);
        }
        let r = mcm(&full);
        let files = match out {
            Some(dir) => {
                let mut files: Vec<(String, String)> = fs::read_dir(dir)
                    .map_err(|e| e.to_string())?
                    .map(|e| {
                        let p = e.unwrap().path();
                        (
                            p.file_name().unwrap().to_string_lossy().into_owned(),
                            fs::read_to_string(&p).unwrap(),
                        )
                    })
                    .collect();
                files.sort();
                files
            }
            None => Vec::new(),
        };
        match &seen {
            None => seen = Some((r, files)),
            Some(prev) => ensure!(
                *prev == (r, files),
                "`{}` differs at --threads {threads}",
                args.join(" ")
            ),
        }
    }
    Ok(seen.unwrap())
}

fn criterion_9() -> Outcome {
    let dir = manifest().join("tests/data/golden");
    let mut paths: Vec<PathBuf> = fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    paths.sort();
    ensure!(paths.len() == 20, "{} golden tests", paths.len());
    for p in &paths {
        let text = fs::read_to_string(p).unwrap();
        let test = parse_litmus(&text).map_err(|e| format!("{}: {e}", p.display()))?;
        let emitted = emit_litmus(&test).map_err(|e| e.to_string())?;
        ensure!(
            emitted == text,
            "{} does not emit back identically",
            p.display()
        );
        ensure!(
            parse_litmus(&emitted).ok() == Some(test),
            "{} reparses differently",
            p.display()
        );
    }

    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = tmp.path().join("out");
    let s = |p: PathBuf| p.to_str().unwrap().to_string();
    let mut invocations: Vec<(Vec<String>, bool)> = Vec::new();
    for p in &paths {
        for model in ["SC", "TSO"] {
            invocations.push((
                vec![
                    "check".into(),
                    s(p.clone()),
                    "--mcm".into(),
                    model.into(),
                    "--witness".into(),
                ],
                false,
            ));
            invocations.push((
                vec![
                    "outcomes".into(),
                    s(p.clone()),
                    "--mcm".into(),
                    model.into(),
                ],
                false,
            ));
        }
    }
    for format in ["human", "structured"] {
        for file in ["scenario1", "scenario1-reproducing", "scenario2", "sb000a"] {
            for model in ["SC", "TSO"] {
                let (file, dir) = (s(param(file)), s(out.clone()));
                let args = [
                    "--format", format, "generate", &file, "--mcm", model, "--out", &dir,
                ];
                invocations.push((args.into_iter().map(String::from).collect(), true));
            }
            let args = vec![
                "--format".to_string(),
                format.into(),
                "compare".into(),
                s(param(file)),
            ];
            invocations.push((args, false));
        }
    }
    for (args, writes) in &invocations {
        let (r, _) = run_both(args, writes.then_some(out.as_path()))?;
        ensure!(
            r.code == EXIT_OK || r.code == EXIT_VIOLATED,
            "`{}` exit {}: {}",
            args.join(" "),
            r.code,
            r.stderr
        );
    }
    Ok(format!(
        "{} tests round-trip; {} invocations identical at 1 and 8 threads",
        paths.len(),
        invocations.len()
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        (
            "SB000a condition has a replaying witness under SC and TSO",
            criterion_1,
        ),
        (
            "SB000a with both loads reading 1 is SC-forbidden, TSO-allowed",
            criterion_2,
        ),
        ("search equals permutation oracle", criterion_3),
        ("SC execution count is multinomial", criterion_4),
        ("SC is contained in TSO", criterion_5),
        ("IRIW coincidence and 3.SB outcome count", criterion_6),
        ("generation, two cores, up to two operations", criterion_7),
        ("generation, two cores, up to three operations", criterion_8),
        ("round trip and determinism", criterion_9),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (label, f)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS criterion {}: {label} ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {label} ({why})", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
