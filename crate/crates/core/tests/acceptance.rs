//! Acceptance suite: one PASS/FAIL line per criterion. Criteria 1 to 8 run
//! in-process; criterion 9 drives the built `qknot` binary.

use std::process::{Command, ExitCode};
use std::time::Instant;

use quantum_knot::acceptance::{run_criterion, CriterionReport};

const BIN: &str = env!("CARGO_BIN_EXE_qknot");

fn invoke(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(BIN).args(args).output().expect("spawn qknot");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn criterion_9() -> CriterionReport {
    let start = Instant::now();
    let mut problems = Vec::new();

    let (code, _) = invoke(&["verify"]);
    if code != 0 {
        problems.push(format!("verify exited {code}"));
    }
    let repeated: [&[&str]; 4] = [
        &["table", "--N", "1", "--m-max", "5", "--dim", "3", "--partial", "0"],
        &["shoot", "--N", "1", "--nu", "0.3", "--energy", "1"],
        &["scan", "--N", "1", "--energy", "1", "--nu", "0.05:1.95:400"],
        &[
            "scan",
            "--N",
            "1",
            "--energy",
            "1",
            "--nu",
            "0.05:1.95:400",
            "--format",
            "csv",
        ],
    ];
    let mut differing = 0;
    for args in repeated {
        let (c1, a) = invoke(args);
        let (c2, b) = invoke(args);
        if c1 != 0 || c2 != 0 {
            problems.push(format!("{} exited {c1}/{c2}", args[0]));
        } else if a != b || a.is_empty() {
            differing += 1;
            problems.push(format!("{} output differs between runs", args[0]));
        }
    }
    CriterionReport {
        id: 9,
        name: "CLI determinism",
        passed: problems.is_empty(),
        metric: differing as f64,
        threshold: 0.0,
        seconds: start.elapsed().as_secs_f64(),
        detail: if problems.is_empty() {
            "verify exit 0, outputs byte-identical".into()
        } else {
            problems.join("; ")
        },
    }
}

fn main() -> ExitCode {
    let mut reports: Vec<CriterionReport> = (1..=8).filter_map(run_criterion).collect();
    reports.push(criterion_9());
    for r in &reports {
        println!("{}", r.line());
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    println!("acceptance: {} passed, {failed} failed", reports.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
