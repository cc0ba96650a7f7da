//! Acceptance criteria, one test each. Tests run one at a time so that the
//! wall-clock budgets are measured without contention, and each prints a
//! single PASS or FAIL line to the terminal.

use std::io::Write;
use std::path::Path;
use std::process::Command;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use qdecomp::fixtures::{pinned_cases, Expected};
use qdecomp::io::serialize_distribution;
use qdecomp::selftest::{exactness_section, oracle_section, Section, SelftestConfig};
use qdecomp::suites::{bridge_section, histogram_section, invariant_section, SuiteConfig};
use qdecomp::DivergenceKind;
use serde_json::Value;

static SERIAL: Mutex<()> = Mutex::new(());

const BIN: &str = env!("CARGO_BIN_EXE_qdecomp");

/// Written straight to the stderr handle so the line shows even when the
/// harness captures test output.
fn report(n: u32, what: &str, passed: bool, elapsed: Duration, budget: Option<Duration>, detail: &str) {
    let status = if passed { "PASS" } else { "FAIL" };
    let budget = budget.map_or(String::new(), |b| format!(", budget {:.0}s", b.as_secs_f64()));
    let line = format!(
        "criterion {n} [{status}] {what} ({:.2}s{budget}){detail}\n",
        elapsed.as_secs_f64()
    );
    let _ = std::io::stderr().write_all(line.as_bytes());
}

/// Runs `body` under the lock and timer, prints the line and fails the test
/// on a violation or an exceeded budget.
fn criterion(n: u32, what: &str, budget: Option<Duration>, body: impl FnOnce() -> Result<(), String>) {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let outcome = body();
    let elapsed = start.elapsed();
    let over = budget.is_some_and(|b| elapsed > b);
    let detail = match (&outcome, over) {
        (Err(e), _) => format!(": {e}"),
        (Ok(()), true) => ": over budget".to_string(),
        _ => String::new(),
    };
    report(n, what, outcome.is_ok() && !over, elapsed, budget, &detail);
    assert!(outcome.is_ok() && !over, "criterion {n}{detail}");
}

fn section_result(section: Section) -> Result<(), String> {
    let failed: Vec<String> = section
        .checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| match &c.error {
            Some(e) => format!("{}: {e}", c.label),
            None => format!("{}: max error {:.3e} > {:.1e}", c.label, c.max_error, c.tol),
        })
        .collect();
    if failed.is_empty() && section.passed {
        Ok(())
    } else {
        Err(failed.join("; "))
    }
}

fn compute(dir: &Path, index: usize, f: &str, g: &str, kind: DivergenceKind) -> Result<Value, String> {
    let (fp, gp) = (dir.join(format!("{index}_f.json")), dir.join(format!("{index}_g.json")));
    std::fs::write(&fp, f).map_err(|e| e.to_string())?;
    std::fs::write(&gp, g).map_err(|e| e.to_string())?;
    let mut cmd = Command::new(BIN);
    cmd.arg("compute")
        .arg(&fp)
        .arg(&gp)
        .args(["--output", "json", "--divergence", kind.name()]);
    if let Some(p) = kind.p() {
        cmd.args(["--p", &p.to_string()]);
    }
    let out = cmd.output().map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "exit {:?}: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())
}

#[test]
fn criterion_1_reference_values_through_the_cli() {
    criterion(
        1,
        "reference values via qdecomp compute",
        Some(Duration::from_secs(5)),
        || {
            let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
            let mut failures = Vec::new();
            let cases = pinned_cases();
            for (i, case) in cases.iter().enumerate() {
                let v = compute(
                    dir.path(),
                    i,
                    &serialize_distribution(&case.f),
                    &serialize_distribution(&case.g),
                    case.kind,
                )?;
                let num = |k: &str| v[k].as_f64().unwrap_or(f64::NAN);
                let total = num("total");
                let comps = ["shift_plus", "shift_minus", "disp_plus", "disp_minus"].map(num);
                let (expected, actual) = match case.expected {
                    Expected::Components(c) => (c.to_vec(), comps.to_vec()),
                    Expected::Total(t) => (vec![t], vec![total]),
                    Expected::Shares(c) => (c.to_vec(), comps.map(|x| x / total).to_vec()),
                };
                let err = expected
                    .iter()
                    .zip(&actual)
                    .map(|(e, a)| (e - a).abs())
                    .fold(0.0, f64::max);
                if err.is_nan() || err > case.tol {
                    failures.push(format!("{}: expected {expected:?}, got {actual:?}", case.label));
                }
            }
            let _ = std::io::stderr().write_all(
                format!(
                    "  {} reference checks; the third spiked-triple CD pair is excluded (see README)\n",
                    cases.len()
                )
                .as_bytes(),
            );
            if failures.is_empty() {
                Ok(())
            } else {
                Err(failures.join("; "))
            }
        },
    );
}

#[test]
fn criterion_2_decomposition_exactness() {
    criterion(
        2,
        "exactness on 500 random pairs per divergence",
        Some(Duration::from_secs(30)),
        || section_result(exactness_section(&SelftestConfig::default())),
    );
}

#[test]
fn criterion_3_gaussian_closed_forms() {
    criterion(
        3,
        "closed forms vs quadrature on 200 normal pairs",
        Some(Duration::from_secs(60)),
        || section_result(oracle_section(&SelftestConfig::default())),
    );
}

#[test]
fn criterion_4_divergence_invariants() {
    criterion(4, "invariant suites", None, || {
        section_result(invariant_section(&SuiteConfig::default()))
    });
}

#[test]
fn criterion_5_order_bridges() {
    criterion(5, "order bridges and pinned order fixtures", None, || {
        section_result(bridge_section(&SuiteConfig::default()))
    });
}

#[test]
fn criterion_6_histogram_pipeline() {
    criterion(6, "open-bin histogram pipeline", None, || {
        section_result(histogram_section(&SuiteConfig::default()))
    });
}

#[test]
fn criterion_7_selftest_command() {
    criterion(7, "qdecomp selftest exits 0", Some(Duration::from_secs(120)), || {
        let out = Command::new(BIN).arg("selftest").output().map_err(|e| e.to_string())?;
        match out.status.code() {
            Some(0) => Ok(()),
            code => Err(format!("exit {code:?}\n{}", String::from_utf8_lossy(&out.stdout))),
        }
    });
}
