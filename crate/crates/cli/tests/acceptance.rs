//! End-to-end acceptance run: one line per criterion, non-zero exit on any failure.
//!
//! Criteria run concurrently; each prints its verdict with instance counts and time.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use logdrw::LocalModel;
use logdrw_cli::config::SuiteConfig;
use logdrw_cli::report::{Check, Outcome};
use logdrw_cli::run_report;
use logdrw_cli::suites::run_suite;

struct Verdict {
    passed: bool,
    summary: String,
}

fn model(s: &str) -> LocalModel {
    s.parse().expect("valid model")
}

fn config(model_s: &str, m: u32, trials: usize, grid: (u64, u32)) -> SuiteConfig {
    let mut c = SuiteConfig::for_model(model(model_s));
    c.m = m;
    c.trials = trials;
    c.max_num = grid.0;
    c.max_den = grid.1;
    c.seed = 20240611;
    c
}

/// Runs `suite` on every config and folds the checks into one verdict.
fn suite_verdict(suite: &str, configs: &[SuiteConfig], limit: Option<Duration>) -> Verdict {
    let start = Instant::now();
    let mut all = Outcome::default();
    let mut errors = Vec::new();
    for cfg in configs {
        match run_suite(suite, cfg) {
            Ok(o) => all.extend(o),
            Err(e) => errors.push(format!("{}: {e}", cfg.model)),
        }
    }
    let elapsed = start.elapsed();
    let failing: Vec<&Check> = all.checks.iter().filter(|c| !c.passed()).collect();
    let instances: u64 = all.checks.iter().map(|c| c.details.instances).sum();
    let in_time = limit.is_none_or(|l| elapsed <= l);
    let mut summary = format!("{instances} instances, {:.1}s", elapsed.as_secs_f64());
    if let Some(l) = limit {
        summary.push_str(&format!(" (limit {}s)", l.as_secs()));
    }
    for c in &failing {
        summary.push_str(&format!(
            "; {} failed {}/{} e.g. {:?}",
            c.name, c.details.failures, c.details.instances, c.details.counterexample
        ));
    }
    for e in &errors {
        summary.push_str(&format!("; error {e}"));
    }
    Verdict {
        passed: failing.is_empty() && errors.is_empty() && in_time && instances > 0,
        summary,
    }
}

fn criterion_1() -> Verdict {
    let models = [
        "poly:p=2,n=2,e=1,f=1",
        "poly:p=3,n=3,e=2,f=0",
        "semistable:p=2,n=2,e=2,f=0,d=2",
        "semistable:p=3,n=3,e=3,f=0,d=2",
    ];
    let cfgs: Vec<_> = models.iter().map(|m| config(m, 3, 500, (2, 1))).collect();
    suite_verdict("identities", &cfgs, Some(Duration::from_secs(300)))
}

fn criterion_2() -> Verdict {
    let models = [
        "poly:p=2,n=2,e=1,f=1",
        "poly:p=3,n=3,e=2,f=0",
        "semistable:p=2,n=2,e=2,f=0,d=2",
        "semistable:p=3,n=3,e=3,f=0,d=2",
    ];
    let cfgs: Vec<_> = models.iter().map(|m| config(m, 3, 1000, (2, 1))).collect();
    suite_verdict("normal-form", &cfgs, None)
}

fn criterion_3() -> Verdict {
    let models = [
        ("poly:p=2,n=2,e=1,f=1", 8),
        ("poly:p=3,n=2,e=2,f=0", 27),
        ("semistable:p=2,n=2,e=2,f=0,d=2", 8),
        ("semistable:p=3,n=2,e=2,f=0,d=2", 27),
    ];
    let cfgs: Vec<_> = models.iter().map(|(m, num)| config(m, 3, 500, (*num, 2))).collect();
    suite_verdict("ghost", &cfgs, None)
}

fn criterion_4() -> Verdict {
    let mut cfgs = Vec::new();
    for p in [2, 3] {
        for n in [1, 2] {
            let mut c = config(&format!("poly:p={p},n={n},e=0,f=0"), 1, 500, (2, 1));
            c.len = 4;
            cfgs.push(c);
        }
    }
    suite_verdict("degree-zero", &cfgs, None)
}

fn criterion_5() -> Verdict {
    let models = [
        ("poly:p=2,n=2,e=1,f=1", (8, 2)),
        ("poly:p=3,n=3,e=2,f=0", (3, 2)),
        ("semistable:p=2,n=2,e=2,f=0,d=2", (8, 2)),
        ("semistable:p=3,n=3,e=3,f=0,d=2", (3, 2)),
    ];
    let cfgs: Vec<_> = models.iter().map(|(m, g)| config(m, 3, 1, *g)).collect();
    suite_verdict("comparison", &cfgs, Some(Duration::from_secs(600)))
}

fn criterion_6() -> Verdict {
    let models = ["semistable:p=2,n=2,e=2,f=0,d=2", "semistable:p=3,n=3,e=3,f=0,d=2", "semistable:p=2,n=3,e=2,f=1,d=2"];
    let cfgs: Vec<_> = models.iter().map(|m| config(m, 3, 500, (4, 2))).collect();
    suite_verdict("theta", &cfgs, None)
}

fn criterion_7() -> Verdict {
    let models = ["semistable:p=3,n=2,e=2,f=0,d=2", "semistable:p=2,n=3,e=3,f=0,d=3", "semistable:p=2,n=3,e=3,f=1,d=2"];
    let cfgs: Vec<_> = models.iter().map(|m| config(m, 3, 1, (3, 2))).collect();
    suite_verdict("mv", &cfgs, None)
}

fn criterion_8() -> Verdict {
    let models = ["semistable:p=3,n=2,e=2,f=0,d=2", "semistable:p=2,n=3,e=3,f=0,d=3", "poly:p=3,n=2,e=2,f=1"];
    let cfgs: Vec<_> = models.iter().map(|m| config(m, 3, 1, (3, 2))).collect();
    suite_verdict("residue", &cfgs, None)
}

fn criterion_9() -> Verdict {
    let models = ["semistable:p=3,n=2,e=2,f=0,d=2", "semistable:p=2,n=3,e=2,f=1,d=2", "semistable:p=2,n=3,e=3,f=0,d=3"];
    let cfgs: Vec<_> = models.iter().map(|m| config(m, 3, 1, (3, 2))).collect();
    let mut v = suite_verdict("steenbrink", &cfgs, None);
    let e1 = suite_verdict("e1", &cfgs, None);
    v.passed &= e1.passed;
    v.summary = format!("{}; weight spectral sequence: {}", v.summary, e1.summary);
    v
}

fn criterion_10() -> Verdict {
    let models = ["semistable:p=3,n=2,e=2,f=0,d=2", "semistable:p=2,n=3,e=2,f=1,d=2", "semistable:p=2,n=3,e=3,f=0,d=3"];
    let cfgs: Vec<_> = models.iter().map(|m| config(m, 3, 1, (3, 2))).collect();
    suite_verdict("gysin", &cfgs, None)
}

fn criterion_11() -> Verdict {
    let models = ["semistable:p=3,n=2,e=2,f=0,d=2", "semistable:p=2,n=2,e=2,f=0,d=2", "semistable:p=2,n=3,e=3,f=0,d=3"];
    let cfgs: Vec<_> = models.iter().map(|m| config(m, 3, 1, (3, 2))).collect();
    suite_verdict("frobenius", &cfgs, None)
}

fn criterion_12() -> Verdict {
    let mut cfgs = Vec::new();
    for p in [2, 3] {
        for n in [1, 2] {
            let mut c = config(&format!("poly:p={p},n={n},e={n},f=0"), 3, 500, (2, 1));
            c.len = 4;
            cfgs.push(c);
        }
    }
    suite_verdict("gauss", &cfgs, None)
}

fn criterion_13() -> Verdict {
    let cfg = config("semistable:p=2,n=2,e=2,f=0,d=2", 2, 50, (2, 1));
    let mut same = true;
    let mut compared = 0;
    for suite in ["identities", "ghost", "comparison", "e1", "gauss"] {
        let a = run_report(suite, &cfg, false).map(|r| r.to_json());
        let b = run_report(suite, &cfg, false).map(|r| r.to_json());
        match (a, b) {
            (Ok(a), Ok(b)) => {
                same &= a == b;
                compared += 1;
            }
            _ => same = false,
        }
    }
    let mut other = cfg.clone();
    other.seed += 1;
    let differs = run_report("identities", &other, false).map(|r| r.to_json()).ok()
        != run_report("identities", &cfg, false).map(|r| r.to_json()).ok();
    Verdict {
        passed: same && differs,
        summary: format!("{compared} suites compared byte-for-byte, other seed changes report: {differs}"),
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 13] = [
        ("algebra identities", criterion_1),
        ("normal-form uniqueness", criterion_2),
        ("ghost components", criterion_3),
        ("degree-zero Witt vector oracle", criterion_4),
        ("comparison with the lifted complex", criterion_5),
        ("theta sequence and relative quotient", criterion_6),
        ("Mayer-Vietoris", criterion_7),
        ("residue and weight filtration", criterion_8),
        ("Steenbrink resolution and abutment", criterion_9),
        ("Gys1 square and d1", criterion_10),
        ("Frobenius operators", criterion_11),
        ("Gauss norms", criterion_12),
        ("deterministic reports", criterion_13),
    ];
    let verdicts: Vec<Verdict> = std::thread::scope(|s| {
        let handles: Vec<_> = criteria.iter().map(|(_, f)| s.spawn(f)).collect();
        handles
            .into_iter()
            .map(|h| {
                h.join().unwrap_or_else(|_| Verdict {
                    passed: false,
                    summary: "panicked".into(),
                })
            })
            .collect()
    });
    let mut ok = true;
    for (i, ((name, _), v)) in criteria.iter().zip(&verdicts).enumerate() {
        println!("criterion {:>2} {:<40} {} | {}", i + 1, name, if v.passed { "PASS" } else { "FAIL" }, v.summary);
        ok &= v.passed;
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
