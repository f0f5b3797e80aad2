use std::fmt::Write as _;
use std::path::PathBuf;

use serde_json::{json, Value};

use pisano::classify::{self, Method};
use pisano::error::Result;
use pisano::scan::{scan_wss, ScanConfig};
use pisano::verify::{self, Suite, VerifyOptions};
use pisano::{arith, fib, pisano as periods, wss, Error};

use crate::{Command, Outcome, CHECKPOINT_DIR_ENV, EXIT_ANOMALY, EXIT_OK, EXIT_WSS_HIT};

pub fn name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Fib { .. } => "fib",
        Command::Profile { .. } => "profile",
        Command::Factor { .. } => "factor",
        Command::Good { .. } => "good",
        Command::Prime { .. } => "prime",
        Command::SelfSquare { .. } => "self-square",
        Command::WssScan { .. } => "wss-scan",
        Command::Verify { .. } => "verify",
    }
}

pub fn run(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Fib { n, modulus } => cmd_fib(*n, *modulus),
        Command::Profile { m } => cmd_profile(*m),
        Command::Factor { n } => cmd_factor(*n),
        Command::Good { m, range, method } => cmd_good(*m, range.as_deref(), method),
        Command::Prime { p } => cmd_prime(*p),
        Command::SelfSquare { m, max } => cmd_self_square(*m, *max),
        Command::WssScan {
            from,
            to,
            jobs,
            checkpoint,
            out,
            block_size,
            max_blocks,
        } => {
            let checkpoint = checkpoint
                .clone()
                .unwrap_or_else(|| default_checkpoint(*from, *to));
            let mut cfg = ScanConfig::new(*from, *to, *jobs, checkpoint);
            cfg.results_path = out.clone();
            cfg.block_size = *block_size;
            cfg.max_blocks = *max_blocks;
            cmd_wss_scan(&cfg)
        }
        Command::Verify {
            suite,
            max,
            seed,
            samples,
        } => cmd_verify(
            suite.parse()?,
            VerifyOptions {
                max: *max,
                seed: *seed,
                samples: *samples,
            },
        ),
    }
}

fn ok(inputs: Value, output: Value, text: String) -> Result<Outcome> {
    Ok(Outcome {
        inputs,
        output,
        text,
        exit: EXIT_OK,
    })
}

fn default_checkpoint(from: u64, to: u64) -> PathBuf {
    let dir = std::env::var_os(CHECKPOINT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."));
    dir.join(format!("wss-{from}-{to}.json"))
}

fn cmd_fib(n: u64, modulus: Option<u64>) -> Result<Outcome> {
    let inputs = json!({ "n": n, "mod": modulus });
    match modulus {
        Some(m) => {
            let (u, v) = fib::fib_pair_mod(n, m)?;
            ok(
                inputs,
                json!({ "n": n, "mod": m, "value": u, "next": v }),
                format!("u_{n} mod {m} = {u}"),
            )
        }
        None => {
            let value = fib::fib_exact(n)?.to_string();
            // Exact values can be very long; JSON carries them as strings.
            let text = value.clone();
            ok(inputs, json!({ "n": n, "value": value }), text)
        }
    }
}

fn cmd_profile(m: u64) -> Result<Outcome> {
    let prof = periods::profile(m)?;
    let text = format!(
        "m = {}: gamma = {}, alpha = {}, upsilon = {}",
        prof.m, prof.gamma, prof.alpha, prof.upsilon
    );
    ok(
        json!({ "m": m }),
        serde_json::to_value(&prof).unwrap(),
        text,
    )
}

fn cmd_factor(n: u64) -> Result<Outcome> {
    let f = arith::factorize(n)?;
    let text = f
        .factors()
        .iter()
        .map(|&(p, e)| {
            if e == 1 {
                p.to_string()
            } else {
                format!("{p}^{e}")
            }
        })
        .collect::<Vec<_>>()
        .join(" * ");
    let factors: Vec<Value> = f
        .factors()
        .iter()
        .map(|&(p, e)| json!({ "p": p, "e": e }))
        .collect();
    ok(
        json!({ "n": n }),
        json!({ "n": n, "factors": factors }),
        format!("{n} = {text}"),
    )
}

fn cmd_good(m: Option<u64>, range: Option<&[u64]>, method: &str) -> Result<Outcome> {
    let method: Method = method.parse()?;
    let (lo, hi) = match (m, range) {
        (Some(m), None) => (m, m),
        (None, Some([lo, hi])) if lo <= hi => (*lo, *hi),
        (None, Some(_)) => return Err(Error::Domain("--range needs LO <= HI".into())),
        _ => return Err(Error::Domain("give either m or --range LO HI".into())),
    };
    let inputs = json!({ "m": m, "range": range, "method": method });

    let mut reports = Vec::new();
    let mut disagreements = Vec::new();
    for m in lo..=hi {
        match classify::classify(m, method) {
            Ok(r) => reports.push(r),
            Err(Error::Anomaly(msg)) => disagreements.push(json!({ "m": m, "detail": msg })),
            Err(e) => return Err(e),
        }
    }
    let good: Vec<u64> = reports.iter().filter(|r| r.is_good).map(|r| r.m).collect();

    let mut text = String::new();
    if lo == hi && disagreements.is_empty() {
        let r = &reports[0];
        let _ = write!(
            text,
            "m = {}: {} (gamma = {}, upsilon = {})",
            r.m,
            if r.is_good { "good" } else { "not good" },
            r.gamma,
            r.upsilon_m
        );
        for e in &r.prime_entries {
            let _ = write!(
                text,
                "\n  p = {}^{}: gamma(p) = {}, k = {}, good prime = {}, upsilon(p) = {}",
                e.p, e.e, e.gamma_p, e.k, e.good_prime, e.upsilon_p
            );
        }
    } else {
        let _ = write!(
            text,
            "[{lo}, {hi}]: {} good, {} not good, {} disagreements",
            good.len(),
            reports.len() - good.len(),
            disagreements.len()
        );
    }
    for d in &disagreements {
        let _ = write!(text, "\nDISAGREEMENT {d}");
    }

    let output = if lo == hi && disagreements.is_empty() {
        serde_json::to_value(&reports[0]).unwrap()
    } else {
        json!({
            "reports": reports,
            "good": good,
            "disagreements": disagreements,
        })
    };
    Ok(Outcome {
        inputs,
        output,
        text,
        exit: if disagreements.is_empty() {
            EXIT_OK
        } else {
            EXIT_ANOMALY
        },
    })
}

fn cmd_prime(p: u64) -> Result<Outcome> {
    if !arith::is_prime(p) {
        return Err(Error::Domain(format!("{p} is not prime")));
    }
    let record = wss::is_wss(p)?;
    let gamma = periods::gamma_prime(p)?;
    let epsilon = periods::epsilon(p)?;
    let class = if p == 5 {
        None
    } else {
        Some(classify::p1_p2_class(p)?)
    };
    let pattern = if p == 2 {
        None
    } else {
        Some(classify::prime_pattern(p)?)
    };
    let good_prime = if p == 2 {
        false
    } else {
        classify::is_good_prime(p)?
    };
    let text = format!(
        "p = {p}: (p/5) = {}, gamma = {gamma}, epsilon = {epsilon}, good prime = {good_prime}, \
         class = {class:?}, Wall-Sun-Sun = {}",
        record.legendre5, record.is_wss
    );
    let exit = if record.is_wss {
        EXIT_WSS_HIT
    } else if !record.criteria_agree || class.is_some_and(|c| c.is_anomaly()) {
        EXIT_ANOMALY
    } else {
        EXIT_OK
    };
    Ok(Outcome {
        inputs: json!({ "p": p }),
        output: json!({
            "p": p,
            "gamma": gamma,
            "epsilon": epsilon,
            "good_prime": good_prime,
            "class": class,
            "pattern": pattern,
            "wss": record,
        }),
        text,
        exit,
    })
}

fn cmd_self_square(m: Option<u64>, max: Option<u64>) -> Result<Outcome> {
    match (m, max) {
        (Some(m), None) => {
            let r = wss::self_square_test(m)?;
            let text = format!(
                "m = {m}: gamma = {}, u_gamma mod m^2 = {}, divisible = {}",
                r.gamma, r.residue_mod_m2, r.divisible
            );
            ok(json!({ "m": m }), serde_json::to_value(r).unwrap(), text)
        }
        (None, Some(max)) => {
            let hits = wss::enumerate_self_square(max)?;
            let ms: Vec<u64> = hits.iter().map(|r| r.m).collect();
            let exit = if ms.iter().any(|&m| m != 6 && m != 12) {
                EXIT_ANOMALY
            } else {
                EXIT_OK
            };
            Ok(Outcome {
                inputs: json!({ "max": max }),
                output: json!({ "max": max, "moduli": ms, "records": hits }),
                text: format!("m in [2, {max}] with m^2 | u_gamma(m): {ms:?}"),
                exit,
            })
        }
        _ => Err(Error::Domain("give either m or --max N".into())),
    }
}

fn cmd_wss_scan(cfg: &ScanConfig) -> Result<Outcome> {
    let out = scan_wss(cfg)?;
    let cp = &out.checkpoint;
    let exit = if !cp.hits.is_empty() {
        EXIT_WSS_HIT
    } else if cp.anomaly_count > 0 {
        EXIT_ANOMALY
    } else {
        EXIT_OK
    };
    let mut text = format!(
        "scanned [{}, {}]{}: {} primes tested this run, last completed {}, {} hits, {} anomalies{}",
        cp.range_lo,
        cp.range_hi,
        if out.resumed { " (resumed)" } else { "" },
        out.primes_tested,
        cp.last_completed
            .map_or_else(|| "none".to_owned(), |p| p.to_string()),
        cp.hits.len(),
        cp.anomaly_count,
        if out.complete { "" } else { " (incomplete)" },
    );
    for h in &cp.hits {
        let _ = write!(text, "\nWALL-SUN-SUN PRIME {}", h.p);
    }
    Ok(Outcome {
        inputs: json!({
            "from": cfg.lo,
            "to": cfg.hi,
            "jobs": cfg.workers,
            "checkpoint": cfg.checkpoint_path,
            "out": cfg.results_path,
        }),
        output: json!({
            "checkpoint": cp,
            "primes_tested": out.primes_tested,
            "resumed": out.resumed,
            "complete": out.complete,
        }),
        text,
        exit,
    })
}

fn cmd_verify(suite: Suite, opts: VerifyOptions) -> Result<Outcome> {
    let report = verify::run(suite, &opts);
    let mut text = String::new();
    for p in &report.properties {
        let _ = write!(
            text,
            "{} {:?}/{} ({} checked)",
            if p.passed { "PASS" } else { "FAIL" },
            p.suite,
            p.name,
            p.checked
        );
        if let Some(ce) = &p.counterexample {
            let _ = write!(text, " counterexample: {ce}");
        }
        if let Some(note) = &p.note {
            let _ = write!(text, " [{note}]");
        }
        text.push('\n');
    }
    let failed = report.properties.iter().filter(|p| !p.passed).count();
    let _ = write!(
        text,
        "{} properties, {} failed",
        report.properties.len(),
        failed
    );
    Ok(Outcome {
        inputs: json!({
            "suite": suite,
            "max": opts.max,
            "seed": opts.seed,
            "samples": opts.samples,
        }),
        output: serde_json::to_value(&report).unwrap(),
        text,
        exit: if report.all_passed {
            EXIT_OK
        } else {
            EXIT_ANOMALY
        },
    })
}
