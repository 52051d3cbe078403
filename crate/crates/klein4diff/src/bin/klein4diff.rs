//! Thin command-line front end over the library pipeline.
//!
//! ```text
//! klein4diff <mode> --field-degree N [--modulus HEX] --p EXPR --q EXPR
//!            [--let NAME=EXPR]* [--probe LIT]* [--json FILE] [--config FILE]
//! ```
//!
//! Modes: analyze, predict, verify, full. A config file supplies the same
//! settings as key = value lines; explicit flags override it. The JSON
//! report goes to stdout, a human summary to stderr. Exit codes: 0 on
//! MATCH or PREDICTION_ONLY, 2 on MISMATCH, 1 on input errors.

use klein4diff::cli::{human_summary, run, InstanceConfig, Mode};
use std::process::ExitCode;

const USAGE: &str = "usage: klein4diff <analyze|predict|verify|full> \
--field-degree N [--modulus HEX] --p EXPR --q EXPR \
[--let NAME=EXPR]* [--probe LIT]* [--json FILE] [--config FILE]";

fn parse_args(args: &[String]) -> Result<(InstanceConfig, Option<String>), String> {
    let mut mode: Option<Mode> = None;
    let mut field_degree: Option<u32> = None;
    let mut modulus: Option<u128> = None;
    let mut p_expr: Option<String> = None;
    let mut q_expr: Option<String> = None;
    let mut probes: Vec<String> = Vec::new();
    let mut lets: Vec<(String, String)> = Vec::new();
    let mut json_path: Option<String> = None;
    let mut base: Option<InstanceConfig> = None;

    let mut it = args.iter().peekable();
    while let Some(arg) = it.next() {
        let mut value = |flag: &str| -> Result<String, String> {
            it.next()
                .cloned()
                .ok_or_else(|| format!("{} expects a value\n{}", flag, USAGE))
        };
        match arg.as_str() {
            "analyze" | "predict" | "verify" | "full" => {
                mode = Some(Mode::parse(arg).expect("mode names match"));
            }
            "--field-degree" => {
                field_degree = Some(
                    value("--field-degree")?
                        .parse()
                        .map_err(|_| "bad --field-degree".to_string())?,
                );
            }
            "--modulus" => {
                let v = value("--modulus")?;
                let v = v.trim_start_matches("0x");
                modulus = Some(
                    u128::from_str_radix(v, 16).map_err(|_| "bad --modulus (hex)".to_string())?,
                );
            }
            "--p" => p_expr = Some(value("--p")?),
            "--q" => q_expr = Some(value("--q")?),
            "--probe" => probes.push(value("--probe")?),
            "--let" => {
                let v = value("--let")?;
                let Some((name, expr)) = v.split_once('=') else {
                    return Err("--let expects NAME=EXPR".into());
                };
                lets.push((name.trim().to_string(), expr.trim().to_string()));
            }
            "--json" => json_path = Some(value("--json")?),
            "--config" => {
                let path = value("--config")?;
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| format!("cannot read {}: {}", path, e))?;
                base = Some(
                    InstanceConfig::from_config_text(&text).map_err(|e| e.to_string())?,
                );
            }
            "--help" | "-h" => return Err(USAGE.into()),
            other => return Err(format!("unknown argument '{}'\n{}", other, USAGE)),
        }
    }

    let mut cfg = match base {
        Some(b) => b,
        None => InstanceConfig {
            field_degree: 0,
            modulus: None,
            p_expr: String::new(),
            q_expr: String::new(),
            mode: Mode::Full,
            probes: Vec::new(),
            lets: Vec::new(),
        },
    };
    if let Some(m) = mode {
        cfg.mode = m;
    }
    if let Some(n) = field_degree {
        cfg.field_degree = n;
    }
    if modulus.is_some() {
        cfg.modulus = modulus;
    }
    if let Some(p) = p_expr {
        cfg.p_expr = p;
    }
    if let Some(q) = q_expr {
        cfg.q_expr = q;
    }
    if !probes.is_empty() {
        cfg.probes = probes;
    }
    if !lets.is_empty() {
        cfg.lets = lets;
    }
    if cfg.field_degree == 0 {
        return Err(format!("missing --field-degree\n{}", USAGE));
    }
    if cfg.p_expr.is_empty() || cfg.q_expr.is_empty() {
        return Err(format!("missing --p or --q\n{}", USAGE));
    }
    Ok((cfg, json_path))
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.is_empty() {
        eprintln!("{}", USAGE);
        return ExitCode::from(1);
    }
    let (cfg, json_path) = match parse_args(&args) {
        Ok(v) => v,
        Err(msg) => {
            eprintln!("{}", msg);
            return ExitCode::from(1);
        }
    };
    match run(&cfg) {
        Ok(report) => {
            let json = serde_json::to_string_pretty(&report).expect("report serializes");
            println!("{}", json);
            if let Some(path) = json_path {
                if let Err(e) = std::fs::write(&path, &json) {
                    eprintln!("cannot write {}: {}", path, e);
                    return ExitCode::from(1);
                }
            }
            eprint!("{}", human_summary(&report));
            if report.verdict == "MISMATCH" {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(1)
        }
    }
}
