//! Command line front end. Exit codes: 0 success, 1 verification failure
//! or computation error, 2 usage or parse error.

use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::associator::{check_associator, solve_associator};
use crate::dsl::{eval_str, nerve_of, AssocSource, OutputFormat, SessionConfig, Value};
use crate::error::{Error, Result};
use crate::exactalg::{GradedMap, HSeries};
use crate::hopf_backend::{AxiomCheck, HopfAlgebra};
use crate::nerve::{kappa_iota_checks, tau_checks, NerveEvaluator, NerveMode};
use crate::quantizer::quantize;
use crate::transport::{check_braid_relations, u_phi};

#[derive(Parser, Debug)]
#[command(name = "nerveq", version, about = "Exact quantization of Poisson Hopf algebras through nerves")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(clap::Args, Debug, Clone)]
struct Common {
    /// Truncation order N: results are modulo h^(N+1).
    #[arg(long, default_value_t = 2)]
    order: usize,
    /// text or json
    #[arg(long, default_value = "text")]
    format: String,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Evaluate a morphism expression and print its canonical form.
    Compose {
        expr: String,
        #[command(flatten)]
        common: Common,
    },
    /// Braid and chord normal forms.
    Normalize {
        expr: String,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate a nerve functor on a morphism; prints sparse triplets.
    Nerve {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long)]
        morphism: String,
        /// symmetric, braided, infinitesimal or quantized
        #[arg(long, default_value = "braided")]
        mode: String,
        /// Associator: a JSON file or solve:D
        #[arg(long, default_value = "solve:2")]
        assoc: String,
        #[arg(long)]
        cap: Option<u32>,
        #[command(flatten)]
        common: Common,
    },
    /// Drinfeld associators.
    Assoc {
        #[command(subcommand)]
        cmd: AssocCmd,
    },
    /// Transport a braided morphism to a series of maps with chords.
    Transport {
        morphism: String,
        #[arg(long, default_value = "solve:2")]
        assoc: String,
        #[command(flatten)]
        common: Common,
    },
    /// Quantize a Poisson Hopf algebra and verify the result.
    Quantize {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long, default_value = "solve:2")]
        assoc: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        cap: Option<u32>,
        #[command(flatten)]
        common: Common,
    },
    /// Validator suites for algebras and associators.
    Check {
        #[arg(long)]
        algebra: Option<PathBuf>,
        #[arg(long)]
        assoc: Option<String>,
        /// Also check braid relations of the transport modulo h^(N+1).
        #[arg(long)]
        braids: bool,
        #[arg(long)]
        cap: Option<u32>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Subcommand, Debug)]
enum AssocCmd {
    /// Solve pentagon and hexagons degree by degree.
    Solve {
        #[arg(long, default_value_t = 2)]
        degree: usize,
        /// Print the (word, coefficient) table as well.
        #[arg(long)]
        table: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "text")]
        format: String,
    },
    /// Residuals of a given associator (a JSON file or solve:D).
    Check {
        source: String,
        #[arg(long, default_value = "text")]
        format: String,
    },
}

/// Outcome of a subcommand: text for stdout and whether every check passed.
struct Outcome {
    text: String,
    ok: bool,
}

fn done(text: String) -> Result<Outcome> {
    Ok(Outcome { text, ok: true })
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).unwrap() + "\n"
}

fn session(common: &Common, assoc: Option<&str>, algebra: Option<PathBuf>, cap: Option<u32>) -> Result<SessionConfig> {
    let cfg = SessionConfig {
        order: common.order,
        degree_cap: cap,
        assoc: assoc.map(|s| s.parse()).transpose()?.unwrap_or(AssocSource::Solve(2)),
        backend: algebra,
        format: common.format.parse()?,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn load_algebra(cfg: &SessionConfig) -> Result<Arc<HopfAlgebra>> {
    Ok(Arc::new(cfg.algebra()?.build()?))
}

fn show_value(v: &Value, fmt: OutputFormat) -> String {
    match fmt {
        OutputFormat::Text => format!("{v}\n"),
        OutputFormat::Json => json(&v.to_json()),
    }
}

fn series_triplets(s: &HSeries<GradedMap>) -> String {
    let mut out = String::new();
    let space = s.coeffs()[0].space().clone();
    for (k, c) in s.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        out.push_str(&format!("h^{k}\n"));
        for (a, b, x) in c.triplets() {
            out.push_str(&format!("{}\t{}\t{}\t{x}\n", space.total_degree(&a), space.idx_label(&a), space.idx_label(&b)));
        }
    }
    if out.is_empty() {
        out.push_str("0\n");
    }
    out
}

fn checks_text(title: &str, checks: &[AxiomCheck]) -> String {
    let mut out = format!("{title}\n");
    for c in checks {
        match &c.first_failure {
            None => out.push_str(&format!("  {}: ok\n", c.name)),
            Some(x) => out.push_str(&format!("  {}: FAIL at {x}\n", c.name)),
        }
    }
    out
}

fn run_cmd(cmd: Cmd) -> Result<Outcome> {
    match cmd {
        Cmd::Compose { expr, common } => {
            let cfg = session(&common, None, None, None)?;
            done(show_value(&eval_str(&expr, cfg.order)?, cfg.format))
        }
        Cmd::Normalize { expr, common } => {
            let cfg = session(&common, None, None, None)?;
            done(show_value(&eval_str(&expr, cfg.order)?.normalize(), cfg.format))
        }
        Cmd::Nerve { algebra, morphism, mode, assoc, cap, common } => {
            let cfg = session(&common, Some(&assoc), Some(algebra), cap)?;
            let h = load_algebra(&cfg)?;
            let mode = match mode.as_str() {
                "symmetric" => NerveMode::Symmetric,
                "braided" => NerveMode::Braided,
                "infinitesimal" => NerveMode::Infinitesimal { order: cfg.order },
                "quantized" => NerveMode::Quantized { phi: cfg.associator()?, order: cfg.order },
                other => return Err(Error::Parse(format!("mode `{other}`: expected symmetric, braided, infinitesimal or quantized"))),
            };
            let ev = NerveEvaluator::new(h, mode)?;
            let v = eval_str(&morphism, cfg.order)?;
            let s = nerve_of(&ev, &v)?;
            match cfg.format {
                OutputFormat::Text => done(series_triplets(&s)),
                OutputFormat::Json => done(json(&s.coeffs().iter().map(|c| c.to_json()).collect::<Vec<_>>())),
            }
        }
        Cmd::Assoc { cmd: AssocCmd::Solve { degree, table, out, format } } => {
            let fmt: OutputFormat = format.parse()?;
            let phi = solve_associator(degree)?;
            if let Some(p) = out {
                std::fs::write(&p, serde_json::to_string_pretty(&phi.to_json())? + "\n")?;
            }
            if fmt == OutputFormat::Json {
                return done(json(&phi.to_json()));
            }
            let mut text = format!("{}\n", phi.bracket_text().unwrap_or_else(|| phi.to_string()));
            text.push_str(&format!("log: {}\n", phi.log_text()?));
            if table {
                for (w, c) in phi.table() {
                    text.push_str(&format!("{w}\t{c}\n"));
                }
            }
            done(text)
        }
        Cmd::Assoc { cmd: AssocCmd::Check { source, format } } => {
            let fmt: OutputFormat = format.parse()?;
            let phi = source.parse::<AssocSource>()?.load()?;
            let r = check_associator(&phi)?;
            let text = match fmt {
                OutputFormat::Text => format!("{r}\n"),
                OutputFormat::Json => json(&r),
            };
            Ok(Outcome { text, ok: r.ok() })
        }
        Cmd::Transport { morphism, assoc, common } => {
            let cfg = session(&common, Some(&assoc), None, None)?;
            let b = match eval_str(&morphism, cfg.order)? {
                Value::Braid(b) => b,
                Value::Map(f) => crate::props::BrMorphism::from_monotone(&f)
                    .map_err(|_| Error::Parse("transport needs a braided morphism or a monotone map".into()))?,
                Value::Linear(_) => return Err(Error::Parse("transport needs a braided morphism".into())),
            };
            let s = u_phi(&b, &cfg.associator()?, cfg.order)?;
            done(show_value(&Value::Linear(s), cfg.format))
        }
        Cmd::Quantize { algebra, assoc, out, cap, common } => {
            let cfg = session(&common, Some(&assoc), Some(algebra), cap)?;
            let h = load_algebra(&cfg)?;
            let q = quantize(h, &cfg.associator()?, cfg.order)?;
            let j = q.to_json();
            if let Some(p) = out {
                std::fs::write(&p, json(&j))?;
            }
            let text = match cfg.format {
                OutputFormat::Text => format!("{}", j.report),
                OutputFormat::Json => json(&j.report),
            };
            Ok(Outcome { text, ok: j.report.ok() })
        }
        Cmd::Check { algebra, assoc, braids, cap, common } => {
            if algebra.is_none() && assoc.is_none() {
                return Err(Error::Parse("check needs --algebra or --assoc".into()));
            }
            let cfg = session(&common, assoc.as_deref(), algebra.clone(), cap)?;
            let mut text = String::new();
            let mut ok = true;
            let mut sections: Vec<serde_json::Value> = Vec::new();
            if algebra.is_some() {
                let h = load_algebra(&cfg)?;
                let r = h.validate();
                ok &= r.ok();
                let mut structural = kappa_iota_checks(&h, 4)?;
                if h.flags().poisson {
                    structural.extend(tau_checks(&h)?);
                }
                ok &= structural.iter().all(|c| c.ok);
                text.push_str(&format!("{r}"));
                text.push_str(&checks_text("nerve realization", &structural));
                sections.push(serde_json::json!({ "algebra": r.algebra, "axioms": r.checks, "nerve": structural }));
            }
            if assoc.is_some() {
                let phi = cfg.associator()?;
                let r = check_associator(&phi)?;
                ok &= r.ok();
                text.push_str(&format!("associator\n{r}\n"));
                let mut sec = serde_json::json!({ "associator": r });
                if braids {
                    let b = check_braid_relations(&phi, cfg.order, 4)?;
                    ok &= b.ok();
                    text.push_str(&format!("braid relations modulo h^{}\n{b}", cfg.order + 1));
                    sec["braids"] = serde_json::to_value(&b)?;
                }
                sections.push(sec);
            }
            let text = match cfg.format {
                OutputFormat::Text => text,
                OutputFormat::Json => json(&serde_json::json!({ "schema": "nerveq.check/1", "ok": ok, "sections": sections })),
            };
            Ok(Outcome { text, ok })
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Syntax { .. } | Error::Parse(_) | Error::Type { .. } | Error::Io(_) | Error::Json(_) => 2,
        _ => 1,
    }
}

/// Run with explicit output streams; returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match run_cmd(cli.cmd) {
        Ok(o) => {
            let _ = out.write_all(o.text.as_bytes());
            if o.ok {
                0
            } else {
                let _ = writeln!(err, "verification failed");
                1
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(argv, &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut o = Vec::new();
        let mut e = Vec::new();
        let argv: Vec<&str> = std::iter::once("nerveq").chain(args.iter().copied()).collect();
        let code = run(argv, &mut o, &mut e);
        (code, String::from_utf8(o).unwrap(), String::from_utf8(e).unwrap())
    }

    #[test]
    fn assoc_solve_prints_bracket_form() {
        let (code, out, _) = call(&["assoc", "solve", "--degree", "2"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().next(), Some("1 + 1/24 [x,y]"));
    }

    #[test]
    fn compose_and_exit_codes() {
        let (code, out, _) = call(&["compose", "braid(2){s1}[1,2] o braid(2){s1}[1,2]"]);
        assert_eq!((code, out.as_str()), (0, "braid(2){s1 s1}[1,2]\n"));
        let (code, out, _) = call(&["normalize", "braid(3){s1 s2 s1 s2' s1' s2'}"]);
        assert_eq!((code, out.as_str()), (0, "braid(3){}[1,2,3]\n"));
        let (code, _, err) = call(&["compose", "map(2->1)[1,1] o map(2->1)[1,1]"]);
        assert_eq!(code, 2);
        assert!(err.contains("line 1, column 1"), "{err}");
        assert_eq!(call(&["frobnicate"]).0, 2);
        assert_eq!(call(&["--help"]).0, 0);
        assert_eq!(call(&["assoc", "check", "solve:2"]).0, 0);
    }

    #[test]
    fn transport_of_a_crossing() {
        let (code, out, _) = call(&["transport", "braid(2){s1}", "--order", "1"]);
        assert_eq!(code, 0);
        assert_eq!(out, "map(2->2)[2,1] + 1/2 map(2->2)[2,1] * (t12)\n");
    }
}
