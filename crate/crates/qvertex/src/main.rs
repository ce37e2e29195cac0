//! Command-line driver: verification suites, two-point functions, and
//! operator dumps with machine-readable reports.
//!
//! ```text
//! qvertex verify --suite <def21|hopf|rmatrix|normalization|ope|thm35|all> --n N
//!                [--degree D] [--window M] [--order N] [--modes K]
//!                [--sector i] [--lattice-radius R] [--threads T]
//!                [--format json|text] [--out PATH]
//! qvertex corr   --n N --ops "PhiI:0:1:j=1@z2,PhiI:1:0:j=0@z1" --order 8
//!                [--format json|text] [--out PATH]
//! qvertex dump   --op "x+:1" --n N [--modes K]
//! ```
//!
//! Exit codes: 0 all checks pass, 1 verification failure, 2 usage error,
//! 3 internal or validation error.

use qvertex::error::EngineError;
use qvertex::intertwiner::{reference_formula, VoFamily};
use qvertex::report::Report;
use qvertex::scalar::QExp;
use qvertex::vertex::{CurrentKind, VertexTemplate};
use qvertex::Engine;
use std::collections::BTreeMap;
use std::process::ExitCode;

struct Args {
    flags: BTreeMap<String, String>,
}

impl Args {
    fn parse(argv: &[String]) -> Result<Args, String> {
        let mut flags = BTreeMap::new();
        let mut it = argv.iter();
        while let Some(a) = it.next() {
            let Some(key) = a.strip_prefix("--") else {
                return Err(format!("unexpected argument `{a}`"));
            };
            let val = it
                .next()
                .ok_or_else(|| format!("flag --{key} expects a value"))?;
            flags.insert(key.to_string(), val.clone());
        }
        Ok(Args { flags })
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.flags.get(key).map(|s| s.as_str())
    }

    fn num<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T, String> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| format!("flag --{key} expects a number, got `{v}`")),
        }
    }

    fn require_known(&self, known: &[&str]) -> Result<(), String> {
        for k in self.flags.keys() {
            if !known.contains(&k.as_str()) {
                return Err(format!("unknown flag --{k}"));
            }
        }
        Ok(())
    }
}

const USAGE: &str = "usage:
  qvertex verify --suite <def21|hopf|rmatrix|normalization|ope|thm35|all> --n N
                 [--degree D] [--window M] [--order N] [--modes K] [--sector i]
                 [--lattice-radius R] [--threads T] [--format json|text] [--out PATH]
  qvertex corr   --n N --ops <designators> --order N [--format json|text] [--out PATH]
  qvertex dump   --op <designator> --n N [--modes K]

operator designators: x+:i | x-:i | phi:i | psi:i
                      (PhiI|PsiII|PhiI*|PsiII*):a:b[:j=J][@var]";

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    match run(&argv) {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}\n{USAGE}");
            ExitCode::from(2)
        }
        Err(CliError::Engine(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}

enum CliError {
    Usage(String),
    Engine(EngineError),
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::Validation(_) | EngineError::Domain(_) | EngineError::PhaseSum(_) => {
                CliError::Engine(e)
            }
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn run(argv: &[String]) -> Result<ExitCode, CliError> {
    let Some(cmd) = argv.first() else {
        return Err(usage("missing subcommand"));
    };
    let args = Args::parse(&argv[1..]).map_err(usage)?;
    match cmd.as_str() {
        "verify" => cmd_verify(&args),
        "corr" => cmd_corr(&args),
        "dump" => cmd_dump(&args),
        other => Err(usage(format!("unknown subcommand `{other}`"))),
    }
}

fn engine_for(args: &Args) -> Result<Engine, CliError> {
    let n: usize = args.num("n", 0).map_err(usage)?;
    if n < 2 {
        return Err(usage("--n must be at least 2"));
    }
    if n > 6 {
        eprintln!(
            "note: n = {n} exceeds the desk-scale guard (n ≤ 6); expect long runtimes"
        );
    }
    Ok(Engine::new(n)?)
}

fn with_threads<T: Send>(
    args: &Args,
    f: impl FnOnce() -> T + Send,
) -> Result<T, CliError> {
    let threads: usize = match args.get("threads") {
        Some(v) => v
            .parse()
            .map_err(|_| usage(format!("--threads expects a number, got `{v}`")))?,
        None => match std::env::var("QVERTEX_THREADS") {
            Ok(v) => v
                .parse()
                .map_err(|_| usage("QVERTEX_THREADS must be a number"))?,
            Err(_) => 0, // rayon default: available parallelism
        },
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| usage(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

fn emit_report(args: &Args, reports: &[Report]) -> Result<ExitCode, CliError> {
    let format = args.get("format").unwrap_or("json");
    let body = match format {
        "json" => {
            if reports.len() == 1 {
                reports[0].to_json()
            } else {
                let items: Vec<String> = reports.iter().map(|r| r.to_json()).collect();
                format!("[\n{}\n]", items.join(",\n"))
            }
        }
        "text" => reports
            .iter()
            .map(|r| r.text_summary())
            .collect::<Vec<_>>()
            .join("\n"),
        other => return Err(usage(format!("unknown format `{other}`"))),
    };
    match args.get("out") {
        Some(path) => {
            std::fs::write(path, &body)
                .map_err(|e| CliError::Engine(EngineError::validation(e.to_string())))?;
            for r in reports {
                println!(
                    "suite {}: {}",
                    r.suite,
                    if r.all_pass() { "pass" } else { "FAIL" }
                );
            }
        }
        None => println!("{body}"),
    }
    if reports.iter().all(|r| r.all_pass()) {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}

fn cmd_verify(args: &Args) -> Result<ExitCode, CliError> {
    args.require_known(&[
        "suite", "n", "degree", "window", "order", "modes", "sector",
        "lattice-radius", "threads", "format", "out",
    ])
    .map_err(usage)?;
    let suite = args.get("suite").ok_or_else(|| usage("missing --suite"))?.to_string();
    let engine = engine_for(args)?;
    let degree: i64 = args.num("degree", 2).map_err(usage)?;
    let window: i64 = args.num("window", 2).map_err(usage)?;
    let order: i64 = args.num("order", 10).map_err(usage)?;
    let modes: i64 = args.num("modes", 20).map_err(usage)?;
    let sector: usize = args.num("sector", 0).map_err(usage)?;
    let radius: i64 = args.num("lattice-radius", 1).map_err(usage)?;
    if degree < 0 || window < 1 || order < 1 || modes < 1 {
        return Err(usage("bounds must be positive"));
    }
    let run_suite = move || -> Result<Vec<Report>, EngineError> {
        let mut reports = Vec::new();
        let all = suite == "all";
        if all || suite == "def21" {
            reports.push(engine.verify_defining_relations(sector, degree, window, radius)?);
        }
        if all || suite == "hopf" {
            reports.push(engine.verify_hopf(degree, window, radius)?);
        }
        if all || suite == "rmatrix" {
            reports.push(engine.verify_rmatrix(order, 3)?);
        }
        if all || suite == "normalization" {
            reports.push(engine.verify_normalization()?);
        }
        if all || suite == "ope" {
            for sub in ["typeI", "typeII", "dualI", "dualII", "locality"] {
                reports.push(engine.verify_ope(sub)?);
            }
        }
        if all || suite == "thm35" {
            reports.push(engine.verify_reconstruction(modes)?);
        }
        if reports.is_empty() {
            return Err(EngineError::validation(format!("unknown suite `{suite}`")));
        }
        Ok(reports)
    };
    let reports = with_threads(args, run_suite)?;
    let reports = match reports {
        Ok(r) => r,
        Err(EngineError::Validation(msg)) if msg.starts_with("unknown suite") => {
            return Err(usage(msg))
        }
        Err(e) => return Err(e.into()),
    };
    emit_report(args, &reports)
}

/// `family:a:b[:j=J][@var]` or `x+:i | x-:i | phi:i | psi:i [@var]`.
struct Designator {
    template: VertexTemplate,
    var: String,
    /// source and target sectors for vertex-operator components
    sectors: Option<(usize, usize)>,
    /// type-I component labels (sup, j) when applicable
    type_i_labels: Option<(usize, usize)>,
}

fn parse_designator(engine: &Engine, text: &str) -> Result<Designator, String> {
    let n = engine.n();
    let (body, var) = match text.split_once('@') {
        Some((b, v)) => (b, v.to_string()),
        None => (text, "z".to_string()),
    };
    let parts: Vec<&str> = body.split(':').collect();
    let fam = parts[0];
    if let Some(kind) = CurrentKind::parse(fam) {
        if parts.len() != 2 {
            return Err(format!("`{text}`: currents take one index"));
        }
        let i: usize = parts[1].parse().map_err(|_| format!("bad index in `{text}`"))?;
        if i == 0 || i >= n {
            return Err(format!("current index {i} out of range 1..{n}"));
        }
        return Ok(Designator {
            template: engine.fj_current(kind, i, &var),
            var,
            sectors: None,
            type_i_labels: None,
        });
    }
    let family = VoFamily::parse(fam).ok_or_else(|| format!("unknown family `{fam}`"))?;
    if parts.len() < 3 {
        return Err(format!("`{text}`: vertex operators take two sector labels"));
    }
    let a: usize = parts[1].parse().map_err(|_| format!("bad label in `{text}`"))?;
    let b: usize = parts[2].parse().map_err(|_| format!("bad label in `{text}`"))?;
    let (sup, source, target) = if family.dual() {
        // (i+1, i): F_i → F_{i+1}
        if (b + 1) % n != a % n {
            return Err(format!("`{text}`: labels must be consecutive modulo n"));
        }
        (b % n, b % n, a % n)
    } else {
        // (i, i+1): F_{i+1} → F_i
        if (a + 1) % n != b % n {
            return Err(format!("`{text}`: labels must be consecutive modulo n"));
        }
        (a % n, b % n, a % n)
    };
    let mut j = sup;
    if parts.len() >= 4 {
        let jpart = parts[3]
            .strip_prefix("j=")
            .ok_or_else(|| format!("`{text}`: expected j=<index>"))?;
        j = jpart.parse().map_err(|_| format!("bad component in `{text}`"))?;
        if j >= n {
            return Err(format!("component {j} out of range 0..{n}"));
        }
    }
    if parts.len() > 4 {
        return Err(format!("`{text}`: too many fields"));
    }
    let type_i_labels = if family == VoFamily::TypeI { Some((sup, j)) } else { None };
    Ok(Designator {
        template: engine.vo(family, sup, j, &var),
        var,
        sectors: Some((source, target)),
        type_i_labels,
    })
}

fn cmd_corr(args: &Args) -> Result<ExitCode, CliError> {
    args.require_known(&["n", "ops", "order", "format", "out", "threads"])
        .map_err(usage)?;
    let engine = engine_for(args)?;
    let order: i64 = args.num("order", 0).map_err(usage)?;
    if order < 1 {
        return Err(usage("--order must be at least 1"));
    }
    let ops_text = args.get("ops").ok_or_else(|| usage("missing --ops"))?;
    let mut ops = Vec::new();
    let mut labels = Vec::new();
    for part in ops_text.split(',') {
        let d = parse_designator(&engine, part.trim()).map_err(usage)?;
        let sectors = d
            .sectors
            .ok_or_else(|| usage("correlators take vertex-operator designators"))?;
        labels.push((d.type_i_labels, sectors));
        ops.push((d.template, d.var));
    }
    // sector composition right to left
    for w in labels.windows(2) {
        let (_, (_, target_right)) = (&w[1].0, &w[1].1);
        let (_, (source_left, _)) = (&w[0].0, &w[0].1);
        if target_right != source_left {
            return Err(CliError::Engine(EngineError::domain(format!(
                "operators do not compose: F_{target_right} feeds an operator on F_{source_left}"
            ))));
        }
    }
    let corr = engine.correlator(&ops, order)?;
    let mut out = String::new();
    out.push_str(&format!(
        "homogeneity: {}/{}\n",
        corr.homogeneity.numer(),
        corr.homogeneity.denom()
    ));
    out.push_str(&corr.series.dump());
    // registered product formula, for two type-I components
    if ops.len() == 2 {
        if let (Some(l), Some(r)) = (labels[0].0, labels[1].0) {
            if let Some(reference) = reference_formula(engine.n(), l, r) {
                let rs = reference
                    .series(corr.series.var(), order)
                    .map_err(CliError::from)?;
                out.push_str("reference product formula:\n");
                out.push_str(&rs.dump());
                out.push_str(&format!(
                    "reference homogeneity: {}/{}\n",
                    reference.homogeneity.numer(),
                    reference.homogeneity.denom()
                ));
                let verdict = if corr.series.agrees_with(&rs)
                    && corr.homogeneity == reference.homogeneity
                {
                    "match".to_string()
                } else if let Some(e) = corr.series.first_difference(&rs) {
                    format!(
                        "MISMATCH first at {}^{}/{}",
                        corr.series.var(),
                        e.numer(),
                        e.denom()
                    )
                } else {
                    "MISMATCH in homogeneity".to_string()
                };
                out.push_str(&format!("verdict: {verdict}\n"));
            } else {
                out.push_str("verdict: no reference formula registered\n");
            }
        }
    }
    match args.get("out") {
        Some(path) => std::fs::write(path, &out)
            .map_err(|e| CliError::Engine(EngineError::validation(e.to_string())))?,
        None => print!("{out}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_dump(args: &Args) -> Result<ExitCode, CliError> {
    args.require_known(&["op", "n", "modes"]).map_err(usage)?;
    let engine = engine_for(args)?;
    let modes: i64 = args.num("modes", 8).map_err(usage)?;
    let op = args.get("op").ok_or_else(|| usage("missing --op"))?;
    let d = parse_designator(&engine, op).map_err(usage)?;
    print!("{}", d.template.dump(&engine, modes));
    Ok(ExitCode::SUCCESS)
}
