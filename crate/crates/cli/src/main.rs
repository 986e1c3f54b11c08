use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use log::info;

use ksol::catalog::{self, CatalogEntry};
use ksol::classify;
use ksol::geometry::{self, validate};
use ksol::par::{self, Parallelism};
use ksol::report::{CandidateRecord, CaseRecord, Report};
use ksol::stability::{certify_prepared, find_candidate, verify_candidate, Config, Prepared, StabilityVerdict, Status};
use ksol::Precision;

#[derive(Parser, Debug)]
#[command(name = "ksol", version, about = "Certified K-stability of complexity-one T-varieties")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Starting precision in bits.
    #[arg(long, global = true, default_value_t = 53)]
    precision: u32,
    /// Precision cap in bits.
    #[arg(long, global = true, env = "KSOL_MAX_BITS", default_value_t = 4096)]
    max_bits: u32,
    /// Target width of a 1-D candidate interval.
    #[arg(long, global = true, default_value_t = 1e-5)]
    width: f64,
    /// Half-width of the candidate box in two or more directions.
    #[arg(long, global = true, default_value_t = 1e-5)]
    epsilon: f64,
    /// Segments per boundary face of the candidate box.
    #[arg(long, global = true, default_value_t = 3000)]
    segments: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Worker threads; 1 runs sequentially.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check conditions (i)-(v) on a divisorial polytope.
    Validate { target: String },
    /// Degree, Cox ring, admissible points and symmetries.
    Info { target: String },
    /// Certified box containing the soliton candidate.
    Candidate { target: String },
    /// Full verdict with all Donaldson-Futaki intervals.
    Certify { target: String },
    /// Certify every builtin surface (or threefold) against the expected column.
    Table {
        #[arg(long)]
        threefolds: bool,
    },
    /// Write an entry in canonical catalog form.
    Export { target: String, path: PathBuf },
    /// Re-check every candidate in a structured report.
    Verify { report: PathBuf },
}

fn exit_code(status: Status) -> u8 {
    match status {
        Status::Stable => 0,
        Status::Unstable => 2,
        Status::Indeterminate => 3,
        Status::KahlerEinsteinCandidate => 4,
    }
}

impl Cli {
    fn config(&self) -> Result<Config> {
        let precision = Precision::new(self.precision)?;
        let max_precision = Precision::new(self.max_bits)?;
        if precision > max_precision {
            bail!("--precision {} exceeds --max-bits {}", self.precision, self.max_bits);
        }
        if !(self.width > 0.0) || !(self.epsilon > 0.0) || self.segments == 0 {
            bail!("--width, --epsilon and --segments must be positive");
        }
        Ok(Config {
            precision,
            max_precision,
            width_target: self.width,
            epsilon: self.epsilon,
            segments: self.segments,
            parallelism: Parallelism::from_jobs(self.jobs),
        })
    }
}

fn load(target: &str) -> Result<CatalogEntry> {
    Ok(catalog::resolve(target)?)
}

fn load_unchecked(target: &str) -> Result<CatalogEntry> {
    if let Some(e) = catalog::find(target) {
        return Ok(e.clone());
    }
    let text = std::fs::read_to_string(target).with_context(|| format!("reading {target}"))?;
    Ok(catalog::parse_entry(&text)?)
}

fn json<T: serde::Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn fmt_xi(rec: &Option<CandidateRecord>) -> String {
    match rec {
        Some(c) => c.midpoint.join(", "),
        None => "-".into(),
    }
}

fn verdict_text(entry: &CatalogEntry, v: &StabilityVerdict, rec: &CaseRecord) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}: {}", entry.id, v.status);
    if let Some(c) = &v.candidate {
        let bounds: Vec<String> = c
            .xi(Precision::DEFAULT)
            .iter()
            .map(|x| {
                let (a, b) = x.to_decimal(10);
                format!("[{a}, {b}]")
            })
            .collect();
        let _ = writeln!(out, "  candidate ξ ∈ {} ({})", bounds.join(" × "), c.evidence.kind());
    }
    for d in &rec.donaldson_futaki {
        let _ = writeln!(
            out,
            "  DF{} ∈ [{}, {}]  normalized [{}, {}]  {:?}",
            d.test_configuration, d.raw.lower, d.raw.upper, d.normalized.lower, d.normalized.upper, d.sign
        );
    }
    if let Some(d) = &v.destabilizer {
        let _ = writeln!(out, "  destabilizer y={}", d.y);
    }
    if let Some(n) = &v.note {
        let _ = writeln!(out, "  note: {n}");
    }
    let _ = writeln!(out, "  precision {} bits", v.precision_used.bits());
    out
}

fn run_certify(entry: &CatalogEntry, cfg: &Config) -> Result<(StabilityVerdict, CaseRecord)> {
    let prep = Prepared::new(&entry.dp)?;
    let v = certify_prepared(&prep, cfg, None)?;
    let rec = CaseRecord::new(entry, &v);
    Ok((v, rec))
}

fn cmd_validate(cli: &Cli, target: &str) -> Result<u8> {
    let entry = load_unchecked(target)?;
    let report = validate(&entry.dp);
    if cli.format == Format::Structured {
        print!("{}", json(&report)?);
    } else {
        for r in &report.results {
            let mark = if r.passed { "pass" } else { "FAIL" };
            print!("({}) {mark}  {}", r.condition.roman(), r.condition.description());
            if let Some(w) = &r.witness {
                print!("  [{w}]");
            }
            println!();
        }
        println!("origin: {:?}", report.origin);
    }
    Ok(if report.is_valid() { 0 } else { 1 })
}

fn cmd_info(cli: &Cli, target: &str) -> Result<u8> {
    let entry = load(target)?;
    let dp = &entry.dp;
    let degree = geometry::degree(dp)?;
    let cox = classify::cox_ring(dp)?;
    let adm = geometry::admissible_points(dp)?;
    let syms = geometry::symmetries(dp);
    if cli.format == Format::Structured {
        let v = serde_json::json!({
            "id": entry.id,
            "dimension": dp.dim() + 1,
            "degree": degree.to_string(),
            "cox_ring": cox.to_string(),
            "cox_variables": cox.variable_count(),
            "admissible": adm.iter().map(|y| y.key().to_string()).collect::<Vec<_>>(),
            "symmetries": syms.iter().map(|s| s.to_i64_rows()).collect::<Vec<_>>(),
        });
        print!("{}", json(&v)?);
    } else {
        println!("{}", entry.id);
        println!("  dimension   {}", dp.dim() + 1);
        println!("  degree      {degree}");
        println!("  Cox ring    {cox}  ({} variables)", cox.variable_count());
        let a: Vec<String> = adm.iter().map(|y| y.to_string()).collect();
        println!("  admissible  {{{}}}", a.join(", "));
        let s: Vec<String> = syms.iter().map(|s| s.to_string()).collect();
        println!("  symmetries  {}", s.join(", "));
    }
    Ok(0)
}

fn cmd_candidate(cli: &Cli, target: &str) -> Result<u8> {
    let entry = load(target)?;
    let cfg = cli.config()?;
    let prep = Prepared::new(&entry.dp)?;
    let c = find_candidate(&prep, &cfg, None)?;
    let rec = CandidateRecord::new(&c);
    if cli.format == Format::Structured {
        print!("{}", json(&rec)?);
    } else {
        println!("{}: {}", entry.id, c.evidence.kind());
        for (i, x) in c.xi(Precision::DEFAULT).iter().enumerate() {
            let (a, b) = x.to_decimal(12);
            println!("  ξ{} ∈ [{a}, {b}]", i + 1);
        }
        match &rec.evidence {
            ksol::report::EvidenceRecord::Ivt1d { f_lower, f_upper, .. } => {
                println!("  F at lower end ∈ [{}, {}]", f_lower.lower, f_lower.upper);
                println!("  F at upper end ∈ [{}, {}]", f_upper.lower, f_upper.upper);
            }
            ksol::report::EvidenceRecord::BoxGradient {
                min_gradient_lower,
                segments,
                ..
            } => println!("  outward gradient > {min_gradient_lower} on {segments} segments per face"),
            ksol::report::EvidenceRecord::ZeroField { reason, .. } => println!("  ξ = 0 ({reason:?})"),
        }
    }
    Ok(0)
}

fn cmd_certify(cli: &Cli, target: &str) -> Result<u8> {
    let entry = load(target)?;
    let cfg = cli.config()?;
    let (v, rec) = run_certify(&entry, &cfg)?;
    if cli.format == Format::Structured {
        print!("{}", json(&Report::new("certify", &cfg, vec![rec]))?);
    } else {
        print!("{}", verdict_text(&entry, &v, &rec));
    }
    Ok(exit_code(v.status))
}

fn mark(s: Status) -> &'static str {
    match s {
        Status::Stable => "✓",
        Status::Unstable | Status::KahlerEinsteinCandidate => "✗",
        Status::Indeterminate => "?",
    }
}

fn cmd_table(cli: &Cli, threefolds: bool) -> Result<u8> {
    let cfg = cli.config()?;
    let entries: Vec<&CatalogEntry> = catalog::builtin()
        .iter()
        .filter(|e| e.is_surface() != threefolds)
        .collect();
    let mut records = Vec::new();
    for e in &entries {
        let t = std::time::Instant::now();
        let (_, rec) = run_certify(e, &cfg)?;
        info!("{} {:?} in {:.2}s", e.id, rec.status, t.elapsed().as_secs_f64());
        records.push(rec);
    }
    let all_match = records.iter().all(|r| r.matches_expected != Some(false));
    if cli.format == Format::Structured {
        print!("{}", json(&Report::new("table", &cfg, records))?);
    } else {
        println!(
            "{:<11} {:>4} {:<10} {:>3}  {:<28} {:<18} {:<4} {:<4} {:<24} ok",
            "id", "deg", "sing", "ρ", "ξ (certified midpoint)", "ξ (reference)", "K", "ref", "status"
        );
        for (e, r) in entries.iter().zip(&records) {
            let expected = r.expected_status.map(mark).unwrap_or("-");
            println!(
                "{:<11} {:>4} {:<10} {:>3}  {:<28} {:<18} {:<4} {:<4} {:<24} {}",
                e.id,
                r.degree,
                e.expected.singularity.clone().unwrap_or_else(|| "-".into()),
                e.expected.rho.map(|x| x.to_string()).unwrap_or_default(),
                fmt_xi(&r.candidate),
                r.xi_reference.clone().map(|x| x.join(", ")).unwrap_or_default(),
                mark(r.status),
                expected,
                r.status.to_string(),
                match r.matches_expected {
                    Some(true) => "yes",
                    Some(false) => "NO",
                    None => "-",
                }
            );
            if threefolds {
                for d in &r.donaldson_futaki {
                    println!("    DF{} ∈ [{}, {}]", d.test_configuration, d.raw.lower, d.raw.upper);
                }
            }
        }
        let n = records.iter().filter(|r| r.matches_expected == Some(true)).count();
        println!("{n}/{} rows match", records.len());
    }
    Ok(if all_match { 0 } else { 1 })
}

fn cmd_export(target: &str, path: &PathBuf) -> Result<u8> {
    let entry = load(target)?;
    catalog::export(&entry, path)?;
    Ok(0)
}

fn cmd_verify(cli: &Cli, path: &PathBuf) -> Result<u8> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let report: Report = serde_json::from_str(&text).context("parsing report")?;
    let mut ok = true;
    for case in &report.cases {
        let entry = load(&case.id)?;
        let Some(rec) = &case.candidate else {
            println!("{}: no candidate", case.id);
            continue;
        };
        let cand = rec.to_candidate().map_err(anyhow::Error::msg)?;
        let prep = Prepared::new(&entry.dp)?;
        let good = verify_candidate(&prep, &cand, Parallelism::from_jobs(cli.jobs))?;
        println!("{}: {}", case.id, if good { "verified" } else { "FAILED" });
        ok &= good;
    }
    Ok(if ok { 0 } else { 1 })
}

fn run(cli: &Cli) -> Result<u8> {
    par::set_workers(cli.jobs);
    match &cli.command {
        Command::Validate { target } => cmd_validate(cli, target),
        Command::Info { target } => cmd_info(cli, target),
        Command::Candidate { target } => cmd_candidate(cli, target),
        Command::Certify { target } => cmd_certify(cli, target),
        Command::Table { threefolds } => cmd_table(cli, *threefolds),
        Command::Export { target, path } => cmd_export(target, path),
        Command::Verify { report } => cmd_verify(cli, report),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
