use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use evidfuse::diagnosis::DEFAULT_THRESHOLD;
use evidfuse::io::{load_diagnosis, load_named_evidence, DiagnosisDocument};
use evidfuse::reproduce::{reproduce, Status, TableId};
use evidfuse::{
    dcr_nary, diagnose, idcr_fuse, yager_nary, CombinationMode, Error, EvidenceSet, FusionReport, MassFunction,
};

const EXIT_INVALID: u8 = 1;
const EXIT_UNDEFINED: u8 = 2;
const EXIT_UNDECIDED: u8 = 3;
const EXIT_MISMATCH: u8 = 4;

#[derive(Parser)]
#[command(
    name = "evidfuse",
    version,
    about = "Dempster-Shafer evidence fusion and fault diagnosis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check an evidence (.json) or diagnosis (.csv) file.
    Validate { file: PathBuf },
    /// Combine the sources of an evidence file.
    Fuse {
        #[arg(long, value_enum)]
        rule: Rule,
        #[arg(long, default_value = "same-focal")]
        mode: CombinationMode,
        /// Use only the first k sources.
        #[arg(long)]
        prefix: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        file: PathBuf,
    },
    /// Run fault diagnosis on a feature table.
    Diagnose {
        #[arg(long)]
        xi1: Option<f64>,
        #[arg(long)]
        xi2: Option<f64>,
        /// Use only the first k sensors.
        #[arg(long)]
        prefix: Option<usize>,
        #[arg(long, default_value = "same-focal")]
        mode: CombinationMode,
        file: PathBuf,
    },
    /// Recompute a worked example and diff it against the printed values.
    Reproduce { table: TableId },
}

#[derive(Clone, Copy, ValueEnum)]
enum Rule {
    Dcr,
    Yager,
    Idcr,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Validate { file } => validate(&file),
        Command::Fuse {
            rule,
            mode,
            prefix,
            format,
            file,
        } => fuse(rule, mode, prefix, format, &file),
        Command::Diagnose {
            xi1,
            xi2,
            prefix,
            mode,
            file,
        } => run_diagnose(xi1, xi2, prefix, mode, &file),
        Command::Reproduce { table } => run_reproduce(table),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_total_conflict() {
                EXIT_UNDEFINED
            } else {
                EXIT_INVALID
            })
        }
    }
}

fn validate(file: &Path) -> Result<u8, Error> {
    if file.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        let doc = load_diagnosis(file)?;
        let lib = doc.library()?;
        doc.sensor_vectors()?
            .iter()
            .try_for_each(|s| evidfuse::bpa_from_features(s, &lib).map(drop))?;
        println!(
            "ok: {} faults, {} features, {} sensors",
            doc.faults.len(),
            lib.feature_count(),
            doc.sensors.len()
        );
    } else {
        let (names, ev) = load_named_evidence(file)?;
        println!(
            "ok: {} evidences ({}) over frame {{{}}}",
            ev.len(),
            names.join(", "),
            ev.frame().labels().join(",")
        );
    }
    Ok(0)
}

fn take_prefix(ev: EvidenceSet, prefix: Option<usize>) -> Result<EvidenceSet, Error> {
    match prefix {
        Some(k) => ev.prefix(k),
        None => Ok(ev),
    }
}

fn fuse(rule: Rule, mode: CombinationMode, prefix: Option<usize>, format: Format, file: &Path) -> Result<u8, Error> {
    let (names, ev) = load_named_evidence(file)?;
    let ev = take_prefix(ev, prefix)?;
    let names = &names[..ev.len()];
    let (rule_name, fused, report) = match rule {
        Rule::Dcr => ("dcr", dcr_nary(&ev)?, None),
        Rule::Yager => ("yager", yager_nary(&ev)?, None),
        Rule::Idcr => {
            let report = idcr_fuse(&ev, mode)?;
            ("idcr", report.fused.clone(), Some(report))
        }
    };
    let out = match format {
        Format::Table => fuse_table(rule_name, names, &fused, report.as_ref()),
        Format::Json => fuse_json(rule_name, names, &fused, report.as_ref()),
        Format::Csv => fuse_csv(names, &fused, report.as_ref()),
    };
    print!("{out}");
    Ok(0)
}

fn masses_json(m: &MassFunction) -> serde_json::Value {
    let frame = m.frame();
    m.iter()
        .map(|(s, v)| json!({ "focal": frame.set_labels(s), "mass": v }))
        .collect()
}

fn fuse_json(rule: &str, names: &[String], fused: &MassFunction, report: Option<&FusionReport>) -> String {
    let mut doc = json!({
        "rule": rule,
        "evidences": names,
        "frame": fused.frame().labels(),
        "fused": masses_json(fused),
    });
    if let Some(r) = report {
        doc["mode"] = json!(r.mode.as_str());
        doc["average"] = masses_json(&r.average);
        doc["distances"] = json!(r.distances);
        doc["similarities"] = json!(r.similarities);
        doc["supports"] = json!(r.supports);
        doc["entropies"] = json!(r.entropies);
        doc["weights"] = json!(r.weights);
        doc["modified"] = masses_json(&r.modified);
    }
    let mut s = serde_json::to_string_pretty(&doc).expect("json value serializes");
    s.push('\n');
    s
}

fn fuse_csv(names: &[String], fused: &MassFunction, report: Option<&FusionReport>) -> String {
    let frame = fused.frame();
    let mut rows: Vec<[String; 4]> = Vec::new();
    let bpa = |rows: &mut Vec<[String; 4]>, q: &str, m: &MassFunction| {
        for (s, v) in m.iter() {
            rows.push([q.into(), String::new(), frame.format_set(s), format!("{v:.4}")]);
        }
    };
    if let Some(r) = report {
        bpa(&mut rows, "average", &r.average);
        for (i, name) in names.iter().enumerate() {
            for (q, v) in [
                ("distance", r.distances[i]),
                ("similarity", r.similarities[i]),
                ("support", r.supports[i]),
                ("entropy", r.entropies[i]),
                ("weight", r.weights[i]),
            ] {
                rows.push([q.into(), name.clone(), String::new(), format!("{v:.4}")]);
            }
        }
        bpa(&mut rows, "modified", &r.modified);
    }
    bpa(&mut rows, "fused", fused);

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["quantity", "source", "focal", "value"])
        .expect("write to memory");
    for r in &rows {
        w.write_record(r).expect("write to memory");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

fn bpa_lines(out: &mut String, title: &str, m: &MassFunction) {
    let frame = m.frame();
    let _ = writeln!(out, "{title}:");
    for (s, v) in m.iter() {
        let _ = writeln!(out, "  {:<16} {v:.4}", frame.format_set(s));
    }
}

fn fuse_table(rule: &str, names: &[String], fused: &MassFunction, report: Option<&FusionReport>) -> String {
    let mut out = String::new();
    let _ = write!(out, "rule: {rule}");
    if let Some(r) = report {
        let _ = write!(out, " ({})", r.mode);
    }
    let _ = writeln!(out, ", evidences: {}", names.join(", "));
    if let Some(r) = report {
        bpa_lines(&mut out, "average", &r.average);
        let _ = writeln!(
            out,
            "  {:<8} {:>10} {:>10} {:>10} {:>10} {:>10}",
            "source", "distance", "similarity", "support", "entropy", "weight"
        );
        for (i, name) in names.iter().enumerate() {
            let _ = writeln!(
                out,
                "  {:<8} {:>10.4} {:>10.4} {:>10.4} {:>10.4} {:>10.4}",
                name, r.distances[i], r.similarities[i], r.supports[i], r.entropies[i], r.weights[i]
            );
        }
        bpa_lines(&mut out, "modified", &r.modified);
    }
    bpa_lines(&mut out, "fused", fused);
    out
}

fn threshold(flag: Option<f64>, doc: Option<f64>, name: &str) -> Result<f64, Error> {
    let v = flag.or(doc).unwrap_or(DEFAULT_THRESHOLD);
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(Error::InvalidThreshold(format!("{name} = {v} must lie in (0, 1)")))
    }
}

fn run_diagnose(
    xi1: Option<f64>,
    xi2: Option<f64>,
    prefix: Option<usize>,
    mode: CombinationMode,
    file: &Path,
) -> Result<u8, Error> {
    let doc: DiagnosisDocument = load_diagnosis(file)?;
    let xi1 = threshold(xi1, doc.xi1, "xi1")?;
    let xi2 = threshold(xi2, doc.xi2, "xi2")?;
    let lib = doc.library()?;
    let sensors = doc.sensor_vectors()?;
    let n = match prefix {
        Some(k) if k > sensors.len() || k < 2 => {
            return Err(Error::TooFewEvidences {
                what: "diagnosis prefix",
                needed: k.max(2),
                got: sensors.len(),
            })
        }
        Some(k) => k,
        None => sensors.len(),
    };
    let frame = lib.frame().clone();
    let labels = frame.labels();

    let full = evidfuse::diagnose(&sensors[..n], &lib, xi1, xi2, mode)?;
    let mut out = String::new();
    let header: String = labels.iter().map(|l| format!(" {l:>8}")).collect();
    let _ = writeln!(out, "sensor BPAs:\n  {:<10}{header}", "sensor");
    for ((name, _), m) in doc.sensors.iter().zip(full.bpas.iter()) {
        let cells: String = (0..labels.len())
            .map(|i| format!(" {:>8.4}", m.get(evidfuse::FocalSet::singleton(i))))
            .collect();
        let _ = writeln!(out, "  {name:<10}{cells}");
    }
    let _ = writeln!(out, "fused ({mode}):\n  {:<10}{header}", "sources");
    let first = if prefix.is_some() { n } else { 2 };
    for k in first..=n {
        let d = if k == n {
            full.clone()
        } else {
            diagnose(&sensors[..k], &lib, xi1, xi2, mode)?
        };
        let cells: String = (0..labels.len())
            .map(|i| format!(" {:>8.4}", d.report.fused.get(evidfuse::FocalSet::singleton(i))))
            .collect();
        let _ = writeln!(out, "  {:<10}{cells}", format!("m1..{k}"));
    }
    let d = &full.decision;
    let _ = writeln!(
        out,
        "decision: {} (margin {:.4}, ignorance {:.4}, xi1 {xi1}, xi2 {xi2})",
        d.describe(&frame),
        d.margin,
        d.ignorance
    );
    print!("{out}");
    Ok(if d.is_fault() { 0 } else { EXIT_UNDECIDED })
}

fn tolerance_override() -> Result<Option<f64>, Error> {
    match std::env::var("EVIDFUSE_TOLERANCE") {
        Ok(v) => v
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|t| t.is_finite() && *t >= 0.0)
            .map(Some)
            .ok_or_else(|| Error::Parse(format!("EVIDFUSE_TOLERANCE={v:?} is not a nonnegative number"))),
        Err(_) => Ok(None),
    }
}

fn run_reproduce(table: TableId) -> Result<u8, Error> {
    let r = reproduce(table, tolerance_override()?)?;
    print!("{}", r.to_csv());
    for note in &r.notes {
        eprintln!("note: {note}");
    }
    let compared = r.cells.iter().filter(|c| c.status() != Status::Info).count();
    let failed = r.failures();
    for c in &failed {
        eprintln!(
            "mismatch: {} / {}: expected {}, got {}",
            c.row,
            c.column,
            c.expected.as_ref().map(ToString::to_string).unwrap_or_default(),
            c.actual
        );
    }
    eprintln!("{table}: {}/{compared} cells within tolerance", compared - failed.len());
    Ok(if failed.is_empty() { 0 } else { EXIT_MISMATCH })
}
