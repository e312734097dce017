//! Manifest, sample-file and report serialization.
//!
//! Sample files are little-endian: the magic `SMLB`, a `u32` version (1), a
//! `u64` sample count, `f64` spacing, `f64` origin, then the values as `f64`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use smlb::grid::{GridFunction, GridSpec};
use smlb::testlab::{generate, GeneratorKind, GeneratorSpec};
use smlb::verify::{Row, SuiteReport};
use smlb::{Error, Result};

pub const MAGIC: &[u8; 4] = b"SMLB";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 32;

/// One line of the corpus manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestRecord {
    pub id: String,
    pub kind: GeneratorKind,
    pub params: BTreeMap<String, f64>,
    pub seed: u64,
    pub dx: f64,
    #[serde(rename = "L")]
    pub half_width: f64,
    pub smooth_tag: bool,
}

impl ManifestRecord {
    pub fn spec(&self) -> GeneratorSpec {
        GeneratorSpec { kind: self.kind, params: self.params.clone(), seed: self.seed }
    }
}

pub fn manifest_records(corpus: &[(String, GeneratorSpec)], grid: &GridSpec) -> Result<Vec<ManifestRecord>> {
    corpus
        .iter()
        .map(|(id, spec)| {
            let g = generate(spec, grid)?;
            Ok(ManifestRecord {
                id: id.clone(),
                kind: spec.kind,
                params: spec.params.clone(),
                seed: spec.seed,
                dx: grid.spacing,
                half_width: grid.half_width,
                smooth_tag: g.smooth_tag,
            })
        })
        .collect()
}

pub fn manifest_to_string(records: &[ManifestRecord]) -> String {
    records
        .iter()
        .map(|r| serde_json::to_string(r).expect("manifest records serialize") + "\n")
        .collect()
}

/// Parses a manifest; every record must share one grid and ids must be unique.
pub fn parse_manifest(text: &str) -> Result<(GridSpec, Vec<(String, GeneratorSpec)>)> {
    let mut grid: Option<GridSpec> = None;
    let mut out: Vec<(String, GeneratorSpec)> = Vec::new();
    for (n, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let bad = |msg: String| Error::Format(format!("manifest line {}: {msg}", n + 1));
        let rec: ManifestRecord = serde_json::from_str(line).map_err(|e| bad(e.to_string()))?;
        let g = GridSpec::new(rec.dx, rec.half_width).map_err(|e| bad(e.to_string()))?;
        match grid {
            None => grid = Some(g),
            Some(prev) if prev != g => return Err(bad(format!("grid {g:?} differs from {prev:?}"))),
            _ => {}
        }
        if out.iter().any(|(id, _)| *id == rec.id) {
            return Err(bad(format!("duplicate id {:?}", rec.id)));
        }
        let generated = generate(&rec.spec(), &g).map_err(|e| bad(e.to_string()))?;
        if generated.smooth_tag != rec.smooth_tag {
            return Err(bad(format!("smooth_tag {} does not match the generator", rec.smooth_tag)));
        }
        out.push((rec.id.clone(), rec.spec()));
    }
    let grid = grid.ok_or(Error::EmptyCorpus)?;
    Ok((grid, out))
}

pub fn read_manifest(path: &Path) -> Result<(GridSpec, Vec<(String, GeneratorSpec)>)> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_manifest(&text)
}

pub fn encode_samples(f: &GridFunction) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * f.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(f.len() as u64).to_le_bytes());
    out.extend_from_slice(&f.spacing().to_le_bytes());
    out.extend_from_slice(&f.origin().to_le_bytes());
    for v in f.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_samples(bytes: &[u8]) -> Result<GridFunction> {
    let bad = |msg: &str| Error::Format(format!("sample file: {msg}"));
    if bytes.len() < HEADER_LEN || &bytes[..4] != MAGIC {
        return Err(bad("missing SMLB header"));
    }
    let u32_at = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().expect("4 bytes"));
    let u64_at = |i: usize| u64::from_le_bytes(bytes[i..i + 8].try_into().expect("8 bytes"));
    let f64_at = |i: usize| f64::from_le_bytes(bytes[i..i + 8].try_into().expect("8 bytes"));
    if u32_at(4) != VERSION {
        return Err(bad(&format!("unsupported version {}", u32_at(4))));
    }
    let count = u64_at(8) as usize;
    if bytes.len() != HEADER_LEN + 8 * count {
        return Err(bad(&format!("expected {count} samples, found {} bytes of data", bytes.len() - HEADER_LEN)));
    }
    let values = (0..count).map(|i| f64_at(HEADER_LEN + 8 * i)).collect();
    GridFunction::new(f64_at(16), f64_at(24), values)
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(format!("{}: {}", path.display(), e.error)))?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ReportFormat {
    Jsonl,
    Csv,
}

impl ReportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Jsonl => "jsonl",
            ReportFormat::Csv => "csv",
        }
    }
}

#[derive(Serialize)]
struct RowRecord<'a> {
    suite: &'a str,
    case: &'a str,
    lhs: f64,
    rhs: f64,
    ratio: Option<f64>,
    pass: bool,
}

fn row_record<'a>(suite: &'a str, r: &'a Row) -> RowRecord<'a> {
    RowRecord { suite, case: &r.case, lhs: r.lhs, rhs: r.rhs, ratio: r.ratio, pass: r.pass }
}

#[derive(Serialize)]
struct SummaryRecord<'a> {
    suite: &'a str,
    summary: bool,
    cases: usize,
    failures: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    spread: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    budget: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    one_sided_max_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    one_sided_pass: Option<bool>,
    pass: bool,
}

fn summary_record<'a>(name: &'a str, r: &SuiteReport) -> SummaryRecord<'a> {
    let failures = r.rows().iter().filter(|row| !row.pass).count();
    let (spread, budget, os) = match r {
        SuiteReport::Equivalence(e) => (Some(e.spread), Some(e.budget), e.one_sided.as_ref()),
        SuiteReport::Check(_) => (None, None, None),
    };
    SummaryRecord {
        suite: name,
        summary: true,
        cases: r.rows().len(),
        failures,
        spread,
        budget,
        one_sided_max_ratio: os.map(|o| o.max_ratio),
        one_sided_pass: os.map(|o| o.pass),
        pass: r.pass(),
    }
}

/// One record per case followed by a summary record.
pub fn report_jsonl(r: &SuiteReport) -> String {
    let name = r.name();
    let mut out = String::new();
    for row in r.rows() {
        out += &serde_json::to_string(&row_record(&name, row)).expect("rows serialize");
        out.push('\n');
    }
    if let SuiteReport::Equivalence(e) = r {
        if let Some(os) = &e.one_sided {
            let suite = format!("{name}/phi1");
            for row in &os.rows {
                out += &serde_json::to_string(&row_record(&suite, row)).expect("rows serialize");
                out.push('\n');
            }
        }
    }
    out += &serde_json::to_string(&summary_record(&name, r)).expect("summary serializes");
    out.push('\n');
    out
}

/// Columns `suite, case, lhs, rhs, ratio, pass`; the last row has case
/// `summary` and carries the spread (or failure count) in the ratio column.
pub fn report_csv(r: &SuiteReport) -> Result<String> {
    let name = r.name();
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["suite", "case", "lhs", "rhs", "ratio", "pass"]).map_err(csv_err)?;
    let fmt_opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let mut rows: Vec<(String, &Row)> = r.rows().iter().map(|row| (name.clone(), row)).collect();
    if let SuiteReport::Equivalence(e) = r {
        if let Some(os) = &e.one_sided {
            rows.extend(os.rows.iter().map(|row| (format!("{name}/phi1"), row)));
        }
    }
    for (suite, row) in rows {
        w.write_record([
            suite,
            row.case.clone(),
            row.lhs.to_string(),
            row.rhs.to_string(),
            fmt_opt(row.ratio),
            row.pass.to_string(),
        ])
        .map_err(csv_err)?;
    }
    let s = summary_record(&name, r);
    let stat = s.spread.unwrap_or(s.failures as f64);
    w.write_record([name.clone(), "summary".into(), String::new(), String::new(), stat.to_string(), s.pass.to_string()])
        .map_err(csv_err)?;
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Fixed-width table, one line per report.
pub fn summary_table(reports: &[SuiteReport]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<24} {:>6} {:>8} {:>10} {:>8}  result", "suite", "cases", "failures", "spread", "budget");
    for r in reports {
        let s = summary_record("", r);
        let num = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |x| format!("{x:.3}"));
        let _ = writeln!(
            out,
            "{:<24} {:>6} {:>8} {:>10} {:>8}  {}",
            r.name(),
            s.cases,
            s.failures,
            num(s.spread),
            num(s.budget),
            if s.pass { "PASS" } else { "FAIL" }
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use smlb::testlab::default_corpus;

    #[test]
    fn samples_round_trip_bit_exactly() {
        let f = GridFunction::new(0.125, -1.0, vec![0.1, -2.5, f64::MIN_POSITIVE, 3.0]).unwrap();
        let bytes = encode_samples(&f);
        assert_eq!(&bytes[..4], b"SMLB");
        assert_eq!(bytes.len(), 32 + 32);
        let g = decode_samples(&bytes).unwrap();
        assert_eq!(g.values(), f.values());
        assert_eq!((g.spacing(), g.origin()), (0.125, -1.0));
        assert!(decode_samples(&bytes[..40]).is_err());
        let mut wrong = bytes.clone();
        wrong[4] = 2;
        assert!(decode_samples(&wrong).is_err());
    }

    #[test]
    fn manifest_round_trip() {
        let grid = GridSpec::new(1.0 / 256.0, 4.0).unwrap();
        let corpus = default_corpus(3, &grid);
        let text = manifest_to_string(&manifest_records(&corpus, &grid).unwrap());
        assert_eq!(text.lines().count(), 10);
        assert!(text.lines().next().unwrap().contains("\"L\":4.0"));
        let (g, parsed) = parse_manifest(&text).unwrap();
        assert_eq!(g, grid);
        assert_eq!(parsed, corpus);
    }

    #[test]
    fn corrupted_manifests_are_rejected() {
        let grid = GridSpec::new(1.0 / 256.0, 4.0).unwrap();
        let text = manifest_to_string(&manifest_records(&default_corpus(3, &grid), &grid).unwrap());
        assert!(matches!(parse_manifest(&text[..text.len() / 2]), Err(Error::Format(_))));
        assert!(matches!(parse_manifest(&text.replace("\"smooth_tag\":true", "\"smooth_tag\":false")), Err(Error::Format(_))));
        let dup = format!("{}{}", text.lines().next().unwrap(), "\n").repeat(2);
        assert!(matches!(parse_manifest(&dup), Err(Error::Format(_))));
        assert_eq!(parse_manifest(""), Err(Error::EmptyCorpus));
    }
}
