//! File formats: JSON distribution specs, CSV samples, histogram pairs with
//! open tail bins, and batch manifests.
//!
//! Parse errors carry a JSON path such as `$.components[1][1].sigma`.

use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::decomp::{decompose, Decomposition, DivergenceKind, QuadratureConfig};
use crate::error::{Error, Result};
use crate::quantile::{Distribution, Interpolation};

type Obj = Map<String, Value>;

fn as_object<'a>(v: &'a Value, path: &str) -> Result<&'a Obj> {
    v.as_object().ok_or_else(|| Error::parse(path, "expected an object"))
}

fn field<'a>(o: &'a Obj, key: &str, path: &str) -> Result<&'a Value> {
    o.get(key)
        .ok_or_else(|| Error::parse(path, format!("missing field \"{key}\"")))
}

fn number(v: &Value, path: &str) -> Result<f64> {
    v.as_f64().ok_or_else(|| Error::parse(path, "expected a number"))
}

fn number_field(o: &Obj, key: &str, path: &str) -> Result<f64> {
    number(field(o, key, path)?, &format!("{path}.{key}"))
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| Error::parse(path, "expected an array"))
}

fn numbers(o: &Obj, key: &str, path: &str) -> Result<Vec<f64>> {
    let p = format!("{path}.{key}");
    array(field(o, key, path)?, &p)?
        .iter()
        .enumerate()
        .map(|(i, v)| number(v, &format!("{p}[{i}]")))
        .collect()
}

fn only_keys(o: &Obj, allowed: &[&str], path: &str) -> Result<()> {
    match o.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(Error::parse(path, format!("unknown field \"{k}\""))),
        None => Ok(()),
    }
}

/// Re-labels invariant violations with the path of the offending object.
fn at_path<T>(r: Result<T>, path: &str) -> Result<T> {
    r.map_err(|e| match e {
        Error::InvalidDistribution(reason) | Error::Domain(reason) => Error::parse(path, reason),
        other => other,
    })
}

fn distribution_at(v: &Value, path: &str) -> Result<Distribution> {
    let o = as_object(v, path)?;
    let tag = field(o, "type", path)?
        .as_str()
        .ok_or_else(|| Error::parse(format!("{path}.type"), "expected a string"))?;
    let d = match tag {
        "normal" => {
            only_keys(o, &["type", "mu", "sigma"], path)?;
            Distribution::normal(number_field(o, "mu", path)?, number_field(o, "sigma", path)?)
        }
        "uniform" => {
            only_keys(o, &["type", "a", "b"], path)?;
            Distribution::uniform(number_field(o, "a", path)?, number_field(o, "b", path)?)
        }
        "mixture" => {
            only_keys(o, &["type", "components"], path)?;
            let cpath = format!("{path}.components");
            let comps = array(field(o, "components", path)?, &cpath)?
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    let ip = format!("{cpath}[{i}]");
                    match c.as_array().map(Vec::as_slice) {
                        Some([w, d]) => Ok((
                            number(w, &format!("{ip}[0]"))?,
                            distribution_at(d, &format!("{ip}[1]"))?,
                        )),
                        _ => Err(Error::parse(&ip, "expected [weight, distribution]")),
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            Distribution::mixture(comps)
        }
        "empirical" => {
            only_keys(o, &["type", "samples"], path)?;
            Distribution::empirical(numbers(o, "samples", path)?)
        }
        "piecewise_quantile" => {
            only_keys(o, &["type", "levels", "values", "mode"], path)?;
            let mode = match o.get("mode").map(|m| m.as_str()) {
                None | Some(Some("linear")) => Interpolation::Linear,
                Some(Some("step")) => Interpolation::Step,
                _ => return Err(Error::parse(format!("{path}.mode"), "expected \"linear\" or \"step\"")),
            };
            Distribution::piecewise_quantile(numbers(o, "levels", path)?, numbers(o, "values", path)?, mode)
        }
        "histogram" => {
            only_keys(o, &["type", "edges", "probs"], path)?;
            Distribution::histogram(numbers(o, "edges", path)?, numbers(o, "probs", path)?)
        }
        other => {
            return Err(Error::parse(
                format!("{path}.type"),
                format!("unknown distribution type \"{other}\""),
            ))
        }
    };
    at_path(d, path)
}

fn json_text(text: &str) -> Result<Value> {
    serde_json::from_str(text)
        .map_err(|e| Error::parse(format!("line {} column {}", e.line(), e.column()), e.to_string()))
}

/// Parses a JSON distribution spec.
pub fn parse_distribution(text: &str) -> Result<Distribution> {
    distribution_from_value(&json_text(text)?)
}

pub fn distribution_from_value(v: &Value) -> Result<Distribution> {
    distribution_at(v, "$")
}

/// JSON spec of a distribution; parses back to an equal value.
pub fn distribution_to_value(d: &Distribution) -> Value {
    match d {
        Distribution::Normal(n) => json!({"type": "normal", "mu": n.mu(), "sigma": n.sigma()}),
        Distribution::Uniform(u) => json!({"type": "uniform", "a": u.a(), "b": u.b()}),
        Distribution::Mixture(m) => {
            let comps: Vec<Value> = m
                .components()
                .iter()
                .map(|(w, c)| json!([w, distribution_to_value(c)]))
                .collect();
            json!({"type": "mixture", "components": comps})
        }
        Distribution::PiecewiseQuantile(p) => {
            let mode = match p.mode() {
                Interpolation::Linear => "linear",
                Interpolation::Step => "step",
            };
            json!({"type": "piecewise_quantile", "levels": p.levels(), "values": p.values(), "mode": mode})
        }
        Distribution::Empirical(e) => json!({"type": "empirical", "samples": e.samples()}),
        Distribution::Histogram(h) => json!({"type": "histogram", "edges": h.edges(), "probs": h.probs()}),
    }
}

pub fn serialize_distribution(d: &Distribution) -> String {
    distribution_to_value(d).to_string()
}

/// One sample per line; blank lines and `#` comments are skipped.
pub fn parse_samples_csv(text: &str) -> Result<Distribution> {
    let mut samples = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let s = line.split(',').next().unwrap_or("").trim();
        if s.is_empty() || s.starts_with('#') {
            continue;
        }
        let v: f64 = s
            .parse()
            .map_err(|_| Error::parse(format!("line {}", i + 1), format!("not a number: \"{s}\"")))?;
        samples.push(v);
    }
    at_path(Distribution::empirical(samples), "$")
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn with_file<T>(path: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse { path: p, reason } => Error::parse(format!("{}: {p}", path.display()), reason),
        other => other,
    })
}

/// Loads a distribution file: `.csv` as samples, anything else as JSON.
pub fn load_distribution(path: &Path) -> Result<Distribution> {
    let text = read(path)?;
    let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    with_file(
        path,
        if is_csv {
            parse_samples_csv(&text)
        } else {
            parse_distribution(&text)
        },
    )
}

/// Histogram whose first and last bins may be open (`None` edge).
#[derive(Debug, Clone, PartialEq)]
pub struct OpenHistogram {
    pub edges: Vec<Option<f64>>,
    pub probs: Vec<f64>,
}

impl OpenHistogram {
    pub fn new(edges: Vec<Option<f64>>, probs: Vec<f64>) -> Result<Self> {
        let n = edges.len();
        if n < 2 || probs.len() + 1 != n {
            return Err(Error::InvalidDistribution(format!(
                "histogram needs n+1 edges for n probabilities (got {n} edges, {} probs)",
                probs.len()
            )));
        }
        if edges[1..n - 1].iter().any(Option::is_none) {
            return Err(Error::InvalidDistribution(
                "only the outermost edges may be open".into(),
            ));
        }
        let finite: Vec<f64> = edges.iter().flatten().copied().collect();
        if finite.iter().any(|e| !e.is_finite()) || finite.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidDistribution(
                "histogram edges must be finite and sorted".into(),
            ));
        }
        let closed = edges.windows(2).any(|w| w[0].is_some() && w[1].is_some());
        if !closed {
            return Err(Error::InvalidDistribution(
                "histogram needs at least one closed bin".into(),
            ));
        }
        if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::InvalidDistribution(
                "histogram probabilities must be nonnegative".into(),
            ));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidDistribution(format!(
                "probabilities must sum to 1 (got {total})"
            )));
        }
        Ok(Self { edges, probs })
    }

    pub fn open_below(&self) -> bool {
        self.edges[0].is_none()
    }

    pub fn open_above(&self) -> bool {
        self.edges[self.edges.len() - 1].is_none()
    }

    fn first_finite(&self) -> f64 {
        self.edges
            .iter()
            .flatten()
            .copied()
            .next()
            .expect("validated closed bin")
    }

    fn last_finite(&self) -> f64 {
        self.edges
            .iter()
            .rev()
            .flatten()
            .copied()
            .next()
            .expect("validated closed bin")
    }

    /// Closes the open ends at `lo` and `hi`. An open bin whose finite edge
    /// equals its bound becomes an atom.
    pub fn truncate(&self, lo: f64, hi: f64) -> Result<Distribution> {
        let (first, last) = (self.first_finite(), self.last_finite());
        if self.open_below() && lo.partial_cmp(&first).is_none_or(|o| o.is_gt()) {
            return Err(Error::InvalidDistribution(format!(
                "lower bound {lo} lies above the first finite edge {first}"
            )));
        }
        if self.open_above() && hi.partial_cmp(&last).is_none_or(|o| o.is_lt()) {
            return Err(Error::InvalidDistribution(format!(
                "upper bound {hi} lies below the last finite edge {last}"
            )));
        }
        let n = self.edges.len();
        let edges = self
            .edges
            .iter()
            .enumerate()
            .map(|(i, e)| {
                e.unwrap_or(if i == 0 {
                    lo
                } else if i == n - 1 {
                    hi
                } else {
                    f64::NAN
                })
            })
            .collect();
        Distribution::histogram(edges, self.probs.clone())
    }
}

/// How open tail bins are closed.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Truncation {
    /// Upper tails end at the larger of the two outermost finite upper edges,
    /// lower tails at the smaller of the two outermost finite lower edges.
    /// When both upper bins are open this is the larger of their lower
    /// bounds, so one of them collapses to an atom.
    #[default]
    Conservative,
    /// Fixed bounds for the open bins of both histograms.
    Bounds { lower: Option<f64>, upper: Option<f64> },
}

/// A pair of survey histograms sharing one truncation policy.
#[derive(Debug, Clone, PartialEq)]
pub struct HistogramPairSpec {
    pub f: OpenHistogram,
    pub g: OpenHistogram,
    pub truncation: Truncation,
}

impl HistogramPairSpec {
    /// Bounds used for the open bins, `(lower, upper)`.
    pub fn bounds(&self) -> Result<(f64, f64)> {
        let lo_default = self.f.first_finite().min(self.g.first_finite());
        let hi_default = self.f.last_finite().max(self.g.last_finite());
        match self.truncation {
            Truncation::Conservative => Ok((lo_default, hi_default)),
            Truncation::Bounds { lower, upper } => {
                let need_lo = self.f.open_below() || self.g.open_below();
                let need_hi = self.f.open_above() || self.g.open_above();
                let pick = |b: Option<f64>, need: bool, fallback: f64, side: &str| match (b, need) {
                    (Some(v), _) if v.is_finite() => Ok(v),
                    (None, false) => Ok(fallback),
                    _ => Err(Error::InvalidDistribution(format!(
                        "open {side} bins need a finite {side} bound"
                    ))),
                };
                Ok((
                    pick(lower, need_lo, lo_default, "lower")?,
                    pick(upper, need_hi, hi_default, "upper")?,
                ))
            }
        }
    }
}

/// Turns both histograms into piecewise-linear distributions.
pub fn histogram_pair_to_distributions(spec: &HistogramPairSpec) -> Result<(Distribution, Distribution)> {
    let (lo, hi) = spec.bounds()?;
    Ok((spec.f.truncate(lo, hi)?, spec.g.truncate(lo, hi)?))
}

fn open_histogram_at(v: &Value, path: &str) -> Result<OpenHistogram> {
    let o = as_object(v, path)?;
    only_keys(o, &["edges", "probs"], path)?;
    let ep = format!("{path}.edges");
    let edges = array(field(o, "edges", path)?, &ep)?
        .iter()
        .enumerate()
        .map(|(i, e)| {
            if e.is_null() {
                Ok(None)
            } else {
                number(e, &format!("{ep}[{i}]")).map(Some)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    at_path(OpenHistogram::new(edges, numbers(o, "probs", path)?), path)
}

fn histogram_pair_at(v: &Value, path: &str) -> Result<HistogramPairSpec> {
    let o = as_object(v, path)?;
    only_keys(o, &["f", "g", "truncation"], path)?;
    let tp = format!("{path}.truncation");
    let truncation = match o.get("truncation") {
        None => Truncation::Conservative,
        Some(Value::String(s)) if s == "paper_conservative" || s == "conservative" => Truncation::Conservative,
        Some(Value::Object(b)) => {
            only_keys(b, &["lower", "upper"], &tp)?;
            let opt = |k: &str| match b.get(k) {
                None | Some(Value::Null) => Ok(None),
                Some(x) => number(x, &format!("{tp}.{k}")).map(Some),
            };
            Truncation::Bounds {
                lower: opt("lower")?,
                upper: opt("upper")?,
            }
        }
        Some(_) => return Err(Error::parse(tp, "expected \"conservative\" or {\"lower\", \"upper\"}")),
    };
    Ok(HistogramPairSpec {
        f: open_histogram_at(field(o, "f", path)?, &format!("{path}.f"))?,
        g: open_histogram_at(field(o, "g", path)?, &format!("{path}.g"))?,
        truncation,
    })
}

/// Parses `{"f": {"edges", "probs"}, "g": {...}, "truncation": ...}`;
/// `null` marks an open outer edge.
pub fn parse_histogram_pair(text: &str) -> Result<HistogramPairSpec> {
    histogram_pair_at(&json_text(text)?, "$")
}

/// Where a batch entry gets its distributions.
#[derive(Debug, Clone, PartialEq)]
pub enum PairSource {
    Specs { f: Distribution, g: Distribution },
    Histograms(HistogramPairSpec),
}

/// One manifest line, already parsed.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchEntry {
    pub id: String,
    pub source: Result<PairSource>,
    pub divergences: Vec<DivergenceKind>,
}

/// Batch job list.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Manifest {
    pub entries: Vec<BatchEntry>,
}

fn resolve(base: &Path, p: &str) -> PathBuf {
    let p = Path::new(p);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

/// An inline spec or a path relative to the manifest.
fn distribution_ref(v: &Value, base: &Path, path: &str) -> Result<Distribution> {
    match v {
        Value::String(s) => load_distribution(&resolve(base, s)),
        other => distribution_at(other, path),
    }
}

fn pair_source(o: &Obj, base: &Path, path: &str) -> Result<PairSource> {
    if let Some(h) = o.get("histograms") {
        let hp = format!("{path}.histograms");
        let spec = match h {
            Value::String(s) => {
                let file = resolve(base, s);
                with_file(&file, parse_histogram_pair(&read(&file)?))?
            }
            other => histogram_pair_at(other, &hp)?,
        };
        return Ok(PairSource::Histograms(spec));
    }
    Ok(PairSource::Specs {
        f: distribution_ref(field(o, "f", path)?, base, &format!("{path}.f"))?,
        g: distribution_ref(field(o, "g", path)?, base, &format!("{path}.g"))?,
    })
}

fn divergences_at(o: &Obj, path: &str) -> Result<Vec<DivergenceKind>> {
    let ps: Vec<u32> = match o.get("p") {
        None => vec![2],
        Some(v) => {
            let pp = format!("{path}.p");
            let list = match v {
                Value::Array(a) => a.clone(),
                single => vec![single.clone()],
            };
            list.iter()
                .enumerate()
                .map(|(i, x)| {
                    x.as_u64()
                        .filter(|&p| (1..=64).contains(&p))
                        .map(|p| p as u32)
                        .ok_or_else(|| Error::parse(format!("{pp}[{i}]"), "p must be an integer in 1..=64"))
                })
                .collect::<Result<_>>()?
        }
    };
    let names: Vec<String> = match o.get("divergences") {
        None => vec!["avm".into(), "wd".into(), "cd".into()],
        Some(v) => {
            let dp = format!("{path}.divergences");
            array(v, &dp)?
                .iter()
                .enumerate()
                .map(|(i, x)| {
                    x.as_str()
                        .map(str::to_owned)
                        .ok_or_else(|| Error::parse(format!("{dp}[{i}]"), "expected a string"))
                })
                .collect::<Result<_>>()?
        }
    };
    let mut out = Vec::new();
    for (i, n) in names.iter().enumerate() {
        match n.as_str() {
            "avm" => out.push(DivergenceKind::Avm),
            "cd" => out.push(DivergenceKind::Cd),
            "wd" => out.extend(ps.iter().map(|&p| DivergenceKind::Wd(p))),
            other => {
                return Err(Error::parse(
                    format!("{path}.divergences[{i}]"),
                    format!("unknown divergence \"{other}\" (expected avm, wd or cd)"),
                ))
            }
        }
    }
    Ok(out)
}

/// Parses a manifest. Structural errors fail the whole manifest; problems
/// loading one entry's distributions are kept on that entry.
///
/// ```json
/// {"pairs": [{"id": "a", "f": "f.json", "g": {"type": "normal", "mu": 0, "sigma": 1},
///             "divergences": ["avm", "wd"], "p": [1, 2]},
///            {"id": "b", "histograms": "survey.json", "divergences": ["cd"]}]}
/// ```
pub fn parse_manifest(text: &str, base: &Path) -> Result<Manifest> {
    let root = json_text(text)?;
    let o = as_object(&root, "$")?;
    only_keys(o, &["pairs"], "$")?;
    let entries = array(field(o, "pairs", "$")?, "$.pairs")?
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let path = format!("$.pairs[{i}]");
            let eo = as_object(e, &path)?;
            only_keys(eo, &["id", "f", "g", "histograms", "divergences", "p"], &path)?;
            let id = match eo.get("id") {
                Some(Value::String(s)) => s.clone(),
                Some(_) => return Err(Error::parse(format!("{path}.id"), "expected a string")),
                None => format!("pair{i}"),
            };
            Ok(BatchEntry {
                id,
                source: pair_source(eo, base, &path),
                divergences: divergences_at(eo, &path)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Manifest { entries })
}

pub fn load_manifest(path: &Path) -> Result<Manifest> {
    let base = path.parent().unwrap_or(Path::new("."));
    with_file(path, parse_manifest(&read(path)?, base))
}

/// One output row: a decomposition or the error that prevented it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchRow {
    pub id: String,
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<Decomposition>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

fn row(
    entry: &BatchEntry,
    kind: DivergenceKind,
    pair: &Result<(Distribution, Distribution)>,
    cfg: &QuadratureConfig,
) -> BatchRow {
    let result = match pair {
        Ok((f, g)) => decompose(kind, f, g, cfg),
        Err(e) => Err(e.clone()),
    };
    let (decomposition, error) = match result {
        Ok(d) => (Some(d), None),
        Err(e) => (None, Some(e.to_string())),
    };
    BatchRow {
        id: entry.id.clone(),
        kind: kind.name(),
        p: kind.p(),
        decomposition,
        error,
    }
}

/// One row per entry and divergence, in manifest order. Entries run on
/// scoped worker threads; the output order does not depend on scheduling.
pub fn run_batch(manifest: &Manifest, cfg: &QuadratureConfig) -> Vec<BatchRow> {
    let work = |entry: &BatchEntry| -> Vec<BatchRow> {
        let pair = match &entry.source {
            Ok(PairSource::Specs { f, g }) => Ok((f.clone(), g.clone())),
            Ok(PairSource::Histograms(h)) => histogram_pair_to_distributions(h),
            Err(e) => Err(e.clone()),
        };
        entry.divergences.iter().map(|&k| row(entry, k, &pair, cfg)).collect()
    };
    let threads = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(manifest.entries.len().max(1));
    if threads <= 1 {
        return manifest.entries.iter().flat_map(work).collect();
    }
    let chunk = manifest.entries.len().div_ceil(threads);
    std::thread::scope(|s| {
        let handles: Vec<_> = manifest
            .entries
            .chunks(chunk)
            .map(|c| s.spawn(move || c.iter().flat_map(work).collect::<Vec<_>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("batch worker panicked"))
            .collect()
    })
}

pub const BATCH_TSV_HEADER: &str =
    "id\tkind\tp\ttotal\tshift_plus\tshift_minus\tdisp_plus\tdisp_minus\texact_path\terror";

/// Tab-separated rows with a header line; empty cells for missing values.
pub fn batch_to_tsv(rows: &[BatchRow]) -> String {
    let mut out = String::from(BATCH_TSV_HEADER);
    out.push('\n');
    for r in rows {
        let p = r.p.map(|p| p.to_string()).unwrap_or_default();
        let nums = match &r.decomposition {
            Some(d) => format!(
                "{}\t{}\t{}\t{}\t{}\t{}",
                d.total, d.shift_plus, d.shift_minus, d.disp_plus, d.disp_minus, d.exact
            ),
            None => "\t\t\t\t\t".into(),
        };
        let err = r.error.as_deref().unwrap_or("").replace(['\t', '\n'], " ");
        out.push_str(&format!("{}\t{}\t{p}\t{nums}\t{err}\n", r.id, r.kind));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_normal_and_mixture() {
        let n = parse_distribution(r#"{"type":"normal","mu":0,"sigma":1}"#).unwrap();
        assert_eq!(n, Distribution::normal(0.0, 1.0).unwrap());
        let m = parse_distribution(
            r#"{"type":"mixture","components":[[0.5,{"type":"uniform","a":0,"b":4}],[0.5,{"type":"uniform","a":4,"b":6}]]}"#,
        )
        .unwrap();
        assert!((m.quantile(0.75).unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn errors_name_the_path() {
        let e = parse_distribution(r#"{"type":"mixture","components":[[1.0,{"type":"normal","mu":0}]]}"#).unwrap_err();
        assert_eq!(e, Error::parse("$.components[0][1]", "missing field \"sigma\""));
        let e = parse_distribution(r#"{"type":"histogram","edges":[0,1,2],"probs":[0.4,0.5]}"#).unwrap_err();
        assert!(e.to_string().contains("probabilities must sum to 1"), "{e}");
        let e = parse_distribution(r#"{"type":"gamma"}"#).unwrap_err();
        assert!(matches!(e, Error::Parse { ref path, .. } if path == "$.type"));
    }

    #[test]
    fn csv_samples() {
        let d = parse_samples_csv("# draws\n1\n\n2\n").unwrap();
        assert_eq!(d.central_median(), 1.5);
        assert!(parse_samples_csv("1\nx\n").is_err());
    }

    #[test]
    fn open_tails_use_conservative_bounds() {
        let spec = parse_histogram_pair(
            r#"{"f":{"edges":[0,4,8,null],"probs":[0.3,0.5,0.2]},
                "g":{"edges":[0,4,12,null],"probs":[0.3,0.5,0.2]}}"#,
        )
        .unwrap();
        assert_eq!(spec.bounds().unwrap(), (0.0, 12.0));
        let (f, g) = histogram_pair_to_distributions(&spec).unwrap();
        assert_eq!(f.support(), (0.0, 12.0));
        // g's open bin starts at the bound and collapses to an atom
        assert_eq!(g.quantile(0.9).unwrap(), 12.0);
        assert_eq!(g.quantile(0.81).unwrap(), 12.0);
    }

    #[test]
    fn batch_tsv_shape() {
        let m = Manifest::default();
        assert!(run_batch(&m, &QuadratureConfig::default()).is_empty());
        assert_eq!(batch_to_tsv(&[]).lines().count(), 1);
    }
}
