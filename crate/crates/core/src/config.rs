//! JSON configuration and certificate files.
//!
//! Rationals are strings (`"3/5"`, `"0.25"`); decimal rotation numbers are
//! `{"decimal": "...", "err": "..."}`. Unknown keys are rejected. The
//! canonical form is what [`serialize_config`] writes: every descriptor field
//! present, two-space indentation, trailing newline.

use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use crate::error::{Error, Result};
use crate::interval::{format_rational, parse_rational};
use crate::iteration::GeodesicRecord;
use crate::jump::JumpCertificate;
use crate::morse::{CurvatureAssumption, SphereConfiguration};
use crate::symplectic::{format_decimal, NormalFormDescriptor, RotationNumber, DEFAULT_RESOLUTION_LIMIT};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Tsv,
    Json,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurvatureFile {
    pub pinch: String,
    pub reversibility: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RotationFile {
    Exact(String),
    Decimal(DecimalFile),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecimalFile {
    pub decimal: String,
    pub err: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DescriptorFile {
    #[serde(default)]
    pub p_minus: u32,
    #[serde(default)]
    pub p_zero: u32,
    #[serde(default)]
    pub p_plus: u32,
    #[serde(default)]
    pub q_minus: u32,
    #[serde(default)]
    pub q_zero: u32,
    #[serde(default)]
    pub q_plus: u32,
    #[serde(default)]
    pub thetas: Vec<RotationFile>,
    #[serde(default)]
    pub alphas: Vec<RotationFile>,
    #[serde(default)]
    pub betas: Vec<RotationFile>,
    #[serde(default)]
    pub hyperbolic_dim: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeodesicFile {
    pub label: String,
    pub initial_index: i64,
    /// Defaults to `p- + 2p0 + p+`.
    #[serde(default)]
    pub initial_nullity: Option<u32>,
    pub descriptor: DescriptorFile,
}

/// On-disk configuration. `geodesics` stays raw during the first pass so
/// that each entry can be located in the source text.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfigFile<'a> {
    version: u32,
    n: u32,
    bumpy: bool,
    #[serde(default)]
    curvature_assumption: Option<CurvatureFile>,
    #[serde(default)]
    resolution_limit: Option<u64>,
    #[serde(borrow)]
    geodesics: Vec<&'a RawValue>,
    #[serde(default)]
    output: Option<OutputOptions>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConfigFile {
    pub version: u32,
    pub n: u32,
    pub bumpy: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curvature_assumption: Option<CurvatureFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolution_limit: Option<u64>,
    pub geodesics: Vec<GeodesicFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputOptions>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoadedConfig {
    pub config: SphereConfiguration,
    pub output: OutputOptions,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Line of the first occurrence of a top-level key, for semantic errors.
fn key_line(text: &str, key: &str) -> usize {
    text.find(&format!("\"{key}\""))
        .map_or(1, |off| line_of(text, off))
}

/// Prefixes the location while keeping the variant, so exit codes survive.
fn locate(e: Error, at: &str) -> Error {
    let wrap = |msg: String| format!("{at}: {msg}");
    match e {
        Error::Dimension(m) => Error::Dimension(wrap(m)),
        Error::Validation(m) => Error::Validation(wrap(m)),
        Error::Precision(m) => Error::Precision(wrap(m)),
        Error::Unsupported(m) => Error::Unsupported(wrap(m)),
        Error::Range(m) => Error::Range(wrap(m)),
        Error::Precondition(m) => Error::Precondition(wrap(m)),
        Error::InvalidCertificate(m) => Error::InvalidCertificate(wrap(m)),
        Error::NotFound(m) => Error::NotFound(wrap(m)),
        Error::Parse(m) => Error::Parse(wrap(m)),
    }
}

fn json_error(e: serde_json::Error, line_offset: usize) -> Error {
    let line = e.line() + line_offset;
    let msg = e.to_string();
    // serde_json appends its own position relative to the parsed slice.
    let msg = msg.split(" at line ").next().unwrap_or(&msg).to_string();
    Error::Parse(format!("line {line} column {}: {msg}", e.column()))
}

fn rotation_from_file(r: &RotationFile) -> Result<RotationNumber> {
    match r {
        RotationFile::Exact(s) => RotationNumber::exact(parse_rational(s)?),
        RotationFile::Decimal(d) => RotationNumber::parse_decimal(&d.decimal, &d.err),
    }
}

fn rotation_to_file(r: &RotationNumber) -> RotationFile {
    let text = |v| format_decimal(v).unwrap_or_else(|| format_rational(v));
    match r {
        RotationNumber::Exact(v) => RotationFile::Exact(format_rational(v)),
        RotationNumber::Decimal { value, err } => RotationFile::Decimal(DecimalFile {
            decimal: text(value),
            err: text(err),
        }),
    }
}

fn rotations(list: &[RotationFile], field: &str) -> Result<Vec<RotationNumber>> {
    list.iter()
        .enumerate()
        .map(|(i, r)| rotation_from_file(r).map_err(|e| locate(e, &format!("{field}[{i}]"))))
        .collect()
}

fn descriptor_from_file(d: &DescriptorFile) -> Result<NormalFormDescriptor> {
    Ok(NormalFormDescriptor {
        p_minus: d.p_minus,
        p_zero: d.p_zero,
        p_plus: d.p_plus,
        q_minus: d.q_minus,
        q_zero: d.q_zero,
        q_plus: d.q_plus,
        thetas: rotations(&d.thetas, "thetas")?,
        alphas: rotations(&d.alphas, "alphas")?,
        betas: rotations(&d.betas, "betas")?,
        hyperbolic_dim: d.hyperbolic_dim,
    })
}

fn descriptor_to_file(d: &NormalFormDescriptor) -> DescriptorFile {
    DescriptorFile {
        p_minus: d.p_minus,
        p_zero: d.p_zero,
        p_plus: d.p_plus,
        q_minus: d.q_minus,
        q_zero: d.q_zero,
        q_plus: d.q_plus,
        thetas: d.thetas.iter().map(rotation_to_file).collect(),
        alphas: d.alphas.iter().map(rotation_to_file).collect(),
        betas: d.betas.iter().map(rotation_to_file).collect(),
        hyperbolic_dim: d.hyperbolic_dim,
    }
}

/// Parses and validates a configuration, keeping its output options.
///
/// Errors carry the line of the offending entry; syntax and schema errors
/// also carry the column.
pub fn load_config(text: &str) -> Result<LoadedConfig> {
    let raw: RawConfigFile = serde_json::from_str(text).map_err(|e| json_error(e, 0))?;
    if raw.version != SCHEMA_VERSION {
        return Err(Error::Parse(format!(
            "line {}: unsupported schema version {}, expected {SCHEMA_VERSION}",
            key_line(text, "version"),
            raw.version
        )));
    }
    let curvature_assumption = match &raw.curvature_assumption {
        None => None,
        Some(c) => {
            let at = format!("line {}, curvature_assumption", key_line(text, "curvature_assumption"));
            Some(CurvatureAssumption {
                pinch: parse_rational(&c.pinch).map_err(|e| locate(e, &at))?,
                reversibility: parse_rational(&c.reversibility).map_err(|e| locate(e, &at))?,
            })
        }
    };
    let resolution_limit = raw.resolution_limit.unwrap_or(DEFAULT_RESOLUTION_LIMIT);
    let header = SphereConfiguration {
        n: raw.n,
        geodesics: Vec::new(),
        bumpy: raw.bumpy,
        curvature_assumption,
        resolution_limit,
    };
    header
        .validate()
        .map_err(|e| locate(e, &format!("line {}", key_line(text, "n"))))?;

    let mut geodesics = Vec::with_capacity(raw.geodesics.len());
    for (j, entry) in raw.geodesics.iter().enumerate() {
        let offset = entry.get().as_ptr() as usize - text.as_ptr() as usize;
        let line = line_of(text, offset);
        let file: GeodesicFile =
            serde_json::from_str(entry.get()).map_err(|e| json_error(e, line - 1))?;
        let at = format!("line {line}, geodesics[{j}] (label {})", file.label);
        let descriptor = descriptor_from_file(&file.descriptor).map_err(|e| locate(e, &at))?;
        let record = GeodesicRecord {
            label: file.label.clone(),
            initial_index: file.initial_index,
            initial_nullity: file
                .initial_nullity
                .unwrap_or_else(|| descriptor.eigenvalue_one_nullity()),
            descriptor,
        };
        let single = SphereConfiguration {
            geodesics: vec![record],
            ..header.clone()
        };
        single.validate().map_err(|e| locate(e, &at))?;
        geodesics.extend(single.geodesics);
    }
    let config = SphereConfiguration { geodesics, ..header };
    config
        .validate()
        .map_err(|e| locate(e, &format!("line {}", key_line(text, "geodesics"))))?;
    Ok(LoadedConfig {
        config,
        output: raw.output.unwrap_or_default(),
    })
}

pub fn parse_config(text: &str) -> Result<SphereConfiguration> {
    load_config(text).map(|l| l.config)
}

pub fn to_config_file(cfg: &SphereConfiguration, output: &OutputOptions) -> ConfigFile {
    ConfigFile {
        version: SCHEMA_VERSION,
        n: cfg.n,
        bumpy: cfg.bumpy,
        curvature_assumption: cfg.curvature_assumption.as_ref().map(|c| CurvatureFile {
            pinch: format_rational(&c.pinch),
            reversibility: format_rational(&c.reversibility),
        }),
        resolution_limit: (cfg.resolution_limit != DEFAULT_RESOLUTION_LIMIT)
            .then_some(cfg.resolution_limit),
        geodesics: cfg
            .geodesics
            .iter()
            .map(|g| GeodesicFile {
                label: g.label.clone(),
                initial_index: g.initial_index,
                initial_nullity: Some(g.initial_nullity),
                descriptor: descriptor_to_file(&g.descriptor),
            })
            .collect(),
        output: (output != &OutputOptions::default()).then(|| output.clone()),
    }
}

/// Canonical text of a configuration.
pub fn serialize_config(cfg: &SphereConfiguration, output: &OutputOptions) -> String {
    to_pretty(&to_config_file(cfg, output))
}

pub(crate) fn to_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CertificateFile {
    version: u32,
    #[serde(rename = "N")]
    big_n: i64,
    #[serde(rename = "M")]
    big_m: i64,
    labels: Vec<String>,
    m: Vec<i64>,
    xi: Vec<u8>,
    eps: String,
    delta: String,
}

/// Parses a certificate file. Only the shape is checked here; the
/// invariants need the configuration, see
/// [`validate_certificate`](crate::jump::validate_certificate).
pub fn parse_certificate(text: &str) -> Result<JumpCertificate> {
    let f: CertificateFile = serde_json::from_str(text).map_err(|e| json_error(e, 0))?;
    if f.version != SCHEMA_VERSION {
        return Err(Error::Parse(format!(
            "line {}: unsupported certificate version {}, expected {SCHEMA_VERSION}",
            key_line(text, "version"),
            f.version
        )));
    }
    let at = |key: &str| format!("line {}, {key}", key_line(text, key));
    Ok(JumpCertificate {
        big_n: f.big_n,
        big_m: f.big_m,
        labels: f.labels,
        m: f.m,
        xi: f.xi,
        eps: parse_rational(&f.eps).map_err(|e| locate(e, &at("eps")))?,
        delta: parse_rational(&f.delta).map_err(|e| locate(e, &at("delta")))?,
    })
}

pub fn serialize_certificate(cert: &JumpCertificate) -> String {
    to_pretty(&CertificateFile {
        version: SCHEMA_VERSION,
        big_n: cert.big_n,
        big_m: cert.big_m,
        labels: cert.labels.clone(),
        m: cert.m.clone(),
        xi: cert.xi.clone(),
        eps: format_rational(&cert.eps),
        delta: format_rational(&cert.delta),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::rat;
    use crate::iteration::mean_index;

    const PAIR: &str = r#"{
  "version": 1,
  "n": 2,
  "bumpy": true,
  "geodesics": [
    {
      "label": "A",
      "initial_index": 1,
      "descriptor": { "thetas": ["3/5"] }
    },
    {
      "label": "B",
      "initial_index": 3,
      "descriptor": { "hyperbolic_dim": 2 }
    }
  ]
}
"#;

    #[test]
    fn parses_the_pair() {
        let cfg = parse_config(PAIR).unwrap();
        let means: Vec<_> = cfg.geodesics.iter().map(mean_index).collect();
        assert_eq!(means[0].as_exact(), Some(&rat(6, 5)));
        assert_eq!(means[1].as_exact(), Some(&rat(3, 1)));
    }

    #[test]
    fn canonical_round_trip() {
        let loaded = load_config(PAIR).unwrap();
        let text = serialize_config(&loaded.config, &loaded.output);
        let again = load_config(&text).unwrap();
        assert_eq!(again, loaded);
        assert_eq!(serialize_config(&again.config, &again.output), text);
    }

    #[test]
    fn decimal_rotations_round_trip() {
        let text = PAIR.replace(
            r#"["3/5"]"#,
            r#"[{"decimal": "0.6180339887498949", "err": "0.0000000000001"}]"#,
        );
        let loaded = load_config(&text).unwrap();
        let canon = serialize_config(&loaded.config, &loaded.output);
        assert!(canon.contains("0.6180339887498949"));
        assert_eq!(load_config(&canon).unwrap(), loaded);
    }

    #[test]
    fn unknown_keys_carry_a_location() {
        let text = PAIR.replace(r#""initial_index": 3,"#, r#""initial_index": 3, "colour": 1,"#);
        let err = parse_config(&text).unwrap_err();
        let msg = err.to_string();
        assert!(matches!(err, Error::Parse(_)));
        assert!(msg.contains("line 13") && msg.contains("colour"), "{msg}");

        let text = PAIR.replace(r#""bumpy": true,"#, r#""bumpy": true, "extra": 0,"#);
        assert!(parse_config(&text).unwrap_err().to_string().contains("line 4"));
    }

    #[test]
    fn semantic_rejections() {
        let half = PAIR.replace("3/5", "1/2");
        let msg = parse_config(&half).unwrap_err().to_string();
        assert!(msg.contains("line 6") && msg.contains("1/2"), "{msg}");

        let p0 = PAIR.replace(r#""thetas": ["3/5"]"#, r#""p_zero": 1"#);
        let msg = parse_config(&p0).unwrap_err().to_string();
        assert!(msg.contains("bumpy constraint"), "{msg}");

        let wide = PAIR.replace(r#""hyperbolic_dim": 2"#, r#""hyperbolic_dim": 4"#);
        assert!(matches!(parse_config(&wide), Err(Error::Dimension(_))));

        let v2 = PAIR.replace(r#""version": 1"#, r#""version": 2"#);
        assert!(matches!(parse_config(&v2), Err(Error::Parse(_))));
    }

    #[test]
    fn certificates_round_trip() {
        let cert = JumpCertificate {
            big_n: 30,
            big_m: 5,
            labels: vec!["A".into(), "B".into()],
            m: vec![25, 10],
            xi: vec![0, 0],
            eps: rat(1, 62),
            delta: rat(1, 10),
        };
        let text = serialize_certificate(&cert);
        assert_eq!(parse_certificate(&text).unwrap(), cert);
        assert!(parse_certificate(&text.replace("\"xi\"", "\"ξ\"")).is_err());
    }
}
