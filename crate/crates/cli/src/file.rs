//! The system file: a line-oriented text format with a JSON mirror.
//!
//! ```text
//! format_version 1
//! field gaussian-rational
//! ambient_dim 2
//! meta source gp4:S(2k+1,2).k=0
//! subspace E1
//!   1 0
//! subspace E2
//! ```
//!
//! Vector lines are indented by two spaces and hold one scalar per
//! coordinate. Exact files print canonical rationals, so printing a parsed
//! canonical file reproduces it byte for byte. A file whose first
//! non-blank character is `{` is read as JSON.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use subsys_core::{CSystem, Field, GaussRat, Matrix, ParseError, QSystem, Subspace, SubspaceSystem, C64};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FieldKind {
    #[serde(rename = "gaussian-rational")]
    GaussianRational,
    #[serde(rename = "complex-float")]
    ComplexFloat,
}

impl FieldKind {
    pub fn name(self) -> &'static str {
        match self {
            FieldKind::GaussianRational => "gaussian-rational",
            FieldKind::ComplexFloat => "complex-float",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Named<F> {
    pub name: String,
    pub basis: Vec<Vec<F>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Bases {
    Exact(Vec<Named<GaussRat>>),
    Float(Vec<Named<C64>>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SystemFile {
    pub ambient_dim: usize,
    pub bases: Bases,
    pub metadata: BTreeMap<String, String>,
}

/// The system as loaded, on whichever backend the file declares.
pub enum Loaded {
    Exact(QSystem),
    Float(CSystem),
}

fn err(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::SystemFile { line, msg: msg.into() }
}

fn default_names(n: usize) -> impl Iterator<Item = String> {
    (1..=n).map(|i| format!("E{i}"))
}

fn named_from_system<F: Field>(s: &SubspaceSystem<F>) -> Vec<Named<F>> {
    default_names(s.n())
        .zip(s.subspaces())
        .map(|(name, sub)| Named { name, basis: sub.basis().columns() })
        .collect()
}

fn system_from_named<F: Field>(d: usize, named: &[Named<F>]) -> SubspaceSystem<F> {
    let subs = named.iter().map(|n| Subspace::span_vectors(d, &n.basis)).collect();
    SubspaceSystem::new(d, subs).expect("vector lengths checked on parse")
}

impl SystemFile {
    pub fn from_exact(s: &QSystem) -> Self {
        SystemFile { ambient_dim: s.ambient_dim(), bases: Bases::Exact(named_from_system(s)), metadata: BTreeMap::new() }
    }

    pub fn from_float(s: &CSystem) -> Self {
        SystemFile { ambient_dim: s.ambient_dim(), bases: Bases::Float(named_from_system(s)), metadata: BTreeMap::new() }
    }

    pub fn with_meta(mut self, key: &str, value: impl Into<String>) -> Self {
        self.metadata.insert(key.to_string(), value.into());
        self
    }

    pub fn field(&self) -> FieldKind {
        match self.bases {
            Bases::Exact(_) => FieldKind::GaussianRational,
            Bases::Float(_) => FieldKind::ComplexFloat,
        }
    }

    pub fn names(&self) -> Vec<String> {
        match &self.bases {
            Bases::Exact(v) => v.iter().map(|n| n.name.clone()).collect(),
            Bases::Float(v) => v.iter().map(|n| n.name.clone()).collect(),
        }
    }

    pub fn load(&self) -> Loaded {
        match &self.bases {
            Bases::Exact(v) => Loaded::Exact(system_from_named(self.ambient_dim, v)),
            Bases::Float(v) => Loaded::Float(system_from_named(self.ambient_dim, v)),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "format_version {FORMAT_VERSION}").unwrap();
        writeln!(out, "field {}", self.field().name()).unwrap();
        writeln!(out, "ambient_dim {}", self.ambient_dim).unwrap();
        for (k, v) in &self.metadata {
            writeln!(out, "meta {k} {v}").unwrap();
        }
        fn block<F: std::fmt::Display>(out: &mut String, named: &[Named<F>]) {
            for n in named {
                writeln!(out, "subspace {}", n.name).unwrap();
                for v in &n.basis {
                    let cells: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                    writeln!(out, "  {}", cells.join(" ")).unwrap();
                }
            }
        }
        match &self.bases {
            Bases::Exact(v) => block(&mut out, v),
            Bases::Float(v) => block(&mut out, v),
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        fn subs<F: std::fmt::Display>(named: &[Named<F>]) -> Vec<JsonSubspace> {
            named
                .iter()
                .map(|n| JsonSubspace {
                    name: n.name.clone(),
                    basis: n.basis.iter().map(|v| v.iter().map(|x| x.to_string()).collect()).collect(),
                })
                .collect()
        }
        let subspaces = match &self.bases {
            Bases::Exact(v) => subs(v),
            Bases::Float(v) => subs(v),
        };
        serde_json::to_value(JsonFile {
            format_version: FORMAT_VERSION,
            field: self.field(),
            ambient_dim: self.ambient_dim,
            subspaces,
            metadata: self.metadata.clone(),
        })
        .expect("plain data serialises")
    }

    fn parse_json(text: &str) -> Result<Self, ParseError> {
        let mut v: serde_json::Value = serde_json::from_str(text).map_err(|e| err(e.line(), e.to_string()))?;
        // A JSON report whose result is a system file reads as that file.
        if let Some(inner) = v.get_mut("result").filter(|r| r.get("format_version").is_some()) {
            v = inner.take();
        }
        let j: JsonFile = serde_json::from_value(v).map_err(|e| err(0, e.to_string()))?;
        if j.format_version != FORMAT_VERSION {
            return Err(err(0, format!("unsupported format_version {}", j.format_version)));
        }
        let raw: Vec<RawSubspace> =
            j.subspaces.into_iter().map(|s| (s.name, s.basis.into_iter().map(|v| (0, v)).collect())).collect();
        Ok(SystemFile {
            ambient_dim: j.ambient_dim,
            bases: build_bases(j.field, j.ambient_dim, raw)?,
            metadata: j.metadata,
        })
    }

    fn parse_text(text: &str) -> Result<Self, ParseError> {
        let mut version = None;
        let mut field = None;
        let mut ambient = None;
        let mut metadata = BTreeMap::new();
        let mut subs: Vec<RawSubspace> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            if raw.trim().is_empty() || raw.trim_start().starts_with('#') {
                continue;
            }
            if let Some(rest) = raw.strip_prefix("  ") {
                let (_, vecs) = subs.last_mut().ok_or_else(|| err(line, "vector before any `subspace`"))?;
                vecs.push((line, rest.split_whitespace().map(str::to_string).collect()));
                continue;
            }
            let (word, rest) = raw.split_once(' ').unwrap_or((raw, ""));
            let rest = rest.trim();
            match word {
                "format_version" => {
                    let v: u32 = rest.parse().map_err(|_| err(line, "format_version must be an integer"))?;
                    if v != FORMAT_VERSION {
                        return Err(err(line, format!("unsupported format_version {v}")));
                    }
                    version = Some(v);
                }
                "field" => {
                    field = Some(match rest {
                        "gaussian-rational" => FieldKind::GaussianRational,
                        "complex-float" => FieldKind::ComplexFloat,
                        other => return Err(err(line, format!("unknown field `{other}`"))),
                    })
                }
                "ambient_dim" => {
                    ambient = Some(rest.parse::<usize>().map_err(|_| err(line, "ambient_dim must be a count"))?)
                }
                "meta" => {
                    let (k, v) = rest.split_once(' ').unwrap_or((rest, ""));
                    if k.is_empty() {
                        return Err(err(line, "meta needs a key"));
                    }
                    if metadata.insert(k.to_string(), v.to_string()).is_some() {
                        return Err(err(line, format!("repeated meta key `{k}`")));
                    }
                }
                "subspace" => {
                    if rest.is_empty() || rest.contains(char::is_whitespace) {
                        return Err(err(line, "subspace needs a single-word name"));
                    }
                    subs.push((rest.to_string(), Vec::new()));
                }
                other => return Err(err(line, format!("unknown directive `{other}`"))),
            }
        }
        version.ok_or_else(|| err(1, "missing format_version"))?;
        let field = field.ok_or_else(|| err(1, "missing field"))?;
        let ambient = ambient.ok_or_else(|| err(1, "missing ambient_dim"))?;
        Ok(SystemFile { ambient_dim: ambient, bases: build_bases(field, ambient, subs)?, metadata })
    }
}

/// A subspace name with its vectors as raw cells, each tagged with its line (0 for JSON).
type RawSubspace = (String, Vec<(usize, Vec<String>)>);

fn build_bases(field: FieldKind, d: usize, raw: Vec<RawSubspace>) -> Result<Bases, ParseError> {
    fn typed<F: FromStr<Err = ParseError>>(d: usize, raw: Vec<RawSubspace>) -> Result<Vec<Named<F>>, ParseError> {
        raw.into_iter()
            .map(|(name, vecs)| {
                let basis = vecs
                    .iter()
                    .map(|(at, v)| {
                        let at = *at;
                        if v.len() != d {
                            return Err(err(at, format!("subspace {name}: vector has {} entries, expected {d}", v.len())));
                        }
                        v.iter().map(|x| x.parse::<F>().map_err(|e| err(at, e.to_string()))).collect()
                    })
                    .collect::<Result<Vec<Vec<F>>, _>>()?;
                Ok(Named { name, basis })
            })
            .collect()
    }
    Ok(match field {
        FieldKind::GaussianRational => Bases::Exact(typed(d, raw)?),
        FieldKind::ComplexFloat => Bases::Float(typed(d, raw)?),
    })
}

impl FromStr for SystemFile {
    type Err = ParseError;

    fn from_str(text: &str) -> Result<Self, ParseError> {
        if text.trim_start().starts_with('{') {
            Self::parse_json(text)
        } else {
            Self::parse_text(text)
        }
    }
}

#[derive(Serialize, Deserialize)]
struct JsonSubspace {
    name: String,
    basis: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct JsonFile {
    format_version: u32,
    field: FieldKind,
    ambient_dim: usize,
    subspaces: Vec<JsonSubspace>,
    #[serde(default)]
    metadata: BTreeMap<String, String>,
}

/// Renders a matrix as rows of scalar text.
pub fn matrix_rows<F: Field>(m: &Matrix<F>) -> Vec<String> {
    (0..m.rows()).map(|i| m.row(i).iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "format_version 1
field gaussian-rational
ambient_dim 2
meta source two:1
subspace E1
  1 1/2-i
subspace E2
";

    #[test]
    fn canonical_text_round_trips() {
        let f: SystemFile = SAMPLE.parse().unwrap();
        assert_eq!(f.to_text(), SAMPLE);
        assert_eq!(f.names(), vec!["E1", "E2"]);
    }

    #[test]
    fn json_mirror_round_trips() {
        let f: SystemFile = SAMPLE.parse().unwrap();
        let back: SystemFile = f.to_json().to_string().parse().unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn wrong_length_reports_line() {
        let bad = SAMPLE.replace("  1 1/2-i", "  1");
        match bad.parse::<SystemFile>() {
            Err(ParseError::SystemFile { line, .. }) => assert_eq!(line, 6),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn float_file_loads() {
        let text = "format_version 1\nfield complex-float\nambient_dim 1\nsubspace A\n  1e0+2.5e-1i\n";
        let f: SystemFile = text.parse().unwrap();
        assert_eq!(f.to_text(), text);
        assert!(matches!(f.load(), Loaded::Float(s) if s.dims() == vec![1]));
    }
}
