//! Shipped varieties and the plain-text data format.
//!
//! One TOML document per variety:
//!
//! ```toml
//! id = "dp/13"
//! dimension = 1
//!
//! [box]
//! vertices = [["-1"], ["3"]]
//!
//! [phi]
//! "0" = [{ a = "0", b = ["-1"] }, { a = "0", b = ["0"] }]
//! "inf" = [{ a = "-3/4", b = ["1/4"] }]
//! "1" = [{ v = [1], mu = 2 }]
//! ```
//!
//! A piece is either `{ a, b }` for `a + ⟨b, u⟩` or `{ v, mu }` for
//! `(⟨v,u⟩ − μ + 1)/μ`. Coordinates are integers or quoted rationals
//! `"p/q"`; floating-point literals are rejected. Keys of `[phi]` other than
//! `0`, `inf` and `1` name the free parameter point. `[expected]` and
//! `[meta]` are optional.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;
use std::path::Path;
use std::sync::OnceLock;

use rug::{Integer, Rational};
use serde::de::{self, Deserializer, Visitor};
use serde::Deserialize;
use thiserror::Error;
use toml::Spanned;

use crate::stability::Status;
use crate::geometry::{
    self, AffinePiece, Condition, DivisorialPolytope, GeometryError, MarkedPoint, PlFunction, Polytope,
    RationalPoint,
};

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("condition {condition} fails: {witness}")]
    Validation { condition: Condition, witness: String },
    #[error("expected degree {expected} but the data has degree {computed}")]
    DegreeMismatch { expected: Rational, computed: Rational },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("no catalog entry matches {0:?}")]
    UnknownEntry(String),
}

/// Reference data printed alongside a variety.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Expected {
    pub degree: Option<Rational>,
    pub singularity: Option<String>,
    pub rho: Option<u32>,
    pub kstable: Option<bool>,
    /// Decimals exactly as printed.
    pub xi_reference: Option<Vec<String>>,
    pub toric: Option<bool>,
}

impl Expected {
    pub fn xi_reference_f64(&self) -> Option<Vec<f64>> {
        self.xi_reference
            .as_ref()
            .map(|xs| xs.iter().map(|x| x.parse().unwrap_or(f64::NAN)).collect())
    }

    /// Whether the printed soliton vector field vanishes.
    pub fn xi_is_zero(&self) -> Option<bool> {
        self.xi_reference_f64().map(|xs| xs.iter().all(|&x| x == 0.0))
    }

    /// Verdict implied by the K-stability mark and `ξ`: a failed mark with
    /// vanishing `ξ` is a Kähler-Einstein candidate destabilized with `DF = 0`.
    pub fn status(&self) -> Option<Status> {
        let k = self.kstable?;
        Some(match (k, self.xi_is_zero()) {
            (true, _) => Status::Stable,
            (false, Some(true)) => Status::KahlerEinsteinCandidate,
            (false, _) => Status::Unstable,
        })
    }

    fn is_empty(&self) -> bool {
        *self == Expected::default()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CatalogEntry {
    pub id: String,
    pub dp: DivisorialPolytope,
    pub expected: Expected,
    pub meta: BTreeMap<String, String>,
}

impl CatalogEntry {
    pub fn is_surface(&self) -> bool {
        self.dp.dim() == 1
    }
}

/// A rational literal: an integer or a quoted `"p/q"`.
struct RatLit(Rational);

impl<'de> Deserialize<'de> for RatLit {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = RatLit;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an integer or a quoted rational \"p/q\"")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<RatLit, E> {
                Ok(RatLit(Rational::from(v)))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<RatLit, E> {
                Ok(RatLit(Rational::from(v)))
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<RatLit, E> {
                Err(E::custom(format!(
                    "floating-point literal {v} is not allowed; write an exact rational such as \"1/2\""
                )))
            }
            fn visit_str<E: de::Error>(self, s: &str) -> Result<RatLit, E> {
                parse_rational(s).map(RatLit).map_err(E::custom)
            }
        }
        d.deserialize_any(V)
    }
}

/// Parses `"n"` or `"p/q"` exactly.
pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let t = s.trim();
    let ok = !t.is_empty()
        && t.chars().all(|c| c.is_ascii_digit() || c == '-' || c == '+' || c == '/')
        && t.matches('/').count() <= 1;
    if !ok {
        return Err(format!("{s:?} is not an exact rational (expected \"p/q\")"));
    }
    let q = Rational::from_str_radix(t.trim_start_matches('+'), 10).map_err(|e| format!("{s:?}: {e}"))?;
    Ok(q)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    id: String,
    dimension: Spanned<usize>,
    #[serde(rename = "box")]
    base: RawBox,
    phi: BTreeMap<String, Spanned<Vec<Spanned<RawPiece>>>>,
    expected: Option<RawExpected>,
    meta: Option<BTreeMap<String, String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBox {
    vertices: Spanned<Vec<Vec<RatLit>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPiece {
    a: Option<RatLit>,
    b: Option<Vec<RatLit>>,
    v: Option<Vec<RatLit>>,
    mu: Option<RatLit>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExpected {
    degree: Option<RatLit>,
    singularity: Option<String>,
    rho: Option<u32>,
    kstable: Option<bool>,
    xi_reference: Option<Vec<String>>,
    toric: Option<bool>,
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

fn parse_error(text: &str, span: Option<Range<usize>>, message: String) -> CatalogError {
    let (line, column) = span.map_or((0, 0), |s| line_col(text, s.start));
    CatalogError::Parse {
        line,
        column,
        message,
    }
}

/// Parses a document without validating it.
pub fn parse_entry(text: &str) -> Result<CatalogEntry, CatalogError> {
    let raw: RawEntry = toml::from_str(text).map_err(|e| parse_error(text, e.span(), e.message().to_string()))?;
    let n = *raw.dimension.get_ref();
    let span_err = |span: Range<usize>, msg: String| parse_error(text, Some(span), msg);
    let vspan = raw.base.vertices.span();
    let mut verts = Vec::new();
    for v in raw.base.vertices.into_inner() {
        if v.len() != n {
            return Err(span_err(vspan, format!("box vertex has {} coordinates, expected {n}", v.len())));
        }
        verts.push(RationalPoint(v.into_iter().map(|c| c.0).collect()));
    }
    let base = Polytope::from_points(n, &verts).map_err(|e| span_err(vspan.clone(), e.to_string()))?;
    let mut phi = BTreeMap::new();
    for (key, pieces) in raw.phi {
        let fspan = pieces.span();
        let mut out = Vec::new();
        for p in pieces.into_inner() {
            let pspan = p.span();
            out.push(piece_from_raw(p.into_inner(), n).map_err(|m| span_err(pspan, m))?);
        }
        let f = PlFunction::new(out).map_err(|e| span_err(fspan.clone(), e.to_string()))?;
        if phi.insert(MarkedPoint::parse(&key), f).is_some() {
            return Err(span_err(fspan, format!("duplicate marked point {key:?}")));
        }
    }
    let dp = DivisorialPolytope::new(base, phi).map_err(|e| span_err(vspan, e.to_string()))?;
    let expected = raw.expected.map_or_else(Expected::default, |e| Expected {
        degree: e.degree.map(|d| d.0),
        singularity: e.singularity,
        rho: e.rho,
        kstable: e.kstable,
        xi_reference: e.xi_reference,
        toric: e.toric,
    });
    Ok(CatalogEntry {
        id: raw.id,
        dp,
        expected,
        meta: raw.meta.unwrap_or_default(),
    })
}

fn piece_from_raw(p: RawPiece, n: usize) -> Result<AffinePiece, String> {
    match p {
        RawPiece {
            a: Some(a),
            b: Some(b),
            v: None,
            mu: None,
        } => {
            if b.len() != n {
                return Err(format!("linear part has {} coordinates, expected {n}", b.len()));
            }
            Ok(AffinePiece::new(b.into_iter().map(|c| c.0).collect(), a.0))
        }
        RawPiece {
            a: None,
            b: None,
            v: Some(v),
            mu: Some(mu),
        } => {
            if v.len() != n {
                return Err(format!("v has {} coordinates, expected {n}", v.len()));
            }
            let to_int = |q: Rational| -> Result<Integer, String> {
                if *q.denom() != 1 {
                    return Err(format!("{q} is not an integer"));
                }
                Ok(q.numer().clone())
            };
            let v: Vec<Integer> = v.into_iter().map(|c| to_int(c.0)).collect::<Result<_, _>>()?;
            let mu = to_int(mu.0)?;
            AffinePiece::from_v_mu(&v, &mu).map_err(|e| e.to_string())
        }
        _ => Err("a piece needs either `a` and `b`, or `v` and `mu`".into()),
    }
}

/// Parses and validates a document; the expected degree, when present, must
/// match.
pub fn load_str(text: &str) -> Result<CatalogEntry, CatalogError> {
    let entry = parse_entry(text)?;
    check_entry(&entry)?;
    Ok(entry)
}

fn check_entry(entry: &CatalogEntry) -> Result<(), CatalogError> {
    let report = geometry::validate(&entry.dp);
    if let Some(r) = report.first_failure() {
        return Err(CatalogError::Validation {
            condition: r.condition,
            witness: r.witness.as_ref().map_or_else(String::new, |w| w.to_string()),
        });
    }
    if let Some(e) = report.to_error() {
        return Err(e.into());
    }
    if let Some(expected) = &entry.expected.degree {
        let computed = geometry::degree(&entry.dp)?;
        if computed != *expected {
            return Err(CatalogError::DegreeMismatch {
                expected: expected.clone(),
                computed,
            });
        }
    }
    Ok(())
}

pub fn load_file(path: &Path) -> Result<CatalogEntry, CatalogError> {
    let text = std::fs::read_to_string(path).map_err(|e| CatalogError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    load_str(&text)
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c if c.is_control() => out.push_str(&format!("\\u{:04X}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn bare_key(k: &str) -> String {
    if !k.is_empty() && k.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
        k.to_string()
    } else {
        quote(k)
    }
}

fn rat_list(xs: &[Rational]) -> String {
    let items: Vec<String> = xs.iter().map(|x| quote(&x.to_string())).collect();
    format!("[{}]", items.join(", "))
}

/// Canonical text of an entry; loading it gives back an equal entry.
pub fn to_toml(entry: &CatalogEntry) -> String {
    let mut out = Vec::new();
    out.push(format!("id = {}", quote(&entry.id)));
    out.push(format!("dimension = {}", entry.dp.dim()));
    out.push(String::new());
    out.push("[box]".into());
    let verts: Vec<String> = entry.dp.base().vertices().iter().map(|v| rat_list(&v.0)).collect();
    out.push(format!("vertices = [{}]", verts.join(", ")));
    out.push(String::new());
    out.push("[phi]".into());
    for (y, f) in entry.dp.phi() {
        let pieces: Vec<String> = f
            .pieces()
            .iter()
            .map(|p| format!("{{ a = {}, b = {} }}", quote(&p.constant().to_string()), rat_list(p.linear())))
            .collect();
        out.push(format!("{} = [{}]", quote(y.key()), pieces.join(", ")));
    }
    let e = &entry.expected;
    if !e.is_empty() {
        out.push(String::new());
        out.push("[expected]".into());
        if let Some(d) = &e.degree {
            out.push(format!("degree = {}", quote(&d.to_string())));
        }
        if let Some(s) = &e.singularity {
            out.push(format!("singularity = {}", quote(s)));
        }
        if let Some(r) = e.rho {
            out.push(format!("rho = {r}"));
        }
        if let Some(k) = e.kstable {
            out.push(format!("kstable = {k}"));
        }
        if let Some(xs) = &e.xi_reference {
            let items: Vec<String> = xs.iter().map(|x| quote(x)).collect();
            out.push(format!("xi_reference = [{}]", items.join(", ")));
        }
        if let Some(t) = e.toric {
            out.push(format!("toric = {t}"));
        }
    }
    if !entry.meta.is_empty() {
        out.push(String::new());
        out.push("[meta]".into());
        for (k, v) in &entry.meta {
            out.push(format!("{} = {}", bare_key(k), quote(v)));
        }
    }
    let mut s = out.join("\n");
    s.push('\n');
    s
}

pub fn export(entry: &CatalogEntry, path: &Path) -> Result<(), CatalogError> {
    std::fs::write(path, to_toml(entry)).map_err(|e| CatalogError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

macro_rules! builtin_files {
    ($($path:literal),* $(,)?) => {
        &[$(($path, include_str!(concat!("../data/", $path)))),*]
    };
}

/// Relative path and contents of every shipped data file.
pub const BUILTIN_FILES: &[(&str, &str)] = builtin_files!(
    "surfaces/dp-01.toml",
    "surfaces/dp-02.toml",
    "surfaces/dp-03.toml",
    "surfaces/dp-04.toml",
    "surfaces/dp-05.toml",
    "surfaces/dp-06.toml",
    "surfaces/dp-07.toml",
    "surfaces/dp-08.toml",
    "surfaces/dp-09.toml",
    "surfaces/dp-10.toml",
    "surfaces/dp-11.toml",
    "surfaces/dp-12.toml",
    "surfaces/dp-13.toml",
    "surfaces/dp-14.toml",
    "surfaces/dp-15.toml",
    "surfaces/dp-16.toml",
    "surfaces/dp-17.toml",
    "surfaces/dp-18.toml",
    "surfaces/dp-19.toml",
    "surfaces/dp-20.toml",
    "surfaces/dp-21.toml",
    "surfaces/dp-22.toml",
    "surfaces/dp-23.toml",
    "surfaces/dp-24.toml",
    "surfaces/dp-25.toml",
    "surfaces/dp-26.toml",
    "surfaces/dp-27.toml",
    "surfaces/dp-28.toml",
    "surfaces/dp-29.toml",
    "surfaces/dp-30.toml",
    "surfaces/dp-31.toml",
    "surfaces/dp-32.toml",
    "surfaces/dp-33.toml",
    "surfaces/dp-34.toml",
    "threefolds/3fold-2.30.toml",
    "threefolds/3fold-3.23.toml",
);

/// All shipped entries: the 34 surfaces in table order, then the threefolds.
pub fn builtin() -> &'static [CatalogEntry] {
    static ENTRIES: OnceLock<Vec<CatalogEntry>> = OnceLock::new();
    ENTRIES.get_or_init(|| {
        BUILTIN_FILES
            .iter()
            .map(|(path, text)| load_str(text).unwrap_or_else(|e| panic!("builtin {path}: {e}")))
            .collect()
    })
}

pub fn load_builtin() -> Vec<CatalogEntry> {
    builtin().to_vec()
}

/// Looks up a builtin by id (`dp/13`, `3fold/2.30`) or a short form
/// (`13`, `2.30`).
pub fn find(target: &str) -> Option<&'static CatalogEntry> {
    let entries = builtin();
    if let Some(e) = entries.iter().find(|e| e.id == target) {
        return Some(e);
    }
    let t = target.trim_start_matches("dp/").trim_start_matches("3fold/");
    if let Ok(row) = t.parse::<u32>() {
        return entries.iter().find(|e| e.id == format!("dp/{row}"));
    }
    entries.iter().find(|e| e.id == format!("3fold/{t}"))
}

/// A builtin id or a path to a data file.
pub fn resolve(target: &str) -> Result<CatalogEntry, CatalogError> {
    if let Some(e) = find(target) {
        return Ok(e.clone());
    }
    let path = Path::new(target);
    if path.exists() {
        return load_file(path);
    }
    Err(CatalogError::UnknownEntry(target.to_string()))
}
