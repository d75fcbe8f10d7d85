//! File formats and complex literals.
//!
//! Complex entries are two-element `[re, im]` arrays. Floats are written in the shortest form
//! that parses back to the same value, so re-serializing a parsed file reproduces it byte for byte.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::EigenPairSet;
use crate::numerics::{c, cr, CMatrix, Star, C64};
use crate::system::{PalindromicSystem, SymmetryClass};

pub const FORMAT_TAG: &str = "palinverse-v1";

type JsonMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassJson {
    star: String,
    epsilon: i8,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemJson {
    format: String,
    class: ClassJson,
    n: usize,
    #[serde(rename = "A1")]
    a1: JsonMatrix,
    #[serde(rename = "A0")]
    a0: JsonMatrix,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PairJson {
    #[serde(rename = "X")]
    x: JsonMatrix,
    #[serde(rename = "T", default, skip_serializing_if = "Option::is_none")]
    t: Option<JsonMatrix>,
}

fn to_json(m: &CMatrix) -> JsonMatrix {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

fn from_json(rows: &JsonMatrix, name: &str) -> Result<CMatrix> {
    let r = rows.len();
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|row| row.len() != cols) {
        return Err(Error::Parse(format!("{name}: rows have different lengths")));
    }
    Ok(CMatrix::from_fn(r, cols, |i, j| c(rows[i][j][0], rows[i][j][1])))
}

fn parse_json<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

fn class_to_json(class: SymmetryClass) -> ClassJson {
    let star = match class.star {
        Star::Transpose => "T",
        Star::Conjugate => "H",
    };
    ClassJson { star: star.into(), epsilon: class.epsilon }
}

fn class_from_json(cj: &ClassJson) -> Result<SymmetryClass> {
    let star = match cj.star.as_str() {
        "T" => Star::Transpose,
        "H" => Star::Conjugate,
        other => return Err(Error::Parse(format!("unknown star {other:?}, expected \"T\" or \"H\""))),
    };
    SymmetryClass::new(star, cj.epsilon).map_err(|_| Error::Parse(format!("epsilon must be 1 or -1, got {}", cj.epsilon)))
}

pub fn system_to_string(sys: &PalindromicSystem) -> String {
    let doc = SystemJson {
        format: FORMAT_TAG.into(),
        class: class_to_json(sys.class()),
        n: sys.n(),
        a1: to_json(sys.a1()),
        a0: to_json(sys.a0()),
    };
    let mut s = serde_json::to_string(&doc).expect("plain data serializes");
    s.push('\n');
    s
}

/// Parse a system file; the symmetry of `A0` is checked by the system constructor.
pub fn system_from_str(text: &str) -> Result<PalindromicSystem> {
    let doc: SystemJson = parse_json(text)?;
    if doc.format != FORMAT_TAG {
        return Err(Error::Parse(format!("format tag {:?}, expected {FORMAT_TAG:?}", doc.format)));
    }
    let class = class_from_json(&doc.class)?;
    let a1 = from_json(&doc.a1, "A1")?;
    let a0 = from_json(&doc.a0, "A0")?;
    if a1.shape() != (doc.n, doc.n) || a0.shape() != (doc.n, doc.n) {
        return Err(Error::Parse(format!("coefficients must be {0}x{0}", doc.n)));
    }
    PalindromicSystem::new(class, a1, a0)
}

pub fn pair_to_string(x: &CMatrix, t: Option<&CMatrix>) -> String {
    let doc = PairJson { x: to_json(x), t: t.map(to_json) };
    let mut s = serde_json::to_string(&doc).expect("plain data serializes");
    s.push('\n');
    s
}

/// Parse a pair file; `T` may be omitted when only eigenvectors are supplied.
pub fn pair_from_str(text: &str) -> Result<(CMatrix, Option<CMatrix>)> {
    let doc: PairJson = parse_json(text)?;
    let x = from_json(&doc.x, "X")?;
    let t = doc.t.as_ref().map(|t| from_json(t, "T")).transpose()?;
    Ok((x, t))
}

/// A list of eigenvalues: `[re, im]` pairs or complex literals.
pub fn values_from_str(text: &str) -> Result<Vec<C64>> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Entry {
        Pair([f64; 2]),
        Literal(String),
        Real(f64),
    }
    let entries: Vec<Entry> = parse_json(text)?;
    entries
        .into_iter()
        .map(|e| match e {
            Entry::Pair([re, im]) => Ok(c(re, im)),
            Entry::Real(re) => Ok(cr(re)),
            Entry::Literal(s) => parse_complex(&s),
        })
        .collect()
}

pub fn read_text(path: &Path) -> Result<String> {
    Ok(fs::read_to_string(path)?)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    Ok(fs::write(path, text)?)
}

fn parse_real(s: &str, whole: &str) -> Result<f64> {
    match s {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        _ => s
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| Error::Parse(format!("bad complex literal {whole:?}"))),
    }
}

/// Parse `a+bi`, `a`, `bi`, `-i` or `1/(a+bi)`; `j` is accepted for `i`.
pub fn parse_complex(text: &str) -> Result<C64> {
    let s: String = text.chars().filter(|ch| !ch.is_whitespace()).collect();
    if s.is_empty() {
        return Err(Error::Parse("empty complex literal".into()));
    }
    if let Some(inner) = s.strip_prefix("1/(").and_then(|r| r.strip_suffix(')')) {
        let z = parse_complex(inner)?;
        if z.norm() == 0.0 {
            return Err(Error::ZeroLambda);
        }
        return Ok(cr(1.0) / z);
    }
    let Some(body) = s.strip_suffix('i').or_else(|| s.strip_suffix('j')) else {
        if s == "+" || s == "-" {
            return Err(Error::Parse(format!("bad complex literal {text:?}")));
        }
        return Ok(cr(parse_real(&s, text)?));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    match split {
        Some(k) => {
            let re = &body[..k];
            if re.is_empty() || re == "+" || re == "-" {
                return Err(Error::Parse(format!("bad complex literal {text:?}")));
            }
            Ok(c(parse_real(re, text)?, parse_real(&body[k..], text)?))
        }
        None => Ok(c(0.0, parse_real(body, text)?)),
    }
}

/// Comma-separated complex literals.
pub fn parse_complex_list(text: &str) -> Result<Vec<C64>> {
    text.split(',').map(parse_complex).collect()
}

/// Shortest round-trip `a+bi` rendering.
pub fn format_complex(z: C64) -> String {
    if z.im.is_sign_negative() {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

/// Fixed-precision rendering for human-readable tables.
pub fn format_complex_fixed(z: C64, digits: usize) -> String {
    let sign = if z.im < 0.0 { '-' } else { '+' };
    format!("{:.*}{}{:.*}i", digits, z.re, sign, digits, z.im.abs())
}

#[derive(Serialize)]
struct EigJson<'a> {
    class: ClassJson,
    n: usize,
    eigenvalues: Vec<[f64; 2]>,
    pairs: &'a [(usize, usize)],
    singles: &'a [usize],
    unmatched: &'a [usize],
    residuals: &'a [f64],
    pair_errors: &'a [f64],
    pairing_tol: f64,
}

pub fn eigs_to_string(eigs: &EigenPairSet, n: usize) -> String {
    let doc = EigJson {
        class: class_to_json(eigs.class),
        n,
        eigenvalues: eigs.values.iter().map(|z| [z.re, z.im]).collect(),
        pairs: &eigs.pairs,
        singles: &eigs.singles,
        unmatched: &eigs.unmatched,
        residuals: &eigs.residuals,
        pair_errors: &eigs.pair_errors,
        pairing_tol: eigs.pairing_tol,
    };
    let mut s = serde_json::to_string(&doc).expect("plain data serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::reference_update;

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("1+2i").unwrap(), c(1.0, 2.0));
        assert_eq!(parse_complex("1 - 2i").unwrap(), c(1.0, -2.0));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("2.5").unwrap(), cr(2.5));
        assert_eq!(parse_complex("1e-3+2E+1j").unwrap(), c(1e-3, 20.0));
        assert_eq!(parse_complex("-4.0685+10.3032i").unwrap(), c(-4.0685, 10.3032));
        assert_eq!(parse_complex("1/(2)").unwrap(), cr(0.5));
        assert!((parse_complex("1/(1-1i)").unwrap() - c(0.5, 0.5)).norm() < 1e-16);
        assert!(parse_complex("1+").is_err());
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("nan").is_err());
        assert_eq!(parse_complex_list("4,0.25").unwrap(), vec![cr(4.0), cr(0.25)]);
    }

    #[test]
    fn literal_round_trip() {
        for z in [c(0.1, -0.2), c(-1e-300, 3.0), c(1.0 / 3.0, 0.0)] {
            assert_eq!(parse_complex(&format_complex(z)).unwrap(), z);
        }
    }

    #[test]
    fn system_round_trip_is_byte_identical() {
        for class in SymmetryClass::ALL {
            let sys = reference_update(class).system;
            let text = system_to_string(&sys);
            let back = system_from_str(&text).unwrap();
            assert_eq!(back, sys);
            assert_eq!(system_to_string(&back), text);
        }
    }

    #[test]
    fn bad_files() {
        assert!(matches!(system_from_str("{"), Err(Error::Parse(_))));
        let bad_tag = r#"{"format":"x","class":{"star":"T","epsilon":1},"n":1,"A1":[[[1,0]]],"A0":[[[0,0]]]}"#;
        assert!(matches!(system_from_str(bad_tag), Err(Error::Parse(_))));
        let skew = r#"{"format":"palinverse-v1","class":{"star":"T","epsilon":1},"n":2,
            "A1":[[[1,0],[0,0]],[[0,0],[1,0]]],"A0":[[[0,0],[1,0]],[[0,0],[0,0]]]}"#;
        assert!(matches!(system_from_str(skew), Err(Error::A0SymmetryViolation(_))));
    }

    #[test]
    fn value_lists() {
        let v = values_from_str(r#"[[1, 2], "0.5-0.5i", 3]"#).unwrap();
        assert_eq!(v, vec![c(1.0, 2.0), c(0.5, -0.5), cr(3.0)]);
    }
}
