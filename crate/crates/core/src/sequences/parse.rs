//! Text descriptions of corpus sequences, e.g. `weyl:alpha=0.414,deg=2`.

use super::{IidDistribution, VectorSequence};
use crate::error::{Error, Result};
use crate::linalg::{CVec, Complex};

fn err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

/// Splits on `sep` outside of `()`/`[]` nesting.
fn split_top(s: &str, sep: char) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            c if c == sep && depth == 0 => {
                parts.push(&s[start..i]);
                start = i + ch.len_utf8();
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

fn parse_f64(s: &str) -> Result<f64> {
    let t = s.trim();
    t.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| err(format!("expected a number, found `{t}`")))
}

/// Accepts `(re,im)`, a bare real, or `a+bi` / `bi` forms.
pub(crate) fn parse_complex(s: &str) -> Result<Complex> {
    let t = s.trim();
    if let Some(inner) = t.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
        let parts: Vec<&str> = inner.split(',').collect();
        if parts.len() != 2 {
            return Err(err(format!("expected (re,im), found `{t}`")));
        }
        return Ok(Complex::new(parse_f64(parts[0])?, parse_f64(parts[1])?));
    }
    if let Some(body) = t.strip_suffix('i') {
        // find the sign separating real and imaginary parts, skipping exponents
        let bytes = body.as_bytes();
        let split = (1..bytes.len()).rev().find(|&k| {
            (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E')
        });
        let (re, im) = match split {
            Some(k) => (parse_f64(&body[..k])?, imag_coeff(&body[k..])?),
            None => (0.0, imag_coeff(body)?),
        };
        return Ok(Complex::new(re, im));
    }
    Ok(Complex::new(parse_f64(t)?, 0.0))
}

fn imag_coeff(s: &str) -> Result<f64> {
    match s.trim() {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        other => parse_f64(other),
    }
}

fn parse_vector(s: &str) -> Result<CVec> {
    let t = s.trim();
    let inner = t
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .unwrap_or(t);
    let comps = split_top(inner, ',')
        .into_iter()
        .map(parse_complex)
        .collect::<Result<Vec<_>>>()?;
    if comps.is_empty() {
        return Err(err("empty vector"));
    }
    Ok(CVec::from_vec(comps))
}

fn parse_reals(s: &str) -> Result<Vec<f64>> {
    let t = s.trim();
    let inner = t
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| err(format!("expected [..], found `{t}`")))?;
    inner.split(',').map(parse_f64).collect()
}

struct Fields<'a> {
    kind: &'a str,
    pairs: Vec<(&'a str, &'a str)>,
}

impl<'a> Fields<'a> {
    fn parse(kind: &'a str, body: &'a str, allowed: &[&str]) -> Result<Self> {
        let mut pairs = Vec::new();
        for item in split_top(body, ',') {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| err(format!("{kind}: expected key=value, found `{item}`")))?;
            let k = k.trim();
            if !allowed.contains(&k) {
                return Err(err(format!("{kind}: unknown key `{k}`")));
            }
            if pairs.iter().any(|(seen, _)| *seen == k) {
                return Err(err(format!("{kind}: duplicate key `{k}`")));
            }
            pairs.push((k, v.trim()));
        }
        Ok(Fields { kind, pairs })
    }

    fn get(&self, key: &str) -> Option<&'a str> {
        self.pairs.iter().find(|(k, _)| *k == key).map(|(_, v)| *v)
    }

    fn require(&self, key: &str) -> Result<&'a str> {
        self.get(key)
            .ok_or_else(|| err(format!("{}: missing `{key}`", self.kind)))
    }
}

/// Parses the sequence mini-language:
///
/// ```text
/// periodic:[(1,0);(-1,0)]
/// geometric:lambda=0.3+0.4i,c=[(1,0)]      (or theta=<turns> instead of lambda)
/// weyl:alpha=0.41421356,deg=2
/// iid:dist=unit-circle,seed=7,dim=2
/// rotation:theta=[0.1,0.25],c=[(1,0),(0,1)]
/// ```
pub fn parse_sequence(text: &str) -> Result<VectorSequence> {
    let text = text.trim();
    let (kind, body) = text
        .split_once(':')
        .ok_or_else(|| err(format!("expected <kind>:<params>, found `{text}`")))?;
    match kind.trim() {
        "periodic" => {
            let inner = body
                .trim()
                .strip_prefix('[')
                .and_then(|r| r.strip_suffix(']'))
                .ok_or_else(|| err("periodic: expected [v;v;...]"))?;
            let vectors = split_top(inner, ';')
                .into_iter()
                .map(parse_vector)
                .collect::<Result<Vec<_>>>()?;
            VectorSequence::periodic(vectors).map_err(|e| err(e.to_string()))
        }
        "geometric" => {
            let f = Fields::parse("geometric", body, &["lambda", "theta", "c"])?;
            let c = parse_vector(f.require("c")?)?;
            match (f.get("lambda"), f.get("theta")) {
                (Some(l), None) => {
                    VectorSequence::geometric(parse_complex(l)?, c).map_err(|e| err(e.to_string()))
                }
                (None, Some(t)) => Ok(VectorSequence::geometric_turns(parse_f64(t)?, c)),
                _ => Err(err("geometric: give exactly one of lambda= or theta=")),
            }
        }
        "weyl" => {
            let f = Fields::parse("weyl", body, &["alpha", "deg"])?;
            let alpha = parse_f64(f.require("alpha")?)?;
            let deg = f
                .require("deg")?
                .parse::<u32>()
                .map_err(|_| err("weyl: deg must be a nonnegative integer"))?;
            Ok(VectorSequence::weyl(alpha, deg))
        }
        "iid" => {
            let f = Fields::parse("iid", body, &["dist", "seed", "dim"])?;
            let dist: IidDistribution = f.require("dist")?.parse()?;
            let seed = f
                .get("seed")
                .map(|s| s.parse::<u64>().map_err(|_| err("iid: seed must be a u64")))
                .transpose()?
                .unwrap_or(0);
            let dim = f
                .get("dim")
                .map(|s| {
                    s.parse::<usize>()
                        .map_err(|_| err("iid: dim must be a positive integer"))
                })
                .transpose()?
                .unwrap_or(1);
            if dim == 0 {
                return Err(err("iid: dim must be positive"));
            }
            Ok(VectorSequence::iid_random(seed, dist, dim))
        }
        "rotation" => {
            let f = Fields::parse("rotation", body, &["theta", "c"])?;
            let thetas = parse_reals(f.require("theta")?)?;
            let c = parse_vector(f.require("c")?)?;
            VectorSequence::rotation_orbit(thetas, c).map_err(|e| err(e.to_string()))
        }
        other => Err(err(format!("unknown sequence kind `{other}`"))),
    }
}
