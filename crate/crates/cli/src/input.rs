//! Geometry files: JSON with exact "p/q" strings or plain (binary float)
//! numbers.

use std::str::FromStr;

use num::traits::{One, Signed, Zero};
use num::{BigInt, BigRational};
use serde_json::Value;

use pentakin::kinmap::{Leg, Pentapod};
use pentakin::polyalg::scalar::{rat_from_f64, rat_to_f64};
use pentakin::Rat;

/// Input problems, split by exit code.
#[derive(Debug)]
pub enum InputError {
    /// Unreadable or structurally wrong input (exit 1).
    Malformed(String),
    /// Well-formed but invalid values (exit 2).
    Invalid(String),
}

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InputError::Malformed(m) | InputError::Invalid(m) => f.write_str(m),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Geometry {
    pub pentapod: Pentapod<Rat>,
    /// Squared lengths from the file, if any.
    pub lengths_sq: Option<[Rat; 5]>,
}

impl Geometry {
    /// The pentapod with squared lengths set; `None` if no lengths are known.
    pub fn with_lengths(&self) -> Option<Pentapod<Rat>> {
        self.lengths_sq.as_ref().map(|r2| self.pentapod.with_r2(r2))
    }
}

/// Parses "p/q", integers and plain decimals ("1.25", "-3e-2") exactly.
pub fn parse_rational(s: &str) -> Option<Rat> {
    let s = s.trim();
    if s.contains('/') {
        let r = BigRational::from_str(s).ok()?;
        return Some(r);
    }
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(k) => (&s[..k], s[k + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    let digits = format!("{int}{frac}");
    let digits = if digits == "-" || digits == "+" {
        return None;
    } else {
        digits
    };
    let n = BigInt::from_str(&digits).ok()?;
    let shift = exp - frac.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    let scale = if shift >= 0 {
        num::pow(ten, shift as usize)
    } else {
        BigRational::one() / num::pow(ten, (-shift) as usize)
    };
    Some(BigRational::from_integer(n) * scale)
}

fn number(v: &Value, path: &str) -> Result<Rat, InputError> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                return Ok(Rat::from_integer(i.into()));
            }
            n.as_f64()
                .and_then(rat_from_f64)
                .ok_or_else(|| InputError::Malformed(format!("{path}: number out of range")))
        }
        Value::String(s) => parse_rational(s).ok_or_else(|| {
            InputError::Malformed(format!("{path}: cannot read \"{s}\" as a rational number"))
        }),
        _ => Err(InputError::Malformed(format!(
            "{path}: expected a number or a \"p/q\" string"
        ))),
    }
}

fn array<'a>(v: &'a Value, path: &str, len: usize) -> Result<&'a Vec<Value>, InputError> {
    match v.as_array() {
        Some(a) if a.len() == len => Ok(a),
        Some(a) => Err(InputError::Malformed(format!(
            "{path}: expected {len} entries, found {}",
            a.len()
        ))),
        None => Err(InputError::Malformed(format!(
            "{path}: expected an array of {len} entries"
        ))),
    }
}

fn numbers<const N: usize>(v: &Value, path: &str) -> Result<[Rat; N], InputError> {
    let a = array(v, path, N)?;
    let out: Vec<Rat> = a
        .iter()
        .enumerate()
        .map(|(k, x)| number(x, &format!("{path}[{k}]")))
        .collect::<Result<_, _>>()?;
    Ok(std::array::from_fn(|k| out[k].clone()))
}

fn positive(r: [Rat; 5], what: &str) -> Result<[Rat; 5], InputError> {
    match r.iter().position(|x| !x.is_positive()) {
        Some(k) => Err(InputError::Invalid(format!(
            "{what}[{k}] must be positive, got {}",
            r[k]
        ))),
        None => Ok(r),
    }
}

/// Parses a comma-separated list of five lengths, returned squared.
pub fn parse_lengths(items: &[String]) -> Result<[Rat; 5], InputError> {
    if items.len() != 5 {
        return Err(InputError::Malformed(format!(
            "--lengths: expected 5 values, found {}",
            items.len()
        )));
    }
    let mut out = Vec::with_capacity(5);
    for (k, s) in items.iter().enumerate() {
        out.push(parse_rational(s).ok_or_else(|| {
            InputError::Malformed(format!("--lengths[{k}]: cannot read \"{s}\""))
        })?);
    }
    let r = positive(std::array::from_fn(|k| out[k].clone()), "--lengths")?;
    Ok(r.map(|x| &x * &x))
}

fn apply_frame(frame: &Value, bases: &mut [[Rat; 3]; 5], tol: f64) -> Result<(), InputError> {
    let rows = array(&frame["rotation"], "frame.rotation", 3)?;
    let rot: Vec<[Rat; 3]> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| numbers::<3>(r, &format!("frame.rotation[{i}]")))
        .collect::<Result<_, _>>()?;
    let t = match frame.get("translation") {
        Some(v) => numbers::<3>(v, "frame.translation")?,
        None => std::array::from_fn(|_| Rat::zero()),
    };
    let rf: Vec<[f64; 3]> = rot.iter().map(|r| r.each_ref().map(rat_to_f64)).collect();
    for i in 0..3 {
        for j in 0..3 {
            let d: f64 =
                (0..3).map(|k| rf[k][i] * rf[k][j]).sum::<f64>() - if i == j { 1.0 } else { 0.0 };
            if d.abs() > tol {
                return Err(InputError::Invalid(
                    "frame.rotation is not orthogonal".into(),
                ));
            }
        }
    }
    let det = rf[0][0] * (rf[1][1] * rf[2][2] - rf[1][2] * rf[2][1])
        - rf[0][1] * (rf[1][0] * rf[2][2] - rf[1][2] * rf[2][0])
        + rf[0][2] * (rf[1][0] * rf[2][1] - rf[1][1] * rf[2][0]);
    if det < 0.0 {
        return Err(InputError::Invalid("frame.rotation is a reflection".into()));
    }
    for b in bases.iter_mut() {
        *b = std::array::from_fn(|i| (0..3).fold(t[i].clone(), |acc, k| acc + &rot[i][k] * &b[k]));
    }
    Ok(())
}

/// Reads a geometry file. `frame` maps the file's base coordinates into the
/// working frame before anything else happens.
pub fn parse_geometry(text: &str, tol: f64) -> Result<Geometry, InputError> {
    let v: Value = serde_json::from_str(text).map_err(|e| {
        InputError::Malformed(format!(
            "malformed JSON at line {}, column {}: {e}",
            e.line(),
            e.column()
        ))
    })?;
    if !v.is_object() {
        return Err(InputError::Malformed(
            "top level: expected an object".into(),
        ));
    }
    let platform = numbers::<5>(v.get("platform").unwrap_or(&Value::Null), "platform")?;
    let base_rows = array(v.get("base").unwrap_or(&Value::Null), "base", 5)?;
    let bases: Vec<[Rat; 3]> = base_rows
        .iter()
        .enumerate()
        .map(|(i, b)| numbers::<3>(b, &format!("base[{i}]")))
        .collect::<Result<_, _>>()?;
    let mut bases: [[Rat; 3]; 5] = std::array::from_fn(|i| bases[i].clone());
    if let Some(f) = v.get("frame").filter(|f| !f.is_null()) {
        apply_frame(f, &mut bases, tol)?;
    }
    let lengths = v.get("lengths").filter(|l| !l.is_null());
    let squared = v.get("lengths_squared").filter(|l| !l.is_null());
    let lengths_sq = match (lengths, squared) {
        (Some(_), Some(_)) => {
            return Err(InputError::Malformed(
                "give either lengths or lengths_squared, not both".into(),
            ))
        }
        (Some(l), None) => Some(positive(numbers::<5>(l, "lengths")?, "lengths")?.map(|x| &x * &x)),
        (None, Some(l)) => Some(positive(
            numbers::<5>(l, "lengths_squared")?,
            "lengths_squared",
        )?),
        (None, None) => None,
    };
    let pentapod =
        Pentapod::from_points(platform, bases).map_err(|e| InputError::Invalid(e.to_string()))?;
    Ok(Geometry {
        pentapod,
        lengths_sq,
    })
}

/// Leg in user coordinates with exact values written as strings.
pub fn leg_json(leg: &Leg<Rat>) -> Value {
    serde_json::json!({
        "a": leg.a.to_string(),
        "base": leg.base.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "lengthSquared": leg.r2.as_ref().map(|r| r.to_string()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use pentakin::polyalg::scalar::rat;

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("3/5"), Some(rat(3, 5)));
        assert_eq!(parse_rational("-7"), Some(rat(-7, 1)));
        assert_eq!(parse_rational("1.25"), Some(rat(5, 4)));
        assert_eq!(parse_rational("-2.5e-1"), Some(rat(-1, 4)));
        assert_eq!(parse_rational(".5"), Some(rat(1, 2)));
        assert_eq!(parse_rational("x"), None);
        assert_eq!(parse_rational("-"), None);
        assert_eq!(parse_rational("1/0"), None);
    }

    #[test]
    fn geometry_errors() {
        assert!(matches!(
            parse_geometry("{", 1e-9),
            Err(InputError::Malformed(_))
        ));
        let short = r#"{"platform":[0,1,2,3],"base":[[0,0,0],[1,0,0],[0,1,0],[0,0,1],[1,1,1]]}"#;
        assert!(
            matches!(parse_geometry(short, 1e-9), Err(InputError::Malformed(m)) if m.contains("platform"))
        );
        let neg = r#"{"platform":[0,1,2,3,4],"base":[[0,0,0],[1,0,0],[0,1,0],[0,0,1],[1,1,1]],"lengths":[1,1,-1,1,1]}"#;
        assert!(matches!(
            parse_geometry(neg, 1e-9),
            Err(InputError::Invalid(_))
        ));
    }

    #[test]
    fn frame_moves_the_base() {
        let text = r#"{"platform":[0,1,2,3,4],"base":[[0,0,0],[1,0,0],[0,1,0],[0,0,1],[1,1,1]],
            "frame":{"rotation":[[0,-1,0],[1,0,0],[0,0,1]],"translation":["1/2",0,0]}}"#;
        let g = parse_geometry(text, 1e-9).unwrap();
        assert_eq!(g.pentapod.legs[1].base, [rat(1, 2), rat(1, 1), rat(0, 1)]);
        let bad = text.replace("[0,0,1]]", "[0,0,2]]");
        assert!(matches!(
            parse_geometry(&bad, 1e-9),
            Err(InputError::Invalid(_))
        ));
    }
}
