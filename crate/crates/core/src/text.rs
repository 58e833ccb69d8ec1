//! Text forms for fields, elements, polynomials, rational functions and places.
//!
//! * field: `"p^e"` or a prime power such as `"9"`
//! * element: decimal `"c"` (reduced mod `p`) or coordinates `"[c0,c1,...]"`
//! * polynomial: terms `c`, `c*t`, `c*t^k`, `t^k`, `t` joined by `+` or `-`,
//!   optionally wrapped in parentheses, e.g. `"t^3+2*t+1"`
//! * rational function: `"num/den"` or `"num"`
//! * place: a monic irreducible polynomial or `"inf"`

use crate::arith;
use crate::error::{Error, Result};
use crate::gf::{Field, FieldElem};
use crate::places::Place;
use crate::poly::Poly;
use crate::ratfunc::RatFunc;

fn err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

pub fn parse_field(s: &str) -> Result<Field> {
    let s = s.trim();
    let (p, e) = match s.split_once('^') {
        Some((p, e)) => {
            let p = p.trim().parse::<u64>().map_err(|_| err(format!("bad characteristic in {s:?}")))?;
            let e = e.trim().parse::<u32>().map_err(|_| err(format!("bad exponent in {s:?}")))?;
            (p, e)
        }
        None => {
            let q = s.parse::<u64>().map_err(|_| err(format!("bad field order {s:?}")))?;
            arith::prime_power(q).ok_or_else(|| err(format!("{q} is not a prime power")))?
        }
    };
    Field::new(p, e)
}

fn parse_int(field: &Field, s: &str) -> Result<u64> {
    let n = s.trim().parse::<i64>().map_err(|_| err(format!("bad integer {s:?}")))?;
    Ok(field.from_int(n))
}

/// Parses an element and returns its code.
pub fn parse_code(field: &Field, s: &str) -> Result<u64> {
    let s = s.trim();
    if let Some(inner) = s.strip_prefix('[') {
        let inner = inner.strip_suffix(']').ok_or_else(|| err(format!("unclosed bracket in {s:?}")))?;
        let digits = inner
            .split(',')
            .map(|d| parse_int(field, d))
            .collect::<Result<Vec<_>>>()?;
        return field.from_digits(&digits);
    }
    parse_int(field, s)
}

pub fn parse_elem(field: &Field, s: &str) -> Result<FieldElem> {
    Ok(field.elem(parse_code(field, s)?))
}

fn strip_parens(s: &str) -> &str {
    let s = s.trim();
    match s.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
        Some(inner) if balanced(inner) => inner.trim(),
        _ => s,
    }
}

fn balanced(s: &str) -> bool {
    let mut depth = 0i32;
    for ch in s.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        if depth < 0 {
            return false;
        }
    }
    depth == 0
}

pub fn parse_poly(field: &Field, s: &str) -> Result<Poly> {
    let body: String = strip_parens(s).chars().filter(|c| !c.is_whitespace()).collect();
    if body.is_empty() {
        return Err(err("empty polynomial"));
    }
    let mut out = Poly::zero(field);
    let (mut start, mut negative, mut depth) = (0, false, 0);
    for (i, ch) in body.char_indices() {
        match ch {
            '[' => depth += 1,
            ']' => depth -= 1,
            '+' | '-' if depth == 0 => {
                if i > start {
                    let term = parse_term(field, &body[start..i])?;
                    out = &out + &if negative { -&term } else { term };
                    negative = false;
                }
                negative ^= ch == '-';
                start = i + 1;
            }
            _ => {}
        }
    }
    let term = parse_term(field, &body[start..])?;
    out = &out + &if negative { -&term } else { term };
    Ok(out)
}

fn parse_term(field: &Field, s: &str) -> Result<Poly> {
    if s.is_empty() {
        return Err(err("empty term"));
    }
    let (coeff, mono) = match s.find('t') {
        None => (s, None),
        Some(pos) => {
            let coeff = s[..pos].strip_suffix('*').unwrap_or(&s[..pos]);
            (coeff, Some(&s[pos + 1..]))
        }
    };
    let code = if coeff.is_empty() { 1 } else { parse_code(field, coeff)? };
    let k = match mono {
        None => 0,
        Some("") => 1,
        Some(rest) => {
            let exp = rest.strip_prefix('^').ok_or_else(|| err(format!("bad term {s:?}")))?;
            exp.parse::<usize>().map_err(|_| err(format!("bad exponent in {s:?}")))?
        }
    };
    Ok(Poly::monomial(field, code, k))
}

/// Splits at a `/` outside parentheses and brackets.
fn split_fraction(s: &str) -> Result<(&str, Option<&str>)> {
    let mut depth = 0i32;
    let mut at = None;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            '/' if depth == 0 => {
                if at.is_some() {
                    return Err(err(format!("more than one '/' in {s:?}")));
                }
                at = Some(i);
            }
            _ => {}
        }
    }
    Ok(match at {
        Some(i) => (&s[..i], Some(&s[i + 1..])),
        None => (s, None),
    })
}

pub fn parse_ratfunc(field: &Field, s: &str) -> Result<RatFunc> {
    let (num, den) = split_fraction(s.trim())?;
    let num = parse_poly(field, num)?;
    match den {
        None => Ok(RatFunc::from(num)),
        Some(d) => RatFunc::new(num, parse_poly(field, d)?),
    }
}

pub fn parse_place(field: &Field, s: &str) -> Result<Place> {
    if s.trim().eq_ignore_ascii_case("inf") {
        return Ok(Place::Infinity);
    }
    Place::finite(parse_poly(field, s)?)
}
