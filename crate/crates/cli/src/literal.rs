//! Cyclotomic literals: signed integer combinations of powers of `z`, where `z` is the
//! context's root of unity, e.g. `z^7 - 2*z + 3`.

use std::fmt;
use std::sync::Arc;

use upslope_core::{CycloElt, PadicContext};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub input: String,
    pub reason: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cannot parse {:?}: {}", self.input, self.reason)
    }
}

impl std::error::Error for ParseError {}

/// Parses into `(exponent, coefficient)` terms without reducing.
pub fn parse_terms(s: &str) -> Result<Vec<(i64, i128)>, ParseError> {
    let err = |reason: &str| ParseError { input: s.to_string(), reason: reason.to_string() };
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(err("empty literal"));
    }
    let mut terms = Vec::new();
    let mut rest = compact.as_str();
    let mut first = true;
    while !rest.is_empty() {
        let sign = match rest.as_bytes()[0] {
            b'+' => {
                rest = &rest[1..];
                1
            }
            b'-' => {
                rest = &rest[1..];
                -1
            }
            _ if first => 1,
            _ => return Err(err("expected '+' or '-' between terms")),
        };
        first = false;
        let end = rest.find(['+', '-']).unwrap_or(rest.len());
        let (term, tail) = rest.split_at(end);
        rest = tail;
        if term.is_empty() {
            return Err(err("dangling sign"));
        }
        let (coeff, power) = match term.find('z') {
            None => (term, None),
            Some(at) => {
                let c = term[..at].strip_suffix('*').unwrap_or(&term[..at]);
                let c = if c.is_empty() { "1" } else { c };
                let k = match &term[at + 1..] {
                    "" => 1,
                    e => e
                        .strip_prefix('^')
                        .ok_or_else(|| err("expected '^' after z"))?
                        .parse::<i64>()
                        .map_err(|_| err("bad exponent"))?,
                };
                (c, Some(k))
            }
        };
        let c: i128 = coeff.parse().map_err(|_| err("bad coefficient"))?;
        terms.push((power.unwrap_or(0), sign * c));
    }
    Ok(terms)
}

pub fn parse(ctx: &Arc<PadicContext>, s: &str) -> Result<CycloElt, ParseError> {
    Ok(CycloElt::from_zeta_coeffs(ctx, &parse_terms(s)?))
}

fn signed(ctx: &PadicContext, r: u64) -> i128 {
    let md = ctx.modulus() as i128;
    let r = r as i128;
    if r > md / 2 {
        r - md
    } else {
        r
    }
}

/// `±z^k` when the element is a signed root of unity, otherwise the power-basis expansion
/// with symmetric coefficients, highest power first.
pub fn format(x: &CycloElt) -> String {
    let ctx = x.ctx();
    if x.is_zero() {
        return "0".into();
    }
    let order = ctx.cyclo_order() as i64;
    if order > 1 {
        let neg = -x;
        for k in 0..order {
            let z = CycloElt::zeta_pow(ctx, k);
            if z == *x {
                return monomial(1, k);
            }
            if z == neg {
                return monomial(-1, k);
            }
        }
    }
    let mut out = String::new();
    for (k, &c) in x.zeta_coeffs().iter().enumerate().rev() {
        let c = signed(ctx, c);
        if c == 0 {
            continue;
        }
        let term = monomial(c.abs(), k as i64);
        if out.is_empty() {
            if c < 0 {
                out.push('-');
            }
        } else {
            out.push_str(if c < 0 { " - " } else { " + " });
        }
        out.push_str(&term);
    }
    out
}

fn monomial(c: i128, k: i64) -> String {
    let sign = if c < 0 { "-" } else { "" };
    let a = c.abs();
    match (a, k) {
        (_, 0) => format!("{sign}{a}"),
        (1, 1) => format!("{sign}z"),
        (1, _) => format!("{sign}z^{k}"),
        (_, 1) => format!("{sign}{a}*z"),
        _ => format!("{sign}{a}*z^{k}"),
    }
}

/// The element as a signed integer when it lies in `Z_p` and fits in `i64`.
pub fn as_integer(x: &CycloElt) -> Option<i64> {
    let r = x.as_zp()?;
    i64::try_from(signed(x.ctx(), r)).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx9() -> Arc<PadicContext> {
        PadicContext::new(3, 3, 20, Some(9)).unwrap()
    }

    #[test]
    fn parses_mixed_terms() {
        assert_eq!(parse_terms("z^7 - 2*z + 3").unwrap(), vec![(7, 1), (1, -2), (0, 3)]);
        assert_eq!(parse_terms("-z").unwrap(), vec![(1, -1)]);
        assert_eq!(parse_terms(" 4 z^2 ").unwrap(), vec![(2, 4)]);
        assert!(parse_terms("z^").is_err());
        assert!(parse_terms("3 +").is_err());
        assert!(parse_terms("").is_err());
    }

    #[test]
    fn roots_of_unity_print_as_monomials() {
        let ctx = ctx9();
        assert_eq!(format(&CycloElt::zeta_pow(&ctx, 8)), "z^8");
        assert_eq!(format(&-CycloElt::zeta_pow(&ctx, 1)), "-z");
        assert_eq!(format(&CycloElt::one(&ctx)), "1");
        assert_eq!(format(&CycloElt::zero(&ctx)), "0");
    }

    #[test]
    fn round_trip() {
        let ctx = ctx9();
        for s in ["z^7 - 2*z + 3", "-5", "z^5 + z^2", "12*z^3 - 1"] {
            let x = parse(&ctx, s).unwrap();
            assert_eq!(parse(&ctx, &format(&x)).unwrap(), x, "{s}");
        }
        // Φ_9(z) = z^6 + z^3 + 1 vanishes.
        assert!(parse(&ctx, "z^6 + z^3 + 1").unwrap().is_zero());
    }

    #[test]
    fn integers_in_zp() {
        let ctx = PadicContext::new(3, 2, 10, None).unwrap();
        assert_eq!(as_integer(&parse(&ctx, "-7").unwrap()), Some(-7));
        assert_eq!(as_integer(&parse(&ctx, "z").unwrap()), None);
    }
}
