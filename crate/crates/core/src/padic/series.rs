//! Binomial, exponential and logarithm series, evaluated without losing precision.
//!
//! A term `num_i · x^i / den_i` is never formed by dividing a truncated value by `p`.
//! Instead `x = π^s · x'` is split once and the denominator's `p`-part is cancelled
//! against `π^{s·i}` using `1/p = π^{-e} · (π^e / p)`, where `π^e / p` is a unit
//! stored in the context.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use super::context::PadicContext;
use super::elt::CycloElt;
use crate::error::{Error, Result};

/// A convergent sum together with the number of terms actually added.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesSum {
    pub value: CycloElt,
    pub terms: usize,
}

fn inv_eta(ctx: &Arc<PadicContext>) -> CycloElt {
    CycloElt::from_raw(ctx, ctx.inv_eta_coeffs().iter().copied().collect())
}

/// Denominator `p^v · u` of one term; `u` is a residue prime to `p`.
#[derive(Clone, Copy)]
struct Den {
    v: u64,
    unit: u64,
}

fn split_int(p: u64, mut n: u64) -> (u64, u64) {
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    (v, n)
}

/// Terms `num(i) · x^i / den(i)` for `i < terms`.
fn divided_terms(
    x: &CycloElt,
    terms: usize,
    mut num: impl FnMut(usize) -> CycloElt,
    den: impl Fn(usize) -> Den,
) -> Result<Vec<CycloElt>> {
    let ctx = x.ctx();
    let e = ctx.e() as u64;
    let mut out = Vec::with_capacity(terms);
    let Some((s, xu)) = x.split_unit() else {
        for i in 0..terms {
            out.push(if i == 0 { num(0) } else { CycloElt::zero(ctx) });
        }
        return Ok(out);
    };
    if s < e {
        return Err(Error::Convergence(format!(
            "argument has valuation {s}/{e} < 1"
        )));
    }
    let eta_inv = inv_eta(ctx);
    let mut xu_pow = CycloElt::one(ctx);
    for i in 0..terms {
        let d = den(i);
        // Each unknown digit of x' is pushed past π^E as long as s(i-1) >= e·v.
        if i >= 1 && s * (i as u64 - 1) < e * d.v {
            return Err(Error::Convergence(format!("term {i} would lose precision")));
        }
        let shift = s * i as u64 - e * d.v;
        let mut term = &num(i) * &xu_pow;
        if term.is_zero() {
            out.push(term);
        } else {
            term = term.mul_pi_pow(shift);
            term = &term * &eta_inv.pow(d.v);
            term = term.scale_residue(ctx.inv_residue(d.unit)?);
            out.push(term);
        }
        xu_pow = &xu_pow * &xu;
    }
    Ok(out)
}

/// Number of terms after which every further term of a factorial-type series with
/// argument of π-valuation `s` vanishes modulo `p^prec`.
fn terms_needed(ctx: &PadicContext, s: u64) -> Result<usize> {
    if s < ctx.e() as u64 {
        return Err(Error::Convergence(format!(
            "argument has valuation {s}/{} < 1",
            ctx.e()
        )));
    }
    let e = ctx.e() as i64;
    let p = ctx.p() as i64;
    let prec = ctx.prec() as i64;
    // v(term_i) >= s·i/e - (i-1)/(p-1); this lower bound increases with i.
    let mut i: i64 = 1;
    while (s as i64 * i) * (p - 1) - (i - 1) * e < prec * e * (p - 1) {
        i += 1;
    }
    Ok(i as usize)
}

/// `binom(w, i) · x^i` for `i < terms`, exact modulo `p^prec`; needs `v(x) >= 1`.
pub fn binomial_coeffs(w: &CycloElt, x: &CycloElt, terms: usize) -> Result<Vec<CycloElt>> {
    let ctx = x.ctx().clone();
    let p = ctx.p();
    let mut prod = CycloElt::one(&ctx);
    let mut last = 0usize;
    let mut fact = Den { v: 0, unit: 1 };
    let mut facts = Vec::with_capacity(terms);
    for i in 0..terms {
        if i > 0 {
            let (v, u) = split_int(p, i as u64);
            fact = Den { v: fact.v + v, unit: ctx.mulmod(fact.unit, u % ctx.modulus()) };
        }
        facts.push(fact);
    }
    divided_terms(
        x,
        terms,
        |i| {
            while last < i {
                prod = &prod * &(w - &CycloElt::from_i64(&ctx, last as i64));
                last += 1;
            }
            prod.clone()
        },
        |i| facts[i],
    )
}

/// `(1 + y)^w` for `v(y) >= 1`, summed until the tail vanishes.
pub fn binomial_power(w: &CycloElt, y: &CycloElt) -> Result<SeriesSum> {
    let ctx = y.ctx();
    let Some(s) = y.pi_valuation() else {
        return Ok(SeriesSum { value: CycloElt::one(ctx), terms: 1 });
    };
    let n = terms_needed(ctx, s)?;
    let coeffs = binomial_coeffs(w, y, n)?;
    let mut value = CycloElt::zero(ctx);
    for c in &coeffs {
        value += c;
    }
    Ok(SeriesSum { value, terms: n })
}

/// `exp(x)` for `v(x) >= 1`.
pub fn exp(x: &CycloElt) -> Result<SeriesSum> {
    let ctx = x.ctx().clone();
    let Some(s) = x.pi_valuation() else {
        return Ok(SeriesSum { value: CycloElt::one(&ctx), terms: 1 });
    };
    let n = terms_needed(&ctx, s)?;
    let p = ctx.p();
    let mut facts = Vec::with_capacity(n);
    let mut fact = Den { v: 0, unit: 1 };
    for i in 0..n {
        if i > 0 {
            let (v, u) = split_int(p, i as u64);
            fact = Den { v: fact.v + v, unit: ctx.mulmod(fact.unit, u % ctx.modulus()) };
        }
        facts.push(fact);
    }
    let one = CycloElt::one(&ctx);
    let terms = divided_terms(x, n, |_| one.clone(), |i| facts[i])?;
    let mut value = CycloElt::zero(&ctx);
    for t in &terms {
        value += t;
    }
    Ok(SeriesSum { value, terms: n })
}

/// `log(1 + x)` for `v(x) >= 1`.
pub fn log1p(x: &CycloElt) -> Result<SeriesSum> {
    let ctx = x.ctx().clone();
    let Some(s) = x.pi_valuation() else {
        return Ok(SeriesSum { value: CycloElt::zero(&ctx), terms: 1 });
    };
    let n = terms_needed(&ctx, s)?;
    let p = ctx.p();
    let one = CycloElt::one(&ctx);
    let zero = CycloElt::zero(&ctx);
    let minus_one = -&one;
    let terms = divided_terms(
        x,
        n,
        |i| match i {
            0 => zero.clone(),
            i if i % 2 == 1 => one.clone(),
            _ => minus_one.clone(),
        },
        |i| {
            if i == 0 {
                Den { v: 0, unit: 1 }
            } else {
                let (v, u) = split_int(p, i as u64);
                Den { v, unit: u % ctx.modulus() }
            }
        },
    )?;
    let mut value = CycloElt::zero(&ctx);
    for t in &terms {
        value += t;
    }
    Ok(SeriesSum { value, terms: n })
}

/// Teichmüller lift of `a` (prime to `p`): the `(p-1)`-st root of unity `≡ a mod p`.
pub fn teichmuller(ctx: &Arc<PadicContext>, a: i64) -> Result<CycloElt> {
    Ok(CycloElt::from_residue(ctx, teichmuller_residue(ctx, ctx.reduce_i128(a as i128))?))
}

pub(crate) fn teichmuller_residue(ctx: &PadicContext, a: u64) -> Result<u64> {
    if a % ctx.p() == 0 {
        return Err(Error::Precondition("Teichmüller lift of a non-unit".into()));
    }
    let mut x = a % ctx.modulus();
    // x ↦ x^p gains one p-adic digit per step.
    for _ in 0..ctx.prec() {
        x = ctx.powmod(x, ctx.p());
    }
    Ok(x)
}

/// The square root of `n` in `Z_p` congruent to `hint` modulo `p`.
pub fn hensel_sqrt(ctx: &Arc<PadicContext>, n: i64, hint: i64) -> Result<CycloElt> {
    let p = ctx.p() as i64;
    if n.rem_euclid(p) == 0 {
        return Err(Error::Precondition("square root of a non-unit".into()));
    }
    if (hint * hint - n).rem_euclid(p) != 0 {
        return Err(Error::Precondition(format!(
            "{n} is not a square mod {p} with root {hint}"
        )));
    }
    let target = ctx.reduce_i128(n as i128);
    let mut x = ctx.reduce_i128(hint as i128);
    for _ in 0..80 {
        let sq = ctx.mulmod(x, x);
        if sq == target {
            return Ok(CycloElt::from_residue(ctx, x));
        }
        let f = ctx.addmod(sq, ctx.negmod(target));
        let inv = ctx.inv_residue(ctx.mulmod(2, x))?;
        x = ctx.addmod(x, ctx.negmod(ctx.mulmod(f, inv)));
    }
    Err(Error::NoConvergence("Hensel lifting".into()))
}
