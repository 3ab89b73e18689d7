//! The Hurwitz order in the Hamilton quaternions and its splitting at `p`.
//!
//! Quaternions are stored with doubled coordinates: `[x0, x1, x2, x3]` stands for
//! `(x0 + x1 i + x2 j + x3 k) / 2`. An element lies in the order exactly when the four
//! doubled coordinates share a parity.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::matrix::Mat2;
use crate::padic::{hensel_sqrt, CycloElt, PadicContext, Valuation, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Quaternion {
    x: [i64; 4],
}

impl Quaternion {
    /// From doubled coordinates; rejects elements outside the order.
    pub fn from_doubled(x: [i64; 4]) -> Result<Self> {
        let parity = x[0].rem_euclid(2);
        if x.iter().any(|c| c.rem_euclid(2) != parity) {
            return Err(Error::Precondition(format!("{x:?} is not in the maximal order")));
        }
        Ok(Quaternion { x })
    }

    /// `a + b i + c j + d k` with integer coordinates.
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        Quaternion { x: [2 * a, 2 * b, 2 * c, 2 * d] }
    }

    pub fn one() -> Self {
        Self::new(1, 0, 0, 0)
    }

    pub fn i() -> Self {
        Self::new(0, 1, 0, 0)
    }

    pub fn j() -> Self {
        Self::new(0, 0, 1, 0)
    }

    pub fn k() -> Self {
        Self::new(0, 0, 0, 1)
    }

    pub fn doubled(&self) -> [i64; 4] {
        self.x
    }

    pub fn mul(&self, o: &Self) -> Self {
        let [a1, b1, c1, d1] = self.x;
        let [a2, b2, c2, d2] = o.x;
        let raw = [
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        ];
        // The order is closed, so each product of doubled coordinates is even.
        Quaternion { x: raw.map(|v| v / 2) }
    }

    pub fn conj(&self) -> Self {
        let [a, b, c, d] = self.x;
        Quaternion { x: [a, -b, -c, -d] }
    }

    pub fn neg(&self) -> Self {
        Quaternion { x: self.x.map(|v| -v) }
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        Self::from_doubled([0, 1, 2, 3].map(|i| self.x[i] + o.x[i]))
    }

    pub fn norm(&self) -> u64 {
        let s: i64 = self.x.iter().map(|v| v * v).sum();
        (s / 4) as u64
    }

    pub fn trace(&self) -> i64 {
        self.x[0]
    }

    pub fn is_unit(&self) -> bool {
        self.norm() == 1
    }

    /// Exact division by a rational integer, if the quotient stays in the order.
    pub fn div_int(&self, n: i64) -> Option<Self> {
        if n == 0 || self.x.iter().any(|v| v % n != 0) {
            return None;
        }
        Self::from_doubled(self.x.map(|v| v / n)).ok()
    }

    /// `self · o⁻¹`, when it lies in the order.
    pub fn right_div(&self, o: &Self) -> Option<Self> {
        self.mul(&o.conj()).div_int(o.norm() as i64)
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let half = self.x.iter().any(|v| v % 2 != 0);
        let coords = if half { self.x } else { self.x.map(|v| v / 2) };
        let mut out = alloc::string::String::new();
        for (c, unit) in coords.iter().zip(["", "i", "j", "k"]) {
            if *c == 0 {
                continue;
            }
            let sign = if *c < 0 { "-" } else if out.is_empty() { "" } else { "+" };
            let mag = c.unsigned_abs();
            let body = match (mag, unit) {
                (1, u) if !u.is_empty() => alloc::string::String::from(u),
                (m, u) => format!("{m}{u}"),
            };
            out.push_str(sign);
            out.push_str(&body);
        }
        if out.is_empty() {
            out.push('0');
        }
        if half {
            write!(f, "({out})/2")
        } else {
            f.write_str(&out)
        }
    }
}

/// All elements of norm `n`, sorted by doubled coordinates.
pub fn elements_of_norm(n: u64) -> Vec<Quaternion> {
    let target = 4 * n as i64;
    let r = isqrt(target);
    let mut out = Vec::new();
    for x0 in -r..=r {
        let r0 = target - x0 * x0;
        let b1 = isqrt(r0);
        for x1 in -b1..=b1 {
            let r1 = r0 - x1 * x1;
            let b2 = isqrt(r1);
            for x2 in -b2..=b2 {
                let r2 = r1 - x2 * x2;
                let x3 = isqrt(r2);
                if x3 * x3 != r2 {
                    continue;
                }
                for s in if x3 == 0 { &[1i64][..] } else { &[-1i64, 1][..] } {
                    if let Ok(q) = Quaternion::from_doubled([x0, x1, x2, s * x3]) {
                        out.push(q);
                    }
                }
            }
        }
    }
    out.sort();
    out
}

fn isqrt(n: i64) -> i64 {
    if n <= 0 {
        return 0;
    }
    num_integer::Roots::sqrt(&n)
}

/// The 24 units, sorted.
pub fn unit_group() -> Vec<Quaternion> {
    elements_of_norm(1)
}

/// An isomorphism of the quaternions at `p` with `M_2(Q_p)`, from a square root `ν`
/// of `-2`: `i ↦ (ν 1; 1 -ν)`, `j ↦ (0 -1; 1 0)`, `k = ij`.
#[derive(Clone, Debug)]
pub struct SplittingMap {
    ctx: Arc<PadicContext>,
    nu: CycloElt,
    images: [Mat2; 4],
}

impl SplittingMap {
    /// Uses the root of `-2` congruent to `hint` mod `p`.
    pub fn new(ctx: &Arc<PadicContext>, hint: i64) -> Result<Self> {
        let nu = hensel_sqrt(ctx, -2, hint)?;
        let one = CycloElt::one(ctx);
        let zero = CycloElt::zero(ctx);
        let i = Mat2::new(nu.clone(), one.clone(), one.clone(), -&nu);
        let j = Mat2::new(zero.clone(), -&one, one.clone(), zero);
        let k = i.mul(&j);
        Ok(SplittingMap { ctx: ctx.clone(), nu, images: [Mat2::identity(ctx), i, j, k] })
    }

    /// The splitting used for the Hurwitz order at 3: `ν ≡ 1 mod 3`.
    pub fn hurwitz_at_three(ctx: &Arc<PadicContext>) -> Result<Self> {
        if ctx.p() != 3 {
            return Err(Error::ContextMismatch);
        }
        Self::new(ctx, 1)
    }

    pub fn nu(&self) -> &CycloElt {
        &self.nu
    }

    pub fn ctx(&self) -> &Arc<PadicContext> {
        &self.ctx
    }

    pub fn images(&self) -> &[Mat2; 4] {
        &self.images
    }

    pub fn split(&self, q: &Quaternion) -> Result<Mat2> {
        let half = CycloElt::from_i64(&self.ctx, 2).inverse()?;
        let mut acc = Mat2::new(
            CycloElt::zero(&self.ctx),
            CycloElt::zero(&self.ctx),
            CycloElt::zero(&self.ctx),
            CycloElt::zero(&self.ctx),
        );
        for (x, img) in q.doubled().iter().zip(&self.images) {
            acc = acc.add(&img.scale(&CycloElt::from_i64(&self.ctx, *x)));
        }
        Ok(acc.scale(&half))
    }
}

/// Reduction of a `Z_p`-valued entry modulo `p^k`, as an integer in `[0, p^k)`.
pub fn residue_mod(x: &CycloElt, k: u32) -> Result<u64> {
    let r = x
        .as_zp()
        .ok_or_else(|| Error::Precondition("entry is not in Z_p".into()))?;
    Ok(r % x.ctx().p().pow(k))
}

/// `g` lies in `U = (Z_p^× Z_p; p^2 Z_p 1 + pZ_p)`.
fn in_level_group(g: &Mat2) -> Result<bool> {
    let p = g.ctx().p();
    Ok(residue_mod(&g.c, 2)? == 0 && residue_mod(&g.d, 1)? == 1 % p && g.a.is_unit())
}

/// Index of `U` in `GL_2(Z_p)`: `p(p+1)` for `Γ_0(p^2)`, times `p - 1` for `d ≡ 1 mod p`.
pub fn level_index(p: u64) -> usize {
    (p * (p + 1) * (p - 1)) as usize
}

/// Whether the images of `units` lie in pairwise distinct cosets `gU` and exhaust
/// `GL_2(Z_p) / U`.
pub fn covers_cosets(sm: &SplittingMap, units: &[Quaternion]) -> Result<bool> {
    for (n, a) in units.iter().enumerate() {
        if !a.is_unit() {
            return Ok(false);
        }
        for b in &units[n + 1..] {
            // a⁻¹ = conj(a) for units.
            if in_level_group(&sm.split(&a.conj().mul(b))?)? {
                return Ok(false);
            }
        }
    }
    Ok(units.len() == level_index(sm.ctx().p()))
}

/// Checks that the unit images form a complete set of coset representatives, so the
/// class set at this level has a single honest element.
pub fn verify_honest_cosets(sm: &SplittingMap) -> Result<bool> {
    covers_cosets(sm, &unit_group())
}

/// The three elements `δ` of norm 3 with `δ ∈ U·(3 0; 9j 1)` for `j = 1, 2, 3`,
/// found by search, in the order of `j`.
pub fn search_deltas(sm: &SplittingMap) -> Result<Vec<Quaternion>> {
    let ctx = sm.ctx();
    if ctx.p() != 3 || ctx.prec() < 4 {
        return Err(Error::ContextMismatch);
    }
    let candidates = elements_of_norm(3);
    let images = candidates
        .iter()
        .map(|q| sm.split(q))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::with_capacity(3);
    for j in 1..=3u64 {
        let mut hit = None;
        for (q, g) in candidates.iter().zip(&images) {
            // g · (3 0; 9j 1)^{-1} = (a/3 - 3jb, b; c/3 - 3jd, d)
            let a = residue_mod(&g.a, 3)?;
            let b = residue_mod(&g.b, 3)?;
            let c = residue_mod(&g.c, 3)?;
            let d = residue_mod(&g.d, 3)?;
            let top = (a + 27 * 27 - (9 * j * b) % 27) % 27;
            let low = (c + 27 * 27 - (9 * j * d) % 27) % 27;
            if top % 3 == 0 && top % 9 != 0 && low == 0 && d % 3 == 1 {
                if hit.is_some() {
                    return Err(Error::SearchFailed(format!("two candidates for j = {j}")));
                }
                hit = Some(*q);
            }
        }
        out.push(hit.ok_or_else(|| Error::SearchFailed(format!("no candidate for j = {j}")))?);
    }
    Ok(out)
}

/// The elements `δ₁ = -1 + i - j`, `δ₂ = (1 + i + 3j + k)/2`, `δ₃ = (1 - 3i - j - k)/2`.
pub fn expected_deltas() -> [Quaternion; 3] {
    [
        Quaternion::new(-1, 1, -1, 0),
        Quaternion { x: [1, 1, 3, 1] },
        Quaternion { x: [1, -3, -1, -1] },
    ]
}

/// Searches for the `U_3` elements and checks them against [`expected_deltas`];
/// returns them in that order together with their split images.
pub fn delta_decomposition(sm: &SplittingMap) -> Result<Vec<(Quaternion, Mat2)>> {
    let mut found = search_deltas(sm)?;
    let mut expected = expected_deltas().to_vec();
    found.sort();
    expected.sort();
    if found != expected {
        return Err(Error::SearchFailed(format!("search gave {found:?}")));
    }
    expected_deltas()
        .iter()
        .map(|q| Ok((*q, sm.split(q)?)))
        .collect()
}

/// `δ · (1 - i + j)^{-1}` for each `δ`.
pub fn reduced_deltas(deltas: &[Quaternion]) -> Result<Vec<Quaternion>> {
    let w = Quaternion::new(1, -1, 1, 0);
    deltas
        .iter()
        .map(|d| {
            d.right_div(&w)
                .ok_or_else(|| Error::Precondition(format!("{d} is not a right multiple of {w}")))
        })
        .collect()
}

/// Valuation of `det(split(q))`, which must equal `v_p(norm q)`.
pub fn split_det_valuation(sm: &SplittingMap, q: &Quaternion) -> Result<Valuation> {
    Ok(sm.split(q)?.det().valuation())
}

/// `Σ_{d | n, d odd} d`.
pub fn sigma_odd(n: u64) -> u64 {
    (1..=n).filter(|d| n % d == 0 && d % 2 == 1).sum()
}

/// `v_p(n)` as a rational, for comparisons with [`Valuation`].
pub fn vp_rational(p: u64, mut n: u64) -> Q {
    let mut v = 0;
    while n > 0 && n % p == 0 {
        n /= p;
        v += 1;
    }
    Q::from_integer(v)
}
