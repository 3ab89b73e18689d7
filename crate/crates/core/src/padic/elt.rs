use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use smallvec::{smallvec, SmallVec};

use super::context::PadicContext;
use super::valuation::{Valuation, Q};
use crate::error::{Error, Result};

pub(crate) type Coeffs = SmallVec<[u64; 18]>;

const HALF: u128 = 1 << 127;

/// An element of `O_E` modulo `p^prec`, in the basis `1, π, …, π^{e-1}`.
#[derive(Clone)]
pub struct CycloElt {
    ctx: Arc<PadicContext>,
    c: Coeffs,
}

impl PartialEq for CycloElt {
    fn eq(&self, other: &Self) -> bool {
        PadicContext::same(&self.ctx, &other.ctx) && self.c == other.c
    }
}

impl Eq for CycloElt {}

impl fmt::Debug for CycloElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycloElt{:?}", self.c.as_slice())
    }
}

impl CycloElt {
    pub fn zero(ctx: &Arc<PadicContext>) -> Self {
        CycloElt { ctx: ctx.clone(), c: smallvec![0; ctx.e()] }
    }

    pub fn one(ctx: &Arc<PadicContext>) -> Self {
        Self::from_i64(ctx, 1)
    }

    pub fn from_i64(ctx: &Arc<PadicContext>, n: i64) -> Self {
        Self::from_residue(ctx, ctx.reduce_i128(n as i128))
    }

    /// The rational integer (or `p`-adic integer) with the given residue mod `p^prec`.
    pub fn from_residue(ctx: &Arc<PadicContext>, r: u64) -> Self {
        let mut x = Self::zero(ctx);
        x.c[0] = r % ctx.modulus();
        x
    }

    /// Builds from π-basis coordinates (shorter input is zero-padded).
    pub fn from_pi_coeffs(ctx: &Arc<PadicContext>, coeffs: &[i64]) -> Result<Self> {
        if coeffs.len() > ctx.e() {
            return Err(Error::Dimension("more π-coordinates than e".into()));
        }
        let mut x = Self::zero(ctx);
        for (slot, &v) in x.c.iter_mut().zip(coeffs) {
            *slot = ctx.reduce_i128(v as i128);
        }
        Ok(x)
    }

    pub(crate) fn from_raw(ctx: &Arc<PadicContext>, c: Coeffs) -> Self {
        debug_assert_eq!(c.len(), ctx.e());
        CycloElt { ctx: ctx.clone(), c }
    }

    /// The uniformizer: `π = ζ - 1`, or `p` when the ring is `Z_p`.
    pub fn uniformizer(ctx: &Arc<PadicContext>) -> Self {
        let mut x = Self::zero(ctx);
        if ctx.cyclo_exp() == 0 {
            x.c[0] = ctx.p() % ctx.modulus();
        } else {
            x.c[1] = 1;
        }
        x
    }

    /// `ζ^k` for the context's distinguished root of unity.
    pub fn zeta_pow(ctx: &Arc<PadicContext>, k: i64) -> Self {
        let order = ctx.cyclo_order() as i64;
        let k = k.rem_euclid(order) as u64;
        if ctx.cyclo_exp() == 0 {
            return Self::one(ctx);
        }
        let zeta = Self::one(ctx) + Self::uniformizer(ctx);
        zeta.pow(k)
    }

    pub fn ctx(&self) -> &Arc<PadicContext> {
        &self.ctx
    }

    /// π-basis coordinates as residues in `[0, p^prec)`.
    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }

    pub fn is_one(&self) -> bool {
        self.c[0] == 1 % self.ctx.modulus() && self.c[1..].iter().all(|&x| x == 0)
    }

    /// Valuation measured in powers of the uniformizer; `None` for zero.
    pub fn pi_valuation(&self) -> Option<u64> {
        let e = self.ctx.e() as u64;
        self.c
            .iter()
            .enumerate()
            .filter_map(|(i, &x)| self.ctx.vp(x).map(|v| i as u64 + e * v as u64))
            .min()
    }

    /// Normalised valuation, `v(p) = 1`.
    pub fn valuation(&self) -> Valuation {
        let e = self.ctx.e() as i64;
        match self.pi_valuation() {
            Some(s) => Valuation::Exact(Q::new(s as i64, e)),
            None => Valuation::AtLeast(Q::from_integer(self.ctx.prec() as i64)),
        }
    }

    pub fn is_unit(&self) -> bool {
        self.c[0] % self.ctx.p() != 0
    }

    /// The residue in `O_E / π = F_p`.
    pub fn residue(&self) -> u64 {
        self.c[0] % self.ctx.p()
    }

    /// The residue mod `p^prec` if the element lies in `Z_p`.
    pub fn as_zp(&self) -> Option<u64> {
        self.c[1..].iter().all(|&x| x == 0).then_some(self.c[0])
    }

    fn check(&self, other: &Self) {
        assert!(
            PadicContext::same(&self.ctx, &other.ctx),
            "arithmetic between elements of different contexts"
        );
    }

    /// Multiplication by the integer `k`.
    pub fn scale(&self, k: i64) -> Self {
        let r = self.ctx.reduce_i128(k as i128);
        self.scale_residue(r)
    }

    pub(crate) fn scale_residue(&self, r: u64) -> Self {
        let c = self.c.iter().map(|&x| self.ctx.mulmod(x, r)).collect();
        CycloElt { ctx: self.ctx.clone(), c }
    }

    fn mul_coeffs(&self, other: &Self) -> Coeffs {
        let ctx = &*self.ctx;
        let e = ctx.e();
        let md = ctx.modulus() as u128;
        if let Some(r) = other.as_zp() {
            return self.c.iter().map(|&x| ctx.mulmod(x, r)).collect();
        }
        if let Some(r) = self.as_zp() {
            return other.c.iter().map(|&x| ctx.mulmod(x, r)).collect();
        }
        let mut prod: SmallVec<[u128; 40]> = smallvec![0; 2 * e - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.c.iter().enumerate() {
                if b == 0 {
                    continue;
                }
                let t = prod[i + j] + a as u128 * b as u128;
                prod[i + j] = if t >= HALF { t % md } else { t };
            }
        }
        let mut acc: SmallVec<[u128; 18]> = prod[..e].iter().map(|&x| x % md).collect();
        for (j, row) in ctx.fold().iter().enumerate() {
            let h = prod[e + j] % md;
            if h == 0 {
                continue;
            }
            for (slot, &f) in acc.iter_mut().zip(row.iter()) {
                let t = *slot + h * f as u128;
                *slot = if t >= HALF { t % md } else { t };
            }
        }
        acc.iter().map(|&x| (x % md) as u64).collect()
    }

    pub fn pow(&self, mut k: u64) -> Self {
        let mut base = self.clone();
        let mut r = Self::one(&self.ctx);
        while k > 0 {
            if k & 1 == 1 {
                r = &r * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        r
    }

    /// Inverse of a unit by the lifting `x ↦ x(2 - ax)`.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::NotUnit);
        }
        let ctx = &self.ctx;
        let mut x = Self::from_residue(ctx, ctx.inv_residue(self.c[0])?);
        let two = Self::from_i64(ctx, 2);
        for _ in 0..70 {
            let ax = self * &x;
            if ax.is_one() {
                return Ok(x);
            }
            x = &x * &(&two - &ax);
        }
        Err(Error::NoConvergence("unit inverse".into()))
    }

    /// Multiplication by `π^s` (by `p^s` when the ring is `Z_p`).
    pub fn mul_pi_pow(&self, s: u64) -> Self {
        if s == 0 {
            return self.clone();
        }
        if s >= self.ctx.pi_prec() {
            return Self::zero(&self.ctx);
        }
        let pi = Self::uniformizer(&self.ctx);
        self * &pi.pow(s)
    }

    /// Exact division by `π^s`. The top `s` π-adic digits of the result are unknown
    /// (the quotient is only determined modulo `π^{e·prec - s}`); they are filled with
    /// a fixed representative.
    pub fn div_pi_pow(&self, s: u64) -> Result<Self> {
        match self.pi_valuation() {
            Some(v) if v < s => return Err(Error::NotDivisible),
            None => return Ok(Self::zero(&self.ctx)),
            _ => {}
        }
        let ctx = &self.ctx;
        let p = ctx.p();
        let mut x = self.clone();
        if ctx.cyclo_exp() == 0 {
            x.c[0] /= p.pow(s as u32);
            return Ok(x);
        }
        let e = ctx.e();
        let p_over_pi = CycloElt::from_raw(ctx, ctx.p_over_pi().iter().copied().collect());
        for _ in 0..s {
            let c0 = x.c[0];
            debug_assert_eq!(c0 % p, 0);
            let mut shifted: Coeffs = smallvec![0; e];
            shifted[..e - 1].copy_from_slice(&x.c[1..]);
            let head = p_over_pi.scale_residue(c0 / p);
            x = CycloElt::from_raw(ctx, shifted) + head;
        }
        Ok(x)
    }

    /// Splits a nonzero element as `π^s · u` with `u` a unit (known modulo `π^{E-s}`).
    pub fn split_unit(&self) -> Option<(u64, Self)> {
        let s = self.pi_valuation()?;
        Some((s, self.div_pi_pow(s).expect("divisible by construction")))
    }

    /// The Galois automorphism `ζ ↦ ζ^a`, `p ∤ a`.
    pub fn galois(&self, a: i64) -> Result<Self> {
        let ctx = &self.ctx;
        if a.rem_euclid(ctx.p() as i64) == 0 {
            return Err(Error::Precondition("Galois exponent must be prime to p".into()));
        }
        if ctx.cyclo_exp() == 0 {
            return Ok(self.clone());
        }
        let image = &Self::zeta_pow(ctx, a) - &Self::one(ctx);
        let mut r = Self::zero(ctx);
        for &c in self.c.iter().rev() {
            r = &r * &image;
            r.c[0] = ctx.addmod(r.c[0], c);
        }
        Ok(r)
    }

    /// Complex conjugation `ζ ↦ ζ^{-1}`.
    pub fn conj(&self) -> Self {
        self.galois(-1).expect("-1 is prime to p")
    }

    /// Signed representatives of the coordinates, in `(-p^prec/2, p^prec/2]`.
    pub fn signed_coeffs(&self) -> Vec<i128> {
        let md = self.ctx.modulus() as i128;
        self.c
            .iter()
            .map(|&x| {
                let x = x as i128;
                if x > md / 2 {
                    x - md
                } else {
                    x
                }
            })
            .collect()
    }

    /// Coordinates in the basis `1, ζ, …, ζ^{e-1}`, as residues.
    pub fn zeta_coeffs(&self) -> Vec<u64> {
        // π^i = (ζ - 1)^i expanded with signed binomials.
        let ctx = &*self.ctx;
        let e = ctx.e();
        let mut out = alloc::vec![0u64; e];
        let mut row: Vec<u64> = alloc::vec![0; e];
        row[0] = 1;
        for i in 0..e {
            if i > 0 {
                // row ← row · (ζ - 1)
                for k in (0..=i).rev() {
                    let up = if k > 0 { row[k - 1] } else { 0 };
                    let here = if k < i { row[k] } else { 0 };
                    row[k] = ctx.addmod(up, ctx.negmod(here));
                }
            }
            let ci = self.c[i];
            if ci == 0 {
                continue;
            }
            for k in 0..=i {
                out[k] = ctx.addmod(out[k], ctx.mulmod(ci, row[k]));
            }
        }
        out
    }

    /// Builds from coordinates in the basis `ζ^0, ζ^1, …` (any length).
    pub fn from_zeta_coeffs(ctx: &Arc<PadicContext>, coeffs: &[(i64, i128)]) -> Self {
        let mut x = Self::zero(ctx);
        for &(k, a) in coeffs {
            let term = Self::zeta_pow(ctx, k).scale_residue(ctx.reduce_i128(a));
            x += &term;
        }
        x
    }
}

macro_rules! binop {
    ($tr:ident, $f:ident, $body:expr) => {
        impl $tr<&CycloElt> for &CycloElt {
            type Output = CycloElt;
            fn $f(self, rhs: &CycloElt) -> CycloElt {
                self.check(rhs);
                #[allow(clippy::redundant_closure_call)]
                $body(self, rhs)
            }
        }
        impl $tr<CycloElt> for CycloElt {
            type Output = CycloElt;
            fn $f(self, rhs: CycloElt) -> CycloElt {
                $tr::$f(&self, &rhs)
            }
        }
        impl $tr<&CycloElt> for CycloElt {
            type Output = CycloElt;
            fn $f(self, rhs: &CycloElt) -> CycloElt {
                $tr::$f(&self, rhs)
            }
        }
        impl $tr<CycloElt> for &CycloElt {
            type Output = CycloElt;
            fn $f(self, rhs: CycloElt) -> CycloElt {
                $tr::$f(self, &rhs)
            }
        }
    };
}

binop!(Add, add, |a: &CycloElt, b: &CycloElt| {
    let c = a.c.iter().zip(b.c.iter()).map(|(&x, &y)| a.ctx.addmod(x, y)).collect();
    CycloElt { ctx: a.ctx.clone(), c }
});

binop!(Sub, sub, |a: &CycloElt, b: &CycloElt| {
    let c = a
        .c
        .iter()
        .zip(b.c.iter())
        .map(|(&x, &y)| a.ctx.addmod(x, a.ctx.negmod(y)))
        .collect();
    CycloElt { ctx: a.ctx.clone(), c }
});

binop!(Mul, mul, |a: &CycloElt, b: &CycloElt| {
    CycloElt { ctx: a.ctx.clone(), c: a.mul_coeffs(b) }
});

impl Neg for &CycloElt {
    type Output = CycloElt;
    fn neg(self) -> CycloElt {
        let c = self.c.iter().map(|&x| self.ctx.negmod(x)).collect();
        CycloElt { ctx: self.ctx.clone(), c }
    }
}

impl Neg for CycloElt {
    type Output = CycloElt;
    fn neg(self) -> CycloElt {
        -&self
    }
}

impl AddAssign<&CycloElt> for CycloElt {
    fn add_assign(&mut self, rhs: &CycloElt) {
        self.check(rhs);
        for (x, &y) in self.c.iter_mut().zip(rhs.c.iter()) {
            *x = self.ctx.addmod(*x, y);
        }
    }
}

impl SubAssign<&CycloElt> for CycloElt {
    fn sub_assign(&mut self, rhs: &CycloElt) {
        self.check(rhs);
        for (x, &y) in self.c.iter_mut().zip(rhs.c.iter()) {
            *x = self.ctx.addmod(*x, self.ctx.negmod(y));
        }
    }
}

impl MulAssign<&CycloElt> for CycloElt {
    fn mul_assign(&mut self, rhs: &CycloElt) {
        self.check(rhs);
        self.c = self.mul_coeffs(rhs);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(m: u32, order: Option<u64>) -> Arc<PadicContext> {
        PadicContext::new(3, m, 40, order).unwrap()
    }

    #[test]
    fn valuations_of_basic_elements() {
        let c = ctx(3, None);
        assert_eq!(CycloElt::from_i64(&c, 3).valuation(), Valuation::Exact(Q::from_integer(1)));
        assert_eq!(CycloElt::one(&c).valuation(), Valuation::Exact(Q::from_integer(0)));
        let pi = CycloElt::zeta_pow(&c, 1) - CycloElt::one(&c);
        assert_eq!(pi.valuation(), Valuation::Exact(Q::new(1, 6)));
        assert_eq!(CycloElt::zero(&c).valuation(), Valuation::AtLeast(Q::from_integer(40)));
        let c2 = ctx(2, None);
        let xi_minus_one = CycloElt::zeta_pow(&c2, 1) - CycloElt::one(&c2);
        assert_eq!(xi_minus_one.valuation(), Valuation::Exact(Q::new(1, 2)));
    }

    #[test]
    fn zeta_has_the_right_order() {
        for (m, order) in [(2, None), (3, None), (3, Some(27))] {
            let c = ctx(m, order);
            let n = c.cyclo_order() as i64;
            assert!(CycloElt::zeta_pow(&c, n).is_one());
            assert!(!CycloElt::zeta_pow(&c, n / 3).is_one());
            // 1 + ζ^{n/p} + ζ^{2n/p} = 0
            let s = CycloElt::one(&c) + CycloElt::zeta_pow(&c, n / 3) + CycloElt::zeta_pow(&c, 2 * n / 3);
            assert!(s.is_zero());
        }
    }

    #[test]
    fn norm_of_zeta9_minus_one_is_three() {
        // Oracle: the product of the Galois conjugates of ζ₉ - 1 is Φ₉(1) = 3.
        let c = ctx(3, None);
        let pi = CycloElt::zeta_pow(&c, 1) - CycloElt::one(&c);
        let mut norm = CycloElt::one(&c);
        for a in [1, 2, 4, 5, 7, 8] {
            norm = norm * pi.galois(a).unwrap();
        }
        assert_eq!(norm, CycloElt::from_i64(&c, 3));
    }

    #[test]
    fn inverse_and_division() {
        let c = ctx(3, Some(27));
        let x = CycloElt::zeta_pow(&c, 5) + CycloElt::from_i64(&c, 7);
        let y = x.inverse().unwrap();
        assert!((&x * &y).is_one());
        assert_eq!(CycloElt::from_i64(&c, 3).inverse(), Err(Error::NotUnit));
        let pi = CycloElt::uniformizer(&c);
        let z = &x * &pi.pow(5);
        let back = z.div_pi_pow(5).unwrap();
        // agreement modulo π^{E-5}
        let diff = &back - &x;
        assert!(diff.pi_valuation().map_or(true, |v| v >= c.pi_prec() - 5));
        assert!(x.div_pi_pow(1).is_err());
    }

    #[test]
    fn zeta_basis_round_trip() {
        let c = ctx(3, None);
        let x = CycloElt::from_zeta_coeffs(&c, &[(7, 1), (1, -2), (0, 3)]);
        let z = x.zeta_coeffs();
        let y = CycloElt::from_zeta_coeffs(
            &c,
            &z.iter().enumerate().map(|(k, &a)| (k as i64, a as i128)).collect::<Vec<_>>(),
        );
        assert_eq!(x, y);
    }

    #[test]
    fn conjugation_inverts_zeta() {
        let c = ctx(3, Some(27));
        let z = CycloElt::zeta_pow(&c, 1);
        assert_eq!(z.conj(), CycloElt::zeta_pow(&c, -1));
        assert!((&z * &z.conj()).is_one());
    }
}
