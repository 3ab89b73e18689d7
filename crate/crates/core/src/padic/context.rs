use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Default absolute precision: elements are known modulo `p^40`.
pub const DEFAULT_PREC: u32 = 40;

/// Parameters of `O_E = Z_p[ζ]`, `ζ` a primitive `p^k`-th root of unity, at fixed precision.
///
/// Elements are stored in the basis `1, π, …, π^{e-1}` with `π = ζ - 1`; when `k = 0`
/// the ring is `Z_p`, `e = 1` and the uniformizer is `p` itself.
#[derive(Debug)]
pub struct PadicContext {
    p: u64,
    m: u32,
    prec: u32,
    cyclo_exp: u32,
    e: usize,
    modulus: u64,
    /// `p / π` in the π-basis.
    p_over_pi: Vec<u64>,
    /// `π^{e+j}` reduced, for `j = 0..e-1`.
    fold: Vec<Vec<u64>>,
    /// `π^e / p`, a unit.
    inv_eta: Vec<u64>,
}

impl PartialEq for PadicContext {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p
            && self.m == other.m
            && self.prec == other.prec
            && self.cyclo_exp == other.cyclo_exp
    }
}

impl Eq for PadicContext {}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl PadicContext {
    /// Builds a context. `cyclo_order` defaults to `p^{m-1}` and must be a power of `p`.
    pub fn new(p: u64, m: u32, prec: u32, cyclo_order: Option<u64>) -> Result<Arc<Self>> {
        if p == 2 {
            return Err(Error::InvalidContext("p = 2 is not supported".into()));
        }
        if !is_prime(p) {
            return Err(Error::InvalidContext(format!("{p} is not prime")));
        }
        if m == 0 {
            return Err(Error::InvalidContext("level exponent m must be at least 1".into()));
        }
        if prec == 0 {
            return Err(Error::InvalidContext("precision must be at least 1".into()));
        }
        let modulus = p
            .checked_pow(prec)
            .filter(|&md| (md as u128) * (md as u128) < 1u128 << 127)
            .ok_or_else(|| {
                Error::InvalidContext(format!(
                    "p^prec = {p}^{prec} exceeds the supported range (max prec {})",
                    Self::max_prec(p)
                ))
            })?;
        let order = cyclo_order.unwrap_or_else(|| p.pow(m - 1));
        let mut cyclo_exp = 0u32;
        let mut o = order;
        while o > 1 && o % p == 0 {
            o /= p;
            cyclo_exp += 1;
        }
        if o != 1 || order == 0 {
            return Err(Error::InvalidContext(format!(
                "cyclotomic order {order} is not a power of {p}"
            )));
        }
        let e = if cyclo_exp == 0 {
            1
        } else {
            (p.pow(cyclo_exp - 1) * (p - 1)) as usize
        };
        let mut ctx = PadicContext {
            p,
            m,
            prec,
            cyclo_exp,
            e,
            modulus,
            p_over_pi: Vec::new(),
            fold: Vec::new(),
            inv_eta: vec![1],
        };
        if cyclo_exp > 0 {
            ctx.build_tables();
        }
        Ok(Arc::new(ctx))
    }

    /// Largest precision accepted for the prime `p`.
    pub fn max_prec(p: u64) -> u32 {
        let mut k = 0u32;
        let mut md: u128 = 1;
        loop {
            let next = md * p as u128;
            match next.checked_mul(next) {
                Some(sq) if sq < 1u128 << 127 => {}
                _ => return k,
            }
            md = next;
            k += 1;
        }
    }

    /// Eisenstein polynomial `Φ_{p^k}(1+X)` reduced modulo `p^{prec+1}`, so that its
    /// non-leading coefficients can be divided by `p` exactly.
    fn build_tables(&mut self) {
        let e = self.e;
        let big = self.modulus as u128 * self.p as u128;
        let step = self.p.pow(self.cyclo_exp - 1) as usize;
        // Φ_{p^k}(1+X) = Σ_{j<p} (1+X)^{j p^{k-1}}
        let mut f = vec![0u128; e + 1];
        let mut row = vec![0u128; e + 1];
        row[0] = 1;
        let mut n = 0usize;
        for j in 0..self.p as usize {
            let target = j * step;
            while n < target {
                for i in (1..=n + 1).rev() {
                    row[i] = (row[i] + row[i - 1]) % big;
                }
                n += 1;
            }
            for i in 0..=n {
                f[i] = (f[i] + row[i]) % big;
            }
        }
        debug_assert_eq!(f[e], 1);
        debug_assert_eq!(f[0], self.p as u128);
        let md = self.modulus as u128;
        let neg = |x: u128| ((md - x % md) % md) as u64;
        self.p_over_pi = (0..e).map(|i| neg(f[i + 1])).collect();
        let mut fold = Vec::with_capacity(e);
        let first: Vec<u64> = (0..e).map(|i| neg(f[i])).collect();
        fold.push(first.clone());
        for _ in 1..e.saturating_sub(1) {
            let prev: &Vec<u64> = fold.last().unwrap();
            let top = prev[e - 1] as u128;
            let mut next = vec![0u64; e];
            for i in 0..e {
                let shifted = if i == 0 { 0 } else { prev[i - 1] as u128 };
                next[i] = ((shifted + top * first[i] as u128) % md) as u64;
            }
            fold.push(next);
        }
        self.fold = fold;
        let mut inv_eta = vec![0u64; e];
        inv_eta[0] = neg(1);
        for i in 1..e {
            debug_assert_eq!(f[i] % self.p as u128, 0);
            inv_eta[i] = neg(f[i] / self.p as u128);
        }
        self.inv_eta = inv_eta;
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// Ramification degree of `E / Q_p`.
    pub fn e(&self) -> usize {
        self.e
    }

    /// `p^prec`.
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Order of the distinguished root of unity `ζ`.
    pub fn cyclo_order(&self) -> u64 {
        self.p.pow(self.cyclo_exp)
    }

    pub fn cyclo_exp(&self) -> u32 {
        self.cyclo_exp
    }

    /// Absolute precision measured in powers of the uniformizer.
    pub fn pi_prec(&self) -> u64 {
        self.prec as u64 * self.e as u64
    }

    pub(crate) fn p_over_pi(&self) -> &[u64] {
        &self.p_over_pi
    }

    pub(crate) fn fold(&self) -> &[Vec<u64>] {
        &self.fold
    }

    pub(crate) fn inv_eta_coeffs(&self) -> &[u64] {
        &self.inv_eta
    }

    #[inline]
    pub(crate) fn mulmod(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.modulus as u128) as u64
    }

    #[inline]
    pub(crate) fn addmod(&self, a: u64, b: u64) -> u64 {
        let s = a as u128 + b as u128;
        let md = self.modulus as u128;
        (if s >= md { s - md } else { s }) as u64
    }

    #[inline]
    pub(crate) fn negmod(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.modulus - a
        }
    }

    /// Reduces a signed integer into `[0, p^prec)`.
    pub fn reduce_i128(&self, a: i128) -> u64 {
        a.rem_euclid(self.modulus as i128) as u64
    }

    /// `p`-adic valuation of a residue, `None` for zero.
    pub fn vp(&self, mut a: u64) -> Option<u32> {
        if a == 0 {
            return None;
        }
        let mut v = 0;
        while a % self.p == 0 {
            a /= self.p;
            v += 1;
        }
        Some(v)
    }

    /// Inverse of a residue prime to `p`, modulo `p^prec`.
    pub fn inv_residue(&self, a: u64) -> Result<u64> {
        if a % self.p == 0 {
            return Err(Error::NotUnit);
        }
        let (mut r0, mut r1) = (self.modulus as i128, a as i128);
        let (mut s0, mut s1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        Ok(self.reduce_i128(s0))
    }

    pub fn powmod(&self, mut a: u64, mut k: u64) -> u64 {
        let mut r = 1 % self.modulus;
        while k > 0 {
            if k & 1 == 1 {
                r = self.mulmod(r, a);
            }
            a = self.mulmod(a, a);
            k >>= 1;
        }
        r
    }

    pub fn same(a: &Arc<Self>, b: &Arc<Self>) -> bool {
        Arc::ptr_eq(a, b) || **a == **b
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert!(PadicContext::new(2, 2, 10, None).is_err());
        assert!(PadicContext::new(9, 2, 10, None).is_err());
        assert!(PadicContext::new(3, 2, 41, None).is_err());
        assert!(PadicContext::new(3, 3, 10, Some(6)).is_err());
        assert!(PadicContext::new(3, 3, 40, None).is_ok());
    }

    #[test]
    fn ramification_degrees() {
        assert_eq!(PadicContext::new(3, 1, 10, None).unwrap().e(), 1);
        assert_eq!(PadicContext::new(3, 2, 10, None).unwrap().e(), 2);
        assert_eq!(PadicContext::new(3, 3, 10, None).unwrap().e(), 6);
        assert_eq!(PadicContext::new(3, 3, 10, Some(27)).unwrap().e(), 18);
        assert_eq!(PadicContext::new(5, 2, 10, None).unwrap().e(), 4);
    }

    #[test]
    fn max_prec_for_three() {
        assert_eq!(PadicContext::max_prec(3), 40);
    }
}
