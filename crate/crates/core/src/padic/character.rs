use alloc::format;
use alloc::sync::Arc;

use super::context::PadicContext;
use super::elt::CycloElt;
use super::series::teichmuller_residue;
use crate::error::{Error, Result};

/// A Dirichlet character of conductor dividing `p^{m'}`.
///
/// `(Z/p^{m'})^×` is split as `μ_{p-1} × (1+pZ)/(1+p^{m'}Z)`, with generators the
/// Teichmüller part and `1 + p`. The character sends `a` to
/// `ω(a)^tame · ζ_{p^{m'-1}}^{wild·j}` where `⟨a⟩ ≡ (1+p)^j mod p^{m'}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DirichletCharacter {
    p: u64,
    cond_exp: u32,
    tame: u64,
    wild: u64,
}

impl DirichletCharacter {
    pub fn new(p: u64, cond_exp: u32, tame: u64, wild: u64) -> Result<Self> {
        if p < 3 {
            return Err(Error::Precondition("characters need an odd prime".into()));
        }
        let wild_order = if cond_exp >= 1 { p.pow(cond_exp - 1) } else { 1 };
        if wild_order > 1 << 20 {
            return Err(Error::Precondition("conductor too large".into()));
        }
        if tame >= p - 1 || wild >= wild_order {
            return Err(Error::Precondition(format!(
                "exponents ({tame}, {wild}) out of range for conductor {p}^{cond_exp}"
            )));
        }
        if cond_exp == 0 && tame != 0 {
            return Err(Error::Precondition("conductor 1 forces the trivial character".into()));
        }
        Ok(DirichletCharacter { p, cond_exp, tame, wild })
    }

    pub fn trivial(p: u64) -> Self {
        DirichletCharacter { p, cond_exp: 0, tame: 0, wild: 0 }
    }

    /// `ω^j` for the Teichmüller character `ω`.
    pub fn omega_pow(p: u64, j: i64) -> Self {
        let t = j.rem_euclid(p as i64 - 1) as u64;
        DirichletCharacter { p, cond_exp: u32::from(t != 0), tame: t, wild: 0 }.normalised()
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Exponent `m'` of the modulus `p^{m'}` the data is expressed at.
    pub fn cond_exp(&self) -> u32 {
        self.cond_exp
    }

    pub fn tame(&self) -> u64 {
        self.tame
    }

    pub fn wild(&self) -> u64 {
        self.wild
    }

    /// Exponent of the exact conductor.
    pub fn conductor_exp(&self) -> u32 {
        self.normalised().cond_exp
    }

    fn normalised(mut self) -> Self {
        while self.cond_exp >= 2 && self.wild % self.p == 0 {
            self.wild /= self.p;
            self.cond_exp -= 1;
        }
        if self.cond_exp == 1 && self.tame == 0 {
            self.cond_exp = 0;
        }
        self
    }

    fn wild_at(&self, level: u32) -> u64 {
        if self.cond_exp <= 1 {
            0
        } else {
            self.wild * self.p.pow(level - self.cond_exp)
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.p != other.p {
            return Err(Error::Precondition("characters for different primes".into()));
        }
        let level = self.cond_exp.max(other.cond_exp).max(1);
        let wild_order = self.p.pow(level - 1);
        let tame = (self.tame + other.tame) % (self.p - 1);
        let wild = (self.wild_at(level) + other.wild_at(level)) % wild_order;
        Ok(DirichletCharacter { p: self.p, cond_exp: level, tame, wild }.normalised())
    }

    pub fn inverse(&self) -> Self {
        let wild_order = if self.cond_exp >= 1 { self.p.pow(self.cond_exp - 1) } else { 1 };
        DirichletCharacter {
            p: self.p,
            cond_exp: self.cond_exp,
            tame: (self.p - 1 - self.tame) % (self.p - 1),
            wild: (wild_order - self.wild) % wild_order,
        }
    }

    /// `χ · ω^j`.
    pub fn twist_omega(&self, j: i64) -> Self {
        self.mul(&Self::omega_pow(self.p, j)).expect("same prime")
    }

    /// `χ(-1) = 1`.
    pub fn is_even(&self) -> bool {
        self.tame % 2 == 0
    }

    /// Order of the character as a group element.
    pub fn order(&self) -> u64 {
        let n = self.normalised();
        let tame_ord = (n.p - 1) / num_integer::gcd(n.tame, n.p - 1);
        let wild_ord = if n.cond_exp >= 2 { n.p.pow(n.cond_exp - 1) } else { 1 };
        tame_ord * wild_ord
    }

    /// `χ(a)` for an integer `a` prime to `p`.
    pub fn eval(&self, ctx: &Arc<PadicContext>, a: i64) -> Result<CycloElt> {
        self.eval_residue(ctx, ctx.reduce_i128(a as i128))
    }

    /// `χ(a)` for `a ∈ Z_p^×` given as a context element.
    pub fn eval_elt(&self, a: &CycloElt) -> Result<CycloElt> {
        let r = a
            .as_zp()
            .ok_or_else(|| Error::Precondition("character argument must lie in Z_p".into()))?;
        self.eval_residue(a.ctx(), r)
    }

    fn eval_residue(&self, ctx: &Arc<PadicContext>, a: u64) -> Result<CycloElt> {
        if ctx.p() != self.p {
            return Err(Error::ContextMismatch);
        }
        if a % self.p == 0 {
            return Err(Error::Precondition("character evaluated at a multiple of p".into()));
        }
        let mut value = if self.tame == 0 {
            CycloElt::one(ctx)
        } else {
            let w = teichmuller_residue(ctx, a)?;
            CycloElt::from_residue(ctx, ctx.powmod(w, self.tame))
        };
        if self.cond_exp >= 2 && self.wild != 0 {
            let level = self.cond_exp;
            let wild_order = self.p.pow(level - 1);
            if ctx.cyclo_order() % wild_order != 0 {
                return Err(Error::Precondition(format!(
                    "context lacks roots of unity of order {wild_order}"
                )));
            }
            let md = self.p.pow(level);
            let a_mod = a % md;
            // ω(a) mod p^level is a^{p^{level-1}}.
            let mut omega = a_mod;
            for _ in 0..level - 1 {
                omega = pow_small(omega, self.p, md);
            }
            let omega_inv = pow_small(omega, self.p - 2, md);
            let bracket = (a_mod as u128 * omega_inv as u128 % md as u128) as u64;
            let gen = 1 + self.p;
            let mut acc = 1u64;
            let mut j = 0u64;
            while acc != bracket {
                acc = (acc as u128 * gen as u128 % md as u128) as u64;
                j += 1;
                if j > wild_order {
                    return Err(Error::SearchFailed("discrete logarithm".into()));
                }
            }
            let k = (self.wild * j) % wild_order;
            let step = (ctx.cyclo_order() / wild_order) as i64;
            value = &value * &CycloElt::zeta_pow(ctx, k as i64 * step);
        }
        Ok(value)
    }
}

fn pow_small(mut a: u64, mut k: u64, md: u64) -> u64 {
    let mut r = 1 % md;
    while k > 0 {
        if k & 1 == 1 {
            r = (r as u128 * a as u128 % md as u128) as u64;
        }
        a = (a as u128 * a as u128 % md as u128) as u64;
        k >>= 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conductor_nine_character_values() {
        let ctx = PadicContext::new(3, 2, 40, None).unwrap();
        let psi = DirichletCharacter::new(3, 2, 0, 1).unwrap();
        let xi = psi.eval(&ctx, 4).unwrap();
        assert!(!xi.is_one());
        assert!(xi.pow(3).is_one());
        assert_eq!(psi.eval(&ctx, 7).unwrap(), xi.pow(2));
        assert!(psi.eval(&ctx, -1).unwrap().is_one());
        assert!(psi.eval(&ctx, 3).is_err());
        assert_eq!(psi.order(), 3);
    }

    #[test]
    fn trivial_and_omega() {
        let ctx = PadicContext::new(5, 1, 20, None).unwrap();
        let one = DirichletCharacter::trivial(5);
        assert!(one.eval(&ctx, 7).unwrap().is_one());
        let w = DirichletCharacter::omega_pow(5, 1);
        let v = w.eval(&ctx, 2).unwrap();
        assert_eq!(v.as_zp().unwrap() % 25, 7);
        assert!(w.twist_omega(-1).eval(&ctx, 2).unwrap().is_one());
    }

    #[test]
    fn multiplicative_on_all_units() {
        let ctx = PadicContext::new(3, 4, 30, None).unwrap();
        for wild in [1, 5, 13] {
            let chi = DirichletCharacter::new(3, 4, 1, wild).unwrap();
            for a in (1..81).filter(|a| a % 3 != 0) {
                for b in (1..81).filter(|b| b % 3 != 0) {
                    let lhs = chi.eval(&ctx, a * b).unwrap();
                    let rhs = chi.eval(&ctx, a).unwrap() * chi.eval(&ctx, b).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn products_and_inverses() {
        let ctx = PadicContext::new(3, 4, 30, None).unwrap();
        let a = DirichletCharacter::new(3, 4, 1, 5).unwrap();
        let b = DirichletCharacter::new(3, 2, 0, 2).unwrap();
        let ab = a.mul(&b).unwrap();
        for x in [2i64, 4, 5, 7, 40] {
            let lhs = ab.eval(&ctx, x).unwrap();
            let rhs = a.eval(&ctx, x).unwrap() * b.eval(&ctx, x).unwrap();
            assert_eq!(lhs, rhs);
        }
        assert_eq!(a.mul(&a.inverse()).unwrap(), DirichletCharacter::trivial(3));
    }
}
