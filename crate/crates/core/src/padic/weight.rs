use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::character::DirichletCharacter;
use super::elt::CycloElt;
use super::series::{binomial_coeffs, binomial_power, exp, teichmuller_residue};
use crate::error::{Error, Result};

/// A weight character `κ: Z_p^× → O_E^×`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WeightChar {
    /// `κ(a) = a^k · ψ(a)`.
    Classical { k: u32, psi: DirichletCharacter },
    /// `κ(a) = a · ψ(a) · ⟨a⟩^{w0}` with `v(w0) >= 0`.
    DiskPoint { psi: DirichletCharacter, w0: CycloElt },
}

/// `⟨a⟩ = a · ω(a)^{-1}` for `a ∈ Z_p^×`.
pub fn diamond(a: &CycloElt) -> Result<CycloElt> {
    let ctx = a.ctx();
    let r = a
        .as_zp()
        .ok_or_else(|| Error::Precondition("⟨a⟩ needs a ∈ Z_p".into()))?;
    let w = teichmuller_residue(ctx, r)?;
    let w_inv = ctx.inv_residue(w)?;
    Ok(CycloElt::from_residue(ctx, ctx.mulmod(r, w_inv)))
}

impl WeightChar {
    pub fn psi(&self) -> &DirichletCharacter {
        match self {
            WeightChar::Classical { psi, .. } | WeightChar::DiskPoint { psi, .. } => psi,
        }
    }

    /// `κ(a)` for `a ∈ Z_p^×`.
    pub fn value(&self, a: &CycloElt) -> Result<CycloElt> {
        Ok(a * &self.kappa_eval(a)?)
    }

    /// `κ(d) / d`, the constant factor of the action.
    pub fn kappa_eval(&self, d: &CycloElt) -> Result<CycloElt> {
        if !d.is_unit() {
            return Err(Error::Precondition("κ evaluated at a non-unit".into()));
        }
        match self {
            WeightChar::Classical { k, psi } => {
                Ok(psi.eval_elt(d)? * d.pow(u64::from(k.saturating_sub(1))))
            }
            WeightChar::DiskPoint { psi, w0 } => {
                let one = CycloElt::one(d.ctx());
                let bracket = &diamond(d)? - &one;
                Ok(psi.eval_elt(d)? * binomial_power(w0, &bracket)?.value)
            }
        }
    }

    /// Coefficients of `(1 + x·z)^{k-1}` (classical) or `(1 + x·z)^{w0}` (disk), `n` terms.
    pub fn kappa_series(&self, x: &CycloElt, n: usize) -> Result<Vec<CycloElt>> {
        let ctx = x.ctx();
        match self {
            WeightChar::Classical { k, .. } => {
                let kk = k.saturating_sub(1) as usize;
                // Pascal row of binom(k-1, i), then scale by x^i.
                let mut row = vec![0u64; kk + 1];
                row[0] = 1;
                for r in 1..=kk {
                    for i in (1..=r).rev() {
                        row[i] = ctx.addmod(row[i], row[i - 1]);
                    }
                }
                let mut out = Vec::with_capacity(n);
                let mut xp = CycloElt::one(ctx);
                for i in 0..n {
                    if i <= kk {
                        out.push(xp.scale_residue(row[i]));
                        xp = &xp * x;
                    } else {
                        out.push(CycloElt::zero(ctx));
                    }
                }
                Ok(out)
            }
            WeightChar::DiskPoint { w0, .. } => {
                if x.valuation().below(1.into()) {
                    return Err(Error::Convergence(format!(
                        "c/d has valuation {} < 1",
                        x.valuation()
                    )));
                }
                binomial_coeffs(w0, x, n)
            }
        }
    }

    /// `T_κ = κ(exp(2p)) - 1`.
    pub fn t_coordinate(&self, ctx: &alloc::sync::Arc<super::PadicContext>) -> Result<CycloElt> {
        let two_p = CycloElt::from_i64(ctx, 2 * ctx.p() as i64);
        let g = exp(&two_p)?.value;
        Ok(&self.value(&g)? - &CycloElt::one(ctx))
    }
}
