//! Truncated matrices of `U_p` and `T_l` assembled from level-structure recipes.
//!
//! A recipe lists, for each pair of class representatives `(i, j)`, the local matrices
//! `δ_p` whose weight-`κ` actions make up the block `(i, j)` of the operator. The
//! assembled matrix uses the interleaved basis `1_0, …, 1_{t-1}, z_0, …, z_{t-1}, z_0², …`
//! and is also kept in the rescaled basis `1, pz, p²z², …` in which the error-space
//! estimates are stated.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::{Mat2, Matrix};
use crate::padic::{CycloElt, DirichletCharacter, PadicContext, WeightChar, Q};
use crate::quatalg::{delta_decomposition, Quaternion, SplittingMap};
use crate::spectral::{certified_newton, char_series, BlockWeights, CharSeries, PolygonData};
use crate::weightact::{audit, b_basis, generating_matrix, MonoidElt, Scale, ScaledMatrix, Shape, ShapeReport};

/// Which operator a recipe describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OpShape {
    Up,
    /// `T_l` for a prime `l ≠ p`.
    Tl(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecipeEntry {
    /// Target block.
    pub i: usize,
    /// Source block.
    pub j: usize,
    pub delta: MonoidElt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UpRecipe {
    t: usize,
    shape: OpShape,
    entries: Vec<RecipeEntry>,
}

impl UpRecipe {
    /// Checks that every block row and column receives `p` (resp. `l + 1`) operators of the
    /// right shape.
    pub fn new(t: usize, shape: OpShape, entries: Vec<RecipeEntry>) -> Result<Self> {
        if t == 0 {
            return Err(Error::Precondition("a recipe needs at least one block".into()));
        }
        let ctx = entries
            .first()
            .ok_or_else(|| Error::Precondition("empty recipe".into()))?
            .delta
            .ctx()
            .clone();
        let per_block = match shape {
            OpShape::Up => ctx.p() as usize,
            OpShape::Tl(l) => {
                if l % ctx.p() == 0 {
                    return Err(Error::Precondition(format!("T_{l} at a multiple of p")));
                }
                l as usize + 1
            }
        };
        let mut row_count = vec![0usize; t];
        let mut col_count = vec![0usize; t];
        for e in &entries {
            if e.i >= t || e.j >= t {
                return Err(Error::Dimension(format!("entry ({}, {}) outside {t} blocks", e.i, e.j)));
            }
            if !PadicContext::same(e.delta.ctx(), &ctx) {
                return Err(Error::ContextMismatch);
            }
            let want = match shape {
                OpShape::Up => Shape::Up,
                OpShape::Tl(_) => Shape::Tl,
            };
            if e.delta.shape() != want {
                return Err(Error::Precondition(format!(
                    "entry ({}, {}) has shape {:?}, expected {want:?}",
                    e.i,
                    e.j,
                    e.delta.shape()
                )));
            }
            row_count[e.i] += 1;
            col_count[e.j] += 1;
        }
        for (k, (&r, &c)) in row_count.iter().zip(&col_count).enumerate() {
            if r != per_block || c != per_block {
                return Err(Error::Precondition(format!(
                    "block {k} receives {r} operators in its row and {c} in its column, expected {per_block}"
                )));
            }
        }
        Ok(UpRecipe { t, shape, entries })
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn shape(&self) -> OpShape {
        self.shape
    }

    pub fn entries(&self) -> &[RecipeEntry] {
        &self.entries
    }

    pub fn ctx(&self) -> &Arc<PadicContext> {
        self.entries[0].delta.ctx()
    }
}

/// The operator truncated to `blocks` blocks of size `t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedOpMatrix {
    /// Basis `z^n` on each class, interleaved.
    pub standard: Matrix,
    /// Basis `p^n z^n` on each class, interleaved.
    pub rescaled: ScaledMatrix,
    pub t: usize,
    pub blocks: usize,
    pub shape: OpShape,
}

impl TruncatedOpMatrix {
    pub fn ctx(&self) -> &Arc<PadicContext> {
        self.standard.ctx()
    }

    pub fn size(&self) -> usize {
        self.t * self.blocks
    }

    pub fn weights(&self) -> BlockWeights {
        BlockWeights { t: self.t, blocks: self.blocks }
    }

    pub fn char_series(&self) -> Result<CharSeries> {
        char_series(&self.standard)
    }

    /// Newton polygon of the untruncated operator, certified on a prefix.
    pub fn newton(&self) -> Result<PolygonData> {
        Ok(certified_newton(&self.char_series()?, self.weights()))
    }

    /// The same operator in the basis grouped by class: `z_0^0, z_0^1, …, z_1^0, …`.
    pub fn grouped(&self) -> Matrix {
        let perm: Vec<usize> = (0..self.t)
            .flat_map(|i| (0..self.blocks).map(move |n| n * self.t + i))
            .collect();
        self.standard.submatrix(&perm, &perm)
    }
}

/// Sums the actions of the recipe's matrices, each truncated to `blocks` terms.
pub fn assemble(recipe: &UpRecipe, kappa: &WeightChar, blocks: usize) -> Result<TruncatedOpMatrix> {
    let ctx = recipe.ctx().clone();
    let t = recipe.t();
    let n = t * blocks;
    let mut standard = Matrix::zeros(&ctx, n, n);
    for e in recipe.entries() {
        let act = generating_matrix(&e.delta, kappa, blocks, None)?;
        for a in 0..blocks {
            for b in 0..blocks {
                let x = &act.standard[(a, b)];
                if !x.is_zero() {
                    standard[(a * t + e.i, b * t + e.j)] += x;
                }
            }
        }
    }
    let (u, v) = b_basis(&ctx)?;
    let rescaled =
        ScaledMatrix::rescale(&standard, |r| u.pow((r / t) as u64), |c| v.pow((c / t) as u64))?;
    Ok(TruncatedOpMatrix { standard, rescaled, t, blocks, shape: recipe.shape() })
}

/// The `t × t` matrix `Σ χ(d_δ)` over the recipe, the weight-two classical operator.
pub fn classical_block(recipe: &UpRecipe, chi: &DirichletCharacter) -> Result<Matrix> {
    let ctx = recipe.ctx();
    let mut m = Matrix::zeros(ctx, recipe.t(), recipe.t());
    for e in recipe.entries() {
        m[(e.i, e.j)] += &chi.eval_elt(&e.delta.mat().d)?;
    }
    Ok(m)
}

/// Classical blocks for the twists `ψω^{-2r}`, `r = 0, …, (p-3)/2` (one period in `n`).
pub fn classical_twists(recipe: &UpRecipe, psi: &DirichletCharacter) -> Result<Vec<Matrix>> {
    let q = ((recipe.ctx().p() - 1) / 2) as i64;
    (0..q).map(|r| classical_block(recipe, &psi.twist_omega(-2 * r))).collect()
}

/// Checks that the rescaled matrix minus `Diag(c^n · blocks[n mod len])` lies in the error
/// space, with `c = p` for `U_p` and `c = l` for `T_l`. Diagonal blocks must be `≡ 0` mod
/// `p^{n+1}` (resp. `p`), blocks below the diagonal mod `p^{n+2}` (resp. `p^{n-n'+2}`),
/// blocks above mod `p^{n'}` (resp. `p^{n'-n}`).
pub fn verify_error_decomposition(m: &TruncatedOpMatrix, blocks: &[Matrix]) -> Result<ShapeReport> {
    let ctx = m.ctx().clone();
    let t = m.t;
    if blocks.is_empty() || blocks.iter().any(|b| b.rows() != t || b.cols() != t) {
        return Err(Error::Dimension(format!("classical blocks must be {t}×{t}")));
    }
    let c = match m.shape {
        OpShape::Up => ctx.p(),
        OpShape::Tl(l) => l,
    };
    let mut violations = Vec::new();
    let mut undecided = Vec::new();
    let mut scale = CycloElt::one(&ctx);
    let c_elt = CycloElt::from_i64(&ctx, c as i64);
    for n in 0..m.blocks {
        let block = &blocks[n % blocks.len()];
        for n2 in 0..m.blocks {
            let bound = match (m.shape, n.cmp(&n2)) {
                (OpShape::Up, core::cmp::Ordering::Equal) => n + 1,
                (OpShape::Up, core::cmp::Ordering::Greater) => n + 2,
                (OpShape::Up, core::cmp::Ordering::Less) => n2,
                (OpShape::Tl(_), core::cmp::Ordering::Equal) => 1,
                (OpShape::Tl(_), core::cmp::Ordering::Greater) => n - n2 + 2,
                (OpShape::Tl(_), core::cmp::Ordering::Less) => n2 - n,
            };
            let bound = Q::from_integer(bound as i64);
            for i in 0..t {
                for j in 0..t {
                    let (r, col) = (n * t + i, n2 * t + j);
                    let val = if n == n2 {
                        m.rescaled.valuation_minus(r, col, &(&block[(i, j)] * &scale))
                    } else {
                        m.rescaled.valuation(r, col)
                    };
                    audit(val, bound, (r, col), &mut violations, &mut undecided);
                }
            }
        }
        scale = &scale * &c_elt;
    }
    Ok(ShapeReport {
        holds: violations.is_empty() && undecided.is_empty(),
        strict: ctx.m() >= 4,
        violations,
        undecided,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stability {
    /// Smallest block count at which the first slopes agree with those at `blocks + 5`.
    pub blocks: usize,
    pub slopes: Vec<Q>,
}

/// Increases the truncation from `start` blocks until the first `n_slopes` certified slopes
/// agree with those five blocks further out; gives up past `n_slopes + prec` blocks.
pub fn truncation_stability(
    recipe: &UpRecipe,
    kappa: &WeightChar,
    n_slopes: usize,
    start: usize,
) -> Result<Stability> {
    let limit = n_slopes + recipe.ctx().prec() as usize;
    let slopes_at = |n: usize| -> Result<Vec<Q>> {
        let mut s = assemble(recipe, kappa, n)?.newton()?.certified_slopes();
        s.truncate(n_slopes);
        Ok(s)
    };
    let mut n = start.max(1);
    let mut here = slopes_at(n)?;
    while n <= limit {
        let there = slopes_at(n + 5)?;
        if here.len() == n_slopes && here == there {
            return Ok(Stability { blocks: n, slopes: here });
        }
        n += 1;
        here = slopes_at(n)?;
    }
    Err(Error::PrecisionExhausted(format!(
        "first {n_slopes} slopes did not stabilise by {limit} blocks"
    )))
}

/// Smallest truncation, from `start` blocks up, whose Newton polygon is certified on at
/// least `need` slopes.
pub fn certified_truncation(
    recipe: &UpRecipe,
    kappa: &WeightChar,
    need: usize,
    start: usize,
) -> Result<(TruncatedOpMatrix, PolygonData)> {
    let limit = need + recipe.ctx().prec() as usize;
    for blocks in start.max(1)..=limit {
        let m = assemble(recipe, kappa, blocks)?;
        let np = m.newton()?;
        if np.certified >= need {
            return Ok((m, np));
        }
    }
    Err(Error::PrecisionExhausted(format!("fewer than {need} slopes certified by {limit} blocks")))
}

/// The definite quaternion example at `p = 3`: Hurwitz order, level `U_1(9)`-type, one class.
pub mod example {
    use super::*;

    /// `Z_3[ζ_3]` at the given precision.
    pub fn context(prec: u32) -> Result<Arc<PadicContext>> {
        PadicContext::new(3, 2, prec, None)
    }

    /// The even character of conductor 9.
    pub fn psi() -> DirichletCharacter {
        DirichletCharacter::new(3, 2, 0, 1).expect("valid character")
    }

    pub fn weight(w0: &CycloElt) -> WeightChar {
        WeightChar::DiskPoint { psi: psi(), w0: w0.clone() }
    }

    /// The three local matrices with their global quaternions.
    pub fn deltas(ctx: &Arc<PadicContext>) -> Result<Vec<(Quaternion, Mat2)>> {
        delta_decomposition(&SplittingMap::hurwitz_at_three(ctx)?)
    }

    pub fn recipe(ctx: &Arc<PadicContext>) -> Result<UpRecipe> {
        let entries = deltas(ctx)?
            .into_iter()
            .map(|(_, m)| Ok(RecipeEntry { i: 0, j: 0, delta: MonoidElt::new(m)? }))
            .collect::<Result<Vec<_>>>()?;
        UpRecipe::new(1, OpShape::Up, entries)
    }

    /// `U_3` at `κ = x⟨x⟩^{w0}ψ`, truncated to `n` terms.
    pub fn up(ctx: &Arc<PadicContext>, w0: &CycloElt, n: usize) -> Result<TruncatedOpMatrix> {
        if !PadicContext::same(ctx, w0.ctx()) {
            return Err(Error::ContextMismatch);
        }
        assemble(&recipe(ctx)?, &weight(w0), n)
    }

    /// `ξ = ψ(4)` as `ζ^k`, and the uniformizer `ξ - 1 = π·(1 + ζ + … + ζ^{k-1})`.
    pub fn xi_uniformizer(ctx: &Arc<PadicContext>) -> Result<(CycloElt, Scale)> {
        let xi = psi().eval(ctx, 4)?;
        let order = ctx.cyclo_order() as i64;
        let k = (1..order)
            .find(|&k| CycloElt::zeta_pow(ctx, k) == xi)
            .ok_or_else(|| Error::SearchFailed("ψ(4) is not a power of ζ".into()))?;
        let unit = (0..k).fold(CycloElt::zero(ctx), |acc, i| acc + CycloElt::zeta_pow(ctx, i));
        Ok((xi, Scale { unit, s: 1 }))
    }

    /// `Diag(1/(3π)) · U · Diag(π)` with `π = ψ(4) - 1`.
    pub fn rescaled(m: &TruncatedOpMatrix) -> Result<ScaledMatrix> {
        let ctx = m.ctx();
        let (_, pi) = xi_uniformizer(ctx)?;
        let u = Scale::p(ctx)?.mul(&pi).inverse()?;
        ScaledMatrix::rescale(&m.standard, |i| u.pow(i as u64), |j| pi.pow(j as u64))
    }

    /// Every entry of the rescaled matrix minus `2π·I` is divisible by 3.
    pub fn congruent_to_two_pi(m: &TruncatedOpMatrix) -> Result<bool> {
        let ctx = m.ctx();
        let s = rescaled(m)?;
        let (xi, _) = xi_uniformizer(ctx)?;
        let two_pi = (&xi - &CycloElt::one(ctx)).scale(2);
        let zero = CycloElt::zero(ctx);
        let one = Q::from_integer(1);
        for i in 0..m.size() {
            for j in 0..m.size() {
                let target = if i == j { &two_pi } else { &zero };
                if !s.valuation_minus(i, j, target).at_least(one) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// `true` when block row `n` of the grouped-basis matrix is divisible by `p^n`.
pub fn rows_divisible(m: &TruncatedOpMatrix) -> bool {
    let e = m.ctx().e() as u64;
    (0..m.size()).all(|r| {
        let need = e * (r / m.t) as u64;
        (0..m.size()).all(|c| match m.standard[(r, c)].pi_valuation() {
            Some(v) => v >= need,
            None => true,
        })
    })
}
