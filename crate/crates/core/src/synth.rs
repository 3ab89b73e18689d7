//! Seeded synthetic data: level-structure recipes at `p = 3, m = 4` and commuting Hecke
//! families for projector tests.
//!
//! Recipes are random rather than derived from a quaternion algebra. Each block column `j`
//! sends its `p` operators to rows `σ_k(j)` for random permutations `σ_0, …, σ_{p-1}`, so
//! the row and column counts hold by construction. Each `δ = (a b; c d)` has `det δ = p`,
//! `p^m | c` and `d` a unit.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::padic::{CycloElt, DirichletCharacter, PadicContext, Valuation, WeightChar, Q};
use crate::spectral::{char_series, elementary_divisors};
use crate::upmat::{assemble, classical_twists, OpShape, RecipeEntry, TruncatedOpMatrix, UpRecipe};
use crate::weightact::MonoidElt;

/// `p = 3`, `m = 4`: coefficients in `Z_3[ζ_27]`, `e = 18`.
pub fn context(prec: u32) -> Result<Arc<PadicContext>> {
    PadicContext::new(3, 4, prec, None)
}

/// An even character of conductor `3^4`.
pub fn psi() -> DirichletCharacter {
    DirichletCharacter::new(3, 4, 0, 1).expect("valid character")
}

fn random_zp<R: Rng + ?Sized>(ctx: &Arc<PadicContext>, rng: &mut R) -> CycloElt {
    CycloElt::from_residue(ctx, rng.gen_range(0..ctx.modulus()))
}

fn random_unit<R: Rng + ?Sized>(ctx: &Arc<PadicContext>, rng: &mut R) -> CycloElt {
    loop {
        let x = random_zp(ctx, rng);
        if x.is_unit() {
            return x;
        }
    }
}

/// `(a b; c d)` with `d` a unit, `c = p^m c'`, `b` arbitrary and `a = (p + bc)/d`.
pub fn random_delta<R: Rng + ?Sized>(ctx: &Arc<PadicContext>, rng: &mut R) -> Result<MonoidElt> {
    let p = CycloElt::from_i64(ctx, ctx.p() as i64);
    let d = random_unit(ctx, rng);
    let b = random_zp(ctx, rng);
    let c = &random_zp(ctx, rng) * &p.pow(u64::from(ctx.m()));
    let a = &(&p + &(&b * &c)) * &d.inverse()?;
    MonoidElt::new(crate::matrix::Mat2::new(a, b, c, d))
}

/// A `U_p` recipe on `t` classes.
pub fn random_recipe<R: Rng + ?Sized>(ctx: &Arc<PadicContext>, t: usize, rng: &mut R) -> Result<UpRecipe> {
    let mut entries = Vec::new();
    for _ in 0..ctx.p() {
        let mut sigma: Vec<usize> = (0..t).collect();
        sigma.shuffle(rng);
        for (j, &i) in sigma.iter().enumerate() {
            entries.push(RecipeEntry { i, j, delta: random_delta(ctx, rng)? });
        }
    }
    UpRecipe::new(t, OpShape::Up, entries)
}

/// A recipe with the data the sharp slope bound is stated in terms of.
#[derive(Clone, Debug)]
pub struct SyntheticCase {
    pub recipe: UpRecipe,
    pub psi: DirichletCharacter,
    pub w0: CycloElt,
    /// Hodge slopes of the classical blocks, one list per twist `ψω^{-2r}`.
    pub alphas: Vec<Vec<Q>>,
}

impl SyntheticCase {
    pub fn weight(&self) -> WeightChar {
        WeightChar::DiskPoint { psi: self.psi, w0: self.w0.clone() }
    }

    pub fn t(&self) -> usize {
        self.recipe.t()
    }

    pub fn assemble(&self, blocks: usize) -> Result<TruncatedOpMatrix> {
        assemble(&self.recipe, &self.weight(), blocks)
    }
}

fn det_valuation(m: &Matrix) -> Valuation {
    let cs = char_series(m).expect("square");
    cs.coeffs[cs.degree()].valuation()
}

/// Diagonal block `n` of the rescaled matrix.
pub fn diagonal_block(m: &TruncatedOpMatrix, n: usize) -> Matrix {
    let idx: Vec<usize> = (0..m.t).map(|i| n * m.t + i).collect();
    m.rescaled.values.submatrix(&idx, &idx)
}

/// Draws recipes until one has classical Hodge slopes in `[0, 1]` and, for the first
/// `check_blocks` diagonal blocks at the drawn `w0`, `v(det M_n) = nt + Σ α`. These are the
/// properties genuine quaternionic data gets from the duality pairing.
pub fn sample_case<R: Rng + ?Sized>(
    ctx: &Arc<PadicContext>,
    t: usize,
    check_blocks: usize,
    rng: &mut R,
) -> Result<SyntheticCase> {
    let psi = psi();
    let zero = Q::from_integer(0);
    let one = Q::from_integer(1);
    for _ in 0..10_000 {
        let recipe = random_recipe(ctx, t, rng)?;
        let w0 = random_zp(ctx, rng);
        let blocks = classical_twists(&recipe, &psi)?;
        let Ok(alphas) = blocks.iter().map(elementary_divisors).collect::<Result<Vec<_>>>() else {
            continue;
        };
        if alphas.iter().flatten().any(|a| *a < zero || *a > one) {
            continue;
        }
        let case = SyntheticCase { recipe, psi, w0, alphas };
        let m = case.assemble(check_blocks)?;
        let dets_ok = (0..check_blocks).all(|n| {
            let sum: Q = case.alphas[n % case.alphas.len()].iter().sum();
            det_valuation(&diagonal_block(&m, n)) == Valuation::Exact(sum + Q::from_integer((n * t) as i64))
        });
        if dets_ok {
            return Ok(case);
        }
    }
    Err(Error::SearchFailed(format!("no admissible recipe with t = {t}")))
}

/// A random `n × n` matrix over `Z_p` whose reduction is invertible.
pub fn random_unimodular<R: Rng + ?Sized>(ctx: &Arc<PadicContext>, n: usize, rng: &mut R) -> Matrix {
    loop {
        let s = Matrix::from_fn(ctx, n, n, |_, _| random_zp(ctx, rng));
        if s.inverse().is_ok() {
            return s;
        }
    }
}

pub fn random_matrix<R: Rng + ?Sized>(ctx: &Arc<PadicContext>, n: usize, rng: &mut R) -> Matrix {
    Matrix::from_fn(ctx, n, n, |_, _| random_zp(ctx, rng))
}

/// A Hecke-like operator `S·D·S⁻¹ + π·X` whose reduction has the eigenvalues `residues`
/// (with the given multiplicities), returned with its conjugator and diagonal part.
#[derive(Clone, Debug)]
pub struct HeckeFamily {
    pub op: Matrix,
    pub conj: Matrix,
    pub diagonal: Vec<u64>,
    /// Distinct residues, one per eigen-space.
    pub residues: Vec<u64>,
}

pub fn random_hecke<R: Rng + ?Sized>(
    ctx: &Arc<PadicContext>,
    multiplicities: &[usize],
    perturb: bool,
    rng: &mut R,
) -> Result<HeckeFamily> {
    let p = ctx.p();
    if multiplicities.len() as u64 > p {
        return Err(Error::Precondition("more eigen-spaces than residues".into()));
    }
    let mut residues: Vec<u64> = (0..p).collect();
    residues.shuffle(rng);
    residues.truncate(multiplicities.len());
    let diagonal: Vec<u64> = residues
        .iter()
        .zip(multiplicities)
        .flat_map(|(&r, &k)| core::iter::repeat(r).take(k))
        .collect();
    let n = diagonal.len();
    let d = Matrix::diagonal(ctx, &diagonal.iter().map(|&r| CycloElt::from_residue(ctx, r)).collect::<Vec<_>>());
    let s = random_unimodular(ctx, n, rng);
    let mut op = s.mul(&d)?.mul(&s.inverse()?)?;
    if perturb {
        let pi = CycloElt::uniformizer(ctx);
        op = op.add(&random_matrix(ctx, n, rng).scale(&pi))?;
    }
    Ok(HeckeFamily { op, conj: s, diagonal, residues })
}

/// `S·B·S⁻¹` with `B` block diagonal along the eigen-spaces of `family` (unperturbed), so it
/// commutes with the family's operator.
pub fn commuting_operator<R: Rng + ?Sized>(
    ctx: &Arc<PadicContext>,
    family: &HeckeFamily,
    multiplicities: &[usize],
    rng: &mut R,
) -> Result<Matrix> {
    let blocks: Vec<Matrix> = multiplicities.iter().map(|&k| random_matrix(ctx, k, rng)).collect();
    let b = Matrix::block_diag(ctx, &blocks);
    family.conj.mul(&b)?.mul(&family.conj.inverse()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn deltas_lie_in_the_monoid() {
        let ctx = context(20).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let d = random_delta(&ctx, &mut rng).unwrap();
            assert_eq!(d.mat().det(), CycloElt::from_i64(&ctx, 3));
            assert_eq!(d.shape(), crate::weightact::Shape::Up);
        }
    }

    #[test]
    fn recipes_are_reproducible() {
        let ctx = context(20).unwrap();
        let a = random_recipe(&ctx, 3, &mut ChaCha8Rng::seed_from_u64(11)).unwrap();
        let b = random_recipe(&ctx, 3, &mut ChaCha8Rng::seed_from_u64(11)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.entries().len(), 9);
    }

    #[test]
    fn hecke_family_commutes() {
        let ctx = PadicContext::new(3, 2, 20, None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mult = [2, 1];
        let f = random_hecke(&ctx, &mult, false, &mut rng).unwrap();
        let m = commuting_operator(&ctx, &f, &mult, &mut rng).unwrap();
        assert_eq!(f.op.mul(&m).unwrap(), m.mul(&f.op).unwrap());
    }
}
